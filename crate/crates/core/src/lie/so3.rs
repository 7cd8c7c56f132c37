//! The rotation group SO(3) with closed-form exponential, logarithm and
//! Jacobians. `θ = ‖x‖` throughout; coefficient functions switch to Taylor
//! polynomials below [`SMALL_ANGLE`].

use std::f64::consts::PI;

use super::{GroupElement, LieGroup, Square, Tangent, SINGULAR_JACOBIAN_DET};
use crate::error::{Error, Result};

/// Below this angle the Rodrigues-type coefficients use their Taylor series.
pub const SMALL_ANGLE: f64 = 1e-4;

/// Rotations whose angle is within this of `π` have no unique logarithm.
pub const ANTIPODAL_MARGIN: f64 = 1e-9;

/// The derivative coefficient `d′(θ)/θ` cancels to order `θ⁻⁴`; it uses its
/// series up to this angle instead.
const DERIVATIVE_SERIES_ANGLE: f64 = 0.1;

/// Above this angle the logarithm extracts the axis from the symmetric part.
const NEAR_PI_ANGLE: f64 = 2.5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct So3;

/// `x∧`, the cross-product matrix.
pub fn skew(x: &Tangent<3>) -> Square<3> {
    Square::<3>::new(0.0, -x[2], x[1], x[2], 0.0, -x[0], -x[1], x[0], 0.0)
}

/// `sin θ / θ`
fn sinc(theta: f64) -> f64 {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        theta.sin() / theta
    }
}

/// `(1 − cos θ) / θ²`
fn cosc(theta: f64) -> f64 {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        0.5 - t2 / 24.0 + t2 * t2 / 720.0
    } else {
        (1.0 - theta.cos()) / (theta * theta)
    }
}

/// `(θ − sin θ) / θ³`
fn sinc3(theta: f64) -> f64 {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
    } else {
        (theta - theta.sin()) / (theta * theta * theta)
    }
}

/// `1/θ² − (1 + cos θ) / (2θ sin θ)`, the `K²` coefficient of `J⁻¹`, written
/// with `cot(θ/2)` so it stays finite at `θ = π`.
fn inv_coeff(theta: f64) -> f64 {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    } else {
        let half = 0.5 * theta;
        1.0 / (theta * theta) - half.cos() / (2.0 * theta * half.sin())
    }
}

/// `(d/dθ inv_coeff(θ)) / θ`
fn inv_coeff_derivative_over_theta(theta: f64) -> f64 {
    if theta < DERIVATIVE_SERIES_ANGLE {
        let t2 = theta * theta;
        1.0 / 360.0 + t2 / 7560.0 + t2 * t2 / 201_600.0 + t2 * t2 * t2 / 5_987_520.0
    } else {
        let half = 0.5 * theta;
        let (s, c) = half.sin_cos();
        let t2 = theta * theta;
        -2.0 / (t2 * t2) + 1.0 / (4.0 * t2 * s * s) + c / (2.0 * t2 * theta * s)
    }
}

impl So3 {
    /// Log of a rotation whose angle is close to `π`, reading the axis off
    /// `(R + Rᵀ)/2 − cos θ·I = (1 − cos θ) a aᵀ`.
    fn log_near_pi(r: &Square<3>, theta: f64, cos: f64, sin_axis: &Tangent<3>) -> Tangent<3> {
        let outer = (r + r.transpose()) * 0.5 - Square::<3>::identity() * cos;
        let j = (0..3)
            .max_by(|&a, &b| outer[(a, a)].total_cmp(&outer[(b, b)]))
            .unwrap_or(0);
        let mut axis: Tangent<3> = outer.column(j).into();
        axis /= (outer[(j, j)] * (1.0 - cos)).sqrt();
        axis.normalize_mut();
        if axis.dot(sin_axis) < 0.0 {
            axis = -axis;
        }
        axis * theta
    }
}

impl LieGroup<3> for So3 {
    fn basis(&self, i: usize) -> Square<3> {
        skew(&super::unit(i))
    }

    fn vee(&self, algebra: &Square<3>) -> Tangent<3> {
        Tangent::<3>::new(algebra[(2, 1)], algebra[(0, 2)], algebra[(1, 0)])
    }

    fn in_domain(&self, x: &Tangent<3>) -> bool {
        x.norm() < PI
    }

    fn log(&self, g: &GroupElement<3>) -> Result<Tangent<3>> {
        let r = g.matrix();
        let cos = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
        // sin θ · axis
        let w = Tangent::<3>::new(
            r[(2, 1)] - r[(1, 2)],
            r[(0, 2)] - r[(2, 0)],
            r[(1, 0)] - r[(0, 1)],
        ) * 0.5;
        let theta = w.norm().atan2(cos);
        if theta > PI - ANTIPODAL_MARGIN {
            return Err(Error::Domain(format!(
                "rotation angle {theta} is within {ANTIPODAL_MARGIN:e} of π"
            )));
        }
        if theta > NEAR_PI_ANGLE {
            return Ok(Self::log_near_pi(r, theta, cos, &w));
        }
        Ok(w / sinc(theta))
    }

    fn wedge(&self, x: &Tangent<3>) -> Square<3> {
        skew(x)
    }

    fn exp(&self, x: &Tangent<3>) -> GroupElement<3> {
        let theta = x.norm();
        let k = skew(x);
        GroupElement::from_matrix(Square::identity() + k * sinc(theta) + k * k * cosc(theta))
    }

    fn inverse(&self, g: &GroupElement<3>) -> GroupElement<3> {
        GroupElement::from_matrix(g.matrix().transpose())
    }

    fn ad(&self, x: &Tangent<3>) -> Square<3> {
        skew(x)
    }

    fn adjoint(&self, g: &GroupElement<3>) -> Square<3> {
        *g.matrix()
    }

    fn left_jacobian(&self, x: &Tangent<3>) -> Square<3> {
        let theta = x.norm();
        let k = skew(x);
        Square::identity() + k * cosc(theta) + k * k * sinc3(theta)
    }

    fn right_jacobian(&self, x: &Tangent<3>) -> Square<3> {
        self.left_jacobian(&-x)
    }

    fn left_jacobian_inv(&self, x: &Tangent<3>) -> Result<Square<3>> {
        let theta = x.norm();
        // det J = 2(1 − cos θ)/θ²
        let det = 2.0 * cosc(theta);
        if det.abs() < SINGULAR_JACOBIAN_DET {
            return Err(Error::SingularJacobian { det });
        }
        let k = skew(x);
        Ok(Square::identity() - k * 0.5 + k * k * inv_coeff(theta))
    }

    fn right_jacobian_inv(&self, x: &Tangent<3>) -> Result<Square<3>> {
        self.left_jacobian_inv(&-x)
    }

    fn right_jacobian_inv_partial(&self, x: &Tangent<3>, k: usize) -> Square<3> {
        let theta = x.norm();
        let kx = skew(x);
        let ek = self.basis(k);
        ek * 0.5
            + kx * kx * (inv_coeff_derivative_over_theta(theta) * x[k])
            + (ek * kx + kx * ek) * inv_coeff(theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::unit;
    use approx::assert_relative_eq;

    /// Truncated power series of the matrix exponential.
    fn exp_series(a: &Square<3>, terms: usize) -> Square<3> {
        let mut term = Square::<3>::identity();
        let mut sum = Square::<3>::identity();
        for k in 1..terms {
            term = term * a / k as f64;
            sum += term;
        }
        sum
    }

    /// Columns `((∂g/∂q_j) g⁻¹)∨` (left) or `(g⁻¹ ∂g/∂q_j)∨` (right) by
    /// central differences of `g(q) = exp(q)`.
    fn fd_jacobian(x: &Tangent<3>, left: bool, step: f64) -> Square<3> {
        let so3 = So3;
        let g = so3.exp(x);
        let g_inv = g.matrix().transpose();
        let mut out = Square::<3>::zeros();
        for j in 0..3 {
            let dq = unit::<3>(j) * step;
            let d = (so3.exp(&(x + dq)).into_matrix() - so3.exp(&(x - dq)).into_matrix())
                / (2.0 * step);
            let col = if left { d * g_inv } else { g_inv * d };
            out.set_column(j, &so3.vee(&col));
        }
        out
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(So3.exp(&Tangent::<3>::zeros()).into_matrix(), Square::<3>::identity());
    }

    #[test]
    fn exp_matches_power_series() {
        let x = Tangent::<3>::new(PI / 2.0, 0.0, 0.0);
        let expected = exp_series(&skew(&x), 30);
        assert_relative_eq!(So3.exp(&x).into_matrix(), expected, epsilon = 1e-12);
    }

    #[test]
    fn exp_small_angle_branch_matches_power_series() {
        let x = Tangent::<3>::new(3e-5, -2e-5, 4e-5);
        let expected = exp_series(&skew(&x), 10);
        assert_relative_eq!(So3.exp(&x).into_matrix(), expected, epsilon = 1e-16);
    }

    #[test]
    fn log_roundtrip() {
        let x = Tangent::<3>::new(0.3, -0.2, 0.5);
        let back = So3.log(&So3.exp(&x)).unwrap();
        assert!((back - x).norm() < 1e-10);
        let x = Tangent::<3>::new(0.1, 0.2, 0.3);
        assert_relative_eq!(So3.log(&So3.exp(&x)).unwrap(), x, epsilon = 1e-14);
    }

    #[test]
    fn log_of_identity_is_zero() {
        assert_eq!(So3.log(&GroupElement::identity()).unwrap(), Tangent::<3>::zeros());
    }

    #[test]
    fn log_near_pi_branch() {
        let x = Tangent::<3>::new(1.0, -2.0, 0.5).normalize() * (PI - 1e-3);
        let back = So3.log(&So3.exp(&x)).unwrap();
        assert!((back - x).norm() < 1e-10, "{}", (back - x).norm());
    }

    #[test]
    fn log_rejects_antipodal_rotation() {
        let g = So3.exp(&Tangent::<3>::new(PI - 1e-10, 0.0, 0.0));
        assert!(matches!(So3.log(&g), Err(Error::Domain(_))));
    }

    #[test]
    fn exp_is_orthogonal() {
        let r = So3.exp(&Tangent::<3>::new(1.3, -2.1, 0.4)).into_matrix();
        assert_relative_eq!(r.transpose() * r, Square::<3>::identity(), epsilon = 1e-12);
        assert!((r.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobians_at_origin() {
        let z = Tangent::<3>::zeros();
        assert_eq!(So3.left_jacobian(&z), Square::<3>::identity());
        assert_eq!(So3.right_jacobian(&z), Square::<3>::identity());
        assert_eq!(So3.left_jacobian_inv(&z).unwrap(), Square::<3>::identity());
        assert_eq!(So3.right_jacobian_inv(&z).unwrap(), Square::<3>::identity());
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let x = Tangent::<3>::new(0.4, -0.1, 0.2);
        let jl = fd_jacobian(&x, true, 1e-6);
        let jr = fd_jacobian(&x, false, 1e-6);
        assert_relative_eq!(So3.left_jacobian(&x), jl, max_relative = 1e-6, epsilon = 1e-9);
        assert_relative_eq!(So3.right_jacobian(&x), jr, max_relative = 1e-6, epsilon = 1e-9);
        assert_relative_eq!(
            So3.left_jacobian_inv(&x).unwrap(),
            jl.try_inverse().unwrap(),
            max_relative = 1e-6,
            epsilon = 1e-9
        );
        assert_relative_eq!(
            So3.right_jacobian_inv(&x).unwrap(),
            jr.try_inverse().unwrap(),
            max_relative = 1e-6,
            epsilon = 1e-9
        );
    }

    fn fd_partial(x: &Tangent<3>, k: usize, step: f64) -> Square<3> {
        let dq = unit::<3>(k) * step;
        (So3.right_jacobian_inv(&(x + dq)).unwrap() - So3.right_jacobian_inv(&(x - dq)).unwrap())
            / (2.0 * step)
    }

    #[test]
    fn inverse_partial_at_origin() {
        let z = Tangent::<3>::zeros();
        for k in 0..3 {
            assert_relative_eq!(
                So3.right_jacobian_inv_partial(&z, k),
                fd_partial(&z, k, 1e-5),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn inverse_partial_matches_finite_differences() {
        let x = Tangent::<3>::new(0.2, 0.3, -0.1);
        let fd = fd_partial(&x, 2, 1e-5);
        let analytic = So3.right_jacobian_inv_partial(&x, 2);
        assert!((analytic - fd).norm() / fd.norm() < 1e-6);
    }

    #[test]
    fn inverse_partial_is_continuous_across_branches() {
        for theta in [0.0999, 0.1001, 2e-4, 0.5e-4] {
            let x = Tangent::<3>::new(0.6, 0.0, 0.8) * theta;
            for k in 0..3 {
                let fd = fd_partial(&x, k, 1e-6);
                assert_relative_eq!(
                    So3.right_jacobian_inv_partial(&x, k),
                    fd,
                    epsilon = 1e-8
                );
            }
        }
    }

    #[test]
    fn jacobian_inverse_singular_at_two_pi() {
        let x = Tangent::<3>::new(2.0 * PI, 0.0, 0.0);
        assert!(matches!(
            So3.right_jacobian_inv(&x),
            Err(Error::SingularJacobian { .. })
        ));
    }

    #[test]
    fn ad_is_cross_product() {
        let x = Tangent::<3>::new(0.3, -1.0, 2.0);
        let y = Tangent::<3>::new(-0.7, 0.2, 0.4);
        assert_relative_eq!(So3.ad(&x) * y, x.cross(&y), epsilon = 1e-15);
        assert_eq!(So3.ad(&Tangent::<3>::zeros()), Square::<3>::zeros());
    }
}
