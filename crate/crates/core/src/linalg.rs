//! Small dense helpers on fixed-size matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lie::{Square, Tangent};

/// Eigenvalues below this are treated as zero when taking square roots.
pub const EIGEN_CLAMP: f64 = 1e-12;

/// Upper bound on cyclic Jacobi sweeps; convergence is quadratic, so a
/// handful suffice in practice.
const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of the symmetric part of `m` by cyclic Jacobi
/// rotations, so that `V Λ Vᵀ` reproduces `m` to roundoff even when some
/// eigenvalues vanish (a QR-based solver with a relative stopping rule loses
/// digits there).
pub fn symmetric_eigen<const N: usize>(m: &Square<N>) -> (Tangent<N>, Square<N>) {
    let mut a = symmetrize(m);
    let mut v = Square::<N>::identity();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..N {
            for q in p + 1..N {
                let apq = a[(p, q)];
                if apq == 0.0 || apq.abs() <= f64::EPSILON * 1e-3 * (a[(p, p)].abs() + a[(q, q)].abs()) {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(1.0))
                };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..N {
                    if k != p && k != q {
                        let (akp, akq) = (a[(k, p)], a[(k, q)]);
                        a[(k, p)] = c * akp - s * akq;
                        a[(p, k)] = a[(k, p)];
                        a[(k, q)] = s * akp + c * akq;
                        a[(q, k)] = a[(k, q)];
                    }
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (a.diagonal(), v)
}

pub fn symmetrize<const N: usize>(m: &Square<N>) -> Square<N> {
    (m + m.transpose()) * 0.5
}

pub fn min_eigenvalue<const N: usize>(m: &Square<N>) -> f64 {
    symmetric_eigen(m).0.min()
}

/// Spectral norm of a symmetric matrix.
pub fn spectral_norm_sym<const N: usize>(m: &Square<N>) -> f64 {
    symmetric_eigen(m).0.amax()
}

/// Errors unless `m` is PSD up to a tolerance scaled by its magnitude.
pub fn check_psd<const N: usize>(m: &Square<N>) -> Result<()> {
    let values = symmetric_eigen(m).0;
    let min = values.min();
    if min < -EIGEN_CLAMP * values.amax().max(1.0) {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
    }
    Ok(())
}

/// Symmetric square root `V √Λ Vᵀ`, eigenvalues below [`EIGEN_CLAMP`] set
/// to zero.
pub fn sqrt_psd<const N: usize>(m: &Square<N>) -> Result<Square<N>> {
    check_psd(m)?;
    let (values, vectors) = symmetric_eigen(m);
    let root = values.map(|v| if v < EIGEN_CLAMP { 0.0 } else { v.sqrt() });
    Ok(vectors * Square::from_diagonal(&root) * vectors.transpose())
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues set to zero).
pub fn project_psd<const N: usize>(m: &Square<N>) -> Square<N> {
    let (values, vectors) = symmetric_eigen(m);
    vectors * Square::from_diagonal(&values.map(|v| v.max(0.0))) * vectors.transpose()
}

pub fn inverse<const N: usize>(m: &Square<N>) -> Option<Square<N>> {
    DMatrix::from_column_slice(N, N, m.as_slice())
        .try_inverse()
        .map(|inv| Square::from_column_slice(inv.as_slice()))
}

/// Largest condition number accepted by [`spd_inverse`].
pub const MAX_CONDITION: f64 = 1e12;

/// Inverse of a symmetric positive-definite matrix through its
/// eigendecomposition, refusing ill-conditioned input.
pub fn spd_inverse<const N: usize>(m: &Square<N>) -> Result<Square<N>> {
    let (values, vectors) = symmetric_eigen(m);
    let (lo, hi) = (values.min(), values.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::InnovationSingular { condition });
    }
    Ok(vectors * Square::from_diagonal(&values.map(|v| 1.0 / v)) * vectors.transpose())
}

pub fn determinant<const N: usize>(m: &Square<N>) -> f64 {
    DMatrix::from_column_slice(N, N, m.as_slice()).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_squares_back() {
        let a = Square::<3>::new(0.04, 0.01, 0.0, 0.01, 0.05, 0.002, 0.0, 0.002, 0.03);
        let r = sqrt_psd(&a).unwrap();
        assert!((r * r - a).abs().max() < 1e-15);
        assert!((r - r.transpose()).abs().max() == 0.0 || (r - r.transpose()).abs().max() < 1e-16);
    }

    #[test]
    fn decomposition_reproduces_rank_deficient_input() {
        // one eigenvalue at roundoff level, with the others near 0.47
        let a = Square::<3>::new(
            0.3345938479718088, -0.18112980011309843, -0.1179767154550367,
            -0.18112980011309843, 0.24595651743469907, -0.15570902555492694,
            -0.1179767154550367, -0.15570902555492694, 0.3675753777787587,
        );
        let (values, vectors) = symmetric_eigen(&a);
        let err = (vectors * Square::from_diagonal(&values) * vectors.transpose() - a).abs().max();
        assert!(err < 1e-15, "{err:e} {values}");
        assert!((vectors.transpose() * vectors - Square::<3>::identity()).abs().max() < 1e-14);
        assert!(values.min().abs() < 1e-15);
    }

    #[test]
    fn decomposition_of_diagonal_is_trivial() {
        let a = Square::<4>::from_diagonal(&Tangent::<4>::new(3.0, -1.0, 0.0, 2.0));
        let (values, vectors) = symmetric_eigen(&a);
        assert_eq!(values, a.diagonal());
        assert_eq!(vectors, Square::<4>::identity());
    }

    #[test]
    fn singular_psd_is_accepted() {
        let a = Square::<2>::new(1.0, 1.0, 1.0, 1.0);
        let r = sqrt_psd(&a).unwrap();
        assert!((r * r - a).abs().max() < 1e-12);
    }

    #[test]
    fn spd_inverse_inverts_and_monitors_condition() {
        let a = Square::<2>::new(2.0, 0.5, 0.5, 1.0);
        assert!((spd_inverse(&a).unwrap() * a - Square::<2>::identity()).abs().max() < 1e-15);
        let bad = Square::<2>::new(1.0, 0.0, 0.0, 1e-13);
        assert!(matches!(spd_inverse(&bad), Err(Error::InnovationSingular { .. })));
    }

    #[test]
    fn indefinite_is_rejected() {
        let a = Square::<2>::new(1.0, 0.0, 0.0, -0.1);
        assert!(matches!(sqrt_psd(&a), Err(Error::NotPositiveSemidefinite { .. })));
        assert_eq!(project_psd(&a), Square::<2>::new(1.0, 0.0, 0.0, 0.0));
    }
}
