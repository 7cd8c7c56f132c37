//! Right Lie directional derivatives by central differences along
//! one-parameter subgroups.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};

use super::{unit, GroupElement, LieGroup};

pub const FIRST_DERIVATIVE_STEP: f64 = 1e-6;
pub const SECOND_DERIVATIVE_STEP: f64 = 1e-5;

/// `E_i^r f(g) = d/dt f(g exp(t E_i))` at `t = 0`.
pub fn lie_derivative_right<G, F, T, const N: usize>(group: &G, f: F, g: &GroupElement<N>, i: usize) -> T
where
    G: LieGroup<N>,
    F: Fn(&GroupElement<N>) -> T,
    T: Sub<Output = T> + Mul<f64, Output = T>,
{
    let h = FIRST_DERIVATIVE_STEP;
    let step = unit::<N>(i) * h;
    let forward = f(&(g * &group.exp(&step)));
    let backward = f(&(g * &group.exp(&-step)));
    (forward - backward) * (0.5 / h)
}

/// `E_i^r E_j^r f(g) = ∂²/∂s∂t f(g exp(s E_i) exp(t E_j))` at the origin,
/// by the nested four-point stencil.
pub fn lie_derivative_right_second<G, F, T, const N: usize>(
    group: &G,
    f: F,
    g: &GroupElement<N>,
    i: usize,
    j: usize,
) -> T
where
    G: LieGroup<N>,
    F: Fn(&GroupElement<N>) -> T,
    T: Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let h = SECOND_DERIVATIVE_STEP;
    let si = unit::<N>(i) * h;
    let sj = unit::<N>(j) * h;
    let (ip, im) = (g * &group.exp(&si), g * &group.exp(&-si));
    let (jp, jm) = (group.exp(&sj), group.exp(&-sj));
    let pp = f(&(ip * jp));
    let pm = f(&(ip * jm));
    let mp = f(&(im * jp));
    let mm = f(&(im * jm));
    (pp - pm - mp + mm) * (0.25 / (h * h))
}

/// `M × N` matrix whose columns are `E_i^r f(g)`.
pub fn lie_gradient<G, F, const N: usize>(group: &G, f: F, g: &GroupElement<N>) -> DMatrix<f64>
where
    G: LieGroup<N>,
    F: Fn(&GroupElement<N>) -> DVector<f64>,
{
    let columns: Vec<DVector<f64>> = (0..N)
        .map(|i| lie_derivative_right(group, &f, g, i))
        .collect();
    DMatrix::from_columns(&columns)
}

/// All second derivatives `E_i^r E_j^r f(g)`, indexed `[i][j]`.
pub fn lie_hessian<G, F, const N: usize>(group: &G, f: F, g: &GroupElement<N>) -> Vec<Vec<DVector<f64>>>
where
    G: LieGroup<N>,
    F: Fn(&GroupElement<N>) -> DVector<f64>,
{
    (0..N)
        .map(|i| {
            (0..N)
                .map(|j| lie_derivative_right_second(group, &f, g, i, j))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{So3, Tangent};
    use nalgebra::Vector3;

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = So3.exp(&Tangent::<3>::new(0.3, 0.1, -0.4));
        let f = |_: &GroupElement<3>| DVector::from_vec(vec![2.0, -1.0]);
        for i in 0..3 {
            assert_eq!(lie_derivative_right(&So3, f, &g, i).norm(), 0.0);
            for j in 0..3 {
                assert_eq!(lie_derivative_right_second(&So3, f, &g, i, j).norm(), 0.0);
            }
        }
    }

    #[test]
    fn derivative_of_linear_map_at_identity() {
        // f(g) = gᵀ v, so E_i f(I) = E_iᵀ v = −e_i × v.
        let v = Vector3::new(0.33, 0.0, -0.95);
        let f = |g: &GroupElement<3>| g.matrix().transpose() * v;
        for i in 0..3 {
            let expected = So3.basis(i).transpose() * v;
            let got = lie_derivative_right(&So3, f, &GroupElement::identity(), i);
            assert!((got - expected).norm() < 1e-8);
        }
    }

    #[test]
    fn second_derivative_of_linear_map() {
        // E_i E_j f(g) = (g E_i E_j)ᵀ v.
        let v = Vector3::new(0.0, 0.0, -9.82);
        let g = So3.exp(&Tangent::<3>::new(0.5, -0.2, 0.9));
        let f = |g: &GroupElement<3>| g.matrix().transpose() * v;
        for i in 0..3 {
            for j in 0..3 {
                let expected = (g.matrix() * So3.basis(i) * So3.basis(j)).transpose() * v;
                let got = lie_derivative_right_second(&So3, f, &g, i, j);
                assert!((got - expected).norm() < 1e-5, "{i}{j}: {}", (got - expected).norm());
            }
        }
    }

    #[test]
    fn gradient_and_hessian_shapes() {
        let f = |g: &GroupElement<3>| DVector::from_column_slice(g.matrix().column(0).as_slice());
        let g = GroupElement::identity();
        assert_eq!(lie_gradient(&So3, f, &g).shape(), (3, 3));
        let h = lie_hessian(&So3, f, &g);
        assert_eq!(h.len(), 3);
        assert_eq!(h[2].len(), 3);
    }
}
