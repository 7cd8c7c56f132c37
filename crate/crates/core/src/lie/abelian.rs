use super::{GroupElement, LieGroup, Square, Tangent};
use crate::error::{Error, Result};

/// `ℝᴺ` as the group of positive diagonal matrices, `x ↦ diag(eˣ¹, …, eˣᴺ)`.
///
/// The group is commutative, so `ad` vanishes and every Jacobian is the
/// identity. It serves as the Euclidean reference case for the group-level
/// algorithms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Abelian<const N: usize>;

impl<const N: usize> LieGroup<N> for Abelian<N> {
    fn basis(&self, i: usize) -> Square<N> {
        let mut e = Square::<N>::zeros();
        e[(i, i)] = 1.0;
        e
    }

    fn vee(&self, algebra: &Square<N>) -> Tangent<N> {
        algebra.diagonal()
    }

    fn in_domain(&self, _x: &Tangent<N>) -> bool {
        true
    }

    fn log(&self, g: &GroupElement<N>) -> Result<Tangent<N>> {
        let m = g.matrix();
        let mut x = Tangent::<N>::zeros();
        for i in 0..N {
            for j in 0..N {
                if i != j && m[(i, j)] != 0.0 {
                    return Err(Error::Domain(format!(
                        "element has off-diagonal entry at ({i}, {j})"
                    )));
                }
            }
            if m[(i, i)] <= 0.0 {
                return Err(Error::Domain(format!(
                    "diagonal entry {i} is not positive"
                )));
            }
            x[i] = m[(i, i)].ln();
        }
        Ok(x)
    }

    fn wedge(&self, x: &Tangent<N>) -> Square<N> {
        Square::from_diagonal(x)
    }

    fn exp(&self, x: &Tangent<N>) -> GroupElement<N> {
        GroupElement::from_matrix(Square::from_diagonal(&x.map(f64::exp)))
    }

    fn inverse(&self, g: &GroupElement<N>) -> GroupElement<N> {
        GroupElement::from_matrix(Square::from_diagonal(&g.matrix().diagonal().map(|d| 1.0 / d)))
    }
}
