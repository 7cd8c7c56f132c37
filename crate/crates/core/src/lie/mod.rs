//! Unimodular matrix Lie groups.
//!
//! Everything downstream is written against the [`LieGroup`] trait. A group is
//! described by its algebra basis `{E_i}`, the `∨` map, and the domain `D` of
//! exponential coordinates; the remaining operations have generic defaults
//! built from the `ad` power series, which concrete groups override with
//! closed forms where they exist.
//!
//! Both shipped instances ([`So3`] and [`Abelian`]) use `N × N` matrices for an
//! `N`-dimensional group, so group elements and algebra elements share the
//! [`Square`] type.

mod abelian;
mod derivative;
mod expansion;
pub mod series;
mod so3;

use std::ops::Mul;

use nalgebra::{DMatrix, SMatrix, SVector};

use crate::error::{Error, Result};

pub use abelian::Abelian;
pub use derivative::{
    lie_derivative_right, lie_derivative_right_second, lie_gradient, lie_hessian,
    FIRST_DERIVATIVE_STEP, SECOND_DERIVATIVE_STEP,
};
pub use expansion::{bch_truncated, expand_log_perturbation};
pub use so3::{skew, So3};

/// Exponential coordinates, identified with the Lie algebra through `∧`/`∨`.
pub type Tangent<const N: usize> = SVector<f64, N>;

/// `N × N` real matrix: algebra elements, Jacobians, covariances.
pub type Square<const N: usize> = SMatrix<f64, N, N>;

/// Jacobian inverses are refused when `|det J|` falls below this.
pub const SINGULAR_JACOBIAN_DET: f64 = 1e-12;

/// An element of a matrix Lie group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement<const N: usize>(Square<N>);

impl<const N: usize> GroupElement<N> {
    /// Wraps a matrix without checking group membership.
    pub fn from_matrix(matrix: Square<N>) -> Self {
        Self(matrix)
    }

    pub fn identity() -> Self {
        Self(Square::identity())
    }

    pub fn matrix(&self) -> &Square<N> {
        &self.0
    }

    pub fn into_matrix(self) -> Square<N> {
        self.0
    }
}

impl<const N: usize> Mul for GroupElement<N> {
    type Output = GroupElement<N>;

    fn mul(self, rhs: Self) -> Self::Output {
        GroupElement(self.0 * rhs.0)
    }
}

impl<const N: usize> Mul<&GroupElement<N>> for &GroupElement<N> {
    type Output = GroupElement<N>;

    fn mul(self, rhs: &GroupElement<N>) -> Self::Output {
        GroupElement(self.0 * rhs.0)
    }
}

/// Unit vector `e_k` in coordinates.
pub fn unit<const N: usize>(k: usize) -> Tangent<N> {
    let mut e = Tangent::<N>::zeros();
    e[k] = 1.0;
    e
}

/// An `N`-dimensional unimodular matrix Lie group.
///
/// Implementors supply the basis, `∨`, the coordinate domain and the
/// logarithm. Jacobians default to the `ad` power series truncated at
/// [`series::TERMS`] terms.
pub trait LieGroup<const N: usize>: Clone + Send + Sync {
    /// Basis matrix `E_i` of the Lie algebra.
    fn basis(&self, i: usize) -> Square<N>;

    /// `X∨`, the coordinates of an algebra element in the basis.
    fn vee(&self, algebra: &Square<N>) -> Tangent<N>;

    /// Membership in the domain `D` of exponential coordinates.
    fn in_domain(&self, x: &Tangent<N>) -> bool;

    /// `log∨(g)`, defined on `exp(D)`.
    fn log(&self, g: &GroupElement<N>) -> Result<Tangent<N>>;

    fn wedge(&self, x: &Tangent<N>) -> Square<N> {
        (0..N).fold(Square::zeros(), |acc, i| acc + self.basis(i) * x[i])
    }

    fn exp(&self, x: &Tangent<N>) -> GroupElement<N> {
        let dynamic = DMatrix::from_column_slice(N, N, self.wedge(x).as_slice()).exp();
        GroupElement(Square::from_column_slice(dynamic.as_slice()))
    }

    fn inverse(&self, g: &GroupElement<N>) -> GroupElement<N> {
        let inv = DMatrix::from_column_slice(N, N, g.0.as_slice())
            .try_inverse()
            .expect("group elements are invertible matrices");
        GroupElement(Square::from_column_slice(inv.as_slice()))
    }

    /// `g⁻¹ h`
    fn between(&self, g: &GroupElement<N>, h: &GroupElement<N>) -> GroupElement<N> {
        &self.inverse(g) * h
    }

    /// `[ad_x]`, the matrix of `y ↦ (x∧ y∧ − y∧ x∧)∨`.
    fn ad(&self, x: &Tangent<N>) -> Square<N> {
        let xw = self.wedge(x);
        let mut out = Square::<N>::zeros();
        for j in 0..N {
            let ej = self.basis(j);
            out.set_column(j, &self.vee(&(xw * ej - ej * xw)));
        }
        out
    }

    /// `Ad(g)`, the matrix of `y ↦ (g y∧ g⁻¹)∨`.
    fn adjoint(&self, g: &GroupElement<N>) -> Square<N> {
        let g_inv = self.inverse(g);
        let mut out = Square::<N>::zeros();
        for j in 0..N {
            out.set_column(j, &self.vee(&(g.0 * self.basis(j) * g_inv.0)));
        }
        out
    }

    fn left_jacobian(&self, x: &Tangent<N>) -> Square<N> {
        series::jacobian(&self.ad(x))
    }

    fn right_jacobian(&self, x: &Tangent<N>) -> Square<N> {
        series::jacobian(&-self.ad(x))
    }

    fn left_jacobian_inv(&self, x: &Tangent<N>) -> Result<Square<N>> {
        let ad = self.ad(x);
        check_jacobian(&series::jacobian(&ad))?;
        Ok(series::jacobian_inv(&ad))
    }

    fn right_jacobian_inv(&self, x: &Tangent<N>) -> Result<Square<N>> {
        let ad: Square<N> = -self.ad(x);
        check_jacobian(&series::jacobian(&ad))?;
        Ok(series::jacobian_inv(&ad))
    }

    /// `∂J_r⁻¹/∂x_k` at `x`.
    fn right_jacobian_inv_partial(&self, x: &Tangent<N>, k: usize) -> Square<N> {
        series::jacobian_inv_partial(&-self.ad(x), &-self.ad(&unit(k)))
    }

    /// `∂J_l⁻¹/∂x_k` at `x`, using `J_l⁻¹(x) = J_r⁻¹(−x)`.
    fn left_jacobian_inv_partial(&self, x: &Tangent<N>, k: usize) -> Square<N> {
        -self.right_jacobian_inv_partial(&-x, k)
    }
}

fn check_jacobian<const N: usize>(jacobian: &Square<N>) -> Result<()> {
    let det = DMatrix::from_column_slice(N, N, jacobian.as_slice()).determinant();
    if det.abs() < SINGULAR_JACOBIAN_DET {
        return Err(Error::SingularJacobian { det });
    }
    Ok(())
}
