//! Concentrated Gaussians, expectations over exponential coordinates, and
//! group-theoretic means.

mod expectation;
mod gaussian;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lie::{GroupElement, LieGroup, Square, Tangent};
use crate::linalg::{determinant, inverse, spectral_norm_sym};

pub use expectation::{cubature_points, expect, ExpectationConfig, ExpectationMethod};
pub use gaussian::{ConcentratedGaussian, MAX_REJECTION_RATE};

pub const GROUP_MEAN_TOL: f64 = 1e-12;
pub const GROUP_MEAN_MAX_ITER: usize = 100;
pub const FRECHET_MAX_ITER: usize = 1000;

/// Beyond these, `(m, Σ)` is not treated as concentrated.
pub const MAX_CONCENTRATED_MEAN: f64 = 0.5;
pub const MAX_CONCENTRATED_COV: f64 = 0.5;

/// A group mean together with its convergence certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupMean<const N: usize> {
    pub mean: GroupElement<N>,
    /// `‖mean_i log∨(μ⁻¹ g_i)‖` at `mean`.
    pub residual: f64,
    pub iterations: usize,
}

/// `log∨(μ⁻¹ g_i)` for every sample, in sample order.
fn logs<G: LieGroup<N>, const N: usize>(
    group: &G,
    samples: &[GroupElement<N>],
    mu: &GroupElement<N>,
) -> Result<Vec<Tangent<N>>> {
    let mu_inv = group.inverse(mu);
    samples.par_iter().map(|g| group.log(&(&mu_inv * g))).collect()
}

fn average<const N: usize>(values: &[Tangent<N>]) -> Tangent<N> {
    values.iter().fold(Tangent::zeros(), |acc, v| acc + v) / values.len() as f64
}

fn require_samples<T>(samples: &[T]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::Config("mean of an empty sample set".into()));
    }
    Ok(())
}

/// Fixed-point iteration `μ ← μ exp(mean_i log∨(μ⁻¹ g_i))`, started at the
/// first sample, until the mean log falls below `tol`.
pub fn empirical_group_mean<G: LieGroup<N>, const N: usize>(
    group: &G,
    samples: &[GroupElement<N>],
    tol: f64,
    max_iter: usize,
) -> Result<GroupMean<N>> {
    require_samples(samples)?;
    let mut mu = samples[0];
    let mut residual = f64::INFINITY;
    for iterations in 0..=max_iter {
        let step = average(&logs(group, samples, &mu)?);
        residual = step.norm();
        if residual < tol {
            return Ok(GroupMean {
                mean: mu,
                residual,
                iterations,
            });
        }
        if iterations < max_iter {
            mu = mu * group.exp(&step);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Minimizer of `½ mean_i |log∨(μ⁻¹ g_i)|²` by gradient descent with
/// backtracking. The descent direction in right-perturbation coordinates is
/// `mean_i J_l⁻ᵀ(y_i) y_i`. When no step decreases the cost in floating
/// point, the iterate is accepted if the gradient is below `√tol`.
pub fn frechet_mean<G: LieGroup<N>, const N: usize>(
    group: &G,
    samples: &[GroupElement<N>],
    tol: f64,
) -> Result<GroupElement<N>> {
    require_samples(samples)?;
    let cost = |ys: &[Tangent<N>]| ys.iter().map(|y| y.norm_squared()).sum::<f64>() / (2 * ys.len()) as f64;
    let mut mu = samples[0];
    let mut ys = logs(group, samples, &mu)?;
    let mut current = cost(&ys);
    let mut residual = f64::INFINITY;
    for _ in 0..FRECHET_MAX_ITER {
        let directions: Vec<Tangent<N>> = ys
            .par_iter()
            .map(|y| Ok(group.left_jacobian_inv(y)?.transpose() * y))
            .collect::<Result<_>>()?;
        let direction = average(&directions);
        residual = direction.norm();
        if residual < tol {
            return Ok(mu);
        }
        let mut alpha = 1.0;
        loop {
            let candidate = mu * group.exp(&(direction * alpha));
            let trial = logs(group, samples, &candidate);
            if let Ok(trial) = trial {
                let c = cost(&trial);
                // strict decrease, so that roundoff-level steps end in the
                // floating-point floor below instead of cycling
                if c < current {
                    mu = candidate;
                    ys = trial;
                    current = c;
                    break;
                }
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                // no decrease representable in floating point
                return if residual < tol.sqrt() {
                    Ok(mu)
                } else {
                    Err(Error::NoConvergence {
                        iterations: FRECHET_MAX_ITER,
                        residual,
                    })
                };
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: FRECHET_MAX_ITER,
        residual,
    })
}

/// `mean_i y_i y_iᵀ` with `y_i = log∨(μ⁻¹ g_i)`, no Bessel correction.
pub fn empirical_covariance<G: LieGroup<N>, const N: usize>(
    group: &G,
    samples: &[GroupElement<N>],
    mu: &GroupElement<N>,
) -> Result<Square<N>> {
    require_samples(samples)?;
    let ys = logs(group, samples, mu)?;
    Ok(ys.iter().fold(Square::zeros(), |acc, y| acc + y * y.transpose()) / ys.len() as f64)
}

/// Concentrated Gaussian matching `g = μ exp(x)`, `x ~ N(m, Σ)`:
/// `μ_m = μ exp(m′)` with `m′ = ⟨J_l⁻¹⟩⁻¹ m` and
/// `Σ_m = Σ − sym(⟨J_l⁻¹(x) m′ xᵀ⟩)`, expectations taken over `N(0, Σ)`.
pub fn fit_mean_covariance<G: LieGroup<N>, const N: usize>(
    group: &G,
    m: &Tangent<N>,
    cov: &Square<N>,
    mu: &GroupElement<N>,
    cfg: &ExpectationConfig,
) -> Result<ConcentratedGaussian<N>> {
    let (mean_norm, cov_norm) = (m.norm(), spectral_norm_sym(cov));
    if mean_norm > MAX_CONCENTRATED_MEAN || cov_norm > MAX_CONCENTRATED_COV {
        return Err(Error::NonConcentrated { mean_norm, cov_norm });
    }
    let zero = Tangent::<N>::zeros();
    let avg_jinv = expect(|x: &Tangent<N>| group.left_jacobian_inv(x), &zero, cov, cfg)?;
    let m_prime = inverse(&avg_jinv).ok_or(Error::SingularJacobian {
        det: determinant(&avg_jinv),
    })? * m;
    let cross: Square<N> = expect(
        |x: &Tangent<N>| Ok(group.left_jacobian_inv(x)? * m_prime * x.transpose()),
        &zero,
        cov,
        cfg,
    )?;
    ConcentratedGaussian::new(mu * &group.exp(&m_prime), cov - cross - cross.transpose())
}
