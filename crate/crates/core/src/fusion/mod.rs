//! Bayesian fusion of a concentrated-Gaussian prior `μ exp(x)`,
//! `x ~ N(0, P⁻)`, with an observation.
//!
//! The general path runs a Gaussian-filter update on the exponential
//! coordinates ([`gaussian_update_general`]) and then re-fits the posterior to
//! the group ([`correct_to_group`]). [`fuse_euclidean`] and [`fuse_group`]
//! are the second-order closed forms for a vector observation `k(g) + r` and
//! a direct observation `g exp(r)`.

mod cost;
mod observation;

use crate::distribution::{fit_mean_covariance, ConcentratedGaussian, ExpectationConfig};
use crate::error::Result;
use crate::lie::{
    lie_derivative_right, lie_derivative_right_second, unit, GroupElement, LieGroup, Square, Tangent,
};
use crate::linalg::{check_psd, project_psd, spd_inverse, sqrt_psd, symmetrize};

use nalgebra::{SMatrix, SVector};

pub use cost::{cost_c1, cost_c2};
pub use observation::{EuclideanObservation, GroupObservation, Observation};

/// Posterior over the coordinates `x` of `μ exp(x)`, with the filter's
/// intermediates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PosteriorCoordinates<const N: usize, const M: usize> {
    pub m: Tangent<N>,
    pub cov: Square<N>,
    /// Predicted observation `m̃`.
    pub predicted: SVector<f64, M>,
    /// Innovation covariance `S`.
    pub s: SMatrix<f64, M, M>,
    /// Cross covariance `C`.
    pub c: SMatrix<f64, N, M>,
    /// Gain `K = C S⁻¹`.
    pub gain: SMatrix<f64, N, M>,
}

/// Both readings of one fusion: the plain Kalman-style update `μ exp(m)`
/// with covariance `Σ`, and the group-corrected `μ exp(m′)` with `Σ_m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusionEstimate<const N: usize> {
    pub m: Tangent<N>,
    pub cov: Square<N>,
    pub m_prime: Tangent<N>,
    pub cov_m: Square<N>,
    pub plain: GroupElement<N>,
    pub modified: GroupElement<N>,
}

/// Update on exponential coordinates with every expectation taken by a
/// `2(N + M)`-point cubature over the joint Gaussian of `(x, r)`.
pub fn gaussian_update_general<G, O, const N: usize, const M: usize>(
    group: &G,
    prior: &ConcentratedGaussian<N>,
    obs: &O,
    measurement: &O::Measurement,
) -> Result<PosteriorCoordinates<N, M>>
where
    G: LieGroup<N>,
    O: Observation<N, M>,
{
    let mu = prior.mean();
    let p = prior.cov();
    let dim = (N + M) as f64;
    let root_x = sqrt_psd(p)? * dim.sqrt();
    let root_r = sqrt_psd(obs.noise())? * dim.sqrt();

    let mut points: Vec<(Tangent<N>, SVector<f64, M>)> = Vec::with_capacity(2 * (N + M));
    for sign in [1.0, -1.0] {
        for i in 0..N {
            let x = root_x.column(i) * sign;
            points.push((x, obs.perturbed(group, mu, &x, &SVector::zeros())?));
        }
        for j in 0..M {
            let r = root_r.column(j) * sign;
            points.push((Tangent::zeros(), obs.perturbed(group, mu, &Tangent::zeros(), &r)?));
        }
    }
    let w = 1.0 / points.len() as f64;
    let predicted = points.iter().fold(SVector::<f64, M>::zeros(), |acc, (_, z)| acc + z) * w;
    let mut s = SMatrix::<f64, M, M>::zeros();
    let mut c = SMatrix::<f64, N, M>::zeros();
    for (x, z) in &points {
        let dz = z - predicted;
        s += dz * dz.transpose() * w;
        c += x * dz.transpose() * w;
    }
    let s = symmetrize(&s);
    let gain = c * spd_inverse(&s)?;
    let m = gain * (obs.innovation(group, mu, measurement)? - predicted);
    let cov = symmetrize(&project_psd(&symmetrize(&(p - gain * s * gain.transpose()))));
    Ok(PosteriorCoordinates {
        m,
        cov,
        predicted,
        s,
        c,
        gain,
    })
}

/// Group mean and covariance of `μ exp(x)`, `x ~ N(post.m, post.cov)`.
pub fn correct_to_group<G: LieGroup<N>, const N: usize, const M: usize>(
    group: &G,
    post: &PosteriorCoordinates<N, M>,
    mu: &GroupElement<N>,
    cfg: &ExpectationConfig,
) -> Result<ConcentratedGaussian<N>> {
    check_psd(&post.cov)?;
    fit_mean_covariance(group, &post.m, &post.cov, mu, cfg)
}

/// `Σ_ij Σ_ij ad_i ad_j`.
fn second_order_ad<G: LieGroup<N>, const N: usize>(group: &G, cov: &Square<N>) -> Square<N> {
    let ads: Vec<Square<N>> = (0..N).map(|i| group.ad(&unit::<N>(i))).collect();
    let mut sum = Square::<N>::zeros();
    for i in 0..N {
        for j in 0..N {
            sum += ads[i] * ads[j] * cov[(i, j)];
        }
    }
    sum
}

/// `m′ = (I − (1/12) Σ_ij Σ_ij ad_i ad_j) m`.
pub fn modified_offset<G: LieGroup<N>, const N: usize>(group: &G, cov: &Square<N>, m: &Tangent<N>) -> Tangent<N> {
    m - second_order_ad(group, cov) * m / 12.0
}

/// `Σ_m = Σ + sym(½ Σ_ij Σ_ij ad_i m′ e_jᵀ)`.
pub fn modified_covariance<G: LieGroup<N>, const N: usize>(
    group: &G,
    cov: &Square<N>,
    m_prime: &Tangent<N>,
) -> Square<N> {
    let ad_m: Vec<Tangent<N>> = (0..N).map(|i| group.ad(&unit::<N>(i)) * m_prime).collect();
    let a = Square::<N>::from_fn(|row, j| 0.5 * (0..N).map(|i| cov[(i, j)] * ad_m[i][row]).sum::<f64>());
    cov + a + a.transpose()
}

fn finish<G: LieGroup<N>, const N: usize>(
    group: &G,
    mu: &GroupElement<N>,
    m: Tangent<N>,
    cov: Square<N>,
) -> FusionEstimate<N> {
    let m_prime = modified_offset(group, &cov, &m);
    FusionEstimate {
        m,
        cov,
        m_prime,
        cov_m: modified_covariance(group, &cov, &m_prime),
        plain: mu * &group.exp(&m),
        modified: mu * &group.exp(&m_prime),
    }
}

/// Second-order closed form for `g_z = k(g) + r ∈ ℝᴹ`, with the right Lie
/// derivatives of `k` taken by central differences.
pub fn fuse_euclidean<G: LieGroup<N>, const N: usize, const M: usize>(
    group: &G,
    prior: &ConcentratedGaussian<N>,
    obs: &EuclideanObservation<N, M>,
    measurement: &SVector<f64, M>,
) -> Result<FusionEstimate<N>> {
    let mu = prior.mean();
    let p = prior.cov();
    let k = |g: &GroupElement<N>| obs.observe(g);
    let d = SMatrix::<f64, M, N>::from_columns(
        &(0..N).map(|i| lie_derivative_right(group, k, mu, i)).collect::<Vec<_>>(),
    );
    let mut curvature = SVector::<f64, M>::zeros();
    for i in 0..N {
        for j in 0..N {
            if p[(i, j)] != 0.0 {
                curvature += lie_derivative_right_second(group, k, mu, i, j) * p[(i, j)];
            }
        }
    }
    let s = symmetrize(&(d * p * d.transpose() + obs.noise()));
    let c = p * d.transpose();
    let gain = c * spd_inverse(&s)?;
    let m = gain * (measurement - obs.observe(mu) - curvature * 0.5);
    let cov = symmetrize(&(p - gain * s * gain.transpose()));
    Ok(finish(group, mu, m, cov))
}

/// Closed form for a direct observation `g_z = g exp(r)`.
pub fn fuse_group<G: LieGroup<N>, const N: usize>(
    group: &G,
    prior: &ConcentratedGaussian<N>,
    noise: &Square<N>,
    measurement: &GroupElement<N>,
) -> Result<FusionEstimate<N>> {
    let mu = prior.mean();
    let p = prior.cov();
    let y = group.log(&group.between(mu, measurement))?;
    let gain = p * spd_inverse(&symmetrize(&(p + noise)))?;
    let cov = symmetrize(&(p - gain * p));
    Ok(finish(group, mu, gain * y, cov))
}
