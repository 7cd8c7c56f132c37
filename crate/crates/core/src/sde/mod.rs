//! Stochastic differential equations on matrix Lie groups.
//!
//! Two formulations are supported:
//!
//! * non-parametric ([`SdeModel`]): `g(t+dt) = g(t) exp(h dt + H dW)`, the
//!   increment injected through the exponential and multiplied on the right;
//! * parametric ([`ParametricSdeModel`]): an SDE on the exponential
//!   coordinates `x` of `g = μ exp(x)`, `dx = J_r⁻¹ h̃ dt + J_r⁻¹ H̃ dW`.
//!
//! In both, the diffusion is evaluated at `t + κ dt` (Itô `κ = 0`,
//! Stratonovich `κ = ½`) while the drift is always evaluated at `t`.

mod convert;
mod sampler;

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lie::{GroupElement, LieGroup, Square, Tangent};
use crate::rng::{standard_normal, stream_rng};

pub use convert::{
    ito_injection_to_parametric, ito_parametric_correction, parametric_stratonovich_to_ito,
    stratonovich_correction, stratonovich_injection_to_parametric, stratonovich_to_ito,
};
pub use sampler::{
    nonparametric_endpoint, parametric_endpoint, sample_nonparametric_endpoints,
    sample_nonparametric_path, sample_parametric_endpoints, sample_parametric_path,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpretation {
    Ito,
    Stratonovich,
}

impl Interpretation {
    /// Fraction of the step at which the diffusion is evaluated.
    pub fn kappa(self) -> f64 {
        match self {
            Interpretation::Ito => 0.0,
            Interpretation::Stratonovich => 0.5,
        }
    }
}

pub type GroupDrift<const N: usize> = Arc<dyn Fn(&GroupElement<N>, f64) -> Tangent<N> + Send + Sync>;
pub type GroupDiffusion<const N: usize> =
    Arc<dyn Fn(&GroupElement<N>, f64) -> Square<N> + Send + Sync>;
pub type CoordinateDrift<const N: usize> =
    Arc<dyn Fn(&Tangent<N>, f64) -> Result<Tangent<N>> + Send + Sync>;
pub type CoordinateDiffusion<const N: usize> =
    Arc<dyn Fn(&Tangent<N>, f64) -> Result<Square<N>> + Send + Sync>;

/// Non-parametric SDE `(g⁻¹dg)∨ = h(g, t) dt + H(g, t) dW`.
#[derive(Clone)]
pub struct SdeModel<const N: usize> {
    drift: GroupDrift<N>,
    diffusion: GroupDiffusion<N>,
    interpretation: Interpretation,
}

impl<const N: usize> SdeModel<N> {
    pub fn new<D, H>(drift: D, diffusion: H, interpretation: Interpretation) -> Self
    where
        D: Fn(&GroupElement<N>, f64) -> Tangent<N> + Send + Sync + 'static,
        H: Fn(&GroupElement<N>, f64) -> Square<N> + Send + Sync + 'static,
    {
        Self {
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            interpretation,
        }
    }

    /// Constant coefficients.
    pub fn constant(drift: Tangent<N>, diffusion: Square<N>, interpretation: Interpretation) -> Self {
        Self::new(move |_, _| drift, move |_, _| diffusion, interpretation)
    }

    pub fn drift(&self, g: &GroupElement<N>, t: f64) -> Tangent<N> {
        (self.drift)(g, t)
    }

    pub fn diffusion(&self, g: &GroupElement<N>, t: f64) -> Square<N> {
        (self.diffusion)(g, t)
    }

    pub fn interpretation(&self) -> Interpretation {
        self.interpretation
    }

    pub(crate) fn diffusion_fn(&self) -> GroupDiffusion<N> {
        Arc::clone(&self.diffusion)
    }

    pub(crate) fn drift_fn(&self) -> GroupDrift<N> {
        Arc::clone(&self.drift)
    }
}

/// Parametric SDE on the exponential coordinates of `g = μ exp(x)`:
/// `dx = J_r⁻¹(x) h̃(x, t) dt + J_r⁻¹(x) H̃(x, t) dW`.
#[derive(Clone)]
pub struct ParametricSdeModel<G, const N: usize> {
    group: G,
    base: GroupElement<N>,
    drift: CoordinateDrift<N>,
    diffusion: CoordinateDiffusion<N>,
    interpretation: Interpretation,
}

impl<G: LieGroup<N>, const N: usize> ParametricSdeModel<G, N> {
    pub fn new<D, H>(
        group: G,
        base: GroupElement<N>,
        drift: D,
        diffusion: H,
        interpretation: Interpretation,
    ) -> Self
    where
        D: Fn(&Tangent<N>, f64) -> Result<Tangent<N>> + Send + Sync + 'static,
        H: Fn(&Tangent<N>, f64) -> Result<Square<N>> + Send + Sync + 'static,
    {
        Self {
            group,
            base,
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            interpretation,
        }
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn base(&self) -> &GroupElement<N> {
        &self.base
    }

    /// `h̃(x, t)`
    pub fn drift(&self, x: &Tangent<N>, t: f64) -> Result<Tangent<N>> {
        (self.drift)(x, t)
    }

    /// `H̃(x, t)`
    pub fn diffusion(&self, x: &Tangent<N>, t: f64) -> Result<Square<N>> {
        (self.diffusion)(x, t)
    }

    pub fn interpretation(&self) -> Interpretation {
        self.interpretation
    }

    /// Coordinate velocity `J_r⁻¹(x) h̃(x, t)`.
    pub fn coordinate_drift(&self, x: &Tangent<N>, t: f64) -> Result<Tangent<N>> {
        Ok(self.group.right_jacobian_inv(x)? * self.drift(x, t)?)
    }

    /// Coordinate diffusion `J_r⁻¹(x) H̃(x, t)`.
    pub fn coordinate_diffusion(&self, x: &Tangent<N>, t: f64) -> Result<Square<N>> {
        Ok(self.group.right_jacobian_inv(x)? * self.diffusion(x, t)?)
    }

    /// The group element `μ exp(x)`.
    pub fn point(&self, x: &Tangent<N>) -> GroupElement<N> {
        self.base * self.group.exp(x)
    }

    pub(crate) fn diffusion_fn(&self) -> CoordinateDiffusion<N> {
        Arc::clone(&self.diffusion)
    }
}

/// Discretisation of `[0, T]` into `M` steps, plus the noise seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathConfig {
    pub horizon: f64,
    pub steps: usize,
    pub seed: u64,
    pub paths: usize,
}

impl PathConfig {
    pub fn new(horizon: f64, steps: usize, seed: u64, paths: usize) -> Result<Self> {
        let cfg = Self {
            horizon,
            steps,
            seed,
            paths,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Config("path needs at least one step".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        Ok(())
    }

    /// `Δt = T / M`
    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }
}

/// Wiener increments of one path, split into the two half-steps
/// `W(t+Δt/2) − W(t)` and `W(t+Δt) − W(t+Δt/2)`.
///
/// Path `p` reads ChaCha stream `p` of the configured seed, so two samplers
/// given the same `(cfg, p)` see identical noise.
pub struct WienerIncrements<const N: usize> {
    rng: ChaCha8Rng,
    half_std: f64,
    remaining: usize,
}

impl<const N: usize> WienerIncrements<N> {
    pub fn new(cfg: &PathConfig, path: usize) -> Self {
        Self {
            rng: stream_rng(cfg.seed, path as u64),
            half_std: (0.5 * cfg.dt()).sqrt(),
            remaining: cfg.steps,
        }
    }
}

impl<const N: usize> Iterator for WienerIncrements<N> {
    type Item = (Tangent<N>, Tangent<N>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let first = standard_normal::<_, N>(&mut self.rng) * self.half_std;
        let second = standard_normal::<_, N>(&mut self.rng) * self.half_std;
        Some((first, second))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_config_validation() {
        assert!(PathConfig::new(1.0, 0, 0, 1).is_err());
        assert!(PathConfig::new(0.0, 10, 0, 1).is_err());
        assert!(PathConfig::new(-1.0, 10, 0, 1).is_err());
        let cfg = PathConfig::new(0.5, 500, 0, 1).unwrap();
        assert_eq!(cfg.dt(), 1e-3);
    }

    #[test]
    fn increments_are_reproducible() {
        let cfg = PathConfig::new(1.0, 20, 11, 1).unwrap();
        let a: Vec<_> = WienerIncrements::<3>::new(&cfg, 4).collect();
        let b: Vec<_> = WienerIncrements::<3>::new(&cfg, 4).collect();
        let c: Vec<_> = WienerIncrements::<3>::new(&cfg, 5).collect();
        assert_eq!(a.len(), 20);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn increment_variance_is_dt() {
        let cfg = PathConfig::new(1.0, 100_000, 3, 1).unwrap();
        let dt = cfg.dt();
        let n = cfg.steps as f64;
        let var = WienerIncrements::<1>::new(&cfg, 0)
            .map(|(a, b)| (a + b)[0].powi(2))
            .sum::<f64>()
            / n;
        // relative standard error of a chi-square mean is sqrt(2/n)
        assert!((var / dt - 1.0).abs() < 4.0 * (2.0 / n).sqrt());
    }

    #[test]
    fn kappa_values() {
        assert_eq!(Interpretation::Ito.kappa(), 0.0);
        assert_eq!(Interpretation::Stratonovich.kappa(), 0.5);
    }
}
