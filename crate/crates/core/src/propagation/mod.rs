//! Continuous-time propagation of the group mean and covariance of a
//! non-parametric Itô SDE with constant diffusion.
//!
//! At each instant the distribution is re-fitted as `μ exp(x)`, `x ~ N(0, Σ)`,
//! and the velocities are cubature expectations over `x`:
//!
//! ```text
//! w(x)       = ½ Σ_k ∂_k J_r⁻¹ (H Hᵀ J_r⁻ᵀ) e_k + J_r⁻¹ h(μ exp(x), t)
//! (μ⁻¹μ̇)∨    = ⟨J_l⁻¹⟩⁻¹ ⟨w⟩
//! Σ̇          = ⟨sym[(w − J_l⁻¹ (μ⁻¹μ̇)∨) xᵀ] + J_r⁻¹ H Hᵀ J_r⁻ᵀ⟩
//! ```

mod export;

use crate::distribution::{expect, ExpectationConfig};
use crate::error::{Error, Result};
use crate::lie::{GroupElement, LieGroup, Square, Tangent};
use crate::linalg::{determinant, inverse, min_eigenvalue, project_psd, symmetrize};
use crate::sde::{Interpretation, SdeModel};

pub use export::{trajectory_csv, write_trajectory_csv};

/// Covariance eigenvalues below `−PSD_SLACK` reject the step.
pub const PSD_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationState<const N: usize> {
    pub mean: GroupElement<N>,
    pub cov: Square<N>,
    pub t: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    Euler,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationConfig {
    pub dt: f64,
    pub integrator: Integrator,
    pub expectation: ExpectationConfig,
}

impl PropagationConfig {
    pub fn rk4(dt: f64) -> Self {
        Self {
            dt,
            integrator: Integrator::Rk4,
            expectation: ExpectationConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("step size must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

/// `w(x)` from the module docs.
fn drift_integrand<G: LieGroup<N>, const N: usize>(
    group: &G,
    model: &SdeModel<N>,
    mean: &GroupElement<N>,
    t: f64,
    spread: &Square<N>,
    x: &Tangent<N>,
) -> Result<Tangent<N>> {
    let jr_inv = group.right_jacobian_inv(x)?;
    let columns = spread * jr_inv.transpose();
    let mut correction = Tangent::<N>::zeros();
    for k in 0..N {
        correction += group.right_jacobian_inv_partial(x, k) * columns.column(k);
    }
    let g = mean * &group.exp(x);
    Ok(correction * 0.5 + jr_inv * model.drift(&g, t))
}

fn velocities<G: LieGroup<N>, const N: usize>(
    group: &G,
    model: &SdeModel<N>,
    mean: &GroupElement<N>,
    cov: &Square<N>,
    t: f64,
    diffusion: &Square<N>,
    cfg: &ExpectationConfig,
) -> Result<(Tangent<N>, Square<N>)> {
    let spread = diffusion * diffusion.transpose();
    let zero = Tangent::<N>::zeros();
    let avg_jl_inv = expect(|x: &Tangent<N>| group.left_jacobian_inv(x), &zero, cov, cfg)?;
    let avg_w = expect(|x: &Tangent<N>| drift_integrand(group, model, mean, t, &spread, x), &zero, cov, cfg)?;
    let v = inverse(&avg_jl_inv).ok_or(Error::SingularJacobian {
        det: determinant(&avg_jl_inv),
    })? * avg_w;
    let cov_dot = expect(
        |x: &Tangent<N>| {
            let w = drift_integrand(group, model, mean, t, &spread, x)?;
            let jr_inv = group.right_jacobian_inv(x)?;
            let a = (w - group.left_jacobian_inv(x)? * v) * x.transpose();
            Ok(a + a.transpose() + jr_inv * spread * jr_inv.transpose())
        },
        &zero,
        cov,
        cfg,
    )?;
    Ok((v, symmetrize(&cov_dot)))
}

/// Body-frame mean velocity `(μ⁻¹μ̇)∨`, with `H` evaluated at `(μ, t)`.
pub fn mean_velocity<G: LieGroup<N>, const N: usize>(
    group: &G,
    state: &PropagationState<N>,
    model: &SdeModel<N>,
    cfg: &ExpectationConfig,
) -> Result<Tangent<N>> {
    let h = model.diffusion(&state.mean, state.t);
    Ok(velocities(group, model, &state.mean, &state.cov, state.t, &h, cfg)?.0)
}

/// `Σ̇` given the mean velocity, with `H` evaluated at `(μ, t)`.
pub fn covariance_velocity<G: LieGroup<N>, const N: usize>(
    group: &G,
    state: &PropagationState<N>,
    model: &SdeModel<N>,
    mean_vel: &Tangent<N>,
    cfg: &ExpectationConfig,
) -> Result<Square<N>> {
    let zero = Tangent::<N>::zeros();
    let h = model.diffusion(&state.mean, state.t);
    let spread = h * h.transpose();
    let cov_dot = expect(
        |x: &Tangent<N>| {
            let w = drift_integrand(group, model, &state.mean, state.t, &spread, x)?;
            let jr_inv = group.right_jacobian_inv(x)?;
            let a = (w - group.left_jacobian_inv(x)? * mean_vel) * x.transpose();
            Ok(a + a.transpose() + jr_inv * spread * jr_inv.transpose())
        },
        &zero,
        &state.cov,
        cfg,
    )?;
    Ok(symmetrize(&cov_dot))
}

/// Integrates `(μ, Σ)` over `[t₀, t₀ + horizon]`; the returned trajectory
/// includes the initial state. The step is shrunk so that it divides the
/// horizon.
///
/// With RK4 the mean is advanced by Munthe-Kaas stages: the stages live in
/// coordinates `u` around the step's starting mean, `u̇ = J_r⁻¹(u) v`, and
/// the step ends at `μ exp(u)`. `H` is evaluated once per step at its start.
pub fn propagate<G: LieGroup<N>, const N: usize>(
    group: &G,
    state0: &PropagationState<N>,
    model: &SdeModel<N>,
    horizon: f64,
    cfg: &PropagationConfig,
) -> Result<Vec<PropagationState<N>>> {
    cfg.validate()?;
    if model.interpretation() != Interpretation::Ito {
        return Err(Error::Config("propagation needs an Itô model".into()));
    }
    if horizon.is_nan() || horizon < 0.0 {
        return Err(Error::Config(format!("horizon must be non-negative, got {horizon}")));
    }
    let steps = ((horizon / cfg.dt) - 1e-9).ceil().max(0.0) as usize;
    let dt = if steps == 0 { 0.0 } else { horizon / steps as f64 };
    let mut out = Vec::with_capacity(steps + 1);
    let mut state = *state0;
    out.push(state);
    let initial_h = model.diffusion(&state.mean, state.t);
    let mut warned = false;
    for i in 0..steps {
        let h = model.diffusion(&state.mean, state.t);
        if !warned && (h - initial_h).abs().max() > 1e-12 * initial_h.abs().max().max(1.0) {
            log::warn!("diffusion varies along the trajectory; held constant within each step");
            warned = true;
        }
        let (mean, cov) = match cfg.integrator {
            Integrator::Euler => {
                let (v, c) = velocities(group, model, &state.mean, &state.cov, state.t, &h, &cfg.expectation)?;
                (state.mean * group.exp(&(v * dt)), state.cov + c * dt)
            }
            Integrator::Rk4 => {
                let stage = |u: &Tangent<N>, cov: &Square<N>, t: f64| -> Result<(Tangent<N>, Square<N>)> {
                    let mean = state.mean * group.exp(u);
                    let (v, c) = velocities(group, model, &mean, cov, t, &h, &cfg.expectation)?;
                    Ok((group.right_jacobian_inv(u)? * v, c))
                };
                let (t0, s0) = (state.t, state.cov);
                let zero = Tangent::<N>::zeros();
                let (k1, c1) = stage(&zero, &s0, t0)?;
                let (k2, c2) = stage(&(k1 * (0.5 * dt)), &(s0 + c1 * (0.5 * dt)), t0 + 0.5 * dt)?;
                let (k3, c3) = stage(&(k2 * (0.5 * dt)), &(s0 + c2 * (0.5 * dt)), t0 + 0.5 * dt)?;
                let (k4, c4) = stage(&(k3 * dt), &(s0 + c3 * dt), t0 + dt)?;
                let u = (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
                let c = (c1 + (c2 + c3) * 2.0 + c4) * (dt / 6.0);
                (state.mean * group.exp(&u), s0 + c)
            }
        };
        let t = state0.t + (i + 1) as f64 * dt;
        let cov = symmetrize(&cov);
        let lowest = min_eigenvalue(&cov);
        if lowest < -PSD_SLACK {
            return Err(Error::StepRejected { t, min_eigenvalue: lowest });
        }
        state = PropagationState {
            mean,
            cov: if lowest < 0.0 { symmetrize(&project_psd(&cov)) } else { cov },
            t,
        };
        out.push(state);
    }
    Ok(out)
}
