//! Coefficient conversions between Itô and Stratonovich interpretations and
//! between the injection and exponential-coordinate forms.

use super::{Interpretation, ParametricSdeModel, SdeModel};
use crate::error::{Error, Result};
use crate::lie::{lie_derivative_right, unit, GroupElement, LieGroup, Square, Tangent};

/// Step of the central differences taken in coordinate space.
const COORDINATE_STEP: f64 = 1e-5;

fn expect(interpretation: Interpretation, wanted: Interpretation) -> Result<()> {
    if interpretation == wanted {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "expected a {wanted:?} model, got {interpretation:?}"
        )))
    }
}

/// Drift correction of the Itô injection → parametric conversion:
/// `½ J_r Σ_k (∂J_r⁻¹/∂x_k) H Hᵀ J_r⁻ᵀ e_k`.
pub fn ito_parametric_correction<G: LieGroup<N>, const N: usize>(
    group: &G,
    x: &Tangent<N>,
    diffusion: &Square<N>,
) -> Result<Tangent<N>> {
    let jr_inv = group.right_jacobian_inv(x)?;
    let spread = diffusion * diffusion.transpose() * jr_inv.transpose();
    let mut sum = Tangent::<N>::zeros();
    for k in 0..N {
        sum += group.right_jacobian_inv_partial(x, k) * spread.column(k);
    }
    Ok(group.right_jacobian(x) * sum * 0.5)
}

/// Itô-to-Itô pull-back of an injection SDE to coordinates around `mu`.
pub fn ito_injection_to_parametric<G, const N: usize>(
    group: G,
    model: &SdeModel<N>,
    mu: GroupElement<N>,
) -> Result<ParametricSdeModel<G, N>>
where
    G: LieGroup<N> + 'static,
{
    expect(model.interpretation(), Interpretation::Ito)?;
    let (h, hh) = (model.drift_fn(), model.diffusion_fn());
    let g2 = group.clone();
    let drift = move |x: &Tangent<N>, t: f64| {
        let g = mu * g2.exp(x);
        Ok(h(&g, t) + ito_parametric_correction(&g2, x, &hh(&g, t))?)
    };
    let hh = model.diffusion_fn();
    let g3 = group.clone();
    let diffusion = move |x: &Tangent<N>, t: f64| Ok(hh(&(mu * g3.exp(x)), t));
    Ok(ParametricSdeModel::new(group, mu, drift, diffusion, Interpretation::Ito))
}

/// `½ Σ_{i,j} E_i^r(H_kj) H_ij e_k` at `g`.
pub fn stratonovich_correction<G, F, const N: usize>(group: &G, diffusion: F, g: &GroupElement<N>) -> Tangent<N>
where
    G: LieGroup<N>,
    F: Fn(&GroupElement<N>) -> Square<N>,
{
    let h = diffusion(g);
    let mut sum = Tangent::<N>::zeros();
    for i in 0..N {
        let dh: Square<N> = lie_derivative_right(group, &diffusion, g, i);
        sum += dh * h.row(i).transpose();
    }
    sum * 0.5
}

/// Stratonovich → Itô for an injection SDE; the diffusion is unchanged.
pub fn stratonovich_to_ito<G, const N: usize>(group: G, model: &SdeModel<N>) -> Result<SdeModel<N>>
where
    G: LieGroup<N> + 'static,
{
    expect(model.interpretation(), Interpretation::Stratonovich)?;
    let (h, hh) = (model.drift_fn(), model.diffusion_fn());
    let drift = move |g: &GroupElement<N>, t: f64| {
        h(g, t) + stratonovich_correction(&group, |g: &GroupElement<N>| hh(g, t), g)
    };
    let hh = model.diffusion_fn();
    Ok(SdeModel::new(drift, move |g, t| hh(g, t), Interpretation::Ito))
}

/// Stratonovich pull-back to coordinates: the coefficients transfer verbatim.
pub fn stratonovich_injection_to_parametric<G, const N: usize>(
    group: G,
    model: &SdeModel<N>,
    mu: GroupElement<N>,
) -> Result<ParametricSdeModel<G, N>>
where
    G: LieGroup<N> + 'static,
{
    expect(model.interpretation(), Interpretation::Stratonovich)?;
    let (h, hh) = (model.drift_fn(), model.diffusion_fn());
    let (g2, g3) = (group.clone(), group.clone());
    Ok(ParametricSdeModel::new(
        group,
        mu,
        move |x, t| Ok(h(&(mu * g2.exp(x)), t)),
        move |x, t| Ok(hh(&(mu * g3.exp(x)), t)),
        Interpretation::Stratonovich,
    ))
}

/// Stratonovich → Itô in coordinate space. With `B = J_r⁻¹ H̃` the coordinate
/// drift gains `½ Σ_i ∂_i B · B_{i,:}ᵀ`, mapped back through `J_r`.
pub fn parametric_stratonovich_to_ito<G, const N: usize>(
    model: &ParametricSdeModel<G, N>,
) -> Result<ParametricSdeModel<G, N>>
where
    G: LieGroup<N> + 'static,
{
    expect(model.interpretation(), Interpretation::Stratonovich)?;
    let src = model.clone();
    let drift = move |x: &Tangent<N>, t: f64| {
        let b = src.coordinate_diffusion(x, t)?;
        let mut sum = Tangent::<N>::zeros();
        for i in 0..N {
            let step = unit::<N>(i) * COORDINATE_STEP;
            let forward = src.coordinate_diffusion(&(x + step), t)?;
            let backward = src.coordinate_diffusion(&(x - step), t)?;
            let db = (forward - backward) / (2.0 * COORDINATE_STEP);
            sum += db * b.row(i).transpose();
        }
        Ok(src.drift(x, t)? + src.group().right_jacobian(x) * sum * 0.5)
    };
    let diffusion = model.diffusion_fn();
    Ok(ParametricSdeModel::new(
        model.group().clone(),
        *model.base(),
        drift,
        move |x, t| diffusion(x, t),
        Interpretation::Ito,
    ))
}
