use super::{LieGroup, Tangent};
use crate::error::Result;

/// Second-order expansion of `log∨(exp(−ε) exp(x))` in `ε`:
///
/// ```text
/// x − J_l⁻¹(x) ε + ½ Σ_k (∂J_l⁻¹/∂x_k) ε (J_l⁻¹ ε)_k
/// ```
pub fn expand_log_perturbation<G: LieGroup<N>, const N: usize>(
    group: &G,
    eps: &Tangent<N>,
    x: &Tangent<N>,
) -> Result<Tangent<N>> {
    let jl_inv = group.left_jacobian_inv(x)?;
    let first = jl_inv * eps;
    let second = (0..N).fold(Tangent::<N>::zeros(), |acc, k| {
        acc + group.left_jacobian_inv_partial(x, k) * eps * first[k]
    });
    Ok(x - first + second * 0.5)
}

/// Baker–Campbell–Hausdorff series for `log∨(exp(x) exp(r))` through third
/// order: `x + r + ½[x, r] + (1/12)([x, [x, r]] + [r, [r, x]])`.
pub fn bch_truncated<G: LieGroup<N>, const N: usize>(
    group: &G,
    x: &Tangent<N>,
    r: &Tangent<N>,
) -> Tangent<N> {
    let ad_x = group.ad(x);
    let ad_r = group.ad(r);
    x + r + ad_x * r * 0.5 + (ad_x * ad_x * r + ad_r * ad_r * x) / 12.0
}
