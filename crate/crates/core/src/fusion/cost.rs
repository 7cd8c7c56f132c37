use crate::error::{Error, Result};
use crate::lie::{GroupElement, LieGroup, Tangent};

fn errors<G: LieGroup<N>, const N: usize>(
    group: &G,
    truths: &[GroupElement<N>],
    estimates: &[GroupElement<N>],
) -> Result<Vec<Tangent<N>>> {
    if truths.len() != estimates.len() || truths.is_empty() {
        return Err(Error::Config(format!(
            "cost needs matching non-empty sets, got {} truths and {} estimates",
            truths.len(),
            estimates.len()
        )));
    }
    truths
        .iter()
        .zip(estimates)
        .map(|(r, mu)| group.log(&group.between(r, mu)))
        .collect()
}

/// `|mean_i log∨(R_i⁻¹ μ_i)|²`: the squared norm of the mean error.
pub fn cost_c1<G: LieGroup<N>, const N: usize>(
    group: &G,
    truths: &[GroupElement<N>],
    estimates: &[GroupElement<N>],
) -> Result<f64> {
    let e = errors(group, truths, estimates)?;
    let sum = e.iter().fold(Tangent::<N>::zeros(), |acc, v| acc + v);
    Ok((sum / e.len() as f64).norm_squared())
}

/// `mean_i |log∨(R_i⁻¹ μ_i)|²`: the mean squared error.
pub fn cost_c2<G: LieGroup<N>, const N: usize>(
    group: &G,
    truths: &[GroupElement<N>],
    estimates: &[GroupElement<N>],
) -> Result<f64> {
    let e = errors(group, truths, estimates)?;
    Ok(e.iter().map(|v| v.norm_squared()).sum::<f64>() / e.len() as f64)
}
