use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lie::{GroupElement, LieGroup, Square, Tangent};
use crate::linalg::{check_psd, sqrt_psd, symmetrize};
use crate::rng::{standard_normal, stream_rng};

/// Largest tolerated share of out-of-domain draws.
pub const MAX_REJECTION_RATE: f64 = 0.01;

/// `g = μ exp(x)` with `x ~ N(0, Σ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcentratedGaussian<const N: usize> {
    mean: GroupElement<N>,
    cov: Square<N>,
}

impl<const N: usize> ConcentratedGaussian<N> {
    /// Symmetrizes `cov` and checks it is PSD.
    pub fn new(mean: GroupElement<N>, cov: Square<N>) -> Result<Self> {
        let cov = symmetrize(&cov);
        check_psd(&cov)?;
        Ok(Self { mean, cov })
    }

    pub fn mean(&self) -> &GroupElement<N> {
        &self.mean
    }

    pub fn cov(&self) -> &Square<N> {
        &self.cov
    }

    /// `count` draws; draw `i` uses random stream `i` of `seed` and redraws
    /// from the same stream while it falls outside the coordinate domain.
    pub fn sample<G: LieGroup<N>>(&self, group: &G, count: usize, seed: u64) -> Result<Vec<GroupElement<N>>> {
        Ok(self
            .sample_coordinates(group, count, seed)?
            .iter()
            .map(|x| self.mean * group.exp(x))
            .collect())
    }

    /// The coordinates `x_i` behind [`sample`](Self::sample).
    pub fn sample_coordinates<G: LieGroup<N>>(&self, group: &G, count: usize, seed: u64) -> Result<Vec<Tangent<N>>> {
        let root = sqrt_psd(&self.cov)?;
        // rejected > 1% of (count + rejected)  ⇔  rejected > count / 99
        let budget = (count as f64 * MAX_REJECTION_RATE / (1.0 - MAX_REJECTION_RATE)).floor() as usize;
        let draws: Vec<(Tangent<N>, usize)> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(seed, i as u64);
                let mut rejected = 0;
                loop {
                    let x = root * standard_normal::<_, N>(&mut rng);
                    if group.in_domain(&x) {
                        return (x, rejected);
                    }
                    rejected += 1;
                    if rejected > budget {
                        return (x, rejected);
                    }
                }
            })
            .collect();
        let rejected: usize = draws.iter().map(|d| d.1).sum();
        if rejected > budget {
            return Err(Error::RejectionOverflow {
                rejected,
                drawn: count + rejected,
            });
        }
        if rejected > 0 {
            log::debug!("{rejected} out-of-domain draws resampled");
        }
        Ok(draws.into_iter().map(|d| d.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::empirical_covariance;
    use crate::lie::So3;

    fn mu() -> GroupElement<3> {
        So3.exp(&Tangent::<3>::new(0.2, 0.5, -0.1))
    }

    #[test]
    fn zero_covariance_samples_are_the_mean() {
        let d = ConcentratedGaussian::new(mu(), Square::<3>::zeros()).unwrap();
        assert!(d.sample(&So3, 20, 1).unwrap().iter().all(|g| *g == mu()));
    }

    #[test]
    fn sample_covariance_matches() {
        let cov = Square::<3>::identity() * 0.01;
        let d = ConcentratedGaussian::new(mu(), cov).unwrap();
        let samples = d.sample(&So3, 100_000, 2).unwrap();
        let emp = empirical_covariance(&So3, &samples, &mu()).unwrap();
        assert!((emp - cov).norm() / cov.norm() < 0.02);
    }

    #[test]
    fn wide_distribution_overflows() {
        let cov = Square::<3>::from_diagonal(&Tangent::<3>::new(9.0, 0.01, 0.01));
        let d = ConcentratedGaussian::new(mu(), cov).unwrap();
        assert!(matches!(d.sample(&So3, 1000, 3), Err(Error::RejectionOverflow { .. })));
    }

    #[test]
    fn sampling_is_reproducible() {
        let d = ConcentratedGaussian::new(mu(), Square::<3>::identity() * 0.05).unwrap();
        assert_eq!(d.sample(&So3, 50, 9).unwrap(), d.sample(&So3, 50, 9).unwrap());
    }

    #[test]
    fn indefinite_covariance_rejected() {
        let cov = Square::<3>::from_diagonal(&Tangent::<3>::new(0.1, -0.1, 0.1));
        assert!(ConcentratedGaussian::new(mu(), cov).is_err());
    }
}
