use std::ops::{Add, Mul};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lie::{Square, Tangent};
use crate::linalg::sqrt_psd;
use crate::rng::{standard_normal, stream_rng};

/// Monte Carlo draws per random stream.
const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectationMethod {
    /// `2N`-point spherical cubature, exact for polynomials of degree ≤ 3.
    Cubature,
    MonteCarlo { samples: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpectationConfig {
    pub method: ExpectationMethod,
    pub seed: u64,
}

impl Default for ExpectationConfig {
    fn default() -> Self {
        Self {
            method: ExpectationMethod::Cubature,
            seed: 0,
        }
    }
}

impl ExpectationConfig {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            method: ExpectationMethod::MonteCarlo { samples },
            seed,
        }
    }
}

/// Points `m ± √N (√Σ)_i`, each carrying weight `1 / 2N`.
pub fn cubature_points<const N: usize>(mean: &Tangent<N>, cov: &Square<N>) -> Result<Vec<Tangent<N>>> {
    let spread = sqrt_psd(cov)? * (N as f64).sqrt();
    let mut points = Vec::with_capacity(2 * N);
    for i in 0..N {
        points.push(mean + spread.column(i));
    }
    for i in 0..N {
        points.push(mean - spread.column(i));
    }
    Ok(points)
}

/// `⟨f(x)⟩` for `x ~ N(mean, cov)`.
///
/// Monte Carlo draws are split into fixed-size chunks, each with its own
/// random stream, and the chunk sums are added in order, so the result does
/// not depend on thread scheduling.
pub fn expect<T, F, const N: usize>(
    f: F,
    mean: &Tangent<N>,
    cov: &Square<N>,
    cfg: &ExpectationConfig,
) -> Result<T>
where
    T: Add<Output = T> + Mul<f64, Output = T> + Send,
    F: Fn(&Tangent<N>) -> Result<T> + Sync,
{
    match cfg.method {
        ExpectationMethod::Cubature => {
            let points = cubature_points(mean, cov)?;
            let weight = 1.0 / points.len() as f64;
            sum_in_order(points.iter().map(&f))?
                .map(|s| s * weight)
                .ok_or_else(|| Error::Config("empty cubature rule".into()))
        }
        ExpectationMethod::MonteCarlo { samples } => {
            if samples == 0 {
                return Err(Error::Config("Monte Carlo expectation needs samples".into()));
            }
            let root = sqrt_psd(cov)?;
            let chunks = samples.div_ceil(CHUNK);
            let partial: Vec<Result<Option<T>>> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = stream_rng(cfg.seed, c as u64);
                    let len = CHUNK.min(samples - c * CHUNK);
                    sum_in_order((0..len).map(|_| f(&(mean + root * standard_normal::<_, N>(&mut rng)))))
                })
                .collect();
            let total = sum_in_order(partial.into_iter().map(|p| p.map(|o| o.expect("chunks are non-empty"))))?;
            Ok(total.expect("at least one chunk") * (1.0 / samples as f64))
        }
    }
}

fn sum_in_order<T: Add<Output = T>>(items: impl Iterator<Item = Result<T>>) -> Result<Option<T>> {
    let mut acc: Option<T> = None;
    for item in items {
        let v = item?;
        acc = Some(match acc {
            None => v,
            Some(a) => a + v,
        });
    }
    Ok(acc)
}
