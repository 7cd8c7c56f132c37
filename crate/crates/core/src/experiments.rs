//! Attitude-fusion experiments on SO(3): a wide prior, a vector
//! (gravity + magnetic field) or direct rotation observation, and the plain
//! versus group-corrected update scored by the mean-error (`c₁`) and
//! mean-squared-error (`c₂`) costs over a sweep of noise levels `τ`.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use nalgebra::{SMatrix, Vector3, Vector6};
use rand::Rng;
use rayon::prelude::*;

use crate::distribution::{ConcentratedGaussian, MAX_CONCENTRATED_COV};
use crate::error::{Error, Result};
use crate::fusion::{fuse_euclidean, fuse_group, EuclideanObservation, FusionEstimate};
use crate::lie::{GroupElement, LieGroup, So3, Square, Tangent};
use crate::linalg::{spectral_norm_sym, sqrt_psd};
use crate::rng::{standard_normal, stream_key, stream_rng};

pub const GRAVITY: [f64; 3] = [0.0, 0.0, -9.82];
pub const MAGNETIC: [f64; 3] = [0.33, 0.0, -0.95];
pub const PRIOR_MEAN: [f64; 3] = [PI / 3.0, PI / 4.0, PI / 6.0];
pub const PRIOR_COV: [f64; 3] = [0.5, 1.0, 0.8];
pub const EUCLIDEAN_NOISE: [f64; 6] = [0.3, 0.3, 0.3, 0.1, 0.1, 0.1];
pub const GROUP_NOISE: [f64; 3] = [0.3, 0.3, 0.3];

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_TAU_MIN: f64 = 1e-3;
pub const DEFAULT_TAU_MAX: f64 = 1.0;
pub const DEFAULT_TAU_POINTS: usize = 13;

/// Largest tolerated share of samples dropped for domain errors.
pub const MAX_EXCLUDED_FRACTION: f64 = 1e-3;

pub const CSV_HEADER: &str = "tau,c1_plain,c1_mod,c2_plain,c2_mod,wall_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObservationKind {
    /// `(gᵀR, bᵀR)ᵀ + r ∈ ℝ⁶`
    Euclidean,
    /// `R exp(r) ∈ SO(3)`
    Group,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: ObservationKind,
    pub samples: usize,
    pub taus: Vec<f64>,
    pub seed: u64,
    /// Record per-point wall-clock time; off by default so that output is a
    /// pure function of the configuration.
    pub wall_time: bool,
}

impl ExperimentConfig {
    pub fn new(model: ObservationKind, seed: u64) -> Self {
        Self {
            model,
            samples: DEFAULT_SAMPLES,
            taus: tau_grid(DEFAULT_TAU_MIN, DEFAULT_TAU_MAX, DEFAULT_TAU_POINTS).expect("default grid is valid"),
            seed,
            wall_time: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("need at least one sample".into()));
        }
        if let Some(t) = self.taus.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::Config(format!("noise level must be positive, got {t}")));
        }
        if u32::try_from(self.taus.len()).is_err() || u32::try_from(self.samples).is_err() {
            return Err(Error::Config("sweep too large for per-sample stream keys".into()));
        }
        Ok(())
    }
}

/// `points` values spaced evenly in `log τ`, ascending.
pub fn tau_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) || points == 0 {
        return Err(Error::Config(format!("invalid grid [{min}, {max}] with {points} points")));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let (a, b) = (min.ln(), max.ln());
    Ok((0..points)
        .map(|i| match i {
            0 => min,
            i if i == points - 1 => max,
            i => (a + (b - a) * i as f64 / (points - 1) as f64).exp(),
        })
        .collect())
}

fn prior() -> ConcentratedGaussian<3> {
    let cov = Square::<3>::from_diagonal(&Vector3::from(PRIOR_COV));
    ConcentratedGaussian::new(So3.exp(&Vector3::from(PRIOR_MEAN)), cov).expect("diagonal positive covariance")
}

/// Prior `exp(ξ) exp(v)`, `v ~ N(0, P⁻)`. Its covariance is wider than the
/// concentrated regime, which is logged as a warning.
pub fn build_prior() -> ConcentratedGaussian<3> {
    let p = prior();
    let norm = spectral_norm_sym(p.cov());
    if norm > MAX_CONCENTRATED_COV {
        log::warn!("prior covariance |P|₂ = {norm} is beyond the concentrated regime (> {MAX_CONCENTRATED_COV})");
    }
    p
}

pub fn euclidean_noise(tau: f64) -> SMatrix<f64, 6, 6> {
    SMatrix::<f64, 6, 6>::from_diagonal(&Vector6::from(EUCLIDEAN_NOISE)) * tau
}

pub fn group_noise(tau: f64) -> Square<3> {
    Square::<3>::from_diagonal(&Vector3::from(GROUP_NOISE)) * tau
}

/// Noise-free `(gᵀR, bᵀR)ᵀ`.
pub fn gravity_magnetic(r: &GroupElement<3>) -> Vector6<f64> {
    let g = r.matrix().transpose() * Vector3::from(GRAVITY);
    let b = r.matrix().transpose() * Vector3::from(MAGNETIC);
    Vector6::new(g[0], g[1], g[2], b[0], b[1], b[2])
}

pub fn observe_euclidean<R: Rng>(r: &GroupElement<3>, tau: f64, rng: &mut R) -> Vector6<f64> {
    let noise = standard_normal::<_, 6>(rng).component_mul(&Vector6::from(EUCLIDEAN_NOISE).map(f64::sqrt)) * tau.sqrt();
    gravity_magnetic(r) + noise
}

pub fn observe_group<R: Rng>(r: &GroupElement<3>, tau: f64, rng: &mut R) -> GroupElement<3> {
    let noise = standard_normal::<_, 3>(rng).component_mul(&Vector3::from(GROUP_NOISE).map(f64::sqrt)) * tau.sqrt();
    r * &So3.exp(&noise)
}

/// Per-sample errors `log∨(R_i⁻¹ μ_i)` of both update variants at one `τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialErrors {
    pub plain: Vec<Tangent<3>>,
    pub modified: Vec<Tangent<3>>,
    pub excluded: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRecord {
    pub tau: f64,
    pub c1_plain: f64,
    pub c1_modified: f64,
    pub c2_plain: f64,
    pub c2_modified: f64,
    pub wall_ms: u64,
    pub excluded: usize,
}

fn one_sample(
    model: ObservationKind,
    prior: &ConcentratedGaussian<3>,
    prior_root: &Square<3>,
    obs: &EuclideanObservation<3, 6>,
    tau: f64,
    seed: u64,
    stream: u64,
) -> Result<(Tangent<3>, Tangent<3>)> {
    let mut rng = stream_rng(seed, stream);
    // the prior is sampled as stated, without rejecting draws outside D
    let truth = prior.mean() * &So3.exp(&(prior_root * standard_normal::<_, 3>(&mut rng)));
    let estimate: FusionEstimate<3> = match model {
        ObservationKind::Euclidean => {
            let z = observe_euclidean(&truth, tau, &mut rng);
            fuse_euclidean(&So3, prior, obs, &z)?
        }
        ObservationKind::Group => {
            let z = observe_group(&truth, tau, &mut rng);
            fuse_group(&So3, prior, &group_noise(tau), &z)?
        }
    };
    Ok((
        So3.log(&So3.between(&truth, &estimate.plain))?,
        So3.log(&So3.between(&truth, &estimate.modified))?,
    ))
}

/// Errors of `samples` paired draws at sweep point `tau_index`. Sample `i`
/// uses stream `(tau_index, i)` of `seed`, for both the truth and its
/// observation, so the two update variants see identical data.
pub fn trial_errors(
    model: ObservationKind,
    tau_index: usize,
    tau: f64,
    samples: usize,
    seed: u64,
) -> Result<TrialErrors> {
    let prior = prior();
    let root = sqrt_psd(prior.cov())?;
    let obs = EuclideanObservation::new(gravity_magnetic, euclidean_noise(tau))?;
    let outcomes: Vec<Result<(Tangent<3>, Tangent<3>)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let stream = stream_key(tau_index as u32, i as u32);
            one_sample(model, &prior, &root, &obs, tau, seed, stream)
        })
        .collect();
    let mut errors = TrialErrors {
        plain: Vec::with_capacity(samples),
        modified: Vec::with_capacity(samples),
        excluded: 0,
    };
    for outcome in outcomes {
        match outcome {
            Ok((p, m)) => {
                errors.plain.push(p);
                errors.modified.push(m);
            }
            Err(Error::Domain(msg)) => {
                log::debug!("sample excluded at tau = {tau}: {msg}");
                errors.excluded += 1;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(errors)
}

fn c1(errors: &[Tangent<3>]) -> f64 {
    (errors.iter().fold(Tangent::<3>::zeros(), |acc, e| acc + e) / errors.len() as f64).norm_squared()
}

fn c2(errors: &[Tangent<3>]) -> f64 {
    errors.iter().map(|e| e.norm_squared()).sum::<f64>() / errors.len() as f64
}

/// One record per `τ`, in the order of `cfg.taus`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let bound = (cfg.samples as f64 * MAX_EXCLUDED_FRACTION).floor() as usize;
    build_prior();
    let mut records = Vec::with_capacity(cfg.taus.len());
    for (index, &tau) in cfg.taus.iter().enumerate() {
        let start = Instant::now();
        let errors = trial_errors(cfg.model, index, tau, cfg.samples, cfg.seed)?;
        if errors.excluded > bound || errors.plain.is_empty() {
            return Err(Error::ExclusionBound {
                excluded: errors.excluded,
                total: cfg.samples,
                bound,
            });
        }
        if errors.excluded > 0 {
            log::warn!("tau = {tau}: {} of {} samples excluded", errors.excluded, cfg.samples);
        }
        let wall_ms = if cfg.wall_time { start.elapsed().as_millis() as u64 } else { 0 };
        records.push(TrialRecord {
            tau,
            c1_plain: c1(&errors.plain),
            c1_modified: c1(&errors.modified),
            c2_plain: c2(&errors.plain),
            c2_modified: c2(&errors.modified),
            wall_ms,
            excluded: errors.excluded,
        });
        log::info!("tau = {tau:e} done");
    }
    Ok(records)
}

/// CSV text with rows sorted by ascending `τ`.
pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
    for r in &sorted {
        w.write_record([
            format!("{:e}", r.tau),
            format!("{:e}", r.c1_plain),
            format!("{:e}", r.c1_modified),
            format!("{:e}", r.c2_plain),
            format!("{:e}", r.c2_modified),
            r.wall_ms.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    write_file(path, &records_csv(records))
}

/// gnuplot script plotting both costs of both variants against `τ` from the
/// CSV at `csv_path`.
pub fn gnuplot_script(csv_path: &Path) -> String {
    let csv = csv_path.display();
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set logscale xy\n\
         set xlabel 'tau'\n\
         set terminal pngcairo size 1000,400\n\
         set output '{csv}.png'\n\
         set multiplot layout 1,2\n\
         set title 'c1'\n\
         plot '{csv}' using 1:2 with linespoints, '' using 1:3 with linespoints\n\
         set title 'c2'\n\
         plot '{csv}' using 1:4 with linespoints, '' using 1:5 with linespoints\n\
         unset multiplot\n"
    )
}

pub fn emit_gnuplot(csv_path: &Path, script_path: &Path) -> Result<()> {
    write_file(script_path, &gnuplot_script(csv_path))
}
