use std::path::Path;

use super::PropagationState;
use crate::error::{Error, Result};

fn header<const N: usize>() -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 0..N {
        for j in 0..N {
            h.push(format!("mu_{i}{j}"));
        }
    }
    for i in 0..N {
        for j in i..N {
            h.push(format!("sigma_{i}{j}"));
        }
    }
    h
}

fn record<const N: usize>(s: &PropagationState<N>) -> Vec<String> {
    let mut r = vec![format!("{:.17e}", s.t)];
    for i in 0..N {
        for j in 0..N {
            r.push(format!("{:.17e}", s.mean.matrix()[(i, j)]));
        }
    }
    for i in 0..N {
        for j in i..N {
            r.push(format!("{:.17e}", s.cov[(i, j)]));
        }
    }
    r
}

fn write_to<W: std::io::Write, const N: usize>(out: W, trajectory: &[PropagationState<N>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header::<N>())?;
    for s in trajectory {
        w.write_record(record(s))?;
    }
    w.flush()?;
    Ok(())
}

/// CSV with columns `t`, `μ` row-major, and the upper triangle of `Σ`.
pub fn trajectory_csv<const N: usize>(trajectory: &[PropagationState<N>]) -> String {
    let mut buf = Vec::new();
    write_to(&mut buf, trajectory).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

pub fn write_trajectory_csv<const N: usize>(path: &Path, trajectory: &[PropagationState<N>]) -> Result<()> {
    std::fs::write(path, trajectory_csv(trajectory)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
