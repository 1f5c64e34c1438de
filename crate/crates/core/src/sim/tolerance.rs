use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::design::{monostable_period, CircuitSpec, MonostableModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ToleranceError {
    #[error("runs must be at least 1")]
    NoRuns,
    #[error("relative tolerance {0} must lie in (0, 1)")]
    Tolerance(f64),
    #[error("nominal timing components invalid: {0}")]
    Nominal(String),
}

/// Spread of the trigger timeout over component tolerance draws.
#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceResult {
    pub runs: usize,
    pub samples: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation (0 for a single run).
    pub stddev: f64,
}

impl ToleranceResult {
    pub fn contains(&self, target: f64) -> bool {
        self.min <= target && target <= self.max
    }
}

/// Generator for one run, derived only from `(seed, run)`.
fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

/// Draws R3 and C2 independently and uniformly within `±rel_tolerance` of
/// nominal and records the approximate monostable timeout for each run.
pub fn monte_carlo_timeout(
    spec: &CircuitSpec,
    rel_tolerance: f64,
    runs: usize,
    seed: u64,
) -> Result<ToleranceResult, ToleranceError> {
    if runs == 0 {
        return Err(ToleranceError::NoRuns);
    }
    if !(rel_tolerance > 0.0 && rel_tolerance < 1.0) {
        return Err(ToleranceError::Tolerance(rel_tolerance));
    }
    monostable_period(spec.r3, spec.c2, MonostableModel::Approx)
        .map_err(|e| ToleranceError::Nominal(e.to_string()))?;

    let band = |nominal: f64| nominal * (1.0 - rel_tolerance)..=nominal * (1.0 + rel_tolerance);
    let samples: Vec<f64> = (0..runs as u64)
        .map(|run| {
            let mut rng = run_rng(seed, run);
            let r = rng.random_range(band(spec.r3));
            let c = rng.random_range(band(spec.c2));
            monostable_period(r, c, MonostableModel::Approx).expect("positive draws")
        })
        .collect();

    let n = samples.len() as f64;
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Clamp guards the min <= mean <= max invariant against summation rounding.
    let mean = (samples.iter().sum::<f64>() / n).clamp(min, max);
    let stddev = if samples.len() > 1 {
        (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(ToleranceResult {
        runs,
        samples,
        min,
        max,
        mean,
        stddev,
    })
}
