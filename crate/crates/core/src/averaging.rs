//! Step-size averaging.
//!
//! A single estimator evaluated at step `h` carries a truncation bias and a
//! rounding error. Re-evaluating it at `N` steps spread over
//! `H = [0.5h, 1.5h]` and averaging leaves the bias roughly unchanged but
//! treats the rounding errors as independent draws, so their contribution
//! shrinks like `sigma / sqrt(N)` (see [`predict_error_reduction`]).
//!
//! Step multisets are produced by a [`StepStrategy`]: uniform random draws
//! (seeded, reproducible), an equidistant grid including both endpoints, or
//! the golden-ratio additive recurrence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::diffcore::{estimate, LdiSignMode, MethodId, QuadratureMode};
use crate::error::{DiffError, Result};
use crate::functions::RealFunction;
use crate::summation::{compensated_mean, CompensatedSum};

/// Lower and upper edge of `H` as multiples of the nominal step.
pub const H_LOWER: f64 = 0.5;
pub const H_UPPER: f64 = 1.5;

/// `floor(2^64 / phi)`, the golden-ratio increment in 0.64 fixed point.
const GOLDEN_FRACTION: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepStrategy {
    Single,
    McUniform { n: usize, seed: u64 },
    Equidistant { n: usize },
    LowDiscrepancy { n: usize },
}

impl StepStrategy {
    pub fn sample_count(&self) -> usize {
        match *self {
            StepStrategy::Single => 1,
            StepStrategy::McUniform { n, .. }
            | StepStrategy::Equidistant { n }
            | StepStrategy::LowDiscrepancy { n } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StepStrategy::Single => Ok(()),
            StepStrategy::Equidistant { n } if n < 2 => Err(DiffError::InvalidStrategy(format!(
                "equidistant steps need n >= 2 (got {n}); use Single for one step"
            ))),
            StepStrategy::McUniform { n: 0, .. } | StepStrategy::LowDiscrepancy { n: 0 } => Err(
                DiffError::InvalidStrategy("sample count must be at least 1".into()),
            ),
            _ => Ok(()),
        }
    }

    pub fn steps(&self, h: f64) -> Result<StepSequence> {
        self.validate()?;
        match *self {
            StepStrategy::Single => {
                check_base(h)?;
                Ok(StepSequence {
                    base_h: h,
                    steps: vec![h],
                })
            }
            StepStrategy::McUniform { n, seed } => steps_mc(h, n, seed),
            StepStrategy::Equidistant { n } => steps_equidistant(h, n),
            StepStrategy::LowDiscrepancy { n } => steps_lowdiscrepancy(h, n),
        }
    }
}

/// The steps used for one averaged evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSequence {
    pub base_h: f64,
    pub steps: Vec<f64>,
}

impl StepSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `true` when every step lies in `[0.5h, 1.5h]`.
    pub fn within_bounds(&self) -> bool {
        let (lo, hi) = (H_LOWER * self.base_h, H_UPPER * self.base_h);
        self.steps.iter().all(|&s| s >= lo && s <= hi)
    }
}

fn check_base(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(DiffError::InvalidStep(h))
    }
}

/// `n` steps from `0.5h` to `1.5h` inclusive, evenly spaced.
pub fn steps_equidistant(h: f64, n: usize) -> Result<StepSequence> {
    check_base(h)?;
    StepStrategy::Equidistant { n }.validate()?;
    let lo = H_LOWER * h;
    let spacing = h / (n - 1) as f64;
    let mut steps: Vec<f64> = (0..n).map(|i| lo + i as f64 * spacing).collect();
    // pin the far endpoint so rounding in the spacing cannot push it outside H
    steps[n - 1] = H_UPPER * h;
    Ok(StepSequence { base_h: h, steps })
}

/// `n` independent uniform draws from `[0.5h, 1.5h]`; the same seed always
/// yields the same sequence.
pub fn steps_mc(h: f64, n: usize, seed: u64) -> Result<StepSequence> {
    check_base(h)?;
    StepStrategy::McUniform { n, seed }.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let lo = H_LOWER * h;
    let hi = H_UPPER * h;
    let steps = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            (lo + h * u).min(hi)
        })
        .collect();
    Ok(StepSequence { base_h: h, steps })
}

/// `steps[i] = 0.5h + h * frac((i + 1) / phi)`. The fractional parts are
/// accumulated in 64-bit fixed point, so they stay exact for any `n`.
pub fn steps_lowdiscrepancy(h: f64, n: usize) -> Result<StepSequence> {
    check_base(h)?;
    StepStrategy::LowDiscrepancy { n }.validate()?;
    let lo = H_LOWER * h;
    let hi = H_UPPER * h;
    let mut state = 0u64;
    let steps = (0..n)
        .map(|_| {
            state = state.wrapping_add(GOLDEN_FRACTION);
            let frac = (state >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            (lo + h * frac).min(hi)
        })
        .collect();
    Ok(StepSequence { base_h: h, steps })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedResult {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator) of the single-step
    /// estimates; zero when `n == 1`.
    pub sample_std: f64,
    pub n: usize,
    /// `sample_std / sqrt(n)`.
    pub predicted_sigma: f64,
}

/// Averages `method` over the steps produced by `strategy` around `h`.
///
/// The single-step estimates are summed with compensated summation. Any
/// non-finite single-step estimate aborts the evaluation and names its step.
pub fn averaged_derivative<F: RealFunction + ?Sized>(
    method: MethodId,
    f: &F,
    x: f64,
    h: f64,
    strategy: &StepStrategy,
    qmode: QuadratureMode,
    smode: LdiSignMode,
) -> Result<AveragedResult> {
    let seq = strategy.steps(h)?;
    let estimates = seq
        .steps
        .iter()
        .map(|&hi| {
            let v = estimate(method, f, x, hi, qmode, smode)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(DiffError::NonFinite { h: hi, value: v })
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(summarize(&estimates))
}

fn summarize(estimates: &[f64]) -> AveragedResult {
    let n = estimates.len();
    if n == 1 {
        return AveragedResult {
            mean: estimates[0],
            sample_std: 0.0,
            n,
            predicted_sigma: 0.0,
        };
    }
    let mean = compensated_mean(estimates);
    let ss: CompensatedSum = estimates.iter().map(|v| (v - mean) * (v - mean)).collect();
    let sample_std = (ss.total() / (n - 1) as f64).sqrt();
    AveragedResult {
        mean,
        sample_std,
        n,
        predicted_sigma: sample_std / (n as f64).sqrt(),
    }
}

/// Combined spread of the mean of `N` independent results with spreads
/// `sigma_i`: `sqrt(sum sigma_i^2) / N`.
pub fn predict_error_reduction(sigmas: &[f64]) -> Result<f64> {
    if sigmas.is_empty() {
        return Err(DiffError::InvalidArgument("need at least one sigma".into()));
    }
    if let Some(bad) = sigmas.iter().find(|s| s.is_nan() || **s < 0.0) {
        return Err(DiffError::InvalidArgument(format!(
            "sigma must be non-negative, got {bad}"
        )));
    }
    let ss: CompensatedSum = sigmas.iter().map(|s| s * s).collect();
    Ok(ss.total().sqrt() / sigmas.len() as f64)
}

/// Identifies one averaged evaluation within a benchmark run, so that its
/// random substream does not depend on evaluation order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubstreamKey {
    pub case_id: u64,
    pub method: MethodId,
    pub strategy_tag: u64,
    pub h: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes the run seed with a substream key.
pub fn derive_seed(seed: u64, key: &SubstreamKey) -> u64 {
    [
        key.case_id,
        key.method.tag(),
        key.strategy_tag,
        key.h.to_bits(),
    ]
    .iter()
    .fold(splitmix64(seed), |acc, &part| splitmix64(acc ^ part))
}
