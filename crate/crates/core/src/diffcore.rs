//! Base first-derivative estimators and the equidistant quadrature used by
//! differentiation by integration.

use std::fmt;
use std::str::FromStr;

use crate::error::{DiffError, Result};
use crate::functions::RealFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    /// Central difference.
    Afd,
    /// Five-point Richardson stencil.
    Re,
    /// Lanczos differentiation by integration.
    Ldi,
}

impl MethodId {
    pub const ALL: [MethodId; 3] = [MethodId::Afd, MethodId::Re, MethodId::Ldi];

    pub fn label(self) -> &'static str {
        match self {
            MethodId::Afd => "AFD",
            MethodId::Re => "RE",
            MethodId::Ldi => "LDI",
        }
    }

    /// How far the stencil reaches from `x`, in units of the step.
    pub fn reach(self) -> f64 {
        match self {
            MethodId::Afd | MethodId::Ldi => 1.0,
            MethodId::Re => 2.0,
        }
    }

    pub(crate) fn tag(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MethodId {
    type Err = DiffError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "afd" => Ok(MethodId::Afd),
            "re" => Ok(MethodId::Re),
            "ldi" => Ok(MethodId::Ldi),
            other => Err(DiffError::InvalidArgument(format!(
                "unknown method '{other}' (expected afd, re, ldi)"
            ))),
        }
    }
}

/// Which weight set [`boole16`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum QuadratureMode {
    /// The 16-node weight list 7,12,32,14,32,12,...,32,7. It is not a
    /// Newton-Cotes rule: the weights sum to 328 instead of 337.5 (in units
    /// of 2Δx/45) and are not symmetric, so constants are not integrated
    /// exactly and `∫(t-x)dt` over a symmetric interval is not zero.
    PaperVerbatim,
    /// Four-panel composite Boole rule on 17 nodes.
    #[default]
    CorrectedComposite,
}

impl FromStr for QuadratureMode {
    type Err = DiffError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "paper" | "verbatim" => Ok(QuadratureMode::PaperVerbatim),
            "corrected" | "composite" => Ok(QuadratureMode::CorrectedComposite),
            other => Err(DiffError::InvalidArgument(format!(
                "unknown quadrature mode '{other}' (expected paper, corrected)"
            ))),
        }
    }
}

/// Sign of the moment kernel in [`ldi`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LdiSignMode {
    /// Kernel `(t - x)`: returns `+f'(x)`.
    #[default]
    Corrected,
    /// Kernel `(x - t)`: returns `-f'(x)`.
    PaperVerbatim,
}

impl FromStr for LdiSignMode {
    type Err = DiffError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "corrected" => Ok(LdiSignMode::Corrected),
            "paper" | "verbatim" => Ok(LdiSignMode::PaperVerbatim),
            other => Err(DiffError::InvalidArgument(format!(
                "unknown LDI sign mode '{other}' (expected corrected, paper)"
            ))),
        }
    }
}

const PRINTED_WEIGHTS: [f64; 16] = [
    7.0, 12.0, 32.0, 14.0, 32.0, 12.0, 32.0, 14.0, 32.0, 12.0, 32.0, 14.0, 32.0, 12.0, 32.0, 7.0,
];

const COMPOSITE_WEIGHTS: [f64; 17] = [
    7.0, 32.0, 12.0, 32.0, 14.0, 32.0, 12.0, 32.0, 14.0, 32.0, 12.0, 32.0, 14.0, 32.0, 12.0, 32.0,
    7.0,
];

impl QuadratureMode {
    pub fn weights(self) -> &'static [f64] {
        match self {
            QuadratureMode::PaperVerbatim => &PRINTED_WEIGHTS,
            QuadratureMode::CorrectedComposite => &COMPOSITE_WEIGHTS,
        }
    }
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(DiffError::InvalidStep(h))
    }
}

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn afd<F: RealFunction + ?Sized>(f: &F, x: f64, h: f64) -> Result<f64> {
    check_step(h)?;
    let fp = f.eval(x + h)?;
    let fm = f.eval(x - h)?;
    Ok((fp - fm) / (2.0 * h))
}

/// Five-point stencil `(f(x-2h) - 8f(x-h) + 8f(x+h) - f(x+2h)) / 12h`,
/// exact through degree four.
pub fn richardson5<F: RealFunction + ?Sized>(f: &F, x: f64, h: f64) -> Result<f64> {
    check_step(h)?;
    let fm2 = f.eval(x - 2.0 * h)?;
    let fm1 = f.eval(x - h)?;
    let fp1 = f.eval(x + h)?;
    let fp2 = f.eval(x + 2.0 * h)?;
    Ok((fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h))
}

/// Equidistant weighted-sum quadrature of `f` over `[a, b]`, scaled by
/// `2Δx/45`. Nodes are `a + iΔx`; the last node is pinned to `b`.
pub fn boole16<F: RealFunction + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    mode: QuadratureMode,
) -> Result<f64> {
    if a >= b || !a.is_finite() || !b.is_finite() {
        return Err(DiffError::InvalidInterval { a, b });
    }
    let weights = mode.weights();
    let last = weights.len() - 1;
    let dx = (b - a) / last as f64;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        let t = if i == last { b } else { a + i as f64 * dx };
        acc += w * f.eval(t)?;
    }
    Ok(2.0 * dx * acc / 45.0)
}

/// Differentiation by integration: `3/(2h³) ∫_{x-h}^{x+h} (t-x) f(t) dt`.
pub fn ldi<F: RealFunction + ?Sized>(
    f: &F,
    x: f64,
    h: f64,
    qmode: QuadratureMode,
    smode: LdiSignMode,
) -> Result<f64> {
    check_step(h)?;
    let sign = match smode {
        LdiSignMode::Corrected => 1.0,
        LdiSignMode::PaperVerbatim => -1.0,
    };
    let moment = |t: f64| -> Result<f64> { Ok(sign * (t - x) * f.eval(t)?) };
    let integral = boole16(&Fallible(moment), x - h, x + h, qmode)?;
    Ok(3.0 / (2.0 * h * h * h) * integral)
}

/// Adapter so a fallible closure can be fed back into [`boole16`].
struct Fallible<G>(G);

impl<G> RealFunction for Fallible<G>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    fn eval(&self, x: f64) -> Result<f64> {
        (self.0)(x)
    }
}

/// Dispatches to the estimator named by `method`.
pub fn estimate<F: RealFunction + ?Sized>(
    method: MethodId,
    f: &F,
    x: f64,
    h: f64,
    qmode: QuadratureMode,
    smode: LdiSignMode,
) -> Result<f64> {
    match method {
        MethodId::Afd => afd(f, x, h),
        MethodId::Re => richardson5(f, x, h),
        MethodId::Ldi => ldi(f, x, h, qmode, smode),
    }
}
