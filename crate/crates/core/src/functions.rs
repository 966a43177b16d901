//! Test functions with closed-form first and second derivatives, and the
//! 19-case panel of evaluation points used by the benchmark.

use std::fmt;
use std::str::FromStr;

use crate::error::{DiffError, Result};

/// A real-valued function of one real variable.
///
/// Implemented for [`FunctionId`] (domain-checked) and for any plain
/// `Fn(f64) -> f64` closure (total).
pub trait RealFunction: Sync {
    fn eval(&self, x: f64) -> Result<f64>;
}

impl<F> RealFunction for F
where
    F: Fn(f64) -> f64 + Sync,
{
    fn eval(&self, x: f64) -> Result<f64> {
        Ok(self(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionId {
    Cos,
    Exp,
    Ln,
    Atan,
    Laguerre7,
}

impl FunctionId {
    pub const ALL: [FunctionId; 5] = [
        FunctionId::Cos,
        FunctionId::Exp,
        FunctionId::Ln,
        FunctionId::Atan,
        FunctionId::Laguerre7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionId::Cos => "cos",
            FunctionId::Exp => "exp",
            FunctionId::Ln => "ln",
            FunctionId::Atan => "atan",
            FunctionId::Laguerre7 => "laguerre7",
        }
    }

    pub fn in_domain(self, x: f64) -> bool {
        match self {
            FunctionId::Ln => x > 0.0 && x.is_finite(),
            _ => x.is_finite(),
        }
    }

    fn check(self, x: f64) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(DiffError::Domain { function: self, x })
        }
    }

    pub fn value(self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(match self {
            FunctionId::Cos => x.cos(),
            FunctionId::Exp => x.exp(),
            FunctionId::Ln => x.ln(),
            FunctionId::Atan => x.atan(),
            FunctionId::Laguerre7 => horner(&LAGUERRE7, x),
        })
    }

    pub fn d1_exact(self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(match self {
            FunctionId::Cos => -x.sin(),
            FunctionId::Exp => x.exp(),
            FunctionId::Ln => 1.0 / x,
            FunctionId::Atan => 1.0 / (1.0 + x * x),
            FunctionId::Laguerre7 => horner(&LAGUERRE7_D1, x),
        })
    }

    pub fn d2_exact(self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(match self {
            FunctionId::Cos => -x.cos(),
            FunctionId::Exp => x.exp(),
            FunctionId::Ln => -1.0 / (x * x),
            FunctionId::Atan => {
                let q = 1.0 + x * x;
                -2.0 * x / (q * q)
            }
            FunctionId::Laguerre7 => horner(&LAGUERRE7_D2, x),
        })
    }
}

impl RealFunction for FunctionId {
    fn eval(&self, x: f64) -> Result<f64> {
        self.value(x)
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionId {
    type Err = DiffError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cos" => Ok(FunctionId::Cos),
            "exp" => Ok(FunctionId::Exp),
            "ln" | "log" => Ok(FunctionId::Ln),
            "atan" | "arctan" => Ok(FunctionId::Atan),
            "laguerre7" | "l7" => Ok(FunctionId::Laguerre7),
            other => Err(DiffError::InvalidArgument(format!(
                "unknown function '{other}' (expected cos, exp, ln, atan, laguerre7)"
            ))),
        }
    }
}

/// L7(x) = sum_k (-1)^k C(7,k) x^k / k!, ascending powers.
const LAGUERRE7: [f64; 8] = [
    1.0,
    -7.0,
    21.0 / 2.0,
    -35.0 / 6.0,
    35.0 / 24.0,
    -7.0 / 40.0,
    7.0 / 720.0,
    -1.0 / 5040.0,
];

const LAGUERRE7_D1: [f64; 7] = [
    -7.0,
    21.0,
    -35.0 / 2.0,
    35.0 / 6.0,
    -7.0 / 8.0,
    7.0 / 120.0,
    -1.0 / 720.0,
];

const LAGUERRE7_D2: [f64; 6] = [
    21.0,
    -35.0,
    35.0 / 2.0,
    -7.0 / 2.0,
    7.0 / 24.0,
    -1.0 / 120.0,
];

/// Horner evaluation, coefficients in ascending order of power.
fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// A derivative magnitude as printed in the case table, e.g. `"0.0031"`.
///
/// The text is kept so that comparisons can be made at the printed
/// resolution: one unit in the last displayed decimal place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Printed(pub &'static str);

impl Printed {
    pub fn value(self) -> f64 {
        self.0
            .parse()
            .expect("printed magnitudes are valid decimals")
    }

    pub fn decimals(self) -> i32 {
        self.0
            .split_once('.')
            .map_or(0, |(_, frac)| frac.len() as i32)
    }

    /// One unit in the last printed place.
    pub fn last_place(self) -> f64 {
        10f64.powi(-self.decimals())
    }

    pub fn agrees_with(self, computed: f64) -> bool {
        let tol = self.last_place() * (1.0 + 1e-9);
        (computed.abs() - self.value()).abs() <= tol
    }
}

impl fmt::Display for Printed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

/// One evaluation point of the benchmark panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionCase {
    pub case_id: u8,
    pub function: FunctionId,
    pub x: f64,
    pub abs_d1_published: Printed,
    pub abs_d2_published: Printed,
}

impl FunctionCase {
    pub fn d1_exact(&self) -> Result<f64> {
        self.function.d1_exact(self.x)
    }

    pub fn d2_exact(&self) -> Result<f64> {
        self.function.d2_exact(self.x)
    }
}

macro_rules! case {
    ($id:expr, $f:ident, $x:expr, $d1:expr, $d2:expr) => {
        FunctionCase {
            case_id: $id,
            function: FunctionId::$f,
            x: $x,
            abs_d1_published: Printed($d1),
            abs_d2_published: Printed($d2),
        }
    };
}

static CASES: [FunctionCase; 19] = [
    case!(1, Laguerre7, 9.683, "19.88", "0.0011"),
    case!(2, Laguerre7, 11.2345, "0.0031", "28.57"),
    case!(3, Laguerre7, 15.83, "265.1", "0.1534"),
    case!(4, Laguerre7, 17.65, "1.443", "358.1"),
    case!(5, Laguerre7, 15.8285, "265.1", "0.0026"),
    case!(6, Laguerre7, 17.64595, "0.0048", "356.8"),
    case!(7, Exp, -6.9, "0.0010", "0.0010"),
    case!(8, Ln, 10.0, "0.1", "0.01"),
    case!(9, Atan, 6.245, "0.0249", "0.0078"),
    case!(10, Cos, 1.47, "0.9949", "0.1006"),
    case!(11, Cos, 0.1, "0.0998", "0.9950"),
    case!(12, Cos, 0.0025, "0.0024", "0.9999"),
    case!(13, Atan, 0.002, "0.9999", "0.0039"),
    case!(14, Ln, 0.03, "33.33", "1111.1"),
    case!(15, Exp, 6.9, "992.2", "992.2"),
    case!(16, Ln, 1.0, "1.0", "1.0"),
    case!(17, Laguerre7, 9.67477, "19.88", "0.1000"),
    case!(18, Laguerre7, 11.2311, "0.1001", "28.49"),
    case!(19, Exp, 4.25, "70.10", "70.10"),
];

/// The 19 benchmark cases, ordered by id.
pub fn case_table() -> &'static [FunctionCase] {
    &CASES
}

pub fn case(case_id: u8) -> Option<&'static FunctionCase> {
    CASES.iter().find(|c| c.case_id == case_id)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseCheck {
    pub case_id: u8,
    pub abs_d1: f64,
    pub abs_d2: f64,
    pub d1_ok: bool,
    pub d2_ok: bool,
}

impl CaseCheck {
    pub fn pass(&self) -> bool {
        self.d1_ok && self.d2_ok
    }
}

/// Recomputes |f'| and |f''| for every case and compares them with the
/// printed magnitudes. Mismatches are reported, never raised.
pub fn validate_case_table() -> Vec<CaseCheck> {
    CASES
        .iter()
        .map(|c| {
            let abs_d1 = c.d1_exact().map_or(f64::NAN, f64::abs);
            let abs_d2 = c.d2_exact().map_or(f64::NAN, f64::abs);
            CaseCheck {
                case_id: c.case_id,
                abs_d1,
                abs_d2,
                d1_ok: c.abs_d1_published.agrees_with(abs_d1),
                d2_ok: c.abs_d2_published.agrees_with(abs_d2),
            }
        })
        .collect()
}
