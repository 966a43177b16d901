//! Error-table benchmark: sweep cases × method variants × step sizes,
//! record absolute errors against the exact derivative, and summarise.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::averaging::{averaged_derivative, derive_seed, StepStrategy, SubstreamKey};
use crate::diffcore::{LdiSignMode, MethodId, QuadratureMode};
use crate::error::{DiffError, Result};
use crate::functions::{case, FunctionCase, RealFunction};
use crate::summation::CompensatedSum;

pub mod fixtures;
pub mod render;

pub use render::{render, render_scatter, render_shift_report, OutputFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Single,
    AvgMc,
    AvgEd,
    AvgLds,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Single,
        Variant::AvgMc,
        Variant::AvgEd,
        Variant::AvgLds,
    ];

    pub fn is_averaged(self) -> bool {
        self != Variant::Single
    }

    fn tag(self) -> u64 {
        self as u64
    }

    pub fn strategy(self, n: usize, seed: u64) -> StepStrategy {
        match self {
            Variant::Single => StepStrategy::Single,
            Variant::AvgMc => StepStrategy::McUniform { n, seed },
            Variant::AvgEd => StepStrategy::Equidistant { n },
            Variant::AvgLds => StepStrategy::LowDiscrepancy { n },
        }
    }
}

impl FromStr for Variant {
    type Err = DiffError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Variant::Single),
            "mc" => Ok(Variant::AvgMc),
            "ed" => Ok(Variant::AvgEd),
            "lds" => Ok(Variant::AvgLds),
            other => Err(DiffError::InvalidArgument(format!(
                "unknown variant '{other}' (expected single, mc, ed, lds)"
            ))),
        }
    }
}

/// A table row: base estimator plus averaging strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MethodVariant {
    pub method: MethodId,
    pub variant: Variant,
}

impl MethodVariant {
    pub const fn new(method: MethodId, variant: Variant) -> Self {
        Self { method, variant }
    }

    /// The seven rows of the reference tables, in their usual order.
    pub const STANDARD_ROWS: [MethodVariant; 7] = [
        MethodVariant::new(MethodId::Afd, Variant::Single),
        MethodVariant::new(MethodId::Afd, Variant::AvgMc),
        MethodVariant::new(MethodId::Afd, Variant::AvgEd),
        MethodVariant::new(MethodId::Re, Variant::Single),
        MethodVariant::new(MethodId::Re, Variant::AvgMc),
        MethodVariant::new(MethodId::Ldi, Variant::Single),
        MethodVariant::new(MethodId::Ldi, Variant::AvgMc),
    ];

    /// Row label as used in fixture files: `AFD`, `AFD_MC_AV`, `AFD_ED_AV`,
    /// `RE`, `RE_AV`, `LDI`, `LDI_AV`. RE and LDI averaged with uniform
    /// random steps carry no strategy infix.
    pub fn label(&self) -> String {
        let m = self.method.label();
        match (self.method, self.variant) {
            (_, Variant::Single) => m.to_string(),
            (MethodId::Re | MethodId::Ldi, Variant::AvgMc) => format!("{m}_AV"),
            (_, Variant::AvgMc) => format!("{m}_MC_AV"),
            (_, Variant::AvgEd) => format!("{m}_ED_AV"),
            (_, Variant::AvgLds) => format!("{m}_LDS_AV"),
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        let bad = || DiffError::InvalidArgument(format!("unknown row label '{label}'"));
        let mut parts = label.split('_');
        let method: MethodId = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let rest: Vec<&str> = parts.collect();
        let variant = match rest.as_slice() {
            [] => Variant::Single,
            ["AV"] | ["MC", "AV"] => Variant::AvgMc,
            ["ED", "AV"] => Variant::AvgEd,
            ["LDS", "AV"] => Variant::AvgLds,
            _ => return Err(bad()),
        };
        Ok(Self { method, variant })
    }

    pub fn single(&self) -> Self {
        Self {
            method: self.method,
            variant: Variant::Single,
        }
    }
}

impl fmt::Display for MethodVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// One table cell: an absolute error, or a flag explaining why there is none.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Value(f64),
    Flagged(String),
}

impl Cell {
    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(*v),
            Cell::Flagged(_) => None,
        }
    }

    pub fn is_flagged(&self) -> bool {
        matches!(self, Cell::Flagged(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub title: String,
    pub rows: Vec<MethodVariant>,
    /// Step sizes, one per column.
    pub h_values: Vec<f64>,
    /// `cells[row][col]`
    pub cells: Vec<Vec<Cell>>,
    /// Column of the smallest error in each row, once marked.
    pub minima: Vec<Option<usize>>,
}

impl ErrorTable {
    pub fn new(
        title: impl Into<String>,
        rows: Vec<MethodVariant>,
        h_values: Vec<f64>,
        cells: Vec<Vec<Cell>>,
    ) -> Self {
        let minima = vec![None; rows.len()];
        Self {
            title: title.into(),
            rows,
            h_values,
            cells,
            minima,
        }
    }

    pub fn row_index(&self, mv: &MethodVariant) -> Option<usize> {
        self.rows.iter().position(|r| r == mv)
    }

    pub fn row(&self, mv: &MethodVariant) -> Option<&[Cell]> {
        self.row_index(mv).map(|i| self.cells[i].as_slice())
    }

    pub fn flagged_count(&self) -> usize {
        self.cells
            .iter()
            .flatten()
            .filter(|c| c.is_flagged())
            .count()
    }

    fn same_shape(&self, other: &ErrorTable) -> bool {
        self.rows == other.rows && self.h_values == other.h_values
    }
}

/// Absolute error `|approx - truth|`; a non-finite input yields a flagged
/// cell rather than an error.
pub fn abs_error(approx: f64, truth: f64) -> Cell {
    if approx.is_finite() && truth.is_finite() {
        Cell::Value((approx - truth).abs())
    } else {
        Cell::Flagged(format!("non-finite value ({approx} vs {truth})"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case_ids: Vec<u8>,
    pub variants: Vec<MethodVariant>,
    /// Strictly decreasing.
    pub h_grid: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub qmode: QuadratureMode,
    pub smode: LdiSignMode,
    pub output_format: OutputFormat,
}

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const PAPER_SCALE_SAMPLES: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 20_190_101;

/// `1e-3, 1e-4, ..., 1e-8`
pub fn default_h_grid() -> Vec<f64> {
    vec![1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8]
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case_ids: (1..=19).collect(),
            variants: MethodVariant::STANDARD_ROWS.to_vec(),
            h_grid: default_h_grid(),
            n_samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            qmode: QuadratureMode::CorrectedComposite,
            smode: LdiSignMode::Corrected,
            output_format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(DiffError::InvalidArgument(m));
        if self.case_ids.is_empty() {
            return invalid("no cases selected".into());
        }
        for (i, id) in self.case_ids.iter().enumerate() {
            if case(*id).is_none() {
                return invalid(format!("case {id} is not in 1..=19"));
            }
            if self.case_ids[..i].contains(id) {
                return invalid(format!("case {id} listed twice"));
            }
        }
        if self.variants.is_empty() {
            return invalid("no method variants selected".into());
        }
        if self.h_grid.is_empty() {
            return invalid("empty step grid".into());
        }
        if self.h_grid.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return invalid("step sizes must be positive and finite".into());
        }
        if self.h_grid.windows(2).any(|w| w[1] >= w[0]) {
            return invalid("step grid must be strictly decreasing".into());
        }
        if self.n_samples == 0 {
            return invalid("sample count must be at least 1".into());
        }
        for mv in &self.variants {
            mv.variant.strategy(self.n_samples, 0).validate()?;
        }
        Ok(())
    }

    fn strategy_for(&self, case_id: u8, mv: &MethodVariant, h: f64) -> StepStrategy {
        let key = SubstreamKey {
            case_id: case_id as u64,
            method: mv.method,
            strategy_tag: mv.variant.tag(),
            h,
        };
        mv.variant
            .strategy(self.n_samples, derive_seed(self.seed, &key))
    }
}

/// Runs every configured (variant, h) cell for an arbitrary function.
///
/// Estimator failures (domain errors, non-finite estimates) end up as
/// flagged cells. The result depends only on the arguments, not on thread
/// scheduling.
pub fn run_function<F: RealFunction + ?Sized>(
    case_id: u8,
    title: impl Into<String>,
    f: &F,
    x: f64,
    truth: f64,
    cfg: &RunConfig,
) -> ErrorTable {
    let ncols = cfg.h_grid.len();
    let flat: Vec<Cell> = (0..cfg.variants.len() * ncols)
        .into_par_iter()
        .map(|k| {
            let mv = &cfg.variants[k / ncols];
            let h = cfg.h_grid[k % ncols];
            let strategy = cfg.strategy_for(case_id, mv, h);
            match averaged_derivative(mv.method, f, x, h, &strategy, cfg.qmode, cfg.smode) {
                Ok(r) => abs_error(r.mean, truth),
                Err(e) => Cell::Flagged(e.to_string()),
            }
        })
        .collect();
    let cells = flat.chunks(ncols).map(<[Cell]>::to_vec).collect();
    ErrorTable::new(title, cfg.variants.clone(), cfg.h_grid.clone(), cells)
}

pub fn case_title(case_id: u8) -> String {
    format!("Case number: {case_id}")
}

/// One error table for `case`, minima marked.
pub fn run_case(case: &FunctionCase, cfg: &RunConfig) -> Result<ErrorTable> {
    cfg.validate()?;
    let truth = case.d1_exact()?;
    let table = run_function(
        case.case_id,
        case_title(case.case_id),
        &case.function,
        case.x,
        truth,
        cfg,
    );
    Ok(mark_minima(table))
}

/// Cell-wise arithmetic mean over tables with identical rows and columns.
pub fn aggregate_case_average(tables: &[ErrorTable]) -> Result<ErrorTable> {
    let first = tables
        .first()
        .ok_or_else(|| DiffError::Aggregation("no tables given".into()))?;
    if let Some(t) = tables.iter().find(|t| !t.same_shape(first)) {
        return Err(DiffError::Aggregation(format!(
            "'{}' does not share rows and columns with '{}'",
            t.title, first.title
        )));
    }
    let n = tables.len() as f64;
    let cells = (0..first.rows.len())
        .map(|r| {
            (0..first.h_values.len())
                .map(|c| {
                    let flagged = tables.iter().filter(|t| t.cells[r][c].is_flagged()).count();
                    if flagged > 0 {
                        return Cell::Flagged(format!(
                            "{flagged} of {} inputs flagged",
                            tables.len()
                        ));
                    }
                    let sum: CompensatedSum = tables
                        .iter()
                        .filter_map(|t| t.cells[r][c].value())
                        .collect();
                    Cell::Value(sum.total() / n)
                })
                .collect()
        })
        .collect();
    let table = ErrorTable::new(
        "Case-averaged results",
        first.rows.clone(),
        first.h_values.clone(),
        cells,
    );
    Ok(mark_minima(table))
}

fn argmin(row: &[Cell]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in row
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.value().map(|v| (i, v)))
    {
        // strict comparison keeps the leftmost (largest h) on ties
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Records, per row, the column holding the smallest error.
pub fn mark_minima(mut table: ErrorTable) -> ErrorTable {
    table.minima = table.cells.iter().map(|row| argmin(row)).collect();
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shift {
    /// The averaged variant is most accurate at a smaller step.
    Smaller,
    Equal,
    Larger,
}

impl Shift {
    pub fn as_str(self) -> &'static str {
        match self {
            Shift::Smaller => "smaller",
            Shift::Equal => "equal",
            Shift::Larger => "larger",
        }
    }
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftEntry {
    pub single: MethodVariant,
    pub averaged: MethodVariant,
    pub single_h: f64,
    pub averaged_h: f64,
    pub shift: Shift,
}

/// Compares the best step of each row of `averaged` with the best step of
/// the single-step row of the same method in `single`.
///
/// Averaged rows are paired with the `Single` row of their method; a
/// `Single` row in `averaged` is paired with itself. Rows without a partner
/// or without any finite cell are skipped.
pub fn optimal_shift_report(single: &ErrorTable, averaged: &ErrorTable) -> Result<Vec<ShiftEntry>> {
    if single.h_values != averaged.h_values {
        return Err(DiffError::InvalidArgument(
            "tables have different step columns".into(),
        ));
    }
    let mut out = Vec::new();
    for (row, mv) in averaged.rows.iter().enumerate() {
        let partner = mv.single();
        let Some(srow) = single.row(&partner) else {
            continue;
        };
        let (Some(si), Some(ai)) = (argmin(srow), argmin(&averaged.cells[row])) else {
            continue;
        };
        let (single_h, averaged_h) = (single.h_values[si], averaged.h_values[ai]);
        let shift = if averaged_h < single_h {
            Shift::Smaller
        } else if averaged_h > single_h {
            Shift::Larger
        } else {
            Shift::Equal
        };
        out.push(ShiftEntry {
            single: partner,
            averaged: *mv,
            single_h,
            averaged_h,
            shift,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub case_id: u8,
    pub log10_d1: f64,
    pub log10_d2: f64,
}

/// Position of each case in the (|f'|, |f''|) plane, from the computed
/// derivatives.
pub fn scatter_data(cases: &[FunctionCase]) -> Vec<ScatterPoint> {
    cases
        .iter()
        .map(|c| ScatterPoint {
            case_id: c.case_id,
            log10_d1: c.d1_exact().map_or(f64::NAN, |v| v.abs().log10()),
            log10_d2: c.d2_exact().map_or(f64::NAN, |v| v.abs().log10()),
        })
        .collect()
}

/// Everything a benchmark run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutput {
    pub case_tables: Vec<(u8, ErrorTable)>,
    pub case_averaged: ErrorTable,
    /// Per case: shift of each row's best step relative to its single-step row.
    pub shifts: Vec<(u8, Vec<ShiftEntry>)>,
}

impl BenchOutput {
    pub fn flagged_count(&self) -> usize {
        self.case_tables
            .iter()
            .map(|(_, t)| t.flagged_count())
            .sum()
    }
}

pub fn run_bench(cfg: &RunConfig) -> Result<BenchOutput> {
    cfg.validate()?;
    let case_tables = cfg
        .case_ids
        .par_iter()
        .map(|&id| {
            let c = case(id).expect("validated");
            run_case(c, cfg).map(|t| (id, t))
        })
        .collect::<Result<Vec<_>>>()?;
    let tables: Vec<ErrorTable> = case_tables.iter().map(|(_, t)| t.clone()).collect();
    let case_averaged = aggregate_case_average(&tables)?;
    let shifts = case_tables
        .iter()
        .map(|(id, t)| {
            let entries = optimal_shift_report(t, t)?
                .into_iter()
                .filter(|e| e.averaged.variant.is_averaged())
                .collect();
            Ok((*id, entries))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchOutput {
        case_tables,
        case_averaged,
        shifts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffcore::afd;
    use crate::functions::{case_table, FunctionId};
    use proptest::prelude::*;

    fn value_table(rows: Vec<MethodVariant>, h: Vec<f64>, values: Vec<Vec<f64>>) -> ErrorTable {
        let cells = values
            .into_iter()
            .map(|r| r.into_iter().map(Cell::Value).collect())
            .collect();
        ErrorTable::new("t", rows, h, cells)
    }

    #[test]
    fn abs_error_examples() {
        assert_eq!(abs_error(2.0, 2.0), Cell::Value(0.0));
        assert_eq!(abs_error(1.5, 1.0), Cell::Value(0.5));
        let truth = -(0.1f64).sin();
        assert_eq!(
            abs_error(-0.0998, truth),
            Cell::Value((-0.0998 + (0.1f64).sin()).abs())
        );
        assert!(abs_error(f64::INFINITY, 1.0).is_flagged());
        assert!(abs_error(f64::NAN, 1.0).is_flagged());
    }

    #[test]
    fn labels_round_trip() {
        for mv in MethodVariant::STANDARD_ROWS {
            assert_eq!(MethodVariant::from_label(&mv.label()).unwrap(), mv);
        }
        let labels: Vec<String> = MethodVariant::STANDARD_ROWS
            .iter()
            .map(|m| m.label())
            .collect();
        assert_eq!(
            labels,
            [
                "AFD",
                "AFD_MC_AV",
                "AFD_ED_AV",
                "RE",
                "RE_AV",
                "LDI",
                "LDI_AV"
            ]
        );
        assert_eq!(
            MethodVariant::from_label("RE_LDS_AV").unwrap(),
            MethodVariant::new(MethodId::Re, Variant::AvgLds)
        );
        assert!(MethodVariant::from_label("FOO").is_err());
        assert!(MethodVariant::from_label("AFD_XX").is_err());
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = [
            RunConfig {
                case_ids: vec![],
                ..Default::default()
            },
            RunConfig {
                case_ids: vec![20],
                ..Default::default()
            },
            RunConfig {
                case_ids: vec![3, 3],
                ..Default::default()
            },
            RunConfig {
                h_grid: vec![1e-3, 1e-3],
                ..Default::default()
            },
            RunConfig {
                h_grid: vec![1e-4, 1e-3],
                ..Default::default()
            },
            RunConfig {
                h_grid: vec![-1e-3],
                ..Default::default()
            },
            RunConfig {
                n_samples: 0,
                ..Default::default()
            },
            // equidistant averaging needs two samples
            RunConfig {
                n_samples: 1,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn ln_case_single_afd_cell() {
        // closed form: (ln(1+h) - ln(1-h))/2h - 1 = h²/3 + h⁴/5 + ...
        let cfg = RunConfig {
            case_ids: vec![16],
            variants: vec![MethodVariant::new(MethodId::Afd, Variant::Single)],
            h_grid: vec![1e-3],
            ..Default::default()
        };
        let t = run_case(case(16).unwrap(), &cfg).unwrap();
        let v = t.cells[0][0].value().unwrap();
        assert!((v - 3.33333533333476e-7).abs() < 1e-12, "{v:e}");
    }

    #[test]
    fn quadratic_synthetic_case_is_exact() {
        let f = |t: f64| t * t;
        let variants = MethodId::ALL
            .iter()
            .flat_map(|&m| Variant::ALL.iter().map(move |&v| MethodVariant::new(m, v)))
            .collect();
        // coarse steps so that rounding stays far below the tolerance
        let cfg = RunConfig {
            variants,
            n_samples: 200,
            h_grid: vec![0.25, 0.125, 0.0625],
            ..Default::default()
        };
        let t = run_function(99, "x^2", &f, 0.7, 1.4, &cfg);
        for row in &t.cells {
            for c in row {
                assert!(c.value().unwrap() <= 1e-12, "{c:?}");
            }
        }
    }

    #[test]
    fn domain_failures_become_flags() {
        let cfg = RunConfig {
            variants: vec![MethodVariant::new(MethodId::Re, Variant::Single)],
            h_grid: vec![1.0, 1e-3],
            ..Default::default()
        };
        let t = run_function(14, "ln", &FunctionId::Ln, 0.03, 1.0 / 0.03, &cfg);
        assert!(t.cells[0][0].is_flagged());
        assert!(!t.cells[0][1].is_flagged());
        assert_eq!(t.flagged_count(), 1);
    }

    #[test]
    fn run_case_is_deterministic() {
        let cfg = RunConfig {
            n_samples: 500,
            ..Default::default()
        };
        let c = case(10).unwrap();
        assert_eq!(run_case(c, &cfg).unwrap(), run_case(c, &cfg).unwrap());
        let other = RunConfig {
            seed: cfg.seed + 1,
            ..cfg.clone()
        };
        assert_ne!(run_case(c, &cfg).unwrap(), run_case(c, &other).unwrap());
    }

    #[test]
    fn single_samples_equal_direct_calls() {
        let cfg = RunConfig {
            variants: vec![MethodVariant::new(MethodId::Afd, Variant::Single)],
            n_samples: 1,
            ..Default::default()
        };
        let c = case(10).unwrap();
        let t = run_case(c, &cfg).unwrap();
        let truth = c.d1_exact().unwrap();
        for (col, &h) in cfg.h_grid.iter().enumerate() {
            let direct = (afd(&c.function, c.x, h).unwrap() - truth).abs();
            assert_eq!(t.cells[0][col], Cell::Value(direct));
        }
    }

    #[test]
    fn aggregate_mean_and_idempotence() {
        let row = vec![MethodVariant::new(MethodId::Afd, Variant::Single)];
        let a = value_table(row.clone(), vec![1e-3], vec![vec![0.25]]);
        let agg = aggregate_case_average(&[a.clone(), a.clone()]).unwrap();
        assert_eq!(agg.cells[0][0], Cell::Value(0.25));
        let b = value_table(row.clone(), vec![1e-3], vec![vec![0.75]]);
        assert_eq!(
            aggregate_case_average(&[a.clone(), b]).unwrap().cells[0][0],
            Cell::Value(0.5)
        );
        let c = value_table(row, vec![1e-4], vec![vec![0.75]]);
        assert!(matches!(
            aggregate_case_average(&[a, c]),
            Err(DiffError::Aggregation(_))
        ));
        assert!(aggregate_case_average(&[]).is_err());
    }

    #[test]
    fn aggregate_propagates_flags() {
        let row = vec![MethodVariant::new(MethodId::Afd, Variant::Single)];
        let a = value_table(row.clone(), vec![1e-3], vec![vec![0.25]]);
        let mut b = a.clone();
        b.cells[0][0] = Cell::Flagged("x".into());
        assert!(aggregate_case_average(&[a, b]).unwrap().cells[0][0].is_flagged());
    }

    #[test]
    fn minima_ties_go_left() {
        let row = vec![MethodVariant::new(MethodId::Afd, Variant::Single)];
        let t = mark_minima(value_table(
            row.clone(),
            vec![1e-3, 1e-4, 1e-5],
            vec![vec![2.0, 2.0, 2.0]],
        ));
        assert_eq!(t.minima, vec![Some(0)]);
        let t = mark_minima(value_table(
            row,
            vec![1e-3, 1e-4, 1e-5],
            vec![vec![3.0, 1.0, 1.0]],
        ));
        assert_eq!(t.minima, vec![Some(1)]);
    }

    #[test]
    fn minima_skip_flags() {
        let row = vec![MethodVariant::new(MethodId::Afd, Variant::Single)];
        let mut t = value_table(row, vec![1e-3, 1e-4], vec![vec![0.0, 1.0]]);
        t.cells[0][0] = Cell::Flagged("x".into());
        assert_eq!(mark_minima(t.clone()).minima, vec![Some(1)]);
        t.cells[0][1] = Cell::Flagged("x".into());
        assert_eq!(mark_minima(t).minima, vec![None]);
    }

    #[test]
    fn identical_tables_have_no_shift() {
        let rows = vec![
            MethodVariant::new(MethodId::Afd, Variant::Single),
            MethodVariant::new(MethodId::Re, Variant::Single),
            MethodVariant::new(MethodId::Ldi, Variant::Single),
        ];
        let t = value_table(
            rows,
            vec![1e-3, 1e-4, 1e-5],
            vec![
                vec![3.0, 1.0, 2.0],
                vec![1.0, 2.0, 3.0],
                vec![3.0, 2.0, 1.0],
            ],
        );
        let report = optimal_shift_report(&t, &t).unwrap();
        assert_eq!(report.len(), 3);
        assert!(report.iter().all(|e| e.shift == Shift::Equal));
    }

    #[test]
    fn shift_requires_matching_columns() {
        let rows = vec![MethodVariant::new(MethodId::Afd, Variant::Single)];
        let a = value_table(rows.clone(), vec![1e-3], vec![vec![1.0]]);
        let b = value_table(rows, vec![1e-4], vec![vec![1.0]]);
        assert!(optimal_shift_report(&a, &b).is_err());
    }

    #[test]
    fn scatter_points() {
        let pts = scatter_data(case_table());
        assert_eq!(pts.len(), 19);
        let p16 = pts[15];
        assert_eq!((p16.case_id, p16.log10_d1, p16.log10_d2), (16, 0.0, 0.0));
        let p15 = pts[14];
        assert!((p15.log10_d1 - 992.2f64.log10()).abs() < 1e-4);
        assert!((p15.log10_d2 - 992.2f64.log10()).abs() < 1e-4);
        let p7 = pts[6];
        assert!((p7.log10_d1 + 3.0).abs() < 0.01 && (p7.log10_d2 + 3.0).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn minima_are_true_minima(rows in prop::collection::vec(prop::collection::vec(0.0f64..1e3, 6), 1..8)) {
            let mvs = (0..rows.len()).map(|_| MethodVariant::new(MethodId::Afd, Variant::Single)).collect();
            let t = mark_minima(value_table(mvs, default_h_grid(), rows.clone()));
            for (r, row) in rows.iter().enumerate() {
                let m = t.minima[r].unwrap();
                let scan = row.iter().cloned().fold(f64::INFINITY, f64::min);
                prop_assert_eq!(row[m], scan);
                prop_assert!(row[..m].iter().all(|&v| v > scan));
            }
        }
    }
}
