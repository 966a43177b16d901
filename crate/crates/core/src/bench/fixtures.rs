//! Published error tables: loading, and the check that the printed
//! case-averaged table follows from the printed per-case tables.

use std::fs;
use std::path::Path;

use super::{
    aggregate_case_average, case_title, mark_minima, render::format_value, Cell, ErrorTable,
    MethodVariant,
};
use crate::error::{DiffError, Result};

macro_rules! appendix {
    ($($n:literal),*) => {
        [$(include_str!(concat!("../../data/appendix/case_", $n, ".csv"))),*]
    };
}

static APPENDIX: [&str; 19] = appendix!(
    "01", "02", "03", "04", "05", "06", "07", "08", "09", "10", "11", "12", "13", "14", "15", "16",
    "17", "18", "19"
);

/// The printed case-averaged table, rows in the usual order.
static PUBLISHED_CASE_AVERAGE: &str = "\
h,1e-3,1e-4,1e-5,1e-6,1e-7,1e-8
AFD,2.0e-3,2.0e-5,1.8e-7,3.0e-7,1.8e-6,6.3e-2
AFD_MC_AV,2.2e-3,2.2e-5,2.2e-7,2.3e-9,3.1e-9,5.1e-5
AFD_ED_AV,1.2e-3,1.2e-5,1.2e-7,1.7e-9,1.6e-9,1.0e-6
RE,6.9e-9,7.6e-9,7.1e-8,4.3e-7,2.4e-6,9.4e-2
RE_AV,1.1e-8,6.0e-12,4.2e-11,7.1e-10,1.0e-9,4.0e-5
LDI,1.2e-3,1.4e-5,7.2e-4,7.2e-2,5.5e0,1.2e7
LDI_AV,1.3e-3,1.3e-5,4.4e-7,9.3e-5,5.1e-3,8.0e3
";

/// Parses a CSV table as written by [`super::render`] in CSV mode.
/// `NaN` cells become flagged. Minima are marked.
pub fn parse_table(text: &str, title: &str) -> Result<ErrorTable> {
    let err = |msg: String| DiffError::InvalidArgument(format!("{title}: {msg}"));
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| err("empty table".into()))?;
    let mut cols = header.split(',');
    if cols.next() != Some("h") {
        return Err(err("header must start with 'h'".into()));
    }
    let h_values = cols
        .map(|s| s.parse::<f64>().map_err(|_| err(format!("bad step '{s}'"))))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for line in lines {
        let mut parts = line.split(',');
        let label = parts.next().unwrap_or_default();
        rows.push(MethodVariant::from_label(label)?);
        let row = parts
            .map(|s| match s {
                "NaN" => Ok(Cell::Flagged("not available".into())),
                _ => s
                    .parse::<f64>()
                    .map(Cell::Value)
                    .map_err(|_| err(format!("bad cell '{s}' in row {label}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != h_values.len() {
            return Err(err(format!(
                "row {label} has {} cells, expected {}",
                row.len(),
                h_values.len()
            )));
        }
        cells.push(row);
    }
    Ok(mark_minima(ErrorTable::new(title, rows, h_values, cells)))
}

/// The 19 published per-case tables, bundled with the crate.
pub fn appendix_tables() -> Vec<(u8, ErrorTable)> {
    APPENDIX
        .iter()
        .zip(1u8..)
        .map(|(text, id)| {
            (
                id,
                parse_table(text, &case_title(id)).expect("bundled tables parse"),
            )
        })
        .collect()
}

pub fn published_case_average() -> ErrorTable {
    parse_table(PUBLISHED_CASE_AVERAGE, "Case-averaged results").expect("bundled table parses")
}

/// Loads `case_XX.csv` for every case present in `dir`, ordered by id.
pub fn load_fixture_dir(dir: &Path) -> Result<Vec<(u8, ErrorTable)>> {
    let fixture = |path: &Path, msg: String| DiffError::Fixture {
        path: path.to_path_buf(),
        msg,
    };
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let Some(id) = name
            .strip_prefix("case_")
            .and_then(|s| s.strip_suffix(".csv"))
        else {
            continue;
        };
        let id: u8 = id
            .parse()
            .map_err(|_| fixture(&path, format!("bad case id in '{name}'")))?;
        let text = fs::read_to_string(&path)?;
        let table =
            parse_table(&text, &case_title(id)).map_err(|e| fixture(&path, e.to_string()))?;
        out.push((id, table));
    }
    if out.is_empty() {
        return Err(fixture(dir, "no case_XX.csv files".into()));
    }
    out.sort_by_key(|(id, _)| *id);
    Ok(out)
}

/// Half a unit in the second significant digit of a displayed value.
pub fn half_unit(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        0.05 * 10f64.powf(v.abs().log10().floor())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellCheck {
    pub row: MethodVariant,
    pub h: f64,
    /// Mean of the displayed per-case values.
    pub recomputed: f64,
    pub published: f64,
    /// Largest gap explainable by display rounding of inputs and output.
    pub tolerance: f64,
    /// The recomputed mean displays exactly as published.
    pub exact_display: bool,
}

impl CellCheck {
    pub fn consistent(&self) -> bool {
        (self.recomputed - self.published).abs() <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub cells: Vec<CellCheck>,
}

impl ConsistencyReport {
    pub fn consistent_count(&self) -> usize {
        self.cells.iter().filter(|c| c.consistent()).count()
    }

    pub fn exact_count(&self) -> usize {
        self.cells.iter().filter(|c| c.exact_display).count()
    }

    pub fn all_consistent(&self) -> bool {
        self.consistent_count() == self.cells.len()
    }

    /// Largest `|recomputed - published| / tolerance`.
    pub fn worst_ratio(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let gap = (c.recomputed - c.published).abs();
                if gap == 0.0 {
                    0.0
                } else {
                    gap / c.tolerance
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Averages the displayed per-case tables and compares every cell with the
/// displayed case-averaged table.
///
/// Inputs are already rounded to two significant digits, so an exact match
/// is not expected. A cell is consistent when the gap is within the sum of
/// the mean input half-unit and the published half-unit.
pub fn check_case_average(
    cases: &[ErrorTable],
    published: &ErrorTable,
) -> Result<ConsistencyReport> {
    let recomputed = aggregate_case_average(cases)?;
    if recomputed.rows != published.rows || recomputed.h_values != published.h_values {
        return Err(DiffError::Aggregation(
            "published table has different rows or columns".into(),
        ));
    }
    let n = cases.len() as f64;
    let mut cells = Vec::new();
    for (r, row) in published.rows.iter().enumerate() {
        for (c, &h) in published.h_values.iter().enumerate() {
            let (Some(mean), Some(pubv)) = (
                recomputed.cells[r][c].value(),
                published.cells[r][c].value(),
            ) else {
                return Err(DiffError::Aggregation(format!(
                    "{row} at h={h:e} is not a number"
                )));
            };
            let input_half = cases
                .iter()
                .filter_map(|t| t.cells[r][c].value())
                .map(half_unit)
                .sum::<f64>()
                / n;
            cells.push(CellCheck {
                row: *row,
                h,
                recomputed: mean,
                published: pubv,
                tolerance: input_half + half_unit(pubv),
                exact_display: format_value(mean) == format_value(pubv),
            });
        }
    }
    Ok(ConsistencyReport { cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::Variant;
    use crate::diffcore::MethodId;

    #[test]
    fn bundled_tables_parse() {
        let tables = appendix_tables();
        assert_eq!(tables.len(), 19);
        for (_, t) in &tables {
            assert_eq!(t.rows, MethodVariant::STANDARD_ROWS);
            assert_eq!(t.h_values, super::super::default_h_grid());
            assert_eq!(t.flagged_count(), 0);
        }
        let c1 = &tables[0].1;
        let afd = c1
            .row(&MethodVariant::new(MethodId::Afd, Variant::Single))
            .unwrap();
        assert_eq!(afd[0], Cell::Value(2.1e-4));
        assert_eq!(published_case_average().cells[5][5], Cell::Value(1.2e7));
    }

    #[test]
    fn half_units() {
        assert_eq!(half_unit(0.0), 0.0);
        assert!((half_unit(2.0e-3) - 5e-5).abs() < 1e-18);
        assert!((half_unit(9.9e-3) - 5e-5).abs() < 1e-18);
        assert!((half_unit(5.5) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn parse_rejects_malformed() {
        assert!(parse_table("", "t").is_err());
        assert!(parse_table("x,1e-3\nAFD,1.0", "t").is_err());
        assert!(parse_table("h,1e-3\nAFD,1.0,2.0", "t").is_err());
        assert!(parse_table("h,1e-3\nFOO,1.0", "t").is_err());
        assert!(parse_table("h,1e-3\nAFD,abc", "t").is_err());
        assert!(parse_table("h,1e-3\nAFD,NaN", "t").unwrap().cells[0][0].is_flagged());
    }

    #[test]
    fn exact_inputs_are_consistent() {
        let t = parse_table("h,1e-3\nAFD,2.0e-3", "a").unwrap();
        let u = parse_table("h,1e-3\nAFD,4.0e-3", "b").unwrap();
        let p = parse_table("h,1e-3\nAFD,3.0e-3", "p").unwrap();
        let r = check_case_average(&[t.clone(), u.clone()], &p).unwrap();
        assert!(r.all_consistent());
        assert_eq!(r.exact_count(), 1);
        let wrong = parse_table("h,1e-3\nAFD,3.2e-3", "p").unwrap();
        assert!(!check_case_average(&[t, u], &wrong)
            .unwrap()
            .all_consistent());
    }
}
