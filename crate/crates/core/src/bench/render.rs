//! Text rendering of error tables, shift reports and scatter data.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{Cell, ErrorTable, ScatterPoint, ShiftEntry};
use crate::error::{DiffError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Markdown => "md",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = DiffError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            other => Err(DiffError::InvalidArgument(format!(
                "unknown format '{other}' (expected csv, markdown)"
            ))),
        }
    }
}

/// Two significant digits, e.g. `5.8e-4`.
pub fn format_value(v: f64) -> String {
    format!("{v:.1e}")
}

/// Step headers as `1e-3`.
pub fn format_h(h: f64) -> String {
    format!("{h:e}")
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Value(v) => format_value(*v),
        Cell::Flagged(_) => "NaN".to_string(),
    }
}

/// Renders one table. CSV has a `h` corner header; Markdown adds the title
/// and wraps each row's minimum in `**`.
pub fn render(table: &ErrorTable, format: OutputFormat) -> String {
    let headers: Vec<String> = table.h_values.iter().map(|&h| format_h(h)).collect();
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            out.push('h');
            for h in &headers {
                let _ = write!(out, ",{h}");
            }
            out.push('\n');
            for (r, mv) in table.rows.iter().enumerate() {
                out.push_str(&mv.label());
                for c in &table.cells[r] {
                    let _ = write!(out, ",{}", format_cell(c));
                }
                out.push('\n');
            }
        }
        OutputFormat::Markdown => {
            let _ = writeln!(out, "### {}\n", table.title);
            let _ = writeln!(out, "| h | {} |", headers.join(" | "));
            let _ = writeln!(out, "|---|{}", "---|".repeat(headers.len()));
            for (r, mv) in table.rows.iter().enumerate() {
                let cells: Vec<String> = table.cells[r]
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let s = format_cell(c);
                        if table.minima.get(r).copied().flatten() == Some(i) {
                            format!("**{s}**")
                        } else {
                            s
                        }
                    })
                    .collect();
                let _ = writeln!(out, "| {} | {} |", mv.label(), cells.join(" | "));
            }
        }
    }
    out
}

pub fn render_shift_report(entries: &[(u8, Vec<ShiftEntry>)], format: OutputFormat) -> String {
    let header = [
        "case",
        "single",
        "averaged",
        "single_h",
        "averaged_h",
        "shift",
    ];
    let rows = entries.iter().flat_map(|(id, es)| {
        es.iter().map(move |e| {
            [
                id.to_string(),
                e.single.label(),
                e.averaged.label(),
                format_h(e.single_h),
                format_h(e.averaged_h),
                e.shift.to_string(),
            ]
        })
    });
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            let _ = writeln!(out, "{}", header.join(","));
            for r in rows {
                let _ = writeln!(out, "{}", r.join(","));
            }
        }
        OutputFormat::Markdown => {
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for r in rows {
                let _ = writeln!(out, "| {} |", r.join(" | "));
            }
        }
    }
    out
}

pub fn render_scatter(points: &[ScatterPoint]) -> String {
    let mut out = String::from("case,log10_abs_d1,log10_abs_d2\n");
    for p in points {
        let _ = writeln!(out, "{},{:.6},{:.6}", p.case_id, p.log10_d1, p.log10_d2);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{mark_minima, MethodVariant, Variant};
    use crate::diffcore::MethodId;

    fn table() -> ErrorTable {
        let rows = vec![
            MethodVariant::new(MethodId::Afd, Variant::Single),
            MethodVariant::new(MethodId::Re, Variant::AvgMc),
        ];
        let cells = vec![
            vec![Cell::Value(5.8e-4), Cell::Value(5.8e-6)],
            vec![Cell::Value(0.0), Cell::Flagged("bad".into())],
        ];
        mark_minima(ErrorTable::new(
            "Case number: 1",
            rows,
            vec![1e-3, 1e-4],
            cells,
        ))
    }

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(5.8e-4), "5.8e-4");
        assert_eq!(format_value(0.00123), "1.2e-3");
        assert_eq!(format_value(1.2e7), "1.2e7");
        assert_eq!(format_value(0.0), "0.0e0");
        assert_eq!(format_h(1e-3), "1e-3");
    }

    #[test]
    fn csv_layout() {
        let s = render(&table(), OutputFormat::Csv);
        assert_eq!(s, "h,1e-3,1e-4\nAFD,5.8e-4,5.8e-6\nRE_AV,0.0e0,NaN\n");
    }

    #[test]
    fn markdown_bolds_minima() {
        let s = render(&table(), OutputFormat::Markdown);
        assert!(s.starts_with("### Case number: 1\n"));
        assert!(s.contains("| AFD | 5.8e-4 | **5.8e-6** |"));
        assert!(s.contains("| RE_AV | **0.0e0** | NaN |"));
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ErrorTable::new("empty", vec![], vec![1e-3], vec![]);
        assert_eq!(render(&t, OutputFormat::Csv), "h,1e-3\n");
        assert_eq!(render(&t, OutputFormat::Markdown).lines().count(), 4);
    }

    #[test]
    fn format_parsing() {
        assert_eq!("csv".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert_eq!(
            "markdown".parse::<OutputFormat>().unwrap(),
            OutputFormat::Markdown
        );
        assert!("json".parse::<OutputFormat>().is_err());
    }
}
