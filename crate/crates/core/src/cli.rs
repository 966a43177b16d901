//! Command-line interface: argument parsing and command execution.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::averaging::averaged_derivative;
use crate::bench::fixtures::{check_case_average, load_fixture_dir, published_case_average};
use crate::bench::{
    aggregate_case_average, default_h_grid, render, render_scatter, render_shift_report, run_bench,
    scatter_data, MethodVariant, OutputFormat, RunConfig, Variant, DEFAULT_SAMPLES, DEFAULT_SEED,
    PAPER_SCALE_SAMPLES,
};
use crate::diffcore::{LdiSignMode, MethodId, QuadratureMode};
use crate::error::DiffError;
use crate::functions::{case_table, validate_case_table, FunctionId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "diffavg",
    version,
    about = "Numerical differentiation with step-size averaging"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the error-table benchmark over the case panel.
    Bench(BenchArgs),
    /// Estimate one derivative and report its error.
    Eval(EvalArgs),
    /// Recompute |f'| and |f''| for every case and compare with the printed table.
    Validate,
    /// Average per-case fixture tables into a case-averaged table.
    Aggregate(AggregateArgs),
    /// Emit log10 |f'| and log10 |f''| for every case.
    Scatter(ScatterArgs),
}

#[derive(Debug, Args)]
struct NumericArgs {
    /// Boole weight set used by LDI: corrected or paper.
    #[arg(long, default_value = "corrected", value_parser = parse_from_str::<QuadratureMode>)]
    quadrature: QuadratureMode,
    /// LDI kernel sign: corrected or paper.
    #[arg(long = "ldi-sign", default_value = "corrected", value_parser = parse_from_str::<LdiSignMode>)]
    ldi_sign: LdiSignMode,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated case ids [default: 1..19].
    #[arg(long, value_delimiter = ',')]
    cases: Vec<u8>,
    /// Comma-separated methods: afd, re, ldi.
    #[arg(long, value_delimiter = ',', value_parser = parse_from_str::<MethodId>)]
    methods: Vec<MethodId>,
    /// Comma-separated variants: single, mc, ed, lds.
    #[arg(long, value_delimiter = ',', value_parser = parse_from_str::<Variant>)]
    variants: Vec<Variant>,
    /// Step grid as start:stop:factor or a comma list [default: 1e-3:1e-8:10].
    #[arg(long = "h-grid", value_parser = parse_h_grid)]
    h_grid: Option<HGrid>,
    /// Samples per averaged estimate.
    #[arg(long, default_value_t = DEFAULT_SAMPLES, conflicts_with = "paper_scale")]
    samples: usize,
    /// Master seed for all random substreams.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    numeric: NumericArgs,
    /// Table format: csv or md.
    #[arg(long, default_value = "csv", value_parser = parse_from_str::<OutputFormat>)]
    format: OutputFormat,
    /// Directory for output files; tables go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use 10^6 samples per averaged estimate.
    #[arg(long = "paper-scale")]
    paper_scale: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Function: cos, exp, ln, atan, laguerre7.
    #[arg(long = "fn", value_parser = parse_from_str::<FunctionId>)]
    function: FunctionId,
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, default_value = "afd", value_parser = parse_from_str::<MethodId>)]
    method: MethodId,
    #[arg(long, default_value = "single", value_parser = parse_from_str::<Variant>)]
    variant: Variant,
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    numeric: NumericArgs,
}

#[derive(Debug, Args)]
struct AggregateArgs {
    /// Directory holding case_XX.csv tables.
    #[arg(long)]
    fixtures: PathBuf,
    #[arg(long, default_value = "csv", value_parser = parse_from_str::<OutputFormat>)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScatterArgs {
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
struct HGrid(Vec<f64>);

fn parse_from_str<T: std::str::FromStr<Err = DiffError>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: DiffError| e.to_string())
}

/// Strips accumulated rounding so that `1e-3 / 10^5` prints as `1e-8`.
fn tidy(v: f64) -> f64 {
    format!("{v:.14e}").parse().unwrap_or(v)
}

fn parse_h_grid(s: &str) -> Result<HGrid, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{t}' is not a number"))
    };
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, factor] = parts.as_slice() else {
            return Err("expected start:stop:factor".into());
        };
        let (start, stop, factor) = (num(start)?, num(stop)?, num(factor)?);
        if !(start > 0.0 && stop > 0.0 && factor > 1.0 && stop <= start) {
            return Err("need 0 < stop <= start and factor > 1".into());
        }
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let h = tidy(start / factor.powi(k));
            if h < stop * (1.0 - 1e-9) {
                break;
            }
            if out.len() >= 1000 {
                return Err("grid has more than 1000 steps".into());
            }
            out.push(h);
            k += 1;
        }
        out
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    Ok(HGrid(grid))
}

/// A fully parsed invocation.
#[derive(Debug, Clone, PartialEq)]
pub enum CliCommand {
    Bench {
        config: RunConfig,
        out: Option<PathBuf>,
    },
    Eval(EvalRequest),
    Validate,
    Aggregate {
        fixture_dir: PathBuf,
        format: OutputFormat,
        out: Option<PathBuf>,
    },
    Scatter {
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRequest {
    pub function: FunctionId,
    pub x: f64,
    pub method: MethodId,
    pub variant: Variant,
    pub h: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub qmode: QuadratureMode,
    pub smode: LdiSignMode,
}

/// Table rows for a bench run.
///
/// With neither list the seven standard rows are used; with methods only,
/// those rows are filtered; with variants given, every selected method is
/// crossed with every selected variant.
pub fn select_rows(methods: &[MethodId], variants: &[Variant]) -> Vec<MethodVariant> {
    if variants.is_empty() {
        return MethodVariant::STANDARD_ROWS
            .into_iter()
            .filter(|mv| methods.is_empty() || methods.contains(&mv.method))
            .collect();
    }
    let methods = if methods.is_empty() {
        &MethodId::ALL[..]
    } else {
        methods
    };
    let mut rows = Vec::new();
    for &m in methods {
        for &v in variants {
            let mv = MethodVariant::new(m, v);
            if !rows.contains(&mv) {
                rows.push(mv);
            }
        }
    }
    rows
}

/// Parses arguments (without the program name).
pub fn parse<I, T>(args: I) -> Result<CliCommand, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("diffavg"))
        .chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv)?;
    let invalid = |msg: String| clap::Error::raw(ErrorKind::ValueValidation, format!("{msg}\n"));
    Ok(match cli.command {
        Command::Bench(a) => {
            let config = RunConfig {
                case_ids: if a.cases.is_empty() {
                    (1..=19).collect()
                } else {
                    a.cases
                },
                variants: select_rows(&a.methods, &a.variants),
                h_grid: a.h_grid.map_or_else(default_h_grid, |g| g.0),
                n_samples: if a.paper_scale {
                    PAPER_SCALE_SAMPLES
                } else {
                    a.samples
                },
                seed: a.seed,
                qmode: a.numeric.quadrature,
                smode: a.numeric.ldi_sign,
                output_format: a.format,
            };
            config.validate().map_err(|e| invalid(e.to_string()))?;
            CliCommand::Bench { config, out: a.out }
        }
        Command::Eval(a) => {
            a.variant
                .strategy(a.samples, a.seed)
                .validate()
                .map_err(|e| invalid(format!("--samples: {e}")))?;
            if !(a.h > 0.0 && a.h.is_finite()) {
                return Err(invalid(format!("--h: step must be positive, got {}", a.h)));
            }
            CliCommand::Eval(EvalRequest {
                function: a.function,
                x: a.x,
                method: a.method,
                variant: a.variant,
                h: a.h,
                n_samples: a.samples,
                seed: a.seed,
                qmode: a.numeric.quadrature,
                smode: a.numeric.ldi_sign,
            })
        }
        Command::Validate => CliCommand::Validate,
        Command::Aggregate(a) => CliCommand::Aggregate {
            fixture_dir: a.fixtures,
            format: a.format,
            out: a.out,
        },
        Command::Scatter(a) => CliCommand::Scatter { out: a.out },
    })
}

fn exit_code(e: &DiffError) -> i32 {
    match e {
        DiffError::Io(_) | DiffError::Fixture { .. } => EXIT_IO,
        DiffError::InvalidArgument(_) | DiffError::InvalidStrategy(_) => EXIT_USAGE,
        _ => EXIT_MISMATCH,
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> crate::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Executes a command, writing reports to `stdout`. Returns the exit status.
pub fn run(cmd: &CliCommand, stdout: &mut dyn Write) -> i32 {
    match execute(cmd, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cmd: &CliCommand, w: &mut dyn Write) -> crate::Result<i32> {
    match cmd {
        CliCommand::Bench { config, out } => {
            let result = run_bench(config)?;
            let fmt = config.output_format;
            let ext = fmt.extension();
            let shifts = render_shift_report(&result.shifts, fmt);
            match out {
                Some(dir) => {
                    for (id, t) in &result.case_tables {
                        write_file(dir, &format!("case_{id:02}.{ext}"), &render(t, fmt))?;
                    }
                    write_file(
                        dir,
                        &format!("case_averaged.{ext}"),
                        &render(&result.case_averaged, fmt),
                    )?;
                    write_file(dir, &format!("shift_report.{ext}"), &shifts)?;
                    writeln!(
                        w,
                        "wrote {} tables to {}",
                        result.case_tables.len() + 1,
                        dir.display()
                    )?;
                }
                None => {
                    for (id, t) in &result.case_tables {
                        writeln!(w, "# case {id}\n{}", render(t, fmt))?;
                    }
                    writeln!(w, "# case averaged\n{}", render(&result.case_averaged, fmt))?;
                    writeln!(w, "# shift report\n{shifts}")?;
                }
            }
            let flagged = result.flagged_count();
            if flagged > 0 {
                eprintln!("{flagged} cells flagged");
                return Ok(EXIT_MISMATCH);
            }
            Ok(EXIT_OK)
        }
        CliCommand::Eval(r) => {
            let strategy = r.variant.strategy(r.n_samples, r.seed);
            let truth = r.function.d1_exact(r.x)?;
            let est =
                averaged_derivative(r.method, &r.function, r.x, r.h, &strategy, r.qmode, r.smode)?;
            writeln!(w, "estimate,{:.17e}", est.mean)?;
            writeln!(w, "truth,{truth:.17e}")?;
            writeln!(w, "abs_error,{:.17e}", (est.mean - truth).abs())?;
            if r.variant.is_averaged() {
                writeln!(w, "samples,{}", est.n)?;
                writeln!(w, "sample_std,{:.6e}", est.sample_std)?;
                writeln!(w, "predicted_sigma,{:.6e}", est.predicted_sigma)?;
            }
            Ok(EXIT_OK)
        }
        CliCommand::Validate => {
            let checks = validate_case_table();
            let cases = case_table();
            for (c, chk) in cases.iter().zip(&checks) {
                writeln!(
                    w,
                    "case {:>2} {:<9} x={:<9} |f'|={:<12.6} (printed {}) |f''|={:<12.6} (printed {}) {}",
                    c.case_id,
                    c.function,
                    c.x,
                    chk.abs_d1,
                    c.abs_d1_published,
                    chk.abs_d2,
                    c.abs_d2_published,
                    if chk.pass() { "PASS" } else { "FAIL" }
                )?;
            }
            let passed = checks.iter().filter(|c| c.pass()).count();
            writeln!(w, "{passed}/{} cases agree", checks.len())?;
            Ok(if passed == checks.len() {
                EXIT_OK
            } else {
                EXIT_MISMATCH
            })
        }
        CliCommand::Aggregate {
            fixture_dir,
            format,
            out,
        } => {
            let loaded = load_fixture_dir(fixture_dir)?;
            let tables: Vec<_> = loaded.into_iter().map(|(_, t)| t).collect();
            let avg = aggregate_case_average(&tables)?;
            let text = render(&avg, *format);
            match out {
                Some(dir) => {
                    write_file(dir, &format!("case_averaged.{}", format.extension()), &text)?
                }
                None => write!(w, "{text}")?,
            }
            let published = published_case_average();
            if tables.len() == 19
                && avg.rows == published.rows
                && avg.h_values == published.h_values
            {
                let report = check_case_average(&tables, &published)?;
                eprintln!(
                    "{}/{} cells consistent with the published averages ({} display identically)",
                    report.consistent_count(),
                    report.cells.len(),
                    report.exact_count()
                );
                if !report.all_consistent() {
                    return Ok(EXIT_MISMATCH);
                }
            }
            Ok(EXIT_OK)
        }
        CliCommand::Scatter { out } => {
            let text = render_scatter(&scatter_data(case_table()));
            match out {
                Some(dir) => write_file(dir, "scatter.csv", &text)?,
                None => write!(w, "{text}")?,
            }
            Ok(EXIT_OK)
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse(args) {
        Ok(cmd) => run(&cmd, &mut std::io::stdout().lock()),
        Err(e) => {
            let _ = e.print();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bench(args: &[&str]) -> RunConfig {
        let mut v = vec!["bench"];
        v.extend_from_slice(args);
        match parse(v).unwrap() {
            CliCommand::Bench { config, .. } => config,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bench_flag_mapping() {
        let c = bench(&["--cases", "10", "--samples", "100", "--seed", "7"]);
        assert_eq!(c.case_ids, vec![10]);
        assert_eq!((c.n_samples, c.seed), (100, 7));
        assert_eq!(c.variants, MethodVariant::STANDARD_ROWS);
        assert_eq!(c.h_grid, default_h_grid());
        assert_eq!(c.qmode, QuadratureMode::CorrectedComposite);
        assert_eq!(bench(&["--paper-scale"]).n_samples, PAPER_SCALE_SAMPLES);
    }

    #[test]
    fn h_grid_forms() {
        assert_eq!(
            bench(&["--h-grid", "1e-3:1e-8:10"]).h_grid,
            default_h_grid()
        );
        assert_eq!(bench(&["--h-grid", "0.1,0.01"]).h_grid, vec![0.1, 0.01]);
        assert_eq!(
            bench(&["--h-grid", "1:0.25:2"]).h_grid,
            vec![1.0, 0.5, 0.25]
        );
        for bad in ["1e-3:1e-8", "1e-3:1e-8:1", "a,b", "1e-4,1e-3"] {
            assert!(parse(["bench", "--h-grid", bad]).is_err(), "{bad}");
        }
    }

    #[test]
    fn row_selection() {
        assert_eq!(select_rows(&[], &[]).len(), 7);
        let re = select_rows(&[MethodId::Re], &[]);
        assert_eq!(
            re.iter().map(|m| m.label()).collect::<Vec<_>>(),
            ["RE", "RE_AV"]
        );
        assert_eq!(select_rows(&[], &[Variant::Single]).len(), 3);
        assert_eq!(
            select_rows(
                &[MethodId::Afd, MethodId::Ldi],
                &[Variant::AvgEd, Variant::AvgLds]
            )
            .len(),
            4
        );
    }

    #[test]
    fn eval_flag_mapping() {
        let args =
            "eval --fn cos --x 1.47 --method afd --variant mc --h 1e-7 --samples 10000 --seed 1";
        match parse(args.split(' ')).unwrap() {
            CliCommand::Eval(r) => {
                assert_eq!(
                    (r.function, r.x, r.method, r.variant),
                    (FunctionId::Cos, 1.47, MethodId::Afd, Variant::AvgMc)
                );
                assert_eq!((r.h, r.n_samples, r.seed), (1e-7, 10000, 1));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse("eval --fn exp --x -6.9".split(' ')).is_ok());
    }

    #[test]
    fn aggregate_flag_mapping() {
        match parse(["aggregate", "--fixtures", "data/appendix"]).unwrap() {
            CliCommand::Aggregate { fixture_dir, .. } => {
                assert_eq!(fixture_dir, PathBuf::from("data/appendix"))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn usage_errors_name_the_flag() {
        let e = parse(["bench", "--samples", "many"]).unwrap_err();
        assert!(e.to_string().contains("--samples"), "{e}");
        let e = parse(["bench", "--quadrature", "simpson"]).unwrap_err();
        assert!(e.to_string().contains("--quadrature"), "{e}");
        assert!(parse(["bench", "--bogus"]).is_err());
        assert!(parse(["bench", "--cases", "20"]).is_err());
        assert!(parse(["bench", "--paper-scale", "--samples", "5"]).is_err());
        assert!(parse(Vec::<&str>::new()).is_err());
        assert!(parse([
            "eval",
            "--fn",
            "cos",
            "--x",
            "1",
            "--variant",
            "ed",
            "--samples",
            "1"
        ])
        .is_err());
    }
}
