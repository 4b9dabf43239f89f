//! The `carroll` command line.
//!
//! Exit codes: 0 when every check in scope passes, 1 when a check fails
//! (the first violated invariant is named on stderr), 2 for unreadable
//! arguments, expressions or configuration files.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::forms::{CarrollBundle, Form, Monomial};
use crate::hodge::{star, star_sign};
use crate::horizon::{self, laplacian_table_suite, verify_hodge_table};
use crate::maxwell::{self, output, EmField, SimConfig, Simulation};
use crate::report::{Format, Record, Report};
use crate::scalar::{parse_scalar, SampleBox, ScalarExpr};
use crate::suite::{property_suite, SuiteOptions};

#[derive(Debug, Parser)]
#[command(name = "carroll", version, about = "Hodge operators and Carrollian electromagnetism on R^x-bundles")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for random inputs and sample points
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Pointwise tolerance; each command has its own default
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Sample points per check
    #[arg(long, global = true, default_value_t = 100)]
    pub samples: usize,
    /// Write the report (or CSV series) here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// text, json or csv
    #[arg(long, global = true, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Randomized forms/hodge property suite
    Verify {
        /// Base dimensions to test (default 1, 2, 3)
        #[arg(long = "n", value_delimiter = ',')]
        dims: Vec<usize>,
        /// Random draws per case
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
    /// Star of every basis monomial of a bundle
    StarTable {
        #[arg(long = "n", default_value_t = 3)]
        dim: usize,
        /// Base metric rows separated by `;`, entries by `,` (default: identity)
        #[arg(long)]
        metric: Option<String>,
        /// Connection components separated by `;` (default: zero)
        #[arg(long)]
        connection: Option<String>,
    },
    /// Run the Yee solver from a config file
    MaxwellRun {
        config: PathBuf,
        /// Directory for field dumps (default: next to --output, else `.`)
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
    /// Residuals of a symbolic field pair
    MaxwellCheck {
        /// `ex; ey; ez` in x1, x2, x3, t
        #[arg(long)]
        e: String,
        /// `bx; by; bz` in x1, x2, x3, t
        #[arg(long)]
        b: String,
    },
    /// Horizon star table and Laplacian table
    HorizonTable {
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        /// star, laplacian or both
        #[arg(long, default_value = "both")]
        table: String,
        /// Random forms per degree for the Laplacian table
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
    /// Scan separable ansatze t^lambda Y_lm for harmonic forms
    HorizonScan {
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        #[arg(long, default_value_t = 4)]
        l_max: usize,
        #[arg(long, default_value_t = 3)]
        lambda_max: u32,
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2, 3])]
        degrees: Vec<usize>,
    },
}

/// Runs the command line with explicit streams; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(report) => match report.first_failure() {
            None => 0,
            Some(r) => {
                let _ = writeln!(
                    err,
                    "check failed: [{}] {} (max deviation {:.3e}{})",
                    r.suite,
                    r.case,
                    r.max_deviation,
                    r.witness.as_deref().map(|w| format!(", witness {w}")).unwrap_or_default()
                );
                1
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

pub fn main() -> i32 {
    let (mut out, mut err) = (std::io::stdout().lock(), std::io::stderr().lock());
    run(std::env::args_os(), &mut out, &mut err)
}

fn emit(g: &Global, text: &str, out: &mut dyn Write) -> Result<()> {
    match &g.output {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Report> {
    let g = &cli.global;
    let report = match &cli.command {
        Command::Verify { dims, trials } => {
            let dims = if dims.is_empty() { vec![1, 2, 3] } else { dims.clone() };
            let opts = SuiteOptions { seed: g.seed, samples: g.samples, tol: g.tol.unwrap_or(1e-9), trials: *trials };
            let mut r = Report::default();
            for n in dims {
                if !(1..=6).contains(&n) {
                    return Err(Error::Config(format!("--n must lie in 1..=6, got {n}")));
                }
                r.extend(property_suite(n, &opts)?);
            }
            r
        }
        Command::StarTable { dim, metric, connection } => star_table(*dim, metric.as_deref(), connection.as_deref(), g)?,
        Command::MaxwellRun { config, dump_dir } => return maxwell_run(config, dump_dir.as_deref(), g, out),
        Command::MaxwellCheck { e, b } => maxwell_check(&EmField::parse(e, b)?, g)?,
        Command::HorizonTable { kappa, table, cases } => {
            let pts = horizon::angular_box().points(g.samples.max(50), g.seed);
            let mut r = Report::default();
            if !matches!(table.as_str(), "star" | "laplacian" | "both") {
                return Err(Error::Config(format!("--table must be star, laplacian or both, got `{table}`")));
            }
            if table != "laplacian" {
                let tol = g.tol.unwrap_or(1e-10);
                for e in verify_hodge_table(*kappa, &pts, tol)? {
                    let case = format!("kappa={kappa} {} = {} (computed {})", e.entry, e.expected, e.computed);
                    r.extend([Record::check("horizon-star", case, e.max_deviation, tol, None)]);
                }
            }
            if table != "star" {
                r.extend(laplacian_table_suite(*kappa, *cases, g.seed, &pts, g.tol.unwrap_or(1e-8))?);
            }
            r
        }
        Command::HorizonScan { kappa, l_max, lambda_max, degrees } => {
            let pts = horizon::angular_box().points(g.samples.max(50), g.seed);
            let hits = horizon::harmonic_scan(*kappa, degrees, *l_max, *lambda_max, &pts)?;
            let mut r = Report::default();
            for h in &hits {
                let case = format!(
                    "kappa={kappa} degree {} l={} m={} lambda={} slot {}: harmonic{}",
                    h.degree,
                    h.l,
                    h.m,
                    h.lambda,
                    h.component,
                    if h.table_confirms { ", table agrees" } else { ", table disagrees" }
                );
                r.extend([Record::note("horizon-scan", case, h.residual, None)]);
            }
            r.extend([Record::note("horizon-scan", format!("kappa={kappa}: {} harmonic ansatze", hits.len()), 0.0, None)]);
            r
        }
    };
    emit(g, &report.render(g.format)?, out)?;
    Ok(report)
}

fn parse_list(src: &str) -> Result<Vec<ScalarExpr>> {
    src.split(';').map(|s| parse_scalar(s.trim())).collect()
}

fn star_table(n: usize, metric: Option<&str>, connection: Option<&str>, g: &Global) -> Result<Report> {
    let metric = match metric {
        None => (0..n).map(|i| (0..n).map(|j| ScalarExpr::constant(if i == j { 1.0 } else { 0.0 })).collect()).collect(),
        Some(m) => m
            .split(';')
            .map(|row| row.split(',').map(|s| parse_scalar(s.trim())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?,
    };
    let connection = match connection {
        None => vec![ScalarExpr::zero(); n],
        Some(a) => parse_list(a)?,
    };
    let b = CarrollBundle::new(metric, connection)?;
    let pts = SampleBox::unit(n).points(g.samples, g.seed);
    let tol = g.tol.unwrap_or(1e-9);
    let mut r = Report::default();
    for k in 0..=n + 1 {
        for m in Monomial::all_of_degree(n, k) {
            let xi = Form::monomial(n, m, ScalarExpr::one());
            let s = star(&xi, &b)?;
            let ss = star(&s, &b)?;
            let (dev, at) = ss.max_deviation(&xi.scale(&star_sign(n, k).into()), &pts)?;
            let case = format!("*({xi}) = {s}");
            r.extend([Record::check("star-table", case, dev, tol, at.map(|p| p.to_string()))]);
        }
    }
    Ok(r)
}

fn maxwell_check(f: &EmField, g: &Global) -> Result<Report> {
    let pts = SampleBox::unit(3).points(g.samples, g.seed);
    let tol = g.tol.unwrap_or(1e-9);
    let res = maxwell::maxwell_residual(f)?;
    let s = res.summarize(&pts)?;
    let (pf, psf) = res.predicted_forms();
    let agree = res.d_f.max_deviation(&pf, &pts)?.0.max(res.d_star_f.max_deviation(&psf, &pts)?.0);
    let w = s.witness.clone();
    Ok(Report::new(vec![
        Record::check("maxwell", "dF = 0", s.d_f, tol, w.clone()),
        Record::check("maxwell", "d*F = 0", s.d_star_f, tol, w.clone()),
        Record::check("maxwell", "vector equations", s.vector, tol, w),
        Record::check("maxwell", "form and vector residuals coincide", agree, tol, None),
    ]))
}

fn maxwell_run(config: &Path, dump_dir: Option<&Path>, g: &Global, out: &mut dyn Write) -> Result<Report> {
    let text = fs::read_to_string(config)?;
    let cfg = SimConfig::parse(&text)?;
    let dir = match (dump_dir, &g.output) {
        (Some(d), _) => d.to_path_buf(),
        (None, Some(o)) => o.parent().map(Path::to_path_buf).unwrap_or_default(),
        (None, None) => PathBuf::from("."),
    };
    let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("fields").to_string();
    if cfg.dump_cadence > 0 {
        fs::create_dir_all(&dir)?;
    }
    let mut sim = Simulation::new(cfg)?;
    let rows = sim.run(|s, du| output::write_dump(&output::dump_path(&dir, &stem, s.step), s, du))?;
    let body = match g.format {
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
        _ => {
            let mut buf = Vec::new();
            output::write_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("utf-8 CSV")
        }
    };
    emit(g, &body, out)?;
    // conservation checks decide the exit code
    let tol = g.tol.unwrap_or(1e-6);
    let e0 = rows.first().map(|r| r.energy).unwrap_or(0.0);
    let drift = rows.iter().map(|r| if e0 == 0.0 { r.energy.abs() } else { ((r.energy - e0) / e0).abs() }).fold(0.0, f64::max);
    let (de0, db0) = rows.first().map(|r| (r.max_div_e, r.max_div_b)).unwrap_or_default();
    let div = rows.iter().map(|r| (r.max_div_e - de0).abs().max((r.max_div_b - db0).abs())).fold(0.0, f64::max);
    Ok(Report::new(vec![
        Record::check("maxwell-run", "relative energy drift", drift, tol, None),
        Record::check("maxwell-run", "divergence drift", div, 1e-12 * rows.len().max(1) as f64, None),
    ]))
}
