mod error;
mod parse;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use sl2coef::asym::{approx_result, residual_scan, snap_m_grid, Regime, ScanSpec, Verdict};
use sl2coef::coeffs::{cal_p_with, frak_p, CoeffIndex, CoeffMethod, CoeffQuery};
use sl2coef::fourier::{basis_ft_closed_batch, column_step_fn, StepFunction};
use sl2coef::params::{optimal_weight_ratio, ub_norm_11_squared, ub_norm_11_squared_special, ub_norm_min, ReprParams};
use sl2coef::C64;

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "sl2coef", version, about = "Matrix coefficients of SL(2,R) representations and their Whittaker asymptotics")]
struct Cli {
    /// Worker threads
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; scans always write JSON
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct CharArgs {
    /// Complex ell as a+bi
    #[arg(long, allow_hyphen_values = true, conflicts_with = "lambda")]
    ell: Option<String>,
    /// Principal series: ell = -1/2 + i*lambda
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    eps: f64,
}

impl CharArgs {
    fn params(&self) -> Result<ReprParams<f64>, CliError> {
        match (&self.ell, self.lambda) {
            (Some(s), None) => Ok(ReprParams::new(parse::complex(s)?, self.eps)),
            (None, Some(l)) => Ok(ReprParams::principal(l, self.eps)),
            _ => Err(CliError::Usage("give exactly one of --ell and --lambda".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Hypergeometric,
    GammaAverage,
    Jacobi,
}

impl From<MethodArg> for CoeffMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => CoeffMethod::Auto,
            MethodArg::Hypergeometric => CoeffMethod::Hypergeometric,
            MethodArg::GammaAverage => CoeffMethod::GammaAverage,
            MethodArg::Jacobi => CoeffMethod::Jacobi,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Principal,
    Discrete,
    Complementary,
    General,
}

impl From<KindArg> for Regime {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Principal => Regime::Principal,
            KindArg::Discrete => Regime::Discrete,
            KindArg::Complementary => Regime::Complementary,
            KindArg::General => Regime::General,
        }
    }
}

#[derive(Args)]
struct XArgs {
    #[arg(long, conflicts_with = "xgrid")]
    x: Option<f64>,
    /// lin:a:b:n or log:a:b:n
    #[arg(long)]
    xgrid: Option<String>,
}

impl XArgs {
    fn values(&self) -> Result<Vec<f64>, CliError> {
        match (self.x, &self.xgrid) {
            (Some(x), None) => Ok(vec![x]),
            (None, Some(g)) => parse::grid(g),
            _ => Err(CliError::Usage("give exactly one of --x and --xgrid".into())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient values
    Eval {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        #[arg(long, allow_hyphen_values = true)]
        n: f64,
        #[command(flatten)]
        xs: XArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Discrete/complementary normalization
        #[arg(long)]
        normalized: bool,
    },
    /// Exact value against the Whittaker approximant
    Approx {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, allow_hyphen_values = true)]
        m: f64,
        #[arg(long, allow_hyphen_values = true)]
        n: f64,
        #[command(flatten)]
        xs: XArgs,
    },
    /// Residual scan over an x-by-m grid (JSON report)
    Scan {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, allow_hyphen_values = true)]
        n: f64,
        #[arg(long)]
        xgrid: String,
        /// Snapped to n + N0 within the grid's range
        #[arg(long)]
        mgrid: String,
        /// Extra power of m in the scaling (harness self-test)
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        m_power_shift: f64,
    },
    /// Column step function (principal series)
    Column {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: f64,
        #[arg(long)]
        x: f64,
        /// First-index offsets a:b (default -40x:40x)
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Fourier transform of a basis vector on the column cells
    Fourier {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: f64,
        #[arg(long)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Uniform-boundedness norm formulas
    Norms {
        #[arg(long, allow_hyphen_values = true)]
        ell: f64,
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
    },
}

/// What a command produced.
enum Outcome {
    Done,
    ScanFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ScanFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("sl2coef: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    if cli.threads == 0 {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let outcome = dispatch(&cli, &mut out)?;
    out.flush()?;
    Ok(outcome)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Eval { chi, m, n, xs, method, normalized } => {
            let p = chi.params()?;
            let idx = CoeffIndex::new(parse::offset("m", *m, p.eps)?, parse::offset("n", *n, p.eps)?);
            let xs = xs.values()?;
            let rows = xs
                .par_iter()
                .map(|&x| {
                    let q = CoeffQuery::new(p, idx, x);
                    let r = if *normalized { cal_p_with(&q, (*method).into()) } else { frak_p(&q, (*method).into()) };
                    r.map_err(|e| CliError::at(format!("x={x}, m={m}, n={n}"), e))
                })
                .collect::<Result<Vec<_>, _>>()?;
            match cli.format {
                Format::Csv => {
                    writeln!(out, "x,m,n,re,im,method,est_err")?;
                    for (x, r) in xs.iter().zip(&rows) {
                        writeln!(out, "{x},{m},{n},{:e},{:e},{},{:e}", r.value.re, r.value.im, r.method.as_str(), r.est_err)?;
                    }
                }
                Format::Json => {
                    let v: Vec<_> = xs
                        .iter()
                        .zip(&rows)
                        .map(|(x, r)| json!({"x": x, "m": m, "n": n, "re": r.value.re, "im": r.value.im, "method": r.method.as_str(), "est_err": r.est_err}))
                        .collect();
                    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
                }
            }
            Ok(Outcome::Done)
        }
        Command::Approx { chi, kind, m, n, xs } => {
            let p = chi.params()?;
            let idx = CoeffIndex::new(parse::offset("m", *m, p.eps)?, parse::offset("n", *n, p.eps)?);
            let xs = xs.values()?;
            let regime: Regime = (*kind).into();
            let rows = xs
                .par_iter()
                .map(|&x| approx_result(regime, &p, idx, x).map_err(|e| CliError::at(format!("x={x}, m={m}, n={n}"), e)))
                .collect::<Result<Vec<_>, _>>()?;
            match cli.format {
                Format::Csv => {
                    writeln!(out, "x,m,n,exact_re,exact_im,approx_re,approx_im,residual_abs,scaled")?;
                    for (x, r) in xs.iter().zip(&rows) {
                        writeln!(
                            out,
                            "{x},{m},{n},{:e},{:e},{:e},{:e},{:e},{:e}",
                            r.exact.re,
                            r.exact.im,
                            r.approx.re,
                            r.approx.im,
                            r.residual.norm(),
                            r.scaled_sup_stat
                        )?;
                    }
                }
                Format::Json => {
                    let v: Vec<_> = xs
                        .iter()
                        .zip(&rows)
                        .map(|(x, r)| {
                            json!({"x": x, "m": m, "n": n, "exact": [r.exact.re, r.exact.im],
                                   "approx": [r.approx.re, r.approx.im], "residual_abs": r.residual.norm(),
                                   "scaled": r.scaled_sup_stat})
                        })
                        .collect();
                    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
                }
            }
            Ok(Outcome::Done)
        }
        Command::Scan { chi, kind, n, xgrid, mgrid, m_power_shift } => {
            let p = chi.params()?;
            let n_off = parse::offset("n", *n, p.eps)?;
            let x_grid = parse::grid(xgrid)?;
            let m_values = parse::grid(mgrid)?;
            let lo = m_values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = m_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let m_grid = snap_m_grid(&m_values, p.eps, n_off, lo, hi);
            if m_grid.is_empty() {
                return Err(CliError::Usage(format!("no admissible m in {mgrid} for n = {n}")));
            }
            let spec = ScanSpec { regime: (*kind).into(), params: p, n_off, x_grid, m_grid, extra_m_power: *m_power_shift };
            let report = residual_scan(&spec).map_err(|e| CliError::at("scan setup", e))?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            eprintln!(
                "{}: sup_stat={:.4e} trend_slope={:.3} excluded={}",
                if report.verdict == Verdict::Pass { "PASS" } else { "FAIL" },
                report.sup_stat,
                report.trend_slope,
                report.excluded_points.len()
            );
            Ok(if report.verdict == Verdict::Pass { Outcome::Done } else { Outcome::ScanFailed })
        }
        Command::Column { chi, n, x, window } => {
            let p = chi.params()?;
            let n_off = parse::offset("n", *n, p.eps)?;
            let win = default_window(window.as_deref(), *x)?;
            let step = column_step_fn(&p, n_off, *x, win).map_err(|e| CliError::at(format!("x={x}, n={n}"), e))?;
            write_step(out, &step, cli.format)?;
            Ok(Outcome::Done)
        }
        Command::Fourier { chi, n, x, window } => {
            let p = chi.params()?;
            let n_off = parse::offset("n", *n, p.eps)?;
            let win = default_window(window.as_deref(), *x)?;
            let lefts: Vec<f64> = win.map(|mo| (mo as f64 + p.eps) / x).collect();
            let mids: Vec<f64> = lefts.iter().map(|l| l + 0.5 / x).collect();
            let vals = basis_ft_closed_batch(&p, n_off, &mids).map_err(|e| CliError::at(format!("x={x}, n={n}"), e))?;
            let step = StepFunction { cell_width: 1.0 / x, cells: lefts.into_iter().zip(vals).collect() };
            write_step(out, &step, cli.format)?;
            Ok(Outcome::Done)
        }
        Command::Norms { ell, eps } => {
            let at = format!("ell={ell}, eps={eps}");
            let n11 = ub_norm_11_squared(*ell, *eps).map_err(|e| CliError::at(&at, e))?;
            let special = ub_norm_11_squared_special(*ell).map_err(|e| CliError::at(&at, e))?;
            // inside the complementary range the uniform norm is attained at 1
            let min = ub_norm_min(*ell, *eps).unwrap_or(1.0);
            let ratio = optimal_weight_ratio(C64::new(*ell, 0.0), *eps).ok();
            match cli.format {
                Format::Csv => {
                    writeln!(out, "quantity,value")?;
                    writeln!(out, "ub_norm_11_squared,{n11}")?;
                    writeln!(out, "ub_norm_11_squared_special,{special}")?;
                    writeln!(out, "ub_norm_min,{min}")?;
                    match ratio {
                        Some(r) => writeln!(out, "optimal_weight_ratio,{r}")?,
                        None => writeln!(out, "optimal_weight_ratio,")?,
                    }
                }
                Format::Json => {
                    let v = json!({"ell": ell, "eps": eps, "ub_norm_11_squared": n11,
                                   "ub_norm_11_squared_special": special, "ub_norm_min": min,
                                   "optimal_weight_ratio": ratio});
                    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
                }
            }
            Ok(Outcome::Done)
        }
    }
}

fn default_window(window: Option<&str>, x: f64) -> Result<std::ops::RangeInclusive<i64>, CliError> {
    if x < 1.0 || !x.is_finite() {
        return Err(CliError::Usage(format!("--x must be finite and >= 1, got {x}")));
    }
    match window {
        Some(w) => parse::window(w),
        None => {
            let k = (40.0 * x).round() as i64;
            Ok(-k..=k)
        }
    }
}

fn write_step(out: &mut dyn Write, step: &StepFunction, format: Format) -> Result<(), CliError> {
    match format {
        Format::Csv => step.write_csv(out)?,
        Format::Json => {
            let cells: Vec<_> = step.cells.iter().map(|(l, v)| [*l, l + step.cell_width, v.re, v.im]).collect();
            let v = json!({"cell_width": step.cell_width, "l2_norm": step.l2_norm(), "cells": cells});
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
    }
    Ok(())
}
