//! Command implementations behind the `translorentz` binary.
//!
//! Exit codes: 0 success, 1 usage or parse problem, 2 normal-form violation,
//! 3 verification failure. Reports are JSON on stdout (optionally written to
//! a file), probe samples go to CSV with exactly the columns `eps,value`.

use crate::error::Error;
use crate::limits::{self, LimitReport, ProbeOptions};
use crate::metric::{AdaptedMetric, SigmaPoint, VectorFieldSpec};
use crate::report::{probe_csv, ModelId, Report};
use crate::sigma;
use crate::verify::{self, Suite};
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "translorentz",
    version,
    about = "Canonical geometry and curvature limits of Riemann-to-Lorentz metrics \
             degenerating on a hypersurface"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a metric configuration against the adapted normal form.
    Validate {
        /// `builtin:<name>` or a TOML file path.
        config: String,
    },
    /// Canonical frame, fundamental forms and flatness flags at a point.
    SigmaReport {
        config: String,
        /// Hypersurface coordinates `x2,..,xm` (defaults to the box center).
        #[arg(long)]
        point: Option<String>,
        /// Points per axis for the flatness grid.
        #[arg(long, default_value_t = 5)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a curvature quantity approaching the hypersurface.
    LimitProbe {
        config: String,
        /// `cov:A,B,C,D`, `sec:A,B` or `ric:TAG` with frame labels
        /// `N`, `R`, `V`, `V2`, `V3`, .. or named config fields; Ricci tags
        /// are NN, NV, NR, RV, RR, VW.
        #[arg(long)]
        quantity: String,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 1e-4)]
        eps_lo: f64,
        #[arg(long, default_value_t = 1e-1)]
        eps_hi: f64,
        /// Sample the Lorentzian side as well.
        #[arg(long)]
        two_sided: bool,
        /// Write probe samples as CSV (`eps,value`).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite; exit 0 iff every check passes.
    Verify {
        config: String,
        /// One of `frames`, `connections`, `curvature`, `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path with status 0
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NormalForm { .. } => EXIT_VALIDATION,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(cli: Cli) -> crate::Result<i32> {
    match cli.command {
        Command::Validate { config } => cmd_validate(&config),
        Command::SigmaReport {
            config,
            point,
            grid,
            out,
        } => cmd_sigma_report(&config, point.as_deref(), grid, out.as_deref()),
        Command::LimitProbe {
            config,
            quantity,
            point,
            eps_lo,
            eps_hi,
            two_sided,
            csv,
            out,
        } => cmd_limit_probe(
            &config,
            &quantity,
            point.as_deref(),
            ProbeOptions {
                eps_lo,
                eps_hi,
                two_sided,
            },
            csv.as_deref(),
            out.as_deref(),
        ),
        Command::Verify {
            config,
            suite,
            seed,
            out,
        } => cmd_verify(&config, &suite, seed, out.as_deref()),
    }
}

fn model_id(source: &str) -> crate::Result<ModelId> {
    ModelId::from_source(source).map_err(|e| Error::InvalidInput(format!("{source}: {e}")))
}

fn parse_point(metric: &AdaptedMetric, text: Option<&str>) -> crate::Result<SigmaPoint> {
    match text {
        None => {
            let mid: Vec<f64> = metric.domain()[1..]
                .iter()
                .map(|[lo, hi]| 0.5 * (lo + hi))
                .collect();
            Ok(SigmaPoint::new(&mid))
        }
        Some(t) => {
            let coords: Vec<f64> = t
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::InvalidInput(format!("bad coordinate '{s}': {e}")))
                })
                .collect::<crate::Result<_>>()?;
            if coords.len() != metric.dim() - 1 {
                return Err(Error::InvalidInput(format!(
                    "--point needs {} hypersurface coordinates, got {}",
                    metric.dim() - 1,
                    coords.len()
                )));
            }
            Ok(SigmaPoint::new(&coords))
        }
    }
}

fn emit<T: Serialize>(report: &Report<T>, out: Option<&std::path::Path>) -> crate::Result<()> {
    let json = report.to_json();
    print!("{json}");
    if let Some(path) = out {
        std::fs::write(path, &json)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_validate(config: &str) -> crate::Result<i32> {
    let metric = AdaptedMetric::from_source(config)?;
    #[derive(Serialize)]
    struct Payload {
        dimension: usize,
        valid: bool,
    }
    let report = Report::new(
        "validate",
        model_id(config)?,
        Payload {
            dimension: metric.dim(),
            valid: true,
        },
    );
    emit(&report, None)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Principal {
    h: Vec<f64>,
    ii: Vec<f64>,
}

#[derive(Serialize)]
struct DrhoEntry {
    lam: usize,
    mu: usize,
    value: f64,
}

#[derive(Serialize)]
struct SigmaPayload {
    point: Vec<f64>,
    n: Vec<f64>,
    r: Vec<f64>,
    screen_raw: Vec<Vec<f64>>,
    screen: Vec<Vec<f64>>,
    h_screen: Vec<Vec<f64>>,
    ii_screen: Vec<Vec<f64>>,
    principal_curvatures: Principal,
    rho: Vec<f64>,
    drho_screen: Vec<DrhoEntry>,
    flatness: sigma::Flatness,
}

fn cmd_sigma_report(
    config: &str,
    point: Option<&str>,
    grid: usize,
    out: Option<&std::path::Path>,
) -> crate::Result<i32> {
    let metric = AdaptedMetric::from_source(config)?;
    let p = parse_point(&metric, point)?;
    let frame = sigma::screen_frame(&metric, &p)?;
    let w = sigma::weingarten(&metric, &p)?;
    let m = metric.dim();
    let rho: Vec<f64> = (2..=m)
        .map(|i| {
            let mut v = vec![0.0; m];
            v[i - 1] = 1.0;
            sigma::rho_form(&metric, &p, &v)
        })
        .collect::<crate::Result<_>>()?;
    let mut drho_screen = Vec::new();
    for lam in 0..m - 2 {
        for mu in lam + 1..m - 2 {
            let x = sigma::screen_generator_field(&metric, lam)?;
            let y = sigma::screen_generator_field(&metric, mu)?;
            drho_screen.push(DrhoEntry {
                lam: lam + 2,
                mu: mu + 2,
                value: sigma::d_rho(&metric, &p, &x, &y)?,
            });
        }
    }
    let flatness = sigma::flatness(&metric, &metric.sigma_grid(grid.max(2)))?;
    let payload = SigmaPayload {
        point: p.coords().to_vec(),
        n: frame.n,
        r: frame.r,
        screen_raw: frame.screen_raw,
        screen: frame.screen,
        h_screen: w.h_screen,
        ii_screen: w.ii_screen,
        principal_curvatures: Principal {
            h: w.h_curvatures,
            ii: w.ii_curvatures,
        },
        rho,
        drho_screen,
        flatness,
    };
    let report = Report::new("sigma-report", model_id(config)?, payload);
    emit(&report, out)?;
    Ok(EXIT_OK)
}

/// Resolve a slot label: a frame label (`N`, `R`, `V`, `V3`, ..) or the name
/// of a vector field from the configuration.
fn resolve_label(
    metric: &AdaptedMetric,
    frame: &sigma::SigmaFrame,
    label: &str,
) -> crate::Result<Vec<f64>> {
    let label = label.trim();
    match label {
        "N" => return Ok(frame.n.clone()),
        "R" => return Ok(frame.r.clone()),
        "V" => {
            return frame
                .screen
                .first()
                .cloned()
                .ok_or_else(|| Error::InvalidInput("this metric has no screen directions".into()))
        }
        _ => {}
    }
    if let Some(rest) = label.strip_prefix('V') {
        if let Ok(idx) = rest.parse::<usize>() {
            return frame
                .screen
                .get(idx.wrapping_sub(2))
                .cloned()
                .ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "screen label {label} out of range (V2..V{})",
                        metric.dim() - 1
                    ))
                });
        }
    }
    if let Some(field) = metric.vector_field(label) {
        return field.values_at(&frame.point);
    }
    Err(Error::InvalidInput(format!(
        "unknown slot label '{label}' (expected N, R, V, V2.. or a named vector field)"
    )))
}

#[derive(Serialize)]
struct ProbePayload {
    quantity: String,
    point: Vec<f64>,
    report: LimitReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    csv: Option<String>,
}

fn cmd_limit_probe(
    config: &str,
    quantity: &str,
    point: Option<&str>,
    opts: ProbeOptions,
    csv: Option<&std::path::Path>,
    out: Option<&std::path::Path>,
) -> crate::Result<i32> {
    if !(opts.eps_lo > 0.0 && opts.eps_hi > opts.eps_lo) {
        return Err(Error::InvalidInput(format!(
            "need 0 < eps-lo < eps-hi, got {} and {}",
            opts.eps_lo, opts.eps_hi
        )));
    }
    let metric = AdaptedMetric::from_source(config)?;
    let p = parse_point(&metric, point)?;
    let frame = sigma::screen_frame(&metric, &p)?;
    let (kind, rest) = quantity
        .split_once(':')
        .ok_or_else(|| Error::InvalidInput("quantity must be cov:.., sec:.. or ric:..".into()))?;
    let report = match kind {
        "cov" => {
            let labels: Vec<&str> = rest.split(',').collect();
            if labels.len() != 4 {
                return Err(Error::InvalidInput(
                    "cov takes four slot labels: cov:A,B,C,D".into(),
                ));
            }
            let specs: Vec<VectorFieldSpec> = labels
                .iter()
                .map(|l| {
                    Ok(VectorFieldSpec::constant(&resolve_label(
                        &metric, &frame, l,
                    )?))
                })
                .collect::<crate::Result<_>>()?;
            limits::covariant_limit(
                &metric, &p, &specs[0], &specs[1], &specs[2], &specs[3], &opts,
            )?
        }
        "sec" => {
            let labels: Vec<&str> = rest.split(',').collect();
            if labels.len() != 2 {
                return Err(Error::InvalidInput(
                    "sec takes two slot labels: sec:A,B".into(),
                ));
            }
            let a = resolve_label(&metric, &frame, labels[0])?;
            let b = resolve_label(&metric, &frame, labels[1])?;
            limits::sectional_limit(&metric, &p, &a, &b, &opts)?
        }
        "ric" => {
            let pair = limits::RicciPair::parse(rest).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown Ricci tag '{rest}' (NN, NV, NR, RV, RR, VW)"
                ))
            })?;
            limits::ricci_limit(&metric, &p, pair, &opts)?
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown quantity kind '{other}'"
            )))
        }
    };
    let csv_path = match csv {
        Some(path) => {
            std::fs::write(path, probe_csv(&report.probe.samples)).map_err(|e| {
                Error::InvalidInput(format!("cannot write {}: {e}", path.display()))
            })?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let payload = ProbePayload {
        quantity: quantity.to_string(),
        point: p.coords().to_vec(),
        report,
        csv: csv_path,
    };
    let report = Report::new("limit-probe", model_id(config)?, payload);
    emit(&report, out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyPayload {
    suite: Suite,
    seed: u64,
    threads: usize,
    passed: bool,
    checks: Vec<verify::CheckResult>,
}

fn cmd_verify(
    config: &str,
    suite: &str,
    seed: u64,
    out: Option<&std::path::Path>,
) -> crate::Result<i32> {
    let metric = AdaptedMetric::from_source(config)?;
    let suite = Suite::parse(suite).ok_or_else(|| {
        Error::InvalidInput(format!(
            "unknown suite '{suite}' (frames, connections, curvature, all)"
        ))
    })?;
    let checks = verify::run_suite(&metric, suite, seed);
    let passed = checks.iter().all(|c| c.passed);
    for c in &checks {
        eprintln!(
            "{} {:<28} defect {:.3e} (tol {:.1e}) {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.defect,
            c.tolerance,
            if c.passed { "" } else { c.detail.as_str() }
        );
    }
    let payload = VerifyPayload {
        suite,
        seed,
        threads: verify::thread_count(),
        passed,
        checks,
    };
    let report = Report::new("verify", model_id(config)?, payload);
    emit(&report, out)?;
    Ok(if passed { EXIT_OK } else { EXIT_VERIFICATION })
}
