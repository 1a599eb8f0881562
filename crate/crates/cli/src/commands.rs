use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;
use whitham_crest::asymptotics::{
    corollary_constants, corollary_tolerance, derivative_limits, holder_seminorm, log_lipschitz_constant, rescale,
    value_limit, AsymptoticFit,
};
use whitham_crest::kernels::{
    check_remainder_bound, check_tail_bound, kernel_numeric_from_symbol, kernel_whitham_accelerated,
};
use whitham_crest::quadrature::QuadratureConfig;
use whitham_crest::residual_verifier::{condensed_residuals, default_sample_points, toy_residual};
use whitham_crest::special_functions::{identity_suite, scan_inequalities, Expected, IdentityReport, ScanResult};
use whitham_crest::wave_solver::{continue_to_highest, fourier_decay_slope, SolverConfig, WaveFamily, WaveProfile};

use crate::table::{any_failed, read_checks, render, write_rows, CheckRow, Status};
use crate::{Cli, Command};

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

macro_rules! emitln {
    ($($t:tt)*) => {
        emit(&format!("{}\n", format_args!($($t)*)))
    };
}

#[derive(Debug)]
pub enum RunError {
    /// Bad input that the argument parser could not catch.
    Usage(String),
    /// A computation failed outright.
    Failed(String),
}

/// Runs the selected subcommand. `Ok(false)` means a check failed.
pub fn run(cli: &Cli) -> Result<bool, RunError> {
    match &cli.command {
        Command::Identities {
            report,
            scan_resolution,
            scan_slack,
        } => {
            let rows = identities(*scan_resolution, *scan_slack)?;
            finish(cli, &rows, report.as_deref())
        }
        Command::Kernel {
            family,
            x_min,
            x_max,
            points,
            tolerance,
            out,
            report,
        } => {
            if !(*x_min > 0.0 && x_max > x_min && *points >= 2) {
                return Err(RunError::Usage("need 0 < x-min < x-max and points >= 2".into()));
            }
            let (samples, rows) = kernel(*family, *x_min, *x_max, *points, *tolerance)?;
            if let Some(p) = out {
                write_rows(&cli.output_path(p), &samples, crate::table::Format::Csv).map_err(RunError::Failed)?;
            }
            finish(cli, &rows, report.as_deref())
        }
        Command::Solve {
            family,
            modes,
            stop_gap,
            period,
            landing_fraction,
            out,
            history,
        } => {
            let cfg = SolverConfig {
                n: *modes,
                period: *period,
                stop_gap: *stop_gap,
                landing_fraction: *landing_fraction,
                ..SolverConfig::default()
            };
            cfg.validate().map_err(|e| RunError::Usage(e.to_string()))?;
            log::info!("solver config: {cfg:?}");
            let cont = continue_to_highest(*family, &cfg).map_err(|e| RunError::Failed(e.to_string()))?;
            let p = cont.highest();
            crate::table::write_atomic(&cli.output_path(out), p.to_json().as_bytes()).map_err(|e| RunError::Failed(e.to_string()))?;
            if let Some(h) = history {
                crate::table::write_atomic(&cli.output_path(h), cont.state.history_csv().as_bytes())
                    .map_err(|e| RunError::Failed(e.to_string()))?;
            }
            emitln!(
                "{family}: N = {}, c = {:.12}, gap = {:.3e}, residual = {:.3e}",
                p.mode_count(),
                p.speed_c,
                p.gap(),
                p.residual_norm
            );
            Ok(true)
        }
        Command::Asymptotics { input, stop_gap, report } => {
            let rows = asymptotics(&load_profile(input)?, *stop_gap)?;
            finish(cli, &rows, report.as_deref())
        }
        Command::Verify {
            input,
            stop_gap,
            points,
            threshold,
            report,
        } => {
            let rows = verify(&load_profile(input)?, *stop_gap, points, *threshold)?;
            finish(cli, &rows, report.as_deref())
        }
        Command::Report { inputs, out } => {
            let mut rows = Vec::new();
            for p in inputs {
                rows.extend(read_checks(p, cli.format).map_err(RunError::Usage)?);
            }
            // stable sort keeps the input order within each status
            rows.sort_by_key(|r| match r.status {
                Status::Fail => 0,
                Status::Pass => 1,
                Status::Info => 2,
            });
            let ok = finish(cli, &rows, out.as_deref())?;
            let checked = rows.iter().filter(|r| r.status != Status::Info).count();
            let failed = rows.iter().filter(|r| r.status == Status::Fail).count();
            if ok {
                emitln!("PASS: all {checked} checks passed");
            } else {
                emitln!("FAIL: {failed} of {checked} checks failed");
            }
            Ok(ok)
        }
    }
}

fn finish(cli: &Cli, rows: &[CheckRow], report: Option<&Path>) -> Result<bool, RunError> {
    emit(&render(rows));
    if let Some(p) = report {
        write_rows(&cli.output_path(p), rows, cli.format).map_err(RunError::Failed)?;
    }
    Ok(!any_failed(rows))
}

fn load_profile(path: &Path) -> Result<WaveProfile, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Usage(format!("cannot read {}: {e}", path.display())))?;
    WaveProfile::from_json(&text).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))
}

fn failed<E: std::fmt::Display>(e: E) -> RunError {
    RunError::Failed(e.to_string())
}

fn identity_row(r: &IdentityReport) -> CheckRow {
    let target = match r.expected {
        Expected::Value { value } => format!("{value}"),
        Expected::Interval { lo, hi } => format!("({lo}, {hi})"),
    };
    let row = CheckRow::new(&r.name, r.computed, target, Status::from_bool(r.passed));
    if r.tolerance > 0.0 {
        row.tolerance(r.tolerance)
    } else {
        row
    }
}

pub fn identities(scan_resolution: usize, scan_slack: f64) -> Result<Vec<CheckRow>, RunError> {
    let cfg = QuadratureConfig::default();
    let mut rows: Vec<CheckRow> = identity_suite(&cfg).map_err(failed)?.iter().map(identity_row).collect();
    let scan = scan_inequalities(scan_resolution, 4.0, scan_slack);
    let dist = ScanResult::max_distance(&scan.near);
    rows.push(
        CheckRow::new(
            "inequality scan: distance of solutions from (pi/2, pi/2)",
            dist,
            "0",
            Status::from_bool(!scan.near.is_empty() && dist <= 1e-2),
        )
        .window(format!("{n}x{n} over (0, 4]", n = scan_resolution))
        .tolerance(1e-2),
    );
    for s in [0.3, 0.5, 0.7] {
        for x in [0.25, 1.0, 4.0] {
            let t = toy_residual(s, x, &cfg).map_err(failed)?;
            rows.push(
                CheckRow::new(format!("toy equation residual, s = {s}"), t.relative, "0", Status::from_bool(t.relative <= 1e-7))
                    .window(format!("x = {x}"))
                    .tolerance(1e-7),
            );
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct KernelSample {
    pub x: f64,
    pub K_closed: f64,
    pub K_series: Option<f64>,
    pub K_numeric: f64,
    pub S: f64,
    pub R: f64,
    pub abs_err: f64,
}

pub fn kernel(
    family: WaveFamily,
    x_min: f64,
    x_max: f64,
    points: usize,
    tolerance: f64,
) -> Result<(Vec<KernelSample>, Vec<CheckRow>), RunError> {
    let spec = family.kernel();
    let cfg = QuadratureConfig::default();
    let mut samples = Vec::with_capacity(points);
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let x = x_min + (x_max - x_min) * i as f64 / (points - 1) as f64;
        let closed = spec.value(x).map_err(failed)?;
        let series = match family {
            WaveFamily::Unidirectional => Some(kernel_whitham_accelerated(x, 500).map_err(failed)?),
            WaveFamily::Bidirectional => None,
        };
        let numeric = kernel_numeric_from_symbol(&spec, x, &cfg).map_err(failed)?;
        let err = (closed - numeric).abs().max(series.map_or(0.0, |s| (s - numeric).abs()));
        worst = worst.max(err / numeric.abs());
        samples.push(KernelSample {
            x,
            K_closed: closed,
            K_series: series,
            K_numeric: numeric,
            S: spec.singular(x).map_err(failed)?,
            R: spec.regular(x),
            abs_err: err,
        });
    }
    let mut rows = vec![CheckRow::new(
        format!("{family} kernel vs inverse transform, max relative error"),
        worst,
        "0",
        Status::from_bool(worst <= tolerance),
    )
    .window(format!("[{x_min}, {x_max}]"))
    .tolerance(tolerance)];
    if family == WaveFamily::Bidirectional {
        let x = 1e-5;
        let k = kernel_numeric_from_symbol(&spec, x, &cfg).map_err(failed)?;
        let v = PI * k - (1.0 / x).ln();
        let t = (4.0 / PI).ln();
        rows.push(
            CheckRow::new("pi K(x) - log(1/x)", v, "log(4/pi)", Status::from_bool((v - t).abs() <= 1e-4))
                .window("x = 1e-5")
                .tolerance(1e-4),
        );
    }
    for (x, nu) in bound_pairs() {
        let c = check_tail_bound(&spec, x, nu, &cfg).map_err(failed)?;
        rows.push(
            CheckRow::new("tail integral of second difference <= bound", c.integral, format!("<= {:e}", c.bound), Status::from_bool(c.passed))
                .window(format!("x = {x:.5}, nu = {nu}")),
        );
    }
    for x in [0.05, 0.3, 1.0] {
        let c = check_remainder_bound(&spec, x, &cfg).map_err(failed)?;
        rows.push(
            CheckRow::new("remainder second difference L1 <= bound", c.difference_l1, format!("<= {:e}", c.bound), Status::from_bool(c.passed))
                .window(format!("x = {x}")),
        );
    }
    Ok((samples, rows))
}

/// Twenty (x, ν) pairs with x < ν: five crest-region scales, four ratios.
pub fn bound_pairs() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for nu in [0.1, 0.25, 0.5, 0.785, 1.5] {
        for frac in [0.05, 0.2, 0.5, 0.9] {
            out.push((frac * nu, nu));
        }
    }
    out
}

fn fit_row(f: &AsymptoticFit) -> CheckRow {
    let tol = f.quantity.tolerance();
    CheckRow::new(
        format!("lim {}", f.quantity.label()),
        f.extrapolated,
        format!("{}", f.target),
        Status::from_bool(f.relative_error() <= tol),
    )
    .window(format!("[{:.3e}, {:.3e}]", f.window.x_min, f.window.x_max))
    .uncertainty(f.uncertainty)
    .tolerance(tol)
}

fn raw_row(f: &AsymptoticFit) -> CheckRow {
    let (lo, hi) = f.raw_range();
    CheckRow::new(format!("raw {} over the fit window", f.quantity.label()), 0.5 * (lo + hi), format!("{}", f.target), Status::Info)
        .window(format!("values in [{lo:.4}, {hi:.4}]"))
        .uncertainty(0.5 * (hi - lo))
}

pub fn asymptotics(p: &WaveProfile, stop_gap: f64) -> Result<Vec<CheckRow>, RunError> {
    let r = rescale(p, stop_gap).map_err(failed)?;
    let v = value_limit(&r).map_err(failed)?;
    let d = derivative_limits(&r).map_err(failed)?;
    let cc = corollary_constants(v.extrapolated, p.family, p.speed_c);
    let ctol = corollary_tolerance(p.family);
    let crel = (cc.phi_level - cc.phi_target).abs() / cc.phi_target;
    let mut rows = vec![
        fit_row(&v),
        fit_row(&d),
        CheckRow::new("phi-level crest constant", cc.phi_level, format!("{}", cc.phi_target), Status::from_bool(crel <= ctol))
            .uncertainty(cc.phi_level * v.uncertainty / v.extrapolated)
            .tolerance(ctol),
        raw_row(&v),
        raw_row(&d),
    ];
    let n = p.mode_count();
    let slope = fourier_decay_slope(&p.modes, (n / 128).max(1), (n / 8).max(2));
    let window = format!("modes [{}, {}]", (n / 128).max(1), (n / 8).max(2));
    rows.push(match p.family {
        WaveFamily::Unidirectional => {
            CheckRow::new("Fourier decay slope", slope, "[-1.7, -1.3]", Status::from_bool((-1.7..=-1.3).contains(&slope))).window(window)
        }
        WaveFamily::Bidirectional => CheckRow::new("Fourier decay slope", slope, "", Status::Info).window(window),
    });
    let h = holder_seminorm(&r);
    rows.push(CheckRow::new("Holder 1/2 seminorm near the crest", h.value, "finite", Status::Info).window(format!("x = {:.3e}, h = {:.3e}", h.x, h.h)));
    let l = log_lipschitz_constant(p);
    rows.push(CheckRow::new("log-Lipschitz constant", l.value, "finite", Status::Info).window(format!("x = {:.3e}, h = {:.3e}", l.x, l.h)));
    Ok(rows)
}

pub fn verify(p: &WaveProfile, stop_gap: f64, points: &[f64], threshold: f64) -> Result<Vec<CheckRow>, RunError> {
    let r = rescale(p, stop_gap).map_err(failed)?;
    let xs = if points.is_empty() {
        default_sample_points(p.period)
    } else {
        points.to_vec()
    };
    if let Some(bad) = xs.iter().find(|&&x| !(x > 0.0 && x < 0.5 * p.period)) {
        return Err(RunError::Usage(format!("sample point {bad} outside (0, P/2)")));
    }
    let cfg = QuadratureConfig {
        rel_tol: 1e-9,
        ..QuadratureConfig::default()
    };
    let mut rows = Vec::new();
    for c in condensed_residuals(&r, &xs, &cfg).map_err(failed)? {
        rows.push(
            CheckRow::new("condensed residual / u(x)^2", c.relative, "0", Status::from_bool(c.relative <= threshold))
                .window(format!("x = {:.6}", c.x))
                .uncertainty(c.tail_bound)
                .tolerance(threshold),
        );
        if let (Some(far), Some(bound)) = (c.far_contribution, c.far_bound) {
            rows.push(
                CheckRow::new("far-field contribution in [0, bound]", far, format!("[0, {bound:e}]"), Status::from_bool(far >= 0.0 && far <= bound))
                    .window(format!("x = {:.6}", c.x)),
            );
        }
    }
    Ok(rows)
}
