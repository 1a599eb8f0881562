//! Acceptance run: one PASS/FAIL line per criterion, with the individual
//! checks indented below. Exits nonzero when a check fails that is not a
//! documented resolution limit.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use whitham_crest::asymptotics::{
    corollary_constants, corollary_tolerance, derivative_limits, holder_seminorm, log_lipschitz_constant, rescale,
    value_limit, AsymptoticFit,
};
use whitham_crest::kernels::{
    check_remainder_bound, check_tail_bound, kernel_numeric_from_symbol, kernel_whitham_accelerated, KernelSpec,
};
use whitham_crest::quadrature::QuadratureConfig;
use whitham_crest::residual_verifier::{condensed_residuals, default_sample_points, toy_residual};
use whitham_crest::special_functions::{
    constants_suite, scan_inequalities, verify_beta_identity, verify_phi_half_moment, verify_phi_zero_mass,
    verify_pv_integral, verify_upper_half_moment, IdentityReport, ScanResult,
};
use whitham_crest::wave_solver::{continue_to_highest, fourier_decay_slope, SolverConfig, WaveFamily, WaveProfile};

const DESK_MODES: usize = 1 << 14;
const STOP_GAP: f64 = 1e-4;

struct Check {
    name: String,
    passed: bool,
    detail: String,
    /// Reason the check cannot pass at desk-scale resolution.
    known_limit: Option<&'static str>,
}

struct Criterion {
    id: usize,
    title: &'static str,
    checks: Vec<Check>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(id: usize, title: &'static str) -> Self {
        Self {
            id,
            title,
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
            known_limit: None,
        });
    }

    fn limited(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>, why: &'static str) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
            known_limit: Some(why),
        });
    }

    fn identity(&mut self, r: &IdentityReport) {
        self.check(&r.name, r.passed, format!("{:.12e}", r.computed));
    }

    fn runtime(&mut self, start: Instant, budget: Duration) {
        let t = start.elapsed();
        self.check("runtime", t <= budget, format!("{:.1} s (budget {} s)", t.as_secs_f64(), budget.as_secs()));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// True when every failure is a documented resolution limit.
    fn acceptable(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.known_limit.is_some())
    }

    fn print(&self) {
        println!("{} criterion {}: {}", if self.passed() { "PASS" } else { "FAIL" }, self.id, self.title);
        for c in &self.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            match (c.passed, c.known_limit) {
                (false, Some(why)) => println!("    {tag} {} [{}] (resolution limit: {why})", c.name, c.detail),
                _ => println!("    {tag} {} [{}]", c.name, c.detail),
            }
        }
        for n in &self.notes {
            println!("    info {n}");
        }
    }
}

fn minutes(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

fn identities(cfg: &QuadratureConfig) -> Criterion {
    let t = Instant::now();
    let mut c = Criterion::new(1, "integral identities within 1e-8");
    c.identity(&verify_phi_half_moment(cfg).unwrap());
    c.identity(&verify_phi_zero_mass(cfg).unwrap());
    for k in 1..=9 {
        c.identity(&verify_beta_identity(k as f64 / 10.0, cfg).unwrap());
    }
    c.identity(&verify_pv_integral(cfg).unwrap());
    c.identity(&verify_upper_half_moment(cfg).unwrap());
    c.runtime(t, minutes(1));
    c
}

fn constants(cfg: &QuadratureConfig) -> Criterion {
    let t = Instant::now();
    let mut c = Criterion::new(2, "tau0 bracket, b bounds, positivity of f");
    for r in constants_suite(cfg).unwrap() {
        c.identity(&r);
    }
    c.runtime(t, minutes(1));
    c
}

fn inequality_scan() -> Criterion {
    let t = Instant::now();
    let mut c = Criterion::new(3, "inequality system has the unique solution (pi/2, pi/2)");
    let scan = scan_inequalities(400, 4.0, 1e-3);
    let d = ScanResult::max_distance(&scan.near);
    c.check(
        "400x400 scan, all solutions within 1e-2",
        !scan.near.is_empty() && d <= 1e-2,
        format!("{} near-solutions, max distance {d:.3e}", scan.near.len()),
    );
    c.runtime(t, minutes(2));
    c
}

fn kernels(cfg: &QuadratureConfig) -> Criterion {
    let t = Instant::now();
    let mut c = Criterion::new(4, "kernel evaluators and bounds");
    let w = KernelSpec::whitham();
    let b = KernelSpec::bidirectional();
    let (mut series_err, mut table_err, mut closed_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..50 {
        let x = 0.1 + 4.9 * i as f64 / 49.0;
        let oracle = kernel_numeric_from_symbol(&w, x, cfg).unwrap();
        series_err = series_err.max((kernel_whitham_accelerated(x, 500).unwrap() - oracle).abs() / oracle);
        table_err = table_err.max((w.value(x).unwrap() - oracle).abs() / oracle);
        let ob = kernel_numeric_from_symbol(&b, x, cfg).unwrap();
        closed_err = closed_err.max((b.value(x).unwrap() - ob).abs() / ob);
    }
    c.check("K_W merged series (500 pairs) vs oracle on [0.1, 5]", series_err <= 1e-6, format!("max rel {series_err:.2e}"));
    c.check("K_W production evaluator vs oracle on [0.1, 5]", table_err <= 1e-6, format!("max rel {table_err:.2e}"));
    c.check("K_B closed form vs oracle on [0.1, 5]", closed_err <= 1e-6, format!("max rel {closed_err:.2e}"));
    let x = 1e-5;
    let lim = PI * kernel_numeric_from_symbol(&b, x, cfg).unwrap() - (1.0 / x).ln();
    c.check(
        "pi K_B(x) - log(1/x) at x = 1e-5 vs log(4/pi)",
        (lim - (4.0 / PI).ln()).abs() <= 1e-4,
        format!("{lim:.8} vs {:.8}", (4.0 / PI).ln()),
    );
    for spec in [&w, &b] {
        let mut ok = 0;
        for nu in [0.1, 0.25, 0.5, 0.785, 1.5] {
            for frac in [0.05, 0.2, 0.5, 0.9] {
                ok += check_tail_bound(spec, frac * nu, nu, cfg).unwrap().passed as usize;
            }
        }
        c.check(format!("tail bound, {:?}", spec.family), ok == 20, format!("{ok}/20 pairs"));
        let rem = [0.05, 0.3, 1.0].map(|x| check_remainder_bound(spec, x, cfg).unwrap().passed);
        c.check(format!("remainder bound, {:?}", spec.family), rem.iter().all(|&p| p), format!("{rem:?}"));
    }
    c.runtime(t, minutes(2));
    c
}

fn toy(cfg: &QuadratureConfig) -> Criterion {
    let t = Instant::now();
    let mut c = Criterion::new(5, "toy equation residual <= 1e-7");
    for s in [0.3, 0.5, 0.7] {
        for x in [0.25, 1.0, 4.0] {
            let r = toy_residual(s, x, cfg).unwrap();
            c.check(format!("s = {s}, x = {x}"), r.relative <= 1e-7, format!("{:.2e}", r.relative));
        }
    }
    c.runtime(t, minutes(1));
    c
}

fn fit_check(c: &mut Criterion, f: &AsymptoticFit) {
    let tol = f.quantity.tolerance();
    c.check(
        format!("lim {} = {:.6}", f.quantity.label(), f.target),
        f.relative_error() <= tol,
        format!("{:.6} ± {:.1e}, rel {:.2e}, tol {tol}", f.extrapolated, f.uncertainty, f.relative_error()),
    );
}

fn solve(family: WaveFamily) -> (Vec<WaveProfile>, Duration) {
    let t = Instant::now();
    let cfg = SolverConfig {
        n: DESK_MODES,
        stop_gap: STOP_GAP,
        ..SolverConfig::default()
    };
    let cont = continue_to_highest(family, &cfg).expect("continuation reaches the highest wave");
    (cont.profiles, t.elapsed())
}

fn unidirectional(profiles: &[WaveProfile], elapsed: Duration, cfg: &QuadratureConfig) -> Criterion {
    let t = Instant::now();
    let mut c = Criterion::new(6, "highest Whitham wave at N = 2^14");
    let p = profiles.last().unwrap();
    let r = rescale(p, STOP_GAP).unwrap();
    let v = value_limit(&r).unwrap();
    fit_check(&mut c, &v);
    let cc = corollary_constants(v.extrapolated, p.family, p.speed_c);
    let rel = (cc.phi_level - cc.phi_target).abs() / cc.phi_target;
    c.check(
        "phi-level constant = sqrt(pi/8)",
        rel <= corollary_tolerance(p.family),
        format!("{:.6} vs {:.6}, rel {rel:.2e}", cc.phi_level, cc.phi_target),
    );
    fit_check(&mut c, &derivative_limits(&r).unwrap());
    let n = p.mode_count();
    let slope = fourier_decay_slope(&p.modes, n / 128, n / 8);
    c.check("Fourier decay slope in [-1.7, -1.3]", (-1.7..=-1.3).contains(&slope), format!("{slope:.3}"));
    let qcfg = QuadratureConfig { rel_tol: 1e-9, ..*cfg };
    let res = condensed_residuals(&r, &default_sample_points(p.period), &qcfg).unwrap();
    let worst = res.iter().map(|x| x.relative).fold(0.0, f64::max);
    let passing = res.iter().filter(|x| x.relative <= 1e-4).count();
    c.limited(
        "condensed residual <= 1e-4 at x = kP/32, k = 1..8",
        passing == res.len(),
        format!(
            "{passing}/8 pass, max {worst:.2e}, at P/16 {:.2e}",
            res.iter().find(|x| (x.x - p.period / 16.0).abs() < 1e-12).map_or(f64::NAN, |x| x.relative)
        ),
        "projection error at the crest decays like 1/N",
    );
    c.check("runtime", elapsed + t.elapsed() <= minutes(30), format!("{:.1} s", (elapsed + t.elapsed()).as_secs_f64()));
    c
}

fn bidirectional(profiles: &[WaveProfile], elapsed: Duration) -> Criterion {
    let t = Instant::now();
    let mut c = Criterion::new(7, "highest bidirectional wave, logarithmic limits after extrapolation");
    let p = profiles.last().unwrap();
    let r = rescale(p, STOP_GAP).unwrap();
    let v = value_limit(&r).unwrap();
    fit_check(&mut c, &v);
    let cc = corollary_constants(v.extrapolated, p.family, p.speed_c);
    let rel = (cc.phi_level - cc.phi_target).abs() / cc.phi_target;
    c.check(
        "phi-level constant = 1/(3 pi)",
        rel <= corollary_tolerance(p.family),
        format!("{:.6} vs {:.6}, rel {rel:.2e}", cc.phi_level, cc.phi_target),
    );
    let d = derivative_limits(&r).unwrap();
    fit_check(&mut c, &d);
    for f in [&v, &d] {
        let (lo, hi) = f.raw_range();
        c.notes.push(format!(
            "raw {} over the fit window: [{lo:.4}, {hi:.4}] ({:+.0}% to {:+.0}% from {})",
            f.quantity.label(),
            100.0 * (lo / f.target - 1.0),
            100.0 * (hi / f.target - 1.0),
            f.target
        ));
    }
    c.check("runtime", elapsed + t.elapsed() <= minutes(30), format!("{:.1} s", (elapsed + t.elapsed()).as_secs_f64()));
    c
}

fn relative_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn regularity(uni: &[WaveProfile], bi: &[WaveProfile]) -> Criterion {
    let mut c = Criterion::new(8, "regularity estimates are finite and refinement-stable");
    let [coarse, fine] = [&uni[uni.len() - 2], &uni[uni.len() - 1]];
    let hc = holder_seminorm(&rescale(coarse, STOP_GAP).unwrap()).value;
    let hf = holder_seminorm(&rescale(fine, STOP_GAP).unwrap()).value;
    c.check(
        "Holder seminorm, N = 2^13 vs 2^14",
        hf.is_finite() && relative_change(hc, hf) <= 0.1,
        format!("{hc:.5} vs {hf:.5}"),
    );
    let [coarse, fine] = [&bi[bi.len() - 2], &bi[bi.len() - 1]];
    let lc = log_lipschitz_constant(coarse).value;
    let lf = log_lipschitz_constant(fine).value;
    c.check(
        "log-Lipschitz constant, N = 2^13 vs 2^14",
        lf.is_finite() && relative_change(lc, lf) <= 0.1,
        format!("{lc:.5} vs {lf:.5}"),
    );
    // repeated computations are bit-identical
    let small = SolverConfig { n: 128, stop_gap: 1e-2, ..SolverConfig::default() };
    let a = continue_to_highest(WaveFamily::Unidirectional, &small).unwrap();
    let b = continue_to_highest(WaveFamily::Unidirectional, &small).unwrap();
    c.check(
        "solver output deterministic",
        a.highest().to_json() == b.highest().to_json(),
        format!("c = {:.12}", a.highest().speed_c),
    );
    let w = KernelSpec::whitham();
    let k1: Vec<u64> = (1..50).map(|i| w.value(0.1 * i as f64).unwrap().to_bits()).collect();
    let k2: Vec<u64> = (1..50).map(|i| w.value(0.1 * i as f64).unwrap().to_bits()).collect();
    c.check("kernel evaluation deterministic", k1 == k2, "49 points");
    c
}

fn main() {
    let cfg = QuadratureConfig::default();
    let mut all = Vec::new();
    for build in [identities, constants] {
        let c = build(&cfg);
        c.print();
        all.push(c);
    }
    for c in [inequality_scan(), kernels(&cfg), toy(&cfg)] {
        c.print();
        all.push(c);
    }
    let (uni, t_uni) = solve(WaveFamily::Unidirectional);
    let c6 = unidirectional(&uni, t_uni, &cfg);
    c6.print();
    let (bi, t_bi) = solve(WaveFamily::Bidirectional);
    let c7 = bidirectional(&bi, t_bi);
    c7.print();
    let c8 = regularity(&uni, &bi);
    c8.print();
    all.extend([c6, c7, c8]);

    let passed = all.iter().filter(|c| c.passed()).count();
    println!("acceptance: {passed}/{} criteria pass", all.len());
    if !all.iter().all(Criterion::acceptable) {
        println!("acceptance: unexpected failure");
        std::process::exit(1);
    }
}
