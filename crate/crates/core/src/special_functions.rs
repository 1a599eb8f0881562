//! Second differences of the model singularities, the constants τ₀ and b,
//! the gap function f(σ), and numerical checks of the integral identities
//! built from them.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::quadrature::{
    integrate_panel, integrate_tail_with, Anchored, Integrand, QuadratureConfig, QuadratureError,
    Singularity,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("{name} is undefined at {at}")]
    DomainError { name: &'static str, at: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expected {
    Value { value: f64 },
    Interval { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub computed: f64,
    pub expected: Expected,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityReport {
    pub fn value(name: impl Into<String>, computed: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            computed,
            expected: Expected::Value { value: expected },
            tolerance,
            passed: (computed - expected).abs() <= tolerance,
        }
    }

    /// Open interval check.
    pub fn interval(name: impl Into<String>, computed: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            computed,
            expected: Expected::Interval { lo, hi },
            tolerance: 0.0,
            passed: computed > lo && computed < hi,
        }
    }

    /// Pass/fail from an external predicate; `expected` is informational.
    pub fn predicate(name: impl Into<String>, computed: f64, expected: Expected, passed: bool) -> Self {
        Self {
            name: name.into(),
            computed,
            expected,
            tolerance: 0.0,
            passed,
        }
    }
}

fn check_tau(name: &'static str, tau: f64) -> Result<(), SpecialError> {
    if !(tau > 0.0) || tau == 1.0 || !tau.is_finite() {
        return Err(SpecialError::DomainError { name, at: tau });
    }
    Ok(())
}

fn check_exponent(s: f64) -> Result<(), SpecialError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(SpecialError::InvalidInput(format!("exponent s = {s} must lie in (0,1)")));
    }
    Ok(())
}

/// (1+x)^a + (1−x)^a − 2 for 0 ≤ x < 1, accurate for small x.
fn even_binomial_excess(a: f64, x: f64) -> f64 {
    if x < 0.1 {
        let x2 = x * x;
        let mut coef = 1.0;
        let mut pow = 1.0;
        let mut sum = 0.0;
        for k in 1..40 {
            let n = 2 * k;
            coef *= (a - (n - 2) as f64) * (a - (n - 1) as f64) / (((n - 1) * n) as f64);
            pow *= x2;
            let term = 2.0 * coef * pow;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (1.0 + x).powf(a) + (1.0 - x).powf(a) - 2.0
    }
}

fn phi_s_unchecked(tau: f64, s: f64) -> f64 {
    let a = s - 1.0;
    if tau > 10.0 {
        tau.powf(a) * even_binomial_excess(a, 1.0 / tau)
    } else {
        (tau + 1.0).powf(a) + (tau - 1.0).abs().powf(a) - 2.0 * tau.powf(a)
    }
}

/// Φ_s at 1 + h, resolving the singular term through h.
fn phi_s_near_one(h: f64, s: f64) -> f64 {
    let a = s - 1.0;
    (2.0 + h).powf(a) + h.abs().powf(a) - 2.0 * (1.0 + h).powf(a)
}

/// Φ_s(τ) = |τ+1|^{s−1} + |τ−1|^{s−1} − 2|τ|^{s−1}.
pub fn phi_s(tau: f64, s: f64) -> Result<f64, SpecialError> {
    check_tau("phi_s", tau)?;
    check_exponent(s)?;
    Ok(phi_s_unchecked(tau, s))
}

/// Φ = Φ_{1/2}.
pub fn phi(tau: f64) -> Result<f64, SpecialError> {
    phi_s(tau, 0.5)
}

/// Λ(τ) = −log|1 − 1/τ²|.
pub fn lambda_fn(tau: f64) -> Result<f64, SpecialError> {
    check_tau("lambda", tau)?;
    Ok(lambda_unchecked(tau))
}

fn lambda_unchecked(tau: f64) -> f64 {
    let q = 1.0 / (tau * tau);
    if tau > 1.0 {
        -(-q).ln_1p()
    } else {
        -(q - 1.0).ln()
    }
}

fn lambda_near_one(h: f64) -> f64 {
    // 1 − 1/τ² = h(2+h)/(1+h)²
    -(h.abs().ln() + (2.0 + h).ln() - 2.0 * h.ln_1p())
}

/// Ψ(τ) = log|(1+τ)/(1−τ)| for τ ≥ 0.
pub fn psi_fn(tau: f64) -> Result<f64, SpecialError> {
    if !(tau >= 0.0) || tau == 1.0 || !tau.is_finite() {
        return Err(SpecialError::DomainError { name: "psi", at: tau });
    }
    Ok(psi_unchecked(tau))
}

fn psi_unchecked(tau: f64) -> f64 {
    if tau < 1.0 {
        tau.ln_1p() - (-tau).ln_1p()
    } else {
        (2.0 / (tau - 1.0)).ln_1p()
    }
}

/// Γ(τ) = |τ−1|^{−1/2} − (τ+1)^{−1/2}.
pub fn gamma_fn(tau: f64) -> Result<f64, SpecialError> {
    check_tau("gamma", tau)?;
    Ok(if tau > 1.0 {
        let sp = (tau + 1.0).sqrt();
        let sm = (tau - 1.0).sqrt();
        2.0 / ((sp + sm) * sp * sm)
    } else {
        (1.0 - tau).powf(-0.5) - (1.0 + tau).powf(-0.5)
    })
}

/// β_s = B(s,s)/2.
pub fn beta_s(s: f64) -> Result<f64, SpecialError> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(SpecialError::InvalidInput(format!("beta_s needs s > 0, got {s}")));
    }
    Ok(0.5 * (2.0 * ln_gamma(s) - ln_gamma(2.0 * s)).exp())
}

/// Φ_s(τ)·τ^w as an integrand that resolves τ = 1 through the offset.
fn phi_weighted(s: f64, w: f64) -> impl Integrand {
    Anchored(move |anchor: f64, h: f64| {
        let tau = anchor + h;
        if tau <= 0.0 {
            return 0.0;
        }
        let core = if anchor == 1.0 {
            phi_s_near_one(h, s)
        } else {
            phi_s_unchecked(tau, s)
        };
        if w == 0.0 {
            core
        } else {
            core * tau.powf(w)
        }
    })
}

/// Singularities of Φ_s(τ)τ^w on [0, ∞): τ = 0 (when singular) and τ = 1.
fn phi_singularities(s: f64, w: f64) -> Vec<Singularity> {
    let mut v = Vec::new();
    let s0 = s + w;
    if s0 > 0.0 && s0 < 1.0 {
        v.push(Singularity::algebraic(0.0, s0).expect("exponent in (0,1)"));
    }
    v.push(Singularity::algebraic(1.0, s).expect("exponent in (0,1)"));
    v
}

/// ∫₀^∞ Φ_s(τ)τ^w dτ. Large-τ decay is τ^{s+w−3}, so the tail order is 3−s−w.
fn phi_moment(s: f64, w: f64, cfg: &QuadratureConfig) -> Result<f64, SpecialError> {
    let f = phi_weighted(s, w);
    let sings = phi_singularities(s, w);
    let p = 3.0 - s - w;
    let head = integrate_panel(&f, 0.0, 2.0, &sings, cfg)?;
    let tail = integrate_tail_with(&f, 2.0, p, &[], cfg)?;
    Ok(head.value + tail.value)
}

/// Checks ∫₀^∞ Φ_s(τ)τ^s dτ = β_s.
pub fn verify_beta_identity(s: f64, cfg: &QuadratureConfig) -> Result<IdentityReport, SpecialError> {
    check_exponent(s)?;
    let computed = phi_moment(s, s, cfg)?;
    Ok(IdentityReport::value(
        format!("beta identity, s = {s:.2}"),
        computed,
        beta_s(s)?,
        1e-8,
    ))
}

/// ∫_a^b Φ(τ)τ^w with the singular points inside [a, b] declared.
fn phi_segment(a: f64, b: f64, w: f64, cfg: &QuadratureConfig) -> Result<f64, SpecialError> {
    let f = phi_weighted(0.5, w);
    let sings: Vec<Singularity> = phi_singularities(0.5, w)
        .into_iter()
        .filter(|s| s.location >= a && s.location <= b)
        .collect();
    Ok(integrate_panel(&f, a, b, &sings, cfg)?.value)
}

/// ∫_a^∞ Φ(τ)τ^w for a ≥ 0.
fn phi_upper(a: f64, w: f64, cfg: &QuadratureConfig) -> Result<f64, SpecialError> {
    let f = phi_weighted(0.5, w);
    let p = 2.5 - w;
    if a < 2.0 {
        let head = phi_segment(a, 2.0, w, cfg)?;
        Ok(head + integrate_tail_with(&f, 2.0, p, &[], cfg)?.value)
    } else {
        Ok(integrate_tail_with(&f, a, p, &[], cfg)?.value)
    }
}

/// Checks ∫₀^∞ Φ dτ = 0. The two sign-definite pieces are integrated to
/// relative accuracy and then added.
pub fn verify_phi_zero_mass(cfg: &QuadratureConfig) -> Result<IdentityReport, SpecialError> {
    let t0 = tau0();
    let lower = phi_segment(0.0, t0, 0.0, cfg)?;
    let upper = phi_upper(t0, 0.0, cfg)?;
    let tol = 1e-8f64.max(100.0 * cfg.rel_tol * lower.abs());
    Ok(IdentityReport::value("integral of Phi vanishes", lower + upper, 0.0, tol))
}

/// ∫₀^∞ Φ(τ)τ^{1/2} dτ = π/2.
pub fn verify_phi_half_moment(cfg: &QuadratureConfig) -> Result<IdentityReport, SpecialError> {
    let computed = phi_moment(0.5, 0.5, cfg)?;
    Ok(IdentityReport::value("integral of Phi tau^(1/2) equals pi/2", computed, PI / 2.0, 1e-8))
}

/// ∫_{τ₀}^∞ Φ(τ)τ^{1/2} dτ = π/2 + b.
pub fn verify_upper_half_moment(cfg: &QuadratureConfig) -> Result<IdentityReport, SpecialError> {
    let computed = phi_upper(tau0(), 0.5, cfg)?;
    Ok(IdentityReport::value(
        "integral of Phi tau^(1/2) beyond tau0 equals pi/2 + b",
        computed,
        PI / 2.0 + b_constant(),
        1e-8,
    ))
}

fn pv_integrand(tau: f64) -> f64 {
    let num = if tau > 1.0 {
        2.0 / ((1.0 + tau).sqrt() + (tau - 1.0).sqrt())
    } else {
        (1.0 + tau).sqrt() - (1.0 - tau).sqrt()
    };
    num * tau.powf(-1.5)
}

/// ∫₀^∞ ((1+τ)^{1/2} − |1−τ|^{1/2}) τ^{−3/2} dτ = π.
///
/// Near 0 the integrand behaves like τ^{−1/2}; near 1 like a square-root
/// kink; at infinity like τ^{−2}.
pub fn verify_pv_integral(cfg: &QuadratureConfig) -> Result<IdentityReport, SpecialError> {
    let f = |t: f64| pv_integrand(t);
    let near = [
        Singularity::algebraic(0.0, 0.5).expect("valid"),
        Singularity::algebraic(1.0, 0.5).expect("valid"),
    ];
    let head = integrate_panel(&f, 0.0, 2.0, &near, cfg)?;
    let tail = integrate_tail_with(&f, 2.0, 2.0, &[], cfg)?;
    Ok(IdentityReport::value(
        "principal-value integral equals pi",
        head.value + tail.value,
        PI,
        1e-8,
    ))
}

/// Certified bracket for the root of Φ in (1/2, 2/3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
}

impl RootBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bisection for the root of Φ, stopping at width 1e−13.
pub fn tau0_bracket() -> RootBracket {
    static CELL: OnceLock<RootBracket> = OnceLock::new();
    *CELL.get_or_init(|| {
        let f = |t: f64| phi_s_unchecked(t, 0.5);
        let (mut lo, mut hi) = (0.5, 2.0 / 3.0);
        debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        RootBracket { lo, hi }
    })
}

/// The unique root τ₀ of Φ in (0,1).
pub fn tau0() -> f64 {
    tau0_bracket().midpoint()
}

/// −∫₀ᵗ Φ(τ)τ^{1/2} dτ in closed form.
pub fn b_closed(t: f64) -> Result<f64, SpecialError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(SpecialError::DomainError { name: "b_closed", at: t });
    }
    Ok(b_closed_unchecked(t))
}

fn b_closed_unchecked(t: f64) -> f64 {
    let r = t.sqrt();
    2.0 * t - 2.0 * t * r / ((1.0 + t).sqrt() + (1.0 - t).sqrt()) + r.asinh() - r.asin()
}

/// ∫₀ᵗ Φ(τ) dτ for 0 ≤ t ≤ 1, in closed form.
pub fn phi_integral_closed(t: f64) -> f64 {
    2.0 * (1.0 + t).sqrt() - 2.0 * (1.0 - t).sqrt() - 4.0 * t.sqrt()
}

/// b = −∫₀^{τ₀} Φ(τ)τ^{1/2} dτ.
pub fn b_constant() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| b_closed_unchecked(tau0()))
}

/// The gap function f(σ) for σ ≥ 1, with the kink of min(1, στ^{1/2})
/// at τ = σ^{−2} taken as a panel boundary.
pub fn f_sigma(sigma: f64, cfg: &QuadratureConfig) -> Result<f64, SpecialError> {
    if !(sigma >= 1.0) || !sigma.is_finite() {
        return Err(SpecialError::InvalidInput(format!("f_sigma needs sigma >= 1, got {sigma}")));
    }
    let t0 = tau0();
    let b = b_constant();
    let kink = sigma.powi(-2);
    let first = if kink >= t0 {
        sigma * phi_segment(0.0, t0, 0.5, cfg)?
    } else {
        sigma * phi_segment(0.0, kink, 0.5, cfg)? + phi_segment(kink, t0, 0.0, cfg)?
    };
    Ok(first + b / (sigma * sigma) + (PI / 2.0 + b) * (1.0 - 1.0 / sigma))
}

/// J(σ) = ∫₀^{τ₀} Φ(τ) min(1, στ^{1/2}) dτ from closed forms.
fn min_weighted_integral(sigma: f64) -> f64 {
    let t0 = tau0();
    let kink = sigma.powi(-2);
    if kink >= t0 {
        -sigma * b_constant()
    } else {
        -sigma * b_closed_unchecked(kink) + phi_integral_closed(t0) - phi_integral_closed(kink)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityStatus {
    pub satisfies_upper: bool,
    pub satisfies_lower: bool,
    /// M² − (m∫₀^{τ₀}Φτ^{1/2} + M∫_{τ₀}^∞Φτ^{1/2}); nonpositive when satisfied.
    pub upper_violation: f64,
    /// ∫₀^{τ₀}Φ·min(m, Mτ^{1/2}) + m∫_{τ₀}^∞Φτ^{1/2} − m²; nonpositive when satisfied.
    pub lower_violation: f64,
}

/// Evaluates both limsup/liminf inequalities at (m, M).
pub fn inequality_region(m: f64, big_m: f64) -> Result<InequalityStatus, SpecialError> {
    if !(m > 0.0) || !(big_m >= m) || !big_m.is_finite() {
        return Err(SpecialError::InvalidInput(format!("need 0 < m <= M, got m = {m}, M = {big_m}")));
    }
    let b = b_constant();
    let upper_integral = PI / 2.0 + b;
    let upper_violation = big_m * big_m - (-m * b + big_m * upper_integral);
    let lower_violation = m * min_weighted_integral(big_m / m) + m * upper_integral - m * m;
    Ok(InequalityStatus {
        satisfies_upper: upper_violation <= 0.0,
        satisfies_lower: lower_violation <= 0.0,
        upper_violation,
        lower_violation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub resolution: usize,
    pub extent: f64,
    pub slack: f64,
    /// Grid points satisfying both inequalities exactly.
    pub exact: Vec<(f64, f64)>,
    /// Grid points whose violations are within `slack` relative to m² and M².
    pub near: Vec<(f64, f64)>,
}

impl ScanResult {
    /// Largest distance from (π/2, π/2) over the listed points.
    pub fn max_distance(points: &[(f64, f64)]) -> f64 {
        points
            .iter()
            .map(|&(m, mm)| (m - PI / 2.0).hypot(mm - PI / 2.0))
            .fold(0.0, f64::max)
    }
}

/// Scans (0, extent]² on an n×n grid restricted to m ≤ M.
pub fn scan_inequalities(n: usize, extent: f64, slack: f64) -> ScanResult {
    let h = extent / n as f64;
    let mut exact = Vec::new();
    let mut near = Vec::new();
    for i in 1..=n {
        let m = h * i as f64;
        for j in i..=n {
            let big_m = h * j as f64;
            let st = inequality_region(m, big_m).expect("grid points are valid");
            if st.satisfies_upper && st.satisfies_lower {
                exact.push((m, big_m));
            }
            if st.upper_violation <= slack * big_m * big_m && st.lower_violation <= slack * m * m {
                near.push((m, big_m));
            }
        }
    }
    ScanResult {
        resolution: n,
        extent,
        slack,
        exact,
        near,
    }
}

/// Value of a limit candidate at a sequence of small x, with its extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLimitSeries {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub extrapolated: f64,
}

/// Least-squares polynomial fit of `ys` against `ts`, returning the value at t = 0.
pub(crate) fn polyfit_intercept(ts: &[f64], ys: &[f64], degree: usize) -> f64 {
    let n = degree + 1;
    let mut a = nalgebra::DMatrix::<f64>::zeros(ts.len(), n);
    for (i, &t) in ts.iter().enumerate() {
        let mut p = 1.0;
        for j in 0..n {
            a[(i, j)] = p;
            p *= t;
        }
    }
    let b = nalgebra::DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let coef = svd.solve(&b, 1e-14).expect("least squares");
    coef[0]
}

/// ∫_1^{ν/x} Λ(τ) τ log(1/(τx)) / log(1/x)² dτ, integrated in s = log τ beyond τ = 2.
fn log_aux_integral(x: f64, nu: f64, cfg: &QuadratureConfig) -> Result<f64, SpecialError> {
    let big_l = (1.0 / x).ln();
    let z = nu / x;
    let near = Anchored(move |a: f64, h: f64| {
        let tau = a + h;
        let lam = if a == 1.0 { lambda_near_one(h) } else { lambda_unchecked(tau) };
        lam * tau * (big_l - tau.ln())
    });
    let head = integrate_panel(&near, 1.0, 2.0f64.min(z), &[Singularity::logarithmic(1.0)], cfg)?.value;
    let mut total = head;
    if z > 2.0 {
        let far = move |s: f64| {
            let tau = s.exp();
            lambda_unchecked(tau) * tau * tau * (big_l - s)
        };
        total += integrate_panel(&far, 2f64.ln(), z.ln(), &[], cfg)?.value;
    }
    Ok(total / (big_l * big_l))
}

/// ∫_2^{δ/x} Ψ′(τ) τ log(1/(τx)) / log(1/x)² dτ with Ψ′(τ) = −2/(τ²−1).
fn log_derivative_aux_integral(x: f64, delta: f64, cfg: &QuadratureConfig) -> Result<f64, SpecialError> {
    let big_l = (1.0 / x).ln();
    let far = move |s: f64| {
        let tau = s.exp();
        -2.0 * tau * tau / (tau * tau - 1.0) * (big_l - s)
    };
    let v = integrate_panel(&far, 2f64.ln(), (delta / x).ln(), &[], cfg)?.value;
    Ok(v / (big_l * big_l))
}

fn extrapolate_log_limit<F>(eval: F) -> Result<LogLimitSeries, SpecialError>
where
    F: Fn(f64) -> Result<f64, SpecialError>,
{
    let xs: Vec<f64> = (12..=48).step_by(4).map(|j| 2f64.powi(-j)).collect();
    let values = xs.iter().map(|&x| eval(x)).collect::<Result<Vec<_>, _>>()?;
    let ts: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 / x).ln()).collect();
    let extrapolated = polyfit_intercept(&ts, &values, 3);
    Ok(LogLimitSeries {
        xs,
        values,
        extrapolated,
    })
}

/// The three auxiliary limits of the logarithmic case, each evaluated along
/// x = 2^{−j} and extrapolated in 1/log(1/x).
pub fn log_limit_series(cfg: &QuadratureConfig) -> Result<Vec<(String, f64, LogLimitSeries)>, SpecialError> {
    Ok(vec![
        (
            "auxiliary integral with weight x log(1/x), nu = 1/4".into(),
            0.5,
            extrapolate_log_limit(|x| log_aux_integral(x, 0.25, cfg))?,
        ),
        (
            "log-kernel crest limit, nu = 1/8".into(),
            0.5,
            extrapolate_log_limit(|x| log_aux_integral(x, 0.125, cfg))?,
        ),
        (
            "integral of Psi' tau log(1/(tau x)), delta = 1/4".into(),
            -1.0,
            extrapolate_log_limit(|x| log_derivative_aux_integral(x, 0.25, cfg))?,
        ),
    ])
}

/// Reports for the auxiliary logarithmic limits (tolerance 0.02).
pub fn verify_log_limits(cfg: &QuadratureConfig) -> Result<Vec<IdentityReport>, SpecialError> {
    Ok(log_limit_series(cfg)?
        .into_iter()
        .map(|(name, target, series)| IdentityReport::value(name, series.extrapolated, target, 0.02))
        .collect())
}

/// Every identity and constant check of this module.
pub fn identity_suite(cfg: &QuadratureConfig) -> Result<Vec<IdentityReport>, SpecialError> {
    let mut out = vec![verify_phi_half_moment(cfg)?, verify_phi_zero_mass(cfg)?];
    for k in 1..=9 {
        out.push(verify_beta_identity(k as f64 / 10.0, cfg)?);
    }
    out.push(verify_pv_integral(cfg)?);
    out.push(verify_upper_half_moment(cfg)?);
    out.extend(constants_suite(cfg)?);
    out.extend(verify_log_limits(cfg)?);
    Ok(out)
}

/// τ₀ bracket, b bounds and positivity of f.
pub fn constants_suite(cfg: &QuadratureConfig) -> Result<Vec<IdentityReport>, SpecialError> {
    let br = tau0_bracket();
    let mut out = vec![
        IdentityReport::interval("tau0 lies in (1/2, 2/3)", tau0(), 0.5, 2.0 / 3.0),
        IdentityReport::predicate(
            "tau0 bracket width at most 1e-12",
            br.width(),
            Expected::Interval { lo: 0.0, hi: 1e-12 },
            br.width() <= 1e-12 && phi_s_unchecked(br.lo, 0.5) < 0.0 && phi_s_unchecked(br.hi, 0.5) > 0.0,
        ),
        IdentityReport::interval("b lies in (1/2, 3/5)", b_constant(), 0.5, 0.6),
        IdentityReport::value("f(1) = 0", f_sigma(1.0, cfg)?, 0.0, 1e-10),
    ];
    let f2 = f_sigma(2.0, cfg)?;
    out.push(IdentityReport::predicate(
        "f(2) >= (pi - 3)/4",
        f2,
        Expected::Interval { lo: (PI - 3.0) / 4.0, hi: f64::INFINITY },
        f2 >= (PI - 3.0) / 4.0,
    ));
    let mut min_f = f64::INFINITY;
    for i in 1..=200 {
        let sigma = 100f64.powf(i as f64 / 200.0);
        min_f = min_f.min(f_sigma(sigma, cfg)?);
    }
    out.push(IdentityReport::predicate(
        "f positive on a 200-point log grid over (1, 100]",
        min_f,
        Expected::Interval { lo: 0.0, hi: f64::INFINITY },
        min_f > 0.0,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn phi_at_three() {
        let v = phi(3.0).unwrap();
        let exact = 0.5 + 2f64.powf(-0.5) - 2.0 / 3f64.sqrt();
        assert!((v - exact).abs() < 1e-15);
        assert!((v - 0.05237).abs() < 1e-4);
    }

    #[test]
    fn phi_large_tau_decay() {
        for tau in [1e3, 1e4] {
            let q = phi(tau).unwrap() * tau.powf(2.5);
            assert!((q - 0.75).abs() < 2.0 / tau, "tau {tau}: {q}");
        }
        // series and direct evaluation agree where both are accurate
        let x = 0.0999;
        let direct = (1.0f64 + x).powf(-0.5) + (1.0f64 - x).powf(-0.5) - 2.0;
        let series = even_binomial_excess(-0.5, x);
        assert!((direct - series).abs() < 1e-13 * series.abs());
    }

    #[test]
    fn phi_sign_change_bracket() {
        assert!(phi(0.5).unwrap() < 0.0 && phi(2.0 / 3.0).unwrap() > 0.0);
        assert!(phi(0.0).is_err() && phi(1.0).is_err());
    }

    #[test]
    fn lambda_values() {
        assert!((lambda_fn(2f64.sqrt()).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(lambda_fn(0.5f64.sqrt()).unwrap().abs() < 1e-15);
        let t: f64 = 100.0;
        let series = 1.0 / t.powi(2) + 0.5 / t.powi(4) + 1.0 / (3.0 * t.powi(6)) + 0.25 / t.powi(8);
        assert!((lambda_fn(t).unwrap() - series).abs() < 1e-18);
        assert!((lambda_near_one(0.25) - lambda_unchecked(1.25)).abs() < 1e-14);
        assert!((lambda_near_one(-0.25) - lambda_unchecked(0.75)).abs() < 1e-14);
    }

    #[test]
    fn psi_and_gamma_values() {
        assert_eq!(psi_fn(0.0).unwrap(), 0.0);
        assert!((psi_fn(3.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(psi_fn(0.2).unwrap() < psi_fn(0.8).unwrap());
        assert!((gamma_fn(3.0).unwrap() - (0.5f64.sqrt() - 0.5)).abs() < 1e-15);
        let t: f64 = 1e6;
        assert!((gamma_fn(t).unwrap() * t.powf(1.5) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn beta_values() {
        assert!((beta_s(0.5).unwrap() - PI / 2.0).abs() < 1e-13);
        assert!((beta_s(1.0).unwrap() - 0.5).abs() < 1e-14);
        // Γ(1/4) = 3.625609908221908311930685155867672...
        let g = 3.625_609_908_221_908_3_f64;
        let expected = 0.5 * g * g / PI.sqrt();
        assert!((beta_s(0.25).unwrap() - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn tau0_is_bracketed_root() {
        let br = tau0_bracket();
        assert!(br.width() <= 1e-13);
        assert!(br.lo > 0.5 && br.hi < 2.0 / 3.0);
        assert!(phi(tau0()).unwrap().abs() < 1e-12);
        assert!((tau0() - 0.652_902_079_777_6).abs() < 1e-12);
    }

    #[test]
    fn b_closed_matches_quadrature() {
        let q = -phi_segment(0.0, 0.4, 0.5, &cfg()).unwrap();
        assert!((b_closed(0.4).unwrap() - q).abs() < 1e-9);
        assert!(b_closed(2.0 / 3.0).unwrap() > 0.5);
        let b = b_constant();
        assert!(b > 0.5 && b < 0.6);
        let q = phi_segment(0.0, 0.3, 0.0, &cfg()).unwrap();
        assert!((phi_integral_closed(0.3) - q).abs() < 1e-10);
    }

    #[test]
    fn f_sigma_values() {
        let c = cfg();
        assert!(f_sigma(1.0, &c).unwrap().abs() < 1e-10);
        assert!(f_sigma(2.0, &c).unwrap() >= (PI - 3.0) / 4.0);
        for s in [1.01, 1.5, 2f64.sqrt(), 5.0, 50.0] {
            let direct = f_sigma(s, &c).unwrap();
            let closed = min_weighted_integral(s) + b_constant() / (s * s) + (PI / 2.0 + b_constant()) * (1.0 - 1.0 / s);
            assert!(direct > 0.0);
            assert!((direct - closed).abs() < 1e-9, "{s}: {direct} vs {closed}");
        }
        assert!(f_sigma(0.5, &c).is_err());
    }

    #[test]
    fn f_increasing_beyond_sqrt_two() {
        let c = cfg();
        for s in [1.5, 2.0, 4.0, 10.0, 40.0] {
            let d = f_sigma(s * 1.01, &c).unwrap() - f_sigma(s, &c).unwrap();
            assert!(d > 0.0, "{s}");
        }
    }

    #[test]
    fn inequality_equality_point() {
        let st = inequality_region(PI / 2.0, PI / 2.0).unwrap();
        assert!(st.upper_violation.abs() < 1e-8 && st.lower_violation.abs() < 1e-8);
        let st = inequality_region(0.1, 10.0).unwrap();
        assert!(!(st.satisfies_upper && st.satisfies_lower));
        assert!(inequality_region(2.0, 1.0).is_err());
        assert!(inequality_region(0.0, 1.0).is_err());
    }

    #[test]
    fn beta_identity_selected_exponents() {
        for s in [0.3, 0.5, 0.7] {
            let r = verify_beta_identity(s, &cfg()).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn zero_mass_and_split() {
        let r = verify_phi_zero_mass(&cfg()).unwrap();
        assert!(r.passed, "{r:?}");
        let coarse = verify_phi_zero_mass(&cfg().with_rel_tol(1e-4)).unwrap();
        assert!(coarse.computed.abs() < 1e-3);
    }

    #[test]
    fn pv_integral_and_integrand() {
        assert!((pv_integrand(1.0) - 2f64.sqrt()).abs() < 1e-15);
        let t: f64 = 1e8;
        assert!((pv_integrand(t) * t * t - 1.0).abs() < 1e-6);
        let r = verify_pv_integral(&cfg()).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn polyfit_recovers_intercept() {
        let ts = [0.1, 0.2, 0.3, 0.4, 0.5];
        let ys: Vec<f64> = ts.iter().map(|t| 2.0 - t + 3.0 * t * t).collect();
        assert!((polyfit_intercept(&ts, &ys, 2) - 2.0).abs() < 1e-12);
    }
}
