//! Even periodic steady waves by cosine Galerkin discretisation, Newton
//! iteration and continuation in crest height.
//!
//! Unidirectional: `K_W*φ − φ(c − φ) = 0`.
//! Bidirectional: `K_B*v − v(c − v)(c − v/2) = 0`.
//!
//! A profile is `Σ_{k≤N} a_k cos(2πkx/P)`. Products are formed on a
//! `4N` cosine grid, which projects quadratic and cubic terms exactly.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use log::{debug, info};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{periodized_fourier_coefficients, KernelError, KernelSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("crest height {height} exceeds the admissible maximum {height_max}")]
    HeightBoundViolated { height: f64, height_max: f64 },
    #[error("branch stalled at height {mu} with step {step:e}")]
    BranchStalled { mu: f64, step: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveFamily {
    Unidirectional,
    Bidirectional,
}

impl WaveFamily {
    pub fn kernel(self) -> KernelSpec {
        match self {
            WaveFamily::Unidirectional => KernelSpec::whitham(),
            WaveFamily::Bidirectional => KernelSpec::bidirectional(),
        }
    }

    /// Maximal crest height: `c/2`, resp. `(1 − 1/√3)c`.
    pub fn height_max(self, c: f64) -> f64 {
        self.height_slope() * c
    }

    fn height_slope(self) -> f64 {
        match self {
            WaveFamily::Unidirectional => 0.5,
            WaveFamily::Bidirectional => 1.0 - 1.0 / 3f64.sqrt(),
        }
    }

    /// Speed at which the first cosine mode bifurcates from zero. The
    /// bidirectional nonlinearity linearises to `c²v`, so `c₀² = K̂_B(2π/P)`.
    pub fn bifurcation_speed(self, period: f64) -> f64 {
        let s = self.kernel().symbol(2.0 * PI / period);
        match self {
            WaveFamily::Unidirectional => s,
            WaveFamily::Bidirectional => s.sqrt(),
        }
    }
}

impl std::fmt::Display for WaveFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WaveFamily::Unidirectional => "whitham",
            WaveFamily::Bidirectional => "bidirectional",
        })
    }
}

impl std::str::FromStr for WaveFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "whitham" | "unidirectional" => Ok(WaveFamily::Unidirectional),
            "bidirectional" => Ok(WaveFamily::Bidirectional),
            other => Err(format!("unknown family '{other}' (expected whitham or bidirectional)")),
        }
    }
}

/// An even periodic profile. `grid_values` holds `2N` samples at
/// `x_j = jP/(2N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub family: WaveFamily,
    pub period: f64,
    pub speed_c: f64,
    pub modes: Vec<f64>,
    #[serde(rename = "grid")]
    pub grid_values: Vec<f64>,
    pub residual_norm: f64,
}

impl WaveProfile {
    pub fn new(family: WaveFamily, period: f64, modes: Vec<f64>, speed_c: f64, residual_norm: f64) -> Self {
        let grid_values = cosine_series_on_grid(&modes, 2 * (modes.len() - 1).max(1));
        Self {
            family,
            period,
            speed_c,
            modes,
            grid_values,
            residual_norm,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len() - 1
    }

    /// Crest value `Σ a_k`.
    pub fn crest(&self) -> f64 {
        self.modes.iter().rev().sum()
    }

    pub fn height_max(&self) -> f64 {
        self.family.height_max(self.speed_c)
    }

    /// `height_max(c) − crest`.
    pub fn gap(&self) -> f64 {
        self.height_max() - self.crest()
    }

    /// Samples at `x_j = jP/(factor·2N)`, `j < factor·2N`.
    pub fn oversampled(&self, factor: usize) -> Vec<f64> {
        cosine_series_on_grid(&self.modes, 2 * self.mode_count() * factor.max(1))
    }

    /// Grid spacing of `grid_values`.
    pub fn spacing(&self) -> f64 {
        self.period / self.grid_values.len() as f64
    }

    /// Whether the grid values decrease on the half period, up to the
    /// ringing left by truncating a cusped profile (twice the last mode).
    pub fn decreasing_on_half_period(&self) -> bool {
        let half = self.grid_values.len() / 2;
        let slack = 2.0 * self.modes.last().map_or(0.0, |a| a.abs());
        self.grid_values[..=half].windows(2).all(|w| w[1] < w[0] + slack)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serialises")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// `Σ_{k<len} a_k cos(2πkj/n)` for `j < n`, with `n ≥ 2(len − 1)`.
fn cosine_series_on_grid(a: &[f64], n: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, &v) in a.iter().enumerate() {
        buf[k % n] += v;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// `Σ_{k<len} b_k sin(2πkj/n)` for `j < n`.
fn sine_series_on_grid(b: &[f64], n: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, &v) in b.iter().enumerate() {
        buf[k % n] += v;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.into_iter().map(|z| z.im).collect()
}

/// Derivative of the profile at the `2N` grid points.
pub fn spectral_derivative(profile: &WaveProfile) -> Vec<f64> {
    let k0 = 2.0 * PI / profile.period;
    let b: Vec<f64> = profile
        .modes
        .iter()
        .enumerate()
        .map(|(k, &a)| -(k as f64) * k0 * a)
        .collect();
    sine_series_on_grid(&b, profile.grid_values.len())
}

/// Cosine transforms on the `M + 1` points `x_j = πj/M` (DCT-I through a
/// complex FFT of length `2M`).
struct CosineGrid {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl CosineGrid {
    fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            m,
            forward: planner.plan_fft_forward(2 * m),
            inverse: planner.plan_fft_inverse(2 * m),
        }
    }

    fn to_grid(&self, a: &[f64]) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * self.m];
        for (k, &v) in a.iter().enumerate().take(self.m + 1) {
            buf[k] = Complex64::new(v, 0.0);
        }
        self.inverse.process(&mut buf);
        buf[..=self.m].iter().map(|z| z.re).collect()
    }

    /// All `M + 1` cosine coefficients of grid data.
    fn from_grid(&self, v: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * m];
        for j in 0..=m {
            buf[j] = Complex64::new(v[j], 0.0);
        }
        for j in 1..m {
            buf[2 * m - j] = Complex64::new(v[j], 0.0);
        }
        self.forward.process(&mut buf);
        let mut a: Vec<f64> = buf[..=m].iter().map(|z| z.re / m as f64).collect();
        a[0] *= 0.5;
        a[m] *= 0.5;
        a
    }
}

/// Constraint closing the system with `c` as an unknown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pin {
    /// Crest height `Σ a_k = μ`.
    Height(f64),
    /// `height_max(c) − Σ a_k = ε`.
    Gap(f64),
}

/// Discretised steady equation for one family, period and mode count.
pub struct GalerkinProblem {
    pub family: WaveFamily,
    pub period: f64,
    pub n: usize,
    multiplier: Vec<f64>,
    grid: CosineGrid,
}

struct Linearization {
    /// Diagonal `K̂_k − c` or `K̂_k − c²`.
    base: Vec<f64>,
    /// Cosine coefficients of the multiplication operator, up to `4N`.
    w_coeffs: Vec<f64>,
    w_grid: Vec<f64>,
    /// Derivative of the residual in `c`.
    dc: Vec<f64>,
}

impl GalerkinProblem {
    pub fn new(family: WaveFamily, period: f64, n: usize) -> Result<Self, SolverError> {
        let multiplier = periodized_fourier_coefficients(&family.kernel(), period, n)?;
        Ok(Self {
            family,
            period,
            n,
            multiplier,
            grid: CosineGrid::new(4 * n),
        })
    }

    /// Galerkin residual coefficients `r_0..r_N`.
    pub fn residual_coefficients(&self, a: &[f64], c: f64) -> Vec<f64> {
        let v = self.grid.to_grid(a);
        let (nl, shift): (Vec<f64>, f64) = match self.family {
            WaveFamily::Unidirectional => (v.iter().map(|x| x * x).collect(), c),
            WaveFamily::Bidirectional => (
                v.iter().map(|x| 1.5 * c * x * x - 0.5 * x * x * x).collect(),
                c * c,
            ),
        };
        let p = self.grid.from_grid(&nl);
        (0..=self.n)
            .map(|k| (self.multiplier[k] - shift) * a[k] + p[k])
            .collect()
    }

    /// Sup norm of a cosine series on the fine grid.
    pub fn sup_norm(&self, r: &[f64]) -> f64 {
        self.grid.to_grid(r).iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn pin_residual(&self, a: &[f64], c: f64, pin: Pin) -> f64 {
        let crest: f64 = a.iter().rev().sum();
        match pin {
            Pin::Height(mu) => crest - mu,
            Pin::Gap(eps) => self.family.height_max(c) - crest - eps,
        }
    }

    fn linearize(&self, a: &[f64], c: f64) -> Linearization {
        let v = self.grid.to_grid(a);
        let (w_grid, base, dc): (Vec<f64>, Vec<f64>, Vec<f64>) = match self.family {
            WaveFamily::Unidirectional => (
                v.iter().map(|x| 2.0 * x).collect(),
                self.multiplier.iter().map(|m| m - c).collect(),
                a.iter().map(|x| -x).collect(),
            ),
            WaveFamily::Bidirectional => {
                let sq = self.grid.from_grid(&v.iter().map(|x| 1.5 * x * x).collect::<Vec<_>>());
                (
                    v.iter().map(|x| 3.0 * c * x - 1.5 * x * x).collect(),
                    self.multiplier.iter().map(|m| m - c * c).collect(),
                    (0..=self.n).map(|k| -2.0 * c * a[k] + sq[k]).collect(),
                )
            }
        };
        Linearization {
            base,
            w_coeffs: self.grid.from_grid(&w_grid),
            w_grid,
            dc,
        }
    }

    fn pin_row(&self, pin: Pin) -> (f64, f64) {
        // (coefficient of each a_k, coefficient of c)
        match pin {
            Pin::Height(_) => (1.0, 0.0),
            Pin::Gap(_) => (-1.0, self.family.height_slope()),
        }
    }

    /// Projected multiplication `P[w·cos(lx)]` restricted to rows `≤ size`.
    fn jacobian_block(&self, lin: &Linearization, size: usize, pin: Pin) -> DMatrix<f64> {
        let wa = &lin.w_coeffs;
        let dim = size + 2;
        let mut j = DMatrix::zeros(dim, dim);
        for l in 0..=size {
            if l == 0 {
                for k in 0..=size {
                    j[(k, 0)] = wa[k];
                }
            } else {
                j[(0, l)] = 0.5 * wa[l];
                for k in 1..=size {
                    j[(k, l)] = 0.5 * (wa[k + l] + wa[k.abs_diff(l)]);
                }
                j[(l, l)] += 0.5 * wa[0];
            }
            j[(l, l)] += lin.base[l];
            j[(l, size + 1)] = lin.dc[l];
        }
        let (ra, rc) = self.pin_row(pin);
        for l in 0..=size {
            j[(size + 1, l)] = ra;
        }
        j[(size + 1, size + 1)] = rc;
        j
    }

    fn apply_jacobian(&self, lin: &Linearization, pin: Pin, z: &[f64]) -> Vec<f64> {
        let n = self.n;
        let da = &z[..=n];
        let dcc = z[n + 1];
        let g = self.grid.to_grid(da);
        let prod: Vec<f64> = g.iter().zip(&lin.w_grid).map(|(x, w)| x * w).collect();
        let p = self.grid.from_grid(&prod);
        let mut out: Vec<f64> = (0..=n)
            .map(|k| lin.base[k] * da[k] + p[k] + lin.dc[k] * dcc)
            .collect();
        let (ra, rc) = self.pin_row(pin);
        out.push(ra * da.iter().sum::<f64>() + rc * dcc);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Final mode count `N`.
    pub n: usize,
    pub period: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub step_min: f64,
    pub step_max: f64,
    pub step_init: f64,
    /// Continuation ends once `height_max(c) − μ < stop_gap`.
    pub stop_gap: f64,
    /// The final wave is placed at gap `landing_fraction · stop_gap`.
    pub landing_fraction: f64,
    /// Mode count used for the initial climb.
    pub start_modes: usize,
    /// Largest `N` solved with a dense LU; above it Newton–GMRES is used.
    pub dense_limit: usize,
    /// Size of the dense block in the GMRES preconditioner.
    pub coarse_modes: usize,
    pub gmres_restart: usize,
    pub gmres_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 1024,
            period: 2.0 * PI,
            newton_tol: 1e-11,
            newton_max_iter: 30,
            step_min: 1e-7,
            step_max: 0.05,
            step_init: 0.005,
            stop_gap: 1e-4,
            landing_fraction: 0.1,
            start_modes: 32,
            dense_limit: 512,
            coarse_modes: 256,
            gmres_restart: 200,
            gmres_tol: 1e-13,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidConfig(m.to_string()));
        if self.n < 16 {
            return bad("n must be at least 16");
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return bad("period must be positive");
        }
        if !(self.newton_tol > 0.0 && self.gmres_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.newton_max_iter == 0 {
            return bad("newton_max_iter must be positive");
        }
        if !(self.step_min > 0.0 && self.step_min <= self.step_init && self.step_init <= self.step_max) {
            return bad("need 0 < step_min ≤ step_init ≤ step_max");
        }
        if !(self.stop_gap > 0.0) {
            return bad("stop_gap must be positive");
        }
        if !(self.landing_fraction > 0.0 && self.landing_fraction <= 1.0) {
            return bad("landing_fraction must lie in (0, 1]");
        }
        if self.start_modes < 16 || self.coarse_modes < 16 || self.gmres_restart < 2 {
            return bad("start_modes and coarse_modes must be at least 16, gmres_restart at least 2");
        }
        Ok(())
    }
}

/// Outcome of a converged Newton solve.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub profile: WaveProfile,
    pub iterations: usize,
}

/// Newton iteration for the Galerkin system plus one pin equation.
pub fn newton_solve(
    problem: &GalerkinProblem,
    initial: &[f64],
    c_initial: f64,
    pin: Pin,
    cfg: &SolverConfig,
) -> Result<NewtonOutcome, SolverError> {
    let n = problem.n;
    let mut a = vec![0.0; n + 1];
    for (dst, src) in a.iter_mut().zip(initial) {
        *dst = *src;
    }
    let mut c = c_initial;
    let mut first = f64::NAN;
    for it in 0..=cfg.newton_max_iter {
        let r = problem.residual_coefficients(&a, c);
        let pr = problem.pin_residual(&a, c, pin);
        let norm = problem.sup_norm(&r).max(pr.abs());
        if !norm.is_finite() {
            return Err(SolverError::NoConvergence { iterations: it, residual: norm });
        }
        if it == 0 {
            first = norm;
        }
        debug!("newton {it}: N = {n}, residual {norm:e}, c = {c}");
        if norm <= cfg.newton_tol {
            let crest: f64 = a.iter().rev().sum();
            let hmax = problem.family.height_max(c);
            if crest > hmax + 1e-12 {
                return Err(SolverError::HeightBoundViolated { height: crest, height_max: hmax });
            }
            return Ok(NewtonOutcome {
                profile: WaveProfile::new(problem.family, problem.period, a, c, norm),
                iterations: it,
            });
        }
        if it == cfg.newton_max_iter || norm > 1e3 * first.max(1e-8) || !(c > 0.0 && c < 4.0) {
            return Err(SolverError::NoConvergence { iterations: it, residual: norm });
        }
        let mut rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        rhs.push(-pr);
        let lin = problem.linearize(&a, c);
        let delta = if n <= cfg.dense_limit {
            let j = problem.jacobian_block(&lin, n, pin);
            j.lu()
                .solve(&DVector::from_vec(rhs))
                .ok_or(SolverError::SingularJacobian)?
                .data
                .as_vec()
                .clone()
        } else {
            gmres_step(problem, &lin, pin, &rhs, cfg)?
        };
        if delta.iter().any(|d| !d.is_finite()) {
            return Err(SolverError::SingularJacobian);
        }
        for k in 0..=n {
            a[k] += delta[k];
        }
        c += delta[n + 1];
    }
    unreachable!("loop returns on its last iteration")
}

/// Right-preconditioned restarted GMRES for one Newton correction. The
/// preconditioner is the dense Jacobian on the lowest modes plus the
/// diagonal `base_k + w̄` above them.
fn gmres_step(
    problem: &GalerkinProblem,
    lin: &Linearization,
    pin: Pin,
    rhs: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>, SolverError> {
    let n = problem.n;
    let nc = cfg.coarse_modes.min(n);
    let coarse = problem.jacobian_block(lin, nc, pin).lu();
    let diag: Vec<f64> = lin.base.iter().map(|b| b + lin.w_coeffs[0]).collect();
    let precondition = |z: &[f64]| -> Result<Vec<f64>, SolverError> {
        let mut zc: Vec<f64> = z[..=nc].to_vec();
        zc.push(z[n + 1]);
        let sc = coarse
            .solve(&DVector::from_vec(zc))
            .ok_or(SolverError::SingularJacobian)?;
        let mut out = vec![0.0; n + 2];
        out[..=nc].copy_from_slice(&sc.as_slice()[..=nc]);
        out[n + 1] = sc[nc + 1];
        for k in nc + 1..=n {
            out[k] = z[k] / diag[k];
        }
        Ok(out)
    };
    let dim = n + 2;
    let bnorm = norm2(rhs);
    let mut x = vec![0.0; dim];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let m = cfg.gmres_restart;
    let mut total = 0;
    let max_total = 20 * m;
    loop {
        let ax = problem.apply_jacobian(lin, pin, &x);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, y)| b - y).collect();
        let beta = norm2(&r);
        if beta <= cfg.gmres_tol * bnorm {
            return Ok(x);
        }
        let mut v: Vec<Vec<f64>> = vec![r.iter().map(|t| t / beta).collect()];
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut used = 0;
        for j in 0..m {
            let mz = precondition(&v[j])?;
            let mut w = problem.apply_jacobian(lin, pin, &mz);
            for i in 0..=j {
                let hij = dot(&w, &v[i]);
                h[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(&v[i]) {
                    *wk -= hij * vk;
                }
            }
            let hn = norm2(&w);
            h[j + 1][j] = hn;
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let den = h[j][j].hypot(h[j + 1][j]);
            cs[j] = h[j][j] / den;
            sn[j] = h[j + 1][j] / den;
            h[j][j] = den;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            used = j + 1;
            total += 1;
            if g[j + 1].abs() <= cfg.gmres_tol * bnorm || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|t| t / hn).collect());
        }
        let mut y = vec![0.0; used];
        for i in (0..used).rev() {
            let s: f64 = (i + 1..used).map(|k| h[i][k] * y[k]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        let mut update = vec![0.0; dim];
        for (yi, vi) in y.iter().zip(&v) {
            for (u, t) in update.iter_mut().zip(vi) {
                *u += yi * t;
            }
        }
        let mu = precondition(&update)?;
        for (xi, d) in x.iter_mut().zip(&mu) {
            *xi += d;
        }
        debug!("gmres: {total} iterations, estimated residual {:e}", g[used].abs() / bnorm);
        if g[used].abs() <= cfg.gmres_tol * bnorm {
            return Ok(x);
        }
        if total >= max_total {
            // a loose correction still lets Newton proceed; its residual check decides
            return Ok(x);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Projected residual of the unidirectional equation at the `2N` grid points.
pub fn residual_unidirectional(profile: &WaveProfile, c: f64) -> Result<Vec<f64>, SolverError> {
    residual_on_grid(profile, WaveFamily::Unidirectional, c)
}

/// Projected residual of the bidirectional equation at the `2N` grid points.
pub fn residual_bidirectional(profile: &WaveProfile, c: f64) -> Result<Vec<f64>, SolverError> {
    residual_on_grid(profile, WaveFamily::Bidirectional, c)
}

fn residual_on_grid(profile: &WaveProfile, family: WaveFamily, c: f64) -> Result<Vec<f64>, SolverError> {
    let n = profile.mode_count().max(4);
    let problem = GalerkinProblem::new(family, profile.period, n)?;
    let mut a = profile.modes.clone();
    a.resize(n + 1, 0.0);
    let r = problem.residual_coefficients(&a, c);
    Ok(cosine_series_on_grid(&r, 2 * n))
}

/// `φ = cv − v²/2`, exactly: the result carries `2N` modes.
pub fn recover_phi(v: &WaveProfile, c: f64) -> WaveProfile {
    let n = v.mode_count();
    let grid = CosineGrid::new(4 * n.max(1));
    let vals = grid.to_grid(&v.modes);
    let sq = grid.from_grid(&vals.iter().map(|x| x * x).collect::<Vec<_>>());
    let modes: Vec<f64> = (0..=2 * n)
        .map(|k| c * v.modes.get(k).copied().unwrap_or(0.0) - 0.5 * sq[k])
        .collect();
    WaveProfile::new(v.family, v.period, modes, c, v.residual_norm)
}

/// One accepted branch point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub mu: f64,
    pub c: f64,
    pub residual: f64,
    pub iterations: usize,
    pub modes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationState {
    /// Current crest height μ.
    pub branch_param: f64,
    pub step: f64,
    pub history: Vec<BranchPoint>,
}

impl ContinuationState {
    /// History as CSV with header `mu,c,residual,iterations,modes`.
    pub fn history_csv(&self) -> String {
        let mut s = String::from("mu,c,residual,iterations,modes\n");
        for p in &self.history {
            let _ = writeln!(s, "{:.17e},{:.17e},{:.6e},{},{}", p.mu, p.c, p.residual, p.iterations, p.modes);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Continuation {
    /// Accepted profiles: every climb step, then one per grid level.
    pub profiles: Vec<WaveProfile>,
    pub state: ContinuationState,
}

impl Continuation {
    pub fn highest(&self) -> &WaveProfile {
        self.profiles.last().expect("continuation holds at least one profile")
    }
}

/// Trace the branch from the first bifurcation point to the wave whose
/// crest gap is `landing_fraction · stop_gap`.
///
/// The climb runs in crest height on `start_modes` modes until the gap
/// falls below `stop_gap` (or `0.03`, whichever is larger). The mode count
/// is then doubled up to `n`, each level closing the remaining gap with the
/// gap itself as the pinned quantity, which avoids searching for the
/// height at which a fine-grid branch reaches a prescribed gap.
pub fn continue_to_highest(family: WaveFamily, cfg: &SolverConfig) -> Result<Continuation, SolverError> {
    cfg.validate()?;
    let n0 = cfg.start_modes.min(cfg.n);
    let problem = GalerkinProblem::new(family, cfg.period, n0)?;
    let c0 = family.bifurcation_speed(cfg.period);
    let amp = 1e-3;
    let mut a = vec![0.0; n0 + 1];
    a[1] = amp;
    let first = newton_solve(&problem, &a, c0, Pin::Height(amp), cfg)?;
    let mut state = ContinuationState {
        branch_param: amp,
        step: cfg.step_init,
        history: vec![point(&first)],
    };
    let mut profiles = vec![first.profile];
    let climb_gap = cfg.stop_gap.max(0.03);
    let landing = cfg.landing_fraction * cfg.stop_gap;
    loop {
        let current = profiles.last().unwrap();
        if current.gap() < climb_gap {
            break;
        }
        let mu = state.branch_param + state.step;
        match newton_solve(&problem, &current.modes, current.speed_c, Pin::Height(mu), cfg) {
            Ok(out) => {
                state.branch_param = mu;
                state.history.push(point(&out));
                profiles.push(out.profile);
                state.step = (state.step * 1.3).min(cfg.step_max);
            }
            Err(e) => {
                debug!("climb step {} rejected: {e}", state.step);
                state.step *= 0.5;
                if state.step < cfg.step_min {
                    return Err(SolverError::BranchStalled { mu: state.branch_param, step: state.step });
                }
            }
        }
    }
    info!("climb ended at μ = {}, c = {}, N = {n0}", state.branch_param, profiles.last().unwrap().speed_c);

    let mut n = n0;
    loop {
        let current = profiles.last().unwrap().clone();
        let problem = GalerkinProblem::new(family, cfg.period, n)?;
        let mut gap = current.gap();
        let mut modes = current.modes.clone();
        let mut c = current.speed_c;
        let mut ratio = 0.5;
        let mut last = None;
        // march the gap down geometrically, then confirm at the landing gap
        while last.is_none() || gap > landing {
            let target = (gap * ratio).max(landing);
            let target = if last.is_none() && gap <= landing { landing } else { target };
            match newton_solve(&problem, &modes, c, Pin::Gap(target), cfg) {
                Ok(out) => {
                    gap = target;
                    modes = out.profile.modes.clone();
                    c = out.profile.speed_c;
                    state.branch_param = out.profile.crest();
                    state.history.push(point(&out));
                    last = Some(out.profile);
                    ratio = (ratio * 0.5).max(1e-3);
                }
                Err(e) => {
                    debug!("gap step to {target:e} at N = {n} rejected: {e}");
                    ratio = ratio.sqrt();
                    if ratio > 1.0 - 1e-6 {
                        return Err(SolverError::BranchStalled { mu: state.branch_param, step: gap });
                    }
                }
            }
        }
        let landed = last.unwrap();
        info!("N = {n}: c = {}, gap = {:e}", landed.speed_c, landed.gap());
        profiles.push(landed);
        if n >= cfg.n {
            break;
        }
        n = (2 * n).min(cfg.n);
    }
    Ok(Continuation { profiles, state })
}

fn point(out: &NewtonOutcome) -> BranchPoint {
    BranchPoint {
        mu: out.profile.crest(),
        c: out.profile.speed_c,
        residual: out.profile.residual_norm,
        iterations: out.iterations,
        modes: out.profile.mode_count(),
    }
}

/// Least-squares slope of `log|a_k|` against `log k` over `[k_lo, k_hi)`.
pub fn fourier_decay_slope(modes: &[f64], k_lo: usize, k_hi: usize) -> f64 {
    let pts: Vec<(f64, f64)> = (k_lo.max(1)..k_hi.min(modes.len()))
        .filter(|&k| modes[k] != 0.0)
        .map(|k| ((k as f64).ln(), modes[k].abs().ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
