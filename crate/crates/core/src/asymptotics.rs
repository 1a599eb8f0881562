//! Crest asymptotics: the rescaled deviation `u` from the maximal height,
//! windowed extrapolation of its limits, and regularity diagnostics.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special_functions::polyfit_intercept;
use crate::wave_solver::{spectral_derivative, WaveFamily, WaveProfile};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("crest gap {gap:e} exceeds {stop_gap:e}: the profile is not a highest wave")]
    NotHighest { gap: f64, stop_gap: f64 },
    #[error("fit window holds {samples} samples, at least 16 are needed")]
    WindowTooSmall { samples: usize },
    #[error("invalid fit window [{x_min}, {x_max}]")]
    InvalidWindow { x_min: f64, x_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitQuantity {
    /// `u/x^{1/2}` → π/2.
    ValueHomogeneous,
    /// `u/(x·log(1/x))` → 1/2.
    ValueLogarithmic,
    /// `u′·x^{1/2}` → π/4.
    DerivativeHomogeneous,
    /// `u′/log(1/x)` → 1/2.
    DerivativeLogarithmic,
}

impl FitQuantity {
    pub fn target(self) -> f64 {
        match self {
            FitQuantity::ValueHomogeneous => PI / 2.0,
            FitQuantity::DerivativeHomogeneous => PI / 4.0,
            FitQuantity::ValueLogarithmic | FitQuantity::DerivativeLogarithmic => 0.5,
        }
    }

    /// Relative tolerance at desk-scale resolution. The logarithmic limits
    /// converge like 1/log(1/x) and get wider margins.
    pub fn tolerance(self) -> f64 {
        match self {
            FitQuantity::ValueHomogeneous => 0.02,
            FitQuantity::DerivativeHomogeneous => 0.03,
            FitQuantity::ValueLogarithmic => 0.05,
            FitQuantity::DerivativeLogarithmic => 0.07,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FitQuantity::ValueHomogeneous => "u/x^(1/2)",
            FitQuantity::ValueLogarithmic => "u/(x log(1/x))",
            FitQuantity::DerivativeHomogeneous => "u'*x^(1/2)",
            FitQuantity::DerivativeLogarithmic => "u'/log(1/x)",
        }
    }

    fn sample(self, x: f64, u: f64, du: f64) -> f64 {
        let l = (1.0 / x).ln();
        match self {
            FitQuantity::ValueHomogeneous => u / x.sqrt(),
            FitQuantity::ValueLogarithmic => u / (x * l),
            FitQuantity::DerivativeHomogeneous => du * x.sqrt(),
            FitQuantity::DerivativeLogarithmic => du / l,
        }
    }
}

/// Correction model used for extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ansatz {
    /// `q = q∞ + α·x^{1/2} + β·x`.
    PowerHalf,
    /// `q = q∞ + α/L`, `L = log(1/x)`.
    InverseLog,
    /// `q = q∞ + κ·log L/L + α/L` with `κ` known.
    InverseLogWithLogLog { kappa: f64 },
}

/// Coefficient of `log L/L` in `u/(xL)` and `u′/L` for the bidirectional
/// highest wave: `u/x = L/2 + (1/4)·log L + O(1)`.
pub const BIDIRECTIONAL_LOGLOG: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowEstimate {
    pub x_max: f64,
    pub samples: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub quantity: FitQuantity,
    pub window: FitWindow,
    pub ansatz: Ansatz,
    pub xs: Vec<f64>,
    pub raw_values: Vec<f64>,
    /// Estimates on the nested windows `[x_min, x_max/4]`, `[x_min, x_max/2]`, `[x_min, x_max]`.
    pub nested: Vec<WindowEstimate>,
    /// Estimate from the middle window.
    pub extrapolated: f64,
    /// Half the spread of the nested estimates.
    pub uncertainty: f64,
    pub target: f64,
}

impl AsymptoticFit {
    pub fn raw_range(&self) -> (f64, f64) {
        self.raw_values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn relative_error(&self) -> f64 {
        (self.extrapolated - self.target).abs() / self.target.abs()
    }
}

/// Samples of `u ≥ 0` and `u′` on `x_j = jΔ`, `j = 0..=len−1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledProfile {
    pub family: WaveFamily,
    pub period: f64,
    pub speed_c: f64,
    pub spacing: f64,
    pub u_values: Vec<f64>,
    pub u_prime: Vec<f64>,
    /// Cosine modes of `u`, when it comes from a profile.
    pub u_modes: Vec<f64>,
    /// Kernel multiplier making the singular part exactly `H` or `L`.
    pub kernel_scale: f64,
    /// Upper end ν of the crest region.
    pub nu: f64,
}

impl RescaledProfile {
    /// Wrap samples directly (synthetic data and tests).
    pub fn from_samples(family: WaveFamily, speed_c: f64, spacing: f64, u_values: Vec<f64>, u_prime: Vec<f64>) -> Self {
        let period = 2.0 * spacing * (u_values.len().max(2) - 1) as f64;
        Self {
            family,
            period,
            speed_c,
            spacing,
            u_values,
            u_prime,
            u_modes: Vec::new(),
            kernel_scale: family.kernel().scale,
            nu: period / 8.0,
        }
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.spacing
    }

    /// `n(t)` in `(1 + n(u))u²`: zero, resp. `2t/(3πc²)`.
    pub fn nonlinearity(&self, t: f64) -> f64 {
        match self.family {
            WaveFamily::Unidirectional => 0.0,
            WaveFamily::Bidirectional => 2.0 * t / (3.0 * PI * self.speed_c * self.speed_c),
        }
    }

    /// Whether `u` increases strictly on `(0, ν]`.
    pub fn increasing_near_crest(&self) -> bool {
        let top = ((self.nu / self.spacing).floor() as usize).min(self.u_values.len() - 1);
        self.u_values[..=top].windows(2).all(|w| w[1] > w[0])
    }
}

/// Amplitude factor `A` with `u = A·(height_max − profile)`.
pub fn rescale_factor(family: WaveFamily, c: f64) -> f64 {
    match family {
        WaveFamily::Unidirectional => (2.0 * PI).sqrt(),
        WaveFamily::Bidirectional => 3f64.sqrt() * PI * c / 2.0,
    }
}

/// `u = √(2π)(c/2 − φ)`, resp. `u = (√3πc/2)((1 − 1/√3)c − v)`.
pub fn rescale(profile: &WaveProfile, stop_gap: f64) -> Result<RescaledProfile, FitError> {
    let gap = profile.gap();
    if !(gap >= 0.0 && gap <= stop_gap) {
        return Err(FitError::NotHighest { gap, stop_gap });
    }
    let c = profile.speed_c;
    let amp = rescale_factor(profile.family, c);
    let hmax = profile.height_max();
    let n = profile.mode_count();
    let u_values: Vec<f64> = profile.grid_values[..=n].iter().map(|v| amp * (hmax - v)).collect();
    let du = spectral_derivative(profile);
    let u_prime: Vec<f64> = du[..=n].iter().map(|d| -amp * d).collect();
    let mut u_modes: Vec<f64> = profile.modes.iter().map(|a| -amp * a).collect();
    u_modes[0] += amp * hmax;
    Ok(RescaledProfile {
        family: profile.family,
        period: profile.period,
        speed_c: c,
        spacing: profile.spacing(),
        u_values,
        u_prime,
        u_modes,
        kernel_scale: profile.family.kernel().scale,
        nu: profile.period / 8.0,
    })
}

/// Fit window for solver output: 16 cells off the crest (clear of the
/// Gibbs ripple of the spectral derivative) up to `0.4ν`, or `0.2ν` for the
/// logarithmic family whose corrections grow quickly as `log(1/x)` shrinks.
pub fn default_window(r: &RescaledProfile) -> FitWindow {
    let top = match r.family {
        WaveFamily::Unidirectional => 0.4,
        WaveFamily::Bidirectional => 0.2,
    };
    FitWindow {
        x_min: 16.0 * r.spacing,
        x_max: top * r.nu + 0.5 * r.spacing,
    }
}

pub fn default_ansatz(family: WaveFamily) -> Ansatz {
    match family {
        WaveFamily::Unidirectional => Ansatz::PowerHalf,
        WaveFamily::Bidirectional => Ansatz::InverseLogWithLogLog { kappa: BIDIRECTIONAL_LOGLOG },
    }
}


/// Extrapolated limit of `quantity` on the window and its two nested
/// sub-windows `[x_min, x_max/2]`, `[x_min, x_max/4]`.
pub fn fit_limit(
    r: &RescaledProfile,
    quantity: FitQuantity,
    window: FitWindow,
    ansatz: Ansatz,
) -> Result<AsymptoticFit, FitError> {
    let FitWindow { x_min, x_max } = window;
    if !(x_min > 0.0 && x_min < x_max && x_max <= r.nu + r.spacing) {
        return Err(FitError::InvalidWindow { x_min, x_max });
    }
    let mut xs = Vec::new();
    let mut raw = Vec::new();
    for j in 1..r.u_values.len() {
        let x = r.x(j);
        if x >= x_min && x <= x_max {
            xs.push(x);
            raw.push(quantity.sample(x, r.u_values[j], r.u_prime[j]));
        }
    }
    let mut nested = Vec::new();
    for div in [4.0, 2.0, 1.0] {
        let top = x_max / div;
        let idx: Vec<usize> = (0..xs.len()).filter(|&i| xs[i] <= top).collect();
        if idx.len() < 16 {
            return Err(FitError::WindowTooSmall { samples: idx.len() });
        }
        let degree = if matches!(ansatz, Ansatz::PowerHalf) { 2 } else { 1 };
        let (ts, ys): (Vec<f64>, Vec<f64>) = idx
            .iter()
            .map(|&i| {
                let x = xs[i];
                let l = (1.0 / x).ln();
                match ansatz {
                    Ansatz::PowerHalf => (x.sqrt(), raw[i]),
                    Ansatz::InverseLog => (1.0 / l, raw[i]),
                    Ansatz::InverseLogWithLogLog { kappa } => (1.0 / l, raw[i] - kappa * l.ln() / l),
                }
            })
            .unzip();
        nested.push(WindowEstimate {
            x_max: top,
            samples: idx.len(),
            value: polyfit_intercept(&ts, &ys, degree),
        });
    }
    let lo = nested.iter().map(|w| w.value).fold(f64::INFINITY, f64::min);
    let hi = nested.iter().map(|w| w.value).fold(f64::NEG_INFINITY, f64::max);
    Ok(AsymptoticFit {
        quantity,
        window,
        ansatz,
        xs,
        raw_values: raw,
        extrapolated: nested[1].value,
        uncertainty: 0.5 * (hi - lo),
        nested,
        target: quantity.target(),
    })
}

/// Value limit of solver output with the family's default window and ansatz.
pub fn value_limit(r: &RescaledProfile) -> Result<AsymptoticFit, FitError> {
    let q = match r.family {
        WaveFamily::Unidirectional => FitQuantity::ValueHomogeneous,
        WaveFamily::Bidirectional => FitQuantity::ValueLogarithmic,
    };
    fit_limit(r, q, default_window(r), default_ansatz(r.family))
}

/// Derivative limit `u′x^{1/2} → π/4`, resp. `u′/log(1/x) → 1/2`.
pub fn derivative_limits(r: &RescaledProfile) -> Result<AsymptoticFit, FitError> {
    let q = match r.family {
        WaveFamily::Unidirectional => FitQuantity::DerivativeHomogeneous,
        WaveFamily::Bidirectional => FitQuantity::DerivativeLogarithmic,
    };
    fit_limit(r, q, default_window(r), default_ansatz(r.family))
}

/// Constants of the surface profile near the crest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorollaryConstants {
    /// `(φ(0) − φ)/|x|^{1/2}` (unidirectional) or `(φ(0) − φ)/(|x| log(1/|x|))`.
    pub phi_level: f64,
    /// Bidirectional only: `(v(0) − v)/(|x| log(1/|x|))`.
    pub v_level: Option<f64>,
    pub phi_target: f64,
}

/// Map a fitted value limit back to the physical profile. Near the crest
/// `dφ/dv = c − v = c/√3`, which makes the φ-level constant independent of c.
pub fn corollary_constants(limit: f64, family: WaveFamily, c: f64) -> CorollaryConstants {
    match family {
        WaveFamily::Unidirectional => CorollaryConstants {
            phi_level: limit / (2.0 * PI).sqrt(),
            v_level: None,
            phi_target: (PI / 8.0).sqrt(),
        },
        WaveFamily::Bidirectional => {
            let v_level = limit / rescale_factor(family, c);
            CorollaryConstants {
                phi_level: v_level * c / 3f64.sqrt(),
                v_level: Some(v_level),
                phi_target: 1.0 / (3.0 * PI),
            }
        }
    }
}

/// Relative tolerance on the φ-level constant.
pub fn corollary_tolerance(family: WaveFamily) -> f64 {
    match family {
        WaveFamily::Unidirectional => 0.02,
        WaveFamily::Bidirectional => 0.05,
    }
}

fn log_spaced(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    if hi < lo {
        return Vec::new();
    }
    let mut out: Vec<usize> = (0..count)
        .map(|i| {
            let t = i as f64 / (count.max(2) - 1) as f64;
            ((lo as f64) * ((hi as f64) / (lo as f64)).powf(t)).round() as usize
        })
        .collect();
    out.push(hi);
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub value: f64,
    pub x: f64,
    pub h: f64,
}

/// `sup x^{1/2}(u(x+h) − u(x−h))/h` over grid pairs `0 < h < x ≤ ν`, with
/// `x` and `h` on log-spaced index sets.
pub fn holder_seminorm(r: &RescaledProfile) -> SupEstimate {
    let jmax = ((r.nu / r.spacing).floor() as usize).min((r.u_values.len() - 1) / 2);
    let mut best = SupEstimate { value: 0.0, x: 0.0, h: 0.0 };
    for j in log_spaced(2, jmax, 400) {
        for i in log_spaced(1, j - 1, 200) {
            let x = r.x(j);
            let h = r.x(i);
            let q = x.sqrt() * (r.u_values[j + i] - r.u_values[j - i]) / h;
            if q.abs() > best.value {
                best = SupEstimate { value: q.abs(), x, h };
            }
        }
    }
    best
}

/// Least `M` with `|f(x) − f(y)| ≤ M·d·log(1 + 1/d)`, `d = |x − y|`, over
/// sampled pairs of a uniformly spaced sequence. Separations are log-spaced
/// and base points strided so that about 10⁶ pairs are visited.
pub fn log_lipschitz_samples(values: &[f64], spacing: f64, periodic: bool) -> SupEstimate {
    let n = values.len();
    let max_sep = if periodic { n / 2 } else { n - 1 };
    let seps = log_spaced(1, max_sep.max(1), 200);
    let stride = ((n * seps.len()) / 1_000_000).max(1);
    let mut best = SupEstimate { value: 0.0, x: 0.0, h: 0.0 };
    for &i in &seps {
        let d = i as f64 * spacing;
        let w = d * (1.0 + 1.0 / d).ln();
        let last = if periodic { n } else { n - i };
        let mut j = 0;
        while j < last {
            let q = (values[(j + i) % n] - values[j]).abs() / w;
            if q > best.value {
                best = SupEstimate { value: q, x: j as f64 * spacing, h: d };
            }
            j += stride;
        }
    }
    best
}

/// Log-Lipschitz constant of a profile over one period.
pub fn log_lipschitz_constant(profile: &WaveProfile) -> SupEstimate {
    log_lipschitz_samples(&profile.grid_values, profile.spacing(), true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic<F: Fn(f64) -> (f64, f64)>(family: WaveFamily, n: usize, f: F) -> RescaledProfile {
        let dx = PI / n as f64;
        let (u, du): (Vec<f64>, Vec<f64>) = (0..=n)
            .map(|j| if j == 0 { (0.0, 0.0) } else { f(j as f64 * dx) })
            .unzip();
        RescaledProfile::from_samples(family, 0.8, dx, u, du)
    }

    #[test]
    fn homogeneous_synthetic() {
        let r = synthetic(WaveFamily::Unidirectional, 4096, |x| {
            (PI / 2.0 * x.sqrt() * (1.0 + 0.1 * x), PI / 4.0 * x.powf(-0.5) * (1.0 + 0.3 * x))
        });
        let fit = fit_limit(&r, FitQuantity::ValueHomogeneous, default_window(&r), Ansatz::PowerHalf).unwrap();
        assert!((fit.extrapolated - PI / 2.0).abs() < 1e-3, "{}", fit.extrapolated);
        let r = synthetic(WaveFamily::Unidirectional, 4096, |x| (PI / 2.0 * x.sqrt(), PI / 4.0 * x.powf(-0.5)));
        let d = derivative_limits(&r).unwrap();
        assert!((d.extrapolated - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn logarithmic_synthetic() {
        let r = synthetic(WaveFamily::Bidirectional, 4096, |x| {
            let l = (1.0 / x).ln();
            (0.5 * x * l * (1.0 + 1.0 / l), 0.5 * l)
        });
        let fit = fit_limit(&r, FitQuantity::ValueLogarithmic, default_window(&r), Ansatz::InverseLog).unwrap();
        assert!((fit.extrapolated - 0.5).abs() <= fit.uncertainty + 1e-12, "{fit:?}");
        let (lo, _) = fit.raw_range();
        assert!(lo > 0.55);
    }

    #[test]
    fn loglog_ansatz_removes_known_term() {
        let r = synthetic(WaveFamily::Bidirectional, 4096, |x| {
            let l = (1.0 / x).ln();
            (x * (0.5 * l + 0.25 * l.ln() - 0.3), 0.5 * l + 0.25 * l.ln() - 0.8)
        });
        let ansatz = Ansatz::InverseLogWithLogLog { kappa: BIDIRECTIONAL_LOGLOG };
        let v = fit_limit(&r, FitQuantity::ValueLogarithmic, default_window(&r), ansatz).unwrap();
        let d = fit_limit(&r, FitQuantity::DerivativeLogarithmic, default_window(&r), ansatz).unwrap();
        assert!((v.extrapolated - 0.5).abs() < 1e-10);
        assert!((d.extrapolated - 0.5).abs() < 1e-10);
    }

    #[test]
    fn window_checks() {
        let r = synthetic(WaveFamily::Unidirectional, 256, |x| (x.sqrt(), 0.5 / x.sqrt()));
        let err = fit_limit(&r, FitQuantity::ValueHomogeneous, default_window(&r), Ansatz::PowerHalf);
        assert!(matches!(err, Err(FitError::WindowTooSmall { .. })));
        let bad = FitWindow { x_min: 0.2, x_max: 0.1 };
        assert!(matches!(
            fit_limit(&r, FitQuantity::ValueHomogeneous, bad, Ansatz::PowerHalf),
            Err(FitError::InvalidWindow { .. })
        ));
    }

    #[test]
    fn corollary_maps() {
        let u = corollary_constants(PI / 2.0, WaveFamily::Unidirectional, 0.77);
        assert!((u.phi_level - (PI / 8.0).sqrt()).abs() < 1e-15);
        assert!((u.phi_level - 0.626_657).abs() < 1e-6);
        let b = corollary_constants(0.5, WaveFamily::Bidirectional, 0.8);
        assert!((b.phi_level - 1.0 / (3.0 * PI)).abs() < 1e-15);
        assert!((b.v_level.unwrap() - 1.0 / (3f64.sqrt() * PI * 0.8)).abs() < 1e-15);
        assert_eq!(corollary_constants(0.0, WaveFamily::Unidirectional, 0.8).phi_level, 0.0);
    }

    #[test]
    fn holder_detects_exponent() {
        let good = synthetic(WaveFamily::Unidirectional, 4096, |x| (x.sqrt(), 0.0));
        let s = holder_seminorm(&good);
        assert!(s.value.is_finite() && s.value < 2.0);
        let coarse = synthetic(WaveFamily::Unidirectional, 2048, |x| (x.sqrt(), 0.0));
        assert!((holder_seminorm(&coarse).value - s.value).abs() < 1e-2 * s.value);
        // x^{1/4}: along h = x/2 the quotient grows like x^{−1/4}
        let bad = synthetic(WaveFamily::Unidirectional, 4096, |x| (x.powf(0.25), 0.0));
        let bad_coarse = synthetic(WaveFamily::Unidirectional, 256, |x| (x.powf(0.25), 0.0));
        // 16× finer grid reaches 16× smaller x: growth 16^{1/4} = 2
        assert!(holder_seminorm(&bad).value > 1.8 * holder_seminorm(&bad_coarse).value);
    }

    #[test]
    fn log_lipschitz_linear() {
        let xs: Vec<f64> = (0..=1000).map(|j| 2.0 * j as f64 / 1000.0).collect();
        let m = log_lipschitz_samples(&xs, 1e-3, false);
        assert!((m.value - 2.0 / 2f64.ln()).abs() < 1e-9, "{m:?}");
    }

    #[test]
    fn rescale_rejects_low_waves() {
        let mut m = vec![0.0; 17];
        m[1] = 0.01;
        let p = WaveProfile::new(WaveFamily::Unidirectional, 2.0 * PI, m, 0.8, 0.0);
        assert!(matches!(rescale(&p, 1e-3), Err(FitError::NotHighest { .. })));
        let ok = rescale(&p, 1.0).unwrap();
        let amp = (2.0 * PI).sqrt();
        assert!((ok.u_values[0] - amp * (0.4 - 0.01)).abs() < 1e-14);
    }
}
