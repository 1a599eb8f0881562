//! Direct-quadrature checks of the condensed crest equation
//! `(1 + n(u))u² = ∫₀^∞ δ²ₓK(y)u(y) dy` and of the homogeneous toy
//! equation solved by `β_s|x|^s`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::RescaledProfile;
use crate::kernels::{KernelError, KernelSpec, SingularKind};
use crate::quadrature::{integrate_panel, Anchored, integrate_tail_with, QuadratureConfig, QuadratureError, Singularity};
use crate::special_functions::{beta_s, tau0, SpecialError};
use crate::wave_solver::WaveProfile;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Number of periods integrated before the analytic tail bound takes over.
pub const PERIODS: usize = 3;

/// Oversampling factor of the interpolation grid.
pub const OVERSAMPLING: usize = 8;

/// Even periodic function known on a uniform grid over one period,
/// evaluated by 6-point Lagrange interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicInterpolant {
    values: Vec<f64>,
    period: f64,
}

impl PeriodicInterpolant {
    pub fn new(values: Vec<f64>, period: f64) -> Self {
        Self { values, period }
    }

    /// Interpolant of `u` from its cosine modes on an oversampled grid.
    pub fn from_rescaled(r: &RescaledProfile) -> Result<Self, VerifyError> {
        if r.u_modes.len() < 2 {
            return Err(VerifyError::InvalidInput("rescaled profile carries no modes".into()));
        }
        let carrier = WaveProfile::new(r.family, r.period, r.u_modes.clone(), r.speed_c, 0.0);
        Ok(Self::new(carrier.oversampled(OVERSAMPLING), r.period))
    }

    pub fn eval(&self, y: f64) -> f64 {
        let n = self.values.len();
        let h = self.period / n as f64;
        let t = y.rem_euclid(self.period) / h;
        let i = t.floor() as isize;
        let f = t - i as f64;
        // nodes i−2..i+3
        let mut sum = 0.0;
        for a in -2..=3isize {
            let mut w = 1.0;
            for b in -2..=3isize {
                if b != a {
                    w *= (f - b as f64) / (a - b) as f64;
                }
            }
            sum += w * self.values[(i + a).rem_euclid(n as isize) as usize];
        }
        sum
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondensedResidual {
    pub x: f64,
    /// `(1 + n(u))u²` at `x`, minus its value at the crest.
    pub lhs: f64,
    /// `∫₀^{3P} δ²ₓK(y)u(y) dy`.
    pub integral: f64,
    /// Bound on the omitted integral beyond three periods.
    pub tail_bound: f64,
    /// Contribution of `(ν, 3P)` and its bound `−K′(ν−x)x²·sup u`.
    pub far_contribution: Option<f64>,
    pub far_bound: Option<f64>,
    pub residual: f64,
    /// `|residual| / u(x)²`.
    pub relative: f64,
}

fn singular_point(spec: &KernelSpec, at: f64) -> Result<Singularity, VerifyError> {
    Ok(match spec.singular_kind() {
        SingularKind::Homogeneous { s } => Singularity::algebraic(at, s)?,
        SingularKind::Logarithmic => Singularity::logarithmic(at),
    })
}

/// Residual of the condensed equation at `x ∈ (0, P/2)` by direct
/// quadrature against the interpolated profile. The crest value `u(0)`
/// enters the left side so that a wave slightly below the highest one is
/// tested against the identity it actually satisfies.
pub fn condensed_residual(
    r: &RescaledProfile,
    u: &PeriodicInterpolant,
    spec: &KernelSpec,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<CondensedResidual, VerifyError> {
    if !(x > 0.0 && x < 0.5 * r.period) {
        return Err(VerifyError::InvalidInput(format!("x = {x} outside (0, P/2)")));
    }
    let period = r.period;
    let top = PERIODS as f64 * period;
    // near y = x the offset is kept exact so K(y − x) does not lose digits
    let integrand = Anchored(|anchor: f64, h: f64| -> f64 {
        let y = anchor + h;
        let d = if anchor == x {
            match (spec.scaled(2.0 * x + h), spec.scaled(h), spec.scaled(y)) {
                (Ok(a), Ok(b), Ok(c)) => a + b - 2.0 * c,
                _ => 0.0,
            }
        } else {
            spec.scaled_second_difference(x, y).unwrap_or(0.0)
        };
        d * u.eval(y)
    });
    let mut cuts = vec![0.0, tau0() * x, x];
    if x < r.nu {
        cuts.push(r.nu);
    }
    for k in 1..=PERIODS {
        let c = k as f64 * period;
        cuts.push(c - x);
        cuts.push(c);
        cuts.push(c + x);
    }
    cuts.retain(|&c| c <= top);
    cuts.push(top);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    // the kernel is singular at 0 and x; the profile has its crest cusps at kP
    let mut sings = vec![singular_point(spec, 0.0)?, singular_point(spec, x)?];
    for k in 1..=PERIODS {
        sings.push(Singularity::algebraic(k as f64 * period, 0.5)?);
    }
    let mut integral = 0.0;
    let mut far = 0.0;
    for w in cuts.windows(2) {
        let local: Vec<Singularity> = sings
            .iter()
            .copied()
            .filter(|s| s.location >= w[0] && s.location <= w[1])
            .collect();
        let v = integrate_panel(&integrand, w[0], w[1], &local, cfg)?.value;
        integral += v;
        if w[0] >= r.nu && x < r.nu {
            far += v;
        }
    }
    let sup_u = u.sup();
    let tail_bound = (-spec.scaled_derivative(top - x)? * x * x * sup_u).max(0.0);
    let (far_contribution, far_bound) = if x < r.nu {
        (Some(far), Some(-spec.scaled_derivative(r.nu - x)? * x * x * sup_u))
    } else {
        (None, None)
    };
    let ux = u.eval(x);
    let u0 = u.eval(0.0);
    let lhs = (1.0 + r.nonlinearity(ux)) * ux * ux - (1.0 + r.nonlinearity(u0)) * u0 * u0;
    let residual = lhs - integral;
    Ok(CondensedResidual {
        x,
        lhs,
        integral,
        tail_bound,
        far_contribution,
        far_bound,
        residual,
        relative: residual.abs() / (ux * ux),
    })
}

/// Condensed residuals at several points.
pub fn condensed_residuals(
    r: &RescaledProfile,
    xs: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<CondensedResidual>, VerifyError> {
    let u = PeriodicInterpolant::from_rescaled(r)?;
    let spec = r.family.kernel();
    xs.iter().map(|&x| condensed_residual(r, &u, &spec, x, cfg)).collect()
}

/// Eight evenly spaced sample points `kP/32`, `k = 1..8`.
pub fn default_sample_points(period: f64) -> Vec<f64> {
    (1..=8).map(|k| k as f64 * period / 32.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyResidual {
    pub s: f64,
    pub x: f64,
    pub lhs: f64,
    pub integral: f64,
    pub relative: f64,
}

/// Relative residual of `u = β_s|x|^s` in `u(x)² = ∫₀^∞ δ²ₓH_s(y)u(y) dy`,
/// integrated in the original variable `y`.
pub fn toy_residual(s: f64, x: f64, cfg: &QuadratureConfig) -> Result<ToyResidual, VerifyError> {
    if !(x > 0.0) {
        return Err(VerifyError::InvalidInput(format!("x = {x} must be positive")));
    }
    let spec = KernelSpec::pure_homogeneous(s)?;
    let beta = beta_s(s)?;
    let f = Anchored(|anchor: f64, h: f64| {
        let y = anchor + h;
        let d = if anchor == x {
            (2.0 * x + h).powf(s - 1.0) + h.abs().powf(s - 1.0) - 2.0 * y.powf(s - 1.0)
        } else {
            spec.scaled_second_difference(x, y).unwrap_or(0.0)
        };
        d * beta * y.powf(s)
    });
    let sings = [Singularity::algebraic(0.0, s)?, Singularity::algebraic(x, s)?];
    let head = integrate_panel(&f, 0.0, 2.0 * x, &sings, cfg)?.value;
    let tail = integrate_tail_with(&f, 2.0 * x, 3.0 - 2.0 * s, &[], &cfg.clone().with_tail_cut(cfg.tail_cut.max(4.0 * x)))?.value;
    let integral = head + tail;
    let lhs = beta * beta * x.powf(2.0 * s);
    Ok(ToyResidual {
        s,
        x,
        lhs,
        integral,
        relative: (lhs - integral).abs() / lhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave_solver::WaveFamily;
    use std::f64::consts::PI;

    #[test]
    fn toy_equation_grid() {
        let cfg = QuadratureConfig::default();
        for s in [0.3, 0.5, 0.7] {
            for x in [0.25, 1.0, 4.0] {
                let r = toy_residual(s, x, &cfg).unwrap();
                assert!(r.relative <= 1e-7, "{r:?}");
            }
        }
    }

    #[test]
    fn toy_residual_is_scale_free() {
        let cfg = QuadratureConfig::default();
        let a = toy_residual(0.5, 1.0, &cfg).unwrap();
        let b = toy_residual(0.5, 2.0, &cfg).unwrap();
        assert!((a.relative - b.relative).abs() < 1e-9);
    }

    #[test]
    fn interpolant_reproduces_smooth_data() {
        let n = 256;
        let vals: Vec<f64> = (0..n).map(|j| (2.0 * PI * j as f64 / n as f64).cos()).collect();
        let p = PeriodicInterpolant::new(vals, 2.0 * PI);
        for y in [0.0, 0.1, 3.3, -1.7, 20.0] {
            assert!((p.eval(y) - y.cos()).abs() < 1e-10, "{y}");
        }
    }

    #[test]
    fn zero_profile_zero_residual() {
        let n = 64;
        let r = RescaledProfile {
            u_modes: vec![0.0; n + 1],
            ..RescaledProfile::from_samples(WaveFamily::Unidirectional, 0.8, PI / n as f64, vec![0.0; n + 1], vec![0.0; n + 1])
        };
        let res = condensed_residuals(&r, &[0.3], &QuadratureConfig::default()).unwrap();
        assert_eq!(res[0].residual, 0.0);
    }

    fn solved(family: WaveFamily) -> RescaledProfile {
        use crate::asymptotics::rescale;
        use crate::wave_solver::{continue_to_highest, SolverConfig};
        let cfg = SolverConfig { n: 256, stop_gap: 1e-3, ..SolverConfig::default() };
        let p = continue_to_highest(family, &cfg).unwrap().highest().clone();
        rescale(&p, cfg.stop_gap).unwrap()
    }

    #[test]
    fn detects_one_percent_perturbation() {
        let cfg = QuadratureConfig { rel_tol: 1e-9, ..QuadratureConfig::default() };
        let r = solved(WaveFamily::Bidirectional);
        let x = r.period / 8.0;
        let base = condensed_residuals(&r, &[x], &cfg).unwrap()[0];
        let mut bumped = r.clone();
        bumped.u_modes.iter_mut().for_each(|a| *a *= 1.01);
        let pert = condensed_residuals(&bumped, &[x], &cfg).unwrap()[0];
        assert!(base.relative < 1e-3, "{base:?}");
        assert!(pert.relative > 5e-3 && pert.relative < 2e-2, "{pert:?}");
    }

    #[test]
    fn far_field_is_positive_and_bounded() {
        let cfg = QuadratureConfig { rel_tol: 1e-9, ..QuadratureConfig::default() };
        let r = solved(WaveFamily::Unidirectional);
        let xs = [r.nu / 8.0, r.nu / 2.0];
        for c in condensed_residuals(&r, &xs, &cfg).unwrap() {
            let (far, bound) = (c.far_contribution.unwrap(), c.far_bound.unwrap());
            assert!(far >= 0.0 && far <= bound, "{c:?}");
            assert!(c.tail_bound < 1e-10);
        }
    }

    #[test]
    fn rejects_points_outside_half_period() {
        let r = solved(WaveFamily::Unidirectional);
        assert!(condensed_residuals(&r, &[r.period], &QuadratureConfig::default()).is_err());
    }
}
