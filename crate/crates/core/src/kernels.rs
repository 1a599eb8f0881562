//! Convolution kernels of the Whitham and bidirectional Whitham equations,
//! two pure singular model kernels, their singular/regular splittings and
//! the difference operators used throughout the crest analysis.
//!
//! Units: [`KernelSpec::value`] is the physical kernel, whose Fourier
//! symbol is [`KernelSpec::symbol`]. [`KernelSpec::scaled`] multiplies by
//! `scale`, after which the kernel reads `S + R` with `S` exactly
//! `|x|^{s−1}` or `log(1/|x|)`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{
    integrate_panel, integrate_tail, QuadratureConfig, QuadratureError, Singularity,
};
use crate::special_functions::{lambda_fn, phi_s};

/// Below this |x| kernel evaluation is refused.
pub const DOMAIN_FLOOR: f64 = 1e-12;

/// Past this |x| the Whitham kernel is below 1e−17 and is taken as zero.
const WHITHAM_CUTOFF: f64 = 24.0;

/// Past this |x| the bidirectional kernel is below 1e−27.
const BIDIRECTIONAL_CUTOFF: f64 = 40.0;

/// Default base pair count of the accelerated Whitham series.
pub const DEFAULT_SERIES_PAIRS: usize = 500;

const RICHARDSON_LEVELS: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("kernel is singular at x = {x}")]
    DomainError { x: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    Whitham,
    BidirectionalWhitham,
    /// `|x|^{s−1}` with `0 < s < 1`.
    PureHomogeneous { s: f64 },
    /// `log(1/|x|)`.
    PureLogarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingularKind {
    Homogeneous { s: f64 },
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Multiplier turning the physical kernel into `S + R`.
    pub scale: f64,
    /// Base pair count for the accelerated Whitham series.
    pub series_terms: usize,
}

impl KernelSpec {
    pub fn whitham() -> Self {
        Self {
            family: KernelFamily::Whitham,
            scale: (2.0 * PI).sqrt(),
            series_terms: DEFAULT_SERIES_PAIRS,
        }
    }

    pub fn bidirectional() -> Self {
        Self {
            family: KernelFamily::BidirectionalWhitham,
            scale: PI,
            series_terms: DEFAULT_SERIES_PAIRS,
        }
    }

    pub fn pure_homogeneous(s: f64) -> Result<Self, KernelError> {
        let spec = Self {
            family: KernelFamily::PureHomogeneous { s },
            scale: 1.0,
            series_terms: DEFAULT_SERIES_PAIRS,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn pure_logarithmic() -> Self {
        Self {
            family: KernelFamily::PureLogarithmic,
            scale: 1.0,
            series_terms: DEFAULT_SERIES_PAIRS,
        }
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        if let KernelFamily::PureHomogeneous { s } = self.family {
            if !(s > 0.0 && s < 1.0) {
                return Err(KernelError::InvalidInput(format!("exponent s = {s} outside (0, 1)")));
            }
        }
        let expected = match self.family {
            KernelFamily::Whitham => (2.0 * PI).sqrt(),
            KernelFamily::BidirectionalWhitham => PI,
            _ => 1.0,
        };
        if (self.scale - expected).abs() > 1e-12 * expected {
            return Err(KernelError::InvalidInput(format!(
                "scale {} does not normalise the singular part (expected {expected})",
                self.scale
            )));
        }
        if self.series_terms < 1 {
            return Err(KernelError::InvalidInput("series_terms must be positive".into()));
        }
        Ok(())
    }

    pub fn singular_kind(&self) -> SingularKind {
        match self.family {
            KernelFamily::Whitham => SingularKind::Homogeneous { s: 0.5 },
            KernelFamily::PureHomogeneous { s } => SingularKind::Homogeneous { s },
            KernelFamily::BidirectionalWhitham | KernelFamily::PureLogarithmic => {
                SingularKind::Logarithmic
            }
        }
    }

    fn is_default_series(&self) -> bool {
        self.series_terms == DEFAULT_SERIES_PAIRS
    }

    /// Fourier symbol of the physical kernel; even in ξ.
    pub fn symbol(&self, xi: f64) -> f64 {
        let a = xi.abs();
        match self.family {
            KernelFamily::Whitham => tanh_ratio(a).sqrt(),
            KernelFamily::BidirectionalWhitham => tanh_ratio(a),
            KernelFamily::PureHomogeneous { s } => {
                2.0 * statrs::function::gamma::gamma(s) * (0.5 * PI * s).cos() * a.powf(-s)
            }
            KernelFamily::PureLogarithmic => PI / a,
        }
    }

    /// Singular model `S(x)` in scaled units.
    pub fn singular(&self, x: f64) -> Result<f64, KernelError> {
        let a = checked_abs(x)?;
        Ok(match self.singular_kind() {
            SingularKind::Homogeneous { s } => a.powf(s - 1.0),
            SingularKind::Logarithmic => -a.ln(),
        })
    }

    /// Regular remainder `R = scale·K − S`, continuous through the origin.
    pub fn regular(&self, x: f64) -> f64 {
        let a = x.abs();
        match self.family {
            KernelFamily::Whitham => {
                if a > WHITHAM_CUTOFF {
                    -a.powf(-0.5)
                } else if self.is_default_series() {
                    whitham_tables().eval(a, 0)
                } else {
                    whitham_regular_accelerated(a, self.series_terms)[0]
                }
            }
            KernelFamily::BidirectionalWhitham => bidirectional_regular(a),
            _ => 0.0,
        }
    }

    /// `R′(x)`.
    pub fn regular_derivative(&self, x: f64) -> f64 {
        let a = x.abs();
        let d = match self.family {
            KernelFamily::Whitham => {
                if a > WHITHAM_CUTOFF {
                    0.5 * a.powf(-1.5)
                } else if self.is_default_series() {
                    whitham_tables().eval(a, 1)
                } else {
                    whitham_regular_accelerated(a, self.series_terms)[1]
                }
            }
            KernelFamily::BidirectionalWhitham => {
                let z = 0.5 * PI * a;
                if z < 0.1 {
                    let z2 = z * z;
                    0.5 * PI
                        * z
                        * (1.0 / 6.0
                            + z2 * (-7.0 / 360.0
                                + z2 * (31.0 / 15120.0
                                    + z2 * (-127.0 / 604800.0 + z2 * 73.0 / 3421440.0))))
                } else {
                    1.0 / a - 0.5 * PI / z.sinh()
                }
            }
            _ => 0.0,
        };
        if x < 0.0 { -d } else { d }
    }

    /// `R″(x)`.
    pub fn regular_second_derivative(&self, x: f64) -> f64 {
        let a = x.abs();
        match self.family {
            KernelFamily::Whitham => {
                if a > WHITHAM_CUTOFF {
                    -0.75 * a.powf(-2.5)
                } else if self.is_default_series() {
                    whitham_tables().eval(a, 2)
                } else {
                    whitham_regular_accelerated(a, self.series_terms)[2]
                }
            }
            KernelFamily::BidirectionalWhitham => {
                let z = 0.5 * PI * a;
                let q = if z < 0.1 {
                    let z2 = z * z;
                    1.0 / 6.0
                        + z2 * (-7.0 / 120.0
                            + z2 * (31.0 / 3024.0 + z2 * (-127.0 / 86400.0 + z2 * 73.0 / 380160.0)))
                } else {
                    1.0 / (z.sinh() * z.tanh()) - 1.0 / (z * z)
                };
                0.25 * PI * PI * q
            }
            _ => 0.0,
        }
    }

    /// `scale·K(x) = S(x) + R(x)`.
    pub fn scaled(&self, x: f64) -> Result<f64, KernelError> {
        let a = checked_abs(x)?;
        Ok(match self.family {
            KernelFamily::Whitham if a > WHITHAM_CUTOFF => 0.0,
            KernelFamily::BidirectionalWhitham => PI * kernel_bidirectional_unchecked(a),
            _ => self.singular(a)? + self.regular(a),
        })
    }

    /// Physical kernel `K(x)`.
    pub fn value(&self, x: f64) -> Result<f64, KernelError> {
        Ok(self.scaled(x)? / self.scale)
    }

    /// Derivative of the scaled kernel.
    pub fn scaled_derivative(&self, x: f64) -> Result<f64, KernelError> {
        let a = checked_abs(x)?;
        let d = match self.family {
            KernelFamily::Whitham if a > WHITHAM_CUTOFF => 0.0,
            KernelFamily::BidirectionalWhitham => -0.5 * PI / (0.5 * PI * a).sinh(),
            _ => {
                let ds = match self.singular_kind() {
                    SingularKind::Homogeneous { s } => (s - 1.0) * a.powf(s - 2.0),
                    SingularKind::Logarithmic => -1.0 / a,
                };
                ds + self.regular_derivative(a)
            }
        };
        Ok(if x < 0.0 { -d } else { d })
    }

    /// Second difference of the scaled kernel, using the exact model
    /// identities for the singular part once `y > x` so that the far field
    /// carries no cancellation noise.
    pub fn scaled_second_difference(&self, x: f64, y: f64) -> Result<f64, KernelError> {
        let (x, y) = (x.abs(), y.abs());
        if x == 0.0 {
            return Ok(0.0);
        }
        match self.family {
            KernelFamily::PureHomogeneous { s } if y > x => {
                Ok(x.powf(s - 1.0) * phi_s(y / x, s).map_err(|_| KernelError::DomainError { x: y - x })?)
            }
            KernelFamily::PureLogarithmic if y > x => {
                Ok(lambda_fn(y / x).map_err(|_| KernelError::DomainError { x: y - x })?)
            }
            _ => second_difference(|t| self.scaled(t), x, y),
        }
    }

    /// Second difference of `R`. Near the origin `R` is differenced directly;
    /// further out `δ²R = δ²(scale·K) − δ²S` with `δ²S` from the model
    /// identities, since `R` there carries the slowly decaying `−S`.
    pub fn regular_second_difference(&self, x: f64, y: f64) -> f64 {
        let (x, y) = (x.abs(), y.abs());
        if x == 0.0 {
            return 0.0;
        }
        let split = 8.0f64.max(4.0 * x);
        match self.family {
            KernelFamily::Whitham | KernelFamily::BidirectionalWhitham if y > split => {
                let ds = match self.singular_kind() {
                    SingularKind::Homogeneous { s } => x.powf(s - 1.0) * phi_s(y / x, s).unwrap_or(0.0),
                    SingularKind::Logarithmic => lambda_fn(y / x).unwrap_or(0.0),
                };
                let dk = second_difference(|t| self.scaled(t), x, y).unwrap_or(0.0);
                dk - ds
            }
            KernelFamily::Whitham | KernelFamily::BidirectionalWhitham => {
                self.regular(y + x) + self.regular(y - x) - 2.0 * self.regular(y)
            }
            _ => 0.0,
        }
    }

    /// Decay order of `δ²K(y)` as `y → ∞`, for tail quadrature.
    fn second_difference_decay(&self) -> f64 {
        match self.family {
            KernelFamily::PureHomogeneous { s } => 3.0 - s,
            KernelFamily::PureLogarithmic => 2.0,
            _ => 3.0,
        }
    }

    /// Decay order of `R″` and of `δ²R`.
    fn regular_decay(&self) -> f64 {
        match self.family {
            KernelFamily::Whitham => 2.5,
            _ => 2.0,
        }
    }

    /// `‖R″‖_{L¹(ℝ)}`, cached for the two default water-wave kernels.
    pub fn regular_second_derivative_l1(&self, cfg: &QuadratureConfig) -> Result<f64, KernelError> {
        static WHITHAM: OnceLock<Result<f64, KernelError>> = OnceLock::new();
        static BIDIRECTIONAL: OnceLock<Result<f64, KernelError>> = OnceLock::new();
        let compute = || -> Result<f64, KernelError> {
            let f = |t: f64| self.regular_second_derivative(t);
            Ok(2.0 * integrate_abs(&f, 64.0, self.regular_decay(), cfg)?)
        };
        let cacheable = *cfg == QuadratureConfig::default() && self.is_default_series();
        match self.family {
            KernelFamily::Whitham if cacheable => WHITHAM.get_or_init(compute).clone(),
            KernelFamily::BidirectionalWhitham if cacheable => BIDIRECTIONAL.get_or_init(compute).clone(),
            KernelFamily::Whitham | KernelFamily::BidirectionalWhitham => compute(),
            _ => Ok(0.0),
        }
    }

    pub fn decomposition(&self, cfg: &QuadratureConfig) -> Result<KernelDecomposition, KernelError> {
        self.validate()?;
        Ok(KernelDecomposition {
            spec: *self,
            singular_kind: self.singular_kind(),
            regular_second_derivative_l1: self.regular_second_derivative_l1(cfg)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelDecomposition {
    pub spec: KernelSpec,
    pub singular_kind: SingularKind,
    pub regular_second_derivative_l1: f64,
}

impl KernelDecomposition {
    pub fn regular_eval(&self, x: f64) -> f64 {
        self.spec.regular(x)
    }
}

fn checked_abs(x: f64) -> Result<f64, KernelError> {
    let a = x.abs();
    if !(a >= DOMAIN_FLOOR) {
        return Err(KernelError::DomainError { x });
    }
    Ok(a)
}

/// tanh ξ / ξ for ξ ≥ 0.
fn tanh_ratio(xi: f64) -> f64 {
    if xi < 1e-4 {
        let x2 = xi * xi;
        1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0
    } else {
        xi.tanh() / xi
    }
}

fn kernel_bidirectional_unchecked(a: f64) -> f64 {
    // coth w = 1 + 2/(e^{2w} − 1)
    (2.0 / (0.5 * PI * a).exp_m1()).ln_1p() / PI
}

fn bidirectional_regular(a: f64) -> f64 {
    let w = 0.25 * PI * a;
    if w == 0.0 {
        return (4.0 / PI).ln();
    }
    if w < 0.1 {
        let w2 = w * w;
        return (4.0 / PI).ln()
            + w2 * (1.0 / 3.0 + w2 * (-7.0 / 90.0 + w2 * (62.0 / 2835.0 - w2 * 127.0 / 18900.0)));
    }
    (a / w.tanh()).ln()
}

/// `K_B(x) = (1/π)·log coth(π|x|/4)`.
pub fn kernel_bidirectional_closed(x: f64) -> Result<f64, KernelError> {
    Ok(kernel_bidirectional_unchecked(checked_abs(x)?))
}

/// `√2·Re((2n − ix)^{−1/2})` and its first two x-derivatives.
fn whitham_term(n: usize, x: f64) -> [f64; 3] {
    let z = Complex64::new(2.0 * n as f64, -x);
    let w = z.sqrt().inv();
    let w1 = Complex64::new(0.0, 0.5) * w / z;
    let w2 = -0.75 * w / (z * z);
    [SQRT_2 * w.re, SQRT_2 * w1.re, SQRT_2 * w2.re]
}

/// Pair `k ≥ 1` of the merged series in scaled units, with derivatives.
fn whitham_pair_parts(k: usize, c_prev: f64, c_k: f64, x: f64) -> [f64; 3] {
    let odd = whitham_term(2 * k - 1, x);
    let even = whitham_term(2 * k, x);
    [
        c_k * even[0] - c_prev * odd[0],
        c_k * even[1] - c_prev * odd[1],
        c_k * even[2] - c_prev * odd[2],
    ]
}

/// Pair `k ≥ 1` of the merged Whitham series, scaled by √(2π).
pub fn whitham_series_pair(k: usize, x: f64) -> f64 {
    assert!(k >= 1, "pairs are indexed from 1");
    let c_prev = central_binomial_ratio(k - 1);
    whitham_pair_parts(k, c_prev, c_prev * (2 * k - 1) as f64 / (2 * k) as f64, x)[0]
}

/// `C(2m, m)/4^m`.
fn central_binomial_ratio(m: usize) -> f64 {
    (1..=m).fold(1.0, |c, j| c * (2 * j - 1) as f64 / (2 * j) as f64)
}

/// Partial sum of the pairwise merged series for `K_W`: term 0 plus
/// `n_terms − 1` pairs. Unpaired truncation is not offered because the raw
/// series only converges conditionally.
pub fn kernel_whitham_series(x: f64, n_terms: usize) -> Result<f64, KernelError> {
    let a = checked_abs(x)?;
    if n_terms < 1 {
        return Err(KernelError::InvalidInput("n_terms must be at least 1".into()));
    }
    let mut sum = a.powf(-0.5);
    let mut c_prev = 1.0;
    for k in 1..n_terms {
        let c_k = c_prev * (2 * k - 1) as f64 / (2 * k) as f64;
        sum += whitham_pair_parts(k, c_prev, c_k, a)[0];
        c_prev = c_k;
    }
    Ok(sum / (2.0 * PI).sqrt())
}

/// Sum of all pairs (`R` and two derivatives) by Richardson extrapolation
/// over partial sums at `base·2^j` pairs, `j = 0..4`. The pair tail expands
/// in integer powers of `1/K`.
fn whitham_regular_accelerated(x: f64, base: usize) -> [f64; 3] {
    let base = base.max((40.0 * x).ceil() as usize);
    let mut sums = [[0.0; 3]; RICHARDSON_LEVELS];
    let mut acc = [0.0; 3];
    let mut c_prev = 1.0;
    let mut level = 0;
    let last = base << (RICHARDSON_LEVELS - 1);
    for k in 1..=last {
        let c_k = c_prev * (2 * k - 1) as f64 / (2 * k) as f64;
        let p = whitham_pair_parts(k, c_prev, c_k, x);
        for (s, v) in acc.iter_mut().zip(p) {
            *s += v;
        }
        c_prev = c_k;
        if k == base << level {
            sums[level] = acc;
            level += 1;
        }
    }
    let mut out = [0.0; 3];
    for (d, o) in out.iter_mut().enumerate() {
        let mut t: Vec<f64> = sums.iter().map(|s| s[d]).collect();
        for j in 1..RICHARDSON_LEVELS {
            let f = ((1u64 << j) - 1) as f64;
            for i in (j..RICHARDSON_LEVELS).rev() {
                t[i] += (t[i] - t[i - 1]) / f;
            }
        }
        *o = t[RICHARDSON_LEVELS - 1];
    }
    out
}

/// Accelerated merged series for `K_W(x)` with `base` pairs as the first
/// Richardson level.
pub fn kernel_whitham_accelerated(x: f64, base: usize) -> Result<f64, KernelError> {
    let a = checked_abs(x)?;
    if base < 1 {
        return Err(KernelError::InvalidInput("base pair count must be positive".into()));
    }
    Ok((a.powf(-0.5) + whitham_regular_accelerated(a, base)[0]) / (2.0 * PI).sqrt())
}

/// Piecewise Chebyshev interpolants of `R_W`, `R_W′`, `R_W″` on unit panels.
struct ChebTables {
    nodes: usize,
    coeffs: Vec<[Vec<f64>; 3]>,
}

impl ChebTables {
    fn build(panels: usize, nodes: usize) -> Self {
        let coeffs = (0..panels)
            .map(|j| {
                let mid = j as f64 + 0.5;
                let samples: Vec<[f64; 3]> = (0..nodes)
                    .map(|i| {
                        let t = (PI * (i as f64 + 0.5) / nodes as f64).cos();
                        whitham_regular_accelerated(mid + 0.5 * t, DEFAULT_SERIES_PAIRS)
                    })
                    .collect();
                let fit = |d: usize| -> Vec<f64> {
                    (0..nodes)
                        .map(|m| {
                            let s: f64 = samples
                                .iter()
                                .enumerate()
                                .map(|(i, v)| v[d] * (PI * m as f64 * (i as f64 + 0.5) / nodes as f64).cos())
                                .sum();
                            let c = 2.0 * s / nodes as f64;
                            if m == 0 {
                                0.5 * c
                            } else {
                                c
                            }
                        })
                        .collect()
                };
                // derivative tables are in x, and the panel half-width is ½
                [fit(0), fit(1), fit(2)]
            })
            .collect();
        Self { nodes, coeffs }
    }

    fn eval(&self, a: f64, d: usize) -> f64 {
        let j = (a.floor() as usize).min(self.coeffs.len() - 1);
        let t = 2.0 * (a - j as f64) - 1.0;
        let c = &self.coeffs[j][d];
        let (mut b1, mut b2) = (0.0, 0.0);
        for m in (1..self.nodes).rev() {
            let b0 = 2.0 * t * b1 - b2 + c[m];
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + c[0]
    }
}

fn whitham_tables() -> &'static ChebTables {
    static TABLES: OnceLock<ChebTables> = OnceLock::new();
    TABLES.get_or_init(|| ChebTables::build(WHITHAM_CUTOFF as usize, 22))
}

/// Inverse Fourier transform of the symbol, with the singular part split
/// off analytically and the smooth remainder integrated numerically.
pub fn kernel_numeric_from_symbol(
    spec: &KernelSpec,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, KernelError> {
    let a = checked_abs(x)?;
    match spec.family {
        KernelFamily::Whitham => {
            // √tanh ξ − 1 = −d/(1 + √(1−d)), d = 1 − tanh ξ
            let f = |xi: f64| {
                let e = (-2.0 * xi).exp();
                let d = 2.0 * e / (1.0 + e);
                -d / (1.0 + (1.0 - d).sqrt()) * xi.powf(-0.5) * (xi * a).cos()
            };
            let sing = [Singularity::algebraic(0.0, 0.5)?];
            let r = integrate_panel(&f, 0.0, 40.0, &sing, cfg)?;
            Ok((2.0 * PI * a).powf(-0.5) + r.value / PI)
        }
        KernelFamily::BidirectionalWhitham => {
            let f = |xi: f64| (-2.0 * xi).exp() * tanh_ratio(xi) * (xi * a).cos();
            let r = integrate_panel(&f, 0.0, 20.0, &[], cfg)?;
            Ok((4.0 / (a * a)).ln_1p() / (2.0 * PI) - r.value / PI)
        }
        _ => spec.singular(a),
    }
}

/// `δ²ₓK(y) = K(y+x) + K(y−x) − 2K(y)`.
pub fn second_difference<F>(k: F, x: f64, y: f64) -> Result<f64, KernelError>
where
    F: Fn(f64) -> Result<f64, KernelError>,
{
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(k(y + x)? + k(y - x)? - 2.0 * k(y)?)
}

/// `δ₂ₓK(y) = K(y+x) − K(y−x)`.
pub fn first_central_difference<F>(k: F, x: f64, y: f64) -> Result<f64, KernelError>
where
    F: Fn(f64) -> Result<f64, KernelError>,
{
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(k(y + x)? - k(y - x)?)
}

/// `𝒦(x) = ∫₀ˣ K` for the physical kernel; `x = ∞` is accepted.
pub fn antiderivative_k(spec: &KernelSpec, x: f64, cfg: &QuadratureConfig) -> Result<f64, KernelError> {
    if !(x >= 0.0) {
        return Err(KernelError::InvalidInput(format!("antiderivative needs x ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let singular_integral = |t: f64| match spec.singular_kind() {
        SingularKind::Homogeneous { s } => t.powf(s) / s,
        SingularKind::Logarithmic => t * (1.0 - t.ln()),
    };
    let cutoff = match spec.family {
        KernelFamily::Whitham => WHITHAM_CUTOFF,
        KernelFamily::BidirectionalWhitham => BIDIRECTIONAL_CUTOFF,
        _ => {
            if x.is_infinite() {
                return Err(KernelError::InvalidInput("pure kernels are not integrable at infinity".into()));
            }
            return Ok(singular_integral(x));
        }
    };
    let top = x.min(cutoff);
    let r = integrate_panel(&|t: f64| spec.regular(t), 0.0, top, &[], cfg)?;
    Ok((singular_integral(top) + r.value) / spec.scale)
}

/// Symbol samples `symbol(2πk/P)` for `k = 0..=n`.
pub fn periodized_fourier_coefficients(spec: &KernelSpec, period: f64, n: usize) -> Result<Vec<f64>, KernelError> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(KernelError::InvalidInput(format!("period must be positive, got {period}")));
    }
    if n < 4 {
        return Err(KernelError::InvalidInput(format!("need at least 4 modes, got {n}")));
    }
    match spec.family {
        KernelFamily::Whitham | KernelFamily::BidirectionalWhitham => {
            Ok((0..=n).map(|k| spec.symbol(2.0 * PI * k as f64 / period)).collect())
        }
        _ => Err(KernelError::InvalidInput("pure kernels have no periodization".into())),
    }
}

/// ∫₀^∞ |f| with sign changes located on a grid and bisected, so every
/// panel has a smooth integrand.
fn integrate_abs<F: Fn(f64) -> f64>(f: &F, head: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64, KernelError> {
    let samples = 4096;
    let grid: Vec<f64> = (0..=samples)
        .map(|i| head * (i as f64 / samples as f64).powi(2))
        .collect();
    let mut breaks = vec![0.0];
    for w in grid.windows(2) {
        let (fa, fb) = (f(w[0]), f(w[1]));
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (w[0], w[1], fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm * flo > 0.0 {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            breaks.push(0.5 * (lo + hi));
        }
    }
    breaks.push(head);
    let g = |t: f64| f(t).abs();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            total += integrate_panel(&g, w[0], w[1], &[], cfg)?.value;
        }
    }
    total += integrate_tail(&g, head, p, cfg)?.value;
    Ok(total)
}

/// One sample of the tail bound `0 ≤ ∫_ν^∞ δ²ₓK ≤ −K′(ν−x)·x²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundCheck {
    pub x: f64,
    pub nu: f64,
    pub integral: f64,
    pub bound: f64,
    pub passed: bool,
}

pub fn check_tail_bound(spec: &KernelSpec, x: f64, nu: f64, cfg: &QuadratureConfig) -> Result<TailBoundCheck, KernelError> {
    if !(x > 0.0 && x < nu) {
        return Err(KernelError::InvalidInput(format!("need 0 < x < ν, got x = {x}, ν = {nu}")));
    }
    let f = |y: f64| spec.scaled_second_difference(x, y).unwrap_or(f64::NAN);
    // the water-wave kernels vanish to working precision past their cutoff,
    // so a mapped tail would sample nothing but zeros
    let integral = match spec.family {
        KernelFamily::Whitham => integrate_panel(&f, nu, nu.max(WHITHAM_CUTOFF) + x, &[], cfg)?.value,
        KernelFamily::BidirectionalWhitham => {
            integrate_panel(&f, nu, nu.max(BIDIRECTIONAL_CUTOFF) + x, &[], cfg)?.value
        }
        _ => integrate_tail(&f, nu, spec.second_difference_decay(), cfg)?.value,
    };
    let bound = -spec.scaled_derivative(nu - x)? * x * x;
    let slack = 1e-12 * bound.abs().max(1e-300);
    Ok(TailBoundCheck {
        x,
        nu,
        integral,
        bound,
        passed: integral >= -slack && integral <= bound + slack,
    })
}

/// One sample of `‖δ²ₓR‖_{L¹} ≤ x²‖R″‖_{L¹}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderBoundCheck {
    pub x: f64,
    pub difference_l1: f64,
    pub bound: f64,
    pub passed: bool,
}

pub fn check_remainder_bound(spec: &KernelSpec, x: f64, cfg: &QuadratureConfig) -> Result<RemainderBoundCheck, KernelError> {
    if !(x > 0.0) {
        return Err(KernelError::InvalidInput(format!("need x > 0, got {x}")));
    }
    let f = |y: f64| spec.regular_second_difference(x, y);
    let difference_l1 = 2.0 * integrate_abs(&f, 64.0 + 4.0 * x, spec.regular_decay(), cfg)?;
    let bound = x * x * spec.regular_second_derivative_l1(cfg)?;
    Ok(RemainderBoundCheck {
        x,
        difference_l1,
        bound,
        passed: difference_l1 <= bound * (1.0 + 1e-9),
    })
}
