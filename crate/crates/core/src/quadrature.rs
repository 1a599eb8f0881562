//! Adaptive Gauss–Kronrod integration for integrands with algebraic or
//! logarithmic endpoint singularities and algebraically decaying tails.
//!
//! Singular endpoints are removed by a change of variables before any rule is
//! applied. Interior singular points split the range. Panels are refined
//! globally (worst error first) and summed in a fixed order, so a result is
//! bit-stable for a given configuration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest number of live panels before giving up.
const MAX_PANELS: usize = 1 << 16;
/// Upper limit of the exponential variable used for logarithmic endpoints.
const LOG_MAP_CUTOFF: f64 = 46.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: usize,
    pub tail_cut: f64,
    pub tail_order: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 40,
            tail_cut: 1e4,
            tail_order: 2.0,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_tail_cut(mut self, tail_cut: f64) -> Self {
        self.tail_cut = tail_cut;
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol >= 0.0
            && self.max_depth >= 1
            && self.tail_cut > 1.0
            && self.tail_order > 1.0;
        if ok {
            Ok(())
        } else {
            Err(QuadratureError::InvalidConfig(format!("{self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SingularityKind {
    /// Behaves like |τ − a|^{s−1} with 0 < s < 1.
    Algebraic { s: f64 },
    /// Behaves like log|τ − a|.
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub location: f64,
    pub kind: SingularityKind,
}

impl Singularity {
    pub fn algebraic(location: f64, s: f64) -> Result<Self, QuadratureError> {
        if !(s > 0.0 && s < 1.0) || !location.is_finite() {
            return Err(QuadratureError::InvalidSingularity { location, s });
        }
        Ok(Self {
            location,
            kind: SingularityKind::Algebraic { s },
        })
    }

    pub fn logarithmic(location: f64) -> Self {
        Self {
            location,
            kind: SingularityKind::Logarithmic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid range: a = {a} must be smaller than b = {b}")]
    InvalidRange { a: f64, b: f64 },
    #[error("no convergence: value {value}, error estimate {error}")]
    NonConvergent { value: f64, error: f64 },
    #[error("decay order {p} must exceed 1")]
    InvalidDecay { p: f64 },
    #[error("invalid singularity at {location} with exponent s = {s}")]
    InvalidSingularity { location: f64, s: f64 },
    #[error("invalid quadrature configuration {0}")]
    InvalidConfig(String),
}

/// A scalar integrand. `eval_offset(anchor, h)` must equal `eval(anchor + h)`
/// but may use `h` directly to avoid cancellation next to a singular anchor.
pub trait Integrand {
    fn eval(&self, x: f64) -> f64;

    fn eval_offset(&self, anchor: f64, offset: f64) -> f64 {
        self.eval(anchor + offset)
    }
}

impl<F: Fn(f64) -> f64> Integrand for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Wraps a closure `f(anchor, offset)` that evaluates at `anchor + offset`.
pub struct Anchored<F>(pub F);

impl<F: Fn(f64, f64) -> f64> Integrand for Anchored<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.0)(x, 0.0)
    }

    fn eval_offset(&self, anchor: f64, offset: f64) -> f64 {
        (self.0)(anchor, offset)
    }
}

// 21-point Kronrod nodes with the embedded 10-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

struct RuleOutput {
    value: f64,
    error: f64,
    resabs: f64,
}

fn gauss_kronrod<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64) -> RuleOutput {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = g(center);
    let mut gauss = 0.0;
    let mut kronrod = fc * WGK[10];
    let mut resabs = fc.abs() * WGK[10];
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = kronrod * half;
    let resabs = resabs * scale;
    let resasc = resasc * scale;
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor > error {
        error = floor;
    }
    if !value.is_finite() || !error.is_finite() {
        return RuleOutput {
            value: f64::NAN,
            error: f64::INFINITY,
            resabs: f64::INFINITY,
        };
    }
    RuleOutput {
        value,
        error,
        resabs,
    }
}

/// Change of variables applied to one segment.
#[derive(Debug, Clone, Copy)]
enum Map {
    /// τ = t on [lo, hi].
    Identity,
    /// τ = anchor + dir·len·w^{1/s}, w ∈ [0,1].
    Power { anchor: f64, dir: f64, len: f64, s: f64 },
    /// τ = anchor + dir·len·e^{−v}, v ∈ [0, LOG_MAP_CUTOFF].
    Exponential { anchor: f64, dir: f64, len: f64 },
    /// τ = cut / t, t = w^{1/s}, w ∈ [0,1].
    Inverse { cut: f64, s: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    map: Map,
    lo: f64,
    hi: f64,
}

fn mapped_value<F: Integrand + ?Sized>(f: &F, map: &Map, w: f64) -> f64 {
    match *map {
        Map::Identity => f.eval(w),
        Map::Power { anchor, dir, len, s } => {
            let r = 1.0 / s;
            let offset = len * w.powf(r);
            if offset == 0.0 {
                return 0.0;
            }
            let jac = len * r * w.powf(r - 1.0);
            f.eval_offset(anchor, dir * offset) * jac
        }
        Map::Exponential { anchor, dir, len } => {
            let offset = len * (-w).exp();
            if offset == 0.0 {
                return 0.0;
            }
            f.eval_offset(anchor, dir * offset) * offset
        }
        Map::Inverse { cut, s } => {
            let r = 1.0 / s;
            let t = w.powf(r);
            let tau = cut / t;
            if t == 0.0 || !tau.is_finite() {
                return 0.0;
            }
            let jac = cut / (t * t) * r * w.powf(r - 1.0);
            f.eval(tau) * jac
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    seg: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    resabs: f64,
    depth: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seg.cmp(&self.seg))
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn ordered_sum(panels: &mut [Panel]) -> (f64, f64) {
    panels.sort_by(|p, q| p.seg.cmp(&q.seg).then(p.lo.total_cmp(&q.lo)));
    let mut v = Accumulator::default();
    let mut e = Accumulator::default();
    for p in panels.iter() {
        v.add(p.value);
        e.add(p.error);
    }
    (v.value(), e.value())
}

fn adaptive<F: Integrand + ?Sized>(
    f: &F,
    segments: &[Segment],
    cfg: &QuadratureConfig,
) -> Result<QuadResult, QuadratureError> {
    let mut evaluations = 0usize;
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Panel> = Vec::new();
    let mut total = Accumulator::default();
    let mut total_err = Accumulator::default();
    let mut capped_err = 0.0;

    let make = |seg: usize, lo: f64, hi: f64, depth: usize, evals: &mut usize| {
        let s = &segments[seg];
        let g = |w: f64| mapped_value(f, &s.map, w);
        *evals += 21;
        let r = gauss_kronrod(&g, lo, hi);
        Panel {
            seg,
            lo,
            hi,
            value: r.value,
            error: r.error,
            resabs: r.resabs,
            depth,
        }
    };

    for (i, s) in segments.iter().enumerate() {
        let mut p = make(i, s.lo, s.hi, 0, &mut evaluations);
        if let Map::Exponential { .. } = s.map {
            // Mass beyond the cutoff of the exponential variable.
            let g_end = mapped_value(f, &s.map, s.hi);
            if g_end.is_finite() {
                p.error += g_end.abs();
            }
        }
        total.add(p.value);
        total_err.add(p.error);
        heap.push(p);
    }

    let mut best: Option<(f64, f64)> = None;
    loop {
        let value = total.value();
        let err = total_err.value();
        if !value.is_finite() {
            return Err(QuadratureError::NonConvergent {
                value,
                error: f64::INFINITY,
            });
        }
        if best.map_or(true, |(_, e)| err < e) {
            best = Some((value, err));
        }
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let roundoff = worst.error <= 100.0 * f64::EPSILON * worst.resabs;
        if worst.depth >= cfg.max_depth || roundoff || heap.len() + done.len() >= MAX_PANELS {
            if !roundoff {
                capped_err += worst.error;
            }
            done.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = make(worst.seg, worst.lo, mid, worst.depth + 1, &mut evaluations);
        let right = make(worst.seg, mid, worst.hi, worst.depth + 1, &mut evaluations);
        total.add(-worst.value);
        total_err.add(-worst.error);
        for child in [left, right] {
            total.add(child.value);
            total_err.add(child.error);
            heap.push(child);
        }
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(done);
    let (value, err) = ordered_sum(&mut panels);
    let (best_value, best_err) = best.unwrap_or((value, err));
    let (value, err) = if err <= best_err { (value, err) } else { (best_value, best_err) };
    let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
    if err <= tol || capped_err <= tol {
        Ok(QuadResult {
            value,
            error: err,
            evaluations,
        })
    } else {
        Err(QuadratureError::NonConvergent { value, error: err })
    }
}

/// Endpoint treatment for one side of a subinterval.
#[derive(Debug, Clone, Copy, PartialEq)]
enum EndKind {
    Regular,
    Power(f64),
    Log,
}

fn merge_kind(a: EndKind, b: EndKind) -> EndKind {
    match (a, b) {
        (EndKind::Power(s), EndKind::Power(t)) => EndKind::Power(s.min(t)),
        (EndKind::Power(s), _) | (_, EndKind::Power(s)) => EndKind::Power(s),
        (EndKind::Log, _) | (_, EndKind::Log) => EndKind::Log,
        _ => EndKind::Regular,
    }
}

fn kind_of(s: &Singularity) -> EndKind {
    match s.kind {
        SingularityKind::Algebraic { s } => EndKind::Power(s),
        SingularityKind::Logarithmic => EndKind::Log,
    }
}

fn endpoint_segment(anchor: f64, dir: f64, len: f64, kind: EndKind) -> Segment {
    match kind {
        EndKind::Power(s) => Segment {
            map: Map::Power { anchor, dir, len, s },
            lo: 0.0,
            hi: 1.0,
        },
        EndKind::Log => Segment {
            map: Map::Exponential { anchor, dir, len },
            lo: 0.0,
            hi: LOG_MAP_CUTOFF,
        },
        EndKind::Regular => unreachable!("regular endpoints use the identity map"),
    }
}

fn build_segments(a: f64, b: f64, sings: &[Singularity]) -> Vec<Segment> {
    let mut points: Vec<(f64, EndKind)> = vec![(a, EndKind::Regular), (b, EndKind::Regular)];
    for s in sings {
        if s.location < a || s.location > b {
            continue;
        }
        let k = kind_of(s);
        match points.iter_mut().find(|(x, _)| *x == s.location) {
            Some(p) => p.1 = merge_kind(p.1, k),
            None => points.push((s.location, k)),
        }
    }
    points.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut segments = Vec::new();
    for w in points.windows(2) {
        let (lo, kl) = w[0];
        let (hi, kr) = w[1];
        match (kl, kr) {
            (EndKind::Regular, EndKind::Regular) => segments.push(Segment {
                map: Map::Identity,
                lo,
                hi,
            }),
            (k, EndKind::Regular) => segments.push(endpoint_segment(lo, 1.0, hi - lo, k)),
            (EndKind::Regular, k) => segments.push(endpoint_segment(hi, -1.0, hi - lo, k)),
            (k1, k2) => {
                let mid = 0.5 * (lo + hi);
                segments.push(endpoint_segment(lo, 1.0, mid - lo, k1));
                segments.push(endpoint_segment(hi, -1.0, hi - mid, k2));
            }
        }
    }
    segments
}

/// ∫ₐᵇ f with the listed singular points treated by substitution.
///
/// Singularities outside `[a, b]` are ignored.
pub fn integrate_panel<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    sings: &[Singularity],
    cfg: &QuadratureConfig,
) -> Result<QuadResult, QuadratureError> {
    cfg.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadratureError::InvalidRange { a, b });
    }
    adaptive(f, &build_segments(a, b, sings), cfg)
}

/// ∫ₐ^∞ f for |f(τ)| ≲ τ^{−p}, p > 1.
pub fn integrate_tail<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult, QuadratureError> {
    integrate_tail_with(f, a, p, &[], cfg)
}

/// Like [`integrate_tail`], with singular points on the finite part.
///
/// The range is split at `T = max(tail_cut, a)`; on (T, ∞) the substitution
/// τ = T/t turns the τ^{−p} decay into a t^{p−2} endpoint behaviour at t = 0,
/// which the power map removes.
pub fn integrate_tail_with<F: Integrand + ?Sized>(
    f: &F,
    a: f64,
    p: f64,
    sings: &[Singularity],
    cfg: &QuadratureConfig,
) -> Result<QuadResult, QuadratureError> {
    cfg.validate()?;
    if !(p > 1.0) || !p.is_finite() {
        return Err(QuadratureError::InvalidDecay { p });
    }
    if !a.is_finite() {
        return Err(QuadratureError::InvalidRange { a, b: f64::INFINITY });
    }
    let cut = cfg.tail_cut.max(a);
    let mut segments = if a < cut {
        build_segments(a, cut, sings)
    } else {
        Vec::new()
    };
    segments.push(Segment {
        map: Map::Inverse { cut, s: p - 1.0 },
        lo: 0.0,
        hi: 1.0,
    });
    adaptive(f, &segments, cfg)
}

/// ∫₀^∞ f as a finite part on [0, tail_cut] plus the mapped tail.
pub fn integrate_half_line<F: Integrand + ?Sized>(
    f: &F,
    p: f64,
    sings: &[Singularity],
    cfg: &QuadratureConfig,
) -> Result<QuadResult, QuadratureError> {
    let cut = cfg.tail_cut;
    let near: Vec<Singularity> = sings.iter().copied().filter(|s| s.location <= cut).collect();
    let head = integrate_panel(f, 0.0, cut, &near, cfg)?;
    let tail = integrate_tail(f, cut, p, cfg)?;
    Ok(QuadResult {
        value: head.value + tail.value,
        error: head.error + tail.error,
        evaluations: head.evaluations + tail.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn inverse_square_root_at_left_end() {
        let s = [Singularity::algebraic(0.0, 0.5).unwrap()];
        let r = integrate_panel(&|t: f64| t.powf(-0.5), 0.0, 1.0, &s, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn logarithm_at_left_end() {
        let s = [Singularity::logarithmic(0.0)];
        let r = integrate_panel(&|t: f64| -t.ln(), 0.0, 1.0, &s, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn beta_half_three_halves_with_right_singularity() {
        let s = [Singularity::algebraic(1.0, 0.5).unwrap()];
        let f = Anchored(|a: f64, h: f64| {
            let t = a + h;
            let one_minus = if a == 1.0 { -h } else { 1.0 - t };
            one_minus.powf(-0.5) * t.sqrt()
        });
        let r = integrate_panel(&f, 0.0, 1.0, &s, &cfg()).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn interior_singularity_is_split() {
        let s = [Singularity::algebraic(0.5, 0.5).unwrap()];
        let f = Anchored(|a: f64, h: f64| if a == 0.5 { h.abs() } else { (a + h - 0.5).abs() }.powf(-0.5));
        let r = integrate_panel(&f, 0.0, 1.0, &s, &cfg()).unwrap();
        let exact = 2.0 * 2.0 * 0.5f64.sqrt();
        assert!((r.value - exact).abs() < 1e-10 * exact, "{r:?}");
    }

    #[test]
    fn both_ends_singular() {
        let s = [
            Singularity::algebraic(0.0, 0.5).unwrap(),
            Singularity::algebraic(1.0, 0.5).unwrap(),
        ];
        let f = Anchored(|a: f64, h: f64| {
            let (t, one_minus) = if a == 1.0 { (1.0 + h, -h) } else { (a + h, 1.0 - a - h) };
            (t * one_minus).powf(-0.5)
        });
        let r = integrate_panel(&f, 0.0, 1.0, &s, &cfg()).unwrap();
        assert!((r.value - PI).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn tail_of_inverse_square() {
        let r = integrate_tail(&|t: f64| t.powi(-2), 1.0, 2.0, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn tail_with_slow_decay() {
        // ∫₁^∞ τ^{-3/2} = 2
        let r = integrate_tail(&|t: f64| t.powf(-1.5), 1.0, 1.5, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn tail_starting_beyond_cut() {
        let c = cfg().with_tail_cut(10.0);
        let r = integrate_tail(&|t: f64| t.powi(-3), 20.0, 3.0, &c).unwrap();
        assert!((r.value - 1.0 / 800.0).abs() < 1e-15, "{r:?}");
    }

    #[test]
    fn errors_are_reported() {
        assert!(matches!(
            integrate_panel(&|t: f64| t, 1.0, 1.0, &[], &cfg()),
            Err(QuadratureError::InvalidRange { .. })
        ));
        assert!(matches!(
            integrate_tail(&|t: f64| t, 1.0, 1.0, &cfg()),
            Err(QuadratureError::InvalidDecay { .. })
        ));
        assert!(Singularity::algebraic(0.0, 1.0).is_err());
        let bad = QuadratureConfig {
            max_depth: 0,
            ..cfg()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn non_integrable_input_fails() {
        let c = QuadratureConfig {
            max_depth: 8,
            ..cfg()
        };
        let r = integrate_panel(&|t: f64| 1.0 / t, 0.0, 1.0, &[], &c);
        assert!(matches!(r, Err(QuadratureError::NonConvergent { .. })), "{r:?}");
    }

    #[test]
    fn smooth_integrand_is_cheap() {
        let r = integrate_panel(&|t: f64| t.exp(), 0.0, 1.0, &[], &cfg()).unwrap();
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-14);
        assert_eq!(r.evaluations, 21);
    }
}
