//! Shared numerical kernels: special functions, quadrature rules, uniform grids
//! and grid norms.
//!
//! Everything here is deterministic. Parallel loops only ever write disjoint
//! outputs; reductions are performed sequentially with pairwise summation so
//! that results are bit-identical across thread counts.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `sin(πx)/(πx)` with the removable singularity handled by its Taylor series.
pub fn sinc(x: f64) -> f64 {
    let t = PI * x;
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

/// Centered cardinal B-spline of order `n` (degree `n - 1`), supported on
/// `[-n/2, n/2]`. Order 1 is the half-open box `[-1/2, 1/2)`.
pub fn centered_bspline(n: u32, x: f64) -> f64 {
    let half = n as f64 / 2.0;
    if x < -half || x >= half {
        return 0.0;
    }
    if n == 1 {
        return 1.0;
    }
    // Evaluate by the truncated-power formula on the mirrored side closest to
    // the support boundary to limit cancellation.
    let x = if x > 0.0 { -x } else { x };
    let deg = (n - 1) as i32;
    let mut acc = 0.0;
    let mut binom = 1.0;
    for k in 0..=n {
        let t = x + half - k as f64;
        if t > 0.0 {
            let term = binom * t.powi(deg);
            if k % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    let mut fact = 1.0;
    for i in 2..n {
        fact *= i as f64;
    }
    (acc / fact).max(0.0)
}

/// Interior knots of `centered_bspline(n, ·)`.
pub fn bspline_knots(n: u32) -> Vec<f64> {
    (0..=n).map(|i| i as f64 - n as f64 / 2.0).collect()
}

/// Infinitely smooth bump on `(-1, 1)` with value 1 at the origin.
pub fn bump(t: f64) -> f64 {
    let u = 1.0 - t * t;
    if u <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / u).exp()
    }
}

/// Natural log of [`bump`]; `-inf` outside the support.
pub fn log_bump(t: f64) -> f64 {
    let u = 1.0 - t * t;
    if u <= 0.0 {
        f64::NEG_INFINITY
    } else {
        1.0 - 1.0 / u
    }
}

fn exp_ramp(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Smooth cutoff equal to 1 on `[-1/2, 1/2]` and 0 outside `[-1, 1]`.
pub fn smooth_cutoff(t: f64) -> f64 {
    let u = 2.0 * (1.0 - t.abs());
    if u >= 1.0 {
        return 1.0;
    }
    if u <= 0.0 {
        return 0.0;
    }
    let a = exp_ramp(u);
    let b = exp_ramp(1.0 - u);
    a / (a + b)
}

/// Tensor product of [`smooth_cutoff`]: the multiplier `η` with `η = 1` on
/// `T^d` and `η = 0` outside `2T^d`.
pub fn eta(xi: &[f64]) -> f64 {
    xi.iter().map(|&t| smooth_cutoff(t)).product()
}

/// Generalized binomial coefficients `binom(s, ν)` for `ν = 0..count`.
pub fn binomial_series(s: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut c = 1.0;
    for nu in 0..count {
        out.push(c);
        c *= (s - nu as f64) / (nu as f64 + 1.0);
    }
    out
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_c(values: &[C64]) -> C64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_c(&values[..mid]) + pairwise_sum_c(&values[mid..])
}

// ---------------------------------------------------------------------------
// Axis-aligned boxes and grids
// ---------------------------------------------------------------------------

/// Axis-aligned box `[lo_1, hi_1] × … × [lo_d, hi_d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        debug_assert_eq!(lo.len(), hi.len());
        AxisBox { lo, hi }
    }

    pub fn cube(dim: usize, half: f64) -> Self {
        AxisBox::new(vec![-half; dim], vec![half; dim])
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        AxisBox::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&l, &h))| v >= l && v <= h)
    }

    pub fn corners(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|ax| {
                        if mask >> ax & 1 == 1 {
                            self.hi[ax]
                        } else {
                            self.lo[ax]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Bounding box of the image of this box under the linear map `a`.
    pub fn linear_image(&self, a: &nalgebra::DMatrix<f64>) -> AxisBox {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for c in self.corners() {
            let v = a * nalgebra::DVector::from_vec(c);
            for ax in 0..d {
                lo[ax] = lo[ax].min(v[ax]);
                hi[ax] = hi[ax].max(v[ax]);
            }
        }
        AxisBox::new(lo, hi)
    }

    pub fn max_abs(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| l.abs().max(h.abs()))
            .collect()
    }
}

/// Uniform tensor grid over a box, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub bounds: AxisBox,
    pub points: Vec<usize>,
}

impl Grid {
    pub fn new(bounds: AxisBox, points_per_axis: usize) -> Result<Self> {
        let d = bounds.dim();
        Grid::with_points(bounds, vec![points_per_axis; d])
    }

    pub fn with_points(bounds: AxisBox, points: Vec<usize>) -> Result<Self> {
        if points.len() != bounds.dim() {
            return Err(Error::DimensionMismatch {
                expected: bounds.dim(),
                got: points.len(),
            });
        }
        if points.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParams("grid needs at least 2 points per axis".into()));
        }
        for ax in 0..bounds.dim() {
            if !(bounds.hi[ax] > bounds.lo[ax]) {
                return Err(Error::InvalidParams(format!("empty box along axis {ax}")));
            }
        }
        Ok(Grid { bounds, points })
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|ax| (self.bounds.hi[ax] - self.bounds.lo[ax]) / (self.points[ax] - 1) as f64)
            .collect()
    }

    pub fn axis_coords(&self, ax: usize) -> Vec<f64> {
        let h = self.spacing()[ax];
        (0..self.points[ax])
            .map(|i| self.bounds.lo[ax] + i as f64 * h)
            .collect()
    }

    /// Coordinates of the flat index `idx` (last axis fastest).
    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let d = self.dim();
        let h = self.spacing();
        let mut x = vec![0.0; d];
        for ax in (0..d).rev() {
            let i = idx % self.points[ax];
            idx /= self.points[ax];
            x[ax] = self.bounds.lo[ax] + i as f64 * h[ax];
        }
        x
    }

    /// Trapezoid weight of the flat index `idx`.
    pub fn weight(&self, mut idx: usize) -> f64 {
        let h = self.spacing();
        let mut w = 1.0;
        for ax in (0..self.dim()).rev() {
            let n = self.points[ax];
            let i = idx % n;
            idx /= n;
            w *= if i == 0 || i == n - 1 { 0.5 * h[ax] } else { h[ax] };
        }
        w
    }

    /// Same spacing, box enlarged by `below[ax]` / `above[ax]` (rounded up to a
    /// whole number of cells).
    pub fn extended(&self, below: &[f64], above: &[f64]) -> Grid {
        let h = self.spacing();
        let mut lo = self.bounds.lo.clone();
        let mut hi = self.bounds.hi.clone();
        let mut pts = self.points.clone();
        for ax in 0..self.dim() {
            let nb = (below[ax].max(0.0) / h[ax] - 1e-9).ceil().max(0.0) as usize;
            let na = (above[ax].max(0.0) / h[ax] - 1e-9).ceil().max(0.0) as usize;
            lo[ax] -= nb as f64 * h[ax];
            hi[ax] += na as f64 * h[ax];
            pts[ax] += nb + na;
        }
        Grid {
            bounds: AxisBox::new(lo, hi),
            points: pts,
        }
    }

    /// Evaluates `f` at every grid point, in parallel, in flat-index order.
    pub fn map<F>(&self, f: F) -> Vec<C64>
    where
        F: Fn(&[f64]) -> C64 + Sync,
    {
        (0..self.len())
            .into_par_iter()
            .map(|i| f(&self.point(i)))
            .collect()
    }

    pub fn try_map<F>(&self, f: F) -> Result<Vec<C64>>
    where
        F: Fn(&[f64]) -> Result<C64> + Sync,
    {
        (0..self.len())
            .into_par_iter()
            .map(|i| f(&self.point(i)))
            .collect()
    }
}

/// Grid `L_p` norm (trapezoid weights); `p = ∞` is the grid maximum.
pub fn grid_lp_norm(values: &[C64], grid: &Grid, p: f64) -> f64 {
    debug_assert_eq!(values.len(), grid.len());
    if p.is_infinite() {
        return values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    }
    let terms: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, v)| grid.weight(i) * v.norm().powf(p))
        .collect();
    pairwise_sum(&terms).powf(1.0 / p)
}

// ---------------------------------------------------------------------------
// Gauss rules
// ---------------------------------------------------------------------------

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out[i] = (-z, w);
        out[n - 1 - i] = (z, w);
    }
    out
}

pub(crate) fn gl16() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

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

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_814_296_910,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
    mass: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F>(f: &mut F, a: f64, b: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<C64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc * WGK[10];
    let mut gauss = ZERO;
    let mut mass = fc.norm() * WGK[10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        kron += (f1 + f2) * WGK[j];
        mass += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    Ok(Panel {
        a,
        b,
        value: kron * h,
        error: ((kron - gauss) * h).norm(),
        mass: mass * h.abs(),
    })
}

/// Absolute/relative accuracy target for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn abs(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }
    pub const fn rel(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: C64,
    pub error: f64,
}

const MAX_PANELS: usize = 4000;

/// Globally adaptive Gauss–Kronrod (10/21) quadrature over `[a, b]`, with the
/// interval pre-split at `breaks`.
pub fn integrate_adaptive<F>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
    context: &str,
) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<C64>,
{
    if a == b {
        return Ok(Quadrature { value: ZERO, error: 0.0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&t| t > lo && t < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![lo];
    edges.extend(cuts);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        heap.push(gk21(&mut f, w[0], w[1])?);
    }
    loop {
        let (total, err, mass) = heap.iter().fold((ZERO, 0.0, 0.0), |acc, p| {
            (acc.0 + p.value, acc.1 + p.error, acc.2 + p.mass)
        });
        let target = tol.abs.max(tol.rel * total.norm()).max(64.0 * f64::EPSILON * mass);
        if err <= target {
            return Ok(Quadrature {
                value: total * sign,
                error: err,
            });
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::QuadratureFailure {
                context: context.to_string(),
                target,
                estimate: err,
            });
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::QuadratureFailure {
                context: context.to_string(),
                target,
                estimate: err,
            });
        }
        heap.push(gk21(&mut f, worst.a, mid)?);
        heap.push(gk21(&mut f, mid, worst.b)?);
    }
}

/// Integral over `[a, ∞)` via the map `x = a + t/(1-t)`.
pub fn integrate_to_infinity<F>(mut f: F, a: f64, tol: Tolerance, context: &str) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<C64>,
{
    integrate_adaptive(
        |t: f64| {
            if t >= 1.0 {
                return Ok(ZERO);
            }
            let s = 1.0 - t;
            Ok(f(a + t / s)? / (s * s))
        },
        0.0,
        1.0,
        &[],
        tol,
        context,
    )
}

/// Nested adaptive quadrature over a box. `breaks[ax]` lists known kink or
/// jump locations along each axis.
pub fn integrate_box<F>(
    f: &F,
    bounds: &AxisBox,
    breaks: &[Vec<f64>],
    tol: Tolerance,
    context: &str,
) -> Result<Quadrature>
where
    F: Fn(&[f64]) -> Result<C64>,
{
    let d = bounds.dim();
    let mut x = vec![0.0; d];
    nested(f, bounds, breaks, tol, context, 0, &mut x)
}

fn nested<F>(
    f: &F,
    bounds: &AxisBox,
    breaks: &[Vec<f64>],
    tol: Tolerance,
    context: &str,
    axis: usize,
    x: &mut Vec<f64>,
) -> Result<Quadrature>
where
    F: Fn(&[f64]) -> Result<C64>,
{
    let d = bounds.dim();
    let empty = Vec::new();
    let br = breaks.get(axis).unwrap_or(&empty);
    if axis + 1 == d {
        let mut xs = x.clone();
        return integrate_adaptive(
            |t| {
                xs[axis] = t;
                f(&xs)
            },
            bounds.lo[axis],
            bounds.hi[axis],
            br,
            tol,
            context,
        );
    }
    let inner_tol = Tolerance {
        abs: tol.abs * 0.1 / (bounds.hi[axis] - bounds.lo[axis]).max(1.0),
        rel: tol.rel * 0.1,
    };
    let mut err_acc = 0.0;
    let mut xs = x.clone();
    let q = integrate_adaptive(
        |t| {
            xs[axis] = t;
            let inner = nested(f, bounds, breaks, inner_tol, context, axis + 1, &mut xs)?;
            err_acc += inner.error;
            Ok(inner.value)
        },
        bounds.lo[axis],
        bounds.hi[axis],
        br,
        tol,
        context,
    )?;
    Ok(q)
}

/// Composite Gauss–Legendre rule on `[a, b]`: split at `breaks`, uniform
/// panels no wider than `max_width`, and geometric grading of `grading`
/// levels toward every segment endpoint.
pub fn composite_rule(a: f64, b: f64, breaks: &[f64], max_width: f64, grading: usize) -> Vec<(f64, f64)> {
    let mut edges = vec![a];
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    edges.extend(cuts);
    edges.push(b);

    let mut panels: Vec<(f64, f64)> = Vec::new();
    for seg in edges.windows(2) {
        let (s0, s1) = (seg[0], seg[1]);
        let n = ((s1 - s0) / max_width).ceil().max(1.0) as usize;
        let w = (s1 - s0) / n as f64;
        for i in 0..n {
            let p0 = s0 + i as f64 * w;
            let p1 = if i + 1 == n { s1 } else { s0 + (i + 1) as f64 * w };
            let grade_left = i == 0 && grading > 0;
            let grade_right = i + 1 == n && grading > 0;
            match (grade_left, grade_right) {
                (false, false) => panels.push((p0, p1)),
                _ => {
                    // Split the panel in half when both ends need grading.
                    let mid = 0.5 * (p0 + p1);
                    let (l_end, r_start) = if grade_left && grade_right { (mid, mid) } else if grade_left { (p1, p1) } else { (p0, p0) };
                    if grade_left {
                        let len = l_end - p0;
                        let mut lo = p0 + len * 0.5f64.powi(grading as i32);
                        panels.push((p0, lo));
                        for _ in 0..grading {
                            let hi = p0 + 2.0 * (lo - p0);
                            panels.push((lo, hi.min(l_end)));
                            lo = hi;
                        }
                    }
                    if grade_right {
                        let len = p1 - r_start;
                        let mut hi = p1 - len * 0.5f64.powi(grading as i32);
                        let mut right = vec![(hi, p1)];
                        for _ in 0..grading {
                            let lo = p1 - 2.0 * (p1 - hi);
                            right.push((lo.max(r_start), hi));
                            hi = lo;
                        }
                        right.reverse();
                        panels.extend(right);
                    }
                }
            }
        }
    }

    let rule = gl16();
    let mut out = Vec::with_capacity(panels.len() * rule.len());
    for (p0, p1) in panels {
        if p1 <= p0 {
            continue;
        }
        let c = 0.5 * (p0 + p1);
        let h = 0.5 * (p1 - p0);
        for &(t, w) in rule {
            out.push((c + h * t, w * h));
        }
    }
    out
}

/// Evaluates `Σ_i c_i exp(2πi x ξ_i)` for `x = x0 + m·dx`, `m = 0..n`.
pub fn exp_sum_uniform(nodes: &[f64], coeffs: &[C64], x0: f64, dx: f64, n: usize) -> Vec<C64> {
    const CHUNK: usize = 128;
    let chunks: Vec<Vec<C64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|ci| {
            let m0 = ci * CHUNK;
            let m1 = (m0 + CHUNK).min(n);
            let mut out = vec![ZERO; m1 - m0];
            let start = x0 + m0 as f64 * dx;
            for (&xi, &c) in nodes.iter().zip(coeffs) {
                if c == ZERO {
                    continue;
                }
                let mut z = C64::from_polar(1.0, 2.0 * PI * start * xi);
                let step = C64::from_polar(1.0, 2.0 * PI * dx * xi);
                for o in out.iter_mut() {
                    *o += c * z;
                    z *= step;
                }
            }
            out
        })
        .collect();
    chunks.concat()
}

/// Inverse Fourier transform `∫ S(ξ) e^{2πi(x,ξ)} dξ` of tensor-sampled
/// spectrum values onto a uniform grid. `rules[ax]` are the quadrature nodes
/// and weights along each axis; `values` holds `S` on the node tensor (last
/// axis fastest).
pub fn spectrum_to_grid(rules: &[Vec<(f64, f64)>], values: &[C64], grid: &Grid) -> Vec<C64> {
    let d = grid.dim();
    debug_assert_eq!(rules.len(), d);
    let h = grid.spacing();
    // shape[ax] = current extent along ax; contract from the last axis back.
    let mut shape: Vec<usize> = rules.iter().map(|r| r.len()).collect();
    let mut data = values.to_vec();
    for ax in (0..d).rev() {
        let outer: usize = shape[..ax].iter().product();
        let inner: usize = shape[ax + 1..].iter().product();
        let n_in = shape[ax];
        let n_out = grid.points[ax];
        let nodes: Vec<f64> = rules[ax].iter().map(|r| r.0).collect();
        let weights: Vec<f64> = rules[ax].iter().map(|r| r.1).collect();
        let rows: Vec<(usize, usize)> = (0..outer).flat_map(|o| (0..inner).map(move |i| (o, i))).collect();
        let transformed: Vec<Vec<C64>> = rows
            .par_iter()
            .map(|&(o, i)| {
                let coeffs: Vec<C64> = (0..n_in)
                    .map(|k| data[(o * n_in + k) * inner + i] * weights[k])
                    .collect();
                exp_sum_uniform(&nodes, &coeffs, grid.bounds.lo[ax], h[ax], n_out)
            })
            .collect();
        let mut next = vec![ZERO; outer * n_out * inner];
        for (r, &(o, i)) in rows.iter().enumerate() {
            for m in 0..n_out {
                next[(o * n_out + m) * inner + i] = transformed[r][m];
            }
        }
        data = next;
        shape[ax] = n_out;
    }
    data
}

/// All points of the node tensor, last axis fastest.
pub fn tensor_points(rules: &[Vec<(f64, f64)>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
    for rule in rules {
        let mut next = Vec::with_capacity(pts.len() * rule.len());
        for p in &pts {
            for &(t, _) in rule {
                let mut q = p.clone();
                q.push(t);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// Multi-indices `β` with `|β| = order` in dimension `d`, lexicographic.
pub fn multi_indices_of_order(d: usize, order: u32) -> Vec<Vec<u32>> {
    fn rec(d: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == d {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k);
            rec(d, remaining - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d == 0 {
        return out;
    }
    rec(d, order, &mut Vec::new(), &mut out);
    out
}

/// Integer lattice points of the cube `‖k‖_∞ ≤ radius`, lexicographic.
pub fn lattice_cube(d: usize, radius: i64) -> Vec<Vec<i64>> {
    lattice_box(&vec![-radius; d], &vec![radius; d])
}

pub fn lattice_box(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut pts: Vec<Vec<i64>> = vec![Vec::new()];
    for (&l, &h) in lo.iter().zip(hi) {
        let mut next = Vec::new();
        for p in &pts {
            for k in l..=h {
                let mut q = p.clone();
                q.push(k);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}
