//! Smoothness and approximation metrics: fractional differences, anisotropic
//! moduli of smoothness, best approximation by band-limited functions, the
//! fractional Laplacian and Besov-type partial norms.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{AxisFactor, SpectralSupport, Spectrum, TestFunction};
use crate::lattice::{is_diagonal, mat_vec, matrix_power, DilationMatrix};
use crate::numerics::{
    binomial_series, composite_rule, eta, grid_lp_norm, integrate_adaptive, integrate_box, integrate_to_infinity,
    spectrum_to_grid, tensor_points, AxisBox, Grid, Tolerance, C64, ZERO,
};

pub const DEFAULT_SERIES_CAP: usize = 64;
pub const DEFAULT_RADIUS_SAMPLES: usize = 10;

fn is_integer(s: f64) -> bool {
    (s - s.round()).abs() < 1e-12
}

/// Number of binomial terms used for `Δ_h^s`.
pub fn difference_terms(s: f64, cap: usize) -> usize {
    if is_integer(s) {
        s.round() as usize + 1
    } else {
        cap.max(1)
    }
}

/// `Σ_{ν ≥ n} |binom(s, ν)|`, estimated from the last retained term; zero
/// for integer `s`.
pub fn binomial_tail(s: f64, n: usize) -> f64 {
    if is_integer(s) && n as f64 > s {
        return 0.0;
    }
    let b = binomial_series(s, n + 1);
    let last = b[n].abs();
    last * (1.0 + (n as f64 + 1.0) / s)
}

/// A truncated difference value and a bound on the omitted series terms.
#[derive(Debug, Clone, Copy)]
pub struct Difference {
    pub value: C64,
    pub tail_bound: f64,
}

/// `Δ_h^s f(x) = Σ_ν (−1)^ν binom(s, ν) f(x + νh)`.
pub fn fractional_difference(f: &TestFunction, h: &[f64], s: f64, x: &[f64], cap: usize) -> Difference {
    let n = difference_terms(s, cap);
    let coeffs = binomial_series(s, n);
    let mut acc = ZERO;
    let mut sup: f64 = 0.0;
    let mut y = x.to_vec();
    for (nu, &b) in coeffs.iter().enumerate() {
        for ax in 0..x.len() {
            y[ax] = x[ax] + nu as f64 * h[ax];
        }
        let v = f.eval(&y);
        sup = sup.max(v.norm());
        let signed = if nu % 2 == 0 { b } else { -b };
        acc += v * signed;
    }
    Difference {
        value: acc,
        tail_bound: binomial_tail(s, n) * sup,
    }
}

/// Sampling plan for the supremum defining `Ω_s(f, A)_p`.
#[derive(Debug, Clone)]
pub struct ModulusSpec {
    pub order: f64,
    pub matrix: DMatrix<f64>,
    pub p: f64,
    pub direction_samples: usize,
    pub radius_samples: usize,
    pub series_cap: usize,
}

impl ModulusSpec {
    pub fn new(order: f64, matrix: DMatrix<f64>, p: f64) -> Self {
        let d = matrix.nrows();
        let direction_samples = match d {
            1 => 2,
            2 => 16,
            _ => 32,
        };
        ModulusSpec {
            order,
            matrix,
            p,
            direction_samples,
            radius_samples: DEFAULT_RADIUS_SAMPLES,
            series_cap: DEFAULT_SERIES_CAP,
        }
    }

    /// `A = t·I`.
    pub fn isotropic(order: f64, dim: usize, t: f64, p: f64) -> Self {
        Self::new(order, DMatrix::from_diagonal_element(dim, dim, t), p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.order > 0.0) {
            return Err(Error::InvalidParams("modulus order must be > 0".into()));
        }
        if !(self.p >= 1.0) {
            return Err(Error::InvalidParams("p must be in [1, inf]".into()));
        }
        if self.radius_samples == 0 || self.direction_samples == 0 {
            return Err(Error::InvalidParams("modulus needs at least one sample".into()));
        }
        Ok(())
    }

    /// The sampled steps `h = A(r u)`.
    pub fn steps(&self) -> Vec<Vec<f64>> {
        let d = self.matrix.nrows();
        let mut out = Vec::new();
        for u in direction_net(d, self.direction_samples) {
            for i in 1..=self.radius_samples {
                let r = 1.0 - 0.5f64.powi(i as i32);
                let v: Vec<f64> = u.iter().map(|c| c * r).collect();
                out.push(mat_vec(&self.matrix, &v));
            }
        }
        out
    }
}

/// Deterministic unit directions: `±1` in one dimension, a uniform angular
/// net in two, a Fibonacci net in three.
pub fn direction_net(d: usize, n: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
    }
}

/// A sampled lower estimate of `Ω_s(f, A)_p`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModulusEstimate {
    pub value: f64,
    /// Step at which the sampled maximum was attained.
    pub argmax: Vec<f64>,
    pub samples: usize,
    pub spacing: Vec<f64>,
    /// Bound on the contribution of truncated binomial terms.
    pub series_tail: f64,
}

/// `‖Δ_h^s f‖_p` on `grid`, extended so that the shifted copies of the box
/// are covered.
pub fn difference_norm(f: &TestFunction, h: &[f64], s: f64, p: f64, grid: &Grid, cap: usize) -> f64 {
    let n = difference_terms(s, cap);
    let span = (n - 1) as f64;
    let below: Vec<f64> = h.iter().map(|&v| span * v.max(0.0)).collect();
    let above: Vec<f64> = h.iter().map(|&v| span * (-v).max(0.0)).collect();
    let g = grid.extended(&below, &above);
    let vals = g.map(|x| fractional_difference(f, h, s, x, cap).value);
    grid_lp_norm(&vals, &g, p)
}

/// Sampled `sup_{|A^{-1}h| < 1} ‖Δ_h^s f‖_p`.
pub fn modulus(f: &TestFunction, spec: &ModulusSpec, grid: &Grid) -> Result<ModulusEstimate> {
    spec.validate()?;
    if spec.matrix.nrows() != f.dim() || grid.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: spec.matrix.nrows(),
        });
    }
    let steps = spec.steps();
    let norms: Vec<f64> = steps
        .par_iter()
        .map(|h| difference_norm(f, h, spec.order, spec.p, grid, spec.series_cap))
        .collect();
    let (mut best, mut arg) = (0.0, steps[0].clone());
    for (h, &v) in steps.iter().zip(&norms) {
        if v > best {
            best = v;
            arg = h.clone();
        }
    }
    let n = difference_terms(spec.order, spec.series_cap);
    let fnorm = if is_integer(spec.order) {
        0.0
    } else {
        grid_lp_norm(&grid.map(|x| f.eval(x)), grid, spec.p)
    };
    Ok(ModulusEstimate {
        value: best,
        argmax: arg,
        samples: steps.len(),
        spacing: grid.spacing(),
        series_tail: binomial_tail(spec.order, n) * fnorm,
    })
}

/// `ω_s(f, t)_p = sup_{|h| < t} ‖Δ_h^s f‖_p`.
pub fn omega(f: &TestFunction, s: f64, t: f64, p: f64, grid: &Grid) -> Result<ModulusEstimate> {
    modulus(f, &ModulusSpec::isotropic(s, f.dim(), t, p), grid)
}

// ---------------------------------------------------------------------------
// Best approximation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub enum BestApproxKind {
    /// `E_A(f)_2` by Parseval.
    Exact,
    /// `‖f − N_A f‖_p`, within a constant factor of `E_A(f)_p`.
    NearBestUpperBound,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct BestApprox {
    pub value: f64,
    /// `ln value`; finite even where `value` underflows.
    pub ln_value: f64,
    pub kind: BestApproxKind,
}

impl BestApprox {
    fn exact_from_ln(ln_value: f64) -> Self {
        BestApprox {
            value: ln_value.exp(),
            ln_value,
            kind: BestApproxKind::Exact,
        }
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// `E_A(f)_p`: exact for `p = 2`, a near-best upper bound otherwise.
pub fn best_approx(f: &TestFunction, a: &DMatrix<f64>, p: f64, grid: &Grid) -> Result<BestApprox> {
    if a.nrows() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: a.nrows(),
        });
    }
    if p == 2.0 {
        best_approx_l2(f, a)
    } else {
        near_best(f, a, p, grid)
    }
}

const TAIL_REL_TOL: f64 = 1e-11;

/// `ln ∫_{|t| ≥ c} |g(t)|² dt` for one separable factor.
fn ln_factor_tail(factor: &AxisFactor, c: f64) -> Result<f64> {
    let l2 = |t: f64| 2.0 * (factor.log_abs)(t);
    let mut side = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let probe = [0.0, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0];
        let reference = probe.iter().map(|&w| l2(sign * (c + w))).fold(f64::NEG_INFINITY, f64::max);
        if reference == f64::NEG_INFINITY {
            side.push(f64::NEG_INFINITY);
            continue;
        }
        let integrand = |t: f64| {
            let v = l2(sign * t) - reference;
            Ok(C64::new(if v == f64::NEG_INFINITY { 0.0 } else { v.exp() }, 0.0))
        };
        let width = 64.0 * c.max(1.0);
        let near = integrate_adaptive(integrand, c, c + width, &[], Tolerance::rel(TAIL_REL_TOL), "spectral tail")?;
        let far = integrate_to_infinity(
            integrand,
            c + width,
            Tolerance::abs(TAIL_REL_TOL * near.value.re.abs().max(f64::MIN_POSITIVE)),
            "spectral far tail",
        )?;
        let total = near.value.re + far.value.re;
        side.push(if total > 0.0 { reference + total.ln() } else { f64::NEG_INFINITY });
    }
    Ok(log_sum_exp(&side))
}

fn factor_interior(factor: &AxisFactor, c: f64) -> Result<f64> {
    Ok(integrate_adaptive(
        |t| Ok(C64::new((factor.eval)(t).norm_sqr(), 0.0)),
        -c,
        c,
        &[0.0],
        Tolerance::rel(TAIL_REL_TOL),
        "spectral interior",
    )?
    .value
    .re)
}

fn best_approx_l2(f: &TestFunction, a: &DMatrix<f64>) -> Result<BestApprox> {
    let spec = f
        .spectrum()
        .ok_or_else(|| Error::UnsupportedInput(format!("{} has no Fourier profile", f.name())))?;
    let d = f.dim();
    // separable spectrum and axis-aligned band: product structure
    if let (Some(factors), true) = (&spec.factors, is_diagonal(a)) {
        let half: Vec<f64> = (0..d).map(|ax| a[(ax, ax)].abs() / 2.0).collect();
        let mut ln_tail = Vec::with_capacity(d);
        let mut ln_inner = Vec::with_capacity(d);
        for ax in 0..d {
            ln_tail.push(ln_factor_tail(&factors[ax], half[ax])?);
            ln_inner.push(factor_interior(&factors[ax], half[ax])?.ln());
        }
        let mut terms = Vec::new();
        for mask in 1usize..(1 << d) {
            let mut t = 0.0;
            for ax in 0..d {
                t += if mask >> ax & 1 == 1 { ln_tail[ax] } else { ln_inner[ax] };
            }
            terms.push(t);
        }
        return Ok(BestApprox::exact_from_ln(0.5 * log_sum_exp(&terms)));
    }
    let bounds = spec.support.bounding_box().ok_or_else(|| {
        Error::UnsupportedInput("exact best approximation needs a separable or bounded spectrum".into())
    })?;
    let tol = Tolerance {
        abs: 1e-14,
        rel: 1e-11,
    };
    let total = integrate_box(&|xi: &[f64]| Ok(C64::new(spec.eval(xi).norm_sqr(), 0.0)), bounds, &spec.breaks, tol, "spectral mass")?
        .value
        .re;
    let at = a.transpose();
    let det = a.determinant().abs();
    let inside = integrate_box(
        &|u: &[f64]| Ok(C64::new(spec.eval(&mat_vec(&at, u)).norm_sqr(), 0.0)),
        &AxisBox::cube(d, 0.5),
        &vec![Vec::new(); d],
        tol,
        "band mass",
    )?
    .value
    .re
        * det;
    let outside = (total - inside).max(0.0);
    Ok(BestApprox::exact_from_ln(if outside > 0.0 { 0.5 * outside.ln() } else { f64::NEG_INFINITY }))
}

/// `‖f − F^{-1}(η(A^{*-1}·) f̂)‖_p` on the grid.
fn near_best(f: &TestFunction, a: &DMatrix<f64>, p: f64, grid: &Grid) -> Result<BestApprox> {
    let spec = f
        .spectrum()
        .ok_or_else(|| Error::UnsupportedInput(format!("{} has no Fourier profile", f.name())))?;
    let d = f.dim();
    let at = a.transpose();
    let at_inv = at.clone().try_inverse().ok_or(Error::Singular)?;
    let window = AxisBox::cube(d, 1.0).linear_image(&at);
    let xmax = grid.bounds.max_abs().iter().fold(1.0f64, |m, &v| m.max(v));
    let rules: Vec<Vec<(f64, f64)>> = (0..d)
        .map(|ax| {
            let width = window.hi[ax] - window.lo[ax];
            let mut breaks = if is_diagonal(a) {
                let s = at[(ax, ax)].abs();
                vec![-s, -s / 2.0, s / 2.0, s]
            } else {
                Vec::new()
            };
            breaks.extend(spec.breaks.get(ax).cloned().unwrap_or_default());
            composite_rule(window.lo[ax], window.hi[ax], &breaks, (0.5 / xmax).min(width / 16.0), 0)
        })
        .collect();
    let nodes = tensor_points(&rules);
    let samples: Vec<C64> = nodes
        .par_iter()
        .map(|xi| {
            let w = eta(&mat_vec(&at_inv, xi));
            if w == 0.0 {
                ZERO
            } else {
                spec.eval(xi) * w
            }
        })
        .collect();
    let approx = spectrum_to_grid(&rules, &samples, grid);
    let diff: Vec<C64> = (0..grid.len())
        .into_par_iter()
        .map(|i| f.eval(&grid.point(i)) - approx[i])
        .collect();
    let value = grid_lp_norm(&diff, grid, p);
    Ok(BestApprox {
        value,
        ln_value: value.ln(),
        kind: BestApproxKind::NearBestUpperBound,
    })
}

// ---------------------------------------------------------------------------
// Fractional Laplacian and spectral norms
// ---------------------------------------------------------------------------

/// `(−Δ)^{s/2} f = F^{-1}(|ξ|^s f̂)` for compactly supported `f̂`.
pub fn fractional_laplacian(f: &TestFunction, s: f64) -> Result<TestFunction> {
    if !(s > 0.0) {
        return Err(Error::InvalidParams("fractional order must be > 0".into()));
    }
    let spec = f
        .spectrum()
        .filter(|sp| sp.is_compact())
        .ok_or_else(|| Error::UnsupportedInput(format!("{} needs a compactly supported spectrum", f.name())))?
        .clone();
    let support = spec.support.bounding_box().cloned().expect("compact support");
    let d = f.dim();
    let mut breaks = spec.breaks.clone();
    breaks.resize(d, Vec::new());
    for b in breaks.iter_mut() {
        b.push(0.0);
    }
    let inner = spec.clone();
    let profile: Arc<dyn Fn(&[f64]) -> C64 + Send + Sync> = Arc::new(move |xi: &[f64]| {
        let r = xi.iter().map(|t| t * t).sum::<f64>().sqrt();
        inner.eval(xi) * r.powf(s)
    });
    let prof2 = profile.clone();
    let sup2 = support.clone();
    let br2 = breaks.clone();
    let spatial = Arc::new(move |x: &[f64]| {
        let xs = x.to_vec();
        integrate_box(
            &|xi: &[f64]| {
                let phase = 2.0 * PI * xs.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
                Ok(prof2(xi) * C64::from_polar(1.0, phase))
            },
            &sup2,
            &br2,
            Tolerance::abs(1e-10),
            "fractional laplacian",
        )
        .map(|q| q.value)
        .unwrap_or(C64::new(f64::NAN, f64::NAN))
    });
    Ok(TestFunction::new(format!("(-Δ)^({s}/2) {}", f.name()), d, spatial)
        .with_spectrum(Spectrum::new(profile, SpectralSupport::Compact(support), breaks, None))
        .with_smoothness(f.smoothness().to_string()))
}

/// `‖f‖_2 = ‖f̂‖_2` by quadrature over the spectral support.
pub fn spectral_l2_norm(f: &TestFunction) -> Result<f64> {
    let spec = f
        .spectrum()
        .ok_or_else(|| Error::UnsupportedInput(format!("{} has no Fourier profile", f.name())))?;
    let bounds = spec
        .support
        .bounding_box()
        .ok_or_else(|| Error::UnsupportedInput("spectral norm needs bounded support".into()))?;
    let q = integrate_box(
        &|xi: &[f64]| Ok(C64::new(spec.eval(xi).norm_sqr(), 0.0)),
        bounds,
        &spec.breaks,
        Tolerance {
            abs: 1e-14,
            rel: 1e-11,
        },
        "spectral norm",
    )?;
    Ok(q.value.re.sqrt())
}

// ---------------------------------------------------------------------------
// Besov-type partial norms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BesovPartial {
    pub norm_p: f64,
    /// `m^{ν/p} α(M^ν) E_{M^ν}(f)_p` for `ν = 1..=ν_max`.
    pub terms: Vec<f64>,
    pub value: f64,
    pub kind: BestApproxKind,
}

/// `‖f‖_p + Σ_{ν=1}^{ν_max} |det M|^{ν/p} α(M^ν) E_{M^ν}(f)_p`.
pub fn besov_partial_norm<A>(
    f: &TestFunction,
    m: &DilationMatrix,
    alpha: A,
    p: f64,
    nu_max: usize,
    grid: &Grid,
) -> Result<BesovPartial>
where
    A: Fn(&DilationMatrix) -> Result<f64>,
{
    if nu_max == 0 {
        return Err(Error::InvalidParams("nu_max must be >= 1".into()));
    }
    let norm_p = grid_lp_norm(&grid.map(|x| f.eval(x)), grid, p);
    let mut terms = Vec::with_capacity(nu_max);
    let mut kind = BestApproxKind::Exact;
    for nu in 1..=nu_max {
        let a = matrix_power(m.entries(), nu as u32);
        let e = best_approx(f, &a, p, grid)?;
        kind = e.kind;
        let al = alpha(&DilationMatrix::from_matrix(a)?)?;
        let ln_term = nu as f64 / p.max(1.0) * m.det_abs().ln() * if p.is_infinite() { 0.0 } else { 1.0 } + al.ln() + e.ln_value;
        terms.push(ln_term.exp());
    }
    let value = norm_p + terms.iter().sum::<f64>();
    Ok(BesovPartial {
        norm_p,
        terms,
        value,
        kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sinc;

    fn line_grid(half: f64, n: usize) -> Grid {
        Grid::new(AxisBox::cube(1, half), n).unwrap()
    }

    #[test]
    fn first_difference_two_terms() {
        let f = TestFunction::square();
        let d = fractional_difference(&f, &[0.5], 1.0, &[1.0], 64);
        assert!((d.value.re - (1.0 - 2.25)).abs() < 1e-15);
        assert_eq!(d.tail_bound, 0.0);
        let c = TestFunction::constant(1, 3.0);
        assert_eq!(fractional_difference(&c, &[0.7], 1.0, &[0.2], 64).value.re, 0.0);
    }

    #[test]
    fn second_difference_of_square() {
        let f = TestFunction::square();
        let d = fractional_difference(&f, &[1.0], 2.0, &[0.0], 64);
        // x² − 2(x+1)² + (x+2)² at 0
        assert!((d.value.re - 2.0).abs() < 1e-15);
    }

    #[test]
    fn fractional_difference_reports_tail() {
        let f = TestFunction::gaussian(1);
        let d = fractional_difference(&f, &[0.1], 1.5, &[0.0], 64);
        assert!(d.tail_bound > 0.0 && d.tail_bound < 1e-2);
    }

    #[test]
    fn modulus_of_zero() {
        let z = TestFunction::zero(1);
        let m = omega(&z, 2.0, 0.5, 2.0, &line_grid(4.0, 201)).unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn modulus_translation_invariant() {
        let f = TestFunction::gaussian(1);
        let g = f.translated(&[0.37]).unwrap();
        let grid = line_grid(7.0, 1401);
        let a = omega(&f, 2.0, 0.25, 2.0, &grid).unwrap().value;
        let b = omega(&g, 2.0, 0.25, 2.0, &grid).unwrap().value;
        assert!((a - b).abs() < 1e-6 * a);
    }

    /// `‖Δ_h² e^{-π·²}‖_2² = ∫ 16 sin⁴(πhξ) e^{-2πξ²} dξ`.
    fn parseval_second_difference(h: f64) -> f64 {
        integrate_adaptive(
            |xi| Ok(C64::new(16.0 * (PI * h * xi).sin().powi(4) * (-2.0 * PI * xi * xi).exp(), 0.0)),
            -8.0,
            8.0,
            &[0.0],
            Tolerance::rel(1e-13),
            "oracle",
        )
        .unwrap()
        .value
        .re
        .sqrt()
    }

    #[test]
    fn gaussian_modulus_rate() {
        let f = TestFunction::gaussian(1);
        let grid = line_grid(6.0, 4096);
        let mut vals = Vec::new();
        for j in 2..=6 {
            let t = 0.5f64.powi(j);
            let m = omega(&f, 2.0, t, 2.0, &grid).unwrap();
            let oracle = parseval_second_difference(t);
            assert!((m.value - oracle).abs() < 0.01 * oracle, "j={j}: {} vs {oracle}", m.value);
            vals.push(m.value);
        }
        for w in vals.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((slope - 2.0).abs() < 0.15);
        }
    }

    #[test]
    fn modulus_bounded_by_norm() {
        let grid = line_grid(8.0, 1601);
        for f in [TestFunction::gaussian(1), TestFunction::hat(1)] {
            let norm = grid_lp_norm(&grid.map(|x| f.eval(x)), &grid, 2.0);
            for s in [1.0, 2.0, 3.0] {
                let m = omega(&f, s, 1.0, 2.0, &grid).unwrap();
                assert!(m.value <= 2f64.powf(s) * norm * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn modulus_monotone_in_t() {
        let f = TestFunction::hat(1);
        let grid = line_grid(4.0, 801);
        let v: Vec<f64> = [0.25, 0.5, 1.0].iter().map(|&t| omega(&f, 2.0, t, 2.0, &grid).unwrap().value).collect();
        assert!(v[0] <= v[1] && v[1] <= v[2]);
    }

    #[test]
    fn omega_dilation_inequality() {
        let f = TestFunction::gaussian(1);
        let grid = line_grid(6.0, 1201);
        let base = omega(&f, 2.0, 1.0, 2.0, &grid).unwrap().value;
        for lambda in [0.5, 2.0] {
            let v = omega(&f, 2.0, lambda, 2.0, &grid).unwrap().value;
            assert!(v <= (1.0 + lambda).powi(2) * base);
        }
    }

    #[test]
    fn two_dimensional_anisotropic_modulus() {
        let f = TestFunction::gaussian(2);
        let grid = Grid::new(AxisBox::cube(2, 4.0), 81).unwrap();
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.25, 0.125]));
        let m = modulus(&f, &ModulusSpec::new(1.0, a, 2.0), &grid).unwrap();
        assert!(m.value > 0.0);
        assert_eq!(m.samples, 16 * DEFAULT_RADIUS_SAMPLES);
        // sampled sup is attained along the long axis
        assert!(m.argmax[0].abs() > m.argmax[1].abs());
    }

    /// `ln ∫_{|ξ|>c} e^{-2πξ²} dξ = ln(erfc(√(2π) c) / √2)`, with the
    /// asymptotic series for large arguments.
    fn ln_gaussian_tail_oracle(c: f64) -> f64 {
        let z = (2.0 * PI).sqrt() * c;
        let ln_erfc = if z < 5.0 {
            statrs::function::erf::erfc(z).ln()
        } else {
            let mut series = 1.0;
            let mut term = 1.0;
            for n in 1..12 {
                term *= -((2 * n - 1) as f64) / (2.0 * z * z);
                series += term;
            }
            -z * z - z.ln() - 0.5 * PI.ln() + series.ln()
        };
        ln_erfc - 0.5 * 2f64.ln()
    }

    #[test]
    fn gaussian_best_approx_matches_erfc() {
        let f = TestFunction::gaussian(1);
        let grid = line_grid(6.0, 101);
        for nu in 1..=5 {
            let a = DMatrix::from_element(1, 1, 2f64.powi(nu));
            let e = best_approx(&f, &a, 2.0, &grid).unwrap();
            assert_eq!(e.kind, BestApproxKind::Exact);
            let oracle = 0.5 * ln_gaussian_tail_oracle(2f64.powi(nu - 1));
            assert!((e.ln_value - oracle).abs() < 1e-6, "nu={nu}: {} vs {oracle}", e.ln_value);
        }
    }

    #[test]
    fn band_limited_has_zero_best_approx() {
        let f = TestFunction::band_bump(1, 0.4).unwrap();
        let grid = line_grid(40.0, 2001);
        let a = DMatrix::from_element(1, 1, 1.0);
        assert_eq!(best_approx(&f, &a, 2.0, &grid).unwrap().value, 0.0);
        for p in [1.0, f64::INFINITY] {
            let e = best_approx(&f, &a, p, &grid).unwrap();
            assert_eq!(e.kind, BestApproxKind::NearBestUpperBound);
            assert!(e.value < 1e-9, "p={p}: {}", e.value);
        }
    }

    #[test]
    fn best_approx_monotone_in_band() {
        let grid = line_grid(10.0, 2001);
        for f in [TestFunction::gaussian(1), TestFunction::hat(1)] {
            for p in [1.0, 2.0, f64::INFINITY] {
                let a1 = DMatrix::from_element(1, 1, 1.0);
                let a2 = DMatrix::from_element(1, 1, 2.0);
                let e1 = best_approx(&f, &a1, p, &grid).unwrap().value;
                let e2 = best_approx(&f, &a2, p, &grid).unwrap().value;
                assert!(e2 <= e1 * (1.0 + 1e-9), "{} p={p}", f.name());
            }
        }
    }

    #[test]
    fn hat_best_approx_l2_against_direct_tail() {
        // ∫_{|ξ|>1} sinc⁴ by direct quadrature over many periods
        let f = TestFunction::hat(1);
        let e = best_approx(&f, &DMatrix::from_element(1, 1, 2.0), 2.0, &line_grid(2.0, 11)).unwrap();
        let breaks: Vec<f64> = (1..4000).map(|k| k as f64).collect();
        let q = integrate_adaptive(|t| Ok(C64::new(sinc(t).powi(4), 0.0)), 1.0, 4000.0, &breaks, Tolerance::abs(1e-13), "t")
            .unwrap();
        let tail_rest = 2.0 / (3.0 * PI.powi(4) * 4000f64.powi(3));
        let oracle = (2.0 * (q.value.re + tail_rest / 2.0)).sqrt();
        assert!((e.value - oracle).abs() < 1e-8 * oracle);
    }

    #[test]
    fn non_separable_path_agrees() {
        // rotate a 2-D Gaussian band through a non-diagonal matrix: E is
        // rotation invariant for the radial Gaussian
        let f = TestFunction::gaussian(2);
        let grid = Grid::new(AxisBox::cube(2, 1.0), 3).unwrap();
        let c = (0.3f64).cos();
        let s = (0.3f64).sin();
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]) * 1.5;
        let diag = DMatrix::from_diagonal_element(2, 2, 1.5);
        let a = best_approx(&f, &rot, 2.0, &grid).unwrap().value;
        let b = best_approx(&f, &diag, 2.0, &grid).unwrap().value;
        assert!((a - b).abs() < 1e-7 * b, "{a} vs {b}");
    }

    #[test]
    fn laplacian_order_two_is_second_derivative() {
        let f = TestFunction::band_bump(1, 0.5).unwrap();
        let l = fractional_laplacian(&f, 2.0).unwrap();
        let h = 1e-3;
        for x in [0.0, 0.8] {
            let fd = (f.eval(&[x + h]) - 2.0 * f.eval(&[x]) + f.eval(&[x - h])).re / (h * h);
            assert!((l.eval(&[x]).re + fd / (4.0 * PI * PI)).abs() < 1e-6);
        }
    }

    #[test]
    fn laplacian_lower_bound_on_annulus() {
        // spectrum supported at distance ≥ ρ from the origin
        let rho: f64 = 0.3;
        let base = TestFunction::band_bump(1, 0.1).unwrap();
        let f = base.translated(&[0.0]).unwrap();
        let modulated = TestFunction::new(
            "modulated",
            1,
            Arc::new({
                let f = f.clone();
                move |x: &[f64]| f.eval(x) * C64::from_polar(1.0, 2.0 * PI * 0.4 * x[0])
            }),
        )
        .with_spectrum(Spectrum::new(
            Arc::new({
                let f = f.clone();
                move |xi: &[f64]| f.spectrum().unwrap().eval(&[xi[0] - 0.4])
            }),
            SpectralSupport::Compact(AxisBox::new(vec![0.3], vec![0.5])),
            vec![Vec::new()],
            None,
        ));
        for s in [0.5, 1.0, 2.0] {
            let l = fractional_laplacian(&modulated, s).unwrap();
            let a = spectral_l2_norm(&l).unwrap();
            let b = spectral_l2_norm(&modulated).unwrap();
            assert!(a >= rho.powf(s) * b);
        }
    }

    #[test]
    fn laplacian_small_order_near_identity() {
        let f = TestFunction::band_bump(1, 0.4).unwrap();
        let l = fractional_laplacian(&f, 1e-6).unwrap();
        for i in 0..10 {
            let x = -3.0 + 0.6 * i as f64;
            assert!((l.eval(&[x]) - f.eval(&[x])).norm() < 1e-4);
        }
    }

    #[test]
    fn laplacian_requires_compact_spectrum() {
        assert!(matches!(
            fractional_laplacian(&TestFunction::gaussian(1), 1.0),
            Err(Error::UnsupportedInput(_))
        ));
    }

    #[test]
    fn besov_terms() {
        let grid = line_grid(6.0, 1201);
        let m = DilationMatrix::scalar(1, 2.0).unwrap();
        let f = TestFunction::gaussian(1);
        let b = besov_partial_norm(&f, &m, |_| Ok(1.0), 2.0, 8, &grid).unwrap();
        assert_eq!(b.terms.len(), 8);
        for (i, t) in b.terms.iter().enumerate() {
            let nu = i as i32 + 1;
            let oracle = (0.5 * nu as f64 * 2f64.ln() + 0.5 * ln_gaussian_tail_oracle(2f64.powi(nu - 1))).exp();
            assert!((t - oracle).abs() <= 1e-6 * oracle.max(1e-300));
        }
        for w in b.terms.windows(2).take(3) {
            assert!(w[1] < w[0] * 0.1);
        }
        let shorter = besov_partial_norm(&f, &m, |_| Ok(1.0), 2.0, 4, &grid).unwrap();
        assert!(b.value >= shorter.value);

        let bl = TestFunction::band_bump(1, 0.4).unwrap();
        let wide = line_grid(40.0, 2001);
        let z = besov_partial_norm(&bl, &m, |_| Ok(1.0), 2.0, 3, &wide).unwrap();
        assert!(z.terms.iter().all(|&t| t == 0.0));
        assert_eq!(z.value, z.norm_p);
    }
}
