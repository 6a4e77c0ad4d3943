//! Evaluation of `Q_j(f, φ, φ̃)`.
//!
//! Two routes are provided. The spatial route forms finite partial sums of
//! `Σ_k ⟨f, φ̃_{jk}⟩ φ_{jk}`. The spectral route uses
//!
//! `F(Q_j f)(ξ) = φ̂(η) Σ_k f̂(ξ + M^{*j}k) conj φ̂̃(η + k)`, `η = M^{*-j}ξ`,
//!
//! which is a finite sum whenever `f̂` has bounded support, and then inverts
//! the Fourier transform by composite Gauss quadrature onto a grid.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analyzers::AnalysisFunctional;
use crate::error::{Error, Result};
use crate::function::{SpectralSupport, Spectrum, TestFunction};
use crate::generators::Generator;
use crate::lattice::{mat_vec, mat_vec_int, DilationMatrix};
use crate::numerics::{
    composite_rule, grid_lp_norm, integrate_box, lattice_box, lattice_cube, spectrum_to_grid, tensor_points, AxisBox,
    Grid, Tolerance, C64, ZERO,
};

#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pub generator: Generator,
    pub analyzer: AnalysisFunctional,
    pub dilation: DilationMatrix,
    pub level: i32,
}

/// A partial sum together with a bound on the omitted terms (`None` when the
/// generator declares no usable decay).
#[derive(Debug, Clone, Copy)]
pub struct PartialSum {
    pub value: C64,
    pub tail_bound: Option<f64>,
}

/// Coefficients on an integer box, stored densely (last axis fastest).
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub values: Vec<C64>,
}

impl CoefficientTable {
    pub fn get(&self, k: &[i64]) -> Option<C64> {
        let mut idx = 0usize;
        for ax in 0..self.lo.len() {
            if k[ax] < self.lo[ax] || k[ax] > self.hi[ax] {
                return None;
            }
            let n = (self.hi[ax] - self.lo[ax] + 1) as usize;
            idx = idx * n + (k[ax] - self.lo[ax]) as usize;
        }
        self.values.get(idx).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Grid values of `Q_j f` from the spectral route, with the quadrature size.
#[derive(Debug, Clone)]
pub struct SpectralEvaluation {
    pub values: Vec<C64>,
    pub nodes_per_axis: Vec<usize>,
}

/// Grid values of `Q_j f` from the spatial route.
#[derive(Debug, Clone)]
pub struct SpatialEvaluation {
    pub values: Vec<C64>,
    /// Half-width of the index window summed around `−M^j x`.
    pub window: i64,
    pub coefficients: usize,
}

/// A grid norm of a difference, with the spacing it was computed at.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridNorm {
    pub value: f64,
    pub spacing: Vec<f64>,
}

impl OperatorSpec {
    pub fn new(generator: Generator, analyzer: AnalysisFunctional, dilation: DilationMatrix, level: i32) -> Result<Self> {
        let d = dilation.dim();
        if generator.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: generator.dim(),
            });
        }
        if analyzer.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: analyzer.dim(),
            });
        }
        if level < 0 {
            return Err(Error::InvalidParams("level j must be non-negative".into()));
        }
        Ok(OperatorSpec {
            generator,
            analyzer,
            dilation,
            level,
        })
    }

    pub fn with_level(&self, level: i32) -> Result<Self> {
        OperatorSpec::new(self.generator.clone(), self.analyzer.clone(), self.dilation.clone(), level)
    }

    pub fn dim(&self) -> usize {
        self.dilation.dim()
    }

    fn check_function(&self, f: &TestFunction) -> Result<()> {
        if f.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: f.dim(),
            });
        }
        Ok(())
    }

    // -- coefficients ------------------------------------------------------

    /// `⟨f, φ̃_{jk}⟩` for `‖k‖_∞ ≤ radius`, lexicographic in `k`.
    pub fn coefficients(&self, f: &TestFunction, radius: i64) -> Result<Vec<(Vec<i64>, C64)>> {
        self.check_function(f)?;
        if radius < 0 {
            return Err(Error::InvalidParams("radius must be >= 0".into()));
        }
        let ks = lattice_cube(self.dim(), radius);
        let vals: Result<Vec<C64>> = ks
            .par_iter()
            .map(|k| self.analyzer.analyze(f, &self.dilation, self.level, k))
            .collect();
        Ok(ks.into_iter().zip(vals?).collect())
    }

    pub fn coefficient_table(&self, f: &TestFunction, lo: &[i64], hi: &[i64]) -> Result<CoefficientTable> {
        self.check_function(f)?;
        let ks = lattice_box(lo, hi);
        let values: Result<Vec<C64>> = ks
            .par_iter()
            .map(|k| self.analyzer.analyze(f, &self.dilation, self.level, k))
            .collect();
        Ok(CoefficientTable {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            values: values?,
        })
    }

    // -- spatial route -------------------------------------------------------

    /// `Σ_{‖k‖_∞ ≤ R} ⟨f, φ̃_{jk}⟩ φ_{jk}(x)` with a crude tail bound.
    pub fn evaluate_spatial(&self, f: &TestFunction, x: &[f64], radius: i64) -> Result<PartialSum> {
        let coeffs = self.coefficients(f, radius)?;
        let mj = self.dilation.power(self.level);
        let y = mat_vec(&mj, x);
        let amp = self.dilation.det_abs().powf(self.level as f64 / 2.0);
        let terms: Result<Vec<C64>> = coeffs
            .par_iter()
            .map(|(k, c)| {
                if *c == ZERO {
                    return Ok(ZERO);
                }
                let z: Vec<f64> = y.iter().zip(k).map(|(a, &b)| a + b as f64).collect();
                Ok(*c * self.generator.eval_spatial(&z)? * amp)
            })
            .collect();
        let value = crate::numerics::pairwise_sum_c(&terms?);
        let shell = coeffs
            .iter()
            .filter(|(k, _)| k.iter().any(|v| v.abs() == radius))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        Ok(PartialSum {
            value,
            tail_bound: self.tail_bound(&y, radius, shell),
        })
    }

    /// Bound on `Σ_{‖k‖_∞ > R} |c_k| m^{j/2} |φ(y + k)|`, taking `coeff` as a
    /// bound on the omitted coefficients.
    fn tail_bound(&self, y: &[f64], radius: i64, coeff: f64) -> Option<f64> {
        let amp = self.dilation.det_abs().powf(self.level as f64 / 2.0);
        if let Some(sup) = self.generator.spatial_support() {
            let outside = y
                .iter()
                .enumerate()
                .all(|(ax, &t)| t.abs() + sup.hi[ax] < radius as f64 + 1.0);
            return if outside { Some(0.0) } else { None };
        }
        let env = self.generator.decay_envelope()?;
        if env.order < 2 {
            return None;
        }
        let n = env.order as f64;
        let c = env.scale * (env.width / std::f64::consts::PI).powf(n);
        // per axis: sum over |k| > R of env(t + k), and over all k
        let mut inside = Vec::with_capacity(y.len());
        let mut outside = Vec::with_capacity(y.len());
        for &t in y {
            let gap = radius as f64 - t.abs();
            if gap <= 1.0 {
                return None;
            }
            let tail = 2.0 * c * (gap - 1.0).powf(1.0 - n) / (n - 1.0);
            let full: f64 = (-radius..=radius).map(|k| env.axis(t + k as f64)).sum::<f64>() + tail;
            inside.push(full);
            outside.push(tail);
        }
        let mut total = 0.0;
        for ax in 0..y.len() {
            let mut term = outside[ax];
            for (other, full) in inside.iter().enumerate() {
                if other != ax {
                    term *= full;
                }
            }
            total += term;
        }
        Some(coeff * amp * total)
    }

    /// The same operator written as `Σ_k c'_k m^{j/2} φ(M^j x − k)` with
    /// `c'_k = ⟨f, φ̃_{j,−k}⟩` computed directly in the original variable.
    pub fn evaluate_relabeled(&self, f: &TestFunction, x: &[f64], radius: i64) -> Result<C64> {
        self.check_function(f)?;
        let d = self.dim();
        let mj = self.dilation.power(self.level);
        let y = mat_vec(&mj, x);
        let amp = self.dilation.det_abs().powf(self.level as f64 / 2.0);
        let ks = lattice_cube(d, radius);
        let terms: Result<Vec<C64>> = ks
            .par_iter()
            .map(|k| {
                let c = self.relabeled_coefficient(f, k)?;
                if c == ZERO {
                    return Ok(ZERO);
                }
                let z: Vec<f64> = y.iter().zip(k).map(|(a, &b)| a - b as f64).collect();
                Ok(c * self.generator.eval_spatial(&z)? * amp)
            })
            .collect();
        Ok(crate::numerics::pairwise_sum_c(&terms?))
    }

    /// `⟨f, φ̃_{j,−k}⟩` via sampling at `M^{-j}k` (point kinds) or
    /// integration over `M^{-j}(k + T^d)` (averaging, diagonal `M`).
    fn relabeled_coefficient(&self, f: &TestFunction, k: &[i64]) -> Result<C64> {
        let m = &self.dilation;
        let j = self.level;
        let inv = m.power(-j);
        let node = mat_vec_int(&inv, k);
        let down = m.det_abs().powf(-(j as f64) / 2.0);
        match &self.analyzer {
            AnalysisFunctional::Dirac { .. } => Ok(f.eval(&node) * down),
            AnalysisFunctional::BoxAverage { .. } if m.is_diagonal() => {
                let scale: Vec<f64> = (0..m.dim()).map(|ax| inv[(ax, ax)]).collect();
                let lo: Vec<f64> = (0..m.dim()).map(|ax| scale[ax] * (k[ax] as f64 - 0.5)).collect();
                let hi: Vec<f64> = (0..m.dim()).map(|ax| scale[ax] * (k[ax] as f64 + 0.5)).collect();
                let (lo, hi): (Vec<f64>, Vec<f64>) =
                    lo.iter().zip(&hi).map(|(&a, &b)| if a <= b { (a, b) } else { (b, a) }).unzip();
                let volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
                let q = integrate_box(
                    &|t: &[f64]| Ok(f.eval(t)),
                    &AxisBox::new(lo, hi),
                    f.spatial_breaks(),
                    Tolerance::abs(1e-14 * volume),
                    "relabeled average",
                )?;
                Ok(q.value * m.det_abs().powf(j as f64 / 2.0))
            }
            other => {
                let neg: Vec<i64> = k.iter().map(|v| -v).collect();
                other.analyze(f, m, j, &neg)
            }
        }
    }

    /// `Q_j f` on every grid point, summing `‖k + M^j x‖_∞ ≤ window` from a
    /// precomputed coefficient table.
    pub fn evaluate_grid_spatial(&self, f: &TestFunction, grid: &Grid, window: i64) -> Result<SpatialEvaluation> {
        self.check_function(f)?;
        let d = self.dim();
        let mj = self.dilation.power(self.level);
        let image = grid.bounds.linear_image(&mj);
        let lo: Vec<i64> = (0..d).map(|ax| (-image.hi[ax]).floor() as i64 - window).collect();
        let hi: Vec<i64> = (0..d).map(|ax| (-image.lo[ax]).ceil() as i64 + window).collect();
        let table = self.coefficient_table(f, &lo, &hi)?;
        let amp = self.dilation.det_abs().powf(self.level as f64 / 2.0);
        let values: Result<Vec<C64>> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let x = grid.point(i);
                let y = mat_vec(&mj, &x);
                let center: Vec<i64> = y.iter().map(|t| (-t).round() as i64).collect();
                let wlo: Vec<i64> = center.iter().map(|c| c - window).collect();
                let whi: Vec<i64> = center.iter().map(|c| c + window).collect();
                let mut acc = Vec::new();
                for k in lattice_box(&wlo, &whi) {
                    let c = table.get(&k).unwrap_or(ZERO);
                    if c == ZERO {
                        continue;
                    }
                    let z: Vec<f64> = y.iter().zip(&k).map(|(a, &b)| a + b as f64).collect();
                    acc.push(c * self.generator.eval_spatial(&z)?);
                }
                Ok(crate::numerics::pairwise_sum_c(&acc) * amp)
            })
            .collect();
        Ok(SpatialEvaluation {
            values: values?,
            window,
            coefficients: table.len(),
        })
    }

    /// Smallest index window that captures the full support of a compactly
    /// supported generator.
    pub fn exact_window(&self) -> Option<i64> {
        self.generator
            .spatial_support()
            .map(|b| b.max_abs().iter().fold(0.0f64, |a, &v| a.max(v)).ceil() as i64 + 1)
    }

    // -- spectral route -------------------------------------------------------

    fn spectral_parts(&self, f: &TestFunction) -> Result<(AxisBox, Spectrum)> {
        self.check_function(f)?;
        let phi_support = self.generator.fourier_support().ok_or_else(|| {
            Error::UnsupportedInput(format!("generator {} is not band-limited", self.generator.name()))
        })?;
        let spec = f
            .spectrum()
            .filter(|s| s.support.bounding_box().is_some())
            .ok_or_else(|| Error::UnsupportedInput(format!("{} has no bounded Fourier support", f.name())))?;
        Ok((phi_support, spec.clone()))
    }

    /// `F(Q_j f)(ξ)`.
    pub fn evaluate_spectral(&self, f: &TestFunction, xi: &[f64]) -> Result<C64> {
        let (_, spec) = self.spectral_parts(f)?;
        let plan = SpectralPlan::new(self, &spec);
        Ok(plan.eval(xi))
    }

    /// `Q_j f` on a grid by inverting the spectrum with composite Gauss rules.
    pub fn evaluate_grid_spectral(&self, f: &TestFunction, grid: &Grid) -> Result<SpectralEvaluation> {
        let (phi_support, spec) = self.spectral_parts(f)?;
        let d = self.dim();
        let plan = SpectralPlan::new(self, &spec);
        let adj = self.dilation.adjoint_power(self.level);
        let support = phi_support.linear_image(&adj);
        let xmax = grid.bounds.max_abs().iter().fold(1.0f64, |a, &v| a.max(v));
        let max_width = 0.5 / xmax;
        let breaks = self.spectral_breaks(&spec, &support);
        let grading = self.generator.fourier_grading();
        let rules: Vec<Vec<(f64, f64)>> = (0..d)
            .map(|ax| composite_rule(support.lo[ax], support.hi[ax], &breaks[ax], max_width, grading))
            .collect();
        let nodes = tensor_points(&rules);
        let samples: Vec<C64> = nodes.par_iter().map(|xi| plan.eval(xi)).collect();
        let values = spectrum_to_grid(&rules, &samples, grid);
        Ok(SpectralEvaluation {
            values,
            nodes_per_axis: rules.iter().map(|r| r.len()).collect(),
        })
    }

    /// Known kinks of `F(Q_j f)` along each axis (diagonal `M` only).
    fn spectral_breaks(&self, spec: &Spectrum, support: &AxisBox) -> Vec<Vec<f64>> {
        let d = self.dim();
        if !self.dilation.is_diagonal() {
            return vec![Vec::new(); d];
        }
        let adj = self.dilation.adjoint_power(self.level);
        let phi_breaks = self.generator.fourier_breaks();
        let mut out = Vec::with_capacity(d);
        for ax in 0..d {
            let s = adj[(ax, ax)];
            let mut b: Vec<f64> = phi_breaks[ax].iter().map(|t| t * s).collect();
            // shifted copies of f̂'s own edges and kinks
            let mut edges: Vec<f64> = spec.breaks.get(ax).cloned().unwrap_or_default();
            if let SpectralSupport::Compact(bx) = &spec.support {
                edges.push(bx.lo[ax]);
                edges.push(bx.hi[ax]);
            }
            if !edges.is_empty() {
                let kmin = ((support.lo[ax] - edges.iter().cloned().fold(f64::INFINITY, f64::min)) / s.abs()).floor() as i64 - 1;
                let kmax = ((support.hi[ax] - edges.iter().cloned().fold(f64::NEG_INFINITY, f64::max)) / s.abs()).ceil() as i64 + 1;
                let span = kmax.abs().max(kmin.abs());
                for k in -span..=span {
                    for e in &edges {
                        let t = e - s * k as f64;
                        if t > support.lo[ax] && t < support.hi[ax] {
                            b.push(t);
                        }
                    }
                }
            }
            b.sort_by(f64::total_cmp);
            b.dedup();
            out.push(b);
        }
        out
    }
}

/// Precomputed matrices for evaluating `F(Q_j f)`.
struct SpectralPlan<'a> {
    op: &'a OperatorSpec,
    spec: &'a Spectrum,
    adj: DMatrix<f64>,
    adj_inv: DMatrix<f64>,
    fbox: AxisBox,
}

impl<'a> SpectralPlan<'a> {
    fn new(op: &'a OperatorSpec, spec: &'a Spectrum) -> Self {
        SpectralPlan {
            op,
            spec,
            adj: op.dilation.adjoint_power(op.level),
            adj_inv: op.dilation.adjoint_power(-op.level),
            fbox: spec.support.bounding_box().cloned().expect("bounded spectrum"),
        }
    }

    fn eval(&self, xi: &[f64]) -> C64 {
        let d = xi.len();
        let eta = mat_vec(&self.adj_inv, xi);
        let ph = self.op.generator.eval_fourier(&eta);
        if ph == ZERO {
            return ZERO;
        }
        // k with ξ + M^{*j}k inside supp f̂
        let shifted = AxisBox::new(
            (0..d).map(|ax| self.fbox.lo[ax] - xi[ax]).collect(),
            (0..d).map(|ax| self.fbox.hi[ax] - xi[ax]).collect(),
        );
        let kb = shifted.linear_image(&self.adj_inv);
        let lo: Vec<i64> = kb.lo.iter().map(|t| (t - 1e-9).floor() as i64).collect();
        let hi: Vec<i64> = kb.hi.iter().map(|t| (t + 1e-9).ceil() as i64).collect();
        let mut acc = ZERO;
        for k in lattice_box(&lo, &hi) {
            let shift = mat_vec_int(&self.adj, &k);
            let zeta: Vec<f64> = xi.iter().zip(&shift).map(|(a, b)| a + b).collect();
            let fv = self.spec.eval(&zeta);
            if fv == ZERO {
                continue;
            }
            let ek: Vec<f64> = eta.iter().zip(&k).map(|(a, &b)| a + b as f64).collect();
            acc += fv * self.op.analyzer.fourier_symbol(&ek).conj();
        }
        ph * acc
    }
}

/// Grid `L_p` norm of `f − approx` over `grid`.
pub fn error_lp<F>(f: &TestFunction, approx: F, p: f64, grid: &Grid) -> GridNorm
where
    F: Fn(&[f64]) -> C64 + Sync,
{
    let diff = grid.map(|x| f.eval(x) - approx(x));
    GridNorm {
        value: grid_lp_norm(&diff, grid, p),
        spacing: grid.spacing(),
    }
}

/// Grid `L_p` norm of `f − values`, with `values` given on `grid`.
pub fn error_lp_values(f: &TestFunction, values: &[C64], p: f64, grid: &Grid) -> Result<GridNorm> {
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: values.len(),
        });
    }
    let diff: Vec<C64> = (0..grid.len())
        .into_par_iter()
        .map(|i| f.eval(&grid.point(i)) - values[i])
        .collect();
    Ok(GridNorm {
        value: grid_lp_norm(&diff, grid, p),
        spacing: grid.spacing(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzers::AxisAnalyzer;
    use crate::generators::GeneratorKind;
    use std::f64::consts::PI;

    fn dirac1() -> AnalysisFunctional {
        AnalysisFunctional::Dirac { dim: 1 }
    }

    fn box1() -> AnalysisFunctional {
        AnalysisFunctional::BoxAverage { dim: 1 }
    }

    fn op(g: Generator, a: AnalysisFunctional, m: f64, j: i32) -> OperatorSpec {
        let d = g.dim();
        OperatorSpec::new(g, a, DilationMatrix::scalar(d, m).unwrap(), j).unwrap()
    }

    #[test]
    fn sinc_interpolates_delta() {
        let q = op(Generator::sinc(1), dirac1(), 2.0, 0);
        let c = q.coefficients(&TestFunction::sinc(1), 3).unwrap();
        for (k, v) in c {
            let expect = if k[0] == 0 { 1.0 } else { 0.0 };
            assert!((v.re - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn gaussian_samples() {
        let q = op(Generator::sinc(1), dirac1(), 2.0, 0);
        let c = q.coefficients(&TestFunction::gaussian(1), 2).unwrap();
        for (k, v) in c {
            assert!((v.re - (-PI * (k[0] * k[0]) as f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_function_is_zero() {
        let q = op(Generator::sinc(1), box1(), 2.0, 1);
        let z = TestFunction::zero(1);
        assert!(q.coefficients(&z, 3).unwrap().iter().all(|(_, c)| *c == ZERO));
        assert_eq!(q.evaluate_spatial(&z, &[0.3], 5).unwrap().value, ZERO);
        assert_eq!(q.evaluate_spectral(&z, &[0.1]).unwrap(), ZERO);
    }

    #[test]
    fn sinc_reproduces_itself() {
        let q = op(Generator::sinc(1), dirac1(), 2.0, 0);
        let r = q.evaluate_spatial(&TestFunction::sinc(1), &[0.5], 50).unwrap();
        assert!((r.value.re - 2.0 / PI).abs() < 1e-15);
        // first-power sinc has no summable envelope
        assert!(r.tail_bound.is_none());
    }

    #[test]
    fn hat_reproduces_hat() {
        let q = op(Generator::bspline(2, 1).unwrap(), dirac1(), 2.0, 0);
        let r = q.evaluate_spatial(&TestFunction::hat(1), &[0.25], 1).unwrap();
        assert!((r.value.re - 0.75).abs() < 1e-15);
        assert_eq!(r.tail_bound, Some(0.0));
    }

    #[test]
    fn spectrum_is_identity_in_band() {
        let f = TestFunction::band_bump(1, 0.4).unwrap();
        let spec = f.spectrum().unwrap().clone();
        let q = op(Generator::sinc(1), dirac1(), 2.0, 0);
        for xi in [-0.45, -0.2, 0.0, 0.13, 0.39] {
            let v = q.evaluate_spectral(&f, &[xi]).unwrap();
            assert!((v - spec.eval(&[xi])).norm() < 1e-15);
        }
        let r = op(Generator::new(GeneratorKind::RationalBandlimited, 1).unwrap(), box1(), 2.0, 0);
        for xi in [-0.45, -0.2, 0.0, 0.13, 0.39] {
            let v = r.evaluate_spectral(&f, &[xi]).unwrap();
            assert!((v - spec.eval(&[xi])).norm() < 1e-14);
        }
    }

    #[test]
    fn spectral_requires_bounded_spectra() {
        let q = op(Generator::sinc(1), dirac1(), 2.0, 0);
        assert!(matches!(q.evaluate_spectral(&TestFunction::hat(1), &[0.0]), Err(Error::UnsupportedInput(_))));
        let b = op(Generator::bspline(2, 1).unwrap(), dirac1(), 2.0, 0);
        assert!(matches!(
            b.evaluate_spectral(&TestFunction::gaussian(1), &[0.0]),
            Err(Error::UnsupportedInput(_))
        ));
    }

    #[test]
    fn error_norm_examples() {
        let grid = Grid::new(AxisBox::new(vec![0.0], vec![1.0]), 1001).unwrap();
        let e = error_lp(&TestFunction::constant(1, 1.0), |_| ZERO, 2.0, &grid);
        assert!((e.value - 1.0).abs() < 1e-3);
        let f = TestFunction::gaussian(1);
        let e0 = error_lp(&f, |x| f.eval(x), 2.0, &grid);
        assert_eq!(e0.value, 0.0);
        let big = Grid::new(AxisBox::cube(1, 6.0), 4096).unwrap();
        let eg = error_lp(&f, |_| ZERO, 2.0, &big);
        assert!((eg.value - 2f64.powf(-0.25)).abs() < 1e-6);
    }

    #[test]
    fn spectral_matches_spatial_for_smooth_generator() {
        // compact spectrum and |x|^{-4} decay: spatial partial sums converge quickly
        let g = Generator::new(GeneratorKind::TensorSincPower { n: 4, a: 4.0, constant: None }, 1).unwrap();
        let f = TestFunction::gaussian(1);
        for analyzer in [dirac1(), box1(), AnalysisFunctional::DiracDerivative { beta: vec![1] }] {
            let q = op(g.clone(), analyzer, 2.0, 1);
            let grid = Grid::new(AxisBox::cube(1, 2.0), 9).unwrap();
            let spec = q.evaluate_grid_spectral(&f, &grid).unwrap();
            for i in 0..grid.len() {
                let x = grid.point(i);
                let s = q.evaluate_spatial(&f, &x, 400).unwrap();
                assert!((s.value - spec.values[i]).norm() < 1e-6, "{} x={x:?}", q.analyzer.name());
                assert!(s.tail_bound.unwrap() < 1e-4);
            }
        }
    }

    #[test]
    fn spectral_sinc_agreement_at_large_radius() {
        let q = op(Generator::sinc(1), dirac1(), 2.0, 0);
        let f = TestFunction::gaussian(1);
        let grid = Grid::new(AxisBox::cube(1, 1.0), 5).unwrap();
        let spec = q.evaluate_grid_spectral(&f, &grid).unwrap();
        for i in 0..grid.len() {
            let s = q.evaluate_spatial(&f, &grid.point(i), 2000).unwrap();
            assert!((s.value - spec.values[i]).norm() < 1e-2);
        }
    }

    #[test]
    fn bspline_spatial_converges_at_small_radius() {
        let q = op(Generator::bspline(3, 1).unwrap(), box1(), 2.0, 1);
        let f = TestFunction::gaussian(1);
        for x in [-0.7, 0.1, 1.3] {
            let a = q.evaluate_spatial(&f, &[x], 12).unwrap().value;
            let b = q.evaluate_spatial(&f, &[x], 20).unwrap().value;
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn dilation_covariance() {
        let m = DilationMatrix::scalar(1, 2.0).unwrap();
        let f = TestFunction::gaussian(1);
        for analyzer in [dirac1(), box1(), AnalysisFunctional::DiracDerivative { beta: vec![1] }] {
            let qj = OperatorSpec::new(Generator::bspline(3, 1).unwrap(), analyzer.clone(), m.clone(), 2).unwrap();
            let q0 = qj.with_level(0).unwrap();
            let g = f.composed(&m.power(-2)).unwrap();
            for x in [-0.3, 0.05, 0.71] {
                let lhs = qj.evaluate_spatial(&f, &[x], 12).unwrap().value;
                let rhs = q0.evaluate_spatial(&g, &[4.0 * x], 12).unwrap().value;
                assert!((lhs - rhs).norm() < 1e-12, "{}", analyzer.name());
            }
        }
    }

    #[test]
    fn relabeling_identity() {
        let f = TestFunction::gaussian(1);
        for analyzer in [dirac1(), box1()] {
            let q = op(Generator::bspline(2, 1).unwrap(), analyzer, 2.0, 2);
            for x in [-0.4, 0.33] {
                let a = q.evaluate_spatial(&f, &[x], 10).unwrap().value;
                let b = q.evaluate_relabeled(&f, &[x], 10).unwrap();
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn grid_spatial_matches_pointwise() {
        let q = op(Generator::bspline(2, 1).unwrap(), box1(), 2.0, 2);
        let f = TestFunction::hat(1);
        let grid = Grid::new(AxisBox::cube(1, 1.5), 31).unwrap();
        let ev = q.evaluate_grid_spatial(&f, &grid, q.exact_window().unwrap()).unwrap();
        for i in 0..grid.len() {
            let p = q.evaluate_spatial(&f, &grid.point(i), 12).unwrap().value;
            assert!((p - ev.values[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn mixed_two_dimensional_spectral_vs_spatial() {
        let g = Generator::new(GeneratorKind::TensorSincPower { n: 4, a: 4.0, constant: None }, 2).unwrap();
        let a = AnalysisFunctional::MixedTensor {
            axes: vec![AxisAnalyzer::Dirac, AxisAnalyzer::BoxAverage],
        };
        let q = OperatorSpec::new(g, a, DilationMatrix::scalar(2, 2.0).unwrap(), 0).unwrap();
        let f = TestFunction::gaussian(2);
        let grid = Grid::new(AxisBox::cube(2, 1.0), 3).unwrap();
        let spec = q.evaluate_grid_spectral(&f, &grid).unwrap();
        for i in [0usize, 4, 7] {
            let s = q.evaluate_spatial(&f, &grid.point(i), 60).unwrap();
            assert!((s.value - spec.values[i]).norm() < 1e-4);
        }
    }
}
