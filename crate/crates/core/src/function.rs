//! Analytic test signals `f` with exact spatial values, derivative closures
//! and Fourier profiles.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::mat_vec;
use crate::numerics::{bump, centered_bspline, log_bump, sinc, AxisBox, C64, ONE, ZERO};

pub type PointFn = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;
pub type DerivativeFn = Arc<dyn Fn(&[u32], &[f64]) -> Option<C64> + Send + Sync>;
pub type AxisFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;
pub type AxisLogFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Where `f̂` lives.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralSupport {
    /// `f̂` vanishes outside the box.
    Compact(AxisBox),
    /// `f̂` is negligible (below 1e-40 relative) outside the box.
    Essential(AxisBox),
    /// Slowly decaying spectrum.
    Unbounded,
}

impl SpectralSupport {
    pub fn bounding_box(&self) -> Option<&AxisBox> {
        match self {
            SpectralSupport::Compact(b) | SpectralSupport::Essential(b) => Some(b),
            SpectralSupport::Unbounded => None,
        }
    }
}

/// One factor of a separable spectrum `f̂(ξ) = ∏ g_ν(ξ_ν)`.
#[derive(Clone)]
pub struct AxisFactor {
    pub eval: AxisFn,
    /// `ln |g_ν(t)|`, used where `|g_ν|` underflows.
    pub log_abs: AxisLogFn,
}

/// Exact Fourier profile of a test function.
#[derive(Clone)]
pub struct Spectrum {
    eval: PointFn,
    pub support: SpectralSupport,
    pub breaks: Vec<Vec<f64>>,
    pub factors: Option<Vec<AxisFactor>>,
}

impl Spectrum {
    pub fn new(eval: PointFn, support: SpectralSupport, breaks: Vec<Vec<f64>>, factors: Option<Vec<AxisFactor>>) -> Self {
        Spectrum {
            eval,
            support,
            breaks,
            factors,
        }
    }

    pub fn eval(&self, xi: &[f64]) -> C64 {
        if let SpectralSupport::Compact(b) = &self.support {
            if !b.contains(xi) {
                return ZERO;
            }
        }
        (self.eval)(xi)
    }

    pub fn is_compact(&self) -> bool {
        matches!(self.support, SpectralSupport::Compact(_))
    }
}

#[derive(Clone)]
pub struct TestFunction {
    name: String,
    dim: usize,
    spatial: PointFn,
    derivative: Option<DerivativeFn>,
    spectrum: Option<Spectrum>,
    spatial_breaks: Vec<Vec<f64>>,
    smoothness: String,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("smoothness", &self.smoothness)
            .field("spectrum", &self.spectrum.as_ref().map(|s| s.support.clone()))
            .finish()
    }
}

impl TestFunction {
    pub fn new(name: impl Into<String>, dim: usize, spatial: PointFn) -> Self {
        TestFunction {
            name: name.into(),
            dim,
            spatial,
            derivative: None,
            spectrum: None,
            spatial_breaks: vec![Vec::new(); dim],
            smoothness: "unspecified".into(),
        }
    }

    pub fn with_derivative(mut self, d: DerivativeFn) -> Self {
        self.derivative = Some(d);
        self
    }

    pub fn with_spectrum(mut self, s: Spectrum) -> Self {
        self.spectrum = Some(s);
        self
    }

    pub fn with_breaks(mut self, breaks: Vec<Vec<f64>>) -> Self {
        self.spatial_breaks = breaks;
        self
    }

    pub fn with_smoothness(mut self, tag: impl Into<String>) -> Self {
        self.smoothness = tag.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn smoothness(&self) -> &str {
        &self.smoothness
    }

    pub fn spectrum(&self) -> Option<&Spectrum> {
        self.spectrum.as_ref()
    }

    pub fn spatial_breaks(&self) -> &[Vec<f64>] {
        &self.spatial_breaks
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        (self.spatial)(x)
    }

    /// `D^β f(x)`; order zero is the function itself.
    pub fn derivative(&self, beta: &[u32], x: &[f64]) -> Result<C64> {
        if beta.iter().all(|&b| b == 0) {
            return Ok(self.eval(x));
        }
        self.derivative
            .as_ref()
            .and_then(|d| d(beta, x))
            .ok_or_else(|| Error::DerivativeUnavailable {
                function: self.name.clone(),
                beta: beta.to_vec(),
            })
    }

    pub fn has_derivatives(&self) -> bool {
        self.derivative.is_some()
    }

    // -- catalog -----------------------------------------------------------

    /// `e^{-π|x|²}`, its own Fourier transform.
    pub fn gaussian(dim: usize) -> Self {
        let spatial: PointFn = Arc::new(|x: &[f64]| C64::new((-PI * x.iter().map(|t| t * t).sum::<f64>()).exp(), 0.0));
        let spec_eval = spatial.clone();
        let factor = AxisFactor {
            eval: Arc::new(|t: f64| C64::new((-PI * t * t).exp(), 0.0)),
            log_abs: Arc::new(|t: f64| -PI * t * t),
        };
        TestFunction::new("gaussian", dim, spatial)
            .with_derivative(Arc::new(|beta: &[u32], x: &[f64]| {
                let mut v = 1.0;
                for (&b, &t) in beta.iter().zip(x) {
                    v *= gaussian_derivative_1d(b, t);
                }
                Some(C64::new(v, 0.0))
            }))
            .with_spectrum(Spectrum::new(
                spec_eval,
                SpectralSupport::Essential(AxisBox::cube(dim, 6.0)),
                vec![Vec::new(); dim],
                Some(vec![factor; dim]),
            ))
            .with_smoothness("analytic")
    }

    /// Band-limited bump: `f̂(ξ) = ∏ ψ(ξ_ν/ρ)` with `ψ(t) = exp(1 − 1/(1 − t²))`.
    pub fn band_bump(dim: usize, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParams("band bump radius must be positive".into()));
        }
        let factor = AxisFactor {
            eval: Arc::new(move |t: f64| C64::new(bump(t / rho), 0.0)),
            log_abs: Arc::new(move |t: f64| log_bump(t / rho)),
        };
        let spec_eval: PointFn = Arc::new(move |xi: &[f64]| C64::new(xi.iter().map(|&t| bump(t / rho)).product(), 0.0));
        Ok(TestFunction::new(
            format!("band_bump({rho})"),
            dim,
            Arc::new(move |x: &[f64]| x.iter().map(|&t| band_bump_axis(rho, t, 0)).product()),
        )
        .with_derivative(Arc::new(move |beta: &[u32], x: &[f64]| {
            Some(beta.iter().zip(x).map(|(&b, &t)| band_bump_axis(rho, t, b)).product())
        }))
        .with_spectrum(Spectrum::new(
            spec_eval,
            SpectralSupport::Compact(AxisBox::cube(dim, rho)),
            vec![Vec::new(); dim],
            Some(vec![factor; dim]),
        ))
        .with_smoothness("analytic, band-limited"))
    }

    /// Tensor hat `∏ max(0, 1 − |x_ν|)`.
    pub fn hat(dim: usize) -> Self {
        let factor = AxisFactor {
            eval: Arc::new(|t: f64| C64::new(sinc(t).powi(2), 0.0)),
            log_abs: Arc::new(|t: f64| 2.0 * sinc(t).abs().ln()),
        };
        TestFunction::new(
            "hat",
            dim,
            Arc::new(|x: &[f64]| C64::new(x.iter().map(|&t| centered_bspline(2, t)).product(), 0.0)),
        )
        .with_derivative(Arc::new(|beta: &[u32], x: &[f64]| {
            let mut v = 1.0;
            for (&b, &t) in beta.iter().zip(x) {
                v *= match b {
                    0 => centered_bspline(2, t),
                    1 => {
                        if t > -1.0 && t < 0.0 {
                            1.0
                        } else if t > 0.0 && t < 1.0 {
                            -1.0
                        } else {
                            return None;
                        }
                    }
                    _ => return None,
                };
            }
            Some(C64::new(v, 0.0))
        }))
        .with_spectrum(Spectrum::new(
            Arc::new(|xi: &[f64]| C64::new(xi.iter().map(|&t| sinc(t).powi(2)).product(), 0.0)),
            SpectralSupport::Unbounded,
            vec![Vec::new(); dim],
            Some(vec![factor; dim]),
        ))
        .with_breaks(vec![vec![-1.0, 0.0, 1.0]; dim])
        .with_smoothness("C^0, Lipschitz")
    }

    /// `∏ sinc(x_ν)`; `f̂ = χ_{T^d}`.
    pub fn sinc(dim: usize) -> Self {
        TestFunction::new(
            "sinc",
            dim,
            Arc::new(|x: &[f64]| C64::new(x.iter().map(|&t| sinc(t)).product(), 0.0)),
        )
        .with_spectrum(Spectrum::new(
            Arc::new(|xi: &[f64]| if xi.iter().all(|t| (-0.5..0.5).contains(t)) { ONE } else { ZERO }),
            SpectralSupport::Compact(AxisBox::cube(dim, 0.5)),
            vec![vec![-0.5, 0.5]; dim],
            None,
        ))
        .with_smoothness("analytic, band-limited")
    }

    pub fn zero(dim: usize) -> Self {
        TestFunction::new("zero", dim, Arc::new(|_: &[f64]| ZERO))
            .with_derivative(Arc::new(|_: &[u32], _: &[f64]| Some(ZERO)))
            .with_spectrum(Spectrum::new(
                Arc::new(|_: &[f64]| ZERO),
                SpectralSupport::Compact(AxisBox::cube(dim, 0.0)),
                vec![Vec::new(); dim],
                None,
            ))
            .with_smoothness("analytic")
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        TestFunction::new("constant", dim, Arc::new(move |_: &[f64]| C64::new(c, 0.0)))
            .with_derivative(Arc::new(|_: &[u32], _: &[f64]| Some(ZERO)))
            .with_smoothness("polynomial")
    }

    /// `x ↦ (w, x)`.
    pub fn linear(weights: Vec<f64>) -> Self {
        let dim = weights.len();
        let w2 = weights.clone();
        TestFunction::new(
            "linear",
            dim,
            Arc::new(move |x: &[f64]| C64::new(weights.iter().zip(x).map(|(a, b)| a * b).sum(), 0.0)),
        )
        .with_derivative(Arc::new(move |beta: &[u32], _: &[f64]| {
            let order: u32 = beta.iter().sum();
            if order == 1 {
                let ax = beta.iter().position(|&b| b == 1)?;
                Some(C64::new(w2[ax], 0.0))
            } else {
                Some(ZERO)
            }
        }))
        .with_smoothness("polynomial")
    }

    /// `x ↦ x²` in one dimension.
    pub fn square() -> Self {
        TestFunction::new("square", 1, Arc::new(|x: &[f64]| C64::new(x[0] * x[0], 0.0)))
            .with_derivative(Arc::new(|beta: &[u32], x: &[f64]| {
                Some(C64::new(
                    match beta[0] {
                        1 => 2.0 * x[0],
                        2 => 2.0,
                        _ => 0.0,
                    },
                    0.0,
                ))
            }))
            .with_smoothness("polynomial")
    }

    // -- wrappers ----------------------------------------------------------

    /// `x ↦ f(x − a)`.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: shift.len(),
            });
        }
        let a: Arc<Vec<f64>> = Arc::new(shift.to_vec());
        let base = self.clone();
        let a1 = a.clone();
        let spatial: PointFn = Arc::new(move |x: &[f64]| {
            let y: Vec<f64> = x.iter().zip(a1.iter()).map(|(p, q)| p - q).collect();
            base.eval(&y)
        });
        let mut out = TestFunction::new(format!("{}∘shift{:?}", self.name, shift), self.dim, spatial)
            .with_smoothness(self.smoothness.clone())
            .with_breaks(
                self.spatial_breaks
                    .iter()
                    .zip(a.iter())
                    .map(|(b, s)| b.iter().map(|t| t + s).collect())
                    .collect(),
            );
        if self.derivative.is_some() {
            let base = self.clone();
            let a2 = a.clone();
            out = out.with_derivative(Arc::new(move |beta: &[u32], x: &[f64]| {
                let y: Vec<f64> = x.iter().zip(a2.iter()).map(|(p, q)| p - q).collect();
                base.derivative(beta, &y).ok()
            }));
        }
        if let Some(spec) = &self.spectrum {
            let inner = spec.clone();
            let a3 = a.clone();
            let eval: PointFn = Arc::new(move |xi: &[f64]| {
                let phase: f64 = -2.0 * PI * a3.iter().zip(xi).map(|(p, q)| p * q).sum::<f64>();
                inner.eval(xi) * C64::from_polar(1.0, phase)
            });
            let factors = spec.factors.as_ref().map(|fs| {
                fs.iter()
                    .zip(a.iter())
                    .map(|(f, &s)| {
                        let g = f.eval.clone();
                        AxisFactor {
                            eval: Arc::new(move |t: f64| g(t) * C64::from_polar(1.0, -2.0 * PI * s * t)),
                            log_abs: f.log_abs.clone(),
                        }
                    })
                    .collect()
            });
            out = out.with_spectrum(Spectrum::new(eval, spec.support.clone(), spec.breaks.clone(), factors));
        }
        Ok(out)
    }

    /// `x ↦ f(Ax)` for a nonsingular `A`.
    pub fn composed(&self, a: &DMatrix<f64>) -> Result<Self> {
        let d = self.dim;
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.nrows(),
            });
        }
        let inv_t = a.clone().try_inverse().ok_or(Error::Singular)?.transpose();
        let det = a.determinant().abs();
        let a = Arc::new(a.clone());
        let diagonal = crate::lattice::is_diagonal(&a);

        let base = self.clone();
        let a1 = a.clone();
        let spatial: PointFn = Arc::new(move |x: &[f64]| base.eval(&mat_vec(&a1, x)));
        let breaks = if diagonal {
            self.spatial_breaks
                .iter()
                .enumerate()
                .map(|(ax, b)| {
                    let mut v: Vec<f64> = b.iter().map(|t| t / a[(ax, ax)]).collect();
                    v.sort_by(f64::total_cmp);
                    v
                })
                .collect()
        } else {
            vec![Vec::new(); d]
        };
        let mut out = TestFunction::new(format!("{}∘linear", self.name), d, spatial)
            .with_smoothness(self.smoothness.clone())
            .with_breaks(breaks);

        if self.derivative.is_some() {
            let base = self.clone();
            let a2 = a.clone();
            out = out.with_derivative(Arc::new(move |beta: &[u32], x: &[f64]| {
                chain_rule_derivative(&a2, beta, &mat_vec(&a2, x), &|b: &[u32], y: &[f64]| base.derivative(b, y).ok())
            }));
        }

        if let Some(spec) = &self.spectrum {
            let inner = spec.clone();
            let it = inv_t.clone();
            let eval: PointFn = Arc::new(move |xi: &[f64]| inner.eval(&mat_vec(&it, xi)) / det);
            let at = a.transpose();
            let support = match &spec.support {
                SpectralSupport::Compact(b) => SpectralSupport::Compact(b.linear_image(&at)),
                SpectralSupport::Essential(b) => SpectralSupport::Essential(b.linear_image(&at)),
                SpectralSupport::Unbounded => SpectralSupport::Unbounded,
            };
            let (sbreaks, factors) = if diagonal {
                let sb = spec
                    .breaks
                    .iter()
                    .enumerate()
                    .map(|(ax, b)| {
                        let mut v: Vec<f64> = b.iter().map(|t| t * a[(ax, ax)]).collect();
                        v.sort_by(f64::total_cmp);
                        v
                    })
                    .collect();
                let fs = spec.factors.as_ref().map(|fs| {
                    fs.iter()
                        .enumerate()
                        .map(|(ax, f)| {
                            let s = a[(ax, ax)];
                            let g = f.eval.clone();
                            let l = f.log_abs.clone();
                            AxisFactor {
                                eval: Arc::new(move |t: f64| g(t / s) / s.abs()),
                                log_abs: Arc::new(move |t: f64| l(t / s) - s.abs().ln()),
                            }
                        })
                        .collect()
                });
                (sb, fs)
            } else {
                (vec![Vec::new(); d], None)
            };
            out = out.with_spectrum(Spectrum::new(eval, support, sbreaks, factors));
        }
        Ok(out)
    }
}

/// `D^n` of `e^{-πt²}`: `(−√π)^n H_n(√π t) e^{−πt²}` with physicists' Hermite `H_n`.
pub fn gaussian_derivative_1d(n: u32, t: f64) -> f64 {
    let y = PI.sqrt() * t;
    let mut h_prev = 0.0;
    let mut h = 1.0;
    for k in 0..n {
        let next = 2.0 * y * h - 2.0 * k as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    (-PI.sqrt()).powi(n as i32) * h * (-PI * t * t).exp()
}

/// Distance from the origin past which one axis factor of the band bump is
/// negligible; sets the alias-free trapezoid period.
const BUMP_ALIAS_DISTANCE: f64 = 75.0;

/// `D^n` of the one-dimensional band bump with radius `ρ`, by the trapezoid
/// rule on the spectrum (alias-free for the chosen period).
pub fn band_bump_axis(rho: f64, t: f64, n: u32) -> C64 {
    let period = 2.0 * (t.abs() + BUMP_ALIAS_DISTANCE / rho);
    let count = (2.0 * rho * period).ceil().max(16.0) as usize;
    let step = 2.0 * rho / count as f64;
    let rot = C64::from_polar(1.0, 2.0 * PI * t * step);
    let mut z = C64::from_polar(1.0, 2.0 * PI * t * (-rho + step));
    let mut acc = ZERO;
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    for i in 1..count {
        let xi = -rho + i as f64 * step;
        let w = bump(xi / rho);
        if w > 0.0 {
            let poly = if n == 0 { ONE } else { (two_pi_i * xi).powu(n) };
            acc += z * poly * w;
        }
        z *= rot;
    }
    // real and even spectrum: every derivative is real
    C64::new(acc.re * step, 0.0)
}

/// `D^β[g(A·)](x) = Σ ∏_r A_{l_r, a_r} (∂_{l_1…l_n} g)(Ax)`, where `(a_r)`
/// lists the axes of `β` with multiplicity. `y = Ax` is passed in.
pub fn chain_rule_derivative<G>(a: &DMatrix<f64>, beta: &[u32], y: &[f64], g: &G) -> Option<C64>
where
    G: Fn(&[u32], &[f64]) -> Option<C64>,
{
    let d = beta.len();
    let axes: Vec<usize> = beta
        .iter()
        .enumerate()
        .flat_map(|(ax, &b)| std::iter::repeat_n(ax, b as usize))
        .collect();
    if axes.is_empty() {
        return g(beta, y);
    }
    if crate::lattice::is_diagonal(a) {
        let scale: f64 = beta.iter().enumerate().map(|(ax, &b)| a[(ax, ax)].powi(b as i32)).product();
        return g(beta, y).map(|v| v * scale);
    }
    // Sum over target multi-indices, grouping tuples that give the same one.
    let n = axes.len();
    let mut acc = ZERO;
    let total = d.pow(n as u32);
    let mut cache: std::collections::BTreeMap<Vec<u32>, C64> = Default::default();
    for code in 0..total {
        let mut c = code;
        let mut weight = 1.0;
        let mut target = vec![0u32; d];
        for &ar in &axes {
            let l = c % d;
            c /= d;
            weight *= a[(l, ar)];
            target[l] += 1;
        }
        if weight == 0.0 {
            continue;
        }
        let val = match cache.get(&target) {
            Some(v) => *v,
            None => {
                let v = g(&target, y)?;
                cache.insert(target.clone(), v);
                v
            }
        };
        acc += val * weight;
    }
    Some(acc)
}
