//! Synthesis functions `φ`, evaluated in space and in frequency.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{mat_vec, DilationMatrix};
use crate::numerics::{
    bspline_knots, centered_bspline, integrate_adaptive, integrate_box, sinc, AxisBox, Tolerance, C64, ZERO,
};

/// Absolute accuracy targeted by quadrature-backed spatial evaluation.
pub const SPATIAL_TOL: f64 = 1e-10;

pub type ProfileFn = Arc<dyn Fn(&[f64]) -> C64 + Send + Sync>;

/// A user-supplied Fourier profile with compact support.
#[derive(Clone)]
pub struct FourierProfile {
    pub name: String,
    pub eval: ProfileFn,
    pub support: AxisBox,
    /// Known kinks or jumps of the profile, per axis.
    pub breaks: Vec<Vec<f64>>,
}

impl FourierProfile {
    pub fn new(name: impl Into<String>, eval: ProfileFn, support: AxisBox, breaks: Vec<Vec<f64>>) -> Self {
        FourierProfile {
            name: name.into(),
            eval,
            support,
            breaks,
        }
    }
}

impl fmt::Debug for FourierProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierProfile")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum GeneratorKind {
    /// `c·∏ sinc^n(x_ν/a)`; `constant = None` normalizes to `φ̂(0) = 1`.
    TensorSincPower { n: u32, a: f64, constant: Option<f64> },
    /// Tensor product of centered cardinal B-splines of order `n`.
    BSplineTensor { n: u32 },
    /// `φ̂(ξ) = (1 − |3ξ|^s)_+^γ`.
    BochnerRiesz { s: f64, gamma: f64 },
    /// `φ̂(ξ) = χ_{T^d}(ξ) / ∏ sinc(ξ_ν)`.
    RationalBandlimited,
    FourierProfile(FourierProfile),
}

/// Polynomial decay envelope `|φ(x)| ≤ ∏_ν scale·min(1, (width/(π|x_ν|))^order)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEnvelope {
    pub scale: f64,
    pub width: f64,
    pub order: u32,
}

impl DecayEnvelope {
    pub fn axis(&self, t: f64) -> f64 {
        let r = self.width / (PI * t.abs());
        self.scale * r.min(1.0).powi(self.order as i32)
    }
}

#[derive(Debug, Clone)]
pub struct Generator {
    kind: GeneratorKind,
    dim: usize,
    /// Per-axis amplitude for the sinc-power family.
    axis_constant: f64,
}

impl Generator {
    pub fn new(kind: GeneratorKind, dim: usize) -> Result<Self> {
        if dim == 0 || dim > crate::lattice::MAX_DIM {
            return Err(Error::InvalidParams(format!("unsupported dimension {dim}")));
        }
        let mut axis_constant = 1.0;
        match &kind {
            GeneratorKind::TensorSincPower { n, a, constant } => {
                if *n == 0 {
                    return Err(Error::InvalidParams("sinc power n must be >= 1".into()));
                }
                if !(*a > 0.0) || !a.is_finite() {
                    return Err(Error::InvalidParams("sinc scale a must be positive".into()));
                }
                axis_constant = match constant {
                    Some(c) => {
                        if !c.is_finite() || *c == 0.0 {
                            return Err(Error::InvalidParams("constant must be finite and nonzero".into()));
                        }
                        c.abs().powf(1.0 / dim as f64) * c.signum()
                    }
                    None => 1.0 / (a * centered_bspline(*n, 0.0)),
                };
            }
            GeneratorKind::BSplineTensor { n } => {
                if *n == 0 {
                    return Err(Error::InvalidParams("B-spline order must be >= 1".into()));
                }
            }
            GeneratorKind::BochnerRiesz { s, gamma } => {
                if !(*s > 0.0) {
                    return Err(Error::InvalidParams("Bochner-Riesz smoothness s must be > 0".into()));
                }
                let min_gamma = (dim as f64 - 1.0) / 2.0;
                if !(*gamma > min_gamma) {
                    return Err(Error::InvalidParams(format!(
                        "Bochner-Riesz exponent gamma must exceed {min_gamma} in dimension {dim}"
                    )));
                }
            }
            GeneratorKind::RationalBandlimited => {}
            GeneratorKind::FourierProfile(p) => {
                if p.support.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: p.support.dim(),
                    });
                }
            }
        }
        Ok(Generator {
            kind,
            dim,
            axis_constant,
        })
    }

    /// Normalized `sinc(x)` in every coordinate: `φ̂ = χ_{[-1/2,1/2)^d}`.
    pub fn sinc(dim: usize) -> Self {
        Self::new(
            GeneratorKind::TensorSincPower {
                n: 1,
                a: 1.0,
                constant: None,
            },
            dim,
        )
        .expect("valid sinc generator")
    }

    pub fn bspline(n: u32, dim: usize) -> Result<Self> {
        Self::new(GeneratorKind::BSplineTensor { n }, dim)
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> String {
        match &self.kind {
            GeneratorKind::TensorSincPower { n, a, .. } => format!("sinc^{n}(x/{a})"),
            GeneratorKind::BSplineTensor { n } => format!("bspline{n}"),
            GeneratorKind::BochnerRiesz { s, gamma } => format!("bochner_riesz(s={s},gamma={gamma})"),
            GeneratorKind::RationalBandlimited => "rational_bandlimited".into(),
            GeneratorKind::FourierProfile(p) => p.name.clone(),
        }
    }

    /// Box outside of which `φ̂` vanishes, if any.
    pub fn fourier_support(&self) -> Option<AxisBox> {
        let d = self.dim;
        match &self.kind {
            GeneratorKind::TensorSincPower { n, a, .. } => Some(AxisBox::cube(d, *n as f64 / (2.0 * a))),
            GeneratorKind::BSplineTensor { .. } => None,
            GeneratorKind::BochnerRiesz { .. } => Some(AxisBox::cube(d, 1.0 / 3.0)),
            GeneratorKind::RationalBandlimited => Some(AxisBox::cube(d, 0.5)),
            GeneratorKind::FourierProfile(p) => Some(p.support.clone()),
        }
    }

    /// Kinks and jumps of `φ̂`, per axis.
    pub fn fourier_breaks(&self) -> Vec<Vec<f64>> {
        let d = self.dim;
        match &self.kind {
            GeneratorKind::TensorSincPower { n, a, .. } => {
                vec![bspline_knots(*n).into_iter().map(|t| t / a).collect(); d]
            }
            GeneratorKind::BSplineTensor { .. } => vec![Vec::new(); d],
            GeneratorKind::BochnerRiesz { .. } => vec![vec![-1.0 / 3.0, 0.0, 1.0 / 3.0]; d],
            GeneratorKind::RationalBandlimited => vec![vec![-0.5, 0.5]; d],
            GeneratorKind::FourierProfile(p) => {
                let mut b = p.breaks.clone();
                b.resize(d, Vec::new());
                b
            }
        }
    }

    /// Levels of geometric refinement a Gauss rule needs next to the
    /// breakpoints of `φ̂` (nonzero where the profile has an algebraic
    /// singularity there).
    pub fn fourier_grading(&self) -> usize {
        match &self.kind {
            GeneratorKind::BochnerRiesz { .. } | GeneratorKind::FourierProfile(_) => 12,
            _ => 0,
        }
    }

    /// Box outside of which `φ` vanishes, if any.
    pub fn spatial_support(&self) -> Option<AxisBox> {
        match &self.kind {
            GeneratorKind::BSplineTensor { n } => Some(AxisBox::cube(self.dim, *n as f64 / 2.0)),
            _ => None,
        }
    }

    /// Kinks of `φ` along each axis (B-spline knots).
    pub fn spatial_breaks(&self) -> Vec<Vec<f64>> {
        match &self.kind {
            GeneratorKind::BSplineTensor { n } => vec![bspline_knots(*n); self.dim],
            _ => vec![Vec::new(); self.dim],
        }
    }

    pub fn decay_envelope(&self) -> Option<DecayEnvelope> {
        match &self.kind {
            GeneratorKind::TensorSincPower { n, a, .. } => Some(DecayEnvelope {
                scale: self.axis_constant.abs(),
                width: *a,
                order: *n,
            }),
            _ => None,
        }
    }

    /// `φ̂(ξ)` from the closed-form profile.
    pub fn eval_fourier(&self, xi: &[f64]) -> C64 {
        debug_assert_eq!(xi.len(), self.dim);
        match &self.kind {
            GeneratorKind::TensorSincPower { n, a, .. } => {
                let mut v = 1.0;
                for &t in xi {
                    v *= self.axis_constant * a * centered_bspline(*n, a * t);
                    if v == 0.0 {
                        break;
                    }
                }
                C64::new(v, 0.0)
            }
            GeneratorKind::BSplineTensor { n } => {
                C64::new(xi.iter().map(|&t| sinc(t).powi(*n as i32)).product(), 0.0)
            }
            GeneratorKind::BochnerRiesz { s, gamma } => {
                let r = xi.iter().map(|t| t * t).sum::<f64>().sqrt();
                C64::new(bochner_riesz_radial(r, *s, *gamma), 0.0)
            }
            GeneratorKind::RationalBandlimited => {
                if xi.iter().all(|&t| (-0.5..0.5).contains(&t)) {
                    C64::new(xi.iter().map(|&t| 1.0 / sinc(t)).product(), 0.0)
                } else {
                    ZERO
                }
            }
            GeneratorKind::FourierProfile(p) => {
                if p.support.contains(xi) {
                    (p.eval)(xi)
                } else {
                    ZERO
                }
            }
        }
    }

    /// `φ(x)`: closed form where available, otherwise quadrature of the
    /// inverse Fourier integral to [`SPATIAL_TOL`].
    pub fn eval_spatial(&self, x: &[f64]) -> Result<C64> {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            GeneratorKind::TensorSincPower { n, a, .. } => {
                let mut v = 1.0;
                for &t in x {
                    v *= self.axis_constant * sinc(t / a).powi(*n as i32);
                }
                Ok(C64::new(v, 0.0))
            }
            GeneratorKind::BSplineTensor { n } => {
                let mut v = 1.0;
                for &t in x {
                    v *= centered_bspline(*n, t);
                    if v == 0.0 {
                        break;
                    }
                }
                Ok(C64::new(v, 0.0))
            }
            GeneratorKind::BochnerRiesz { s, gamma } => bochner_riesz_spatial(x, *s, *gamma),
            GeneratorKind::RationalBandlimited => {
                let mut v = 1.0;
                for &t in x {
                    v *= rational_axis_spatial(t)?;
                }
                Ok(C64::new(v, 0.0))
            }
            GeneratorKind::FourierProfile(_) => self.spatial_by_quadrature(x),
        }
    }

    /// Inverse Fourier integral of `φ̂` over its support box.
    pub fn spatial_by_quadrature(&self, x: &[f64]) -> Result<C64> {
        let support = self.fourier_support().ok_or_else(|| {
            Error::UnsupportedInput(format!("{} has no compact Fourier support", self.name()))
        })?;
        let xs = x.to_vec();
        let q = integrate_box(
            &|xi: &[f64]| {
                let phase: f64 = 2.0 * PI * xs.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
                Ok(self.eval_fourier(xi) * C64::from_polar(1.0, phase))
            },
            &support,
            &self.fourier_breaks(),
            Tolerance::abs(SPATIAL_TOL),
            "generator spatial quadrature",
        )?;
        Ok(q.value)
    }

    /// `φ_{jk}(x) = m^{j/2} φ(M^j x + k)`.
    pub fn eval_jk(&self, m: &DilationMatrix, j: i32, k: &[i64], x: &[f64]) -> Result<C64> {
        let mj = m.power(j);
        let mut y = mat_vec(&mj, x);
        for (yi, &ki) in y.iter_mut().zip(k) {
            *yi += ki as f64;
        }
        Ok(self.eval_spatial(&y)? * m.det_abs().powf(j as f64 / 2.0))
    }
}

fn bochner_riesz_radial(r: f64, s: f64, gamma: f64) -> f64 {
    let base = 1.0 - (3.0 * r).powf(s);
    if base <= 0.0 {
        0.0
    } else {
        base.powf(gamma)
    }
}

/// Radial profile integrated over the ball `|ξ| ≤ 1/3`, one coordinate at a
/// time with exact limits; even symmetry reduces the phase to cosines.
fn bochner_riesz_spatial(x: &[f64], s: f64, gamma: f64) -> Result<C64> {
    fn level(x: &[f64], s: f64, gamma: f64, axis: usize, r2_used: f64, tol: f64) -> Result<f64> {
        let d = x.len();
        let rem = (1.0 / 9.0 - r2_used).max(0.0).sqrt();
        if rem == 0.0 {
            return Ok(0.0);
        }
        let inner_tol = tol * 0.1;
        let q = integrate_adaptive(
            |t| {
                let c = (2.0 * PI * x[axis] * t).cos();
                let v = if axis + 1 == d {
                    bochner_riesz_radial((r2_used + t * t).sqrt(), s, gamma)
                } else {
                    level(x, s, gamma, axis + 1, r2_used + t * t, inner_tol)?
                };
                Ok(C64::new(2.0 * c * v, 0.0))
            },
            0.0,
            rem,
            &[],
            Tolerance::abs(tol),
            "bochner-riesz spatial quadrature",
        )?;
        Ok(q.value.re)
    }
    Ok(C64::new(level(x, s, gamma, 0, 0.0, SPATIAL_TOL)?, 0.0))
}

/// `∫_{-1/2}^{1/2} e^{2πitξ} / sinc(ξ) dξ`.
fn rational_axis_spatial(t: f64) -> Result<f64> {
    let q = integrate_adaptive(
        |xi| Ok(C64::new(2.0 * (2.0 * PI * t * xi).cos() / sinc(xi), 0.0)),
        0.0,
        0.5,
        &[],
        Tolerance::abs(SPATIAL_TOL * 0.1),
        "rational band-limited spatial quadrature",
    )?;
    Ok(q.value.re)
}
