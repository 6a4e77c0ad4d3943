//! Analysis functionals `φ̃` and the coefficients `⟨f, φ̃_{jk}⟩`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::function::{chain_rule_derivative, TestFunction};
use crate::generators::Generator;
use crate::lattice::{mat_vec, mat_vec_int, DilationMatrix};
use crate::numerics::{integrate_box, sinc, AxisBox, Tolerance, C64, ONE};

/// Absolute accuracy of averaging coefficients.
pub const COEFF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisAnalyzer {
    Dirac,
    BoxAverage,
}

#[derive(Debug, Clone)]
pub enum AnalysisFunctional {
    /// Point evaluation `δ`.
    Dirac { dim: usize },
    /// `D^β δ`.
    DiracDerivative { beta: Vec<u32> },
    /// `χ_{T^d}`.
    BoxAverage { dim: usize },
    /// Per-axis choice of point value or unit average.
    MixedTensor { axes: Vec<AxisAnalyzer> },
    /// Integration against a compactly supported kernel.
    KernelL1 { kernel: Generator },
    /// `δ + D^β δ`.
    DiracPlusDerivative { beta: Vec<u32> },
}

impl AnalysisFunctional {
    pub fn kernel(kernel: Generator) -> Result<Self> {
        if kernel.spatial_support().is_none() {
            return Err(Error::UnsupportedInput(format!(
                "kernel {} must have compact spatial support",
                kernel.name()
            )));
        }
        Ok(AnalysisFunctional::KernelL1 { kernel })
    }

    pub fn dim(&self) -> usize {
        match self {
            AnalysisFunctional::Dirac { dim } | AnalysisFunctional::BoxAverage { dim } => *dim,
            AnalysisFunctional::DiracDerivative { beta } | AnalysisFunctional::DiracPlusDerivative { beta } => beta.len(),
            AnalysisFunctional::MixedTensor { axes } => axes.len(),
            AnalysisFunctional::KernelL1 { kernel } => kernel.dim(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            AnalysisFunctional::Dirac { .. } => "dirac".into(),
            AnalysisFunctional::DiracDerivative { beta } => format!("dirac_derivative{beta:?}"),
            AnalysisFunctional::BoxAverage { .. } => "box_average".into(),
            AnalysisFunctional::MixedTensor { axes } => format!("mixed{axes:?}"),
            AnalysisFunctional::KernelL1 { kernel } => format!("kernel({})", kernel.name()),
            AnalysisFunctional::DiracPlusDerivative { beta } => format!("dirac_plus_derivative{beta:?}"),
        }
    }

    /// `φ̂̃(ξ)`.
    pub fn fourier_symbol(&self, xi: &[f64]) -> C64 {
        match self {
            AnalysisFunctional::Dirac { .. } => ONE,
            AnalysisFunctional::DiracDerivative { beta } => monomial_symbol(beta, xi),
            AnalysisFunctional::BoxAverage { .. } => C64::new(xi.iter().map(|&t| sinc(t)).product(), 0.0),
            AnalysisFunctional::MixedTensor { axes } => C64::new(
                axes.iter()
                    .zip(xi)
                    .map(|(a, &t)| match a {
                        AxisAnalyzer::Dirac => 1.0,
                        AxisAnalyzer::BoxAverage => sinc(t),
                    })
                    .product(),
                0.0,
            ),
            AnalysisFunctional::KernelL1 { kernel } => kernel.eval_fourier(xi),
            AnalysisFunctional::DiracPlusDerivative { beta } => ONE + monomial_symbol(beta, xi),
        }
    }

    /// The factor `α(M)` bounding the functional on band-limited inputs.
    pub fn alpha_bound(&self, m: &DilationMatrix) -> Result<f64> {
        let beta = match self {
            AnalysisFunctional::DiracDerivative { beta } | AnalysisFunctional::DiracPlusDerivative { beta } => beta,
            _ => return Ok(1.0),
        };
        if beta.len() != m.dim() {
            return Err(Error::DimensionMismatch {
                expected: beta.len(),
                got: m.dim(),
            });
        }
        if m.is_diagonal() {
            return Ok(m
                .diagonal_entries()
                .iter()
                .zip(beta)
                .map(|(v, &b)| v.abs().powi(b as i32))
                .product());
        }
        if m.is_isotropic() {
            let order: u32 = beta.iter().sum();
            return Ok(m.det_abs().powf(order as f64 / m.dim() as f64));
        }
        Err(Error::UnsupportedMatrix(
            "derivative functionals need a diagonal or isotropic dilation".into(),
        ))
    }

    /// `⟨f, φ̃_{jk}⟩ = m^{-j/2} ⟨f(M^{-j}(· − k)), φ̃⟩`.
    pub fn analyze(&self, f: &TestFunction, m: &DilationMatrix, j: i32, k: &[i64]) -> Result<C64> {
        let d = self.dim();
        if f.dim() != d || m.dim() != d || k.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: f.dim(),
            });
        }
        let scale = m.det_abs().powf(-(j as f64) / 2.0);
        let inv = m.power(-j);
        let neg_k: Vec<i64> = k.iter().map(|v| -v).collect();
        let y0 = mat_vec_int(&inv, &neg_k);
        let value = match self {
            AnalysisFunctional::Dirac { .. } => f.eval(&y0),
            AnalysisFunctional::DiracDerivative { beta } => dilated_derivative(f, &inv, beta, &y0)?,
            AnalysisFunctional::DiracPlusDerivative { beta } => f.eval(&y0) + dilated_derivative(f, &inv, beta, &y0)?,
            AnalysisFunctional::BoxAverage { .. } => {
                average(f, m, j, k, &vec![AxisAnalyzer::BoxAverage; d])?
            }
            AnalysisFunctional::MixedTensor { axes } => average(f, m, j, k, axes)?,
            AnalysisFunctional::KernelL1 { kernel } => kernel_pairing(f, kernel, m, j, k)?,
        };
        Ok(value * scale)
    }
}

fn monomial_symbol(beta: &[u32], xi: &[f64]) -> C64 {
    let mut v = ONE;
    for (&b, &t) in beta.iter().zip(xi) {
        v *= C64::new(0.0, 2.0 * PI * t).powu(b);
    }
    v
}

/// `(−1)^{[β]} D^β[f(B·)](−k)` with `B = M^{-j}`, `y0 = −Bk`.
fn dilated_derivative(f: &TestFunction, b: &nalgebra::DMatrix<f64>, beta: &[u32], y0: &[f64]) -> Result<C64> {
    let order: u32 = beta.iter().sum();
    let missing = std::cell::RefCell::new(None);
    let v = chain_rule_derivative(b, beta, y0, &|bb: &[u32], y: &[f64]| match f.derivative(bb, y) {
        Ok(v) => Some(v),
        Err(e) => {
            missing.borrow_mut().get_or_insert(e);
            None
        }
    });
    match v {
        Some(v) => Ok(if order % 2 == 1 { -v } else { v }),
        None => Err(missing.into_inner().unwrap_or_else(|| Error::DerivativeUnavailable {
            function: f.name().to_string(),
            beta: beta.to_vec(),
        })),
    }
}

/// Locations in `u`-space where `f(M^{-j}(u − k))` has axis-aligned kinks.
fn mapped_breaks(f: &TestFunction, m: &DilationMatrix, j: i32, k: &[i64]) -> Vec<Vec<f64>> {
    let d = m.dim();
    if !m.is_diagonal() {
        return vec![Vec::new(); d];
    }
    let mj = m.power(j);
    f.spatial_breaks()
        .iter()
        .enumerate()
        .map(|(ax, b)| b.iter().map(|t| mj[(ax, ax)] * t + k[ax] as f64).collect())
        .collect()
}

/// `∫ f(M^{-j}(u − k)) du` over the averaging axes of `T^d`, with `u_ν = 0`
/// on point-value axes.
fn average(f: &TestFunction, m: &DilationMatrix, j: i32, k: &[i64], axes: &[AxisAnalyzer]) -> Result<C64> {
    let d = axes.len();
    let inv = m.power(-j);
    let active: Vec<usize> = (0..d).filter(|&ax| axes[ax] == AxisAnalyzer::BoxAverage).collect();
    let shift = |u: &[f64]| -> Vec<f64> {
        let mut full = vec![0.0; d];
        for (i, &ax) in active.iter().enumerate() {
            full[ax] = u[i];
        }
        for ax in 0..d {
            full[ax] -= k[ax] as f64;
        }
        mat_vec(&inv, &full)
    };
    if active.is_empty() {
        return Ok(f.eval(&shift(&[])));
    }
    let all_breaks = mapped_breaks(f, m, j, k);
    let breaks: Vec<Vec<f64>> = active.iter().map(|&ax| all_breaks[ax].clone()).collect();
    let bounds = AxisBox::cube(active.len(), 0.5);
    let q = integrate_box(
        &|u: &[f64]| Ok(f.eval(&shift(u))),
        &bounds,
        &breaks,
        Tolerance::abs(COEFF_TOL),
        "box-average coefficient",
    )?;
    Ok(q.value)
}

fn kernel_pairing(f: &TestFunction, kernel: &Generator, m: &DilationMatrix, j: i32, k: &[i64]) -> Result<C64> {
    let support = kernel.spatial_support().ok_or_else(|| {
        Error::UnsupportedInput(format!("kernel {} must have compact spatial support", kernel.name()))
    })?;
    let d = m.dim();
    let inv = m.power(-j);
    let mut breaks = mapped_breaks(f, m, j, k);
    for (b, kb) in breaks.iter_mut().zip(kernel.spatial_breaks()) {
        b.extend(kb);
    }
    let q = integrate_box(
        &|x: &[f64]| {
            let shifted: Vec<f64> = (0..d).map(|ax| x[ax] - k[ax] as f64).collect();
            Ok(f.eval(&mat_vec(&inv, &shifted)) * kernel.eval_spatial(x)?.conj())
        },
        &support,
        &breaks,
        Tolerance::abs(COEFF_TOL),
        "kernel coefficient",
    )?;
    Ok(q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_adaptive;
    use std::sync::Arc;

    fn m1(c: f64) -> DilationMatrix {
        DilationMatrix::scalar(1, c).unwrap()
    }

    #[test]
    fn symbols() {
        assert_eq!(AnalysisFunctional::Dirac { dim: 2 }.fourier_symbol(&[0.3, 0.1]), ONE);
        assert_eq!(AnalysisFunctional::BoxAverage { dim: 1 }.fourier_symbol(&[0.0]), ONE);
        let mixed = AnalysisFunctional::MixedTensor {
            axes: vec![AxisAnalyzer::Dirac, AxisAnalyzer::BoxAverage],
        };
        assert_eq!(mixed.fourier_symbol(&[0.37, 0.0]), ONE);
        assert!((mixed.fourier_symbol(&[0.37, 0.5]).re - 2.0 / PI).abs() < 1e-15);
        let dd = AnalysisFunctional::DiracDerivative { beta: vec![2] };
        assert!((dd.fourier_symbol(&[0.5]) - C64::new(-PI * PI, 0.0)).norm() < 1e-12);
        let dp = AnalysisFunctional::DiracPlusDerivative { beta: vec![1] };
        assert!((dp.fourier_symbol(&[0.25]) - C64::new(1.0, PI / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn alpha_bounds() {
        let m = DilationMatrix::diagonal(&[2.0, 3.0]).unwrap();
        let dd = AnalysisFunctional::DiracDerivative { beta: vec![1, 0] };
        assert_eq!(dd.alpha_bound(&m).unwrap(), 2.0);
        assert_eq!(AnalysisFunctional::Dirac { dim: 2 }.alpha_bound(&m).unwrap(), 1.0);
        let d1 = AnalysisFunctional::DiracDerivative { beta: vec![2] };
        assert_eq!(d1.alpha_bound(&m1(3.0)).unwrap(), 9.0);
        let q = DilationMatrix::new(&[vec![1.0, -1.0], vec![1.0, 1.0]]).unwrap();
        let d2 = AnalysisFunctional::DiracDerivative { beta: vec![1, 1] };
        assert!((d2.alpha_bound(&q).unwrap() - 2.0).abs() < 1e-12);
        let general = DilationMatrix::new(&[vec![2.0, 1.0], vec![0.0, 3.0]]).unwrap();
        assert!(matches!(d2.alpha_bound(&general), Err(Error::UnsupportedMatrix(_))));
        assert_eq!(AnalysisFunctional::BoxAverage { dim: 2 }.alpha_bound(&general).unwrap(), 1.0);
    }

    #[test]
    fn dirac_coefficient_unrolled() {
        let f = TestFunction::linear(vec![1.0]);
        let v = AnalysisFunctional::Dirac { dim: 1 }.analyze(&f, &m1(2.0), 1, &[-2]).unwrap();
        assert!((v.re - 2f64.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn unit_average() {
        let f = TestFunction::constant(2, 1.0);
        let v = AnalysisFunctional::BoxAverage { dim: 2 }
            .analyze(&f, &DilationMatrix::scalar(2, 2.0).unwrap(), 0, &[0, 0])
            .unwrap();
        assert!((v.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sinc_vanishes_on_integers() {
        let f = TestFunction::sinc(1);
        for k in [-3i64, -1, 2, 5] {
            let v = AnalysisFunctional::Dirac { dim: 1 }.analyze(&f, &m1(2.0), 0, &[k]).unwrap();
            assert!(v.norm() < 1e-15);
        }
    }

    #[test]
    fn box_average_matches_direct_integral() {
        // m^{j/2} ∫_{M^{-j}(T − k)} f, computed independently
        let f = TestFunction::gaussian(1);
        let m = m1(2.0);
        for (j, k) in [(0, 0i64), (1, -3), (2, 5), (3, 1)] {
            let v = AnalysisFunctional::BoxAverage { dim: 1 }.analyze(&f, &m, j, &[k]).unwrap();
            let s = 2f64.powi(-j);
            let lo = s * (-0.5 - k as f64);
            let hi = s * (0.5 - k as f64);
            let q = integrate_adaptive(
                |y| Ok(C64::new((-PI * y * y).exp(), 0.0)),
                lo,
                hi,
                &[],
                Tolerance::abs(1e-15),
                "t",
            )
            .unwrap();
            let expect = 2f64.powf(j as f64 / 2.0) * q.value.re;
            assert!((v.re - expect).abs() < 1e-12, "j={j} k={k}");
        }
    }

    #[test]
    fn hat_average_uses_breaks() {
        // ∫_{-1/2}^{1/2} Λ(u) du = 3/4
        let v = AnalysisFunctional::BoxAverage { dim: 1 }
            .analyze(&TestFunction::hat(1), &m1(2.0), 0, &[0])
            .unwrap();
        assert!((v.re - 0.75).abs() < 1e-14);
    }

    #[test]
    fn derivative_chain_rule_symbolic_d1() {
        // f(x) = x³, M = 3, j = 1, β = 1: ⟨f, D δ_{1k}⟩ = 3^{-1/2}·(−1)·d/dx[(x/3)³](−k)
        let f = TestFunction::new("cube", 1, Arc::new(|x: &[f64]| C64::new(x[0].powi(3), 0.0))).with_derivative(Arc::new(
            |b: &[u32], x: &[f64]| {
                Some(C64::new(
                    match b[0] {
                        1 => 3.0 * x[0] * x[0],
                        2 => 6.0 * x[0],
                        3 => 6.0,
                        _ => 0.0,
                    },
                    0.0,
                ))
            },
        ));
        let a = AnalysisFunctional::DiracDerivative { beta: vec![1] };
        for k in [-2i64, 0, 1, 4] {
            let v = a.analyze(&f, &m1(3.0), 1, &[k]).unwrap();
            let x = -(k as f64);
            let symbolic = -(3.0 * x * x / 27.0);
            assert!((v.re - symbolic / 3f64.sqrt()).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn derivative_requires_closure() {
        let a = AnalysisFunctional::DiracDerivative { beta: vec![1] };
        let err = a.analyze(&TestFunction::sinc(1), &m1(2.0), 0, &[0]).unwrap_err();
        assert!(matches!(err, Error::DerivativeUnavailable { .. }));
    }

    #[test]
    fn mixed_tensor_partial_integral() {
        let f = TestFunction::gaussian(2);
        let m = DilationMatrix::scalar(2, 2.0).unwrap();
        let a = AnalysisFunctional::MixedTensor {
            axes: vec![AxisAnalyzer::Dirac, AxisAnalyzer::BoxAverage],
        };
        let v = a.analyze(&f, &m, 1, &[1, 0]).unwrap();
        let x1 = -0.5;
        let q = integrate_adaptive(|u| Ok(C64::new((-PI * (u / 2.0).powi(2)).exp(), 0.0)), -0.5, 0.5, &[], Tolerance::abs(1e-15), "t")
            .unwrap();
        let expect = 0.5 * (-PI * x1 * x1).exp() * q.value.re;
        assert!((v.re - expect).abs() < 1e-13);
    }

    #[test]
    fn box_average_bounded_by_sup() {
        let m = m1(2.0);
        for f in [TestFunction::gaussian(1), TestFunction::hat(1), TestFunction::band_bump(1, 0.4).unwrap()] {
            let sup = (0..2001).map(|i| f.eval(&[-10.0 + i as f64 * 0.01]).norm()).fold(0.0, f64::max);
            for k in -6..=6 {
                let c = AnalysisFunctional::BoxAverage { dim: 1 }.analyze(&f, &m, 0, &[k]).unwrap();
                assert!(c.norm() <= sup + 1e-12);
            }
        }
    }

    #[test]
    fn coefficients_decay() {
        let m = m1(2.0);
        let a = AnalysisFunctional::BoxAverage { dim: 1 };
        for f in [TestFunction::gaussian(1), TestFunction::band_bump(1, 0.4).unwrap()] {
            let far = [100i64, 500, 1000];
            let vals: Vec<f64> = far.iter().map(|&k| a.analyze(&f, &m, 0, &[k]).unwrap().norm()).collect();
            assert!(vals[2] < 1e-6, "{}: {:?}", f.name(), vals);
        }
    }

    #[test]
    fn kernel_pairing_against_hat() {
        // ⟨1, Λ(· + k)⟩ = 1 for every k
        let a = AnalysisFunctional::kernel(Generator::bspline(2, 1).unwrap()).unwrap();
        let v = a.analyze(&TestFunction::constant(1, 1.0), &m1(2.0), 0, &[3]).unwrap();
        assert!((v.re - 1.0).abs() < 1e-13);
        assert!(AnalysisFunctional::kernel(Generator::sinc(1)).is_err());
    }
}
