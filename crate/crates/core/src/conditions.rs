//! Numerical checks of the structural hypotheses on a pair `(φ, φ̃)`:
//! Strang-Fix order, weak and strict compatibility, Mikhlin constants and
//! `𝓛_p` norms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analyzers::AnalysisFunctional;
use crate::error::{Error, Result};
use crate::generators::{Generator, GeneratorKind};
use crate::numerics::{centered_bspline, eta, grid_lp_norm, lattice_cube, multi_indices_of_order, sinc, AxisBox, Grid, C64, ONE};
use crate::smoothness::direction_net;

pub const ZERO_TOL: f64 = 1e-7;
pub const STRICT_TOL: f64 = 1e-9;
pub const MAX_ORDER: usize = 6;
pub const FD_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

type Symbol<'a> = dyn Fn(&[f64]) -> C64 + Sync + 'a;

fn binomial(n: u32, i: u32) -> f64 {
    (0..i).fold(1.0, |c, t| c * (n - t) as f64 / (t + 1) as f64)
}

/// Tensor central difference for `D^β g(x)` with step `h`, together with the
/// magnitude scale that governs its rounding error.
fn central_difference(g: &Symbol, x: &[f64], beta: &[u32], h: f64) -> (C64, f64) {
    let d = x.len();
    let sizes: Vec<usize> = beta.iter().map(|&b| b as usize + 1).collect();
    let total: usize = sizes.iter().product();
    let mut acc = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    let mut y = vec![0.0; d];
    for mut idx in 0..total {
        let mut c = 1.0;
        for ax in (0..d).rev() {
            let n = beta[ax];
            let i = (idx % sizes[ax]) as u32;
            idx /= sizes[ax];
            y[ax] = x[ax] + (n as f64 / 2.0 - i as f64) * h;
            c *= binomial(n, i) * if i % 2 == 0 { 1.0 } else { -1.0 };
        }
        let v = g(&y);
        acc += v * c;
        scale += c.abs() * v.norm().max(1.0);
    }
    let order: u32 = beta.iter().sum();
    let hn = h.powi(order as i32);
    (acc / hn, scale / hn)
}

/// Richardson-extrapolated derivative estimate and its rounding floor.
pub fn derivative_estimate(g: &Symbol, x: &[f64], beta: &[u32], steps: [f64; 3]) -> (C64, f64) {
    let (d1, s1) = central_difference(g, x, beta, steps[0]);
    let (d2, s2) = central_difference(g, x, beta, steps[1]);
    let (d3, s3) = central_difference(g, x, beta, steps[2]);
    let value = (d3 * 64.0 - d2 * 20.0 + d1) / 45.0;
    let floor = 16.0 * f64::EPSILON * (64.0 * s3 + 20.0 * s2 + s1) / 45.0;
    (value, floor)
}

fn vanishes(g: &Symbol, x: &[f64], beta: &[u32], tol: f64) -> bool {
    let (v, floor) = derivative_estimate(g, x, beta, FD_STEPS);
    v.norm() <= tol.max(floor)
}

fn check_order(s_max: usize) -> Result<()> {
    if s_max > MAX_ORDER {
        return Err(Error::InvalidParams(format!("s_max must be <= {MAX_ORDER}")));
    }
    Ok(())
}

/// Largest `s ≤ s_max` with `D^β φ̂(k) = 0` for `[β] < s` and all nonzero
/// `k` with `‖k‖_∞ ≤ lattice_radius`.
pub fn strang_fix_order(phi: &Generator, s_max: usize, lattice_radius: i64) -> Result<usize> {
    strang_fix_order_with_tol(phi, s_max, lattice_radius, ZERO_TOL)
}

pub fn strang_fix_order_with_tol(phi: &Generator, s_max: usize, lattice_radius: i64, tol: f64) -> Result<usize> {
    check_order(s_max)?;
    if lattice_radius < 1 {
        return Err(Error::InvalidParams("lattice_radius must be >= 1".into()));
    }
    let d = phi.dim();
    let points: Vec<Vec<f64>> = lattice_cube(d, lattice_radius)
        .into_iter()
        .filter(|k| k.iter().any(|&v| v != 0))
        .map(|k| k.iter().map(|&v| v as f64).collect())
        .collect();
    let g = |xi: &[f64]| phi.eval_fourier(xi);
    for s in 0..s_max {
        let betas = multi_indices_of_order(d, s as u32);
        let ok = points
            .par_iter()
            .all(|k| betas.iter().all(|b| vanishes(&g, k, b, tol)));
        if !ok {
            return Ok(s);
        }
    }
    Ok(s_max)
}

/// The symbol `conj φ̂ · φ̂̃`.
pub fn pair_symbol(phi: &Generator, analyzer: &AnalysisFunctional, xi: &[f64]) -> C64 {
    phi.eval_fourier(xi).conj() * analyzer.fourier_symbol(xi)
}

/// Outcome of the weak-compatibility check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakCompat {
    pub order: usize,
    /// Set when a first derivative vanishes only in the symmetric sense
    /// (one-sided slopes disagree at the origin).
    pub symmetric_only: bool,
}

/// Largest `s ≤ s_max` with `D^β(1 − conj φ̂ φ̂̃)(0) = 0` for `[β] < s`.
pub fn weak_compat_order(phi: &Generator, analyzer: &AnalysisFunctional, s_max: usize) -> Result<usize> {
    Ok(weak_compat(phi, analyzer, s_max)?.order)
}

pub fn weak_compat(phi: &Generator, analyzer: &AnalysisFunctional, s_max: usize) -> Result<WeakCompat> {
    check_order(s_max)?;
    let d = phi.dim();
    if analyzer.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: analyzer.dim(),
        });
    }
    let g = |xi: &[f64]| ONE - pair_symbol(phi, analyzer, xi);
    let origin = vec![0.0; d];
    let mut order = s_max;
    for s in 0..s_max {
        if !multi_indices_of_order(d, s as u32).iter().all(|b| vanishes(&g, &origin, b, ZERO_TOL)) {
            order = s;
            break;
        }
    }
    let mut symmetric_only = false;
    if order >= 2 {
        let h = FD_STEPS[2];
        for ax in 0..d {
            let mut e = origin.clone();
            e[ax] = h;
            let right = (g(&e) - g(&origin)) / h;
            e[ax] = -h;
            let left = (g(&origin) - g(&e)) / h;
            if (right - left).norm() > 1e-3 * (1.0 + right.norm()).max(0.1) && (right - left).norm() > 1e-2 {
                symmetric_only = true;
            }
        }
    }
    Ok(WeakCompat { order, symmetric_only })
}

fn strict_holds(phi: &Generator, analyzer: &AnalysisFunctional, delta: f64, n: usize) -> bool {
    let d = phi.dim();
    let total = n.pow(d as u32);
    (0..total).into_par_iter().all(|mut idx| {
        let mut xi = vec![0.0; d];
        for ax in (0..d).rev() {
            let i = idx % n;
            idx /= n;
            xi[ax] = delta * (-0.5 + i as f64 / n as f64);
        }
        (pair_symbol(phi, analyzer, &xi) - ONE).norm() <= STRICT_TOL
    })
}

/// Largest grid-certified `δ ∈ (0, 1]` with `conj φ̂ φ̂̃ = 1` on `δT^d`,
/// or 0.
pub fn strict_compat_radius(phi: &Generator, analyzer: &AnalysisFunctional, grid: usize) -> Result<f64> {
    if grid < 64 {
        return Err(Error::InvalidParams("strict compatibility grid needs >= 64 points per axis".into()));
    }
    if analyzer.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            got: analyzer.dim(),
        });
    }
    const LADDER: i32 = 10;
    let mut found = None;
    for i in 0..=LADDER {
        let delta = 0.5f64.powi(i);
        if strict_holds(phi, analyzer, delta, grid) {
            found = Some(delta);
            break;
        }
    }
    let Some(mut lo) = found else {
        return Ok(0.0);
    };
    if lo == 1.0 {
        return Ok(1.0);
    }
    let mut hi = 2.0 * lo;
    while hi - lo > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if strict_holds(phi, analyzer, mid, grid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Sampling of the dyadic annuli for the Mikhlin diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusSpec {
    pub min_exponent: i32,
    pub max_exponent: i32,
    pub per_octave: usize,
    pub directions: usize,
}

impl Default for AnnulusSpec {
    fn default() -> Self {
        AnnulusSpec {
            min_exponent: -6,
            max_exponent: 6,
            per_octave: 4,
            directions: 16,
        }
    }
}

/// Default `max_order = ⌊d/2⌋ + 1`.
pub fn mikhlin_order(d: usize) -> usize {
    d / 2 + 1
}

/// Sampled `sup |ξ|^{[ν]} |D^ν h(ξ)|` over the annuli, `[ν] ≤ max_order`.
pub fn mikhlin_constant(h: &Symbol, dim: usize, max_order: usize, annuli: &AnnulusSpec) -> Result<f64> {
    if annuli.max_exponent < annuli.min_exponent || annuli.per_octave == 0 {
        return Err(Error::InvalidParams("empty annulus range".into()));
    }
    let mut points = Vec::new();
    let steps = (annuli.max_exponent - annuli.min_exponent) as usize * annuli.per_octave;
    for u in direction_net(dim, annuli.directions) {
        for i in 0..=steps {
            let r = 2f64.powf(annuli.min_exponent as f64 + i as f64 / annuli.per_octave as f64);
            points.push(u.iter().map(|c| c * r).collect::<Vec<f64>>());
        }
    }
    let betas: Vec<Vec<u32>> = (0..=max_order as u32).flat_map(|o| multi_indices_of_order(dim, o)).collect();
    let k = points
        .par_iter()
        .map(|xi| {
            let r = xi.iter().map(|t| t * t).sum::<f64>().sqrt();
            let steps = FD_STEPS.map(|s| s * r);
            betas
                .iter()
                .map(|b| {
                    let order: u32 = b.iter().sum();
                    let v = if order == 0 {
                        h(xi).norm()
                    } else {
                        derivative_estimate(h, xi, b, steps).0.norm()
                    };
                    r.powi(order as i32) * v
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(k)
}

/// The error symbol `η(ξ/δ)(1 − conj φ̂ φ̂̃)(ξ)/|ξ|^s`.
pub fn error_symbol<'a>(
    phi: &'a Generator,
    analyzer: &'a AnalysisFunctional,
    s: f64,
    delta: f64,
) -> impl Fn(&[f64]) -> C64 + Sync + 'a {
    move |xi: &[f64]| {
        let scaled: Vec<f64> = xi.iter().map(|t| t / delta).collect();
        let w = eta(&scaled);
        if w == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let r = xi.iter().map(|t| t * t).sum::<f64>().sqrt();
        (ONE - pair_symbol(phi, analyzer, xi)) * (w / r.powf(s))
    }
}

/// `‖Σ_l |φ(· + l)|‖_{L_p(T^d)}` with a bound on the truncated tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcalNorm {
    pub value: f64,
    pub tail_bound: f64,
}

const LCAL_MAX_TERMS: i64 = 4096;

pub fn lcal_p_norm(phi: &Generator, p: f64, grid: usize) -> Result<LcalNorm> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParams("p must be in [1, inf]".into()));
    }
    if grid < 2 {
        return Err(Error::InvalidParams("grid needs >= 2 points per axis".into()));
    }
    let d = phi.dim();
    let g = Grid::new(AxisBox::cube(d, 0.5), grid)?;
    // per-axis periodization; both admissible kinds are tensor products
    let (axis_sum, axis_tail): (Box<dyn Fn(f64) -> f64 + Sync>, f64) = match phi.kind() {
        GeneratorKind::BSplineTensor { n } => {
            let n = *n;
            let reach = (n as i64 + 1) / 2 + 1;
            (
                Box::new(move |t: f64| (-reach..=reach).map(|l| centered_bspline(n, t + l as f64)).sum()),
                0.0,
            )
        }
        GeneratorKind::TensorSincPower { n, a, .. } if *n >= 2 => {
            let env = phi.decay_envelope().expect("sinc power has an envelope");
            let (n, a, scale) = (*n, *a, env.scale);
            // tail beyond |l| > L: 2 scale (a/π)^n (L − 1/2)^{1−n}/(n − 1)
            let tail = |l: i64| 2.0 * scale * (a / std::f64::consts::PI).powi(n as i32) * (l as f64 - 0.5).powi(1 - n as i32) / (n as f64 - 1.0);
            let mut reach = 16;
            while reach < LCAL_MAX_TERMS && tail(reach) > 1e-10 * scale {
                reach *= 2;
            }
            (
                Box::new(move |t: f64| (-reach..=reach).map(|l| scale * sinc((t + l as f64) / a).abs().powi(n as i32)).sum()),
                tail(reach),
            )
        }
        _ => {
            return Err(Error::NonSummableDecay(format!(
                "{} has no summable decay envelope",
                phi.name()
            )))
        }
    };
    let coords = g.axis_coords(0);
    let table: Vec<f64> = coords.iter().map(|&t| axis_sum(t)).collect();
    let values: Vec<C64> = (0..g.len())
        .map(|mut idx| {
            let mut v = 1.0;
            for _ in 0..d {
                v *= table[idx % grid];
                idx /= grid;
            }
            C64::new(v, 0.0)
        })
        .collect();
    let value = grid_lp_norm(&values, &g, p);
    let sup = table.iter().copied().fold(0.0, f64::max);
    let tail_bound = (sup + axis_tail).powi(d as i32) - sup.powi(d as i32);
    Ok(LcalNorm { value, tail_bound })
}

/// Serializable summary of all checks for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub strang_fix: usize,
    pub weak_compat: usize,
    pub strict_delta: f64,
    pub mikhlin: Option<f64>,
    pub caveats: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub s_max: usize,
    pub lattice_radius: i64,
    pub strict_grid: usize,
    pub mikhlin: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            s_max: MAX_ORDER,
            lattice_radius: 2,
            strict_grid: 64,
            mikhlin: true,
        }
    }
}

pub fn check_conditions(phi: &Generator, analyzer: &AnalysisFunctional, opts: &CheckOptions) -> Result<ConditionReport> {
    let strang_fix = strang_fix_order(phi, opts.s_max, opts.lattice_radius)?;
    let weak = weak_compat(phi, analyzer, opts.s_max)?;
    let strict_delta = strict_compat_radius(phi, analyzer, opts.strict_grid)?;
    let mut caveats = Vec::new();
    if weak.symmetric_only {
        caveats.push("symmetric-derivative".to_string());
    }
    let mikhlin = if opts.mikhlin {
        let s = weak.order.min(2) as f64;
        let delta = if strict_delta > 0.0 { strict_delta } else { 1.0 };
        let h = error_symbol(phi, analyzer, s, delta);
        let spec = AnnulusSpec {
            directions: if phi.dim() == 1 { 2 } else { 16 },
            ..AnnulusSpec::default()
        };
        Some(mikhlin_constant(&h, phi.dim(), mikhlin_order(phi.dim()), &spec)?)
    } else {
        None
    };
    if mikhlin.is_some() {
        caveats.push("mikhlin-diagnostic".to_string());
    }
    Ok(ConditionReport {
        strang_fix,
        weak_compat: weak.order,
        strict_delta,
        mikhlin,
        caveats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzers::AxisAnalyzer;

    fn bspline(n: u32) -> Generator {
        Generator::bspline(n, 1).unwrap()
    }

    fn rational() -> Generator {
        Generator::new(GeneratorKind::RationalBandlimited, 1).unwrap()
    }

    #[test]
    fn strang_fix_bsplines() {
        for n in 1..=3 {
            assert_eq!(strang_fix_order(&bspline(n), 6, 2).unwrap(), n as usize);
        }
        assert_eq!(strang_fix_order(&Generator::sinc(1), 6, 2).unwrap(), 6);
        assert_eq!(strang_fix_order(&Generator::bspline(2, 2).unwrap(), 6, 1).unwrap(), 2);
    }

    #[test]
    fn strang_fix_tolerance_monotone() {
        let g = bspline(2);
        let mut last = 0;
        for tol in [1e-9, 1e-7, 1e-3, 10.0] {
            let s = strang_fix_order_with_tol(&g, 6, 1, tol).unwrap();
            assert!(s >= last);
            last = s;
        }
    }

    #[test]
    fn rejects_large_order() {
        assert!(strang_fix_order(&bspline(1), 7, 1).is_err());
        assert!(strang_fix_order(&bspline(1), 3, 0).is_err());
    }

    #[test]
    fn weak_orders() {
        let boxavg = AnalysisFunctional::BoxAverage { dim: 1 };
        let dirac = AnalysisFunctional::Dirac { dim: 1 };
        assert_eq!(weak_compat_order(&Generator::sinc(1), &boxavg, 6).unwrap(), 2);
        assert_eq!(weak_compat_order(&rational(), &boxavg, 6).unwrap(), 6);
        assert_eq!(weak_compat_order(&Generator::sinc(1), &dirac, 6).unwrap(), 6);
        assert_eq!(weak_compat_order(&bspline(2), &boxavg, 6).unwrap(), 2);
        assert_eq!(weak_compat_order(&bspline(2), &dirac, 6).unwrap(), 2);
    }

    #[test]
    fn weak_order_detects_first_order_mismatch() {
        let d = AnalysisFunctional::DiracPlusDerivative { beta: vec![1] };
        assert_eq!(weak_compat_order(&Generator::sinc(1), &d, 6).unwrap(), 1);
    }

    #[test]
    fn kink_symbol_carries_caveat() {
        // Fourier profile 1 − |ξ| near the origin
        let prof = crate::generators::FourierProfile::new(
            "kink",
            std::sync::Arc::new(|xi: &[f64]| C64::new((1.0 - 4.0 * xi[0].abs()).max(0.0), 0.0)),
            AxisBox::cube(1, 0.25),
            vec![vec![0.0]],
        );
        let g = Generator::new(GeneratorKind::FourierProfile(prof), 1).unwrap();
        let w = weak_compat(&g, &AnalysisFunctional::Dirac { dim: 1 }, 6).unwrap();
        assert!(w.order >= 1);
        let smooth = weak_compat(&Generator::sinc(1), &AnalysisFunctional::BoxAverage { dim: 1 }, 6).unwrap();
        assert!(!smooth.symmetric_only);
        if w.order >= 2 {
            assert!(w.symmetric_only);
        }
    }

    #[test]
    fn strict_radii() {
        let boxavg = AnalysisFunctional::BoxAverage { dim: 1 };
        let dirac = AnalysisFunctional::Dirac { dim: 1 };
        assert_eq!(strict_compat_radius(&rational(), &boxavg, 64).unwrap(), 1.0);
        assert_eq!(strict_compat_radius(&Generator::sinc(1), &dirac, 64).unwrap(), 1.0);
        assert_eq!(strict_compat_radius(&Generator::sinc(1), &boxavg, 64).unwrap(), 0.0);
        assert!(strict_compat_radius(&rational(), &boxavg, 8).is_err());
    }

    #[test]
    fn strict_radius_of_narrow_band() {
        // φ̂ = 1 on [-0.3, 0.3) and smaller outside: maximal δ = 0.6
        let prof = crate::generators::FourierProfile::new(
            "plateau",
            std::sync::Arc::new(|xi: &[f64]| C64::new(if xi[0].abs() <= 0.3 { 1.0 } else { 0.5 }, 0.0)),
            AxisBox::cube(1, 0.5),
            vec![vec![-0.3, 0.3]],
        );
        let g = Generator::new(GeneratorKind::FourierProfile(prof), 1).unwrap();
        let r = strict_compat_radius(&g, &AnalysisFunctional::Dirac { dim: 1 }, 64).unwrap();
        assert!(r > 0.5 && r <= 0.6 + 1e-6, "{r}");
        // strict compatibility implies weak compatibility of every order
        assert_eq!(weak_compat_order(&g, &AnalysisFunctional::Dirac { dim: 1 }, 6).unwrap(), 6);
    }

    #[test]
    fn two_dimensional_mixed_pair() {
        let phi = Generator::sinc(2);
        let mixed = AnalysisFunctional::MixedTensor {
            axes: vec![AxisAnalyzer::Dirac, AxisAnalyzer::BoxAverage],
        };
        assert_eq!(weak_compat_order(&phi, &mixed, 6).unwrap(), 2);
        assert_eq!(strict_compat_radius(&phi, &mixed, 64).unwrap(), 0.0);
    }

    #[test]
    fn mikhlin_examples() {
        let spec = AnnulusSpec {
            directions: 2,
            ..AnnulusSpec::default()
        };
        let one = |_: &[f64]| ONE;
        assert_eq!(mikhlin_constant(&one, 1, 1, &spec).unwrap(), 1.0);
        let sign = |xi: &[f64]| C64::new(xi[0].signum(), 0.0);
        let k = mikhlin_constant(&sign, 1, 1, &spec).unwrap();
        assert!((k - 1.0).abs() < 1e-9);
        let phi = Generator::sinc(1);
        let an = AnalysisFunctional::BoxAverage { dim: 1 };
        let h = error_symbol(&phi, &an, 2.0, 1.0);
        let k = mikhlin_constant(&h, 1, 1, &spec).unwrap();
        assert!(k.is_finite() && k > 0.0);
        // the symbol extends continuously to 0 with value π²/6
        let near = h(&[1e-4]).re;
        assert!((near - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-6);
    }

    /// Direct periodization by brute-force summation.
    fn periodized_sup(n: u32) -> f64 {
        (0..=200)
            .map(|i| {
                let t = -0.5 + i as f64 / 200.0;
                (-10..=10).map(|l| centered_bspline(n, t + l as f64)).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn lcal_partition_of_unity() {
        for n in [1, 2, 3] {
            let v = lcal_p_norm(&bspline(n), f64::INFINITY, 201).unwrap();
            assert!((v.value - 1.0).abs() < 1e-12);
            assert!((v.value - periodized_sup(n)).abs() < 1e-12);
            assert_eq!(v.tail_bound, 0.0);
        }
        let v = lcal_p_norm(&Generator::bspline(2, 2).unwrap(), 2.0, 65).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lcal_refuses_sinc() {
        assert!(matches!(lcal_p_norm(&Generator::sinc(1), 2.0, 64), Err(Error::NonSummableDecay(_))));
        assert!(matches!(lcal_p_norm(&rational(), 2.0, 64), Err(Error::NonSummableDecay(_))));
    }

    #[test]
    fn lcal_sinc_power_tail() {
        let g = Generator::new(
            GeneratorKind::TensorSincPower {
                n: 4,
                a: 4.0,
                constant: None,
            },
            1,
        )
        .unwrap();
        let v = lcal_p_norm(&g, 1.0, 129).unwrap();
        // ∫_T Σ_l |φ(x+l)| = ∫_R |φ| = ∫ φ = φ̂(0) = 1 for a nonnegative φ
        assert!((v.value - 1.0).abs() < 1e-8, "{}", v.value);
        assert!(v.tail_bound < 1e-8);
        // spatial evaluation agrees with the summed profile
        let x = 0.37;
        let direct = g.eval_spatial(&[x]).unwrap().re;
        let scale = g.decay_envelope().unwrap().scale;
        assert!((direct - scale * sinc(x / 4.0).powi(4)).abs() < 1e-12);
    }

    #[test]
    fn report_serializes() {
        let r = check_conditions(&rational(), &AnalysisFunctional::BoxAverage { dim: 1 }, &CheckOptions::default()).unwrap();
        assert_eq!(r.strang_fix, 6);
        assert_eq!(r.weak_compat, 6);
        assert_eq!(r.strict_delta, 1.0);
        let json = serde_json::to_string(&r).unwrap();
        for key in ["strang_fix", "weak_compat", "strict_delta", "mikhlin", "caveats"] {
            assert!(json.contains(key));
        }
    }
}
