//! Config-driven experiments: per-level error tables, rate fits, two-sided
//! ratio checks and band-limited reconstruction checks.

mod config;
mod report;

pub use config::{catalog, ExperimentConfig, ExperimentSection, FunctionConfig, Metric, OperatorConfig, OutputSection, PathChoice};
pub use report::{emit, rate_fit, two_sided_ratio, ExperimentReport, Format, LevelRow, Provenance, RateFit, RatioRange, Truncation};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::conditions::{check_conditions, strict_compat_radius, CheckOptions};
use crate::error::{Error, Result};
use crate::function::{SpectralSupport, TestFunction};
use crate::lattice::{mat_vec, DilationMatrix};
use crate::numerics::{Grid, C64};
use crate::quasiprojection::{error_lp_values, OperatorSpec};
use crate::smoothness::{best_approx, modulus, ModulusSpec};

const DEFAULT_WINDOW: i64 = 32;

fn p_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(cfg.canonical().as_bytes()))
}

/// Grid values of `Q_j f` together with how they were obtained.
pub struct Approximation {
    pub values: Vec<C64>,
    pub path: PathChoice,
    pub truncation: Truncation,
}

pub fn approximate_on_grid(
    op: &OperatorSpec,
    f: &TestFunction,
    grid: &Grid,
    choice: PathChoice,
    window: Option<i64>,
) -> Result<Approximation> {
    let spectral_ok = op.generator.fourier_support().is_some()
        && f.spectrum().and_then(|s| s.support.bounding_box()).is_some();
    let use_spectral = match choice {
        PathChoice::Spectral => true,
        PathChoice::Spatial => false,
        PathChoice::Auto => spectral_ok,
    };
    if use_spectral {
        let ev = op.evaluate_grid_spectral(f, grid)?;
        Ok(Approximation {
            values: ev.values,
            path: PathChoice::Spectral,
            truncation: Truncation {
                spectral_nodes: Some(ev.nodes_per_axis),
                ..Truncation::default()
            },
        })
    } else {
        let w = window.or_else(|| op.exact_window()).unwrap_or(DEFAULT_WINDOW);
        let ev = op.evaluate_grid_spatial(f, grid, w)?;
        Ok(Approximation {
            values: ev.values,
            path: PathChoice::Spatial,
            truncation: Truncation {
                window: Some(ev.window),
                coefficients: Some(ev.coefficients),
                ..Truncation::default()
            },
        })
    }
}

fn path_name(p: PathChoice) -> String {
    match p {
        PathChoice::Auto => "auto",
        PathChoice::Spectral => "spectral",
        PathChoice::Spatial => "spatial",
    }
    .into()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let base = cfg.operator_spec()?;
    let f = cfg.test_function()?;
    let grid = cfg.grid()?;
    let metrics = cfg.metrics()?;
    let choice = cfg.path_choice()?;
    let e = &cfg.experiment;
    let p = e.p;
    let m = &base.dilation;
    let levels: Vec<i32> = if metrics.is_empty() { Vec::new() } else { (e.j_min..=e.j_max).collect() };

    // E_{M^ν}(f)_p shared by the best-approximation and Besov columns
    let mut nus: Vec<i32> = Vec::new();
    if metrics.contains(&Metric::Besov) {
        nus.extend(e.j_min..e.j_max + e.besov_terms as i32);
    } else if metrics.contains(&Metric::BestApprox) {
        nus.extend(levels.iter().copied());
    }
    let best: Vec<(i32, f64)> = nus
        .par_iter()
        .map(|&nu| best_approx(&f, &m.power(nu), p, &grid).map(|b| (nu, b.ln_value)))
        .collect::<Result<_>>()?;
    let ln_best = |nu: i32| best.iter().find(|b| b.0 == nu).map(|b| b.1);

    let rows: Vec<LevelRow> = levels
        .par_iter()
        .map(|&j| -> Result<LevelRow> {
            let op = base.with_level(j)?;
            let mut row = LevelRow {
                j,
                error: None,
                modulus: None,
                best_approx: None,
                ratio: None,
                besov_tail: None,
                grid_spacing: grid.spacing(),
                path: None,
                truncation: Truncation::default(),
            };
            if metrics.contains(&Metric::Error) {
                let approx = approximate_on_grid(&op, &f, &grid, choice, e.window)?;
                row.error = Some(error_lp_values(&f, &approx.values, p, &grid)?.value);
                row.path = Some(path_name(approx.path));
                row.truncation = approx.truncation;
            }
            if metrics.contains(&Metric::Modulus) {
                let spec = ModulusSpec::new(e.modulus_order, m.power(-j), p);
                let est = modulus(&f, &spec, &grid)?;
                row.modulus = Some(est.value);
                row.truncation.series_tail = Some(est.series_tail);
            }
            if metrics.contains(&Metric::BestApprox) {
                row.best_approx = ln_best(j).map(f64::exp);
            }
            if metrics.contains(&Metric::Besov) {
                let mut acc = 0.0;
                for nu in j..j + e.besov_terms as i32 {
                    let alpha = base.analyzer.alpha_bound(&DilationMatrix::from_matrix(m.power(nu))?)?;
                    let weight = if p.is_infinite() { 0.0 } else { (nu - j) as f64 / p * m.det_abs().ln() };
                    let ln_e = ln_best(nu).expect("cached");
                    acc += (weight + alpha.ln() + ln_e).exp();
                }
                row.besov_tail = Some(acc);
            }
            if let (Some(err), Some(md)) = (row.error, row.modulus) {
                if md > 0.0 {
                    row.ratio = Some(err / md);
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut notes = Vec::new();
    let column = |get: fn(&LevelRow) -> Option<f64>| -> Option<Vec<(f64, f64)>> {
        rows.iter().map(|r| get(r).map(|v| (r.j as f64, v))).collect()
    };
    let mut fit = |name: &str, get: fn(&LevelRow) -> Option<f64>| -> Option<RateFit> {
        let pts = column(get)?;
        if pts.len() < 3 {
            return None;
        }
        match rate_fit(&pts) {
            Ok(f) => Some(f),
            Err(err) => {
                notes.push(format!("{name} fit skipped: {err}"));
                None
            }
        }
    };
    let error_fit = fit("error", |r| r.error);
    let modulus_fit = fit("modulus", |r| r.modulus);
    let ratio_range = if metrics.contains(&Metric::Error) && metrics.contains(&Metric::Modulus) && !rows.is_empty() {
        let errs: Vec<f64> = rows.iter().map(|r| r.error.unwrap_or(0.0)).collect();
        let mods: Vec<f64> = rows.iter().map(|r| r.modulus.unwrap_or(0.0)).collect();
        match two_sided_ratio(&errs, &mods) {
            Ok(r) => Some(r),
            Err(err) => {
                notes.push(format!("ratio range skipped: {err}"));
                None
            }
        }
    } else {
        None
    };

    let conditions = if e.conditions {
        let mut c = check_conditions(&base.generator, &base.analyzer, &CheckOptions::default())?;
        if let Some(k) = c.mikhlin {
            if !k.is_finite() {
                c.mikhlin = None;
                c.caveats.push("mikhlin-unbounded".into());
            }
        }
        Some(c)
    } else {
        None
    };

    Ok(ExperimentReport {
        rows,
        error_fit,
        modulus_fit,
        ratio_range,
        conditions,
        provenance: Provenance {
            config_hash: config_hash(cfg),
            version: env!("CARGO_PKG_VERSION").into(),
            operator: format!(
                "{} / {} / M={:?}",
                base.generator.name(),
                base.analyzer.name(),
                cfg.operator.dilation
            ),
            function: f.name().to_string(),
            p: p_label(p),
            grid_points: grid.points.clone(),
            box_half_width: e.half_width,
            modulus_order: e.modulus_order,
        },
        notes,
    })
}

/// Outcome of a band-limited reconstruction check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WksReport {
    pub level: i32,
    pub delta: f64,
    pub strict_radius: f64,
    /// Sup-norm error of the spectral evaluation on the grid.
    pub spectral_error: f64,
    pub spectral_nodes: Vec<usize>,
    /// Sup error of cubic partial sums `‖k‖_∞ ≤ n` at sample points.
    pub truncation: Vec<TruncationError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationError {
    pub radius: i64,
    pub error: f64,
}

const WKS_SAMPLES: usize = 17;

/// Checks `supp f̂ ⊂ δ M^{*j} T^d` and strict compatibility at `δ`, then
/// measures the reconstruction error of `Q_j f`.
pub fn wks_check(op: &OperatorSpec, delta: f64, f: &TestFunction, grid: &Grid, radii: &[i64]) -> Result<WksReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParams("delta must be in (0, 1]".into()));
    }
    let strict = strict_compat_radius(&op.generator, &op.analyzer, 64)?;
    if strict < delta {
        return Err(Error::HypothesisViolated(format!(
            "pair is strictly compatible only up to delta = {strict}, requested {delta}"
        )));
    }
    let support = match f.spectrum().map(|s| &s.support) {
        Some(SpectralSupport::Compact(b)) => b.clone(),
        _ => {
            return Err(Error::HypothesisViolated(format!("{} is not band-limited", f.name())));
        }
    };
    let back = op.dilation.adjoint_power(-op.level);
    for corner in support.corners() {
        let u = mat_vec(&back, &corner);
        if u.iter().any(|t| t.abs() > delta / 2.0 + 1e-12) {
            return Err(Error::HypothesisViolated(format!(
                "spectrum of {} leaves delta M*^j T^d at corner {corner:?}",
                f.name()
            )));
        }
    }
    let ev = op.evaluate_grid_spectral(f, grid)?;
    let spectral_error = error_lp_values(f, &ev.values, f64::INFINITY, grid)?.value;

    let step = (grid.len() / WKS_SAMPLES).max(1);
    let samples: Vec<Vec<f64>> = (0..grid.len()).step_by(step).map(|i| grid.point(i)).collect();
    let mj = op.dilation.power(op.level);
    let amp = op.dilation.det_abs().powf(op.level as f64 / 2.0);
    let mut truncation = Vec::with_capacity(radii.len());
    for &n in radii {
        let coeffs = op.coefficients(f, n)?;
        let err = samples
            .par_iter()
            .map(|x| -> Result<f64> {
                let y = mat_vec(&mj, x);
                let mut terms = Vec::with_capacity(coeffs.len());
                for (k, c) in &coeffs {
                    let z: Vec<f64> = y.iter().zip(k).map(|(a, &b)| a + b as f64).collect();
                    terms.push(*c * op.generator.eval_spatial(&z)? * amp);
                }
                Ok((crate::numerics::pairwise_sum_c(&terms) - f.eval(x)).norm())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        truncation.push(TruncationError { radius: n, error: err });
    }
    Ok(WksReport {
        level: op.level,
        delta,
        strict_radius: strict,
        spectral_error,
        spectral_nodes: ev.nodes_per_axis,
        truncation,
    })
}

/// [`wks_check`] driven by a configuration (level `j_min`, `delta`
/// defaulting to 1).
pub fn reconstruct(cfg: &ExperimentConfig) -> Result<WksReport> {
    cfg.validate()?;
    let op = cfg.operator_spec()?;
    let f = cfg.test_function()?;
    let grid = cfg.grid()?;
    wks_check(
        &op,
        cfg.experiment.delta.unwrap_or(1.0),
        &f,
        &grid,
        &cfg.experiment.truncation_radii,
    )
}
