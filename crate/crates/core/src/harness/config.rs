//! TOML experiment configuration and the name-based catalog.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analyzers::{AnalysisFunctional, AxisAnalyzer};
use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::generators::{Generator, GeneratorKind};
use crate::lattice::DilationMatrix;
use crate::numerics::{AxisBox, Grid};
use crate::quasiprojection::OperatorSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operator: OperatorConfig,
    pub function: FunctionConfig,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    /// `sinc`, `bspline`, `sinc_power`, `bochner_riesz` or `rational_bandlimited`.
    pub generator: String,
    /// B-spline order or sinc power.
    #[serde(default)]
    pub order: Option<u32>,
    /// Dilation `a` of the sinc power.
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub constant: Option<f64>,
    /// Bochner-Riesz smoothness `s`.
    #[serde(default)]
    pub smoothness: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    /// `dirac`, `dirac_derivative`, `box_average`, `mixed`, `kernel` or
    /// `dirac_plus_derivative`.
    pub analyzer: String,
    #[serde(default)]
    pub beta: Option<Vec<u32>>,
    /// Per-axis `dirac` / `box_average` for `mixed`.
    #[serde(default)]
    pub axes: Option<Vec<String>>,
    /// B-spline order of the `kernel` analyzer.
    #[serde(default)]
    pub kernel_order: Option<u32>,
    /// Rows of `M`.
    pub dilation: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionConfig {
    /// `gaussian`, `band_bump`, `hat` or `sinc`.
    pub id: String,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub shift: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub j_min: i32,
    pub j_max: i32,
    pub p: f64,
    /// Evaluation box `[-half_width, half_width]^d`.
    pub half_width: f64,
    /// Grid points per axis.
    pub grid: usize,
    /// Any of `error`, `modulus`, `best_approx`, `besov`.
    pub metrics: Vec<String>,
    pub modulus_order: f64,
    /// `auto`, `spectral` or `spatial`.
    pub path: String,
    /// Spatial index window; defaults to the generator support.
    pub window: Option<i64>,
    pub besov_terms: usize,
    pub conditions: bool,
    /// Band fraction for reconstruction runs.
    pub delta: Option<f64>,
    pub truncation_radii: Vec<i64>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            j_min: 1,
            j_max: 1,
            p: 2.0,
            half_width: 8.0,
            grid: 1024,
            metrics: vec!["error".into()],
            modulus_order: 2.0,
            path: "auto".into(),
            window: None,
            besov_terms: 8,
            conditions: true,
            delta: None,
            truncation_radii: vec![4, 8, 16, 32],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub path: Option<String>,
    /// `json` or `csv`.
    pub format: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            path: None,
            format: "json".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Error,
    Modulus,
    BestApprox,
    Besov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathChoice {
    Auto,
    Spectral,
    Spatial,
}

fn cfg_err<T>(field: &str, message: impl Into<String>) -> Result<T> {
    Err(Error::config(field, message))
}

fn rewrap<T>(field: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config { .. } => e,
        other => Error::config(field, other.to_string()),
    })
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Canonical TOML text; hashed for provenance.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let op = self.operator_spec()?;
        let f = self.test_function()?;
        if f.dim() != op.dim() {
            return cfg_err(
                "function.id",
                format!("function dimension {} differs from dilation dimension {}", f.dim(), op.dim()),
            );
        }
        let e = &self.experiment;
        if e.j_min < 0 {
            return cfg_err("experiment.j_min", "must be >= 0");
        }
        if e.j_max < e.j_min {
            return cfg_err("experiment.j_max", "must be >= j_min");
        }
        if !(e.p >= 1.0) {
            return cfg_err("experiment.p", "must be in [1, inf]");
        }
        if !(e.half_width > 0.0 && e.half_width.is_finite()) {
            return cfg_err("experiment.half_width", "must be positive");
        }
        if e.grid < 2 {
            return cfg_err("experiment.grid", "needs >= 2 points per axis");
        }
        if !(e.modulus_order > 0.0) {
            return cfg_err("experiment.modulus_order", "must be > 0");
        }
        if e.besov_terms == 0 {
            return cfg_err("experiment.besov_terms", "must be >= 1");
        }
        if let Some(w) = e.window {
            if w < 0 {
                return cfg_err("experiment.window", "must be >= 0");
            }
        }
        if let Some(d) = e.delta {
            if !(d > 0.0 && d <= 1.0) {
                return cfg_err("experiment.delta", "must be in (0, 1]");
            }
        }
        if e.truncation_radii.iter().any(|&r| r < 0) {
            return cfg_err("experiment.truncation_radii", "radii must be >= 0");
        }
        self.metrics()?;
        self.path_choice()?;
        match self.output.format.as_str() {
            "json" | "csv" => {}
            other => return cfg_err("output.format", format!("unknown format `{other}`")),
        }
        Ok(())
    }

    pub fn metrics(&self) -> Result<Vec<Metric>> {
        let mut out = Vec::new();
        for m in &self.experiment.metrics {
            let v = match m.as_str() {
                "error" => Metric::Error,
                "modulus" => Metric::Modulus,
                "best_approx" => Metric::BestApprox,
                "besov" => Metric::Besov,
                other => return cfg_err("experiment.metrics", format!("unknown metric `{other}`")),
            };
            if !out.contains(&v) {
                out.push(v);
            }
        }
        Ok(out)
    }

    pub fn path_choice(&self) -> Result<PathChoice> {
        match self.experiment.path.as_str() {
            "auto" => Ok(PathChoice::Auto),
            "spectral" => Ok(PathChoice::Spectral),
            "spatial" => Ok(PathChoice::Spatial),
            other => cfg_err("experiment.path", format!("unknown path `{other}`")),
        }
    }

    pub fn dilation(&self) -> Result<DilationMatrix> {
        rewrap("operator.dilation", DilationMatrix::new(&self.operator.dilation))
    }

    pub fn generator(&self, dim: usize) -> Result<Generator> {
        let o = &self.operator;
        let need_order = |what: &str| -> Result<u32> {
            o.order
                .ok_or_else(|| Error::config("operator.order", format!("required for {what}")))
        };
        let kind = match o.generator.as_str() {
            "sinc" => return Ok(Generator::sinc(dim)),
            "bspline" => GeneratorKind::BSplineTensor {
                n: need_order("bspline")?,
            },
            "sinc_power" => GeneratorKind::TensorSincPower {
                n: need_order("sinc_power")?,
                a: o.scale.unwrap_or(1.0),
                constant: o.constant,
            },
            "bochner_riesz" => GeneratorKind::BochnerRiesz {
                s: o.smoothness.unwrap_or(2.0),
                gamma: o.gamma.unwrap_or(1.0),
            },
            "rational_bandlimited" => GeneratorKind::RationalBandlimited,
            other => return cfg_err("operator.generator", format!("unknown generator `{other}`")),
        };
        rewrap("operator.generator", Generator::new(kind, dim))
    }

    pub fn analyzer(&self, dim: usize) -> Result<AnalysisFunctional> {
        let o = &self.operator;
        let beta = || -> Result<Vec<u32>> {
            let b = o
                .beta
                .clone()
                .ok_or_else(|| Error::config("operator.beta", "required for derivative analyzers"))?;
            if b.len() != dim {
                return cfg_err("operator.beta", format!("expected {dim} entries"));
            }
            Ok(b)
        };
        Ok(match o.analyzer.as_str() {
            "dirac" => AnalysisFunctional::Dirac { dim },
            "box_average" => AnalysisFunctional::BoxAverage { dim },
            "dirac_derivative" => AnalysisFunctional::DiracDerivative { beta: beta()? },
            "dirac_plus_derivative" => AnalysisFunctional::DiracPlusDerivative { beta: beta()? },
            "mixed" => {
                let axes = o
                    .axes
                    .as_ref()
                    .ok_or_else(|| Error::config("operator.axes", "required for mixed analyzer"))?;
                if axes.len() != dim {
                    return cfg_err("operator.axes", format!("expected {dim} entries"));
                }
                let axes = axes
                    .iter()
                    .map(|a| match a.as_str() {
                        "dirac" => Ok(AxisAnalyzer::Dirac),
                        "box_average" => Ok(AxisAnalyzer::BoxAverage),
                        other => cfg_err("operator.axes", format!("unknown axis analyzer `{other}`")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                AnalysisFunctional::MixedTensor { axes }
            }
            "kernel" => {
                let n = o.kernel_order.unwrap_or(2);
                let k = rewrap("operator.kernel_order", Generator::bspline(n, dim))?;
                rewrap("operator.analyzer", AnalysisFunctional::kernel(k))?
            }
            other => return cfg_err("operator.analyzer", format!("unknown analyzer `{other}`")),
        })
    }

    /// The operator at level `j_min`.
    pub fn operator_spec(&self) -> Result<OperatorSpec> {
        let m = self.dilation()?;
        let d = m.dim();
        let g = self.generator(d)?;
        let a = self.analyzer(d)?;
        rewrap("operator", OperatorSpec::new(g, a, m, self.experiment.j_min.max(0)))
    }

    pub fn test_function(&self) -> Result<TestFunction> {
        let d = self.operator.dilation.len();
        let fc = &self.function;
        let f = match fc.id.as_str() {
            "gaussian" => TestFunction::gaussian(d),
            "band_bump" => rewrap("function.rho", TestFunction::band_bump(d, fc.rho.unwrap_or(0.4)))?,
            "hat" => TestFunction::hat(d),
            "sinc" => TestFunction::sinc(d),
            other => return cfg_err("function.id", format!("unknown test function `{other}`")),
        };
        match &fc.shift {
            Some(s) => rewrap("function.shift", f.translated(s)),
            None => Ok(f),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        let d = self.operator.dilation.len();
        rewrap(
            "experiment.grid",
            Grid::new(AxisBox::cube(d, self.experiment.half_width), self.experiment.grid),
        )
    }
}

/// Names accepted by the configuration, grouped by section.
pub fn catalog() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        (
            "generators",
            vec!["sinc", "bspline", "sinc_power", "bochner_riesz", "rational_bandlimited"],
        ),
        (
            "analyzers",
            vec!["dirac", "dirac_derivative", "box_average", "mixed", "kernel", "dirac_plus_derivative"],
        ),
        ("functions", vec!["gaussian", "band_bump", "hat", "sinc"]),
        ("metrics", vec!["error", "modulus", "best_approx", "besov"]),
    ]
}
