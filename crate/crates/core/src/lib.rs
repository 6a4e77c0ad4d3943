//! Multivariate quasi-projection operators with matrix dilations.
//!
//! `Q_j f = Σ_k ⟨f, φ̃_{jk}⟩ φ_{jk}` with `φ_{jk}(x) = m^{j/2} φ(M^j x + k)`,
//! evaluated either by truncated spatial sums or, for band-limited data,
//! through its exact Fourier transform. Around the operator sit the metrics
//! used to measure approximation quality (moduli of smoothness, best
//! approximation, Besov-type partial norms) and numerical checks of the
//! structural conditions relating `φ` and `φ̃`.
//!
//! Conventions: `T^d = [-1/2, 1/2)^d`, `sinc x = sin(πx)/(πx)` and
//! `f̂(ξ) = ∫ f(x) e^{-2πi(x,ξ)} dx`.

pub mod analyzers;
pub mod conditions;
pub mod error;
pub mod function;
pub mod generators;
pub mod harness;
pub mod lattice;
pub mod numerics;
pub mod quasiprojection;
pub mod smoothness;

pub use analyzers::{AnalysisFunctional, AxisAnalyzer};
pub use error::{Error, Result};
pub use function::TestFunction;
pub use generators::{Generator, GeneratorKind};
pub use lattice::DilationMatrix;
pub use numerics::{AxisBox, Grid, C64};
pub use quasiprojection::OperatorSpec;

