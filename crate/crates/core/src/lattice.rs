//! Dilation matrices and the linear algebra around them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

const ISOTROPY_TOL: f64 = 1e-10;

/// A real square matrix whose eigenvalues all exceed one in modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationMatrix {
    entries: DMatrix<f64>,
    inverse: DMatrix<f64>,
    det_abs: f64,
    isotropic: bool,
    eigen_moduli: Vec<f64>,
}

impl DilationMatrix {
    /// Builds from row-major rows.
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, |r| r.len()),
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_matrix(DMatrix::from_row_slice(n, n, &flat))
    }

    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        let d = entries.nrows();
        if d > MAX_DIM {
            return Err(Error::InvalidParams(format!("dimension {d} exceeds {MAX_DIM}")));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite matrix entry".into()));
        }
        let det = entries.determinant();
        if det == 0.0 {
            return Err(Error::Singular);
        }
        let inverse = entries.clone().try_inverse().ok_or(Error::Singular)?;
        let eigen_moduli: Vec<f64> = entries
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .collect();
        // Expansiveness: spectral radius of M^{-1} below one.
        let inv_radius = inverse
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if inv_radius >= 1.0 - 1e-14 {
            let smallest = eigen_moduli.iter().copied().fold(f64::INFINITY, f64::min);
            return Err(Error::NotExpansive { modulus: smallest });
        }
        let max_mod = eigen_moduli.iter().copied().fold(0.0, f64::max);
        let min_mod = eigen_moduli.iter().copied().fold(f64::INFINITY, f64::min);
        let isotropic = (max_mod - min_mod) <= ISOTROPY_TOL * max_mod;
        Ok(DilationMatrix {
            entries,
            inverse,
            det_abs: det.abs(),
            isotropic,
            eigen_moduli,
        })
    }

    /// `c·I` in dimension `d`.
    pub fn scalar(d: usize, c: f64) -> Result<Self> {
        Self::from_matrix(DMatrix::from_diagonal_element(d, d, c))
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::from_matrix(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `m = |det M|`.
    pub fn det_abs(&self) -> f64 {
        self.det_abs
    }

    pub fn is_isotropic(&self) -> bool {
        self.isotropic
    }

    pub fn eigen_moduli(&self) -> &[f64] {
        &self.eigen_moduli
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.entries[(i, j)] == 0.0))
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)]).collect()
    }

    /// `M^j`; negative `j` uses the inverse.
    pub fn power(&self, j: i32) -> DMatrix<f64> {
        let base = if j < 0 { &self.inverse } else { &self.entries };
        matrix_power(base, j.unsigned_abs())
    }

    /// `(M^*)^j = (M^T)^j`.
    pub fn adjoint_power(&self, j: i32) -> DMatrix<f64> {
        self.power(j).transpose()
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }
}

/// Non-negative integer power by repeated squaring.
pub fn matrix_power(a: &DMatrix<f64>, mut e: u32) -> DMatrix<f64> {
    let d = a.nrows();
    let mut result = DMatrix::identity(d, d);
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Spectral norm (largest singular value).
pub fn operator_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn mat_vec(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let d = a.nrows();
    (0..d)
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum())
        .collect()
}

/// `a` applied to an integer lattice point.
pub fn mat_vec_int(a: &DMatrix<f64>, k: &[i64]) -> Vec<f64> {
    let x: Vec<f64> = k.iter().map(|&v| v as f64).collect();
    mat_vec(a, &x)
}

pub fn is_diagonal(a: &DMatrix<f64>) -> bool {
    let d = a.nrows();
    (0..d).all(|i| (0..a.ncols()).all(|j| i == j || a[(i, j)] == 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_dilation() {
        let m = DilationMatrix::new(&[vec![2.0]]).unwrap();
        assert_eq!(m.det_abs(), 2.0);
        assert!(m.is_isotropic());
        assert_eq!(m.power(3)[(0, 0)], 8.0);
    }

    #[test]
    fn diagonal_dilation_is_anisotropic() {
        let m = DilationMatrix::diagonal(&[2.0, 3.0]).unwrap();
        assert!((m.det_abs() - 6.0).abs() < 1e-14);
        assert!(!m.is_isotropic());
        let inv = m.power(-1);
        assert!((inv[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((inv[(1, 1)] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(inv[(0, 1)], 0.0);
    }

    #[test]
    fn rejects_unit_eigenvalue() {
        let err = DilationMatrix::new(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap_err();
        assert!(matches!(err, Error::NotExpansive { .. }));
    }

    #[test]
    fn rejects_singular_and_non_square() {
        assert!(matches!(
            DilationMatrix::new(&[vec![0.0, 0.0], vec![0.0, 2.0]]).unwrap_err(),
            Error::Singular
        ));
        assert!(matches!(
            DilationMatrix::new(&[vec![2.0, 0.0]]).unwrap_err(),
            Error::NotSquare { .. }
        ));
    }

    #[test]
    fn quincunx_is_isotropic() {
        let m = DilationMatrix::new(&[vec![1.0, -1.0], vec![1.0, 1.0]]).unwrap();
        assert!(m.is_isotropic());
        assert!((m.det_abs() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rotation_like_non_expansive_rejected() {
        // eigenvalues ±i have modulus 1
        let err = DilationMatrix::new(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::NotExpansive { .. }));
    }

    #[test]
    fn power_zero_is_identity() {
        let m = DilationMatrix::new(&[vec![2.0, 1.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(m.power(0), DMatrix::identity(2, 2));
    }

    #[test]
    fn operator_norms() {
        let d = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        assert!((operator_norm(&d) - 3.0).abs() < 1e-12);
        assert!((operator_norm(&DMatrix::identity(3, 3)) - 1.0).abs() < 1e-12);
        let n = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        // 2x2 oracle: σ_max² = (tr + sqrt(tr² - 4 det²)) / 2 of AᵀA
        let tr: f64 = n.iter().map(|v| v * v).sum();
        let det = n.determinant();
        let oracle = ((tr + (tr * tr - 4.0 * det * det).sqrt()) / 2.0).sqrt();
        assert!((operator_norm(&n) - oracle).abs() < 1e-12);
        assert!((oracle - 2.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_norms_decrease_for_catalog() {
        for m in [
            DilationMatrix::scalar(1, 2.0).unwrap(),
            DilationMatrix::diagonal(&[2.0, 3.0]).unwrap(),
            DilationMatrix::new(&[vec![1.0, -1.0], vec![1.0, 1.0]]).unwrap(),
            DilationMatrix::scalar(3, 2.0).unwrap(),
        ] {
            let norms: Vec<f64> = (0..=20).map(|j| operator_norm(&m.power(-j))).collect();
            for w in norms.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12));
            }
        }
    }

    fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        let scale = a.amax().max(b.amax()).max(f64::MIN_POSITIVE);
        (a - b).amax() / scale
    }

    fn expansive_2x2() -> impl Strategy<Value = DilationMatrix> {
        (1.3f64..3.0, 1.3f64..3.0, -0.5f64..0.5).prop_filter_map("expansive", |(a, b, c)| {
            DilationMatrix::new(&[vec![a, c], vec![0.0, b]]).ok()
        })
    }

    proptest! {
        #[test]
        fn power_recursion(m in expansive_2x2(), j in -20i32..20) {
            let lhs = m.power(j + 1);
            let rhs = m.entries() * m.power(j);
            prop_assert!(rel_diff(&lhs, &rhs) < 1e-12);
        }

        #[test]
        fn determinant_of_power(m in expansive_2x2(), j in -10i32..10) {
            let det = m.power(j).determinant().abs();
            let expect = m.det_abs().powi(j);
            prop_assert!((det - expect).abs() <= 1e-10 * expect);
        }
    }
}
