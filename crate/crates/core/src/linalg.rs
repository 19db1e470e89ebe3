//! Dense complex linear algebra used by the truncation and moduli code.
//!
//! Everything here works on `nalgebra::DMatrix<Complex64>`; block entries of
//! lattice operators are expanded to scalar entries before any norm is taken.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::lattice::PNorm;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn scalar_block(z: Complex64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

pub fn real_block(x: f64) -> CMatrix {
    scalar_block(c(x, 0.0))
}

pub fn zero_block(d: usize) -> CMatrix {
    CMatrix::zeros(d, d)
}

pub fn identity_block(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Singular values in ascending order. Returns `min(rows, cols)` values.
pub fn singular_values_ascending(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| a.total_cmp(b));
    sv
}

/// Singular values of `m` viewed as a map on a space of dimension `count`,
/// ascending, with structural zeros prepended so that exactly `count`
/// values are returned.
pub fn padded_singular_values(m: &CMatrix, count: usize) -> Vec<f64> {
    let sv = singular_values_ascending(m);
    debug_assert!(count >= sv.len());
    let mut out = vec![0.0; count.saturating_sub(sv.len())];
    out.extend(sv);
    out
}

pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    if m.ncols() > m.nrows() {
        // a wide matrix always has a nontrivial kernel
        return 0.0;
    }
    singular_values_ascending(m).first().copied().unwrap_or(0.0)
}

pub fn max_column_sum(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_row_sum(m: &CMatrix) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    singular_values_ascending(m).last().copied().unwrap_or(0.0)
}

/// Operator norm of a dense matrix acting between scalar l^p spaces.
pub fn operator_norm(m: &CMatrix, p: PNorm) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    match p {
        PNorm::One => max_column_sum(m),
        PNorm::Two => spectral_norm(m),
        PNorm::Infinity => max_row_sum(m),
    }
}

/// Inverse of a square matrix, `None` when a pivot vanishes.
pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    if m.nrows() != m.ncols() {
        return None;
    }
    if m.nrows() == 0 {
        return Some(m.clone());
    }
    let lu = m.clone().full_piv_lu();
    if !lu.is_invertible() {
        return None;
    }
    lu.try_inverse()
}

pub fn adjoint(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Number of entries in `values` strictly below `tol`.
pub fn count_below(values: &[f64], tol: f64) -> usize {
    values.iter().filter(|&&v| v < tol).count()
}

pub fn approx_eq_blocks(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    a.shape() == b.shape()
        && a.iter()
            .zip(b.iter())
            .all(|(x, y)| (x - y).norm() <= tol * (1.0 + x.norm().max(y.norm())))
}

pub fn is_zero_block(a: &CMatrix) -> bool {
    a.iter().all(|z| *z == ZERO)
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        return a.max(b);
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_singular_values() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(10.0, 0.0), c(0.1, 0.0), c(1.0, 0.0)]));
        let sv = singular_values_ascending(&m);
        assert!((sv[0] - 0.1).abs() < 1e-14);
        assert!((sv[1] - 1.0).abs() < 1e-14);
        assert!((sv[2] - 10.0).abs() < 1e-13);
    }

    #[test]
    fn padding_prepends_structural_zeros() {
        let m = CMatrix::from_element(2, 3, ONE);
        let sv = padded_singular_values(&m, 3);
        assert_eq!(sv.len(), 3);
        assert_eq!(sv[0], 0.0);
        assert!(sv[1].abs() < 1e-14);
        assert!((sv[2] - 6f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn classical_norms() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0), c(4.0, 0.0)]);
        assert_eq!(max_column_sum(&m), 6.0);
        assert_eq!(max_row_sum(&m), 7.0);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = CMatrix::from_element(2, 2, ONE);
        assert!(inverse(&m).is_none());
        assert!(inverse(&CMatrix::identity(3, 3)).is_some());
    }

    #[test]
    fn lcm_gcd() {
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(lcm(1, 5), 5);
        assert_eq!(gcd(12, 18), 6);
    }
}
