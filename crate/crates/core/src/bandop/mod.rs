//! Band operators Σ_k a^(k) V_k on l^p(Z^N, C^d), their dense compressions,
//! adjoints and the off-band / compactness defect diagnostics.

mod coeff;
mod json;

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DVector;
use num_complex::Complex64;

pub use coeff::{AxisProfile, CoefficientSequence, MAX_PERIOD};
pub use json::SCHEMA_VERSION;

use crate::error::{Error, Result};
use crate::lattice::{LatticeVector, MultiIndex, NormTag, SiteBox, Window};
use crate::linalg::{identity_block, is_zero_block, operator_norm, CMatrix};

/// Entry access shared by band operators and the few structured non-band
/// operators (the flip) that the defect diagnostics need.
pub trait LatticeOperator: Sync {
    fn lattice_dim(&self) -> usize;
    fn fiber_dim(&self) -> usize;
    /// Nonzero blocks in row `n`, as (column, block).
    fn row_blocks(&self, n: &MultiIndex) -> Vec<(MultiIndex, CMatrix)>;
    /// Nonzero blocks in column `m`, as (row, block).
    fn column_blocks(&self, m: &MultiIndex) -> Vec<(MultiIndex, CMatrix)>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandOperator {
    dim: usize,
    fiber: usize,
    diagonals: BTreeMap<MultiIndex, CoefficientSequence>,
    tail_bound: f64,
}

/// A dense compression P_rows A P_cols, rows and columns enumerated box-wise
/// with the fiber index running fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMatrix {
    pub rows: SiteBox,
    pub cols: SiteBox,
    pub fiber: usize,
    pub matrix: CMatrix,
    pub norm: NormTag,
}

impl TruncatedMatrix {
    /// Wrap a plain matrix as a compression between two intervals with d = 1.
    pub fn from_matrix(matrix: CMatrix, norm: NormTag) -> Self {
        Self {
            rows: SiteBox::interval(0, matrix.nrows()),
            cols: SiteBox::interval(0, matrix.ncols()),
            fiber: 1,
            matrix,
            norm,
        }
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Block (n, m), or `None` when either site lies outside the compression.
    pub fn block(&self, n: &MultiIndex, m: &MultiIndex) -> Option<CMatrix> {
        let (i, j) = (self.rows.index_of(n)?, self.cols.index_of(m)?);
        let d = self.fiber;
        Some(self.matrix.view((i * d, j * d), (d, d)).into_owned())
    }

    pub fn conjugate_transpose(&self) -> Self {
        Self { rows: self.cols, cols: self.rows, fiber: self.fiber, matrix: self.matrix.adjoint(), norm: self.norm.dual() }
    }

    pub fn operator_norm(&self) -> f64 {
        operator_norm(&self.matrix, self.norm.p)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!("lattice dimension must be 1 or 2, got {dim}")))
    }
}

impl BandOperator {
    /// The zero operator on l^p(Z^dim, C^fiber).
    pub fn zero(dim: usize, fiber: usize) -> Result<Self> {
        check_dim(dim)?;
        if fiber == 0 {
            return Err(Error::InvalidArgument("fiber dimension must be at least 1".into()));
        }
        Ok(Self { dim, fiber, diagonals: BTreeMap::new(), tail_bound: 0.0 })
    }

    pub fn from_diagonals(
        dim: usize,
        fiber: usize,
        diagonals: impl IntoIterator<Item = (MultiIndex, CoefficientSequence)>,
    ) -> Result<Self> {
        let mut op = Self::zero(dim, fiber)?;
        for (k, a) in diagonals {
            op = op.with_diagonal(k, a)?;
        }
        Ok(op)
    }

    /// Add `a V_k` to the operator.
    pub fn with_diagonal(mut self, k: MultiIndex, a: CoefficientSequence) -> Result<Self> {
        if k.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!("offset {k} does not live in Z^{}", self.dim)));
        }
        a.validate(self.dim, self.fiber)?;
        let merged = match self.diagonals.remove(&k) {
            Some(b) => b.combine(&a, self.dim, |x, y| x + y)?,
            None => a,
        };
        if !merged.is_zero() {
            self.diagonals.insert(k, merged);
        }
        Ok(self)
    }

    pub fn with_tail_bound(mut self, tail: f64) -> Result<Self> {
        if !(tail.is_finite() && tail >= 0.0) {
            return Err(Error::InvalidArgument(format!("tail bound must be finite and nonnegative, got {tail}")));
        }
        self.tail_bound = tail;
        Ok(self)
    }

    pub fn identity(dim: usize, fiber: usize) -> Result<Self> {
        Self::shift(MultiIndex::zero(dim), fiber)
    }

    /// The shift V_k.
    pub fn shift(k: MultiIndex, fiber: usize) -> Result<Self> {
        Self::zero(k.dim(), fiber)?.with_diagonal(k, CoefficientSequence::Constant(identity_block(fiber)))
    }

    /// The multiplication operator aI.
    pub fn multiplication(dim: usize, a: CoefficientSequence) -> Result<Self> {
        let fiber = a.fiber();
        Self::zero(dim, fiber)?.with_diagonal(MultiIndex::zero(dim), a)
    }

    /// The scalar Laurent operator Σ_k c_k V_k on Z, with symbol Σ_k c_k t^k.
    pub fn scalar_laurent(coeffs: &[(i64, Complex64)]) -> Result<Self> {
        Self::from_diagonals(
            1,
            1,
            coeffs.iter().map(|&(k, z)| (MultiIndex::d1(k), CoefficientSequence::Constant(CMatrix::from_element(1, 1, z)))),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn diagonals(&self) -> &BTreeMap<MultiIndex, CoefficientSequence> {
        &self.diagonals
    }

    pub fn coefficient(&self, k: &MultiIndex) -> Option<&CoefficientSequence> {
        self.diagonals.get(k)
    }

    /// max |k| over the nonzero diagonals.
    pub fn bandwidth(&self) -> usize {
        self.diagonals.keys().map(|k| k.max_norm() as usize).max().unwrap_or(0)
    }

    /// Σ_k sup_n ‖a^(k)_n‖, an upper bound for ‖A‖ on every l^p.
    pub fn norm_bound(&self) -> f64 {
        self.diagonals.values().map(|a| a.sup_norm()).sum::<f64>() + self.tail_bound
    }

    pub fn is_translation_invariant(&self) -> bool {
        self.diagonals.values().all(|a| matches!(a, CoefficientSequence::Constant(_)))
    }

    /// Block (n, m) of the matrix, i.e. a^(n−m)_n.
    pub fn block(&self, n: &MultiIndex, m: &MultiIndex) -> Option<&CMatrix> {
        self.diagonals.get(&(*n - *m)).and_then(|a| a.get(n))
    }

    fn check_vector(&self, x: &LatticeVector) -> Result<()> {
        if x.dim() != self.dim || x.fiber() != self.fiber {
            return Err(Error::DimensionMismatch(format!(
                "operator on Z^{} with d = {}, vector on Z^{} with d = {}",
                self.dim,
                self.fiber,
                x.dim(),
                x.fiber()
            )));
        }
        Ok(())
    }

    /// (Ax)_n = Σ_k a^(k)_n x_{n−k}.
    pub fn apply(&self, x: &LatticeVector) -> Result<LatticeVector> {
        self.check_vector(x)?;
        let mut y = LatticeVector::zeros(self.dim, self.fiber);
        for (m, xm) in x.iter() {
            for (k, a) in &self.diagonals {
                let n = *m + *k;
                if let Some(block) = a.get(&n) {
                    y.add_at(n, &(block * xm));
                }
            }
        }
        Ok(y)
    }

    /// Dense compression onto the given row and column boxes.
    pub fn compress(&self, rows: &SiteBox, cols: &SiteBox) -> CMatrix {
        let d = self.fiber;
        let mut out = CMatrix::zeros(rows.len() * d, cols.len() * d);
        for (j, m) in cols.sites().iter().enumerate() {
            for (k, a) in &self.diagonals {
                let n = *m + *k;
                if let (Some(i), Some(block)) = (rows.index_of(&n), a.get(&n)) {
                    out.view_mut((i * d, j * d), (d, d)).copy_from(block);
                }
            }
        }
        out
    }

    pub fn truncate(&self, rows: &Window, cols: &Window, norm: NormTag) -> Result<TruncatedMatrix> {
        if rows.dim != self.dim || cols.dim != self.dim {
            return Err(Error::DimensionMismatch("window dimension differs from the operator's".into()));
        }
        Ok(self.truncate_boxes(rows.to_box(), cols.to_box(), norm))
    }

    pub fn truncate_boxes(&self, rows: SiteBox, cols: SiteBox, norm: NormTag) -> TruncatedMatrix {
        TruncatedMatrix { matrix: self.compress(&rows, &cols), rows, cols, fiber: self.fiber, norm }
    }

    /// The finite section P_n A P_n.
    pub fn finite_section(&self, radius: usize, norm: NormTag) -> TruncatedMatrix {
        let w = Window::new(self.dim, radius).to_box();
        self.truncate_boxes(w, w, norm)
    }

    /// b^(−k)_n = (a^(k)_{n+k})^H.
    pub fn adjoint(&self) -> Self {
        let diagonals = self.diagonals.iter().map(|(k, a)| (-*k, a.translate(k).adjoint_blocks())).collect();
        Self { dim: self.dim, fiber: self.fiber, diagonals, tail_bound: self.tail_bound }
    }

    /// V_{−s} A V_s, whose coefficients are n ↦ a^(k)_{n+s}.
    pub fn translate(&self, s: &MultiIndex) -> Self {
        let diagonals = self.diagonals.iter().map(|(k, a)| (*k, a.translate(s))).collect();
        Self { dim: self.dim, fiber: self.fiber, diagonals, tail_bound: self.tail_bound }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.fiber != other.fiber {
            return Err(Error::DimensionMismatch(format!(
                "operators on (Z^{}, d = {}) and (Z^{}, d = {})",
                self.dim, self.fiber, other.dim, other.fiber
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.tail_bound = self.tail_bound + other.tail_bound;
        for (k, b) in &other.diagonals {
            out = out.with_diagonal(*k, b.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut diagonals = BTreeMap::new();
        for (k, a) in &self.diagonals {
            let b = a.map_linear(|m| m * z);
            if !b.is_zero() {
                diagonals.insert(*k, b);
            }
        }
        Self { dim: self.dim, fiber: self.fiber, diagonals, tail_bound: self.tail_bound * z.norm() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// The product A∘B: a^(k) V_k b^(j) V_j = (a^(k) · b^(j)_{·−k}) V_{k+j}.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.dim, self.fiber)?;
        for (k, a) in &self.diagonals {
            for (j, b) in &other.diagonals {
                let shifted = b.translate(&-*k);
                let c = a.combine(&shifted, self.dim, |x, y| x * y)?;
                out = out.with_diagonal(*k + *j, c)?;
            }
        }
        let (na, nb) = (self.norm_bound() - self.tail_bound, other.norm_bound() - other.tail_bound);
        out.tail_bound = na * other.tail_bound + nb * self.tail_bound + self.tail_bound * other.tail_bound;
        Ok(out)
    }

    /// Diagonal-wise comparison of coefficient values.
    pub fn semantic_eq(&self, other: &Self, tol: f64) -> bool {
        if self.dim != other.dim || self.fiber != other.fiber {
            return false;
        }
        let keys: BTreeSet<&MultiIndex> = self.diagonals.keys().chain(other.diagonals.keys()).collect();
        let zero = CoefficientSequence::Constant(CMatrix::zeros(self.fiber, self.fiber));
        keys.into_iter().all(|k| {
            let a = self.diagonals.get(k).unwrap_or(&zero);
            let b = other.diagonals.get(k).unwrap_or(&zero);
            a.semantic_eq(b, self.dim, tol)
        })
    }

    /// Coefficient class names in use, without duplicates.
    pub fn classes(&self) -> BTreeSet<&'static str> {
        self.diagonals.values().map(|a| a.class_name()).collect()
    }
}

impl LatticeOperator for BandOperator {
    fn lattice_dim(&self) -> usize {
        self.dim
    }

    fn fiber_dim(&self) -> usize {
        self.fiber
    }

    fn row_blocks(&self, n: &MultiIndex) -> Vec<(MultiIndex, CMatrix)> {
        self.diagonals
            .iter()
            .filter_map(|(k, a)| a.get(n).filter(|b| !is_zero_block(b)).map(|b| (*n - *k, b.clone())))
            .collect()
    }

    fn column_blocks(&self, m: &MultiIndex) -> Vec<(MultiIndex, CMatrix)> {
        self.diagonals
            .iter()
            .filter_map(|(k, a)| {
                let n = *m + *k;
                a.get(&n).filter(|b| !is_zero_block(b)).map(|b| (n, b.clone()))
            })
            .collect()
    }
}

/// The flip J: (x_i) ↦ (x_{−i}). Not a band operator, but quasi-banded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlipOperator {
    pub dim: usize,
    pub fiber: usize,
}

impl FlipOperator {
    pub fn apply(&self, x: &LatticeVector) -> LatticeVector {
        let mut y = LatticeVector::zeros(x.dim(), x.fiber());
        for (n, v) in x.iter() {
            y.set(-*n, v.clone());
        }
        y
    }
}

impl LatticeOperator for FlipOperator {
    fn lattice_dim(&self) -> usize {
        self.dim
    }

    fn fiber_dim(&self) -> usize {
        self.fiber
    }

    fn row_blocks(&self, n: &MultiIndex) -> Vec<(MultiIndex, CMatrix)> {
        vec![(-*n, identity_block(self.fiber))]
    }

    fn column_blocks(&self, m: &MultiIndex) -> Vec<(MultiIndex, CMatrix)> {
        vec![(-*m, identity_block(self.fiber))]
    }
}

/// Dense matrix from (row, column, block) triples over explicit site lists.
fn assemble(rows: &[MultiIndex], cols: &[MultiIndex], d: usize, blocks: &[(MultiIndex, MultiIndex, CMatrix)]) -> CMatrix {
    let row_idx: BTreeMap<_, _> = rows.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let col_idx: BTreeMap<_, _> = cols.iter().enumerate().map(|(j, m)| (*m, j)).collect();
    let mut out = CMatrix::zeros(rows.len() * d, cols.len() * d);
    for (n, m, b) in blocks {
        if let (Some(&i), Some(&j)) = (row_idx.get(n), col_idx.get(m)) {
            let mut view = out.view_mut((i * d, j * d), (d, d));
            view += b;
        }
    }
    out
}

/// ‖P_rows A Q_window‖: all nonzero columns outside the window reached from `rows`.
fn corner_norm_right(op: &impl LatticeOperator, rows: &[MultiIndex], window: &Window, norm: NormTag) -> f64 {
    let mut blocks = Vec::new();
    let mut cols = BTreeSet::new();
    for n in rows {
        for (m, b) in op.row_blocks(n) {
            if !window.contains(&m) {
                cols.insert(m);
                blocks.push((*n, m, b));
            }
        }
    }
    let cols: Vec<_> = cols.into_iter().collect();
    operator_norm(&assemble(rows, &cols, op.fiber_dim(), &blocks), norm.p)
}

/// ‖Q_window A P_cols‖: all nonzero rows outside the window reached from `cols`.
fn corner_norm_left(op: &impl LatticeOperator, cols: &[MultiIndex], window: &Window, norm: NormTag) -> f64 {
    let mut blocks = Vec::new();
    let mut rows = BTreeSet::new();
    for m in cols {
        for (n, b) in op.column_blocks(m) {
            if !window.contains(&n) {
                rows.insert(n);
                blocks.push((n, *m, b));
            }
        }
    }
    let rows: Vec<_> = rows.into_iter().collect();
    operator_norm(&assemble(&rows, cols, op.fiber_dim(), &blocks), norm.p)
}

/// The two corner norms (‖P_{n−l} A Q_n‖, ‖Q_n A P_{n−l}‖).
pub fn off_band_corners(op: &impl LatticeOperator, n: usize, l: usize, norm: NormTag) -> Result<(f64, f64)> {
    if n <= l {
        return Err(Error::InvalidArgument(format!("off-band defect needs n > l, got n = {n}, l = {l}")));
    }
    let inner = Window::new(op.lattice_dim(), n - l).sites();
    let outer = Window::new(op.lattice_dim(), n);
    Ok((corner_norm_right(op, &inner, &outer, norm), corner_norm_left(op, &inner, &outer, norm)))
}

/// ‖P_{n−l} A Q_n‖ + ‖Q_n A P_{n−l}‖ of the band part. A declared tail bound
/// widens this by ±2·tail.
pub fn off_band_defect(op: &impl LatticeOperator, n: usize, l: usize, norm: NormTag) -> Result<f64> {
    off_band_corners(op, n, l, norm).map(|(a, b)| a + b)
}

/// ‖K Q_n‖ + ‖Q_n K‖ for K with finitely supported coefficients.
pub fn p_compact_defect(k: &BandOperator, n: usize, norm: NormTag) -> Result<f64> {
    let mut support = BTreeSet::new();
    for (offset, a) in k.diagonals() {
        let sites = a.nonzero_sites(k.dim()).ok_or_else(|| {
            Error::UnsupportedClass(format!("diagonal {offset} ({}) is not finitely supported", a.class_name()))
        })?;
        support.extend(sites);
    }
    let window = Window::new(k.dim(), n);
    let rows: Vec<MultiIndex> = support.iter().copied().collect();
    let right = corner_norm_right(k, &rows, &window, norm);
    // Q_n K: rows of the support outside the window, all their columns.
    let outside: Vec<MultiIndex> = rows.iter().copied().filter(|r| !window.contains(r)).collect();
    let mut blocks = Vec::new();
    let mut cols = BTreeSet::new();
    for r in &outside {
        for (m, b) in k.row_blocks(r) {
            cols.insert(m);
            blocks.push((*r, m, b));
        }
    }
    let cols: Vec<_> = cols.into_iter().collect();
    let left = operator_norm(&assemble(&outside, &cols, k.fiber(), &blocks), norm.p);
    Ok(right + left)
}

/// Stack the values of `x` on the sites of `b` (fiber index fastest).
pub fn restrict_to_box(x: &LatticeVector, b: &SiteBox) -> DVector<Complex64> {
    x.restrict(&b.sites())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::PNorm;
    use crate::linalg::{c, real_block};
    use proptest::prelude::*;

    fn i_minus_v1() -> BandOperator {
        BandOperator::scalar_laurent(&[(0, c(1.0, 0.0)), (1, c(-1.0, 0.0))]).unwrap()
    }

    fn e(n: i64) -> LatticeVector {
        LatticeVector::unit(MultiIndex::d1(n), 1)
    }

    fn l2() -> NormTag {
        NormTag::new(PNorm::Two)
    }

    #[test]
    fn apply_examples() {
        let y = i_minus_v1().apply(&e(0)).unwrap();
        assert_eq!(y, e(0).sub(&e(1)));

        let a = CoefficientSequence::eventually_periodic(vec![real_block(2.0)], 0, vec![real_block(5.0)], vec![real_block(3.0)]);
        let m = BandOperator::multiplication(1, a).unwrap();
        for (n, v) in [(-4, 2.0), (0, 5.0), (7, 3.0)] {
            assert_eq!(m.apply(&e(n)).unwrap(), e(n).scale(c(v, 0.0)));
        }
        assert!(m.apply(&LatticeVector::zeros(2, 1)).is_err());
    }

    #[test]
    fn bidiagonal_truncation() {
        let t = i_minus_v1().truncate(&Window::new(1, 1), &Window::new(1, 1), l2()).unwrap();
        let expect = CMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, -1.0, 1.0].map(|x| c(x, 0.0)),
        );
        assert_eq!(t.matrix, expect);
    }

    #[test]
    fn rectangular_truncation_shape() {
        let d = 3;
        let a = BandOperator::identity(1, d).unwrap();
        let t = a.truncate(&Window::new(1, 8), &Window::new(1, 10), l2()).unwrap();
        assert_eq!((t.nrows(), t.ncols()), (d * 17, d * 21));
    }

    #[test]
    fn constant_coefficients_give_toeplitz() {
        let a = BandOperator::scalar_laurent(&[(-1, c(0.5, 1.0)), (0, c(2.0, 0.0)), (2, c(-1.0, 0.0))]).unwrap();
        let m = a.finite_section(5, l2()).matrix;
        for i in 1..m.nrows() {
            for j in 1..m.ncols() {
                assert_eq!(m[(i, j)], m[(i - 1, j - 1)]);
            }
        }
    }

    #[test]
    fn adjoint_examples() {
        let v1 = BandOperator::shift(MultiIndex::d1(1), 1).unwrap();
        assert_eq!(v1.adjoint(), BandOperator::shift(MultiIndex::d1(-1), 1).unwrap());
        let a = CoefficientSequence::periodic_1d(vec![CMatrix::from_element(1, 1, c(1.0, 2.0)), real_block(3.0)]);
        let m = BandOperator::multiplication(1, a.clone()).unwrap();
        assert_eq!(m.adjoint(), BandOperator::multiplication(1, a.adjoint_blocks()).unwrap());
        assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn flip_is_quasi_banded() {
        let j = FlipOperator { dim: 1, fiber: 1 };
        for n in 1..12 {
            for l in 0..n {
                assert_eq!(off_band_defect(&j, n, l, l2()).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn off_band_defect_examples() {
        assert_eq!(off_band_corners(&i_minus_v1(), 5, 0, l2()).unwrap(), (1.0, 1.0));
        assert_eq!(off_band_defect(&i_minus_v1(), 5, 0, l2()).unwrap(), 2.0);
        assert_eq!(off_band_defect(&i_minus_v1(), 5, 1, l2()).unwrap(), 0.0);
        assert!(off_band_defect(&i_minus_v1(), 2, 2, l2()).is_err());
    }

    #[test]
    fn p_compact_defect_examples() {
        let chi0 = CoefficientSequence::finite_support(1, [(MultiIndex::d1(0), real_block(1.0))]);
        let k = BandOperator::multiplication(1, chi0).unwrap();
        for n in 0..4 {
            assert_eq!(p_compact_defect(&k, n, l2()).unwrap(), 0.0);
        }
        let chi2 = CoefficientSequence::finite_support(1, [(MultiIndex::d1(2), real_block(1.0))]);
        let k = BandOperator::zero(1, 1).unwrap().with_diagonal(MultiIndex::d1(1), chi2).unwrap();
        assert!(p_compact_defect(&k, 0, l2()).unwrap() > 0.0);
        for n in 3..8 {
            assert_eq!(p_compact_defect(&k, n, l2()).unwrap(), 0.0);
        }
        assert!(p_compact_defect(&i_minus_v1(), 3, l2()).is_err());
    }

    #[test]
    fn halfplane_operator_acts_as_identity_below() {
        let below = CoefficientSequence::EventuallyPeriodic {
            axis: 1,
            left: vec![real_block(1.0)],
            core_start: 0,
            core: vec![],
            right: vec![real_block(0.0)],
        };
        let above = CoefficientSequence::EventuallyPeriodic {
            axis: 1,
            left: vec![real_block(0.0)],
            core_start: 0,
            core: vec![],
            right: vec![real_block(1.0)],
        };
        let a = BandOperator::from_diagonals(2, 1, [(MultiIndex::d2(0, 0), below), (MultiIndex::d2(0, 1), above)]).unwrap();
        let x = LatticeVector::unit(MultiIndex::d2(5, -3), 1);
        assert_eq!(a.apply(&x).unwrap(), x);
    }

    fn scalar_seq() -> impl Strategy<Value = CoefficientSequence> {
        let val = || (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| CMatrix::from_element(1, 1, c(re, im)));
        prop_oneof![
            val().prop_map(CoefficientSequence::Constant),
            prop::collection::vec(val(), 1..4).prop_map(CoefficientSequence::periodic_1d),
            (prop::collection::vec(val(), 1..3), -3i64..3, prop::collection::vec(val(), 0..4), prop::collection::vec(val(), 1..3))
                .prop_map(|(l, s, core, r)| CoefficientSequence::eventually_periodic(l, s, core, r)),
            prop::collection::vec((-5i64..5, val()), 0..4)
                .prop_map(|v| CoefficientSequence::finite_support(1, v.into_iter().map(|(i, m)| (MultiIndex::d1(i), m)))),
        ]
    }

    fn operator() -> impl Strategy<Value = BandOperator> {
        prop::collection::vec((-2i64..=2, scalar_seq()), 1..4).prop_map(|diags| {
            BandOperator::from_diagonals(1, 1, diags.into_iter().map(|(k, a)| (MultiIndex::d1(k), a))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn matrix_operator_consistency(a in operator(), xs in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 5)) {
            let w = a.bandwidth() as i64;
            let rows = SiteBox::interval(-8 - w, 17 + 2 * w as usize);
            let cols = SiteBox::interval(-2, 5);
            let mut x = LatticeVector::zeros(1, 1);
            for (i, (re, im)) in xs.iter().enumerate() {
                x.set(MultiIndex::d1(i as i64 - 2), DVector::from_element(1, c(*re, *im)));
            }
            let lhs = a.compress(&rows, &cols) * restrict_to_box(&x, &cols);
            let rhs = restrict_to_box(&a.apply(&x).unwrap(), &rows);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn adjoint_is_conjugate_transpose(a in operator()) {
            let w = Window::new(1, 7).to_box();
            let lhs = a.adjoint().compress(&w, &w);
            let rhs = a.compress(&w, &w).adjoint();
            prop_assert_eq!(lhs, rhs);
            prop_assert!(a.adjoint().adjoint().semantic_eq(&a, 0.0));
        }

        #[test]
        fn composition_consistency(a in operator(), b in operator()) {
            let ab = a.compose(&b).unwrap();
            let inner = Window::new(1, 6).to_box();
            let mid = inner.dilate(a.bandwidth());
            let lhs = ab.compress(&inner, &inner);
            let rhs = a.compress(&inner, &mid) * b.compress(&mid, &inner);
            prop_assert!((lhs - rhs).norm() < 1e-10);
        }

        #[test]
        fn sum_and_translation_consistency(a in operator(), b in operator(), s in -6i64..6) {
            let w = Window::new(1, 9).to_box();
            let sum = a.add(&b).unwrap();
            prop_assert!((sum.compress(&w, &w) - a.compress(&w, &w) - b.compress(&w, &w)).norm() < 1e-12);
            let shift = MultiIndex::d1(s);
            let moved = a.translate(&shift).compress(&w, &w);
            prop_assert_eq!(moved, a.compress(&w.translate(shift), &w.translate(shift)));
        }

        #[test]
        fn off_band_defect_monotone_in_l(a in operator(), n in 4usize..8) {
            let mut last = f64::INFINITY;
            for l in 0..n {
                let v = off_band_defect(&a, n, l, l2()).unwrap();
                prop_assert!(v <= last + 1e-12);
                if l >= a.bandwidth() {
                    prop_assert_eq!(v, 0.0);
                }
                last = v;
            }
        }
    }
}
