//! Index arithmetic on Z^N (N = 1 or 2), hypercube windows, the canonical
//! projections P_n / Q_n, shifts V_k and p-norms of finitely supported
//! vectors with values in C^d.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of Z^N. Only N = 1 and N = 2 are supported.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    dim: u8,
    coords: [i64; 2],
}

impl MultiIndex {
    pub fn new(coords: &[i64]) -> Result<Self> {
        match *coords {
            [a] => Ok(Self::d1(a)),
            [a, b] => Ok(Self::d2(a, b)),
            _ => Err(Error::DimensionMismatch(format!(
                "lattice dimension must be 1 or 2, got {}",
                coords.len()
            ))),
        }
    }

    pub const fn d1(i: i64) -> Self {
        Self { dim: 1, coords: [i, 0] }
    }

    pub const fn d2(i: i64, j: i64) -> Self {
        Self { dim: 2, coords: [i, j] }
    }

    pub fn zero(dim: usize) -> Self {
        Self::along(dim, 0, 0)
    }

    /// `value` on `axis`, zero elsewhere.
    pub fn along(dim: usize, axis: usize, value: i64) -> Self {
        assert!(dim == 1 || dim == 2, "lattice dimension must be 1 or 2");
        assert!(axis < dim);
        let mut coords = [0; 2];
        coords[axis] = value;
        Self { dim: dim as u8, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.dim()]
    }

    pub fn get(&self, axis: usize) -> i64 {
        self.coords()[axis]
    }

    pub fn with(&self, axis: usize, value: i64) -> Self {
        let mut out = *self;
        out.coords[axis] = value;
        out
    }

    /// Max-norm |n| = max_i |n_i|.
    pub fn max_norm(&self) -> i64 {
        self.coords().iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "mixing lattice dimensions");
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coords() {
            [a] => write!(f, "{a}"),
            [a, b] => write!(f, "({a},{b})"),
            _ => unreachable!(),
        }
    }
}

impl Add for MultiIndex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.check(&rhs);
        Self { dim: self.dim, coords: [self.coords[0] + rhs.coords[0], self.coords[1] + rhs.coords[1]] }
    }
}

impl Sub for MultiIndex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.check(&rhs);
        Self { dim: self.dim, coords: [self.coords[0] - rhs.coords[0], self.coords[1] - rhs.coords[1]] }
    }
}

impl Neg for MultiIndex {
    type Output = Self;
    fn neg(self) -> Self {
        Self { dim: self.dim, coords: [-self.coords[0], -self.coords[1]] }
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        MultiIndex::new(&v).map_err(serde::de::Error::custom)
    }
}

/// A rectangular box of lattice sites `lo ..= hi` (inclusive on every axis).
/// Sites are enumerated lexicographically, axis 0 major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteBox {
    pub lo: MultiIndex,
    pub hi: MultiIndex,
}

impl SiteBox {
    pub fn new(lo: MultiIndex, hi: MultiIndex) -> Self {
        lo.check(&hi);
        Self { lo, hi }
    }

    /// `{start, …, start + len − 1}` on Z.
    pub fn interval(start: i64, len: usize) -> Self {
        Self::new(MultiIndex::d1(start), MultiIndex::d1(start + len as i64 - 1))
    }

    /// The hypercube `corner + {0..width-1}^N`.
    pub fn cube(corner: MultiIndex, width: usize) -> Self {
        let w = width as i64 - 1;
        let hi = match corner.dim() {
            1 => corner + MultiIndex::d1(w),
            _ => corner + MultiIndex::d2(w, w),
        };
        Self::new(corner, hi)
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    fn extent(&self, axis: usize) -> usize {
        (self.hi.get(axis) - self.lo.get(axis) + 1).max(0) as usize
    }

    pub fn len(&self) -> usize {
        (0..self.dim()).map(|a| self.extent(a)).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, n: &MultiIndex) -> bool {
        (0..self.dim()).all(|a| self.lo.get(a) <= n.get(a) && n.get(a) <= self.hi.get(a))
    }

    pub fn index_of(&self, n: &MultiIndex) -> Option<usize> {
        if !self.contains(n) {
            return None;
        }
        let mut idx = 0usize;
        for a in 0..self.dim() {
            idx = idx * self.extent(a) + (n.get(a) - self.lo.get(a)) as usize;
        }
        Some(idx)
    }

    pub fn sites(&self) -> Vec<MultiIndex> {
        match self.dim() {
            1 => (self.lo.get(0)..=self.hi.get(0)).map(MultiIndex::d1).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for i in self.lo.get(0)..=self.hi.get(0) {
                    for j in self.lo.get(1)..=self.hi.get(1) {
                        out.push(MultiIndex::d2(i, j));
                    }
                }
                out
            }
        }
    }

    pub fn translate(&self, k: MultiIndex) -> Self {
        Self::new(self.lo + k, self.hi + k)
    }

    /// Grow by `margin` sites on every side.
    pub fn dilate(&self, margin: usize) -> Self {
        let m = margin as i64;
        let shift = match self.dim() {
            1 => MultiIndex::d1(m),
            _ => MultiIndex::d2(m, m),
        };
        Self::new(self.lo - shift, self.hi + shift)
    }
}

/// The window {−n, …, n}^N, i.e. the support of P_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub radius: usize,
    pub dim: usize,
}

impl Window {
    pub fn new(dim: usize, radius: usize) -> Self {
        assert!(dim == 1 || dim == 2, "lattice dimension must be 1 or 2");
        Self { radius, dim }
    }

    pub fn cardinality(&self) -> usize {
        (2 * self.radius + 1).pow(self.dim as u32)
    }

    pub fn contains(&self, n: &MultiIndex) -> bool {
        n.max_norm() <= self.radius as i64
    }

    pub fn to_box(&self) -> SiteBox {
        let r = self.radius as i64;
        match self.dim {
            1 => SiteBox::new(MultiIndex::d1(-r), MultiIndex::d1(r)),
            _ => SiteBox::new(MultiIndex::d2(-r, -r), MultiIndex::d2(r, r)),
        }
    }

    pub fn sites(&self) -> Vec<MultiIndex> {
        self.to_box().sites()
    }
}

/// p ∈ {1, 2, ∞}; `zero` selects the l^0 subspace reading of p = ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PNorm {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Infinity,
}

impl PNorm {
    /// The dual exponent: 1 ↔ ∞, 2 ↔ 2.
    pub fn dual(self) -> Self {
        match self {
            PNorm::One => PNorm::Infinity,
            PNorm::Two => PNorm::Two,
            PNorm::Infinity => PNorm::One,
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PNorm::One => "1",
            PNorm::Two => "2",
            PNorm::Infinity => "inf",
        })
    }
}

impl std::str::FromStr for PNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Ok(PNorm::One),
            "2" => Ok(PNorm::Two),
            "inf" | "infinity" | "∞" => Ok(PNorm::Infinity),
            other => Err(Error::UnsupportedNorm(format!("p = {other}; expected 1, 2 or inf"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormTag {
    pub p: PNorm,
    #[serde(default)]
    pub zero: bool,
}

impl NormTag {
    pub fn new(p: PNorm) -> Self {
        Self { p, zero: false }
    }

    /// The l^0 subspace of l^∞.
    pub fn l0() -> Self {
        Self { p: PNorm::Infinity, zero: true }
    }

    pub fn with_zero_flag(p: PNorm, zero: bool) -> Result<Self> {
        if zero && p != PNorm::Infinity {
            return Err(Error::InvalidArgument("the l^0 flag requires p = inf".into()));
        }
        Ok(Self { p, zero })
    }

    pub fn dual(&self) -> Self {
        Self::new(self.p.dual())
    }
}

impl Default for NormTag {
    fn default() -> Self {
        Self::new(PNorm::Two)
    }
}

/// A finitely supported vector x: Z^N → C^d.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeVector {
    dim: usize,
    fiber: usize,
    entries: BTreeMap<MultiIndex, DVector<Complex64>>,
}

impl LatticeVector {
    pub fn zeros(dim: usize, fiber: usize) -> Self {
        assert!(fiber >= 1, "fiber dimension must be positive");
        assert!(dim == 1 || dim == 2, "lattice dimension must be 1 or 2");
        Self { dim, fiber, entries: BTreeMap::new() }
    }

    /// The unit vector e_n ⊗ (1, 0, …, 0).
    pub fn unit(n: MultiIndex, fiber: usize) -> Self {
        let mut v = DVector::zeros(fiber);
        v[0] = Complex64::new(1.0, 0.0);
        let mut x = Self::zeros(n.dim(), fiber);
        x.set(n, v);
        x
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    pub fn get(&self, n: &MultiIndex) -> Option<&DVector<Complex64>> {
        self.entries.get(n)
    }

    /// Sets the entry at `n`; zero entries are dropped from the support.
    pub fn set(&mut self, n: MultiIndex, value: DVector<Complex64>) {
        assert_eq!(value.len(), self.fiber, "fiber dimension mismatch");
        assert_eq!(n.dim(), self.dim, "lattice dimension mismatch");
        if value.iter().all(|z| z.norm() == 0.0) {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, value);
        }
    }

    pub fn add_at(&mut self, n: MultiIndex, value: &DVector<Complex64>) {
        let next = match self.entries.get(&n) {
            Some(v) => v + value,
            None => value.clone(),
        };
        self.set(n, next);
    }

    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &DVector<Complex64>)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zeros(self.dim, self.fiber);
        for (n, v) in &self.entries {
            out.set(*n, v * s);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, v) in &other.entries {
            out.add_at(*n, &(-v));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, v) in &other.entries {
            out.add_at(*n, v);
        }
        out
    }

    /// Stack the entries on `sites` into one column vector of length d·|sites|.
    pub fn restrict(&self, sites: &[MultiIndex]) -> DVector<Complex64> {
        let d = self.fiber;
        let mut out = DVector::zeros(d * sites.len());
        for (i, n) in sites.iter().enumerate() {
            if let Some(v) = self.entries.get(n) {
                out.rows_mut(i * d, d).copy_from(v);
            }
        }
        out
    }

    /// Inverse of [`LatticeVector::restrict`].
    pub fn from_stacked(sites: &[MultiIndex], fiber: usize, data: &DVector<Complex64>) -> Self {
        assert_eq!(data.len(), fiber * sites.len());
        let dim = sites.first().map(|n| n.dim()).unwrap_or(1);
        let mut out = Self::zeros(dim, fiber);
        for (i, n) in sites.iter().enumerate() {
            out.set(*n, data.rows(i * fiber, fiber).into_owned());
        }
        out
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// P_w x: entries outside the window are zeroed.
pub fn project(x: &LatticeVector, w: &Window) -> LatticeVector {
    project_onto(x, |n| w.contains(n))
}

/// Q_w x = x − P_w x.
pub fn complement(x: &LatticeVector, w: &Window) -> LatticeVector {
    project_onto(x, |n| !w.contains(n))
}

pub fn project_box(x: &LatticeVector, b: &SiteBox) -> LatticeVector {
    project_onto(x, |n| b.contains(n))
}

fn project_onto(x: &LatticeVector, keep: impl Fn(&MultiIndex) -> bool) -> LatticeVector {
    LatticeVector {
        dim: x.dim,
        fiber: x.fiber,
        entries: x.entries.iter().filter(|(n, _)| keep(n)).map(|(n, v)| (*n, v.clone())).collect(),
    }
}

/// (V_k x)_n = x_{n−k}.
pub fn shift(x: &LatticeVector, k: MultiIndex) -> LatticeVector {
    LatticeVector {
        dim: x.dim,
        fiber: x.fiber,
        entries: x.entries.iter().map(|(n, v)| (*n + k, v.clone())).collect(),
    }
}

/// l^p norm with the Euclidean norm on each fiber.
pub fn norm(x: &LatticeVector, t: NormTag) -> f64 {
    let fibers = x.entries.values().map(|v| v.norm());
    match t.p {
        PNorm::One => fibers.sum(),
        PNorm::Two => fibers.map(|f| f * f).sum::<f64>().sqrt(),
        PNorm::Infinity => fibers.fold(0.0, f64::max),
    }
}
