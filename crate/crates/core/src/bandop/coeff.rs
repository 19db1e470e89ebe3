//! Structured coefficient sequences a: Z^N → C^{d×d}.
//!
//! Every class is described by finite data, so evaluation is total and the
//! sequences are bounded by construction. Eventually periodic sequences vary
//! along a single `axis` and are constant along the other one (N = 2).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use crate::linalg::{approx_eq_blocks, is_zero_block, lcm, spectral_norm, zero_block, CMatrix};

/// Upper limit on periods produced by lcm alignment.
pub const MAX_PERIOD: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientSequence {
    Constant(CMatrix),
    /// `table` is indexed by the residues of n modulo `periods`, axis 0 major.
    Periodic { periods: Vec<usize>, table: Vec<CMatrix> },
    /// Along `axis`: `left[i mod |left|]` for i < core_start, `core[i − core_start]`
    /// on the core, `right[i mod |right|]` beyond it. Tails use absolute phases.
    EventuallyPeriodic { axis: usize, left: Vec<CMatrix>, core_start: i64, core: Vec<CMatrix>, right: Vec<CMatrix> },
    FiniteSupport { fiber: usize, table: BTreeMap<MultiIndex, CMatrix> },
    Tabulated { table: BTreeMap<MultiIndex, CMatrix>, default: CMatrix },
}

/// Where a sequence stops being periodic along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxisProfile {
    /// Inclusive range outside which the sequence is periodic along the axis.
    pub core: Option<(i64, i64)>,
    pub left_period: usize,
    pub right_period: usize,
}

impl AxisProfile {
    const FLAT: AxisProfile = AxisProfile { core: None, left_period: 1, right_period: 1 };
}

fn rotate(table: &[CMatrix], by: i64) -> Vec<CMatrix> {
    let p = table.len() as i64;
    (0..p).map(|r| table[(r + by).rem_euclid(p) as usize].clone()).collect()
}

/// Smallest period of a cyclic table.
fn minimal_cycle(table: &[CMatrix]) -> Vec<CMatrix> {
    let p = table.len();
    for q in 1..p {
        if p % q == 0 && (0..p).all(|i| table[i] == table[i % q]) {
            return table[..q].to_vec();
        }
    }
    table.to_vec()
}

fn key_range(keys: impl Iterator<Item = i64>) -> Option<(i64, i64)> {
    keys.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

impl CoefficientSequence {
    pub fn constant(m: CMatrix) -> Self {
        Self::Constant(m)
    }

    pub fn periodic_1d(table: Vec<CMatrix>) -> Self {
        Self::Periodic { periods: vec![table.len()], table }
    }

    pub fn eventually_periodic(left: Vec<CMatrix>, core_start: i64, core: Vec<CMatrix>, right: Vec<CMatrix>) -> Self {
        Self::EventuallyPeriodic { axis: 0, left, core_start, core, right }
    }

    pub fn finite_support(fiber: usize, entries: impl IntoIterator<Item = (MultiIndex, CMatrix)>) -> Self {
        Self::FiniteSupport { fiber, table: entries.into_iter().collect() }
    }

    pub fn class_name(&self) -> &'static str {
        match self {
            Self::Constant(_) => "constant",
            Self::Periodic { .. } => "periodic",
            Self::EventuallyPeriodic { .. } => "eventually_periodic",
            Self::FiniteSupport { .. } => "finite_support",
            Self::Tabulated { .. } => "tabulated",
        }
    }

    pub fn fiber(&self) -> usize {
        match self {
            Self::Constant(m) => m.nrows(),
            Self::Periodic { table, .. } => table[0].nrows(),
            Self::EventuallyPeriodic { left, .. } => left[0].nrows(),
            Self::FiniteSupport { fiber, .. } => *fiber,
            Self::Tabulated { default, .. } => default.nrows(),
        }
    }

    /// Structural validation against the lattice dimension and fiber size.
    pub fn validate(&self, dim: usize, fiber: usize) -> Result<()> {
        let square = |m: &CMatrix| m.nrows() == fiber && m.ncols() == fiber;
        let bad = |what: &str| Err(Error::InvalidArgument(format!("{} coefficient: {what}", self.class_name())));
        let blocks_ok = match self {
            Self::Constant(m) => square(m),
            Self::Periodic { periods, table } => {
                if periods.len() != dim || periods.contains(&0) {
                    return bad("one positive period per lattice axis required");
                }
                if table.len() != periods.iter().product::<usize>() {
                    return bad("table length must equal the product of the periods");
                }
                table.iter().all(square)
            }
            Self::EventuallyPeriodic { axis, left, core, right, .. } => {
                if *axis >= dim {
                    return bad("axis out of range");
                }
                if left.is_empty() || right.is_empty() {
                    return bad("tails must be nonempty");
                }
                left.iter().chain(core).chain(right).all(square)
            }
            Self::FiniteSupport { fiber: f, table } => {
                *f == fiber && table.values().all(square) && table.keys().all(|k| k.dim() == dim)
            }
            Self::Tabulated { table, default } => {
                square(default) && table.values().all(square) && table.keys().all(|k| k.dim() == dim)
            }
        };
        if blocks_ok {
            Ok(())
        } else {
            bad(&format!("blocks must be {fiber}×{fiber} and sites must lie in Z^{dim}"))
        }
    }

    /// The value at `n`; `None` stands for the zero block.
    pub fn get(&self, n: &MultiIndex) -> Option<&CMatrix> {
        match self {
            Self::Constant(m) => Some(m),
            Self::Periodic { periods, table } => {
                let mut idx = 0usize;
                for (a, p) in periods.iter().enumerate() {
                    idx = idx * p + n.get(a).rem_euclid(*p as i64) as usize;
                }
                Some(&table[idx])
            }
            Self::EventuallyPeriodic { axis, left, core_start, core, right } => {
                let i = n.get(*axis);
                let off = i - core_start;
                if off < 0 {
                    Some(&left[i.rem_euclid(left.len() as i64) as usize])
                } else if (off as usize) < core.len() {
                    Some(&core[off as usize])
                } else {
                    Some(&right[i.rem_euclid(right.len() as i64) as usize])
                }
            }
            Self::FiniteSupport { table, .. } => table.get(n),
            Self::Tabulated { table, default } => Some(table.get(n).unwrap_or(default)),
        }
    }

    pub fn value(&self, n: &MultiIndex) -> CMatrix {
        self.get(n).cloned().unwrap_or_else(|| zero_block(self.fiber()))
    }

    pub fn axis_profile(&self, axis: usize) -> AxisProfile {
        match self {
            Self::Constant(_) => AxisProfile::FLAT,
            Self::Periodic { periods, .. } => {
                AxisProfile { core: None, left_period: periods[axis], right_period: periods[axis] }
            }
            Self::EventuallyPeriodic { axis: ax, left, core_start, core, right } => {
                if *ax != axis {
                    return AxisProfile::FLAT;
                }
                // the switch point matters even when the core is empty
                let core = Some((core_start - 1, core_start + core.len() as i64));
                AxisProfile { core, left_period: left.len(), right_period: right.len() }
            }
            Self::FiniteSupport { table, .. } | Self::Tabulated { table, .. } => {
                AxisProfile { core: key_range(table.keys().map(|k| k.get(axis))), ..AxisProfile::FLAT }
            }
        }
    }

    /// The translated sequence n ↦ a_{n+s} (the coefficient of V_{−s} aI V_s).
    pub fn translate(&self, s: &MultiIndex) -> Self {
        match self {
            Self::Constant(m) => Self::Constant(m.clone()),
            Self::Periodic { periods, table } => {
                let mut out = Vec::with_capacity(table.len());
                let total: usize = periods.len();
                let mut residues = vec![0usize; total];
                for _ in 0..table.len() {
                    let mut idx = 0usize;
                    for (a, p) in periods.iter().enumerate() {
                        let r = (residues[a] as i64 + s.get(a)).rem_euclid(*p as i64) as usize;
                        idx = idx * p + r;
                    }
                    out.push(table[idx].clone());
                    for a in (0..total).rev() {
                        residues[a] += 1;
                        if residues[a] < periods[a] {
                            break;
                        }
                        residues[a] = 0;
                    }
                }
                Self::Periodic { periods: periods.clone(), table: out }
            }
            Self::EventuallyPeriodic { axis, left, core_start, core, right } => {
                let by = s.get(*axis);
                Self::EventuallyPeriodic {
                    axis: *axis,
                    left: rotate(left, by),
                    core_start: core_start - by,
                    core: core.clone(),
                    right: rotate(right, by),
                }
            }
            Self::FiniteSupport { fiber, table } => {
                Self::FiniteSupport { fiber: *fiber, table: table.iter().map(|(k, v)| (*k - *s, v.clone())).collect() }
            }
            Self::Tabulated { table, default } => Self::Tabulated {
                table: table.iter().map(|(k, v)| (*k - *s, v.clone())).collect(),
                default: default.clone(),
            },
        }
    }

    /// Apply a linear block map (f(0) = 0) entrywise.
    pub fn map_linear(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let all = |v: &[CMatrix]| v.iter().map(&f).collect::<Vec<_>>();
        match self {
            Self::Constant(m) => Self::Constant(f(m)),
            Self::Periodic { periods, table } => Self::Periodic { periods: periods.clone(), table: all(table) },
            Self::EventuallyPeriodic { axis, left, core_start, core, right } => Self::EventuallyPeriodic {
                axis: *axis,
                left: all(left),
                core_start: *core_start,
                core: all(core),
                right: all(right),
            },
            Self::FiniteSupport { fiber, table } => {
                Self::FiniteSupport { fiber: *fiber, table: table.iter().map(|(k, v)| (*k, f(v))).collect() }
            }
            Self::Tabulated { table, default } => Self::Tabulated {
                table: table.iter().map(|(k, v)| (*k, f(v))).collect(),
                default: f(default),
            },
        }
    }

    pub fn adjoint_blocks(&self) -> Self {
        self.map_linear(|m| m.adjoint())
    }

    /// sup_n ‖a_n‖ with the spectral norm on blocks.
    pub fn sup_norm(&self) -> f64 {
        let blocks: Vec<&CMatrix> = match self {
            Self::Constant(m) => vec![m],
            Self::Periodic { table, .. } => table.iter().collect(),
            Self::EventuallyPeriodic { left, core, right, .. } => left.iter().chain(core).chain(right).collect(),
            Self::FiniteSupport { table, .. } => table.values().collect(),
            Self::Tabulated { table, default } => table.values().chain(std::iter::once(default)).collect(),
        };
        blocks.into_iter().map(spectral_norm).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Constant(m) => is_zero_block(m),
            Self::Periodic { table, .. } => table.iter().all(is_zero_block),
            Self::EventuallyPeriodic { left, core, right, .. } => {
                left.iter().chain(core).chain(right).all(is_zero_block)
            }
            Self::FiniteSupport { table, .. } => table.values().all(is_zero_block),
            Self::Tabulated { table, default } => is_zero_block(default) && table.values().all(is_zero_block),
        }
    }

    /// Sites carrying nonzero values, when there are finitely many of them.
    pub fn nonzero_sites(&self, dim: usize) -> Option<Vec<MultiIndex>> {
        if self.is_zero() {
            return Some(Vec::new());
        }
        match self {
            Self::FiniteSupport { table, .. } => {
                Some(table.iter().filter(|(_, v)| !is_zero_block(v)).map(|(k, _)| *k).collect())
            }
            Self::Tabulated { table, default } if is_zero_block(default) => {
                Some(table.iter().filter(|(_, v)| !is_zero_block(v)).map(|(k, _)| *k).collect())
            }
            Self::EventuallyPeriodic { left, core_start, core, right, .. }
                if dim == 1 && left.iter().chain(right).all(is_zero_block) =>
            {
                Some(
                    core.iter()
                        .enumerate()
                        .filter(|(_, v)| !is_zero_block(v))
                        .map(|(i, _)| MultiIndex::d1(core_start + i as i64))
                        .collect(),
                )
            }
            _ => None,
        }
    }

    pub fn is_finitely_supported(&self, dim: usize) -> bool {
        self.nonzero_sites(dim).is_some()
    }

    /// Exact pointwise comparison: both sequences are evaluated on a box that
    /// covers every core plus one full aligned period on each side.
    pub fn semantic_eq(&self, other: &Self, dim: usize, tol: f64) -> bool {
        if self.fiber() != other.fiber() {
            return false;
        }
        let mut ranges = Vec::with_capacity(dim);
        for axis in 0..dim {
            let (pa, pb) = (self.axis_profile(axis), other.axis_profile(axis));
            let cores: Vec<(i64, i64)> = [pa.core, pb.core].into_iter().flatten().collect();
            let lo = cores.iter().map(|c| c.0).min().unwrap_or(0);
            let hi = cores.iter().map(|c| c.1).max().unwrap_or(0);
            let left = lcm(pa.left_period, pb.left_period) as i64;
            let right = lcm(pa.right_period, pb.right_period) as i64;
            ranges.push((lo - left, hi + right));
        }
        let zero = zero_block(self.fiber());
        let eq = |n: &MultiIndex| {
            approx_eq_blocks(self.get(n).unwrap_or(&zero), other.get(n).unwrap_or(&zero), tol)
        };
        match dim {
            1 => (ranges[0].0..=ranges[0].1).all(|i| eq(&MultiIndex::d1(i))),
            _ => (ranges[0].0..=ranges[0].1)
                .all(|i| (ranges[1].0..=ranges[1].1).all(|j| eq(&MultiIndex::d2(i, j)))),
        }
    }

    /// Pointwise combination n ↦ f(a_n, b_n), closed over the classes.
    pub fn combine(&self, other: &Self, dim: usize, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        let d = self.fiber();
        if d != other.fiber() {
            return Err(Error::DimensionMismatch("fiber dimensions differ".into()));
        }
        use CoefficientSequence as C;
        if let (C::Constant(a), C::Constant(b)) = (self, other) {
            return Ok(C::Constant(f(a, b)));
        }
        let tabular = |s: &Self| matches!(s, C::Tabulated { .. } | C::FiniteSupport { .. } | C::Constant(_));
        let needs_table = matches!(self, C::Tabulated { .. })
            || matches!(other, C::Tabulated { .. })
            || (dim == 2 && (matches!(self, C::FiniteSupport { .. }) || matches!(other, C::FiniteSupport { .. })));
        if needs_table {
            if !(tabular(self) && tabular(other)) {
                return Err(Error::UnsupportedClass(format!(
                    "cannot combine {} with {} on Z^{dim}",
                    self.class_name(),
                    other.class_name()
                )));
            }
            let zero = zero_block(d);
            let default_of = |s: &Self| match s {
                C::Tabulated { default, .. } => default.clone(),
                C::Constant(m) => m.clone(),
                _ => zero.clone(),
            };
            let keys: BTreeSet<MultiIndex> = [self, other]
                .into_iter()
                .filter_map(|s| match s {
                    C::Tabulated { table, .. } | C::FiniteSupport { table, .. } => Some(table.keys().copied()),
                    _ => None,
                })
                .flatten()
                .collect();
            let default = f(&default_of(self), &default_of(other));
            let table = keys
                .into_iter()
                .map(|k| (k, f(self.get(&k).unwrap_or(&zero), other.get(&k).unwrap_or(&zero))))
                .collect();
            return Ok(C::Tabulated { table, default }.simplify(dim));
        }
        if dim == 2 {
            if let (Some(a), Some(b)) = (self.as_periodic(dim), other.as_periodic(dim)) {
                return combine_periodic(&a, &b, f).map(|s| s.simplify(dim));
            }
        }
        let axis = match (self, other) {
            (C::EventuallyPeriodic { axis, .. }, _) | (_, C::EventuallyPeriodic { axis, .. }) => *axis,
            _ => 0,
        };
        let anchor = |s: &Self| match s {
            C::EventuallyPeriodic { core_start, .. } => Some(*core_start),
            C::FiniteSupport { table, .. } => table.keys().next().map(|k| k.get(0)),
            _ => None,
        };
        let at = anchor(self).or(anchor(other)).unwrap_or(0);
        match (self.as_eventually_periodic(dim, axis, at), other.as_eventually_periodic(dim, axis, at)) {
            (Some(a), Some(b)) => combine_eventually_periodic(&a, &b, axis, f).map(|s| s.simplify(dim)),
            _ => Err(Error::UnsupportedClass(format!(
                "cannot combine {} with {} on Z^{dim}",
                self.class_name(),
                other.class_name()
            ))),
        }
    }

    fn as_periodic(&self, dim: usize) -> Option<(Vec<usize>, Vec<CMatrix>)> {
        match self {
            Self::Constant(m) => Some((vec![1; dim], vec![m.clone()])),
            Self::Periodic { periods, table } => Some((periods.clone(), table.clone())),
            Self::EventuallyPeriodic { axis, left, core, right, .. } if core.is_empty() && left == right => {
                let mut periods = vec![1; dim];
                periods[*axis] = left.len();
                Some((periods, left.clone()))
            }
            _ => None,
        }
    }

    /// Normal form (left, core_start, core, right) along `axis`.
    /// Sequences without a switch point are anchored at `anchor`.
    fn as_eventually_periodic(&self, dim: usize, axis: usize, anchor: i64) -> Option<EpParts> {
        match self {
            Self::Constant(m) => Some((vec![m.clone()], anchor, Vec::new(), vec![m.clone()])),
            Self::Periodic { periods, table } => {
                if (0..dim).any(|a| a != axis && periods[a] != 1) {
                    return None;
                }
                Some((table.clone(), anchor, Vec::new(), table.clone()))
            }
            Self::EventuallyPeriodic { axis: ax, left, core_start, core, right } if *ax == axis => {
                Some((left.clone(), *core_start, core.clone(), right.clone()))
            }
            Self::FiniteSupport { fiber, table } if dim == 1 => {
                let zero = zero_block(*fiber);
                let Some((lo, hi)) = key_range(table.keys().map(|k| k.get(0))) else {
                    return Some((vec![zero.clone()], anchor, Vec::new(), vec![zero]));
                };
                let core = (lo..=hi).map(|i| table.get(&MultiIndex::d1(i)).cloned().unwrap_or_else(|| zero.clone())).collect();
                Some((vec![zero.clone()], lo, core, vec![zero]))
            }
            _ => None,
        }
    }

    /// Canonical representative: minimal tail periods, trimmed cores, and the
    /// simplest class that carries the same values.
    pub fn simplify(self, dim: usize) -> Self {
        match self {
            Self::Periodic { periods, table } => {
                if table.iter().all(|m| *m == table[0]) {
                    Self::Constant(table[0].clone())
                } else {
                    Self::Periodic { periods, table }
                }
            }
            Self::EventuallyPeriodic { axis, left, mut core_start, core, right } => {
                let left = minimal_cycle(&left);
                let right = minimal_cycle(&right);
                let mut core: std::collections::VecDeque<CMatrix> = core.into();
                while let Some(first) = core.front() {
                    if *first == left[core_start.rem_euclid(left.len() as i64) as usize] {
                        core.pop_front();
                        core_start += 1;
                    } else {
                        break;
                    }
                }
                while let Some(last) = core.back() {
                    let i = core_start + core.len() as i64 - 1;
                    if *last == right[i.rem_euclid(right.len() as i64) as usize] {
                        core.pop_back();
                    } else {
                        break;
                    }
                }
                let core: Vec<CMatrix> = core.into();
                if core.is_empty() && left == right {
                    let mut periods = vec![1; dim];
                    periods[axis] = left.len();
                    return Self::Periodic { periods, table: left }.simplify(dim);
                }
                if dim == 1 && left.len() == 1 && right.len() == 1 && is_zero_block(&left[0]) && is_zero_block(&right[0]) {
                    let fiber = left[0].nrows();
                    let table = core
                        .into_iter()
                        .enumerate()
                        .filter(|(_, v)| !is_zero_block(v))
                        .map(|(i, v)| (MultiIndex::d1(core_start + i as i64), v))
                        .collect();
                    return Self::FiniteSupport { fiber, table };
                }
                Self::EventuallyPeriodic { axis, left, core_start, core, right }
            }
            Self::FiniteSupport { fiber, table } => {
                Self::FiniteSupport { fiber, table: table.into_iter().filter(|(_, v)| !is_zero_block(v)).collect() }
            }
            Self::Tabulated { table, default } => {
                let table: BTreeMap<_, _> = table.into_iter().filter(|(_, v)| *v != default).collect();
                if table.is_empty() {
                    Self::Constant(default)
                } else if is_zero_block(&default) {
                    Self::FiniteSupport { fiber: default.nrows(), table }
                } else {
                    Self::Tabulated { table, default }
                }
            }
            c @ Self::Constant(_) => c,
        }
    }
}

fn combine_periodic(
    a: &(Vec<usize>, Vec<CMatrix>),
    b: &(Vec<usize>, Vec<CMatrix>),
    f: impl Fn(&CMatrix, &CMatrix) -> CMatrix,
) -> Result<CoefficientSequence> {
    let periods: Vec<usize> = a.0.iter().zip(&b.0).map(|(p, q)| lcm(*p, *q)).collect();
    let total: usize = periods.iter().product();
    if total > MAX_PERIOD {
        return Err(Error::UnsupportedClass(format!("aligned period {total} exceeds {MAX_PERIOD}")));
    }
    let lookup = |(ps, table): &(Vec<usize>, Vec<CMatrix>), res: &[usize]| {
        let mut idx = 0usize;
        for (p, r) in ps.iter().zip(res) {
            idx = idx * p + r % p;
        }
        table[idx].clone()
    };
    let mut table = Vec::with_capacity(total);
    for flat in 0..total {
        let mut res = vec![0usize; periods.len()];
        let mut rem = flat;
        for axis in (0..periods.len()).rev() {
            res[axis] = rem % periods[axis];
            rem /= periods[axis];
        }
        table.push(f(&lookup(a, &res), &lookup(b, &res)));
    }
    Ok(CoefficientSequence::Periodic { periods, table })
}

type EpParts = (Vec<CMatrix>, i64, Vec<CMatrix>, Vec<CMatrix>);

fn combine_eventually_periodic(
    a: &EpParts,
    b: &EpParts,
    axis: usize,
    f: impl Fn(&CMatrix, &CMatrix) -> CMatrix,
) -> Result<CoefficientSequence> {
    let left_p = lcm(a.0.len(), b.0.len());
    let right_p = lcm(a.3.len(), b.3.len());
    if left_p > MAX_PERIOD || right_p > MAX_PERIOD {
        return Err(Error::UnsupportedClass(format!("aligned tail period exceeds {MAX_PERIOD}")));
    }
    let eval = |(left, start, core, right): &EpParts, i: i64| -> CMatrix {
        let off = i - start;
        if off < 0 {
            left[i.rem_euclid(left.len() as i64) as usize].clone()
        } else if (off as usize) < core.len() {
            core[off as usize].clone()
        } else {
            right[i.rem_euclid(right.len() as i64) as usize].clone()
        }
    };
    let lo = a.1.min(b.1);
    let hi = (a.1 + a.2.len() as i64).max(b.1 + b.2.len() as i64);
    // Tail values are sampled at representatives far outside both cores.
    let far_left = lo - (left_p as i64) * (1 + (hi - lo) / left_p as i64 + 1);
    let left: Vec<CMatrix> = (0..left_p as i64)
        .map(|r| {
            let i = far_left + (r - far_left).rem_euclid(left_p as i64);
            f(&eval(a, i), &eval(b, i))
        })
        .collect();
    let far_right = hi + (right_p as i64) * 2;
    let right: Vec<CMatrix> = (0..right_p as i64)
        .map(|r| {
            let i = far_right + (r - far_right).rem_euclid(right_p as i64);
            f(&eval(a, i), &eval(b, i))
        })
        .collect();
    let core = (lo..hi).map(|i| f(&eval(a, i), &eval(b, i))).collect();
    Ok(CoefficientSequence::EventuallyPeriodic { axis, left, core_start: lo, core, right })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_block;

    fn r(x: f64) -> CMatrix {
        real_block(x)
    }

    fn ep(left: &[f64], start: i64, core: &[f64], right: &[f64]) -> CoefficientSequence {
        CoefficientSequence::eventually_periodic(
            left.iter().map(|&x| r(x)).collect(),
            start,
            core.iter().map(|&x| r(x)).collect(),
            right.iter().map(|&x| r(x)).collect(),
        )
    }

    #[test]
    fn eventually_periodic_evaluation_uses_absolute_phase() {
        let a = ep(&[1.0], 0, &[5.0, 6.0], &[2.0, 3.0]);
        let at = |i| a.value(&MultiIndex::d1(i))[(0, 0)].re;
        assert_eq!(at(-7), 1.0);
        assert_eq!(at(0), 5.0);
        assert_eq!(at(1), 6.0);
        assert_eq!(at(2), 2.0);
        assert_eq!(at(3), 3.0);
        assert_eq!(at(10), 2.0);
    }

    #[test]
    fn translation_matches_pointwise_definition() {
        let seqs = [
            ep(&[1.0, -1.0], -2, &[5.0, 6.0, 7.0], &[2.0, 3.0, 4.0]),
            CoefficientSequence::periodic_1d(vec![r(1.0), r(2.0), r(3.0)]),
            CoefficientSequence::finite_support(1, [(MultiIndex::d1(2), r(4.0))]),
        ];
        for a in &seqs {
            for s in -5..5 {
                let b = a.translate(&MultiIndex::d1(s));
                for i in -12..12 {
                    assert_eq!(b.value(&MultiIndex::d1(i)), a.value(&MultiIndex::d1(i + s)));
                }
            }
        }
    }

    #[test]
    fn periodic_2d_translation() {
        let table: Vec<CMatrix> = (0..6).map(|v| r(v as f64)).collect();
        let a = CoefficientSequence::Periodic { periods: vec![2, 3], table };
        let s = MultiIndex::d2(1, -2);
        let b = a.translate(&s);
        for i in -4..4 {
            for j in -4..4 {
                let n = MultiIndex::d2(i, j);
                assert_eq!(b.value(&n), a.value(&(n + s)));
            }
        }
    }

    #[test]
    fn combination_aligns_periods() {
        let a = ep(&[1.0, 2.0], 0, &[9.0], &[1.0, 2.0]);
        let b = ep(&[0.5, 0.5, 3.0], 1, &[], &[4.0, 5.0, 6.0]);
        let c = a.combine(&b, 1, |x, y| x * y).unwrap();
        for i in -20..20 {
            let n = MultiIndex::d1(i);
            assert_eq!(c.value(&n), a.value(&n) * b.value(&n), "at {i}");
        }
        match &c {
            CoefficientSequence::EventuallyPeriodic { left, right, .. } => {
                assert_eq!(left.len(), 6);
                assert_eq!(right.len(), 6);
            }
            other => panic!("unexpected class {}", other.class_name()),
        }
    }

    #[test]
    fn simplify_reaches_simplest_class() {
        assert!(matches!(ep(&[2.0], 0, &[2.0, 2.0], &[2.0]).simplify(1), CoefficientSequence::Constant(_)));
        assert!(matches!(ep(&[0.0], 0, &[1.0], &[0.0]).simplify(1), CoefficientSequence::FiniteSupport { .. }));
        assert!(matches!(
            ep(&[1.0, 2.0], 0, &[1.0, 2.0], &[1.0, 2.0, 1.0, 2.0]).simplify(1),
            CoefficientSequence::Periodic { .. }
        ));
    }

    #[test]
    fn semantic_equality_across_classes() {
        let a = ep(&[3.0], 0, &[], &[3.0]);
        let b = CoefficientSequence::Constant(r(3.0));
        assert!(a.semantic_eq(&b, 1, 0.0));
        let c = ep(&[3.0], 4, &[3.0, 3.5], &[3.0]);
        assert!(!a.semantic_eq(&c, 1, 1e-12));
    }

    #[test]
    fn tabulated_combines_with_finite_support() {
        let t = CoefficientSequence::Tabulated { table: [(MultiIndex::d1(3), r(7.0))].into(), default: r(1.0) };
        let f = CoefficientSequence::finite_support(1, [(MultiIndex::d1(-1), r(2.0))]);
        let s = t.combine(&f, 1, |x, y| x + y).unwrap();
        assert_eq!(s.value(&MultiIndex::d1(3))[(0, 0)].re, 7.0);
        assert_eq!(s.value(&MultiIndex::d1(-1))[(0, 0)].re, 3.0);
        assert_eq!(s.value(&MultiIndex::d1(50))[(0, 0)].re, 1.0);
        assert!(t.combine(&CoefficientSequence::periodic_1d(vec![r(1.0), r(0.0)]), 1, |x, y| x + y).is_err());
    }
}
