//! Limit operators computed symbolically per coefficient class, operator
//! spectra with shift-orbit metadata, and the numerical P-strong witness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandop::{BandOperator, CoefficientSequence};
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, NormTag, Window};
use crate::linalg::{lcm, operator_norm, real_block, zero_block};

/// How a sequence h_n behaves along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "end")]
pub enum End {
    /// h_n → +∞ with h_n ≡ phase modulo every period on the axis.
    Plus { phase: i64 },
    Minus { phase: i64 },
    /// h_n stays at `offset`.
    Bounded { offset: i64 },
}

impl End {
    fn is_unbounded(&self) -> bool {
        !matches!(self, End::Bounded { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// A finite prefix of h; its second half must show the asymptotics.
    Explicit(Vec<MultiIndex>),
    /// One end per axis.
    Tail(Vec<End>),
}

impl Direction {
    pub fn plus() -> Self {
        Direction::Tail(vec![End::Plus { phase: 0 }])
    }

    pub fn minus() -> Self {
        Direction::Tail(vec![End::Minus { phase: 0 }])
    }
}

/// lcm of the (left, right) tail periods of all coefficients along `axis`.
fn axis_periods(a: &BandOperator, axis: usize) -> (usize, usize) {
    a.diagonals().values().fold((1, 1), |(l, r), seq| {
        let p = seq.axis_profile(axis);
        (lcm(l, p.left_period), lcm(r, p.right_period))
    })
}

fn check_supported(a: &BandOperator) -> Result<()> {
    match a.diagonals().iter().find(|(_, s)| matches!(s, CoefficientSequence::Tabulated { .. })) {
        Some((k, _)) => Err(Error::UnsupportedClass(format!(
            "diagonal {k} is tabulated without declared structure; its limit operators cannot be enumerated"
        ))),
        None => Ok(()),
    }
}

fn resolve(a: &BandOperator, dir: &Direction) -> Result<Vec<End>> {
    let ends = match dir {
        Direction::Tail(ends) => ends.clone(),
        Direction::Explicit(h) => {
            if h.len() < 4 {
                return Err(Error::InvalidArgument("an explicit direction needs at least 4 points".into()));
            }
            if h.iter().any(|p| p.dim() != a.dim()) {
                return Err(Error::DimensionMismatch("direction points do not live in the operator's lattice".into()));
            }
            let tail = &h[h.len() / 2..];
            (0..a.dim())
                .map(|axis| {
                    let v: Vec<i64> = tail.iter().map(|p| p.get(axis)).collect();
                    let (left, right) = axis_periods(a, axis);
                    if v.iter().all(|&x| x == v[0]) {
                        return Ok(End::Bounded { offset: v[0] });
                    }
                    let (period, end): (usize, fn(i64) -> End) = if v.windows(2).all(|w| w[1] > w[0]) {
                        (right, |phase| End::Plus { phase })
                    } else if v.windows(2).all(|w| w[1] < w[0]) {
                        (left, |phase| End::Minus { phase })
                    } else {
                        return Err(Error::NonStabilizingDirection(format!(
                            "coordinate {axis} is neither eventually constant nor strictly monotone"
                        )));
                    };
                    let phases: Vec<i64> = v.iter().map(|x| x.rem_euclid(period as i64)).collect();
                    if phases.iter().any(|&r| r != phases[0]) {
                        return Err(Error::NonStabilizingDirection(format!(
                            "coordinate {axis} does not settle modulo the period {period}"
                        )));
                    }
                    Ok(end(phases[0]))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    if ends.len() != a.dim() {
        return Err(Error::DimensionMismatch(format!("direction has {} ends, lattice has {} axes", ends.len(), a.dim())));
    }
    if !ends.iter().any(End::is_unbounded) {
        return Err(Error::InvalidArgument("the direction does not tend to infinity".into()));
    }
    Ok(ends)
}

fn shift_vector(ends: &[End]) -> MultiIndex {
    let coords: Vec<i64> = ends
        .iter()
        .map(|e| match *e {
            End::Plus { phase } | End::Minus { phase } => phase,
            End::Bounded { offset } => offset,
        })
        .collect();
    MultiIndex::new(&coords).expect("one end per axis")
}

fn limit_coefficient(seq: &CoefficientSequence, ends: &[End], dim: usize) -> Result<CoefficientSequence> {
    use CoefficientSequence as C;
    let s = shift_vector(ends);
    let out = match seq {
        C::Tabulated { .. } => return Err(Error::UnsupportedClass("tabulated coefficient".into())),
        C::FiniteSupport { fiber, .. } => C::Constant(zero_block(*fiber)),
        C::Constant(m) => C::Constant(m.clone()),
        C::Periodic { .. } => seq.translate(&s),
        C::EventuallyPeriodic { axis, left, right, .. } => {
            let tail = |table: &Vec<_>| {
                let mut periods = vec![1; dim];
                periods[*axis] = table.len();
                C::Periodic { periods, table: table.clone() }.translate(&s)
            };
            match ends[*axis] {
                End::Plus { .. } => tail(right),
                End::Minus { .. } => tail(left),
                End::Bounded { .. } => seq.translate(&s),
            }
        }
    };
    Ok(out.simplify(dim))
}

/// A_h = P-lim V_{−h_n} A V_{h_n}, diagonal by diagonal.
pub fn limit_operator(a: &BandOperator, dir: &Direction) -> Result<BandOperator> {
    check_supported(a)?;
    let ends = resolve(a, dir)?;
    let mut out = BandOperator::zero(a.dim(), a.fiber())?;
    for (k, seq) in a.diagonals() {
        out = out.with_diagonal(*k, limit_coefficient(seq, &ends, a.dim())?)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OrbitKind {
    /// Shift invariant: the orbit is the representative alone.
    Fixed,
    /// Periodic coefficients: finitely many distinct translates.
    Cycle { size: usize },
    /// All translates along these axes are distinct members.
    Translates { axes: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumOrbit {
    pub operator: BandOperator,
    pub orbit: OrbitKind,
    #[serde(skip)]
    members: Vec<BandOperator>,
}

impl<'de> Deserialize<'de> for SpectrumOrbit {
    /// The orbit annotation is recomputed from the operator.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            operator: BandOperator,
        }
        Ok(SpectrumOrbit::new(Raw::deserialize(d)?.operator))
    }
}

impl SpectrumOrbit {
    pub fn new(op: BandOperator) -> Self {
        use CoefficientSequence as C;
        let diags = op.diagonals();
        if diags.values().all(|s| matches!(s, C::Constant(_))) {
            return Self { members: vec![op.clone()], operator: op, orbit: OrbitKind::Fixed };
        }
        if diags.values().all(|s| matches!(s, C::Constant(_) | C::Periodic { .. })) {
            let periods: Vec<usize> = (0..op.dim()).map(|ax| axis_periods(&op, ax).1).collect();
            let mut members: Vec<BandOperator> = Vec::new();
            let offsets = crate::lattice::SiteBox::new(
                MultiIndex::zero(op.dim()),
                MultiIndex::new(&periods.iter().map(|&p| p as i64 - 1).collect::<Vec<_>>()).unwrap(),
            );
            for s in offsets.sites() {
                let t = op.translate(&s);
                if !members.iter().any(|m| m.semantic_eq(&t, 0.0)) {
                    members.push(t);
                }
            }
            return Self { orbit: OrbitKind::Cycle { size: members.len() }, members, operator: op };
        }
        let axes = (0..op.dim())
            .filter(|&ax| diags.values().any(|s| s.axis_profile(ax).core.is_some()))
            .collect();
        Self { members: vec![op.clone()], operator: op, orbit: OrbitKind::Translates { axes } }
    }

    pub fn members(&self) -> &[BandOperator] {
        &self.members
    }

    /// Whether `b` is a member of this orbit.
    pub fn contains(&self, b: &BandOperator, tol: f64) -> bool {
        if b.dim() != self.operator.dim() || b.fiber() != self.operator.fiber() {
            return false;
        }
        match &self.orbit {
            OrbitKind::Fixed | OrbitKind::Cycle { .. } => self.members.iter().any(|m| m.semantic_eq(b, tol)),
            OrbitKind::Translates { axes } => {
                let dim = self.operator.dim();
                let ranges: Vec<Vec<i64>> = (0..dim)
                    .map(|ax| {
                        let (l, r) = axis_periods(&self.operator, ax);
                        let period = lcm(l, r) as i64;
                        if !axes.contains(&ax) {
                            return (0..period).collect();
                        }
                        let lo = |op: &BandOperator| {
                            op.diagonals().values().filter_map(|s| s.axis_profile(ax).core).map(|c| c.0).min()
                        };
                        let guess = match (lo(&self.operator), lo(b)) {
                            (Some(x), Some(y)) => x - y,
                            _ => 0,
                        };
                        (guess - period - 2..=guess + period + 2).collect()
                    })
                    .collect();
                let candidates: Vec<MultiIndex> = match dim {
                    1 => ranges[0].iter().map(|&i| MultiIndex::d1(i)).collect(),
                    _ => ranges[0].iter().flat_map(|&i| ranges[1].iter().map(move |&j| MultiIndex::d2(i, j))).collect(),
                };
                candidates.iter().any(|s| self.operator.translate(s).semantic_eq(b, tol))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OperatorSpectrum {
    pub orbits: Vec<SpectrumOrbit>,
}

impl OperatorSpectrum {
    pub fn from_operators(ops: impl IntoIterator<Item = BandOperator>) -> Self {
        let mut spec = OperatorSpectrum { orbits: Vec::new() };
        for op in ops {
            spec.insert(op);
        }
        spec
    }

    pub fn insert(&mut self, op: BandOperator) {
        if !self.contains(&op, 0.0) {
            self.orbits.push(SpectrumOrbit::new(op));
        }
    }

    pub fn contains(&self, b: &BandOperator, tol: f64) -> bool {
        self.orbits.iter().any(|o| o.contains(b, tol))
    }

    pub fn representatives(&self) -> impl Iterator<Item = &BandOperator> {
        self.orbits.iter().map(|o| &o.operator)
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// Every orbit of `self` lies in `other` with the same orbit kind.
    pub fn is_subset_of(&self, other: &Self, tol: f64) -> bool {
        self.orbits.iter().all(|o| other.orbits.iter().any(|p| p.orbit == o.orbit && p.contains(&o.operator, tol)))
    }

    pub fn same_as(&self, other: &Self, tol: f64) -> bool {
        self.is_subset_of(other, tol) && other.is_subset_of(self, tol)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_operators(self.representatives().map(BandOperator::adjoint))
    }
}

/// All tail and phase combinations; for N = 2 the axis-aligned and quadrant
/// directions, with bounded coordinates fixed at 0 (other offsets are
/// translates along that axis).
pub fn operator_spectrum(a: &BandOperator) -> Result<OperatorSpectrum> {
    check_supported(a)?;
    let per_axis: Vec<Vec<End>> = (0..a.dim())
        .map(|ax| {
            let (l, r) = axis_periods(a, ax);
            let mut v: Vec<End> = (0..r as i64).map(|phase| End::Plus { phase }).collect();
            v.extend((0..l as i64).map(|phase| End::Minus { phase }));
            if a.dim() > 1 {
                v.push(End::Bounded { offset: 0 });
            }
            v
        })
        .collect();
    let combos: Vec<Vec<End>> = match a.dim() {
        1 => per_axis[0].iter().map(|e| vec![*e]).collect(),
        _ => per_axis[0].iter().flat_map(|e0| per_axis[1].iter().map(move |e1| vec![*e0, *e1])).collect(),
    };
    let limits: Vec<BandOperator> = combos
        .par_iter()
        .filter(|ends| ends.iter().any(End::is_unbounded))
        .map(|ends| limit_operator(a, &Direction::Tail(ends.clone())))
        .collect::<Result<_>>()?;
    Ok(OperatorSpectrum::from_operators(limits))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AdjointSpectrumReport {
    pub equal: bool,
    /// σ_op(A*).
    pub of_adjoint: OperatorSpectrum,
    /// (σ_op(A))*.
    pub adjoint_of: OperatorSpectrum,
}

pub fn adjoint_spectrum_check(a: &BandOperator) -> Result<AdjointSpectrumReport> {
    let of_adjoint = operator_spectrum(&a.adjoint())?;
    let adjoint_of = operator_spectrum(a)?.adjoint();
    Ok(AdjointSpectrumReport { equal: of_adjoint.same_as(&adjoint_of, 1e-13), of_adjoint, adjoint_of })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DefectTable {
    pub windows: Vec<usize>,
    pub shifts: Vec<MultiIndex>,
    /// defects[i][n] for window radius windows[i] and shift h_n.
    pub defects: Vec<Vec<f64>>,
}

/// ‖P_m(V_{−h_n}AV_{h_n} − B)‖ + ‖(V_{−h_n}AV_{h_n} − B)P_m‖, exact on
/// bandwidth-dilated windows.
pub fn verify_pstrong(a: &BandOperator, h: &[MultiIndex], b: &BandOperator, windows: &[usize], norm: NormTag) -> Result<DefectTable> {
    if a.dim() != b.dim() || a.fiber() != b.fiber() {
        return Err(Error::DimensionMismatch("operator and candidate live on different spaces".into()));
    }
    let w = a.bandwidth().max(b.bandwidth());
    let defects = windows
        .iter()
        .map(|&m| {
            let inner = Window::new(a.dim(), m).to_box();
            let outer = inner.dilate(w);
            let b_row = b.compress(&inner, &outer);
            let b_col = b.compress(&outer, &inner);
            h.par_iter()
                .map(|hn| {
                    let row = a.compress(&inner.translate(*hn), &outer.translate(*hn)) - &b_row;
                    let col = a.compress(&outer.translate(*hn), &inner.translate(*hn)) - &b_col;
                    operator_norm(&row, norm.p) + operator_norm(&col, norm.p)
                })
                .collect()
        })
        .collect();
    Ok(DefectTable { windows: windows.to_vec(), shifts: h.to_vec(), defects })
}

/// One block of a block-diagonal operator on Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Identity,
    /// Finite section of V_1.
    Forward,
    /// Finite section of V_{−1}.
    Backward,
}

impl BlockKind {
    fn offset(self) -> i64 {
        match self {
            BlockKind::Identity => 0,
            BlockKind::Forward => 1,
            BlockKind::Backward => -1,
        }
    }

    fn adjoint(self) -> Self {
        match self {
            BlockKind::Identity => BlockKind::Identity,
            BlockKind::Forward => BlockKind::Backward,
            BlockKind::Backward => BlockKind::Forward,
        }
    }

    fn laurent(self) -> BandOperator {
        BandOperator::shift(MultiIndex::d1(self.offset()), 1).expect("scalar shift")
    }
}

/// diag(left on (−∞, start), B_0, B_1, …) on Z with scalar entries, where
/// block i has kind `cycle[i mod c]` and length 1 + ⌊i / c⌋, c = |cycle|.
/// The operator spectrum is read off the declared structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockPattern {
    pub left: BlockKind,
    pub cycle: Vec<BlockKind>,
    pub start: i64,
}

impl BlockPattern {
    /// (first index, length, kind) of the blocks starting before `end`.
    pub fn blocks(&self, end: i64) -> Vec<(i64, usize, BlockKind)> {
        let mut out = Vec::new();
        let mut s = self.start;
        let mut i = 0usize;
        while s < end {
            let len = 1 + i / self.cycle.len();
            out.push((s, len, self.cycle[i % self.cycle.len()]));
            s += len as i64;
            i += 1;
        }
        out
    }

    /// Tabulated operator, exact on (−∞, start + extent).
    pub fn to_operator(&self, extent: usize) -> BandOperator {
        use std::collections::BTreeMap;
        let end = self.start + extent as i64;
        let mut tables: BTreeMap<i64, BTreeMap<MultiIndex, _>> = BTreeMap::new();
        for k in [-1i64, 0, 1] {
            let mut t = BTreeMap::new();
            for n in self.start..end {
                t.insert(MultiIndex::d1(n), real_block(0.0));
            }
            tables.insert(k, t);
        }
        for (s, len, kind) in self.blocks(end) {
            let k = kind.offset();
            for n in s..(s + len as i64).min(end) {
                if (s..s + len as i64).contains(&(n - k)) {
                    tables.get_mut(&k).unwrap().insert(MultiIndex::d1(n), real_block(1.0));
                }
            }
        }
        let diagonals = tables.into_iter().map(|(k, table)| {
            let default = if k == self.left.offset() { real_block(1.0) } else { real_block(0.0) };
            (MultiIndex::d1(k), CoefficientSequence::Tabulated { table, default }.simplify(1))
        });
        BandOperator::from_diagonals(1, 1, diagonals).expect("valid block operator")
    }

    /// Blocks of kind `a` ending at −1 next to blocks of kind `b` starting at 0.
    pub fn junction(a: BlockKind, b: BlockKind) -> BandOperator {
        let step = |start: i64, left: f64, right: f64| {
            CoefficientSequence::eventually_periodic(vec![real_block(left)], start, vec![], vec![real_block(right)])
        };
        let (ka, kb) = (a.offset(), b.offset());
        let mut op = BandOperator::zero(1, 1).unwrap();
        op = op.with_diagonal(MultiIndex::d1(ka), step(ka.min(0), 1.0, 0.0)).unwrap();
        op = op.with_diagonal(MultiIndex::d1(kb), step(kb.max(0), 0.0, 1.0)).unwrap();
        op
    }

    /// The left Laurent operator, the Laurent operator of every kind, and
    /// the junction of every consecutive pair in the cycle.
    pub fn spectrum(&self) -> OperatorSpectrum {
        let mut ops = vec![self.left.laurent()];
        ops.extend(self.cycle.iter().map(|k| k.laurent()));
        let c = self.cycle.len();
        for i in 0..c {
            ops.push(Self::junction(self.cycle[i], self.cycle[(i + 1) % c]));
        }
        OperatorSpectrum::from_operators(ops)
    }

    pub fn adjoint(&self) -> Self {
        Self { left: self.left.adjoint(), cycle: self.cycle.iter().map(|k| k.adjoint()).collect(), start: self.start }
    }

    /// First indices of the blocks of `kind` before `end`.
    pub fn junctions_into(&self, kind: BlockKind, end: i64) -> Vec<i64> {
        self.blocks(end).into_iter().skip(1).filter(|b| b.2 == kind).map(|b| b.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::PNorm;
    use crate::linalg::{c, CMatrix};

    fn r(x: f64) -> CMatrix {
        real_block(x)
    }

    fn l2() -> NormTag {
        NormTag::new(PNorm::Two)
    }

    fn i_minus_v1() -> BandOperator {
        BandOperator::scalar_laurent(&[(0, c(1.0, 0.0)), (1, c(-1.0, 0.0))]).unwrap()
    }

    fn eventually_constant(alpha: f64, beta: f64) -> BandOperator {
        let a = CoefficientSequence::eventually_periodic(vec![r(alpha)], -2, vec![r(0.3), r(-1.0), r(4.0)], vec![r(beta)]);
        BandOperator::multiplication(1, a).unwrap()
    }

    #[test]
    fn shift_invariant_operator_is_its_own_limit() {
        let a = i_minus_v1();
        for dir in [Direction::plus(), Direction::minus(), Direction::Explicit((0..10).map(|n| MultiIndex::d1(n * n)).collect())] {
            assert_eq!(limit_operator(&a, &dir).unwrap(), a);
        }
        let spec = operator_spectrum(&a).unwrap();
        assert_eq!(spec.len(), 1);
        assert_eq!(spec.orbits[0].orbit, OrbitKind::Fixed);
    }

    #[test]
    fn eventually_constant_limits() {
        let a = eventually_constant(2.0, -3.0);
        let plus = limit_operator(&a, &Direction::plus()).unwrap();
        assert_eq!(plus, BandOperator::multiplication(1, CoefficientSequence::Constant(r(-3.0))).unwrap());
        let h: Vec<MultiIndex> = (0..30).map(MultiIndex::d1).collect();
        let table = verify_pstrong(&a, &h, &plus, &[0, 2, 4], l2()).unwrap();
        for (i, m) in table.windows.iter().enumerate() {
            for (n, v) in table.defects[i].iter().enumerate() {
                if n as i64 > 2 + *m as i64 {
                    assert_eq!(*v, 0.0);
                }
            }
        }
        let spec = operator_spectrum(&a).unwrap();
        assert_eq!(spec.len(), 2);
        assert!(spec.orbits.iter().all(|o| o.orbit == OrbitKind::Fixed));
    }

    #[test]
    fn periodic_tail_phases_give_shifted_copies() {
        let a = BandOperator::multiplication(
            1,
            CoefficientSequence::eventually_periodic(vec![r(0.0)], 0, vec![r(9.0)], vec![r(1.0), r(5.0)]),
        )
        .unwrap();
        let even = limit_operator(&a, &Direction::Explicit((0..20).map(|n| MultiIndex::d1(2 * n)).collect())).unwrap();
        let odd = limit_operator(&a, &Direction::Explicit((0..20).map(|n| MultiIndex::d1(2 * n + 1)).collect())).unwrap();
        assert!(!even.semantic_eq(&odd, 0.0));
        assert!(even.translate(&MultiIndex::d1(1)).semantic_eq(&odd, 0.0));
        let spec = operator_spectrum(&a).unwrap();
        assert!(spec.contains(&even, 0.0) && spec.contains(&odd, 0.0));
        assert!(spec.orbits.iter().any(|o| o.orbit == OrbitKind::Cycle { size: 2 }));
        for (parity, b) in [(0, &even), (1, &odd)] {
            let hs: Vec<MultiIndex> = (0..20).map(|n| MultiIndex::d1(2 * n + parity)).collect();
            let t = verify_pstrong(&a, &hs, b, &[3], l2()).unwrap();
            assert!(t.defects[0].iter().skip(8).all(|&v| v == 0.0));
        }
        let mixed: Vec<MultiIndex> = (0..20).map(|n| MultiIndex::d1(n)).collect();
        assert!(matches!(limit_operator(&a, &Direction::Explicit(mixed)), Err(Error::NonStabilizingDirection(_))));
    }

    #[test]
    fn wrong_candidate_keeps_a_unit_defect() {
        let a = i_minus_v1();
        let wrong = a.add(&BandOperator::identity(1, 1).unwrap()).unwrap();
        let h: Vec<MultiIndex> = (0..15).map(|n| MultiIndex::d1(3 * n)).collect();
        let t = verify_pstrong(&a, &h, &wrong, &[0, 3], l2()).unwrap();
        assert!(t.defects.iter().flatten().all(|&v| v >= 1.0 - 1e-12));
    }

    #[test]
    fn tabulated_is_unsupported() {
        let t = CoefficientSequence::Tabulated { table: [(MultiIndex::d1(3), r(2.0))].into(), default: r(1.0) };
        let a = BandOperator::multiplication(1, t).unwrap();
        assert!(matches!(operator_spectrum(&a), Err(Error::UnsupportedClass(_))));
    }

    #[test]
    fn adjoint_spectrum_of_eventually_constant() {
        let a = eventually_constant(1.5, -0.5).add(&BandOperator::shift(MultiIndex::d1(2), 1).unwrap()).unwrap();
        let report = adjoint_spectrum_check(&a).unwrap();
        assert!(report.equal);
        assert_eq!(report.of_adjoint.len(), 2);
    }

    #[test]
    fn block_pattern_structure() {
        let p = BlockPattern { left: BlockKind::Identity, cycle: vec![BlockKind::Identity, BlockKind::Forward], start: 0 };
        let lens: Vec<usize> = p.blocks(30).iter().map(|b| b.1).collect();
        assert_eq!(&lens[..6], &[1, 1, 2, 2, 3, 3]);
        let a = p.to_operator(200);
        let spec = p.spectrum();
        assert_eq!(spec.len(), 4);
        // junction candidates match the operator seen from the block boundaries
        for (kind, junction) in [
            (BlockKind::Forward, BlockPattern::junction(BlockKind::Identity, BlockKind::Forward)),
            (BlockKind::Identity, BlockPattern::junction(BlockKind::Forward, BlockKind::Identity)),
        ] {
            let h: Vec<MultiIndex> = p.junctions_into(kind, 150).into_iter().map(MultiIndex::d1).collect();
            let t = verify_pstrong(&a, &h, &junction, &[2], l2()).unwrap();
            // once both neighbouring blocks are longer than the window, the defect is exactly 0
            assert!(t.defects[0].iter().skip(8).all(|&v| v == 0.0), "{:?}", t.defects[0]);
        }
        let adj = p.adjoint();
        assert!(adj.spectrum().same_as(&spec.adjoint(), 0.0));
        let w = crate::lattice::SiteBox::interval(-10, 120);
        assert_eq!(adj.to_operator(200).compress(&w, &w), a.adjoint().compress(&w, &w));
    }

    #[test]
    fn halfplane_spectrum() {
        let step = |left: f64, right: f64| CoefficientSequence::EventuallyPeriodic {
            axis: 1,
            left: vec![r(left)],
            core_start: 0,
            core: vec![],
            right: vec![r(right)],
        };
        let a = BandOperator::from_diagonals(2, 1, [(MultiIndex::d2(0, 0), step(1.0, 0.0)), (MultiIndex::d2(0, 1), step(0.0, 1.0))]).unwrap();
        let spec = operator_spectrum(&a).unwrap();
        assert_eq!(spec.len(), 3);
        assert!(spec.contains(&BandOperator::identity(2, 1).unwrap(), 0.0));
        assert!(spec.contains(&BandOperator::shift(MultiIndex::d2(0, 1), 1).unwrap(), 0.0));
        assert!(spec.contains(&a.translate(&MultiIndex::d2(3, -4)), 0.0));
        let back: OperatorSpectrum = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert!(back.same_as(&spec, 0.0));
    }

    fn small() -> impl proptest::strategy::Strategy<Value = CMatrix> {
        use proptest::prelude::*;
        (-3i32..=3).prop_map(|v| r(v as f64 / 2.0))
    }

    fn structured_operator() -> impl proptest::strategy::Strategy<Value = BandOperator> {
        use proptest::prelude::*;
        let seq = prop_oneof![
            small().prop_map(CoefficientSequence::Constant),
            proptest::collection::vec(small(), 1..4).prop_map(CoefficientSequence::periodic_1d),
            (proptest::collection::vec(small(), 1..3), -3i64..3, proptest::collection::vec(small(), 0..3), proptest::collection::vec(small(), 1..3))
                .prop_map(|(l, s, c, rt)| CoefficientSequence::eventually_periodic(l, s, c, rt)),
        ];
        proptest::collection::vec((-2i64..=2, seq), 1..4)
            .prop_map(|d| BandOperator::from_diagonals(1, 1, d.into_iter().map(|(k, a)| (MultiIndex::d1(k), a))).unwrap())
    }

    proptest::proptest! {
        #[test]
        fn limits_of_limits_stay_in_the_spectrum(a in structured_operator()) {
            let spec = operator_spectrum(&a).unwrap();
            for b in spec.representatives() {
                let inner = operator_spectrum(b).unwrap();
                proptest::prop_assert!(inner.representatives().all(|c| spec.contains(c, 0.0)));
            }
        }

        #[test]
        fn finite_support_perturbations_do_not_change_the_spectrum(a in structured_operator(), k in -2i64..=2, site in -6i64..6) {
            let bump = CoefficientSequence::finite_support(1, [(MultiIndex::d1(site), r(7.0))]);
            let perturbed = a.add(&BandOperator::zero(1, 1).unwrap().with_diagonal(MultiIndex::d1(k), bump).unwrap()).unwrap();
            proptest::prop_assert!(operator_spectrum(&a).unwrap().same_as(&operator_spectrum(&perturbed).unwrap(), 0.0));
        }

        #[test]
        fn spectra_commute_with_adjoints(a in structured_operator()) {
            proptest::prop_assert!(adjoint_spectrum_check(&a).unwrap().equal);
        }

        #[test]
        fn extracted_limits_are_pstrong_limits(a in structured_operator(), parity in 0i64..2) {
            let b = limit_operator(&a, &Direction::Tail(vec![End::Plus { phase: parity * 6 + 1 }])).unwrap();
            let h: Vec<MultiIndex> = (0..12).map(|n| MultiIndex::d1(12 * n + parity * 6 + 1)).collect();
            let t = verify_pstrong(&a, &h, &b, &[2], l2()).unwrap();
            // cores end before index 6, bandwidth ≤ 2, window 2
            proptest::prop_assert!(t.defects[0].iter().skip(2).all(|&v| v == 0.0));
        }
    }
}
