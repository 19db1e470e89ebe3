//! Symbols of shift-invariant operators, numeric bounded-below brackets,
//! the limit-operator condition ladder and the semi-Fredholm trace verifier.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandop::{off_band_corners, BandOperator, CoefficientSequence};
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, NormTag, PNorm, SiteBox, Window};
use crate::limitops::{operator_spectrum, OperatorSpectrum, OrbitKind};
use crate::linalg::{inverse, lcm, operator_norm, singular_values_ascending, smallest_singular_value, CMatrix, ZERO};
use crate::moduli::{
    approx_numbers, kernel_trace, truncation_sweep_classify, DefectStatus, FredholmClass, Side, SideTrace, SweepConfig,
    SweepVerdict, DEFAULT_RADII,
};

fn require_l2(norm: NormTag, what: &str) -> Result<()> {
    if norm.p == PNorm::Two {
        Ok(())
    } else {
        Err(Error::UnsupportedNorm(format!("{what} is only available at p = 2, got p = {}", norm.p)))
    }
}

// ---------------------------------------------------------------- symbols

/// Block Laurent form of a shift-invariant operator: after grouping the
/// lattice into supercells of size `periods`, A acts as Σ_j Â_j V_j.
struct LiftedSymbol {
    dim: usize,
    block: usize,
    terms: Vec<(MultiIndex, CMatrix)>,
}

impl LiftedSymbol {
    fn new(op: &BandOperator) -> Result<Self> {
        let dim = op.dim();
        let d = op.fiber();
        let mut periods = vec![1usize; dim];
        for (k, seq) in op.diagonals() {
            match seq {
                CoefficientSequence::Constant(_) => {}
                CoefficientSequence::Periodic { periods: p, .. } => {
                    for (ax, q) in p.iter().enumerate() {
                        periods[ax] = lcm(periods[ax], *q);
                    }
                }
                other => {
                    return Err(Error::UnsupportedClass(format!(
                        "the symbol needs constant or periodic coefficients, diagonal {k} is {}",
                        other.class_name()
                    )))
                }
            }
        }
        let residues = SiteBox::new(
            MultiIndex::zero(dim),
            MultiIndex::new(&periods.iter().map(|&p| p as i64 - 1).collect::<Vec<_>>())?,
        );
        let cells = residues.sites();
        let block = cells.len() * d;
        let mut terms: BTreeMap<MultiIndex, CMatrix> = BTreeMap::new();
        for (k, seq) in op.diagonals() {
            for (ri, r) in cells.iter().enumerate() {
                let mut s_coords = Vec::with_capacity(dim);
                let mut j_coords = Vec::with_capacity(dim);
                for ax in 0..dim {
                    let p = periods[ax] as i64;
                    let s = (r.get(ax) - k.get(ax)).rem_euclid(p);
                    s_coords.push(s);
                    j_coords.push((s - r.get(ax) + k.get(ax)) / p);
                }
                let s = MultiIndex::new(&s_coords)?;
                let si = residues.index_of(&s).expect("residue inside the supercell");
                let j = MultiIndex::new(&j_coords)?;
                let entry = terms.entry(j).or_insert_with(|| CMatrix::zeros(block, block));
                let mut view = entry.view_mut((ri * d, si * d), (d, d));
                view += seq.value(r);
            }
        }
        Ok(Self { dim, block, terms: terms.into_iter().collect() })
    }

    fn at(&self, theta: &[f64]) -> CMatrix {
        let mut out = CMatrix::from_element(self.block, self.block, ZERO);
        for (j, m) in &self.terms {
            let phase: f64 = (0..self.dim).map(|ax| j.get(ax) as f64 * theta[ax]).sum();
            out += m * Complex64::from_polar(1.0, phase);
        }
        out
    }

    fn sigma_min(&self, theta: &[f64]) -> f64 {
        smallest_singular_value(&self.at(theta))
    }

    fn inverse_norm(&self, theta: &[f64]) -> f64 {
        match inverse(&self.at(theta)) {
            Some(inv) => operator_norm(&inv, PNorm::Two),
            None => f64::INFINITY,
        }
    }
}

/// Golden-section minimisation of a unimodal-near-the-bracket function.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn angles(g: usize) -> Vec<f64> {
    (0..g).map(|i| 2.0 * PI * i as f64 / g as f64).collect()
}

/// Smallest singular value of the symbol sampled on the unit circle (or torus).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SymbolCurve {
    /// Samples per axis of the final equispaced grid.
    pub grid: usize,
    /// Size of the symbol matrices (supercell volume times fiber dimension).
    pub block_size: usize,
    /// σ_min per sample; on the torus the minimum over the second angle.
    pub sigma_min: Vec<f64>,
    /// Angles of the refined minimiser.
    pub argmin: Vec<f64>,
    pub minimum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SymbolReport {
    pub invertible: bool,
    /// min_t σ_min(a(t)), the lower norm of the operator on l².
    pub j_estimate: f64,
    /// max_t ‖a(t)⁻¹‖ by explicit inversion; infinite when not invertible.
    pub sup_inverse_norm: f64,
    pub curve: SymbolCurve,
}

/// Default invertibility threshold of the symbol minimum.
pub const SYMBOL_TOL: f64 = 1e-8;

/// Invertibility of a shift-invariant operator from its (lifted) symbol.
pub fn symbol_invertibility(op: &BandOperator, tol: f64) -> Result<SymbolReport> {
    let sym = LiftedSymbol::new(op)?;
    match op.dim() {
        1 => Ok(symbol_1d(&sym, tol)),
        _ => Ok(symbol_2d(&sym, tol)),
    }
}

fn argmin(values: &[f64]) -> usize {
    values.iter().enumerate().fold(0, |best, (i, v)| if *v < values[best] { i } else { best })
}

fn symbol_1d(sym: &LiftedSymbol, tol: f64) -> SymbolReport {
    let coarse: Vec<f64> = angles(256).par_iter().map(|&t| sym.sigma_min(&[t])).collect();
    let fine_theta = angles(1024);
    let fine: Vec<f64> = fine_theta.par_iter().map(|&t| sym.sigma_min(&[t])).collect();
    let h = 2.0 * PI / 1024.0;
    // refine around the best sample of either grid
    let seeds = [fine_theta[argmin(&fine)], 2.0 * PI * argmin(&coarse) as f64 / 256.0];
    let (theta, minimum) = seeds
        .iter()
        .map(|&s| golden_min(|t| sym.sigma_min(&[t]), s - h, s + h, 80))
        .fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let inv_fine: Vec<f64> = fine_theta.par_iter().map(|&t| sym.inverse_norm(&[t])).collect();
    let s = fine_theta[argmin(&inv_fine.iter().map(|v| -v).collect::<Vec<_>>())];
    let (_, neg_sup) = golden_min(|t| -sym.inverse_norm(&[t]), s - h, s + h, 80);
    let sup_inverse_norm = if minimum > tol { (-neg_sup).max(sym.inverse_norm(&[theta])) } else { f64::INFINITY };
    SymbolReport {
        invertible: minimum > tol,
        j_estimate: minimum,
        sup_inverse_norm,
        curve: SymbolCurve { grid: 1024, block_size: sym.block, sigma_min: fine, argmin: vec![theta], minimum },
    }
}

fn coordinate_refine(f: &(impl Fn(&[f64]) -> f64 + Sync), start: [f64; 2], h: f64) -> ([f64; 2], f64) {
    let mut x = start;
    let mut best = f(&x);
    for _ in 0..6 {
        for ax in 0..2 {
            let centre = x[ax];
            let (t, v) = golden_min(
                |s| {
                    let mut y = x;
                    y[ax] = s;
                    f(&y)
                },
                centre - h,
                centre + h,
                50,
            );
            if v < best {
                best = v;
                x[ax] = t;
            }
        }
    }
    (x, best)
}

fn torus_min(f: &(impl Fn(&[f64]) -> f64 + Sync)) -> (Vec<f64>, [f64; 2], f64) {
    let theta = angles(256);
    let rows: Vec<(usize, f64)> = theta
        .par_iter()
        .map(|&t0| {
            let vals: Vec<f64> = theta.iter().map(|&t1| f(&[t0, t1])).collect();
            let i = argmin(&vals);
            (i, vals[i])
        })
        .collect();
    let row_min: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let i0 = argmin(&row_min);
    let coarse = [theta[i0], theta[rows[i0].0]];
    // 1024-resolution patch around the coarse minimiser
    let h = 2.0 * PI / 1024.0;
    let patch: Vec<(f64, [f64; 2])> = (-8i32..=8)
        .into_par_iter()
        .flat_map_iter(|a| {
            (-8i32..=8).map(move |b| [coarse[0] + a as f64 * h, coarse[1] + b as f64 * h])
        })
        .map(|x| (f(&x), x))
        .collect();
    let best = patch.iter().fold((f64::INFINITY, coarse), |acc, x| if x.0 < acc.0 { *x } else { acc });
    let (x, v) = coordinate_refine(f, best.1, h);
    (row_min, x, v)
}

fn symbol_2d(sym: &LiftedSymbol, tol: f64) -> SymbolReport {
    let (row_min, x, minimum) = torus_min(&|t: &[f64]| sym.sigma_min(t));
    let sup_inverse_norm = if minimum > tol {
        let (_, _, neg) = torus_min(&|t: &[f64]| -sym.inverse_norm(t));
        (-neg).max(sym.inverse_norm(&x))
    } else {
        f64::INFINITY
    };
    SymbolReport {
        invertible: minimum > tol,
        j_estimate: minimum,
        sup_inverse_norm,
        curve: SymbolCurve { grid: 256, block_size: sym.block, sigma_min: row_min, argmin: x.to_vec(), minimum },
    }
}

// ------------------------------------------------------- bounded below

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BelowBudget {
    /// Window diameters, tried in order.
    pub diameters: Vec<usize>,
    /// j > tol counts as bounded below.
    pub tol: f64,
    /// Once decided, refinement stops when hi − lo ≤ rel_width · hi.
    pub rel_width: f64,
    /// hi shrinking by at least this factor per step over the last three
    /// diameters counts as decay to zero.
    pub decay_ratio: f64,
}

impl BelowBudget {
    pub fn for_dim(dim: usize) -> Self {
        let diameters = if dim == 1 { vec![8, 16, 32, 64, 128, 256] } else { vec![4, 8, 16] };
        Self { diameters, tol: 1e-8, rel_width: 0.02, decay_ratio: 0.7 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Undecided,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    fn and(self, other: Self) -> Self {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Holds, Holds) => Holds,
            _ => Undecided,
        }
    }

    fn or(self, other: Self) -> Self {
        use Verdict::*;
        match (self, other) {
            (Holds, _) | (_, Holds) => Holds,
            (Fails, Fails) => Fails,
            _ => Undecided,
        }
    }

    fn all(it: impl IntoIterator<Item = Verdict>) -> Self {
        it.into_iter().fold(Verdict::Holds, Verdict::and)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undecided => "undecided",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BracketStep {
    pub diameter: usize,
    pub windows: usize,
    pub lo: f64,
    pub hi: f64,
}

/// j(B) ∈ [lo, hi] with the verdict on j(B) > 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundedBelow {
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    pub verdict: Verdict,
    pub steps: Vec<BracketStep>,
    pub reason: String,
}

/// Window corners along one axis: every window that can differ from a
/// translate by a period of the coefficients.
fn axis_corners(b: &BandOperator, axis: usize, diameter: usize) -> Vec<i64> {
    let (mut core, mut period) = (None::<(i64, i64)>, 1usize);
    for seq in b.diagonals().values() {
        let p = seq.axis_profile(axis);
        period = lcm(period, lcm(p.left_period, p.right_period));
        if let Some((lo, hi)) = p.core {
            core = Some(match core {
                None => (lo, hi),
                Some((a, c)) => (a.min(lo), c.max(hi)),
            });
        }
    }
    match core {
        None => (0..period as i64).collect(),
        Some((lo, hi)) => {
            let margin = (b.bandwidth() + period) as i64;
            (lo - diameter as i64 - margin..=hi + margin).collect()
        }
    }
}

fn window_sigma(b: &BandOperator, corner: MultiIndex, diameter: usize) -> f64 {
    let cols = SiteBox::cube(corner, diameter);
    smallest_singular_value(&b.compress(&cols.dilate(b.bandwidth()), &cols))
}

/// ½ Σ_{k≠0} (π|k|₁/(2s))² ‖H_k‖_∞ for H = B*B and the partition of unity of
/// half-width s = D/2: the IMS localization error.
fn localization_error(gram: &BandOperator, diameter: usize) -> f64 {
    let s = diameter as f64 / 2.0;
    gram.diagonals()
        .iter()
        .filter(|(k, _)| k.max_norm() != 0)
        .map(|(k, seq)| {
            let l1: i64 = k.coords().iter().map(|x| x.abs()).sum();
            let ck = PI * l1 as f64 / (2.0 * s);
            0.5 * ck * ck * seq.sup_norm()
        })
        .sum()
}

/// Upper bounds from localized lower norms over all window positions, a
/// rigorous lower bound from the localization formula
/// ‖Bx‖² = Σ_c ‖Bφ_c x‖² + ½ Σ_c ⟨x, [φ_c, [φ_c, B*B]] x⟩.
pub fn bounded_below_numeric(b: &BandOperator, norm: NormTag, budget: &BelowBudget) -> Result<BoundedBelow> {
    require_l2(norm, "the bounded-below bracket")?;
    if budget.diameters.is_empty() {
        return Err(Error::InvalidArgument("the budget has no window diameters".into()));
    }
    let gram = b.adjoint().compose(b)?;
    let tail = b.tail_bound();
    let mut steps = Vec::new();
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut verdict = Verdict::Undecided;
    let mut reason = String::from("budget exhausted before the bracket separated from zero");
    for &diameter in &budget.diameters {
        let per_axis: Vec<Vec<i64>> = (0..b.dim()).map(|ax| axis_corners(b, ax, diameter)).collect();
        let corners: Vec<MultiIndex> = match b.dim() {
            1 => per_axis[0].iter().map(|&i| MultiIndex::d1(i)).collect(),
            _ => per_axis[0].iter().flat_map(|&i| per_axis[1].iter().map(move |&j| MultiIndex::d2(i, j))).collect(),
        };
        let local = corners.par_iter().map(|&c| window_sigma(b, c, diameter)).reduce(|| f64::INFINITY, f64::min);
        let step_hi = local + tail;
        let step_lo = ((local * local - localization_error(&gram, diameter)).max(0.0)).sqrt() - tail;
        hi = hi.min(step_hi);
        lo = lo.max(step_lo.max(0.0));
        steps.push(BracketStep { diameter, windows: corners.len(), lo: step_lo.max(0.0), hi: step_hi });
        if lo > budget.tol {
            verdict = Verdict::Holds;
            reason = format!("lower bound {lo:.3e} exceeds tol");
            if hi - lo <= budget.rel_width * hi {
                break;
            }
        } else if hi < budget.tol {
            verdict = Verdict::Fails;
            reason = format!("localized lower norm {hi:.3e} below tol");
            break;
        } else if steps.len() >= 3 {
            let last: Vec<f64> = steps[steps.len() - 3..].iter().map(|s| s.hi).collect();
            if last.windows(2).all(|w| w[1] <= budget.decay_ratio * w[0]) {
                verdict = Verdict::Fails;
                reason = format!(
                    "localized lower norms decay: {}",
                    last.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(" → ")
                );
                break;
            }
        }
    }
    Ok(BoundedBelow { lo, hi, estimate: 0.5 * (lo + hi), verdict, steps, reason })
}

// ------------------------------------------------------------- ladder

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionTag {
    Fredholm,
    Invertible,
    LeftInvertible,
    RightInvertible,
    BoundedBelow,
    Surjective,
    Injective,
    OneSided,
}

impl ConditionTag {
    pub const ALL: [ConditionTag; 8] = [
        ConditionTag::Fredholm,
        ConditionTag::Invertible,
        ConditionTag::LeftInvertible,
        ConditionTag::RightInvertible,
        ConditionTag::BoundedBelow,
        ConditionTag::Surjective,
        ConditionTag::Injective,
        ConditionTag::OneSided,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ConditionTag::Fredholm => "(i)",
            ConditionTag::Invertible => "(ii)",
            ConditionTag::LeftInvertible => "(iii)",
            ConditionTag::RightInvertible => "(iv)",
            ConditionTag::BoundedBelow => "(v)",
            ConditionTag::Surjective => "(vi)",
            ConditionTag::Injective => "(vii)",
            ConditionTag::OneSided => "(viii)",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ConditionTag::Fredholm => "A is Fredholm",
            ConditionTag::Invertible => "all limit operators are invertible",
            ConditionTag::LeftInvertible => "all limit operators are left invertible",
            ConditionTag::RightInvertible => "all limit operators are right invertible",
            ConditionTag::BoundedBelow => "all limit operators are bounded below",
            ConditionTag::Surjective => "all limit operators are surjective",
            ConditionTag::Injective => "all limit operators are injective",
            ConditionTag::OneSided => "all limit operators are one-sided invertible",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionEntry {
    pub tag: ConditionTag,
    pub label: String,
    pub verdict: Verdict,
    /// Whether the condition is equivalent to Fredholmness in this setting.
    pub conclusive: bool,
    pub evidence: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RepresentativeEvidence {
    pub index: usize,
    pub orbit: OrbitKind,
    pub operator: BandOperator,
    pub symbol: Option<SymbolReport>,
    pub bounded_below: BoundedBelow,
    pub adjoint_bounded_below: BoundedBelow,
    pub kernel: SideTrace,
    pub invertible: Verdict,
    pub injective: Verdict,
    pub one_sided: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NormIdentity {
    pub sup_inverse_norm: f64,
    pub inf_lower_norm: f64,
    pub product: f64,
    pub tolerance: f64,
    pub holds: bool,
    /// "symbol" when every representative has a symbol, "bracket" otherwise.
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionLadder {
    pub schema_version: u32,
    pub dim: usize,
    pub fiber: usize,
    pub conditions: Vec<ConditionEntry>,
    pub representatives: Vec<RepresentativeEvidence>,
    pub norm_identity: Option<NormIdentity>,
    pub sweep: Option<SweepVerdict>,
    /// Agreement of (i) with the truncation sweep; None when either is undecided.
    pub sweep_agrees: Option<bool>,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

impl ConditionLadder {
    pub fn verdict(&self, tag: ConditionTag) -> Verdict {
        self.conditions.iter().find(|c| c.tag == tag).map(|c| c.verdict).unwrap_or(Verdict::Undecided)
    }

    pub fn entry(&self, tag: ConditionTag) -> Option<&ConditionEntry> {
        self.conditions.iter().find(|c| c.tag == tag)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ladder serialization cannot fail")
    }

    fn undecided(a: &BandOperator, reason: String) -> Self {
        let conditions = ConditionTag::ALL
            .iter()
            .map(|&tag| ConditionEntry {
                tag,
                label: tag.label().into(),
                verdict: Verdict::Undecided,
                conclusive: false,
                evidence: reason.clone(),
            })
            .collect();
        Self {
            schema_version: crate::bandop::SCHEMA_VERSION,
            dim: a.dim(),
            fiber: a.fiber(),
            conditions,
            representatives: Vec::new(),
            norm_identity: None,
            sweep: None,
            sweep_agrees: None,
            violations: Vec::new(),
            notes: vec![reason],
        }
    }
}

impl fmt::Display for ConditionLadder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "condition ladder (N = {}, d = {}, {} representatives)", self.dim, self.fiber, self.representatives.len())?;
        for c in &self.conditions {
            let flag = if c.conclusive { "" } else { "  [not conclusive]" };
            writeln!(f, "  {:<7} {:<10} {}{}", c.label, c.verdict.to_string(), c.tag.description(), flag)?;
            writeln!(f, "          {}", c.evidence)?;
        }
        if let Some(id) = &self.norm_identity {
            writeln!(
                f,
                "  norm identity: sup‖A_g⁻¹‖ = {:.6}, inf j(A_g) = {:.6}, product {:.6} ({})",
                id.sup_inverse_norm,
                id.inf_lower_norm,
                id.product,
                if id.holds { "ok" } else { "off" }
            )?;
        }
        if let Some(s) = &self.sweep {
            let agree = match self.sweep_agrees {
                Some(true) => "agrees",
                Some(false) => "DISAGREES",
                None => "no comparison",
            };
            writeln!(f, "  truncation sweep: {} ({agree})", s.class)?;
        }
        for v in &self.violations {
            writeln!(f, "  VIOLATION: {v}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LadderConfig {
    pub norm: NormTag,
    pub symbol_tol: f64,
    pub budget: BelowBudget,
    pub sweep_radii: Vec<usize>,
    pub sweep: SweepConfig,
    pub identity_tol: f64,
}

impl LadderConfig {
    pub fn for_dim(dim: usize) -> Self {
        Self {
            norm: NormTag::new(PNorm::Two),
            symbol_tol: SYMBOL_TOL,
            budget: BelowBudget::for_dim(dim),
            sweep_radii: if dim == 1 { DEFAULT_RADII.to_vec() } else { vec![4, 6, 8, 10] },
            sweep: SweepConfig::default(),
            identity_tol: 1e-3,
        }
    }
}

fn has_symbol(op: &BandOperator) -> bool {
    op.diagonals().values().all(|s| matches!(s, CoefficientSequence::Constant(_) | CoefficientSequence::Periodic { .. }))
}

/// Injectivity from the kernel side of the truncation sweep.
fn injectivity(trace: &SideTrace) -> Verdict {
    let all_zero = trace.counts.iter().all(|&c| c == 0);
    match trace.status {
        DefectStatus::Finite(0) | DefectStatus::Degenerate if all_zero => Verdict::Holds,
        DefectStatus::Finite(k) if k > 0 => Verdict::Fails,
        DefectStatus::Infinite => Verdict::Fails,
        _ => Verdict::Undecided,
    }
}

fn examine(index: usize, orbit: OrbitKind, op: &BandOperator, cfg: &LadderConfig) -> Result<RepresentativeEvidence> {
    let symbol = if has_symbol(op) { Some(symbol_invertibility(op, cfg.symbol_tol)?) } else { None };
    let adj = op.adjoint();
    let ((bb, abb), kernel) = rayon::join(
        || {
            rayon::join(
                || bounded_below_numeric(op, cfg.norm, &cfg.budget),
                || bounded_below_numeric(&adj, cfg.norm, &cfg.budget),
            )
        },
        || kernel_trace(op, &cfg.sweep_radii, &cfg.sweep),
    );
    let (bb, abb) = (bb?, abb?);
    let numeric_inv = bb.verdict.and(abb.verdict);
    let invertible = match &symbol {
        Some(s) => Verdict::from_bool(s.invertible),
        None => numeric_inv,
    };
    let injective = injectivity(&kernel);
    let one_sided = bb.verdict.or(abb.verdict);
    Ok(RepresentativeEvidence {
        index,
        orbit,
        operator: op.clone(),
        symbol,
        bounded_below: bb,
        adjoint_bounded_below: abb,
        kernel,
        invertible,
        injective,
        one_sided,
    })
}

fn summarize(reps: &[RepresentativeEvidence], pick: impl Fn(&RepresentativeEvidence) -> Verdict) -> (Verdict, String) {
    let verdicts: Vec<Verdict> = reps.iter().map(&pick).collect();
    let overall = Verdict::all(verdicts.iter().copied());
    let detail: Vec<String> = verdicts.iter().enumerate().map(|(i, v)| format!("#{i}: {v}")).collect();
    (overall, detail.join(", "))
}

/// The ladder for A with its computed operator spectrum.
pub fn check_conditions(a: &BandOperator, cfg: &LadderConfig) -> Result<ConditionLadder> {
    match operator_spectrum(a) {
        Ok(spec) => check_conditions_with_spectrum(a, &spec, cfg),
        Err(e @ (Error::UnsupportedClass(_) | Error::NonStabilizingDirection(_))) => {
            Ok(ConditionLadder::undecided(a, format!("operator spectrum unavailable: {e}")))
        }
        Err(e) => Err(e),
    }
}

/// The ladder for A with a spectrum supplied by the caller (declared structure).
pub fn check_conditions_with_spectrum(a: &BandOperator, spec: &OperatorSpectrum, cfg: &LadderConfig) -> Result<ConditionLadder> {
    require_l2(cfg.norm, "the condition ladder")?;
    let reps: Vec<RepresentativeEvidence> = spec
        .orbits
        .par_iter()
        .enumerate()
        .map(|(i, o)| examine(i, o.orbit.clone(), &o.operator, cfg))
        .collect::<Result<_>>()?;

    let (ii, ii_ev) = summarize(&reps, |r| r.invertible);
    let (v, v_ev) = summarize(&reps, |r| r.bounded_below.verdict);
    let (vi, vi_ev) = summarize(&reps, |r| r.adjoint_bounded_below.verdict);
    let (vii, vii_ev) = summarize(&reps, |r| r.injective);
    let (viii, viii_ev) = summarize(&reps, |r| r.one_sided);
    let one_dim = a.dim() == 1;
    let fredholm = if one_dim { v } else { ii };
    let fredholm_ev = if one_dim {
        format!("equivalent to (v) on Z with finite fiber; (v) {v}")
    } else {
        format!("equivalent to (ii) on Z^2 with finite fiber; (ii) {ii}")
    };

    let entry = |tag: ConditionTag, verdict: Verdict, conclusive: bool, evidence: String| ConditionEntry {
        tag,
        label: tag.label().into(),
        verdict,
        conclusive,
        evidence,
    };
    let conditions = vec![
        entry(ConditionTag::Fredholm, fredholm, true, fredholm_ev),
        entry(ConditionTag::Invertible, ii, true, format!("symbol or two-sided brackets per representative: {ii_ev}")),
        entry(ConditionTag::LeftInvertible, v, one_dim, format!("on l² left invertible ⇔ bounded below: {v_ev}")),
        entry(ConditionTag::RightInvertible, vi, one_dim, format!("on l² right invertible ⇔ adjoint bounded below: {vi_ev}")),
        entry(ConditionTag::BoundedBelow, v, one_dim, format!("bounded-below brackets: {v_ev}")),
        entry(ConditionTag::Surjective, vi, one_dim, format!("adjoint bounded-below brackets: {vi_ev}")),
        entry(ConditionTag::Injective, vii, false, format!("kernel side of the truncation sweep: {vii_ev}")),
        entry(ConditionTag::OneSided, viii, false, format!("left or right invertible per representative: {viii_ev}")),
    ];

    let mut violations = Vec::new();
    for r in &reps {
        let bb = r.bounded_below.verdict;
        let abb = r.adjoint_bounded_below.verdict;
        if r.invertible == Verdict::Holds {
            if bb == Verdict::Fails || abb == Verdict::Fails {
                violations.push(format!("#{}: (ii) holds but (iii)/(iv) fail", r.index));
            }
            if r.injective == Verdict::Fails {
                violations.push(format!("#{}: (ii) holds but (vii) fails", r.index));
            }
        }
        if bb == Verdict::Holds && r.injective == Verdict::Fails {
            violations.push(format!("#{}: (v) holds but (vii) fails", r.index));
        }
        if let Some(s) = &r.symbol {
            let numeric = bb.and(abb);
            if numeric != Verdict::Undecided && Verdict::from_bool(s.invertible) != numeric {
                violations.push(format!("#{}: symbol says {} but the brackets say {numeric}", r.index, s.invertible));
            }
        }
    }
    if one_dim {
        let decided: Vec<(&str, Verdict)> =
            [("(ii)", ii), ("(v)", v), ("(vi)", vi)].into_iter().filter(|x| x.1 != Verdict::Undecided).collect();
        if decided.windows(2).any(|w| w[0].1 != w[1].1) {
            violations.push(format!(
                "equivalent conditions disagree: {}",
                decided.iter().map(|(l, v)| format!("{l} {v}")).collect::<Vec<_>>().join(", ")
            ));
        }
    }

    let norm_identity = (ii == Verdict::Holds).then(|| {
        let all_symbols = reps.iter().all(|r| r.symbol.is_some());
        let (sup_inv, inf_j) = if all_symbols {
            (
                reps.iter().map(|r| r.symbol.as_ref().unwrap().sup_inverse_norm).fold(0.0, f64::max),
                reps.iter().map(|r| r.symbol.as_ref().unwrap().j_estimate).fold(f64::INFINITY, f64::min),
            )
        } else {
            (
                reps.iter()
                    .map(|r| 1.0 / r.bounded_below.estimate.min(r.adjoint_bounded_below.estimate))
                    .fold(0.0, f64::max),
                reps.iter().map(|r| r.bounded_below.estimate).fold(f64::INFINITY, f64::min),
            )
        };
        let product = sup_inv * inf_j;
        NormIdentity {
            sup_inverse_norm: sup_inv,
            inf_lower_norm: inf_j,
            product,
            tolerance: cfg.identity_tol,
            holds: (product - 1.0).abs() <= cfg.identity_tol,
            source: if all_symbols { "symbol" } else { "bracket" }.into(),
        }
    });

    let sweep = truncation_sweep_classify(a, &cfg.sweep_radii, cfg.sweep)?;
    let sweep_agrees = match (fredholm, sweep.class) {
        (Verdict::Undecided, _) | (_, FredholmClass::Undecided) => None,
        (Verdict::Holds, c) => Some(c == FredholmClass::Fredholm),
        (Verdict::Fails, c) => Some(c != FredholmClass::Fredholm),
    };
    if one_dim && matches!(sweep.class, FredholmClass::UpperSemiOnly | FredholmClass::LowerSemiOnly) {
        violations.push(format!("the sweep reports {} on Z with finite fiber, contradicting semi-Fredholm ⇒ Fredholm", sweep.class));
    }
    if fredholm == Verdict::Holds && (sweep.kernel.status == DefectStatus::Infinite || sweep.cokernel.status == DefectStatus::Infinite) {
        violations.push("(i) holds but the sweep shows unbounded kernel or cokernel growth".into());
    }

    let mut notes = Vec::new();
    if vii == Verdict::Holds && fredholm == Verdict::Fails {
        notes.push("(vii) holds while (i) fails: injectivity of all limit operators does not imply Fredholmness for p < ∞".into());
    }
    if viii == Verdict::Holds && fredholm == Verdict::Fails {
        notes.push("(viii) holds while (i) fails: one-sided invertibility of every limit operator is not sufficient".into());
    }
    if !one_dim && v == Verdict::Holds && fredholm == Verdict::Fails {
        notes.push("on Z^2 bounded below limit operators do not imply Fredholmness".into());
    }

    Ok(ConditionLadder {
        schema_version: crate::bandop::SCHEMA_VERSION,
        dim: a.dim(),
        fiber: a.fiber(),
        conditions,
        representatives: reps,
        norm_identity,
        sweep: Some(sweep),
        sweep_agrees,
        violations,
        notes,
    })
}

// ------------------------------------------------------- semi-Fredholm trace

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndexIdentity {
    pub fiber: usize,
    pub n: usize,
    pub l: usize,
    pub m: usize,
    pub k: usize,
    pub row_dim: usize,
    pub col_dim: usize,
    /// row_dim − col_dim + k.
    pub value: i64,
    pub holds: bool,
}

/// dim im P_{n−l} − dim im P_n + (2ld + m) = m on Z with fiber C^d.
pub fn index_identity(fiber: usize, n: usize, l: usize, m: usize) -> Result<IndexIdentity> {
    if l > n {
        return Err(Error::InvalidArgument(format!("l = {l} exceeds n = {n}")));
    }
    let row_dim = fiber * (2 * (n - l) + 1);
    let col_dim = fiber * (2 * n + 1);
    let k = 2 * l * fiber + m;
    let value = row_dim as i64 - col_dim as i64 + k as i64;
    Ok(IndexIdentity { fiber, n, l, m, k, row_dim, col_dim, value, holds: value == m as i64 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TsemiTrace {
    pub schema_version: u32,
    pub m: usize,
    pub eps: f64,
    pub eps_auto: bool,
    /// Estimates of s^l_m(A) on growing radii used for `eps_auto`.
    pub estimate_history: Vec<(usize, f64)>,
    pub estimate_stable: bool,
    /// The l used for B.
    pub l: usize,
    /// Smallest l meeting the eps/5 bound on every tested n.
    pub smallest_admissible_l: usize,
    pub bandwidth: usize,
    /// Largest off-band defect plus twice the tail over the tested n > l.
    pub defect: f64,
    pub tested_n: Vec<usize>,
    pub n: usize,
    pub index: IndexIdentity,
    /// s^l_m(B) and the matching right number s^r_k(B).
    pub s_left_b: f64,
    pub s_right_b_shifted: f64,
    /// m-th singular value of A* restricted to im P_{n−l}.
    pub s_left_a: f64,
    /// s^l_m(A) + eps/5 − s^l_m(B) ≥ 0.
    pub upper_slack: f64,
    /// s^l_m(B) + eps/5 − s^l_m(A) ≥ 0, the direction that closes the argument.
    pub lower_slack: f64,
    pub chain_holds: bool,
}

fn defect_range(a: &BandOperator) -> usize {
    let mut extent = 0i64;
    let mut period = 1usize;
    for seq in a.diagonals().values() {
        let p = seq.axis_profile(0);
        period = lcm(period, lcm(p.left_period, p.right_period));
        if let Some((lo, hi)) = p.core {
            extent = extent.max(lo.abs()).max(hi.abs());
        }
    }
    extent as usize + 2 * a.bandwidth() + period + 8
}

/// m-th smallest singular value of A* P_radius, every nonzero row kept.
fn left_estimate(a: &BandOperator, radius: usize, m: usize) -> Result<f64> {
    let adj = a.adjoint();
    let cols = Window::new(1, radius).to_box();
    let sv = singular_values_ascending(&adj.compress(&cols.dilate(a.bandwidth()), &cols));
    sv.get(m - 1).copied().ok_or_else(|| Error::InvalidArgument(format!("m = {m} exceeds the window dimension")))
}

/// Executable rendering of the argument that a semi-Fredholm band-dominated
/// operator on l²(Z, C^d) is Fredholm: choice of l, the index bookkeeping of
/// B = P_{n−l} A P_n and the comparison of left approximation numbers.
pub fn tsemi_trace(a: &BandOperator, m: usize, eps: Option<f64>, n: usize, norm: NormTag) -> Result<TsemiTrace> {
    require_l2(norm, "the semi-Fredholm trace")?;
    if a.dim() != 1 {
        return Err(Error::DimensionMismatch("the semi-Fredholm trace works on Z".into()));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("m starts at 1".into()));
    }
    let w = a.bandwidth();
    let tail = a.tail_bound();
    let radii = [n / 2, (3 * n) / 4, n];
    let estimate_history: Vec<(usize, f64)> =
        radii.iter().map(|&r| Ok((r, left_estimate(a, r, m)?))).collect::<Result<_>>()?;
    let estimate_stable = crate::moduli::is_stable(&estimate_history.iter().map(|x| x.1).collect::<Vec<_>>(), 0.05)
        || estimate_history.iter().all(|x| x.1 < 1e-10);
    let eps_auto = eps.is_none();
    let eps = eps.unwrap_or(estimate_history[2].1);
    if !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be non-negative, got {eps}")));
    }

    let margin = (tail * 5.0 / eps.max(f64::MIN_POSITIVE)).ceil().min(64.0) as usize;
    let limit = w + margin + 1;
    let top = defect_range(a).max(n);
    let worst = |l: usize| -> Result<(f64, Vec<usize>)> {
        let tested: Vec<usize> = (l + 1..=top.max(l + 1)).collect();
        let vals: Vec<f64> = tested
            .par_iter()
            .map(|&k| off_band_corners(a, k, l, norm).map(|(x, y)| x + y))
            .collect::<Result<_>>()?;
        Ok((vals.into_iter().fold(0.0, f64::max) + 2.0 * tail, tested))
    };
    let mut smallest = None;
    for l in 0..=limit {
        if worst(l)?.0 <= eps / 5.0 {
            smallest = Some(l);
            break;
        }
    }
    let smallest_admissible_l = smallest.ok_or_else(|| {
        Error::BudgetExhausted(format!("no l ≤ {limit} brings the off-band defect plus tail below eps/5 = {:.3e}", eps / 5.0))
    })?;
    // for band operators the argument takes l = bandwidth, where the defect vanishes
    let l = if tail == 0.0 { smallest_admissible_l.max(w) } else { smallest_admissible_l };
    let (defect, tested_n) = worst(l)?;
    if n <= l {
        return Err(Error::InvalidArgument(format!("trace radius n = {n} must exceed l = {l}")));
    }

    let d = a.fiber();
    let index = index_identity(d, n, l, m)?;
    let b = a.truncate(&Window::new(1, n - l), &Window::new(1, n), norm)?;
    if m > b.nrows() || index.k > b.ncols() {
        return Err(Error::InvalidArgument(format!("m = {m} is too large for the radius {n}")));
    }
    let s_left_b = approx_numbers(&b, m, Side::Left)?[m];
    let s_right_b_shifted = approx_numbers(&b, index.k, Side::Right)?[index.k];
    let s_left_a = left_estimate(a, n - l, m)?;
    let upper_slack = s_left_a + eps / 5.0 - s_left_b;
    let lower_slack = s_left_b + eps / 5.0 - s_left_a;
    Ok(TsemiTrace {
        schema_version: crate::bandop::SCHEMA_VERSION,
        m,
        eps,
        eps_auto,
        estimate_history,
        estimate_stable,
        l,
        smallest_admissible_l,
        bandwidth: w,
        defect,
        tested_n,
        n,
        index,
        s_left_b,
        s_right_b_shifted,
        s_left_a,
        upper_slack,
        lower_slack,
        chain_holds: upper_slack >= -1e-12 && lower_slack >= -1e-12,
    })
}

impl fmt::Display for TsemiTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "semi-Fredholm trace (m = {}, eps = {:.6e}{})", self.m, self.eps, if self.eps_auto { ", auto" } else { "" })?;
        writeln!(f, "  bandwidth {}, chosen l = {} (smallest admissible {}), defect {:.3e}", self.bandwidth, self.l, self.smallest_admissible_l, self.defect)?;
        let id = &self.index;
        writeln!(
            f,
            "  index: {} − {} + {} = {} (m = {}) {}",
            id.row_dim,
            id.col_dim,
            id.k,
            id.value,
            id.m,
            if id.holds { "ok" } else { "FAILS" }
        )?;
        writeln!(f, "  s^l_m(B) = {:.6e}, s^r_k(B) = {:.6e}, s^l_m(A) ≈ {:.6e}", self.s_left_b, self.s_right_b_shifted, self.s_left_a)?;
        writeln!(f, "  slack: upper {:.3e}, lower {:.3e} → {}", self.upper_slack, self.lower_slack, if self.chain_holds { "holds" } else { "FAILS" })
    }
}
