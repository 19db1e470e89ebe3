//! Injection and surjection moduli, singular values and lower approximation
//! numbers of finite compressions, plus the sweep-based semi-Fredholm oracle.

use std::fmt;

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandop::{BandOperator, TruncatedMatrix};
use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, NormTag, PNorm, SiteBox, Window};
use crate::linalg::{inverse, operator_norm, padded_singular_values, singular_values_ascending, smallest_singular_value, CMatrix};

fn require_l2(norm: NormTag, what: &str) -> Result<()> {
    if norm.p == PNorm::Two {
        Ok(())
    } else {
        Err(Error::UnsupportedNorm(format!("{what} is only available at p = 2, got p = {}", norm.p)))
    }
}

fn lower_norm_of(m: &CMatrix, p: PNorm) -> Result<f64> {
    match p {
        PNorm::Two => Ok(smallest_singular_value(m)),
        _ => {
            if m.nrows() != m.ncols() {
                return Err(Error::UnsupportedNorm(format!(
                    "lower norm at p = {p} needs a square matrix, got {}×{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            Ok(match inverse(m) {
                Some(inv) => 1.0 / operator_norm(&inv, p),
                None => 0.0,
            })
        }
    }
}

/// j(M) = inf ‖Mx‖ over unit vectors x.
pub fn lower_norm(m: &TruncatedMatrix) -> Result<f64> {
    lower_norm_of(&m.matrix, m.norm.p)
}

/// q(M), computed as j(Mᴴ) in the dual norm.
pub fn surjection_modulus(m: &TruncatedMatrix) -> Result<f64> {
    lower_norm_of(&m.matrix.adjoint(), m.norm.p.dual())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// s_0, …, s_mMax. The right numbers count structural zeros of the domain,
/// the left numbers those of the codomain.
pub fn approx_numbers(m: &TruncatedMatrix, m_max: usize, side: Side) -> Result<Vec<f64>> {
    require_l2(m.norm, "approximation numbers")?;
    let (mat, count) = match side {
        Side::Right => (m.matrix.clone(), m.ncols()),
        Side::Left => (m.matrix.adjoint(), m.nrows()),
    };
    if m_max > count {
        return Err(Error::InvalidArgument(format!("mMax = {m_max} exceeds the space dimension {count}")));
    }
    let sv = padded_singular_values(&mat, count);
    let mut out = Vec::with_capacity(m_max + 1);
    out.push(0.0);
    out.extend_from_slice(&sv[..m_max]);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SandwichReport {
    /// B_1 … B_mMax from the restriction to the top eigenspaces of MᴴM.
    pub bernstein: Vec<f64>,
    /// σ_1 … σ_mMax from the SVD.
    pub sigma: Vec<f64>,
    pub max_deviation: f64,
    /// 2^m − 1 for m = 1 … mMax.
    pub slack_factors: Vec<u64>,
    /// s_m / (2^m − 1) ≤ B_m ≤ s_m for every m.
    pub general_bound_holds: bool,
}

/// B_m computed independently of the SVD: the best restriction to a subspace
/// of codimension m − 1 is the span of the top eigenvectors of MᴴM.
pub fn sandwich_check(m: &TruncatedMatrix, m_max: usize) -> Result<SandwichReport> {
    require_l2(m.norm, "the sandwich check")?;
    let n = m.ncols();
    if m_max > n {
        return Err(Error::InvalidArgument(format!("mMax = {m_max} exceeds the domain dimension {n}")));
    }
    let gram = m.matrix.adjoint() * &m.matrix;
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let sigma = approx_numbers(m, m_max, Side::Right)?[1..].to_vec();
    let mut bernstein = Vec::with_capacity(m_max);
    for k in 1..=m_max {
        let keep = &order[k - 1..];
        let basis = CMatrix::from_fn(n, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])]);
        bernstein.push(smallest_singular_value(&(&m.matrix * basis)));
    }
    let max_deviation = bernstein.iter().zip(&sigma).map(|(b, s)| (b - s).abs()).fold(0.0, f64::max);
    let slack_factors: Vec<u64> = (1..=m_max as u32).map(|k| (1u64 << k) - 1).collect();
    let tol = 1e-10 * (1.0 + sigma.last().copied().unwrap_or(0.0));
    let general_bound_holds = bernstein
        .iter()
        .zip(&sigma)
        .zip(&slack_factors)
        .all(|((b, s), f)| s / *f as f64 <= b + tol && *b <= s + tol);
    Ok(SandwichReport { bernstein, sigma, max_deviation, slack_factors, general_bound_holds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LowerNormProfile {
    pub diameter: usize,
    /// Lower corner of each window with its localized lower norm.
    pub values: Vec<(MultiIndex, f64)>,
    pub minimum: f64,
    pub argmin: MultiIndex,
}

/// Localized lower norm of a window: σ_min of A restricted to columns in the
/// window, rows in the window dilated by the bandwidth.
pub fn window_lower_norm(a: &BandOperator, cols: &SiteBox) -> f64 {
    let rows = cols.dilate(a.bandwidth());
    smallest_singular_value(&a.compress(&rows, cols))
}

/// σ_min over every width-`diameter` cube inside `range`.
pub fn localized_lower_norm(a: &BandOperator, diameter: usize, range: &SiteBox, norm: NormTag) -> Result<LowerNormProfile> {
    require_l2(norm, "localized lower norms")?;
    if diameter < 1 {
        return Err(Error::InvalidArgument("window diameter must be at least 1".into()));
    }
    if range.dim() != a.dim() {
        return Err(Error::DimensionMismatch("range dimension differs from the operator's".into()));
    }
    let span = |axis: usize| range.hi.get(axis) - range.lo.get(axis) + 1;
    if (0..a.dim()).any(|ax| span(ax) < diameter as i64) {
        return Err(Error::InvalidArgument(format!("range is narrower than the diameter {diameter}")));
    }
    let corners = SiteBox::new(range.lo, range.hi - unit_diagonal(a.dim(), diameter as i64 - 1)).sites();
    let values: Vec<(MultiIndex, f64)> = corners
        .par_iter()
        .map(|c| (*c, window_lower_norm(a, &SiteBox::cube(*c, diameter))))
        .collect();
    let (argmin, minimum) = values
        .iter()
        .copied()
        .fold((values[0].0, f64::INFINITY), |acc, (c, v)| if v < acc.1 { (c, v) } else { acc });
    Ok(LowerNormProfile { diameter, values, minimum, argmin })
}

fn unit_diagonal(dim: usize, v: i64) -> MultiIndex {
    match dim {
        1 => MultiIndex::d1(v),
        _ => MultiIndex::d2(v, v),
    }
}

/// "Stable": consecutive relative changes below `tol` across the last three values.
pub fn is_stable(values: &[f64], tol: f64) -> bool {
    if values.len() < 3 {
        return false;
    }
    values[values.len() - 3..].windows(2).all(|w| relative_change(w[0], w[1]) < tol)
}

pub fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-12 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModuliRow {
    pub radius: usize,
    pub j: f64,
    pub q: f64,
    /// σ_1 … σ_mMax ascending.
    pub sigma: Vec<f64>,
    pub s_right: Vec<f64>,
    pub s_left: Vec<f64>,
    /// One flag per m: σ_m stable over this and the two previous radii.
    pub stable: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModuliReport {
    pub p: PNorm,
    pub m_max: usize,
    pub rows: Vec<ModuliRow>,
}

impl ModuliReport {
    /// CSV with columns radius, j, q, sigma_1 … sigma_mMax, flags; `flags`
    /// holds one character per m, `1` when σ_m is stable.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,j,q");
        for m in 1..=self.m_max {
            out.push_str(&format!(",sigma_{m}"));
        }
        out.push_str(",flags\n");
        for row in &self.rows {
            out.push_str(&format!("{},{:e},{:e}", row.radius, row.j, row.q));
            for m in 0..self.m_max {
                match row.sigma.get(m) {
                    Some(v) => out.push_str(&format!(",{v:e}")),
                    None => out.push(','),
                }
            }
            let flags: String = row.stable.iter().map(|&s| if s { '1' } else { '0' }).collect();
            out.push_str(&format!(",{flags}\n"));
        }
        out
    }
}

/// j, q and the smallest singular values of the finite sections P_nAP_n.
pub fn moduli_report(a: &BandOperator, radii: &[usize], m_max: usize, norm: NormTag, stab_tol: f64) -> Result<ModuliReport> {
    let mut radii = radii.to_vec();
    radii.sort_unstable();
    radii.dedup();
    let rows: Vec<Result<ModuliRow>> = radii
        .par_iter()
        .map(|&n| {
            let t = a.finite_section(n, norm);
            let j = lower_norm(&t)?;
            let q = surjection_modulus(&t)?;
            let l2 = TruncatedMatrix { norm: NormTag::new(PNorm::Two), ..t };
            let mm = m_max.min(l2.ncols());
            let s_right = approx_numbers(&l2, mm, Side::Right)?;
            let s_left = approx_numbers(&l2, mm, Side::Left)?;
            Ok(ModuliRow { radius: n, j, q, sigma: s_right[1..].to_vec(), s_right, s_left, stable: Vec::new() })
        })
        .collect();
    let mut rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    for i in 0..rows.len() {
        let stable = (0..m_max)
            .map(|m| {
                i >= 2 && {
                    let vals: Vec<f64> = rows[i - 2..=i].iter().filter_map(|r| r.sigma.get(m).copied()).collect();
                    vals.len() == 3 && is_stable(&vals, stab_tol)
                }
            })
            .collect();
        rows[i].stable = stable;
    }
    Ok(ModuliReport { p: norm.p, m_max, rows })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepConfig {
    /// Singular values below this count as zero.
    pub zero_tol: f64,
    /// Relative change below which a quantity counts as stable.
    pub stab_tol: f64,
    /// The first nonzero singular value must exceed `sep_factor · zero_tol`.
    pub sep_factor: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { zero_tol: 1e-6, stab_tol: 0.05, sep_factor: 2.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FredholmClass {
    Fredholm,
    /// Φ₊ \ Φ: finite kernel, infinite cokernel.
    UpperSemiOnly,
    /// Φ₋ \ Φ: finite cokernel, infinite kernel.
    LowerSemiOnly,
    NotSemiFredholm,
    Undecided,
}

impl fmt::Display for FredholmClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FredholmClass::Fredholm => "Φ",
            FredholmClass::UpperSemiOnly => "Φ₊\\Φ",
            FredholmClass::LowerSemiOnly => "Φ₋\\Φ",
            FredholmClass::NotSemiFredholm => "not semi-Fredholm",
            FredholmClass::Undecided => "undecided",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "dimension")]
pub enum DefectStatus {
    Finite(usize),
    Infinite,
    /// Stable count but the first nonzero singular value keeps shrinking.
    Degenerate,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SideTrace {
    pub counts: Vec<usize>,
    /// Smallest singular value at or above the zero tolerance, per radius.
    pub gaps: Vec<f64>,
    pub status: DefectStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepVerdict {
    pub radii: Vec<usize>,
    pub class: FredholmClass,
    pub kernel: SideTrace,
    pub cokernel: SideTrace,
    pub config: SweepConfig,
}

impl SweepVerdict {
    /// The verdict rests on stabilized evidence on both sides.
    pub fn stabilized(&self) -> bool {
        self.class != FredholmClass::Undecided
    }
}

/// Kernel-side trace of the sweep: column compressions of `a` itself.
pub fn kernel_trace(a: &BandOperator, radii: &[usize], cfg: &SweepConfig) -> SideTrace {
    let per_radius: Vec<(usize, f64)> = radii
        .par_iter()
        .map(|&n| {
            let cols = Window::new(a.dim(), n).to_box();
            let sv = singular_values_ascending(&a.compress(&cols.dilate(a.bandwidth()), &cols));
            let count = sv.iter().filter(|&&s| s < cfg.zero_tol).count();
            let gap = sv.get(count).copied().unwrap_or(f64::INFINITY);
            (count, gap)
        })
        .collect();
    let counts: Vec<usize> = per_radius.iter().map(|x| x.0).collect();
    let gaps: Vec<f64> = per_radius.iter().map(|x| x.1).collect();
    let k = counts.len();
    let (c, g) = (&counts[k - 3..], &gaps[k - 3..]);
    let gaps_stable = is_stable(g, cfg.stab_tol);
    let separated = g.iter().all(|&x| x >= cfg.sep_factor * cfg.zero_tol);
    let status = if c[0] == c[1] && c[1] == c[2] && gaps_stable && separated {
        DefectStatus::Finite(c[2])
    } else if c[0] < c[1] && c[1] < c[2] && gaps_stable && separated {
        DefectStatus::Infinite
    } else if c[0] == c[1] && c[1] == c[2] && g.windows(2).all(|w| w[1] < w[0] * (1.0 - cfg.stab_tol)) {
        DefectStatus::Degenerate
    } else {
        DefectStatus::Unresolved
    };
    SideTrace { counts, gaps, status }
}

/// Heuristic oracle: tracks singular values of the row-dilated column
/// compressions P_{W+w} A P_W of A (kernel side) and of A* (cokernel side)
/// over growing windows W.
pub fn truncation_sweep_classify(a: &BandOperator, radii: &[usize], cfg: SweepConfig) -> Result<SweepVerdict> {
    let mut radii = radii.to_vec();
    radii.sort_unstable();
    radii.dedup();
    if radii.len() < 3 {
        return Err(Error::InvalidArgument("the truncation sweep needs at least 3 distinct radii".into()));
    }
    let adj = a.adjoint();
    let (kernel, cokernel) = rayon::join(|| kernel_trace(a, &radii, &cfg), || kernel_trace(&adj, &radii, &cfg));
    use DefectStatus::*;
    let class = match (kernel.status, cokernel.status) {
        (Finite(_), Finite(_)) => FredholmClass::Fredholm,
        (Finite(_), Infinite) => FredholmClass::UpperSemiOnly,
        (Infinite, Finite(_)) => FredholmClass::LowerSemiOnly,
        (Degenerate, Degenerate) | (Infinite, Infinite) | (Infinite, Degenerate) | (Degenerate, Infinite) => {
            FredholmClass::NotSemiFredholm
        }
        _ => FredholmClass::Undecided,
    };
    Ok(SweepVerdict { radii, class, kernel, cokernel, config: cfg })
}

/// The default radii of the one-dimensional sweeps.
pub const DEFAULT_RADII: [usize; 4] = [32, 48, 64, 96];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandop::CoefficientSequence;
    use crate::linalg::{c, real_block, ONE};
    use proptest::prelude::*;

    fn l2() -> NormTag {
        NormTag::new(PNorm::Two)
    }

    fn i_minus_v1() -> BandOperator {
        BandOperator::scalar_laurent(&[(0, c(1.0, 0.0)), (1, c(-1.0, 0.0))]).unwrap()
    }

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
    }

    fn tm(m: CMatrix, p: PNorm) -> TruncatedMatrix {
        TruncatedMatrix::from_matrix(m, NormTag::new(p))
    }

    #[test]
    fn identity_moduli() {
        for p in [PNorm::One, PNorm::Two, PNorm::Infinity] {
            let id = tm(CMatrix::identity(4, 4), p);
            assert!((lower_norm(&id).unwrap() - 1.0).abs() < 1e-15);
            assert!((surjection_modulus(&id).unwrap() - 1.0).abs() < 1e-15);
        }
        assert_eq!(approx_numbers(&tm(CMatrix::identity(5, 5), PNorm::Two), 5, Side::Right).unwrap()[1..], [1.0; 5]);
    }

    #[test]
    fn finite_section_of_i_minus_v1() {
        let t = i_minus_v1().truncate_boxes(SiteBox::interval(0, 64), SiteBox::interval(0, 64), l2());
        let j = lower_norm(&t).unwrap();
        assert!(j > 0.0 && j < 0.05, "j = {j}");
        for n in [1usize, 2, 5, 17, 40] {
            let t = i_minus_v1().truncate_boxes(SiteBox::interval(0, n), SiteBox::interval(0, n), NormTag::new(PNorm::Infinity));
            assert!((lower_norm(&t).unwrap() - 1.0 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn rectangular_lower_norm_rules() {
        let wide = tm(CMatrix::from_element(2, 3, ONE), PNorm::Two);
        assert_eq!(lower_norm(&wide).unwrap(), 0.0);
        assert!(lower_norm(&tm(CMatrix::from_element(2, 3, ONE), PNorm::One)).is_err());
        assert!((surjection_modulus(&tm(diag(&[2.0, 3.0]), PNorm::Two)).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_approximation_numbers() {
        let s = approx_numbers(&tm(diag(&[0.1, 1.0, 10.0]), PNorm::Two), 2, Side::Right).unwrap();
        assert_eq!(s[0], 0.0);
        assert!((s[1] - 0.1).abs() < 1e-15);
        assert!((s[2] - 1.0).abs() < 1e-14);
        assert!(approx_numbers(&tm(diag(&[1.0]), PNorm::One), 1, Side::Right).is_err());
    }

    #[test]
    fn sandwich_slack_factor() {
        let r = sandwich_check(&tm(CMatrix::identity(4, 4), PNorm::Two), 3).unwrap();
        assert_eq!(r.slack_factors, vec![1, 3, 7]);
        assert!(r.bernstein.iter().all(|b| (b - 1.0).abs() < 1e-12));
        assert!(r.general_bound_holds);
    }

    #[test]
    fn localized_profiles() {
        let p = localized_lower_norm(&i_minus_v1(), 16, &SiteBox::interval(-30, 60), l2()).unwrap();
        let expect = 2.0 * (std::f64::consts::PI / 34.0).sin();
        assert!(p.values.iter().all(|(_, v)| (v - expect).abs() < 1e-12));
        assert!(p.minimum > 0.0 && p.minimum < 0.2);

        let a = CoefficientSequence::Tabulated { table: [(MultiIndex::d1(0), real_block(0.0))].into(), default: real_block(1.0) };
        let m = BandOperator::multiplication(1, a).unwrap();
        let p = localized_lower_norm(&m, 4, &SiteBox::interval(-6, 13), l2()).unwrap();
        for (corner, v) in &p.values {
            let contains_zero = corner.get(0) <= 0 && 0 < corner.get(0) + 4;
            assert_eq!(*v < 1e-14, contains_zero);
        }
        assert!(localized_lower_norm(&m, 0, &SiteBox::interval(0, 4), l2()).is_err());
    }

    #[test]
    fn sweep_examples() {
        let cfg = SweepConfig::default();
        let id = truncation_sweep_classify(&BandOperator::identity(1, 1).unwrap(), &DEFAULT_RADII, cfg).unwrap();
        assert_eq!(id.class, FredholmClass::Fredholm);
        assert_eq!(id.kernel.status, DefectStatus::Finite(0));
        assert_eq!(id.cokernel.status, DefectStatus::Finite(0));

        let v = truncation_sweep_classify(&i_minus_v1(), &DEFAULT_RADII, cfg).unwrap();
        assert_eq!(v.class, FredholmClass::NotSemiFredholm);

        let two_minus_t = BandOperator::scalar_laurent(&[(0, c(2.0, 0.0)), (1, c(-1.0, 0.0))]).unwrap();
        let v = truncation_sweep_classify(&two_minus_t, &DEFAULT_RADII, cfg).unwrap();
        assert_eq!(v.class, FredholmClass::Fredholm);
        assert!(v.kernel.gaps.iter().all(|&g| g >= 1.0 - cfg.stab_tol));

        let coarse = SweepConfig { zero_tol: 0.5, ..cfg };
        assert_eq!(truncation_sweep_classify(&i_minus_v1(), &DEFAULT_RADII, coarse).unwrap().class, FredholmClass::Undecided);
        assert!(truncation_sweep_classify(&i_minus_v1(), &[4, 8], cfg).is_err());
    }

    #[test]
    fn moduli_report_csv_layout() {
        let r = moduli_report(&i_minus_v1(), &[8, 16, 32, 64], 5, l2(), 0.05).unwrap();
        let csv = r.to_csv();
        let header = csv.lines().next().unwrap();
        assert_eq!(header, "radius,j,q,sigma_1,sigma_2,sigma_3,sigma_4,sigma_5,flags");
        assert_eq!(csv.lines().count(), 5);
        for row in &r.rows {
            assert!(row.sigma.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(row.s_right[1..], row.sigma[..]);
            assert!((row.j - row.q).abs() < 1e-12);
            assert!((row.j - row.sigma[0]).abs() < 1e-12);
        }
    }

    fn random_matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols)
            .prop_map(move |v| CMatrix::from_iterator(rows, cols, v.into_iter().map(|(a, b)| c(a, b))))
    }

    fn shaped() -> impl Strategy<Value = CMatrix> {
        (1usize..8, 1usize..8).prop_flat_map(|(r, c)| random_matrix(r, c))
    }

    proptest! {
        #[test]
        fn square_l2_moduli_coincide(m in (1usize..9).prop_flat_map(|n| random_matrix(n, n))) {
            let t = tm(m, PNorm::Two);
            let sv = singular_values_ascending(&t.matrix)[0];
            prop_assert!((lower_norm(&t).unwrap() - sv).abs() < 1e-12);
            prop_assert!((surjection_modulus(&t).unwrap() - sv).abs() < 1e-12);
        }

        #[test]
        fn duality_at_p1_and_pinf(m in (1usize..9).prop_flat_map(|n| random_matrix(n, n))) {
            for p in [PNorm::One, PNorm::Infinity] {
                let j = lower_norm(&tm(m.clone(), p)).unwrap();
                let q = surjection_modulus(&tm(m.adjoint(), p.dual())).unwrap();
                prop_assert!((j - q).abs() < 1e-12 * (1.0 + j));
            }
        }

        #[test]
        fn approximation_numbers_are_monotone(m in shaped()) {
            let t = tm(m, PNorm::Two);
            let r = approx_numbers(&t, t.ncols(), Side::Right).unwrap();
            let l = approx_numbers(&t, t.nrows(), Side::Left).unwrap();
            prop_assert!(r.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(l.windows(2).all(|w| w[0] <= w[1]));
            // s^r_1 > 0 exactly when the matrix is injective
            let rank = singular_values_ascending(&t.matrix).iter().filter(|&&s| s > 1e-10).count();
            prop_assert_eq!(r[1] > 1e-10, rank == t.ncols());
        }

        #[test]
        fn index_shift_identity(m in shaped()) {
            let t = tm(m, PNorm::Two);
            let (rows, cols) = (t.nrows() as i64, t.ncols() as i64);
            let r = approx_numbers(&t, t.ncols(), Side::Right).unwrap();
            let l = approx_numbers(&t, t.nrows(), Side::Left).unwrap();
            for k in 0..=cols {
                let lk = rows - cols + k;
                if (0..=rows).contains(&lk) {
                    prop_assert!((l[lk as usize] - r[k as usize]).abs() < 1e-10);
                }
            }
        }
    }
}
