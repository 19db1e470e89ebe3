//! Random operator generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use bandlab::linalg::{lcm, scalar_block, CMatrix};
use bandlab::{BandOperator, CoefficientSequence, MultiIndex};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;

/// Uniform phase, modulus uniform in [lo, hi).
fn polar(rng: &mut StdRng, lo: f64, hi: f64) -> Complex64 {
    let r = if hi > lo { rng.random_range(lo..hi) } else { lo };
    Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

fn multiply(a: &BTreeMap<i64, Complex64>, b: &[(i64, Complex64)]) -> BTreeMap<i64, Complex64> {
    let mut out = BTreeMap::new();
    for (i, x) in a {
        for (j, y) in b {
            *out.entry(i + j).or_insert(Complex64::new(0.0, 0.0)) += x * y;
        }
    }
    out
}

/// Laurent coefficients of c · t^s · Π f_i(t) with one or two factors
/// 1 − t/z (|z| ≥ 2.5) or 1 − z/t (|z| ≤ 0.4); `zero_on_circle` swaps one
/// factor for 1 − t·e^{−iφ}. Offsets stay in [−3, 3].
pub fn random_symbol(rng: &mut StdRng, zero_on_circle: bool) -> BTreeMap<i64, Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut sym: BTreeMap<i64, Complex64> = [(0, polar(rng, 0.6, 1.5))].into();
    let factors = rng.random_range(1..=2);
    for f in 0..factors {
        let factor = if zero_on_circle && f == 0 {
            vec![(0, one), (1, -polar(rng, 1.0, 1.0))]
        } else if rng.random_bool(0.5) {
            let z = polar(rng, 2.5, 4.0);
            vec![(0, one), (1, -one / z)]
        } else {
            let z = polar(rng, 0.25, 0.4);
            vec![(0, one), (-1, -z)]
        };
        sym = multiply(&sym, &factor);
    }
    let lo = *sym.keys().next().unwrap();
    let hi = *sym.keys().last().unwrap();
    let s = rng.random_range((-3 - lo)..=(3 - hi));
    sym.into_iter().map(|(k, v)| (k + s, v)).collect()
}

/// Scalar operator equal to one Laurent operator on the left, another on
/// the right, with a perturbed core of four sites starting at −2.
pub fn eventually_constant(rng: &mut StdRng, fredholm: bool) -> BandOperator {
    let bad_side = rng.random_bool(0.5);
    let left = random_symbol(rng, !fredholm && bad_side);
    let right = random_symbol(rng, !fredholm && !bad_side);
    let mut offsets: Vec<i64> = left.keys().chain(right.keys()).copied().collect();
    offsets.sort_unstable();
    offsets.dedup();
    let zero = Complex64::new(0.0, 0.0);
    let mut op = BandOperator::zero(1, 1).unwrap();
    for k in offsets {
        let l = *left.get(&k).unwrap_or(&zero);
        let r = *right.get(&k).unwrap_or(&zero);
        let core: Vec<CMatrix> = (0..4)
            .map(|i| {
                let base = if i < 2 { l } else { r };
                scalar_block(base + polar(rng, 0.0, 0.3))
            })
            .collect();
        let seq = CoefficientSequence::eventually_periodic(vec![scalar_block(l)], -2, core, vec![scalar_block(r)]);
        op = op.with_diagonal(MultiIndex::d1(k), seq).unwrap();
    }
    op
}

fn table(rng: &mut StdRng, len: usize) -> Vec<CMatrix> {
    (0..len).map(|_| scalar_block(Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).collect()
}

/// Eventually periodic scalar operator on diagonals −1, 0, 1 with the end of
/// its cores and the lcm of its right periods.
pub fn random_eventually_periodic(rng: &mut StdRng) -> (BandOperator, i64, usize) {
    let mut op = BandOperator::zero(1, 1).unwrap();
    let (mut core_end, mut period) = (i64::MIN, 1usize);
    for k in -1..=1 {
        let lp = rng.random_range(1..=2);
        let rp = rng.random_range(1..=3);
        let len = rng.random_range(0..=4);
        let start = rng.random_range(-3..=3);
        core_end = core_end.max(start + len as i64);
        period = lcm(period, rp);
        let seq = CoefficientSequence::eventually_periodic(table(rng, lp), start, table(rng, len), table(rng, rp));
        op = op.with_diagonal(MultiIndex::d1(k), seq).unwrap();
    }
    (op, core_end, period)
}

/// Random scalar Laurent operator with offsets −w … w and |a_{±w}| ≥ 0.1.
pub fn random_band(rng: &mut StdRng, w: usize) -> BandOperator {
    let coeffs: Vec<(i64, Complex64)> = (-(w as i64)..=w as i64)
        .map(|k| {
            let lo = if k.unsigned_abs() as usize == w { 0.1 } else { 0.0 };
            (k, polar(rng, lo, 1.0) + if k == 0 { Complex64::new(3.0, 0.0) } else { Complex64::new(0.0, 0.0) })
        })
        .collect();
    BandOperator::scalar_laurent(&coeffs).unwrap()
}
