//! The operator description format.
//!
//! ```json
//! {"schemaVersion": 1, "N": 1, "d": 1, "tailBound": 0.0,
//!  "diagonals": [{"offset": [1], "class": "constant", "value": [[[-1.0, 0.0]]]}]}
//! ```
//!
//! A matrix is a list of rows, an entry is `[re, im]` (a bare number is read
//! as a real entry). Per class the diagonal carries:
//! `constant`: `value`; `periodic`: `periods`, `table`;
//! `eventually_periodic`: `axis`, `left`, `coreStart`, `core`, `right`;
//! `finite_support`: `entries`; `tabulated`: `default`, `entries`,
//! where `entries` is a list of `{"site": [..], "value": M}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BandOperator, CoefficientSequence};
use crate::error::{Error, Result};
use crate::lattice::MultiIndex;
use crate::linalg::CMatrix;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct Matrix(Vec<Vec<Entry>>);

impl From<&CMatrix> for Matrix {
    fn from(m: &CMatrix) -> Self {
        Matrix(m.row_iter().map(|row| row.iter().map(|z| Entry::Pair([z.re, z.im])).collect()).collect())
    }
}

impl Matrix {
    fn to_cmatrix(&self, d: usize) -> Result<CMatrix> {
        if self.0.len() != d || self.0.iter().any(|r| r.len() != d) {
            return Err(Error::Format(format!("expected a {d}×{d} matrix")));
        }
        Ok(CMatrix::from_fn(d, d, |i, j| match self.0[i][j] {
            Entry::Pair([re, im]) => Complex64::new(re, im),
            Entry::Real(re) => Complex64::new(re, 0.0),
        }))
    }
}

#[derive(Serialize, Deserialize)]
struct SiteValue {
    site: MultiIndex,
    value: Matrix,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case", deny_unknown_fields)]
enum Coefficients {
    Constant {
        value: Matrix,
    },
    Periodic {
        periods: Vec<usize>,
        table: Vec<Matrix>,
    },
    EventuallyPeriodic {
        #[serde(default)]
        axis: usize,
        left: Vec<Matrix>,
        #[serde(rename = "coreStart")]
        core_start: i64,
        core: Vec<Matrix>,
        right: Vec<Matrix>,
    },
    FiniteSupport {
        entries: Vec<SiteValue>,
    },
    Tabulated {
        default: Matrix,
        entries: Vec<SiteValue>,
    },
}

#[derive(Serialize, Deserialize)]
struct Diagonal {
    offset: MultiIndex,
    #[serde(flatten)]
    coefficients: Coefficients,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct OperatorFile {
    #[serde(default = "default_version")]
    schema_version: u32,
    #[serde(rename = "N")]
    n: usize,
    d: usize,
    #[serde(default)]
    tail_bound: f64,
    diagonals: Vec<Diagonal>,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

fn site_values(table: &BTreeMap<MultiIndex, CMatrix>) -> Vec<SiteValue> {
    table.iter().map(|(k, v)| SiteValue { site: *k, value: v.into() }).collect()
}

fn matrices(v: &[CMatrix]) -> Vec<Matrix> {
    v.iter().map(Matrix::from).collect()
}

impl From<&CoefficientSequence> for Coefficients {
    fn from(a: &CoefficientSequence) -> Self {
        match a {
            CoefficientSequence::Constant(m) => Coefficients::Constant { value: m.into() },
            CoefficientSequence::Periodic { periods, table } => {
                Coefficients::Periodic { periods: periods.clone(), table: matrices(table) }
            }
            CoefficientSequence::EventuallyPeriodic { axis, left, core_start, core, right } => {
                Coefficients::EventuallyPeriodic {
                    axis: *axis,
                    left: matrices(left),
                    core_start: *core_start,
                    core: matrices(core),
                    right: matrices(right),
                }
            }
            CoefficientSequence::FiniteSupport { table, .. } => Coefficients::FiniteSupport { entries: site_values(table) },
            CoefficientSequence::Tabulated { table, default } => {
                Coefficients::Tabulated { default: default.into(), entries: site_values(table) }
            }
        }
    }
}

impl Coefficients {
    fn to_sequence(&self, d: usize) -> Result<CoefficientSequence> {
        let all = |v: &[Matrix]| v.iter().map(|m| m.to_cmatrix(d)).collect::<Result<Vec<_>>>();
        let table = |v: &[SiteValue]| {
            v.iter().map(|e| Ok((e.site, e.value.to_cmatrix(d)?))).collect::<Result<BTreeMap<_, _>>>()
        };
        Ok(match self {
            Coefficients::Constant { value } => CoefficientSequence::Constant(value.to_cmatrix(d)?),
            Coefficients::Periodic { periods, table } => {
                CoefficientSequence::Periodic { periods: periods.clone(), table: all(table)? }
            }
            Coefficients::EventuallyPeriodic { axis, left, core_start, core, right } => {
                CoefficientSequence::EventuallyPeriodic {
                    axis: *axis,
                    left: all(left)?,
                    core_start: *core_start,
                    core: all(core)?,
                    right: all(right)?,
                }
            }
            Coefficients::FiniteSupport { entries } => CoefficientSequence::FiniteSupport { fiber: d, table: table(entries)? },
            Coefficients::Tabulated { default, entries } => {
                CoefficientSequence::Tabulated { table: table(entries)?, default: default.to_cmatrix(d)? }
            }
        })
    }
}

impl From<&BandOperator> for OperatorFile {
    fn from(op: &BandOperator) -> Self {
        OperatorFile {
            schema_version: SCHEMA_VERSION,
            n: op.dim,
            d: op.fiber,
            tail_bound: op.tail_bound,
            diagonals: op
                .diagonals
                .iter()
                .map(|(k, a)| Diagonal { offset: *k, coefficients: a.into() })
                .collect(),
        }
    }
}

impl TryFrom<OperatorFile> for BandOperator {
    type Error = Error;

    fn try_from(f: OperatorFile) -> Result<Self> {
        if f.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!("unsupported schemaVersion {}", f.schema_version)));
        }
        let mut op = BandOperator::zero(f.n, f.d)?.with_tail_bound(f.tail_bound)?;
        for diag in &f.diagonals {
            op = op.with_diagonal(diag.offset, diag.coefficients.to_sequence(f.d)?)?;
        }
        Ok(op)
    }
}

impl Serialize for BandOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BandOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = OperatorFile::deserialize(d)?;
        BandOperator::try_from(f).map_err(serde::de::Error::custom)
    }
}

impl BandOperator {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("operator serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real_block};

    #[test]
    fn round_trip_is_lossless() {
        let weird = CMatrix::from_row_slice(2, 2, &[c(0.1, 1e-300), c(-1.0 / 3.0, 0.0), c(f64::MAX, -0.0), c(2.5e-17, 7.0)]);
        let op = BandOperator::from_diagonals(
            1,
            2,
            [
                (MultiIndex::d1(0), CoefficientSequence::Constant(weird.clone())),
                (
                    MultiIndex::d1(1),
                    CoefficientSequence::eventually_periodic(
                        vec![weird.clone()],
                        -2,
                        vec![CMatrix::identity(2, 2), weird.adjoint()],
                        vec![CMatrix::identity(2, 2), weird.clone()],
                    ),
                ),
                (
                    MultiIndex::d1(-3),
                    CoefficientSequence::finite_support(2, [(MultiIndex::d1(4), weird.clone())]),
                ),
                (
                    MultiIndex::d1(2),
                    CoefficientSequence::Tabulated { table: [(MultiIndex::d1(1), weird.clone())].into(), default: CMatrix::identity(2, 2) },
                ),
            ],
        )
        .unwrap()
        .with_tail_bound(1e-3)
        .unwrap();
        let back = BandOperator::from_json(&op.to_json()).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn accepts_real_shorthand_and_rejects_bad_shapes() {
        let text = r#"{"N": 1, "d": 1, "diagonals": [
            {"offset": [0], "class": "constant", "value": [[1]]},
            {"offset": [1], "class": "periodic", "periods": [2], "table": [[[-1.0]], [[[0.0, 2.0]]]]}
        ]}"#;
        let op = BandOperator::from_json(text).unwrap();
        assert_eq!(op.bandwidth(), 1);
        assert_eq!(op.coefficient(&MultiIndex::d1(0)), Some(&CoefficientSequence::Constant(real_block(1.0))));
        let bad = r#"{"N": 1, "d": 2, "diagonals": [{"offset": [0], "class": "constant", "value": [[1]]}]}"#;
        assert!(BandOperator::from_json(bad).is_err());
        let bad_dim = r#"{"N": 2, "d": 1, "diagonals": [{"offset": [0], "class": "constant", "value": [[1]]}]}"#;
        assert!(BandOperator::from_json(bad_dim).is_err());
    }
}
