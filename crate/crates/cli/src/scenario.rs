//! Declarative scenario files (schema version 1).

use std::path::Path;

use mmd_core::group::FiniteAbelianGroup;
use mmd_core::linalg::{CMatrix, CVector, C64};
use mmd_core::operator::{DensityState, StateVector};
use mmd_core::rep::UnitaryRep;
use serde::{Deserialize, Serialize};
use serde_path_to_error::{Path as ErrorPath, Segment};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// `[re, im]`.
pub type Complex = [f64; 2];
/// Row-major list of rows.
pub type ComplexMatrix = Vec<Vec<Complex>>;

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub group_orders: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<RepSpec>,
    #[serde(
        default,
        alias = "initial_state",
        skip_serializing_if = "Option::is_none"
    )]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_sets: Option<Vec<OutcomeSet>>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub stages: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<CascadePath>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup_generators: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected_coset: Option<usize>,
    /// Algebra generators: the input of `sectors`, the system algebra of
    /// `crossed` (full matrix algebra when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<ComplexMatrix>>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RepSpec {
    Named(RepName),
    /// One unitary per cyclic factor.
    Matrices(Vec<ComplexMatrix>),
    Object {
        generators: Vec<ComplexMatrix>,
    },
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum RepName {
    /// Regular representation with `α_u = Ad(λ_u)`.
    Standard,
    Regular,
    /// Trivial representation on `C`.
    Trivial,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum StateSpec {
    Vector(Vec<Complex>),
    Density(ComplexMatrix),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeSet {
    pub label: String,
    /// Character tuples `(γ₁, …, γ_k)`.
    pub characters: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CascadePath {
    #[default]
    Dense,
    Analytic,
}

fn pointer(path: &ErrorPath) -> String {
    let mut out = String::new();
    for segment in path.iter() {
        match segment {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => {
                out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1")))
            }
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let at = pointer(e.path());
            CliError::at(at, e.into_inner().to_string())
        })?;
        if scenario.schema_version != SCHEMA_VERSION {
            return Err(CliError::at(
                "/schema_version",
                format!("unsupported schema version {}", scenario.schema_version),
            ));
        }
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn group(&self) -> Result<FiniteAbelianGroup> {
        if self.group_orders.is_empty() {
            return Err(CliError::at("/group_orders", "missing or empty"));
        }
        FiniteAbelianGroup::new(&self.group_orders)
            .map_err(|e| CliError::core_at("/group_orders", e))
    }

    /// Defaults to the standard coupling when `rep` is absent.
    pub fn representation(&self, group: &FiniteAbelianGroup) -> Result<UnitaryRep> {
        match self
            .rep
            .as_ref()
            .unwrap_or(&RepSpec::Named(RepName::Standard))
        {
            RepSpec::Named(RepName::Standard | RepName::Regular) => Ok(UnitaryRep::regular(group)),
            RepSpec::Named(RepName::Trivial) => Ok(UnitaryRep::trivial(group, 1)),
            RepSpec::Matrices(ms) => generator_rep(group, ms, "/rep"),
            RepSpec::Object { generators } => generator_rep(group, generators, "/rep/generators"),
        }
    }

    pub fn vector_state(&self, dim: usize) -> Result<StateVector> {
        match &self.state {
            Some(StateSpec::Vector(v)) => {
                let v = vector(v);
                if v.len() != dim {
                    return Err(CliError::at(
                        "/state",
                        format!("expected {dim} amplitudes, found {}", v.len()),
                    ));
                }
                StateVector::normalized(v, mmd_core::operator::Signature::single(dim))
                    .map_err(|e| CliError::core_at("/state", e))
            }
            Some(StateSpec::Density(_)) => {
                Err(CliError::at("/state", "a state vector is required here"))
            }
            None => Err(CliError::at("/state", "missing")),
        }
    }

    pub fn density_state(&self, dim: usize) -> Result<DensityState> {
        match &self.state {
            Some(StateSpec::Vector(_)) => Ok(self.vector_state(dim)?.density()),
            Some(StateSpec::Density(rows)) => {
                let m = matrix(rows, "/state")?;
                if m.nrows() != dim {
                    return Err(CliError::at(
                        "/state",
                        format!("expected a {dim}×{dim} density matrix"),
                    ));
                }
                DensityState::single(m).map_err(|e| CliError::core_at("/state", e))
            }
            None => Err(CliError::at("/state", "missing")),
        }
    }

    pub fn algebra_generators(&self, dim: Option<usize>) -> Result<Option<Vec<CMatrix>>> {
        let Some(gens) = &self.generators else {
            return Ok(None);
        };
        let out = gens
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let at = format!("/generators/{i}");
                let m = matrix(g, &at)?;
                match dim {
                    Some(d) if m.nrows() != d => Err(CliError::at(
                        at,
                        format!("expected {d}×{d}, found {}×{}", m.nrows(), m.ncols()),
                    )),
                    _ => Ok(m),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = out.first() {
            if let Some(i) = out.iter().position(|m| m.nrows() != first.nrows()) {
                return Err(CliError::at(
                    format!("/generators/{i}"),
                    "generators have different sizes",
                ));
            }
        }
        Ok(Some(out))
    }
}

fn generator_rep(group: &FiniteAbelianGroup, ms: &[ComplexMatrix], at: &str) -> Result<UnitaryRep> {
    if ms.len() != group.rank() {
        return Err(CliError::at(
            at,
            format!(
                "expected {} generator matrices, one per cyclic factor, found {}",
                group.rank(),
                ms.len()
            ),
        ));
    }
    let gens = ms
        .iter()
        .enumerate()
        .map(|(i, m)| matrix(m, &format!("{at}/{i}")))
        .collect::<Result<Vec<_>>>()?;
    UnitaryRep::from_generators(group, gens).map_err(|e| CliError::core_at(at, e))
}

pub fn complex(z: &Complex) -> C64 {
    C64::new(z[0], z[1])
}

pub fn vector(v: &[Complex]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(complex))
}

pub fn matrix(rows: &ComplexMatrix, at: &str) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(CliError::at(at, "empty matrix"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(CliError::at(
            format!("{at}/{i}"),
            format!("row has {} entries, expected {n}", rows[i].len()),
        ));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| complex(&rows[i][j])))
}

pub fn to_pair(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn to_rows(m: &CMatrix) -> ComplexMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| to_pair(m[(i, j)])).collect())
        .collect()
}

pub fn to_pairs(v: &CVector) -> Vec<Complex> {
    v.iter().map(|&z| to_pair(z)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_errors_carry_pointers() {
        let err = Scenario::parse(
            r#"{"group_orders":[2],"rep":{"generators":[[[[1,0],[0,0]],[[0,0]]]]}}"#,
        );
        let ok = Scenario::parse(
            r#"{"group_orders":[2],"rep":{"generators":[[[[1,0],[0,0]],[[0,0],[-1,0]]]]}}"#,
        );
        assert!(ok.is_ok());
        let s = err.unwrap();
        match s.representation(&s.group().unwrap()) {
            Err(CliError::Scenario { pointer, .. }) => assert_eq!(pointer, "/rep/generators/0/1"),
            other => panic!("{other:?}"),
        }
        match Scenario::parse(r#"{"group_orders":[2, "x"]}"#) {
            Err(CliError::Scenario { pointer, .. }) => assert_eq!(pointer, "/group_orders/1"),
            other => panic!("{other:?}"),
        }
        match Scenario::parse(r#"{"group_orders":[2], "bogus": 1}"#) {
            Err(CliError::Scenario { pointer, .. }) => assert_eq!(pointer, "/bogus"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_other_schema_versions() {
        assert!(matches!(
            Scenario::parse(r#"{"schema_version":2}"#),
            Err(CliError::Scenario { .. })
        ));
    }

    #[test]
    fn named_reps_and_states() {
        let s = Scenario::parse(
            r#"{"group_orders":[2,2],"rep":"standard","state":[[1,0],[0,0],[0,0],[0,0]],"N":3}"#,
        )
        .unwrap();
        let g = s.group().unwrap();
        assert_eq!(s.representation(&g).unwrap().dim(), 4);
        assert_eq!(s.vector_state(4).unwrap().vector().len(), 4);
        assert_eq!(s.stages, Some(3));
        assert!(s.vector_state(3).is_err());
    }
}
