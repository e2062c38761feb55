//! Scenario documents: what to compute, on which model and family, with
//! which budget and seed; and the reports they produce.
mod build;
mod registry;

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use registry::{is_builtin, list_builtins, CatalogEntry, FamilyKind};

use crate::degree::{Budget, DegreeResult};
use crate::error::{Error, Result};
use crate::homogeneous::{EpsilonReport, EvaluationDatum, GroupDescriptor, HomotopyGroup};
use crate::pipelines::{FluxReport, FramePolicy, IndexReport, LinearCycle, ModelKind};
use crate::unitary::SampledData;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FamilySpec {
    Identity,
    Su2Generator,
    CliffordGenerator,
    DiagonalLoop {
        windings: Vec<i32>,
    },
    Sampled {
        data: SampledData,
    },
    Cp1Rotation {
        axis: [f64; 3],
        #[serde(default = "one_i32")]
        turns: i32,
    },
    TorusTranslation {
        vector: Vec<f64>,
    },
    TorusShear {
        amplitude: f64,
    },
    #[serde(rename = "linear_contact_sphere_S")]
    LinearContactSphereS,
    DeltaRotations,
    Alpha0Constant,
}

fn one_i32() -> i32 {
    1
}

fn one_usize() -> usize {
    1
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Identity => "identity",
            FamilySpec::Su2Generator => "su2_generator",
            FamilySpec::CliffordGenerator => "clifford_generator",
            FamilySpec::DiagonalLoop { .. } => "diagonal_loop",
            FamilySpec::Sampled { .. } => "sampled",
            FamilySpec::Cp1Rotation { .. } => "cp1_rotation",
            FamilySpec::TorusTranslation { .. } => "torus_translation",
            FamilySpec::TorusShear { .. } => "torus_shear",
            FamilySpec::LinearContactSphereS => "linear_contact_sphere_S",
            FamilySpec::DeltaRotations => "delta_rotations",
            FamilySpec::Alpha0Constant => "alpha0_constant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Request {
    #[serde(alias = "index_A")]
    IndexA {
        k: usize,
        #[serde(default)]
        policy: Option<FramePolicy>,
        #[serde(default)]
        basepoint: Option<Vec<f64>>,
    },
    #[serde(alias = "index_B")]
    IndexB {
        k: usize,
        #[serde(default)]
        basepoint: Option<Vec<f64>>,
    },
    /// Homogeneous index; the datum defaults to the standard one, or a
    /// random one when `datum_seed` is given.
    Epsilon {
        #[serde(default)]
        datum: Option<EvaluationDatum>,
        #[serde(default)]
        datum_seed: Option<u64>,
    },
    Flux {
        cycle: LinearCycle,
        /// Constant 2-form as a matrix; `sum dx_j ^ dy_j` when absent.
        #[serde(default)]
        omega: Option<Vec<Vec<f64>>>,
    },
    /// Degree of a column map `S^(2n-1) -> S^(2n-1)` of a unitary family.
    Degree {
        #[serde(default = "one_usize")]
        column: usize,
    },
    Tables {
        k: usize,
        dim: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub model: Option<ModelKind>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    pub request: Request,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default)]
    pub seed: u64,
}

const MODEL_KINDS: [&str; 4] = ["linear_contact_sphere", "torus", "cp1", "s1xs2"];

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

impl Scenario {
    /// Parses a scenario document. Identifiers are checked before the
    /// structure so unknown names are reported as such.
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(parse_error)?;
        if let Some(name) = value.pointer("/family/name").and_then(|v| v.as_str()) {
            if !is_builtin(name) {
                return Err(Error::UnknownFamily(name.to_string()));
            }
        }
        if let Some(kind) = value.pointer("/model/kind").and_then(|v| v.as_str()) {
            if !MODEL_KINDS.contains(&kind) {
                return Err(Error::UnknownModel(kind.to_string()));
            }
        }
        serde_json::from_str(text).map_err(parse_error)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenarios serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    Uncertified,
    Error,
}

impl Status {
    /// 0 certified, 2 uncertified, 1 error.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Certified => 0,
            Status::Uncertified => 2,
            Status::Error => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ResultValue {
    Integer { value: i64 },
    Residue { value: i64, modulus: u64 },
    Real { value: f64, error_estimate: f64 },
    Group { group: HomotopyGroup, stable: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificates {
    Index(Box<IndexReport>),
    Epsilon(Box<EpsilonReport>),
    Flux(FluxReport),
    Degree(DegreeResult),
    Group(GroupDescriptor),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub scenario: Scenario,
    pub status: Status,
    pub result: Option<ResultValue>,
    pub certificates: Option<Certificates>,
    pub error: Option<String>,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Runs a parsed scenario; pipeline failures are recorded in the report.
pub fn run(scenario: &Scenario) -> Report {
    let start = Instant::now();
    let (status, result, certificates, error) = match build::execute(scenario) {
        Ok((result, certificates, certified)) => {
            let status = if certified { Status::Certified } else { Status::Uncertified };
            (status, Some(result), Some(certificates), None)
        }
        Err(e) => (Status::Error, None, None, Some(e.to_string())),
    };
    Report {
        version: VERSION.to_string(),
        scenario: scenario.clone(),
        status,
        result,
        certificates,
        error,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    }
}

/// Parses and runs scenario text.
pub fn run_scenario(text: &str) -> Result<Report> {
    Ok(run(&Scenario::parse(text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_injected() {
        let s = Scenario::parse(r#"{"request": {"kind": "tables", "k": 2, "dim": 8}}"#).unwrap();
        assert_eq!((s.seed, s.budget, &s.family, s.model), (0, Budget::default(), &None, None));
        assert_eq!(Scenario::parse(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn identifiers_are_checked_first() {
        let e = Scenario::parse(r#"{"family": {"name": "bogus"}, "request": {"kind": "degree"}}"#).unwrap_err();
        assert_eq!(e, Error::UnknownFamily("bogus".into()));
        let e = Scenario::parse(r#"{"model": {"kind": "klein"}, "request": {"kind": "degree"}}"#).unwrap_err();
        assert_eq!(e, Error::UnknownModel("klein".into()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = Scenario::parse("{\n  \"request\": {\"kind\": \"tables\",\n  \"k\": }\n}").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = Scenario::parse("{\"request\": {\"kind\": \"tables\", \"k\": 1}}").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }), "{e:?}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Certified.exit_code(), 0);
        assert_eq!(Status::Uncertified.exit_code(), 2);
        assert_eq!(Status::Error.exit_code(), 1);
    }
}
