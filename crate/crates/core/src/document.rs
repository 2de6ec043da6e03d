//! JSON documents for designs, bases and schemes.
//!
//! ```json
//! { "v": 1, "kind": "unitary_basis", "d": 2, "meta": "construction=weyl",
//!   "payload": { "elements": [ [[[1,0],[0,0]], [[0,0],[1,0]]], ... ] } }
//! ```
//!
//! Complex numbers are `[re, im]` pairs, matrices are row-major nested
//! arrays, vectors are flat arrays of pairs. Unknown fields are rejected.
//! Loading checks structure (counts, shapes, `d`) but not the defining
//! identities; [`DesignDocument::validate`] does that.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bases::{verify_depolarizer, verify_orthonormal, UnitaryBasis};
use crate::designs::{validate_hadamard, validate_latin, LatinViolation};
use crate::linalg::{check_projector_completeness, ComplexMatrix, StateVector};
use crate::schemes::{verify_scheme, MaxEntangledBasis, Mode, TightScheme};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("parse error in {location}: {message}")]
    Payload { location: String, message: String },

    #[error("unsupported schema version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),

    #[error("malformed {kind} document: {message}")]
    Shape { kind: Kind, message: String },
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        DocumentError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Latin,
    Hadamard,
    UnitaryBasis,
    EntangledBasis,
    Scheme,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Latin => "latin",
            Kind::Hadamard => "hadamard",
            Kind::UnitaryBasis => "unitary_basis",
            Kind::EntangledBasis => "entangled_basis",
            Kind::Scheme => "scheme",
        })
    }
}

/// Structurally valid document content.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Latin(Vec<Vec<usize>>),
    Hadamard(ComplexMatrix),
    UnitaryBasis(UnitaryBasis),
    EntangledBasis(MaxEntangledBasis),
    Scheme(TightScheme),
}

impl Payload {
    pub fn kind(&self) -> Kind {
        match self {
            Payload::Latin(_) => Kind::Latin,
            Payload::Hadamard(_) => Kind::Hadamard,
            Payload::UnitaryBasis(_) => Kind::UnitaryBasis,
            Payload::EntangledBasis(_) => Kind::EntangledBasis,
            Payload::Scheme(_) => Kind::Scheme,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Payload::Latin(g) => g.len(),
            Payload::Hadamard(m) => m.rows(),
            Payload::UnitaryBasis(b) => b.dim(),
            Payload::EntangledBasis(e) => e.dim(),
            Payload::Scheme(s) => s.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignDocument {
    pub meta: String,
    pub payload: Payload,
}

type WireComplex = [f64; 2];
type WireVector = Vec<WireComplex>;
type WireMatrix = Vec<Vec<WireComplex>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    v: u32,
    kind: Kind,
    d: usize,
    #[serde(default)]
    meta: String,
    payload: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatinWire {
    grid: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HadamardWire {
    matrix: WireMatrix,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisWire {
    elements: Vec<WireMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<[usize; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntangledWire {
    vectors: Vec<WireVector>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ModeWire {
    Teleportation,
    DenseCoding,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeWire {
    mode: ModeWire,
    omega: WireMatrix,
    unitaries: Vec<WireMatrix>,
    effect_vectors: Vec<WireVector>,
}

fn matrix_to_wire(m: &ComplexMatrix) -> WireMatrix {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn vector_to_wire(v: &StateVector) -> WireVector {
    v.entries().iter().map(|z| [z.re, z.im]).collect()
}

fn wire_to_matrix(w: WireMatrix) -> crate::Result<ComplexMatrix> {
    ComplexMatrix::from_rows(
        w.into_iter()
            .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect(),
    )
}

fn wire_to_vector(w: WireVector) -> crate::Result<StateVector> {
    StateVector::new(w.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
}

impl DesignDocument {
    pub fn new(payload: Payload, meta: impl Into<String>) -> Self {
        DesignDocument {
            meta: meta.into(),
            payload,
        }
    }

    pub fn kind(&self) -> Kind {
        self.payload.kind()
    }

    pub fn dim(&self) -> usize {
        self.payload.dim()
    }

    pub fn to_json(&self) -> String {
        let payload = match &self.payload {
            Payload::Latin(g) => serde_json::to_value(LatinWire { grid: g.clone() }),
            Payload::Hadamard(m) => serde_json::to_value(HadamardWire {
                matrix: matrix_to_wire(m),
            }),
            Payload::UnitaryBasis(b) => serde_json::to_value(BasisWire {
                elements: b.elements().iter().map(matrix_to_wire).collect(),
                labels: b.labels().map(|l| l.iter().map(|&(i, j)| [i, j]).collect()),
            }),
            Payload::EntangledBasis(e) => serde_json::to_value(EntangledWire {
                vectors: e.vectors().iter().map(vector_to_wire).collect(),
            }),
            Payload::Scheme(s) => serde_json::to_value(SchemeWire {
                mode: match s.mode() {
                    Mode::Teleportation => ModeWire::Teleportation,
                    Mode::DenseCoding => ModeWire::DenseCoding,
                },
                omega: matrix_to_wire(s.omega()),
                unitaries: s.channel_unitaries().iter().map(matrix_to_wire).collect(),
                effect_vectors: s.effect_vectors().iter().map(vector_to_wire).collect(),
            }),
        }
        .expect("payload wire types serialize");
        let env = Envelope {
            v: SCHEMA_VERSION,
            kind: self.kind(),
            d: self.dim(),
            meta: self.meta.clone(),
            payload,
        };
        let mut s = serde_json::to_string_pretty(&env).expect("envelope serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let env: Envelope = serde_json::from_str(text)?;
        if env.v != SCHEMA_VERSION {
            return Err(DocumentError::Version(env.v));
        }
        let kind = env.kind;
        let shape = |message: String| DocumentError::Shape { kind, message };
        let payload_err = |e: serde_json::Error| DocumentError::Payload {
            location: format!("{} payload", kind),
            message: e.to_string(),
        };
        let payload = match kind {
            Kind::Latin => {
                let w: LatinWire = serde_json::from_value(env.payload).map_err(payload_err)?;
                let d = w.grid.len();
                if d == 0 || w.grid.iter().any(|r| r.len() != d) {
                    return Err(shape("grid must be square and non-empty".into()));
                }
                Payload::Latin(w.grid)
            }
            Kind::Hadamard => {
                let w: HadamardWire = serde_json::from_value(env.payload).map_err(payload_err)?;
                let m = wire_to_matrix(w.matrix).map_err(|e| shape(e.to_string()))?;
                if !m.is_square() {
                    return Err(shape("matrix must be square".into()));
                }
                Payload::Hadamard(m)
            }
            Kind::UnitaryBasis => {
                let w: BasisWire = serde_json::from_value(env.payload).map_err(payload_err)?;
                let elements = w
                    .elements
                    .into_iter()
                    .map(wire_to_matrix)
                    .collect::<crate::Result<Vec<_>>>()
                    .map_err(|e| shape(e.to_string()))?;
                let basis = UnitaryBasis::from_raw(elements).map_err(|e| shape(e.to_string()))?;
                let basis = match w.labels {
                    None => basis,
                    Some(labels) => basis
                        .with_labels(labels.into_iter().map(|[i, j]| (i, j)).collect())
                        .map_err(|e| shape(e.to_string()))?,
                };
                Payload::UnitaryBasis(basis)
            }
            Kind::EntangledBasis => {
                let w: EntangledWire = serde_json::from_value(env.payload).map_err(payload_err)?;
                let vectors = w
                    .vectors
                    .into_iter()
                    .map(wire_to_vector)
                    .collect::<crate::Result<Vec<_>>>()
                    .map_err(|e| shape(e.to_string()))?;
                Payload::EntangledBasis(MaxEntangledBasis::from_raw(env.d, vectors).map_err(|e| shape(e.to_string()))?)
            }
            Kind::Scheme => {
                let w: SchemeWire = serde_json::from_value(env.payload).map_err(payload_err)?;
                let omega = wire_to_matrix(w.omega).map_err(|e| shape(e.to_string()))?;
                let unitaries = w
                    .unitaries
                    .into_iter()
                    .map(wire_to_matrix)
                    .collect::<crate::Result<Vec<_>>>()
                    .map_err(|e| shape(e.to_string()))?;
                let effects = w
                    .effect_vectors
                    .into_iter()
                    .map(wire_to_vector)
                    .collect::<crate::Result<Vec<_>>>()
                    .map_err(|e| shape(e.to_string()))?;
                let mode = match w.mode {
                    ModeWire::Teleportation => Mode::Teleportation,
                    ModeWire::DenseCoding => Mode::DenseCoding,
                };
                Payload::Scheme(
                    TightScheme::from_parts(omega, unitaries, effects, mode).map_err(|e| shape(e.to_string()))?,
                )
            }
        };
        if payload.dim() != env.d {
            return Err(shape(format!(
                "declared d={} but payload has dimension {}",
                env.d,
                payload.dim()
            )));
        }
        Ok(DesignDocument {
            meta: env.meta,
            payload,
        })
    }

    /// Checks the payload against the defining identities of its kind.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut lines = Vec::new();
        let mut passed = true;
        let mut max_deviation = 0.0f64;
        let mut record = |label: &str, deviation: f64, witness: Option<String>, lines: &mut Vec<String>| {
            let ok = deviation <= tol;
            passed &= ok;
            max_deviation = if deviation.is_nan() {
                f64::NAN
            } else {
                max_deviation.max(deviation)
            };
            let mut line = format!(
                "{:<28} {} (deviation {:.3e})",
                label,
                if ok { "pass" } else { "FAIL" },
                deviation
            );
            if let (false, Some(w)) = (ok, witness) {
                line.push_str(&format!(", worst at {}", w));
            }
            lines.push(line);
        };
        match &self.payload {
            Payload::Latin(grid) => match validate_latin(grid) {
                Ok(Ok(())) => record("latin property", 0.0, None, &mut lines),
                Ok(Err(v)) => {
                    let w = match v {
                        LatinViolation::Row { index } => format!("row {}", index),
                        LatinViolation::Column { index } => format!("column {}", index),
                    };
                    record("latin property", f64::INFINITY, Some(w), &mut lines)
                }
                Err(e) => record("latin property", f64::INFINITY, Some(e.to_string()), &mut lines),
            },
            Payload::Hadamard(m) => {
                let chk = validate_hadamard(m, tol);
                record("hadamard property", chk.deviation, None, &mut lines);
            }
            Payload::UnitaryBasis(b) => {
                let r = verify_orthonormal(b, tol);
                let n = b.len();
                let mut worst = (0.0, 0, 0);
                for x in 0..n {
                    for y in 0..n {
                        let expected = if x == y { 1.0 } else { 0.0 };
                        let dev = (r.gram[(x, y)] - expected).norm();
                        if dev > worst.0 {
                            worst = (dev, x, y);
                        }
                    }
                }
                record(
                    "orthonormality",
                    r.max_deviation,
                    Some(format!("x={}, y={}", worst.1, worst.2)),
                    &mut lines,
                );
                let (ux, ud) = b
                    .elements()
                    .iter()
                    .map(ComplexMatrix::unitarity_deviation)
                    .enumerate()
                    .fold((0, 0.0), |acc, (x, dv)| if dv > acc.1 { (x, dv) } else { acc });
                record("unitarity", ud, Some(format!("x={}", ux)), &mut lines);
                match verify_depolarizer(b, &[], tol) {
                    Ok(dep) => record(
                        "depolarizer",
                        dep.max_deviation,
                        Some(format!("matrix unit #{}", dep.worst_probe)),
                        &mut lines,
                    ),
                    Err(e) => record("depolarizer", f64::INFINITY, Some(e.to_string()), &mut lines),
                }
            }
            Payload::EntangledBasis(e) => {
                let r = e.verify(tol);
                record("orthonormality", r.orthonormality_deviation, None, &mut lines);
                record(
                    "maximal entanglement",
                    r.entanglement_deviation,
                    Some(format!("vector {}", r.worst_vector)),
                    &mut lines,
                );
                let completeness = check_projector_completeness(e.vectors(), tol)
                    .map(|c| c.deviation)
                    .unwrap_or(f64::INFINITY);
                record("projector completeness", completeness, None, &mut lines);
            }
            Payload::Scheme(s) => {
                let inv = s.invariants();
                record("resource max. entangled", inv.resource_entanglement, None, &mut lines);
                record("effect completeness", inv.effect_completeness, None, &mut lines);
                record("channel unitarity", inv.unitarity, None, &mut lines);
                let v = verify_scheme(s, tol);
                record(
                    &format!("{} identity", s.mode()),
                    v.max_deviation,
                    Some(v.worst_case),
                    &mut lines,
                );
            }
        }
        ValidationReport {
            passed,
            max_deviation,
            lines,
        }
    }
}

/// Human-readable result of [`DesignDocument::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub passed: bool,
    pub max_deviation: f64,
    pub lines: Vec<String>,
}
