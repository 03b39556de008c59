//! JSON form of a circuit, as exchanged with external backends.
//!
//! ```json
//! {"num_qubits":2,
//!  "ops":[{"kind":"H","qubits":[0]},
//!         {"kind":"RZ","qubits":[1],"angle":7.8539816339744828e-1},
//!         {"kind":"CNOT","qubits":[0,1]}],
//!  "final_permutation":[0,1]}
//! ```
//!
//! `kind` is one of `H`, `RX`, `RZ`, `CNOT`, `SWAP`; CNOT lists control then
//! target. Angles are radians written with 17 significant digits so they
//! round-trip exactly.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use super::{Circuit, Gate};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitDocument {
    pub num_qubits: usize,
    pub ops: Vec<OpRecord>,
    pub final_permutation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpRecord {
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "write_angle",
        deserialize_with = "read_angle"
    )]
    pub angle: Option<f64>,
}

fn write_angle<S: Serializer>(angle: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match angle {
        Some(a) => {
            let raw = RawValue::from_string(format!("{a:.16e}")).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        }
        None => s.serialize_none(),
    }
}

fn read_angle<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    Option::<f64>::deserialize(d)
}

impl From<&Circuit> for CircuitDocument {
    fn from(c: &Circuit) -> Self {
        let ops = c
            .ops()
            .iter()
            .map(|g| {
                let (qs, k) = g.qubits();
                OpRecord {
                    kind: g.name().to_string(),
                    qubits: qs[..k].to_vec(),
                    angle: g.angle(),
                }
            })
            .collect();
        CircuitDocument {
            num_qubits: c.num_qubits(),
            ops,
            final_permutation: c.final_permutation().to_vec(),
        }
    }
}

impl TryFrom<&CircuitDocument> for Circuit {
    type Error = Error;

    fn try_from(doc: &CircuitDocument) -> Result<Circuit> {
        let ops = doc
            .ops
            .iter()
            .map(|op| {
                let angle = || {
                    op.angle
                        .ok_or_else(|| Error::Format(format!("{} needs an angle", op.kind)))
                };
                let gate = match (op.kind.as_str(), op.qubits.as_slice()) {
                    ("H", &[q]) => Gate::H(q),
                    ("RX", &[q]) => Gate::Rx(q, angle()?),
                    ("RZ", &[q]) => Gate::Rz(q, angle()?),
                    ("CNOT", &[a, b]) => Gate::Cnot(a, b),
                    ("SWAP", &[a, b]) => Gate::Swap(a, b),
                    (kind, qs) => {
                        return Err(Error::Format(format!(
                            "unsupported operation {kind} on {qs:?}"
                        )))
                    }
                };
                if gate.angle().is_none() && op.angle.is_some() {
                    return Err(Error::Format(format!("{} takes no angle", op.kind)));
                }
                Ok(gate)
            })
            .collect::<Result<Vec<_>>>()?;
        Circuit::from_parts(doc.num_qubits, ops, doc.final_permutation.clone())
    }
}

impl Circuit {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&CircuitDocument::from(self)).expect("circuit document serializes")
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let doc: CircuitDocument =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Circuit::try_from(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_qaoa_circuit, route, Connectivity, QaoaParams};
    use crate::graphs::generate_erdos_renyi;
    use proptest::prelude::*;

    #[test]
    fn pinned_bytes() {
        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Rz(1, std::f64::consts::FRAC_PI_4)).unwrap();
        c.push(Gate::Cnot(0, 1)).unwrap();
        assert_eq!(
            c.to_json(),
            r#"{"num_qubits":2,"ops":[{"kind":"H","qubits":[0]},{"kind":"RZ","qubits":[1],"angle":7.8539816339744828e-1},{"kind":"CNOT","qubits":[0,1]}],"final_permutation":[0,1]}"#
        );
    }

    #[test]
    fn malformed_documents() {
        assert!(Circuit::from_json(r#"{"num_qubits":1,"ops":[{"kind":"RX","qubits":[0]}],"final_permutation":[0]}"#).is_err());
        assert!(Circuit::from_json(r#"{"num_qubits":1,"ops":[{"kind":"T","qubits":[0]}],"final_permutation":[0]}"#).is_err());
        assert!(Circuit::from_json(r#"{"num_qubits":2,"ops":[{"kind":"CNOT","qubits":[0,2]}],"final_permutation":[0,1]}"#).is_err());
        assert!(Circuit::from_json(r#"{"num_qubits":1,"ops":[{"kind":"H","qubits":[0],"angle":1.0}],"final_permutation":[0]}"#).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(seed in 0u64..500, g1 in -10.0f64..10.0, b1 in -10.0f64..10.0) {
            let g = generate_erdos_renyi(6, 0.5, seed).unwrap();
            let c = build_qaoa_circuit(&g, &QaoaParams::new(vec![g1], vec![b1]).unwrap());
            let c = route(&c, &Connectivity::AutoGrid).unwrap();
            let back = Circuit::from_json(&c.to_json()).unwrap();
            prop_assert_eq!(back.ops(), c.ops());
            prop_assert_eq!(back.final_permutation(), c.final_permutation());
        }
    }
}
