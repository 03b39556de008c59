//! Subprocess protocol for external backends.
//!
//! Each execution spawns the configured command, writes one request
//! document to its standard input and closes it, then reads one response
//! document from its standard output. Both documents are JSON objects:
//!
//! ```text
//! request:  {"version":1,"shots":2048,"seed":17,"circuit":{...}}
//! response: {"version":1,"counts":{"0110":1024,"1001":1024},"total":2048}
//! ```
//!
//! `circuit` is the circuit document of [`Circuit::to_json`]. Bitstrings
//! list qubit 0 first and must cover the whole register.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use thiserror::Error;
use wait_timeout::ChildExt;

use crate::backend::Backend;
use crate::circuit::Circuit;
use crate::sim::ShotCounts;
use crate::{Error, Result};

pub const PROTOCOL_VERSION: u32 = 1;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(600);

#[derive(Debug, Error)]
pub enum PluginFault {
    #[error("cannot start plugin '{command}': {reason}")]
    Spawn { command: String, reason: String },
    #[error("plugin exited with {status}; stderr: {stderr}")]
    Exit { status: String, stderr: String },
    #[error("plugin timed out after {0:?}")]
    Timeout(Duration),
    #[error("malformed plugin response: {0}")]
    Malformed(String),
    #[error("plugin counts sum to {sum} but total says {total} and {requested} shots were requested")]
    CountMismatch { sum: u64, total: u64, requested: u64 },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Request {
    pub version: u32,
    pub shots: u64,
    pub seed: u64,
    pub circuit: Box<RawValue>,
}

impl Request {
    pub fn new(circuit: &Circuit, shots: u64, seed: u64) -> Request {
        Request {
            version: PROTOCOL_VERSION,
            shots,
            seed,
            circuit: RawValue::from_string(circuit.to_json()).expect("circuit document is valid JSON"),
        }
    }

    pub fn circuit(&self) -> Result<Circuit> {
        Circuit::from_json(self.circuit.get())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub version: u32,
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl Response {
    pub fn from_counts(counts: &ShotCounts) -> Response {
        Response {
            version: PROTOCOL_VERSION,
            counts: counts.to_string_map(),
            total: counts.total(),
        }
    }

    /// Checks the response against the request it answers.
    pub fn into_counts(self, num_qubits: usize, shots: u64) -> Result<ShotCounts> {
        if self.version != PROTOCOL_VERSION {
            return Err(PluginFault::Malformed(format!("unsupported version {}", self.version)).into());
        }
        let sum: u64 = self.counts.values().sum();
        if sum != self.total || sum != shots {
            return Err(PluginFault::CountMismatch {
                sum,
                total: self.total,
                requested: shots,
            }
            .into());
        }
        ShotCounts::from_string_map(num_qubits, &self.counts)
            .map_err(|e| PluginFault::Malformed(e.to_string()).into())
    }
}

/// A backend living in another process.
#[derive(Debug, Clone)]
pub struct ExternalBackend {
    argv: Vec<String>,
    timeout: Duration,
}

impl ExternalBackend {
    /// `command` is split with shell quoting rules.
    pub fn new(command: &str, timeout: Duration) -> Result<ExternalBackend> {
        let argv = shlex::split(command)
            .filter(|a| !a.is_empty())
            .ok_or_else(|| Error::Parameter(format!("cannot parse plugin command '{command}'")))?;
        if timeout.is_zero() {
            return Err(Error::Parameter("plugin timeout must be positive".into()));
        }
        Ok(ExternalBackend { argv, timeout })
    }

    pub fn command(&self) -> String {
        shlex::try_join(self.argv.iter().map(String::as_str)).unwrap_or_else(|_| self.argv.join(" "))
    }

    fn exchange(&self, request: &[u8]) -> Result<Vec<u8>> {
        let mut child = Command::new(&self.argv[0])
            .args(&self.argv[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| PluginFault::Spawn {
                command: self.command(),
                reason: e.to_string(),
            })?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let mut stdout = child.stdout.take().expect("piped stdout");
        let mut stderr = child.stderr.take().expect("piped stderr");
        let out = std::thread::spawn(move || {
            let mut buf = Vec::new();
            stdout.read_to_end(&mut buf).map(|_| buf)
        });
        let err = std::thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = stderr.read_to_end(&mut buf);
            buf
        });
        // a plugin that exits without reading its input closes the pipe early
        let _ = stdin.write_all(request);
        drop(stdin);

        let status = match child.wait_timeout(self.timeout)? {
            Some(s) => s,
            None => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(PluginFault::Timeout(self.timeout).into());
            }
        };
        let stdout = out.join().expect("reader thread")?;
        let stderr = err.join().expect("reader thread");
        if !status.success() {
            return Err(PluginFault::Exit {
                status: status.to_string(),
                stderr: String::from_utf8_lossy(&stderr).trim().to_string(),
            }
            .into());
        }
        Ok(stdout)
    }
}

impl Backend for ExternalBackend {
    fn execute(&self, circuit: &Circuit, shots: u64, seed: u64) -> Result<ShotCounts> {
        let request = serde_json::to_vec(&Request::new(circuit, shots, seed))
            .expect("request serializes");
        let raw = self.exchange(&request)?;
        let response: Response = serde_json::from_slice(&raw)
            .map_err(|e| PluginFault::Malformed(e.to_string()))?;
        response.into_counts(circuit.num_qubits(), shots)
    }

    fn describe(&self) -> String {
        format!("external({})", self.command())
    }
}

/// Answers one request from `input` on `output` with `backend`.
pub fn serve(backend: &dyn Backend, input: &mut dyn Read, output: &mut dyn Write) -> Result<()> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let request: Request =
        serde_json::from_str(&text).map_err(|e| PluginFault::Malformed(e.to_string()))?;
    if request.version != PROTOCOL_VERSION {
        return Err(PluginFault::Malformed(format!("unsupported version {}", request.version)).into());
    }
    let circuit = request.circuit()?;
    let counts = backend.execute(&circuit, request.shots, request.seed)?;
    serde_json::to_writer(&mut *output, &Response::from_counts(&counts))
        .map_err(|e| Error::Io(e.into()))?;
    output.write_all(b"\n")?;
    output.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::PerfectBackend;
    use crate::circuit::Gate;

    fn bell() -> Circuit {
        let mut c = Circuit::new(2);
        c.push(Gate::H(0)).unwrap();
        c.push(Gate::Cnot(0, 1)).unwrap();
        c
    }

    #[test]
    fn request_embeds_the_circuit_document() {
        let r = Request::new(&bell(), 10, 3);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(
            text,
            r#"{"version":1,"shots":10,"seed":3,"circuit":{"num_qubits":2,"ops":[{"kind":"H","qubits":[0]},{"kind":"CNOT","qubits":[0,1]}],"final_permutation":[0,1]}}"#
        );
        let back: Request = serde_json::from_str(&text).unwrap();
        assert_eq!(back.circuit().unwrap(), bell());
    }

    #[test]
    fn serve_round_trip_matches_in_process() {
        let r = serde_json::to_vec(&Request::new(&bell(), 500, 9)).unwrap();
        let mut out = Vec::new();
        serve(&PerfectBackend::default(), &mut r.as_slice(), &mut out).unwrap();
        let resp: Response = serde_json::from_slice(&out).unwrap();
        let counts = resp.into_counts(2, 500).unwrap();
        let direct = PerfectBackend::default().execute(&bell(), 500, 9).unwrap();
        assert_eq!(counts, direct);
    }

    #[test]
    fn response_validation() {
        let mut counts = BTreeMap::new();
        counts.insert("00".to_string(), 4);
        let ok = Response { version: 1, counts: counts.clone(), total: 4 };
        assert_eq!(ok.clone().into_counts(2, 4).unwrap().get(0), 4);
        assert!(matches!(
            ok.clone().into_counts(2, 5),
            Err(Error::Protocol(PluginFault::CountMismatch { sum: 4, .. }))
        ));
        assert!(matches!(ok.into_counts(3, 4), Err(Error::Protocol(PluginFault::Malformed(_)))));
        let v2 = Response { version: 2, counts, total: 4 };
        assert!(matches!(v2.into_counts(2, 4), Err(Error::Protocol(PluginFault::Malformed(_)))));
    }

    #[test]
    fn command_parsing() {
        assert!(ExternalBackend::new("", DEFAULT_TIMEOUT).is_err());
        assert!(ExternalBackend::new("a 'b", DEFAULT_TIMEOUT).is_err());
        let b = ExternalBackend::new("run 'a b' c", DEFAULT_TIMEOUT).unwrap();
        assert_eq!(b.argv, ["run", "a b", "c"]);
    }
}
