use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Circuit, Gate};
use crate::{Error, Result};

/// Which physical qubit pairs can host a two-qubit gate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Connectivity {
    AllToAll,
    /// The squarest grid holding the circuit, chosen per circuit by
    /// [`grid_for`].
    AutoGrid,
    /// Row-major numbering: wire `r * cols + c`.
    Grid { rows: usize, cols: usize },
    /// Explicit coupling graph; the register size is one past the largest
    /// wire mentioned.
    CouplingList { edges: Vec<(usize, usize)> },
}

impl Default for Connectivity {
    fn default() -> Self {
        Connectivity::AllToAll
    }
}

/// The squarest grid holding `n` qubits.
pub fn grid_for(n: usize) -> Connectivity {
    let n = n.max(1);
    let mut rows = (n as f64).sqrt() as usize;
    while rows * rows < n {
        rows += 1;
    }
    while rows > 1 && (rows - 1) * (rows - 1) >= n {
        rows -= 1;
    }
    Connectivity::Grid {
        rows,
        cols: n.div_ceil(rows),
    }
}

impl Connectivity {
    /// Replaces [`Connectivity::AutoGrid`] by the concrete grid for `logical`
    /// qubits.
    pub fn resolve(&self, logical: usize) -> Connectivity {
        match self {
            Connectivity::AutoGrid => grid_for(logical),
            other => other.clone(),
        }
    }

    /// Physical register size needed to run `logical` qubits.
    pub fn physical_qubits(&self, logical: usize) -> usize {
        match self {
            Connectivity::AllToAll => logical,
            Connectivity::AutoGrid => grid_for(logical).physical_qubits(logical),
            Connectivity::Grid { rows, cols } => rows * cols,
            Connectivity::CouplingList { edges } => {
                edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0)
            }
        }
    }

    fn coupling_edges(&self, size: usize) -> Vec<(usize, usize)> {
        match self {
            Connectivity::AutoGrid => grid_for(size).coupling_edges(size),
            Connectivity::AllToAll => (0..size)
                .flat_map(|i| (i + 1..size).map(move |j| (i, j)))
                .collect(),
            Connectivity::Grid { rows, cols } => {
                let mut e = Vec::new();
                for r in 0..*rows {
                    for c in 0..*cols {
                        let w = r * cols + c;
                        if c + 1 < *cols {
                            e.push((w, w + 1));
                        }
                        if r + 1 < *rows {
                            e.push((w, w + cols));
                        }
                    }
                }
                e
            }
            Connectivity::CouplingList { edges } => edges.clone(),
        }
    }

    /// Adjacency lists over `size` wires, sorted.
    fn neighbours(&self, size: usize) -> Vec<Vec<usize>> {
        let mut adj = vec![BTreeSet::new(); size];
        for (a, b) in self.coupling_edges(size) {
            if a != b && a < size && b < size {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Whether wires `a` and `b` are coupled. [`Connectivity::AutoGrid`] must
    /// be resolved first; unresolved it answers as all-to-all.
    pub fn is_coupled(&self, a: usize, b: usize) -> bool {
        match self {
            Connectivity::AllToAll | Connectivity::AutoGrid => a != b,
            Connectivity::Grid { cols, .. } => {
                let (ra, ca, rb, cb) = (a / cols, a % cols, b / cols, b % cols);
                ra.abs_diff(rb) + ca.abs_diff(cb) == 1
            }
            Connectivity::CouplingList { edges } => edges
                .iter()
                .any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b)),
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Connectivity::AllToAll => write!(f, "all_to_all"),
            Connectivity::AutoGrid => write!(f, "grid"),
            Connectivity::Grid { rows, cols } => write!(f, "grid({rows}x{cols})"),
            Connectivity::CouplingList { edges } => {
                let list: Vec<String> = edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                write!(f, "coupling({})", list.join(";"))
            }
        }
    }
}

impl FromStr for Connectivity {
    type Err = Error;

    /// `all_to_all`, `grid` (sized per instance, see [`grid_for`]),
    /// `grid(RxC)`, `line(N)` or `coupling(a-b;c-d;...)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let arg = |prefix: &str| {
            s.strip_prefix(prefix)
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
                .map(str::to_string)
        };
        let bad = || Error::Parameter(format!("bad connectivity '{s}'"));
        if s == "all_to_all" || s == "all-to-all" || s == "full" {
            return Ok(Connectivity::AllToAll);
        }
        if s == "grid" {
            return Ok(Connectivity::AutoGrid);
        }
        if let Some(a) = arg("grid") {
            let (r, c) = a.split_once('x').ok_or_else(bad)?;
            return Ok(Connectivity::Grid {
                rows: r.trim().parse().map_err(|_| bad())?,
                cols: c.trim().parse().map_err(|_| bad())?,
            });
        }
        if let Some(a) = arg("line") {
            let len: usize = a.trim().parse().map_err(|_| bad())?;
            return Ok(Connectivity::CouplingList {
                edges: (1..len).map(|i| (i - 1, i)).collect(),
            });
        }
        if let Some(a) = arg("coupling") {
            let edges = a
                .split(';')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    let (x, y) = p.split_once('-').ok_or_else(bad)?;
                    Ok((
                        x.trim().parse().map_err(|_| bad())?,
                        y.trim().parse().map_err(|_| bad())?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(Connectivity::CouplingList { edges });
        }
        Err(bad())
    }
}

impl TryFrom<String> for Connectivity {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Connectivity> for String {
    fn from(c: Connectivity) -> String {
        c.to_string()
    }
}

fn all_pairs_distances(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    (0..n)
        .map(|s| {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            dist
        })
        .collect()
}

/// Inserts SWAPs so every two-qubit gate acts on a coupled pair.
///
/// Greedy: while the operands of the current gate are apart, swap one of
/// them one step along a shortest path towards the other. Among the
/// candidate swaps, pick the one leaving the next two-qubit gate closest
/// (one gate of lookahead); ties go to the lexicographically smallest pair.
/// The initial layout is the identity and the resulting wire permutation is
/// recorded in the output circuit.
pub fn route(c: &Circuit, conn: &Connectivity) -> Result<Circuit> {
    if matches!(conn, Connectivity::AllToAll) {
        return Ok(c.clone());
    }
    let conn = &conn.resolve(c.num_qubits());
    let size = conn.physical_qubits(c.num_qubits());
    if size < c.num_qubits() {
        return Err(Error::Routing(format!(
            "connectivity {conn} has {size} wires, circuit needs {}",
            c.num_qubits()
        )));
    }
    let adj = conn.neighbours(size);
    let dist = all_pairs_distances(&adj);
    if dist.iter().flatten().any(|&d| d == usize::MAX) {
        return Err(Error::Routing(format!(
            "coupling graph of {conn} is disconnected"
        )));
    }

    // wire_of[q]: wire currently holding the qubit that started on wire q
    let mut wire_of: Vec<usize> = (0..size).collect();
    let mut qubit_on: Vec<usize> = (0..size).collect();
    let mut out = Vec::with_capacity(c.ops().len() * 2);

    let two_qubit: Vec<(usize, usize, usize)> = c
        .ops()
        .iter()
        .enumerate()
        .filter_map(|(i, g)| match *g {
            Gate::Cnot(a, b) | Gate::Swap(a, b) => Some((i, a, b)),
            _ => None,
        })
        .collect();
    let mut next_2q = 0;

    for (idx, gate) in c.ops().iter().enumerate() {
        match *gate {
            Gate::H(q) => out.push(Gate::H(wire_of[q])),
            Gate::Rx(q, t) => out.push(Gate::Rx(wire_of[q], t)),
            Gate::Rz(q, t) => out.push(Gate::Rz(wire_of[q], t)),
            Gate::Cnot(a, b) | Gate::Swap(a, b) => {
                debug_assert_eq!(two_qubit[next_2q].0, idx);
                next_2q += 1;
                let lookahead = two_qubit.get(next_2q).map(|&(_, x, y)| (x, y));
                loop {
                    let (wa, wb) = (wire_of[a], wire_of[b]);
                    let d = dist[wa][wb];
                    if d <= 1 {
                        break;
                    }
                    let candidates = adj[wa]
                        .iter()
                        .filter(|&&x| dist[x][wb] < d)
                        .map(|&x| (wa.min(x), wa.max(x)))
                        .chain(
                            adj[wb]
                                .iter()
                                .filter(|&&y| dist[y][wa] < d)
                                .map(|&y| (wb.min(y), wb.max(y))),
                        );
                    let score = |&(s, t): &(usize, usize)| {
                        let Some((x, y)) = lookahead else { return 0 };
                        let moved = |w: usize| {
                            if w == s {
                                t
                            } else if w == t {
                                s
                            } else {
                                w
                            }
                        };
                        dist[moved(wire_of[x])][moved(wire_of[y])]
                    };
                    let (s, t) = candidates
                        .min_by_key(|p| (score(p), *p))
                        .expect("a shortest-path neighbour exists in a connected graph");
                    out.push(Gate::Swap(s, t));
                    let (qs, qt) = (qubit_on[s], qubit_on[t]);
                    qubit_on.swap(s, t);
                    wire_of[qs] = t;
                    wire_of[qt] = s;
                }
                let (wa, wb) = (wire_of[a], wire_of[b]);
                out.push(match gate {
                    Gate::Cnot(..) => Gate::Cnot(wa, wb),
                    _ => Gate::Swap(wa, wb),
                });
            }
        }
    }

    // compose with any permutation the input already carried
    let input_perm = c.final_permutation();
    let final_permutation: Vec<usize> = (0..size)
        .map(|q| {
            let w = if q < input_perm.len() { input_perm[q] } else { q };
            wire_of[w]
        })
        .collect();
    let mut routed = Circuit::from_parts(size, out, final_permutation)?;
    routed.metadata = c.metadata.clone();
    Ok(routed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shapes() {
        assert_eq!(grid_for(9), Connectivity::Grid { rows: 3, cols: 3 });
        assert_eq!(grid_for(11), Connectivity::Grid { rows: 4, cols: 3 });
        assert_eq!(grid_for(1), Connectivity::Grid { rows: 1, cols: 1 });
        assert_eq!(grid_for(16), Connectivity::Grid { rows: 4, cols: 4 });
        assert_eq!(grid_for(5), Connectivity::Grid { rows: 3, cols: 2 });
        for n in 1..200 {
            assert!(grid_for(n).physical_qubits(n) >= n);
        }
    }

    #[test]
    fn all_to_all_is_identity() {
        let mut c = Circuit::new(4);
        c.push(Gate::Cnot(0, 3)).unwrap();
        c.push(Gate::Rz(2, 0.4)).unwrap();
        assert_eq!(route(&c, &Connectivity::AllToAll).unwrap(), c);
    }

    #[test]
    fn line_needs_one_swap() {
        let mut c = Circuit::new(3);
        c.push(Gate::Cnot(0, 2)).unwrap();
        let line = "line(3)".parse::<Connectivity>().unwrap();
        let r = route(&c, &line).unwrap();
        assert_eq!(r.count("SWAP"), 1);
        assert_eq!(r.count("CNOT"), 1);
        for g in r.ops() {
            let (q, k) = g.qubits();
            if k == 2 {
                assert!(line.is_coupled(q[0], q[1]));
            }
        }
        assert!(!r.is_identity_layout());
    }

    #[test]
    fn disconnected_coupling_is_error() {
        let mut c = Circuit::new(4);
        c.push(Gate::Cnot(0, 3)).unwrap();
        let conn = "coupling(0-1;2-3)".parse::<Connectivity>().unwrap();
        assert!(matches!(route(&c, &conn), Err(Error::Routing(_))));
        let small = Connectivity::Grid { rows: 1, cols: 2 };
        assert!(route(&c, &small).is_err());
    }

    #[test]
    fn parse_and_display() {
        for s in ["all_to_all", "grid", "grid(3x4)", "coupling(0-1;1-2)"] {
            let c: Connectivity = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert!("ring(4)".parse::<Connectivity>().is_err());
    }
}
