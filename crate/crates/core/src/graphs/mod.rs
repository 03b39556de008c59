//! MaxCut instances: random graph families, exact solving and the scaling
//! constants that normalize the benchmark score.

mod maxcut;
mod scaling;

pub use maxcut::{
    cut_value, cut_value_bits, maxcut_exact, maxcut_exact_limited, MaxCut, DEFAULT_ENUMERATION_LIMIT,
};
pub use scaling::{
    analytic_lambda, expected_max_cut, fit_lambda, fit_scaling, MeanEstimate, ScalingFit,
    LAMBDA_HALF, P_STAR,
};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{self, Purpose};
use crate::{Error, Result};

/// Restarts allowed before the pairing model gives up.
pub const K_REGULAR_RETRY_CAP: usize = 1000;

/// Where a graph came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GraphFamily {
    /// G(n, q): every vertex pair present independently with probability `q`.
    ErdosRenyi { q: f64 },
    /// Uniform-ish random simple `k`-regular graphs.
    KRegular { k: usize },
    Explicit,
}

impl Default for GraphFamily {
    fn default() -> Self {
        GraphFamily::ErdosRenyi { q: 0.5 }
    }
}

impl GraphFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphFamily::ErdosRenyi { q } if !(0.0..=1.0).contains(&q) || q.is_nan() => Err(
                Error::Parameter(format!("edge probability {q} outside [0, 1]")),
            ),
            GraphFamily::KRegular { k: 0 } => {
                Err(Error::Parameter("regular degree must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Expected cut of a uniformly random assignment, to leading order.
    ///
    /// For G(n, q) this is `q n^2 / 4`, i.e. the leading term only; the exact
    /// random-sampling mean is `q n (n - 1) / 4`.
    pub fn baseline(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            GraphFamily::ErdosRenyi { q } => q * n * n / 4.0,
            GraphFamily::KRegular { k } => n * k as f64 / 4.0,
            GraphFamily::Explicit => f64::NAN,
        }
    }

    /// Growth exponent of the optimal-minus-random cut.
    pub fn exponent(&self) -> f64 {
        match self {
            GraphFamily::ErdosRenyi { .. } => 1.5,
            GraphFamily::KRegular { .. } => 1.0,
            GraphFamily::Explicit => f64::NAN,
        }
    }

    /// Sizes for which the family admits graphs.
    pub fn admits(&self, n: usize) -> bool {
        match *self {
            GraphFamily::KRegular { k } => n > k && (n * k) % 2 == 0,
            _ => n >= 1,
        }
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<Graph> {
        match *self {
            GraphFamily::ErdosRenyi { q } => generate_erdos_renyi(n, q, seed),
            GraphFamily::KRegular { k } => generate_k_regular(n, k, seed),
            GraphFamily::Explicit => Err(Error::Parameter(
                "explicit graphs cannot be generated".into(),
            )),
        }
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::ErdosRenyi { q } => write!(f, "erdos_renyi({q})"),
            GraphFamily::KRegular { k } => write!(f, "k_regular({k})"),
            GraphFamily::Explicit => write!(f, "explicit"),
        }
    }
}

impl FromStr for GraphFamily {
    type Err = Error;

    /// Accepts `erdos_renyi(q)`, `er(q)`, `er:q`, `k_regular(k)`, `kreg(k)`,
    /// `kreg:k` and `explicit`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "explicit" {
            return Ok(GraphFamily::Explicit);
        }
        let (name, arg) = if let Some((name, rest)) = s.split_once('(') {
            let arg = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parameter(format!("unbalanced family spec '{s}'")))?;
            (name.to_string(), arg.to_string())
        } else if let Some((name, arg)) = s.split_once(':') {
            (name.to_string(), arg.to_string())
        } else {
            return Err(Error::Parameter(format!("unknown graph family '{s}'")));
        };
        let bad = |_| Error::Parameter(format!("bad family argument in '{s}'"));
        let family = match name.as_str() {
            "erdos_renyi" | "er" | "gnp" => GraphFamily::ErdosRenyi {
                q: arg.trim().parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
            },
            "k_regular" | "kreg" | "regular" => GraphFamily::KRegular {
                k: arg.trim().parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            },
            _ => return Err(Error::Parameter(format!("unknown graph family '{s}'"))),
        };
        family.validate()?;
        Ok(family)
    }
}

impl TryFrom<String> for GraphFamily {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GraphFamily> for String {
    fn from(f: GraphFamily) -> String {
        f.to_string()
    }
}

/// An undirected simple graph on vertices `0..n`.
///
/// Edges are stored as `(i, j)` with `i < j`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    pub family: GraphFamily,
    pub seed: u64,
}

impl Graph {
    /// Builds an explicit graph, normalizing edge orientation and order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("graph needs at least one vertex".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Parameter(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::Parameter(format!("self-loop on vertex {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::Parameter(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Graph {
            n,
            edges: set.into_iter().collect(),
            family: GraphFamily::Explicit,
            seed: 0,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Neighbourhood bitmasks; only valid for `n <= 64`.
    pub(crate) fn adjacency_masks(&self) -> Vec<u64> {
        debug_assert!(self.n <= 64);
        let mut adj = vec![0u64; self.n];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    /// Text form: `n m` on the first line, then one `i j` line per edge.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty graph file".into()))?;
        let nums = parse_pair(header)?;
        let (n, m) = nums;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            edges.push(parse_pair(line)?);
        }
        if edges.len() != m {
            return Err(Error::Format(format!(
                "header announces {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::new(n, edges)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(Error::Format(format!("expected two integers, got '{line}'"))),
    }
}

/// Seed of instance `index` at size `n` in a batch keyed by `master`.
///
/// Every consumer of graph batches (fits, benchmark sizes, backends under
/// comparison) goes through this so equal master seeds mean equal graphs.
pub fn instance_seed(master: u64, n: usize, index: usize) -> u64 {
    rng::derive_seed(master, &[Purpose::Instance as u64, n as u64, index as u64])
}

pub fn generate_erdos_renyi(n: usize, q: f64, seed: u64) -> Result<Graph> {
    let family = GraphFamily::ErdosRenyi { q };
    family.validate()?;
    if n == 0 {
        return Err(Error::Parameter("graph needs at least one vertex".into()));
    }
    let mut rng = rng::stream(seed, Purpose::Graph, 0);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < q {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph {
        n,
        edges,
        family,
        seed,
    })
}

/// Random `k`-regular simple graph by the pairing model, restarting from
/// scratch whenever a pairing produces a self-loop or a multi-edge.
pub fn generate_k_regular(n: usize, k: usize, seed: u64) -> Result<Graph> {
    let family = GraphFamily::KRegular { k };
    family.validate()?;
    if n <= k {
        return Err(Error::Parameter(format!(
            "k-regular graph needs n > k (n = {n}, k = {k})"
        )));
    }
    if (n * k) % 2 != 0 {
        return Err(Error::Parameter(format!(
            "n * k must be even (n = {n}, k = {k})"
        )));
    }
    let mut rng = rng::stream(seed, Purpose::Graph, 0);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(k)).collect();
    'attempt: for _ in 0..K_REGULAR_RETRY_CAP {
        stubs.shuffle(&mut rng);
        let mut set = BTreeSet::new();
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || !set.insert((a, b)) {
                continue 'attempt;
            }
        }
        return Ok(Graph {
            n,
            edges: set.into_iter().collect(),
            family,
            seed,
        });
    }
    Err(Error::Generation(format!(
        "no simple {k}-regular pairing on {n} vertices after {K_REGULAR_RETRY_CAP} attempts"
    )))
}
