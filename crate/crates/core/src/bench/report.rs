use serde::{Deserialize, Serialize};

use super::{BenchmarkConfig, NuFit};
use crate::circuit::QaoaParams;
use crate::optim::OptimizationTrace;

/// Outcome of one graph at one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub graph_seed: u64,
    pub num_edges: usize,
    pub params: QaoaParams,
    /// Energy and mean cut of the final evaluation at `params`.
    pub energy: f64,
    pub mean_cut: f64,
    pub beta: f64,
    pub evaluations: usize,
    pub error: Option<String>,
    #[serde(skip)]
    pub trace: Option<OptimizationTrace>,
}

impl InstanceRecord {
    pub(crate) fn failed(index: usize, graph_seed: u64, error: String) -> Self {
        InstanceRecord {
            index,
            graph_seed,
            num_edges: 0,
            params: QaoaParams::zeros(0),
            energy: f64::NAN,
            mean_cut: f64::NAN,
            beta: f64::NAN,
            evaluations: 0,
            error: Some(error),
            trace: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeScore {
    pub n: usize,
    pub mean_cut: f64,
    pub beta: f64,
    /// Standard error of the mean of the per-graph scores.
    pub stderr_beta: f64,
    pub pass: bool,
    pub timed_out: bool,
    pub wall_time_s: f64,
    pub instances: Vec<InstanceRecord>,
}

impl SizeScore {
    pub fn successful(&self) -> impl Iterator<Item = &InstanceRecord> {
        self.instances.iter().filter(|r| r.error.is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub backend: String,
    pub lambda: f64,
    /// Every evaluated size, ascending.
    pub scores: Vec<SizeScore>,
    pub q_score: Option<usize>,
    pub non_monotone: bool,
    pub nu_fit: Option<NuFit>,
}

impl BenchmarkReport {
    pub const CSV_HEADER: &'static str =
        "n,mean_cut,beta,stderr,pass,wall_time_s,graphs,shots,depth,family,lambda";

    pub fn score(&self, n: usize) -> Option<&SizeScore> {
        self.scores.iter().find(|s| s.n == n)
    }

    pub fn to_csv(&self) -> String {
        self.csv_with(true)
    }

    /// The report without the timing column, for run-to-run comparison.
    pub fn to_csv_untimed(&self) -> String {
        self.csv_with(false)
    }

    fn csv_with(&self, timed: bool) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        let family = self.config.family.to_string();
        for s in &self.scores {
            let time = if timed { format!("{:.3}", s.wall_time_s) } else { String::new() };
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{},{},{},{},{},\"{}\",{:.6}\n",
                s.n,
                s.mean_cut,
                s.beta,
                s.stderr_beta,
                s.pass,
                time,
                s.successful().count(),
                self.config.shots,
                self.config.depth,
                family,
                self.lambda
            ));
        }
        out
    }

    pub fn raw_header(&self) -> String {
        let d = self.config.depth;
        let mut cols = vec!["n", "graph_index", "graph_seed", "num_edges"]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>();
        cols.extend((1..=d).map(|i| format!("gamma_{i}")));
        cols.extend((1..=d).map(|i| format!("beta_{i}")));
        cols.extend(["energy", "mean_cut", "evaluations", "error"].map(String::from));
        cols.join(",")
    }

    /// One line per graph with the final evaluation at its best angles.
    pub fn to_raw(&self) -> String {
        let mut out = self.raw_header();
        out.push('\n');
        for s in &self.scores {
            for r in &s.instances {
                let params: Vec<String> = if r.error.is_none() {
                    r.params.to_vec().iter().map(|p| format!("{p:.17e}")).collect()
                } else {
                    vec![String::new(); 2 * self.config.depth]
                };
                let err = r.error.as_deref().unwrap_or("").replace(['"', '\n'], " ");
                out.push_str(&format!(
                    "{},{},{},{},{},{:.17e},{:.17e},{},\"{}\"\n",
                    s.n,
                    r.index,
                    r.graph_seed,
                    r.num_edges,
                    params.join(","),
                    r.energy,
                    r.mean_cut,
                    r.evaluations,
                    err
                ));
            }
        }
        out
    }

    /// Per-evaluation optimizer traces, `n:index` as the graph id.
    pub fn trace_lines(&self) -> Vec<String> {
        self.scores
            .iter()
            .flat_map(|s| {
                s.instances.iter().filter_map(move |r| {
                    r.trace.as_ref().map(|t| t.dump_lines(&format!("{}:{}", s.n, r.index)))
                })
            })
            .flatten()
            .collect()
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        match self.q_score {
            Some(n) => out.push_str(&format!("Q-score: {n}\n")),
            None => out.push_str("Q-score: none\n"),
        }
        for s in &self.scores {
            out.push_str(&format!(
                "  n={:>3}  beta={:+.4} +/- {:.4}  {}{}\n",
                s.n,
                s.beta,
                s.stderr_beta,
                if s.pass { "pass" } else { "fail" },
                if s.timed_out { " (time budget)" } else { "" }
            ));
        }
        if self.non_monotone {
            out.push_str("warning: scores are not monotone in n; the search may be misleading\n");
        }
        if let Some(f) = &self.nu_fit {
            out.push_str(&format!(
                "scaling fit: nu = {:.4} (r = {:.3}), beta equivalent {:.4}\n",
                f.fit.coefficient, f.fit.r_value, f.beta_equivalent
            ));
        }
        out
    }
}
