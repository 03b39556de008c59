use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{instance_seed, maxcut::maxcut_exact_limited, GraphFamily};
use crate::{Error, Result};

/// Published subleading coefficient of the expected max cut on G(n, 1/2).
pub const LAMBDA_HALF: f64 = 0.178;

/// Universal constant of max-cut scaling on sparse uniform random graphs.
pub const P_STAR: f64 = 0.76321;

/// Least-squares fit of `mean(n) - baseline(n) = coefficient * n^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub family: GraphFamily,
    pub exponent: f64,
    pub coefficient: f64,
    /// Correlation between the baseline-subtracted data and `n^exponent`,
    /// clamped to `[0, 1]`.
    pub r_value: f64,
    pub fit_range: Vec<usize>,
    pub instances_per_size: usize,
}

impl ScalingFit {
    pub const CSV_HEADER: &'static str = "family,exponent,coefficient,r_value,n_min,n_max,instances";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.12},{:.12},{},{},{}",
            self.family,
            self.exponent,
            self.coefficient,
            self.r_value,
            self.fit_range.first().copied().unwrap_or(0),
            self.fit_range.last().copied().unwrap_or(0),
            self.instances_per_size
        )
    }
}

/// Sample mean of a per-size quantity with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub instances: usize,
}

impl MeanEstimate {
    pub fn from_samples(n: usize, samples: &[f64]) -> Self {
        let k = samples.len();
        let mean = samples.iter().sum::<f64>() / k as f64;
        let stderr = if k > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        } else {
            0.0
        };
        MeanEstimate {
            n,
            mean,
            stderr,
            instances: k,
        }
    }
}

/// Closed-form coefficient for a family: `sqrt(2q) * LAMBDA_HALF` for G(n, q)
/// and `P_STAR * sqrt(k) / 2` for k-regular graphs.
pub fn analytic_lambda(family: GraphFamily) -> Option<f64> {
    match family {
        GraphFamily::ErdosRenyi { q } => Some((2.0 * q).sqrt() * LAMBDA_HALF),
        GraphFamily::KRegular { k } => Some(P_STAR * (k as f64).sqrt() / 2.0),
        GraphFamily::Explicit => None,
    }
}

/// Mean exact max cut over `instances` seeded graphs of size `n`.
pub fn expected_max_cut(
    n: usize,
    family: GraphFamily,
    instances: usize,
    master_seed: u64,
    enumeration_limit: usize,
) -> Result<MeanEstimate> {
    if instances < 2 {
        return Err(Error::Parameter(format!(
            "need at least 2 instances, got {instances}"
        )));
    }
    let values = (0..instances)
        .into_par_iter()
        .map(|i| {
            let g = family.generate(n, instance_seed(master_seed, n, i))?;
            Ok(maxcut_exact_limited(&g, enumeration_limit)?.value as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(MeanEstimate::from_samples(n, &values))
}

/// Fits the optimal-cut scaling coefficient from per-size mean max cuts.
pub fn fit_lambda(
    means: &[(usize, f64)],
    family: GraphFamily,
    instances_per_size: usize,
) -> Result<ScalingFit> {
    if means.iter().any(|&(_, m)| !(m > 0.0)) {
        return Err(Error::Fit("mean max cuts must be positive".into()));
    }
    let fit = fit_scaling(means, family, instances_per_size, 4)?;
    if fit.coefficient <= 0.0 {
        return Err(Error::Fit(format!(
            "non-positive scaling coefficient {}",
            fit.coefficient
        )));
    }
    Ok(fit)
}

/// One-parameter least squares through the origin on the baseline-subtracted
/// data, with the family's fixed exponent.
pub fn fit_scaling(
    points: &[(usize, f64)],
    family: GraphFamily,
    instances_per_size: usize,
    min_sizes: usize,
) -> Result<ScalingFit> {
    if matches!(family, GraphFamily::Explicit) {
        return Err(Error::Fit("explicit graphs have no scaling law".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Fit("duplicate sizes in fit input".into()));
    }
    if pts.len() < min_sizes.max(2) {
        return Err(Error::Fit(format!(
            "need at least {} distinct sizes, got {}",
            min_sizes.max(2),
            pts.len()
        )));
    }
    let exponent = family.exponent();
    let xs: Vec<f64> = pts.iter().map(|&(n, _)| (n as f64).powf(exponent)).collect();
    let ys: Vec<f64> = pts.iter().map(|&(n, m)| m - family.baseline(n)).collect();

    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let coefficient = sxy / sxx;

    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_value = if vy == 0.0 {
        let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - coefficient * x).powi(2)).sum();
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (cov / (vx * vy).sqrt()).clamp(0.0, 1.0)
    };

    Ok(ScalingFit {
        family,
        exponent,
        coefficient,
        r_value,
        fit_range: pts.iter().map(|p| p.0).collect(),
        instances_per_size,
    })
}
