//! Linear-model trust-region minimization in the style of Powell's COBYLA,
//! without constraints.
//!
//! A simplex of `n + 1` points defines a linear interpolation model around
//! the best vertex. Each iteration either steps to the model minimizer on the
//! sphere of radius `rho`, or repairs the simplex geometry. `rho` is halved
//! whenever a step fails to deliver a tenth of the predicted reduction on an
//! acceptable simplex, until it reaches `rho_end`.

use super::Termination;
use crate::Result;

const STEP_SUCCESS: f64 = 0.1;
/// A vertex farther than this many radii from the best one is too far.
const MAX_VERTEX_DISTANCE: f64 = 2.1;
/// A vertex closer than this many radii to its opposite face is too flat.
const MIN_FACE_DISTANCE: f64 = 0.25;
const GEOMETRY_STEP: f64 = 0.5;

pub(crate) struct TrustRegion {
    pub rho_begin: f64,
    pub rho_end: f64,
    pub max_evaluations: usize,
}

/// Gauss-Jordan inverse with partial pivoting; `None` if singular.
fn invert(mut a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != 0.0 {
                    for j in 0..n {
                        a[i][j] -= f * a[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl TrustRegion {
    pub fn minimize(
        &self,
        f: &mut dyn FnMut(&[f64]) -> Result<f64>,
        x0: &[f64],
    ) -> Result<Termination> {
        let n = x0.len();
        let mut evals = 0usize;
        let mut rho = self.rho_begin;
        let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut values: Vec<f64> = Vec::with_capacity(n + 1);

        let budget_left = |evals: usize| evals < self.max_evaluations;
        if !budget_left(evals) {
            return Ok(Termination::BudgetExhausted);
        }
        values.push(f(x0)?);
        evals += 1;
        points.push(x0.to_vec());
        for i in 0..n {
            if !budget_left(evals) {
                return Ok(Termination::BudgetExhausted);
            }
            let mut x = x0.to_vec();
            x[i] += rho;
            values.push(f(&x)?);
            evals += 1;
            points.push(x);
        }

        let mut check_geometry = false;
        loop {
            if !budget_left(evals) {
                return Ok(Termination::BudgetExhausted);
            }
            let best = (0..=n)
                .min_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)))
                .unwrap();
            let others: Vec<usize> = (0..=n).filter(|&j| j != best).collect();
            let rows: Vec<Vec<f64>> = others
                .iter()
                .map(|&j| points[j].iter().zip(&points[best]).map(|(a, b)| a - b).collect())
                .collect();
            let inverse = invert(rows.clone());

            // vertex distances from the best point and from their opposite faces
            let veta: Vec<f64> = rows.iter().map(|r| norm(r)).collect();
            let vsig: Vec<f64> = match &inverse {
                Some(inv) => (0..n)
                    .map(|j| 1.0 / norm(&(0..n).map(|k| inv[k][j]).collect::<Vec<_>>()))
                    .collect(),
                None => vec![0.0; n],
            };
            let geometry_ok = inverse.is_some()
                && veta.iter().all(|&v| v <= MAX_VERTEX_DISTANCE * rho)
                && vsig.iter().all(|&v| v >= MIN_FACE_DISTANCE * rho);
            let gradient: Vec<f64> = match &inverse {
                Some(inv) => (0..n)
                    .map(|k| {
                        (0..n)
                            .map(|j| inv[k][j] * (values[others[j]] - values[best]))
                            .sum()
                    })
                    .collect(),
                None => vec![0.0; n],
            };

            if inverse.is_none() || (check_geometry && !geometry_ok) {
                // replace the worst-placed vertex by a point off its face
                let j = if let Some(j) =
                    (0..n).filter(|&j| veta[j] > MAX_VERTEX_DISTANCE * rho).max_by(|&a, &b| veta[a].total_cmp(&veta[b]))
                {
                    j
                } else {
                    (0..n).min_by(|&a, &b| vsig[a].total_cmp(&vsig[b])).unwrap()
                };
                let dir: Vec<f64> = match &inverse {
                    Some(inv) => (0..n).map(|k| inv[k][j]).collect(),
                    None => {
                        // degenerate: rebuild along the coordinate axis for j
                        (0..n).map(|k| if k == j { 1.0 } else { 0.0 }).collect()
                    }
                };
                let len = norm(&dir);
                let slope: f64 = dir.iter().zip(&gradient).map(|(d, g)| d * g).sum();
                let sign = if slope > 0.0 { -1.0 } else { 1.0 };
                let x: Vec<f64> = points[best]
                    .iter()
                    .zip(&dir)
                    .map(|(b, d)| b + sign * GEOMETRY_STEP * rho * d / len)
                    .collect();
                let fx = f(&x)?;
                evals += 1;
                points[others[j]] = x;
                values[others[j]] = fx;
                check_geometry = false;
                continue;
            }

            if check_geometry {
                check_geometry = false;
                if rho <= self.rho_end {
                    return Ok(Termination::Converged);
                }
                rho *= 0.5;
                if rho <= 1.5 * self.rho_end {
                    rho = self.rho_end;
                }
                continue;
            }

            let gnorm = norm(&gradient);
            if gnorm == 0.0 {
                check_geometry = true;
                continue;
            }
            let step: Vec<f64> = gradient.iter().map(|g| -rho * g / gnorm).collect();
            let x: Vec<f64> = points[best].iter().zip(&step).map(|(b, s)| b + s).collect();
            let fx = f(&x)?;
            evals += 1;
            let predicted = rho * gnorm;
            let ratio = (values[best] - fx) / predicted;

            // barycentric weights of the step; drop the vertex it leans on most
            let inv = inverse.as_ref().unwrap();
            let sigma: Vec<f64> = (0..n)
                .map(|j| (0..n).map(|k| inv[k][j] * step[k]).sum())
                .collect();
            let drop = (0..n)
                .max_by(|&a, &b| {
                    let wa = sigma[a].abs() * veta[a].max(rho);
                    let wb = sigma[b].abs() * veta[b].max(rho);
                    wa.total_cmp(&wb)
                })
                .unwrap();
            if fx < values[best] || sigma[drop].abs() > 0.1 {
                points[others[drop]] = x;
                values[others[drop]] = fx;
            }
            if ratio < STEP_SUCCESS {
                check_geometry = true;
            }
        }
    }
}
