//! Nelder-Mead downhill simplex, kept as a fallback method.

use super::Termination;
use crate::Result;

pub(crate) struct NelderMead {
    pub initial_step: f64,
    pub tolerance: f64,
    pub max_evaluations: usize,
}

impl NelderMead {
    pub fn minimize(
        &self,
        f: &mut dyn FnMut(&[f64]) -> Result<f64>,
        x0: &[f64],
    ) -> Result<Termination> {
        let n = x0.len();
        let mut evals = 0usize;
        let max = self.max_evaluations;
        let mut eval = |x: &[f64], evals: &mut usize| -> Result<Option<f64>> {
            if *evals >= max {
                return Ok(None);
            }
            *evals += 1;
            f(x).map(Some)
        };

        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut x = x0.to_vec();
            if i > 0 {
                x[i - 1] += self.initial_step;
            }
            match eval(&x, &mut evals)? {
                Some(v) => simplex.push((x, v)),
                None => return Ok(Termination::BudgetExhausted),
            }
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best, worst) = (simplex[0].1, simplex[n].1);
            let size = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if size <= self.tolerance && (worst - best).abs() <= self.tolerance {
                return Ok(Termination::Converged);
            }

            let centroid: Vec<f64> = (0..n)
                .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (w - c))
                    .collect()
            };

            let xr = along(-1.0);
            let Some(fr) = eval(&xr, &mut evals)? else {
                return Ok(Termination::BudgetExhausted);
            };
            if fr < best {
                let xe = along(-2.0);
                let Some(fe) = eval(&xe, &mut evals)? else {
                    return Ok(Termination::BudgetExhausted);
                };
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, t) = if fr < worst { (along(-0.5), fr) } else { (along(0.5), worst) };
            let Some(fc) = eval(&xc, &mut evals)? else {
                return Ok(Termination::BudgetExhausted);
            };
            if fc < t {
                simplex[n] = (xc, fc);
                continue;
            }
            // shrink towards the best vertex
            let b = simplex[0].0.clone();
            for entry in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = b.iter().zip(&entry.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                let Some(v) = eval(&x, &mut evals)? else {
                    return Ok(Termination::BudgetExhausted);
                };
                *entry = (x, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let mut best = f64::INFINITY;
        let mut f = |x: &[f64]| {
            let v = (x[0] - 2.0).powi(2) + (x[1] - 1.0).powi(2);
            best = best.min(v);
            Ok(v)
        };
        let t = NelderMead {
            initial_step: 0.5,
            tolerance: 1e-8,
            max_evaluations: 1000,
        }
        .minimize(&mut f, &[0.0, 0.0])
        .unwrap();
        assert_eq!(t, Termination::Converged);
        assert!(best < 1e-10);
    }

    #[test]
    fn budget() {
        let mut count = 0;
        let mut f = |x: &[f64]| {
            count += 1;
            Ok(x[0].powi(2))
        };
        let t = NelderMead {
            initial_step: 0.5,
            tolerance: 1e-12,
            max_evaluations: 3,
        }
        .minimize(&mut f, &[1.0])
        .unwrap();
        assert_eq!(t, Termination::BudgetExhausted);
        assert_eq!(count, 3);
    }
}
