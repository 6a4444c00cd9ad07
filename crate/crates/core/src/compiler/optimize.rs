use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{program_unitary, Interpreter};
use crate::ensemble::replica_seeds;
use crate::error::{domain, Result};
use crate::model::ChainSpec;
use crate::scalar::Real;

use super::closed_form::SynthesisResult;
use super::target::{fidelity, TargetUnitary};
use super::template::{ParamKind, Template};

/// Infidelity below which a synthesis counts as converged.
pub const CONVERGENCE_INFIDELITY: f64 = 1e-6;

/// Restarts evaluated concurrently before checking for success. Fixed so
/// that results do not depend on the thread count.
const RESTART_BATCH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Objective evaluations shared by all restarts.
    pub max_evaluations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_evaluations: 400_000,
            restarts: 16,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Nelder-Mead with dimension-adaptive coefficients. Stops at `target`,
/// after `max_evaluations`, or once the simplex has collapsed; a collapsed
/// simplex above `target` is rebuilt around its best vertex a few times.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    target: f64,
    max_evaluations: usize,
) -> Minimum {
    let n = x0.len();
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best = Minimum {
        x: x0.to_vec(),
        value: eval(x0, &mut evals),
        evaluations: 0,
    };
    if n == 0 {
        best.evaluations = evals;
        return best;
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut rebuilds = 0;
    let mut scale = step;
    'outer: while best.value > target && evals < max_evaluations {
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(best.x.clone(), best.value)];
        for k in 0..n {
            if evals >= max_evaluations {
                break 'outer;
            }
            let mut x = best.x.clone();
            x[k] += scale;
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[0].1 < best.value {
                best.x.clone_from(&simplex[0].0);
                best.value = simplex[0].1;
            }
            if best.value <= target || evals >= max_evaluations {
                break 'outer;
            }
            let spread = simplex[n].1 - simplex[0].1;
            let diameter = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if spread <= 1e-16 * simplex[0].1.abs().max(1e-300) || diameter < 1e-12 {
                break;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / nf)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let xr = along(alpha);
            let fr = eval(&xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = along(alpha * gamma);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[n].1 {
                    let xc = along(alpha * rho);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                } else {
                    let xc = along(-rho);
                    let fc = eval(&xc, &mut evals);
                    (xc, fc)
                };
                if fc < simplex[n].1.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for v in simplex[1..].iter_mut() {
                        for (a, b) in v.0.iter_mut().zip(&x0) {
                            *a = b + sigma * (*a - b);
                        }
                        v.1 = eval(&v.0, &mut evals);
                    }
                }
            }
        }
        rebuilds += 1;
        if rebuilds > 4 {
            break;
        }
        scale *= 0.1;
    }
    best.evaluations = evals;
    best
}

fn initial_point(kinds: &[ParamKind], seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = std::f64::consts::PI;
    kinds
        .iter()
        .map(|k| match k {
            ParamKind::Angle => rng.random_range(-pi..pi),
            ParamKind::Duration => rng.random_range(0.0..pi),
        })
        .collect()
}

/// Multi-start Nelder-Mead over the template parameters, maximizing the
/// fidelity with `target`. Deterministic in `budget`.
pub fn synthesize<T: Real>(
    spec: &ChainSpec<T>,
    target: &TargetUnitary<T>,
    template: &Template<T>,
    budget: &Budget,
) -> Result<SynthesisResult<T>> {
    if budget.max_evaluations == 0 || budget.restarts == 0 {
        return Err(domain(
            "the budget needs at least one evaluation and one restart",
        ));
    }
    let goal = target.embed(spec.n())?;
    let restarts = budget.restarts.min(budget.max_evaluations);
    let per_restart = budget.max_evaluations / restarts;
    let seeds = replica_seeds(budget.seed, restarts);

    let run = |seed: u64| -> Minimum {
        let interp = Interpreter::new(spec);
        let objective = |x: &[f64]| -> f64 {
            let params: Vec<T> = x.iter().map(|&v| T::lit(v)).collect();
            template
                .instantiate(spec, &params)
                .and_then(|p| interp.program_unitary(&p))
                .and_then(|u| fidelity(&u, &goal))
                .map_or(f64::INFINITY, |f| 1.0 - f.as_f64())
        };
        let x0 = initial_point(&template.kinds, seed);
        nelder_mead(objective, &x0, 0.5, 1e-13, per_restart)
    };

    let mut evaluations = 0;
    let mut chosen: Option<Minimum> = None;
    for batch in seeds.chunks(RESTART_BATCH) {
        let results: Vec<Minimum> = batch.par_iter().map(|&s| run(s)).collect();
        evaluations += results.iter().map(|m| m.evaluations).sum::<usize>();
        for m in results {
            if chosen.as_ref().is_none_or(|c| m.value < c.value) {
                chosen = Some(m);
            }
        }
        if chosen
            .as_ref()
            .is_some_and(|c| c.value < CONVERGENCE_INFIDELITY)
        {
            break;
        }
    }
    let best = chosen.expect("at least one restart ran");
    let params: Vec<T> = best.x.iter().map(|&v| T::lit(v)).collect();
    let program = template.instantiate(spec, &params)?;
    let f = fidelity(&program_unitary(&program, spec)?, &goal)?;
    Ok(SynthesisResult {
        program,
        fidelity: f,
        iterations: evaluations,
        converged: (T::one() - f).as_f64() < CONVERGENCE_INFIDELITY,
        optimizer_fidelity: T::lit(1.0 - best.value),
    })
}
