//! Derivative-free minimization over the unitary group.
//!
//! Each restart picks a starting unitary `V₀` (identity for the first restart,
//! Haar-random for the rest) and runs Nelder-Mead on the chart
//! `g ↦ exp(iH(g)) V₀`, where `H(g)` is the Hermitian matrix with real
//! coordinates `g`. After a local run converges the chart is re-centred at the
//! best point and the search is repeated with a smaller simplex, which keeps
//! the chart well conditioned near the optimum.

use rayon::prelude::*;

use crate::lift::{exp_i_hermitian, haar_random_unitary, hermitian_from_params, SingleParticleUnitary};

/// Settings shared by the multistart search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Nelder-Mead iterations per restart, summed over re-centred passes.
    pub max_iterations: usize,
    /// Convergence tolerance on the objective value.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 20,
            max_iterations: 20_000,
            tol: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    pub initial_step: f64,
}

#[derive(Debug, Clone)]
pub struct LocalMinimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder-Mead with dimension-adaptive coefficients (Gao & Han), which behave
/// much better than the textbook ones beyond a handful of dimensions.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> LocalMinimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evaluations)).collect();

    let mut order: Vec<usize> = (0..=n).collect();
    let mut iterations = 0usize;
    let mut converged = false;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    while iterations < opts.max_iterations {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n.saturating_sub(1)];

        let f_spread = values[worst] - values[best];
        let x_spread = simplex
            .iter()
            .flat_map(|x| x.iter().zip(simplex[best].iter()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= opts.f_tol && x_spread <= opts.x_tol {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &idx in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(simplex[idx].iter()) {
                *c += x / nf;
            }
        }

        for i in 0..n {
            trial[i] = centroid[i] + alpha * (centroid[i] - simplex[worst][i]);
        }
        let f_reflect = eval(&trial, &mut evaluations);

        if f_reflect < values[best] {
            for i in 0..n {
                trial2[i] = centroid[i] + beta * (trial[i] - centroid[i]);
            }
            let f_expand = eval(&trial2, &mut evaluations);
            if f_expand < f_reflect {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = f_expand;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[second_worst] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = f_reflect;
            continue;
        }

        let outside = f_reflect < values[worst];
        for i in 0..n {
            trial2[i] = if outside {
                centroid[i] + gamma * (trial[i] - centroid[i])
            } else {
                centroid[i] - gamma * (centroid[i] - simplex[worst][i])
            };
        }
        let f_contract = eval(&trial2, &mut evaluations);
        let accept = if outside {
            f_contract <= f_reflect
        } else {
            f_contract < values[worst]
        };
        if accept {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = f_contract;
            continue;
        }

        let anchor = simplex[best].clone();
        for &idx in &order[1..] {
            for (x, a) in simplex[idx].iter_mut().zip(anchor.iter()) {
                *x = a + delta * (*x - a);
            }
            values[idx] = eval(&simplex[idx], &mut evaluations);
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    LocalMinimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
        evaluations,
        converged,
    }
}

/// Outcome of one restart of [`minimize_over_unitaries`].
#[derive(Debug, Clone)]
pub struct RestartOutcome {
    pub value: f64,
    pub unitary: SingleParticleUnitary,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct MultistartResult {
    pub restarts: Vec<RestartOutcome>,
    pub best: usize,
}

impl MultistartResult {
    pub fn best(&self) -> &RestartOutcome {
        &self.restarts[self.best]
    }

    pub fn values(&self) -> Vec<f64> {
        self.restarts.iter().map(|r| r.value).collect()
    }
}

const INITIAL_STEP: f64 = 0.4;
const MAX_PASSES: usize = 12;

/// Seed for restart `index` derived from a base seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Minimizes `objective` over d×d unitaries with independent restarts run in
/// parallel. Results are ordered by restart index, so the outcome depends only
/// on the configuration.
pub fn minimize_over_unitaries<F>(objective: F, d: usize, cfg: &OptimizerConfig) -> MultistartResult
where
    F: Fn(&SingleParticleUnitary) -> f64 + Sync,
{
    let restarts = cfg.restarts.max(1);
    let outcomes: Vec<RestartOutcome> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                SingleParticleUnitary::identity(d)
            } else {
                haar_random_unitary(d, derive_seed(cfg.seed, r as u64))
            };
            local_search(&objective, start, cfg)
        })
        .collect();
    let best = (0..outcomes.len())
        .min_by(|&a, &b| outcomes[a].value.total_cmp(&outcomes[b].value))
        .unwrap();
    MultistartResult {
        restarts: outcomes,
        best,
    }
}

fn local_search<F>(objective: &F, start: SingleParticleUnitary, cfg: &OptimizerConfig) -> RestartOutcome
where
    F: Fn(&SingleParticleUnitary) -> f64,
{
    let d = start.d();
    let mut center = start.matrix().clone();
    let mut value = objective(&start);
    let mut step = INITIAL_STEP;
    let mut iterations = 0usize;
    let mut evaluations = 1usize;
    let mut converged = false;
    let x_tol = (cfg.tol.sqrt() * 1e-2).max(1e-12);

    for _ in 0..MAX_PASSES {
        if iterations >= cfg.max_iterations {
            break;
        }
        let chart_center = center.clone();
        let opts = NelderMeadOptions {
            max_iterations: cfg.max_iterations - iterations,
            f_tol: cfg.tol,
            x_tol,
            initial_step: step,
        };
        let local = nelder_mead(
            |g| {
                let u = exp_i_hermitian(&hermitian_from_params(d, g)) * &chart_center;
                objective(&SingleParticleUnitary::from_matrix_unchecked(u))
            },
            &vec![0.0; d * d],
            &opts,
        );
        iterations += local.iterations;
        evaluations += local.evaluations;

        let improvement = value - local.value;
        if local.value < value {
            center = exp_i_hermitian(&hermitian_from_params(d, &local.x)) * &chart_center;
            value = local.value;
        }
        let moved = local.x.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if local.converged && improvement <= cfg.tol {
            converged = true;
            break;
        }
        step = (moved * 2.0).clamp(1e-6, INITIAL_STEP);
    }

    RestartOutcome {
        value,
        unitary: SingleParticleUnitary::from_matrix_unchecked(center),
        iterations,
        evaluations,
        converged,
    }
}
