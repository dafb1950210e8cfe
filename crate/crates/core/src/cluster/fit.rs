//! Fitting drivers: single-K fits, the grow-one-cluster heuristic, and the
//! K-path used by the selection sweep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cluster::{ClusterState, Engine, Priors};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math::derive_seed;

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub max_passes: usize,
    /// Stop when a full pass improves the log-likelihood by less than this,
    /// even if rows are still shuffling between exactly tied clusters.
    pub min_improvement: f64,
    /// Random restarts (random init only); the best final likelihood wins.
    pub n_restarts: usize,
    /// Score every row against pass-start statistics and move all rows at
    /// once, instead of the default sequential, immediately-updated pass.
    pub batch_mode: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_passes: 200,
            min_improvement: 1e-9,
            n_restarts: 1,
            batch_mode: false,
        }
    }
}

/// Initialization for a fit.
#[derive(Debug, Clone)]
pub enum Init<'a> {
    /// Uniform random cluster per row under the run's seed.
    Random,
    /// A caller-provided assignment (values must lie in 0..K).
    Assignment(&'a [usize]),
}

/// Outcome of one fit: final state, per-pass likelihood trace (the first
/// entry is the initial likelihood), pass count, convergence flag, and the
/// seed the run used.
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub state: ClusterState,
    pub trace: Vec<f64>,
    pub passes: usize,
    pub converged: bool,
    pub seed: u64,
}

impl ClusteringResult {
    pub fn log_lik(&self) -> f64 {
        self.state.log_lik()
    }
}

pub fn random_assignment<R: Rng>(n_rows: usize, k: usize, rng: &mut R) -> Vec<usize> {
    (0..n_rows).map(|_| rng.random_range(0..k)).collect()
}

/// Fits K clusters: repeated reassignment passes until none moves, the
/// likelihood stalls, or `max_passes` is hit. Empty clusters are dropped at
/// the end, so the result's K can be smaller than requested.
pub fn fit_k(
    data: &Dataset,
    priors: &Priors,
    k: usize,
    init: Init<'_>,
    seed: u64,
    options: &FitOptions,
) -> Result<ClusteringResult> {
    if k < 1 {
        return Err(Error::invalid("need at least one cluster"));
    }
    if k > data.n_rows() {
        return Err(Error::invalid(format!(
            "K={k} exceeds the row count {}",
            data.n_rows()
        )));
    }
    let restarts = match init {
        Init::Random => options.n_restarts.max(1),
        Init::Assignment(_) => 1,
    };
    let mut best: Option<ClusteringResult> = None;
    for restart in 0..restarts {
        let run_seed = derive_seed(seed, restart as u64);
        let assignment = match &init {
            Init::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
                random_assignment(data.n_rows(), k, &mut rng)
            }
            Init::Assignment(a) => a.to_vec(),
        };
        let result = fit_once(data, priors, k, assignment, run_seed, options)?;
        let better = match &best {
            None => true,
            Some(b) => result.log_lik() > b.log_lik(),
        };
        if better {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn fit_once(
    data: &Dataset,
    priors: &Priors,
    k: usize,
    assignment: Vec<usize>,
    seed: u64,
    options: &FitOptions,
) -> Result<ClusteringResult> {
    let state = ClusterState::new(data, priors.clone(), k, assignment)?;
    let mut engine = Engine::new(data, state);
    let mut trace = vec![engine.log_lik_from_stats()];
    let mut converged = false;
    let mut passes = 0;
    while passes < options.max_passes {
        let moved = if options.batch_mode {
            engine.em_pass_batch()
        } else {
            engine.em_pass()
        };
        passes += 1;
        let ll = engine.log_lik_from_stats();
        let previous = *trace.last().unwrap();
        trace.push(ll);
        if moved == 0 {
            converged = true;
            break;
        }
        if (ll - previous).abs() < options.min_improvement {
            break;
        }
    }
    let mut state = engine.into_state();
    let ll = *trace.last().unwrap();
    state.set_log_lik(ll);
    state.drop_empty_clusters();
    Ok(ClusteringResult {
        state,
        trace,
        passes,
        converged,
        seed,
    })
}

/// Builds the initialization for K+1 clusters from a converged K-fit: the
/// poorest-fitting ⌊N/(K+1)⌋ rows — ranked by their leave-one-out predictive
/// against their own cluster — move to a new cluster.
pub fn grow_k(data: &Dataset, result: &ClusteringResult) -> Result<Vec<usize>> {
    let state = &result.state;
    let n = data.n_rows();
    let k = state.k();
    let mut scored: Vec<(f64, usize)> = (0..n)
        .map(|row| {
            let score = state
                .score_row(data, row, state.assignment()[row])
                .expect("row and cluster in range");
            (score, row)
        })
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let n_move = n / (k + 1);
    let mut assignment = state.assignment().to_vec();
    for &(_, row) in scored.iter().take(n_move) {
        assignment[row] = k;
    }
    Ok(assignment)
}

/// Fits K = 1..=k_max, each initialized by growing the previous converged
/// result by one cluster. Restarts are not used along the path; the chain of
/// grown initializations is the initialization strategy.
pub fn fit_path(
    data: &Dataset,
    priors: &Priors,
    k_max: usize,
    seed: u64,
    options: &FitOptions,
) -> Result<Vec<ClusteringResult>> {
    if k_max < 1 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let path_options = FitOptions {
        n_restarts: 1,
        ..options.clone()
    };
    let mut results: Vec<ClusteringResult> = Vec::with_capacity(k_max);
    for k in 1..=k_max.min(data.n_rows()) {
        let result = if k == 1 {
            let init = vec![0; data.n_rows()];
            fit_k(
                data,
                priors,
                1,
                Init::Assignment(&init),
                derive_seed(seed, 1),
                &path_options,
            )?
        } else {
            let prev = results.last().unwrap();
            let grown = grow_k(data, prev)?;
            let requested = prev.state.k() + 1;
            fit_k(
                data,
                priors,
                requested,
                Init::Assignment(&grown),
                derive_seed(seed, k as u64),
                &path_options,
            )?
        };
        results.push(result);
    }
    Ok(results)
}
