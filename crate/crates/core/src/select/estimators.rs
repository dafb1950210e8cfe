//! Sampling estimators of the evidence: arithmetic mean, harmonic mean,
//! the tempered harmonic mean (HMβ), and thermodynamic integration.
//!
//! All likelihood-power averages run through log-sum-exp; raw likelihoods
//! are never exponentiated (|log P| can run into the thousands).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cluster::{random_assignment, ClusterState, Priors};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math::{
    batch_means_log_std_error, batch_means_std_error, derive_seed, log_sum_exp, par_map_indexed,
    simpson_nonuniform,
};
use crate::select::{AssignmentSampler, EstimatorKind, MLEstimate};

/// How sampler chains start.
#[derive(Debug, Clone)]
pub enum SamplerInit {
    /// Uniform random assignment under the chain's seed.
    Random,
    /// Warm start from a given assignment (typically a converged fit).
    Assignment(Vec<usize>),
}

/// log of the arithmetic average of exp(x): logsumexp(x) − log M.
pub fn am_form(log_values: &[f64]) -> f64 {
    log_sum_exp(log_values) - (log_values.len() as f64).ln()
}

/// Harmonic-mean evidence from posterior log-likelihood samples:
/// log M − logsumexp(−x).
pub fn hm_form(log_liks: &[f64]) -> f64 {
    let negated: Vec<f64> = log_liks.iter().map(|x| -x).collect();
    (log_liks.len() as f64).ln() - log_sum_exp(&negated)
}

/// The tempered harmonic-mean combination of two sample streams:
///
/// log ML = −log⟨P^{−β}⟩_tempered − log⟨P^{β−1}⟩_posterior
///
/// where the first average runs over log-likelihood samples from the
/// β-tempered chain and the second over samples from the posterior (β = 1)
/// chain. At β = 1 the posterior term is identically zero and the expression
/// is exactly the harmonic mean of the tempered stream; at β = 0 the
/// tempered term is identically zero and the expression is exactly the
/// (negated) arithmetic-average form applied to the posterior stream's
/// inverse likelihoods.
pub fn hmbeta_combine(tempered_log_liks: &[f64], posterior_log_liks: &[f64], beta: f64) -> f64 {
    let term_tempered: Vec<f64> = tempered_log_liks.iter().map(|x| -beta * x).collect();
    let term_posterior: Vec<f64> = posterior_log_liks
        .iter()
        .map(|x| (beta - 1.0) * x)
        .collect();
    let log_avg_tempered = am_form(&term_tempered);
    let log_avg_posterior = am_form(&term_posterior);
    -log_avg_tempered - log_avg_posterior
}

/// Arithmetic-mean estimate: average of P(D|A,K) over iid uniform
/// assignments.
pub fn ml_am(
    data: &Dataset,
    priors: &Priors,
    k: usize,
    n_samples: usize,
    seed: u64,
) -> Result<MLEstimate> {
    if n_samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log_liks = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let assignment = random_assignment(data.n_rows(), k, &mut rng);
        let state = ClusterState::new(data, priors.clone(), k, assignment)?;
        log_liks.push(state.log_lik());
    }
    Ok(MLEstimate {
        k,
        log_ml: am_form(&log_liks),
        estimator: EstimatorKind::Am,
        n_samples: n_samples as u64,
        mc_std_error: batch_means_log_std_error(&log_liks),
        beta: None,
        ladder: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn chain_log_liks(
    data: &Dataset,
    priors: &Priors,
    k: usize,
    beta: f64,
    n_samples: usize,
    burn_in: usize,
    seed: u64,
    init: SamplerInit,
) -> Result<Vec<f64>> {
    let mut sampler = AssignmentSampler::new(data, priors, k, beta, seed, init)?;
    for _ in 0..burn_in {
        sampler.sweep();
    }
    let mut log_liks = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        sampler.sweep();
        log_liks.push(sampler.log_lik());
    }
    Ok(log_liks)
}

/// Harmonic-mean estimate over posterior samples.
pub fn ml_hm(
    data: &Dataset,
    priors: &Priors,
    k: usize,
    n_samples: usize,
    burn_in: usize,
    seed: u64,
    init: SamplerInit,
) -> Result<MLEstimate> {
    if n_samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let log_liks = chain_log_liks(data, priors, k, 1.0, n_samples, burn_in, seed, init)?;
    let negated: Vec<f64> = log_liks.iter().map(|x| -x).collect();
    Ok(MLEstimate {
        k,
        log_ml: hm_form(&log_liks),
        estimator: EstimatorKind::Hm,
        n_samples: n_samples as u64,
        mc_std_error: batch_means_log_std_error(&negated),
        beta: None,
        ladder: None,
    })
}

/// Tempered harmonic-mean estimate: one chain at inverse temperature β, one
/// at the posterior, combined per [`hmbeta_combine`]. The two streams use
/// independent seeds derived from `seed`.
#[allow(clippy::too_many_arguments)]
pub fn ml_hmbeta(
    data: &Dataset,
    priors: &Priors,
    k: usize,
    beta: f64,
    n_samples: usize,
    burn_in: usize,
    seed: u64,
    init: SamplerInit,
) -> Result<MLEstimate> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::invalid(format!(
            "beta must lie in [0,1], got {beta}"
        )));
    }
    if n_samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let tempered = chain_log_liks(
        data,
        priors,
        k,
        beta,
        n_samples,
        burn_in,
        derive_seed(seed, 1),
        init.clone(),
    )?;
    let posterior = chain_log_liks(
        data,
        priors,
        k,
        1.0,
        n_samples,
        burn_in,
        derive_seed(seed, 2),
        init,
    )?;
    let log_ml = hmbeta_combine(&tempered, &posterior, beta);
    let se_tempered =
        batch_means_log_std_error(&tempered.iter().map(|x| -beta * x).collect::<Vec<_>>());
    let se_posterior = batch_means_log_std_error(
        &posterior
            .iter()
            .map(|x| (beta - 1.0) * x)
            .collect::<Vec<_>>(),
    );
    let mc_std_error = match (se_tempered, se_posterior) {
        (Some(a), Some(b)) => Some((a * a + b * b).sqrt()),
        _ => None,
    };
    Ok(MLEstimate {
        k,
        log_ml,
        estimator: EstimatorKind::HmBeta,
        n_samples: 2 * n_samples as u64,
        mc_std_error,
        beta: Some(beta),
        ladder: None,
    })
}

/// Inverse-temperature grid for thermodynamic integration.
#[derive(Debug, Clone)]
pub struct TILadder {
    betas: Vec<f64>,
    pub samples_per_rung: usize,
    pub burn_in: usize,
}

impl TILadder {
    /// Validated ladder: strictly increasing from 0 to 1, odd point count
    /// (composite Simpson needs an even interval count).
    pub fn new(betas: Vec<f64>, samples_per_rung: usize, burn_in: usize) -> Result<Self> {
        if betas.len() < 3 || betas.len().is_multiple_of(2) {
            return Err(Error::invalid(
                "ladder needs an odd number of rungs, at least 3",
            ));
        }
        if (betas[0] - 0.0).abs() > 1e-12 || (betas[betas.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("ladder must span [0, 1]"));
        }
        if betas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("ladder must be strictly increasing"));
        }
        if samples_per_rung == 0 {
            return Err(Error::invalid("need at least one sample per rung"));
        }
        Ok(TILadder {
            betas,
            samples_per_rung,
            burn_in,
        })
    }

    /// Uniformly spaced rungs.
    pub fn uniform(n_rungs: usize, samples_per_rung: usize, burn_in: usize) -> Result<Self> {
        let betas = (0..n_rungs)
            .map(|i| i as f64 / (n_rungs - 1) as f64)
            .collect();
        TILadder::new(betas, samples_per_rung, burn_in)
    }

    /// Cubic spacing β_i = (i/(R−1))³, denser near 0 where the integrand
    /// changes fastest.
    pub fn cubic(n_rungs: usize, samples_per_rung: usize, burn_in: usize) -> Result<Self> {
        let betas = (0..n_rungs)
            .map(|i| (i as f64 / (n_rungs - 1) as f64).powi(3))
            .collect();
        TILadder::new(betas, samples_per_rung, burn_in)
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

impl Default for TILadder {
    fn default() -> Self {
        TILadder::uniform(11, 2000, 400).expect("valid default ladder")
    }
}

/// Thermodynamic integration: log ML = ∫₀¹ E_β[log P(D|A,K)] dβ, with each
/// rung's expectation estimated by an independent tempered chain and the
/// integral taken by composite Simpson's rule over the ladder. Rungs run
/// concurrently when `threads` allows; the result does not depend on the
/// thread count.
pub fn ml_ti(
    data: &Dataset,
    priors: &Priors,
    k: usize,
    ladder: &TILadder,
    seed: u64,
    init: SamplerInit,
    threads: usize,
) -> Result<MLEstimate> {
    let betas = ladder.betas();
    let rung_outputs: Vec<Result<(f64, Option<f64>)>> =
        par_map_indexed(betas.len(), threads, |i| {
            let log_liks = chain_log_liks(
                data,
                priors,
                k,
                betas[i],
                ladder.samples_per_rung,
                ladder.burn_in,
                derive_seed(seed, 10 + i as u64),
                init.clone(),
            )?;
            let mean = log_liks.iter().sum::<f64>() / log_liks.len() as f64;
            Ok((mean, batch_means_std_error(&log_liks)))
        });
    let mut means = Vec::with_capacity(betas.len());
    let mut ses = Vec::with_capacity(betas.len());
    for r in rung_outputs {
        let (mean, se) = r?;
        means.push(mean);
        ses.push(se);
    }
    let log_ml = simpson_nonuniform(betas, &means);

    // Simpson is a fixed linear functional of the rung means; propagate the
    // independent rung errors through its weights.
    let mut weights = vec![0.0; betas.len()];
    for pair in 0..(betas.len() - 1) / 2 {
        let i = 2 * pair;
        let h0 = betas[i + 1] - betas[i];
        let h1 = betas[i + 2] - betas[i + 1];
        let hsum = h0 + h1;
        weights[i] += hsum / 6.0 * (2.0 - h1 / h0);
        weights[i + 1] += hsum / 6.0 * (hsum * hsum / (h0 * h1));
        weights[i + 2] += hsum / 6.0 * (2.0 - h0 / h1);
    }
    let mc_std_error = if ses.iter().all(|s| s.is_some()) {
        Some(
            weights
                .iter()
                .zip(&ses)
                .map(|(w, s)| (w * s.unwrap()).powi(2))
                .sum::<f64>()
                .sqrt(),
        )
    } else {
        None
    };

    Ok(MLEstimate {
        k,
        log_ml,
        estimator: EstimatorKind::Ti,
        n_samples: (betas.len() * ladder.samples_per_rung) as u64,
        mc_std_error,
        beta: None,
        ladder: Some(betas.to_vec()),
    })
}
