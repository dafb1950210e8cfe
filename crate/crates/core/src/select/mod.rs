//! Evidence estimators for choosing the number of clusters.
//!
//! The quantity estimated is the marginal likelihood of the data under a
//! K-cluster model with the assignment vector marginalized out under a
//! uniform prior over the K^N labelings (distribution parameters are always
//! integrated analytically). Routes: exact enumeration on small instances,
//! arithmetic/harmonic means, the tempered harmonic mean (HMβ),
//! thermodynamic integration, and BIC as a penalized-likelihood fallback.

mod estimators;
mod exact;
mod sampler;

pub use estimators::{
    am_form, hm_form, hmbeta_combine, ml_am, ml_hm, ml_hmbeta, ml_ti, SamplerInit, TILadder,
};
pub use exact::{ml_exact, surjective_labeling_count, ExactOptions};
pub use sampler::{gibbs_conditionals, AssignmentSampler};

use crate::cluster::{fit_path, ClusteringResult, FitOptions, Priors};
use crate::data::{Column, Dataset};
use crate::error::{Error, Result};
use crate::math::derive_seed;

/// Which estimator produced an [`MLEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Exact,
    Am,
    Hm,
    HmBeta,
    Ti,
    Bic,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Exact => "exact",
            EstimatorKind::Am => "am",
            EstimatorKind::Hm => "hm",
            EstimatorKind::HmBeta => "hmbeta",
            EstimatorKind::Ti => "ti",
            EstimatorKind::Bic => "bic",
        }
    }
}

/// A log marginal-likelihood estimate with its provenance.
///
/// For `Bic` the value is the negated BIC score, so that "larger is better"
/// holds uniformly across estimators when selecting K.
#[derive(Debug, Clone)]
pub struct MLEstimate {
    pub k: usize,
    pub log_ml: f64,
    pub estimator: EstimatorKind,
    pub n_samples: u64,
    pub mc_std_error: Option<f64>,
    pub beta: Option<f64>,
    pub ladder: Option<Vec<f64>>,
}

/// BIC of a converged clustering: −2·log L̂ + d·log N with log L̂ the fitted
/// clustering log-likelihood and d = K·Σ per-column parameters + (K−1),
/// counting (k−1) parameters per categorical column and 2 per numeric.
/// Lower is better.
pub fn bic(result: &ClusteringResult, data: &Dataset) -> f64 {
    let k = result.state.k();
    let per_cluster: usize = (0..data.n_columns())
        .map(|c| match data.column(c) {
            Column::Categorical(_) => data.schema().column_kind(c).arity() - 1,
            Column::Numeric { .. } => 2,
        })
        .sum();
    let d = k * per_cluster + (k - 1);
    -2.0 * result.log_lik() + d as f64 * (data.n_rows() as f64).ln()
}

/// The K with the largest criterion value; ties go to the smallest K.
pub fn select_k(estimates: &[MLEstimate]) -> Result<usize> {
    if estimates.is_empty() {
        return Err(Error::invalid("no estimates to select from"));
    }
    let mut best = &estimates[0];
    for e in &estimates[1..] {
        if e.log_ml > best.log_ml {
            best = e;
        }
    }
    Ok(best.k)
}

/// Selection criterion configuration for a K-sweep.
#[derive(Debug, Clone)]
pub enum Selection {
    Exact {
        all_labelings: bool,
        budget: u64,
    },
    Am {
        n_samples: usize,
    },
    Hm {
        n_samples: usize,
        burn_in: usize,
    },
    HmBeta {
        beta: f64,
        n_samples: usize,
        burn_in: usize,
    },
    Ti {
        ladder: TILadder,
    },
    Bic,
}

impl Selection {
    pub fn estimator_kind(&self) -> EstimatorKind {
        match self {
            Selection::Exact { .. } => EstimatorKind::Exact,
            Selection::Am { .. } => EstimatorKind::Am,
            Selection::Hm { .. } => EstimatorKind::Hm,
            Selection::HmBeta { .. } => EstimatorKind::HmBeta,
            Selection::Ti { .. } => EstimatorKind::Ti,
            Selection::Bic => EstimatorKind::Bic,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub selection: Selection,
    pub fit: FitOptions,
    pub threads: usize,
}

/// per-K fits, per-K criterion values, and the chosen K.
#[derive(Debug)]
pub struct SweepOutcome {
    pub results: Vec<ClusteringResult>,
    pub estimates: Vec<MLEstimate>,
    pub chosen_k: usize,
}

/// Computes the selection criterion for one K, warm-starting samplers from a
/// fitted assignment when one is available.
pub fn estimate_for_k(
    data: &Dataset,
    priors: &Priors,
    k: usize,
    selection: &Selection,
    seed: u64,
    warm_start: Option<&ClusteringResult>,
    threads: usize,
) -> Result<MLEstimate> {
    let init = match warm_start {
        Some(r) => SamplerInit::Assignment(r.state.assignment().to_vec()),
        None => SamplerInit::Random,
    };
    match selection {
        Selection::Exact {
            all_labelings,
            budget,
        } => ml_exact(
            data,
            priors,
            k,
            &ExactOptions {
                all_labelings: *all_labelings,
                budget: *budget,
            },
        ),
        Selection::Am { n_samples } => ml_am(data, priors, k, *n_samples, seed),
        Selection::Hm { n_samples, burn_in } => {
            ml_hm(data, priors, k, *n_samples, *burn_in, seed, init)
        }
        Selection::HmBeta {
            beta,
            n_samples,
            burn_in,
        } => ml_hmbeta(data, priors, k, *beta, *n_samples, *burn_in, seed, init),
        Selection::Ti { ladder } => ml_ti(data, priors, k, ladder, seed, init, threads),
        Selection::Bic => {
            let result = warm_start
                .ok_or_else(|| Error::invalid("BIC needs a fitted clustering for each K"))?;
            Ok(MLEstimate {
                k,
                log_ml: -bic(result, data),
                estimator: EstimatorKind::Bic,
                n_samples: 0,
                mc_std_error: None,
                beta: None,
                ladder: None,
            })
        }
    }
}

/// Fits K = 1..=k_max along the grow-one-cluster path, scores each K with
/// the configured criterion, and picks the argmax (ties toward smaller K).
pub fn fit_sweep(
    data: &Dataset,
    priors: &Priors,
    k_max: usize,
    seed: u64,
    options: &SweepOptions,
) -> Result<SweepOutcome> {
    let results = fit_path(data, priors, k_max, seed, &options.fit)?;
    let mut estimates = Vec::with_capacity(results.len());
    for (idx, result) in results.iter().enumerate() {
        let k = idx + 1;
        estimates.push(estimate_for_k(
            data,
            priors,
            k,
            &options.selection,
            derive_seed(seed, 0x5EED_0000 + k as u64),
            Some(result),
            options.threads,
        )?);
    }
    let chosen_k = select_k(&estimates)?;
    Ok(SweepOutcome {
        results,
        estimates,
        chosen_k,
    })
}
