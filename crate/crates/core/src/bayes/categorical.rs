//! Dirichlet prior over categorical columns.

use crate::error::{Error, Result};
use crate::math::ln_gamma;

/// Dirichlet pseudocounts for a categorical column with `k` categories.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    pseudocounts: Vec<f64>,
    total: f64,
}

impl DirichletParams {
    /// Builds a prior from explicit pseudocounts; requires k ≥ 2 and all > 0.
    pub fn new(pseudocounts: Vec<f64>) -> Result<Self> {
        if pseudocounts.len() < 2 {
            return Err(Error::invalid(format!(
                "Dirichlet prior needs at least 2 categories, got {}",
                pseudocounts.len()
            )));
        }
        if pseudocounts.iter().any(|c| !c.is_finite() || *c <= 0.0) {
            return Err(Error::invalid(
                "Dirichlet pseudocounts must be finite and > 0".to_string(),
            ));
        }
        let total = pseudocounts.iter().sum();
        Ok(DirichletParams {
            pseudocounts,
            total,
        })
    }

    /// The uniform prior: one pseudocount per category.
    pub fn uniform(k: usize) -> Result<Self> {
        DirichletParams::new(vec![1.0; k])
    }

    pub fn k(&self) -> usize {
        self.pseudocounts.len()
    }

    pub fn pseudocount(&self, x: usize) -> f64 {
        self.pseudocounts[x]
    }

    pub fn pseudocounts(&self) -> &[f64] {
        &self.pseudocounts
    }

    /// Cached Σ c_i.
    pub fn total(&self) -> f64 {
        self.total
    }
}

/// Observed per-category counts for one cluster and one column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricalStats {
    counts: Vec<u32>,
    total: u32,
}

impl CategoricalStats {
    pub fn new(k: usize) -> Self {
        CategoricalStats {
            counts: vec![0; k],
            total: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, x: usize) -> u32 {
        self.counts[x]
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn add(&mut self, x: usize) {
        self.counts[x] += 1;
        self.total += 1;
    }

    pub fn remove(&mut self, x: usize) {
        assert!(self.counts[x] > 0, "removing unobserved category {x}");
        self.counts[x] -= 1;
        self.total -= 1;
    }
}

/// Log posterior predictive of category `x`: log((N_x + c_x) / (N + C)).
pub fn log_postpred(prior: &DirichletParams, stats: &CategoricalStats, x: usize) -> Result<f64> {
    if prior.k() != stats.k() {
        return Err(Error::invalid(format!(
            "category count mismatch: prior k={}, stats k={}",
            prior.k(),
            stats.k()
        )));
    }
    if x >= prior.k() {
        return Err(Error::invalid(format!(
            "category index {x} out of range for k={}",
            prior.k()
        )));
    }
    let num = stats.count(x) as f64 + prior.pseudocount(x);
    let den = stats.total() as f64 + prior.total();
    Ok(num.ln() - den.ln())
}

/// Closed-form log marginal likelihood of the observed counts:
/// log B(c + N) − log B(c), the Dirichlet-multinomial evidence for the
/// observation sequence. Exactly 0 for empty stats.
pub fn log_marginal(prior: &DirichletParams, stats: &CategoricalStats) -> f64 {
    debug_assert_eq!(prior.k(), stats.k());
    if stats.total() == 0 {
        return 0.0;
    }
    let mut acc = ln_gamma(prior.total()) - ln_gamma(prior.total() + stats.total() as f64);
    for (c, n) in prior.pseudocounts().iter().zip(&stats.counts) {
        if *n > 0 {
            acc += ln_gamma(c + *n as f64) - ln_gamma(*c);
        }
    }
    acc
}
