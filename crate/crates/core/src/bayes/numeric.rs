//! Normal-Gamma prior over numeric columns.
//!
//! The prior on (μ, λ) with λ the precision is N(μ | μ0, (β0 λ)^-1) ·
//! Gamma(λ | a0, b0). Posterior updates, the Student-t posterior predictive,
//! and the marginal likelihood are all closed-form.

use crate::error::{Error, Result};
use crate::math::{ln_gamma, LN_2PI, LN_PI};

/// Normal-Gamma hyperparameters (μ0, β0, a0, b0); posteriors reuse the type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalGammaParams {
    pub mu: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
}

impl NormalGammaParams {
    pub fn new(mu: f64, beta: f64, a: f64, b: f64) -> Result<Self> {
        if !mu.is_finite() || !beta.is_finite() || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid("Normal-Gamma parameters must be finite"));
        }
        if beta <= 0.0 || a <= 0.0 || b <= 0.0 {
            return Err(Error::invalid(format!(
                "Normal-Gamma parameters require beta, a, b > 0; got ({beta}, {a}, {b})"
            )));
        }
        Ok(NormalGammaParams { mu, beta, a, b })
    }
}

/// Reduced statistics (n, Σx, Σx²) for the observations of one cluster/column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericStats {
    n: u32,
    sum: f64,
    sum_sq: f64,
}

impl NumericStats {
    pub fn new() -> Self {
        NumericStats {
            n: 0,
            sum: 0.0,
            sum_sq: 0.0,
        }
    }

    pub fn from_values(values: &[f64]) -> Self {
        let mut s = NumericStats::new();
        for &x in values {
            s.add(x);
        }
        s
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub fn sum_sq(&self) -> f64 {
        self.sum_sq
    }

    pub fn add(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn remove(&mut self, x: f64) {
        assert!(self.n > 0, "removing from empty stats");
        self.n -= 1;
        if self.n == 0 {
            self.sum = 0.0;
            self.sum_sq = 0.0;
        } else {
            self.sum -= x;
            self.sum_sq -= x * x;
        }
    }

    /// Within-data sum of squares Σ(x_i − x̄)², clamped at zero against
    /// cancellation (inputs are standardized at ingest, which keeps the
    /// cancellation error tiny relative to the clamp).
    pub fn centered_sum_sq(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.sum_sq - self.sum * self.sum / self.n as f64).max(0.0)
    }
}

impl Default for NumericStats {
    fn default() -> Self {
        Self::new()
    }
}

/// Posterior (μ_n, β_n, a_n, b_n) after observing `stats` under `prior`.
///
/// n = 0 returns the prior unchanged.
pub fn update(prior: &NormalGammaParams, stats: &NumericStats) -> NormalGammaParams {
    let n = stats.n() as f64;
    if stats.n() == 0 {
        return *prior;
    }
    let mean = stats.sum() / n;
    let beta_n = prior.beta + n;
    let shift = mean - prior.mu;
    NormalGammaParams {
        mu: (prior.beta * prior.mu + stats.sum()) / beta_n,
        beta: beta_n,
        a: prior.a + 0.5 * n,
        b: prior.b
            + 0.5 * stats.centered_sum_sq()
            + prior.beta * n * shift * shift / (2.0 * beta_n),
    }
}

/// Log posterior predictive density of a single new observation `x`.
///
/// A Student-t with 2·a_n degrees of freedom, location μ_n, and precision
/// factor Λ = a_n β_n / (b_n (β_n + 1)):
///
/// log p(x) = −½ log π + log Γ(a_n + ½) − log Γ(a_n) + ½(log Λ − log 2a_n)
///            − (a_n + ½) log(1 + Λ(x − μ_n)² / 2a_n)
pub fn log_postpred(post: &NormalGammaParams, x: f64) -> f64 {
    let lambda = post.a * post.beta / (post.b * (post.beta + 1.0));
    let half = 0.5;
    let scaled = lambda * (x - post.mu) * (x - post.mu) / (2.0 * post.a);
    -half * LN_PI + ln_gamma(post.a + half) - ln_gamma(post.a)
        + half * (lambda.ln() - (2.0 * post.a).ln())
        - (post.a + half) * scaled.ln_1p()
}

/// Closed-form log marginal likelihood of the observations in `stats`:
///
/// log p(D) = log Γ(a_n) − log Γ(a_0) + a_0 log b_0 − a_n log b_n
///            + ½(log β_0 − log β_n) − (n/2) log 2π
///
/// Exactly 0 for n = 0.
pub fn log_marginal(prior: &NormalGammaParams, stats: &NumericStats) -> f64 {
    if stats.n() == 0 {
        return 0.0;
    }
    let post = update(prior, stats);
    ln_gamma(post.a) - ln_gamma(prior.a) + prior.a * prior.b.ln() - post.a * post.b.ln()
        + 0.5 * (prior.beta.ln() - post.beta.ln())
        - 0.5 * stats.n() as f64 * LN_2PI
}
