//! L2-regularized logistic regression by gradient descent with backtracking
//! line search, and the Mann-Whitney AUC.

use crate::error::{Error, Result};
use crate::eval::Design;

#[derive(Debug, Clone)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
    pub final_loss: f64,
    /// Loss after each accepted step; non-increasing by construction.
    pub loss_trace: Vec<f64>,
}

impl LogisticModel {
    pub fn decision(&self, features: &[f64]) -> f64 {
        self.intercept
            + features
                .iter()
                .zip(&self.weights)
                .map(|(x, w)| x * w)
                .sum::<f64>()
    }

    pub fn predict_proba(&self, design: &Design) -> Vec<f64> {
        (0..design.n_rows)
            .map(|i| sigmoid(self.decision(design.row(i))))
            .collect()
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z), stable for large |z|.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn loss_and_gradient(
    design: &Design,
    y: &[f64],
    weights: &[f64],
    intercept: f64,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let p = design.width;
    let mut grad_w = vec![0.0; p];
    let mut grad_b = 0.0;
    let mut loss = 0.0;
    for (i, &target) in y.iter().enumerate().take(design.n_rows) {
        let row = design.row(i);
        let z = intercept + row.iter().zip(weights).map(|(x, w)| x * w).sum::<f64>();
        // −[y ln σ(z) + (1−y) ln(1−σ(z))] = softplus(z) − y·z
        loss += softplus(z) - target * z;
        let resid = sigmoid(z) - target;
        grad_b += resid;
        for (g, x) in grad_w.iter_mut().zip(row) {
            *g += resid * x;
        }
    }
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g += l2 * w;
    }
    loss += 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
    (loss, grad_w, grad_b)
}

/// Minimizes the L2-regularized negative log-likelihood (intercept not
/// penalized) from a zero start, stopping at gradient norm ≤ 1e-6 or
/// `max_iter`. Deterministic.
pub fn logistic_fit(design: &Design, y: &[f64], l2: f64, max_iter: usize) -> Result<LogisticModel> {
    if y.len() != design.n_rows {
        return Err(Error::invalid(format!(
            "{} labels for {} rows",
            y.len(),
            design.n_rows
        )));
    }
    if y.iter().any(|v| *v != 0.0 && *v != 1.0) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    let positives = y.iter().filter(|v| **v == 1.0).count();
    if positives == 0 || positives == y.len() {
        return Err(Error::invalid("need at least one row of each class"));
    }
    if l2 < 0.0 {
        return Err(Error::invalid("l2 must be >= 0"));
    }

    let p = design.width;
    let mut weights = vec![0.0; p];
    let mut intercept = 0.0;
    let (mut loss, mut grad_w, mut grad_b) = loss_and_gradient(design, y, &weights, intercept, l2);
    let mut loss_trace = vec![loss];
    let mut step = 1.0 / design.n_rows as f64;
    let mut iterations = 0;

    for _ in 0..max_iter {
        let grad_norm = (grad_w.iter().map(|g| g * g).sum::<f64>() + grad_b * grad_b).sqrt();
        if grad_norm <= 1e-6 {
            break;
        }
        // Backtracking from a slightly enlarged previous step (Armijo).
        let mut t = (step * 2.0).min(1e6);
        let accepted = loop {
            let cand_w: Vec<f64> = weights
                .iter()
                .zip(&grad_w)
                .map(|(w, g)| w - t * g)
                .collect();
            let cand_b = intercept - t * grad_b;
            let (cand_loss, cand_gw, cand_gb) = loss_and_gradient(design, y, &cand_w, cand_b, l2);
            if cand_loss <= loss - 1e-4 * t * grad_norm * grad_norm {
                break Some((cand_w, cand_b, cand_loss, cand_gw, cand_gb));
            }
            t *= 0.5;
            if t < 1e-18 {
                break None;
            }
        };
        match accepted {
            Some((w, b, l, gw, gb)) => {
                weights = w;
                intercept = b;
                loss = l;
                grad_w = gw;
                grad_b = gb;
                step = t;
                loss_trace.push(loss);
                iterations += 1;
            }
            None => break,
        }
    }

    if !loss.is_finite() || weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Numerical("logistic fit diverged".into()));
    }
    Ok(LogisticModel {
        weights,
        intercept,
        iterations,
        final_loss: loss,
        loss_trace,
    })
}

/// Area under the ROC curve via the Mann-Whitney statistic with midrank tie
/// handling (ties count one half).
pub fn auc(scores: &[f64], labels: &[f64]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::invalid("scores and labels differ in length"));
    }
    if labels.iter().any(|v| *v != 0.0 && *v != 1.0) {
        return Err(Error::invalid("labels must be 0 or 1"));
    }
    let n_pos = labels.iter().filter(|v| **v == 1.0).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::invalid("need both classes for AUC"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap().then(a.cmp(&b)));
    // Midranks over tie groups.
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            if labels[idx] == 1.0 {
                rank_sum_pos += midrank;
            }
        }
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos as f64) * (n_pos as f64 + 1.0) / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}
