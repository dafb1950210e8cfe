//! Conjugate-prior kernels for the two supported column kinds.
//!
//! Categorical columns use a Dirichlet prior, numeric columns a Normal-Gamma
//! prior. Both admit closed-form posterior predictives and marginal
//! likelihoods, which is what lets the clustering engine integrate the
//! distribution parameters out instead of estimating them. Everything is
//! computed in log space.

pub mod categorical;
pub mod numeric;

pub use categorical::{CategoricalStats, DirichletParams};
pub use numeric::{NormalGammaParams, NumericStats};

#[cfg(test)]
mod chain_rule_tests {
    //! Exchangeability oracle: for both column kinds the closed-form log
    //! marginal must equal the sum of sequential log posterior predictives,
    //! for every permutation of the data.

    use super::*;

    fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut tail in permutations(&rest) {
                tail.insert(0, head.clone());
                out.push(tail);
            }
        }
        out
    }

    #[test]
    fn categorical_marginal_equals_sequential_predictives_all_orders() {
        let prior = DirichletParams::uniform(3).unwrap();
        let data = [0usize, 2, 2, 1, 0];
        let mut stats = CategoricalStats::new(3);
        for &x in &data {
            stats.add(x);
        }
        let closed = categorical::log_marginal(&prior, &stats);
        for perm in permutations(&data) {
            let mut running = CategoricalStats::new(3);
            let mut total = 0.0;
            for &x in &perm {
                total += categorical::log_postpred(&prior, &running, x).unwrap();
                running.add(x);
            }
            assert!(
                (closed - total).abs() < 1e-9,
                "order {perm:?}: closed {closed} vs sequential {total}"
            );
        }
    }

    #[test]
    fn numeric_marginal_equals_sequential_predictives_all_orders() {
        let prior = NormalGammaParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
        let data = [0.3, -1.2, 2.2, 0.05];
        let mut stats = NumericStats::new();
        for &x in &data {
            stats.add(x);
        }
        let closed = numeric::log_marginal(&prior, &stats);
        for perm in permutations(&data) {
            let mut running = NumericStats::new();
            let mut total = 0.0;
            for &x in &perm {
                let post = numeric::update(&prior, &running);
                total += numeric::log_postpred(&post, x);
                running.add(x);
            }
            assert!(
                (closed - total).abs() < 1e-9,
                "order {perm:?}: closed {closed} vs sequential {total}"
            );
        }
    }
}
