//! Clustering state: assignments, per-cluster sufficient statistics, priors.
//!
//! The likelihood being maximized is the product over clusters of the
//! marginal likelihood of the rows assigned to that cluster, with the
//! distribution parameters integrated out analytically (columns independent).
//! Reassigning one row to the cluster maximizing its leave-one-out posterior
//! predictive therefore never decreases this likelihood: the change from
//! moving row i between clusters a and b is exactly
//! `postpred_b(row) − postpred_a(row)` by the chain rule.

mod engine;
mod fit;

pub(crate) use engine::Engine;
pub use fit::{fit_k, fit_path, grow_k, random_assignment, ClusteringResult, FitOptions, Init};

use crate::bayes::{categorical, numeric};
use crate::bayes::{CategoricalStats, DirichletParams, NormalGammaParams, NumericStats};
use crate::data::{Column, ColumnKind, Dataset};
use crate::error::{Error, Result};
use crate::math::mean_std;

/// Per-column prior parameters.
#[derive(Debug, Clone)]
pub enum ColumnPrior {
    Categorical(DirichletParams),
    Numeric(NormalGammaParams),
}

/// One prior per column, aligned with the dataset schema.
#[derive(Debug, Clone)]
pub struct Priors {
    columns: Vec<ColumnPrior>,
}

impl Priors {
    pub fn new(columns: Vec<ColumnPrior>) -> Self {
        Priors { columns }
    }

    /// Weakly-informative, scale-adapted defaults: uniform Dirichlet
    /// pseudocounts (c = 1) for categorical columns; for numeric columns
    /// μ0 = column mean, β0 = 1, a0 = 1, b0 = half the column variance
    /// (floored at 1e-6, which keeps constant columns legal).
    pub fn default_for(data: &Dataset) -> Priors {
        let columns = (0..data.n_columns())
            .map(|c| match data.column(c) {
                Column::Categorical(_) => {
                    let k = data.schema().column_kind(c).arity();
                    ColumnPrior::Categorical(DirichletParams::uniform(k).expect("k >= 2"))
                }
                Column::Numeric { values, .. } => {
                    let (mean, std) = mean_std(values);
                    let b0 = (0.5 * std * std).max(1e-6);
                    ColumnPrior::Numeric(
                        NormalGammaParams::new(mean, 1.0, 1.0, b0).expect("valid prior"),
                    )
                }
            })
            .collect();
        Priors { columns }
    }

    pub fn columns(&self) -> &[ColumnPrior] {
        &self.columns
    }

    pub fn column(&self, idx: usize) -> &ColumnPrior {
        &self.columns[idx]
    }

    /// Checks that the priors line up with the dataset's columns.
    pub fn validate_for(&self, data: &Dataset) -> Result<()> {
        if self.columns.len() != data.n_columns() {
            return Err(Error::invalid(format!(
                "priors cover {} columns, dataset has {}",
                self.columns.len(),
                data.n_columns()
            )));
        }
        for (idx, prior) in self.columns.iter().enumerate() {
            match (prior, data.schema().column_kind(idx)) {
                (ColumnPrior::Categorical(d), ColumnKind::Categorical { labels }) => {
                    if d.k() != labels.len() {
                        return Err(Error::invalid(format!(
                            "column {idx}: prior has k={}, schema has k={}",
                            d.k(),
                            labels.len()
                        )));
                    }
                }
                (ColumnPrior::Numeric(_), ColumnKind::Numeric) => {}
                _ => {
                    return Err(Error::invalid(format!(
                        "column {idx}: prior kind does not match schema"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Per-column sufficient statistics of one cluster.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnStats {
    Categorical(CategoricalStats),
    Numeric(NumericStats),
}

/// Reduced statistics for all columns of one cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSuffStats {
    pub columns: Vec<ColumnStats>,
    pub member_count: usize,
}

impl ClusterSuffStats {
    pub fn empty(data: &Dataset) -> Self {
        let columns = (0..data.n_columns())
            .map(|c| match data.column(c) {
                Column::Categorical(_) => ColumnStats::Categorical(CategoricalStats::new(
                    data.schema().column_kind(c).arity(),
                )),
                Column::Numeric { .. } => ColumnStats::Numeric(NumericStats::new()),
            })
            .collect();
        ClusterSuffStats {
            columns,
            member_count: 0,
        }
    }

    pub fn add_row(&mut self, data: &Dataset, row: usize) {
        for (c, stats) in self.columns.iter_mut().enumerate() {
            match stats {
                ColumnStats::Categorical(s) => s.add(data.cat_code(row, c) as usize),
                ColumnStats::Numeric(s) => s.add(data.num_value(row, c)),
            }
        }
        self.member_count += 1;
    }

    pub fn remove_row(&mut self, data: &Dataset, row: usize) {
        for (c, stats) in self.columns.iter_mut().enumerate() {
            match stats {
                ColumnStats::Categorical(s) => s.remove(data.cat_code(row, c) as usize),
                ColumnStats::Numeric(s) => s.remove(data.num_value(row, c)),
            }
        }
        self.member_count -= 1;
    }

    /// Σ over columns of the closed-form log marginal; 0 for an empty cluster.
    pub fn log_marginal(&self, priors: &Priors) -> f64 {
        self.columns
            .iter()
            .zip(priors.columns())
            .map(|(stats, prior)| match (stats, prior) {
                (ColumnStats::Categorical(s), ColumnPrior::Categorical(p)) => {
                    categorical::log_marginal(p, s)
                }
                (ColumnStats::Numeric(s), ColumnPrior::Numeric(p)) => numeric::log_marginal(p, s),
                _ => unreachable!("prior/stats kind mismatch"),
            })
            .sum()
    }
}

/// A clustering: K, the assignment vector, per-cluster statistics, priors,
/// and the cached total log-likelihood.
#[derive(Debug, Clone)]
pub struct ClusterState {
    k: usize,
    assignment: Vec<usize>,
    clusters: Vec<ClusterSuffStats>,
    priors: Priors,
    log_lik: f64,
}

impl ClusterState {
    pub fn new(data: &Dataset, priors: Priors, k: usize, assignment: Vec<usize>) -> Result<Self> {
        if k < 1 {
            return Err(Error::invalid("need at least one cluster"));
        }
        priors.validate_for(data)?;
        if assignment.len() != data.n_rows() {
            return Err(Error::invalid(format!(
                "assignment covers {} rows, dataset has {}",
                assignment.len(),
                data.n_rows()
            )));
        }
        if let Some(bad) = assignment.iter().find(|&&a| a >= k) {
            return Err(Error::invalid(format!(
                "assignment value {bad} out of range for K={k}"
            )));
        }
        let mut clusters = vec![ClusterSuffStats::empty(data); k];
        for (row, &j) in assignment.iter().enumerate() {
            clusters[j].add_row(data, row);
        }
        let log_lik = clusters.iter().map(|c| c.log_marginal(&priors)).sum();
        Ok(ClusterState {
            k,
            assignment,
            clusters,
            priors,
            log_lik,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_rows(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn clusters(&self) -> &[ClusterSuffStats] {
        &self.clusters
    }

    pub fn priors(&self) -> &Priors {
        &self.priors
    }

    /// Cached total log-likelihood (Σ over clusters of column marginals).
    pub fn log_lik(&self) -> f64 {
        self.log_lik
    }

    /// Recomputes the total log-likelihood from the sufficient statistics.
    pub fn compute_log_lik(&self) -> f64 {
        self.clusters
            .iter()
            .map(|c| c.log_marginal(&self.priors))
            .sum()
    }

    pub(crate) fn set_log_lik(&mut self, value: f64) {
        self.log_lik = value;
    }

    /// Leave-one-out predictive score of `row` against `target`: the summed
    /// log posterior predictives of the row's values under the target
    /// cluster's posterior, with the row's own contribution excluded from
    /// the statistics when target is its current cluster.
    pub fn score_row(&self, data: &Dataset, row: usize, target: usize) -> Result<f64> {
        if row >= data.n_rows() {
            return Err(Error::invalid(format!("row {row} out of range")));
        }
        if target >= self.k {
            return Err(Error::invalid(format!("cluster {target} out of range")));
        }
        let leave_out = self.assignment[row] == target;
        let mut total = 0.0;
        for (c, prior) in self.priors.columns().iter().enumerate() {
            match (prior, &self.clusters[target].columns[c]) {
                (ColumnPrior::Categorical(p), ColumnStats::Categorical(s)) => {
                    let x = data.cat_code(row, c) as usize;
                    let mut s = s.clone();
                    if leave_out {
                        s.remove(x);
                    }
                    total += categorical::log_postpred(p, &s, x)?;
                }
                (ColumnPrior::Numeric(p), ColumnStats::Numeric(s)) => {
                    let x = data.num_value(row, c);
                    let mut s = *s;
                    if leave_out {
                        s.remove(x);
                    }
                    total += numeric::log_postpred(&numeric::update(p, &s), x);
                }
                _ => unreachable!("prior/stats kind mismatch"),
            }
        }
        Ok(total)
    }

    /// Moves a row to `target`, updating statistics and the cached
    /// log-likelihood. No-op when the row is already there.
    pub fn reassign(&mut self, data: &Dataset, row: usize, target: usize) -> Result<()> {
        if row >= data.n_rows() {
            return Err(Error::invalid(format!("row {row} out of range")));
        }
        if target >= self.k {
            return Err(Error::invalid(format!("cluster {target} out of range")));
        }
        let home = self.assignment[row];
        if home == target {
            return Ok(());
        }
        let before = self.clusters[home].log_marginal(&self.priors)
            + self.clusters[target].log_marginal(&self.priors);
        self.clusters[home].remove_row(data, row);
        self.clusters[target].add_row(data, row);
        self.assignment[row] = target;
        let after = self.clusters[home].log_marginal(&self.priors)
            + self.clusters[target].log_marginal(&self.priors);
        self.log_lik += after - before;
        Ok(())
    }

    /// Drops empty clusters, relabelling the survivors in ascending order.
    /// Returns the number of clusters removed.
    pub fn drop_empty_clusters(&mut self) -> usize {
        let keep: Vec<usize> = (0..self.k)
            .filter(|&j| self.clusters[j].member_count > 0)
            .collect();
        if keep.len() == self.k || keep.is_empty() {
            return 0;
        }
        let mut relabel = vec![usize::MAX; self.k];
        for (new, &old) in keep.iter().enumerate() {
            relabel[old] = new;
        }
        self.clusters = keep.iter().map(|&old| self.clusters[old].clone()).collect();
        for a in &mut self.assignment {
            *a = relabel[*a];
        }
        let dropped = self.k - keep.len();
        self.k = keep.len();
        dropped
    }

    /// Verifies that incrementally maintained statistics and the cached
    /// log-likelihood match a from-scratch rebuild, within 1e-9.
    pub fn verify_consistency(&self, data: &Dataset) -> std::result::Result<(), String> {
        let rebuilt = ClusterState::new(data, self.priors.clone(), self.k, self.assignment.clone())
            .map_err(|e| e.to_string())?;
        for (j, (a, b)) in self.clusters.iter().zip(&rebuilt.clusters).enumerate() {
            if a.member_count != b.member_count {
                return Err(format!(
                    "cluster {j}: member count {} vs rebuilt {}",
                    a.member_count, b.member_count
                ));
            }
            for (c, (sa, sb)) in a.columns.iter().zip(&b.columns).enumerate() {
                match (sa, sb) {
                    (ColumnStats::Categorical(x), ColumnStats::Categorical(y)) => {
                        if x != y {
                            return Err(format!("cluster {j}, column {c}: counts diverged"));
                        }
                    }
                    (ColumnStats::Numeric(x), ColumnStats::Numeric(y)) => {
                        if x.n() != y.n()
                            || (x.sum() - y.sum()).abs() > 1e-9 * y.sum().abs().max(1.0)
                            || (x.sum_sq() - y.sum_sq()).abs() > 1e-9 * y.sum_sq().abs().max(1.0)
                        {
                            return Err(format!(
                                "cluster {j}, column {c}: numeric stats diverged ({x:?} vs {y:?})"
                            ));
                        }
                    }
                    _ => return Err(format!("cluster {j}, column {c}: kind mismatch")),
                }
            }
        }
        let fresh = rebuilt.log_lik;
        if (self.log_lik - fresh).abs() > 1e-9 * fresh.abs().max(1.0) {
            return Err(format!(
                "cached log-likelihood {} vs rebuilt {}",
                self.log_lik, fresh
            ));
        }
        Ok(())
    }
}

/// Total clustering log-likelihood (Σ_j Σ_columns column log marginal).
pub fn cluster_log_lik(state: &ClusterState) -> f64 {
    state.log_lik()
}

/// One sequential reassignment pass: each row in order moves to the cluster
/// maximizing its leave-one-out predictive (ties: current cluster first,
/// then lowest index), with statistics updated move by move. Returns the
/// updated state and the number of rows that changed cluster.
pub fn em_pass(data: &Dataset, state: ClusterState) -> Result<(ClusterState, usize)> {
    if state.n_rows() != data.n_rows() {
        return Err(Error::invalid(format!(
            "state covers {} rows, dataset has {}",
            state.n_rows(),
            data.n_rows()
        )));
    }
    state.priors().validate_for(data)?;
    let mut engine = Engine::new(data, state);
    let moved = engine.em_pass();
    Ok((engine.into_state(), moved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{RawColumn, Schema};

    fn binary_dataset(codes: Vec<u32>) -> Dataset {
        let schema = Schema::parse("b,cat,0,1\n").unwrap();
        Dataset::from_parts(schema, vec![RawColumn::Categorical(codes)], true).unwrap()
    }

    #[test]
    fn single_cluster_binary_marginal() {
        // Counts (1,1) with a uniform prior: B((2,2))/B((1,1)) = 1/6.
        let data = binary_dataset(vec![0, 1]);
        let priors = Priors::default_for(&data);
        let state = ClusterState::new(&data, priors, 1, vec![0, 0]).unwrap();
        assert!((cluster_log_lik(&state) - (1.0_f64 / 6.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn empty_clusters_contribute_nothing() {
        let data = binary_dataset(vec![0, 1, 1]);
        let priors = Priors::default_for(&data);
        let one = ClusterState::new(&data, priors.clone(), 1, vec![0, 0, 0]).unwrap();
        let padded = ClusterState::new(&data, priors, 4, vec![2, 2, 2]).unwrap();
        assert!((one.log_lik() - padded.log_lik()).abs() < 1e-12);
    }

    #[test]
    fn log_lik_invariant_under_label_permutation() {
        let data = binary_dataset(vec![0, 1, 1, 0, 0]);
        let priors = Priors::default_for(&data);
        let a = ClusterState::new(&data, priors.clone(), 2, vec![0, 1, 1, 0, 0]).unwrap();
        let b = ClusterState::new(&data, priors, 2, vec![1, 0, 0, 1, 1]).unwrap();
        assert!((a.log_lik() - b.log_lik()).abs() < 1e-12);
    }

    #[test]
    fn score_row_singleton_equals_prior_predictive() {
        let data = binary_dataset(vec![0]);
        let priors = Priors::default_for(&data);
        let state = ClusterState::new(&data, priors, 1, vec![0]).unwrap();
        let score = state.score_row(&data, 0, 0).unwrap();
        assert!((score - 0.5_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn score_row_against_empty_cluster_is_prior_predictive() {
        let data = binary_dataset(vec![0, 0]);
        let priors = Priors::default_for(&data);
        let state = ClusterState::new(&data, priors, 2, vec![0, 0]).unwrap();
        let score = state.score_row(&data, 0, 1).unwrap();
        assert!((score - 0.5_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn matching_rows_raise_scores() {
        // Counts (3,0) vs (1,0): log(4/5) > log(2/3) for a matching row.
        let data = binary_dataset(vec![0, 0, 0, 0, 0]);
        let priors = Priors::default_for(&data);
        let big = ClusterState::new(&data, priors.clone(), 2, vec![0, 0, 0, 1, 1]).unwrap();
        let small = ClusterState::new(&data, priors, 2, vec![0, 1, 1, 1, 1]).unwrap();
        let s_big = big.score_row(&data, 4, 0).unwrap();
        let s_small = small.score_row(&data, 4, 0).unwrap();
        assert!((s_big - (4.0_f64 / 5.0).ln()).abs() < 1e-12);
        assert!((s_small - (2.0_f64 / 3.0).ln()).abs() < 1e-12);
        assert!(s_big > s_small);
    }

    #[test]
    fn public_em_pass_reaches_a_fixed_point() {
        let data = binary_dataset(vec![0, 0, 0, 1, 1, 1]);
        let priors = Priors::default_for(&data);
        let state = ClusterState::new(&data, priors, 2, vec![0, 1, 0, 1, 0, 1]).unwrap();
        let (state, moved_first) = em_pass(&data, state).unwrap();
        assert!(moved_first > 0);
        let before = state.assignment().to_vec();
        // Iterate to convergence, then one more pass must be a no-op.
        let mut state = state;
        loop {
            let (next, moved) = em_pass(&data, state).unwrap();
            state = next;
            if moved == 0 {
                break;
            }
        }
        let (fixed, moved) = em_pass(&data, state).unwrap();
        assert_eq!(moved, 0);
        assert!(fixed.verify_consistency(&data).is_ok());
        let _ = before;
    }

    #[test]
    fn reassign_updates_cache_and_drop_relabels() {
        let data = binary_dataset(vec![0, 1, 1, 0]);
        let priors = Priors::default_for(&data);
        let mut state = ClusterState::new(&data, priors, 3, vec![0, 0, 2, 2]).unwrap();
        state.reassign(&data, 1, 2).unwrap();
        assert!(state.verify_consistency(&data).is_ok());
        state.reassign(&data, 0, 2).unwrap();
        // Cluster 0 and 1 now empty.
        let dropped = state.drop_empty_clusters();
        assert_eq!(dropped, 2);
        assert_eq!(state.k(), 1);
        assert_eq!(state.assignment(), &[0, 0, 0, 0]);
        assert!(state.verify_consistency(&data).is_ok());
    }
}
