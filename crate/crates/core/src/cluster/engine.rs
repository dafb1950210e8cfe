//! Hot-path scorer behind EM passes, Gibbs sweeps, and exact enumeration.
//!
//! Keeps a posterior-predictive cache per (cluster, column) so scoring a row
//! against a cluster costs table lookups plus one `ln_1p` per numeric column.
//! Log-Gamma values on the posterior grids (a0 + n/2) are precomputed per
//! column, so cache rebuilds after a row move involve at most one `ln` call
//! per numeric column and none for categorical columns.
//!
//! The cached fast path must agree with the reference kernels in
//! `crate::bayes`; a unit test below pins that to 1e-12.

use rand::Rng;

use crate::bayes::NormalGammaParams;
use crate::cluster::{ClusterState, ColumnPrior, ColumnStats};
use crate::data::{Column, Dataset};
use crate::math::{ln_gamma, LN_PI};

/// Borrowed column data, pre-split by kind for branch-cheap access.
enum ColData<'d> {
    Cat(&'d [u32]),
    Num(&'d [f64]),
}

/// Per-column precomputed tables.
enum ColTables {
    Cat {
        /// ln(c_x + m) for each category x and count m in 0..=N.
        ln_num: Vec<Vec<f64>>,
        /// ln(C + m) for total count m in 0..=N.
        ln_den: Vec<f64>,
    },
    Num {
        /// ln Γ(a0 + m/2) for m in 0..=N+1.
        ln_gamma_grid: Vec<f64>,
        prior: NormalGammaParams,
    },
}

/// Cached posterior predictive for one (cluster, column) pair.
#[derive(Clone)]
enum PredEntry {
    Cat {
        /// Log posterior predictive per category.
        lp: Vec<f64>,
    },
    Num {
        mu: f64,
        /// Λ / (2 a_n); the predictive is konst − expo·ln1p(coef·(x−μ)²).
        coef: f64,
        expo: f64,
        konst: f64,
    },
}

impl PredEntry {
    #[inline]
    fn eval_cat(&self, code: u32) -> f64 {
        match self {
            PredEntry::Cat { lp } => lp[code as usize],
            PredEntry::Num { .. } => unreachable!(),
        }
    }

    #[inline]
    fn eval_num(&self, x: f64) -> f64 {
        match self {
            PredEntry::Num {
                mu,
                coef,
                expo,
                konst,
            } => {
                let d = x - mu;
                konst - expo * (coef * d * d).ln_1p()
            }
            PredEntry::Cat { .. } => unreachable!(),
        }
    }
}

pub(crate) struct Engine<'d> {
    data: &'d Dataset,
    cols: Vec<ColData<'d>>,
    tables: Vec<ColTables>,
    /// K × L entries, row-major by cluster.
    entries: Vec<PredEntry>,
    pub(crate) state: ClusterState,
    /// Number of clusters with zero members (used by exact enumeration).
    n_empty: usize,
    weights: Vec<f64>,
    probs: Vec<f64>,
}

impl<'d> Engine<'d> {
    pub(crate) fn new(data: &'d Dataset, state: ClusterState) -> Self {
        let n = data.n_rows();
        let cols: Vec<ColData> = (0..data.n_columns())
            .map(|c| match data.column(c) {
                Column::Categorical(codes) => ColData::Cat(codes),
                Column::Numeric { values, .. } => ColData::Num(values),
            })
            .collect();
        let tables: Vec<ColTables> = state
            .priors()
            .columns()
            .iter()
            .map(|prior| match prior {
                ColumnPrior::Categorical(p) => {
                    let ln_num = (0..p.k())
                        .map(|x| {
                            (0..=n)
                                .map(|m| (p.pseudocount(x) + m as f64).ln())
                                .collect()
                        })
                        .collect();
                    let ln_den = (0..=n).map(|m| (p.total() + m as f64).ln()).collect();
                    ColTables::Cat { ln_num, ln_den }
                }
                ColumnPrior::Numeric(p) => {
                    let ln_gamma_grid = (0..=n + 1)
                        .map(|m| ln_gamma(p.a + 0.5 * m as f64))
                        .collect();
                    ColTables::Num {
                        ln_gamma_grid,
                        prior: *p,
                    }
                }
            })
            .collect();
        let k = state.k();
        let n_cols = cols.len();
        let mut engine = Engine {
            data,
            cols,
            tables,
            entries: Vec::with_capacity(k * n_cols),
            state,
            n_empty: 0,
            weights: vec![0.0; k],
            probs: vec![0.0; k],
        };
        engine.rebuild_all_entries();
        engine
    }

    pub(crate) fn into_state(self) -> ClusterState {
        self.state
    }

    pub(crate) fn n_empty_clusters(&self) -> usize {
        self.n_empty
    }

    fn rebuild_all_entries(&mut self) {
        self.entries.clear();
        let k = self.state.k();
        let n_cols = self.cols.len();
        for j in 0..k {
            for c in 0..n_cols {
                let entry = self.make_entry(j, c);
                self.entries.push(entry);
            }
        }
        self.n_empty = self
            .state
            .clusters()
            .iter()
            .filter(|cl| cl.member_count == 0)
            .count();
    }

    fn make_entry(&self, cluster: usize, col: usize) -> PredEntry {
        let stats = &self.state.clusters()[cluster].columns[col];
        match (&self.tables[col], stats) {
            (ColTables::Cat { ln_num, ln_den }, ColumnStats::Categorical(s)) => {
                let den = ln_den[s.total() as usize];
                let lp = (0..s.k())
                    .map(|x| ln_num[x][s.count(x) as usize] - den)
                    .collect();
                PredEntry::Cat { lp }
            }
            (
                ColTables::Num {
                    ln_gamma_grid,
                    prior,
                },
                ColumnStats::Numeric(s),
            ) => {
                let n = s.n() as usize;
                let post = crate::bayes::numeric::update(prior, s);
                let coef = post.beta / (2.0 * post.b * (post.beta + 1.0));
                let konst =
                    -0.5 * LN_PI + (ln_gamma_grid[n + 1] - ln_gamma_grid[n]) + 0.5 * coef.ln();
                PredEntry::Num {
                    mu: post.mu,
                    coef,
                    expo: post.a + 0.5,
                    konst,
                }
            }
            _ => unreachable!("table/stats kind mismatch"),
        }
    }

    fn refresh_cluster(&mut self, cluster: usize) {
        let n_cols = self.cols.len();
        for c in 0..n_cols {
            self.entries[cluster * n_cols + c] = self.make_entry(cluster, c);
        }
    }

    /// Removes `row` from its current cluster (stats + caches). The row is
    /// temporarily unassigned; callers must insert it again.
    pub(crate) fn remove_row(&mut self, row: usize) {
        let home = self.state.assignment[row];
        self.state.clusters[home].remove_row(self.data, row);
        if self.state.clusters[home].member_count == 0 {
            self.n_empty += 1;
        }
        self.refresh_cluster(home);
    }

    /// Inserts `row` into `cluster` (stats + caches + assignment).
    pub(crate) fn insert_row(&mut self, row: usize, cluster: usize) {
        if self.state.clusters[cluster].member_count == 0 {
            self.n_empty -= 1;
        }
        self.state.clusters[cluster].add_row(self.data, row);
        self.state.assignment[row] = cluster;
        self.refresh_cluster(cluster);
    }

    /// Summed log posterior predictive of a whole row under one cluster's
    /// cached posterior. With the row currently removed this is the
    /// leave-one-out score.
    #[inline]
    pub(crate) fn row_predictive(&self, row: usize, cluster: usize) -> f64 {
        let n_cols = self.cols.len();
        let base = cluster * n_cols;
        let mut total = 0.0;
        for (c, col) in self.cols.iter().enumerate() {
            match col {
                ColData::Cat(codes) => total += self.entries[base + c].eval_cat(codes[row]),
                ColData::Num(values) => total += self.entries[base + c].eval_num(values[row]),
            }
        }
        total
    }

    /// Recomputes Σ_j Σ_columns log marginal from the sufficient statistics.
    pub(crate) fn log_lik_from_stats(&self) -> f64 {
        self.state
            .clusters()
            .iter()
            .map(|c| c.log_marginal(self.state.priors()))
            .sum()
    }

    /// One sequential reassignment pass. Each row is removed, scored against
    /// every cluster, and inserted at the argmax (ties: current cluster
    /// first, then lowest index). Returns the number of rows that moved.
    pub(crate) fn em_pass(&mut self) -> usize {
        let n = self.data.n_rows();
        let k = self.state.k();
        let mut moved = 0;
        for row in 0..n {
            let home = self.state.assignment[row];
            self.remove_row(row);
            let mut best = home;
            let mut best_score = self.row_predictive(row, home);
            for j in 0..k {
                if j == home {
                    continue;
                }
                let s = self.row_predictive(row, j);
                if s > best_score {
                    best = j;
                    best_score = s;
                }
            }
            self.insert_row(row, best);
            if best != home {
                moved += 1;
            }
        }
        self.refresh_cached_log_lik();
        moved
    }

    fn refresh_cached_log_lik(&mut self) {
        let ll = self.log_lik_from_stats();
        self.state.set_log_lik(ll);
    }

    /// Batch variant: all rows scored against the pass-start statistics
    /// (leave-one-out against their own cluster), then moved simultaneously.
    pub(crate) fn em_pass_batch(&mut self) -> usize {
        let n = self.data.n_rows();
        let k = self.state.k();
        let mut targets = Vec::with_capacity(n);
        for row in 0..n {
            let home = self.state.assignment[row];
            let mut best = home;
            let mut best_score = self
                .state
                .score_row(self.data, row, home)
                .expect("indices in range");
            for j in 0..k {
                if j == home {
                    continue;
                }
                let s = self
                    .state
                    .score_row(self.data, row, j)
                    .expect("indices in range");
                if s > best_score {
                    best = j;
                    best_score = s;
                }
            }
            targets.push(best);
        }
        let mut moved = 0;
        for (row, &target) in targets.iter().enumerate() {
            if self.state.assignment[row] != target {
                let home = self.state.assignment[row];
                self.state.clusters[home].remove_row(self.data, row);
                self.state.clusters[target].add_row(self.data, row);
                self.state.assignment[row] = target;
                moved += 1;
            }
        }
        if moved > 0 {
            self.rebuild_all_entries();
        }
        self.refresh_cached_log_lik();
        moved
    }

    /// Log weights β·score(row, j) for every cluster, with the row removed.
    /// The row is reinserted into its original cluster before returning.
    #[cfg(test)]
    pub(crate) fn tempered_weights(&mut self, row: usize, beta: f64) -> Vec<f64> {
        let home = self.state.assignment[row];
        self.remove_row(row);
        let k = self.state.k();
        let out: Vec<f64> = (0..k).map(|j| beta * self.row_predictive(row, j)).collect();
        self.insert_row(row, home);
        out
    }

    /// One systematic-scan Gibbs sweep over all rows at inverse temperature
    /// `beta`. Each row is removed, a new cluster is drawn from the softmax
    /// of β·(leave-one-out predictive), and the row is reinserted. β = 0
    /// yields a uniform cluster choice.
    pub(crate) fn gibbs_sweep<R: Rng>(&mut self, beta: f64, rng: &mut R) {
        let n = self.data.n_rows();
        let k = self.state.k();
        for row in 0..n {
            self.remove_row(row);
            let mut max = f64::NEG_INFINITY;
            for j in 0..k {
                let w = beta * self.row_predictive(row, j);
                self.weights[j] = w;
                if w > max {
                    max = w;
                }
            }
            let mut cum = 0.0;
            for j in 0..k {
                cum += (self.weights[j] - max).exp();
                self.probs[j] = cum;
            }
            let u: f64 = rng.random::<f64>() * cum;
            let mut chosen = k - 1;
            for j in 0..k {
                if u < self.probs[j] {
                    chosen = j;
                    break;
                }
            }
            self.insert_row(row, chosen);
        }
        self.refresh_cached_log_lik();
    }
}
