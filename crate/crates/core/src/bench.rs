//! Synthetic clustering benchmarks with ground-truth labels.
//!
//! Four families, all built from K latent clusters in a configurable size
//! ratio:
//!
//! * `Categorical` — per column, a shared base distribution is perturbed per
//!   cluster with strength Δ (larger Δ = more distinct clusters).
//! * `NumericDiffMean` — cluster means spaced 1.0 apart, standard deviations
//!   spread by δσ (larger δσ = more overlap).
//! * `NumericSameMean` — all means equal; only the standard deviations
//!   differ, so larger δσ makes clusters easier to tell apart.
//! * `Mixed` — numeric plus 4-valued categorical columns, with δσ tied to
//!   5 − Δ so one knob tunes the difficulty of every column.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::data::{Dataset, RawColumn, Schema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchKind {
    Categorical,
    NumericDiffMean,
    NumericSameMean,
    Mixed,
}

impl BenchKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BenchKind::Categorical => "categorical",
            BenchKind::NumericDiffMean => "numeric-diffmean",
            BenchKind::NumericSameMean => "numeric-samemean",
            BenchKind::Mixed => "mixed",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "categorical" => Ok(BenchKind::Categorical),
            "numeric-diffmean" => Ok(BenchKind::NumericDiffMean),
            "numeric-samemean" => Ok(BenchKind::NumericSameMean),
            "mixed" => Ok(BenchKind::Mixed),
            other => Err(Error::invalid(format!("unknown benchmark kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub kind: BenchKind,
    pub n_rows: usize,
    /// Positive cluster-size weights; length = number of clusters.
    pub ratio: Vec<f64>,
    /// Categorical separation Δ ≥ 0.
    pub delta: f64,
    /// Numeric std spread δσ ≥ 0; None on Mixed means 5.0 − Δ.
    pub delta_sigma: Option<f64>,
    pub n_binary: usize,
    pub n_cat4: usize,
    pub n_numeric: usize,
    pub seed: u64,
}

impl BenchSpec {
    /// Column mix and sizes used by the benchmark family by default:
    /// 5000 rows, five clusters in a 5:4:3:2:1 ratio, ten columns.
    pub fn defaults(kind: BenchKind) -> Self {
        let (n_binary, n_cat4, n_numeric) = match kind {
            BenchKind::Categorical => (5, 5, 0),
            BenchKind::NumericDiffMean | BenchKind::NumericSameMean => (0, 0, 10),
            BenchKind::Mixed => (0, 5, 5),
        };
        BenchSpec {
            kind,
            n_rows: 5000,
            ratio: vec![5.0, 4.0, 3.0, 2.0, 1.0],
            delta: 2.5,
            delta_sigma: None,
            n_binary,
            n_cat4,
            n_numeric,
            seed: 0,
        }
    }

    pub fn n_clusters(&self) -> usize {
        self.ratio.len()
    }

    /// δσ with the Mixed default applied.
    pub fn effective_delta_sigma(&self) -> f64 {
        match self.delta_sigma {
            Some(v) => v,
            None => match self.kind {
                BenchKind::Mixed => 5.0 - self.delta,
                _ => 2.5,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_rows == 0 {
            return Err(Error::invalid("benchmark needs at least one row"));
        }
        if self.ratio.is_empty() || self.ratio.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::invalid("ratio weights must be positive"));
        }
        if self.n_rows < self.n_clusters() {
            return Err(Error::invalid("fewer rows than clusters"));
        }
        if self.delta < 0.0 || self.effective_delta_sigma() < 0.0 {
            return Err(Error::invalid("delta and delta_sigma must be >= 0"));
        }
        if self.n_binary + self.n_cat4 + self.n_numeric == 0 {
            return Err(Error::invalid("benchmark needs at least one column"));
        }
        match self.kind {
            BenchKind::Categorical if self.n_numeric > 0 => Err(Error::invalid(
                "categorical benchmark cannot have numeric columns",
            )),
            BenchKind::NumericDiffMean | BenchKind::NumericSameMean
                if self.n_binary + self.n_cat4 > 0 =>
            {
                Err(Error::invalid(
                    "numeric benchmark cannot have categorical columns",
                ))
            }
            _ => Ok(()),
        }
    }
}

/// Largest-remainder apportionment of `n` into parts proportional to
/// `weights`; sums exactly to `n`, ties broken toward lower indices.
pub fn apportion(n: usize, weights: &[f64]) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| n as f64 * w / total).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for i in 0..(n - assigned) {
        sizes[order[i % order.len()]] += 1;
    }
    sizes
}

/// Uniform draw from the probability simplex (normalized exponentials).
fn simplex_uniform<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().ln()).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

/// Zero-sum, unit-norm perturbation direction.
fn perturbation<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    loop {
        let mut v: Vec<f64> = (0..k).map(|_| normal.sample(rng)).collect();
        let mean = v.iter().sum::<f64>() / k as f64;
        for x in &mut v {
            *x -= mean;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            for x in &mut v {
                *x /= norm;
            }
            return v;
        }
    }
}

/// Per-cluster categorical distributions for one column: softmax of
/// log(base) + Δ·perturbation, so Δ = 0 collapses every cluster onto the
/// shared base distribution.
fn categorical_cluster_probs<R: Rng>(
    k_categories: usize,
    n_clusters: usize,
    delta: f64,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let base = simplex_uniform(k_categories, rng);
    (0..n_clusters)
        .map(|_| {
            let dir = perturbation(k_categories, rng);
            let logits: Vec<f64> = base
                .iter()
                .zip(&dir)
                .map(|(b, d)| b.ln() + delta * d)
                .collect();
            let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let unnorm: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
            let total: f64 = unnorm.iter().sum();
            unnorm.into_iter().map(|u| u / total).collect()
        })
        .collect()
}

fn sample_categorical<R: Rng>(probs: &[f64], rng: &mut R) -> u32 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (x, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return x as u32;
        }
    }
    (probs.len() - 1) as u32
}

/// Generates a benchmark dataset and its ground-truth labels (row-aligned).
pub fn gen_benchmark(spec: &BenchSpec) -> Result<(Dataset, Vec<usize>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_clusters = spec.n_clusters();
    let sizes = apportion(spec.n_rows, &spec.ratio);
    let delta_sigma = spec.effective_delta_sigma();

    // Pre-shuffle labels, cluster-blocked.
    let mut labels: Vec<usize> = Vec::with_capacity(spec.n_rows);
    for (j, &s) in sizes.iter().enumerate() {
        labels.extend(std::iter::repeat_n(j, s));
    }

    // Cluster means spaced 1.0 apart (or equal), stds fanned out by δσ.
    let cluster_mean = |j: usize| -> f64 {
        match spec.kind {
            BenchKind::NumericSameMean => 0.0,
            _ => j as f64,
        }
    };
    let cluster_std = |j: usize| -> f64 { 0.5 + j as f64 * delta_sigma / 5.0 };

    let mut schema_lines = String::new();
    let mut raw: Vec<RawColumn> = Vec::new();

    let arities: Vec<(String, usize)> = (0..spec.n_binary)
        .map(|i| (format!("bin{i}"), 2))
        .chain((0..spec.n_cat4).map(|i| (format!("cat{i}"), 4)))
        .collect();
    for (name, arity) in &arities {
        let labels_csv: Vec<String> = (0..*arity).map(|x| x.to_string()).collect();
        schema_lines.push_str(&format!("{name},cat,{}\n", labels_csv.join(",")));
        let per_cluster = categorical_cluster_probs(*arity, n_clusters, spec.delta, &mut rng);
        let column: Vec<u32> = labels
            .iter()
            .map(|&j| sample_categorical(&per_cluster[j], &mut rng))
            .collect();
        raw.push(RawColumn::Categorical(column));
    }
    for i in 0..spec.n_numeric {
        schema_lines.push_str(&format!("num{i},num\n"));
        let dists: Vec<Normal<f64>> = (0..n_clusters)
            .map(|j| Normal::new(cluster_mean(j), cluster_std(j)).unwrap())
            .collect();
        let column: Vec<f64> = labels.iter().map(|&j| dists[j].sample(&mut rng)).collect();
        raw.push(RawColumn::Numeric(column));
    }

    // Joint shuffle of rows and labels.
    let mut perm: Vec<usize> = (0..spec.n_rows).collect();
    perm.shuffle(&mut rng);
    let labels: Vec<usize> = perm.iter().map(|&i| labels[i]).collect();
    for col in &mut raw {
        match col {
            RawColumn::Categorical(v) => *v = perm.iter().map(|&i| v[i]).collect(),
            RawColumn::Numeric(v) => *v = perm.iter().map(|&i| v[i]).collect(),
        }
    }

    let schema = Schema::parse(&schema_lines)?;
    let data = Dataset::from_parts(schema, raw, true)?;
    Ok((data, labels))
}

/// Appends a planted binary output column driven by per-cluster linear
/// weights over the input design encoding, for end-to-end protocol tests.
/// Returns the augmented dataset (output column last, designated).
pub fn with_planted_binary_output(
    data: &Dataset,
    labels: &[usize],
    signal_scale: f64,
    noise_std: f64,
    seed: u64,
) -> Result<Dataset> {
    let n = data.n_rows();
    if labels.len() != n {
        return Err(Error::invalid("labels must align with rows"));
    }
    let n_clusters = labels.iter().copied().max().unwrap_or(0) + 1;
    let (design, _) = crate::eval::design_matrix(data, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let weights: Vec<Vec<f64>> = (0..n_clusters)
        .map(|_| {
            (0..design.width)
                .map(|_| signal_scale * normal.sample(&mut rng))
                .collect()
        })
        .collect();
    let intercepts: Vec<f64> = (0..n_clusters)
        .map(|_| 0.5 * normal.sample(&mut rng))
        .collect();
    let noise = Normal::new(0.0, noise_std.max(0.0)).unwrap();
    let mut codes = Vec::with_capacity(n);
    for (row, &j) in labels.iter().enumerate() {
        let z: f64 = design
            .row(row)
            .iter()
            .zip(&weights[j])
            .map(|(x, w)| x * w)
            .sum::<f64>()
            + intercepts[j]
            + noise.sample(&mut rng);
        let p = 1.0 / (1.0 + (-z).exp());
        codes.push(if rng.random::<f64>() < p { 1u32 } else { 0u32 });
    }

    let mut schema_text = data.schema().render();
    schema_text.push_str("outcome,cat,0,1\noutput,outcome\n");
    let schema = Schema::parse(&schema_text)?;
    let mut raw: Vec<RawColumn> = (0..data.n_columns())
        .map(|c| match data.column(c) {
            crate::data::Column::Categorical(v) => RawColumn::Categorical(v.clone()),
            crate::data::Column::Numeric { values, transform } => {
                RawColumn::Numeric(values.iter().map(|v| transform.invert(*v)).collect())
            }
        })
        .collect();
    raw.push(RawColumn::Categorical(codes));
    Dataset::from_parts(schema, raw, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ColumnKind;

    #[test]
    fn apportionment_matches_hand_result() {
        let sizes = apportion(5000, &[5.0, 4.0, 3.0, 2.0, 1.0]);
        assert_eq!(sizes, vec![1667, 1333, 1000, 667, 333]);
        assert_eq!(sizes.iter().sum::<usize>(), 5000);
    }

    #[test]
    fn label_vector_has_the_apportioned_sizes() {
        let spec = BenchSpec {
            n_rows: 1000,
            ..BenchSpec::defaults(BenchKind::Mixed)
        };
        let (data, labels) = gen_benchmark(&spec).unwrap();
        assert_eq!(data.n_rows(), 1000);
        assert_eq!(labels.len(), 1000);
        let sizes = apportion(1000, &spec.ratio);
        for (j, &expected) in sizes.iter().enumerate() {
            let got = labels.iter().filter(|&&l| l == j).count();
            assert_eq!(got, expected, "cluster {j}");
        }
    }

    #[test]
    fn same_seed_reproduces_exactly() {
        let spec = BenchSpec {
            n_rows: 200,
            ..BenchSpec::defaults(BenchKind::Categorical)
        };
        let (a, la) = gen_benchmark(&spec).unwrap();
        let (b, lb) = gen_benchmark(&spec).unwrap();
        assert_eq!(la, lb);
        assert_eq!(a, b);
    }

    #[test]
    fn delta_zero_collapses_categorical_clusters() {
        // All clusters share one distribution; per-cluster frequencies of the
        // first column should agree within sampling noise.
        let spec = BenchSpec {
            n_rows: 4000,
            delta: 0.0,
            ratio: vec![1.0, 1.0],
            ..BenchSpec::defaults(BenchKind::Categorical)
        };
        let (data, labels) = gen_benchmark(&spec).unwrap();
        let mut counts = [[0f64; 2]; 2];
        let mut totals = [0f64; 2];
        for row in 0..data.n_rows() {
            let j = labels[row];
            counts[j][data.cat_code(row, 0) as usize] += 1.0;
            totals[j] += 1.0;
        }
        let f0 = counts[0][1] / totals[0];
        let f1 = counts[1][1] / totals[1];
        assert!((f0 - f1).abs() < 0.06, "{f0} vs {f1}");
    }

    #[test]
    fn mixed_defaults_follow_the_column_mix() {
        let spec = BenchSpec::defaults(BenchKind::Mixed);
        assert_eq!((spec.n_binary, spec.n_cat4, spec.n_numeric), (0, 5, 5));
        assert!((spec.effective_delta_sigma() - (5.0 - spec.delta)).abs() < 1e-12);
        let spec = BenchSpec { n_rows: 50, ..spec };
        let (data, _) = gen_benchmark(&spec).unwrap();
        let cats = (0..data.n_columns())
            .filter(|&c| data.schema().column_kind(c).is_categorical())
            .count();
        assert_eq!(cats, 5);
        assert_eq!(data.n_columns(), 10);
        for c in 0..data.n_columns() {
            if let ColumnKind::Categorical { labels } = data.schema().column_kind(c) {
                assert_eq!(labels.len(), 4);
            }
        }
    }

    #[test]
    fn planted_output_is_binary_and_designated() {
        let spec = BenchSpec {
            n_rows: 120,
            ratio: vec![1.0, 1.0, 1.0],
            ..BenchSpec::defaults(BenchKind::Mixed)
        };
        let (data, labels) = gen_benchmark(&spec).unwrap();
        let augmented = with_planted_binary_output(&data, &labels, 1.5, 0.3, 9).unwrap();
        assert_eq!(augmented.n_columns(), 11);
        let out = augmented.schema().output_index().unwrap();
        assert_eq!(out, 10);
        assert_eq!(augmented.schema().column_kind(out).arity(), 2);
    }
}
