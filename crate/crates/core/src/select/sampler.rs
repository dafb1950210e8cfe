//! Tempered Gibbs sampler over assignment vectors.
//!
//! Target distribution: q_β(A) ∝ P(D|A,K)^β · P(A|K) with P(A|K) uniform
//! over the K^N labelings. One step is a systematic scan: each row in order
//! is removed, its new cluster is drawn from the softmax of β times the
//! leave-one-out predictive log-likelihoods, and it is reinserted. Each
//! single-row kernel satisfies detailed balance for q_β, so the sweep leaves
//! q_β stationary.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cluster::{ClusterState, Engine, Priors};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::math::log_sum_exp;
use crate::select::estimators::SamplerInit;

pub struct AssignmentSampler<'d> {
    engine: Engine<'d>,
    k: usize,
    beta: f64,
    rng: ChaCha8Rng,
    steps: u64,
}

impl<'d> AssignmentSampler<'d> {
    pub fn new(
        data: &'d Dataset,
        priors: &Priors,
        k: usize,
        beta: f64,
        seed: u64,
        init: SamplerInit,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::invalid(format!(
                "inverse temperature must lie in [0,1], got {beta}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let assignment = match init {
            SamplerInit::Random => crate::cluster::random_assignment(data.n_rows(), k, &mut rng),
            SamplerInit::Assignment(a) => {
                if a.len() != data.n_rows() {
                    return Err(Error::invalid("init assignment length mismatch"));
                }
                if a.iter().any(|&x| x >= k) {
                    return Err(Error::invalid("init assignment value out of range"));
                }
                a
            }
        };
        let state = ClusterState::new(data, priors.clone(), k, assignment)?;
        Ok(AssignmentSampler {
            engine: Engine::new(data, state),
            k,
            beta,
            rng,
            steps: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn assignment(&self) -> &[usize] {
        self.engine.state.assignment()
    }

    /// One full systematic-scan sweep over all rows.
    pub fn sweep(&mut self) {
        self.engine.gibbs_sweep(self.beta, &mut self.rng);
        self.steps += 1;
    }

    /// log P(D|A,K) of the current assignment (cache refreshed per sweep).
    pub fn log_lik(&self) -> f64 {
        self.engine.state.log_lik()
    }
}

/// Reference single-row Gibbs conditionals: the probability of each cluster
/// for `row` given all other assignments, at inverse temperature `beta`.
/// Computed from scratch via the public scoring path; the sampler's cached
/// sweep must draw from exactly these distributions (pinned by a test).
pub fn gibbs_conditionals(
    data: &Dataset,
    priors: &Priors,
    assignment: &[usize],
    k: usize,
    row: usize,
    beta: f64,
) -> Result<Vec<f64>> {
    if row >= data.n_rows() {
        return Err(Error::invalid(format!("row {row} out of range")));
    }
    let state = ClusterState::new(data, priors.clone(), k, assignment.to_vec())?;
    let mut log_weights = Vec::with_capacity(k);
    for j in 0..k {
        // score_row excludes the row from its own cluster, which is exactly
        // the leave-one-out predictive the kernel weights.
        log_weights.push(beta * state.score_row(data, row, j)?);
    }
    let norm = log_sum_exp(&log_weights);
    Ok(log_weights.iter().map(|w| (w - norm).exp()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{gen_benchmark, BenchKind, BenchSpec};
    use crate::data::{RawColumn, Schema};

    fn binary_dataset(codes: Vec<u32>) -> Dataset {
        let schema = Schema::parse("b,cat,0,1\n").unwrap();
        Dataset::from_parts(schema, vec![RawColumn::Categorical(codes)], true).unwrap()
    }

    #[test]
    fn sampler_weights_match_reference_conditionals() {
        let spec = BenchSpec {
            n_rows: 30,
            ..BenchSpec::defaults(BenchKind::Mixed)
        };
        let (data, _) = gen_benchmark(&spec).unwrap();
        let priors = Priors::default_for(&data);
        for beta in [0.0, 0.37, 1.0] {
            let mut sampler =
                AssignmentSampler::new(&data, &priors, 3, beta, 5, SamplerInit::Random).unwrap();
            let assignment = sampler.assignment().to_vec();
            for row in [0usize, 7, 29] {
                let reference =
                    gibbs_conditionals(&data, &priors, &assignment, 3, row, beta).unwrap();
                let weights = sampler.engine.tempered_weights(row, beta);
                let norm = log_sum_exp(&weights);
                for (j, r) in reference.iter().enumerate() {
                    let fast = (weights[j] - norm).exp();
                    assert!(
                        (fast - r).abs() < 1e-12,
                        "row {row}, cluster {j}, beta {beta}: {fast} vs {r}"
                    );
                }
            }
        }
    }

    #[test]
    fn beta_zero_sweeps_are_uniform() {
        // Pool per-row cluster draws over many sweeps; chi-square against
        // the uniform distribution must pass at the 0.001 level.
        let data = binary_dataset(vec![0, 1, 1]);
        let priors = Priors::default_for(&data);
        let k = 3;
        let mut sampler =
            AssignmentSampler::new(&data, &priors, k, 0.0, 11, SamplerInit::Random).unwrap();
        let sweeps = 10_000;
        let mut counts = vec![0u64; k];
        for _ in 0..sweeps {
            sampler.sweep();
            for &a in sampler.assignment() {
                counts[a] += 1;
            }
        }
        let total: u64 = counts.iter().sum();
        let expected = total as f64 / k as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // χ²(df=2) critical value at p = 0.001.
        assert!(chi2 < 13.816, "chi-square {chi2} too large");
        assert_eq!(sampler.steps(), sweeps as u64);
    }

    #[test]
    fn posterior_sweeps_match_exact_enumeration() {
        // N=2, K=2, one binary column: the 4 assignments have exactly
        // computable probabilities under P(D|A)·P(A).
        let data = binary_dataset(vec![0, 1]);
        let priors = Priors::default_for(&data);
        let k = 2;
        // Exact stationary distribution.
        let mut log_probs = Vec::new();
        for a0 in 0..k {
            for a1 in 0..k {
                let state = ClusterState::new(&data, priors.clone(), k, vec![a0, a1]).unwrap();
                log_probs.push(state.log_lik());
            }
        }
        let norm = log_sum_exp(&log_probs);
        let exact: Vec<f64> = log_probs.iter().map(|p| (p - norm).exp()).collect();

        let mut sampler =
            AssignmentSampler::new(&data, &priors, k, 1.0, 3, SamplerInit::Random).unwrap();
        let sweeps = 100_000;
        let mut counts = [0u64; 4];
        for _ in 0..sweeps {
            sampler.sweep();
            let a = sampler.assignment();
            counts[a[0] * 2 + a[1]] += 1;
        }
        for (idx, &c) in counts.iter().enumerate() {
            let freq = c as f64 / sweeps as f64;
            assert!(
                (freq - exact[idx]).abs() < 0.02,
                "assignment {idx}: {freq} vs {}",
                exact[idx]
            );
        }
    }
}
