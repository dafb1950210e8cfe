//! Bayesian mixture modelling for heterogeneous (categorical + numeric) tabular data.
//!
//! The pieces fit together like this:
//!
//! * [`bayes`] — exact conjugate-prior kernels: Dirichlet/categorical and
//!   Normal-Gamma/normal posterior updates, posterior predictives, and
//!   closed-form marginal likelihoods, all in log space.
//! * [`data`] — CSV ingestion with a plain-text schema, column typing,
//!   standardization, and simple imputation.
//! * [`cluster`] — the clustering engine: rows are reassigned one at a time to
//!   the cluster maximizing their leave-one-out posterior predictive, which
//!   greedily ascends the marginal likelihood of the partition. Includes the
//!   grow-one-cluster heuristic and the K-sweep driver.
//! * [`select`] — estimators of the model evidence marginalized over
//!   assignments: exact enumeration, arithmetic/harmonic mean, the tempered
//!   harmonic mean (HMβ), thermodynamic integration, and BIC.
//! * [`synth`] — cluster-wise synthetic tabular data generation: pre-cluster
//!   the inputs, fit per-cluster column distributions and a per-cluster noisy
//!   linear output model, sample and pool.
//! * [`bench`] — synthetic clustering benchmarks with ground-truth labels.
//! * [`eval`] — adjusted Rand index, logistic regression, and AUC.

pub mod bayes;
pub mod bench;
pub mod cluster;
pub mod data;
pub mod error;
pub mod eval;
pub mod math;
pub mod select;
pub mod synth;

pub use error::{Error, Result};
