//! # qdarwin-core
//!
//! How much does a piece of the environment know about a qubit system?
//! This crate computes partial information plots (average quantum mutual
//! information between one system qubit and `m`-qubit sub-environments),
//! for Haar-random universes, for product-environment branch states and for
//! distributions over their decoherence factors, and measures how
//! redundantly the record is stored.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`qkernel`] | dense states, partial trace, von Neumann entropy, mutual information |
//! | [`haar`] | Haar sampling, Page's mean entropy, analytic and sampled Haar PIPs |
//! | [`branch`] | branch states, (P0, d) summary, H(P0, d), subset mutual information |
//! | [`ensembles`] | unimodal / bimodal / empirical / Poisson-ensemble PIPs |
//! | [`redundancy`] | critical decoherence, redundancy estimates and witness partitions |
//!
//! Entropies are carried in nats internally; curves report bits.

pub mod branch;
pub mod ensembles;
pub mod error;
pub mod haar;
pub mod pip;
pub mod qkernel;
pub mod quad;
pub mod redundancy;
pub mod special;
pub mod subsets;

pub use error::{Error, Result};
pub use pip::{AveragedPip, PipCurve, PipPoint, Provenance};
pub use qkernel::{DensityMatrix, Entropy, PureState, QubitMask};
