//! Population diversity of steady-state evolutionary algorithms on flat fitness.
//!
//! The crate simulates (mu+1) EAs and GAs on a landscape where every offspring
//! is accepted, tracks the sum of pairwise Hamming distances `S(P)`, compares
//! it against the closed-form drift in [`theory`], and checks the operator
//! properties that the drift formula relies on with the exact and statistical
//! procedures in [`oracle`].
//!
//! Each capability has a runnable program under `examples/`; start with
//! `cargo run --example predict`.

pub mod bitstring;
pub mod cli;
pub mod crossover;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod mutation;
pub mod oracle;
pub mod rational;
pub mod stats;
pub mod theory;
pub mod trajectory;

pub use bitstring::{hamming, BitString, Population};
pub use crossover::{CrossoverKind, CrossoverOp};
pub use engine::{EngineConfig, Init, ParentSampling, TieBreaking};
pub use error::{Error, Result};
pub use mutation::{MutationKind, MutationOp};
pub use rational::Rate;
pub use theory::TheoryParams;
pub use trajectory::TrajectoryRecord;
