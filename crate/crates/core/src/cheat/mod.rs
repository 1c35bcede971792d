//! Entanglement cheating for commitments built from state ensembles.
//!
//! Adam commits to `b` by sending Babe one state from an ensemble
//! `{p_i, |φ_i⟩}` (b = 0) or `{p'_i, |φ'_i⟩}` (b = 1). Keeping a purification
//! instead, he can later steer Babe's share toward the other ensemble by a
//! unitary on his side. This module builds those purifications, finds the
//! overlap-optimal steering unitary from the cross-Gram matrix `Λ`, scores
//! arbitrary steering choices, and checks when a single steering choice
//! works for every input state of a random-unitary commitment.

pub mod ensemble;
pub mod families;
pub mod kraus;
pub mod oracle;
pub mod report;
pub mod scans;
pub mod schmidt;
pub mod solver;
pub mod swap_example;

pub use ensemble::{commit_purify, Ensemble, EnsemblePairJson, PurifiedCommitment};
pub use families::{identical_pair, permutation_pair, random_pair, trace_distance_family};
pub use kraus::{kraus_freedom, KrausFreedomResult, WeightedUnitary};
pub use oracle::{brute_force_cheat_oracle, maximize_over_unitaries};
pub use report::{cheat_report, CheatReport, CHEAT_REPORT_SCHEMA};
pub use scans::{fixed_cheat_scan, uniform_concealing_scan, FixedCheatScan, InputSampler, ScanResult};
pub use schmidt::schmidt_switch;
pub use solver::{
    build_lambda, cheat_success, helstrom, optimal_overlap_cheat, CheatSolution, Orientation, TildeState,
};
pub use swap_example::{swap_example_fixture, SwapExample, SwapExampleChecks};
