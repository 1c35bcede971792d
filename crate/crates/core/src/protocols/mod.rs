//! The anonymous-state decoy protocols QBCp3m, QBCp3u, QBC3m1 and QBC3m2.
//!
//! [`config`] holds protocol parameters and layouts, [`closed_form`] the
//! concealing quantities and explicit small-size checks, [`strategies`] the
//! pluggable party behaviours and [`machine`] the commit/open/verify runs.

pub mod closed_form;
pub mod config;
pub mod machine;
pub mod strategies;

pub use closed_form::{
    clone_criterion, concealing_bounds, concealing_closed_form, entangled_mismatch_check, majority_vote_pbc,
    none_match_probability, pattern_majority_pbc, product_trace_norms, qbcp3m_rho, segment_mismatch_check,
    single_guess_pbc, ConcealingReport, MismatchRecord, SegmentMismatchRecord,
};
pub use config::{BabeStateSet, DecoySet, ProtocolConfig, ProtocolKind};
pub use machine::{run_trial, Opening, Party, Phase, Session, Transcript, TrialOutcome};
pub use strategies::{
    resolve_adam, resolve_babe, AdamStrategy, BabeStrategy, Intent, StrategyKind, StrategyRef, ADAM_STRATEGIES,
    ATTACK_STRATEGIES, BABE_STRATEGIES,
};
