//! Quantum bit commitment toolkit.
//!
//! * [`qcore`]: small dense complex linear algebra for qubit-scale Hilbert
//!   spaces (kets, density operators, partial traces, trace norm, fidelity,
//!   polar decomposition, Bloch great circles, Born-rule sampling).
//! * [`cheat`]: the entanglement-cheating machinery for commitments built
//!   from state ensembles: the cross-Gram matrix, the overlap-optimal
//!   cheating unitary, cheating probabilities, Helstrom discrimination,
//!   Schmidt switching, Kraus-freedom solving and uniformity scans.
//! * [`protocols`]: anonymous-state / decoy-state commitment protocols as
//!   executable commit/open/verify state machines plus their closed-form
//!   concealing quantities.
//! * [`harness`]: seeded, reproducible Monte Carlo experiments pairing every
//!   estimate with its closed-form prediction.

pub mod cheat;
pub mod error;
pub mod harness;
pub mod protocols;
pub mod qcore;
pub mod rng;
pub mod selfcheck;

pub use error::{QbcError, Result};
