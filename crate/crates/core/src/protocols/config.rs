use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QbcError, Result};
use crate::qcore::{haar_ket, GreatCircle, Ket};

/// The four protocol variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    /// One anonymous qubit among `n`, Babe measures before opening.
    QBCp3m,
    /// One anonymous BB84 qubit among `n` decoys from a known orthogonal
    /// pair; Babe verifies by projection at opening time.
    QBCp3u,
    /// `m` anonymous qubits kept together as one qumode among `N`.
    QBC3m1,
    /// `m` anonymous qubits, each hidden in its own segment of `N` qubits.
    QBC3m2,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::QBCp3m => "QBCp3m",
            ProtocolKind::QBCp3u => "QBCp3u",
            ProtocolKind::QBC3m1 => "QBC3m1",
            ProtocolKind::QBC3m2 => "QBC3m2",
        }
    }

    /// Whether Babe's verifying measurement happens at commit time.
    pub fn measures_first(self) -> bool {
        !matches!(self, ProtocolKind::QBCp3u)
    }
}

/// Set Babe draws her anonymous states from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BabeStateSet {
    #[serde(rename = "greatCircle")]
    GreatCircle,
    #[serde(rename = "BB84")]
    Bb84,
}

/// Distribution of Adam's decoy qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecoySet {
    #[serde(rename = "uniformSphere")]
    UniformSphere,
    #[serde(rename = "greatCircle")]
    GreatCircle,
    #[serde(rename = "BB84")]
    Bb84,
    #[serde(rename = "twoOrthogonal")]
    TwoOrthogonal,
}

/// Protocol parameters. Sequence positions are numbered from 1 in every
/// external representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    /// Qubits per sequence (QBCp3m, QBCp3u).
    #[serde(default = "one")]
    pub n: usize,
    /// Anonymous qubits (QBC3m1, QBC3m2).
    #[serde(default = "one")]
    pub m: usize,
    /// Qumodes (QBC3m1) or segment length (QBC3m2).
    #[serde(default = "one", rename = "N")]
    pub big_n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub babe_state_set: Option<BabeStateSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoy_set: Option<DecoySet>,
    #[serde(default)]
    pub circle: GreatCircle,
}

fn one() -> usize {
    1
}

/// Hard limit on sequence length, so per-position records stay small.
pub const MAX_POSITIONS: usize = 1 << 16;

impl ProtocolConfig {
    pub fn qbcp3m(n: usize) -> Self {
        ProtocolConfig {
            kind: ProtocolKind::QBCp3m,
            n,
            m: 1,
            big_n: 1,
            babe_state_set: None,
            decoy_set: None,
            circle: GreatCircle::standard(),
        }
    }

    pub fn qbcp3u(n: usize) -> Self {
        ProtocolConfig { kind: ProtocolKind::QBCp3u, ..ProtocolConfig::qbcp3m(n) }
    }

    pub fn qbc3m1(m: usize, big_n: usize) -> Self {
        ProtocolConfig { kind: ProtocolKind::QBC3m1, n: 1, m, big_n, ..ProtocolConfig::qbcp3m(1) }
    }

    pub fn qbc3m2(m: usize, big_n: usize) -> Self {
        ProtocolConfig { kind: ProtocolKind::QBC3m2, ..ProtocolConfig::qbc3m1(m, big_n) }
    }

    pub fn with_sets(mut self, babe: BabeStateSet, decoys: DecoySet) -> Self {
        self.babe_state_set = Some(babe);
        self.decoy_set = Some(decoys);
        self
    }

    /// Babe's state set; QBCp3u and QBC3m1 use BB84 states, the others the
    /// whole circle, unless overridden.
    pub fn babe_set(&self) -> BabeStateSet {
        self.babe_state_set.unwrap_or(match self.kind {
            ProtocolKind::QBCp3u | ProtocolKind::QBC3m1 => BabeStateSet::Bb84,
            _ => BabeStateSet::GreatCircle,
        })
    }

    /// Decoy distribution; QBCp3u requires a known orthogonal pair, QBC3m1
    /// uses BB84 states, the others default to the great circle.
    pub fn decoys(&self) -> DecoySet {
        self.decoy_set.unwrap_or(match self.kind {
            ProtocolKind::QBCp3u => DecoySet::TwoOrthogonal,
            ProtocolKind::QBC3m1 => DecoySet::Bb84,
            _ => DecoySet::GreatCircle,
        })
    }

    /// Number of anonymous qubits Babe sends.
    pub fn slots(&self) -> usize {
        match self.kind {
            ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => 1,
            _ => self.m,
        }
    }

    /// Total qubits Adam returns.
    pub fn positions(&self) -> usize {
        match self.kind {
            ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => self.n,
            _ => self.m * self.big_n,
        }
    }

    /// Anonymous slot whose basis Babe uses at 0-based position `pos`.
    pub fn slot_of(&self, pos: usize) -> usize {
        match self.kind {
            ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => 0,
            ProtocolKind::QBC3m1 => pos % self.m,
            ProtocolKind::QBC3m2 => pos / self.big_n,
        }
    }

    /// Number of places one copy of a slot can occupy: positions, qumodes or
    /// segment entries.
    pub fn placement_choices(&self) -> usize {
        match self.kind {
            ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => self.n,
            _ => self.big_n,
        }
    }

    /// 0-based position of placement index `choice` for `slot`.
    pub fn position_of(&self, slot: usize, choice: usize) -> usize {
        match self.kind {
            ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => choice,
            ProtocolKind::QBC3m1 => choice * self.m + slot,
            ProtocolKind::QBC3m2 => slot * self.big_n + choice,
        }
    }

    /// Short parameter label, e.g. `n=3` or `m=3,N=5`.
    pub fn params_label(&self) -> String {
        match self.kind {
            ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => format!("n={}", self.n),
            _ => format!("m={},N={}", self.m, self.big_n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.circle.validate()?;
        match self.kind {
            ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => {
                if self.n < 1 {
                    return Err(QbcError::Config("n must be at least 1".into()));
                }
                if self.m != 1 {
                    return Err(QbcError::Config(format!(
                        "{} carries one anonymous qubit; got m = {}",
                        self.kind.name(),
                        self.m
                    )));
                }
            }
            ProtocolKind::QBC3m1 | ProtocolKind::QBC3m2 => {
                if self.m < 1 {
                    return Err(QbcError::Config("m must be at least 1".into()));
                }
                if self.big_n < 2 {
                    return Err(QbcError::Config(format!("N must be at least 2, got {}", self.big_n)));
                }
            }
        }
        if self.kind == ProtocolKind::QBCp3u && self.decoys() != DecoySet::TwoOrthogonal {
            return Err(QbcError::Config("QBCp3u decoys must come from the known orthogonal pair".into()));
        }
        if self.positions() > MAX_POSITIONS {
            return Err(QbcError::CapExceeded { dim: self.positions(), cap: MAX_POSITIONS });
        }
        Ok(())
    }

    /// Draws one of Babe's anonymous states.
    pub fn draw_babe_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Ket {
        match self.babe_set() {
            BabeStateSet::GreatCircle => self.circle.state(rng.random::<f64>() * std::f64::consts::TAU),
            BabeStateSet::Bb84 => self.circle.bb84()[rng.random_range(0..4)].clone(),
        }
    }

    /// Draws one decoy qubit.
    pub fn draw_decoy<R: Rng + ?Sized>(&self, rng: &mut R) -> Ket {
        match self.decoys() {
            DecoySet::UniformSphere => haar_ket(&[2], rng),
            DecoySet::GreatCircle => self.circle.state(rng.random::<f64>() * std::f64::consts::TAU),
            DecoySet::Bb84 => self.circle.bb84()[rng.random_range(0..4)].clone(),
            DecoySet::TwoOrthogonal => self.circle.orthogonal_pair()[rng.random_range(0..2)].clone(),
        }
    }
}
