//! Commit / open / verify choreography for the decoy protocols.
//!
//! A [`Session`] is one protocol run between Adam and Babe. It is created by
//! [`Session::commit`], which performs steps (i) and (ii) and, when Babe's
//! strategy calls for it, her commit-time measurement. Adam then computes an
//! [`Opening`], Babe receives it through [`Session::open`] and decides with
//! [`Session::verify`]. Sessions are plain values: cloning one after commit
//! forks the run, so several openings can be checked against the same
//! commitment.

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use super::config::{DecoySet, ProtocolConfig, ProtocolKind};
use super::strategies::{AdamStrategy, BabeStrategy, Intent};
use crate::error::{QbcError, Result};
use crate::qcore::json::KetJson;
use crate::qcore::{measure_subsystem, CMatrix, Ket, MeasurementBasis};
use crate::rng::{Role, Stream, TrialStreams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Phase {
    Committed,
    Opened,
    Verified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Party {
    Adam,
    Babe,
}

/// Adam's opening message. Positions are 1-based, one per anonymous slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Opening {
    pub bit: u8,
    pub positions: Vec<usize>,
    /// QBCp3u only: declared state of every other position as an index into
    /// the known orthogonal pair; `None` at opened positions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declared: Option<Vec<Option<u8>>>,
}

#[derive(Debug, Clone)]
enum Cell {
    Decoy(Ket),
    Copy { slot: usize, copy: usize },
}

#[derive(Debug, Clone)]
struct Streams {
    babe_states: Stream,
    adam_bit: Stream,
    adam_strategy: Stream,
    payload_measure: Stream,
    placement: Stream,
    decoys: Stream,
    decoy_measure: Stream,
    babe_guess: Stream,
    adam_open: Stream,
    verify: Stream,
}

impl Streams {
    fn new(t: &TrialStreams) -> Self {
        Streams {
            babe_states: t.role(Role::BabeStates),
            adam_bit: t.role(Role::AdamBit),
            adam_strategy: t.role(Role::AdamStrategy),
            payload_measure: t.role(Role::PayloadMeasure),
            placement: t.role(Role::Placement),
            decoys: t.role(Role::Decoys),
            decoy_measure: t.role(Role::DecoyMeasure),
            babe_guess: t.role(Role::BabeGuess),
            adam_open: t.role(Role::AdamOpen),
            verify: t.role(Role::Verify),
        }
    }
}

/// One protocol run.
#[derive(Debug, Clone)]
pub struct Session<'a> {
    config: &'a ProtocolConfig,
    adam: &'a dyn AdamStrategy,
    rng: Streams,
    phase: Phase,
    bit: u8,
    psis: Vec<Ket>,
    blocks: Vec<Ket>,
    known: Vec<Vec<Option<Ket>>>,
    cells: Vec<Cell>,
    placements: Vec<Vec<usize>>,
    decoy_labels: Vec<Option<u8>>,
    outcomes: Vec<Option<u8>>,
    babe_guess: Option<u8>,
    opening: Option<Opening>,
    open_check: Option<bool>,
    verdict: Option<bool>,
}

fn flip_of(config: &ProtocolConfig) -> CMatrix {
    config.circle.flip()
}

fn orthogonal_complement(k: &Ket) -> Ket {
    let a = k.amplitudes();
    Ket::from_amplitudes(&[-a[1].conj(), a[0].conj()]).expect("unit qubit")
}

fn projective_basis(target: &Ket) -> MeasurementBasis {
    MeasurementBasis::new(vec![target.clone(), orthogonal_complement(target)]).expect("orthonormal pair")
}

fn born_collapse(k: &Ket, basis: &MeasurementBasis, rng: &mut Stream) -> Result<(usize, Ket)> {
    measure_subsystem(k, 0, basis, rng)
}

impl<'a> Session<'a> {
    /// Babe sends her anonymous states, Adam modulates, adds decoys and
    /// returns the sequence, and Babe measures if her strategy says so.
    /// `bit` is Adam's committed bit; `None` draws it from the trial streams.
    pub fn commit(
        config: &'a ProtocolConfig,
        adam: &'a dyn AdamStrategy,
        babe: &'a dyn BabeStrategy,
        streams: &TrialStreams,
        bit: Option<u8>,
    ) -> Result<Session<'a>> {
        config.validate()?;
        let mut rng = Streams::new(streams);
        let drawn: u8 = rng.adam_bit.random_range(0..2);
        let bit = bit.unwrap_or(drawn);
        if bit > 1 {
            return Err(QbcError::Config(format!("bit must be 0 or 1, got {bit}")));
        }
        let slots = config.slots();
        let psis: Vec<Ket> = (0..slots).map(|_| config.draw_babe_state(&mut rng.babe_states)).collect();

        let mut blocks = Vec::with_capacity(slots);
        let mut known = Vec::with_capacity(slots);
        for psi in &psis {
            let b = adam.prepare(psi, bit, &config.circle, &mut rng.adam_strategy)?;
            blocks.push(b.state);
            known.push(b.known);
        }
        let copies = adam.copies();
        let choices = config.placement_choices();
        if copies > choices {
            return Err(QbcError::Config(format!("{copies} copies do not fit into {choices} places")));
        }
        let placements: Vec<Vec<usize>> = match config.kind {
            ProtocolKind::QBC3m1 => {
                let modes = sample(&mut rng.placement, choices, copies).into_vec();
                (0..slots).map(|s| modes.iter().map(|&q| config.position_of(s, q)).collect()).collect()
            }
            _ => (0..slots)
                .map(|s| {
                    sample(&mut rng.placement, choices, copies).into_iter().map(|k| config.position_of(s, k)).collect()
                })
                .collect(),
        };

        let total = config.positions();
        let mut cells: Vec<Option<Cell>> = vec![None; total];
        for (slot, ps) in placements.iter().enumerate() {
            for (copy, &p) in ps.iter().enumerate() {
                cells[p] = Some(Cell::Copy { slot, copy });
            }
        }
        let pair = config.circle.orthogonal_pair();
        let mut decoy_labels = vec![None; total];
        let cells: Vec<Cell> = cells
            .into_iter()
            .enumerate()
            .map(|(p, c)| match c {
                Some(c) => c,
                None => {
                    if config.decoys() == DecoySet::TwoOrthogonal {
                        let l: u8 = rng.decoys.random_range(0..2);
                        decoy_labels[p] = Some(l);
                        Cell::Decoy(pair[l as usize].clone())
                    } else {
                        Cell::Decoy(config.draw_decoy(&mut rng.decoys))
                    }
                }
            })
            .collect();

        let mut session = Session {
            config,
            adam,
            rng,
            phase: Phase::Committed,
            bit,
            psis,
            blocks,
            known,
            cells,
            placements,
            decoy_labels,
            outcomes: vec![None; total],
            babe_guess: None,
            opening: None,
            open_check: None,
            verdict: None,
        };
        if babe.measures_at_commit(config.kind) {
            session.babe_measure_all()?;
            session.babe_guess = babe.guess(config, &session.outcomes, &mut session.rng.babe_guess);
        }
        Ok(session)
    }

    fn slot_basis(&self, slot: usize) -> Result<MeasurementBasis> {
        let psi = &self.psis[slot];
        MeasurementBasis::new(vec![psi.clone(), psi.apply(&flip_of(self.config))?])
    }

    /// Measures every position in `{ψ^s, R(π,C)ψ^s}`; payload copies in
    /// copy order, then decoys in position order.
    fn babe_measure_all(&mut self) -> Result<()> {
        let bases: Vec<MeasurementBasis> = (0..self.psis.len()).map(|s| self.slot_basis(s)).collect::<Result<_>>()?;
        for (slot, basis) in bases.iter().enumerate().take(self.placements.len()) {
            for copy in 0..self.placements[slot].len() {
                let p = self.placements[slot][copy];
                let (k, after) = measure_subsystem(&self.blocks[slot], copy, basis, &mut self.rng.payload_measure)?;
                self.blocks[slot] = after;
                self.outcomes[p] = Some(k as u8);
            }
        }
        for p in 0..self.cells.len() {
            if let Cell::Decoy(k) = &self.cells[p] {
                let slot = self.config.slot_of(p);
                let (o, after) = born_collapse(k, &bases[slot], &mut self.rng.decoy_measure)?;
                self.cells[p] = Cell::Decoy(after);
                self.outcomes[p] = Some(o as u8);
            }
        }
        Ok(())
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Adam's committed bit.
    pub fn bit(&self) -> u8 {
        self.bit
    }

    /// Babe's commit-time outcomes per position (0 for `ψ`, 1 for
    /// `R(π,C)ψ`); `None` where she has not measured.
    pub fn outcomes(&self) -> &[Option<u8>] {
        &self.outcomes
    }

    pub fn babe_guess(&self) -> Option<u8> {
        self.babe_guess
    }

    /// 0-based positions of each slot's copies.
    pub fn placements(&self) -> &[Vec<usize>] {
        &self.placements
    }

    pub fn verdict(&self) -> Option<bool> {
        self.verdict
    }

    fn require(&self, phase: Phase, action: &str) -> Result<()> {
        if self.phase != phase {
            return Err(QbcError::Order(format!("{action} needs phase {phase:?}, session is {:?}", self.phase)));
        }
        Ok(())
    }

    /// Adam's opening for `intent`. Matching-intent openings measure his
    /// kept ancilla, which is why this takes `&mut self`.
    pub fn opening_for(&mut self, intent: Intent) -> Result<Opening> {
        self.require(Phase::Committed, "preparing an opening")?;
        let bit = match intent {
            Intent::Same => self.bit,
            Intent::Change => 1 - self.bit,
            Intent::Matching => match self.adam.learn(&self.blocks[0], &mut self.rng.adam_open)? {
                Some((b, after)) => {
                    self.blocks[0] = after;
                    b
                }
                None => self.bit,
            },
        };
        let mut positions = Vec::with_capacity(self.placements.len());
        for (slot, ps) in self.placements.iter().enumerate() {
            let p = if self.adam.opens_decoy() {
                let free: Vec<usize> = (0..self.config.placement_choices())
                    .map(|k| self.config.position_of(slot, k))
                    .filter(|p| matches!(self.cells[*p], Cell::Decoy(_)))
                    .collect();
                if free.is_empty() {
                    return Err(QbcError::Config("no decoy position to open".into()));
                }
                free[self.rng.adam_open.random_range(0..free.len())]
            } else {
                ps[self.adam.copy_for(bit)]
            };
            positions.push(p + 1);
        }
        let declared = if self.config.kind == ProtocolKind::QBCp3u {
            let pair = self.config.circle.orthogonal_pair();
            let mut d = Vec::with_capacity(self.cells.len());
            for (p, cell) in self.cells.iter().enumerate() {
                if positions.contains(&(p + 1)) {
                    d.push(None);
                    continue;
                }
                let label = match cell {
                    Cell::Decoy(_) => self.decoy_labels[p].expect("QBCp3u decoys carry labels"),
                    Cell::Copy { slot, copy } => match &self.known[*slot][*copy] {
                        Some(k) => {
                            let o0 = pair[0].inner(k).norm_sqr();
                            let o1 = pair[1].inner(k).norm_sqr();
                            u8::from(o1 > o0)
                        }
                        None => self.rng.adam_open.random_range(0..2),
                    },
                };
                d.push(Some(label));
            }
            Some(d)
        } else {
            None
        };
        Ok(Opening { bit, positions, declared })
    }

    fn well_formed(&self, o: &Opening) -> bool {
        let c = self.config;
        if o.bit > 1 || o.positions.len() != c.slots() {
            return false;
        }
        for (slot, &p) in o.positions.iter().enumerate() {
            if p == 0 || p > c.positions() || c.slot_of(p - 1) != slot {
                return false;
            }
        }
        if c.kind == ProtocolKind::QBC3m1 {
            let mode = (o.positions[0] - 1) / c.m;
            if o.positions.iter().any(|p| (p - 1) / c.m != mode) {
                return false;
            }
        }
        if c.kind == ProtocolKind::QBCp3u {
            let Some(d) = &o.declared else { return false };
            if d.len() != c.positions() {
                return false;
            }
            for (p, x) in d.iter().enumerate() {
                let opened = o.positions.contains(&(p + 1));
                if opened != x.is_none() || x.is_some_and(|l| l > 1) {
                    return false;
                }
            }
        }
        true
    }

    /// QBCp3u check: project every position onto the state Adam names.
    fn projective_check(&mut self, o: &Opening) -> Result<bool> {
        let pair = self.config.circle.orthogonal_pair();
        let target = if o.bit == 0 { self.psis[0].clone() } else { self.psis[0].apply(&flip_of(self.config))? };
        let declared = o.declared.as_ref().expect("checked by well_formed");
        let mut pass = true;
        for (p, label) in declared.iter().enumerate().take(self.cells.len()) {
            let want = match label {
                None => target.clone(),
                Some(l) => pair[*l as usize].clone(),
            };
            let basis = projective_basis(&want);
            let k = match self.cells[p].clone() {
                Cell::Decoy(k) => {
                    let (r, after) = born_collapse(&k, &basis, &mut self.rng.verify)?;
                    self.cells[p] = Cell::Decoy(after);
                    r
                }
                Cell::Copy { slot, copy } => {
                    let (r, after) = measure_subsystem(&self.blocks[slot], copy, &basis, &mut self.rng.verify)?;
                    self.blocks[slot] = after;
                    r
                }
            };
            pass &= k == 0;
        }
        Ok(pass)
    }

    /// Babe receives the opening. In QBCp3u she performs her projections now.
    pub fn open(&mut self, opening: Opening) -> Result<()> {
        self.require(Phase::Committed, "opening")?;
        let ok = self.well_formed(&opening);
        self.open_check = Some(if !ok {
            false
        } else if self.config.kind == ProtocolKind::QBCp3u {
            self.projective_check(&opening)?
        } else {
            true
        });
        self.opening = Some(opening);
        self.phase = Phase::Opened;
        Ok(())
    }

    /// Babe's verdict. For measure-first protocols this compares her
    /// recorded outcome at every opened position with the opened bit.
    pub fn verify(&mut self) -> Result<bool> {
        self.require(Phase::Opened, "verifying")?;
        let o = self.opening.as_ref().expect("set by open");
        let mut pass = self.open_check.unwrap_or(false);
        if pass && self.config.kind.measures_first() {
            pass = o.positions.iter().all(|&p| self.outcomes[p - 1] == Some(o.bit));
        }
        self.verdict = Some(pass);
        self.phase = Phase::Verified;
        Ok(pass)
    }

    /// Runs opening and verification for `intent` on a fork of this session.
    pub fn try_intent(&self, intent: Intent) -> Result<bool> {
        let mut fork = self.clone();
        let o = fork.opening_for(intent)?;
        fork.open(o)?;
        fork.verify()
    }

    /// Serializable record of the run so far.
    pub fn transcript(&self) -> Transcript {
        let c = self.config;
        let mut messages = vec![
            Message {
                sender: Party::Babe,
                phase: Phase::Committed,
                kind: "anonymousStates",
                payload: serde_json::json!({ "qubits": self.psis.len() }),
            },
            Message {
                sender: Party::Adam,
                phase: Phase::Committed,
                kind: "sequence",
                payload: serde_json::json!({ "qubits": c.positions() }),
            },
        ];
        if let Some(o) = &self.opening {
            messages.push(Message {
                sender: Party::Adam,
                phase: Phase::Opened,
                kind: "open",
                payload: serde_json::to_value(o).expect("plain data"),
            });
        }
        if let Some(v) = self.verdict {
            messages.push(Message {
                sender: Party::Babe,
                phase: Phase::Verified,
                kind: "verdict",
                payload: serde_json::json!({ "accept": v }),
            });
        }
        let (group_kind, size) = match c.kind {
            ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => ("sequence", c.positions()),
            ProtocolKind::QBC3m1 => ("qumode", c.m),
            ProtocolKind::QBC3m2 => ("segment", c.big_n),
        };
        let groups = (0..c.positions()).map(|p| p + 1).collect::<Vec<_>>().chunks(size).map(|g| g.to_vec()).collect();
        Transcript {
            protocol: c.kind,
            params: c.params_label(),
            phase: self.phase,
            messages,
            group_kind,
            groups,
            outcomes: self.outcomes.clone(),
            opened_positions: self.opening.as_ref().map(|o| o.positions.clone()),
            opened_bit: self.opening.as_ref().map(|o| o.bit),
            verdict: self.verdict,
        }
    }

    /// Babe's anonymous states; for inspection in tests and demos only.
    pub fn anonymous_states(&self) -> Vec<KetJson> {
        self.psis.iter().map(KetJson::from).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Message {
    pub sender: Party,
    pub phase: Phase,
    pub kind: &'static str,
    pub payload: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Transcript {
    pub protocol: ProtocolKind,
    pub params: String,
    pub phase: Phase,
    pub messages: Vec<Message>,
    /// What a group of positions is called for this protocol.
    pub group_kind: &'static str,
    /// 1-based positions per sequence, qumode or segment.
    pub groups: Vec<Vec<usize>>,
    pub outcomes: Vec<Option<u8>>,
    pub opened_positions: Option<Vec<usize>>,
    pub opened_bit: Option<u8>,
    pub verdict: Option<bool>,
}

/// Per-trial results the harness aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    pub bit: u8,
    /// Verdict for Adam's default intent.
    pub accept: bool,
    pub babe_correct: Option<bool>,
    /// Verdicts for [`Intent::ALL`], in order.
    pub intents: [Option<bool>; 3],
}

/// One full run: commit, then each requested intent on a fork.
pub fn run_trial(
    config: &ProtocolConfig,
    adam: &dyn AdamStrategy,
    babe: &dyn BabeStrategy,
    streams: &TrialStreams,
    intents: &[Intent],
) -> Result<TrialOutcome> {
    let s = Session::commit(config, adam, babe, streams, None)?;
    let mut out =
        TrialOutcome { bit: s.bit(), babe_correct: s.babe_guess().map(|g| g == s.bit()), ..TrialOutcome::default() };
    let default = adam.default_intent();
    for (k, intent) in Intent::ALL.iter().enumerate() {
        if intents.contains(intent) || *intent == default {
            let v = s.try_intent(*intent)?;
            if intents.contains(intent) {
                out.intents[k] = Some(v);
            }
            if *intent == default {
                out.accept = v;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::strategies::{resolve_adam, resolve_babe, StrategyRef};

    fn run(config: &ProtocolConfig, adam: &str, babe: &str, trials: u64, intent: Intent) -> f64 {
        let a = resolve_adam(&StrategyRef::new(adam), config).unwrap();
        let b = resolve_babe(&StrategyRef::new(babe), config).unwrap();
        let mut ok = 0;
        for t in 0..trials {
            let out = run_trial(config, a.as_ref(), b.as_ref(), &TrialStreams::derive(9, t), &[intent]).unwrap();
            ok += out.intents[Intent::ALL.iter().position(|i| *i == intent).unwrap()].unwrap() as u64;
        }
        ok as f64 / trials as f64
    }

    #[test]
    fn honest_runs_always_accept() {
        for c in [
            ProtocolConfig::qbcp3m(3),
            ProtocolConfig::qbcp3u(4),
            ProtocolConfig::qbc3m1(3, 4),
            ProtocolConfig::qbc3m2(3, 5),
        ] {
            assert_eq!(run(&c, "honest", "honest", 300, Intent::Same), 1.0, "{:?}", c.kind);
            assert_eq!(run(&c, "honest", "honest", 100, Intent::Change), 0.0, "{:?}", c.kind);
        }
    }

    #[test]
    fn phase_order_enforced() {
        let c = ProtocolConfig::qbcp3m(3);
        let a = resolve_adam(&StrategyRef::new("honest"), &c).unwrap();
        let b = resolve_babe(&StrategyRef::new("honest"), &c).unwrap();
        let mut s = Session::commit(&c, a.as_ref(), b.as_ref(), &TrialStreams::derive(1, 1), Some(1)).unwrap();
        assert!(matches!(s.verify(), Err(QbcError::Order(_))));
        let o = s.opening_for(Intent::Same).unwrap();
        s.open(o.clone()).unwrap();
        assert!(matches!(s.open(o), Err(QbcError::Order(_))));
        assert!(s.verify().unwrap());
        assert!(matches!(s.verify(), Err(QbcError::Order(_))));
        let t = s.transcript();
        assert_eq!(t.phase, Phase::Verified);
        assert_eq!(t.messages.iter().filter(|m| m.kind == "verdict").count(), 1);
    }

    #[test]
    fn out_of_range_opening_rejects() {
        let c = ProtocolConfig::qbcp3m(3);
        let a = resolve_adam(&StrategyRef::new("honest"), &c).unwrap();
        let b = resolve_babe(&StrategyRef::new("honest"), &c).unwrap();
        let mut s = Session::commit(&c, a.as_ref(), b.as_ref(), &TrialStreams::derive(1, 2), None).unwrap();
        let bit = s.bit();
        s.open(Opening { bit, positions: vec![4], declared: None }).unwrap();
        assert!(!s.verify().unwrap());
    }

    #[test]
    fn segment_transcript_shape() {
        let c = ProtocolConfig::qbc3m2(3, 5);
        let a = resolve_adam(&StrategyRef::new("honest"), &c).unwrap();
        let b = resolve_babe(&StrategyRef::new("honest"), &c).unwrap();
        let mut s = Session::commit(&c, a.as_ref(), b.as_ref(), &TrialStreams::derive(3, 0), None).unwrap();
        let o = s.opening_for(Intent::Same).unwrap();
        s.open(o).unwrap();
        s.verify().unwrap();
        let t = s.transcript();
        assert_eq!(t.groups.len(), 3);
        assert!(t.groups.iter().all(|g| g.len() == 5));
        assert_eq!(t.outcomes.iter().filter(|x| x.is_some()).count(), 15);
    }

    #[test]
    fn wrong_position_is_a_coin() {
        let c = ProtocolConfig::qbcp3m(3);
        let r = run(&c, "wrong-position", "honest", 4000, Intent::Same);
        assert!((r - 0.5).abs() < 0.03, "{r}");
    }

    #[test]
    fn entangle_delay_learns_outcome() {
        let c = ProtocolConfig::qbcp3m(3);
        assert_eq!(run(&c, "entangle-delay", "honest", 500, Intent::Matching), 1.0);
        let r = run(&c, "entangle-delay", "honest", 4000, Intent::Same);
        assert!((r - 0.5).abs() < 0.03, "{r}");
    }
}
