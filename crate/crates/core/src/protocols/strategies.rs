//! Pluggable behaviours for both parties, resolved by id from experiment
//! specs.

use std::fmt::Debug;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::closed_form::{concealing_closed_form, majority_vote_pbc, pattern_majority_pbc, single_guess_pbc};
use super::config::{BabeStateSet, ProtocolConfig, ProtocolKind};
use crate::cheat::maximize_over_unitaries;
use crate::error::{QbcError, Result};
use crate::qcore::{measure_sample, tensor, CMatrix, GreatCircle, Ket, MeasurementBasis};
use crate::rng::{stream_from_seed, Stream};

/// Strategy id plus free-form parameters, as written in experiment specs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyRef {
    pub id: String,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub params: serde_json::Value,
}

impl StrategyRef {
    pub fn new(id: &str) -> Self {
        StrategyRef { id: id.to_string(), params: serde_json::Value::Null }
    }

    pub fn with_params(id: &str, params: serde_json::Value) -> Self {
        StrategyRef { id: id.to_string(), params }
    }

    fn parse<T: for<'de> Deserialize<'de> + Default>(&self) -> Result<T> {
        if self.params.is_null() {
            return Ok(T::default());
        }
        serde_json::from_value(self.params.clone())
            .map_err(|e| QbcError::Config(format!("parameters of `{}`: {e}", self.id)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum StrategyKind {
    /// Follows the protocol.
    Honest,
    /// Tries to open a bit other than the one his honest commitment fixes.
    Attack,
    /// Deviates from the protocol without an attack goal.
    Misbehaving,
}

/// What Adam tries to open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Intent {
    /// The bit he committed to.
    Same,
    /// The other bit.
    Change,
    /// Whatever bit his post-commit information says will pass.
    Matching,
}

impl Intent {
    pub const ALL: [Intent; 3] = [Intent::Same, Intent::Change, Intent::Matching];

    pub fn metric(self) -> &'static str {
        match self {
            Intent::Same => "adam_same_bit",
            Intent::Change => "adam_bit_change",
            Intent::Matching => "adam_matching",
        }
    }
}

/// Adam's qubits for one anonymous slot: `copies` qubits that go into the
/// sequence, followed by any ancillas he keeps.
#[derive(Debug, Clone)]
pub struct PayloadBlock {
    pub state: Ket,
    pub copies: usize,
    /// Copies whose state Adam knows classically.
    pub known: Vec<Option<Ket>>,
}

pub trait AdamStrategy: Debug + Send + Sync {
    fn id(&self) -> &'static str;
    fn kind(&self) -> StrategyKind;
    fn default_intent(&self) -> Intent;
    /// Qubits per slot placed into the sequence.
    fn copies(&self) -> usize {
        1
    }
    fn prepare(&self, psi: &Ket, bit: u8, circle: &GreatCircle, rng: &mut Stream) -> Result<PayloadBlock>;
    /// Copy revealed when opening `bit`.
    fn copy_for(&self, bit: u8) -> usize {
        if self.copies() == 1 {
            0
        } else {
            bit as usize
        }
    }
    /// Bit learned by measuring kept ancillas, with the block left after
    /// that measurement.
    fn learn(&self, _block: &Ket, _rng: &mut Stream) -> Result<Option<(u8, Ket)>> {
        Ok(None)
    }
    /// Whether Adam reveals a decoy position instead of his qubit.
    fn opens_decoy(&self) -> bool {
        false
    }
    /// Success probability of one slot under `intent` in measure-first
    /// protocols, with the formula it comes from.
    fn slot_prediction(&self, intent: Intent) -> Option<(f64, &'static str)>;
}

fn modulate(psi: &Ket, bit: u8, circle: &GreatCircle) -> Result<Ket> {
    if bit == 0 {
        Ok(psi.clone())
    } else {
        psi.apply(&circle.flip())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Honest;

impl AdamStrategy for Honest {
    fn id(&self) -> &'static str {
        "honest"
    }
    fn kind(&self) -> StrategyKind {
        StrategyKind::Honest
    }
    fn default_intent(&self) -> Intent {
        Intent::Same
    }
    fn prepare(&self, psi: &Ket, bit: u8, circle: &GreatCircle, _rng: &mut Stream) -> Result<PayloadBlock> {
        Ok(PayloadBlock { state: modulate(psi, bit, circle)?, copies: 1, known: vec![None] })
    }
    fn slot_prediction(&self, intent: Intent) -> Option<(f64, &'static str)> {
        match intent {
            Intent::Same | Intent::Matching => Some((1.0, "honest-verification")),
            Intent::Change => Some((0.0, "honest-verification")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ResendBasis {
    Fixed,
    #[default]
    Random,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureResendParams {
    #[serde(default)]
    basis: ResendBasis,
}

/// Measures `ψ` in a circle basis and sends the result `s` as the copy for
/// bit 0 and `R(π,C)s` as the copy for bit 1.
#[derive(Debug, Clone)]
pub struct MeasureResend {
    pub basis: ResendBasis,
}

impl AdamStrategy for MeasureResend {
    fn id(&self) -> &'static str {
        "measure-resend"
    }
    fn kind(&self) -> StrategyKind {
        StrategyKind::Attack
    }
    fn default_intent(&self) -> Intent {
        Intent::Change
    }
    fn copies(&self) -> usize {
        2
    }
    fn prepare(&self, psi: &Ket, _bit: u8, circle: &GreatCircle, rng: &mut Stream) -> Result<PayloadBlock> {
        let start = match self.basis {
            ResendBasis::Fixed => 0.0,
            ResendBasis::Random => {
                if rng.random::<bool>() {
                    std::f64::consts::FRAC_PI_2
                } else {
                    0.0
                }
            }
        };
        let pair = [circle.state(start), circle.state(start + std::f64::consts::PI)];
        let basis = MeasurementBasis::new(pair.to_vec())?;
        let k = measure_sample(psi, &basis, rng)?;
        let s = pair[k].clone();
        let rs = s.apply(&circle.flip())?;
        Ok(PayloadBlock { state: tensor(&[s.clone(), rs.clone()])?, copies: 2, known: vec![Some(s), Some(rs)] })
    }
    fn slot_prediction(&self, _intent: Intent) -> Option<(f64, &'static str)> {
        Some((0.75, "born-average"))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntangleDelayParams {
    #[serde(default = "default_lambda0")]
    lambda0: f64,
}

impl Default for EntangleDelayParams {
    fn default() -> Self {
        EntangleDelayParams { lambda0: default_lambda0() }
    }
}

fn default_lambda0() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

/// Sends `λ0 ψ|e0⟩ + λ1 R(π,C)ψ|e1⟩` and keeps the ancilla, which tells him
/// Babe's outcome once she has measured.
#[derive(Debug, Clone)]
pub struct EntangleDelay {
    pub lambda0: f64,
}

impl EntangleDelay {
    fn lambda1(&self) -> f64 {
        (1.0 - self.lambda0 * self.lambda0).max(0.0).sqrt()
    }
}

impl AdamStrategy for EntangleDelay {
    fn id(&self) -> &'static str {
        "entangle-delay"
    }
    fn kind(&self) -> StrategyKind {
        StrategyKind::Attack
    }
    fn default_intent(&self) -> Intent {
        Intent::Change
    }
    fn prepare(&self, psi: &Ket, _bit: u8, circle: &GreatCircle, _rng: &mut Stream) -> Result<PayloadBlock> {
        let a = tensor(&[psi.clone(), Ket::basis(2, 0)])?;
        let b = tensor(&[psi.apply(&circle.flip())?, Ket::basis(2, 1)])?;
        let amps = a.amplitudes() * Complex64::from(self.lambda0) + b.amplitudes() * Complex64::from(self.lambda1());
        Ok(PayloadBlock { state: Ket::normalized(amps, vec![2, 2])?, copies: 1, known: vec![None] })
    }
    fn learn(&self, block: &Ket, rng: &mut Stream) -> Result<Option<(u8, Ket)>> {
        let (k, after) = crate::qcore::measure_subsystem(block, 1, &MeasurementBasis::computational(2), rng)?;
        Ok(Some((k as u8, after)))
    }
    fn slot_prediction(&self, intent: Intent) -> Option<(f64, &'static str)> {
        match intent {
            // the committed bit is uniform, so λ0² and λ1² are averaged
            Intent::Same | Intent::Change => Some((0.5, "born-average")),
            Intent::Matching => Some((1.0, "born-average")),
        }
    }
}

/// Sends `U_b ψ` for the committed bit and `U_{1−b} g` for a random circle
/// state `g` as the copy for the other bit.
#[derive(Debug, Clone, Default)]
pub struct SplitPair;

impl AdamStrategy for SplitPair {
    fn id(&self) -> &'static str {
        "split-pair"
    }
    fn kind(&self) -> StrategyKind {
        StrategyKind::Attack
    }
    fn default_intent(&self) -> Intent {
        Intent::Change
    }
    fn copies(&self) -> usize {
        2
    }
    fn prepare(&self, psi: &Ket, bit: u8, circle: &GreatCircle, rng: &mut Stream) -> Result<PayloadBlock> {
        let g = circle.state(rng.random::<f64>() * std::f64::consts::TAU);
        let real = modulate(psi, bit, circle)?;
        let guess = modulate(&g, 1 - bit, circle)?;
        let (state, known) = if bit == 0 {
            (tensor(&[real, guess.clone()])?, vec![None, Some(guess)])
        } else {
            (tensor(&[guess.clone(), real])?, vec![Some(guess), None])
        };
        Ok(PayloadBlock { state, copies: 2, known })
    }
    fn slot_prediction(&self, intent: Intent) -> Option<(f64, &'static str)> {
        match intent {
            Intent::Same | Intent::Matching => Some((1.0, "born-average")),
            Intent::Change => Some((0.5, "born-average")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClonerParams {
    #[serde(default = "default_budget")]
    budget: usize,
    #[serde(default = "default_cloner_seed")]
    seed: u64,
}

impl Default for ClonerParams {
    fn default() -> Self {
        ClonerParams { budget: default_budget(), seed: default_cloner_seed() }
    }
}

fn default_budget() -> usize {
    4000
}

fn default_cloner_seed() -> u64 {
    0xc10e
}

/// Two-qubit unitary on `ψ ⊗ |0⟩` found by direct search to maximize the
/// clone criterion over Babe's state set; the first output is the copy for
/// bit 0, the second for bit 1.
#[derive(Debug, Clone)]
pub struct NumericCloner {
    pub unitary: CMatrix,
    pub criterion: f64,
}

/// Inputs the clone criterion is averaged over: the four BB84 states, or
/// eight equally spaced circle states, which average every term of the
/// criterion exactly.
pub fn clone_inputs(config: &ProtocolConfig) -> Vec<Ket> {
    match config.babe_set() {
        BabeStateSet::Bb84 => config.circle.bb84().to_vec(),
        BabeStateSet::GreatCircle => {
            (0..8).map(|k| config.circle.state(k as f64 * std::f64::consts::TAU / 8.0)).collect()
        }
    }
}

/// Clone criterion of `W(ψ ⊗ |0⟩)` over `inputs`.
pub fn cloner_criterion(w: &CMatrix, inputs: &[Ket], circle: &GreatCircle) -> f64 {
    let flip = circle.flip();
    let mut total = 0.0;
    for psi in inputs {
        let p = psi.amplitudes();
        let input = DVector::from_vec(vec![p[0], Complex64::from(0.0), p[1], Complex64::from(0.0)]);
        let out = w * input;
        let t = &flip * p;
        // ⟨ψ|ρ_a|ψ⟩ = Σ_r |Σ_a ψ_a* out[a, r]|², and likewise on the second qubit
        let mut fa = 0.0;
        let mut fb = 0.0;
        for r in 0..2 {
            let za = p[0].conj() * out[r] + p[1].conj() * out[2 + r];
            let zb = t[0].conj() * out[2 * r] + t[1].conj() * out[2 * r + 1];
            fa += za.norm_sqr();
            fb += zb.norm_sqr();
        }
        total += 0.5 * fa + 0.5 * fb;
    }
    total / inputs.len() as f64
}

impl NumericCloner {
    pub fn search(config: &ProtocolConfig, budget: usize, seed: u64) -> NumericCloner {
        let inputs = clone_inputs(config);
        let mut rng = stream_from_seed(seed);
        let (unitary, criterion) =
            maximize_over_unitaries(4, budget, &mut rng, |w| cloner_criterion(w, &inputs, &config.circle));
        NumericCloner { unitary, criterion }
    }
}

impl AdamStrategy for NumericCloner {
    fn id(&self) -> &'static str {
        "numeric-cloner"
    }
    fn kind(&self) -> StrategyKind {
        StrategyKind::Attack
    }
    fn default_intent(&self) -> Intent {
        Intent::Change
    }
    fn copies(&self) -> usize {
        2
    }
    fn prepare(&self, psi: &Ket, _bit: u8, _circle: &GreatCircle, _rng: &mut Stream) -> Result<PayloadBlock> {
        let k = tensor(&[psi.clone(), Ket::basis(2, 0)])?.apply(&self.unitary)?;
        Ok(PayloadBlock { state: k, copies: 2, known: vec![None, None] })
    }
    fn slot_prediction(&self, _intent: Intent) -> Option<(f64, &'static str)> {
        Some((self.criterion, "clone-criterion"))
    }
}

/// Commits honestly but opens a randomly chosen decoy position.
#[derive(Debug, Clone, Default)]
pub struct WrongPosition;

impl AdamStrategy for WrongPosition {
    fn id(&self) -> &'static str {
        "wrong-position"
    }
    fn kind(&self) -> StrategyKind {
        StrategyKind::Misbehaving
    }
    fn default_intent(&self) -> Intent {
        Intent::Same
    }
    fn prepare(&self, psi: &Ket, bit: u8, circle: &GreatCircle, rng: &mut Stream) -> Result<PayloadBlock> {
        Honest.prepare(psi, bit, circle, rng)
    }
    fn opens_decoy(&self) -> bool {
        true
    }
    fn slot_prediction(&self, _intent: Intent) -> Option<(f64, &'static str)> {
        Some((0.5, "decoy-born"))
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

/// Ids accepted by [`resolve_adam`].
pub const ADAM_STRATEGIES: [&str; 6] =
    ["honest", "measure-resend", "entangle-delay", "split-pair", "numeric-cloner", "wrong-position"];

/// Cheating strategies, i.e. those whose bit-change rate is an attack.
pub const ATTACK_STRATEGIES: [&str; 4] = ["measure-resend", "entangle-delay", "split-pair", "numeric-cloner"];

pub fn resolve_adam(r: &StrategyRef, config: &ProtocolConfig) -> Result<Box<dyn AdamStrategy>> {
    let s: Box<dyn AdamStrategy> = match r.id.as_str() {
        "honest" => {
            r.parse::<NoParams>()?;
            Box::new(Honest)
        }
        "measure-resend" => Box::new(MeasureResend { basis: r.parse::<MeasureResendParams>()?.basis }),
        "entangle-delay" => {
            let p: EntangleDelayParams = r.parse()?;
            if !(0.0..=1.0).contains(&p.lambda0) {
                return Err(QbcError::Config(format!("lambda0 = {} outside [0, 1]", p.lambda0)));
            }
            Box::new(EntangleDelay { lambda0: p.lambda0 })
        }
        "split-pair" => {
            r.parse::<NoParams>()?;
            Box::new(SplitPair)
        }
        "numeric-cloner" => {
            let p: ClonerParams = r.parse()?;
            Box::new(NumericCloner::search(config, p.budget, p.seed))
        }
        "wrong-position" => {
            r.parse::<NoParams>()?;
            Box::new(WrongPosition)
        }
        other => return Err(QbcError::UnknownStrategy(other.to_string())),
    };
    if s.copies() > config.placement_choices() {
        return Err(QbcError::Config(format!(
            "`{}` places {} qubits per slot but only {} places exist",
            s.id(),
            s.copies(),
            config.placement_choices()
        )));
    }
    if s.opens_decoy() && config.placement_choices() < 2 {
        return Err(QbcError::Config("no decoy position to open".into()));
    }
    Ok(s)
}

pub trait BabeStrategy: Debug + Send + Sync {
    fn id(&self) -> &'static str;
    /// Whether Babe measures every position when the commitment arrives.
    fn measures_at_commit(&self, kind: ProtocolKind) -> bool;
    /// Guess of the committed bit from commit-time outcomes.
    fn guess(&self, config: &ProtocolConfig, outcomes: &[Option<u8>], rng: &mut Stream) -> Option<u8>;
    /// Closed-form success of the guess against honest Adam.
    fn prediction(&self, config: &ProtocolConfig) -> Option<(f64, &'static str)>;
}

#[derive(Debug, Clone, Default)]
pub struct HonestBabe;

impl BabeStrategy for HonestBabe {
    fn id(&self) -> &'static str {
        "honest"
    }
    fn measures_at_commit(&self, kind: ProtocolKind) -> bool {
        kind.measures_first()
    }
    fn guess(&self, _: &ProtocolConfig, _: &[Option<u8>], _: &mut Stream) -> Option<u8> {
        None
    }
    fn prediction(&self, _: &ProtocolConfig) -> Option<(f64, &'static str)> {
        None
    }
}

fn vote(zeros: usize, ones: usize, rng: &mut Stream) -> u8 {
    match zeros.cmp(&ones) {
        std::cmp::Ordering::Greater => 0,
        std::cmp::Ordering::Less => 1,
        std::cmp::Ordering::Equal => rng.random_range(0..2),
    }
}

fn count(outcomes: impl Iterator<Item = Option<u8>>) -> (usize, usize) {
    outcomes.fold((0, 0), |(z, o), x| match x {
        Some(0) => (z + 1, o),
        Some(_) => (z, o + 1),
        None => (z, o),
    })
}

/// Majority vote on outcomes: over all qubits for single-qubit sequences,
/// over all-`ψ` versus all-`R(π,C)ψ` qumode patterns, or per segment and
/// then across segments.
#[derive(Debug, Clone, Default)]
pub struct MajorityBabe;

impl BabeStrategy for MajorityBabe {
    fn id(&self) -> &'static str {
        "majority"
    }
    fn measures_at_commit(&self, _: ProtocolKind) -> bool {
        true
    }
    fn guess(&self, config: &ProtocolConfig, outcomes: &[Option<u8>], rng: &mut Stream) -> Option<u8> {
        match config.kind {
            ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => {
                let (z, o) = count(outcomes.iter().cloned());
                Some(vote(z, o, rng))
            }
            ProtocolKind::QBC3m1 => {
                let m = config.m;
                let (mut z, mut o) = (0, 0);
                for mode in outcomes.chunks(m) {
                    if mode.iter().all(|x| *x == Some(0)) {
                        z += 1;
                    } else if mode.iter().all(|x| *x == Some(1)) {
                        o += 1;
                    }
                }
                Some(vote(z, o, rng))
            }
            ProtocolKind::QBC3m2 => {
                let mut votes = Vec::with_capacity(config.m);
                for seg in outcomes.chunks(config.big_n) {
                    let (z, o) = count(seg.iter().cloned());
                    votes.push(Some(vote(z, o, rng)));
                }
                let (z, o) = count(votes.into_iter());
                Some(vote(z, o, rng))
            }
        }
    }
    fn prediction(&self, config: &ProtocolConfig) -> Option<(f64, &'static str)> {
        match config.kind {
            ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => {
                concealing_closed_form(config.n, 1.0).ok().map(|r| (r.closed_form, "central-binomial"))
            }
            ProtocolKind::QBC3m1 => pattern_majority_pbc(config.big_n, config.m).ok().map(|p| (p, "pattern-majority")),
            ProtocolKind::QBC3m2 => {
                let p = concealing_closed_form(config.big_n, 1.0).ok()?.closed_form;
                majority_vote_pbc(config.m, p).ok().map(|v| (v, "majority-vote"))
            }
        }
    }
}

/// Picks one position at random and reads the bit from its outcome.
#[derive(Debug, Clone, Default)]
pub struct SingleGuessBabe;

impl BabeStrategy for SingleGuessBabe {
    fn id(&self) -> &'static str {
        "single-guess"
    }
    fn measures_at_commit(&self, _: ProtocolKind) -> bool {
        true
    }
    fn guess(&self, _: &ProtocolConfig, outcomes: &[Option<u8>], rng: &mut Stream) -> Option<u8> {
        let k = rng.random_range(0..outcomes.len());
        outcomes[k]
    }
    fn prediction(&self, config: &ProtocolConfig) -> Option<(f64, &'static str)> {
        single_guess_pbc(config.n).ok().map(|p| (p, "single-position"))
    }
}

pub const BABE_STRATEGIES: [&str; 3] = ["honest", "majority", "single-guess"];

pub fn resolve_babe(r: &StrategyRef, config: &ProtocolConfig) -> Result<Box<dyn BabeStrategy>> {
    r.parse::<NoParams>()?;
    match r.id.as_str() {
        "honest" => Ok(Box::new(HonestBabe)),
        "majority" => Ok(Box::new(MajorityBabe)),
        "single-guess" => {
            if config.slots() != 1 {
                return Err(QbcError::Config("single-guess reads one anonymous qubit".into()));
            }
            Ok(Box::new(SingleGuessBabe))
        }
        other => Err(QbcError::UnknownStrategy(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry() {
        let c = ProtocolConfig::qbcp3m(3);
        for id in ADAM_STRATEGIES {
            let s = resolve_adam(&StrategyRef::new(id), &c).unwrap();
            assert_eq!(s.id(), id);
        }
        assert!(matches!(resolve_adam(&StrategyRef::new("teleport"), &c), Err(QbcError::UnknownStrategy(_))));
        assert!(resolve_adam(&StrategyRef::new("split-pair"), &ProtocolConfig::qbcp3m(1)).is_err());
        let bad = StrategyRef::with_params("measure-resend", serde_json::json!({"basis": "fixed", "x": 1}));
        assert!(matches!(resolve_adam(&bad, &c), Err(QbcError::Config(_))));
        for id in BABE_STRATEGIES {
            assert_eq!(resolve_babe(&StrategyRef::new(id), &c).unwrap().id(), id);
        }
    }

    #[test]
    fn cloner_search_beats_trivial_copying() {
        let c = ProtocolConfig::qbcp3m(3);
        let cl = NumericCloner::search(&c, 4000, 1);
        // keeping ψ and sending junk scores ¾; the phase-covariant optimum is ½ + √⅛
        assert!(cl.criterion > 0.8, "{}", cl.criterion);
        assert!(cl.criterion < 0.5 + 0.125f64.sqrt() + 1e-6);
        assert!(crate::qcore::unitarity_error(&cl.unitary) < 1e-9);
    }

    #[test]
    fn cloner_criterion_matches_density_route() {
        let cfg = ProtocolConfig::qbcp3m(3);
        let mut rng = stream_from_seed(5);
        let w = crate::qcore::haar_unitary(4, &mut rng);
        let inputs = clone_inputs(&cfg);
        let outputs: Vec<_> = inputs
            .iter()
            .map(|p| {
                let k = tensor(&[p.clone(), Ket::basis(2, 0)]).unwrap().apply(&w).unwrap();
                (p.clone(), k.projector())
            })
            .collect();
        let a = cloner_criterion(&w, &inputs, &cfg.circle);
        let b = super::super::closed_form::clone_criterion(&outputs, &cfg.circle).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
