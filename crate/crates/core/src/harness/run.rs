use std::collections::{BTreeMap, HashSet};

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Prediction, REPORT_SCHEMA};
use super::spec::{ExperimentSpec, Metric};
use super::stats::{z_score, Estimate};
use crate::error::{QbcError, Result};
use crate::protocols::{
    resolve_adam, resolve_babe, run_trial, AdamStrategy, BabeStrategy, Intent, ProtocolKind, StrategyKind,
};
use crate::rng::{Role, TrialStreams};

/// Trials per work unit. Chunks are the unit of parallelism; boundaries do
/// not affect results.
pub const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `Some(1)` runs on the calling thread, `None` uses
    /// rayon's default.
    pub threads: Option<usize>,
}

impl RunOptions {
    pub fn single_threaded() -> Self {
        RunOptions { threads: Some(1) }
    }
}

/// Success and trial counters per metric, indexed like [`Metric::ALL`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub successes: [u64; 5],
    pub trials: [u64; 5],
}

impl Counts {
    fn add(mut self, o: Counts) -> Counts {
        for k in 0..5 {
            self.successes[k] += o.successes[k];
            self.trials[k] += o.trials[k];
        }
        self
    }

    fn record(&mut self, m: Metric, ok: bool) {
        let k = idx(m);
        self.trials[k] += 1;
        self.successes[k] += ok as u64;
    }
}

fn idx(m: Metric) -> usize {
    Metric::ALL.iter().position(|x| *x == m).expect("metric listed")
}

/// Metrics estimated when a spec gives no `outputs`.
pub fn default_metrics(adam: &dyn AdamStrategy, babe: &dyn BabeStrategy) -> Vec<Metric> {
    let mut v = vec![Metric::Accept];
    if babe.id() != "honest" {
        v.push(Metric::BabeGuess);
    }
    if adam.kind() == StrategyKind::Attack {
        v.extend([Metric::AdamSameBit, Metric::AdamBitChange, Metric::AdamMatching]);
    }
    v
}

fn metrics_for(spec: &ExperimentSpec, adam: &dyn AdamStrategy, babe: &dyn BabeStrategy) -> Result<Vec<Metric>> {
    let mut v = match &spec.outputs {
        Some(o) => o.clone(),
        None => default_metrics(adam, babe),
    };
    v.sort_unstable();
    v.dedup();
    if v.contains(&Metric::BabeGuess) && babe.id() == "honest" {
        return Err(QbcError::Config(
            "metric babe_guess needs a guessing Babe strategy (majority or single-guess)".into(),
        ));
    }
    Ok(v)
}

fn intent_of(adam: &dyn AdamStrategy, m: Metric) -> Option<Intent> {
    match m {
        Metric::Accept => Some(adam.default_intent()),
        _ => m.intent(),
    }
}

/// Closed-form prediction for `m`, where one is defined for this
/// combination of protocol and strategies.
pub fn prediction_for(
    spec: &ExperimentSpec,
    adam: &dyn AdamStrategy,
    babe: &dyn BabeStrategy,
    m: Metric,
) -> Option<Prediction> {
    let config = &spec.protocol;
    let slots = config.slots() as i32;
    if m == Metric::BabeGuess {
        // The vote formulas assume honestly modulated anonymous qubits.
        if adam.kind() != StrategyKind::Honest {
            return None;
        }
        let (v, f) = babe.prediction(config)?;
        return Some(Prediction { value: v, formula: f.into() });
    }
    let intent = intent_of(adam, m)?;
    if m == Metric::AdamBitChange {
        if let Some(p) = spec.p_a {
            return Some(Prediction { value: p.powi(slots), formula: "config-pA".into() });
        }
    }
    let honest = adam.kind() == StrategyKind::Honest;
    // Per-slot rates compose as a product only when every slot is checked
    // at commit time; learned outcomes are only tied to a single slot.
    if !honest && !config.kind.measures_first() {
        return None;
    }
    if !honest && intent == Intent::Matching && slots != 1 {
        return None;
    }
    let (v, f) = adam.slot_prediction(intent)?;
    Some(Prediction { value: v.powi(slots), formula: f.into() })
}

fn run_range(
    spec: &ExperimentSpec,
    adam: &dyn AdamStrategy,
    babe: &dyn BabeStrategy,
    metrics: &[Metric],
    intents: &[Intent],
    range: std::ops::Range<u64>,
) -> Result<Counts> {
    let mut c = Counts::default();
    for t in range {
        let streams = TrialStreams::derive(spec.master_seed, t);
        let out = run_trial(&spec.protocol, adam, babe, &streams, intents)?;
        for &m in metrics {
            match m {
                Metric::Accept => c.record(m, out.accept),
                Metric::BabeGuess => {
                    if let Some(ok) = out.babe_correct {
                        c.record(m, ok);
                    }
                }
                _ => {
                    let i = m.intent().expect("intent metric");
                    let k = Intent::ALL.iter().position(|x| *x == i).expect("intent listed");
                    if let Some(ok) = out.intents[k] {
                        c.record(m, ok);
                    }
                }
            }
        }
    }
    Ok(c)
}

/// Raw counters for `spec`, without building a report.
pub fn run_counts(spec: &ExperimentSpec, opts: RunOptions) -> Result<Counts> {
    spec.validate()?;
    let adam = resolve_adam(&spec.adam_strategy, &spec.protocol)?;
    let babe = resolve_babe(&spec.babe_strategy, &spec.protocol)?;
    let metrics = metrics_for(spec, adam.as_ref(), babe.as_ref())?;
    count(spec, adam.as_ref(), babe.as_ref(), &metrics, opts)
}

fn count(
    spec: &ExperimentSpec,
    adam: &dyn AdamStrategy,
    babe: &dyn BabeStrategy,
    metrics: &[Metric],
    opts: RunOptions,
) -> Result<Counts> {
    if metrics.is_empty() {
        return Ok(Counts::default());
    }
    let intents: Vec<Intent> = metrics.iter().filter_map(|m| m.intent()).collect();
    let chunks = spec.trials.div_ceil(CHUNK);
    let range = |k: u64| k * CHUNK..((k + 1) * CHUNK).min(spec.trials);
    if opts.threads == Some(1) {
        let mut total = Counts::default();
        for k in 0..chunks {
            total = total.add(run_range(spec, adam, babe, metrics, &intents, range(k))?);
        }
        return Ok(total);
    }
    let work = || {
        (0..chunks)
            .into_par_iter()
            .map(|k| run_range(spec, adam, babe, metrics, &intents, range(k)))
            .try_reduce(Counts::default, |a, b| Ok(a.add(b)))
    };
    match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| QbcError::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    run_experiment_with(spec, RunOptions::default())
}

pub fn run_experiment_with(spec: &ExperimentSpec, opts: RunOptions) -> Result<ExperimentReport> {
    spec.validate()?;
    let adam = resolve_adam(&spec.adam_strategy, &spec.protocol)?;
    let babe = resolve_babe(&spec.babe_strategy, &spec.protocol)?;
    let metrics = metrics_for(spec, adam.as_ref(), babe.as_ref())?;
    let counts = count(spec, adam.as_ref(), babe.as_ref(), &metrics, opts)?;

    // An explicit empty list still reports the predictions of the default set.
    let predicted = if metrics.is_empty() { default_metrics(adam.as_ref(), babe.as_ref()) } else { metrics.clone() };
    let mut estimates = BTreeMap::new();
    let mut predictions = BTreeMap::new();
    let mut agreement = BTreeMap::new();
    for &m in &metrics {
        let k = idx(m);
        if counts.trials[k] == 0 {
            continue;
        }
        estimates.insert(m.name().to_string(), Estimate::from_counts(counts.successes[k], counts.trials[k]));
    }
    for &m in &predicted {
        if let Some(p) = prediction_for(spec, adam.as_ref(), babe.as_ref(), m) {
            if let Some(e) = estimates.get(m.name()) {
                agreement.insert(m.name().to_string(), z_score(e, p.value));
            }
            predictions.insert(m.name().to_string(), p);
        }
    }
    Ok(ExperimentReport {
        schema: REPORT_SCHEMA.into(),
        protocol: spec.protocol.kind.name().into(),
        params: spec.protocol.params_label(),
        config: spec.protocol.clone(),
        adam_strategy: spec.adam_strategy.clone(),
        babe_strategy: spec.babe_strategy.clone(),
        trials: spec.trials,
        master_seed: spec.master_seed,
        estimates,
        predictions,
        agreement,
    })
}

/// Bit-change success for one sequence size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheatRow {
    /// `n` for single-slot protocols, `N` otherwise.
    pub size: usize,
    pub estimate: Estimate,
    pub prediction: Option<Prediction>,
}

/// Estimates the probability that Adam opens the bit he did not commit to,
/// once per size in `sizes`. Every size reuses the same trial streams, so
/// differences across sizes come from the protocol, not from sampling.
pub fn estimate_adam_cheat(spec: &ExperimentSpec, sizes: &[usize], opts: RunOptions) -> Result<Vec<CheatRow>> {
    if sizes.is_empty() {
        return Err(QbcError::Empty("sizes"));
    }
    sizes
        .iter()
        .map(|&size| {
            let mut s = spec.clone();
            match s.protocol.kind {
                ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => s.protocol.n = size,
                _ => s.protocol.big_n = size,
            }
            s.outputs = Some(vec![Metric::AdamBitChange]);
            let r = run_experiment_with(&s, opts)?;
            Ok(CheatRow {
                size,
                estimate: r.estimates[Metric::AdamBitChange.name()].clone(),
                prediction: r.predictions.get(Metric::AdamBitChange.name()).cloned(),
            })
        })
        .collect()
}

/// Number of trial pairs among `trials` whose streams for `role` begin with
/// the same four 64-bit draws.
pub fn stream_collisions(master_seed: u64, trials: u64, role: Role) -> u64 {
    let mut seen = HashSet::with_capacity(trials as usize);
    let mut collisions = 0;
    for t in 0..trials {
        let mut rng = TrialStreams::derive(master_seed, t).role(role);
        let head = [rng.next_u64(), rng.next_u64(), rng.next_u64(), rng.next_u64()];
        if !seen.insert(head) {
            collisions += 1;
        }
    }
    collisions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{ProtocolConfig, StrategyRef};

    fn majority(n: usize, trials: u64) -> ExperimentSpec {
        ExperimentSpec::new(ProtocolConfig::qbcp3m(n))
            .with_babe(StrategyRef::new("majority"))
            .with_trials(trials)
            .with_seed(11)
    }

    #[test]
    fn sharded_and_sequential_counts_agree() {
        let s = majority(3, 10_000);
        let a = run_counts(&s, RunOptions::single_threaded()).unwrap();
        let b = run_counts(&s, RunOptions { threads: Some(3) }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials[idx(Metric::BabeGuess)], 10_000);
    }

    #[test]
    fn majority_babe_matches_closed_form() {
        let r = run_experiment(&majority(3, 20_000)).unwrap();
        let e = &r.estimates["babe_guess"];
        assert_eq!(r.predictions["babe_guess"].value, 0.75);
        assert!(r.agreement["babe_guess"].unwrap().abs() < 4.0, "{e:?}");
        assert_eq!(r.estimates["accept"].mean, 1.0);
        assert_eq!(r.agreement["accept"], Some(0.0));
    }

    #[test]
    fn empty_outputs_give_predictions_only() {
        let r = run_experiment(&majority(5, 10).with_outputs(vec![])).unwrap();
        assert!(r.estimates.is_empty());
        assert!(r.agreement.is_empty());
        assert_eq!(r.predictions["babe_guess"].value, 0.6875);
    }

    #[test]
    fn babe_guess_needs_guessing_babe() {
        let s = ExperimentSpec::new(ProtocolConfig::qbcp3m(3)).with_outputs(vec![Metric::BabeGuess]);
        assert!(matches!(run_experiment(&s), Err(QbcError::Config(_))));
        let s = ExperimentSpec::new(ProtocolConfig::qbcp3m(3)).with_adam(StrategyRef::new("nope"));
        assert!(matches!(run_experiment(&s), Err(QbcError::UnknownStrategy(_))));
    }

    #[test]
    fn cheat_rows_per_size() {
        let s = ExperimentSpec::new(ProtocolConfig::qbcp3m(3))
            .with_adam(StrategyRef::new("measure-resend"))
            .with_trials(2000);
        let rows = estimate_adam_cheat(&s, &[3, 5], RunOptions::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].prediction.as_ref().unwrap().value, 0.75);
        assert!((rows[0].estimate.mean - 0.75).abs() < 0.04);
    }

    #[test]
    fn pa_overrides_bit_change_prediction() {
        let mut s = ExperimentSpec::new(ProtocolConfig::qbc3m2(3, 5)).with_adam(StrategyRef::new("measure-resend"));
        s.p_a = Some(0.8);
        s.outputs = Some(vec![]);
        let r = run_experiment(&s).unwrap();
        let p = &r.predictions["adam_bit_change"];
        assert!((p.value - 0.512).abs() < 1e-12);
        assert_eq!(p.formula, "config-pA");
    }

    #[test]
    fn no_stream_collisions() {
        assert_eq!(stream_collisions(5, 20_000, Role::BabeStates), 0);
    }
}
