//! Regenerates the bundled fixture files.
//!
//! Usage: `cargo run -p qbc-core --example gen_fixtures -- <dir>`

use std::fs;
use std::path::Path;

use qbc_core::cheat::{
    brute_force_cheat_oracle, build_lambda, cheat_report, identical_pair, maximize_over_unitaries, permutation_pair,
    random_pair, Ensemble, EnsemblePairJson,
};
use qbc_core::harness::{Axis, ExperimentSpec, SweepSpec};
use qbc_core::protocols::{BabeStateSet, DecoySet, ProtocolConfig, StrategyRef};
use qbc_core::qcore::fidelity;
use qbc_core::rng::stream_from_seed;
use serde::Serialize;
use serde_json::json;

/// Seed of the random ensemble fixture.
const RANDOM_FIXTURE_SEED: u64 = 7;

fn write<T: Serialize>(dir: &Path, name: &str, value: &T) {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    fs::write(dir.join(name), text).expect("writable fixture dir");
    println!("wrote {name}");
}

fn pair(e: (Ensemble, Ensemble)) -> EnsemblePairJson {
    EnsemblePairJson::from_ensembles(&e.0, &e.1)
}

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "crates/cli/fixtures".into());
    let dir = Path::new(&dir);
    fs::create_dir_all(dir).expect("fixture dir");

    write(dir, "swap-example.json", &json!({ "fixture": "swap-example" }));
    write(dir, "permutation.json", &pair(permutation_pair()));
    write(dir, "identical.json", &pair(identical_pair()));

    let (e0, e1) = random_pair(4, 4, &mut stream_from_seed(RANDOM_FIXTURE_SEED));
    let report = cheat_report(&e0, &e1).expect("valid pair");
    // independent checks before freezing the golden file
    let f = fidelity(&e0.density(), &e1.density()).expect("same dims");
    assert!((f - report.fidelity).abs() < 1e-8, "tr|Λ| {} vs F {f}", report.fidelity);
    let lambda = build_lambda(&e0, &e1).expect("same dims");
    let (_, best_overlap) =
        maximize_over_unitaries(report.size, 20_000, &mut stream_from_seed(1), |v| (&lambda * v).trace().norm());
    assert!(best_overlap <= report.fidelity + 1e-6, "search overlap {best_overlap} beats tr|Λ|");
    let (_, searched) = brute_force_cheat_oracle(&e0, &e1, 20_000, &mut stream_from_seed(2)).expect("small pair");
    assert!(searched >= report.p_ac - 1e-6, "search {searched} below pAc {}", report.p_ac);
    assert!(report.p_ac >= f * f - 1e-9);
    write(dir, "random-seed7.json", &pair((e0, e1)));
    write(dir, "random-seed7.golden.json", &report);

    let mut corrupted = serde_json::to_value(pair(permutation_pair())).expect("json");
    corrupted["e0"][2]["p"] = json!(1.0 / 3.0 - 0.1);
    write(dir, "corrupted.json", &corrupted);

    let majority = |config: ProtocolConfig| {
        ExperimentSpec::new(config).with_babe(StrategyRef::new("majority")).with_seed(20_260_301)
    };
    for n in [3, 5, 7] {
        write(dir, &format!("qbcp3m-n{n}.json"), &majority(ProtocolConfig::qbcp3m(n)));
    }
    write(dir, "qbc3m2-m3-N5.json", &majority(ProtocolConfig::qbc3m2(3, 5)));
    write(dir, "qbc3m1-m3-N4.json", &majority(ProtocolConfig::qbc3m1(3, 4)));
    let bb84 = ProtocolConfig::qbcp3m(3).with_sets(BabeStateSet::Bb84, DecoySet::GreatCircle);
    write(
        dir,
        "measure-resend-bb84.json",
        &ExperimentSpec::new(bb84.clone()).with_adam(StrategyRef::new("measure-resend")).with_seed(20_260_302),
    );
    write(
        dir,
        "entangle-delay.json",
        &ExperimentSpec::new(bb84).with_adam(StrategyRef::new("entangle-delay")).with_seed(20_260_303),
    );
    write(
        dir,
        "sweep-concealing.json",
        &SweepSpec {
            template: majority(ProtocolConfig::qbcp3m(3)).with_trials(50_000),
            axes: vec![Axis { param: "protocol.n".into(), values: vec![json!(3), json!(5), json!(7), json!(9)] }],
        },
    );
    write(
        dir,
        "sweep-qbc3m2.json",
        &SweepSpec {
            template: majority(ProtocolConfig::qbc3m2(3, 5)).with_trials(50_000),
            axes: vec![
                Axis { param: "protocol.m".into(), values: vec![json!(3), json!(5)] },
                Axis { param: "protocol.N".into(), values: vec![json!(5), json!(7)] },
            ],
        },
    );
}
