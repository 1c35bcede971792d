//! Self-check suites.
//!
//! Desk-scale property checks grouped by module, run by `qbc verify`. Each
//! suite returns a one-line summary or the first violated invariant.

use std::time::Instant;

use serde::Serialize;

use crate::cheat::{
    brute_force_cheat_oracle, fixed_cheat_scan, kraus::equal_channel_pairs, kraus_freedom, optimal_overlap_cheat,
    permutation_pair, random_pair, swap_example_fixture, trace_distance_family, InputSampler,
};
use crate::error::{QbcError, Result};
use crate::harness::{run_counts, run_experiment_with, stream_collisions, ExperimentSpec, RunOptions};
use crate::protocols::{
    closed_form::{deviation_sum, deviation_sum_closed},
    concealing_bounds, concealing_closed_form, entangled_mismatch_check, none_match_probability, product_trace_norms,
    segment_mismatch_check, ProtocolConfig, StrategyRef,
};
use crate::qcore::{
    fidelity, haar_ket, haar_unitary, linalg::random_density, partial_trace, polar_unitary, tensor, trace_norm,
    unitarity_error, GreatCircle, Ket,
};
use crate::rng::{stream_from_seed, Role, Stream};

/// Module names accepted as filters.
pub const MODULES: [&str; 4] = ["qcore", "cheat", "protocols", "harness"];

pub struct Suite {
    pub module: &'static str,
    pub name: &'static str,
    run: fn(&mut Stream) -> Result<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteOutcome {
    pub module: &'static str,
    pub suite: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

fn ensure(cond: bool, name: &'static str, detail: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(QbcError::Invariant { name, detail: detail() })
    }
}

pub fn suites() -> Vec<Suite> {
    vec![
        Suite { module: "qcore", name: "linalg", run: qcore_linalg },
        Suite { module: "qcore", name: "circle", run: qcore_circle },
        Suite { module: "cheat", name: "lambda-polar", run: cheat_lambda },
        Suite { module: "cheat", name: "epr-limit", run: cheat_epr_limit },
        Suite { module: "cheat", name: "swap-example", run: cheat_swap_example },
        Suite { module: "cheat", name: "kraus-freedom", run: cheat_kraus },
        Suite { module: "cheat", name: "oracle", run: cheat_oracle },
        Suite { module: "protocols", name: "closed-form", run: protocols_closed_form },
        Suite { module: "protocols", name: "entangled-bounds", run: protocols_entangled },
        Suite { module: "protocols", name: "honest-runs", run: protocols_honest },
        Suite { module: "harness", name: "determinism", run: harness_determinism },
        Suite { module: "harness", name: "streams", run: harness_streams },
        Suite { module: "harness", name: "agreement", run: harness_agreement },
    ]
}

/// Runs the suites whose module equals `filter` (all when `None`), stopping
/// after the first failure.
pub fn run_suites(filter: Option<&str>) -> Result<Vec<SuiteOutcome>> {
    if let Some(f) = filter {
        if !MODULES.contains(&f) {
            return Err(QbcError::Config(format!("unknown module `{f}`; expected one of {MODULES:?}")));
        }
    }
    let mut out = Vec::new();
    for (k, s) in suites().into_iter().enumerate() {
        if filter.is_some_and(|f| f != s.module) {
            continue;
        }
        let mut rng = stream_from_seed(0x5e1f_c4ec + k as u64);
        let t = Instant::now();
        let r = (s.run)(&mut rng);
        let millis = t.elapsed().as_millis();
        let (passed, detail) = match r {
            Ok(d) => (true, d),
            Err(e) => (false, e.to_string()),
        };
        out.push(SuiteOutcome { module: s.module, suite: s.name, passed, detail, millis });
        if !passed {
            break;
        }
    }
    Ok(out)
}

fn qcore_linalg(rng: &mut Stream) -> Result<String> {
    let mut worst: f64 = 0.0;
    for k in 0..40 {
        let d = 2 + k % 4;
        let m = crate::qcore::linalg::gaussian_vector(d * d, rng);
        let a = crate::qcore::CMatrix::from_iterator(d, d, m.iter().copied());
        let (u, p) = polar_unitary(&a)?;
        worst = worst.max((&a * &u - &p).camax()).max(unitarity_error(&u));
        let r0 = random_density(d, 1 + k % d, rng);
        let r1 = random_density(d, d, rng);
        let f01 = fidelity(&r0, &r1)?;
        let f10 = fidelity(&r1, &r0)?;
        ensure((f01 - f10).abs() < 1e-8 && f01 <= 1.0 + 1e-9, "fidelity.symmetry", || format!("F = {f01} vs {f10}"))?;
        let t = trace_norm(&(r0.matrix() - r1.matrix()))?;
        ensure(t <= 2.0 + 1e-9 && 1.0 - f01 <= t / 2.0 + 1e-9, "trace_norm.fvdg", || {
            format!("‖ρ−σ‖₁ = {t}, F = {f01}")
        })?;
        let prod = tensor(&[r0.clone(), r1.clone()])?;
        let back = partial_trace(&prod, &[0])?;
        worst = worst.max((back.matrix() - r0.matrix()).camax());
    }
    ensure(worst < 1e-9, "linalg.residual", || format!("worst residual {worst}"))?;
    Ok(format!("40 polar/fidelity/partial-trace cases, worst residual {worst:.1e}"))
}

fn qcore_circle(rng: &mut Stream) -> Result<String> {
    let c = GreatCircle::standard();
    let flip = c.flip();
    for _ in 0..50 {
        let psi = c.state(rand::Rng::random::<f64>(rng) * std::f64::consts::TAU);
        let overlap = psi.inner(&psi.apply(&flip)?).norm();
        ensure(overlap < 1e-12, "circle.flip_orthogonal", || format!("|⟨ψ|Rψ⟩| = {overlap}"))?;
    }
    let b = c.bb84();
    ensure(b[0].inner(&b[1]).norm() < 1e-12 && b[2].inner(&b[3]).norm() < 1e-12, "circle.bb84_pairs", || {
        "BB84 partners not orthogonal".into()
    })?;
    Ok("flip maps circle states to orthogonal partners".into())
}

fn cheat_lambda(rng: &mut Stream) -> Result<String> {
    let cases = 30;
    for _ in 0..cases {
        let (e0, e1) = random_pair(4, 8, rng);
        let s = optimal_overlap_cheat(&e0, &e1)?;
        let f = fidelity(&e0.density(), &e1.density())?;
        ensure((s.overlap - s.fid).abs() <= 1e-9, "cheat.polar_overlap", || {
            format!("|tr ΛU| = {}, tr|Λ| = {}", s.overlap, s.fid)
        })?;
        ensure((s.fid - f).abs() <= 1e-8, "cheat.trace_abs_lambda_is_fidelity", || {
            format!("tr|Λ| = {}, F = {f}", s.fid)
        })?;
        ensure(s.p_ac >= f * f - 1e-9, "cheat.fidelity_squared_bound", || {
            format!("pAc = {} < F² = {}", s.p_ac, f * f)
        })?;
    }
    Ok(format!("{cases} random pairs: |tr ΛU| = tr|Λ| = F, pAc ≥ F²"))
}

fn cheat_epr_limit(_: &mut Stream) -> Result<String> {
    let (e0, e1) = permutation_pair();
    let p = optimal_overlap_cheat(&e0, &e1)?.p_ac;
    ensure((p - 1.0).abs() <= 1e-9, "cheat.permutation_perfect", || format!("pAc = {p}"))?;
    let mut prev = 0.0;
    for delta in [0.2, 0.1, 0.05] {
        let (e0, e1) = trace_distance_family(delta)?;
        let p = optimal_overlap_cheat(&e0, &e1)?.p_ac;
        let bound = (1.0 - delta / 2.0).powi(2);
        ensure(p >= bound - 1e-9, "cheat.trace_distance_bound", || format!("δ = {delta}: pAc = {p} < {bound}"))?;
        ensure(p > prev, "cheat.monotone_in_delta", || format!("δ = {delta}: pAc = {p} ≤ {prev}"))?;
        prev = p;
    }
    Ok(format!("permutation pAc = 1, δ = 0.05 gives pAc = {prev:.6}"))
}

fn cheat_swap_example(_: &mut Stream) -> Result<String> {
    let ex = swap_example_fixture()?;
    let c = &ex.checks;
    ensure(c.passed(), "swap_example.checks", || format!("{c:?}"))?;
    Ok(format!(
        "ρ^BC distance {:.1e}, Adam {:.12}, Babe {:.12}, channels differ",
        c.rho_bc_distance, c.adam_cheat, c.babe_product_guess
    ))
}

fn cheat_kraus(rng: &mut Stream) -> Result<String> {
    let pairs = equal_channel_pairs();
    for (name, ops0, ops1) in &pairs {
        let r = kraus_freedom(ops0, ops1)?;
        ensure(r.equal, "kraus.equal_channels", || format!("{name}: reported unequal"))?;
        let res = r.residual.unwrap_or(f64::INFINITY);
        ensure(res <= 1e-7, "kraus.mixing_residual", || format!("{name}: residual {res}"))?;
        let rel = r.state_relation_error.unwrap_or(f64::INFINITY);
        ensure(rel <= 1e-9, "kraus.state_relation", || format!("{name}: error {rel}"))?;
        let v = r.mix_v.expect("equal channels carry V");
        let scan = fixed_cheat_scan(ops0, ops1, &v, 50, &InputSampler::Haar, rng)?;
        ensure((scan.min_p - 1.0).abs() <= 1e-9, "kraus.fixed_cheat", || format!("{name}: min pAc {}", scan.min_p))?;
    }
    Ok(format!("{} equal-channel pairs solved, fixed V cheats on every input", pairs.len()))
}

fn cheat_oracle(rng: &mut Stream) -> Result<String> {
    let mut gap: f64 = f64::NEG_INFINITY;
    for _ in 0..4 {
        let (e0, e1) = random_pair(3, 3, rng);
        let s = optimal_overlap_cheat(&e0, &e1)?;
        // overlap objective over random unitaries
        for _ in 0..500 {
            let v = haar_unitary(s.lambda.nrows(), rng);
            gap = gap.max((&s.lambda * v).trace().norm() - s.fid);
        }
        let (_, best) = brute_force_cheat_oracle(&e0, &e1, 800, rng)?;
        ensure(best <= 1.0 + 1e-9, "oracle.probability", || format!("oracle value {best}"))?;
    }
    ensure(gap <= 1e-6, "cheat.polar_optimal", || format!("random unitary beats tr|Λ| by {gap}"))?;
    Ok(format!("random unitaries stay below tr|Λ| (max gap {gap:.2e})"))
}

fn protocols_closed_form(_: &mut Stream) -> Result<String> {
    let v3 = concealing_closed_form(3, 1.0)?.closed_form;
    let v5 = concealing_closed_form(5, 1.0)?.closed_form;
    ensure(v3 == 0.75 && v5 == 0.6875, "concealing.exact", || format!("n=3: {v3}, n=5: {v5}"))?;
    for ell in 0..=15 {
        ensure(deviation_sum(2 * ell + 1) == deviation_sum_closed(ell), "concealing.deviation_identity", || format!("ℓ = {ell}"))?;
    }
    for ell in 2..=12usize {
        let r = concealing_closed_form(2 * ell + 1, 1.0)?;
        let (lo, hi) = concealing_bounds(ell)?;
        ensure(r.excess > lo && r.excess < hi, "concealing.bounds", || {
            format!("ℓ = {ell}: {} not in ({lo}, {hi})", r.excess)
        })?;
    }
    let p = none_match_probability(10, 3)?;
    ensure(p == 0.729, "segments.none_match", || format!("p(10,3) = {p}"))?;
    Ok("n=3 → 0.75, n=5 → 0.6875, identity ℓ ≤ 15, bounds ℓ = 2..12".into())
}

fn protocols_entangled(rng: &mut Stream) -> Result<String> {
    let c = GreatCircle::standard();
    let mut count = 0;
    for n in 1..=6 {
        let psi = haar_ket(&[2, 2], rng);
        let r = entangled_mismatch_check(n, &psi, &c, n - 1)?;
        ensure(r.holds, "entangled.mismatch_bound", || format!("{r:?}"))?;
        count += 1;
    }
    for (big_n, m) in [(2, 2), (3, 2), (2, 3)] {
        let psis: Vec<Ket> = (0..m).map(|_| haar_ket(&[2, 2], rng)).collect();
        let r = segment_mismatch_check(big_n, &psis, &c)?;
        ensure(r.holds, "segments.mismatch_bound", || format!("{r:?}"))?;
        count += 1;
    }
    let r0 = random_density(2, 2, rng);
    let r1 = random_density(2, 2, rng);
    let s = random_density(3, 2, rng);
    let (lhs, rhs) = product_trace_norms(&r0, &r1, &s)?;
    ensure((lhs - rhs).abs() <= 1e-12, "product.trace_norm", || format!("{lhs} vs {rhs}"))?;
    Ok(format!("{count} explicit bound instances hold; product norm equality"))
}

fn protocols_honest(_: &mut Stream) -> Result<String> {
    let trials = 500;
    for config in [
        ProtocolConfig::qbcp3m(3),
        ProtocolConfig::qbcp3u(3),
        ProtocolConfig::qbc3m1(3, 4),
        ProtocolConfig::qbc3m2(3, 5),
    ] {
        let spec = ExperimentSpec::new(config.clone()).with_trials(trials).with_seed(3);
        let c = run_counts(&spec, RunOptions::default())?;
        ensure(c.successes[0] == trials, "protocols.honest_accepts", || {
            format!("{}: {} of {trials} accepted", config.kind.name(), c.successes[0])
        })?;
    }
    Ok(format!("honest runs accepted {trials}/{trials} for all four protocols"))
}

fn harness_determinism(_: &mut Stream) -> Result<String> {
    let spec = ExperimentSpec::new(ProtocolConfig::qbcp3m(5))
        .with_babe(StrategyRef::new("majority"))
        .with_trials(5000)
        .with_seed(42);
    let a = run_experiment_with(&spec, RunOptions::single_threaded())?.to_json()?;
    let b = run_experiment_with(&spec, RunOptions { threads: Some(4) })?.to_json()?;
    let c = run_experiment_with(&spec, RunOptions::single_threaded())?.to_json()?;
    ensure(a == b && a == c, "harness.determinism", || "reports differ between runs".into())?;
    Ok("identical report bytes for 1 and 4 threads".into())
}

fn harness_streams(_: &mut Stream) -> Result<String> {
    let n = 20_000;
    for role in [Role::BabeStates, Role::Placement] {
        let c = stream_collisions(7, n, role);
        ensure(c == 0, "harness.stream_collisions", || format!("{c} collisions for {role:?}"))?;
    }
    Ok(format!("no repeated stream heads over {n} trials"))
}

fn harness_agreement(_: &mut Stream) -> Result<String> {
    let spec = ExperimentSpec::new(ProtocolConfig::qbcp3m(3))
        .with_babe(StrategyRef::new("majority"))
        .with_trials(20_000)
        .with_seed(9);
    let r = run_experiment_with(&spec, RunOptions::default())?;
    let z = r.agreement["babe_guess"].unwrap_or(f64::INFINITY);
    ensure(z.abs() < 4.0, "harness.agreement", || format!("z = {z}"))?;
    Ok(format!("majority guess {:.4} vs 0.75 (z = {z:.2})", r.estimates["babe_guess"].mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_selects_module() {
        let out = run_suites(Some("qcore")).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|o| o.passed && o.module == "qcore"));
        assert!(run_suites(Some("nope")).is_err());
    }

    #[test]
    fn all_suites_pass() {
        let out = run_suites(None).unwrap();
        for o in &out {
            assert!(o.passed, "{}::{}: {}", o.module, o.suite, o.detail);
        }
        assert_eq!(out.len(), suites().len());
    }
}
