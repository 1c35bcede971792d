//! Browser bindings. Every function returns a JSON string for the page to
//! plot; errors come back as JS exceptions carrying the message.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use qbc_core::cheat::{optimal_overlap_cheat, trace_distance_family};
use qbc_core::harness::{run_experiment_with, ExperimentSpec, Metric, RunOptions};
use qbc_core::protocols::{concealing_closed_form, ProtocolConfig, StrategyRef};
use qbc_core::qcore::fidelity;

/// Largest sequence length the demo accepts for Monte Carlo runs.
pub const MAX_DEMO_N: usize = 15;
pub const MAX_DEMO_TRIALS: u64 = 200_000;

#[derive(Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct ConcealingPoint {
    pub n: usize,
    pub closed_form: f64,
    pub excess: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

#[derive(Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct CheatPoint {
    pub delta: f64,
    pub p_ac: f64,
    pub fidelity: f64,
    pub fidelity_squared: f64,
}

#[derive(Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct MonteCarloPoint {
    pub n: usize,
    pub trials: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub prediction: f64,
    pub z: Option<f64>,
}

fn to_js<E: std::fmt::Display>(e: E) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, JsValue> {
    serde_json::to_string(v).map_err(to_js)
}

pub fn concealing_points(n_max: usize, lambda_plus: f64) -> qbc_core::Result<Vec<ConcealingPoint>> {
    (1..=n_max.max(1))
        .step_by(2)
        .map(|n| {
            let r = concealing_closed_form(n, lambda_plus)?;
            Ok(ConcealingPoint { n, closed_form: r.closed_form, excess: r.excess, lower: r.lower, upper: r.upper })
        })
        .collect()
}

pub fn cheat_points(steps: usize) -> qbc_core::Result<Vec<CheatPoint>> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|k| {
            let delta = k as f64 / steps as f64;
            let (e0, e1) = trace_distance_family(delta)?;
            let sol = optimal_overlap_cheat(&e0, &e1)?;
            let f = fidelity(&e0.density(), &e1.density())?;
            Ok(CheatPoint { delta, p_ac: sol.p_ac, fidelity: f, fidelity_squared: f * f })
        })
        .collect()
}

pub fn monte_carlo_point(n: usize, trials: u64, seed: u64) -> qbc_core::Result<MonteCarloPoint> {
    if n.is_multiple_of(2) || n > MAX_DEMO_N {
        return Err(qbc_core::QbcError::Config(format!("n must be odd and at most {MAX_DEMO_N}")));
    }
    if trials == 0 || trials > MAX_DEMO_TRIALS {
        return Err(qbc_core::QbcError::Config(format!("trials must lie in 1..={MAX_DEMO_TRIALS}")));
    }
    let spec = ExperimentSpec::new(ProtocolConfig::qbcp3m(n))
        .with_babe(StrategyRef::new("majority"))
        .with_trials(trials)
        .with_seed(seed)
        .with_outputs(vec![Metric::BabeGuess]);
    // no worker threads in the browser
    let r = run_experiment_with(&spec, RunOptions::single_threaded())?;
    let key = Metric::BabeGuess.name();
    let e = &r.estimates[key];
    Ok(MonteCarloPoint {
        n,
        trials,
        estimate: e.mean,
        stderr: e.stderr,
        ci_low: e.ci_low,
        ci_high: e.ci_high,
        prediction: r.predictions[key].value,
        z: r.agreement.get(key).copied().flatten(),
    })
}

/// Closed-form concealing probability and its bounds for odd `n ≤ n_max`.
#[wasm_bindgen(js_name = concealingCurve)]
pub fn concealing_curve(n_max: usize, lambda_plus: f64) -> Result<String, JsValue> {
    to_json(&concealing_points(n_max, lambda_plus).map_err(to_js)?)
}

/// Cheat probability against the trace distance of the committed states.
#[wasm_bindgen(js_name = cheatVsDelta)]
pub fn cheat_vs_delta(steps: usize) -> Result<String, JsValue> {
    to_json(&cheat_points(steps).map_err(to_js)?)
}

/// Majority-vote guessing run for one `n`, with the closed form beside it.
#[wasm_bindgen(js_name = monteCarlo)]
pub fn monte_carlo(n: usize, trials: u32, seed: u32) -> Result<String, JsValue> {
    to_json(&monte_carlo_point(n, trials as u64, seed as u64).map_err(to_js)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concealing_curve_starts_at_one() {
        let pts = concealing_points(9, 1.0).unwrap();
        assert_eq!(pts.iter().map(|p| p.n).collect::<Vec<_>>(), vec![1, 3, 5, 7, 9]);
        assert_eq!(pts[0].closed_form, 1.0);
        assert!((pts[1].closed_form - 0.75).abs() < 1e-12);
        assert!(pts[0].lower.is_none());
    }

    #[test]
    fn cheat_points_span_delta() {
        let pts = cheat_points(4).unwrap();
        assert_eq!(pts.len(), 5);
        assert!((pts[0].p_ac - 1.0).abs() < 1e-9);
        for p in &pts {
            assert!(p.p_ac >= p.fidelity_squared - 1e-9);
        }
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let a = monte_carlo_point(3, 5000, 9).unwrap();
        let b = monte_carlo_point(3, 5000, 9).unwrap();
        assert_eq!(a, b);
        assert!((a.estimate - 0.75).abs() < 4.0 * a.stderr);
        assert!(monte_carlo_point(4, 10, 1).is_err());
        assert!(monte_carlo_point(3, 0, 1).is_err());
    }
}
