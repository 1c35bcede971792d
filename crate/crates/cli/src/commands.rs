use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use qbc_core::cheat::{cheat_report, swap_example_fixture, EnsemblePairJson, SwapExampleChecks};
use qbc_core::harness::{
    estimate_adam_cheat, run_experiment_with, run_sweep, write_csv, z_score, CheatRow, CsvRow, ExperimentReport,
    ExperimentSpec, RunOptions, SweepRow, SweepSpec,
};
use qbc_core::protocols::{concealing_closed_form, ConcealingReport};
use qbc_core::selfcheck::{run_suites, SuiteOutcome};

use crate::output::{csv, emit, exact_row, json, read_input, CliError, CliResult, Format};
use crate::Global;

const STRICT_Z: f64 = 4.0;
const SWAP_FIXTURE: &str = "swap-example";

fn run_options(g: &Global) -> CliResult<RunOptions> {
    if g.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    Ok(RunOptions { threads: g.threads })
}

fn log(g: &Global, started: Instant, what: &str) {
    if g.verbose > 0 {
        eprintln!("{what} in {:.2}s", started.elapsed().as_secs_f64());
    }
}

pub fn cheat(g: &Global, input: &Path) -> CliResult<()> {
    let started = Instant::now();
    let pair: EnsemblePairJson = serde_json::from_str(&read_input(input)?)?;
    let (e0, e1) = pair.parse()?;
    let r = cheat_report(&e0, &e1)?;
    log(g, started, "cheat solved");
    let text = match g.format {
        Format::Json => json(&r)?,
        Format::Pretty => r.pretty(),
        Format::Csv => {
            let params = format!("dims={:?}", r.dims).replace(' ', "");
            let values = [
                ("fidelity", r.fidelity),
                ("p_ac", r.p_ac),
                ("fidelity_squared", r.fidelity_squared),
                ("diag_square_sum", r.diag_square_sum),
                ("overlap", r.overlap),
                ("polar_residual", r.polar_residual),
                ("trace_distance", r.trace_distance),
                ("helstrom", r.helstrom),
            ];
            let mut rows: Vec<CsvRow> = values.iter().map(|(m, v)| exact_row("cheat", &params, m, *v)).collect();
            for c in &r.candidates {
                rows.push(exact_row("cheat", &params, &format!("p_ac_{:?}", c.orientation).to_lowercase(), c.p_ac));
            }
            csv(&rows)?
        }
    };
    emit(&text, g.out.as_deref())
}

pub fn concealing(g: &Global, ns: &[usize], lambda_plus: f64) -> CliResult<()> {
    if let Some(n) = ns.iter().find(|n| *n % 2 == 0) {
        return Err(CliError::Usage(format!("n must be odd, got {n}")));
    }
    let rows = ns
        .iter()
        .map(|&n| concealing_closed_form(n, lambda_plus))
        .collect::<qbc_core::Result<Vec<ConcealingReport>>>()?;
    let text = match g.format {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let mut out = Vec::new();
            for r in &rows {
                let params = format!("n={},lambda_plus={}", r.n, r.lambda_plus);
                out.push(exact_row("QBCp3m", &params, "closed_form", r.closed_form));
                out.push(exact_row("QBCp3m", &params, "excess", r.excess));
                if let (Some(lo), Some(hi), Some(inside)) = (r.lower, r.upper, r.inside_bounds) {
                    out.push(exact_row("QBCp3m", &params, "lower", lo));
                    out.push(exact_row("QBCp3m", &params, "upper", hi));
                    out.push(exact_row("QBCp3m", &params, "inside_bounds", if inside { 1.0 } else { 0.0 }));
                }
                out.push(exact_row("QBCp3m", &params, "trace_distance", r.trace_distance));
            }
            csv(&out)?
        }
        Format::Pretty => {
            let mut s = format!(
                "{:>5} {:>4} {:>16} {:>16} {:>16} {:>16} {:>7} {:>16}\n",
                "n", "ell", "closed form", "excess", "lower", "upper", "inside", "trace distance"
            );
            let cell = |v: Option<f64>| v.map_or("N/A".to_string(), |x| format!("{x:.12}"));
            for r in &rows {
                s += &format!(
                    "{:>5} {:>4} {:>16.12} {:>16.12} {:>16} {:>16} {:>7} {:>16.12}\n",
                    r.n,
                    r.ell,
                    r.closed_form,
                    r.excess,
                    cell(r.lower),
                    cell(r.upper),
                    r.inside_bounds.map_or("N/A", |b| if b { "yes" } else { "no" }),
                    r.trace_distance
                );
            }
            s
        }
    };
    emit(&text, g.out.as_deref())
}

fn load_spec(g: &Global, value: Value, trials: Option<u64>) -> CliResult<ExperimentSpec> {
    let mut spec: ExperimentSpec = serde_json::from_value(value)?;
    if let Some(seed) = g.seed {
        spec.master_seed = seed;
    }
    if let Some(t) = trials {
        spec.trials = t;
    }
    spec.validate()?;
    Ok(spec)
}

fn fixture_name(value: &Value) -> Option<&str> {
    value.get("fixture").and_then(Value::as_str)
}

#[derive(Serialize)]
struct SwapOutput {
    fixture: &'static str,
    passed: bool,
    checks: SwapExampleChecks,
}

fn swap_fixture(g: &Global) -> CliResult<()> {
    let ex = swap_example_fixture()?;
    let c = &ex.checks;
    let out = SwapOutput { fixture: SWAP_FIXTURE, passed: c.passed(), checks: c.clone() };
    let text = match g.format {
        Format::Json => json(&out)?,
        Format::Csv => {
            let rows = [
                ("rho_bc_distance", c.rho_bc_distance),
                ("adam_cheat", c.adam_cheat),
                ("babe_product_guess", c.babe_product_guess),
                ("choi_distance", c.choi_distance),
                ("channels_equal", if c.channels_equal { 1.0 } else { 0.0 }),
            ]
            .iter()
            .map(|(m, v)| exact_row("swap-example", "", m, *v))
            .collect::<Vec<_>>();
            csv(&rows)?
        }
        Format::Pretty => format!(
            "swap example: {}\n  rho^BC distance      {:.3e}\n  Adam switch          {:.12}\n  Babe product guess   {:.12}\n  channels equal       {} (Choi distance {:.6})\n",
            if out.passed { "all checks pass" } else { "CHECK FAILED" },
            c.rho_bc_distance,
            c.adam_cheat,
            c.babe_product_guess,
            c.channels_equal,
            c.choi_distance
        ),
    };
    emit(&text, g.out.as_deref())?;
    if out.passed {
        Ok(())
    } else {
        Err(CliError::Verify("swap example checks failed".into()))
    }
}

fn report_text(g: &Global, reports: &[ExperimentReport]) -> CliResult<String> {
    Ok(match g.format {
        Format::Json if reports.len() == 1 => reports[0].to_json()?,
        Format::Json => json(&reports)?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(reports, &mut buf)?;
            String::from_utf8(buf).expect("csv output is utf-8")
        }
        Format::Pretty => reports.iter().map(ExperimentReport::pretty).collect::<Vec<_>>().join("\n"),
    })
}

fn strict_check(g: &Global, reports: &[ExperimentReport]) -> CliResult<()> {
    if !g.strict {
        return Ok(());
    }
    let worst = reports.iter().map(ExperimentReport::max_abs_z).fold(0.0, f64::max);
    if worst > STRICT_Z {
        return Err(CliError::Strict(format!("max |z| = {worst:.3} exceeds {STRICT_Z}")));
    }
    Ok(())
}

/// Writes the formatted reports. With `--out` the summary table also goes
/// to stdout; otherwise machine formats get it on stderr.
fn deliver(g: &Global, reports: &[ExperimentReport]) -> CliResult<()> {
    let text = report_text(g, reports)?;
    emit(&text, g.out.as_deref())?;
    if g.format != Format::Pretty || g.out.is_some() {
        let summary: String = reports.iter().map(ExperimentReport::pretty).collect::<Vec<_>>().join("\n");
        if g.out.is_some() {
            print!("{summary}");
        } else {
            eprint!("{summary}");
        }
    }
    strict_check(g, reports)
}

pub fn simulate(g: &Global, input: &Path, trials: Option<u64>) -> CliResult<()> {
    let value: Value = serde_json::from_str(&read_input(input)?)?;
    if let Some(name) = fixture_name(&value) {
        return match name {
            SWAP_FIXTURE => swap_fixture(g),
            other => Err(CliError::Usage(format!("unknown fixture `{other}`"))),
        };
    }
    let spec = load_spec(g, value, trials)?;
    let started = Instant::now();
    let report = run_experiment_with(&spec, run_options(g)?)?;
    log(g, started, &format!("{} trials", spec.trials));
    deliver(g, &[report])
}

pub fn attack(g: &Global, input: &Path, sizes: &[usize], trials: Option<u64>) -> CliResult<()> {
    let value: Value = serde_json::from_str(&read_input(input)?)?;
    let spec = load_spec(g, value, trials)?;
    let started = Instant::now();
    let rows = estimate_adam_cheat(&spec, sizes, run_options(g)?)?;
    log(g, started, "attack sizes");
    let kind = spec.protocol.kind.name();
    let size_key = |s: usize| match spec.protocol.kind {
        qbc_core::protocols::ProtocolKind::QBCp3m | qbc_core::protocols::ProtocolKind::QBCp3u => format!("n={s}"),
        _ => format!("N={s}"),
    };
    let z = |r: &CheatRow| r.prediction.as_ref().and_then(|p| z_score(&r.estimate, p.value));
    let text = match g.format {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let out: Vec<CsvRow> = rows
                .iter()
                .map(|r| CsvRow {
                    protocol: kind.to_string(),
                    params: size_key(r.size),
                    metric: "adam_bit_change".into(),
                    estimate: Some(r.estimate.mean),
                    stderr: Some(r.estimate.stderr),
                    prediction: r.prediction.as_ref().map(|p| p.value),
                    z: z(r),
                })
                .collect();
            csv(&out)?
        }
        Format::Pretty => {
            let mut s = format!(
                "{kind} adam={} babe={} trials={} seed={}\n  {:<8} {:>10} {:>10} {:>17} {:>10} {:>8}\n",
                spec.adam_strategy.id,
                spec.babe_strategy.id,
                spec.trials,
                spec.master_seed,
                "size",
                "estimate",
                "stderr",
                "ci95",
                "prediction",
                "z"
            );
            for r in &rows {
                s += &format!(
                    "  {:<8} {:>10.6} {:>10.6} {:>17} {:>10} {:>8}\n",
                    size_key(r.size),
                    r.estimate.mean,
                    r.estimate.stderr,
                    format!("[{:.4},{:.4}]", r.estimate.ci_low, r.estimate.ci_high),
                    r.prediction.as_ref().map_or("-".into(), |p| format!("{:.6}", p.value)),
                    z(r).map_or("-".into(), |z| format!("{z:.3}"))
                );
            }
            s
        }
    };
    emit(&text, g.out.as_deref())?;
    if g.strict {
        let bad = rows.iter().any(|r| r.prediction.is_some() && z(r).is_none_or(|z| z.abs() > STRICT_Z));
        if bad {
            return Err(CliError::Strict(format!("some |z| exceeds {STRICT_Z}")));
        }
    }
    Ok(())
}

pub fn sweep(g: &Global, input: &Path, checkpoint: Option<&Path>) -> CliResult<()> {
    let mut sw: SweepSpec = serde_json::from_str(&read_input(input)?)?;
    if let Some(seed) = g.seed {
        sw.template.master_seed = seed;
    }
    let started = Instant::now();
    let rows: Vec<SweepRow> = run_sweep(&sw, run_options(g)?, checkpoint)?;
    log(g, started, &format!("{} sweep points", rows.len()));
    let reports: Vec<ExperimentReport> = rows.iter().map(|r| r.report.clone()).collect();
    if g.format == Format::Json {
        emit(&json(&rows)?, g.out.as_deref())?;
        strict_check(g, &reports)
    } else {
        deliver(g, &reports)
    }
}

#[derive(Serialize)]
struct VerifyOutput {
    fixtures: Vec<String>,
    suites: Vec<SuiteOutcome>,
}

/// Parses a fixture file with the schema its top-level keys select and
/// runs that schema's validation.
fn validate_fixture(path: &Path) -> CliResult<&'static str> {
    let value: Value = serde_json::from_str(&read_input(path)?)?;
    if let Some(name) = fixture_name(&value) {
        return if name == SWAP_FIXTURE {
            Ok("bundled fixture")
        } else {
            Err(CliError::Usage(format!("unknown fixture `{name}`")))
        };
    }
    if value.get("e0").is_some() {
        let pair: EnsemblePairJson = serde_json::from_value(value)?;
        pair.parse()?;
        return Ok("ensemble pair");
    }
    if value.get("template").is_some() {
        let sw: SweepSpec = serde_json::from_value(value)?;
        for p in sw.points()? {
            sw.spec_at(&p)?.validate()?;
        }
        return Ok("sweep");
    }
    let spec: ExperimentSpec = serde_json::from_value(value)?;
    spec.validate()?;
    Ok("experiment spec")
}

pub fn verify(g: &Global, filter: Option<&str>, fixtures: &[PathBuf]) -> CliResult<()> {
    let mut checked = Vec::new();
    for f in fixtures {
        let kind = validate_fixture(f).inspect_err(|_| eprintln!("fixture {} rejected", f.display()))?;
        checked.push(format!("{}: {kind}", f.display()));
    }
    let outcomes = run_suites(filter)?;
    let failed = outcomes.iter().find(|o| !o.passed).map(|o| format!("{}/{}", o.module, o.suite));
    let text = match g.format {
        Format::Json => json(&VerifyOutput { fixtures: checked, suites: outcomes })?,
        Format::Csv => {
            let mut rows = Vec::new();
            for o in &outcomes {
                rows.push(exact_row(o.module, o.suite, "passed", if o.passed { 1.0 } else { 0.0 }));
                rows.push(exact_row(o.module, o.suite, "millis", o.millis as f64));
            }
            csv(&rows)?
        }
        Format::Pretty => {
            let mut s: String = checked.iter().map(|c| format!("fixture {c} ok\n")).collect();
            for o in &outcomes {
                s += &format!(
                    "{} {}/{} ({} ms): {}\n",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.module,
                    o.suite,
                    o.millis,
                    o.detail
                );
            }
            s
        }
    };
    emit(&text, g.out.as_deref())?;
    match failed {
        Some(name) => Err(CliError::Verify(format!("suite {name} failed"))),
        None => Ok(()),
    }
}
