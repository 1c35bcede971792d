use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::report::ExperimentReport;
use super::run::{run_experiment_with, RunOptions};
use super::spec::ExperimentSpec;
use crate::error::{QbcError, Result};

pub const CHECKPOINT_SCHEMA: &str = "qbc-sweep-checkpoint/1";

/// One grid axis: a dotted path into the spec JSON and the values it takes,
/// e.g. `protocol.n` over `[3, 5, 7]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub template: ExperimentSpec,
    pub axes: Vec<Axis>,
}

/// One grid point and its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: BTreeMap<String, Value>,
    pub report: ExperimentReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    schema: String,
    fingerprint: String,
    completed: Vec<SweepRow>,
}

impl SweepSpec {
    /// Grid points in row-major order, last axis varying fastest.
    pub fn points(&self) -> Result<Vec<BTreeMap<String, Value>>> {
        if self.axes.is_empty() || self.axes.iter().any(|a| a.values.is_empty()) {
            return Err(QbcError::Empty("sweep grid"));
        }
        let mut points = vec![BTreeMap::new()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.insert(axis.param.clone(), v.clone());
                        q
                    })
                })
                .collect();
        }
        Ok(points)
    }

    /// The template with the point's values substituted.
    pub fn spec_at(&self, point: &BTreeMap<String, Value>) -> Result<ExperimentSpec> {
        let mut json = serde_json::to_value(&self.template)?;
        for (path, v) in point {
            set_path(&mut json, path, v.clone())?;
        }
        Ok(serde_json::from_value(json)?)
    }

    fn fingerprint(&self) -> Result<String> {
        let bytes = serde_json::to_vec(self)?;
        Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
    }
}

fn set_path(json: &mut Value, path: &str, v: Value) -> Result<()> {
    let mut cur = json;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, key) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| QbcError::Config(format!("sweep path `{path}` does not name an object field")))?;
        if i + 1 == parts.len() {
            obj.insert(key.to_string(), v);
            return Ok(());
        }
        cur = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Err(QbcError::Config("empty sweep path".into()))
}

/// Runs every grid point in order. With a checkpoint path, completed rows
/// are saved after each point and a rerun skips them; a checkpoint from a
/// different sweep is rejected.
pub fn run_sweep(sweep: &SweepSpec, opts: RunOptions, checkpoint: Option<&Path>) -> Result<Vec<SweepRow>> {
    let points = sweep.points()?;
    let specs = points.iter().map(|p| sweep.spec_at(p)).collect::<Result<Vec<_>>>()?;
    for s in &specs {
        s.validate()?;
    }
    let fingerprint = sweep.fingerprint()?;
    let mut rows = match checkpoint {
        Some(path) if path.exists() => {
            let c: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
            if c.schema != CHECKPOINT_SCHEMA {
                return Err(QbcError::Config(format!("unsupported checkpoint schema `{}`", c.schema)));
            }
            if c.fingerprint != fingerprint {
                return Err(QbcError::Config("checkpoint belongs to a different sweep".into()));
            }
            if c.completed.len() > points.len() {
                return Err(QbcError::Config("checkpoint has more rows than the grid".into()));
            }
            c.completed
        }
        _ => Vec::new(),
    };
    for (point, spec) in points.iter().zip(&specs).skip(rows.len()) {
        let report = run_experiment_with(spec, opts)?;
        rows.push(SweepRow { point: point.clone(), report });
        if let Some(path) = checkpoint {
            save(path, &fingerprint, &rows)?;
        }
    }
    Ok(rows)
}

fn save(path: &Path, fingerprint: &str, rows: &[SweepRow]) -> Result<()> {
    let c = Checkpoint { schema: CHECKPOINT_SCHEMA.into(), fingerprint: fingerprint.into(), completed: rows.to_vec() };
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec_pretty(&c)?)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{ProtocolConfig, StrategyRef};
    use serde_json::json;

    fn sweep() -> SweepSpec {
        SweepSpec {
            template: ExperimentSpec::new(ProtocolConfig::qbcp3m(3))
                .with_babe(StrategyRef::new("majority"))
                .with_trials(200),
            axes: vec![
                Axis { param: "protocol.n".into(), values: vec![json!(3), json!(5)] },
                Axis { param: "masterSeed".into(), values: vec![json!(1), json!(2)] },
            ],
        }
    }

    #[test]
    fn grid_order_last_axis_fastest() {
        let p = sweep().points().unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p[1]["protocol.n"], json!(3));
        assert_eq!(p[1]["masterSeed"], json!(2));
        assert_eq!(p[2]["protocol.n"], json!(5));
        let s = sweep().spec_at(&p[3]).unwrap();
        assert_eq!((s.protocol.n, s.master_seed), (5, 2));
    }

    #[test]
    fn bad_path_and_empty_grid() {
        let mut s = sweep();
        s.axes[0].param = "protocol.bogus".into();
        assert!(run_sweep(&s, RunOptions::default(), None).is_err());
        s.axes.clear();
        assert!(matches!(s.points(), Err(QbcError::Empty(_))));
    }

    #[test]
    fn resumes_from_checkpoint() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.json");
        let s = sweep();
        let full = run_sweep(&s, RunOptions::single_threaded(), None).unwrap();
        // Simulate an interrupted run holding two rows.
        save(&path, &s.fingerprint().unwrap(), &full[..2]).unwrap();
        let resumed = run_sweep(&s, RunOptions::single_threaded(), Some(&path)).unwrap();
        assert_eq!(resumed, full);
        let mut other = s.clone();
        other.template.trials = 201;
        assert!(run_sweep(&other, RunOptions::single_threaded(), Some(&path)).is_err());
    }
}
