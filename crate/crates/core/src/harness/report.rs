use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::stats::Estimate;
use crate::error::{QbcError, Result};
use crate::protocols::{ProtocolConfig, StrategyRef};

pub const REPORT_SCHEMA: &str = "qbc-report/1";

/// Closed-form value an estimate is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub value: f64,
    pub formula: String,
}

/// Result of one experiment. Maps are keyed by metric name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub schema: String,
    pub protocol: String,
    pub params: String,
    pub config: ProtocolConfig,
    pub adam_strategy: StrategyRef,
    pub babe_strategy: StrategyRef,
    pub trials: u64,
    pub master_seed: u64,
    pub estimates: BTreeMap<String, Estimate>,
    pub predictions: BTreeMap<String, Prediction>,
    /// z-score of each estimate against its prediction; `null` when the
    /// estimate has zero spread and differs from the prediction.
    pub agreement: BTreeMap<String, Option<f64>>,
}

/// One row of the flat metric table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub protocol: String,
    pub params: String,
    pub metric: String,
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub prediction: Option<f64>,
    pub z: Option<f64>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: ExperimentReport = serde_json::from_str(s)?;
        if r.schema != REPORT_SCHEMA {
            return Err(QbcError::Config(format!("unsupported report schema `{}`", r.schema)));
        }
        Ok(r)
    }

    /// Metric names with an estimate or a prediction, sorted.
    pub fn metrics(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.estimates.keys().chain(self.predictions.keys()).map(String::as_str).collect();
        names.sort_unstable();
        names.dedup();
        names
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.metrics()
            .into_iter()
            .map(|m| CsvRow {
                protocol: self.protocol.clone(),
                params: self.params.clone(),
                metric: m.to_string(),
                estimate: self.estimates.get(m).map(|e| e.mean),
                stderr: self.estimates.get(m).map(|e| e.stderr),
                prediction: self.predictions.get(m).map(|p| p.value),
                z: self.agreement.get(m).copied().flatten(),
            })
            .collect()
    }

    /// Largest |z| over the agreement map; infinite if some estimate
    /// disagrees with zero spread.
    pub fn max_abs_z(&self) -> f64 {
        self.agreement.values().map(|z| z.map_or(f64::INFINITY, f64::abs)).fold(0.0, f64::max)
    }

    pub fn pretty(&self) -> String {
        let mut s = format!(
            "{} {}  adam={} babe={}  trials={} seed={}\n",
            self.protocol, self.params, self.adam_strategy.id, self.babe_strategy.id, self.trials, self.master_seed
        );
        s += &format!(
            "  {:<16} {:>10} {:>10} {:>10} {:>10} {:>8}  {}\n",
            "metric", "estimate", "stderr", "ci95", "prediction", "z", "formula"
        );
        for m in self.metrics() {
            let e = self.estimates.get(m);
            let p = self.predictions.get(m);
            let cell = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
            let ci = e.map_or("-".to_string(), |e| format!("[{:.4},{:.4}]", e.ci_low, e.ci_high));
            let z = match self.agreement.get(m) {
                Some(Some(z)) => format!("{z:.3}"),
                Some(None) => "inf".to_string(),
                None => "-".to_string(),
            };
            s += &format!(
                "  {:<16} {:>10} {:>10} {:>10} {:>10} {:>8}  {}\n",
                m,
                cell(e.map(|e| e.mean)),
                cell(e.map(|e| e.stderr)),
                ci,
                cell(p.map(|p| p.value)),
                z,
                p.map_or("", |p| p.formula.as_str())
            );
        }
        s
    }
}

/// Writes the flat table for `reports` with the fixed column set
/// protocol,params,metric,estimate,stderr,prediction,z.
pub fn write_csv<W: Write>(reports: &[ExperimentReport], out: W) -> Result<()> {
    let rows: Vec<CsvRow> = reports.iter().flat_map(|r| r.csv_rows()).collect();
    write_csv_rows(&rows, out)
}

pub fn write_csv_rows<W: Write>(rows: &[CsvRow], out: W) -> Result<()> {
    // Header written by hand so it appears even with no rows.
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["protocol", "params", "metric", "estimate", "stderr", "prediction", "z"]).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(reports: &[ExperimentReport]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(reports, &mut buf)?;
    String::from_utf8(buf).map_err(|e| QbcError::Numerical(e.to_string()))
}

fn csv_err(e: csv::Error) -> QbcError {
    QbcError::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentReport {
        let mut r = ExperimentReport {
            schema: REPORT_SCHEMA.into(),
            protocol: "QBCp3m".into(),
            params: "n=3".into(),
            config: ProtocolConfig::qbcp3m(3),
            adam_strategy: StrategyRef::new("honest"),
            babe_strategy: StrategyRef::new("majority"),
            trials: 4,
            master_seed: 1,
            estimates: BTreeMap::new(),
            predictions: BTreeMap::new(),
            agreement: BTreeMap::new(),
        };
        r.estimates.insert("babe_guess".into(), Estimate::from_counts(3, 4));
        r.predictions.insert("babe_guess".into(), Prediction { value: 0.75, formula: "central-binomial".into() });
        r.agreement.insert("babe_guess".into(), Some(0.0));
        r
    }

    #[test]
    fn csv_has_exact_columns() {
        let s = to_csv_string(&[sample()]).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), "protocol,params,metric,estimate,stderr,prediction,z");
        assert!(lines.next().unwrap().starts_with("QBCp3m,n=3,babe_guess,0.75,"));
        assert_eq!(to_csv_string(&[]).unwrap(), "protocol,params,metric,estimate,stderr,prediction,z\n");
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back = ExperimentReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.max_abs_z(), 0.0);
    }
}
