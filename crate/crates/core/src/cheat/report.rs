use serde::{Deserialize, Serialize};

use super::ensemble::Ensemble;
use super::solver::{helstrom, optimal_overlap_cheat, Orientation};
use crate::error::Result;
use crate::qcore::json::{matrix_to_rows, ComplexPair, KetJson};
use crate::qcore::trace_norm;

pub const CHEAT_REPORT_SCHEMA: &str = "qbc-cheat/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrientationValue {
    pub orientation: Orientation,
    pub p_ac: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TildeJson {
    pub prob: f64,
    pub state: Option<KetJson>,
}

/// Machine-readable summary of [`optimal_overlap_cheat`] for one pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheatReport {
    pub schema: String,
    pub dims: Vec<usize>,
    /// Padded ensemble size, the side of `Λ`.
    pub size: usize,
    pub fidelity: f64,
    pub p_ac: f64,
    pub fidelity_squared: f64,
    /// `F² ≤ pAc` within 1e-9.
    pub bound_holds: bool,
    /// `Σ_i (|Λ|_ii)²`; not a cheating probability in general.
    pub diag_square_sum: f64,
    pub polar_residual: f64,
    pub overlap: f64,
    pub orientation: Orientation,
    pub candidates: Vec<OrientationValue>,
    /// `‖ρ0 − ρ1‖₁`.
    pub trace_distance: f64,
    /// Babe's optimal guessing probability.
    pub helstrom: f64,
    pub lambda: Vec<Vec<ComplexPair>>,
    pub abs_lambda: Vec<Vec<ComplexPair>>,
    pub cheat_u: Vec<Vec<ComplexPair>>,
    pub mix_v: Vec<Vec<ComplexPair>>,
    pub tilde_states: Vec<TildeJson>,
}

impl CheatReport {
    pub fn pretty(&self) -> String {
        let mut s = format!("dims {:?}, padded size {}\n", self.dims, self.size);
        s += &format!("  fidelity F = tr|Λ|     {:.12}\n", self.fidelity);
        s += &format!("  cheat probability pAc  {:.12}  ({:?})\n", self.p_ac, self.orientation);
        s += &format!(
            "  F²                     {:.12}  bound F² ≤ pAc: {}\n",
            self.fidelity_squared,
            if self.bound_holds { "ok" } else { "VIOLATED" }
        );
        s += &format!("  Σ(|Λ|_ii)²             {:.12}\n", self.diag_square_sum);
        s += &format!("  |tr(ΛU)|               {:.12}\n", self.overlap);
        s += &format!("  polar residual         {:.3e}\n", self.polar_residual);
        s += &format!("  ‖ρ0 − ρ1‖₁             {:.12}\n", self.trace_distance);
        s += &format!("  Helstrom guess         {:.12}\n", self.helstrom);
        for c in &self.candidates {
            s += &format!("  orientation {:<10} pAc {:.12}\n", format!("{:?}", c.orientation), c.p_ac);
        }
        s
    }
}

pub fn cheat_report(e0: &Ensemble, e1: &Ensemble) -> Result<CheatReport> {
    let sol = optimal_overlap_cheat(e0, e1)?;
    let (r0, r1) = (e0.density(), e1.density());
    Ok(CheatReport {
        schema: CHEAT_REPORT_SCHEMA.into(),
        dims: e0.dims().to_vec(),
        size: sol.lambda.nrows(),
        fidelity: sol.fid,
        p_ac: sol.p_ac,
        fidelity_squared: sol.fid * sol.fid,
        bound_holds: sol.fid * sol.fid <= sol.p_ac + 1e-9,
        diag_square_sum: sol.diag_square_sum,
        polar_residual: sol.polar_residual,
        overlap: sol.overlap,
        orientation: sol.orientation,
        candidates: sol.candidates.iter().map(|(o, p)| OrientationValue { orientation: *o, p_ac: *p }).collect(),
        trace_distance: trace_norm(&(r0.matrix() - r1.matrix()))?,
        helstrom: helstrom(&r0, &r1)?,
        lambda: matrix_to_rows(&sol.lambda),
        abs_lambda: matrix_to_rows(&sol.abs_lambda),
        cheat_u: matrix_to_rows(&sol.cheat_u),
        mix_v: matrix_to_rows(&sol.mix_v),
        tilde_states: sol
            .tilde_states
            .iter()
            .map(|t| TildeJson { prob: t.prob, state: t.state.as_ref().map(KetJson::from) })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheat::families::{identical_pair, permutation_pair};

    #[test]
    fn fixtures_report_perfect_cheat() {
        for (e0, e1) in [permutation_pair(), identical_pair()] {
            let r = cheat_report(&e0, &e1).unwrap();
            assert!((r.p_ac - 1.0).abs() < 1e-9);
            assert!((r.fidelity - 1.0).abs() < 1e-9);
            assert!(r.bound_holds);
            assert!(r.trace_distance < 1e-12);
            assert!((r.helstrom - 0.5).abs() < 1e-12);
        }
    }
}
