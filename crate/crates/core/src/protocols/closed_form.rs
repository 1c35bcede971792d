//! Closed-form security quantities of the decoy protocols and explicit
//! density-operator checks at small sizes.

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::config::{ProtocolConfig, ProtocolKind};
use crate::error::{QbcError, Result};
use crate::qcore::linalg::hermitian_eigenvalues;
use crate::qcore::{
    check_cap, kron_all, partial_trace, trace_norm, CMatrix, DensityOp, GreatCircle, Ket, DEFAULT_DIM_CAP,
};

/// Babe's optimal guessing probability for an `n`-qubit decoy sequence and
/// the quantities it is assembled from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConcealingReport {
    pub n: usize,
    pub ell: usize,
    pub lambda_plus: f64,
    /// `P̄^B_c = ½ + λ₊ C(2ℓ, ℓ) / 2ⁿ`.
    pub closed_form: f64,
    /// `P̄^B_c − ½`.
    pub excess: f64,
    /// Binomial bounds on the excess; absent for `ℓ = 0`.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Whether the excess lies strictly between the bounds.
    pub inside_bounds: Option<bool>,
    /// `‖ρ_0 − ρ_1‖₁`.
    pub trace_distance: f64,
    /// `Σ_k C(n, k)|n − 2k|` in exact integers, when it fits in 128 bits.
    pub deviation_sum: Option<u128>,
    /// Whether `deviation_sum = 2(2ℓ + 1) C(2ℓ, ℓ)` exactly.
    pub deviation_identity_holds: Option<bool>,
}

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c·(n − i) is divisible by i + 1 at every step
        c = c.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(c)
}

/// `Σ_{k=0}^{n} C(n, k)|n − 2k|` in exact integers.
pub fn deviation_sum(n: u64) -> Option<u128> {
    let mut total: u128 = 0;
    for k in 0..=n {
        let w = (n as i128 - 2 * k as i128).unsigned_abs();
        total = total.checked_add(binomial_u128(n, k)?.checked_mul(w)?)?;
    }
    Some(total)
}

/// `2(2ℓ + 1) C(2ℓ, ℓ)`.
pub fn deviation_sum_closed(ell: u64) -> Option<u128> {
    binomial_u128(2 * ell, ell)?.checked_mul(2 * (2 * ell as u128 + 1))
}

/// `C(2ℓ, ℓ) / 2^(2ℓ+1)`: exact integers while they fit, a running product
/// of `(2k − 1)/(2k)` beyond.
fn central_ratio(ell: usize) -> f64 {
    if ell <= 60 {
        let c = binomial_u128(2 * ell as u64, ell as u64).expect("fits for ℓ ≤ 60") as f64;
        c / 2f64.powi(2 * ell as i32 + 1)
    } else {
        let mut r = 1.0;
        for k in 1..=ell {
            r *= (2 * k - 1) as f64 / (2 * k) as f64;
        }
        r / 2.0
    }
}

/// `(1/(4√ℓ), 1/(2√(πℓ)))`.
pub fn concealing_bounds(ell: usize) -> Result<(f64, f64)> {
    if ell == 0 {
        return Err(QbcError::Config("binomial bounds need ℓ ≥ 1".into()));
    }
    let l = ell as f64;
    Ok((1.0 / (4.0 * l.sqrt()), 1.0 / (2.0 * (std::f64::consts::PI * l).sqrt())))
}

/// Closed-form concealing probability for `n = 2ℓ + 1` qubits.
pub fn concealing_closed_form(n: usize, lambda_plus: f64) -> Result<ConcealingReport> {
    if n.is_multiple_of(2) {
        return Err(QbcError::Config(format!("n must be odd, got {n}")));
    }
    if !(lambda_plus > 0.0 && lambda_plus <= 1.0) {
        return Err(QbcError::Config(format!("λ₊ must lie in (0, 1], got {lambda_plus}")));
    }
    let ell = (n - 1) / 2;
    let excess = lambda_plus * central_ratio(ell);
    let (lower, upper, inside) = match concealing_bounds(ell) {
        Ok((lo, hi)) => (Some(lo), Some(hi), Some(lo < excess && excess < hi)),
        Err(_) => (None, None, None),
    };
    let sum = deviation_sum(n as u64);
    let identity = match (sum, deviation_sum_closed(ell as u64)) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    Ok(ConcealingReport {
        n,
        ell,
        lambda_plus,
        closed_form: 0.5 + excess,
        excess,
        lower,
        upper,
        inside_bounds: inside,
        trace_distance: 4.0 * excess,
        deviation_sum: sum,
        deviation_identity_holds: identity,
    })
}

/// Positive eigenvalue of `σ_0 − σ_1` for two qubit states.
pub fn lambda_plus(sigma0: &DensityOp, sigma1: &DensityOp) -> f64 {
    hermitian_eigenvalues(&(sigma0.matrix() - sigma1.matrix())).into_iter().fold(0.0, f64::max)
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64)
}

/// Probability that a majority of `m` independent decisions, each correct
/// with probability `p`, is correct:
/// `Σ_{k=0}^{(m−1)/2} C(m, k)(1 − p)^k p^(m−k)`.
pub fn majority_vote_pbc(m: usize, p: f64) -> Result<f64> {
    if m.is_multiple_of(2) {
        return Err(QbcError::Config(format!("majority vote needs odd m, got {m}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(QbcError::Config(format!("probability {p} outside [0, 1]")));
    }
    Ok((0..=(m - 1) / 2).map(|k| binomial_f64(m, k) * (1.0 - p).powi(k as i32) * p.powi((m - k) as i32)).sum())
}

/// `p(N, m) = (1 − 1/N)^m`, evaluated as `(N − 1)^m / N^m` in integers when
/// both fit.
pub fn none_match_probability(big_n: usize, m: usize) -> Result<f64> {
    if big_n == 0 {
        return Err(QbcError::Config("N must be at least 1".into()));
    }
    let exact = u32::try_from(m).ok().and_then(|e| {
        let num = (big_n as u128 - 1).checked_pow(e)?;
        let den = (big_n as u128).checked_pow(e)?;
        Some(num as f64 / den as f64)
    });
    Ok(exact.unwrap_or_else(|| (1.0 - 1.0 / big_n as f64).powi(m as i32)))
}

/// `½(1 + 1/n)`: guess the sent qubit's position at random and read its
/// outcome.
pub fn single_guess_pbc(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(QbcError::Config("n must be at least 1".into()));
    }
    Ok(0.5 * (1.0 + 1.0 / n as f64))
}

/// Success of the pattern vote over `N` qumodes of `m` qubits: Babe counts
/// qumodes showing the all-`ψ` and the all-`R(π,C)ψ` pattern and picks the
/// larger count, breaking ties by a coin. Each decoy qumode shows either
/// pattern with probability `2^−m`.
pub fn pattern_majority_pbc(big_n: usize, m: usize) -> Result<f64> {
    if big_n == 0 || m == 0 {
        return Err(QbcError::Config("N and m must be at least 1".into()));
    }
    let q = 0.5f64.powi(m as i32);
    let rest = 1.0 - 2.0 * q;
    let d = big_n - 1;
    let ln_fact = |k: usize| ln_gamma(k as f64 + 1.0);
    let mut total = 0.0;
    for a0 in 0..=d {
        for a1 in 0..=(d - a0) {
            let r = d - a0 - a1;
            let w = if r > 0 && rest <= 0.0 {
                0.0
            } else {
                let mut lw = ln_fact(d) - ln_fact(a0) - ln_fact(a1) - ln_fact(r);
                lw += (a0 + a1) as f64 * q.ln();
                if r > 0 {
                    lw += r as f64 * rest.ln();
                }
                lw.exp()
            };
            // the committed pattern always appears on the sent qumode
            let right = a0 + 1;
            if right > a1 {
                total += w;
            } else if right == a1 {
                total += 0.5 * w;
            }
        }
    }
    Ok(total)
}

fn circle_unitary(circle: &GreatCircle, b: u8) -> CMatrix {
    if b == 0 {
        CMatrix::identity(2, 2)
    } else {
        circle.flip()
    }
}

fn half_identity() -> CMatrix {
    CMatrix::identity(2, 2).unscale(2.0)
}

/// `(1/n) Σ_i (I/2) ⊗ … ⊗ σ_b ⊗ … ⊗ (I/2)` with `σ_b = U_b |ψ⟩⟨ψ| U_b†`.
pub fn qbcp3m_rho(config: &ProtocolConfig, psi: &Ket, b: u8) -> Result<DensityOp> {
    if psi.dim() != 2 {
        return Err(QbcError::Dimension(format!("anonymous state must be a qubit, got dimension {}", psi.dim())));
    }
    let n = match config.kind {
        ProtocolKind::QBCp3m | ProtocolKind::QBCp3u => config.n,
        _ => return Err(QbcError::Config("explicit ρ is defined for single-qubit sequences".into())),
    };
    if n == 0 {
        return Err(QbcError::Config("n must be at least 1".into()));
    }
    if n > 12 {
        return Err(QbcError::CapExceeded { dim: usize::MAX, cap: DEFAULT_DIM_CAP });
    }
    check_cap(1 << n, DEFAULT_DIM_CAP)?;
    let u = circle_unitary(&config.circle, b);
    let sigma = &u * psi.projector().matrix() * u.adjoint();
    let mut acc = CMatrix::zeros(1 << n, 1 << n);
    for i in 0..n {
        let parts: Vec<CMatrix> = (0..n).map(|k| if k == i { sigma.clone() } else { half_identity() }).collect();
        acc += kron_all(&parts)?;
    }
    Ok(DensityOp::from_parts_unchecked(acc.unscale(n as f64), vec![2; n]))
}

/// Places a joint operator on (qubit `i`, `C`) into `n` qubits followed by
/// `C`, with `I/2` on every other qubit.
fn place_with_ancilla(joint: &CMatrix, dc: usize, n: usize, i: usize) -> Result<CMatrix> {
    let mut acc = CMatrix::zeros((1 << n) * dc, (1 << n) * dc);
    for a in 0..2 {
        for b in 0..2 {
            let block = joint.view((a * dc, b * dc), (dc, dc)).into_owned();
            let mut e = CMatrix::zeros(2, 2);
            e[(a, b)] = Complex64::new(1.0, 0.0);
            let mut parts: Vec<CMatrix> = (0..n).map(|k| if k == i { e.clone() } else { half_identity() }).collect();
            parts.push(block);
            acc += kron_all(&parts)?;
        }
    }
    Ok(acc)
}

fn modulated_joint(psi_bc: &Ket, circle: &GreatCircle, b: u8) -> Result<(CMatrix, usize)> {
    if !psi_bc.dim().is_multiple_of(2) || psi_bc.dims().first() != Some(&2) {
        return Err(QbcError::Dimension("entangled input must start with the sent qubit".into()));
    }
    let dc = psi_bc.dim() / 2;
    let u = circle_unitary(circle, b).kronecker(&CMatrix::identity(dc, dc));
    let k = psi_bc.apply(&u)?;
    Ok((k.amplitudes() * k.amplitudes().adjoint(), dc))
}

/// Both sides of the triangle-inequality bound on Babe's distinguishing
/// power when she keeps `H^C` entangled with the sent qubit and attaches it
/// to position `attach`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MismatchRecord {
    pub n: usize,
    /// `n‖ρ^BC_0 − ρ^BC_1‖₁`.
    pub lhs: f64,
    /// `‖Σ_{i≠attach} (X_i^0 − X_i^1)‖₁` over the mismatched placements.
    pub mismatch: f64,
    /// `2 + mismatch`.
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates the entangled-Babe bound on `n` qubits plus `H^C`, at most 10
/// qubits in total.
pub fn entangled_mismatch_check(n: usize, psi_bc: &Ket, circle: &GreatCircle, attach: usize) -> Result<MismatchRecord> {
    if n == 0 || attach >= n {
        return Err(QbcError::Config(format!("attach position {attach} outside 0..{n}")));
    }
    let dc = psi_bc.dim() / 2;
    let total = (1usize << n.min(30)) * dc;
    check_cap(total, 1 << 10)?;
    let mut sums = Vec::new();
    let mut terms = Vec::new();
    for b in 0..2u8 {
        let (joint, _) = modulated_joint(psi_bc, circle, b)?;
        let mut all = CMatrix::zeros(total, total);
        let mut off = CMatrix::zeros(total, total);
        for i in 0..n {
            let x = place_with_ancilla(&joint, dc, n, i)?;
            if i != attach {
                off += &x;
            }
            all += x;
        }
        sums.push(all);
        terms.push(off);
    }
    // n·ρ_b is the unnormalized sum over placements
    let lhs = trace_norm(&(&sums[0] - &sums[1]))?;
    let mismatch = trace_norm(&(&terms[0] - &terms[1]))?;
    let rhs = 2.0 + mismatch;
    Ok(MismatchRecord { n, lhs, mismatch, rhs, holds: lhs <= rhs + 1e-9 })
}

/// Segment version: each of `m` segments of `N` qubits carries one sent
/// qubit entangled with its own `H^C_j`, attached to the segment's first
/// position.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SegmentMismatchRecord {
    pub m: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    /// Probability that no attachment hits its sent qubit.
    pub p_none_match: f64,
    /// `‖ρ_0 − ρ_1‖₁` on all segments and ancillas.
    pub lhs: f64,
    /// Distance of the states conditioned on no match; absent for `N = 1`.
    pub bar_distance: Option<f64>,
    /// `(1 − p)·2 + p·bar_distance`.
    pub rhs: f64,
    pub holds: bool,
}

pub fn segment_mismatch_check(big_n: usize, psis: &[Ket], circle: &GreatCircle) -> Result<SegmentMismatchRecord> {
    if psis.is_empty() {
        return Err(QbcError::Empty("segment inputs"));
    }
    if big_n == 0 {
        return Err(QbcError::Config("N must be at least 1".into()));
    }
    let m = psis.len();
    let mut total = 1usize;
    for p in psis {
        total = total.saturating_mul((1usize << big_n.min(30)).saturating_mul(p.dim() / 2));
    }
    check_cap(total, 1 << 10)?;
    let mut full = [Vec::new(), Vec::new()];
    let mut bar = [Vec::new(), Vec::new()];
    for psi in psis {
        for b in 0..2u8 {
            let (joint, dc) = modulated_joint(psi, circle, b)?;
            let d = (1 << big_n) * dc;
            let mut all = CMatrix::zeros(d, d);
            let mut off = CMatrix::zeros(d, d);
            for i in 0..big_n {
                let x = place_with_ancilla(&joint, dc, big_n, i)?;
                if i != 0 {
                    off += &x;
                }
                all += x;
            }
            full[b as usize].push(all.unscale(big_n as f64));
            if big_n > 1 {
                bar[b as usize].push(off.unscale((big_n - 1) as f64));
            }
        }
    }
    let lhs = trace_norm(&(kron_all(&full[0])? - kron_all(&full[1])?))?;
    let p = none_match_probability(big_n, m)?;
    let bar_distance = if big_n > 1 { Some(trace_norm(&(kron_all(&bar[0])? - kron_all(&bar[1])?))?) } else { None };
    let rhs = (1.0 - p) * 2.0 + p * bar_distance.unwrap_or(0.0);
    Ok(SegmentMismatchRecord { m, big_n, p_none_match: p, lhs, bar_distance, rhs, holds: lhs <= rhs + 1e-9 })
}

/// `(‖(ρ − ρ') ⊗ σ‖₁, ‖ρ − ρ'‖₁)`.
pub fn product_trace_norms(rho: &DensityOp, rho_p: &DensityOp, sigma: &DensityOp) -> Result<(f64, f64)> {
    let diff = rho.matrix() - rho_p.matrix();
    let lhs = trace_norm(&diff.kronecker(sigma.matrix()))?;
    Ok((lhs, trace_norm(&diff)?))
}

/// `F_c = ½⟨ψ|ρ_a|ψ⟩_av + ½⟨ψ|U_1† ρ_b U_1|ψ⟩_av` over a uniform state set,
/// from each input `ψ` paired with the two-qubit output it produced.
pub fn clone_criterion(outputs: &[(Ket, DensityOp)], circle: &GreatCircle) -> Result<f64> {
    if outputs.is_empty() {
        return Err(QbcError::Empty("clone outputs"));
    }
    let u1 = circle.flip();
    let mut total = 0.0;
    for (psi, joint) in outputs {
        if psi.dim() != 2 || joint.dim() != 4 {
            return Err(QbcError::Dimension("clone criterion needs qubit inputs and two-qubit outputs".into()));
        }
        let joint = DensityOp::from_parts_unchecked(joint.matrix().clone(), vec![2, 2]);
        let rho_a = partial_trace(&joint, &[0])?;
        let rho_b = partial_trace(&joint, &[1])?;
        let target = psi.apply(&u1)?;
        total += 0.5 * rho_a.expectation(psi) + 0.5 * rho_b.expectation(&target);
    }
    Ok(total / outputs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_ket, tensor};
    use crate::rng::stream_from_seed;

    #[test]
    fn small_closed_forms_exact() {
        assert_eq!(concealing_closed_form(1, 1.0).unwrap().closed_form, 1.0);
        assert_eq!(concealing_closed_form(3, 1.0).unwrap().closed_form, 0.75);
        assert_eq!(concealing_closed_form(5, 1.0).unwrap().closed_form, 0.6875);
        let r = concealing_closed_form(3, 1.0).unwrap();
        assert_eq!(r.deviation_sum, Some(12));
        assert_eq!(r.trace_distance, 1.0);
        assert!(concealing_closed_form(4, 1.0).is_err());
    }

    #[test]
    fn deviation_identity_for_small_ell() {
        for ell in 0..=15u64 {
            assert_eq!(deviation_sum(2 * ell + 1), deviation_sum_closed(ell), "ℓ = {ell}");
        }
    }

    #[test]
    fn large_ell_uses_ratio() {
        let exact = concealing_closed_form(121, 1.0).unwrap().excess;
        let ratio = concealing_closed_form(123, 1.0).unwrap().excess;
        // C(2ℓ+2, ℓ+1)/C(2ℓ, ℓ) = (2ℓ+1)(2ℓ+2)/(ℓ+1)², over 4
        let want = exact * (121.0 * 122.0) / (61.0 * 61.0) / 4.0;
        assert!((ratio - want).abs() < 1e-14);
        assert!(concealing_closed_form(2001, 1.0).unwrap().inside_bounds.unwrap());
    }

    #[test]
    fn bounds_examples() {
        let (lo, hi) = concealing_bounds(1).unwrap();
        assert_eq!(lo, 0.25);
        assert!((hi - 0.28209479177387814).abs() < 1e-15);
        let r = concealing_closed_form(5, 1.0).unwrap();
        assert_eq!(r.inside_bounds, Some(true));
        assert!(concealing_bounds(0).is_err());
    }

    #[test]
    fn majority_vote() {
        assert_eq!(majority_vote_pbc(1, 0.8).unwrap(), 0.8);
        assert!((majority_vote_pbc(3, 0.75).unwrap() - 0.84375).abs() < 1e-15);
        for m in [1, 3, 5, 9] {
            assert!((majority_vote_pbc(m, 0.5).unwrap() - 0.5).abs() < 1e-14);
            assert!((majority_vote_pbc(m, 1.0).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!(majority_vote_pbc(2, 0.7).is_err());
    }

    #[test]
    fn none_match() {
        assert_eq!(none_match_probability(10, 3).unwrap(), 0.729);
        assert_eq!(none_match_probability(1, 1).unwrap(), 0.0);
    }

    #[test]
    fn pattern_vote_with_single_qubit_modes_is_plain_majority() {
        for n in [3, 5, 7] {
            let a = pattern_majority_pbc(n, 1).unwrap();
            let b = concealing_closed_form(n, 1.0).unwrap().closed_form;
            assert!((a - b).abs() < 1e-12, "{n}: {a} vs {b}");
        }
        // with many patterns decoys rarely tie the sent pattern
        assert!(pattern_majority_pbc(5, 6).unwrap() > 0.9);
    }

    #[test]
    fn explicit_rho_matches_closed_form() {
        let c = GreatCircle::standard();
        for n in [1, 3, 5] {
            let cfg = ProtocolConfig::qbcp3m(n);
            let psi = c.state(0.7);
            let r0 = qbcp3m_rho(&cfg, &psi, 0).unwrap();
            let r1 = qbcp3m_rho(&cfg, &psi, 1).unwrap();
            assert!((r0.matrix().trace().re - 1.0).abs() < 1e-12);
            let t = trace_norm(&(r0.matrix() - r1.matrix())).unwrap();
            let want = concealing_closed_form(n, 1.0).unwrap().trace_distance;
            assert!((t - want).abs() < 1e-10, "n = {n}: {t} vs {want}");
        }
    }

    #[test]
    fn mismatch_bounds_hold() {
        let c = GreatCircle::standard();
        let mut rng = stream_from_seed(61);
        let product = tensor(&[c.state(0.3), Ket::basis(2, 0)]).unwrap();
        let r = entangled_mismatch_check(3, &product, &c, 0).unwrap();
        assert!((r.lhs - 3.0).abs() < 1e-9);
        assert!(r.holds);
        for n in 1..=5 {
            let psi = haar_ket(&[2, 2], &mut rng);
            assert!(entangled_mismatch_check(n, &psi, &c, n / 2).unwrap().holds);
        }
        let seg = segment_mismatch_check(3, &[haar_ket(&[2, 2], &mut rng), haar_ket(&[2, 2], &mut rng)], &c).unwrap();
        assert!(seg.holds);
        let one = segment_mismatch_check(1, &[haar_ket(&[2, 2], &mut rng)], &c).unwrap();
        assert_eq!(one.p_none_match, 0.0);
        assert_eq!(one.rhs, 2.0);
    }

    #[test]
    fn clone_criterion_examples() {
        let c = GreatCircle::standard();
        let psis: Vec<Ket> = c.bb84().to_vec();
        let mixed = DensityOp::maximally_mixed(2);
        let half: Vec<(Ket, DensityOp)> =
            psis.iter().map(|p| (p.clone(), tensor(&[p.projector(), mixed.clone()]).unwrap())).collect();
        assert!((clone_criterion(&half, &c).unwrap() - 0.75).abs() < 1e-12);
        let perfect: Vec<(Ket, DensityOp)> = psis
            .iter()
            .map(|p| (p.clone(), tensor(&[p.clone(), p.apply(&c.flip()).unwrap()]).unwrap().projector()))
            .collect();
        assert!((clone_criterion(&perfect, &c).unwrap() - 1.0).abs() < 1e-12);
    }
}
