use rand::Rng;

use super::ensemble::Ensemble;
use super::solver::cheat_success;
use crate::error::{QbcError, Result};
use crate::qcore::linalg::{exp_i_hermitian, random_hermitian};
use crate::qcore::{haar_unitary, CMatrix};

/// Largest padded ensemble size the brute-force oracle accepts.
pub const ORACLE_SIZE_CAP: usize = 6;

/// Random-restart hill climb over `dim × dim` unitaries.
///
/// Each restart starts from a Haar-random unitary and proposes
/// `V·exp(i·ε·H)` for random Hermitian `H`; the step `ε` shrinks after a run
/// of rejected proposals. Returns the best unitary and its objective value.
pub fn maximize_over_unitaries<R, F>(dim: usize, budget: usize, rng: &mut R, mut objective: F) -> (CMatrix, f64)
where
    R: Rng + ?Sized,
    F: FnMut(&CMatrix) -> f64,
{
    let restarts = (budget / 400).clamp(1, 16);
    let per = (budget / restarts).max(1);
    let mut best = (CMatrix::identity(dim, dim), objective(&CMatrix::identity(dim, dim)));
    for _ in 0..restarts {
        let mut v = haar_unitary(dim, rng);
        let mut val = objective(&v);
        let mut step = 0.5;
        let mut misses = 0;
        for _ in 0..per {
            let h = random_hermitian(dim, rng);
            let cand = &v * exp_i_hermitian(&(h * num_complex::Complex64::from(step)));
            let cv = objective(&cand);
            if cv > val {
                v = cand;
                val = cv;
                misses = 0;
            } else {
                misses += 1;
                if misses >= 12 {
                    step = (step * 0.6f64).max(1e-7);
                    misses = 0;
                }
            }
        }
        if val > best.1 {
            best = (v, val);
        }
    }
    best
}

/// Best cheating probability found by direct search over mixing unitaries.
/// Independent of the polar construction; intended for small ensembles.
pub fn brute_force_cheat_oracle<R: Rng + ?Sized>(
    e0: &Ensemble,
    e1: &Ensemble,
    budget: usize,
    rng: &mut R,
) -> Result<(CMatrix, f64)> {
    let size = e0.len().max(e1.len());
    if size > ORACLE_SIZE_CAP {
        return Err(QbcError::CapExceeded { dim: size, cap: ORACLE_SIZE_CAP });
    }
    // validates dims once so the objective can unwrap
    cheat_success(e0, e1, &CMatrix::identity(size, size))?;
    Ok(maximize_over_unitaries(size, budget, rng, |v| cheat_success(e0, e1, v).unwrap_or(f64::NEG_INFINITY)))
}
