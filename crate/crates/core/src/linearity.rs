//! The BLR linearity test and the self-corrector.
//!
//! Both are written against sealed query plans, so they work with oracles in
//! either mode and never look at an answer before every point is fixed.

use rand::Rng;
use serde::Serialize;

use crate::boolfn::{BitVector, Decision, FunctionOracle, QueryPlan};
use crate::{Error, Result};

/// Rounds per unit of `1/ε'`: `t1 = ceil(BLR_ROUNDS_CONSTANT / ε')`.
///
/// A function at uniform distance `δ ≤ 1/4` from Linear fails a round with
/// probability at least `δ`, so `2/ε'` rounds leave a miss probability of at
/// most `e^{-2} < 1/3`.
pub const BLR_ROUNDS_CONSTANT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundOutcome {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlrReport {
    pub rounds: usize,
    pub failures: usize,
    pub verdict: Decision,
}

/// `ceil(c / ε')` with the range check `0 < ε' < 1/8`.
pub fn blr_rounds_with_constant(eps_prime: f64, constant: f64) -> Result<usize> {
    if !(eps_prime > 0.0 && eps_prime < 0.125) {
        return Err(Error::param(format!(
            "BLR needs 0 < eps' < 1/8, got {eps_prime}"
        )));
    }
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::param(format!(
            "BLR round constant must be positive, got {constant}"
        )));
    }
    Ok(ceil_ratio(constant, eps_prime))
}

pub fn blr_rounds(eps_prime: f64) -> Result<usize> {
    blr_rounds_with_constant(eps_prime, BLR_ROUNDS_CONSTANT)
}

/// `ceil(a / b)`, treating quotients within `1e-9` of an integer as that
/// integer so that e.g. `4 / 0.1` gives 40 rather than 41.
pub(crate) fn ceil_ratio(a: f64, b: f64) -> usize {
    let q = a / b;
    let r = q.round();
    if (q - r).abs() < 1e-9 {
        r as usize
    } else {
        q.ceil() as usize
    }
}

/// Appends one BLR round `(x, y, x ⊕ y)` with fresh uniform `x, y`.
pub fn plan_blr_round<R: Rng + ?Sized>(plan: &mut QueryPlan, rng: &mut R) {
    let n = plan.n();
    let x = BitVector::random(n, rng);
    let y = BitVector::random(n, rng);
    let xy = BitVector::from_words(n, x.words().iter().zip(y.words()).map(|(a, b)| a ^ b));
    plan.push(x);
    plan.push(y);
    plan.push(xy);
}

/// Appends the two self-corrector queries `(x ⊕ z, z)` for a fresh uniform `z`.
pub fn plan_self_correct<R: Rng + ?Sized>(plan: &mut QueryPlan, x: &BitVector, rng: &mut R) {
    assert_eq!(
        x.len(),
        plan.n(),
        "dimension mismatch in self-corrector plan"
    );
    let z = BitVector::random(plan.n(), rng);
    let xz = BitVector::from_words(z.len(), x.words().iter().zip(z.words()).map(|(a, b)| a ^ b));
    plan.push(xz);
    plan.push(z);
}

/// One BLR round: three queries, passes iff `f(x) ⊕ f(y) = f(x ⊕ y)`.
pub fn blr_round<R: Rng + ?Sized>(f: &FunctionOracle, rng: &mut R) -> Result<RoundOutcome> {
    let mut plan = QueryPlan::with_capacity(f.n(), 3);
    plan_blr_round(&mut plan, rng);
    let mut sealed = f.seal(plan)?;
    let pass = sealed.answer(0) ^ sealed.answer(1) == sealed.answer(2);
    Ok(if pass {
        RoundOutcome::Pass
    } else {
        RoundOutcome::Fail
    })
}

/// Runs `ceil(2/ε')` rounds, all planned up front, and rejects iff any fails.
pub fn blr_test<R: Rng + ?Sized>(
    f: &FunctionOracle,
    eps_prime: f64,
    rng: &mut R,
) -> Result<BlrReport> {
    let rounds = blr_rounds(eps_prime)?;
    blr_test_rounds(f, rounds, rng)
}

pub fn blr_test_rounds<R: Rng + ?Sized>(
    f: &FunctionOracle,
    rounds: usize,
    rng: &mut R,
) -> Result<BlrReport> {
    let mut plan = QueryPlan::with_capacity(f.n(), 3 * rounds);
    for _ in 0..rounds {
        plan_blr_round(&mut plan, rng);
    }
    let mut sealed = f.seal(plan)?;
    let failures = (0..rounds)
        .filter(|r| {
            let i = 3 * r;
            sealed.answer(i) ^ sealed.answer(i + 1) != sealed.answer(i + 2)
        })
        .count();
    let verdict = if failures > 0 {
        Decision::Reject
    } else {
        Decision::Accept
    };
    Ok(BlrReport {
        rounds,
        failures,
        verdict,
    })
}

/// `f(x ⊕ z) ⊕ f(z)` for the given `z`; two queries.
pub fn self_correct_with(f: &FunctionOracle, x: &BitVector, z: &BitVector) -> Result<bool> {
    if x.len() != f.n() || z.len() != f.n() {
        return Err(Error::DimensionMismatch {
            expected: f.n(),
            found: if x.len() != f.n() { x.len() } else { z.len() },
        });
    }
    let mut plan = QueryPlan::with_capacity(f.n(), 2);
    let mut xz = x.clone();
    xz.xor_assign(z);
    plan.push(xz);
    plan.push(z.clone());
    let mut sealed = f.seal(plan)?;
    Ok(sealed.answer(0) ^ sealed.answer(1))
}

/// Self-corrected value of `f` at `x`, with a fresh uniform `z`.
pub fn self_correct<R: Rng + ?Sized>(
    f: &FunctionOracle,
    x: &BitVector,
    rng: &mut R,
) -> Result<bool> {
    let z = BitVector::random(f.n(), rng);
    self_correct_with(f, x, &z)
}
