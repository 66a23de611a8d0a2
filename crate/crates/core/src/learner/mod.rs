//! Deterministic non-adaptive learning of sparse parities.
//!
//! The query matrix is the parity-check matrix of a binary BCH code with
//! designed distance `2K + 1`, extended by an all-ones row. Answers to its rows
//! under a parity `χ_x` are the syndrome `M·x`, which determines any `x` of
//! weight at most `K`.

mod decode;
mod gf;
mod matrix;

pub use decode::{brute_force_decode, decode, DecodeResult, BRUTE_FORCE_LIMIT};
pub use gf::{build_field, primitive_poly, FieldTables, MAX_DEGREE, MIN_DEGREE, PRIMITIVE_POLYS};
pub use matrix::{
    bch_matrix, build_bch_matrix, degree_for, syndrome, Construction, MatrixMeta, QueryMatrix,
};

use crate::boolfn::{FunctionOracle, QueryPlan};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnOutcome {
    pub result: DecodeResult,
    pub queries: u64,
}

/// Queries `oracle` at every row of the `(N, K)` matrix, then decodes.
pub fn learn_sparse_parity(oracle: &FunctionOracle, k_sparse: usize) -> Result<LearnOutcome> {
    let m = bch_matrix(oracle.n(), k_sparse)?;
    let mut plan = QueryPlan::with_capacity(oracle.n(), m.q());
    for row in m.rows() {
        plan.push(row.clone());
    }
    let mut sealed = oracle.seal(plan)?;
    let bits: Vec<bool> = (0..m.q()).map(|i| sealed.answer(i)).collect();
    let answers = crate::boolfn::BitVector::from_bools(&bits);
    let result = decode(&m, &answers, k_sparse)?;
    Ok(LearnOutcome {
        result,
        queries: sealed.answered(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{Constant, Majority3, ParitySupport};

    #[test]
    fn learns_parities() {
        let f = FunctionOracle::from_fn(ParitySupport::new(15, [2, 9]).unwrap());
        let out = learn_sparse_parity(&f, 2).unwrap();
        assert_eq!(
            out.result,
            DecodeResult::Support(ParitySupport::new(15, [2, 9]).unwrap())
        );
        assert_eq!(out.queries, 9);
        assert_eq!(f.query_count(), 9);

        let zero = FunctionOracle::planned(std::sync::Arc::new(Constant {
            n: 40,
            value: false,
        }));
        let out = learn_sparse_parity(&zero, 3).unwrap();
        assert_eq!(out.result, DecodeResult::Support(ParitySupport::empty(40)));
    }

    #[test]
    fn non_parity_is_handled() {
        let f = FunctionOracle::from_fn(Majority3::new(31).unwrap());
        let out = learn_sparse_parity(&f, 3).unwrap();
        if let DecodeResult::Support(s) = out.result {
            assert!(s.weight() <= 3);
        }
    }
}
