//! Syndrome decoding: Berlekamp–Massey, Chien search and a final re-encode.

use super::gf::FieldTables;
use super::matrix::{Construction, QueryMatrix};
use crate::boolfn::{binomial_prefix_sum, BitVector, Combinations, ParitySupport};
use crate::{Error, Result};

/// Largest `C(N, ≤K)` the brute-force decoder will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeResult {
    Support(ParitySupport),
    NotSparse,
}

impl DecodeResult {
    pub fn support(&self) -> Option<&ParitySupport> {
        match self {
            DecodeResult::Support(s) => Some(s),
            DecodeResult::NotSparse => None,
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, DecodeResult::Support(_))
    }
}

fn check_answers(m: &QueryMatrix, answers: &BitVector, k_sparse: usize) -> Result<()> {
    if answers.len() != m.q() {
        return Err(Error::DimensionMismatch {
            expected: m.q(),
            found: answers.len(),
        });
    }
    if k_sparse == 0 || k_sparse > m.meta().k {
        return Err(Error::param(format!(
            "decoding radius {k_sparse} outside 1..={} for this matrix",
            m.meta().k
        )));
    }
    Ok(())
}

/// Minimal LFSR `(Λ, L)` generating `s`, with `Λ[0] = 1`.
fn berlekamp_massey(f: &FieldTables, s: &[u32]) -> (Vec<u32>, usize) {
    let mut c = vec![1u32];
    let mut b = vec![1u32];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last = 1u32;
    for n in 0..s.len() {
        let mut d = s[n];
        for i in 1..=l.min(c.len() - 1) {
            d ^= f.mul(c[i], s[n - i]);
        }
        if d == 0 {
            shift += 1;
            continue;
        }
        let coef = f.div(d, last).expect("nonzero discrepancy base");
        let prev = c.clone();
        if c.len() < b.len() + shift {
            c.resize(b.len() + shift, 0);
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + shift] ^= f.mul(coef, bi);
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = prev;
            last = d;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.truncate(l + 1);
    c.resize(l + 1, 0);
    (c, l)
}

/// Columns `j` (0-based) with `Λ(α^{-j}) = 0`, stopping after `limit` roots.
fn chien_search(f: &FieldTables, lambda: &[u32], n_cols: usize, limit: usize) -> Vec<usize> {
    let order = f.order() as u32;
    // (current exponent of the term, per-column decrement)
    let mut terms: Vec<(u32, u32)> = lambda
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(i, &c)| f.log(c).map(|lc| (lc, (i as u32) % order)))
        .collect();
    let antilog = f.antilog();
    let mut roots = Vec::new();
    for j in 0..n_cols {
        let mut acc = lambda[0];
        for (e, step) in terms.iter_mut() {
            acc ^= antilog[*e as usize];
            *e = if *e >= *step {
                *e - *step
            } else {
                *e + order - *step
            };
        }
        if acc == 0 {
            roots.push(j);
            if roots.len() > limit {
                break;
            }
        }
    }
    roots
}

/// Odd syndromes `S_1, S_3, ...` read back from the answer bits.
fn odd_syndromes(m: &QueryMatrix, answers: &BitVector, k_sparse: usize) -> Vec<u32> {
    let deg = m.meta().m;
    (0..k_sparse)
        .map(|i| {
            (0..deg).fold(0u32, |acc, b| {
                acc | (answers.get(i * deg + b + 1) as u32) << b
            })
        })
        .collect()
}

/// Recovers the unique `x` of weight at most `k_sparse` with `M·x = answers`,
/// or reports that none exists.
pub fn decode(m: &QueryMatrix, answers: &BitVector, k_sparse: usize) -> Result<DecodeResult> {
    check_answers(m, answers, k_sparse)?;
    if m.meta().construction != Construction::Bch {
        return Err(Error::param("algebraic decoding needs a BCH matrix"));
    }
    let f = m.field().expect("BCH matrix carries its field");
    let n = m.n_cols();
    let odd = odd_syndromes(m, answers, m.meta().k);
    let mut s = vec![0u32; 2 * k_sparse];
    for t in 1..=2 * k_sparse {
        s[t - 1] = if t % 2 == 1 {
            odd[t / 2]
        } else {
            f.square(s[t / 2 - 1])
        };
    }
    let (lambda, l) = berlekamp_massey(f, &s);
    if l > k_sparse {
        return Ok(DecodeResult::NotSparse);
    }
    let roots = chien_search(f, &lambda, n, l);
    if roots.len() != l {
        return Ok(DecodeResult::NotSparse);
    }
    // Re-encode the candidate against every row, parity row included.
    let parity_bit = answers.get(m.q());
    if (l % 2 == 1) != parity_bit {
        return Ok(DecodeResult::NotSparse);
    }
    let order = f.order();
    for (i, &want) in odd.iter().enumerate() {
        let got = roots
            .iter()
            .fold(0u32, |acc, &j| acc ^ f.antilog()[((2 * i + 1) * j) % order]);
        if got != want {
            return Ok(DecodeResult::NotSparse);
        }
    }
    Ok(DecodeResult::Support(ParitySupport::new(
        n,
        roots.iter().map(|j| j + 1),
    )?))
}

/// Exhaustive search over all supports of weight at most `k_sparse`.
pub fn brute_force_decode(
    m: &QueryMatrix,
    answers: &BitVector,
    k_sparse: usize,
) -> Result<DecodeResult> {
    check_answers(m, answers, k_sparse)?;
    let n = m.n_cols();
    let count = binomial_prefix_sum(n, k_sparse);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!(
            "C({n}, <={k_sparse}) = {count} candidate supports"
        )));
    }
    let cols: Vec<BitVector> = (1..=n).map(|c| m.column(c)).collect();
    for w in 0..=k_sparse.min(n) {
        for set in Combinations::new(n, w) {
            let mut acc = BitVector::zeros(m.q());
            for &c in &set {
                acc.xor_assign(&cols[c - 1]);
            }
            if &acc == answers {
                return Ok(DecodeResult::Support(ParitySupport::new(n, set)?));
            }
        }
    }
    Ok(DecodeResult::NotSparse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::gf::build_field;
    use crate::learner::matrix::{build_bch_matrix, syndrome};
    use crate::rng::stream_rng;
    use rand::seq::index::sample;
    use rand::Rng;

    fn roundtrip_exhaustive(n: usize, k: usize) -> usize {
        let m = build_bch_matrix(n, k).unwrap();
        let mut cases = 0;
        for w in 0..=k {
            for set in Combinations::new(n, w) {
                let x = ParitySupport::new(n, set).unwrap();
                let ans = syndrome(&m, &x).unwrap();
                assert_eq!(decode(&m, &ans, k).unwrap(), DecodeResult::Support(x));
                cases += 1;
            }
        }
        cases
    }

    #[test]
    fn exhaustive_roundtrips() {
        assert_eq!(roundtrip_exhaustive(7, 1), 8);
        assert_eq!(roundtrip_exhaustive(15, 2), 121);
        assert_eq!(roundtrip_exhaustive(31, 3), 1 + 31 + 465 + 4495);
    }

    #[test]
    fn zero_answers_decode_to_empty() {
        let m = build_bch_matrix(63, 5).unwrap();
        let ans = BitVector::zeros(m.q());
        assert_eq!(
            decode(&m, &ans, 5).unwrap(),
            DecodeResult::Support(ParitySupport::empty(63))
        );
    }

    #[test]
    fn weight_three_rejected_at_radius_two() {
        let m = build_bch_matrix(15, 2).unwrap();
        for set in Combinations::new(15, 3) {
            let x = ParitySupport::new(15, set).unwrap();
            let ans = syndrome(&m, &x).unwrap();
            assert_eq!(decode(&m, &ans, 2).unwrap(), DecodeResult::NotSparse);
            assert_eq!(
                brute_force_decode(&m, &ans, 2).unwrap(),
                DecodeResult::NotSparse
            );
        }
    }

    #[test]
    fn agrees_with_brute_force_on_every_answer_vector() {
        // N=15, K=2 gives q = 9, so all 512 answer vectors are checked.
        let m = build_bch_matrix(15, 2).unwrap();
        for v in 0..(1u64 << m.q()) {
            let ans = BitVector::from_low_bits(m.q(), v);
            assert_eq!(
                decode(&m, &ans, 2).unwrap(),
                brute_force_decode(&m, &ans, 2).unwrap(),
                "answers {ans}"
            );
        }
        let m = build_bch_matrix(7, 1).unwrap();
        for v in 0..(1u64 << m.q()) {
            let ans = BitVector::from_low_bits(m.q(), v);
            assert_eq!(
                decode(&m, &ans, 1).unwrap(),
                brute_force_decode(&m, &ans, 1).unwrap()
            );
        }
    }

    #[test]
    fn agrees_with_brute_force_on_random_answers() {
        let mut rng = stream_rng(11, 0);
        for (n, k) in [(31, 3), (63, 2), (100, 2), (20, 4)] {
            let m = build_bch_matrix(n, k).unwrap();
            for _ in 0..300 {
                let ans = BitVector::random(m.q(), &mut rng);
                assert_eq!(
                    decode(&m, &ans, k).unwrap(),
                    brute_force_decode(&m, &ans, k).unwrap()
                );
            }
            // and on syndromes of slightly-too-heavy supports
            for _ in 0..100 {
                let w = rng.gen_range(k + 1..=k + 2);
                let idx: Vec<usize> = sample(&mut rng, n, w).into_iter().map(|i| i + 1).collect();
                let ans = syndrome(&m, &ParitySupport::new(n, idx).unwrap()).unwrap();
                assert_eq!(
                    decode(&m, &ans, k).unwrap(),
                    brute_force_decode(&m, &ans, k).unwrap()
                );
            }
        }
    }

    #[test]
    fn brute_force_examples() {
        let m = build_bch_matrix(15, 1).unwrap();
        let x = ParitySupport::new(15, [5]).unwrap();
        let ans = syndrome(&m, &x).unwrap();
        assert_eq!(
            brute_force_decode(&m, &ans, 1).unwrap(),
            DecodeResult::Support(x)
        );
        let big = build_bch_matrix(4095, 4).unwrap();
        assert!(matches!(
            brute_force_decode(&big, &BitVector::zeros(big.q()), 4),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn malformed_answers() {
        let m = build_bch_matrix(15, 2).unwrap();
        assert!(decode(&m, &BitVector::zeros(3), 2).is_err());
        assert!(decode(&m, &BitVector::zeros(m.q()), 3).is_err());
        let e = QueryMatrix::explicit(3, 1, vec![BitVector::ones(3)]).unwrap();
        assert!(decode(&e, &BitVector::zeros(1), 1).is_err());
        assert!(brute_force_decode(&e, &BitVector::zeros(1), 1).is_ok());
    }

    #[test]
    fn smaller_radius_than_matrix() {
        let m = build_bch_matrix(31, 4).unwrap();
        let x = ParitySupport::new(31, [1, 17, 30]).unwrap();
        let ans = syndrome(&m, &x).unwrap();
        assert_eq!(
            decode(&m, &ans, 3).unwrap(),
            DecodeResult::Support(x.clone())
        );
        assert_eq!(decode(&m, &ans, 2).unwrap(), DecodeResult::NotSparse);
    }

    #[test]
    fn bm_recovers_locator() {
        let f = build_field(4).unwrap();
        // single error at α^3: S_t = α^{3t}, Λ = 1 + α^3 x
        let s: Vec<u32> = (1..=4).map(|t| f.alpha_pow(3 * t)).collect();
        let (lambda, l) = berlekamp_massey(&f, &s);
        assert_eq!(l, 1);
        assert_eq!(lambda, vec![1, f.alpha_pow(3)]);
        assert_eq!(chien_search(&f, &lambda, 15, 1), vec![3]);
    }
}
