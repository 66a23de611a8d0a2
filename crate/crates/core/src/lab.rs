//! Executable pieces of the query lower bound: the Hamming bound, zero-sum
//! packings of matrix columns, and the number-theoretic lemmas used to build
//! bad column sets.

use std::fmt;
use std::path::Path;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::boolfn::{BitVector, Combinations};
use crate::learner::QueryMatrix;
use crate::{Error, Result};

/// Largest column count for exact packing search.
pub const MAX_PACKING_COLS: usize = 24;
/// Largest subset size for exact packing search.
pub const MAX_PACKING_SIZE: usize = 4;

/// A `q × n_cols` matrix over GF(2), stored by rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n_cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn from_rows(n_cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch {
                expected: n_cols,
                found: r.len(),
            });
        }
        Ok(BitMatrix { n_cols, rows })
    }

    /// Built from its columns, each of length `q`.
    pub fn from_columns(q: usize, cols: &[BitVector]) -> Result<Self> {
        let mut rows = vec![BitVector::zeros(cols.len()); q];
        for (c, col) in cols.iter().enumerate() {
            if col.len() != q {
                return Err(Error::DimensionMismatch {
                    expected: q,
                    found: col.len(),
                });
            }
            for r in col.ones_iter() {
                rows[r - 1].set(c + 1, true);
            }
        }
        Ok(BitMatrix {
            n_cols: cols.len(),
            rows,
        })
    }

    pub fn from_query_matrix(m: &QueryMatrix) -> Self {
        BitMatrix {
            n_cols: m.n_cols(),
            rows: m.rows().to_vec(),
        }
    }

    /// The 3 × 7 matrix whose column `c` is `c` in binary.
    pub fn hamming_3x7() -> Self {
        let cols: Vec<BitVector> = (1..=7u64).map(|c| BitVector::from_low_bits(3, c)).collect();
        Self::from_columns(3, &cols).expect("consistent shape")
    }

    /// Rows of `0`/`1` characters. A leading header line in the matrix dump
    /// format (`N K q m poly=<hex>`) is accepted and checked.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .peekable();
        let mut header: Option<(usize, usize)> = None;
        if let Some(first) = lines.peek() {
            if first.contains(' ') {
                let fields: Vec<&str> = first.split_whitespace().collect();
                let bad = || Error::parse(format!("bad matrix header {first:?}"));
                if fields.len() != 5 || !fields[4].starts_with("poly=") {
                    return Err(bad());
                }
                let n: usize = fields[0].parse().map_err(|_| bad())?;
                let q: usize = fields[2].parse().map_err(|_| bad())?;
                header = Some((n, q));
                lines.next();
            }
        }
        let rows = lines
            .map(|l| l.parse::<BitVector>())
            .collect::<Result<Vec<_>>>()?;
        let n_cols = rows
            .first()
            .map(BitVector::len)
            .unwrap_or(header.map_or(0, |h| h.0));
        let m = Self::from_rows(n_cols, rows)?;
        if let Some((n, q)) = header {
            if n != m.n_cols || q != m.q() {
                return Err(Error::parse(format!(
                    "header says {q}x{n}, body is {}x{}",
                    m.q(),
                    m.n_cols
                )));
            }
        }
        Ok(m)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn q(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    /// Column `c`, 1-based.
    pub fn column(&self, c: usize) -> BitVector {
        let bits: Vec<bool> = self.rows.iter().map(|r| r.get(c)).collect();
        BitVector::from_bools(&bits)
    }

    pub fn columns(&self) -> Vec<BitVector> {
        (1..=self.n_cols).map(|c| self.column(c)).collect()
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn concat(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.n_cols != other.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: other.n_cols,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix {
            n_cols: self.n_cols,
            rows,
        })
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// `ceil(log2 Σ_{i ≤ ⌊k/2⌋} C(n, i))`.
pub fn hamming_lower_bound(n: usize, k: usize) -> Result<u64> {
    if k == 0 || k > n {
        return Err(Error::param(format!("need 1 <= k <= n, got n={n} k={k}")));
    }
    let mut sum = BigUint::one();
    let mut term = BigUint::one();
    for i in 0..k / 2 {
        term = term * BigUint::from(n - i) / BigUint::from(i + 1);
        sum += &term;
    }
    // ceil(log2 s) is the bit length of s - 1
    Ok((sum - 1u32).bits())
}

/// Maximum number of pairwise disjoint `j`-subsets of columns that each sum
/// to zero, by exhaustive branch and bound.
pub fn count_zero_sum_packing(m: &BitMatrix, j: usize) -> Result<usize> {
    if j == 0 {
        return Err(Error::param("subset size must be at least 1"));
    }
    if m.n_cols > MAX_PACKING_COLS || j > MAX_PACKING_SIZE {
        return Err(Error::TooLarge(format!(
            "exact packing needs n_cols <= {MAX_PACKING_COLS} and j <= {MAX_PACKING_SIZE}, got {} and {j}",
            m.n_cols
        )));
    }
    let cols = m.columns();
    let mut sets: Vec<u32> = Vec::new();
    if j <= m.n_cols {
        for s in Combinations::new(m.n_cols, j) {
            let mut acc = BitVector::zeros(m.q());
            for &c in &s {
                acc.xor_assign(&cols[c - 1]);
            }
            if acc.is_zero() {
                sets.push(s.iter().fold(0u32, |mask, &c| mask | 1 << (c - 1)));
            }
        }
    }
    let mut best = 0;
    pack(&sets, 0, 0, j, &mut best);
    Ok(best)
}

/// Branches on the lowest column still covered by a usable set: either some
/// set through it is taken, or the column is discarded.
fn pack(sets: &[u32], blocked: u32, count: usize, j: usize, best: &mut usize) {
    let usable: Vec<u32> = sets.iter().copied().filter(|s| s & blocked == 0).collect();
    let cover = usable.iter().fold(0u32, |a, s| a | s);
    let bound = count + (cover.count_ones() as usize / j).min(usable.len());
    if count > *best {
        *best = count;
    }
    if bound <= *best || usable.is_empty() {
        return;
    }
    let c = cover.trailing_zeros();
    let bit = 1u32 << c;
    for &s in usable.iter().filter(|&&s| s & bit != 0) {
        pack(&usable, blocked | s, count + 1, j, best);
    }
    pack(&usable, blocked | bit, count, j, best);
}

/// Sizes `L` and slack `ℓ`: good iff at most `ℓ` disjoint zero-sum
/// `j`-subsets exist for every `j` in `L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodnessSpec {
    pub sizes: Vec<usize>,
    pub slack: usize,
}

pub fn check_good(m: &BitMatrix, spec: &GoodnessSpec) -> Result<bool> {
    if let Some(&bad) = spec.sizes.iter().find(|&&j| j == 0 || j > m.n_cols) {
        return Err(Error::param(format!("size {bad} outside 1..={}", m.n_cols)));
    }
    for &j in &spec.sizes {
        if count_zero_sum_packing(m, j)? > spec.slack {
            return Ok(false);
        }
    }
    Ok(true)
}

fn gcd_all(w: &[u64]) -> u64 {
    w.iter().fold(0u64, |g, &x| g.gcd(&x))
}

/// A subset of `w` with the same gcd from which no single element can be
/// dropped without changing it. Elements are tried for removal from largest
/// to smallest.
pub fn gcd_reduce(w: &[u64], m_bound: u64) -> Result<Vec<u64>> {
    if w.is_empty() {
        return Err(Error::param("gcd_reduce needs a nonempty set"));
    }
    if let Some(&bad) = w.iter().find(|&&x| x == 0 || x > m_bound) {
        return Err(Error::param(format!("element {bad} outside 1..={m_bound}")));
    }
    let mut set: Vec<u64> = w.to_vec();
    set.sort_unstable();
    set.dedup();
    let target = gcd_all(&set);
    let mut i = set.len();
    while i > 0 {
        i -= 1;
        if set.len() > 1 {
            let rest: Vec<u64> = set
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != i)
                .map(|(_, &x)| x)
                .collect();
            if gcd_all(&rest) == target {
                set = rest;
            }
        }
    }
    Ok(set)
}

/// Least `λ` in `[0, d'/d)` with `d' | k - λy`.
pub fn find_shift_lambda(d: u64, d_prime: u64, k: u64, y: u64) -> Result<u64> {
    if d == 0 || d_prime == 0 || k == 0 || y == 0 {
        return Err(Error::Precondition("d, d', k, y must be positive".into()));
    }
    if !y.is_multiple_of(d)
        || !k.is_multiple_of(d)
        || !d_prime.is_multiple_of(d)
        || y.gcd(&d_prime) != d
    {
        return Err(Error::Precondition(format!(
            "need d | y, d | k, d | d' and gcd(y, d') = d; got d={d} d'={d_prime} k={k} y={y}"
        )));
    }
    (0..d_prime / d)
        .find(|&l| (k as i128 - l as i128 * y as i128).rem_euclid(d_prime as i128) == 0)
        .ok_or_else(|| Error::Precondition(format!("no shift for d={d} d'={d_prime} k={k} y={y}")))
}

/// `λ` with `Σ λ_i j_i = k`, `λ_i ≤ √k` for `i < ℓ` and `λ_ℓ ≤ k`, following
/// the induction on `ℓ`: drop `j_1` with `λ_1 = 0` when the gcd of the rest
/// is unchanged, otherwise shift by `λ_1` so that the rest's gcd divides
/// the residual.
pub fn decompose_k(j_set: &[u64], k: u64) -> Result<Vec<u64>> {
    if j_set.is_empty() || k == 0 {
        return Err(Error::Precondition(
            "need a nonempty j-set and k >= 1".into(),
        ));
    }
    let l = j_set.len() as u64;
    if let Some(&bad) = j_set.iter().find(|&&j| j == 0 || (j * l) * (j * l) > k) {
        return Err(Error::Precondition(format!(
            "j = {bad} exceeds sqrt(k)/l for k={k}, l={l}"
        )));
    }
    if !k.is_multiple_of(gcd_all(j_set)) {
        return Err(Error::Precondition(format!(
            "gcd of {j_set:?} does not divide {k}"
        )));
    }
    let j1 = j_set[0];
    if j_set.len() == 1 {
        return Ok(vec![k / j1]);
    }
    let d = gcd_all(j_set);
    let d_prime = gcd_all(&j_set[1..]);
    let (lambda1, residual) = if d_prime == d {
        (0, k)
    } else {
        let l1 = find_shift_lambda(d, d_prime, k, j1)?;
        (l1, k - l1 * j1)
    };
    let mut out = vec![lambda1];
    out.extend(decompose_k(&j_set[1..], residual)?);
    Ok(out)
}

/// Identity and bounds for a [`decompose_k`] result.
pub fn decomposition_holds(j_set: &[u64], k: u64, lambda: &[u64]) -> bool {
    let l = lambda.len();
    l == j_set.len()
        && lambda.iter().zip(j_set).map(|(a, b)| a * b).sum::<u64>() == k
        && lambda[..l - 1].iter().all(|&x| x * x <= k)
        && lambda[l - 1] <= k
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub shift_cases: u64,
    pub shift_failures: u64,
    pub decompose_cases: u64,
    pub decompose_failures: u64,
    pub gcd_cases: u64,
    pub gcd_failures: u64,
}

impl SweepReport {
    pub fn failures(&self) -> u64 {
        self.shift_failures + self.decompose_failures + self.gcd_failures
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "find_shift_lambda: {} cases, {} failures",
            self.shift_cases, self.shift_failures
        )?;
        writeln!(
            f,
            "decompose_k: {} cases, {} failures",
            self.decompose_cases, self.decompose_failures
        )?;
        write!(
            f,
            "gcd_reduce: {} cases, {} failures",
            self.gcd_cases, self.gcd_failures
        )
    }
}

/// `find_shift_lambda` over `d, d' ≤ 12` and `y, k ≤ 60`.
pub fn sweep_shift_lambda(report: &mut SweepReport) {
    for d in 1..=12u64 {
        for dp in (d..=12).filter(|dp| dp % d == 0) {
            for y in (d..=60).step_by(d as usize) {
                if y.gcd(&dp) != d {
                    continue;
                }
                for k in (d..=60).step_by(d as usize) {
                    report.shift_cases += 1;
                    let ok = find_shift_lambda(d, dp, k, y)
                        .map(|l| {
                            l < dp / d && (k as i128 - (l * y) as i128).rem_euclid(dp as i128) == 0
                        })
                        .unwrap_or(false);
                    if !ok {
                        report.shift_failures += 1;
                    }
                }
            }
        }
    }
}

/// `decompose_k` for every `k ≤ k_max` and every valid ascending j-set of
/// size at most 3.
pub fn sweep_decompose(k_max: u64, report: &mut SweepReport) {
    for k in 1..=k_max {
        for l in 1..=3u64 {
            // j ≤ √k / l
            let j_max = (1..)
                .take_while(|&j: &u64| (j * l) * (j * l) <= k)
                .last()
                .unwrap_or(0);
            if (j_max as usize) < l as usize {
                continue;
            }
            for set in Combinations::new(j_max as usize, l as usize) {
                let js: Vec<u64> = set.iter().map(|&j| j as u64).collect();
                if k % gcd_all(&js) != 0 {
                    continue;
                }
                report.decompose_cases += 1;
                match decompose_k(&js, k) {
                    Ok(lambda) if decomposition_holds(&js, k, &lambda) => {}
                    _ => report.decompose_failures += 1,
                }
            }
        }
    }
}

/// `gcd_reduce` on every nonempty subset of `[m]` for `m ≤ m_max`.
pub fn sweep_gcd_reduce(m_max: u64, report: &mut SweepReport) {
    for m in 1..=m_max {
        for mask in 1u32..(1 << m) {
            let w: Vec<u64> = (1..=m).filter(|&x| mask >> (x - 1) & 1 == 1).collect();
            report.gcd_cases += 1;
            let ok = gcd_reduce(&w, m)
                .map(|r| gcd_irreducible(&w, &r, m))
                .unwrap_or(false);
            if !ok {
                report.gcd_failures += 1;
            }
        }
    }
}

/// Same gcd, subset of the input, no removable element, and `|W'|! ≤ ⌊m/g⌋`.
pub fn gcd_irreducible(w: &[u64], r: &[u64], m_bound: u64) -> bool {
    let g = gcd_all(w);
    let factorial: u64 = (1..=r.len() as u64).product();
    !r.is_empty()
        && r.iter().all(|x| w.contains(x))
        && gcd_all(r) == g
        && (r.len() == 1
            || (0..r.len()).all(|i| {
                let rest: Vec<u64> = r
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != i)
                    .map(|(_, &x)| x)
                    .collect();
                gcd_all(&rest) != g
            }))
        && factorial <= m_bound / g
}

/// The full lemma sweep used by `lab lemmas --sweep`.
pub fn lemma_sweep() -> SweepReport {
    let mut report = SweepReport::default();
    sweep_shift_lambda(&mut report);
    sweep_decompose(400, &mut report);
    sweep_gcd_reduce(14, &mut report);
    report
}
