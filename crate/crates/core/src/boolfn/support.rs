use std::fmt;
use std::str::FromStr;

use super::BitVector;
use crate::{Error, Result};

/// A set `S ⊆ [n]` of relevant coordinates.
///
/// Doubles as the parity `χ_S(x) = ⊕_{i∈S} x_i` and as the indicator vector
/// of `S`. The empty support is the zero function.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParitySupport {
    n: usize,
    support: Vec<usize>,
    mask: BitVector,
}

impl ParitySupport {
    /// Indices are 1-based and may come in any order; duplicates are rejected.
    pub fn new(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut support: Vec<usize> = indices.into_iter().collect();
        support.sort_unstable();
        if let Some(w) = support.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!(
                "duplicate coordinate {} in support",
                w[0]
            )));
        }
        let mask = BitVector::from_indices(n, &support)?;
        Ok(ParitySupport { n, support, mask })
    }

    pub fn empty(n: usize) -> Self {
        ParitySupport {
            n,
            support: Vec::new(),
            mask: BitVector::zeros(n),
        }
    }

    pub fn from_mask(mask: BitVector) -> Self {
        ParitySupport {
            n: mask.len(),
            support: mask.ones_iter().collect(),
            mask,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.support
    }

    pub fn mask(&self) -> &BitVector {
        &self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        self.support.binary_search(&i).is_ok()
    }

    /// Evaluates the parity. Panics on a dimension mismatch; see
    /// [`parity_eval`] for the checked form.
    #[inline]
    pub fn eval(&self, x: &BitVector) -> bool {
        self.mask.dot(x)
    }
}

pub fn parity_eval(s: &ParitySupport, x: &BitVector) -> Result<bool> {
    if s.n != x.len() {
        return Err(Error::DimensionMismatch {
            expected: s.n,
            found: x.len(),
        });
    }
    Ok(s.eval(x))
}

impl fmt::Display for ParitySupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.support.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for ParitySupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParitySupport(n={}, {self})", self.n)
    }
}

/// Parses a comma separated index list such as `1,4,7` (empty string or `-`
/// for the empty support). The dimension is supplied separately.
pub fn parse_indices(s: &str) -> Result<Vec<usize>> {
    let s = s.trim().trim_start_matches('{').trim_end_matches('}');
    if s.is_empty() || s == "-" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::parse(format!("bad coordinate {t:?}")))
        })
        .collect()
}

impl FromStr for ParitySupport {
    type Err = Error;

    /// `<n>:<i,j,...>`, e.g. `10:1,4,7`.
    fn from_str(s: &str) -> Result<Self> {
        let (n, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(format!("expected <n>:<indices>, got {s:?}")))?;
        let n = n
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad dimension in {s:?}")))?;
        ParitySupport::new(n, parse_indices(rest)?)
    }
}

/// Lexicographic `k`-subsets of `{1, ..., n}`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            current: (1..=k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        // advance: rightmost position that can still move
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.current[i] < self.n - (k - 1 - i) {
                self.current[i] += 1;
                for j in i + 1..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// `C(n, 0) + ... + C(n, k)`, saturating at `u128::MAX`.
pub fn binomial_prefix_sum(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for i in 0..=k.min(n) {
        total = total.saturating_add(term);
        // C(n, i+1) = C(n, i) * (n - i) / (i + 1)
        term = term.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_eval_examples() {
        let x: BitVector = "101".parse().unwrap();
        let s = ParitySupport::new(3, [1, 3]).unwrap();
        assert!(!parity_eval(&s, &x).unwrap());
        assert!(!parity_eval(&ParitySupport::empty(3), &x).unwrap());
        let s2 = ParitySupport::new(2, [2]).unwrap();
        assert!(parity_eval(&s2, &"01".parse().unwrap()).unwrap());
    }

    #[test]
    fn parity_eval_checks_dimension() {
        let s = ParitySupport::new(3, [1]).unwrap();
        assert!(parity_eval(&s, &BitVector::zeros(4)).is_err());
    }

    #[test]
    fn support_construction() {
        let s = ParitySupport::new(10, [7, 1, 4]).unwrap();
        assert_eq!(s.indices(), &[1, 4, 7]);
        assert_eq!(s.to_string(), "{1,4,7}");
        assert!(ParitySupport::new(10, [1, 1]).is_err());
        assert!(ParitySupport::new(10, [11]).is_err());
        assert!(ParitySupport::new(10, [0]).is_err());
        let parsed: ParitySupport = "10:1,4,7".parse().unwrap();
        assert_eq!(parsed, s);
        assert_eq!(ParitySupport::from_mask(s.mask().clone()), s);
    }

    #[test]
    fn combinations_enumerate_all_subsets() {
        assert_eq!(Combinations::new(4, 2).count(), 6);
        assert_eq!(
            Combinations::new(5, 0).collect::<Vec<_>>(),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(Combinations::new(3, 4).count(), 0);
        assert_eq!(
            Combinations::new(3, 3).collect::<Vec<_>>(),
            vec![vec![1, 2, 3]]
        );
        let all: Vec<_> = Combinations::new(5, 3).collect();
        assert_eq!(all.len(), 10);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn binomial_prefix_sums() {
        assert_eq!(binomial_prefix_sum(15, 2), 121);
        assert_eq!(binomial_prefix_sum(31, 3), 4992);
        assert_eq!(binomial_prefix_sum(7, 1), 8);
        assert_eq!(binomial_prefix_sum(3, 10), 8);
    }
}
