use std::fmt;
use std::str::FromStr;

use rand::Rng;
use smallvec::SmallVec;

use crate::{Error, Result};

type Words = SmallVec<[u64; 4]>;

/// A point of `{0,1}^n`, bit-packed into 64-bit words.
///
/// Coordinates are 1-indexed. Coordinate `i` lives in word `(i-1)/64` at bit
/// `(i-1)%64`, and the text form puts coordinate 1 leftmost. Bits past `n` in
/// the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    n: usize,
    words: Words,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl BitVector {
    pub fn zeros(n: usize) -> Self {
        let mut words = Words::new();
        words.resize(word_count(n), 0);
        BitVector { n, words }
    }

    pub fn ones(n: usize) -> Self {
        let mut v = Self::zeros(n);
        v.words.iter_mut().for_each(|w| *w = u64::MAX);
        v.clear_tail();
        v
    }

    /// Builds the indicator vector of `indices` (1-indexed).
    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut v = Self::zeros(n);
        for &i in indices {
            if i == 0 || i > n {
                return Err(Error::param(format!("coordinate {i} outside [1, {n}]")));
            }
            v.set(i, true);
        }
        Ok(v)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (idx, &b) in bits.iter().enumerate() {
            if b {
                v.set(idx + 1, true);
            }
        }
        v
    }

    /// Point whose coordinate `i` is bit `i-1` of `value`. Requires `n <= 64`.
    pub fn from_low_bits(n: usize, value: u64) -> Self {
        assert!(n <= 64, "from_low_bits needs n <= 64, got {n}");
        let mut v = Self::zeros(n);
        if n > 0 {
            v.words[0] = value & tail_mask(n);
        }
        v
    }

    /// Uniformly random point.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(n);
        v.words.iter_mut().for_each(|w| *w = rng.next_u64());
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.n);
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Builds a point from packed words; bits past `n` are cleared.
    pub fn from_words(n: usize, words: impl IntoIterator<Item = u64>) -> Self {
        let mut words: Words = words.into_iter().take(word_count(n)).collect();
        words.resize(word_count(n), 0);
        let mut v = BitVector { n, words };
        v.clear_tail();
        v
    }

    /// Inverse of [`BitVector::from_low_bits`]. Requires `n <= 64`.
    #[inline]
    pub fn low_bits(&self) -> u64 {
        assert!(self.n <= 64, "low_bits needs n <= 64, got {}", self.n);
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i >= 1 && i <= self.n,
            "coordinate {i} outside [1, {}]",
            self.n
        );
        let j = i - 1;
        (self.words[j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i >= 1 && i <= self.n,
            "coordinate {i} outside [1, {}]",
            self.n
        );
        let j = i - 1;
        let bit = 1u64 << (j % 64);
        if value {
            self.words[j / 64] |= bit;
        } else {
            self.words[j / 64] &= !bit;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.get(i);
        self.set(i, !v);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// 1-indexed positions of the set coordinates, ascending.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + tz + 1)
            })
        })
    }

    fn check_dim(&self, other: &BitVector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Coordinatewise sum over GF(2).
    pub fn add(&self, other: &BitVector) -> Result<BitVector> {
        self.check_dim(other)?;
        let mut out = self.clone();
        out.xor_assign(other);
        Ok(out)
    }

    /// In-place GF(2) sum. Panics on a dimension mismatch.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.n, other.n, "dimension mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= b;
        }
    }

    /// Coordinatewise product. Panics on a dimension mismatch.
    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.n, other.n, "dimension mismatch in and");
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
        out
    }

    /// GF(2) inner product. Panics on a dimension mismatch.
    #[inline]
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.n, other.n, "dimension mismatch in dot");
        let ones: u32 = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }
}

/// GF(2) sum of two points of the same dimension.
pub fn bv_add(x: &BitVector, y: &BitVector) -> Result<BitVector> {
    x.add(y)
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (1..=self.n)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = BitVector::zeros(s.len());
        for (idx, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(idx + 1, true),
                other => {
                    return Err(Error::parse(format!(
                        "bad bit character {other:?} in {s:?}"
                    )))
                }
            }
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(bv_add(&bv("0101"), &bv("0011")).unwrap(), bv("0110"));
        let x = bv("1101001");
        assert!(bv_add(&x, &x).unwrap().is_zero());
        assert_eq!(bv_add(&x, &BitVector::zeros(7)).unwrap(), x);
    }

    #[test]
    fn add_rejects_dimension_mismatch() {
        let err = bv_add(&bv("01"), &bv("011")).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        ));
    }

    #[test]
    fn text_form_is_leftmost_first() {
        let x = bv("1000000001");
        assert!(x.get(1));
        assert!(x.get(10));
        assert_eq!(x.ones_iter().collect::<Vec<_>>(), vec![1, 10]);
        assert_eq!(x.to_string(), "1000000001");
        assert!("01x".parse::<BitVector>().is_err());
    }

    #[test]
    fn ones_clears_tail() {
        for n in [0, 1, 63, 64, 65, 130] {
            let v = BitVector::ones(n);
            assert_eq!(v.weight(), n);
        }
    }

    #[test]
    fn low_bits_round_trip() {
        let v = BitVector::from_low_bits(5, 0b10110);
        assert_eq!(v.to_string(), "01101");
        assert_eq!(v.low_bits(), 0b10110);
    }

    fn arb_triple() -> impl Strategy<Value = (BitVector, BitVector, BitVector)> {
        (1usize..200).prop_flat_map(|n| {
            let words = n.div_ceil(64);
            let vecs = proptest::collection::vec(any::<u64>(), words * 3);
            vecs.prop_map(move |w| {
                let make = |chunk: &[u64]| {
                    let mut v = BitVector::zeros(n);
                    v.words.copy_from_slice(chunk);
                    v.clear_tail();
                    v
                };
                (
                    make(&w[..words]),
                    make(&w[words..2 * words]),
                    make(&w[2 * words..]),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn add_is_a_group_law((x, y, z) in arb_triple()) {
            let xy = bv_add(&x, &y).unwrap();
            prop_assert_eq!(&xy, &bv_add(&y, &x).unwrap());
            prop_assert_eq!(
                bv_add(&xy, &z).unwrap(),
                bv_add(&x, &bv_add(&y, &z).unwrap()).unwrap()
            );
            prop_assert!(bv_add(&x, &x).unwrap().is_zero());
            prop_assert_eq!(x.weight(), x.ones_iter().count());
        }

        #[test]
        fn random_points_respect_tail(n in 1usize..300, seed in any::<u64>()) {
            let mut rng = crate::rng::stream_rng(seed, 0);
            let v = BitVector::random(n, &mut rng);
            prop_assert!(v.ones_iter().all(|i| i <= n));
            prop_assert_eq!(v.to_string().len(), n);
        }
    }
}
