//! Exact distances under a distribution, by full enumeration.
//!
//! Uniform distances are exact integer counts. Product distributions are
//! accumulated in `f64` (agreement with exact arithmetic to about `1e-12`).
//! Explicit and mixture distributions are summed as exact rationals over
//! their support.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::support::{binomial_prefix_sum, Combinations};
use super::{BitVector, BooleanFunction, DistributionSpec, ParitySupport};
use crate::{Error, Result};

/// Largest dimension for which [`exact_distance`] enumerates the cube.
pub const MAX_ENUM_DIM: usize = 24;
/// Largest dimension for which [`distance_to_class`] transforms the cube.
pub const MAX_CLASS_DIM: usize = 20;
/// Largest number of candidate supports scanned for weighted distributions.
pub const MAX_CLASS_CANDIDATES: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassMode {
    /// Parities of weight exactly `k`.
    Exact,
    /// Parities of weight at most `k`, including the zero function.
    AtMost,
}

fn check_dims(f: &dyn BooleanFunction, d: &DistributionSpec) -> Result<()> {
    if f.n() != d.n() {
        return Err(Error::DimensionMismatch {
            expected: d.n(),
            found: f.n(),
        });
    }
    Ok(())
}

fn exact_rational(w: f64) -> BigRational {
    BigRational::from_float(w).expect("validated masses are finite")
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `Pr_{x~d}[f(x) != g(x)]`.
pub fn exact_distance(
    f: &dyn BooleanFunction,
    g: &dyn BooleanFunction,
    d: &DistributionSpec,
) -> Result<f64> {
    check_dims(f, d)?;
    check_dims(g, d)?;
    d.validate()?;
    let n = d.n();
    if let Some(points) = d.weighted_points() {
        let mut total = BigRational::zero();
        for (p, w) in points {
            if f.eval(p) != g.eval(p) {
                total += exact_rational(*w);
            }
        }
        return Ok(rational_to_f64(&total));
    }
    if n > MAX_ENUM_DIM {
        return Err(Error::TooLarge(format!("enumerating 2^{n} points")));
    }
    match d {
        DistributionSpec::Uniform { .. } => {
            let disagreements = (0..1u64 << n)
                .filter(|&v| {
                    let x = BitVector::from_low_bits(n, v);
                    f.eval(&x) != g.eval(&x)
                })
                .count();
            Ok(disagreements as f64 / (1u64 << n) as f64)
        }
        DistributionSpec::Product { .. } => {
            let mut total = 0.0;
            for v in 0..1u64 << n {
                let x = BitVector::from_low_bits(n, v);
                if f.eval(&x) != g.eval(&x) {
                    total += d.mass(&x);
                }
            }
            Ok(total)
        }
        _ => unreachable!("weighted variants handled above"),
    }
}

fn candidate_supports(n: usize, k: usize, mode: ClassMode) -> impl Iterator<Item = Vec<usize>> {
    let weights = match mode {
        ClassMode::Exact => k..=k,
        ClassMode::AtMost => 0..=k,
    };
    weights.flat_map(move |w| Combinations::new(n, w))
}

fn mask_of(indices: &[usize]) -> usize {
    indices.iter().fold(0usize, |m, &i| m | (1 << (i - 1)))
}

/// In-place Walsh–Hadamard transform: `a[s] <- Σ_x a[x] (-1)^{|s & x|}`.
fn walsh_hadamard<T>(a: &mut [T])
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let mut h = 1;
    while h < a.len() {
        for block in (0..a.len()).step_by(2 * h) {
            for i in block..block + h {
                let (u, v) = (a[i], a[i + h]);
                a[i] = u + v;
                a[i + h] = u - v;
            }
        }
        h *= 2;
    }
}

/// Minimum distance from `f` to a parity of weight `k` (or at most `k`) under
/// `d`, with a minimising support. Ties go to the first candidate in order of
/// weight, then lexicographic support.
pub fn distance_to_class(
    f: &dyn BooleanFunction,
    d: &DistributionSpec,
    k: usize,
    mode: ClassMode,
) -> Result<(f64, ParitySupport)> {
    check_dims(f, d)?;
    d.validate()?;
    let n = d.n();
    if k > n {
        return Err(Error::param(format!("class weight {k} exceeds n = {n}")));
    }

    if let Some(points) = d.weighted_points() {
        let candidates = match (mode, k) {
            (ClassMode::Exact, 0) => 1,
            (ClassMode::Exact, _) => binomial_prefix_sum(n, k) - binomial_prefix_sum(n, k - 1),
            (ClassMode::AtMost, _) => binomial_prefix_sum(n, k),
        };
        if candidates > MAX_CLASS_CANDIDATES {
            return Err(Error::TooLarge(format!("{candidates} candidate supports")));
        }
        let weighted: Vec<(&BitVector, bool, BigRational)> = points
            .iter()
            .map(|(p, w)| (p, f.eval(p), exact_rational(*w)))
            .collect();
        let mut best: Option<(BigRational, Vec<usize>)> = None;
        for s in candidate_supports(n, k, mode) {
            let parity = ParitySupport::new(n, s.iter().copied())?;
            let mut dist = BigRational::zero();
            for (p, fp, w) in &weighted {
                if parity.eval(p) != *fp {
                    dist += w;
                }
            }
            if best.as_ref().is_none_or(|(b, _)| dist < *b) {
                best = Some((dist, s));
            }
        }
        let (dist, s) = best.expect("at least one candidate support");
        return Ok((rational_to_f64(&dist), ParitySupport::new(n, s)?));
    }

    if n > MAX_CLASS_DIM {
        return Err(Error::TooLarge(format!(
            "distance over 2^{n} points (exact enumeration needs n <= {MAX_CLASS_DIM})"
        )));
    }
    let size = 1usize << n;
    let values: Vec<bool> = (0..size as u64)
        .map(|v| f.eval(&BitVector::from_low_bits(n, v)))
        .collect();

    let dist_of: Box<dyn Fn(usize) -> f64> = match d {
        DistributionSpec::Uniform { .. } => {
            let mut a: Vec<i64> = values.iter().map(|&b| if b { -1 } else { 1 }).collect();
            walsh_hadamard(&mut a);
            let total = size as i64;
            Box::new(move |s| ((total - a[s]) / 2) as f64 / total as f64)
        }
        DistributionSpec::Product { .. } => {
            let mut a: Vec<f64> = (0..size as u64)
                .map(|v| {
                    let m = d.mass(&BitVector::from_low_bits(n, v));
                    if values[v as usize] {
                        -m
                    } else {
                        m
                    }
                })
                .collect();
            let total: f64 = a.iter().map(|v| v.abs()).sum();
            walsh_hadamard(&mut a);
            Box::new(move |s| ((total - a[s]) / 2.0).max(0.0))
        }
        _ => unreachable!("weighted variants handled above"),
    };

    let mut best: Option<(f64, Vec<usize>)> = None;
    for s in candidate_supports(n, k, mode) {
        let dist = dist_of(mask_of(&s));
        if best.as_ref().is_none_or(|(b, _)| dist < *b) {
            best = Some((dist, s));
        }
    }
    let (dist, s) = best.expect("at least one candidate support");
    Ok((dist, ParitySupport::new(n, s)?))
}
