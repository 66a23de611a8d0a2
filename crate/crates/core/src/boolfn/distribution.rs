use std::collections::HashSet;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::BitVector;
use crate::{Error, Result};

/// Tolerance on the total mass of explicit and mixture distributions.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Tolerance on the total mass read from a distribution file; the weights are
/// renormalised after reading.
pub const FILE_MASS_TOLERANCE: f64 = 1e-9;

/// The sampling distribution `D` a distribution-free tester draws from.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    Uniform {
        n: usize,
    },
    /// Independent coordinates; coordinate `i` is 1 with probability `p[i-1]`.
    Product {
        p: Vec<f64>,
    },
    /// Distinct points with their probabilities; unlisted points have mass 0.
    Explicit {
        n: usize,
        table: Vec<(BitVector, f64)>,
    },
    /// Weighted point masses; a point may appear more than once.
    Mixture {
        n: usize,
        components: Vec<(BitVector, f64)>,
    },
}

impl DistributionSpec {
    pub fn uniform(n: usize) -> Self {
        DistributionSpec::Uniform { n }
    }

    pub fn product(n: usize, p: f64) -> Result<Self> {
        Self::product_per_coordinate(vec![p; n])
    }

    pub fn product_per_coordinate(p: Vec<f64>) -> Result<Self> {
        let d = DistributionSpec::Product { p };
        d.validate()?;
        Ok(d)
    }

    pub fn explicit(n: usize, table: Vec<(BitVector, f64)>) -> Result<Self> {
        let d = DistributionSpec::Explicit { n, table };
        d.validate()?;
        Ok(d)
    }

    pub fn mixture(n: usize, components: Vec<(BitVector, f64)>) -> Result<Self> {
        let d = DistributionSpec::Mixture { n, components };
        d.validate()?;
        Ok(d)
    }

    pub fn point_mass(x: BitVector) -> Self {
        DistributionSpec::Mixture {
            n: x.len(),
            components: vec![(x, 1.0)],
        }
    }

    /// `count` uniformly random points with weights proportional to
    /// independent uniform draws.
    pub fn random_mixture<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidDistribution(
                "mixture needs at least one point".into(),
            ));
        }
        let points: Vec<BitVector> = (0..count).map(|_| BitVector::random(n, rng)).collect();
        let raw: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let components = points
            .into_iter()
            .zip(raw.into_iter().map(|w| w / total))
            .collect();
        Self::mixture(n, components)
    }

    pub fn n(&self) -> usize {
        match self {
            DistributionSpec::Uniform { n } => *n,
            DistributionSpec::Product { p } => p.len(),
            DistributionSpec::Explicit { n, .. } | DistributionSpec::Mixture { n, .. } => *n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DistributionSpec::Uniform { .. } => Ok(()),
            DistributionSpec::Product { p } => {
                if let Some(bad) = p.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(Error::InvalidDistribution(format!(
                        "product probability {bad} outside [0, 1]"
                    )));
                }
                Ok(())
            }
            DistributionSpec::Explicit { n, table } => {
                check_weighted(*n, table)?;
                let mut seen = HashSet::new();
                if let Some((p, _)) = table.iter().find(|(p, _)| !seen.insert(p)) {
                    return Err(Error::InvalidDistribution(format!(
                        "point {p} listed twice"
                    )));
                }
                Ok(())
            }
            DistributionSpec::Mixture { n, components } => check_weighted(*n, components),
        }
    }

    /// Points with positive mass for the weighted variants, `None` otherwise.
    pub fn weighted_points(&self) -> Option<&[(BitVector, f64)]> {
        match self {
            DistributionSpec::Explicit { table, .. } => Some(table),
            DistributionSpec::Mixture { components, .. } => Some(components),
            _ => None,
        }
    }

    /// Probability of a single point.
    pub fn mass(&self, x: &BitVector) -> f64 {
        match self {
            DistributionSpec::Uniform { n } => 0.5f64.powi(*n as i32),
            DistributionSpec::Product { p } => p
                .iter()
                .enumerate()
                .map(|(i, &pi)| if x.get(i + 1) { pi } else { 1.0 - pi })
                .product(),
            DistributionSpec::Explicit { table: pts, .. }
            | DistributionSpec::Mixture {
                components: pts, ..
            } => pts.iter().filter(|(p, _)| p == x).map(|(_, w)| w).sum(),
        }
    }

    /// Prepares a sampler; reuse it when drawing many points.
    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        Ok(match self {
            DistributionSpec::Uniform { n } => Sampler::Uniform { n: *n },
            DistributionSpec::Product { p } => Sampler::Product { p: p.clone() },
            DistributionSpec::Explicit { table: pts, .. }
            | DistributionSpec::Mixture {
                components: pts, ..
            } => {
                let index = WeightedIndex::new(pts.iter().map(|(_, w)| *w))
                    .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
                Sampler::Weighted {
                    points: pts.iter().map(|(p, _)| p.clone()).collect(),
                    index,
                }
            }
        })
    }

    /// Reads `<bitstring> <probability>` lines. The masses must sum to
    /// `1 ± 1e-9` and are renormalised to sum to 1.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut table = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(point), Some(prob), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::parse(format!(
                    "line {}: expected `<bits> <probability>`",
                    lineno + 1
                )));
            };
            let point: BitVector = point.parse()?;
            let prob: f64 = prob.parse().map_err(|_| {
                Error::parse(format!("line {}: bad probability {prob:?}", lineno + 1))
            })?;
            table.push((point, prob));
        }
        let n = table
            .first()
            .map(|(p, _)| p.len())
            .ok_or_else(|| Error::parse("distribution file is empty"))?;
        if let Some((p, _)) = table.iter().find(|(p, _)| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        if let Some((_, w)) = table.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "negative or non-finite probability {w}"
            )));
        }
        let total: f64 = table.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > FILE_MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        for (_, w) in &mut table {
            *w /= total;
        }
        Self::explicit(n, table)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_table(&std::fs::read_to_string(path)?)
    }
}

fn check_weighted(n: usize, points: &[(BitVector, f64)]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidDistribution(
            "no points with positive mass".into(),
        ));
    }
    let mut total = 0.0;
    for (p, w) in points {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "negative or non-finite mass {w}"
            )));
        }
        total += w;
    }
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "masses sum to {total}, not 1"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum Sampler {
    Uniform {
        n: usize,
    },
    Product {
        p: Vec<f64>,
    },
    Weighted {
        points: Vec<BitVector>,
        index: WeightedIndex<f64>,
    },
}

impl Sampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVector {
        match self {
            Sampler::Uniform { n } => BitVector::random(*n, rng),
            Sampler::Product { p } => {
                let mut x = BitVector::zeros(p.len());
                for (i, &pi) in p.iter().enumerate() {
                    if rng.gen::<f64>() < pi {
                        x.set(i + 1, true);
                    }
                }
                x
            }
            Sampler::Weighted { points, index } => points[index.sample(rng)].clone(),
        }
    }
}

/// One draw from `d`.
pub fn sample<R: Rng + ?Sized>(d: &DistributionSpec, rng: &mut R) -> Result<BitVector> {
    Ok(d.sampler()?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn degenerate_distributions() {
        let mut rng = stream_rng(1, 0);
        let x: BitVector = "1010".parse().unwrap();
        let d = DistributionSpec::point_mass(x.clone());
        for _ in 0..10 {
            assert_eq!(sample(&d, &mut rng).unwrap(), x);
        }
        let d0 = DistributionSpec::product(6, 0.0).unwrap();
        assert!(sample(&d0, &mut rng).unwrap().is_zero());
        let d1 = DistributionSpec::product(6, 1.0).unwrap();
        assert_eq!(sample(&d1, &mut rng).unwrap().weight(), 6);
    }

    #[test]
    fn uniform_coordinate_means() {
        let mut rng = stream_rng(2, 0);
        let s = DistributionSpec::uniform(20).sampler().unwrap();
        let draws = 100_000;
        let mut counts = [0usize; 20];
        for _ in 0..draws {
            let x = s.sample(&mut rng);
            for i in x.ones_iter() {
                counts[i - 1] += 1;
            }
        }
        for c in counts {
            let mean = c as f64 / draws as f64;
            assert!((mean - 0.5).abs() < 0.01, "coordinate mean {mean}");
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let d = DistributionSpec::random_mixture(12, 8, &mut stream_rng(4, 0)).unwrap();
        let s = d.sampler().unwrap();
        let a: Vec<_> = {
            let mut r = stream_rng(9, 1);
            (0..20).map(|_| s.sample(&mut r)).collect()
        };
        let b: Vec<_> = {
            let mut r = stream_rng(9, 1);
            (0..20).map(|_| s.sample(&mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn validation_errors() {
        assert!(DistributionSpec::product(3, 1.2).is_err());
        let x: BitVector = "01".parse().unwrap();
        assert!(DistributionSpec::mixture(2, vec![(x.clone(), 0.5)]).is_err());
        assert!(DistributionSpec::mixture(2, vec![(x.clone(), 1.5), (x.clone(), -0.5)]).is_err());
        assert!(DistributionSpec::explicit(2, vec![(x.clone(), 0.5), (x.clone(), 0.5)]).is_err());
        assert!(DistributionSpec::mixture(3, vec![(x, 1.0)]).is_err());
        assert!(DistributionSpec::mixture(2, vec![]).is_err());
    }

    #[test]
    fn table_file_format() {
        let d = DistributionSpec::parse_table("00 0.25\n11 0.75\n").unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.mass(&"11".parse().unwrap()), 0.75);
        assert_eq!(d.mass(&"01".parse().unwrap()), 0.0);
        // within the file tolerance, renormalised
        let d = DistributionSpec::parse_table("00 0.5\n11 0.5000000001\n").unwrap();
        d.validate().unwrap();
        assert!(DistributionSpec::parse_table("00 0.5\n11 0.4\n").is_err());
        assert!(DistributionSpec::parse_table("00 0.5\n111 0.5\n").is_err());
        assert!(DistributionSpec::parse_table("00 x\n").is_err());
    }

    #[test]
    fn product_mass() {
        let d = DistributionSpec::product(3, 0.3).unwrap();
        let m = d.mass(&"100".parse().unwrap());
        assert!((m - 0.3 * 0.7 * 0.7).abs() < 1e-15);
        assert_eq!(
            DistributionSpec::uniform(3).mass(&BitVector::zeros(3)),
            0.125
        );
    }
}
