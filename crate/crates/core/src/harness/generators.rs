//! Member and far instances with ground-truth labels.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::boolfn::{
    distance_to_class, BitVector, BooleanFunction, ClassMode, Constant, Corrupted,
    DistributionSpec, NoisyParity, ParitySupport, PointTable, SharedFunction, TruthTable,
};
use crate::tester::TestMode;
use crate::{Error, Result};

/// Resamples allowed before a far family gives up on certification.
pub const CERTIFY_ATTEMPTS: usize = 200;
/// Largest `n` for the random truth table family.
pub const MAX_TABLE_FAMILY_DIM: usize = 16;

/// A uniformly random support of weight exactly `k`.
pub fn gen_k_parity<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<ParitySupport> {
    if k > n {
        return Err(Error::param(format!(
            "cannot choose {k} of {n} coordinates"
        )));
    }
    ParitySupport::new(n, sample(rng, n, k).into_iter().map(|i| i + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Parity of weight exactly `k`.
    Member,
    /// Parity of uniformly random weight in `0..=k`.
    MemberStar,
    /// Parity of weight `k - 1`.
    WrongWeightMinus,
    /// Parity of weight `k + 1`.
    WrongWeightPlus,
    /// Uniformly random truth table.
    RandomTable,
    /// A weight-`k` parity flipped on a set of `d`-mass at least `2ε`.
    CorruptedParity,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Member,
        Family::MemberStar,
        Family::WrongWeightMinus,
        Family::WrongWeightPlus,
        Family::RandomTable,
        Family::CorruptedParity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Member => "member",
            Family::MemberStar => "member-star",
            Family::WrongWeightMinus => "wrong-weight-minus",
            Family::WrongWeightPlus => "wrong-weight-plus",
            Family::RandomTable => "random-table",
            Family::CorruptedParity => "corrupted-parity",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s.trim())
            .ok_or_else(|| Error::parse(format!("unknown function family {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "label", rename_all = "lowercase")]
pub enum Label {
    Member,
    Far { delta: f64 },
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Member => "member",
            Label::Far { .. } => "far",
        }
    }

    pub fn delta(self) -> Option<f64> {
        match self {
            Label::Member => None,
            Label::Far { delta } => Some(delta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    pub family: Family,
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub function: SharedFunction,
    pub label: Label,
}

pub fn class_mode(mode: TestMode) -> ClassMode {
    match mode {
        TestMode::Star => ClassMode::AtMost,
        TestMode::Exact => ClassMode::Exact,
    }
}

fn certify(f: &SharedFunction, d: &DistributionSpec, k: usize, mode: TestMode) -> Result<f64> {
    Ok(distance_to_class(f.as_ref(), d, k, class_mode(mode))?.0)
}

/// Whether a weight-`w` parity lies in the class.
fn weight_is_member(w: usize, k: usize, mode: TestMode) -> bool {
    match mode {
        TestMode::Star => w <= k,
        TestMode::Exact => w == k,
    }
}

/// Points of `d`-mass at least `target`, biased to heavy points.
fn heavy_set<R: Rng + ?Sized>(
    d: &DistributionSpec,
    target: f64,
    rng: &mut R,
) -> Result<Vec<BitVector>> {
    if let Some(points) = d.weighted_points() {
        let mut pts: Vec<(BitVector, f64)> = Vec::new();
        for (p, w) in points {
            match pts.iter_mut().find(|(q, _)| q == p) {
                Some(e) => e.1 += w,
                None => pts.push((p.clone(), *w)),
            }
        }
        pts.shuffle(rng);
        pts.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut acc = 0.0;
        let mut out = Vec::new();
        for (p, w) in pts {
            if acc >= target {
                break;
            }
            acc += w;
            out.push(p);
        }
        return Ok(out);
    }
    let sampler = d.sampler()?;
    let mut seen = std::collections::HashSet::new();
    let mut acc = 0.0;
    let mut stalls = 0usize;
    while acc < target {
        let x = sampler.sample(rng);
        if seen.contains(&x) {
            stalls += 1;
            if stalls > 1_000_000 {
                return Err(Error::CertificationFailed {
                    attempts: stalls,
                    reason: format!("could not collect d-mass {target}"),
                });
            }
            continue;
        }
        acc += d.mass(&x);
        seen.insert(x);
    }
    let mut out: Vec<BitVector> = seen.into_iter().collect();
    out.sort_by_key(|x| x.to_string());
    Ok(out)
}

/// A function `ε`-far from the class under `d`, with its certified distance.
pub fn gen_far_instance<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    epsilon: f64,
    mode: TestMode,
    d: &DistributionSpec,
    family: Family,
    rng: &mut R,
) -> Result<(SharedFunction, Certificate)> {
    if d.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.n(),
        });
    }
    let weight = match family {
        Family::WrongWeightMinus if k >= 1 => Some(k - 1),
        Family::WrongWeightPlus if k < n => Some(k + 1),
        Family::WrongWeightMinus | Family::WrongWeightPlus => {
            return Err(Error::param(format!(
                "no wrong-weight parity for k={k}, n={n}"
            )));
        }
        Family::RandomTable | Family::CorruptedParity => None,
        Family::Member | Family::MemberStar => {
            return Err(Error::param(format!("{family} is not a far family")));
        }
    };
    if let Some(w) = weight {
        if weight_is_member(w, k, mode) {
            return Err(Error::param(format!("{family} is a member in {mode} mode")));
        }
    }
    if family == Family::RandomTable && n > MAX_TABLE_FAMILY_DIM {
        return Err(Error::param(format!(
            "{family} needs n <= {MAX_TABLE_FAMILY_DIM}, got {n}"
        )));
    }
    let mut best = 0.0f64;
    for _ in 0..CERTIFY_ATTEMPTS {
        let (f, delta): (SharedFunction, f64) = match family {
            Family::WrongWeightMinus | Family::WrongWeightPlus => {
                let f: SharedFunction = Arc::new(gen_k_parity(n, weight.unwrap(), rng)?);
                // Two distinct parities disagree on exactly half the cube.
                let delta = match d {
                    DistributionSpec::Uniform { .. } => 0.5,
                    _ => certify(&f, d, k, mode)?,
                };
                (f, delta)
            }
            Family::RandomTable => {
                let f: SharedFunction = Arc::new(TruthTable::random(n, rng)?);
                let delta = certify(&f, d, k, mode)?;
                (f, delta)
            }
            Family::CorruptedParity => {
                let base: SharedFunction = Arc::new(gen_k_parity(n, k, rng)?);
                let flips = heavy_set(d, 2.0 * epsilon, rng)?;
                let f: SharedFunction = Arc::new(Corrupted::new(base, flips)?);
                let delta = certify(&f, d, k, mode)?;
                (f, delta)
            }
            Family::Member | Family::MemberStar => unreachable!(),
        };
        if delta >= epsilon {
            return Ok((f, Certificate { family, delta }));
        }
        best = best.max(delta);
    }
    Err(Error::CertificationFailed {
        attempts: CERTIFY_ATTEMPTS,
        reason: format!("{family}: best distance {best} < epsilon {epsilon}"),
    })
}

/// Draws one labelled instance of `family`.
pub fn gen_instance<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    epsilon: f64,
    mode: TestMode,
    d: &DistributionSpec,
    family: Family,
    rng: &mut R,
) -> Result<Instance> {
    match family {
        Family::Member => Ok(Instance {
            function: Arc::new(gen_k_parity(n, k, rng)?),
            label: Label::Member,
        }),
        Family::MemberStar => {
            if mode != TestMode::Star {
                return Err(Error::param("member-star is only labelled in star mode"));
            }
            let w = rng.gen_range(0..=k);
            let f: SharedFunction = if w == 0 {
                Arc::new(Constant { n, value: false })
            } else {
                Arc::new(gen_k_parity(n, w, rng)?)
            };
            Ok(Instance {
                function: f,
                label: Label::Member,
            })
        }
        Family::WrongWeightMinus if k >= 1 && weight_is_member(k - 1, k, mode) => Ok(Instance {
            function: Arc::new(gen_k_parity(n, k - 1, rng)?),
            label: Label::Member,
        }),
        _ => {
            let (function, cert) = gen_far_instance(n, k, epsilon, mode, d, family, rng)?;
            Ok(Instance {
                function,
                label: Label::Far { delta: cert.delta },
            })
        }
    }
}

/// Distribution families named in experiment grids.
#[derive(Debug, Clone, PartialEq)]
pub enum DistSpec {
    Uniform,
    Product(f64),
    File(PathBuf),
    Mass(Vec<(BitVector, f64)>),
    /// A fresh mixture of this many random points per trial.
    RandomMixture(usize),
}

impl DistSpec {
    pub fn realize<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<DistributionSpec> {
        let d = match self {
            DistSpec::Uniform => DistributionSpec::uniform(n),
            DistSpec::Product(p) => DistributionSpec::product(n, *p)?,
            DistSpec::File(path) => DistributionSpec::from_file(path)?,
            DistSpec::Mass(points) => DistributionSpec::mixture(n, points.clone())?,
            DistSpec::RandomMixture(count) => DistributionSpec::random_mixture(n, *count, rng)?,
        };
        if d.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: d.n(),
            });
        }
        Ok(d)
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSpec::Uniform => f.write_str("uniform"),
            DistSpec::Product(p) => write!(f, "product:{p}"),
            DistSpec::File(path) => write!(f, "file:{}", path.display()),
            DistSpec::Mass(points) => {
                f.write_str("mass:")?;
                for (i, (x, w)) in points.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}:{w}")?;
                }
                Ok(())
            }
            DistSpec::RandomMixture(c) => write!(f, "random-mixture:{c}"),
        }
    }
}

impl FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let bad = || Error::parse(format!("bad distribution spec {s:?}"));
        match kind {
            "uniform" if rest.is_empty() => Ok(DistSpec::Uniform),
            "product" => Ok(DistSpec::Product(rest.parse().map_err(|_| bad())?)),
            "file" if !rest.is_empty() => Ok(DistSpec::File(PathBuf::from(rest))),
            "mass" => {
                let points = rest
                    .split(',')
                    .map(|item| {
                        let (x, w) = item.split_once(':').ok_or_else(bad)?;
                        Ok((
                            x.trim().parse::<BitVector>()?,
                            w.trim().parse::<f64>().map_err(|_| bad())?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(DistSpec::Mass(points))
            }
            "random-mixture" => Ok(DistSpec::RandomMixture(rest.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// Functions named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Parity(Vec<usize>),
    Const(bool),
    Table(PathBuf),
    NoisyParity(Vec<usize>, f64),
}

impl FunctionSpec {
    pub fn build(&self, n: usize, salt: u64) -> Result<SharedFunction> {
        let f: SharedFunction = match self {
            FunctionSpec::Parity(s) => Arc::new(ParitySupport::new(n, s.iter().copied())?),
            FunctionSpec::Const(v) => Arc::new(Constant { n, value: *v }),
            FunctionSpec::Table(path) => {
                let t = PointTable::from_file(path)?;
                if t.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: t.n(),
                    });
                }
                Arc::new(t)
            }
            FunctionSpec::NoisyParity(s, rate) => Arc::new(NoisyParity::new(
                ParitySupport::new(n, s.iter().copied())?,
                *rate,
                salt,
            )?),
        };
        Ok(f)
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |s: &[usize]| s.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        match self {
            FunctionSpec::Parity(s) => write!(f, "parity:{}", join(s)),
            FunctionSpec::Const(v) => write!(f, "const:{}", *v as u8),
            FunctionSpec::Table(path) => write!(f, "table:{}", path.display()),
            FunctionSpec::NoisyParity(s, rate) => write!(f, "noisy-parity:{}:{rate}", join(s)),
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::parse(format!("bad function spec {s:?}"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "parity" => Ok(FunctionSpec::Parity(crate::boolfn::parse_indices(rest)?)),
            "const" => match rest {
                "0" => Ok(FunctionSpec::Const(false)),
                "1" => Ok(FunctionSpec::Const(true)),
                _ => Err(bad()),
            },
            "table" if !rest.is_empty() => Ok(FunctionSpec::Table(PathBuf::from(rest))),
            "noisy-parity" => {
                let (support, rate) = rest.rsplit_once(':').ok_or_else(bad)?;
                let rate = rate.parse().map_err(|_| bad())?;
                Ok(FunctionSpec::NoisyParity(
                    crate::boolfn::parse_indices(support)?,
                    rate,
                ))
            }
            _ => Err(bad()),
        }
    }
}
