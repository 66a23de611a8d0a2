//! The four stages, each split into a planning half that draws every query
//! point and an evaluation half that only reads answers.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::config::{TestMode, TesterConfig};
use super::partition::{expand_projection, random_partition};
use crate::boolfn::{BitVector, Decision, DistributionSpec, FunctionOracle, QueryPlan, StageCount};
use crate::learner::{bch_matrix, decode, DecodeResult, QueryMatrix};
use crate::linearity::{plan_blr_round, plan_self_correct};
use crate::rng::stream_rng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    None,
    Blr,
    Binning,
    Learner,
    Consistency,
}

impl Stage {
    pub const PIPELINE: [Stage; 4] = [
        Stage::Blr,
        Stage::Binning,
        Stage::Learner,
        Stage::Consistency,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::None => "none",
            Stage::Blr => "blr",
            Stage::Binning => "binning",
            Stage::Learner => "learner",
            Stage::Consistency => "consistency",
        }
    }

    /// Rng stream for this stage under the run seed.
    pub fn stream(self) -> u64 {
        match self {
            Stage::None => 0,
            Stage::Blr => 1,
            Stage::Binning => 2,
            Stage::Learner => 3,
            Stage::Consistency => 4,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Stage::None,
            Stage::Blr,
            Stage::Binning,
            Stage::Learner,
            Stage::Consistency,
        ]
        .into_iter()
        .find(|st| st.as_str() == s)
        .ok_or_else(|| Error::parse(format!("unknown stage {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub(crate) enum StageKind {
    Blr {
        rounds: usize,
    },
    Binning {
        cells: usize,
        k: usize,
    },
    Learner {
        matrix: Arc<QueryMatrix>,
        k_sparse: usize,
        k: usize,
        mode: TestMode,
    },
    Consistency {
        samples: usize,
    },
}

/// The query points of one stage plus what evaluation needs to read them.
#[derive(Debug, Clone)]
pub struct StagePlan {
    pub stage: Stage,
    pub plan: QueryPlan,
    pub d_samples: u64,
    pub(crate) kind: StageKind,
}

/// Outcome of one stage in isolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageVerdict {
    pub stage: Stage,
    pub decision: Decision,
    pub f_queries: u64,
    pub d_samples: u64,
}

impl StagePlan {
    pub fn count(&self) -> StageCount {
        StageCount {
            f_queries: self.plan.len() as u64,
            d_samples: self.d_samples,
        }
    }
}

impl StageKind {
    /// Reads every planned answer through `answer(i)` and decides.
    pub(crate) fn evaluate(&self, answer: &mut dyn FnMut(usize) -> bool) -> Result<Decision> {
        let reject = match self {
            StageKind::Blr { rounds } => {
                let failures = (0..*rounds)
                    .filter(|r| answer(3 * r) ^ answer(3 * r + 1) != answer(3 * r + 2))
                    .count();
                failures > 0
            }
            StageKind::Binning { cells, k } => {
                let count = (0..*cells)
                    .filter(|&c| answer(2 * c) ^ answer(2 * c + 1))
                    .count();
                count > *k
            }
            StageKind::Learner {
                matrix,
                k_sparse,
                k,
                mode,
            } => {
                let bits: Vec<bool> = (0..matrix.q())
                    .map(|r| answer(2 * r) ^ answer(2 * r + 1))
                    .collect();
                match decode(matrix, &BitVector::from_bools(&bits), *k_sparse)? {
                    DecodeResult::NotSparse => true,
                    DecodeResult::Support(s) => match mode {
                        TestMode::Star => s.weight() > *k,
                        TestMode::Exact => s.weight() != *k,
                    },
                }
            }
            StageKind::Consistency { samples } => {
                let mismatches = (0..*samples)
                    .filter(|s| answer(3 * s) != answer(3 * s + 1) ^ answer(3 * s + 2))
                    .count();
                mismatches > 0
            }
        };
        Ok(if reject {
            Decision::Reject
        } else {
            Decision::Accept
        })
    }
}

pub fn plan_blr(n: usize, cfg: &TesterConfig, rng: &mut impl Rng) -> StagePlan {
    let rounds = cfg.params().t1;
    let mut plan = QueryPlan::with_capacity(n, 3 * rounds);
    for _ in 0..rounds {
        plan_blr_round(&mut plan, rng);
    }
    StagePlan {
        stage: Stage::Blr,
        plan,
        d_samples: 0,
        kind: StageKind::Blr { rounds },
    }
}

/// One partition into `16k` cells and one `z`; cell `i` is probed at
/// `z` restricted to `X_i` through the self-corrector.
pub fn plan_binning(n: usize, cfg: &TesterConfig, rng: &mut impl Rng) -> Result<StagePlan> {
    let cells = cfg.params().bin_cells;
    let partition = random_partition(n, cells, rng)?;
    let z = BitVector::random(n, rng);
    let mut plan = QueryPlan::with_capacity(n, 2 * cells);
    for i in 1..=cells {
        plan_self_correct(&mut plan, &partition.restrict(&z, i), rng);
    }
    Ok(StagePlan {
        stage: Stage::Binning,
        plan,
        d_samples: 0,
        kind: StageKind::Binning { cells, k: cfg.k },
    })
}

/// Partition into `256k²` cells padded to the code length, then one
/// self-corrected query per learner row.
pub fn plan_learner(n: usize, cfg: &TesterConfig, rng: &mut impl Rng) -> Result<StagePlan> {
    let p = cfg.params();
    let mut partition = random_partition(n, p.r_cells, rng)?;
    partition.pad(p.learner_cols);
    let matrix = bch_matrix(p.learner_cols, p.learner_k)?;
    let mut plan = QueryPlan::with_capacity(n, 2 * matrix.q());
    for y in matrix.rows() {
        plan_self_correct(&mut plan, &expand_projection(&partition, y)?, rng);
    }
    Ok(StagePlan {
        stage: Stage::Learner,
        plan,
        d_samples: 0,
        kind: StageKind::Learner {
            matrix,
            k_sparse: p.learner_k,
            k: cfg.k,
            mode: cfg.mode,
        },
    })
}

/// `ceil(4/ε)` samples from `d`, each checked as `f(x)` against `f(x⊕a) ⊕ f(a)`.
pub fn plan_consistency(
    d: &DistributionSpec,
    cfg: &TesterConfig,
    rng: &mut impl Rng,
) -> Result<StagePlan> {
    let samples = cfg.params().t;
    let sampler = d.sampler()?;
    let mut plan = QueryPlan::with_capacity(d.n(), 3 * samples);
    for _ in 0..samples {
        let x = sampler.sample(rng);
        plan.push(x.clone());
        plan_self_correct(&mut plan, &x, rng);
    }
    Ok(StagePlan {
        stage: Stage::Consistency,
        plan,
        d_samples: samples as u64,
        kind: StageKind::Consistency { samples },
    })
}

/// Plans `stage` from its own stream of `cfg.seed`.
pub fn plan_stage(stage: Stage, d: &DistributionSpec, cfg: &TesterConfig) -> Result<StagePlan> {
    let mut rng = stream_rng(cfg.seed, stage.stream());
    match stage {
        Stage::Blr => Ok(plan_blr(cfg.n, cfg, &mut rng)),
        Stage::Binning => plan_binning(cfg.n, cfg, &mut rng),
        Stage::Learner => plan_learner(cfg.n, cfg, &mut rng),
        Stage::Consistency => plan_consistency(d, cfg, &mut rng),
        Stage::None => Err(Error::param("no plan for the empty stage")),
    }
}

fn run_single(f: &FunctionOracle, sp: StagePlan) -> Result<StageVerdict> {
    let StagePlan {
        stage,
        plan,
        d_samples,
        kind,
    } = sp;
    let mut sealed = f.seal(plan)?;
    let decision = kind.evaluate(&mut |i| sealed.answer(i))?;
    Ok(StageVerdict {
        stage,
        decision,
        f_queries: sealed.answered(),
        d_samples,
    })
}

fn check_dims(f: &FunctionOracle, cfg: &TesterConfig) -> Result<()> {
    if f.n() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n,
            found: f.n(),
        });
    }
    Ok(())
}

pub fn stage1_blr(
    f: &FunctionOracle,
    cfg: &TesterConfig,
    rng: &mut impl Rng,
) -> Result<StageVerdict> {
    check_dims(f, cfg)?;
    run_single(f, plan_blr(cfg.n, cfg, rng))
}

pub fn stage21_bin_count(
    f: &FunctionOracle,
    cfg: &TesterConfig,
    rng: &mut impl Rng,
) -> Result<StageVerdict> {
    check_dims(f, cfg)?;
    run_single(f, plan_binning(cfg.n, cfg, rng)?)
}

pub fn stage22_learn(
    f: &FunctionOracle,
    cfg: &TesterConfig,
    rng: &mut impl Rng,
) -> Result<StageVerdict> {
    check_dims(f, cfg)?;
    run_single(f, plan_learner(cfg.n, cfg, rng)?)
}

pub fn stage3_consistency(
    f: &FunctionOracle,
    d: &DistributionSpec,
    cfg: &TesterConfig,
    rng: &mut impl Rng,
) -> Result<StageVerdict> {
    check_dims(f, cfg)?;
    if d.n() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n,
            found: d.n(),
        });
    }
    run_single(f, plan_consistency(d, cfg, rng)?)
}
