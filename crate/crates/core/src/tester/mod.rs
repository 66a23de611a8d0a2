//! The full pipeline: BLR, binning, learning on a random projection, and a
//! consistency check against samples from the target distribution.
//!
//! Every query point of a run is fixed by `(seed, n, cfg, d)` before the first
//! answer is read. Each stage plans from its own rng stream of the run seed.

mod config;
mod partition;
mod stages;

pub use config::{DerivedParams, TestMode, TesterConfig, MAX_K};
pub use partition::{expand_projection, random_partition, Partition};
pub use stages::{
    plan_binning, plan_blr, plan_consistency, plan_learner, plan_stage, stage1_blr,
    stage21_bin_count, stage22_learn, stage3_consistency, Stage, StagePlan, StageVerdict,
};

use serde::Serialize;

use crate::boolfn::{
    BitVector, Decision, DistributionSpec, FunctionOracle, QueryStats, StageCount,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    pub rejecting_stage: Stage,
    pub stats: QueryStats,
}

/// All four stage plans of one run.
#[derive(Debug, Clone)]
pub struct TestPlan {
    stages: Vec<StagePlan>,
}

impl TestPlan {
    pub fn stages(&self) -> &[StagePlan] {
        &self.stages
    }

    pub fn total_queries(&self) -> u64 {
        self.stages.iter().map(|s| s.plan.len() as u64).sum()
    }

    /// Query points in the order they are answered.
    pub fn points(&self) -> impl Iterator<Item = &BitVector> {
        self.stages.iter().flat_map(|s| s.plan.points())
    }
}

pub fn plan_test(d: &DistributionSpec, cfg: &TesterConfig) -> Result<TestPlan> {
    cfg.validate()?;
    if d.n() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n,
            found: d.n(),
        });
    }
    let stages = Stage::PIPELINE
        .iter()
        .map(|&st| plan_stage(st, d, cfg))
        .collect::<Result<Vec<_>>>()?;
    let plan = TestPlan { stages };
    assert_eq!(
        plan.total_queries(),
        cfg.params().total_queries(),
        "query accounting identity"
    );
    Ok(plan)
}

fn run_pipeline(f: &FunctionOracle, d: &DistributionSpec, cfg: &TesterConfig) -> Result<Verdict> {
    if f.n() != cfg.n {
        return Err(Error::DimensionMismatch {
            expected: cfg.n,
            found: f.n(),
        });
    }
    let plan = plan_test(d, cfg)?;
    let planned = plan.total_queries();
    let mut stats = QueryStats::new();
    let mut rejecting_stage = Stage::None;
    // Every stage is planned before the first answer is read.
    for sp in plan.stages {
        if rejecting_stage != Stage::None && cfg.early_exit {
            break;
        }
        let StagePlan {
            stage,
            plan,
            d_samples,
            kind,
        } = sp;
        let mut sealed = f.seal(plan)?;
        let decision = kind.evaluate(&mut |i| sealed.answer(i))?;
        stats.record(
            stage.as_str(),
            StageCount {
                f_queries: sealed.answered(),
                d_samples,
            },
        );
        if decision == Decision::Reject && rejecting_stage == Stage::None {
            rejecting_stage = stage;
        }
    }
    if !cfg.early_exit {
        assert_eq!(
            stats.f_queries(),
            planned,
            "measured queries differ from the plan"
        );
    }
    let decision = if rejecting_stage == Stage::None {
        Decision::Accept
    } else {
        Decision::Reject
    };
    Ok(Verdict {
        decision,
        rejecting_stage,
        stats,
    })
}

/// One-sided tester for parities of at most `k` coordinates.
pub fn test_k_linear_star(
    f: &FunctionOracle,
    d: &DistributionSpec,
    cfg: &TesterConfig,
) -> Result<Verdict> {
    if cfg.mode != TestMode::Star {
        return Err(Error::Precondition(
            "test_k_linear_star needs mode = star".into(),
        ));
    }
    run_pipeline(f, d, cfg)
}

/// Two-sided tester for parities of exactly `k` coordinates.
pub fn test_k_linear(
    f: &FunctionOracle,
    d: &DistributionSpec,
    cfg: &TesterConfig,
) -> Result<Verdict> {
    if cfg.mode != TestMode::Exact {
        return Err(Error::Precondition(
            "test_k_linear needs mode = exact".into(),
        ));
    }
    run_pipeline(f, d, cfg)
}

/// Dispatches on `cfg.mode`.
pub fn run_tester(f: &FunctionOracle, d: &DistributionSpec, cfg: &TesterConfig) -> Result<Verdict> {
    run_pipeline(f, d, cfg)
}
