use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::Serialize;

use super::{BitVector, BooleanFunction, SharedFunction};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Accept => "accept",
            Decision::Reject => "reject",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Any caller may query any point at any time.
    Free,
    /// Answers are released only through a [`SealedPlan`]; direct queries fail.
    PlanThenAnswer,
}

/// Black-box access to a Boolean function with a query counter.
///
/// The counter is the only mutable state and is atomic, so one oracle can be
/// shared by concurrent trials.
#[derive(Debug)]
pub struct FunctionOracle {
    function: SharedFunction,
    queries: AtomicU64,
    mode: OracleMode,
}

impl FunctionOracle {
    pub fn new(function: SharedFunction) -> Self {
        Self::with_mode(function, OracleMode::Free)
    }

    pub fn planned(function: SharedFunction) -> Self {
        Self::with_mode(function, OracleMode::PlanThenAnswer)
    }

    pub fn with_mode(function: SharedFunction, mode: OracleMode) -> Self {
        FunctionOracle {
            function,
            queries: AtomicU64::new(0),
            mode,
        }
    }

    pub fn from_fn<F: BooleanFunction + 'static>(f: F) -> Self {
        Self::new(Arc::new(f))
    }

    pub fn n(&self) -> usize {
        self.function.n()
    }

    pub fn mode(&self) -> OracleMode {
        self.mode
    }

    /// The underlying function, for uncounted analysis such as exact distances.
    pub fn function(&self) -> &SharedFunction {
        &self.function
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// One counted query outside any plan. Fails in plan-then-answer mode.
    pub fn query(&self, x: &BitVector) -> Result<bool> {
        if self.mode == OracleMode::PlanThenAnswer {
            return Err(Error::AdaptiveQuery);
        }
        self.check_point(x)?;
        Ok(self.answer_unchecked(x))
    }

    fn check_point(&self, x: &BitVector) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.len(),
            });
        }
        Ok(())
    }

    #[inline]
    fn answer_unchecked(&self, x: &BitVector) -> bool {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.function.eval(x)
    }

    /// Registers the complete list of query points. Answers become available
    /// only after this call, which is what makes a caller non-adaptive.
    pub fn seal(&self, plan: QueryPlan) -> Result<SealedPlan<'_>> {
        if plan.n != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: plan.n,
            });
        }
        Ok(SealedPlan {
            oracle: self,
            plan,
            answered: 0,
        })
    }
}

/// An ordered list of query points, all of one dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPlan {
    n: usize,
    points: Vec<BitVector>,
}

impl QueryPlan {
    pub fn new(n: usize) -> Self {
        QueryPlan {
            n,
            points: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, capacity: usize) -> Self {
        QueryPlan {
            n,
            points: Vec::with_capacity(capacity),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Appends a point and returns its index. Panics on a dimension mismatch.
    pub fn push(&mut self, x: BitVector) -> usize {
        assert_eq!(x.len(), self.n, "query point has the wrong dimension");
        self.points.push(x);
        self.points.len() - 1
    }

    pub fn extend(&mut self, other: QueryPlan) {
        assert_eq!(other.n, self.n, "query plans of different dimension");
        self.points.extend(other.points);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[BitVector] {
        &self.points
    }
}

/// A plan whose points are fixed; answers are evaluated lazily on request.
#[derive(Debug)]
pub struct SealedPlan<'a> {
    oracle: &'a FunctionOracle,
    plan: QueryPlan,
    answered: u64,
}

impl SealedPlan<'_> {
    /// Answer for planned point `i`. Each call is one counted query.
    #[inline]
    pub fn answer(&mut self, i: usize) -> bool {
        self.answered += 1;
        self.oracle.answer_unchecked(&self.plan.points[i])
    }

    pub fn answered(&self) -> u64 {
        self.answered
    }

    pub fn plan(&self) -> &QueryPlan {
        &self.plan
    }

    pub fn len(&self) -> usize {
        self.plan.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plan.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StageCount {
    pub f_queries: u64,
    pub d_samples: u64,
}

/// Query and sample counts of one run, broken down by stage.
///
/// Totals are always the sum of the per-stage entries.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct QueryStats {
    f_queries: u64,
    d_samples: u64,
    per_stage: Vec<(String, StageCount)>,
}

impl QueryStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, stage: &str, count: StageCount) {
        self.f_queries += count.f_queries;
        self.d_samples += count.d_samples;
        match self.per_stage.iter_mut().find(|(s, _)| s == stage) {
            Some((_, c)) => {
                c.f_queries += count.f_queries;
                c.d_samples += count.d_samples;
            }
            None => self.per_stage.push((stage.to_string(), count)),
        }
    }

    pub fn f_queries(&self) -> u64 {
        self.f_queries
    }

    pub fn d_samples(&self) -> u64 {
        self.d_samples
    }

    pub fn stage(&self, stage: &str) -> StageCount {
        self.per_stage
            .iter()
            .find(|(s, _)| s == stage)
            .map(|(_, c)| *c)
            .unwrap_or_default()
    }

    pub fn stages(&self) -> &[(String, StageCount)] {
        &self.per_stage
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::ParitySupport;

    fn parity_oracle(mode: OracleMode) -> FunctionOracle {
        FunctionOracle::with_mode(Arc::new(ParitySupport::new(4, [1, 2]).unwrap()), mode)
    }

    #[test]
    fn free_mode_counts_each_query() {
        let f = parity_oracle(OracleMode::Free);
        let x: BitVector = "1000".parse().unwrap();
        assert!(f.query(&x).unwrap());
        assert!(f.query(&x).unwrap());
        assert_eq!(f.query_count(), 2);
        assert!(f.query(&BitVector::zeros(3)).is_err());
        assert_eq!(f.query_count(), 2);
    }

    #[test]
    fn planned_mode_rejects_direct_queries() {
        let f = parity_oracle(OracleMode::PlanThenAnswer);
        let x: BitVector = "1000".parse().unwrap();
        assert!(matches!(f.query(&x), Err(Error::AdaptiveQuery)));
        assert_eq!(f.query_count(), 0);

        let mut plan = QueryPlan::new(4);
        plan.push(x.clone());
        plan.push("1100".parse().unwrap());
        let mut sealed = f.seal(plan).unwrap();
        assert!(sealed.answer(0));
        assert!(!sealed.answer(1));
        assert_eq!(sealed.answered(), 2);
        assert_eq!(f.query_count(), 2);
    }

    #[test]
    fn seal_checks_dimension() {
        let f = parity_oracle(OracleMode::Free);
        assert!(f.seal(QueryPlan::new(5)).is_err());
    }

    #[test]
    fn stats_totals_equal_stage_sums() {
        let mut s = QueryStats::new();
        s.record(
            "blr",
            StageCount {
                f_queries: 30,
                d_samples: 0,
            },
        );
        s.record(
            "consistency",
            StageCount {
                f_queries: 12,
                d_samples: 4,
            },
        );
        s.record(
            "blr",
            StageCount {
                f_queries: 3,
                d_samples: 0,
            },
        );
        assert_eq!(s.f_queries(), 45);
        assert_eq!(s.d_samples(), 4);
        assert_eq!(s.stage("blr").f_queries, 33);
        let summed: u64 = s.stages().iter().map(|(_, c)| c.f_queries).sum();
        assert_eq!(summed, s.f_queries());
        assert_eq!(s.stage("learner"), StageCount::default());
    }
}
