use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::learner::{degree_for, MAX_DEGREE};
use crate::linearity::{ceil_ratio, BLR_ROUNDS_CONSTANT};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestMode {
    /// One-sided test for parities of at most `k` coordinates.
    Star,
    /// Two-sided test for parities of exactly `k` coordinates.
    Exact,
}

impl TestMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TestMode::Star => "star",
            TestMode::Exact => "exact",
        }
    }
}

impl fmt::Display for TestMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "star" => Ok(TestMode::Star),
            "exact" => Ok(TestMode::Exact),
            other => Err(Error::parse(format!(
                "mode must be star or exact, got {other:?}"
            ))),
        }
    }
}

/// Largest `k` whose stage-2.2 code length fits the supported fields.
pub const MAX_K: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TesterConfig {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub mode: TestMode,
    pub seed: u64,
    /// Stop answering queries once a stage rejects. Planning is unaffected.
    pub early_exit: bool,
    /// `t1 = ceil(blr_constant / ε')`.
    pub blr_constant: f64,
}

/// Every count the pipeline needs, fixed by `(k, ε)` alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Cells in the stage 2.1 partition, `16k`.
    pub bin_cells: usize,
    /// Cells receiving coordinates in stage 2.2, `256k²`.
    pub r_cells: usize,
    /// Learner code length `2^m - 1 ≥ r_cells`; cells past `r_cells` stay empty.
    pub learner_cols: usize,
    pub learner_degree: usize,
    /// Learner sparsity `8k`.
    pub learner_k: usize,
    /// Rows of the learner matrix, each one g-query.
    pub q_learn: usize,
    pub eps_prime: f64,
    /// BLR rounds.
    pub t1: usize,
    /// Consistency samples, `ceil(4/ε)`.
    pub t: usize,
}

impl DerivedParams {
    pub fn compute(k: usize, epsilon: f64, blr_constant: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::param(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        if !(blr_constant > 0.0 && blr_constant.is_finite()) {
            return Err(Error::param(format!(
                "BLR round constant must be positive, got {blr_constant}"
            )));
        }
        let r_cells = 256 * k * k;
        let learner_degree = degree_for(r_cells);
        let learner_cols = (1usize << learner_degree) - 1;
        let learner_k = 8 * k;
        let q_learn = learner_k * learner_degree + 1;
        let denom = 12 * (16 * k + q_learn);
        let eps_prime = 1.0 / denom as f64;
        let params = DerivedParams {
            bin_cells: 16 * k,
            r_cells,
            learner_cols,
            learner_degree,
            learner_k,
            q_learn,
            eps_prime,
            t1: ceil_ratio(blr_constant, eps_prime),
            t: ceil_ratio(4.0, epsilon),
        };
        assert!(params.eps_prime < 0.125);
        assert!((16 * k + q_learn) as f64 * 2.0 * eps_prime <= 1.0 / 6.0 + 1e-12);
        Ok(params)
    }

    /// Planned f-queries: `3·t1 + 2·16k + 2·q_learn + 3·t`.
    pub fn total_queries(&self) -> u64 {
        (3 * self.t1 + 2 * self.bin_cells + 2 * self.q_learn + 3 * self.t) as u64
    }
}

/// Experiments build one config per trial; warn once per `(n, k)`.
fn first_warning(n: usize, k: usize) -> bool {
    static SEEN: OnceLock<Mutex<HashSet<(usize, usize)>>> = OnceLock::new();
    SEEN.get_or_init(Default::default)
        .lock()
        .map(|mut seen| seen.insert((n, k)))
        .unwrap_or(true)
}

impl TesterConfig {
    pub fn new(n: usize, k: usize, epsilon: f64, mode: TestMode, seed: u64) -> Result<Self> {
        let cfg = TesterConfig {
            n,
            k,
            epsilon,
            mode,
            seed,
            early_exit: true,
            blr_constant: BLR_ROUNDS_CONSTANT,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_early_exit(mut self, early_exit: bool) -> Self {
        self.early_exit = early_exit;
        self
    }

    pub fn with_blr_constant(mut self, c: f64) -> Result<Self> {
        self.blr_constant = c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k >= self.n {
            return Err(Error::param(format!(
                "need 1 <= k < n, got k={} n={}",
                self.k, self.n
            )));
        }
        if self.k > MAX_K {
            return Err(Error::param(format!(
                "k={} needs a code longer than GF(2^{MAX_DEGREE}) supports (max k is {MAX_K})",
                self.k
            )));
        }
        DerivedParams::compute(self.k, self.epsilon, self.blr_constant)?;
        if self.k * self.k > self.n && first_warning(self.n, self.k) {
            log::warn!(
                "k^2 = {} exceeds n = {}; bounds are stated for k^2 <= n",
                self.k * self.k,
                self.n
            );
        }
        Ok(())
    }

    pub fn params(&self) -> DerivedParams {
        DerivedParams::compute(self.k, self.epsilon, self.blr_constant).expect("validated config")
    }
}
