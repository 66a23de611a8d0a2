//! Points, functions, oracles and distributions: the substrate every tester
//! stage queries.

mod bitvector;
mod distance;
mod distribution;
mod function;
mod oracle;
mod support;

pub use bitvector::{bv_add, BitVector};
pub use distance::{distance_to_class, exact_distance, ClassMode, MAX_CLASS_DIM, MAX_ENUM_DIM};
pub use distribution::{sample, DistributionSpec, Sampler, FILE_MASS_TOLERANCE, MASS_TOLERANCE};
pub use function::{
    BooleanFunction, Complement, Constant, Corrupted, Majority3, NoisyParity, PointTable,
    Recording, SharedFunction, TruthTable, MAX_TABLE_DIM,
};
pub use oracle::{
    Decision, FunctionOracle, OracleMode, QueryPlan, QueryStats, SealedPlan, StageCount,
};
pub use support::{binomial_prefix_sum, parity_eval, parse_indices, Combinations, ParitySupport};
