//! Numeric tolerances and size guards, collected in one place so every
//! module compares against the same numbers.

/// A channel row whose probabilities sum further than this from 1 is
/// rejected outright (likely a typo in the table, not float noise).
pub const ROW_SUM_REJECT: f64 = 1e-9;

/// After ingestion every row is renormalized; the stored sum is within this
/// of 1. Distribution construction uses the same bound.
pub const ROW_SUM_NORMALIZED: f64 = 1e-12;

/// Absolute tolerance, in bits, for rate-region membership comparisons.
/// A tuple on the boundary counts as inside.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Hard cap on joint table sizes (entries), for channel tables and for the
/// exact joint distributions built from them. Past this the exact methods
/// stop being desk-scale and the constructors refuse.
pub const TABLE_CAP: usize = 1 << 20;

/// Default stopping gap, in bits, for the single-channel capacity
/// iteration: the run stops once (upper bound - lower bound) < gap.
pub const BA_DEFAULT_GAP: f64 = 1e-9;

/// Default iteration cap for the capacity iteration.
pub const BA_DEFAULT_MAX_ITERS: usize = 100_000;

/// Certification gap, in bits, for the Gaussian power search: the run
/// counts as converged once its achieved worst-cut slack and its proven
/// upper bound on that slack are within this of each other, pinning the
/// optimum tighter than [`MEMBERSHIP_TOL`].
pub const AWGN_GAP_TOL: f64 = 1e-10;

/// Fewest paired samples the plug-in mutual-information estimate will
/// accept; below this the bias bound dwarfs anything worth reporting.
pub const MIN_MI_SAMPLES: u64 = 1000;

/// Cut enumeration walks all subsets of the node set; refuse past this.
pub const MAX_CUT_NODES: usize = 20;

/// Exhaustive sequence enumeration walks all permutations of the blocks;
/// refuse past this.
pub const MAX_ENUM_BLOCKS: usize = 8;
