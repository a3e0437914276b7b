//! Numerics: exact discrete distributions, entropy and conditional mutual
//! information, single-channel capacity, cut enumeration, and rate-region
//! membership for discrete and Gaussian networks.
//!
//! Two independent routes exist for cut values of discrete networks with
//! product inputs: [`product_cutset_mi`] sums per-block conditional MI
//! terms, while [`brute_force_joint_mi`] evaluates one conditional MI on
//! the full joint law (see [`network_joint`]). They agree to float noise;
//! the test suite leans on that equality.

mod awgn;
mod ba;
mod cuts;
mod dist;
mod product;

pub use awgn::{
    awgn_capacity, awgn_region_membership, maximize_min_slack, AwgnMembership, AwgnSearchParams,
    PowerAllocation, SlackSearch,
};
pub use ba::{blahut_arimoto, BaOptions, BaResult};
pub use cuts::{
    dmc_cut_value, dmc_region_membership, enumerate_cuts, network_edge_capacities, Cut,
    EdgeCapacities, Membership, RateTuple,
};
pub use dist::{conditional_mi, entropy, Distribution};
pub use product::{brute_force_joint_mi, network_joint, product_cutset_mi, uniform_inputs};

use thiserror::Error;

use crate::tol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("probabilities sum to {0}, further than {} from 1", tol::ROW_SUM_REJECT)]
    BadSum(f64),
    #[error("negative or non-finite probability at entry {0}")]
    BadProb(usize),
    #[error("shape does not match the number of entries")]
    Shape,
    #[error("table of {entries} entries exceeds the cap of {}", tol::TABLE_CAP)]
    TooLarge { entries: usize },
    #[error("axis {0} out of range for {1} axes")]
    AxisOutOfRange(usize, usize),
    #[error("axis {0} appears in more than one group")]
    AxisOverlap(usize),
    #[error("point mass index out of range")]
    PointOutOfRange,
    #[error("capacity iteration stopped after {iters} iterations with gap {gap}")]
    NoConvergence { gap: f64, iters: usize },
    #[error("initial input distribution must be strictly positive with matching length")]
    BadInitial,
    #[error("capacity iteration takes a single-edge channel")]
    NotSingleEdge,
    #[error("cut enumeration is capped at {} nodes, got {0}", tol::MAX_CUT_NODES)]
    TooManyNodes(usize),
    #[error("node {} is not a source but has nonzero rate", .0 + 1)]
    NonSourceRate(usize),
    #[error("rate for node {} is negative or not finite", .0 + 1)]
    BadRate(usize),
    #[error("rate tuple has {got} entries for {want} nodes")]
    RateLen { got: usize, want: usize },
    #[error("node {} out of range for {n} nodes", .i + 1)]
    NodeOutOfRange { i: usize, n: usize },
    #[error("operation needs a discrete network")]
    NotDiscrete,
    #[error("operation needs a Gaussian network with power constraints")]
    NotGaussian,
    #[error("block {} has coupled channels; region calculations need independent blocks", .0 + 1)]
    DependentChannels(usize),
    #[error("per-edge capacities need every non-trivial block to be a single edge; block {} is not", .0 + 1)]
    NotPerEdge(usize),
    #[error("block {}: input distribution shape does not match the channel", .0 + 1)]
    InputShape(usize),
    #[error("expected one input distribution per block: got {got}, want {want}")]
    InputCount { got: usize, want: usize },
    #[error("joint distribution must have 2*n^2 axes in canonical edge order")]
    JointLayout,
    #[error("cut is over {got} nodes, network has {want}")]
    CutNodes { got: usize, want: usize },
    #[error("power allocation has {got} entries for {want} edges")]
    AllocLen { got: usize, want: usize },
    #[error("power allocation entry for {0} is negative or not finite")]
    BadAlloc(crate::net::EdgeId),
}
