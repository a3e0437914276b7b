//! Cuts and the discrete rate region.
//!
//! A cut is a node subset `T` that separates at least one source from at
//! least one destination: `T` meets the source set and its complement
//! meets the destination set. The discrete region is the set of rate
//! tuples satisfying, for every cut, `sum of rates inside T <= sum of
//! capacities of edges crossing T`.

use std::fmt;

use super::ba::{blahut_arimoto, BaOptions};
use super::InfoError;
use crate::net::{ChannelModel, EdgeId, MulticastDemand, Network};
use crate::tol;

/// A node subset `T`, stored as a bitmask (node counts are capped at
/// [`tol::MAX_CUT_NODES`], far below the mask width).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cut {
    n: usize,
    mask: u32,
}

impl Cut {
    pub fn from_nodes(
        n: usize,
        nodes: impl IntoIterator<Item = usize>,
    ) -> Result<Self, InfoError> {
        if n > tol::MAX_CUT_NODES {
            return Err(InfoError::TooManyNodes(n));
        }
        let mut mask = 0u32;
        for i in nodes {
            if i >= n {
                return Err(InfoError::NodeOutOfRange { i, n });
            }
            mask |= 1 << i;
        }
        Ok(Cut { n, mask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.mask >> i & 1 == 1
    }

    /// Nodes of `T`, ascending.
    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&i| self.contains(i))
    }

    /// Nodes of the complement, ascending.
    pub fn complement(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&i| !self.contains(i))
    }

    /// True when the edge leaves `T`: tail inside, head outside.
    pub fn crosses(&self, e: EdgeId) -> bool {
        self.contains(e.from) && !self.contains(e.to)
    }

    /// Edges leaving `T`, in canonical edge order.
    pub fn crossing_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        crate::net::all_edges(self.n).filter(|&e| self.crosses(e))
    }

    /// Does this cut separate the demand (meets sources, complement meets
    /// destinations)?
    pub fn separates(&self, demand: &MulticastDemand) -> bool {
        demand.sources().iter().any(|&s| self.contains(s))
            && demand.destinations().iter().any(|&d| !self.contains(d))
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.nodes().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// Every cut separating the demand, in ascending bitmask order (so the
/// order is deterministic and independent of how the demand was written).
pub fn enumerate_cuts(n: usize, demand: &MulticastDemand) -> Result<Vec<Cut>, InfoError> {
    if n == 0 || n > tol::MAX_CUT_NODES {
        return Err(InfoError::TooManyNodes(n));
    }
    let mut src_mask = 0u32;
    for &s in demand.sources() {
        if s >= n {
            return Err(InfoError::NodeOutOfRange { i: s, n });
        }
        src_mask |= 1 << s;
    }
    let mut dst_mask = 0u32;
    for &d in demand.destinations() {
        if d >= n {
            return Err(InfoError::NodeOutOfRange { i: d, n });
        }
        dst_mask |= 1 << d;
    }
    let full = (1u32 << n) - 1;
    let mut cuts = Vec::new();
    for mask in 1..=full {
        if mask & src_mask != 0 && !mask & dst_mask != 0 {
            cuts.push(Cut { n, mask });
        }
    }
    Ok(cuts)
}

/// Per-edge capacities in bits per slot, indexed canonically.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCapacities {
    n: usize,
    c: Vec<f64>,
}

impl EdgeCapacities {
    pub fn new(n: usize, c: Vec<f64>) -> Result<Self, InfoError> {
        if c.len() != n * n {
            return Err(InfoError::RateLen {
                got: c.len(),
                want: n * n,
            });
        }
        for (k, &v) in c.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(InfoError::BadRate(k));
            }
        }
        Ok(EdgeCapacities { n, c })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, e: EdgeId) -> f64 {
        self.c[e.index(self.n)]
    }
}

/// Capacity of every edge of a discrete network whose non-trivial blocks
/// are all single edges: trivial edges carry 0, the rest run the capacity
/// iteration.
pub fn network_edge_capacities(
    net: &Network,
    opts: &BaOptions,
) -> Result<EdgeCapacities, InfoError> {
    let n = net.n();
    let mut c = vec![0.0; n * n];
    for (b, (block, ch)) in net
        .partition()
        .blocks()
        .iter()
        .zip(net.channels())
        .enumerate()
    {
        match ch {
            ChannelModel::Trivial => {}
            ChannelModel::Dmc(t) => {
                if block.len() != 1 {
                    return Err(InfoError::NotPerEdge(b));
                }
                c[block[0].index(n)] = blahut_arimoto(t, opts)?.capacity;
            }
            ChannelModel::CoupledXor { .. } => return Err(InfoError::DependentChannels(b)),
            ChannelModel::Awgn { .. } => return Err(InfoError::NotDiscrete),
        }
    }
    EdgeCapacities::new(n, c)
}

/// Sum of capacities over the edges leaving `T`.
pub fn dmc_cut_value(cut: &Cut, caps: &EdgeCapacities) -> f64 {
    cut.crossing_edges().map(|e| caps.get(e)).sum()
}

/// Nonnegative per-node rates, zero outside the source set.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTuple {
    rates: Vec<f64>,
}

impl RateTuple {
    pub fn new(rates: Vec<f64>, demand: &MulticastDemand) -> Result<Self, InfoError> {
        for (i, &r) in rates.iter().enumerate() {
            if !r.is_finite() || r < 0.0 {
                return Err(InfoError::BadRate(i));
            }
            if r > 0.0 && !demand.is_source(i) {
                return Err(InfoError::NonSourceRate(i));
            }
        }
        Ok(RateTuple { rates })
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn rate(&self, i: usize) -> f64 {
        self.rates[i]
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Sum of rates of the nodes inside `T`.
    pub fn sum_inside(&self, cut: &Cut) -> f64 {
        cut.nodes().map(|i| self.rates[i]).sum()
    }
}

/// Membership verdict for the discrete region. `Outside` carries the most
/// violated cut (ties broken by enumeration order) and its slack
/// `value - rate sum`, which is negative.
#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    Inside,
    Outside { cut: Cut, slack: f64 },
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside)
    }
}

/// Checks every cut inequality at tolerance [`tol::MEMBERSHIP_TOL`].
pub fn dmc_region_membership(
    rates: &RateTuple,
    caps: &EdgeCapacities,
    demand: &MulticastDemand,
) -> Result<Membership, InfoError> {
    let n = caps.n();
    if rates.len() != n {
        return Err(InfoError::RateLen {
            got: rates.len(),
            want: n,
        });
    }
    let mut worst: Option<(Cut, f64)> = None;
    for cut in enumerate_cuts(n, demand)? {
        let slack = dmc_cut_value(&cut, caps) - rates.sum_inside(&cut);
        if slack < -tol::MEMBERSHIP_TOL && worst.map_or(true, |(_, w)| slack < w) {
            worst = Some((cut, slack));
        }
    }
    Ok(match worst {
        None => Membership::Inside,
        Some((cut, slack)) => Membership::Outside { cut, slack },
    })
}
