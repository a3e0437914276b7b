//! Multimessage multicast networks built from independent per-block
//! channels, with per-edge delay profiles that may grant zero-delay reads.
//!
//! The crate splits into four layers:
//!
//! * [`net`] — the static model: nodes, the partition of the `n*n` directed
//!   edge set into channel blocks, per-block channel laws, the multicast
//!   demand, and (for Gaussian networks) power constraints.
//! * [`schedule`] — channel operation sequences and delay profiles, and the
//!   feasibility test that decides whether a profile's zero-delay entries
//!   can be honored by a given firing order.
//! * [`info`] — the numeric layer: discrete distributions, entropy and
//!   conditional mutual information, the capacity iteration for a single
//!   channel, cut enumeration, and rate-region membership for discrete and
//!   Gaussian networks.
//! * [`sim`] — a slot-by-slot Monte-Carlo engine that runs pluggable codes
//!   against a network under a chosen sequence and delay profile, with
//!   sandboxed encoder access to received symbols.

pub mod info;
pub mod net;
pub mod schedule;
pub mod sim;
pub mod tol;

pub use net::{ChannelModel, DmcTable, EdgeId, EdgePartition, MulticastDemand, Network};
pub use schedule::{DelayProfile, Feasibility, OperationSequence};
