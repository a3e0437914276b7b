//! Channel operation sequences and delay profiles.
//!
//! Within every time slot the blocks of the edge partition fire one after
//! another in the order given by an [`OperationSequence`]. A
//! [`DelayProfile`] records, for each triple `(l, i, j)`, whether the
//! encoder of edge `(i,j)` may read the symbol received on edge `(l,i)`
//! from the *same* slot (entry 0) or only up to the previous slot
//! (entry 1). A profile is feasible with respect to a sequence when every
//! zero entry points at an edge whose block fires strictly earlier.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::net::{EdgeId, EdgePartition};
use crate::tol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("sequence is not a permutation of the {0} blocks")]
    NotAPermutation(usize),
    #[error("sequence covers {got} blocks but the partition has {want}")]
    SequenceLength { got: usize, want: usize },
    #[error("profile is for {got} nodes but the partition has {want}")]
    NodeCount { got: usize, want: usize },
    #[error("profile entry ({},{},{}) out of range for {n} nodes", t.0 + 1, t.1 + 1, t.2 + 1)]
    TripleOutOfRange { t: (usize, usize, usize), n: usize },
    #[error("profile is infeasible for this sequence; first violation at ({},{},{})",
            witness.0 + 1, witness.1 + 1, witness.2 + 1)]
    Infeasible { witness: (usize, usize, usize) },
    #[error("sequence enumeration is capped at {} blocks, partition has {0}", tol::MAX_ENUM_BLOCKS)]
    TooManyBlocks(usize),
    #[error("profile line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A permutation of the partition's blocks: `order()[t]` is the block fired
/// at position `t` (0-based internally).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationSequence {
    order: Vec<usize>,
}

impl OperationSequence {
    pub fn new(order: Vec<usize>) -> Result<Self, ScheduleError> {
        let alpha = order.len();
        let mut seen = vec![false; alpha];
        for &b in &order {
            if b >= alpha || seen[b] {
                return Err(ScheduleError::NotAPermutation(alpha));
            }
            seen[b] = true;
        }
        Ok(OperationSequence { order })
    }

    /// Blocks fire in partition order.
    pub fn identity(alpha: usize) -> Self {
        OperationSequence {
            order: (0..alpha).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// 0-based firing position of a block.
    pub fn position_of_block(&self, block: usize) -> usize {
        self.order.iter().position(|&b| b == block).expect("block in range")
    }

    /// 1-based rendering, e.g. `(3,1,2)`.
    pub fn display(&self) -> String {
        let inner = self
            .order
            .iter()
            .map(|b| (b + 1).to_string())
            .collect::<Vec<_>>()
            .join(",");
        format!("({inner})")
    }
}

/// The 1-based firing position of an edge's block: 1 means it fires first.
pub fn channel_position(e: EdgeId, partition: &EdgePartition, seq: &OperationSequence) -> usize {
    let (block, _) = partition.locate(e);
    seq.position_of_block(block) + 1
}

/// Binary delay entries for all `n^3` triples, stored sparsely as the set
/// of zero entries; everything unlisted is 1 (unit delay).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayProfile {
    n: usize,
    zeros: BTreeSet<(usize, usize, usize)>,
}

impl DelayProfile {
    /// The all-one profile: every read is at least one slot old.
    pub fn positive(n: usize) -> Self {
        DelayProfile {
            n,
            zeros: BTreeSet::new(),
        }
    }

    /// Profile with the given zero entries `(l, i, j)`: edge `(l,i)` incurs
    /// no delay when read by the encoder of edge `(i,j)`.
    pub fn with_zeros(
        n: usize,
        zeros: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, ScheduleError> {
        let mut set = BTreeSet::new();
        for t in zeros {
            if t.0 >= n || t.1 >= n || t.2 >= n {
                return Err(ScheduleError::TripleOutOfRange { t, n });
            }
            set.insert(t);
        }
        Ok(DelayProfile { n, zeros: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The delay entry for `(l, i, j)`: 0 or 1.
    pub fn entry(&self, l: usize, i: usize, j: usize) -> u8 {
        if self.zeros.contains(&(l, i, j)) {
            0
        } else {
            1
        }
    }

    pub fn is_zero(&self, l: usize, i: usize, j: usize) -> bool {
        self.zeros.contains(&(l, i, j))
    }

    pub fn is_positive(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Zero entries in lexicographic order.
    pub fn zeros(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.zeros.iter().copied()
    }

    /// Parses the sparse profile format: lines `zero L I J` (1-based),
    /// `#` comments, blank lines ignored. `n` comes from the network the
    /// profile is used with.
    pub fn parse(text: &str, n: usize) -> Result<Self, ScheduleError> {
        let mut zeros = Vec::new();
        for (ln0, raw) in text.lines().enumerate() {
            let line = ln0 + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "zero" {
                return Err(ScheduleError::Parse {
                    line,
                    msg: "expected: zero L I J".into(),
                });
            }
            let mut triple = [0usize; 3];
            for (slot, tok) in triple.iter_mut().zip(&toks[1..]) {
                match tok.parse::<usize>() {
                    Ok(v) if v >= 1 => *slot = v - 1,
                    _ => {
                        return Err(ScheduleError::Parse {
                            line,
                            msg: format!("bad node number {tok:?} (1-based)"),
                        })
                    }
                }
            }
            zeros.push((triple[0], triple[1], triple[2]));
        }
        DelayProfile::with_zeros(n, zeros)
    }

    /// Writes the format [`DelayProfile::parse`] reads.
    pub fn write(&self) -> String {
        let mut s = String::new();
        for (l, i, j) in self.zeros() {
            writeln!(s, "zero {} {} {}", l + 1, i + 1, j + 1).unwrap();
        }
        s
    }
}

/// Verdict of the feasibility check. Infeasibility is a normal answer, not
/// an error; the witness is the lexicographically smallest violating
/// triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible { witness: (usize, usize, usize) },
}

impl Feasibility {
    pub fn is_feasible(self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// Checks every zero entry `(l,i,j)`: the block of `(l,i)` must fire
/// strictly before the block of `(i,j)`.
pub fn is_feasible(
    profile: &DelayProfile,
    seq: &OperationSequence,
    partition: &EdgePartition,
) -> Result<Feasibility, ScheduleError> {
    check_shapes(profile, seq, partition)?;
    for (l, i, j) in profile.zeros() {
        let t_in = channel_position(EdgeId::new(l, i), partition, seq);
        let t_out = channel_position(EdgeId::new(i, j), partition, seq);
        if t_in >= t_out {
            return Ok(Feasibility::Infeasible { witness: (l, i, j) });
        }
    }
    Ok(Feasibility::Feasible)
}

fn check_shapes(
    profile: &DelayProfile,
    seq: &OperationSequence,
    partition: &EdgePartition,
) -> Result<(), ScheduleError> {
    if profile.n() != partition.n() {
        return Err(ScheduleError::NodeCount {
            got: profile.n(),
            want: partition.n(),
        });
    }
    if seq.len() != partition.len() {
        return Err(ScheduleError::SequenceLength {
            got: seq.len(),
            want: partition.len(),
        });
    }
    Ok(())
}

/// What the encoder of one edge may read in a generic slot `k`: the full
/// history of every incoming edge up to slot `k-1`, plus the same-slot
/// symbol of incoming edges whose delay entry is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeAvailability {
    pub edge: EdgeId,
    same_slot: Vec<bool>,
}

impl EdgeAvailability {
    /// May the encoder read `(l, edge.from)`'s symbol from the current slot?
    pub fn same_slot(&self, l: usize) -> bool {
        self.same_slot[l]
    }

    /// Incoming edges readable at the current slot.
    pub fn same_slot_sources(&self) -> impl Iterator<Item = usize> + '_ {
        self.same_slot
            .iter()
            .enumerate()
            .filter_map(|(l, &z)| z.then_some(l))
    }
}

/// Per-slot read permission for the encoder of `e`. Errors if the profile
/// is infeasible for the sequence; feasibility is what guarantees every
/// same-slot grant points at an earlier-firing block.
pub fn available_inputs(
    e: EdgeId,
    partition: &EdgePartition,
    seq: &OperationSequence,
    profile: &DelayProfile,
) -> Result<EdgeAvailability, ScheduleError> {
    match is_feasible(profile, seq, partition)? {
        Feasibility::Feasible => {}
        Feasibility::Infeasible { witness } => {
            return Err(ScheduleError::Infeasible { witness })
        }
    }
    Ok(availability_row(e, profile))
}

fn availability_row(e: EdgeId, profile: &DelayProfile) -> EdgeAvailability {
    let n = profile.n();
    EdgeAvailability {
        edge: e,
        same_slot: (0..n).map(|l| profile.is_zero(l, e.from, e.to)).collect(),
    }
}

/// Read permissions for every edge at once; the simulation engine's view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvailabilityMap {
    n: usize,
    rows: Vec<EdgeAvailability>,
}

impl AvailabilityMap {
    pub fn build(
        partition: &EdgePartition,
        seq: &OperationSequence,
        profile: &DelayProfile,
    ) -> Result<Self, ScheduleError> {
        match is_feasible(profile, seq, partition)? {
            Feasibility::Feasible => {}
            Feasibility::Infeasible { witness } => {
                return Err(ScheduleError::Infeasible { witness })
            }
        }
        let n = partition.n();
        Ok(AvailabilityMap {
            n,
            rows: crate::net::all_edges(n)
                .map(|e| availability_row(e, profile))
                .collect(),
        })
    }

    pub fn row(&self, e: EdgeId) -> &EdgeAvailability {
        &self.rows[e.index(self.n)]
    }
}

/// All sequences the profile is feasible with respect to, in lexicographic
/// order. Exhaustive over `alpha!` permutations, so refuses past
/// [`tol::MAX_ENUM_BLOCKS`] blocks.
pub fn feasible_sequences(
    profile: &DelayProfile,
    partition: &EdgePartition,
) -> Result<Vec<OperationSequence>, ScheduleError> {
    let alpha = partition.len();
    if alpha > tol::MAX_ENUM_BLOCKS {
        return Err(ScheduleError::TooManyBlocks(alpha));
    }
    let mut order: Vec<usize> = (0..alpha).collect();
    let mut out = Vec::new();
    loop {
        let seq = OperationSequence {
            order: order.clone(),
        };
        if is_feasible(profile, &seq, partition)?.is_feasible() {
            out.push(seq);
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(out)
}

/// Standard lexicographic next-permutation; false once wrapped.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::EdgePartition;

    fn e(from: usize, to: usize) -> EdgeId {
        EdgeId::new(from - 1, to - 1)
    }

    /// Blocks: 1 = {(1,2)}, 2 = {(2,1)}, 3 = {(1,1),(2,2)}.
    fn two_way_partition() -> EdgePartition {
        EdgePartition::new(2, vec![vec![e(1, 2)], vec![e(2, 1)], vec![e(1, 1), e(2, 2)]])
            .unwrap()
    }

    fn seq(order_1based: &[usize]) -> OperationSequence {
        OperationSequence::new(order_1based.iter().map(|b| b - 1).collect()).unwrap()
    }

    /// Only b_(1,2,1) = 0: edge (1,2) incurs no delay on (2,1).
    fn zero_121(n: usize) -> DelayProfile {
        DelayProfile::with_zeros(n, [(0, 1, 0)]).unwrap()
    }

    #[test]
    fn channel_position_follows_the_sequence() {
        let p = two_way_partition();
        assert_eq!(channel_position(e(1, 2), &p, &seq(&[1, 2, 3])), 1);
        assert_eq!(channel_position(e(1, 2), &p, &seq(&[3, 1, 2])), 2);
        assert_eq!(channel_position(e(2, 2), &p, &seq(&[1, 2, 3])), 3);
    }

    #[test]
    fn zero_delay_read_needs_the_upstream_block_first() {
        let p = two_way_partition();
        let profile = zero_121(2);
        assert_eq!(
            is_feasible(&profile, &seq(&[1, 2, 3]), &p).unwrap(),
            Feasibility::Feasible
        );
        assert_eq!(
            is_feasible(&profile, &seq(&[2, 1, 3]), &p).unwrap(),
            Feasibility::Infeasible { witness: (0, 1, 0) }
        );
    }

    #[test]
    fn positive_profile_is_feasible_for_every_sequence() {
        let p = two_way_partition();
        let profile = DelayProfile::positive(2);
        let all = feasible_sequences(&profile, &p).unwrap();
        assert_eq!(all.len(), 6); // 3! permutations, all feasible
    }

    #[test]
    fn feasible_sequences_keeps_exactly_the_orders_with_block_one_first() {
        let p = two_way_partition();
        let profile = zero_121(2);
        let good = feasible_sequences(&profile, &p).unwrap();
        let shown: Vec<String> = good.iter().map(|s| s.display()).collect();
        assert_eq!(shown, vec!["(1,2,3)", "(1,3,2)", "(3,1,2)"]);
    }

    #[test]
    fn sequence_enumeration_is_capped() {
        let p = EdgePartition::singletons(3); // 9 blocks
        let profile = DelayProfile::positive(3);
        assert_eq!(
            feasible_sequences(&profile, &p).unwrap_err(),
            ScheduleError::TooManyBlocks(9)
        );
    }

    #[test]
    fn availability_grants_exactly_the_zero_entries() {
        let p = two_way_partition();
        let profile = zero_121(2);
        let s = seq(&[1, 2, 3]);
        let row = available_inputs(e(2, 1), &p, &s, &profile).unwrap();
        assert!(row.same_slot(0)); // node 1's symbol readable same-slot
        assert!(!row.same_slot(1));
        let row = available_inputs(e(1, 2), &p, &s, &profile).unwrap();
        assert!(!row.same_slot(0) && !row.same_slot(1));
    }

    #[test]
    fn availability_refuses_infeasible_combinations() {
        let p = two_way_partition();
        let profile = zero_121(2);
        let err = available_inputs(e(2, 1), &p, &seq(&[2, 1, 3]), &profile).unwrap_err();
        assert_eq!(err, ScheduleError::Infeasible { witness: (0, 1, 0) });
    }

    #[test]
    fn positive_profile_never_grants_same_slot_reads() {
        let p = two_way_partition();
        let profile = DelayProfile::positive(2);
        let map = AvailabilityMap::build(&p, &seq(&[2, 3, 1]), &profile).unwrap();
        for edge in crate::net::all_edges(2) {
            assert_eq!(map.row(edge).same_slot_sources().count(), 0);
        }
    }

    #[test]
    fn profile_files_round_trip() {
        let profile = DelayProfile::with_zeros(4, [(0, 1, 3), (1, 2, 3)]).unwrap();
        let text = profile.write();
        assert_eq!(text, "zero 1 2 4\nzero 2 3 4\n");
        assert_eq!(DelayProfile::parse(&text, 4).unwrap(), profile);
        assert!(matches!(
            DelayProfile::parse("zero 0 1 2\n", 4),
            Err(ScheduleError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            DelayProfile::parse("zero 1 2 9\n", 4),
            Err(ScheduleError::TripleOutOfRange { .. })
        ));
    }

    #[test]
    fn witness_is_lexicographically_smallest() {
        let p = EdgePartition::singletons(2); // blocks in edge order (1,1),(1,2),(2,1),(2,2)
        // Fire (2,2) first, everything else after; two violations exist.
        let profile =
            DelayProfile::with_zeros(2, [(1, 0, 1), (0, 1, 0)]).unwrap();
        let s = OperationSequence::new(vec![3, 0, 1, 2]).unwrap();
        // (0,1,0): needs pos(0,1) < pos(1,0): 2 < 3 ok.
        // (1,0,1): needs pos(1,0) < pos(0,1): 3 < 2 violated.
        assert_eq!(
            is_feasible(&profile, &s, &p).unwrap(),
            Feasibility::Infeasible { witness: (1, 0, 1) }
        );
        // Add a smaller violating triple; it wins as witness.
        let profile =
            DelayProfile::with_zeros(2, [(1, 0, 1), (0, 1, 0), (0, 0, 0)]).unwrap();
        // (0,0,0): needs pos(0,0) < pos(0,0), never true.
        assert_eq!(
            is_feasible(&profile, &s, &p).unwrap(),
            Feasibility::Infeasible { witness: (0, 0, 0) }
        );
    }

    /// Brute-force restatement of the definition, for cross-checking.
    fn feasible_by_scan(
        profile: &DelayProfile,
        s: &OperationSequence,
        p: &EdgePartition,
    ) -> bool {
        let n = p.n();
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if profile.entry(l, i, j) == 0 {
                        let a = channel_position(EdgeId::new(l, i), p, s);
                        let b = channel_position(EdgeId::new(i, j), p, s);
                        if a >= b {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn feasibility_matches_triple_scan_on_random_profiles() {
        // Deterministic xorshift so failures reproduce.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rng = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let p = two_way_partition();
        for _ in 0..500 {
            let mut zeros = Vec::new();
            for l in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        if rng() % 3 == 0 {
                            zeros.push((l, i, j));
                        }
                    }
                }
            }
            let profile = DelayProfile::with_zeros(2, zeros).unwrap();
            let mut order = vec![0, 1, 2];
            for k in (1..order.len()).rev() {
                order.swap(k, (rng() as usize) % (k + 1));
            }
            let s = OperationSequence::new(order).unwrap();
            assert_eq!(
                is_feasible(&profile, &s, &p).unwrap().is_feasible(),
                feasible_by_scan(&profile, &s, &p)
            );
        }
    }

    #[test]
    fn dropping_zero_entries_preserves_feasibility() {
        // Monotonicity: flipping any 0 to 1 cannot break feasibility.
        let p = two_way_partition();
        let s = seq(&[1, 2, 3]);
        let full = DelayProfile::with_zeros(2, [(0, 1, 0), (0, 1, 1)]).unwrap();
        assert!(is_feasible(&full, &s, &p).unwrap().is_feasible());
        let zeros: Vec<_> = full.zeros().collect();
        for drop in 0..zeros.len() {
            let kept = zeros
                .iter()
                .enumerate()
                .filter_map(|(k, &z)| (k != drop).then_some(z));
            let sub = DelayProfile::with_zeros(2, kept).unwrap();
            assert!(is_feasible(&sub, &s, &p).unwrap().is_feasible());
        }
    }
}
