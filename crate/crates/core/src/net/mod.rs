//! Static network model.
//!
//! A network has `n` nodes and all `n*n` directed edges (self-loops
//! included). The edge set is partitioned into blocks; each block carries
//! one channel law that maps the joint input symbol on the block's edges to
//! a joint output symbol. Channels of distinct blocks are independent,
//! except for the [`ChannelModel::CoupledXor`] escape hatch used by the
//! correlated-noise demonstration scenarios.
//!
//! Node and edge indices are 0-based everywhere in this crate; `Display`
//! and the file formats are 1-based.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::tol;

pub mod format;

pub(crate) mod idx;

/// Directed edge `(from, to)`. Self-loops are ordinary edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId {
    pub from: usize,
    pub to: usize,
}

impl EdgeId {
    pub const fn new(from: usize, to: usize) -> Self {
        EdgeId { from, to }
    }

    /// Canonical position in the `n*n` edge list: `from * n + to`.
    pub fn index(self, n: usize) -> usize {
        self.from * n + self.to
    }

    pub fn in_range(self, n: usize) -> bool {
        self.from < n && self.to < n
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.from + 1, self.to + 1)
    }
}

impl FromStr for EdgeId {
    type Err = String;

    /// Parses the 1-based literal form, e.g. `(1,2)`.
    fn from_str(s: &str) -> Result<Self, String> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| format!("expected edge literal like (1,2), got {s:?}"))?;
        let mut parts = inner.split(',');
        let mut next = || -> Result<usize, String> {
            let tok = parts.next().ok_or_else(|| format!("bad edge literal {s:?}"))?;
            let v: usize = tok
                .trim()
                .parse()
                .map_err(|_| format!("bad node number {tok:?} in edge literal"))?;
            if v == 0 {
                return Err("node numbers are 1-based".into());
            }
            Ok(v - 1)
        };
        let from = next()?;
        let to = next()?;
        if parts.next().is_some() {
            return Err(format!("bad edge literal {s:?}"));
        }
        Ok(EdgeId { from, to })
    }
}

/// All `n*n` edges in canonical order.
pub fn all_edges(n: usize) -> impl Iterator<Item = EdgeId> {
    (0..n).flat_map(move |from| (0..n).map(move |to| EdgeId { from, to }))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("node count must be positive")]
    NoNodes,
    #[error("edge {0} out of range for {1} nodes")]
    EdgeOutOfRange(EdgeId, usize),
    #[error("edge {0} appears in more than one block")]
    DuplicateEdge(EdgeId),
    #[error("edge {0} is missing from the partition")]
    MissingEdge(EdgeId),
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("{got} channels supplied for {want} blocks")]
    ChannelCount { got: usize, want: usize },
    #[error("block {block}: channel is over {got} edges but the block has {want}")]
    ArityMismatch { block: usize, got: usize, want: usize },
    #[error("block {block}: a Gaussian channel occupies exactly one edge")]
    AwgnBlockNotSingleton { block: usize },
    #[error("block {block}: noise variance must be positive and finite")]
    BadSigma { block: usize },
    #[error("channel table row {row} sums to {sum} (further than {} from 1)", tol::ROW_SUM_REJECT)]
    RowSum { row: usize, sum: f64 },
    #[error("channel table entry at row {row} is negative or not finite")]
    BadEntry { row: usize },
    #[error("channel table has {entries} entries; the cap is {}", tol::TABLE_CAP)]
    TableTooLarge { entries: usize },
    #[error("channel table sizes do not match the entry count")]
    TableShape,
    #[error("block {block}: coupled reference {edge} must lie outside the block")]
    CoupledSelfReference { block: usize, edge: EdgeId },
    #[error("block {block}: coupled reference {edge} must carry a binary output")]
    CoupledRefNotBinary { block: usize, edge: EdgeId },
    #[error("coupled references form a cycle between blocks")]
    CoupledCycle,
    #[error("network mixes Gaussian and discrete channels")]
    MixedKinds,
    #[error("a Gaussian network requires power constraints")]
    MissingPower,
    #[error("power constraints given for a network with no Gaussian channels")]
    UnexpectedPower,
    #[error("power constraint for {0} must be finite and nonnegative")]
    BadPower(String),
    #[error("power constraint vector for {kind}s has length {got}, expected {want}")]
    PowerLen { kind: &'static str, got: usize, want: usize },
    #[error("demand: {0}")]
    BadDemand(String),
    #[error("probability parameter {0} is outside [0,1]")]
    BadProbability(f64),
}

/// Checks that `blocks` is a partition of the full `n*n` edge set:
/// every block nonempty, every edge in exactly one block.
pub fn validate_partition(n: usize, blocks: &[Vec<EdgeId>]) -> Result<(), NetError> {
    if n == 0 {
        return Err(NetError::NoNodes);
    }
    let mut seen = vec![false; n * n];
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(NetError::EmptyBlock(b));
        }
        for &e in block {
            if !e.in_range(n) {
                return Err(NetError::EdgeOutOfRange(e, n));
            }
            let k = e.index(n);
            if seen[k] {
                return Err(NetError::DuplicateEdge(e));
            }
            seen[k] = true;
        }
    }
    for e in all_edges(n) {
        if !seen[e.index(n)] {
            return Err(NetError::MissingEdge(e));
        }
    }
    Ok(())
}

/// An ordered partition of the edge set. Block order is the default channel
/// firing order; the edge order *within* a block fixes the axis order of
/// that block's channel table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePartition {
    n: usize,
    blocks: Vec<Vec<EdgeId>>,
}

impl EdgePartition {
    pub fn new(n: usize, blocks: Vec<Vec<EdgeId>>) -> Result<Self, NetError> {
        validate_partition(n, &blocks)?;
        Ok(EdgePartition { n, blocks })
    }

    /// The `n*n` singleton partition in canonical edge order.
    pub fn singletons(n: usize) -> Self {
        EdgePartition {
            n,
            blocks: all_edges(n).map(|e| vec![e]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<EdgeId>] {
        &self.blocks
    }

    pub fn block(&self, h: usize) -> &[EdgeId] {
        &self.blocks[h]
    }

    /// `(block, position within block)` of an edge.
    pub fn locate(&self, e: EdgeId) -> (usize, usize) {
        for (b, block) in self.blocks.iter().enumerate() {
            if let Some(p) = block.iter().position(|&x| x == e) {
                return (b, p);
            }
        }
        unreachable!("partition covers every edge");
    }
}

/// Transition table of a discrete memoryless channel over one block.
///
/// Axis order follows the block's edge list; the joint input index is
/// row-major with the first edge most significant, and likewise for
/// outputs. Each row is a probability distribution over joint outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DmcTable {
    input_sizes: Vec<usize>,
    output_sizes: Vec<usize>,
    rows: Vec<f64>,
}

impl DmcTable {
    /// Validates and stores a table. Rows are renormalized; a row whose sum
    /// is further than [`tol::ROW_SUM_REJECT`] from 1 is rejected with its
    /// row index.
    pub fn new(
        input_sizes: Vec<usize>,
        output_sizes: Vec<usize>,
        mut entries: Vec<f64>,
    ) -> Result<Self, NetError> {
        if input_sizes.is_empty()
            || input_sizes.len() != output_sizes.len()
            || input_sizes.iter().any(|&s| s == 0)
            || output_sizes.iter().any(|&s| s == 0)
        {
            return Err(NetError::TableShape);
        }
        let n_in = idx::checked_product(&input_sizes).ok_or(NetError::TableTooLarge {
            entries: usize::MAX,
        })?;
        let n_out = idx::checked_product(&output_sizes).ok_or(NetError::TableTooLarge {
            entries: usize::MAX,
        })?;
        let total = n_in
            .checked_mul(n_out)
            .ok_or(NetError::TableTooLarge { entries: usize::MAX })?;
        if total > tol::TABLE_CAP {
            return Err(NetError::TableTooLarge { entries: total });
        }
        if entries.len() != total {
            return Err(NetError::TableShape);
        }
        for x in 0..n_in {
            let row = &mut entries[x * n_out..(x + 1) * n_out];
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(NetError::BadEntry { row: x });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > tol::ROW_SUM_REJECT {
                return Err(NetError::RowSum { row: x, sum });
            }
            for p in row.iter_mut() {
                *p /= sum;
            }
        }
        Ok(DmcTable {
            input_sizes,
            output_sizes,
            rows: entries,
        })
    }

    /// Binary symmetric channel with crossover `p`, over one edge.
    pub fn bsc(p: f64) -> Result<Self, NetError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(NetError::BadProbability(p));
        }
        DmcTable::new(vec![2], vec![2], vec![1.0 - p, p, p, 1.0 - p])
    }

    /// Binary erasure channel with erasure probability `eps`; output symbol
    /// 1 is the erasure.
    pub fn bec(eps: f64) -> Result<Self, NetError> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(NetError::BadProbability(eps));
        }
        DmcTable::new(
            vec![2],
            vec![3],
            vec![1.0 - eps, eps, 0.0, 0.0, eps, 1.0 - eps],
        )
    }

    /// Channel whose output distribution ignores the (binary) input — a
    /// pure noise source. `out` is the output distribution.
    pub fn noise(out: &[f64]) -> Result<Self, NetError> {
        let mut entries = Vec::with_capacity(out.len() * 2);
        entries.extend_from_slice(out);
        entries.extend_from_slice(out);
        DmcTable::new(vec![2], vec![out.len()], entries)
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_sizes(&self) -> &[usize] {
        &self.output_sizes
    }

    /// Number of joint input symbols.
    pub fn n_inputs(&self) -> usize {
        idx::product(&self.input_sizes)
    }

    /// Number of joint output symbols.
    pub fn n_outputs(&self) -> usize {
        idx::product(&self.output_sizes)
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x * self.n_outputs() + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let w = self.n_outputs();
        &self.rows[x * w..(x + 1) * w]
    }
}

/// Channel law of one block.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// Discrete memoryless channel over the block's edges.
    Dmc(DmcTable),
    /// Additive white Gaussian noise channel over a single edge.
    Awgn { sigma2: f64 },
    /// Every edge in the block carries the one-letter alphabet `{0}`.
    Trivial,
    /// Every edge of the block outputs the same bit: the XOR of the block's
    /// (binary) inputs and of the realized same-slot outputs of the
    /// referenced earlier-firing edges. This deliberately violates
    /// cross-block independence; it exists for the correlated-noise
    /// demonstration scenarios and is rejected by the region calculators.
    CoupledXor { refs: Vec<EdgeId> },
}

impl ChannelModel {
    pub fn is_awgn(&self) -> bool {
        matches!(self, ChannelModel::Awgn { .. })
    }
}

/// Which sources exist and who must decode them. Every destination decodes
/// every source's message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticastDemand {
    sources: BTreeSet<usize>,
    destinations: BTreeSet<usize>,
}

impl MulticastDemand {
    pub fn new(
        sources: impl IntoIterator<Item = usize>,
        destinations: impl IntoIterator<Item = usize>,
    ) -> Result<Self, NetError> {
        let sources: BTreeSet<usize> = sources.into_iter().collect();
        let destinations: BTreeSet<usize> = destinations.into_iter().collect();
        if sources.is_empty() {
            return Err(NetError::BadDemand("no sources".into()));
        }
        if destinations.is_empty() {
            return Err(NetError::BadDemand("no destinations".into()));
        }
        Ok(MulticastDemand {
            sources,
            destinations,
        })
    }

    pub fn sources(&self) -> &BTreeSet<usize> {
        &self.sources
    }

    pub fn destinations(&self) -> &BTreeSet<usize> {
        &self.destinations
    }

    pub fn is_source(&self, i: usize) -> bool {
        self.sources.contains(&i)
    }

    pub fn is_destination(&self, i: usize) -> bool {
        self.destinations.contains(&i)
    }

    fn check_range(&self, n: usize) -> Result<(), NetError> {
        for &i in self.sources.iter().chain(self.destinations.iter()) {
            if i >= n {
                return Err(NetError::BadDemand(format!(
                    "node {} out of range for {} nodes",
                    i + 1,
                    n
                )));
            }
        }
        Ok(())
    }
}

/// Per-edge, per-node, and total transmit power budgets of a Gaussian
/// network. All entries are finite and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerConstraints {
    per_edge: Vec<f64>,
    per_node: Vec<f64>,
    total: f64,
}

impl PowerConstraints {
    pub fn new(n: usize, per_edge: Vec<f64>, per_node: Vec<f64>, total: f64) -> Result<Self, NetError> {
        if per_edge.len() != n * n {
            return Err(NetError::PowerLen {
                kind: "edge",
                got: per_edge.len(),
                want: n * n,
            });
        }
        if per_node.len() != n {
            return Err(NetError::PowerLen {
                kind: "node",
                got: per_node.len(),
                want: n,
            });
        }
        if !total.is_finite() || total < 0.0 {
            return Err(NetError::BadPower("total".into()));
        }
        for (k, &p) in per_edge.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(NetError::BadPower(
                    EdgeId::new(k / n, k % n).to_string(),
                ));
            }
        }
        for (i, &p) in per_node.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(NetError::BadPower(format!("node {}", i + 1)));
            }
        }
        Ok(PowerConstraints {
            per_edge,
            per_node,
            total,
        })
    }

    /// Budgets that never bind tighter than `total`.
    pub fn uniform(n: usize, total: f64) -> Result<Self, NetError> {
        PowerConstraints::new(n, vec![total; n * n], vec![total; n], total)
    }

    pub fn edge_cap(&self, e: EdgeId, n: usize) -> f64 {
        self.per_edge[e.index(n)]
    }

    pub fn node_cap(&self, i: usize) -> f64 {
        self.per_node[i]
    }

    pub fn total(&self) -> f64 {
        self.total
    }
}

/// Alphabet of a single edge's input or output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    Finite(usize),
    Real,
}

impl Alphabet {
    /// Size of a finite alphabet; panics on `Real`.
    pub fn size(self) -> usize {
        match self {
            Alphabet::Finite(s) => s,
            Alphabet::Real => panic!("continuous alphabet has no size"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkKind {
    Discrete,
    Awgn,
}

/// A validated network. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    partition: EdgePartition,
    channels: Vec<ChannelModel>,
    demand: MulticastDemand,
    power: Option<PowerConstraints>,
    kind: NetworkKind,
    // edge index -> (block, position in block)
    locate: Vec<(usize, usize)>,
}

impl Network {
    pub fn new(
        partition: EdgePartition,
        channels: Vec<ChannelModel>,
        demand: MulticastDemand,
        power: Option<PowerConstraints>,
    ) -> Result<Self, NetError> {
        let n = partition.n();
        if channels.len() != partition.len() {
            return Err(NetError::ChannelCount {
                got: channels.len(),
                want: partition.len(),
            });
        }
        demand.check_range(n)?;

        let mut locate = vec![(0usize, 0usize); n * n];
        for (b, block) in partition.blocks().iter().enumerate() {
            for (p, &e) in block.iter().enumerate() {
                locate[e.index(n)] = (b, p);
            }
        }

        let n_awgn = channels.iter().filter(|c| c.is_awgn()).count();
        let kind = if n_awgn == 0 {
            NetworkKind::Discrete
        } else if n_awgn == channels.len() {
            NetworkKind::Awgn
        } else {
            return Err(NetError::MixedKinds);
        };

        for (b, (block, ch)) in partition.blocks().iter().zip(&channels).enumerate() {
            match ch {
                ChannelModel::Dmc(t) => {
                    if t.input_sizes().len() != block.len() {
                        return Err(NetError::ArityMismatch {
                            block: b,
                            got: t.input_sizes().len(),
                            want: block.len(),
                        });
                    }
                }
                ChannelModel::Awgn { sigma2 } => {
                    if block.len() != 1 {
                        return Err(NetError::AwgnBlockNotSingleton { block: b });
                    }
                    if !sigma2.is_finite() || *sigma2 <= 0.0 {
                        return Err(NetError::BadSigma { block: b });
                    }
                }
                ChannelModel::Trivial => {}
                ChannelModel::CoupledXor { refs } => {
                    for &r in refs {
                        if !r.in_range(n) {
                            return Err(NetError::EdgeOutOfRange(r, n));
                        }
                        let (rb, rp) = locate[r.index(n)];
                        if rb == b {
                            return Err(NetError::CoupledSelfReference { block: b, edge: r });
                        }
                        let out_ok = match &channels[rb] {
                            ChannelModel::Dmc(t) => t.output_sizes()[rp] == 2,
                            ChannelModel::CoupledXor { .. } => true,
                            _ => false,
                        };
                        if !out_ok {
                            return Err(NetError::CoupledRefNotBinary { block: b, edge: r });
                        }
                    }
                }
            }
        }

        // Coupled references must admit *some* firing order: the block-level
        // dependency relation has to be acyclic.
        let alpha = channels.len();
        let mut deps: Vec<Vec<usize>> = vec![Vec::new(); alpha];
        for (b, ch) in channels.iter().enumerate() {
            if let ChannelModel::CoupledXor { refs } = ch {
                for &r in refs {
                    deps[b].push(locate[r.index(n)].0);
                }
            }
        }
        let mut state = vec![0u8; alpha]; // 0 unvisited, 1 on stack, 2 done
        fn visit(b: usize, deps: &[Vec<usize>], state: &mut [u8]) -> bool {
            if state[b] == 1 {
                return false;
            }
            if state[b] == 2 {
                return true;
            }
            state[b] = 1;
            for &d in &deps[b] {
                if !visit(d, deps, state) {
                    return false;
                }
            }
            state[b] = 2;
            true
        }
        for b in 0..alpha {
            if !visit(b, &deps, &mut state) {
                return Err(NetError::CoupledCycle);
            }
        }

        match (kind, &power) {
            (NetworkKind::Awgn, None) => return Err(NetError::MissingPower),
            (NetworkKind::Discrete, Some(_)) => return Err(NetError::UnexpectedPower),
            _ => {}
        }
        if let Some(p) = &power {
            // re-run length checks against this network's n
            PowerConstraints::new(n, p.per_edge.clone(), p.per_node.clone(), p.total)?;
        }

        Ok(Network {
            partition,
            channels,
            demand,
            power,
            kind,
            locate,
        })
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }

    /// Number of blocks.
    pub fn alpha(&self) -> usize {
        self.partition.len()
    }

    pub fn partition(&self) -> &EdgePartition {
        &self.partition
    }

    pub fn channels(&self) -> &[ChannelModel] {
        &self.channels
    }

    pub fn channel(&self, block: usize) -> &ChannelModel {
        &self.channels[block]
    }

    pub fn demand(&self) -> &MulticastDemand {
        &self.demand
    }

    pub fn power(&self) -> Option<&PowerConstraints> {
        self.power.as_ref()
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    /// Block containing an edge.
    pub fn block_of(&self, e: EdgeId) -> usize {
        self.locate[e.index(self.n())].0
    }

    /// `(block, position within block)` of an edge.
    pub fn locate(&self, e: EdgeId) -> (usize, usize) {
        self.locate[e.index(self.n())]
    }

    pub fn input_alphabet(&self, e: EdgeId) -> Alphabet {
        let (b, p) = self.locate(e);
        match &self.channels[b] {
            ChannelModel::Dmc(t) => Alphabet::Finite(t.input_sizes()[p]),
            ChannelModel::Awgn { .. } => Alphabet::Real,
            ChannelModel::Trivial => Alphabet::Finite(1),
            ChannelModel::CoupledXor { .. } => Alphabet::Finite(2),
        }
    }

    pub fn output_alphabet(&self, e: EdgeId) -> Alphabet {
        let (b, p) = self.locate(e);
        match &self.channels[b] {
            ChannelModel::Dmc(t) => Alphabet::Finite(t.output_sizes()[p]),
            ChannelModel::Awgn { .. } => Alphabet::Real,
            ChannelModel::Trivial => Alphabet::Finite(1),
            ChannelModel::CoupledXor { .. } => Alphabet::Finite(2),
        }
    }

    /// Noise variance of a Gaussian edge; `None` on discrete networks.
    pub fn sigma2(&self, e: EdgeId) -> Option<f64> {
        match self.channels[self.block_of(e)] {
            ChannelModel::Awgn { sigma2 } => Some(sigma2),
            _ => None,
        }
    }

    /// True when some block is a [`ChannelModel::CoupledXor`], i.e. the
    /// network is outside the independent-channels class.
    pub fn has_coupling(&self) -> bool {
        self.channels
            .iter()
            .any(|c| matches!(c, ChannelModel::CoupledXor { .. }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(from: usize, to: usize) -> EdgeId {
        EdgeId::new(from - 1, to - 1) // tests speak 1-based like the files
    }

    fn two_way_bsc_blocks() -> Vec<Vec<EdgeId>> {
        vec![vec![e(1, 2)], vec![e(2, 1)], vec![e(1, 1), e(2, 2)]]
    }

    #[test]
    fn partition_of_two_nodes_into_three_blocks_is_valid() {
        assert_eq!(validate_partition(2, &two_way_bsc_blocks()), Ok(()));
    }

    #[test]
    fn partition_missing_a_self_loop_names_it() {
        let blocks = vec![vec![e(1, 2)], vec![e(2, 1)], vec![e(1, 1)]];
        assert_eq!(
            validate_partition(2, &blocks),
            Err(NetError::MissingEdge(e(2, 2)))
        );
    }

    #[test]
    fn partition_with_duplicate_edge_names_it() {
        let blocks = vec![vec![e(1, 2)], vec![e(2, 1), e(1, 2)], vec![e(1, 1), e(2, 2)]];
        assert_eq!(
            validate_partition(2, &blocks),
            Err(NetError::DuplicateEdge(e(1, 2)))
        );
    }

    #[test]
    fn partition_rejects_empty_block_and_out_of_range_edge() {
        assert_eq!(
            validate_partition(2, &[vec![]]),
            Err(NetError::EmptyBlock(0))
        );
        assert_eq!(
            validate_partition(2, &[vec![e(1, 3)]]),
            Err(NetError::EdgeOutOfRange(e(1, 3), 2))
        );
    }

    #[test]
    fn dmc_row_sum_far_from_one_is_rejected_with_row_index() {
        let err = DmcTable::new(vec![2], vec![2], vec![0.25, 0.25, 0.5, 0.5]).unwrap_err();
        assert!(matches!(err, NetError::RowSum { row: 0, .. }), "{err:?}");
    }

    #[test]
    fn dmc_rows_are_renormalized_within_float_noise() {
        // Off by 1e-10: accepted and renormalized.
        let t = DmcTable::new(vec![2], vec![2], vec![0.9 + 1e-10, 0.1, 0.1, 0.9]).unwrap();
        for x in 0..2 {
            let s: f64 = t.row(x).iter().sum();
            assert!((s - 1.0).abs() <= crate::tol::ROW_SUM_NORMALIZED);
        }
    }

    #[test]
    fn dmc_table_cap_is_enforced() {
        // 2^11 x 2^11 joint table = 2^22 entries, over the cap.
        let err = DmcTable::new(vec![1 << 11], vec![1 << 11], vec![]).unwrap_err();
        assert!(matches!(err, NetError::TableTooLarge { .. }));
    }

    fn bsc_if_network(p: f64, q: f64) -> Network {
        let partition = EdgePartition::new(2, two_way_bsc_blocks()).unwrap();
        let channels = vec![
            ChannelModel::Dmc(DmcTable::bsc(p).unwrap()),
            ChannelModel::Dmc(DmcTable::bsc(q).unwrap()),
            ChannelModel::Trivial,
        ];
        let demand = MulticastDemand::new([0, 1], [0, 1]).unwrap();
        Network::new(partition, channels, demand, None).unwrap()
    }

    #[test]
    fn two_node_exchange_network_builds_with_three_blocks() {
        let net = bsc_if_network(0.1, 0.1);
        assert_eq!(net.alpha(), 3);
        assert_eq!(net.kind(), NetworkKind::Discrete);
        assert_eq!(net.input_alphabet(e(1, 2)), Alphabet::Finite(2));
        assert_eq!(net.output_alphabet(e(1, 1)), Alphabet::Finite(1));
        assert_eq!(net.block_of(e(2, 2)), 2);
    }

    #[test]
    fn singleton_partition_covers_all_sixteen_edges() {
        let p = EdgePartition::singletons(4);
        assert_eq!(p.len(), 16);
        assert_eq!(p.locate(e(2, 4)), (e(2, 4).index(4), 0));
    }

    #[test]
    fn channel_count_mismatch_is_rejected() {
        let partition = EdgePartition::new(2, two_way_bsc_blocks()).unwrap();
        let demand = MulticastDemand::new([0], [1]).unwrap();
        let err = Network::new(
            partition,
            vec![ChannelModel::Trivial; 2],
            demand,
            None,
        )
        .unwrap_err();
        assert_eq!(err, NetError::ChannelCount { got: 2, want: 3 });
    }

    #[test]
    fn awgn_requires_power_and_purity() {
        let partition = EdgePartition::singletons(2);
        let channels = vec![ChannelModel::Awgn { sigma2: 1.0 }; 4];
        let demand = MulticastDemand::new([0], [1]).unwrap();
        let err = Network::new(partition.clone(), channels.clone(), demand.clone(), None)
            .unwrap_err();
        assert_eq!(err, NetError::MissingPower);

        let mut mixed = channels.clone();
        mixed[3] = ChannelModel::Trivial;
        let err = Network::new(partition.clone(), mixed, demand.clone(), None).unwrap_err();
        assert_eq!(err, NetError::MixedKinds);

        let power = PowerConstraints::uniform(2, 4.0).unwrap();
        let net = Network::new(partition, channels, demand, Some(power)).unwrap();
        assert_eq!(net.kind(), NetworkKind::Awgn);
        assert_eq!(net.sigma2(e(1, 2)), Some(1.0));
    }

    #[test]
    fn coupled_reference_inside_own_block_is_rejected() {
        let partition = EdgePartition::new(
            2,
            vec![vec![e(1, 2), e(2, 1)], vec![e(1, 1), e(2, 2)]],
        )
        .unwrap();
        let channels = vec![
            ChannelModel::CoupledXor { refs: vec![e(2, 1)] },
            ChannelModel::Trivial,
        ];
        let demand = MulticastDemand::new([0], [1]).unwrap();
        let err = Network::new(partition, channels, demand, None).unwrap_err();
        assert_eq!(
            err,
            NetError::CoupledSelfReference {
                block: 0,
                edge: e(2, 1)
            }
        );
    }

    #[test]
    fn coupled_cycle_between_blocks_is_rejected() {
        let partition = EdgePartition::new(
            2,
            vec![vec![e(1, 2)], vec![e(2, 1)], vec![e(1, 1), e(2, 2)]],
        )
        .unwrap();
        let channels = vec![
            ChannelModel::CoupledXor { refs: vec![e(2, 1)] },
            ChannelModel::CoupledXor { refs: vec![e(1, 2)] },
            ChannelModel::Trivial,
        ];
        let demand = MulticastDemand::new([0], [1]).unwrap();
        let err = Network::new(partition, channels, demand, None).unwrap_err();
        assert_eq!(err, NetError::CoupledCycle);
    }

    #[test]
    fn edge_literals_round_trip() {
        let edge: EdgeId = "(1,2)".parse().unwrap();
        assert_eq!(edge, e(1, 2));
        assert_eq!(edge.to_string(), "(1,2)");
        assert!("(0,2)".parse::<EdgeId>().is_err());
        assert!("1,2".parse::<EdgeId>().is_err());
    }
}
