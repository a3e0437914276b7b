//! Slot-by-slot Monte-Carlo execution of a code on a network.
//!
//! Each slot fires the blocks in sequence order; encoders see exactly the
//! receptions the delay profile grants them (anything else is a
//! [`SandboxViolation`]), channels draw from their laws, and when the slots
//! run out every destination decodes. Trials are independent, each on its
//! own random stream, so reports are bit-identical regardless of how the
//! trials were scheduled across threads.

mod code;
mod empirical;
mod rng;
mod scenario;

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::net::{idx, Alphabet, ChannelModel, EdgeId, Network};
use crate::schedule::{AvailabilityMap, DelayProfile, EdgeAvailability, OperationSequence, ScheduleError};
use crate::tol;

pub use code::{code_names, codes_for_scenario, lookup_code, CodePlugin};
pub use empirical::{empirical_mi_from_counts, empirical_mi_from_pairs, MiEstimate};
pub use rng::TrialRng;
pub use scenario::{builtin_scenario, scenario_names, Scenario, ScenarioError};

/// One channel use on one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sym {
    /// Letter of a finite alphabet.
    Discrete(u32),
    /// Point on the real line (Gaussian edges).
    Real(f64),
}

impl Sym {
    pub fn discrete(self) -> Option<u32> {
        match self {
            Sym::Discrete(v) => Some(v),
            Sym::Real(_) => None,
        }
    }

    pub fn real(self) -> Option<f64> {
        match self {
            Sym::Discrete(_) => None,
            Sym::Real(x) => Some(x),
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Discrete(v) => write!(f, "{v}"),
            Sym::Real(x) => write!(f, "{x}"),
        }
    }
}

/// A node's message: `bits()[k]` is bit `k`, the first one sent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MessageBits {
    bits: Vec<bool>,
}

impl MessageBits {
    pub fn zeros(len: usize) -> Self {
        MessageBits {
            bits: vec![false; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        MessageBits { bits }
    }

    pub fn random(rng: &mut TrialRng, len: usize) -> Self {
        MessageBits {
            bits: (0..len).map(|_| rng.bit()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// An encoder read outside what the delay profile grants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SandboxViolation {
    /// Edge whose encoder made the read.
    pub encoder: EdgeId,
    /// Slot it was encoding.
    pub slot: usize,
    /// Edge it asked for.
    pub requested: EdgeId,
    /// Slot it asked for.
    pub requested_slot: usize,
}

impl fmt::Display for SandboxViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "encoder of {} at slot {} may not read {} at slot {}",
            self.encoder, self.slot, self.requested, self.requested_slot
        )
    }
}

/// What an encoder may see while producing its slot-`t` symbol: the full
/// history of its node's incoming edges up to slot `t-1`, plus the
/// same-slot symbol of edges with a zero-delay grant. Every read goes
/// through [`RecvView::read`], which refuses anything else.
pub struct RecvView<'a> {
    n: usize,
    edge: EdgeId,
    slot: usize,
    avail: &'a EdgeAvailability,
    received: &'a [Vec<Sym>],
}

impl RecvView<'_> {
    /// Edge being encoded.
    pub fn edge(&self) -> EdgeId {
        self.edge
    }

    /// Slot being encoded, 1-based.
    pub fn slot(&self) -> usize {
        self.slot
    }

    /// Incoming edges whose current-slot symbol is readable.
    pub fn same_slot_sources(&self) -> impl Iterator<Item = usize> + '_ {
        self.avail.same_slot_sources()
    }

    /// The symbol received on `(l, from)` at slot `s` (1-based).
    pub fn read(&self, l: usize, s: usize) -> Result<Sym, SandboxViolation> {
        let node = self.edge.from;
        let deny = SandboxViolation {
            encoder: self.edge,
            slot: self.slot,
            requested: EdgeId::new(l, node),
            requested_slot: s,
        };
        if l >= self.n || s == 0 || s > self.slot {
            return Err(deny);
        }
        if s == self.slot && !self.avail.same_slot(l) {
            return Err(deny);
        }
        let hist = &self.received[EdgeId::new(l, node).index(self.n)];
        match hist.get(s - 1) {
            Some(&sym) => Ok(sym),
            // Feasibility makes every same-slot grant point at a block
            // that already fired.
            None => unreachable!("granted read of an unfired block"),
        }
    }
}

/// A destination's full view at decode time: everything its node received
/// over all slots. Decoders are not sandboxed beyond their own node.
pub struct NodeView<'a> {
    n: usize,
    node: usize,
    slots: usize,
    received: &'a [Vec<Sym>],
}

impl NodeView<'_> {
    pub fn node(&self) -> usize {
        self.node
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    /// The symbol received on `(l, node)` at slot `s` (1-based).
    pub fn read(&self, l: usize, s: usize) -> Sym {
        assert!(
            l < self.n && (1..=self.slots).contains(&s),
            "decoder read ({l}, {s}) out of range"
        );
        self.received[EdgeId::new(l, self.node).index(self.n)][s - 1]
    }

    /// Everything received on `(l, node)`, slot order.
    pub fn received_from(&self, l: usize) -> &[Sym] {
        &self.received[EdgeId::new(l, self.node).index(self.n)]
    }
}

/// Ask the run to estimate `I(message of source ; symbol on edge)`, pairing
/// message bit `k` with the edge's slot-`k+1` output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MiProbe {
    pub source: usize,
    pub edge: EdgeId,
}

/// Triples `(previous output, input, output)` counted on one discrete
/// edge, for checking the channel forgets the past given its input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelStats {
    pub edge: EdgeId,
    pub in_size: usize,
    pub out_size: usize,
    counts: Vec<u64>,
}

impl ChannelStats {
    pub fn count(&self, prev: usize, x: usize, y: usize) -> u64 {
        self.counts[(prev * self.in_size + x) * self.out_size + y]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub slots: usize,
    pub trials: u64,
    pub seed: u64,
    pub probe: Option<MiProbe>,
    /// Collect `(prev output, input, output)` counts on this edge.
    pub stats_edge: Option<EdgeId>,
}

impl SimConfig {
    pub fn new(slots: usize, trials: u64, seed: u64) -> Self {
        SimConfig {
            slots,
            trials,
            seed,
            probe: None,
            stats_edge: None,
        }
    }
}

/// Outcome of a run. Bit-identical for identical configs, whatever the
/// thread count.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub trials: u64,
    pub slots: usize,
    pub seed: u64,
    /// Message length per node, bits.
    pub message_bits: Vec<usize>,
    /// `message_bits / slots`, per node.
    pub rates: Vec<f64>,
    /// Trials in which some destination missed some message.
    pub error_trials: u64,
    pub p_err: f64,
    /// Error trials per `(source, destination)`, both ascending.
    pub pair_errors: Vec<((usize, usize), u64)>,
    pub mi: Option<MiEstimate>,
    /// Mean square input per edge (Gaussian networks only).
    pub avg_power: Option<Vec<f64>>,
    /// Whether the measured powers respect the network's budgets.
    pub power_ok: bool,
    pub stats: Option<ChannelStats>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("{0}")]
    Sandbox(SandboxViolation),
    #[error("need at least one slot and one trial")]
    EmptyRun,
    #[error("sequence covers {got} blocks, the partition has {want}")]
    SeqLen { got: usize, want: usize },
    #[error("code assigned {got} message lengths for {want} nodes")]
    MessageLen { got: usize, want: usize },
    #[error("node {} is not a source but was assigned {bits} message bits", .node + 1)]
    NonSourceMessage { node: usize, bits: usize },
    #[error("code sent {got} on {edge} at slot {slot}; the channel takes {want}")]
    BadSymbol {
        edge: EdgeId,
        slot: usize,
        got: String,
        want: String,
    },
    #[error("probe source {} carries no message bits", .0 + 1)]
    ProbeNoBits(usize),
    #[error("{0} does not carry a finite alphabet")]
    NeedsDiscrete(EdgeId),
    #[error("block {} reads same-slot symbols from block {}, which fires later", .block + 1, .dep + 1)]
    CoupledOrder { block: usize, dep: usize },
    #[error("decoder at node {} returned {got} messages for {want} sources", .node + 1)]
    DecodeShape { node: usize, got: usize, want: usize },
    #[error("too few paired samples: {got} (need at least {min})")]
    TooFewSamples { got: u64, min: u64 },
}

struct TrialOutcome {
    any_error: bool,
    pair_errs: Vec<bool>,
    probe_counts: Vec<u64>,
    power_sum: Vec<f64>,
    stats_counts: Vec<u64>,
}

struct RunPlan<'a> {
    net: &'a Network,
    seq: &'a OperationSequence,
    avail: AvailabilityMap,
    bits: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    probe_len: usize,
    probe_out: usize,
    stats_in: usize,
    stats_out: usize,
    gaussian: bool,
}

/// Run `code` on `net` under `seq` and `profile` for `cfg.trials`
/// independent trials of `cfg.slots` slots each.
pub fn simulate(
    net: &Network,
    seq: &OperationSequence,
    profile: &DelayProfile,
    code: &dyn CodePlugin,
    cfg: &SimConfig,
) -> Result<SimReport, SimError> {
    let plan = preflight(net, seq, profile, code, cfg)?;

    let outcomes: Vec<Result<TrialOutcome, SimError>> = (0..cfg.trials)
        .into_par_iter()
        .map(|k| run_trial(&plan, code, cfg, k))
        .collect();

    // First error by trial index, so failures are deterministic too.
    let mut merged = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        merged.push(o?);
    }

    let mut error_trials = 0u64;
    let mut pair_counts = vec![0u64; plan.pairs.len()];
    let mut probe_counts = vec![0u64; 2 * plan.probe_out];
    let mut power_sum = vec![0.0; if plan.gaussian { net.n() * net.n() } else { 0 }];
    let mut stats_counts = vec![0u64; plan.stats_out * plan.stats_in * plan.stats_out];
    for o in &merged {
        error_trials += o.any_error as u64;
        for (c, &e) in pair_counts.iter_mut().zip(&o.pair_errs) {
            *c += e as u64;
        }
        for (c, &v) in probe_counts.iter_mut().zip(&o.probe_counts) {
            *c += v;
        }
        for (c, &v) in power_sum.iter_mut().zip(&o.power_sum) {
            *c += v;
        }
        for (c, &v) in stats_counts.iter_mut().zip(&o.stats_counts) {
            *c += v;
        }
    }

    let mi = match &cfg.probe {
        Some(_) => Some(empirical_mi_from_counts(&probe_counts, 2, plan.probe_out)?),
        None => None,
    };

    let uses = (cfg.trials * cfg.slots as u64) as f64;
    let (avg_power, power_ok) = if plan.gaussian {
        let avg: Vec<f64> = power_sum.iter().map(|&s| s / uses).collect();
        (Some(avg.clone()), powers_within_budget(net, &avg))
    } else {
        (None, true)
    };

    let stats = cfg.stats_edge.map(|edge| ChannelStats {
        edge,
        in_size: plan.stats_in,
        out_size: plan.stats_out,
        counts: stats_counts,
    });

    Ok(SimReport {
        trials: cfg.trials,
        slots: cfg.slots,
        seed: cfg.seed,
        rates: plan
            .bits
            .iter()
            .map(|&b| b as f64 / cfg.slots as f64)
            .collect(),
        message_bits: plan.bits,
        error_trials,
        p_err: error_trials as f64 / cfg.trials as f64,
        pair_errors: plan.pairs.into_iter().zip(pair_counts).collect(),
        mi,
        avg_power,
        power_ok,
        stats,
    })
}

fn preflight<'a>(
    net: &'a Network,
    seq: &'a OperationSequence,
    profile: &DelayProfile,
    code: &dyn CodePlugin,
    cfg: &SimConfig,
) -> Result<RunPlan<'a>, SimError> {
    if cfg.slots == 0 || cfg.trials == 0 {
        return Err(SimError::EmptyRun);
    }
    if seq.len() != net.alpha() {
        return Err(SimError::SeqLen {
            got: seq.len(),
            want: net.alpha(),
        });
    }
    let avail = AvailabilityMap::build(net.partition(), seq, profile)?;

    // A coupled block's referenced edges must be realized by the time it
    // fires, every slot.
    for (h, ch) in net.channels().iter().enumerate() {
        if let ChannelModel::CoupledXor { refs } = ch {
            for &r in refs {
                let dep = net.block_of(r);
                if seq.position_of_block(dep) >= seq.position_of_block(h) {
                    return Err(SimError::CoupledOrder { block: h, dep });
                }
            }
        }
    }

    let n = net.n();
    let bits = code.message_bits(net, cfg.slots);
    if bits.len() != n {
        return Err(SimError::MessageLen {
            got: bits.len(),
            want: n,
        });
    }
    for (i, &b) in bits.iter().enumerate() {
        if b > 0 && !net.demand().is_source(i) {
            return Err(SimError::NonSourceMessage { node: i, bits: b });
        }
    }

    let demand = net.demand();
    let pairs: Vec<(usize, usize)> = demand
        .sources()
        .iter()
        .flat_map(|&s| demand.destinations().iter().map(move |&d| (s, d)))
        .collect();

    let (probe_len, probe_out) = match &cfg.probe {
        Some(p) => {
            if p.source >= n || bits[p.source] == 0 {
                return Err(SimError::ProbeNoBits(p.source));
            }
            if !p.edge.in_range(n) {
                return Err(SimError::NeedsDiscrete(p.edge));
            }
            let out = match net.output_alphabet(p.edge) {
                Alphabet::Finite(k) => k,
                Alphabet::Real => return Err(SimError::NeedsDiscrete(p.edge)),
            };
            let len = cfg.slots.min(bits[p.source]);
            let samples = cfg.trials * len as u64;
            if samples < tol::MIN_MI_SAMPLES {
                return Err(SimError::TooFewSamples {
                    got: samples,
                    min: tol::MIN_MI_SAMPLES,
                });
            }
            (len, out)
        }
        None => (0, 0),
    };

    let (stats_in, stats_out) = match cfg.stats_edge {
        Some(e) => {
            if !e.in_range(n) {
                return Err(SimError::NeedsDiscrete(e));
            }
            match (net.input_alphabet(e), net.output_alphabet(e)) {
                (Alphabet::Finite(a), Alphabet::Finite(b)) => (a, b),
                _ => return Err(SimError::NeedsDiscrete(e)),
            }
        }
        None => (0, 0),
    };

    Ok(RunPlan {
        net,
        seq,
        avail,
        bits,
        pairs,
        probe_len,
        probe_out,
        stats_in,
        stats_out,
        gaussian: net.channels().iter().any(ChannelModel::is_awgn),
    })
}

fn run_trial(
    plan: &RunPlan,
    code: &dyn CodePlugin,
    cfg: &SimConfig,
    trial: u64,
) -> Result<TrialOutcome, SimError> {
    let net = plan.net;
    let n = net.n();
    let mut rng = TrialRng::new(cfg.seed, trial);
    let msgs: Vec<MessageBits> = plan
        .bits
        .iter()
        .map(|&b| MessageBits::random(&mut rng, b))
        .collect();

    let mut received: Vec<Vec<Sym>> = vec![Vec::with_capacity(cfg.slots); n * n];
    let mut power_sum = vec![0.0; if plan.gaussian { n * n } else { 0 }];
    let mut stats_counts = vec![0u64; plan.stats_out * plan.stats_in * plan.stats_out];
    let mut stats_prev: Option<u32> = None;
    let mut xs: Vec<u32> = Vec::new();

    for t in 1..=cfg.slots {
        let mut stats_x: Option<u32> = None;
        for &h in plan.seq.order() {
            let block = net.partition().block(h);
            match net.channel(h) {
                ChannelModel::Trivial => {
                    for &e in block {
                        received[e.index(n)].push(Sym::Discrete(0));
                        if cfg.stats_edge == Some(e) {
                            stats_x = Some(0);
                        }
                    }
                }
                ChannelModel::Dmc(table) => {
                    xs.clear();
                    for (pos, &e) in block.iter().enumerate() {
                        let sym = encode_edge(plan, code, &received, &msgs, e, t)?;
                        let want = table.input_sizes()[pos];
                        xs.push(expect_letter(sym, want, e, t)?);
                        if cfg.stats_edge == Some(e) {
                            stats_x = Some(xs[pos]);
                        }
                    }
                    let digits: Vec<usize> = xs.iter().map(|&v| v as usize).collect();
                    let x_flat = idx::index_of(&digits, table.input_sizes());
                    let y_flat = sample_row(table.row(x_flat), rng.unit());
                    let y_digits = idx::digits_of(y_flat, table.output_sizes());
                    for (&e, &y) in block.iter().zip(&y_digits) {
                        received[e.index(n)].push(Sym::Discrete(y as u32));
                    }
                }
                ChannelModel::CoupledXor { refs } => {
                    let mut bit = 0u32;
                    for &e in block {
                        let sym = encode_edge(plan, code, &received, &msgs, e, t)?;
                        let v = expect_letter(sym, 2, e, t)?;
                        bit ^= v;
                        if cfg.stats_edge == Some(e) {
                            stats_x = Some(v);
                        }
                    }
                    for &r in refs {
                        // Realized this slot; preflight checked the order.
                        let y = received[r.index(n)][t - 1];
                        bit ^= y.discrete().expect("coupled refs are discrete");
                    }
                    for &e in block {
                        received[e.index(n)].push(Sym::Discrete(bit));
                    }
                }
                ChannelModel::Awgn { sigma2 } => {
                    let e = block[0];
                    let sym = encode_edge(plan, code, &received, &msgs, e, t)?;
                    let x = match sym {
                        Sym::Real(x) if x.is_finite() => x,
                        other => {
                            return Err(SimError::BadSymbol {
                                edge: e,
                                slot: t,
                                got: other.to_string(),
                                want: "a finite real value".into(),
                            })
                        }
                    };
                    power_sum[e.index(n)] += x * x;
                    let y = x + sigma2.sqrt() * rng.gaussian();
                    received[e.index(n)].push(Sym::Real(y));
                }
            }
        }
        if let Some(se) = cfg.stats_edge {
            let y = received[se.index(n)][t - 1]
                .discrete()
                .expect("stats edge is discrete");
            if let Some(prev) = stats_prev {
                let x = stats_x.expect("stats edge fired this slot");
                let k = (prev as usize * plan.stats_in + x as usize) * plan.stats_out
                    + y as usize;
                stats_counts[k] += 1;
            }
            stats_prev = Some(y);
        }
    }

    let demand = net.demand();
    let n_dests = demand.destinations().len();
    let mut pair_errs = vec![false; plan.pairs.len()];
    let mut any_error = false;
    for (di, &d) in demand.destinations().iter().enumerate() {
        let view = NodeView {
            n,
            node: d,
            slots: cfg.slots,
            received: &received,
        };
        let decoded = code.decode(net, d, &msgs[d], &view, cfg.slots);
        if decoded.len() != demand.sources().len() {
            return Err(SimError::DecodeShape {
                node: d,
                got: decoded.len(),
                want: demand.sources().len(),
            });
        }
        for (si, &src) in demand.sources().iter().enumerate() {
            if decoded[si] != msgs[src] {
                any_error = true;
                pair_errs[si * n_dests + di] = true;
            }
        }
    }

    let mut probe_counts = vec![0u64; 2 * plan.probe_out];
    if let Some(p) = &cfg.probe {
        for s in 1..=plan.probe_len {
            let bit = msgs[p.source].bit(s - 1) as usize;
            let sym = received[p.edge.index(n)][s - 1]
                .discrete()
                .expect("probe edge is discrete") as usize;
            probe_counts[bit * plan.probe_out + sym] += 1;
        }
    }

    Ok(TrialOutcome {
        any_error,
        pair_errs,
        probe_counts,
        power_sum,
        stats_counts,
    })
}

fn encode_edge(
    plan: &RunPlan,
    code: &dyn CodePlugin,
    received: &[Vec<Sym>],
    msgs: &[MessageBits],
    e: EdgeId,
    t: usize,
) -> Result<Sym, SimError> {
    let rx = RecvView {
        n: plan.net.n(),
        edge: e,
        slot: t,
        avail: plan.avail.row(e),
        received,
    };
    code.encode(plan.net, e, t, &msgs[e.from], &rx)
        .map_err(SimError::Sandbox)
}

fn expect_letter(sym: Sym, want: usize, e: EdgeId, t: usize) -> Result<u32, SimError> {
    match sym {
        Sym::Discrete(v) if (v as usize) < want => Ok(v),
        other => Err(SimError::BadSymbol {
            edge: e,
            slot: t,
            got: other.to_string(),
            want: format!("a letter below {want}"),
        }),
    }
}

/// Inverse-CDF draw from one table row. `u` is uniform in `[0, 1)`; rows
/// are normalized, so the scan cannot fall off the end.
fn sample_row(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (y, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return y;
        }
    }
    row.len() - 1
}

fn powers_within_budget(net: &Network, avg: &[f64]) -> bool {
    let Some(pc) = net.power() else {
        return true;
    };
    let n = net.n();
    let slop = |cap: f64| cap + 1e-9 * (1.0 + cap);
    let mut node_sum = vec![0.0; n];
    let mut total = 0.0;
    for e in crate::net::all_edges(n) {
        let s = avg[e.index(n)];
        if s > slop(pc.edge_cap(e, n)) {
            return false;
        }
        node_sum[e.from] += s;
        total += s;
    }
    if node_sum
        .iter()
        .enumerate()
        .any(|(i, &s)| s > slop(pc.node_cap(i)))
    {
        return false;
    }
    total <= slop(pc.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::DmcTable;
    use crate::schedule::Feasibility;

    fn trn_cn() -> Scenario {
        builtin_scenario("trn_cn").unwrap()
    }

    #[test]
    fn cancellation_code_is_error_free_at_rate_one() {
        let sc = trn_cn();
        let code = lookup_code("cancel_forward").unwrap();
        let cfg = SimConfig::new(200, 10, 11);
        let rep = simulate(&sc.net, &sc.seq, &sc.profile, code.as_ref(), &cfg).unwrap();
        assert_eq!(rep.error_trials, 0);
        assert_eq!(rep.p_err, 0.0);
        assert_eq!(rep.rates, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(rep.pair_errors, vec![((0, 3), 0)]);
    }

    #[test]
    fn delayed_reads_destroy_the_cancellation() {
        let sc = trn_cn();
        let positive = DelayProfile::positive(4);
        let code = lookup_code("cancel_delayed").unwrap();
        let mut cfg = SimConfig::new(2000, 2, 11);
        cfg.probe = Some(MiProbe {
            source: 0,
            edge: EdgeId::new(0, 3),
        });
        let rep = simulate(&sc.net, &sc.seq, &positive, code.as_ref(), &cfg).unwrap();
        assert_eq!(rep.p_err, 1.0);
        let mi = rep.mi.unwrap();
        assert!(mi.mi < 0.01, "leaked {} bits", mi.mi);

        // With the zero-delay grants back, the same probe sees the full bit.
        let fwd = lookup_code("cancel_forward").unwrap();
        let rep = simulate(&sc.net, &sc.seq, &sc.profile, fwd.as_ref(), &cfg).unwrap();
        assert!(rep.mi.unwrap().mi > 0.99);
    }

    #[test]
    fn same_slot_probe_is_caught_and_named() {
        let sc = trn_cn();
        let code = lookup_code("same_slot_probe").unwrap();
        let cfg = SimConfig::new(10, 3, 0);
        let err = simulate(&sc.net, &sc.seq, &sc.profile, code.as_ref(), &cfg).unwrap_err();
        let SimError::Sandbox(v) = err else {
            panic!("wanted a sandbox violation, got {err}");
        };
        // First encoder to fire is (1,2); it asked for its own node's
        // self-loop at the current slot without a grant.
        assert_eq!(v.encoder, EdgeId::new(0, 1));
        assert_eq!(v.slot, 1);
        assert_eq!(v.requested, EdgeId::new(0, 0));
        assert_eq!(v.requested_slot, 1);
        assert_eq!(
            v.to_string(),
            "encoder of (1,2) at slot 1 may not read (1,1) at slot 1"
        );
    }

    #[test]
    fn reports_are_identical_across_thread_counts() {
        let sc = builtin_scenario("bsc_if(0.11,0.05)").unwrap();
        let code = lookup_code("uncoded").unwrap();
        let mut cfg = SimConfig::new(40, 50, 97);
        cfg.stats_edge = Some(EdgeId::new(0, 1));
        let wide = simulate(&sc.net, &sc.seq, &sc.profile, code.as_ref(), &cfg).unwrap();
        let narrow = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| simulate(&sc.net, &sc.seq, &sc.profile, code.as_ref(), &cfg).unwrap());
        assert_eq!(wide, narrow);
    }

    #[test]
    fn uncoded_error_rate_matches_the_channel() {
        // One slot per trial: the pair (1→2) errs with p, (2→1) with q.
        let sc = builtin_scenario("bsc_if(0.11,0.05)").unwrap();
        let code = lookup_code("uncoded").unwrap();
        let cfg = SimConfig::new(1, 4000, 5);
        let rep = simulate(&sc.net, &sc.seq, &sc.profile, code.as_ref(), &cfg).unwrap();
        let rate = |pair: (usize, usize)| {
            let (_, c) = rep.pair_errors.iter().find(|(p, _)| *p == pair).unwrap();
            *c as f64 / rep.trials as f64
        };
        assert_eq!(rate((0, 0)), 0.0);
        assert_eq!(rate((1, 1)), 0.0);
        assert!((rate((0, 1)) - 0.11).abs() < 0.02);
        assert!((rate((1, 0)) - 0.05).abs() < 0.02);
    }

    #[test]
    fn repetition_beats_uncoded_on_the_same_channel() {
        let sc = builtin_scenario("bsc_if(0.11,0.05)").unwrap();
        let rep15 = lookup_code("rep15").unwrap();
        let cfg = SimConfig::new(15, 500, 8);
        let rep = simulate(&sc.net, &sc.seq, &sc.profile, rep15.as_ref(), &cfg).unwrap();
        assert!(rep.p_err <= 0.01, "p_err {}", rep.p_err);
        assert_eq!(rep.message_bits, vec![1, 1]);
    }

    #[test]
    fn echoed_feedback_channel_runs_end_to_end() {
        // Forward is a plain BSC(p). The return symbol comes back xored
        // with the realized forward output, so a face-value decoder errs at
        // 1/2 on it whenever the forward bits are uniform.
        let sc = builtin_scenario("bsc_cf(0.2)").unwrap();
        let code = lookup_code("uncoded").unwrap();
        let cfg = SimConfig::new(1, 4000, 13);
        let rep = simulate(&sc.net, &sc.seq, &sc.profile, code.as_ref(), &cfg).unwrap();
        let rate = |pair: (usize, usize)| {
            let (_, c) = rep.pair_errors.iter().find(|(p, _)| *p == pair).unwrap();
            *c as f64 / rep.trials as f64
        };
        assert!((rate((0, 1)) - 0.2).abs() < 0.025);
        assert!((rate((1, 0)) - 0.5).abs() < 0.03);
    }

    #[test]
    fn coupled_block_must_fire_after_its_references() {
        let sc = trn_cn();
        let seq = OperationSequence::new(vec![2, 0, 1, 3]).unwrap();
        let positive = DelayProfile::positive(4);
        let code = lookup_code("zero_rate").unwrap();
        let cfg = SimConfig::new(4, 1, 0);
        let err = simulate(&sc.net, &seq, &positive, code.as_ref(), &cfg).unwrap_err();
        assert_eq!(err, SimError::CoupledOrder { block: 2, dep: 0 });
    }

    #[test]
    fn infeasible_profile_is_refused_before_running() {
        let sc = trn_cn();
        let seq = OperationSequence::new(vec![2, 0, 1, 3]).unwrap();
        let code = lookup_code("zero_rate").unwrap();
        let cfg = SimConfig::new(4, 1, 0);
        let err = simulate(&sc.net, &seq, &sc.profile, code.as_ref(), &cfg).unwrap_err();
        assert!(matches!(
            err,
            SimError::Schedule(ScheduleError::Infeasible { .. })
        ));
    }

    #[test]
    fn out_of_alphabet_symbols_are_rejected() {
        struct Loud;
        impl CodePlugin for Loud {
            fn name(&self) -> &'static str {
                "loud"
            }
            fn message_bits(&self, net: &Network, _slots: usize) -> Vec<usize> {
                vec![0; net.n()]
            }
            fn encode(
                &self,
                _net: &Network,
                _e: EdgeId,
                _slot: usize,
                _msg: &MessageBits,
                _rx: &RecvView,
            ) -> Result<Sym, SandboxViolation> {
                Ok(Sym::Discrete(9))
            }
            fn decode(
                &self,
                net: &Network,
                _node: usize,
                _own: &MessageBits,
                _rx: &NodeView,
                _slots: usize,
            ) -> Vec<MessageBits> {
                vec![MessageBits::default(); net.demand().sources().len()]
            }
        }
        let sc = builtin_scenario("bsc_if(0.1,0.1)").unwrap();
        let cfg = SimConfig::new(2, 1, 0);
        let err = simulate(&sc.net, &sc.seq, &sc.profile, &Loud, &cfg).unwrap_err();
        assert_eq!(
            err,
            SimError::BadSymbol {
                edge: EdgeId::new(0, 1),
                slot: 1,
                got: "9".into(),
                want: "a letter below 2".into(),
            }
        );
    }

    #[test]
    fn gaussian_power_accounting_flags_overruns() {
        use crate::net::{EdgePartition, MulticastDemand, PowerConstraints};

        // Spends power P on (1,2) and stays silent elsewhere.
        struct ConstPower(f64);
        impl CodePlugin for ConstPower {
            fn name(&self) -> &'static str {
                "const_power"
            }
            fn message_bits(&self, net: &Network, _slots: usize) -> Vec<usize> {
                vec![0; net.n()]
            }
            fn encode(
                &self,
                _net: &Network,
                e: EdgeId,
                _slot: usize,
                _msg: &MessageBits,
                _rx: &RecvView,
            ) -> Result<Sym, SandboxViolation> {
                if e == EdgeId::new(0, 1) {
                    Ok(Sym::Real(self.0.sqrt()))
                } else {
                    Ok(Sym::Real(0.0))
                }
            }
            fn decode(
                &self,
                net: &Network,
                _node: usize,
                _own: &MessageBits,
                _rx: &NodeView,
                _slots: usize,
            ) -> Vec<MessageBits> {
                vec![MessageBits::default(); net.demand().sources().len()]
            }
        }

        let e = EdgeId::new;
        let partition = EdgePartition::singletons(2);
        let channels = vec![ChannelModel::Awgn { sigma2: 1.0 }; 4];
        let demand = MulticastDemand::new([0], [1]).unwrap();
        let power = PowerConstraints::uniform(2, 3.0).unwrap();
        let net = Network::new(partition, channels, demand, Some(power)).unwrap();
        let seq = OperationSequence::identity(4);
        let profile = DelayProfile::positive(2);
        let cfg = SimConfig::new(50, 4, 21);

        let ok = simulate(&net, &seq, &profile, &ConstPower(3.0), &cfg).unwrap();
        assert!(ok.power_ok);
        let avg = ok.avg_power.unwrap();
        assert!((avg[e(0, 1).index(2)] - 3.0).abs() < 1e-12);

        let over = simulate(&net, &seq, &profile, &ConstPower(3.2), &cfg).unwrap();
        assert!(!over.power_ok);
    }

    #[test]
    fn channel_stats_shake_out_as_memoryless() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};

        let sc = builtin_scenario("bsc_if(0.1,0.2)").unwrap();
        let code = lookup_code("uncoded").unwrap();
        let mut cfg = SimConfig::new(20_000, 1, 3);
        cfg.stats_edge = Some(EdgeId::new(0, 1));
        let rep = simulate(&sc.net, &sc.seq, &sc.profile, code.as_ref(), &cfg).unwrap();
        let st = rep.stats.unwrap();

        // Given the input, the output must not depend on the previous
        // output: a 2x2 homogeneity test per input letter, summed.
        let mut chi2 = 0.0;
        for x in 0..st.in_size {
            let cell = |prev: usize, y: usize| st.count(prev, x, y) as f64;
            let row: Vec<f64> = (0..2).map(|p| cell(p, 0) + cell(p, 1)).collect();
            let col: Vec<f64> = (0..2).map(|y| cell(0, y) + cell(1, y)).collect();
            let all: f64 = row.iter().sum();
            for prev in 0..2 {
                for y in 0..2 {
                    let expect = row[prev] * col[y] / all;
                    chi2 += (cell(prev, y) - expect).powi(2) / expect;
                }
            }
        }
        let crit = ChiSquared::new(2.0).unwrap().inverse_cdf(0.999);
        assert!(chi2 < crit, "chi2 {chi2} >= {crit}");
    }

    #[test]
    fn scenarios_ship_feasible_defaults() {
        for spec in ["bsc_if(0.1,0.1)", "bsc_cf(0.1)", "trn_cn", "trn_in(0.1)"] {
            let sc = builtin_scenario(spec).unwrap();
            let f = crate::schedule::is_feasible(&sc.profile, &sc.seq, sc.net.partition())
                .unwrap();
            assert_eq!(f, Feasibility::Feasible, "{spec}");
        }
    }
}
