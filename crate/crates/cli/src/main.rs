//! `mmn` — inspect multimessage multicast networks, check delay-profile
//! feasibility, compute cut-set rate bounds, and run codes on the
//! slot-level simulator.
//!
//! Exit codes: 0 for positive verdicts (feasible / inside / clean run),
//! 1 for negative ones (infeasible / outside / undecided / sandbox
//! violation), 2 for input errors.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use mmn_core::info::{
    awgn_region_membership, blahut_arimoto, brute_force_joint_mi, dmc_cut_value,
    dmc_region_membership, enumerate_cuts, maximize_min_slack, network_edge_capacities,
    network_joint, product_cutset_mi, uniform_inputs, AwgnMembership, AwgnSearchParams,
    BaOptions, InfoError, Membership, RateTuple,
};
use mmn_core::net::format::parse_network;
use mmn_core::net::{all_edges, ChannelModel, EdgeId, Network, NetworkKind};
use mmn_core::schedule::{
    feasible_sequences, is_feasible, DelayProfile, Feasibility, OperationSequence,
};
use mmn_core::sim::{
    builtin_scenario, code_names, codes_for_scenario, lookup_code, scenario_names, simulate,
    MiProbe, SimConfig, SimError,
};
use mmn_core::tol;

#[derive(Parser)]
#[command(
    name = "mmn",
    version,
    about = "Multimessage multicast networks: schedules, cut-set regions, simulation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct NetSource {
    /// Network description file.
    #[arg(long, value_name = "FILE", conflicts_with = "scenario")]
    net: Option<PathBuf>,
    /// Built-in scenario spec, e.g. `bsc_if(0.11,0.05)` or `trn_cn`.
    #[arg(long, value_name = "SPEC", required_unless_present = "net")]
    scenario: Option<String>,
}

#[derive(Args)]
struct Budget {
    /// Stopping gap in bits for iterative searches.
    #[arg(long)]
    gap: Option<f64>,
    /// Iteration cap for iterative searches.
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a network and describe its blocks, demand, and kind.
    Validate {
        #[command(flatten)]
        src: NetSource,
    },
    /// Check a delay profile against a firing sequence.
    Feasible {
        #[command(flatten)]
        src: NetSource,
        /// Firing order of the blocks, 1-based, e.g. `3,1,2`.
        #[arg(long, value_name = "ORDER")]
        seq: Option<String>,
        /// Profile file (`zero L I J` lines) or `positive`.
        #[arg(long, value_name = "FILE")]
        profile: Option<String>,
        /// List every sequence the profile is feasible with.
        #[arg(long)]
        all: bool,
    },
    /// Per-edge capacities and every separating cut's rate bound.
    CapacityDmc {
        #[command(flatten)]
        src: NetSource,
        #[command(flatten)]
        budget: Budget,
    },
    /// Certified worst-cut slack search over the power polytope.
    CapacityAwgn {
        #[command(flatten)]
        src: NetSource,
        /// Rates to subtract, comma-separated per node; zeros when absent.
        #[arg(long, value_name = "R1,R2,..")]
        rate: Option<String>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Is a rate tuple inside the cut-set region?
    Member {
        #[command(flatten)]
        src: NetSource,
        /// Comma-separated rates per node, e.g. `0.5,0,0,0`.
        #[arg(long, value_name = "R1,R2,..")]
        rate: String,
        #[command(flatten)]
        budget: Budget,
    },
    /// Cut values under uniform inputs, per-block and against the full
    /// joint distribution.
    Cutset {
        #[command(flatten)]
        src: NetSource,
        /// Also compute each value from the full joint (slow but exact).
        #[arg(long)]
        joint: bool,
    },
    /// Run a code on the simulator and report error rates.
    Simulate {
        #[command(flatten)]
        src: NetSource,
        /// Code name; see `mmn codes`.
        #[arg(long)]
        code: String,
        #[arg(long, default_value_t = 1000)]
        slots: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Trial seed; defaults to $MMN_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the firing order, 1-based, e.g. `3,1,2`.
        #[arg(long, value_name = "ORDER")]
        seq: Option<String>,
        /// Override the delay profile: a file or `positive`.
        #[arg(long, value_name = "FILE")]
        profile: Option<String>,
        /// Estimate I(message; edge output), e.g. `1:(1,4)`.
        #[arg(long, value_name = "SRC:EDGE")]
        probe: Option<String>,
        /// Collect (previous output, input, output) counts on an edge.
        #[arg(long, value_name = "EDGE")]
        stats: Option<String>,
    },
    /// List built-in scenarios.
    Scenarios,
    /// List shipped codes.
    Codes {
        /// Only the codes shelved for this scenario (base name).
        #[arg(long)]
        scenario: Option<String>,
    },
}

struct Loaded {
    label: String,
    net: Network,
    seq: OperationSequence,
    profile: DelayProfile,
}

impl NetSource {
    fn load(&self) -> Result<Loaded, String> {
        if let Some(path) = &self.net {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            let net = parse_network(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            return Ok(Loaded {
                label: path.display().to_string(),
                seq: OperationSequence::identity(net.alpha()),
                profile: DelayProfile::positive(net.n()),
                net,
            });
        }
        let spec = self.scenario.as_deref().expect("clap requires one source");
        let sc = builtin_scenario(spec).map_err(|e| e.to_string())?;
        Ok(Loaded {
            label: spec.trim().to_string(),
            net: sc.net,
            seq: sc.seq,
            profile: sc.profile,
        })
    }
}

fn main() {
    match run(Cli::parse()) {
        Ok(code) => std::process::exit(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32, String> {
    match cli.cmd {
        Cmd::Validate { src } => validate(&src.load()?),
        Cmd::Feasible {
            src,
            seq,
            profile,
            all,
        } => feasible(src.load()?, seq, profile, all),
        Cmd::CapacityDmc { src, budget } => capacity_dmc(&src.load()?.net, &budget),
        Cmd::CapacityAwgn { src, rate, budget } => {
            capacity_awgn(&src.load()?.net, rate, &budget)
        }
        Cmd::Member { src, rate, budget } => member(&src.load()?.net, &rate, &budget),
        Cmd::Cutset { src, joint } => cutset(&src.load()?.net, joint),
        Cmd::Simulate {
            src,
            code,
            slots,
            trials,
            seed,
            seq,
            profile,
            probe,
            stats,
        } => {
            let loaded = src.load()?;
            run_sim(loaded, &code, slots, trials, seed, seq, profile, probe, stats)
        }
        Cmd::Scenarios => {
            for name in scenario_names() {
                println!("{name}");
            }
            Ok(0)
        }
        Cmd::Codes { scenario } => {
            let names = match &scenario {
                Some(base) => codes_for_scenario(base),
                None => code_names(),
            };
            for name in names {
                println!("{name}");
            }
            Ok(0)
        }
    }
}

fn nodes_1based(it: impl Iterator<Item = usize>) -> String {
    let v: Vec<String> = it.map(|i| (i + 1).to_string()).collect();
    v.join(" ")
}

fn validate(loaded: &Loaded) -> Result<i32, String> {
    let net = &loaded.net;
    println!("network: {}", loaded.label);
    println!("nodes: {}", net.n());
    println!(
        "kind: {}",
        match net.kind() {
            NetworkKind::Discrete => "discrete",
            NetworkKind::Awgn => "gaussian",
        }
    );
    println!("sources: {}", nodes_1based(net.demand().sources().iter().copied()));
    println!(
        "destinations: {}",
        nodes_1based(net.demand().destinations().iter().copied())
    );
    println!("blocks: {}", net.alpha());
    for (h, (block, ch)) in net
        .partition()
        .blocks()
        .iter()
        .zip(net.channels())
        .enumerate()
    {
        let edges: Vec<String> = block.iter().map(|e| e.to_string()).collect();
        let desc = match ch {
            ChannelModel::Dmc(t) => format!(
                "dmc  inputs {:?} outputs {:?}",
                t.input_sizes(),
                t.output_sizes()
            ),
            ChannelModel::Awgn { sigma2 } => format!("awgn  sigma2 {sigma2}"),
            ChannelModel::Trivial => "trivial".into(),
            ChannelModel::CoupledXor { refs } => {
                let r: Vec<String> = refs.iter().map(|e| e.to_string()).collect();
                format!("coupled-xor  refs {}", r.join(" "))
            }
        };
        println!("  block {}: {}  edges {}", h + 1, desc, edges.join(" "));
    }
    if let Some(p) = net.power() {
        println!("power total: {}", p.total());
        println!(
            "power per node: {}",
            (0..net.n())
                .map(|i| p.node_cap(i).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    println!("ok");
    Ok(0)
}

fn parse_seq(text: &str, alpha: usize) -> Result<OperationSequence, String> {
    let inner = text
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')');
    let order: Vec<usize> = inner
        .split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(v) if (1..=alpha).contains(&v) => Ok(v - 1),
            _ => Err(format!("bad block number {t:?} (1..={alpha})")),
        })
        .collect::<Result<_, _>>()?;
    OperationSequence::new(order).map_err(|e| e.to_string())
}

fn parse_profile(text: &str, n: usize) -> Result<DelayProfile, String> {
    if text == "positive" {
        return Ok(DelayProfile::positive(n));
    }
    let body = std::fs::read_to_string(text).map_err(|e| format!("{text}: {e}"))?;
    DelayProfile::parse(&body, n).map_err(|e| e.to_string())
}

fn feasible(
    loaded: Loaded,
    seq: Option<String>,
    profile: Option<String>,
    all: bool,
) -> Result<i32, String> {
    let net = &loaded.net;
    let seq = match seq {
        Some(s) => parse_seq(&s, net.alpha())?,
        None => loaded.seq,
    };
    let profile = match profile {
        Some(p) => parse_profile(&p, net.n())?,
        None => loaded.profile,
    };
    println!("sequence: {}", seq.display());
    println!("profile zeros: {}", profile.zeros().count());
    if all {
        let seqs = feasible_sequences(&profile, net.partition()).map_err(|e| e.to_string())?;
        println!("feasible sequences: {}", seqs.len());
        for s in &seqs {
            println!("  {}", s.display());
        }
        return Ok(if seqs.iter().any(|s| *s == seq) { 0 } else { 1 });
    }
    match is_feasible(&profile, &seq, net.partition()).map_err(|e| e.to_string())? {
        Feasibility::Feasible => {
            println!("verdict: feasible");
            Ok(0)
        }
        Feasibility::Infeasible { witness: (l, i, j) } => {
            println!("verdict: infeasible");
            println!("witness: ({},{},{})", l + 1, i + 1, j + 1);
            Ok(1)
        }
    }
}

fn ba_options(budget: &Budget) -> BaOptions {
    let mut o = BaOptions::default();
    if let Some(g) = budget.gap {
        o.gap = g;
    }
    if let Some(k) = budget.max_iters {
        o.max_iters = k;
    }
    o
}

fn capacity_dmc(net: &Network, budget: &Budget) -> Result<i32, String> {
    let opts = ba_options(budget);
    println!("edge capacities (bits/slot):");
    for (b, (block, ch)) in net
        .partition()
        .blocks()
        .iter()
        .zip(net.channels())
        .enumerate()
    {
        match ch {
            ChannelModel::Trivial => {}
            ChannelModel::Dmc(t) if block.len() == 1 => {
                let r = blahut_arimoto(t, &opts).map_err(|e| e.to_string())?;
                println!(
                    "  C{} = {:.9}  (gap {:.1e}, {} iterations)",
                    block[0], r.capacity, r.gap, r.iterations
                );
            }
            _ => {
                return Err(InfoError::NotPerEdge(b).to_string());
            }
        }
    }
    let caps = network_edge_capacities(net, &opts).map_err(|e| e.to_string())?;
    println!("cut bounds:");
    for cut in enumerate_cuts(net.n(), net.demand()).map_err(|e| e.to_string())? {
        println!("  {} -> {:.9}", cut, dmc_cut_value(&cut, &caps));
    }
    Ok(0)
}

fn parse_rates(text: &str, net: &Network) -> Result<RateTuple, String> {
    let rates: Vec<f64> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad rate {t:?}"))
        })
        .collect::<Result<_, _>>()?;
    if rates.len() != net.n() {
        return Err(format!(
            "rate list has {} entries for {} nodes",
            rates.len(),
            net.n()
        ));
    }
    RateTuple::new(rates, net.demand()).map_err(|e| e.to_string())
}

fn awgn_params(budget: &Budget) -> AwgnSearchParams {
    let mut p = AwgnSearchParams::default();
    if let Some(g) = budget.gap {
        p.gap = g;
    }
    if budget.max_iters.is_some() {
        p.max_iters = budget.max_iters;
    }
    p
}

fn capacity_awgn(net: &Network, rate: Option<String>, budget: &Budget) -> Result<i32, String> {
    let rates = match rate {
        Some(r) => parse_rates(&r, net)?,
        None => RateTuple::new(vec![0.0; net.n()], net.demand()).map_err(|e| e.to_string())?,
    };
    let search =
        maximize_min_slack(net, &rates, &awgn_params(budget)).map_err(|e| e.to_string())?;
    println!(
        "rate: {}",
        rates
            .rates()
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    println!(
        "search: {} after {} iterations",
        if search.converged {
            "converged"
        } else {
            "iteration cap hit"
        },
        search.iterations
    );
    println!("worst-cut slack: {:.9}", search.slack);
    println!("proven upper bound: {:.9}", search.upper);
    println!("allocation:");
    for e in all_edges(net.n()) {
        let s = search.alloc.get(e);
        if s > 0.0 {
            println!("  S{} = {:.6}", e, s);
        }
    }
    let verdict = if search.slack >= -tol::MEMBERSHIP_TOL {
        "inside"
    } else if search.upper < -tol::MEMBERSHIP_TOL {
        "outside"
    } else {
        "undecided"
    };
    println!("verdict: {verdict}");
    Ok(if verdict == "inside" { 0 } else { 1 })
}

fn member(net: &Network, rate: &str, budget: &Budget) -> Result<i32, String> {
    let rates = parse_rates(rate, net)?;
    match net.kind() {
        NetworkKind::Discrete => {
            let caps =
                network_edge_capacities(net, &ba_options(budget)).map_err(|e| e.to_string())?;
            println!("cut          rate-sum      bound         slack");
            for cut in enumerate_cuts(net.n(), net.demand()).map_err(|e| e.to_string())? {
                let sum = rates.sum_inside(&cut);
                let bound = dmc_cut_value(&cut, &caps);
                println!("{:<12} {:<13.9} {:<13.9} {:+.9}", cut.to_string(), sum, bound, bound - sum);
            }
            match dmc_region_membership(&rates, &caps, net.demand()).map_err(|e| e.to_string())? {
                Membership::Inside => {
                    println!("verdict: inside");
                    Ok(0)
                }
                Membership::Outside { cut, slack } => {
                    println!("verdict: outside");
                    println!("witness cut: {cut}  slack {slack:.9}");
                    Ok(1)
                }
            }
        }
        NetworkKind::Awgn => {
            match awgn_region_membership(net, &rates, &awgn_params(budget))
                .map_err(|e| e.to_string())?
            {
                AwgnMembership::Inside { slack, .. } => {
                    println!("verdict: inside");
                    println!("worst-cut slack: {slack:.9}");
                    Ok(0)
                }
                AwgnMembership::Outside { cut, slack } => {
                    println!("verdict: outside");
                    println!("witness cut: {cut}  slack {slack:.9}");
                    Ok(1)
                }
                AwgnMembership::Undecided { best_slack } => {
                    println!("verdict: undecided");
                    println!("best slack so far: {best_slack:.9}");
                    Ok(1)
                }
            }
        }
    }
}

fn cutset(net: &Network, joint: bool) -> Result<i32, String> {
    let inputs = uniform_inputs(net).map_err(|e| e.to_string())?;
    let cuts = enumerate_cuts(net.n(), net.demand()).map_err(|e| e.to_string())?;

    let product: Option<Vec<f64>> = if net.has_coupling() {
        println!("note: coupled blocks; per-block decomposition does not apply");
        None
    } else {
        let vals = cuts
            .iter()
            .map(|c| product_cutset_mi(net, c, &inputs))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| e.to_string())?;
        Some(vals)
    };
    let joint_vals: Option<Vec<f64>> = if joint || product.is_none() {
        let dist = network_joint(net, &inputs).map_err(|e| e.to_string())?;
        let vals = cuts
            .iter()
            .map(|c| brute_force_joint_mi(&dist, net.n(), c))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| e.to_string())?;
        Some(vals)
    } else {
        None
    };

    println!("cut values under uniform inputs (bits/slot):");
    println!(
        "{:<12} {:>14} {:>14}",
        "cut",
        "per-block",
        if joint_vals.is_some() { "joint" } else { "" }
    );
    let mut max_diff = 0.0f64;
    for (k, cut) in cuts.iter().enumerate() {
        let p = product.as_ref().map(|v| v[k]);
        let j = joint_vals.as_ref().map(|v| v[k]);
        let cell = |x: Option<f64>| match x {
            Some(v) => format!("{v:>14.9}"),
            None => format!("{:>14}", "-"),
        };
        println!("{:<12} {} {}", cut.to_string(), cell(p), cell(j));
        if let (Some(a), Some(b)) = (p, j) {
            max_diff = max_diff.max((a - b).abs());
        }
    }
    if product.is_some() && joint_vals.is_some() {
        println!("max |per-block - joint| = {max_diff:.3e}");
    }
    let min_of = |v: &Vec<f64>| v.iter().copied().fold(f64::INFINITY, f64::min);
    if let Some(v) = joint_vals.as_ref().or(product.as_ref()) {
        println!("min cut value: {:.9}", min_of(v));
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_sim(
    loaded: Loaded,
    code_name: &str,
    slots: usize,
    trials: u64,
    seed: Option<u64>,
    seq: Option<String>,
    profile: Option<String>,
    probe: Option<String>,
    stats: Option<String>,
) -> Result<i32, String> {
    let net = &loaded.net;
    let code = lookup_code(code_name)
        .ok_or_else(|| format!("unknown code {code_name:?}; see `mmn codes`"))?;
    let seq = match seq {
        Some(s) => parse_seq(&s, net.alpha())?,
        None => loaded.seq,
    };
    let profile = match profile {
        Some(p) => parse_profile(&p, net.n())?,
        None => loaded.profile,
    };
    let seed = match seed {
        Some(s) => s,
        None => match std::env::var("MMN_SEED") {
            Ok(v) => v
                .parse::<u64>()
                .map_err(|_| format!("MMN_SEED={v:?} is not a u64"))?,
            Err(_) => 0,
        },
    };
    let mut cfg = SimConfig::new(slots, trials, seed);
    if let Some(p) = probe {
        let (src, edge) = p
            .split_once(':')
            .ok_or_else(|| format!("probe {p:?} is not SRC:(I,J)"))?;
        let source = src
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| format!("bad probe source {src:?} (1-based)"))?
            - 1;
        let edge: EdgeId = edge.parse()?;
        cfg.probe = Some(MiProbe { source, edge });
    }
    if let Some(s) = stats {
        cfg.stats_edge = Some(s.parse::<EdgeId>()?);
    }

    println!("network: {}", loaded.label);
    println!("code: {code_name}");
    println!("sequence: {}", seq.display());
    println!("profile zeros: {}", profile.zeros().count());
    println!("slots: {slots}");
    println!("trials: {trials}");
    println!("seed: {seed}");

    let report = match simulate(net, &seq, &profile, code.as_ref(), &cfg) {
        Ok(r) => r,
        Err(SimError::Sandbox(v)) => {
            println!("sandbox violation: {v}");
            return Ok(1);
        }
        Err(e) => return Err(e.to_string()),
    };

    let list = |xs: &mut dyn Iterator<Item = String>| xs.collect::<Vec<_>>().join(" ");
    println!(
        "message bits: {}",
        list(&mut report.message_bits.iter().map(|b| b.to_string()))
    );
    println!(
        "rates: {}",
        list(&mut report.rates.iter().map(|r| format!("{r:.6}")))
    );
    println!("error trials: {} / {}", report.error_trials, report.trials);
    println!("p_err: {:.6}", report.p_err);
    println!("pair errors:");
    for ((s, d), c) in &report.pair_errors {
        println!("  ({} -> {}): {}", s + 1, d + 1, c);
    }
    if let Some(mi) = &report.mi {
        println!(
            "mi estimate: {:.6} bits  (bias bound {:.2e}, {} samples)",
            mi.mi, mi.bias_bound, mi.samples
        );
    }
    if let Some(avg) = &report.avg_power {
        let mut line = String::new();
        for e in all_edges(net.n()) {
            let s = avg[e.index(net.n())];
            if s > 0.0 {
                write!(line, " S{e}={s:.6}").unwrap();
            }
        }
        println!("avg power:{line}");
        println!(
            "power budget: {}",
            if report.power_ok { "respected" } else { "EXCEEDED" }
        );
    }
    if let Some(st) = &report.stats {
        println!("channel stats on {} (prev, x -> outputs):", st.edge);
        for prev in 0..st.out_size {
            for x in 0..st.in_size {
                let row: Vec<String> = (0..st.out_size)
                    .map(|y| st.count(prev, x, y).to_string())
                    .collect();
                println!("  y'={prev} x={x}: {}", row.join(" "));
            }
        }
    }
    Ok(if report.power_ok { 0 } else { 1 })
}
