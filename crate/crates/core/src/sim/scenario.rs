//! Built-in study networks, each bundled with its default firing order and
//! delay profile. Parsed from compact specs like `bsc_if(0.11,0.05)`.

use thiserror::Error;

use crate::net::{
    all_edges, ChannelModel, DmcTable, EdgeId, EdgePartition, MulticastDemand, NetError, Network,
};
use crate::schedule::{DelayProfile, OperationSequence, ScheduleError};

#[derive(Debug, Clone)]
pub struct Scenario {
    /// Base name, without arguments.
    pub name: &'static str,
    pub net: Network,
    pub seq: OperationSequence,
    pub profile: DelayProfile,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("cannot parse scenario `{spec}`: {why}")]
    Parse { spec: String, why: String },
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Accepted specs, with their argument lists.
pub fn scenario_names() -> &'static [&'static str] {
    &["bsc_cf(p)", "bsc_if(p,q)", "trn_cn", "trn_in(p)"]
}

/// Build a scenario from a spec like `trn_cn` or `bsc_if(0.11,0.05)`.
pub fn builtin_scenario(spec: &str) -> Result<Scenario, ScenarioError> {
    let fail = |why: &str| ScenarioError::Parse {
        spec: spec.into(),
        why: why.into(),
    };
    let spec = spec.trim();
    let (name, args) = match spec.split_once('(') {
        None => (spec, Vec::new()),
        Some((name, rest)) => {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| fail("missing closing parenthesis"))?;
            let args = inner
                .split(',')
                .map(|a| a.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| fail(&e.to_string()))?;
            (name, args)
        }
    };
    let arity = |want: usize| {
        if args.len() == want {
            Ok(())
        } else {
            Err(fail(&format!(
                "takes {want} argument(s), got {}",
                args.len()
            )))
        }
    };
    match name {
        "bsc_if" => {
            arity(2)?;
            bsc_if(args[0], args[1])
        }
        "bsc_cf" => {
            arity(1)?;
            bsc_cf(args[0])
        }
        "trn_cn" => {
            arity(0)?;
            trn_cn()
        }
        "trn_in" => {
            arity(1)?;
            trn_in(args[0])
        }
        _ => Err(fail("unknown scenario")),
    }
}

/// Two nodes talking over independent binary symmetric channels: `p`
/// forward, `q` back. Both nodes are sources and destinations.
fn bsc_if(p: f64, q: f64) -> Result<Scenario, ScenarioError> {
    let partition = EdgePartition::singletons(2);
    let channels = partition
        .blocks()
        .iter()
        .map(|b| {
            Ok(match (b[0].from, b[0].to) {
                (0, 1) => ChannelModel::Dmc(DmcTable::bsc(p)?),
                (1, 0) => ChannelModel::Dmc(DmcTable::bsc(q)?),
                _ => ChannelModel::Trivial,
            })
        })
        .collect::<Result<_, NetError>>()?;
    let net = Network::new(
        partition,
        channels,
        MulticastDemand::new([0, 1], [0, 1])?,
        None,
    )?;
    Ok(Scenario {
        name: "bsc_if",
        seq: OperationSequence::identity(net.alpha()),
        profile: DelayProfile::positive(2),
        net,
    })
}

/// Two nodes over one joint block: the forward symbol crosses a BSC(`p`),
/// and the return symbol comes back xored with the realized forward output
/// — feedback done by the channel itself, inside the block.
fn bsc_cf(p: f64) -> Result<Scenario, ScenarioError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(NetError::BadProbability(p).into());
    }
    // Inputs (x12, x21), outputs (y12, y21): y12 = x12 + Bern(p),
    // y21 = x21 + y12 (mod 2).
    let mut rows = vec![0.0; 16];
    for x12 in 0..2usize {
        for x21 in 0..2usize {
            for (flip, pr) in [(0, 1.0 - p), (1, p)] {
                let y12 = x12 ^ flip;
                let y21 = x21 ^ y12;
                rows[(x12 * 2 + x21) * 4 + (y12 * 2 + y21)] = pr;
            }
        }
    }
    let e = EdgeId::new;
    let partition = EdgePartition::new(2, vec![vec![e(0, 1), e(1, 0)], vec![e(0, 0), e(1, 1)]])?;
    let channels = vec![
        ChannelModel::Dmc(DmcTable::new(vec![2, 2], vec![2, 2], rows)?),
        ChannelModel::Trivial,
    ];
    let net = Network::new(
        partition,
        channels,
        MulticastDemand::new([0, 1], [0, 1])?,
        None,
    )?;
    Ok(Scenario {
        name: "bsc_cf",
        seq: OperationSequence::identity(net.alpha()),
        profile: DelayProfile::positive(2),
        net,
    })
}

/// Four nodes; two pure-noise edges feed a coupled sink block whose output
/// is the sink inputs xored with both realized noise symbols. The default
/// profile grants the two relays a same-slot read of their noise edge,
/// which is exactly what a cancellation code needs.
fn trn_cn() -> Result<Scenario, ScenarioError> {
    let e = EdgeId::new;
    let named = [e(0, 1), e(1, 2), e(0, 3), e(1, 3), e(2, 3)];
    let rest: Vec<EdgeId> = all_edges(4).filter(|x| !named.contains(x)).collect();
    let partition = EdgePartition::new(
        4,
        vec![
            vec![e(0, 1)],
            vec![e(1, 2)],
            vec![e(0, 3), e(1, 3), e(2, 3)],
            rest,
        ],
    )?;
    let channels = vec![
        ChannelModel::Dmc(DmcTable::noise(&[0.5, 0.5])?),
        ChannelModel::Dmc(DmcTable::noise(&[0.5, 0.5])?),
        ChannelModel::CoupledXor {
            refs: vec![e(0, 1), e(1, 2)],
        },
        ChannelModel::Trivial,
    ];
    let net = Network::new(partition, channels, MulticastDemand::new([0], [3])?, None)?;
    Ok(Scenario {
        name: "trn_cn",
        seq: OperationSequence::identity(net.alpha()),
        profile: DelayProfile::with_zeros(4, [(0, 1, 3), (1, 2, 3)])?,
        net,
    })
}

/// The same four-node layout with every edge its own block and ordinary
/// independent noise: the only useful path is a BSC(`p`) from source to
/// sink, so the cut bound pins the rate to that one capacity.
fn trn_in(p: f64) -> Result<Scenario, ScenarioError> {
    let partition = EdgePartition::singletons(4);
    let channels = partition
        .blocks()
        .iter()
        .map(|b| {
            let edge = b[0];
            Ok(if edge.from == edge.to {
                ChannelModel::Trivial
            } else if edge == EdgeId::new(0, 3) {
                ChannelModel::Dmc(DmcTable::bsc(p)?)
            } else {
                ChannelModel::Dmc(DmcTable::noise(&[0.5, 0.5])?)
            })
        })
        .collect::<Result<_, NetError>>()?;
    let net = Network::new(partition, channels, MulticastDemand::new([0], [3])?, None)?;
    Ok(Scenario {
        name: "trn_in",
        seq: OperationSequence::identity(net.alpha()),
        profile: DelayProfile::positive(4),
        net,
    })
}
