//! Plain-text network descriptions.
//!
//! The format is line-oriented; `#` starts a comment, blank lines are
//! ignored, node numbers are 1-based, and edge literals like `(1,2)`
//! contain no spaces. Top-level lines:
//!
//! ```text
//! nodes 2
//! sources 1 2
//! destinations 1 2
//! power total 8.0        # Gaussian networks only
//! power node 1 4.0       # optional, defaults to the total
//! power edge (1,2) 4.0   # optional, defaults to the total
//! ```
//!
//! Each channel block is a stanza ending in `end`:
//!
//! ```text
//! channel dmc
//! edges (1,2) (2,1)   # axis order of the table
//! inputs 2 2          # per-edge input alphabet sizes
//! outputs 2 2
//! row 0.81 0.09 0.09 0.01   # one row per joint input, first edge most
//! ...                       # significant, row entries over joint outputs
//! end
//!
//! channel awgn
//! edges (1,2)
//! sigma2 1.0
//! end
//!
//! channel trivial
//! edges (1,1) (2,2)
//! end
//!
//! channel coupled-xor
//! edges (1,4) (2,4) (3,4)
//! refs (1,2) (2,3)
//! end
//! ```
//!
//! Stanza order defines block order. Writing a network and parsing it back
//! reproduces it exactly: floats are printed with the shortest
//! representation that round-trips.

use std::fmt::Write as _;

use thiserror::Error;

use super::{
    ChannelModel, DmcTable, EdgeId, EdgePartition, MulticastDemand, NetError, Network,
    PowerConstraints,
};
use crate::net::idx;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Net(#[from] NetError),
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError::Parse {
        line,
        msg: msg.into(),
    })
}

fn parse_node(tok: &str, line: usize) -> Result<usize, FormatError> {
    match tok.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v - 1),
        _ => err(line, format!("bad node number {tok:?} (node numbers are 1-based)")),
    }
}

fn parse_edge(tok: &str, line: usize) -> Result<EdgeId, FormatError> {
    tok.parse::<EdgeId>().or_else(|e| err(line, e))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, FormatError> {
    tok.parse::<f64>()
        .or_else(|_| err(line, format!("bad number {tok:?}")))
}

#[derive(Default)]
struct ChanDraft {
    kind: String,
    start_line: usize,
    edges: Vec<EdgeId>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    rows: Vec<f64>,
    sigma2: Option<f64>,
    refs: Vec<EdgeId>,
}

impl ChanDraft {
    fn finish(self) -> Result<(Vec<EdgeId>, ChannelModel), FormatError> {
        let line = self.start_line;
        if self.edges.is_empty() {
            return err(line, "channel stanza needs an edges line");
        }
        let model = match self.kind.as_str() {
            "dmc" => {
                if self.inputs.len() != self.edges.len() || self.outputs.len() != self.edges.len()
                {
                    return err(
                        line,
                        "dmc stanza needs one inputs and one outputs entry per edge",
                    );
                }
                ChannelModel::Dmc(DmcTable::new(self.inputs, self.outputs, self.rows)?)
            }
            "awgn" => match self.sigma2 {
                Some(s) => ChannelModel::Awgn { sigma2: s },
                None => return err(line, "awgn stanza needs a sigma2 line"),
            },
            "trivial" => ChannelModel::Trivial,
            "coupled-xor" => ChannelModel::CoupledXor { refs: self.refs },
            other => return err(line, format!("unknown channel kind {other:?}")),
        };
        Ok((self.edges, model))
    }
}

/// Parses a network description; see the module docs for the grammar.
pub fn parse_network(text: &str) -> Result<Network, FormatError> {
    let mut n: Option<(usize, usize)> = None; // (value, line)
    let mut sources: Option<Vec<usize>> = None;
    let mut destinations: Option<Vec<usize>> = None;
    let mut stanzas: Vec<(Vec<EdgeId>, ChannelModel)> = Vec::new();
    let mut chan: Option<ChanDraft> = None;
    let mut power_total: Option<f64> = None;
    let mut power_nodes: Vec<(usize, f64)> = Vec::new();
    let mut power_edges: Vec<(EdgeId, f64)> = Vec::new();
    let mut any_power = false;
    let mut last_line = 0;

    for (ln0, raw) in text.lines().enumerate() {
        let line = ln0 + 1;
        last_line = line;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let key = toks[0];
        let args = &toks[1..];

        if let Some(draft) = chan.as_mut() {
            match key {
                "edges" => {
                    for t in args {
                        draft.edges.push(parse_edge(t, line)?);
                    }
                }
                "inputs" => {
                    for t in args {
                        draft.inputs.push(
                            t.parse::<usize>()
                                .or_else(|_| err(line, format!("bad alphabet size {t:?}")))?,
                        );
                    }
                }
                "outputs" => {
                    for t in args {
                        draft.outputs.push(
                            t.parse::<usize>()
                                .or_else(|_| err(line, format!("bad alphabet size {t:?}")))?,
                        );
                    }
                }
                "row" => {
                    for t in args {
                        draft.rows.push(parse_f64(t, line)?);
                    }
                }
                "sigma2" => {
                    if args.len() != 1 {
                        return err(line, "sigma2 takes one number");
                    }
                    draft.sigma2 = Some(parse_f64(args[0], line)?);
                }
                "refs" => {
                    for t in args {
                        draft.refs.push(parse_edge(t, line)?);
                    }
                }
                "end" => {
                    let draft = chan.take().unwrap();
                    stanzas.push(draft.finish()?);
                }
                other => return err(line, format!("unknown channel field {other:?}")),
            }
            continue;
        }

        match key {
            "nodes" => {
                if args.len() != 1 {
                    return err(line, "nodes takes one number");
                }
                let v = args[0]
                    .parse::<usize>()
                    .or_else(|_| err(line, format!("bad node count {:?}", args[0])))?;
                n = Some((v, line));
            }
            "sources" => {
                let mut v = Vec::new();
                for t in args {
                    v.push(parse_node(t, line)?);
                }
                sources = Some(v);
            }
            "destinations" => {
                let mut v = Vec::new();
                for t in args {
                    v.push(parse_node(t, line)?);
                }
                destinations = Some(v);
            }
            "channel" => {
                if args.len() != 1 {
                    return err(line, "channel takes a kind (dmc, awgn, trivial, coupled-xor)");
                }
                chan = Some(ChanDraft {
                    kind: args[0].to_string(),
                    start_line: line,
                    ..ChanDraft::default()
                });
            }
            "power" => {
                any_power = true;
                match args {
                    ["total", v] => power_total = Some(parse_f64(v, line)?),
                    ["node", i, v] => {
                        power_nodes.push((parse_node(i, line)?, parse_f64(v, line)?))
                    }
                    ["edge", e, v] => {
                        power_edges.push((parse_edge(e, line)?, parse_f64(v, line)?))
                    }
                    _ => return err(line, "power takes: total V | node I V | edge (I,J) V"),
                }
            }
            other => return err(line, format!("unknown directive {other:?}")),
        }
    }

    if let Some(draft) = chan {
        return err(draft.start_line, "channel stanza never reached its end line");
    }
    let (n, _) = match n {
        Some(v) => v,
        None => return err(last_line, "missing nodes line"),
    };
    let sources = match sources {
        Some(v) => v,
        None => return err(last_line, "missing sources line"),
    };
    let destinations = match destinations {
        Some(v) => v,
        None => return err(last_line, "missing destinations line"),
    };

    let (blocks, channels): (Vec<_>, Vec<_>) = stanzas.into_iter().unzip();
    let partition = EdgePartition::new(n, blocks)?;
    let demand = MulticastDemand::new(sources, destinations)?;

    let power = if any_power {
        let total = match power_total {
            Some(t) => t,
            None => return err(last_line, "power lines given but power total is missing"),
        };
        let mut per_node = vec![total; n];
        for (i, v) in power_nodes {
            if i >= n {
                return Err(NetError::BadPower(format!("node {}", i + 1)).into());
            }
            per_node[i] = v;
        }
        let mut per_edge = vec![total; n * n];
        for (e, v) in power_edges {
            if !e.in_range(n) {
                return Err(NetError::EdgeOutOfRange(e, n).into());
            }
            per_edge[e.index(n)] = v;
        }
        Some(PowerConstraints::new(n, per_edge, per_node, total)?)
    } else {
        None
    };

    Ok(Network::new(partition, channels, demand, power)?)
}

fn node_list(set: &std::collections::BTreeSet<usize>) -> String {
    set.iter()
        .map(|i| (i + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Writes a network in the format [`parse_network`] reads. Parsing the
/// output reproduces the network exactly.
pub fn write_network(net: &Network) -> String {
    let mut s = String::new();
    let n = net.n();
    writeln!(s, "nodes {n}").unwrap();
    writeln!(s, "sources {}", node_list(net.demand().sources())).unwrap();
    writeln!(s, "destinations {}", node_list(net.demand().destinations())).unwrap();
    for (block, ch) in net.partition().blocks().iter().zip(net.channels()) {
        writeln!(s).unwrap();
        let edges = block
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        match ch {
            ChannelModel::Dmc(t) => {
                writeln!(s, "channel dmc").unwrap();
                writeln!(s, "edges {edges}").unwrap();
                let join = |v: &[usize]| {
                    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
                };
                writeln!(s, "inputs {}", join(t.input_sizes())).unwrap();
                writeln!(s, "outputs {}", join(t.output_sizes())).unwrap();
                for x in 0..idx::product(t.input_sizes()) {
                    let row = t
                        .row(x)
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(" ");
                    writeln!(s, "row {row}").unwrap();
                }
            }
            ChannelModel::Awgn { sigma2 } => {
                writeln!(s, "channel awgn").unwrap();
                writeln!(s, "edges {edges}").unwrap();
                writeln!(s, "sigma2 {sigma2}").unwrap();
            }
            ChannelModel::Trivial => {
                writeln!(s, "channel trivial").unwrap();
                writeln!(s, "edges {edges}").unwrap();
            }
            ChannelModel::CoupledXor { refs } => {
                writeln!(s, "channel coupled-xor").unwrap();
                writeln!(s, "edges {edges}").unwrap();
                if !refs.is_empty() {
                    let refs = refs
                        .iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(" ");
                    writeln!(s, "refs {refs}").unwrap();
                }
            }
        }
        writeln!(s, "end").unwrap();
    }
    if let Some(p) = net.power() {
        writeln!(s).unwrap();
        writeln!(s, "power total {}", p.total()).unwrap();
        for i in 0..n {
            writeln!(s, "power node {} {}", i + 1, p.node_cap(i)).unwrap();
        }
        for e in super::all_edges(n) {
            writeln!(s, "power edge {} {}", e, p.edge_cap(e, n)).unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_WAY: &str = "
# two nodes, a noisy pipe each way
nodes 2
sources 1 2
destinations 1 2

channel dmc
edges (1,2)
inputs 2
outputs 2
row 0.9 0.1
row 0.1 0.9
end

channel dmc
edges (2,1)
inputs 2
outputs 2
row 0.95 0.05
row 0.05 0.95
end

channel trivial
edges (1,1) (2,2)
end
";

    #[test]
    fn parses_a_two_node_exchange_network() {
        let net = parse_network(TWO_WAY).unwrap();
        assert_eq!(net.n(), 2);
        assert_eq!(net.alpha(), 3);
        assert_eq!(net.demand().sources().len(), 2);
    }

    #[test]
    fn round_trip_is_exact() {
        let net = parse_network(TWO_WAY).unwrap();
        let text = write_network(&net);
        let again = parse_network(&text).unwrap();
        assert_eq!(net, again);
    }

    #[test]
    fn awgn_round_trip_including_power_is_exact() {
        let text = "
nodes 2
sources 1
destinations 2
channel awgn
edges (1,1)
sigma2 1
end
channel awgn
edges (1,2)
sigma2 0.3
end
channel awgn
edges (2,1)
sigma2 2
end
channel awgn
edges (2,2)
sigma2 1
end
power total 10
power node 1 7.5
power edge (1,2) 5.25
";
        let net = parse_network(text).unwrap();
        assert_eq!(net.power().unwrap().node_cap(0), 7.5);
        // unspecified entries default to the total budget
        assert_eq!(net.power().unwrap().node_cap(1), 10.0);
        let again = parse_network(&write_network(&net)).unwrap();
        assert_eq!(net, again);
    }

    #[test]
    fn bad_row_sum_reports_the_row() {
        let text = "
nodes 1
sources 1
destinations 1
channel dmc
edges (1,1)
inputs 2
outputs 2
row 0.25 0.25
row 0.5 0.5
end
";
        match parse_network(text) {
            Err(FormatError::Net(NetError::RowSum { row: 0, .. })) => {}
            other => panic!("expected row-sum rejection, got {other:?}"),
        }
    }

    #[test]
    fn unknown_directive_names_the_line() {
        let text = "nodes 2\nwires (1,2)\n";
        match parse_network(text) {
            Err(FormatError::Parse { line: 2, .. }) => {}
            other => panic!("expected parse error on line 2, got {other:?}"),
        }
    }

    #[test]
    fn unterminated_stanza_is_reported() {
        let text = "nodes 1\nsources 1\ndestinations 1\nchannel trivial\nedges (1,1)\n";
        assert!(matches!(
            parse_network(text),
            Err(FormatError::Parse { line: 4, .. })
        ));
    }
}
