//! Cut values under product inputs, computed two independent ways.
//!
//! Inputs are one joint distribution per block (product across blocks,
//! arbitrary within a block). [`product_cutset_mi`] sums one conditional
//! MI term per block and requires independent block channels.
//! [`network_joint`] materializes the full law over every edge input and
//! output — including the deliberately coupled blocks — so
//! [`brute_force_joint_mi`] can evaluate the same cut quantity with no
//! decomposition at all. On independent-channel networks the two routes
//! must agree to float noise.

use super::cuts::Cut;
use super::dist::{conditional_mi, Distribution};
use super::InfoError;
use crate::net::{all_edges, idx, Alphabet, ChannelModel, Network, NetworkKind};
use crate::tol;

fn finite(a: Alphabet) -> usize {
    match a {
        Alphabet::Finite(s) => s,
        // Callers check `NetworkKind::Discrete` before asking for sizes.
        Alphabet::Real => unreachable!("alphabet of a discrete network"),
    }
}

fn block_input_shape(net: &Network, h: usize) -> Result<Vec<usize>, InfoError> {
    let m = net.partition().block(h).len();
    Ok(match net.channel(h) {
        ChannelModel::Dmc(t) => t.input_sizes().to_vec(),
        ChannelModel::Trivial => vec![1; m],
        ChannelModel::CoupledXor { .. } => vec![2; m],
        ChannelModel::Awgn { .. } => return Err(InfoError::NotDiscrete),
    })
}

fn check_inputs(net: &Network, inputs: &[Distribution]) -> Result<(), InfoError> {
    if net.kind() != NetworkKind::Discrete {
        return Err(InfoError::NotDiscrete);
    }
    if inputs.len() != net.alpha() {
        return Err(InfoError::InputCount {
            got: inputs.len(),
            want: net.alpha(),
        });
    }
    for (h, d) in inputs.iter().enumerate() {
        if d.shape() != block_input_shape(net, h)? {
            return Err(InfoError::InputShape(h));
        }
    }
    Ok(())
}

/// One uniform input distribution per block, shaped to the channels.
pub fn uniform_inputs(net: &Network) -> Result<Vec<Distribution>, InfoError> {
    (0..net.alpha())
        .map(|h| Distribution::uniform(block_input_shape(net, h)?))
        .collect()
}

/// Sum over blocks of `I(X_block∩(T×I); Y_block∩(I×Tᶜ) | X_block∩(Tᶜ×I))`
/// under the given per-block inputs. Defined only when block channels are
/// independent, so coupled blocks are rejected.
pub fn product_cutset_mi(
    net: &Network,
    cut: &Cut,
    inputs: &[Distribution],
) -> Result<f64, InfoError> {
    check_inputs(net, inputs)?;
    if cut.n() != net.n() {
        return Err(InfoError::CutNodes {
            got: cut.n(),
            want: net.n(),
        });
    }
    let mut total = 0.0;
    for (h, (block, ch)) in net
        .partition()
        .blocks()
        .iter()
        .zip(net.channels())
        .enumerate()
    {
        let t = match ch {
            ChannelModel::Trivial => continue, // one-letter alphabets carry nothing
            ChannelModel::Dmc(t) => t,
            ChannelModel::CoupledXor { .. } => return Err(InfoError::DependentChannels(h)),
            ChannelModel::Awgn { .. } => return Err(InfoError::NotDiscrete),
        };

        // Joint over [block inputs..., block outputs...]: p(x) q(y|x).
        let n_out = t.n_outputs();
        let mut p = Vec::with_capacity(t.n_inputs() * n_out);
        for (x, &px) in inputs[h].probs().iter().enumerate() {
            p.extend(t.row(x).iter().map(|&q| px * q));
        }
        let shape: Vec<usize> = t
            .input_sizes()
            .iter()
            .chain(t.output_sizes())
            .copied()
            .collect();
        let joint = Distribution::new(shape, p)?;

        let m = block.len();
        let a: Vec<usize> = (0..m).filter(|&k| cut.contains(block[k].from)).collect();
        let c: Vec<usize> = (0..m).filter(|&k| !cut.contains(block[k].from)).collect();
        let b: Vec<usize> = (0..m)
            .filter(|&k| !cut.contains(block[k].to))
            .map(|k| m + k)
            .collect();
        total += conditional_mi(&joint, &a, &b, &c)?;
    }
    Ok(total)
}

/// The full law of a discrete network under product inputs, over `2n²`
/// axes: inputs of every edge in canonical order, then outputs of every
/// edge in canonical order. Coupled blocks contribute their deterministic
/// indicator, so this is the one place the exact analysis can follow a
/// network outside the independent-channels class.
pub fn network_joint(net: &Network, inputs: &[Distribution]) -> Result<Distribution, InfoError> {
    check_inputs(net, inputs)?;
    let n = net.n();
    let n2 = n * n;
    let mut shape = Vec::with_capacity(2 * n2);
    shape.extend(all_edges(n).map(|e| finite(net.input_alphabet(e))));
    shape.extend(all_edges(n).map(|e| finite(net.output_alphabet(e))));
    let total = idx::checked_product(&shape).ok_or(InfoError::TooLarge {
        entries: usize::MAX,
    })?;
    if total > tol::TABLE_CAP {
        return Err(InfoError::TooLarge { entries: total });
    }

    let blocks = net.partition().blocks();
    let mut p = Vec::with_capacity(total);
    let mut digits = vec![0usize; shape.len()];
    for _ in 0..total {
        let mut cell = 1.0;
        for (h, (block, ch)) in blocks.iter().zip(net.channels()).enumerate() {
            let x_flat = {
                let mut k = 0;
                for (pos, e) in block.iter().enumerate() {
                    k = k * inputs[h].shape()[pos] + digits[e.index(n)];
                }
                k
            };
            cell *= inputs[h].probs()[x_flat];
            match ch {
                ChannelModel::Trivial => {}
                ChannelModel::Dmc(t) => {
                    let mut y_flat = 0;
                    for (pos, e) in block.iter().enumerate() {
                        y_flat = y_flat * t.output_sizes()[pos] + digits[n2 + e.index(n)];
                    }
                    cell *= t.prob(x_flat, y_flat);
                }
                ChannelModel::CoupledXor { refs } => {
                    let mut bit = 0usize;
                    for e in block {
                        bit ^= digits[e.index(n)];
                    }
                    for r in refs {
                        bit ^= digits[n2 + r.index(n)];
                    }
                    if block.iter().any(|e| digits[n2 + e.index(n)] != bit) {
                        cell = 0.0;
                    }
                }
                ChannelModel::Awgn { .. } => return Err(InfoError::NotDiscrete),
            }
            if cell == 0.0 {
                break;
            }
        }
        p.push(cell);
        idx::advance(&mut digits, &shape);
    }
    Distribution::new(shape, p)
}

/// `I(X_{T×I}; Y_{I×Tᶜ} | X_{Tᶜ×I})` evaluated directly on a full network
/// law laid out as [`network_joint`] produces it.
pub fn brute_force_joint_mi(
    joint: &Distribution,
    n: usize,
    cut: &Cut,
) -> Result<f64, InfoError> {
    if cut.n() != n {
        return Err(InfoError::CutNodes { got: cut.n(), want: n });
    }
    let n2 = n * n;
    if joint.shape().len() != 2 * n2 {
        return Err(InfoError::JointLayout);
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut c = Vec::new();
    for e in all_edges(n) {
        if cut.contains(e.from) {
            a.push(e.index(n));
        } else {
            c.push(e.index(n));
        }
        if !cut.contains(e.to) {
            b.push(n2 + e.index(n));
        }
    }
    conditional_mi(joint, &a, &b, &c)
}
