//! Codes the engine can run: the plugin trait, a small shelf of reference
//! codes for the built-in scenarios, and a name registry.

use crate::net::{Alphabet, EdgeId, Network};

use super::{MessageBits, NodeView, RecvView, SandboxViolation, Sym};

/// A code under test. One instance serves every node: the engine calls
/// `encode` for each firing edge with that edge's permitted view, and
/// `decode` at each destination once the slots run out.
pub trait CodePlugin: Sync {
    fn name(&self) -> &'static str;

    /// Message length in bits per node. Must be zero for non-sources.
    fn message_bits(&self, net: &Network, slots: usize) -> Vec<usize>;

    /// The symbol edge `e` transmits at `slot` (1-based). `msg` is the
    /// message of `e.from`; every look at received symbols goes through
    /// `rx` and must respect the delay profile.
    fn encode(
        &self,
        net: &Network,
        e: EdgeId,
        slot: usize,
        msg: &MessageBits,
        rx: &RecvView,
    ) -> Result<Sym, SandboxViolation>;

    /// Reconstruct every source's message at destination `node`, aligned
    /// with the ascending source list. `own` is the node's own message.
    fn decode(
        &self,
        net: &Network,
        node: usize,
        own: &MessageBits,
        rx: &NodeView,
        slots: usize,
    ) -> Vec<MessageBits>;
}

/// The do-nothing symbol for an edge: letter 0 or the real 0.
fn quiet(net: &Network, e: EdgeId) -> Sym {
    match net.input_alphabet(e) {
        Alphabet::Finite(_) => Sym::Discrete(0),
        Alphabet::Real => Sym::Real(0.0),
    }
}

/// Message bit `k` as a letter, 0 past the end.
fn bit_at(msg: &MessageBits, k: usize) -> u32 {
    (k < msg.len() && msg.bit(k)) as u32
}

/// Sends nothing, decodes empty messages. The floor every network clears.
struct ZeroRate;

impl CodePlugin for ZeroRate {
    fn name(&self) -> &'static str {
        "zero_rate"
    }

    fn message_bits(&self, net: &Network, _slots: usize) -> Vec<usize> {
        vec![0; net.n()]
    }

    fn encode(
        &self,
        net: &Network,
        e: EdgeId,
        _slot: usize,
        _msg: &MessageBits,
        _rx: &RecvView,
    ) -> Result<Sym, SandboxViolation> {
        Ok(quiet(net, e))
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

/// One fresh message bit per slot on every binary-input outgoing edge; the
/// decoder takes the received bits at face value.
struct Uncoded;

impl CodePlugin for Uncoded {
    fn name(&self) -> &'static str {
        "uncoded"
    }

    fn message_bits(&self, net: &Network, slots: usize) -> Vec<usize> {
        (0..net.n())
            .map(|i| {
                if net.demand().is_source(i) {
                    slots
                } else {
                    0
                }
            })
            .collect()
    }

    fn encode(
        &self,
        net: &Network,
        e: EdgeId,
        slot: usize,
        msg: &MessageBits,
        _rx: &RecvView,
    ) -> Result<Sym, SandboxViolation> {
        if msg.is_empty() {
            return Ok(quiet(net, e));
        }
        match net.input_alphabet(e) {
            Alphabet::Finite(k) if k >= 2 => Ok(Sym::Discrete(bit_at(msg, slot - 1))),
            _ => Ok(quiet(net, e)),
        }
    }

    fn decode(
        &self,
        net: &Network,
        node: usize,
        own: &MessageBits,
        rx: &NodeView,
        slots: usize,
    ) -> Vec<MessageBits> {
        net.demand()
            .sources()
            .iter()
            .map(|&s| {
                if s == node {
                    return own.clone();
                }
                let bits = (0..slots)
                    .map(|k| {
                        rx.received_from(s)[k]
                            .discrete()
                            .map_or(false, |v| v & 1 == 1)
                    })
                    .collect();
                MessageBits::from_bits(bits)
            })
            .collect()
    }
}

const REP: usize = 15;

/// Each message bit repeated over [`REP`] consecutive slots, decoded by
/// majority vote.
struct Repetition;

impl CodePlugin for Repetition {
    fn name(&self) -> &'static str {
        "rep15"
    }

    fn message_bits(&self, net: &Network, slots: usize) -> Vec<usize> {
        (0..net.n())
            .map(|i| {
                if net.demand().is_source(i) {
                    slots / REP
                } else {
                    0
                }
            })
            .collect()
    }

    fn encode(
        &self,
        net: &Network,
        e: EdgeId,
        slot: usize,
        msg: &MessageBits,
        _rx: &RecvView,
    ) -> Result<Sym, SandboxViolation> {
        if msg.is_empty() {
            return Ok(quiet(net, e));
        }
        match net.input_alphabet(e) {
            Alphabet::Finite(k) if k >= 2 => Ok(Sym::Discrete(bit_at(msg, (slot - 1) / REP))),
            _ => Ok(quiet(net, e)),
        }
    }

    fn decode(
        &self,
        net: &Network,
        node: usize,
        own: &MessageBits,
        rx: &NodeView,
        slots: usize,
    ) -> Vec<MessageBits> {
        net.demand()
            .sources()
            .iter()
            .map(|&s| {
                if s == node {
                    return own.clone();
                }
                let bits = (0..slots / REP)
                    .map(|c| {
                        let ones = rx.received_from(s)[c * REP..(c + 1) * REP]
                            .iter()
                            .filter(|y| y.discrete().map_or(false, |v| v & 1 == 1))
                            .count();
                        ones > REP / 2
                    })
                    .collect();
                MessageBits::from_bits(bits)
            })
            .collect()
    }
}

/// Noise cancellation over the coupled sink block: sources send fresh bits,
/// relays forward the same-slot symbol their zero-delay grant exposes, and
/// the coupled channel xors the relayed noise out of the sink's reception.
struct CancelForward;

impl CodePlugin for CancelForward {
    fn name(&self) -> &'static str {
        "cancel_forward"
    }

    fn message_bits(&self, net: &Network, slots: usize) -> Vec<usize> {
        (0..net.n())
            .map(|i| {
                if net.demand().is_source(i) {
                    slots
                } else {
                    0
                }
            })
            .collect()
    }

    fn encode(
        &self,
        net: &Network,
        e: EdgeId,
        slot: usize,
        msg: &MessageBits,
        rx: &RecvView,
    ) -> Result<Sym, SandboxViolation> {
        if !msg.is_empty() {
            return Ok(Sym::Discrete(bit_at(msg, slot - 1)));
        }
        if let Some(l) = rx.same_slot_sources().next() {
            let y = rx.read(l, slot)?;
            return Ok(Sym::Discrete(y.discrete().unwrap_or(0) & 1));
        }
        Ok(quiet(net, e))
    }

    fn decode(
        &self,
        net: &Network,
        node: usize,
        own: &MessageBits,
        rx: &NodeView,
        slots: usize,
    ) -> Vec<MessageBits> {
        Uncoded.decode(net, node, own, rx, slots)
    }
}

/// [`CancelForward`] without the same-slot reads: relays forward their
/// noisiest incoming edge one slot late, which no longer cancels anything.
struct CancelDelayed;

impl CodePlugin for CancelDelayed {
    fn name(&self) -> &'static str {
        "cancel_delayed"
    }

    fn message_bits(&self, net: &Network, slots: usize) -> Vec<usize> {
        CancelForward.message_bits(net, slots)
    }

    fn encode(
        &self,
        net: &Network,
        e: EdgeId,
        slot: usize,
        msg: &MessageBits,
        rx: &RecvView,
    ) -> Result<Sym, SandboxViolation> {
        if !msg.is_empty() {
            return Ok(Sym::Discrete(bit_at(msg, slot - 1)));
        }
        let noisy = (0..net.n()).find(|&l| {
            matches!(net.output_alphabet(EdgeId::new(l, e.from)), Alphabet::Finite(k) if k >= 2)
        });
        match noisy {
            Some(l) if slot >= 2 => {
                let y = rx.read(l, slot - 1)?;
                Ok(Sym::Discrete(y.discrete().unwrap_or(0) & 1))
            }
            _ => Ok(quiet(net, e)),
        }
    }

    fn decode(
        &self,
        net: &Network,
        node: usize,
        own: &MessageBits,
        rx: &NodeView,
        slots: usize,
    ) -> Vec<MessageBits> {
        Uncoded.decode(net, node, own, rx, slots)
    }
}

/// Adversarial probe: its first act is to read its own node's self-loop at
/// the current slot, which no built-in profile grants. Exists to prove the
/// engine refuses ungranted same-slot reads.
struct SameSlotProbe;

impl CodePlugin for SameSlotProbe {
    fn name(&self) -> &'static str {
        "same_slot_probe"
    }

    fn message_bits(&self, net: &Network, _slots: usize) -> Vec<usize> {
        vec![0; net.n()]
    }

    fn encode(
        &self,
        _net: &Network,
        e: EdgeId,
        slot: usize,
        _msg: &MessageBits,
        rx: &RecvView,
    ) -> Result<Sym, SandboxViolation> {
        let y = rx.read(e.from, slot)?;
        Ok(Sym::Discrete(y.discrete().unwrap_or(0)))
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

pub fn lookup_code(name: &str) -> Option<Box<dyn CodePlugin>> {
    match name {
        "cancel_delayed" => Some(Box::new(CancelDelayed)),
        "cancel_forward" => Some(Box::new(CancelForward)),
        "rep15" => Some(Box::new(Repetition)),
        "same_slot_probe" => Some(Box::new(SameSlotProbe)),
        "uncoded" => Some(Box::new(Uncoded)),
        "zero_rate" => Some(Box::new(ZeroRate)),
        _ => None,
    }
}

pub fn code_names() -> &'static [&'static str] {
    &[
        "cancel_delayed",
        "cancel_forward",
        "rep15",
        "same_slot_probe",
        "uncoded",
        "zero_rate",
    ]
}

/// Codes worth running on a built-in scenario (by base name).
pub fn codes_for_scenario(scenario: &str) -> &'static [&'static str] {
    match scenario {
        "bsc_if" | "bsc_cf" | "trn_in" => &["uncoded", "rep15", "zero_rate"],
        "trn_cn" => &[
            "cancel_forward",
            "cancel_delayed",
            "same_slot_probe",
            "zero_rate",
        ],
        _ => &[],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{builtin_scenario, simulate, SimConfig, SimError};

    #[test]
    fn registry_is_sorted_and_self_consistent() {
        let names = code_names();
        let mut sorted = names.to_vec();
        sorted.sort_unstable();
        assert_eq!(names, sorted.as_slice());
        for name in names {
            assert_eq!(lookup_code(name).unwrap().name(), *name);
        }
        assert!(lookup_code("no_such_code").is_none());
    }

    #[test]
    fn scenario_shelves_only_list_known_codes() {
        for base in ["bsc_if", "bsc_cf", "trn_cn", "trn_in"] {
            let shelf = codes_for_scenario(base);
            assert!(!shelf.is_empty());
            for name in shelf {
                assert!(lookup_code(name).is_some(), "{name}");
            }
        }
        assert!(codes_for_scenario("nope").is_empty());
    }

    #[test]
    fn message_lengths_follow_the_demand() {
        let sc = builtin_scenario("trn_in(0.1)").unwrap();
        assert_eq!(
            Uncoded.message_bits(&sc.net, 30),
            vec![30, 0, 0, 0]
        );
        assert_eq!(
            Repetition.message_bits(&sc.net, 31),
            vec![2, 0, 0, 0]
        );
    }

    #[test]
    fn every_shelved_code_runs_on_its_scenario() {
        for spec in ["bsc_if(0.1,0.1)", "bsc_cf(0.1)", "trn_cn", "trn_in(0.1)"] {
            let sc = builtin_scenario(spec).unwrap();
            for name in codes_for_scenario(sc.name) {
                let code = lookup_code(name).unwrap();
                let cfg = SimConfig::new(REP, 2, 1);
                let run = simulate(&sc.net, &sc.seq, &sc.profile, code.as_ref(), &cfg);
                if *name == "same_slot_probe" {
                    assert!(matches!(run.unwrap_err(), SimError::Sandbox(_)), "{spec}");
                } else {
                    run.unwrap_or_else(|e| panic!("{name} on {spec}: {e}"));
                }
            }
        }
    }
}
