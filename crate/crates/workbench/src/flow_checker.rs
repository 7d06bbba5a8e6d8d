//! Parity-flow feasibility analysis of error propagation through the
//! four-pair logical purification circuit.
//!
//! Each party holds one block of four encoded Bell pairs. Transversal CNOTs
//! are applied in the order (1→2), (3→4), (3→1); pairs 2 and 4 are then
//! measured destructively in the Z basis, pair 3 in the X basis, and the two
//! parties compare outcomes, keeping pair 1 only if all comparisons agree.
//!
//! Error propagation is modelled as a directed network per error axis. A
//! vertex is one block at one timestep; an edge carries the parity (mod 2) of
//! the errors flowing through it. Sources attach to the components that can
//! fail: the eight encoding interfaces (`N1..Q1` for the first party,
//! `N2..Q2` for the second), the four raw Bell pairs (`SC1..SC4`), the six
//! CNOT boxes (`A`,`B`,`C` first party, `G`,`H`,`I` second party, each with
//! one injection edge per output qubit), and the comparison measurements
//! (`SA7`, `SA12`, `SB7`, `SB12` on the Z-measured pairs for the X network;
//! `SA10`, `SB10` on the X-measured pair for the Z network). A saturation
//! pattern of source edges is *feasible* when every comparison sees even
//! parity (the pair is accepted) while the kept pair sees odd parity (it is
//! nevertheless bad).
//!
//! Component weights count underlying physical faults: a bad interface or a
//! raw-pair error is one fault, while a CNOT or measurement box needs two
//! faults to fail, so its sources weigh two. With this accounting there are
//! no feasible weight-1 patterns, matching the circuit's fault-tolerance.

use std::collections::BTreeSet;

use crate::pauli_core::Axis;

/// One directed edge of the propagation network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowEdge {
    pub from: usize,
    pub to: usize,
    pub capacity: u32,
}

/// A source edge together with the fallible component it belongs to and the
/// number of physical faults that component's failure represents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceEdge {
    pub edge: usize,
    pub component: String,
    pub weight: usize,
}

/// Propagation network for one error axis.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    pub axis: Axis,
    pub vertex_names: Vec<String>,
    pub edges: Vec<FlowEdge>,
    pub sources: Vec<SourceEdge>,
    /// Edges into the sink that must carry even parity (comparisons agree).
    pub even_sinks: Vec<usize>,
    /// Edge into the sink that must carry odd parity (kept pair bad).
    pub odd_sink: usize,
}

/// A feasible saturation pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibleSolution {
    /// Indices into `FlowNetwork::sources`.
    pub saturated: Vec<usize>,
    /// Distinct component labels, sorted.
    pub components: Vec<String>,
    /// Total physical-fault weight of the pattern.
    pub weight: usize,
    /// Parity carried by every edge.
    pub flows: Vec<u8>,
}

/// CNOT schedule: (control pair, target pair), applied at timesteps 1..=3.
const GATES: [(usize, usize); 3] = [(1, 2), (3, 4), (3, 1)];

/// Component labels of the CNOT boxes, per party then per gate.
const CNOT_LABELS: [[&str; 3]; 2] = [["A", "B", "C"], ["G", "H", "I"]];

struct Builder {
    names: Vec<String>,
    edges: Vec<FlowEdge>,
    sources: Vec<SourceEdge>,
}

impl Builder {
    fn vertex(&mut self, name: &str) -> usize {
        self.names.push(name.to_string());
        self.names.len() - 1
    }

    fn edge(&mut self, from: usize, to: usize, capacity: u32) -> usize {
        self.edges.push(FlowEdge { from, to, capacity });
        self.edges.len() - 1
    }

    fn source(&mut self, s: usize, to: usize, component: &str, weight: usize) {
        let edge = self.edge(s, to, 1);
        self.sources.push(SourceEdge {
            edge,
            component: component.to_string(),
            weight,
        });
    }
}

/// Build the propagation network for the given error axis.
pub fn build_network(axis: Axis) -> FlowNetwork {
    let mut b = Builder {
        names: Vec::new(),
        edges: Vec::new(),
        sources: Vec::new(),
    };
    let s = b.vertex("S");
    // Block vertices v[party][pair 1..=4][timestep 0..=3].
    let mut v = [[[0usize; 4]; 5]; 2];
    for t in 0..=3 {
        for (p, party) in ["a", "b"].iter().enumerate() {
            for pair in 1..=4 {
                v[p][pair][t] = b.vertex(&format!("{party}{pair}.t{t}"));
            }
        }
    }
    // Timestep chains and gate branches. X errors copy control -> target,
    // Z errors copy target -> control.
    for (step, &(c, tq)) in GATES.iter().enumerate() {
        let t = step + 1;
        for p in 0..2 {
            for pair in 1..=4 {
                b.edge(v[p][pair][t - 1], v[p][pair][t], 4);
            }
            match axis {
                Axis::X => b.edge(v[p][c][t - 1], v[p][tq][t], 4),
                Axis::Z => b.edge(v[p][tq][t - 1], v[p][c][t], 4),
                Axis::Y => panic!("flow networks track X or Z propagation only"),
            };
        }
    }
    // Interface sources, one per party and pair.
    for (p, labels) in [["N1", "O1", "P1", "Q1"], ["N2", "O2", "P2", "Q2"]]
        .iter()
        .enumerate()
    {
        for (pair, label) in labels.iter().enumerate() {
            b.source(s, v[p][pair + 1][0], label, 1);
        }
    }
    // Raw Bell-pair sources: a pair error acts on the first party's block.
    for pair in 1..=4 {
        b.source(s, v[0][pair][0], &format!("SC{pair}"), 1);
    }
    // CNOT boxes: one injection edge per output qubit, after the gate.
    for (step, &(c, tq)) in GATES.iter().enumerate() {
        let t = step + 1;
        for p in 0..2 {
            b.source(s, v[p][c][t], CNOT_LABELS[p][step], 2);
            b.source(s, v[p][tq][t], CNOT_LABELS[p][step], 2);
        }
    }
    // Comparison and kept-pair sinks. X errors flip Z-basis outcomes
    // (pairs 2 and 4); Z errors flip the X-basis outcome (pair 3).
    let t_sink = b.vertex("T");
    let mut even_sinks = Vec::new();
    let (checked, absorbed): (&[usize], &[usize]) = match axis {
        Axis::X => (&[2, 4], &[3]),
        Axis::Z => (&[3], &[2, 4]),
        Axis::Y => panic!("flow networks track X or Z propagation only"),
    };
    for (i, &pair) in checked.iter().enumerate() {
        let cmp = b.vertex(&format!("cmp{pair}"));
        b.edge(v[0][pair][3], cmp, 4);
        b.edge(v[1][pair][3], cmp, 4);
        // Measurement boxes feeding this comparison, one per party.
        let slot = match (axis, i) {
            (Axis::X, 0) => 7,
            (Axis::X, _) => 12,
            (Axis::Z, _) => 10,
            (Axis::Y, _) => unreachable!("rejected above"),
        };
        b.source(s, cmp, &format!("SA{slot}"), 2);
        b.source(s, cmp, &format!("SB{slot}"), 2);
        even_sinks.push(b.edge(cmp, t_sink, 4));
    }
    for &pair in absorbed {
        b.edge(v[0][pair][3], t_sink, 4);
        b.edge(v[1][pair][3], t_sink, 4);
    }
    let d1 = b.vertex("D1");
    b.edge(v[0][1][3], d1, 4);
    b.edge(v[1][1][3], d1, 4);
    let odd_sink = b.edge(d1, t_sink, 4);
    FlowNetwork {
        axis,
        vertex_names: b.names,
        edges: b.edges,
        sources: b.sources,
        even_sinks,
        odd_sink,
    }
}

impl FlowNetwork {
    /// Parity carried by every edge when the given source edges (indices into
    /// `sources`) are saturated. Vertices XOR their in-parities and emit the
    /// result on every out-edge.
    pub fn propagate(&self, saturated: &[usize]) -> Vec<u8> {
        let sat: BTreeSet<usize> = saturated.iter().map(|&i| self.sources[i].edge).collect();
        let mut parity = vec![0u8; self.vertex_names.len()];
        let mut flows = vec![0u8; self.edges.len()];
        // Deposit source parities first, then sweep the remaining vertices in
        // index order, which is topological for all non-source edges.
        for (i, e) in self.edges.iter().enumerate() {
            if e.from == 0 {
                flows[i] = u8::from(sat.contains(&i));
                parity[e.to] ^= flows[i];
            }
        }
        for u in 1..self.vertex_names.len() {
            for (i, e) in self.edges.iter().enumerate() {
                if e.from == u {
                    flows[i] = parity[u];
                    parity[e.to] ^= flows[i];
                }
            }
        }
        flows
    }

    /// Whether a saturation pattern is accepted by every comparison yet
    /// leaves the kept pair bad.
    pub fn is_feasible(&self, saturated: &[usize]) -> bool {
        let flows = self.propagate(saturated);
        self.even_sinks.iter().all(|&e| flows[e] == 0) && flows[self.odd_sink] == 1
    }

    /// Total physical-fault weight of a saturation pattern: each distinct
    /// component counts once with its weight.
    pub fn pattern_weight(&self, saturated: &[usize]) -> usize {
        let comps: BTreeSet<&str> = saturated
            .iter()
            .map(|&i| self.sources[i].component.as_str())
            .collect();
        comps
            .iter()
            .map(|c| {
                self.sources
                    .iter()
                    .find(|se| se.component == *c)
                    .map_or(0, |se| se.weight)
            })
            .sum()
    }
}

/// Exhaustively enumerate feasible saturation patterns whose physical-fault
/// weight does not exceed `max_source_weight`.
pub fn enumerate_feasible(net: &FlowNetwork, max_source_weight: usize) -> Vec<FeasibleSolution> {
    assert!(max_source_weight <= 4, "desk-scale enumeration only");
    let n = net.sources.len();
    let mut out = Vec::new();
    // Subset sizes are bounded by the weight bound because every component
    // weighs at least 1 and contributes at most 2 edges.
    let max_edges = max_source_weight.min(n) * 2;
    let mut stack: Vec<usize> = Vec::new();
    fn rec(
        net: &FlowNetwork,
        start: usize,
        stack: &mut Vec<usize>,
        max_edges: usize,
        max_weight: usize,
        out: &mut Vec<FeasibleSolution>,
    ) {
        if !stack.is_empty() {
            // Weight only grows as edges are added, so prune here.
            let weight = net.pattern_weight(stack);
            if weight > max_weight {
                return;
            }
            if net.is_feasible(stack) {
                let components: BTreeSet<String> = stack
                    .iter()
                    .map(|&i| net.sources[i].component.clone())
                    .collect();
                out.push(FeasibleSolution {
                    saturated: stack.clone(),
                    components: components.into_iter().collect(),
                    weight,
                    flows: net.propagate(stack),
                });
            }
        }
        if stack.len() == max_edges {
            return;
        }
        for i in start..net.sources.len() {
            stack.push(i);
            rec(net, i + 1, stack, max_edges, max_weight, out);
            stack.pop();
        }
    }
    rec(net, 0, &mut stack, max_edges.min(n), max_source_weight, &mut out);
    out.sort_by(|a, b| (a.weight, &a.components).cmp(&(b.weight, &b.components)));
    out
}

/// The weight-2 feasible patterns made of exactly two bad interfaces,
/// reported as concatenated labels like `"N1O1"`, deduplicated.
pub fn order2_interface_pairs(net: &FlowNetwork) -> BTreeSet<String> {
    enumerate_feasible(net, 2)
        .into_iter()
        .filter(|sol| {
            sol.components.len() == 2
                && sol
                    .components
                    .iter()
                    .all(|c| matches!(c.chars().next(), Some('N' | 'O' | 'P' | 'Q')))
        })
        .map(|sol| sol.components.concat())
        .collect()
}

/// Swap the two parties in an interface label (`N1` <-> `N2`).
fn swap_party(label: &str) -> String {
    let (head, digit) = label.split_at(label.len() - 1);
    let flipped = if digit == "1" { "2" } else { "1" };
    format!("{head}{flipped}")
}

/// Quotient a set of interface pairs by the party-swap symmetry, keeping the
/// lexicographically smaller representative of each orbit.
pub fn canonical_interface_pairs(pairs: &BTreeSet<String>) -> BTreeSet<String> {
    pairs
        .iter()
        .map(|p| {
            let (a, b) = p.split_at(2);
            let mut swapped = [swap_party(a), swap_party(b)];
            swapped.sort();
            let mirror = swapped.concat();
            if mirror < *p {
                mirror
            } else {
                p.clone()
            }
        })
        .collect()
}

/// For every CNOT box, the two-qubit error classes (control letter then
/// target letter) whose injection is accepted by all comparisons while
/// leaving the kept pair bad. Uses both propagation networks jointly.
pub fn cnot_failure_classes() -> Vec<(String, Vec<String>)> {
    let net_x = build_network(Axis::X);
    let net_z = build_network(Axis::Z);
    // Source indices of each box's (control, target) injection edges.
    let slots = |net: &FlowNetwork, label: &str| -> (usize, usize) {
        let found: Vec<usize> = net
            .sources
            .iter()
            .enumerate()
            .filter(|(_, se)| se.component == label)
            .map(|(i, _)| i)
            .collect();
        (found[0], found[1])
    };
    let paulis = ['I', 'X', 'Y', 'Z'];
    let mut out = Vec::new();
    for party in CNOT_LABELS {
        for label in party {
            let (xc, xt) = slots(&net_x, label);
            let (zc, zt) = slots(&net_z, label);
            let mut classes = Vec::new();
            for pc in paulis {
                for pt in paulis {
                    if pc == 'I' && pt == 'I' {
                        continue;
                    }
                    let mut sat_x = Vec::new();
                    let mut sat_z = Vec::new();
                    if matches!(pc, 'X' | 'Y') {
                        sat_x.push(xc);
                    }
                    if matches!(pt, 'X' | 'Y') {
                        sat_x.push(xt);
                    }
                    if matches!(pc, 'Z' | 'Y') {
                        sat_z.push(zc);
                    }
                    if matches!(pt, 'Z' | 'Y') {
                        sat_z.push(zt);
                    }
                    let fx = net_x.propagate(&sat_x);
                    let fz = net_z.propagate(&sat_z);
                    let accepted = net_x.even_sinks.iter().all(|&e| fx[e] == 0)
                        && net_z.even_sinks.iter().all(|&e| fz[e] == 0);
                    let bad = fx[net_x.odd_sink] == 1 || fz[net_z.odd_sink] == 1;
                    if accepted && bad {
                        classes.push(format!("{pc}{pt}"));
                    }
                }
            }
            out.push((label.to_string(), classes));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn networks_differ_between_axes() {
        let x = build_network(Axis::X);
        let z = build_network(Axis::Z);
        let branch = |n: &FlowNetwork| -> Vec<(String, String)> {
            n.edges
                .iter()
                .filter(|e| e.from != 0)
                .map(|e| {
                    (
                        n.vertex_names[e.from].clone(),
                        n.vertex_names[e.to].clone(),
                    )
                })
                .collect()
        };
        assert_ne!(branch(&x), branch(&z));
    }

    #[test]
    fn no_single_fault_pattern_is_feasible() {
        for net in [build_network(Axis::X), build_network(Axis::Z)] {
            assert!(enumerate_feasible(&net, 1).is_empty());
        }
    }

    #[test]
    fn parity_conservation_holds_on_every_solution() {
        let net = build_network(Axis::X);
        for sol in enumerate_feasible(&net, 3) {
            // Recheck independently: each internal vertex's out-edges all
            // carry the XOR of its in-parities.
            for vtx in 1..net.vertex_names.len() {
                let inp: u8 = net
                    .edges
                    .iter()
                    .zip(&sol.flows)
                    .filter(|(e, _)| e.to == vtx)
                    .map(|(_, f)| f)
                    .fold(0, |a, b| a ^ b);
                for (e, f) in net.edges.iter().zip(&sol.flows) {
                    if e.from == vtx {
                        assert_eq!(*f, inp, "vertex {}", net.vertex_names[vtx]);
                    }
                }
            }
        }
    }

    #[test]
    fn bit_error_interface_pairs_are_the_expected_eight() {
        let net = build_network(Axis::X);
        let pairs = order2_interface_pairs(&net);
        assert_eq!(
            pairs,
            set(&["N1O1", "N1O2", "N2O1", "N2O2", "P1Q1", "P1Q2", "P2Q1", "P2Q2"])
        );
        // The example solution: both of the first party's first two
        // interfaces bad, errors cancelling on the second block.
        assert!(pairs.contains("N1O1"));
    }

    #[test]
    fn phase_error_interface_pairs_quotient_to_the_expected_list() {
        let net = build_network(Axis::Z);
        let pairs = order2_interface_pairs(&net);
        assert_eq!(pairs.len(), 16);
        assert_eq!(
            canonical_interface_pairs(&pairs),
            set(&["N1P1", "N1P2", "N1Q1", "N1Q2", "O1P1", "O1P2", "O1Q1", "O1Q2"])
        );
    }

    #[test]
    fn cnot_box_failure_classes_match_topology() {
        let classes = cnot_failure_classes();
        for (label, cls) in &classes {
            match label.as_str() {
                "A" | "B" | "G" | "H" => assert_eq!(cls, &["XI", "XZ"], "{label}"),
                "C" | "I" => {
                    assert_eq!(cls, &["IX", "IY", "IZ", "XX", "XY", "XZ"], "{label}")
                }
                other => panic!("unexpected box {other}"),
            }
        }
        assert_eq!(classes.len(), 6);
    }

    #[test]
    fn disjoint_solutions_cancel_when_combined() {
        // Two feasible patterns each flip the kept pair once; together the
        // flips cancel, so the union must be infeasible.
        let net = build_network(Axis::X);
        let find = |a: &str, b: &str| -> Vec<usize> {
            net.sources
                .iter()
                .enumerate()
                .filter(|(_, se)| se.component == a || se.component == b)
                .map(|(i, _)| i)
                .collect()
        };
        let first = find("N1", "O1");
        let second = find("P1", "Q1");
        assert!(net.is_feasible(&first));
        assert!(net.is_feasible(&second));
        let union: Vec<usize> = first.into_iter().chain(second).collect();
        assert!(!net.is_feasible(&union));
    }

    #[test]
    fn no_same_axis_interface_triples_are_feasible() {
        for net in [build_network(Axis::X), build_network(Axis::Z)] {
            let triples: Vec<FeasibleSolution> = enumerate_feasible(&net, 3)
                .into_iter()
                .filter(|sol| {
                    sol.components.len() == 3
                        && sol
                            .components
                            .iter()
                            .all(|c| matches!(c.chars().next(), Some('N' | 'O' | 'P' | 'Q')))
                })
                .collect();
            assert!(triples.is_empty(), "{:?}", triples);
        }
    }

    #[test]
    fn raw_pair_singletons_are_all_detected() {
        for net in [build_network(Axis::X), build_network(Axis::Z)] {
            for (i, se) in net.sources.iter().enumerate() {
                if se.component.starts_with("SC") {
                    assert!(!net.is_feasible(&[i]), "{}", se.component);
                }
            }
        }
    }
}
