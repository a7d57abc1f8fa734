use serde::Serialize;

use crate::graph::{MixedGraph, NodeSet};
use crate::separation::subsets_of_size;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonInjectiveReason {
    /// Some pair carries two of `i → j`, `j → i`, `i ↔ j`.
    NotSimple,
    /// A directed cycle; the witness is its strong component.
    Cyclic,
    /// A bidirected-connected set whose induced directed part has one sink.
    UniqueSink,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalIdVerdict {
    pub injective: bool,
    pub witness: Option<NodeSet>,
    pub reason: Option<NonInjectiveReason>,
}

/// Decides injectivity of `φ_G`.
pub fn global_id(g: &MixedGraph) -> GlobalIdVerdict {
    let not = |w: NodeSet, r| GlobalIdVerdict { injective: false, witness: Some(w), reason: Some(r) };
    for (t, h) in g.directed_edges() {
        if g.has_directed(h, t) || g.has_bidirected(t, h) {
            return not([t, h].into_iter().collect(), NonInjectiveReason::NotSimple);
        }
    }
    if !g.is_acyclic() {
        let scc = g
            .strongly_connected_components()
            .into_iter()
            .find(|c| c.len() > 1)
            .expect("a cyclic graph has a nontrivial strong component");
        return not(scc.into_iter().collect(), NonInjectiveReason::Cyclic);
    }
    match unique_sink_witness(g) {
        Some(w) => not(w, NonInjectiveReason::UniqueSink),
        None => GlobalIdVerdict { injective: true, witness: None, reason: None },
    }
}

/// A set `S`, `|S| ≥ 2`, connected in `(S, B_S)` whose induced directed
/// graph has exactly one sink.
///
/// For a fixed sink `s` the valid sets are closed under union, so the
/// largest one is the greatest fixpoint of: drop the children of `s`, keep
/// the bidirected component of `s`, drop every other node without a child
/// in the set. Only induced directed edges matter: removing directed edges
/// can only create more sinks.
pub fn unique_sink_witness(g: &MixedGraph) -> Option<NodeSet> {
    (0..g.n()).find_map(|s| largest_with_sink(g, s))
}

fn largest_with_sink(g: &MixedGraph, s: usize) -> Option<NodeSet> {
    let mut set: NodeSet = (0..g.n()).filter(|v| !g.children(s).contains(v)).collect();
    loop {
        let comp = bidirected_component_within(g, &set, s);
        let pruned: NodeSet = comp
            .iter()
            .copied()
            .filter(|&v| v == s || g.children(v).iter().any(|c| comp.contains(c)))
            .collect();
        if pruned == set {
            break;
        }
        set = pruned;
    }
    (set.len() >= 2).then_some(set)
}

fn bidirected_component_within(g: &MixedGraph, set: &NodeSet, s: usize) -> NodeSet {
    let mut comp = NodeSet::from([s]);
    let mut stack = vec![s];
    while let Some(v) = stack.pop() {
        for &w in g.siblings(v) {
            if set.contains(&w) && comp.insert(w) {
                stack.push(w);
            }
        }
    }
    comp
}

/// Checks the defining predicate of a witness directly.
pub fn is_unique_sink_witness(g: &MixedGraph, set: &NodeSet) -> bool {
    if set.len() < 2 {
        return false;
    }
    let first = *set.iter().next().expect("nonempty");
    if bidirected_component_within(g, set, first) != *set {
        return false;
    }
    let sinks = set
        .iter()
        .filter(|&&v| !g.children(v).iter().any(|c| set.contains(c)))
        .count();
    sinks == 1
}

/// Exhaustive search over all node subsets; the oracle for `unique_sink_witness`.
pub fn unique_sink_witness_brute(g: &MixedGraph) -> Option<NodeSet> {
    let all: Vec<usize> = (0..g.n()).collect();
    for k in (2..=g.n()).rev() {
        for s in subsets_of_size(&all, k) {
            let s: NodeSet = s.into_iter().collect();
            if is_unique_sink_witness(g, &s) {
                return Some(s);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::examples;

    #[test]
    fn injective_panels() {
        let a = global_id(&examples::injective_example());
        assert!(a.injective);
        let b = global_id(&examples::non_injective_example());
        assert!(!b.injective);
        let w = b.witness.unwrap();
        assert_eq!(w, (0..4).collect());
        assert!(is_unique_sink_witness(&examples::non_injective_example(), &w));
        assert!(global_id(&examples::seemingly_unrelated()).injective);
    }

    #[test]
    fn two_instruments_not_injective() {
        let v = global_id(&examples::two_instruments());
        assert!(!v.injective);
        assert_eq!(v.witness.unwrap(), NodeSet::from([2, 3]));
    }

    #[test]
    fn non_simple_and_cyclic() {
        let g = MixedGraph::from_edges(&["1", "2"], &[("1", "2")], &[("1", "2")]).unwrap();
        assert_eq!(global_id(&g).reason, Some(NonInjectiveReason::NotSimple));
        assert_eq!(global_id(&examples::directed_cycle(3)).reason, Some(NonInjectiveReason::Cyclic));
    }

    #[test]
    fn fast_matches_brute_on_examples() {
        for g in [
            examples::verma(),
            examples::tian_example(),
            examples::htc_example(),
            examples::htc_gap_a(),
            examples::htc_gap_b(),
            examples::verma_with_sink(),
        ] {
            assert_eq!(unique_sink_witness(&g).is_some(), unique_sink_witness_brute(&g).is_some());
            if let Some(w) = unique_sink_witness(&g) {
                assert!(is_unique_sink_witness(&g, &w));
            }
        }
    }
}
