use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{MixedGraph, NodeSet};
use crate::separation::subsets_of_size;

/// Y-sets for every node together with a total order `≺` (listed smallest first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HtcCertificate {
    pub y_sets: BTreeMap<usize, NodeSet>,
    pub ordering: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum NecessaryOutcome {
    Holds { y_sets: BTreeMap<usize, NodeSet> },
    Fails,
    /// Graph larger than the search guard, or the search ran out of steps.
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HtcAnalysis {
    /// Nodes solved by the fixpoint, in solve order.
    pub solved: Vec<usize>,
    pub y_sets: BTreeMap<usize, NodeSet>,
    /// Present when every node was solved.
    pub certificate: Option<HtcCertificate>,
    pub necessary: NecessaryOutcome,
}

impl HtcAnalysis {
    pub fn sufficient(&self) -> bool {
        self.certificate.is_some()
    }
}

/// Looks for `Y ⊆ allowed`, `|Y| = |pa(i)|`, with a half-trek system from `Y`
/// to `pa(i)` whose right sides are pairwise disjoint.
pub fn htc_flow_check(g: &MixedGraph, i: usize, allowed: &NodeSet) -> Result<Option<NodeSet>> {
    if allowed.contains(&i) || g.siblings(i).iter().any(|s| allowed.contains(s)) {
        return Err(Error::InvalidArgument(format!(
            "allowed set for node {} contains the node or one of its siblings",
            g.label(i)
        )));
    }
    let pa = g.parents(i);
    if pa.is_empty() {
        return Ok(Some(NodeSet::new()));
    }
    let n = g.n();
    // in(v) = v, out(v) = n + v, chooser L(y) = 2n + y
    let (src, snk) = (3 * n, 3 * n + 1);
    let mut net = FlowNetwork::new(3 * n + 2);
    for v in 0..n {
        net.add_edge(v, n + v, 1);
    }
    for (t, h) in g.directed_edges() {
        net.add_edge(n + t, h, 1);
    }
    let mut choosers = Vec::new();
    for &y in allowed {
        choosers.push((y, net.add_edge(src, 2 * n + y, 1)));
        net.add_edge(2 * n + y, y, 1);
        for &w in g.siblings(y) {
            net.add_edge(2 * n + y, w, 1);
        }
    }
    for &p in pa {
        net.add_edge(n + p, snk, 1);
    }
    if net.max_flow(src, snk) as usize != pa.len() {
        return Ok(None);
    }
    Ok(Some(choosers.into_iter().filter(|&(_, h)| net.flow_on(h) > 0).map(|(y, _)| y).collect()))
}

fn forbidden(g: &MixedGraph, i: usize) -> NodeSet {
    let mut f: NodeSet = g.siblings(i).iter().copied().collect();
    f.insert(i);
    f
}

/// The sufficient fixpoint alone. Within a round nodes are tried in
/// ascending order against the solved set from the start of the round.
pub fn htc_fixpoint(g: &MixedGraph) -> (Vec<usize>, BTreeMap<usize, NodeSet>) {
    let n = g.n();
    let reach: Vec<NodeSet> = (0..n).map(|i| g.half_trek_reachable(i)).collect();
    let mut solved = Vec::new();
    let mut is_solved = vec![false; n];
    let mut y_sets = BTreeMap::new();
    loop {
        let mut new = Vec::new();
        for i in (0..n).filter(|&i| !is_solved[i]) {
            let bad = forbidden(g, i);
            let allowed: NodeSet = (0..n)
                .filter(|v| !bad.contains(v) && (is_solved[*v] || !reach[i].contains(v)))
                .collect();
            if let Some(y) = htc_flow_check(g, i, &allowed).expect("allowed avoids forbidden nodes") {
                new.push(i);
                y_sets.insert(i, y);
            }
        }
        if new.is_empty() {
            return (solved, y_sets);
        }
        for i in new {
            is_solved[i] = true;
            solved.push(i);
        }
    }
}

/// Runs the sufficient fixpoint and, for graphs with at most
/// `necessary_guard` nodes, the search for a family satisfying the
/// necessary condition.
pub fn htc_identifiable(g: &MixedGraph, necessary_guard: usize) -> HtcAnalysis {
    let (solved, y_sets) = htc_fixpoint(g);
    let certificate = (solved.len() == g.n()).then(|| HtcCertificate {
        y_sets: y_sets.clone(),
        ordering: solved.clone(),
    });
    let necessary = match &certificate {
        Some(c) => NecessaryOutcome::Holds { y_sets: c.y_sets.clone() },
        None if g.n() <= necessary_guard => necessary_search(g, 1_000_000),
        None => NecessaryOutcome::Undecided,
    };
    HtcAnalysis { solved, y_sets, certificate, necessary }
}

/// Backtracking search for `{Y_i}` with every `Y_i` satisfying the criterion
/// for `i` and `j ∈ Y_i ⇒ i ∉ Y_j`. Gives up after `max_steps` assignments.
pub fn necessary_search(g: &MixedGraph, max_steps: usize) -> NecessaryOutcome {
    let n = g.n();
    let mut candidates: Vec<(usize, Vec<NodeSet>)> = Vec::with_capacity(n);
    for i in 0..n {
        let k = g.parents(i).len();
        let bad = forbidden(g, i);
        let pool: Vec<usize> = (0..n).filter(|v| !bad.contains(v)).collect();
        let feasible: Vec<NodeSet> = subsets_of_size(&pool, k)
            .into_iter()
            .map(|s| s.into_iter().collect::<NodeSet>())
            .filter(|s| matches!(htc_flow_check(g, i, s), Ok(Some(_))))
            .collect();
        if feasible.is_empty() {
            return NecessaryOutcome::Fails;
        }
        candidates.push((i, feasible));
    }
    candidates.sort_by_key(|(i, c)| (c.len(), *i));
    let mut chosen: Vec<Option<NodeSet>> = vec![None; n];
    let mut steps = 0usize;
    match backtrack(&candidates, 0, &mut chosen, &mut steps, max_steps) {
        Some(true) => NecessaryOutcome::Holds {
            y_sets: chosen.into_iter().enumerate().map(|(i, y)| (i, y.expect("assigned"))).collect(),
        },
        Some(false) => NecessaryOutcome::Fails,
        None => NecessaryOutcome::Undecided,
    }
}

fn backtrack(
    cands: &[(usize, Vec<NodeSet>)],
    depth: usize,
    chosen: &mut Vec<Option<NodeSet>>,
    steps: &mut usize,
    max_steps: usize,
) -> Option<bool> {
    let Some((i, options)) = cands.get(depth) else {
        return Some(true);
    };
    for y in options {
        *steps += 1;
        if *steps > max_steps {
            return None;
        }
        let clash = y.iter().any(|&j| chosen[j].as_ref().is_some_and(|yj| yj.contains(i)));
        if clash {
            continue;
        }
        chosen[*i] = Some(y.clone());
        match backtrack(cands, depth + 1, chosen, steps, max_steps) {
            Some(false) => {}
            other => return other,
        }
        chosen[*i] = None;
    }
    Some(false)
}

/// Problems found when checking a certificate independently of the flow
/// code; empty means valid. Half-trek systems are searched exhaustively,
/// which is only meant for small parent sets.
pub fn check_certificate(g: &MixedGraph, cert: &HtcCertificate) -> Vec<String> {
    let n = g.n();
    let mut problems = Vec::new();
    let mut pos = vec![usize::MAX; n];
    for (k, &v) in cert.ordering.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            problems.push(format!("ordering is not a permutation at position {k}"));
            return problems;
        }
        pos[v] = k;
    }
    if cert.ordering.len() != n {
        problems.push("ordering does not cover every node".into());
        return problems;
    }
    for i in 0..n {
        let Some(y) = cert.y_sets.get(&i) else {
            problems.push(format!("no Y-set for node {}", g.label(i)));
            continue;
        };
        let pa = g.parents(i);
        if y.len() != pa.len() {
            problems.push(format!("|Y| != |pa| for node {}", g.label(i)));
            continue;
        }
        if y.iter().any(|&j| j >= n) || !forbidden(g, i).is_disjoint(y) {
            problems.push(format!("Y-set of node {} contains the node or a sibling", g.label(i)));
            continue;
        }
        let ys: Vec<usize> = y.iter().copied().collect();
        if !has_half_trek_system(g, &ys, pa) {
            problems.push(format!("no half-trek system without sided intersection into pa({})", g.label(i)));
        }
        let reach = g.half_trek_reachable(i);
        for &j in y {
            if reach.contains(&j) && pos[j] > pos[i] {
                problems.push(format!(
                    "node {} in Y-set of {} is half-trek reachable but ordered later",
                    g.label(j),
                    g.label(i)
                ));
            }
        }
    }
    problems
}

/// Right sides of all half-treks from `y` to `p`, as node sets.
fn half_trek_right_sides(g: &MixedGraph, y: usize, p: usize) -> Vec<NodeSet> {
    let mut out = Vec::new();
    let mut starts = vec![y];
    starts.extend(g.siblings(y).iter().copied());
    for s in starts {
        let mut path = vec![s];
        directed_paths(g, s, p, &mut path, &mut out);
    }
    out
}

fn directed_paths(g: &MixedGraph, v: usize, p: usize, path: &mut Vec<usize>, out: &mut Vec<NodeSet>) {
    if v == p {
        out.push(path.iter().copied().collect());
        return;
    }
    for &c in g.children(v) {
        if !path.contains(&c) {
            path.push(c);
            directed_paths(g, c, p, path, out);
            path.pop();
        }
    }
}

/// Exhaustive test for a system of half-treks from `ys` onto `targets`
/// with pairwise disjoint right sides. Left sides are the distinct sources.
pub fn has_half_trek_system(g: &MixedGraph, ys: &[usize], targets: &[usize]) -> bool {
    if ys.len() != targets.len() {
        return false;
    }
    let sides: Vec<Vec<Vec<NodeSet>>> = ys
        .iter()
        .map(|&y| targets.iter().map(|&p| half_trek_right_sides(g, y, p)).collect())
        .collect();
    fn go(sides: &[Vec<Vec<NodeSet>>], k: usize, used_t: &mut Vec<bool>, used: &mut NodeSet) -> bool {
        if k == sides.len() {
            return true;
        }
        for t in 0..used_t.len() {
            if used_t[t] {
                continue;
            }
            for r in &sides[k][t] {
                if r.is_disjoint(used) {
                    used_t[t] = true;
                    used.extend(r.iter().copied());
                    if go(sides, k + 1, used_t, used) {
                        return true;
                    }
                    for v in r {
                        used.remove(v);
                    }
                    used_t[t] = false;
                }
            }
        }
        false
    }
    go(&sides, 0, &mut vec![false; targets.len()], &mut NodeSet::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::examples;

    fn set(v: &[usize]) -> NodeSet {
        v.iter().copied().collect()
    }

    #[test]
    fn flow_check_on_htc_example() {
        let g = examples::htc_example();
        assert_eq!(htc_flow_check(&g, 0, &set(&[1, 4])).unwrap(), Some(set(&[1, 4])));
        assert_eq!(htc_flow_check(&g, 3, &set(&[0])).unwrap(), Some(NodeSet::new()));
        assert!(htc_flow_check(&g, 0, &set(&[2])).is_err());
        assert_eq!(htc_flow_check(&g, 1, &set(&[0])).unwrap(), None);
    }

    #[test]
    fn no_half_trek_from_one_to_two() {
        let g = examples::htc_example();
        assert!(!g.half_trek_reachable(0).contains(&1));
    }

    #[test]
    fn htc_example_certified() {
        let g = examples::htc_example();
        let a = htc_identifiable(&g, 8);
        let cert = a.certificate.expect("certified");
        assert!(check_certificate(&g, &cert).is_empty());
        let given = HtcCertificate {
            y_sets: BTreeMap::from([
                (0, set(&[1, 4])),
                (1, set(&[4])),
                (2, set(&[])),
                (3, set(&[])),
                (4, set(&[2])),
            ]),
            ordering: vec![2, 3, 4, 0, 1],
        };
        assert!(check_certificate(&g, &given).is_empty(), "{:?}", check_certificate(&g, &given));
        let mut bad = given.clone();
        bad.ordering = vec![2, 3, 1, 4, 0];
        assert!(!check_certificate(&g, &bad).is_empty());
    }

    #[test]
    fn gap_graphs() {
        for g in [examples::htc_gap_a(), examples::htc_gap_b()] {
            let a = htc_identifiable(&g, 8);
            assert!(!a.sufficient());
            assert!(matches!(a.necessary, NecessaryOutcome::Holds { .. }));
        }
    }

    #[test]
    fn simple_acyclic_uses_parents() {
        let g = examples::diamond_dag();
        let a = htc_identifiable(&g, 8);
        assert!(a.sufficient());
        let g = examples::verma();
        assert!(htc_identifiable(&g, 8).sufficient());
    }

    #[test]
    fn necessary_fails_when_dense() {
        // 1 → 2 with 1 ↔ 2: no admissible Y for node 2
        let g = MixedGraph::from_edges(&["1", "2"], &[("1", "2")], &[("1", "2")]).unwrap();
        let a = htc_identifiable(&g, 8);
        assert_eq!(a.necessary, NecessaryOutcome::Fails);
    }

    #[test]
    fn cycle_passes_necessary_only() {
        let a = htc_identifiable(&examples::directed_cycle(3), 8);
        assert!(!a.sufficient());
        assert!(matches!(a.necessary, NecessaryOutcome::Holds { .. }));
    }

    #[test]
    fn necessary_family_is_antisymmetric() {
        let g = examples::htc_gap_a();
        if let NecessaryOutcome::Holds { y_sets } = necessary_search(&g, 1_000_000) {
            for (i, y) in &y_sets {
                for j in y {
                    assert!(!y_sets[j].contains(i));
                }
                assert!(has_half_trek_system(&g, &y.iter().copied().collect::<Vec<_>>(), g.parents(*i)));
            }
        } else {
            panic!("necessary condition should hold");
        }
    }
}
