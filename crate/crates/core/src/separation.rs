//! d-separation, conditional independence statements and trek separation.

use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{BigRational, ExactMatrix};
use crate::flow::{FlowNetwork, INF};
use crate::graph::{MixedGraph, NodeSet};
use crate::parametrization::{list_treks, phi_exact, sample_params_exact};
use crate::{Error, Result};

/// `i ⊥ j | S`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CiStatement {
    pub i: usize,
    pub j: usize,
    pub conditioning: NodeSet,
}

impl CiStatement {
    pub fn to_text(&self, g: &MixedGraph) -> String {
        let s: Vec<String> = g.label_set(&self.conditioning);
        format!("{} _||_ {} | {{{}}}", g.label(self.i), g.label(self.j), s.join(","))
    }
}

/// True if no semi-walk from `i` to `j` has all colliders in `S` and all
/// other inner nodes outside `S`.
///
/// Search over states `(node, arrived with an arrowhead)`; walks may repeat
/// nodes, which is what the collider rule on walks requires.
pub fn d_separated(g: &MixedGraph, i: usize, j: usize, s: &NodeSet) -> Result<bool> {
    if i == j || s.contains(&i) || s.contains(&j) {
        return Err(Error::InvalidArgument("d-separation needs distinct endpoints outside the conditioning set".into()));
    }
    if i >= g.n() || j >= g.n() || s.iter().any(|&v| v >= g.n()) {
        return Err(Error::NodeOutOfRange(i.max(j)));
    }
    let n = g.n();
    let mut seen = vec![[false; 2]; n];
    let mut queue = VecDeque::new();
    // (next node, arrowhead at next node)
    let moves = |v: usize| -> Vec<(usize, bool, bool)> {
        // (neighbor, arrowhead at v, arrowhead at neighbor)
        let mut m = Vec::new();
        m.extend(g.children(v).iter().map(|&w| (w, false, true)));
        m.extend(g.parents(v).iter().map(|&w| (w, true, false)));
        m.extend(g.siblings(v).iter().map(|&w| (w, true, true)));
        m
    };
    for (w, _, hw) in moves(i) {
        if !seen[w][hw as usize] {
            seen[w][hw as usize] = true;
            queue.push_back((w, hw));
        }
    }
    while let Some((v, head)) = queue.pop_front() {
        if v == j {
            return Ok(false);
        }
        for (w, hv, hw) in moves(v) {
            let collider = head && hv;
            let ok = if collider { s.contains(&v) } else { !s.contains(&v) };
            if ok && !seen[w][hw as usize] {
                seen[w][hw as usize] = true;
                queue.push_back((w, hw));
            }
        }
    }
    Ok(true)
}

/// All statements `i ⊥ j | S` with `i < j` and `|S| ≤ max_cond`, ordered by
/// `(i, j, |S|, S)`.
pub fn ci_statements(g: &MixedGraph, max_cond: usize) -> Result<Vec<CiStatement>> {
    let n = g.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let rest: Vec<usize> = (0..n).filter(|&v| v != i && v != j).collect();
            for k in 0..=max_cond.min(rest.len()) {
                for s in subsets_of_size(&rest, k) {
                    let s: NodeSet = s.into_iter().collect();
                    if d_separated(g, i, j, &s)? {
                        out.push(CiStatement { i, j, conditioning: s });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// k-subsets in lexicographic order.
pub fn subsets_of_size(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for idx in start..items.len() {
            if items.len() - idx < k - cur.len() {
                break;
            }
            cur.push(items[idx]);
            rec(items, k, idx + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrekSepCertificate {
    pub a: NodeSet,
    pub c: NodeSet,
    pub rank: usize,
    pub s_a: NodeSet,
    pub s_c: NodeSet,
    /// Bidirected edges in the cut, as `(left, right)` sides; empty whenever a
    /// cut inside `V` attains the rank.
    pub cut_edges_left: Vec<(usize, usize)>,
    pub cut_edges_right: Vec<(usize, usize)>,
}

struct TrekNetwork {
    net: FlowNetwork,
    source: usize,
    sink: usize,
    // split arcs: (left in, left out, right in, right out) per original node
    left: Vec<(usize, usize)>,
    right: Vec<(usize, usize)>,
    edge_left: Vec<(usize, usize)>,
    edge_right: Vec<(usize, usize)>,
}

/// Flow network on two copies of the graph with each bidirected edge
/// subdivided by a new parent node: left copy reversed, right copy forward,
/// `left(v) → right(v)` for every node, and unit capacity on nodes of `V`.
fn trek_network(g: &MixedGraph, a: &NodeSet, c: &NodeSet, edge_cap: u32) -> TrekNetwork {
    let n = g.n();
    let bi: Vec<(usize, usize)> = g.bidirected_edges().collect();
    let mut net = FlowNetwork::new(0);
    let split = |net: &mut FlowNetwork, cap: u32| {
        let i = net.add_node();
        let o = net.add_node();
        net.add_edge(i, o, cap);
        (i, o)
    };
    let left: Vec<_> = (0..n).map(|_| split(&mut net, 1)).collect();
    let right: Vec<_> = (0..n).map(|_| split(&mut net, 1)).collect();
    let edge_left: Vec<_> = bi.iter().map(|_| split(&mut net, edge_cap)).collect();
    let edge_right: Vec<_> = bi.iter().map(|_| split(&mut net, edge_cap)).collect();
    for v in 0..n {
        net.add_edge(left[v].1, right[v].0, INF);
    }
    for (t, h) in g.directed_edges() {
        net.add_edge(left[h].1, left[t].0, INF);
        net.add_edge(right[t].1, right[h].0, INF);
    }
    for (k, &(u, v)) in bi.iter().enumerate() {
        for x in [u, v] {
            net.add_edge(left[x].1, edge_left[k].0, INF);
            net.add_edge(edge_right[k].1, right[x].0, INF);
        }
        net.add_edge(edge_left[k].1, edge_right[k].0, INF);
    }
    let source = net.add_node();
    let sink = net.add_node();
    for &x in a {
        net.add_edge(source, left[x].0, INF);
    }
    for &x in c {
        net.add_edge(right[x].1, sink, INF);
    }
    TrekNetwork { net, source, sink, left, right, edge_left, edge_right }
}

/// Minimal `|S_A| + |S_C|` over pairs trek-separating `A` from `C`, with a cut
/// attaining it. This equals the generic rank of `Σ_{A,C}`.
pub fn trek_separation_rank(g: &MixedGraph, a: &NodeSet, c: &NodeSet) -> Result<TrekSepCertificate> {
    if a.is_empty() || c.is_empty() {
        return Err(Error::InvalidArgument("trek separation needs nonempty node sets".into()));
    }
    if let Some(&v) = a.iter().chain(c).find(|&&v| v >= g.n()) {
        return Err(Error::NodeOutOfRange(v));
    }
    let mut tn = trek_network(g, a, c, 1);
    let rank = tn.net.max_flow(tn.source, tn.sink) as usize;
    // prefer a cut inside V; it exists whenever the value does not grow
    let mut tv = trek_network(g, a, c, INF);
    let value_v = tv.net.max_flow(tv.source, tv.sink) as usize;
    if value_v == rank {
        tn = tv;
    }
    let reach = tn.net.residual_reachable(tn.source);
    let cut = |pairs: &[(usize, usize)]| -> Vec<usize> {
        pairs
            .iter()
            .enumerate()
            .filter(|(_, &(i, o))| reach[i] && !reach[o])
            .map(|(k, _)| k)
            .collect()
    };
    let bi: Vec<(usize, usize)> = g.bidirected_edges().collect();
    Ok(TrekSepCertificate {
        a: a.clone(),
        c: c.clone(),
        rank,
        s_a: cut(&tn.left).into_iter().collect(),
        s_c: cut(&tn.right).into_iter().collect(),
        cut_edges_left: cut(&tn.edge_left).into_iter().map(|k| bi[k]).collect(),
        cut_edges_right: cut(&tn.edge_right).into_iter().map(|k| bi[k]).collect(),
    })
}

/// Checks sided interception for every trek with at most `max_edges` edges.
/// Sound but partial on cyclic graphs.
pub fn verify_trek_separation(g: &MixedGraph, cert: &TrekSepCertificate, max_edges: usize) -> Result<bool> {
    if !cert.cut_edges_left.is_empty() || !cert.cut_edges_right.is_empty() {
        return Ok(false);
    }
    for &i in &cert.a {
        for &j in &cert.c {
            for t in list_treks(g, i, j, Some(max_edges))? {
                let left_hit = t.left.iter().any(|v| cert.s_a.contains(v));
                let right_hit = t.right.iter().any(|v| cert.s_c.contains(v));
                if !left_hit && !right_hit {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Rank of `Σ_{A,C}` at exact random rational parameters, maximized over
/// `draws` independent draws.
pub fn generic_rank_numeric<R: Rng>(g: &MixedGraph, a: &NodeSet, c: &NodeSet, draws: usize, rng: &mut R) -> Result<usize> {
    let rows: Vec<usize> = a.iter().copied().collect();
    let cols: Vec<usize> = c.iter().copied().collect();
    let mut best = 0;
    for _ in 0..draws.max(1) {
        let s = random_model_covariance(g, rng)?;
        best = best.max(s.submatrix(&rows, &cols).rank());
    }
    Ok(best)
}

/// Exact covariance matrix at random rational parameters.
pub fn random_model_covariance<R: Rng>(g: &MixedGraph, rng: &mut R) -> Result<ExactMatrix<BigRational>> {
    loop {
        let (l, w) = sample_params_exact(g, rng);
        match phi_exact(&l, &w) {
            Ok(s) => return Ok(s),
            Err(Error::Singular(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}
