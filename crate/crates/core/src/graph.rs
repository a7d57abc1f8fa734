//! Mixed graphs `G = (V, D, B)` and the structural primitives shared by the
//! rest of the crate.
//!
//! Nodes are dense indices `0..n` carrying unique text labels. Matrices are
//! always laid out in node-index order, which is the order of the `nodes:`
//! header of the graph file.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::cmp::Reverse;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::{Error, Result};

pub type NodeSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedGraph {
    labels: Vec<String>,
    directed: BTreeSet<(usize, usize)>,
    /// Stored with the smaller index first.
    bidirected: BTreeSet<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    siblings: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphProperties {
    pub acyclic: bool,
    pub simple: bool,
    pub sinks: NodeSet,
    pub sources: NodeSet,
}

impl MixedGraph {
    /// Graph with the given labels and no edges.
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = BTreeSet::new();
        for l in &labels {
            if l.is_empty() || l.chars().any(char::is_whitespace) {
                return Err(Error::InvalidArgument(format!("invalid node label `{l}`")));
            }
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate node label `{l}`")));
            }
        }
        let n = labels.len();
        Ok(Self {
            labels,
            directed: BTreeSet::new(),
            bidirected: BTreeSet::new(),
            parents: vec![Vec::new(); n],
            children: vec![Vec::new(); n],
            siblings: vec![Vec::new(); n],
        })
    }

    /// Random graph on nodes `1..=n`. Each unordered pair gets a directed
    /// edge with probability `p_directed` (oriented low to high when
    /// `acyclic`, otherwise at random, and both ways with probability
    /// `p_directed / 4`) and, independently, a bidirected edge with
    /// probability `p_bidirected`.
    pub fn random<R: Rng>(n: usize, p_directed: f64, p_bidirected: f64, acyclic: bool, rng: &mut R) -> Self {
        let mut g = MixedGraph::with_nodes(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(p_directed) {
                    if acyclic {
                        g.add_directed(i, j).expect("new edge");
                    } else if rng.gen_bool(0.25) {
                        g.add_directed(i, j).expect("new edge");
                        g.add_directed(j, i).expect("new edge");
                    } else if rng.gen_bool(0.5) {
                        g.add_directed(i, j).expect("new edge");
                    } else {
                        g.add_directed(j, i).expect("new edge");
                    }
                }
                if rng.gen_bool(p_bidirected) {
                    g.add_bidirected(i, j).expect("new edge");
                }
            }
        }
        g
    }

    /// Graph on nodes labelled `1..=n`.
    pub fn with_nodes(n: usize) -> Self {
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        Self::new(&labels).expect("numeric labels are valid")
    }

    /// Builds a graph from label pairs, e.g. `from_edges(&["1","2"], &[("1","2")], &[])`.
    pub fn from_edges(labels: &[&str], directed: &[(&str, &str)], bidirected: &[(&str, &str)]) -> Result<Self> {
        let mut g = Self::new(labels)?;
        for (a, b) in directed {
            let (a, b) = (g.index_of(a)?, g.index_of(b)?);
            g.add_directed(a, b)?;
        }
        for (a, b) in bidirected {
            let (a, b) = (g.index_of(a)?, g.index_of(b)?);
            g.add_bidirected(a, b)?;
        }
        Ok(g)
    }

    pub fn add_directed(&mut self, tail: usize, head: usize) -> Result<()> {
        self.check(tail)?;
        self.check(head)?;
        if tail == head {
            return Err(Error::SelfLoop(self.labels[tail].clone()));
        }
        if !self.directed.insert((tail, head)) {
            return Err(Error::DuplicateEdge(format!("{} -> {}", self.labels[tail], self.labels[head])));
        }
        insert_sorted(&mut self.children[tail], head);
        insert_sorted(&mut self.parents[head], tail);
        Ok(())
    }

    pub fn add_bidirected(&mut self, a: usize, b: usize) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::SelfLoop(self.labels[a].clone()));
        }
        let key = (a.min(b), a.max(b));
        if !self.bidirected.insert(key) {
            return Err(Error::DuplicateEdge(format!("{} <-> {}", self.labels[key.0], self.labels[key.1])));
        }
        insert_sorted(&mut self.siblings[a], b);
        insert_sorted(&mut self.siblings[b], a);
        Ok(())
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.labels.len() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange(i))
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownNode(label.to_string()))
    }

    /// Resolves a comma separated list of labels.
    pub fn parse_node_list(&self, list: &str) -> Result<NodeSet> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| self.index_of(s))
            .collect()
    }

    pub fn directed_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.directed.iter().copied()
    }

    pub fn bidirected_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bidirected.iter().copied()
    }

    pub fn num_directed(&self) -> usize {
        self.directed.len()
    }

    pub fn num_bidirected(&self) -> usize {
        self.bidirected.len()
    }

    pub fn has_directed(&self, tail: usize, head: usize) -> bool {
        self.directed.contains(&(tail, head))
    }

    pub fn has_bidirected(&self, a: usize, b: usize) -> bool {
        self.bidirected.contains(&(a.min(b), a.max(b)))
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn siblings(&self, i: usize) -> &[usize] {
        &self.siblings[i]
    }

    pub fn label_set(&self, set: &NodeSet) -> Vec<String> {
        set.iter().map(|&i| self.labels[i].clone()).collect()
    }

    pub fn properties(&self) -> GraphProperties {
        let n = self.n();
        let simple = self.directed.iter().all(|&(a, b)| !self.directed.contains(&(b, a)) && !self.has_bidirected(a, b));
        let sinks = (0..n).filter(|&i| self.children[i].is_empty()).collect();
        let sources = (0..n)
            .filter(|&i| self.parents[i].is_empty() && self.siblings[i].is_empty())
            .collect();
        GraphProperties {
            acyclic: self.topological_order().is_some(),
            simple,
            sinks,
            sources,
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Topological order of the directed part, smallest index first among
    /// available nodes. `None` if there is a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.n();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.parents[i].len()).collect();
        let mut heap: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = heap.pop() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    heap.push(Reverse(c));
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Strongly connected components of `(V, D)`, each sorted, blocks ordered
    /// by their least member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let reach: Vec<Vec<bool>> = (0..n).map(|i| self.directed_reach(i)).collect();
        let mut assigned = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let block: Vec<usize> = (0..n).filter(|&j| j == i || (reach[i][j] && reach[j][i])).collect();
            for &j in &block {
                assigned[j] = true;
            }
            out.push(block);
        }
        out
    }

    /// SCC blocks in a topological order of the condensation; among the
    /// available blocks the one with the least member comes first.
    pub fn topological_scc_blocks(&self) -> Vec<Vec<usize>> {
        let blocks = self.strongly_connected_components();
        let mut block_of = vec![0; self.n()];
        for (b, block) in blocks.iter().enumerate() {
            for &v in block {
                block_of[v] = b;
            }
        }
        let k = blocks.len();
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
        let mut indeg = vec![0usize; k];
        for &(t, h) in &self.directed {
            let (bt, bh) = (block_of[t], block_of[h]);
            if bt != bh && succ[bt].insert(bh) {
                indeg[bh] += 1;
            }
        }
        // blocks are indexed by increasing least member
        let mut heap: BinaryHeap<Reverse<usize>> = (0..k).filter(|&b| indeg[b] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(k);
        while let Some(Reverse(b)) = heap.pop() {
            order.push(blocks[b].clone());
            for &s in &succ[b] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    heap.push(Reverse(s));
                }
            }
        }
        order
    }

    /// Nodes reachable from `i` by a nonempty directed path.
    fn directed_reach(&self, i: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n()];
        let mut stack: Vec<usize> = self.children[i].clone();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend(self.children[v].iter().copied());
            }
        }
        seen
    }

    /// Connected components of `(V, B)`, ordered by least member.
    pub fn bidirected_components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[s] = id;
            let mut members = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.siblings[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Smallest ancestral superset of `set`.
    pub fn ancestral_closure(&self, set: &NodeSet) -> NodeSet {
        let mut closure = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(v) = stack.pop() {
            for &p in &self.parents[v] {
                if closure.insert(p) {
                    stack.push(p);
                }
            }
        }
        closure
    }

    pub fn is_ancestral(&self, set: &NodeSet) -> bool {
        set.iter().all(|&v| self.parents[v].iter().all(|p| set.contains(p)))
    }

    /// Subgraph induced by `set`; nodes keep their labels and relative order.
    /// The second component maps new indices to indices of `self`.
    pub fn induced_subgraph(&self, set: &NodeSet) -> (MixedGraph, Vec<usize>) {
        let keep: Vec<usize> = set.iter().copied().collect();
        let mut new_index = vec![usize::MAX; self.n()];
        for (k, &v) in keep.iter().enumerate() {
            new_index[v] = k;
        }
        let labels: Vec<&str> = keep.iter().map(|&v| self.labels[v].as_str()).collect();
        let mut g = MixedGraph::new(&labels).expect("labels of a valid graph");
        for &(t, h) in &self.directed {
            if new_index[t] != usize::MAX && new_index[h] != usize::MAX {
                g.add_directed(new_index[t], new_index[h]).expect("edge of a valid graph");
            }
        }
        for &(a, b) in &self.bidirected {
            if new_index[a] != usize::MAX && new_index[b] != usize::MAX {
                g.add_bidirected(new_index[a], new_index[b]).expect("edge of a valid graph");
            }
        }
        (g, keep)
    }

    /// Induced subgraph on the complement of the sinks of `(V, D)`.
    pub fn remove_sinks(&self) -> (MixedGraph, Vec<usize>) {
        let keep: NodeSet = (0..self.n()).filter(|&i| !self.children[i].is_empty()).collect();
        self.induced_subgraph(&keep)
    }

    /// All nodes `j` with a half-trek from `i`: a path starting with `i → ·`
    /// or `i ↔ ·` and continuing along directed edges.
    pub fn half_trek_reachable(&self, i: usize) -> NodeSet {
        let mut seen = NodeSet::new();
        let mut stack: Vec<usize> = self.children[i].iter().chain(&self.siblings[i]).copied().collect();
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                stack.extend(self.children[v].iter().copied());
            }
        }
        seen
    }

    /// Graph file text: `nodes:` header, sorted directed edges, sorted bidirected edges.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Graphviz rendering; directed edges blue, bidirected edges red.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for l in &self.labels {
            s.push_str(&format!("  \"{l}\";\n"));
        }
        for &(t, h) in &self.directed {
            s.push_str(&format!("  \"{}\" -> \"{}\" [color=blue];\n", self.labels[t], self.labels[h]));
        }
        for &(a, b) in &self.bidirected {
            s.push_str(&format!(
                "  \"{}\" -> \"{}\" [color=red, dir=both];\n",
                self.labels[a], self.labels[b]
            ));
        }
        s.push_str("}\n");
        s
    }

    /// Parses the graph file format.
    ///
    /// ```text
    /// # instrumental variable
    /// nodes: 1 2 3
    /// 1 -> 2
    /// 2 -> 3
    /// 2 <-> 3
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut graph: Option<MixedGraph> = None;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            if let Some(rest) = line.strip_prefix("nodes:") {
                if graph.is_some() {
                    return Err(err("second `nodes:` header".into()));
                }
                let labels: Vec<&str> = rest.split_whitespace().collect();
                if labels.is_empty() {
                    return Err(err("empty node list".into()));
                }
                graph = Some(MixedGraph::new(&labels).map_err(|e| err(e.to_string()))?);
                continue;
            }
            let g = graph
                .as_mut()
                .ok_or_else(|| err("edge before `nodes:` header".into()))?;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let [a, arrow, b] = tokens[..] else {
                return Err(err(format!("malformed edge line `{line}`")));
            };
            let ia = g.index_of(a).map_err(|e| err(e.to_string()))?;
            let ib = g.index_of(b).map_err(|e| err(e.to_string()))?;
            let res = match arrow {
                "->" => g.add_directed(ia, ib),
                "<-" => g.add_directed(ib, ia),
                "<->" => g.add_bidirected(ia, ib),
                _ => return Err(err(format!("unknown edge type `{arrow}`"))),
            };
            res.map_err(|e| err(e.to_string()))?;
        }
        graph.ok_or(Error::Parse {
            line: 0,
            message: "missing `nodes:` header".into(),
        })
    }

    /// Node-index map from `sub` (a graph whose labels are a subset of ours).
    pub fn embed_labels(&self, sub: &MixedGraph) -> Result<Vec<usize>> {
        sub.labels.iter().map(|l| self.index_of(l)).collect()
    }

    /// Adjacency summary keyed by label, handy in reports.
    pub fn parent_map(&self) -> BTreeMap<String, Vec<String>> {
        (0..self.n())
            .map(|i| {
                (
                    self.labels[i].clone(),
                    self.parents[i].iter().map(|&p| self.labels[p].clone()).collect(),
                )
            })
            .collect()
    }
}

impl fmt::Display for MixedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes: {}", self.labels.join(" "))?;
        for &(t, h) in &self.directed {
            writeln!(f, "{} -> {}", self.labels[t], self.labels[h])?;
        }
        for &(a, b) in &self.bidirected {
            writeln!(f, "{} <-> {}", self.labels[a], self.labels[b])?;
        }
        Ok(())
    }
}

fn insert_sorted(v: &mut Vec<usize>, x: usize) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

/// The graphs used as running examples throughout the documentation and tests.
pub mod examples {
    use super::MixedGraph;

    fn build(labels: &[&str], d: &[(&str, &str)], b: &[(&str, &str)]) -> MixedGraph {
        MixedGraph::from_edges(labels, d, b).expect("example graph is valid")
    }

    /// Instrumental variable model `1 → 2 → 3`, `2 ↔ 3`.
    pub fn instrumental_variable() -> MixedGraph {
        build(&["1", "2", "3"], &[("1", "2"), ("2", "3")], &[("2", "3")])
    }

    /// The Verma graph.
    pub fn verma() -> MixedGraph {
        build(
            &["1", "2", "3", "4"],
            &[("1", "2"), ("1", "3"), ("2", "3"), ("3", "4")],
            &[("2", "4")],
        )
    }

    /// Bivariate seemingly unrelated regressions `1 → 2 ↔ 3 ← 4`.
    pub fn seemingly_unrelated() -> MixedGraph {
        build(&["1", "2", "3", "4"], &[("1", "2"), ("4", "3")], &[("2", "3")])
    }

    /// Two instruments 1 and 2 for the effect of 3 on 4.
    pub fn two_instruments() -> MixedGraph {
        build(
            &["1", "2", "3", "4"],
            &[("1", "2"), ("1", "3"), ("2", "3"), ("3", "4")],
            &[("3", "4")],
        )
    }

    /// Two-instrument graph with the added feedback edge `4 → 2`.
    pub fn cyclic_two_instruments() -> MixedGraph {
        build(
            &["1", "2", "3", "4"],
            &[("1", "2"), ("1", "3"), ("2", "3"), ("3", "4"), ("4", "2")],
            &[("3", "4")],
        )
    }

    /// Five-node graph with mixed components `{1,4}` and `{2,3,5}`.
    pub fn tian_example() -> MixedGraph {
        build(
            &["1", "2", "3", "4", "5"],
            &[
                ("1", "2"),
                ("1", "3"),
                ("2", "3"),
                ("3", "2"),
                ("2", "4"),
                ("3", "4"),
                ("2", "5"),
                ("4", "5"),
            ],
            &[("1", "4"), ("2", "5")],
        )
    }

    /// Acyclic simple graph whose parametrization is injective.
    pub fn injective_example() -> MixedGraph {
        build(
            &["1", "2", "3", "4"],
            &[("1", "2"), ("1", "4"), ("2", "3"), ("3", "4")],
            &[("1", "3"), ("2", "4")],
        )
    }

    /// Acyclic simple graph that is generically but not globally identifiable.
    pub fn non_injective_example() -> MixedGraph {
        build(
            &["1", "2", "3", "4"],
            &[("1", "2"), ("2", "3"), ("3", "4")],
            &[("1", "3"), ("1", "4"), ("2", "4")],
        )
    }

    /// Five-node graph certified by the half-trek criterion with
    /// `Y1={2,5}, Y2={5}, Y3=Y4=∅, Y5={3}`.
    pub fn htc_example() -> MixedGraph {
        build(
            &["1", "2", "3", "4", "5"],
            &[("2", "1"), ("3", "1"), ("3", "5"), ("4", "2")],
            &[("1", "3"), ("2", "3"), ("2", "4"), ("3", "4"), ("4", "5")],
        )
    }

    /// Passes the necessary half-trek condition, fails the sufficient one;
    /// algebraically 3-to-one.
    pub fn htc_gap_a() -> MixedGraph {
        build(
            &["1", "2", "3", "4", "5"],
            &[("1", "2"), ("1", "4"), ("1", "5"), ("2", "3"), ("2", "5"), ("3", "4")],
            &[("1", "2"), ("1", "3"), ("1", "5"), ("2", "4")],
        )
    }

    /// Passes the necessary half-trek condition, fails the sufficient one;
    /// algebraically one-to-one.
    pub fn htc_gap_b() -> MixedGraph {
        build(
            &["1", "2", "3", "4", "5"],
            &[("1", "2"), ("1", "3"), ("1", "4"), ("4", "5")],
            &[("1", "2"), ("1", "3"), ("1", "4"), ("1", "5")],
        )
    }

    /// The acyclic digraph `1 → 2 → 4`, `1 → 3 → 4`.
    pub fn diamond_dag() -> MixedGraph {
        build(
            &["1", "2", "3", "4"],
            &[("1", "2"), ("1", "3"), ("2", "4"), ("3", "4")],
            &[],
        )
    }

    /// Verma graph with a fifth node that joins all bidirected components;
    /// it decomposes only after the sink 5 is removed.
    pub fn verma_with_sink() -> MixedGraph {
        build(
            &["1", "2", "3", "4", "5"],
            &[("1", "2"), ("1", "3"), ("2", "3"), ("3", "4")],
            &[("2", "4"), ("1", "5"), ("3", "5"), ("4", "5")],
        )
    }

    /// Directed cycle `1 → 2 → … → m → 1`.
    pub fn directed_cycle(m: usize) -> MixedGraph {
        let mut g = MixedGraph::with_nodes(m);
        for i in 0..m {
            g.add_directed(i, (i + 1) % m).expect("cycle edge");
        }
        g
    }

    /// Spider graph: hub `c` with four upper nodes `a b d e f`; `{1,2,3,4}×{5,6,7}`
    /// has generic rank two.
    pub fn spider() -> MixedGraph {
        // a..f stand for the unlabelled upper nodes
        build(
            &["1", "2", "3", "4", "5", "6", "7", "c", "a", "b", "d", "e", "f"],
            &[
                ("a", "c"),
                ("b", "c"),
                ("b", "2"),
                ("d", "c"),
                ("d", "2"),
                ("d", "1"),
                ("c", "3"),
                ("c", "4"),
                ("c", "5"),
                ("c", "6"),
                ("c", "7"),
                ("e", "5"),
                ("e", "c"),
                ("f", "c"),
            ],
            &[("a", "1"), ("f", "7"), ("e", "6")],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    fn set(v: &[usize]) -> NodeSet {
        v.iter().copied().collect()
    }

    #[test]
    fn parse_iv_graph() {
        let g = MixedGraph::parse("nodes: 1 2 3\n1 -> 2\n2 -> 3\n2 <-> 3").unwrap();
        assert_eq!(g, instrumental_variable());
    }

    #[test]
    fn parse_single_node_and_comments() {
        let g = MixedGraph::parse("# comment\nnodes: 1\n").unwrap();
        assert_eq!(g.n(), 1);
        assert_eq!(g.num_directed() + g.num_bidirected(), 0);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = MixedGraph::parse("nodes: 1 2\n1 -> 2\n1 -> 2").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = MixedGraph::parse("nodes: 1 2\n1 -> 3").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = MixedGraph::parse("nodes: 1 2\n\n1 <-> 1").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = MixedGraph::parse("nodes: 1 2\n1 => 2").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(MixedGraph::parse("1 -> 2").is_err());
        // bidirected duplicates in either orientation
        assert!(MixedGraph::parse("nodes: 1 2\n1 <-> 2\n2 <-> 1").is_err());
    }

    #[test]
    fn properties_of_examples() {
        let p = verma().properties();
        assert!(p.acyclic && p.simple);
        assert_eq!(p.sinks, set(&[3]));
        assert!(!directed_cycle(3).properties().acyclic);
        let g = MixedGraph::from_edges(&["1", "2"], &[("1", "2")], &[("1", "2")]).unwrap();
        assert!(!g.properties().simple);
        assert_eq!(instrumental_variable().properties().sources, set(&[0]));
    }

    #[test]
    fn parents_of_examples() {
        let v = verma();
        assert_eq!(v.parents(2), &[0, 1]);
        assert!(v.parents(0).is_empty());
        let s = spider();
        let c = s.index_of("c").unwrap();
        assert_eq!(s.parents(c).len(), 5);
        assert_eq!(s.label_set(&s.parents(c).iter().copied().collect()), ["a", "b", "d", "e", "f"]);
    }

    #[test]
    fn components_of_tian_example() {
        let g = tian_example();
        assert_eq!(g.strongly_connected_components(), vec![vec![0], vec![1, 2], vec![3], vec![4]]);
        assert_eq!(g.bidirected_components(), vec![vec![0, 3], vec![1, 4], vec![2]]);
        let e = MixedGraph::with_nodes(3);
        assert_eq!(e.strongly_connected_components(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(directed_cycle(3).strongly_connected_components(), vec![vec![0, 1, 2]]);
        assert_eq!(
            g.topological_scc_blocks(),
            vec![vec![0], vec![1, 2], vec![3], vec![4]]
        );
    }

    #[test]
    fn ancestral_sets() {
        let iv = instrumental_variable();
        let a = iv.ancestral_closure(&set(&[0, 1]));
        assert_eq!(a, set(&[0, 1]));
        let (sub, _) = iv.induced_subgraph(&a);
        assert_eq!(sub, MixedGraph::from_edges(&["1", "2"], &[("1", "2")], &[]).unwrap());
        assert_eq!(verma().ancestral_closure(&set(&[3])), set(&[0, 1, 2, 3]));
        let all: NodeSet = (0..4).collect();
        assert_eq!(verma().induced_subgraph(&all).0, verma());
    }

    #[test]
    fn sink_removal() {
        let (g, keep) = verma().remove_sinks();
        assert_eq!(keep, vec![0, 1, 2]);
        assert_eq!(g.n(), 3);
        let (g, _) = MixedGraph::from_edges(&["1", "2"], &[], &[("1", "2")]).unwrap().remove_sinks();
        assert_eq!(g.n(), 0);
        let (g, _) = verma_with_sink().remove_sinks();
        // node 4 is still a sink of the Verma graph; only 5 and 4 lose... check labels
        assert_eq!(g.labels(), ["1", "2", "3"]);
        let (g, _) = verma_with_sink().induced_subgraph(&set(&[0, 1, 2, 3]));
        assert_eq!(g, verma());
    }

    #[test]
    fn half_treks() {
        let g = htc_example();
        assert!(!g.half_trek_reachable(0).contains(&1));
        assert_eq!(verma().half_trek_reachable(0), set(&[1, 2, 3]));
        let g = MixedGraph::from_edges(&["1", "2"], &[("1", "2")], &[]).unwrap();
        assert!(g.half_trek_reachable(1).is_empty());
    }

    #[test]
    fn dot_export_colours_edges() {
        let dot = instrumental_variable().to_dot();
        assert!(dot.contains("\"1\" -> \"2\" [color=blue]"));
        assert!(dot.contains("\"2\" -> \"3\" [color=red, dir=both]"));
    }
}
