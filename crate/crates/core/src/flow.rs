//! Integral max-flow by shortest augmenting paths, with min-cut extraction.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
}

/// Capacity large enough to never be cut in the unit-capacity networks used here.
pub const INF: u32 = u32::MAX / 4;

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork { adj: vec![Vec::new(); n] }
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    /// Adds arc `u → v`; returns its handle `(u, index)`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: u32) -> (usize, usize) {
        let ru = self.adj[v].len() + usize::from(u == v);
        let rv = self.adj[u].len();
        self.adj[u].push(Arc { to: v, cap, rev: ru });
        self.adj[v].push(Arc { to: u, cap: 0, rev: rv });
        (u, rv)
    }

    /// Flow currently carried by the arc with the given handle.
    pub fn flow_on(&self, handle: (usize, usize)) -> u32 {
        let a = &self.adj[handle.0][handle.1];
        self.adj[a.to][a.rev].cap
    }

    /// Augments until no `s`-`t` path remains; returns the flow value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> u32 {
        let mut total = 0;
        loop {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.adj.len()];
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for (k, a) in self.adj[u].iter().enumerate() {
                    if a.cap > 0 && !seen[a.to] {
                        seen[a.to] = true;
                        prev[a.to] = Some((u, k));
                        queue.push_back(a.to);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut bottleneck = u32::MAX;
            let mut v = t;
            while let Some((u, k)) = prev[v] {
                bottleneck = bottleneck.min(self.adj[u][k].cap);
                v = u;
            }
            let mut v = t;
            while let Some((u, k)) = prev[v] {
                self.adj[u][k].cap -= bottleneck;
                let (to, rev) = (self.adj[u][k].to, self.adj[u][k].rev);
                self.adj[to][rev].cap += bottleneck;
                v = u;
            }
            total += bottleneck;
        }
    }

    /// Nodes reachable from `s` in the residual network; after `max_flow`
    /// this is the source side of a minimum cut.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for a in &self.adj[u] {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    stack.push(a.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_network() {
        let mut f = FlowNetwork::new(4);
        let a = f.add_edge(0, 1, 1);
        f.add_edge(0, 2, 1);
        f.add_edge(1, 3, 1);
        f.add_edge(2, 3, 1);
        f.add_edge(1, 2, 1);
        assert_eq!(f.max_flow(0, 3), 2);
        assert_eq!(f.flow_on(a), 1);
        let side = f.residual_reachable(0);
        assert_eq!(side, vec![true, false, false, false]);
    }

    #[test]
    fn bottleneck_vertex() {
        // two paths share node 2 (split into 2 -> 3 with capacity 1)
        let mut f = FlowNetwork::new(6);
        f.add_edge(0, 1, INF);
        f.add_edge(0, 4, INF);
        f.add_edge(1, 2, INF);
        f.add_edge(4, 2, INF);
        f.add_edge(2, 3, 1);
        f.add_edge(3, 5, INF);
        assert_eq!(f.max_flow(0, 5), 1);
        let side = f.residual_reachable(0);
        assert!(side[2] && !side[3]);
    }
}
