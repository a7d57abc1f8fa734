//! Mixed components and the map `τ` relating `φ_G` to the
//! parametrizations of the components.

use serde::Serialize;

use crate::algebra::{ExactMatrix, Polynomial, RationalFunction, Var};
use crate::graph::{MixedGraph, NodeSet};
use crate::numerics::{block_ldl, identity_minus, BlockLdl, FloatMatrix, ParamPoint};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MixedComponent {
    pub block: NodeSet,
    /// `V[C] = C ∪ pa(C)`, sorted; node `k` of `graph` is `vertex_set[k]`.
    pub vertex_set: Vec<usize>,
    pub graph: MixedGraph,
}

impl MixedComponent {
    /// Positions of `C` inside `vertex_set`.
    pub fn block_positions(&self) -> Vec<usize> {
        self.vertex_set
            .iter()
            .enumerate()
            .filter(|(_, v)| self.block.contains(v))
            .map(|(k, _)| k)
            .collect()
    }

    pub fn outer_positions(&self) -> Vec<usize> {
        self.vertex_set
            .iter()
            .enumerate()
            .filter(|(_, v)| !self.block.contains(v))
            .map(|(k, _)| k)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub blocks: Vec<NodeSet>,
    pub components: Vec<MixedComponent>,
}

/// Blocks of the finest common coarsening of the bidirected components and
/// the strongly connected components, ordered by least member.
pub fn mixed_blocks(g: &MixedGraph) -> Vec<NodeSet> {
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let parts = g.bidirected_components().into_iter().chain(g.strongly_connected_components());
    for part in parts {
        for w in part.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut blocks: Vec<NodeSet> = Vec::new();
    let mut root_block = vec![usize::MAX; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        if root_block[r] == usize::MAX {
            root_block[r] = blocks.len();
            blocks.push(NodeSet::new());
        }
        blocks[root_block[r]].insert(v);
    }
    blocks
}

pub fn component_for(g: &MixedGraph, block: &NodeSet) -> MixedComponent {
    let mut vs = block.clone();
    for &c in block {
        vs.extend(g.parents(c).iter().copied());
    }
    let vertex_set: Vec<usize> = vs.iter().copied().collect();
    let labels: Vec<&str> = vertex_set.iter().map(|&v| g.label(v)).collect();
    let pos = |v: usize| vertex_set.binary_search(&v).expect("member of V[C]");
    let mut graph = MixedGraph::new(&labels).expect("labels of a valid graph");
    for (t, h) in g.directed_edges() {
        if block.contains(&h) {
            graph.add_directed(pos(t), pos(h)).expect("edge of a valid graph");
        }
    }
    for (a, b) in g.bidirected_edges() {
        if block.contains(&a) && block.contains(&b) {
            graph.add_bidirected(pos(a), pos(b)).expect("edge of a valid graph");
        }
    }
    MixedComponent { block: block.clone(), vertex_set, graph }
}

pub fn mixed_components(g: &MixedGraph) -> Decomposition {
    let blocks = mixed_blocks(g);
    let components = blocks.iter().map(|b| component_for(g, b)).collect();
    Decomposition { blocks, components }
}

/// `π_C`: coefficients of edges into `C`, error covariances within `C`, and
/// unit variances on `V[C] ∖ C`.
pub fn project_component(p: &ParamPoint, comp: &MixedComponent) -> ParamPoint {
    let vs = &comp.vertex_set;
    let k = vs.len();
    let lambda = FloatMatrix::from_fn(k, k, |r, c| {
        if comp.block.contains(&vs[c]) {
            p.lambda[(vs[r], vs[c])]
        } else {
            0.0
        }
    });
    let omega = FloatMatrix::from_fn(k, k, |r, c| {
        let (u, v) = (vs[r], vs[c]);
        match (comp.block.contains(&u), comp.block.contains(&v)) {
            (true, true) => p.omega[(u, v)],
            _ if r == c => 1.0,
            _ => 0.0,
        }
    });
    ParamPoint { lambda, omega }
}

/// Block-LDL factors of `Σ` for the strongly connected components in
/// topological order.
pub fn scc_ldl(g: &MixedGraph, sigma: &FloatMatrix) -> Result<BlockLdl> {
    block_ldl(sigma, &g.topological_scc_blocks())
}

fn assemble_tau(comp: &MixedComponent, f: &BlockLdl) -> Result<FloatMatrix> {
    let vs = &comp.vertex_set;
    let k = vs.len();
    let a = FloatMatrix::from_fn(k, k, |r, c| {
        if comp.block.contains(&vs[c]) {
            f.a[(vs[r], vs[c])]
        } else {
            0.0
        }
    });
    let d = FloatMatrix::from_fn(k, k, |r, c| {
        let (u, v) = (vs[r], vs[c]);
        if comp.block.contains(&u) && comp.block.contains(&v) {
            f.delta[(u, v)]
        } else if r == c {
            1.0
        } else {
            0.0
        }
    });
    let inv = identity_minus(&a)
        .try_inverse()
        .ok_or_else(|| Error::Singular("I - A in tau".into()))?;
    let t = inv.transpose() * d * inv;
    Ok((&t + t.transpose()) * 0.5)
}

/// `τ_C(Σ)`, a covariance matrix on `V[C]`. For `Σ = φ_G(Λ, Ω)` it equals
/// `φ_{G[C]}(π_C(Λ, Ω))`.
pub fn tian_tau(g: &MixedGraph, sigma: &FloatMatrix, comp: &MixedComponent) -> Result<FloatMatrix> {
    assemble_tau(comp, &scc_ldl(g, sigma)?)
}

/// `τ_C(Σ)` for every component.
pub fn tian_tau_all(g: &MixedGraph, sigma: &FloatMatrix, dec: &Decomposition) -> Result<Vec<FloatMatrix>> {
    let f = scc_ldl(g, sigma)?;
    dec.components.iter().map(|c| assemble_tau(c, &f)).collect()
}

/// Inverse of `τ`: recovers `Σ` from the component matrices.
pub fn tian_tau_inverse(g: &MixedGraph, dec: &Decomposition, taus: &[FloatMatrix]) -> Result<FloatMatrix> {
    let n = g.n();
    let sccs = g.topological_scc_blocks();
    let mut a = FloatMatrix::zeros(n, n);
    let mut delta = FloatMatrix::zeros(n, n);
    for (comp, tau) in dec.components.iter().zip(taus) {
        let pos = |v: usize| comp.vertex_set.binary_search(&v).expect("member of V[C]");
        let mut blocks = vec![comp.outer_positions()];
        blocks.retain(|b| !b.is_empty());
        for w in &sccs {
            if w.iter().all(|v| comp.block.contains(v)) {
                blocks.push(w.iter().map(|&v| pos(v)).collect());
            }
        }
        let f = block_ldl(tau, &blocks)?;
        for (r, &u) in comp.vertex_set.iter().enumerate() {
            for (c, &v) in comp.vertex_set.iter().enumerate() {
                if comp.block.contains(&v) {
                    a[(u, v)] = f.a[(r, c)];
                    if comp.block.contains(&u) {
                        delta[(u, v)] = f.delta[(r, c)];
                    }
                }
            }
        }
    }
    BlockLdl { a, delta }.reconstruct()
}

/// `τ_C` as rational functions in the `σ_ij`, for acyclic graphs.
///
/// Column `j` of `A` is the regression of `j` on all its predecessors `P` in
/// the topological order, `A_{u,j} = det(Σ_{P,P} with column u replaced by
/// Σ_{P,j}) / det(Σ_{P,P})`, and `Δ_jj = det Σ_{Pj,Pj} / det Σ_{P,P}`.
pub fn tau_symbolic(g: &MixedGraph, comp: &MixedComponent, guard: usize) -> Result<ExactMatrix<RationalFunction>> {
    let order = g
        .topological_order()
        .ok_or_else(|| Error::Cyclic("symbolic tau is implemented for acyclic graphs".into()))?;
    let n = g.n();
    if n > guard + 1 {
        return Err(Error::SizeGuard { what: "symbolic tau", size: n, limit: guard + 1 });
    }
    let sigma = ExactMatrix::from_fn(n, n, |i, j| Polynomial::var(Var::sigma(i, j)));
    let vs = &comp.vertex_set;
    let k = vs.len();
    let mut rank = vec![0; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let mut a = ExactMatrix::<RationalFunction>::zeros(k, k);
    let mut d = ExactMatrix::<RationalFunction>::identity(k);
    for (c, &j) in vs.iter().enumerate() {
        if !comp.block.contains(&j) {
            continue;
        }
        let p: Vec<usize> = order[..rank[j]].to_vec();
        let det_p = sigma.submatrix(&p, &p).det(guard)?;
        let mut pj = p.clone();
        pj.push(j);
        let det_pj = sigma.submatrix(&pj, &pj).det(guard + 1)?;
        d.set(c, c, RationalFunction::new(det_pj, det_p.clone())?);
        for (r, &u) in vs.iter().enumerate() {
            let Some(idx) = p.iter().position(|&x| x == u) else {
                continue;
            };
            let mut cols = p.clone();
            cols[idx] = j;
            let num = sigma.submatrix(&p, &cols).det(guard)?;
            a.set(r, c, RationalFunction::new(num, det_p.clone())?);
        }
    }
    // (I − A) is unit upper triangular in topological order; invert by substitution
    let m = ExactMatrix::<RationalFunction>::identity(k).sub(&a);
    let mut kord: Vec<usize> = (0..k).collect();
    kord.sort_by_key(|&x| rank[vs[x]]);
    let mut inv = ExactMatrix::<RationalFunction>::identity(k);
    for (pos, &c) in kord.iter().enumerate() {
        // column c of inv: inv[c][c] = 1; inv[r][c] = -Σ_{s} m[r][s] inv[s][c] for r earlier
        for &r in kord[..pos].iter().rev() {
            let mut acc = RationalFunction::from_poly(Polynomial::zero());
            for &s in kord.iter().skip_while(|&&x| x != r).skip(1) {
                if rank[vs[s]] > rank[vs[c]] {
                    break;
                }
                let t = m.get(r, s);
                if t.is_zero() || inv.get(s, c).is_zero() {
                    continue;
                }
                acc = &acc - &(t * inv.get(s, c));
            }
            inv.set(r, c, acc);
        }
    }
    inv.transpose().mul(&d)?.mul(&inv)
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub block: Vec<String>,
    pub vertex_set: Vec<String>,
    pub graph: String,
    pub directed_edges: usize,
    pub bidirected_edges: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub blocks: Vec<Vec<String>>,
    pub components: Vec<ComponentReport>,
    pub directed_edges_total: usize,
    pub bidirected_edges_total: usize,
    pub edge_partition_ok: bool,
}

pub fn decomposition_report(g: &MixedGraph, dec: &Decomposition) -> DecompositionReport {
    let components: Vec<ComponentReport> = dec
        .components
        .iter()
        .map(|c| ComponentReport {
            block: g.label_set(&c.block),
            vertex_set: c.vertex_set.iter().map(|&v| g.label(v).to_string()).collect(),
            graph: c.graph.to_text(),
            directed_edges: c.graph.num_directed(),
            bidirected_edges: c.graph.num_bidirected(),
        })
        .collect();
    let dsum: usize = components.iter().map(|c| c.directed_edges).sum();
    let bsum: usize = components.iter().map(|c| c.bidirected_edges).sum();
    DecompositionReport {
        blocks: dec.blocks.iter().map(|b| g.label_set(b)).collect(),
        components,
        directed_edges_total: g.num_directed(),
        bidirected_edges_total: g.num_bidirected(),
        edge_partition_ok: dsum == g.num_directed() && bsum == g.num_bidirected(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, BigRational};
    use crate::graph::examples;
    use crate::numerics::{sample_params, sup_norm, trial_rng};
    use crate::parametrization::phi_numeric;
    use crate::separation::random_model_covariance;
    use std::collections::HashMap;

    fn set(v: &[usize]) -> NodeSet {
        v.iter().copied().collect()
    }

    #[test]
    fn tian_example_components() {
        let g = examples::tian_example();
        let dec = mixed_components(&g);
        assert_eq!(dec.blocks, vec![set(&[0, 3]), set(&[1, 2, 4])]);
        let c14 = &dec.components[0];
        assert_eq!(c14.vertex_set, vec![0, 1, 2, 3]);
        let expect = MixedGraph::from_edges(&["1", "2", "3", "4"], &[("2", "4"), ("3", "4")], &[("1", "4")]).unwrap();
        assert_eq!(c14.graph, expect);
        let c235 = &dec.components[1];
        assert_eq!(c235.vertex_set, vec![0, 1, 2, 3, 4]);
        let expect = MixedGraph::from_edges(
            &["1", "2", "3", "4", "5"],
            &[("1", "2"), ("1", "3"), ("2", "3"), ("3", "2"), ("2", "5"), ("4", "5")],
            &[("2", "5")],
        )
        .unwrap();
        assert_eq!(c235.graph, expect);
        assert!(decomposition_report(&g, &dec).edge_partition_ok);
    }

    #[test]
    fn verma_components() {
        let dec = mixed_components(&examples::verma());
        assert_eq!(dec.blocks, vec![set(&[0]), set(&[1, 3]), set(&[2])]);
        let g24 = &dec.components[1].graph;
        let expect = MixedGraph::from_edges(&["1", "2", "3", "4"], &[("1", "2"), ("3", "4")], &[("2", "4")]).unwrap();
        assert_eq!(g24, &expect);
    }

    #[test]
    fn dag_without_bidirected_edges_has_singleton_blocks() {
        let g = examples::diamond_dag();
        let dec = mixed_components(&g);
        assert_eq!(dec.blocks.len(), 4);
        assert_eq!(dec.components[3].vertex_set, vec![1, 2, 3]);
    }

    #[test]
    fn projections_of_block_one_four() {
        let g = examples::tian_example();
        let dec = mixed_components(&g);
        let p = sample_params(&g, 1, 1.0);
        let q = project_component(&p, &dec.components[0]);
        // V[C] = 1,2,3,4 and C = {1,4}
        assert_eq!(q.omega[(0, 0)], p.omega[(0, 0)]);
        assert_eq!(q.omega[(0, 3)], p.omega[(0, 3)]);
        assert_eq!(q.omega[(1, 1)], 1.0);
        assert_eq!(q.omega[(2, 2)], 1.0);
        assert_eq!(q.lambda[(1, 3)], p.lambda[(1, 3)]);
        assert_eq!(q.lambda[(0, 1)], 0.0);
        q.validate(&dec.components[0].graph).unwrap();
    }

    #[test]
    fn single_block_projection_is_identity() {
        let g = examples::directed_cycle(3);
        let dec = mixed_components(&g);
        assert_eq!(dec.blocks.len(), 1);
        let p = sample_params(&g, 4, 1.0);
        assert_eq!(project_component(&p, &dec.components[0]), p);
        let s = phi_numeric(&g, &p).unwrap();
        assert!(sup_norm(&(tian_tau(&g, &s, &dec.components[0]).unwrap() - &s)) < 1e-10);
    }

    #[test]
    fn source_singleton() {
        let g = MixedGraph::with_nodes(1);
        let dec = mixed_components(&g);
        let p = sample_params(&g, 0, 1.0);
        let q = project_component(&p, &dec.components[0]);
        assert_eq!(q.lambda[(0, 0)], 0.0);
        assert_eq!(q.omega[(0, 0)], p.omega[(0, 0)]);
    }

    #[test]
    fn diagram_commutes() {
        for g in [examples::tian_example(), examples::verma(), examples::cyclic_two_instruments(), examples::htc_example()] {
            let dec = mixed_components(&g);
            for seed in 0..10 {
                let p = sample_params(&g, seed, 1.0);
                let s = phi_numeric(&g, &p).unwrap();
                let taus = tian_tau_all(&g, &s, &dec).unwrap();
                for (c, t) in dec.components.iter().zip(&taus) {
                    let target = phi_numeric(&c.graph, &project_component(&p, c)).unwrap();
                    assert!(sup_norm(&(t - &target)) < 1e-8, "{}", sup_norm(&(t - &target)));
                }
                let back = tian_tau_inverse(&g, &dec, &taus).unwrap();
                assert!(sup_norm(&(back - &s)) < 1e-9 * sup_norm(&s).max(1.0));
            }
        }
    }

    #[test]
    fn verma_tau_entry_vanishes() {
        let g = examples::verma();
        let dec = mixed_components(&g);
        let p = sample_params(&g, 3, 1.0);
        let s = phi_numeric(&g, &p).unwrap();
        let t = tian_tau(&g, &s, &dec.components[1]).unwrap();
        assert!(t[(0, 3)].abs() < 1e-9);
    }

    fn sigma_values(s: &ExactMatrix<BigRational>) -> HashMap<Var, BigRational> {
        let mut m = HashMap::new();
        for i in 0..s.rows() {
            for j in i..s.rows() {
                m.insert(Var::sigma(i, j), s.get(i, j).clone());
            }
        }
        m
    }

    #[test]
    fn symbolic_tau_matches_numeric() {
        let g = examples::verma();
        let dec = mixed_components(&g);
        let mut rng = trial_rng(7, 0);
        let s = random_model_covariance(&g, &mut rng).unwrap();
        let vals = sigma_values(&s);
        let sf = crate::parametrization::exact_to_float(&s);
        for c in &dec.components {
            let ts = tau_symbolic(&g, c, 8).unwrap();
            let tn = tian_tau(&g, &sf, c).unwrap();
            for r in 0..c.vertex_set.len() {
                for k in 0..c.vertex_set.len() {
                    let x = crate::algebra::rat_to_f64(&ts.get(r, k).eval(&vals).unwrap());
                    assert!((x - tn[(r, k)]).abs() < 1e-8 * tn.amax().max(1.0));
                }
            }
        }
    }

    #[test]
    fn dag_tau_diagonal_is_residual_variance() {
        let g = examples::diamond_dag();
        let dec = mixed_components(&g);
        let c = &dec.components[3];
        let t = tau_symbolic(&g, c, 8).unwrap();
        let pos = c.vertex_set.iter().position(|&v| v == 3).unwrap();
        // ω44 = σ44 − Σ_{4,pa} Σ_{pa,pa}^{-1} Σ_{pa,4} at an exact point
        let mut rng = trial_rng(8, 0);
        let s = random_model_covariance(&g, &mut rng).unwrap();
        let pa = [1usize, 2];
        let spp = s.submatrix(&pa, &pa).inverse().unwrap();
        let sp4 = s.submatrix(&pa, &[3]);
        let expect = s.get(3, 3) - sp4.transpose().mul(&spp).unwrap().mul(&sp4).unwrap().get(0, 0);
        // parents have unit variance in G[C], so τ_ii − Σ_p τ_pi² is ω_ii
        let vals = sigma_values(&s);
        let mut w = t.get(pos, pos).eval(&vals).unwrap();
        for (r, _) in c.vertex_set.iter().enumerate().filter(|&(r, _)| r != pos) {
            let x = t.get(r, pos).eval(&vals).unwrap();
            w -= &x * &x;
        }
        assert_eq!(w, expect);
        // a source singleton
        let t0 = tau_symbolic(&g, &dec.components[0], 8).unwrap();
        assert_eq!(t0.get(0, 0).numerator(), &Polynomial::var(Var::sigma(0, 0)));
        assert!(t0.get(0, 0).is_polynomial());
        let _ = rat(0);
    }
}
