//! Polynomial relations among covariances: conditional-independence minors,
//! trek-separation minors, and relations found through decomposition of
//! ancestral subgraphs. Also writes scripts for external algebra systems.

mod cas;

pub use cas::{emit_cas_script, CasScript, CasTask, Dialect};

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{random_rational, BigRational, ExactMatrix, Polynomial, RationalFunction, Var, VarKind};
use crate::config::Config;
use crate::decomposition::{mixed_components, tau_symbolic};
use crate::graph::{MixedGraph, NodeSet};
use crate::identifiability::ancestral_sets_by_sink_removal;
use crate::numerics::{sample_params_rng, trial_rng, FloatMatrix};
use crate::parametrization::phi_numeric;
use crate::separation::{ci_statements, subsets_of_size, trek_separation_rank};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    AlmostPrincipalMinor,
    Minor,
    Verma,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certification {
    pub model_points: usize,
    /// Largest `|f(Σ)| / Σ_terms |term(Σ)|` over the model points.
    pub max_relative_value: f64,
    pub off_model_points: usize,
    pub off_model_nonzero: usize,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    /// Row and column sets of the minor; empty for `Verma`.
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Polynomial in the `σ_ij`, `i ≤ j`, indexed by nodes of the graph.
    pub polynomial: Polynomial,
    pub provenance: String,
    pub certification: Option<Certification>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub kind: ConstraintKind,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub polynomial: String,
    pub degree: u32,
    pub terms: usize,
    pub provenance: String,
    pub certification: Option<Certification>,
}

impl Constraint {
    pub fn report(&self, g: &MixedGraph) -> ConstraintReport {
        let name = |v: &[usize]| v.iter().map(|&i| g.label(i).to_string()).collect();
        ConstraintReport {
            kind: self.kind,
            rows: name(&self.rows),
            cols: name(&self.cols),
            polynomial: self.polynomial.to_text(g.labels()),
            degree: self.polynomial.degree(),
            terms: self.polynomial.num_terms(),
            provenance: self.provenance.clone(),
            certification: self.certification.clone(),
        }
    }
}

/// `det Σ_{rows × cols}` as a polynomial in the `σ_ij`.
pub fn sigma_minor(rows: &[usize], cols: &[usize], guard: usize) -> Result<Polynomial> {
    let m = ExactMatrix::from_fn(rows.len(), cols.len(), |r, c| Polynomial::var(Var::sigma(rows[r], cols[c])));
    m.det(guard)
}

/// One almost-principal minor `det Σ_{iS × jS}` per d-separation statement
/// with `|S| ≤ max_cond`.
pub fn ci_constraints(g: &MixedGraph, max_cond: usize, guard: usize) -> Result<Vec<Constraint>> {
    ci_statements(g, max_cond)?
        .into_iter()
        .map(|st| {
            let mut rows: Vec<usize> = st.conditioning.iter().copied().collect();
            let mut cols = rows.clone();
            rows.push(st.i);
            cols.push(st.j);
            rows.sort_unstable();
            cols.sort_unstable();
            Ok(Constraint {
                kind: ConstraintKind::AlmostPrincipalMinor,
                polynomial: sigma_minor(&rows, &cols, guard)?,
                rows,
                cols,
                provenance: format!("d-separation {}", st.to_text(g)),
                certification: None,
            })
        })
        .collect()
}

/// Minors `det Σ_{A × C}`, `|A| = |C| ≤ max_size`, whose generic rank is
/// deficient by trek separation. A pair is skipped when a smaller emitted
/// pair is contained in it; `(A, C)` and `(C, A)` give the same minor.
pub fn minor_constraints(g: &MixedGraph, max_size: usize, guard: usize) -> Result<Vec<Constraint>> {
    if max_size > g.n() {
        return Err(Error::InvalidArgument(format!("minor size {max_size} exceeds the number of nodes")));
    }
    let all: Vec<usize> = (0..g.n()).collect();
    let mut found: Vec<(NodeSet, NodeSet)> = Vec::new();
    let mut out = Vec::new();
    for k in 1..=max_size {
        let subsets = subsets_of_size(&all, k);
        let pairs: Vec<(&Vec<usize>, &Vec<usize>)> = subsets
            .iter()
            .enumerate()
            .flat_map(|(x, a)| subsets[x..].iter().map(move |c| (a, c)))
            .collect();
        let deficient: Vec<(NodeSet, NodeSet, usize)> = pairs
            .par_iter()
            .map(|(a, c)| {
                let (a, c): (NodeSet, NodeSet) = (a.iter().copied().collect(), c.iter().copied().collect());
                let rank = trek_separation_rank(g, &a, &c)?.rank;
                Ok((a, c, rank))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|(_, _, r)| *r < k)
            .collect();
        for (a, c, rank) in deficient {
            let implied = found.iter().any(|(a2, c2)| {
                (a2.is_subset(&a) && c2.is_subset(&c)) || (a2.is_subset(&c) && c2.is_subset(&a))
            });
            if implied {
                continue;
            }
            let rows: Vec<usize> = a.iter().copied().collect();
            let cols: Vec<usize> = c.iter().copied().collect();
            let polynomial = sigma_minor(&rows, &cols, guard)?;
            found.push((a.clone(), c.clone()));
            if polynomial.is_zero() {
                continue;
            }
            out.push(Constraint {
                kind: ConstraintKind::Minor,
                provenance: format!(
                    "trek separation of {{{}}} and {{{}}}, rank {rank}",
                    g.label_set(&a).join(","),
                    g.label_set(&c).join(",")
                ),
                rows,
                cols,
                polynomial,
                certification: None,
            });
        }
    }
    Ok(out)
}

/// True if some trek joins `i` and `j`; acyclic or not, this only needs
/// ancestor sets.
pub fn has_trek(g: &MixedGraph, i: usize, j: usize) -> bool {
    let ai = g.ancestral_closure(&NodeSet::from([i]));
    let aj = g.ancestral_closure(&NodeSet::from([j]));
    !ai.is_disjoint(&aj) || ai.iter().any(|&u| g.siblings(u).iter().any(|w| aj.contains(w)))
}

fn rename_sigma(p: &Polynomial, map: &[usize]) -> Polynomial {
    p.substitute(|v| match v.kind {
        VarKind::Sigma => Some(Polynomial::var(Var::sigma(map[v.i as usize], map[v.j as usize]))),
        _ => None,
    })
}

/// `p(τ)`: the `σ` variables of `p` replaced by entries of `tau`.
fn compose(p: &Polynomial, tau: &ExactMatrix<RationalFunction>) -> Result<RationalFunction> {
    p.eval_with(|v| match v.kind {
        VarKind::Sigma => Some(tau.get(v.i as usize, v.j as usize).clone()),
        _ => None,
    })
}

/// Numerators of `τ_C` entries that vanish because `G[C]` has no trek
/// between the two nodes, over ancestral subgraphs and their components,
/// recursing into components up to `max_depth` levels.
pub fn verma_constraints(g: &MixedGraph, max_depth: usize, cfg: &Config) -> Result<Vec<Constraint>> {
    if !g.is_acyclic() {
        return Err(Error::Cyclic("relations from decomposition use symbolic tau".into()));
    }
    let mut found = Vec::new();
    verma_rec(g, 0, max_depth, cfg, &mut found)?;
    let mut out: Vec<Constraint> = Vec::new();
    let mut rng = trial_rng(cfg.seed, u64::MAX);
    for (p, provenance) in found {
        if p.is_zero() || p.as_constant().is_some() {
            continue;
        }
        if out.iter().any(|c| proportional(&c.polynomial, &p, cfg.equality_points, &mut rng)) {
            continue;
        }
        out.push(Constraint {
            kind: ConstraintKind::Verma,
            rows: Vec::new(),
            cols: Vec::new(),
            polynomial: p,
            provenance,
            certification: None,
        });
    }
    Ok(out)
}

fn verma_rec(
    h: &MixedGraph,
    depth: usize,
    max_depth: usize,
    cfg: &Config,
    out: &mut Vec<(Polynomial, String)>,
) -> Result<()> {
    let mut sets = vec![(0..h.n()).collect::<NodeSet>()];
    sets.extend(ancestral_sets_by_sink_removal(h, cfg.ancestral_cap));
    for a in sets {
        let (sub, map) = h.induced_subgraph(&a);
        for comp in mixed_components(&sub).components {
            let cg = &comp.graph;
            let whole =
                cg.n() == sub.n() && cg.num_directed() == sub.num_directed() && cg.num_bidirected() == sub.num_bidirected();
            if whole {
                continue;
            }
            let tau = tau_symbolic(&sub, &comp, cfg.symbolic_guard)?;
            let trace = format!(
                "ancestral set {{{}}}, component {{{}}}",
                h.label_set(&a).join(","),
                sub.label_set(&comp.block).join(",")
            );
            for r in 0..cg.n() {
                for c in r + 1..cg.n() {
                    if has_trek(cg, r, c) {
                        continue;
                    }
                    let num = tau.get(r, c).numerator().primitive();
                    if num.is_zero() {
                        continue;
                    }
                    out.push((
                        rename_sigma(&num, &map),
                        format!("{trace}, no trek between {} and {}", cg.label(r), cg.label(c)),
                    ));
                }
            }
            if depth < max_depth {
                let mut inner = Vec::new();
                verma_rec(cg, depth + 1, max_depth, cfg, &mut inner)?;
                for (q, t) in inner {
                    let num = compose(&q, &tau)?.numerator().primitive();
                    if num.is_zero() {
                        continue;
                    }
                    out.push((rename_sigma(&num, &map), format!("{trace}; {t}")));
                }
            }
        }
    }
    Ok(())
}

fn random_sigma_point<R: Rng>(vars: &[Var], rng: &mut R) -> HashMap<Var, BigRational> {
    vars.iter().map(|&v| (v, random_rational(rng, 9))).collect()
}

/// `p = c·q` for a nonzero scalar `c`, tested by exact evaluation at
/// random rational points.
pub fn proportional<R: Rng>(p: &Polynomial, q: &Polynomial, points: usize, rng: &mut R) -> bool {
    if p.is_zero() || q.is_zero() {
        return p.is_zero() && q.is_zero();
    }
    let mut vars = p.vars();
    vars.extend(q.vars());
    vars.sort();
    vars.dedup();
    let mut base: Option<(BigRational, BigRational)> = None;
    for _ in 0..points.max(2) {
        let x = random_sigma_point(&vars, rng);
        let (a, b) = (p.eval(&x).expect("all vars set"), q.eval(&x).expect("all vars set"));
        match &base {
            None if a == BigRational::from_integer(0.into()) && b == BigRational::from_integer(0.into()) => {}
            None => base = Some((a, b)),
            Some((a0, b0)) => {
                if &a * b0 != &b * a0 {
                    return false;
                }
            }
        }
    }
    base.is_some_and(|(a, b)| a != BigRational::from_integer(0.into()) && b != BigRational::from_integer(0.into()))
}

fn sigma_value(s: &FloatMatrix) -> impl FnMut(Var) -> Option<f64> + '_ {
    move |v| (v.kind == VarKind::Sigma).then(|| s[(v.i as usize, v.j as usize)])
}

/// Vanishing at `cfg.vanish_points` model covariances (floating point,
/// relative to the sum of absolute term values) and non-vanishing at
/// `cfg.offmodel_points` exact random matrices `A Aᵀ + I`.
pub fn certify_constraint(g: &MixedGraph, p: &Polynomial, cfg: &Config) -> Result<Certification> {
    let mut max_rel: f64 = 0.0;
    for k in 0..cfg.vanish_points {
        let mut rng = trial_rng(cfg.seed, k as u64);
        let params = sample_params_rng(g, &mut rng, cfg.sample_scale);
        let s = phi_numeric(g, &params)?;
        let val = p.eval_f64(sigma_value(&s))?;
        let scale = p.eval_abs_f64(sigma_value(&s))?;
        let rel = if scale > 0.0 { val.abs() / scale } else { 0.0 };
        max_rel = max_rel.max(rel);
    }
    let n = g.n();
    let mut rng = trial_rng(cfg.seed ^ 0x5eed, 0);
    let mut nonzero = 0;
    for _ in 0..cfg.offmodel_points {
        let a = ExactMatrix::from_fn(n, n, |_, _| random_rational(&mut rng, 5));
        let s = a.mul(&a.transpose())?.add(&ExactMatrix::identity(n));
        let values: HashMap<Var, BigRational> =
            p.vars().into_iter().map(|v| (v, s.get(v.i as usize, v.j as usize).clone())).collect();
        if p.eval(&values)? != BigRational::from_integer(0.into()) {
            nonzero += 1;
        }
    }
    Ok(Certification {
        model_points: cfg.vanish_points,
        max_relative_value: max_rel,
        off_model_points: cfg.offmodel_points,
        off_model_nonzero: nonzero,
        certified: max_rel < cfg.vanish_tol && nonzero == cfg.offmodel_points,
    })
}

/// Attaches a certification record to every constraint, in parallel.
pub fn certify_all(g: &MixedGraph, cs: &mut [Constraint], cfg: &Config) -> Result<()> {
    let records: Vec<Certification> =
        cs.par_iter().map(|c| certify_constraint(g, &c.polynomial, cfg)).collect::<Result<_>>()?;
    for (c, r) in cs.iter_mut().zip(records) {
        c.certification = Some(r);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscoveryOptions {
    pub max_cond: usize,
    pub max_minor_size: usize,
    pub max_depth: usize,
    pub verma: bool,
}

impl Default for DiscoveryOptions {
    fn default() -> Self {
        DiscoveryOptions { max_cond: usize::MAX, max_minor_size: 2, max_depth: 1, verma: true }
    }
}

/// CI minors, trek-separation minors and, for acyclic graphs, relations
/// from decomposition, with duplicates up to scalar removed and every
/// survivor certified.
pub fn discover_constraints(g: &MixedGraph, opts: &DiscoveryOptions, cfg: &Config) -> Result<Vec<Constraint>> {
    let guard = cfg.symbolic_guard;
    let mut all = ci_constraints(g, opts.max_cond.min(g.n().saturating_sub(2)), guard)?;
    all.extend(minor_constraints(g, opts.max_minor_size.min(g.n()), guard)?);
    if opts.verma && g.is_acyclic() {
        all.extend(verma_constraints(g, opts.max_depth, cfg)?);
    }
    let mut rng = trial_rng(cfg.seed, u64::MAX - 1);
    let mut out: Vec<Constraint> = Vec::new();
    for c in all {
        if out.iter().any(|d| proportional(&d.polynomial, &c.polynomial, cfg.equality_points, &mut rng)) {
            continue;
        }
        out.push(c);
    }
    certify_all(g, &mut out, cfg)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::graph::examples;

    fn s(i: usize, j: usize) -> Polynomial {
        Polynomial::var(Var::sigma(i - 1, j - 1))
    }

    fn f1() -> Polynomial {
        &(&s(1, 2) * &s(1, 3)) - &(&s(1, 1) * &s(2, 3))
    }

    fn f_verma() -> Polynomial {
        let t = |f: &[(usize, usize)], c: i64| {
            f.iter().fold(Polynomial::constant(rat(c)), |acc, &(i, j)| &acc * &s(i, j))
        };
        [
            t(&[(1, 1), (1, 3), (2, 2), (3, 4)], 1),
            t(&[(1, 1), (1, 3), (2, 3), (2, 4)], -1),
            t(&[(1, 1), (1, 4), (2, 2), (3, 3)], -1),
            t(&[(1, 1), (1, 4), (2, 3), (2, 3)], 1),
            t(&[(1, 2), (1, 2), (1, 3), (3, 4)], -1),
            t(&[(1, 2), (1, 2), (1, 4), (3, 3)], 1),
            t(&[(1, 2), (1, 3), (1, 3), (2, 4)], 1),
            t(&[(1, 2), (1, 3), (1, 4), (2, 3)], -1),
        ]
        .into_iter()
        .fold(Polynomial::zero(), |a, b| &a + &b)
    }

    #[test]
    fn diamond_ci_minors() {
        let g = examples::diamond_dag();
        let cs = ci_constraints(&g, 2, 8).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().any(|c| c.polynomial == f1() || c.polynomial == -f1()));
    }

    #[test]
    fn edgeless_pair() {
        let g = MixedGraph::with_nodes(2);
        let cs = ci_constraints(&g, 0, 8).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].polynomial, s(1, 2));
    }

    #[test]
    fn tetrad_for_two_instruments() {
        let g = examples::two_instruments();
        let cs = minor_constraints(&g, 2, 8).unwrap();
        let tetrad = sigma_minor(&[0, 1], &[2, 3], 8).unwrap();
        assert!(cs.iter().any(|c| c.polynomial == tetrad));
    }

    #[test]
    fn verma_relation() {
        let g = examples::verma();
        let cfg = Config::default();
        let cs = verma_constraints(&g, 1, &cfg).unwrap();
        let mut rng = trial_rng(3, 0);
        assert!(cs.iter().any(|c| proportional(&c.polynomial, &f_verma(), 10, &mut rng)), "{:?}", cs
            .iter()
            .map(|c| c.polynomial.to_text(g.labels()))
            .collect::<Vec<_>>());
        let cert = certify_constraint(&g, &f_verma(), &cfg).unwrap();
        assert!(cert.certified, "{cert:?}");
    }

    #[test]
    fn rejects_non_relation() {
        let g = MixedGraph::from_edges(&["1", "2"], &[("1", "2")], &[]).unwrap();
        let cert = certify_constraint(&g, &s(1, 2), &Config::default()).unwrap();
        assert!(!cert.certified);
    }

    #[test]
    fn proportionality() {
        let mut rng = trial_rng(1, 1);
        let p = f1();
        assert!(proportional(&p, &p.scale(&rat(-3)), 10, &mut rng));
        assert!(!proportional(&p, &s(1, 2), 10, &mut rng));
    }
}
