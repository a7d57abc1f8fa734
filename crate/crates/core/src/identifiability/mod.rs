//! Global and generic identifiability of the edge coefficients.

mod degree;
mod global;
mod htc;
mod recover;

pub use degree::{component_degree_estimates, fiber_degree_estimate, DegreeEstimate};
pub use global::{
    global_id, is_unique_sink_witness, unique_sink_witness, unique_sink_witness_brute, GlobalIdVerdict,
    NonInjectiveReason,
};
pub use htc::{
    check_certificate, has_half_trek_system, htc_fixpoint, htc_flow_check, htc_identifiable, necessary_search,
    HtcAnalysis, HtcCertificate, NecessaryOutcome,
};
pub use recover::{recover_lambda, recover_params, Recovered};

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::config::Config;
use crate::decomposition::mixed_components;
use crate::error::Result;
use crate::graph::{MixedGraph, NodeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    GloballyIdentifiable,
    GenericallyIdentifiable,
    GenericallyInfiniteToOne,
    Undecided,
    /// Undecided, and the necessary-condition search was skipped or cut short.
    UndecidedByBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Via {
    Global,
    Htc,
    Component,
    Ancestral,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeNote {
    pub tail: String,
    pub head: String,
    pub identified: bool,
    pub via: Option<Via>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YSet {
    pub node: String,
    pub y: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalSummary {
    pub injective: bool,
    pub witness: Option<Vec<String>>,
    pub reason: Option<NonInjectiveReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HtcSummary {
    pub sufficient: bool,
    pub solved: Vec<String>,
    pub y_sets: Vec<YSet>,
    /// Present when `sufficient`.
    pub ordering: Option<Vec<String>>,
    pub necessary: &'static str,
    pub necessary_y_sets: Option<Vec<YSet>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentIdentifiability {
    pub block: Vec<String>,
    pub vertex_set: Vec<String>,
    pub global: GlobalSummary,
    pub htc: HtcSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentifiabilityReport {
    pub status: Status,
    pub global: GlobalSummary,
    pub htc: HtcSummary,
    pub components: Vec<ComponentIdentifiability>,
    pub ancestral_sets_checked: usize,
    pub edges: Vec<EdgeNote>,
    pub degree: Option<DegreeEstimate>,
}

fn labels_of<'a>(g: &MixedGraph, nodes: impl IntoIterator<Item = &'a usize>) -> Vec<String> {
    nodes.into_iter().map(|&v| g.label(v).to_string()).collect()
}

fn y_list(g: &MixedGraph, y_sets: &BTreeMap<usize, NodeSet>) -> Vec<YSet> {
    y_sets
        .iter()
        .map(|(i, y)| YSet { node: g.label(*i).to_string(), y: labels_of(g, y) })
        .collect()
}

pub fn global_summary(g: &MixedGraph, v: &GlobalIdVerdict) -> GlobalSummary {
    GlobalSummary {
        injective: v.injective,
        witness: v.witness.as_ref().map(|w| labels_of(g, w)),
        reason: v.reason,
    }
}

pub fn htc_summary(g: &MixedGraph, a: &HtcAnalysis) -> HtcSummary {
    let (necessary, necessary_y_sets) = match &a.necessary {
        NecessaryOutcome::Holds { y_sets } => ("holds", Some(y_list(g, y_sets))),
        NecessaryOutcome::Fails => ("fails", None),
        NecessaryOutcome::Undecided => ("undecided", None),
    };
    HtcSummary {
        sufficient: a.sufficient(),
        solved: labels_of(g, &a.solved),
        y_sets: y_list(g, &a.y_sets),
        ordering: a.certificate.as_ref().map(|c| labels_of(g, &c.ordering)),
        necessary,
        necessary_y_sets,
    }
}

/// Ancestral sets reachable from `V` by repeatedly deleting a sink,
/// largest first, excluding `V` itself; at most `cap` of them.
pub fn ancestral_sets_by_sink_removal(g: &MixedGraph, cap: usize) -> Vec<NodeSet> {
    let all: NodeSet = (0..g.n()).collect();
    let mut seen = BTreeSet::from([all.clone()]);
    let mut queue = VecDeque::from([all]);
    let mut out = Vec::new();
    while let Some(s) = queue.pop_front() {
        for &v in &s {
            if g.children(v).iter().any(|c| s.contains(c)) {
                continue;
            }
            let mut t = s.clone();
            t.remove(&v);
            if t.is_empty() || !seen.insert(t.clone()) {
                continue;
            }
            if out.len() == cap {
                return out;
            }
            out.push(t.clone());
            queue.push_back(t);
        }
    }
    out
}

/// Combines the global criterion, the half-trek criterion on `G`, on its
/// mixed components, and on the components of ancestral subgraphs.
pub fn identify(g: &MixedGraph, cfg: &Config) -> IdentifiabilityReport {
    let n = g.n();
    let global = global_id(g);
    let full = htc_identifiable(g, cfg.necessary_guard);
    let mut via: Vec<Option<Via>> = vec![None; n];
    if global.injective {
        via.iter_mut().for_each(|v| *v = Some(Via::Global));
    }
    for &i in &full.solved {
        via[i].get_or_insert(Via::Htc);
    }

    let mut infinite = matches!(full.necessary, NecessaryOutcome::Fails);
    let mut budget = matches!(full.necessary, NecessaryOutcome::Undecided);
    let mut components = Vec::new();
    let dec = mixed_components(g);
    for comp in &dec.components {
        let cg = &comp.graph;
        let cv = global_id(cg);
        let ca = htc_identifiable(cg, cfg.necessary_guard);
        let solved: Vec<usize> = if cv.injective { (0..cg.n()).collect() } else { ca.solved.clone() };
        for k in solved {
            via[comp.vertex_set[k]].get_or_insert(Via::Component);
        }
        infinite |= matches!(ca.necessary, NecessaryOutcome::Fails);
        components.push(ComponentIdentifiability {
            block: g.label_set(&comp.block),
            vertex_set: labels_of(g, &comp.vertex_set),
            global: global_summary(cg, &cv),
            htc: htc_summary(cg, &ca),
        });
    }

    let pending = |via: &[Option<Via>]| (0..n).any(|i| via[i].is_none() && !g.parents(i).is_empty());
    let mut ancestral_sets_checked = 0;
    if pending(&via) {
        for a in ancestral_sets_by_sink_removal(g, cfg.ancestral_cap) {
            if !a.iter().any(|&i| via[i].is_none() && !g.parents(i).is_empty()) {
                continue;
            }
            ancestral_sets_checked += 1;
            let (sub, map) = g.induced_subgraph(&a);
            for comp in mixed_components(&sub).components {
                let cg = &comp.graph;
                let solved: Vec<usize> =
                    if global_id(cg).injective { (0..cg.n()).collect() } else { htc_fixpoint(cg).0 };
                for k in solved {
                    via[map[comp.vertex_set[k]]].get_or_insert(Via::Ancestral);
                }
            }
            if !pending(&via) {
                break;
            }
        }
    }

    let status = if global.injective {
        Status::GloballyIdentifiable
    } else if !pending(&via) {
        Status::GenericallyIdentifiable
    } else if infinite {
        Status::GenericallyInfiniteToOne
    } else {
        budget |= components.iter().any(|c| c.htc.necessary == "undecided");
        if budget {
            Status::UndecidedByBudget
        } else {
            Status::Undecided
        }
    };
    let edges = g
        .directed_edges()
        .map(|(t, h)| EdgeNote {
            tail: g.label(t).to_string(),
            head: g.label(h).to_string(),
            identified: via[h].is_some(),
            via: via[h],
        })
        .collect();
    IdentifiabilityReport {
        status,
        global: global_summary(g, &global),
        htc: htc_summary(g, &full),
        components,
        ancestral_sets_checked,
        edges,
        degree: None,
    }
}

/// `identify` plus a multistart estimate of the fiber size.
pub fn identify_with_degree(g: &MixedGraph, cfg: &Config) -> Result<IdentifiabilityReport> {
    let mut r = identify(g, cfg);
    r.degree = Some(fiber_degree_estimate(
        g,
        cfg.degree_trials,
        cfg.degree_starts,
        cfg.seed,
        cfg.sample_scale,
        &cfg.newton,
    )?);
    Ok(r)
}
