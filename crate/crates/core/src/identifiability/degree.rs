use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::NewtonConfig;
use crate::decomposition::mixed_components;
use crate::error::Result;
use crate::graph::MixedGraph;
use crate::numerics::{multistart_fiber, sample_params_rng, trial_rng};
use crate::parametrization::phi_numeric;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeEstimate {
    /// Most frequent number of distinct real fiber points; ties go to the larger count.
    pub modal: usize,
    pub counts: Vec<usize>,
    /// count → number of trials.
    pub distribution: BTreeMap<usize, usize>,
    pub trials: usize,
    pub starts: usize,
    pub note: String,
}

impl DegreeEstimate {
    /// Fraction of trials that found exactly `k` points.
    pub fn share(&self, k: usize) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        *self.distribution.get(&k).unwrap_or(&0) as f64 / self.trials as f64
    }
}

/// Counts real points in fibers of random model covariances by multistart
/// Newton. Trial `t` draws everything from `trial_rng(seed, t)`, so the
/// result does not depend on the thread pool.
pub fn fiber_degree_estimate(
    g: &MixedGraph,
    trials: usize,
    starts: usize,
    seed: u64,
    scale: f64,
    cfg: &NewtonConfig,
) -> Result<DegreeEstimate> {
    let counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let p = sample_params_rng(g, &mut rng, scale);
            let sigma = phi_numeric(g, &p)?;
            Ok(multistart_fiber(g, &sigma, starts, &mut rng, cfg).len())
        })
        .collect::<Result<_>>()?;
    let mut distribution = BTreeMap::new();
    for &c in &counts {
        *distribution.entry(c).or_insert(0) += 1;
    }
    let modal = distribution
        .iter()
        .max_by_key(|(k, f)| (**f, **k))
        .map(|(k, _)| *k)
        .unwrap_or(0);
    Ok(DegreeEstimate {
        modal,
        counts,
        distribution,
        trials,
        starts,
        note: "lower bound: counts real solutions reached from random starts".into(),
    })
}

/// Estimates for each mixed component, in block order.
pub fn component_degree_estimates(
    g: &MixedGraph,
    trials: usize,
    starts: usize,
    seed: u64,
    scale: f64,
    cfg: &NewtonConfig,
) -> Result<Vec<DegreeEstimate>> {
    mixed_components(g)
        .components
        .iter()
        .map(|c| fiber_degree_estimate(&c.graph, trials, starts, seed, scale, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::examples;

    #[test]
    fn three_cycle_has_two_points() {
        let g = examples::directed_cycle(3);
        let d = fiber_degree_estimate(&g, 6, 200, 1, 1.0, &NewtonConfig::default()).unwrap();
        assert_eq!(d.modal, 2, "{:?}", d.distribution);
    }

    #[test]
    fn dag_has_one_point() {
        let d = fiber_degree_estimate(&examples::diamond_dag(), 4, 30, 2, 1.0, &NewtonConfig::default()).unwrap();
        assert_eq!(d.distribution, BTreeMap::from([(1, 4)]));
    }

    #[test]
    fn estimate_is_reproducible() {
        let g = examples::cyclic_two_instruments();
        let cfg = NewtonConfig::default();
        let a = fiber_degree_estimate(&g, 3, 20, 8, 1.0, &cfg).unwrap();
        let b = fiber_degree_estimate(&g, 3, 20, 8, 1.0, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
