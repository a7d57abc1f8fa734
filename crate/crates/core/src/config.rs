//! Tunable tolerances, size guards and trial counts.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonConfig {
    pub max_iter: usize,
    /// Sup-norm bound on the fiber equations at an accepted solution,
    /// relative to `(1 + |λ|_∞) · |Σ|_∞`.
    pub residual_tol: f64,
    /// Solutions with `|det(I − Λ)|` below this are discarded.
    pub det_tol: f64,
    /// Relative distance under which two solutions are the same point.
    pub cluster_tol: f64,
    /// Scale of random starting points; each coordinate is uniform on
    /// `[-start_scale, start_scale]` divided by a uniform draw from `[0.02, 1]`.
    pub start_scale: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            max_iter: 300,
            residual_tol: 1e-10,
            det_tol: 1e-8,
            cluster_tol: 1e-5,
            start_scale: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub seed: u64,
    /// Range of sampled edge coefficients.
    pub sample_scale: f64,
    /// Largest matrix for symbolic determinants and adjugates.
    pub symbolic_guard: usize,
    /// Largest graph for the exhaustive necessary half-trek search.
    pub necessary_guard: usize,
    /// Cap on ancestral sets visited by recursive searches.
    pub ancestral_cap: usize,
    pub newton: NewtonConfig,
    pub degree_trials: usize,
    pub degree_starts: usize,
    /// Relative tolerance for vanishing at model points.
    pub vanish_tol: f64,
    pub vanish_points: usize,
    pub offmodel_points: usize,
    /// Random points used when comparing polynomials up to scalar.
    pub equality_points: usize,
    pub rank_draws: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            sample_scale: 1.0,
            symbolic_guard: 8,
            necessary_guard: 8,
            ancestral_cap: 64,
            newton: NewtonConfig::default(),
            degree_trials: 20,
            degree_starts: 200,
            vanish_tol: 1e-8,
            vanish_points: 20,
            offmodel_points: 5,
            equality_points: 10,
            rank_draws: 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_json_fills_defaults() {
        let c: Config = serde_json::from_str(r#"{"seed": 7, "newton": {"max_iter": 5}}"#).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.newton.max_iter, 5);
        assert_eq!(c.newton.cluster_tol, 1e-5);
        assert_eq!(c.symbolic_guard, 8);
    }
}
