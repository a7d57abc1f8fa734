use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FloatMatrix, ParamPoint};
use crate::graph::MixedGraph;

/// Generator for trial `trial` of a run with seed `seed`; independent of
/// scheduling, so parallel runs reproduce sequential ones.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn sample_params(g: &MixedGraph, seed: u64, scale: f64) -> ParamPoint {
    sample_params_rng(g, &mut ChaCha8Rng::seed_from_u64(seed), scale)
}

/// Random generic parameters: `|λ_ij| ∈ [scale/10, scale]` on the directed
/// edges and a diagonally dominant `Ω` supported on the bidirected edges.
/// For cyclic graphs `Λ` is shrunk until its spectral radius is below 0.9.
pub fn sample_params_rng<R: Rng>(g: &MixedGraph, rng: &mut R, scale: f64) -> ParamPoint {
    let n = g.n();
    let mut lambda = FloatMatrix::zeros(n, n);
    for (t, h) in g.directed_edges() {
        let mag = rng.gen_range(0.1 * scale..=scale);
        lambda[(t, h)] = if rng.gen_bool(0.5) { mag } else { -mag };
    }
    let mut omega = FloatMatrix::zeros(n, n);
    for (a, b) in g.bidirected_edges() {
        let w = rng.gen_range(-1.0..=1.0);
        omega[(a, b)] = w;
        omega[(b, a)] = w;
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| omega[(i, j)].abs()).sum();
        omega[(i, i)] = off + rng.gen_range(0.5..=1.5);
    }
    if !g.is_acyclic() {
        let mut rho = spectral_radius(&lambda);
        while rho >= 0.9 {
            lambda *= 0.85 / rho;
            rho = spectral_radius(&lambda);
        }
    }
    ParamPoint { lambda, omega }
}

pub fn spectral_radius(m: &FloatMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.complex_eigenvalues().iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::examples;

    #[test]
    fn no_bidirected_edges_gives_diagonal_omega() {
        let g = examples::diamond_dag();
        let p = sample_params(&g, 3, 1.0);
        for i in 0..4 {
            assert!(p.omega[(i, i)] > 0.0);
            for j in 0..4 {
                if i != j {
                    assert_eq!(p.omega[(i, j)], 0.0);
                }
            }
        }
        p.validate(&g).unwrap();
    }

    #[test]
    fn sampling_is_reproducible() {
        let g = examples::verma();
        assert_eq!(sample_params(&g, 11, 1.0), sample_params(&g, 11, 1.0));
        assert_ne!(sample_params(&g, 11, 1.0), sample_params(&g, 12, 1.0));
        let a = sample_params_rng(&g, &mut trial_rng(5, 2), 1.0);
        let b = sample_params_rng(&g, &mut trial_rng(5, 2), 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn cyclic_samples_have_small_spectral_radius() {
        let g = examples::cyclic_two_instruments();
        for seed in 0..50 {
            let p = sample_params(&g, seed, 3.0);
            assert!(spectral_radius(&p.lambda) < 0.9);
            p.validate(&g).unwrap();
        }
    }

    #[test]
    fn coefficients_avoid_zero() {
        let g = examples::htc_gap_a();
        for seed in 0..20 {
            let p = sample_params(&g, seed, 2.0);
            for (t, h) in g.directed_edges() {
                let x = p.lambda[(t, h)].abs();
                assert!((0.2..=2.0).contains(&x), "{x}");
            }
        }
    }
}
