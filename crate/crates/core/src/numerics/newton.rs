use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{identity_minus, FloatMatrix};
use crate::config::NewtonConfig;
use crate::graph::MixedGraph;

/// The polynomial system `[(I − Λ)^T Σ (I − Λ)]_{ij} = 0` for `i < j`,
/// `i ↔ j ∉ B`, in the unknowns `λ_kl`, `k → l ∈ D`.
#[derive(Debug, Clone)]
pub struct FiberEquations {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub pairs: Vec<(usize, usize)>,
}

impl FiberEquations {
    pub fn new(g: &MixedGraph) -> Self {
        let n = g.n();
        let pairs = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !g.has_bidirected(i, j))
            .collect();
        FiberEquations { n, edges: g.directed_edges().collect(), pairs }
    }

    pub fn lambda_of(&self, x: &DVector<f64>) -> FloatMatrix {
        let mut l = FloatMatrix::zeros(self.n, self.n);
        for (k, &(t, h)) in self.edges.iter().enumerate() {
            l[(t, h)] = x[k];
        }
        l
    }

    pub fn vector_of(&self, lambda: &FloatMatrix) -> DVector<f64> {
        DVector::from_iterator(self.edges.len(), self.edges.iter().map(|&(t, h)| lambda[(t, h)]))
    }

    pub fn residual(&self, sigma: &FloatMatrix, lambda: &FloatMatrix) -> DVector<f64> {
        let m = identity_minus(lambda);
        let w = m.transpose() * sigma * &m;
        DVector::from_iterator(self.pairs.len(), self.pairs.iter().map(|&(i, j)| w[(i, j)]))
    }

    pub fn jacobian(&self, sigma: &FloatMatrix, lambda: &FloatMatrix) -> DMatrix<f64> {
        let m = identity_minus(lambda);
        let sm = sigma * &m;
        let mts = m.transpose() * sigma;
        DMatrix::from_fn(self.pairs.len(), self.edges.len(), |r, c| {
            let (i, j) = self.pairs[r];
            let (k, l) = self.edges[c];
            let mut d = 0.0;
            if i == l {
                d -= sm[(k, j)];
            }
            if j == l {
                d -= mts[(i, k)];
            }
            d
        })
    }
}

/// Largest violation of the fiber equations at `lambda`.
pub fn fiber_residual(g: &MixedGraph, lambda: &FloatMatrix, sigma: &FloatMatrix) -> f64 {
    let eq = FiberEquations::new(g);
    eq.residual(sigma, lambda).amax()
}

/// Damped Gauss-Newton (Levenberg-Marquardt) from `start`. Returns a point
/// whose residual is below `residual_tol · (1 + |λ|_∞) · |Σ|_∞` and with
/// `|det(I − Λ)|` at least `det_tol`, or `None`.
pub fn newton_fiber_solve(
    g: &MixedGraph,
    sigma: &FloatMatrix,
    start: &FloatMatrix,
    cfg: &NewtonConfig,
) -> Option<FloatMatrix> {
    solve_with(&FiberEquations::new(g), sigma, start, cfg)
}

const POLISH_STEPS: usize = 8;

fn solve_with(eq: &FiberEquations, sigma: &FloatMatrix, start: &FloatMatrix, cfg: &NewtonConfig) -> Option<FloatMatrix> {
    let mut x = eq.vector_of(start);
    let mut r = eq.residual(sigma, &eq.lambda_of(&x));
    let mut cost = r.norm_squared();
    let mut mu = 1e-3;
    let sigma_scale = sigma.amax().max(f64::MIN_POSITIVE);
    let tol = |x: &DVector<f64>| cfg.residual_tol * (1.0 + x.amax()) * sigma_scale;
    // steps taken after the tolerance is met, so that clustering sees polished roots
    let mut polish = 0;
    for _ in 0..cfg.max_iter {
        if !cost.is_finite() {
            return None;
        }
        if r.amax() < tol(&x) {
            polish += 1;
            if polish > POLISH_STEPS || cost == 0.0 {
                break;
            }
        }
        if x.is_empty() {
            return None;
        }
        let lambda = eq.lambda_of(&x);
        let j = eq.jacobian(sigma, &lambda);
        let jt = j.transpose();
        let mut h = &jt * &j;
        let grad = &jt * &r;
        for d in 0..h.nrows() {
            h[(d, d)] += mu;
        }
        let Some(step) = h.lu().solve(&(-grad)) else {
            if polish > 0 {
                break;
            }
            mu *= 10.0;
            continue;
        };
        let x_new = &x + step;
        let r_new = eq.residual(sigma, &eq.lambda_of(&x_new));
        let cost_new = r_new.norm_squared();
        if cost_new < cost {
            x = x_new;
            r = r_new;
            cost = cost_new;
            mu = (mu / 10.0).max(1e-15);
        } else if polish > 0 {
            break;
        } else {
            mu *= 10.0;
            if mu > 1e12 {
                return None;
            }
        }
    }
    if r.amax() >= tol(&x) {
        return None;
    }
    let lambda = eq.lambda_of(&x);
    let det = identity_minus(&lambda).determinant();
    (det.abs() >= cfg.det_tol && lambda.iter().all(|v| v.is_finite())).then_some(lambda)
}

/// Runs `starts` random starts and returns the distinct solutions found.
pub fn multistart_fiber<R: Rng>(
    g: &MixedGraph,
    sigma: &FloatMatrix,
    starts: usize,
    rng: &mut R,
    cfg: &NewtonConfig,
) -> Vec<FloatMatrix> {
    let eq = FiberEquations::new(g);
    let mut found = Vec::new();
    for _ in 0..starts {
        // uniform on [-s, s] divided by a uniform on [0.02, 1]: heavy tails reach far roots
        let x = DVector::from_fn(eq.edges.len(), |_, _| {
            rng.gen_range(-cfg.start_scale..=cfg.start_scale) / rng.gen_range(0.02..=1.0)
        });
        if let Some(sol) = solve_with(&eq, sigma, &eq.lambda_of(&x), cfg) {
            found.push(sol);
        }
    }
    cluster_points(&found, cfg.cluster_tol)
}

/// One representative per cluster, in order of first appearance.
pub fn cluster_points(points: &[FloatMatrix], tol: f64) -> Vec<FloatMatrix> {
    let mut reps: Vec<FloatMatrix> = Vec::new();
    for p in points {
        let close = reps.iter().any(|q| {
            let scale = p.norm().max(q.norm()).max(1.0);
            (p - q).norm() / scale < tol
        });
        if !close {
            reps.push(p.clone());
        }
    }
    reps
}
