use nalgebra::{DMatrix, DVector};

use super::htc::HtcCertificate;
use crate::error::{Error, Result};
use crate::graph::MixedGraph;
use crate::numerics::{identity_minus, FloatMatrix, ParamPoint};
use crate::parametrization::{phi_numeric, recover_omega};

/// Relative singular-value floor below which a system counts as degenerate.
const RCOND_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Recovered {
    pub lambda: FloatMatrix,
    pub omega: FloatMatrix,
    /// Sup-norm of `φ_G(Λ̂, Ω̂) − Σ`.
    pub residual: f64,
}

/// Solves for `Λ` column by column in certificate order.
///
/// Row `j ∈ Y_i` of the system for node `i` is `[(I − Λ)^T Σ]_j` when
/// column `j` of `Λ` is already known and `Σ_j` otherwise. The second form
/// only arises for `j` without a half-trek from `i`, where
/// `[Σ (I − Λ)]_{j,i} = 0` holds as well.
pub fn recover_lambda(g: &MixedGraph, sigma: &FloatMatrix, cert: &HtcCertificate) -> Result<FloatMatrix> {
    let n = g.n();
    if sigma.nrows() != n || sigma.ncols() != n {
        return Err(Error::Matrix(format!("expected a {n}x{n} covariance matrix")));
    }
    let mut lambda = FloatMatrix::zeros(n, n);
    let mut known = vec![false; n];
    for &i in &cert.ordering {
        let pa = g.parents(i);
        if !pa.is_empty() {
            let y: Vec<usize> = cert
                .y_sets
                .get(&i)
                .ok_or_else(|| Error::InvalidArgument(format!("certificate lacks a Y-set for {}", g.label(i))))?
                .iter()
                .copied()
                .collect();
            if y.len() != pa.len() {
                return Err(Error::InvalidArgument(format!("Y-set size mismatch at {}", g.label(i))));
            }
            let m = identity_minus(&lambda);
            let row = |j: usize, c: usize| -> f64 {
                if known[j] {
                    (0..n).map(|k| m[(k, j)] * sigma[(k, c)]).sum()
                } else {
                    sigma[(j, c)]
                }
            };
            let a = DMatrix::from_fn(y.len(), pa.len(), |r, c| row(y[r], pa[c]));
            let b = DVector::from_fn(y.len(), |r, _| row(y[r], i));
            let sv = a.singular_values();
            let (hi, lo) = (sv.max(), sv.min());
            if !(hi > 0.0) || lo / hi < RCOND_FLOOR {
                return Err(Error::Degenerate { node: g.label(i).to_string() });
            }
            let x = a.lu().solve(&b).ok_or_else(|| Error::Degenerate { node: g.label(i).to_string() })?;
            for (c, &p) in pa.iter().enumerate() {
                lambda[(p, i)] = x[c];
            }
        }
        known[i] = true;
    }
    Ok(lambda)
}

/// `Λ` by `recover_lambda`, then `Ω`, and the reconstruction residual.
pub fn recover_params(g: &MixedGraph, sigma: &FloatMatrix, cert: &HtcCertificate) -> Result<Recovered> {
    let lambda = recover_lambda(g, sigma, cert)?;
    let (omega, _) = recover_omega(g, &lambda, sigma);
    let back = phi_numeric(g, &ParamPoint { lambda: lambda.clone(), omega: omega.clone() })?;
    let residual = (back - sigma).amax();
    Ok(Recovered { lambda, omega, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::examples;
    use crate::identifiability::htc::htc_identifiable;
    use crate::numerics::sample_params;

    fn cert(g: &MixedGraph) -> HtcCertificate {
        htc_identifiable(g, 8).certificate.expect("certified")
    }

    #[test]
    fn instrumental_variable_ratio() {
        let g = examples::instrumental_variable();
        let p = sample_params(&g, 4, 1.0);
        let s = phi_numeric(&g, &p).unwrap();
        let l = recover_lambda(&g, &s, &cert(&g)).unwrap();
        assert!((l[(1, 2)] - s[(0, 2)] / s[(0, 1)]).abs() < 1e-12);
        assert!((l[(1, 2)] - p.lambda[(1, 2)]).abs() < 1e-10);
    }

    #[test]
    fn seemingly_unrelated_ratios() {
        let g = examples::seemingly_unrelated();
        let p = sample_params(&g, 9, 1.0);
        let s = phi_numeric(&g, &p).unwrap();
        let l = recover_lambda(&g, &s, &cert(&g)).unwrap();
        assert!((l[(0, 1)] - s[(0, 1)] / s[(0, 0)]).abs() < 1e-10);
        assert!((l[(3, 2)] - s[(2, 3)] / s[(3, 3)]).abs() < 1e-10);
    }

    #[test]
    fn round_trip_on_certified_graphs() {
        for g in [examples::htc_example(), examples::two_instruments(), examples::verma(), examples::cyclic_two_instruments()] {
            let c = cert(&g);
            for seed in 0..10 {
                let p = sample_params(&g, seed, 1.0);
                let s = phi_numeric(&g, &p).unwrap();
                let r = recover_params(&g, &s, &c).unwrap();
                assert!((&r.lambda - &p.lambda).amax() < 1e-8);
                assert!((&r.omega - &p.omega).amax() < 1e-8);
                assert!(r.residual < 1e-8);
            }
        }
    }

    #[test]
    fn degenerate_sigma_is_reported() {
        let g = examples::instrumental_variable();
        let mut s = FloatMatrix::identity(3, 3);
        s[(1, 2)] = 0.3;
        s[(2, 1)] = 0.3;
        let err = recover_lambda(&g, &s, &cert(&g)).unwrap_err();
        assert_eq!(err, Error::Degenerate { node: "3".into() });
    }
}
