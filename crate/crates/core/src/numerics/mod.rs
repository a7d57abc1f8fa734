//! Floating point side: parameter points, sampling, block-LDL and the
//! Newton solver for fibers.

mod io;
mod ldl;
mod newton;
mod sample;

pub use io::{matrix_to_json, matrix_to_text, parse_matrix, MatrixFile};
pub use ldl::{block_ldl, BlockLdl};
pub use newton::{cluster_points, fiber_residual, multistart_fiber, newton_fiber_solve, FiberEquations};
pub use sample::{sample_params, sample_params_rng, spectral_radius, trial_rng};

use nalgebra::DMatrix;

use crate::graph::MixedGraph;
use crate::{Error, Result};

pub type FloatMatrix = DMatrix<f64>;

/// Parameters `(Λ, Ω)` for a graph, in node-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoint {
    pub lambda: FloatMatrix,
    pub omega: FloatMatrix,
}

impl ParamPoint {
    /// Checks supports, symmetry, positive definiteness and regularity of `I − Λ`.
    pub fn validate(&self, g: &MixedGraph) -> Result<()> {
        let n = g.n();
        if self.lambda.shape() != (n, n) || self.omega.shape() != (n, n) {
            return Err(Error::InvalidArgument(format!("parameter matrices must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                if self.lambda[(i, j)] != 0.0 && !g.has_directed(i, j) {
                    return Err(Error::InvalidArgument(format!(
                        "lambda[{},{}] is off the directed support",
                        g.label(i),
                        g.label(j)
                    )));
                }
                if i != j && self.omega[(i, j)] != 0.0 && !g.has_bidirected(i, j) {
                    return Err(Error::InvalidArgument(format!(
                        "omega[{},{}] is off the bidirected support",
                        g.label(i),
                        g.label(j)
                    )));
                }
                if self.omega[(i, j)] != self.omega[(j, i)] {
                    return Err(Error::InvalidArgument("omega is not symmetric".into()));
                }
            }
        }
        if self.omega.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite("omega".into()));
        }
        if (identity_minus(&self.lambda)).determinant().abs() < 1e-12 {
            return Err(Error::Singular("I - Lambda".into()));
        }
        Ok(())
    }
}

pub fn identity_minus(lambda: &FloatMatrix) -> FloatMatrix {
    FloatMatrix::identity(lambda.nrows(), lambda.ncols()) - lambda
}

/// Largest absolute entry.
pub fn sup_norm(m: &FloatMatrix) -> f64 {
    m.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

pub fn is_positive_definite(m: &FloatMatrix) -> bool {
    m.clone().cholesky().is_some()
}
