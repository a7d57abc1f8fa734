//! Exact arithmetic: rational numbers, sparse polynomials in model
//! variables, rational functions and dense exact matrices.

mod matrix;
mod poly;
mod rational;

pub use matrix::ExactMatrix;
pub use num_rational::BigRational;
pub use poly::{
    default_labels, needs_separator, rat, rat_frac, rat_from_f64, rat_to_f64, Monomial, Polynomial, Var, VarKind,
};
pub use rational::RationalFunction;

use rand::Rng;

/// A random nonzero rational `p/q` with `|p| ≤ span` and `1 ≤ q ≤ 7`.
pub fn random_rational<R: Rng>(rng: &mut R, span: i64) -> BigRational {
    loop {
        let p = rng.gen_range(-span..=span);
        if p != 0 {
            return rat_frac(p, rng.gen_range(1..=7));
        }
    }
}
