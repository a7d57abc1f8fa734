//! The covariance parametrization `φ_G(Λ, Ω) = (I − Λ)^{-T} Ω (I − Λ)^{-1}`,
//! numerically and symbolically, together with treks and the trek rule.

use num_traits::One;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{random_rational, rat, BigRational, ExactMatrix, Polynomial, RationalFunction, Var};
use crate::graph::MixedGraph;
use crate::numerics::{identity_minus, FloatMatrix, ParamPoint};
use crate::{Error, Result};

pub fn phi_numeric(g: &MixedGraph, p: &ParamPoint) -> Result<FloatMatrix> {
    let n = g.n();
    if p.lambda.shape() != (n, n) || p.omega.shape() != (n, n) {
        return Err(Error::InvalidArgument(format!("parameter matrices must be {n}x{n}")));
    }
    let m = identity_minus(&p.lambda);
    if m.determinant().abs() < 1e-12 {
        return Err(Error::Singular("I - Lambda".into()));
    }
    let inv = m.try_inverse().ok_or_else(|| Error::Singular("I - Lambda".into()))?;
    let s = inv.transpose() * &p.omega * inv;
    Ok((&s + s.transpose()) * 0.5)
}

/// `Ω = (I − Λ)^T Σ (I − Λ)` and the largest entry of it on non-edges of `B`.
pub fn recover_omega(g: &MixedGraph, lambda: &FloatMatrix, sigma: &FloatMatrix) -> (FloatMatrix, f64) {
    let m = identity_minus(lambda);
    let w = m.transpose() * sigma * m;
    let n = g.n();
    let mut off = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            if !g.has_bidirected(i, j) {
                off = off.max(w[(i, j)].abs());
            }
        }
    }
    (w, off)
}

/// `Λ` with a variable `λ_ij` on every directed edge.
pub fn lambda_symbolic(g: &MixedGraph) -> ExactMatrix<Polynomial> {
    ExactMatrix::from_fn(g.n(), g.n(), |i, j| {
        if g.has_directed(i, j) {
            Polynomial::var(Var::lambda(i, j))
        } else {
            Polynomial::zero()
        }
    })
}

/// `Ω` with variables on the diagonal and on bidirected edges.
pub fn omega_symbolic(g: &MixedGraph) -> ExactMatrix<Polynomial> {
    ExactMatrix::from_fn(g.n(), g.n(), |i, j| {
        if i == j || g.has_bidirected(i, j) {
            Polynomial::var(Var::omega(i, j))
        } else {
            Polynomial::zero()
        }
    })
}

/// Symbolic covariance matrix; entries are polynomials for acyclic graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicCovariance {
    pub labels: Vec<String>,
    pub entries: ExactMatrix<RationalFunction>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceEntry {
    pub row: String,
    pub col: String,
    pub value: String,
}

impl SymbolicCovariance {
    pub fn entry(&self, i: usize, j: usize) -> &RationalFunction {
        self.entries.get(i, j)
    }

    pub fn entry_text(&self, i: usize, j: usize) -> String {
        self.entries.get(i, j).to_text(&self.labels)
    }

    /// Upper triangle, row by row.
    pub fn upper_entries(&self) -> Vec<CovarianceEntry> {
        let n = self.labels.len();
        (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| CovarianceEntry {
                row: self.labels[i].clone(),
                col: self.labels[j].clone(),
                value: self.entry_text(i, j),
            })
            .collect()
    }

    pub fn to_table(&self) -> String {
        self.upper_entries()
            .into_iter()
            .map(|e| format!("s{}_{} = {}\n", e.row, e.col, e.value))
            .collect()
    }
}

/// Exact `φ_G`. Acyclic graphs use `(I − Λ)^{-1} = Σ_k Λ^k`; cyclic graphs
/// use `adj(I − Λ)^T Ω adj(I − Λ) / det(I − Λ)^2`.
pub fn phi_symbolic(g: &MixedGraph, guard: usize) -> Result<SymbolicCovariance> {
    let n = g.n();
    if n > guard {
        return Err(Error::SizeGuard { what: "symbolic parametrization", size: n, limit: guard });
    }
    let lambda = lambda_symbolic(g);
    let omega = omega_symbolic(g);
    let entries = if g.is_acyclic() {
        let mut inv = ExactMatrix::<Polynomial>::identity(n);
        let mut power = ExactMatrix::<Polynomial>::identity(n);
        for _ in 1..n {
            power = power.mul(&lambda)?;
            inv = inv.add(&power);
        }
        let s = inv.transpose().mul(&omega)?.mul(&inv)?;
        s.map(|p| RationalFunction::from_poly(p.clone()))
    } else {
        let m = ExactMatrix::<Polynomial>::identity(n).sub(&lambda);
        let det = m.det(guard)?;
        let adj = m.adjugate(guard)?;
        let num = adj.transpose().mul(&omega)?.mul(&adj)?;
        let mut out = ExactMatrix::<RationalFunction>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, RationalFunction::with_power(num.get(i, j).clone(), det.clone(), 2)?);
            }
        }
        out
    };
    Ok(SymbolicCovariance { labels: g.labels().to_vec(), entries })
}

/// Random rational parameters: nonzero `λ` on `D`, diagonally dominant `Ω`.
pub fn sample_params_exact<R: Rng>(g: &MixedGraph, rng: &mut R) -> (ExactMatrix<BigRational>, ExactMatrix<BigRational>) {
    let n = g.n();
    let mut lambda = ExactMatrix::zeros(n, n);
    for (t, h) in g.directed_edges() {
        lambda.set(t, h, random_rational(rng, 9));
    }
    let mut omega = ExactMatrix::<BigRational>::zeros(n, n);
    for (a, b) in g.bidirected_edges() {
        let w = random_rational(rng, 5);
        omega.set(a, b, w.clone());
        omega.set(b, a, w);
    }
    for i in 0..n {
        let mut d = BigRational::from_integer(rng.gen_range(1..=4).into());
        for j in 0..n {
            if j != i {
                d += num_traits::Signed::abs(omega.get(i, j));
            }
        }
        omega.set(i, i, d);
    }
    (lambda, omega)
}

/// Exact `φ_G` at rational parameters.
pub fn phi_exact(lambda: &ExactMatrix<BigRational>, omega: &ExactMatrix<BigRational>) -> Result<ExactMatrix<BigRational>> {
    let n = lambda.rows();
    let inv = ExactMatrix::<BigRational>::identity(n).sub(lambda).inverse()?;
    inv.transpose().mul(omega)?.mul(&inv)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Top {
    /// Case (b): a single top node, on both sides.
    Node(usize),
    /// Case (a): a bidirected edge `left ↔ right`.
    Edge(usize, usize),
}

/// A trek from `left[0]` to `right[0]`. `left` and `right` list the nodes of
/// each side starting at the endpoint and walking against the edges up to
/// the top.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trek {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub top: Top,
}

impl Trek {
    pub fn num_edges(&self) -> usize {
        let b = usize::from(matches!(self.top, Top::Edge(..)));
        self.left.len() - 1 + self.right.len() - 1 + b
    }

    pub fn is_trivial(&self) -> bool {
        self.left.len() == 1 && self.right.len() == 1 && matches!(self.top, Top::Node(_))
    }

    /// Left-hand side node set (the top node is on both sides).
    pub fn lhs(&self) -> Vec<usize> {
        self.left.clone()
    }

    pub fn rhs(&self) -> Vec<usize> {
        self.right.clone()
    }

    pub fn to_text(&self, g: &MixedGraph) -> String {
        let l = |v: usize| g.label(v).to_string();
        let mut s = l(self.left[0]);
        for w in self.left.windows(2) {
            s.push_str(&format!(" <- {}", l(w[1])));
        }
        if let Top::Edge(_, b) = self.top {
            s.push_str(&format!(" <-> {}", l(b)));
        }
        for k in (0..self.right.len() - 1).rev() {
            s.push_str(&format!(" -> {}", l(self.right[k])));
        }
        s
    }

    fn sort_key(&self) -> (usize, Vec<usize>, Vec<usize>, &Top) {
        (self.num_edges(), self.left.clone(), self.right.clone(), &self.top)
    }
}

/// Walks against the edges starting at `v` with at most `max_edges` edges,
/// each as node list `[v, p1, p2, ...]`.
fn upward_walks(g: &MixedGraph, v: usize, max_edges: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![vec![v]];
    while let Some(w) = stack.pop() {
        let last = *w.last().expect("nonempty walk");
        if w.len() <= max_edges {
            for &p in g.parents(last) {
                let mut x = w.clone();
                x.push(p);
                stack.push(x);
            }
        }
        out.push(w);
    }
    out
}

/// All treks from `i` to `j` with at most `max_edges` edges. A bound is
/// required for cyclic graphs, where there are infinitely many treks.
pub fn list_treks(g: &MixedGraph, i: usize, j: usize, max_edges: Option<usize>) -> Result<Vec<Trek>> {
    let bound = match max_edges {
        Some(b) => b,
        None if g.is_acyclic() => 2 * g.n(),
        None => return Err(Error::Cyclic("trek enumeration needs an edge bound".into())),
    };
    let left = upward_walks(g, i, bound);
    let right = upward_walks(g, j, bound);
    let mut out = Vec::new();
    for l in &left {
        let a = *l.last().expect("nonempty");
        for r in &right {
            let b = *r.last().expect("nonempty");
            let edges = l.len() + r.len() - 2;
            if a == b && edges <= bound {
                out.push(Trek { left: l.clone(), right: r.clone(), top: Top::Node(a) });
            }
            if g.has_bidirected(a, b) && edges < bound {
                out.push(Trek { left: l.clone(), right: r.clone(), top: Top::Edge(a, b) });
            }
        }
    }
    out.sort_by(|x, y| x.sort_key().cmp(&y.sort_key()));
    Ok(out)
}

pub fn trek_monomial(t: &Trek) -> Polynomial {
    let mut p = match t.top {
        Top::Node(v) => Polynomial::var(Var::omega(v, v)),
        Top::Edge(a, b) => Polynomial::var(Var::omega(a, b)),
    };
    for side in [&t.left, &t.right] {
        for w in side.windows(2) {
            p = &p * &Polynomial::var(Var::lambda(w[1], w[0]));
        }
    }
    p
}

/// `σ_ij` as the sum of trek monomials over all treks from `i` to `j`.
pub fn trek_rule_entry(g: &MixedGraph, i: usize, j: usize) -> Result<Polynomial> {
    if !g.is_acyclic() {
        return Err(Error::Cyclic("the finite trek rule needs an acyclic graph".into()));
    }
    let mut p = Polynomial::zero();
    for t in list_treks(g, i, j, None)? {
        p = &p + &trek_monomial(&t);
    }
    Ok(p)
}

/// Evaluates a polynomial in `λ` and `ω` at a numeric parameter point.
pub fn eval_at_params(p: &Polynomial, params: &ParamPoint) -> Result<f64> {
    p.eval_f64(|v| match v.kind {
        crate::algebra::VarKind::Lambda => Some(params.lambda[(v.i as usize, v.j as usize)]),
        crate::algebra::VarKind::Omega => Some(params.omega[(v.i as usize, v.j as usize)]),
        crate::algebra::VarKind::Sigma => None,
    })
}

pub fn exact_to_float(m: &ExactMatrix<BigRational>) -> FloatMatrix {
    FloatMatrix::from_fn(m.rows(), m.cols(), |i, j| crate::algebra::rat_to_f64(m.get(i, j)))
}

/// `I` as a rational matrix, handy for tests.
pub fn exact_identity(n: usize) -> ExactMatrix<BigRational> {
    ExactMatrix::from_fn(n, n, |i, j| if i == j { BigRational::one() } else { rat(0) })
}
