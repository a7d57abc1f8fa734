use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Lambda,
    Omega,
    Sigma,
}

/// A model variable: `λ_ij` (edge `i → j`), `ω_ij` or `σ_ij` (symmetric, `i ≤ j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub i: u16,
    pub j: u16,
}

impl Var {
    pub fn lambda(tail: usize, head: usize) -> Self {
        Var { kind: VarKind::Lambda, i: tail as u16, j: head as u16 }
    }

    pub fn omega(i: usize, j: usize) -> Self {
        Var { kind: VarKind::Omega, i: i.min(j) as u16, j: i.max(j) as u16 }
    }

    pub fn sigma(i: usize, j: usize) -> Self {
        Var { kind: VarKind::Sigma, i: i.min(j) as u16, j: i.max(j) as u16 }
    }

    pub fn name(&self, labels: &[String]) -> String {
        let prefix = match self.kind {
            VarKind::Lambda => 'l',
            VarKind::Omega => 'w',
            VarKind::Sigma => 's',
        };
        let (a, b) = (&labels[self.i as usize], &labels[self.j as usize]);
        if needs_separator(labels) {
            format!("{prefix}{a}_{b}")
        } else {
            format!("{prefix}{a}{b}")
        }
    }
}

/// Variable names are glued (`l12`) unless that could be ambiguous.
pub fn needs_separator(labels: &[String]) -> bool {
    labels.len() > 9 || labels.iter().any(|l| l.chars().count() != 1)
}

/// Labels `1..=n`, used when no graph is at hand.
pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// Sparse exponent vector sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_powers(mut powers: Vec<(Var, u32)>) -> Self {
        powers.retain(|&(_, e)| e > 0);
        powers.sort_by_key(|&(v, _)| v);
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(powers.len());
        for (v, e) in powers {
            match out.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn powers(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            let mut f = 0;
            if j < other.0.len() && other.0[j].0 == v {
                f = other.0[j].1;
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if f > e {
                return None;
            }
            if e > f {
                out.push((v, e - f));
            }
        }
        (j == other.0.len()).then_some(Monomial(out))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }
}

// Lexicographic with the largest variable most significant. Printing terms in
// ascending order of this ordering puts pure ω terms last.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (a.len(), b.len());
        loop {
            match (i, j) {
                (0, 0) => return Ordering::Equal,
                (_, 0) => return Ordering::Greater,
                (0, _) => return Ordering::Less,
                _ => {}
            }
            let (va, ea) = a[i - 1];
            let (vb, eb) = b[j - 1];
            match va.cmp(&vb) {
                Ordering::Greater => return Ordering::Greater,
                Ordering::Less => return Ordering::Less,
                Ordering::Equal => match ea.cmp(&eb) {
                    Ordering::Equal => {
                        i -= 1;
                        j -= 1;
                    }
                    o => return o,
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Converts a finite `f64` to an exact rational.
pub fn rat_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

pub fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_some_and(|c| c.is_one())
    }

    pub fn constant_term(&self) -> Option<&BigRational> {
        self.terms.get(&Monomial::one())
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.constant_term().cloned(),
            _ => None,
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(n, a)| (n.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut r = self.clone();
        let mut q = Polynomial::zero();
        while let Some((rm, rc)) = r.leading() {
            let m = rm.div(&dm)?;
            let c = rc / &dc;
            r = &r - &d.mul_monomial(&m, &c);
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Gcd of the numerators over lcm of the denominators, signed so that the
    /// leading coefficient of `self / content` is positive.
    pub fn content(&self) -> BigRational {
        use num_integer::Integer;
        let Some((_, lead)) = self.leading() else {
            return BigRational::one();
        };
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for c in self.terms.values() {
            g = g.gcd(c.numer());
            l = l.lcm(c.denom());
        }
        let c = BigRational::new(g, l);
        if lead.is_negative() {
            -c
        } else {
            c
        }
    }

    /// `self` divided by its content: integer coefficients, positive leading one.
    pub fn primitive(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.content().recip())
    }

    pub fn eval_with<T, F>(&self, mut value: F) -> Result<T>
    where
        T: Clone + Zero + One + Mul<Output = T> + Add<Output = T>,
        F: FnMut(Var) -> Option<T>,
        T: From<CoeffCast>,
    {
        let mut cache: HashMap<Var, T> = HashMap::new();
        let mut total = T::zero();
        for (m, c) in &self.terms {
            let mut t = T::from(CoeffCast(c.clone()));
            for &(v, e) in m.powers() {
                let x = match cache.get(&v) {
                    Some(x) => x.clone(),
                    None => {
                        let x = value(v).ok_or_else(|| Error::MissingVariable(format!("{v:?}")))?;
                        cache.insert(v, x.clone());
                        x
                    }
                };
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            total = total + t;
        }
        Ok(total)
    }

    pub fn eval(&self, values: &HashMap<Var, BigRational>) -> Result<BigRational> {
        self.eval_with(|v| values.get(&v).cloned().map(CoeffCast))
            .map(|c: CoeffCast| c.0)
    }

    pub fn eval_f64<F: FnMut(Var) -> Option<f64>>(&self, mut value: F) -> Result<f64> {
        self.eval_with(|v| value(v).map(F64))
            .map(|x: F64| x.0)
    }

    /// Sum of absolute values of the terms at a point, a scale for relative tests.
    pub fn eval_abs_f64<F: FnMut(Var) -> Option<f64>>(&self, mut value: F) -> Result<f64> {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut t = rat_to_f64(c).abs();
            for &(v, e) in m.powers() {
                let x = value(v).ok_or_else(|| Error::MissingVariable(format!("{v:?}")))?;
                t *= x.abs().powi(e as i32);
            }
            total += t;
        }
        Ok(total)
    }

    /// Substitutes polynomials for variables; variables without a value stay.
    pub fn substitute<F: FnMut(Var) -> Option<Polynomial>>(&self, mut value: F) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(c.clone());
            for &(v, e) in m.powers() {
                let x = value(v).unwrap_or_else(|| Polynomial::var(v));
                t = &t * &x.pow(e);
            }
            out = &out + &t;
        }
        out
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.terms.keys().flat_map(|m| m.vars()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Text rendering, e.g. `l12*l13*l34*w11 + l12^2*l23*l34*w11 + l23*l34*w22 + w24`.
    pub fn to_text(&self, labels: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !a.is_one() || m.powers().is_empty() {
                factors.push(a.to_string());
            }
            for &(v, e) in m.powers() {
                let n = v.name(labels);
                factors.push(if e == 1 { n } else { format!("{n}^{e}") });
            }
            s.push_str(&factors.join("*"));
        }
        s
    }
}

/// Wrapper so rational coefficients can be cast into an evaluation ring.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffCast(pub BigRational);

impl Zero for CoeffCast {
    fn zero() -> Self {
        CoeffCast(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for CoeffCast {
    fn one() -> Self {
        CoeffCast(BigRational::one())
    }
}

impl Add for CoeffCast {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        CoeffCast(self.0 + o.0)
    }
}

impl Mul for CoeffCast {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        CoeffCast(self.0 * o.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F64(pub f64);

impl From<CoeffCast> for F64 {
    fn from(c: CoeffCast) -> Self {
        F64(rat_to_f64(&c.0))
    }
}

impl Zero for F64 {
    fn zero() -> Self {
        F64(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

impl One for F64 {
    fn one() -> Self {
        F64(1.0)
    }
}

impl Add for F64 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        F64(self.0 + o.0)
    }
}

impl Mul for F64 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        F64(self.0 * o.0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self
            .terms
            .keys()
            .flat_map(|m| m.vars())
            .map(|v| v.i.max(v.j) as usize + 1)
            .max()
            .unwrap_or(0);
        f.write_str(&self.to_text(&default_labels(n)))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (m, a) in &self.terms {
            for (n, b) in &o.terms {
                let e = acc.entry(m.mul(n)).or_insert_with(BigRational::zero);
                *e += a * b;
            }
        }
        Polynomial {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, o: Polynomial) -> Polynomial {
                (&self).$f(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Zero for Polynomial {
    fn zero() -> Self {
        Polynomial::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Polynomial {
    fn one() -> Self {
        Polynomial::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(i: usize, j: usize) -> Polynomial {
        Polynomial::var(Var::lambda(i - 1, j - 1))
    }
    fn w(i: usize, j: usize) -> Polynomial {
        Polynomial::var(Var::omega(i - 1, j - 1))
    }
    fn s(i: usize, j: usize) -> Polynomial {
        Polynomial::var(Var::sigma(i - 1, j - 1))
    }

    #[test]
    fn eval_simple_monomial() {
        let p = &(&w(1, 1) * &l(1, 2)) * &l(2, 3);
        let mut vals = HashMap::new();
        vals.insert(Var::lambda(0, 1), rat(2));
        vals.insert(Var::lambda(1, 2), rat(3));
        vals.insert(Var::omega(0, 0), rat(1));
        assert_eq!(p.eval(&vals).unwrap(), rat(6));
        vals.remove(&Var::omega(0, 0));
        assert!(matches!(p.eval(&vals), Err(Error::MissingVariable(_))));
        assert_eq!(Polynomial::zero().eval(&HashMap::new()).unwrap(), rat(0));
    }

    #[test]
    fn cancellation_gives_empty_map() {
        let p = &(&s(1, 2) * &s(1, 3)) - &(&s(1, 1) * &s(2, 3));
        let z = &p + &(-&p);
        assert!(z.is_zero());
        assert_eq!(z.num_terms(), 0);
    }

    #[test]
    fn printing_order_puts_omega_last() {
        let p = &(&(&(&l(1, 2) * &l(1, 3)) * &l(3, 4)) * &w(1, 1))
            + &(&(&(&(&l(1, 2) * &l(1, 2)) * &l(2, 3)) * &l(3, 4)) * &w(1, 1));
        let p = &(&p + &(&(&l(2, 3) * &l(3, 4)) * &w(2, 2))) + &w(2, 4);
        assert_eq!(p.to_string(), "l12*l13*l34*w11 + l12^2*l23*l34*w11 + l23*l34*w22 + w24");
    }

    #[test]
    fn negative_and_rational_coefficients() {
        let p = &s(1, 1).scale(&rat_frac(-3, 2)) + &Polynomial::constant(rat(2));
        assert_eq!(p.to_string(), "2 - 3/2*s11");
        assert_eq!(p.primitive().to_string(), "-4 + 3*s11");
    }

    #[test]
    fn separator_for_long_labels() {
        let labels: Vec<String> = (1..=10).map(|i| i.to_string()).collect();
        assert_eq!(Var::sigma(9, 0).name(&labels), "s1_10");
    }

    #[test]
    fn exact_division() {
        let a = &s(1, 2) - &s(1, 3);
        let b = &(&s(1, 1) * &s(2, 2)) + &Polynomial::one();
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!(b.div_exact(&a).is_none());
        assert!(s(1, 1).div_exact(&s(1, 2)).is_none());
    }

    #[test]
    fn monomial_division() {
        let m = Monomial::from_powers(vec![(Var::sigma(0, 0), 2), (Var::sigma(0, 1), 1)]);
        let n = Monomial::from_powers(vec![(Var::sigma(0, 0), 1)]);
        assert_eq!(m.div(&n).unwrap(), Monomial::from_powers(vec![(Var::sigma(0, 0), 1), (Var::sigma(0, 1), 1)]));
        assert!(n.div(&m).is_none());
        let k = Monomial::from_powers(vec![(Var::sigma(0, 2), 1)]);
        assert!(m.div(&k).is_none());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_poly() -> impl Strategy<Value = Polynomial> {
            prop::collection::vec((0usize..3, 0usize..3, 0u32..3, -5i64..5), 0..5).prop_map(|ts| {
                let mut p = Polynomial::zero();
                for (i, j, e, c) in ts {
                    p.add_term(Monomial::from_powers(vec![(Var::sigma(i, j), e), (Var::lambda(0, 1), e % 2)]), rat(c));
                }
                p
            })
        }

        fn point() -> impl Strategy<Value = Vec<i64>> {
            prop::collection::vec(-7i64..7, 10)
        }

        fn values(p: &[i64]) -> HashMap<Var, BigRational> {
            let mut m = HashMap::new();
            let mut k = 0;
            for i in 0..3 {
                for j in i..3 {
                    m.insert(Var::sigma(i, j), rat(p[k]));
                    k += 1;
                }
            }
            m.insert(Var::lambda(0, 1), rat_frac(p[6], 3));
            m
        }

        proptest! {
            #[test]
            fn eval_is_a_ring_map(p in arb_poly(), q in arb_poly(), x in point()) {
                let v = values(&x);
                let pq = &p * &q;
                prop_assert_eq!(pq.eval(&v).unwrap(), p.eval(&v).unwrap() * q.eval(&v).unwrap());
                prop_assert_eq!((&p + &q).eval(&v).unwrap(), p.eval(&v).unwrap() + q.eval(&v).unwrap());
            }

            #[test]
            fn product_divides_back(p in arb_poly(), q in arb_poly()) {
                prop_assume!(!q.is_zero());
                let pq = &p * &q;
                prop_assert_eq!(pq.div_exact(&q), Some(p));
            }
        }
    }
}
