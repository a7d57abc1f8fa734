use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{CoeffCast, Polynomial, Var};
use crate::{Error, Result};

/// Quotient of polynomials. The denominator is kept as a product of
/// primitive factors with positive leading coefficient; a factor is
/// cancelled whenever it divides the numerator exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Vec<(Polynomial, u32)>,
}

impl RationalFunction {
    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Vec::new() }
    }

    /// `num / den`; fails when `den` is the zero polynomial.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let mut r = Self::from_poly(num);
        r.divide_by_poly(&den, 1);
        r.reduce();
        Ok(r)
    }

    /// `num / den^e`, keeping `den` as one factor of multiplicity `e`.
    pub fn with_power(num: Polynomial, den: Polynomial, e: u32) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let mut r = Self::from_poly(num);
        r.divide_by_poly(&den, e);
        r.reduce();
        Ok(r)
    }

    fn divide_by_poly(&mut self, d: &Polynomial, e: u32) {
        if let Some(c) = d.as_constant() {
            self.num = self.num.scale(&c.pow(-(e as i32)));
            return;
        }
        let c = d.content();
        self.num = self.num.scale(&c.pow(-(e as i32)));
        let f = d.scale(&c.recip());
        match self.den.iter_mut().find(|(g, _)| *g == f) {
            Some((_, k)) => *k += e,
            None => self.den.push((f, e)),
        }
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (f, k) in self.den.iter_mut() {
            while *k > 0 {
                match self.num.div_exact(f) {
                    Some(q) => {
                        self.num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, k)| *k > 0);
        self.den.sort_by(|a, b| a.0.leading().map(|t| t.0).cmp(&b.0.leading().map(|t| t.0)));
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(Polynomial, u32)] {
        &self.den
    }

    pub fn denominator(&self) -> Polynomial {
        self.den
            .iter()
            .fold(Polynomial::one(), |acc, (f, k)| &acc * &f.pow(*k))
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::Singular("reciprocal of zero".into()));
        }
        let mut r = RationalFunction::from_poly(self.denominator());
        r.divide_by_poly(&self.num, 1);
        r.reduce();
        Ok(r)
    }

    pub fn eval(&self, values: &HashMap<Var, BigRational>) -> Result<BigRational> {
        let d = self.denominator().eval(values)?;
        if d.is_zero() {
            return Err(Error::Singular("denominator vanishes at the evaluation point".into()));
        }
        Ok(self.num.eval(values)? / d)
    }

    pub fn eval_f64<F: FnMut(Var) -> Option<f64> + Clone>(&self, value: F) -> Result<f64> {
        Ok(self.num.eval_f64(value.clone())? / self.denominator().eval_f64(value)?)
    }

    pub fn to_text(&self, labels: &[String]) -> String {
        if self.den.is_empty() {
            return self.num.to_text(labels);
        }
        let den: Vec<String> = self
            .den
            .iter()
            .map(|(f, k)| {
                let t = if f.num_terms() > 1 { format!("({})", f.to_text(labels)) } else { f.to_text(labels) };
                if *k == 1 {
                    t
                } else {
                    format!("{t}^{k}")
                }
            })
            .collect();
        format!("({})/({})", self.num.to_text(labels), den.join("*"))
    }

    fn combine(&self, o: &Self, sub: bool) -> Self {
        // common denominator with the maximal multiplicity of each factor
        let mut den = self.den.clone();
        for (f, k) in &o.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some((_, j)) => *j = (*j).max(*k),
                None => den.push((f.clone(), *k)),
            }
        }
        let lift = |r: &Self| {
            let mut p = r.num.clone();
            for (f, k) in &den {
                let have = r.den.iter().find(|(g, _)| g == f).map_or(0, |(_, j)| *j);
                for _ in have..*k {
                    p = &p * f;
                }
            }
            p
        };
        let (a, b) = (lift(self), lift(o));
        let mut r = RationalFunction {
            num: if sub { &a - &b } else { &a + &b },
            den,
        };
        r.reduce();
        r
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            write!(f, "{}", self.num)
        } else {
            let d: Vec<String> = self.den.iter().map(|(g, k)| format!("({g})^{k}")).collect();
            write!(f, "({})/({})", self.num, d.join("*"))
        }
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        self.combine(o, false)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self.combine(o, true)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        let mut r = RationalFunction::from_poly(&self.num * &o.num);
        if r.num.is_zero() {
            return r;
        }
        r.den = self.den.clone();
        for (f, k) in &o.den {
            match r.den.iter_mut().find(|(g, _)| g == f) {
                Some((_, j)) => *j += k,
                None => r.den.push((f.clone(), *k)),
            }
        }
        r.reduce();
        r
    }
}

impl Add for RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl Sub for RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl Mul for RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> Self {
        -&self
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl From<CoeffCast> for RationalFunction {
    fn from(c: CoeffCast) -> Self {
        Self::from_poly(Polynomial::constant(c.0))
    }
}
