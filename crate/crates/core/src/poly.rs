//! Sparse multivariate polynomials over a [`Scalar`] coefficient type.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::{standard_vars, x_index};

/// A polynomial in `n` variables; `terms` maps exponent vectors to non-zero
/// coefficients.
#[derive(Clone, PartialEq)]
pub struct MPoly<S> {
    n: usize,
    terms: BTreeMap<Vec<u32>, S>,
}

impl<S: Scalar> MPoly<S> {
    pub fn zero(n: usize) -> Self {
        MPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, S::one())
    }

    pub fn constant(n: usize, c: S) -> Self {
        Self::monomial(n, vec![0; n], c)
    }

    /// `x_{i+1}`.
    pub fn var(n: usize, i: usize) -> Self {
        assert!(i < n, "variable {i} out of range");
        let mut e = vec![0; n];
        e[i] = 1;
        Self::monomial(n, e, S::one())
    }

    pub fn monomial(n: usize, exps: Vec<u32>, c: S) -> Self {
        assert_eq!(exps.len(), n);
        let mut p = Self::zero(n);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, S)>) -> Self {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            assert_eq!(e.len(), n);
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &S)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exps: &[u32]) -> S {
        self.terms.get(exps).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn constant_term(&self) -> S {
        self.coefficient(&vec![0; self.n])
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    /// Indices of the variables that occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.depends_on(i)).collect()
    }

    /// Same polynomial in `m >= n` variables.
    pub fn extend(&self, m: usize) -> Self {
        assert!(m >= self.n);
        MPoly {
            n: m,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e.resize(m, 0);
                    (e, c.clone())
                })
                .collect(),
        }
    }

    fn check_arity(&self, other: &Self) {
        assert_eq!(
            self.n, other.n,
            "polynomials have different variable counts"
        );
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        MPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.n);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Result<Self> {
        if i >= self.n {
            return Err(Error::VariableOutOfRange {
                index: i,
                n: self.n,
            });
        }
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut d = e.clone();
                d[i] -= 1;
                out.add_term(d, c.clone() * S::from_u32(e[i]).expect("exponent fits"));
            }
        }
        Ok(out)
    }

    /// Mixed partial derivative along the listed variable indices.
    pub fn derivative_multi(&self, vars: &[usize]) -> Result<Self> {
        vars.iter().try_fold(self.clone(), |p, &i| p.derivative(i))
    }

    pub fn eval(&self, point: &[S]) -> S {
        assert_eq!(point.len(), self.n);
        let mut total = S::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t = t * x.clone();
                }
            }
            total = total + t;
        }
        total
    }

    /// Substitutes constants for the variables given as `Some`, keeping arity.
    pub fn partial_eval(&self, values: &[Option<S>]) -> Self {
        assert_eq!(values.len(), self.n);
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            let mut rest = e.clone();
            for (i, v) in values.iter().enumerate() {
                if let Some(x) = v {
                    for _ in 0..e[i] {
                        t = t * x.clone();
                    }
                    rest[i] = 0;
                }
            }
            out.add_term(rest, t);
        }
        out
    }

    /// `x_i := value`.
    pub fn restrict(&self, i: usize, value: &S) -> Self {
        let mut values = vec![None; self.n];
        values[i] = Some(value.clone());
        self.partial_eval(&values)
    }

    /// Substitutes `subs[i]` for `x_{i+1}`; all substitutes share one arity.
    pub fn compose(&self, subs: &[MPoly<S>]) -> Result<Self> {
        if subs.len() != self.n {
            return Err(Error::ArityMismatch {
                expected: self.n,
                found: subs.len(),
            });
        }
        let m = subs.first().map_or(0, |s| s.n);
        if let Some(bad) = subs.iter().find(|s| s.n != m) {
            return Err(Error::ArityMismatch {
                expected: m,
                found: bad.n,
            });
        }
        let mut powers: Vec<Vec<MPoly<S>>> = subs.iter().map(|s| vec![MPoly::one(s.n)]).collect();
        let mut out = Self::zero(m);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = &powers[i][powers[i].len() - 1] * &subs[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    t = &t * &powers[i][k as usize];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Keeps only variables `keep` (in that order); the rest must not occur.
    pub fn project(&self, keep: &[usize]) -> Result<Self> {
        let mut out = Self::zero(keep.len());
        for (e, c) in &self.terms {
            if e.iter()
                .enumerate()
                .any(|(i, &k)| k > 0 && !keep.contains(&i))
            {
                return Err(Error::Internal(
                    "projection drops an occurring variable".into(),
                ));
            }
            out.add_term(keep.iter().map(|&i| e[i]).collect(), c.clone());
        }
        Ok(out)
    }

    /// Re-embeds into `m` variables, variable `i` going to `targets[i]`.
    pub fn embed(&self, m: usize, targets: &[usize]) -> Self {
        assert_eq!(targets.len(), self.n);
        let mut out = Self::zero(m);
        for (e, c) in &self.terms {
            let mut f = vec![0; m];
            for (i, &k) in e.iter().enumerate() {
                f[targets[i]] += k;
            }
            out.add_term(f, c.clone());
        }
        out
    }

    pub fn parse(text: &str, n: usize) -> Result<Self> {
        Self::parse_with(text, n, |name| x_index(name).map(|k| k - 1))
    }

    /// Parses `"+"`-separated terms such as `3/2*x1^2*x3 + -1*x2`.
    pub fn parse_with(
        text: &str,
        n: usize,
        resolve: impl Fn(&str) -> Option<usize>,
    ) -> Result<Self> {
        let mut out = Self::zero(n);
        for (pos, negated, term) in split_terms(text)? {
            let mut coef = if negated { -S::one() } else { S::one() };
            let mut exps = vec![0u32; n];
            let mut body = term.trim();
            while let Some(rest) = body.strip_prefix('-') {
                coef = -coef;
                body = rest.trim_start();
            }
            if body.is_empty() {
                return Err(Error::Syntax {
                    pos,
                    msg: "empty term".into(),
                });
            }
            for factor in body.split('*').map(str::trim) {
                let bad = |msg: String| Error::Syntax { pos, msg };
                if factor.is_empty() {
                    return Err(bad("empty factor".into()));
                }
                if factor.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
                    let v = S::parse_literal(factor)
                        .ok_or_else(|| bad(format!("invalid coefficient '{factor}'")))?;
                    coef = coef * v;
                    continue;
                }
                let (name, e) = match factor.split_once('^') {
                    Some((name, e)) => (
                        name.trim(),
                        e.trim()
                            .parse::<u32>()
                            .map_err(|_| bad(format!("invalid exponent in '{factor}'")))?,
                    ),
                    None => (factor, 1),
                };
                let i = resolve(name).ok_or_else(|| bad(format!("unknown variable '{name}'")))?;
                if i >= n {
                    return Err(Error::VariableOutOfRange { index: i + 1, n });
                }
                exps[i] += e;
            }
            out.add_term(exps, coef);
        }
        Ok(out)
    }

    /// Terms in graded lexicographic order, highest first.
    pub fn sorted_terms(&self) -> Vec<(&Vec<u32>, &S)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by_key(|(e, _)| (Reverse(e.iter().sum::<u32>()), Reverse((*e).clone())));
        v
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.sorted_terms()
            .into_iter()
            .map(|(e, c)| {
                let factors: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| {
                        if k == 1 {
                            names[i].clone()
                        } else {
                            format!("{}^{k}", names[i])
                        }
                    })
                    .collect();
                match (factors.is_empty(), c.is_one()) {
                    (true, _) => c.to_string(),
                    (false, true) => factors.join("*"),
                    (false, false) => format!("{c}*{}", factors.join("*")),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Splits at `+` and at binary `-`; yields (offset, negated, text).
fn split_terms(text: &str) -> Result<Vec<(usize, bool, &str)>> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut negated = false;
    let mut prev: Option<char> = None;
    for (i, c) in text.char_indices() {
        let binary_minus = c == '-' && prev.is_some_and(|p| p.is_ascii_alphanumeric() || p == ')');
        if c == '+' || binary_minus {
            out.push((start, negated, &text[start..i]));
            start = i + 1;
            negated = binary_minus;
            prev = None;
        } else if !c.is_whitespace() {
            prev = Some(c);
        }
    }
    out.push((start, negated, &text[start..]));
    if out.iter().all(|(_, _, t)| t.trim().is_empty()) {
        return Err(Error::Syntax {
            pos: 0,
            msg: "empty polynomial".into(),
        });
    }
    Ok(out)
}

impl<S: Scalar> fmt::Display for MPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&standard_vars(self.n)))
    }
}

impl<S: Scalar> fmt::Debug for MPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({}; {})", self.n, self)
    }
}

impl<S: Scalar> Add for &MPoly<S> {
    type Output = MPoly<S>;
    fn add(self, rhs: &MPoly<S>) -> MPoly<S> {
        self.check_arity(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for &MPoly<S> {
    type Output = MPoly<S>;
    fn sub(self, rhs: &MPoly<S>) -> MPoly<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Neg for &MPoly<S> {
    type Output = MPoly<S>;
    fn neg(self) -> MPoly<S> {
        MPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl<S: Scalar> Mul for &MPoly<S> {
    type Output = MPoly<S>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &MPoly<S>) -> MPoly<S> {
        self.check_arity(rhs);
        let mut out = MPoly::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }
}

pub fn poly_add<S: Scalar>(a: &MPoly<S>, b: &MPoly<S>) -> MPoly<S> {
    a + b
}

pub fn poly_mul<S: Scalar>(a: &MPoly<S>, b: &MPoly<S>) -> MPoly<S> {
    a * b
}

pub fn poly_derivative<S: Scalar>(f: &MPoly<S>, i: usize) -> Result<MPoly<S>> {
    f.derivative(i)
}

pub fn poly_compose<S: Scalar>(f: &MPoly<S>, subs: &[MPoly<S>]) -> Result<MPoly<S>> {
    f.compose(subs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type P = MPoly<BigRational>;

    fn p(s: &str, n: usize) -> P {
        P::parse(s, n).unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::from_ratio(a, b)
    }

    #[test]
    fn parse_and_print() {
        let f = p("3/2*x1^2*x3 + -1*x2", 3);
        assert_eq!(f.to_string(), "3/2*x1^2*x3 + -1*x2");
        assert_eq!(p("x2 - x1 + 2", 2).to_string(), "-1*x1 + x2 + 2");
        assert_eq!(p("x1*x1 - x1^2", 1).to_string(), "0");
        assert_eq!(p("-x1", 1), -&p("x1", 1));
        assert!(P::parse("x1 + ", 1).is_err());
        assert!(P::parse("x3", 2).is_err());
        assert!(P::parse("x1^a", 2).is_err());
        assert!(P::parse("y", 2).is_err());
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("x1*x2*x3", 3).derivative(0).unwrap(), p("x2*x3", 3));
        let f = p("x1*x2*x3 + x1 + x2 + x3", 3);
        assert_eq!(f.derivative_multi(&[0, 2]).unwrap(), p("x2", 3));
        assert_eq!(p("x1^3", 1).derivative(0).unwrap(), p("3*x1^2", 1));
        assert!(f.derivative(3).is_err());
    }

    #[test]
    fn composition() {
        let g = p("x1*x2", 2);
        let f = g.compose(&[p("x1 + x2", 3), p("x3", 3)]).unwrap();
        assert_eq!(f, p("x1*x3 + x2*x3", 3));
        assert!(g.compose(&[p("x1", 1)]).is_err());
    }

    #[test]
    fn evaluation() {
        let f = p("1/2*x1^2 + x2", 2);
        assert_eq!(f.eval(&[q(1, 1), q(2, 3)]), q(7, 6));
        assert_eq!(f.restrict(0, &q(2, 1)), p("2 + x2", 2));
    }

    #[test]
    fn projection_and_embedding() {
        let f = p("x1*x3^2", 3);
        let g = f.project(&[0, 2]).unwrap();
        assert_eq!(g, p("x1*x2^2", 2));
        assert_eq!(g.embed(3, &[0, 2]), f);
        assert!(f.project(&[0]).is_err());
    }

    #[test]
    fn float_coefficients() {
        let f = MPoly::<f64>::parse("0.5*x1 + 2", 1).unwrap();
        assert_eq!(f.eval(&[4.0]), 4.0);
    }
}
