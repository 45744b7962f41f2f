use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::rational::{fmt_rational, Rational};
use super::PolyError;

/// Ordered list of variable names shared by every polynomial of one chart.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Roster(Arc<[String]>);

impl Roster {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, PolyError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(PolyError::DuplicateVariable(n.clone()));
            }
        }
        Ok(Roster(names.into()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, PolyError> {
        self.index_of(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }
}

impl fmt::Debug for Roster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.join(", "))
    }
}

impl fmt::Display for Roster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Exponent vector of a monomial. Ordered graded-lexicographically with the
/// first roster variable the most significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`; caller guarantees divisibility.
    fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored. Arithmetic operators panic when the
/// operands live on different rosters; the `checked_*` methods report it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    vars: Roster,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(vars: &Roster) -> Self {
        Polynomial {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Roster, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Monomial::one(vars.len()), c);
        p
    }

    pub fn one(vars: &Roster) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn var(vars: &Roster, name: &str) -> Result<Self, PolyError> {
        let i = vars.require(name)?;
        Ok(Self::var_at(vars, i))
    }

    pub fn var_at(vars: &Roster, index: usize) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Monomial::var(vars.len(), index), Rational::one());
        p
    }

    pub fn monomial(vars: &Roster, exps: Vec<u32>, c: Rational) -> Self {
        assert_eq!(exps.len(), vars.len(), "monomial length must match roster");
        let mut p = Self::zero(vars);
        p.add_term(Monomial(exps), c);
        p
    }

    pub fn from_terms(vars: &Roster, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "monomial length must match roster");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn roster(&self) -> &Roster {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one(self.nvars()))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Lowest total degree among the terms; `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn degree_in(&self, index: usize) -> u32 {
        self.terms.keys().map(|m| m.0[index]).max().unwrap_or(0)
    }

    /// Indices of variables that occur in some term.
    pub fn occurring_vars(&self) -> Vec<usize> {
        (0..self.nvars())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    fn check_roster(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(PolyError::RosterMismatch {
                left: self.vars.to_string(),
                right: other.vars.to_string(),
            })
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_roster(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_roster(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_roster(other)?;
        Ok(self.mul_bounded(other, None))
    }

    /// Product with every term of total degree above `max_degree` dropped.
    pub fn mul_truncated(&self, other: &Polynomial, max_degree: u32) -> Polynomial {
        self.check_roster(other).expect("roster mismatch");
        self.mul_bounded(other, Some(max_degree))
    }

    fn mul_bounded(&self, other: &Polynomial, max_degree: Option<u32>) -> Polynomial {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in &other.terms {
                if let Some(n) = max_degree {
                    // terms are sorted by degree, so the rest are too large
                    if da + mb.degree() > n {
                        break;
                    }
                }
                *acc.entry(ma.mul(mb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn truncate(&self, max_degree: u32) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= max_degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, degree: u32) -> Polynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn partial_derivative(&self, var: &str) -> Result<Polynomial, PolyError> {
        let i = self.vars.require(var)?;
        Ok(self.derivative_at(i))
    }

    pub fn derivative_at(&self, index: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[index] -= 1;
            out.add_term(Monomial(exps), c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Applies `sum_j alpha_j z_j d/dz_j`. Each term is an eigenvector with
    /// eigenvalue `<alpha, exponent>`, so degrees are preserved.
    pub fn apply_log_linear(&self, alpha: &[Rational]) -> Polynomial {
        assert_eq!(alpha.len(), self.nvars());
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let w: Rational =
                m.0.iter()
                    .zip(alpha)
                    .map(|(&e, a)| a * Rational::from_integer(e.into()))
                    .sum();
            out.add_term(m.clone(), c * w);
        }
        out
    }

    /// Substitutes each variable by a polynomial. Every image must live on a
    /// common target roster; variables without a binding map to the
    /// same-named variable of the target roster.
    pub fn substitute(&self, bindings: &BTreeMap<String, Polynomial>) -> Result<Polynomial, PolyError> {
        for name in bindings.keys() {
            self.vars.require(name)?;
        }
        let target = match bindings.values().next() {
            Some(p) => p.vars.clone(),
            None => return Ok(self.clone()),
        };
        if let Some(bad) = bindings.values().find(|p| p.vars != target) {
            return Err(PolyError::RosterMismatch {
                left: target.to_string(),
                right: bad.vars.to_string(),
            });
        }
        let images = self
            .vars
            .names()
            .iter()
            .map(|name| match bindings.get(name) {
                Some(p) => Ok(p.clone()),
                None => Polynomial::var(&target, name),
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.substitute_positional(&images, &target)
    }

    /// Substitution with `images[i]` replacing variable `i`.
    pub fn substitute_positional(&self, images: &[Polynomial], target: &Roster) -> Result<Polynomial, PolyError> {
        if images.len() != self.nvars() {
            return Err(PolyError::RosterMismatch {
                left: self.vars.to_string(),
                right: format!("{} images", images.len()),
            });
        }
        if let Some(bad) = images.iter().find(|p| &p.vars != target) {
            return Err(PolyError::RosterMismatch {
                left: target.to_string(),
                right: bad.vars.to_string(),
            });
        }
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(target), p.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[i];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &images[i];
                    cache.push(next);
                }
                term = &term * &cache[e as usize];
            }
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Splits `p = z^beta * q` with `beta` the componentwise minimum of the
    /// support exponents.
    pub fn monomial_content(&self) -> Result<(Vec<u32>, Polynomial), PolyError> {
        let mut terms = self.terms.keys();
        let first = terms.next().ok_or(PolyError::ZeroPolynomial)?;
        let mut beta = first.0.clone();
        for m in terms {
            for (b, &e) in beta.iter_mut().zip(&m.0) {
                *b = (*b).min(e);
            }
        }
        let bm = Monomial(beta.clone());
        let q = Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (bm.quotient_of(m), c.clone())).collect(),
        };
        Ok((beta, q))
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars());
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter().zip(point).fold(c.clone(), |acc, (&e, x)| {
                    if e == 0 {
                        acc
                    } else {
                        acc * num_traits::pow(x.clone(), e as usize)
                    }
                })
            })
            .sum()
    }

    /// `p(z + point)`, moving `point` to the origin.
    pub fn translate(&self, point: &[Rational]) -> Polynomial {
        assert_eq!(point.len(), self.nvars());
        let images: Vec<Polynomial> = point
            .iter()
            .enumerate()
            .map(|(i, a)| &Polynomial::var_at(&self.vars, i) + &Polynomial::constant(&self.vars, a.clone()))
            .collect();
        self.substitute_positional(&images, &self.vars).expect("same roster")
    }

    /// True when `self = c * other` for a single rational `c` (possibly zero).
    pub fn proportionality_to(&self, other: &Polynomial) -> Option<Rational> {
        if self.vars != other.vars {
            return None;
        }
        if other.is_zero() {
            return if self.is_zero() { Some(Rational::zero()) } else { None };
        }
        let (m, c) = other.terms.iter().next().unwrap();
        let ratio = self.coefficient(m) / c;
        if &other.scale(&ratio) == self {
            Some(ratio)
        } else {
            None
        }
    }

    /// Re-expresses the polynomial over a larger roster containing every
    /// current variable.
    pub fn embed(&self, target: &Roster) -> Result<Polynomial, PolyError> {
        let map = self
            .vars
            .names()
            .iter()
            .map(|n| target.require(n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] = x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} over {}", self, self.vars)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(fmt_rational(&abs));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars.names()[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars.names()[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("roster mismatch")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("roster mismatch")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("roster mismatch")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::rational::{int, rat};

    fn roster(names: &[&str]) -> Roster {
        Roster::new(names).unwrap()
    }

    #[test]
    fn grlex_order_and_printing() {
        let r = roster(&["x", "y"]);
        let x = Polynomial::var(&r, "x").unwrap();
        let y = Polynomial::var(&r, "y").unwrap();
        let p = &(&x.pow(2) + &(&y * &x).scale(&rat(-3, 2))) + &Polynomial::constant(&r, int(1));
        assert_eq!(p.to_string(), "x^2 - 3/2*x*y + 1");
        assert_eq!((&y - &x).to_string(), "-x + y");
        assert_eq!(Polynomial::zero(&r).to_string(), "0");
    }

    #[test]
    fn zero_power_is_one() {
        let r = roster(&["x"]);
        let p = &Polynomial::var(&r, "x").unwrap() + &Polynomial::one(&r);
        assert_eq!(p.pow(0), Polynomial::one(&r));
    }

    #[test]
    fn roster_mismatch_reported() {
        let a = Polynomial::var(&roster(&["x", "y"]), "x").unwrap();
        let b = Polynomial::var(&roster(&["y", "x"]), "x").unwrap();
        assert!(matches!(a.checked_add(&b), Err(PolyError::RosterMismatch { .. })));
        assert!(matches!(a.checked_mul(&b), Err(PolyError::RosterMismatch { .. })));
    }

    #[test]
    fn duplicate_roster_rejected() {
        assert!(matches!(Roster::new(&["x", "x"]), Err(PolyError::DuplicateVariable(_))));
    }

    #[test]
    fn content_of_zero_is_an_error() {
        let r = roster(&["x"]);
        assert!(matches!(
            Polynomial::zero(&r).monomial_content(),
            Err(PolyError::ZeroPolynomial)
        ));
    }

    #[test]
    fn translate_moves_point_to_origin() {
        let r = roster(&["x", "y"]);
        let x = Polynomial::var(&r, "x").unwrap();
        let y = Polynomial::var(&r, "y").unwrap();
        let p = &x * &y;
        let t = p.translate(&[int(1), int(2)]);
        assert_eq!(t.constant_term(), int(2));
        assert_eq!(t.evaluate(&[int(0), int(0)]), p.evaluate(&[int(1), int(2)]));
    }

    #[test]
    fn embed_into_larger_roster() {
        let small = roster(&["y"]);
        let big = roster(&["x", "y", "z"]);
        let p = Polynomial::var(&small, "y").unwrap().pow(2);
        let e = p.embed(&big).unwrap();
        assert_eq!(e, Polynomial::var(&big, "y").unwrap().pow(2));
        assert!(e.embed(&small).is_err());
    }
}
