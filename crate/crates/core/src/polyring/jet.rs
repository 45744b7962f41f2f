//! Truncated multivariate power series.
//!
//! The transcendental operations use the Euler operator `E = sum z_j d/dz_j`,
//! which multiplies a homogeneous component of degree `d` by `d`. Applying it
//! to `f = F(u)` gives a recurrence over homogeneous components that costs
//! about one truncated product per operation.

use std::fmt;

use num_traits::{One, Zero};

use super::polynomial::{Polynomial, Roster};
use super::rational::{fmt_rational, Rational};
use super::PolyError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Jet {
    order: u32,
    body: Polynomial,
}

impl Jet {
    /// Truncates `body` to total degree `order`.
    pub fn new(body: &Polynomial, order: u32) -> Self {
        Jet {
            order,
            body: body.truncate(order),
        }
    }

    pub fn one(vars: &Roster, order: u32) -> Self {
        Jet {
            order,
            body: Polynomial::one(vars),
        }
    }

    pub fn zero(vars: &Roster, order: u32) -> Self {
        Jet {
            order,
            body: Polynomial::zero(vars),
        }
    }

    pub fn constant(vars: &Roster, order: u32, c: Rational) -> Self {
        Jet {
            order,
            body: Polynomial::constant(vars, c),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn body(&self) -> &Polynomial {
        &self.body
    }

    pub fn roster(&self) -> &Roster {
        self.body.roster()
    }

    pub fn constant_term(&self) -> Rational {
        self.body.constant_term()
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.body == Polynomial::one(self.roster())
    }

    fn check(&self, other: &Jet) -> Result<(), PolyError> {
        if self.order != other.order {
            return Err(PolyError::OrderMismatch(self.order, other.order));
        }
        if self.roster() != other.roster() {
            return Err(PolyError::RosterMismatch {
                left: self.roster().to_string(),
                right: other.roster().to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet, PolyError> {
        self.check(other)?;
        Ok(Jet {
            order: self.order,
            body: &self.body + &other.body,
        })
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet, PolyError> {
        self.check(other)?;
        Ok(Jet {
            order: self.order,
            body: &self.body - &other.body,
        })
    }

    pub fn mul(&self, other: &Jet) -> Result<Jet, PolyError> {
        self.check(other)?;
        Ok(Jet {
            order: self.order,
            body: self.body.mul_truncated(&other.body, self.order),
        })
    }

    pub fn scale(&self, c: &Rational) -> Jet {
        Jet {
            order: self.order,
            body: self.body.scale(c),
        }
    }

    /// Applies the log-linear field `sum alpha_j z_j d/dz_j`; exact on jets
    /// because the operator preserves degree.
    pub fn apply_log_linear(&self, alpha: &[Rational]) -> Jet {
        Jet {
            order: self.order,
            body: self.body.apply_log_linear(alpha),
        }
    }

    /// `z_k d/dz_k` applied to the jet.
    pub fn euler_component(&self, index: usize) -> Jet {
        let mut alpha = vec![Rational::zero(); self.body.nvars()];
        alpha[index] = Rational::one();
        self.apply_log_linear(&alpha)
    }

    /// Same series viewed at a lower order.
    pub fn truncate(&self, order: u32) -> Jet {
        Jet::new(&self.body, order.min(self.order))
    }

    fn components(&self) -> Vec<Polynomial> {
        (0..=self.order).map(|d| self.body.homogeneous_part(d)).collect()
    }

    fn assemble(&self, comps: Vec<Polynomial>) -> Jet {
        let mut body = Polynomial::zero(self.roster());
        for c in &comps {
            body = &body + c;
        }
        Jet {
            order: self.order,
            body,
        }
    }

    fn require_normalized(&self) -> Result<(), PolyError> {
        let c = self.constant_term();
        if c.is_one() {
            Ok(())
        } else {
            Err(PolyError::NotNormalizedUnit(fmt_rational(&c)))
        }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn invert(&self) -> Result<Jet, PolyError> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(PolyError::NotAUnit);
        }
        let inv0 = c0.recip();
        let u = self.components();
        let mut f: Vec<Polynomial> = vec![Polynomial::constant(self.roster(), inv0.clone())];
        for d in 1..=self.order as usize {
            let mut s = Polynomial::zero(self.roster());
            for k in 1..=d {
                if !u[k].is_zero() && !f[d - k].is_zero() {
                    s = &s + &(&u[k] * &f[d - k]);
                }
            }
            f.push(s.scale(&-inv0.clone()));
        }
        Ok(self.assemble(f))
    }

    /// `exp` of a jet with zero constant term.
    pub fn exp(&self) -> Result<Jet, PolyError> {
        if !self.constant_term().is_zero() {
            return Err(PolyError::NonzeroConstant);
        }
        let h = self.components();
        let mut f: Vec<Polynomial> = vec![Polynomial::one(self.roster())];
        for d in 1..=self.order as usize {
            // d f_d = sum_{k=1..d} k h_k f_{d-k}
            let mut s = Polynomial::zero(self.roster());
            for k in 1..=d {
                if !h[k].is_zero() && !f[d - k].is_zero() {
                    s = &s + &(&h[k] * &f[d - k]).scale(&Rational::from_integer(k.into()));
                }
            }
            f.push(s.scale(&Rational::new(1.into(), d.into())));
        }
        Ok(self.assemble(f))
    }

    /// `log` of a unit with constant term exactly one.
    pub fn log(&self) -> Result<Jet, PolyError> {
        self.require_normalized()?;
        let u = self.components();
        let mut l: Vec<Polynomial> = vec![Polynomial::zero(self.roster())];
        for d in 1..=self.order as usize {
            // d u_d = d L_d + sum_{k=1..d-1} k L_k u_{d-k}
            let mut s = Polynomial::zero(self.roster());
            for k in 1..d {
                if !l[k].is_zero() && !u[d - k].is_zero() {
                    s = &s + &(&l[k] * &u[d - k]).scale(&Rational::from_integer(k.into()));
                }
            }
            l.push(&u[d] - &s.scale(&Rational::new(1.into(), d.into())));
        }
        Ok(self.assemble(l))
    }

    /// `u^c` for a unit with constant term exactly one and any rational `c`.
    pub fn pow_rational(&self, c: &Rational) -> Result<Jet, PolyError> {
        self.require_normalized()?;
        let u = self.components();
        let mut f: Vec<Polynomial> = vec![Polynomial::one(self.roster())];
        for d in 1..=self.order as usize {
            // d f_d = sum_{k=1..d} (c k - (d - k)) u_k f_{d-k}
            let mut s = Polynomial::zero(self.roster());
            for k in 1..=d {
                if u[k].is_zero() || f[d - k].is_zero() {
                    continue;
                }
                let w = c * Rational::from_integer(k.into()) - Rational::from_integer((d - k).into());
                if !w.is_zero() {
                    s = &s + &(&u[k] * &f[d - k]).scale(&w);
                }
            }
            f.push(s.scale(&Rational::new(1.into(), d.into())));
        }
        Ok(self.assemble(f))
    }

    /// Integer power by repeated truncated products; negative powers invert.
    pub fn powi(&self, k: i64) -> Result<Jet, PolyError> {
        let base = if k < 0 { self.invert()? } else { self.clone() };
        let mut out = Jet::one(self.roster(), self.order);
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base)?;
        }
        Ok(out)
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({})", self.body, self.order + 1)
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet[{}]({:?})", self.order, self.body)
    }
}
