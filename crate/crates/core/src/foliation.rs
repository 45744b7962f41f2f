//! Darboux first integrals, their defining one-form and the wedge system.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::polyring::rational::{fmt_rational, lcm_of_denominators, Rational};
use crate::polyring::{PolyError, Polynomial, Roster};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoliationError {
    #[error("a Darboux integral needs at least one factor")]
    NoFactors,
    #[error("exponent of factor {index} must be positive, got {value}")]
    NonPositiveExponent { index: usize, value: String },
    #[error("roster needs the distinguished pair (x, y) first; got {0}")]
    MissingDistinguished(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `H = prod P_i^{a_i}` over the roster `(x, y, eps_1, .., eps_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DarbouxIntegral {
    roster: Roster,
    factors: Vec<(Polynomial, Rational)>,
}

impl DarbouxIntegral {
    pub fn new(roster: &Roster, factors: Vec<(Polynomial, Rational)>) -> Result<Self, FoliationError> {
        if roster.len() < 2 {
            return Err(FoliationError::MissingDistinguished(roster.to_string()));
        }
        if factors.is_empty() {
            return Err(FoliationError::NoFactors);
        }
        for (index, (p, a)) in factors.iter().enumerate() {
            if !a.is_positive() {
                return Err(FoliationError::NonPositiveExponent {
                    index,
                    value: fmt_rational(a),
                });
            }
            if p.roster() != roster {
                return Err(PolyError::RosterMismatch {
                    left: roster.to_string(),
                    right: p.roster().to_string(),
                }
                .into());
            }
        }
        Ok(DarbouxIntegral {
            roster: roster.clone(),
            factors,
        })
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn factors(&self) -> &[(Polynomial, Rational)] {
        &self.factors
    }

    /// Number of parameters `n`; the ambient dimension is `n + 2`.
    pub fn num_parameters(&self) -> usize {
        self.roster.len() - 2
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.roster.names()[2..]
    }

    pub fn exponents(&self) -> Vec<Rational> {
        self.factors.iter().map(|(_, a)| a.clone()).collect()
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.factors.iter().all(|(_, a)| a.is_integer())
    }

    /// Expands `H` itself; only defined for integer exponents.
    pub fn expand(&self) -> Option<Polynomial> {
        if !self.has_integer_exponents() {
            return None;
        }
        let mut h = Polynomial::one(&self.roster);
        for (p, a) in &self.factors {
            let k: u32 = a.to_integer().try_into().ok()?;
            h = &h * &p.pow(k);
        }
        Some(h)
    }
}

/// `sum_v c_v dv` with one polynomial coefficient per roster variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneForm {
    roster: Roster,
    coefficients: Vec<Polynomial>,
}

impl OneForm {
    pub fn new(roster: &Roster, coefficients: Vec<Polynomial>) -> Result<Self, PolyError> {
        if coefficients.len() != roster.len() || coefficients.iter().any(|c| c.roster() != roster) {
            return Err(PolyError::RosterMismatch {
                left: roster.to_string(),
                right: format!("{} coefficients", coefficients.len()),
            });
        }
        Ok(OneForm {
            roster: roster.clone(),
            coefficients,
        })
    }

    /// The exact form `d(var)`.
    pub fn basis(roster: &Roster, var: &str) -> Result<Self, PolyError> {
        let i = roster.require(var)?;
        let coefficients = (0..roster.len())
            .map(|j| {
                if i == j {
                    Polynomial::one(roster)
                } else {
                    Polynomial::zero(roster)
                }
            })
            .collect();
        Ok(OneForm {
            roster: roster.clone(),
            coefficients,
        })
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn coefficients(&self) -> &[Polynomial] {
        &self.coefficients
    }

    pub fn coefficient(&self, var: &str) -> Result<&Polynomial, PolyError> {
        Ok(&self.coefficients[self.roster.require(var)?])
    }

    pub fn scale(&self, c: &Rational) -> OneForm {
        OneForm {
            roster: self.roster.clone(),
            coefficients: self.coefficients.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Scales to integer coefficients with gcd one and a positive leading
    /// coefficient in the first nonzero component.
    pub fn primitive(&self) -> OneForm {
        let all: Vec<Rational> = self
            .coefficients
            .iter()
            .flat_map(|p| p.terms().map(|(_, c)| c.clone()).collect::<Vec<_>>())
            .collect();
        let lead = self
            .coefficients
            .iter()
            .find_map(|p| p.terms().next_back().map(|(_, c)| c.clone()));
        let Some(lead) = lead else {
            return self.clone();
        };
        let l = lcm_of_denominators(&all);
        let g = all
            .iter()
            .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
            .fold(BigInt::zero(), |acc, x| num_integer::Integer::gcd(&acc, &x));
        let mut factor = Rational::new(l, g);
        if lead.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// `Some(c)` when `self = c * other`.
    pub fn proportionality_to(&self, other: &OneForm) -> Option<Rational> {
        if self.roster != other.roster {
            return None;
        }
        let pivot = other.coefficients.iter().position(|p| !p.is_zero())?;
        let c = self.coefficients[pivot].proportionality_to(&other.coefficients[pivot])?;
        (other.scale(&c) == *self).then_some(c)
    }
}

/// Coefficients of `Omega = Q1 dx^deps_1^..^deps_n + Q2 dy^deps_1^..^deps_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedgeSystem {
    pub q1: Polynomial,
    pub q2: Polynomial,
}

/// `omega = dH / phi` in logarithmic-derivative form: the `dv` coefficient is
/// `sum_i a_i dP_i/dv prod_{j != i} P_j`, scaled by the lcm of the exponent
/// denominators. `H` is never formed and nothing is divided.
pub fn darboux_one_form(h: &DarbouxIntegral) -> OneForm {
    let roster = h.roster();
    let k = h.factors.len();
    let scale = Rational::from_integer(lcm_of_denominators(h.factors.iter().map(|(_, a)| a)));
    // others[i] = prod_{j != i} P_j via prefix and suffix products
    let mut prefix = vec![Polynomial::one(roster)];
    for (p, _) in &h.factors {
        let next = prefix.last().unwrap() * p;
        prefix.push(next);
    }
    let mut suffix = vec![Polynomial::one(roster); k + 1];
    for i in (0..k).rev() {
        suffix[i] = &suffix[i + 1] * &h.factors[i].0;
    }
    let others: Vec<Polynomial> = (0..k).map(|i| &prefix[i] * &suffix[i + 1]).collect();

    let coefficients = (0..roster.len())
        .map(|v| {
            let mut c = Polynomial::zero(roster);
            for (i, (p, a)) in h.factors.iter().enumerate() {
                let dp = p.derivative_at(v);
                if dp.is_zero() {
                    continue;
                }
                c = &c + &(&dp * &others[i]).scale(&(a * &scale));
            }
            c
        })
        .collect();
    OneForm {
        roster: roster.clone(),
        coefficients,
    }
}

/// Wedges `omega` with every `d eps_i`; only the `dx` and `dy` parts survive.
pub fn wedge_system(omega: &OneForm, roster: &Roster) -> Result<WedgeSystem, FoliationError> {
    if roster.len() < 2 {
        return Err(FoliationError::MissingDistinguished(roster.to_string()));
    }
    if omega.roster() != roster {
        return Err(PolyError::RosterMismatch {
            left: roster.to_string(),
            right: omega.roster().to_string(),
        }
        .into());
    }
    Ok(WedgeSystem {
        q1: omega.coefficients[0].clone(),
        q2: omega.coefficients[1].clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntegratingFactorCheck {
    /// `phi * omega_v = c * dH/dv` for every roster variable.
    Holds {
        constant: Rational,
    },
    Fails {
        variable: String,
    },
    /// `H` is not a polynomial for non-integer exponents.
    Skipped {
        reason: String,
    },
}

impl IntegratingFactorCheck {
    pub fn holds(&self) -> bool {
        matches!(self, IntegratingFactorCheck::Holds { .. })
    }
}

/// Checks `omega` against `dH` with `phi = prod P_i^{a_i - 1}`, forming `H`
/// explicitly.
pub fn verify_integrating_factor(h: &DarbouxIntegral, omega: &OneForm) -> IntegratingFactorCheck {
    let Some(big_h) = h.expand() else {
        return IntegratingFactorCheck::Skipped {
            reason: "non-integer exponent".into(),
        };
    };
    if omega.roster() != h.roster() {
        return IntegratingFactorCheck::Fails {
            variable: "<roster>".into(),
        };
    }
    let mut phi = Polynomial::one(h.roster());
    for (p, a) in h.factors() {
        let k: u32 = (a.to_integer() - 1u32).try_into().unwrap_or(0);
        phi = &phi * &p.pow(k);
    }
    let mut constant: Option<Rational> = None;
    for (v, name) in h.roster().names().iter().enumerate() {
        let lhs = &phi * &omega.coefficients[v];
        let rhs = big_h.derivative_at(v);
        if rhs.is_zero() {
            if !lhs.is_zero() {
                return IntegratingFactorCheck::Fails { variable: name.clone() };
            }
            continue;
        }
        match (lhs.proportionality_to(&rhs), &constant) {
            (Some(c), None) if !c.is_zero() => constant = Some(c),
            (Some(c), Some(prev)) if &c == prev => {}
            _ => return IntegratingFactorCheck::Fails { variable: name.clone() },
        }
    }
    IntegratingFactorCheck::Holds {
        constant: constant.unwrap_or_else(Rational::one),
    }
}
