//! Chart-wise blow-ups along coordinate subspaces.
//!
//! Chart variables keep their names across blow-ups: in the chart
//! distinguished by `z_j` the substitution is `z_i -> z_j * z_i` for the
//! other center variables, and `map_from_root` records what each name means
//! in terms of the root coordinates.

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::polyring::{Jet, PolyError, Polynomial, Rational, Roster};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowupError {
    #[error("center must contain at least two variables, got {0}")]
    CenterTooSmall(usize),
    #[error("variable `{0}` appears twice in the center")]
    DuplicateCenterVariable(String),
    #[error("zero polynomial has no normal-crossings decomposition")]
    ZeroPolynomial,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Coordinate subspace `{z_i = 0 for i in vars}` of a chart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Center {
    vars: Vec<String>,
}

impl Center {
    /// Validates against `roster` and sorts into roster order.
    pub fn new<S: AsRef<str>>(roster: &Roster, names: &[S]) -> Result<Self, BlowupError> {
        let mut idx = Vec::with_capacity(names.len());
        for n in names {
            let i = roster.require(n.as_ref())?;
            if idx.contains(&i) {
                return Err(BlowupError::DuplicateCenterVariable(n.as_ref().to_string()));
            }
            idx.push(i);
        }
        if idx.len() < 2 {
            return Err(BlowupError::CenterTooSmall(idx.len()));
        }
        idx.sort_unstable();
        Ok(Center {
            vars: idx.into_iter().map(|i| roster.names()[i].clone()).collect(),
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }
}

impl fmt::Display for Center {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.vars.join(", "))
    }
}

/// One blow-up step as seen from the child chart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlowStep {
    pub center: Center,
    pub distinguished: String,
}

impl BlowStep {
    /// Images of the chart variables under this step's substitution.
    pub fn substitution(&self, roster: &Roster) -> Result<Vec<Polynomial>, PolyError> {
        let j = Polynomial::var(roster, &self.distinguished)?;
        roster
            .names()
            .iter()
            .map(|name| {
                let v = Polynomial::var(roster, name)?;
                if name != &self.distinguished && self.center.vars.contains(name) {
                    Ok(&j * &v)
                } else {
                    Ok(v)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    id: String,
    root: Roster,
    roster: Roster,
    map_from_root: Vec<Polynomial>,
    divisor_vars: Vec<String>,
    history: Vec<BlowStep>,
}

impl Chart {
    /// Identity chart on `roster` with an initial set of divisor coordinates.
    pub fn root(roster: &Roster, divisor_vars: &[String]) -> Result<Self, PolyError> {
        Self::with_id("root", roster, divisor_vars)
    }

    pub fn with_id(id: &str, roster: &Roster, divisor_vars: &[String]) -> Result<Self, PolyError> {
        for v in divisor_vars {
            roster.require(v)?;
        }
        let map_from_root = (0..roster.len()).map(|i| Polynomial::var_at(roster, i)).collect();
        let mut chart = Chart {
            id: id.to_string(),
            root: roster.clone(),
            roster: roster.clone(),
            map_from_root,
            divisor_vars: Vec::new(),
            history: Vec::new(),
        };
        for v in divisor_vars {
            chart.add_divisor(v);
        }
        Ok(chart)
    }

    /// Rebuilds a chart from stored data (used when re-verifying reports).
    pub fn from_parts(
        id: &str,
        root: &Roster,
        roster: &Roster,
        map_from_root: Vec<Polynomial>,
        divisor_vars: Vec<String>,
    ) -> Result<Self, PolyError> {
        if map_from_root.len() != root.len() || map_from_root.iter().any(|p| p.roster() != roster) {
            return Err(PolyError::RosterMismatch {
                left: root.to_string(),
                right: roster.to_string(),
            });
        }
        for v in &divisor_vars {
            roster.require(v)?;
        }
        Ok(Chart {
            id: id.to_string(),
            root: root.clone(),
            roster: roster.clone(),
            map_from_root,
            divisor_vars,
            history: Vec::new(),
        })
    }

    fn add_divisor(&mut self, v: &str) {
        if !self.divisor_vars.iter().any(|d| d == v) {
            self.divisor_vars.push(v.to_string());
            let order: Vec<usize> = self
                .divisor_vars
                .iter()
                .map(|d| self.roster.index_of(d).unwrap())
                .collect();
            let mut paired: Vec<(usize, String)> = order.into_iter().zip(self.divisor_vars.drain(..)).collect();
            paired.sort();
            self.divisor_vars = paired.into_iter().map(|(_, d)| d).collect();
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn root_roster(&self) -> &Roster {
        &self.root
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn map_from_root(&self) -> &[Polynomial] {
        &self.map_from_root
    }

    pub fn divisor_vars(&self) -> &[String] {
        &self.divisor_vars
    }

    pub fn history(&self) -> &[BlowStep] {
        &self.history
    }

    /// Number of blow-ups between the root and this chart.
    pub fn depth(&self) -> usize {
        self.history.len()
    }
}

/// Blows up `chart` along `center`, returning one standard chart per center
/// variable in roster order.
pub fn blow_up(chart: &Chart, center: &Center) -> Result<Vec<Chart>, BlowupError> {
    let checked = Center::new(&chart.roster, center.vars())?;
    checked
        .vars
        .iter()
        .enumerate()
        .map(|(k, distinguished)| {
            let step = BlowStep {
                center: checked.clone(),
                distinguished: distinguished.clone(),
            };
            let images = step.substitution(&chart.roster)?;
            let map_from_root = chart
                .map_from_root
                .iter()
                .map(|p| p.substitute_positional(&images, &chart.roster))
                .collect::<Result<Vec<_>, _>>()?;
            let mut child = Chart {
                id: format!("{}/{}:{}", chart.id, k, distinguished),
                root: chart.root.clone(),
                roster: chart.roster.clone(),
                map_from_root,
                divisor_vars: chart.divisor_vars.clone(),
                history: chart.history.clone(),
            };
            child.add_divisor(distinguished);
            child.history.push(step);
            Ok(child)
        })
        .collect()
}

/// Pulls a polynomial over the root roster back into `chart`.
pub fn pullback(chart: &Chart, p: &Polynomial) -> Result<Polynomial, BlowupError> {
    if p.roster() != &chart.root {
        return Err(PolyError::RosterMismatch {
            left: chart.root.to_string(),
            right: p.roster().to_string(),
        }
        .into());
    }
    Ok(p.substitute_positional(&chart.map_from_root, &chart.roster)?)
}

/// `p = z^beta * unit`, with `ok` when the quotient is a unit at the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalCrossingsRecord {
    pub beta: Vec<u32>,
    pub unit: Polynomial,
    pub ok: bool,
}

impl NormalCrossingsRecord {
    pub fn unit_jet(&self, order: u32) -> Jet {
        Jet::new(&self.unit, order)
    }

    pub fn unit_constant(&self) -> Rational {
        self.unit.constant_term()
    }
}

pub fn normal_crossings_at_origin(p: &Polynomial) -> Result<NormalCrossingsRecord, BlowupError> {
    let (beta, unit) = p.monomial_content().map_err(|_| BlowupError::ZeroPolynomial)?;
    let ok = !unit.constant_term().is_zero();
    Ok(NormalCrossingsRecord { beta, unit, ok })
}

/// Normal-crossings test after translating `point` to the origin.
pub fn normal_crossings_at_point(p: &Polynomial, point: &[Rational]) -> Result<NormalCrossingsRecord, BlowupError> {
    if point.len() != p.nvars() {
        return Err(PolyError::RosterMismatch {
            left: p.roster().to_string(),
            right: format!("point of length {}", point.len()),
        }
        .into());
    }
    normal_crossings_at_origin(&p.translate(point))
}
