//! Problem files: a TOML document describing either a Darboux integral to
//! monomialize or an already monomial system to analyze directly.
//!
//! ```toml
//! title = "three lines"
//! variables = ["x", "y", "eps"]
//! jet_order = 8
//!
//! [[factor]]
//! expr = "x - eps"
//! exponent = "1/2"
//!
//! [strategy]
//! kind = "manual"
//! max_depth = 4
//! [[strategy.script]]
//! chart = "root"
//! center = ["x", "y", "eps"]
//! ```

use num_traits::{One, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::foliation::DarbouxIntegral;
use crate::monomialize::{ScriptEntry, Strategy, StrategyKind};
use crate::polyring::rational::{fmt_rational, parse_rational, Rational};
use crate::polyring::{parse_polynomial, ParseError, Polynomial, Roster};

pub const DEFAULT_JET_ORDER: u32 = 8;
pub const DEFAULT_MAX_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("malformed problem file: {0}")]
    Toml(String),
    #[error("{field}: {source}")]
    Expression {
        field: String,
        #[source]
        source: ParseError,
    },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("script line {line}: {message}")]
    Script { line: usize, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ProblemError {
    ProblemError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

/// A number written either as a TOML integer or as a `"p/q"` string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Int(i64),
    Text(String),
}

impl RawNumber {
    fn to_rational(&self, field: &str) -> Result<Rational, ProblemError> {
        match self {
            RawNumber::Int(n) => Ok(Rational::from_integer((*n).into())),
            RawNumber::Text(t) => parse_rational(t).map_err(|e| invalid(field, e.to_string())),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    title: Option<String>,
    #[serde(default)]
    notes: Vec<String>,
    variables: Option<Vec<String>>,
    jet_order: Option<u32>,
    #[serde(default, rename = "factor")]
    factors: Vec<RawFactor>,
    strategy: Option<RawStrategy>,
    imported: Option<RawImported>,
    #[serde(default, rename = "claim")]
    claims: Vec<RawClaim>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    expr: String,
    exponent: RawNumber,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrategy {
    kind: Option<String>,
    max_depth: Option<usize>,
    #[serde(default)]
    script: Vec<RawScriptEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScriptEntry {
    chart: String,
    center: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawImported {
    variables: Vec<String>,
    divisor: Option<Vec<String>>,
    #[serde(rename = "integral")]
    integrals: Vec<RawIntegral>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegral {
    label: String,
    exponents: Vec<RawNumber>,
    #[serde(default = "default_unit")]
    unit: String,
}

fn default_unit() -> String {
    "1".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClaim {
    label: String,
    formula: String,
    chart: Option<String>,
    #[serde(rename = "factor")]
    factors: Vec<RawClaimFactor>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClaimFactor {
    var: String,
    base: String,
    exponent: RawNumber,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSpec {
    pub expr: String,
    pub poly: Polynomial,
    pub exponent: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategySpec {
    pub kind: StrategyKind,
    pub max_depth: usize,
    pub script: Vec<ScriptEntry>,
}

impl StrategySpec {
    pub fn build(&self) -> Result<Strategy, crate::monomialize::MonomializeError> {
        Strategy::new(self.kind, self.script.clone(), self.max_depth)
    }
}

pub fn strategy_name(kind: StrategyKind) -> &'static str {
    match kind {
        StrategyKind::Manual => "manual",
        StrategyKind::AutoOrigin => "auto-origin",
        StrategyKind::AutoCoordinate => "auto-coordinate",
    }
}

pub fn parse_strategy_kind(text: &str) -> Option<StrategyKind> {
    match text {
        "manual" => Some(StrategyKind::Manual),
        "auto-origin" => Some(StrategyKind::AutoOrigin),
        "auto-coordinate" => Some(StrategyKind::AutoCoordinate),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralSpec {
    pub label: String,
    pub gamma: Vec<Rational>,
    pub unit_text: String,
    pub unit: Polynomial,
}

/// Monomial system given directly, integrals `z^gamma_i * unit_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportedSpec {
    pub roster: Roster,
    pub divisor: Vec<String>,
    pub integrals: Vec<IntegralSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClaimFactor {
    pub var: String,
    pub base_text: String,
    pub base: Polynomial,
    pub exponent: Rational,
}

/// A substitution `z~_var = z_var * prod base^exponent` asserted elsewhere,
/// to be audited against the computed change of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub label: String,
    pub formula: String,
    pub chart: Option<String>,
    pub factors: Vec<ClaimFactor>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub title: Option<String>,
    pub notes: Vec<String>,
    /// Roster of the factors, or of the imported system.
    pub roster: Roster,
    pub factors: Vec<FactorSpec>,
    pub jet_order: u32,
    pub strategy: StrategySpec,
    pub imported: Option<ImportedSpec>,
    pub claims: Vec<Claim>,
}

fn parse_expr(text: &str, roster: &Roster, field: String) -> Result<Polynomial, ProblemError> {
    parse_polynomial(text, roster).map_err(|source| ProblemError::Expression { field, source })
}

fn make_roster(names: &[String], field: &str) -> Result<Roster, ProblemError> {
    Roster::new(names).map_err(|e| invalid(field, e.to_string()))
}

impl Problem {
    pub fn from_toml(text: &str) -> Result<Self, ProblemError> {
        let raw: RawProblem = toml::from_str(text).map_err(|e| ProblemError::Toml(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawProblem) -> Result<Self, ProblemError> {
        let jet_order = raw.jet_order.unwrap_or(DEFAULT_JET_ORDER);
        if jet_order == 0 {
            return Err(invalid("jet_order", "must be positive"));
        }
        let strategy = match raw.strategy {
            None => StrategySpec {
                kind: StrategyKind::AutoOrigin,
                max_depth: DEFAULT_MAX_DEPTH,
                script: Vec::new(),
            },
            Some(s) => {
                let kind = match s.kind.as_deref() {
                    None if s.script.is_empty() => StrategyKind::AutoOrigin,
                    None => StrategyKind::Manual,
                    Some(k) => parse_strategy_kind(k).ok_or_else(|| {
                        invalid(
                            "strategy.kind",
                            format!("unknown strategy `{k}` (manual, auto-origin, auto-coordinate)"),
                        )
                    })?,
                };
                let max_depth = s.max_depth.unwrap_or(DEFAULT_MAX_DEPTH);
                if max_depth == 0 {
                    return Err(invalid("strategy.max_depth", "must be at least 1"));
                }
                let script = s
                    .script
                    .into_iter()
                    .map(|e| ScriptEntry {
                        chart_id: e.chart,
                        center: e.center,
                    })
                    .collect();
                StrategySpec {
                    kind,
                    max_depth,
                    script,
                }
            }
        };

        let (roster, factors, imported) = match (raw.variables, raw.imported) {
            (Some(_), Some(_)) => {
                return Err(invalid(
                    "variables",
                    "give either `variables` with factors or an `[imported]` system, not both",
                ))
            }
            (None, None) => {
                return Err(invalid(
                    "variables",
                    "missing: a problem needs factors or an `[imported]` system",
                ))
            }
            (Some(names), None) => {
                let roster = make_roster(&names, "variables")?;
                if roster.len() < 2 {
                    return Err(invalid(
                        "variables",
                        "need at least the two distinguished variables (x, y)",
                    ));
                }
                if raw.factors.is_empty() {
                    return Err(invalid("factor", "at least one [[factor]] is required"));
                }
                let factors = raw
                    .factors
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        let poly = parse_expr(&f.expr, &roster, format!("factor[{i}].expr"))?;
                        let exponent = f.exponent.to_rational(&format!("factor[{i}].exponent"))?;
                        if exponent <= Rational::zero() {
                            return Err(invalid(format!("factor[{i}].exponent"), "must be positive"));
                        }
                        Ok(FactorSpec {
                            expr: f.expr.clone(),
                            poly,
                            exponent,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                (roster, factors, None)
            }
            (None, Some(imp)) => {
                if !raw.factors.is_empty() {
                    return Err(invalid(
                        "factor",
                        "factors cannot be combined with an [imported] system",
                    ));
                }
                let roster = make_roster(&imp.variables, "imported.variables")?;
                let divisor = imp.divisor.unwrap_or_else(|| imp.variables.clone());
                for d in &divisor {
                    if roster.index_of(d).is_none() {
                        return Err(invalid("imported.divisor", format!("unknown variable `{d}`")));
                    }
                }
                if imp.integrals.is_empty() {
                    return Err(invalid("imported.integral", "at least one integral is required"));
                }
                if imp.integrals.len() + 1 != roster.len() {
                    return Err(invalid(
                        "imported.integral",
                        format!(
                            "{} integrals over {} variables; expected one fewer integral than variables",
                            imp.integrals.len(),
                            roster.len()
                        ),
                    ));
                }
                let integrals = imp
                    .integrals
                    .iter()
                    .enumerate()
                    .map(|(i, g)| {
                        let field = format!("imported.integral[{i}]");
                        if g.exponents.len() != roster.len() {
                            return Err(invalid(&field, format!("expected {} exponents", roster.len())));
                        }
                        let gamma = g
                            .exponents
                            .iter()
                            .map(|e| e.to_rational(&format!("{field}.exponents")))
                            .collect::<Result<Vec<_>, _>>()?;
                        if gamma.iter().any(|x| x < &Rational::zero()) {
                            return Err(invalid(format!("{field}.exponents"), "must be non-negative"));
                        }
                        let unit = parse_expr(&g.unit, &roster, format!("{field}.unit"))?;
                        if unit.constant_term().is_zero() {
                            return Err(invalid(format!("{field}.unit"), "not a unit (zero constant term)"));
                        }
                        Ok(IntegralSpec {
                            label: g.label.clone(),
                            gamma,
                            unit_text: g.unit.clone(),
                            unit,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let imported = ImportedSpec {
                    roster: roster.clone(),
                    divisor,
                    integrals,
                };
                (roster, Vec::new(), Some(imported))
            }
        };

        let claims = raw
            .claims
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let factors = c
                    .factors
                    .iter()
                    .enumerate()
                    .map(|(k, f)| {
                        let field = format!("claim[{i}].factor[{k}]");
                        if roster.index_of(&f.var).is_none() {
                            return Err(invalid(&field, format!("unknown variable `{}`", f.var)));
                        }
                        let base = parse_expr(&f.base, &roster, format!("{field}.base"))?;
                        if !base.constant_term().is_one() {
                            return Err(invalid(format!("{field}.base"), "base must have constant term 1"));
                        }
                        Ok(ClaimFactor {
                            var: f.var.clone(),
                            base_text: f.base.clone(),
                            base,
                            exponent: f.exponent.to_rational(&format!("{field}.exponent"))?,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Claim {
                    label: c.label.clone(),
                    formula: c.formula.clone(),
                    chart: c.chart.clone(),
                    factors,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        Ok(Problem {
            title: raw.title,
            notes: raw.notes,
            roster,
            factors,
            jet_order,
            strategy,
            imported,
            claims,
        })
    }

    pub fn integral(&self) -> Option<DarbouxIntegral> {
        if self.factors.is_empty() {
            return None;
        }
        let factors = self
            .factors
            .iter()
            .map(|f| (f.poly.clone(), f.exponent.clone()))
            .collect();
        DarbouxIntegral::new(&self.roster, factors).ok()
    }

    /// Exponents as printed, in factor order.
    pub fn exponent_strings(&self) -> Vec<String> {
        self.factors.iter().map(|f| fmt_rational(&f.exponent)).collect()
    }
}

/// Parses a center script: one `<chart-id> <var> <var> ...` per line, `#`
/// starts a comment.
pub fn parse_script(text: &str) -> Result<Vec<ScriptEntry>, ProblemError> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let chart_id = words.next().unwrap().to_string();
        let center: Vec<String> = words
            .map(|w| w.trim_matches(',').to_string())
            .filter(|w| !w.is_empty())
            .collect();
        if center.len() < 2 {
            return Err(ProblemError::Script {
                line: k + 1,
                message: "a center needs at least two variables".into(),
            });
        }
        out.push(ScriptEntry { chart_id, center });
    }
    Ok(out)
}
