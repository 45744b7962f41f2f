//! Independent re-verification of a report.
//!
//! Nothing from the original problem file is used: charts are replayed from
//! the blow-up log, units and changes of variables are re-parsed from their
//! printed form, and every identity and stored verdict is recomputed.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::blowup::{blow_up, normal_crossings_at_origin, pullback, Center, Chart};
use crate::foliation::DarbouxIntegral;
use crate::monomialize::{verify_leaf, ConstantFactor, FactorRecord, MonomialSystem};
use crate::pipeline::{
    analyze_system, audit_claim, elimination_checks, elimination_section, foliation_section, imported_checks,
    imported_system, integral_reports, ClaimPart, PipelineError, NONGENERIC_STATUS,
};
use crate::polyring::rational::{parse_rational, Rational};
use crate::polyring::{parse_polynomial, Jet, PolyError, Polynomial, Roster};
use crate::problem::{ImportedSpec, IntegralSpec};
use crate::report::{Check, LeafReport, Report, Verdict, REPORT_FORMAT};
use crate::resonance::LogLinearField;
use crate::unitelim::{push_forward_field, ChangeOfVariables, PushedField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("unsupported report format `{0}`")]
    Format(String),
    #[error("{what}: {message}")]
    Malformed { what: String, message: String },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

fn malformed(what: impl Into<String>, message: impl ToString) -> VerifyError {
    VerifyError::Malformed {
        what: what.into(),
        message: message.to_string(),
    }
}

impl From<PolyError> for VerifyError {
    fn from(e: PolyError) -> Self {
        VerifyError::Pipeline(e.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub checks: Vec<Check>,
}

impl VerifyOutcome {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| c.verdict == Verdict::Failed).count()
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed() > 0)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.checks).expect("checks serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("[{}] {}", c.verdict.as_str(), c.name));
            if !c.detail.is_empty() {
                out.push_str(&format!(": {}", c.detail));
            }
            out.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.verdict == Verdict::Passed).count();
        out.push_str(&format!(
            "verify-report: {} checks, {} passed, {} failed\n",
            self.checks.len(),
            passed,
            self.failed()
        ));
        out
    }
}

fn poly(text: &str, roster: &Roster, what: &str) -> Result<Polynomial, VerifyError> {
    parse_polynomial(text, roster).map_err(|e| malformed(what, e))
}

fn rational(text: &str, what: &str) -> Result<Rational, VerifyError> {
    parse_rational(text).map_err(|e| malformed(what, e))
}

fn rationals(texts: &[String], what: &str) -> Result<Vec<Rational>, VerifyError> {
    texts.iter().map(|t| rational(t, what)).collect()
}

fn verdicts(checks: &[Check]) -> Vec<(&str, Verdict)> {
    checks.iter().map(|c| (c.name.as_str(), c.verdict)).collect()
}

fn prefixed(prefix: &str, checks: Vec<Check>) -> impl Iterator<Item = Check> + '_ {
    checks.into_iter().map(move |c| Check {
        name: format!("{prefix}: {}", c.name),
        ..c
    })
}

/// Replays the chart `id` from the root through the logged centers.
fn replay_chart(id: &str, root: Chart, centers: &BTreeMap<&str, &[String]>) -> Result<Chart, String> {
    let mut segments = id.split('/');
    if segments.next() != Some(root.id()) {
        return Err(format!("chart id `{id}` does not start at `{}`", root.id()));
    }
    let mut chart = root;
    for seg in segments {
        let center = centers
            .get(chart.id())
            .ok_or_else(|| format!("no blow-up logged for `{}`", chart.id()))?;
        let center = Center::new(chart.roster(), center).map_err(|e| e.to_string())?;
        let children = blow_up(&chart, &center).map_err(|e| e.to_string())?;
        let k: usize = seg
            .split(':')
            .next()
            .and_then(|k| k.parse().ok())
            .ok_or_else(|| format!("bad chart segment `{seg}`"))?;
        chart = children
            .into_iter()
            .nth(k)
            .ok_or_else(|| format!("chart segment `{seg}` out of range"))?;
    }
    if chart.id() != id {
        return Err(format!("replay produced `{}`, report says `{id}`", chart.id()));
    }
    Ok(chart)
}

fn chart_matches(chart: &Chart, leaf: &LeafReport) -> bool {
    let map_ok = leaf.map_from_root.len() == chart.map_from_root().len()
        && leaf
            .map_from_root
            .iter()
            .zip(chart.root_roster().names().iter().zip(chart.map_from_root()))
            .all(|(b, (var, p))| &b.var == var && b.value == p.to_string());
    map_ok && leaf.divisor == chart.divisor_vars()
}

fn constant_factor(leaf: &LeafReport, i: usize) -> Result<ConstantFactor, VerifyError> {
    let mut c = ConstantFactor::one();
    for p in &leaf.integrals[i].dropped {
        c = c.times(
            rational(&p.base, "dropped base")?,
            rational(&p.exponent, "dropped exponent")?,
        );
    }
    Ok(c)
}

/// Monomial system of a leaf, rebuilt from its printed integrals.
fn system_from_leaf(
    leaf: &LeafReport,
    chart: Chart,
    h: Option<&DarbouxIntegral>,
    order: u32,
) -> Result<MonomialSystem, VerifyError> {
    let roster = chart.roster().clone();
    if leaf.integrals.len() + 1 != roster.len() {
        return Err(malformed(&leaf.chart, "wrong number of integrals"));
    }
    let mut rows = Vec::new();
    let mut units = Vec::new();
    let mut dropped = Vec::new();
    for (i, g) in leaf.integrals.iter().enumerate() {
        let gamma = rationals(&g.gamma, "gamma")?;
        if gamma.len() != roster.len() {
            return Err(malformed(&leaf.chart, "gamma has the wrong length"));
        }
        rows.push(gamma);
        units.push(Jet::new(&poly(&g.unit, &roster, "unit")?, order));
        dropped.push(constant_factor(leaf, i)?);
    }
    let mut rows = rows.into_iter();
    let factor_records = match h {
        Some(h) => {
            if leaf.factors.len() != h.factors().len() {
                return Err(malformed(&leaf.chart, "wrong number of factor records"));
            }
            leaf.factors
                .iter()
                .zip(h.factors())
                .map(|(f, (_, a))| {
                    Ok(FactorRecord {
                        beta: f.beta.clone(),
                        unit: poly(&f.unit, &roster, "factor unit")?,
                        exponent: a.clone(),
                    })
                })
                .collect::<Result<Vec<_>, VerifyError>>()?
        }
        None => Vec::new(),
    };
    Ok(MonomialSystem {
        chart,
        labels: leaf.integrals.iter().map(|g| g.label.clone()).collect(),
        gamma0: rows.next().unwrap(),
        gammas: rows.collect(),
        units,
        dropped_constants: dropped,
        factor_records,
    })
}

/// Some factor (or parameter) is really not normal crossings in `chart`.
fn genuinely_stuck(h: &DarbouxIntegral, chart: &Chart) -> Result<bool, VerifyError> {
    let mut polys: Vec<Polynomial> = h.factors().iter().map(|(p, _)| p.clone()).collect();
    for name in h.parameter_names() {
        polys.push(Polynomial::var(h.roster(), name)?);
    }
    for p in &polys {
        let pulled = pullback(chart, p).map_err(|e| PipelineError::Monomialize(e.into()))?;
        if !normal_crossings_at_origin(&pulled)
            .map_err(|e| PipelineError::Monomialize(e.into()))?
            .ok
        {
            return Ok(true);
        }
    }
    Ok(false)
}

struct LeafState {
    system: MonomialSystem,
    change: Option<ChangeOfVariables>,
}

/// Re-checks every identity in `report` and that stored verdicts reproduce.
pub fn verify_report(report: &Report) -> Result<VerifyOutcome, VerifyError> {
    if report.format != REPORT_FORMAT {
        return Err(VerifyError::Format(report.format.clone()));
    }
    let input = &report.input;
    let roster = Roster::new(&input.variables).map_err(|e| malformed("input.variables", e))?;
    let order = input.jet_order;
    let mut out: Vec<Check> = Vec::new();

    let h = if input.factors.is_empty() {
        None
    } else {
        let factors = input
            .factors
            .iter()
            .map(|f| {
                Ok((
                    poly(&f.expr, &roster, "input factor")?,
                    rational(&f.exponent, "input exponent")?,
                ))
            })
            .collect::<Result<Vec<_>, VerifyError>>()?;
        Some(DarbouxIntegral::new(&roster, factors).map_err(|e| malformed("input.factors", e))?)
    };
    let imported = match &input.imported {
        Some(imp) => Some(ImportedSpec {
            roster: roster.clone(),
            divisor: imp.divisor.clone(),
            integrals: imp
                .integrals
                .iter()
                .map(|g| {
                    Ok(IntegralSpec {
                        label: g.label.clone(),
                        gamma: rationals(&g.exponents, "imported exponents")?,
                        unit_text: g.unit.clone(),
                        unit: poly(&g.unit, &roster, "imported unit")?,
                    })
                })
                .collect::<Result<Vec<_>, VerifyError>>()?,
        }),
        None => None,
    };

    if let Some(f) = &report.foliation {
        let h = h
            .as_ref()
            .ok_or_else(|| malformed("foliation", "report has a one-form but no factors"))?;
        let again = foliation_section(h)?;
        let same = again.omega == f.omega && again.q1 == f.q1 && again.q2 == f.q2;
        out.push(Check::new(
            "foliation: one-form and wedge coefficients reproduce",
            same,
            String::new(),
        ));
        out.push(Check::new(
            "foliation: stored verdicts reproduce",
            verdicts(&again.checks) == verdicts(&f.checks),
            String::new(),
        ));
        out.extend(prefixed("foliation", again.checks));
    }

    let centers: BTreeMap<&str, &[String]> = report
        .blowups
        .iter()
        .map(|b| (b.chart.as_str(), b.center.as_slice()))
        .collect();
    let mut states: BTreeMap<String, LeafState> = BTreeMap::new();

    for leaf in &report.leaves {
        let prefix = format!("leaf {}", leaf.chart);
        let mut recomputed: Vec<Check> = Vec::new();

        let chart = match (&h, &imported) {
            (Some(h), _) => {
                let root = Chart::root(&roster, h.parameter_names())?;
                match replay_chart(&leaf.chart, root, &centers) {
                    Ok(c) => {
                        out.push(Check::new(
                            format!("{prefix}: chart map replays from the blow-up log"),
                            chart_matches(&c, leaf),
                            String::new(),
                        ));
                        c
                    }
                    Err(why) => {
                        out.push(Check::new(
                            format!("{prefix}: chart map replays from the blow-up log"),
                            false,
                            why,
                        ));
                        continue;
                    }
                }
            }
            (None, Some(spec)) => {
                let c = Chart::with_id("imported", &roster, &spec.divisor)?;
                out.push(Check::new(
                    format!("{prefix}: chart is the identity"),
                    chart_matches(&c, leaf),
                    String::new(),
                ));
                c
            }
            (None, None) => return Err(malformed("input", "neither factors nor an imported system")),
        };

        if leaf.status != "ok" && leaf.status != NONGENERIC_STATUS {
            let h = h
                .as_ref()
                .ok_or_else(|| malformed(&prefix, "stuck leaf in an imported system"))?;
            out.push(Check::new(
                format!("{prefix}: leaf is genuinely not normal crossings"),
                genuinely_stuck(h, &chart)?,
                leaf.status.clone(),
            ));
            continue;
        }

        let system = match (&h, &imported) {
            (Some(h), _) => {
                let system = system_from_leaf(leaf, chart, Some(h), order)?;
                recomputed.extend(
                    verify_leaf(h, &system)
                        .map_err(PipelineError::from)?
                        .into_iter()
                        .map(|c| Check::new(c.name, c.passed, c.detail)),
                );
                system
            }
            (None, Some(spec)) => {
                let system = imported_system(spec, order)?;
                out.push(Check::new(
                    format!("{prefix}: normalized integrals reproduce"),
                    integral_reports(&system) == leaf.integrals,
                    String::new(),
                ));
                recomputed.extend(imported_checks(spec, &system));
                system
            }
            (None, None) => unreachable!(),
        };

        let mut change = None;
        if let Some(stored) = &leaf.analysis {
            let again = analyze_system(&system)?;
            out.push(Check::new(
                format!("{prefix}: rank, resonance and generator reproduce"),
                &again.analysis == stored,
                String::new(),
            ));
            let nongeneric = again.field.is_none();
            out.push(Check::new(
                format!("{prefix}: status reproduces"),
                (leaf.status == NONGENERIC_STATUS) == nongeneric,
                leaf.status.clone(),
            ));
            recomputed.extend(again.checks);
            if nongeneric && leaf.checks.iter().any(|c| c.name == "unit elimination") {
                recomputed.push(Check::skipped("unit elimination", "nongeneric case"));
            }
            if let (Some(field), Some(elim)) = (again.field, &leaf.elimination) {
                let factors = elim
                    .change
                    .iter()
                    .map(|b| Ok(Jet::new(&poly(&b.value, &roster, "change factor")?, order)))
                    .collect::<Result<Vec<_>, VerifyError>>()?;
                let vars_ok = elim.change.iter().map(|b| &b.var).eq(roster.names().iter());
                let c = ChangeOfVariables::from_factors(factors).map_err(PipelineError::from)?;
                let linear = rationals(
                    &elim.pushed.iter().map(|p| p.linear.clone()).collect::<Vec<_>>(),
                    "linear part",
                )?;
                let correction = elim
                    .pushed
                    .iter()
                    .map(|p| Ok(Jet::new(&poly(&p.correction, &roster, "correction")?, order)))
                    .collect::<Result<Vec<_>, VerifyError>>()?;
                let stored_field = PushedField {
                    linear_part: LogLinearField::new(&linear).map_err(|e| malformed("linear part", e))?,
                    correction,
                };
                let again_pushed = push_forward_field(&field, &c).map_err(PipelineError::from)?;
                out.push(Check::new(
                    format!("{prefix}: pushed field reproduces from the change of variables"),
                    vars_ok && again_pushed == stored_field,
                    String::new(),
                ));
                let section = elimination_section(&system, &c, &stored_field)?;
                out.push(Check::new(
                    format!("{prefix}: transversality reproduces"),
                    section.transversality == elim.transversality,
                    String::new(),
                ));
                recomputed.extend(elimination_checks(&system, &c, &stored_field)?);
                change = Some(c);
            }
        }
        out.push(Check::new(
            format!("{prefix}: stored verdicts reproduce"),
            verdicts(&recomputed) == verdicts(&leaf.checks),
            String::new(),
        ));
        out.extend(prefixed(&prefix, recomputed));
        states.insert(leaf.chart.clone(), LeafState { system, change });
    }

    for d in &report.discrepancies {
        let name = format!("claim `{}`: audit reproduces", d.label);
        let Some(state) = states.get(&d.chart) else {
            out.push(Check::new(name, false, format!("unknown chart `{}`", d.chart)));
            continue;
        };
        let parts = d
            .exponents
            .iter()
            .map(|e| {
                Ok(ClaimPart {
                    var: &e.var,
                    base_text: &e.base,
                    base: poly(&e.base, &roster, "claim base")?,
                    exponent: rational(&e.claimed, "claim exponent")?,
                })
            })
            .collect::<Result<Vec<_>, VerifyError>>()?;
        let again = audit_claim(&d.label, &d.formula, &parts, &state.system, state.change.as_ref())?;
        out.push(Check::new(name, &again == d, String::new()));
    }

    let mut resummed = report.clone();
    resummed.summarize();
    out.push(Check::new(
        "summary reproduces",
        resummed.summary == report.summary,
        String::new(),
    ));
    out.push(Check::new(
        "exit status consistent with verdicts",
        (report.summary.failed == 0) == (report.summary.status == "verified"),
        String::new(),
    ));
    Ok(VerifyOutcome { checks: out })
}
