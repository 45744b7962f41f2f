//! Batch pipeline: one-form, monomialization, exponent analysis, unit
//! elimination and the claim audit, assembled into a [`Report`].

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use thiserror::Error;

use crate::blowup::Chart;
use crate::foliation::{
    darboux_one_form, verify_integrating_factor, wedge_system, DarbouxIntegral, FoliationError, IntegratingFactorCheck,
};
use crate::linalg;
use crate::monomialize::{
    monomialize_sequence_partial, verify_leaf, ConstantFactor, LeafOutcome, MonomialSystem, MonomializeError,
};
use crate::polyring::rational::{fmt_rational, Rational};
use crate::polyring::{Jet, PolyError, Polynomial};
use crate::problem::{strategy_name, Claim, ImportedSpec, Problem};
use crate::report::{
    Analysis, Binding, BlowupEcho, Check, ClaimedExponent, Discrepancy, Elimination, FactorEcho, FactorLeaf,
    FoliationReport, ImportedEcho, InputEcho, IntegralEcho, IntegralReport, LeafReport, Power, PushedComponent, Report,
    ScriptEcho, StrategyEcho, Summary, TransversalityEcho, REPORT_FORMAT,
};
use crate::resonance::{generator_field, is_resonant, verify_annihilation, ExponentMatrix, LogLinearField};
use crate::unitelim::{
    eliminate_units, normalize_units, push_forward_field, transversality_report, ChangeOfVariables, PushedField,
    UnitElimError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Foliation,
    Monomialize,
    Analyze,
    Eliminate,
    Full,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Foliation => "foliation",
            Command::Monomialize => "monomialize",
            Command::Analyze => "analyze",
            Command::Eliminate => "eliminate",
            Command::Full => "full",
        }
    }

    fn wants_foliation(self) -> bool {
        matches!(self, Command::Foliation | Command::Full)
    }

    fn wants_leaves(self) -> bool {
        self != Command::Foliation
    }

    fn wants_analysis(self) -> bool {
        self >= Command::Analyze
    }

    fn wants_elimination(self) -> bool {
        self >= Command::Eliminate
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Command::Foliation,
            Command::Monomialize,
            Command::Analyze,
            Command::Eliminate,
            Command::Full,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("`{0}` needs a problem with factors, not an imported system")]
    NeedsFactors(Command),
    #[error("claim `{label}`: {message}")]
    Claim { label: String, message: String },
    #[error(transparent)]
    Foliation(#[from] FoliationError),
    #[error(transparent)]
    Monomialize(#[from] MonomializeError),
    #[error(transparent)]
    UnitElim(#[from] UnitElimError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub(crate) fn strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(fmt_rational).collect()
}

pub(crate) fn powers_of(c: &ConstantFactor) -> Vec<Power> {
    c.factors()
        .iter()
        .map(|(b, e)| Power {
            base: fmt_rational(b),
            exponent: fmt_rational(e),
        })
        .collect()
}

fn bindings<'a>(names: &[String], values: impl IntoIterator<Item = &'a Polynomial>) -> Vec<Binding> {
    names
        .iter()
        .zip(values)
        .map(|(var, p)| Binding {
            var: var.clone(),
            value: p.to_string(),
        })
        .collect()
}

pub(crate) const NONGENERIC_STATUS: &str = "nongeneric";

pub(crate) fn nongeneric_message(rank: usize, expected: usize) -> String {
    format!(
        "nongeneric case: exponent matrix has rank {rank} < {expected}; unit elimination for resonant exponents is an open question, so later stages are skipped for this leaf"
    )
}

/// One-form, wedge coefficients and the integrating-factor check.
pub(crate) fn foliation_section(h: &DarbouxIntegral) -> Result<FoliationReport, PipelineError> {
    let omega = darboux_one_form(h);
    let wedge = wedge_system(&omega, h.roster())?;
    let check = match verify_integrating_factor(h, &omega) {
        IntegratingFactorCheck::Holds { constant } => Check::new(
            "integrating factor",
            true,
            format!("phi * omega = {} * dH", fmt_rational(&constant)),
        ),
        IntegratingFactorCheck::Fails { variable } => Check::new(
            "integrating factor",
            false,
            format!("d{variable} coefficient is not proportional to the partial derivative"),
        ),
        IntegratingFactorCheck::Skipped { reason } => Check::skipped("integrating factor", reason),
    };
    Ok(FoliationReport {
        omega: bindings(h.roster().names(), omega.coefficients()),
        q1: wedge.q1.to_string(),
        q2: wedge.q2.to_string(),
        checks: vec![check],
    })
}

pub(crate) fn integral_reports(system: &MonomialSystem) -> Vec<IntegralReport> {
    system
        .labels
        .iter()
        .zip(system.exponent_rows())
        .zip(system.units.iter().zip(&system.dropped_constants))
        .map(|((label, gamma), (unit, dropped))| IntegralReport {
            label: label.clone(),
            gamma: strs(&gamma),
            unit: unit.body().to_string(),
            dropped: powers_of(dropped),
        })
        .collect()
}

pub(crate) fn factor_leaves(system: &MonomialSystem) -> Vec<FactorLeaf> {
    system
        .factor_records
        .iter()
        .map(|r| FactorLeaf {
            beta: r.beta.clone(),
            unit: r.unit.to_string(),
        })
        .collect()
}

/// Imported system with units normalized; constants go to `dropped`.
pub(crate) fn imported_system(spec: &ImportedSpec, order: u32) -> Result<MonomialSystem, PipelineError> {
    let chart = Chart::with_id("imported", &spec.roster, &spec.divisor)?;
    let labels = spec.integrals.iter().map(|g| g.label.clone()).collect();
    let rows = spec.integrals.iter().map(|g| g.gamma.clone()).collect();
    let units = spec.integrals.iter().map(|g| Jet::new(&g.unit, order)).collect();
    let raw = MonomialSystem::imported(chart, labels, rows, units)?;
    Ok(normalize_units(&raw)?)
}

/// Each imported unit equals its dropped constant times the normalized jet.
pub(crate) fn imported_checks(spec: &ImportedSpec, system: &MonomialSystem) -> Vec<Check> {
    spec.integrals
        .iter()
        .zip(&system.units)
        .zip(&system.dropped_constants)
        .map(|((g, unit), dropped)| {
            let ok = match dropped.rational_value() {
                Some(c) => {
                    Jet::new(&g.unit, unit.order()) == unit.scale(&c)
                        && unit.constant_term() == Rational::from_integer(1.into())
                }
                None => false,
            };
            Check::new(
                format!("{} = z^gamma * c * D with D(0) = 1", g.label),
                ok,
                String::new(),
            )
        })
        .collect()
}

pub(crate) struct AnalysisOutcome {
    pub analysis: Analysis,
    pub field: Option<LogLinearField>,
    pub checks: Vec<Check>,
}

pub(crate) fn analyze_system(system: &MonomialSystem) -> Result<AnalysisOutcome, PipelineError> {
    let rows = system.exponent_rows();
    let matrix = ExponentMatrix::new(rows.clone()).map_err(|e| MonomializeError::InvalidStrategy(e.to_string()))?;
    let rank = linalg::rank(&rows);
    let resonant =
        is_resonant(&system.gamma0, &system.gammas).map_err(|e| MonomializeError::InvalidStrategy(e.to_string()))?;
    let field = generator_field(&matrix).ok();
    let mut checks = Vec::new();
    if let Some(f) = &field {
        let ok = rows.iter().all(|g| verify_annihilation(f, g, None));
        checks.push(Check::new("m(a) * alpha = 0", ok, format!("alpha = {f}")));
    }
    Ok(AnalysisOutcome {
        analysis: Analysis {
            rank,
            maximal_rank: matrix.maximal_rank(),
            resonant,
            generator: field.as_ref().map(|f| strs(f.alpha())),
        },
        field,
        checks,
    })
}

/// Identities certified for a solved change of variables and its pushed field.
pub(crate) fn elimination_checks(
    system: &MonomialSystem,
    change: &ChangeOfVariables,
    pushed: &PushedField,
) -> Result<Vec<Check>, PipelineError> {
    let order = change.order();
    let mut checks = Vec::new();
    let unit_ok = change
        .factors()
        .iter()
        .all(|v| v.constant_term() == Rational::from_integer(1.into()));
    checks.push(Check::new("every V_j has constant term 1", unit_ok, String::new()));
    for (label, ok) in system.labels.iter().zip(change.reconstruction_checks(system)?) {
        checks.push(Check::new(
            format!("{label}: z~^gamma = z^gamma * D"),
            ok,
            format!("modulo degree {}", order + 1),
        ));
    }
    for ((label, gamma), unit) in system.labels.iter().zip(system.exponent_rows()).zip(&system.units) {
        checks.push(Check::new(
            format!("X annihilates {label}"),
            pushed.annihilates(&gamma, unit)?,
            format!("modulo degree {}", order + 1),
        ));
    }
    let origin_ok = pushed.correction.iter().all(|c| c.constant_term().is_zero());
    checks.push(Check::new(
        "correction vanishes at the origin",
        origin_ok,
        String::new(),
    ));
    Ok(checks)
}

pub(crate) fn elimination_section(
    system: &MonomialSystem,
    change: &ChangeOfVariables,
    pushed: &PushedField,
) -> Result<Elimination, PipelineError> {
    let names = system.roster().names();
    let transversality = system
        .chart
        .divisor_vars()
        .iter()
        .map(|v| {
            let t = transversality_report(pushed, v)?;
            Ok(TransversalityEcho {
                var: v.clone(),
                transversal: t.transversal,
                component: fmt_rational(&t.component),
                detail: t.detail,
            })
        })
        .collect::<Result<Vec<_>, UnitElimError>>()?;
    Ok(Elimination {
        columns: change.columns().iter().map(|&j| names[j].clone()).collect(),
        change: bindings(names, change.factors().iter().map(Jet::body)),
        pushed: names
            .iter()
            .zip(pushed.linear_part.alpha())
            .zip(&pushed.correction)
            .map(|((var, a), c)| PushedComponent {
                var: var.clone(),
                linear: fmt_rational(a),
                correction: c.body().to_string(),
            })
            .collect(),
        transversality,
    })
}

/// Claimed pieces as `(var, base text, base, exponent)`.
pub(crate) struct ClaimPart<'a> {
    pub var: &'a str,
    pub base_text: &'a str,
    pub base: Polynomial,
    pub exponent: Rational,
}

/// Audits a claimed substitution on `system`, side by side with `computed`.
pub(crate) fn audit_claim(
    label: &str,
    formula: &str,
    parts: &[ClaimPart<'_>],
    system: &MonomialSystem,
    computed: Option<&ChangeOfVariables>,
) -> Result<Discrepancy, PipelineError> {
    let roster = system.roster();
    let order = system.order();
    let claim_err = |message: String| PipelineError::Claim {
        label: label.to_string(),
        message,
    };
    let mut factors = vec![Jet::one(roster, order); roster.len()];
    let mut exponents = Vec::new();
    for part in parts {
        let j = roster
            .index_of(part.var)
            .ok_or_else(|| claim_err(format!("unknown variable `{}`", part.var)))?;
        let base = part.base.embed(roster)?;
        let base_jet = Jet::new(&base, order);
        let power = base_jet
            .pow_rational(&part.exponent)
            .map_err(|e| claim_err(e.to_string()))?;
        factors[j] = factors[j].mul(&power)?;
        let computed_exponent = computed.and_then(|c| {
            let log_base = base_jet.log().ok()?;
            if log_base.is_zero() {
                return None;
            }
            c.logs()[j].body().proportionality_to(log_base.body())
        });
        exponents.push(ClaimedExponent {
            var: part.var.to_string(),
            base: part.base_text.to_string(),
            claimed: fmt_rational(&part.exponent),
            computed: computed_exponent.as_ref().map(fmt_rational),
        });
    }
    let claimed = ChangeOfVariables::from_factors(factors)?;
    let checks = system
        .labels
        .iter()
        .zip(claimed.reconstruction_checks(system)?)
        .map(|(l, ok)| {
            Check::new(
                format!("{l} preserved"),
                ok,
                format!(
                    "claimed substitution turns {l} into the pure monomial z~^gamma, modulo degree {}",
                    order + 1
                ),
            )
        })
        .collect();
    Ok(Discrepancy {
        label: label.to_string(),
        chart: system.chart.id().to_string(),
        formula: formula.to_string(),
        exponents,
        change: bindings(roster.names(), claimed.factors().iter().map(Jet::body)),
        checks,
    })
}

fn claim_parts(claim: &Claim) -> Vec<ClaimPart<'_>> {
    claim
        .factors
        .iter()
        .map(|f| ClaimPart {
            var: &f.var,
            base_text: &f.base_text,
            base: f.base.clone(),
            exponent: f.exponent.clone(),
        })
        .collect()
}

fn input_echo(problem: &Problem) -> InputEcho {
    InputEcho {
        variables: problem.roster.names().to_vec(),
        factors: problem
            .factors
            .iter()
            .map(|f| FactorEcho {
                expr: f.poly.to_string(),
                exponent: fmt_rational(&f.exponent),
            })
            .collect(),
        jet_order: problem.jet_order,
        strategy: if problem.imported.is_some() {
            None
        } else {
            Some(StrategyEcho {
                kind: strategy_name(problem.strategy.kind).to_string(),
                max_depth: problem.strategy.max_depth,
                script: problem
                    .strategy
                    .script
                    .iter()
                    .map(|e| ScriptEcho {
                        chart: e.chart_id.clone(),
                        center: e.center.clone(),
                    })
                    .collect(),
            })
        },
        imported: problem.imported.as_ref().map(|imp| ImportedEcho {
            divisor: imp.divisor.clone(),
            integrals: imp
                .integrals
                .iter()
                .map(|g| IntegralEcho {
                    label: g.label.clone(),
                    exponents: strs(&g.gamma),
                    unit: g.unit.to_string(),
                })
                .collect(),
        }),
    }
}

fn empty_summary() -> Summary {
    Summary {
        leaves: 0,
        leaves_ok: 0,
        leaves_stuck: 0,
        leaves_nongeneric: 0,
        passed: 0,
        failed: 0,
        skipped: 0,
        claims_refuted: 0,
        status: String::new(),
    }
}

fn chart_leaf(chart: &Chart) -> LeafReport {
    LeafReport {
        chart: chart.id().to_string(),
        status: "ok".into(),
        message: None,
        divisor: chart.divisor_vars().to_vec(),
        map_from_root: bindings(chart.root_roster().names(), chart.map_from_root()),
        factors: Vec::new(),
        integrals: Vec::new(),
        analysis: None,
        elimination: None,
        checks: Vec::new(),
    }
}

struct Stages<'a> {
    command: Command,
    order: u32,
    claims: &'a [Claim],
}

/// Analysis and elimination for one assembled system.
fn later_stages(
    stages: &Stages<'_>,
    system: &MonomialSystem,
    leaf: &mut LeafReport,
    discrepancies: &mut Vec<Discrepancy>,
) -> Result<(), PipelineError> {
    if !stages.command.wants_analysis() {
        return Ok(());
    }
    let outcome = analyze_system(system)?;
    leaf.checks.extend(outcome.checks);
    let rank = outcome.analysis.rank;
    let expected = outcome.analysis.maximal_rank;
    leaf.analysis = Some(outcome.analysis);
    let mut computed = None;
    match outcome.field {
        None => {
            leaf.status = NONGENERIC_STATUS.into();
            leaf.message = Some(nongeneric_message(rank, expected));
            if stages.command.wants_elimination() {
                leaf.checks.push(Check::skipped("unit elimination", "nongeneric case"));
            }
        }
        Some(field) if stages.command.wants_elimination() => {
            let (change, _) = eliminate_units(system, stages.order)?;
            let pushed = push_forward_field(&field, &change)?;
            leaf.checks.extend(elimination_checks(system, &change, &pushed)?);
            leaf.elimination = Some(elimination_section(system, &change, &pushed)?);
            computed = Some(change);
        }
        Some(_) => {}
    }
    if stages.command.wants_elimination() {
        for claim in stages.claims {
            let here = match &claim.chart {
                Some(id) => id == system.chart.id(),
                None => discrepancies.iter().all(|d| d.label != claim.label),
            };
            if here {
                discrepancies.push(audit_claim(
                    &claim.label,
                    &claim.formula,
                    &claim_parts(claim),
                    system,
                    computed.as_ref(),
                )?);
            }
        }
    }
    Ok(())
}

/// Runs `command` on `problem`. Per-leaf failures to proceed are recorded as
/// statuses; only malformed input or internal inconsistencies are errors.
pub fn run(problem: &Problem, command: Command) -> Result<Report, PipelineError> {
    let order = problem.jet_order;
    let h = problem.integral();
    let mut report = Report {
        format: REPORT_FORMAT.into(),
        command: command.name().into(),
        title: problem.title.clone(),
        input: input_echo(problem),
        foliation: None,
        blowups: Vec::new(),
        leaves: Vec::new(),
        discrepancies: Vec::new(),
        notes: problem.notes.clone(),
        summary: empty_summary(),
    };
    if command.wants_foliation() {
        match &h {
            Some(h) => report.foliation = Some(foliation_section(h)?),
            None if command == Command::Foliation => return Err(PipelineError::NeedsFactors(command)),
            None => {}
        }
    }
    let stages = Stages {
        command,
        order,
        claims: &problem.claims,
    };
    if command.wants_leaves() {
        if let Some(h) = &h {
            let strategy = problem.strategy.build()?;
            let outcome = monomialize_sequence_partial(h, &strategy, order)?;
            report.blowups = outcome
                .tree
                .blowups()
                .iter()
                .map(|b| BlowupEcho {
                    chart: b.chart_id.clone(),
                    center: b.center.vars().to_vec(),
                })
                .collect();
            for leaf in &outcome.leaves {
                match leaf {
                    LeafOutcome::Failed { chart, error } => {
                        let mut r = chart_leaf(chart);
                        r.status = error.status().into();
                        r.message = Some(error.to_string());
                        if command.wants_analysis() {
                            r.checks
                                .push(Check::skipped("later stages", "leaf is not monomialized"));
                        }
                        report.leaves.push(r);
                    }
                    LeafOutcome::System(system) => {
                        let mut r = chart_leaf(&system.chart);
                        r.factors = factor_leaves(system);
                        r.integrals = integral_reports(system);
                        r.checks = verify_leaf(h, system)?
                            .into_iter()
                            .map(|c| Check::new(c.name, c.passed, c.detail))
                            .collect();
                        later_stages(&stages, system, &mut r, &mut report.discrepancies)?;
                        report.leaves.push(r);
                    }
                }
            }
        } else if let Some(spec) = &problem.imported {
            let system = imported_system(spec, order)?;
            let mut r = chart_leaf(&system.chart);
            r.integrals = integral_reports(&system);
            r.checks = imported_checks(spec, &system);
            later_stages(&stages, &system, &mut r, &mut report.discrepancies)?;
            report.leaves.push(r);
        }
    }
    report.summarize();
    Ok(report)
}
