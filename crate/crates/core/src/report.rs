//! Report model shared by the pipeline, the JSON output and `verify-report`.
//!
//! Every number is a string (`p` or `p/q`) and every polynomial or jet body
//! is printed in the expression grammar, so a report can be re-parsed and
//! re-checked without the original problem file. Struct field order is the
//! serialization order.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const REPORT_FORMAT: &str = "darboux-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Passed,
    Failed,
    Skipped,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Passed
        } else {
            Verdict::Failed
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Passed => "passed",
            Verdict::Failed => "failed",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            verdict: Verdict::from_bool(ok),
            detail: detail.into(),
        }
    }

    pub fn skipped(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            verdict: Verdict::Skipped,
            detail: detail.into(),
        }
    }
}

/// `var -> expression`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub var: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Power {
    pub base: String,
    pub exponent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorEcho {
    pub expr: String,
    pub exponent: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEcho {
    pub chart: String,
    pub center: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyEcho {
    pub kind: String,
    pub max_depth: usize,
    pub script: Vec<ScriptEcho>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralEcho {
    pub label: String,
    pub exponents: Vec<String>,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportedEcho {
    pub divisor: Vec<String>,
    pub integrals: Vec<IntegralEcho>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    pub variables: Vec<String>,
    pub factors: Vec<FactorEcho>,
    pub jet_order: u32,
    pub strategy: Option<StrategyEcho>,
    pub imported: Option<ImportedEcho>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoliationReport {
    /// Coefficient of `d(var)`, cleared of exponent denominators.
    pub omega: Vec<Binding>,
    pub q1: String,
    pub q2: String,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupEcho {
    pub chart: String,
    pub center: Vec<String>,
}

/// Pulled-back factor `z^beta * unit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorLeaf {
    pub beta: Vec<u32>,
    pub unit: String,
}

/// `label = z^gamma * dropped * unit`, unit normalized to constant term 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralReport {
    pub label: String,
    pub gamma: Vec<String>,
    pub unit: String,
    pub dropped: Vec<Power>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    pub rank: usize,
    pub maximal_rank: usize,
    pub resonant: bool,
    pub generator: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushedComponent {
    pub var: String,
    pub linear: String,
    pub correction: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalityEcho {
    pub var: String,
    pub transversal: bool,
    pub component: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub columns: Vec<String>,
    /// `V_var` in `var~ = var * V_var`.
    pub change: Vec<Binding>,
    pub pushed: Vec<PushedComponent>,
    pub transversality: Vec<TransversalityEcho>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafReport {
    pub chart: String,
    pub status: String,
    pub message: Option<String>,
    pub divisor: Vec<String>,
    pub map_from_root: Vec<Binding>,
    pub factors: Vec<FactorLeaf>,
    pub integrals: Vec<IntegralReport>,
    pub analysis: Option<Analysis>,
    pub elimination: Option<Elimination>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimedExponent {
    pub var: String,
    pub base: String,
    pub claimed: String,
    /// Exponent of the same base in the computed change, when it is a pure
    /// power of that base.
    pub computed: Option<String>,
}

/// A substitution asserted outside the tool, audited against the
/// computed one. Its checks never change the exit status.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub label: String,
    pub chart: String,
    pub formula: String,
    pub exponents: Vec<ClaimedExponent>,
    pub change: Vec<Binding>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub leaves: usize,
    pub leaves_ok: usize,
    pub leaves_stuck: usize,
    pub leaves_nongeneric: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub claims_refuted: usize,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub format: String,
    pub command: String,
    pub title: Option<String>,
    pub input: InputEcho,
    pub foliation: Option<FoliationReport>,
    pub blowups: Vec<BlowupEcho>,
    pub leaves: Vec<LeafReport>,
    pub discrepancies: Vec<Discrepancy>,
    pub notes: Vec<String>,
    pub summary: Summary,
}

impl Report {
    /// Every check that counts towards the exit status.
    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.foliation
            .iter()
            .flat_map(|f| f.checks.iter())
            .chain(self.leaves.iter().flat_map(|l| l.checks.iter()))
    }

    /// Recomputes the summary from the report body.
    pub fn summarize(&mut self) {
        let count = |v: Verdict| self.checks().filter(|c| c.verdict == v).count();
        let (passed, failed, skipped) = (count(Verdict::Passed), count(Verdict::Failed), count(Verdict::Skipped));
        let claims_refuted = self
            .discrepancies
            .iter()
            .filter(|d| d.checks.iter().any(|c| c.verdict == Verdict::Failed))
            .count();
        let leaves_ok = self.leaves.iter().filter(|l| l.status == "ok").count();
        let leaves_nongeneric = self.leaves.iter().filter(|l| l.status == "nongeneric").count();
        self.summary = Summary {
            leaves: self.leaves.len(),
            leaves_ok,
            leaves_stuck: self.leaves.len() - leaves_ok - leaves_nongeneric,
            leaves_nongeneric,
            passed,
            failed,
            skipped,
            claims_refuted,
            status: if failed == 0 {
                "verified".into()
            } else {
                "failed".into()
            },
        };
    }

    /// Nonzero exactly when a verification failed.
    pub fn exit_code(&self) -> i32 {
        if self.checks().any(|c| c.verdict == Verdict::Failed) {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        render_text(self)
    }
}

const DISPLAY_WIDTH: usize = 100;

fn clip(s: &str) -> String {
    if s.chars().count() <= DISPLAY_WIDTH {
        s.to_string()
    } else {
        let head: String = s.chars().take(DISPLAY_WIDTH).collect();
        format!("{head} ...")
    }
}

fn vector(v: &[String]) -> String {
    format!("({})", v.join(", "))
}

fn powers(p: &[Power]) -> String {
    if p.is_empty() {
        return "1".into();
    }
    p.iter()
        .map(|x| {
            if x.exponent == "1" {
                format!("({})", x.base)
            } else {
                format!("({})^({})", x.base, x.exponent)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn checks(out: &mut String, indent: &str, list: &[Check]) {
    for c in list {
        let _ = write!(out, "{indent}[{}] {}", c.verdict.as_str(), c.name);
        if !c.detail.is_empty() {
            let _ = write!(out, ": {}", c.detail);
        }
        out.push('\n');
    }
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "darboux {}{}",
        r.command,
        r.title.as_ref().map(|t| format!(": {t}")).unwrap_or_default()
    );
    let _ = writeln!(
        out,
        "variables {}, jet order {}",
        vector(&r.input.variables),
        r.input.jet_order
    );
    if !r.input.factors.is_empty() {
        let f: Vec<String> = r
            .input
            .factors
            .iter()
            .map(|f| format!("({})^({})", f.expr, f.exponent))
            .collect();
        let _ = writeln!(out, "H = {}", f.join(" * "));
    }
    if let Some(s) = &r.input.strategy {
        let _ = writeln!(out, "strategy {}, max depth {}", s.kind, s.max_depth);
    }

    if let Some(f) = &r.foliation {
        out.push_str("\none-form\n");
        for b in &f.omega {
            let _ = writeln!(out, "  d{}: {}", b.var, clip(&b.value));
        }
        let _ = writeln!(out, "  Q1 = {}", clip(&f.q1));
        let _ = writeln!(out, "  Q2 = {}", clip(&f.q2));
        checks(&mut out, "  ", &f.checks);
    }

    if !r.blowups.is_empty() {
        out.push_str("\nblow-ups\n");
        for b in &r.blowups {
            let _ = writeln!(out, "  {} along {{{}}}", b.chart, b.center.join(", "));
        }
    }

    for leaf in &r.leaves {
        let _ = writeln!(out, "\nleaf {} [{}]", leaf.chart, leaf.status);
        if let Some(m) = &leaf.message {
            let _ = writeln!(out, "  {m}");
        }
        if !leaf.divisor.is_empty() {
            let _ = writeln!(out, "  divisor: {}", leaf.divisor.join(", "));
        }
        for b in &leaf.map_from_root {
            let _ = writeln!(out, "  {} = {}", b.var, clip(&b.value));
        }
        for g in &leaf.integrals {
            let _ = write!(
                out,
                "  {} = z^{} * {}",
                g.label,
                vector(&g.gamma),
                clip(&format!("({})", g.unit))
            );
            if !g.dropped.is_empty() {
                let _ = write!(out, " * {}", powers(&g.dropped));
            }
            out.push('\n');
        }
        if let Some(a) = &leaf.analysis {
            let _ = writeln!(
                out,
                "  rank {} of {}, {}",
                a.rank,
                a.maximal_rank,
                if a.resonant { "resonant" } else { "non-resonant" }
            );
            if let Some(g) = &a.generator {
                let _ = writeln!(out, "  generator alpha = {}", vector(g));
            }
        }
        if let Some(e) = &leaf.elimination {
            let _ = writeln!(out, "  solved on columns {}", e.columns.join(", "));
            for b in &e.change {
                let _ = writeln!(out, "  {0}~ = {0} * ({1})", b.var, clip(&b.value));
            }
            for p in &e.pushed {
                let _ = writeln!(
                    out,
                    "  X: {0} d/d{0} coefficient {1} + ({2})",
                    p.var,
                    p.linear,
                    clip(&p.correction)
                );
            }
            for t in &e.transversality {
                let _ = writeln!(
                    out,
                    "  {{{} = 0}}: {}",
                    t.var,
                    if t.transversal {
                        "transversal"
                    } else {
                        "not transversal"
                    }
                );
            }
        }
        checks(&mut out, "  ", &leaf.checks);
    }

    if !r.discrepancies.is_empty() {
        out.push_str("\ndiscrepancy ledger (does not affect the exit status)\n");
        for d in &r.discrepancies {
            let _ = writeln!(out, "  {} in {}", d.label, d.chart);
            let _ = writeln!(out, "    claimed: {}", d.formula);
            for e in &d.exponents {
                let _ = writeln!(
                    out,
                    "    {} factor ({}): claimed exponent {}, computed {}",
                    e.var,
                    e.base,
                    e.claimed,
                    e.computed.as_deref().unwrap_or("n/a")
                );
            }
            checks(&mut out, "    ", &d.checks);
        }
    }

    if !r.notes.is_empty() {
        out.push_str("\nnotes\n");
        for n in &r.notes {
            let _ = writeln!(out, "  {n}");
        }
    }

    let s = &r.summary;
    let _ = writeln!(
        out,
        "\nsummary: {} leaves ({} ok, {} stuck, {} nongeneric); checks {} passed, {} failed, {} skipped; claims refuted {}; {}",
        s.leaves, s.leaves_ok, s.leaves_stuck, s.leaves_nongeneric, s.passed, s.failed, s.skipped, s.claims_refuted, s.status
    );
    out
}
