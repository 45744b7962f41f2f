//! Sequential monomialization of a Darboux first integral.
//!
//! Factors are processed in order. Each one is pulled back into the current
//! chart tree and every leaf where it is not monomial times unit is blown up
//! further, along centers chosen by a [`Strategy`]. Afterwards every leaf is
//! re-checked for all factors and parameters and the monomial system
//! `H = z^gamma0 * D0, eps_i = z^gamma_i * D_i` is assembled.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::blowup::{blow_up, normal_crossings_at_origin, pullback, BlowupError, Center, Chart, NormalCrossingsRecord};
use crate::foliation::DarbouxIntegral;
use crate::polyring::rational::{fmt_rational, Rational};
use crate::polyring::{Jet, PolyError, Polynomial, Roster};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonomializeError {
    #[error("chart {chart_id}: not monomialized within depth {max_depth}")]
    DepthExceeded { chart_id: String, max_depth: usize },
    #[error("chart {chart_id}: manual script has no center for this chart")]
    ManualScriptExhausted { chart_id: String },
    #[error("chart {chart_id}: factor {factor} lost normal crossings")]
    StabilityViolation { chart_id: String, factor: usize },
    #[error("factor is the zero polynomial")]
    ZeroFactor,
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error(transparent)]
    Blowup(#[from] BlowupError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl MonomializeError {
    /// Machine-readable status tag.
    pub fn status(&self) -> &'static str {
        match self {
            MonomializeError::DepthExceeded { .. } => "depth_exceeded",
            MonomializeError::ManualScriptExhausted { .. } => "manual_script_exhausted",
            MonomializeError::StabilityViolation { .. } => "stability_violation",
            _ => "error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Manual,
    AutoOrigin,
    AutoCoordinate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptEntry {
    pub chart_id: String,
    pub center: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    kind: StrategyKind,
    script: Vec<ScriptEntry>,
    max_depth: usize,
}

impl Strategy {
    pub fn new(kind: StrategyKind, script: Vec<ScriptEntry>, max_depth: usize) -> Result<Self, MonomializeError> {
        if max_depth == 0 {
            return Err(MonomializeError::InvalidStrategy("max_depth must be at least 1".into()));
        }
        Ok(Strategy {
            kind,
            script,
            max_depth,
        })
    }

    pub fn manual(script: Vec<ScriptEntry>, max_depth: usize) -> Result<Self, MonomializeError> {
        Self::new(StrategyKind::Manual, script, max_depth)
    }

    pub fn auto_origin(max_depth: usize) -> Result<Self, MonomializeError> {
        Self::new(StrategyKind::AutoOrigin, Vec::new(), max_depth)
    }

    pub fn auto_coordinate(max_depth: usize) -> Result<Self, MonomializeError> {
        Self::new(StrategyKind::AutoCoordinate, Vec::new(), max_depth)
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn script(&self) -> &[ScriptEntry] {
        &self.script
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    fn choose_center(&self, chart: &Chart, record: &NormalCrossingsRecord) -> Result<Center, MonomializeError> {
        match self.kind {
            StrategyKind::Manual => {
                let entry = self.script.iter().find(|e| e.chart_id == chart.id()).ok_or_else(|| {
                    MonomializeError::ManualScriptExhausted {
                        chart_id: chart.id().to_string(),
                    }
                })?;
                Ok(Center::new(chart.roster(), &entry.center)?)
            }
            StrategyKind::AutoOrigin => origin_center(chart.roster(), &record.unit),
            StrategyKind::AutoCoordinate => match coordinate_center(chart.roster(), &record.unit) {
                Some(c) => Ok(c),
                None => origin_center(chart.roster(), &record.unit),
            },
        }
    }
}

/// All variables occurring in the content-free part.
fn origin_center(roster: &Roster, q: &Polynomial) -> Result<Center, MonomializeError> {
    let names: Vec<&str> = q
        .occurring_vars()
        .into_iter()
        .map(|i| roster.names()[i].as_str())
        .collect();
    Ok(Center::new(roster, &names)?)
}

/// First pair `{z_a, z_b}` (roster order) whose coordinate subspace lies in
/// the zero set of `q`, i.e. every term contains `z_a` or `z_b`.
fn coordinate_center(roster: &Roster, q: &Polynomial) -> Option<Center> {
    let n = roster.len();
    for a in 0..n {
        for b in a + 1..n {
            if q.terms().all(|(m, _)| m.exps()[a] > 0 || m.exps()[b] > 0) {
                let names = [roster.names()[a].as_str(), roster.names()[b].as_str()];
                return Center::new(roster, &names).ok();
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowUpRecord {
    pub chart_id: String,
    pub center: Center,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leaf {
    pub chart: Chart,
    pub stuck: Option<MonomializeError>,
}

/// Leaves of the chart tree in depth-first order plus the blow-up log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartTree {
    root: Chart,
    leaves: Vec<Leaf>,
    blowups: Vec<BlowUpRecord>,
}

impl ChartTree {
    pub fn new(root: Chart) -> Self {
        ChartTree {
            leaves: vec![Leaf {
                chart: root.clone(),
                stuck: None,
            }],
            root,
            blowups: Vec::new(),
        }
    }

    pub fn root(&self) -> &Chart {
        &self.root
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn blowups(&self) -> &[BlowUpRecord] {
        &self.blowups
    }

    pub fn first_error(&self) -> Option<&MonomializeError> {
        self.leaves.iter().find_map(|l| l.stuck.as_ref())
    }
}

fn resolve(
    chart: Chart,
    p: &Polynomial,
    strategy: &Strategy,
    out: &mut Vec<Leaf>,
    blowups: &mut Vec<BlowUpRecord>,
) -> Result<(), MonomializeError> {
    let record = normal_crossings_at_origin(&pullback(&chart, p)?)?;
    if record.ok {
        out.push(Leaf { chart, stuck: None });
        return Ok(());
    }
    if chart.depth() >= strategy.max_depth {
        let err = MonomializeError::DepthExceeded {
            chart_id: chart.id().to_string(),
            max_depth: strategy.max_depth,
        };
        out.push(Leaf {
            chart,
            stuck: Some(err),
        });
        return Ok(());
    }
    let center = match strategy.choose_center(&chart, &record) {
        Ok(c) => c,
        Err(err @ MonomializeError::ManualScriptExhausted { .. }) => {
            out.push(Leaf {
                chart,
                stuck: Some(err),
            });
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    let children = blow_up(&chart, &center)?;
    blowups.push(BlowUpRecord {
        chart_id: chart.id().to_string(),
        center,
    });
    for child in children {
        resolve(child, p, strategy, out, blowups)?;
    }
    Ok(())
}

/// Extends `tree` until `p` is monomial times unit in every leaf, recording
/// leaves where the strategy gives up instead of failing outright.
pub fn monomialize_factor_partial(
    tree: &ChartTree,
    p: &Polynomial,
    strategy: &Strategy,
) -> Result<ChartTree, MonomializeError> {
    if p.is_zero() {
        return Err(MonomializeError::ZeroFactor);
    }
    let mut leaves = Vec::new();
    let mut blowups = tree.blowups.clone();
    for leaf in &tree.leaves {
        if leaf.stuck.is_some() {
            leaves.push(leaf.clone());
            continue;
        }
        resolve(leaf.chart.clone(), p, strategy, &mut leaves, &mut blowups)?;
    }
    Ok(ChartTree {
        root: tree.root.clone(),
        leaves,
        blowups,
    })
}

/// Like [`monomialize_factor_partial`] but fails on the first stuck leaf.
pub fn monomialize_factor(
    tree: &ChartTree,
    p: &Polynomial,
    strategy: &Strategy,
) -> Result<ChartTree, MonomializeError> {
    let out = monomialize_factor_partial(tree, p, strategy)?;
    match out.first_error() {
        Some(e) => Err(e.clone()),
        None => Ok(out),
    }
}

/// Formal product `prod base^exponent` of rational constants. Rational
/// powers of rationals are generally irrational, so the product is kept
/// symbolic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstantFactor {
    factors: Vec<(Rational, Rational)>,
}

impl ConstantFactor {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn times(mut self, base: Rational, exponent: Rational) -> Self {
        if base.is_one() || exponent.is_zero() {
            return self;
        }
        match self.factors.iter_mut().find(|(b, _)| *b == base) {
            Some((_, e)) => *e += exponent,
            None => self.factors.push((base, exponent)),
        }
        self.factors.retain(|(_, e)| !e.is_zero());
        self
    }

    pub fn factors(&self) -> &[(Rational, Rational)] {
        &self.factors
    }

    /// Exact value when every exponent is an integer.
    pub fn rational_value(&self) -> Option<Rational> {
        let mut v = Rational::one();
        for (b, e) in &self.factors {
            if !e.is_integer() {
                return None;
            }
            let k: i32 = e.to_integer().try_into().ok()?;
            v *= num_traits::pow::Pow::pow(b.clone(), k);
        }
        Some(v)
    }
}

impl fmt::Display for ConstantFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(b, e)| {
                if e.is_one() {
                    format!("({})", fmt_rational(b))
                } else {
                    format!("({})^({})", fmt_rational(b), fmt_rational(e))
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Per-factor data `pullback(P_i) = z^beta_i * unit_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorRecord {
    pub beta: Vec<u32>,
    pub unit: Polynomial,
    pub exponent: Rational,
}

/// Local monomial system of one leaf: integrals `z^gamma_i * c_i * D_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialSystem {
    pub chart: Chart,
    /// Display names of the integrals, `H` first.
    pub labels: Vec<String>,
    pub gamma0: Vec<Rational>,
    pub gammas: Vec<Vec<Rational>>,
    pub units: Vec<Jet>,
    pub dropped_constants: Vec<ConstantFactor>,
    /// Empty for imported systems.
    pub factor_records: Vec<FactorRecord>,
}

impl MonomialSystem {
    /// Builds a system directly from monomial data, e.g. one obtained after
    /// blow-ups done elsewhere. Units are taken as given (not normalized).
    pub fn imported(
        chart: Chart,
        labels: Vec<String>,
        exponents: Vec<Vec<Rational>>,
        units: Vec<Jet>,
    ) -> Result<Self, MonomializeError> {
        let dim = chart.roster().len();
        if exponents.is_empty() || exponents.len() != units.len() || exponents.len() != labels.len() {
            return Err(MonomializeError::InvalidStrategy(
                "imported system needs matching labels, exponent rows and units".into(),
            ));
        }
        if exponents.iter().any(|r| r.len() != dim) || units.iter().any(|u| u.roster() != chart.roster()) {
            return Err(PolyError::RosterMismatch {
                left: chart.roster().to_string(),
                right: "imported system rows".into(),
            }
            .into());
        }
        let mut rows = exponents.into_iter();
        let gamma0 = rows.next().unwrap();
        let n = units.len();
        Ok(MonomialSystem {
            chart,
            labels,
            gamma0,
            gammas: rows.collect(),
            units,
            dropped_constants: vec![ConstantFactor::one(); n],
            factor_records: Vec::new(),
        })
    }

    /// Number of parameters `n`.
    pub fn num_parameters(&self) -> usize {
        self.gammas.len()
    }

    pub fn order(&self) -> u32 {
        self.units[0].order()
    }

    pub fn roster(&self) -> &Roster {
        self.chart.roster()
    }

    /// Rows `gamma0, gamma1, .., gamman`.
    pub fn exponent_rows(&self) -> Vec<Vec<Rational>> {
        std::iter::once(self.gamma0.clone())
            .chain(self.gammas.iter().cloned())
            .collect()
    }
}

fn to_rational_vec(beta: &[u32]) -> Vec<Rational> {
    beta.iter().map(|&b| Rational::from_integer(b.into())).collect()
}

/// Normalized unit `q / q(0)` as a jet together with `q(0)`.
fn normalized_unit(q: &Polynomial, order: u32) -> (Jet, Rational) {
    let c = q.constant_term();
    (Jet::new(&q.scale(&c.recip()), order), c)
}

/// Assembles the monomial system of a leaf where every factor and every
/// parameter is already normal crossings.
pub fn assemble_system(h: &DarbouxIntegral, chart: &Chart, order: u32) -> Result<MonomialSystem, MonomializeError> {
    let roster = chart.roster();
    let dim = roster.len();
    let mut gamma0 = vec![Rational::zero(); dim];
    let mut unit0 = Jet::one(roster, order);
    let mut const0 = ConstantFactor::one();
    let mut factor_records = Vec::new();
    for (i, (p, a)) in h.factors().iter().enumerate() {
        let rec = normal_crossings_at_origin(&pullback(chart, p)?)?;
        if !rec.ok {
            return Err(MonomializeError::StabilityViolation {
                chart_id: chart.id().to_string(),
                factor: i,
            });
        }
        for (g, &b) in gamma0.iter_mut().zip(&rec.beta) {
            *g += a * Rational::from_integer(b.into());
        }
        let (u, c) = normalized_unit(&rec.unit, order);
        unit0 = unit0.mul(&u.pow_rational(a)?)?;
        const0 = const0.times(c, a.clone());
        factor_records.push(FactorRecord {
            beta: rec.beta,
            unit: rec.unit,
            exponent: a.clone(),
        });
    }
    let mut labels = vec!["H".to_string()];
    let mut gammas = Vec::new();
    let mut units = vec![unit0];
    let mut dropped = vec![const0];
    for name in h.parameter_names() {
        let eps = Polynomial::var(h.roster(), name)?;
        let rec = normal_crossings_at_origin(&pullback(chart, &eps)?)?;
        if !rec.ok {
            return Err(MonomializeError::StabilityViolation {
                chart_id: chart.id().to_string(),
                factor: h.factors().len() + gammas.len(),
            });
        }
        let (u, c) = normalized_unit(&rec.unit, order);
        labels.push(name.clone());
        gammas.push(to_rational_vec(&rec.beta));
        units.push(u);
        dropped.push(ConstantFactor::one().times(c, Rational::one()));
    }
    Ok(MonomialSystem {
        chart: chart.clone(),
        labels,
        gamma0,
        gammas,
        units,
        dropped_constants: dropped,
        factor_records,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafOutcome {
    System(Box<MonomialSystem>),
    Failed { chart: Chart, error: MonomializeError },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceOutcome {
    pub tree: ChartTree,
    pub leaves: Vec<LeafOutcome>,
}

/// Runs the whole sequence, keeping per-leaf failures.
pub fn monomialize_sequence_partial(
    h: &DarbouxIntegral,
    strategy: &Strategy,
    order: u32,
) -> Result<SequenceOutcome, MonomializeError> {
    let root = Chart::root(h.roster(), h.parameter_names())?;
    let mut tree = ChartTree::new(root);
    for (p, _) in h.factors() {
        tree = monomialize_factor_partial(&tree, p, strategy)?;
    }
    let leaves = tree
        .leaves()
        .iter()
        .map(|leaf| match &leaf.stuck {
            Some(e) => Ok(LeafOutcome::Failed {
                chart: leaf.chart.clone(),
                error: e.clone(),
            }),
            None => match assemble_system(h, &leaf.chart, order) {
                Ok(s) => Ok(LeafOutcome::System(Box::new(s))),
                Err(e @ MonomializeError::StabilityViolation { .. }) => Ok(LeafOutcome::Failed {
                    chart: leaf.chart.clone(),
                    error: e,
                }),
                Err(e) => Err(e),
            },
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SequenceOutcome { tree, leaves })
}

/// Monomializes every factor of `h` and returns one system per leaf.
pub fn monomialize_sequence(
    h: &DarbouxIntegral,
    strategy: &Strategy,
    order: u32,
) -> Result<Vec<MonomialSystem>, MonomializeError> {
    let outcome = monomialize_sequence_partial(h, strategy, order)?;
    outcome
        .leaves
        .into_iter()
        .map(|l| match l {
            LeafOutcome::System(s) => Ok(*s),
            LeafOutcome::Failed { error, .. } => Err(error),
        })
        .collect()
}

/// Result of re-checking a leaf system against its Darboux integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Re-derives every identity of a leaf system from the chart map alone.
pub fn verify_leaf(h: &DarbouxIntegral, system: &MonomialSystem) -> Result<Vec<LeafCheck>, MonomializeError> {
    let chart = &system.chart;
    let roster = chart.roster();
    let order = system.order();
    let mut checks = Vec::new();
    let mut check = |name: String, passed: bool, detail: String| checks.push(LeafCheck { name, passed, detail });

    // per-factor reconstruction z^beta * q == pullback, q(0) != 0
    let mut gamma0 = vec![Rational::zero(); roster.len()];
    for (i, ((p, a), rec)) in h.factors().iter().zip(&system.factor_records).enumerate() {
        let pulled = pullback(chart, p)?;
        let rebuilt = &Polynomial::monomial(roster, rec.beta.clone(), Rational::one()) * &rec.unit;
        check(
            format!("factor {i} pullback = z^beta * unit"),
            rebuilt == pulled && !rec.unit.constant_term().is_zero(),
            format!("beta = {:?}", rec.beta),
        );
        for (g, &b) in gamma0.iter_mut().zip(&rec.beta) {
            *g += a * Rational::from_integer(b.into());
        }
    }
    check(
        "gamma0 = sum a_i beta_i".into(),
        gamma0 == system.gamma0 && system.factor_records.len() == h.factors().len(),
        String::new(),
    );

    // independent route through the expanded H when it is a polynomial
    if let Some(big_h) = h.expand() {
        let pulled = pullback(chart, &big_h)?;
        let (beta, q) = pulled.monomial_content()?;
        let ok_gamma = to_rational_vec(&beta) == system.gamma0;
        let ok_unit = match system.dropped_constants[0].rational_value() {
            Some(c) => Jet::new(&q, order) == system.units[0].scale(&c),
            None => false,
        };
        check(
            "H pullback = z^gamma0 * c0 * D0 (expanded)".into(),
            ok_gamma && ok_unit,
            String::new(),
        );
    } else {
        let mut product = Jet::one(roster, order);
        for rec in &system.factor_records {
            let (u, _) = normalized_unit(&rec.unit, order);
            product = product.mul(&u.pow_rational(&rec.exponent)?)?;
        }
        check(
            "D0 = prod (q_i/q_i(0))^a_i".into(),
            product == system.units[0],
            String::new(),
        );
    }

    for (j, name) in h.parameter_names().iter().enumerate() {
        let pulled = pullback(chart, &Polynomial::var(h.roster(), name)?)?;
        let (beta, q) = pulled.monomial_content()?;
        let ok = to_rational_vec(&beta) == system.gammas[j]
            && match system.dropped_constants[j + 1].rational_value() {
                Some(c) => Jet::new(&q, order) == system.units[j + 1].scale(&c),
                None => false,
            };
        check(format!("{name} pullback = z^gamma * c * D"), ok, String::new());
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_polynomial;
    use crate::polyring::rational::{int, rat};

    fn roster(names: &[&str]) -> Roster {
        Roster::new(names).unwrap()
    }

    fn poly(text: &str, r: &Roster) -> Polynomial {
        parse_polynomial(text, r).unwrap()
    }

    fn entry(id: &str, center: &[&str]) -> ScriptEntry {
        ScriptEntry {
            chart_id: id.into(),
            center: center.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn intro(a: [Rational; 3]) -> DarbouxIntegral {
        let r = roster(&["x", "y", "eps"]);
        let [a1, a2, a3] = a;
        DarbouxIntegral::new(
            &r,
            vec![
                (poly("x - eps", &r), a1),
                (poly("x - y", &r), a2),
                (poly("x + y", &r), a3),
            ],
        )
        .unwrap()
    }

    fn intro_script() -> Strategy {
        Strategy::manual(
            vec![
                entry("root", &["x", "y", "eps"]),
                entry("root/2:eps", &["x", "y"]),
                entry("root/1:y", &["x", "eps"]),
            ],
            12,
        )
        .unwrap()
    }

    #[test]
    fn linear_factor_one_blowup() {
        let r = roster(&["x", "y", "eps"]);
        let tree = ChartTree::new(Chart::root(&r, &[]).unwrap());
        let s = Strategy::auto_origin(12).unwrap();
        let out = monomialize_factor(&tree, &poly("x - y", &r), &s).unwrap();
        assert_eq!(out.blowups().len(), 1);
        assert_eq!(out.leaves().len(), 2);
        let pulled: Vec<Polynomial> = out
            .leaves()
            .iter()
            .map(|l| pullback(&l.chart, &poly("x - y", &r)).unwrap())
            .collect();
        assert_eq!(pulled, vec![poly("x*(1 - y)", &r), poly("y*(x - 1)", &r)]);
    }

    #[test]
    fn monomial_factor_leaves_tree_unchanged() {
        let r = roster(&["x", "y", "eps"]);
        let tree = ChartTree::new(Chart::root(&r, &[]).unwrap());
        let s = Strategy::auto_origin(3).unwrap();
        let out = monomialize_factor(&tree, &poly("3*x^2*y", &r), &s).unwrap();
        assert_eq!(out, tree);
    }

    #[test]
    fn empty_manual_script_is_exhausted() {
        let r = roster(&["x", "y", "eps"]);
        let tree = ChartTree::new(Chart::root(&r, &[]).unwrap());
        let s = Strategy::manual(vec![], 3).unwrap();
        assert_eq!(
            monomialize_factor(&tree, &poly("x - eps", &r), &s),
            Err(MonomializeError::ManualScriptExhausted {
                chart_id: "root".into()
            })
        );
    }

    #[test]
    fn depth_budget_reported() {
        let r = roster(&["x", "y"]);
        let tree = ChartTree::new(Chart::root(&r, &[]).unwrap());
        let s = Strategy::auto_origin(1).unwrap();
        // tangency of order two needs two point blow-ups
        let err = monomialize_factor(&tree, &poly("y - x^2", &r), &s).unwrap_err();
        assert!(matches!(err, MonomializeError::DepthExceeded { max_depth: 1, .. }));
        assert!(Strategy::auto_origin(0).is_err());
    }

    #[test]
    fn intro_example_documented_leaf() {
        let h = intro([int(1), int(1), int(1)]);
        let systems = monomialize_sequence(&h, &intro_script(), 6).unwrap();
        let leaf = systems.iter().find(|s| s.chart.id() == "root/2:eps/0:x").unwrap();
        assert_eq!(leaf.gamma0, vec![int(2), int(0), int(3)]);
        assert_eq!(leaf.gammas, vec![vec![int(0), int(0), int(1)]]);
        for s in &systems {
            for c in verify_leaf(&h, s).unwrap() {
                assert!(c.passed, "{} in {}", c.name, s.chart.id());
            }
        }
    }

    #[test]
    fn intro_example_rational_exponents() {
        let h = intro([rat(1, 2), rat(2, 3), int(3)]);
        let systems = monomialize_sequence(&h, &intro_script(), 4).unwrap();
        let leaf = systems.iter().find(|s| s.chart.id() == "root/2:eps/0:x").unwrap();
        // (a2 + a3, 0, a1 + a2 + a3)
        assert_eq!(leaf.gamma0, vec![rat(11, 3), int(0), rat(25, 6)]);
        // eps(x-1): constant -1 raised to 1/2 stays symbolic
        assert_eq!(leaf.dropped_constants[0].to_string(), "(-1)^(1/2)");
        assert_eq!(leaf.dropped_constants[0].rational_value(), None);
        for s in &systems {
            assert!(verify_leaf(&h, s).unwrap().iter().all(|c| c.passed));
        }
    }

    #[test]
    fn two_step_script_leaves_y_chart_stuck() {
        let h = intro([int(1), int(1), int(1)]);
        let s = Strategy::manual(
            vec![entry("root", &["x", "y", "eps"]), entry("root/2:eps", &["x", "y"])],
            12,
        )
        .unwrap();
        let out = monomialize_sequence_partial(&h, &s, 4).unwrap();
        let failed: Vec<&str> = out
            .leaves
            .iter()
            .filter_map(|l| match l {
                LeafOutcome::Failed { chart, .. } => Some(chart.id()),
                _ => None,
            })
            .collect();
        assert_eq!(failed, vec!["root/1:y"]);
        assert!(monomialize_sequence(&h, &s, 4).is_err());
    }

    #[test]
    fn already_monomial_integral() {
        let r = roster(&["x", "y", "eps"]);
        let h = DarbouxIntegral::new(&r, vec![(poly("x", &r), int(2)), (poly("y", &r), int(5))]).unwrap();
        let systems = monomialize_sequence(&h, &Strategy::auto_origin(4).unwrap(), 4).unwrap();
        assert_eq!(systems.len(), 1);
        let s = &systems[0];
        assert_eq!(s.chart.id(), "root");
        assert_eq!(s.gamma0, vec![int(2), int(5), int(0)]);
        assert_eq!(s.gammas, vec![vec![int(0), int(0), int(1)]]);
        assert!(s.units.iter().all(Jet::is_one));
    }

    #[test]
    fn auto_coordinate_on_intro_example() {
        let h = intro([int(1), int(2), int(3)]);
        let systems = monomialize_sequence(&h, &Strategy::auto_coordinate(12).unwrap(), 4).unwrap();
        assert!(!systems.is_empty());
        for s in &systems {
            assert!(verify_leaf(&h, s).unwrap().iter().all(|c| c.passed));
        }
    }

    #[test]
    fn constant_factor_arithmetic() {
        let c = ConstantFactor::one()
            .times(int(2), int(1))
            .times(int(2), int(2))
            .times(int(1), rat(1, 2));
        assert_eq!(c.rational_value(), Some(int(8)));
        assert_eq!(c.to_string(), "(2)^(3)");
        assert_eq!(ConstantFactor::one().to_string(), "1");
    }
}
