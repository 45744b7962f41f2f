//! Elimination of the units of a monomial system in the generic case, and
//! transport of the generating field back to the original coordinates.
//!
//! With `L_i = log D_i`, a change `z~_j = z_j * V_j` with `V_j = exp(W_j)`
//! turns `z^gamma_i * D_i` into `z~^gamma_i` exactly when
//! `sum_j gamma_ij W_j = L_i` for every `i`. The system is solved on a set of
//! `n + 1` independent columns; the remaining `W_j` are zero.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg;
use crate::monomialize::{ConstantFactor, MonomialSystem};
use crate::polyring::rational::{dot, fmt_rational, Rational};
use crate::polyring::{Jet, PolyError, Roster};
use crate::resonance::LogLinearField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitElimError {
    #[error("unit {index} has zero constant term")]
    NotAUnit { index: usize },
    #[error("unit {index} is not normalized (constant term {constant})")]
    NotNormalized { index: usize, constant: String },
    #[error("nongeneric case: exponent matrix has rank {rank} < {expected}")]
    NonGeneric { rank: usize, expected: usize },
    #[error("requested jet order {requested} exceeds the system's order {available}")]
    OrderTooHigh { requested: u32, available: u32 },
    #[error("columns {0:?} do not form an invertible square block")]
    BadColumns(Vec<usize>),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Which independent columns carry the nonzero `W_j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ColumnChoice {
    /// Greedy scan from the last column; leaves leading coordinates fixed.
    #[default]
    Rightmost,
    Leftmost,
    Explicit(Vec<usize>),
}

/// `z~_j = z_j * V_j(z)` with every `V_j(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeOfVariables {
    order: u32,
    factors: Vec<Jet>,
    logs: Vec<Jet>,
    columns: Vec<usize>,
}

impl ChangeOfVariables {
    pub fn identity(roster: &Roster, order: u32) -> Self {
        ChangeOfVariables {
            order,
            factors: vec![Jet::one(roster, order); roster.len()],
            logs: vec![Jet::zero(roster, order); roster.len()],
            columns: Vec::new(),
        }
    }

    /// Change given by explicit unit factors (e.g. a substitution to audit).
    pub fn from_factors(factors: Vec<Jet>) -> Result<Self, UnitElimError> {
        let first = factors.first().ok_or(UnitElimError::BadColumns(Vec::new()))?;
        let order = first.order();
        let logs = factors
            .iter()
            .enumerate()
            .map(|(index, v)| {
                v.log().map_err(|_| UnitElimError::NotNormalized {
                    index,
                    constant: fmt_rational(&v.constant_term()),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ChangeOfVariables {
            order,
            factors,
            logs,
            columns: Vec::new(),
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn factors(&self) -> &[Jet] {
        &self.factors
    }

    pub fn logs(&self) -> &[Jet] {
        &self.logs
    }

    /// Columns solved for; empty for changes built from explicit factors.
    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn roster(&self) -> &Roster {
        self.factors[0].roster()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(Jet::is_one)
    }

    /// `prod_j V_j^{gamma_j}`, i.e. `z~^gamma / z^gamma`.
    pub fn monomial_factor(&self, gamma: &[Rational]) -> Result<Jet, UnitElimError> {
        let mut out = Jet::one(self.roster(), self.order);
        for (v, g) in self.factors.iter().zip(gamma) {
            if !g.is_zero() {
                out = out.mul(&v.pow_rational(g)?)?;
            }
        }
        Ok(out)
    }

    /// For each integral, whether `z~^gamma_i` reproduces `z^gamma_i * D_i`.
    pub fn reconstruction_checks(&self, system: &MonomialSystem) -> Result<Vec<bool>, UnitElimError> {
        system
            .exponent_rows()
            .iter()
            .zip(&system.units)
            .map(|(gamma, unit)| Ok(self.monomial_factor(gamma)? == unit.truncate(self.order)))
            .collect()
    }
}

/// Rescales every unit to constant term one, recording the constants.
pub fn normalize_units(system: &MonomialSystem) -> Result<MonomialSystem, UnitElimError> {
    let mut out = system.clone();
    for (index, (unit, dropped)) in out.units.iter_mut().zip(out.dropped_constants.iter_mut()).enumerate() {
        let c = unit.constant_term();
        if c.is_zero() {
            return Err(UnitElimError::NotAUnit { index });
        }
        *unit = unit.scale(&c.recip());
        *dropped = std::mem::take(dropped).times(c, Rational::one());
    }
    Ok(out)
}

fn choose_columns(rows: &[Vec<Rational>], choice: &ColumnChoice) -> Result<Vec<usize>, UnitElimError> {
    let ncols = rows.first().map_or(0, Vec::len);
    let cols = match choice {
        ColumnChoice::Rightmost => linalg::independent_columns(rows, (0..ncols).rev()),
        ColumnChoice::Leftmost => linalg::independent_columns(rows, 0..ncols),
        ColumnChoice::Explicit(c) => {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            c
        }
    };
    if cols.len() != rows.len() || cols.iter().any(|&c| c >= ncols) {
        return Err(UnitElimError::BadColumns(cols));
    }
    Ok(cols)
}

/// [`eliminate_units_with`] using the default column choice.
pub fn eliminate_units(
    system: &MonomialSystem,
    order: u32,
) -> Result<(ChangeOfVariables, MonomialSystem), UnitElimError> {
    eliminate_units_with(system, order, &ColumnChoice::default())
}

pub fn eliminate_units_with(
    system: &MonomialSystem,
    order: u32,
    choice: &ColumnChoice,
) -> Result<(ChangeOfVariables, MonomialSystem), UnitElimError> {
    let rows = system.exponent_rows();
    let rank = linalg::rank(&rows);
    if rank < rows.len() {
        return Err(UnitElimError::NonGeneric {
            rank,
            expected: rows.len(),
        });
    }
    if order > system.order() {
        return Err(UnitElimError::OrderTooHigh {
            requested: order,
            available: system.order(),
        });
    }
    let roster = system.roster().clone();
    let logs_of_units = system
        .units
        .iter()
        .enumerate()
        .map(|(index, u)| {
            let u = u.truncate(order);
            u.log().map_err(|_| UnitElimError::NotNormalized {
                index,
                constant: fmt_rational(&u.constant_term()),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let columns = choose_columns(&rows, choice)?;
    let block: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| columns.iter().map(|&j| r[j].clone()).collect())
        .collect();
    let inv = linalg::inverse(&block).ok_or_else(|| UnitElimError::BadColumns(columns.clone()))?;

    let mut logs = vec![Jet::zero(&roster, order); roster.len()];
    for (k, &j) in columns.iter().enumerate() {
        let mut w = Jet::zero(&roster, order);
        for (i, l) in logs_of_units.iter().enumerate() {
            if !inv[k][i].is_zero() {
                w = w.add(&l.scale(&inv[k][i]))?;
            }
        }
        logs[j] = w;
    }
    let factors = logs.iter().map(Jet::exp).collect::<Result<Vec<_>, _>>()?;

    let mut transformed = system.clone();
    transformed.units = vec![Jet::one(&roster, order); system.units.len()];
    Ok((
        ChangeOfVariables {
            order,
            factors,
            logs,
            columns,
        },
        transformed,
    ))
}

/// Field `sum_j (alpha_j + correction_j(z)) z_j d/dz_j` in original coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushedField {
    pub linear_part: LogLinearField,
    pub correction: Vec<Jet>,
}

impl PushedField {
    pub fn roster(&self) -> &Roster {
        self.correction[0].roster()
    }

    pub fn order(&self) -> u32 {
        self.correction[0].order()
    }

    /// Full coefficient of `z_j d/dz_j`.
    pub fn coefficients(&self) -> Vec<Jet> {
        self.correction
            .iter()
            .zip(self.linear_part.alpha())
            .map(|(c, a)| {
                c.add(&Jet::constant(c.roster(), c.order(), a.clone()))
                    .expect("same roster and order")
            })
            .collect()
    }

    /// `X(g)` for a jet `g`.
    pub fn apply(&self, g: &Jet) -> Result<Jet, UnitElimError> {
        let mut out = Jet::zero(g.roster(), g.order());
        for (k, c) in self.coefficients().iter().enumerate() {
            let d = g.euler_component(k);
            if !d.is_zero() {
                out = out.add(&c.mul(&d)?)?;
            }
        }
        Ok(out)
    }

    /// `X(z^gamma * unit) / z^gamma = <c, gamma> unit + X(unit)`.
    pub fn apply_to_monomial_unit(&self, gamma: &[Rational], unit: &Jet) -> Result<Jet, UnitElimError> {
        let unit = unit.truncate(self.order());
        let coeffs = self.coefficients();
        let mut weight = Jet::zero(unit.roster(), unit.order());
        for (c, g) in coeffs.iter().zip(gamma) {
            if !g.is_zero() {
                weight = weight.add(&c.scale(g))?;
            }
        }
        Ok(weight.mul(&unit)?.add(&self.apply(&unit)?)?)
    }

    pub fn annihilates(&self, gamma: &[Rational], unit: &Jet) -> Result<bool, UnitElimError> {
        Ok(self.apply_to_monomial_unit(gamma, unit)?.is_zero())
    }
}

/// Expresses `X = sum alpha_j z~_j d/dz~_j` in the original coordinates.
///
/// From `log z~_j = log z_j + W_j` and `X(z~_j) = alpha_j z~_j`, the
/// coefficients `c` of `z_k d/dz_k` satisfy `(I + E) c = alpha` with
/// `E_jk = z_k dW_j/dz_k`. `E` has no constant term, so the Neumann series
/// terminates at the jet order.
pub fn push_forward_field(field: &LogLinearField, change: &ChangeOfVariables) -> Result<PushedField, UnitElimError> {
    let roster = change.roster().clone();
    let order = change.order();
    let dim = roster.len();
    let e: Vec<Vec<Jet>> = change
        .logs
        .iter()
        .map(|w| (0..dim).map(|k| w.euler_component(k)).collect())
        .collect();
    let mut term: Vec<Jet> = field
        .alpha()
        .iter()
        .map(|a| Jet::constant(&roster, order, a.clone()))
        .collect();
    let mut total = term.clone();
    for _ in 0..order {
        let next = (0..dim)
            .map(|j| {
                let mut acc = Jet::zero(&roster, order);
                for k in 0..dim {
                    if !e[j][k].is_zero() && !term[k].is_zero() {
                        acc = acc.sub(&e[j][k].mul(&term[k])?)?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>, UnitElimError>>()?;
        if next.iter().all(Jet::is_zero) {
            break;
        }
        for (t, n) in total.iter_mut().zip(&next) {
            *t = t.add(n)?;
        }
        term = next;
    }
    let correction = total
        .iter()
        .zip(field.alpha())
        .map(|(c, a)| c.sub(&Jet::constant(&roster, order, a.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PushedField {
        linear_part: field.clone(),
        correction,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transversality {
    pub transversal: bool,
    /// Linear coefficient of `z_j d/dz_j` at the origin.
    pub component: Rational,
    pub detail: String,
}

/// Transversality of the pushed field to the leaf `{divisor_var = 0}`,
/// decided by the linear part alone (corrections vanish at the origin).
pub fn transversality_report(field: &PushedField, divisor_var: &str) -> Result<Transversality, UnitElimError> {
    let j = field
        .roster()
        .index_of(divisor_var)
        .ok_or_else(|| UnitElimError::UnknownVariable(divisor_var.to_string()))?;
    let component = field.linear_part.alpha()[j].clone();
    let transversal = !component.is_zero();
    let detail = if transversal {
        format!(
            "linear part moves off {{{divisor_var} = 0}} with coefficient {}",
            fmt_rational(&component)
        )
    } else {
        format!("linear part is tangent to {{{divisor_var} = 0}}")
    };
    Ok(Transversality {
        transversal,
        component,
        detail,
    })
}

/// Pairing `<alpha, gamma>` used to cross-check annihilation of pure monomials.
pub fn weight(field: &LogLinearField, gamma: &[Rational]) -> Rational {
    dot(field.alpha(), gamma)
}

/// Constants dropped while normalizing, for reports.
pub fn dropped_summary(system: &MonomialSystem) -> Vec<String> {
    system.dropped_constants.iter().map(ConstantFactor::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::Chart;
    use crate::polyring::parse_polynomial;
    use crate::polyring::rational::{int, rat};
    use crate::resonance::{generator_field, ExponentMatrix};

    fn roster() -> Roster {
        Roster::new(&["x", "y", "z"]).unwrap()
    }

    fn jet(text: &str, order: u32) -> Jet {
        Jet::new(&parse_polynomial(text, &roster()).unwrap(), order)
    }

    fn system(rows: Vec<Vec<Rational>>, units: &[&str], order: u32) -> MonomialSystem {
        let chart = Chart::with_id("imported", &roster(), &["z".to_string()]).unwrap();
        let labels = (0..rows.len()).map(|i| format!("f{i}")).collect();
        MonomialSystem::imported(chart, labels, rows, units.iter().map(|u| jet(u, order)).collect()).unwrap()
    }

    fn example1(a1: i64, a2: i64, order: u32) -> MonomialSystem {
        system(
            vec![vec![int(a1), int(a2), int(0)], vec![int(1), int(1), int(0)]],
            &["1 + z", "1"],
            order,
        )
    }

    #[test]
    fn normalize() {
        let s = system(
            vec![vec![int(2), int(1), int(0)], vec![int(1), int(1), int(0)]],
            &["2 + 2*z", "1"],
            4,
        );
        let n = normalize_units(&s).unwrap();
        assert_eq!(n.units[0], jet("1 + z", 4));
        assert_eq!(n.dropped_constants[0].rational_value(), Some(int(2)));
        assert_eq!(n.dropped_constants[1].rational_value(), Some(int(1)));
        let bad = system(
            vec![vec![int(2), int(1), int(0)], vec![int(1), int(1), int(0)]],
            &["z", "1"],
            4,
        );
        assert_eq!(normalize_units(&bad), Err(UnitElimError::NotAUnit { index: 0 }));
    }

    #[test]
    fn example1_generic_change() {
        let s = example1(2, 1, 8);
        let (change, transformed) = eliminate_units(&s, 8).unwrap();
        assert_eq!(change.columns(), &[0, 1]);
        assert_eq!(change.factors()[0], jet("1 + z", 8));
        assert_eq!(change.factors()[1], jet("1 + z", 8).invert().unwrap());
        assert!(change.factors()[2].is_one());
        assert!(change.reconstruction_checks(&s).unwrap().iter().all(|&b| b));
        assert!(transformed.units.iter().all(Jet::is_one));
    }

    #[test]
    fn example1_exponent_is_reciprocal_of_difference() {
        // V_x = (1+z)^(1/(a1-a2)) with (a1, a2) = (3, 1)
        let s = example1(3, 1, 6);
        let (change, _) = eliminate_units(&s, 6).unwrap();
        let expected = jet("1 + z", 6).pow_rational(&rat(1, 2)).unwrap();
        assert_eq!(change.factors()[0], expected);
        assert_eq!(change.factors()[1], expected.invert().unwrap());
    }

    #[test]
    fn example1_resonant_is_nongeneric() {
        let s = example1(1, 1, 8);
        assert_eq!(
            eliminate_units(&s, 8).unwrap_err(),
            UnitElimError::NonGeneric { rank: 1, expected: 2 }
        );
    }

    #[test]
    fn trivial_units_give_identity() {
        let s = system(
            vec![vec![int(2), int(1), int(0)], vec![int(1), int(1), int(0)]],
            &["1", "1"],
            5,
        );
        let (change, transformed) = eliminate_units(&s, 5).unwrap();
        assert!(change.is_identity());
        assert_eq!(transformed, s);
        let field = LogLinearField::new(&[int(0), int(0), int(1)]).unwrap();
        let pushed = push_forward_field(&field, &change).unwrap();
        assert!(pushed.correction.iter().all(Jet::is_zero));
    }

    #[test]
    fn example2_with_fixed_x() {
        // (a1, a2, a3) = (1, 3, 2), g = x: H/f^a1 = y^2 z (1 + x), f = xyz
        let s = system(
            vec![vec![int(0), int(2), int(1)], vec![int(1), int(1), int(1)]],
            &["1 + x", "1"],
            8,
        );
        let (change, _) = eliminate_units(&s, 8).unwrap();
        assert_eq!(change.columns(), &[1, 2]);
        assert!(change.factors()[0].is_one());
        assert!(change.reconstruction_checks(&s).unwrap().iter().all(|&b| b));

        let m = ExponentMatrix::new(vec![vec![int(1), int(3), int(2)], vec![int(1), int(1), int(1)]]).unwrap();
        let field = generator_field(&m).unwrap();
        assert_eq!(field.alpha(), &[int(1), int(1), int(-2)]);
        let pushed = push_forward_field(&field, &change).unwrap();
        for (gamma, unit) in s.exponent_rows().iter().zip(&s.units) {
            assert!(pushed.annihilates(gamma, unit).unwrap());
        }
        // correction lives on y and z with opposite signs: -+ 1/(a2-a3) X(g)/(1+g)
        assert!(pushed.correction[0].is_zero());
        assert_eq!(pushed.correction[1], pushed.correction[2].scale(&int(-1)));
        let g = jet("x", 8);
        let xg_over = pushed
            .apply(&g)
            .unwrap()
            .mul(&jet("1 + x", 8).invert().unwrap())
            .unwrap();
        assert_eq!(pushed.correction[1], xg_over.scale(&int(-1)));
    }

    #[test]
    fn example1_pushed_field_closed_form() {
        let (a1, a2) = (2, 1);
        let s = example1(a1, a2, 8);
        let (change, _) = eliminate_units(&s, 8).unwrap();
        let field = LogLinearField::new(&[int(0), int(0), int(1)]).unwrap();
        let pushed = push_forward_field(&field, &change).unwrap();
        // c_x (1+z) = -z/(a1-a2), c_y = -c_x, c_z = 1
        let c = pushed.coefficients();
        let one_plus_z = jet("1 + z", 8);
        assert_eq!(c[0].mul(&one_plus_z).unwrap(), jet("z", 8).scale(&rat(-1, a1 - a2)));
        assert_eq!(c[1], c[0].scale(&int(-1)));
        assert!(c[2].is_one());
        for (gamma, unit) in s.exponent_rows().iter().zip(&s.units) {
            assert!(pushed.annihilates(gamma, unit).unwrap());
        }
        let t = transversality_report(&pushed, "z").unwrap();
        assert!(t.transversal);
        assert!(!transversality_report(&pushed, "x").unwrap().transversal);
        assert!(transversality_report(&pushed, "w").is_err());
    }

    #[test]
    fn resonant_shaped_field_is_tangent() {
        let field = LogLinearField::new(&[int(1), int(-1), int(0)]).unwrap();
        let change = ChangeOfVariables::identity(&roster(), 4);
        let pushed = push_forward_field(&field, &change).unwrap();
        assert!(!transversality_report(&pushed, "z").unwrap().transversal);
    }

    #[test]
    fn gauge_changes_v_but_not_result() {
        let s = system(
            vec![vec![int(0), int(2), int(1)], vec![int(1), int(1), int(1)]],
            &["1 + x + y*z", "1 - z"],
            5,
        );
        let (left, tl) = eliminate_units_with(&s, 5, &ColumnChoice::Leftmost).unwrap();
        let (right, tr) = eliminate_units_with(&s, 5, &ColumnChoice::Rightmost).unwrap();
        assert_ne!(left.factors(), right.factors());
        assert_eq!(tl, tr);
        assert!(left.reconstruction_checks(&s).unwrap().iter().all(|&b| b));
        assert!(right.reconstruction_checks(&s).unwrap().iter().all(|&b| b));
        assert!(matches!(
            eliminate_units_with(&s, 5, &ColumnChoice::Explicit(vec![0])),
            Err(UnitElimError::BadColumns(_))
        ));
    }

    #[test]
    fn unnormalized_and_order_errors() {
        let s = system(
            vec![vec![int(2), int(1), int(0)], vec![int(1), int(1), int(0)]],
            &["2 + z", "1"],
            4,
        );
        assert!(matches!(
            eliminate_units(&s, 4),
            Err(UnitElimError::NotNormalized { index: 0, .. })
        ));
        let s = example1(2, 1, 4);
        assert!(matches!(
            eliminate_units(&s, 6),
            Err(UnitElimError::OrderTooHigh { .. })
        ));
    }

    #[test]
    fn audited_substitution_with_sum_exponents() {
        // x~ = x (1+z)^(1/(a1+a2)), y~ = y (1+z)^(1/(a1+a2)) with (a1, a2) = (2, 1)
        let s = example1(2, 1, 8);
        let v = jet("1 + z", 8).pow_rational(&rat(1, 3)).unwrap();
        let claimed = ChangeOfVariables::from_factors(vec![v.clone(), v, Jet::one(&roster(), 8)]).unwrap();
        assert_eq!(claimed.reconstruction_checks(&s).unwrap(), vec![true, false]);
    }
}
