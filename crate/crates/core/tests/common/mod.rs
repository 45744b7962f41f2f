//! Seeded generators and property checks shared by the property suite and
//! the acceptance run. Every check returns `Err(description)` on the first
//! counterexample so callers can print the seed and case.

#![allow(dead_code)]

use std::collections::BTreeMap;

use darboux::blowup::{blow_up, normal_crossings_at_origin, pullback, Center, Chart};
use darboux::foliation::{darboux_one_form, verify_integrating_factor, DarbouxIntegral, IntegratingFactorCheck};
use darboux::linalg;
use darboux::monomialize::MonomialSystem;
use darboux::polyring::rational::{dot, int, primitive_vector, rat, Rational};
use darboux::polyring::{parse_polynomial, Jet, Monomial, Polynomial, Roster};
use darboux::resonance::{generator_field, verify_annihilation, ExponentMatrix};
use darboux::unitelim::{eliminate_units, push_forward_field};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Gen = ChaCha8Rng;

pub fn gen(seed: u64) -> Gen {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn roster(n: usize) -> Roster {
    Roster::new(&["x", "y", "z", "w"][..n]).unwrap()
}

pub fn small_rational(g: &mut Gen) -> Rational {
    rat(g.gen_range(-6..=6), g.gen_range(1..=4))
}

pub fn nonzero_rational(g: &mut Gen) -> Rational {
    loop {
        let r = small_rational(g);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn positive_rational(g: &mut Gen) -> Rational {
    rat(g.gen_range(1..=9), g.gen_range(1..=5))
}

fn random_exps(g: &mut Gen, nvars: usize, max_degree: u32) -> Vec<u32> {
    let target = g.gen_range(0..=max_degree);
    let mut e = vec![0u32; nvars];
    for _ in 0..target {
        e[g.gen_range(0..nvars)] += 1;
    }
    e
}

pub fn random_poly(g: &mut Gen, r: &Roster, max_degree: u32, max_terms: usize) -> Polynomial {
    let count = g.gen_range(0..=max_terms);
    let terms: Vec<(Monomial, Rational)> = (0..count)
        .map(|_| (Monomial::new(random_exps(g, r.len(), max_degree)), small_rational(g)))
        .collect();
    Polynomial::from_terms(r, terms)
}

/// `1 + w` with `w(0) = 0`.
pub fn random_unit(g: &mut Gen, r: &Roster, max_degree: u32, max_terms: usize) -> Polynomial {
    let w = random_poly(g, r, max_degree, max_terms);
    let w = &w - &Polynomial::constant(r, w.constant_term());
    &Polynomial::one(r) + &w
}

/// Chart reached by up to `max_steps` random coordinate blow-ups.
pub fn random_chart(g: &mut Gen, r: &Roster, max_steps: usize) -> Chart {
    let mut chart = Chart::root(r, &[]).unwrap();
    for _ in 0..g.gen_range(0..=max_steps) {
        let mut names: Vec<String> = r.names().to_vec();
        names.shuffle(g);
        let size = g.gen_range(2..=names.len());
        let center = Center::new(chart.roster(), &names[..size]).unwrap();
        let mut children = blow_up(&chart, &center).unwrap();
        chart = children.swap_remove(g.gen_range(0..size));
    }
    chart
}

pub fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Runs `check` on `cases` seeded cases; the error names the failing seed.
pub fn run_cases(
    base_seed: u64,
    cases: usize,
    mut check: impl FnMut(&mut Gen) -> Result<(), String>,
) -> Result<usize, String> {
    for k in 0..cases {
        let seed = base_seed.wrapping_mul(1_000_003).wrapping_add(k as u64);
        check(&mut gen(seed)).map_err(|e| format!("case {k} (seed {seed}): {e}"))?;
    }
    Ok(cases)
}

// ---- polyring -------------------------------------------------------------

pub fn ring_laws(a: &Polynomial, b: &Polynomial, c: &Polynomial) -> Result<(), String> {
    ensure(a + b == b + a, || format!("a+b != b+a for {a}, {b}"))?;
    ensure(a * b == b * a, || format!("ab != ba for {a}, {b}"))?;
    ensure(&(a + b) + c == a + &(b + c), || "addition not associative".into())?;
    ensure(&(a * b) * c == a * &(b * c), || {
        format!("multiplication not associative for {a}, {b}, {c}")
    })?;
    ensure(a * &(b + c) == &(a * b) + &(a * c), || {
        format!("not distributive for {a}, {b}, {c}")
    })?;
    let copy = a.clone();
    ensure((a - &copy).is_zero(), || "a - a != 0".into())?;
    ensure(&(a * &Polynomial::one(a.roster())) == a, || "a * 1 != a".into())
}

pub fn prop_ring_laws(g: &mut Gen) -> Result<(), String> {
    let r = roster(g.gen_range(1..=3));
    let (a, b, c) = (
        random_poly(g, &r, 4, 5),
        random_poly(g, &r, 4, 5),
        random_poly(g, &r, 4, 5),
    );
    ring_laws(&a, &b, &c)
}

pub fn prop_substitute_homomorphism(g: &mut Gen) -> Result<(), String> {
    let r = roster(g.gen_range(1..=3));
    let target = roster(3);
    let bindings: BTreeMap<String, Polynomial> = r
        .names()
        .iter()
        .map(|n| (n.clone(), random_poly(g, &target, 2, 3)))
        .collect();
    let a = random_poly(g, &r, 3, 4).embed(&target).unwrap();
    let b = random_poly(g, &r, 3, 4).embed(&target).unwrap();
    let s = |p: &Polynomial| p.substitute(&bindings).unwrap();
    ensure(s(&(&a * &b)) == &s(&a) * &s(&b), || {
        format!("product not preserved for {a}, {b}")
    })?;
    ensure(s(&(&a + &b)) == &s(&a) + &s(&b), || {
        format!("sum not preserved for {a}, {b}")
    })
}

pub fn prop_monomial_content(g: &mut Gen) -> Result<(), String> {
    let r = roster(g.gen_range(1..=3));
    let p = random_poly(g, &r, 5, 5);
    if p.is_zero() {
        return ensure(p.monomial_content().is_err(), || "zero polynomial has content".into());
    }
    let (beta, q) = p.monomial_content().unwrap();
    let rebuilt = &Polynomial::monomial(&r, beta.clone(), Rational::one()) * &q;
    ensure(rebuilt == p, || format!("z^beta * q != p for {p}"))?;
    for i in 0..r.len() {
        ensure(q.terms().any(|(m, _)| m.exps()[i] == 0), || {
            format!("q = {q} still divisible by variable {i}")
        })?;
    }
    Ok(())
}

pub fn prop_parse_roundtrip(g: &mut Gen) -> Result<(), String> {
    let r = roster(g.gen_range(1..=3));
    let p = random_poly(g, &r, 4, 6);
    let printed = p.to_string();
    let once = parse_polynomial(&printed, &r).map_err(|e| format!("{printed}: {e}"))?;
    let twice = parse_polynomial(&once.to_string(), &r).map_err(|e| e.to_string())?;
    ensure(once == p && twice == once, || format!("round trip changed {printed}"))
}

/// `sum_k binom(c, k) w^k`, an oracle for `(1 + w)^c` independent of the
/// jet recurrences.
pub fn binomial_series(w: &Jet, c: &Rational) -> Jet {
    let mut out = Jet::one(w.roster(), w.order());
    let mut coeff = Rational::one();
    let mut power = Jet::one(w.roster(), w.order());
    for k in 1..=w.order() {
        coeff = coeff * (c - int(i64::from(k) - 1)) / int(i64::from(k));
        power = power.mul(w).unwrap();
        out = out.add(&power.scale(&coeff)).unwrap();
    }
    out
}

pub fn prop_jet_identities(g: &mut Gen, order: u32) -> Result<(), String> {
    let r = roster(g.gen_range(1..=2));
    let u = Jet::new(&random_unit(g, &r, 3, 3), order);
    let one = Jet::one(&r, order);
    ensure(u.mul(&u.invert().unwrap()).unwrap() == one, || {
        format!("u * u^-1 != 1 for {u}")
    })?;
    ensure(u.log().unwrap().exp().unwrap() == u, || {
        format!("exp(log u) != u for {u}")
    })?;
    let (p, q) = (g.gen_range(-4i64..=4), g.gen_range(1i64..=4));
    let c = rat(p, q);
    let root = u.pow_rational(&c).unwrap();
    ensure(root.powi(q).unwrap() == u.powi(p).unwrap(), || {
        format!("(u^({c}))^{q} != u^{p} for {u}")
    })?;
    let w = u.sub(&one).unwrap();
    ensure(root == binomial_series(&w, &c), || {
        format!("u^({c}) disagrees with the binomial series for {u}")
    })
}

// ---- foliation ------------------------------------------------------------

fn xye() -> Roster {
    Roster::new(&["x", "y", "eps"]).unwrap()
}

pub fn prop_integrating_factor(g: &mut Gen) -> Result<(), String> {
    let r = xye();
    let k = g.gen_range(1..=3);
    let mut factors = Vec::new();
    while factors.len() < k {
        let p = random_poly(g, &r, 2, 4);
        if p.is_constant() {
            continue;
        }
        factors.push((p, int(g.gen_range(1..=3))));
    }
    let h = DarbouxIntegral::new(&r, factors).unwrap();
    let omega = darboux_one_form(&h);
    ensure(
        matches!(
            verify_integrating_factor(&h, &omega),
            IntegratingFactorCheck::Holds { .. }
        ),
        || {
            format!(
                "integrating factor fails for {:?}",
                h.factors().iter().map(|(p, _)| p.to_string()).collect::<Vec<_>>()
            )
        },
    )
}

/// Factors with common roots: naive `dH / phi` would divide by a shared
/// factor, the log-derivative form never does.
pub fn prop_shared_roots(g: &mut Gen) -> Result<(), String> {
    let r = xye();
    let base = loop {
        let p = random_poly(g, &r, 1, 3);
        if !p.is_constant() {
            break p;
        }
    };
    let other = loop {
        let p = random_poly(g, &r, 1, 3);
        if !p.is_zero() {
            break p;
        }
    };
    let factors = vec![
        (base.clone(), int(g.gen_range(1..=3))),
        (&base * &other, int(g.gen_range(1..=2))),
    ];
    let h = DarbouxIntegral::new(&r, factors).unwrap();
    let omega = darboux_one_form(&h);
    ensure(
        matches!(
            verify_integrating_factor(&h, &omega),
            IntegratingFactorCheck::Holds { .. }
        ),
        || format!("shared-root factors {base}, {other}"),
    )
}

pub fn prop_exponent_scaling(g: &mut Gen) -> Result<(), String> {
    let r = xye();
    let polys = ["x - eps", "x - y", "x + y", "x*y - eps", "y^2 + x"];
    let k = g.gen_range(1..=3);
    let mut chosen: Vec<&str> = polys.to_vec();
    chosen.shuffle(g);
    let a: Vec<Rational> = (0..k).map(|_| positive_rational(g)).collect();
    let s = positive_rational(g);
    let make = |scale: &Rational| {
        let f = chosen[..k]
            .iter()
            .zip(&a)
            .map(|(t, ai)| (parse_polynomial(t, &r).unwrap(), ai * scale))
            .collect();
        darboux_one_form(&DarbouxIntegral::new(&r, f).unwrap()).primitive()
    };
    let (w1, w2) = (make(&Rational::one()), make(&s));
    ensure(w1 == w2, || {
        format!("scaling exponents by {s} changed the normalized form")
    })
}

// ---- blowup ---------------------------------------------------------------

pub fn prop_pullback_homomorphism(g: &mut Gen) -> Result<(), String> {
    let r = roster(3);
    let chart = random_chart(g, &r, 3);
    let a = random_poly(g, &r, 3, 4);
    let b = random_poly(g, &r, 3, 4);
    let pb = |p: &Polynomial| pullback(&chart, p).unwrap();
    ensure(pb(&(&a * &b)) == &pb(&a) * &pb(&b), || {
        format!("pullback not multiplicative in {}", chart.id())
    })?;
    ensure(pb(&(&a + &b)) == &pb(&a) + &pb(&b), || {
        format!("pullback not additive in {}", chart.id())
    })
}

/// Monomial times unit stays monomial times unit under further blow-ups.
pub fn prop_monomial_stability(g: &mut Gen) -> Result<(), String> {
    let r = roster(3);
    let beta: Vec<u32> = (0..3).map(|_| g.gen_range(0..=3)).collect();
    let unit = random_unit(g, &r, 2, 3).scale(&nonzero_rational(g));
    let p = &Polynomial::monomial(&r, beta, Rational::one()) * &unit;
    let chart = random_chart(g, &r, 3);
    let rec = normal_crossings_at_origin(&pullback(&chart, &p).unwrap()).unwrap();
    ensure(rec.ok && !rec.unit.constant_term().is_zero(), || {
        format!("{p} lost normal crossings in {}", chart.id())
    })?;
    ensure(rec.unit.constant_term() == unit.constant_term(), || {
        "unit constant changed".into()
    })
}

/// `map_from_root` equals the composition of the per-step substitutions.
pub fn prop_chart_composition(g: &mut Gen) -> Result<(), String> {
    let r = roster(3);
    let chart = random_chart(g, &r, 4);
    let mut map: Vec<Polynomial> = (0..3).map(|i| Polynomial::var_at(&r, i)).collect();
    for step in chart.history() {
        let images = step.substitution(&r).unwrap();
        map = map
            .iter()
            .map(|p| p.substitute_positional(&images, &r).unwrap())
            .collect();
    }
    ensure(map == chart.map_from_root(), || {
        format!("composition differs in {}", chart.id())
    })?;
    let origin = vec![Rational::zero(); 3];
    ensure(map.iter().all(|p| p.evaluate(&origin).is_zero()), || {
        "chart origin not over the root origin".into()
    })
}

// ---- resonance ------------------------------------------------------------

pub fn random_full_rank(g: &mut Gen, n: usize) -> Vec<Vec<Rational>> {
    loop {
        let rows: Vec<Vec<Rational>> = (0..=n)
            .map(|_| (0..n + 2).map(|_| small_rational(g)).collect())
            .collect();
        if linalg::rank(&rows) == n + 1 {
            return rows;
        }
    }
}

pub fn prop_kernel(g: &mut Gen) -> Result<(), String> {
    let n = g.gen_range(1..=3);
    let rows = random_full_rank(g, n);
    let alpha = generator_field(&ExponentMatrix::new(rows.clone()).unwrap()).unwrap();
    let a = alpha.alpha();
    ensure(a.iter().any(|x| !x.is_zero()), || "zero generator".into())?;
    ensure(rows.iter().all(|row| dot(row, a).is_zero()), || {
        format!("m * alpha != 0 for alpha = {alpha}")
    })?;
    ensure(primitive_vector(a) == a, || "generator not primitive".into())?;
    if n == 1 {
        let (u, v) = (&rows[0], &rows[1]);
        let cross = vec![
            &u[1] * &v[2] - &u[2] * &v[1],
            &u[2] * &v[0] - &u[0] * &v[2],
            &u[0] * &v[1] - &u[1] * &v[0],
        ];
        ensure(primitive_vector(&cross) == a, || {
            format!("cross product disagrees with {alpha}")
        })?;
    }
    // row scaling does not move the kernel
    let scaled: Vec<Vec<Rational>> = rows
        .iter()
        .map(|row| {
            let s = nonzero_rational(g);
            row.iter().map(|x| x * &s).collect()
        })
        .collect();
    let again = generator_field(&ExponentMatrix::new(scaled).unwrap()).unwrap();
    ensure(again == alpha, || "row scaling changed the generator".into())
}

/// `verify_annihilation` against a direct derivative of `z^gamma * u`.
pub fn prop_annihilation_oracle(g: &mut Gen) -> Result<(), String> {
    let r = roster(3);
    let order = 4;
    let gamma: Vec<u32> = (0..3).map(|_| g.gen_range(0..=2)).collect();
    let gamma_q: Vec<Rational> = gamma.iter().map(|&x| int(x.into())).collect();
    let alpha: Vec<Rational> = if g.gen_bool(0.5) {
        // a field killing z^gamma, built from an orthogonal combination
        let mut a = vec![Rational::zero(); 3];
        let (i, j) = (g.gen_range(0..3), g.gen_range(0..3));
        if i != j && (gamma[i] > 0 || gamma[j] > 0) {
            a[i] = gamma_q[j].clone();
            a[j] = -gamma_q[i].clone();
        } else {
            a[g.gen_range(0..3)] = int(1);
        }
        a
    } else {
        (0..3).map(|_| small_rational(g)).collect()
    };
    if alpha.iter().all(Zero::is_zero) {
        return Ok(());
    }
    let field = darboux::resonance::LogLinearField::new(&alpha).unwrap();
    let unit = if g.gen_bool(0.5) {
        Polynomial::one(&r)
    } else {
        random_unit(g, &r, 2, 2)
    };
    let p = &Polynomial::monomial(&r, gamma.clone(), Rational::one()) * &unit;
    let mut image = Polynomial::zero(&r);
    for (j, a) in field.alpha().iter().enumerate() {
        let zj = Polynomial::var_at(&r, j);
        image = &image + &(&zj * &p.derivative_at(j)).scale(a);
    }
    let bound = gamma.iter().sum::<u32>() + order;
    let direct = image.truncate(bound).is_zero();
    let claimed = verify_annihilation(&field, &gamma_q, Some(&Jet::new(&unit, order)));
    ensure(direct == claimed, || {
        format!("alpha {field}, gamma {gamma:?}, unit {unit}: direct {direct}, claimed {claimed}")
    })?;
    if unit.is_constant() {
        let pure = verify_annihilation(&field, &gamma_q, None);
        ensure(pure == dot(field.alpha(), &gamma_q).is_zero(), || {
            "pure monomial disagrees with <alpha, gamma>".into()
        })?;
    }
    Ok(())
}

// ---- unitelim -------------------------------------------------------------

pub struct RandomSystem {
    pub system: MonomialSystem,
    pub order: u32,
}

/// Maximal-rank non-negative integer exponents with random units.
pub fn random_system(g: &mut Gen, n: usize, order: u32) -> RandomSystem {
    let r = roster(n + 2);
    let rows = loop {
        let rows: Vec<Vec<Rational>> = (0..=n)
            .map(|_| (0..n + 2).map(|_| int(g.gen_range(0..=3))).collect())
            .collect();
        if linalg::rank(&rows) == n + 1 {
            break rows;
        }
    };
    let units = (0..=n).map(|_| Jet::new(&random_unit(g, &r, 2, 3), order)).collect();
    let labels = (0..=n).map(|i| format!("I{i}")).collect();
    let chart = Chart::with_id("random", &r, &[]).unwrap();
    RandomSystem {
        system: MonomialSystem::imported(chart, labels, rows, units).unwrap(),
        order,
    }
}

pub fn random_elimination_case(g: &mut Gen) -> RandomSystem {
    let n = g.gen_range(1..=2);
    let order = if n == 1 { *[4, 8].choose(g).unwrap() } else { 4 };
    random_system(g, n, order)
}

/// Soundness: `prod (z_j V_j)^gamma_ij = z^gamma_i D_i` for every `i`, and
/// transport: the pushed generator kills every `z^gamma_i D_i`.
pub fn prop_elimination(g: &mut Gen) -> Result<(), String> {
    let RandomSystem { system, order } = random_elimination_case(g);
    let (change, transformed) = eliminate_units(&system, order).map_err(|e| e.to_string())?;
    let recon = change.reconstruction_checks(&system).map_err(|e| e.to_string())?;
    ensure(recon.iter().all(|&b| b), || {
        format!("reconstruction {recon:?} for rows {:?}", system.exponent_rows())
    })?;
    ensure(transformed.units.iter().all(Jet::is_one), || {
        "transformed units are not 1".into()
    })?;
    let field = generator_field(&ExponentMatrix::new(system.exponent_rows()).unwrap()).unwrap();
    let pushed = push_forward_field(&field, &change).map_err(|e| e.to_string())?;
    for (gamma, unit) in system.exponent_rows().iter().zip(&system.units) {
        ensure(pushed.annihilates(gamma, unit).unwrap(), || {
            format!("pushed field misses gamma {gamma:?}")
        })?;
    }
    ensure(pushed.correction.iter().all(|c| c.constant_term().is_zero()), || {
        "correction at origin".into()
    })
}

/// Named property checks with their case counts, for suite runners.
pub type Property = (&'static str, usize, fn(&mut Gen) -> Result<(), String>);

pub fn jet_orders(g: &mut Gen) -> Result<(), String> {
    for order in 1..=8 {
        prop_jet_identities(g, order)?;
    }
    Ok(())
}

pub const PROPERTIES: &[Property] = &[
    ("ring laws", 200, prop_ring_laws),
    ("substitute is a homomorphism", 200, prop_substitute_homomorphism),
    ("monomial content reconstructs", 200, prop_monomial_content),
    ("parse . print . parse", 200, prop_parse_roundtrip),
    ("jet identities, orders 1..8", 200, jet_orders),
    ("integrating factor", 50, prop_integrating_factor),
    ("division-free on shared roots", 50, prop_shared_roots),
    ("exponent scaling keeps the foliation", 200, prop_exponent_scaling),
    ("pullback is a homomorphism", 200, prop_pullback_homomorphism),
    ("monomial stability", 200, prop_monomial_stability),
    ("chart composition", 200, prop_chart_composition),
    ("kernel m * alpha = 0", 200, prop_kernel),
    ("annihilation oracle", 200, prop_annihilation_oracle),
    ("elimination soundness and transport", 50, prop_elimination),
];
