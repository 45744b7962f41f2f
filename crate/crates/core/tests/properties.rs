mod common;

use common::*;
use darboux::polyring::rational::rat;
use darboux::polyring::{parse_polynomial, Monomial, Polynomial};
use proptest::prelude::*;

fn run(name: &str, seed: u64) {
    let (_, cases, check) = PROPERTIES.iter().find(|p| p.0 == name).expect("known property");
    if let Err(e) = run_cases(seed, *cases, *check) {
        panic!("{name}: {e}");
    }
}

#[test]
fn ring_laws_seeded() {
    run("ring laws", 11);
}

#[test]
fn substitute_homomorphism() {
    run("substitute is a homomorphism", 12);
}

#[test]
fn monomial_content_reconstructs() {
    run("monomial content reconstructs", 13);
}

#[test]
fn parse_print_parse() {
    run("parse . print . parse", 14);
}

#[test]
fn jet_identities_all_orders() {
    run("jet identities, orders 1..8", 15);
}

#[test]
fn integrating_factor_random() {
    run("integrating factor", 16);
}

#[test]
fn one_form_is_division_free() {
    run("division-free on shared roots", 17);
}

#[test]
fn exponent_scaling() {
    run("exponent scaling keeps the foliation", 18);
}

#[test]
fn pullback_homomorphism() {
    run("pullback is a homomorphism", 19);
}

#[test]
fn monomial_stability() {
    run("monomial stability", 20);
}

#[test]
fn chart_composition() {
    run("chart composition", 21);
}

#[test]
fn kernel_correctness() {
    run("kernel m * alpha = 0", 22);
}

#[test]
fn annihilation_oracle() {
    run("annihilation oracle", 23);
}

#[test]
fn elimination_soundness() {
    run("elimination soundness and transport", 24);
}

fn poly_strategy(nvars: usize) -> impl Strategy<Value = Polynomial> {
    let term = (prop::collection::vec(0u32..=2, nvars), -5i64..=5, 1i64..=3);
    prop::collection::vec(term, 0..5).prop_map(move |terms| {
        let r = roster(nvars);
        Polynomial::from_terms(&r, terms.into_iter().map(|(e, n, d)| (Monomial::new(e), rat(n, d))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_laws_shrinking(a in poly_strategy(3), b in poly_strategy(3), c in poly_strategy(3)) {
        prop_assert_eq!(ring_laws(&a, &b, &c), Ok(()));
    }

    #[test]
    fn printed_form_reparses(p in poly_strategy(2)) {
        let r = roster(2);
        let again = parse_polynomial(&p.to_string(), &r).unwrap();
        prop_assert_eq!(again, p);
    }

    #[test]
    fn power_is_repeated_product(p in poly_strategy(2), k in 0u32..4) {
        let mut expected = Polynomial::one(p.roster());
        for _ in 0..k {
            expected = &expected * &p;
        }
        prop_assert_eq!(p.pow(k), expected);
    }
}
