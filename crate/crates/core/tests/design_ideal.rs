use std::collections::BTreeSet;
use std::time::Instant;

use ffalg::fixtures::{self, L8_GB_GREVLEX, L8_GB_LEX};
use ffalg::groebner::standard_monomials;
use ffalg::ideal::{alias_table, design_ideal, est_monomials, is_confounded, Confounding};
use ffalg::monomial::default_names;
use ffalg::order::{Block, OrderKind};
use ffalg::{Design, Monomial, Polynomial, Rational, TermOrder};

fn names(m: usize) -> Vec<String> {
    default_names("x", m)
}

fn as_set(lines: &[String], m: usize) -> BTreeSet<Vec<(Monomial, Rational)>> {
    lines
        .iter()
        .map(|l| {
            let p = Polynomial::<Rational>::parse(l, &names(m)).unwrap();
            let mut t: Vec<_> = p.terms().map(|(a, c)| (a.clone(), c.clone())).collect();
            t.sort();
            t
        })
        .collect()
}

fn fixture_set(lines: &[&str], m: usize) -> BTreeSet<Vec<(Monomial, Rational)>> {
    as_set(&lines.iter().map(|s| s.to_string()).collect::<Vec<_>>(), m)
}

#[test]
fn l8_lex_basis_matches_reference() {
    let start = Instant::now();
    let gb = design_ideal::<Rational>(&fixtures::l8(), &TermOrder::lex(7)).unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert_eq!(as_set(&gb.to_lines(&names(7)), 7), fixture_set(&L8_GB_LEX, 7));
    assert!(gb.is_groebner().unwrap());
}

#[test]
fn l8_grevlex_basis_matches_reference() {
    let start = Instant::now();
    let gb = design_ideal::<Rational>(&fixtures::l8(), &TermOrder::grevlex(7)).unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert_eq!(gb.elements.len(), 28);
    assert_eq!(as_set(&gb.to_lines(&names(7)), 7), fixture_set(&L8_GB_GREVLEX, 7));
}

#[test]
fn basis_vanishes_on_runs_and_est_has_n_elements() {
    for d in [fixtures::l8(), fixtures::f1(), fixtures::f2(), fixtures::f3(), fixtures::design_2_7_3()] {
        let m = d.m();
        let gb = design_ideal::<Rational>(&d, &TermOrder::grevlex(m)).unwrap();
        for p in d.points::<Rational>().unwrap() {
            for g in &gb.elements {
                assert_eq!(g.eval(&p).unwrap(), Rational::from(0));
            }
        }
        let est = est_monomials::<Rational>(&d, &TermOrder::grevlex(m)).unwrap();
        assert_eq!(est.len(), d.n());
    }
}

#[test]
fn l8_confounding_by_membership() {
    let l8 = fixtures::l8();
    let x = |vars: &[usize]| Monomial::from_mask(7, vars.iter().fold(0, |a, v| a | (1 << (v - 1))));
    assert_eq!(is_confounded(&x(&[1, 2]), &x(&[3]), &l8).unwrap(), Confounding::Minus);
    assert_eq!(is_confounded(&x(&[1, 2, 4]), &x(&[7]), &l8).unwrap(), Confounding::Plus);
    assert_eq!(is_confounded(&x(&[1]), &x(&[2]), &l8).unwrap(), Confounding::NotConfounded);
    let t = alias_table(&l8, 2).unwrap();
    let c = t.class_of("x3").unwrap();
    assert!(c.members.iter().any(|m| m.effect == "x1*x2"));
}

// Est of F1 under a plain order equals Est of the augmented design F2 under
// a block order placing the added factor y above the originals.
#[test]
fn est_agrees_with_block_order_after_adding_factor() {
    let base = Design::full_factorial(2);
    let y: Vec<Vec<u32>> = base.runs().iter().map(|r| vec![r[0] ^ r[1]]).collect();
    let aug = base.with_columns(&y).unwrap();
    let tau = TermOrder::grevlex(2);
    let est1 = est_monomials::<Rational>(&base, &tau).unwrap();
    let sigma = TermOrder::block(
        3,
        vec![
            Block { kind: OrderKind::Lex, vars: vec![2] },
            Block { kind: OrderKind::GrevLex, vars: vec![0, 1] },
        ],
    )
    .unwrap();
    let gb = design_ideal::<Rational>(&aug, &sigma).unwrap();
    let est2 = standard_monomials(&gb, &names(3)).unwrap();
    let lifted: Vec<Monomial> = est1.iter().map(|m| m.remap(3, &[0, 1])).collect();
    let a: BTreeSet<_> = lifted.into_iter().collect();
    let b: BTreeSet<_> = est2.into_iter().collect();
    assert_eq!(a, b);
}
