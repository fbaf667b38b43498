use std::collections::BTreeSet;

use ffalg::design::{gf2_rank, regular_design_from_words, DefiningWord, DefiningWordSet};
use ffalg::fixtures;
use ffalg::indicator::{
    add_factors_to_design, classify_design, design_from_indicator, indicator_add_factors, indicator_from_design,
    ClassTag, FactorRelation, IndicatorFunction,
};
use ffalg::monomial::default_names;
use ffalg::{Coding, Design, Field, Polynomial, Rational};
use proptest::prelude::*;

fn arb_design(max_m: usize) -> impl Strategy<Value = Design> {
    (1..=max_m).prop_flat_map(|m| {
        proptest::collection::btree_set(0u32..(1 << m), 1..=(1usize << m)).prop_map(move |codes| {
            let runs = codes.into_iter().map(|c| (0..m).map(|i| (c >> i) & 1).collect()).collect();
            Design::new(m, 2, Coding::PlusMinusOne, runs).unwrap()
        })
    })
}

fn brute_indicator(d: &Design) -> Vec<Rational> {
    // b_a = 2^-m sum_x x^a, evaluated term by term
    let m = d.m();
    let signs = d.signs().unwrap();
    (0..1u64 << m)
        .map(|a| {
            let s: i64 = signs
                .iter()
                .map(|r| (0..m).filter(|i| a >> i & 1 == 1).map(|i| r[i] as i64).product::<i64>())
                .sum();
            Rational::new(s, 1i64 << m)
        })
        .collect()
}

#[test]
fn l8_indicator_is_expanded_product() {
    let names = default_names("x", 7);
    let p = |s: &str| Polynomial::<Rational>::parse(s, &names).unwrap();
    let prod = &(&(&p("1 - x1*x2*x3") * &p("1 - x1*x4*x5")) * &p("1 - x2*x4*x6")) * &p("1 + x1*x2*x4*x7");
    let expected = IndicatorFunction::from_polynomial(&prod.scale(&Rational::new(1, 16))).unwrap();
    let f = indicator_from_design(&fixtures::l8()).unwrap();
    assert_eq!(f, expected);
    assert_eq!(f.constant(), Rational::new(1, 16));
}

// Basic factors a, b, c play x1, x2, x4; y1..y4 play x3, x5, x6, x7.
#[test]
fn l8_from_full_factorial_by_adding_factors() {
    let rels = [
        FactorRelation::new(0, -1, 0b011).unwrap(),
        FactorRelation::new(1, -1, 0b101).unwrap(),
        FactorRelation::new(2, -1, 0b110).unwrap(),
        FactorRelation::new(3, 1, 0b111).unwrap(),
    ];
    let f = indicator_add_factors(&IndicatorFunction::full(3), &rels).unwrap();
    // positions: a b c y1 y2 y3 y4 -> x1 x2 x4 x3 x5 x6 x7
    let renamed = f.to_polynomial().remap(7, &[0, 1, 3, 2, 4, 5, 6]);
    assert_eq!(
        IndicatorFunction::from_polynomial(&renamed).unwrap(),
        indicator_from_design(&fixtures::l8()).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn indicator_invariants_and_round_trip(d in arb_design(7)) {
        let f = indicator_from_design(&d).unwrap();
        let m = d.m();
        prop_assert_eq!(f.constant(), Rational::new(d.n() as i64, 1i64 << m));
        for b in f.coeffs().values() {
            prop_assert!(b.abs() <= f.constant());
        }
        for v in f.values().unwrap() {
            prop_assert!(v.is_zero() || v.is_one());
        }
        let brute = brute_indicator(&d);
        for (a, b) in brute.iter().enumerate() {
            prop_assert_eq!(&f.coeff(a as u64), b);
        }
        let back = design_from_indicator(&f).unwrap();
        prop_assert!(back.same_runs(&d));
    }
}

fn arb_relations(m: usize) -> impl Strategy<Value = Vec<FactorRelation>> {
    proptest::collection::vec((prop::bool::ANY, 1u64..(1 << m)), 0..=3).prop_map(|rs| {
        rs.into_iter()
            .enumerate()
            .map(|(j, (neg, w))| FactorRelation::new(j, if neg { -1 } else { 1 }, w).unwrap())
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn adding_factors_matches_direct(
        (d, rels) in arb_design(6).prop_flat_map(|d| { let m = d.m(); (Just(d), arb_relations(m)) })
    ) {
        let composed = indicator_add_factors(&indicator_from_design(&d).unwrap(), &rels).unwrap();
        let direct = indicator_from_design(&add_factors_to_design(&d, &rels).unwrap()).unwrap();
        prop_assert_eq!(composed, direct);
    }
}

fn arb_words() -> impl Strategy<Value = DefiningWordSet> {
    (2usize..=6).prop_flat_map(|m| {
        proptest::collection::vec((1u64..(1 << m), prop::bool::ANY), 0..m).prop_map(move |ws| {
            let mut kept: Vec<DefiningWord> = Vec::new();
            for (w, neg) in ws {
                let cand: Vec<u64> = kept.iter().map(|k| k.word).chain([w]).collect();
                if gf2_rank(cand.iter().copied()) == cand.len() {
                    kept.push(DefiningWord { word: w, sign: if neg { -1 } else { 1 } });
                }
            }
            DefiningWordSet::new(m, kept).unwrap()
        })
    })
}

fn row_space(m: usize, words: &[DefiningWord]) -> BTreeSet<(u64, i32)> {
    DefiningWordSet::new(m, words.to_vec()).unwrap().group().into_iter().map(|w| (w.word, w.sign)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn regular_fractions_classify_as_regular(ws in arb_words()) {
        let d = regular_design_from_words(&ws).unwrap();
        prop_assert_eq!(d.n(), 1usize << (ws.m - ws.words.len()));
        let c = classify_design(&d).unwrap();
        if ws.words.is_empty() {
            prop_assert_eq!(c.tag, ClassTag::FullFactorial);
        } else {
            prop_assert_eq!(c.tag, ClassTag::Regular);
            prop_assert_eq!(row_space(ws.m, &c.words), row_space(ws.m, &ws.words));
        }
        // product form with f1 = 1 on the full factorial
        let half = Rational::new(1, 2);
        let mut prod = IndicatorFunction::full(ws.m).to_polynomial();
        for w in &ws.words {
            let factor = IndicatorFunction::new(ws.m, [(0, half.clone()), (w.word, half.times(&Rational::from(w.sign)))]).unwrap();
            prod = &prod * &factor.to_polynomial();
        }
        prop_assert_eq!(IndicatorFunction::from_polynomial(&prod).unwrap(), indicator_from_design(&d).unwrap());
    }

    #[test]
    fn subset_witness_contains_design(d in arb_design(5)) {
        let c = classify_design(&d).unwrap();
        match c.tag {
            ClassTag::SubsetFractional => {
                let f = c.containing.expect("witness");
                prop_assert!(d.runs().iter().all(|r| f.contains_run(r)));
                prop_assert!(f.n() > d.n());
            }
            ClassTag::AffinelyFullDimensional => prop_assert!(c.words.is_empty()),
            ClassTag::FullFactorial => prop_assert_eq!(d.n(), 1usize << d.m()),
            ClassTag::Regular => prop_assert_eq!(d.n(), 1usize << (d.m() - c.words.len())),
        }
    }
}
