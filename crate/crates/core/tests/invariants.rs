use csw_core::derivation::Engine;
use csw_core::free_algebra::FreeStarElement;
use csw_core::graph::graph_from_shortcut;
use csw_core::hom_verifier::{verify_action, verify_hom, ActionSpec, Convention, GeneratorMap};
use csw_core::maps::{wreath_coefficients, wreath_phi};
use csw_core::presentations::{h_inf, s_plus, sh_inf, u_plus, wreath_s_plus, Presentation};
use csw_core::rep_finder::{check_representation, separate, Representation, SearchBudget};
use csw_core::scalar::C;
use csw_core::linalg::Matrix;
use proptest::prelude::*;
use std::sync::Arc;

fn builder(i: usize) -> Presentation {
    match i {
        0 => s_plus(2),
        1 => s_plus(3),
        2 => u_plus(2),
        3 => h_inf(2),
        _ => sh_inf(2),
    }
}

fn scalar_pattern(rows: &[&[i64]]) -> Matrix {
    Matrix::from_fn(rows.len(), rows.len(), |i, j| C::int(rows[i][j]))
}

fn e(i: usize, j: usize) -> Matrix {
    Matrix::from_fn(2, 2, |r, c| if (r, c) == (i, j) { C::one() } else { C::zero() })
}

fn wreath_rep() -> Representation {
    let x = scalar_pattern(&[&[0, 1], &[1, 0]]);
    let z = scalar_pattern(&[&[1, 0], &[0, -1]]);
    let u1 = Representation::tensor_pattern("R x X", "u1", &csw_core::rep_finder::rotation(3, 4, 5), &x);
    let u2 = Representation::tensor_pattern("P x Z", "u2", &x, &z);
    let t = Representation::tensor_pattern("swap", "t", &x, &Matrix::identity(2));
    u1.merge(&u2, "copies").unwrap().merge(&t, "wreath").unwrap()
}

/// A presentation together with a representation of it.
fn model(i: usize) -> (Presentation, Representation) {
    match i {
        0 => (u_plus(2), Representation::rotation_u_plus_2()),
        1 => (sh_inf(2), Representation::from_blocks("E12 pattern", "u", &[vec![e(0, 1), e(1, 0)], vec![e(1, 0), e(0, 1)]])),
        _ => (wreath_s_plus(&u_plus(2), 2).unwrap(), wreath_rep()),
    }
}

/// A monomial in the generators and their adjoints, chosen by index.
fn monomial(p: &Presentation, picks: &[(usize, bool)]) -> FreeStarElement {
    let gens = p.generators();
    picks.iter().fold(FreeStarElement::one(), |acc, &(g, star)| {
        let s = gens[g % gens.len()].clone();
        acc.mul(&FreeStarElement::sym(if star { s.adjoint() } else { s }))
    })
}

type Summand = (usize, Vec<(usize, bool)>, Vec<(usize, bool)>, i64);

fn summands() -> impl Strategy<Value = Vec<Summand>> {
    let side = || prop::collection::vec((0usize..32, any::<bool>()), 0..2);
    prop::collection::vec((0usize..64, side(), side(), -3i64..4), 1..3)
}

fn ideal_element(p: &Presentation, s: &[Summand]) -> FreeStarElement {
    s.iter().fold(FreeStarElement::zero(), |acc, (r, a, b, c)| {
        let rel = &p.relations[r % p.relations.len()].element;
        acc.add(&monomial(p, a).mul(rel).mul(&monomial(p, b)).scale(&C::int(*c)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn identity_is_a_hom(i in 0usize..5) {
        let p = builder(i);
        let d = p.relations.iter().map(|r| r.element.degree()).max().unwrap();
        prop_assert!(verify_hom(&p, &p, &GeneratorMap::identity(&p), d).unwrap().passed());
    }

    #[test]
    fn derivable_elements_vanish_in_representations(i in 0usize..3, s in summands()) {
        let (p, rep) = model(i);
        prop_assert!(check_representation(&p, &rep).unwrap().passed);
        let x = ideal_element(&p, &s);
        prop_assert!(rep.evaluate(&x).unwrap().is_zero());
        let mut engine = Engine::new(&p, x.degree().max(2)).unwrap();
        prop_assert!(engine.check(&x).unwrap().derivable(), "{} not derived", x);
    }

    #[test]
    fn derivability_is_monotone_in_the_degree(i in 0usize..3, s in summands(), extra in 0usize..3) {
        let (p, _) = model(i);
        let x = ideal_element(&p, &s).add(&monomial(&p, &[(extra, false)]));
        let d = x.degree().max(2);
        let low = Engine::new(&p, d).unwrap().check(&x).unwrap().derivable();
        let high = Engine::new(&p, d + 2).unwrap().check(&x).unwrap().derivable();
        prop_assert!(!low || high);
    }

    #[test]
    fn row_convention_is_the_transpose(level in 1usize..3) {
        let g = Arc::new(graph_from_shortcut("L2+L2").unwrap());
        let w = wreath_s_plus(&u_plus(2), 2).unwrap();
        let m = wreath_coefficients(2, 2);
        let t: Vec<Vec<FreeStarElement>> = (0..m.len()).map(|e| (0..m.len()).map(|f| m[f][e].clone()).collect()).collect();
        let col = verify_action(&ActionSpec::new(g.clone(), m, Convention::Column).unwrap(), &w, 8, level).unwrap();
        let row = verify_action(&ActionSpec::new(g, t, Convention::Row).unwrap(), &w, 8, level).unwrap();
        prop_assert!(col.passed());
        prop_assert_eq!(col, row);
    }

}

#[test]
fn separation_is_deterministic() {
    let (a, b) = (sh_inf(2), h_inf(2));
    let map = GeneratorMap::identity(&b);
    for seed in 0..4 {
        let budget = SearchBudget { max_dim: 2, seed, ..Default::default() };
        let first = separate(&a, &b, &map, budget.clone()).expect("witness within dimension 2");
        assert!(check_representation(&a, &first.representation).unwrap().passed);
        assert_eq!(first, separate(&a, &b, &map, budget).unwrap());
    }
}

#[test]
fn wreath_representation_pulls_back() {
    let (w, rep) = model(2);
    assert!(check_representation(&w, &rep).unwrap().passed);
    let ext = csw_core::derivation::script::bundled("thm41").unwrap();
    let p = ext.presentation().unwrap();
    let back = rep.pullback(&wreath_phi(2, 2), "pullback").unwrap();
    assert!(check_representation(&p, &back).unwrap().passed);
}
