use maltsev_kan_core::theory::{
    check_maltsev_axioms, eval_term, is_homomorphism, library, Elem, FiniteAlgebra, MaltsevAxiom, Signature, Term,
};
use proptest::prelude::*;

fn binary(m: usize, table: Vec<Elem>) -> FiniteAlgebra {
    let table = table.into_iter().map(|v| v % m as Elem).collect();
    FiniteAlgebra::new("b", Signature::new([("f", 2)]).unwrap(), m, vec![table]).unwrap()
}

fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = (0usize..3).prop_map(Term::var);
    leaf.prop_recursive(4, 24, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| Term::app("f", vec![a, b])))
}

#[test]
fn semilattice_counterexample_follows_the_ordering_rule() {
    let alg = library::meet_semilattice();
    let t = Term::parse("(meet (meet v0 v1) v2)").unwrap();
    let report = check_maltsev_axioms(&alg, &t).unwrap();
    assert!(!report.holds);
    let c = report.counterexample.unwrap();
    assert_eq!((c.a, c.b, c.axiom), (0, 1, MaltsevAxiom::First));
    // the pair (1,0) fails the second axiom as well
    assert_eq!(eval_term(&alg, &t, &[1, 0, 0]).unwrap(), 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projections_return_their_argument(m in 1usize..5, env in prop::collection::vec(0u32..4, 1..6), i in 0usize..6) {
        prop_assume!(i < env.len());
        let env: Vec<Elem> = env.into_iter().map(|v| v % m as Elem).collect();
        let alg = library::cyclic_group(m);
        prop_assert_eq!(eval_term(&alg, &Term::var(i), &env).unwrap(), env[i]);
    }

    #[test]
    fn maltsev_terms_are_idempotent(table in prop::collection::vec(0u32..3, 9), t in term_strategy()) {
        let alg = binary(3, table);
        if check_maltsev_axioms(&alg, &t).unwrap().holds {
            for a in 0..3 {
                prop_assert_eq!(eval_term(&alg, &t, &[a, a, a]).unwrap(), a);
            }
        }
    }

    #[test]
    fn group_term_is_maltsev_on_cyclic_groups(m in 1usize..12) {
        let alg = library::cyclic_group(m);
        prop_assert!(check_maltsev_axioms(&alg, &Term::group_maltsev("+", "neg")).unwrap().holds);
    }

    #[test]
    fn homomorphisms_compose(
        m in 1usize..4,
        tables in prop::collection::vec(prop::collection::vec(0u32..3, 9), 3),
        g in prop::collection::vec(0u32..3, 3),
        h in prop::collection::vec(0u32..3, 3),
    ) {
        let [a, b, c] = [0, 1, 2].map(|i| binary(m, tables[i][..m * m].to_vec()));
        let g: Vec<Elem> = g[..m].iter().map(|v| v % m as Elem).collect();
        let h: Vec<Elem> = h[..m].iter().map(|v| v % m as Elem).collect();
        let gh: Vec<Elem> = g.iter().map(|&x| h[x as usize]).collect();
        prop_assert!(is_homomorphism(&a, &a, &(0..m as Elem).collect::<Vec<_>>()).unwrap().holds);
        if is_homomorphism(&a, &b, &g).unwrap().holds && is_homomorphism(&b, &c, &h).unwrap().holds {
            prop_assert!(is_homomorphism(&a, &c, &gh).unwrap().holds);
        }
    }

    #[test]
    fn terms_round_trip_through_text(t in term_strategy()) {
        let text = t.to_string();
        prop_assert_eq!(Term::parse(&text).unwrap(), t);
    }
}
