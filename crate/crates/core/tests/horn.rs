use maltsev_kan_core::horn::{
    check_matching, fill_horn, fill_horn_traced, fill_start, lift_horn, lift_horn_from, verify_lift, Horn, HornError,
    LiftProblem, Phase,
};
use maltsev_kan_core::oracle::{brute_fill, brute_lift, verify_fibration, FibrationOptions, LiftProblemSpace};
use maltsev_kan_core::simplicial::{encode_vector, nerve_scaling_hom, SimplicialHom, TruncatedSimplicialAlgebra};
use maltsev_kan_core::theory::{library, Elem};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn surjective_fixtures() -> Vec<(&'static str, SimplicialHom)> {
    let circle = TruncatedSimplicialAlgebra::circle_free_mod(3, 3);
    let nerve = TruncatedSimplicialAlgebra::nerve_abelian(3, 3);
    let circle2 = TruncatedSimplicialAlgebra::circle_free_mod(2, 3);
    vec![
        ("reduction 4->2", nerve_scaling_hom(4, 2, 3, 1).unwrap()),
        ("reduction 8->4", nerve_scaling_hom(8, 4, 2, 1).unwrap()),
        ("id circle(3,3)", SimplicialHom::identity(&circle)),
        ("id nerve(3,3)", SimplicialHom::identity(&nerve)),
        ("circle(2,3) -> pt", SimplicialHom::terminal(&circle2)),
        ("nerve(5,3) -> pt", SimplicialHom::terminal(&TruncatedSimplicialAlgebra::nerve_abelian(5, 3))),
    ]
}

/// A random problem: faces and `y` read off a random simplex. Every solvable
/// problem arises this way.
fn random_problem(f: &SimplicialHom, rng: &mut ChaCha8Rng) -> (Horn, Elem, Elem) {
    let x = f.source();
    let n = rng.gen_range(1..=x.top());
    let k = rng.gen_range(0..=n);
    let w = rng.gen_range(0..x.level(n).carrier() as Elem);
    (Horn::of_simplex(x, n, k, w).unwrap(), f.apply(n, w), w)
}

#[test]
fn lift_contract_and_invariants_on_every_small_problem() {
    for (name, f) in surjective_fixtures() {
        let top = if name.starts_with("id circle") { 2 } else { f.source().top().min(3) };
        let space = LiftProblemSpace::new(&f, top).unwrap();
        let mut count = 0;
        for (horn, y) in space.problems() {
            let problem = LiftProblem::new(&f, horn, y);
            let lift = lift_horn(&problem, true).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(verify_lift(&problem, lift.x), "{name}: {problem:?}");
            assert!(brute_lift(&problem).contains(&lift.x));
            let trace = lift.trace.unwrap();
            assert_eq!(trace.first().map(|e| (e.j, e.phase)), Some((-1, Phase::Ascending)));
            assert_eq!(trace.last().map(|e| e.w), Some(lift.x));
            assert!(trace.iter().all(|e| f.apply(problem.horn.dimension(), e.w) == y));
            count += 1;
        }
        assert!(count > 0, "{name}");
    }
}

#[test]
fn oracle_agreement_on_random_problems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, f) in surjective_fixtures() {
        for _ in 0..1000 {
            let (horn, y, _) = random_problem(&f, &mut rng);
            let problem = LiftProblem::new(&f, horn, y);
            let lift = lift_horn(&problem, true).unwrap();
            assert!(brute_lift(&problem).binary_search(&lift.x).is_ok(), "{name}: {problem:?}");
        }
    }
}

#[test]
fn fill_agrees_with_lift_to_the_terminal_object() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for x in [
        TruncatedSimplicialAlgebra::nerve_abelian(4, 3),
        TruncatedSimplicialAlgebra::circle_free_mod(3, 3),
        TruncatedSimplicialAlgebra::constant(&library::cyclic_subtraction(3), 3),
    ] {
        let f = SimplicialHom::terminal(&x);
        for _ in 0..300 {
            let (horn, _, _) = random_problem(&f, &mut rng);
            let filled = fill_horn(&x, &horn).unwrap();
            let problem = LiftProblem::new(&f, horn.clone(), 0);
            let lifted = lift_horn_from(&problem, fill_start(&x, &horn), false).unwrap();
            assert_eq!(filled, lifted.x);
            assert!(brute_fill(&x, &horn).unwrap().contains(&filled));
        }
    }
}

#[test]
fn traced_fill_checks_face_invariants() {
    let x = TruncatedSimplicialAlgebra::circle_free_mod(2, 3);
    for n in 1..=3 {
        for k in 0..=n {
            for w in 0..x.level(n).carrier() as Elem {
                let horn = Horn::of_simplex(&x, n, k, w).unwrap();
                let lift = fill_horn_traced(&x, &horn).unwrap();
                let trace = lift.trace.unwrap();
                let turnarounds = trace.iter().filter(|e| e.phase == Phase::Turnaround).count();
                assert_eq!(turnarounds, 1);
                assert_eq!(trace.len(), n + 2);
            }
        }
    }
}

#[test]
fn negative_soundness_for_doubling() {
    let f = nerve_scaling_hom(2, 4, 2, 2).unwrap();
    let space = LiftProblemSpace::new(&f, 2).unwrap();
    let mut empties = 0;
    for (horn, y) in space.problems() {
        let problem = LiftProblem::new(&f, horn, y);
        if brute_lift(&problem).is_empty() {
            empties += 1;
            for x in 0..f.source().level(problem.horn.dimension()).carrier() as Elem {
                assert!(!verify_lift(&problem, x));
            }
            assert!(lift_horn(&problem, false).is_err());
        }
    }
    assert!(empties > 0);
    let report = verify_fibration(&f, 2, FibrationOptions::default()).unwrap();
    assert_eq!(report.failures.len(), empties);
}

#[test]
fn spoiled_horns_are_rejected() {
    let x = TruncatedSimplicialAlgebra::nerve_abelian(2, 3);
    let w = encode_vector(2, &[1, 0, 1]);
    let horn = Horn::of_simplex(&x, 3, 0, w).unwrap();
    assert!(check_matching(&x, &horn).unwrap().ok);
    // swap x_3 for a face with a different d_1
    let faces: Vec<(usize, Elem)> = horn.faces().collect();
    let replaced =
        faces.iter().map(
            |&(i, xi)| if i == 3 { (i, (0..4).find(|&c| x.d(2, 1, c) != x.d(2, 1, xi)).unwrap()) } else { (i, xi) },
        );
    let bad = Horn::new(3, 0, replaced).unwrap();
    let report = check_matching(&x, &bad).unwrap();
    assert!(!report.ok);
    assert_eq!(report.violation.map(|(_, j)| j), Some(3));
    assert!(matches!(fill_horn(&x, &bad), Err(HornError::MatchingViolation { j: 3, .. })));
}

#[test]
fn semilattice_is_kan_without_a_term() {
    let x = TruncatedSimplicialAlgebra::constant(&library::meet_semilattice(), 2);
    let report = verify_fibration(&SimplicialHom::identity(&x), 2, FibrationOptions::default()).unwrap();
    assert!(report.failures.is_empty());
    let horn = Horn::of_simplex(&x, 2, 1, 1).unwrap();
    assert_eq!(fill_horn(&x, &horn), Err(HornError::MissingMaltsevTerm { n: 2 }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn degenerate_horns_refill(m in 2usize..5, n in 1usize..4, k in 0usize..4, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let x = TruncatedSimplicialAlgebra::circle_free_mod(m, 3);
        let w = (seed % x.level(n).carrier() as u64) as Elem;
        let horn = Horn::of_simplex(&x, n, k, w).unwrap();
        let filler = fill_horn(&x, &horn).unwrap();
        for (i, xi) in horn.faces() {
            prop_assert_eq!(x.d(n, i, filler), xi);
        }
    }

    #[test]
    fn any_start_over_y_gives_a_lift(seed in any::<u64>()) {
        let f = nerve_scaling_hom(4, 2, 3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (horn, y, _) = random_problem(&f, &mut rng);
        let n = horn.dimension();
        let fiber = f.fiber(n, y);
        let start = fiber[rng.gen_range(0..fiber.len())];
        let problem = LiftProblem::new(&f, horn, y);
        let lift = lift_horn_from(&problem, start, true).unwrap();
        prop_assert!(verify_lift(&problem, lift.x));
    }
}
