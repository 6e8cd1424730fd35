use super::*;
use crate::algebra::fixtures::*;
use crate::algebra::{generate_closure, FiniteSemigroup, StateSpace, Transformation};
use crate::measures::build_product_chain;
use crate::rational::ratio;

fn idx(sg: &FiniteSemigroup, img: &[usize]) -> usize {
    sg.index_of(&Transformation::from_one_based(img).unwrap()).unwrap()
}

fn typical_noise(action: &Action, p: Rational) -> NoiseSpec {
    let sg = action.semigroup();
    let q = one() - &p;
    NoiseSpec::iid(
        ProbMeasure::from_pairs(
            Carrier::Elements(sg.size()),
            &[(idx(sg, &[2, 1, 2]), p), (idx(sg, &[3, 3, 1]), q)],
        )
        .unwrap(),
    )
    .unwrap()
}

fn cyclic(n: usize) -> Action {
    Action::regular(FiniteSemigroup::cyclic(n).unwrap()).unwrap()
}

fn cyclic_noise(n: usize, pairs: &[(usize, Rational)]) -> NoiseSpec {
    NoiseSpec::iid(ProbMeasure::from_pairs(Carrier::Elements(n), pairs).unwrap()).unwrap()
}

fn closed_form(p: &Rational) -> Vec<Rational> {
    let q = one() - p;
    let pq = p * &q;
    let d = Rational::from_integer(2.into()) + &pq;
    vec![(one() - &pq) / &d, (p + &pq) / &d, (&q + &pq) / &d]
}

#[test]
fn typical_stationary_law() {
    let act = typical_action();
    for p in [ratio(1, 2), ratio(1, 3), ratio(1, 5)] {
        let mu = typical_noise(&act, p.clone()).tail().clone();
        let u = stationary_law(&mu, &act).unwrap();
        assert_eq!(u.weights(), closed_form(&p).as_slice());
        assert_eq!(crate::measures::act(&mu, &u, &act).unwrap(), u);
    }
    let mu = typical_noise(&act, ratio(1, 3)).tail().clone();
    assert_eq!(
        stationary_law(&mu, &act).unwrap().weights(),
        &[ratio(7, 20), ratio(1, 4), ratio(2, 5)]
    );
}

#[test]
fn identity_noise_has_many_stationary_laws() {
    let act = typical_action();
    let t3 = Action::natural(
        StateSpace::numbered(3).unwrap(),
        FiniteSemigroup::full_transformation_monoid(3).unwrap(),
    )
    .unwrap();
    let e = t3.semigroup().identity().unwrap();
    let mu = ProbMeasure::point(Carrier::Elements(27), e);
    match stationary_law(&mu, &t3) {
        Err(Error::Multiplicity { classes }) => assert_eq!(classes.len(), 3),
        other => panic!("{other:?}"),
    }
    let _ = act;
}

#[test]
fn typical_has_single_extremal() {
    let act = typical_action();
    let exts = extremal_solutions(&typical_noise(&act, ratio(1, 2)), &act, &SolverOptions::default()).unwrap();
    assert_eq!(exts.len(), 1);
    let u = ProbMeasure::uniform(Carrier::States(3));
    for k in 0..20 {
        assert_eq!(exts[0].1.at(-k), &u);
    }
    let FamilyOrigin::Extremal { base_points } = &exts[0].1.origin else {
        panic!()
    };
    assert_eq!(base_points, &vec![0, 1, 2]);

    let p = ratio(1, 5);
    let exts = extremal_solutions(&typical_noise(&act, p.clone()), &act, &SolverOptions::default()).unwrap();
    assert_eq!(exts.len(), 1);
    assert_eq!(exts[0].1.at(0).weights(), closed_form(&p).as_slice());
}

#[test]
fn identity_noise_gives_point_families() {
    let space = StateSpace::numbered(3).unwrap();
    let sg = generate_closure(&space, &[Transformation::identity(3)]).unwrap();
    let act = Action::natural(space, sg).unwrap();
    let noise = NoiseSpec::iid(ProbMeasure::point(Carrier::Elements(1), 0)).unwrap();
    let exts = extremal_solutions(&noise, &act, &SolverOptions::default()).unwrap();
    assert_eq!(exts.len(), 3);
    for (x, f) in &exts {
        assert_eq!(f.at(-5), &ProbMeasure::point(Carrier::States(3), *x));
    }
}

#[test]
fn mixture_candidates_are_pruned() {
    let space = StateSpace::numbered(3).unwrap();
    let a = Transformation::from_one_based(&[1, 2, 1]).unwrap();
    let b = Transformation::from_one_based(&[1, 2, 2]).unwrap();
    let sg = generate_closure(&space, &[a.clone(), b.clone()]).unwrap();
    let act = Action::natural(space, sg.clone()).unwrap();
    let mu = ProbMeasure::from_pairs(
        Carrier::Elements(sg.size()),
        &[(sg.index_of(&a).unwrap(), ratio(1, 2)), (sg.index_of(&b).unwrap(), ratio(1, 2))],
    )
    .unwrap();
    let exts = extremal_solutions(&NoiseSpec::iid(mu).unwrap(), &act, &SolverOptions::default()).unwrap();
    let xs: Vec<usize> = exts.iter().map(|(x, _)| *x).collect();
    assert_eq!(xs, vec![0, 1]);
}

#[test]
fn rotation_needs_phase_families() {
    let act = cyclic(4);
    let noise = cyclic_noise(4, &[(1, one())]);
    assert!(matches!(
        extremal_solutions(&noise, &act, &SolverOptions::default()),
        Err(Error::Unsupported(_))
    ));
    let limits = limit_analysis(&noise, &act, &LimitOptions::default()).unwrap();
    let fams = solution_families(&noise, &act, &limits, 8).unwrap();
    assert_eq!(fams.len(), 4);
    assert!(fams.iter().all(|f| !f.certified_extremal));
    assert_eq!(translate_orbit_check(&act, &fams), Some(true));
    let bary = translate_barycenter(&act, &fams[0]).unwrap();
    let uniform = uniform_solution(&act, &noise, 8).unwrap();
    assert!(bary.same_laws(&uniform));
    let parts: Vec<(Rational, &SolutionLawFamily)> = fams.iter().map(|f| (ratio(1, 4), f)).collect();
    let mix = SolutionLawFamily::mixture(&parts, FamilyOrigin::Mixture { weights: Vec::new() }).unwrap();
    assert!(mix.same_laws(&uniform));
}

#[test]
fn translate_check_skips_non_groups() {
    let act = typical_action();
    let exts = extremal_solutions(&typical_noise(&act, ratio(1, 2)), &act, &SolverOptions::default()).unwrap();
    let fams: Vec<SolutionLawFamily> = exts.into_iter().map(|(_, f)| f).collect();
    assert_eq!(translate_orbit_check(&act, &fams), None);
    assert!(uniform_solution(&act, &typical_noise(&act, ratio(1, 2)), 8).is_err());
}

#[test]
fn uniform_solution_on_symmetric_group() {
    let act = Action::regular(FiniteSemigroup::symmetric(3).unwrap()).unwrap();
    let noise = NoiseSpec::iid(ProbMeasure::point(Carrier::Elements(6), 1)).unwrap();
    let f = uniform_solution(&act, &noise, 4).unwrap();
    assert_eq!(f.at(-100), &ProbMeasure::uniform(Carrier::States(6)));
}

#[test]
fn classify_typical() {
    let act = typical_action();
    for p in [ratio(1, 2), ratio(1, 3)] {
        let rep = classify(&typical_noise(&act, p), &act, &SolverOptions::default()).unwrap();
        assert!(rep.p1);
        assert!(rep.pathwise_unique);
        assert!(rep.unique_in_law);
        assert_eq!(rep.all_extremal_strong, Some(true));
        let cites = rep.citations();
        assert!(cites.contains(&"Thm 4.6"));
        assert!(cites.contains(&"Thm 5.1(ii),(iv)"));
    }
}

#[test]
fn classify_identity_on_z2() {
    let act = cyclic(2);
    let rep = classify(&cyclic_noise(2, &[(0, one())]), &act, &SolverOptions::default()).unwrap();
    assert!(rep.p1);
    assert!(!rep.unique_in_law);
    assert!(!rep.pathwise_unique);
    assert_eq!(rep.all_extremal_strong, Some(true));
    assert_eq!(rep.extremals.len(), 2);
    assert!(rep.citations().contains(&"Thm 4.4"));
}

#[test]
fn classify_uniform_on_z2() {
    let act = cyclic(2);
    let rep = classify(
        &cyclic_noise(2, &[(0, ratio(1, 2)), (1, ratio(1, 2))]),
        &act,
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(!rep.p1);
    assert_eq!(rep.p2.as_ref().unwrap().members, vec![0, 1]);
    assert_eq!(rep.all_extremal_strong, Some(false));
    assert!(rep.unique_in_law);
    assert!(!rep.pathwise_unique);
    assert_eq!(rep.trichotomy, Some(Trichotomy::C1));
}

#[test]
fn classify_rotation_abstains() {
    let act = cyclic(3);
    let rep = classify(&cyclic_noise(3, &[(1, one())]), &act, &SolverOptions::default()).unwrap();
    assert!(!rep.extremals_certified);
    assert_eq!(rep.all_extremal_strong, None);
    assert!(!rep.unique_in_law);
    assert_eq!(rep.trichotomy, Some(Trichotomy::C2));
    assert!(rep.notes.contains(&Note::OutsideSufficientConditions));
}

#[test]
fn witness_on_uniform_z2_is_half() {
    let act = cyclic(2);
    let noise = cyclic_noise(2, &[(0, ratio(1, 2)), (1, ratio(1, 2))]);
    let f = uniform_solution(&act, &noise, 8).unwrap();
    for depth in [1, 5, 20] {
        let w = strongness_witness(&noise, &f, &act, depth, DEFAULT_BUDGET).unwrap();
        assert_eq!(w.residual, ratio(1, 2));
        assert!(!w.verdict_hint);
    }
}

#[test]
fn witness_on_constant_noise_is_zero() {
    let act = typical_action();
    let sg = act.semigroup();
    let noise = NoiseSpec::iid(ProbMeasure::point(Carrier::Elements(7), idx(sg, &[2, 2, 2]))).unwrap();
    let exts = extremal_solutions(&noise, &act, &SolverOptions::default()).unwrap();
    let w = strongness_witness(&noise, &exts[0].1, &act, 1, DEFAULT_BUDGET).unwrap();
    assert_eq!(w.residual, zero());
}

#[test]
fn witness_bounded_by_stopping_tail() {
    let act = typical_action();
    let noise = typical_noise(&act, ratio(1, 2));
    let exts = extremal_solutions(&noise, &act, &SolverOptions::default()).unwrap();
    let pc = build_product_chain(&noise, act.semigroup()).unwrap();
    let w = strongness_witness(&noise, &exts[0].1, &act, 16, DEFAULT_BUDGET).unwrap();
    let tail = pc.stopping_tail(16);
    assert!(w.residual <= tail);
    assert!(w.residual <= w.previous);
    assert!(tail > zero());
}

#[test]
fn witness_budget() {
    let act = typical_action();
    let noise = typical_noise(&act, ratio(1, 2));
    let exts = extremal_solutions(&noise, &act, &SolverOptions::default()).unwrap();
    assert!(matches!(
        strongness_witness(&noise, &exts[0].1, &act, 1000, 100),
        Err(Error::Capacity { .. })
    ));
}

#[test]
fn uniform_solution_is_independent_of_noise_window() {
    let act = cyclic(2);
    let noise = cyclic_noise(2, &[(0, ratio(1, 2)), (1, ratio(1, 2))]);
    let f = uniform_solution(&act, &noise, 8).unwrap();
    let joint = window_joint_law(&noise, &f, &act, 8, DEFAULT_BUDGET).unwrap();
    assert_eq!(joint.len(), 2 * 256);
    assert!(factorizes(&joint));
}

#[test]
fn typical_solution_depends_on_noise() {
    let act = typical_action();
    let noise = typical_noise(&act, ratio(1, 2));
    let exts = extremal_solutions(&noise, &act, &SolverOptions::default()).unwrap();
    let joint = window_joint_law(&noise, &exts[0].1, &act, 3, DEFAULT_BUDGET).unwrap();
    assert!(!factorizes(&joint));
}

#[test]
fn prefix_families_solve_equation() {
    let act = typical_action();
    let sg = act.semigroup();
    let tail = typical_noise(&act, ratio(1, 3)).tail().clone();
    let prefix = vec![
        ProbMeasure::point(Carrier::Elements(7), idx(sg, &[2, 1, 2])),
        ProbMeasure::uniform(Carrier::Elements(7)),
    ];
    let noise = NoiseSpec::new(prefix, tail).unwrap();
    let rep = classify(&noise, &act, &SolverOptions { window: 1, ..Default::default() }).unwrap();
    for (_, f) in &rep.extremals {
        assert!(f.satisfies_equation(&noise, &act).unwrap());
    }
    assert!(rep.pathwise_unique);
}
