mod common;

use proptest::prelude::*;
use stl_distance::milp::{
    build_feasibility_program, build_ph_program, check_big_m, export_lp, parse_lp, solve, Encoding, MilpModel,
    NodeOrder, Relation, Sense, SolverConfig, Status, VarId,
};
use stl_distance::{robustness, Domain, Formula, Rational};

use common::{arb_formula, arb_trace, corpus, q};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 200, max_global_rejects: 100_000, failure_persistence: None, ..ProptestConfig::default() }
}

type Row = (Vec<i64>, u8, i64);

/// Pure binary programs with small integer data.
fn arb_binary_model() -> impl Strategy<Value = MilpModel<Rational>> {
    (1usize..=6)
        .prop_flat_map(|n| {
            let row = (prop::collection::vec(-4i64..=4, n), 0u8..3, -6i64..=8);
            (prop::collection::vec(-5i64..=5, n), prop::collection::vec(row, 0..=4), any::<bool>())
        })
        .prop_map(|(objective, rows, maximize): (Vec<i64>, Vec<Row>, bool)| {
            let mut m = MilpModel::new();
            let vars: Vec<VarId> = (0..objective.len()).map(|i| m.add_binary(format!("z{i}"))).collect();
            for (k, (coefs, rel, rhs)) in rows.into_iter().enumerate() {
                let relation = [Relation::Le, Relation::Ge, Relation::Eq][rel as usize];
                let terms = vars.iter().zip(coefs).map(|(v, c)| (*v, Rational::from_integer(c))).collect();
                m.add_constraint(format!("c{k}"), terms, relation, Rational::from_integer(rhs));
            }
            let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
            m.set_objective(sense, vars.iter().zip(objective).map(|(v, c)| (*v, Rational::from_integer(c))).collect());
            m
        })
}

fn enumerate(m: &MilpModel<Rational>) -> Option<Rational> {
    let n = m.variables.len();
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << n) {
        let values: Vec<Rational> = (0..n).map(|i| Rational::from_integer(((mask >> i) & 1) as i64)).collect();
        if !m.is_feasible(&values) {
            continue;
        }
        let value = m.objective_at(&values);
        let better = match (&best, m.sense) {
            (None, _) => true,
            (Some(b), Sense::Maximize) => value > *b,
            (Some(b), Sense::Minimize) => value < *b,
        };
        if better {
            best = Some(value);
        }
    }
    best
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn branch_and_bound_matches_enumeration(m in arb_binary_model()) {
        let expected = enumerate(&m);
        for order in [NodeOrder::BestBound, NodeOrder::DepthFirst] {
            let sol = solve(&m, &SolverConfig { order, ..SolverConfig::default() }).unwrap();
            prop_assert_eq!(&sol.objective, &expected, "{:?}", order);
            if sol.status == Status::Optimal {
                prop_assert!(m.is_feasible(&sol.values));
            }
        }
    }

    #[test]
    fn lp_text_round_trips(m in arb_binary_model()) {
        let text = export_lp(&m);
        let parsed = parse_lp::<Rational>(&text).unwrap();
        prop_assert_eq!(export_lp(&parsed), text);
        prop_assert_eq!(parsed, m);
    }

    /// Pinning the trace variables to a signal leaves a feasible program
    /// exactly when the signal satisfies the formula.
    #[test]
    fn feasibility_agrees_with_the_monitor(f in arb_formula(3, 4, true, true), s in arb_trace(5)) {
        for encoding in [Encoding::Implication, Encoding::Full] {
            let (mut model, x) = build_feasibility_program(&f, &Domain::unit(1), 4, encoding).unwrap();
            for t in 0..=4 {
                let var = &mut model.variables[x.at(t, 0).0];
                var.lower = s.value(t, 0).clone();
                var.upper = s.value(t, 0).clone();
            }
            let feasible = solve(&model, &SolverConfig::default()).unwrap().status == Status::Optimal;
            prop_assert_eq!(feasible, robustness(&s, &f, 0).unwrap().satisfied(), "{} {:?}", f, encoding);
        }
    }
}

#[test]
fn solving_is_deterministic() {
    let c = corpus("example2");
    let (f, g) = (c.formula("phi6").unwrap(), c.formula("phi2").unwrap());
    let program = build_ph_program(f, g, &c.meta.domain, 20, Encoding::Implication).unwrap();
    let first = solve(&program.model, &SolverConfig::default()).unwrap();
    let second = solve(&program.model, &SolverConfig::default()).unwrap();
    assert_eq!(first, second);
}

#[test]
fn big_m_is_valid_for_every_example_pair() {
    let c = corpus("example2");
    for (_, f) in &c.formulas {
        for (_, g) in &c.formulas {
            for encoding in [Encoding::Implication, Encoding::Full] {
                let program = build_ph_program(f, g, &c.meta.domain, 20, encoding).unwrap();
                assert!(check_big_m(&program.model), "{f} / {g}");
            }
        }
    }
}

#[test]
fn full_encoding_binary_counts() {
    let single = Formula::pred(0, stl_distance::Cmp::Le, q("0.5"));
    let (model, _) = build_feasibility_program(&single, &Domain::unit(1), 0, Encoding::Full).unwrap();
    assert_eq!(model.num_binaries(), 1);

    // Two predicates at each of the 21 steps.
    let c = corpus("example2");
    let (model, _) = build_feasibility_program(c.formula("phi2").unwrap(), &c.meta.domain, 20, Encoding::Full).unwrap();
    let predicate_binaries = model.binaries().filter(|v| model.var(*v).name.starts_with('p')).count();
    assert_eq!(predicate_binaries, 42);
}

#[test]
fn directed_programs_of_the_example() {
    let c = corpus("example2");
    let solve_pair = |a: &str, b: &str| {
        let program = build_ph_program(c.formula(a).unwrap(), c.formula(b).unwrap(), &c.meta.domain, 20, Encoding::Implication)
            .unwrap();
        solve(&program.model, &SolverConfig::default()).unwrap().objective
    };
    assert_eq!(solve_pair("phi2", "phi1"), Some(q("0.04")));
    assert_eq!(solve_pair("phi1", "phi2"), Some(q("0")));
    assert_eq!(solve_pair("phi3", "phi4"), Some(q("0.6")));
}
