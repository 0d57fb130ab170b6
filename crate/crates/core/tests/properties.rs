mod common;

use num_traits::Zero;
use proptest::prelude::*;
use stl_distance::aos::{aos, slice, AosConfig, BoxExpr};
use stl_distance::ingest::{normalize, normalize_formula};
use stl_distance::oracle::{brute_directed_ph, language};
use stl_distance::ph::{directed_ph, ph_boxsets, BoxDistanceMode, PhConfig};
use stl_distance::sd::{sd, Normalizer};
use stl_distance::{delay, relax, robustness, to_nnf, Cmp, Domain, Error, Formula, Interval, Rational, Robustness, Trace};

use common::{arb_formula, arb_trace, q};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 200, max_global_rejects: 100_000, failure_persistence: None, ..ProptestConfig::default() }
}

/// Conjunctions of bands `G[a,b](lo <= x1 <= hi)` with `a < b`.
fn arb_band_conjunction(max_t: usize) -> impl Strategy<Value = Formula<Rational>> {
    let band = (0..max_t, 1..=max_t, 0i64..=8, 0i64..=8).prop_map(move |(a, len, lo, hi)| {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        Formula::globally(
            Interval::new(a, (a + len).min(max_t)).unwrap(),
            Formula::and(
                Formula::pred(0, Cmp::Ge, Rational::from_ratio(lo, 8)),
                Formula::pred(0, Cmp::Le, Rational::from_ratio(hi, 8)),
            ),
        )
    });
    prop::collection::vec(band, 1..4).prop_map(Formula::and_all)
}

fn aos_or_skip(f: &Formula<Rational>, cfg: &AosConfig<Rational>) -> Result<BoxExpr<Rational>, TestCaseError> {
    match aos(f, cfg) {
        Ok(b) => Ok(b),
        Err(Error::BudgetExceeded { .. }) => Err(TestCaseError::reject("resolution budget")),
        Err(e) => Err(TestCaseError::fail(e.to_string())),
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn relaxing_shifts_robustness(f in arb_formula(3, 6, false, true), s in arb_trace(7), k in 0i64..=50) {
        let eps = Rational::from_ratio(k, 100);
        let relaxed = relax(&f, &eps).unwrap();
        prop_assert_eq!(robustness(&s, &relaxed, 0).unwrap(), robustness(&s, &f, 0).unwrap().shift(&eps));
    }

    #[test]
    fn negation_normal_form_keeps_robustness(f in arb_formula(3, 5, true, true), s in arb_trace(6)) {
        prop_assert_eq!(robustness(&s, &to_nnf(&f), 0).unwrap(), robustness(&s, &f, 0).unwrap());
    }

    #[test]
    fn delay_moves_evaluation_time(f in arb_formula(3, 4, true, false), s in arb_trace(8), k in 0usize..=3) {
        prop_assert_eq!(robustness(&s, &delay(&f, k), 0).unwrap(), robustness(&s, &f, k).unwrap());
    }

    #[test]
    fn sd_is_symmetric_and_reflexive(f in arb_formula(3, 6, false, false), g in arb_formula(3, 6, false, false)) {
        let cfg = AosConfig::unit(1, 6);
        let (bf, bg) = (aos_or_skip(&f, &cfg)?, aos_or_skip(&g, &cfg)?);
        let h = cfg.horizon.clone();
        let fg = stl_distance::sd::sd_boxsets(&bf, &bg, 1, &h, Normalizer::Horizon).unwrap().distance;
        let gf = stl_distance::sd::sd_boxsets(&bg, &bf, 1, &h, Normalizer::Horizon).unwrap().distance;
        prop_assert_eq!(fg, gf);
        prop_assert!(stl_distance::sd::sd_boxsets(&bf, &bf, 1, &h, Normalizer::Horizon).unwrap().distance.is_zero());
    }

    #[test]
    fn box_hausdorff_is_symmetric(f in arb_band_conjunction(6), g in arb_band_conjunction(6)) {
        let cfg = AosConfig::unit(1, 6);
        let (bf, bg) = (aos(&f, &cfg).unwrap(), aos(&g, &cfg).unwrap());
        for mode in [BoxDistanceMode::Slice, BoxDistanceMode::Normalized] {
            let fg = ph_boxsets(&bf, &bg, 1, &cfg.horizon, mode);
            let gf = ph_boxsets(&bg, &bf, 1, &cfg.horizon, mode);
            match (fg, gf) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(Error::EmptyLanguage(_)), Err(Error::EmptyLanguage(_))) => {}
                (a, b) => prop_assert!(false, "{:?} against {:?}", a, b),
            }
        }
    }

    #[test]
    fn commuted_conjunctions_have_zero_sd(f in arb_formula(2, 6, false, false), g in arb_formula(2, 6, false, false)) {
        let cfg = AosConfig::unit(1, 6);
        let r = sd(&Formula::and(f.clone(), g.clone()), &Formula::and(g, f), &cfg, Normalizer::Horizon);
        match r {
            Ok(r) => prop_assert!(r.distance.is_zero()),
            Err(Error::BudgetExceeded { .. }) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    /// A trace satisfies a conjunction of bands exactly when every sample
    /// lies in every box covering its time.
    #[test]
    fn band_slices_match_the_monitor(f in arb_band_conjunction(6), s in arb_trace(7)) {
        let cfg = AosConfig::unit(1, 6);
        let BoxExpr::Leaf(boxes) = aos(&f, &cfg).unwrap() else {
            return Err(TestCaseError::fail("band conjunctions have no choices"));
        };
        let monitor = robustness(&s, &f, 0).unwrap().satisfied();
        let inside = (0..=6).all(|t| {
            let at = Rational::from_integer(t as i64);
            boxes.iter().filter(|b| b.lt <= at && at <= b.ut).all(|b| {
                let (lo, hi) = b.range(0);
                lo <= s.at(t)[0] && s.at(t)[0] <= hi
            })
        });
        if monitor {
            for t in 0..=6 {
                let at = Rational::from_integer(t as i64);
                prop_assert!(slice(&boxes, &at, &at, 1).iter().any(|r| r.contains_point(s.at(t))));
            }
        }
        prop_assert_eq!(monitor, inside && !boxes.is_empty(), "{} boxes {:?}", f, boxes);
    }

    #[test]
    fn milp_matches_brute_force(f in arb_formula(2, 2, true, true), g in arb_formula(2, 2, true, true)) {
        let domain = Domain::unit(1);
        let (lf, lg) = (language(&f, &domain, 2).unwrap(), language(&g, &domain, 2).unwrap());
        prop_assume!(!lf.is_empty() && !lg.is_empty());
        let milp = directed_ph(&f, &g, &domain, 2, &PhConfig::default()).unwrap().value;
        prop_assert_eq!(milp, brute_directed_ph(&lf, &lg).unwrap(), "{} to {}", f, g);
    }

    #[test]
    fn normalization_scales_robustness(f in arb_formula(3, 4, false, false), ks in prop::collection::vec(0i64..=40, 5), m in 1i64..=8) {
        let x_max = Rational::from_integer(m);
        let raw = Trace::new(
            ks.iter().map(|k| vec![Rational::from_ratio(k * m, 40)]).collect(),
            Domain::new(vec![(Rational::zero(), x_max.clone())]).unwrap(),
        ).unwrap();
        let scaled_f = f.map_predicates(&|p| stl_distance::Predicate::new(p.dim, p.cmp, p.threshold.clone() * x_max.clone()));
        let back = normalize_formula(&scaled_f, std::slice::from_ref(&x_max)).unwrap();
        prop_assert_eq!(&back, &f);
        let unit = normalize(&raw, std::slice::from_ref(&x_max)).unwrap();
        let expected = match robustness(&raw, &scaled_f, 0).unwrap() {
            Robustness::Finite(v) => Robustness::Finite(v / x_max.clone()),
            other => other,
        };
        prop_assert_eq!(robustness(&unit, &f, 0).unwrap(), expected);
    }
}

#[test]
fn example_relaxation_value() {
    let f = Formula::globally(Interval::new(0, 2).unwrap(), Formula::pred(0, Cmp::Le, q("0.4")));
    let s = Trace::scalar([q("0.5"), q("0.3"), q("0.2")]).unwrap();
    assert_eq!(robustness(&s, &f, 0).unwrap(), Robustness::Finite(q("-0.1")));
    assert!(robustness(&s, &relax(&f, &q("0.1")).unwrap(), 0).unwrap().satisfied());
}
