#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use stl_distance::ingest::{load_corpus, Corpus};
use stl_distance::{Cmp, Domain, Formula, Interval, Rational, Scalar, Trace};

pub fn corpus_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpora").join(name)
}

pub fn corpus(name: &str) -> Corpus<Rational> {
    load_corpus(corpus_dir(name)).expect("bundled corpus loads")
}

pub fn q(text: &str) -> Rational {
    Rational::parse_decimal(text).expect("decimal literal")
}

pub const GRID: [&str; 5] = ["0", "0.25", "0.5", "0.75", "1"];

pub fn atoms() -> Vec<Formula<Rational>> {
    let mut out = vec![Formula::True];
    for c in GRID {
        out.push(Formula::pred(0, Cmp::Le, q(c)));
        out.push(Formula::pred(0, Cmp::Ge, q(c)));
    }
    out
}

pub fn intervals(max: usize) -> Vec<Interval> {
    (0..=max).flat_map(|a| (a..=max).map(move |b| Interval::new(a, b).unwrap())).collect()
}

/// Every formula of depth at most two over the grid atoms with horizon at
/// most `max_t`.
pub fn depth_two(max_t: usize) -> Vec<Formula<Rational>> {
    let atoms = atoms();
    let mut out = atoms.clone();
    for a in &atoms {
        out.push(Formula::not(a.clone()));
        for i in intervals(max_t) {
            out.push(Formula::eventually(i, a.clone()));
            out.push(Formula::globally(i, a.clone()));
        }
        for b in &atoms {
            out.push(Formula::and(a.clone(), b.clone()));
            out.push(Formula::or(a.clone(), b.clone()));
            for i in intervals(max_t) {
                out.push(Formula::until(a.clone(), i, b.clone()));
            }
        }
    }
    out
}

fn arb_atom(thresholds: &'static [&'static str]) -> BoxedStrategy<Formula<Rational>> {
    prop_oneof![
        1 => Just(Formula::True),
        6 => (prop::sample::select(thresholds), any::<bool>())
            .prop_map(|(c, le)| Formula::pred(0, if le { Cmp::Le } else { Cmp::Ge }, q(c))),
    ]
    .boxed()
}

fn arb_interval(max_t: usize) -> impl Strategy<Value = Interval> {
    (0..=max_t, 0..=max_t).prop_map(|(a, b)| Interval::new(a.min(b), a.max(b)).unwrap())
}

/// Formulae of depth at most `depth` over one signal.
pub fn arb_formula(depth: usize, max_t: usize, negation: bool, until: bool) -> BoxedStrategy<Formula<Rational>> {
    arb_formula_over(&GRID, depth, max_t, negation, until)
}

pub fn arb_formula_over(
    thresholds: &'static [&'static str],
    depth: usize,
    max_t: usize,
    negation: bool,
    until: bool,
) -> BoxedStrategy<Formula<Rational>> {
    if depth <= 1 {
        return arb_atom(thresholds);
    }
    let sub = arb_formula_over(thresholds, depth - 1, max_t, negation, until);
    let mut options: Vec<(u32, BoxedStrategy<Formula<Rational>>)> = vec![
        (1, arb_atom(thresholds)),
        (2, (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::and(a, b)).boxed()),
        (2, (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::or(a, b)).boxed()),
        (2, (arb_interval(max_t), sub.clone()).prop_map(|(i, a)| Formula::eventually(i, a)).boxed()),
        (2, (arb_interval(max_t), sub.clone()).prop_map(|(i, a)| Formula::globally(i, a)).boxed()),
    ];
    if negation {
        options.push((1, sub.clone().prop_map(Formula::not).boxed()));
    }
    if until {
        options.push((1, (sub.clone(), arb_interval(max_t), sub).prop_map(|(a, i, b)| Formula::until(a, i, b)).boxed()));
    }
    prop::strategy::Union::new_weighted(options).prop_filter("horizon within bound", move |f| f.horizon() <= max_t).boxed()
}

/// Scalar traces with `len` samples in `[0, 1]`, in steps of 1/200.
pub fn arb_trace(len: usize) -> impl Strategy<Value = Trace<Rational>> {
    prop_oneof![
        prop::collection::vec(0i64..=200, len),
        (30i64..=110).prop_flat_map(move |c| prop::collection::vec(c - 20..=c + 20, len)),
    ]
    .prop_map(|ks| Trace::scalar(ks.into_iter().map(|k| Rational::from_ratio(k, 200))).unwrap())
}

/// All traces with `len` samples drawn from `values`.
pub fn grid_traces(values: &[Rational], len: usize) -> Vec<Trace<Rational>> {
    let mut out = Vec::new();
    let mut index = vec![0usize; len];
    loop {
        let samples: Vec<Vec<Rational>> = index.iter().map(|i| vec![values[*i].clone()]).collect();
        out.push(Trace::new(samples, Domain::unit(1)).unwrap());
        let mut k = 0;
        while k < len {
            index[k] += 1;
            if index[k] < values.len() {
                break;
            }
            index[k] = 0;
            k += 1;
        }
        if k == len {
            return out;
        }
    }
}
