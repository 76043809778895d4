//! Worked examples: lotteries, choice patterns and numbers quoted for the
//! risk, time and social applications.

use std::collections::BTreeMap;

use refchoice::dataset::{ChoiceDataset, IncomeSplit};
use refchoice::domain_fixtures;
use refchoice::rational::{int, q, Rational};
use refchoice::risk::{fit_areu, simulate_areu, AreuParams, Lottery, LotteryData};
use refchoice::social::{fit_fspu, gini, simulate_fspu, splits, FspuParams};
use refchoice::time::{fit_pbdu, payments, simulate_pbdu, stationarity_over};
use refchoice::FiniteProperty;
use refchoice::Warp;

fn fixture(name: &str) -> ChoiceDataset {
    ChoiceDataset::from_json(domain_fixtures::json(name).unwrap()).unwrap()
}

fn lotteries(ds: &ChoiceDataset) -> BTreeMap<String, Lottery> {
    let data = LotteryData::from_dataset(ds).unwrap();
    ds.alternatives()
        .iter()
        .map(|a| a.id.clone())
        .zip(data.lotteries)
        .collect()
}

fn lot(p: &[(i64, i64)]) -> Lottery {
    Lottery::new(p.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
}

fn chosen(ds: &ChoiceDataset, menu: &[&str]) -> Vec<String> {
    ds.ids(ds.choice(ds.menu_of(menu).unwrap()).unwrap())
}

fn split(own: i64, other: i64) -> IncomeSplit {
    IncomeSplit {
        own: int(own),
        other: int(other),
    }
}

#[test]
fn common_ratio_lotteries() {
    let ds = fixture("allais");
    let l = lotteries(&ds);
    // prizes 0, 3000, 4000
    assert_eq!(l["p1"], lot(&[(0, 1), (1, 1), (0, 1)]));
    assert_eq!(l["p2"], lot(&[(1, 5), (0, 1), (4, 5)]));
    assert_eq!(l["q1"], lot(&[(3, 4), (1, 4), (0, 1)]));
    assert_eq!(l["q2"], lot(&[(4, 5), (0, 1), (1, 5)]));
    assert_eq!(chosen(&ds, &["p1", "p2"]), ["p1"]);
    assert_eq!(chosen(&ds, &["q1", "q2"]), ["q2"]);
    // q1, q2 are the quarter mixtures of p1, p2 with the zero prize
    let zero = lot(&[(1, 1), (0, 1), (0, 1)]);
    assert_eq!(l["p1"].mix(&q(1, 4), &zero), l["q1"]);
    assert_eq!(l["p2"].mix(&q(1, 4), &zero), l["q2"]);
}

#[test]
fn common_ratio_threshold_is_four_fifths() {
    let l = lotteries(&fixture("allais"));
    let eu = |id: &str, m: &Rational| l[id].expectation(&[int(0), m.clone(), int(1)]);
    let m = q(4, 5);
    assert_eq!(eu("p1", &m), eu("p2", &m));
    assert_eq!(eu("q1", &m), eu("q2", &m));
    for above in [q(81, 100), q(9, 10)] {
        assert!(eu("p1", &above) > eu("p2", &above));
        assert!(eu("q1", &above) > eu("q2", &above));
    }
    for below in [q(79, 100), q(1, 2)] {
        assert!(eu("p1", &below) < eu("p2", &below));
        assert!(eu("q2", &below) > eu("q1", &below));
    }
}

#[test]
fn fitted_common_ratio_utilities_straddle_threshold() {
    let p = fit_areu(&fixture("allais")).unwrap();
    assert!(p.utilities["p1"][1] > q(4, 5));
    assert!(p.utilities["q1"][1] < q(4, 5));
    assert!(p.utilities["p1"][1] > p.utilities["q1"][1]);
}

#[test]
fn triple_menu_lotteries() {
    let p: AreuParams = serde_json::from_str(domain_fixtures::json("allais_triple_params").unwrap()).unwrap();
    let l = &p.lotteries;
    assert_eq!(l["p1"], lot(&[(0, 1), (1, 1), (0, 1)]));
    assert_eq!(l["p2"], lot(&[(1, 2), (0, 1), (1, 2)]));
    assert_eq!(l["q1"], lot(&[(1, 10), (7, 10), (1, 5)]));
    assert_eq!(l["q2"], lot(&[(3, 10), (3, 10), (2, 5)]));
    assert_eq!(p.order[0], "p1");
}

/// With `u(3000)` between 1/2 and 2/3 at the safest reference and below 1/2
/// elsewhere, the quoted binary preferences hold and `q1` wins the triple.
#[test]
fn triple_menu_pattern_with_in_range_utilities() {
    let mut p: AreuParams = serde_json::from_str(domain_fixtures::json("allais_triple_params").unwrap()).unwrap();
    for (id, u) in p.utilities.iter_mut() {
        u[1] = if id == "p1" { q(3, 5) } else { q(2, 5) };
    }
    assert!(p.consistency_issues().unwrap().is_empty());
    let menus: Vec<Vec<String>> = [
        vec!["p1", "p2"],
        vec!["q1", "q2"],
        vec!["p1", "q1"],
        vec!["p1", "q1", "q2"],
    ]
    .iter()
    .map(|m| m.iter().map(|s| s.to_string()).collect())
    .collect();
    let ds = simulate_areu(&p, &menus).unwrap();
    assert_eq!(chosen(&ds, &["p1", "p2"]), ["p1"]);
    assert_eq!(chosen(&ds, &["q1", "q2"]), ["q2"]);
    assert_eq!(chosen(&ds, &["p1", "q1"]), ["q1"]);
    assert_eq!(chosen(&ds, &["p1", "q1", "q2"]), ["q1"]);
    let all: Vec<_> = ds.menus().collect();
    assert!(!Warp.holds(&ds, &all));
}

#[test]
fn present_bias_choices() {
    let ds = fixture("present_bias");
    assert_eq!(chosen(&ds, &["18@0", "20@1"]), ["18@0"]);
    assert_eq!(chosen(&ds, &["18@3", "20@4"]), ["20@4"]);
    assert_eq!(chosen(&ds, &["15@0", "18@3", "20@4"]), ["18@3"]);
    let pay = payments(&ds).unwrap();
    let i = ds.index_of("20@4").unwrap();
    assert_eq!((pay[i].amount.clone(), pay[i].time.clone()), (int(20), int(4)));
}

#[test]
fn present_bias_binary_pair_breaks_stationarity() {
    let ds = fixture("present_bias");
    let pair = [
        ds.menu_of(&["18@0", "20@1"]).unwrap(),
        ds.menu_of(&["18@3", "20@4"]).unwrap(),
    ];
    assert!(!stationarity_over(&ds, &pair).unwrap().is_empty());
}

#[test]
fn immediate_option_lowers_patience() {
    let ds = fixture("present_bias");
    let p = fit_pbdu(&ds).unwrap();
    assert!(p.discount(&int(0)) < p.discount(&int(3)));
    let menus: Vec<_> = ds.menus().collect();
    assert_eq!(simulate_pbdu(&p, &ds, &menus).unwrap(), ds);
}

#[test]
fn gini_values() {
    assert_eq!(gini(&split(8, 2)), q(3, 10));
    assert_eq!(gini(&split(7, 3)), q(1, 5));
    assert_eq!(gini(&split(5, 5)), int(0));
    assert_eq!(gini(&split(60, 1)), q(59, 122));
    assert!(gini(&split(1_000_000, 1)) < q(1, 2));
    assert_eq!(gini(&split(30, 20)), q(1, 10));
}

#[test]
fn dictator_flip() {
    let ds = fixture("dictator");
    assert_eq!(chosen(&ds, &["8-2", "7-3"]), ["8-2"]);
    assert_eq!(chosen(&ds, &["8-2", "7-3", "5-5"]), ["7-3"]);
    let sp = splits(&ds).unwrap();
    assert!(sp.iter().all(|s| s.own.clone() + s.other.clone() == int(10)));
    let p = fit_fspu(&ds).unwrap();
    let menus: Vec<_> = ds.menus().collect();
    assert_eq!(simulate_fspu(&p, &ds, &menus).unwrap(), ds);
}

#[test]
fn stated_dictator_params_reproduce_flip() {
    let p: FspuParams = serde_json::from_str(domain_fixtures::json("dictator_params").unwrap()).unwrap();
    let ds = fixture("dictator");
    let menus: Vec<_> = ds.menus().collect();
    assert_eq!(simulate_fspu(&p, &ds, &menus).unwrap(), ds);
}

#[test]
fn surplus_switch() {
    let p: FspuParams = serde_json::from_str(domain_fixtures::json("surplus_params").unwrap()).unwrap();
    let universe = fixture("surplus");
    let pair = universe.menu_of(&["60-0", "30-20"]).unwrap();
    let triple = universe.menu_of(&["60-0", "30-20", "25-25"]).unwrap();
    let ds = simulate_fspu(&p, &universe, &[pair, triple]).unwrap();
    assert_eq!(chosen(&ds, &["60-0", "30-20"]), ["60-0"]);
    assert_eq!(chosen(&ds, &["60-0", "30-20", "25-25"]), ["30-20"]);
}
