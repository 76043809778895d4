//! Choice over income splits: Gini-based references, Quasi-linearity,
//! Fairness, and utilities that depend on attainable equality.

mod axioms;
mod fspu;

pub use axioms::{
    attainable_equality, check_equality_reference_dependence, check_fairness, check_social_monotonicity, gini,
    linkage_report_social, most_balanced, quasilinearity_over, splits, MostBalanced, Quasilinearity, SocialLinkage,
};
pub use fspu::{fit_fspu, fspu_axiom_battery, simulate_fspu, split_universe, verify_fspu, FspuParams, SocialMismatch};

use crate::dataset::{DatasetError, PayloadKind};
use crate::engine::EngineError;
use crate::property::ViolationWitness;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SocialError {
    #[error("expected income-split data, found {0:?}")]
    NotIncomeSplits(PayloadKind),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("no utility for the other's payment {0}")]
    UnknownPayment(String),
    #[error("{} axiom violation(s)", .0.len())]
    AxiomFails(Vec<ViolationWitness>),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ChoiceDataset, IncomeSplit};
    use crate::menu::Menu;
    use crate::rational::{int, q, Rational};

    fn split(own: i64, other: i64) -> IncomeSplit {
        IncomeSplit {
            own: int(own),
            other: int(other),
        }
    }

    fn dictator() -> ChoiceDataset {
        ChoiceDataset::from_json(crate::domain_fixtures::json("dictator").unwrap()).unwrap()
    }

    fn load_params(name: &str) -> FspuParams {
        serde_json::from_str(crate::domain_fixtures::json(name).unwrap()).unwrap()
    }

    fn increment(p: &FspuParams, r: Rational, lo: i64, hi: i64) -> Rational {
        let row = p.row(&r);
        &row[&int(hi)] - &row[&int(lo)]
    }

    fn data(alts: &[(&str, i64, i64)], obs: &[(&[&str], &[&str])]) -> ChoiceDataset {
        let items: Vec<(String, Rational, Rational)> = alts
            .iter()
            .map(|(id, x, y)| (id.to_string(), int(*x), int(*y)))
            .collect();
        let mut ds = split_universe(&items).unwrap();
        for (m, c) in obs {
            ds.insert(ds.menu_of(m).unwrap(), ds.menu_of(c).unwrap()).unwrap();
        }
        ds
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&split(5, 5)), int(0));
        assert_eq!(gini(&split(8, 2)), q(3, 10));
        assert_eq!(gini(&split(7, 3)), q(1, 5));
    }

    #[test]
    fn most_balanced_of_dictator_menu() {
        let ds = dictator();
        let sp = splits(&ds).unwrap();
        assert_eq!(most_balanced(&sp, ds.universe()), ds.menu_of(&["5-5"]).unwrap());
        let pair = ds.menu_of(&["8-2", "7-3"]).unwrap();
        assert_eq!(most_balanced(&sp, pair), ds.menu_of(&["7-3"]).unwrap());
        let tie = data(&[("a", 6, 4), ("b", 4, 6)], &[]);
        let tsp = splits(&tie).unwrap();
        assert_eq!(most_balanced(&tsp, tie.universe()), tie.universe());
    }

    #[test]
    fn dictator_passes_battery() {
        let ds = dictator();
        assert!(check_equality_reference_dependence(&ds).unwrap().is_empty());
        assert!(check_fairness(&ds).unwrap().is_empty());
        assert!(check_social_monotonicity(&ds).unwrap().is_empty());
        assert!(!linkage_report_social(&ds).unwrap().warp);
    }

    #[test]
    fn dictator_fit_orders_increments() {
        let ds = dictator();
        let p = fit_fspu(&ds).unwrap();
        assert!(increment(&p, int(0), 2, 3) > int(1));
        assert!(increment(&p, q(1, 5), 2, 3) < int(1));
        assert!(verify_fspu(&p, &ds).unwrap().is_empty());
    }

    #[test]
    fn dictator_params_reproduce_flip() {
        let ds = dictator();
        let p = load_params("dictator_params");
        let menus: Vec<Menu> = ds.menus().collect();
        let sim = simulate_fspu(&p, &ds, &menus).unwrap();
        assert_eq!(sim, ds);
    }

    #[test]
    fn surplus_switch() {
        let ds = ChoiceDataset::from_json(crate::domain_fixtures::json("surplus").unwrap()).unwrap();
        let p = load_params("surplus_params");
        let pair = ds.menu_of(&["60-0", "30-20"]).unwrap();
        let sim = simulate_fspu(&p, &ds, &[pair, ds.universe()]).unwrap();
        assert_eq!(sim.choice(pair).unwrap(), ds.menu_of(&["60-0"]).unwrap());
        assert_eq!(sim.choice(ds.universe()).unwrap(), ds.menu_of(&["30-20"]).unwrap());
    }

    #[test]
    fn expansion_reducing_sharing_breaks_fairness() {
        let ds = data(
            &[("a", 7, 3), ("b", 8, 2), ("c", 9, 1)],
            &[(&["a", "b"], &["a"]), (&["a", "b", "c"], &["b"])],
        );
        assert_eq!(check_fairness(&ds).unwrap().len(), 1);
        assert!(matches!(fit_fspu(&ds), Err(SocialError::AxiomFails(_))));
    }

    #[test]
    fn dominated_choice_flagged() {
        let ds = data(&[("a", 8, 2), ("b", 7, 2)], &[(&["a", "b"], &["b"])]);
        assert_eq!(check_social_monotonicity(&ds).unwrap().len(), 1);
        let ok = data(&[("a", 8, 2), ("b", 7, 2)], &[(&["a", "b"], &["a"])]);
        assert!(check_social_monotonicity(&ok).unwrap().is_empty());
    }

    #[test]
    fn quasilinearity_shift_violation() {
        // (8,2) over (7,3) but with 1 more own pay (8,3) is chosen over (9,2)
        let ds = data(
            &[("a", 8, 2), ("b", 7, 3), ("c", 9, 2), ("d", 8, 3)],
            &[(&["a", "b"], &["a"]), (&["c", "d"], &["d"])],
        );
        let all: Vec<Menu> = ds.menus().collect();
        // one instance per direction of the shift
        assert_eq!(quasilinearity_over(&ds, &all).unwrap().len(), 2);
        assert!(quasilinearity_over(&ds, &all[..1]).unwrap().is_empty());
        let r = linkage_report_social(&ds).unwrap();
        assert!(r.warp && !r.quasilinearity);
    }

    #[test]
    fn equality_dependence_violation_keeping_balanced_split() {
        let ds = data(
            &[("a", 8, 2), ("b", 7, 3), ("e", 5, 5)],
            &[(&["a", "b", "e"], &["a"]), (&["a", "e"], &["e"])],
        );
        assert!(!check_equality_reference_dependence(&ds).unwrap().is_empty());
    }

    #[test]
    fn unrelated_pairs_pass_equality_dependence() {
        let ds = data(
            &[("a", 8, 2), ("b", 7, 3), ("c", 6, 4), ("d", 9, 1)],
            &[(&["a", "b"], &["a"]), (&["c", "d"], &["c"])],
        );
        assert!(check_equality_reference_dependence(&ds).unwrap().is_empty());
    }

    #[test]
    fn params_reject_wrong_increment_order() {
        let mut v = std::collections::BTreeMap::new();
        v.insert(int(0), [(int(2), int(0)), (int(3), q(1, 2))].into_iter().collect());
        v.insert(q(1, 5), [(int(2), int(0)), (int(3), int(2))].into_iter().collect());
        assert!(matches!(FspuParams::new(v), Err(SocialError::BadParams(_))));
    }

    #[test]
    fn params_round_trip() {
        let p = load_params("dictator_params");
        let back: FspuParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn singleton_menu_choice() {
        let ds = dictator();
        let p = load_params("dictator_params");
        let m = ds.menu_of(&["5-5"]).unwrap();
        assert_eq!(simulate_fspu(&p, &ds, &[m]).unwrap().choice(m), Some(m));
    }

    #[test]
    fn empty_dataset_linkage_passes() {
        let r = linkage_report_social(&dictator().cleared()).unwrap();
        assert!(r.warp && r.quasilinearity);
    }
}
