//! Gini, most balanced splits, Quasi-linearity, and the social axioms.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dataset::{ChoiceDataset, IncomeSplit, Payload, PayloadKind};
use crate::engine::{check_reference_dependence_with, PsiMap, Quantifier};
use crate::menu::Menu;
use crate::property::{normalize, Conjunction, FiniteProperty, ViolationWitness, Warp};
use crate::rational::{self, Rational};

use super::SocialError;

/// `|x − y| / (2(x + y))`.
pub fn gini(s: &IncomeSplit) -> Rational {
    let total = &s.own + &s.other;
    (&s.own - &s.other).abs() / (total * Rational::from_integer(2.into()))
}

pub fn splits(ds: &ChoiceDataset) -> Result<Vec<IncomeSplit>, SocialError> {
    if ds.kind() != PayloadKind::IncomeSplit {
        return Err(SocialError::NotIncomeSplits(ds.kind()));
    }
    Ok(ds
        .alternatives()
        .iter()
        .map(|a| match &a.payload {
            Payload::Split(s) => s.clone(),
            _ => unreachable!("validated dataset kind"),
        })
        .collect())
}

/// Smallest Gini in the menu; `None` for the empty menu.
pub fn attainable_equality(sp: &[IncomeSplit], menu: Menu) -> Option<Rational> {
    menu.iter().map(|i| gini(&sp[i])).min()
}

pub fn most_balanced(sp: &[IncomeSplit], menu: Menu) -> Menu {
    let Some(r) = attainable_equality(sp, menu) else {
        return Menu::EMPTY;
    };
    menu.iter()
        .filter(|&i| gini(&sp[i]) == r)
        .fold(Menu::EMPTY, |acc, i| acc.with(i))
}

#[derive(Debug, Clone)]
pub struct MostBalanced {
    sp: Vec<IncomeSplit>,
}

impl MostBalanced {
    pub fn new(ds: &ChoiceDataset) -> Result<Self, SocialError> {
        Ok(MostBalanced { sp: splits(ds)? })
    }
}

impl PsiMap for MostBalanced {
    fn name(&self) -> String {
        "most-balanced".into()
    }
    fn admissible(&self, _: &ChoiceDataset, menu: Menu) -> Menu {
        most_balanced(&self.sp, menu)
    }
}

fn show(s: &IncomeSplit) -> String {
    format!("({}, {})", rational::format(&s.own), rational::format(&s.other))
}

/// `(x,y) ∈ c(A)`, `(x',y') ∈ A`, `(x'+a,y') ∈ c(B)`, `(x+a,y) ∈ B` with
/// `a ≠ 0` imply `(x+a,y) ∈ c(B)`.
#[derive(Debug, Clone)]
pub struct Quasilinearity {
    sp: Vec<IncomeSplit>,
}

impl Quasilinearity {
    pub fn new(ds: &ChoiceDataset) -> Result<Self, SocialError> {
        Ok(Quasilinearity { sp: splits(ds)? })
    }
}

impl FiniteProperty for Quasilinearity {
    fn name(&self) -> String {
        "Quasi-linearity".into()
    }

    fn violations(&self, ds: &ChoiceDataset, family: &[Menu], first_only: bool) -> Vec<ViolationWitness> {
        let s = &self.sp;
        let obs: Vec<(Menu, Menu)> = family.iter().filter_map(|m| ds.choice(*m).map(|c| (*m, c))).collect();
        let mut out = Vec::new();
        for &(a, ca) in &obs {
            for &(b, cb) in &obs {
                for x in ca.iter() {
                    for y in a.without(x).iter() {
                        for y2 in cb.iter() {
                            if s[y2].other != s[y].other {
                                continue;
                            }
                            let shift = &s[y2].own - &s[y].own;
                            if shift.is_zero() {
                                continue;
                            }
                            for x2 in b.minus(cb).iter() {
                                if s[x2].other == s[x].other && &s[x2].own - &s[x].own == shift {
                                    out.push(ViolationWitness::new(
                                        "Quasi-linearity",
                                        vec![a, b],
                                        format!(
                                            "{} is chosen with {} available in {} but shifting own pay by {} {} is chosen and {} is not in {}",
                                            show(&s[x]),
                                            show(&s[y]),
                                            ds.fmt_menu(a),
                                            rational::format(&shift),
                                            show(&s[y2]),
                                            show(&s[x2]),
                                            ds.fmt_menu(b)
                                        ),
                                    ));
                                    if first_only {
                                        return out;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn quasilinearity_over(ds: &ChoiceDataset, family: &[Menu]) -> Result<Vec<ViolationWitness>, SocialError> {
    ds.check_observed(family)?;
    Ok(normalize(Quasilinearity::new(ds)?.violations(ds, family, false)))
}

/// For every observed menu and every most balanced split in it, WARP and
/// Quasi-linearity over the observed sub-menus keeping that split.
pub fn check_equality_reference_dependence(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, SocialError> {
    let t = Conjunction::new(vec![Box::new(Warp), Box::new(Quasilinearity::new(ds)?)]);
    let rd = check_reference_dependence_with(ds, &t, &MostBalanced::new(ds)?, Quantifier::ForAll)?;
    Ok(rd.witnesses(ds))
}

/// Nested observed menus `A ⊂ B`: if a split giving the other more is chosen
/// over one giving less in `A`, the latter stays unchosen in `B`.
pub fn check_fairness(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, SocialError> {
    let s = splits(ds)?;
    let obs: Vec<(Menu, Menu)> = ds.observations().collect();
    let mut out = Vec::new();
    for &(a, ca) in &obs {
        for &(b, cb) in &obs {
            if !a.is_strict_subset(b) {
                continue;
            }
            for x in ca.iter() {
                for y in a.minus(ca).iter() {
                    if s[x].other > s[y].other && cb.contains(y) {
                        out.push(ViolationWitness::new(
                            "Fairness",
                            vec![a, b],
                            format!(
                                "{} is chosen over {} in {} but {} is chosen in the larger {}",
                                show(&s[x]),
                                show(&s[y]),
                                ds.fmt_menu(a),
                                show(&s[y]),
                                ds.fmt_menu(b)
                            ),
                        ));
                    }
                }
            }
        }
    }
    Ok(normalize(out))
}

/// Binary menus with a dominating split must choose exactly that split.
pub fn check_social_monotonicity(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, SocialError> {
    let s = splits(ds)?;
    let mut out = Vec::new();
    for (m, c) in ds.observations() {
        if m.len() != 2 {
            continue;
        }
        let v = m.to_vec();
        for (i, j) in [(v[0], v[1]), (v[1], v[0])] {
            let dominates = s[i].own >= s[j].own && s[i].other >= s[j].other && s[i] != s[j];
            if dominates && c != Menu::singleton(i) {
                out.push(ViolationWitness::new(
                    "Monotonicity",
                    vec![m],
                    format!(
                        "{} dominates {} but the choice is {}",
                        show(&s[i]),
                        show(&s[j]),
                        ds.fmt_menu(c)
                    ),
                ));
            }
        }
    }
    Ok(normalize(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SocialLinkage {
    pub warp: bool,
    pub quasilinearity: bool,
}

/// Global WARP and Quasi-linearity verdicts over all observed menus.
pub fn linkage_report_social(ds: &ChoiceDataset) -> Result<SocialLinkage, SocialError> {
    let all: Vec<Menu> = ds.menus().collect();
    Ok(SocialLinkage {
        warp: Warp.violations(ds, &all, true).is_empty(),
        quasilinearity: Quasilinearity::new(ds)?.violations(ds, &all, true).is_empty(),
    })
}
