//! Earliest payments, Stationarity, and the time-domain axioms.

use num_traits::{One, Signed};
use serde::Serialize;

use crate::dataset::{ChoiceDataset, DatedPayment, Payload, PayloadKind};
use crate::engine::{check_reference_dependence_with, PsiMap, Quantifier};
use crate::menu::Menu;
use crate::property::{normalize, Conjunction, FiniteProperty, ViolationWitness, Warp};
use crate::rational::{self, Rational};

use super::TimeError;

/// Payments of a dated-payment dataset, indexed like its alternatives.
pub fn payments(ds: &ChoiceDataset) -> Result<Vec<DatedPayment>, TimeError> {
    if ds.kind() != PayloadKind::DatedPayment {
        return Err(TimeError::NotDatedPayments(ds.kind()));
    }
    Ok(ds
        .alternatives()
        .iter()
        .map(|a| match &a.payload {
            Payload::Dated(d) => d.clone(),
            _ => unreachable!("validated dataset kind"),
        })
        .collect())
}

/// Members of `menu` arriving first.
pub fn earliest_payments(pay: &[DatedPayment], menu: Menu) -> Menu {
    let Some(t) = menu.iter().map(|i| &pay[i].time).min() else {
        return Menu::EMPTY;
    };
    menu.iter()
        .filter(|&i| pay[i].time == *t)
        .fold(Menu::EMPTY, |acc, i| acc.with(i))
}

#[derive(Debug, Clone)]
pub struct Earliest {
    pay: Vec<DatedPayment>,
}

impl Earliest {
    pub fn new(ds: &ChoiceDataset) -> Result<Self, TimeError> {
        Ok(Earliest { pay: payments(ds)? })
    }
}

impl PsiMap for Earliest {
    fn name(&self) -> String {
        "earliest".into()
    }
    fn admissible(&self, _: &ChoiceDataset, menu: Menu) -> Menu {
        earliest_payments(&self.pay, menu)
    }
}

fn show(p: &DatedPayment) -> String {
    format!("({}, {})", rational::format(&p.amount), rational::format(&p.time))
}

/// Stationarity: `(x,t) ∈ c(A)`, `(y,q) ∈ A`, `(y,q+a) ∈ c(B)`, `(x,t+a) ∈ B`
/// with `a > 0` imply `(x,t+a) ∈ c(B)`.
#[derive(Debug, Clone)]
pub struct Stationarity {
    pay: Vec<DatedPayment>,
}

impl Stationarity {
    pub fn new(ds: &ChoiceDataset) -> Result<Self, TimeError> {
        Ok(Stationarity { pay: payments(ds)? })
    }
}

impl FiniteProperty for Stationarity {
    fn name(&self) -> String {
        "Stationarity".into()
    }

    fn violations(&self, ds: &ChoiceDataset, family: &[Menu], first_only: bool) -> Vec<ViolationWitness> {
        let p = &self.pay;
        let obs: Vec<(Menu, Menu)> = family.iter().filter_map(|m| ds.choice(*m).map(|c| (*m, c))).collect();
        let mut out = Vec::new();
        for &(a, ca) in &obs {
            for &(b, cb) in &obs {
                for x in ca.iter() {
                    for y in a.without(x).iter() {
                        for y2 in cb.iter() {
                            if p[y2].amount != p[y].amount {
                                continue;
                            }
                            let shift = &p[y2].time - &p[y].time;
                            if !shift.is_positive() {
                                continue;
                            }
                            for x2 in b.minus(cb).iter() {
                                if p[x2].amount == p[x].amount && &p[x2].time - &p[x].time == shift {
                                    out.push(ViolationWitness::new(
                                        "Stationarity",
                                        vec![a, b],
                                        format!(
                                            "{} is chosen over {} in {} but after a delay of {} {} is chosen and {} is not in {}",
                                            show(&p[x]),
                                            show(&p[y]),
                                            ds.fmt_menu(a),
                                            rational::format(&shift),
                                            show(&p[y2]),
                                            show(&p[x2]),
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

pub fn stationarity_over(ds: &ChoiceDataset, family: &[Menu]) -> Result<Vec<ViolationWitness>, TimeError> {
    ds.check_observed(family)?;
    Ok(normalize(Stationarity::new(ds)?.violations(ds, family, false)))
}

fn warp_and_stationarity(ds: &ChoiceDataset) -> Result<Conjunction, TimeError> {
    Ok(Conjunction::new(vec![Box::new(Warp), Box::new(Stationarity::new(ds)?)]))
}

/// Pairwise form: WARP ∧ Stationarity over `{A, B}` whenever the two
/// observed menus share an earliest payment.
pub fn check_time_reference_dependence(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, TimeError> {
    let pay = payments(ds)?;
    let t = warp_and_stationarity(ds)?;
    let menus: Vec<Menu> = ds.menus().collect();
    let mut out = Vec::new();
    for (i, &a) in menus.iter().enumerate() {
        for &b in &menus[i..] {
            let shared = earliest_payments(&pay, a).inter(earliest_payments(&pay, b));
            if shared.is_empty() {
                continue;
            }
            let fam = if a == b { vec![a] } else { vec![a, b] };
            out.extend(t.violations(ds, &fam, false));
        }
    }
    Ok(normalize(out))
}

/// Existential form: for every observed menu and each earliest payment in
/// it, WARP ∧ Stationarity over the observed sub-menus containing it.
pub fn check_time_reference_dependence_by_subsets(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, TimeError> {
    let t = warp_and_stationarity(ds)?;
    let rd = check_reference_dependence_with(ds, &t, &Earliest::new(ds)?, Quantifier::ForAll)?;
    Ok(rd.witnesses(ds))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Lemma2Outcome {
    Agree {
        passes: bool,
    },
    Disagree {
        pairwise: bool,
        by_subsets: bool,
    },
    /// Some pair sharing an earliest payment has no observed union.
    NotApplicable {
        menus: Vec<Vec<String>>,
    },
}

/// Compares the two formulations. They must agree when every pair of
/// menus sharing an earliest payment has its union observed.
pub fn lemma2_equivalence(ds: &ChoiceDataset) -> Result<Lemma2Outcome, TimeError> {
    let pay = payments(ds)?;
    let menus: Vec<Menu> = ds.menus().collect();
    for (i, &a) in menus.iter().enumerate() {
        for &b in &menus[i + 1..] {
            let sharing = earliest_payments(&pay, a).intersects(earliest_payments(&pay, b));
            if sharing && !ds.is_observed(a.union(b)) {
                return Ok(Lemma2Outcome::NotApplicable {
                    menus: vec![ds.ids(a), ds.ids(b)],
                });
            }
        }
    }
    let pairwise = check_time_reference_dependence(ds)?.is_empty();
    let by_subsets = check_time_reference_dependence_by_subsets(ds)?.is_empty();
    Ok(if pairwise == by_subsets {
        Lemma2Outcome::Agree { passes: pairwise }
    } else {
        Lemma2Outcome::Disagree { pairwise, by_subsets }
    })
}

fn binary(ds: &ChoiceDataset) -> Vec<(usize, usize, Menu)> {
    ds.observations()
        .filter(|(m, _)| m.len() == 2)
        .map(|(m, c)| {
            let v = m.to_vec();
            (v[0], v[1], c)
        })
        .collect()
}

/// Higher amount at equal time, and earlier time at equal amount, chosen uniquely.
pub fn check_outcome_monotonicity_impatience(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, TimeError> {
    let p = payments(ds)?;
    let mut out = Vec::new();
    for (i, j, c) in binary(ds) {
        let m = Menu::from_indices([i, j]);
        let (kind, winner) = if p[i].time == p[j].time && p[i].amount != p[j].amount {
            ("OutcomeMonotonicity", if p[i].amount > p[j].amount { i } else { j })
        } else if p[i].amount == p[j].amount && p[i].time != p[j].time {
            ("Impatience", if p[i].time < p[j].time { i } else { j })
        } else {
            continue;
        };
        if c != Menu::singleton(winner) {
            out.push(ViolationWitness::new(
                kind,
                vec![m],
                format!(
                    "c({}) = {} but {} should be chosen alone",
                    ds.fmt_menu(m),
                    ds.fmt_menu(c),
                    show(&p[winner])
                ),
            ));
        }
    }
    Ok(normalize(out))
}

/// Present Bias: clause 1 over binary menus shifted by `d > 0`; clause 2 over
/// triples related by `t ↦ λt + d` with `0 < λ < 1`.
pub fn check_present_bias(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, TimeError> {
    let p = payments(ds)?;
    let mut out = Vec::new();
    let bin = binary(ds);
    let ordered = |i: usize, j: usize| if p[i].time <= p[j].time { (i, j) } else { (j, i) };
    for &(i, j, c) in &bin {
        let (e, l) = ordered(i, j);
        if p[e].time == p[l].time || c != Menu::singleton(l) {
            continue;
        }
        for &(i2, j2, c2) in &bin {
            let (e2, l2) = ordered(i2, j2);
            if p[e2].amount != p[e].amount || p[l2].amount != p[l].amount {
                continue;
            }
            let d = &p[e2].time - &p[e].time;
            if d.is_positive() && &p[l2].time - &p[l].time == d && c2 != Menu::singleton(l2) {
                out.push(ViolationWitness::new(
                    "PresentBias",
                    vec![Menu::from_indices([i, j]), Menu::from_indices([i2, j2])],
                    format!(
                        "{} is chosen over {} but after a delay of {} the later payment is not chosen alone",
                        show(&p[l]),
                        show(&p[e]),
                        rational::format(&d)
                    ),
                ));
            }
        }
    }
    let triples: Vec<(Vec<usize>, Menu, Menu)> = ds
        .observations()
        .filter(|(m, _)| m.len() == 3)
        .map(|(m, c)| {
            let mut v = m.to_vec();
            v.sort_by(|&a, &b| p[a].time.cmp(&p[b].time));
            (v, m, c)
        })
        .filter(|(v, _, _)| p[v[0]].time < p[v[1]].time && p[v[1]].time < p[v[2]].time)
        .collect();
    for (v, a, ca) in &triples {
        if ca != a {
            continue;
        }
        for (w, a2, ca2) in &triples {
            if (0..3).any(|k| p[w[k]].amount != p[v[k]].amount) {
                continue;
            }
            let lambda = (&p[w[2]].time - &p[w[0]].time) / (&p[v[2]].time - &p[v[0]].time);
            if !lambda.is_positive() || lambda >= Rational::one() {
                continue;
            }
            let d = &p[w[0]].time - &lambda * &p[v[0]].time;
            if p[w[1]].time != &lambda * &p[v[1]].time + &d {
                continue;
            }
            if ca2.contains(w[0]) && ca2.contains(w[2]) && !ca2.contains(w[1]) {
                out.push(ViolationWitness::new(
                    "PresentBias",
                    vec![*a, *a2],
                    format!(
                        "all of {} are chosen, and after t ↦ {}t + {} the extremes are chosen without {}",
                        ds.fmt_menu(*a),
                        rational::format(&lambda),
                        rational::format(&d),
                        show(&p[w[1]])
                    ),
                ));
            }
        }
    }
    Ok(normalize(out))
}

/// `(b, t̄) ∈ c({(a, 0), (b, t̄)})` when that menu is observed.
pub fn standing_assumption(ds: &ChoiceDataset) -> Result<Option<bool>, TimeError> {
    let p = payments(ds)?;
    let (Some(lo), Some(hi)) = (p.iter().map(|x| &x.amount).min(), p.iter().map(|x| &x.amount).max()) else {
        return Ok(None);
    };
    let tbar = p.iter().map(|x| &x.time).max().unwrap();
    let find = |amt: &Rational, t: &Rational| p.iter().position(|x| x.amount == *amt && x.time == *t);
    let zero = Rational::from_integer(0.into());
    let (Some(a), Some(b)) = (find(lo, &zero), find(hi, tbar)) else {
        return Ok(None);
    };
    Ok(ds.choice(Menu::from_indices([a, b])).map(|c| c.contains(b)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimeLinkage {
    pub warp: bool,
    pub stationarity: bool,
}

pub fn linkage_report_time(ds: &ChoiceDataset) -> Result<TimeLinkage, TimeError> {
    let all: Vec<Menu> = ds.menus().collect();
    Ok(TimeLinkage {
        warp: Warp.holds(ds, &all),
        stationarity: Stationarity::new(ds)?.holds(ds, &all),
    })
}
