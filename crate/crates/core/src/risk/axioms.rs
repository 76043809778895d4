//! Least-risky references and the risk-domain axioms.

use num_traits::{One, Signed};
use serde::Serialize;

use crate::dataset::ChoiceDataset;
use crate::engine::{check_reference_dependence, PsiMap, RdOutcome};
use crate::menu::Menu;
use crate::property::{normalize, Conjunction, FiniteProperty, ViolationWitness, Warp};
use crate::rational::{self, Rational};

use super::lottery::{common_mixture, Lottery, LotteryData};
use super::RiskError;

/// Ψ(A): members that are neither a mean-preserving nor an extreme spread
/// of another member.
#[derive(Debug, Clone)]
pub struct LeastRisky {
    riskier: Vec<Vec<bool>>,
}

impl LeastRisky {
    pub fn new(data: &LotteryData) -> Self {
        LeastRisky {
            riskier: data.riskier_matrix(),
        }
    }
}

impl PsiMap for LeastRisky {
    fn name(&self) -> String {
        "least-risky".into()
    }

    fn admissible(&self, _: &ChoiceDataset, menu: Menu) -> Menu {
        let keep = menu
            .iter()
            .filter(|&x| !menu.iter().any(|y| self.riskier[x][y]))
            .fold(Menu::EMPTY, |acc, x| acc.with(x));
        assert!(menu.is_empty() || !keep.is_empty(), "spread orders admit a cycle");
        keep
    }
}

/// Ψ(A) for one menu; an empty answer means the spread orders cycle.
pub fn least_risky(data: &LotteryData, menu: Menu) -> Result<Menu, RiskError> {
    let riskier = data.riskier_matrix();
    let keep = menu
        .iter()
        .filter(|&x| !menu.iter().any(|y| riskier[x][y]))
        .fold(Menu::EMPTY, |acc, x| acc.with(x));
    if !menu.is_empty() && keep.is_empty() {
        return Err(RiskError::EmptyPsi);
    }
    Ok(keep)
}

fn show(ds: &ChoiceDataset, i: usize) -> &str {
    ds.id(i)
}

/// Independence over a family, both clauses, with exact mixture recovery.
#[derive(Debug, Clone)]
pub struct Independence {
    lotteries: Vec<Lottery>,
}

impl Independence {
    pub fn new(data: &LotteryData) -> Self {
        Independence {
            lotteries: data.lotteries.clone(),
        }
    }
}

impl FiniteProperty for Independence {
    fn name(&self) -> String {
        "Independence".into()
    }

    fn violations(&self, ds: &ChoiceDataset, family: &[Menu], first_only: bool) -> Vec<ViolationWitness> {
        let l = &self.lotteries;
        let obs: Vec<(Menu, Menu)> = family.iter().filter_map(|m| ds.choice(*m).map(|c| (*m, c))).collect();
        let mut out = Vec::new();
        for &(a, ca) in &obs {
            for &(b, cb) in &obs {
                for x in ca.iter() {
                    for y in a.without(x).iter() {
                        for y2 in cb.iter() {
                            for x2 in b.minus(cb).iter() {
                                // Clause 1: x2 = x^α s, y2 = y^α s.
                                let c1 = common_mixture(&l[x], &l[y], &l[x2], &l[y2]);
                                // Clause 2: x = x2^α s, y = y2^α s.
                                let c2 = common_mixture(&l[x2], &l[y2], &l[x], &l[y]);
                                let (clause, alpha) = match (c1, c2) {
                                    (Some((al, _)), _) => (1, al),
                                    (None, Some((al, _))) => (2, al),
                                    (None, None) => continue,
                                };
                                out.push(ViolationWitness::new(
                                    "Independence",
                                    vec![a, b],
                                    format!(
                                        "{} is chosen over {} in {} but {} is not chosen with {} in {} (common mixture weight {}, clause {clause})",
                                        show(ds, x),
                                        show(ds, y),
                                        ds.fmt_menu(a),
                                        show(ds, x2),
                                        show(ds, y2),
                                        ds.fmt_menu(b),
                                        rational::format(&alpha)
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
        out
    }
}

/// Independence over `family`, all witnesses.
pub fn independence_over(ds: &ChoiceDataset, family: &[Menu]) -> Result<Vec<ViolationWitness>, RiskError> {
    ds.check_observed(family)?;
    let data = LotteryData::from_dataset(ds)?;
    Ok(normalize(Independence::new(&data).violations(ds, family, false)))
}

/// WARP ∧ Independence with least-risky references.
pub fn check_risk_reference_dependence(ds: &ChoiceDataset) -> Result<RdOutcome, RiskError> {
    let data = LotteryData::from_dataset(ds)?;
    let t = Conjunction::new(vec![Box::new(Warp), Box::new(Independence::new(&data))]);
    Ok(check_reference_dependence(ds, &t, &LeastRisky::new(&data))?)
}

/// Whether `(x1, x2)` in `B` and `(y1, y2)` in `A` decompose as
/// `x1 = δ^α r`, `x2 = p^α r`, `y1 = p^β q`, `y2 = δ^β q`. Returns the prize of `δ`.
pub fn avoidable_risk_pattern(x1: &Lottery, x2: &Lottery, y1: &Lottery, y2: &Lottery) -> Option<usize> {
    let n = x1.len();
    let d: Vec<Rational> = (0..n).map(|i| &x1.0[i] - &x2.0[i]).collect();
    let e: Vec<Rational> = (0..n).map(|i| &y2.0[i] - &y1.0[i]).collect();
    let mut pos = d.iter().enumerate().filter(|(_, v)| v.is_positive());
    let (x, dx) = pos.next()?;
    if pos.next().is_some() {
        return None;
    }
    let k = &e[x] / dx;
    if !k.is_positive() || (0..n).any(|i| e[i] != &k * &d[i]) {
        return None;
    }
    let one = Rational::one();
    let cap = [&x1.0[x], &one, &(&y2.0[x] / &k), &(&one / &k)]
        .into_iter()
        .min()
        .unwrap()
        .clone();
    (*dx <= cap).then_some(x)
}

/// Avoidable Risk over observed nested pairs `B ⊂ A`.
pub fn check_avoidable_risk(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, RiskError> {
    let data = LotteryData::from_dataset(ds)?;
    let l = &data.lotteries;
    let obs: Vec<(Menu, Menu)> = ds.observations().collect();
    let mut out = Vec::new();
    for &(a, ca) in &obs {
        for &(b, cb) in &obs {
            if !b.is_strict_subset(a) {
                continue;
            }
            for x1 in cb.iter() {
                for x2 in b.without(x1).iter() {
                    for y1 in ca.iter() {
                        for y2 in a.minus(ca).iter() {
                            if let Some(z) = avoidable_risk_pattern(&l[x1], &l[x2], &l[y1], &l[y2]) {
                                out.push(ViolationWitness::new(
                                    "AvoidableRisk",
                                    vec![a, b],
                                    format!(
                                        "{} (safer toward prize {}) is chosen over {} in {} but {} is not chosen over {} in the larger {}",
                                        ds.id(x1),
                                        rational::format(&data.prizes.prizes()[z]),
                                        ds.id(x2),
                                        ds.fmt_menu(b),
                                        ds.id(y2),
                                        ds.id(y1),
                                        ds.fmt_menu(a)
                                    ),
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(normalize(out))
}

fn pair(x: usize, y: usize) -> Menu {
    Menu::from_indices([x, y])
}

/// Betweenness over doubletons in `family`. Each consequent is checked
/// whenever `{p,q}` and the consequent's menu are both present.
pub fn betweenness_over(ds: &ChoiceDataset, family: &[Menu]) -> Result<Vec<ViolationWitness>, RiskError> {
    ds.check_observed(family)?;
    let data = LotteryData::from_dataset(ds)?;
    let l = &data.lotteries;
    let has = |m: Menu| family.contains(&m);
    let mut out = Vec::new();
    let n = ds.len_universe();
    for p in 0..n {
        for q in 0..n {
            if p == q || !has(pair(p, q)) {
                continue;
            }
            let c = ds.choice(pair(p, q)).unwrap();
            let strict = c == Menu::singleton(p);
            let tie = c.len() == 2;
            if !strict && !tie {
                continue;
            }
            for m in 0..n {
                if m == p || m == q {
                    continue;
                }
                // m = α p + (1-α) q  ⇔  m - q = α (p - q).
                let Some((alpha, _)) = common_mixture(&l[p], &l[q], &l[m], &l[q]) else {
                    continue;
                };
                let checks = [(pair(p, m), p), (pair(m, q), m)];
                for (menu, want) in checks {
                    if !has(menu) {
                        continue;
                    }
                    let got = ds.choice(menu).unwrap();
                    let ok = if strict {
                        got == Menu::singleton(want)
                    } else {
                        got == menu
                    };
                    if !ok {
                        out.push(ViolationWitness::new(
                            "Betweenness",
                            vec![pair(p, q), menu],
                            format!(
                                "c({}) = {} but c({}) = {} although {} mixes {} and {} with weight {}",
                                ds.fmt_menu(pair(p, q)),
                                ds.fmt_menu(c),
                                ds.fmt_menu(menu),
                                ds.fmt_menu(got),
                                ds.id(m),
                                ds.id(p),
                                ds.id(q),
                                rational::format(&alpha)
                            ),
                        ));
                    }
                }
            }
        }
    }
    Ok(normalize(out))
}

/// Transitivity over doubletons: `p ∈ c{p,q}` and `q ∈ c{q,s}` imply `p ∈ c{p,s}`.
pub fn transitivity_over(ds: &ChoiceDataset, family: &[Menu]) -> Result<Vec<ViolationWitness>, RiskError> {
    ds.check_observed(family)?;
    let has = |m: Menu| family.contains(&m);
    let n = ds.len_universe();
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..n {
            for s in 0..n {
                if p == q || q == s || p == s {
                    continue;
                }
                let (pq, qs, ps) = (pair(p, q), pair(q, s), pair(p, s));
                if !(has(pq) && has(qs) && has(ps)) {
                    continue;
                }
                let chosen = |m: Menu, x: usize| ds.choice(m).unwrap().contains(x);
                if chosen(pq, p) && chosen(qs, q) && !chosen(ps, p) {
                    out.push(ViolationWitness::new(
                        "Transitivity",
                        vec![pq, qs, ps],
                        format!(
                            "{} ∈ c({}), {} ∈ c({}) but {} ∉ c({})",
                            ds.id(p),
                            ds.fmt_menu(pq),
                            ds.id(q),
                            ds.fmt_menu(qs),
                            ds.id(p),
                            ds.fmt_menu(ps)
                        ),
                    ));
                }
            }
        }
    }
    Ok(normalize(out))
}

/// First-order dominance respected on every observed menu.
pub fn check_fosd(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, RiskError> {
    let data = LotteryData::from_dataset(ds)?;
    let l = &data.lotteries;
    let mut out = Vec::new();
    for (a, c) in ds.observations() {
        for x in c.iter() {
            if let Some(y) = a.iter().find(|&y| super::lottery::fosd(&l[y], &l[x]).unwrap_or(false)) {
                out.push(ViolationWitness::new(
                    "FOSD",
                    vec![a],
                    format!(
                        "{} is chosen in {} although {} dominates it",
                        ds.id(x),
                        ds.fmt_menu(a),
                        ds.id(y)
                    ),
                ));
            }
        }
    }
    Ok(normalize(out))
}

/// Risk reference dependence, Avoidable Risk, and FOSD together.
pub fn areu_axiom_battery(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, RiskError> {
    let mut w = check_risk_reference_dependence(ds)?.witnesses(ds);
    w.extend(check_avoidable_risk(ds)?);
    w.extend(check_fosd(ds)?);
    Ok(w)
}

/// Global WARP and global Independence verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkageReport {
    pub warp: bool,
    pub independence: bool,
}

pub fn linkage_report_risk(ds: &ChoiceDataset) -> Result<LinkageReport, RiskError> {
    let data = LotteryData::from_dataset(ds)?;
    let all: Vec<Menu> = ds.menus().collect();
    Ok(LinkageReport {
        warp: Warp.holds(ds, &all),
        independence: Independence::new(&data).holds(ds, &all),
    })
}
