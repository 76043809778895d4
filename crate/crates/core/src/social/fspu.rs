//! Social preference utility `x + v_r(y)` with `r` the attainable equality.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dataset::{Alternative, ChoiceDataset, IncomeSplit, Payload, PayloadKind};
use crate::lp::{Feasibility, LinearFeasibilityProblem};
use crate::menu::Menu;
use crate::property::ViolationWitness;
use crate::rational::{self, Rational};

use super::axioms::{
    attainable_equality, check_equality_reference_dependence, check_fairness, check_social_monotonicity, splits,
};
use super::SocialError;

type Table = BTreeMap<Rational, BTreeMap<Rational, Rational>>;

/// `v[r][y]`, one strictly increasing map per reference Gini `r`, all on
/// the same grid of `y` values. Smaller `r` carries weakly larger increments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFspu", into = "RawFspu")]
pub struct FspuParams {
    v: Table,
}

#[derive(Serialize, Deserialize)]
struct RawFspu {
    v: BTreeMap<String, BTreeMap<String, serde_json::Value>>,
}

impl TryFrom<RawFspu> for FspuParams {
    type Error = String;
    fn try_from(raw: RawFspu) -> Result<Self, String> {
        let key = |k: &str| rational::parse(k).map_err(|e| e.to_string());
        let mut v = Table::new();
        for (r, row) in &raw.v {
            let mut out = BTreeMap::new();
            for (y, val) in row {
                out.insert(
                    key(y)?,
                    rational::serde_str::from_value(val).map_err(|e| e.to_string())?,
                );
            }
            v.insert(key(r)?, out);
        }
        FspuParams::new(v).map_err(|e| e.to_string())
    }
}

impl From<FspuParams> for RawFspu {
    fn from(p: FspuParams) -> Self {
        let v =
            p.v.iter()
                .map(|(r, row)| {
                    let row = row
                        .iter()
                        .map(|(y, val)| (rational::format(y), serde_json::Value::String(rational::format(val))))
                        .collect();
                    (rational::format(r), row)
                })
                .collect();
        RawFspu { v }
    }
}

fn increments(row: &BTreeMap<Rational, Rational>) -> Vec<Rational> {
    let vals: Vec<&Rational> = row.values().collect();
    vals.windows(2).map(|w| w[1] - w[0]).collect()
}

impl FspuParams {
    pub fn new(v: Table) -> Result<Self, SocialError> {
        let Some(first) = v.values().next() else {
            return Err(SocialError::BadParams("no reference values".into()));
        };
        if first.is_empty() {
            return Err(SocialError::BadParams("empty payment grid".into()));
        }
        let half = Rational::new(1.into(), 2.into());
        for (r, row) in &v {
            if *r < Rational::zero() || *r >= half {
                return Err(SocialError::BadParams(format!(
                    "reference {} is not a Gini value",
                    rational::format(r)
                )));
            }
            if !row.keys().eq(first.keys()) {
                return Err(SocialError::BadParams(
                    "every reference must use the same payment grid".into(),
                ));
            }
            if increments(row).iter().any(|d| *d <= Rational::zero()) {
                return Err(SocialError::BadParams(format!(
                    "v at reference {} is not strictly increasing",
                    rational::format(r)
                )));
            }
        }
        let rows: Vec<(&Rational, Vec<Rational>)> = v.iter().map(|(r, row)| (r, increments(row))).collect();
        for w in rows.windows(2) {
            if w[0].1.iter().zip(&w[1].1).any(|(lo, hi)| lo < hi) {
                return Err(SocialError::BadParams(format!(
                    "reference {} has a smaller increment than the less equal reference {}",
                    rational::format(w[0].0),
                    rational::format(w[1].0)
                )));
            }
        }
        Ok(FspuParams { v })
    }

    pub fn table(&self) -> &Table {
        &self.v
    }

    /// Row used at reference `r`: the last one at or below `r`, else the first.
    pub fn row(&self, r: &Rational) -> &BTreeMap<Rational, Rational> {
        self.v
            .range(..=r.clone())
            .next_back()
            .or_else(|| self.v.iter().next())
            .map(|(_, row)| row)
            .unwrap()
    }

    pub fn value(&self, r: &Rational, s: &IncomeSplit) -> Result<Rational, SocialError> {
        let v = self
            .row(r)
            .get(&s.other)
            .ok_or_else(|| SocialError::UnknownPayment(rational::format(&s.other)))?;
        Ok(&s.own + v)
    }

    pub fn choose(&self, sp: &[IncomeSplit], menu: Menu) -> Result<Menu, SocialError> {
        let r = attainable_equality(sp, menu).ok_or_else(|| SocialError::BadParams("empty menu".into()))?;
        let mut best: Option<Rational> = None;
        let mut out = Menu::EMPTY;
        for i in menu.iter() {
            let v = self.value(&r, &sp[i])?;
            match &best {
                Some(b) if v < *b => {}
                Some(b) if v == *b => out = out.with(i),
                _ => {
                    best = Some(v);
                    out = Menu::singleton(i);
                }
            }
        }
        Ok(out)
    }

    /// True when every reference has the same increments.
    pub fn is_single_utility(&self) -> bool {
        let rows: Vec<Vec<Rational>> = self.v.values().map(increments).collect();
        rows.windows(2).all(|w| w[0] == w[1])
    }
}

/// Income-split universe from `(id, own, other)` triples.
pub fn split_universe(items: &[(String, Rational, Rational)]) -> Result<ChoiceDataset, SocialError> {
    let alts = items
        .iter()
        .map(|(id, own, other)| Alternative {
            id: id.clone(),
            payload: Payload::Split(IncomeSplit {
                own: own.clone(),
                other: other.clone(),
            }),
        })
        .collect();
    Ok(ChoiceDataset::empty(PayloadKind::IncomeSplit, alts)?)
}

pub fn simulate_fspu(
    params: &FspuParams,
    universe: &ChoiceDataset,
    menus: &[Menu],
) -> Result<ChoiceDataset, SocialError> {
    let sp = splits(universe)?;
    let mut ds = universe.cleared();
    for &m in menus {
        ds.insert(m, params.choose(&sp, m)?)?;
    }
    Ok(ds)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SocialMismatch {
    pub menu: Vec<String>,
    pub observed: Vec<String>,
    pub predicted: Vec<String>,
}

pub fn verify_fspu(params: &FspuParams, ds: &ChoiceDataset) -> Result<Vec<SocialMismatch>, SocialError> {
    let sp = splits(ds)?;
    let mut out = Vec::new();
    for (m, c) in ds.observations() {
        let pred = params.choose(&sp, m)?;
        if pred != c {
            out.push(SocialMismatch {
                menu: ds.ids(m),
                observed: ds.ids(c),
                predicted: ds.ids(pred),
            });
        }
    }
    Ok(out)
}

pub fn fspu_axiom_battery(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, SocialError> {
    let mut w = check_social_monotonicity(ds)?;
    w.extend(check_equality_reference_dependence(ds)?);
    w.extend(check_fairness(ds)?);
    Ok(w)
}

/// Solves for `v_r(y)` on the observed references and payments, with
/// `v_r` pinned to zero at the smallest payment.
pub fn fit_fspu(ds: &ChoiceDataset) -> Result<FspuParams, SocialError> {
    let sp = splits(ds)?;
    let battery = fspu_axiom_battery(ds)?;
    if !battery.is_empty() {
        return Err(SocialError::AxiomFails(battery));
    }
    if ds.num_observations() == 0 {
        return Err(SocialError::Infeasible("no observations to fit".into()));
    }
    let mut ys: Vec<Rational> = sp.iter().map(|s| s.other.clone()).collect();
    ys.sort();
    ys.dedup();
    let mut refs: Vec<Rational> = ds.menus().filter_map(|m| attainable_equality(&sp, m)).collect();
    refs.sort();
    refs.dedup();
    let mut lp = LinearFeasibilityProblem::new();
    let mut var = BTreeMap::new();
    for r in &refs {
        for y in &ys {
            let id = lp.var(format!("v[{}]({})", rational::format(r), rational::format(y)));
            var.insert((r.clone(), y.clone()), id);
        }
    }
    let one = Rational::one();
    let zero = Rational::zero();
    let inc = |r: &Rational, k: usize, sign: &Rational| {
        vec![
            (var[&(r.clone(), ys[k + 1].clone())], sign.clone()),
            (var[&(r.clone(), ys[k].clone())], -sign.clone()),
        ]
    };
    for r in &refs {
        lp.eq(vec![(var[&(r.clone(), ys[0].clone())], one.clone())], zero.clone());
        for k in 0..ys.len() - 1 {
            lp.gt(inc(r, k, &one), zero.clone());
        }
    }
    for w in refs.windows(2) {
        for k in 0..ys.len() - 1 {
            let mut terms = inc(&w[0], k, &one);
            terms.extend(inc(&w[1], k, &-one.clone()));
            lp.ge(terms, zero.clone());
        }
    }
    for (m, c) in ds.observations() {
        let r = attainable_equality(&sp, m).unwrap();
        let x = c.first().unwrap();
        // (own_x - own_y) + v_r(y_x) - v_r(y_y) against zero
        let diff = |y: usize| {
            let rhs = &sp[y].own - &sp[x].own;
            let mut terms = vec![(var[&(r.clone(), sp[x].other.clone())], one.clone())];
            terms.push((var[&(r.clone(), sp[y].other.clone())], -one.clone()));
            (terms, rhs)
        };
        for y in c.without(x).iter() {
            let (t, rhs) = diff(y);
            lp.eq(t, rhs);
        }
        for y in m.minus(c).iter() {
            let (t, rhs) = diff(y);
            lp.gt(t, rhs);
        }
    }
    let Feasibility::Feasible(a) = lp.solve() else {
        return Err(SocialError::Infeasible(
            "no family of increasing utilities reproduces the data".into(),
        ));
    };
    let v = refs
        .iter()
        .map(|r| {
            let row = ys
                .iter()
                .map(|y| (y.clone(), a.get(var[&(r.clone(), y.clone())]).clone()))
                .collect();
            (r.clone(), row)
        })
        .collect();
    let params = FspuParams::new(v)?;
    debug_assert!(verify_fspu(&params, ds)?.is_empty());
    Ok(params)
}
