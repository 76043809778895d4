//! Discounted utility with a discount factor set by the earliest payment.
//!
//! Parameters are kept in log form: `L(x) = log u(x)` and `D(r) = log δ_r`,
//! so `(x, t)` is worth `t·D(r) + L(x)` under reference time `r`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dataset::{Alternative, ChoiceDataset, DatedPayment, Payload, PayloadKind};
use crate::lp::{Feasibility, LinearFeasibilityProblem};
use crate::menu::Menu;
use crate::property::ViolationWitness;
use crate::rational::{self, Rational};

use super::axioms::{
    check_outcome_monotonicity_impatience, check_present_bias, check_time_reference_dependence, earliest_payments,
    payments,
};
use super::TimeError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPbdu", into = "RawPbdu")]
pub struct PbduParams {
    log_utility: BTreeMap<Rational, Rational>,
    log_discount: BTreeMap<Rational, Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawPbdu {
    log_utility: BTreeMap<String, serde_json::Value>,
    log_discount: BTreeMap<String, serde_json::Value>,
    /// exp of the log values; for reading only.
    #[serde(default, skip_deserializing)]
    display_approx: BTreeMap<String, BTreeMap<String, f64>>,
}

fn parse_table(m: &BTreeMap<String, serde_json::Value>) -> Result<BTreeMap<Rational, Rational>, String> {
    m.iter()
        .map(|(k, v)| {
            let k = rational::parse(k).map_err(|e| e.to_string())?;
            let v = rational::serde_str::from_value(v).map_err(|e| e.to_string())?;
            Ok((k, v))
        })
        .collect()
}

fn show_table(m: &BTreeMap<Rational, Rational>) -> BTreeMap<String, serde_json::Value> {
    m.iter()
        .map(|(k, v)| (rational::format(k), serde_json::Value::String(rational::format(v))))
        .collect()
}

impl TryFrom<RawPbdu> for PbduParams {
    type Error = String;
    fn try_from(raw: RawPbdu) -> Result<Self, String> {
        PbduParams::new(parse_table(&raw.log_utility)?, parse_table(&raw.log_discount)?).map_err(|e| e.to_string())
    }
}

impl From<PbduParams> for RawPbdu {
    fn from(p: PbduParams) -> Self {
        let exp = |m: &BTreeMap<Rational, Rational>| -> BTreeMap<String, f64> {
            m.iter()
                .map(|(k, v)| (rational::format(k), rational::to_f64(v).exp()))
                .collect()
        };
        let mut display = BTreeMap::new();
        display.insert("u".to_string(), exp(&p.log_utility));
        display.insert("delta".to_string(), exp(&p.log_discount));
        RawPbdu {
            log_utility: show_table(&p.log_utility),
            log_discount: show_table(&p.log_discount),
            display_approx: display,
        }
    }
}

impl PbduParams {
    /// `L` strictly increasing in the amount; `D` negative and nondecreasing in time.
    pub fn new(
        log_utility: BTreeMap<Rational, Rational>,
        log_discount: BTreeMap<Rational, Rational>,
    ) -> Result<Self, TimeError> {
        if log_utility.is_empty() || log_discount.is_empty() {
            return Err(TimeError::BadParams(
                "utility and discount tables must be nonempty".into(),
            ));
        }
        if log_utility.keys().any(|x| !x.is_positive()) {
            return Err(TimeError::BadParams("amounts must be positive".into()));
        }
        let lv: Vec<&Rational> = log_utility.values().collect();
        if lv.windows(2).any(|w| w[1] <= w[0]) {
            return Err(TimeError::BadParams(
                "log utility must be strictly increasing in the amount".into(),
            ));
        }
        if log_discount.keys().any(|t| t.is_negative()) {
            return Err(TimeError::BadParams("reference times must be nonnegative".into()));
        }
        if log_discount.values().any(|d| !d.is_negative()) {
            return Err(TimeError::BadParams("discount factors must lie in (0,1)".into()));
        }
        let dv: Vec<&Rational> = log_discount.values().collect();
        if dv.windows(2).any(|w| w[1] < w[0]) {
            return Err(TimeError::BadParams(
                "discount factors must be nondecreasing in the reference time".into(),
            ));
        }
        Ok(PbduParams {
            log_utility,
            log_discount,
        })
    }

    pub fn log_utility(&self) -> &BTreeMap<Rational, Rational> {
        &self.log_utility
    }

    pub fn log_discount(&self) -> &BTreeMap<Rational, Rational> {
        &self.log_discount
    }

    pub fn utility(&self, amount: &Rational) -> Result<&Rational, TimeError> {
        self.log_utility
            .get(amount)
            .ok_or_else(|| TimeError::UnknownAmount(rational::format(amount)))
    }

    /// `D(r)`, extended as a step function: the last known value at or
    /// before `r`, or the first known value before the table starts.
    pub fn discount(&self, r: &Rational) -> &Rational {
        self.log_discount
            .range(..=r.clone())
            .next_back()
            .or_else(|| self.log_discount.iter().next())
            .map(|(_, d)| d)
            .unwrap()
    }

    pub fn value(&self, reference: &Rational, p: &DatedPayment) -> Result<Rational, TimeError> {
        Ok(&p.time * self.discount(reference) + self.utility(&p.amount)?)
    }

    /// Indices of the maximizers within `menu`.
    pub fn choose(&self, pay: &[DatedPayment], menu: Menu) -> Result<Menu, TimeError> {
        let r = menu
            .iter()
            .map(|i| &pay[i].time)
            .min()
            .ok_or_else(|| TimeError::BadParams("empty menu".into()))?;
        let mut best: Option<Rational> = None;
        let mut out = Menu::EMPTY;
        for i in menu.iter() {
            let v = self.value(r, &pay[i])?;
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

    pub fn all_discounts_equal(&self) -> bool {
        let v: Vec<&Rational> = self.log_discount.values().collect();
        v.windows(2).all(|w| w[0] == w[1])
    }
}

/// Dataset over `universe` with one observation per menu.
pub fn simulate_pbdu(
    params: &PbduParams,
    universe: &ChoiceDataset,
    menus: &[Menu],
) -> Result<ChoiceDataset, TimeError> {
    let pay = payments(universe)?;
    let mut ds = universe.cleared();
    for &m in menus {
        ds.insert(m, params.choose(&pay, m)?)?;
    }
    Ok(ds)
}

/// Dated-payment universe from `(id, amount, time)` triples.
pub fn payment_universe(items: &[(String, Rational, Rational)]) -> Result<ChoiceDataset, TimeError> {
    let alts = items
        .iter()
        .map(|(id, amount, time)| Alternative {
            id: id.clone(),
            payload: Payload::Dated(DatedPayment {
                amount: amount.clone(),
                time: time.clone(),
            }),
        })
        .collect();
    Ok(ChoiceDataset::empty(PayloadKind::DatedPayment, alts)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimeMismatch {
    pub menu: Vec<String>,
    pub observed: Vec<String>,
    pub predicted: Vec<String>,
}

pub fn verify_pbdu(params: &PbduParams, ds: &ChoiceDataset) -> Result<Vec<TimeMismatch>, TimeError> {
    let pay = payments(ds)?;
    let mut out = Vec::new();
    for (m, c) in ds.observations() {
        let pred = params.choose(&pay, m)?;
        if pred != c {
            out.push(TimeMismatch {
                menu: ds.ids(m),
                observed: ds.ids(c),
                predicted: ds.ids(pred),
            });
        }
    }
    Ok(out)
}

/// Violations of the axioms the representation needs.
pub fn pbdu_axiom_battery(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>, TimeError> {
    let mut w = check_outcome_monotonicity_impatience(ds)?;
    w.extend(check_time_reference_dependence(ds)?);
    w.extend(check_present_bias(ds)?);
    Ok(w)
}

/// Solves for `L` over observed amounts and `D` over observed reference times.
pub fn fit_pbdu(ds: &ChoiceDataset) -> Result<PbduParams, TimeError> {
    let pay = payments(ds)?;
    let battery = pbdu_axiom_battery(ds)?;
    if !battery.is_empty() {
        return Err(TimeError::AxiomFails(battery));
    }
    let mut lp = LinearFeasibilityProblem::new();
    let mut amounts: Vec<&Rational> = pay.iter().map(|p| &p.amount).collect();
    amounts.sort();
    amounts.dedup();
    let refs: Vec<Rational> = {
        let mut v: Vec<Rational> = ds
            .menus()
            .map(|m| pay[earliest_payments(&pay, m).first().unwrap()].time.clone())
            .collect();
        v.sort();
        v.dedup();
        v
    };
    let lvar: BTreeMap<&Rational, _> = amounts
        .iter()
        .map(|x| (*x, lp.var(format!("L({})", rational::format(x)))))
        .collect();
    let dvar: BTreeMap<&Rational, _> = refs
        .iter()
        .map(|r| (r, lp.var(format!("D({})", rational::format(r)))))
        .collect();
    let one = Rational::from_integer(1.into());
    let zero = Rational::zero();
    lp.eq(vec![(lvar[amounts[0]], one.clone())], zero.clone());
    for w in amounts.windows(2) {
        lp.gt(
            vec![(lvar[w[1]], one.clone()), (lvar[w[0]], -one.clone())],
            zero.clone(),
        );
    }
    for r in &refs {
        lp.lt(vec![(dvar[r], one.clone())], zero.clone());
    }
    for w in refs.windows(2) {
        lp.ge(
            vec![(dvar[&w[1]], one.clone()), (dvar[&w[0]], -one.clone())],
            zero.clone(),
        );
    }
    for (m, c) in ds.observations() {
        let r = &pay[earliest_payments(&pay, m).first().unwrap()].time;
        let x = c.first().unwrap();
        // value(x) - value(y) = (t_x - t_y) D(r) + L(x_amt) - L(y_amt)
        let diff = |y: usize| {
            vec![
                (dvar[r], &pay[x].time - &pay[y].time),
                (lvar[&pay[x].amount], one.clone()),
                (lvar[&pay[y].amount], -one.clone()),
            ]
        };
        for y in c.without(x).iter() {
            lp.eq(diff(y), zero.clone());
        }
        for y in m.minus(c).iter() {
            lp.gt(diff(y), zero.clone());
        }
    }
    let Feasibility::Feasible(a) = lp.solve() else {
        return Err(TimeError::Infeasible(
            "no log utility and discount schedule reproduces the data".into(),
        ));
    };
    // every constraint is homogeneous, so rescaling keeps the solution valid
    let scale = amounts
        .iter()
        .map(|x| a.get(lvar[x]).abs())
        .chain(refs.iter().map(|r| a.get(dvar[r]).abs()))
        .max()
        .unwrap();
    let log_utility = amounts
        .iter()
        .map(|x| ((*x).clone(), a.get(lvar[x]) / &scale))
        .collect();
    let log_discount = refs.iter().map(|r| (r.clone(), a.get(dvar[r]) / &scale)).collect();
    let params = PbduParams::new(log_utility, log_discount)?;
    debug_assert!(verify_pbdu(&params, ds)?.is_empty());
    Ok(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum BinaryPick {
    Earlier,
    Both,
    Later,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwitchingReport {
    pub picks: Vec<BinaryPick>,
    pub switches: usize,
    /// First shift at which the choice moves back toward the earlier payment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reversal_at: Option<String>,
}

impl SwitchingReport {
    pub fn passes(&self) -> bool {
        self.reversal_at.is_none()
    }
}

/// Postpones `(x, t)` and `(y, t')` by each shift and records the binary choice;
/// it may move from earlier to later at most once and never back.
pub fn single_switching_check(
    params: &PbduParams,
    earlier: &DatedPayment,
    later: &DatedPayment,
    shifts: &[Rational],
) -> Result<SwitchingReport, TimeError> {
    if earlier.amount >= later.amount || earlier.time >= later.time {
        return Err(TimeError::BadParams(
            "need a smaller-sooner and a larger-later payment".into(),
        ));
    }
    let mut picks = Vec::new();
    for s in shifts {
        let e = DatedPayment {
            amount: earlier.amount.clone(),
            time: &earlier.time + s,
        };
        let l = DatedPayment {
            amount: later.amount.clone(),
            time: &later.time + s,
        };
        let ve = params.value(&e.time, &e)?;
        let vl = params.value(&e.time, &l)?;
        picks.push(match ve.cmp(&vl) {
            std::cmp::Ordering::Greater => BinaryPick::Earlier,
            std::cmp::Ordering::Equal => BinaryPick::Both,
            std::cmp::Ordering::Less => BinaryPick::Later,
        });
    }
    let switches = picks.windows(2).filter(|w| w[0] != w[1]).count();
    let reversal_at = picks
        .windows(2)
        .position(|w| w[1] < w[0])
        .map(|i| rational::format(&shifts[i + 1]));
    Ok(SwitchingReport {
        picks,
        switches,
        reversal_at,
    })
}
