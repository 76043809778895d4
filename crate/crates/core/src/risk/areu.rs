//! Expected-utility representations with risk-ordered references:
//! parameters, simulation, ρ vectors, and fitting from data.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dataset::{Alternative, ChoiceDataset, Payload, PayloadKind};
use crate::lp::{Feasibility, LinearFeasibilityProblem, VarId};
use crate::menu::{Menu, MAX_UNIVERSE};
use crate::rational::{self, Rational};

use super::axioms::check_risk_reference_dependence;
use super::lottery::{extreme_spread, mps, weak_extreme_spread, Lottery, LotteryData, PrizeSet};
use super::RiskError;

/// Reference order over lotteries (highest first) and, per lottery, a
/// utility over prizes normalized to `u(w) = 0`, `u(b) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAreuParams", into = "RawAreuParams")]
pub struct AreuParams {
    pub prizes: Vec<Rational>,
    pub order: Vec<String>,
    pub lotteries: BTreeMap<String, Lottery>,
    pub utilities: BTreeMap<String, Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct RawAreuParams {
    prizes: Vec<serde_json::Value>,
    order: Vec<String>,
    #[serde(with = "crate::ordu::utility_table")]
    lotteries: BTreeMap<String, BTreeMap<String, Rational>>,
    #[serde(with = "crate::ordu::utility_table")]
    utilities: BTreeMap<String, BTreeMap<String, Rational>>,
}

fn by_prize(prizes: &[Rational], v: &[Rational]) -> BTreeMap<String, Rational> {
    prizes
        .iter()
        .zip(v)
        .map(|(x, u)| (rational::format(x), u.clone()))
        .collect()
}

fn dense(prizes: &[Rational], id: &str, m: &BTreeMap<String, Rational>, fill: bool) -> Result<Vec<Rational>, String> {
    let mut v = vec![None; prizes.len()];
    for (k, val) in m {
        let x = rational::parse(k).map_err(|e| e.to_string())?;
        let i = prizes
            .iter()
            .position(|p| *p == x)
            .ok_or_else(|| format!("`{id}` mentions prize {k} outside the prize list"))?;
        v[i] = Some(val.clone());
    }
    v.into_iter()
        .enumerate()
        .map(|(i, x)| match x {
            Some(x) => Ok(x),
            None if fill => Ok(Rational::zero()),
            None => Err(format!("`{id}` has no value at prize {}", rational::format(&prizes[i]))),
        })
        .collect()
}

impl TryFrom<RawAreuParams> for AreuParams {
    type Error = String;

    fn try_from(raw: RawAreuParams) -> Result<Self, String> {
        let prizes: Vec<Rational> = raw
            .prizes
            .iter()
            .map(|v| rational::serde_str::from_value(v).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let mut lotteries = BTreeMap::new();
        for (id, m) in &raw.lotteries {
            let v = dense(&prizes, id, m, true)?;
            lotteries.insert(id.clone(), Lottery::new(v).map_err(|e| format!("`{id}`: {e}"))?);
        }
        let mut utilities = BTreeMap::new();
        for (id, m) in &raw.utilities {
            utilities.insert(id.clone(), dense(&prizes, id, m, false)?);
        }
        let p = AreuParams {
            prizes,
            order: raw.order,
            lotteries,
            utilities,
        };
        p.validate().map_err(|e| e.to_string())?;
        Ok(p)
    }
}

impl From<AreuParams> for RawAreuParams {
    fn from(p: AreuParams) -> Self {
        RawAreuParams {
            prizes: p
                .prizes
                .iter()
                .map(|x| serde_json::Value::String(rational::format(x)))
                .collect(),
            order: p.order.clone(),
            lotteries: p
                .lotteries
                .iter()
                .map(|(id, l)| {
                    let m = by_prize(&p.prizes, &l.0)
                        .into_iter()
                        .filter(|(_, v)| !v.is_zero())
                        .collect();
                    (id.clone(), m)
                })
                .collect(),
            utilities: p
                .utilities
                .iter()
                .map(|(id, u)| (id.clone(), by_prize(&p.prizes, u)))
                .collect(),
        }
    }
}

/// Interior-prize utility-gap ratios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoVector(pub Vec<Rational>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Concavity {
    MoreConcave,
    LessConcave,
    Equal,
    Incomparable,
}

pub fn rho_vector(u: &[Rational]) -> Result<RhoVector, RiskError> {
    if u.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RiskError::NotIncreasing);
    }
    Ok(RhoVector(
        (1..u.len().saturating_sub(1))
            .map(|i| (&u[i] - &u[i - 1]) / (&u[i + 1] - &u[i - 1]))
            .collect(),
    ))
}

/// `MoreConcave` when every ρ of `u1` is at least that of `u2`.
pub fn concavity_compare(u1: &[Rational], u2: &[Rational]) -> Result<Concavity, RiskError> {
    let (r1, r2) = (rho_vector(u1)?, rho_vector(u2)?);
    if r1.0.len() != r2.0.len() {
        return Err(RiskError::PrizeSetMismatch(
            "utilities over different prize counts".into(),
        ));
    }
    let ge = r1.0.iter().zip(&r2.0).all(|(a, b)| a >= b);
    let le = r1.0.iter().zip(&r2.0).all(|(a, b)| a <= b);
    Ok(match (ge, le) {
        (true, true) => Concavity::Equal,
        (true, false) => Concavity::MoreConcave,
        (false, true) => Concavity::LessConcave,
        (false, false) => Concavity::Incomparable,
    })
}

/// The normalized utility with the given ρ vector.
pub fn utility_from_rho(rho: &RhoVector) -> Result<Vec<Rational>, RiskError> {
    if rho.0.iter().any(|r| !rational::is_in_open_unit(r)) {
        return Err(RiskError::NotIncreasing);
    }
    // u_{i+1} = (u_i - (1-ρ_i) u_{i-1}) / ρ_i, starting from u_0 = 0, u_1 = 1, then rescale.
    let mut u = vec![Rational::zero(), Rational::one()];
    for (i, r) in rho.0.iter().enumerate() {
        let next = (&u[i + 1] - (Rational::one() - r) * &u[i]) / r;
        u.push(next);
    }
    let top = u.last().unwrap().clone();
    Ok(u.into_iter().map(|x| x / &top).collect())
}

fn check_utility(prizes: usize, id: &str, u: &[Rational]) -> Result<(), RiskError> {
    let bad = |why: &str| RiskError::BadParams(format!("utility of `{id}` {why}"));
    if u.len() != prizes {
        return Err(bad("has the wrong length"));
    }
    if !u[0].is_zero() || !u[prizes - 1].is_one() {
        return Err(bad("is not normalized to 0 at the worst and 1 at the best prize"));
    }
    if u.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("is not strictly increasing"));
    }
    Ok(())
}

/// A choice that differs from the prediction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub menu: Vec<String>,
    pub observed: Vec<String>,
    pub predicted: Vec<String>,
}

impl AreuParams {
    pub fn prize_set(&self) -> Result<PrizeSet, RiskError> {
        PrizeSet::new(self.prizes.clone())
    }

    /// Structural checks: prize list, lotteries, order, normalized increasing utilities.
    pub fn validate(&self) -> Result<(), RiskError> {
        if self.prizes.len() < 2 || self.prizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RiskError::BadParams(
                "prizes must be strictly increasing, at least two".into(),
            ));
        }
        let n = self.prizes.len();
        for (id, l) in &self.lotteries {
            if l.len() != n {
                return Err(RiskError::BadParams(format!("lottery `{id}` has the wrong length")));
            }
        }
        let mut sorted = self.order.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) || !sorted.iter().eq(self.lotteries.keys()) {
            return Err(RiskError::BadParams(
                "order must list every lottery exactly once".into(),
            ));
        }
        for id in &self.order {
            let u = self
                .utilities
                .get(id)
                .ok_or_else(|| RiskError::BadParams(format!("no utility for `{id}`")))?;
            check_utility(n, id, u)?;
        }
        Ok(())
    }

    /// Risk-consistency of the order and the ρ chain along it.
    pub fn consistency_issues(&self) -> Result<Vec<String>, RiskError> {
        self.validate()?;
        let x = self.prize_set()?;
        let mut out = Vec::new();
        for (i, hi) in self.order.iter().enumerate() {
            for lo in &self.order[i + 1..] {
                let (p, q) = (&self.lotteries[hi], &self.lotteries[lo]);
                if mps(&x, p, q)? || extreme_spread(p, q)? {
                    out.push(format!("`{hi}` ranks above `{lo}` but is riskier"));
                }
            }
        }
        for w in self.order.windows(2) {
            if !matches!(
                concavity_compare(&self.utilities[&w[0]], &self.utilities[&w[1]])?,
                Concavity::MoreConcave | Concavity::Equal
            ) {
                out.push(format!(
                    "utility of `{}` is not more concave than that of `{}`",
                    w[0], w[1]
                ));
            }
        }
        Ok(out)
    }

    fn position(&self, id: &str) -> Result<usize, RiskError> {
        self.order
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| RiskError::UnknownLottery(id.to_string()))
    }

    pub fn reference<'a>(&self, menu: &'a [String]) -> Result<&'a str, RiskError> {
        let mut best: Option<(usize, &str)> = None;
        for id in menu {
            let p = self.position(id)?;
            if best.is_none_or(|(b, _)| p < b) {
                best = Some((p, id));
            }
        }
        best.map(|(_, id)| id)
            .ok_or_else(|| RiskError::BadParams("empty menu".into()))
    }

    pub fn expected_utility(&self, reference: &str, lottery: &str) -> Result<Rational, RiskError> {
        let l = self
            .lotteries
            .get(lottery)
            .ok_or_else(|| RiskError::UnknownLottery(lottery.to_string()))?;
        let u = self
            .utilities
            .get(reference)
            .ok_or_else(|| RiskError::UnknownLottery(reference.to_string()))?;
        Ok(l.expectation(u))
    }

    /// Expected-utility maximizers under the menu's reference utility, sorted.
    pub fn evaluate(&self, menu: &[String]) -> Result<Vec<String>, RiskError> {
        let r = self.reference(menu)?;
        let mut best: Option<Rational> = None;
        let mut out = Vec::new();
        for id in menu {
            let v = self.expected_utility(r, id)?;
            match &best {
                Some(b) if v < *b => {}
                Some(b) if v == *b => out.push(id.clone()),
                _ => {
                    best = Some(v);
                    out = vec![id.clone()];
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn alternative(&self, id: &str) -> Alternative {
        let probs = self
            .prizes
            .iter()
            .zip(&self.lotteries[id].0)
            .filter(|(_, p)| !p.is_zero())
            .map(|(x, p)| (x.clone(), p.clone()))
            .collect();
        Alternative {
            id: id.to_string(),
            payload: Payload::Lottery(probs),
        }
    }
}

/// Dataset with one observation per menu.
pub fn simulate_areu(params: &AreuParams, menus: &[Vec<String>]) -> Result<ChoiceDataset, RiskError> {
    params.validate()?;
    for id in menus.iter().flatten() {
        if !params.lotteries.contains_key(id) {
            return Err(RiskError::UnknownLottery(id.clone()));
        }
    }
    let ids: Vec<&String> = if params.lotteries.len() <= MAX_UNIVERSE {
        params.lotteries.keys().collect()
    } else {
        let mut v: Vec<&String> = menus.iter().flatten().collect();
        v.sort();
        v.dedup();
        v
    };
    let alts = ids.iter().map(|id| params.alternative(id)).collect();
    let mut ds = ChoiceDataset::empty(PayloadKind::Lottery, alts)?.with_prizes(Some(params.prizes.clone()));
    for m in menus {
        let menu = ds.menu_of(m)?;
        let choice = ds.menu_of(&params.evaluate(m)?)?;
        ds.insert(menu, choice)?;
    }
    Ok(ds)
}

/// Observed menus whose prediction differs. Payloads must match the params.
pub fn verify_areu(params: &AreuParams, ds: &ChoiceDataset) -> Result<Vec<Mismatch>, RiskError> {
    params.validate()?;
    let data = LotteryData::from_dataset(ds)?;
    let x = params.prize_set()?;
    for (i, a) in ds.alternatives().iter().enumerate() {
        let mine = params
            .lotteries
            .get(&a.id)
            .ok_or_else(|| RiskError::UnknownLottery(a.id.clone()))?;
        let theirs = x.lottery(data.prizes.prizes().iter().zip(&data.lotteries[i].0))?;
        if *mine != theirs {
            return Err(RiskError::PrizeSetMismatch(format!(
                "lottery `{}` differs from the params",
                a.id
            )));
        }
    }
    let mut out = Vec::new();
    for (m, c) in ds.observations() {
        let ids = ds.ids(m);
        let predicted = params.evaluate(&ids)?;
        let observed = ds.ids(c);
        if predicted != observed {
            out.push(Mismatch {
                menu: ids,
                observed,
                predicted,
            });
        }
    }
    Ok(out)
}

/// Utilities of the references actually used by observed menus all agree.
pub fn class_utilities_coincide(params: &AreuParams, ds: &ChoiceDataset) -> Result<bool, RiskError> {
    let mut used = Vec::new();
    for m in ds.menus() {
        let ids = ds.ids(m);
        used.push(&params.utilities[params.reference(&ids)?]);
    }
    Ok(used.windows(2).all(|w| w[0] == w[1]))
}

/// `above[y]`: lotteries that any risk-consistent order must put above `y`.
/// Includes limits of extreme spreads unless that creates a cycle.
pub fn forced_above(data: &LotteryData) -> Vec<Menu> {
    let n = data.lotteries.len();
    let riskier = data.riskier_matrix();
    let build = |weak: bool| {
        let mut above = vec![Menu::EMPTY; n];
        for y in 0..n {
            for x in 0..n {
                let (p, q) = (&data.lotteries[y], &data.lotteries[x]);
                if x != y && (riskier[y][x] || (weak && weak_extreme_spread(p, q).unwrap_or(false))) {
                    above[y] = above[y].with(x);
                }
            }
        }
        above
    };
    let weak = build(true);
    if acyclic(&weak) {
        weak
    } else {
        build(false)
    }
}

fn acyclic(above: &[Menu]) -> bool {
    let n = above.len();
    let mut placed = Menu::EMPTY;
    for _ in 0..n {
        match (0..n).find(|&x| !placed.contains(x) && above[x].minus(placed.with(x)).is_empty()) {
            Some(x) => placed = placed.with(x),
            None => return false,
        }
    }
    true
}

/// Affine form over prize utilities: interior coefficients plus a constant
/// from the fixed endpoints.
fn affine(vars: &[VarId], coeffs: &[Rational]) -> (Vec<(VarId, Rational)>, Rational) {
    let n = coeffs.len();
    let terms = (1..n - 1)
        .filter(|&i| !coeffs[i].is_zero())
        .map(|i| (vars[i - 1], coeffs[i].clone()))
        .collect();
    (terms, coeffs[n - 1].clone())
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scale(a: &[Rational], k: &Rational) -> Vec<Rational> {
    a.iter().map(|x| x * k).collect()
}

/// EU rationalization of one reference class with ρ bounds.
struct ClassProblem<'a> {
    lotteries: &'a [Lottery],
    menus: Vec<(Menu, Menu)>,
    n: usize,
}

impl ClassProblem<'_> {
    fn build(&self, lower: &[Rational], upper: Option<&[Rational]>) -> (LinearFeasibilityProblem, Vec<VarId>) {
        let n = self.n;
        let mut lp = LinearFeasibilityProblem::new();
        let vars: Vec<VarId> = (1..n - 1).map(|i| lp.var(format!("u{i}"))).collect();
        let add = |lp: &mut LinearFeasibilityProblem, coeffs: Vec<Rational>, strict: bool| {
            let (t, c) = affine(&vars, &coeffs);
            if strict {
                lp.gt(t, -c);
            } else {
                lp.ge(t, -c);
            }
        };
        for i in 0..n - 1 {
            add(&mut lp, sub(&unit(n, i + 1), &unit(n, i)), true);
        }
        for &(m, c) in &self.menus {
            let x = c.first().unwrap();
            for y in c.without(x).iter() {
                let d = sub(&self.lotteries[x].0, &self.lotteries[y].0);
                add(&mut lp, d.clone(), false);
                add(&mut lp, scale(&d, &-Rational::one()), false);
            }
            for y in m.minus(c).iter() {
                add(&mut lp, sub(&self.lotteries[x].0, &self.lotteries[y].0), true);
            }
        }
        for i in 1..n - 1 {
            let gap_lo = sub(&unit(n, i), &unit(n, i - 1));
            let span = sub(&unit(n, i + 1), &unit(n, i - 1));
            if !lower[i - 1].is_zero() {
                add(&mut lp, sub(&gap_lo, &scale(&span, &lower[i - 1])), false);
            }
            if let Some(up) = upper {
                add(&mut lp, sub(&scale(&span, &up[i - 1]), &gap_lo), false);
            }
        }
        (lp, vars)
    }

    fn solve(&self, lower: &[Rational], upper: Option<&[Rational]>) -> Option<Vec<Rational>> {
        let (lp, vars) = self.build(lower, upper);
        match lp.solve() {
            Feasibility::Feasible(a) => {
                let mut u = vec![Rational::zero()];
                u.extend(vars.iter().map(|v| a.get(*v).clone()));
                u.push(Rational::one());
                Some(u)
            }
            Feasibility::Infeasible => None,
        }
    }

    /// Utility with coordinatewise-greedy largest ρ on the grid, below `upper`.
    fn most_concave(&self, upper: Option<&[Rational]>, grid: i64) -> Option<Vec<Rational>> {
        let k = self.n.saturating_sub(2);
        let mut lower = vec![Rational::zero(); k];
        self.solve(&lower, upper)?;
        let g = Rational::from_integer(BigInt::from(grid));
        for i in 0..k {
            let mut hi = grid - 1;
            if let Some(up) = upper {
                let cap = (&up[i] * &g).floor().to_integer();
                hi = hi.min(i64::try_from(cap).unwrap_or(grid - 1));
            }
            let mut lo = 0i64;
            while lo < hi {
                let mid = (lo + hi + 1) / 2;
                lower[i] = Rational::new(BigInt::from(mid), BigInt::from(grid));
                if self.solve(&lower, upper).is_some() {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            lower[i] = Rational::new(BigInt::from(lo), BigInt::from(grid));
        }
        self.solve(&lower, upper)
    }
}

const SEARCH_BUDGET: usize = 4000;

struct Search<'a> {
    ds: &'a ChoiceDataset,
    data: &'a LotteryData,
    above: Vec<Menu>,
    grid: i64,
    budget: usize,
    candidates_order: Vec<usize>,
}

enum Outcome {
    Found,
    Dead,
    OutOfBudget,
}

impl Search<'_> {
    fn class(&self, remaining: Menu, x: usize) -> Vec<(Menu, Menu)> {
        self.ds
            .observations()
            .filter(|(m, _)| m.contains(x) && m.is_subset(remaining))
            .collect()
    }

    fn go(
        &mut self,
        mut remaining: Menu,
        cap: Option<&[Rational]>,
        ranking: &mut Vec<usize>,
        fitted: &mut BTreeMap<usize, Vec<Rational>>,
    ) -> Outcome {
        let mark = ranking.len();
        // Lotteries heading no remaining menu go next at no cost.
        loop {
            let free = self.candidates_order.iter().copied().find(|&x| {
                remaining.contains(x) && !self.above[x].intersects(remaining) && self.class(remaining, x).is_empty()
            });
            match free {
                Some(x) => {
                    ranking.push(x);
                    remaining = remaining.without(x);
                }
                None => break,
            }
        }
        if remaining.is_empty() {
            return Outcome::Found;
        }
        let cands: Vec<usize> = self
            .candidates_order
            .iter()
            .copied()
            .filter(|&x| remaining.contains(x) && !self.above[x].intersects(remaining))
            .collect();
        for x in cands {
            if self.budget == 0 {
                return Outcome::OutOfBudget;
            }
            self.budget -= 1;
            let problem = ClassProblem {
                lotteries: &self.data.lotteries,
                menus: self.class(remaining, x),
                n: self.data.prizes.len(),
            };
            let Some(u) = problem.most_concave(cap, self.grid) else {
                continue;
            };
            let rho = rho_vector(&u).expect("strictly increasing by construction").0;
            ranking.push(x);
            fitted.insert(x, u);
            match self.go(remaining.without(x), Some(&rho), ranking, fitted) {
                Outcome::Found => return Outcome::Found,
                Outcome::OutOfBudget => return Outcome::OutOfBudget,
                Outcome::Dead => {
                    ranking.pop();
                    fitted.remove(&x);
                }
            }
        }
        ranking.truncate(mark);
        Outcome::Dead
    }
}

/// Finds an order and per-reference utilities reproducing the data.
pub fn fit_areu(ds: &ChoiceDataset) -> Result<AreuParams, RiskError> {
    let data = LotteryData::from_dataset(ds)?;
    let rd = check_risk_reference_dependence(ds)?;
    if !rd.passes() {
        return Err(RiskError::AxiomFails(rd.failures));
    }
    let mut cands: Vec<usize> = (0..ds.len_universe()).collect();
    cands.sort_by(|&a, &b| data.lotteries[a].cmp(&data.lotteries[b]).then(a.cmp(&b)));
    let mut exhausted = false;
    for grid in [64, 512] {
        let mut s = Search {
            ds,
            data: &data,
            above: forced_above(&data),
            grid,
            budget: SEARCH_BUDGET,
            candidates_order: cands.clone(),
        };
        let mut ranking = Vec::new();
        let mut fitted = BTreeMap::new();
        match s.go(ds.universe(), None, &mut ranking, &mut fitted) {
            Outcome::Found => return Ok(assemble(ds, &data, &ranking, &fitted)),
            Outcome::OutOfBudget => exhausted = true,
            Outcome::Dead => {}
        }
    }
    Err(RiskError::Infeasible(if exhausted {
        "search budget exhausted without a certificate".into()
    } else {
        "no risk-consistent order admits nested expected-utility classes".into()
    }))
}

fn assemble(
    ds: &ChoiceDataset,
    data: &LotteryData,
    ranking: &[usize],
    fitted: &BTreeMap<usize, Vec<Rational>>,
) -> AreuParams {
    let n = data.prizes.len();
    let linear: Vec<Rational> = {
        let p = data.prizes.prizes();
        let span = &p[n - 1] - &p[0];
        p.iter().map(|x| (x - &p[0]) / &span).collect()
    };
    let mut utilities = BTreeMap::new();
    for (pos, &x) in ranking.iter().enumerate() {
        let u = fitted.get(&x).cloned().unwrap_or_else(|| {
            ranking[pos + 1..]
                .iter()
                .find_map(|y| fitted.get(y))
                .or_else(|| ranking[..pos].iter().rev().find_map(|y| fitted.get(y)))
                .cloned()
                .unwrap_or_else(|| linear.clone())
        });
        utilities.insert(ds.id(x).to_string(), u);
    }
    AreuParams {
        prizes: data.prizes.prizes().to_vec(),
        order: ranking.iter().map(|&x| ds.id(x).to_string()).collect(),
        lotteries: (0..ds.len_universe())
            .map(|i| (ds.id(i).to_string(), data.lotteries[i].clone()))
            .collect(),
        utilities,
    }
}
