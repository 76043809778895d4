//! Ordered-reference dependent utility: construction from data,
//! evaluation, simulation, and the necessary condition for unions.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::dataset::{ChoiceDataset, DatasetError};
use crate::engine::{
    check_reference_dependence, layered_order, reference_classes, synthesize_reference_order, EngineError, IdentityPsi,
    RdFailure, ReferenceOrder,
};
use crate::menu::Menu;
use crate::property::Warp;
use crate::rational::{int, Rational};

/// Reference order (highest first) and one utility per reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrduParams {
    pub order: Vec<String>,
    #[serde(with = "utility_table")]
    pub utilities: BTreeMap<String, BTreeMap<String, Rational>>,
}

pub(crate) mod utility_table {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &BTreeMap<String, BTreeMap<String, Rational>>, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<&String, BTreeMap<&String, String>> = t
            .iter()
            .map(|(r, u)| (r, u.iter().map(|(a, v)| (a, crate::rational::format(v))).collect()))
            .collect();
        m.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<String, BTreeMap<String, Rational>>, D::Error> {
        let m: BTreeMap<String, BTreeMap<String, serde_json::Value>> = BTreeMap::deserialize(d)?;
        m.into_iter()
            .map(|(r, u)| {
                let u = u
                    .into_iter()
                    .map(|(a, v)| {
                        crate::rational::serde_str::from_value(&v)
                            .map(|x| (a, x))
                            .map_err(serde::de::Error::custom)
                    })
                    .collect::<Result<_, _>>()?;
                Ok((r, u))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrduError {
    #[error("reference dependence fails")]
    AxiomFails(Vec<RdFailure>),
    #[error("observations are not closed under subsets of observed menus")]
    NotSubsetClosed,
    #[error("unknown alternative `{0}`")]
    UnknownAlternative(String),
    #[error("no utility for `{alt}` under reference `{reference}`")]
    MissingUtility { reference: String, alt: String },
    #[error("union of the parts is not observed")]
    UnionUnobserved,
    #[error("construction did not reproduce the data: {0}")]
    Construction(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Engine(EngineError),
}

impl From<EngineError> for OrduError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::AxiomFails(f) => OrduError::AxiomFails(f),
            other => OrduError::Engine(other),
        }
    }
}

impl OrduParams {
    fn position(&self, id: &str) -> Option<usize> {
        self.order.iter().position(|x| x == id)
    }

    /// The reference of a menu given by ids.
    pub fn reference<'a>(&self, menu: &'a [String]) -> Result<&'a str, OrduError> {
        let mut best: Option<(usize, &str)> = None;
        for id in menu {
            let p = self
                .position(id)
                .ok_or_else(|| OrduError::UnknownAlternative(id.clone()))?;
            if best.is_none_or(|(b, _)| p < b) {
                best = Some((p, id));
            }
        }
        best.map(|(_, id)| id)
            .ok_or(OrduError::Dataset(DatasetError::EmptyMenu))
    }

    pub fn utility(&self, reference: &str, alt: &str) -> Result<&Rational, OrduError> {
        self.utilities
            .get(reference)
            .and_then(|u| u.get(alt))
            .ok_or_else(|| OrduError::MissingUtility {
                reference: reference.to_string(),
                alt: alt.to_string(),
            })
    }
}

/// All maximizers of the reference's utility over the menu.
pub fn evaluate_ordu(params: &OrduParams, menu: &[String]) -> Result<Vec<String>, OrduError> {
    let r = params.reference(menu)?;
    let mut best: Option<&Rational> = None;
    let mut out: Vec<String> = Vec::new();
    for id in menu {
        let u = params.utility(r, id)?;
        match best {
            Some(b) if u < b => {}
            Some(b) if u == b => out.push(id.clone()),
            _ => {
                best = Some(u);
                out = vec![id.clone()];
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Generic dataset over the params' universe with one observation per menu.
pub fn simulate_ordu(params: &OrduParams, menus: &[Vec<String>]) -> Result<ChoiceDataset, OrduError> {
    let ids: Vec<&str> = params.order.iter().map(String::as_str).collect();
    let mut ds = ChoiceDataset::generic(&ids, &[])?;
    for m in menus {
        let menu = ds.menu_of(m)?;
        let c = evaluate_ordu(params, m)?;
        let choice = ds.menu_of(&c)?;
        ds.insert(menu, choice)?;
    }
    Ok(ds)
}

/// Observed menus whose prediction differs, as `(menu, observed, predicted)`.
pub fn verify_ordu(
    params: &OrduParams,
    ds: &ChoiceDataset,
) -> Result<Vec<(Vec<String>, Vec<String>, Vec<String>)>, OrduError> {
    let mut out = Vec::new();
    for (m, c) in ds.observations() {
        let ids = ds.ids(m);
        let pred = evaluate_ordu(params, &ids)?;
        let obs = ds.ids(c);
        if pred != obs {
            out.push((ids, obs, pred));
        }
    }
    Ok(out)
}

/// Strict and tie relations on a set, collapsed to integer levels.
/// Returns `None` when the relations are not those of a weak order.
fn levels(items: &[usize], ties: &[(usize, usize)], strict: &[(usize, usize)]) -> Option<BTreeMap<usize, i64>> {
    let mut parent: BTreeMap<usize, usize> = items.iter().map(|&x| (x, x)).collect();
    fn find(p: &mut BTreeMap<usize, usize>, x: usize) -> usize {
        let mut r = x;
        while p[&r] != r {
            r = p[&r];
        }
        p.insert(x, r);
        r
    }
    for &(a, b) in ties {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent.insert(ra.max(rb), ra.min(rb));
        }
    }
    let classes: Vec<usize> = {
        let mut c: Vec<usize> = items.iter().map(|&x| find(&mut parent, x)).collect();
        c.sort();
        c.dedup();
        c
    };
    // Edges better -> worse between classes.
    let mut worse: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in strict {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return None;
        }
        worse.entry(ra).or_default().push(rb);
    }
    // Level = length of the longest chain of strictly worse classes.
    let mut level: BTreeMap<usize, i64> = BTreeMap::new();
    let mut state: BTreeMap<usize, u8> = BTreeMap::new();
    fn visit(
        c: usize,
        worse: &BTreeMap<usize, Vec<usize>>,
        level: &mut BTreeMap<usize, i64>,
        state: &mut BTreeMap<usize, u8>,
    ) -> bool {
        match state.get(&c) {
            Some(2) => return true,
            Some(1) => return false,
            _ => {}
        }
        state.insert(c, 1);
        let mut l = 0;
        for &w in worse.get(&c).map(Vec::as_slice).unwrap_or(&[]) {
            if !visit(w, worse, level, state) {
                return false;
            }
            l = l.max(level[&w] + 1);
        }
        level.insert(c, l);
        state.insert(c, 2);
        true
    }
    for &c in &classes {
        if !visit(c, &worse, &mut level, &mut state) {
            return None;
        }
    }
    Some(items.iter().map(|&x| (x, level[&find(&mut parent, x)])).collect())
}

fn params_from(ds: &ChoiceDataset, order: &ReferenceOrder, utils: BTreeMap<usize, BTreeMap<usize, i64>>) -> OrduParams {
    let mut utilities = BTreeMap::new();
    for (r, u) in utils {
        let row = u.into_iter().map(|(a, v)| (ds.id(a).to_string(), int(v))).collect();
        utilities.insert(ds.id(r).to_string(), row);
    }
    OrduParams {
        order: order.ids(ds),
        utilities,
    }
}

/// Fills every alternative outside a reference's ranked set with one below the minimum.
fn with_sentinel(n: usize, ranked: BTreeMap<usize, i64>) -> BTreeMap<usize, i64> {
    let sentinel = ranked.values().min().copied().unwrap_or(0) - 1;
    (0..n)
        .map(|a| (a, ranked.get(&a).copied().unwrap_or(sentinel)))
        .collect()
}

/// Utility of reference `x` from its prediction set and the tripletons containing `x`.
fn prediction_set_utility(ds: &ChoiceDataset, order: &ReferenceOrder, x: usize) -> Option<BTreeMap<usize, i64>> {
    let n = ds.len_universe();
    let mut pset = vec![x];
    let mut ties = Vec::new();
    let mut strict = Vec::new();
    for y in (0..n).filter(|&y| y != x && order.above(x, y)) {
        let Some(c) = ds.choice(Menu::from_indices([x, y])) else {
            continue;
        };
        if c.contains(y) {
            pset.push(y);
            if c.contains(x) {
                ties.push((x, y));
            } else {
                strict.push((y, x));
            }
        }
    }
    for (i, &y) in pset.iter().enumerate().skip(1) {
        for &z in &pset[i + 1..] {
            let Some(c) = ds.choice(Menu::from_indices([x, y, z])) else {
                continue;
            };
            match (c.contains(y), c.contains(z)) {
                (true, true) => ties.push((y, z)),
                (true, false) => strict.push((y, z)),
                (false, true) => strict.push((z, y)),
                (false, false) => {}
            }
        }
    }
    levels(&pset, &ties, &strict).map(|l| with_sentinel(n, l))
}

/// Utility of reference `x` revealed by its class: chosen over unchosen,
/// chosen tied with chosen.
fn class_utility(ds: &ChoiceDataset, class: &[Menu]) -> Option<BTreeMap<usize, i64>> {
    let mut items = Menu::EMPTY;
    let mut ties = Vec::new();
    let mut strict = Vec::new();
    for &m in class {
        let c = ds.choice(m)?;
        items = items.union(m);
        let chosen = c.to_vec();
        for w in chosen.windows(2) {
            ties.push((w[0], w[1]));
        }
        for a in c.iter() {
            for b in m.minus(c).iter() {
                strict.push((a, b));
            }
        }
    }
    let ranked = levels(&items.to_vec(), &ties, &strict)?;
    Some(with_sentinel(ds.len_universe(), ranked))
}

fn all_references(
    ds: &ChoiceDataset,
    order: &ReferenceOrder,
    f: impl Fn(usize) -> Option<BTreeMap<usize, i64>>,
) -> Option<OrduParams> {
    let mut utils = BTreeMap::new();
    for x in 0..ds.len_universe() {
        utils.insert(x, f(x)?);
    }
    Some(params_from(ds, order, utils))
}

/// Builds ORDU parameters reproducing a subset-closed dataset.
pub fn build_ordu(ds: &ChoiceDataset) -> Result<OrduParams, OrduError> {
    if !ds.is_subset_closed() {
        return Err(OrduError::NotSubsetClosed);
    }
    let rd = check_reference_dependence(ds, &Warp, &IdentityPsi)?;
    if !rd.passes() {
        return Err(OrduError::AxiomFails(rd.failures));
    }
    let order = match layered_order(ds, &Warp, &IdentityPsi, true) {
        Some(o) => o,
        None => synthesize_reference_order(ds, &Warp, &IdentityPsi)?,
    };
    let reproduces = |p: &OrduParams| verify_ordu(p, ds).map(|m| m.is_empty()).unwrap_or(false);
    if let Some(p) = all_references(ds, &order, |x| prediction_set_utility(ds, &order, x)) {
        if reproduces(&p) {
            return Ok(p);
        }
    }
    let classes = reference_classes(ds, &order);
    let p = all_references(ds, &order, |x| match classes.get(&x) {
        Some(class) => class_utility(ds, class),
        None => Some(with_sentinel(ds.len_universe(), BTreeMap::from([(x, 0)]))),
    })
    .ok_or_else(|| OrduError::Construction("a reference class is not rationalizable".into()))?;
    if reproduces(&p) {
        Ok(p)
    } else {
        Err(OrduError::Construction("params disagree with observations".into()))
    }
}

/// Partial-data fit: a synthesized order plus per-class revealed rankings.
/// The result is one of many representations consistent with the data.
pub fn fit_ordu_partial(ds: &ChoiceDataset) -> Result<OrduParams, OrduError> {
    let order = synthesize_reference_order(ds, &Warp, &IdentityPsi)?;
    let classes = reference_classes(ds, &order);
    let p = all_references(ds, &order, |x| match classes.get(&x) {
        Some(class) => class_utility(ds, class),
        None => Some(with_sentinel(ds.len_universe(), BTreeMap::from([(x, 0)]))),
    })
    .ok_or_else(|| OrduError::Construction("a reference class is not rationalizable".into()))?;
    match verify_ordu(&p, ds)?.is_empty() {
        true => Ok(p),
        false => Err(OrduError::Construction("params disagree with observations".into())),
    }
}

/// Whether one weak order over `menu` yields every observed choice in `family`.
pub fn rationalizable_by_weak_order(ds: &ChoiceDataset, menu: Menu, family: &[Menu]) -> bool {
    let items = menu.to_vec();
    let k = items.len();
    let mut rank = vec![0usize; k];
    let choices: Vec<(Menu, Menu)> = family.iter().filter_map(|m| ds.choice(*m).map(|c| (*m, c))).collect();
    loop {
        let fits = choices.iter().all(|&(m, c)| {
            let best = m
                .iter()
                .map(|a| rank[items.iter().position(|&x| x == a).unwrap()])
                .max();
            let argmax = m
                .iter()
                .filter(|&a| Some(rank[items.iter().position(|&x| x == a).unwrap()]) == best)
                .fold(Menu::EMPTY, |acc, a| acc.with(a));
            argmax == c
        });
        if fits {
            return true;
        }
        // Next rank vector in base k.
        let mut i = 0;
        loop {
            if i == k {
                return false;
            }
            rank[i] += 1;
            if rank[i] < k {
                break;
            }
            rank[i] = 0;
            i += 1;
        }
    }
}

/// For the union `A` of `parts`: some `x ∈ A` makes `{A} ∪ {Aᵢ ∋ x}`
/// rationalizable by a single weak order.
pub fn remark1_necessary_condition(ds: &ChoiceDataset, parts: &[Menu]) -> Result<bool, OrduError> {
    ds.check_observed(parts)?;
    let union = parts.iter().fold(Menu::EMPTY, |acc, m| acc.union(*m));
    if !ds.is_observed(union) {
        return Err(OrduError::UnionUnobserved);
    }
    Ok(union.iter().any(|x| {
        let mut fam = vec![union];
        fam.extend(parts.iter().copied().filter(|p| p.contains(x)));
        rationalizable_by_weak_order(ds, union, &fam)
    }))
}

/// Utility one for every pair, so every menu is fully chosen.
pub fn constant_params(ids: &[&str]) -> OrduParams {
    let row: BTreeMap<String, Rational> = ids.iter().map(|a| (a.to_string(), Rational::one())).collect();
    OrduParams {
        order: ids.iter().map(|s| s.to_string()).collect(),
        utilities: ids.iter().map(|r| (r.to_string(), row.clone())).collect(),
    }
}
