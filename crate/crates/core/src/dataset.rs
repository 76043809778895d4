//! Choice datasets: a finite universe, observed menus, and chosen subsets.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::menu::{Menu, MAX_UNIVERSE};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadKind {
    Generic,
    Lottery,
    DatedPayment,
    IncomeSplit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatedPayment {
    pub amount: Rational,
    pub time: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncomeSplit {
    pub own: Rational,
    pub other: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    None,
    /// Sparse prize -> probability map.
    Lottery(BTreeMap<Rational, Rational>),
    Dated(DatedPayment),
    Split(IncomeSplit),
}

impl Payload {
    pub fn kind(&self) -> PayloadKind {
        match self {
            Payload::None => PayloadKind::Generic,
            Payload::Lottery(_) => PayloadKind::Lottery,
            Payload::Dated(_) => PayloadKind::DatedPayment,
            Payload::Split(_) => PayloadKind::IncomeSplit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alternative {
    pub id: String,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DatasetError {
    #[error("menu {0} has an empty choice")]
    EmptyChoice(String),
    #[error("choice for menu {menu} contains `{alt}` which is not on the menu")]
    ChoiceOutsideMenu { menu: String, alt: String },
    #[error("menu {0} is observed more than once")]
    DuplicateMenu(String),
    #[error("alternative `{id}` has a payload that does not match dataset kind {kind:?}")]
    MixedPayloadKinds { id: String, kind: PayloadKind },
    #[error("unknown alternative `{0}`")]
    UnknownAlternative(String),
    #[error("alternative `{0}` is declared twice")]
    DuplicateAlternative(String),
    #[error("empty menu")]
    EmptyMenu,
    #[error("menu lists `{0}` twice")]
    DuplicateMember(String),
    #[error("alternative `{id}`: {reason}")]
    BadPayload { id: String, reason: String },
    #[error("header field `{field}`: {reason}")]
    BadHeader { field: String, reason: String },
    #[error("menu {0} is not observed")]
    UnobservedMenu(String),
    #[error("universe has {0} alternatives; at most {MAX_UNIVERSE} are supported")]
    TooManyAlternatives(usize),
    #[error("malformed dataset: {0}")]
    Malformed(String),
}

/// JSON layout shared by dataset and menus files.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RawDataset {
    pub kind: Option<PayloadKind>,
    #[serde(default)]
    pub alternatives: Vec<RawAlternative>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observations: Vec<RawObservation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub menus: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prizes: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawAlternative {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawObservation {
    pub menu: Vec<String>,
    pub choice: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceDataset {
    kind: PayloadKind,
    alternatives: Vec<Alternative>,
    observations: BTreeMap<Menu, Menu>,
    prizes: Option<Vec<Rational>>,
    floor: Option<Rational>,
}

impl ChoiceDataset {
    /// Builds a dataset from alternatives and observations given by id.
    pub fn new(
        kind: PayloadKind,
        alternatives: Vec<Alternative>,
        observations: &[(Vec<&str>, Vec<&str>)],
    ) -> Result<Self, DatasetError> {
        let mut ds = Self::empty(kind, alternatives)?;
        for (menu, choice) in observations {
            let m = ds.menu_of(menu)?;
            let c = ds.choice_of(m, choice)?;
            ds.insert(m, c)?;
        }
        Ok(ds)
    }

    /// A dataset with no observations.
    pub fn empty(kind: PayloadKind, mut alternatives: Vec<Alternative>) -> Result<Self, DatasetError> {
        if alternatives.len() > MAX_UNIVERSE {
            return Err(DatasetError::TooManyAlternatives(alternatives.len()));
        }
        alternatives.sort_by(|a, b| a.id.cmp(&b.id));
        for w in alternatives.windows(2) {
            if w[0].id == w[1].id {
                return Err(DatasetError::DuplicateAlternative(w[0].id.clone()));
            }
        }
        for a in &alternatives {
            if a.payload.kind() != kind {
                return Err(DatasetError::MixedPayloadKinds { id: a.id.clone(), kind });
            }
        }
        Ok(ChoiceDataset {
            kind,
            alternatives,
            observations: BTreeMap::new(),
            prizes: None,
            floor: None,
        })
    }

    /// Generic dataset whose universe is the given ids.
    pub fn generic(ids: &[&str], observations: &[(Vec<&str>, Vec<&str>)]) -> Result<Self, DatasetError> {
        let alts = ids
            .iter()
            .map(|id| Alternative {
                id: id.to_string(),
                payload: Payload::None,
            })
            .collect();
        Self::new(PayloadKind::Generic, alts, observations)
    }

    pub fn with_prizes(mut self, prizes: Option<Vec<Rational>>) -> Self {
        self.prizes = prizes;
        self
    }

    pub fn with_floor(mut self, floor: Option<Rational>) -> Self {
        self.floor = floor;
        self
    }

    pub fn kind(&self) -> PayloadKind {
        self.kind
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.alternatives
    }

    pub fn len_universe(&self) -> usize {
        self.alternatives.len()
    }

    pub fn universe(&self) -> Menu {
        Menu::full(self.alternatives.len())
    }

    pub fn declared_prizes(&self) -> Option<&[Rational]> {
        self.prizes.as_deref()
    }

    pub fn floor(&self) -> Option<&Rational> {
        self.floor.as_ref()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.alternatives[i].id
    }

    pub fn payload(&self, i: usize) -> &Payload {
        &self.alternatives[i].payload
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.alternatives.binary_search_by(|a| a.id.as_str().cmp(id)).ok()
    }

    pub fn menu_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<Menu, DatasetError> {
        let mut m = Menu::EMPTY;
        for id in ids {
            let id = id.as_ref();
            let i = self
                .index_of(id)
                .ok_or_else(|| DatasetError::UnknownAlternative(id.to_string()))?;
            if m.contains(i) {
                return Err(DatasetError::DuplicateMember(id.to_string()));
            }
            m = m.with(i);
        }
        if m.is_empty() {
            return Err(DatasetError::EmptyMenu);
        }
        Ok(m)
    }

    fn choice_of<S: AsRef<str>>(&self, menu: Menu, ids: &[S]) -> Result<Menu, DatasetError> {
        let mut c = Menu::EMPTY;
        for id in ids {
            let id = id.as_ref();
            let i = self
                .index_of(id)
                .ok_or_else(|| DatasetError::UnknownAlternative(id.to_string()))?;
            if !menu.contains(i) {
                return Err(DatasetError::ChoiceOutsideMenu {
                    menu: self.fmt_menu(menu),
                    alt: id.to_string(),
                });
            }
            c = c.with(i);
        }
        if c.is_empty() {
            return Err(DatasetError::EmptyChoice(self.fmt_menu(menu)));
        }
        Ok(c)
    }

    /// Records an observation after checking the choice invariants.
    pub fn insert(&mut self, menu: Menu, choice: Menu) -> Result<(), DatasetError> {
        if menu.is_empty() {
            return Err(DatasetError::EmptyMenu);
        }
        if !menu.is_subset(self.universe()) {
            return Err(DatasetError::Malformed("menu outside universe".into()));
        }
        if choice.is_empty() {
            return Err(DatasetError::EmptyChoice(self.fmt_menu(menu)));
        }
        if let Some(i) = choice.minus(menu).first() {
            return Err(DatasetError::ChoiceOutsideMenu {
                menu: self.fmt_menu(menu),
                alt: self.id(i).to_string(),
            });
        }
        if self.observations.contains_key(&menu) {
            return Err(DatasetError::DuplicateMenu(self.fmt_menu(menu)));
        }
        self.observations.insert(menu, choice);
        Ok(())
    }

    pub fn num_observations(&self) -> usize {
        self.observations.len()
    }

    /// Observed menus in lexicographic order.
    pub fn menus(&self) -> impl Iterator<Item = Menu> + '_ {
        self.observations.keys().copied()
    }

    pub fn observations(&self) -> impl Iterator<Item = (Menu, Menu)> + '_ {
        self.observations.iter().map(|(m, c)| (*m, *c))
    }

    pub fn choice(&self, menu: Menu) -> Option<Menu> {
        self.observations.get(&menu).copied()
    }

    /// Choice of an observed menu; singletons choose themselves when unobserved.
    pub fn choice_or_singleton(&self, menu: Menu) -> Option<Menu> {
        self.choice(menu).or_else(|| (menu.len() == 1).then_some(menu))
    }

    pub fn is_observed(&self, menu: Menu) -> bool {
        self.observations.contains_key(&menu)
    }

    pub fn check_observed(&self, family: &[Menu]) -> Result<(), DatasetError> {
        match family.iter().find(|m| !self.is_observed(**m)) {
            Some(m) => Err(DatasetError::UnobservedMenu(self.fmt_menu(*m))),
            None => Ok(()),
        }
    }

    /// Observed menus contained in `menu`, in lexicographic order.
    pub fn observed_subsets(&self, menu: Menu) -> Vec<Menu> {
        self.menus().filter(|b| b.is_subset(menu)).collect()
    }

    /// Observations limited to `family`; the universe is unchanged.
    pub fn restrict(&self, family: &[Menu]) -> Result<ChoiceDataset, DatasetError> {
        self.check_observed(family)?;
        let keep: BTreeSet<Menu> = family.iter().copied().collect();
        let mut out = self.clone();
        out.observations.retain(|m, _| keep.contains(m));
        Ok(out)
    }

    /// Same universe and header, no observations.
    pub fn cleared(&self) -> ChoiceDataset {
        let mut out = self.clone();
        out.observations.clear();
        out
    }

    pub fn ids(&self, menu: Menu) -> Vec<String> {
        menu.iter().map(|i| self.id(i).to_string()).collect()
    }

    pub fn fmt_menu(&self, menu: Menu) -> String {
        format!("{{{}}}", self.ids(menu).join(","))
    }

    /// Every nonempty subset of every observed menu is observed, singletons excepted.
    pub fn is_subset_closed(&self) -> bool {
        self.menus()
            .all(|a| a.subsets().filter(|b| b.len() >= 2).all(|b| self.is_observed(b)))
    }

    pub fn to_raw(&self) -> RawDataset {
        RawDataset {
            kind: Some(self.kind),
            alternatives: self
                .alternatives
                .iter()
                .map(|a| RawAlternative {
                    id: a.id.clone(),
                    payload: payload_to_value(&a.payload),
                })
                .collect(),
            observations: self
                .observations()
                .map(|(m, c)| RawObservation {
                    menu: self.ids(m),
                    choice: self.ids(c),
                })
                .collect(),
            menus: None,
            prizes: self
                .prizes
                .as_ref()
                .map(|ps| ps.iter().map(|p| Value::String(rational::format(p))).collect()),
            floor: self.floor.as_ref().map(|f| Value::String(rational::format(f))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("dataset serializes")
    }

    pub fn from_json(text: &str) -> Result<ChoiceDataset, DatasetError> {
        let raw: RawDataset = serde_json::from_str(text).map_err(|e| DatasetError::Malformed(e.to_string()))?;
        validate_dataset(&raw)
    }
}

fn payload_to_value(p: &Payload) -> Option<Value> {
    let s = |r: &Rational| Value::String(rational::format(r));
    match p {
        Payload::None => None,
        Payload::Lottery(probs) => {
            let m: serde_json::Map<String, Value> = probs.iter().map(|(x, pr)| (rational::format(x), s(pr))).collect();
            Some(serde_json::json!({ "probs": m }))
        }
        Payload::Dated(d) => Some(serde_json::json!({ "amount": s(&d.amount), "time": s(&d.time) })),
        Payload::Split(x) => Some(serde_json::json!({ "own": s(&x.own), "other": s(&x.other) })),
    }
}

fn field(v: &Value, id: &str, name: &str) -> Result<Rational, DatasetError> {
    let f = v.get(name).ok_or_else(|| DatasetError::BadPayload {
        id: id.to_string(),
        reason: format!("missing field `{name}`"),
    })?;
    rational::serde_str::from_value(f).map_err(|e| DatasetError::BadPayload {
        id: id.to_string(),
        reason: e.to_string(),
    })
}

fn parse_payload(kind: PayloadKind, alt: &RawAlternative, floor: Option<&Rational>) -> Result<Payload, DatasetError> {
    let id = alt.id.as_str();
    let bad = |reason: String| DatasetError::BadPayload {
        id: id.to_string(),
        reason,
    };
    let mixed = || DatasetError::MixedPayloadKinds {
        id: id.to_string(),
        kind,
    };
    let v = match (&alt.payload, kind) {
        (None | Some(Value::Null), PayloadKind::Generic) => return Ok(Payload::None),
        (None | Some(Value::Null), _) | (Some(_), PayloadKind::Generic) => return Err(mixed()),
        (Some(v), _) => v,
    };
    let has = |k: &str| v.get(k).is_some();
    match kind {
        PayloadKind::Generic => unreachable!(),
        PayloadKind::Lottery => {
            let Some(Value::Object(probs)) = v.get("probs") else {
                return Err(if has("amount") || has("own") {
                    mixed()
                } else {
                    bad("missing `probs` object".into())
                });
            };
            let mut out = BTreeMap::new();
            let mut total = Rational::zero();
            for (prize, pr) in probs {
                let x = rational::parse(prize).map_err(|e| bad(e.to_string()))?;
                let pr = rational::serde_str::from_value(pr).map_err(|e| bad(e.to_string()))?;
                if pr.is_negative() {
                    return Err(bad(format!("negative probability at prize {prize}")));
                }
                total += &pr;
                if out.insert(x, pr).is_some() {
                    return Err(bad(format!("prize {prize} listed twice")));
                }
            }
            if total != Rational::one() {
                return Err(bad(format!("probabilities sum to {}", rational::format(&total))));
            }
            out.retain(|_, p| !p.is_zero());
            Ok(Payload::Lottery(out))
        }
        PayloadKind::DatedPayment => {
            if !has("amount") || !has("time") {
                return Err(if has("probs") || has("own") {
                    mixed()
                } else {
                    bad("needs `amount` and `time`".into())
                });
            }
            let amount = field(v, id, "amount")?;
            let time = field(v, id, "time")?;
            if !amount.is_positive() {
                return Err(bad("amount must be positive".into()));
            }
            if time.is_negative() {
                return Err(bad("time must be nonnegative".into()));
            }
            Ok(Payload::Dated(DatedPayment { amount, time }))
        }
        PayloadKind::IncomeSplit => {
            if !has("own") || !has("other") {
                return Err(if has("probs") || has("amount") {
                    mixed()
                } else {
                    bad("needs `own` and `other`".into())
                });
            }
            let own = field(v, id, "own")?;
            let other = field(v, id, "other")?;
            match floor {
                Some(w) if own < *w || other < *w => {
                    return Err(bad(format!(
                        "payments must be at least the floor {}",
                        rational::format(w)
                    )))
                }
                None if own.is_negative() || other.is_negative() => {
                    return Err(bad("payments must be nonnegative".into()))
                }
                _ => {}
            }
            if (&own + &other).is_zero() {
                return Err(bad("total payment must be positive".into()));
            }
            Ok(Payload::Split(IncomeSplit { own, other }))
        }
    }
}

/// Parses the universe and header of a raw description.
pub fn universe_from_raw(raw: &RawDataset) -> Result<ChoiceDataset, DatasetError> {
    if raw.alternatives.is_empty() {
        return Err(DatasetError::Malformed("no alternatives".into()));
    }
    let kind = raw.kind.unwrap_or(PayloadKind::Generic);
    let floor = match &raw.floor {
        None | Some(Value::Null) => None,
        Some(v) => {
            let w = rational::serde_str::from_value(v).map_err(|e| DatasetError::BadHeader {
                field: "floor".into(),
                reason: e.to_string(),
            })?;
            if !w.is_positive() {
                return Err(DatasetError::BadHeader {
                    field: "floor".into(),
                    reason: "must be positive".into(),
                });
            }
            Some(w)
        }
    };
    let prizes = match &raw.prizes {
        None => None,
        Some(vs) => {
            let mut ps = Vec::new();
            for v in vs {
                ps.push(rational::serde_str::from_value(v).map_err(|e| DatasetError::BadHeader {
                    field: "prizes".into(),
                    reason: e.to_string(),
                })?);
            }
            ps.sort();
            ps.dedup();
            Some(ps)
        }
    };
    let mut seen = HashMap::new();
    let mut alts = Vec::new();
    for a in &raw.alternatives {
        if seen.insert(a.id.clone(), ()).is_some() {
            return Err(DatasetError::DuplicateAlternative(a.id.clone()));
        }
        alts.push(Alternative {
            id: a.id.clone(),
            payload: parse_payload(kind, a, floor.as_ref())?,
        });
    }
    Ok(ChoiceDataset::empty(kind, alts)?.with_prizes(prizes).with_floor(floor))
}

/// Parses and checks a raw dataset description.
pub fn validate_dataset(raw: &RawDataset) -> Result<ChoiceDataset, DatasetError> {
    let mut ds = universe_from_raw(raw)?;
    for o in &raw.observations {
        let m = ds.menu_of(&o.menu)?;
        let c = ds.choice_of(m, &o.choice)?;
        ds.insert(m, c)?;
    }
    Ok(ds)
}

/// Universe plus a list of menus, as used by simulation.
pub fn menus_from_raw(raw: &RawDataset) -> Result<(ChoiceDataset, Vec<Menu>), DatasetError> {
    let ds = universe_from_raw(raw)?;
    let mut menus = Vec::new();
    for m in raw.menus.iter().flatten() {
        menus.push(ds.menu_of(m)?);
    }
    if raw.menus.is_none() {
        for o in &raw.observations {
            menus.push(ds.menu_of(&o.menu)?);
        }
    }
    menus.sort();
    menus.dedup();
    Ok((ds, menus))
}
