//! Finite properties of choice data and their violation witnesses.

use serde::Serialize;

use crate::dataset::{ChoiceDataset, DatasetError};
use crate::menu::Menu;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ViolationWitness {
    pub menus: Vec<Menu>,
    pub kind: String,
    pub narrative: String,
}

impl ViolationWitness {
    pub fn new(kind: &str, menus: Vec<Menu>, narrative: String) -> Self {
        ViolationWitness {
            menus,
            kind: kind.to_string(),
            narrative,
        }
    }

    pub fn render(&self, ds: &ChoiceDataset) -> WitnessView {
        WitnessView {
            kind: self.kind.clone(),
            menus: self.menus.iter().map(|m| ds.ids(*m)).collect(),
            narrative: self.narrative.clone(),
        }
    }
}

/// Witness with menus spelled out by id, for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessView {
    pub kind: String,
    pub menus: Vec<Vec<String>>,
    pub narrative: String,
}

/// Sorts witnesses by menus, then kind, and drops repeats.
pub fn normalize(mut ws: Vec<ViolationWitness>) -> Vec<ViolationWitness> {
    ws.sort();
    ws.dedup();
    ws
}

/// A predicate over the observations of a dataset restricted to `family`.
///
/// Implementations must be monotone: passing on a family implies passing
/// on every subfamily. With `first_only` an implementation may stop at the
/// first violation found.
pub trait FiniteProperty: Sync {
    fn name(&self) -> String;

    fn violations(&self, ds: &ChoiceDataset, family: &[Menu], first_only: bool) -> Vec<ViolationWitness>;

    fn holds(&self, ds: &ChoiceDataset, family: &[Menu]) -> bool {
        self.violations(ds, family, true).is_empty()
    }

    /// All violations over every observed menu.
    fn check_all(&self, ds: &ChoiceDataset) -> Vec<ViolationWitness> {
        let all: Vec<Menu> = ds.menus().collect();
        normalize(self.violations(ds, &all, false))
    }
}

impl<T: FiniteProperty + ?Sized> FiniteProperty for &T {
    fn name(&self) -> String {
        (**self).name()
    }
    fn violations(&self, ds: &ChoiceDataset, family: &[Menu], first_only: bool) -> Vec<ViolationWitness> {
        (**self).violations(ds, family, first_only)
    }
}

impl<T: FiniteProperty + ?Sized> FiniteProperty for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn violations(&self, ds: &ChoiceDataset, family: &[Menu], first_only: bool) -> Vec<ViolationWitness> {
        (**self).violations(ds, family, first_only)
    }
}

/// WARP in subset form: for `B ⊂ A` with `c(A) ∩ B ≠ ∅`, `c(A) ∩ B = c(B)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Warp;

impl FiniteProperty for Warp {
    fn name(&self) -> String {
        "WARP".into()
    }

    fn violations(&self, ds: &ChoiceDataset, family: &[Menu], first_only: bool) -> Vec<ViolationWitness> {
        let mut out = Vec::new();
        let obs: Vec<(Menu, Menu)> = family.iter().filter_map(|m| ds.choice(*m).map(|c| (*m, c))).collect();
        for &(a, ca) in &obs {
            for &(b, cb) in &obs {
                if !b.is_strict_subset(a) {
                    continue;
                }
                let kept = ca.inter(b);
                if !kept.is_empty() && kept != cb {
                    out.push(ViolationWitness::new(
                        "WARP",
                        vec![a, b],
                        format!(
                            "c({}) ∩ {} = {} but c({}) = {}",
                            ds.fmt_menu(a),
                            ds.fmt_menu(b),
                            ds.fmt_menu(kept),
                            ds.fmt_menu(b),
                            ds.fmt_menu(cb)
                        ),
                    ));
                    if first_only {
                        return out;
                    }
                }
            }
        }
        out
    }
}

/// Conjunction of properties; witnesses keep the failing conjunct's name.
pub struct Conjunction {
    parts: Vec<Box<dyn FiniteProperty>>,
}

impl Conjunction {
    pub fn new(parts: Vec<Box<dyn FiniteProperty>>) -> Self {
        Conjunction { parts }
    }
}

impl FiniteProperty for Conjunction {
    fn name(&self) -> String {
        self.parts.iter().map(|p| p.name()).collect::<Vec<_>>().join(" ∧ ")
    }

    fn violations(&self, ds: &ChoiceDataset, family: &[Menu], first_only: bool) -> Vec<ViolationWitness> {
        let mut out = Vec::new();
        for p in &self.parts {
            out.extend(p.violations(ds, family, first_only));
            if first_only && !out.is_empty() {
                return out;
            }
        }
        out
    }
}

/// WARP over `family`, all witnesses sorted.
pub fn warp_over(ds: &ChoiceDataset, family: &[Menu]) -> Result<Vec<ViolationWitness>, DatasetError> {
    ds.check_observed(family)?;
    Ok(normalize(Warp.violations(ds, family, false)))
}
