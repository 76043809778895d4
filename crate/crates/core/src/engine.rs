//! Candidate references, the generic reference-dependence check, and
//! reference-order synthesis for a property `T` and admissible map `Ψ`.

use std::collections::BTreeMap;

use crate::dataset::ChoiceDataset;
use crate::menu::Menu;
use crate::property::{normalize, FiniteProperty, ViolationWitness};

/// Admissible references of a menu.
pub trait PsiMap: Sync {
    fn name(&self) -> String;
    fn admissible(&self, ds: &ChoiceDataset, menu: Menu) -> Menu;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPsi;

impl PsiMap for IdentityPsi {
    fn name(&self) -> String {
        "identity".into()
    }
    fn admissible(&self, _: &ChoiceDataset, menu: Menu) -> Menu {
        menu
    }
}

/// Whether some or every admissible member must pass `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    ForAll,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateMap {
    pub gamma: BTreeMap<Menu, Menu>,
}

impl CandidateMap {
    pub fn get(&self, menu: Menu) -> Option<Menu> {
        self.gamma.get(&menu).copied()
    }
}

/// A menu where the reference-dependence axiom fails, with the property
/// violations that rule out each admissible candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdFailure {
    pub menu: Menu,
    pub candidates: Vec<(usize, Vec<ViolationWitness>)>,
}

impl RdFailure {
    /// Union of the strict sub-menus named in the candidates' witnesses.
    pub fn covering_submenus(&self) -> Menu {
        self.candidates
            .iter()
            .flat_map(|(_, ws)| ws.iter().flat_map(|w| w.menus.iter()))
            .filter(|m| m.is_strict_subset(self.menu))
            .fold(Menu::EMPTY, |acc, m| acc.union(*m))
    }

    pub fn to_witness(&self, ds: &ChoiceDataset) -> ViolationWitness {
        let mut menus = vec![self.menu];
        let mut parts = Vec::new();
        for (x, ws) in &self.candidates {
            let kinds: Vec<String> = ws
                .iter()
                .map(|w| {
                    let ms: Vec<String> = w.menus.iter().map(|m| ds.fmt_menu(*m)).collect();
                    format!("{} on {}", w.kind, ms.join(" & "))
                })
                .collect();
            parts.push(format!("{} fails ({})", ds.id(*x), kinds.join("; ")));
            for w in ws {
                menus.extend(w.menus.iter().copied());
            }
        }
        menus[1..].sort();
        menus.dedup();
        ViolationWitness::new(
            "ReferenceDependence",
            menus,
            format!(
                "no admissible reference for {}: {}",
                ds.fmt_menu(self.menu),
                parts.join(", ")
            ),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdOutcome {
    pub gamma: CandidateMap,
    pub failures: Vec<RdFailure>,
}

impl RdOutcome {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn witnesses(&self, ds: &ChoiceDataset) -> Vec<ViolationWitness> {
        self.failures.iter().map(|f| f.to_witness(ds)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("admissible map is not hereditary: {}", .0.narrative)]
    NonHereditaryPsi(ViolationWitness),
    #[error("reference dependence fails at {} menu(s)", .0.len())]
    AxiomFails(Vec<RdFailure>),
    #[error("no reference order found: {0}")]
    SynthesisFailed(String),
}

/// Checks `a ∈ Ψ(A) ∩ B` implies `a ∈ Ψ(B)` on observed nested pairs.
pub fn check_hereditary(ds: &ChoiceDataset, psi: &dyn PsiMap) -> Result<(), EngineError> {
    let menus: Vec<Menu> = ds.menus().collect();
    let psis: Vec<Menu> = menus.iter().map(|m| psi.admissible(ds, *m)).collect();
    for (i, &a) in menus.iter().enumerate() {
        for (j, &b) in menus.iter().enumerate() {
            if b.is_strict_subset(a) {
                let lost = psis[i].inter(b).minus(psis[j]);
                if let Some(x) = lost.first() {
                    return Err(EngineError::NonHereditaryPsi(ViolationWitness::new(
                        "PsiHereditary",
                        vec![a, b],
                        format!(
                            "{} is admissible in {} but not in {}",
                            ds.id(x),
                            ds.fmt_menu(a),
                            ds.fmt_menu(b)
                        ),
                    )));
                }
            }
        }
    }
    Ok(())
}

fn family_with(subsets: &[Menu], x: usize) -> Vec<Menu> {
    subsets.iter().copied().filter(|b| b.contains(x)).collect()
}

/// Γ(A) for every observed menu.
pub fn candidate_references(
    ds: &ChoiceDataset,
    t: &dyn FiniteProperty,
    psi: &dyn PsiMap,
) -> Result<CandidateMap, EngineError> {
    check_hereditary(ds, psi)?;
    let mut gamma = BTreeMap::new();
    for a in ds.menus() {
        let subs = ds.observed_subsets(a);
        let g = psi
            .admissible(ds, a)
            .iter()
            .filter(|&x| t.holds(ds, &family_with(&subs, x)))
            .fold(Menu::EMPTY, |acc, x| acc.with(x));
        gamma.insert(a, g);
    }
    Ok(CandidateMap { gamma })
}

/// Γ(A) ≠ ∅ for every observed menu (or Γ(A) = Ψ(A) under `ForAll`).
pub fn check_reference_dependence_with(
    ds: &ChoiceDataset,
    t: &dyn FiniteProperty,
    psi: &dyn PsiMap,
    quantifier: Quantifier,
) -> Result<RdOutcome, EngineError> {
    let gamma = candidate_references(ds, t, psi)?;
    let mut failures = Vec::new();
    for (&a, &g) in &gamma.gamma {
        let admissible = psi.admissible(ds, a);
        let failed = match quantifier {
            Quantifier::Exists => g.is_empty(),
            Quantifier::ForAll => g != admissible,
        };
        if !failed {
            continue;
        }
        let subs = ds.observed_subsets(a);
        let candidates = admissible
            .minus(g)
            .iter()
            .map(|x| (x, normalize(t.violations(ds, &family_with(&subs, x), false))))
            .collect();
        failures.push(RdFailure { menu: a, candidates });
    }
    Ok(RdOutcome { gamma, failures })
}

pub fn check_reference_dependence(
    ds: &ChoiceDataset,
    t: &dyn FiniteProperty,
    psi: &dyn PsiMap,
) -> Result<RdOutcome, EngineError> {
    check_reference_dependence_with(ds, t, psi, Quantifier::Exists)
}

/// A strict total order over the universe, highest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceOrder {
    ranking: Vec<usize>,
    position: Vec<usize>,
}

impl ReferenceOrder {
    /// `ranking` must be a permutation of `0..n`.
    pub fn from_ranking(ranking: Vec<usize>) -> Option<Self> {
        let n = ranking.len();
        let mut position = vec![usize::MAX; n];
        for (p, &x) in ranking.iter().enumerate() {
            if x >= n || position[x] != usize::MAX {
                return None;
            }
            position[x] = p;
        }
        Some(ReferenceOrder { ranking, position })
    }

    pub fn from_ids<S: AsRef<str>>(ds: &ChoiceDataset, ids: &[S]) -> Option<Self> {
        let r: Option<Vec<usize>> = ids.iter().map(|s| ds.index_of(s.as_ref())).collect();
        Self::from_ranking(r?).filter(|o| o.len() == ds.len_universe())
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn position(&self, x: usize) -> usize {
        self.position[x]
    }

    /// `x R y` with `x ≠ y`.
    pub fn above(&self, x: usize, y: usize) -> bool {
        self.position[x] < self.position[y]
    }

    /// The R-maximal member of a nonempty menu.
    pub fn top(&self, menu: Menu) -> Option<usize> {
        menu.iter().min_by_key(|&x| self.position[x])
    }

    pub fn ids(&self, ds: &ChoiceDataset) -> Vec<String> {
        self.ranking.iter().map(|&x| ds.id(x).to_string()).collect()
    }
}

/// Every non-admissible member of each menu is R-dominated by an admissible one.
pub fn psi_consistency_check(
    order: &ReferenceOrder,
    psi: &dyn PsiMap,
    ds: &ChoiceDataset,
    menus: &[Menu],
) -> Vec<ViolationWitness> {
    let mut out = Vec::new();
    for &a in menus {
        let adm = psi.admissible(ds, a);
        for y in a.minus(adm).iter() {
            if !adm.iter().any(|x| order.above(x, y)) {
                out.push(ViolationWitness::new(
                    "PsiConsistency",
                    vec![a],
                    format!(
                        "{} is not admissible in {} and no admissible member ranks above it",
                        ds.id(y),
                        ds.fmt_menu(a)
                    ),
                ));
            }
        }
    }
    normalize(out)
}

/// Observed menus grouped by their R-maximal member.
pub fn reference_classes(ds: &ChoiceDataset, order: &ReferenceOrder) -> BTreeMap<usize, Vec<Menu>> {
    let mut classes: BTreeMap<usize, Vec<Menu>> = BTreeMap::new();
    for m in ds.menus() {
        if let Some(r) = order.top(m) {
            classes.entry(r).or_default().push(m);
        }
    }
    classes
}

/// Each reference class passes `T` and `order` is Ψ-consistent on observed menus.
pub fn order_is_valid(ds: &ChoiceDataset, t: &dyn FiniteProperty, psi: &dyn PsiMap, order: &ReferenceOrder) -> bool {
    let menus: Vec<Menu> = ds.menus().collect();
    psi_consistency_check(order, psi, ds, &menus).is_empty()
        && reference_classes(ds, order).values().all(|fam| t.holds(ds, fam))
}

/// `x` can head the order of `remaining`: every observed menu inside
/// `remaining` that contains `x` admits it, and `T` passes over them.
pub fn eligible(ds: &ChoiceDataset, t: &dyn FiniteProperty, psi: &dyn PsiMap, remaining: Menu, x: usize) -> bool {
    let fam: Vec<Menu> = ds.menus().filter(|b| b.contains(x) && b.is_subset(remaining)).collect();
    fam.iter().all(|b| psi.admissible(ds, *b).contains(x)) && t.holds(ds, &fam)
}

/// Layered listing: repeatedly place eligible alternatives on top.
/// With `whole_layers` every eligible alternative of a round is placed
/// (lexicographically); otherwise only the first one.
pub fn layered_order(
    ds: &ChoiceDataset,
    t: &dyn FiniteProperty,
    psi: &dyn PsiMap,
    whole_layers: bool,
) -> Option<ReferenceOrder> {
    let mut remaining = ds.universe();
    let mut ranking = Vec::with_capacity(ds.len_universe());
    while !remaining.is_empty() {
        let layer: Vec<usize> = remaining
            .iter()
            .filter(|&x| eligible(ds, t, psi, remaining, x))
            .collect();
        if layer.is_empty() {
            return None;
        }
        let take = if whole_layers { layer.len() } else { 1 };
        for &x in &layer[..take] {
            ranking.push(x);
            remaining = remaining.without(x);
        }
    }
    ReferenceOrder::from_ranking(ranking)
}

fn alpha_holds(images: &BTreeMap<Menu, Menu>) -> bool {
    images.iter().all(|(s, img)| {
        !img.is_empty()
            && images
                .iter()
                .filter(|(t, _)| t.is_subset(*s))
                .all(|(t, timg)| img.inter(*t).is_subset(*timg))
    })
}

/// Doubleton pruning: shrink every image to a singleton. `None` when a
/// doubleton admits no safe deletion.
fn prune_images(ds: &ChoiceDataset, gamma: &CandidateMap) -> Option<BTreeMap<Menu, Menu>> {
    let mut images = gamma.gamma.clone();
    let check_alpha = cfg!(debug_assertions) && images.len() <= 300;
    let n = ds.len_universe();
    for x in 0..n {
        for y in x + 1..n {
            let pair = Menu::from_indices([x, y]);
            let supers: Vec<Menu> = images.keys().copied().filter(|s| pair.is_subset(*s)).collect();
            if supers.is_empty() {
                continue;
            }
            let safe = |z: usize| supers.iter().all(|s| images[s] != Menu::singleton(z));
            let z = if safe(y) {
                y
            } else if safe(x) {
                x
            } else {
                return None;
            };
            for s in supers {
                let img = images.get_mut(&s).unwrap();
                *img = img.without(z);
            }
            if check_alpha {
                debug_assert!(alpha_holds(&images), "α property lost after pruning {x},{y}");
            }
        }
    }
    images.values().all(|m| m.len() == 1).then_some(images)
}

/// Topological order of the constraints `r(A) above y` for `y ∈ A`.
fn order_from_images(n: usize, images: &BTreeMap<Menu, Menu>) -> Option<ReferenceOrder> {
    let mut above: Vec<Menu> = vec![Menu::EMPTY; n];
    for (a, img) in images {
        let r = img.first()?;
        for y in a.without(r).iter() {
            above[y] = above[y].with(r);
        }
    }
    let mut placed = Menu::EMPTY;
    let mut ranking = Vec::with_capacity(n);
    while ranking.len() < n {
        let next = (0..n).find(|&x| !placed.contains(x) && above[x].is_subset(placed))?;
        placed = placed.with(next);
        ranking.push(next);
    }
    ReferenceOrder::from_ranking(ranking)
}

/// A reference order whose classes each pass `T`, Ψ-consistent on observed menus.
pub fn synthesize_reference_order(
    ds: &ChoiceDataset,
    t: &dyn FiniteProperty,
    psi: &dyn PsiMap,
) -> Result<ReferenceOrder, EngineError> {
    let rd = check_reference_dependence(ds, t, psi)?;
    if !rd.passes() {
        return Err(EngineError::AxiomFails(rd.failures));
    }
    if let Some(images) = prune_images(ds, &rd.gamma) {
        if let Some(order) = order_from_images(ds.len_universe(), &images) {
            if order_is_valid(ds, t, psi, &order) {
                return Ok(order);
            }
        }
    }
    // Partial data can leave the pruning without a consistent finish.
    layered_order(ds, t, psi, false)
        .filter(|o| order_is_valid(ds, t, psi, o))
        .ok_or_else(|| {
            EngineError::SynthesisFailed("observed menus admit no order whose reference classes all pass".into())
        })
}
