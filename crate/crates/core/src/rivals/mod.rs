//! Rival non-WARP models on small universes: rational shortlists and
//! personal equilibrium, plus the embedded separation tables.

mod fixtures;

pub use fixtures::{cla_verdict, load_fixture, remark1_parts, FixtureError, FIXTURE_NAMES};

use serde::Serialize;

use crate::dataset::ChoiceDataset;
use crate::engine::{check_reference_dependence, IdentityPsi};
use crate::menu::Menu;
use crate::ordu::{build_ordu, remark1_necessary_condition};
use crate::property::Warp;

pub const MAX_RIVAL_UNIVERSE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RivalError {
    #[error("universe has {0} alternatives; at most {MAX_RIVAL_UNIVERSE} are enumerated")]
    UniverseTooLarge(usize),
    #[error("menu {0} has more than one chosen alternative")]
    MultiValuedChoice(String),
}

/// Pairs `(i, j)` with `i < j`, ordered by `j` then `i`, so every menu's
/// pairs are decided by the time its largest member's pairs are.
fn pair_schedule(n: usize) -> Vec<(usize, usize)> {
    (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect()
}

/// Menus with at least two members grouped by the schedule step that completes them.
fn completion_steps(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<Menu>> {
    let mut steps = vec![Vec::new(); pairs.len()];
    for m in Menu::full(n).subsets().filter(|m| m.len() >= 2) {
        let v = m.to_vec();
        let (a, b) = (v[v.len() - 2], v[v.len() - 1]);
        let k = pairs.iter().position(|&p| p == (a, b)).unwrap();
        steps[k].push(m);
    }
    steps
}

/// Asymmetric relation as a beats-matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub beats: Vec<Vec<bool>>,
}

impl Relation {
    fn empty(n: usize) -> Self {
        Relation {
            beats: vec![vec![false; n]; n],
        }
    }

    /// Members of `menu` that nothing in `menu` beats.
    pub fn maximal(&self, menu: Menu) -> Menu {
        menu.iter()
            .filter(|&x| !menu.iter().any(|y| self.beats[y][x]))
            .fold(Menu::EMPTY, |acc, x| acc.with(x))
    }

    pub fn pairs(&self, ds: &ChoiceDataset) -> Vec<(String, String)> {
        let n = self.beats.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.beats[x][y] {
                    out.push((ds.id(x).to_string(), ds.id(y).to_string()));
                }
            }
        }
        out
    }

    fn set(&mut self, (i, j): (usize, usize), state: u8) {
        self.beats[i][j] = state == 1;
        self.beats[j][i] = state == 2;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsmCertificate {
    pub p1: Relation,
    pub p2: Relation,
}

/// Two-stage shortlist choice: P1-maximal elements, then P2-maximal among them.
pub fn rsm_choice(p1: &Relation, p2: &Relation, menu: Menu) -> Menu {
    p2.maximal(p1.maximal(menu))
}

/// Complete relation as strict part plus symmetric ties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeCertificate {
    pub strict: Relation,
}

impl PeCertificate {
    pub fn choice(&self, menu: Menu) -> Menu {
        self.strict.maximal(menu)
    }

    /// `(x, y, "≻")` for strict and `(x, y, "∼")` for ties with `x < y`.
    pub fn describe(&self, ds: &ChoiceDataset) -> Vec<(String, String, &'static str)> {
        let n = self.strict.beats.len();
        let mut out = Vec::new();
        for (i, j) in pair_schedule(n) {
            let (x, y) = (ds.id(i).to_string(), ds.id(j).to_string());
            if self.strict.beats[i][j] {
                out.push((x, y, "≻"));
            } else if self.strict.beats[j][i] {
                out.push((y, x, "≻"));
            } else {
                out.push((x, y, "∼"));
            }
        }
        out
    }
}

fn check_size(ds: &ChoiceDataset) -> Result<(), RivalError> {
    match ds.len_universe() {
        n if n > MAX_RIVAL_UNIVERSE => Err(RivalError::UniverseTooLarge(n)),
        _ => Ok(()),
    }
}

fn observed_ok(ds: &ChoiceDataset, m: Menu, got: Menu) -> bool {
    ds.choice(m).is_none_or(|c| c == got)
}

/// Searches for asymmetric `P1`, `P2` whose shortlist procedure is
/// single-valued on every menu and reproduces every observation.
pub fn rsm_rationalizable(ds: &ChoiceDataset) -> Result<Option<RsmCertificate>, RivalError> {
    check_size(ds)?;
    if let Some((m, _)) = ds.observations().find(|(_, c)| c.len() > 1) {
        return Err(RivalError::MultiValuedChoice(ds.fmt_menu(m)));
    }
    let n = ds.len_universe();
    let pairs = pair_schedule(n);
    let steps = completion_steps(n, &pairs);
    let mut p1 = Relation::empty(n);
    let mut p2 = Relation::empty(n);
    fn go(
        k: usize,
        pairs: &[(usize, usize)],
        steps: &[Vec<Menu>],
        ds: &ChoiceDataset,
        p1: &mut Relation,
        p2: &mut Relation,
    ) -> bool {
        if k == pairs.len() {
            return true;
        }
        for s1 in 0..3u8 {
            for s2 in 0..3u8 {
                p1.set(pairs[k], s1);
                p2.set(pairs[k], s2);
                let ok = steps[k].iter().all(|&m| {
                    let c = rsm_choice(p1, p2, m);
                    c.len() == 1 && observed_ok(ds, m, c)
                });
                if ok && go(k + 1, pairs, steps, ds, p1, p2) {
                    return true;
                }
            }
        }
        p1.set(pairs[k], 0);
        p2.set(pairs[k], 0);
        false
    }
    if go(0, &pairs, &steps, ds, &mut p1, &mut p2) {
        Ok(Some(RsmCertificate { p1, p2 }))
    } else {
        Ok(None)
    }
}

/// Searches for a complete relation whose maximal elements are nonempty on
/// every menu and equal every observed choice.
pub fn pe_rationalizable(ds: &ChoiceDataset) -> Result<Option<PeCertificate>, RivalError> {
    check_size(ds)?;
    let n = ds.len_universe();
    let pairs = pair_schedule(n);
    let steps = completion_steps(n, &pairs);
    let mut rel = Relation::empty(n);
    fn go(k: usize, pairs: &[(usize, usize)], steps: &[Vec<Menu>], ds: &ChoiceDataset, rel: &mut Relation) -> bool {
        if k == pairs.len() {
            return true;
        }
        // Ties first, then the two strict directions.
        for s in [0u8, 1, 2] {
            rel.set(pairs[k], s);
            let ok = steps[k].iter().all(|&m| {
                let c = rel.maximal(m);
                !c.is_empty() && observed_ok(ds, m, c)
            });
            if ok && go(k + 1, pairs, steps, ds, rel) {
                return true;
            }
        }
        rel.set(pairs[k], 0);
        false
    }
    if go(0, &pairs, &steps, ds, &mut rel) {
        Ok(Some(PeCertificate { strict: rel }))
    } else {
        Ok(None)
    }
}

/// One fixture's verdicts next to the classifications claimed for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationRow {
    pub fixture: String,
    pub reference_dependence: bool,
    pub ordu: bool,
    pub remark1: Option<bool>,
    pub rsm: Option<bool>,
    pub pe: Option<bool>,
    pub cla_from_prose: Option<bool>,
    pub claims: Vec<(String, bool)>,
    pub mismatches: Vec<String>,
}

fn claims(name: &str) -> Vec<(&'static str, bool)> {
    match name {
        "ok2015_decoy" => vec![("remark1", false), ("ordu", false)],
        "pe_table" => vec![("remark1", false), ("ordu", false), ("pe", true)],
        "rsm_table" => vec![("remark1", false), ("ordu", false), ("rsm", true)],
        "ordu_not_rsm" => vec![("ordu", true), ("rsm", false)],
        "cla_small" => vec![("ordu", false)],
        "ordu_not_cla" => vec![("ordu", true)],
        "binary_cycle" => vec![("ordu", true), ("pe", false)],
        "compliance_2_1" => vec![("ordu", true)],
        "violation_2_1" => vec![("ordu", false)],
        _ => vec![],
    }
}

pub fn classify_fixture(name: &str) -> Result<SeparationRow, FixtureError> {
    let ds = load_fixture(name)?;
    let rd = check_reference_dependence(&ds, &Warp, &IdentityPsi)
        .map(|o| o.passes())
        .unwrap_or(false);
    let ordu = rd && (!ds.is_subset_closed() || build_ordu(&ds).is_ok());
    let remark1 = match remark1_parts(name) {
        Some(parts) => {
            let ms = fixtures::parts_menus(&ds, parts)?;
            remark1_necessary_condition(&ds, &ms).ok()
        }
        None => None,
    };
    let rsm = rsm_rationalizable(&ds).ok().map(|c| c.is_some());
    let pe = pe_rationalizable(&ds).ok().map(|c| c.is_some());
    let cla = cla_verdict(name);
    let mut mismatches = Vec::new();
    let claimed = claims(name);
    for &(what, want) in &claimed {
        let got = match what {
            "ordu" => Some(ordu),
            "remark1" => remark1,
            "rsm" => rsm,
            "pe" => pe,
            _ => None,
        };
        if got != Some(want) {
            mismatches.push(format!("{what}: expected {want}, got {got:?}"));
        }
    }
    if remark1 == Some(false) && ordu {
        mismatches.push("remark1 fails but ORDU construction succeeded".into());
    }
    Ok(SeparationRow {
        fixture: name.to_string(),
        reference_dependence: rd,
        ordu,
        remark1,
        rsm,
        pe,
        cla_from_prose: cla,
        claims: claimed.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        mismatches,
    })
}

/// Runs every fixture through every checker.
pub fn separation_suite() -> Vec<SeparationRow> {
    FIXTURE_NAMES
        .iter()
        .map(|n| classify_fixture(n).expect("embedded fixture loads"))
        .collect()
}
