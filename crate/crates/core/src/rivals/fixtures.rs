//! Embedded choice tables.

use crate::dataset::{ChoiceDataset, DatasetError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

pub const FIXTURE_NAMES: [&str; 9] = [
    "binary_cycle",
    "cla_small",
    "compliance_2_1",
    "ok2015_decoy",
    "ordu_not_cla",
    "ordu_not_rsm",
    "pe_table",
    "rsm_table",
    "violation_2_1",
];

type Row = (&'static str, &'static str);

fn rows(name: &str) -> Option<(&'static [&'static str], &'static [Row])> {
    const ABCD: &[&str] = &["a", "b", "c", "d"];
    const ABC: &[&str] = &["a", "b", "c"];
    Some(match name {
        "compliance_2_1" => (
            ABCD,
            &[
                ("abcd", "b"),
                ("abc", "b"),
                ("abd", "b"),
                ("acd", "d"),
                ("bcd", "bc"),
                ("ab", "b"),
                ("ac", "a"),
                ("ad", "d"),
                ("bc", "b"),
                ("bd", "b"),
                ("cd", "c"),
            ],
        ),
        "violation_2_1" | "cla_small" => (ABC, &[("abc", "b"), ("ab", "a"), ("bc", "c"), ("ac", "a")]),
        "ok2015_decoy" => (
            ABCD,
            &[
                ("abcd", "a"),
                ("abc", "a"),
                ("abd", "b"),
                ("acd", "c"),
                ("bcd", "b"),
                ("ab", "a"),
                ("ac", "a"),
                ("ad", "a"),
                ("bc", "b"),
                ("bd", "b"),
                ("cd", "c"),
            ],
        ),
        "pe_table" => (
            ABCD,
            &[
                ("abcd", "a"),
                ("abc", "ab"),
                ("abd", "ad"),
                ("acd", "a"),
                ("bcd", "c"),
                ("ab", "ab"),
                ("ac", "a"),
                ("ad", "ad"),
                ("bc", "bc"),
                ("bd", "d"),
                ("cd", "c"),
            ],
        ),
        "rsm_table" => (
            ABCD,
            &[
                ("abcd", "a"),
                ("abc", "a"),
                ("bcd", "c"),
                ("acd", "a"),
                ("abd", "d"),
                ("ab", "a"),
                ("ac", "a"),
                ("ad", "d"),
                ("bc", "b"),
                ("bd", "d"),
                ("cd", "c"),
            ],
        ),
        // The printed table has {a,b,c} -> b, which already fails reference
        // dependence at {a,b,c,d}; {a,b,c} -> a is the reading consistent
        // with the accompanying claims.
        "ordu_not_rsm" => (
            ABCD,
            &[
                ("abcd", "a"),
                ("abc", "a"),
                ("abd", "b"),
                ("acd", "a"),
                ("bcd", "b"),
                ("ab", "a"),
                ("ac", "a"),
                ("ad", "a"),
                ("bc", "b"),
                ("bd", "b"),
                ("cd", "c"),
            ],
        ),
        "ordu_not_cla" => (
            ABCD,
            &[
                ("abcd", "ab"),
                ("abc", "bc"),
                ("abd", "ab"),
                ("acd", "a"),
                ("bcd", "b"),
                ("ab", "b"),
                ("ac", "c"),
                ("ad", "a"),
                ("bc", "b"),
                ("bd", "b"),
                ("cd", "c"),
            ],
        ),
        "binary_cycle" => (ABC, &[("ab", "a"), ("bc", "b"), ("ac", "c")]),
        _ => return None,
    })
}

fn letters(s: &str) -> Vec<String> {
    s.chars().map(|c| c.to_string()).collect()
}

pub fn load_fixture(name: &str) -> Result<ChoiceDataset, FixtureError> {
    let (ids, table) = rows(name).ok_or_else(|| FixtureError::UnknownFixture(name.to_string()))?;
    let mut ds = ChoiceDataset::generic(ids, &[])?;
    for (menu, choice) in table {
        let m = ds.menu_of(&letters(menu))?;
        let c = ds.menu_of(&letters(choice))?;
        ds.insert(m, c)?;
    }
    Ok(ds)
}

/// Verdict for limited-attention models, taken from the prose.
pub fn cla_verdict(name: &str) -> Option<bool> {
    match name {
        "cla_small" => Some(true),
        "ordu_not_cla" => Some(false),
        _ => None,
    }
}

/// Decompositions under which the union's choice is claimed to break the
/// single-ranking condition.
pub fn remark1_parts(name: &str) -> Option<&'static [&'static str]> {
    match name {
        "ok2015_decoy" => Some(&["abd", "acd"]),
        "pe_table" => Some(&["abc", "ad"]),
        "rsm_table" => Some(&["abd", "bcd", "bc"]),
        _ => None,
    }
}

pub(crate) fn parts_menus(ds: &ChoiceDataset, parts: &[&str]) -> Result<Vec<crate::menu::Menu>, DatasetError> {
    parts.iter().map(|p| ds.menu_of(&letters(p))).collect()
}
