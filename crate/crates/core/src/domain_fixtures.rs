//! Embedded datasets, parameter files, and menu lists for the lottery,
//! dated-payment, and income-split examples.

pub const NAMES: [&str; 9] = [
    "allais",
    "reverse_allais",
    "allais_triple_params",
    "allais_triple_menus",
    "present_bias",
    "dictator",
    "dictator_params",
    "surplus",
    "surplus_params",
];

pub fn json(name: &str) -> Option<&'static str> {
    Some(match name {
        "allais" => include_str!("../fixtures/allais.json"),
        "reverse_allais" => include_str!("../fixtures/reverse_allais.json"),
        "allais_triple_params" => include_str!("../fixtures/allais_triple_params.json"),
        "allais_triple_menus" => include_str!("../fixtures/allais_triple_menus.json"),
        "present_bias" => include_str!("../fixtures/present_bias.json"),
        "dictator" => include_str!("../fixtures/dictator.json"),
        "dictator_params" => include_str!("../fixtures/dictator_params.json"),
        "surplus" => include_str!("../fixtures/surplus.json"),
        "surplus_params" => include_str!("../fixtures/surplus_params.json"),
        _ => return None,
    })
}
