//! Choice over lotteries: spread orders, least-risky references, risk
//! axioms, and expected-utility representations with ordered references.

mod areu;
mod axioms;
mod lottery;
mod triangle;

pub use areu::{
    class_utilities_coincide, concavity_compare, fit_areu, forced_above, rho_vector, simulate_areu, utility_from_rho,
    verify_areu, AreuParams, Concavity, Mismatch, RhoVector,
};
pub use axioms::{
    areu_axiom_battery, avoidable_risk_pattern, betweenness_over, check_avoidable_risk, check_fosd,
    check_risk_reference_dependence, independence_over, least_risky, linkage_report_risk, transitivity_over,
    Independence, LeastRisky, LinkageReport,
};
pub use lottery::{
    common_mixture, extreme_spread, fosd, mps, spread_weights, weak_extreme_spread, Lottery, LotteryData, PrizeSet,
};
pub use triangle::{fanning_classify, grid_points, slope, triangle_csv, Fanning, FanningReport};

use crate::dataset::{DatasetError, PayloadKind};
use crate::engine::{EngineError, RdFailure};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RiskError {
    #[error("prize sets differ: {0}")]
    PrizeSetMismatch(String),
    #[error("a prize set needs at least two distinct prizes")]
    TooFewPrizes,
    #[error("invalid lottery: {0}")]
    BadLottery(String),
    #[error("expected lottery data, found {0:?}")]
    NotLotteryData(PayloadKind),
    #[error("utility is not strictly increasing")]
    NotIncreasing,
    #[error("least-risky set is empty; the spread orders cycle")]
    EmptyPsi,
    #[error("unknown lottery `{0}`")]
    UnknownLottery(String),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("risk reference dependence fails at {} menu(s)", .0.len())]
    AxiomFails(Vec<RdFailure>),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("not a probability triangle: {0}")]
    NotATriangle(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
