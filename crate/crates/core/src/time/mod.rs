//! Choice over dated payments: earliest-payment references, Stationarity,
//! Present Bias, and discounting that depends on the earliest payday.

mod axioms;
mod pbdu;

pub use axioms::{
    check_outcome_monotonicity_impatience, check_present_bias, check_time_reference_dependence,
    check_time_reference_dependence_by_subsets, earliest_payments, lemma2_equivalence, linkage_report_time, payments,
    standing_assumption, stationarity_over, Earliest, Lemma2Outcome, Stationarity, TimeLinkage,
};
pub use pbdu::{
    fit_pbdu, payment_universe, pbdu_axiom_battery, simulate_pbdu, single_switching_check, verify_pbdu, BinaryPick,
    PbduParams, SwitchingReport, TimeMismatch,
};

use crate::dataset::{DatasetError, PayloadKind};
use crate::engine::EngineError;
use crate::property::ViolationWitness;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TimeError {
    #[error("expected dated-payment data, found {0:?}")]
    NotDatedPayments(PayloadKind),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("no utility for amount {0}")]
    UnknownAmount(String),
    #[error("{} axiom violation(s)", .0.len())]
    AxiomFails(Vec<ViolationWitness>),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
