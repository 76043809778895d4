//! Reference-dependent choice over finite data.
//!
//! Checks choice datasets against reference-dependence axioms, builds
//! ordered-reference representations (generic, risk, time, and social),
//! and simulates choices from their parameters. All arithmetic is exact.

pub mod dataset;
pub mod domain_fixtures;
pub mod engine;
pub mod lp;
pub mod menu;
pub mod ordu;
pub mod property;
pub mod rational;
pub mod risk;
pub mod rivals;
pub mod social;
pub mod time;

pub use dataset::{validate_dataset, ChoiceDataset, DatasetError, PayloadKind};
pub use engine::{
    candidate_references, check_reference_dependence, psi_consistency_check, synthesize_reference_order, IdentityPsi,
    PsiMap, Quantifier, ReferenceOrder,
};
pub use lp::{solve_linear_feasibility, Feasibility, LinearFeasibilityProblem};
pub use menu::Menu;
pub use property::{warp_over, FiniteProperty, ViolationWitness, Warp};
pub use rational::Rational;
