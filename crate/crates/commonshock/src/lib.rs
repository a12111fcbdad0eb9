//! Auto-balanced Tweedie common shock models for claim arrays.
//!
//! Claim observations `X_ij` of several business segments are modelled as
//! sums of Tweedie-distributed components: umbrella shocks shared across
//! all arrays over partition subsets (rows, columns, diagonals, cells or
//! custom shapes), array-specific shocks over the same subsets, and a
//! cell-level idiosyncratic part. The mixture coefficients that keep the
//! sum Tweedie are derived from the component means and CoVs, so closure
//! holds by construction.
//!
//! The crate provides:
//!
//! * [`tweedie`] — the additive-form distribution family: cumulant
//!   function, moments, re-parameterization, closure under scaling and
//!   addition, and exact sampling for the normal, Poisson, compound
//!   Poisson-gamma and gamma powers;
//! * [`array`] / [`partition`] — claim-array geometry, partitions and
//!   connectedness equivalence classes;
//! * [`model`] — model assembly, per-cell observation distributions,
//!   moments and expected contribution shares;
//! * [`balance`] — verification of the auto-balance conditions, the
//!   per-array multiples `C`, `K` and `kappa`, and the class-constancy
//!   consequence;
//! * [`sim`] — reproducible Monte Carlo simulation with per-component
//!   substreams and schedule-independent parallel reduction;
//! * [`config`] / [`datasets`] / [`report`] — JSON model configuration,
//!   three built-in synthetic datasets, and CSV/text reports.
//!
//! The `commonshock` binary exposes the same functionality as subcommands
//! (`validate`, `moments`, `contributions`, `simulate`, `gen-dataset`,
//! `classes`); the `examples/` directory walks through each capability.

pub mod array;
pub mod balance;
pub mod config;
pub mod datasets;
pub mod error;
pub mod model;
pub mod partition;
pub mod report;
pub mod sim;
pub mod tweedie;

pub use array::{ArrayLayout, CellId};
pub use balance::{
    balanced_cell_moments, check_auto_balance, check_class_constancy, BalanceCondition,
    BalanceConstants, BalanceReport, BalanceViolation, ClassConstancyFinding, DEFAULT_BALANCE_TOL,
};
pub use error::{Error, Result};
pub use model::{
    CellMoments, ContributionShares, MixtureCoefficients, ShockLayer, ShockLayerSpec, ShockModel,
};
pub use partition::{equivalence_classes, EquivalenceClasses, Partition, PartitionKind};
pub use sim::{
    realized_contributions, simulate, CellSummary, ComponentKey, ContributionTable,
    EmpiricalSummary, ReplicationRecord, SeedSpec, SimulationOptions, SimulationResult,
    StreamLabel,
};
pub use tweedie::{alpha_of, cumulant_b, MeanCov, Moments, TweedieParams, DEFAULT_REL_TOL};
