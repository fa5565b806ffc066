//! Copositive programming by an inexact projected subgradient method.
//!
//! * [`stqp`] solves standard quadratic programs min δᵀQδ over the simplex
//!   exactly, on a regular grid, or by random sampling.
//! * [`sip`] is the subgradient method for convex semi-infinite programs.
//! * [`copositive`] reduces copositive programs to that form with an StQP
//!   index oracle.
//! * [`cptest`] certifies that a matrix is not completely positive.

pub mod copositive;
pub mod cptest;
pub mod error;
pub mod generate;
pub mod instance;
pub mod matrix;
pub mod report;
pub mod rng;
pub mod simplex;
pub mod sip;
pub mod stqp;
pub mod tables;

pub use copositive::{build_sip, CoppOracleConfig, CoppSip};
pub use cptest::{test_cp, CpTestConfig, CpVerdict, Verdict};
pub use error::{Error, Result};
pub use instance::{CoppInstance, FeasibleSet};
pub use matrix::{frobenius_inner, quadratic_form, SymMatrix};
pub use report::{AuditMethod, Branch, IterationRecord, RunReport, Termination, RUN_SCHEMA};
pub use rng::{seeded_rng, RngStream};
pub use simplex::{GridPoint, SimplexPoint, SIMPLEX_TOL};
pub use sip::{run, SipConfig, SipProblem};
pub use stqp::{StqpMethod, StqpResult};
