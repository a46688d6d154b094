//! Sequential sharing of nonlocality in star-network Bell experiments.
//!
//! A star network has `n` independent sources. Source `l` prepares an
//! entangled pair shared by the edge party Alice^l and the central party Bob.
//! Each edge party picks one of `m` dichotomic observables, Bob picks one of
//! `2^(m-1)` settings, and classical (n-local) models obey
//!
//! ```text
//! S = sum_i |J_i|^(1/n) <= alpha_m
//! ```
//!
//! This crate answers the question: if a chain of independent observers on an
//! edge each measure *unsharply* and pass the post-measurement state on, how
//! many of them still see a violation?
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`]: dense complex matrices, Kronecker products, traces and the
//!   Hermiticity / positivity predicates everything else relies on.
//! * [`observables`]: anticommuting observable sets, random-access-code sign
//!   patterns, Bob's product components and maximally entangled sources.
//! * [`measurement`]: unsharp POVMs, Lüders updates and the setting-averaged
//!   relay channel an edge observer applies before the next one measures.
//! * [`network`]: exact simulation of a scenario, both with a factorized
//!   per-edge engine and with the monolithic tensor-product state.
//! * [`analytic`]: closed-form decay factors, critical unsharpness schedules
//!   and edge-count thresholds.
//! * [`sos`]: numerical sum-of-squares certificate for the two-input bilocal
//!   optimum `2√2`.
//!
//! ```
//! use netshare::{analytic, network::{Scenario, SharingMode}};
//!
//! let crit = analytic::critical_schedule(2, 2, SharingMode::Asymmetric).unwrap();
//! assert_eq!(crit.max_observers, 6);
//!
//! let sharp = Scenario::sharp(2, 2).unwrap();
//! let reports = netshare::network::run_sequence(&sharp).unwrap();
//! assert!((reports[0].s_value - 2.0 * 2f64.sqrt()).abs() < 1e-12);
//! ```

pub mod analytic;
mod error;
pub mod measurement;
pub mod network;
pub mod observables;
pub mod sos;
pub mod tensor;
pub mod tolerance;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
pub use tensor::ComplexMatrix;
