//! Eulerian orthogonal arrays from linear codes, and the decoupling
//! schedules they define.
//!
//! The pipeline runs bottom-up:
//!
//! - [`field`]: table arithmetic in GF(p^m) and the coordinate map
//!   GF(d²) → Z_d × Z_d.
//! - [`code`]: linear codes (Hamming family, duals, distances).
//! - [`oa`]: orthogonal arrays from codewords, with exhaustive strength checks.
//! - [`cayley`]: Euler cycles on Cayley graphs of GF(q)^k and Eulerian arrays.
//! - [`weyl`]: the Heisenberg–Weyl representation and group averaging.
//! - [`decoupling`]: schedules, first-order averaging and exact evolution.
//! - [`io`]: text formats for codes and arrays.

pub mod cayley;
pub mod code;
pub mod config;
pub mod decoupling;
pub mod error;
pub mod field;
pub mod group;
pub mod io;
pub mod matrix;
pub mod oa;
pub mod weyl;

pub use cayley::{euler_cycle_full, eulerian_oa_from_code, verify_eulerian, EulerCertificate, EulerViolation, EulerianCycle, EulerianOA};
pub use code::{hamming_code, CodeReport, LinearCode};
pub use config::Tolerances;
pub use error::{Error, Result};
pub use field::{gf_new, FieldSpec, FieldTable, Symbol};
pub use matrix::ComplexMatrix;
pub use oa::{max_strength, oa_from_code, verify_strength, OrthogonalArray, StrengthViolation, SymbolMatrix};
pub use weyl::GroupLabel;
pub use decoupling::{
    average_schedule, bangbang_average, bangbang_schedule, convergence_sweep, euler_schedule, eulerian_average, exact_evolution, fs_map,
    generator_hamiltonian, random_drift, segment_average, single_cycle_average, AverageMethod, AverageReport, DriftHamiltonian, DriftTerm,
    Schedule, ScheduleMode,
};
