//! Decoupling schedules built from (Eulerian) orthogonal arrays, their
//! first-order average Hamiltonians, and exact finite-cycle evolution.

pub mod average;
pub mod drift;
pub mod evolution;
pub mod schedule;

pub use average::{average_schedule, bangbang_average, eulerian_average, fs_map, gauss_legendre, segment_average, single_cycle_average, AverageMethod, AverageReport};
pub use drift::{random_drift, DriftHamiltonian, DriftTerm, FULL_SPACE_CAP};
pub use evolution::{convergence_sweep, exact_evolution, fit_slope, ConvergencePoint, ConvergenceReport};
pub use schedule::{bangbang_schedule, euler_schedule, generator_hamiltonian, schedule_from_walk, Schedule, ScheduleMode, Segment};
