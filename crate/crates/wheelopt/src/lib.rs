//! Product-wheel scheduling toolkit.
//!
//! A product wheel is a repeating production sequence: one cycle runs
//! `batches[i]` batches of each item `i`, and the wheel repeats as many whole
//! times as fit in a period. Shorter wheels are leaner but change over more
//! often, which costs money. This crate models that trade-off and ships two
//! optimizers for the wheel under a horizon-total cost budget:
//!
//! - [`ilp`]: an exact integer solve of the no-skipping relaxation, where the
//!   whole-cycle floor is dropped and the constraints become linear in the
//!   batch counts.
//! - [`sa`]: simulated annealing over wheels evaluated by the [`simulator`]
//!   under a non-anticipative trigger-point skipping policy.
//!
//! [`datagen`] produces seeded synthetic demand schedules, [`experiments`]
//! reproduces the parameter sweeps comparing both optimizers, and [`io`] plus
//! [`cli`] provide the file formats and command-line front end.

pub mod cli;
pub mod datagen;
pub mod experiments;
pub mod ilp;
pub mod io;
pub mod model;
pub mod sa;
pub mod simulator;

pub use model::{DemandSchedule, HorizonConfig, ItemParams, ModelError, ProductWheel};
pub use simulator::{SimulationResult, SkipPolicy};
