//! Simulated annealing over product wheels.
//!
//! The chain walks integer wheels. Each iteration proposes perturbed wheels
//! until one simulates feasible under the trigger-point policy, then accepts
//! it outright when the RMS wheel time does not increase, or with probability
//! `exp(-delta / C)` when it does. Cooling `C` is a constant, not a schedule.
//! Every feasible wheel seen is a candidate for the returned best, whether or
//! not the chain moved to it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{DemandSchedule, HorizonConfig, ItemParams, ModelError, ProductWheel};
use crate::simulator::simulate;

#[derive(Debug, Error, PartialEq)]
pub enum SaError {
    /// The initial wheel is infeasible and no feasible wheel was found within
    /// the proposal budget.
    #[error(
        "no feasible start: initial wheel infeasible and {attempts} proposals from it all failed"
    )]
    NoFeasibleStart { attempts: usize },
    /// An iteration's inner rejection loop ran out of attempts.
    #[error("proposal exhaustion at iteration {iteration}: {attempts} proposals without a feasible wheel")]
    ProposalExhaustion { iteration: usize, attempts: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Annealer parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    /// Cooling constant C in the acceptance probability, > 0.
    pub cooling: f64,
    /// Number of chain iterations W.
    pub iterations: usize,
    /// Budget for each inner rejection loop (and for bootstrapping an
    /// infeasible start).
    pub max_proposal_attempts: usize,
    /// Maximum per-coordinate perturbation magnitude.
    pub proposal_step: i64,
    pub seed: u64,
}

impl SaConfig {
    pub const DEFAULT_MAX_PROPOSAL_ATTEMPTS: usize = 10_000;
    pub const DEFAULT_PROPOSAL_STEP: i64 = 1;

    pub fn new(cooling: f64, iterations: usize, seed: u64) -> Self {
        SaConfig {
            cooling,
            iterations,
            max_proposal_attempts: Self::DEFAULT_MAX_PROPOSAL_ATTEMPTS,
            proposal_step: Self::DEFAULT_PROPOSAL_STEP,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.cooling.is_finite() || self.cooling <= 0.0 {
            return Err(ModelError::InvalidParameter {
                field: "cooling",
                message: format!("must be > 0, got {}", self.cooling),
            });
        }
        if self.max_proposal_attempts < 1 {
            return Err(ModelError::InvalidParameter {
                field: "max_proposal_attempts",
                message: "must be >= 1".to_string(),
            });
        }
        if self.proposal_step < 1 {
            return Err(ModelError::InvalidParameter {
                field: "proposal_step",
                message: format!("must be >= 1, got {}", self.proposal_step),
            });
        }
        Ok(())
    }
}

/// One chain iteration: the feasible proposal it evaluated and what happened.
#[derive(Debug, Clone, PartialEq)]
pub struct SaIteration {
    pub wheel: ProductWheel,
    pub rms: f64,
    pub accepted: bool,
    /// Proposals drawn before a feasible one appeared (at least 1).
    pub proposals_tried: usize,
}

/// Full trace of an annealing run.
#[derive(Debug, Clone, PartialEq)]
pub struct SaTrace {
    /// Feasible iteration-0 state (the given wheel, or the bootstrapped one).
    pub initial_wheel: ProductWheel,
    pub initial_rms: f64,
    /// Proposals spent making an infeasible start feasible (0 if the given
    /// wheel was already feasible).
    pub bootstrap_attempts: usize,
    pub iterations: Vec<SaIteration>,
    /// Lowest-RMS feasible wheel seen, the initial wheel included; first
    /// encountered wins ties.
    pub best_wheel: ProductWheel,
    pub best_rms: f64,
    /// Iteration that produced the best wheel; `None` means the initial
    /// wheel was never beaten.
    pub best_iteration: Option<usize>,
}

impl SaTrace {
    pub fn accepted_count(&self) -> usize {
        self.iterations.iter().filter(|it| it.accepted).count()
    }
}

/// Perturbs each batch count by an independent uniform integer draw from
/// `[-step, step]`, clamping at 1.
pub fn propose<R: Rng>(current: &ProductWheel, rng: &mut R, step: i64) -> ProductWheel {
    let batches = current
        .batches()
        .iter()
        .map(|&b| (b + rng.random_range(-step..=step)).max(1))
        .collect();
    ProductWheel::new(batches).expect("clamped batches are >= 1")
}

/// Metropolis acceptance probability `min(1, exp(-delta_rms / cooling))`.
///
/// Callers only consult this for worsening moves; `delta_rms <= 0` accepts
/// unconditionally before any draw happens.
pub fn acceptance_probability(delta_rms: f64, cooling: f64) -> f64 {
    (-delta_rms / cooling).exp().min(1.0)
}

/// The accept/reject rule given a uniform draw `z`: improving or equal moves
/// always pass, worsening moves pass when `z < exp(-delta / C)`.
pub fn accepts(delta_rms: f64, cooling: f64, z: f64) -> bool {
    delta_rms <= 0.0 || z < acceptance_probability(delta_rms, cooling)
}

/// Runs the annealing chain and returns its trace.
///
/// Deterministic for a fixed seed. Errors if no feasible wheel can be found
/// from the initial state, or if any iteration exhausts its proposal budget.
pub fn optimize(
    initial: &ProductWheel,
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
    sa_config: &SaConfig,
) -> Result<SaTrace, SaError> {
    sa_config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(sa_config.seed);

    // Establish a feasible iteration-0 state, proposing from the given wheel
    // if it is itself infeasible.
    let initial_sim = simulate(initial, schedule, items, config)?;
    let mut bootstrap_attempts = 0;
    let (start_wheel, start_rms) = if initial_sim.feasible {
        (initial.clone(), initial_sim.rms_wheel_time)
    } else {
        loop {
            if bootstrap_attempts >= sa_config.max_proposal_attempts {
                return Err(SaError::NoFeasibleStart {
                    attempts: bootstrap_attempts,
                });
            }
            bootstrap_attempts += 1;
            let candidate = propose(initial, &mut rng, sa_config.proposal_step);
            let sim = simulate(&candidate, schedule, items, config)?;
            if sim.feasible {
                break (candidate, sim.rms_wheel_time);
            }
        }
    };

    let mut current_wheel = start_wheel.clone();
    let mut current_rms = start_rms;
    let mut best_wheel = start_wheel.clone();
    let mut best_rms = start_rms;
    let mut best_iteration = None;
    let mut iterations = Vec::with_capacity(sa_config.iterations);

    for k in 0..sa_config.iterations {
        let mut proposals_tried = 0;
        let (candidate, candidate_rms) = loop {
            if proposals_tried >= sa_config.max_proposal_attempts {
                return Err(SaError::ProposalExhaustion {
                    iteration: k,
                    attempts: proposals_tried,
                });
            }
            proposals_tried += 1;
            let candidate = propose(&current_wheel, &mut rng, sa_config.proposal_step);
            let sim = simulate(&candidate, schedule, items, config)?;
            if sim.feasible {
                break (candidate, sim.rms_wheel_time);
            }
        };

        let delta = candidate_rms - current_rms;
        let accepted = if delta <= 0.0 {
            true
        } else {
            let z: f64 = rng.random();
            z < acceptance_probability(delta, sa_config.cooling)
        };

        if candidate_rms < best_rms {
            best_wheel = candidate.clone();
            best_rms = candidate_rms;
            best_iteration = Some(k);
        }
        if accepted {
            current_wheel = candidate.clone();
            current_rms = candidate_rms;
        }
        iterations.push(SaIteration {
            wheel: candidate,
            rms: candidate_rms,
            accepted,
            proposals_tried,
        });
    }

    Ok(SaTrace {
        initial_wheel: start_wheel,
        initial_rms: start_rms,
        bootstrap_attempts,
        iterations,
        best_wheel,
        best_rms,
        best_iteration,
    })
}
