//! Multi-period production simulation for a fixed wheel.
//!
//! Each period the policy decides which items run, the surviving cycle time
//! determines how many whole wheel cycles fit, inventory rolls forward, and
//! set-up plus holding costs accrue. Feasibility means demand is covered
//! every period and the horizon-total cost stays within the budget.
//!
//! The skip rule is non-anticipative: the decision for period `h` reads only
//! the stock left after period `h - 1` and the demand of period `h`, never
//! anything later.

use std::fmt;

use crate::model::{
    cycles_in_period, period_wheel_time, rms_wheel_time, DemandSchedule, HorizonConfig, ItemParams,
    ModelError, ProductWheel,
};

/// Which skipping rule drives the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipPolicy {
    /// Skip an item when leftover stock covers both its trigger point and the
    /// current period's demand.
    TriggerPoint,
    /// Produce every item every period. Used to evaluate wheels from the
    /// no-skip solver under the floor-based cycle count.
    NeverSkip,
}

/// One period of the simulation trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRecord {
    /// 1-based period index.
    pub period_index: usize,
    /// Production indicator per item (the skipping coefficient: `true` ran).
    pub produced: Vec<bool>,
    /// Cycle time of this period's reduced wheel.
    pub period_wheel_time: f64,
    /// Whole wheel cycles completed.
    pub cycles: i64,
    /// Stock after production, before this period's demand is taken out.
    pub inventory_after_production: Vec<i64>,
    /// Changeover cost: per produced item, setup_cost once per cycle.
    pub setup_cost: f64,
    /// Holding cost on the stock carried into the period.
    pub inventory_cost: f64,
}

/// First constraint violated by an infeasible run.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Stock after production fell short of demand (items and periods are
    /// reported 1-based).
    Demand { item: usize, period: usize },
    /// Horizon-total cost exceeded the tolerance.
    CostTolerance {
        total_cost: f64,
        cost_tolerance: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Demand { item, period } => write!(
                f,
                "demand constraint violated for item {item} in period {period}"
            ),
            Violation::CostTolerance {
                total_cost,
                cost_tolerance,
            } => write!(
                f,
                "cost constraint violated: total cost {total_cost:.6} exceeds tolerance {cost_tolerance:.6}"
            ),
        }
    }
}

/// Outcome of simulating a wheel over the full horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub feasible: bool,
    pub violation: Option<Violation>,
    pub periods: Vec<PeriodRecord>,
    pub rms_wheel_time: f64,
    pub total_cost: f64,
}

/// Trigger-point skip rule for one item.
///
/// Returns `true` (skip) exactly when the leftover stock covers both the
/// trigger point and the current demand; ties skip. `leftover_inventory` is
/// the stock carried out of the previous period.
pub fn skip_decision(leftover_inventory: i64, trigger_point: i64, current_demand: i64) -> bool {
    leftover_inventory >= trigger_point.max(current_demand)
}

/// Advances the simulation by one period under the trigger-point policy.
///
/// `prev_inventory` and `prev_demand` are the previous period's
/// after-production stock and demand (all zeros demand for period 1);
/// `period_index` is 1-based.
pub fn step_period(
    prev_inventory: &[i64],
    prev_demand: &[i64],
    current_demand: &[i64],
    wheel: &ProductWheel,
    items: &[ItemParams],
    config: &HorizonConfig,
    period_index: usize,
) -> Result<PeriodRecord, ModelError> {
    step_period_with_policy(
        prev_inventory,
        prev_demand,
        current_demand,
        wheel,
        items,
        config,
        period_index,
        SkipPolicy::TriggerPoint,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn step_period_with_policy(
    prev_inventory: &[i64],
    prev_demand: &[i64],
    current_demand: &[i64],
    wheel: &ProductWheel,
    items: &[ItemParams],
    config: &HorizonConfig,
    period_index: usize,
    policy: SkipPolicy,
) -> Result<PeriodRecord, ModelError> {
    let n = items.len();
    for len in [
        wheel.len(),
        prev_inventory.len(),
        prev_demand.len(),
        current_demand.len(),
        config.num_items,
    ] {
        if len != n {
            return Err(ModelError::DimensionMismatch {
                expected: n,
                actual: len,
            });
        }
    }

    let leftover: Vec<i64> = prev_inventory
        .iter()
        .zip(prev_demand)
        .map(|(&inv, &dem)| inv - dem)
        .collect();

    let produced: Vec<bool> = match policy {
        SkipPolicy::NeverSkip => vec![true; n],
        SkipPolicy::TriggerPoint => leftover
            .iter()
            .zip(items)
            .zip(current_demand)
            .map(|((&left, item), &dem)| !skip_decision(left, item.trigger_point, dem))
            .collect(),
    };

    let omega = period_wheel_time(wheel, items, &produced)?;
    let cycles = cycles_in_period(config.period_length, omega);

    let inventory_after_production: Vec<i64> = leftover
        .iter()
        .zip(wheel.batches())
        .zip(items)
        .zip(&produced)
        .map(|(((&left, &batches), item), &ran)| {
            left + if ran {
                batches * item.batch_size * cycles
            } else {
                0
            }
        })
        .collect();

    let setup_cost: f64 = items
        .iter()
        .zip(&produced)
        .filter(|&(_, &ran)| ran)
        .map(|(item, _)| item.setup_cost * cycles as f64)
        .sum();
    let inventory_cost: f64 = items
        .iter()
        .zip(&leftover)
        .map(|(item, &left)| item.inventory_cost_rate * left as f64)
        .sum();

    Ok(PeriodRecord {
        period_index,
        produced,
        period_wheel_time: omega,
        cycles,
        inventory_after_production,
        setup_cost,
        inventory_cost,
    })
}

/// Simulates the full horizon under the trigger-point skipping policy.
pub fn simulate(
    wheel: &ProductWheel,
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
) -> Result<SimulationResult, ModelError> {
    simulate_with_policy(wheel, schedule, items, config, SkipPolicy::TriggerPoint)
}

/// Simulates with every item produced every period.
pub fn simulate_no_skip(
    wheel: &ProductWheel,
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
) -> Result<SimulationResult, ModelError> {
    simulate_with_policy(wheel, schedule, items, config, SkipPolicy::NeverSkip)
}

/// Runs all `H` periods, threading inventory through the recursion.
///
/// The demand check runs every period; the cost check applies once to the
/// horizon total. A violated run still simulates to the end of the horizon
/// (holding cost may then see negative leftovers) so sweep diagnostics get a
/// complete trace; only the first violation is recorded.
pub fn simulate_with_policy(
    wheel: &ProductWheel,
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
    policy: SkipPolicy,
) -> Result<SimulationResult, ModelError> {
    schedule.matches(config)?;
    if wheel.len() != items.len() {
        return Err(ModelError::DimensionMismatch {
            expected: items.len(),
            actual: wheel.len(),
        });
    }

    let n = items.len();
    let mut prev_inventory: Vec<i64> = items.iter().map(|item| item.initial_inventory).collect();
    let mut prev_demand = vec![0i64; n];
    let mut periods = Vec::with_capacity(config.num_periods);
    let mut omegas = Vec::with_capacity(config.num_periods);
    let mut total_cost = 0.0;
    let mut violation: Option<Violation> = None;

    for h in 1..=config.num_periods {
        let current_demand = schedule.period(h);
        let record = step_period_with_policy(
            &prev_inventory,
            &prev_demand,
            current_demand,
            wheel,
            items,
            config,
            h,
            policy,
        )?;

        if violation.is_none() {
            for (i, (&inv, &dem)) in record
                .inventory_after_production
                .iter()
                .zip(current_demand)
                .enumerate()
            {
                if inv < dem {
                    violation = Some(Violation::Demand {
                        item: i + 1,
                        period: h,
                    });
                    break;
                }
            }
        }

        total_cost += record.setup_cost + record.inventory_cost;
        omegas.push(record.period_wheel_time);
        prev_inventory = record.inventory_after_production.clone();
        prev_demand = current_demand.to_vec();
        periods.push(record);
    }

    if violation.is_none() && total_cost > config.cost_tolerance {
        violation = Some(Violation::CostTolerance {
            total_cost,
            cost_tolerance: config.cost_tolerance,
        });
    }

    Ok(SimulationResult {
        feasible: violation.is_none(),
        violation,
        periods,
        rms_wheel_time: rms_wheel_time(&omegas)?,
        total_cost,
    })
}
