//! Domain types and the pure per-cycle formulas shared by the simulator and
//! both optimizers.
//!
//! Conventions used throughout the crate:
//! - items are indexed `0..N` in code, periods `1..=H` (period 0 is the
//!   initial state, with demand defined as zero);
//! - units and demand are integer counts, times and costs are `f64`;
//! - all quantities are dimensionless beyond the names (time-units,
//!   currency, units).

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid {field}: {message}")]
    InvalidParameter {
        field: &'static str,
        message: String,
    },
}

impl ModelError {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        ModelError::InvalidParameter {
            field,
            message: message.into(),
        }
    }
}

fn check_len(expected: usize, actual: usize) -> Result<(), ModelError> {
    if expected == actual {
        Ok(())
    } else {
        Err(ModelError::DimensionMismatch { expected, actual })
    }
}

/// Per-item constants of a production instance.
///
/// `demand_mean` / `demand_std` parameterize the synthetic demand generator;
/// they play no role in simulation or solving once a schedule exists.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemParams {
    /// Time to run one batch (t_i), > 0.
    pub batch_time: f64,
    /// Units produced per batch (M_i), >= 1.
    pub batch_size: i64,
    /// Changeover cost charged once per cycle in which the item runs (p_i).
    pub setup_cost: f64,
    /// Holding cost per unit carried into a period (k_i).
    pub inventory_cost_rate: f64,
    /// Stock on hand before period 1 (I_i^0), >= 0.
    pub initial_inventory: i64,
    /// Inventory level below which production is forced (Q_i), >= 0.
    pub trigger_point: i64,
    /// Mean of the per-period demand distribution.
    pub demand_mean: f64,
    /// Standard deviation of the per-period demand distribution, >= 0.
    pub demand_std: f64,
}

impl ItemParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.batch_time.is_finite() || self.batch_time <= 0.0 {
            return Err(ModelError::invalid(
                "batch_time",
                format!("must be > 0, got {}", self.batch_time),
            ));
        }
        if self.batch_size < 1 {
            return Err(ModelError::invalid(
                "batch_size",
                format!("must be >= 1, got {}", self.batch_size),
            ));
        }
        if !self.setup_cost.is_finite() || self.setup_cost < 0.0 {
            return Err(ModelError::invalid(
                "setup_cost",
                format!("must be >= 0, got {}", self.setup_cost),
            ));
        }
        if !self.inventory_cost_rate.is_finite() || self.inventory_cost_rate < 0.0 {
            return Err(ModelError::invalid(
                "inventory_cost_rate",
                format!("must be >= 0, got {}", self.inventory_cost_rate),
            ));
        }
        if self.initial_inventory < 0 {
            return Err(ModelError::invalid(
                "initial_inventory",
                format!("must be >= 0, got {}", self.initial_inventory),
            ));
        }
        if self.trigger_point < 0 {
            return Err(ModelError::invalid(
                "trigger_point",
                format!("must be >= 0, got {}", self.trigger_point),
            ));
        }
        if !self.demand_std.is_finite() || self.demand_std < 0.0 {
            return Err(ModelError::invalid(
                "demand_std",
                format!("must be >= 0, got {}", self.demand_std),
            ));
        }
        if !self.demand_mean.is_finite() {
            return Err(ModelError::invalid("demand_mean", "must be finite"));
        }
        Ok(())
    }
}

pub fn validate_items(items: &[ItemParams]) -> Result<(), ModelError> {
    if items.is_empty() {
        return Err(ModelError::EmptyInput("items"));
    }
    for item in items {
        item.validate()?;
    }
    Ok(())
}

/// The decision variable: how many batches of each item one wheel cycle runs.
///
/// Every count is at least 1. A zero count would name an item the wheel can
/// never produce (skipping only removes production), so the degenerate case
/// is rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductWheel {
    batches: Vec<i64>,
}

impl ProductWheel {
    pub fn new(batches: Vec<i64>) -> Result<Self, ModelError> {
        if batches.is_empty() {
            return Err(ModelError::EmptyInput("batches"));
        }
        if let Some(bad) = batches.iter().find(|&&b| b < 1) {
            return Err(ModelError::invalid(
                "batches",
                format!("every batch count must be >= 1, got {bad}"),
            ));
        }
        Ok(ProductWheel { batches })
    }

    pub fn batches(&self) -> &[i64] {
        &self.batches
    }

    pub fn len(&self) -> usize {
        self.batches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }
}

/// Horizon-level constants: instance shape, period length T, and the total
/// cost budget tau.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonConfig {
    pub num_items: usize,
    pub num_periods: usize,
    /// Length of one period in time-units (T), > 0.
    pub period_length: f64,
    /// Budget for set-up plus holding cost summed over the horizon (tau).
    pub cost_tolerance: f64,
}

impl HorizonConfig {
    pub fn new(
        num_items: usize,
        num_periods: usize,
        period_length: f64,
        cost_tolerance: f64,
    ) -> Result<Self, ModelError> {
        let config = HorizonConfig {
            num_items,
            num_periods,
            period_length,
            cost_tolerance,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.num_items < 1 {
            return Err(ModelError::invalid("num_items", "must be >= 1"));
        }
        if self.num_periods < 1 {
            return Err(ModelError::invalid("num_periods", "must be >= 1"));
        }
        if !self.period_length.is_finite() || self.period_length <= 0.0 {
            return Err(ModelError::invalid(
                "period_length",
                format!("must be > 0, got {}", self.period_length),
            ));
        }
        if !self.cost_tolerance.is_finite() || self.cost_tolerance < 0.0 {
            return Err(ModelError::invalid(
                "cost_tolerance",
                format!("must be >= 0, got {}", self.cost_tolerance),
            ));
        }
        Ok(())
    }
}

/// Per-item, per-period demand (D_i^h), stored period-major so the simulator
/// can slice one period at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandSchedule {
    /// `periods[h - 1][i]` is the demand for item `i` in period `h`.
    periods: Vec<Vec<i64>>,
}

impl DemandSchedule {
    /// Builds a schedule from item-major rows (`rows[i][h - 1]`), the shape
    /// demand appears in on disk and in the generator.
    pub fn from_item_rows(rows: Vec<Vec<i64>>) -> Result<Self, ModelError> {
        if rows.is_empty() {
            return Err(ModelError::EmptyInput("demand rows"));
        }
        let num_periods = rows[0].len();
        if num_periods == 0 {
            return Err(ModelError::EmptyInput("demand periods"));
        }
        for row in &rows {
            check_len(num_periods, row.len())?;
            if let Some(bad) = row.iter().find(|&&d| d < 0) {
                return Err(ModelError::invalid(
                    "demand",
                    format!("entries must be >= 0, got {bad}"),
                ));
            }
        }
        let periods = (0..num_periods)
            .map(|h| rows.iter().map(|row| row[h]).collect())
            .collect();
        Ok(DemandSchedule { periods })
    }

    pub fn num_items(&self) -> usize {
        self.periods[0].len()
    }

    pub fn num_periods(&self) -> usize {
        self.periods.len()
    }

    /// Demand vector for one period, `period` in `1..=H`.
    pub fn period(&self, period: usize) -> &[i64] {
        &self.periods[period - 1]
    }

    /// Demand for one item in one period, `period` in `1..=H`.
    pub fn demand(&self, item: usize, period: usize) -> i64 {
        self.periods[period - 1][item]
    }

    /// Cumulative demand for `item` over periods `1..=through_period`
    /// (zero when `through_period` is 0).
    pub fn cumulative_demand(&self, item: usize, through_period: usize) -> i64 {
        self.periods[..through_period].iter().map(|p| p[item]).sum()
    }

    pub fn matches(&self, config: &HorizonConfig) -> Result<(), ModelError> {
        check_len(config.num_items, self.num_items())?;
        check_len(config.num_periods, self.num_periods())
    }
}

/// Total time of one full wheel cycle: sum of batches[i] * batch_time[i].
pub fn wheel_time(wheel: &ProductWheel, items: &[ItemParams]) -> Result<f64, ModelError> {
    check_len(items.len(), wheel.len())?;
    Ok(wheel
        .batches()
        .iter()
        .zip(items)
        .map(|(&b, item)| b as f64 * item.batch_time)
        .sum())
}

/// Cycle time in one period when only the `produced` items run.
///
/// With every item produced this reduces to [`wheel_time`]; with nothing
/// produced it is zero.
pub fn period_wheel_time(
    wheel: &ProductWheel,
    items: &[ItemParams],
    produced: &[bool],
) -> Result<f64, ModelError> {
    check_len(items.len(), wheel.len())?;
    check_len(items.len(), produced.len())?;
    Ok(wheel
        .batches()
        .iter()
        .zip(items)
        .zip(produced)
        .filter(|&(_, &p)| p)
        .map(|((&b, item), _)| b as f64 * item.batch_time)
        .sum())
}

/// Root-mean-square of the per-period wheel times, the leanness objective.
///
/// Never below the arithmetic mean, so outlier periods are penalized harder
/// than under a plain average.
pub fn rms_wheel_time(period_times: &[f64]) -> Result<f64, ModelError> {
    if period_times.is_empty() {
        return Err(ModelError::EmptyInput("period_times"));
    }
    let sum_sq: f64 = period_times.iter().map(|t| t * t).sum();
    Ok((sum_sq / period_times.len() as f64).sqrt())
}

/// Whole wheel cycles that fit in a period: floor(T / omega_h).
///
/// A period in which every item is skipped has zero cycle time and, by
/// convention, zero cycles (nothing runs, so nothing is counted).
pub fn cycles_in_period(period_length: f64, period_wheel_time: f64) -> i64 {
    if period_wheel_time <= 0.0 {
        0
    } else {
        (period_length / period_wheel_time).floor() as i64
    }
}
