//! Seeded synthetic demand schedules.
//!
//! Each entry is an independent normal draw per item and period, rounded to
//! the nearest whole unit and clamped at zero (the model counts discrete
//! units, and realistic deviations make negative draws possible). Schedules
//! are reproducible for a fixed seed within this implementation; bit-exact
//! agreement across implementations is not a goal.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::model::{DemandSchedule, ItemParams, ModelError};

/// Parameters of one schedule draw.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandGenSpec {
    /// Per-item (mean, standard deviation) of the demand distribution.
    pub per_item: Vec<(f64, f64)>,
    pub num_periods: usize,
    pub seed: u64,
}

impl DemandGenSpec {
    pub fn new(per_item: Vec<(f64, f64)>, num_periods: usize, seed: u64) -> Self {
        DemandGenSpec {
            per_item,
            num_periods,
            seed,
        }
    }

    /// Pulls the distribution parameters out of a list of items.
    pub fn from_items(items: &[ItemParams], num_periods: usize, seed: u64) -> Self {
        DemandGenSpec {
            per_item: items
                .iter()
                .map(|item| (item.demand_mean, item.demand_std))
                .collect(),
            num_periods,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.per_item.is_empty() {
            return Err(ModelError::EmptyInput("per_item"));
        }
        if self.num_periods < 1 {
            return Err(ModelError::InvalidParameter {
                field: "num_periods",
                message: "must be >= 1".to_string(),
            });
        }
        for &(mean, std) in &self.per_item {
            if !mean.is_finite() {
                return Err(ModelError::InvalidParameter {
                    field: "demand_mean",
                    message: format!("must be finite, got {mean}"),
                });
            }
            if !std.is_finite() || std < 0.0 {
                return Err(ModelError::InvalidParameter {
                    field: "demand_std",
                    message: format!("must be >= 0, got {std}"),
                });
            }
        }
        Ok(())
    }
}

/// Draws one schedule: rows are items, columns are periods, entries rounded
/// to the nearest integer and clamped at zero.
pub fn generate_schedule(spec: &DemandGenSpec) -> Result<DemandSchedule, ModelError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = Vec::with_capacity(spec.per_item.len());
    for &(mean, std) in &spec.per_item {
        let normal = Normal::new(mean, std).map_err(|e| ModelError::InvalidParameter {
            field: "demand distribution",
            message: e.to_string(),
        })?;
        let row: Vec<i64> = (0..spec.num_periods)
            .map(|_| normal.sample(&mut rng).round().max(0.0) as i64)
            .collect();
        rows.push(row);
    }
    DemandSchedule::from_item_rows(rows)
}
