//! Parameter sweeps comparing the exact no-skip solver with annealing.
//!
//! A sweep walks one axis (cost tolerance, or a multiplier on all set-up or
//! holding costs), across several generated demand schedules, running each
//! requested method at every grid point. Infeasible points are recorded, not
//! dropped. Rows are independent work items; `WHEELOPT_THREADS` caps
//! parallelism (0 runs sequentially) and the output order is canonical
//! regardless of how rows were scheduled.

use std::time::Instant;

use rayon::prelude::*;

use crate::datagen::{generate_schedule, DemandGenSpec};
use crate::ilp::{relaxed_total_cost, solve_instance, IlpSolution};
use crate::model::{DemandSchedule, HorizonConfig, ItemParams, ModelError, ProductWheel};
use crate::sa::{optimize, SaConfig, SaTrace};
use crate::simulator::{simulate, simulate_no_skip};

/// Which instance parameter the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SweepAxis {
    /// Replace the cost tolerance with the grid value.
    CostTolerance,
    /// Scale every item's set-up cost by the grid value.
    SetupMultiplier,
    /// Scale every item's holding-cost rate by the grid value.
    InventoryMultiplier,
}

impl SweepAxis {
    pub fn label(&self) -> &'static str {
        match self {
            SweepAxis::CostTolerance => "cost_tolerance",
            SweepAxis::SetupMultiplier => "setup_multiplier",
            SweepAxis::InventoryMultiplier => "inventory_multiplier",
        }
    }

    pub fn parse(s: &str) -> Option<SweepAxis> {
        match s {
            "cost_tolerance" => Some(SweepAxis::CostTolerance),
            "setup_multiplier" => Some(SweepAxis::SetupMultiplier),
            "inventory_multiplier" => Some(SweepAxis::InventoryMultiplier),
            _ => None,
        }
    }

    /// Default ten-point grid: tolerances bracket the reference budget of
    /// 40000, multipliers run 1..=10.
    pub fn default_values(&self) -> Vec<f64> {
        match self {
            SweepAxis::CostTolerance => (0..10).map(|i| 20_000.0 + 5_000.0 * i as f64).collect(),
            _ => (1..=10).map(|i| i as f64).collect(),
        }
    }
}

/// Solution method of one sweep row. The ordering (exact solver first) is the
/// canonical output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Ilp,
    Sa,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Ilp => "ilp",
            Method::Sa => "sa",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "ilp" => Some(Method::Ilp),
            "sa" => Some(Method::Sa),
            _ => None,
        }
    }
}

/// Annealer settings used at every sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SaSweepParams {
    pub iterations: usize,
    /// Independent chains per point; the best feasible result wins.
    pub restarts: usize,
    pub step: i64,
    /// Cooling constant as a fraction of the initial feasible RMS at each
    /// point.
    pub cooling_fraction: f64,
    pub max_proposal_attempts: usize,
    pub seed: u64,
}

impl Default for SaSweepParams {
    fn default() -> Self {
        SaSweepParams {
            iterations: 2000,
            restarts: 3,
            step: 1,
            cooling_fraction: 0.05,
            max_proposal_attempts: SaConfig::DEFAULT_MAX_PROPOSAL_ATTEMPTS,
            seed: 1,
        }
    }
}

/// Full description of one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub schedule_seeds: Vec<u64>,
    pub items: Vec<ItemParams>,
    pub config: HorizonConfig,
    pub methods: Vec<Method>,
    pub sa: SaSweepParams,
    pub lambda_max: i64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        crate::model::validate_items(&self.items)?;
        self.config.validate()?;
        if self.values.is_empty() {
            return Err(ModelError::EmptyInput("sweep values"));
        }
        if !self.values.windows(2).all(|w| w[0] < w[1]) {
            return Err(ModelError::InvalidParameter {
                field: "values",
                message: "must be strictly increasing".to_string(),
            });
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidParameter {
                field: "values",
                message: "must be finite".to_string(),
            });
        }
        if self.schedule_seeds.is_empty() {
            return Err(ModelError::EmptyInput("schedule_seeds"));
        }
        if self.methods.is_empty() {
            return Err(ModelError::EmptyInput("methods"));
        }
        if self.lambda_max < 1 {
            return Err(ModelError::InvalidParameter {
                field: "lambda_max",
                message: "must be >= 1".to_string(),
            });
        }
        Ok(())
    }
}

/// One result row. Infeasible rows carry no metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub axis_value: f64,
    /// 1-based schedule index.
    pub schedule_id: usize,
    pub method: Method,
    pub feasible: bool,
    pub rms_wheel_time: Option<f64>,
    pub simulated_total_cost: Option<f64>,
    /// Cost of the relaxed no-skip model at the reported wheel (exact solver
    /// rows only; the relaxed and simulated notions genuinely differ).
    pub relaxed_cost: Option<f64>,
    pub wheel: Option<ProductWheel>,
    pub wallclock_ms: u128,
}

/// Applies one axis value to the base instance.
pub fn apply_axis(
    items: &[ItemParams],
    config: &HorizonConfig,
    axis: SweepAxis,
    value: f64,
) -> (Vec<ItemParams>, HorizonConfig) {
    let mut items = items.to_vec();
    let mut config = config.clone();
    match axis {
        SweepAxis::CostTolerance => config.cost_tolerance = value,
        SweepAxis::SetupMultiplier => {
            for item in &mut items {
                item.setup_cost *= value;
            }
        }
        SweepAxis::InventoryMultiplier => {
            for item in &mut items {
                item.inventory_cost_rate *= value;
            }
        }
    }
    (items, config)
}

/// One splitmix64 step; decorrelates per-row seeds derived from a base seed.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Demand-balanced starting wheel for the annealer.
///
/// Walks candidate wheels from lean (many cycles per period) to large (one
/// cycle per period), sizing each item's batch count to cover its worst
/// prefix-average demand at the target cycle count, with a small margin
/// ladder on top for spiky schedules. Returns the first wheel that simulates
/// feasible together with its RMS; lean candidates fail first when the
/// budget is tight, so the search lands on the leanest workable start.
pub fn default_initial_wheel(
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
) -> Option<(ProductWheel, f64)> {
    let horizon = schedule.num_periods();
    // Worst prefix-average demand net of initial stock: the rate production
    // must sustain from period 1 for coverage to never fall behind.
    let required_rates: Vec<f64> = (0..items.len())
        .map(|i| {
            (1..=horizon)
                .map(|h| {
                    (schedule.cumulative_demand(i, h) - items[i].initial_inventory) as f64
                        / h as f64
                })
                .fold(0.0f64, f64::max)
        })
        .collect();
    for cycles_target in (1..=50u32).rev() {
        for margin in [1.0, 1.05, 1.1, 1.2, 1.35, 1.5] {
            let batches: Vec<i64> = required_rates
                .iter()
                .zip(items)
                .map(|(&rate, item)| {
                    let need = margin * rate / (item.batch_size as f64 * cycles_target as f64);
                    (need.ceil() as i64).max(1)
                })
                .collect();
            let wheel = ProductWheel::new(batches).expect("ladder batches are >= 1");
            if let Ok(sim) = simulate(&wheel, schedule, items, config) {
                if sim.feasible {
                    return Some((wheel, sim.rms_wheel_time));
                }
            }
        }
    }
    None
}

/// Runs the annealer at one point: ladder start, fractional cooling, a few
/// restarts with derived seeds, best feasible trace wins.
pub fn run_sa_point(
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
    sa: &SaSweepParams,
    stream_base: u64,
) -> Option<SaTrace> {
    let (initial, initial_rms) = default_initial_wheel(schedule, items, config)?;
    let cooling = (sa.cooling_fraction * initial_rms).max(1e-9);
    let mut best: Option<SaTrace> = None;
    for restart in 0..sa.restarts.max(1) {
        let sa_config = SaConfig {
            cooling,
            iterations: sa.iterations,
            max_proposal_attempts: sa.max_proposal_attempts,
            proposal_step: sa.step,
            seed: derive_seed(sa.seed, stream_base.wrapping_add(restart as u64)),
        };
        if let Ok(trace) = optimize(&initial, schedule, items, config, &sa_config) {
            let better = match &best {
                None => true,
                Some(incumbent) => trace.best_rms < incumbent.best_rms,
            };
            if better {
                best = Some(trace);
            }
        }
    }
    best
}

fn run_row(
    spec: &SweepSpec,
    schedule: &DemandSchedule,
    value_index: usize,
    schedule_index: usize,
    method: Method,
) -> SweepRow {
    let axis_value = spec.values[value_index];
    let (items, config) = apply_axis(&spec.items, &spec.config, spec.axis, axis_value);
    let started = Instant::now();
    let mut row = SweepRow {
        axis: spec.axis,
        axis_value,
        schedule_id: schedule_index + 1,
        method,
        feasible: false,
        rms_wheel_time: None,
        simulated_total_cost: None,
        relaxed_cost: None,
        wheel: None,
        wallclock_ms: 0,
    };

    match method {
        Method::Ilp => {
            if let Ok(IlpSolution::Optimal(opt)) =
                solve_instance(schedule, &items, &config, spec.lambda_max)
            {
                // Report costs from a floor-based never-skip run of the
                // relaxed optimum next to the relaxed-model cost.
                let sim = simulate_no_skip(&opt.wheel, schedule, &items, &config)
                    .expect("dimensions validated");
                row.feasible = true;
                row.rms_wheel_time = Some(sim.rms_wheel_time);
                row.simulated_total_cost = Some(sim.total_cost);
                row.relaxed_cost = Some(
                    relaxed_total_cost(&opt.wheel, schedule, &items, &config)
                        .expect("dimensions validated"),
                );
                row.wheel = Some(opt.wheel);
            }
        }
        Method::Sa => {
            let stream_base = ((value_index as u64) << 32) | ((schedule_index as u64) << 16);
            if let Some(trace) = run_sa_point(schedule, &items, &config, &spec.sa, stream_base) {
                let sim = simulate(&trace.best_wheel, schedule, &items, &config)
                    .expect("dimensions validated");
                row.feasible = true;
                row.rms_wheel_time = Some(trace.best_rms);
                row.simulated_total_cost = Some(sim.total_cost);
                row.wheel = Some(trace.best_wheel);
            }
        }
    }

    row.wallclock_ms = started.elapsed().as_millis();
    row
}

/// Thread cap from `WHEELOPT_THREADS`: `Some(0)` or `Some(1)` means run
/// sequentially, unset means use the default pool.
fn thread_cap() -> Option<usize> {
    std::env::var("WHEELOPT_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
}

/// Runs the full sweep and returns rows sorted by (axis value, schedule,
/// method).
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, ModelError> {
    spec.validate()?;

    let schedules: Vec<DemandSchedule> = spec
        .schedule_seeds
        .iter()
        .map(|&seed| {
            generate_schedule(&DemandGenSpec::from_items(
                &spec.items,
                spec.config.num_periods,
                seed,
            ))
        })
        .collect::<Result<_, _>>()?;

    let mut work: Vec<(usize, usize, Method)> = Vec::new();
    for value_index in 0..spec.values.len() {
        for schedule_index in 0..schedules.len() {
            for &method in &spec.methods {
                work.push((value_index, schedule_index, method));
            }
        }
    }

    let run_all = |items: &[(usize, usize, Method)]| -> Vec<SweepRow> {
        items
            .par_iter()
            .map(|&(vi, si, method)| run_row(spec, &schedules[si], vi, si, method))
            .collect()
    };

    let mut rows = match thread_cap() {
        Some(0) | Some(1) => work
            .iter()
            .map(|&(vi, si, method)| run_row(spec, &schedules[si], vi, si, method))
            .collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(|| run_all(&work)))
            .unwrap_or_else(|_| {
                work.iter()
                    .map(|&(vi, si, method)| run_row(spec, &schedules[si], vi, si, method))
                    .collect()
            }),
        None => run_all(&work),
    };

    rows.sort_by(|a, b| {
        a.axis_value
            .partial_cmp(&b.axis_value)
            .expect("values validated finite")
            .then(a.schedule_id.cmp(&b.schedule_id))
            .then(a.method.cmp(&b.method))
    });
    Ok(rows)
}
