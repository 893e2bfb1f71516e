//! Exact solve of the no-skipping relaxation.
//!
//! With skipping disabled every period runs the full wheel, so the objective
//! is the cycle time `omega = sum_i t_i * lambda_i` itself. Allowing a
//! fractional number `T / omega` of cycles per period turns the inventory
//! recursion into a closed form and makes the constraints linear once
//! multiplied through by `omega > 0`.
//!
//! # Derivation of the linear rows
//!
//! Under the relaxation, stock after production in period `h` telescopes to
//!
//! ```text
//! I_i^h = I_i^0 - sum_{j=1}^{h-1} D_i^j + lambda_i * h * M_i * T / omega
//! ```
//!
//! **Demand rows.** `I_i^h >= D_i^h` rearranges to
//! `lambda_i * h * M_i * T / omega >= C_i^h - I_i^0` with
//! `C_i^h = sum_{j<=h} D_i^j`; multiplying by `omega` gives one row per
//! `(i, h)`:
//!
//! ```text
//! (C_i^h - I_i^0) * sum_m t_m lambda_m - lambda_i * h * M_i * T <= 0
//! ```
//!
//! **Cost row.** Fractional cycles charge set-up `p_i * T / omega` per item
//! per period, `H * T * sum_i p_i / omega` in total. Holding cost applies to
//! the leftover entering each period,
//! `L_i^h = I_i^0 - C_i^{h-1} + lambda_i * (h-1) * M_i * T / omega`, and
//! summing `h = 1..H` splits it into a constant part
//! `B_i = sum_h (I_i^0 - C_i^{h-1})` plus
//! `lambda_i * M_i * (T / omega) * H(H-1)/2` from `sum_h (h-1)`. The budget
//! `total <= tau`, multiplied by `omega`, becomes the single row
//!
//! ```text
//! sum_i k_i M_i T * H(H-1)/2 * lambda_i
//!   + (sum_i k_i B_i - tau) * sum_m t_m lambda_m  <=  -H * T * sum_i p_i
//! ```
//!
//! Both transformations are reversible for any wheel (every batch count is
//! at least 1, so `omega > 0`), which the soundness tests check by sampling:
//! a wheel satisfies the rows exactly when it satisfies the relaxed
//! nonlinear constraints.
//!
//! The solver itself is a bounded depth-first branch-and-bound over
//! `[1, lambda_max]^N` with an independent exhaustive-enumeration oracle for
//! verification. Optimal wheels should be re-simulated with the floor-based
//! simulator for reporting: relaxed-cost feasibility and simulated-cost
//! feasibility genuinely differ, and both numbers belong in any output.

use crate::model::{
    wheel_time, DemandSchedule, HorizonConfig, ItemParams, ModelError, ProductWheel,
};

/// Absolute slack applied when evaluating any constraint, linear or relaxed.
/// Coefficients are desk-scale products of exact integers and short decimals;
/// the slack only absorbs accumulation dust.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

/// Objective gap below which two wheels count as tied (ties go to the
/// lexicographically smaller wheel).
const OBJECTIVE_TIE_EPS: f64 = 1e-9;

/// Where a constraint row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowProvenance {
    /// Demand coverage for `item` (0-based) in `period` (1-based).
    Demand { item: usize, period: usize },
    /// The single horizon-total cost row.
    Cost,
}

/// One inequality `coefficients . lambda <= bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub coefficients: Vec<f64>,
    pub bound: f64,
    pub provenance: RowProvenance,
}

impl LinearRow {
    pub fn lhs(&self, batches: &[i64]) -> f64 {
        self.coefficients
            .iter()
            .zip(batches)
            .map(|(&a, &b)| a * b as f64)
            .sum()
    }

    pub fn satisfied(&self, batches: &[i64]) -> bool {
        self.lhs(batches) <= self.bound + FEASIBILITY_SLACK
    }
}

/// The relaxed no-skip problem in matrix form: minimize `objective . lambda`
/// subject to every row.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    /// Objective coefficients; these are the batch times.
    pub objective: Vec<f64>,
    pub rows: Vec<LinearRow>,
}

impl LinearSystem {
    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn objective_value(&self, batches: &[i64]) -> f64 {
        self.objective
            .iter()
            .zip(batches)
            .map(|(&t, &b)| t * b as f64)
            .sum()
    }

    pub fn all_satisfied(&self, batches: &[i64]) -> bool {
        self.rows.iter().all(|row| row.satisfied(batches))
    }
}

/// Optimal point of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalWheel {
    pub wheel: ProductWheel,
    /// Cycle time of the optimal wheel, `sum_i t_i * lambda_i`.
    pub objective: f64,
    /// True when some batch count sits on the search box boundary, a warning
    /// that `lambda_max` may be binding.
    pub at_lambda_max: bool,
}

/// Solver outcome over the box `[1, lambda_max]^N`.
#[derive(Debug, Clone, PartialEq)]
pub enum IlpSolution {
    Optimal(OptimalWheel),
    Infeasible,
}

impl IlpSolution {
    pub fn optimal(&self) -> Option<&OptimalWheel> {
        match self {
            IlpSolution::Optimal(opt) => Some(opt),
            IlpSolution::Infeasible => None,
        }
    }
}

/// Closed-form relaxed stock after production in `period` (1-based):
/// `I_i^0 - sum_{j<period} D_i^j + lambda_i * period * M_i * T / omega`.
pub fn relaxed_inventory(
    item_index: usize,
    period: usize,
    wheel: &ProductWheel,
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
) -> Result<f64, ModelError> {
    let omega = wheel_time(wheel, items)?;
    let item = &items[item_index];
    let demand_so_far = schedule.cumulative_demand(item_index, period - 1) as f64;
    let production = wheel.batches()[item_index] as f64
        * period as f64
        * item.batch_size as f64
        * config.period_length
        / omega;
    Ok(item.initial_inventory as f64 - demand_so_far + production)
}

/// Horizon-total cost of the relaxed no-skip model, evaluated by iterating
/// the relaxed recursion directly (production `lambda_i * M_i * T / omega`
/// per period, no floors).
pub fn relaxed_total_cost(
    wheel: &ProductWheel,
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
) -> Result<f64, ModelError> {
    let omega = wheel_time(wheel, items)?;
    schedule.matches(config)?;
    let cycles_per_period = config.period_length / omega;
    let mut total = 0.0;
    for (i, item) in items.iter().enumerate() {
        let rate = wheel.batches()[i] as f64 * item.batch_size as f64 * cycles_per_period;
        let mut inventory = item.initial_inventory as f64;
        let mut prev_demand = 0.0;
        for h in 1..=config.num_periods {
            let leftover = inventory - prev_demand;
            total += item.setup_cost * cycles_per_period;
            total += item.inventory_cost_rate * leftover;
            inventory = leftover + rate;
            prev_demand = schedule.demand(i, h) as f64;
        }
    }
    Ok(total)
}

/// Demand feasibility of the relaxed model, again by iterating the recursion.
pub fn relaxed_demand_satisfied(
    wheel: &ProductWheel,
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
) -> Result<bool, ModelError> {
    let omega = wheel_time(wheel, items)?;
    schedule.matches(config)?;
    let cycles_per_period = config.period_length / omega;
    for (i, item) in items.iter().enumerate() {
        let rate = wheel.batches()[i] as f64 * item.batch_size as f64 * cycles_per_period;
        let mut inventory = item.initial_inventory as f64;
        let mut prev_demand = 0.0;
        for h in 1..=config.num_periods {
            inventory = inventory - prev_demand + rate;
            let demand = schedule.demand(i, h) as f64;
            if inventory < demand - FEASIBILITY_SLACK {
                return Ok(false);
            }
            prev_demand = demand;
        }
    }
    Ok(true)
}

/// Full relaxed feasibility: demand coverage every period and relaxed total
/// cost within the tolerance.
pub fn relaxed_feasible(
    wheel: &ProductWheel,
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
) -> Result<bool, ModelError> {
    Ok(relaxed_demand_satisfied(wheel, schedule, items, config)?
        && relaxed_total_cost(wheel, schedule, items, config)?
            <= config.cost_tolerance + FEASIBILITY_SLACK)
}

/// Builds the linear rows of the relaxed no-skip problem: one demand row per
/// `(item, period)` and a single cost row, as derived in the module docs.
pub fn build_linear_system(
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
) -> Result<LinearSystem, ModelError> {
    schedule.matches(config)?;
    crate::model::validate_items(items)?;

    let n = items.len();
    let horizon = config.num_periods;
    let t_total = config.period_length;
    let times: Vec<f64> = items.iter().map(|item| item.batch_time).collect();

    let mut rows = Vec::with_capacity(n * horizon + 1);
    for (i, item) in items.iter().enumerate() {
        for h in 1..=horizon {
            let shortfall = schedule.cumulative_demand(i, h) as f64 - item.initial_inventory as f64;
            let mut coefficients: Vec<f64> = times.iter().map(|&t| shortfall * t).collect();
            coefficients[i] -= h as f64 * item.batch_size as f64 * t_total;
            rows.push(LinearRow {
                coefficients,
                bound: 0.0,
                provenance: RowProvenance::Demand { item: i, period: h },
            });
        }
    }

    // B_i collects the demand/initial-inventory constants of the summed
    // holding costs (period-0 demand is zero).
    let half_pairs = (horizon * (horizon - 1)) as f64 / 2.0;
    let weighted_constants: f64 = items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let b_i: f64 = (1..=horizon)
                .map(|h| {
                    item.initial_inventory as f64 - schedule.cumulative_demand(i, h - 1) as f64
                })
                .sum();
            item.inventory_cost_rate * b_i
        })
        .sum();
    let cost_coefficients: Vec<f64> = items
        .iter()
        .zip(&times)
        .map(|(item, &t)| {
            item.inventory_cost_rate * item.batch_size as f64 * t_total * half_pairs
                + (weighted_constants - config.cost_tolerance) * t
        })
        .collect();
    let setup_total: f64 = items.iter().map(|item| item.setup_cost).sum();
    rows.push(LinearRow {
        coefficients: cost_coefficients,
        bound: -(horizon as f64) * t_total * setup_total,
        provenance: RowProvenance::Cost,
    });

    Ok(LinearSystem {
        objective: times,
        rows,
    })
}

/// Depth-first branch-and-bound over `[1, lambda_max]^N`.
///
/// Coordinates are fixed in index order, values tried ascending, so feasible
/// points are visited lexicographically and the first optimum found is the
/// lexicographically smallest. Subtrees are pruned when the objective's best
/// possible completion cannot beat the incumbent, or when some row cannot be
/// satisfied by any completion.
pub fn solve(system: &LinearSystem, lambda_max: i64) -> IlpSolution {
    assert!(lambda_max >= 1, "lambda_max must be >= 1");
    let n = system.num_variables();

    // Best possible remaining contribution per row and for the objective,
    // indexed by depth: suffix sums over unassigned coordinates.
    let row_min_suffix: Vec<Vec<f64>> = system
        .rows
        .iter()
        .map(|row| {
            let mut suffix = vec![0.0; n + 1];
            for d in (0..n).rev() {
                // Coordinate d ranges over [1, lambda_max]; the sign of the
                // coefficient decides which end minimizes the term.
                let a = row.coefficients[d];
                suffix[d] = suffix[d + 1] + a.min(a * lambda_max as f64);
            }
            suffix
        })
        .collect();
    let mut objective_min_suffix = vec![0.0; n + 1];
    for d in (0..n).rev() {
        // Objective coefficients are batch times, strictly positive.
        objective_min_suffix[d] = objective_min_suffix[d + 1] + system.objective[d];
    }

    struct Search<'a> {
        system: &'a LinearSystem,
        lambda_max: i64,
        row_min_suffix: &'a [Vec<f64>],
        objective_min_suffix: &'a [f64],
        partial: Vec<i64>,
        partial_lhs: Vec<f64>,
        incumbent: Option<(Vec<i64>, f64)>,
    }

    impl Search<'_> {
        fn dfs(&mut self, depth: usize, partial_objective: f64) {
            // Row pruning: no completion can satisfy a row whose best case
            // already exceeds the bound.
            for (r, row) in self.system.rows.iter().enumerate() {
                if self.partial_lhs[r] + self.row_min_suffix[r][depth]
                    > row.bound + FEASIBILITY_SLACK
                {
                    return;
                }
            }
            if let Some((_, best)) = &self.incumbent {
                if partial_objective + self.objective_min_suffix[depth] >= best - OBJECTIVE_TIE_EPS
                {
                    return;
                }
            }
            if depth == self.system.num_variables() {
                // All rows already verified exactly (suffix contribution is
                // zero here), and the objective beats the incumbent.
                self.incumbent = Some((self.partial.clone(), partial_objective));
                return;
            }
            for value in 1..=self.lambda_max {
                self.partial.push(value);
                for (r, row) in self.system.rows.iter().enumerate() {
                    self.partial_lhs[r] += row.coefficients[depth] * value as f64;
                }
                self.dfs(
                    depth + 1,
                    partial_objective + self.system.objective[depth] * value as f64,
                );
                for (r, row) in self.system.rows.iter().enumerate() {
                    self.partial_lhs[r] -= row.coefficients[depth] * value as f64;
                }
                self.partial.pop();
            }
        }
    }

    let mut search = Search {
        system,
        lambda_max,
        row_min_suffix: &row_min_suffix,
        objective_min_suffix: &objective_min_suffix,
        partial: Vec::with_capacity(n),
        partial_lhs: vec![0.0; system.rows.len()],
        incumbent: None,
    };
    search.dfs(0, 0.0);

    match search.incumbent {
        Some((batches, objective)) => {
            let at_lambda_max = batches.contains(&lambda_max);
            IlpSolution::Optimal(OptimalWheel {
                wheel: ProductWheel::new(batches).expect("search values are >= 1"),
                objective,
                at_lambda_max,
            })
        }
        None => IlpSolution::Infeasible,
    }
}

/// Brute-force oracle: walks the whole box in lexicographic order and keeps
/// the first strict improvement. Shares no search machinery with [`solve`].
pub fn solve_by_enumeration(system: &LinearSystem, lambda_max: i64) -> IlpSolution {
    assert!(lambda_max >= 1, "lambda_max must be >= 1");
    let n = system.num_variables();
    let mut point = vec![1i64; n];
    let mut best: Option<(Vec<i64>, f64)> = None;
    loop {
        if system.all_satisfied(&point) {
            let objective = system.objective_value(&point);
            let improves = match &best {
                None => true,
                Some((_, incumbent)) => objective < incumbent - OBJECTIVE_TIE_EPS,
            };
            if improves {
                best = Some((point.clone(), objective));
            }
        }
        // Odometer increment in lexicographic order.
        let mut d = n;
        loop {
            if d == 0 {
                match best {
                    Some((batches, objective)) => {
                        let at_lambda_max = batches.contains(&lambda_max);
                        return IlpSolution::Optimal(OptimalWheel {
                            wheel: ProductWheel::new(batches).expect("values are >= 1"),
                            objective,
                            at_lambda_max,
                        });
                    }
                    None => return IlpSolution::Infeasible,
                }
            }
            d -= 1;
            if point[d] < lambda_max {
                point[d] += 1;
                for p in point.iter_mut().skip(d + 1) {
                    *p = 1;
                }
                break;
            }
        }
    }
}

/// Builds the linear system for an instance and solves it.
pub fn solve_instance(
    schedule: &DemandSchedule,
    items: &[ItemParams],
    config: &HorizonConfig,
    lambda_max: i64,
) -> Result<IlpSolution, ModelError> {
    let system = build_linear_system(schedule, items, config)?;
    Ok(solve(&system, lambda_max))
}
