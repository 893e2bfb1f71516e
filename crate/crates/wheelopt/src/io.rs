//! File formats: TOML instance and sweep-spec documents, demand CSV, and the
//! sweep result CSV.
//!
//! All formats are plain text so fixtures diff cleanly. Periods are 1-based
//! everywhere on disk, floating-point fields are written with six decimal
//! places, and unknown keys are rejected when parsing.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::experiments::{Method, SaSweepParams, SweepAxis, SweepRow, SweepSpec};
use crate::model::{DemandSchedule, HorizonConfig, ItemParams, ModelError, ProductWheel};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {location}: {message}")]
    Parse { location: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl FormatError {
    fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        FormatError::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

/// Six-decimal fixed formatting used for every floating-point field written
/// to disk or printed in reports. Adding 0.0 folds negative zero (the empty
/// float sum) into plain zero.
pub fn format_f64(value: f64) -> String {
    format!("{:.6}", value + 0.0)
}

// ---------------------------------------------------------------------------
// Instance files
// ---------------------------------------------------------------------------

/// A parsed instance: horizon, items, and optionally a demand schedule
/// (inline or from a CSV next to the instance file).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub items: Vec<ItemParams>,
    pub config: HorizonConfig,
    pub demand: Option<DemandSchedule>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    horizon: HorizonDoc,
    items: Vec<ItemDoc>,
    demand: Option<DemandDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HorizonDoc {
    num_periods: usize,
    period_length: f64,
    cost_tolerance: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemDoc {
    batch_time: f64,
    batch_size: i64,
    setup_cost: f64,
    inventory_cost_rate: f64,
    initial_inventory: i64,
    trigger_point: i64,
    demand_mean: f64,
    demand_std: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DemandDoc {
    /// Path to a demand CSV, resolved relative to the instance file.
    csv: Option<PathBuf>,
    /// Inline matrix: one row per item, one column per period.
    inline: Option<Vec<Vec<i64>>>,
}

/// Parses an instance document. `base_dir` anchors any relative demand CSV
/// path; `location` labels errors.
pub fn parse_instance_str(
    text: &str,
    base_dir: &Path,
    location: &str,
) -> Result<Instance, FormatError> {
    let doc: InstanceDoc =
        toml::from_str(text).map_err(|e| FormatError::parse(location, e.to_string()))?;

    let items: Vec<ItemParams> = doc
        .items
        .iter()
        .map(|d| ItemParams {
            batch_time: d.batch_time,
            batch_size: d.batch_size,
            setup_cost: d.setup_cost,
            inventory_cost_rate: d.inventory_cost_rate,
            initial_inventory: d.initial_inventory,
            trigger_point: d.trigger_point,
            demand_mean: d.demand_mean,
            demand_std: d.demand_std,
        })
        .collect();
    crate::model::validate_items(&items)?;

    let config = HorizonConfig::new(
        items.len(),
        doc.horizon.num_periods,
        doc.horizon.period_length,
        doc.horizon.cost_tolerance,
    )?;

    let demand = match doc.demand {
        None => None,
        Some(DemandDoc {
            csv: Some(_),
            inline: Some(_),
        }) => {
            return Err(FormatError::parse(
                location,
                "demand section must give either csv or inline, not both",
            ));
        }
        Some(DemandDoc {
            csv: None,
            inline: None,
        }) => {
            return Err(FormatError::parse(
                location,
                "demand section must give csv or inline",
            ));
        }
        Some(DemandDoc {
            csv: Some(path),
            inline: None,
        }) => {
            let resolved = if path.is_absolute() {
                path
            } else {
                base_dir.join(path)
            };
            Some(read_demand_csv(&resolved)?)
        }
        Some(DemandDoc {
            csv: None,
            inline: Some(rows),
        }) => Some(DemandSchedule::from_item_rows(rows)?),
    };

    if let Some(schedule) = &demand {
        schedule.matches(&config)?;
    }

    Ok(Instance {
        items,
        config,
        demand,
    })
}

pub fn read_instance(path: &Path) -> Result<Instance, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    parse_instance_str(&text, base_dir, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// Demand CSV
// ---------------------------------------------------------------------------

/// Renders a schedule as `item,period,demand` rows, items outer, periods
/// inner, both 1-based.
pub fn demand_csv_string(schedule: &DemandSchedule) -> String {
    let mut out = String::from("item,period,demand\n");
    for item in 0..schedule.num_items() {
        for period in 1..=schedule.num_periods() {
            out.push_str(&format!(
                "{},{},{}\n",
                item + 1,
                period,
                schedule.demand(item, period)
            ));
        }
    }
    out
}

pub fn write_demand_csv(path: &Path, schedule: &DemandSchedule) -> Result<(), FormatError> {
    fs::write(path, demand_csv_string(schedule)).map_err(|source| FormatError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a demand CSV. Dimensions are inferred from the largest indices;
/// every (item, period) cell must appear exactly once.
pub fn parse_demand_csv(text: &str, location: &str) -> Result<DemandSchedule, FormatError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "item,period,demand" => {}
        Some((_, header)) => {
            return Err(FormatError::parse(
                location,
                format!("expected header 'item,period,demand', got '{header}'"),
            ));
        }
        None => return Err(FormatError::parse(location, "empty demand file")),
    }

    let mut triples: Vec<(usize, usize, i64)> = Vec::new();
    for (line_no, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(FormatError::parse(
                location,
                format!(
                    "line {}: expected 3 fields, got {}",
                    line_no + 1,
                    fields.len()
                ),
            ));
        }
        let parse_field = |name: &str, value: &str| -> Result<i64, FormatError> {
            value.trim().parse::<i64>().map_err(|_| {
                FormatError::parse(
                    location,
                    format!("line {}: invalid {name} '{value}'", line_no + 1),
                )
            })
        };
        let item = parse_field("item", fields[0])?;
        let period = parse_field("period", fields[1])?;
        let demand = parse_field("demand", fields[2])?;
        if item < 1 || period < 1 {
            return Err(FormatError::parse(
                location,
                format!("line {}: item and period are 1-based", line_no + 1),
            ));
        }
        triples.push((item as usize, period as usize, demand));
    }
    if triples.is_empty() {
        return Err(FormatError::parse(location, "no demand rows"));
    }

    let num_items = triples.iter().map(|t| t.0).max().unwrap();
    let num_periods = triples.iter().map(|t| t.1).max().unwrap();
    let mut grid: Vec<Vec<Option<i64>>> = vec![vec![None; num_periods]; num_items];
    for (item, period, demand) in triples {
        let cell = &mut grid[item - 1][period - 1];
        if cell.is_some() {
            return Err(FormatError::parse(
                location,
                format!("duplicate entry for item {item}, period {period}"),
            ));
        }
        *cell = Some(demand);
    }
    let mut rows = Vec::with_capacity(num_items);
    for (i, row) in grid.into_iter().enumerate() {
        let mut values = Vec::with_capacity(num_periods);
        for (h, cell) in row.into_iter().enumerate() {
            match cell {
                Some(v) => values.push(v),
                None => {
                    return Err(FormatError::parse(
                        location,
                        format!("missing entry for item {}, period {}", i + 1, h + 1),
                    ));
                }
            }
        }
        rows.push(values);
    }
    Ok(DemandSchedule::from_item_rows(rows)?)
}

pub fn read_demand_csv(path: &Path) -> Result<DemandSchedule, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_demand_csv(&text, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// Sweep spec files
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepDoc {
    sweep: SweepSection,
    sa: Option<SaSection>,
    ilp: Option<IlpSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    axis: String,
    /// Instance file path, resolved relative to the spec file.
    instance: PathBuf,
    values: Option<Vec<f64>>,
    num_schedules: Option<usize>,
    schedule_seeds: Option<Vec<u64>>,
    methods: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SaSection {
    iterations: Option<usize>,
    restarts: Option<usize>,
    step: Option<i64>,
    cooling_fraction: Option<f64>,
    max_proposal_attempts: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IlpSection {
    lambda_max: Option<i64>,
}

pub fn parse_sweep_spec_str(
    text: &str,
    base_dir: &Path,
    location: &str,
) -> Result<SweepSpec, FormatError> {
    let doc: SweepDoc =
        toml::from_str(text).map_err(|e| FormatError::parse(location, e.to_string()))?;

    let axis = SweepAxis::parse(&doc.sweep.axis).ok_or_else(|| {
        FormatError::parse(
            location,
            format!(
                "unknown axis '{}': expected cost_tolerance, setup_multiplier, or inventory_multiplier",
                doc.sweep.axis
            ),
        )
    })?;

    let instance_path = if doc.sweep.instance.is_absolute() {
        doc.sweep.instance.clone()
    } else {
        base_dir.join(&doc.sweep.instance)
    };
    let instance = read_instance(&instance_path)?;

    let values = doc.sweep.values.unwrap_or_else(|| axis.default_values());
    let num_schedules = doc.sweep.num_schedules.unwrap_or(5);
    let schedule_seeds = doc
        .sweep
        .schedule_seeds
        .unwrap_or_else(|| (1..=num_schedules as u64).collect());
    if schedule_seeds.len() != num_schedules {
        return Err(FormatError::parse(
            location,
            format!(
                "schedule_seeds has {} entries but num_schedules is {num_schedules}",
                schedule_seeds.len()
            ),
        ));
    }
    let methods = match doc.sweep.methods {
        None => vec![Method::Ilp, Method::Sa],
        Some(names) => {
            let mut methods = Vec::with_capacity(names.len());
            for name in &names {
                methods.push(Method::parse(name).ok_or_else(|| {
                    FormatError::parse(
                        location,
                        format!("unknown method '{name}': expected ilp or sa"),
                    )
                })?);
            }
            methods
        }
    };

    let defaults = SaSweepParams::default();
    let sa = match doc.sa {
        None => defaults,
        Some(section) => SaSweepParams {
            iterations: section.iterations.unwrap_or(defaults.iterations),
            restarts: section.restarts.unwrap_or(defaults.restarts),
            step: section.step.unwrap_or(defaults.step),
            cooling_fraction: section
                .cooling_fraction
                .unwrap_or(defaults.cooling_fraction),
            max_proposal_attempts: section
                .max_proposal_attempts
                .unwrap_or(defaults.max_proposal_attempts),
            seed: section.seed.unwrap_or(defaults.seed),
        },
    };
    let lambda_max = doc.ilp.and_then(|s| s.lambda_max).unwrap_or(100);

    let spec = SweepSpec {
        axis,
        values,
        schedule_seeds,
        items: instance.items,
        config: instance.config,
        methods,
        sa,
        lambda_max,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn read_sweep_spec(path: &Path) -> Result<SweepSpec, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    parse_sweep_spec_str(&text, base_dir, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// Sweep result CSV
// ---------------------------------------------------------------------------

pub const SWEEP_CSV_HEADER: &str = "axis,axis_value,schedule_id,method,feasible,rms_wheel_time,simulated_total_cost,relaxed_cost,wheel,wallclock_ms";

/// Serializes a wheel as semicolon-joined batch counts.
pub fn wheel_to_string(wheel: &ProductWheel) -> String {
    wheel
        .batches()
        .iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Parses `--wheel` style comma-separated batch counts.
pub fn parse_wheel(text: &str) -> Result<ProductWheel, FormatError> {
    let batches: Result<Vec<i64>, _> = text
        .split(',')
        .map(|part| part.trim().parse::<i64>())
        .collect();
    let batches = batches.map_err(|_| {
        FormatError::parse(
            "wheel",
            format!("expected comma-separated integers, got '{text}'"),
        )
    })?;
    Ok(ProductWheel::new(batches)?)
}

fn optional_f64(value: Option<f64>) -> String {
    value.map(format_f64).unwrap_or_default()
}

/// Renders sweep rows in the canonical CSV layout. Absent metrics on
/// infeasible rows are left empty.
pub fn sweep_csv_string(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.axis.label(),
            format_f64(row.axis_value),
            row.schedule_id,
            row.method.label(),
            row.feasible,
            optional_f64(row.rms_wheel_time),
            optional_f64(row.simulated_total_cost),
            optional_f64(row.relaxed_cost),
            row.wheel.as_ref().map(wheel_to_string).unwrap_or_default(),
            row.wallclock_ms,
        ));
    }
    out
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), FormatError> {
    fs::write(path, sweep_csv_string(rows)).map_err(|source| FormatError::Write {
        path: path.to_path_buf(),
        source,
    })
}
