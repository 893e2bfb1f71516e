//! Shared fixtures for the integration suites: the three-item benchmark
//! instance (synthetic-data parameters) and its TOML form.
#![allow(dead_code)] // each test target uses a subset

use wheelopt::model::{HorizonConfig, ItemParams};

pub fn benchmark_items() -> Vec<ItemParams> {
    vec![
        ItemParams {
            batch_time: 1.0,
            batch_size: 10,
            setup_cost: 100.0,
            inventory_cost_rate: 0.1,
            initial_inventory: 0,
            trigger_point: 100,
            demand_mean: 900.0,
            demand_std: 100.0,
        },
        ItemParams {
            batch_time: 1.0,
            batch_size: 15,
            setup_cost: 100.0,
            inventory_cost_rate: 0.15,
            initial_inventory: 0,
            trigger_point: 100,
            demand_mean: 700.0,
            demand_std: 140.0,
        },
        ItemParams {
            batch_time: 2.0,
            batch_size: 15,
            setup_cost: 100.0,
            inventory_cost_rate: 0.1,
            initial_inventory: 0,
            trigger_point: 100,
            demand_mean: 1000.0,
            demand_std: 200.0,
        },
    ]
}

pub fn benchmark_config() -> HorizonConfig {
    HorizonConfig::new(3, 24, 400.0, 40_000.0).unwrap()
}

pub const BENCHMARK_TOML: &str = r#"[horizon]
num_periods = 24
period_length = 400.0
cost_tolerance = 40000.0

[[items]]
batch_time = 1.0
batch_size = 10
setup_cost = 100.0
inventory_cost_rate = 0.1
initial_inventory = 0
trigger_point = 100
demand_mean = 900.0
demand_std = 100.0

[[items]]
batch_time = 1.0
batch_size = 15
setup_cost = 100.0
inventory_cost_rate = 0.15
initial_inventory = 0
trigger_point = 100
demand_mean = 700.0
demand_std = 140.0

[[items]]
batch_time = 2.0
batch_size = 15
setup_cost = 100.0
inventory_cost_rate = 0.1
initial_inventory = 0
trigger_point = 100
demand_mean = 1000.0
demand_std = 200.0
"#;
