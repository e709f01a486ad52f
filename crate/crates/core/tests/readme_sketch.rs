//! Compile-and-run check of the README "Library sketch" snippet.

use ucwarm_core::bnb::{solve_mip, BnbSettings};
use ucwarm_core::grid::{load_grid, ScenarioInput};
use ucwarm_core::uc::{build_uc, extract_strategy, UcOptions};

#[test]
fn readme_sketch_compiles_and_runs() -> Result<(), Box<dyn std::error::Error>> {
    let grid =
        load_grid(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/two_bus.json"))?;
    let scenario: ScenarioInput = serde_json::from_str(
        r#"{
          "wind_active":     [[0.0, 0.0, 0.0],  [0.0, 0.0, 0.0]],
          "wind_reactive":   [[0.0, 0.0, 0.0],  [0.0, 0.0, 0.0]],
          "demand_active":   [[0.3, 0.5, 0.4],  [0.2, 0.3, 0.25]],
          "demand_reactive": [[0.1, 0.16, 0.13],[0.07, 0.1, 0.08]]
        }"#,
    )?;
    let model = build_uc(&grid, &scenario, &UcOptions::default())?;
    let result = solve_mip(&model.mip, &BnbSettings::default(), None)?;
    let incumbent = result.incumbent.expect("solved to optimality");
    let strategy = extract_strategy(&incumbent.solution, &model.map)?;
    for g in 0..grid.generators.len() {
        let on: Vec<u8> =
            (0..grid.horizon).map(|t| strategy.get(g, t, grid.horizon)).collect();
        println!("unit {g}: {on:?}");
    }
    Ok(())
}
