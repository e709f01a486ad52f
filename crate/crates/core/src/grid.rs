//! Static network data, hourly scenarios, feature vectors, and strategies.
//!
//! All electrical quantities are in per-unit. A grid couples three record
//! lists (buses, lines, generators) with a planning horizon `T`; scenarios
//! carry the four exogenous injection arrays (wind and demand, active and
//! reactive, per bus and hour) from which learning features are extracted;
//! strategies are the binary commitment vectors `y ∈ {0,1}^{M·T}` with a
//! ±1 view used by the classifiers (`0 ↔ −1`, `1 ↔ +1`).
//!
//! Feature schemas are explicit and named so that the extraction used at
//! training time is stored with the model and cannot drift at prediction
//! time. File formats: grids are a single JSON object, sample sets are
//! JSON-lines with one `{x, y, schema}` object per sample; floats survive
//! save/load round trips bit-for-bit.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from grid/sample loading, validation, and feature extraction.
#[derive(Debug, Error)]
pub enum GridError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}{line}: {detail}")]
    Parse { path: String, line: String, detail: String },
    #[error("invariant violation in field `{field}`: {detail}")]
    Invariant { field: String, detail: String },
    #[error("feature schema `{schema}` references {what} out of range: {detail}")]
    SchemaRange { schema: String, what: String, detail: String },
    #[error("strategy value {value} outside alphabet {alphabet}")]
    Alphabet { value: f64, alphabet: &'static str },
    #[error("scenario arrays must be {buses}×{horizon}: {detail}")]
    ScenarioShape { buses: usize, horizon: usize, detail: String },
}

/// One bus: voltage-squared bounds, reference flag, self-admittance terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: usize,
    /// Lower voltage magnitude bound ν̲ (per-unit).
    pub v_min: f64,
    /// Upper voltage magnitude bound ν̄ (per-unit).
    pub v_max: f64,
    #[serde(default)]
    pub reference: bool,
    /// Real self-admittance G_ii of the bus (sum over incident branches).
    pub g_diag: f64,
    /// Imaginary self-admittance B_ii of the bus.
    pub b_diag: f64,
}

/// One transmission line with its π-model admittance entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    /// Off-diagonal real admittance G_ij (= −g for series conductance g).
    pub g: f64,
    /// Off-diagonal imaginary admittance B_ij.
    pub b: f64,
    /// Half shunt susceptance B^sh_ij of the π model at the from side.
    pub b_shunt: f64,
    /// Apparent-power capacity s̄ (per-unit MVA).
    pub s_max: f64,
}

/// One conventional unit and its commitment parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub bus: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    /// Hour-to-hour upward ramp limit r̄.
    pub ramp_up: f64,
    /// Hour-to-hour downward ramp limit r̲.
    pub ramp_down: f64,
    /// Start-up/shut-down ramp limit r̃.
    pub ramp_startstop: f64,
    /// Minimum number of on-hours after a start (v̄ ≥ 1).
    pub min_up: usize,
    /// Minimum number of off-hours after a stop (v̲ ≥ 1).
    pub min_down: usize,
    /// Production cost c^P per unit of active power.
    pub cost_production: f64,
    /// Start-up cost c^S per start.
    pub cost_startup: f64,
}

/// Static system data: N buses, L lines, M units, horizon T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    pub horizon: usize,
}

impl GridSpec {
    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn n_units(&self) -> usize {
        self.generators.len()
    }

    /// Checks every structural invariant, naming the offending field.
    pub fn validate(&self) -> Result<(), GridError> {
        let inv = |field: &str, detail: String| GridError::Invariant {
            field: field.to_string(),
            detail,
        };
        if self.horizon == 0 {
            return Err(inv("horizon", "must be at least 1".into()));
        }
        let refs = self.buses.iter().filter(|b| b.reference).count();
        if refs != 1 {
            return Err(inv("buses.reference", format!("expected exactly 1 reference bus, found {refs}")));
        }
        for (i, bus) in self.buses.iter().enumerate() {
            if !(bus.v_min > 0.0 && bus.v_min <= bus.v_max) {
                return Err(inv(
                    &format!("buses[{i}].v_min"),
                    format!("need 0 < v_min ≤ v_max, got [{}, {}]", bus.v_min, bus.v_max),
                ));
            }
        }
        for (l, line) in self.lines.iter().enumerate() {
            for (end, bus) in [("from", line.from), ("to", line.to)] {
                if bus >= self.buses.len() {
                    return Err(inv(
                        &format!("lines[{l}].{end}"),
                        format!("bus {bus} does not exist (N = {})", self.buses.len()),
                    ));
                }
            }
        }
        for (g, gen) in self.generators.iter().enumerate() {
            if gen.bus >= self.buses.len() {
                return Err(inv(
                    &format!("generators[{g}].bus"),
                    format!("bus {} does not exist", gen.bus),
                ));
            }
            if gen.p_min > gen.p_max {
                return Err(inv(
                    &format!("generators[{g}].p_min"),
                    format!("p_min {} exceeds p_max {}", gen.p_min, gen.p_max),
                ));
            }
            if gen.q_min > gen.q_max {
                return Err(inv(
                    &format!("generators[{g}].q_min"),
                    format!("q_min {} exceeds q_max {}", gen.q_min, gen.q_max),
                ));
            }
            if gen.min_up < 1 {
                return Err(inv(&format!("generators[{g}].min_up"), "must be ≥ 1".into()));
            }
            if gen.min_down < 1 {
                return Err(inv(&format!("generators[{g}].min_down"), "must be ≥ 1".into()));
            }
            if gen.cost_production < 0.0 || gen.cost_startup < 0.0 {
                return Err(inv(
                    &format!("generators[{g}].cost_production"),
                    "costs must be nonnegative".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Per-hour exogenous injections: wind and demand, active and reactive.
///
/// Arrays are indexed `[bus][hour]` and must all be N×T and nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInput {
    pub wind_active: Vec<Vec<f64>>,
    pub wind_reactive: Vec<Vec<f64>>,
    pub demand_active: Vec<Vec<f64>>,
    pub demand_reactive: Vec<Vec<f64>>,
}

impl ScenarioInput {
    /// Builds a scenario from active-power profiles, deriving the reactive
    /// parts from a fixed power factor (`q = p · tan(arccos(pf))`).
    pub fn from_active_with_power_factor(
        wind_active: Vec<Vec<f64>>,
        demand_active: Vec<Vec<f64>>,
        power_factor: f64,
    ) -> ScenarioInput {
        assert!(power_factor > 0.0 && power_factor <= 1.0, "power factor in (0, 1]");
        let tan_phi = power_factor.acos().tan();
        let derive = |p: &Vec<Vec<f64>>| {
            p.iter()
                .map(|row| row.iter().map(|&v| v * tan_phi).collect())
                .collect()
        };
        ScenarioInput {
            wind_reactive: derive(&wind_active),
            demand_reactive: derive(&demand_active),
            wind_active,
            demand_active,
        }
    }

    /// Verifies the N×T shape and nonnegativity against a grid.
    pub fn validate(&self, grid: &GridSpec) -> Result<(), GridError> {
        let n = grid.n_buses();
        let t = grid.horizon;
        for (name, arr) in [
            ("wind_active", &self.wind_active),
            ("wind_reactive", &self.wind_reactive),
            ("demand_active", &self.demand_active),
            ("demand_reactive", &self.demand_reactive),
        ] {
            if arr.len() != n || arr.iter().any(|row| row.len() != t) {
                return Err(GridError::ScenarioShape {
                    buses: n,
                    horizon: t,
                    detail: format!("array `{name}` has wrong shape"),
                });
            }
            if arr.iter().flatten().any(|&v| v < 0.0) {
                return Err(GridError::ScenarioShape {
                    buses: n,
                    horizon: t,
                    detail: format!("array `{name}` has negative entries"),
                });
            }
        }
        Ok(())
    }
}

/// Which scenario quantity a feature key refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    WindActive,
    WindReactive,
    DemandActive,
    DemandReactive,
}

/// One extracted scenario entry: (quantity, bus, hour).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureKey {
    pub quantity: Quantity,
    pub bus: usize,
    pub hour: usize,
}

/// Named description of which scenario entries become features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub name: String,
    pub extraction: Extraction,
}

/// Extraction rule of a schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Extraction {
    /// Every entry in hour-major order:
    /// `[p^W_1, q^W_1, p^D_1, q^D_1, p^W_2, …]`, each block one value per
    /// bus — 4·N·T features in total.
    Full,
    /// An explicit ordered list of entries.
    Select(Vec<FeatureKey>),
}

impl FeatureSchema {
    pub fn full() -> FeatureSchema {
        FeatureSchema { name: "full".into(), extraction: Extraction::Full }
    }

    /// Number of features the schema produces on an N-bus, T-hour system.
    pub fn width(&self, buses: usize, horizon: usize) -> usize {
        match &self.extraction {
            Extraction::Full => 4 * buses * horizon,
            Extraction::Select(keys) => keys.len(),
        }
    }
}

/// An extracted feature vector tagged with the schema that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub schema: String,
}

/// Extracts features from a scenario in deterministic schema order.
pub fn scenario_to_features(
    scenario: &ScenarioInput,
    schema: &FeatureSchema,
) -> Result<FeatureVector, GridError> {
    let n = scenario.wind_active.len();
    let t = scenario.wind_active.first().map_or(0, Vec::len);
    let of = |q: Quantity| -> &Vec<Vec<f64>> {
        match q {
            Quantity::WindActive => &scenario.wind_active,
            Quantity::WindReactive => &scenario.wind_reactive,
            Quantity::DemandActive => &scenario.demand_active,
            Quantity::DemandReactive => &scenario.demand_reactive,
        }
    };
    let mut values = Vec::new();
    match &schema.extraction {
        Extraction::Full => {
            for hour in 0..t {
                for q in [
                    Quantity::WindActive,
                    Quantity::WindReactive,
                    Quantity::DemandActive,
                    Quantity::DemandReactive,
                ] {
                    let arr = of(q);
                    for bus_row in arr.iter() {
                        values.push(bus_row[hour]);
                    }
                }
            }
        }
        Extraction::Select(keys) => {
            for key in keys {
                let arr = of(key.quantity);
                if key.bus >= n || key.hour >= t {
                    return Err(GridError::SchemaRange {
                        schema: schema.name.clone(),
                        what: "entry".into(),
                        detail: format!(
                            "(bus {}, hour {}) outside {n}×{t}",
                            key.bus, key.hour
                        ),
                    });
                }
                values.push(arr[key.bus][key.hour]);
            }
        }
    }
    Ok(FeatureVector { values, schema: schema.name.clone() })
}

/// Binary commitment vector over (unit, hour), stored in {0, 1}.
///
/// The layout is unit-major: entry `g · T + t` is unit `g` at hour `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Strategy {
    pub values: Vec<u8>,
}

impl Strategy {
    pub fn new(values: Vec<u8>) -> Result<Strategy, GridError> {
        for &v in &values {
            if v > 1 {
                return Err(GridError::Alphabet { value: v as f64, alphabet: "{0, 1}" });
            }
        }
        Ok(Strategy { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of unit `g` at hour `t` under horizon `horizon`.
    pub fn get(&self, g: usize, t: usize, horizon: usize) -> u8 {
        self.values[g * horizon + t]
    }

    /// The ±1 view used by the classifiers (0 ↔ −1, 1 ↔ +1).
    pub fn plus_minus(&self) -> Vec<f64> {
        self.values.iter().map(|&v| if v == 1 { 1.0 } else { -1.0 }).collect()
    }

    /// Rebuilds a strategy from a ±1 vector.
    pub fn from_plus_minus(values: &[f64]) -> Result<Strategy, GridError> {
        let mut out = Vec::with_capacity(values.len());
        for &v in values {
            if v == 1.0 {
                out.push(1);
            } else if v == -1.0 {
                out.push(0);
            } else {
                return Err(GridError::Alphabet { value: v, alphabet: "{−1, +1}" });
            }
        }
        Ok(Strategy { values: out })
    }
}

/// Target alphabet of [`strategy_encode`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyEncoding {
    ZeroOne,
    PlusMinus,
}

/// Encodes a strategy into the requested alphabet as floats.
pub fn strategy_encode(strategy: &Strategy, target: StrategyEncoding) -> Vec<f64> {
    match target {
        StrategyEncoding::ZeroOne => strategy.values.iter().map(|&v| v as f64).collect(),
        StrategyEncoding::PlusMinus => strategy.plus_minus(),
    }
}

/// Decodes a float vector in the given alphabet back into a strategy.
pub fn strategy_decode(values: &[f64], source: StrategyEncoding) -> Result<Strategy, GridError> {
    match source {
        StrategyEncoding::ZeroOne => {
            let mut out = Vec::with_capacity(values.len());
            for &v in values {
                if v == 0.0 {
                    out.push(0);
                } else if v == 1.0 {
                    out.push(1);
                } else {
                    return Err(GridError::Alphabet { value: v, alphabet: "{0, 1}" });
                }
            }
            Ok(Strategy { values: out })
        }
        StrategyEncoding::PlusMinus => Strategy::from_plus_minus(values),
    }
}

/// A labeled data set: feature vectors paired with strategies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleSet {
    pub samples: Vec<(FeatureVector, Strategy)>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Schema shared by every sample (None when empty).
    pub fn schema(&self) -> Option<&str> {
        self.samples.first().map(|(f, _)| f.schema.as_str())
    }

    /// Appends a sample, enforcing the shared-schema invariant.
    pub fn push(&mut self, features: FeatureVector, strategy: Strategy) -> Result<(), GridError> {
        if let Some(schema) = self.schema() {
            if features.schema != schema {
                return Err(GridError::Invariant {
                    field: "samples.schema".into(),
                    detail: format!("mixed schemas `{}` and `{}`", schema, features.schema),
                });
            }
        }
        self.samples.push((features, strategy));
        Ok(())
    }

    /// Multiset of distinct strategies with their occurrence counts.
    ///
    /// Counts always sum to `len()`.
    pub fn catalog(&self) -> BTreeMap<Strategy, usize> {
        let mut catalog = BTreeMap::new();
        for (_, strategy) in &self.samples {
            *catalog.entry(strategy.clone()).or_insert(0) += 1;
        }
        catalog
    }
}

#[derive(Serialize, Deserialize)]
struct SampleLine {
    x: Vec<f64>,
    y: Vec<u8>,
    schema: String,
}

/// Loads a grid from its JSON file and validates every invariant.
pub fn load_grid(path: impl AsRef<Path>) -> Result<GridSpec, GridError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| GridError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let grid: GridSpec = serde_json::from_str(&text).map_err(|e| GridError::Parse {
        path: path.display().to_string(),
        line: format!(" (line {}, column {})", e.line(), e.column()),
        detail: e.to_string(),
    })?;
    grid.validate()?;
    Ok(grid)
}

/// Saves a grid as pretty-printed JSON (full float precision).
pub fn save_grid(grid: &GridSpec, path: impl AsRef<Path>) -> Result<(), GridError> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(grid).expect("grid serialization cannot fail");
    std::fs::write(path, text).map_err(|source| GridError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a JSON-lines sample file, checking schema consistency.
pub fn load_samples(path: impl AsRef<Path>) -> Result<SampleSet, GridError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| GridError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = std::io::BufReader::new(file);
    let mut set = SampleSet::default();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| GridError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: SampleLine = serde_json::from_str(&line).map_err(|e| GridError::Parse {
            path: path.display().to_string(),
            line: format!(" (line {})", lineno + 1),
            detail: e.to_string(),
        })?;
        let strategy = Strategy::new(record.y)?;
        set.push(FeatureVector { values: record.x, schema: record.schema }, strategy)?;
    }
    Ok(set)
}

/// Saves a sample set as JSON-lines (full float precision).
pub fn save_samples(set: &SampleSet, path: impl AsRef<Path>) -> Result<(), GridError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| GridError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut writer = std::io::BufWriter::new(file);
    for (features, strategy) in &set.samples {
        let line = serde_json::to_string(&SampleLine {
            x: features.values.clone(),
            y: strategy.values.clone(),
            schema: features.schema.clone(),
        })
        .expect("sample serialization cannot fail");
        writeln!(writer, "{line}").map_err(|source| GridError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_grid() -> GridSpec {
        GridSpec {
            buses: vec![
                Bus { id: 0, v_min: 0.95, v_max: 1.05, reference: true, g_diag: 1.0, b_diag: -4.0 },
                Bus { id: 1, v_min: 0.95, v_max: 1.05, reference: false, g_diag: 1.0, b_diag: -4.0 },
            ],
            lines: vec![Line { from: 0, to: 1, g: -1.0, b: 4.0, b_shunt: 0.02, s_max: 2.0 }],
            generators: vec![Generator {
                bus: 0,
                p_min: 0.2,
                p_max: 1.5,
                q_min: -0.5,
                q_max: 0.8,
                ramp_up: 0.7,
                ramp_down: 0.7,
                ramp_startstop: 0.9,
                min_up: 1,
                min_down: 1,
                cost_production: 10.0,
                cost_startup: 5.0,
            }],
            horizon: 3,
        }
    }

    fn tiny_scenario(grid: &GridSpec) -> ScenarioInput {
        let n = grid.n_buses();
        let t = grid.horizon;
        let arr = |base: f64| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..t).map(|h| base + 0.01 * (i * t + h) as f64).collect())
                .collect()
        };
        ScenarioInput {
            wind_active: arr(0.1),
            wind_reactive: arr(0.03),
            demand_active: arr(0.5),
            demand_reactive: arr(0.15),
        }
    }

    #[test]
    fn validation_rejects_inverted_power_bounds() {
        let mut grid = tiny_grid();
        grid.generators[0].p_min = 2.0;
        let err = grid.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("p_min"), "error should name the field: {msg}");
    }

    #[test]
    fn validation_requires_exactly_one_reference_bus() {
        let mut grid = tiny_grid();
        grid.buses[1].reference = true;
        assert!(grid.validate().is_err());
        grid.buses[0].reference = false;
        grid.buses[1].reference = false;
        assert!(grid.validate().is_err());
    }

    #[test]
    fn grid_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.json");
        let grid = tiny_grid();
        save_grid(&grid, &path).unwrap();
        let back = load_grid(&path).unwrap();
        assert_eq!(grid, back);
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.json");
        std::fs::write(&path, "").unwrap();
        match load_grid(&path) {
            Err(GridError::Parse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn full_schema_width_is_4nt() {
        // 6 buses, 24 hours → 576 features.
        assert_eq!(FeatureSchema::full().width(6, 24), 576);
        let grid = tiny_grid();
        let features = scenario_to_features(&tiny_scenario(&grid), &FeatureSchema::full()).unwrap();
        assert_eq!(features.values.len(), 4 * 2 * 3);
    }

    #[test]
    fn full_schema_is_hour_major_with_quantity_blocks() {
        let grid = tiny_grid();
        let scenario = tiny_scenario(&grid);
        let features = scenario_to_features(&scenario, &FeatureSchema::full()).unwrap();
        // First block: wind_active at hour 0 for buses 0 and 1.
        assert_eq!(features.values[0], scenario.wind_active[0][0]);
        assert_eq!(features.values[1], scenario.wind_active[1][0]);
        // Second block: wind_reactive at hour 0.
        assert_eq!(features.values[2], scenario.wind_reactive[0][0]);
    }

    #[test]
    fn select_schema_extracts_in_order_and_checks_range() {
        let grid = tiny_grid();
        let scenario = tiny_scenario(&grid);
        let schema = FeatureSchema {
            name: "two-wind".into(),
            extraction: Extraction::Select(vec![
                FeatureKey { quantity: Quantity::WindActive, bus: 1, hour: 2 },
                FeatureKey { quantity: Quantity::DemandActive, bus: 0, hour: 0 },
            ]),
        };
        let features = scenario_to_features(&scenario, &schema).unwrap();
        assert_eq!(features.values, vec![scenario.wind_active[1][2], scenario.demand_active[0][0]]);

        let bad = FeatureSchema {
            name: "oops".into(),
            extraction: Extraction::Select(vec![FeatureKey {
                quantity: Quantity::WindActive,
                bus: 9,
                hour: 0,
            }]),
        };
        assert!(scenario_to_features(&scenario, &bad).is_err());
    }

    #[test]
    fn strategy_encodings_round_trip() {
        let s = Strategy::new(vec![1, 0, 1]).unwrap();
        assert_eq!(strategy_encode(&s, StrategyEncoding::PlusMinus), vec![1.0, -1.0, 1.0]);
        assert_eq!(
            strategy_decode(&[1.0, -1.0], StrategyEncoding::PlusMinus).unwrap().values,
            vec![1, 0]
        );
        let back = strategy_decode(
            &strategy_encode(&s, StrategyEncoding::ZeroOne),
            StrategyEncoding::ZeroOne,
        )
        .unwrap();
        assert_eq!(back, s);
        assert!(strategy_decode(&[0.5], StrategyEncoding::ZeroOne).is_err());
    }

    #[test]
    fn sample_round_trip_and_catalog_counts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.jsonl");
        let mut set = SampleSet::default();
        let fv = |vals: Vec<f64>| FeatureVector { values: vals, schema: "full".into() };
        set.push(fv(vec![0.125, -1.0 / 3.0]), Strategy::new(vec![1, 0]).unwrap()).unwrap();
        set.push(fv(vec![0.25, 0.7]), Strategy::new(vec![1, 0]).unwrap()).unwrap();
        set.push(fv(vec![0.5, 0.2]), Strategy::new(vec![0, 0]).unwrap()).unwrap();
        save_samples(&set, &path).unwrap();
        let back = load_samples(&path).unwrap();
        assert_eq!(set, back, "sample round trip must be exact");

        let catalog = back.catalog();
        assert_eq!(catalog.len(), 2);
        let total: usize = catalog.values().sum();
        assert_eq!(total, back.len());
        assert_eq!(catalog[&Strategy::new(vec![1, 0]).unwrap()], 2);
    }

    #[test]
    fn mixed_schemas_are_rejected() {
        let mut set = SampleSet::default();
        set.push(
            FeatureVector { values: vec![1.0], schema: "a".into() },
            Strategy::new(vec![0]).unwrap(),
        )
        .unwrap();
        let err = set.push(
            FeatureVector { values: vec![1.0], schema: "b".into() },
            Strategy::new(vec![0]).unwrap(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn power_factor_derivation_uses_tan_acos() {
        let scenario = ScenarioInput::from_active_with_power_factor(
            vec![vec![1.0]],
            vec![vec![2.0]],
            0.95,
        );
        let tan_phi = 0.95f64.acos().tan();
        assert!((scenario.wind_reactive[0][0] - tan_phi).abs() < 1e-15);
        assert!((scenario.demand_reactive[0][0] - 2.0 * tan_phi).abs() < 1e-15);
    }
}
