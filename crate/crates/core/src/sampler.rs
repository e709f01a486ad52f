//! Offline training-data generation with a missing-mass stopping rule.
//!
//! Scenarios are drawn from a configurable distribution around base
//! profiles (per-farm uniform wind levels in `[0, capacity]`, optional
//! per-bus Gaussian load scaling truncated to ±20%), solved to optimality
//! with the built-in branch-and-bound, and the optimal strategies are
//! collected into a labeled sample set. Sampling stops once the
//! Good–Turing-style novelty bound
//!
//! ```text
//!   P(new strategy) ≤ H₁/H + (2√2 + √3) · sqrt(ln(3/ε) / H)
//! ```
//!
//! (clamped to `[0, 1]`) drops to the target guarantee `δ`, where `H` is
//! the number of samples and `H₁` the number of strategies observed
//! exactly once. The singleton count is maintained exactly through a
//! multiset of observed strategies: membership is tested before
//! insertion and `H₁` is decremented when a singleton is re-observed.
//! Failed solves are skipped (with a diagnostic) and do not advance `H`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bnb::{solve_mip, BnbSettings, BnbStatus};
use crate::grid::{
    scenario_to_features, FeatureSchema, GridError, GridSpec, SampleSet, ScenarioInput, Strategy,
};
use crate::uc::{build_uc, check_min_updown, extract_strategy, UcError, UcOptions};

/// Errors from configuration validation and bound evaluation.
#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid sampler config `{field}`: {detail}")]
    InvalidConfig { field: String, detail: String },
    #[error("novelty bound domain violation: {0}")]
    Domain(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Uc(#[from] UcError),
}

/// How a sampling run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingStatus {
    /// The novelty bound reached the target guarantee δ.
    Completed,
    /// The hard sample cap was hit before the bound met δ.
    CapReached,
}

/// Scenario distribution and stopping parameters.
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    /// Target guarantee δ ∈ (0, 1]: stop once the bound is ≤ δ.
    pub delta: f64,
    /// Confidence parameter ε ∈ (0, 1) inside the bound.
    pub epsilon: f64,
    /// Base profiles; wind rows are the farm capacities times the daily
    /// shape, so a uniform level in [0, 1] sweeps [0, capacity].
    pub base: ScenarioInput,
    /// Draw a fresh uniform daily level per wind farm.
    pub scale_wind: bool,
    /// Std-dev of the per-bus load factor around 1, truncated to ±20%.
    /// Zero disables load scaling.
    pub load_sigma: f64,
    pub seed: u64,
    /// Hard cap on accepted samples (≥ 1).
    pub cap: usize,
    /// Feature extraction applied to each accepted scenario.
    pub schema: FeatureSchema,
    pub bnb: BnbSettings,
    pub uc: UcOptions,
}

impl SamplerConfig {
    /// Default sampling setup around the given base profiles.
    pub fn new(base: ScenarioInput) -> Self {
        SamplerConfig {
            delta: 0.4,
            epsilon: 0.1,
            base,
            scale_wind: true,
            load_sigma: 0.2 / 3.0,
            seed: 0,
            cap: 1000,
            schema: FeatureSchema::full(),
            bnb: BnbSettings::default(),
            uc: UcOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        let bad = |field: &str, detail: String| SamplerError::InvalidConfig {
            field: field.into(),
            detail,
        };
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(bad("delta", format!("must be in (0, 1], got {}", self.delta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(bad("epsilon", format!("must be in (0, 1), got {}", self.epsilon)));
        }
        if self.cap < 1 {
            return Err(bad("cap", "must be at least 1".into()));
        }
        if !(self.load_sigma >= 0.0 && self.load_sigma.is_finite()) {
            return Err(bad("load_sigma", format!("must be finite and ≥ 0, got {}", self.load_sigma)));
        }
        Ok(())
    }
}

/// Exact bookkeeping for the Good–Turing singleton count.
#[derive(Debug, Clone, Default)]
pub struct NoveltyState {
    h: usize,
    counts: std::collections::BTreeMap<Strategy, usize>,
    h1: usize,
}

impl NoveltyState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Samples observed so far.
    pub fn h(&self) -> usize {
        self.h
    }

    /// Strategies observed exactly once.
    pub fn h1(&self) -> usize {
        self.h1
    }

    /// Distinct strategies observed.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Occurrence counts per strategy.
    pub fn counts(&self) -> &std::collections::BTreeMap<Strategy, usize> {
        &self.counts
    }

    /// Records one observation, maintaining `H₁` exactly: a first
    /// observation creates a singleton, a second observation retires one.
    pub fn insert(&mut self, strategy: Strategy) {
        let count = self.counts.entry(strategy).or_insert(0);
        *count += 1;
        match *count {
            1 => self.h1 += 1,
            2 => self.h1 -= 1,
            _ => {}
        }
        self.h += 1;
    }
}

/// The Theorem-1 coefficient `2√2 + √3` ≈ 4.5605.
pub fn novelty_tau() -> f64 {
    2.0 * std::f64::consts::SQRT_2 + 3.0_f64.sqrt()
}

/// Upper bound on the probability that a fresh scenario produces a
/// strategy not seen in `h` samples: `H₁/H + τ·sqrt(ln(3/ε)/H)`,
/// clamped to `[0, 1]`.
pub fn novelty_bound(h: usize, h1: usize, epsilon: f64) -> Result<f64, SamplerError> {
    if h < 1 {
        return Err(SamplerError::Domain("H must be at least 1".into()));
    }
    if h1 > h {
        return Err(SamplerError::Domain(format!("H₁ = {h1} exceeds H = {h}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SamplerError::Domain(format!("ε must be in (0, 1), got {epsilon}")));
    }
    let term = novelty_tau() * ((3.0 / epsilon).ln() / h as f64).sqrt();
    Ok((h1 as f64 / h as f64 + term).clamp(0.0, 1.0))
}

/// Applies explicit per-bus scaling levels to the base profiles: wind
/// rows are multiplied by `wind_level[i]`, demand rows by
/// `load_factor[i]` (reactive parts scale with their active parts, so
/// power factors are preserved).
pub fn apply_scaling(
    base: &ScenarioInput,
    wind_level: &[f64],
    load_factor: &[f64],
) -> ScenarioInput {
    let scale = |arr: &[Vec<f64>], by: &[f64]| -> Vec<Vec<f64>> {
        arr.iter()
            .zip(by)
            .map(|(row, &s)| row.iter().map(|v| v * s).collect())
            .collect()
    };
    ScenarioInput {
        wind_active: scale(&base.wind_active, wind_level),
        wind_reactive: scale(&base.wind_reactive, wind_level),
        demand_active: scale(&base.demand_active, load_factor),
        demand_reactive: scale(&base.demand_reactive, load_factor),
    }
}

fn truncated_load_factor(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    use rand_distr::{Distribution, Normal};
    let normal = Normal::new(1.0, sigma).expect("sigma validated nonnegative");
    for _ in 0..1000 {
        let draw = normal.sample(rng);
        if (draw - 1.0).abs() <= 0.2 {
            return draw;
        }
    }
    1.0
}

/// Draws one scenario: every wind farm gets an independent uniform daily
/// level (the shape is shared), every load bus an optional truncated
/// Gaussian factor. Deterministic given the rng state.
pub fn draw_scenario(rng: &mut ChaCha8Rng, config: &SamplerConfig) -> ScenarioInput {
    let n = config.base.wind_active.len();
    let mut wind_level = vec![1.0; n];
    if config.scale_wind {
        for (i, level) in wind_level.iter_mut().enumerate() {
            let is_farm = config.base.wind_active[i].iter().any(|&v| v > 0.0);
            if is_farm {
                *level = rng.random::<f64>();
            }
        }
    }
    let mut load_factor = vec![1.0; n];
    if config.load_sigma > 0.0 {
        for (i, factor) in load_factor.iter_mut().enumerate() {
            let has_load = config.base.demand_active[i].iter().any(|&v| v > 0.0);
            if has_load {
                *factor = truncated_load_factor(rng, config.load_sigma);
            }
        }
    }
    apply_scaling(&config.base, &wind_level, &load_factor)
}

/// Result of a sampling run: the labeled set, the final novelty state,
/// how the run ended, and diagnostics for any skipped solves.
#[derive(Debug)]
pub struct SamplingRun {
    pub samples: SampleSet,
    pub novelty: NoveltyState,
    pub status: SamplingStatus,
    /// Bound value after the last accepted sample.
    pub final_bound: f64,
    pub skipped: usize,
    pub diagnostics: Vec<String>,
}

/// Runs Algorithm-1-style sampling: draw → solve → record, stopping when
/// the novelty bound reaches δ or the cap is hit. Failed solves are
/// skipped with a diagnostic and do not advance `H`. Deterministic for a
/// fixed seed and config.
pub fn run_sampling(grid: &GridSpec, config: &SamplerConfig) -> Result<SamplingRun, SamplerError> {
    config.validate()?;
    config.base.validate(grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut samples = SampleSet::default();
    let mut novelty = NoveltyState::new();
    let mut diagnostics = Vec::new();
    let mut skipped = 0usize;

    let (status, final_bound) = loop {
        let scenario = draw_scenario(&mut rng, config);
        let model = build_uc(grid, &scenario, &config.uc)?;
        let result = match solve_mip(&model.mip, &config.bnb, None) {
            Ok(r) => r,
            Err(e) => {
                skipped += 1;
                diagnostics.push(format!("sample skipped: solver error: {e}"));
                continue;
            }
        };
        if result.status != BnbStatus::Optimal {
            skipped += 1;
            diagnostics.push(format!(
                "sample skipped: solve ended with status {:?} (gap {})",
                result.status, result.relative_gap
            ));
            continue;
        }
        let incumbent = result.incumbent.expect("optimal result carries an incumbent");
        let strategy = match extract_strategy(&incumbent.solution, &model.map) {
            Ok(s) => s,
            Err(e) => {
                skipped += 1;
                diagnostics.push(format!("sample skipped: {e}"));
                continue;
            }
        };
        let violations = check_min_updown(&strategy, grid);
        if !violations.is_empty() {
            skipped += 1;
            diagnostics.push(format!(
                "sample skipped: strategy violates up/down rules at {} points",
                violations.len()
            ));
            continue;
        }
        let features = scenario_to_features(&scenario, &config.schema)?;
        samples.push(features, strategy.clone())?;
        novelty.insert(strategy);

        let bound = novelty_bound(novelty.h(), novelty.h1(), config.epsilon)?;
        if bound <= config.delta {
            break (SamplingStatus::Completed, bound);
        }
        if novelty.h() >= config.cap {
            break (SamplingStatus::CapReached, bound);
        }
    };

    Ok(SamplingRun { samples, novelty, status, final_bound, skipped, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Bus, Generator};

    fn toy_grid(horizon: usize) -> GridSpec {
        GridSpec {
            buses: vec![Bus {
                id: 0,
                v_min: 0.95,
                v_max: 1.05,
                reference: true,
                g_diag: 0.0,
                b_diag: 0.0,
            }],
            lines: vec![],
            generators: vec![Generator {
                bus: 0,
                p_min: 0.2,
                p_max: 1.5,
                q_min: -0.5,
                q_max: 0.8,
                ramp_up: 0.7,
                ramp_down: 0.7,
                ramp_startstop: 1.0,
                min_up: 1,
                min_down: 1,
                cost_production: 10.0,
                cost_startup: 5.0,
            }],
            horizon,
        }
    }

    fn toy_base(horizon: usize) -> ScenarioInput {
        ScenarioInput {
            wind_active: vec![vec![0.0; horizon]],
            wind_reactive: vec![vec![0.0; horizon]],
            demand_active: vec![vec![0.8; horizon]],
            demand_reactive: vec![vec![0.1; horizon]],
        }
    }

    #[test]
    fn novelty_bound_matches_hand_computed_values() {
        // τ = 2√2 + √3 ≈ 4.560478; ln(3/0.1) = ln 30 ≈ 3.401197.
        // H = 5000: second term = 4.560478·sqrt(3.401197/5000) ≈ 0.118943.
        let bound = novelty_bound(5000, 0, 0.1).unwrap();
        assert!((bound - 0.118943).abs() < 1e-3, "got {bound}");
        // H = 50: the term alone is ≈ 1.1894, so the bound clamps to 1.
        let bound = novelty_bound(50, 0, 0.1).unwrap();
        assert_eq!(bound, 1.0);
        // H = 500, H₁ = 12: 0.024 + 0.376 ≈ 0.400.
        let bound = novelty_bound(500, 12, 0.1).unwrap();
        assert!((bound - 0.400).abs() < 1e-3, "got {bound}");
    }

    #[test]
    fn novelty_bound_rejects_domain_violations() {
        assert!(novelty_bound(0, 0, 0.1).is_err());
        assert!(novelty_bound(10, 11, 0.1).is_err());
        assert!(novelty_bound(10, 0, 0.0).is_err());
        assert!(novelty_bound(10, 0, 1.0).is_err());
    }

    #[test]
    fn novelty_bound_is_monotone_in_h_and_h1() {
        // Strictly decreasing in H at a fixed H₁/H ratio (below the clamp).
        let mut prev = f64::INFINITY;
        for k in 1..=6 {
            let h = 600 * k;
            let h1 = 60 * k;
            let bound = novelty_bound(h, h1, 0.3).unwrap();
            assert!(bound < prev, "bound must fall as H grows: {bound} vs {prev}");
            prev = bound;
        }
        // Strictly increasing in H₁ at fixed H.
        let mut prev = 0.0;
        for h1 in [0, 50, 100, 200] {
            let bound = novelty_bound(5000, h1, 0.3).unwrap();
            assert!(bound > prev || prev == 0.0);
            prev = bound;
        }
    }

    #[test]
    fn singleton_count_matches_a_naive_recount() {
        // Pseudo-random insertion sequence over a small strategy alphabet.
        let mut state = NoveltyState::new();
        let mut x = 42u64;
        for step in 0..500 {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let sym = ((x >> 33) % 7) as u8;
            let strategy = Strategy::new(vec![sym & 1, (sym >> 1) & 1, (sym >> 2) & 1]).unwrap();
            state.insert(strategy);

            let naive_h1 = state.counts().values().filter(|&&c| c == 1).count();
            assert_eq!(state.h1(), naive_h1, "H₁ drifted at step {step}");
            let total: usize = state.counts().values().sum();
            assert_eq!(total, state.h());
            assert!(state.h1() <= state.distinct() && state.distinct() <= state.h());
        }
    }

    #[test]
    fn scaling_levels_act_per_bus() {
        let base = ScenarioInput {
            wind_active: vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            wind_reactive: vec![vec![0.1, 0.2], vec![0.3, 0.4]],
            demand_active: vec![vec![5.0, 6.0], vec![7.0, 8.0]],
            demand_reactive: vec![vec![0.5, 0.6], vec![0.7, 0.8]],
        };
        // Unit levels reproduce the base exactly.
        let same = apply_scaling(&base, &[1.0, 1.0], &[1.0, 1.0]);
        assert_eq!(same, base);
        // Zero wind level wipes the wind, demands unchanged.
        let calm = apply_scaling(&base, &[0.0, 0.0], &[1.0, 1.0]);
        assert!(calm.wind_active.iter().flatten().all(|&v| v == 0.0));
        assert!(calm.wind_reactive.iter().flatten().all(|&v| v == 0.0));
        assert_eq!(calm.demand_active, base.demand_active);
        // Per-bus: only bus 1 scaled.
        let half = apply_scaling(&base, &[1.0, 0.5], &[1.0, 2.0]);
        assert_eq!(half.wind_active[0], base.wind_active[0]);
        assert_eq!(half.wind_active[1], vec![1.5, 2.0]);
        assert_eq!(half.demand_active[1], vec![14.0, 16.0]);
    }

    #[test]
    fn scenario_draws_are_deterministic_per_seed() {
        let mut config = SamplerConfig::new(ScenarioInput {
            wind_active: vec![vec![0.5; 3], vec![0.0; 3]],
            wind_reactive: vec![vec![0.05; 3], vec![0.0; 3]],
            demand_active: vec![vec![1.0; 3], vec![0.9; 3]],
            demand_reactive: vec![vec![0.3; 3], vec![0.25; 3]],
        });
        config.seed = 7;
        let mut rng1 = ChaCha8Rng::seed_from_u64(config.seed);
        let a1 = draw_scenario(&mut rng1, &config);
        let a2 = draw_scenario(&mut rng1, &config);
        assert_ne!(a1, a2, "consecutive draws must differ");
        let mut rng2 = ChaCha8Rng::seed_from_u64(config.seed);
        let b1 = draw_scenario(&mut rng2, &config);
        let b2 = draw_scenario(&mut rng2, &config);
        assert_eq!(a1, b1, "same seed must replay the same sequence");
        assert_eq!(a2, b2);
        // Scaling disabled: the draw is exactly the base.
        config.scale_wind = false;
        config.load_sigma = 0.0;
        let mut rng3 = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(draw_scenario(&mut rng3, &config), config.base);
    }

    #[test]
    fn delta_one_stops_after_the_first_sample() {
        let grid = toy_grid(2);
        let mut config = SamplerConfig::new(toy_base(2));
        config.delta = 1.0;
        config.seed = 3;
        let run = run_sampling(&grid, &config).unwrap();
        assert_eq!(run.status, SamplingStatus::Completed);
        // The clamped bound is ≤ 1 immediately, so H = 1.
        assert_eq!(run.novelty.h(), 1);
        assert_eq!(run.samples.len(), 1);
    }

    #[test]
    fn degenerate_grid_retires_the_singleton_and_hits_the_cap() {
        // Demand stays far above p̲ under ±20% jitter, so the optimal
        // strategy is always "on everywhere": one catalog entry.
        let grid = toy_grid(2);
        let mut config = SamplerConfig::new(toy_base(2));
        config.delta = 1e-6; // unreachable
        config.cap = 5;
        config.seed = 11;
        let run = run_sampling(&grid, &config).unwrap();
        assert_eq!(run.status, SamplingStatus::CapReached);
        assert_eq!(run.novelty.h(), 5);
        assert_eq!(run.novelty.distinct(), 1);
        assert_eq!(run.novelty.h1(), 0, "singleton retired after the second sample");
        assert_eq!(run.skipped, 0);
        // Every stored strategy respects the up/down rules.
        for (_, strategy) in &run.samples.samples {
            assert!(check_min_updown(strategy, &grid).is_empty());
        }
        // Bound equals the term alone once H₁ = 0.
        let expected = novelty_bound(5, 0, config.epsilon).unwrap();
        assert_eq!(run.final_bound, expected);
    }

    #[test]
    fn sampling_runs_are_reproducible() {
        let grid = toy_grid(2);
        let mut config = SamplerConfig::new(toy_base(2));
        config.delta = 1e-6;
        config.cap = 4;
        config.seed = 99;
        let run1 = run_sampling(&grid, &config).unwrap();
        let run2 = run_sampling(&grid, &config).unwrap();
        assert_eq!(run1.samples, run2.samples, "same seed/config must replay bitwise");
        assert_eq!(run1.final_bound, run2.final_bound);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let base = toy_base(1);
        let mut c = SamplerConfig::new(base.clone());
        c.delta = 0.0;
        assert!(c.validate().is_err());
        let mut c = SamplerConfig::new(base.clone());
        c.epsilon = 1.0;
        assert!(c.validate().is_err());
        let mut c = SamplerConfig::new(base);
        c.cap = 0;
        assert!(c.validate().is_err());
    }
}
