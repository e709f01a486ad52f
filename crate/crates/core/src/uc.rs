//! Relaxed MISOCP unit-commitment model builder.
//!
//! From a [`GridSpec`] and a [`ScenarioInput`] this module assembles the
//! mixed-integer second-order cone relaxation of the AC unit-commitment
//! problem. The lifted variables are `ν_it` (squared voltage magnitude)
//! and, per line `(i,j)` and hour, `e_ijt = ν_i ν_j cos(θ_i−θ_j)` and
//! `f_ijt = −ν_i ν_j sin(θ_i−θ_j)`; the defining quadratic equality is
//! relaxed to the rotated cone `e² + f² ≤ ν_i ν_j`, written here as the
//! standard second-order cone `‖(2e, 2f, ν_i−ν_j)‖ ≤ ν_i + ν_j`.
//!
//! Modeling conventions (the paper-silent corners, fixed once here):
//! * all units start the horizon off with zero output (`u_{g,0} = 0`,
//!   `p_{g,0} = 0`) and min-up/down windows are clipped at the horizon;
//! * only the squared voltage bounds `ν̲² ≤ ν ≤ ν̄²` are emitted, since
//!   `ν` is the squared magnitude after the substitution;
//! * angle-recovery constraints are dropped, so no angle variables exist;
//! * one `(e, f)` pair per undirected line: the reverse direction uses
//!   `e_ji = e_ij`, `f_ji = −f_ij` and the symmetry `G_ji = G_ij`,
//!   `B_ji = B_ij` directly in row assembly;
//! * the apparent-flow capacity is a norm bound on the two from-side flow
//!   expressions; the flow magnitude `s_lt` is materialized as a variable
//!   only when [`UcOptions::expose_flows`] is set;
//! * optional corrective slacks (load shedding and wind curtailment, both
//!   active and reactive) make every commitment pattern that respects the
//!   min-up/down and transition logic feasible, at a penalty defaulting
//!   to ten times the largest production cost.
//!
//! Everything is big-M free: capacity rows couple dispatch to `u`
//! directly, so no artificial constants enter the relaxation.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::bnb::MixedIntegerConicProgram;
use crate::conic::{ConicSolution, ProgramBuilder};
use crate::grid::{GridError, GridSpec, ScenarioInput, Strategy};

/// Largest tolerated distance of a committed binary from {0, 1} when a
/// strategy is read back out of a solution.
pub const DEFAULT_INTEGRALITY_TOL: f64 = 1e-5;

/// Errors raised while building the model or reading solutions back.
#[derive(Debug, Error)]
pub enum UcError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("binary variable {index} is non-integral: value {value}")]
    NonIntegralBinary { index: usize, value: f64 },
}

/// Build options for the unit-commitment model.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UcOptions {
    /// Add load-shedding / wind-curtailment slacks to the balance rows.
    pub elastic_slacks: bool,
    /// Penalty per unit of slack; `None` picks 10 × max production cost.
    pub slack_penalty: Option<f64>,
    /// Materialize the apparent-flow magnitude `s_lt` as a variable.
    pub expose_flows: bool,
}

impl Default for UcOptions {
    fn default() -> Self {
        UcOptions { elastic_slacks: false, slack_penalty: None, expose_flows: false }
    }
}

/// Index ranges of every variable family in the emitted program.
///
/// The ranges are disjoint, contiguous, and tile `0..total()` exactly in
/// the order `u, v, p, q, ν, e, f, [s], [elastic], row slacks, cones`.
/// Time-expanded families use the layout `unit·T + hour` (`bus·T + hour`,
/// `line·T + hour`).
#[derive(Debug, Clone)]
pub struct UcVariableMap {
    pub units: usize,
    pub buses: usize,
    pub lines: usize,
    pub horizon: usize,
    /// Commitment binaries `u_gt`.
    pub u: Range<usize>,
    /// Start-up binaries `v_gt`.
    pub v: Range<usize>,
    /// Active generation `p_gt`.
    pub p: Range<usize>,
    /// Reactive generation `q_gt`.
    pub q: Range<usize>,
    /// Squared voltage magnitudes `ν_it`.
    pub nu: Range<usize>,
    /// Lifted cosine products `e_lt` (one per undirected line).
    pub e: Range<usize>,
    /// Lifted sine products `f_lt`.
    pub f: Range<usize>,
    /// Apparent-flow magnitudes `s_lt` (present iff flows are exposed).
    pub s: Option<Range<usize>>,
    /// Corrective slacks, four N×T blocks in the order
    /// (shed p, curtail p, shed q, curtail q), each laid out `bus·T + hour`.
    pub elastic: Option<Range<usize>>,
    /// Slack variables appended by the scalar inequality rows.
    pub row_slacks: Range<usize>,
    /// Coordinates of the second-order cone blocks.
    pub cone_vars: Range<usize>,
    /// Production costs `c^P_g`, copied so costs can be split later.
    pub cost_production: Vec<f64>,
    /// Start-up costs `c^S_g`.
    pub cost_startup: Vec<f64>,
}

impl UcVariableMap {
    pub fn idx_u(&self, g: usize, t: usize) -> usize {
        self.u.start + g * self.horizon + t
    }

    pub fn idx_v(&self, g: usize, t: usize) -> usize {
        self.v.start + g * self.horizon + t
    }

    pub fn idx_p(&self, g: usize, t: usize) -> usize {
        self.p.start + g * self.horizon + t
    }

    pub fn idx_q(&self, g: usize, t: usize) -> usize {
        self.q.start + g * self.horizon + t
    }

    pub fn idx_nu(&self, i: usize, t: usize) -> usize {
        self.nu.start + i * self.horizon + t
    }

    pub fn idx_e(&self, l: usize, t: usize) -> usize {
        self.e.start + l * self.horizon + t
    }

    pub fn idx_f(&self, l: usize, t: usize) -> usize {
        self.f.start + l * self.horizon + t
    }

    /// Total variable count covered by the map.
    pub fn total(&self) -> usize {
        self.cone_vars.end
    }

    /// Verifies that the named ranges tile `0..total()` without gaps.
    pub fn is_contiguous(&self) -> bool {
        let mut cursor = 0usize;
        let mut advance = |r: &Range<usize>| {
            let ok = r.start == cursor;
            cursor = r.end;
            ok
        };
        advance(&self.u)
            && advance(&self.v)
            && advance(&self.p)
            && advance(&self.q)
            && advance(&self.nu)
            && advance(&self.e)
            && advance(&self.f)
            && self.s.iter().all(|r| advance(r))
            && self.elastic.iter().all(|r| advance(r))
            && advance(&self.row_slacks)
            && advance(&self.cone_vars)
    }
}

/// Constraint counts per family, for human-readable model summaries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelSummary {
    pub min_up_rows: usize,
    pub min_down_rows: usize,
    pub transition_rows: usize,
    pub capacity_rows: usize,
    pub ramp_rows: usize,
    pub binary_bound_rows: usize,
    pub voltage_bound_rows: usize,
    pub flow_bound_rows: usize,
    pub flow_cap_rows: usize,
    pub balance_rows: usize,
    pub line_capacity_cones: usize,
    pub voltage_product_cones: usize,
    pub binaries: usize,
    pub variables: usize,
    pub rows: usize,
}

impl fmt::Display for ModelSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "unit-commitment model: {} variables, {} rows, {} binaries", self.variables, self.rows, self.binaries)?;
        writeln!(f, "  min-up rows            {}", self.min_up_rows)?;
        writeln!(f, "  min-down rows          {}", self.min_down_rows)?;
        writeln!(f, "  transition rows        {}", self.transition_rows)?;
        writeln!(f, "  capacity rows          {}", self.capacity_rows)?;
        writeln!(f, "  ramp rows              {}", self.ramp_rows)?;
        writeln!(f, "  binary bound rows      {}", self.binary_bound_rows)?;
        writeln!(f, "  voltage bound rows     {}", self.voltage_bound_rows)?;
        writeln!(f, "  flow bound rows        {}", self.flow_bound_rows)?;
        writeln!(f, "  flow capacity rows     {}", self.flow_cap_rows)?;
        writeln!(f, "  balance rows           {}", self.balance_rows)?;
        writeln!(f, "  line capacity cones    {}", self.line_capacity_cones)?;
        write!(f, "  voltage product cones  {}", self.voltage_product_cones)
    }
}

/// The assembled model: program with binaries, index map, and summary.
#[derive(Debug, Clone)]
pub struct UcModel {
    pub mip: MixedIntegerConicProgram,
    pub map: UcVariableMap,
    pub summary: ModelSummary,
}

/// Builds the relaxed MISOCP unit-commitment problem.
pub fn build_uc(
    grid: &GridSpec,
    scenario: &ScenarioInput,
    opts: &UcOptions,
) -> Result<UcModel, UcError> {
    grid.validate()?;
    scenario.validate(grid)?;
    let m = grid.n_units();
    let n = grid.n_buses();
    let l = grid.n_lines();
    let t_len = grid.horizon;

    let max_cost = grid
        .generators
        .iter()
        .map(|g| g.cost_production)
        .fold(0.0_f64, f64::max);
    let penalty = opts.slack_penalty.unwrap_or(10.0 * max_cost);
    if opts.elastic_slacks {
        if !penalty.is_finite() || penalty <= max_cost {
            return Err(UcError::InvalidOptions(format!(
                "slack penalty {penalty} must be finite and exceed the max production cost {max_cost}"
            )));
        }
    }

    let mut pb = ProgramBuilder::new();
    let u = pb.nonneg_vars(m * t_len);
    let v = pb.nonneg_vars(m * t_len);
    let p = pb.free_vars(m * t_len);
    let q = pb.free_vars(m * t_len);
    let nu = pb.free_vars(n * t_len);
    let e = pb.free_vars(l * t_len);
    let f = pb.free_vars(l * t_len);
    let s = opts.expose_flows.then(|| pb.free_vars(l * t_len));
    let elastic = opts.elastic_slacks.then(|| pb.nonneg_vars(4 * n * t_len));

    let iu = |g: usize, t: usize| u.start + g * t_len + t;
    let iv = |g: usize, t: usize| v.start + g * t_len + t;
    let ip = |g: usize, t: usize| p.start + g * t_len + t;
    let iq = |g: usize, t: usize| q.start + g * t_len + t;
    let inu = |i: usize, t: usize| nu.start + i * t_len + t;
    let ie = |li: usize, t: usize| e.start + li * t_len + t;
    let if_ = |li: usize, t: usize| f.start + li * t_len + t;

    for (g, gen) in grid.generators.iter().enumerate() {
        for t in 0..t_len {
            pb.set_cost(ip(g, t), gen.cost_production);
            pb.set_cost(iv(g, t), gen.cost_startup);
            pb.set_name(iu(g, t), format!("u[{g},{t}]"));
            pb.set_name(iv(g, t), format!("v[{g},{t}]"));
        }
    }
    if let Some(el) = &elastic {
        for j in el.clone() {
            pb.set_cost(j, penalty);
        }
    }

    let mut summary = ModelSummary { binaries: 2 * m * t_len, ..ModelSummary::default() };
    let slack_start = pb.var_count();

    // Commitment logic: min-up, min-down, transition (hours are
    // 0-indexed; u and p before the horizon are zero, windows clipped).
    for (g, gen) in grid.generators.iter().enumerate() {
        for t in 0..t_len {
            let window_up = (t + gen.min_up).min(t_len);
            for tau in t..window_up {
                let mut row = vec![(iu(g, t), 1.0), (iu(g, tau), -1.0)];
                if t > 0 {
                    row.push((iu(g, t - 1), -1.0));
                }
                pb.leq_row(&row, 0.0);
                summary.min_up_rows += 1;
            }
            let window_dn = (t + gen.min_down).min(t_len);
            for tau in t..window_dn {
                let mut row = vec![(iu(g, t), -1.0), (iu(g, tau), 1.0)];
                if t > 0 {
                    row.push((iu(g, t - 1), 1.0));
                }
                pb.leq_row(&row, 1.0);
                summary.min_down_rows += 1;
            }
            let mut row = vec![(iu(g, t), 1.0), (iv(g, t), -1.0)];
            if t > 0 {
                row.push((iu(g, t - 1), -1.0));
            }
            pb.leq_row(&row, 0.0);
            summary.transition_rows += 1;
        }
    }

    // Capacity: u·p̲ ≤ p ≤ p̄·u and the reactive analogue.
    for (g, gen) in grid.generators.iter().enumerate() {
        for t in 0..t_len {
            pb.geq_row(&[(ip(g, t), 1.0), (iu(g, t), -gen.p_min)], 0.0);
            pb.leq_row(&[(ip(g, t), 1.0), (iu(g, t), -gen.p_max)], 0.0);
            pb.geq_row(&[(iq(g, t), 1.0), (iu(g, t), -gen.q_min)], 0.0);
            pb.leq_row(&[(iq(g, t), 1.0), (iu(g, t), -gen.q_max)], 0.0);
            summary.capacity_rows += 4;
        }
    }

    // Ramping: p_t − p_{t−1} ≤ r̄·u_{t−1} + r̃·(1 − u_{t−1}) and the
    // downward mirror, rearranged so the constant r̃ lands on the rhs.
    for (g, gen) in grid.generators.iter().enumerate() {
        for t in 0..t_len {
            let mut up = vec![(ip(g, t), 1.0)];
            if t > 0 {
                up.push((ip(g, t - 1), -1.0));
                up.push((iu(g, t - 1), gen.ramp_startstop - gen.ramp_up));
            }
            pb.leq_row(&up, gen.ramp_startstop);
            let mut dn = vec![(ip(g, t), -1.0), (iu(g, t), gen.ramp_startstop - gen.ramp_down)];
            if t > 0 {
                dn.push((ip(g, t - 1), 1.0));
            }
            pb.leq_row(&dn, gen.ramp_startstop);
            summary.ramp_rows += 2;
        }
    }

    // Binary box: u, v ≤ 1 (nonnegativity is the cone membership).
    for g in 0..m {
        for t in 0..t_len {
            pb.leq_row(&[(iu(g, t), 1.0)], 1.0);
            pb.leq_row(&[(iv(g, t), 1.0)], 1.0);
            summary.binary_bound_rows += 2;
        }
    }

    // Squared voltage bounds ν̲² ≤ ν ≤ ν̄².
    for (i, bus) in grid.buses.iter().enumerate() {
        for t in 0..t_len {
            pb.geq_row(&[(inu(i, t), 1.0)], bus.v_min * bus.v_min);
            pb.leq_row(&[(inu(i, t), 1.0)], bus.v_max * bus.v_max);
            summary.voltage_bound_rows += 2;
        }
    }

    // Lifted-product bounds −ν̄_i ν̄_j ≤ e, f ≤ ν̄_i ν̄_j.
    for (li, line) in grid.lines.iter().enumerate() {
        let bound = grid.buses[line.from].v_max * grid.buses[line.to].v_max;
        for t in 0..t_len {
            pb.leq_row(&[(ie(li, t), 1.0)], bound);
            pb.geq_row(&[(ie(li, t), 1.0)], -bound);
            pb.leq_row(&[(if_(li, t), 1.0)], bound);
            pb.geq_row(&[(if_(li, t), 1.0)], -bound);
            summary.flow_bound_rows += 4;
        }
    }

    // Flow capacity rows s ≤ s̄ when the magnitude is materialized.
    if let Some(s) = &s {
        for (li, line) in grid.lines.iter().enumerate() {
            for t in 0..t_len {
                pb.leq_row(&[(s.start + li * t_len + t, 1.0)], line.s_max);
                summary.flow_cap_rows += 1;
            }
        }
    }

    // Nodal balance. The reverse direction of a line reuses the same
    // lifted pair with e_ji = e_ij, f_ji = −f_ij (and symmetric G, B).
    let units_at: Vec<Vec<usize>> = {
        let mut at = vec![Vec::new(); n];
        for (g, gen) in grid.generators.iter().enumerate() {
            at[gen.bus].push(g);
        }
        at
    };
    let lines_at: Vec<Vec<(usize, bool)>> = {
        let mut at = vec![Vec::new(); n];
        for (li, line) in grid.lines.iter().enumerate() {
            at[line.from].push((li, true));
            at[line.to].push((li, false));
        }
        at
    };
    let el_idx = |block: usize, i: usize, t: usize| {
        elastic.as_ref().map(|r| r.start + block * n * t_len + i * t_len + t)
    };
    for (i, bus) in grid.buses.iter().enumerate() {
        for t in 0..t_len {
            // Active:  Σ p + shed_p − curt_p − G_ii ν − Σ (G e − B f) = p^D − p^W.
            let mut row: Vec<(usize, f64)> =
                units_at[i].iter().map(|&g| (ip(g, t), 1.0)).collect();
            if elastic.is_some() {
                row.push((el_idx(0, i, t).unwrap(), 1.0));
                row.push((el_idx(1, i, t).unwrap(), -1.0));
            }
            row.push((inu(i, t), -bus.g_diag));
            for &(li, forward) in &lines_at[i] {
                let line = &grid.lines[li];
                let fsign = if forward { 1.0 } else { -1.0 };
                row.push((ie(li, t), -line.g));
                row.push((if_(li, t), fsign * line.b));
            }
            pb.eq_row(&row, scenario.demand_active[i][t] - scenario.wind_active[i][t]);

            // Reactive: Σ q + shed_q − curt_q + B_ii ν + Σ (B e + G f) = q^D − q^W.
            let mut row: Vec<(usize, f64)> =
                units_at[i].iter().map(|&g| (iq(g, t), 1.0)).collect();
            if elastic.is_some() {
                row.push((el_idx(2, i, t).unwrap(), 1.0));
                row.push((el_idx(3, i, t).unwrap(), -1.0));
            }
            row.push((inu(i, t), bus.b_diag));
            for &(li, forward) in &lines_at[i] {
                let line = &grid.lines[li];
                let fsign = if forward { 1.0 } else { -1.0 };
                row.push((ie(li, t), line.b));
                row.push((if_(li, t), fsign * line.g));
            }
            pb.eq_row(&row, scenario.demand_reactive[i][t] - scenario.wind_reactive[i][t]);
            summary.balance_rows += 2;
        }
    }

    let cone_start = pb.var_count();

    // From-side apparent-flow capacity as a second-order cone:
    // ‖(−G ν_i + G e − B f, (B − B^sh) ν_i − B e − G f)‖ ≤ s̄ (or ≤ s_lt).
    for (li, line) in grid.lines.iter().enumerate() {
        let a = line.from;
        for t in 0..t_len {
            let flow_p = vec![(inu(a, t), -line.g), (ie(li, t), line.g), (if_(li, t), -line.b)];
            let flow_q = vec![
                (inu(a, t), line.b - line.b_shunt),
                (ie(li, t), -line.b),
                (if_(li, t), -line.g),
            ];
            let head = match &s {
                Some(s) => (vec![(s.start + li * t_len + t, 1.0)], 0.0),
                None => (vec![], line.s_max),
            };
            pb.soc_of_expressions(&[head, (flow_p, 0.0), (flow_q, 0.0)]);
            summary.line_capacity_cones += 1;
        }
    }

    // Lifted-product relaxation e² + f² ≤ ν_i ν_j as
    // ‖(2e, 2f, ν_i − ν_j)‖ ≤ ν_i + ν_j.
    for (li, line) in grid.lines.iter().enumerate() {
        let (a, b) = (line.from, line.to);
        for t in 0..t_len {
            pb.soc_of_expressions(&[
                (vec![(inu(a, t), 1.0), (inu(b, t), 1.0)], 0.0),
                (vec![(ie(li, t), 2.0)], 0.0),
                (vec![(if_(li, t), 2.0)], 0.0),
                (vec![(inu(a, t), 1.0), (inu(b, t), -1.0)], 0.0),
            ]);
            summary.voltage_product_cones += 1;
        }
    }

    let cone_end = pb.var_count();
    summary.variables = pb.var_count();
    summary.rows = pb.row_count();

    let program = pb.build().map_err(|e| UcError::InvalidOptions(e.to_string()))?;
    let binaries: Vec<usize> = (u.start..v.end).collect();
    let mip = MixedIntegerConicProgram::new(program, binaries)
        .expect("binary indices are in range by construction");

    let map = UcVariableMap {
        units: m,
        buses: n,
        lines: l,
        horizon: t_len,
        u,
        v,
        p,
        q,
        nu,
        e,
        f,
        s,
        elastic,
        row_slacks: slack_start..cone_start,
        cone_vars: cone_start..cone_end,
        cost_production: grid.generators.iter().map(|g| g.cost_production).collect(),
        cost_startup: grid.generators.iter().map(|g| g.cost_startup).collect(),
    };
    debug_assert!(map.is_contiguous());
    debug_assert_eq!(map.total(), mip.base.var_count());
    Ok(UcModel { mip, map, summary })
}

/// Reads the commitment block out of a solution, rounding to {0, 1}.
///
/// Fails if any `u_gt` sits further than [`DEFAULT_INTEGRALITY_TOL`] from
/// an integer.
pub fn extract_strategy(
    solution: &ConicSolution,
    map: &UcVariableMap,
) -> Result<Strategy, UcError> {
    let mut values = Vec::with_capacity(map.u.len());
    for idx in map.u.clone() {
        let val = solution.primal[idx];
        let rounded = if val >= 0.5 { 1u8 } else { 0u8 };
        if (val - rounded as f64).abs() > DEFAULT_INTEGRALITY_TOL {
            return Err(UcError::NonIntegralBinary { index: idx, value: val });
        }
        values.push(rounded);
    }
    Ok(Strategy { values })
}

/// Production + start-up cost of a solution (the model objective minus
/// any corrective-slack penalty).
pub fn system_cost(solution: &ConicSolution, map: &UcVariableMap) -> f64 {
    let mut cost = 0.0;
    for g in 0..map.units {
        for t in 0..map.horizon {
            cost += map.cost_production[g] * solution.primal[map.idx_p(g, t)];
            cost += map.cost_startup[g] * solution.primal[map.idx_v(g, t)];
        }
    }
    cost
}

/// Where and how a commitment pattern breaks the up/down-time logic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpdownViolation {
    pub unit: usize,
    /// 0-indexed hour of the offending start (min-up) or stop (min-down).
    pub hour: usize,
    pub kind: UpdownKind,
}

/// Which rule the violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdownKind {
    MinUp,
    MinDown,
}

/// Checks a strategy against the min-up/min-down rules.
///
/// Boundary convention: units are off before the horizon (a leading 1 is
/// a start at hour 0) and windows are clipped at the horizon end. One
/// violation is reported per offending start or stop event.
pub fn check_min_updown(strategy: &Strategy, grid: &GridSpec) -> Vec<UpdownViolation> {
    let m = grid.n_units();
    let t_len = grid.horizon;
    assert_eq!(strategy.len(), m * t_len, "strategy length must be units × horizon");
    let mut violations = Vec::new();
    for (g, gen) in grid.generators.iter().enumerate() {
        let at = |t: usize| strategy.values[g * t_len + t];
        for t in 0..t_len {
            let prev = if t == 0 { 0 } else { at(t - 1) };
            if at(t) == 1 && prev == 0 {
                let window = (t + gen.min_up).min(t_len);
                if (t..window).any(|tau| at(tau) == 0) {
                    violations.push(UpdownViolation { unit: g, hour: t, kind: UpdownKind::MinUp });
                }
            }
            if at(t) == 0 && prev == 1 {
                let window = (t + gen.min_down).min(t_len);
                if (t..window).any(|tau| at(tau) == 1) {
                    violations.push(UpdownViolation { unit: g, hour: t, kind: UpdownKind::MinDown });
                }
            }
        }
    }
    violations
}

/// Expands a commitment strategy into the full binary assignment
/// `(u, v)` expected by the branch-and-bound interface, deriving the
/// start-up indicators from the transitions (`v_t = max(0, u_t − u_{t−1})`).
pub fn assignment_from_strategy(strategy: &Strategy, grid: &GridSpec) -> Vec<u8> {
    let m = grid.n_units();
    let t_len = grid.horizon;
    assert_eq!(strategy.len(), m * t_len, "strategy length must be units × horizon");
    let mut assignment = strategy.values.clone();
    for g in 0..m {
        for t in 0..t_len {
            let cur = strategy.values[g * t_len + t];
            let prev = if t == 0 { 0 } else { strategy.values[g * t_len + t - 1] };
            assignment.push(cur.saturating_sub(prev));
        }
    }
    assignment
}
