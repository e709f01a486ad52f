//! Branch-and-bound for mixed-integer conic programs.
//!
//! Nodes hold a set of binary fixings that are appended to the base program
//! as equality rows, so every relaxation reuses the same immutable
//! [`ConicProgram`]. Node selection is best-bound (smallest lower bound,
//! FIFO on ties) and branching picks the most fractional binary with ties
//! broken toward the lowest variable index — both fully deterministic.
//!
//! A warm-start assignment, when provided, is fixed and solved *before* any
//! node processing or time-limit checks: if conic-feasible it seeds the
//! incumbent so that even a zero time budget returns its cost; if infeasible
//! it is discarded and flagged, never treated as an error.
//!
//! Time limits are only checked at node boundaries: a node's relaxation solve
//! is never interrupted, so the limit can be overshot by at most one solve.

use std::collections::BinaryHeap;
use std::time::Instant;

use thiserror::Error;

use crate::conic::{
    solve, ConicProgram, ConicSolution, SolveStatus, SolverSettings,
};

/// A conic program plus the indices of its binary variables.
///
/// The base program must already encode `0 ≤ x_j ≤ 1` for every binary index
/// `j`; branch-and-bound adds only equality fixings on top.
#[derive(Debug, Clone)]
pub struct MixedIntegerConicProgram {
    pub base: ConicProgram,
    pub binary_indices: Vec<usize>,
}

/// Errors from mixed-integer solver entry points.
#[derive(Debug, Error)]
pub enum BnbError {
    #[error("binary index {index} out of range for {vars} variables")]
    BadBinaryIndex { index: usize, vars: usize },
    #[error("assignment has {got} entries for {want} binaries")]
    AssignmentLength { got: usize, want: usize },
    #[error("brute force supports at most {max} binaries, program has {got}")]
    TooManyBinaries { max: usize, got: usize },
}

impl MixedIntegerConicProgram {
    pub fn new(base: ConicProgram, binary_indices: Vec<usize>) -> Result<Self, BnbError> {
        let vars = base.var_count();
        for &index in &binary_indices {
            if index >= vars {
                return Err(BnbError::BadBinaryIndex { index, vars });
            }
        }
        Ok(MixedIntegerConicProgram { base, binary_indices })
    }

    pub fn binary_count(&self) -> usize {
        self.binary_indices.len()
    }
}

/// Branching rule identifiers (single rule today, kept open for extension).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BranchingRule {
    /// Branch on the binary farthest from an integer; ties → lowest index.
    MostFractional,
}

/// Knobs of the branch-and-bound search.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BnbSettings {
    /// Wall-clock budget in seconds; `None` = unlimited.
    pub time_limit: Option<f64>,
    /// Terminate once `(UB − LB) / max(|UB|, 1e-9)` is at or below this.
    pub gap_tolerance: f64,
    /// Distance from an integer below which a binary counts as integral.
    pub integrality_tolerance: f64,
    /// Maximum number of relaxations solved; `None` = unlimited.
    pub node_limit: Option<usize>,
    pub branching_rule: BranchingRule,
    /// Reserved for stochastic rules; the default search never consumes it.
    pub seed: u64,
    /// Settings for every relaxation solve.
    pub solver: SolverSettings,
}

impl Default for BnbSettings {
    fn default() -> Self {
        BnbSettings {
            time_limit: None,
            gap_tolerance: 1e-6,
            integrality_tolerance: 1e-6,
            node_limit: None,
            branching_rule: BranchingRule::MostFractional,
            seed: 0,
            solver: SolverSettings::default(),
        }
    }
}

/// Termination status of a mixed-integer solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BnbStatus {
    Optimal,
    TimeLimit,
    NodeLimit,
    Infeasible,
}

/// Incumbent: a rounded binary assignment plus its verified conic solution.
#[derive(Debug, Clone)]
pub struct Incumbent {
    /// One 0/1 value per entry of `binary_indices`.
    pub assignment: Vec<u8>,
    pub solution: ConicSolution,
}

/// Outcome of a mixed-integer solve.
#[derive(Debug, Clone)]
pub struct BnbResult {
    pub status: BnbStatus,
    pub incumbent: Option<Incumbent>,
    /// Objective of the incumbent; `+∞` when none exists.
    pub upper_bound: f64,
    /// Proven bound from the relaxations; `−∞` until the root is solved.
    pub lower_bound: f64,
    /// `(UB − LB) / max(|UB|, 1e-9)`; `+∞` without an incumbent.
    pub relative_gap: f64,
    /// Relaxations solved (warm-start and incumbent verifications excluded).
    pub nodes: usize,
    pub wall_time: f64,
    /// True iff a warm start was supplied but infeasible when fixed.
    pub warm_start_discarded: bool,
}

/// One line of the optional search trace.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct NodeRecord {
    pub node: usize,
    pub depth: usize,
    pub lower_bound: f64,
    /// Incumbent objective at the time the node was processed, if any.
    pub incumbent: Option<f64>,
}

/// Open node: fixings made so far and the bound inherited from its parent.
struct Node {
    lower_bound: f64,
    seq: usize,
    depth: usize,
    /// `(position in binary_indices, value)` pairs.
    fixings: Vec<(usize, u8)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.lower_bound == other.lower_bound && self.seq == other.seq
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap is a max-heap; invert so the smallest bound pops first,
        // oldest node first on ties.
        other
            .lower_bound
            .partial_cmp(&self.lower_bound)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn fixing_rows(mip: &MixedIntegerConicProgram, fixings: &[(usize, u8)]) -> Vec<(Vec<(usize, f64)>, f64)> {
    fixings
        .iter()
        .map(|&(pos, val)| (vec![(mip.binary_indices[pos], 1.0)], val as f64))
        .collect()
}

/// Solves the base program with every binary fixed to `assignment`.
///
/// `PrimalInfeasible` signals an infeasible strategy; other non-`Optimal`
/// statuses propagate from the conic core unchanged.
pub fn evaluate_assignment(
    mip: &MixedIntegerConicProgram,
    assignment: &[u8],
) -> Result<ConicSolution, BnbError> {
    evaluate_assignment_with(mip, assignment, &SolverSettings::default())
}

/// [`evaluate_assignment`] with explicit solver settings.
pub fn evaluate_assignment_with(
    mip: &MixedIntegerConicProgram,
    assignment: &[u8],
    settings: &SolverSettings,
) -> Result<ConicSolution, BnbError> {
    if assignment.len() != mip.binary_indices.len() {
        return Err(BnbError::AssignmentLength {
            got: assignment.len(),
            want: mip.binary_indices.len(),
        });
    }
    let fixings: Vec<(usize, u8)> = assignment.iter().copied().enumerate().collect();
    let fixed = mip.base.with_equalities(&fixing_rows(mip, &fixings));
    Ok(solve(&fixed, settings))
}

/// Branch-and-bound solve; see [`solve_mip_traced`] for the trace variant.
pub fn solve_mip(
    mip: &MixedIntegerConicProgram,
    settings: &BnbSettings,
    warm_start: Option<&[u8]>,
) -> Result<BnbResult, BnbError> {
    solve_mip_traced(mip, settings, warm_start, &mut |_| {})
}

/// Branch-and-bound solve emitting one [`NodeRecord`] per processed node.
pub fn solve_mip_traced(
    mip: &MixedIntegerConicProgram,
    settings: &BnbSettings,
    warm_start: Option<&[u8]>,
    trace: &mut dyn FnMut(NodeRecord),
) -> Result<BnbResult, BnbError> {
    assert!(settings.gap_tolerance >= 0.0, "gap tolerance must be nonnegative");
    assert!(
        settings.integrality_tolerance > 0.0 && settings.integrality_tolerance < 0.5,
        "integrality tolerance must lie in (0, 0.5)"
    );
    let start = Instant::now();
    let nb = mip.binary_indices.len();

    // Warm start is honored before any budget checks so that even a zero
    // time limit returns its cost when it is feasible.
    let mut incumbent: Option<Incumbent> = None;
    let mut upper_bound = f64::INFINITY;
    let mut warm_start_discarded = false;
    if let Some(ws) = warm_start {
        if ws.len() != nb {
            return Err(BnbError::AssignmentLength { got: ws.len(), want: nb });
        }
        let sol = evaluate_assignment_with(mip, ws, &settings.solver)?;
        if sol.status == SolveStatus::Optimal {
            upper_bound = sol.objective;
            incumbent = Some(Incumbent { assignment: ws.to_vec(), solution: sol });
        } else {
            warm_start_discarded = true;
        }
    }

    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Node { lower_bound: f64::NEG_INFINITY, seq, depth: 0, fixings: Vec::new() });
    let mut lower_bound = f64::NEG_INFINITY;
    let mut nodes = 0usize;
    let mut saw_infeasible_leaf_only = true;

    let finish = |status: BnbStatus,
                  incumbent: Option<Incumbent>,
                  upper_bound: f64,
                  lower_bound: f64,
                  nodes: usize| {
        let lb = lower_bound.min(upper_bound);
        let relative_gap = if upper_bound.is_finite() {
            ((upper_bound - lb) / upper_bound.abs().max(1e-9)).max(0.0)
        } else {
            f64::INFINITY
        };
        Ok(BnbResult {
            status,
            incumbent,
            upper_bound,
            lower_bound: lb,
            relative_gap,
            nodes,
            wall_time: start.elapsed().as_secs_f64(),
            warm_start_discarded,
        })
    };
    let gap_closed = |ub: f64, lb: f64| ub.is_finite() && ub - lb <= settings.gap_tolerance * ub.abs().max(1e-9);

    while let Some(node) = heap.pop() {
        lower_bound = lower_bound.max(node.lower_bound);
        if gap_closed(upper_bound, lower_bound) {
            return finish(BnbStatus::Optimal, incumbent, upper_bound, lower_bound, nodes);
        }
        if let Some(limit) = settings.time_limit {
            if start.elapsed().as_secs_f64() >= limit {
                return finish(BnbStatus::TimeLimit, incumbent, upper_bound, lower_bound, nodes);
            }
        }
        if let Some(limit) = settings.node_limit {
            if nodes >= limit {
                return finish(BnbStatus::NodeLimit, incumbent, upper_bound, lower_bound, nodes);
            }
        }

        let relaxed = mip.base.with_equalities(&fixing_rows(mip, &node.fixings));
        let sol = solve(&relaxed, &settings.solver);
        nodes += 1;
        trace(NodeRecord {
            node: nodes,
            depth: node.depth,
            lower_bound: node.lower_bound,
            incumbent: incumbent.as_ref().map(|i| i.solution.objective),
        });

        match sol.status {
            SolveStatus::PrimalInfeasible => {
                // Pruned; nothing feasible below this node.
                continue;
            }
            SolveStatus::Optimal => {
                saw_infeasible_leaf_only = false;
                let bound = sol.objective;
                if upper_bound.is_finite()
                    && bound >= upper_bound - settings.gap_tolerance * upper_bound.abs().max(1e-9)
                {
                    continue; // dominated by the incumbent
                }
                // Most fractional unfixed binary, ties toward lowest index.
                let mut branch: Option<(usize, f64)> = None;
                for (pos, &var) in mip.binary_indices.iter().enumerate() {
                    let v = sol.primal[var];
                    let frac = (v - v.round()).abs();
                    if frac > settings.integrality_tolerance {
                        let better = match branch {
                            None => true,
                            Some((_, best)) => frac > best,
                        };
                        if better {
                            branch = Some((pos, frac));
                        }
                    }
                }
                match branch {
                    None => {
                        // Integral relaxation: round, re-verify, accept.
                        let mut assignment = vec![0u8; nb];
                        for (pos, &var) in mip.binary_indices.iter().enumerate() {
                            assignment[pos] = if sol.primal[var] >= 0.5 { 1 } else { 0 };
                        }
                        let verified = evaluate_assignment_with(mip, &assignment, &settings.solver)?;
                        if verified.status == SolveStatus::Optimal && verified.objective < upper_bound
                        {
                            upper_bound = verified.objective;
                            incumbent = Some(Incumbent { assignment, solution: verified });
                        }
                    }
                    Some((pos, _)) => {
                        for value in [0u8, 1u8] {
                            let mut fixings = node.fixings.clone();
                            fixings.push((pos, value));
                            seq += 1;
                            heap.push(Node {
                                lower_bound: bound,
                                seq,
                                depth: node.depth + 1,
                                fixings,
                            });
                        }
                    }
                }
            }
            SolveStatus::Unbounded | SolveStatus::IterationLimit | SolveStatus::NumericalFailure => {
                // No usable bound. Branch on the first unfixed binary so the
                // subtree is not silently cut; fully fixed nodes are dropped.
                saw_infeasible_leaf_only = false;
                let fixed: std::collections::BTreeSet<usize> =
                    node.fixings.iter().map(|&(p, _)| p).collect();
                if let Some(pos) = (0..nb).find(|p| !fixed.contains(p)) {
                    for value in [0u8, 1u8] {
                        let mut fixings = node.fixings.clone();
                        fixings.push((pos, value));
                        seq += 1;
                        heap.push(Node {
                            lower_bound: node.lower_bound,
                            seq,
                            depth: node.depth + 1,
                            fixings,
                        });
                    }
                }
            }
        }
    }

    // Exhausted search: everything is either pruned or verified.
    if let Some(inc) = incumbent {
        let ub = inc.solution.objective;
        finish(BnbStatus::Optimal, Some(inc), ub, ub, nodes)
    } else if saw_infeasible_leaf_only {
        finish(BnbStatus::Infeasible, None, f64::INFINITY, f64::INFINITY, nodes)
    } else {
        // Nodes existed but none produced a verified incumbent (numerical
        // dead ends); report infeasible-with-caution semantics.
        finish(BnbStatus::Infeasible, None, f64::INFINITY, f64::INFINITY, nodes)
    }
}

/// Exhaustive oracle: solves every assignment of the binaries.
///
/// Assignments violating rows that involve only binaries and row-local
/// slacks are rejected without a conic solve; the filter is a necessary
/// condition, so no feasible assignment is ever skipped. `nodes` reports the
/// number of assignments considered.
pub fn brute_force(mip: &MixedIntegerConicProgram) -> Result<BnbResult, BnbError> {
    const MAX_BINARIES: usize = 25;
    let nb = mip.binary_indices.len();
    if nb > MAX_BINARIES {
        return Err(BnbError::TooManyBinaries { max: MAX_BINARIES, got: nb });
    }
    let start = Instant::now();
    let filter = BinaryRowFilter::build(mip);

    let mut best: Option<Incumbent> = None;
    let mut nodes = 0usize;
    for mask in 0u64..(1u64 << nb) {
        nodes += 1;
        let assignment: Vec<u8> = (0..nb).map(|k| ((mask >> k) & 1) as u8).collect();
        if !filter.admits(&assignment) {
            continue;
        }
        let sol = evaluate_assignment(mip, &assignment)?;
        if sol.status == SolveStatus::Optimal {
            let better = best
                .as_ref()
                .map_or(true, |b| sol.objective < b.solution.objective);
            if better {
                best = Some(Incumbent { assignment, solution: sol });
            }
        }
    }

    let wall_time = start.elapsed().as_secs_f64();
    Ok(match best {
        Some(inc) => {
            let ub = inc.solution.objective;
            BnbResult {
                status: BnbStatus::Optimal,
                incumbent: Some(inc),
                upper_bound: ub,
                lower_bound: ub,
                relative_gap: 0.0,
                nodes,
                wall_time,
                warm_start_discarded: false,
            }
        }
        None => BnbResult {
            status: BnbStatus::Infeasible,
            incumbent: None,
            upper_bound: f64::INFINITY,
            lower_bound: f64::INFINITY,
            relative_gap: f64::INFINITY,
            nodes,
            wall_time,
            warm_start_discarded: false,
        },
    })
}

/// Pre-screen for assignments using rows whose support is binaries plus
/// nonnegative slacks local to that row.
///
/// Such a row `Σ a_j u_j + Σ c_k s_k = r` with `s_k ≥ 0` free elsewhere is
/// satisfiable iff `r − Σ a_j u_j` lies in the range of `Σ c_k s_k`:
/// `{0}` with no slacks, `[0, ∞)` when all `c_k > 0`, `(−∞, 0]` when all
/// `c_k < 0`, and all reals for mixed signs (such rows are skipped).
struct BinaryRowFilter {
    /// Per usable row: coefficient per binary position, rhs, slack-range kind.
    rows: Vec<(Vec<(usize, f64)>, f64, RangeKind)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RangeKind {
    ExactlyZero,
    NonnegativeOnly,
    NonpositiveOnly,
}

impl BinaryRowFilter {
    fn build(mip: &MixedIntegerConicProgram) -> BinaryRowFilter {
        use crate::conic::ConeKind;
        let program = &mip.base;
        let a = program.matrix();
        let n = program.var_count();
        let p = program.row_count();

        let mut binary_pos: Vec<Option<usize>> = vec![None; n];
        for (pos, &var) in mip.binary_indices.iter().enumerate() {
            binary_pos[var] = Some(pos);
        }
        let mut is_nonneg = vec![false; n];
        for (off, b) in program.cones().iter_offsets() {
            if b.kind == ConeKind::Nonnegative {
                is_nonneg[off..off + b.dim].fill(true);
            }
        }
        // Count row appearances per column to find row-local slacks.
        let mut appearances = vec![0usize; n];
        for j in 0..n {
            appearances[j] = a.col(j).count();
        }

        // Rebuild rows from column storage.
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); p];
        for j in 0..n {
            for (i, v) in a.col(j) {
                rows[i].push((j, v));
            }
        }

        let mut usable = Vec::new();
        'rows: for (i, row) in rows.iter().enumerate() {
            let mut bin_terms = Vec::new();
            let mut pos_slack = false;
            let mut neg_slack = false;
            let mut any_slack = false;
            for &(j, v) in row {
                if let Some(pos) = binary_pos[j] {
                    bin_terms.push((pos, v));
                } else if is_nonneg[j] && appearances[j] == 1 {
                    any_slack = true;
                    if v > 0.0 {
                        pos_slack = true;
                    } else if v < 0.0 {
                        neg_slack = true;
                    }
                } else {
                    continue 'rows; // row involves general variables
                }
            }
            let kind = match (any_slack, pos_slack, neg_slack) {
                (false, _, _) => RangeKind::ExactlyZero,
                (true, true, false) => RangeKind::NonnegativeOnly,
                (true, false, true) => RangeKind::NonpositiveOnly,
                _ => continue 'rows, // mixed signs reach every value
            };
            usable.push((bin_terms, program.rhs()[i], kind));
        }
        BinaryRowFilter { rows: usable }
    }

    fn admits(&self, assignment: &[u8]) -> bool {
        const TOL: f64 = 1e-9;
        for (terms, rhs, kind) in &self.rows {
            let lhs: f64 = terms.iter().map(|&(pos, v)| v * assignment[pos] as f64).sum();
            let slack_needed = rhs - lhs;
            let ok = match kind {
                RangeKind::ExactlyZero => slack_needed.abs() <= TOL,
                RangeKind::NonnegativeOnly => slack_needed >= -TOL,
                RangeKind::NonpositiveOnly => slack_needed <= TOL,
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::ProgramBuilder;
    use approx::assert_relative_eq;

    /// min x + 2u s.t. x ≥ 1 − u, x ≥ 0, u ∈ {0,1}.
    fn toy_mip() -> MixedIntegerConicProgram {
        let mut pb = ProgramBuilder::new();
        let x = pb.nonneg_vars(1).start;
        let u = pb.nonneg_vars(1).start;
        pb.set_cost(x, 1.0);
        pb.set_cost(u, 2.0);
        pb.geq_row(&[(x, 1.0), (u, 1.0)], 1.0); // x + u ≥ 1
        pb.leq_row(&[(u, 1.0)], 1.0); // u ≤ 1
        let base = pb.build().unwrap();
        MixedIntegerConicProgram::new(base, vec![u]).unwrap()
    }

    #[test]
    fn toy_mip_solves_to_the_cheap_branch() {
        let mip = toy_mip();
        let res = solve_mip(&mip, &BnbSettings::default(), None).unwrap();
        assert_eq!(res.status, BnbStatus::Optimal);
        assert_relative_eq!(res.upper_bound, 1.0, epsilon = 1e-5);
        let inc = res.incumbent.unwrap();
        assert_eq!(inc.assignment, vec![0]);
        assert!(res.lower_bound <= res.upper_bound + 1e-9);
    }

    #[test]
    fn feasible_warm_start_seeds_the_incumbent_and_optimum_is_kept() {
        let mip = toy_mip();
        let res = solve_mip(&mip, &BnbSettings::default(), Some(&[1])).unwrap();
        assert_eq!(res.status, BnbStatus::Optimal);
        assert!(!res.warm_start_discarded);
        assert_relative_eq!(res.upper_bound, 1.0, epsilon = 1e-5);
        assert_eq!(res.incumbent.unwrap().assignment, vec![0]);
    }

    #[test]
    fn evaluate_assignment_matches_the_two_cases() {
        let mip = toy_mip();
        let off = evaluate_assignment(&mip, &[0]).unwrap();
        assert_relative_eq!(off.objective, 1.0, epsilon = 1e-5);
        let on = evaluate_assignment(&mip, &[1]).unwrap();
        assert_relative_eq!(on.objective, 2.0, epsilon = 1e-5);
    }

    #[test]
    fn brute_force_enumerates_two_assignments() {
        let mip = toy_mip();
        let res = brute_force(&mip).unwrap();
        assert_eq!(res.status, BnbStatus::Optimal);
        assert_eq!(res.nodes, 2);
        assert_relative_eq!(res.upper_bound, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn infeasible_for_every_assignment_reports_infeasible() {
        // u ∈ {0,1} but also u = 0.5 via an equality: both fixings clash.
        let mut pb = ProgramBuilder::new();
        let u = pb.nonneg_vars(1).start;
        pb.set_cost(u, 1.0);
        pb.leq_row(&[(u, 1.0)], 1.0);
        pb.eq_row(&[(u, 1.0)], 0.5);
        let base = pb.build().unwrap();
        let mip = MixedIntegerConicProgram::new(base, vec![u]).unwrap();
        assert_eq!(brute_force(&mip).unwrap().status, BnbStatus::Infeasible);
        let res = solve_mip(&mip, &BnbSettings::default(), None).unwrap();
        assert_eq!(res.status, BnbStatus::Infeasible);
    }

    #[test]
    fn infeasible_warm_start_is_discarded_with_a_flag() {
        // Forbid u = 1 via a pure-binary row; warm start claims u = 1.
        let mut pb = ProgramBuilder::new();
        let x = pb.nonneg_vars(1).start;
        let u = pb.nonneg_vars(1).start;
        pb.set_cost(x, 1.0);
        pb.geq_row(&[(x, 1.0), (u, 1.0)], 1.0);
        pb.leq_row(&[(u, 1.0)], 0.0); // u ≤ 0
        let base = pb.build().unwrap();
        let mip = MixedIntegerConicProgram::new(base, vec![u]).unwrap();
        let res = solve_mip(&mip, &BnbSettings::default(), Some(&[1])).unwrap();
        assert!(res.warm_start_discarded);
        assert_eq!(res.status, BnbStatus::Optimal);
        assert_relative_eq!(res.upper_bound, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn zero_time_budget_still_returns_the_warm_start_cost() {
        let mip = toy_mip();
        let settings = BnbSettings { time_limit: Some(0.0), ..BnbSettings::default() };
        let warm = solve_mip(&mip, &settings, Some(&[1])).unwrap();
        assert_eq!(warm.status, BnbStatus::TimeLimit);
        assert_relative_eq!(warm.upper_bound, 2.0, epsilon = 1e-5);
        assert!(warm.relative_gap > 0.0);

        let cold = solve_mip(&mip, &settings, None).unwrap();
        assert_eq!(cold.status, BnbStatus::TimeLimit);
        assert!(cold.incumbent.is_none());
        assert!(cold.relative_gap.is_infinite());
    }

    #[test]
    fn trace_reports_monotone_lower_bounds() {
        let mip = toy_mip();
        let mut records = Vec::new();
        let _ = solve_mip_traced(&mip, &BnbSettings::default(), None, &mut |r| records.push(r))
            .unwrap();
        assert!(!records.is_empty());
        for pair in records.windows(2) {
            assert!(
                pair[1].lower_bound >= pair[0].lower_bound - 1e-12
                    || pair[0].lower_bound == f64::NEG_INFINITY
            );
        }
    }

    #[test]
    fn binary_row_filter_respects_pure_binary_rows() {
        // Row u1 + u2 ≤ 1 (slack) plus generic row with a continuous var.
        let mut pb = ProgramBuilder::new();
        let x = pb.nonneg_vars(1).start;
        let u = pb.nonneg_vars(2);
        pb.set_cost(x, 1.0);
        pb.leq_row(&[(u.start, 1.0), (u.start + 1, 1.0)], 1.0);
        pb.geq_row(&[(x, 1.0), (u.start, 1.0)], 1.0);
        pb.leq_row(&[(u.start, 1.0)], 1.0);
        pb.leq_row(&[(u.start + 1, 1.0)], 1.0);
        let base = pb.build().unwrap();
        let mip = MixedIntegerConicProgram::new(base, vec![u.start, u.start + 1]).unwrap();
        let filter = BinaryRowFilter::build(&mip);
        assert!(filter.admits(&[0, 0]));
        assert!(filter.admits(&[1, 0]));
        assert!(filter.admits(&[0, 1]));
        assert!(!filter.admits(&[1, 1]), "u1 + u2 = 2 violates the knapsack row");
    }

    #[test]
    fn node_limit_terminates_early() {
        let mip = toy_mip();
        let settings = BnbSettings { node_limit: Some(0), ..BnbSettings::default() };
        let res = solve_mip(&mip, &settings, None).unwrap();
        assert_eq!(res.status, BnbStatus::NodeLimit);
        assert_eq!(res.nodes, 0);
    }
}
