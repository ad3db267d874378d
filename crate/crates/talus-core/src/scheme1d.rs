//! 1-D two-layer difference scheme with adaptive step rejection.
//!
//! One time step is the composition standing update -> intermediate rolling
//! field -> rolling update. A candidate step is accepted only if it keeps the
//! discrete maximum principle, the critical-slope bound and nonnegativity;
//! otherwise the step is retried with a halved dt.

use crate::diagnostics::{Snapshot, StepRecord, Trajectory};
use crate::error::{Error, Result};
use crate::field::{slopes_of, LayerState, SlopePair};
use crate::grid::Grid1D;
use crate::kernel::{self, AxisFlux};
use crate::params::PhysicalParams;
use crate::scenario::ScenarioSpec;

/// Slope configuration of a node, total over all finite slope pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    /// Surface rises to the right of the node; the left slope descends.
    RisingRight,
    /// Mirror image: the right slope descends.
    RisingLeft,
    /// One-sided zero lower slope; no direction to roll down.
    FlatFoot,
    /// Slopes rise on both sides; all rolling matter converts here.
    Cavity,
    /// Slopes fall on both sides; all rolling matter departs.
    Peak,
}

impl NodeClass {
    /// Classes whose standing-layer increment is the whole rolling layer.
    pub fn is_full_conversion(self) -> bool {
        matches!(self, NodeClass::FlatFoot | NodeClass::Cavity)
    }
}

/// Deterministic node classification with precedence Peak, then the strict
/// one-sided rising cases, then the full-conversion cases.
pub fn classify(slopes: SlopePair) -> NodeClass {
    let SlopePair { left, right } = slopes;
    if left > 0.0 && right < 0.0 {
        NodeClass::Peak
    } else if left > 0.0 {
        NodeClass::RisingRight
    } else if right < 0.0 {
        NodeClass::RisingLeft
    } else if left == 0.0 || right == 0.0 {
        NodeClass::FlatFoot
    } else {
        NodeClass::Cavity
    }
}

/// Peak splitting weights toward the left (`r_minus`) and right (`r_plus`)
/// descending slopes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCoeffs {
    pub r_minus: f64,
    pub r_plus: f64,
}

/// Steepest-slope splitting rule: the steeper side takes everything, ties
/// split evenly.
pub fn splitting_coeffs(slopes: SlopePair) -> SplitCoeffs {
    let l = slopes.left.abs();
    let r = slopes.right.abs();
    let r_minus = if l > r {
        1.0
    } else if l < r {
        0.0
    } else {
        0.5
    };
    SplitCoeffs {
        r_minus,
        r_plus: 1.0 - r_minus,
    }
}

/// Properties whose violation rejects a candidate step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyViolation {
    MaxPrinciple,
    CriticalSlope,
    Nonnegativity,
}

/// Result of one attempted (or retried) time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub accepted: bool,
    pub dt_used: f64,
    pub violations: Vec<PropertyViolation>,
    pub retries: u32,
}

/// Standing-layer update: the new `u` together with the per-node deposit,
/// so that the intermediate rolling field can be formed without re-deriving
/// the increment from a rounded sum.
#[derive(Debug, Clone, PartialEq)]
pub struct StandingUpdate {
    pub u: Vec<f64>,
    pub deposit: Vec<f64>,
}

/// Applies the standing-layer difference equation at every interior node.
/// Boundary nodes stay pinned at zero. Pure; the input state is unchanged.
pub fn standing_update(
    state: &LayerState,
    grid: &Grid1D,
    params: &PhysicalParams,
    dt: f64,
) -> StandingUpdate {
    let n = grid.intervals();
    let dx = grid.dx();
    let gamma_dt = params.gamma * dt;
    let mut u = state.u.clone();
    let mut deposit = vec![0.0; state.nodes()];
    for i in 1..n {
        let s = slopes_of(&state.u, dx, i);
        let d = kernel::descents_1d(s.left, s.right);
        let du = kernel::deposit(&d, state.v[i], params.alpha, gamma_dt);
        deposit[i] = du;
        u[i] = state.u[i] + du;
    }
    StandingUpdate { u, deposit }
}

/// Intermediate rolling field: what remains at each node after the deposit
/// and is available for transport.
pub fn v_star(state: &LayerState, update: &StandingUpdate) -> Vec<f64> {
    state
        .v
        .iter()
        .zip(&update.deposit)
        .map(|(v, du)| v - du)
        .collect()
}

fn gate_1d(new_u: &[f64], dx: f64, j: usize, n: usize, dir: usize) -> f64 {
    if j == 0 || j == n {
        return 1.0;
    }
    let s = slopes_of(new_u, dx, j);
    kernel::split_weight(&kernel::descents_1d(s.left, s.right), dir)
}

/// Rolling-layer update with upwind influx terms gated by the uphill
/// neighbors' splitting coefficients; peaks of the new standing layer shed
/// their entire rolling matter.
pub fn rolling_update(
    state: &LayerState,
    grid: &Grid1D,
    new_u: &[f64],
    vstar: &[f64],
    params: &PhysicalParams,
    dt: f64,
) -> Vec<f64> {
    let n = grid.intervals();
    let dx = grid.dx();
    let mut v = state.v.clone();
    for i in 1..n {
        let s = slopes_of(new_u, dx, i);
        let vl = (vstar[i] - vstar[i - 1]) / dx;
        let vr = (vstar[i + 1] - vstar[i]) / dx;
        // Direction indices: the left neighbor sends down its x+ side (1),
        // the right neighbor down its x- side (0).
        let gate_minus = gate_1d(new_u, dx, i - 1, n, 1);
        let gate_plus = gate_1d(new_u, dx, i + 1, n, 0);
        v[i] = match kernel::axis_flux(Some(s.left), Some(s.right), vl, vr, gate_minus, gate_plus) {
            AxisFlux::Peak => 0.0,
            AxisFlux::Influx(f) => vstar[i] + dt * params.beta * f,
        };
    }
    v
}

fn check_candidate(
    state: &LayerState,
    candidate: &LayerState,
    vstar: &[f64],
    grid: &Grid1D,
    alpha: f64,
) -> Vec<PropertyViolation> {
    let mut violations = Vec::new();
    if candidate.max_combined() > state.max_combined() {
        violations.push(PropertyViolation::MaxPrinciple);
    }
    let dx = grid.dx();
    let slope_ok = candidate
        .u
        .windows(2)
        .all(|w| ((w[1] - w[0]) / dx).abs() <= alpha);
    if !slope_ok {
        violations.push(PropertyViolation::CriticalSlope);
    }
    let nonneg = candidate.u.iter().all(|&x| x >= 0.0)
        && candidate.v.iter().all(|&x| x >= 0.0)
        && vstar.iter().all(|&x| x >= 0.0);
    if !nonneg {
        violations.push(PropertyViolation::Nonnegativity);
    }
    violations
}

/// One candidate step. The candidate state is returned even when rejected.
pub fn try_step(
    state: &LayerState,
    grid: &Grid1D,
    params: &PhysicalParams,
    dt: f64,
) -> (LayerState, StepOutcome) {
    let update = standing_update(state, grid, params, dt);
    let vstar = v_star(state, &update);
    let v = rolling_update(state, grid, &update.u, &vstar, params, dt);
    let candidate = LayerState::new(update.u, v, state.t + dt);
    let violations = check_candidate(state, &candidate, &vstar, grid, params.alpha);
    let outcome = StepOutcome {
        accepted: violations.is_empty(),
        dt_used: dt,
        violations,
        retries: 0,
    };
    (candidate, outcome)
}

/// Advances one accepted step, halving dt on each rejection. Fails once dt
/// would drop below `dt_min` with violations persisting.
pub fn advance(
    state: &LayerState,
    grid: &Grid1D,
    params: &PhysicalParams,
    dt_init: f64,
    dt_min: f64,
) -> Result<(LayerState, StepOutcome)> {
    assert!(dt_init > 0.0 && dt_min <= dt_init);
    let mut dt = dt_init;
    let mut retries = 0;
    loop {
        let (candidate, outcome) = try_step(state, grid, params, dt);
        if outcome.accepted {
            return Ok((candidate, StepOutcome { retries, ..outcome }));
        }
        retries += 1;
        dt *= 0.5;
        if dt < dt_min {
            return Err(Error::StepFailure {
                dt_min,
                violations: outcome.violations,
            });
        }
    }
}

pub(crate) fn record_step(
    state: &LayerState,
    grid: &Grid1D,
    outcome_dt: f64,
    retries: u32,
) -> StepRecord {
    let dx = grid.dx();
    let max_slope = state
        .u
        .windows(2)
        .map(|w| ((w[1] - w[0]) / dx).abs())
        .fold(0.0, f64::max);
    StepRecord {
        t: state.t,
        max_uv: state.max_combined(),
        max_slope,
        min_u: state.u.iter().copied().fold(f64::INFINITY, f64::min),
        min_v: state.v.iter().copied().fold(f64::INFINITY, f64::min),
        volume: crate::diagnostics::trapezoid_volume(state, grid),
        dt: outcome_dt,
        retries,
    }
}

pub(crate) fn validate_initial(state: &LayerState, grid: &Grid1D, alpha: f64) -> Result<()> {
    let n = grid.intervals();
    if state.u[0] != 0.0 || state.u[n] != 0.0 || state.v[0] != 0.0 || state.v[n] != 0.0 {
        return Err(Error::Scenario(
            "boundary values must be zero (condition 4.3)".into(),
        ));
    }
    if state.u.iter().chain(&state.v).any(|&x| !(x >= 0.0)) {
        return Err(Error::Scenario(
            "initial layers must be non-negative (condition 4.3)".into(),
        ));
    }
    let dx = grid.dx();
    for w in state.u.windows(2) {
        if ((w[1] - w[0]) / dx).abs() > alpha {
            return Err(Error::Scenario(
                "initial slope exceeds the critical value (condition 4.4)".into(),
            ));
        }
    }
    Ok(())
}

/// Runs the discrete 1-D scheme for a scenario, emitting snapshots at the
/// first accepted state at or past each scheduled time.
pub fn run1d(spec: &ScenarioSpec) -> Result<Trajectory> {
    let grid = Grid1D::new(spec.n);
    let initial = spec.initial_state_1d(&grid)?;
    run_on(&grid, initial, spec)
}

pub(crate) fn run_on(
    grid: &Grid1D,
    initial: LayerState,
    spec: &ScenarioSpec,
) -> Result<Trajectory> {
    validate_initial(&initial, grid, spec.params.alpha)?;
    let dt_init = spec.dt_init(grid.dx());
    let dt_min = spec.dt_min(grid.dx());
    let mut sched: Vec<f64> = spec.snapshot_times.clone();
    sched.sort_by(f64::total_cmp);

    let mut state = initial.clone();
    let mut snapshots = Vec::new();
    let mut series = Vec::new();
    let mut next = 0;
    while next < sched.len() && state.t >= sched[next] {
        snapshots.push(Snapshot {
            scheduled_t: sched[next],
            state: state.clone(),
        });
        next += 1;
    }
    while state.t < spec.horizon {
        let (new_state, outcome) = advance(&state, grid, &spec.params, dt_init, dt_min)?;
        state = new_state;
        series.push(record_step(&state, grid, outcome.dt_used, outcome.retries));
        while next < sched.len() && state.t >= sched[next] {
            snapshots.push(Snapshot {
                scheduled_t: sched[next],
                state: state.clone(),
            });
            next += 1;
        }
    }
    Ok(Trajectory {
        grid: *grid,
        params: spec.params,
        initial,
        snapshots,
        series,
    })
}
