//! 2-D extension of the discrete scheme: per-axis decomposition through the
//! shared directional kernel.
//!
//! Boundary treatment: the x-edge columns are pinned to zero exactly like the
//! 1-D endpoints. Along y the missing directions past the edge rows are
//! treated as absent, so a y-invariant field evolves y-invariantly and each
//! row performs the 1-D update verbatim.

use crate::diagnostics::{Snapshot2D, StepRecord, Trajectory2D};
use crate::error::{Error, Result};
use crate::field::LayerState2D;
use crate::grid::Grid2D;
use crate::kernel::{self, AxisFlux, Descents, ABSENT};
use crate::params::PhysicalParams;
use crate::scenario::ScenarioSpec;

/// Four-direction splitting weights (x-, x+, y-, y+) of a node.
pub fn directional_split(d: &[f64; 4]) -> [f64; 4] {
    [
        kernel::split_weight(d, 0),
        kernel::split_weight(d, 1),
        kernel::split_weight(d, 2),
        kernel::split_weight(d, 3),
    ]
}

fn descents_at(u: &[f64], n: usize, dx: f64, i: usize, k: usize) -> Descents {
    let c = k * (n + 1) + i;
    let left = (u[c] - u[c - 1]) / dx;
    let right = (u[c + 1] - u[c]) / dx;
    let y_left = if k > 0 {
        (u[c] - u[c - (n + 1)]) / dx
    } else {
        ABSENT
    };
    let y_right_desc = if k < n {
        -((u[c + (n + 1)] - u[c]) / dx)
    } else {
        ABSENT
    };
    [left, -right, y_left, y_right_desc]
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandingUpdate2D {
    pub u: Vec<f64>,
    pub deposit: Vec<f64>,
}

/// 2-D standing-layer update: the deposit at each node is governed by the
/// steepest of its (up to) four descents, exactly as the four-direction
/// splitting coefficients prescribe (their weighted deposit terms collapse
/// to the steepest-descent form).
pub fn standing_update_2d(
    state: &LayerState2D,
    grid: &Grid2D,
    params: &PhysicalParams,
    dt: f64,
) -> StandingUpdate2D {
    let n = grid.intervals();
    let dx = grid.dx();
    let gamma_dt = params.gamma * dt;
    let mut u = state.u.clone();
    let mut deposit = vec![0.0; state.u.len()];
    for k in 0..=n {
        for i in 1..n {
            let c = k * (n + 1) + i;
            let d = descents_at(&state.u, n, dx, i, k);
            let du = kernel::deposit(&d, state.v[c], params.alpha, gamma_dt);
            deposit[c] = du;
            u[c] = state.u[c] + du;
        }
    }
    StandingUpdate2D { u, deposit }
}

pub fn v_star_2d(state: &LayerState2D, update: &StandingUpdate2D) -> Vec<f64> {
    state
        .v
        .iter()
        .zip(&update.deposit)
        .map(|(v, du)| v - du)
        .collect()
}

fn gate(new_u: &[f64], n: usize, dx: f64, i: usize, k: usize, dir: usize) -> f64 {
    if i == 0 || i == n {
        return 1.0;
    }
    kernel::split_weight(&descents_at(new_u, n, dx, i, k), dir)
}

/// 2-D rolling-layer update. Peak shedding (case D) applies when some axis is
/// a strict peak and no direction strictly ascends; a node that is a peak in
/// one axis but ascends in the other routes its matter per-axis.
pub fn rolling_update_2d(
    state: &LayerState2D,
    grid: &Grid2D,
    new_u: &[f64],
    vstar: &[f64],
    params: &PhysicalParams,
    dt: f64,
) -> Vec<f64> {
    let n = grid.intervals();
    let dx = grid.dx();
    let stride = n + 1;
    let mut v = state.v.clone();
    for k in 0..=n {
        for i in 1..n {
            let c = k * stride + i;
            let l = (new_u[c] - new_u[c - 1]) / dx;
            let r = (new_u[c + 1] - new_u[c]) / dx;
            let vxl = (vstar[c] - vstar[c - 1]) / dx;
            let vxr = (vstar[c + 1] - vstar[c]) / dx;
            let fx = kernel::axis_flux(
                Some(l),
                Some(r),
                vxl,
                vxr,
                gate(new_u, n, dx, i - 1, k, 1),
                gate(new_u, n, dx, i + 1, k, 0),
            );
            let (yl, vyl, gym) = if k > 0 {
                (
                    Some((new_u[c] - new_u[c - stride]) / dx),
                    (vstar[c] - vstar[c - stride]) / dx,
                    gate(new_u, n, dx, i, k - 1, 3),
                )
            } else {
                (None, 0.0, 1.0)
            };
            let (yr, vyr, gyp) = if k < n {
                (
                    Some((new_u[c + stride] - new_u[c]) / dx),
                    (vstar[c + stride] - vstar[c]) / dx,
                    gate(new_u, n, dx, i, k + 1, 2),
                )
            } else {
                (None, 0.0, 1.0)
            };
            let fy = kernel::axis_flux(yl, yr, vyl, vyr, gym, gyp);

            let any_peak = matches!(fx, AxisFlux::Peak) || matches!(fy, AxisFlux::Peak);
            if any_peak {
                let d = descents_at(new_u, n, dx, i, k);
                if d.iter().all(|&x| x == ABSENT || x >= 0.0) {
                    v[c] = 0.0;
                    continue;
                }
            }
            let fx = match fx {
                AxisFlux::Peak => 0.0,
                AxisFlux::Influx(f) => f,
            };
            let fy = match fy {
                AxisFlux::Peak => 0.0,
                AxisFlux::Influx(f) => f,
            };
            v[c] = vstar[c] + dt * params.beta * (fx + fy);
        }
    }
    v
}

fn max_abs_slope(u: &[f64], n: usize, dx: f64) -> f64 {
    let stride = n + 1;
    let mut m = 0.0_f64;
    for k in 0..=n {
        for i in 0..n {
            let c = k * stride + i;
            m = m.max(((u[c + 1] - u[c]) / dx).abs());
            if k < n {
                m = m.max(((u[c + stride] - u[c]) / dx).abs());
            }
        }
        if k < n {
            let c = k * stride + n;
            m = m.max(((u[c + stride] - u[c]) / dx).abs());
        }
    }
    m
}

fn check_candidate(
    state: &LayerState2D,
    candidate: &LayerState2D,
    vstar: &[f64],
    grid: &Grid2D,
    alpha: f64,
) -> Vec<crate::scheme1d::PropertyViolation> {
    use crate::scheme1d::PropertyViolation::*;
    let mut violations = Vec::new();
    if candidate.max_combined() > state.max_combined() {
        violations.push(MaxPrinciple);
    }
    if max_abs_slope(&candidate.u, grid.intervals(), grid.dx()) > alpha {
        violations.push(CriticalSlope);
    }
    let nonneg = candidate.u.iter().all(|&x| x >= 0.0)
        && candidate.v.iter().all(|&x| x >= 0.0)
        && vstar.iter().all(|&x| x >= 0.0);
    if !nonneg {
        violations.push(Nonnegativity);
    }
    violations
}

pub fn try_step_2d(
    state: &LayerState2D,
    grid: &Grid2D,
    params: &PhysicalParams,
    dt: f64,
) -> (LayerState2D, crate::scheme1d::StepOutcome) {
    let update = standing_update_2d(state, grid, params, dt);
    let vstar = v_star_2d(state, &update);
    let v = rolling_update_2d(state, grid, &update.u, &vstar, params, dt);
    let candidate = LayerState2D::new(grid, update.u, v, state.t + dt);
    let violations = check_candidate(state, &candidate, &vstar, grid, params.alpha);
    let outcome = crate::scheme1d::StepOutcome {
        accepted: violations.is_empty(),
        dt_used: dt,
        violations,
        retries: 0,
    };
    (candidate, outcome)
}

pub fn advance_2d(
    state: &LayerState2D,
    grid: &Grid2D,
    params: &PhysicalParams,
    dt_init: f64,
    dt_min: f64,
) -> Result<(LayerState2D, crate::scheme1d::StepOutcome)> {
    let mut dt = dt_init;
    let mut retries = 0;
    loop {
        let (candidate, outcome) = try_step_2d(state, grid, params, dt);
        if outcome.accepted {
            return Ok((
                candidate,
                crate::scheme1d::StepOutcome { retries, ..outcome },
            ));
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

pub(crate) fn validate_initial_2d(state: &LayerState2D, grid: &Grid2D, alpha: f64) -> Result<()> {
    let n = grid.intervals();
    for k in 0..=n {
        for i in [0, n] {
            let c = state.idx(i, k);
            if state.u[c] != 0.0 || state.v[c] != 0.0 {
                return Err(Error::Scenario(
                    "x-boundary columns must be zero (condition 8.3)".into(),
                ));
            }
        }
    }
    if state.u.iter().chain(&state.v).any(|&x| !(x >= 0.0)) {
        return Err(Error::Scenario(
            "initial layers must be non-negative (condition 8.3)".into(),
        ));
    }
    if max_abs_slope(&state.u, n, grid.dx()) > alpha {
        return Err(Error::Scenario(
            "initial slope exceeds the critical value (condition 8.4)".into(),
        ));
    }
    Ok(())
}

fn record_step(state: &LayerState2D, grid: &Grid2D, dt: f64, retries: u32) -> StepRecord {
    StepRecord {
        t: state.t,
        max_uv: state.max_combined(),
        max_slope: max_abs_slope(&state.u, grid.intervals(), grid.dx()),
        min_u: state.u.iter().copied().fold(f64::INFINITY, f64::min),
        min_v: state.v.iter().copied().fold(f64::INFINITY, f64::min),
        volume: crate::diagnostics::trapezoid_volume_2d(state, grid),
        dt,
        retries,
    }
}

pub fn run2d(spec: &ScenarioSpec) -> Result<Trajectory2D> {
    let grid = Grid2D::new(spec.n);
    let initial = spec.initial_state_2d(&grid)?;
    validate_initial_2d(&initial, &grid, spec.params.alpha)?;
    let dt_init = spec.dt_init(grid.dx());
    let dt_min = spec.dt_min(grid.dx());
    let mut sched = spec.snapshot_times.clone();
    sched.sort_by(f64::total_cmp);

    let mut state = initial.clone();
    let mut snapshots = Vec::new();
    let mut series = Vec::new();
    let mut next = 0;
    while next < sched.len() && state.t >= sched[next] {
        snapshots.push(Snapshot2D {
            scheduled_t: sched[next],
            state: state.clone(),
        });
        next += 1;
    }
    while state.t < spec.horizon {
        let (new_state, outcome) = advance_2d(&state, &grid, &spec.params, dt_init, dt_min)?;
        state = new_state;
        series.push(record_step(&state, &grid, outcome.dt_used, outcome.retries));
        while next < sched.len() && state.t >= sched[next] {
            snapshots.push(Snapshot2D {
                scheduled_t: sched[next],
                state: state.clone(),
            });
            next += 1;
        }
    }
    Ok(Trajectory2D {
        grid,
        params: spec.params,
        initial,
        snapshots,
        series,
    })
}
