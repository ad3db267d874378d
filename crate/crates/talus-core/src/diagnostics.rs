//! Trajectory containers, invariant checkers and the mesh-refinement study.

use crate::error::{Error, Result};
use crate::field::{pl_eval, LayerState, LayerState2D};
use crate::grid::{Grid1D, Grid2D};
use crate::params::PhysicalParams;
use crate::scenario::ScenarioSpec;

/// State captured at the first accepted step at or past a scheduled time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub scheduled_t: f64,
    pub state: LayerState,
}

/// Per-accepted-step diagnostics row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub max_uv: f64,
    pub max_slope: f64,
    pub min_u: f64,
    pub min_v: f64,
    pub volume: f64,
    pub dt: f64,
    pub retries: u32,
}

/// Full result of a 1-D run: snapshots plus the per-step series.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub params: PhysicalParams,
    pub initial: LayerState,
    pub snapshots: Vec<Snapshot>,
    pub series: Vec<StepRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot2D {
    pub scheduled_t: f64,
    pub state: LayerState2D,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory2D {
    pub grid: Grid2D,
    pub params: PhysicalParams,
    pub initial: LayerState2D,
    pub snapshots: Vec<Snapshot2D>,
    pub series: Vec<StepRecord>,
}

/// Worst offending sample found by a checker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub t: f64,
    pub node: Option<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOutcome {
    pub pass: bool,
    pub worst: Option<Witness>,
}

impl CheckOutcome {
    fn passing() -> Self {
        CheckOutcome {
            pass: true,
            worst: None,
        }
    }
}

/// Trapezoid quadrature of u + v over [0, 1].
pub fn trapezoid_volume(state: &LayerState, grid: &Grid1D) -> f64 {
    let n = grid.intervals();
    let mut sum = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        sum += w * (state.u[i] + state.v[i]);
    }
    sum * grid.dx()
}

/// Trapezoid quadrature of u + v over the unit square (product weights).
pub fn trapezoid_volume_2d(state: &LayerState2D, grid: &Grid2D) -> f64 {
    let n = grid.intervals();
    let w1 = |i: usize| if i == 0 || i == n { 0.5 } else { 1.0 };
    let mut sum = 0.0;
    for k in 0..=n {
        for i in 0..=n {
            let c = state.idx(i, k);
            sum += w1(i) * w1(k) * (state.u[c] + state.v[c]);
        }
    }
    sum * grid.dx() * grid.dx()
}

fn snapshot_states(traj: &Trajectory) -> impl Iterator<Item = &LayerState> {
    std::iter::once(&traj.initial).chain(traj.snapshots.iter().map(|s| &s.state))
}

/// Property 5.1 with an explicit tolerance (0 for the discrete schemes,
/// a vanishing mesh-dependent value for the PDE discretizations).
pub fn check_max_principle_tol(traj: &Trajectory, tol: f64) -> CheckOutcome {
    let bound = traj.initial.max_combined() + tol;
    let mut worst: Option<Witness> = None;
    for state in snapshot_states(traj) {
        let m = state.max_combined();
        if m > bound && worst.is_none_or(|w| m > w.value) {
            worst = Some(Witness {
                t: state.t,
                node: Some(state.argmax_combined()),
                value: m,
            });
        }
    }
    for rec in &traj.series {
        if rec.max_uv > bound && worst.is_none_or(|w| rec.max_uv > w.value) {
            worst = Some(Witness {
                t: rec.t,
                node: None,
                value: rec.max_uv,
            });
        }
    }
    CheckOutcome {
        pass: worst.is_none(),
        worst,
    }
}

/// Property 5.1, exact comparison.
pub fn check_max_principle(traj: &Trajectory) -> CheckOutcome {
    check_max_principle_tol(traj, 0.0)
}

/// Property 5.2: every one-sided slope of u bounded by alpha, exactly.
pub fn check_slope_bound(traj: &Trajectory, alpha: f64) -> CheckOutcome {
    let dx = traj.grid.dx();
    for state in snapshot_states(traj) {
        for (i, w) in state.u.windows(2).enumerate() {
            let s = ((w[1] - w[0]) / dx).abs();
            if s > alpha {
                return CheckOutcome {
                    pass: false,
                    worst: Some(Witness {
                        t: state.t,
                        node: Some(i),
                        value: s,
                    }),
                };
            }
        }
    }
    for rec in &traj.series {
        if rec.max_slope > alpha {
            return CheckOutcome {
                pass: false,
                worst: Some(Witness {
                    t: rec.t,
                    node: None,
                    value: rec.max_slope,
                }),
            };
        }
    }
    CheckOutcome::passing()
}

/// Properties 5.3 and 5.4: nonnegative layers, u non-decreasing in time.
pub fn check_nonneg_and_monotone(traj: &Trajectory) -> CheckOutcome {
    for state in snapshot_states(traj) {
        for (i, x) in state.u.iter().chain(&state.v).enumerate() {
            if !(*x >= 0.0) {
                return CheckOutcome {
                    pass: false,
                    worst: Some(Witness {
                        t: state.t,
                        node: Some(i % state.nodes()),
                        value: *x,
                    }),
                };
            }
        }
    }
    for rec in &traj.series {
        let m = rec.min_u.min(rec.min_v);
        if !(m >= 0.0) {
            return CheckOutcome {
                pass: false,
                worst: Some(Witness {
                    t: rec.t,
                    node: None,
                    value: m,
                }),
            };
        }
    }
    let mut prev: Option<&LayerState> = None;
    for state in snapshot_states(traj) {
        if let Some(p) = prev {
            for (i, (now, before)) in state.u.iter().zip(&p.u).enumerate() {
                if now < before {
                    return CheckOutcome {
                        pass: false,
                        worst: Some(Witness {
                            t: state.t,
                            node: Some(i),
                            value: now - before,
                        }),
                    };
                }
            }
        }
        prev = Some(state);
    }
    CheckOutcome::passing()
}

fn snapshot_states_2d(traj: &Trajectory2D) -> impl Iterator<Item = &LayerState2D> {
    std::iter::once(&traj.initial).chain(traj.snapshots.iter().map(|s| &s.state))
}

pub fn check_max_principle_2d(traj: &Trajectory2D) -> CheckOutcome {
    let bound = traj.initial.max_combined();
    for state in snapshot_states_2d(traj) {
        let m = state.max_combined();
        if m > bound {
            return CheckOutcome {
                pass: false,
                worst: Some(Witness {
                    t: state.t,
                    node: None,
                    value: m,
                }),
            };
        }
    }
    for rec in &traj.series {
        if rec.max_uv > bound {
            return CheckOutcome {
                pass: false,
                worst: Some(Witness {
                    t: rec.t,
                    node: None,
                    value: rec.max_uv,
                }),
            };
        }
    }
    CheckOutcome::passing()
}

pub fn check_slope_bound_2d(traj: &Trajectory2D, alpha: f64) -> CheckOutcome {
    let dx = traj.grid.dx();
    let n = traj.grid.intervals();
    for state in snapshot_states_2d(traj) {
        for k in 0..=n {
            for i in 0..n {
                let sx = ((state.u[state.idx(i + 1, k)] - state.u[state.idx(i, k)]) / dx).abs();
                let sy = if k < n {
                    ((state.u[state.idx(i, k + 1)] - state.u[state.idx(i, k)]) / dx).abs()
                } else {
                    0.0
                };
                if sx > alpha || sy > alpha {
                    return CheckOutcome {
                        pass: false,
                        worst: Some(Witness {
                            t: state.t,
                            node: Some(state.idx(i, k)),
                            value: sx.max(sy),
                        }),
                    };
                }
            }
        }
    }
    CheckOutcome::passing()
}

pub fn check_nonneg_and_monotone_2d(traj: &Trajectory2D) -> CheckOutcome {
    for state in snapshot_states_2d(traj) {
        for x in state.u.iter().chain(&state.v) {
            if !(*x >= 0.0) {
                return CheckOutcome {
                    pass: false,
                    worst: Some(Witness {
                        t: state.t,
                        node: None,
                        value: *x,
                    }),
                };
            }
        }
    }
    let mut prev: Option<&LayerState2D> = None;
    for state in snapshot_states_2d(traj) {
        if let Some(p) = prev {
            for (now, before) in state.u.iter().zip(&p.u) {
                if now < before {
                    return CheckOutcome {
                        pass: false,
                        worst: Some(Witness {
                            t: state.t,
                            node: None,
                            value: now - before,
                        }),
                    };
                }
            }
        }
        prev = Some(state);
    }
    CheckOutcome::passing()
}

/// Per-step volumes with relative drift from the initial volume.
pub fn volume_series(traj: &Trajectory) -> Vec<(f64, f64, f64)> {
    let v0 = trapezoid_volume(&traj.initial, &traj.grid);
    traj.series
        .iter()
        .map(|rec| (rec.t, rec.volume, (rec.volume - v0) / v0))
        .collect()
}

/// First time max(u+v) exceeds the initial maximum by more than `tol`.
pub fn geyser_scan(traj: &Trajectory, tol: f64) -> Option<(f64, f64)> {
    let bound = traj.initial.max_combined() + tol;
    traj.series
        .iter()
        .find(|rec| rec.max_uv > bound)
        .map(|rec| (rec.t, rec.max_uv - (bound - tol)))
}

/// Sup-norm refinement study of the 1-D scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub meshes: Vec<usize>,
    /// Sup-norm gap in u between successive meshes, evaluated at the finest
    /// mesh's nodes over the common snapshot schedule.
    pub u_gaps: Vec<f64>,
    /// Discrete L2 gaps in v; informational only.
    pub v_gaps_l2: Vec<f64>,
}

impl ConvergenceReport {
    pub fn non_increasing(&self) -> bool {
        self.u_gaps.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.u_gaps.windows(2).all(|w| w[1] < w[0])
    }
}

/// Runs the scenario on each mesh (at most `jobs` concurrently) and measures
/// successive sup-norm gaps of the piecewise-linear u interpolants.
pub fn refinement_study(
    spec: &ScenarioSpec,
    meshes: &[usize],
    jobs: usize,
) -> Result<ConvergenceReport> {
    if meshes.len() < 2 || meshes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Scenario(
            "refinement study needs at least two strictly increasing meshes".into(),
        ));
    }
    let jobs = jobs.max(1);

    let mut runs: Vec<Option<Result<Trajectory>>> = Vec::new();
    runs.resize_with(meshes.len(), || None);
    std::thread::scope(|scope| {
        for chunk in meshes
            .iter()
            .enumerate()
            .collect::<Vec<_>>()
            .chunks(jobs.min(meshes.len()))
        {
            let mut handles = Vec::new();
            for &(idx, &n) in chunk {
                let mut member = spec.clone();
                member.n = n;
                handles.push((idx, scope.spawn(move || crate::scheme1d::run1d(&member))));
            }
            for (idx, h) in handles {
                runs[idx] = Some(h.join().expect("refinement worker panicked"));
            }
        }
    });
    let trajectories: Vec<Trajectory> = runs
        .into_iter()
        .map(|r| r.expect("all meshes scheduled"))
        .collect::<Result<_>>()?;

    let finest = Grid1D::new(*meshes.last().unwrap());
    let mut u_gaps = Vec::new();
    let mut v_gaps_l2 = Vec::new();
    for pair in trajectories.windows(2) {
        let (coarse, fine) = (&pair[0], &pair[1]);
        let mut sup = 0.0_f64;
        let mut l2 = 0.0_f64;
        let snaps = coarse.snapshots.len().min(fine.snapshots.len());
        for s in 0..snaps {
            let (a, b) = (&coarse.snapshots[s].state, &fine.snapshots[s].state);
            for i in 0..=finest.intervals() {
                let x = finest.x(i);
                let du = pl_eval(&a.u, &coarse.grid, x) - pl_eval(&b.u, &fine.grid, x);
                let dv = pl_eval(&a.v, &coarse.grid, x) - pl_eval(&b.v, &fine.grid, x);
                sup = sup.max(du.abs());
                l2 += dv * dv * finest.dx();
            }
        }
        u_gaps.push(sup);
        v_gaps_l2.push(l2.sqrt());
    }
    Ok(ConvergenceReport {
        meshes: meshes.to_vec(),
        u_gaps,
        v_gaps_l2,
    })
}
