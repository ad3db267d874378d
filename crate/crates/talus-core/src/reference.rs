//! Explicit discretizations of the two competing PDE models: the original
//! system with the diffusion-like transport term (which produces geysers) and
//! the modified convective system that respects the maximum principle.

use crate::diagnostics::{Snapshot, StepRecord, Trajectory};
use crate::error::{Error, Result};
use crate::field::LayerState;
use crate::grid::Grid1D;
use crate::params::PhysicalParams;
use crate::scenario::ScenarioSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdeModelKind {
    /// v_t = beta (v u_x)_x - gamma (alpha - |u_x|) v
    OriginalDiffusive,
    /// v_t = beta v_x u_x - gamma (alpha - |u_x|) v
    ModifiedConvective,
}

impl PdeModelKind {
    pub fn name(self) -> &'static str {
        match self {
            PdeModelKind::OriginalDiffusive => "original",
            PdeModelKind::ModifiedConvective => "modified",
        }
    }
}

/// Explicit-stability default step, capped so the conversion term
/// cannot overshoot either.
pub fn default_dt(kind: PdeModelKind, params: &PhysicalParams, dx: f64) -> f64 {
    let eps = 1e-12;
    let transport = match kind {
        PdeModelKind::OriginalDiffusive => 0.25 * dx * dx / params.beta.max(eps),
        PdeModelKind::ModifiedConvective => 0.5 * dx / (params.beta * params.alpha).max(eps),
    };
    transport.min(0.25 / params.gamma)
}

/// One forward-Euler step; boundary nodes pinned to zero. The transport term
/// uses the conservative centered stencil for the original model and an
/// upwind one-sided v_x (taken on the side sign(u_x) points to) for the
/// modified model; u_x in the conversion term is centered in both.
pub fn pde_step(
    state: &LayerState,
    grid: &Grid1D,
    kind: PdeModelKind,
    params: &PhysicalParams,
    dt: f64,
) -> Result<LayerState> {
    let n = grid.intervals();
    let dx = grid.dx();
    let mut u = state.u.clone();
    let mut v = state.v.clone();
    for i in 1..n {
        let ux = (state.u[i + 1] - state.u[i - 1]) / (2.0 * dx);
        let conversion = params.gamma * (params.alpha - ux.abs()) * state.v[i];
        let transport = match kind {
            PdeModelKind::OriginalDiffusive => {
                params.beta
                    * ((state.v[i + 1] + state.v[i]) * (state.u[i + 1] - state.u[i])
                        - (state.v[i] + state.v[i - 1]) * (state.u[i] - state.u[i - 1]))
                    / (2.0 * dx * dx)
            }
            PdeModelKind::ModifiedConvective => {
                let vx = if ux > 0.0 {
                    (state.v[i + 1] - state.v[i]) / dx
                } else {
                    (state.v[i] - state.v[i - 1]) / dx
                };
                params.beta * vx * ux
            }
        };
        u[i] = state.u[i] + dt * conversion;
        v[i] = state.v[i] + dt * (transport - conversion);
    }
    if u.iter().chain(&v).any(|x| !x.is_finite()) {
        return Err(Error::CflFailure { t: state.t, dt });
    }
    Ok(LayerState::new(u, v, state.t + dt))
}

/// Runs a PDE model to the scenario horizon with the same snapshot protocol
/// as the discrete schemes. Fixed step: the explicit default (or the
/// configured dt_init).
pub fn run_pde(spec: &ScenarioSpec, kind: PdeModelKind) -> Result<Trajectory> {
    let grid = Grid1D::new(spec.n);
    let initial = spec.initial_state_1d(&grid)?;
    let dt = spec
        .dt_init
        .unwrap_or_else(|| default_dt(kind, &spec.params, grid.dx()));
    let mut sched = spec.snapshot_times.clone();
    sched.sort_by(f64::total_cmp);

    let mut state = initial.clone();
    let mut snapshots = Vec::new();
    let mut series: Vec<StepRecord> = Vec::new();
    let mut next = 0;
    while next < sched.len() && state.t >= sched[next] {
        snapshots.push(Snapshot {
            scheduled_t: sched[next],
            state: state.clone(),
        });
        next += 1;
    }
    while state.t < spec.horizon {
        state = pde_step(&state, &grid, kind, &spec.params, dt)?;
        series.push(crate::scheme1d::record_step(&state, &grid, dt, 0));
        while next < sched.len() && state.t >= sched[next] {
            snapshots.push(Snapshot {
                scheduled_t: sched[next],
                state: state.clone(),
            });
            next += 1;
        }
    }
    Ok(Trajectory {
        grid,
        params: spec.params,
        initial,
        snapshots,
        series,
    })
}

/// Geyser probe result. The probe anchors at the interior node where the
/// initial maximum of u+v is attained; plateau ties resolve to the tied node
/// with the largest v0 * u0'' (the node the growth-rate argument singles
/// out).
#[derive(Debug, Clone, PartialEq)]
pub struct GeyserReport {
    pub x0_node: usize,
    pub x0: f64,
    pub initial_max: f64,
    /// beta * v0(x0) * discrete u0''(x0).
    pub predicted_rate: f64,
    /// First-step growth of (u+v)(x0) divided by dt.
    pub measured_rate: f64,
    /// First (t, overshoot) where max(u+v) exceeds the initial maximum by
    /// more than the probe tolerance.
    pub exceedance: Option<(f64, f64)>,
    /// Discretization tolerance used for exceedance detection.
    pub tolerance: f64,
}

/// A geyser verdict on a discretized PDE carries a vanishing mesh tolerance:
/// genuine geysers grow to O(1) while truncation wobble stays O(dx).
/// The coefficient is calibrated from the refinement study of the modified
/// model on the cavity preset, whose worst measured overshoot constant is
/// K ~ 0.09; 0.2 leaves a 2x margin while staying far below geyser scale.
pub fn probe_tol(dx: f64, dt: f64) -> f64 {
    0.2 * dx.max(dt)
}

fn probe_anchor(state: &LayerState, grid: &Grid1D) -> Result<usize> {
    let n = grid.intervals();
    let m = state.max_combined();
    let tied: Vec<usize> = (0..=n).filter(|&i| state.u[i] + state.v[i] == m).collect();
    if tied.iter().all(|&i| i == 0 || i == n) {
        return Err(Error::Scenario(
            "geyser probe needs the initial maximum of u+v at an interior node".into(),
        ));
    }
    let dx2 = grid.dx() * grid.dx();
    Ok(tied
        .into_iter()
        .filter(|&i| i > 0 && i < n)
        .max_by(|&a, &b| {
            let curv =
                |i: usize| state.v[i] * (state.u[i + 1] + state.u[i - 1] - 2.0 * state.u[i]) / dx2;
            curv(a).total_cmp(&curv(b))
        })
        .unwrap())
}

/// Runs `kind` on the scenario, measuring the first-step growth rate at the
/// anchor against the analytic prediction and scanning for the first
/// exceedance of the initial maximum. Stops early once an exceedance is
/// found.
pub fn geyser_probe(spec: &ScenarioSpec, kind: PdeModelKind) -> Result<GeyserReport> {
    let grid = Grid1D::new(spec.n);
    let initial = spec.initial_state_1d(&grid)?;
    let x0_node = probe_anchor(&initial, &grid)?;
    let dx = grid.dx();
    let d2u =
        (initial.u[x0_node + 1] + initial.u[x0_node - 1] - 2.0 * initial.u[x0_node]) / (dx * dx);
    let predicted_rate = spec.params.beta * initial.v[x0_node] * d2u;
    let initial_max = initial.max_combined();
    let dt = spec
        .dt_init
        .unwrap_or_else(|| default_dt(kind, &spec.params, dx));

    let tolerance = probe_tol(dx, dt);
    let mut state = pde_step(&initial, &grid, kind, &spec.params, dt)?;
    let measured_rate =
        (state.u[x0_node] + state.v[x0_node] - (initial.u[x0_node] + initial.v[x0_node])) / dt;
    let mut exceedance = None;
    loop {
        let m = state.max_combined();
        if m > initial_max + tolerance {
            exceedance = Some((state.t, m - initial_max));
            break;
        }
        if state.t >= spec.horizon {
            break;
        }
        state = pde_step(&state, &grid, kind, &spec.params, dt)?;
    }
    Ok(GeyserReport {
        x0_node,
        x0: grid.x(x0_node),
        initial_max,
        predicted_rate,
        measured_rate,
        exceedance,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{Preset, ScenarioSpec, SchemeKind};

    fn cavity_spec(n: usize) -> ScenarioSpec {
        let mut spec = ScenarioSpec::preset(SchemeKind::OneD, Preset::Cavity21, n);
        spec.params = PhysicalParams::new(1.0, 1.0, 1.0);
        spec.horizon = 0.1;
        spec.snapshot_times = vec![0.1];
        spec
    }

    #[test]
    fn zero_rolling_layer_is_stationary_under_both_models() {
        let grid = Grid1D::new(10);
        let u = vec![0.0, 0.02, 0.05, 0.08, 0.1, 0.11, 0.1, 0.07, 0.04, 0.02, 0.0];
        let state = LayerState::new(u.clone(), vec![0.0; 11], 0.0);
        for kind in [
            PdeModelKind::OriginalDiffusive,
            PdeModelKind::ModifiedConvective,
        ] {
            let next = pde_step(&state, &grid, kind, &PhysicalParams::default(), 1e-3).unwrap();
            assert_eq!(next.u, u);
            assert!(next.v.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn original_model_raises_the_cavity_bottom_on_the_first_step() {
        let spec = cavity_spec(200);
        let grid = Grid1D::new(200);
        let s0 = spec.initial_state_1d(&grid).unwrap();
        let dt = default_dt(PdeModelKind::OriginalDiffusive, &spec.params, grid.dx());
        let s1 = pde_step(
            &s0,
            &grid,
            PdeModelKind::OriginalDiffusive,
            &spec.params,
            dt,
        )
        .unwrap();
        let i = 100; // x_o = 0.5
        assert!(s1.u[i] + s1.v[i] > s0.u[i] + s0.v[i]);
    }

    #[test]
    fn geyser_probe_matches_the_analytic_rate_on_cavity21() {
        let report = geyser_probe(&cavity_spec(200), PdeModelKind::OriginalDiffusive).unwrap();
        assert_eq!(report.x0_node, 100);
        // Analytic: beta * v0(x_o) * u0'' = 1 * 0.71 * 2.
        assert!((report.predicted_rate - 1.42).abs() < 1e-6);
        let rel = (report.measured_rate - report.predicted_rate).abs() / report.predicted_rate;
        assert!(rel < 0.1, "relative error {rel}");
        let (t, mag) = report.exceedance.expect("geyser expected");
        assert!(t <= 0.1);
        assert!(mag > 0.0);
    }

    #[test]
    fn modified_model_reports_no_geyser_on_cavity21() {
        let report = geyser_probe(&cavity_spec(200), PdeModelKind::ModifiedConvective).unwrap();
        assert!(
            report.exceedance.is_none(),
            "unexpected exceedance {:?}",
            report.exceedance
        );
    }

    #[test]
    fn beta_zero_reports_no_geyser_under_either_model() {
        let mut spec = cavity_spec(100);
        spec.params = PhysicalParams::new(1.0, 0.0, 1.0);
        for kind in [
            PdeModelKind::OriginalDiffusive,
            PdeModelKind::ModifiedConvective,
        ] {
            let report = geyser_probe(&spec, kind).unwrap();
            assert_eq!(report.predicted_rate, 0.0);
            assert!(report.exceedance.is_none());
        }
    }
}
