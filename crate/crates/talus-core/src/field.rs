//! Node-valued layer fields and one-sided slope computation.
//!
//! The one-sided difference quotients defined here are the single source of
//! truth for every scheme: a slope is always `(u[i] - u[i-1]) / dx` on the
//! left and `(u[i+1] - u[i]) / dx` on the right of node `i`.

use crate::error::{Error, Result};
use crate::grid::{Grid1D, Grid2D};

/// Standing layer `u` and rolling layer `v` at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl LayerState {
    pub fn new(u: Vec<f64>, v: Vec<f64>, t: f64) -> Self {
        assert_eq!(u.len(), v.len(), "layer arrays must have equal length");
        LayerState { u, v, t }
    }

    pub fn zero(grid: &Grid1D) -> Self {
        LayerState {
            u: vec![0.0; grid.nodes()],
            v: vec![0.0; grid.nodes()],
            t: 0.0,
        }
    }

    pub fn nodes(&self) -> usize {
        self.u.len()
    }

    pub fn max_combined(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(u, v)| u + v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the node maximizing `u + v` (first on ties).
    pub fn argmax_combined(&self) -> usize {
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, (u, v)) in self.u.iter().zip(&self.v).enumerate() {
            let s = u + v;
            if s > best_val {
                best_val = s;
                best = i;
            }
        }
        best
    }
}

/// One-sided slopes of `u` at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopePair {
    /// `(u[i] - u[i-1]) / dx`
    pub left: f64,
    /// `(u[i+1] - u[i]) / dx`
    pub right: f64,
}

/// One-sided difference quotients of the standing layer at interior node `i`.
pub fn slopes_at(state: &LayerState, grid: &Grid1D, i: usize) -> Result<SlopePair> {
    if i == 0 || i >= grid.intervals() {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: grid.intervals(),
        });
    }
    Ok(slopes_of(&state.u, grid.dx(), i))
}

/// Same quotients for an arbitrary node array; callers guarantee `0 < i < len-1`.
pub(crate) fn slopes_of(values: &[f64], dx: f64, i: usize) -> SlopePair {
    SlopePair {
        left: (values[i] - values[i - 1]) / dx,
        right: (values[i + 1] - values[i]) / dx,
    }
}

/// Piecewise-linear evaluation of both layers at coordinate `x`.
pub fn piecewise_linear_eval(state: &LayerState, grid: &Grid1D, x: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::CoordinateOutOfDomain { x });
    }
    Ok((pl_eval(&state.u, grid, x), pl_eval(&state.v, grid, x)))
}

pub(crate) fn pl_eval(values: &[f64], grid: &Grid1D, x: f64) -> f64 {
    let n = grid.intervals();
    let s = x * n as f64;
    let i = (s.floor() as usize).min(n - 1);
    let w = s - i as f64;
    if w == 0.0 {
        values[i]
    } else {
        values[i] + w * (values[i + 1] - values[i])
    }
}

/// Standing and rolling layers on the unit square, stored row-major with
/// index `k * (n + 1) + i` for node `(x_i, y_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerState2D {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
    nodes_per_axis: usize,
}

impl LayerState2D {
    pub fn new(grid: &Grid2D, u: Vec<f64>, v: Vec<f64>, t: f64) -> Self {
        let nodes = grid.nodes() * grid.nodes();
        assert_eq!(u.len(), nodes);
        assert_eq!(v.len(), nodes);
        LayerState2D {
            u,
            v,
            t,
            nodes_per_axis: grid.nodes(),
        }
    }

    pub fn zero(grid: &Grid2D) -> Self {
        let nodes = grid.nodes() * grid.nodes();
        LayerState2D {
            u: vec![0.0; nodes],
            v: vec![0.0; nodes],
            t: 0.0,
            nodes_per_axis: grid.nodes(),
        }
    }

    pub fn idx(&self, i: usize, k: usize) -> usize {
        k * self.nodes_per_axis + i
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn max_combined(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(u, v)| u + v)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Four one-sided slopes at a 2-D node, canonicalized to the 1-D convention
/// per axis: `x_left = (u[i,k] - u[i-1,k]) / dx` and so on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalSlopes {
    pub x_left: f64,
    pub x_right: f64,
    pub y_left: f64,
    pub y_right: f64,
}

/// Directional one-sided slopes at node `(i, k)`; both indices interior.
pub fn directional_slopes(
    state: &LayerState2D,
    grid: &Grid2D,
    i: usize,
    k: usize,
) -> Result<DirectionalSlopes> {
    let n = grid.intervals();
    if i == 0 || i >= n || k == 0 || k >= n {
        return Err(Error::IndexOutOfRange {
            index: k * (n + 1) + i,
            n,
        });
    }
    let dx = grid.dx();
    let c = state.idx(i, k);
    Ok(DirectionalSlopes {
        x_left: (state.u[c] - state.u[state.idx(i - 1, k)]) / dx,
        x_right: (state.u[state.idx(i + 1, k)] - state.u[c]) / dx,
        y_left: (state.u[c] - state.u[state.idx(i, k - 1)]) / dx,
        y_right: (state.u[state.idx(i, k + 1)] - state.u[c]) / dx,
    })
}

/// Bilinear interpolation of `(u, v)` at `(x, y)`; export-only, never used
/// inside the schemes.
pub fn bilinear_eval(state: &LayerState2D, grid: &Grid2D, x: f64, y: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::CoordinateOutOfDomain { x });
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::CoordinateOutOfDomain { x: y });
    }
    let n = grid.intervals();
    let sx = x * n as f64;
    let sy = y * n as f64;
    let i = (sx.floor() as usize).min(n - 1);
    let k = (sy.floor() as usize).min(n - 1);
    let wx = sx - i as f64;
    let wy = sy - k as f64;
    let lerp2 = |f: &[f64]| {
        let f00 = f[state.idx(i, k)];
        let f10 = f[state.idx(i + 1, k)];
        let f01 = f[state.idx(i, k + 1)];
        let f11 = f[state.idx(i + 1, k + 1)];
        let a = f00 + wx * (f10 - f00);
        let b = f01 + wx * (f11 - f01);
        a + wy * (b - a)
    };
    Ok((lerp2(&state.u), lerp2(&state.v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slopes_match_difference_quotients() {
        // u = [0, 0.1, 0.2, 0], n = 3, node 1: both quotients are 0.3.
        let grid = Grid1D::new(3);
        let state = LayerState::new(vec![0.0, 0.1, 0.2, 0.0], vec![0.0; 4], 0.0);
        let s = slopes_at(&state, &grid, 1).unwrap();
        assert!((s.left - 0.3).abs() < 1e-15);
        assert!((s.right - 0.3).abs() < 1e-15);

        let s2 = slopes_at(&state, &grid, 2).unwrap();
        assert!((s2.right - (-0.6)).abs() < 1e-15);
    }

    #[test]
    fn flat_profile_has_zero_slopes() {
        let grid = Grid1D::new(4);
        let state = LayerState::zero(&grid);
        for i in grid.interior() {
            let s = slopes_at(&state, &grid, i).unwrap();
            assert_eq!(s.left, 0.0);
            assert_eq!(s.right, 0.0);
        }
    }

    #[test]
    fn tent_slopes() {
        // u = [0, 0.5, 0], n = 2, node 1 -> (1.0, -1.0).
        let grid = Grid1D::new(2);
        let state = LayerState::new(vec![0.0, 0.5, 0.0], vec![0.0; 3], 0.0);
        let s = slopes_at(&state, &grid, 1).unwrap();
        assert_eq!(s.left, 1.0);
        assert_eq!(s.right, -1.0);
    }

    #[test]
    fn slope_rejects_boundary_indices() {
        let grid = Grid1D::new(3);
        let state = LayerState::zero(&grid);
        assert!(slopes_at(&state, &grid, 0).is_err());
        assert!(slopes_at(&state, &grid, 3).is_err());
    }

    #[test]
    fn slopes_reconstruct_neighbors_exactly() {
        let grid = Grid1D::new(5);
        let u = vec![0.0, 0.13, 0.31, 0.22, 0.05, 0.0];
        let state = LayerState::new(u.clone(), vec![0.0; 6], 0.0);
        for i in grid.interior() {
            let s = slopes_at(&state, &grid, i).unwrap();
            // dx = 1/5 is not exact in binary, so reconstruction is checked
            // through the same quotient rather than u[i] +/- s*dx.
            assert_eq!(s.left, (u[i] - u[i - 1]) / grid.dx());
            assert_eq!(s.right, (u[i + 1] - u[i]) / grid.dx());
        }
    }

    #[test]
    fn piecewise_linear_midpoints_and_nodes() {
        let grid = Grid1D::new(2);
        let state = LayerState::new(vec![0.0, 1.0, 0.0], vec![0.0; 3], 0.0);
        assert_eq!(piecewise_linear_eval(&state, &grid, 0.25).unwrap().0, 0.5);
        assert_eq!(piecewise_linear_eval(&state, &grid, 0.75).unwrap().0, 0.5);
        assert_eq!(piecewise_linear_eval(&state, &grid, 0.5).unwrap().0, 1.0);
        assert_eq!(piecewise_linear_eval(&state, &grid, 1.0).unwrap().0, 0.0);
        assert!(piecewise_linear_eval(&state, &grid, 1.2).is_err());
        assert!(piecewise_linear_eval(&state, &grid, -0.1).is_err());
    }

    #[test]
    fn directional_slopes_of_raised_node() {
        // Single raised node of height h: all four quotient magnitudes are h*n.
        let grid = Grid2D::new(4);
        let mut state = LayerState2D::zero(&grid);
        let c = state.idx(2, 2);
        state.u[c] = 0.2;
        let s = directional_slopes(&state, &grid, 2, 2).unwrap();
        assert_eq!(s.x_left, 0.8);
        assert_eq!(s.x_right, -0.8);
        assert_eq!(s.y_left, 0.8);
        assert_eq!(s.y_right, -0.8);
        assert!(directional_slopes(&state, &grid, 0, 2).is_err());
        assert!(directional_slopes(&state, &grid, 2, 4).is_err());
    }

    #[test]
    fn bilinear_is_exact_at_nodes() {
        let grid = Grid2D::new(3);
        let mut state = LayerState2D::zero(&grid);
        for k in 0..4 {
            for i in 0..4 {
                let idx = state.idx(i, k);
                state.u[idx] = (i * 7 + k) as f64 * 0.01;
            }
        }
        for k in 0..4 {
            for i in 0..4 {
                let (u, _) = bilinear_eval(&state, &grid, grid.x(i), grid.x(k)).unwrap();
                assert!((u - state.u[state.idx(i, k)]).abs() < 1e-15);
            }
        }
    }
}
