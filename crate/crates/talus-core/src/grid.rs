//! Uniform meshes on the unit interval and unit square.

/// Uniform mesh on [0, 1] with `n` equal intervals and `n + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n: usize,
    dx: f64,
}

impl Grid1D {
    /// `n` must be at least 2 so that interior nodes exist.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "grid needs at least 2 intervals, got {n}");
        Grid1D {
            n,
            dx: 1.0 / n as f64,
        }
    }

    pub fn intervals(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> usize {
        self.n + 1
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    /// Interior node indices `1..n`.
    pub fn interior(&self) -> std::ops::Range<usize> {
        1..self.n
    }
}

/// Uniform mesh on [0, 1] x [0, 1] with `n x n` square cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    n: usize,
    dx: f64,
}

impl Grid2D {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "grid needs at least 2 intervals per axis, got {n}");
        Grid2D {
            n,
            dx: 1.0 / n as f64,
        }
    }

    pub fn intervals(&self) -> usize {
        self.n
    }

    /// Nodes per axis.
    pub fn nodes(&self) -> usize {
        self.n + 1
    }

    /// Cell size, identical along both axes.
    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }
}
