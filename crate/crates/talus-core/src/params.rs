/// Physical coefficients of the two-layer model.
///
/// `alpha` is the critical slope (angle of repose), `beta` the rolling
/// transport coefficient and `gamma` the conversion rate from the rolling
/// to the standing layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl PhysicalParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        assert!(alpha > 0.0, "alpha must be strictly positive");
        assert!(beta >= 0.0, "beta must be non-negative");
        assert!(gamma > 0.0, "gamma must be strictly positive");
        PhysicalParams { alpha, beta, gamma }
    }
}

impl Default for PhysicalParams {
    /// alpha = gamma = 1 as in the reproduction runs; beta = 0.5.
    fn default() -> Self {
        PhysicalParams {
            alpha: 1.0,
            beta: 0.5,
            gamma: 1.0,
        }
    }
}
