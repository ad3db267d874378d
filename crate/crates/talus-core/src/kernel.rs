//! Shared directional update kernel.
//!
//! Both the 1-D and the 2-D scheme express a node update in terms of the
//! descent of each axis direction away from the node: `descent > 0` means the
//! surface falls in that direction. Directions are ordered x-, x+, y-, y+;
//! unavailable directions (past a domain edge, or the y pair in 1-D) carry
//! `ABSENT`. Keeping one kernel guarantees that a y-invariant 2-D field
//! reproduces the 1-D arithmetic bit for bit.

pub(crate) const ABSENT: f64 = f64::NEG_INFINITY;

/// Descents of the four axis directions at one node.
pub(crate) type Descents = [f64; 4];

pub(crate) fn descents_1d(left: f64, right: f64) -> Descents {
    [left, -right, ABSENT, ABSENT]
}

/// Steepest strictly positive descent, if any.
pub(crate) fn steepest(d: &Descents) -> Option<f64> {
    let mut m = 0.0;
    for &x in d {
        if x > m {
            m = x;
        }
    }
    if m > 0.0 {
        Some(m)
    } else {
        None
    }
}

/// Fraction of the node's rolling matter routed into direction `dir`: the
/// steepest strictly descending direction(s) share the whole unit weight.
/// A node with no strictly descending direction gates with 1 (the weight is
/// only ever multiplied by a vanishing uphill slope in that case).
pub(crate) fn split_weight(d: &Descents, dir: usize) -> f64 {
    match steepest(d) {
        None => 1.0,
        Some(m) => {
            if d[dir] == m {
                let ties = d.iter().filter(|&&x| x == m).count();
                1.0 / ties as f64
            } else {
                0.0
            }
        }
    }
}

/// Standing-layer increment at one node.
///
/// With at least one strictly descending direction the deposit is governed by
/// the steepest descent `m`: the split weights over the tied directions sum
/// to one and every tied term carries the same factor `(alpha - m)`, so the
/// increment collapses to `gamma * dt * (alpha - m) * v`. With no descending
/// direction the whole rolling layer converts on the spot.
pub(crate) fn deposit(d: &Descents, v: f64, alpha: f64, gamma_dt: f64) -> f64 {
    match steepest(d) {
        None => v,
        Some(m) => gamma_dt * (alpha - m) * v,
    }
}

/// Per-axis contribution to the rolling-layer flux.
pub(crate) enum AxisFlux {
    /// Slopes fall on both sides: no influx, all prior matter departs.
    Peak,
    Influx(f64),
}

/// Flux along one axis from the one-sided slopes of the updated standing
/// layer (`l`, `r`; `None` past a domain edge), the matching one-sided slopes
/// of the intermediate rolling field (`vl`, `vr`), and the uphill neighbors'
/// split weights toward this node (`gate_minus` for the left neighbor's
/// rightward share, `gate_plus` for the right neighbor's leftward share).
pub(crate) fn axis_flux(
    l: Option<f64>,
    r: Option<f64>,
    vl: f64,
    vr: f64,
    gate_minus: f64,
    gate_plus: f64,
) -> AxisFlux {
    match (l, r) {
        (Some(l), Some(r)) => {
            if l > 0.0 && r < 0.0 {
                AxisFlux::Peak
            } else if l < 0.0 && r > 0.0 {
                // Cavity: influx down both rising sides.
                AxisFlux::Influx(gate_plus * r * vr + gate_minus * l * vl)
            } else if l >= 0.0 && r >= 0.0 {
                // Rising to the right: influx gated by the right neighbor.
                AxisFlux::Influx(gate_plus * r * vr)
            } else {
                // Rising to the left.
                AxisFlux::Influx(gate_minus * l * vl)
            }
        }
        // Edge nodes: only the influx term whose neighbor exists survives.
        (None, Some(r)) => AxisFlux::Influx(if r >= 0.0 { gate_plus * r * vr } else { 0.0 }),
        (Some(l), None) => AxisFlux::Influx(if l <= 0.0 { gate_minus * l * vl } else { 0.0 }),
        (None, None) => AxisFlux::Influx(0.0),
    }
}
