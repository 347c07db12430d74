//! Unfolding formulas for the rectangle and the triangle.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::geometry::Vec2;
use crate::hollows::triangle_depth;

/// Relative half-width of the band around a parity boundary.
pub const DEGENERATE_BAND: f64 = 1e-9;

fn check_band(value: f64, what: &str) -> Result<()> {
    if (value - value.round()).abs() < DEGENERATE_BAND * value.abs().max(1.0) {
        return Err(Error::Degenerate(format!("{what} = {value} sits on an integer")));
    }
    Ok(())
}

/// Mirror images of the rectangle side walls crossed by the unfolded path.
fn rect_crossings(xi: f64, phi: f64, eps: f64) -> Result<f64> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(domain(format!("xi must lie in (0, 1), got {xi}")));
    }
    if !(phi != 0.0 && phi.abs() < FRAC_PI_2) {
        return Err(domain(format!("phi must satisfy 0 < |phi| < π/2, got {phi}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    // phi > 0 drifts toward xi = 0, so measure from the far wall
    let start = if phi < 0.0 { xi } else { 1.0 - xi };
    let s = start + 2.0 / eps * phi.abs().tan();
    check_band(s, "unfolded exit")?;
    Ok(s.floor())
}

/// `+1` when the rectangle of depth `1/eps` returns `(xi, phi)` with
/// `phi_plus = phi`, `-1` when `phi_plus = -phi`.
pub fn rect_parity(xi: f64, phi: f64, eps: f64) -> Result<i8> {
    let k = rect_crossings(xi, phi, eps)?;
    Ok(if k % 2.0 == 1.0 { 1 } else { -1 })
}

/// Reflection count in the rectangle: the side-wall crossings plus the bottom.
pub fn rect_reflections(xi: f64, phi: f64, eps: f64) -> Result<u64> {
    Ok(rect_crossings(xi, phi, eps)? as u64 + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TriUnfold {
    /// Number of reflections.
    pub n: u64,
    /// `+1` for an odd count (retro branch), `-1` for an even one.
    pub sign: i8,
    /// Exit position on the circumscribed circle, clockwise from `B`.
    pub x_plus: f64,
    /// Exit angle in the original hollow.
    pub phi_plus: f64,
}

/// Unfolds a chord of the circle circumscribed about the triangle with apex
/// angle `eps`. `x ∈ [0, eps]` is the entry position clockwise from `B`,
/// `phi_c` the angle from the inward radius to the velocity.
pub fn tri_unfold(x: f64, phi_c: f64, eps: f64) -> Result<TriUnfold> {
    if !(eps > 0.0 && eps < FRAC_PI_2) {
        return Err(domain(format!("eps must lie in (0, π/2), got {eps}")));
    }
    if !(-1e-12..=eps + 1e-12).contains(&x) {
        return Err(domain(format!("x must lie in [0, {eps}], got {x}")));
    }
    if !(phi_c.abs() < FRAC_PI_2) {
        return Err(domain(format!("phi_c must lie in (-π/2, π/2), got {phi_c}")));
    }
    let x_plus = x + PI - 2.0 * phi_c;
    // negative phi_c runs the chord counterclockwise
    let signed = if phi_c >= 0.0 { x_plus } else { x_plus - 2.0 * PI };
    check_band(signed / eps, "exit image")?;
    let k = (signed / eps).floor();
    let n = k.abs() as u64;
    let theta_b = -FRAC_PI_2 + 0.5 * eps;
    let u = theta_b - x + PI + phi_c;
    let normal = theta_b - (k + 0.5) * eps;
    let psi = wrap_pi(u - normal);
    let odd = n % 2 == 1;
    Ok(TriUnfold { n, sign: if odd { 1 } else { -1 }, x_plus, phi_plus: if odd { -psi } else { psi } })
}

fn wrap_pi(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Chart `(xi, phi) ↦ (x, phi_c)` from the opening of the triangle to its
/// circumscribed circle.
pub fn triangle_chart(xi: f64, phi: f64, eps: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0 && eps < FRAC_PI_2) {
        return Err(domain(format!("eps must lie in (0, π/2), got {eps}")));
    }
    if !((0.0..=1.0).contains(&xi) && phi.abs() < FRAC_PI_2) {
        return Err(domain(format!("incidence ({xi}, {phi}) outside the opening chart")));
    }
    let o = Vec2::new(0.0, triangle_depth(eps));
    let radius = 0.5 / (0.5 * eps).sin();
    let d = Vec2::new(xi - 0.5, 0.0) - o;
    let v = Vec2::new(-phi.sin(), phi.cos());
    let b = d.dot(v);
    let c = (d.norm() - radius) * (d.norm() + radius);
    let t = b + (b * b - c).sqrt();
    let rx = d - v * t;
    let theta_b = -FRAC_PI_2 + 0.5 * eps;
    let x = (theta_b - rx.y.atan2(rx.x)).clamp(0.0, eps);
    let inward = -rx;
    let phi_c = inward.cross(v).atan2(inward.dot(v));
    Ok((x, phi_c))
}

/// `|phi - phi_c| ≤ eps/2`.
pub fn tri_angle_bound_holds(phi: f64, phi_c: f64, eps: f64) -> bool {
    (phi - phi_c).abs() <= 0.5 * eps + 1e-12
}
