//! Symbolic dynamics of the reduced notched angle.
//!
//! Points on a side of the right angle are identified with their distance
//! `x` to the apex (side length 1) and with the log coordinate
//! `z = -ln(x)/δ`. Step `n` of the staircase spans `z ∈ [n, n + 1]`; `ζ` is
//! the position inside it.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::error::{domain, Error, Result};

fn check_params(lam: f64, delta: f64) -> Result<()> {
    if !(lam > 0.0 && lam < 1.0) {
        return Err(domain(format!("lambda must lie in (0, 1), got {lam}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain(format!("delta must be positive, got {delta}")));
    }
    Ok(())
}

/// `ζ(z) = (1 - e^{-δz}) / (1 - e^{-δ})`.
pub fn zeta(z: f64, delta: f64) -> f64 {
    (-delta * z).exp_m1() / (-delta).exp_m1()
}

/// `ζ⁻¹(w) = -ln(1 - w (1 - e^{-δ})) / δ`.
pub fn zeta_inv(w: f64, delta: f64) -> f64 {
    -(w * (-delta).exp_m1()).ln_1p() / delta
}

/// `f_δ(z̃) = ζ⁻¹(λ ζ(z̃))` on `[0, 1)`.
pub fn f_delta(z: f64, lam: f64, delta: f64) -> f64 {
    zeta_inv(lam * zeta(z, delta), delta)
}

/// `f_δ⁻¹(z) = ζ⁻¹(ζ(z) / λ)`; `None` outside the range of `f_δ`.
pub fn f_delta_inv(z: f64, lam: f64, delta: f64) -> Option<f64> {
    let w = zeta(z, delta) / lam;
    (w < 1.0).then(|| zeta_inv(w, delta))
}

/// `(1/δ) ln(1/λ)`, the shift in `z` between the two sides.
pub fn side_shift(lam: f64, delta: f64) -> f64 {
    -lam.ln() / delta
}

/// One forward step `z̃ ↦ f_δ⁻¹(z̃ + (1/δ) ln(1/λ) mod 1)` on the circle.
/// `None` when the particle turns back instead.
pub fn notched_step_map(z_tilde: f64, lam: f64, delta: f64) -> Result<Option<f64>> {
    check_params(lam, delta)?;
    let z = (z_tilde + side_shift(lam, delta)).rem_euclid(1.0);
    Ok(f_delta_inv(z, lam, delta))
}

/// Transition time for `z̃₀` on the circle.
pub fn transition_time(z0_tilde: f64, lam: f64, delta: f64, max_steps: u64) -> Result<u64> {
    let mut z = z0_tilde;
    for k in 1..=max_steps {
        match notched_step_map(z, lam, delta)? {
            Some(next) => z = next,
            None => return Ok(k),
        }
    }
    Err(Error::CapExceeded(max_steps))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NotchedStep {
    pub z: f64,
    pub z_tilde: f64,
    pub zeta: f64,
    pub zeta_tilde: f64,
    pub n: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NotchedDynamics {
    pub z0_tilde: f64,
    pub lam: f64,
    pub delta: f64,
    pub trace: Vec<NotchedStep>,
    /// Final crossing coordinate, negative on exit.
    pub z_exit: Option<f64>,
    pub m: Option<u64>,
    pub k_delta: Option<u64>,
}

impl NotchedDynamics {
    pub fn new(z0_tilde: f64, lam: f64, delta: f64) -> Result<Self> {
        check_params(lam, delta)?;
        let lo = -side_shift(lam, delta);
        if !(z0_tilde > lo && z0_tilde < 0.0) {
            return Err(domain(format!("initial coordinate must lie in ({lo}, 0), got {z0_tilde}")));
        }
        Ok(Self { z0_tilde, lam, delta, trace: Vec::new(), z_exit: None, m: None, k_delta: None })
    }

    /// Deepest staircase step reached.
    pub fn max_step(&self) -> Option<i64> {
        self.trace.iter().map(|s| s.n).max()
    }

    /// Distance to the nearest input where the path meets a corner of the
    /// staircase or an end of the opening.
    pub fn min_boundary_gap(&self) -> f64 {
        let shift = side_shift(self.lam, self.delta);
        let ends = |z: f64| z.abs().min((z + shift).abs());
        let mut gap = ends(self.z0_tilde);
        for (k, s) in self.trace.iter().enumerate() {
            gap = gap.min(s.zeta).min(1.0 - s.zeta);
            if self.k_delta.is_none_or(|kd| k as u64 + 1 <= kd) {
                gap = gap.min((s.zeta - self.lam).abs());
            }
        }
        if let Some(z) = self.z_exit {
            gap = gap.min(ends(z));
        }
        gap
    }
}

/// Runs the forward phase, the transition and the backward phase until the
/// particle leaves the angle. Returns the exit time `m` and the transition
/// time `k_δ`.
pub fn notched_run(nd: &mut NotchedDynamics, max_steps: u64) -> Result<(u64, u64)> {
    let (lam, delta) = (nd.lam, nd.delta);
    let shift = side_shift(lam, delta);
    nd.trace.clear();
    let mut z = nd.z0_tilde + shift;
    let mut k_delta = None;
    for k in 1..=max_steps {
        if k_delta.is_some() && z < 0.0 {
            nd.z_exit = Some(z);
            nd.m = Some(k);
            nd.k_delta = k_delta;
            return Ok((k, k_delta.unwrap_or(0)));
        }
        let n = z.floor();
        let zeta_k = zeta(z - n, delta);
        let (zeta_t, forward) = match k_delta {
            None if zeta_k < lam => (zeta_k / lam, true),
            None => {
                k_delta = Some(k);
                (1.0 + lam - zeta_k, false)
            }
            Some(_) => (lam * zeta_k, false),
        };
        let z_tilde = n + zeta_inv(zeta_t, delta);
        nd.trace.push(NotchedStep { z, z_tilde, zeta: zeta_k, zeta_tilde: zeta_t, n: n as i64 });
        z = if forward { z_tilde + shift } else { z_tilde - shift };
    }
    Err(Error::CapExceeded(max_steps))
}

/// `P_λ(k) = λ^{k-1} (1 - λ)`.
pub fn geometric_pmf(lam: f64, k: u64) -> Result<f64> {
    if !(lam > 0.0 && lam < 1.0) {
        return Err(domain(format!("lambda must lie in (0, 1), got {lam}")));
    }
    if k == 0 {
        return Err(domain("k must be at least 1"));
    }
    Ok(lam.powi(k as i32 - 1) * (1.0 - lam))
}

/// Change of variables from an incidence in a steep quadrant
/// `π/4 < |φ| < π/2` to `(λ, x̃₀)`. For `φ > 0` the mirror image is used.
pub fn incidence_to_lambda(xi: f64, phi: f64) -> Result<(f64, f64)> {
    if !(phi.abs() > FRAC_PI_4 && phi.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(domain(format!("phi must satisfy π/4 < |phi| < π/2, got {phi}")));
    }
    if !(0.0..=1.0).contains(&xi) {
        return Err(domain(format!("xi must lie in [0, 1], got {xi}")));
    }
    let lam = (phi.abs() - FRAC_PI_4).tan();
    let s = if phi < 0.0 { xi } else { 1.0 - xi };
    Ok((lam, 1.0 + s * (1.0 - lam) / lam))
}

/// Inverse of [`incidence_to_lambda`]; `sign` is the sign of `φ`.
pub fn lambda_to_incidence(lam: f64, x0_tilde: f64, sign: f64) -> Result<(f64, f64)> {
    if !(lam > 0.0 && lam < 1.0) {
        return Err(domain(format!("lambda must lie in (0, 1), got {lam}")));
    }
    if !(x0_tilde >= 1.0 && x0_tilde <= 1.0 / lam) {
        return Err(domain(format!("x0 must lie in [1, 1/lambda], got {x0_tilde}")));
    }
    let s = lam / (1.0 - lam) * (x0_tilde - 1.0);
    let mag = FRAC_PI_4 + lam.atan();
    Ok(if sign < 0.0 { (s, -mag) } else { (1.0 - s, mag) })
}

/// Density of the incidence measure in the `(λ, x̃₀)` chart.
pub fn lambda_density(lam: f64) -> f64 {
    lam / (2.0 * 2f64.sqrt() * (1.0 + lam * lam).powf(1.5))
}

/// Total variation distance between an empirical law on `{1, 2, …}` and
/// `P_λ`.
pub fn tv_to_geometric(counts: &[u64], lam: f64) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyMeasure);
    }
    let mut tv = 0.0;
    let mut mass = 0.0;
    for (i, &c) in counts.iter().enumerate() {
        let p = geometric_pmf(lam, i as u64 + 1)?;
        mass += p;
        tv += (c as f64 / total as f64 - p).abs();
    }
    Ok(0.5 * (tv + (1.0 - mass)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn f_delta_near_linear() {
        assert!((f_delta(0.6, 0.5, 1e-4) - 0.3).abs() < 1e-3);
        let sup = (0..=1000).map(|i| i as f64 / 1000.0).map(|z| (f_delta(z, 0.5, 1e-2) - 0.5 * z).abs()).fold(0.0, f64::max);
        let sup_small = (0..=1000).map(|i| i as f64 / 1000.0).map(|z| (f_delta(z, 0.5, 1e-4) - 0.5 * z).abs()).fold(0.0, f64::max);
        assert!(sup_small < sup / 50.0);
    }

    #[test]
    fn zeta_endpoints() {
        for d in [1e-6, 1e-3, 0.1, 2.0] {
            assert_abs_diff_eq!(zeta(0.0, d), 0.0);
            assert_abs_diff_eq!(zeta(1.0, d), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn geometric_examples() {
        assert_eq!(geometric_pmf(0.5, 1).unwrap(), 0.5);
        assert_eq!(geometric_pmf(0.5, 3).unwrap(), 0.125);
        let s: f64 = (1..=20).map(|k| geometric_pmf(0.5, k).unwrap()).sum();
        assert_abs_diff_eq!(s, 1.0 - 2f64.powi(-20), epsilon = 1e-15);
        assert!(geometric_pmf(1.0, 1).is_err());
        assert!(geometric_pmf(0.5, 0).is_err());
    }

    #[test]
    fn geometric_tail_identity() {
        for i in 1..=9 {
            let lam = i as f64 / 10.0;
            let mut s = 0.0;
            for k in 1..=50u64 {
                s += geometric_pmf(lam, k).unwrap();
                assert!((1.0 - s - lam.powi(k as i32)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn lambda_chart() {
        let (lam, _) = incidence_to_lambda(0.3, -(FRAC_PI_4 + 0.5f64.atan())).unwrap();
        assert_abs_diff_eq!(lam, 0.5, epsilon = 1e-15);
        assert!(incidence_to_lambda(0.3, -FRAC_PI_4).is_err());
        assert!(incidence_to_lambda(0.3, FRAC_PI_4).is_err());
        assert!(incidence_to_lambda(0.3, 0.2).is_err());
    }

    #[test]
    fn lambda_chart_round_trip() {
        let mut checked = 0;
        for i in 0.. {
            let s = crate::measures::incidence_at(3, i);
            if s.phi.abs() <= FRAC_PI_4 {
                continue;
            }
            let (lam, x0) = incidence_to_lambda(s.xi, s.phi).unwrap();
            let (xi, phi) = lambda_to_incidence(lam, x0, s.phi.signum()).unwrap();
            assert!((xi - s.xi).abs() < 1e-12 && (phi - s.phi).abs() < 1e-12, "{s:?} {xi} {phi}");
            checked += 1;
            if checked == 10_000 {
                break;
            }
        }
    }

    #[test]
    fn lambda_density_is_jacobian() {
        // ½ cos φ |∂(ξ, φ)/∂(λ, x̃₀)|
        for lam in [0.1, 0.37, 0.5, 0.9] {
            let phi = FRAC_PI_4 + f64::atan(lam);
            let jac = lam / ((1.0 - lam) * (1.0 + lam * lam));
            assert_abs_diff_eq!(0.5 * phi.cos() * jac, lambda_density(lam), epsilon = 1e-15);
        }
    }

    #[test]
    fn run_exits_with_even_m_for_central_start() {
        let (lam, delta) = (0.5, 1e-2);
        let mut nd = NotchedDynamics::new(-0.5 * side_shift(lam, delta), lam, delta).unwrap();
        let (m, kd) = notched_run(&mut nd, 10_000).unwrap();
        assert_eq!(m, 2 * kd);
        assert_eq!(nd.trace.len() as u64, m - 1);
        assert!(nd.trace.iter().all(|s| s.z > 0.0 && s.zeta > 0.0 && s.zeta < 1.0));
        assert!(nd.z_exit.unwrap() < 0.0 && nd.z_exit.unwrap() > -side_shift(lam, delta));
    }

    #[test]
    fn run_agrees_with_circle_transition_time() {
        let (lam, delta) = (0.5, 1e-2);
        let shift = side_shift(lam, delta);
        for i in 1..200 {
            let z0 = -shift * i as f64 / 200.0;
            let mut nd = NotchedDynamics::new(z0, lam, delta).unwrap();
            let (_, kd) = notched_run(&mut nd, 10_000).unwrap();
            assert_eq!(kd, transition_time(z0.rem_euclid(1.0), lam, delta, 10_000).unwrap());
        }
    }

    #[test]
    fn invalid_start() {
        assert!(NotchedDynamics::new(0.1, 0.5, 1e-2).is_err());
        assert!(NotchedDynamics::new(-100.0, 0.5, 1e-2).is_err());
        assert!(NotchedDynamics::new(-1.0, 1.5, 1e-2).is_err());
    }

    proptest! {
        #[test]
        fn zeta_is_increasing(a in 0.0..1.0f64, b in 0.0..1.0f64, d in 1e-5..3.0f64) {
            prop_assume!(a < b);
            prop_assert!(zeta(a, d) < zeta(b, d));
            prop_assert!((zeta_inv(zeta(a, d), d) - a).abs() < 1e-9);
        }

        #[test]
        fn f_delta_inverse(z in 0.0..1.0f64, lam in 0.05..0.95f64, d in 1e-5..1.0f64) {
            let w = f_delta(z, lam, d);
            prop_assert!(w < z || z == 0.0);
            let back = f_delta_inv(w, lam, d).unwrap();
            prop_assert!((back - z).abs() < 1e-8);
        }
    }
}
