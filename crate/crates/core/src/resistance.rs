//! Resistance functionals.
//!
//! Hollow-level quantities are per unit opening with the diffuse resistance
//! normalized to 1, so the elastic resistance generated by a scattering
//! measure is `2F`.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{entry_velocity, trace_hollow, IncidenceState, ScatterRecord, TraceLimits};
use crate::error::{config, domain, Error, Result};
use crate::geometry::{reflect, UnitVec, Vec2};
use crate::hollows::{BodyDecomposition, HollowGeometry};
use crate::measures::{functional_f, incidence_at, AngleMeasure, PATHOLOGY_LIMIT};

/// Infimum of `r` over two-dimensional bodies reported in the literature.
/// Kept for reference only; nothing here recomputes it.
pub const INF_R_2D_LITERATURE: f64 = 0.6585;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResistanceReport {
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub r: f64,
    pub dim: u32,
}

impl ResistanceReport {
    /// Builds `r = R/(2D)` and checks `D > 0`, `R ≤ 2D`, `0 ≤ r ≤ 1`.
    pub fn new(big_r: f64, d: f64, dim: u32) -> Result<Self> {
        if !(d > 0.0) {
            return Err(domain(format!("diffuse resistance must be positive, got {d}")));
        }
        let r = big_r / (2.0 * d);
        let slack = 1e-12;
        if !(big_r >= -slack && big_r <= 2.0 * d * (1.0 + slack)) {
            return Err(domain(format!("elastic resistance {big_r} outside [0, 2D] for D = {d}")));
        }
        Ok(Self { big_r, d, r: r.clamp(0.0, 1.0), dim })
    }

    /// Per unit opening of a hollow with scattering measure `eta`.
    pub fn from_scatter<M: AngleMeasure>(eta: &M) -> Result<Self> {
        Self::new(elastic_resistance_from_scatter(eta)?, 1.0, 2)
    }
}

/// `∫∫ (1 + cos(φ - φ⁺)) dη = 2 F(η)`.
pub fn elastic_resistance_from_scatter<M: AngleMeasure>(eta: &M) -> Result<f64> {
    Ok(2.0 * functional_f(eta)?)
}

/// `r = ⅔ c₀ + Σ cᵢ Fᵢ`.
pub fn r_of_body(decomp: &BodyDecomposition, f_values: &[f64]) -> Result<f64> {
    decomp.validate()?;
    if f_values.len() != decomp.parts.len() {
        return Err(config(format!("{} F values for {} hollows", f_values.len(), decomp.parts.len())));
    }
    if let Some(f) = f_values.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(domain(format!("F value {f} outside [0, 1]")));
    }
    Ok(2.0 / 3.0 * decomp.c0 + decomp.parts.iter().zip(f_values).map(|((c, _), f)| c * f).sum::<f64>())
}

fn check_dim(d: u32) -> Result<()> {
    if d < 2 {
        return Err(domain(format!("dimension must be at least 2, got {d}")));
    }
    Ok(())
}

/// `r = 2/(d+1)` for convex bodies in dimension `d`.
pub fn convex_r(d: u32) -> Result<Ratio<u64>> {
    check_dim(d)?;
    Ok(Ratio::new(2, d as u64 + 1))
}

/// `R/D = 4/(d+1)` for convex bodies in dimension `d`.
pub fn convex_rd_ratio(d: u32) -> Result<Ratio<u64>> {
    check_dim(d)?;
    Ok(Ratio::new(4, d as u64 + 1))
}

/// Resistance when a fraction `alpha` of particles is reflected diffusely.
pub fn maxwellian_resistance(big_r: f64, d: f64, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain(format!("accommodation coefficient must lie in [0, 1], got {alpha}")));
    }
    Ok(alpha * d + (1.0 - alpha) * big_r)
}

/// Traces `n` particles at fixed incidence `phi`, entering at uniform ξ.
pub fn trace_at_angle(h: &HollowGeometry, phi: f64, n: usize, seed: u64, lim: &TraceLimits) -> Result<Vec<ScatterRecord>> {
    IncidenceState::new(0.5, phi)?;
    if n == 0 {
        return Err(config("sample count must be positive"));
    }
    let lim = TraceLimits { record_path: false, ..*lim };
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            trace_hollow(h, IncidenceState { xi: rng.random(), phi }, &lim)
        })
        .collect())
}

/// Momentum transfer `|I| cos φ · E[v - v⁺]` of a flow at incidence `phi`,
/// as components along the opening and along the inward normal.
pub fn directional_resistance(h: &HollowGeometry, phi: f64, n: usize, seed: u64, lim: &TraceLimits) -> Result<Vec2> {
    let recs = trace_at_angle(h, phi, n, seed, lim)?;
    let bad = recs.iter().filter(|r| !r.is_ok()).count();
    let fraction = bad as f64 / n as f64;
    if fraction > PATHOLOGY_LIMIT {
        return Err(Error::RunFlagged { n_pathological: bad as u64, n_total: n as u64, fraction, limit: PATHOLOGY_LIMIT });
    }
    let nrm = h.opening_normal();
    let e_xi = h.xi_direction().as_vec();
    let inward = -nrm.as_vec();
    let v = entry_velocity(nrm, phi).as_vec();
    let mut acc = Vec2::ZERO;
    for r in recs.iter().filter(|r| r.is_ok()) {
        let vp = nrm.rotate(r.phi_plus).as_vec();
        acc = acc + (v - vp);
    }
    let mean = acc / (n - bad) as f64;
    let scale = h.opening_length() * phi.cos();
    Ok(Vec2::new(mean.dot(e_xi), mean.dot(inward)) * scale)
}

/// Monte Carlo estimate of `r` for a convex boundary: the mean of
/// `½(1 - ⟨v, v⁺⟩)` for specular reflection at incidence drawn from `½ cos φ`.
pub fn convex_r_monte_carlo(n: usize, seed: u64) -> f64 {
    let normal = UnitVec::Y;
    let sum: f64 = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let s = incidence_at(seed, i);
            let v = entry_velocity(normal, s.phi);
            0.5 * (1.0 - v.dot(reflect(v, normal)))
        })
        .sum();
    sum / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hollows::*;
    use crate::measures::{ReferenceMeasure, ScatterMeasure};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn elastic_resistance_of_reference_measures() {
        assert_abs_diff_eq!(elastic_resistance_from_scatter(&ReferenceMeasure::Retro).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(elastic_resistance_from_scatter(&ReferenceMeasure::Elastic).unwrap(), 4.0 / 3.0, epsilon = 1e-12);
        let atom = ScatterMeasure::from_pairs(&[(0.0, FRAC_PI_2)]).unwrap();
        assert_abs_diff_eq!(elastic_resistance_from_scatter(&atom).unwrap(), 1.0, epsilon = 1e-15);
        let rep = ResistanceReport::from_scatter(&ReferenceMeasure::Retro).unwrap();
        assert_abs_diff_eq!(rep.r, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn body_decomposition() {
        let d = BodyDecomposition::new(1.0, vec![]).unwrap();
        assert_abs_diff_eq!(r_of_body(&d, &[]).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        let d = BodyDecomposition::new(0.0, vec![(1.0, ShapeSpec::DoubleParabola)]).unwrap();
        assert_eq!(r_of_body(&d, &[1.0]).unwrap(), 1.0);
        let d = BodyDecomposition::new(0.5, vec![(0.5, ShapeSpec::Rectangle { eps: 0.01 })]).unwrap();
        assert_abs_diff_eq!(r_of_body(&d, &[5.0 / 6.0]).unwrap(), 0.75, epsilon = 1e-15);
        let bad = BodyDecomposition { c0: 0.5, parts: vec![(0.6, ShapeSpec::DoubleParabola)] };
        assert!(matches!(r_of_body(&bad, &[1.0]), Err(Error::Weight(_))));
    }

    #[test]
    fn body_tends_to_one() {
        for k in 1..=8 {
            let c0 = 10f64.powi(-k);
            let d = BodyDecomposition::new(c0, vec![(1.0 - c0, ShapeSpec::DoubleParabola)]).unwrap();
            let r = r_of_body(&d, &[1.0 - c0]).unwrap();
            assert!((r - 1.0).abs() < 2.0 * c0);
        }
    }

    #[test]
    fn convex_closed_forms() {
        assert_eq!(convex_r(2).unwrap(), Ratio::new(2, 3));
        assert_eq!(convex_r(3).unwrap(), Ratio::new(1, 2));
        assert_eq!(convex_r(4).unwrap(), Ratio::new(2, 5));
        assert_eq!(convex_rd_ratio(3).unwrap(), Ratio::from_integer(1));
        assert!(convex_r(1).is_err());
    }

    #[test]
    fn maxwellian_mix() {
        assert_eq!(maxwellian_resistance(4.0 / 3.0, 1.0, 0.0).unwrap(), 4.0 / 3.0);
        assert_eq!(maxwellian_resistance(4.0 / 3.0, 1.0, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(maxwellian_resistance(4.0 / 3.0, 1.0, 0.5).unwrap(), 7.0 / 6.0, epsilon = 1e-15);
        assert!(maxwellian_resistance(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn report_invariants() {
        assert!(ResistanceReport::new(2.5, 1.0, 2).is_err());
        assert!(ResistanceReport::new(1.0, 0.0, 2).is_err());
        let r = ResistanceReport::new(4.0 / 3.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(r.r, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn head_on_flow_into_deep_rectangle() {
        let h = make_rectangle(0.01).unwrap();
        let r = directional_resistance(&h, 0.0, 100_000, 1, &TraceLimits::default()).unwrap();
        assert!(r.x.abs() < 0.02 && (r.y - 2.0).abs() < 0.02, "{r:?}");
        let dp = directional_resistance(&make_double_parabola(), 0.0, 20_000, 1, &TraceLimits::default()).unwrap();
        assert!(dp.x.abs() < 0.02, "{dp:?}");
    }

    #[test]
    fn directional_resistance_projects_onto_f_integrand() {
        let h = make_double_parabola();
        let (phi, n) = (0.4, 20_000);
        let lim = TraceLimits::default();
        let r = directional_resistance(&h, phi, n, 3, &lim).unwrap();
        let recs = trace_at_angle(&h, phi, n, 3, &lim).unwrap();
        let ok: Vec<_> = recs.iter().filter(|r| r.is_ok()).collect();
        let mean = ok.iter().map(|r| 1.0 + (r.phi - r.phi_plus).cos()).sum::<f64>() / ok.len() as f64;
        // direction of v in the (along opening, inward normal) frame is (-sin φ, cos φ)
        let along_v = -r.x * phi.sin() + r.y * phi.cos();
        assert_abs_diff_eq!(along_v, phi.cos() * mean, epsilon = 1e-12);
    }

    #[test]
    fn convex_integrand() {
        assert!((convex_r_monte_carlo(1_000_000, 1) - 2.0 / 3.0).abs() < 1e-3);
    }
}
