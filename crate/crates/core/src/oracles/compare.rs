//! Side-by-side runs of the oracles and the geometric tracer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::notched::{lambda_to_incidence, notched_run, side_shift, transition_time, NotchedDynamics};
use super::unfolding::{rect_parity, rect_reflections, tri_unfold, triangle_chart, DEGENERATE_BAND};
use crate::dynamics::{trace_hollow, IncidenceState, ScatterRecord, TraceLimits};
use crate::error::{Error, Result};
use crate::hollows::{make_notched_angle, make_rectangle, make_triangle};
use crate::measures::incidence_at;

/// Tolerance on exit angles predicted in closed form.
pub const ANGLE_MATCH_TOL: f64 = 1e-7;
const MAX_LISTED: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub shape: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub agree: u64,
    pub disagree: u64,
    /// Oracle undefined (parity boundary).
    pub degenerate: u64,
    /// Trace pathological or otherwise outside the oracle's scope.
    pub excluded: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub disagreements: Vec<IncidenceState>,
}

enum Outcome {
    Agree,
    Disagree(IncidenceState),
    Degenerate,
    Excluded,
}

fn tally(shape: String, outcomes: Vec<Outcome>) -> OracleReport {
    let mut r =
        OracleReport { shape, n: outcomes.len() as u64, agree: 0, disagree: 0, degenerate: 0, excluded: 0, disagreements: Vec::new() };
    for o in outcomes {
        match o {
            Outcome::Agree => r.agree += 1,
            Outcome::Disagree(s) => {
                r.disagree += 1;
                if r.disagreements.len() < MAX_LISTED {
                    r.disagreements.push(s);
                }
            }
            Outcome::Degenerate => r.degenerate += 1,
            Outcome::Excluded => r.excluded += 1,
        }
    }
    r
}

impl OracleReport {
    /// Share of the run that never reached a comparison.
    pub fn degenerate_fraction(&self) -> f64 {
        self.degenerate as f64 / self.n as f64
    }

    pub fn agreement(&self) -> f64 {
        self.agree as f64 / (self.agree + self.disagree) as f64
    }
}

/// Which branch the exit angle sits on, `+1` for `φ⁺ = φ`; `None` if it is
/// on neither within `tol`.
fn exact_branch(rec: &ScatterRecord, tol: f64) -> Option<i8> {
    if (rec.phi_plus - rec.phi).abs() <= tol {
        Some(1)
    } else if (rec.phi_plus + rec.phi).abs() <= tol {
        Some(-1)
    } else {
        None
    }
}

/// Rectangle of depth `1/eps`: unfolding parity and reflection count against
/// the trace.
pub fn compare_rectangle(eps: f64, n: u64, seed: u64, lim: &TraceLimits) -> Result<OracleReport> {
    let h = make_rectangle(eps)?;
    let outcomes = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = incidence_at(seed, i);
            let (parity, m) = match (rect_parity(s.xi, s.phi, eps), rect_reflections(s.xi, s.phi, eps)) {
                (Ok(p), Ok(m)) => (p, m),
                _ => return Outcome::Degenerate,
            };
            let rec = trace_hollow(&h, s, lim);
            if !rec.is_ok() {
                return Outcome::Excluded;
            }
            if exact_branch(&rec, 1e-9) == Some(parity) && rec.n_reflections == m {
                Outcome::Agree
            } else {
                Outcome::Disagree(s)
            }
        })
        .collect();
    Ok(tally(format!("rectangle(eps={eps})"), outcomes))
}

/// Triangle with apex angle `eps`: counts `m = n`, the parity of
/// `sign(φ⁺/φ)`, and the exit angle against the unfolded chord.
pub fn compare_triangle(eps: f64, n: u64, seed: u64, lim: &TraceLimits) -> Result<TriangleReport> {
    let h = make_triangle(eps)?;
    let rows: Vec<(Outcome, Option<bool>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = incidence_at(seed, i);
            let u = match triangle_chart(s.xi, s.phi, eps).and_then(|(x, pc)| tri_unfold(x, pc, eps)) {
                Ok(u) => u,
                Err(_) => return (Outcome::Degenerate, None),
            };
            let rec = trace_hollow(&h, s, lim);
            if !rec.is_ok() {
                return (Outcome::Excluded, None);
            }
            let sign_ok = (rec.phi_plus * rec.phi).signum() as i8 == u.sign;
            let exact = rec.n_reflections == u.n && (rec.phi_plus - u.phi_plus).abs() <= ANGLE_MATCH_TOL;
            (if exact { Outcome::Agree } else { Outcome::Disagree(s) }, Some(sign_ok))
        })
        .collect();
    let sign_mismatch = rows.iter().filter(|(_, s)| *s == Some(false)).count() as u64;
    let report = tally(format!("triangle(eps={eps})"), rows.into_iter().map(|(o, _)| o).collect());
    Ok(TriangleReport { report, sign_mismatch })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleReport {
    #[serde(flatten)]
    pub report: OracleReport,
    /// Compared samples where `sign(φ⁺/φ)` differs from the parity of `n`.
    pub sign_mismatch: u64,
}

/// Right-angle staircase with gap angle `γ`, `sin γ = tanh δ`.
pub fn reduced_notched_gamma(delta: f64) -> f64 {
    delta.tanh().asin()
}

/// Parity of the symbolic exit time against tracing the reduced notched
/// angle truncated at `cut`, on `z̃₀` uniform in `(-(1/δ) ln(1/λ), 0)`.
pub fn compare_notched(lam: f64, delta: f64, cut: f64, n: u64, seed: u64, lim: &TraceLimits) -> Result<OracleReport> {
    let h = make_notched_angle(std::f64::consts::FRAC_PI_2, reduced_notched_gamma(delta), cut)?;
    NotchedDynamics::new(-1e-3, lam, delta)?;
    let shift = side_shift(lam, delta);
    let outcomes = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let z0 = -shift * rng.random::<f64>();
            let Ok(mut nd) = NotchedDynamics::new(z0, lam, delta) else {
                return Outcome::Degenerate;
            };
            let Ok((m, _)) = notched_run(&mut nd, 1_000_000) else {
                return Outcome::Excluded;
            };
            if nd.min_boundary_gap() < DEGENERATE_BAND {
                return Outcome::Degenerate;
            }
            let deepest = nd.max_step().unwrap_or(0) as f64;
            if (-delta * (deepest + 2.0)).exp() < cut {
                return Outcome::Excluded;
            }
            let Ok((xi, phi)) = lambda_to_incidence(lam, (-delta * z0).exp(), -1.0) else {
                return Outcome::Degenerate;
            };
            let s = IncidenceState { xi, phi };
            let rec = trace_hollow(&h, s, lim);
            if !rec.is_ok() {
                return Outcome::Excluded;
            }
            let symbolic = if m % 2 == 0 { 1 } else { -1 };
            if exact_branch(&rec, 1e-9) == Some(symbolic) {
                Outcome::Agree
            } else {
                Outcome::Disagree(s)
            }
        })
        .collect();
    Ok(tally(format!("notched_angle(lambda={lam},delta={delta},cut={cut})"), outcomes))
}

/// Counts of the transition time `k_δ` over `z̃₀` uniform on the circle;
/// entry `k - 1` holds the count for `k`.
pub fn transition_counts(lam: f64, delta: f64, n: u64, seed: u64) -> Result<Vec<u64>> {
    let ks: Vec<Result<u64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            transition_time(rng.random::<f64>(), lam, delta, 100_000)
        })
        .collect();
    let mut counts = Vec::new();
    for k in ks {
        let k = k? as usize;
        if counts.len() < k {
            counts.resize(k, 0);
        }
        counts[k - 1] += 1;
    }
    if counts.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    Ok(counts)
}
