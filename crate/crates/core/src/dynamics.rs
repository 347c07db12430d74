//! Billiard tracing inside hollows and in a few unbounded reference scenes.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Error, Result};
use crate::geometry::{reflect, BoundaryPiece, HitTolerances, ParabolaArc, Point, Ray, Scene, Segment, UnitVec, Vec2};
use crate::hollows::HollowGeometry;

/// Entry point on the opening and incidence angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidenceState {
    pub xi: f64,
    pub phi: f64,
}

impl IncidenceState {
    pub fn new(xi: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(domain(format!("xi must lie in [0, 1], got {xi}")));
        }
        if !(phi.abs() < FRAC_PI_2) {
            return Err(domain(format!("phi must lie in (-π/2, π/2), got {phi}")));
        }
        Ok(Self { xi, phi })
    }
}

/// Why a trajectory was discarded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pathology {
    MaxReflections,
    /// Hit within the corner tolerance of a piece endpoint.
    SingularHit,
    NearTangent,
    /// Left the cavity other than through the opening (a numerical leak).
    Escaped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatus {
    Ok,
    Pathological(Pathology),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScatterRecord {
    pub xi: f64,
    pub phi: f64,
    pub xi_plus: f64,
    pub phi_plus: f64,
    pub n_reflections: u64,
    /// Entry point, reflection points and exit point; empty unless requested.
    pub path: Vec<Point>,
    pub status: TraceStatus,
}

impl ScatterRecord {
    pub fn is_ok(&self) -> bool {
        self.status == TraceStatus::Ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceLimits {
    pub max_reflections: u64,
    /// Relative to the piece length.
    pub corner_tol: f64,
    /// Lower bound on `|cos|` of the angle between ray and normal.
    pub tangent_tol: f64,
    pub record_path: bool,
}

impl Default for TraceLimits {
    fn default() -> Self {
        Self { max_reflections: 1_000_000, corner_tol: 1e-9, tangent_tol: 1e-9, record_path: false }
    }
}

impl TraceLimits {
    pub fn validate(&self) -> Result<()> {
        if self.max_reflections < 1 {
            return Err(config("max_reflections must be at least 1"));
        }
        if !(self.corner_tol >= 0.0 && self.tangent_tol >= 0.0) {
            return Err(config("tolerances must be non-negative"));
        }
        Ok(())
    }

    fn hit_tolerances(&self) -> HitTolerances {
        HitTolerances { corner_rel: self.corner_tol, tangent: self.tangent_tol }
    }
}

/// Velocity entering through an opening with outer normal `n` at angle `phi`.
pub fn entry_velocity(n: UnitVec, phi: f64) -> UnitVec {
    (-n).rotate(phi)
}

/// Angle from `-n` to `v`, counterclockwise.
pub fn incidence_angle(n: UnitVec, v: UnitVec) -> f64 {
    (-n).angle_to(v)
}

/// Angle from `n` to `v⁺`, counterclockwise.
pub fn exit_angle(n: UnitVec, v_plus: UnitVec) -> f64 {
    n.angle_to(v_plus)
}

/// Traces one particle through a hollow until it leaves through the opening.
pub fn trace_hollow(h: &HollowGeometry, s: IncidenceState, lim: &TraceLimits) -> ScatterRecord {
    let n = h.opening_normal();
    let nv = n.as_vec();
    let o = h.opening().a();
    let scene = h.scene();
    let tol = lim.hit_tolerances();
    let t_min = 1e-9 * h.diameter();
    let len = h.opening_length();

    let mut p = h.point_at(s.xi);
    let mut v = entry_velocity(n, s.phi);
    let mut path = Vec::new();
    if lim.record_path {
        path.push(p);
    }
    let mut m = 0u64;
    let mut exclude = None;
    let finish =
        |status, xi_plus, phi_plus, m, path| ScatterRecord { xi: s.xi, phi: s.phi, xi_plus, phi_plus, n_reflections: m, path, status };
    loop {
        let ray = Ray::new(p, v);
        let hit = scene.first_hit_with(&ray, t_min, exclude, &tol);
        let vn = v.as_vec().dot(nv);
        // distance to the opening line along the ray, when heading out
        let t_exit = if vn > 0.0 { -(p - o).dot(nv) / vn } else { f64::INFINITY };
        match hit {
            Some(hit) if hit.t < t_exit => {
                if hit.near_corner {
                    return finish(TraceStatus::Pathological(Pathology::SingularHit), f64::NAN, f64::NAN, m, path);
                }
                if hit.near_tangent {
                    return finish(TraceStatus::Pathological(Pathology::NearTangent), f64::NAN, f64::NAN, m, path);
                }
                if v.dot(hit.normal) >= 0.0 {
                    return finish(TraceStatus::Pathological(Pathology::Escaped), f64::NAN, f64::NAN, m, path);
                }
                m += 1;
                if m > lim.max_reflections {
                    return finish(TraceStatus::Pathological(Pathology::MaxReflections), f64::NAN, f64::NAN, m - 1, path);
                }
                p = hit.point;
                v = reflect(v, hit.normal);
                exclude = (!scene.pieces()[hit.piece].is_curved()).then_some(hit.piece);
                if lim.record_path {
                    path.push(p);
                }
            }
            _ if t_exit.is_finite() => {
                let q = ray.at(t_exit);
                let xi_plus = (q - o).dot(h.xi_direction().as_vec()) / len;
                let slack = 1e-9;
                if !(-slack..=1.0 + slack).contains(&xi_plus) || m == 0 {
                    return finish(TraceStatus::Pathological(Pathology::Escaped), f64::NAN, f64::NAN, m, path);
                }
                if lim.record_path {
                    path.push(q);
                }
                return finish(TraceStatus::Ok, xi_plus.clamp(0.0, 1.0), exit_angle(n, v), m, path);
            }
            _ => return finish(TraceStatus::Pathological(Pathology::Escaped), f64::NAN, f64::NAN, m, path),
        }
    }
}

/// Traces the time-reversed particle of `record`: it enters at `ξ⁺` with
/// incidence angle `φ⁺` and must leave at `ξ` with exit angle `φ`.
///
/// Fails with [`Error::Pathological`] if `record` itself is not Ok.
pub fn reverse_check(h: &HollowGeometry, record: &ScatterRecord, lim: &TraceLimits) -> Result<bool> {
    if let TraceStatus::Pathological(p) = record.status {
        return Err(Error::Pathological(p));
    }
    let Ok(s) = IncidenceState::new(record.xi_plus, record.phi_plus) else {
        return Ok(false);
    };
    let back = trace_hollow(h, s, &TraceLimits { record_path: false, ..*lim });
    Ok(back.is_ok()
        && (back.xi_plus - record.xi).abs() <= 1e-7
        && (back.phi_plus - record.phi).abs() <= 1e-7
        && back.n_reflections == record.n_reflections)
}

/// Unbounded billiard regions with exact retroreflection properties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UnboundedScene {
    /// Inside of the parabola `y² = 4 focal x` (vertex at the origin,
    /// axis `+x`), cut at `|y| ≤ extent`.
    ParabolaExterior { focal: f64, extent: f64 },
    /// Quadrant `x > 0, y > 0` with walls of length `arm`.
    OrthantCorner { arm: f64 },
    /// Region `x cos θ_k - y sin θ_k > a_k` with `θ_k = π k / K` for the `K`
    /// given offsets (`K` even).
    QuarterAnglePolygon { offsets: Vec<f64> },
}

impl UnboundedScene {
    pub fn pieces(&self) -> Result<Vec<BoundaryPiece>> {
        match self {
            UnboundedScene::ParabolaExterior { focal, extent } => {
                if !(*extent > 0.0) {
                    return Err(domain("extent must be positive"));
                }
                Ok(vec![ParabolaArc::new(Vec2::ZERO, UnitVec::X, *focal, -extent, *extent)?.into()])
            }
            UnboundedScene::OrthantCorner { arm } => {
                if !(*arm > 0.0) {
                    return Err(domain("arm must be positive"));
                }
                Ok(vec![Segment::new(Vec2::new(0.0, *arm), Vec2::ZERO)?.into(), Segment::new(Vec2::ZERO, Vec2::new(*arm, 0.0))?.into()])
            }
            UnboundedScene::QuarterAnglePolygon { offsets } => quarter_angle_walls(offsets),
        }
    }

    /// Length scale of the finite part of the scene.
    pub fn scale(&self) -> f64 {
        match self {
            UnboundedScene::ParabolaExterior { focal, extent } => focal.max(*extent),
            UnboundedScene::OrthantCorner { arm } => *arm,
            UnboundedScene::QuarterAnglePolygon { offsets } => 1.0 + offsets.iter().fold(0.0f64, |a, b| a.max(b.abs())),
        }
    }
}

fn quarter_angle_walls(offsets: &[f64]) -> Result<Vec<BoundaryPiece>> {
    let k_total = offsets.len();
    if k_total < 2 || k_total % 2 != 0 {
        return Err(domain(format!("need an even, nonzero number of offsets, got {k_total}")));
    }
    if offsets.iter().any(|a| !a.is_finite()) {
        return Err(domain("offsets must be finite"));
    }
    let big = 1e4 * (1.0 + offsets.iter().fold(0.0f64, |a, b| a.max(b.abs())));
    // counterclockwise box; each vertex carries the label of its outgoing edge
    let mut poly: Vec<(Point, Option<usize>)> =
        vec![(Vec2::new(-big, -big), None), (Vec2::new(big, -big), None), (Vec2::new(big, big), None), (Vec2::new(-big, big), None)];
    for (k, &a) in offsets.iter().enumerate() {
        let th = PI * k as f64 / k_total as f64;
        let nk = Vec2::new(th.cos(), -th.sin());
        let inside = |p: Point| nk.dot(p) - a;
        let mut out = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let (p, lab) = poly[i];
            let q = poly[(i + 1) % poly.len()].0;
            let (fp, fq) = (inside(p), inside(q));
            let cross = || p + (q - p) * (fp / (fp - fq));
            match (fp >= 0.0, fq >= 0.0) {
                (true, true) => out.push((p, lab)),
                (true, false) => {
                    out.push((p, lab));
                    out.push((cross(), Some(k)));
                }
                (false, true) => out.push((cross(), lab)),
                (false, false) => {}
            }
        }
        if out.len() < 3 {
            return Err(config("constraints leave an empty region"));
        }
        poly = out;
    }
    let mut walls = Vec::new();
    for i in 0..poly.len() {
        let (p, lab) = poly[i];
        let q = poly[(i + 1) % poly.len()].0;
        if lab.is_some() && p.distance(q) > 0.0 {
            walls.push(Segment::new(p, q)?.into());
        }
    }
    Ok(walls)
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnboundedTrace {
    pub v_plus: UnitVec,
    /// Ray origin followed by the reflection points.
    pub path: Vec<Point>,
}

/// Follows a ray through an unbounded scene until it stops hitting walls.
pub fn trace_unbounded(scene: &UnboundedScene, ray: Ray, lim: &TraceLimits) -> Result<UnboundedTrace> {
    let sc = Scene::with_tolerances(scene.pieces()?, lim.hit_tolerances());
    let t_min = 1e-9 * scene.scale();
    let mut p = ray.origin;
    let mut v = ray.dir;
    let mut path = vec![p];
    let mut exclude = None;
    let mut m = 0u64;
    while let Some(hit) = sc.first_hit(&Ray::new(p, v), t_min, exclude) {
        if hit.near_corner {
            return Err(Error::Pathological(Pathology::SingularHit));
        }
        if hit.near_tangent {
            return Err(Error::Pathological(Pathology::NearTangent));
        }
        m += 1;
        if m > lim.max_reflections {
            return Err(Error::Pathological(Pathology::MaxReflections));
        }
        p = hit.point;
        v = reflect(v, hit.normal);
        exclude = (!sc.pieces()[hit.piece].is_curved()).then_some(hit.piece);
        path.push(p);
    }
    if m == 0 {
        return Err(Error::NoInteraction);
    }
    Ok(UnboundedTrace { v_plus: v, path })
}
