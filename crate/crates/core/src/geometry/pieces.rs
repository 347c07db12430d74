use serde::Serialize;

use super::scene::Aabb;
use super::{solve_quadratic, Point, Ray, UnitVec, Vec2};
use crate::error::{domain, Result};

/// Straight wall from `a` to `b`. The unflipped inward normal is the left
/// perpendicular of `b - a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Segment {
    a: Point,
    b: Point,
    flip: bool,
    #[serde(skip)]
    len: f64,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self> {
        Self::with_flip(a, b, false)
    }

    pub fn with_flip(a: Point, b: Point, flip: bool) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(domain("segment endpoints must be finite"));
        }
        let len = a.distance(b);
        if len <= 0.0 {
            return Err(domain("segment has zero length"));
        }
        Ok(Self { a, b, flip, len })
    }

    pub fn a(&self) -> Point {
        self.a
    }

    pub fn b(&self) -> Point {
        self.b
    }

    pub fn flip(&self) -> bool {
        self.flip
    }

    pub fn length(&self) -> f64 {
        self.len
    }

    pub fn direction(&self) -> UnitVec {
        UnitVec::new_unchecked((self.b - self.a) / self.len)
    }

    /// Point at fraction `s ∈ [0, 1]` from `a` to `b`.
    pub fn point_at(&self, s: f64) -> Point {
        self.a + (self.b - self.a) * s
    }

    pub fn normal(&self) -> UnitVec {
        let n = self.direction().perp();
        if self.flip {
            -n
        } else {
            n
        }
    }

    fn intersect(&self, ray: &Ray, t_min: f64) -> Option<(f64, f64)> {
        let e = self.b - self.a;
        let d = ray.dir.as_vec();
        let denom = d.cross(e);
        if denom == 0.0 {
            return None;
        }
        let ao = self.a - ray.origin;
        let t = ao.cross(e) / denom;
        let s = ao.cross(d) / denom;
        (t > t_min && (-PARAM_SLACK..=1.0 + PARAM_SLACK).contains(&s)).then_some((t, s.clamp(0.0, 1.0)))
    }

    fn scaled(&self, k: f64) -> Self {
        Self { a: self.a * k, b: self.b * k, flip: self.flip, len: self.len * k }
    }
}

/// Axis-aligned elliptic arc `center + (sx cos θ, sy sin θ)` for
/// `θ ∈ [theta0, theta1]`. The unflipped inward normal points to the concave
/// side, towards the center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EllipseArc {
    center: Point,
    sx: f64,
    sy: f64,
    theta0: f64,
    theta1: f64,
    flip: bool,
    #[serde(skip)]
    len: f64,
}

impl EllipseArc {
    pub fn new(center: Point, sx: f64, sy: f64, theta0: f64, theta1: f64) -> Result<Self> {
        Self::with_flip(center, sx, sy, theta0, theta1, false)
    }

    pub fn with_flip(center: Point, sx: f64, sy: f64, theta0: f64, theta1: f64, flip: bool) -> Result<Self> {
        if !(sx > 0.0 && sy > 0.0 && sx.is_finite() && sy.is_finite()) {
            return Err(domain(format!("semi-axes must be positive, got {sx}, {sy}")));
        }
        if !(theta0.is_finite() && theta1.is_finite() && theta0 < theta1) {
            return Err(domain(format!("empty angular range [{theta0}, {theta1}]")));
        }
        if theta1 - theta0 > std::f64::consts::TAU {
            return Err(domain("angular range exceeds a full turn"));
        }
        let mut arc = Self { center, sx, sy, theta0, theta1, flip, len: 0.0 };
        arc.len = simpson(|t| arc.tangent_raw(t).norm(), theta0, theta1, 2048);
        Ok(arc)
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn semi_axes(&self) -> (f64, f64) {
        (self.sx, self.sy)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.theta0, self.theta1)
    }

    pub fn length(&self) -> f64 {
        self.len
    }

    pub fn point_at(&self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        self.center + Vec2::new(self.sx * c, self.sy * s)
    }

    fn tangent_raw(&self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(-self.sx * s, self.sy * c)
    }

    pub fn normal_at(&self, theta: f64) -> UnitVec {
        let (s, c) = theta.sin_cos();
        let n = UnitVec::new(Vec2::new(-c / self.sx, -s / self.sy)).expect("finite ellipse normal");
        if self.flip {
            -n
        } else {
            n
        }
    }

    /// Maps an angle into `[theta0, theta0 + 2π)` and tests membership.
    fn param_of(&self, p: Point) -> Option<f64> {
        let q = p - self.center;
        let mut th = (q.y / self.sy).atan2(q.x / self.sx);
        let tau = std::f64::consts::TAU;
        while th < self.theta0 - PARAM_SLACK {
            th += tau;
        }
        while th >= self.theta0 - PARAM_SLACK + tau {
            th -= tau;
        }
        (th <= self.theta1 + PARAM_SLACK).then(|| th.clamp(self.theta0, self.theta1))
    }

    fn intersect(&self, ray: &Ray, t_min: f64) -> Option<(f64, f64)> {
        let o = ray.origin - self.center;
        let o = Vec2::new(o.x / self.sx, o.y / self.sy);
        let d = Vec2::new(ray.dir.x() / self.sx, ray.dir.y() / self.sy);
        let (roots, n) = solve_quadratic(d.norm_sq(), 2.0 * o.dot(d), o.norm_sq() - 1.0);
        roots[..n].iter().filter(|&&t| t > t_min).find_map(|&t| self.param_of(ray.at(t)).map(|th| (t, th)))
    }

    pub fn residual(&self, p: Point) -> f64 {
        let q = p - self.center;
        let r = ((q.x / self.sx).powi(2) + (q.y / self.sy).powi(2)).sqrt();
        (r - 1.0) * self.sx.min(self.sy)
    }

    fn aabb(&self) -> Aabb {
        let mut bb = Aabb::empty();
        bb.include(self.point_at(self.theta0));
        bb.include(self.point_at(self.theta1));
        let half_pi = std::f64::consts::FRAC_PI_2;
        let k0 = (self.theta0 / half_pi).ceil() as i64;
        let k1 = (self.theta1 / half_pi).floor() as i64;
        for k in k0..=k1 {
            bb.include(self.point_at(k as f64 * half_pi));
        }
        bb
    }

    fn scaled(&self, k: f64) -> Self {
        Self { center: self.center * k, sx: self.sx * k, sy: self.sy * k, len: self.len * k, ..*self }
    }
}

/// Parabolic arc `w² = 4 p u` in the local frame with origin at the vertex,
/// `u` along the axis and `w` along the axis rotated counterclockwise. The
/// arc is parametrized by `w ∈ [s0, s1]`. The unflipped inward normal points
/// to the side containing the focus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParabolaArc {
    vertex: Point,
    axis: UnitVec,
    focal: f64,
    s0: f64,
    s1: f64,
    flip: bool,
    #[serde(skip)]
    len: f64,
}

impl ParabolaArc {
    pub fn new(vertex: Point, axis: UnitVec, focal: f64, s0: f64, s1: f64) -> Result<Self> {
        Self::with_flip(vertex, axis, focal, s0, s1, false)
    }

    pub fn with_flip(vertex: Point, axis: UnitVec, focal: f64, s0: f64, s1: f64, flip: bool) -> Result<Self> {
        if !(focal > 0.0 && focal.is_finite()) {
            return Err(domain(format!("focal parameter must be positive, got {focal}")));
        }
        if !(s0.is_finite() && s1.is_finite() && s0 < s1) {
            return Err(domain(format!("empty parameter range [{s0}, {s1}]")));
        }
        let prim = |w: f64| {
            let t = w / (2.0 * focal);
            focal * (t * (1.0 + t * t).sqrt() + t.asinh())
        };
        let len = prim(s1) - prim(s0);
        Ok(Self { vertex, axis, focal, s0, s1, flip, len })
    }

    pub fn vertex(&self) -> Point {
        self.vertex
    }

    pub fn axis(&self) -> UnitVec {
        self.axis
    }

    pub fn focal(&self) -> f64 {
        self.focal
    }

    pub fn range(&self) -> (f64, f64) {
        (self.s0, self.s1)
    }

    pub fn length(&self) -> f64 {
        self.len
    }

    pub fn point_at(&self, w: f64) -> Point {
        let u = w * w / (4.0 * self.focal);
        self.vertex + self.axis.as_vec() * u + self.axis.perp().as_vec() * w
    }

    pub fn normal_at(&self, w: f64) -> UnitVec {
        let n = self.axis.as_vec() * (4.0 * self.focal) - self.axis.perp().as_vec() * (2.0 * w);
        let n = UnitVec::new(n).expect("finite parabola normal");
        if self.flip {
            -n
        } else {
            n
        }
    }

    pub fn focus(&self) -> Point {
        self.vertex + self.axis.as_vec() * self.focal
    }

    fn local(&self, p: Vec2) -> Vec2 {
        Vec2::new(p.dot(self.axis.as_vec()), p.dot(self.axis.perp().as_vec()))
    }

    fn intersect(&self, ray: &Ray, t_min: f64) -> Option<(f64, f64)> {
        let o = self.local(ray.origin - self.vertex);
        let d = self.local(ray.dir.as_vec());
        let p4 = 4.0 * self.focal;
        let (roots, n) = solve_quadratic(d.y * d.y, 2.0 * o.y * d.y - p4 * d.x, o.y * o.y - p4 * o.x);
        roots[..n].iter().filter(|&&t| t > t_min).find_map(|&t| {
            let w = o.y + t * d.y;
            (w >= self.s0 - PARAM_SLACK && w <= self.s1 + PARAM_SLACK).then(|| (t, w.clamp(self.s0, self.s1)))
        })
    }

    pub fn residual(&self, p: Point) -> f64 {
        let q = self.local(p - self.vertex);
        (q.y * q.y - 4.0 * self.focal * q.x) / (4.0 * self.focal)
    }

    fn aabb(&self) -> Aabb {
        let mut bb = Aabb::empty();
        bb.include(self.point_at(self.s0));
        bb.include(self.point_at(self.s1));
        // each coordinate is quadratic in w; add its stationary point
        let (a, q) = (self.axis.as_vec(), self.axis.perp().as_vec());
        for (ac, qc) in [(a.x, q.x), (a.y, q.y)] {
            if ac != 0.0 {
                let w = -qc * 2.0 * self.focal / ac;
                if w > self.s0 && w < self.s1 {
                    bb.include(self.point_at(w));
                }
            }
        }
        bb
    }

    fn scaled(&self, k: f64) -> Self {
        Self { vertex: self.vertex * k, focal: self.focal * k, s0: self.s0 * k, s1: self.s1 * k, len: self.len * k, ..*self }
    }
}

/// Tolerance on the boundary parameter when testing whether an intersection
/// lies on the piece; corner hits are flagged separately.
const PARAM_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundaryPiece {
    Segment(Segment),
    EllipseArc(EllipseArc),
    ParabolaArc(ParabolaArc),
}

impl BoundaryPiece {
    /// Nearest intersection with `t > t_min` as `(t, parameter)`.
    #[inline]
    pub(crate) fn intersect(&self, ray: &Ray, t_min: f64) -> Option<(f64, f64)> {
        match self {
            BoundaryPiece::Segment(s) => s.intersect(ray, t_min),
            BoundaryPiece::EllipseArc(e) => e.intersect(ray, t_min),
            BoundaryPiece::ParabolaArc(p) => p.intersect(ray, t_min),
        }
    }

    pub fn point_at(&self, param: f64) -> Point {
        match self {
            BoundaryPiece::Segment(s) => s.point_at(param),
            BoundaryPiece::EllipseArc(e) => e.point_at(param),
            BoundaryPiece::ParabolaArc(p) => p.point_at(param),
        }
    }

    /// Inward normal at a boundary parameter.
    pub fn normal_at(&self, param: f64) -> UnitVec {
        match self {
            BoundaryPiece::Segment(s) => s.normal(),
            BoundaryPiece::EllipseArc(e) => e.normal_at(param),
            BoundaryPiece::ParabolaArc(p) => p.normal_at(param),
        }
    }

    pub fn param_range(&self) -> (f64, f64) {
        match self {
            BoundaryPiece::Segment(_) => (0.0, 1.0),
            BoundaryPiece::EllipseArc(e) => e.range(),
            BoundaryPiece::ParabolaArc(p) => p.range(),
        }
    }

    pub fn endpoints(&self) -> (Point, Point) {
        let (lo, hi) = self.param_range();
        (self.point_at(lo), self.point_at(hi))
    }

    pub fn length(&self) -> f64 {
        match self {
            BoundaryPiece::Segment(s) => s.length(),
            BoundaryPiece::EllipseArc(e) => e.length(),
            BoundaryPiece::ParabolaArc(p) => p.length(),
        }
    }

    /// Whether a ray leaving this piece can hit it again.
    pub fn is_curved(&self) -> bool {
        !matches!(self, BoundaryPiece::Segment(_))
    }

    /// Signed distance-like residual of `p` on the piece's implicit curve.
    pub fn residual(&self, p: Point) -> f64 {
        match self {
            BoundaryPiece::Segment(s) => (p - s.a()).cross(s.direction().as_vec()),
            BoundaryPiece::EllipseArc(e) => e.residual(p),
            BoundaryPiece::ParabolaArc(par) => par.residual(p),
        }
    }

    pub fn aabb(&self) -> Aabb {
        match self {
            BoundaryPiece::Segment(s) => {
                let mut bb = Aabb::empty();
                bb.include(s.a());
                bb.include(s.b());
                bb
            }
            BoundaryPiece::EllipseArc(e) => e.aabb(),
            BoundaryPiece::ParabolaArc(p) => p.aabb(),
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        match self {
            BoundaryPiece::Segment(s) => BoundaryPiece::Segment(s.scaled(k)),
            BoundaryPiece::EllipseArc(e) => BoundaryPiece::EllipseArc(e.scaled(k)),
            BoundaryPiece::ParabolaArc(p) => BoundaryPiece::ParabolaArc(p.scaled(k)),
        }
    }
}

impl From<Segment> for BoundaryPiece {
    fn from(s: Segment) -> Self {
        BoundaryPiece::Segment(s)
    }
}

impl From<EllipseArc> for BoundaryPiece {
    fn from(e: EllipseArc) -> Self {
        BoundaryPiece::EllipseArc(e)
    }
}

impl From<ParabolaArc> for BoundaryPiece {
    fn from(p: ParabolaArc) -> Self {
        BoundaryPiece::ParabolaArc(p)
    }
}

pub fn parabola_focus(piece: &ParabolaArc) -> Point {
    piece.focus()
}

/// Foci on the major axis at distance `√(a² - b²)` from the center.
pub fn ellipse_foci(piece: &EllipseArc) -> (Point, Point) {
    let (sx, sy) = piece.semi_axes();
    let c = piece.center();
    if sx >= sy {
        let f = ((sx - sy) * (sx + sy)).sqrt();
        (c - Vec2::new(f, 0.0), c + Vec2::new(f, 0.0))
    } else {
        let f = ((sy - sx) * (sy + sx)).sqrt();
        (c - Vec2::new(0.0, f), c + Vec2::new(0.0, f))
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn validation_rejects_degenerate_pieces() {
        assert!(Segment::new(Vec2::ZERO, Vec2::ZERO).is_err());
        assert!(EllipseArc::new(Vec2::ZERO, 0.0, 1.0, 0.0, PI).is_err());
        assert!(EllipseArc::new(Vec2::ZERO, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ParabolaArc::new(Vec2::ZERO, UnitVec::X, -1.0, 0.0, 1.0).is_err());
        assert!(ParabolaArc::new(Vec2::ZERO, UnitVec::X, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn arc_lengths() {
        let half_circle = EllipseArc::new(Vec2::ZERO, 1.0, 1.0, 0.0, PI).unwrap();
        assert_abs_diff_eq!(half_circle.length(), PI, epsilon = 1e-12);
        // w from 0 to 2 on w² = 4u: closed form √2 + asinh(1)
        let par = ParabolaArc::new(Vec2::ZERO, UnitVec::X, 1.0, 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(par.length(), 2f64.sqrt() + 1f64.asinh(), epsilon = 1e-14);
    }

    #[test]
    fn foci_examples() {
        let p = ParabolaArc::new(Vec2::new(-0.5, 0.0), UnitVec::X, 1.0, -1.0, 1.0).unwrap();
        assert_eq!(parabola_focus(&p), Vec2::new(0.5, 0.0));

        let eps = 0.1f64;
        let e = EllipseArc::new(Vec2::ZERO, (1.0 + eps * eps).sqrt(), 1.0, 0.0, PI).unwrap();
        let (f1, f2) = ellipse_foci(&e);
        assert_abs_diff_eq!(f1.x, -0.1, epsilon = 1e-14);
        assert_abs_diff_eq!(f2.x, 0.1, epsilon = 1e-14);
        assert_eq!((f1.y, f2.y), (0.0, 0.0));

        let c = EllipseArc::new(Vec2::ZERO, 1.0, 1.0, 0.0, PI).unwrap();
        assert_eq!(ellipse_foci(&c), (Vec2::ZERO, Vec2::ZERO));
    }

    #[test]
    fn inward_normals_point_to_concave_side() {
        let e = EllipseArc::new(Vec2::ZERO, 2.0, 1.0, 0.0, PI).unwrap();
        let n = e.normal_at(0.3);
        assert!(n.as_vec().dot(e.center() - e.point_at(0.3)) > 0.0);
        let p = ParabolaArc::new(Vec2::ZERO, UnitVec::Y, 0.5, -1.0, 1.0).unwrap();
        let n = p.normal_at(0.7);
        assert!(n.as_vec().dot(p.focus() - p.point_at(0.7)) > 0.0);
        let s = Segment::new(Vec2::ZERO, Vec2::new(1.0, 0.0)).unwrap();
        assert_eq!(s.normal().as_vec(), Vec2::new(0.0, 1.0));
        let s = Segment::with_flip(Vec2::ZERO, Vec2::new(1.0, 0.0), true).unwrap();
        assert_eq!(s.normal().as_vec(), Vec2::new(-0.0, -1.0));
    }

    #[test]
    fn bounding_boxes_contain_samples() {
        let pieces: Vec<BoundaryPiece> = vec![
            EllipseArc::new(Vec2::new(1.0, 2.0), 2.0, 0.5, -0.4, 2.9).unwrap().into(),
            ParabolaArc::new(Vec2::new(0.3, -1.0), UnitVec::from_angle(2.2), 0.7, -1.5, 0.8).unwrap().into(),
        ];
        for p in &pieces {
            let bb = p.aabb();
            let (lo, hi) = p.param_range();
            for i in 0..=1000 {
                let q = p.point_at(lo + (hi - lo) * i as f64 / 1000.0);
                assert!(bb.contains(q, 1e-12), "{q:?} outside {bb:?}");
            }
        }
    }
}
