//! Planar primitives, conic boundary pieces and ray queries.
//!
//! All types are immutable once built. Boundary pieces carry an orientation
//! flag that fixes which side their inward normal points to; ray queries
//! report that normal together with near-tangent and near-corner flags so the
//! tracer can discard the measure-zero set of singular trajectories.

mod pieces;
mod scene;

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

pub use pieces::{ellipse_foci, parabola_focus, BoundaryPiece, EllipseArc, ParabolaArc, Segment};
pub use scene::{first_hit, Aabb, Hit, HitTolerances, Scene};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type Point = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counterclockwise rotation by a right angle.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A direction of unit length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnitVec(Vec2);

impl UnitVec {
    pub const X: UnitVec = UnitVec(Vec2::new(1.0, 0.0));
    pub const Y: UnitVec = UnitVec(Vec2::new(0.0, 1.0));

    /// Normalizes `v`; `None` for zero or non-finite input.
    pub fn new(v: Vec2) -> Option<Self> {
        let n = v.norm();
        (n > 0.0 && n.is_finite()).then(|| UnitVec(v / n))
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        UnitVec(Vec2::new(c, s))
    }

    /// Wraps a vector already known to be unit length.
    #[inline]
    pub(crate) fn new_unchecked(v: Vec2) -> Self {
        UnitVec(v)
    }

    #[inline]
    pub fn x(self) -> f64 {
        self.0.x
    }

    #[inline]
    pub fn y(self) -> f64 {
        self.0.y
    }

    #[inline]
    pub fn as_vec(self) -> Vec2 {
        self.0
    }

    #[inline]
    pub fn dot(self, o: UnitVec) -> f64 {
        self.0.dot(o.0)
    }

    pub fn angle(self) -> f64 {
        self.0.y.atan2(self.0.x)
    }

    pub fn rotate(self, angle: f64) -> UnitVec {
        UnitVec(self.0.rotate(angle))
    }

    #[inline]
    pub fn perp(self) -> UnitVec {
        UnitVec(self.0.perp())
    }

    /// Signed angle in `(-π, π]` turning `self` counterclockwise onto `to`.
    pub fn angle_to(self, to: UnitVec) -> f64 {
        self.0.cross(to.0).atan2(self.0.dot(to.0))
    }
}

impl Neg for UnitVec {
    type Output = UnitVec;
    #[inline]
    fn neg(self) -> UnitVec {
        UnitVec(-self.0)
    }
}

impl From<UnitVec> for Vec2 {
    fn from(u: UnitVec) -> Vec2 {
        u.0
    }
}

/// Elastic reflection `v - 2⟨v, n⟩ n` of a velocity in a wall with normal `n`.
///
/// The sign of `n` does not matter.
#[inline]
pub fn reflect(v: UnitVec, n: UnitVec) -> UnitVec {
    let d = v.0.dot(n.0);
    UnitVec(v.0 - n.0 * (2.0 * d))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: Point,
    pub dir: UnitVec,
}

impl Ray {
    pub fn new(origin: Point, dir: UnitVec) -> Self {
        Self { origin, dir }
    }

    #[inline]
    pub fn at(&self, t: f64) -> Point {
        self.origin + self.dir.0 * t
    }
}

/// Real roots of `a t² + b t + c = 0`, ascending, using the cancellation-free
/// form `q = -(b + sign(b)·√disc)/2`, roots `q/a` and `c/q`.
pub(crate) fn solve_quadratic(a: f64, b: f64, c: f64) -> ([f64; 2], usize) {
    if a == 0.0 {
        if b == 0.0 {
            return ([0.0; 2], 0);
        }
        return ([-c / b, 0.0], 1);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return ([0.0; 2], 0);
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        // b == 0 and c == 0: double root at the origin
        return ([0.0, 0.0], 2);
    }
    let (r1, r2) = (q / a, c / q);
    if r1 <= r2 {
        ([r1, r2], 2)
    } else {
        ([r2, r1], 2)
    }
}
