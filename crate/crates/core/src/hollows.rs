//! Hollow constructors.
//!
//! A hollow is a cavity bounded by a chain of wall pieces and a straight
//! opening. The wall chain runs from the end of the opening back to its start
//! with the cavity on its left, so every unflipped segment normal points
//! inward. Coordinates are chosen so the opening has length 1, except for the
//! mushroom which keeps its native coordinates (opening `2ε`).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Error, Result};
use crate::geometry::{BoundaryPiece, EllipseArc, ParabolaArc, Point, Scene, Segment, UnitVec, Vec2};

fn default_cut() -> f64 {
    0.01
}

/// Parameter set of a hollow, as it appears in run configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    /// Rectangle whose width-to-depth ratio is `eps`.
    Rectangle {
        eps: f64,
    },
    /// Isosceles triangle with apex angle `eps`.
    Triangle {
        eps: f64,
    },
    /// Half-ellipse cap on a stem of half-width `eps`.
    Mushroom {
        eps: f64,
    },
    /// Long strip with rows of `delta × eps` notches at unit spacing.
    Tube {
        eps: f64,
        delta: f64,
        length: f64,
        /// Shift of every notch center along the tube, in `[0, 1)`.
        #[serde(default)]
        phase: f64,
    },
    DoubleParabola,
    /// Staircase between two angles `alpha` and `alpha + beta`, truncated at
    /// `1 - cut` of the apex height.
    NotchedAngle {
        alpha: f64,
        beta: f64,
        #[serde(default = "default_cut")]
        cut: f64,
    },
}

impl ShapeSpec {
    pub fn build(&self) -> Result<HollowGeometry> {
        match *self {
            ShapeSpec::Rectangle { eps } => make_rectangle(eps),
            ShapeSpec::Triangle { eps } => make_triangle(eps),
            ShapeSpec::Mushroom { eps } => make_mushroom(eps),
            ShapeSpec::Tube { eps, delta, length, phase } => make_tube_with_phase(eps, delta, length, phase),
            ShapeSpec::DoubleParabola => Ok(make_double_parabola()),
            ShapeSpec::NotchedAngle { alpha, beta, cut } => make_notched_angle(alpha, beta, cut),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ShapeSpec::Rectangle { .. } => "rectangle",
            ShapeSpec::Triangle { .. } => "triangle",
            ShapeSpec::Mushroom { .. } => "mushroom",
            ShapeSpec::Tube { .. } => "tube",
            ShapeSpec::DoubleParabola => "double_parabola",
            ShapeSpec::NotchedAngle { .. } => "notched_angle",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            ShapeSpec::Rectangle { eps } | ShapeSpec::Triangle { eps } | ShapeSpec::Mushroom { eps } => {
                vec![("eps", eps)]
            }
            ShapeSpec::Tube { eps, delta, length, phase } => {
                vec![("eps", eps), ("delta", delta), ("length", length), ("phase", phase)]
            }
            ShapeSpec::DoubleParabola => vec![],
            ShapeSpec::NotchedAngle { alpha, beta, cut } => vec![("alpha", alpha), ("beta", beta), ("cut", cut)],
        }
    }

    pub fn label(&self) -> String {
        let p: Vec<String> = self.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}({})", self.name(), p.join(","))
    }

    /// True for shapes whose exits satisfy `φ⁺ = ±φ` exactly.
    pub fn is_dichotomous(&self) -> bool {
        matches!(self, ShapeSpec::Rectangle { .. } | ShapeSpec::Tube { .. } | ShapeSpec::NotchedAngle { .. })
    }
}

/// Walls, opening and outer normal of a hollow.
#[derive(Clone, Debug)]
pub struct HollowGeometry {
    shape: ShapeSpec,
    scale: f64,
    scene: Scene,
    opening: Segment,
    normal: UnitVec,
}

impl HollowGeometry {
    /// Assembles a hollow from the opening endpoints and the wall chain.
    /// The outer normal is the opening direction turned clockwise.
    pub fn new(shape: ShapeSpec, start: Point, end: Point, walls: Vec<BoundaryPiece>) -> Result<Self> {
        let opening = Segment::new(start, end)?;
        let normal = -opening.direction().perp();
        let h = Self { shape, scale: 1.0, scene: Scene::new(walls), opening, normal };
        h.validate()?;
        Ok(h)
    }

    pub fn shape(&self) -> &ShapeSpec {
        &self.shape
    }

    pub fn label(&self) -> String {
        self.shape.label()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn walls(&self) -> &[BoundaryPiece] {
        self.scene.pieces()
    }

    pub fn opening(&self) -> Segment {
        self.opening
    }

    /// Outer normal of the opening.
    pub fn opening_normal(&self) -> UnitVec {
        self.normal
    }

    pub fn opening_length(&self) -> f64 {
        self.opening.length()
    }

    /// Unit vector along the opening, in the direction of increasing ξ.
    pub fn xi_direction(&self) -> UnitVec {
        self.opening.direction()
    }

    pub fn point_at(&self, xi: f64) -> Point {
        self.opening.point_at(xi)
    }

    pub fn xi_of(&self, p: Point) -> f64 {
        (p - self.opening.a()).dot(self.xi_direction().as_vec()) / self.opening.length()
    }

    pub fn diameter(&self) -> f64 {
        self.scene
            .bounds()
            .union(&{
                let mut b = crate::geometry::Aabb::empty();
                b.include(self.opening.a());
                b.include(self.opening.b());
                b
            })
            .diagonal()
    }

    /// Depth of `p` behind the opening line (positive inside the cavity).
    pub fn depth_of(&self, p: Point) -> f64 {
        -(p - self.opening.a()).dot(self.normal.as_vec())
    }

    /// Checks that walls and opening close up, that walls stay behind the
    /// opening line, and that they meet it only at the opening endpoints.
    pub fn validate(&self) -> Result<()> {
        let walls = self.walls();
        if walls.is_empty() {
            return Err(config("hollow has no walls"));
        }
        let diam = self.diameter();
        let join = 1e-12 * diam.max(1.0);
        let mut cur = self.opening.b();
        for (i, w) in walls.iter().enumerate() {
            let (p, q) = w.endpoints();
            cur = if p.distance(cur) <= join {
                q
            } else if q.distance(cur) <= join {
                p
            } else {
                return Err(config(format!("wall chain broken before piece {i}")));
            };
        }
        if cur.distance(self.opening.a()) > join {
            return Err(config("wall chain does not return to the opening"));
        }
        let ends = [self.opening.a(), self.opening.b()];
        for w in walls {
            let (lo, hi) = w.param_range();
            for k in 0..=64 {
                let p = w.point_at(lo + (hi - lo) * k as f64 / 64.0);
                let at_end = ends.iter().any(|e| e.distance(p) <= join);
                if !at_end && self.depth_of(p) <= 0.0 {
                    return Err(config(format!("wall point {p:?} is not behind the opening line")));
                }
            }
        }
        Ok(())
    }

    pub fn similar_copy(&self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(domain(format!("scale must be positive, got {scale}")));
        }
        let walls = self.walls().iter().map(|w| w.scaled(scale)).collect();
        let opening = Segment::new(self.opening.a() * scale, self.opening.b() * scale)?;
        Ok(Self {
            shape: self.shape.clone(),
            scale: self.scale * scale,
            scene: Scene::with_tolerances(walls, self.scene.tolerances()),
            opening,
            normal: self.normal,
        })
    }
}

/// Perimeter weights of a body: a convex part `c0` and hollows `(c_i, shape)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyDecomposition {
    pub c0: f64,
    pub parts: Vec<(f64, ShapeSpec)>,
}

impl BodyDecomposition {
    pub fn new(c0: f64, parts: Vec<(f64, ShapeSpec)>) -> Result<Self> {
        let d = Self { c0, parts };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c0 >= 0.0) || self.parts.iter().any(|(c, _)| !(*c > 0.0)) {
            return Err(Error::Weight(self.total()));
        }
        let total = self.total();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Weight(total));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        self.c0 + self.parts.iter().map(|(c, _)| c).sum::<f64>()
    }
}

fn seg(a: Point, b: Point) -> BoundaryPiece {
    Segment::new(a, b).expect("non-degenerate wall").into()
}

fn polyline(points: &[Point]) -> Vec<BoundaryPiece> {
    points.windows(2).map(|w| seg(w[0], w[1])).collect()
}

const A: Point = Vec2::new(-0.5, 0.0);
const B: Point = Vec2::new(0.5, 0.0);

/// Rectangle of depth `1/eps` behind a unit opening.
pub fn make_rectangle(eps: f64) -> Result<HollowGeometry> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("rectangle needs 0 < eps < 1, got {eps}")));
    }
    let d = 1.0 / eps;
    let walls = polyline(&[B, Vec2::new(0.5, d), Vec2::new(-0.5, d), A]);
    HollowGeometry::new(ShapeSpec::Rectangle { eps }, A, B, walls)
}

/// Isosceles triangle on a unit base with apex angle `eps`.
pub fn make_triangle(eps: f64) -> Result<HollowGeometry> {
    if !(eps > 0.0 && eps < FRAC_PI_2) {
        return Err(domain(format!("triangle needs 0 < eps < π/2, got {eps}")));
    }
    let h = triangle_depth(eps);
    let walls = polyline(&[B, Vec2::new(0.0, h), A]);
    HollowGeometry::new(ShapeSpec::Triangle { eps }, A, B, walls)
}

pub fn triangle_depth(eps: f64) -> f64 {
    0.5 / (0.5 * eps).tan()
}

/// Half-ellipse `x²/(1+ε²) + y² = 1, y ≥ 0` over the stem
/// `[-ε, ε] × [-ε², 0]`. The foci are the top corners of the stem.
pub fn make_mushroom(eps: f64) -> Result<HollowGeometry> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("mushroom needs 0 < eps < 1, got {eps}")));
    }
    let a = (1.0 + eps * eps).sqrt();
    let y0 = -eps * eps;
    let cap = EllipseArc::new(Vec2::ZERO, a, 1.0, 0.0, PI)?;
    let walls = vec![
        seg(Vec2::new(eps, y0), Vec2::new(eps, 0.0)),
        seg(Vec2::new(eps, 0.0), Vec2::new(a, 0.0)),
        cap.into(),
        seg(Vec2::new(-a, 0.0), Vec2::new(-eps, 0.0)),
        seg(Vec2::new(-eps, 0.0), Vec2::new(-eps, y0)),
    ];
    HollowGeometry::new(ShapeSpec::Mushroom { eps }, Vec2::new(-eps, y0), Vec2::new(eps, y0), walls)
}

pub fn make_tube(eps: f64, delta: f64, length: f64) -> Result<HollowGeometry> {
    make_tube_with_phase(eps, delta, length, 0.0)
}

/// Strip `[0, length] × [0, 1]` open on the left side. Notches
/// `[c - δ/2, c + δ/2] × [0, ε]` and their mirror images under `y ↦ 1 - y`
/// are removed at centers `c = k + phase` with `c ≥ 1` and
/// `c + δ/2 ≤ length - 1`.
pub fn make_tube_with_phase(eps: f64, delta: f64, length: f64, phase: f64) -> Result<HollowGeometry> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(domain(format!("tube needs 0 < eps < 1/2, got {eps}")));
    }
    if !(delta > 0.0) {
        return Err(domain(format!("tube needs delta > 0, got {delta}")));
    }
    if delta >= 1.0 {
        return Err(config(format!("notches of width {delta} overlap at unit spacing")));
    }
    if !(length > 2.0 && length.is_finite()) {
        return Err(domain(format!("tube needs length > 2, got {length}")));
    }
    if !(0.0..1.0).contains(&phase) {
        return Err(domain(format!("tube phase must lie in [0, 1), got {phase}")));
    }
    let centers = tube_notch_centers(delta, length, phase);
    if centers.is_empty() {
        return Err(config(format!("tube of length {length} has no room for a notch")));
    }
    let h = 0.5 * delta;
    let mut bottom = vec![Vec2::new(0.0, 0.0)];
    for &c in &centers {
        bottom.extend([Vec2::new(c - h, 0.0), Vec2::new(c - h, eps), Vec2::new(c + h, eps), Vec2::new(c + h, 0.0)]);
    }
    bottom.push(Vec2::new(length, 0.0));
    let mut chain = bottom.clone();
    chain.extend(bottom.iter().rev().map(|p| Vec2::new(p.x, 1.0 - p.y)));
    let walls = polyline(&chain);
    let spec = ShapeSpec::Tube { eps, delta, length, phase };
    HollowGeometry::new(spec, Vec2::new(0.0, 1.0), Vec2::new(0.0, 0.0), walls)
}

pub fn tube_notch_centers(delta: f64, length: f64, phase: f64) -> Vec<f64> {
    (1..).map(|k| k as f64 + phase).take_while(|c| c + 0.5 * delta <= length - 1.0).collect()
}

/// Two parabolic arcs over a unit base, the vertex of each at the focus of
/// the other, meeting at `(0, √2)`.
pub fn make_double_parabola() -> HollowGeometry {
    let r2 = 2f64.sqrt();
    let right = ParabolaArc::new(B, -UnitVec::X, 1.0, -r2, 0.0).expect("valid arc");
    let left = ParabolaArc::new(A, UnitVec::X, 1.0, 0.0, r2).expect("valid arc");
    HollowGeometry::new(ShapeSpec::DoubleParabola, A, B, vec![right.into(), left.into()]).expect("valid hollow")
}

/// Gap angle of the right-angle staircase equivalent to `(alpha, beta)`
/// under a horizontal stretch.
pub fn notched_gamma(alpha: f64, beta: f64) -> f64 {
    2.0 * (tan_half_cot(alpha) * (0.5 * (alpha + beta)).tan()).atan() - FRAC_PI_2
}

fn tan_half_cot(alpha: f64) -> f64 {
    1.0 / (0.5 * alpha).tan()
}

/// Right half of the staircase, from `B` up to the truncation line.
pub fn notched_right_chain(alpha: f64, beta: f64, cut: f64) -> Result<Vec<Point>> {
    if !(alpha > 0.0 && beta > 0.0 && alpha + beta < PI) {
        return Err(domain(format!("notched angle needs alpha, beta > 0 and alpha + beta < π, got {alpha}, {beta}")));
    }
    if !(cut > 0.0 && cut < 1.0) {
        return Err(domain(format!("truncation fraction must lie in (0, 1), got {cut}")));
    }
    let h = 0.5 * tan_half_cot(alpha);
    let (ti, co) = ((0.5 * alpha).tan(), 1.0 / (0.5 * (alpha + beta)).tan());
    let y_cut = (1.0 - cut) * h;
    let mut x = 0.5;
    let mut pts = vec![B];
    if h - x * co >= y_cut {
        return Err(config(format!("truncation at {y_cut} lies below the first step")));
    }
    loop {
        let y_o = h - x * co;
        if y_o >= y_cut {
            pts.push(Vec2::new(x, y_cut));
            break;
        }
        pts.push(Vec2::new(x, y_o));
        x = (h - y_o) * ti;
        pts.push(Vec2::new(x, y_o));
        if pts.len() > 20_000_000 {
            return Err(config("staircase too fine to build"));
        }
    }
    Ok(pts)
}

/// Opening `AB` of length 1 below the apex `O = (0, ½ cot(α/2))`; staircase
/// of axis-parallel segments between the sides of the angles `α` and `α + β`
/// at `O`, closed by a horizontal segment at `(1 - cut)` of the apex height.
pub fn make_notched_angle(alpha: f64, beta: f64, cut: f64) -> Result<HollowGeometry> {
    let right = notched_right_chain(alpha, beta, cut)?;
    let mut chain = right.clone();
    chain.extend(right.iter().rev().map(|p| Vec2::new(-p.x, p.y)));
    let walls = polyline(&chain);
    HollowGeometry::new(ShapeSpec::NotchedAngle { alpha, beta, cut }, A, B, walls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ellipse_foci, parabola_focus};
    use approx::assert_abs_diff_eq;

    #[test]
    fn rectangle_walls() {
        let h = make_rectangle(0.5).unwrap();
        let lens: Vec<f64> = h.walls().iter().map(|w| w.length()).collect();
        assert_eq!(lens, vec![2.0, 1.0, 2.0]);
        assert_eq!(h.opening_length(), 1.0);
        assert_eq!(h.opening_normal().as_vec(), Vec2::new(0.0, -1.0));
        assert!(matches!(make_rectangle(1.0), Err(Error::Domain(_))));
        let h = make_rectangle(0.1).unwrap();
        assert_abs_diff_eq!(h.walls()[0].length(), 10.0, epsilon = 1e-12);
        h.validate().unwrap();
    }

    #[test]
    fn triangle_depth_values() {
        let h = make_triangle(0.1).unwrap();
        let apex = h.walls()[0].endpoints().1;
        assert_abs_diff_eq!(apex.y, 9.991_665_277_447_007, epsilon = 1e-12);
        assert!(make_triangle(0.0).is_err());
        assert!(make_triangle(-0.1).is_err());
        assert!(make_triangle(FRAC_PI_2 - 1e-3).is_ok());
        assert!(make_triangle(FRAC_PI_2).is_err());
    }

    #[test]
    fn mushroom_foci_are_stem_corners() {
        for eps in [0.1, 0.01, 0.3] {
            let h = make_mushroom(eps).unwrap();
            let cap = h
                .walls()
                .iter()
                .find_map(|w| match w {
                    BoundaryPiece::EllipseArc(e) => Some(*e),
                    _ => None,
                })
                .unwrap();
            let (f1, f2) = ellipse_foci(&cap);
            assert!((f2.distance(f1) - 2.0 * eps).abs() < 1e-12);
            assert!(f2.distance(Vec2::new(eps, 0.0)) < 1e-12);
            assert!(f1.distance(Vec2::new(-eps, 0.0)) < 1e-12);
        }
        let h = make_mushroom(0.1).unwrap();
        assert_abs_diff_eq!(h.opening_length(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(h.opening().a().y, -0.01, epsilon = 1e-15);
        assert!(make_mushroom(0.0).is_err());
    }

    #[test]
    fn tube_notch_counts() {
        assert_eq!(tube_notch_centers(0.01, 10.0, 0.0).len(), 8);
        assert!(!tube_notch_centers(0.01, 3.0, 0.0).is_empty());
        assert!(make_tube(0.1, 0.01, 3.0).is_ok());
        assert!(matches!(make_tube(0.1, 1.0, 10.0), Err(Error::Config(_))));
        assert!(matches!(make_tube(0.1, 0.0, 10.0), Err(Error::Domain(_))));
        assert!(matches!(make_tube(0.1, 0.5, 2.2), Err(Error::Config(_))));
        // 4 segments per notch per row, one floor segment after each notch row, plus the closing wall
        let h = make_tube(0.1, 0.01, 10.0).unwrap();
        assert_eq!(h.walls().len(), 2 * (8 * 4 + 1) + 1);
    }

    #[test]
    fn tube_notches_are_flush_and_disjoint() {
        let (eps, delta) = (0.1, 0.3);
        let centers = tube_notch_centers(delta, 12.0, 0.25);
        for w in centers.windows(2) {
            assert!(w[1] - w[0] - delta > 0.0);
        }
        let h = make_tube_with_phase(eps, delta, 12.0, 0.25).unwrap();
        let tops: Vec<f64> = h
            .walls()
            .iter()
            .filter_map(|w| {
                let (p, q) = w.endpoints();
                (p.y == q.y && (p.y == eps || p.y == 1.0 - eps)).then_some(p.y)
            })
            .collect();
        assert_eq!(tops.len(), 2 * centers.len());
    }

    #[test]
    fn double_parabola_layout() {
        let h = make_double_parabola();
        let (right, left) = match (h.walls()[0], h.walls()[1]) {
            (BoundaryPiece::ParabolaArc(r), BoundaryPiece::ParabolaArc(l)) => (r, l),
            _ => unreachable!(),
        };
        assert_eq!(parabola_focus(&left), right.vertex());
        assert_eq!(parabola_focus(&right), left.vertex());
        let apex = left.point_at(2f64.sqrt());
        assert_abs_diff_eq!(apex.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(apex.y, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(left.point_at(0.5).x, -0.4375, epsilon = 1e-15);
        // half-size copy has its apex at √2/2
        let small = h.similar_copy(0.5).unwrap();
        let top = small.walls()[1].endpoints().1;
        assert_abs_diff_eq!(top.y, 0.7071, epsilon = 1e-4);
    }

    #[test]
    fn double_parabola_focus_directrix() {
        let h = make_double_parabola();
        for w in h.walls() {
            let BoundaryPiece::ParabolaArc(p) = w else { unreachable!() };
            let (lo, hi) = p.range();
            for k in 0..=100 {
                let q = p.point_at(lo + (hi - lo) * k as f64 / 100.0);
                let to_directrix = (q - p.vertex()).dot(p.axis().as_vec()) + p.focal();
                assert!((q.distance(p.focus()) - to_directrix).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn notched_reduced_form_is_geometric() {
        for delta in [0.1f64, 0.02, 0.5] {
            let gamma = delta.tanh().asin();
            let pts = notched_right_chain(FRAC_PI_2, gamma, 1e-3).unwrap();
            let o = Vec2::new(0.0, 0.5);
            // inner vertices are B and every other point after it
            let inner: Vec<f64> = pts.iter().step_by(2).map(|p| p.distance(o)).collect();
            for w in inner.windows(2).take(inner.len() - 1) {
                assert!((w[1] / w[0] - (-delta).exp()).abs() < 1e-9, "{delta}: {}", w[1] / w[0]);
            }
        }
        let gamma = 0.1f64.tanh().asin();
        let pts = notched_right_chain(FRAC_PI_2, gamma, 1e-3).unwrap();
        let o = Vec2::new(0.0, 0.5);
        assert_abs_diff_eq!(pts[2].distance(o) / pts[0].distance(o), 0.904_837_418_035_959_6, epsilon = 1e-12);
    }

    #[test]
    fn notched_general_is_stretched_reduced_form() {
        // stretching x by cot(α/2) maps the (α, β) staircase onto the
        // right-angle staircase with gap γ(α, β)
        for (alpha, beta) in [(0.4, 0.16), (0.2, 0.04), (1.0, 0.3), (2.0, 0.5)] {
            let s = tan_half_cot(alpha);
            let gamma = notched_gamma(alpha, beta);
            let general = notched_right_chain(alpha, beta, 0.05).unwrap();
            let reduced = notched_right_chain(FRAC_PI_2, gamma, 0.05).unwrap();
            let h = 0.5 * s;
            // reduced staircase lives under apex height ½; rescale by h/½ after stretching x
            for (g, r) in general.iter().zip(&reduced).take(40) {
                assert!((g.x * s / (2.0 * h) - r.x).abs() < 1e-9 && (g.y / (2.0 * h) - r.y).abs() < 1e-9, "{alpha} {beta}");
            }
        }
    }

    #[test]
    fn notched_domain_errors() {
        assert!(matches!(make_notched_angle(0.4, 0.0, 0.01), Err(Error::Domain(_))));
        assert!(matches!(make_notched_angle(2.0, 1.5, 0.01), Err(Error::Domain(_))));
        assert!(matches!(make_notched_angle(0.4, 0.16, 0.999), Err(Error::Config(_))));
        let h = make_notched_angle(0.4, 0.16, 0.01).unwrap();
        h.validate().unwrap();
    }

    #[test]
    fn every_default_shape_validates() {
        let specs = [
            ShapeSpec::Rectangle { eps: 0.01 },
            ShapeSpec::Triangle { eps: 0.01 },
            ShapeSpec::Mushroom { eps: 0.01 },
            ShapeSpec::Tube { eps: 0.05, delta: 0.0025, length: 80.0, phase: 0.0 },
            ShapeSpec::DoubleParabola,
            ShapeSpec::NotchedAngle { alpha: 0.1, beta: 0.01, cut: 0.01 },
        ];
        for s in specs {
            let h = s.build().unwrap();
            h.validate().unwrap();
            assert!(h.similar_copy(3.0).unwrap().validate().is_ok());
        }
    }

    #[test]
    fn similar_copy_scales() {
        let h = make_rectangle(0.5).unwrap();
        let same = h.similar_copy(1.0).unwrap();
        assert_eq!(same.walls(), h.walls());
        let big = h.similar_copy(2.0).unwrap();
        assert_eq!(big.opening_length(), 2.0);
        assert_eq!(big.walls()[0].length(), 4.0);
        assert_eq!(big.label(), h.label());
        assert!(matches!(h.similar_copy(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn decomposition_weights() {
        assert!(BodyDecomposition::new(0.5, vec![(0.5, ShapeSpec::DoubleParabola)]).is_ok());
        assert!(matches!(BodyDecomposition::new(0.5, vec![(0.6, ShapeSpec::DoubleParabola)]), Err(Error::Weight(_))));
        assert!(BodyDecomposition::new(0.5, vec![(0.0, ShapeSpec::DoubleParabola), (0.5, ShapeSpec::DoubleParabola)]).is_err());
    }

    #[test]
    fn shape_specs_round_trip_json() {
        let s: ShapeSpec = serde_json::from_str(r#"{"kind":"notched_angle","alpha":0.2,"beta":0.04}"#).unwrap();
        assert_eq!(s, ShapeSpec::NotchedAngle { alpha: 0.2, beta: 0.04, cut: 0.01 });
        assert!(serde_json::from_str::<ShapeSpec>(r#"{"kind":"rectangle","eps":0.1,"depth":3}"#).is_err());
        let t = ShapeSpec::Tube { eps: 0.1, delta: 0.01, length: 40.0, phase: 0.0 };
        assert_eq!(serde_json::from_str::<ShapeSpec>(&serde_json::to_string(&t).unwrap()).unwrap(), t);
    }
}
