use super::pieces::BoundaryPiece;
use super::{Point, Ray, UnitVec, Vec2};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub fn empty() -> Self {
        Self { min: Vec2::new(f64::INFINITY, f64::INFINITY), max: Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY) }
    }

    pub fn include(&mut self, p: Point) {
        self.min = Vec2::new(self.min.x.min(p.x), self.min.y.min(p.y));
        self.max = Vec2::new(self.max.x.max(p.x), self.max.y.max(p.y));
    }

    pub fn union(mut self, o: &Aabb) -> Self {
        self.include(o.min);
        self.include(o.max);
        self
    }

    pub fn contains(&self, p: Point, slack: f64) -> bool {
        p.x >= self.min.x - slack && p.x <= self.max.x + slack && p.y >= self.min.y - slack && p.y <= self.max.y + slack
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    fn center(&self) -> Point {
        (self.min + self.max) * 0.5
    }

    /// Slab test; returns the entry parameter if the ray meets the box
    /// before `t_max`.
    #[inline]
    fn hit(&self, o: Point, inv: Vec2, t_max: f64) -> Option<f64> {
        let (mut t0, mut t1) = (f64::NEG_INFINITY, t_max);
        for (oc, ic, lo, hi) in [(o.x, inv.x, self.min.x, self.max.x), (o.y, inv.y, self.min.y, self.max.y)] {
            if ic.is_infinite() {
                if oc < lo || oc > hi {
                    return None;
                }
                continue;
            }
            let (mut a, mut b) = ((lo - oc) * ic, (hi - oc) * ic);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
        }
        (t0 <= t1 && t1 >= 0.0).then_some(t0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HitTolerances {
    /// Hits closer than `corner_rel * length` to a piece endpoint are flagged.
    pub corner_rel: f64,
    /// Hits with `|cos|` between ray and normal below this are flagged.
    pub tangent: f64,
}

impl Default for HitTolerances {
    fn default() -> Self {
        Self { corner_rel: 1e-9, tangent: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub point: Point,
    /// Points into the billiard region.
    pub normal: UnitVec,
    pub piece: usize,
    pub param: f64,
    pub near_tangent: bool,
    pub near_corner: bool,
}

impl Hit {
    pub fn is_singular(&self) -> bool {
        self.near_tangent || self.near_corner
    }
}

fn make_hit(ray: &Ray, pieces: &[BoundaryPiece], idx: usize, t: f64, param: f64, tol: &HitTolerances) -> Hit {
    let piece = &pieces[idx];
    let point = ray.at(t);
    let normal = piece.normal_at(param);
    let (e0, e1) = piece.endpoints();
    let corner = tol.corner_rel * piece.length();
    Hit {
        t,
        point,
        normal,
        piece: idx,
        param,
        near_tangent: ray.dir.dot(normal).abs() < tol.tangent,
        near_corner: point.distance(e0) < corner || point.distance(e1) < corner,
    }
}

/// Nearest hit with `t > t_min` over all pieces, by linear scan.
pub fn first_hit(ray: &Ray, pieces: &[BoundaryPiece], t_min: f64) -> Option<Hit> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, p) in pieces.iter().enumerate() {
        if let Some((t, s)) = p.intersect(ray, t_min) {
            if best.is_none_or(|(_, bt, _)| t < bt) {
                best = Some((i, t, s));
            }
        }
    }
    best.map(|(i, t, s)| make_hit(ray, pieces, i, t, s, &HitTolerances::default()))
}

#[derive(Clone, Debug)]
enum Node {
    Leaf { bb: Aabb, start: u32, count: u32 },
    Inner { bb: Aabb, left: u32, right: u32 },
}

impl Node {
    fn bb(&self) -> &Aabb {
        match self {
            Node::Leaf { bb, .. } | Node::Inner { bb, .. } => bb,
        }
    }
}

const LEAF_SIZE: usize = 4;
const LINEAR_LIMIT: usize = 8;

/// Immutable set of boundary pieces with a bounding volume hierarchy.
#[derive(Clone, Debug)]
pub struct Scene {
    pieces: Vec<BoundaryPiece>,
    order: Vec<u32>,
    nodes: Vec<Node>,
    bounds: Aabb,
    tol: HitTolerances,
}

impl Scene {
    pub fn new(pieces: Vec<BoundaryPiece>) -> Self {
        Self::with_tolerances(pieces, HitTolerances::default())
    }

    pub fn with_tolerances(pieces: Vec<BoundaryPiece>, tol: HitTolerances) -> Self {
        let mut boxes: Vec<Aabb> = pieces.iter().map(|p| p.aabb()).collect();
        let bounds = boxes.iter().fold(Aabb::empty(), |acc, b| acc.union(b));
        let pad = Vec2::new(1.0, 1.0) * (1e-9 * (1.0 + bounds.diagonal()));
        for b in &mut boxes {
            b.min = b.min - pad;
            b.max = b.max + pad;
        }
        let mut order: Vec<u32> = (0..pieces.len() as u32).collect();
        let mut nodes = Vec::new();
        if pieces.len() > LINEAR_LIMIT {
            build(&boxes, &mut order, 0, pieces.len(), &mut nodes);
        }
        Self { pieces, order, nodes, bounds, tol }
    }

    pub fn pieces(&self) -> &[BoundaryPiece] {
        &self.pieces
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn diameter(&self) -> f64 {
        self.bounds.diagonal()
    }

    pub fn tolerances(&self) -> HitTolerances {
        self.tol
    }

    /// Nearest hit with `t > t_min`, skipping piece `exclude`.
    pub fn first_hit(&self, ray: &Ray, t_min: f64, exclude: Option<usize>) -> Option<Hit> {
        self.first_hit_with(ray, t_min, exclude, &self.tol)
    }

    pub fn first_hit_with(&self, ray: &Ray, t_min: f64, exclude: Option<usize>, tol: &HitTolerances) -> Option<Hit> {
        let mut best: Option<(usize, f64, f64)> = None;
        let consider = |i: usize, best: &mut Option<(usize, f64, f64)>| {
            if Some(i) == exclude {
                return;
            }
            if let Some((t, s)) = self.pieces[i].intersect(ray, t_min) {
                if best.is_none_or(|(_, bt, _)| t < bt) {
                    *best = Some((i, t, s));
                }
            }
        };
        if self.nodes.is_empty() {
            for i in 0..self.pieces.len() {
                consider(i, &mut best);
            }
        } else {
            let d = ray.dir.as_vec();
            let inv = Vec2::new(1.0 / d.x, 1.0 / d.y);
            let mut stack = [0u32; 64];
            let mut sp = 1;
            while sp > 0 {
                sp -= 1;
                let node = &self.nodes[stack[sp] as usize];
                let t_max = best.map_or(f64::INFINITY, |b| b.1);
                if node.bb().hit(ray.origin, inv, t_max).is_none() {
                    continue;
                }
                match *node {
                    Node::Leaf { start, count, .. } => {
                        for &i in &self.order[start as usize..(start + count) as usize] {
                            consider(i as usize, &mut best);
                        }
                    }
                    Node::Inner { left, right, .. } => {
                        stack[sp] = right;
                        stack[sp + 1] = left;
                        sp += 2;
                    }
                }
            }
        }
        best.map(|(i, t, s)| make_hit(ray, &self.pieces, i, t, s, tol))
    }
}

fn build(boxes: &[Aabb], order: &mut [u32], start: usize, end: usize, nodes: &mut Vec<Node>) -> u32 {
    let bb = order[start..end].iter().fold(Aabb::empty(), |acc, &i| acc.union(&boxes[i as usize]));
    let slot = nodes.len() as u32;
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { bb, start: start as u32, count: (end - start) as u32 });
        return slot;
    }
    nodes.push(Node::Leaf { bb, start: 0, count: 0 });
    let ext = bb.max - bb.min;
    let key = |i: &u32| {
        let c = boxes[*i as usize].center();
        if ext.x >= ext.y {
            c.x
        } else {
            c.y
        }
    };
    let mid = (start + end) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |a, b| key(a).total_cmp(&key(b)));
    let left = build(boxes, order, start, mid, nodes);
    let right = build(boxes, order, mid, end, nodes);
    nodes[slot as usize] = Node::Inner { bb, left, right };
    slot
}
