//! Simple polygons: point location, visibility, shortest paths over the
//! visibility graph, and the gap sensor.

use std::fmt;

use petgraph::graph::{NodeIndex, UnGraph};
use robust::{orient2d, Coord};

use crate::error::{Error, Result};

/// Distance below which a point counts as lying on the boundary.
pub const BOUNDARY_EPS: f64 = 1e-9;
/// Offset used to look at a boundary point from the interior side.
const NUDGE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        self.sub(o).norm()
    }

    /// Point at parameter `t` on the segment from `self` to `o`.
    pub fn lerp(self, o: Point, t: f64) -> Point {
        self.add(o.sub(self).scale(t))
    }

    fn coord(self) -> Coord<f64> {
        Coord { x: self.x, y: self.y }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Sign of the turn `a -> b -> c`: positive counterclockwise, exact.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    orient2d(a.coord(), b.coord(), c.coord())
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    let t = if len2 == 0.0 { 0.0 } else { (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0) };
    p.dist(a.lerp(b, t))
}

/// Strict crossing of two segments at a point interior to both.
fn properly_cross(p: Point, q: Point, a: Point, b: Point) -> bool {
    let (o1, o2) = (sign(orient(p, q, a)), sign(orient(p, q, b)));
    let (o3, o4) = (sign(orient(a, b, p)), sign(orient(a, b, q)));
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Any common point, including touching and collinear overlap.
fn segments_meet(p: Point, q: Point, a: Point, b: Point) -> bool {
    let on = |u: Point, v: Point, w: Point| {
        orient(u, v, w) == 0.0
            && w.x >= u.x.min(v.x)
            && w.x <= u.x.max(v.x)
            && w.y >= u.y.min(v.y)
            && w.y <= u.y.max(v.y)
    };
    properly_cross(p, q, a, b)
        || (sign(orient(p, q, a)) * sign(orient(p, q, b)) <= 0
            && sign(orient(a, b, p)) * sign(orient(a, b, q)) < 0)
        || (sign(orient(a, b, p)) * sign(orient(a, b, q)) <= 0
            && sign(orient(p, q, a)) * sign(orient(p, q, b)) < 0)
        || on(p, q, a)
        || on(p, q, b)
        || on(a, b, p)
        || on(a, b, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

/// Counterclockwise simple polygon without holes.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplePolygon {
    vertices: Vec<Point>,
}

impl SimplePolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("{n} vertices; need at least 3")));
        }
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite coordinate".into()));
        }
        let poly = Self { vertices };
        for i in 0..n {
            if orient(poly.prev(i), poly.vertices[i], poly.next(i)) == 0.0 {
                return Err(Error::InvalidPolygon(format!("vertex {i} is collinear with its neighbours")));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (a, b) = poly.edge(i);
                let (c, d) = poly.edge(j);
                if segments_meet(a, b, c, d) {
                    return Err(Error::InvalidPolygon(format!("edges {i} and {j} intersect")));
                }
            }
        }
        if poly.signed_area() <= 0.0 {
            return Err(Error::InvalidPolygon("vertices are not counterclockwise".into()));
        }
        Ok(poly)
    }

    /// One `x y` pair per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pts = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("not a number: {s}"),
                })
            };
            if nums.len() != 2 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "expected `x y`".into(),
                });
            }
            pts.push(Point::new(parse(nums[0])?, parse(nums[1])?));
        }
        Self::new(pts)
    }

    pub fn serialize(&self) -> String {
        self.vertices.iter().map(|p| format!("{} {}\n", p.x, p.y)).collect()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Result<Point> {
        self.vertices.get(i).copied().ok_or(Error::UnknownVertex(i))
    }

    pub fn prev(&self, i: usize) -> Point {
        self.vertices[(i + self.len() - 1) % self.len()]
    }

    pub fn next(&self, i: usize) -> Point {
        self.vertices[(i + 1) % self.len()]
    }

    /// Edge from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.next(i))
    }

    pub fn signed_area(&self) -> f64 {
        (0..self.len()).map(|i| self.vertices[i].cross(self.next(i))).sum::<f64>() / 2.0
    }

    pub fn is_reflex(&self, i: usize) -> bool {
        orient(self.prev(i), self.vertices[i], self.next(i)) < 0.0
    }

    pub fn reflex_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_reflex(i)).collect()
    }

    pub fn is_convex(&self) -> bool {
        self.reflex_vertices().is_empty()
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0];
        let mut hi = lo;
        for p in &self.vertices {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    pub fn locate(&self, p: Point) -> Location {
        if (0..self.len()).any(|i| {
            let (a, b) = self.edge(i);
            segment_distance(p, a, b) <= BOUNDARY_EPS
        }) {
            return Location::Boundary;
        }
        let mut inside = false;
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        if inside {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    fn require_closed(&self, p: Point) -> Result<()> {
        match self.locate(p) {
            Location::Outside => Err(Error::OutsidePolygon(p.x, p.y)),
            _ => Ok(()),
        }
    }

    /// Vertex within the boundary tolerance of `p`.
    pub fn vertex_at(&self, p: Point) -> Option<usize> {
        self.vertices.iter().position(|v| v.dist(p) <= BOUNDARY_EPS)
    }

    /// Whether the segment `pq` lies in the closed polygon.
    pub fn visible(&self, p: Point, q: Point) -> Result<bool> {
        self.require_closed(p)?;
        self.require_closed(q)?;
        Ok(self.visible_unchecked(p, q))
    }

    fn visible_unchecked(&self, p: Point, q: Point) -> bool {
        if p.dist(q) <= BOUNDARY_EPS {
            return true;
        }
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            if properly_cross(p, q, a, b) {
                return false;
            }
        }
        // Between consecutive boundary contacts the segment is entirely in
        // or entirely out, so one midpoint per piece decides it.
        let d = q.sub(p);
        let len2 = d.dot(d);
        let mut ts = vec![0.0, 1.0];
        for &v in &self.vertices {
            // Vertices within rounding distance of the line count as on it.
            if orient(p, q, v) == 0.0 || d.cross(v.sub(p)).abs() <= BOUNDARY_EPS * len2.sqrt() {
                let t = v.sub(p).dot(d) / len2;
                if t > 0.0 && t < 1.0 {
                    ts.push(t);
                }
            }
        }
        ts.sort_by(f64::total_cmp);
        ts.windows(2)
            .all(|w| w[1] - w[0] <= 0.0 || self.locate(p.lerp(q, (w[0] + w[1]) / 2.0)) != Location::Outside)
    }

    /// A point a hair inside the polygon next to boundary point `p`.
    pub fn interior_nudge(&self, p: Point) -> Point {
        if let Some(i) = self.vertex_at(p) {
            let v = self.vertices[i];
            let a = self.prev(i).sub(v);
            let b = self.next(i).sub(v);
            let mut bis = a.scale(1.0 / a.norm()).add(b.scale(1.0 / b.norm()));
            if self.is_reflex(i) {
                bis = bis.scale(-1.0);
            }
            return v.add(bis.scale(NUDGE / bis.norm()));
        }
        let i = (0..self.len())
            .min_by(|&i, &j| {
                let (a, b) = self.edge(i);
                let (c, d) = self.edge(j);
                segment_distance(p, a, b).total_cmp(&segment_distance(p, c, d))
            })
            .expect("nonempty");
        let (a, b) = self.edge(i);
        let d = b.sub(a);
        let left = Point::new(-d.y, d.x);
        p.add(left.scale(NUDGE / left.norm()))
    }
}

/// Straight move toward a polygon vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexAction {
    pub target: usize,
    pub heading: f64,
}

/// Polygon with its vertex-to-vertex visibility graph.
#[derive(Debug, Clone)]
pub struct Navigator {
    poly: SimplePolygon,
    graph: UnGraph<Point, f64>,
}

impl Navigator {
    pub fn new(poly: SimplePolygon) -> Self {
        let n = poly.len();
        let mut graph = UnGraph::with_capacity(n + 1, n * n);
        for &v in poly.vertices() {
            graph.add_node(v);
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (poly.vertices[i], poly.vertices[j]);
                if poly.visible_unchecked(a, b) {
                    graph.add_edge(NodeIndex::new(i), NodeIndex::new(j), a.dist(b));
                }
            }
        }
        Self { poly, graph }
    }

    pub fn polygon(&self) -> &SimplePolygon {
        &self.poly
    }

    /// Length and vertex sequence (ending at `goal`, excluding `x`) of the
    /// shortest path from `x` to vertex `goal`.
    pub fn shortest_path(&self, x: Point, goal: usize) -> Result<(f64, Vec<usize>)> {
        let g = self.poly.vertex(goal)?;
        self.poly.require_closed(x)?;
        if x.dist(g) <= BOUNDARY_EPS {
            return Ok((0.0, Vec::new()));
        }
        let mut graph = self.graph.clone();
        let start = match self.poly.vertex_at(x) {
            Some(i) => NodeIndex::new(i),
            None => {
                let s = graph.add_node(x);
                for (i, &v) in self.poly.vertices().iter().enumerate() {
                    if self.poly.visible_unchecked(x, v) {
                        graph.add_edge(s, NodeIndex::new(i), x.dist(v));
                    }
                }
                s
            }
        };
        let target = NodeIndex::new(goal);
        let (len, nodes) = petgraph::algo::astar(&graph, start, |n| n == target, |e| *e.weight(), |n| graph[n].dist(g))
            .expect("a simple polygon is connected");
        Ok((len, nodes.into_iter().skip(1).map(NodeIndex::index).collect()))
    }

    /// First move of the shortest path; `None` at the goal.
    pub fn optimal_action(&self, x: Point, goal: usize) -> Result<Option<VertexAction>> {
        let (_, path) = self.shortest_path(x, goal)?;
        Ok(path.first().map(|&target| {
            let d = self.poly.vertices[target].sub(x);
            VertexAction {
                target,
                heading: d.y.atan2(d.x),
            }
        }))
    }

    /// Gap sensor reading at an interior point.
    pub fn gap_observation(&self, x: Point) -> Result<GapObservation> {
        match self.poly.locate(x) {
            Location::Inside => Ok(self.gaps_at(x)),
            Location::Boundary => Err(Error::OnBoundary(x.x, x.y)),
            Location::Outside => Err(Error::OutsidePolygon(x.x, x.y)),
        }
    }

    /// Reading at an interior point, or the reading just inside a boundary
    /// point.
    pub fn gap_observation_near(&self, x: Point) -> Result<GapObservation> {
        match self.poly.locate(x) {
            Location::Inside => Ok(self.gaps_at(x)),
            Location::Boundary => Ok(self.gaps_at(self.poly.interior_nudge(x))),
            Location::Outside => Err(Error::OutsidePolygon(x.x, x.y)),
        }
    }

    /// A reflex vertex `r` is a gap when it is visible and both of its
    /// neighbours lie strictly on one side of the line through `x` and `r`:
    /// the boundary distance then jumps across that line.
    fn gaps_at(&self, x: Point) -> GapObservation {
        let p = &self.poly;
        let mut gaps: Vec<(f64, usize)> = p
            .reflex_vertices()
            .into_iter()
            .filter(|&r| {
                let v = p.vertices[r];
                if v.dist(x) <= BOUNDARY_EPS || !p.visible_unchecked(x, v) {
                    return false;
                }
                let s1 = sign(orient(x, v, p.prev(r)));
                let s2 = sign(orient(x, v, p.next(r)));
                s1 != 0 && s1 == s2
            })
            .map(|r| {
                let d = p.vertices[r].sub(x);
                (d.y.atan2(d.x), r)
            })
            .collect();
        gaps.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        GapObservation {
            occluders: gaps.into_iter().map(|(_, r)| r).collect(),
        }
    }
}

/// Gaps in counterclockwise order around the observer. The sensor reports
/// anonymous tokens; the occluding vertices are kept for bookkeeping and
/// tests only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapObservation {
    occluders: Vec<usize>,
}

impl GapObservation {
    pub fn from_occluders(occluders: Vec<usize>) -> Self {
        Self { occluders }
    }

    pub fn len(&self) -> usize {
        self.occluders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occluders.is_empty()
    }

    /// What the sensor reports: one anonymous token per gap, in cyclic
    /// order.
    pub fn tokens(&self) -> Vec<GapToken> {
        vec![GapToken; self.occluders.len()]
    }

    /// Equality of sensor readings: cyclic sequences of anonymous tokens.
    pub fn same_reading(&self, other: &GapObservation) -> bool {
        cyclic_eq(&self.tokens(), &other.tokens())
    }

    /// Occluding reflex vertices, counterclockwise.
    pub fn occluders(&self) -> &[usize] {
        &self.occluders
    }

    /// Occluders rotated to start at the smallest vertex id.
    pub fn canonical(&self) -> Vec<usize> {
        canonical_rotation(&self.occluders)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GapToken;

/// Whether `b` is a rotation of `a`.
pub fn cyclic_eq<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && (a.is_empty() || (0..a.len()).any(|k| (0..a.len()).all(|i| a[(i + k) % a.len()] == b[i])))
}

/// Rotation of a sequence of distinct ids that starts at the smallest one.
pub fn canonical_rotation(v: &[usize]) -> Vec<usize> {
    let Some(k) = v.iter().enumerate().min_by_key(|(_, &r)| r).map(|(k, _)| k) else {
        return Vec::new();
    };
    v[k..].iter().chain(&v[..k]).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    fn poly(name: &str) -> SimplePolygon {
        let text = bundled::POLYGONS.iter().find(|(n, _)| *n == name).unwrap().1;
        SimplePolygon::parse(text).unwrap()
    }

    /// Segment inclusion by dense sampling.
    fn sampled_visible(p: &SimplePolygon, a: Point, b: Point) -> bool {
        (0..=2000).all(|k| p.locate(a.lerp(b, k as f64 / 2000.0)) != Location::Outside)
    }

    #[test]
    fn validation() {
        assert!(matches!(SimplePolygon::parse(""), Err(Error::InvalidPolygon(_))));
        let cw = "0 0\n0 1\n1 1\n1 0\n";
        assert!(matches!(SimplePolygon::parse(cw), Err(Error::InvalidPolygon(_))));
        let bowtie = "0 0\n1 1\n1 0\n0 1\n";
        assert!(matches!(SimplePolygon::parse(bowtie), Err(Error::InvalidPolygon(_))));
        let collinear = "0 0\n1 0\n2 0\n2 2\n";
        assert!(matches!(SimplePolygon::parse(collinear), Err(Error::InvalidPolygon(_))));
        assert!(matches!(SimplePolygon::parse("0 0\n1 x\n"), Err(Error::Parse { line: 2, .. })));
        for (name, text) in bundled::POLYGONS {
            let p = SimplePolygon::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(SimplePolygon::parse(&p.serialize()).unwrap(), p);
        }
    }

    #[test]
    fn reflex_counts() {
        assert_eq!(poly("square").reflex_vertices(), Vec::<usize>::new());
        assert_eq!(poly("lshape").reflex_vertices(), vec![3]);
        assert_eq!(poly("ushape").reflex_vertices(), vec![4, 5]);
        assert_eq!(poly("star3").reflex_vertices(), vec![1, 3, 5]);
        assert_eq!(poly("tetromino").reflex_vertices(), vec![2, 6]);
    }

    #[test]
    fn visibility_cases() {
        let sq = poly("square");
        let a = Point::new(1.0, 1.0);
        assert!(sq.visible(a, a).unwrap());
        assert!(sq.visible(a, Point::new(3.0, 3.5)).unwrap());
        assert!(sq.visible(Point::new(0.0, 0.0), Point::new(4.0, 4.0)).unwrap());
        assert_eq!(sq.visible(a, Point::new(5.0, 1.0)), Err(Error::OutsidePolygon(5.0, 1.0)));

        let l = poly("lshape");
        let pairs = [
            (Point::new(3.5, 1.0), Point::new(1.0, 3.5), false),
            (Point::new(3.5, 1.5), Point::new(1.0, 3.5), false),
            (Point::new(3.5, 0.5), Point::new(0.5, 3.5), true),
            (Point::new(1.0, 1.0), Point::new(1.0, 3.5), true),
            (Point::new(3.0, 1.0), Point::new(2.0, 2.0), true),
            // grazes the reflex corner
            (Point::new(3.0, 1.0), Point::new(1.0, 3.0), true),
            // runs along an edge
            (Point::new(2.0, 2.0), Point::new(4.0, 2.0), true),
        ];
        for (p, q, want) in pairs {
            assert_eq!(l.visible(p, q).unwrap(), want, "{p} {q}");
            assert_eq!(sampled_visible(&l, p, q), want, "{p} {q}");
        }
    }

    #[test]
    fn rounding_does_not_open_the_notch() {
        // Rotated, the top of the U is no longer exactly collinear.
        let (s, c) = 4.944683457605305f64.sin_cos();
        let turned: Vec<Point> = poly("ushape").vertices().iter().map(|p| Point::new(c * p.x - s * p.y, s * p.x + c * p.y)).collect();
        let u = SimplePolygon::new(turned).unwrap();
        assert!(!u.visible(u.vertices()[2], u.vertices()[6]).unwrap());
        assert!(u.visible(u.vertices()[2], u.vertices()[3]).unwrap());
    }

    #[test]
    fn shortest_paths() {
        let nav = Navigator::new(poly("square"));
        assert_eq!(nav.shortest_path(Point::new(0.0, 0.0), 0).unwrap(), (0.0, vec![]));
        let (len, path) = nav.shortest_path(Point::new(1.0, 1.0), 2).unwrap();
        assert!((len - 18f64.sqrt()).abs() < 1e-12);
        assert_eq!(path, vec![2]);

        let nav = Navigator::new(poly("lshape"));
        let x = Point::new(3.5, 0.5);
        let (len, path) = nav.shortest_path(x, 4).unwrap();
        let r = Point::new(2.0, 2.0);
        assert_eq!(path, vec![3, 4]);
        assert!((len - (x.dist(r) + r.dist(Point::new(2.0, 4.0)))).abs() < 1e-12);
        assert_eq!(nav.optimal_action(x, 4).unwrap().unwrap().target, 3);
        // from the reflex vertex, head for the next one
        assert_eq!(nav.optimal_action(r, 4).unwrap().unwrap().target, 4);
        assert_eq!(nav.optimal_action(Point::new(1.0, 1.0), 4).unwrap().unwrap().target, 4);
        assert_eq!(nav.shortest_path(x, 9), Err(Error::UnknownVertex(9)));
    }

    #[test]
    fn gap_counts() {
        let nav = Navigator::new(poly("square"));
        assert!(nav.gap_observation(Point::new(2.0, 1.0)).unwrap().is_empty());
        assert_eq!(nav.gap_observation(Point::new(0.0, 1.0)), Err(Error::OnBoundary(0.0, 1.0)));

        let nav = Navigator::new(poly("lshape"));
        assert_eq!(nav.gap_observation(Point::new(3.0, 1.0)).unwrap().occluders(), &[3]);
        assert_eq!(nav.gap_observation(Point::new(1.0, 3.0)).unwrap().occluders(), &[3]);
        assert!(nav.gap_observation(Point::new(1.0, 1.0)).unwrap().is_empty());

        let nav = Navigator::new(poly("star3"));
        assert!(nav.gap_observation(Point::new(0.0, 0.0)).unwrap().is_empty());
        assert_eq!(nav.gap_observation(Point::new(0.0, 3.0)).unwrap().len(), 2);
    }

    #[test]
    fn boundary_points_read_from_inside() {
        let nav = Navigator::new(poly("ushape"));
        // bottom of the notch: the left arm is hidden behind its corner
        let obs = nav.gap_observation_near(Point::new(3.0, 2.0)).unwrap();
        assert_eq!(obs.occluders(), &[4, 5]);
    }

    #[test]
    fn cyclic_helpers() {
        assert!(cyclic_eq(&[1, 2, 3], &[3, 1, 2]));
        assert!(!cyclic_eq(&[1, 2, 3], &[1, 3, 2]));
        assert!(cyclic_eq::<u8>(&[], &[]));
        assert_eq!(canonical_rotation(&[5, 2, 7]), vec![2, 7, 5]);
    }
}
