//! Planar primitives shared by the floor plan predicates and the roadmap.
//!
//! All predicates are conservative: anything within [`EPS`] of an obstacle
//! boundary counts as touching it.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Absolute tolerance (length-units) for every geometric predicate.
pub const EPS: f64 = 1e-9;

/// A point in the floor plan's x,y-plane. Serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Point at parameter `t` along `self -> other`.
    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Twice the signed area of triangle `abc`; positive when counter-clockwise.
pub fn cross(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Euclidean distance from `p` to the closed segment `ab`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(a.lerp(b, t))
}

/// Euclidean distance between closed segments `ab` and `cd` (zero when they cross).
pub fn segment_segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    let proper = ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
    if proper {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut bb = Aabb {
            min: first,
            max: first,
        };
        for p in it {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    /// True when the boxes, each grown by `pad`, overlap.
    pub fn overlaps(&self, other: &Aabb, pad: f64) -> bool {
        self.min.x - pad <= other.max.x
            && other.min.x - pad <= self.max.x
            && self.min.y - pad <= other.max.y
            && other.min.y - pad <= self.max.y
    }
}

/// Why a polygon was rejected.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PolygonDefect {
    #[error("polygon has {0} vertices, at least 3 are required")]
    TooFewVertices(usize),
    #[error("vertex {0} is not a finite coordinate")]
    NonFinite(usize),
    #[error("edge {0} has zero length")]
    ZeroLengthEdge(usize),
    #[error("edges {0} and {1} fold back onto each other")]
    Overlap(usize, usize),
    #[error("edges {0} and {1} intersect")]
    SelfIntersection(usize, usize),
}

/// A closed polygon; the last vertex connects back to the first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        Self { vertices }
    }

    /// Axis-aligned rectangle spanning `[x0,x1]×[y0,y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self::new(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::of_points(&self.vertices).expect("validated polygon has vertices")
    }

    /// Checks vertex count and simplicity.
    pub fn validate(&self) -> Result<(), PolygonDefect> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(PolygonDefect::TooFewVertices(n));
        }
        if let Some(i) = self.vertices.iter().position(|p| !p.is_finite()) {
            return Err(PolygonDefect::NonFinite(i));
        }
        let edges: Vec<(Point, Point)> = self.edges().collect();
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a.distance(b) <= EPS {
                return Err(PolygonDefect::ZeroLengthEdge(i));
            }
        }
        for i in 0..n {
            let j = (i + 1) % n;
            // Adjacent edges share exactly one vertex; anything more is a fold.
            let (a, b) = edges[i];
            let (_, c) = edges[j];
            if point_segment_distance(c, a, b) <= EPS || point_segment_distance(a, b, c) <= EPS {
                return Err(PolygonDefect::Overlap(i, j));
            }
        }
        for i in 0..n {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = edges[i];
                let (c, d) = edges[j];
                if segment_segment_distance(a, b, c, d) <= EPS {
                    return Err(PolygonDefect::SelfIntersection(i, j));
                }
            }
        }
        Ok(())
    }

    /// Even-odd containment test. Points on the boundary give an unspecified
    /// answer; callers check boundary distance separately.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x_at {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when `p` is inside the polygon or within [`EPS`] of its boundary.
    pub fn blocks_point(&self, p: Point) -> bool {
        self.boundary_distance(p) <= EPS || self.contains(p)
    }

    /// True when segment `ab` comes within [`EPS`] of any edge.
    pub fn touches_segment(&self, a: Point, b: Point) -> bool {
        self.edges()
            .any(|(c, d)| segment_segment_distance(a, b, c, d) <= EPS)
    }

    /// Shoelace area (absolute).
    pub fn area(&self) -> f64 {
        let s: f64 = self
            .edges()
            .map(|(a, b)| a.x * b.y - b.x * a.y)
            .sum();
        s.abs() / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn crossing_segments_have_zero_distance() {
        assert_eq!(segment_segment_distance(p(0., 0.), p(2., 2.), p(0., 2.), p(2., 0.)), 0.0);
    }

    #[test]
    fn parallel_segments_distance() {
        let d = segment_segment_distance(p(0., 0.), p(4., 0.), p(1., 3.), p(3., 3.));
        assert!((d - 3.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_touch_counts() {
        let d = segment_segment_distance(p(0., 0.), p(1., 1.), p(1., 1.), p(2., 0.));
        assert!(d <= EPS);
    }

    #[test]
    fn rect_contains_and_blocks() {
        let r = Polygon::rect(0., 0., 2., 1.);
        assert!(r.contains(p(1., 0.5)));
        assert!(!r.contains(p(3., 0.5)));
        assert!(r.blocks_point(p(2., 0.5)));
        assert!(r.blocks_point(p(0., 0.)));
        assert!(!r.blocks_point(p(2.1, 0.5)));
        assert_eq!(r.area(), 2.0);
    }

    #[test]
    fn polygon_defects() {
        assert_eq!(
            Polygon::new(vec![p(0., 0.), p(1., 0.)]).validate(),
            Err(PolygonDefect::TooFewVertices(2))
        );
        let bowtie = Polygon::new(vec![p(0., 0.), p(2., 2.), p(2., 0.), p(0., 2.)]);
        assert!(matches!(bowtie.validate(), Err(PolygonDefect::SelfIntersection(_, _))));
        let flat = Polygon::new(vec![p(0., 0.), p(1., 0.), p(2., 0.)]);
        assert!(matches!(flat.validate(), Err(PolygonDefect::Overlap(_, _))));
        let dup = Polygon::new(vec![p(0., 0.), p(0., 0.), p(1., 1.), p(0., 1.)]);
        assert_eq!(dup.validate(), Err(PolygonDefect::ZeroLengthEdge(0)));
        assert!(Polygon::rect(0., 0., 1., 1.).validate().is_ok());
    }

    #[test]
    fn concave_polygon_containment() {
        // U shape opening upwards.
        let u = Polygon::new(vec![
            p(0., 0.),
            p(3., 0.),
            p(3., 3.),
            p(2., 3.),
            p(2., 1.),
            p(1., 1.),
            p(1., 3.),
            p(0., 3.),
        ]);
        assert!(u.validate().is_ok());
        assert!(u.contains(p(0.5, 2.)));
        assert!(!u.contains(p(1.5, 2.)));
        assert!(u.touches_segment(p(0.5, 4.), p(0.5, 2.5)));
        assert!(!u.touches_segment(p(1.5, 4.), p(1.5, 1.5)));
    }
}
