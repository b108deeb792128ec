//! 2D polygon predicates shared by cluster sampling, grasp stability and
//! placement checks. Polygons are simple (non-self-intersecting) and may be
//! non-convex; vertices are ordered (either winding).

use nalgebra::Point2;

/// Signed polygon area (positive for CCW winding).
pub fn polygon_area(poly: &[Point2<f64>]) -> f64 {
    let n = poly.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    a / 2.0
}

/// Area centroid of a simple polygon.
pub fn polygon_centroid(poly: &[Point2<f64>]) -> Point2<f64> {
    let n = poly.len();
    let a = polygon_area(poly);
    if a.abs() < 1e-18 {
        let mut c = Point2::origin();
        for p in poly {
            c.coords += p.coords;
        }
        return Point2::from(c.coords / n as f64);
    }
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let w = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    Point2::new(cx / (6.0 * a), cy / (6.0 * a))
}

/// Minimum distance from `p` to the polygon boundary.
pub fn distance_to_boundary(poly: &[Point2<f64>], p: &Point2<f64>) -> f64 {
    let n = poly.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let ab = b - a;
        let len2 = ab.norm_squared();
        let t = if len2 > 0.0 {
            ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let closest = a + ab * t;
        best = best.min((p - closest).norm());
    }
    best
}

/// Crossing-number point-in-polygon test; points within `eps` of the
/// boundary count as inside.
pub fn point_in_polygon(poly: &[Point2<f64>], p: &Point2<f64>, eps: f64) -> bool {
    if distance_to_boundary(poly, p) <= eps {
        return true;
    }
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Distance inside the polygon: positive for interior points (distance to
/// the boundary), negative outside.
pub fn inside_distance(poly: &[Point2<f64>], p: &Point2<f64>) -> f64 {
    let d = distance_to_boundary(poly, p);
    if point_in_polygon(poly, p, 0.0) {
        d
    } else {
        -d
    }
}
