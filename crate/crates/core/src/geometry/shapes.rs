//! Procedural test objects: boxes, extruded profiles (L-block, T-tube) and
//! icospheres. All meshes are closed with outward normals and centered so the
//! origin is the centroid of the bounding box.

use nalgebra::{Point2, Point3};

use super::TriMesh;

/// Axis-aligned box of the given full extents, centered at the origin.
pub fn box_mesh(sx: f64, sy: f64, sz: f64) -> TriMesh {
    let (hx, hy, hz) = (sx / 2.0, sy / 2.0, sz / 2.0);
    let v = vec![
        Point3::new(-hx, -hy, -hz),
        Point3::new(hx, -hy, -hz),
        Point3::new(hx, hy, -hz),
        Point3::new(-hx, hy, -hz),
        Point3::new(-hx, -hy, hz),
        Point3::new(hx, -hy, hz),
        Point3::new(hx, hy, hz),
        Point3::new(-hx, hy, hz),
    ];
    let t = vec![
        [0, 2, 1],
        [0, 3, 2], // bottom (-z)
        [4, 5, 6],
        [4, 6, 7], // top (+z)
        [0, 1, 5],
        [0, 5, 4], // -y
        [1, 2, 6],
        [1, 6, 5], // +x
        [2, 3, 7],
        [2, 7, 6], // +y
        [3, 0, 4],
        [3, 4, 7], // -x
    ];
    TriMesh::new(v, t).expect("box mesh is valid")
}

/// Signed area of a 2D polygon (positive when counter-clockwise).
fn polygon_area_2d(poly: &[Point2<f64>]) -> f64 {
    let n = poly.len();
    let mut a = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    a / 2.0
}

/// Ear-clipping triangulation of a simple CCW polygon.
fn triangulate_polygon(poly: &[Point2<f64>]) -> Vec<[usize; 3]> {
    let n = poly.len();
    assert!(n >= 3);
    let mut idx: Vec<usize> = (0..n).collect();
    let mut tris = Vec::with_capacity(n - 2);
    let cross = |a: Point2<f64>, b: Point2<f64>, c: Point2<f64>| {
        (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
    };
    let mut guard = 0;
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (ia, ib, ic) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            let (a, b, c) = (poly[ia], poly[ib], poly[ic]);
            if cross(a, b, c) <= 1e-15 {
                continue; // reflex or collinear corner
            }
            let mut contains_other = false;
            for &j in &idx {
                if j == ia || j == ib || j == ic {
                    continue;
                }
                let p = poly[j];
                if cross(a, b, p) >= -1e-15 && cross(b, c, p) >= -1e-15 && cross(c, a, p) >= -1e-15
                {
                    contains_other = true;
                    break;
                }
            }
            if !contains_other {
                tris.push([ia, ib, ic]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        guard += 1;
        assert!(clipped && guard < 10_000, "ear clipping failed on polygon");
    }
    tris.push([idx[0], idx[1], idx[2]]);
    tris
}

/// Extrude a simple CCW polygon in the xy plane along +z by `depth`,
/// producing a closed prism centered on z = 0.
pub fn extrude_polygon(profile: &[Point2<f64>], depth: f64) -> TriMesh {
    assert!(polygon_area_2d(profile) > 0.0, "profile must be CCW");
    let n = profile.len();
    let hz = depth / 2.0;
    let mut vertices = Vec::with_capacity(2 * n);
    for p in profile {
        vertices.push(Point3::new(p.x, p.y, -hz));
    }
    for p in profile {
        vertices.push(Point3::new(p.x, p.y, hz));
    }
    let mut triangles = Vec::new();
    for t in triangulate_polygon(profile) {
        // Bottom cap faces -z: reverse winding.
        triangles.push([t[0], t[2], t[1]]);
        triangles.push([t[0] + n, t[1] + n, t[2] + n]);
    }
    for i in 0..n {
        let j = (i + 1) % n;
        triangles.push([i, j, j + n]);
        triangles.push([i, j + n, i + n]);
    }
    TriMesh::new(vertices, triangles).expect("extruded mesh is valid")
}

/// L-shaped block: an L profile (foot plus upright limb) extruded along z.
///
/// `foot_len` x `height` bound the profile; the foot is `foot_thick` tall and
/// the limb `limb_thick` wide; `depth` is the extrusion. The convex hull of
/// this solid has 7 facets and the solid itself has 8 planar faces.
pub fn l_block(foot_len: f64, foot_thick: f64, height: f64, limb_thick: f64, depth: f64) -> TriMesh {
    assert!(foot_thick < height && limb_thick < foot_len);
    let profile = [
        Point2::new(0.0, 0.0),
        Point2::new(foot_len, 0.0),
        Point2::new(foot_len, foot_thick),
        Point2::new(limb_thick, foot_thick),
        Point2::new(limb_thick, height),
        Point2::new(0.0, height),
    ];
    // Center the bounding box on the origin.
    let c = Point2::new(foot_len / 2.0, height / 2.0);
    let centered: Vec<Point2<f64>> = profile.iter().map(|p| Point2::from(p - c)).collect();
    extrude_polygon(&centered, depth)
}

/// T-shaped tube: a T profile (horizontal bar with a stem below) extruded
/// along z. The solid has 10 planar faces.
pub fn t_tube(bar_len: f64, bar_thick: f64, stem_len: f64, stem_thick: f64, depth: f64) -> TriMesh {
    assert!(stem_thick < bar_len);
    let hx = bar_len / 2.0;
    let hs = stem_thick / 2.0;
    let top = bar_thick / 2.0 + stem_len / 2.0;
    let mid = top - bar_thick;
    let bot = -top;
    let profile = [
        Point2::new(-hs, bot),
        Point2::new(hs, bot),
        Point2::new(hs, mid),
        Point2::new(hx, mid),
        Point2::new(hx, top),
        Point2::new(-hx, top),
        Point2::new(-hx, mid),
        Point2::new(-hs, mid),
    ];
    extrude_polygon(&profile, depth)
}

/// Icosphere with `subdivisions` refinement steps (20 * 4^n triangles).
pub fn icosphere(radius: f64, subdivisions: u32) -> TriMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3<f64>> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| {
        let v = nalgebra::Vector3::new(x, y, z).normalize() * radius;
        Point3::from(v)
    })
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoint: std::collections::HashMap<(usize, usize), usize> =
            std::collections::HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for tri in &triangles {
            let mut mid = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[k] = *midpoint.entry(key).or_insert_with(|| {
                    let m = (vertices[a].coords + vertices[b].coords).normalize() * radius;
                    vertices.push(Point3::from(m));
                    vertices.len() - 1
                });
            }
            next.push([tri[0], mid[0], mid[2]]);
            next.push([tri[1], mid[1], mid[0]]);
            next.push([tri[2], mid[2], mid[1]]);
            next.push([mid[0], mid[1], mid[2]]);
        }
        triangles = next;
    }
    TriMesh::new(vertices, triangles).expect("icosphere mesh is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_volume_and_com() {
        let m = box_mesh(0.03, 0.04, 0.05);
        assert!((m.volume() - 0.03 * 0.04 * 0.05).abs() < 1e-15);
        assert!(m.center_of_mass().coords.norm() < 1e-12);
    }

    #[test]
    fn l_block_volume_matches_two_boxes() {
        let (fl, ft, h, lt, d) = (0.05, 0.02, 0.05, 0.02, 0.03);
        let m = l_block(fl, ft, h, lt, d);
        let expect = fl * ft * d + lt * (h - ft) * d;
        assert!((m.volume() - expect).abs() < 1e-12);
        assert_eq!(m.triangles().len(), 4 + 4 + 12); // 2 caps x 4 tris + 6 sides x 2
    }

    #[test]
    fn t_tube_volume() {
        let (bl, bt, sl, st, d) = (0.06, 0.02, 0.04, 0.02, 0.025);
        let m = t_tube(bl, bt, sl, st, d);
        let expect = bl * bt * d + st * sl * d;
        assert!((m.volume() - expect).abs() < 1e-12);
    }

    #[test]
    fn icosphere_two_subdivisions_has_320_triangles() {
        let m = icosphere(0.05, 2);
        assert_eq!(m.triangles().len(), 320);
        for v in m.vertices() {
            assert!((v.coords.norm() - 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn t_tube_com_sits_in_the_bar() {
        let m = t_tube(0.06, 0.02, 0.04, 0.02, 0.025);
        let com = m.center_of_mass();
        assert!(com.x.abs() < 1e-12);
        assert!(com.y > 0.0, "bar is heavier than the stem: {com:?}");
    }
}
