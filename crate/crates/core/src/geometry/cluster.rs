//! Coplanar facet clustering and contact-point sampling on clusters.

use std::collections::{HashMap, VecDeque};

use nalgebra::{Point2, Point3, Unit, Vector3};

use super::hull::orthonormal_to;
use super::polygon::{point_in_polygon, polygon_area, polygon_centroid};
use super::{TriMesh, PREDICATE_TOL};

/// A maximal set of adjacency-connected, coplanar triangles.
#[derive(Debug, Clone)]
pub struct FacetCluster {
    /// Member triangle indices into the source mesh.
    pub triangles: Vec<usize>,
    /// Area-weighted mean normal of the members.
    pub normal: Unit<Vector3<f64>>,
    /// Outer boundary polygon, ordered CCW around `normal`.
    pub boundary: Vec<Point3<f64>>,
    /// Area centroid of the boundary polygon.
    pub centroid: Point3<f64>,
    /// In-plane principal axes from the boundary covariance.
    pub x1: Unit<Vector3<f64>>,
    pub x2: Unit<Vector3<f64>>,
    /// Extents of the boundary along `x1` relative to the centroid.
    pub e1: (f64, f64),
    /// Extents of the boundary along `x2` relative to the centroid.
    pub e2: (f64, f64),
}

impl FacetCluster {
    /// Boundary polygon projected onto the (x1, x2) frame at the centroid.
    pub fn boundary_2d(&self) -> Vec<Point2<f64>> {
        self.boundary
            .iter()
            .map(|p| {
                let d = p - self.centroid;
                Point2::new(self.x1.dot(&d), self.x2.dot(&d))
            })
            .collect()
    }

    /// Project a 3D point into the cluster frame.
    pub fn to_plane(&self, p: &Point3<f64>) -> Point2<f64> {
        let d = p - self.centroid;
        Point2::new(self.x1.dot(&d), self.x2.dot(&d))
    }
}

/// Merge adjacency-connected triangles whose normals deviate from the
/// cluster mean by less than `angle_tol` radians. Clusters partition the
/// triangle set.
pub fn cluster_facets(mesh: &TriMesh, angle_tol: f64) -> Vec<FacetCluster> {
    assert!(
        angle_tol > 0.0 && angle_tol < std::f64::consts::FRAC_PI_2,
        "angle_tol must be in (0, pi/2)"
    );
    let cos_tol = angle_tol.cos();
    let nt = mesh.triangles().len();

    // Edge (sorted vertex pair) -> incident triangles.
    let mut edge_map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            edge_map.entry((a.min(b), a.max(b))).or_default().push(t);
        }
    }
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); nt];
    for tris in edge_map.values() {
        for &a in tris {
            for &b in tris {
                if a != b {
                    neighbors[a].push(b);
                }
            }
        }
    }
    for n in &mut neighbors {
        n.sort_unstable();
        n.dedup();
    }

    let mut assigned = vec![false; nt];
    let mut clusters = Vec::new();
    for seed in 0..nt {
        if assigned[seed] {
            continue;
        }
        assigned[seed] = true;
        let mut members = vec![seed];
        let mut mean = mesh.normals()[seed].into_inner() * mesh.triangle_area(seed);
        let mut queue = VecDeque::from([seed]);
        while let Some(t) = queue.pop_front() {
            for &nb in &neighbors[t] {
                if assigned[nb] {
                    continue;
                }
                let mean_unit = mean.normalize();
                if mesh.normals()[nb].dot(&mean_unit) > cos_tol {
                    assigned[nb] = true;
                    members.push(nb);
                    mean += mesh.normals()[nb].into_inner() * mesh.triangle_area(nb);
                    queue.push_back(nb);
                }
            }
        }
        members.sort_unstable();
        clusters.push(finish_cluster(mesh, members, Unit::new_normalize(mean)));
    }
    clusters
}

fn finish_cluster(mesh: &TriMesh, members: Vec<usize>, normal: Unit<Vector3<f64>>) -> FacetCluster {
    let boundary = boundary_loop(mesh, &members, &normal);

    // Plane frame for in-plane computations.
    let u = orthonormal_to(&normal);
    let v = Unit::new_normalize(normal.cross(&u));
    let uv: Vec<Point2<f64>> = boundary
        .iter()
        .map(|p| Point2::new(u.dot(&p.coords), v.dot(&p.coords)))
        .collect();
    let c2 = polygon_centroid(&uv);

    // Covariance of the boundary vertices about the centroid.
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &uv {
        let d = p - c2;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    // Leading eigenvector of [[sxx, sxy], [sxy, syy]].
    let dir2 = if sxy.abs() < 1e-18 && (sxx - syy).abs() < 1e-18 {
        Vector3::new(1.0, 0.0, 0.0).xy().into()
    } else {
        let tr = sxx + syy;
        let det = sxx * syy - sxy * sxy;
        let lam = tr / 2.0 + (tr * tr / 4.0 - det).max(0.0).sqrt();
        if sxy.abs() > 1e-18 {
            nalgebra::Vector2::new(lam - syy, sxy).normalize()
        } else if sxx >= syy {
            nalgebra::Vector2::new(1.0, 0.0)
        } else {
            nalgebra::Vector2::new(0.0, 1.0)
        }
    };
    let mut x1 = Unit::new_normalize(u.into_inner() * dir2.x + v.into_inner() * dir2.y);
    // Canonical sign: lexicographically positive.
    let xi = x1.into_inner();
    if (xi.x, xi.y, xi.z) < (-xi.x, -xi.y, -xi.z) {
        x1 = Unit::new_unchecked(-xi);
    }
    let x2 = Unit::new_normalize(normal.cross(&x1));

    // Lift the 2D area centroid back to 3D; keep it on the cluster plane.
    let plane_pt = boundary[0];
    let off = normal.dot(&plane_pt.coords);
    let centroid = Point3::from(u.into_inner() * c2.x + v.into_inner() * c2.y + normal.into_inner() * off);

    let mut e1 = (f64::INFINITY, f64::NEG_INFINITY);
    let mut e2 = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &boundary {
        let d = p - centroid;
        let a = x1.dot(&d);
        let b = x2.dot(&d);
        e1.0 = e1.0.min(a);
        e1.1 = e1.1.max(a);
        e2.0 = e2.0.min(b);
        e2.1 = e2.1.max(b);
    }

    FacetCluster {
        triangles: members,
        normal,
        boundary,
        centroid,
        x1,
        x2,
        e1,
        e2,
    }
}

/// Outer boundary of a triangle set: directed edges used exactly once,
/// chained into the loop with the largest enclosed area.
fn boundary_loop(mesh: &TriMesh, members: &[usize], normal: &Unit<Vector3<f64>>) -> Vec<Point3<f64>> {
    let mut directed: HashMap<(usize, usize), ()> = HashMap::new();
    for &t in members {
        let tri = mesh.triangles()[t];
        for k in 0..3 {
            directed.insert((tri[k], tri[(k + 1) % 3]), ());
        }
    }
    // A directed edge is on the boundary iff its reverse is absent.
    let mut next: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(a, b) in directed.keys() {
        if !directed.contains_key(&(b, a)) {
            next.entry(a).or_default().push(b);
        }
    }
    for v in next.values_mut() {
        v.sort_unstable();
    }

    let u = orthonormal_to(normal);
    let vv = Unit::new_normalize(normal.cross(&u));
    let mut best: Vec<usize> = Vec::new();
    let mut best_area = -1.0;
    let mut starts: Vec<usize> = next.keys().copied().collect();
    starts.sort_unstable();
    let mut used: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    for s in starts {
        let firsts = next[&s].clone();
        for f in firsts {
            if used.contains(&(s, f)) {
                continue;
            }
            let mut ring = vec![s];
            let mut cur = f;
            used.insert((s, cur));
            while cur != s {
                ring.push(cur);
                let Some(cands) = next.get(&cur) else { break };
                let Some(&nx) = cands.iter().find(|&&n| !used.contains(&(cur, n))) else {
                    break;
                };
                used.insert((cur, nx));
                cur = nx;
            }
            if cur == s && ring.len() >= 3 {
                let uv: Vec<Point2<f64>> = ring
                    .iter()
                    .map(|&i| {
                        let p = mesh.vertices()[i];
                        Point2::new(u.dot(&p.coords), vv.dot(&p.coords))
                    })
                    .collect();
                let area = polygon_area(&uv).abs();
                if area > best_area {
                    best_area = area;
                    best = ring;
                }
            }
        }
    }
    best.iter().map(|&i| mesh.vertices()[i]).collect()
}

/// Sample a grid of contact points on the cluster: p = centroid + w1*x1 +
/// w2*x2 with w on multiples of `step` inside the extents (inclusive
/// endpoints), filtered to the boundary polygon.
pub fn sample_cluster(cluster: &FacetCluster, step: f64) -> Vec<Point3<f64>> {
    assert!(step > 0.0, "step must be positive");
    let poly = cluster.boundary_2d();
    let eps = PREDICATE_TOL;
    let range = |lo: f64, hi: f64| {
        let k0 = ((lo - eps) / step).ceil() as i64;
        let k1 = ((hi + eps) / step).floor() as i64;
        (k0, k1)
    };
    let (a0, a1) = range(cluster.e1.0, cluster.e1.1);
    let (b0, b1) = range(cluster.e2.0, cluster.e2.1);
    let mut out = Vec::new();
    for ka in a0..=a1 {
        for kb in b0..=b1 {
            let w1 = ka as f64 * step;
            let w2 = kb as f64 * step;
            if point_in_polygon(&poly, &Point2::new(w1, w2), eps) {
                out.push(cluster.centroid + cluster.x1.into_inner() * w1 + cluster.x2.into_inner() * w2);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;

    #[test]
    fn cube_clusters_into_six_faces() {
        let cube = shapes::box_mesh(0.05, 0.05, 0.05);
        let clusters = cluster_facets(&cube, 0.01);
        assert_eq!(clusters.len(), 6);
        for c in &clusters {
            assert_eq!(c.triangles.len(), 2);
            assert_eq!(c.boundary.len(), 4);
        }
    }

    #[test]
    fn l_block_clusters_into_eight_faces() {
        let l = shapes::l_block(0.05, 0.02, 0.05, 0.02, 0.03);
        let clusters = cluster_facets(&l, 0.01);
        assert_eq!(clusters.len(), 8);
    }

    #[test]
    fn sphere_stays_singletons() {
        let s = shapes::icosphere(0.05, 2);
        let clusters = cluster_facets(&s, 0.01);
        assert_eq!(clusters.len(), 320);
    }

    #[test]
    fn clusters_partition_triangles() {
        for tol in [0.005, 0.01, 0.2, 1.0] {
            let l = shapes::l_block(0.05, 0.02, 0.05, 0.02, 0.03);
            let clusters = cluster_facets(&l, tol);
            let mut seen = vec![0usize; l.triangles().len()];
            for c in &clusters {
                for &t in &c.triangles {
                    seen[t] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1), "partition violated at tol {tol}");
        }
    }

    #[test]
    fn cluster_axes_are_orthonormal() {
        let l = shapes::l_block(0.05, 0.02, 0.05, 0.02, 0.03);
        for c in cluster_facets(&l, 0.01) {
            assert!(c.x1.dot(&c.x2).abs() < 1e-9);
            assert!(c.x1.dot(&c.normal).abs() < 1e-9);
            assert!(c.x2.dot(&c.normal).abs() < 1e-9);
            for &t in &c.triangles {
                assert!(c.normal.dot(&l.normals()[t]) > 0.01f64.cos());
            }
        }
    }

    #[test]
    fn square_face_sampling_counts() {
        let cube = shapes::box_mesh(0.05, 0.05, 0.05);
        let clusters = cluster_facets(&cube, 0.01);
        // 0.05 x 0.05 face at step 0.01: offsets -0.02..0.02 -> 5x5 grid.
        for c in &clusters {
            assert_eq!(sample_cluster(c, 0.01).len(), 25);
        }
        // Step larger than the extents: only the centroid.
        let pts = sample_cluster(&clusters[0], 0.2);
        assert_eq!(pts.len(), 1);
        assert!((pts[0] - clusters[0].centroid).norm() < 1e-12);
    }

    #[test]
    fn triangular_face_sampling_excludes_outside() {
        // A single right triangle in the xy plane.
        let m = TriMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(0.06, 0.0, 0.0),
                Point3::new(0.0, 0.06, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let clusters = cluster_facets(&m, 0.01);
        assert_eq!(clusters.len(), 1);
        let pts = sample_cluster(&clusters[0], 0.01);
        // Oracle: every sampled point must be inside the triangle.
        for p in &pts {
            assert!(p.x >= -1e-9 && p.y >= -1e-9 && p.x + p.y <= 0.06 + 1e-9);
        }
        // And some grid positions were excluded (full grid would exceed this).
        let side = ((0.06 / 0.01) as usize + 1).pow(2);
        assert!(pts.len() < side);
        assert!(!pts.is_empty());
    }

    #[test]
    fn boundary_of_l_cap_is_hexagon() {
        let l = shapes::l_block(0.05, 0.02, 0.05, 0.02, 0.03);
        let clusters = cluster_facets(&l, 0.01);
        let caps: Vec<_> = clusters
            .iter()
            .filter(|c| c.normal.z.abs() > 0.99)
            .collect();
        assert_eq!(caps.len(), 2);
        for c in caps {
            assert_eq!(c.boundary.len(), 6);
        }
    }
}
