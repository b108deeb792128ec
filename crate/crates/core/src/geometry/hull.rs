//! Convex hulls: an incremental d-dimensional hull used both for 3D object
//! hulls (with coplanar facets merged into maximal polygons) and for 6D
//! contact wrench spaces.

use nalgebra::{Point2, Point3, Unit, Vector3};

use super::{GeometryError, COPLANAR_TOL, PREDICATE_TOL};

/// One facet of a d-dimensional hull: a (d-1)-simplex with outward unit
/// normal `n` satisfying `n . x <= offset` for every hull point.
#[derive(Debug, Clone)]
pub struct NdFacet {
    pub vertices: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Determinant by Gaussian elimination with partial pivoting; `m` is n x n
/// row-major and is consumed.
fn det_in_place(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for r in col + 1..n {
            if m[r * n + col].abs() > m[pivot * n + col].abs() {
                pivot = r;
            }
        }
        if m[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for c in 0..n {
                m.swap(pivot * n + c, col * n + c);
            }
            det = -det;
        }
        det *= m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / m[col * n + col];
            for c in col..n {
                m[r * n + c] -= f * m[col * n + c];
            }
        }
    }
    det
}

/// Unit normal of the hyperplane through `verts` (d points in d dims) via the
/// generalized cross product of the d-1 edge vectors.
fn facet_normal(points: &[Vec<f64>], verts: &[usize], dim: usize) -> Option<Vec<f64>> {
    let base = &points[verts[0]];
    let mut edges = Vec::with_capacity((dim - 1) * dim);
    for &v in &verts[1..] {
        for k in 0..dim {
            edges.push(points[v][k] - base[k]);
        }
    }
    let m = dim - 1;
    let mut normal = vec![0.0; dim];
    let mut minor = vec![0.0; m * m];
    for j in 0..dim {
        for r in 0..m {
            let mut cc = 0;
            for c in 0..dim {
                if c == j {
                    continue;
                }
                minor[r * m + cc] = edges[r * dim + c];
                cc += 1;
            }
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        normal[j] = sign * det_in_place(&mut minor, m);
    }
    let len = dot(&normal, &normal).sqrt();
    if len <= 0.0 {
        return None;
    }
    for x in &mut normal {
        *x /= len;
    }
    Some(normal)
}

struct WorkFacet {
    vertices: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

/// Incremental convex hull of `points` in `dim` dimensions.
///
/// Returns the facets of the hull, or `DegenerateInput` when the points do
/// not span `dim` dimensions (within `tol`).
pub fn hull_nd(points: &[Vec<f64>], dim: usize, tol: f64) -> Result<Vec<NdFacet>, GeometryError> {
    if points.len() < dim + 1 {
        return Err(GeometryError::DegenerateInput(format!(
            "need at least {} points for a {dim}-dimensional hull",
            dim + 1
        )));
    }
    let simplex = initial_simplex(points, dim, tol)?;

    let mut interior = vec![0.0; dim];
    for &v in &simplex {
        for k in 0..dim {
            interior[k] += points[v][k];
        }
    }
    for x in &mut interior {
        *x /= (dim + 1) as f64;
    }

    let oriented = |mut normal: Vec<f64>, verts: &[usize]| -> (Vec<f64>, f64) {
        let mut offset = dot(&normal, &points[verts[0]]);
        if dot(&normal, &interior) > offset {
            for x in &mut normal {
                *x = -*x;
            }
            offset = -offset;
        }
        (normal, offset)
    };

    let mut facets: Vec<WorkFacet> = Vec::new();
    for omit in 0..=dim {
        let verts: Vec<usize> = simplex
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != omit)
            .map(|(_, &v)| v)
            .collect();
        let normal = facet_normal(points, &verts, dim)
            .ok_or_else(|| GeometryError::DegenerateInput("flat initial simplex".into()))?;
        let (normal, offset) = oriented(normal, &verts);
        facets.push(WorkFacet {
            vertices: verts,
            normal,
            offset,
            outside: Vec::new(),
            alive: true,
        });
    }

    let mut pending: Vec<usize> = (0..points.len()).filter(|i| !simplex.contains(i)).collect();
    assign_outside(points, &mut facets, &mut pending, tol);

    loop {
        let Some(fi) = facets.iter().position(|f| f.alive && !f.outside.is_empty()) else {
            break;
        };
        // Farthest outside point of this facet, lowest index on ties.
        let mut best = facets[fi].outside[0];
        let mut best_d = f64::NEG_INFINITY;
        for &p in &facets[fi].outside {
            let d = dot(&facets[fi].normal, &points[p]) - facets[fi].offset;
            if d > best_d + PREDICATE_TOL || (d > best_d - PREDICATE_TOL && p < best) {
                best_d = d;
                best = p;
            }
        }
        let apex = best;

        let visible: Vec<usize> = facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && dot(&f.normal, &points[apex]) - f.offset > tol)
            .map(|(i, _)| i)
            .collect();

        // Horizon ridges appear in exactly one visible facet.
        let mut ridge_count: std::collections::HashMap<Vec<usize>, usize> =
            std::collections::HashMap::new();
        for &vi in &visible {
            let verts = &facets[vi].vertices;
            for omit in 0..verts.len() {
                let mut ridge: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != omit)
                    .map(|(_, &v)| v)
                    .collect();
                ridge.sort_unstable();
                *ridge_count.entry(ridge).or_insert(0) += 1;
            }
        }
        let mut horizon: Vec<Vec<usize>> = ridge_count
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(r, _)| r)
            .collect();
        horizon.sort_unstable();

        let mut freed: Vec<usize> = Vec::new();
        for &vi in &visible {
            facets[vi].alive = false;
            freed.append(&mut facets[vi].outside);
        }
        freed.sort_unstable();
        freed.dedup();

        for ridge in horizon {
            let mut verts = ridge;
            verts.push(apex);
            let Some(normal) = facet_normal(points, &verts, dim) else {
                continue; // ridge degenerate with the apex; skip
            };
            let (normal, offset) = oriented(normal, &verts);
            facets.push(WorkFacet {
                vertices: verts,
                normal,
                offset,
                outside: Vec::new(),
                alive: true,
            });
        }
        assign_outside(points, &mut facets, &mut freed, tol);
    }

    Ok(facets
        .into_iter()
        .filter(|f| f.alive)
        .map(|f| NdFacet {
            vertices: f.vertices,
            normal: f.normal,
            offset: f.offset,
        })
        .collect())
}

fn assign_outside(
    points: &[Vec<f64>],
    facets: &mut [WorkFacet],
    pending: &mut Vec<usize>,
    tol: f64,
) {
    'point: for &p in pending.iter() {
        for f in facets.iter_mut() {
            if f.alive && dot(&f.normal, &points[p]) - f.offset > tol {
                f.outside.push(p);
                continue 'point;
            }
        }
        // Below every facet: interior, dropped.
    }
    pending.clear();
}

/// Greedy affinely-independent seed simplex (d+1 point indices).
fn initial_simplex(
    points: &[Vec<f64>],
    dim: usize,
    tol: f64,
) -> Result<Vec<usize>, GeometryError> {
    // Lexicographically smallest point as the deterministic anchor.
    let p0 = (0..points.len())
        .min_by(|&a, &b| {
            points[a]
                .iter()
                .zip(&points[b])
                .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        })
        .unwrap();
    let mut chosen = vec![p0];
    let mut basis: Vec<Vec<f64>> = Vec::new(); // orthonormalized span directions
    while chosen.len() < dim + 1 {
        let origin = &points[chosen[0]];
        let mut best = None;
        let mut best_d = tol;
        for (i, p) in points.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut r: Vec<f64> = p.iter().zip(origin).map(|(a, b)| a - b).collect();
            for b in &basis {
                let c = dot(&r, b);
                for k in 0..dim {
                    r[k] -= c * b[k];
                }
            }
            let d = dot(&r, &r).sqrt();
            if d > best_d {
                best_d = d;
                best = Some((i, r));
            }
        }
        let Some((i, mut r)) = best else {
            return Err(GeometryError::DegenerateInput(format!(
                "points span only {} of {dim} dimensions",
                chosen.len() - 1
            )));
        };
        for x in &mut r {
            *x /= best_d;
        }
        basis.push(r);
        chosen.push(i);
    }
    Ok(chosen)
}

/// A planar facet of a 3D convex hull: an outward-facing convex polygon.
#[derive(Debug, Clone)]
pub struct HullFacet {
    /// Polygon corners, counter-clockwise when viewed from outside.
    pub polygon: Vec<Point3<f64>>,
    pub normal: Unit<Vector3<f64>>,
    /// Plane offset: `normal . x = offset` on the facet.
    pub offset: f64,
}

/// A 3D convex hull with coplanar facets merged into maximal polygons.
#[derive(Debug, Clone)]
pub struct ConvexHull {
    pub vertices: Vec<Point3<f64>>,
    pub facets: Vec<HullFacet>,
}

impl ConvexHull {
    /// Signed distance of a point to the hull boundary along facet planes
    /// (max over facets; negative inside).
    pub fn signed_distance(&self, p: &Point3<f64>) -> f64 {
        self.facets
            .iter()
            .map(|f| f.normal.dot(&p.coords) - f.offset)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: &Point3<f64>, tol: f64) -> bool {
        self.signed_distance(p) <= tol
    }
}

/// Convex hull of 3D points with the default coplanarity merge tolerance.
pub fn convex_hull(points: &[Point3<f64>]) -> Result<ConvexHull, GeometryError> {
    convex_hull_with(points, COPLANAR_TOL)
}

/// Convex hull of 3D points, merging facets whose normals differ by less
/// than `merge_tol` radians into single polygons.
pub fn convex_hull_with(
    points: &[Point3<f64>],
    merge_tol: f64,
) -> Result<ConvexHull, GeometryError> {
    let flat: Vec<Vec<f64>> = points.iter().map(|p| vec![p.x, p.y, p.z]).collect();
    let tris = hull_nd(&flat, 3, PREDICATE_TOL)?;

    // Group triangle facets by plane orientation. On a convex hull a given
    // outward direction supports exactly one face, so the normal alone is a
    // sufficient grouping key.
    let cos_tol = merge_tol.cos();
    let mut groups: Vec<(Vector3<f64>, Vec<usize>)> = Vec::new();
    for (i, f) in tris.iter().enumerate() {
        let n = Vector3::new(f.normal[0], f.normal[1], f.normal[2]);
        match groups
            .iter_mut()
            .find(|(gn, _)| gn.normalize().dot(&n) > cos_tol)
        {
            Some((gn, members)) => {
                *gn += n;
                members.push(i);
            }
            None => groups.push((n, vec![i])),
        }
    }

    let mut facets = Vec::with_capacity(groups.len());
    let mut hull_vertex_ids: Vec<usize> = Vec::new();
    for (gn, members) in groups {
        let normal = Unit::new_normalize(gn);
        let mut offset = 0.0;
        let mut cnt = 0;
        for &m in &members {
            for &v in &tris[m].vertices {
                offset += normal.dot(&points[v].coords);
                cnt += 1;
            }
        }
        offset /= cnt as f64;

        // Re-collect every input point on this plane so corners that were
        // coplanar with already-built facets are not lost, then take their
        // 2D hull as the facet polygon.
        let plane_tol = PREDICATE_TOL * 10.0;
        let on_plane: Vec<usize> = (0..points.len())
            .filter(|&i| (normal.dot(&points[i].coords) - offset).abs() <= plane_tol)
            .collect();
        let u = orthonormal_to(&normal);
        let v = Unit::new_normalize(normal.cross(&u));
        let uv: Vec<Point2<f64>> = on_plane
            .iter()
            .map(|&i| Point2::new(u.dot(&points[i].coords), v.dot(&points[i].coords)))
            .collect();
        let ring = convex_hull_2d(&uv);
        if ring.len() < 3 {
            continue;
        }
        let polygon: Vec<Point3<f64>> = ring.iter().map(|&k| points[on_plane[k]]).collect();
        hull_vertex_ids.extend(ring.iter().map(|&k| on_plane[k]));
        facets.push(HullFacet {
            polygon,
            normal,
            offset,
        });
    }
    hull_vertex_ids.sort_unstable();
    hull_vertex_ids.dedup();
    Ok(ConvexHull {
        vertices: hull_vertex_ids.iter().map(|&i| points[i]).collect(),
        facets,
    })
}

/// Any unit vector orthogonal to `n`.
pub fn orthonormal_to(n: &Unit<Vector3<f64>>) -> Unit<Vector3<f64>> {
    let pick = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    Unit::new_normalize(n.cross(&pick))
}

/// Monotone-chain 2D convex hull; returns indices in CCW order.
pub fn convex_hull_2d(points: &[Point2<f64>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a]
            .x
            .partial_cmp(&points[b].x)
            .unwrap()
            .then(points[a].y.partial_cmp(&points[b].y).unwrap())
            .then(a.cmp(&b))
    });
    idx.dedup_by(|&mut a, &mut b| (points[a] - points[b]).norm() < PREDICATE_TOL);
    let n = idx.len();
    if n < 3 {
        return idx;
    }
    let cross = |o: usize, a: usize, b: usize| {
        let (po, pa, pb) = (points[o], points[a], points[b]);
        (pa.x - po.x) * (pb.y - po.y) - (pa.y - po.y) * (pb.x - po.x)
    };
    let mut ring: Vec<usize> = Vec::with_capacity(2 * n);
    for &i in &idx {
        while ring.len() >= 2 && cross(ring[ring.len() - 2], ring[ring.len() - 1], i) <= PREDICATE_TOL {
            ring.pop();
        }
        ring.push(i);
    }
    let lower_len = ring.len() + 1;
    for &i in idx.iter().rev() {
        while ring.len() >= lower_len && cross(ring[ring.len() - 2], ring[ring.len() - 1], i) <= PREDICATE_TOL
        {
            ring.pop();
        }
        ring.push(i);
    }
    ring.pop();
    ring
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;

    #[test]
    fn cube_hull_has_six_quads() {
        let cube = shapes::box_mesh(1.0, 1.0, 1.0);
        let hull = convex_hull(cube.vertices()).unwrap();
        assert_eq!(hull.facets.len(), 6);
        for f in &hull.facets {
            assert_eq!(f.polygon.len(), 4, "cube facet should be a quad");
        }
        assert_eq!(hull.vertices.len(), 8);
    }

    #[test]
    fn interior_point_is_ignored() {
        let cube = shapes::box_mesh(1.0, 1.0, 1.0);
        let mut pts = cube.vertices().to_vec();
        pts.push(Point3::origin());
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.facets.len(), 6);
        assert_eq!(hull.vertices.len(), 8);
    }

    #[test]
    fn l_block_hull_has_seven_facets() {
        let l = shapes::l_block(0.05, 0.02, 0.05, 0.02, 0.03);
        let hull = convex_hull(l.vertices()).unwrap();
        assert_eq!(hull.facets.len(), 7);
    }

    #[test]
    fn l_block_hull_matches_triple_enumeration_oracle() {
        // Oracle: a plane through three points is a hull plane iff all points
        // lie on one side of it; count distinct planes by brute force.
        let l = shapes::l_block(0.05, 0.02, 0.05, 0.02, 0.03);
        let pts = l.vertices();
        let mut planes: Vec<(Vector3<f64>, f64)> = Vec::new();
        let n = pts.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let nrm = (pts[j] - pts[i]).cross(&(pts[k] - pts[i]));
                    if nrm.norm() < 1e-12 {
                        continue;
                    }
                    let nrm = nrm.normalize();
                    let d = nrm.dot(&pts[i].coords);
                    let side = |s: f64| pts.iter().all(|p| s * (nrm.dot(&p.coords) - d) <= 1e-9);
                    let (nrm, d) = if side(1.0) {
                        (nrm, d)
                    } else if side(-1.0) {
                        (-nrm, -d)
                    } else {
                        continue;
                    };
                    if !planes
                        .iter()
                        .any(|(pn, pd)| pn.dot(&nrm) > 0.999999 && (pd - d).abs() < 1e-9)
                    {
                        planes.push((nrm, d));
                    }
                }
            }
        }
        let hull = convex_hull(pts).unwrap();
        assert_eq!(hull.facets.len(), planes.len());
    }

    #[test]
    fn tetrahedron_hull() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.facets.len(), 4);
        assert_eq!(hull.vertices.len(), 4);
    }

    #[test]
    fn coplanar_points_are_degenerate() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.3, 0.7, 0.0),
        ];
        assert!(matches!(
            convex_hull(&pts),
            Err(GeometryError::DegenerateInput(_))
        ));
    }

    #[test]
    fn containment_invariant_for_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let pts: Vec<Point3<f64>> = (0..30)
                .map(|_| {
                    Point3::new(
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                        rng.gen_range(-1.0..1.0),
                    )
                })
                .collect();
            let hull = convex_hull(&pts).unwrap();
            for p in &pts {
                assert!(
                    hull.signed_distance(p) <= 1e-9,
                    "point {p:?} escapes hull by {}",
                    hull.signed_distance(p)
                );
            }
        }
    }

    #[test]
    fn hull_invariant_under_permutation() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let l = shapes::l_block(0.05, 0.02, 0.05, 0.02, 0.03);
        let mut pts = l.vertices().to_vec();
        let base = convex_hull(&pts).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            pts.shuffle(&mut rng);
            let hull = convex_hull(&pts).unwrap();
            assert_eq!(hull.facets.len(), base.facets.len());
            let mut a: Vec<_> = hull
                .facets
                .iter()
                .map(|f| {
                    let n = f.normal.into_inner();
                    ((n.x * 1e6).round() as i64, (n.y * 1e6).round() as i64, (n.z * 1e6).round() as i64)
                })
                .collect();
            let mut b: Vec<_> = base
                .facets
                .iter()
                .map(|f| {
                    let n = f.normal.into_inner();
                    ((n.x * 1e6).round() as i64, (n.y * 1e6).round() as i64, (n.z * 1e6).round() as i64)
                })
                .collect();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn six_dimensional_cross_polytope() {
        // +-e_i in 6D: hull is the cross-polytope with 2^6 facets, every
        // facet plane at distance 1/sqrt(6) from the origin.
        let mut pts = Vec::new();
        for i in 0..6 {
            for s in [-1.0, 1.0] {
                let mut p = vec![0.0; 6];
                p[i] = s;
                pts.push(p);
            }
        }
        let facets = hull_nd(&pts, 6, 1e-9).unwrap();
        assert_eq!(facets.len(), 64);
        let d0 = 1.0 / 6.0f64.sqrt();
        for f in &facets {
            assert!((f.offset - d0).abs() < 1e-9);
        }
    }
}
