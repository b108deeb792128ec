//! Narrow-phase collision and distance primitives: triangle meshes under
//! rigid poses, and capsules for robot links.

use nalgebra::{Isometry3, Point3, Vector3};

use super::TriMesh;

/// Surfaces closer than this count as colliding (meters).
pub const CONTACT_EPS: f64 = 1e-4;

/// A capsule (swept sphere) between two world-frame endpoints.
#[derive(Debug, Clone, Copy)]
pub struct Capsule {
    pub a: Point3<f64>,
    pub b: Point3<f64>,
    pub radius: f64,
}

impl Capsule {
    pub fn transformed(&self, iso: &Isometry3<f64>) -> Capsule {
        Capsule {
            a: iso * self.a,
            b: iso * self.b,
            radius: self.radius,
        }
    }
}

/// A mesh with its pose baked into world-frame vertices, plus cached bounds.
#[derive(Debug, Clone)]
pub struct PosedMesh {
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[usize; 3]>,
    aabb: (Point3<f64>, Point3<f64>),
}

impl PosedMesh {
    pub fn new(mesh: &TriMesh, pose: &Isometry3<f64>) -> PosedMesh {
        let vertices: Vec<Point3<f64>> = mesh.vertices().iter().map(|v| pose * v).collect();
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        PosedMesh {
            vertices,
            triangles: mesh.triangles().to_vec(),
            aabb: (lo, hi),
        }
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn aabb(&self) -> (Point3<f64>, Point3<f64>) {
        self.aabb
    }

    fn tri(&self, i: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.triangles[i];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn min_z(&self) -> f64 {
        self.aabb.0.z
    }
}

fn aabb_distance(a: &(Point3<f64>, Point3<f64>), b: &(Point3<f64>, Point3<f64>)) -> f64 {
    let mut d2 = 0.0;
    for k in 0..3 {
        let gap = (b.0[k] - a.1[k]).max(a.0[k] - b.1[k]).max(0.0);
        d2 += gap * gap;
    }
    d2.sqrt()
}

fn tri_aabb(t: &[Point3<f64>; 3]) -> (Point3<f64>, Point3<f64>) {
    let mut lo = t[0];
    let mut hi = t[0];
    for p in &t[1..] {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Closest distance between two segments [p1,q1] and [p2,q2].
pub fn segment_segment_distance(
    p1: Point3<f64>,
    q1: Point3<f64>,
    p2: Point3<f64>,
    q2: Point3<f64>,
) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if a <= 1e-18 && e <= 1e-18 {
        return r.norm();
    }
    if a <= 1e-18 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= 1e-18 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut sv = if denom > 1e-18 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut tv = (b * sv + f) / e;
            if tv < 0.0 {
                tv = 0.0;
                sv = (-c / a).clamp(0.0, 1.0);
            } else if tv > 1.0 {
                tv = 1.0;
                sv = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = sv;
            t = tv;
        }
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

/// Closest point on triangle (a, b, c) to `p` (Ericson's region test).
fn closest_point_on_triangle(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> Point3<f64> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

pub fn point_triangle_distance(
    p: &Point3<f64>,
    tri: &[Point3<f64>; 3],
) -> f64 {
    (p - closest_point_on_triangle(p, &tri[0], &tri[1], &tri[2])).norm()
}

/// Closest distance between a segment and a triangle; zero when the segment
/// pierces the triangle.
pub fn segment_triangle_distance(p: Point3<f64>, q: Point3<f64>, tri: &[Point3<f64>; 3]) -> f64 {
    let n = (tri[1] - tri[0]).cross(&(tri[2] - tri[0]));
    let dp = n.dot(&(p - tri[0]));
    let dq = n.dot(&(q - tri[0]));
    if dp * dq < 0.0 && n.norm_squared() > 1e-24 {
        // Segment crosses the supporting plane; piercing if the crossing
        // point lies inside the triangle.
        let t = dp / (dp - dq);
        let x = p + (q - p) * t;
        let c = closest_point_on_triangle(&x, &tri[0], &tri[1], &tri[2]);
        if (x - c).norm_squared() <= 1e-24 {
            return 0.0;
        }
    }
    let mut best = point_triangle_distance(&p, tri).min(point_triangle_distance(&q, tri));
    for k in 0..3 {
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        best = best.min(segment_segment_distance(p, q, a, b));
    }
    best
}

/// Closest distance between two triangles (zero when intersecting).
pub fn triangle_triangle_distance(t1: &[Point3<f64>; 3], t2: &[Point3<f64>; 3]) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..3 {
        best = best.min(segment_triangle_distance(t1[k], t1[(k + 1) % 3], t2));
        best = best.min(segment_triangle_distance(t2[k], t2[(k + 1) % 3], t1));
        if best == 0.0 {
            return 0.0;
        }
    }
    best
}

// Fixed ray directions for point-in-mesh parity tests; the fallbacks dodge
// edge-grazing degeneracies.
const RAY_DIRS: [[f64; 3]; 5] = [
    [0.577_350_269, 0.577_350_269, 0.577_350_269],
    [0.267_261_241, 0.534_522_483, 0.801_783_725],
    [-0.455_842_305, 0.569_802_882, 0.683_763_458],
    [0.816_496_580, -0.408_248_290, 0.408_248_290],
    [-0.301_511_344, -0.904_534_033, -0.301_511_344],
];

/// Point containment in a closed mesh by ray-crossing parity.
pub fn point_in_mesh(p: &Point3<f64>, mesh: &PosedMesh) -> bool {
    let (lo, hi) = mesh.aabb();
    for k in 0..3 {
        if p[k] < lo[k] - 1e-12 || p[k] > hi[k] + 1e-12 {
            return false;
        }
    }
    'dirs: for d in RAY_DIRS {
        let dir = Vector3::new(d[0], d[1], d[2]);
        let mut crossings = 0usize;
        for i in 0..mesh.triangles().len() {
            let tri = mesh.tri(i);
            match ray_triangle(p, &dir, &tri) {
                RayHit::Miss => {}
                RayHit::Hit(t) => {
                    if t > 1e-12 {
                        crossings += 1;
                    } else {
                        continue 'dirs; // origin on the surface
                    }
                }
                RayHit::Grazing => continue 'dirs,
            }
        }
        return crossings % 2 == 1;
    }
    // Every direction grazed an edge: the point is effectively on the
    // surface, which counts as contained for collision purposes.
    true
}

enum RayHit {
    Miss,
    Hit(f64),
    Grazing,
}

fn ray_triangle(orig: &Point3<f64>, dir: &Vector3<f64>, tri: &[Point3<f64>; 3]) -> RayHit {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    if det.abs() < 1e-14 {
        return RayHit::Miss; // parallel; a piercing parallel ray grazes an edge anyway
    }
    let inv = 1.0 / det;
    let tvec = orig - tri[0];
    let u = tvec.dot(&pvec) * inv;
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv;
    let edge_eps = 1e-10;
    if u < -edge_eps || v < -edge_eps || u + v > 1.0 + edge_eps {
        return RayHit::Miss;
    }
    if u < edge_eps || v < edge_eps || u + v > 1.0 - edge_eps {
        return RayHit::Grazing;
    }
    let t = e2.dot(&qvec) * inv;
    if t < 0.0 {
        RayHit::Miss
    } else {
        RayHit::Hit(t)
    }
}

/// Minimum surface distance between two posed meshes, clamped to zero on
/// intersection or containment. Stops early once the distance drops below
/// `cap` (pass 0.0 for a pure collision test).
pub fn mesh_mesh_distance(a: &PosedMesh, b: &PosedMesh, cap: f64) -> f64 {
    let mut best = aabb_distance(&a.aabb(), &b.aabb());
    if best > cap {
        return best;
    }
    best = f64::INFINITY;
    let b_boxes: Vec<_> = (0..b.triangles().len())
        .map(|j| tri_aabb(&b.tri(j)))
        .collect();
    for i in 0..a.triangles().len() {
        let ta = a.tri(i);
        let abox = tri_aabb(&ta);
        if aabb_distance(&abox, &b.aabb()) >= best.min(cap) && best <= cap {
            continue;
        }
        for (j, bbox) in b_boxes.iter().enumerate() {
            if aabb_distance(&abox, bbox) >= best {
                continue;
            }
            let d = triangle_triangle_distance(&ta, &b.tri(j));
            if d < best {
                best = d;
                if best == 0.0 {
                    return 0.0;
                }
            }
        }
    }
    // Disjoint surfaces can still be nested.
    if best > 0.0
        && (point_in_mesh(&a.vertices()[0], b) || point_in_mesh(&b.vertices()[0], a))
    {
        return 0.0;
    }
    best
}

/// True iff the meshes' surfaces come within the contact epsilon or one mesh
/// is contained in the other. Symmetric in its arguments.
pub fn pairwise_collision(
    mesh_a: &TriMesh,
    pose_a: &Isometry3<f64>,
    mesh_b: &TriMesh,
    pose_b: &Isometry3<f64>,
) -> bool {
    let a = PosedMesh::new(mesh_a, pose_a);
    let b = PosedMesh::new(mesh_b, pose_b);
    mesh_mesh_distance(&a, &b, CONTACT_EPS) < CONTACT_EPS
}

/// Surface distance from a capsule to a mesh (negative when penetrating).
pub fn capsule_mesh_distance(cap: &Capsule, mesh: &PosedMesh, stop_below: f64) -> f64 {
    let cap_box = (
        Point3::new(
            cap.a.x.min(cap.b.x) - cap.radius,
            cap.a.y.min(cap.b.y) - cap.radius,
            cap.a.z.min(cap.b.z) - cap.radius,
        ),
        Point3::new(
            cap.a.x.max(cap.b.x) + cap.radius,
            cap.a.y.max(cap.b.y) + cap.radius,
            cap.a.z.max(cap.b.z) + cap.radius,
        ),
    );
    let lower = aabb_distance(&cap_box, &mesh.aabb());
    if lower > stop_below {
        return lower;
    }
    let mut best = f64::INFINITY;
    for i in 0..mesh.triangles().len() {
        let tri = mesh.tri(i);
        let d = segment_triangle_distance(cap.a, cap.b, &tri) - cap.radius;
        if d < best {
            best = d;
            if best <= stop_below.min(0.0) {
                return best;
            }
        }
    }
    // A capsule whose axis never comes within its radius of the surface can
    // still be buried inside a closed mesh.
    if best > 0.0 && point_in_mesh(&cap.a, mesh) {
        return -best;
    }
    best
}

/// Surface distance between two capsules (negative when penetrating).
pub fn capsule_capsule_distance(c1: &Capsule, c2: &Capsule) -> f64 {
    segment_segment_distance(c1.a, c1.b, c2.a, c2.b) - c1.radius - c2.radius
}
