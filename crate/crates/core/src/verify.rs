//! Independent reference implementations used by the test suites to
//! cross-check planner outputs. Nothing here is called by the planners
//! themselves; each function deliberately takes a different algorithmic
//! route than the production code it checks.

use nalgebra::{DMatrix, DVector, Point3, Unit, Vector3};

/// Inscribed-ball radius of conv(points) around the origin, by brute-force
/// enumeration of candidate supporting hyperplanes (every 6-point subset,
/// solved as a linear system) — the LP route. Quadratic-and-worse in the
/// input size; only suitable for the small wrench sets used in tests.
pub fn lp_ball_radius(points: &[Vec<f64>]) -> f64 {
    let dim = 6;
    let n = points.len();
    if n < dim {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut any_plane = false;
    let mut subset = vec![0usize; dim];
    enumerate_subsets(n, dim, &mut subset, 0, 0, &mut |sel: &[usize]| {
        if let Some((normal, offset)) = hyperplane_through(points, sel) {
            // Supporting plane test, both orientations.
            for sgn in [1.0, -1.0] {
                let nrm: Vec<f64> = normal.iter().map(|x| x * sgn).collect();
                let off = offset * sgn;
                let supporting = points.iter().all(|p| {
                    nrm.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() <= off + 1e-9
                });
                if supporting {
                    any_plane = true;
                    if off < best {
                        best = off;
                    }
                }
            }
        }
    });
    if !any_plane || best < 0.0 {
        0.0
    } else {
        best
    }
}

fn enumerate_subsets(
    n: usize,
    k: usize,
    subset: &mut Vec<usize>,
    depth: usize,
    start: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        f(subset);
        return;
    }
    for i in start..n {
        subset[depth] = i;
        enumerate_subsets(n, k, subset, depth + 1, i + 1, f);
    }
}

/// Unit normal and offset of the hyperplane through six 6D points, solved as
/// a linear system (returns None for degenerate subsets).
fn hyperplane_through(points: &[Vec<f64>], sel: &[usize]) -> Option<(Vec<f64>, f64)> {
    let dim = 6;
    let base = &points[sel[0]];
    // Rows: p_i - p_0 for i = 1..6; find n with E n = 0 by pinning one
    // coordinate of n to 1 and solving the remaining 5x5 system.
    let mut rows = Vec::with_capacity(dim - 1);
    for &s in &sel[1..] {
        let r: Vec<f64> = points[s].iter().zip(base).map(|(a, b)| a - b).collect();
        rows.push(r);
    }
    for pin in 0..dim {
        let mut m = DMatrix::<f64>::zeros(dim - 1, dim - 1);
        let mut rhs = DVector::<f64>::zeros(dim - 1);
        for (r, row) in rows.iter().enumerate() {
            let mut cc = 0;
            for c in 0..dim {
                if c == pin {
                    rhs[r] = -row[c];
                    continue;
                }
                m[(r, cc)] = row[c];
                cc += 1;
            }
        }
        let lu = m.lu();
        if let Some(sol) = lu.solve(&rhs) {
            let mut normal = vec![0.0; dim];
            let mut cc = 0;
            for c in 0..dim {
                if c == pin {
                    normal[c] = 1.0;
                } else {
                    normal[c] = sol[cc];
                    cc += 1;
                }
            }
            let len: f64 = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !len.is_finite() || len < 1e-12 {
                continue;
            }
            for x in &mut normal {
                *x /= len;
            }
            let offset: f64 = normal.iter().zip(base).map(|(a, b)| a * b).sum();
            // Reject solutions that fail to annihilate all rows (singular
            // pins slip through LU with large error).
            let ok = rows.iter().all(|row| {
                normal.iter().zip(row).map(|(a, b)| a * b).sum::<f64>().abs() < 1e-7
            });
            if ok {
                return Some((normal, offset));
            }
        }
    }
    None
}

/// Independent wrench-primitive construction mirroring the documented
/// contact model: cone edges with unit normal component, torque about the
/// center of mass divided by the torque scale.
pub fn reference_wrenches(
    contacts: (Point3<f64>, Point3<f64>),
    force_dirs: (Unit<Vector3<f64>>, Unit<Vector3<f64>>),
    friction: f64,
    torque_scale: f64,
    com: &Point3<f64>,
    cone_edges: usize,
) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for (p, n) in [(contacts.0, force_dirs.0), (contacts.1, force_dirs.1)] {
        // Tangent basis built from an explicit Gram-Schmidt step rather than
        // the production helper.
        let seed = if n.into_inner().x.abs() < 0.9 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        let t1 = (seed - n.into_inner() * seed.dot(&n.into_inner())).normalize();
        let t2 = n.cross(&t1);
        for k in 0..cone_edges {
            let th = 2.0 * std::f64::consts::PI * k as f64 / cone_edges as f64;
            let f = n.into_inner() + friction * (th.cos() * t1 + th.sin() * t2);
            let tau = (p - com).cross(&f) / torque_scale;
            out.push(vec![f.x, f.y, f.z, tau.x, tau.y, tau.z]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_radius_of_cross_polytope() {
        let mut pts = Vec::new();
        for i in 0..6 {
            for s in [-1.0, 1.0] {
                let mut p = vec![0.0; 6];
                p[i] = s;
                pts.push(p);
            }
        }
        let r = lp_ball_radius(&pts);
        assert!((r - 1.0 / 6.0f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn lp_radius_zero_when_origin_outside() {
        // Shift the cross-polytope far from the origin.
        let mut pts = Vec::new();
        for i in 0..6 {
            for s in [-1.0, 1.0] {
                let mut p = vec![3.0; 6];
                p[i] += s;
                pts.push(p);
            }
        }
        assert_eq!(lp_ball_radius(&pts), 0.0);
    }

    #[test]
    fn lp_radius_zero_for_flat_sets() {
        // All points in a 5D subspace: no 6D ball fits.
        let mut pts = Vec::new();
        for i in 0..5 {
            for s in [-1.0, 1.0] {
                let mut p = vec![0.0; 6];
                p[i] = s;
                pts.push(p);
            }
        }
        assert_eq!(lp_ball_radius(&pts), 0.0);
    }
}
