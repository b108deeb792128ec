//! Contact wrench spaces for force-closure scoring.

use nalgebra::{Point3, Unit, Vector3};

use crate::geometry::{hull_nd, orthonormal_to};

/// Wrench primitives for a two-contact grasp: each friction cone is
/// discretized into `cone_edges` force edges with unit normal component,
/// and every force maps to `[f; ((p - com) x f) / torque_scale]`.
pub fn wrench_primitives(
    contacts: (Point3<f64>, Point3<f64>),
    force_dirs: (Unit<Vector3<f64>>, Unit<Vector3<f64>>),
    friction: f64,
    torque_scale: f64,
    com: &Point3<f64>,
    cone_edges: usize,
) -> Vec<Vec<f64>> {
    let mut wrenches = Vec::with_capacity(2 * cone_edges);
    for (p, n) in [(contacts.0, force_dirs.0), (contacts.1, force_dirs.1)] {
        let t1 = orthonormal_to(&n);
        let t2 = Unit::new_normalize(n.cross(&t1));
        let r = p - com;
        for k in 0..cone_edges {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / cone_edges as f64;
            let f = n.into_inner() + friction * (theta.cos() * t1.into_inner() + theta.sin() * t2.into_inner());
            let tau = r.cross(&f) / torque_scale;
            wrenches.push(vec![f.x, f.y, f.z, tau.x, tau.y, tau.z]);
        }
    }
    wrenches
}

/// Radius of the largest origin-centered ball inscribed in the convex hull
/// of the wrench primitives; 0 when the origin is outside the hull or the
/// hull is not full-dimensional.
pub fn inscribed_ball_radius(wrenches: &[Vec<f64>]) -> f64 {
    let Ok(facets) = hull_nd(wrenches, 6, 1e-12) else {
        return 0.0;
    };
    let mut radius = f64::INFINITY;
    for f in &facets {
        if f.offset < radius {
            radius = f.offset;
        }
    }
    if radius.is_finite() && radius > 0.0 {
        radius
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify;

    fn antipodal_cube_wrenches(mu: f64) -> Vec<Vec<f64>> {
        wrench_primitives(
            (Point3::new(0.0, -0.015, 0.0), Point3::new(0.0, 0.015, 0.0)),
            (Unit::new_normalize(Vector3::y()), Unit::new_normalize(-Vector3::y())),
            mu,
            0.03,
            &Point3::origin(),
            8,
        )
    }

    #[test]
    fn antipodal_grasp_has_positive_quality() {
        let q = inscribed_ball_radius(&antipodal_cube_wrenches(0.5));
        assert!(q > 0.0, "antipodal grasp should close, got {q}");
    }

    #[test]
    fn parallel_normals_give_zero() {
        // Both "contacts" push the same way: no closure.
        let w = wrench_primitives(
            (Point3::new(0.0, -0.015, 0.0), Point3::new(0.0, 0.015, 0.0)),
            (Unit::new_normalize(Vector3::y()), Unit::new_normalize(Vector3::y())),
            0.5,
            0.03,
            &Point3::origin(),
            8,
        );
        assert_eq!(inscribed_ball_radius(&w), 0.0);
    }

    #[test]
    fn matches_lp_enumeration_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let c1 = Point3::new(
                rng.gen_range(-0.03..0.03),
                rng.gen_range(-0.03..0.03),
                rng.gen_range(-0.03..0.03),
            );
            let c2 = Point3::new(
                rng.gen_range(-0.03..0.03),
                rng.gen_range(-0.03..0.03),
                rng.gen_range(-0.03..0.03),
            );
            if (c2 - c1).norm() < 1e-3 {
                continue;
            }
            let axis = Unit::new_normalize(c2 - c1);
            let w = wrench_primitives(
                (c1, c2),
                (axis, Unit::new_unchecked(-axis.into_inner())),
                rng.gen_range(0.2..0.8),
                0.06,
                &Point3::origin(),
                8,
            );
            let got = inscribed_ball_radius(&w);
            let want = verify::lp_ball_radius(&w);
            assert!(
                (got - want).abs() < 1e-6,
                "hull {got} vs LP oracle {want}"
            );
        }
    }

    #[test]
    fn quality_monotone_in_friction() {
        let mut last = -1.0;
        for mu in [0.1, 0.3, 0.5, 1.0] {
            let q = inscribed_ball_radius(&antipodal_cube_wrenches(mu));
            assert!(q >= last, "quality not monotone at mu={mu}");
            last = q;
        }
    }

    #[test]
    fn rigid_invariance_of_quality() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let c1 = Point3::new(0.01, -0.015, 0.004);
        let c2 = Point3::new(0.01, 0.015, 0.004);
        let n1 = Unit::new_normalize(Vector3::y());
        let n2 = Unit::new_normalize(-Vector3::y());
        let com = Point3::new(0.002, 0.001, -0.003);
        let base = inscribed_ball_radius(&wrench_primitives(
            (c1, c2),
            (n1, n2),
            0.5,
            0.05,
            &com,
            8,
        ));
        for _ in 0..10 {
            let axis = Unit::new_normalize(Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0f64),
            ));
            let rot = nalgebra::Rotation3::from_axis_angle(&axis, rng.gen_range(0.0..6.28));
            let q = inscribed_ball_radius(&wrench_primitives(
                (rot * c1, rot * c2),
                (
                    Unit::new_normalize(rot * n1.into_inner()),
                    Unit::new_normalize(rot * n2.into_inner()),
                ),
                0.5,
                0.05,
                &(rot * com),
                8,
            ));
            // The wrench hull rotates block-wise with the contacts, so the
            // inscribed ball is preserved up to roundoff.
            assert!((q - base).abs() < 1e-9, "quality {q} vs {base}");
        }
    }
}
