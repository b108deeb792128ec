use nalgebra::{Isometry3, Matrix6, Point3, Translation3, Unit, UnitQuaternion, Vector3, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{JointConfig, KinematicsError};
use crate::config::{IkConfig, RobotConfig};
use crate::geometry::Capsule;

const DOF: usize = 6;

/// A 6R serial arm: per-joint link offset and revolute axis, joint limits,
/// a tool offset, and capsule collision geometry attached to link frames.
#[derive(Debug, Clone)]
pub struct ArmModel {
    base: Isometry3<f64>,
    offsets: [Translation3<f64>; DOF],
    axes: [Unit<Vector3<f64>>; DOF],
    limits: [(f64, f64); DOF],
    tcp: Isometry3<f64>,
    capsules: Vec<(usize, Capsule)>,
}

impl ArmModel {
    /// Build one arm from the robot config. `shoulder` picks the mounting
    /// offset (right or left).
    pub fn from_config(cfg: &RobotConfig, shoulder: [f64; 3]) -> ArmModel {
        assert_eq!(cfg.joints.len(), DOF, "expected a 6R chain");
        assert_eq!(cfg.joint_limits.len(), DOF);
        let robot_base = Isometry3::from_parts(
            Translation3::new(cfg.base_position[0], cfg.base_position[1], cfg.base_position[2]),
            UnitQuaternion::from_axis_angle(&Vector3::z_axis(), cfg.base_yaw),
        );
        let base = robot_base * Translation3::new(shoulder[0], shoulder[1], shoulder[2]);
        let mut offsets = [Translation3::identity(); DOF];
        let mut axes = [Vector3::z_axis(); DOF];
        for (i, j) in cfg.joints.iter().enumerate() {
            offsets[i] = Translation3::new(j.offset[0], j.offset[1], j.offset[2]);
            axes[i] = Unit::new_normalize(Vector3::new(j.axis[0], j.axis[1], j.axis[2]));
        }
        let mut limits = [(0.0, 0.0); DOF];
        for (i, &(lo, hi)) in cfg.joint_limits.iter().enumerate() {
            limits[i] = (lo, hi);
        }
        let tcp = Isometry3::from_parts(
            Translation3::new(cfg.tcp_offset[0], cfg.tcp_offset[1], cfg.tcp_offset[2]),
            UnitQuaternion::from_axis_angle(&Vector3::x_axis(), cfg.tcp_roll),
        );
        let capsules = cfg
            .link_capsules
            .iter()
            .map(|c| {
                (
                    c.link,
                    Capsule {
                        a: Point3::new(c.a[0], c.a[1], c.a[2]),
                        b: Point3::new(c.b[0], c.b[1], c.b[2]),
                        radius: c.radius,
                    },
                )
            })
            .collect();
        ArmModel {
            base,
            offsets,
            axes,
            limits,
            tcp,
            capsules,
        }
    }

    pub fn base(&self) -> &Isometry3<f64> {
        &self.base
    }

    pub fn limits(&self) -> &[(f64, f64); DOF] {
        &self.limits
    }

    pub fn within_limits(&self, q: &JointConfig) -> bool {
        q.0.iter()
            .zip(&self.limits)
            .all(|(&v, &(lo, hi))| v >= lo - 1e-9 && v <= hi + 1e-9)
    }

    pub fn clamp(&self, q: &JointConfig) -> JointConfig {
        let mut out = *q;
        for (v, &(lo, hi)) in out.0.iter_mut().zip(&self.limits) {
            *v = v.clamp(lo, hi);
        }
        out
    }

    /// Frames after each joint rotation, plus the tool frame.
    pub fn fk_frames(&self, q: &JointConfig) -> ([Isometry3<f64>; DOF], Isometry3<f64>) {
        let mut frames = [Isometry3::identity(); DOF];
        let mut t = self.base;
        for i in 0..DOF {
            t *= self.offsets[i];
            t *= UnitQuaternion::from_axis_angle(&self.axes[i], q.0[i]);
            frames[i] = t;
        }
        (frames, t * self.tcp)
    }

    /// Tool frame for a configuration within limits.
    pub fn fk(&self, q: &JointConfig) -> Result<Isometry3<f64>, KinematicsError> {
        if !self.within_limits(q) {
            return Err(KinematicsError::JointLimit);
        }
        Ok(self.fk_frames(q).1)
    }

    /// Spatial Jacobian (linear on top, angular below) at the tool point.
    pub fn jacobian(&self, q: &JointConfig) -> Result<Matrix6<f64>, KinematicsError> {
        if !self.within_limits(q) {
            return Err(KinematicsError::JointLimit);
        }
        Ok(self.jacobian_unchecked(q))
    }

    fn jacobian_unchecked(&self, q: &JointConfig) -> Matrix6<f64> {
        let (frames, tool) = self.fk_frames(q);
        let p_tool = tool.translation.vector;
        let mut j = Matrix6::zeros();
        for i in 0..DOF {
            let z = frames[i].rotation * self.axes[i].into_inner();
            let p = frames[i].translation.vector;
            let lin = z.cross(&(p_tool - p));
            for r in 0..3 {
                j[(r, i)] = lin[r];
                j[(r + 3, i)] = z[r];
            }
        }
        j
    }

    /// Yoshikawa manipulability sqrt(det(J J^T)); clamped to 0 below the
    /// numeric noise floor.
    pub fn manipulability(&self, q: &JointConfig) -> Result<f64, KinematicsError> {
        if !self.within_limits(q) {
            return Err(KinematicsError::JointLimit);
        }
        let w = self.jacobian_unchecked(q).determinant().abs();
        Ok(if w < 1e-12 { 0.0 } else { w })
    }

    /// Damped-least-squares IK. Tries `seeds` first, then deterministic
    /// random restarts; returns the first configuration whose tool frame
    /// matches `target` within the configured tolerances. Absence means
    /// infeasible.
    pub fn ik(
        &self,
        target: &Isometry3<f64>,
        seeds: &[JointConfig],
        cfg: &IkConfig,
        restart_seed: u64,
    ) -> Option<JointConfig> {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed);
        for attempt in 0..cfg.restarts.max(seeds.len()) {
            let start = if attempt < seeds.len() {
                self.clamp(&seeds[attempt])
            } else {
                // Best-of-8 random draw by pose error; uniform restarts alone
                // rarely land in folded-arm basins.
                let mut best = JointConfig::zeros();
                let mut best_err = f64::INFINITY;
                for _ in 0..8 {
                    let mut q = [0.0; DOF];
                    for (v, &(lo, hi)) in q.iter_mut().zip(&self.limits) {
                        *v = rng.gen_range(lo..hi);
                    }
                    let q = JointConfig(q);
                    let tool = self.fk_frames(&q).1;
                    let err = (target.translation.vector - tool.translation.vector).norm()
                        + 0.2 * target.rotation.angle_to(&tool.rotation);
                    if err < best_err {
                        best_err = err;
                        best = q;
                    }
                }
                best
            };
            if let Some(q) = self.ik_descend(target, start, cfg) {
                return Some(q);
            }
        }
        None
    }

    fn ik_descend(
        &self,
        target: &Isometry3<f64>,
        start: JointConfig,
        cfg: &IkConfig,
    ) -> Option<JointConfig> {
        let error = |q: &JointConfig| -> (Vector6<f64>, f64, f64) {
            let tool = self.fk_frames(q).1;
            let e_pos = target.translation.vector - tool.translation.vector;
            let e_rot = (target.rotation * tool.rotation.inverse()).scaled_axis();
            let mut e = Vector6::zeros();
            for r in 0..3 {
                e[r] = e_pos[r];
                e[r + 3] = e_rot[r];
            }
            (e, e_pos.norm(), e_rot.norm())
        };
        let mut q = start;
        for _ in 0..cfg.max_iterations {
            let (mut e, pn, rn) = error(&q);
            if pn <= cfg.position_tol && rn <= cfg.rotation_tol {
                return Some(q);
            }
            // Clamp the task-space error so distant targets cannot fling the
            // iteration around the workspace.
            if pn > 0.1 {
                for r in 0..3 {
                    e[r] *= 0.1 / pn;
                }
            }
            if rn > 0.5 {
                for r in 3..6 {
                    e[r] *= 0.5 / rn;
                }
            }
            let j = self.jacobian_unchecked(&q);
            let jjt = j * j.transpose() + Matrix6::identity() * (cfg.damping * cfg.damping);
            let Some(inv) = jjt.try_inverse() else {
                return None;
            };
            let dq = j.transpose() * inv * e;
            for i in 0..DOF {
                let step = dq[i].clamp(-cfg.step_clamp, cfg.step_clamp);
                q.0[i] = (q.0[i] + step).clamp(self.limits[i].0, self.limits[i].1);
            }
        }
        None
    }

    /// Link capsules posed for a configuration, in list order.
    pub fn posed_capsules(&self, q: &JointConfig) -> Vec<Capsule> {
        let (frames, _) = self.fk_frames(q);
        self.capsules
            .iter()
            .map(|(link, c)| c.transformed(&frames[*link]))
            .collect()
    }
}
