use nalgebra::{Isometry3, Translation3, UnitQuaternion, Vector3};

use super::{ArmModel, Hand, JointConfig};
use crate::config::RobotConfig;
use crate::geometry::{
    capsule_capsule_distance, capsule_mesh_distance, mesh_mesh_distance, shapes, Capsule,
    PosedMesh, TriMesh, CONTACT_EPS,
};

/// A body rigidly mounted on an arm's tool frame (gripper, held object).
#[derive(Debug, Clone)]
pub struct Attachment {
    pub mesh: TriMesh,
    /// Pose of the body in the tool frame.
    pub offset: Isometry3<f64>,
}

/// Dual-arm robot: master (right) and slave (left) arms on a torso column.
#[derive(Debug, Clone)]
pub struct RobotModel {
    arms: [ArmModel; 2],
    torso: TriMesh,
    torso_pose: Isometry3<f64>,
    home: [JointConfig; 2],
    base: Isometry3<f64>,
}

impl RobotModel {
    pub fn from_config(cfg: &RobotConfig) -> RobotModel {
        let base = Isometry3::from_parts(
            Translation3::new(cfg.base_position[0], cfg.base_position[1], cfg.base_position[2]),
            UnitQuaternion::from_axis_angle(&Vector3::z_axis(), cfg.base_yaw),
        );
        let torso = shapes::box_mesh(cfg.torso_box[0], cfg.torso_box[1], cfg.torso_box[2]);
        let torso_pose = base
            * Translation3::new(cfg.torso_center[0], cfg.torso_center[1], cfg.torso_center[2]);
        RobotModel {
            arms: [
                ArmModel::from_config(cfg, cfg.shoulder_right),
                ArmModel::from_config(cfg, cfg.shoulder_left),
            ],
            torso,
            torso_pose,
            home: [JointConfig(cfg.home), JointConfig(cfg.home)],
            base,
        }
    }

    pub fn arm(&self, hand: Hand) -> &ArmModel {
        &self.arms[hand.index()]
    }

    pub fn home(&self, hand: Hand) -> JointConfig {
        self.home[hand.index()]
    }

    pub fn base(&self) -> &Isometry3<f64> {
        &self.base
    }

    pub fn torso_posed(&self) -> PosedMesh {
        PosedMesh::new(&self.torso, &self.torso_pose)
    }

    /// Shoulder midpoint, the anchor of the handover mid-plane.
    pub fn shoulder_midpoint(&self) -> nalgebra::Point3<f64> {
        let r = self.arms[0].base().translation.vector;
        let l = self.arms[1].base().translation.vector;
        nalgebra::Point3::from((r + l) / 2.0)
    }

    /// Unit lateral direction pointing into `hand`'s own half-space.
    pub fn side_direction(&self, hand: Hand) -> Vector3<f64> {
        let own = self.arms[hand.index()].base().translation.vector;
        let other = self.arms[1 - hand.index()].base().translation.vector;
        let d = own - other;
        let d = Vector3::new(d.x, d.y, 0.0);
        if d.norm() < 1e-12 {
            Vector3::y()
        } else {
            d.normalize()
        }
    }

    /// True iff any link-link, link-torso, link-extra or attachment pair
    /// collides. Adjacent links of the same arm are exempt, as is each
    /// attachment against its own wrist link.
    pub fn self_collision(
        &self,
        q_master: &JointConfig,
        q_slave: &JointConfig,
        extras: &[&PosedMesh],
        attachments: [&[Attachment]; 2],
    ) -> bool {
        let caps = [
            self.arms[0].posed_capsules(q_master),
            self.arms[1].posed_capsules(q_slave),
        ];
        let tools = [
            self.arms[0].fk_frames(q_master).1,
            self.arms[1].fk_frames(q_slave).1,
        ];
        let torso = self.torso_posed();
        let attached: [Vec<PosedMesh>; 2] = [
            attachments[0]
                .iter()
                .map(|a| PosedMesh::new(&a.mesh, &(tools[0] * a.offset)))
                .collect(),
            attachments[1]
                .iter()
                .map(|a| PosedMesh::new(&a.mesh, &(tools[1] * a.offset)))
                .collect(),
        ];

        let hit = |d: f64| d < CONTACT_EPS;

        // Arm-arm capsules.
        for a in &caps[0] {
            for b in &caps[1] {
                if hit(capsule_capsule_distance(a, b)) {
                    return true;
                }
            }
        }
        for side in 0..2 {
            let arm_caps = &caps[side];
            // Within-arm, non-adjacent pairs.
            for i in 0..arm_caps.len() {
                for j in i + 2..arm_caps.len() {
                    if hit(capsule_capsule_distance(&arm_caps[i], &arm_caps[j])) {
                        return true;
                    }
                }
            }
            for c in arm_caps {
                if hit(capsule_mesh_distance(c, &torso, CONTACT_EPS)) {
                    return true;
                }
                for e in extras {
                    if hit(capsule_mesh_distance(c, e, CONTACT_EPS)) {
                        return true;
                    }
                }
                // Other arm's attachments.
                for m in &attached[1 - side] {
                    if hit(capsule_mesh_distance(c, m, CONTACT_EPS)) {
                        return true;
                    }
                }
            }
            // Own attachments vs all but the wrist capsule.
            for m in &attached[side] {
                for (i, c) in arm_caps.iter().enumerate() {
                    if i + 1 == arm_caps.len() {
                        continue;
                    }
                    if hit(capsule_mesh_distance(c, m, CONTACT_EPS)) {
                        return true;
                    }
                }
                if hit(mesh_mesh_distance(m, &torso, CONTACT_EPS)) {
                    return true;
                }
                for e in extras {
                    if hit(mesh_mesh_distance(m, e, CONTACT_EPS)) {
                        return true;
                    }
                }
            }
        }
        // Attachment pairs across arms.
        for a in &attached[0] {
            for b in &attached[1] {
                if hit(mesh_mesh_distance(a, b, CONTACT_EPS)) {
                    return true;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn robot() -> RobotModel {
        RobotModel::from_config(&Config::default().robot)
    }

    #[test]
    fn home_is_collision_free() {
        let r = robot();
        let qm = r.home(Hand::Master);
        let qs = r.home(Hand::Slave);
        assert!(!r.self_collision(&qm, &qs, &[], [&[], &[]]));
    }

    #[test]
    fn arms_commanded_to_same_point_collide() {
        let r = robot();
        let cfg = Config::default();
        let target = Isometry3::from_parts(
            Translation3::new(-0.15, 0.0, 0.2),
            UnitQuaternion::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI),
        );
        let qm = r
            .arm(Hand::Master)
            .ik(&target, &[r.home(Hand::Master)], &cfg.robot.ik, 1)
            .expect("master reaches");
        let qs = r
            .arm(Hand::Slave)
            .ik(&target, &[r.home(Hand::Slave)], &cfg.robot.ik, 2)
            .expect("slave reaches");
        assert!(r.self_collision(&qm, &qs, &[], [&[], &[]]));
    }

    #[test]
    fn verdict_matches_all_pairs_primitive_oracle() {
        // Oracle: re-enumerate every unordered primitive pair directly.
        let r = robot();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let torso = r.torso_posed();
        let mut disagreements = 0;
        for _ in 0..100 {
            let rand_q = |rng: &mut ChaCha8Rng, arm: &ArmModel| {
                let mut q = [0.0; 6];
                for (v, &(lo, hi)) in q.iter_mut().zip(arm.limits()) {
                    *v = rng.gen_range(lo..hi);
                }
                JointConfig(q)
            };
            let qm = rand_q(&mut rng, r.arm(Hand::Master));
            let qs = rand_q(&mut rng, r.arm(Hand::Slave));
            let got = r.self_collision(&qm, &qs, &[], [&[], &[]]);

            let cm = r.arm(Hand::Master).posed_capsules(&qm);
            let cs = r.arm(Hand::Slave).posed_capsules(&qs);
            let mut expect = false;
            for a in &cm {
                for b in &cs {
                    expect |= capsule_capsule_distance(a, b) < CONTACT_EPS;
                }
            }
            for caps in [&cm, &cs] {
                for i in 0..caps.len() {
                    for j in i + 2..caps.len() {
                        expect |= capsule_capsule_distance(&caps[i], &caps[j]) < CONTACT_EPS;
                    }
                }
                for c in caps.iter() {
                    expect |= capsule_mesh_distance(c, &torso, CONTACT_EPS) < CONTACT_EPS;
                }
            }
            if got != expect {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn extra_body_is_respected() {
        let r = robot();
        let qm = r.home(Hand::Master);
        let qs = r.home(Hand::Slave);
        // A big box swallowing the master arm workspace.
        let wall = PosedMesh::new(
            &shapes::box_mesh(1.0, 1.0, 1.0),
            &Isometry3::translation(-0.32, -0.25, 0.2),
        );
        assert!(r.self_collision(&qm, &qs, &[&wall], [&[], &[]]));
    }
}
