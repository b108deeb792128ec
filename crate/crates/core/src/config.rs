//! Runtime configuration: robot and gripper models, scene anchors,
//! planning tolerances and budgets. One structured-text (TOML) file holds
//! everything; every section has working defaults so a config file is only
//! needed to override them.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::util::fnv1a;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct Config {
    pub gripper: GripperConfig,
    pub robot: RobotConfig,
    pub scene: SceneConfig,
    pub grasp: GraspConfig,
    pub placement: PlacementConfig,
    pub handover: HandoverConfig,
    pub motion: MotionConfig,
    pub search: SearchConfig,
    pub bench: BenchConfig,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: Config = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let g = &self.gripper;
        if g.max_opening <= 0.0
            || g.finger_width <= 0.0
            || g.finger_thickness <= 0.0
            || g.finger_length <= 0.0
        {
            return Err(ConfigError::Invalid("gripper dimensions must be positive".into()));
        }
        if g.friction <= 0.0 || g.friction > 2.0 {
            return Err(ConfigError::Invalid("friction must be in (0, 2]".into()));
        }
        for (lo, hi) in &self.robot.joint_limits {
            if lo >= hi {
                return Err(ConfigError::Invalid("joint limit lower >= upper".into()));
            }
        }
        if self.bench.trials_per_cell == 0 {
            return Err(ConfigError::Invalid("trials_per_cell must be >= 1".into()));
        }
        if self.handover.lattice_spacing <= 0.0 {
            return Err(ConfigError::Invalid("lattice spacing must be positive".into()));
        }
        Ok(())
    }

    /// Stable hash of the sections that shape the approach-map cache.
    pub fn kinematic_hash(&self) -> u64 {
        let blob = serde_json::to_string(&(&self.robot, &self.handover))
            .expect("config serializes");
        fnv1a(blob.as_bytes())
    }
}

/// Parallel-jaw gripper: box palm and two box fingers; the grasp frame sits
/// at the fingertip midpoint with +z along the approach direction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GripperConfig {
    pub finger_width: f64,
    pub finger_thickness: f64,
    pub finger_length: f64,
    pub max_opening: f64,
    /// Palm box extents (x, y, z).
    pub palm: [f64; 3],
    pub friction: f64,
}

impl Default for GripperConfig {
    fn default() -> Self {
        GripperConfig {
            finger_width: 0.02,
            finger_thickness: 0.012,
            finger_length: 0.05,
            max_opening: 0.08,
            palm: [0.06, 0.11, 0.04],
            friction: 0.5,
        }
    }
}

/// One joint of a serial chain: a fixed link offset followed by a revolute
/// joint about `axis`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointSpec {
    /// Link translation before the joint (meters, parent frame).
    pub offset: [f64; 3],
    /// Revolute axis in the joint frame.
    pub axis: [f64; 3],
}

/// A capsule in the frame of the link it is attached to.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkCapsule {
    /// Index of the joint frame the capsule follows (0-based).
    pub link: usize,
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub radius: f64,
}

/// Dual-arm robot: two identical 6R chains mounted on a torso column.
/// Master = right arm (negative y side), slave = left.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RobotConfig {
    /// Robot base pose in the world (table) frame: translation + yaw.
    pub base_position: [f64; 3],
    pub base_yaw: f64,
    /// Shoulder offsets in the robot frame (right, left).
    pub shoulder_right: [f64; 3],
    pub shoulder_left: [f64; 3],
    pub joints: Vec<JointSpec>,
    pub joint_limits: Vec<(f64, f64)>,
    /// Tool offset from the wrist: translation then roll about x.
    pub tcp_offset: [f64; 3],
    pub tcp_roll: f64,
    pub link_capsules: Vec<LinkCapsule>,
    /// Torso collision box extents and center (robot frame).
    pub torso_box: [f64; 3],
    pub torso_center: [f64; 3],
    pub home: [f64; 6],
    pub ik: IkConfig,
}

impl Default for RobotConfig {
    fn default() -> Self {
        RobotConfig {
            base_position: [-0.32, 0.0, -0.25],
            base_yaw: 0.0,
            shoulder_right: [0.0, -0.145, 0.50],
            shoulder_left: [0.0, 0.145, 0.50],
            joints: vec![
                JointSpec { offset: [0.0; 3], axis: [0.0, 0.0, 1.0] },
                JointSpec { offset: [0.0; 3], axis: [0.0, 1.0, 0.0] },
                JointSpec { offset: [0.0, 0.0, -0.25], axis: [0.0, -1.0, 0.0] },
                JointSpec { offset: [0.0, 0.0, -0.235], axis: [0.0, 0.0, 1.0] },
                JointSpec { offset: [0.0; 3], axis: [0.0, 1.0, 0.0] },
                JointSpec { offset: [0.0; 3], axis: [0.0, 0.0, 1.0] },
            ],
            joint_limits: vec![
                (-std::f64::consts::PI, std::f64::consts::PI),
                (-std::f64::consts::PI, std::f64::consts::PI),
                (0.0, 2.6),
                (-std::f64::consts::PI, std::f64::consts::PI),
                (-std::f64::consts::PI, std::f64::consts::PI),
                (-std::f64::consts::PI, std::f64::consts::PI),
            ],
            tcp_offset: [0.0, 0.0, -0.12],
            tcp_roll: std::f64::consts::PI,
            link_capsules: vec![
                LinkCapsule { link: 1, a: [0.0; 3], b: [0.0, 0.0, -0.25], radius: 0.045 },
                LinkCapsule { link: 2, a: [0.0; 3], b: [0.0, 0.0, -0.235], radius: 0.04 },
                LinkCapsule { link: 4, a: [0.0; 3], b: [0.0, 0.0, -0.10], radius: 0.045 },
            ],
            torso_box: [0.16, 0.18, 0.55],
            torso_center: [0.0, 0.0, 0.275],
            home: [0.0, -0.35, 1.1, 0.0, -0.75, 0.0],
            ik: IkConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct IkConfig {
    pub damping: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub position_tol: f64,
    pub rotation_tol: f64,
    /// Largest per-joint step per iteration (radians).
    pub step_clamp: f64,
}

impl Default for IkConfig {
    fn default() -> Self {
        IkConfig {
            damping: 0.01,
            max_iterations: 200,
            restarts: 10,
            position_tol: 1e-4,
            rotation_tol: 1e-3,
            step_clamp: 0.5,
        }
    }
}

/// Where things sit in the world (table) frame: the table top is z = 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneConfig {
    /// Table collision box extents and center.
    pub table_box: [f64; 3],
    pub table_center: [f64; 3],
    /// Object anchor on the table: initial, goal and intermediate placements
    /// all rest here (the task randomizes yaw, not position).
    pub object_anchor: [f64; 2],
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            table_box: [0.6, 0.8, 0.05],
            table_center: [0.15, 0.0, -0.025],
            object_anchor: [0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GraspConfig {
    /// Coplanarity tolerance for facet clustering (radians).
    pub cluster_angle_tol: f64,
    /// Contact sampling granularity (meters).
    pub sample_step: f64,
    /// Anti-parallel tolerance for contact normals and the closing line.
    pub opposition_tol: f64,
    /// Contacts must sit at least this far inside their cluster boundary.
    pub boundary_margin: f64,
    /// The contact line must pass within this fraction of the max extent of
    /// the center of mass.
    pub torque_arm_fraction: f64,
    /// Friction cone discretization (edges per cone).
    pub cone_edges: usize,
    /// Minimum inscribed-ball radius for a grasp to be kept.
    pub quality_min: f64,
    /// Approach directions sampled around the contact axis.
    pub approach_directions: usize,
    /// Pre-grasp stand-off along the approach direction (meters).
    pub pregrasp_offset: f64,
}

impl Default for GraspConfig {
    fn default() -> Self {
        GraspConfig {
            cluster_angle_tol: 0.01,
            sample_step: 0.01,
            opposition_tol: 0.05,
            boundary_margin: 0.002,
            torque_arm_fraction: 0.3,
            cone_edges: 8,
            quality_min: 1e-3,
            approach_directions: 8,
            pregrasp_offset: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PlacementConfig {
    /// The projected center of mass must sit at least this far inside the
    /// support polygon (meters).
    pub stability_margin: f64,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        PlacementConfig {
            stability_margin: 0.005,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct HandoverConfig {
    /// Lattice window on the mid-plane between the arms (world frame).
    pub lattice_x: (f64, f64),
    pub lattice_z: (f64, f64),
    pub lattice_spacing: f64,
    /// Angular step for approach directions and for rotations about them.
    pub direction_step: f64,
    pub rotation_step: f64,
    /// Manipulability above this counts a sample as approachable.
    pub manipulability_threshold: f64,
    /// Count approachability per (direction, rotation) sample; when false, a
    /// direction counts once if any rotation about it is feasible.
    pub count_rotation_samples: bool,
    /// Number of handover rotations sampled over SO(3).
    pub rotation_count: usize,
    /// Lateral crossing-arm slack: reject a hand whose offset direction
    /// points more than this into the other arm's half-space.
    pub crossing_tol: f64,
    /// IK effort while building the approach map and handover circles.
    pub map_ik_restarts: usize,
    pub map_ik_iterations: usize,
    /// Approach-map cache location ("" disables the file cache).
    pub cache_dir: String,
}

impl Default for HandoverConfig {
    fn default() -> Self {
        HandoverConfig {
            lattice_x: (-0.35, 0.05),
            lattice_z: (0.0, 0.40),
            lattice_spacing: 0.05,
            direction_step: std::f64::consts::FRAC_PI_4,
            rotation_step: std::f64::consts::FRAC_PI_4,
            manipulability_threshold: 0.01,
            count_rotation_samples: true,
            rotation_count: 352,
            crossing_tol: 0.2,
            map_ik_restarts: 3,
            map_ik_iterations: 120,
            cache_dir: ".regrasp-cache".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct MotionConfig {
    /// Maximum per-joint change between trajectory waypoints (radians).
    pub interp_step: f64,
    pub goal_bias: f64,
    /// Planner budget per edge, in seconds; converted to iteration ticks so
    /// results stay deterministic.
    pub budget_s: f64,
    pub ticks_per_second: usize,
    /// Transition-test (clearance-penalty) mode; plain bidirectional RRT
    /// when disabled.
    pub transition_test: bool,
    pub d_safe: f64,
    pub temp_init: f64,
    pub temp_alpha: f64,
    pub n_fail_max: usize,
    pub smooth_iterations: usize,
}

impl Default for MotionConfig {
    fn default() -> Self {
        MotionConfig {
            interp_step: 0.05,
            goal_bias: 0.1,
            budget_s: 1.0,
            ticks_per_second: 3000,
            transition_test: true,
            d_safe: 0.02,
            temp_init: 1e-4,
            temp_alpha: 2.0,
            n_fail_max: 10,
            smooth_iterations: 60,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Wall-clock ceiling per regrasp query (seconds).
    pub timeout_s: f64,
    /// Yaw samples tried when binding intermediate placements.
    pub yaw_samples: usize,
    pub transit_cost: f64,
    pub transfer_cost: f64,
    pub bridge_cost: f64,
    /// Pick start/end grasps by quality rank; a seeded random choice when
    /// false.
    pub ranked_endpoints: bool,
    pub max_researches: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            timeout_s: 180.0,
            yaw_samples: 16,
            transit_cost: 1.0,
            transfer_cost: 2.0,
            bridge_cost: 2.0,
            ranked_endpoints: true,
            max_researches: 200,
        }
    }
}

/// A procedural or file-backed benchmark object.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: String,
    /// One of "box", "l_block", "t_tube", or "file".
    pub kind: String,
    #[serde(default)]
    pub dims: Vec<f64>,
    #[serde(default)]
    pub path: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub objects: Vec<ObjectSpec>,
    pub trials_per_cell: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            objects: vec![
                ObjectSpec {
                    id: "l-block".into(),
                    kind: "l_block".into(),
                    dims: vec![0.05, 0.02, 0.05, 0.02, 0.03],
                    path: String::new(),
                },
                ObjectSpec {
                    id: "box".into(),
                    kind: "box".into(),
                    dims: vec![0.05, 0.036, 0.03],
                    path: String::new(),
                },
                ObjectSpec {
                    id: "t-tube".into(),
                    kind: "t_tube".into(),
                    dims: vec![0.06, 0.02, 0.04, 0.02, 0.025],
                    path: String::new(),
                },
            ],
            trials_per_cell: 50,
            seed: 20_240_001,
        }
    }
}

impl ObjectSpec {
    pub fn build_mesh(&self) -> Result<crate::geometry::TriMesh, ConfigError> {
        use crate::geometry::shapes;
        let need = |n: usize| -> Result<(), ConfigError> {
            if self.dims.len() == n {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!(
                    "object {}: kind {} needs {n} dims, got {}",
                    self.id,
                    self.kind,
                    self.dims.len()
                )))
            }
        };
        match self.kind.as_str() {
            "box" => {
                need(3)?;
                Ok(shapes::box_mesh(self.dims[0], self.dims[1], self.dims[2]))
            }
            "l_block" => {
                need(5)?;
                Ok(shapes::l_block(
                    self.dims[0],
                    self.dims[1],
                    self.dims[2],
                    self.dims[3],
                    self.dims[4],
                ))
            }
            "t_tube" => {
                need(5)?;
                Ok(shapes::t_tube(
                    self.dims[0],
                    self.dims[1],
                    self.dims[2],
                    self.dims[3],
                    self.dims[4],
                ))
            }
            "file" => {
                let path = std::path::Path::new(&self.path);
                let format = crate::geometry::MeshFormat::from_path(path);
                crate::geometry::load_mesh(path, format)
                    .map(|l| l.mesh)
                    .map_err(|e| ConfigError::Invalid(format!("object {}: {e}", self.id)))
            }
            other => Err(ConfigError::Invalid(format!(
                "object {}: unknown kind {other}",
                self.id
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn toml_roundtrip() {
        let cfg = Config::default();
        let text = toml::to_string(&cfg).unwrap();
        let back: Config = toml::from_str(&text).unwrap();
        assert_eq!(back.gripper.max_opening, cfg.gripper.max_opening);
        assert_eq!(back.robot.joints.len(), 6);
        assert_eq!(back.bench.objects.len(), 3);
    }

    #[test]
    fn partial_toml_overrides_defaults() {
        let cfg: Config = toml::from_str("[gripper]\nmax_opening = 0.1\n").unwrap();
        assert_eq!(cfg.gripper.max_opening, 0.1);
        assert_eq!(cfg.gripper.finger_length, GripperConfig::default().finger_length);
    }

    #[test]
    fn kinematic_hash_tracks_robot_changes() {
        let a = Config::default();
        let mut b = Config::default();
        b.robot.base_position[0] += 0.01;
        assert_ne!(a.kinematic_hash(), b.kinematic_hash());
        assert_eq!(a.kinematic_hash(), Config::default().kinematic_hash());
    }

    #[test]
    fn procedural_objects_build() {
        for spec in Config::default().bench.objects {
            let mesh = spec.build_mesh().unwrap();
            assert!(mesh.volume() > 0.0);
        }
    }
}
