//! Serial-chain kinematics for a simplified dual-arm robot: forward
//! kinematics, geometric Jacobian, Yoshikawa manipulability, numeric
//! (damped-least-squares) inverse kinematics, and whole-robot collision
//! checks over capsule links.

mod arm;
mod robot;

pub use arm::ArmModel;
pub use robot::{Attachment, RobotModel};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("joint configuration outside limits")]
    JointLimit,
}

/// Which arm a value refers to. Master = right, slave = left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Hand {
    Master,
    Slave,
}

impl Hand {
    pub fn index(self) -> usize {
        match self {
            Hand::Master => 0,
            Hand::Slave => 1,
        }
    }

    pub fn other(self) -> Hand {
        match self {
            Hand::Master => Hand::Slave,
            Hand::Slave => Hand::Master,
        }
    }
}

impl std::fmt::Display for Hand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Hand::Master => write!(f, "master"),
            Hand::Slave => write!(f, "slave"),
        }
    }
}

/// Joint angles for one 6R arm (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointConfig(pub [f64; 6]);

impl JointConfig {
    pub fn zeros() -> Self {
        JointConfig([0.0; 6])
    }

    /// Largest per-joint absolute difference.
    pub fn max_abs_diff(&self, other: &JointConfig) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Euclidean joint-space distance.
    pub fn distance(&self, other: &JointConfig) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn lerp(&self, other: &JointConfig, t: f64) -> JointConfig {
        let mut q = [0.0; 6];
        for i in 0..6 {
            q[i] = self.0[i] + (other.0[i] - self.0[i]) * t;
        }
        JointConfig(q)
    }
}
