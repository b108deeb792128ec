//! Pick-and-place regrasp planning for rigid mesh objects.
//!
//! The crate plans parallel-jaw grasps and stable table placements for an
//! object, computes dual-arm handover poses, builds and searches single-arm
//! and dual-arm regrasp graphs with lazy IK/collision validation and dynamic
//! trimming, plans the connecting joint-space motions, and benchmarks
//! single-arm against dual-arm regrasp over randomized reorientation tasks.

pub mod bench;
pub mod config;
pub mod geometry;
pub mod graph;
pub mod grasp;
pub mod handover;
pub mod kinematics;
pub mod motion;
pub mod placement;
pub mod util;


