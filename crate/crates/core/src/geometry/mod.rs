//! Mesh ingestion, coplanar facet clustering, convex hulls and the collision
//! primitives consumed by every other module.
//!
//! All units are meters and radians. Meshes are immutable after construction
//! and safe to share across threads.

mod cluster;
mod collide;
mod hull;
mod mesh;
pub mod polygon;
pub mod shapes;

pub use cluster::{cluster_facets, sample_cluster, FacetCluster};
pub use collide::{
    capsule_capsule_distance, capsule_mesh_distance, mesh_mesh_distance, pairwise_collision,
    point_in_mesh, point_triangle_distance, segment_segment_distance, segment_triangle_distance,
    triangle_triangle_distance, Capsule, PosedMesh, CONTACT_EPS,
};
pub use hull::{
    convex_hull, convex_hull_2d, convex_hull_with, hull_nd, orthonormal_to, ConvexHull, HullFacet,
    NdFacet,
};
pub use mesh::{load_mesh, LoadedMesh, MeshFormat, TriMesh};

use thiserror::Error;

/// Errors produced by mesh ingestion and hull construction.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed {format:?} file: {reason}")]
    ParseError { format: MeshFormat, reason: String },
    #[error("mesh contains no valid triangles")]
    EmptyMesh,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Default angular tolerance for coplanarity tests (radians).
pub const COPLANAR_TOL: f64 = 0.01;

/// Tolerance for exact-ish geometric predicates (meters).
pub const PREDICATE_TOL: f64 = 1e-9;
