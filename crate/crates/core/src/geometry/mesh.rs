use std::fs;
use std::path::Path;

use nalgebra::{Point3, Unit, Vector3};

use super::{GeometryError, PREDICATE_TOL};

/// Supported mesh file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    ObjAscii,
    StlAscii,
    StlBinary,
}

impl MeshFormat {
    /// Guess the format from a file extension, defaulting to OBJ.
    pub fn from_path(path: &Path) -> MeshFormat {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("stl") => MeshFormat::StlBinary,
            _ => MeshFormat::ObjAscii,
        }
    }
}

/// An indexed triangle mesh with per-triangle unit normals.
///
/// Construction drops zero-area triangles and rejects out-of-range indices;
/// normals follow the vertex winding (right-hand rule).
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[usize; 3]>,
    normals: Vec<Unit<Vector3<f64>>>,
}

/// A mesh together with the number of degenerate triangles dropped while
/// loading it.
#[derive(Debug, Clone)]
pub struct LoadedMesh {
    pub mesh: TriMesh,
    pub dropped_degenerate: usize,
}

impl TriMesh {
    /// Build a mesh, dropping degenerate (zero-area) triangles. Returns the
    /// mesh and the dropped-triangle count.
    pub fn from_parts(
        vertices: Vec<Point3<f64>>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<(Self, usize), GeometryError> {
        let mut kept = Vec::with_capacity(triangles.len());
        let mut normals = Vec::with_capacity(triangles.len());
        let mut dropped = 0;
        for tri in triangles {
            if tri.iter().any(|&i| i >= vertices.len()) {
                return Err(GeometryError::ParseError {
                    format: MeshFormat::ObjAscii,
                    reason: format!("triangle index out of range: {tri:?}"),
                });
            }
            let [a, b, c] = tri;
            let n = (vertices[b] - vertices[a]).cross(&(vertices[c] - vertices[a]));
            let len = n.norm();
            if len <= PREDICATE_TOL {
                dropped += 1;
                continue;
            }
            kept.push(tri);
            normals.push(Unit::new_unchecked(n / len));
        }
        if kept.is_empty() {
            return Err(GeometryError::EmptyMesh);
        }
        Ok((
            TriMesh {
                vertices,
                triangles: kept,
                normals,
            },
            dropped,
        ))
    }

    /// Build a mesh, discarding the degenerate-triangle count.
    pub fn new(
        vertices: Vec<Point3<f64>>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self, GeometryError> {
        Ok(Self::from_parts(vertices, triangles)?.0)
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn normals(&self) -> &[Unit<Vector3<f64>>] {
        &self.normals
    }

    /// Corner points of triangle `i`.
    pub fn triangle_points(&self, i: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.triangles[i];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, i: usize) -> f64 {
        let [a, b, c] = self.triangle_points(i);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn aabb(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Largest axis-aligned extent, used as the torque normalization scale.
    pub fn max_extent(&self) -> f64 {
        let (lo, hi) = self.aabb();
        (hi - lo).amax()
    }

    /// Signed volume via the divergence theorem. Positive for closed meshes
    /// with outward normals.
    pub fn volume(&self) -> f64 {
        let mut v6 = 0.0;
        for tri in &self.triangles {
            let a = self.vertices[tri[0]].coords;
            let b = self.vertices[tri[1]].coords;
            let c = self.vertices[tri[2]].coords;
            v6 += a.dot(&b.cross(&c));
        }
        v6 / 6.0
    }

    /// Center of mass for uniform density, from the signed tetrahedral
    /// decomposition against the origin. Requires a closed mesh.
    pub fn center_of_mass(&self) -> Point3<f64> {
        let mut v6 = 0.0;
        let mut acc = Vector3::zeros();
        for tri in &self.triangles {
            let a = self.vertices[tri[0]].coords;
            let b = self.vertices[tri[1]].coords;
            let c = self.vertices[tri[2]].coords;
            let det = a.dot(&b.cross(&c));
            v6 += det;
            acc += det * (a + b + c) / 4.0;
        }
        if v6.abs() <= PREDICATE_TOL {
            // Open or flat mesh: fall back to the vertex centroid.
            let mut s = Vector3::zeros();
            for v in &self.vertices {
                s += v.coords;
            }
            return Point3::from(s / self.vertices.len() as f64);
        }
        Point3::from(acc / v6)
    }

    /// The mesh with a rigid transform applied to every vertex.
    pub fn transformed(&self, iso: &nalgebra::Isometry3<f64>) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|v| iso * v).collect(),
            triangles: self.triangles.clone(),
            normals: self
                .normals
                .iter()
                .map(|n| Unit::new_unchecked(iso.rotation * n.into_inner()))
                .collect(),
        }
    }
}

/// Load a mesh file in the declared format, dropping degenerate triangles.
pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<LoadedMesh, GeometryError> {
    let bytes = fs::read(path).map_err(|source| GeometryError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let (vertices, triangles) = match format {
        MeshFormat::ObjAscii => parse_obj(&bytes)?,
        MeshFormat::StlAscii => parse_stl_ascii(&bytes)?,
        MeshFormat::StlBinary => parse_stl_binary(&bytes)?,
    };
    let (mesh, dropped_degenerate) = TriMesh::from_parts(vertices, triangles)?;
    Ok(LoadedMesh {
        mesh,
        dropped_degenerate,
    })
}

fn parse_err(format: MeshFormat, reason: impl Into<String>) -> GeometryError {
    GeometryError::ParseError {
        format,
        reason: reason.into(),
    }
}

/// OBJ subset: `v` and `f` lines only. Faces with more than three indices are
/// fan-triangulated.
fn parse_obj(bytes: &[u8]) -> Result<(Vec<Point3<f64>>, Vec<[usize; 3]>), GeometryError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| parse_err(MeshFormat::ObjAscii, "file is not valid UTF-8"))?;
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut coord = [0.0; 3];
                for c in &mut coord {
                    *c = it
                        .next()
                        .and_then(|t| t.parse::<f64>().ok())
                        .ok_or_else(|| {
                            parse_err(
                                MeshFormat::ObjAscii,
                                format!("bad vertex at line {}", lineno + 1),
                            )
                        })?;
                }
                vertices.push(Point3::new(coord[0], coord[1], coord[2]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for tok in it {
                    // `f v`, `f v/vt`, `f v//vn`, `f v/vt/vn`
                    let head = tok.split('/').next().unwrap_or("");
                    let i: i64 = head.parse().map_err(|_| {
                        parse_err(
                            MeshFormat::ObjAscii,
                            format!("bad face index {tok:?} at line {}", lineno + 1),
                        )
                    })?;
                    let resolved = if i > 0 {
                        (i - 1) as usize
                    } else if i < 0 {
                        let n = vertices.len() as i64 + i;
                        if n < 0 {
                            return Err(parse_err(
                                MeshFormat::ObjAscii,
                                format!("negative index out of range at line {}", lineno + 1),
                            ));
                        }
                        n as usize
                    } else {
                        return Err(parse_err(
                            MeshFormat::ObjAscii,
                            format!("zero face index at line {}", lineno + 1),
                        ));
                    };
                    idx.push(resolved);
                }
                if idx.len() < 3 {
                    return Err(parse_err(
                        MeshFormat::ObjAscii,
                        format!("face with fewer than 3 vertices at line {}", lineno + 1),
                    ));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok((vertices, triangles))
}

/// Weld triangle-soup vertices so STL meshes regain shared-edge adjacency.
struct VertexWelder {
    map: std::collections::HashMap<(i64, i64, i64), usize>,
    vertices: Vec<Point3<f64>>,
}

impl VertexWelder {
    const QUANTUM: f64 = 1e-7; // 0.1 um, far below any mesh feature size

    fn new() -> Self {
        VertexWelder {
            map: std::collections::HashMap::new(),
            vertices: Vec::new(),
        }
    }

    fn insert(&mut self, p: Point3<f64>) -> usize {
        let key = (
            (p.x / Self::QUANTUM).round() as i64,
            (p.y / Self::QUANTUM).round() as i64,
            (p.z / Self::QUANTUM).round() as i64,
        );
        *self.map.entry(key).or_insert_with(|| {
            self.vertices.push(p);
            self.vertices.len() - 1
        })
    }
}

fn parse_stl_ascii(bytes: &[u8]) -> Result<(Vec<Point3<f64>>, Vec<[usize; 3]>), GeometryError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|_| parse_err(MeshFormat::StlAscii, "file is not valid UTF-8"))?;
    let mut welder = VertexWelder::new();
    let mut triangles = Vec::new();
    let mut facet: Vec<usize> = Vec::new();
    let mut seen_solid = false;
    for (lineno, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("solid") => seen_solid = true,
            Some("vertex") => {
                let mut coord = [0.0; 3];
                for c in &mut coord {
                    *c = it
                        .next()
                        .and_then(|t| t.parse::<f64>().ok())
                        .ok_or_else(|| {
                            parse_err(
                                MeshFormat::StlAscii,
                                format!("bad vertex at line {}", lineno + 1),
                            )
                        })?;
                }
                facet.push(welder.insert(Point3::new(coord[0], coord[1], coord[2])));
            }
            Some("endfacet") => {
                if facet.len() != 3 {
                    return Err(parse_err(
                        MeshFormat::StlAscii,
                        format!("facet with {} vertices near line {}", facet.len(), lineno + 1),
                    ));
                }
                triangles.push([facet[0], facet[1], facet[2]]);
                facet.clear();
            }
            _ => {}
        }
    }
    if !seen_solid {
        return Err(parse_err(MeshFormat::StlAscii, "missing `solid` header"));
    }
    Ok((welder.vertices, triangles))
}

/// Binary STL: 80-byte header, u32 triangle count, then 50-byte
/// little-endian records (normal, three vertices, attribute count).
fn parse_stl_binary(bytes: &[u8]) -> Result<(Vec<Point3<f64>>, Vec<[usize; 3]>), GeometryError> {
    if bytes.len() < 84 {
        return Err(parse_err(MeshFormat::StlBinary, "file shorter than header"));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let expected = 84 + count * 50;
    if bytes.len() < expected {
        return Err(parse_err(
            MeshFormat::StlBinary,
            format!("expected {expected} bytes for {count} triangles, got {}", bytes.len()),
        ));
    }
    let f32_at = |off: usize| f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as f64;
    let mut welder = VertexWelder::new();
    let mut triangles = Vec::with_capacity(count);
    for t in 0..count {
        let base = 84 + t * 50 + 12; // skip the stored normal
        let mut idx = [0usize; 3];
        for (v, slot) in idx.iter_mut().enumerate() {
            let off = base + v * 12;
            *slot = welder.insert(Point3::new(f32_at(off), f32_at(off + 4), f32_at(off + 8)));
        }
        triangles.push(idx);
    }
    Ok((welder.vertices, triangles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;
    use std::io::Write;

    const CUBE_OBJ: &str = "\
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3
f 1 3 2
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
";

    fn write_temp(content: &[u8], ext: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
        f.write_all(content).unwrap();
        f
    }

    #[test]
    fn obj_unit_cube() {
        let f = write_temp(CUBE_OBJ.as_bytes(), ".obj");
        let loaded = load_mesh(f.path(), MeshFormat::ObjAscii).unwrap();
        assert_eq!(loaded.mesh.vertices().len(), 8);
        assert_eq!(loaded.mesh.triangles().len(), 12);
        assert_eq!(loaded.dropped_degenerate, 0);
        for n in loaded.mesh.normals() {
            let v = n.into_inner();
            // Axis-aligned normals on a cube.
            let amax = v.amax();
            assert!((amax - 1.0).abs() < 1e-12, "normal {v:?} not axis aligned");
        }
        assert!((loaded.mesh.volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn obj_degenerate_triangle_dropped_with_count() {
        let mut obj = CUBE_OBJ.to_string();
        obj.push_str("f 1 1 2\n");
        let f = write_temp(obj.as_bytes(), ".obj");
        let loaded = load_mesh(f.path(), MeshFormat::ObjAscii).unwrap();
        assert_eq!(loaded.mesh.triangles().len(), 12);
        assert_eq!(loaded.dropped_degenerate, 1);
    }

    #[test]
    fn obj_malformed_face_is_parse_error() {
        let f = write_temp(b"v 0 0 0\nf 1 x 2\n", ".obj");
        match load_mesh(f.path(), MeshFormat::ObjAscii) {
            Err(GeometryError::ParseError { .. }) => {}
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn obj_no_triangles_is_empty_mesh() {
        let f = write_temp(b"v 0 0 0\nv 1 0 0\nv 0 1 0\n", ".obj");
        match load_mesh(f.path(), MeshFormat::ObjAscii) {
            Err(GeometryError::EmptyMesh) => {}
            other => panic!("expected EmptyMesh, got {other:?}"),
        }
    }

    #[test]
    fn stl_ascii_roundtrip_of_cube() {
        let cube = shapes::box_mesh(1.0, 1.0, 1.0);
        let mut stl = String::from("solid cube\n");
        for (i, _) in cube.triangles().iter().enumerate() {
            let pts = cube.triangle_points(i);
            let n = cube.normals()[i];
            stl.push_str(&format!(
                "facet normal {} {} {}\nouter loop\n",
                n.x, n.y, n.z
            ));
            for p in pts {
                stl.push_str(&format!("vertex {} {} {}\n", p.x, p.y, p.z));
            }
            stl.push_str("endloop\nendfacet\n");
        }
        stl.push_str("endsolid cube\n");
        let f = write_temp(stl.as_bytes(), ".stl");
        let loaded = load_mesh(f.path(), MeshFormat::StlAscii).unwrap();
        assert_eq!(loaded.mesh.triangles().len(), 12);
        assert_eq!(loaded.mesh.vertices().len(), 8); // welded
        assert!((loaded.mesh.volume() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn stl_binary_roundtrip_of_cube() {
        let cube = shapes::box_mesh(0.03, 0.03, 0.03);
        let mut bytes = vec![0u8; 80];
        bytes.extend_from_slice(&(cube.triangles().len() as u32).to_le_bytes());
        for (i, _) in cube.triangles().iter().enumerate() {
            let n = cube.normals()[i];
            for c in [n.x, n.y, n.z] {
                bytes.extend_from_slice(&(c as f32).to_le_bytes());
            }
            for p in cube.triangle_points(i) {
                for c in [p.x, p.y, p.z] {
                    bytes.extend_from_slice(&(c as f32).to_le_bytes());
                }
            }
            bytes.extend_from_slice(&0u16.to_le_bytes());
        }
        let f = write_temp(&bytes, ".stl");
        let loaded = load_mesh(f.path(), MeshFormat::StlBinary).unwrap();
        assert_eq!(loaded.mesh.triangles().len(), 12);
        assert_eq!(loaded.mesh.vertices().len(), 8);
        assert!((loaded.mesh.volume() - 0.03f64.powi(3)).abs() < 1e-9);
    }

    #[test]
    fn stl_binary_truncated_is_parse_error() {
        let mut bytes = vec![0u8; 80];
        bytes.extend_from_slice(&5u32.to_le_bytes());
        bytes.extend_from_slice(&[0u8; 20]);
        let f = write_temp(&bytes, ".stl");
        assert!(matches!(
            load_mesh(f.path(), MeshFormat::StlBinary),
            Err(GeometryError::ParseError { .. })
        ));
    }

    #[test]
    fn l_block_normals_cover_six_axis_directions() {
        let l = shapes::l_block(0.05, 0.03, 0.05, 0.02, 0.02);
        let mut seen = std::collections::BTreeSet::new();
        for n in l.normals() {
            let v = n.into_inner();
            for (k, axis) in [
                Vector3::x(),
                Vector3::y(),
                Vector3::z(),
                -Vector3::x(),
                -Vector3::y(),
                -Vector3::z(),
            ]
            .iter()
            .enumerate()
            {
                if (v - axis).norm() < 1e-9 {
                    seen.insert(k);
                }
            }
        }
        assert_eq!(seen.len(), 6, "L-block face normals {seen:?}");
    }

    #[test]
    fn center_of_mass_of_shifted_cube() {
        let cube = shapes::box_mesh(2.0, 2.0, 2.0);
        let iso = nalgebra::Isometry3::translation(1.0, 2.0, 3.0);
        let com = cube.transformed(&iso).center_of_mass();
        assert!((com - Point3::new(1.0, 2.0, 3.0)).norm() < 1e-12);
    }
}
