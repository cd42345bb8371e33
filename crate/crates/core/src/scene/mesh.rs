use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::mathcore::Vec3;

pub type Vec3d = Vec3<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub position: Vec3d,
    /// Texture coordinate with `(0, 0)` at the top-left of the image.
    pub uv: [f64; 2],
    pub normal: Vec3d,
}

/// Indexed triangle list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    vertices: Vec<Vertex>,
    indices: Vec<u32>,
}

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("index count {0} is not a multiple of three")]
    IndexCount(usize),
    #[error("index {index} out of range for {vertices} vertices")]
    IndexRange { index: u32, vertices: usize },
    #[error("vertex {0} has a non-unit normal")]
    Normal(usize),
}

impl Mesh {
    pub fn new(vertices: Vec<Vertex>, indices: Vec<u32>) -> Result<Self, MeshError> {
        if !indices.len().is_multiple_of(3) {
            return Err(MeshError::IndexCount(indices.len()));
        }
        if let Some(&index) = indices.iter().find(|&&i| i as usize >= vertices.len()) {
            return Err(MeshError::IndexRange { index, vertices: vertices.len() });
        }
        if let Some(i) = vertices.iter().position(|v| (v.normal.norm() - 1.0).abs() > 1e-6) {
            return Err(MeshError::Normal(i));
        }
        Ok(Self { vertices, indices })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn triangle_count(&self) -> usize {
        self.indices.len() / 3
    }

    pub fn triangles(&self) -> impl Iterator<Item = [&Vertex; 3]> + '_ {
        self.indices
            .chunks_exact(3)
            .map(|t| [&self.vertices[t[0] as usize], &self.vertices[t[1] as usize], &self.vertices[t[2] as usize]])
    }

    /// Axis-aligned bounds `(min, max)` of the vertex positions.
    pub fn bounds(&self) -> Option<(Vec3d, Vec3d)> {
        let first = self.vertices.first()?.position;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), v| {
            let p = v.position;
            (
                Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z)),
                Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z)),
            )
        }))
    }

    /// Replaces every normal with its triangle's face normal, un-sharing
    /// vertices. Degenerate triangles are dropped.
    pub fn with_flat_normals(&self) -> Mesh {
        let mut vertices = Vec::with_capacity(self.indices.len());
        for [a, b, c] in self.triangles() {
            if let Some(n) = face_normal(a.position, b.position, c.position) {
                vertices.extend([a, b, c].map(|v| Vertex { normal: n, ..*v }));
            }
        }
        let indices = (0..vertices.len() as u32).collect();
        Mesh { vertices, indices }
    }
}

/// Unit normal of triangle `(a, b, c)` following its winding.
pub fn face_normal(a: Vec3d, b: Vec3d, c: Vec3d) -> Option<Vec3d> {
    (b - a).cross(c - a).normalized()
}

#[derive(Debug, Error)]
pub enum ObjError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unsupported OBJ feature `{keyword}`")]
    UnsupportedFeature { line: usize, keyword: String },
}

const FREE_FORM: &[&str] = &[
    "vp", "cstype", "deg", "bmat", "step", "curv", "curv2", "surf", "parm", "trim", "hole", "scrv", "sp", "end", "con",
];

/// Parses the OBJ subset `v`, `vt`, `vn` and `f`. Polygon faces are fanned
/// into triangles around their first corner; faces without normals get a
/// flat face normal. Texture `v` is flipped so that `(0, 0)` is the top-left
/// texel. Grouping, material and smoothing records are ignored.
pub fn parse_obj(text: &str) -> Result<Mesh, ObjError> {
    let mut positions: Vec<Vec3d> = Vec::new();
    let mut uvs: Vec<[f64; 2]> = Vec::new();
    let mut normals: Vec<Vec3d> = Vec::new();
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut indices: Vec<u32> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        let mut tok = body.split_whitespace();
        let Some(keyword) = tok.next() else { continue };
        let err = |message: String| ObjError::Parse { line, message };
        let floats = |tok: std::str::SplitWhitespace<'_>| -> Result<Vec<f64>, ObjError> {
            tok.map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| err(format!("invalid number {t:?}"))))
                .collect()
        };
        match keyword {
            "v" => {
                let v = floats(tok)?;
                if !(3..=4).contains(&v.len()) {
                    return Err(err(format!("vertex needs 3 coordinates, got {}", v.len())));
                }
                positions.push(Vec3::new(v[0], v[1], v[2]));
            }
            "vt" => {
                let v = floats(tok)?;
                if v.is_empty() || v.len() > 3 {
                    return Err(err(format!("texture coordinate needs 1 to 3 values, got {}", v.len())));
                }
                uvs.push([v[0], 1.0 - v.get(1).copied().unwrap_or(0.0)]);
            }
            "vn" => {
                let v = floats(tok)?;
                if v.len() != 3 {
                    return Err(err(format!("normal needs 3 components, got {}", v.len())));
                }
                let n = Vec3::new(v[0], v[1], v[2]).normalized().ok_or_else(|| err("zero-length normal".into()))?;
                normals.push(n);
            }
            "f" => {
                let corners = tok
                    .map(|t| parse_corner(t, positions.len(), uvs.len(), normals.len()).map_err(&err))
                    .collect::<Result<Vec<_>, _>>()?;
                if corners.len() < 3 {
                    return Err(err(format!("face needs at least 3 corners, got {}", corners.len())));
                }
                for k in 1..corners.len() - 1 {
                    let tri = [corners[0], corners[k], corners[k + 1]];
                    let p = tri.map(|c| positions[c.0]);
                    let flat = face_normal(p[0], p[1], p[2]);
                    if tri.iter().any(|c| c.2.is_none()) && flat.is_none() {
                        continue;
                    }
                    for (corner, pos) in tri.iter().zip(p) {
                        let normal = match corner.2 {
                            Some(n) => normals[n],
                            None => flat.expect("checked above"),
                        };
                        let uv = corner.1.map(|t| uvs[t]).unwrap_or([0.0, 0.0]);
                        indices.push(vertices.len() as u32);
                        vertices.push(Vertex { position: pos, uv, normal });
                    }
                }
            }
            "o" | "g" | "s" | "usemtl" | "mtllib" | "l" | "p" => {}
            k if FREE_FORM.contains(&k) => {
                return Err(ObjError::UnsupportedFeature { line, keyword: k.to_string() });
            }
            other => return Err(err(format!("unknown record `{other}`"))),
        }
    }
    Ok(Mesh { vertices, indices })
}

type Corner = (usize, Option<usize>, Option<usize>);

fn resolve(raw: &str, count: usize, what: &str) -> Result<usize, String> {
    let idx: i64 = raw.parse().map_err(|_| format!("invalid {what} index {raw:?}"))?;
    let resolved = if idx > 0 { idx - 1 } else { count as i64 + idx };
    if idx == 0 || resolved < 0 || resolved >= count as i64 {
        return Err(format!("{what} index {idx} out of range (have {count})"));
    }
    Ok(resolved as usize)
}

fn parse_corner(token: &str, nv: usize, nt: usize, nn: usize) -> Result<Corner, String> {
    let mut parts = token.split('/');
    let v = resolve(parts.next().unwrap_or(""), nv, "vertex")?;
    let t = match parts.next() {
        Some("") | None => None,
        Some(s) => Some(resolve(s, nt, "texture")?),
    };
    let n = match parts.next() {
        Some("") | None => None,
        Some(s) => Some(resolve(s, nn, "normal")?),
    };
    if parts.next().is_some() {
        return Err(format!("malformed face corner {token:?}"));
    }
    Ok((v, t, n))
}

pub fn load_obj(path: &Path) -> Result<Mesh, ObjError> {
    let text = std::fs::read_to_string(path).map_err(|source| ObjError::Io { path: path.to_path_buf(), source })?;
    parse_obj(&text)
}

/// Writes a mesh as OBJ with one `v/vt/vn` triple per vertex.
pub fn to_obj_string(mesh: &Mesh) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", v.position.x, v.position.y, v.position.z);
    }
    for v in &mesh.vertices {
        let _ = writeln!(s, "vt {} {}", v.uv[0], 1.0 - v.uv[1]);
    }
    for v in &mesh.vertices {
        let _ = writeln!(s, "vn {} {} {}", v.normal.x, v.normal.y, v.normal.z);
    }
    for t in mesh.indices.chunks_exact(3) {
        let _ = writeln!(s, "f {0}/{0}/{0} {1}/{1}/{1} {2}/{2}/{2}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

/// Axis-aligned cube spanning `[0, size]^3`, four vertices per face so each
/// face carries its own normal and full `[0, 1]^2` texture square.
pub fn cube(size: f64) -> Mesh {
    // (normal, u axis, v axis) per face; corners are origin + u * s + v * s
    let faces: [[[f64; 3]; 4]; 6] = [
        [[0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, -1.0, 0.0]],
        [[0.0, 0.0, 1.0], [1.0, 1.0, 1.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]],
        [[-1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, -1.0], [0.0, -1.0, 0.0]],
        [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]],
        [[0.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]],
        [[0.0, -1.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
    ];
    let mut vertices = Vec::with_capacity(24);
    let mut indices = Vec::with_capacity(36);
    for [normal, origin, u, v] in faces {
        let base = vertices.len() as u32;
        for (cu, cv) in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)] {
            let p = Vec3::from(origin) + Vec3::from(u) * cu + Vec3::from(v) * cv;
            vertices.push(Vertex { position: p * size, uv: [cu, cv], normal: Vec3::from(normal) });
        }
        indices.extend([base, base + 1, base + 2, base, base + 2, base + 3]);
    }
    Mesh { vertices, indices }
}

/// UV sphere centered at the origin.
pub fn uv_sphere(radius: f64, stacks: u32, slices: u32) -> Mesh {
    let stacks = stacks.max(2);
    let slices = slices.max(3);
    let mut vertices = Vec::new();
    for i in 0..=stacks {
        let v = i as f64 / stacks as f64;
        let theta = v * std::f64::consts::PI;
        for j in 0..=slices {
            let u = j as f64 / slices as f64;
            let phi = u * std::f64::consts::TAU;
            let n = Vec3::new(theta.sin() * phi.cos(), theta.cos(), theta.sin() * phi.sin());
            let n = n.normalized().unwrap_or(Vec3::new(0.0, 1.0, 0.0));
            vertices.push(Vertex { position: n * radius, uv: [u, v], normal: n });
        }
    }
    let row = slices + 1;
    let mut indices = Vec::new();
    for i in 0..stacks {
        for j in 0..slices {
            let a = i * row + j;
            let b = a + row;
            if i != 0 {
                indices.extend([a, a + 1, b]);
            }
            if i != stacks - 1 {
                indices.extend([a + 1, b + 1, b]);
            }
        }
    }
    Mesh { vertices, indices }
}
