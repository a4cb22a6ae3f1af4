//! Minimal Wavefront OBJ reader and writer: `v` and `f` records only.
//!
//! Face indices are 1-based (negative indices count back from the latest
//! vertex); `v/vt/vn` forms keep the position index. Polygons are fanned
//! around their first vertex. Every other record type is skipped.

use std::path::Path;

use super::{TriangleMesh, Vec3};
use crate::{Error, Real, Result};

pub fn load_obj<T: Real>(path: &Path, scale: T, object_id: u32) -> Result<TriangleMesh<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_obj(&text, scale, object_id).map_err(|reason| Error::format(path, reason))
}

/// Serializes a mesh as `v`/`f` records with 1-based indices.
pub fn to_obj<T: Real>(mesh: &TriangleMesh<T>) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

pub fn parse_obj<T: Real>(text: &str, scale: T, object_id: u32) -> Result<TriangleMesh<T>, String> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut xyz = [T::zero(); 3];
                for c in &mut xyz {
                    let raw = fields
                        .next()
                        .ok_or_else(|| format!("line {line_no}: vertex needs 3 coordinates"))?;
                    let value: f64 = raw
                        .parse()
                        .map_err(|_| format!("line {line_no}: bad coordinate {raw:?}"))?;
                    if !value.is_finite() {
                        return Err(format!("line {line_no}: non-finite vertex coordinate"));
                    }
                    *c = T::lit(value) * scale;
                }
                vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let idx = fields
                    .map(|f| resolve_index(f, vertices.len(), line_no))
                    .collect::<Result<Vec<u32>, String>>()?;
                if idx.len() < 3 {
                    return Err(format!("line {line_no}: face needs at least 3 vertices"));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    Ok(TriangleMesh::new(vertices, triangles, object_id))
}

fn resolve_index(field: &str, count: usize, line_no: usize) -> Result<u32, String> {
    let head = field.split('/').next().unwrap_or("");
    let raw: i64 = head
        .parse()
        .map_err(|_| format!("line {line_no}: bad face index {field:?}"))?;
    let resolved = match raw {
        0 => None,
        r if r > 0 => Some(r - 1),
        r => Some(count as i64 + r),
    };
    match resolved {
        Some(i) if i >= 0 && (i as usize) < count => Ok(i as u32),
        _ => Err(format!("line {line_no}: face index {raw} out of range")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_is_fan_triangulated() {
        let src = "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n";
        let m: TriangleMesh<f64> = parse_obj(src, 1.0, 4).unwrap();
        assert_eq!(m.triangles, vec![[0, 1, 2], [0, 2, 3]]);
        assert_eq!(m.object_id, 4);
    }

    #[test]
    fn scale_applied() {
        let src = "v 100 200 300\nv 0 0 0\nv 0 100 0\nf 1 2 3\n";
        let m: TriangleMesh<f64> = parse_obj(src, 0.01, 0).unwrap();
        assert_eq!(m.vertices[0], Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn negative_indices() {
        let src = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n";
        let m: TriangleMesh<f64> = parse_obj(src, 1.0, 0).unwrap();
        assert_eq!(m.triangles, vec![[0, 1, 2]]);
    }

    #[test]
    fn non_finite_reports_line() {
        let src = "v 0 0 0\nv 1 nan 0\n";
        let err = parse_obj::<f64>(src, 1.0, 0).unwrap_err();
        assert!(err.starts_with("line 2:"), "{err}");
    }

    #[test]
    fn index_out_of_range() {
        let err = parse_obj::<f64>("v 0 0 0\nf 1 2 3\n", 1.0, 0).unwrap_err();
        assert!(err.contains("line 2"), "{err}");
    }
}
