use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::{Error, Real, Result};

/// Indexed triangle mesh carrying one object tag for all its triangles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub triangles: Vec<[u32; 3]>,
    pub object_id: u32,
}

impl<T: Real> TriangleMesh<T> {
    pub fn new(vertices: Vec<Vec3<T>>, triangles: Vec<[u32; 3]>, object_id: u32) -> Self {
        TriangleMesh {
            vertices,
            triangles,
            object_id,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self.vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(
                format!("mesh {} vertex {i}", self.object_id),
                "non-finite coordinate",
            ));
        }
        let n = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i as usize >= n) {
                return Err(Error::validation(
                    format!("mesh {} triangle {t}", self.object_id),
                    format!("index out of range for {n} vertices"),
                ));
            }
        }
        Ok(())
    }

    pub fn triangle(&self, t: usize) -> [Vec3<T>; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    /// Axis-aligned bounds as `(min, max)`, or `None` for a vertex-less mesh.
    pub fn bounds(&self) -> Option<(Vec3<T>, Vec3<T>)> {
        let first = *self.vertices.first()?;
        Some(
            self.vertices
                .iter()
                .fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))),
        )
    }

    pub fn translated(mut self, offset: Vec3<T>) -> Self {
        for v in &mut self.vertices {
            *v += offset;
        }
        self
    }

    /// Axis-aligned box spanning `min..max`, outward-facing, 12 triangles.
    pub fn cuboid(min: Vec3<T>, max: Vec3<T>, object_id: u32) -> Self {
        let vertices = (0..8)
            .map(|i| {
                Vec3::new(
                    if i & 1 == 0 { min.x } else { max.x },
                    if i & 2 == 0 { min.y } else { max.y },
                    if i & 4 == 0 { min.z } else { max.z },
                )
            })
            .collect();
        TriangleMesh::new(vertices, BOX_TRIANGLES.to_vec(), object_id)
    }

    /// Horizontal quad at height `z` covering `[-half, half]` in x and y.
    pub fn ground_quad(half: T, z: T, object_id: u32) -> Self {
        let vertices = vec![
            Vec3::new(-half, -half, z),
            Vec3::new(half, -half, z),
            Vec3::new(half, half, z),
            Vec3::new(-half, half, z),
        ];
        TriangleMesh::new(vertices, vec![[0, 1, 2], [0, 2, 3]], object_id)
    }
}

/// Triangles of a box whose corner `i` sits at bit pattern (x=bit0, y=bit1, z=bit2).
pub(crate) const BOX_TRIANGLES: [[u32; 3]; 12] = [
    [0, 2, 3],
    [0, 3, 1],
    [4, 5, 7],
    [4, 7, 6],
    [0, 1, 5],
    [0, 5, 4],
    [2, 6, 7],
    [2, 7, 3],
    [0, 4, 6],
    [0, 6, 2],
    [1, 3, 7],
    [1, 7, 5],
];
