//! Triangle meshes, BVH construction and ray/scene intersection.

mod bvh;
mod mesh;
mod obj;
mod ray;
mod vec3;

pub use bvh::{build_bvh, Aabb, Bvh, EmptyScene, RayCast, SceneLayers};
pub(crate) use mesh::BOX_TRIANGLES;
pub use mesh::TriangleMesh;
pub use obj::{load_obj, parse_obj, to_obj};
pub use ray::{intersect_triangle, Hit, Ray, DETERMINANT_EPSILON, MIN_HIT_DISTANCE};
pub use vec3::{Mat3, Vec3};
