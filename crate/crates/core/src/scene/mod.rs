//! Lanes, stochastic actor spawning, kinematic stepping and box labels.

mod actor;
mod config;
mod labels;
mod lane;
mod obb;

pub use actor::{
    actor_meshes, actor_meshes_with_templates, spawn_actors, step_actors, ActorClass,
    ActorInstance, ACTOR_OBJECT_ID_BASE, MAX_CONSECUTIVE_REJECTIONS, MIN_ACTOR_DIM,
};
pub use config::{SceneConfig, StaticMeshRef};
pub use labels::{generate_labels, BoxLabel, LABEL_BOX_MARGIN};
pub use lane::LanePolyline;
pub use obb::OrientedBox;
