//! Kinematic-tree model construction and ingestion.
//!
//! Models are immutable after construction: [`FloatingBaseModel::new`]
//! validates the tree once (unique names, topological numbering, tree
//! structure, inertia sanity) and everything downstream relies on it.

mod shape;
mod template;
mod tree;
mod urdf;

pub use shape::{inertia_from_shape, Shape};
pub use template::{build_human_template, TemplateDims, TemplateReport, HUMAN_LINKS, HUMAN_JOINTS};
pub use tree::{FloatingBaseModel, Joint, JointKind, Link};
pub use urdf::{parse_model, serialize_model};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("topology error: {0}")]
    Topology(String),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid inertia for link '{0}'")]
    InvalidInertia(String),
    #[error("unknown link '{0}'")]
    UnknownLink(String),
}
