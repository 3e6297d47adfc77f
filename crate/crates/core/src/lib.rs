//! Partitioning of strip-decomposable quad meshes into double-shell pieces
//! and generation of their non-planar toolpaths.

pub mod config;
pub mod error;
pub mod geom;
pub mod mesh;
pub mod partition;
pub mod pathgen;
pub mod pipeline;
pub mod preview;
pub mod report;
pub mod shell;
pub mod singularities;
pub mod strips;
pub mod testmesh;

pub use error::{Error, Result};
pub use mesh::{Family, SdqMesh};
