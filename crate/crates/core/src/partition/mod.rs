//! Splitting both strip networks into printable patches.

mod geometric;
mod patch;
mod pca;
mod region;
mod registry;
mod topological;

use serde::{Deserialize, Serialize};

pub use geometric::{
    alignment, angle_cut_count, angle_partition, angle_variation, equidistant, fits, patch_points, size_partition,
    sorted_bounds, transversal_angles, ANGLE_EPS,
};
pub use patch::{build_patch, network_patches, strip_structure, OrderedStrip, Patch, PatchRecord, StripGraph};
pub use pca::pca_extents;
pub use region::{components_with, straight_line, straight_ray, Region};
pub use registry::{Cut, CutOrigin, CutRegistry, Residual, Truncation};
pub use topological::{ensure_simply_connected, split_branches, topological_partition};

use crate::error::{Error, Result};
use crate::mesh::{Family, SdqMesh};
use crate::singularities::{find_singularities, separatrix_census, Separatrix, Singularity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PartitionConfig {
    /// Maximum print angle variation (rad).
    pub gamma: f64,
    /// Reachable box extents (mm).
    pub bbox: [f64; 3],
    /// Length of the D2 residual overlap, in edges.
    pub dq: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig { gamma: std::f64::consts::FRAC_PI_2, bbox: [500.0; 3], dq: 2 }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= std::f64::consts::PI) {
            return Err(Error::InvalidConfig(format!("gamma must be in (0, pi], got {}", self.gamma)));
        }
        if self.bbox.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
            return Err(Error::InvalidConfig("bbox extents must be positive".into()));
        }
        if self.dq == 0 {
            return Err(Error::InvalidConfig("dq must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Partition {
    pub singularities: Vec<Singularity>,
    pub census: Vec<Separatrix>,
    pub registry: CutRegistry,
    pub u: Vec<Patch>,
    pub v: Vec<Patch>,
}

impl Partition {
    pub fn patches(&self, network: Family) -> &[Patch] {
        match network {
            Family::U => &self.u,
            Family::V => &self.v,
        }
    }

    pub fn geometric_cuts(&self) -> usize {
        self.registry.geometric_cut_count()
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Stage {
    Topology,
    All,
}

fn step(mesh: &SdqMesh, registry: &mut CutRegistry, patches: &[Patch], cfg: &PartitionConfig, stage: Stage) -> Result<bool> {
    for p in patches {
        if ensure_simply_connected(mesh, registry, p)? {
            return Ok(true);
        }
    }
    for p in patches {
        if split_branches(mesh, registry, p)? {
            return Ok(true);
        }
    }
    if stage == Stage::Topology {
        return Ok(false);
    }
    for p in patches {
        if size_partition(mesh, registry, p, cfg.bbox)? > 0 {
            return Ok(true);
        }
    }
    for p in patches {
        if angle_partition(mesh, registry, p, cfg.gamma)? > 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

fn fixpoint(mesh: &SdqMesh, registry: &mut CutRegistry, network: Family, cfg: &PartitionConfig, stage: Stage) -> Result<()> {
    let cap = 4 * mesh.num_quads() + 16;
    for _ in 0..cap {
        let patches = network_patches(mesh, registry, network);
        if !step(mesh, registry, &patches, cfg, stage)? {
            return Ok(());
        }
    }
    Err(Error::NoFixpoint)
}

/// Topological cuts on both networks, then handle and branch repair, then
/// size and angle cuts, each network driven to a fixpoint.
pub fn partition_pipeline(mesh: &SdqMesh, cfg: &PartitionConfig) -> Result<Partition> {
    cfg.validate()?;
    let singularities = find_singularities(mesh);
    let census = separatrix_census(mesh);
    let mut registry = CutRegistry::new();
    for f in Family::both() {
        topological_partition(mesh, &singularities, &census, f, cfg.dq, &mut registry);
    }
    for f in Family::both() {
        fixpoint(mesh, &mut registry, f, cfg, Stage::Topology)?;
    }
    for f in Family::both() {
        fixpoint(mesh, &mut registry, f, cfg, Stage::All)?;
    }
    let u = network_patches(mesh, &registry, Family::U);
    let v = network_patches(mesh, &registry, Family::V);
    log::info!("partition: {} U patches, {} V patches, {} geometric cuts", u.len(), v.len(), registry.geometric_cut_count());
    Ok(Partition { singularities, census, registry, u, v })
}

/// Every failed patch postcondition, as readable messages.
pub fn patch_violations(mesh: &SdqMesh, registry: &CutRegistry, patch: &Patch, cfg: &PartitionConfig) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let tag = format!("{} patch {}", patch.network, patch.id);
    if !patch.is_simply_connected() {
        out.push(format!("{tag}: euler characteristic {}", patch.euler));
    }
    if patch.order.is_none() {
        out.push(format!("{tag}: strips do not stack as a path"));
    }
    if !fits(mesh, &patch.quads, cfg.bbox) {
        out.push(format!("{tag}: exceeds bounding box"));
    }
    for (s, a) in transversal_angles(mesh, registry, patch)? {
        if a > cfg.gamma + ANGLE_EPS {
            out.push(format!("{tag}: transversal strip at quad {} turns {a:.6} rad", s.quads[0]));
        }
    }
    Ok(out)
}

/// True if the graph linking each quad's U patch with its V patch is
/// connected.
pub fn assembly_connected(mesh: &SdqMesh, u: &[Patch], v: &[Patch]) -> bool {
    let nu = u.len();
    let mut owner = vec![[usize::MAX; 2]; mesh.num_quads()];
    for (i, p) in u.iter().enumerate() {
        for &q in &p.quads {
            owner[q][0] = i;
        }
    }
    for (i, p) in v.iter().enumerate() {
        for &q in &p.quads {
            owner[q][1] = nu + i;
        }
    }
    let n = nu + v.len();
    let mut adj = vec![Vec::new(); n];
    for [a, b] in owner {
        if a != usize::MAX && b != usize::MAX {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}
