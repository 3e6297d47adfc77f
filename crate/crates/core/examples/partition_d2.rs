//! Partitions the D2 mesh and lists cuts, residual overlaps and patches.

use std::f64::consts::PI;

use dshell::partition::{partition_pipeline, PartitionConfig};
use dshell::{testmesh, Family};

fn main() -> dshell::Result<()> {
    let m = testmesh::d2(6, 100.0, 20.0)?;
    let cfg = PartitionConfig { gamma: PI / 2.0, bbox: [500.0; 3], dq: 2 };
    let p = partition_pipeline(&m, &cfg)?;
    for c in p.registry.cuts() {
        println!("{} cut {:?}: {} edges", c.network, c.origin, c.edges.len());
    }
    for r in p.registry.residuals() {
        println!("residual at singularity {}: {} edges", r.singularity, r.edges.len());
    }
    println!("overlap {:?}", p.registry.overlap());
    for f in Family::both() {
        for patch in p.patches(f) {
            println!("{f}{}: {} quads in {} strips", patch.id, patch.quads.len(), patch.strips.len());
        }
    }
    Ok(())
}
