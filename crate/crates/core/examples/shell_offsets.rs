//! Offsets, tolerance gaps and ribs for a partitioned cylinder.

use dshell::partition::{partition_pipeline, PartitionConfig};
use dshell::shell::{build_shell, ShellConfig};
use dshell::testmesh;

fn main() -> dshell::Result<()> {
    let m = testmesh::cylinder(16, 8, 60.0, 160.0)?;
    let p = partition_pipeline(&m, &PartitionConfig::default())?;
    let cfg = ShellConfig::default();
    let shell = build_shell(&m, &p.v, &cfg)?;
    let radius = |v: &[dshell::geom::Vec3]| v[0].xy().norm();
    println!("offset {} mm", cfg.offset_distance());
    println!("U radius {:.2}  V radius {:.2}", radius(&shell.u_surface.vertices), radius(&shell.v_surface.vertices));
    for g in &shell.gaps.gaps {
        println!("gap on V{} next to V{}: {} quads", g.patch, g.neighbor, g.quads.len());
    }
    println!("{} U ribs, {} V ribs, {} screws", shell.u_ribs.len(), shell.v_ribs.len(), shell.screws.len());
    for w in &shell.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
