//! Slices one saddle piece and prints its transform and path summary.

use dshell::partition::{partition_pipeline, PartitionConfig};
use dshell::pathgen::{build_piece, validate_printability, PieceInput, PrintConfig};
use dshell::shell::{build_shell, ShellConfig};
use dshell::testmesh;

fn main() -> dshell::Result<()> {
    let m = testmesh::saddle(12, 12, 15.0, 30.0)?;
    let pc = PartitionConfig::default();
    let p = partition_pipeline(&m, &pc)?;
    let shell = build_shell(&m, &p.v, &ShellConfig::default())?;
    let print = PrintConfig::default();
    let piece = build_piece(&PieceInput::from_shell(&m, &p.u[0], &shell, 0.0), &print)?;
    for row in piece.transform.matrix().chunks(4) {
        println!("{:>9.3?}", row);
    }
    let mut counts = std::collections::BTreeMap::new();
    for path in &piece.paths {
        *counts.entry(format!("{:?}", path.feature)).or_insert(0) += 1;
    }
    println!("paths {counts:?}");
    let s = piece.stats(&print);
    println!("wall {:.0} mm, support {:.0} mm, {:.1} min", s.wall_length, s.support_length, s.time / 60.0);
    let v = validate_printability(&piece, ShellConfig::default().nozzle, pc.gamma, pc.bbox);
    println!("printable: {}", v.ok());
    Ok(())
}
