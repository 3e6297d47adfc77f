//! Singularity census of the D2 and D6 test meshes.

use dshell::singularities::{find_singularities, separatrix_census};
use dshell::testmesh;

fn main() -> dshell::Result<()> {
    for (name, m) in [("d2", testmesh::d2(6, 100.0, 20.0)?), ("d6", testmesh::d6(6, 100.0, 20.0)?)] {
        let sings = find_singularities(&m);
        println!("{name}: {} singularities", sings.len());
        for s in &sings {
            println!("  vertex {} valence {} {:?}", s.vertex, s.valence, s.kind);
        }
        for sep in separatrix_census(&m) {
            println!("  separatrix from {} along {}: {} edges, ends {:?}", sep.origin, sep.label, sep.edges.len(), sep.terminal);
        }
    }
    Ok(())
}
