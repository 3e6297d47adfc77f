//! Builds each synthetic mesh and prints its size and topology.

use dshell::testmesh::TestMesh;

fn main() -> dshell::Result<()> {
    let kinds = [
        ("grid", TestMesh::Grid { rows: 4, cols: 6, spacing: 10.0 }),
        ("cylinder", TestMesh::Cylinder { around: 16, high: 8, radius: 60.0, height: 160.0 }),
        ("torus", TestMesh::Torus { major: 16, minor: 8, major_radius: 80.0, minor_radius: 30.0 }),
        ("d2", TestMesh::D2 { size: 6, extent: 100.0, amplitude: 20.0 }),
        ("d6", TestMesh::D6 { size: 6, extent: 100.0, amplitude: 20.0 }),
        ("saddle", TestMesh::Saddle { rows: 12, cols: 12, spacing: 15.0, amplitude: 30.0 }),
    ];
    for (name, t) in kinds {
        let m = t.build()?;
        println!(
            "{name:<9} {:>4} vertices {:>4} quads  euler {:>2}  boundary loops {}",
            m.num_vertices(),
            m.num_quads(),
            m.euler_characteristic(),
            m.boundary_loops()
        );
    }
    Ok(())
}
