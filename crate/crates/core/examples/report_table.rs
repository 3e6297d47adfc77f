//! Reports for three meshes rendered as one table, then read back.

use dshell::config::Config;
use dshell::pipeline::run_job;
use dshell::report::{parse_table, render_table};
use dshell::testmesh;

fn main() -> dshell::Result<()> {
    let cfg = Config::default();
    let mut reports = Vec::new();
    for (name, m) in [
        ("grid", testmesh::grid(4, 6, 10.0)?),
        ("saddle", testmesh::saddle(12, 12, 15.0, 30.0)?),
        ("d6", testmesh::d6(6, 100.0, 20.0)?),
    ] {
        reports.push(run_job(name, &m, &cfg, None)?.report);
    }
    let table = render_table(&reports);
    print!("{table}");
    assert_eq!(parse_table(&table)?.len(), reports.len());
    Ok(())
}
