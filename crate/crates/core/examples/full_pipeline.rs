//! Runs every stage on the D6 mesh and writes the job to a directory.
//!
//! cargo run --example full_pipeline -- /tmp/d6-job

use dshell::config::Config;
use dshell::pipeline::{run_job, write_files};
use dshell::preview::PreviewKind;
use dshell::testmesh;

fn main() -> dshell::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "d6-job".into());
    let m = testmesh::d6(6, 100.0, 20.0)?;
    let job = run_job("d6", &m, &Config::default(), Some(PreviewKind::Paths))?;
    write_files(std::path::Path::new(&out), &job.files)?;
    for name in job.files.keys() {
        println!("{out}/{name}");
    }
    println!("{} violations", job.validation.violations.len());
    print!("{}", job.files["report.txt"]);
    Ok(())
}
