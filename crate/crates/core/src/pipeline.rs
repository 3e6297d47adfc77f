//! Stage drivers and the job directory layout shared by the CLI and the
//! examples.
//!
//! A job directory holds `mesh.json`, `config.json`, `partition.json`,
//! `shell.json`, one `piece_<side>_<id>.toolpath.json` per piece,
//! `validation.json`, `report.json` and `report.txt`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::mesh::{mesh_from_json, mesh_to_json, Family, SdqMesh};
use crate::partition::{
    network_patches, partition_pipeline, patch_violations, transversal_angles, Cut, CutRegistry, Partition,
    PartitionConfig, PatchRecord, Residual,
};
use crate::pathgen::{build_piece, Orientation, piece_to_json, validate_printability, PieceInput, PieceStats, ToolpathPiece};
use crate::preview::{export_preview, PreviewJob, PreviewKind};
use crate::report::{fabrication_report, report_text, FabricationReport};
use crate::shell::{build_shell, GapStrip, Rib, Shell, ShellConfig};
use crate::singularities::{find_singularities, separatrix_census, Singularity, SingularityKind, Terminal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityRecord {
    pub vertex: usize,
    pub valence: usize,
    pub kind: SingularityKind,
    pub separatrices: usize,
    pub terminals: Vec<Terminal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub vertices: usize,
    pub quads: usize,
    pub euler: i64,
    pub boundary_loops: usize,
    pub singularities: Vec<SingularityRecord>,
}

pub fn analyze(mesh: &SdqMesh) -> Analysis {
    let census = separatrix_census(mesh);
    let singularities = find_singularities(mesh)
        .into_iter()
        .map(|s: Singularity| {
            let own: Vec<_> = census.iter().filter(|x| x.origin == s.vertex).collect();
            SingularityRecord {
                vertex: s.vertex,
                valence: s.valence,
                kind: s.kind,
                separatrices: own.len(),
                terminals: own.iter().map(|x| x.terminal).collect(),
            }
        })
        .collect();
    Analysis {
        vertices: mesh.num_vertices(),
        quads: mesh.num_quads(),
        euler: mesh.euler_characteristic(),
        boundary_loops: mesh.boundary_loops(),
        singularities,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionFile {
    pub model: String,
    /// Settings the cuts were computed with (bbox after the reach reserve).
    pub config: PartitionConfig,
    pub reach_bbox: [f64; 3],
    pub singularities: Vec<Singularity>,
    pub cuts: Vec<Cut>,
    pub residuals: Vec<Residual>,
    /// Edges cut on both networks.
    pub overlap: Vec<usize>,
    /// Cut count per origin.
    pub census: BTreeMap<String, usize>,
    pub geometric_cuts: usize,
    pub patches: Vec<PatchRecord>,
    pub warnings: Vec<String>,
}

impl PartitionFile {
    pub fn new(model: &str, partition: &Partition, config: PartitionConfig, reach_bbox: [f64; 3]) -> Self {
        let reg = &partition.registry;
        let mut census = BTreeMap::new();
        for c in reg.cuts() {
            let key = serde_json::to_value(c.origin).expect("origin serializes");
            *census.entry(key.as_str().unwrap_or_default().to_string()).or_insert(0) += 1;
        }
        PartitionFile {
            model: model.to_string(),
            config,
            reach_bbox,
            singularities: partition.singularities.clone(),
            cuts: reg.cuts().to_vec(),
            residuals: reg.residuals().to_vec(),
            overlap: reg.overlap().into_iter().collect(),
            census,
            geometric_cuts: reg.geometric_cut_count(),
            patches: partition.u.iter().chain(&partition.v).map(PatchRecord::from).collect(),
            warnings: reg.warnings.clone(),
        }
    }

    /// Rebuilds the partition on `mesh` from the recorded cuts and checks
    /// that it yields the recorded patches.
    pub fn restore(&self, mesh: &SdqMesh) -> Result<Partition> {
        let mut registry = CutRegistry::new();
        for c in &self.cuts {
            if let Some(&e) = c.edges.iter().find(|&&e| e >= mesh.num_edges()) {
                return Err(Error::Parse(format!("partition cut edge {e} is not in the mesh")));
            }
            registry.add(c.clone());
        }
        for r in &self.residuals {
            registry.add_residual(r.clone());
        }
        registry.warnings = self.warnings.clone();
        let u = network_patches(mesh, &registry, Family::U);
        let v = network_patches(mesh, &registry, Family::V);
        let rebuilt: Vec<PatchRecord> = u.iter().chain(&v).map(PatchRecord::from).collect();
        if rebuilt != self.patches {
            return Err(Error::Parse("partition.json does not match the mesh".into()));
        }
        Ok(Partition {
            singularities: find_singularities(mesh),
            census: separatrix_census(mesh),
            registry,
            u,
            v,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellFile {
    pub config: ShellConfig,
    pub offset_distance: f64,
    pub u_offset: Vec<[f64; 3]>,
    pub v_offset: Vec<[f64; 3]>,
    pub gaps: Vec<GapStrip>,
    pub u_ribs: Vec<Rib>,
    pub v_ribs: Vec<Rib>,
    pub screws: Vec<[f64; 3]>,
    pub warnings: Vec<String>,
}

impl ShellFile {
    pub fn new(shell: &Shell) -> Self {
        let arr = |v: &[crate::geom::Vec3]| v.iter().map(|p| [p.x, p.y, p.z]).collect();
        ShellFile {
            config: shell.config,
            offset_distance: shell.config.offset_distance(),
            u_offset: arr(&shell.u_surface.vertices),
            v_offset: arr(&shell.v_surface.vertices),
            gaps: shell.gaps.gaps.clone(),
            u_ribs: shell.u_ribs.clone(),
            v_ribs: shell.v_ribs.clone(),
            screws: shell.screws.clone(),
            warnings: shell.warnings.clone(),
        }
    }

    /// Recomputes the shell with the recorded settings and checks it
    /// against the file.
    pub fn restore(&self, mesh: &SdqMesh, partition: &Partition) -> Result<Shell> {
        let shell = build_shell(mesh, &partition.v, &self.config)?;
        if ShellFile::new(&shell) != *self {
            return Err(Error::Parse("shell.json does not match the partition".into()));
        }
        Ok(shell)
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read(dir: &Path, name: &str) -> Result<String> {
    let p = dir.join(name);
    std::fs::read_to_string(&p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}

pub fn piece_file_name(side: Family, id: usize) -> String {
    format!("piece_{side}_{id}.toolpath.json")
}

/// Output files of a job by name, in a fixed order.
pub type JobFiles = BTreeMap<String, String>;

pub fn partition_stage(model: &str, mesh: &SdqMesh, cfg: &Config) -> Result<(Partition, PartitionFile)> {
    cfg.validate()?;
    let pc = cfg.partition_for_print()?;
    let p = partition_pipeline(mesh, &pc)?;
    let file = PartitionFile::new(model, &p, pc, cfg.partition.bbox);
    Ok((p, file))
}

pub fn shell_stage(mesh: &SdqMesh, partition: &Partition, cfg: &Config) -> Result<Shell> {
    cfg.shell.validate()?;
    build_shell(mesh, &partition.v, &cfg.shell)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct JobValidation {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

/// Pieces of both sides in id order, with every printability finding.
pub fn slice_stage(
    mesh: &SdqMesh,
    partition: &Partition,
    shell: &Shell,
    cfg: &Config,
    partition_cfg: &PartitionConfig,
) -> Result<(Vec<ToolpathPiece>, JobValidation)> {
    cfg.print.validate(cfg.shell.nozzle)?;
    let mut pieces = Vec::new();
    let mut v = JobValidation::default();
    for f in Family::both() {
        for patch in partition.patches(f) {
            v.violations.extend(patch_violations(mesh, &partition.registry, patch, partition_cfg)?);
            let angles = transversal_angles(mesh, &partition.registry, patch)?;
            let max_angle = angles.iter().map(|a| a.1).fold(0.0, f64::max);
            let piece = build_piece(&PieceInput::from_shell(mesh, patch, shell, max_angle), &cfg.print)?;
            let check = validate_printability(&piece, cfg.shell.nozzle, cfg.partition.gamma, cfg.partition.bbox);
            v.violations.extend(check.violations);
            v.warnings.extend(piece.warnings.iter().cloned());
            v.warnings.extend(check.warnings.into_iter().map(|w| format!("{f} piece {}: {w}", patch.id)));
            pieces.push(piece);
        }
    }
    for w in &v.violations {
        log::error!("{w}");
    }
    Ok((pieces, v))
}

pub fn report_stage(
    file: &PartitionFile,
    mesh: &SdqMesh,
    pieces: &[(Family, PieceStats)],
) -> FabricationReport {
    fabrication_report(&file.model, mesh, file.singularities.len(), file.geometric_cuts, &file.residuals, pieces)
}

pub fn partition_files(mesh: &SdqMesh, cfg: &Config, file: &PartitionFile) -> JobFiles {
    let mut out = JobFiles::new();
    out.insert("mesh.json".into(), mesh_to_json(mesh));
    out.insert("config.json".into(), to_json(cfg));
    out.insert("partition.json".into(), to_json(file));
    out
}

pub fn shell_files(shell: &Shell) -> JobFiles {
    JobFiles::from([("shell.json".to_string(), to_json(&ShellFile::new(shell)))])
}

pub fn slice_files(pieces: &[ToolpathPiece], validation: &JobValidation) -> JobFiles {
    let mut out: JobFiles = pieces.iter().map(|p| (piece_file_name(p.side, p.id), piece_to_json(p))).collect();
    out.insert("validation.json".into(), to_json(validation));
    out
}

pub fn report_files(report: &FabricationReport, cfg: &Config) -> JobFiles {
    JobFiles::from([
        ("report.json".to_string(), to_json(report)),
        ("report.txt".to_string(), report_text(report, cfg.print.speed_wall, cfg.print.speed_support)),
    ])
}

#[derive(Debug, Clone)]
pub struct JobOutput {
    pub files: JobFiles,
    pub report: FabricationReport,
    pub validation: JobValidation,
}

/// Every stage in memory; nothing is produced if a stage fails.
pub fn run_job(model: &str, mesh: &SdqMesh, cfg: &Config, preview: Option<PreviewKind>) -> Result<JobOutput> {
    let (partition, pfile) = partition_stage(model, mesh, cfg)?;
    let shell = shell_stage(mesh, &partition, cfg)?;
    let (pieces, validation) = slice_stage(mesh, &partition, &shell, cfg, &pfile.config)?;
    let stats: Vec<(Family, PieceStats)> = pieces.iter().map(|p| (p.side, p.stats(&cfg.print))).collect();
    let report = report_stage(&pfile, mesh, &stats);
    let mut files = partition_files(mesh, cfg, &pfile);
    files.extend(shell_files(&shell));
    files.extend(slice_files(&pieces, &validation));
    files.extend(report_files(&report, cfg));
    if let Some(kind) = preview {
        files.extend(preview_files(mesh, &partition, &shell, &pieces, kind).0);
    }
    Ok(JobOutput { files, report, validation })
}

pub fn write_files(dir: &Path, files: &JobFiles) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in files {
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

/// A job directory read back from disk.
pub struct JobDir {
    pub mesh: SdqMesh,
    pub config: Config,
    pub partition_file: PartitionFile,
    pub partition: Partition,
}

impl JobDir {
    pub fn open(dir: &Path) -> Result<JobDir> {
        let mesh = mesh_from_json(&read(dir, "mesh.json")?)?;
        let config = Config::from_json(&read(dir, "config.json")?)?;
        let partition_file: PartitionFile = serde_json::from_str(&read(dir, "partition.json")?)?;
        let partition = partition_file.restore(&mesh)?;
        Ok(JobDir { mesh, config, partition_file, partition })
    }

    pub fn shell(&self, dir: &Path) -> Result<Shell> {
        let file: ShellFile = serde_json::from_str(&read(dir, "shell.json")?)?;
        file.restore(&self.mesh, &self.partition)
    }

    /// Pieces read back from the toolpath files, in (side, id) order.
    pub fn pieces(&self, dir: &Path) -> Result<Vec<ToolpathPiece>> {
        let mut out = Vec::new();
        for n in piece_files(dir)? {
            let (id, side, m, paths) = crate::pathgen::piece_from_json(&read(dir, &n)?)?;
            out.push(ToolpathPiece {
                id,
                side,
                transform: Orientation::from_matrix(&m),
                paths,
                max_angle: 0.0,
                warnings: Vec::new(),
            });
        }
        out.sort_by_key(|p| (p.side, p.id));
        Ok(out)
    }

    /// Per-piece statistics recomputed from the toolpath files present.
    pub fn piece_stats(&self, dir: &Path, cfg: &Config) -> Result<Vec<(Family, PieceStats)>> {
        Ok(self.pieces(dir)?.iter().map(|p| (p.side, p.stats(&cfg.print))).collect())
    }
}

fn piece_files(dir: &Path) -> Result<Vec<String>> {
    let mut names: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.starts_with("piece_") && n.ends_with(".toolpath.json"))
        .collect();
    names.sort();
    Ok(names)
}

/// `preview_<kind>.obj` and `preview_<kind>.svg`, plus any warnings.
pub fn preview_files(
    mesh: &SdqMesh,
    partition: &Partition,
    shell: &Shell,
    pieces: &[ToolpathPiece],
    kind: PreviewKind,
) -> (JobFiles, Vec<String>) {
    let patches =
        partition.u.iter().chain(&partition.v).map(|p| (p.network, p.id, p.quads.as_slice())).collect();
    let ribs: Vec<Rib> = shell.u_ribs.iter().chain(&shell.v_ribs).cloned().collect();
    let job = PreviewJob { mesh, patches, pieces, ribs: &ribs };
    let p = export_preview(&job, kind);
    let name = format!("{kind:?}").to_lowercase();
    let files = JobFiles::from([(format!("preview_{name}.obj"), p.obj), (format!("preview_{name}.svg"), p.svg)]);
    (files, p.warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testmesh;

    #[test]
    fn grid_job_end_to_end() {
        let m = testmesh::grid(6, 6, 20.0).unwrap();
        let out = run_job("grid", &m, &Config::default(), None).unwrap();
        assert!(out.validation.violations.is_empty(), "{:?}", out.validation.violations);
        for f in ["mesh.json", "config.json", "partition.json", "shell.json", "report.json", "report.txt", "validation.json"] {
            assert!(out.files.contains_key(f), "{f}");
        }
        let n_pieces = out.files.keys().filter(|k| k.ends_with(".toolpath.json")).count();
        assert_eq!(n_pieces, out.report.pieces_u + out.report.pieces_v);
        assert_eq!(out.report.sings, 0);

        let dir = tempfile::tempdir().unwrap();
        write_files(dir.path(), &out.files).unwrap();
        let job = JobDir::open(dir.path()).unwrap();
        job.shell(dir.path()).unwrap();
        let stats = job.piece_stats(dir.path(), &job.config).unwrap();
        let again = report_stage(&job.partition_file, &job.mesh, &stats);
        assert_eq!(report_files(&again, &job.config), report_files(&out.report, &job.config));
    }

    #[test]
    fn tampered_partition_is_rejected() {
        let m = testmesh::grid(4, 4, 20.0).unwrap();
        let cfg = Config::default();
        let (_, mut file) = partition_stage("g", &m, &cfg).unwrap();
        file.patches[0].quads.pop();
        assert!(file.restore(&m).is_err());
    }
}
