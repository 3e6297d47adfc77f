use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dshell::config::{Config, Overrides};
use dshell::mesh::{load_mesh, mesh_to_json};
use dshell::pipeline::{
    analyze, partition_files, partition_stage, preview_files, report_files, report_stage, run_job, shell_files,
    shell_stage, slice_files, slice_stage, write_files, JobDir, JobFiles,
};
use dshell::preview::PreviewKind;
use dshell::report::render_table;
use dshell::testmesh::TestMesh;
use dshell::Error;

#[derive(Parser)]
#[command(name = "dshell", version, about = "Double-shell partitioning and non-planar toolpaths for SDQ meshes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// Mesh file (gen, analyze, partition, run) or job directory (shell, slice, report).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file (gen) or job directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Reachable box as X,Y,Z in mm.
    #[arg(long, global = true, value_parser = parse_bbox)]
    bbox: Option<[f64; 3]>,
    #[arg(long, global = true)]
    dq: Option<usize>,
    #[arg(long, global = true)]
    nozzle: Option<f64>,
    #[arg(long, global = true)]
    thickness: Option<f64>,
    #[arg(long, global = true)]
    rib_spacing: Option<usize>,
    #[arg(long, global = true)]
    rib_gap: Option<f64>,
    #[arg(long, global = true)]
    h_target: Option<f64>,
    #[arg(long, global = true)]
    speed_wall: Option<f64>,
    #[arg(long, global = true)]
    speed_support: Option<f64>,
    #[arg(long, global = true)]
    hatch: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a synthetic test mesh.
    Gen(GenArgs),
    /// Print the singularity census.
    Analyze,
    /// Cut both strip networks into printable patches.
    Partition,
    /// Offsets, tolerance gaps and ribs.
    Shell,
    /// Toolpaths, orientation and support per piece.
    Slice,
    /// Fabrication report, optionally with a preview.
    Report {
        #[arg(long)]
        preview: Option<String>,
    },
    /// Every stage from a mesh to the report.
    Run {
        #[arg(long)]
        preview: Option<String>,
    },
}

#[derive(Args)]
struct GenArgs {
    /// grid | cylinder | torus | d2 | d6 | saddle
    kind: String,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Grid spacing (mm).
    #[arg(long)]
    spacing: Option<f64>,
    /// Radius (mm): cylinder radius, torus tube radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Cylinder height or torus ring radius (mm).
    #[arg(long)]
    height: Option<f64>,
    /// Sector size (quads) for d2/d6.
    #[arg(long)]
    size: Option<usize>,
    /// Sector extent (mm) for d2/d6.
    #[arg(long)]
    extent: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
}

fn parse_bbox(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| "expected X,Y,Z".to_string())
}

fn test_mesh(a: &GenArgs) -> Result<TestMesh, Error> {
    Ok(match a.kind.as_str() {
        "grid" => TestMesh::Grid {
            rows: a.rows.unwrap_or(4),
            cols: a.cols.unwrap_or(6),
            spacing: a.spacing.unwrap_or(10.0),
        },
        "cylinder" => TestMesh::Cylinder {
            around: a.cols.unwrap_or(16),
            high: a.rows.unwrap_or(8),
            radius: a.radius.unwrap_or(60.0),
            height: a.height.unwrap_or(160.0),
        },
        "torus" => TestMesh::Torus {
            major: a.cols.unwrap_or(16),
            minor: a.rows.unwrap_or(8),
            major_radius: a.height.unwrap_or(80.0),
            minor_radius: a.radius.unwrap_or(30.0),
        },
        "d2" => TestMesh::D2 {
            size: a.size.unwrap_or(6),
            extent: a.extent.unwrap_or(100.0),
            amplitude: a.amplitude.unwrap_or(20.0),
        },
        "d6" => TestMesh::D6 {
            size: a.size.unwrap_or(6),
            extent: a.extent.unwrap_or(100.0),
            amplitude: a.amplitude.unwrap_or(20.0),
        },
        "saddle" => TestMesh::Saddle {
            rows: a.rows.unwrap_or(12),
            cols: a.cols.unwrap_or(12),
            spacing: a.spacing.unwrap_or(15.0),
            amplitude: a.amplitude.unwrap_or(30.0),
        },
        k => return Err(Error::InvalidParams(format!("unknown mesh kind {k:?}"))),
    })
}

impl Global {
    fn overrides(&self) -> Overrides {
        Overrides {
            gamma: self.gamma,
            bbox: self.bbox,
            dq: self.dq,
            nozzle: self.nozzle,
            thickness: self.thickness,
            rib_spacing: self.rib_spacing,
            rib_gap: self.rib_gap,
            h_target: self.h_target,
            speed_wall: self.speed_wall,
            speed_support: self.speed_support,
            hatch: self.hatch,
        }
    }

    /// `base`, replaced by --config when given, then the flag overrides.
    fn config(&self, base: Config) -> Result<Config, Error> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => base,
        };
        c.apply(&self.overrides());
        c.validate()?;
        Ok(c)
    }

    fn input(&self) -> Result<&Path, Error> {
        self.input.as_deref().ok_or_else(|| Error::InvalidParams("--input is required".into()))
    }

    fn out(&self) -> Result<&Path, Error> {
        self.out.as_deref().ok_or_else(|| Error::InvalidParams("--out is required".into()))
    }

    /// Job directory of a later stage: --input, else --out.
    fn job_dir(&self) -> Result<&Path, Error> {
        self.input.as_deref().or(self.out.as_deref()).ok_or_else(|| Error::InvalidParams("--input is required".into()))
    }

    fn out_or_job(&self) -> Result<&Path, Error> {
        self.out.as_deref().map_or_else(|| self.job_dir(), Ok)
    }
}

fn model_name(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("model").to_string()
}

fn preview_kind(p: &Option<String>) -> Result<Option<PreviewKind>, Error> {
    p.as_deref().map(str::parse).transpose()
}

/// 0 on success, 1 when printability checks failed.
fn execute(cli: &Cli) -> Result<u8, Error> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Gen(a) => {
            let json = mesh_to_json(&test_mesh(a)?.build()?);
            match &g.out {
                Some(p) => std::fs::write(p, json)?,
                None => print!("{json}"),
            }
        }
        Cmd::Analyze => {
            let mesh = load_mesh(g.input()?)?;
            let text = format!("{}\n", serde_json::to_string_pretty(&analyze(&mesh))?);
            match &g.out {
                Some(dir) => write_files(dir, &JobFiles::from([("analysis.json".into(), text)]))?,
                None => print!("{text}"),
            }
        }
        Cmd::Partition => {
            let input = g.input()?;
            let mesh = load_mesh(input)?;
            let cfg = g.config(Config::default())?;
            let (_, file) = partition_stage(&model_name(input), &mesh, &cfg)?;
            write_files(g.out()?, &partition_files(&mesh, &cfg, &file))?;
        }
        Cmd::Shell => {
            let job = JobDir::open(g.job_dir()?)?;
            let cfg = g.config(job.config)?;
            let shell = shell_stage(&job.mesh, &job.partition, &cfg)?;
            let mut files = shell_files(&shell);
            files.insert("config.json".into(), format!("{}\n", cfg.to_json()));
            write_files(g.out_or_job()?, &files)?;
        }
        Cmd::Slice => {
            let dir = g.job_dir()?;
            let job = JobDir::open(dir)?;
            let cfg = g.config(job.config)?;
            let shell = job.shell(dir)?;
            let (pieces, v) = slice_stage(&job.mesh, &job.partition, &shell, &cfg, &job.partition_file.config)?;
            let mut files = slice_files(&pieces, &v);
            files.insert("config.json".into(), format!("{}\n", cfg.to_json()));
            write_files(g.out_or_job()?, &files)?;
            return Ok(u8::from(!v.violations.is_empty()));
        }
        Cmd::Report { preview } => {
            let kind = preview_kind(preview)?;
            let dir = g.job_dir()?;
            let job = JobDir::open(dir)?;
            let cfg = g.config(job.config)?;
            let pieces = job.pieces(dir)?;
            let stats: Vec<_> = pieces.iter().map(|p| (p.side, p.stats(&cfg.print))).collect();
            let report = report_stage(&job.partition_file, &job.mesh, &stats);
            let mut files = report_files(&report, &cfg);
            if let Some(kind) = kind {
                let shell = job.shell(dir)?;
                files.extend(preview_files(&job.mesh, &job.partition, &shell, &pieces, kind).0);
            }
            write_files(g.out_or_job()?, &files)?;
            print!("{}", render_table(&[report]));
        }
        Cmd::Run { preview } => {
            let kind = preview_kind(preview)?;
            let input = g.input()?;
            let out = g.out()?;
            let mesh = load_mesh(input)?;
            let cfg = g.config(Config::default())?;
            let job = run_job(&model_name(input), &mesh, &cfg, kind)?;
            write_files(out, &job.files)?;
            print!("{}", render_table(&[job.report]));
            return Ok(u8::from(!job.validation.violations.is_empty()));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DSHELL_LOG", "warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("dshell: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
