//! The nine acceptance criteria, each reported as one PASS/FAIL line.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use dshell::config::Config;
use dshell::geom::Vec3;
use dshell::mesh::{mesh_from_json, mesh_to_json};
use dshell::partition::{
    angle_cut_count, angle_partition, assembly_connected, network_patches, partition_pipeline, patch_violations,
    transversal_angles, CutRegistry, Partition, PartitionConfig,
};
use dshell::pathgen::{
    build_direction, build_piece, compute_orientation, subdivide_strip, Feature, PieceInput,
    PrintConfig,
};
use dshell::pipeline::{run_job, write_files};
use dshell::report::{parse_table, render_table, FabricationReport};
use proptest::prelude::Rng;
use proptest::test_runner::{RngAlgorithm, TestRng};
use dshell::shell::{build_shell, offset_shell, ShellConfig};
use dshell::strips::{trace_strips, RailSide};
use dshell::testmesh;
use dshell::{Error, Family, SdqMesh};

type Outcome = Result<(), String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus() -> Vec<(&'static str, SdqMesh)> {
    vec![
        ("grid", testmesh::grid(12, 12, 20.0).unwrap()),
        ("cylinder", testmesh::cylinder(16, 8, 60.0, 160.0).unwrap()),
        ("torus", testmesh::torus(16, 8, 80.0, 30.0).unwrap()),
        ("d2", testmesh::d2(6, 100.0, 20.0).unwrap()),
        ("d6", testmesh::d6(6, 100.0, 20.0).unwrap()),
        ("saddle", testmesh::saddle(12, 12, 15.0, 30.0).unwrap()),
    ]
}

fn settings() -> Vec<PartitionConfig> {
    let mut out = Vec::new();
    for gamma in [PI / 2.0, PI / 4.0] {
        for b in [500.0, 120.0] {
            out.push(PartitionConfig { gamma, bbox: [b; 3], dq: 2 });
        }
    }
    out
}

struct Run {
    name: &'static str,
    mesh: SdqMesh,
    cfg: PartitionConfig,
    result: Result<Partition, Error>,
    elapsed: Duration,
}

fn corpus_runs() -> Vec<Run> {
    let mut out = Vec::new();
    for (name, mesh) in corpus() {
        for cfg in settings() {
            let t = Instant::now();
            let result = partition_pipeline(&mesh, &cfg);
            out.push(Run { name, mesh: mesh.clone(), cfg, result, elapsed: t.elapsed() });
        }
    }
    out
}

// 1
fn fixpoint(runs: &[Run]) -> Outcome {
    for r in runs {
        let tag = format!("{} gamma={:.4} bbox={}", r.name, r.cfg.gamma, r.cfg.bbox[0]);
        check(r.mesh.num_quads() <= 2000, || format!("{tag}: corpus mesh too large"))?;
        let p = r.result.as_ref().map_err(|e| format!("{tag}: {e}"))?;
        check(r.elapsed < Duration::from_secs(10), || format!("{tag}: took {:?}", r.elapsed))?;
        for f in Family::both() {
            for patch in p.patches(f) {
                let v = patch_violations(&r.mesh, &p.registry, patch, &r.cfg).map_err(|e| e.to_string())?;
                check(v.is_empty(), || format!("{tag}: {v:?}"))?;
            }
        }
    }
    Ok(())
}

// 2
fn seam_disjointness(runs: &[Run]) -> Outcome {
    for r in runs {
        let tag = format!("{} gamma={:.4} bbox={}", r.name, r.cfg.gamma, r.cfg.bbox[0]);
        let p = r.result.as_ref().map_err(|e| format!("{tag}: {e}"))?;
        let overlap = p.registry.overlap();
        let residual = p.registry.residual_edges();
        check(overlap.is_subset(&residual), || format!("{tag}: overlap {overlap:?} outside residuals {residual:?}"))?;
        for res in p.registry.residuals() {
            check(res.edges.len() <= r.cfg.dq, || format!("{tag}: residual of {} edges", res.edges.len()))?;
        }
        if p.singularities.is_empty() {
            check(overlap.is_empty(), || format!("{tag}: overlap on a singularity-free mesh"))?;
        }
    }
    Ok(())
}

// 3
fn assembly(runs: &[Run]) -> Outcome {
    for r in runs {
        let tag = format!("{} gamma={:.4} bbox={}", r.name, r.cfg.gamma, r.cfg.bbox[0]);
        let p = r.result.as_ref().map_err(|e| format!("{tag}: {e}"))?;
        check(assembly_connected(&r.mesh, &p.u, &p.v), || format!("{tag}: contact graph disconnected"))?;
    }
    Ok(())
}

/// One strip of quads; rung `i` runs from (10 i, 0) up to (10 i, len(i)).
fn ladder(n: usize, len: impl Fn(usize) -> f64) -> SdqMesh {
    let mut verts = Vec::new();
    for i in 0..=n {
        verts.push([10.0 * i as f64, 0.0, 0.0]);
        verts.push([10.0 * i as f64, len(i), 0.0]);
    }
    let quads = (0..n).map(|i| [2 * i, 2 * i + 2, 2 * i + 3, 2 * i + 1]).collect();
    SdqMesh::new(verts, quads, None).unwrap()
}

fn rung_paths(m: &SdqMesh) -> Result<Vec<dshell::pathgen::ToolPath>, String> {
    // the strip whose rungs are the short cross edges
    for f in Family::both() {
        let net = trace_strips(m, f);
        if net.strips.len() == 1 && net.strips[0].len() == m.num_quads() {
            return subdivide_strip(m, &net.strips[0], m.vertices(), RailSide::Left, 1.5).map_err(|e| e.to_string());
        }
    }
    Err("no single strip along the ladder".into())
}

fn quad_area(p: [Vec3; 4]) -> f64 {
    0.5 * ((p[1] - p[0]).cross(&(p[2] - p[0])).norm() + (p[2] - p[0]).cross(&(p[3] - p[0])).norm())
}

// 4
fn path_fidelity() -> Outcome {
    let uniform = rung_paths(&ladder(5, |_| 6.0))?;
    check(uniform.len() == 5, || format!("uniform strip: {} paths, expected N = 4", uniform.len() - 1))?;
    check(uniform.iter().flat_map(|p| &p.points).all(|x| x.h == 1.5), || "uniform strip: h != 1.5".into())?;

    let n = 8;
    let trap = rung_paths(&ladder(n, |i| 4.0 + 4.0 * i as f64 / n as f64))?;
    let layers = trap.len() - 1;
    check(layers == 6, || format!("trapezoid: N = {layers}, expected 6"))?;
    for p in &trap[1..] {
        for x in &p.points {
            // rung i sits at x = 10 i
            let oracle = (4.0 + 0.4 * x.p.x / n as f64) / 6.0;
            check((x.h - oracle).abs() < 1e-9, || format!("trapezoid rung at x={}: h {} vs {oracle}", x.p.x, x.h))?;
        }
    }

    // flow: wall volume over each smooth piece against offset area times width
    let print = PrintConfig::default();
    let shell_cfg = ShellConfig::default();
    for (name, m) in [
        ("saddle", testmesh::saddle(12, 12, 15.0, 30.0).unwrap()),
        ("cylinder", testmesh::cylinder(16, 8, 60.0, 160.0).unwrap()),
        ("grid", testmesh::grid(12, 12, 20.0).unwrap()),
    ] {
        let p = partition_pipeline(&m, &PartitionConfig::default()).map_err(|e| e.to_string())?;
        let shell = build_shell(&m, &p.v, &shell_cfg).map_err(|e| e.to_string())?;
        let gap = shell.gaps.gap_quads();
        for f in Family::both() {
            for patch in p.patches(f) {
                let input = PieceInput::from_shell(&m, patch, &shell, 0.0);
                let piece = build_piece(&input, &print).map_err(|e| e.to_string())?;
                let walls: Vec<_> = piece.paths.iter().filter(|x| x.feature == Feature::Wall).collect();
                let volume: f64 = walls[1..].iter().map(|x| x.volume(print.width)).sum();
                let area: f64 = patch
                    .quads
                    .iter()
                    .filter(|q| f == Family::U || !gap.contains(q))
                    .map(|&q| quad_area(m.quad(q).map(|v| input.surface.vertices[v])))
                    .sum();
                let expect = area * print.width;
                let err = (volume - expect).abs() / expect;
                check(err < 0.02, || format!("{name} {f}{}: volume {volume:.1} vs {expect:.1}", patch.id))?;
            }
        }
    }
    Ok(())
}

/// Network of a panel whose transversal strips run around the arc.
fn turning_patch(m: &SdqMesh) -> Option<(Family, f64)> {
    let reg = CutRegistry::new();
    Family::both().into_iter().find_map(|f| {
        let p = network_patches(m, &reg, f);
        let a = transversal_angles(m, &reg, &p[0]).ok()?;
        let max = a.iter().map(|x| x.1).fold(0.0, f64::max);
        (max > 0.1).then_some((f, max))
    })
}

// 5
fn angle_cuts() -> Outcome {
    let cols = 20;
    let gamma = PI / 2.0;
    for (a, k) in [(0.6 * PI, 2), (PI, 2), (1.6 * PI, 4)] {
        let angle = a * cols as f64 / (cols - 1) as f64;
        let m = testmesh::cylinder_patch(3, cols, 50.0, 40.0, angle).map_err(|e| e.to_string())?;
        let (f, max) = turning_patch(&m).ok_or("no turning network")?;
        check((max - a).abs() < 1e-9, || format!("A = {max}, expected {a}"))?;
        check(angle_cut_count(max, gamma) == k, || format!("A = {a}: {} cuts, expected {k}", angle_cut_count(max, gamma)))?;
        let mut reg = CutRegistry::new();
        let patch = network_patches(&m, &reg, f).remove(0);
        let placed = angle_partition(&m, &mut reg, &patch, gamma).map_err(|e| e.to_string())?;
        check(placed == k, || format!("A = {a}: placed {placed}, expected {k}"))?;

        let cfg = PartitionConfig { gamma, bbox: [500.0; 3], dq: 2 };
        let p = partition_pipeline(&m, &cfg).map_err(|e| e.to_string())?;
        for patch in p.patches(f) {
            for (_, t) in transversal_angles(&m, &p.registry, patch).map_err(|e| e.to_string())? {
                check(t <= gamma + 1e-9, || format!("A = {a}: patch {} keeps {t}", patch.id))?;
            }
        }
    }
    Ok(())
}

fn unit_cloud(rng: &mut TestRng, axis: Vec3, n: usize, spread: f64) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            let j = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (axis + j * spread).normalize()
        })
        .collect()
}

fn mean_unit(v: &[Vec3]) -> Vec3 {
    v.iter().sum::<Vec3>().normalize()
}

// 6
fn orientation() -> Outcome {
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    for i in 0..100 {
        let axis = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if axis.norm() < 0.1 {
            continue;
        }
        let wall = unit_cloud(&mut rng, axis.normalize(), 40, 0.4);
        let first = unit_cloud(&mut rng, axis.normalize(), 12, 0.6);
        let (r, _) = compute_orientation(&wall, &first).map_err(|e| e.to_string())?;
        let m = r.matrix();
        check((m.transpose() * m - nalgebra::Matrix3::identity()).norm() < 1e-9, || format!("case {i}: not orthonormal"))?;
        check((m.determinant() - 1.0).abs() < 1e-9, || format!("case {i}: det {}", m.determinant()))?;
        let b = (mean_unit(&wall) + mean_unit(&first)).normalize();
        check((r * b - Vec3::z()).norm() < 1e-9, || format!("case {i}: build direction lands at {:?}", r * b))?;
    }

    let (r, _) = compute_orientation(&[-Vec3::z()], &[-Vec3::z()]).map_err(|e| e.to_string())?;
    check((r * -Vec3::z() - Vec3::z()).norm() < 1e-12, || "antiparallel direction not flipped".into())?;
    let (r, w) = compute_orientation(&[Vec3::y()], &[-Vec3::y()]).map_err(|e| e.to_string())?;
    check(w.len() == 1 && (r * Vec3::y() - Vec3::z()).norm() < 1e-9, || "cancelling directions".into())?;
    check(
        matches!(build_direction(&[Vec3::x(), -Vec3::x()], &[Vec3::x()]), Err(Error::DegenerateDirections)),
        || "degenerate wall directions accepted".into(),
    )?;

    // real pieces: recomputed in the fabrication frame, the build direction is z
    let m = testmesh::saddle(12, 12, 15.0, 30.0).unwrap();
    let p = partition_pipeline(&m, &PartitionConfig::default()).map_err(|e| e.to_string())?;
    let shell = build_shell(&m, &p.v, &ShellConfig::default()).map_err(|e| e.to_string())?;
    for f in Family::both() {
        for patch in p.patches(f) {
            let piece = build_piece(&PieceInput::from_shell(&m, patch, &shell, 0.0), &PrintConfig::default())
                .map_err(|e| e.to_string())?;
            let walls: Vec<_> = piece.walls().collect();
            let all: Vec<Vec3> = walls.iter().flat_map(|w| w.points.iter().map(|x| x.t)).collect();
            let first: Vec<Vec3> = walls[0].points.iter().map(|x| x.t).collect();
            let (b, _) = build_direction(&all, &first).map_err(|e| e.to_string())?;
            check((b - Vec3::z()).norm() < 1e-9, || format!("piece {f}{}: build direction {b:?}", patch.id))?;
            check((piece.transform.rotation.matrix().determinant() - 1.0).abs() < 1e-9, || "improper rotation".into())?;
        }
    }
    Ok(())
}

// 7
fn offsets() -> Outcome {
    let cfg = ShellConfig::default();
    check((cfg.offset_distance() - 3.75).abs() < 1e-12, || format!("offset distance {}", cfg.offset_distance()))?;
    let m = testmesh::cylinder(16, 8, 60.0, 160.0).unwrap();
    let (u, v) = offset_shell(&m, &cfg).map_err(|e| e.to_string())?;
    let mut radii = BTreeSet::new();
    for s in [&u, &v] {
        for (i, p) in s.vertices.iter().enumerate() {
            let d = (p - m.position(i)).norm();
            check((d - 3.75).abs() < 1e-9, || format!("{} vertex {i}: offset {d}", s.side))?;
        }
        let r: Vec<f64> = s.vertices.iter().map(|p| p.xy().norm()).collect();
        let r0 = r[0];
        check(r.iter().all(|x| (x - r0).abs() < 1e-9), || format!("{} radii not constant", s.side))?;
        radii.insert((r0 * 1e6).round() as i64);
    }
    check(radii == BTreeSet::from([56_250_000, 63_750_000]), || format!("radii {radii:?}"))
}

// 8
fn determinism() -> Outcome {
    let cfg = Config::default();
    for (name, m) in [("grid", testmesh::grid(4, 6, 10.0).unwrap()), ("d6", testmesh::d6(6, 100.0, 20.0).unwrap())] {
        let text = mesh_to_json(&m);
        let back = mesh_from_json(&text).map_err(|e| e.to_string())?;
        check(mesh_to_json(&back) == text, || format!("{name}: mesh JSON does not round-trip"))?;
        check(back.labels() == m.labels() && back.quads() == m.quads(), || format!("{name}: topology changed"))?;

        let a = run_job(name, &m, &cfg, None).map_err(|e| e.to_string())?;
        let b = run_job(name, &m, &cfg, None).map_err(|e| e.to_string())?;
        check(a.files == b.files, || format!("{name}: two runs differ"))?;
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        write_files(dir.path(), &a.files).map_err(|e| e.to_string())?;
        for (file, body) in &a.files {
            let disk = std::fs::read_to_string(dir.path().join(file)).map_err(|e| e.to_string())?;
            check(&disk == body, || format!("{name}: {file} differs on disk"))?;
        }
        let count = |side: &str| a.files.keys().filter(|k| k.starts_with(&format!("piece_{side}_"))).count();
        check(a.report.pieces_u == count("U") && a.report.pieces_v == count("V"), || {
            format!("{name}: report {}/{} vs files {}/{}", a.report.pieces_u, a.report.pieces_v, count("U"), count("V"))
        })?;
    }
    Ok(())
}

// 9
fn table_format() -> Outcome {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/prototype_table.txt");
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    check(rows.len() == 6, || format!("{} fixture rows", rows.len()))?;
    let mut reports = Vec::new();
    for row in rows {
        let r = FabricationReport::parse_row(row).map_err(|e| e.to_string())?;
        check(r.to_row() == row, || format!("{row:?} renders as {:?}", r.to_row()))?;
        reports.push(r);
    }
    check(parse_table(&text).map_err(|e| e.to_string())? == reports, || "fixture table parse".into())?;
    let rendered = render_table(&reports);
    check(parse_table(&rendered).map_err(|e| e.to_string())? == reports, || "rendered table does not read back".into())
}

#[test]
fn acceptance() {
    let runs = corpus_runs();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 fixpoint partition on the corpus", fixpoint(&runs)),
        ("2 seam disjointness", seam_disjointness(&runs)),
        ("3 connected assembly", assembly(&runs)),
        ("4 path fidelity and flow", path_fidelity()),
        ("5 angle cut counts", angle_cuts()),
        ("6 rigid orientation", orientation()),
        ("7 offset distance", offsets()),
        ("8 deterministic output", determinism()),
        ("9 report table format", table_format()),
    ];
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (name, result) in &criteria {
        match result {
            Ok(()) => writeln!(out, "PASS {name}").unwrap(),
            Err(e) => {
                writeln!(out, "FAIL {name}: {e}").unwrap();
                failed.push(*name);
            }
        }
    }
    drop(out);
    assert!(failed.is_empty(), "failed: {failed:?}");
}
