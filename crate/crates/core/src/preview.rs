//! OBJ and SVG previews of patches, toolpaths and ribs.

use std::fmt::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{Family, SdqMesh};
use crate::pathgen::ToolpathPiece;
use crate::shell::Rib;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreviewKind {
    Patches,
    Paths,
    Ribs,
}

impl FromStr for PreviewKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "patches" => Ok(PreviewKind::Patches),
            "paths" => Ok(PreviewKind::Paths),
            "ribs" => Ok(PreviewKind::Ribs),
            _ => Err(Error::UnknownPreviewKind(s.to_string())),
        }
    }
}

pub struct PreviewJob<'a> {
    pub mesh: &'a SdqMesh,
    /// (side, id, quads) per patch.
    pub patches: Vec<(Family, usize, &'a [usize])>,
    pub pieces: &'a [ToolpathPiece],
    pub ribs: &'a [Rib],
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Preview {
    pub obj: String,
    pub svg: String,
    pub warnings: Vec<String>,
}

/// Color of group `i`: hues spread by the golden angle.
pub fn palette(i: usize) -> String {
    let hue = (i as f64 * 137.507_764) % 360.0;
    let (s, l) = (0.55, 0.6);
    let c = (1.0 - (2.0 * l - 1.0f64).abs()) * s;
    let x = c * (1.0 - ((hue / 60.0) % 2.0 - 1.0).abs());
    let (r, g, b) = match (hue / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let byte = |v: f64| ((v + m) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b))
}

/// Named groups of polylines (or polygons) in model coordinates.
struct Groups {
    names: Vec<String>,
    lines: Vec<Vec<Vec<Vec3>>>,
    closed: bool,
}

fn collect(job: &PreviewJob, kind: PreviewKind) -> Groups {
    let mut g = Groups { names: Vec::new(), lines: Vec::new(), closed: kind == PreviewKind::Patches };
    match kind {
        PreviewKind::Patches => {
            for (side, id, quads) in &job.patches {
                g.names.push(format!("{side}_{id}"));
                g.lines.push(quads.iter().map(|&q| job.mesh.quad(q).iter().map(|&v| job.mesh.position(v)).collect()).collect());
            }
        }
        PreviewKind::Paths => {
            for piece in job.pieces {
                let inv = piece.transform.rotation.inverse();
                let back = |p: &Vec3| inv * (p - piece.transform.translation);
                g.names.push(format!("{}_{}", piece.side, piece.id));
                g.lines.push(piece.paths.iter().map(|p| p.points.iter().map(|x| back(&x.p)).collect()).collect());
            }
        }
        PreviewKind::Ribs => {
            for (i, r) in job.ribs.iter().enumerate() {
                g.names.push(format!("{}_rib_{i}", r.side));
                g.lines.push(vec![r.points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect()]);
            }
        }
    }
    g
}

fn obj(g: &Groups) -> String {
    let mut out = String::new();
    let mut next = 1;
    for (name, lines) in g.names.iter().zip(&g.lines) {
        let _ = writeln!(out, "o {name}");
        for l in lines {
            for p in l {
                let _ = writeln!(out, "v {:.6} {:.6} {:.6}", p.x, p.y, p.z);
            }
            let idx: Vec<String> = (next..next + l.len()).map(|i| i.to_string()).collect();
            let _ = writeln!(out, "{} {}", if g.closed { "f" } else { "l" }, idx.join(" "));
            next += l.len();
        }
    }
    out
}

/// Top view (x right, y up).
fn svg(g: &Groups) -> String {
    let all: Vec<Vec3> = g.lines.iter().flatten().flatten().copied().collect();
    let Some((lo, hi)) = crate::geom::aabb(all.iter()) else { return String::new() };
    let pad = 0.02 * (hi - lo).xy().norm().max(1.0);
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let stroke = 0.002 * w.max(h);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:.3} {h:.3}" width="{:.0}" height="{:.0}">"#,
        w.max(1.0),
        h.max(1.0)
    );
    for (i, (name, lines)) in g.names.iter().zip(&g.lines).enumerate() {
        let color = palette(i);
        let _ = writeln!(out, r#"<g id="{name}">"#);
        for l in lines {
            let pts: Vec<String> =
                l.iter().map(|p| format!("{:.3},{:.3}", p.x - lo.x + pad, hi.y - p.y + pad)).collect();
            if g.closed {
                let _ = writeln!(
                    out,
                    r#"<polygon points="{}" fill="{color}" stroke="black" stroke-width="{stroke:.3}"/>"#,
                    pts.join(" ")
                );
            } else {
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{stroke:.3}"/>"#,
                    pts.join(" ")
                );
            }
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

pub fn export_preview(job: &PreviewJob, kind: PreviewKind) -> Preview {
    let g = collect(job, kind);
    if g.lines.iter().all(|l| l.is_empty()) {
        let w = format!("nothing to preview for {kind:?}");
        log::warn!("{w}");
        return Preview { warnings: vec![w], ..Default::default() };
    }
    Preview { obj: obj(&g), svg: svg(&g), warnings: Vec::new() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_patches_two_objects() {
        let m = crate::testmesh::grid(1, 2, 10.0).unwrap();
        let (a, b) = ([0usize], [1usize]);
        let job = PreviewJob { mesh: &m, patches: vec![(Family::U, 0, &a), (Family::U, 1, &b)], pieces: &[], ribs: &[] };
        let p = export_preview(&job, PreviewKind::Patches);
        assert_eq!(p.obj.lines().filter(|l| l.starts_with("o ")).count(), 2);
        assert_eq!(p.obj.lines().filter(|l| l.starts_with("f ")).count(), 2);
        assert_eq!(p.svg.matches("<g ").count(), 2);
        assert_ne!(palette(0), palette(1));
    }

    #[test]
    fn empty_job_warns() {
        let m = crate::testmesh::grid(1, 1, 10.0).unwrap();
        let job = PreviewJob { mesh: &m, patches: vec![], pieces: &[], ribs: &[] };
        let p = export_preview(&job, PreviewKind::Paths);
        assert!(p.obj.is_empty() && p.svg.is_empty());
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn unknown_kind() {
        assert!(matches!("mesh".parse::<PreviewKind>(), Err(Error::UnknownPreviewKind(_))));
        assert_eq!("ribs".parse::<PreviewKind>().unwrap(), PreviewKind::Ribs);
    }
}
