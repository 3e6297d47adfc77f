//! Print paths for each piece: subdivision, ribs, orientation, support and
//! flow.

mod orient;
mod subdivide;
mod support;
mod validate;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use orient::{build_direction, compute_orientation, rotation_to_z, yaw_alignment, Orientation};
pub use subdivide::{layer_count, stack_paths, subdivide_strip};
pub use support::generate_support;
pub use validate::{validate_printability, Validation};

use crate::error::{Error, Result};
use crate::geom::{arr, Vec3};
use crate::mesh::{Family, SdqMesh};
use crate::partition::Patch;
use crate::shell::{side_sign, OffsetSurface, Rib, Shell};
use crate::strips::Strip;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    Wall,
    Rib,
    Platform,
    Scaffold,
}

impl Feature {
    pub fn is_support(self) -> bool {
        matches!(self, Feature::Platform | Feature::Scaffold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub p: Vec3,
    /// Unit print direction.
    pub t: Vec3,
    /// Layer height (mm).
    pub h: f64,
    /// Volumetric flow (mm^3/s).
    pub flow: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToolPath {
    pub feature: Feature,
    /// Position in its feature sequence (wall layer index for walls).
    pub layer: usize,
    pub points: Vec<PathPoint>,
}

impl ToolPath {
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1].p - w[0].p).norm()).sum()
    }

    /// Sum over segments of mean h times w times length.
    pub fn volume(&self, width: f64) -> f64 {
        self.points.windows(2).map(|w| 0.5 * (w[0].h + w[1].h) * width * (w[1].p - w[0].p).norm()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrintConfig {
    /// Layer width (mm).
    pub width: f64,
    /// Target layer height (mm).
    pub h_target: f64,
    /// Wall speed (mm/s).
    pub speed_wall: f64,
    /// Support speed (mm/s).
    pub speed_support: f64,
    /// Scaffold hatch spacing (mm).
    pub hatch: f64,
    pub platform_layers: usize,
    /// Height of the platform's bottom above the bed (mm).
    pub lift: f64,
}

impl Default for PrintConfig {
    fn default() -> Self {
        PrintConfig {
            width: 2.5,
            h_target: 1.5,
            speed_wall: 15.0,
            speed_support: 23.0,
            hatch: 10.0,
            platform_layers: 3,
            lift: 0.0,
        }
    }
}

impl PrintConfig {
    pub fn validate(&self, nozzle: f64) -> Result<()> {
        if !(self.h_target > 0.0 && self.h_target <= nozzle) {
            return Err(Error::InvalidConfig(format!("h_target must be in (0, {nozzle}], got {}", self.h_target)));
        }
        if !(self.speed_wall > 0.0 && self.speed_support > 0.0) {
            return Err(Error::InvalidConfig("speeds must be positive".into()));
        }
        if !(self.width > 0.0 && self.hatch > 0.0 && self.lift >= 0.0) {
            return Err(Error::InvalidConfig("width and hatch must be positive, lift non-negative".into()));
        }
        Ok(())
    }

    pub fn speed(&self, f: Feature) -> f64 {
        if f.is_support() {
            self.speed_support
        } else {
            self.speed_wall
        }
    }
}

/// flow = h * w * speed for every point.
pub fn flow_profile(paths: &mut [ToolPath], cfg: &PrintConfig) {
    for path in paths {
        let speed = cfg.speed(path.feature);
        for p in &mut path.points {
            let h = if p.h > 0.0 { p.h } else { cfg.h_target };
            p.flow = h * cfg.width * speed;
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PieceStats {
    pub wall_length: f64,
    pub support_length: f64,
    pub wall_volume: f64,
    pub support_volume: f64,
    /// Extrusion time (s).
    pub time: f64,
}

#[derive(Debug, Clone)]
pub struct ToolpathPiece {
    pub id: usize,
    pub side: Family,
    pub transform: Orientation,
    /// Support first, then walls with their rib passes, in print order.
    pub paths: Vec<ToolPath>,
    /// Largest transversal turning inside the piece (rad).
    pub max_angle: f64,
    pub warnings: Vec<String>,
}

impl ToolpathPiece {
    pub fn walls(&self) -> impl Iterator<Item = &ToolPath> {
        self.paths.iter().filter(|p| p.feature == Feature::Wall)
    }

    pub fn stats(&self, cfg: &PrintConfig) -> PieceStats {
        path_stats(&self.paths, cfg)
    }
}

/// Lengths, volumes and extrusion time of a set of paths.
pub fn path_stats(paths: &[ToolPath], cfg: &PrintConfig) -> PieceStats {
    let mut s = PieceStats::default();
    for p in paths {
        let (len, vol) = (p.length(), p.volume(cfg.width));
        if p.feature.is_support() {
            s.support_length += len;
            s.support_volume += vol;
        } else {
            s.wall_length += len;
            s.wall_volume += vol;
        }
    }
    s.time = s.wall_length / cfg.speed_wall + s.support_length / cfg.speed_support;
    s
}

/// Drops `excluded` quads from a strip, keeping it contiguous.
fn trim(strip: &Strip, excluded: &BTreeSet<usize>) -> Option<Strip> {
    let keep: Vec<usize> = (0..strip.len()).filter(|&i| !excluded.contains(&strip.quads[i])).collect();
    if keep.is_empty() {
        return None;
    }
    Some(Strip {
        family: strip.family,
        quads: keep.iter().map(|&i| strip.quads[i]).collect(),
        entry: keep.iter().map(|&i| strip.entry[i]).collect(),
        closed: strip.closed && keep.len() == strip.len(),
    })
}

/// Rib rungs of a wall: edge -> (rib, index of the edge along the rib).
fn rib_edges(mesh: &SdqMesh, ribs: &[Rib]) -> BTreeMap<usize, (usize, usize)> {
    let mut out = BTreeMap::new();
    for (r, rib) in ribs.iter().enumerate() {
        for (i, w) in rib.vertices.windows(2).enumerate() {
            if let Some(e) = mesh.edge_id(w[0], w[1]) {
                out.entry(e).or_insert((r, i));
            }
        }
    }
    out
}

/// True if the point at fraction `f` from `from` to `to` along rib edge `i`
/// lies on a printed segment.
fn on_segment(rib: &Rib, i: usize, from: usize, f: f64) -> bool {
    let s = rib.arc_lengths();
    let len = *s.last().unwrap();
    let seg = s[i + 1] - s[i];
    let t = if rib.vertices[i] == from { f } else { 1.0 - f };
    let x = s[i] + t * seg;
    rib.segments.iter().any(|&(a, b)| {
        (x >= a - 1e-9 && x <= b + 1e-9) || (rib.closed && x + len >= a - 1e-9 && x + len <= b + 1e-9)
    })
}

/// Everything needed to slice one piece.
pub struct PieceInput<'a> {
    pub mesh: &'a SdqMesh,
    pub patch: &'a Patch,
    pub surface: &'a OffsetSurface,
    pub ribs: &'a [Rib],
    pub rib_depth: f64,
    /// Quads left unprinted on this side.
    pub excluded: BTreeSet<usize>,
    pub max_angle: f64,
}

impl<'a> PieceInput<'a> {
    pub fn from_shell(mesh: &'a SdqMesh, patch: &'a Patch, shell: &'a Shell, max_angle: f64) -> Self {
        let (surface, ribs, excluded) = match patch.network {
            Family::U => (&shell.u_surface, &shell.u_ribs[..], BTreeSet::new()),
            Family::V => (&shell.v_surface, &shell.v_ribs[..], shell.gaps.gap_quads()),
        };
        PieceInput { mesh, patch, surface, ribs, rib_depth: shell.config.rib_depth(), excluded, max_angle }
    }
}

/// Wall and rib paths in the model frame, in print order.
pub fn piece_paths(input: &PieceInput, cfg: &PrintConfig) -> Result<Vec<ToolPath>> {
    let mesh = input.mesh;
    let order = input.patch.order.as_ref().ok_or(Error::NoAdmissibleCut(input.patch.id))?;
    let ribs = rib_edges(mesh, input.ribs);
    let side = input.patch.network;
    let mut out: Vec<ToolPath> = Vec::new();
    let mut first_strip = true;
    for o in order {
        let Some(strip) = trim(&o.strip, &input.excluded) else { continue };
        let paths = subdivide_strip(mesh, &strip, &input.surface.vertices, o.bottom, cfg.h_target)?;
        let rungs = strip.rungs(mesh);
        let n = paths.len() - 1;
        for (j, mut wall) in paths.into_iter().enumerate() {
            if !first_strip && j == 0 {
                continue;
            }
            let f = j as f64 / n as f64;
            let mut passes = Vec::new();
            for (i, r) in rungs.iter().enumerate() {
                let Some(&(ri, ei)) = ribs.get(&r.edge) else { continue };
                let from = match o.bottom {
                    crate::strips::RailSide::Left => r.from,
                    crate::strips::RailSide::Right => r.to,
                };
                let to = mesh.other_vertex(r.edge, from);
                if side == Family::V && !on_segment(&input.ribs[ri], ei, from, f) {
                    continue;
                }
                let normal = (input.surface.normals[from] * (1.0 - f) + input.surface.normals[to] * f).normalize();
                let inward = normal * (-side_sign(side) * input.rib_depth);
                let wp = wall.points[i];
                passes.push(ToolPath {
                    feature: Feature::Rib,
                    layer: out.len(),
                    points: vec![wp, PathPoint { p: wp.p + inward, ..wp }],
                });
            }
            if let Some(end) = out.last().and_then(|q| q.points.last()) {
                let (a, b) = (wall.points[0].p, wall.points.last().unwrap().p);
                if (b - end.p).norm() < (a - end.p).norm() {
                    wall.points.reverse();
                }
            }
            wall.layer = out.iter().filter(|p| p.feature == Feature::Wall).count();
            out.push(wall);
            out.extend(passes);
        }
        first_strip = false;
    }
    if out.is_empty() {
        return Err(Error::GapConsumedPatch(input.patch.id));
    }
    Ok(out)
}

/// Slices, orients and supports one piece.
pub fn build_piece(input: &PieceInput, cfg: &PrintConfig) -> Result<ToolpathPiece> {
    let model = piece_paths(input, cfg)?;
    let walls: Vec<&ToolPath> = model.iter().filter(|p| p.feature == Feature::Wall).collect();
    let all_t: Vec<Vec3> = walls.iter().flat_map(|p| p.points.iter().map(|x| x.t)).collect();
    let first_t: Vec<Vec3> = walls[0].points.iter().map(|x| x.t).collect();
    let (r0, warnings) = compute_orientation(&all_t, &first_t)?;
    let turned: Vec<Vec3> = walls.iter().flat_map(|p| p.points.iter().map(|x| r0 * x.p)).collect();
    let rotation = yaw_alignment(&turned) * r0;
    let mut tf = Orientation { rotation, translation: Vec3::zeros() };
    let moved: Vec<Vec3> = walls.iter().flat_map(|p| p.points.iter().map(|x| tf.apply(&x.p))).collect();
    let z_first = walls[0].points.iter().map(|x| tf.apply(&x.p).z).fold(f64::INFINITY, f64::min);
    let min_x = moved.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let min_y = moved.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let z_target = cfg.platform_layers as f64 * cfg.h_target + cfg.lift;
    tf.translation = Vec3::new(-min_x, -min_y, z_target - z_first);

    let mut oriented: Vec<ToolPath> = model
        .into_iter()
        .map(|mut p| {
            for x in &mut p.points {
                x.p = tf.apply(&x.p);
                x.t = tf.apply_dir(&x.t);
            }
            p
        })
        .collect();
    let first_wall = oriented.iter().position(|p| p.feature == Feature::Wall).unwrap();
    let later: Vec<ToolPath> = oriented.iter().skip(first_wall + 1).filter(|p| p.feature == Feature::Wall).cloned().collect();
    let mut paths = generate_support(&oriented[first_wall], &later, cfg)?;
    paths.append(&mut oriented);
    flow_profile(&mut paths, cfg);
    Ok(ToolpathPiece { id: input.patch.id, side: input.patch.network, transform: tf, paths, max_angle: input.max_angle, warnings })
}

#[derive(Serialize, Deserialize)]
struct PointRecord {
    p: [f64; 3],
    t: [f64; 3],
    h: f64,
    flow: f64,
}

#[derive(Serialize, Deserialize)]
struct PathRecord {
    feature: Feature,
    points: Vec<PointRecord>,
}

#[derive(Serialize, Deserialize)]
struct PieceRecord {
    piece: usize,
    side: Family,
    transform: Vec<f64>,
    paths: Vec<PathRecord>,
}

pub fn piece_to_json(piece: &ToolpathPiece) -> String {
    let rec = PieceRecord {
        piece: piece.id,
        side: piece.side,
        transform: piece.transform.matrix().to_vec(),
        paths: piece
            .paths
            .iter()
            .map(|p| PathRecord {
                feature: p.feature,
                points: p.points.iter().map(|x| PointRecord { p: arr(&x.p), t: arr(&x.t), h: x.h, flow: x.flow }).collect(),
            })
            .collect(),
    };
    serde_json::to_string(&rec).expect("toolpath records serialize")
}

/// Reads back a toolpath file; the transform is returned row-major.
pub fn piece_from_json(text: &str) -> Result<(usize, Family, [f64; 16], Vec<ToolPath>)> {
    let rec: PieceRecord = serde_json::from_str(text)?;
    let tf: [f64; 16] =
        rec.transform.try_into().map_err(|_| Error::Parse("transform must have 16 numbers".into()))?;
    let paths = rec
        .paths
        .into_iter()
        .enumerate()
        .map(|(i, p)| ToolPath {
            feature: p.feature,
            layer: i,
            points: p
                .points
                .into_iter()
                .map(|x| PathPoint { p: Vec3::from(x.p), t: Vec3::from(x.t), h: x.h, flow: x.flow })
                .collect(),
        })
        .collect();
    Ok((rec.piece, rec.side, tf, paths))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{network_patches, CutRegistry};
    use crate::shell::{build_shell, ShellConfig};
    use crate::testmesh;

    #[test]
    fn flow_of_the_default_wall() {
        let mut p = vec![ToolPath {
            feature: Feature::Wall,
            layer: 1,
            points: vec![PathPoint { p: Vec3::zeros(), t: Vec3::z(), h: 1.5, flow: 0.0 }],
        }];
        flow_profile(&mut p, &PrintConfig::default());
        assert!((p[0].points[0].flow - 56.25).abs() < 1e-12);
        p[0].points[0].h = 0.0;
        flow_profile(&mut p, &PrintConfig::default());
        assert!(p[0].points[0].flow > 0.0);
    }

    #[test]
    fn grid_piece_round_trips() {
        let m = testmesh::grid(4, 4, 10.0).unwrap();
        let reg = CutRegistry::new();
        let u = network_patches(&m, &reg, Family::U);
        let v = network_patches(&m, &reg, Family::V);
        let shell = build_shell(&m, &v, &ShellConfig::default()).unwrap();
        let cfg = PrintConfig::default();
        let piece = build_piece(&PieceInput::from_shell(&m, &u[0], &shell, 0.0), &cfg).unwrap();
        // 4 strips of 10 mm rungs: N = 7 each, shared rails once
        assert_eq!(piece.walls().count(), 4 * 8 - 3);
        let text = piece_to_json(&piece);
        let (id, side, tf, paths) = piece_from_json(&text).unwrap();
        assert_eq!((id, side), (0, Family::U));
        assert_eq!(tf, piece.transform.matrix());
        assert_eq!(paths.len(), piece.paths.len());
        assert!(piece.paths.iter().any(|p| p.feature == Feature::Rib));
    }
}
