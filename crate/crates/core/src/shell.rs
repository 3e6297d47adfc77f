//! Double-shell geometry: offset walls, tolerance gaps and ribs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{Family, SdqMesh};
use crate::partition::Patch;
use crate::strips::{trace_strips, RailSide};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShellConfig {
    /// Nozzle diameter (mm).
    pub nozzle: f64,
    /// Total shell thickness (mm).
    pub thickness: f64,
    /// Ribs every this many rail lines.
    pub rib_spacing: usize,
    /// Extra clearance around rib crossings (mm).
    pub rib_gap: f64,
}

impl Default for ShellConfig {
    fn default() -> Self {
        ShellConfig { nozzle: 2.5, thickness: 10.0, rib_spacing: 4, rib_gap: 0.5 }
    }
}

impl ShellConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nozzle > 0.0) {
            return Err(Error::InvalidConfig("nozzle must be positive".into()));
        }
        if !(self.thickness > 2.0 * self.nozzle) {
            return Err(Error::InvalidConfig(format!(
                "thickness {} must exceed twice the nozzle {}",
                self.thickness, self.nozzle
            )));
        }
        if self.rib_spacing < 2 {
            return Err(Error::InvalidConfig("rib spacing must be at least 2".into()));
        }
        if !(self.rib_gap >= 0.0) {
            return Err(Error::InvalidConfig("rib gap must be non-negative".into()));
        }
        Ok(())
    }

    /// Distance from the base surface to each wall's centerline.
    pub fn offset_distance(&self) -> f64 {
        self.thickness / 2.0 - 0.5 * self.nozzle
    }

    /// Rib height measured from the wall toward the mid-surface.
    pub fn rib_depth(&self) -> f64 {
        self.thickness / 2.0 - self.nozzle
    }

    /// Length removed from an interrupted rib around each crossing.
    pub fn interruption(&self) -> f64 {
        self.nozzle + 2.0 * self.rib_gap
    }
}

/// Signed side: U walls sit along +normal, V walls along -normal.
pub fn side_sign(side: Family) -> f64 {
    match side {
        Family::U => 1.0,
        Family::V => -1.0,
    }
}

#[derive(Debug, Clone)]
pub struct OffsetSurface {
    pub side: Family,
    pub vertices: Vec<Vec3>,
    pub normals: Vec<Vec3>,
}

/// Unit average of the incident quad normals at every vertex.
pub fn vertex_normals(mesh: &SdqMesh) -> Result<Vec<Vec3>> {
    let qn: Vec<Vec3> = (0..mesh.num_quads()).map(|q| mesh.quad_normal(q)).collect::<Result<_>>()?;
    (0..mesh.num_vertices())
        .map(|v| {
            let sum = mesh.vertex_quads(v).iter().fold(Vec3::zeros(), |a, &q| a + qn[q]);
            let len = sum.norm();
            if len < 1e-12 {
                Err(Error::ZeroNormal(v))
            } else {
                Ok(sum / len)
            }
        })
        .collect()
}

pub fn offset_shell(mesh: &SdqMesh, cfg: &ShellConfig) -> Result<(OffsetSurface, OffsetSurface)> {
    cfg.validate()?;
    let normals = vertex_normals(mesh)?;
    let d = cfg.offset_distance();
    let make = |side: Family| OffsetSurface {
        side,
        vertices: mesh.vertices().iter().zip(&normals).map(|(p, n)| p + n * (side_sign(side) * d)).collect(),
        normals: normals.clone(),
    };
    Ok((make(Family::U), make(Family::V)))
}

/// Quads whose offset normal points against the base normal.
pub fn offset_flips(mesh: &SdqMesh, surface: &OffsetSurface) -> Vec<usize> {
    (0..mesh.num_quads())
        .filter(|&q| {
            let [a, b, c, d] = mesh.quad(q).map(|v| surface.vertices[v]);
            let n = (c - a).cross(&(d - b));
            mesh.quad_normal(q).map(|base| n.dot(&base) <= 0.0).unwrap_or(true)
        })
        .collect()
}

/// Band of quads removed from `patch` along its seam with `neighbor`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapStrip {
    pub patch: usize,
    pub neighbor: usize,
    pub quads: Vec<usize>,
}

/// Remaining quads of each V patch after gapping, by patch id.
#[derive(Debug, Clone)]
pub struct GappedPatches {
    pub remaining: Vec<Vec<usize>>,
    pub gaps: Vec<GapStrip>,
}

impl GappedPatches {
    pub fn gap_quads(&self) -> BTreeSet<usize> {
        self.gaps.iter().flat_map(|g| g.quads.iter().copied()).collect()
    }
}

/// For every pair of V patches sharing seam edges, removes from the lower-id
/// patch the quads along that seam, widened so every strip stays one
/// contiguous run. The higher-id patch gives up the band instead when the
/// lower one would vanish.
pub fn apply_tolerance_gaps(mesh: &SdqMesh, v_patches: &[Patch]) -> Result<GappedPatches> {
    let mut owner = vec![usize::MAX; mesh.num_quads()];
    for p in v_patches {
        for &q in &p.quads {
            owner[q] = p.id;
        }
    }
    // seam edges keyed by (lower, higher) patch id
    let mut seams: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for e in 0..mesh.num_edges() {
        let eq = mesh.edge_quads(e);
        if eq.len() != 2 {
            continue;
        }
        let (a, b) = (owner[eq[0].0], owner[eq[1].0]);
        if a == b || a == usize::MAX || b == usize::MAX {
            continue;
        }
        seams.entry((a.min(b), a.max(b))).or_default().push(e);
    }
    let mut remaining: Vec<BTreeSet<usize>> = v_patches.iter().map(|p| p.quads.iter().copied().collect()).collect();
    let mut gaps = Vec::new();
    for ((a, b), edges) in seams {
        let mut chosen = None;
        for (side, other) in [(a, b), (b, a)] {
            let mut left = remaining[side].clone();
            let removed = cut_band(mesh, &v_patches[side], &owner, &edges, &mut left);
            if !left.is_empty() {
                chosen = Some((side, other, left, removed));
                break;
            }
        }
        let Some((side, other, left, removed)) = chosen else {
            return Err(Error::GapConsumedPatch(a));
        };
        remaining[side] = left;
        if !removed.is_empty() {
            gaps.push(GapStrip { patch: side, neighbor: other, quads: removed.into_iter().collect() });
        }
    }
    Ok(GappedPatches { remaining: remaining.into_iter().map(|s| s.into_iter().collect()).collect(), gaps })
}

/// Removes from `remaining` the quads of `patch` along the seam edges. Along
/// a rail the whole strip goes, so the strips left keep their extents.
fn cut_band(
    mesh: &SdqMesh,
    patch: &Patch,
    owner: &[usize],
    edges: &[usize],
    remaining: &mut BTreeSet<usize>,
) -> BTreeSet<usize> {
    let mut removed = BTreeSet::new();
    for &e in edges {
        let Some(q) = mesh.edge_quads(e).iter().map(|s| s.0).find(|&q| owner[q] == patch.id) else {
            continue;
        };
        if mesh.label(e) == patch.network {
            if let Some(s) = patch.strips.iter().find(|s| s.quads.contains(&q)) {
                removed.extend(s.quads.iter().filter(|q| remaining.contains(q)));
            }
        } else if remaining.contains(&q) {
            removed.insert(q);
        }
    }
    for q in &removed {
        remaining.remove(q);
    }
    removed.extend(keep_strips_contiguous(patch, remaining));
    removed.extend(keep_stack_connected(mesh, patch, remaining));
    removed
}

/// Keeps the largest block of consecutive strips (in print order) that
/// still touch one another; returns the dropped quads.
fn keep_stack_connected(mesh: &SdqMesh, patch: &Patch, remaining: &mut BTreeSet<usize>) -> Vec<usize> {
    let Some(order) = &patch.order else { return Vec::new() };
    let left: Vec<Vec<usize>> = order
        .iter()
        .map(|o| o.strip.quads.iter().copied().filter(|q| remaining.contains(q)).collect::<Vec<_>>())
        .filter(|q| !q.is_empty())
        .collect();
    let touch = |a: &[usize], b: &[usize]| {
        let ea: BTreeSet<usize> = a.iter().flat_map(|&q| mesh.quad_edges(q)).collect();
        b.iter().flat_map(|&q| mesh.quad_edges(q)).any(|e| ea.contains(&e))
    };
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, s) in left.iter().enumerate() {
        if i == 0 || !touch(&left[i - 1], s) {
            blocks.push(Vec::new());
        }
        blocks.last_mut().unwrap().extend(s);
    }
    if blocks.len() <= 1 {
        return Vec::new();
    }
    let keep = (0..blocks.len()).max_by_key(|&i| (blocks[i].len(), std::cmp::Reverse(i))).unwrap();
    let mut dropped = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        if i != keep {
            for q in b {
                remaining.remove(q);
                dropped.push(*q);
            }
        }
    }
    dropped
}

/// Drops all but the longest remaining run of every strip; returns the
/// dropped quads.
fn keep_strips_contiguous(patch: &Patch, remaining: &mut BTreeSet<usize>) -> Vec<usize> {
    let mut dropped = Vec::new();
    for s in &patch.strips {
        let mut runs: Vec<Vec<usize>> = vec![Vec::new()];
        for &q in &s.quads {
            if remaining.contains(&q) {
                runs.last_mut().unwrap().push(q);
            } else if !runs.last().unwrap().is_empty() {
                runs.push(Vec::new());
            }
        }
        runs.retain(|r| !r.is_empty());
        if runs.len() <= 1 {
            continue;
        }
        let keep = (0..runs.len()).max_by_key(|&i| (runs[i].len(), std::cmp::Reverse(i))).unwrap();
        for (i, r) in runs.iter().enumerate() {
            if i != keep {
                for q in r {
                    remaining.remove(q);
                    dropped.push(*q);
                }
            }
        }
    }
    dropped
}

/// Rib along one rail line, lifted onto its side's wall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rib {
    pub side: Family,
    /// Base-mesh vertices of the rail line, in order.
    pub vertices: Vec<usize>,
    pub closed: bool,
    /// Polyline on the side's offset surface.
    pub points: Vec<[f64; 3]>,
    pub depth: f64,
    /// Arc-length intervals that are printed. For closed ribs an interval
    /// may end past the total length, wrapping to the start.
    pub segments: Vec<(f64, f64)>,
    /// Arc-length positions of crossings with opposite-side ribs.
    pub crossings: Vec<f64>,
}

impl Rib {
    pub fn arc_lengths(&self) -> Vec<f64> {
        let mut s = vec![0.0];
        for w in self.points.windows(2) {
            let d = Vec3::from(w[1]) - Vec3::from(w[0]);
            s.push(s.last().unwrap() + d.norm());
        }
        s
    }

    pub fn length(&self) -> f64 {
        *self.arc_lengths().last().unwrap()
    }
}

/// Distinct rail lines of `family` as vertex sequences: the left then right
/// rail of each strip in strip order.
pub fn rail_lines(mesh: &SdqMesh, family: Family) -> Vec<(Vec<usize>, bool)> {
    let net = trace_strips(mesh, family);
    let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for s in &net.strips {
        for side in [RailSide::Left, RailSide::Right] {
            let key: BTreeSet<usize> = s.rail_edges(mesh, side).into_iter().collect();
            if seen.insert(key) {
                let mut vs = s.rail_vertices(mesh, side);
                if s.closed {
                    vs.push(vs[0]);
                }
                out.push((vs, s.closed));
            }
        }
    }
    out
}

/// Ribs of one wall, along every `rib_spacing`-th rail line of the other
/// family, starting at line 0.
pub fn generate_ribs(mesh: &SdqMesh, side: Family, surface: &OffsetSurface, cfg: &ShellConfig) -> Vec<Rib> {
    rail_lines(mesh, side.other())
        .into_iter()
        .step_by(cfg.rib_spacing)
        .map(|(vertices, closed)| {
            let points: Vec<[f64; 3]> = vertices.iter().map(|&v| crate::geom::arr(&surface.vertices[v])).collect();
            let mut rib = Rib { side, vertices, closed, points, depth: cfg.rib_depth(), segments: Vec::new(), crossings: Vec::new() };
            rib.segments = vec![(0.0, rib.length())];
            rib
        })
        .collect()
}

/// Base vertices shared by two ribs.
fn shared_vertices(a: &Rib, b: &Rib) -> Vec<usize> {
    let bs: BTreeSet<usize> = b.vertices.iter().copied().collect();
    let mut out: Vec<usize> = a.vertices.iter().copied().filter(|v| bs.contains(v)).collect();
    out.dedup();
    if a.closed && out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// Arc-length position of the first occurrence of `v` on a rib.
fn position_on(rib: &Rib, v: usize) -> f64 {
    let s = rib.arc_lengths();
    s[rib.vertices.iter().position(|&x| x == v).unwrap()]
}

/// Interrupts every V-side rib around its crossings with U-side ribs.
/// Returns warnings for merged interruptions.
pub fn interlock_ribs(u_ribs: &mut [Rib], v_ribs: &mut [Rib], cfg: &ShellConfig) -> Vec<String> {
    let mut warnings = Vec::new();
    let half = cfg.interruption() / 2.0;
    for u in u_ribs.iter_mut() {
        u.crossings.clear();
    }
    for (vi, v) in v_ribs.iter_mut().enumerate() {
        let mut cross = Vec::new();
        for u in u_ribs.iter_mut() {
            for x in shared_vertices(v, u) {
                cross.push(position_on(v, x));
                u.crossings.push(position_on(u, x));
            }
        }
        cross.sort_by(f64::total_cmp);
        cross.dedup();
        let len = v.length();
        let mut cuts: Vec<(f64, f64)> = Vec::new();
        for &c in &cross {
            let (lo, hi) = (c - half, c + half);
            if v.closed {
                cuts.push((lo.rem_euclid(len), lo.rem_euclid(len) + (hi - lo)));
            } else {
                cuts.push((lo.max(0.0), hi.min(len)));
            }
        }
        cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for c in cuts {
            match merged.last_mut() {
                Some(m) if c.0 <= m.1 => {
                    warnings.push(format!("V rib {vi}: interruptions overlap near s = {:.3}", c.0));
                    m.1 = m.1.max(c.1);
                }
                _ => merged.push(c),
            }
        }
        v.segments = subtract(len, v.closed, &merged);
        v.crossings = cross;
    }
    for u in u_ribs.iter_mut() {
        u.crossings.sort_by(f64::total_cmp);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    warnings
}

fn subtract(len: f64, closed: bool, cuts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if cuts.is_empty() {
        return vec![(0.0, len)];
    }
    if closed {
        // walk from the end of each cut to the start of the next, wrapping
        let mut out = Vec::new();
        for (i, c) in cuts.iter().enumerate() {
            let next = if i + 1 < cuts.len() { cuts[i + 1].0 } else { cuts[0].0 + len };
            if next > c.1 {
                out.push((c.1, next));
            }
        }
        return out;
    }
    let mut out = Vec::new();
    let mut start = 0.0;
    for c in cuts {
        if c.0 > start {
            out.push((start, c.0));
        }
        start = c.1;
    }
    if len > start {
        out.push((start, len));
    }
    out
}

/// Fastening points at every rib crossing, on the base surface.
pub fn screw_points(mesh: &SdqMesh, u_ribs: &[Rib], v_ribs: &[Rib]) -> (Vec<[f64; 3]>, Vec<String>) {
    if u_ribs.is_empty() || v_ribs.is_empty() {
        let w = "pieces rely on seam contact only".to_string();
        log::warn!("{w}");
        return (Vec::new(), vec![w]);
    }
    let mut pts = Vec::new();
    for u in u_ribs {
        for v in v_ribs {
            for x in shared_vertices(u, v) {
                pts.push(crate::geom::arr(&mesh.position(x)));
            }
        }
    }
    (pts, Vec::new())
}

/// Everything the slicer needs from the shell stage.
#[derive(Debug, Clone)]
pub struct Shell {
    pub config: ShellConfig,
    pub u_surface: OffsetSurface,
    pub v_surface: OffsetSurface,
    pub gaps: GappedPatches,
    pub u_ribs: Vec<Rib>,
    pub v_ribs: Vec<Rib>,
    pub screws: Vec<[f64; 3]>,
    pub warnings: Vec<String>,
}

pub fn build_shell(mesh: &SdqMesh, v_patches: &[Patch], cfg: &ShellConfig) -> Result<Shell> {
    let (u_surface, v_surface) = offset_shell(mesh, cfg)?;
    let mut warnings = Vec::new();
    for s in [&u_surface, &v_surface] {
        let flips = offset_flips(mesh, s);
        if !flips.is_empty() {
            warnings.push(format!("{} offset self-intersects at {} quads (first {})", s.side, flips.len(), flips[0]));
        }
    }
    let gaps = apply_tolerance_gaps(mesh, v_patches)?;
    let mut u_ribs = generate_ribs(mesh, Family::U, &u_surface, cfg);
    let mut v_ribs = generate_ribs(mesh, Family::V, &v_surface, cfg);
    warnings.extend(interlock_ribs(&mut u_ribs, &mut v_ribs, cfg));
    let (screws, w) = screw_points(mesh, &u_ribs, &v_ribs);
    warnings.extend(w);
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(Shell { config: *cfg, u_surface, v_surface, gaps, u_ribs, v_ribs, screws, warnings })
}
