//! Size and angle cuts.

use std::collections::BTreeSet;

use super::patch::Patch;
use super::pca::pca_extents;
use super::region::{components_with, straight_line, Region};
use super::registry::{Cut, CutOrigin, CutRegistry};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{Family, SdqMesh};
use crate::strips::{total_turning, RailSide, Strip};

/// Angle slack used for every comparison against gamma.
pub const ANGLE_EPS: f64 = 1e-9;

/// Total turning of the print direction along a strip crossed by the other
/// family's layers.
pub fn angle_variation(mesh: &SdqMesh, strip: &Strip) -> Result<f64> {
    total_turning(&strip.crossing_directions(mesh))
}

/// Number of angle cuts for a given variation.
pub fn angle_cut_count(a_max: f64, gamma: f64) -> usize {
    ((a_max - ANGLE_EPS) / gamma).ceil().max(0.0) as usize
}

/// `c` cut positions (rung indices) equidistant in quads along `n` quads.
/// The remainder goes to the last segment.
pub fn equidistant(n: usize, c: usize) -> Vec<usize> {
    let c = c.min(n.saturating_sub(1));
    if c == 0 {
        return Vec::new();
    }
    let seg = n / (c + 1);
    (1..=c).map(|i| i * seg).collect()
}

/// Interior rung offsets tried around a target: 0, +1, -1, +2, -2, ...
fn shifts(n: usize) -> impl Iterator<Item = isize> {
    std::iter::once(0).chain((1..n as isize).flat_map(|k| [k, -k]))
}

/// Cuts `patch` along the rungs of `strip` near each target position. A
/// cut is the rung extended straight to the patch boundary; it must avoid
/// the other network's edges and actually separate the patch.
fn place_cuts(
    mesh: &SdqMesh,
    registry: &mut CutRegistry,
    patch: &Patch,
    strip: &Strip,
    targets: &[usize],
    origin: CutOrigin,
) -> usize {
    let network = patch.network;
    let n = strip.len();
    let rungs = strip.rungs(mesh);
    let mut used = BTreeSet::new();
    let mut placed = 0;
    for &t in targets {
        for off in shifts(n) {
            let p = t as isize + off;
            if p < 1 || p >= n as isize || used.contains(&p) {
                continue;
            }
            let cuts = registry.edges(network).clone();
            let region = Region::new(mesh, &cuts, patch.quads.clone());
            let edge = rungs[p as usize].edge;
            if !region.glued(edge) {
                continue;
            }
            let bverts = region.boundary_vertices();
            let line = straight_line(mesh, edge, &|v| bverts.contains(&v));
            if registry.collides(network, &line) {
                continue;
            }
            let before = region.components().len();
            let extra: BTreeSet<usize> = line.iter().copied().collect();
            if components_with(&region, &extra).len() <= before {
                continue;
            }
            registry.add(Cut { network, edges: line, origin, truncation: None });
            used.insert(p);
            placed += 1;
            break;
        }
    }
    placed
}

fn largest_strip(mesh: &SdqMesh, strips: &[Strip]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in strips.iter().enumerate() {
        let a = s.area(mesh);
        if best.map_or(true, |(_, b)| a > b) {
            best = Some((i, a));
        }
    }
    best.map(|(i, _)| i)
}

/// Length-weighted mean |cos| between `d` and the strip's rail edges.
pub fn alignment(mesh: &SdqMesh, strip: &Strip, d: &Vec3) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for side in [RailSide::Left, RailSide::Right] {
        for e in strip.rail_edges(mesh, side) {
            let v = mesh.edge_vector(e);
            num += d.dot(&v).abs();
            den += v.norm();
        }
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

pub fn patch_points(mesh: &SdqMesh, quads: &[usize]) -> Vec<Vec3> {
    let vs: BTreeSet<usize> = quads.iter().flat_map(|&q| mesh.quad(q)).collect();
    vs.into_iter().map(|v| mesh.position(v)).collect()
}

/// Bounds sorted descending, matched against extents sorted descending.
pub fn sorted_bounds(bbox: [f64; 3]) -> [f64; 3] {
    let mut b = bbox;
    b.sort_by(|x, y| y.total_cmp(x));
    b
}

pub fn fits(mesh: &SdqMesh, quads: &[usize], bbox: [f64; 3]) -> bool {
    let ext = pca_extents(&patch_points(mesh, quads));
    let b = sorted_bounds(bbox);
    (0..3).all(|i| ext[i].1 <= b[i] + 1e-9)
}

/// Adds size cuts for the first principal direction whose extent exceeds its
/// bound. Returns the number of cuts placed.
pub fn size_partition(mesh: &SdqMesh, registry: &mut CutRegistry, patch: &Patch, bbox: [f64; 3]) -> Result<usize> {
    let ext = pca_extents(&patch_points(mesh, &patch.quads));
    let bounds = sorted_bounds(bbox);
    let Some(i) = (0..3).find(|&i| ext[i].1 > bounds[i] + 1e-9) else { return Ok(0) };
    let (dir, extent) = ext[i];
    let c = (extent / bounds[i]).ceil() as usize - 1;
    let cuts = registry.edges(patch.network).clone();
    let region = Region::new(mesh, &cuts, patch.quads.clone());
    let nets = [region.strips(Family::U), region.strips(Family::V)];
    let picks: Vec<Strip> =
        nets.iter().filter_map(|n| largest_strip(mesh, &n.strips).map(|k| n.strips[k].clone())).collect();
    let mut order: Vec<&Strip> = picks.iter().collect();
    if order.len() == 2 && alignment(mesh, order[1], &dir) > alignment(mesh, order[0], &dir) {
        order.swap(0, 1);
    }
    // then every other sub-strip, best aligned first
    let mut rest: Vec<(&Strip, f64)> = nets
        .iter()
        .flat_map(|n| n.strips.iter())
        .filter(|s| !picks.contains(s))
        .map(|s| (s, alignment(mesh, s, &dir)))
        .collect();
    rest.sort_by(|a, b| b.1.total_cmp(&a.1));
    order.extend(rest.into_iter().map(|(s, _)| s));
    for s in order {
        let placed = place_cuts(mesh, registry, patch, s, &equidistant(s.len(), c.max(1)), CutOrigin::Size);
        if placed > 0 {
            return Ok(placed);
        }
    }
    Err(Error::NoAdmissibleCut(patch.id))
}

/// Turning of every transversal strip of a patch, in strip id order.
pub fn transversal_angles(mesh: &SdqMesh, registry: &CutRegistry, patch: &Patch) -> Result<Vec<(Strip, f64)>> {
    let cuts = registry.edges(patch.network);
    let region = Region::new(mesh, cuts, patch.quads.clone());
    region
        .strips(patch.network.other())
        .strips
        .into_iter()
        .map(|s| {
            let a = angle_variation(mesh, &s)?;
            Ok((s, a))
        })
        .collect()
}

/// Cuts the transversal strip with the largest turning when it exceeds
/// gamma. Returns the number of cuts placed.
pub fn angle_partition(mesh: &SdqMesh, registry: &mut CutRegistry, patch: &Patch, gamma: f64) -> Result<usize> {
    let angles = transversal_angles(mesh, registry, patch)?;
    let mut best: Option<(usize, f64)> = None;
    for (i, (_, a)) in angles.iter().enumerate() {
        if best.map_or(true, |(_, b)| *a > b) {
            best = Some((i, *a));
        }
    }
    let Some((i, a_max)) = best else { return Ok(0) };
    if a_max <= gamma + ANGLE_EPS {
        return Ok(0);
    }
    let strip = &angles[i].0;
    if strip.len() < 2 {
        return Err(Error::IrreducibleAngle(patch.id));
    }
    let k = angle_cut_count(a_max, gamma);
    let placed = place_cuts(mesh, registry, patch, strip, &equidistant(strip.len(), k), CutOrigin::Angle);
    if placed == 0 {
        return Err(Error::NoAdmissibleCut(patch.id));
    }
    Ok(placed)
}
