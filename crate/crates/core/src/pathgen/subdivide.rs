use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::SdqMesh;
use crate::strips::{RailSide, Strip};

use super::{Feature, PathPoint, ToolPath};

/// Layers needed so that no rung step exceeds `h_target`.
pub fn layer_count(max_rung: f64, h_target: f64) -> usize {
    ((max_rung / h_target) - 1e-9).ceil().max(1.0) as usize
}

/// Iso-paths across a strip, from its `bottom` rail (path 0) to the other.
/// Point i of path j sits at j/N along rung i; `positions` gives the wall's
/// vertex positions.
pub fn subdivide_strip(
    mesh: &SdqMesh,
    strip: &Strip,
    positions: &[Vec3],
    bottom: RailSide,
    h_target: f64,
) -> Result<Vec<ToolPath>> {
    let ends: Vec<(Vec3, Vec3)> = strip
        .rungs(mesh)
        .into_iter()
        .map(|r| {
            let (a, b) = match bottom {
                RailSide::Left => (r.from, r.to),
                RailSide::Right => (r.to, r.from),
            };
            (positions[a], positions[b])
        })
        .collect();
    for (i, (a, b)) in ends.iter().enumerate() {
        if (b - a).norm() == 0.0 {
            return Err(Error::DegenerateRung(strip.rungs(mesh)[i].edge));
        }
    }
    let l_max = ends.iter().map(|(a, b)| (b - a).norm()).fold(0.0, f64::max);
    let n = layer_count(l_max, h_target);
    Ok((0..=n)
        .map(|j| {
            let f = j as f64 / n as f64;
            let points = ends
                .iter()
                .map(|(a, b)| {
                    let d = b - a;
                    PathPoint {
                        p: a + d * f,
                        t: d.normalize(),
                        h: if j == 0 { h_target } else { d.norm() / n as f64 },
                        flow: 0.0,
                    }
                })
                .collect();
            ToolPath { feature: Feature::Wall, layer: j, points }
        })
        .collect())
}

/// Wall paths of a stack of strips. Each strip after the first drops its
/// path 0, which is the previous strip's last path. Paths are reversed where
/// needed so each starts at the end nearer to where the previous one ended.
pub fn stack_paths(strips: Vec<Vec<ToolPath>>) -> Vec<ToolPath> {
    let mut out: Vec<ToolPath> = Vec::new();
    for (s, paths) in strips.into_iter().enumerate() {
        for (j, mut p) in paths.into_iter().enumerate() {
            if s > 0 && j == 0 {
                continue;
            }
            if let Some(end) = out.last().and_then(|q| q.points.last()) {
                let (first, last) = (p.points[0].p, p.points.last().unwrap().p);
                if (last - end.p).norm() < (first - end.p).norm() {
                    p.points.reverse();
                }
            }
            p.layer = out.len();
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Family;
    use crate::strips::trace_strips;
    use crate::testmesh;

    fn positions(m: &SdqMesh) -> Vec<Vec3> {
        m.vertices().to_vec()
    }

    #[test]
    fn uniform_strip() {
        // one U strip of 5 quads, rungs 6 mm long
        let m = crate::testmesh::grid(1, 5, 6.0).unwrap();
        let s = &trace_strips(&m, Family::U).strips[0];
        let paths = subdivide_strip(&m, s, &positions(&m), RailSide::Left, 1.5).unwrap();
        assert_eq!(paths.len(), 5);
        for p in &paths {
            assert!(p.points.iter().all(|x| x.h == 1.5));
        }
        let t = paths[2].points[0].t;
        assert!(paths.iter().flat_map(|p| &p.points).all(|x| (x.t - t).norm() < 1e-12));
        // T is perpendicular to the path direction on a flat strip
        let along = paths[2].points[1].p - paths[2].points[0].p;
        assert!(t.dot(&along).abs() < 1e-12);
    }

    #[test]
    fn stacked_strips_share_rails() {
        let m = testmesh::grid(3, 4, 6.0).unwrap();
        let net = trace_strips(&m, Family::U);
        let pos = positions(&m);
        let per: Vec<Vec<ToolPath>> = net
            .strips
            .iter()
            .map(|s| subdivide_strip(&m, s, &pos, RailSide::Left, 1.5).unwrap())
            .collect();
        let all = stack_paths(per);
        assert_eq!(all.len(), 13);
    }
}
