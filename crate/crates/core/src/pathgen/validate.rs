use serde::Serialize;

use crate::geom::{point_polyline_distance, Vec3};
use crate::partition::{sorted_bounds, ANGLE_EPS};

use super::{Feature, ToolPath, ToolpathPiece};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Validation {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl Validation {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Layer heights outside [0.2 n, n].
pub fn height_warnings(paths: &[ToolPath], nozzle: f64) -> Vec<String> {
    let mut out = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        if p.feature != Feature::Wall {
            continue;
        }
        if let Some(x) = p.points.iter().find(|x| x.h < 0.2 * nozzle - 1e-9 || x.h > nozzle + 1e-9) {
            out.push(format!("path {i}: layer height {:.3} outside [{:.3}, {:.3}]", x.h, 0.2 * nozzle, nozzle));
        }
    }
    out
}

/// Index (among wall paths) of the first path with a point farther than
/// 1.5 h from the previous wall path.
pub fn first_unsupported(walls: &[&ToolPath]) -> Option<usize> {
    for j in 1..walls.len() {
        let prev: Vec<Vec3> = walls[j - 1].points.iter().map(|x| x.p).collect();
        if walls[j].points.iter().any(|x| point_polyline_distance(&x.p, &prev) > 1.5 * x.h + 1e-9) {
            return Some(j);
        }
    }
    None
}

/// Angle, reach and layering checks on an oriented piece.
pub fn validate_printability(piece: &ToolpathPiece, nozzle: f64, gamma: f64, bbox: [f64; 3]) -> Validation {
    let mut v = Validation::default();
    let tag = format!("{} piece {}", piece.side, piece.id);
    if piece.max_angle > gamma + ANGLE_EPS {
        v.violations.push(format!("{tag}: print angle variation {:.6} exceeds {gamma:.6}", piece.max_angle));
    }
    let pts = piece.paths.iter().flat_map(|p| p.points.iter().map(|x| x.p));
    if let Some((lo, hi)) = crate::geom::aabb(pts.collect::<Vec<_>>().iter()) {
        let ext = hi - lo;
        let mut xy = [ext.x, ext.y, 0.0];
        xy.sort_by(|a, b| b.total_cmp(a));
        let mut bxy = [bbox[0], bbox[1], 0.0];
        bxy = sorted_bounds(bxy);
        if xy[0] > bxy[0] + 1e-9 || xy[1] > bxy[1] + 1e-9 || ext.z > bbox[2] + 1e-9 {
            v.violations.push(format!(
                "{tag}: extent {:.1} x {:.1} x {:.1} exceeds the reachable box",
                ext.x, ext.y, ext.z
            ));
        }
    }
    let walls: Vec<&ToolPath> = piece.paths.iter().filter(|p| p.feature == Feature::Wall).collect();
    if let Some(j) = first_unsupported(&walls) {
        v.violations.push(format!("{tag}: wall path {j} does not rest on path {}", j - 1));
    }
    v.warnings = height_warnings(&piece.paths, nozzle);
    v
}
