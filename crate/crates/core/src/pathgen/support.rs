use crate::error::{Error, Result};
use crate::geom::Vec3;

use super::{Feature, PathPoint, PrintConfig, ToolPath};

/// Platform copies of the first wall path stacked downward, then the hatch
/// under them. Returned in print order: scaffold bottom-up, then platform
/// bottom-up.
pub fn generate_support(first: &ToolPath, rest: &[ToolPath], cfg: &PrintConfig) -> Result<Vec<ToolPath>> {
    let z_first = first.points.iter().map(|p| p.p.z).fold(f64::INFINITY, f64::min);
    for path in rest {
        if path.points.iter().any(|p| p.p.z < z_first - 1e-9) {
            return Err(Error::OrientationSupportInconsistency);
        }
    }
    let h = cfg.h_target;
    let up = Vec3::z();
    let mut platform: Vec<ToolPath> = (1..=cfg.platform_layers)
        .map(|k| ToolPath {
            feature: Feature::Platform,
            layer: k,
            points: first
                .points
                .iter()
                .map(|p| PathPoint { p: p.p - up * (k as f64 * h), t: up, h, flow: 0.0 })
                .collect(),
        })
        .collect();
    platform.reverse();
    let z_platform = z_first - cfg.platform_layers as f64 * h;
    let mut out = scaffold(first, z_platform, cfg);
    out.extend(platform);
    Ok(out)
}

/// Serpentine hatch over the oriented rectangle around the first path's
/// plan view, one layer every `h_target` while it stays a layer below the
/// platform.
fn scaffold(first: &ToolPath, z_top: f64, cfg: &PrintConfig) -> Vec<ToolPath> {
    let h = cfg.h_target;
    let levels = if z_top - h < -1e-9 { 0 } else { ((z_top - h) / h + 1e-9).floor() as usize + 1 };
    if levels == 0 || first.points.is_empty() {
        return Vec::new();
    }
    let (center, axis, length, width) = footprint(first, cfg.width);
    let normal = Vec3::new(-axis.y, axis.x, 0.0);
    let passes = ((width / cfg.hatch) - 1e-9).ceil().max(1.0) as usize;
    let offsets: Vec<f64> = if passes == 1 {
        vec![0.0]
    } else {
        (0..passes).map(|i| -width / 2.0 + width * i as f64 / (passes - 1) as f64).collect()
    };
    (0..levels)
        .map(|k| {
            let z = k as f64 * h;
            let mut points = Vec::new();
            for (i, off) in offsets.iter().enumerate() {
                let mid = center + normal * *off;
                let (a, b) = (mid - axis * (length / 2.0), mid + axis * (length / 2.0));
                let (a, b) = if i % 2 == 0 { (a, b) } else { (b, a) };
                for q in [a, b] {
                    points.push(PathPoint { p: Vec3::new(q.x, q.y, z), t: Vec3::z(), h, flow: 0.0 });
                }
            }
            ToolPath { feature: Feature::Scaffold, layer: k, points }
        })
        .collect()
}

/// Center, unit main axis, length and width (at least `min_width`) of the
/// oriented rectangle around the plan view of a path.
fn footprint(path: &ToolPath, min_width: f64) -> (Vec3, Vec3, f64, f64) {
    let pts: Vec<Vec3> = path.points.iter().map(|p| Vec3::new(p.p.x, p.p.y, 0.0)).collect();
    let n = pts.len() as f64;
    let mean = pts.iter().fold(Vec3::zeros(), |a, p| a + p) / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in &pts {
        let d = p - mean;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        sxy += d.x * d.y;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let axis = Vec3::new(angle.cos(), angle.sin(), 0.0);
    let normal = Vec3::new(-axis.y, axis.x, 0.0);
    let span = |d: &Vec3| {
        let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            let x = (p - mean).dot(d);
            (lo.min(x), hi.max(x))
        });
        (lo, hi)
    };
    let (a0, a1) = span(&axis);
    let (b0, b1) = span(&normal);
    let center = mean + axis * ((a0 + a1) / 2.0) + normal * ((b0 + b1) / 2.0);
    (center, axis, a1 - a0, (b1 - b0).max(min_width))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(z: f64) -> ToolPath {
        ToolPath {
            feature: Feature::Wall,
            layer: 0,
            points: (0..=20)
                .map(|i| PathPoint { p: Vec3::new(10.0 * i as f64, 0.0, z), t: Vec3::z(), h: 1.5, flow: 0.0 })
                .collect(),
        }
    }

    #[test]
    fn raised_line_gets_platform_and_scaffold() {
        let cfg = PrintConfig::default();
        let s = generate_support(&line(30.0), &[], &cfg).unwrap();
        let platform: Vec<&ToolPath> = s.iter().filter(|p| p.feature == Feature::Platform).collect();
        let zs: Vec<f64> = platform.iter().map(|p| p.points[0].p.z).collect();
        assert_eq!(zs, vec![25.5, 27.0, 28.5]);
        let scaffold: Vec<&ToolPath> = s.iter().filter(|p| p.feature == Feature::Scaffold).collect();
        // levels 0, 1.5, ..., 24.0
        assert_eq!(scaffold.len(), 17);
        let first = &scaffold[0].points;
        assert!(((first[1].p - first[0].p).norm() - 200.0).abs() < 1e-9);
        // width falls back to one layer width: a single pass
        assert_eq!(first.len(), 2);
    }

    #[test]
    fn piece_on_the_bed_gets_platform_only() {
        let cfg = PrintConfig::default();
        let s = generate_support(&line(3.0 * cfg.h_target), &[], &cfg).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|p| p.feature == Feature::Platform));
    }

    #[test]
    fn hatch_as_wide_as_the_footprint_is_one_pass() {
        let mut cfg = PrintConfig::default();
        let mut path = line(30.0);
        for (i, p) in path.points.iter_mut().enumerate() {
            p.p.y = if i % 2 == 0 { 0.0 } else { 10.0 };
        }
        cfg.hatch = 10.0;
        let s = generate_support(&path, &[], &cfg).unwrap();
        assert_eq!(s[0].points.len(), 2);
    }

    #[test]
    fn lower_wall_point_is_inconsistent() {
        let cfg = PrintConfig::default();
        let below = line(10.0);
        assert!(matches!(
            generate_support(&line(30.0), &[below], &cfg),
            Err(Error::OrientationSupportInconsistency)
        ));
    }
}
