use nalgebra::{Matrix4, Rotation3, Unit};

use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Rigid fabrication transform: p' = rotation * p + translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    pub rotation: Rotation3<f64>,
    pub translation: Vec3,
}

impl Orientation {
    pub fn identity() -> Self {
        Orientation { rotation: Rotation3::identity(), translation: Vec3::zeros() }
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    pub fn apply_dir(&self, d: &Vec3) -> Vec3 {
        self.rotation * d
    }

    /// Row-major homogeneous matrix.
    pub fn matrix(&self) -> [f64; 16] {
        let m: Matrix4<f64> = self.rotation.to_homogeneous().append_translation(&self.translation);
        let mut out = [0.0; 16];
        for r in 0..4 {
            for c in 0..4 {
                out[4 * r + c] = m[(r, c)];
            }
        }
        out
    }

    /// Inverse of `matrix`; the upper 3x3 block is taken as the rotation.
    pub fn from_matrix(m: &[f64; 16]) -> Self {
        let r = nalgebra::Matrix3::new(m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10]);
        Orientation { rotation: Rotation3::from_matrix_unchecked(r), translation: Vec3::new(m[3], m[7], m[11]) }
    }
}

fn mean_unit(dirs: &[Vec3]) -> Option<Vec3> {
    let sum = dirs.iter().fold(Vec3::zeros(), |a, d| a + d);
    let len = sum.norm();
    (len > 1e-12).then(|| sum / len)
}

/// Rotation taking `v` (unit) onto +z; a half turn about +x when `v` points
/// straight down.
pub fn rotation_to_z(v: &Vec3) -> Rotation3<f64> {
    let z = Vec3::z();
    match Rotation3::rotation_between(v, &z) {
        Some(r) => r,
        None => Rotation3::from_axis_angle(&Vec3::x_axis(), std::f64::consts::PI),
    }
}

/// The vertical of a piece: the mean of the overall print direction
/// (`wall`) and that of the first path (`first`). Falls back to the overall
/// direction alone when the two cancel.
pub fn build_direction(wall: &[Vec3], first: &[Vec3]) -> Result<(Vec3, Vec<String>)> {
    let h = mean_unit(wall).ok_or(Error::DegenerateDirections)?;
    let m = mean_unit(first).ok_or(Error::DegenerateDirections)?;
    let s = h + m;
    if s.norm() < 1e-6 {
        let w = "print directions cancel; aligning the mean wall direction with z".to_string();
        log::warn!("{w}");
        return Ok((h, vec![w]));
    }
    Ok((s.normalize(), Vec::new()))
}

/// Minimal rotation aligning the build direction with +z.
pub fn compute_orientation(wall: &[Vec3], first: &[Vec3]) -> Result<(Rotation3<f64>, Vec<String>)> {
    let (v, w) = build_direction(wall, first)?;
    Ok((rotation_to_z(&v), w))
}

/// Extra turn about z aligning the principal horizontal direction of the
/// points with x, to tighten the footprint.
pub fn yaw_alignment(points: &[Vec3]) -> Rotation3<f64> {
    if points.len() < 2 {
        return Rotation3::identity();
    }
    let n = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.x, b + p.y));
    let (mx, my) = (mx / n, my / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let (dx, dy) = (p.x - mx, p.y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    Rotation3::from_axis_angle(&Unit::new_unchecked(Vec3::z()), -angle)
}
