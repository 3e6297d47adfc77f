//! Small vector helpers on top of `nalgebra`.

use nalgebra::Vector3;

pub type Vec3 = Vector3<f64>;

#[inline]
pub fn v3(p: [f64; 3]) -> Vec3 {
    Vec3::new(p[0], p[1], p[2])
}

#[inline]
pub fn arr(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

/// Unsigned angle between two vectors, clamped against rounding.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (a.dot(b) / (na * nb)).clamp(-1.0, 1.0).acos()
}

pub fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Distance from `p` to the segment `a`-`b`.
pub fn point_segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance from `p` to an open polyline.
pub fn point_polyline_distance(p: &Vec3, line: &[Vec3]) -> f64 {
    match line.len() {
        0 => f64::INFINITY,
        1 => (p - line[0]).norm(),
        _ => line
            .windows(2)
            .map(|w| point_segment_distance(p, &w[0], &w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

pub fn polyline_length(line: &[Vec3]) -> f64 {
    line.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Axis-aligned bounds of a point set, `None` when empty.
pub fn aabb<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Option<(Vec3, Vec3)> {
    let mut it = points.into_iter();
    let first = *it.next()?;
    let (mut lo, mut hi) = (first, first);
    for p in it {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    Some((lo, hi))
}
