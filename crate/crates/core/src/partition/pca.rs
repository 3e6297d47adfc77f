use nalgebra::{Matrix3, SymmetricEigen};

use crate::geom::Vec3;

/// Principal directions of a point set with the extent (max - min of the
/// projections) along each, largest extent first. Each direction is signed
/// so that its largest-magnitude component is positive.
pub fn pca_extents(points: &[Vec3]) -> [(Vec3, f64); 3] {
    let n = points.len().max(1) as f64;
    let mean = points.iter().fold(Vec3::zeros(), |a, p| a + p) / n;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - mean;
        cov += d * d.transpose();
    }
    cov /= n;
    let eig = SymmetricEigen::new(cov);
    let mut out: Vec<(Vec3, f64)> = (0..3)
        .map(|i| {
            let mut d: Vec3 = eig.eigenvectors.column(i).into();
            let big = (0..3).max_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs())).unwrap();
            if d[big] < 0.0 {
                d = -d;
            }
            let (lo, hi) = points
                .iter()
                .map(|p| p.dot(&d))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            (d, if points.is_empty() { 0.0 } else { hi - lo })
        })
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    [out[0], out[1], out[2]]
}
