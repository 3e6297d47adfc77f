//! Deterministic synthetic SDQ meshes used by the tests, examples and the
//! `gen` subcommand.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::SdqMesh;

/// Generator selection with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TestMesh {
    Grid { rows: usize, cols: usize, spacing: f64 },
    Cylinder { around: usize, high: usize, radius: f64, height: f64 },
    Torus { major: usize, minor: usize, major_radius: f64, minor_radius: f64 },
    D2 { size: usize, extent: f64, amplitude: f64 },
    D6 { size: usize, extent: f64, amplitude: f64 },
    Saddle { rows: usize, cols: usize, spacing: f64, amplitude: f64 },
}

impl TestMesh {
    pub fn build(&self) -> Result<SdqMesh> {
        match *self {
            TestMesh::Grid { rows, cols, spacing } => grid(rows, cols, spacing),
            TestMesh::Cylinder { around, high, radius, height } => cylinder(around, high, radius, height),
            TestMesh::Torus { major, minor, major_radius, minor_radius } => {
                torus(major, minor, major_radius, minor_radius)
            }
            TestMesh::D2 { size, extent, amplitude } => d2(size, extent, amplitude),
            TestMesh::D6 { size, extent, amplitude } => d6(size, extent, amplitude),
            TestMesh::Saddle { rows, cols, spacing, amplitude } => saddle(rows, cols, spacing, amplitude),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestMesh::Grid { .. } => "grid",
            TestMesh::Cylinder { .. } => "cylinder",
            TestMesh::Torus { .. } => "torus",
            TestMesh::D2 { .. } => "d2",
            TestMesh::D6 { .. } => "d6",
            TestMesh::Saddle { .. } => "saddle",
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be positive, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} must be at least {min}, got {v}")))
    }
}

fn grid_with(rows: usize, cols: usize, f: impl Fn(usize, usize) -> [f64; 3]) -> Result<SdqMesh> {
    let idx = |i: usize, j: usize| i * (cols + 1) + j;
    let mut verts = Vec::with_capacity((rows + 1) * (cols + 1));
    for i in 0..=rows {
        for j in 0..=cols {
            verts.push(f(i, j));
        }
    }
    let mut quads = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            quads.push([idx(i, j), idx(i, j + 1), idx(i + 1, j + 1), idx(i + 1, j)]);
        }
    }
    SdqMesh::new(verts, quads, None)
}

/// Flat `rows` x `cols` grid in the xy-plane, counter-clockwise quads.
pub fn grid(rows: usize, cols: usize, spacing: f64) -> Result<SdqMesh> {
    at_least("rows", rows, 1)?;
    at_least("cols", cols, 1)?;
    positive("spacing", spacing)?;
    grid_with(rows, cols, |i, j| [j as f64 * spacing, i as f64 * spacing, 0.0])
}

/// Saddle over a centered grid: z = amplitude * (x^2 - y^2) / half^2.
pub fn saddle(rows: usize, cols: usize, spacing: f64, amplitude: f64) -> Result<SdqMesh> {
    at_least("rows", rows, 1)?;
    at_least("cols", cols, 1)?;
    positive("spacing", spacing)?;
    let hx = cols as f64 * spacing / 2.0;
    let hy = rows as f64 * spacing / 2.0;
    let half = hx.max(hy);
    grid_with(rows, cols, |i, j| {
        let x = j as f64 * spacing - hx;
        let y = i as f64 * spacing - hy;
        [x, y, amplitude * (x * x - y * y) / (half * half)]
    })
}

/// Open cylinder around the z-axis with outward normals.
pub fn cylinder(around: usize, high: usize, radius: f64, height: f64) -> Result<SdqMesh> {
    at_least("around", around, 3)?;
    at_least("high", high, 1)?;
    positive("radius", radius)?;
    positive("height", height)?;
    let idx = |k: usize, l: usize| l * around + (k % around);
    let mut verts = Vec::new();
    for l in 0..=high {
        for k in 0..around {
            let a = TAU * k as f64 / around as f64;
            verts.push([radius * a.cos(), radius * a.sin(), height * l as f64 / high as f64]);
        }
    }
    let mut quads = Vec::new();
    for l in 0..high {
        for k in 0..around {
            quads.push([idx(k, l), idx(k + 1, l), idx(k + 1, l + 1), idx(k, l + 1)]);
        }
    }
    SdqMesh::new(verts, quads, None)
}

/// Closed torus grid; both strip families are loops.
pub fn torus(major: usize, minor: usize, major_radius: f64, minor_radius: f64) -> Result<SdqMesh> {
    at_least("major", major, 3)?;
    at_least("minor", minor, 3)?;
    positive("major_radius", major_radius)?;
    positive("minor_radius", minor_radius)?;
    if minor_radius >= major_radius {
        return Err(Error::InvalidParams("minor_radius must be below major_radius".into()));
    }
    let idx = |i: usize, j: usize| (i % major) * minor + (j % minor);
    let mut verts = Vec::new();
    for i in 0..major {
        let u = TAU * i as f64 / major as f64;
        for j in 0..minor {
            let v = TAU * j as f64 / minor as f64;
            let r = major_radius + minor_radius * v.cos();
            verts.push([r * u.cos(), r * u.sin(), minor_radius * v.sin()]);
        }
    }
    let mut quads = Vec::new();
    for i in 0..major {
        for j in 0..minor {
            quads.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    SdqMesh::new(verts, quads, None)
}

/// Disk made of `sectors` square `size` x `size` grids glued corner to
/// corner around a central vertex of valence `sectors`. Sector `i` occupies
/// the wedge [2*pi*i/k, 2*pi*(i+1)/k]; grid coordinates are mapped with the
/// complex power z^(4/k). `amplitude` lifts the disk into a bowl.
pub fn sector_mesh(sectors: usize, size: usize, extent: f64, amplitude: f64) -> Result<SdqMesh> {
    at_least("sectors", sectors, 2)?;
    at_least("size", size, 1)?;
    positive("extent", extent)?;
    let (k, m) = (sectors, size);
    let power = 4.0 / k as f64;
    let place = |sector: usize, a: usize, b: usize| -> [f64; 3] {
        let (x, y) = (a as f64 / m as f64, b as f64 / m as f64);
        let r = (x * x + y * y).sqrt();
        if r == 0.0 {
            return [0.0, 0.0, 0.0];
        }
        let theta = y.atan2(x) * power + TAU * sector as f64 / k as f64;
        let rr = r.powf(power);
        let scale = extent / 2f64.sqrt().powf(power);
        [
            scale * rr * theta.cos(),
            scale * rr * theta.sin(),
            amplitude * (rr / 2f64.sqrt().powf(power)).powi(2),
        ]
    };

    let ray = |j: usize, t: usize| 1 + (j % k) * m + (t - 1);
    let inner = |s: usize, a: usize, b: usize| 1 + k * m + s * m * m + (a - 1) * m + (b - 1);
    let id = |s: usize, a: usize, b: usize| match (a, b) {
        (0, 0) => 0,
        (a, 0) => ray(s, a),
        (0, b) => ray(s + 1, b),
        (a, b) => inner(s, a, b),
    };

    let mut verts = vec![[0.0; 3]; 1 + k * m + k * m * m];
    for j in 0..k {
        for t in 1..=m {
            verts[ray(j, t)] = place(j, t, 0);
        }
    }
    for s in 0..k {
        for a in 1..=m {
            for b in 1..=m {
                verts[inner(s, a, b)] = place(s, a, b);
            }
        }
    }
    let mut quads = Vec::with_capacity(k * m * m);
    for s in 0..k {
        for a in 0..m {
            for b in 0..m {
                quads.push([id(s, a, b), id(s, a + 1, b), id(s, a + 1, b + 1), id(s, a, b + 1)]);
            }
        }
    }
    SdqMesh::new(verts, quads, None)
}

/// Disk with a single interior valence-2 vertex.
pub fn d2(size: usize, extent: f64, amplitude: f64) -> Result<SdqMesh> {
    sector_mesh(2, size, extent, amplitude)
}

/// Disk with a single interior valence-6 vertex.
pub fn d6(size: usize, extent: f64, amplitude: f64) -> Result<SdqMesh> {
    sector_mesh(6, size, extent, amplitude)
}

/// Open cylindrical panel: `cols` quads around
/// `angle` radians, `rows` quads along the axis.
pub fn cylinder_patch(rows: usize, cols: usize, radius: f64, length: f64, angle: f64) -> Result<SdqMesh> {
    at_least("rows", rows, 1)?;
    at_least("cols", cols, 1)?;
    positive("radius", radius)?;
    positive("length", length)?;
    if !(angle > 0.0 && angle < TAU) {
        return Err(Error::InvalidParams(format!("angle must be in (0, 2pi), got {angle}")));
    }
    // outward normals: walk the arc counter-clockwise, then along +z
    grid_with(rows, cols, |i, j| {
        let a = angle * j as f64 / cols as f64;
        [radius * a.cos(), radius * a.sin(), length * i as f64 / rows as f64]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        let m = grid(4, 6, 10.0).unwrap();
        assert_eq!((m.num_vertices(), m.num_quads()), (35, 24));
    }

    #[test]
    fn sector_mesh_center_valence() {
        for k in [2, 4, 6, 8] {
            let m = sector_mesh(k, 3, 50.0, 0.0).unwrap();
            assert_eq!(m.valence(0), k);
            assert!(!m.is_boundary_vertex(0));
            let others = (1..m.num_vertices())
                .filter(|&v| !m.is_boundary_vertex(v) && m.valence(v) != 4)
                .count();
            assert_eq!(others, 0);
        }
    }

    #[test]
    fn quads_are_not_degenerate() {
        for m in [d2(4, 50.0, 10.0).unwrap(), d6(4, 50.0, 0.0).unwrap(), torus(8, 6, 50.0, 20.0).unwrap()] {
            for q in 0..m.num_quads() {
                assert!(m.quad_area(q) > 1e-9);
                m.quad_normal(q).unwrap();
            }
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(matches!(grid(0, 3, 1.0), Err(Error::InvalidParams(_))));
        assert!(matches!(torus(8, 8, 10.0, 20.0), Err(Error::InvalidParams(_))));
        assert!(matches!(cylinder(8, 4, -1.0, 10.0), Err(Error::InvalidParams(_))));
    }
}
