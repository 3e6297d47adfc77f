//! Indexed quad mesh with the derived topology needed for strip work.
//!
//! Edges are numbered in order of first appearance while walking the quads
//! (quad 0 side 0, quad 0 side 1, ...). Side `k` of a quad runs from corner
//! `k` to corner `k + 1`. That numbering is what every deterministic
//! tie-break downstream refers to as "edge index".

mod io;

pub use io::{load_mesh, mesh_from_json, mesh_to_json, write_mesh, MeshFile};

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{triangle_area, v3, Vec3};

/// One of the two edge/strip families of an SDQ mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    U,
    V,
}

impl Family {
    pub fn other(self) -> Family {
        match self {
            Family::U => Family::V,
            Family::V => Family::U,
        }
    }

    pub fn both() -> [Family; 2] {
        [Family::U, Family::V]
    }

    pub fn index(self) -> usize {
        match self {
            Family::U => 0,
            Family::V => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::U => "U",
            Family::V => "V",
        })
    }
}

/// Edge and the side index it occupies in an incident quad.
pub type QuadSide = (usize, u8);

/// A validated strip-decomposable quad mesh. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SdqMesh {
    vertices: Vec<Vec3>,
    quads: Vec<[usize; 4]>,
    edges: Vec<[usize; 2]>,
    edge_lookup: HashMap<(usize, usize), usize>,
    quad_edges: Vec<[usize; 4]>,
    edge_quads: Vec<Vec<QuadSide>>,
    vertex_edges: Vec<Vec<usize>>,
    vertex_quads: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
    labels: Vec<Family>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl SdqMesh {
    /// Builds and validates a mesh. When `labels` is `None` the labeling is
    /// derived with [`SdqMesh::derive_labels`].
    pub fn new(
        vertices: Vec<[f64; 3]>,
        quads: Vec<[usize; 4]>,
        labels: Option<HashMap<(usize, usize), Family>>,
    ) -> Result<Self> {
        let n = vertices.len();
        for (qi, q) in quads.iter().enumerate() {
            for &v in q {
                if v >= n {
                    return Err(Error::MissingVertex { quad: qi, vertex: v });
                }
            }
            for i in 0..4 {
                for j in i + 1..4 {
                    if q[i] == q[j] {
                        return Err(Error::RepeatedVertex(qi));
                    }
                }
            }
        }

        let mut edges = Vec::new();
        let mut edge_lookup = HashMap::new();
        let mut quad_edges = Vec::with_capacity(quads.len());
        let mut edge_quads: Vec<Vec<QuadSide>> = Vec::new();
        for (qi, q) in quads.iter().enumerate() {
            let mut qe = [0usize; 4];
            for k in 0..4 {
                let (a, b) = (q[k], q[(k + 1) % 4]);
                let id = *edge_lookup.entry(key(a, b)).or_insert_with(|| {
                    edges.push([a.min(b), a.max(b)]);
                    edge_quads.push(Vec::new());
                    edges.len() - 1
                });
                edge_quads[id].push((qi, k as u8));
                qe[k] = id;
            }
            quad_edges.push(qe);
        }

        for (e, inc) in edge_quads.iter().enumerate() {
            let [a, b] = edges[e];
            if inc.len() > 2 {
                return Err(Error::NonManifoldEdge(a, b));
            }
            if inc.len() == 2 {
                let dir = |(q, k): QuadSide| quads[q][k as usize];
                // opposite traversal directions means the start corners differ
                if dir(inc[0]) == dir(inc[1]) {
                    return Err(Error::InconsistentOrientation(a, b));
                }
            }
        }

        let mut vertex_edges = vec![Vec::new(); n];
        for (e, &[a, b]) in edges.iter().enumerate() {
            vertex_edges[a].push(e);
            vertex_edges[b].push(e);
        }
        let mut vertex_quads = vec![Vec::new(); n];
        for (qi, q) in quads.iter().enumerate() {
            for &v in q {
                vertex_quads[v].push(qi);
            }
        }
        let mut boundary_vertex = vec![false; n];
        for (e, inc) in edge_quads.iter().enumerate() {
            if inc.len() == 1 {
                boundary_vertex[edges[e][0]] = true;
                boundary_vertex[edges[e][1]] = true;
            }
        }

        let mut mesh = SdqMesh {
            vertices: vertices.into_iter().map(v3).collect(),
            quads,
            edges,
            edge_lookup,
            quad_edges,
            edge_quads,
            vertex_edges,
            vertex_quads,
            boundary_vertex,
            labels: Vec::new(),
        };
        mesh.check_vertex_fans()?;

        mesh.labels = match labels {
            Some(given) => mesh.check_labels(&given)?,
            None => mesh.derive_labels()?,
        };
        Ok(mesh)
    }

    fn check_vertex_fans(&self) -> Result<()> {
        for v in 0..self.vertices.len() {
            let quads = &self.vertex_quads[v];
            if quads.is_empty() {
                continue;
            }
            let boundary_edges = self.vertex_edges[v]
                .iter()
                .filter(|&&e| self.edge_quads[e].len() == 1)
                .count();
            if boundary_edges != 0 && boundary_edges != 2 {
                return Err(Error::NonManifoldVertex(v));
            }
            // quads around v must be one fan, linked through edges at v
            let mut seen = vec![quads[0]];
            let mut queue = VecDeque::from([quads[0]]);
            while let Some(q) = queue.pop_front() {
                for k in 0..4 {
                    let e = self.quad_edges[q][k];
                    if !self.edges[e].contains(&v) {
                        continue;
                    }
                    for &(q2, _) in &self.edge_quads[e] {
                        if !seen.contains(&q2) {
                            seen.push(q2);
                            queue.push_back(q2);
                        }
                    }
                }
            }
            if seen.len() != quads.len() {
                return Err(Error::NonManifoldVertex(v));
            }
        }
        Ok(())
    }

    /// Two-colors the opposite-edge classes. The class holding the lowest
    /// unlabeled edge of each connected piece is colored U.
    pub fn derive_labels(&self) -> Result<Vec<Family>> {
        let ne = self.edges.len();
        // constraint graph: (other edge, same label?)
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); ne];
        for qe in &self.quad_edges {
            for k in 0..4 {
                adj[qe[k]].push((qe[(k + 2) % 4], true));
                adj[qe[k]].push((qe[(k + 1) % 4], false));
                adj[qe[k]].push((qe[(k + 3) % 4], false));
            }
        }
        let mut label: Vec<Option<Family>> = vec![None; ne];
        for start in 0..ne {
            if label[start].is_some() {
                continue;
            }
            label[start] = Some(Family::U);
            let mut queue = VecDeque::from([start]);
            while let Some(e) = queue.pop_front() {
                let le = label[e].unwrap();
                for &(o, same) in &adj[e] {
                    let want = if same { le } else { le.other() };
                    match label[o] {
                        None => {
                            label[o] = Some(want);
                            queue.push_back(o);
                        }
                        Some(l) if l != want => {
                            let [a, b] = self.edges[o];
                            return Err(Error::NotStripDecomposable(a, b));
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(label.into_iter().map(Option::unwrap).collect())
    }

    fn check_labels(&self, given: &HashMap<(usize, usize), Family>) -> Result<Vec<Family>> {
        let mut labels = Vec::with_capacity(self.edges.len());
        for &[a, b] in &self.edges {
            match given.get(&(a, b)) {
                Some(&l) => labels.push(l),
                None => return Err(Error::BadLabels(format!("edge ({a}, {b}) has no label"))),
            }
        }
        if given.len() != self.edges.len() {
            return Err(Error::BadLabels("labels reference edges not in the mesh".into()));
        }
        for (qi, qe) in self.quad_edges.iter().enumerate() {
            let l = |k: usize| labels[qe[k]];
            if l(0) != l(2) || l(1) != l(3) || l(0) == l(1) {
                return Err(Error::BadLabels(format!("quad {qi} violates the opposite-pair rule")));
            }
        }
        Ok(labels)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_quads(&self) -> usize {
        self.quads.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn position(&self, v: usize) -> Vec3 {
        self.vertices[v]
    }

    pub fn quads(&self) -> &[[usize; 4]] {
        &self.quads
    }

    pub fn quad(&self, q: usize) -> [usize; 4] {
        self.quads[q]
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&key(a, b)).copied()
    }

    pub fn quad_edges(&self, q: usize) -> [usize; 4] {
        self.quad_edges[q]
    }

    pub fn edge_quads(&self, e: usize) -> &[QuadSide] {
        &self.edge_quads[e]
    }

    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    pub fn vertex_quads(&self, v: usize) -> &[usize] {
        &self.vertex_quads[v]
    }

    pub fn label(&self, e: usize) -> Family {
        self.labels[e]
    }

    pub fn labels(&self) -> &[Family] {
        &self.labels
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_quads[e].len() == 1
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.vertex_edges[v].len()
    }

    pub fn other_vertex(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn edge_vector(&self, e: usize) -> Vec3 {
        let [a, b] = self.edges[e];
        self.vertices[b] - self.vertices[a]
    }

    /// Quad on the other side of `side` of `q`, with the side index there.
    pub fn neighbor_across(&self, q: usize, side: u8) -> Option<QuadSide> {
        let e = self.quad_edges[q][side as usize];
        self.edge_quads[e].iter().copied().find(|&(q2, _)| q2 != q)
    }

    /// Straight continuation through `v` coming in along `e`: the edge of the
    /// fan sharing no quad with `e`. Only defined at interior valence-4
    /// vertices.
    pub fn straight_next(&self, v: usize, e: usize) -> Option<usize> {
        if self.boundary_vertex[v] || self.valence(v) != 4 {
            return None;
        }
        let touching: Vec<usize> = self.edge_quads[e].iter().map(|&(q, _)| q).collect();
        self.vertex_edges[v].iter().copied().find(|&o| {
            o != e && !self.edge_quads[o].iter().any(|(q, _)| touching.contains(q))
        })
    }

    /// Unit normal: average of the two triangle normals when split along
    /// the v0-v2 diagonal.
    pub fn quad_normal(&self, q: usize) -> Result<Vec3> {
        let [a, b, c, d] = self.quads[q].map(|v| self.vertices[v]);
        let n1 = (b - a).cross(&(c - a));
        let n2 = (c - a).cross(&(d - a));
        let (l1, l2) = (n1.norm(), n2.norm());
        if l1 == 0.0 && l2 == 0.0 {
            return Err(Error::DegenerateQuad(q));
        }
        let mut sum = Vec3::zeros();
        if l1 > 0.0 {
            sum += n1 / l1;
        }
        if l2 > 0.0 {
            sum += n2 / l2;
        }
        let len = sum.norm();
        if len == 0.0 {
            return Err(Error::DegenerateQuad(q));
        }
        Ok(sum / len)
    }

    /// Sum of the two triangle areas (v0-v2 diagonal).
    pub fn quad_area(&self, q: usize) -> f64 {
        let [a, b, c, d] = self.quads[q].map(|v| self.vertices[v]);
        triangle_area(&a, &b, &c) + triangle_area(&a, &c, &d)
    }

    pub fn quad_centroid(&self, q: usize) -> Vec3 {
        self.quads[q].iter().map(|&v| self.vertices[v]).sum::<Vec3>() / 4.0
    }

    /// V - E + F over the used vertices.
    pub fn euler_characteristic(&self) -> i64 {
        let used = self.vertex_quads.iter().filter(|q| !q.is_empty()).count();
        used as i64 - self.edges.len() as i64 + self.quads.len() as i64
    }

    /// Number of closed boundary loops.
    pub fn boundary_loops(&self) -> usize {
        let bedges: Vec<usize> = (0..self.edges.len()).filter(|&e| self.is_boundary_edge(e)).collect();
        let mut seen = vec![false; self.edges.len()];
        let mut loops = 0;
        for &start in &bedges {
            if seen[start] {
                continue;
            }
            loops += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(e) = stack.pop() {
                for v in self.edges[e] {
                    for &o in &self.vertex_edges[v] {
                        if !seen[o] && self.is_boundary_edge(o) {
                            seen[o] = true;
                            stack.push(o);
                        }
                    }
                }
            }
        }
        loops
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testmesh;

    fn grid(rows: usize, cols: usize) -> SdqMesh {
        testmesh::grid(rows, cols, 1.0).unwrap()
    }

    #[test]
    fn grid_2x2_has_12_edges() {
        let m = grid(2, 2);
        assert_eq!(m.num_vertices(), 9);
        assert_eq!(m.num_quads(), 4);
        assert_eq!(m.num_edges(), 12);
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn grid_labels_split_rows_and_columns() {
        let m = grid(3, 4);
        for e in 0..m.num_edges() {
            let d = m.edge_vector(e);
            let horizontal = d.y.abs() < 1e-12;
            // edge 0 is the first side of quad 0, which is horizontal
            let expected = if horizontal { Family::U } else { Family::V };
            assert_eq!(m.label(e), expected);
        }
    }

    #[test]
    fn opposite_sides_share_labels() {
        for m in [grid(4, 6), testmesh::d6(3, 30.0, 0.0).unwrap(), testmesh::d2(3, 30.0, 0.0).unwrap()] {
            for q in 0..m.num_quads() {
                let e = m.quad_edges(q);
                assert_eq!(m.label(e[0]), m.label(e[2]));
                assert_eq!(m.label(e[1]), m.label(e[3]));
                assert_ne!(m.label(e[0]), m.label(e[1]));
            }
        }
    }

    #[test]
    fn valence_three_is_rejected() {
        let err = testmesh::sector_mesh(3, 2, 10.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::NotStripDecomposable(..)), "{err}");
    }

    #[test]
    fn valence_six_is_labeled() {
        let m = testmesh::d6(2, 10.0, 0.0).unwrap();
        // exhaustive class traversal: around the center labels alternate
        let center = (0..m.num_vertices()).find(|&v| m.valence(v) == 6).unwrap();
        let us = m.vertex_edges(center).iter().filter(|&&e| m.label(e) == Family::U).count();
        assert_eq!(us, 3);
    }

    #[test]
    fn flipped_quad_is_inconsistent() {
        let verts = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0], [2.0, 1.0, 0.0]];
        let quads = vec![[0, 1, 4, 3], [2, 1, 4, 5]];
        let err = SdqMesh::new(verts, quads, None).unwrap_err();
        assert!(matches!(err, Error::InconsistentOrientation(1, 4)));
    }

    #[test]
    fn three_quads_on_an_edge_is_non_manifold() {
        let verts = vec![
            [0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0],
            [0.0, -1.0, 0.0], [1.0, -1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 1.0],
        ];
        let quads = vec![[0, 1, 3, 2], [1, 0, 4, 5], [0, 1, 7, 6]];
        assert!(matches!(SdqMesh::new(verts, quads, None), Err(Error::NonManifoldEdge(0, 1))));
    }

    #[test]
    fn quad_normals_follow_winding() {
        let m = SdqMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2, 3]],
            None,
        )
        .unwrap();
        assert_eq!(m.quad_normal(0).unwrap(), Vec3::new(0.0, 0.0, 1.0));
        let m = SdqMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 3, 2, 1]],
            None,
        )
        .unwrap();
        assert_eq!(m.quad_normal(0).unwrap(), Vec3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn lifted_corner_normal_matches_cross_products() {
        let m = SdqMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0]],
            vec![[0, 1, 2, 3]],
            None,
        )
        .unwrap();
        // triangle (0,1,2): normal (0,0,1); triangle (0,2,3): (1,1,0)x(0,1,1) = (1,-1,1)/sqrt3
        let t2 = Vec3::new(1.0, -1.0, 1.0) / 3f64.sqrt();
        let expected = (Vec3::new(0.0, 0.0, 1.0) + t2).normalize();
        assert!((m.quad_normal(0).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn degenerate_quad_normal_errors() {
        let m = SdqMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [3.0, 0.0, 0.0]],
            vec![[0, 1, 2, 3]],
            None,
        )
        .unwrap();
        assert!(matches!(m.quad_normal(0), Err(Error::DegenerateQuad(0))));
    }
}
