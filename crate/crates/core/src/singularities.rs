//! Singular vertices and their separatrices.

use serde::{Deserialize, Serialize};

use crate::mesh::{Family, SdqMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularityKind {
    D2,
    D6,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Singularity {
    pub vertex: usize,
    pub valence: usize,
    pub kind: SingularityKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    Boundary,
    Singularity,
    Loop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separatrix {
    pub origin: usize,
    pub edges: Vec<usize>,
    /// Vertex sequence, one longer than `edges`.
    pub vertices: Vec<usize>,
    pub label: Family,
    pub terminal: Terminal,
}

/// Interior vertices with valence other than four, by vertex index.
pub fn find_singularities(mesh: &SdqMesh) -> Vec<Singularity> {
    (0..mesh.num_vertices())
        .filter(|&v| !mesh.is_boundary_vertex(v) && !mesh.vertex_edges(v).is_empty())
        .filter_map(|v| {
            let valence = mesh.valence(v);
            let kind = match valence {
                4 => return None,
                2 => SingularityKind::D2,
                6 => SingularityKind::D6,
                _ => SingularityKind::Other,
            };
            Some(Singularity { vertex: v, valence, kind })
        })
        .collect()
}

fn is_singular(mesh: &SdqMesh, v: usize) -> bool {
    !mesh.is_boundary_vertex(v) && mesh.valence(v) != 4
}

/// Straight walk from `start` along `first_edge`, stopping at the boundary,
/// at a singular vertex, or when the starting directed edge comes around.
pub fn trace_separatrix(mesh: &SdqMesh, start: usize, first_edge: usize) -> Separatrix {
    let mut edges = vec![first_edge];
    let mut vertices = vec![start, mesh.other_vertex(first_edge, start)];
    let terminal = loop {
        let v = *vertices.last().unwrap();
        let e = *edges.last().unwrap();
        if mesh.is_boundary_vertex(v) {
            break Terminal::Boundary;
        }
        if is_singular(mesh, v) {
            break Terminal::Singularity;
        }
        let next = mesh.straight_next(v, e).expect("regular interior vertex has a straight continuation");
        if v == start && next == first_edge {
            break Terminal::Loop;
        }
        edges.push(next);
        vertices.push(mesh.other_vertex(next, v));
        if edges.len() > mesh.num_edges() * 2 {
            // unreachable for a valid mesh: directed edges never repeat
            break Terminal::Loop;
        }
    };
    Separatrix { origin: start, label: mesh.label(first_edge), edges, vertices, terminal }
}

fn same_path(a: &Separatrix, b: &Separatrix) -> bool {
    if a.edges.len() != b.edges.len() {
        return false;
    }
    a.edges == b.edges || a.edges.iter().eq(b.edges.iter().rev())
}

/// Every separatrix of every singularity, deduplicated on identical
/// undirected edge paths.
pub fn separatrix_census(mesh: &SdqMesh) -> Vec<Separatrix> {
    let mut out: Vec<Separatrix> = Vec::new();
    for s in find_singularities(mesh) {
        let mut start_edges = mesh.vertex_edges(s.vertex).to_vec();
        start_edges.sort_unstable();
        for e in start_edges {
            let sep = trace_separatrix(mesh, s.vertex, e);
            if !out.iter().any(|o| same_path(o, &sep)) {
                out.push(sep);
            }
        }
    }
    out
}

/// Separatrices starting at `vertex` (including ones first traced from the
/// other end), oriented away from it.
pub fn separatrices_of(census: &[Separatrix], vertex: usize) -> Vec<Separatrix> {
    census
        .iter()
        .filter_map(|s| {
            if s.origin == vertex {
                Some(s.clone())
            } else if s.terminal == Terminal::Singularity && *s.vertices.last().unwrap() == vertex {
                let mut r = s.clone();
                r.edges.reverse();
                r.vertices.reverse();
                r.origin = vertex;
                Some(r)
            } else {
                None
            }
        })
        .collect()
}

/// Sum over interior vertices of (1 - valence/4) plus the boundary term
/// sum over boundary vertices of (1/2 - incident quads/4). Equals the
/// Euler characteristic for any quad mesh.
pub fn index_sum(mesh: &SdqMesh) -> f64 {
    (0..mesh.num_vertices())
        .filter(|&v| !mesh.vertex_quads(v).is_empty())
        .map(|v| {
            let quads = mesh.vertex_quads(v).len() as f64;
            if mesh.is_boundary_vertex(v) {
                0.5 - quads / 4.0
            } else {
                1.0 - quads / 4.0
            }
        })
        .sum()
}
