//! Connectivity of quad sets under a network's cut edges.

use std::collections::{BTreeMap, BTreeSet};

use crate::mesh::{Family, SdqMesh};
use crate::strips::{trace_restricted, StripNetwork};

/// Quad subset with a membership mask, glued across every interior edge
/// that is not in `cuts`.
pub struct Region<'a> {
    pub mesh: &'a SdqMesh,
    pub cuts: &'a BTreeSet<usize>,
    pub quads: Vec<usize>,
    member: Vec<bool>,
}

impl<'a> Region<'a> {
    pub fn new(mesh: &'a SdqMesh, cuts: &'a BTreeSet<usize>, mut quads: Vec<usize>) -> Self {
        quads.sort_unstable();
        let mut member = vec![false; mesh.num_quads()];
        for &q in &quads {
            member[q] = true;
        }
        Region { mesh, cuts, quads, member }
    }

    pub fn whole(mesh: &'a SdqMesh, cuts: &'a BTreeSet<usize>) -> Self {
        Self::new(mesh, cuts, (0..mesh.num_quads()).collect())
    }

    pub fn contains(&self, q: usize) -> bool {
        self.member[q]
    }

    /// Edge between two member quads that is not cut.
    pub fn glued(&self, e: usize) -> bool {
        let eq = self.mesh.edge_quads(e);
        eq.len() == 2 && !self.cuts.contains(&e) && self.member[eq[0].0] && self.member[eq[1].0]
    }

    /// Connected components, each sorted, ordered by lowest quad.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components_with(self, &BTreeSet::new())
    }

    /// Vertices touching an unglued side of a member quad.
    pub fn boundary_vertices(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &q in &self.quads {
            for e in self.mesh.quad_edges(q) {
                if !self.glued(e) {
                    out.extend(self.mesh.edge(e));
                }
            }
        }
        out
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.quads.iter().flat_map(|&q| self.mesh.quad(q)).collect()
    }

    pub fn has_boundary(&self) -> bool {
        self.quads.iter().any(|&q| self.mesh.quad_edges(q).iter().any(|&e| !self.glued(e)))
    }

    /// V - E + F of the complex obtained by gluing quads only along glued
    /// edges. Vertices are classes of quad corners identified across them.
    pub fn euler(&self) -> i64 {
        let f = self.quads.len();
        let mut idx = BTreeMap::new();
        for (i, &q) in self.quads.iter().enumerate() {
            idx.insert(q, i);
        }
        let mut uf = UnionFind::new(4 * f);
        let mut glued = 0usize;
        for &q in &self.quads {
            for (s, e) in self.mesh.quad_edges(q).into_iter().enumerate() {
                if !self.glued(e) {
                    continue;
                }
                let (qb, sb) = self.mesh.neighbor_across(q, s as u8).unwrap();
                if qb < q {
                    continue;
                }
                glued += 1;
                let (ia, ib) = (idx[&q], idx[&qb]);
                let sb = sb as usize;
                uf.union(4 * ia + s, 4 * ib + (sb + 1) % 4);
                uf.union(4 * ia + (s + 1) % 4, 4 * ib + sb);
            }
        }
        let v = uf.classes();
        v as i64 - (4 * f - glued) as i64 + f as i64
    }

    /// Deficiency measure that every handle cut must decrease:
    /// sum over components of (1 - chi) plus one per closed component.
    pub fn handle_measure(&self) -> i64 {
        self.components()
            .into_iter()
            .map(|c| {
                let r = Region::new(self.mesh, self.cuts, c);
                (1 - r.euler()) + i64::from(!r.has_boundary())
            })
            .sum()
    }

    /// Strips of `family` restricted to this region.
    pub fn strips(&self, family: Family) -> StripNetwork {
        let accept = |e: usize, _: usize, _: usize| self.glued(e);
        trace_restricted(self.mesh, family, &accept, Some(&self.quads))
    }
}

/// Components when `extra` edges are cut as well.
pub fn components_with(region: &Region, extra: &BTreeSet<usize>) -> Vec<Vec<usize>> {
    let mesh = region.mesh;
    let mut seen = vec![false; mesh.num_quads()];
    let mut out = Vec::new();
    for &start in &region.quads {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(q) = stack.pop() {
            for (s, e) in mesh.quad_edges(q).into_iter().enumerate() {
                if !region.glued(e) || extra.contains(&e) {
                    continue;
                }
                let (q2, _) = mesh.neighbor_across(q, s as u8).unwrap();
                if !seen[q2] {
                    seen[q2] = true;
                    comp.push(q2);
                    stack.push(q2);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Straight line through `edge` extended both ways until `stop` holds at a
/// vertex, the walk cannot continue, or it closes on itself. Returned as an
/// ordered, connected edge path.
pub fn straight_line(mesh: &SdqMesh, edge: usize, stop: &dyn Fn(usize) -> bool) -> Vec<usize> {
    let [a, b] = mesh.edge(edge);
    let forward = straight_ray(mesh, b, edge, stop);
    if forward.last() == Some(&edge) {
        // closed loop; drop the repeated start
        let mut f = forward;
        f.pop();
        let mut out = vec![edge];
        out.extend(f);
        return out;
    }
    let backward = straight_ray(mesh, a, edge, stop);
    let mut out: Vec<usize> = backward.into_iter().rev().collect();
    out.push(edge);
    out.extend(forward);
    out
}

/// Edges after `from_edge` when walking straight on from vertex `v`.
pub fn straight_ray(mesh: &SdqMesh, mut v: usize, from_edge: usize, stop: &dyn Fn(usize) -> bool) -> Vec<usize> {
    let mut out = Vec::new();
    let mut e = from_edge;
    while !stop(v) {
        let Some(next) = mesh.straight_next(v, e) else { break };
        out.push(next);
        if next == from_edge || out.len() > mesh.num_edges() {
            break;
        }
        v = mesh.other_vertex(next, v);
        e = next;
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn classes(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}
