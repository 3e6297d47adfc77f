use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::region::Region;
use super::registry::CutRegistry;
use crate::mesh::{Family, SdqMesh};
use crate::strips::{RailSide, Strip};

/// One strip in print order with the rail it is printed up from.
#[derive(Debug, Clone)]
pub struct OrderedStrip {
    pub strip: Strip,
    pub bottom: RailSide,
}

#[derive(Debug, Clone)]
pub struct Patch {
    pub network: Family,
    pub id: usize,
    pub quads: Vec<usize>,
    /// Own-family sub-strips, ordered by lowest quad.
    pub strips: Vec<Strip>,
    /// Print order when the strip graph is a path.
    pub order: Option<Vec<OrderedStrip>>,
    pub euler: i64,
    /// Indices into the registry's cut list touching this patch.
    pub boundary_cuts: Vec<usize>,
}

impl Patch {
    pub fn is_simply_connected(&self) -> bool {
        self.euler == 1
    }

    pub fn is_valid(&self) -> bool {
        self.is_simply_connected() && self.order.is_some()
    }
}

/// Adjacency between sub-strips across glued rail edges.
#[derive(Debug, Default)]
pub struct StripGraph {
    /// (a, b) with a <= b -> shared rail edges, ascending.
    pub links: BTreeMap<(usize, usize), Vec<usize>>,
    /// Strips touched by each rail side of each strip, [left, right].
    pub sides: Vec<[BTreeSet<usize>; 2]>,
}

fn side_index(side: RailSide) -> usize {
    match side {
        RailSide::Left => 0,
        RailSide::Right => 1,
    }
}

impl StripGraph {
    pub fn nodes(&self) -> usize {
        self.sides.len()
    }

    pub fn neighbors(&self, s: usize) -> Vec<usize> {
        let n: BTreeSet<usize> = self.sides[s].iter().flatten().copied().filter(|&t| t != s).collect();
        n.into_iter().collect()
    }

    pub fn touching(&self, s: usize, side: RailSide) -> &BTreeSet<usize> {
        &self.sides[s][side_index(side)]
    }

    pub fn shared(&self, a: usize, b: usize) -> &[usize] {
        self.links.get(&(a.min(b), a.max(b))).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Lowest strip with a rail side touching itself or more than one strip.
    pub fn branch(&self) -> Option<(usize, RailSide)> {
        (0..self.nodes()).find_map(|s| {
            [RailSide::Left, RailSide::Right].into_iter().find_map(|side| {
                let t = self.touching(s, side);
                (t.len() > 1 || t.contains(&s)).then_some((s, side))
            })
        })
    }

    /// Node sequence if the strips stack as a simple path, each rail side
    /// touching at most one other strip.
    pub fn path(&self) -> Option<Vec<usize>> {
        let n = self.nodes();
        if n == 0 || self.branch().is_some() || self.links.len() + 1 != n {
            return None;
        }
        if (0..n).any(|s| self.neighbors(s).len() > 2) {
            return None;
        }
        let start = (0..n).find(|&s| self.neighbors(s).len() <= 1)?;
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(next) = self.neighbors(cur).into_iter().find(|&t| t != prev) {
            order.push(next);
            prev = cur;
            cur = next;
        }
        (order.len() == n).then_some(order)
    }
}

pub fn strip_graph(region: &Region, strips: &[Strip], quad_strip: &BTreeMap<usize, usize>) -> StripGraph {
    let mesh = region.mesh;
    let mut g = StripGraph { sides: vec![Default::default(); strips.len()], ..Default::default() };
    for (si, s) in strips.iter().enumerate() {
        for side in [RailSide::Left, RailSide::Right] {
            for (&q, e) in s.quads.iter().zip(s.rail_edges(mesh, side)) {
                if !region.glued(e) {
                    continue;
                }
                let eq = mesh.edge_quads(e);
                let across = if eq[0].0 == q { eq[1].0 } else { eq[0].0 };
                let other = quad_strip[&across];
                g.sides[si][side_index(side)].insert(other);
                let list = g.links.entry((si.min(other), si.max(other))).or_default();
                if !list.contains(&e) {
                    list.push(e);
                }
            }
        }
    }
    for list in g.links.values_mut() {
        list.sort_unstable();
    }
    g
}

/// Own-family sub-strips of a region, the quad -> strip map and the graph.
pub fn strip_structure(region: &Region, family: Family) -> (Vec<Strip>, BTreeMap<usize, usize>, StripGraph) {
    let net = region.strips(family);
    let quad_strip: BTreeMap<usize, usize> = region.quads.iter().map(|&q| (q, net.quad_strip[q])).collect();
    let g = strip_graph(region, &net.strips, &quad_strip);
    (net.strips, quad_strip, g)
}

fn print_order(strips: &[Strip], g: &StripGraph) -> Option<Vec<OrderedStrip>> {
    let order = g.path()?;
    let n = order.len();
    let mut out = Vec::with_capacity(n);
    for (k, &si) in order.iter().enumerate() {
        let bottom = if n == 1 {
            RailSide::Left
        } else if k == 0 {
            // the side away from the next strip
            if g.touching(si, RailSide::Left).contains(&order[1]) {
                RailSide::Right
            } else {
                RailSide::Left
            }
        } else if g.touching(si, RailSide::Left).contains(&order[k - 1]) {
            RailSide::Left
        } else {
            RailSide::Right
        };
        out.push(OrderedStrip { strip: strips[si].clone(), bottom });
    }
    Some(out)
}

/// Builds one patch from a connected quad set.
pub fn build_patch(mesh: &SdqMesh, registry: &CutRegistry, network: Family, id: usize, quads: Vec<usize>) -> Patch {
    let cuts = registry.edges(network);
    let region = Region::new(mesh, cuts, quads);
    let (strips, _, g) = strip_structure(&region, network);
    let order = print_order(&strips, &g);
    let euler = region.euler();
    let edges: BTreeSet<usize> = region.quads.iter().flat_map(|&q| mesh.quad_edges(q)).collect();
    let boundary_cuts = registry
        .cuts()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.network == network && c.edges.iter().any(|e| edges.contains(e)))
        .map(|(i, _)| i)
        .collect();
    Patch { network, id, quads: region.quads, strips, order, euler, boundary_cuts }
}

/// All patches of a network under the registry's current cuts.
pub fn network_patches(mesh: &SdqMesh, registry: &CutRegistry, network: Family) -> Vec<Patch> {
    let cuts = registry.edges(network);
    let comps = Region::whole(mesh, cuts).components();
    comps
        .into_iter()
        .enumerate()
        .map(|(id, quads)| build_patch(mesh, registry, network, id, quads))
        .collect()
}

/// Serializable summary of a patch.
#[derive(Debug, Clone, Serialize, serde::Deserialize, PartialEq)]
pub struct PatchRecord {
    pub network: Family,
    pub id: usize,
    pub quads: Vec<usize>,
    /// Strips in print order, each as its quad sequence.
    pub print_order: Vec<Vec<usize>>,
    /// Bottom rail per strip: "left" or "right".
    pub bottoms: Vec<String>,
    pub boundary_cuts: Vec<usize>,
}

impl From<&Patch> for PatchRecord {
    fn from(p: &Patch) -> Self {
        let order = p.order.as_deref().unwrap_or(&[]);
        PatchRecord {
            network: p.network,
            id: p.id,
            quads: p.quads.clone(),
            print_order: order.iter().map(|o| o.strip.quads.clone()).collect(),
            bottoms: order
                .iter()
                .map(|o| match o.bottom {
                    RailSide::Left => "left".to_string(),
                    RailSide::Right => "right".to_string(),
                })
                .collect(),
            boundary_cuts: p.boundary_cuts.clone(),
        }
    }
}
