//! Strip tracing. A strip of family `F` is a ladder of quads glued across
//! their non-`F` edges (the rungs); its two `F`-labeled sides are the rails.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::mesh::{Family, SdqMesh};

/// A rung with its traversal direction, from the left rail to the right rail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rung {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
}

impl Rung {
    pub fn flipped(self) -> Rung {
        Rung { edge: self.edge, from: self.to, to: self.from }
    }

    pub fn vector(&self, mesh: &SdqMesh) -> Vec3 {
        mesh.position(self.to) - mesh.position(self.from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RailSide {
    Left,
    Right,
}

impl RailSide {
    pub fn other(self) -> RailSide {
        match self {
            RailSide::Left => RailSide::Right,
            RailSide::Right => RailSide::Left,
        }
    }
}

/// Ordered quad ladder. `entry[i]` is the local side through which quad
/// `quads[i]` is entered; it exits through `entry[i] + 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strip {
    pub family: Family,
    pub quads: Vec<usize>,
    pub entry: Vec<u8>,
    pub closed: bool,
}

impl Strip {
    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    /// Rungs in order: `len + 1` for open strips, `len` for loops.
    pub fn rungs(&self, mesh: &SdqMesh) -> Vec<Rung> {
        let mut out = Vec::with_capacity(self.len() + 1);
        for (i, (&q, &e)) in self.quads.iter().zip(&self.entry).enumerate() {
            let qv = mesh.quad(q);
            let e = e as usize;
            if i == 0 {
                out.push(Rung { edge: mesh.quad_edges(q)[e], from: qv[e], to: qv[(e + 1) % 4] });
            }
            let last = i + 1 == self.len();
            if !(last && self.closed) {
                out.push(Rung {
                    edge: mesh.quad_edges(q)[(e + 2) % 4],
                    from: qv[(e + 3) % 4],
                    to: qv[(e + 2) % 4],
                });
            }
        }
        out
    }

    /// Rail edges, one per quad, in strip order.
    pub fn rail_edges(&self, mesh: &SdqMesh, side: RailSide) -> Vec<usize> {
        let off = match side {
            RailSide::Left => 3,
            RailSide::Right => 1,
        };
        self.quads
            .iter()
            .zip(&self.entry)
            .map(|(&q, &e)| mesh.quad_edges(q)[(e as usize + off) % 4])
            .collect()
    }

    /// Rail vertices in strip order (the rung endpoints on that side).
    pub fn rail_vertices(&self, mesh: &SdqMesh, side: RailSide) -> Vec<usize> {
        self.rungs(mesh)
            .iter()
            .map(|r| match side {
                RailSide::Left => r.from,
                RailSide::Right => r.to,
            })
            .collect()
    }

    pub fn area(&self, mesh: &SdqMesh) -> f64 {
        self.quads.iter().map(|&q| mesh.quad_area(q)).sum()
    }

    /// Per-quad print direction when this strip is crossed by the other
    /// family's layers: the mean of the quad's two rail edges, oriented along
    /// the strip. Those rail edges are rungs of the crossing strips.
    pub fn crossing_directions(&self, mesh: &SdqMesh) -> Vec<Vec3> {
        let rungs = self.rungs(mesh);
        (0..self.len())
            .map(|i| {
                let a = rungs[i];
                let b = rungs[(i + 1) % rungs.len()];
                let left = mesh.position(b.from) - mesh.position(a.from);
                let right = mesh.position(b.to) - mesh.position(a.to);
                left + right
            })
            .collect()
    }
}

/// All strips of one family.
#[derive(Debug, Clone)]
pub struct StripNetwork {
    pub family: Family,
    pub strips: Vec<Strip>,
    /// Strip index of every quad.
    pub quad_strip: Vec<usize>,
    /// Position of every quad inside its strip.
    pub quad_pos: Vec<usize>,
}

impl StripNetwork {
    pub fn strip_of(&self, q: usize) -> &Strip {
        &self.strips[self.quad_strip[q]]
    }
}

/// Sides of `q` that are rungs for `family`, lowest first.
pub fn rung_sides(mesh: &SdqMesh, q: usize, family: Family) -> [u8; 2] {
    let e = mesh.quad_edges(q);
    if mesh.label(e[0]) != family {
        [0, 2]
    } else {
        [1, 3]
    }
}

/// Walks a strip from quad `q` entered through side `entry` while `accept`
/// allows crossing a rung edge into the next quad.
pub(crate) fn walk_strip(
    mesh: &SdqMesh,
    family: Family,
    q: usize,
    accept: &dyn Fn(usize, usize, usize) -> bool,
) -> Strip {
    let first_side = rung_sides(mesh, q, family)[0];
    // walk backwards through the low rung side to find an end
    let mut cur = q;
    let mut out_side = first_side;
    let mut closed = false;
    loop {
        let e = mesh.quad_edges(cur)[out_side as usize];
        match mesh.neighbor_across(cur, out_side) {
            Some((q2, s2)) if accept(e, cur, q2) => {
                if q2 == q {
                    closed = true;
                    break;
                }
                cur = q2;
                out_side = (s2 + 2) % 4;
            }
            _ => break,
        }
    }
    let (start, start_entry) = if closed { (q, first_side) } else { (cur, out_side) };

    let mut quads = vec![start];
    let mut entry = vec![start_entry];
    let mut cur = start;
    let mut side = (start_entry + 2) % 4;
    loop {
        let e = mesh.quad_edges(cur)[side as usize];
        match mesh.neighbor_across(cur, side) {
            Some((q2, s2)) if accept(e, cur, q2) && q2 != start => {
                quads.push(q2);
                entry.push(s2);
                cur = q2;
                side = (s2 + 2) % 4;
            }
            _ => break,
        }
    }
    Strip { family, quads, entry, closed }
}

/// Traces the maximal strips of `family`, ordered by their lowest quad.
pub fn trace_strips(mesh: &SdqMesh, family: Family) -> StripNetwork {
    trace_restricted(mesh, family, &|_, _, _| true, None)
}

/// Traces strips over a quad subset, crossing only rungs accepted by `accept`.
pub(crate) fn trace_restricted(
    mesh: &SdqMesh,
    family: Family,
    accept: &dyn Fn(usize, usize, usize) -> bool,
    subset: Option<&[usize]>,
) -> StripNetwork {
    let nq = mesh.num_quads();
    let mut quad_strip = vec![usize::MAX; nq];
    let mut quad_pos = vec![usize::MAX; nq];
    let mut strips = Vec::new();
    let all: Vec<usize>;
    let order: &[usize] = match subset {
        Some(s) => s,
        None => {
            all = (0..nq).collect();
            &all
        }
    };
    for &q in order {
        if quad_strip[q] != usize::MAX {
            continue;
        }
        let strip = walk_strip(mesh, family, q, accept);
        for (i, &sq) in strip.quads.iter().enumerate() {
            quad_strip[sq] = strips.len();
            quad_pos[sq] = i;
        }
        strips.push(strip);
    }
    StripNetwork { family, strips, quad_strip, quad_pos }
}

/// Total unsigned turning of a direction sequence.
pub fn total_turning(directions: &[Vec3]) -> Result<f64> {
    for (i, d) in directions.iter().enumerate() {
        if d.norm() == 0.0 {
            return Err(Error::DegenerateRung(i));
        }
    }
    Ok(directions
        .windows(2)
        .map(|w| crate::geom::angle_between(&w[0], &w[1]))
        .sum())
}
