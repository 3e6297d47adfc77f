//! Singularity cuts, handle cuts and branch splits.

use std::collections::BTreeSet;

use super::patch::{network_patches, strip_structure, Patch};
use super::region::{straight_ray, Region};
use super::registry::{Cut, CutOrigin, CutRegistry, Residual, Truncation};
use crate::error::{Error, Result};
use crate::mesh::{Family, SdqMesh};
use crate::singularities::{separatrices_of, Separatrix, Singularity, SingularityKind};

/// Adds the singularity cuts of `network` and returns its patches.
pub fn topological_partition(
    mesh: &SdqMesh,
    singularities: &[Singularity],
    census: &[Separatrix],
    network: Family,
    dq: usize,
    registry: &mut CutRegistry,
) -> Vec<Patch> {
    for s in singularities {
        let seps = separatrices_of(census, s.vertex);
        match s.kind {
            SingularityKind::D2 => d2_cuts(mesh, s.vertex, &seps, network, dq, registry),
            SingularityKind::D6 | SingularityKind::Other => {
                for sep in seps.iter().filter(|p| p.label == network) {
                    let known = registry.edges(network);
                    if sep.edges.iter().all(|e| known.contains(e)) {
                        continue;
                    }
                    registry.add(Cut { network, edges: sep.edges.clone(), origin: CutOrigin::TopologicalD6, truncation: None });
                }
            }
        }
    }
    network_patches(mesh, registry, network)
}

fn d2_cuts(mesh: &SdqMesh, vertex: usize, seps: &[Separatrix], network: Family, dq: usize, registry: &mut CutRegistry) {
    if let Some(par) = seps.iter().find(|p| p.label == network) {
        registry.add(Cut { network, edges: par.edges.clone(), origin: CutOrigin::TopologicalD2Parallel, truncation: None });
    }
    let Some(trans) = seps.iter().find(|p| p.label != network) else { return };
    if trans.edges.len() <= dq {
        if trans.edges.len() < dq {
            registry.warn(format!(
                "d_q = {dq} exceeds the {}-edge separatrix at vertex {vertex}; {network} cut ends at its terminal",
                trans.edges.len()
            ));
        }
        registry.add(Cut { network, edges: trans.edges.clone(), origin: CutOrigin::TopologicalD2Transversal, truncation: None });
        registry.add_residual(Residual { singularity: vertex, edges: trans.edges.clone() });
        return;
    }
    // keep the first dq edges, then turn onto the network's own label at
    // the truncation vertex and run until something stops the walk
    let mut edges: Vec<usize> = trans.edges[..dq].to_vec();
    let w = trans.vertices[dq];
    let mut turn: Vec<usize> =
        mesh.vertex_edges(w).iter().copied().filter(|&e| mesh.label(e) == network && !trans.edges.contains(&e)).collect();
    turn.sort_unstable();
    if let Some(&first) = turn.first() {
        let cut_vertices: BTreeSet<usize> = registry.edges(network).iter().flat_map(|&e| mesh.edge(e)).collect();
        let stop = |v: usize| mesh.is_boundary_vertex(v) || mesh.valence(v) != 4 || cut_vertices.contains(&v);
        edges.push(first);
        edges.extend(straight_ray(mesh, mesh.other_vertex(first, w), first, &stop));
    }
    registry.add(Cut {
        network,
        edges,
        origin: CutOrigin::TopologicalD2Transversal,
        truncation: Some(Truncation::for_network(network)),
    });
    registry.add_residual(Residual { singularity: vertex, edges: trans.edges[..dq].to_vec() });
}

/// Cuts one handle of a non-disk patch. Returns false if it is already a disk.
pub fn ensure_simply_connected(mesh: &SdqMesh, registry: &mut CutRegistry, patch: &Patch) -> Result<bool> {
    let network = patch.network;
    let cuts = registry.edges(network).clone();
    let region = Region::new(mesh, &cuts, patch.quads.clone());
    if region.euler() == 1 {
        return Ok(false);
    }
    let before = region.handle_measure();
    let bverts = region.boundary_vertices();
    let candidates: Vec<usize> =
        if bverts.is_empty() { region.vertices().into_iter().collect() } else { bverts.iter().copied().collect() };
    for v in candidates {
        let mut starts: Vec<usize> = mesh.vertex_edges(v).iter().copied().filter(|&e| region.glued(e)).collect();
        starts.sort_by_key(|&e| (mesh.label(e) != network, e));
        for e in starts {
            let stop = |x: usize| x == v || bverts.contains(&x);
            let mut path = vec![e];
            path.extend(straight_ray(mesh, mesh.other_vertex(e, v), e, &stop));
            if registry.collides(network, &path) {
                continue;
            }
            let mut trial = cuts.clone();
            trial.extend(path.iter().copied());
            if Region::new(mesh, &trial, patch.quads.clone()).handle_measure() < before {
                log::debug!("handle cut for {network} patch {} from vertex {v}", patch.id);
                registry.add(Cut { network, edges: path, origin: CutOrigin::Handle, truncation: None });
                return Ok(true);
            }
        }
    }
    Err(Error::HandleOverlap(patch.id))
}

/// Splits a patch whose strips do not stack as a path. Returns false if the
/// strip graph already is one.
pub fn split_branches(mesh: &SdqMesh, registry: &mut CutRegistry, patch: &Patch) -> Result<bool> {
    let network = patch.network;
    let cuts = registry.edges(network).clone();
    let region = Region::new(mesh, &cuts, patch.quads.clone());
    let (_, _, g) = strip_structure(&region, network);
    if g.path().is_some() {
        return Ok(false);
    }
    let mut options: Vec<Vec<usize>> = Vec::new();
    if let Some((s, side)) = g.branch() {
        let touching = g.touching(s, side);
        if touching.contains(&s) {
            options.push(g.shared(s, s).to_vec());
        }
        let mut others: Vec<usize> = touching.iter().copied().filter(|&t| t != s).collect();
        others.sort_by_key(|&t| g.shared(s, t).first().copied());
        options.extend(others.into_iter().map(|t| g.shared(s, t).to_vec()));
    } else {
        // a cycle or a node of degree > 2 without a crowded side
        for s in 0..g.nodes() {
            let n = g.neighbors(s);
            if n.len() >= 2 {
                let mut n = n;
                n.sort_by_key(|&t| g.shared(s, t).first().copied());
                options.extend(n.into_iter().map(|t| g.shared(s, t).to_vec()));
                break;
            }
        }
    }
    for edges in options {
        if edges.is_empty() || registry.collides(network, &edges) {
            continue;
        }
        log::debug!("branch split of {network} patch {} along {} rail edges", patch.id, edges.len());
        registry.add(Cut { network, edges, origin: CutOrigin::Branch, truncation: None });
        return Ok(true);
    }
    Err(Error::NoAdmissibleCut(patch.id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singularities::{find_singularities, separatrix_census};
    use crate::testmesh;

    fn topo(mesh: &SdqMesh, dq: usize) -> CutRegistry {
        let s = find_singularities(mesh);
        let c = separatrix_census(mesh);
        let mut reg = CutRegistry::new();
        for f in Family::both() {
            topological_partition(mesh, &s, &c, f, dq, &mut reg);
        }
        reg
    }

    #[test]
    fn grid_has_no_topological_cuts() {
        let m = testmesh::grid(4, 4, 10.0).unwrap();
        let reg = topo(&m, 2);
        assert!(reg.cuts().is_empty());
        assert_eq!(network_patches(&m, &reg, Family::U).len(), 1);
    }

    #[test]
    fn d6_cuts_match_component_oracle() {
        let m = testmesh::d6(3, 60.0, 0.0).unwrap();
        let reg = topo(&m, 2);
        for f in Family::both() {
            let cut: BTreeSet<usize> = reg.edges(f).clone();
            // flood fill oracle over quads across uncut interior edges
            let mut comp = vec![usize::MAX; m.num_quads()];
            let mut count = 0;
            for q in 0..m.num_quads() {
                if comp[q] != usize::MAX {
                    continue;
                }
                let mut stack = vec![q];
                comp[q] = count;
                while let Some(x) = stack.pop() {
                    for (s, e) in m.quad_edges(x).into_iter().enumerate() {
                        if cut.contains(&e) {
                            continue;
                        }
                        if let Some((y, _)) = m.neighbor_across(x, s as u8) {
                            if comp[y] == usize::MAX {
                                comp[y] = count;
                                stack.push(y);
                            }
                        }
                    }
                }
                count += 1;
            }
            assert_eq!(network_patches(&m, &reg, f).len(), count);
            assert_eq!(reg.cuts().iter().filter(|c| c.network == f).count(), 3);
        }
        assert!(reg.overlap().is_empty());
    }

    #[test]
    fn d2_overlap_is_the_residual() {
        let m = testmesh::d2(5, 60.0, 0.0).unwrap();
        let reg = topo(&m, 2);
        let overlap = reg.overlap();
        assert_eq!(overlap.len(), 4);
        assert_eq!(overlap, reg.residual_edges());
        for r in reg.residuals() {
            assert_eq!(r.edges.len(), 2);
            // the residual starts at the singularity
            assert!(m.edge(r.edges[0]).contains(&0));
        }
    }

    #[test]
    fn cylinder_networks_each_need_one_handle_cut() {
        let m = testmesh::cylinder(8, 4, 30.0, 40.0).unwrap();
        let mut reg = CutRegistry::new();
        for f in Family::both() {
            let p = network_patches(&m, &reg, f);
            assert!(ensure_simply_connected(&m, &mut reg, &p[0]).unwrap());
            let p = network_patches(&m, &reg, f);
            assert_eq!(p.len(), 1);
            assert!(p[0].is_valid());
            assert!(!ensure_simply_connected(&m, &mut reg, &p[0]).unwrap());
        }
        assert!(reg.overlap().is_empty());
    }

    #[test]
    fn torus_needs_two_cuts_per_network() {
        let m = testmesh::torus(8, 8, 60.0, 20.0).unwrap();
        let mut reg = CutRegistry::new();
        for f in Family::both() {
            let mut n = 0;
            loop {
                let p = network_patches(&m, &reg, f);
                let Some(bad) = p.iter().find(|p| !p.is_simply_connected()) else { break };
                ensure_simply_connected(&m, &mut reg, bad).unwrap();
                n += 1;
            }
            assert_eq!(n, 2);
            assert!(network_patches(&m, &reg, f).iter().all(|p| p.euler == 1));
        }
        assert!(reg.overlap().is_empty());
    }

    #[test]
    fn notch_branch_is_split() {
        // 4 x 5 grid with the middle top quad removed: the top row splits in
        // two strips that both sit on row 2
        let g = testmesh::grid(4, 5, 10.0).unwrap();
        let verts: Vec<[f64; 3]> = g.vertices().iter().map(crate::geom::arr).collect();
        let quads: Vec<[usize; 4]> = g.quads().iter().enumerate().filter(|(i, _)| *i != 17).map(|(_, q)| *q).collect();
        let m = SdqMesh::new(verts, quads, None).unwrap();
        let mut reg = CutRegistry::new();
        let p = network_patches(&m, &reg, Family::U);
        assert_eq!(p.len(), 1);
        assert!(p[0].order.is_none());
        assert!(split_branches(&m, &mut reg, &p[0]).unwrap());
        let p = network_patches(&m, &reg, Family::U);
        assert_eq!(p.len(), 2);
        assert!(p.iter().all(|p| p.is_valid()));
    }
}
