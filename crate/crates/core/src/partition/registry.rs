use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::mesh::Family;

/// Why a cut was placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutOrigin {
    TopologicalD6,
    TopologicalD2Parallel,
    TopologicalD2Transversal,
    Handle,
    /// Split of a patch whose strip graph branches.
    Branch,
    Size,
    Angle,
}

impl CutOrigin {
    pub fn is_geometric(self) -> bool {
        matches!(self, CutOrigin::Size | CutOrigin::Angle)
    }
}

/// Marks the interrupting cut placed `d_q` edges from a D2 singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truncation {
    #[serde(rename = "C_U")]
    CU,
    #[serde(rename = "C_V")]
    CV,
}

impl Truncation {
    pub fn for_network(f: Family) -> Truncation {
        match f {
            Family::U => Truncation::CU,
            Family::V => Truncation::CV,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub network: Family,
    pub edges: Vec<usize>,
    pub origin: CutOrigin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
}

/// Shared edge run left between the two networks' cuts near a D2 singularity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub singularity: usize,
    pub edges: Vec<usize>,
}

/// Cut edges of both networks. Edges already used by one network are
/// refused to the other except for registered D2 residuals.
#[derive(Debug, Clone, Default)]
pub struct CutRegistry {
    cuts: Vec<Cut>,
    edges: [BTreeSet<usize>; 2],
    residuals: Vec<Residual>,
    pub warnings: Vec<String>,
}

impl CutRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn edges(&self, network: Family) -> &BTreeSet<usize> {
        &self.edges[network.index()]
    }

    pub fn residuals(&self) -> &[Residual] {
        &self.residuals
    }

    /// True if any edge is already cut by the other network.
    pub fn collides(&self, network: Family, edges: &[usize]) -> bool {
        let other = &self.edges[network.other().index()];
        edges.iter().any(|e| other.contains(e))
    }

    pub fn add(&mut self, cut: Cut) -> usize {
        self.edges[cut.network.index()].extend(cut.edges.iter().copied());
        self.cuts.push(cut);
        self.cuts.len() - 1
    }

    pub fn add_residual(&mut self, residual: Residual) {
        self.residuals.push(residual);
    }

    /// Edges cut on both networks.
    pub fn overlap(&self) -> BTreeSet<usize> {
        self.edges[0].intersection(&self.edges[1]).copied().collect()
    }

    pub fn residual_edges(&self) -> BTreeSet<usize> {
        self.residuals.iter().flat_map(|r| r.edges.iter().copied()).collect()
    }

    pub fn geometric_cut_count(&self) -> usize {
        self.cuts.iter().filter(|c| c.origin.is_geometric()).count()
    }

    pub fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.warnings.push(msg);
    }
}
