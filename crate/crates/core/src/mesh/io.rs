use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Family, SdqMesh};
use crate::error::{Error, Result};

/// On-disk mesh document. Quads are read as plain lists so that non-quad
/// faces can be reported with their index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshFile {
    #[serde(default = "mm")]
    pub units: String,
    pub vertices: Vec<[f64; 3]>,
    pub quads: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_labels: Option<EdgeLabels>,
}

fn mm() -> String {
    "mm".to_string()
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EdgeLabels {
    #[serde(rename = "U", default)]
    pub u: Vec<[usize; 2]>,
    #[serde(rename = "V", default)]
    pub v: Vec<[usize; 2]>,
}

impl MeshFile {
    pub fn into_mesh(self) -> Result<SdqMesh> {
        if self.units != "mm" {
            return Err(Error::Parse(format!("unsupported units {:?}", self.units)));
        }
        let mut quads = Vec::with_capacity(self.quads.len());
        for (i, q) in self.quads.iter().enumerate() {
            if q.len() != 4 {
                return Err(Error::NonQuadFace(i));
            }
            quads.push([q[0], q[1], q[2], q[3]]);
        }
        let labels = self.edge_labels.map(|l| {
            let mut map = HashMap::new();
            for (fam, list) in [(Family::U, l.u), (Family::V, l.v)] {
                for [a, b] in list {
                    map.insert((a.min(b), a.max(b)), fam);
                }
            }
            map
        });
        SdqMesh::new(self.vertices, quads, labels)
    }
}

/// Parses a mesh document from JSON text.
pub fn mesh_from_json(text: &str) -> Result<SdqMesh> {
    let file: MeshFile = serde_json::from_str(text)?;
    file.into_mesh()
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<SdqMesh> {
    mesh_from_json(&std::fs::read_to_string(path)?)
}

/// Serializes with six decimals per coordinate and explicit labels, one
/// vertex / quad / edge per line.
pub fn mesh_to_json(mesh: &SdqMesh) -> String {
    let mut s = String::from("{\n  \"units\": \"mm\",\n  \"vertices\": [");
    for (i, p) in mesh.vertices().iter().enumerate() {
        let sep = if i == 0 { "\n" } else { ",\n" };
        let _ = write!(s, "{sep}    [{:.6}, {:.6}, {:.6}]", p.x, p.y, p.z);
    }
    s.push_str("\n  ],\n  \"quads\": [");
    for (i, q) in mesh.quads().iter().enumerate() {
        let sep = if i == 0 { "\n" } else { ",\n" };
        let _ = write!(s, "{sep}    [{}, {}, {}, {}]", q[0], q[1], q[2], q[3]);
    }
    s.push_str("\n  ],\n  \"edge_labels\": {");
    for (fi, fam) in Family::both().into_iter().enumerate() {
        let _ = write!(s, "{}\n    \"{fam}\": [", if fi == 0 { "" } else { "," });
        let mut first = true;
        for e in 0..mesh.num_edges() {
            if mesh.label(e) != fam {
                continue;
            }
            let [a, b] = mesh.edge(e);
            let _ = write!(s, "{}[{a}, {b}]", if first { "" } else { ", " });
            first = false;
        }
        s.push(']');
    }
    s.push_str("\n  }\n}\n");
    s
}

pub fn write_mesh(mesh: &SdqMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, mesh_to_json(mesh))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testmesh;

    #[test]
    fn triangle_face_is_reported() {
        let text = r#"{"units":"mm","vertices":[[0,0,0],[1,0,0],[1,1,0],[0,1,0],[2,0,0]],
            "quads":[[0,1,2,3],[1,4,2]]}"#;
        let err = mesh_from_json(text).unwrap_err();
        assert_eq!(err.to_string(), "non-quad face at index 1");
    }

    #[test]
    fn labels_are_read_back() {
        let m = testmesh::grid(2, 3, 10.0).unwrap();
        let text = mesh_to_json(&m);
        let back = mesh_from_json(&text).unwrap();
        assert_eq!(back.labels(), m.labels());
        assert_eq!(mesh_to_json(&back), text);
    }

    #[test]
    fn labels_contradicting_quads_are_rejected() {
        let text = r#"{"vertices":[[0,0,0],[1,0,0],[1,1,0],[0,1,0]],"quads":[[0,1,2,3]],
            "edge_labels":{"U":[[0,1],[1,2]],"V":[[2,3],[0,3]]}}"#;
        assert!(matches!(mesh_from_json(text), Err(Error::BadLabels(_))));
    }

    #[test]
    fn garbage_is_a_parse_error() {
        assert!(matches!(mesh_from_json("{"), Err(Error::Parse(_))));
    }
}
