//! Fabrication summary in the prototype-table layout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Family, SdqMesh};
use crate::partition::Residual;
use crate::pathgen::PieceStats;

pub const COLUMNS: [&str; 8] = [
    "Model",
    "Dimensions (cm)",
    "#Sings",
    "#Geometric cuts",
    "#Pieces U",
    "#Pieces V",
    "Total print time (hrs)",
    "% Sacrificial support",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub singularity: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FabricationReport {
    pub model: String,
    pub dimensions_cm: [f64; 3],
    pub sings: usize,
    pub geometric_cuts: usize,
    pub pieces_u: usize,
    pub pieces_v: usize,
    pub hours: f64,
    pub support_percent: f64,
    #[serde(default)]
    pub residual_overlap: Vec<ResidualEntry>,
    #[serde(default)]
    pub totals: PieceStats,
}

/// One decimal, with a trailing ".0" dropped.
fn short(x: f64) -> String {
    let s = format!("{x:.1}");
    match s.strip_suffix(".0") {
        Some(t) => t.to_string(),
        None => s,
    }
}

fn number<T: std::str::FromStr>(cell: &str, what: &str) -> Result<T> {
    cell.trim().parse().map_err(|_| Error::Parse(format!("bad {what}: {cell:?}")))
}

impl FabricationReport {
    pub fn cells(&self) -> [String; 8] {
        let d = self.dimensions_cm;
        [
            self.model.clone(),
            format!("{} x {} x {}", short(d[0]), short(d[1]), short(d[2])),
            self.sings.to_string(),
            self.geometric_cuts.to_string(),
            self.pieces_u.to_string(),
            self.pieces_v.to_string(),
            short(self.hours),
            format!("{:.0}%", self.support_percent),
        ]
    }

    pub fn to_row(&self) -> String {
        self.cells().join(" | ")
    }

    pub fn parse_row(row: &str) -> Result<FabricationReport> {
        let cells: Vec<&str> = row.split('|').map(str::trim).collect();
        if cells.len() != 8 {
            return Err(Error::Parse(format!("expected 8 columns, got {}: {row:?}", cells.len())));
        }
        let dims: Vec<f64> =
            cells[1].split('x').map(|c| number(c, "dimension")).collect::<Result<_>>()?;
        let dimensions_cm: [f64; 3] =
            dims.try_into().map_err(|_| Error::Parse(format!("bad dimensions: {:?}", cells[1])))?;
        let pct = cells[7].strip_suffix('%').ok_or_else(|| Error::Parse(format!("bad percentage: {:?}", cells[7])))?;
        Ok(FabricationReport {
            model: cells[0].to_string(),
            dimensions_cm,
            sings: number(cells[2], "singularity count")?,
            geometric_cuts: number(cells[3], "cut count")?,
            pieces_u: number(cells[4], "piece count")?,
            pieces_v: number(cells[5], "piece count")?,
            hours: number(cells[6], "print time")?,
            support_percent: number(pct, "percentage")?,
            ..Default::default()
        })
    }
}

/// Header row, rule and one row per report, columns padded to align.
pub fn render_table(reports: &[FabricationReport]) -> String {
    let rows: Vec<[String; 8]> = reports.iter().map(|r| r.cells()).collect();
    let mut width = COLUMNS.map(str::len);
    for r in &rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(width).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join(" | ").trim_end().to_string()
    };
    let mut out = line(COLUMNS.to_vec());
    out.push('\n');
    out.push_str(&width.map(|w| "-".repeat(w)).join("-|-"));
    out.push('\n');
    for r in &rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

/// Reads the rows back from `render_table` output; `#` lines are skipped.
pub fn parse_table(text: &str) -> Result<Vec<FabricationReport>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter(|l| !l.starts_with("Model ") && !l.starts_with('-'))
        .map(FabricationReport::parse_row)
        .collect()
}

/// Axis-aligned extents of the mesh, in cm.
pub fn dimensions_cm(mesh: &SdqMesh) -> [f64; 3] {
    match crate::geom::aabb(mesh.vertices().iter()) {
        Some((lo, hi)) => {
            let d = (hi - lo) / 10.0;
            [d.x, d.y, d.z]
        }
        None => [0.0; 3],
    }
}

pub fn fabrication_report(
    model: &str,
    mesh: &SdqMesh,
    sings: usize,
    geometric_cuts: usize,
    residuals: &[Residual],
    pieces: &[(Family, PieceStats)],
) -> FabricationReport {
    let mut t = PieceStats::default();
    for (_, s) in pieces {
        t.wall_length += s.wall_length;
        t.support_length += s.support_length;
        t.wall_volume += s.wall_volume;
        t.support_volume += s.support_volume;
        t.time += s.time;
    }
    let total = t.wall_volume + t.support_volume;
    FabricationReport {
        model: model.to_string(),
        dimensions_cm: dimensions_cm(mesh),
        sings,
        geometric_cuts,
        pieces_u: pieces.iter().filter(|p| p.0 == Family::U).count(),
        pieces_v: pieces.iter().filter(|p| p.0 == Family::V).count(),
        hours: t.time / 3600.0,
        support_percent: if total > 0.0 { 100.0 * t.support_volume / total } else { 0.0 },
        residual_overlap: residuals
            .iter()
            .map(|r| ResidualEntry { singularity: r.singularity, edges: r.edges.len() })
            .collect(),
        totals: t,
    }
}

/// Text report: basis note, table, residual overlaps.
pub fn report_text(r: &FabricationReport, speed_wall: f64, speed_support: f64) -> String {
    let mut out = String::new();
    out.push_str("# support share is by extruded volume (flow integrated over path length)\n");
    out.push_str(&format!(
        "# print time covers extrusion motion only: walls at {} mm/s, support at {} mm/s; travel and manual steps excluded\n",
        short(speed_wall),
        short(speed_support)
    ));
    out.push_str(&render_table(std::slice::from_ref(r)));
    for e in &r.residual_overlap {
        out.push_str(&format!("# residual overlap: singularity {} edges {}\n", e.singularity, e.edges));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_support_is_zero_percent() {
        let m = crate::testmesh::grid(2, 2, 10.0).unwrap();
        let s = PieceStats { wall_length: 100.0, wall_volume: 50.0, time: 10.0, ..Default::default() };
        let r = fabrication_report("g", &m, 0, 0, &[], &[(Family::U, s)]);
        assert_eq!(r.support_percent, 0.0);
        assert_eq!(r.dimensions_cm, [2.0, 2.0, 0.0]);
        assert_eq!(r.to_row(), "g | 2 x 2 x 0 | 0 | 0 | 1 | 0 | 0 | 0%");
    }

    #[test]
    fn aligned_table_reads_back() {
        let a = FabricationReport::parse_row("A | 1 x 2 x 3 | 0 | 1 | 2 | 3 | 4.5 | 6%").unwrap();
        let b = FabricationReport::parse_row("Longer name | 10 x 20 x 30.5 | 1 | 12 | 7 | 11 | 51.5 | 49%").unwrap();
        let t = render_table(&[a.clone(), b.clone()]);
        assert_eq!(parse_table(&t).unwrap(), vec![a, b]);
    }

    #[test]
    fn malformed_rows() {
        assert!(FabricationReport::parse_row("a | b").is_err());
        assert!(FabricationReport::parse_row("A | 1 x 2 | 0 | 1 | 2 | 3 | 4 | 6%").is_err());
        assert!(FabricationReport::parse_row("A | 1 x 2 x 3 | 0 | 1 | 2 | 3 | 4 | 6").is_err());
    }
}
