//! The `smg-1` graph file format and the OFF/SVG/CSV exporters.
//!
//! One structured-text (JSON) format with a fixed key order and floats
//! printed with 17 significant digits, so write -> read -> write is
//! byte-identical and golden files diff cleanly in review.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::discharging::ChargeLedger;
use crate::embedding::{trace_faces, EmbeddedGraph};
use crate::error::Error;
use crate::sphgeom::{tangent_frame, Arc, UnitVector};
use crate::Result;

/// Format tag expected in every graph file.
pub const FORMAT_TAG: &str = "smg-1";

/// Optional provenance block carried by a graph file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GraphMetadata {
    pub name: Option<String>,
    pub residual_max: Option<f64>,
    pub generator: Option<String>,
}

impl GraphMetadata {
    pub fn named(name: &str) -> Self {
        Self {
            name: Some(name.to_string()),
            ..Self::default()
        }
    }

    fn is_empty(&self) -> bool {
        self.name.is_none() && self.residual_max.is_none() && self.generator.is_none()
    }
}

/// 17 significant digits: enough to round-trip any f64 exactly.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// Serializes a graph in the canonical `smg-1` layout.
pub fn graph_to_string(g: &EmbeddedGraph, meta: &GraphMetadata) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"format\": \"{FORMAT_TAG}\",");
    let _ = writeln!(s, "  \"lambda\": {},", fmt_f64(g.lambda()));
    s.push_str("  \"vertices\": [\n");
    for (k, v) in g.vertices().iter().enumerate() {
        let sep = if k + 1 == g.vertex_count() { "" } else { "," };
        let _ = writeln!(
            s,
            "    [{}, {}, {}]{sep}",
            fmt_f64(v.x()),
            fmt_f64(v.y()),
            fmt_f64(v.z())
        );
    }
    s.push_str("  ],\n");
    s.push_str("  \"edges\": [\n");
    for (k, (i, j)) in g.edges().iter().enumerate() {
        let sep = if k + 1 == g.edge_count() { "" } else { "," };
        let _ = writeln!(s, "    [{i}, {j}]{sep}");
    }
    if meta.is_empty() {
        s.push_str("  ]\n");
    } else {
        s.push_str("  ],\n");
        s.push_str("  \"metadata\": {\n");
        let mut fields = Vec::new();
        if let Some(name) = &meta.name {
            fields.push(format!("    \"name\": {}", json_string(name)));
        }
        if let Some(r) = meta.residual_max {
            fields.push(format!("    \"residual_max\": {}", fmt_f64(r)));
        }
        if let Some(generator) = &meta.generator {
            fields.push(format!("    \"generator\": {}", json_string(generator)));
        }
        s.push_str(&fields.join(",\n"));
        s.push_str("\n  }\n");
    }
    s.push_str("}\n");
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    format: String,
    lambda: f64,
    vertices: Vec<[f64; 3]>,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    metadata: Option<RawMeta>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeta {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    residual_max: Option<f64>,
    #[serde(default)]
    generator: Option<String>,
}

/// A parsed and validated graph file.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: EmbeddedGraph,
    pub metadata: GraphMetadata,
    /// Non-fatal observations, e.g. renormalized vertices.
    pub warnings: Vec<String>,
}

/// Parses the `smg-1` text format, naming the offending record on failure.
/// Norm drift up to 1e-9 is corrected by renormalization with a warning.
pub fn graph_from_str(text: &str) -> Result<LoadedGraph> {
    let raw: RawFile = serde_json::from_str(text)?;
    if raw.format != FORMAT_TAG {
        return Err(Error::InvalidFile(format!(
            "unsupported format tag {:?}, expected {FORMAT_TAG:?}",
            raw.format
        )));
    }
    let mut warnings = Vec::new();
    let mut vertices = Vec::with_capacity(raw.vertices.len());
    let mut worst_drift = 0.0_f64;
    for (k, [x, y, z]) in raw.vertices.iter().enumerate() {
        let norm = (x * x + y * y + z * z).sqrt();
        let drift = (norm - 1.0).abs();
        if !norm.is_finite() || drift > 1e-9 {
            return Err(Error::InvalidFile(format!(
                "vertex {k} has norm {norm}, outside the 1e-9 unit tolerance"
            )));
        }
        worst_drift = worst_drift.max(drift);
        vertices.push(UnitVector::new(*x, *y, *z)?);
    }
    if worst_drift > 1e-12 {
        warnings.push(format!(
            "renormalized vertices with norm drift up to {worst_drift:.3e}"
        ));
    }
    let edges: Vec<(usize, usize)> = raw.edges.iter().map(|&[i, j]| (i, j)).collect();
    let graph = EmbeddedGraph::new(vertices, edges.clone(), raw.lambda)?;
    if graph.edges() != edges.as_slice() {
        warnings.push("edge list was not in canonical order; reordered".to_string());
    }
    let metadata = raw
        .metadata
        .map(|m| GraphMetadata {
            name: m.name,
            residual_max: m.residual_max,
            generator: m.generator,
        })
        .unwrap_or_default();
    Ok(LoadedGraph {
        graph,
        metadata,
        warnings,
    })
}

/// Reads a graph file from disk.
pub fn read_graph(path: &Path) -> Result<LoadedGraph> {
    let text = std::fs::read_to_string(path)?;
    graph_from_str(&text)
}

/// Writes a graph file; the content lands under the final name only as a
/// whole, never partially.
pub fn write_graph(path: &Path, g: &EmbeddedGraph, meta: &GraphMetadata) -> Result<()> {
    let text = graph_to_string(g, meta);
    write_atomic(path, &text)
}

/// Write-to-sibling-then-rename, so a failed write leaves no partial file.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Export formats for [`export`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Off,
    Svg,
    Csv,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "off" => Ok(ExportFormat::Off),
            "svg" => Ok(ExportFormat::Svg),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(format!("unknown export format '{other}' (off, svg or csv)")),
        }
    }
}

/// Renders the graph in the requested format; `view` sets the SVG
/// projection axis and is ignored otherwise.
pub fn export(g: &EmbeddedGraph, format: ExportFormat, view: &UnitVector) -> Result<String> {
    match format {
        ExportFormat::Off => export_off(g),
        ExportFormat::Svg => export_svg(g, view),
        ExportFormat::Csv => Ok(export_csv(g)),
    }
}

/// OFF polygon mesh: vertices plus the traced face walks.
pub fn export_off(g: &EmbeddedGraph) -> Result<String> {
    let fs = trace_faces(g)?;
    let mut s = String::from("OFF\n");
    let _ = writeln!(
        s,
        "{} {} {}",
        g.vertex_count(),
        fs.face_count(),
        g.edge_count()
    );
    for v in g.vertices() {
        let _ = writeln!(s, "{} {} {}", fmt_f64(v.x()), fmt_f64(v.y()), fmt_f64(v.z()));
    }
    for f in &fs.faces {
        let _ = write!(s, "{}", f.degree());
        for v in &f.walk {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    Ok(s)
}

/// Edge list with measured lengths, header `i,j,length_rad`.
pub fn export_csv(g: &EmbeddedGraph) -> String {
    let mut s = String::from("i,j,length_rad\n");
    for &(i, j) in g.edges() {
        let _ = writeln!(s, "{i},{j},{}", fmt_f64(g.edge_length(i, j)));
    }
    s
}

/// Number of straight segments approximating each arc in the SVG output.
const SVG_ARC_SAMPLES: usize = 64;

/// Static orthographic projection along `view`. Each edge becomes one path
/// of 64 sampled segments; arcs whose midpoint lies on the back hemisphere
/// are dashed.
pub fn export_svg(g: &EmbeddedGraph, view: &UnitVector) -> Result<String> {
    let (u, v_axis) = tangent_frame(view);
    let project = |p: &UnitVector| (p.dot(&u), -p.dot(&v_axis));
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"-1.08 -1.08 2.16 2.16\" width=\"720\" height=\"720\">\n",
    );
    s.push_str("  <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"0.004\"/>\n");
    for &(i, j) in g.edges() {
        let arc = Arc::new(g.vertices()[i], g.vertices()[j])?;
        let mid = arc.point_at(arc.length() / 2.0);
        let back = mid.dot(view) < 0.0;
        let mut d = String::new();
        for k in 0..=SVG_ARC_SAMPLES {
            let p = arc.point_at(arc.length() * k as f64 / SVG_ARC_SAMPLES as f64);
            let (x, y) = project(&p);
            let _ = write!(d, "{}{x:.5} {y:.5}", if k == 0 { "M" } else { " L" });
        }
        if back {
            let _ = writeln!(
                s,
                "  <path d=\"{d}\" fill=\"none\" stroke=\"#9999aa\" stroke-width=\"0.004\" stroke-dasharray=\"0.018 0.014\"/>"
            );
        } else {
            let _ = writeln!(
                s,
                "  <path d=\"{d}\" fill=\"none\" stroke=\"#333344\" stroke-width=\"0.007\"/>"
            );
        }
    }
    for p in g.vertices() {
        let (x, y) = project(p);
        let front = p.dot(view) >= 0.0;
        let _ = writeln!(
            s,
            "  <circle cx=\"{x:.5}\" cy=\"{y:.5}\" r=\"0.014\" fill=\"{}\"/>",
            if front { "#222233" } else { "#aaaabb" }
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Human-readable charge ledger summary.
pub fn ledger_text(ledger: &ChargeLedger) -> String {
    let mut s = String::from("charge ledger\n");
    let _ = writeln!(s, "  total initial  {:+.12e}", ledger.total_initial);
    let _ = writeln!(s, "  total final    {:+.12e}", ledger.total_final);
    let f = &ledger.equality_flags;
    let _ = writeln!(
        s,
        "  equality flags: connected={} faces-3-4-5={} angles-in-(pi/3,2pi/3]={} degree-5={}",
        f.connected, f.all_faces_345, f.all_angles_in_interval, f.all_degree_5
    );
    let span = |xs: &[f64]| {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &x in xs {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        (lo, hi)
    };
    let (vlo, vhi) = span(&ledger.vertex_final);
    let (flo, fhi) = span(&ledger.face_final);
    let _ = writeln!(
        s,
        "  {} vertices, finals in [{vlo:+.3e}, {vhi:+.3e}]",
        ledger.vertex_final.len()
    );
    let _ = writeln!(
        s,
        "  {} faces, finals in [{flo:+.3e}, {fhi:+.3e}]",
        ledger.face_final.len()
    );
    let _ = writeln!(s, "  {} transfers", ledger.transfers.len());
    let mut nonzero: Vec<String> = Vec::new();
    for (v, &c) in ledger.vertex_final.iter().enumerate() {
        if c.abs() > 1e-9 {
            nonzero.push(format!("    vertex {v} final {c:+.6e}"));
        }
    }
    for (fi, &c) in ledger.face_final.iter().enumerate() {
        if c.abs() > 1e-9 {
            nonzero.push(format!("    face {fi} final {c:+.6e}"));
        }
    }
    if nonzero.is_empty() {
        s.push_str("  nonzero finals: none\n");
    } else {
        let _ = writeln!(s, "  nonzero finals: {}", nonzero.len());
        for line in nonzero.iter().take(16) {
            let _ = writeln!(s, "{line}");
        }
        if nonzero.len() > 16 {
            let _ = writeln!(s, "    ... and {} more", nonzero.len() - 16);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::icosahedron_graph;

    #[test]
    fn round_trip_is_byte_identical() {
        let g = icosahedron_graph();
        let meta = GraphMetadata {
            name: Some("icosahedron".to_string()),
            residual_max: Some(0.0),
            generator: Some("smg test".to_string()),
        };
        let first = graph_to_string(&g, &meta);
        let loaded = graph_from_str(&first).unwrap();
        assert!(loaded.warnings.is_empty(), "{:?}", loaded.warnings);
        assert_eq!(loaded.metadata, meta);
        let second = graph_to_string(&loaded.graph, &loaded.metadata);
        assert_eq!(first, second);
    }

    #[test]
    fn bad_files_name_the_offense() {
        let loop_file = r#"{"format":"smg-1","lambda":1.0,
            "vertices":[[1.0,0.0,0.0],[0.0,1.0,0.0],[0.0,0.0,1.0],[0.0,0.0,-1.0]],
            "edges":[[3,3]]}"#;
        assert!(matches!(
            graph_from_str(loop_file),
            Err(Error::LoopEdge(3))
        ));

        let lambda_file = r#"{"format":"smg-1","lambda":3.2,
            "vertices":[[1.0,0.0,0.0],[0.0,1.0,0.0]],"edges":[[0,1]]}"#;
        assert!(matches!(
            graph_from_str(lambda_file),
            Err(Error::LambdaOutOfRange(_))
        ));

        let tag_file = r#"{"format":"smg-2","lambda":1.0,"vertices":[],"edges":[]}"#;
        assert!(matches!(graph_from_str(tag_file), Err(Error::InvalidFile(_))));

        let norm_file = r#"{"format":"smg-1","lambda":1.0,
            "vertices":[[2.0,0.0,0.0],[0.0,1.0,0.0]],"edges":[[0,1]]}"#;
        assert!(matches!(graph_from_str(norm_file), Err(Error::InvalidFile(_))));

        let range_file = r#"{"format":"smg-1","lambda":1.0,
            "vertices":[[1.0,0.0,0.0],[0.0,1.0,0.0]],"edges":[[0,5]]}"#;
        assert!(matches!(
            graph_from_str(range_file),
            Err(Error::EdgeOutOfRange { .. })
        ));
    }

    #[test]
    fn garbage_text_is_a_parse_error() {
        assert!(matches!(
            graph_from_str("not json at all"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            graph_from_str("{\"format\": \"smg-1\"}"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn mild_norm_drift_renormalizes_with_warning() {
        let text = r#"{"format":"smg-1","lambda":1.5707963267948966,
            "vertices":[[1.0000000004,0.0,0.0],[0.0,1.0,0.0]],"edges":[[0,1]]}"#;
        let loaded = graph_from_str(text).unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        let v = loaded.graph.vertices()[0];
        assert!((v.x() * v.x() + v.y() * v.y() + v.z() * v.z() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_canonical_edge_order_warns() {
        let text = r#"{"format":"smg-1","lambda":1.5707963267948966,
            "vertices":[[1.0,0.0,0.0],[0.0,1.0,0.0],[0.0,0.0,1.0]],
            "edges":[[1,2],[0,1]]}"#;
        let loaded = graph_from_str(text).unwrap();
        assert!(loaded
            .warnings
            .iter()
            .any(|w| w.contains("canonical order")));
        assert_eq!(loaded.graph.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn off_export_counts() {
        let g = icosahedron_graph();
        let off = export_off(&g).unwrap();
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("12 20 30"));
        assert_eq!(off.lines().count(), 2 + 12 + 20);
    }

    #[test]
    fn csv_export_has_equal_lengths() {
        let g = icosahedron_graph();
        let csv = export_csv(&g);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("i,j,length_rad"));
        let lengths: Vec<f64> = lines
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect();
        assert_eq!(lengths.len(), 30);
        for len in &lengths {
            assert!((len - g.lambda()).abs() < 1e-9);
        }
    }

    #[test]
    fn svg_export_one_path_per_edge() {
        let g = icosahedron_graph();
        let view = UnitVector::new(0.0, 0.0, 1.0).unwrap();
        let svg = export_svg(&g, &view).unwrap();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("<svg"));
        assert_eq!(svg.matches("<path").count(), 30);
        assert!(svg.contains("stroke-dasharray"));
    }
}
