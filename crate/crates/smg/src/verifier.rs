//! Matchstick axiom checks.
//!
//! Every check returns a pass/fail result carrying witnesses for each
//! failure (offending edges, vertex pairs, corners), and strict inequalities
//! are reported with their measured margin rather than a bare boolean. The
//! checks never mutate or repair the input; all pairwise scans are
//! exhaustive, which is fine at the sizes involved (n <= a few hundred).

use std::f64::consts::PI;

use serde::Serialize;

use crate::embedding::{trace_faces, EmbeddedGraph, FaceSet};
use crate::sphgeom::{angular_distance, arc_intersection, Arc, UnitVector};

/// Default tolerance for equality checks, three orders above the polish
/// residuals of the shipped constructions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Which degree requirement to verify and at what tolerance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Profile {
    /// Required degree `k`.
    pub degree: usize,
    /// `false`: require degree >= k. `true`: require exact k-regularity.
    pub exact: bool,
    /// Tolerance in radians for length equalities and strict inequalities.
    pub tol: f64,
}

impl Default for Profile {
    fn default() -> Self {
        Self {
            degree: 5,
            exact: false,
            tol: DEFAULT_TOL,
        }
    }
}

impl Profile {
    pub fn min_degree(k: usize) -> Self {
        Self {
            degree: k,
            exact: false,
            ..Self::default()
        }
    }

    pub fn regular(k: usize) -> Self {
        Self {
            degree: k,
            exact: true,
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Evidence attached to a failed (or informative) check.
#[derive(Clone, Debug, Serialize)]
pub enum Witness {
    /// An edge whose measured length deviates from lambda.
    Edge { i: usize, j: usize, measured: f64 },
    /// An edge whose endpoints are coincident or antipodal.
    DegenerateEdge { i: usize, j: usize, separation: f64 },
    /// A pair of edges that meet outside a shared endpoint.
    EdgePair {
        first: (usize, usize),
        second: (usize, usize),
        kind: String,
        point: Option<UnitVector>,
    },
    /// A vertex with an offending degree.
    Vertex { index: usize, degree: usize },
    /// A non-adjacent vertex pair that sits too close.
    VertexPair { i: usize, j: usize, distance: f64 },
    /// A corner angle outside the expected interval.
    Corner {
        face: usize,
        vertex: usize,
        angle: f64,
    },
    /// A face diagonal not longer than lambda.
    Diagonal {
        face: usize,
        i: usize,
        j: usize,
        distance: f64,
    },
    /// Free-form diagnosis.
    Note(String),
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Edge { i, j, measured } => {
                write!(f, "edge ({i}, {j}) has length {measured:.12}")
            }
            Witness::DegenerateEdge { i, j, separation } => {
                write!(f, "edge ({i}, {j}) is degenerate (separation {separation:.3e})")
            }
            Witness::EdgePair {
                first,
                second,
                kind,
                point,
            } => {
                write!(
                    f,
                    "edges ({}, {}) and ({}, {}) meet: {kind}",
                    first.0, first.1, second.0, second.1
                )?;
                if let Some(p) = point {
                    write!(f, " at ({:.9}, {:.9}, {:.9})", p.x(), p.y(), p.z())?;
                }
                Ok(())
            }
            Witness::Vertex { index, degree } => {
                write!(f, "vertex {index} has degree {degree}")
            }
            Witness::VertexPair { i, j, distance } => {
                write!(f, "non-adjacent vertices {i} and {j} at distance {distance:.12}")
            }
            Witness::Corner {
                face,
                vertex,
                angle,
            } => write!(f, "face {face} corner at vertex {vertex} has angle {angle:.12}"),
            Witness::Diagonal {
                face,
                i,
                j,
                distance,
            } => write!(f, "face {face} diagonal ({i}, {j}) has length {distance:.12}"),
            Witness::Note(s) => write!(f, "{s}"),
        }
    }
}

/// A named numeric observation attached to a check, e.g. the minimum
/// separation margin.
#[derive(Clone, Debug, Serialize)]
pub struct Stat {
    pub name: &'static str,
    pub value: f64,
}

/// Outcome of one check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    pub stats: Vec<Stat>,
}

impl CheckResult {
    fn pass(name: &'static str) -> Self {
        Self {
            name,
            passed: true,
            witnesses: Vec::new(),
            stats: Vec::new(),
        }
    }

    fn from_witnesses(name: &'static str, witnesses: Vec<Witness>) -> Self {
        Self {
            name,
            passed: witnesses.is_empty(),
            witnesses,
            stats: Vec::new(),
        }
    }

    fn with_stat(mut self, name: &'static str, value: f64) -> Self {
        self.stats.push(Stat { name, value });
        self
    }
}

/// Aggregated report; `overall` is the conjunction of every check.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub profile: Profile,
    pub checks: Vec<CheckResult>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn stat(&self, check: &str, stat: &str) -> Option<f64> {
        self.check(check)?
            .stats
            .iter()
            .find(|s| s.name == stat)
            .map(|s| s.value)
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "verification (degree {} {}, tol {:.1e})",
            if self.profile.exact { "=" } else { ">=" },
            self.profile.degree,
            self.profile.tol
        )?;
        for c in &self.checks {
            write!(f, "  [{}] {}", if c.passed { "pass" } else { "FAIL" }, c.name)?;
            for s in &c.stats {
                write!(f, "  {} = {:.6e}", s.name, s.value)?;
            }
            writeln!(f)?;
            for w in c.witnesses.iter().take(8) {
                writeln!(f, "      {w}")?;
            }
            if c.witnesses.len() > 8 {
                writeln!(f, "      ... and {} more witnesses", c.witnesses.len() - 8)?;
            }
        }
        writeln!(f, "overall: {}", if self.overall { "PASS" } else { "FAIL" })
    }
}

/// Every edge length must match `lambda` to within `tol`.
pub fn verify_edge_lengths(g: &EmbeddedGraph, tol: f64) -> CheckResult {
    let mut witnesses = Vec::new();
    let mut worst = 0.0_f64;
    for &(i, j) in g.edges() {
        let measured = g.edge_length(i, j);
        let dev = (measured - g.lambda()).abs();
        worst = worst.max(dev);
        if dev > tol {
            witnesses.push(Witness::Edge { i, j, measured });
        }
    }
    CheckResult::from_witnesses("edge-lengths", witnesses).with_stat("max-length-deviation", worst)
}

/// No two edges may share a point other than a common endpoint.
pub fn verify_noncrossing(g: &EmbeddedGraph) -> CheckResult {
    let mut witnesses = Vec::new();
    let mut arcs: Vec<Option<Arc>> = Vec::with_capacity(g.edge_count());
    for &(i, j) in g.edges() {
        match Arc::new(g.vertices()[i], g.vertices()[j]) {
            Ok(arc) => arcs.push(Some(arc)),
            Err(_) => {
                witnesses.push(Witness::DegenerateEdge {
                    i,
                    j,
                    separation: g.edge_length(i, j),
                });
                arcs.push(None);
            }
        }
    }
    for a in 0..arcs.len() {
        let Some(ref arc_a) = arcs[a] else { continue };
        for (b, slot) in arcs.iter().enumerate().skip(a + 1) {
            let Some(arc_b) = slot else { continue };
            let hit = arc_intersection(arc_a, arc_b);
            if !hit.is_permitted() {
                witnesses.push(Witness::EdgePair {
                    first: g.edges()[a],
                    second: g.edges()[b],
                    kind: hit.kind_name().to_string(),
                    point: hit.point(),
                });
            }
        }
    }
    CheckResult::from_witnesses("noncrossing", witnesses)
}

/// Every vertex degree must be at least `k`.
pub fn verify_min_degree(g: &EmbeddedGraph, k: usize) -> CheckResult {
    let witnesses = (0..g.vertex_count())
        .filter(|&v| g.degree(v) < k)
        .map(|v| Witness::Vertex {
            index: v,
            degree: g.degree(v),
        })
        .collect();
    CheckResult::from_witnesses("min-degree", witnesses)
}

/// Companion mode: every vertex degree must equal `k`.
pub fn verify_regular(g: &EmbeddedGraph, k: usize) -> CheckResult {
    let witnesses = (0..g.vertex_count())
        .filter(|&v| g.degree(v) != k)
        .map(|v| Witness::Vertex {
            index: v,
            degree: g.degree(v),
        })
        .collect();
    CheckResult::from_witnesses("regular", witnesses)
}

/// Every non-adjacent vertex pair must be strictly further apart than
/// `lambda`; this is what makes the graph the contact graph of the cap
/// packing. The minimum margin `min(d) - lambda` is always reported.
pub fn verify_separation(g: &EmbeddedGraph, tol: f64) -> CheckResult {
    let mut witnesses = Vec::new();
    let mut min_margin = f64::INFINITY;
    let n = g.vertex_count();
    for i in 0..n {
        for j in (i + 1)..n {
            if g.has_edge(i, j) {
                continue;
            }
            let d = angular_distance(&g.vertices()[i], &g.vertices()[j]);
            min_margin = min_margin.min(d - g.lambda());
            if d <= g.lambda() - tol {
                witnesses.push(Witness::VertexPair { i, j, distance: d });
            }
        }
    }
    let mut result = CheckResult::from_witnesses("separation", witnesses);
    if min_margin.is_finite() {
        result = result.with_stat("min-separation-margin", min_margin);
    }
    result
}

/// Faces must trace, corners must close up to 2*pi at every vertex, and for
/// a connected graph the face areas must partition the sphere.
fn face_sanity(g: &EmbeddedGraph, faces: &crate::Result<FaceSet>) -> CheckResult {
    let fs = match faces {
        Ok(fs) => fs,
        Err(e) => {
            return CheckResult::from_witnesses(
                "face-sanity",
                vec![Witness::Note(format!("face tracing failed: {e}"))],
            )
        }
    };
    let mut witnesses = Vec::new();
    if fs.degree_sum() != 2 * g.edge_count() {
        witnesses.push(Witness::Note(format!(
            "face degree sum {} != 2|E| = {}",
            fs.degree_sum(),
            2 * g.edge_count()
        )));
    }
    for (v, s) in fs.vertex_angle_sums(g.vertex_count()).iter().enumerate() {
        if (s - 2.0 * PI).abs() > 1e-9 {
            witnesses.push(Witness::Note(format!(
                "angles at vertex {v} sum to {s}, expected 2*pi"
            )));
        }
    }
    let area = fs.total_area();
    if g.is_connected() && (area - 4.0 * PI).abs() > 1e-8 {
        witnesses.push(Witness::Note(format!(
            "face areas sum to {area}, expected 4*pi"
        )));
    }
    CheckResult::from_witnesses("face-sanity", witnesses).with_stat("total-area", area)
}

/// Every corner angle of every face must lie in `(pi/3, 2pi/3]`, with `tol`
/// slack at both ends.
pub fn verify_angle_interval(fs: &FaceSet, tol: f64) -> CheckResult {
    let lo = PI / 3.0 - tol;
    let hi = 2.0 * PI / 3.0 + tol;
    let mut witnesses = Vec::new();
    let mut min_angle = f64::INFINITY;
    let mut max_angle = f64::NEG_INFINITY;
    for inc in &fs.incidences {
        min_angle = min_angle.min(inc.angle);
        max_angle = max_angle.max(inc.angle);
        if !(inc.angle > lo && inc.angle <= hi) {
            witnesses.push(Witness::Corner {
                face: inc.face,
                vertex: inc.vertex,
                angle: inc.angle,
            });
        }
    }
    let mut result = CheckResult::from_witnesses("angle-interval", witnesses);
    if min_angle.is_finite() {
        result = result
            .with_stat("min-corner-angle", min_angle)
            .with_stat("max-corner-angle", max_angle);
    }
    result
}

/// Diagonals of quadrilateral and pentagonal faces must exceed `lambda`.
pub fn verify_face_diagonals(g: &EmbeddedGraph, fs: &FaceSet, tol: f64) -> CheckResult {
    let mut witnesses = Vec::new();
    let mut min_margin = f64::INFINITY;
    for (fi, face) in fs.faces.iter().enumerate() {
        let k = face.degree();
        if !(4..=5).contains(&k) || !face.is_simple_cycle() {
            continue;
        }
        for a in 0..k {
            for b in (a + 2)..k {
                if a == 0 && b == k - 1 {
                    continue; // consecutive around the cycle
                }
                let (i, j) = (face.walk[a], face.walk[b]);
                let d = angular_distance(&g.vertices()[i], &g.vertices()[j]);
                min_margin = min_margin.min(d - g.lambda());
                if d <= g.lambda() - tol {
                    witnesses.push(Witness::Diagonal {
                        face: fi,
                        i,
                        j,
                        distance: d,
                    });
                }
            }
        }
    }
    let mut result = CheckResult::from_witnesses("face-diagonals", witnesses);
    if min_margin.is_finite() {
        result = result.with_stat("min-diagonal-margin", min_margin);
    }
    result
}

/// Runs the whole battery and aggregates.
pub fn verify_all(g: &EmbeddedGraph, profile: Profile) -> VerificationReport {
    let mut checks = Vec::new();
    if g.vertex_count() == 0 || g.edge_count() == 0 {
        checks.push(CheckResult::from_witnesses(
            "nonempty-input",
            vec![Witness::Note(format!(
                "graph has {} vertices and {} edges; nothing to verify",
                g.vertex_count(),
                g.edge_count()
            ))],
        ));
        return VerificationReport {
            profile,
            checks,
            overall: false,
        };
    }
    checks.push(CheckResult::pass("nonempty-input"));
    checks.push(verify_edge_lengths(g, profile.tol));
    checks.push(verify_noncrossing(g));
    checks.push(if profile.exact {
        verify_regular(g, profile.degree)
    } else {
        verify_min_degree(g, profile.degree)
    });
    checks.push(verify_separation(g, profile.tol));

    let faces = trace_faces(g);
    checks.push(face_sanity(g, &faces));
    if let Ok(fs) = &faces {
        checks.push(verify_angle_interval(fs, profile.tol));
        checks.push(verify_face_diagonals(g, fs, profile.tol));
    } else {
        for name in ["angle-interval", "face-diagonals"] {
            checks.push(CheckResult::from_witnesses(
                name,
                vec![Witness::Note("faces unavailable".to_string())],
            ));
        }
    }

    let overall = checks.iter().all(|c| c.passed);
    VerificationReport {
        profile,
        checks,
        overall,
    }
}
