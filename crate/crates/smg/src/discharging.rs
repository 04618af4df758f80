//! The charging argument as an executable audit.
//!
//! Vertices start with `deg(v)/2 - 3`, faces with
//! `deg(f) - 3 + (3/2pi) * area(f)`. Every corner incidence then moves
//! `c(angle)` from its face to its vertex. For a traced embedding the grand
//! total is an exact combinatorial zero (up to rounding), so the audit's
//! content lives in the per-entity final charges and the equality flags:
//! a negative final charge certifies that the input cannot be a matchstick
//! graph of minimum degree 5.
//!
//! Angles are taken from the [`FaceSet`] corner records and never
//! recomputed here.

use std::f64::consts::PI;

use serde::Serialize;

use crate::embedding::{trace_faces, EmbeddedGraph, FaceSet};
use crate::error::Error;
use crate::Result;

/// Slack used when testing the equality conditions.
pub const EQUALITY_SLACK: f64 = 1e-9;

/// The piecewise-linear transfer amount for one corner angle.
///
/// Zero up to `pi/3`, then `(3/2pi) * alpha - 1/2` up to `2pi/3`, then a
/// flat `1/2`. The branch boundaries agree exactly: `c(pi/3) = 0` and
/// `c(2pi/3) = 1/2`.
pub fn charge_function(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0 * PI) {
        return Err(Error::AngleOutOfRange(alpha));
    }
    Ok(if alpha <= PI / 3.0 {
        0.0
    } else if alpha < 2.0 * PI / 3.0 {
        1.5 / PI * alpha - 0.5
    } else {
        0.5
    })
}

/// One charge movement: `amount = c(angle)` from `face` to `vertex`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Transfer {
    pub face: usize,
    pub vertex: usize,
    pub angle: f64,
    pub amount: f64,
}

/// The conditions that hold exactly in the zero-charge case, each
/// tested with `+-1e-9` slack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EqualityFlags {
    pub connected: bool,
    pub all_faces_345: bool,
    pub all_angles_in_interval: bool,
    pub all_degree_5: bool,
}

impl EqualityFlags {
    pub fn all(&self) -> bool {
        self.connected && self.all_faces_345 && self.all_angles_in_interval && self.all_degree_5
    }
}

/// Complete charge ledger for one embedding.
#[derive(Clone, Debug, Serialize)]
pub struct ChargeLedger {
    pub vertex_initial: Vec<f64>,
    pub face_initial: Vec<f64>,
    pub transfers: Vec<Transfer>,
    pub vertex_final: Vec<f64>,
    pub face_final: Vec<f64>,
    pub total_initial: f64,
    pub total_final: f64,
    pub equality_flags: EqualityFlags,
}

impl ChargeLedger {
    /// The total initial charge of a spherical embedding is non-positive.
    pub fn total_ok(&self, tol: f64) -> bool {
        self.total_initial <= tol
    }

    pub fn all_finals_nonnegative(&self, tol: f64) -> bool {
        self.vertex_final.iter().chain(&self.face_final).all(|&c| c >= -tol)
    }

    pub fn all_finals_zero(&self, tol: f64) -> bool {
        self.vertex_final
            .iter()
            .chain(&self.face_final)
            .all(|&c| c.abs() <= tol)
    }

    pub fn min_final(&self) -> f64 {
        self.vertex_final
            .iter()
            .chain(&self.face_final)
            .fold(f64::INFINITY, |m, &c| m.min(c))
    }
}

fn compute_flags(g: &EmbeddedGraph, fs: &FaceSet) -> EqualityFlags {
    let lo = PI / 3.0 - EQUALITY_SLACK;
    let hi = 2.0 * PI / 3.0 + EQUALITY_SLACK;
    EqualityFlags {
        connected: g.is_connected(),
        all_faces_345: fs.faces.iter().all(|f| (3..=5).contains(&f.degree())),
        all_angles_in_interval: fs
            .incidences
            .iter()
            .all(|inc| inc.angle > lo && inc.angle <= hi),
        all_degree_5: (0..g.vertex_count()).all(|v| g.degree(v) == 5),
    }
}

/// Assigns the initial charges; the returned ledger has no transfers yet and
/// finals equal to initials.
pub fn initial_charges(g: &EmbeddedGraph, fs: &FaceSet) -> ChargeLedger {
    let vertex_initial: Vec<f64> = (0..g.vertex_count())
        .map(|v| g.degree(v) as f64 / 2.0 - 3.0)
        .collect();
    let face_initial: Vec<f64> = fs
        .faces
        .iter()
        .map(|f| f.degree() as f64 - 3.0 + 1.5 / PI * f.area)
        .collect();
    let total_initial: f64 = vertex_initial.iter().sum::<f64>() + face_initial.iter().sum::<f64>();
    ChargeLedger {
        vertex_final: vertex_initial.clone(),
        face_final: face_initial.clone(),
        vertex_initial,
        face_initial,
        transfers: Vec::new(),
        total_initial,
        total_final: total_initial,
        equality_flags: compute_flags(g, fs),
    }
}

/// Runs one transfer of `c(angle)` per corner incidence, including the
/// several corners a cut vertex contributes to one face. Transfers are
/// ordered by face index, then vertex index.
pub fn run_transfers(fs: &FaceSet, mut ledger: ChargeLedger) -> Result<ChargeLedger> {
    let mut order: Vec<usize> = (0..fs.incidences.len()).collect();
    order.sort_by_key(|&k| (fs.incidences[k].face, fs.incidences[k].vertex));
    for k in order {
        let inc = fs.incidences[k];
        let amount = charge_function(inc.angle)?;
        ledger.face_final[inc.face] -= amount;
        ledger.vertex_final[inc.vertex] += amount;
        ledger.transfers.push(Transfer {
            face: inc.face,
            vertex: inc.vertex,
            angle: inc.angle,
            amount,
        });
    }
    ledger.total_final =
        ledger.vertex_final.iter().sum::<f64>() + ledger.face_final.iter().sum::<f64>();
    Ok(ledger)
}

/// Traces the faces and produces the full ledger.
///
/// The caller is responsible for the drawing being crossing-free; only then
/// do the traced faces mean anything. Works on any embedding of minimum
/// degree 2, so it doubles as a falsification tool for graphs that are not
/// matchstick graphs.
pub fn audit(g: &EmbeddedGraph) -> Result<ChargeLedger> {
    let fs = trace_faces(g)?;
    audit_with_faces(g, &fs)
}

/// [`audit`] for a caller that has already traced the faces.
pub fn audit_with_faces(g: &EmbeddedGraph, fs: &FaceSet) -> Result<ChargeLedger> {
    run_transfers(fs, initial_charges(g, fs))
}
