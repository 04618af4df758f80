//! Builders for the five target graphs.
//!
//! The icosahedron and the snub cube start from exact seeds (golden ratio,
//! tribonacci constant); the snub dodecahedron and the two Robinson packings
//! are found by a two-phase pipeline:
//!
//! * phase A maximizes the minimum pairwise distance of a union of group
//!   orbits over the orbit-seed parameters, through a softmin surrogate with
//!   a halving temperature schedule and multi-start;
//! * phase B reads the near-contact pairs, groups them into edge classes
//!   under the symmetry group, and drives one tangency residual per class to
//!   zero with a damped Gauss-Newton iteration.
//!
//! A configuration only ships once `verify_all` and the discharging audit
//! both certify it; residuals alone never decide. With a fixed seed the
//! whole pipeline is deterministic, and the reported parameter vector is
//! canonicalized over the group action (plus orbit relabeling and the
//! antipodal map) so golden files are stable.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::discharging::{audit, ChargeLedger};
use crate::embedding::EmbeddedGraph;
use crate::error::Error;
use crate::sphgeom::{angular_distance, UnitVector};
use crate::symmetry::{apply, edge_classes, group_elements, GroupName, RotationGroup};
use crate::verifier::{verify_all, Profile, VerificationReport};
use crate::Result;

/// Solver configuration. The defaults are robustness knobs, not correctness
/// knobs: any run that certifies is correct.
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Base RNG seed for the multi-start sampling.
    pub seed: u64,
    /// Number of independent phase-A starts.
    pub starts: usize,
    /// Residual target for the tangency polish.
    pub polish_tol: f64,
    /// Gauss-Newton iteration cap.
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            starts: 64,
            polish_tol: 1e-12,
            max_iterations: 200,
        }
    }
}

/// Relative slack over the minimum distance when reading near-contact pairs.
const CONTACT_READ_REL: f64 = 1e-3;
/// Any two points closer than this means a collapsed or colliding orbit.
const DEGENERACY_GUARD: f64 = 0.05;
/// Softmin temperature schedule: halving from 0.1 down to 1e-4.
const ANNEAL_T0: f64 = 0.1;
const ANNEAL_TMIN: f64 = 1e-4;

/// The five constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Icosahedron,
    SnubCube,
    Robinson48,
    SnubDodecahedron,
    Robinson120,
}

impl Target {
    pub const ALL: [Target; 5] = [
        Target::Icosahedron,
        Target::SnubCube,
        Target::Robinson48,
        Target::SnubDodecahedron,
        Target::Robinson120,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Target::Icosahedron => "icosahedron",
            Target::SnubCube => "snub-cube",
            Target::Robinson48 => "robinson-48",
            Target::SnubDodecahedron => "snub-dodecahedron",
            Target::Robinson120 => "robinson-120",
        }
    }

    /// Vertex and edge counts, fixed by 5-regularity.
    pub fn expected_counts(&self) -> (usize, usize) {
        match self {
            Target::Icosahedron => (12, 30),
            Target::SnubCube => (24, 60),
            Target::Robinson48 => (48, 120),
            Target::SnubDodecahedron => (60, 150),
            Target::Robinson120 => (120, 300),
        }
    }
}

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "icosahedron" => Ok(Target::Icosahedron),
            "snub-cube" => Ok(Target::SnubCube),
            "robinson-48" => Ok(Target::Robinson48),
            "snub-dodecahedron" => Ok(Target::SnubDodecahedron),
            "robinson-120" => Ok(Target::Robinson120),
            other => Err(format!(
                "unknown construction '{other}' (expected icosahedron, snub-cube, robinson-48, snub-dodecahedron or robinson-120)"
            )),
        }
    }
}

/// The unknowns of a tangency solve in structured form: one
/// `(colatitude, longitude)` seed per orbit plus the common edge length.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitParameters {
    pub group: GroupName,
    pub seeds: Vec<(f64, f64)>,
    pub lambda: f64,
}

impl OrbitParameters {
    /// Flat solver layout `[theta_1, phi_1, ..., theta_m, phi_m, lambda]`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(2 * self.seeds.len() + 1);
        for &(theta, phi) in &self.seeds {
            flat.push(theta);
            flat.push(phi);
        }
        flat.push(self.lambda);
        flat
    }

    pub fn from_flat(group: GroupName, flat: &[f64]) -> Self {
        let seeds = flat[..flat.len() - 1]
            .chunks_exact(2)
            .map(|c| (c[0], c[1]))
            .collect();
        Self {
            group,
            seeds,
            lambda: flat[flat.len() - 1],
        }
    }
}

/// A certified construction.
#[derive(Clone, Debug)]
pub struct ConstructionResult {
    pub graph: EmbeddedGraph,
    pub name: String,
    /// Solved orbit parameters in canonical form, when the graph came out
    /// of the orbit solver.
    pub parameters: Option<OrbitParameters>,
    pub residual_max: f64,
    pub iterations: usize,
    pub certificate: VerificationReport,
    pub ledger: ChargeLedger,
}

/// Dispatches by name.
pub fn construct(target: Target, opts: &SolveOptions) -> Result<ConstructionResult> {
    match target {
        Target::Icosahedron => construct_icosahedron(),
        Target::SnubCube => construct_snub_cube(opts),
        Target::Robinson48 => construct_robinson_48(opts),
        Target::SnubDodecahedron => construct_snub_dodecahedron(opts),
        Target::Robinson120 => construct_robinson_120(opts),
    }
}

/// All vertex pairs within `threshold` of each other, as a canonical sorted
/// edge list.
pub fn contact_graph_at(points: &[UnitVector], threshold: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if angular_distance(&points[i], &points[j]) <= threshold {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// The spherical octahedron: the smallest 4-regular matchstick graph,
/// kept around as a reference embedding for tests and audits.
pub fn octahedron() -> EmbeddedGraph {
    let vertices = vec![
        UnitVector::new(1.0, 0.0, 0.0).unwrap(),
        UnitVector::new(-1.0, 0.0, 0.0).unwrap(),
        UnitVector::new(0.0, 1.0, 0.0).unwrap(),
        UnitVector::new(0.0, -1.0, 0.0).unwrap(),
        UnitVector::new(0.0, 0.0, 1.0).unwrap(),
        UnitVector::new(0.0, 0.0, -1.0).unwrap(),
    ];
    let edges = contact_graph_at(&vertices, PI / 2.0 + 1e-9);
    EmbeddedGraph::new(vertices, edges, PI / 2.0).unwrap()
}

/// The icosahedral net from exact golden-ratio coordinates: the cyclic
/// permutations of `(0, +-1, +-phi)`, normalized. Edge length
/// `arccos(1/sqrt(5))`.
pub fn icosahedron_graph() -> EmbeddedGraph {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut vertices = Vec::with_capacity(12);
    for &sa in &[1.0, -1.0] {
        for &sb in &[1.0, -1.0] {
            let (a, b) = (sa, sb * phi);
            vertices.push(UnitVector::normalize(0.0, a, b).unwrap());
            vertices.push(UnitVector::normalize(a, b, 0.0).unwrap());
            vertices.push(UnitVector::normalize(b, 0.0, a).unwrap());
        }
    }
    let lambda = (1.0 / 5.0_f64.sqrt()).acos();
    let edges = contact_graph_at(&vertices, lambda + 1e-9);
    EmbeddedGraph::new(vertices, edges, lambda).unwrap()
}

fn certify(graph: EmbeddedGraph, name: &str) -> Result<ConstructionResult> {
    let certificate = verify_all(&graph, Profile::regular(5));
    let ledger = audit(&graph)?;
    let residual_max = certificate
        .stat("edge-lengths", "max-length-deviation")
        .unwrap_or(f64::NAN);
    Ok(ConstructionResult {
        graph,
        name: name.to_string(),
        parameters: None,
        residual_max,
        iterations: 0,
        certificate,
        ledger,
    })
}

/// The 12-vertex graph: 30 edges, all 20 faces triangles.
pub fn construct_icosahedron() -> Result<ConstructionResult> {
    certify(icosahedron_graph(), Target::Icosahedron.name())
}

/// The tribonacci constant, the real root of `t^3 = t^2 + t + 1`.
pub fn tribonacci_constant() -> f64 {
    let mut t = 1.8_f64;
    for _ in 0..64 {
        let f = t * t * t - t * t - t - 1.0;
        let df = 3.0 * t * t - 2.0 * t - 1.0;
        let next = t - f / df;
        if next == t {
            break;
        }
        t = next;
    }
    t
}

/// Snub cube vertices from the tribonacci closed form, normalized onto the
/// sphere: even permutations of `(1, 1/t, t)` with an even number of minus
/// signs plus odd permutations with an odd number, one fixed chirality.
pub fn snub_cube_oracle_points() -> Vec<UnitVector> {
    let t = tribonacci_constant();
    let base = [1.0, 1.0 / t, t];
    let even_perms = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
    let odd_perms = [[0, 2, 1], [2, 1, 0], [1, 0, 2]];
    let mut points = Vec::with_capacity(24);
    for signs in 0..8u32 {
        let s = [
            if signs & 1 == 0 { 1.0 } else { -1.0 },
            if signs & 2 == 0 { 1.0 } else { -1.0 },
            if signs & 4 == 0 { 1.0 } else { -1.0 },
        ];
        let minus_count = signs.count_ones();
        let perms: &[[usize; 3]] = if minus_count % 2 == 0 {
            &even_perms
        } else {
            &odd_perms
        };
        for p in perms {
            points.push(
                UnitVector::normalize(
                    s[0] * base[p[0]],
                    s[1] * base[p[1]],
                    s[2] * base[p[2]],
                )
                .unwrap(),
            );
        }
    }
    points
}

/// Edge length of the snub cube on the unit sphere, straight from the
/// closed-form coordinates.
pub fn snub_cube_oracle_lambda() -> f64 {
    let points = snub_cube_oracle_points();
    let mut min = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            min = min.min(angular_distance(&points[i], &points[j]));
        }
    }
    min
}

fn spherical_coords(p: &UnitVector) -> (f64, f64) {
    let theta = p.z().clamp(-1.0, 1.0).acos();
    let mut phi = p.y().atan2(p.x());
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    (theta, phi)
}

/// The 24-vertex graph: one generic octahedral orbit, solved so that all three
/// edge classes share one length, seeded by the tribonacci coordinates and
/// cross-checked against them after the solve.
pub fn construct_snub_cube(opts: &SolveOptions) -> Result<ConstructionResult> {
    let group = group_elements(GroupName::O24)?;
    let (theta, phi) = spherical_coords(&snub_cube_oracle_points()[0]);
    let result = solve_from_seed_params(&group, &[theta, phi], opts, Target::SnubCube.name())?;
    let oracle = snub_cube_oracle_lambda();
    if (result.graph.lambda() - oracle).abs() > 1e-10 {
        return Err(Error::WrongContactStructure(format!(
            "solved snub cube lambda {} disagrees with the closed-form value {}",
            result.graph.lambda(),
            oracle
        )));
    }
    Ok(result)
}

/// The 60-vertex graph: one generic icosahedral orbit found by the two-phase
/// pipeline; 60 vertices, 80 triangles and 12 pentagons.
pub fn construct_snub_dodecahedron(opts: &SolveOptions) -> Result<ConstructionResult> {
    let result = solve_orbits(GroupName::I60, 1, opts)?;
    expect_counts(result, Target::SnubDodecahedron)
}

/// The 48-vertex graph: two generic octahedral orbits.
pub fn construct_robinson_48(opts: &SolveOptions) -> Result<ConstructionResult> {
    let result = solve_orbits(GroupName::O24, 2, opts)?;
    expect_counts(result, Target::Robinson48)
}

/// The 120-vertex graph: two generic icosahedral orbits.
pub fn construct_robinson_120(opts: &SolveOptions) -> Result<ConstructionResult> {
    let result = solve_orbits(GroupName::I60, 2, opts)?;
    expect_counts(result, Target::Robinson120)
}

fn expect_counts(mut result: ConstructionResult, target: Target) -> Result<ConstructionResult> {
    let (v, e) = target.expected_counts();
    if result.graph.vertex_count() != v || result.graph.edge_count() != e {
        return Err(Error::WrongContactStructure(format!(
            "solver certified a graph with {} vertices and {} edges where {} expects {v} and {e}",
            result.graph.vertex_count(),
            result.graph.edge_count(),
            target.name(),
        )));
    }
    result.name = target.name().to_string();
    Ok(result)
}

// ---------------------------------------------------------------------------
// Tangency system and Gauss-Newton polish
// ---------------------------------------------------------------------------

/// A point of an orbit union, identified by orbit index and group element.
pub type OrbitPointRef = (usize, usize);

/// The equal-tangency equations: one residual per edge class,
/// `distance(representative pair) - lambda`, over the parameter vector
/// `[theta_1, phi_1, ..., theta_m, phi_m, lambda]`.
#[derive(Clone, Debug)]
pub struct TangencySystem {
    group: RotationGroup,
    orbit_count: usize,
    class_reps: Vec<(OrbitPointRef, OrbitPointRef)>,
}

impl TangencySystem {
    pub fn new(
        group: RotationGroup,
        orbit_count: usize,
        class_reps: Vec<(OrbitPointRef, OrbitPointRef)>,
    ) -> Self {
        Self {
            group,
            orbit_count,
            class_reps,
        }
    }

    pub fn parameter_count(&self) -> usize {
        2 * self.orbit_count + 1
    }

    pub fn residual_count(&self) -> usize {
        self.class_reps.len()
    }

    fn point(&self, params: &[f64], at: OrbitPointRef) -> UnitVector {
        let seed = UnitVector::from_spherical(params[2 * at.0], params[2 * at.0 + 1]);
        apply(&self.group.elements()[at.1], &seed)
    }

    pub fn residuals(&self, params: &[f64]) -> Vec<f64> {
        let lambda = params[2 * self.orbit_count];
        self.class_reps
            .iter()
            .map(|&(a, b)| angular_distance(&self.point(params, a), &self.point(params, b)) - lambda)
            .collect()
    }
}

/// Result of a successful polish.
#[derive(Clone, Debug)]
pub struct PolishOutcome {
    pub params: Vec<f64>,
    pub iterations: usize,
    pub residual_max: f64,
    pub history: Vec<f64>,
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

fn jacobian(sys: &TangencySystem, params: &[f64], step: f64, central: bool) -> DMatrix<f64> {
    let m = sys.residual_count();
    let n = sys.parameter_count();
    let mut jac = DMatrix::zeros(m, n);
    let base = if central {
        Vec::new()
    } else {
        sys.residuals(params)
    };
    for c in 0..n {
        let mut hi = params.to_vec();
        hi[c] += step;
        let r_hi = sys.residuals(&hi);
        let col: Vec<f64> = if central {
            let mut lo = params.to_vec();
            lo[c] -= step;
            let r_lo = sys.residuals(&lo);
            r_hi.iter()
                .zip(&r_lo)
                .map(|(h, l)| (h - l) / (2.0 * step))
                .collect()
        } else {
            r_hi.iter()
                .zip(&base)
                .map(|(h, b)| (h - b) / step)
                .collect()
        };
        for r in 0..m {
            jac[(r, c)] = col[r];
        }
    }
    jac
}

/// Central finite-difference step for the tangency Jacobian.
const JACOBIAN_STEP: f64 = 1e-7;
/// Condition bound for the full-column-rank precondition.
const CONDITION_BOUND: f64 = 1e8;

/// Damped Gauss-Newton on the tangency residuals.
///
/// Converges when `max |residual| <= tol`; a start that is already converged
/// returns immediately with a zero step. The Jacobian uses central finite
/// differences and is cross-checked once against a forward difference.
pub fn polish_tangencies(
    sys: &TangencySystem,
    start: &[f64],
    tol: f64,
    max_iterations: usize,
) -> Result<PolishOutcome> {
    let mut params = start.to_vec();
    let mut residuals = sys.residuals(&params);
    let mut rmax = linf(&residuals);
    let mut history = vec![rmax];
    if rmax <= tol {
        return Ok(PolishOutcome {
            params,
            iterations: 0,
            residual_max: rmax,
            history,
        });
    }

    let n = sys.parameter_count();
    let mut damping = 1e-10;
    for iteration in 1..=max_iterations {
        let jac = jacobian(sys, &params, JACOBIAN_STEP, true);
        if iteration == 1 {
            let forward = jacobian(sys, &params, JACOBIAN_STEP, false);
            let scale = 1.0 + jac.amax();
            if (&jac - &forward).amax() > 1e-4 * scale {
                return Err(Error::WrongContactStructure(
                    "tangency residuals are not smooth at the start point (jacobian cross-check failed)"
                        .to_string(),
                ));
            }
            let svd = jac.clone().svd(false, false);
            let smax = svd.singular_values.max();
            let smin = svd.singular_values.min();
            let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
            if sys.residual_count() < n || cond > CONDITION_BOUND {
                return Err(Error::SingularSystem(cond));
            }
        }

        let r_vec = DVector::from_column_slice(&residuals);
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let jtr = &jt * &r_vec;
        let mut stepped = false;
        while damping < 1e8 {
            let lhs = &jtj + DMatrix::identity(n, n) * damping;
            let Some(delta) = lhs.lu().solve(&(-&jtr)) else {
                damping *= 10.0;
                continue;
            };
            let trial: Vec<f64> = params
                .iter()
                .zip(delta.iter())
                .map(|(p, d)| p + d)
                .collect();
            let trial_res = sys.residuals(&trial);
            let trial_max = linf(&trial_res);
            if trial_max < rmax {
                params = trial;
                residuals = trial_res;
                rmax = trial_max;
                damping = (damping / 10.0).max(1e-14);
                stepped = true;
                break;
            }
            damping *= 10.0;
        }
        history.push(rmax);
        if rmax <= tol {
            return Ok(PolishOutcome {
                params,
                iterations: iteration,
                residual_max: rmax,
                history,
            });
        }
        if !stepped {
            break;
        }
    }
    let tail = history.split_off(history.len().saturating_sub(8));
    Err(Error::NoConvergence {
        iterations: max_iterations,
        history: tail,
    })
}

// ---------------------------------------------------------------------------
// Phase A: softmin max-min search over orbit parameters
// ---------------------------------------------------------------------------

/// Anchored pair classes: every unordered pair of orbit-union points is
/// group-equivalent to a pair whose first member is a seed, so the minimum
/// over these is the true minimum over all pairs.
struct PairTable {
    pairs: Vec<(usize, usize, usize)>, // (orbit_a, orbit_b, element index for b)
}

impl PairTable {
    fn new(group: &RotationGroup, orbit_count: usize) -> Self {
        let identity = group
            .elements()
            .iter()
            .position(|m| (m - nalgebra::Matrix3::identity()).amax() < 1e-9)
            .expect("identity is a group element");
        let mut pairs = Vec::new();
        for i in 0..orbit_count {
            for k in 0..group.order() {
                if k != identity {
                    pairs.push((i, i, k));
                }
            }
            for j in (i + 1)..orbit_count {
                for k in 0..group.order() {
                    pairs.push((i, j, k));
                }
            }
        }
        Self { pairs }
    }

    fn distances(&self, group: &RotationGroup, seeds: &[UnitVector], out: &mut Vec<f64>) {
        out.clear();
        for &(a, b, k) in &self.pairs {
            let image = apply(&group.elements()[k], &seeds[b]);
            out.push(angular_distance(&seeds[a], &image));
        }
    }
}

fn seeds_from_params(params: &[f64]) -> Vec<UnitVector> {
    params
        .chunks_exact(2)
        .map(|c| UnitVector::from_spherical(c[0], c[1]))
        .collect()
}

/// Softmin of the pair distances: smooth lower surrogate of the minimum,
/// exact as the temperature goes to zero.
fn softmin(distances: &[f64], temperature: f64) -> f64 {
    let dmin = distances.iter().fold(f64::INFINITY, |m, &d| m.min(d));
    let sum: f64 = distances
        .iter()
        .map(|&d| (-(d - dmin) / temperature).exp())
        .sum();
    dmin - temperature * sum.ln()
}

/// Plain Nelder-Mead minimization; good enough for the 2- and 4-dimensional
/// smoothed objectives of phase A.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    scale: f64,
    max_iterations: usize,
    ftol: f64,
) -> Vec<f64> {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += scale;
        let v = f(&p);
        simplex.push((p, v));
    }
    for _ in 0..max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[n].1 - simplex[0].1 < ftol {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(c, w)| 2.0 * c - w)
            .collect();
        let fr = f(&reflect);
        if fr < simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| 3.0 * c - 2.0 * w)
                .collect();
            let fe = f(&expand);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| 0.5 * (c + w))
                .collect();
            let fc = f(&contract);
            if fc < worst.1 {
                simplex[n] = (contract, fc);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = best
                        .iter()
                        .zip(&item.0)
                        .map(|(b, x)| 0.5 * (b + x))
                        .collect();
                    let fv = f(&shrunk);
                    *item = (shrunk, fv);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0].0.clone()
}

/// One phase-A run: anneal the softmin of the pair distances from a random
/// start, returning the seed parameters at the final (coldest) stage.
fn phase_a(group: &RotationGroup, orbit_count: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let table = PairTable::new(group, orbit_count);
    let mut params = Vec::with_capacity(2 * orbit_count);
    for _ in 0..orbit_count {
        let z: f64 = rng.random_range(-0.99..0.99);
        params.push(z.acos());
        params.push(rng.random_range(0.0..2.0 * PI));
    }
    let mut temperature = ANNEAL_T0;
    while temperature >= ANNEAL_TMIN {
        let objective = |p: &[f64]| {
            let seeds = seeds_from_params(p);
            let mut distances = Vec::with_capacity(table.pairs.len());
            table.distances(group, &seeds, &mut distances);
            -softmin(&distances, temperature)
        };
        let scale = (temperature.sqrt() * 0.5).max(0.01);
        params = nelder_mead(
            objective,
            &params,
            scale,
            250 * params.len(),
            1e-14,
        );
        temperature *= 0.5;
    }
    params
}

// ---------------------------------------------------------------------------
// Phase B: structure read, polish, canonicalization, certification
// ---------------------------------------------------------------------------

struct Structure {
    points: Vec<UnitVector>,
    edges: Vec<(usize, usize)>,
    lambda_hat: f64,
}

fn orbit_union_points(group: &RotationGroup, seed_params: &[f64]) -> Vec<UnitVector> {
    let seeds = seeds_from_params(seed_params);
    let mut points = Vec::with_capacity(seeds.len() * group.order());
    for seed in &seeds {
        for m in group.elements() {
            points.push(apply(m, seed));
        }
    }
    points
}

/// Reads the contact structure at threshold `lambda_hat * (1 + 1e-3)` and
/// demands a 5-regular outcome on non-degenerate orbits.
fn read_structure(group: &RotationGroup, seed_params: &[f64]) -> Result<Structure> {
    let points = orbit_union_points(group, seed_params);
    let mut min_d = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            min_d = min_d.min(angular_distance(&points[i], &points[j]));
        }
    }
    if min_d < DEGENERACY_GUARD {
        return Err(Error::WrongContactStructure(format!(
            "orbits collapse: minimum point separation {min_d:.3e}"
        )));
    }
    let edges = contact_graph_at(&points, min_d * (1.0 + CONTACT_READ_REL));
    let mut degrees = vec![0usize; points.len()];
    for &(i, j) in &edges {
        degrees[i] += 1;
        degrees[j] += 1;
    }
    if let Some((v, &d)) = degrees.iter().enumerate().find(|(_, &d)| d != 5) {
        return Err(Error::WrongContactStructure(format!(
            "contact structure is not 5-regular: vertex {v} has {d} contacts"
        )));
    }
    Ok(Structure {
        points,
        edges,
        lambda_hat: min_d,
    })
}

/// Builds the tangency system for a structure: one representative edge per
/// symmetry class.
fn tangency_system(
    group: &RotationGroup,
    orbit_count: usize,
    structure: &Structure,
) -> Result<TangencySystem> {
    let classes = edge_classes(&structure.points, &structure.edges, group)?;
    let order = group.order();
    let reps = classes
        .iter()
        .map(|class| {
            let (i, j) = structure.edges[class[0]];
            ((i / order, i % order), (j / order, j % order))
        })
        .collect();
    Ok(TangencySystem::new(group.clone(), orbit_count, reps))
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for rest in permutations(m - 1) {
        for slot in 0..m {
            let mut perm = rest.clone();
            perm.insert(slot, m - 1);
            out.push(perm);
        }
    }
    out
}

/// Canonical representative of a parameter vector under the group action,
/// orbit relabeling and the antipodal map: the lexicographically smallest
/// equivalent `[theta_1, phi_1, ..., lambda]`. This pins the gauge so that
/// repeated runs report identical golden parameters.
fn canonicalize_params(group: &RotationGroup, orbit_count: usize, params: &[f64]) -> Vec<f64> {
    let lambda = params[2 * orbit_count];
    let seeds = seeds_from_params(&params[..2 * orbit_count]);
    let perms = permutations(orbit_count);
    let mut best: Option<Vec<f64>> = None;
    for invert in [false, true] {
        let base: Vec<UnitVector> = seeds
            .iter()
            .map(|s| if invert { s.antipode() } else { *s })
            .collect();
        for m in group.elements() {
            let imaged: Vec<UnitVector> = base.iter().map(|s| apply(m, s)).collect();
            for perm in &perms {
                let mut cand = Vec::with_capacity(2 * orbit_count + 1);
                for &idx in perm {
                    let (theta, phi) = spherical_coords(&imaged[idx]);
                    cand.push(theta);
                    cand.push(phi);
                }
                cand.push(lambda);
                let better = match &best {
                    None => true,
                    Some(b) => {
                        cand.iter()
                            .zip(b.iter())
                            .find_map(|(c, b)| match c.total_cmp(b) {
                                std::cmp::Ordering::Equal => None,
                                ord => Some(ord == std::cmp::Ordering::Less),
                            })
                            .unwrap_or(false)
                    }
                };
                if better {
                    best = Some(cand);
                }
            }
        }
    }
    best.expect("at least one candidate")
}

/// Builds the final graph from solved parameters: orbit points in canonical
/// (sorted) vertex order, contacts read at `lambda` plus a hair.
fn build_graph_from_params(
    group: &RotationGroup,
    orbit_count: usize,
    params: &[f64],
) -> Result<EmbeddedGraph> {
    let lambda = params[2 * orbit_count];
    let mut points = orbit_union_points(group, &params[..2 * orbit_count]);
    points.sort_by(|a, b| {
        a.x()
            .total_cmp(&b.x())
            .then(a.y().total_cmp(&b.y()))
            .then(a.z().total_cmp(&b.z()))
    });
    let edges = contact_graph_at(&points, lambda + 1e-9);
    EmbeddedGraph::new(points, edges, lambda)
}

/// Polishes from explicit seed parameters and certifies the result. Used
/// directly for the snub cube (exact seed) and by the multi-start search.
fn solve_from_seed_params(
    group: &RotationGroup,
    seed_params: &[f64],
    opts: &SolveOptions,
    name: &str,
) -> Result<ConstructionResult> {
    let orbit_count = seed_params.len() / 2;
    let structure = read_structure(group, seed_params)?;
    let sys = tangency_system(group, orbit_count, &structure)?;
    let mut start = seed_params.to_vec();
    start.push(structure.lambda_hat);
    let outcome = polish_tangencies(&sys, &start, opts.polish_tol, opts.max_iterations)?;

    // The polished parameters must reproduce the same 5-regular structure.
    let polished = read_structure(group, &outcome.params[..2 * orbit_count])?;
    if polished.edges.len() != structure.edges.len() {
        return Err(Error::WrongContactStructure(format!(
            "contact count changed during polish: {} -> {}",
            structure.edges.len(),
            polished.edges.len()
        )));
    }

    let flat = canonicalize_params(group, orbit_count, &outcome.params);
    let graph = build_graph_from_params(group, orbit_count, &flat)?;
    let certificate = verify_all(&graph, Profile::regular(5));
    let ledger = audit(&graph)?;
    if !certificate.overall
        || !ledger.total_ok(1e-9)
        || !ledger.all_finals_zero(1e-9)
        || !ledger.equality_flags.all()
    {
        return Err(Error::WrongContactStructure(format!(
            "solution at residual {:.3e} failed certification",
            outcome.residual_max
        )));
    }
    Ok(ConstructionResult {
        graph,
        name: name.to_string(),
        parameters: Some(OrbitParameters::from_flat(group.name(), &flat)),
        residual_max: outcome.residual_max,
        iterations: outcome.iterations,
        certificate,
        ledger,
    })
}

/// The generic two-phase search: `orbit_count` orbits of the named group,
/// multi-start, returning the certified result with the lexicographically
/// smallest canonical parameter vector. Exposed to the CLI as the
/// experimental `solve-orbits` command.
pub fn solve_orbits(
    group_name: GroupName,
    orbit_count: usize,
    opts: &SolveOptions,
) -> Result<ConstructionResult> {
    if orbit_count == 0 || orbit_count > 4 {
        return Err(Error::WrongContactStructure(format!(
            "orbit count {orbit_count} out of supported range 1..=4"
        )));
    }
    let group = group_elements(group_name)?;
    let name = format!("{group_name}-orbits-{orbit_count}");

    let candidates: Vec<ConstructionResult> = (0..opts.starts as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(opts.seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let seed_params = phase_a(&group, orbit_count, &mut rng);
            solve_from_seed_params(&group, &seed_params, opts, &name).ok()
        })
        .collect();

    candidates
        .into_iter()
        .min_by(|a, b| {
            let pa = a.parameters.as_ref().expect("solver results carry parameters");
            let pb = b.parameters.as_ref().expect("solver results carry parameters");
            pa.flatten()
                .iter()
                .zip(pb.flatten().iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != std::cmp::Ordering::Equal)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or(Error::SearchExhausted { starts: opts.starts })
}
