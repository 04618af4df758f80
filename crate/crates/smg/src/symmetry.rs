//! Finite rotation groups and orbits on the sphere.
//!
//! The chiral octahedral group (order 24) and the chiral icosahedral group
//! (order 60) as explicit orthogonal matrices, generated once by closure
//! from exact generators. Rotation subgroups are enough here: the snub
//! solids and the two-orbit cap packings are chiral, so reflections never
//! enter the constructions.

use nalgebra::{Matrix3, Vector3};

use crate::error::Error;
use crate::sphgeom::UnitVector;
use crate::Result;

/// Which rotation group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupName {
    /// Rotations of the cube/octahedron, order 24.
    O24,
    /// Rotations of the icosahedron/dodecahedron, order 60.
    I60,
}

impl GroupName {
    pub fn order(&self) -> usize {
        match self {
            GroupName::O24 => 24,
            GroupName::I60 => 60,
        }
    }
}

impl std::fmt::Display for GroupName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupName::O24 => write!(f, "O24"),
            GroupName::I60 => write!(f, "I60"),
        }
    }
}

/// A finite rotation group as a closed list of 3x3 matrices in a canonical
/// order. Immutable once generated.
#[derive(Clone, Debug)]
pub struct RotationGroup {
    name: GroupName,
    elements: Vec<Matrix3<f64>>,
}

const MATRIX_IDENTITY_TOL: f64 = 1e-9;
const CLOSURE_ROUND_CAP: usize = 16;

fn matrices_equal(a: &Matrix3<f64>, b: &Matrix3<f64>) -> bool {
    (a - b).amax() < MATRIX_IDENTITY_TOL
}

fn canonical_matrix_order(a: &Matrix3<f64>, b: &Matrix3<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = x.total_cmp(y);
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

/// Generates the named group from two generators by closure.
pub fn group_elements(name: GroupName) -> Result<RotationGroup> {
    let generators = match name {
        GroupName::O24 => {
            // Quarter turn about z and the coordinate 3-cycle about (1,1,1).
            let rz = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
            let cycle = Matrix3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
            vec![rz, cycle]
        }
        GroupName::I60 => {
            // Coordinate 3-cycle and the exact golden-ratio 5-fold turn
            // fixing the icosahedron vertex (0, 1, phi).
            let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
            let cycle = Matrix3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
            let five = Matrix3::new(
                phi - 1.0,
                -phi,
                1.0,
                phi,
                1.0,
                phi - 1.0,
                -1.0,
                phi - 1.0,
                phi,
            ) * 0.5;
            vec![cycle, five]
        }
    };

    let mut elements: Vec<Matrix3<f64>> = vec![Matrix3::identity()];
    for round in 0.. {
        if round >= CLOSURE_ROUND_CAP {
            return Err(Error::ClosureNotReached(round));
        }
        let mut grew = false;
        let snapshot = elements.clone();
        for m in &snapshot {
            for g in &generators {
                let prod = g * m;
                if !elements.iter().any(|e| matrices_equal(e, &prod)) {
                    elements.push(prod);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
        if elements.len() > name.order() {
            return Err(Error::ClosureNotReached(round));
        }
    }
    if elements.len() != name.order() {
        return Err(Error::ClosureNotReached(CLOSURE_ROUND_CAP));
    }
    elements.sort_by(canonical_matrix_order);
    Ok(RotationGroup { name, elements })
}

impl RotationGroup {
    pub fn name(&self) -> GroupName {
        self.name
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Matrix3<f64>] {
        &self.elements
    }
}

/// Applies a rotation matrix to a point on the sphere.
pub fn apply(m: &Matrix3<f64>, u: &UnitVector) -> UnitVector {
    let v = m * Vector3::new(u.x(), u.y(), u.z());
    UnitVector::normalize(v.x, v.y, v.z).expect("rotations preserve the norm")
}

/// Orbit of a seed point: every element applied, points closer than
/// `dedup_tol` merged, output in canonical (lexicographic) order. Generic
/// seeds give `group.order()` points; seeds on a symmetry axis give fewer.
pub fn orbit(group: &RotationGroup, seed: &UnitVector, dedup_tol: f64) -> Vec<UnitVector> {
    let mut points: Vec<UnitVector> = Vec::with_capacity(group.order());
    for m in group.elements() {
        let p = apply(m, seed);
        if !points.iter().any(|q| q.chord_distance(&p) < dedup_tol) {
            points.push(p);
        }
    }
    points.sort_by(|a, b| {
        a.x()
            .total_cmp(&b.x())
            .then(a.y().total_cmp(&b.y()))
            .then(a.z().total_cmp(&b.z()))
    });
    points
}

/// Default orbit merge tolerance: far above polish residuals, far below any
/// real point separation in the target configurations.
pub const ORBIT_DEDUP_TOL: f64 = 1e-8;

const INVARIANCE_TOL: f64 = 1e-9;

fn nearest_point(points: &[UnitVector], p: &UnitVector) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for (i, q) in points.iter().enumerate() {
        let d = q.chord_distance(p);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Partitions an edge list into group orbits: two edges share a class iff
/// some element maps one endpoint pair onto the other. The point set must be
/// group-invariant. Classes are returned as sorted lists of edge indices,
/// ordered by their smallest member, so the output does not depend on the
/// edge input order beyond the edge indexing itself.
pub fn edge_classes(
    points: &[UnitVector],
    edges: &[(usize, usize)],
    group: &RotationGroup,
) -> Result<Vec<Vec<usize>>> {
    let mut edge_index = std::collections::HashMap::new();
    for (e, &(i, j)) in edges.iter().enumerate() {
        edge_index.insert((i.min(j), i.max(j)), e);
    }
    let mut dsu = Dsu::new(edges.len());
    for m in group.elements() {
        let mut perm = Vec::with_capacity(points.len());
        for p in points {
            let image = apply(m, p);
            let (idx, dist) = nearest_point(points, &image);
            if dist > INVARIANCE_TOL {
                return Err(Error::NotInvariant(dist));
            }
            perm.push(idx);
        }
        for (e, &(i, j)) in edges.iter().enumerate() {
            let (a, b) = (perm[i], perm[j]);
            let key = (a.min(b), a.max(b));
            match edge_index.get(&key) {
                Some(&target) => dsu.union(e, target),
                None => {
                    return Err(Error::WrongContactStructure(format!(
                        "edge ({i}, {j}) maps to non-edge ({}, {}) under the group",
                        key.0, key.1
                    )))
                }
            }
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for e in 0..edges.len() {
        let root = dsu.find(e);
        by_root.entry(root).or_default().push(e);
    }
    Ok(by_root.into_values().collect())
}

/// Whether the point set is closed under the antipodal map `v -> -v`.
///
/// This is a point-set test, not a group-membership test: the rotation
/// groups never contain the central inversion, yet a configuration can
/// still be centrally symmetric.
pub fn centrally_symmetric(points: &[UnitVector], tol: f64) -> bool {
    points
        .iter()
        .all(|p| points.iter().any(|q| q.chord_distance(&p.antipode()) < tol))
}
