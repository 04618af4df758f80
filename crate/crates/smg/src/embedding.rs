//! Embedded spherical graph model.
//!
//! An [`EmbeddedGraph`] holds vertex positions on the unit sphere, an
//! undirected edge list and the common edge length. The geometric embedding
//! induces a combinatorial one: [`rotation_system`] orders the edges around
//! each vertex counterclockwise (as seen from outside the sphere), and
//! [`trace_faces`] walks the faces from it with the usual next-edge rule, so
//! cut vertices and non-simple boundary walks come out right without any
//! point-location.

use std::collections::HashSet;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Error;
use crate::sphgeom::{
    angular_distance, corner_angle, tangent_direction, tangent_frame, walk_area, UnitVector,
    WalkSide,
};
use crate::Result;

/// A graph drawn on the unit sphere with one common edge length.
#[derive(Clone, Debug)]
pub struct EmbeddedGraph {
    vertices: Vec<UnitVector>,
    edges: Vec<(usize, usize)>,
    lambda: f64,
    adjacency: Vec<Vec<usize>>,
}

impl EmbeddedGraph {
    /// Builds a graph, canonicalizing the edge list (`i < j`, sorted) and
    /// rejecting loops, duplicates, out-of-range indices and a `lambda`
    /// outside `(0, pi)`.
    pub fn new(
        vertices: Vec<UnitVector>,
        edges: Vec<(usize, usize)>,
        lambda: f64,
    ) -> Result<Self> {
        if !(lambda > 0.0 && lambda < PI) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        let n = vertices.len();
        let mut canonical = Vec::with_capacity(edges.len());
        for &(i, j) in &edges {
            if i == j {
                return Err(Error::LoopEdge(i));
            }
            if i >= n || j >= n {
                return Err(Error::EdgeOutOfRange {
                    i,
                    j,
                    vertex_count: n,
                });
            }
            canonical.push((i.min(j), i.max(j)));
        }
        canonical.sort_unstable();
        if let Some(w) = canonical.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge { i: w[0].0, j: w[0].1 });
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &canonical {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        Ok(Self {
            vertices,
            edges: canonical,
            lambda,
            adjacency,
        })
    }

    pub fn vertices(&self) -> &[UnitVector] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let key = (i.min(j), i.max(j));
        self.edges.binary_search(&key).is_ok()
    }

    /// Measured angular length of edge `(i, j)`.
    pub fn edge_length(&self, i: usize, j: usize) -> f64 {
        angular_distance(&self.vertices[i], &self.vertices[j])
    }

    /// Breadth-first connectivity over the edge set; an empty graph is not
    /// connected.
    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut queue = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    queue.push(u);
                }
            }
        }
        count == n
    }
}

/// One face of the embedding: a closed boundary walk with its corner angles.
///
/// `walk[i]` is a vertex index; the walk traverses the directed edges
/// `walk[i] -> walk[i+1]` cyclically, and `corner_angles[i]` is the interior
/// angle at `walk[i]`. A cut vertex may appear more than once.
#[derive(Clone, Debug, Serialize)]
pub struct Face {
    pub walk: Vec<usize>,
    pub corner_angles: Vec<f64>,
    pub area: f64,
}

impl Face {
    /// Number of edge traversals; an edge with this face on both sides is
    /// counted twice.
    pub fn degree(&self) -> usize {
        self.walk.len()
    }

    /// Whether the boundary walk visits no vertex twice.
    pub fn is_simple_cycle(&self) -> bool {
        let mut seen: Vec<usize> = self.walk.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

/// One corner record: vertex `vertex` contributes `angle` to face `face`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CornerIncidence {
    pub vertex: usize,
    pub face: usize,
    pub angle: f64,
}

/// All faces of an embedding plus the flat list of corner incidences.
#[derive(Clone, Debug, Serialize)]
pub struct FaceSet {
    pub faces: Vec<Face>,
    pub incidences: Vec<CornerIncidence>,
}

impl FaceSet {
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn degree_sum(&self) -> usize {
        self.faces.iter().map(Face::degree).sum()
    }

    pub fn total_area(&self) -> f64 {
        self.faces.iter().map(|f| f.area).sum()
    }

    /// Count of faces by degree, ascending.
    pub fn census(&self) -> Vec<(usize, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for f in &self.faces {
            *counts.entry(f.degree()).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }

    /// Sum of incident corner angles per vertex.
    pub fn vertex_angle_sums(&self, vertex_count: usize) -> Vec<f64> {
        let mut sums = vec![0.0; vertex_count];
        for inc in &self.incidences {
            sums[inc.vertex] += inc.angle;
        }
        sums
    }
}

/// Counterclockwise cyclic order of the neighbors of each vertex, derived
/// from the tangent-plane azimuths. Each list is rotated to start at its
/// smallest neighbor index so the output is canonical.
pub fn rotation_system(g: &EmbeddedGraph) -> Result<Vec<Vec<usize>>> {
    let mut rotations = Vec::with_capacity(g.vertex_count());
    for v in 0..g.vertex_count() {
        let vs = &g.vertices()[v];
        let (e1, e2) = tangent_frame(vs);
        let mut order: Vec<(f64, usize)> = Vec::with_capacity(g.degree(v));
        for &u in g.neighbors(v) {
            let t = tangent_direction(vs, &g.vertices()[u])?;
            order.push((t.dot(&e2).atan2(t.dot(&e1)), u));
        }
        order.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("azimuths are finite"));
        for w in 0..order.len() {
            let next = (w + 1) % order.len();
            let gap = if next == 0 {
                order[next].0 + 2.0 * PI - order[w].0
            } else {
                order[next].0 - order[w].0
            };
            if order.len() > 1 && gap.abs() < 1e-10 {
                return Err(Error::DegenerateRotation { vertex: v, gap });
            }
        }
        let mut ring: Vec<usize> = order.into_iter().map(|(_, u)| u).collect();
        if let Some(min_pos) = ring
            .iter()
            .enumerate()
            .min_by_key(|(_, &u)| u)
            .map(|(p, _)| p)
        {
            ring.rotate_left(min_pos);
        }
        rotations.push(ring);
    }
    Ok(rotations)
}

/// Rotates and possibly reflects a cyclic walk into its canonical form:
/// start at the smallest vertex index, then the lexicographically smaller
/// direction. Corner angles travel with their vertices.
fn canonical_cycle(walk: &[usize], angles: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let k = walk.len();
    let min_vertex = *walk.iter().min().expect("walk is nonempty");
    let mut best: Option<(Vec<usize>, Vec<f64>)> = None;
    for p in 0..k {
        if walk[p] != min_vertex {
            continue;
        }
        let forward: (Vec<usize>, Vec<f64>) =
            (0..k).map(|i| (walk[(p + i) % k], angles[(p + i) % k])).unzip();
        let reversed: (Vec<usize>, Vec<f64>) = (0..k)
            .map(|i| (walk[(p + k - i) % k], angles[(p + k - i) % k]))
            .unzip();
        for cand in [forward, reversed] {
            if best.as_ref().is_none_or(|b| cand.0 < b.0) {
                best = Some(cand);
            }
        }
    }
    best.expect("walk contains its own minimum")
}

/// Traces every face of the embedding.
///
/// Every directed edge is traversed exactly once over all faces; the
/// interior of each face lies on the left of its walk, so the corner angles
/// are the interior angles. Requires minimum degree 2.
pub fn trace_faces(g: &EmbeddedGraph) -> Result<FaceSet> {
    for v in 0..g.vertex_count() {
        if g.degree(v) < 2 {
            return Err(Error::DegreeTooLow {
                vertex: v,
                degree: g.degree(v),
            });
        }
    }
    let rot = rotation_system(g)?;

    // Position of each neighbor in the ring, for O(1) next-edge lookups.
    let mut ring_pos: Vec<std::collections::HashMap<usize, usize>> =
        vec![std::collections::HashMap::new(); g.vertex_count()];
    for (v, ring) in rot.iter().enumerate() {
        for (p, &u) in ring.iter().enumerate() {
            ring_pos[v].insert(u, p);
        }
    }

    let mut directed: Vec<(usize, usize)> = Vec::with_capacity(2 * g.edge_count());
    for &(i, j) in g.edges() {
        directed.push((i, j));
        directed.push((j, i));
    }
    directed.sort_unstable();

    let mut visited: HashSet<(usize, usize)> = HashSet::with_capacity(directed.len());
    let mut faces = Vec::new();
    for &start in &directed {
        if visited.contains(&start) {
            continue;
        }
        let mut walk = Vec::new();
        let mut cur = start;
        loop {
            visited.insert(cur);
            walk.push(cur.0);
            let (u, v) = cur;
            let ring = &rot[v];
            let p = ring_pos[v][&u];
            let w = ring[(p + ring.len() - 1) % ring.len()];
            cur = (v, w);
            if cur == start {
                break;
            }
        }
        let k = walk.len();
        let mut angles = Vec::with_capacity(k);
        for i in 0..k {
            let prev = walk[(i + k - 1) % k];
            let next = walk[(i + 1) % k];
            angles.push(corner_angle(
                &g.vertices()[prev],
                &g.vertices()[walk[i]],
                &g.vertices()[next],
                WalkSide::Left,
            )?);
        }
        let area = walk_area(&angles)?;
        let (walk, corner_angles) = canonical_cycle(&walk, &angles);
        faces.push(Face {
            walk,
            corner_angles,
            area,
        });
    }
    faces.sort_by(|a, b| a.walk.cmp(&b.walk));

    let mut incidences = Vec::new();
    for (fi, face) in faces.iter().enumerate() {
        for (v, &angle) in face.walk.iter().zip(&face.corner_angles) {
            incidences.push(CornerIncidence {
                vertex: *v,
                face: fi,
                angle,
            });
        }
    }
    Ok(FaceSet { faces, incidences })
}

/// Euler accounting for an embedding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EulerReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub face_count: usize,
    pub euler_characteristic: i64,
    pub connected: bool,
}

impl EulerReport {
    /// `V - E + F = 2` must hold exactly for a connected embedding.
    pub fn is_consistent(&self) -> bool {
        !self.connected || self.euler_characteristic == 2
    }
}

/// Counts vertices, edges and traced faces and reports connectivity.
pub fn euler_report(g: &EmbeddedGraph, fs: &FaceSet) -> EulerReport {
    let v = g.vertex_count() as i64;
    let e = g.edge_count() as i64;
    let f = fs.face_count() as i64;
    EulerReport {
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        face_count: fs.face_count(),
        euler_characteristic: v - e + f,
        connected: g.is_connected(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{icosahedron_graph, octahedron};

    #[test]
    fn constructor_rejects_bad_edges() {
        let vs = vec![
            UnitVector::new(1.0, 0.0, 0.0).unwrap(),
            UnitVector::new(0.0, 1.0, 0.0).unwrap(),
        ];
        assert!(matches!(
            EmbeddedGraph::new(vs.clone(), vec![(0, 0)], 1.0),
            Err(Error::LoopEdge(0))
        ));
        assert!(matches!(
            EmbeddedGraph::new(vs.clone(), vec![(0, 2)], 1.0),
            Err(Error::EdgeOutOfRange { .. })
        ));
        assert!(matches!(
            EmbeddedGraph::new(vs.clone(), vec![(0, 1), (1, 0)], 1.0),
            Err(Error::DuplicateEdge { i: 0, j: 1 })
        ));
        assert!(matches!(
            EmbeddedGraph::new(vs.clone(), vec![(0, 1)], 3.2),
            Err(Error::LambdaOutOfRange(_))
        ));
        let g = EmbeddedGraph::new(vs, vec![(1, 0)], 1.0).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn rotation_at_pole_follows_longitudes() {
        let pole = UnitVector::new(0.0, 0.0, 1.0).unwrap();
        let on = |lon: f64| UnitVector::from_spherical(1.0, lon);
        let vs = vec![pole, on(0.0), on(PI / 2.0), on(PI)];
        let g = EmbeddedGraph::new(vs, vec![(0, 1), (0, 2), (0, 3)], 1.0).unwrap();
        let rot = rotation_system(&g).unwrap();
        assert_eq!(rot[0], vec![1, 2, 3]);
    }

    #[test]
    fn rotation_of_octahedron_apex_cycles_equator() {
        let g = octahedron();
        let rot = rotation_system(&g).unwrap();
        // Vertex 4 is +z; its ring must be the equatorial 4-cycle
        // x(0), y(2), -x(1), -y(3) in counterclockwise longitude order.
        assert_eq!(rot[4], vec![0, 2, 1, 3]);
    }

    #[test]
    fn rotation_rejects_coincident_tangents() {
        let pole = UnitVector::new(0.0, 0.0, 1.0).unwrap();
        let near = UnitVector::from_spherical(0.5, 0.0);
        let far = UnitVector::from_spherical(1.0, 0.0);
        let g = EmbeddedGraph::new(vec![pole, near, far], vec![(0, 1), (0, 2)], 1.0).unwrap();
        assert!(matches!(
            rotation_system(&g),
            Err(Error::DegenerateRotation { vertex: 0, .. })
        ));
    }

    #[test]
    fn icosahedron_rotation_gaps_are_fifths() {
        let g = icosahedron_graph();
        let rot = rotation_system(&g).unwrap();
        for (v, ring) in rot.iter().enumerate() {
            assert_eq!(ring.len(), 5, "vertex {v}");
            // Consecutive neighbors in the ring sit 2*pi/5 apart in azimuth.
            let vs = &g.vertices()[v];
            let (e1, e2) = tangent_frame(vs);
            let azimuth = |u: usize| {
                let t = tangent_direction(vs, &g.vertices()[u]).unwrap();
                t.dot(&e2).atan2(t.dot(&e1))
            };
            for w in 0..5 {
                let gap = (azimuth(ring[(w + 1) % 5]) - azimuth(ring[w])).rem_euclid(2.0 * PI);
                assert!((gap - 2.0 * PI / 5.0).abs() < 1e-9, "vertex {v} gap {gap}");
            }
        }
    }

    #[test]
    fn octahedron_faces() {
        let g = octahedron();
        let fs = trace_faces(&g).unwrap();
        assert_eq!(fs.face_count(), 8);
        for f in &fs.faces {
            assert_eq!(f.degree(), 3);
            assert!((f.area - PI / 2.0).abs() < 1e-12, "area {}", f.area);
            for &a in &f.corner_angles {
                assert!((a - PI / 2.0).abs() < 1e-12);
            }
            assert!(f.is_simple_cycle());
        }
        assert_eq!(fs.degree_sum(), 2 * g.edge_count());
        assert!((fs.total_area() - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn icosahedron_faces() {
        let g = icosahedron_graph();
        let fs = trace_faces(&g).unwrap();
        assert_eq!(fs.face_count(), 20);
        for f in &fs.faces {
            assert_eq!(f.degree(), 3);
            assert!((f.area - PI / 5.0).abs() < 1e-12);
            for &a in &f.corner_angles {
                assert!((a - 2.0 * PI / 5.0).abs() < 1e-12);
            }
        }
        for s in fs.vertex_angle_sums(g.vertex_count()) {
            assert!((s - 2.0 * PI).abs() < 1e-9);
        }
        let rep = euler_report(&g, &fs);
        assert_eq!(
            rep,
            EulerReport {
                vertex_count: 12,
                edge_count: 30,
                face_count: 20,
                euler_characteristic: 2,
                connected: true,
            }
        );
        assert!(rep.is_consistent());
    }

    #[test]
    fn face_tracing_is_input_order_independent() {
        let g = icosahedron_graph();
        let mut edges: Vec<(usize, usize)> = g.edges().to_vec();
        edges.reverse();
        let shuffled =
            EmbeddedGraph::new(g.vertices().to_vec(), edges, g.lambda()).unwrap();
        let a = trace_faces(&g).unwrap();
        let b = trace_faces(&shuffled).unwrap();
        let wa: Vec<_> = a.faces.iter().map(|f| f.walk.clone()).collect();
        let wb: Vec<_> = b.faces.iter().map(|f| f.walk.clone()).collect();
        assert_eq!(wa, wb);
    }

    #[test]
    fn disconnected_input_doubles_the_euler_characteristic() {
        let one = icosahedron_graph();
        let mut vertices = one.vertices().to_vec();
        let mut edges = one.edges().to_vec();
        let (s, c) = 0.5_f64.sin_cos();
        for v in one.vertices() {
            vertices.push(
                UnitVector::new(c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z()).unwrap(),
            );
        }
        for &(i, j) in one.edges() {
            edges.push((i + 12, j + 12));
        }
        let g = EmbeddedGraph::new(vertices, edges, one.lambda()).unwrap();
        let fs = trace_faces(&g).unwrap();
        let rep = euler_report(&g, &fs);
        assert_eq!(rep.euler_characteristic, 4);
        assert!(!rep.connected);
        assert_eq!(rep.face_count, 40);
    }

    #[test]
    fn low_degree_vertex_is_rejected_by_name() {
        let pole = UnitVector::new(0.0, 0.0, 1.0).unwrap();
        let a = UnitVector::from_spherical(1.0, 0.0);
        let b = UnitVector::from_spherical(1.0, 2.0);
        let g = EmbeddedGraph::new(vec![pole, a, b], vec![(0, 1), (0, 2)], 1.0).unwrap();
        match trace_faces(&g) {
            Err(Error::DegreeTooLow { vertex, degree }) => {
                assert_eq!((vertex, degree), (1, 1));
            }
            other => panic!("expected degree error, got {other:?}"),
        }
    }
}
