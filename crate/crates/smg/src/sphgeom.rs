//! Spherical geometry kernel.
//!
//! Distances, tangent directions, corner angles, great-circle arc
//! intersection and Gauss-Bonnet polygon areas on the unit sphere. All
//! angles are radians, all operations are pure functions over immutable
//! values, so everything here is safe to call concurrently.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Error;
use crate::Result;

/// Accepted drift from unit norm when constructing a [`UnitVector`].
pub const UNIT_NORM_TOL: f64 = 1e-9;
/// Chord separation below which two points are treated as the same point.
pub const POINT_IDENTITY_TOL: f64 = 1e-12;
/// Threshold on the cross product of two great-circle poles below which the
/// circles are treated as coincident.
pub const COPLANARITY_TOL: f64 = 1e-10;
/// Slack for deciding whether a point on a great circle lies on an arc.
const ON_ARC_TOL: f64 = 1e-9;

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// A point on the unit sphere: a vertex position or a cap center.
///
/// The constructor renormalizes, so the coordinates always satisfy
/// `x^2 + y^2 + z^2 = 1` to within 1e-12.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    /// Builds a unit vector, rejecting inputs whose norm drifts from 1 by
    /// more than [`UNIT_NORM_TOL`]. Accepted inputs are renormalized.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnit {
                x,
                y,
                z,
                norm,
                tol: UNIT_NORM_TOL,
            });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Normalizes an arbitrary non-zero vector onto the sphere.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < 1e-15 {
            return Err(Error::ZeroNorm(norm));
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Point at colatitude `theta` (from +z) and longitude `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        dot3(self.as_array(), other.as_array())
    }

    pub fn cross(&self, other: &Self) -> [f64; 3] {
        cross3(self.as_array(), other.as_array())
    }

    /// The diametrically opposite point.
    pub fn antipode(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Euclidean (chord) distance, used for point-identity tests.
    pub fn chord_distance(&self, other: &Self) -> f64 {
        let d = [self.x - other.x, self.y - other.y, self.z - other.z];
        norm3(d)
    }
}

/// Great-circle angle between two points, in `[0, pi]`.
///
/// Uses `atan2(|u x v|, u . v)`, which stays accurate near both 0 and pi
/// where a plain `acos` of the dot product loses half the digits.
pub fn angular_distance(u: &UnitVector, v: &UnitVector) -> f64 {
    norm3(u.cross(v)).atan2(u.dot(v))
}

/// Unit tangent at `at`, orthogonal to `at`, pointing along the minor arc
/// toward `toward`. Fails when the points are coincident or antipodal and
/// no direction is defined.
pub fn tangent_direction(at: &UnitVector, toward: &UnitVector) -> Result<UnitVector> {
    let c = at.dot(toward);
    let raw = [
        toward.x() - c * at.x(),
        toward.y() - c * at.y(),
        toward.z() - c * at.z(),
    ];
    let n = norm3(raw);
    if n < 1e-12 {
        return Err(Error::DegenerateDirection(angular_distance(at, toward)));
    }
    Ok(UnitVector {
        x: raw[0] / n,
        y: raw[1] / n,
        z: raw[2] / n,
    })
}

/// A stable orthonormal basis of the tangent plane at `at`, with
/// `e2 = at x e1` so that rotating `e1` toward `e2` is counterclockwise as
/// seen from outside the sphere.
pub fn tangent_frame(at: &UnitVector) -> (UnitVector, UnitVector) {
    let axis = if at.z.abs() < 0.9 {
        UnitVector {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        }
    } else {
        UnitVector {
            x: 1.0,
            y: 0.0,
            z: 0.0,
        }
    };
    let e1 = tangent_direction(at, &axis).expect("axis chosen away from at");
    let e2c = cross3(at.as_array(), e1.as_array());
    let e2 = UnitVector {
        x: e2c[0],
        y: e2c[1],
        z: e2c[2],
    };
    (e1, e2)
}

/// Which side of the directed walk `prev -> apex -> next` an angle is
/// measured on. Faces traced counterclockwise (seen from outside) keep
/// their interior on the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkSide {
    Left,
    Right,
}

/// Counterclockwise angle from `from` to `to` in the tangent plane at `at`,
/// in `(0, 2*pi]`. Coincident directions map to a full turn.
fn ccw_angle(at: &UnitVector, from: &UnitVector, to: &UnitVector) -> f64 {
    let s = dot3(cross3(from.as_array(), to.as_array()), at.as_array());
    let c = from.dot(to);
    let raw = s.atan2(c);
    if raw > 0.0 {
        raw
    } else {
        raw + 2.0 * PI
    }
}

/// Corner angle at `apex` between the arcs toward `prev` and `next`,
/// measured through the region on the requested side of the walk
/// `prev -> apex -> next`. Reflex corners (> pi) are representable.
pub fn corner_angle(
    prev: &UnitVector,
    apex: &UnitVector,
    next: &UnitVector,
    side: WalkSide,
) -> Result<f64> {
    let t_prev = tangent_direction(apex, prev)?;
    let t_next = tangent_direction(apex, next)?;
    Ok(match side {
        WalkSide::Left => ccw_angle(apex, &t_next, &t_prev),
        WalkSide::Right => ccw_angle(apex, &t_prev, &t_next),
    })
}

/// A minor great-circle arc between two distinct, non-antipodal endpoints.
#[derive(Clone, Copy, Debug)]
pub struct Arc {
    a: UnitVector,
    b: UnitVector,
    pole: UnitVector,
    length: f64,
}

impl Arc {
    pub fn new(a: UnitVector, b: UnitVector) -> Result<Self> {
        let cross = a.cross(&b);
        let n = norm3(cross);
        if n < 1e-12 {
            return Err(Error::DegenerateArc(angular_distance(&a, &b)));
        }
        let pole = UnitVector {
            x: cross[0] / n,
            y: cross[1] / n,
            z: cross[2] / n,
        };
        let length = n.atan2(a.dot(&b));
        Ok(Self { a, b, pole, length })
    }

    pub fn a(&self) -> &UnitVector {
        &self.a
    }

    pub fn b(&self) -> &UnitVector {
        &self.b
    }

    /// Unit normal of the arc's great circle (a x b direction).
    pub fn pole(&self) -> &UnitVector {
        &self.pole
    }

    /// Angular length, strictly in (0, pi).
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Whether a point already known to sit on the great circle lies on the
    /// closed arc.
    fn contains_on_circle(&self, p: &UnitVector) -> bool {
        let through = angular_distance(&self.a, p) + angular_distance(p, &self.b);
        (through - self.length).abs() < ON_ARC_TOL
    }

    fn is_endpoint(&self, p: &UnitVector) -> bool {
        p.chord_distance(&self.a) < POINT_IDENTITY_TOL || p.chord_distance(&self.b) < POINT_IDENTITY_TOL
    }

    /// Point at arc-length `t` from `a` toward `b` (no clamping).
    pub fn point_at(&self, t: f64) -> UnitVector {
        let dir = tangent_direction(&self.a, &self.b).expect("arc endpoints are non-degenerate");
        let (s, c) = t.sin_cos();
        UnitVector::normalize(
            c * self.a.x() + s * dir.x(),
            c * self.a.y() + s * dir.y(),
            c * self.a.z() + s * dir.z(),
        )
        .expect("combination of orthonormal vectors")
    }
}

/// How two arcs meet. `Crossing` carries the common point; it is the only
/// variant with one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Intersection {
    /// No common point.
    Disjoint,
    /// The only common points are shared endpoints.
    SharedEndpoint,
    /// A common point that is not a shared endpoint of both arcs.
    Crossing(UnitVector),
    /// Coincident great circles with a common sub-arc of positive length.
    Overlap,
}

impl Intersection {
    /// True for the two outcomes a matchstick drawing allows.
    pub fn is_permitted(&self) -> bool {
        matches!(self, Intersection::Disjoint | Intersection::SharedEndpoint)
    }

    pub fn point(&self) -> Option<UnitVector> {
        match self {
            Intersection::Crossing(p) => Some(*p),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Intersection::Disjoint => "disjoint",
            Intersection::SharedEndpoint => "shared-endpoint",
            Intersection::Crossing(_) => "crossing",
            Intersection::Overlap => "overlap",
        }
    }
}

/// Classifies how two minor arcs meet.
///
/// Shared endpoints are reported as [`Intersection::SharedEndpoint`]; any
/// other common point is a [`Intersection::Crossing`] (including an endpoint
/// of one arc interior to the other), and coincident circles with a common
/// sub-arc of positive length give [`Intersection::Overlap`].
pub fn arc_intersection(s: &Arc, t: &Arc) -> Intersection {
    let poles_cross = cross3(s.pole.as_array(), t.pole.as_array());
    if norm3(poles_cross) < COPLANARITY_TOL {
        return coincident_circles(s, t);
    }

    let p = UnitVector::normalize(poles_cross[0], poles_cross[1], poles_cross[2])
        .expect("cross norm checked above");
    for candidate in [p, p.antipode()] {
        if s.contains_on_circle(&candidate) && t.contains_on_circle(&candidate) {
            return if s.is_endpoint(&candidate) && t.is_endpoint(&candidate) {
                Intersection::SharedEndpoint
            } else {
                Intersection::Crossing(candidate)
            };
        }
    }
    Intersection::Disjoint
}

/// Overlap analysis for arcs on the same great circle, done on the circle's
/// own angular coordinate.
fn coincident_circles(s: &Arc, t: &Arc) -> Intersection {
    let u = s.a;
    let w_raw = cross3(s.pole.as_array(), u.as_array());
    let w = UnitVector {
        x: w_raw[0],
        y: w_raw[1],
        z: w_raw[2],
    };
    let angle_of = |p: &UnitVector| -> f64 {
        let a = p.dot(&w).atan2(p.dot(&u));
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    };

    // s occupies [0, s.length]; orient t's interval along the same circle.
    let ta = angle_of(&t.a);
    let tb = angle_of(&t.b);
    let forward = (tb - ta).rem_euclid(2.0 * PI);
    let t0 = if (forward - t.length).abs() < 1e-6 {
        ta
    } else {
        tb
    };

    let mut touches = 0usize;
    for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
        let lo = (t0 + shift).max(0.0);
        let hi = (t0 + t.length + shift).min(s.length);
        if hi - lo > POINT_IDENTITY_TOL {
            return Intersection::Overlap;
        }
        if hi - lo > -POINT_IDENTITY_TOL {
            touches += 1;
        }
    }
    if touches > 0 {
        Intersection::SharedEndpoint
    } else {
        Intersection::Disjoint
    }
}

/// Gauss-Bonnet area of a closed geodesic boundary walk: the angle sum
/// minus `(k - 2) * pi`, where `k` counts edge traversals. Valid for simple
/// polygons and for non-simple boundary walks alike.
pub fn walk_area(corner_angles: &[f64]) -> Result<f64> {
    let k = corner_angles.len();
    if k < 3 {
        return Err(Error::WalkTooShort(k));
    }
    for &a in corner_angles {
        if !(a > 0.0 && a < 2.0 * PI) {
            return Err(Error::AngleOutOfRange(a));
        }
    }
    let sum: f64 = corner_angles.iter().sum();
    Ok(sum - (k as f64 - 2.0) * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv(x: f64, y: f64, z: f64) -> UnitVector {
        UnitVector::normalize(x, y, z).unwrap()
    }

    #[test]
    fn distance_identity_orthogonal_antipodal() {
        let z = uv(0.0, 0.0, 1.0);
        let x = uv(1.0, 0.0, 0.0);
        let y = uv(0.0, 1.0, 0.0);
        assert_eq!(angular_distance(&z, &z), 0.0);
        assert!((angular_distance(&x, &y) - PI / 2.0).abs() < 1e-15);
        assert!((angular_distance(&z, &z.antipode()) - PI).abs() < 1e-15);
    }

    #[test]
    fn distance_is_accurate_near_zero_and_pi() {
        let v = uv(0.3, -0.4, 0.866_025_403_784_438_6);
        let (e1, _) = tangent_frame(&v);
        let eps = 3e-9;
        let near = UnitVector::normalize(
            v.x() + eps * e1.x(),
            v.y() + eps * e1.y(),
            v.z() + eps * e1.z(),
        )
        .unwrap();
        let d = angular_distance(&v, &near);
        assert!((d - eps).abs() < 1e-15, "near zero: {d} vs {eps}");
        let d_far = angular_distance(&v.antipode(), &near);
        assert!((PI - d_far - eps).abs() < 1e-15, "near pi: {d_far}");
    }

    #[test]
    fn unit_vector_rejects_bad_norms() {
        assert!(UnitVector::new(1.0, 1.0, 1.0).is_err());
        assert!(UnitVector::new(0.0, 0.0, 1.0 + 2e-9).is_err());
        assert!(UnitVector::new(0.0, 0.0, 1.0 + 0.5e-9).is_ok());
        assert!(UnitVector::normalize(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn tangent_direction_examples() {
        let z = uv(0.0, 0.0, 1.0);
        let x = uv(1.0, 0.0, 0.0);
        let y = uv(0.0, 1.0, 0.0);
        let t = tangent_direction(&z, &x).unwrap();
        assert!(t.chord_distance(&x) < 1e-15);
        let t = tangent_direction(&z, &y).unwrap();
        assert!(t.chord_distance(&y) < 1e-15);
        let t = tangent_direction(&x, &z).unwrap();
        assert!(t.chord_distance(&z) < 1e-15);
        assert!(tangent_direction(&z, &z).is_err());
        assert!(tangent_direction(&z, &z.antipode()).is_err());
    }

    #[test]
    fn tangent_is_orthogonal_and_along_minor_arc() {
        let a = uv(0.2, 0.5, 0.7);
        let b = uv(-0.6, 0.1, 0.4);
        let t = tangent_direction(&a, &b).unwrap();
        assert!(a.dot(&t).abs() < 1e-12);
        // Walking a small step along t must shrink the distance to b.
        let step = 1e-6;
        let moved = UnitVector::normalize(
            a.x() + step * t.x(),
            a.y() + step * t.y(),
            a.z() + step * t.z(),
        )
        .unwrap();
        assert!(angular_distance(&moved, &b) < angular_distance(&a, &b));
    }

    #[test]
    fn corner_angle_octant() {
        let x = uv(1.0, 0.0, 0.0);
        let y = uv(0.0, 1.0, 0.0);
        let z = uv(0.0, 0.0, 1.0);
        // Walk x -> z -> y keeps the positive octant on the right.
        let right = corner_angle(&x, &z, &y, WalkSide::Right).unwrap();
        let left = corner_angle(&x, &z, &y, WalkSide::Left).unwrap();
        assert!((right - PI / 2.0).abs() < 1e-12);
        assert!((left - 3.0 * PI / 2.0).abs() < 1e-12);
        assert!((left + right - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn corner_angle_straight_through() {
        let apex = uv(0.0, 0.0, 1.0);
        let prev = UnitVector::from_spherical(0.4, 0.0);
        let next = UnitVector::from_spherical(0.7, PI);
        for side in [WalkSide::Left, WalkSide::Right] {
            let a = corner_angle(&prev, &apex, &next, side).unwrap();
            assert!((a - PI).abs() < 1e-12, "side {side:?}: {a}");
        }
    }

    #[test]
    fn corner_angle_icosahedron_face() {
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let apex = uv(0.0, 1.0, phi);
        let prev = uv(0.0, -1.0, phi);
        let next = uv(phi, 0.0, 1.0);
        let l = corner_angle(&prev, &apex, &next, WalkSide::Left).unwrap();
        let r = corner_angle(&prev, &apex, &next, WalkSide::Right).unwrap();
        let expected = 2.0 * PI / 5.0;
        assert!(
            (l - expected).abs() < 1e-12 || (r - expected).abs() < 1e-12,
            "neither side gives 2*pi/5: left {l}, right {r}"
        );
        assert!((l + r - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn opposite_side_corners_fill_the_plane() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let random_point = |rng: &mut rand_chacha::ChaCha8Rng| {
            let z: f64 = rng.random_range(-1.0..1.0);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let r = (1.0 - z * z).sqrt();
            UnitVector::new(r * phi.cos(), r * phi.sin(), z).unwrap()
        };
        let mut checked = 0;
        while checked < 1000 {
            let prev = random_point(&mut rng);
            let apex = random_point(&mut rng);
            let next = random_point(&mut rng);
            let Ok(l) = corner_angle(&prev, &apex, &next, WalkSide::Left) else {
                continue;
            };
            let r = corner_angle(&prev, &apex, &next, WalkSide::Right).unwrap();
            let swapped = corner_angle(&next, &apex, &prev, WalkSide::Left).unwrap();
            assert!((l + r - 2.0 * PI).abs() < 1e-9, "{l} + {r}");
            assert!((l + swapped - 2.0 * PI).abs() < 1e-9);
            checked += 1;
        }
    }

    #[test]
    fn arc_rejects_degenerate_endpoints() {
        let z = uv(0.0, 0.0, 1.0);
        assert!(Arc::new(z, z).is_err());
        assert!(Arc::new(z, z.antipode()).is_err());
        assert!(Arc::new(z, uv(1.0, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn crossing_at_equatorial_midpoint() {
        // Equator arc longitude 0..90 deg against the meridian at 45 deg
        // spanning latitude -45..45 deg.
        let s = Arc::new(uv(1.0, 0.0, 0.0), uv(0.0, 1.0, 0.0)).unwrap();
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let t = Arc::new(uv(0.5, 0.5, -half), uv(0.5, 0.5, half)).unwrap();
        match arc_intersection(&s, &t) {
            Intersection::Crossing(p) => {
                assert!(p.chord_distance(&uv(half, half, 0.0)) < 1e-12);
                assert!(p.dot(s.pole()).abs() < 1e-12);
                assert!(p.dot(t.pole()).abs() < 1e-12);
            }
            other => panic!("expected crossing, got {other:?}"),
        }
    }

    #[test]
    fn shared_endpoint_only() {
        let z = uv(0.0, 0.0, 1.0);
        let s = Arc::new(z, uv(1.0, 0.0, 0.0)).unwrap();
        let t = Arc::new(z, uv(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(arc_intersection(&s, &t), Intersection::SharedEndpoint);
    }

    #[test]
    fn equatorial_overlap() {
        let eq = |lon: f64| UnitVector::from_spherical(PI / 2.0, lon);
        let s = Arc::new(eq(0.0), eq(1.0)).unwrap();
        let t = Arc::new(eq(0.5), eq(1.5)).unwrap();
        assert_eq!(arc_intersection(&s, &t), Intersection::Overlap);
        // Sub-arc fully inside the other is an overlap too.
        let t2 = Arc::new(eq(0.2), eq(0.8)).unwrap();
        assert_eq!(arc_intersection(&s, &t2), Intersection::Overlap);
        // Touching end to end on the same circle is a shared endpoint.
        let t3 = Arc::new(eq(1.0), eq(2.0)).unwrap();
        assert_eq!(arc_intersection(&s, &t3), Intersection::SharedEndpoint);
        // Separated on the same circle.
        let t4 = Arc::new(eq(1.5), eq(2.5)).unwrap();
        assert_eq!(arc_intersection(&s, &t4), Intersection::Disjoint);
    }

    #[test]
    fn identical_arcs_overlap() {
        let s = Arc::new(uv(1.0, 0.0, 0.0), uv(0.0, 1.0, 0.0)).unwrap();
        let t = Arc::new(uv(0.0, 1.0, 0.0), uv(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(arc_intersection(&s, &s.clone()), Intersection::Overlap);
        assert_eq!(arc_intersection(&s, &t), Intersection::Overlap);
    }

    #[test]
    fn endpoint_in_interior_counts_as_crossing() {
        let s = Arc::new(uv(1.0, 0.0, 0.0), uv(0.0, 1.0, 0.0)).unwrap();
        let mid = uv(1.0, 1.0, 0.0);
        let t = Arc::new(mid, uv(0.3, 0.3, 0.9)).unwrap();
        match arc_intersection(&s, &t) {
            Intersection::Crossing(p) => assert!(p.chord_distance(&mid) < 1e-9),
            other => panic!("expected crossing, got {other:?}"),
        }
    }

    #[test]
    fn disjoint_arcs() {
        let s = Arc::new(uv(1.0, 0.0, 0.2), uv(0.0, 1.0, 0.2)).unwrap();
        let t = Arc::new(uv(1.0, 0.0, -0.8), uv(0.0, 1.0, -0.8)).unwrap();
        assert_eq!(arc_intersection(&s, &t), Intersection::Disjoint);
    }

    #[test]
    fn walk_area_examples() {
        let octant = walk_area(&[PI / 2.0; 3]).unwrap();
        assert!((octant - PI / 2.0).abs() < 1e-15);
        let icosa_face = walk_area(&[2.0 * PI / 5.0; 3]).unwrap();
        assert!((icosa_face - PI / 5.0).abs() < 1e-15);
        assert!(walk_area(&[PI, PI]).is_err());
        assert!(walk_area(&[PI, PI, -0.1]).is_err());
    }

    #[test]
    fn arc_point_at_interpolates() {
        let s = Arc::new(uv(1.0, 0.0, 0.0), uv(0.0, 1.0, 0.0)).unwrap();
        let m = s.point_at(s.length() / 2.0);
        assert!(m.chord_distance(&uv(1.0, 1.0, 0.0)) < 1e-12);
        assert!(s.point_at(0.0).chord_distance(s.a()) < 1e-12);
        assert!(s.point_at(s.length()).chord_distance(s.b()) < 1e-12);
    }
}
