//! Exact geometry of the round 3-sphere: great circles as oriented 2-frames,
//! rotations about circles, Clifford tori, the cylindrical coordinate map
//! into S^3, the torus configurations with their scaffoldings, and the finite
//! symmetry groups generated by circle reflections.
//!
//! S^3 is the unit sphere of R^4 identified with C^2 via
//! `(x1, y1, x2, y2) = (z1, z2)`.

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SphereError {
    #[error("group closure exceeded the enumeration bound of {0} elements")]
    ClosureOverflow(usize),
    #[error("inconsistent parity detected during group closure")]
    InconsistentParity,
    #[error("frame is not orthonormal")]
    BadFrame,
}

pub const FRAME_TOL: f64 = 1e-12;

/// Unit vector in R^4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointS3(pub Vector4<f64>);

impl PointS3 {
    pub fn new(v: Vector4<f64>) -> Self {
        debug_assert!((v.norm() - 1.0).abs() < 1e-9);
        Self(v.normalize())
    }

    pub fn from_complex(z1: num_complex::Complex64, z2: num_complex::Complex64) -> Self {
        Self::new(Vector4::new(z1.re, z1.im, z2.re, z2.im))
    }

    pub fn distance(&self, other: &PointS3) -> f64 {
        self.0.dot(&other.0).clamp(-1.0, 1.0).acos()
    }
}

/// Oriented great circle, represented by an ordered orthonormal 2-frame
/// spanning its plane; `point(0) = e1` and the orientation runs toward `e2`.
#[derive(Debug, Clone, Copy)]
pub struct GreatCircle {
    pub e1: Vector4<f64>,
    pub e2: Vector4<f64>,
}

impl GreatCircle {
    pub fn new(e1: Vector4<f64>, e2: Vector4<f64>) -> Result<Self, SphereError> {
        if (e1.norm() - 1.0).abs() > 1e-9
            || (e2.norm() - 1.0).abs() > 1e-9
            || e1.dot(&e2).abs() > 1e-9
        {
            return Err(SphereError::BadFrame);
        }
        Ok(Self { e1, e2 })
    }

    pub fn point(&self, t: f64) -> PointS3 {
        PointS3::new(self.e1 * t.cos() + self.e2 * t.sin())
    }

    pub fn velocity(&self, t: f64) -> Vector4<f64> {
        -self.e1 * t.sin() + self.e2 * t.cos()
    }

    /// Angle along the circle of (the projection of) a point.
    pub fn angle_of(&self, p: &Vector4<f64>) -> f64 {
        p.dot(&self.e2).atan2(p.dot(&self.e1))
    }

    /// Spherical distance from a point to the circle (as a set).
    pub fn distance_to(&self, p: &PointS3) -> f64 {
        let a = p.0.dot(&self.e1);
        let b = p.0.dot(&self.e2);
        (a * a + b * b).sqrt().clamp(0.0, 1.0).acos()
    }

    /// Orthogonal projector onto the circle's 2-plane.
    pub fn projector(&self) -> Matrix4<f64> {
        self.e1 * self.e1.transpose() + self.e2 * self.e2.transpose()
    }

    /// Set equality: same 2-plane, orientation ignored.
    pub fn same_circle(&self, other: &GreatCircle) -> bool {
        (self.projector() - other.projector()).norm() < 1e-9
    }

    /// The totally orthogonal circle, oriented so that the combined frame
    /// `(e1, e2, f1, f2)` is positively oriented in R^4.
    pub fn perp(&self) -> GreatCircle {
        let mut basis: Vec<Vector4<f64>> = Vec::new();
        for cand in [
            Vector4::new(1.0, 0.0, 0.0, 0.0),
            Vector4::new(0.0, 1.0, 0.0, 0.0),
            Vector4::new(0.0, 0.0, 1.0, 0.0),
            Vector4::new(0.0, 0.0, 0.0, 1.0),
        ] {
            let mut v = cand - self.e1 * self.e1.dot(&cand) - self.e2 * self.e2.dot(&cand);
            for b in &basis {
                v -= b * b.dot(&v);
            }
            if v.norm() > 1e-6 {
                basis.push(v.normalize());
                if basis.len() == 2 {
                    break;
                }
            }
        }
        let (f1, f2) = (basis[0], basis[1]);
        let det = Matrix4::from_columns(&[self.e1, self.e2, f1, f2]).determinant();
        if det > 0.0 {
            GreatCircle { e1: f1, e2: f2 }
        } else {
            GreatCircle { e1: f2, e2: f1 }
        }
    }
}

/// Orthogonal transformation of R^4 with a parity flag: +1 when the element
/// preserves the two sides of the surface under consideration, -1 when it
/// exchanges them.
#[derive(Debug, Clone, Copy)]
pub struct SphereIsometry {
    pub matrix: Matrix4<f64>,
    pub parity: i8,
}

impl SphereIsometry {
    pub fn identity() -> Self {
        Self { matrix: Matrix4::identity(), parity: 1 }
    }

    pub fn with_parity(mut self, parity: i8) -> Self {
        self.parity = parity;
        self
    }

    pub fn apply(&self, p: &PointS3) -> PointS3 {
        PointS3::new(self.matrix * p.0)
    }

    pub fn apply_vec(&self, v: &Vector4<f64>) -> Vector4<f64> {
        self.matrix * v
    }

    pub fn compose(&self, other: &SphereIsometry) -> SphereIsometry {
        SphereIsometry { matrix: self.matrix * other.matrix, parity: self.parity * other.parity }
    }

    pub fn orthogonality_defect(&self) -> f64 {
        (self.matrix.transpose() * self.matrix - Matrix4::identity()).norm()
    }

    pub fn approx_eq(&self, other: &SphereIsometry, tol: f64) -> bool {
        (self.matrix - other.matrix).norm() < tol
    }

    pub fn map_circle(&self, c: &GreatCircle) -> GreatCircle {
        GreatCircle { e1: self.matrix * c.e1, e2: self.matrix * c.e2 }
    }
}

/// Rotation about the circle `c` by angle `phi`: identity on the plane of
/// `c`, rotation by `phi` on the totally orthogonal plane, oriented by the
/// induced orientation of the orthogonal circle. Parity defaults to +1; the
/// group builders override it per generator.
pub fn rotation_about_circle(c: &GreatCircle, phi: f64) -> SphereIsometry {
    let perp = c.perp();
    let (f1, f2) = (perp.e1, perp.e2);
    let (s, co) = phi.sin_cos();
    let m = c.e1 * c.e1.transpose()
        + c.e2 * c.e2.transpose()
        + (f1 * f1.transpose() + f2 * f2.transpose()) * co
        + (f2 * f1.transpose() - f1 * f2.transpose()) * s;
    SphereIsometry { matrix: m, parity: 1 }
}

// ---------------------------------------------------------------------------
// The named circles.
// ---------------------------------------------------------------------------

/// First coordinate circle `{(e^{it}, 0)}`, oriented by increasing t.
pub fn circle_c1() -> GreatCircle {
    GreatCircle {
        e1: Vector4::new(1.0, 0.0, 0.0, 0.0),
        e2: Vector4::new(0.0, 1.0, 0.0, 0.0),
    }
}

/// Second coordinate circle `{(0, e^{it})}`, the totally orthogonal companion
/// of [`circle_c1`].
pub fn circle_c2() -> GreatCircle {
    GreatCircle {
        e1: Vector4::new(0.0, 0.0, 1.0, 0.0),
        e2: Vector4::new(0.0, 0.0, 0.0, 1.0),
    }
}

/// `C_{phi1, phi2} = {(e^{i phi1} cos r, e^{i phi2} sin r)}`: the great
/// circle orthogonally crossing both coordinate circles.
pub fn circle_cphi(phi1: f64, phi2: f64) -> GreatCircle {
    let (s1, c1v) = phi1.sin_cos();
    let (s2, c2v) = phi2.sin_cos();
    GreatCircle {
        e1: Vector4::new(c1v, s1, 0.0, 0.0),
        e2: Vector4::new(0.0, 0.0, c2v, s2),
    }
}

/// `C'_j = {e^{iz} (1, e^{i (j-1) pi / k}) / sqrt2}`, oriented by increasing
/// z; defined for any real index j.
pub fn circle_cprime(k: u32, j: f64) -> GreatCircle {
    let theta = (j - 1.0) * std::f64::consts::PI / k as f64;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (st, ct) = theta.sin_cos();
    GreatCircle {
        e1: Vector4::new(r, 0.0, r * ct, r * st),
        e2: Vector4::new(0.0, r, -r * st, r * ct),
    }
}

/// `C''_psi = {(e^{iz}, e^{i (psi - z)}) / sqrt2}`, oriented by increasing z.
pub fn circle_cdprime(psi: f64) -> GreatCircle {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (sp, cp) = psi.sin_cos();
    GreatCircle {
        e1: Vector4::new(r, 0.0, r * cp, r * sp),
        e2: Vector4::new(0.0, r, r * sp, -r * cp),
    }
}

// ---------------------------------------------------------------------------
// The coordinate map Phi and its pullback metric.
// ---------------------------------------------------------------------------

/// `Phi(r cos theta, r sin theta, z) = e^{iz} (cos r, e^{i theta} sin r)`,
/// taking Cartesian input; stable at the axis.
pub fn phi(p: [f64; 3]) -> PointS3 {
    let (x, y, z) = (p[0], p[1], p[2]);
    let r = x.hypot(y);
    let (sz, cz) = z.sin_cos();
    let cr = r.cos();
    let sinc = if r < 1e-8 { 1.0 - r * r / 6.0 } else { r.sin() / r };
    let ez = num_complex::Complex64::new(cz, sz);
    let z1 = ez * cr;
    let z2 = ez * num_complex::Complex64::new(x, y) * sinc;
    PointS3::from_complex(z1, z2)
}

/// Pullback of the round metric under `phi` in the cylindrical chart
/// `(r, theta, z)`: `dr^2 + sin^2 r dtheta^2 + 2 sin^2 r dtheta dz + dz^2`.
pub fn phi_pullback_metric(r: f64) -> [[f64; 3]; 3] {
    let s2 = r.sin().powi(2);
    [[1.0, 0.0, 0.0], [0.0, s2, s2], [0.0, s2, 1.0]]
}

/// Evaluate `phi` in the cylindrical chart (used by the Gram oracle).
pub fn phi_cyl(r: f64, theta: f64, z: f64) -> PointS3 {
    phi([r * theta.cos(), r * theta.sin(), z])
}

/// Rotation about the z-axis of R^3.
pub fn euclid_rot_z(c: f64, p: [f64; 3]) -> [f64; 3] {
    let (s, co) = c.sin_cos();
    [co * p[0] - s * p[1], s * p[0] + co * p[1], p[2]]
}

/// Half turn about the x-axis of R^3.
pub fn euclid_rot_x_pi(p: [f64; 3]) -> [f64; 3] {
    [p[0], -p[1], -p[2]]
}

/// Max residual over sample points of the three intertwining identities
/// relating Euclidean motions of R^3 through `phi` to rotations about the
/// coordinate circles.
pub fn intertwine_check(c: f64, sample_r: f64) -> [f64; 3] {
    let rc1 = rotation_about_circle(&circle_c1(), c);
    let rc2 = rotation_about_circle(&circle_c2(), c);
    let rc00 = rotation_about_circle(&circle_cphi(0.0, 0.0), std::f64::consts::PI);
    let hopf = rc1.compose(&rc2);
    let mut res = [0.0f64; 3];
    let n = 40;
    for i in 0..n {
        for j in 0..4 {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let z = -2.0 + 1.1 * j as f64;
            let p = [sample_r * theta.cos(), sample_r * theta.sin(), z];
            let lhs0 = phi(euclid_rot_z(c, p));
            let rhs0 = rc1.apply(&phi(p));
            res[0] = res[0].max((lhs0.0 - rhs0.0).norm());
            let lhs1 = phi(euclid_rot_x_pi(p));
            let rhs1 = rc00.apply(&phi(p));
            res[1] = res[1].max((lhs1.0 - rhs1.0).norm());
            let lhs2 = phi([p[0], p[1], p[2] + c]);
            let rhs2 = hopf.apply(&phi(p));
            res[2] = res[2].max((lhs2.0 - rhs2.0).norm());
        }
    }
    res
}

// ---------------------------------------------------------------------------
// Clifford tori and the initial configurations.
// ---------------------------------------------------------------------------

/// Clifford torus described by its pair of totally orthogonal axis circles.
#[derive(Debug, Clone)]
pub struct CliffordTorus {
    pub axis: GreatCircle,
    pub axis_perp: GreatCircle,
}

impl CliffordTorus {
    pub fn of(c: &GreatCircle) -> Self {
        Self { axis: *c, axis_perp: c.perp() }
    }

    /// Points at distance pi/4 from both axis circles.
    pub fn sample(&self, u: f64, v: f64) -> PointS3 {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let a = self.axis.e1 * u.cos() + self.axis.e2 * u.sin();
        let b = self.axis_perp.e1 * v.cos() + self.axis_perp.e2 * v.sin();
        PointS3::new(a * r + b * r)
    }

    pub fn distance_to(&self, p: &PointS3) -> f64 {
        (self.axis.distance_to(p) - std::f64::consts::FRAC_PI_4).abs()
    }

    pub fn same_torus(&self, other: &CliffordTorus) -> bool {
        let ax = self.axis.same_circle(&other.axis) && self.axis_perp.same_circle(&other.axis_perp);
        let sw = self.axis.same_circle(&other.axis_perp) && self.axis_perp.same_circle(&other.axis);
        ax || sw
    }
}

/// The torus `T = {e^{iz}(cos r, sin r)}` containing the real circle, right
/// handed along the coordinate circles.
pub fn torus_t() -> CliffordTorus {
    let k = 2;
    CliffordTorus {
        axis: circle_cprime(k, 1.0 + k as f64 / 2.0),
        axis_perp: circle_cprime(k, 1.0 + 3.0 * k as f64 / 2.0),
    }
}

/// `T_j`: the rotation of `T` about the first coordinate circle by
/// `(j-1) pi / k`.
pub fn torus_tj(k: u32, j: u32) -> CliffordTorus {
    let rot =
        rotation_about_circle(&circle_c1(), (j as f64 - 1.0) * std::f64::consts::PI / k as f64);
    let t = torus_t();
    CliffordTorus { axis: rot.map_circle(&t.axis), axis_perp: rot.map_circle(&t.axis_perp) }
}

/// `T'`: the torus with the coordinate circles as axes.
pub fn torus_tprime() -> CliffordTorus {
    CliffordTorus { axis: circle_c1(), axis_perp: circle_c2() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConfigurationKind {
    W,
    WPrime,
}

/// An intersection circle of a configuration with the number of tori through
/// it.
#[derive(Debug, Clone)]
pub struct IntersectionCircle {
    pub circle: GreatCircle,
    pub multiplicity: usize,
    pub label: String,
}

/// The initial configuration: k tori through the coordinate circle pair and,
/// for the primed kind, the equidistant torus as well.
#[derive(Debug, Clone)]
pub struct Configuration {
    pub kind: ConfigurationKind,
    pub k: u32,
    pub tori: Vec<CliffordTorus>,
    pub intersection_circles: Vec<IntersectionCircle>,
}

pub fn build_configuration(k: u32, kind: ConfigurationKind) -> Configuration {
    let mut tori: Vec<CliffordTorus> = (1..=k).map(|j| torus_tj(k, j)).collect();
    let mut circles = vec![
        IntersectionCircle { circle: circle_c1(), multiplicity: k as usize, label: "C1".into() },
        IntersectionCircle { circle: circle_c2(), multiplicity: k as usize, label: "C2".into() },
    ];
    if kind == ConfigurationKind::WPrime {
        tori.push(torus_tprime());
        for j in 1..=2 * k {
            circles.push(IntersectionCircle {
                circle: circle_cprime(k, j as f64),
                multiplicity: 2,
                label: format!("C'{j}"),
            });
        }
    }
    Configuration { kind, k, tori, intersection_circles: circles }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScaffoldKind {
    Ckm,
    CkmPrime,
    Min,
}

#[derive(Debug, Clone)]
pub struct Scaffolding {
    pub kind: ScaffoldKind,
    pub circles: Vec<GreatCircle>,
}

/// The scaffolding of great circles required to lie on the surfaces:
/// `Ckm` has k^2 m circles, `CkmPrime` has 2 k^2 m + 2 k m, and `Min` the
/// two circles of the minimal-symmetry setup.
pub fn build_scaffolding(k: u32, m: u32, kind: ScaffoldKind) -> Scaffolding {
    let pi = std::f64::consts::PI;
    let mut circles = Vec::new();
    match kind {
        ScaffoldKind::Ckm => {
            let km = (k * m) as usize;
            for j in 0..km {
                for l in 0..k as usize {
                    let p1 = j as f64 * pi / km as f64;
                    circles.push(circle_cphi(p1, p1 + l as f64 * pi / k as f64));
                }
            }
        }
        ScaffoldKind::CkmPrime => {
            circles = build_scaffolding(k, 2 * m, ScaffoldKind::Ckm).circles;
            let km = (k * m) as usize;
            for j in 0..2 * km {
                circles.push(circle_cdprime(j as f64 * pi / km as f64));
            }
        }
        ScaffoldKind::Min => {
            circles.push(circle_cphi(0.0, 0.0));
            circles.push(circle_cphi(0.0, pi / 2.0));
        }
    }
    Scaffolding { kind, circles }
}

// ---------------------------------------------------------------------------
// Finite symmetry groups.
// ---------------------------------------------------------------------------

pub const GROUP_ENUMERATION_BOUND: usize = 1_000_000;

/// Closure of a generator set under composition, with parity propagation.
/// Deduplication is by matrix distance; a closure exceeding `bound` elements
/// or a parity clash is an error.
pub fn group_closure(
    generators: &[SphereIsometry],
    bound: usize,
) -> Result<Vec<SphereIsometry>, SphereError> {
    let mut elements: Vec<SphereIsometry> = vec![SphereIsometry::identity()];
    let mut frontier: Vec<usize> = vec![0];
    while let Some(idx) = frontier.pop() {
        let current = elements[idx];
        for g in generators {
            let prod = g.compose(&current);
            let mut found = false;
            for e in &elements {
                if e.approx_eq(&prod, 1e-9) {
                    if e.parity != prod.parity {
                        return Err(SphereError::InconsistentParity);
                    }
                    found = true;
                    break;
                }
            }
            if !found {
                elements.push(prod);
                frontier.push(elements.len() - 1);
                if elements.len() > bound {
                    return Err(SphereError::ClosureOverflow(bound));
                }
            }
        }
    }
    Ok(elements)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroupKind {
    G,
    GPrime,
    GMin,
}

/// Generators with parities for the three group families. Reflections through
/// scaffold circles act on the surface side-exchangingly (parity -1); the
/// translation-like and rotation generators preserve sides.
pub fn group_generators(k: u32, m: u32, kind: GroupKind) -> Vec<SphereIsometry> {
    let pi = std::f64::consts::PI;
    match kind {
        GroupKind::G => {
            let km = (k * m) as f64;
            vec![
                rotation_about_circle(&circle_cphi(0.0, 0.0), pi).with_parity(-1),
                rotation_about_circle(&circle_c1(), 2.0 * pi / km)
                    .compose(&rotation_about_circle(&circle_c2(), 2.0 * pi / km)),
                rotation_about_circle(&circle_c1(), 2.0 * pi / k as f64),
            ]
        }
        GroupKind::GPrime => {
            let mut gens = group_generators(k, 2 * m, GroupKind::G);
            // reflection through C'_1 equals the product of the circle
            // reflections through C_{0,0} and C''_0, both of which lie on the
            // primed surfaces, hence parity +1
            gens.push(rotation_about_circle(&circle_cprime(k, 1.0), pi).with_parity(1));
            gens
        }
        GroupKind::GMin => {
            vec![
                rotation_about_circle(&circle_cphi(0.0, 0.0), pi).with_parity(-1),
                rotation_about_circle(&circle_cphi(0.0, pi / 2.0), pi).with_parity(-1),
            ]
        }
    }
}

/// Build the full group for the given kind.
pub fn build_symmetry_group(
    k: u32,
    m: u32,
    kind: GroupKind,
) -> Result<Vec<SphereIsometry>, SphereError> {
    group_closure(&group_generators(k, m, kind), GROUP_ENUMERATION_BOUND)
}

/// Orbit size of a circle (as a set) under a group, and the stabilizer order.
pub fn circle_orbit_and_stabilizer(group: &[SphereIsometry], c: &GreatCircle) -> (usize, usize) {
    let mut orbit: Vec<GreatCircle> = Vec::new();
    let mut stab = 0usize;
    for g in group {
        let img = g.map_circle(c);
        if img.same_circle(c) {
            stab += 1;
        }
        if !orbit.iter().any(|o| o.same_circle(&img)) {
            orbit.push(img);
        }
    }
    (orbit.len(), stab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn perp_of_c1_is_c2() {
        let p = circle_c1().perp();
        assert!(p.same_circle(&circle_c2()));
        assert!((p.e1 - circle_c2().e1).norm() < 1e-12);
        assert!((p.e2 - circle_c2().e2).norm() < 1e-12);
    }

    #[test]
    fn rotation_convention_matches_torus_family() {
        // R_{C1}^phi multiplies the second complex coordinate by e^{i phi}
        let r = rotation_about_circle(&circle_c1(), 0.7);
        let p = PointS3::from_complex(
            num_complex::Complex64::new(0.6, 0.0),
            num_complex::Complex64::new(0.8, 0.0),
        );
        let q = r.apply(&p);
        let expect = PointS3::from_complex(
            num_complex::Complex64::new(0.6, 0.0),
            num_complex::Complex64::from_polar(0.8, 0.7),
        );
        assert!((q.0 - expect.0).norm() < 1e-12);
    }

    #[test]
    fn rotations_compose_to_identity() {
        let c = circle_cprime(3, 2.0);
        let r = rotation_about_circle(&c, PI);
        let id = r.compose(&r);
        assert!(id.approx_eq(&SphereIsometry::identity(), 1e-12));
        let a = rotation_about_circle(&c, 0.9);
        let b = rotation_about_circle(&c, 2.0 * PI - 0.9);
        assert!(a.compose(&b).approx_eq(&SphereIsometry::identity(), 1e-12));
    }

    #[test]
    fn composition_identities_for_circle_reflections() {
        let pi = PI;
        for k in [2u32, 3, 4] {
            let kk = k as f64;
            for (j, l) in [(1.0, 2.0), (2.0, 4.0), (1.0, 3.0)] {
                let lhs = rotation_about_circle(&circle_cprime(k, j), pi)
                    .compose(&rotation_about_circle(&circle_cprime(k, l), pi));
                let rhs = rotation_about_circle(&circle_c1(), (j - l) * pi / kk)
                    .compose(&rotation_about_circle(&circle_c2(), (l - j) * pi / kk));
                assert!(lhs.approx_eq(&rhs, 1e-12), "k={k} j={j} l={l}");
            }
        }
        for k in [2u32, 3] {
            let lhs = rotation_about_circle(&circle_cphi(0.0, 0.0), pi)
                .compose(&rotation_about_circle(&circle_cprime(k, 1.0), pi));
            let rhs = rotation_about_circle(&circle_cdprime(0.0), pi);
            assert!(lhs.approx_eq(&rhs, 1e-12), "k={k}");
        }
    }

    #[test]
    fn composition_identity_for_cphi_reflections() {
        let pi = PI;
        let mut state = 7u64;
        let mut rand = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10 {
            let (p1, p2, q1, q2) = (rand() * pi, rand() * pi, rand() * pi, rand() * pi);
            let lhs = rotation_about_circle(&circle_cphi(p1, p2), pi)
                .compose(&rotation_about_circle(&circle_cphi(q1, q2), pi));
            let rhs = rotation_about_circle(&circle_c1(), 2.0 * (p2 - q2))
                .compose(&rotation_about_circle(&circle_c2(), 2.0 * (p1 - q1)));
            assert!(lhs.approx_eq(&rhs, 1e-11));
        }
        for _ in 0..10 {
            let (s1, s2) = (rand() * 2.0 * pi, rand() * 2.0 * pi);
            let lhs = rotation_about_circle(&circle_cdprime(s1), pi)
                .compose(&rotation_about_circle(&circle_cdprime(s2), pi));
            let rhs = rotation_about_circle(&circle_c1(), s1 - s2)
                .compose(&rotation_about_circle(&circle_c2(), s1 - s2));
            assert!(lhs.approx_eq(&rhs, 1e-11));
        }
    }

    #[test]
    fn cprime_perp_relation() {
        for k in [2u32, 3, 5] {
            for j in 1..=k {
                let c = circle_cprime(k, j as f64);
                let cp = circle_cprime(k, (j + k) as f64);
                assert!(c.perp().same_circle(&cp), "k={k} j={j}");
            }
        }
    }

    #[test]
    fn phi_axis_and_torus_images() {
        for i in 0..8 {
            let z = 0.9 * i as f64;
            let p = phi([0.0, 0.0, z]);
            assert!(circle_c1().distance_to(&p) < 1e-12);
        }
        let t = torus_t();
        for i in 0..20 {
            let x = -1.5 + 0.15 * i as f64;
            let p = phi([x, 0.0, 0.3 * i as f64]);
            assert!(t.distance_to(&p) < 1e-10, "x={x}");
        }
        let cd = circle_cdprime(0.0);
        for i in 0..24 {
            let th = 2.0 * PI * i as f64 / 24.0;
            let p = phi([PI / 4.0 * th.cos(), PI / 4.0 * th.sin(), -th / 2.0]);
            assert!(cd.distance_to(&p) < 1e-12, "theta={th}");
        }
        let c = circle_cprime(2, 1.0);
        for i in 0..10 {
            let p = phi([PI / 4.0, 0.0, 0.5 * i as f64]);
            assert!(c.distance_to(&p) < 1e-12);
        }
    }

    #[test]
    fn pullback_metric_values_and_gram_oracle() {
        let g = phi_pullback_metric(PI / 4.0);
        assert!((g[1][1] - 0.5).abs() < 1e-15);
        assert!((g[1][2] - 0.5).abs() < 1e-15);
        assert!((g[2][2] - 1.0).abs() < 1e-15);
        let mut state = 99u64;
        let mut rand = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let h = 1e-4;
        for _ in 0..100 {
            let r = 0.05 + 1.4 * rand();
            let th = 2.0 * PI * rand();
            let z = 4.0 * rand();
            let fd = |dr: f64, dt: f64, dz: f64| phi_cyl(r + dr, th + dt, z + dz).0;
            let dr = (fd(h, 0.0, 0.0) - fd(-h, 0.0, 0.0)) / (2.0 * h);
            let dt = (fd(0.0, h, 0.0) - fd(0.0, -h, 0.0)) / (2.0 * h);
            let dz = (fd(0.0, 0.0, h) - fd(0.0, 0.0, -h)) / (2.0 * h);
            let gram = [
                [dr.dot(&dr), dr.dot(&dt), dr.dot(&dz)],
                [dt.dot(&dr), dt.dot(&dt), dt.dot(&dz)],
                [dz.dot(&dr), dz.dot(&dt), dz.dot(&dz)],
            ];
            let g = phi_pullback_metric(r);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((gram[i][j] - g[i][j]).abs() < 1e-6, "entry {i}{j}");
                }
            }
        }
    }

    #[test]
    fn pullback_deviation_from_euclidean_is_quadratic() {
        for i in 1..30 {
            let r = 0.01 * i as f64;
            let g = phi_pullback_metric(r);
            let dev1 = (g[1][1] - r * r).abs();
            let dev2 = g[1][2].abs();
            let ratio = dev1.max(dev2) / (r * r);
            assert!(ratio < 2.0, "r={r} ratio={ratio}");
        }
    }

    #[test]
    fn intertwine_residuals() {
        for c in [0.0, 0.3, 1.7] {
            for r in [0.1, 0.5, 0.7] {
                let res = intertwine_check(c, r);
                for v in res {
                    assert!(v < 1e-12, "c={c} r={r} res={v}");
                }
            }
        }
    }

    #[test]
    fn torus_samples_at_quarter_distance() {
        let c = circle_cprime(3, 2.0);
        let t = CliffordTorus::of(&c);
        for i in 0..12 {
            for j in 0..12 {
                let u = 2.0 * PI * i as f64 / 12.0;
                let v = 2.0 * PI * j as f64 / 12.0;
                let p = t.sample(u, v);
                assert!((c.distance_to(&p) - PI / 4.0).abs() < 1e-12);
                assert!((c.perp().distance_to(&p) - PI / 4.0).abs() < 1e-12);
            }
        }
        let t2 = CliffordTorus::of(&c.perp());
        for i in 0..8 {
            let p = t2.sample(0.37 * i as f64, 1.1 * i as f64);
            assert!(t.distance_to(&p) < 1e-12);
        }
    }

    #[test]
    fn configuration_shapes() {
        for k in [2u32, 3] {
            let cfg = build_configuration(k, ConfigurationKind::W);
            assert_eq!(cfg.tori.len(), k as usize);
            assert_eq!(cfg.intersection_circles.len(), 2);
        }
        let cfgp = build_configuration(2, ConfigurationKind::WPrime);
        assert_eq!(cfgp.intersection_circles.len(), 6);
        assert_eq!(cfgp.tori.len(), 3);
    }

    #[test]
    fn tori_meet_at_equal_angles_along_c1() {
        // angle between T_j and T_l along C1 equals (j - l) pi / k, measured
        // between the torus normals at a common point of C1
        // the rotation about C1 by (j-l) pi / k carries T_l to T_j, which is
        // exactly the constant-angle statement
        for k in [2u32, 3, 4] {
            let cfg = build_configuration(k, ConfigurationKind::W);
            for j in 1..=k as usize {
                for l in 1..=k as usize {
                    if j >= l {
                        continue;
                    }
                    let tj = &cfg.tori[j - 1];
                    let tl = &cfg.tori[l - 1];
                    let ang = (j as f64 - l as f64) * PI / k as f64;
                    let rot = rotation_about_circle(&circle_c1(), ang);
                    let mapped = CliffordTorus {
                        axis: rot.map_circle(&tl.axis),
                        axis_perp: rot.map_circle(&tl.axis_perp),
                    };
                    assert!(mapped.same_torus(tj), "k={k} j={j} l={l}");
                }
            }
        }
    }

    #[test]
    fn torus_through_intersection_circles() {
        for k in [2u32, 3] {
            for j in 1..=k {
                let tj = torus_tj(k, j);
                for idx in [j, j + k] {
                    let c = circle_cprime(k, idx as f64);
                    for i in 0..10 {
                        let p = c.point(0.63 * i as f64);
                        assert!(tj.distance_to(&p) < 1e-9, "k={k} j={j} idx={idx}");
                        assert!(torus_tprime().distance_to(&p) < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn scaffold_counts() {
        for (k, m) in [(2u32, 1u32), (2, 2), (3, 1), (3, 2)] {
            let s = build_scaffolding(k, m, ScaffoldKind::Ckm);
            assert_eq!(s.circles.len(), (k * k * m) as usize, "k={k} m={m}");
            for (i, a) in s.circles.iter().enumerate() {
                for b in &s.circles[i + 1..] {
                    assert!(!a.same_circle(b));
                }
            }
            let sp = build_scaffolding(k, m, ScaffoldKind::CkmPrime);
            assert_eq!(sp.circles.len(), (2 * k * k * m + 2 * k * m) as usize);
        }
    }

    #[test]
    fn scaffold_meets_c1_at_roots_of_unity() {
        let (k, m) = (2u32, 2u32);
        let s = build_scaffolding(k, m, ScaffoldKind::Ckm);
        let km = (k * m) as usize;
        for j in 0..2 * km {
            let ang = j as f64 * PI / km as f64;
            let p = circle_c1().point(ang);
            let through: usize = s.circles.iter().filter(|c| c.distance_to(&p) < 1e-9).count();
            assert_eq!(through, k as usize, "j={j}");
        }
        let p = circle_c1().point(0.5 * PI / km as f64);
        assert!(s.circles.iter().all(|c| c.distance_to(&p) > 1e-3));
    }

    #[test]
    fn scaffold_lies_in_configuration() {
        for (k, m, kind, ckind) in [
            (2u32, 1u32, ScaffoldKind::Ckm, ConfigurationKind::W),
            (3, 1, ScaffoldKind::Ckm, ConfigurationKind::W),
            (2, 1, ScaffoldKind::CkmPrime, ConfigurationKind::WPrime),
        ] {
            let s = build_scaffolding(k, m, kind);
            let cfg = build_configuration(k, ckind);
            for c in &s.circles {
                for i in 0..16 {
                    let p = c.point(2.0 * PI * i as f64 / 16.0);
                    let d =
                        cfg.tori.iter().map(|t| t.distance_to(&p)).fold(f64::INFINITY, f64::min);
                    assert!(d < 1e-9, "scaffold point off configuration: {d}");
                }
            }
        }
    }

    #[test]
    fn group_min_has_order_four() {
        let g = build_symmetry_group(2, 1, GroupKind::GMin).unwrap();
        assert_eq!(g.len(), 4);
        let rc1 = rotation_about_circle(&circle_c1(), PI);
        assert!(g.iter().any(|e| e.approx_eq(&rc1, 1e-12)));
    }

    #[test]
    fn group_orders_and_orbit_stabilizer() {
        for (k, m) in [(2u32, 1u32), (2, 2), (3, 1), (3, 2)] {
            let g = build_symmetry_group(k, m, GroupKind::G).unwrap();
            assert_eq!(g.len(), (2 * k * k * m) as usize, "k={k} m={m}");
            let (orbit, stab) = circle_orbit_and_stabilizer(&g, &circle_cphi(0.0, 0.0));
            assert_eq!(orbit * stab, g.len(), "orbit-stabilizer k={k} m={m}");
        }
    }

    #[test]
    fn group_parity_is_homomorphism() {
        let g = build_symmetry_group(2, 2, GroupKind::G).unwrap();
        for a in g.iter().take(8) {
            for b in g.iter().take(8) {
                let ab = a.compose(b);
                let found = g.iter().find(|e| e.approx_eq(&ab, 1e-9)).unwrap();
                assert_eq!(found.parity, a.parity * b.parity);
            }
        }
        for e in &g {
            assert!(e.orthogonality_defect() < 1e-12);
        }
    }

    #[test]
    fn gprime_contains_g2m_and_extra_reflection() {
        let (k, m) = (2u32, 1u32);
        let gp = build_symmetry_group(k, m, GroupKind::GPrime).unwrap();
        let g2m = build_symmetry_group(k, 2 * m, GroupKind::G).unwrap();
        for e in &g2m {
            assert!(gp.iter().any(|f| f.approx_eq(e, 1e-9)));
        }
        let refl = rotation_about_circle(&circle_cprime(k, 1.0), PI);
        assert!(gp.iter().any(|f| f.approx_eq(&refl, 1e-9)));
        assert!(gp.len() > g2m.len());
    }

    #[test]
    fn group_stabilizes_configuration() {
        let (k, m) = (3u32, 1u32);
        let g = build_symmetry_group(k, m, GroupKind::G).unwrap();
        let cfg = build_configuration(k, ConfigurationKind::W);
        for e in &g {
            for t in &cfg.tori {
                let mapped = CliffordTorus {
                    axis: e.map_circle(&t.axis),
                    axis_perp: e.map_circle(&t.axis_perp),
                };
                assert!(
                    cfg.tori.iter().any(|u| u.same_torus(&mapped)),
                    "group element does not permute the tori"
                );
            }
        }
    }

    #[test]
    fn extra_symmetry_of_w2prime() {
        let r = rotation_about_circle(&circle_cprime(2, 1.0), PI / 2.0);
        let cfg = build_configuration(2, ConfigurationKind::WPrime);
        for t in &cfg.tori {
            let mapped = CliffordTorus {
                axis: r.map_circle(&t.axis),
                axis_perp: r.map_circle(&t.axis_perp),
            };
            assert!(cfg.tori.iter().any(|u| u.same_torus(&mapped)));
        }
    }

    #[test]
    fn same_chirality_tori_intersect_only_on_axes() {
        let t1 = torus_tj(2, 1);
        let t2 = torus_tj(2, 2);
        let n = 60;
        for i in 0..n {
            for j in 0..n {
                let p = t1.sample(2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64);
                if t2.distance_to(&p) < 1e-6 {
                    let d = circle_c1().distance_to(&p).min(circle_c2().distance_to(&p));
                    assert!(d < 1e-5, "intersection off the axis circles: {d}");
                }
            }
        }
    }

    #[test]
    fn torus_chirality() {
        let t = torus_t();
        let pos = rotation_about_circle(&circle_c1(), 0.37)
            .compose(&rotation_about_circle(&circle_c2(), 0.37));
        let neg = rotation_about_circle(&circle_c1(), 0.37)
            .compose(&rotation_about_circle(&circle_c2(), -0.37));
        let mut pos_ok = true;
        let mut neg_ok = true;
        for i in 0..14 {
            let p = t.sample(0.7 * i as f64, 1.3 * i as f64);
            if t.distance_to(&pos.apply(&p)) > 1e-9 {
                pos_ok = false;
            }
            if t.distance_to(&neg.apply(&p)) > 1e-9 {
                neg_ok = false;
            }
        }
        assert!(pos_ok && !neg_ok);
    }
}
