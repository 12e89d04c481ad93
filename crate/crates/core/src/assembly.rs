//! Assembly of the initial surfaces: truncated straightened towers wrapped
//! around the intersection circles of a torus configuration, mapped into S^3,
//! and stitched along shared seam circles into a watertight mesh.
//!
//! One master grid per tower class covers the fundamental tile (the image of
//! the sector `0 <= arg w <= pi/2k`, `|w| <= 1`); the full tower is tiled by
//! exact placements of that grid (rotations, the two mirrors, the half turn,
//! and vertical periods), with all shared boundary vertices resolved through
//! canonical integer keys so the mesh is watertight by construction, never by
//! epsilon welding. Seams between different towers are the only place where
//! positions from two pipelines meet; they are matched on a spacing-scale
//! lattice with a strict tolerance check.

use std::collections::HashMap;

use nalgebra::Vector4;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::cutoff::cutoff;
use crate::mesh::{RegionTag, SurfaceMesh, TriangleLocator};
use crate::sphere::{
    circle_c1, circle_c2, circle_cphi, circle_cprime, phi, rotation_about_circle,
    build_configuration, Configuration, ConfigurationKind, GreatCircle, PointS3, SphereIsometry,
};
use crate::weierstrass::{
    chart_szt, newton_march_sz, normalize_point, straightening_radius, weierstrass_map,
    wing_invert_seeded, wing_onset_assembly, WeierstrassError,
};

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("invalid surface data: {0}")]
    InvalidSpec(String),
    #[error("m too small: straightening window [{a:.3}, {hi:.3}] does not fit below the truncation radius {rho:.3}")]
    MTooSmall { a: f64, hi: f64, rho: f64 },
    #[error("seam mismatch while stitching: {0}")]
    SeamMismatch(String),
    #[error("wing evaluation failed: {0}")]
    Wing(#[from] WeierstrassError),
    #[error("mesh defect: {0}")]
    Mesh(#[from] crate::mesh::MeshError),
}

/// Discrete data of an initial surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InitialSurfaceSpec {
    M { k: u32, m: u32, n1: u32, n2: u32, sigma: u8 },
    N { k: u32, m: u32, n: u32, np1: u32, npm1: u32, sp1: u8, spm1: u8 },
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl InitialSurfaceSpec {
    pub fn validate(&self) -> Result<(), AssemblyError> {
        match *self {
            InitialSurfaceSpec::M { k, m, n1, n2, sigma } => {
                if k < 2 {
                    return Err(AssemblyError::InvalidSpec("k must be at least 2".into()));
                }
                if m < 1 || n1 < 1 || n2 < 1 {
                    return Err(AssemblyError::InvalidSpec("m, n1, n2 must be positive".into()));
                }
                if gcd(n1, n2) != 1 {
                    return Err(AssemblyError::InvalidSpec(format!(
                        "n1 = {n1} and n2 = {n2} must be relatively prime"
                    )));
                }
                if sigma > 1 {
                    return Err(AssemblyError::InvalidSpec("sigma must be 0 or 1".into()));
                }
            }
            InitialSurfaceSpec::N { k, m, n, np1, npm1, sp1, spm1 } => {
                if k < 2 {
                    return Err(AssemblyError::InvalidSpec("k must be at least 2".into()));
                }
                if m < 1 || n < 1 || np1 < 1 || npm1 < 1 {
                    return Err(AssemblyError::InvalidSpec("periods must be positive".into()));
                }
                if gcd(gcd(n, np1), npm1) != 1 {
                    return Err(AssemblyError::InvalidSpec(format!(
                        "n = {n}, n'_1 = {np1}, n'_-1 = {npm1} must be relatively prime"
                    )));
                }
                if sp1 > 1 || spm1 > 1 {
                    return Err(AssemblyError::InvalidSpec("alignments must be 0 or 1".into()));
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> u32 {
        match *self {
            InitialSurfaceSpec::M { k, .. } | InitialSurfaceSpec::N { k, .. } => k,
        }
    }

    pub fn m(&self) -> u32 {
        match *self {
            InitialSurfaceSpec::M { m, .. } | InitialSurfaceSpec::N { m, .. } => m,
        }
    }

    /// Genus of the closed surface, by the handle-count formulas.
    pub fn genus_formula(&self) -> i64 {
        match *self {
            InitialSurfaceSpec::M { k, m, n1, n2, .. } => {
                (k as i64) * (k as i64 - 1) * m as i64 * (n1 as i64 + n2 as i64) + 1
            }
            InitialSurfaceSpec::N { k, m, n, np1, npm1, .. } => {
                2 * (k as i64) * (k as i64) * m as i64 * (np1 as i64 + npm1 as i64)
                    + 4 * k as i64 * m as i64 * n as i64 * (k as i64 - 1)
                    + 1
            }
        }
    }

    pub fn configuration(&self) -> Configuration {
        match *self {
            InitialSurfaceSpec::M { k, .. } => build_configuration(k, ConfigurationKind::W),
            InitialSurfaceSpec::N { k, .. } => build_configuration(k, ConfigurationKind::WPrime),
        }
    }

    pub fn group_kind(&self) -> crate::sphere::GroupKind {
        match *self {
            InitialSurfaceSpec::M { .. } => crate::sphere::GroupKind::G,
            InitialSurfaceSpec::N { .. } => crate::sphere::GroupKind::GPrime,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            InitialSurfaceSpec::M { k, m, n1, n2, sigma } => {
                format!("M({k},{m},{n1},{n2},{sigma})")
            }
            InitialSurfaceSpec::N { k, m, n, np1, npm1, sp1, spm1 } => {
                format!("N({k},{m},{n},{np1},{npm1},{sp1},{spm1})")
            }
        }
    }
}

/// One truncated tower wrapped around an intersection circle.
#[derive(Debug, Clone)]
pub struct TowerInstance {
    pub label: String,
    pub kc: u32,
    pub m_c: u32,
    /// truncation radius in tower units
    pub rho: f64,
    /// straightening onset and blend width in tower units
    pub a_eff: f64,
    pub width: f64,
    pub positioning: SphereIsometry,
    pub axis: GreatCircle,
}

/// Desk-scale straightening schedule. The canonical choice is the radius
/// `m pi/4 - 10` with unit blend width; when that radius does not fit between
/// the wing onset and the truncation, or when the wing is still too tall
/// there for a unit-width cutoff, the blend instead starts at the onset and
/// uses all the room left before a short exactly-flat margin. The curvature
/// of a blend over `[a, a+w]` scales like `e^{-a} / w^2`, which decides the
/// crossover.
fn straightening_policy(kc: u32, m: u32, rho: f64) -> Result<(f64, f64), AssemblyError> {
    let onset = wing_onset_assembly(kc);
    let delta = (0.3 * (rho - onset)).clamp(0.08, 0.6);
    let hi = rho - delta;
    let a = onset;
    if a + 0.04 >= hi {
        return Err(AssemblyError::MTooSmall { a, hi, rho });
    }
    let wide = (a, hi - a);
    let a_paper = straightening_radius(m);
    if a_paper > onset && a_paper + 1.0 <= hi {
        let kappa_paper = (-a_paper).exp();
        let kappa_wide = (-wide.0).exp() / (wide.1 * wide.1);
        if kappa_paper <= kappa_wide {
            return Ok((a_paper, 1.0));
        }
    }
    Ok(wide)
}

/// The towers of a surface, with positioning rotations taken verbatim from
/// the defining unions.
pub fn towers_for(spec: &InitialSurfaceSpec) -> Result<Vec<TowerInstance>, AssemblyError> {
    let pi = std::f64::consts::PI;
    let mut towers = Vec::new();
    match *spec {
        InitialSurfaceSpec::M { k, m, n1, n2, sigma } => {
            for (j, nj) in [(1u32, n1), (2u32, n2)] {
                let m_c = k * m * nj;
                let rho = m_c as f64 * pi / 4.0;
                let mut pos = SphereIsometry::identity();
                if j == 2 {
                    pos = rotation_about_circle(&circle_cprime(k, 1.0), pi);
                    if sigma == 1 {
                        pos = rotation_about_circle(&circle_c2(), pi / k as f64).compose(&pos);
                    }
                }
                let (a_eff, width) = straightening_policy(k, m, rho)?;
                towers.push(TowerInstance {
                    label: format!("C{j}"),
                    kc: k,
                    m_c,
                    rho,
                    a_eff,
                    width,
                    axis: pos.map_circle(&circle_c1()),
                    positioning: pos,
                });
            }
        }
        InitialSurfaceSpec::N { k, m, n, np1, npm1, sp1, spm1 } => {
            let m_c = 2 * k * m * n;
            let rho = m_c as f64 * (pi / 4.0 - pi / (4.0 * k as f64));
            for j in 0..2u32 {
                let mut pos = SphereIsometry::identity();
                if j == 1 {
                    pos = rotation_about_circle(&circle_cprime(k, 1.0), pi);
                }
                let (a_eff, width) = straightening_policy(k, m, rho)?;
                towers.push(TowerInstance {
                    label: format!("C{}", j + 1),
                    kc: k,
                    m_c,
                    rho,
                    a_eff,
                    width,
                    axis: pos.map_circle(&circle_c1()),
                    positioning: pos,
                });
            }
            let base = rotation_about_circle(&circle_cphi(0.0, 0.0), pi / 4.0)
                .compose(&rotation_about_circle(&circle_cphi(pi / 2.0, pi / 2.0), pi / 4.0));
            for j in 0..2 * k {
                let even = j % 2 == 0;
                let (npj, spj) = if even { (np1, sp1) } else { (npm1, spm1) };
                let m_cp = 2 * k * m * npj;
                let rho_p = m_cp as f64 * pi / (4.0 * k as f64);
                let mut pos = base;
                if spj == 1 {
                    let ang = pi / (k * m * npj) as f64;
                    let hopf = rotation_about_circle(&circle_c1(), ang)
                        .compose(&rotation_about_circle(&circle_c2(), ang));
                    pos = hopf.compose(&pos);
                }
                pos = rotation_about_circle(&circle_c1(), j as f64 * pi / k as f64).compose(&pos);
                let (a_eff, width) = straightening_policy(2, m, rho_p)?;
                towers.push(TowerInstance {
                    label: format!("C'@{j}"),
                    kc: 2,
                    m_c: m_cp,
                    rho: rho_p,
                    a_eff,
                    width,
                    axis: pos.map_circle(&circle_c1()),
                    positioning: pos,
                });
            }
        }
    }
    Ok(towers)
}

// ---------------------------------------------------------------------------
// Master tile.
// ---------------------------------------------------------------------------

/// Chart provenance of a vertex inside its master tile.
#[derive(Debug, Clone, Copy)]
pub enum MasterChart {
    /// disc parameter of the core region
    Core { w: Complex64 },
    /// blend zone of a wing: graph coordinates plus the disc parameter seed
    Blend { x: f64, z: f64, w: Complex64 },
    /// exactly flat wing strip
    Flat { x: f64, z: f64 },
}

#[derive(Debug, Clone, Copy)]
struct MasterVert {
    pos: [f64; 3],
    chart: MasterChart,
}

/// Master grid over the fundamental tile of a straightened truncated tower.
pub struct MasterTile {
    pub kc: u32,
    pub nv: usize,
    pub m_core: usize,
    pub ni: usize,
    verts: Vec<MasterVert>,
    /// row-0 radial positions of every column (the horizontal ray profile)
    xs_row0: Vec<f64>,
    /// radial positions of the inner mirror-curve vertices per row
    cv: Vec<f64>,
    /// row-nv positions (x, y) per column, at height pi/2
    top_xy: Vec<(f64, f64)>,
    pub a_eff: f64,
    pub width: f64,
    pub rho: f64,
}

fn bisect_monotone(mut lo: f64, mut hi: f64, target: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    let fhi = f(hi);
    let increasing = fhi > flo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm - target) * (if increasing { 1.0 } else { -1.0 }) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

impl MasterTile {
    pub fn build(
        kc: u32,
        rho: f64,
        a_eff: f64,
        width: f64,
        nv: usize,
        m_core: usize,
        nb: usize,
        nf: usize,
    ) -> Result<MasterTile, AssemblyError> {
        let kk = kc as f64;
        let half = std::f64::consts::PI / (2.0 * kk);
        let omega1 = crate::weierstrass::roots_of_minus_one(kc)[0];
        let s_cut = a_eff / kk;

        // row start points on the real segment: height is monotone there
        let z_of_real = |rr: f64| chart_szt(kc, Complex64::new(rr, 0.0)).unwrap().1;
        let s_of_real = |rr: f64| chart_szt(kc, Complex64::new(rr, 0.0)).unwrap().0;
        let mut w_start = vec![Complex64::new(0.0, 0.0); nv + 1];
        let mut s_start = vec![0.0f64; nv + 1];
        for v in 1..=nv {
            let zt = half * v as f64 / nv as f64;
            if v == nv {
                w_start[v] = Complex64::new(1.0 - 1e-12, 0.0);
            } else {
                let r = bisect_monotone(1e-12, 1.0 - 1e-12, zt, &z_of_real);
                w_start[v] = Complex64::new(r, 0.0);
            }
            s_start[v] = s_of_real(w_start[v].re);
            if s_start[v] >= s_cut - 1e-9 {
                return Err(AssemblyError::MTooSmall { a: a_eff, hi: kk * s_start[v], rho });
            }
        }

        // wing x grid: blend columns then flat columns
        let mut wing_xs = Vec::with_capacity(nb + nf + 1);
        for b in 0..=nb {
            wing_xs.push(a_eff + width * b as f64 / nb as f64);
        }
        for f in 1..=nf {
            wing_xs.push(a_eff + width + (rho - a_eff - width) * f as f64 / nf as f64);
        }
        let ni = m_core + nb + nf;

        // solvers along the two boundary curves
        let s_on_ray = |r: f64| chart_szt(kc, omega1 * (r.min(1.0 - 1e-15))).unwrap().0;
        let s_on_arc = |phi_w: f64| chart_szt(kc, Complex64::from_polar(1.0, phi_w)).unwrap().0;
        let solve_ray = |s_target: f64| -> Complex64 {
            if s_target <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let mut hi = 0.9;
            while s_on_ray(hi) < s_target {
                hi = 1.0 - (1.0 - hi) * 0.5;
                if 1.0 - hi < 1e-14 {
                    break;
                }
            }
            omega1 * bisect_monotone(1e-12, hi, s_target, &s_on_ray)
        };
        let solve_arc = |s_target: f64| -> Complex64 {
            let mut hi = half - 1e-4;
            while s_on_arc(hi) < s_target {
                hi = half - (half - hi) * 0.5;
                if half - hi < 1e-13 {
                    break;
                }
            }
            Complex64::from_polar(1.0, bisect_monotone(1e-12, hi, s_target, &s_on_arc))
        };

        let mut verts = vec![
            MasterVert { pos: [0.0; 3], chart: MasterChart::Flat { x: 0.0, z: 0.0 } };
            (nv + 1) * (ni + 1)
        ];
        let at = |i: usize, v: usize| v * (ni + 1) + i;

        for v in 0..=nv {
            let zt = half * v as f64 / nv as f64;
            let z_norm = kk * zt;
            let mut w_prev = w_start[v];
            let mut s_prev = s_start[v];
            for i in 0..=ni {
                let (s_i, is_wing) = if i < m_core {
                    (s_start[v] + (s_cut - s_start[v]) * i as f64 / m_core as f64, false)
                } else {
                    (wing_xs[i - m_core] / kk, true)
                };
                let x_norm = kk * s_i;
                let psi = if is_wing { cutoff(a_eff + width, a_eff, x_norm) } else { 1.0 };
                let exact_flat = is_wing && x_norm >= a_eff + width - 1e-12;
                let (pos, chart): ([f64; 3], MasterChart);
                if exact_flat {
                    pos = [x_norm, 0.0, z_norm];
                    chart = MasterChart::Flat { x: x_norm, z: z_norm };
                } else {
                    // locate the disc parameter; deep in the wing only the
                    // split-singularity inversion keeps full precision
                    let w = if v == 0 {
                        solve_ray(s_i)
                    } else if v == nv {
                        solve_arc(s_i)
                    } else if i == 0 {
                        w_start[v]
                    } else if is_wing {
                        wing_invert_seeded(kc, s_i, zt, w_prev)?.0
                    } else {
                        newton_march_sz(kc, (s_prev, zt), (s_i, zt), w_prev)?
                    };
                    w_prev = w;
                    s_prev = s_i;
                    if !is_wing {
                        let p = normalize_point(kc, weierstrass_map(kc, w)?);
                        let mut q = p.position;
                        // canonical boundary coordinates
                        if v == 0 {
                            q = [x_norm, 0.0, 0.0];
                        } else if v == nv {
                            q[2] = std::f64::consts::FRAC_PI_2;
                        }
                        if i == 0 && v > 0 {
                            // inner mirror curve: exact plane angle
                            let r = q[0].hypot(q[1]);
                            let (sh, ch) = half.sin_cos();
                            q = [r * ch, r * sh, z_norm];
                        }
                        pos = q;
                        chart = MasterChart::Core { w };
                    } else {
                        let (_, _, t) = chart_szt(kc, w)?;
                        let y = if v == 0 { 0.0 } else { psi * kk * t };
                        pos = [x_norm, y, z_norm];
                        chart = MasterChart::Blend { x: x_norm, z: z_norm, w };
                    }
                }
                verts[at(i, v)] = MasterVert { pos, chart };
            }
        }

        let xs_row0: Vec<f64> = (0..=ni).map(|i| verts[at(i, 0)].pos[0]).collect();
        let cv: Vec<f64> = (0..=nv).map(|v| verts[at(0, v)].pos[0].hypot(verts[at(0, v)].pos[1])).collect();
        let top_xy: Vec<(f64, f64)> =
            (0..=ni).map(|i| (verts[at(i, nv)].pos[0], verts[at(i, nv)].pos[1])).collect();

        Ok(MasterTile { kc, nv, m_core, ni, verts, xs_row0, cv, top_xy, a_eff, width, rho })
    }

    fn vert(&self, i: usize, v: usize) -> &MasterVert {
        &self.verts[v * (self.ni + 1) + i]
    }
}

// ---------------------------------------------------------------------------
// Tile placements and canonical keys.
// ---------------------------------------------------------------------------

/// Exact placement of the master tile: optional mirror in y, rotation by an
/// integer multiple of pi/kc, then z -> zsign z + zshift pi.
#[derive(Debug, Clone, Copy)]
pub struct TilePlace {
    pub tu: i64,
    pub mirror: bool,
    pub zsign: i64,
    pub zshift: i64,
}

impl TilePlace {
    fn compose(b: TilePlace, a: TilePlace) -> TilePlace {
        TilePlace {
            tu: b.tu + if b.mirror { -a.tu } else { a.tu },
            mirror: b.mirror ^ a.mirror,
            zsign: b.zsign * a.zsign,
            zshift: b.zsign * a.zshift + b.zshift,
        }
    }

    pub fn apply(&self, kc: u32, p: [f64; 3]) -> [f64; 3] {
        let (x, y, z) = (p[0], if self.mirror { -p[1] } else { p[1] }, p[2]);
        let ang = self.tu as f64 * std::f64::consts::PI / kc as f64;
        let (s, c) = ang.sin_cos();
        [
            c * x - s * y,
            s * x + c * y,
            self.zsign as f64 * z + self.zshift as f64 * std::f64::consts::PI,
        ]
    }

    fn orientation_reversing(&self) -> bool {
        self.mirror ^ (self.zsign < 0)
    }
}

const QUADRANTS: [TilePlace; 4] = [
    TilePlace { tu: 0, mirror: false, zsign: 1, zshift: 0 },  // base
    TilePlace { tu: 1, mirror: true, zsign: 1, zshift: 0 },   // theta mirror
    TilePlace { tu: 0, mirror: false, zsign: -1, zshift: 1 }, // z mirror
    TilePlace { tu: 1, mirror: true, zsign: -1, zshift: 1 },  // both
];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum VKey {
    Axis { lvl: i64 },
    Ray { lvl: i64, dir: i64, i: u32 },
    Mirror { plane: i64, zi: i64 },
    Top { sector: i64, zi: i64, i: u32 },
    Interior { tile: u32, i: u32, v: u32 },
    Seam { dir: i64, zi: i64 },
}

/// Per-tower mesh accumulator with canonical key resolution.
struct TowerBuilder<'a> {
    master: &'a MasterTile,
    inst: &'a TowerInstance,
    key_map: HashMap<VKey, u32>,
}

pub struct BuiltTower {
    pub vertices: Vec<Vector4<f64>>,
    pub triangles: Vec<[u32; 3]>,
    pub charts: Vec<(TilePlace, MasterChart)>,
    /// indices of seam vertices with their key data
    pub seam_vertices: Vec<(u32, i64, i64)>,
}

impl<'a> TowerBuilder<'a> {
    fn lattice(&self) -> (i64, i64, i64) {
        // z lattice: pi/(2 nv); level lattice: pi; wrap counts
        let nv = self.master.nv as i64;
        let m_c = self.inst.m_c as i64;
        (nv, 2 * m_c, 4 * nv * m_c)
    }

    fn classify(&self, place: &TilePlace, i: usize, v: usize) -> VKey {
        let (nv, lvl_mod, zi_mod) = self.lattice();
        let kc2 = 2 * self.master.kc as i64;
        let zi = (place.zsign * v as i64 + 2 * nv * place.zshift).rem_euclid(zi_mod);
        let dir = place.tu.rem_euclid(kc2);
        if i == self.master.ni {
            return VKey::Seam { dir, zi };
        }
        if v == 0 {
            if i == 0 {
                return VKey::Axis { lvl: place.zshift.rem_euclid(lvl_mod) };
            }
            return VKey::Ray { lvl: place.zshift.rem_euclid(lvl_mod), dir, i: i as u32 };
        }
        if i == 0 {
            let plane = (2 * place.tu + if place.mirror { -1 } else { 1 }).rem_euclid(2 * kc2);
            return VKey::Mirror { plane, zi };
        }
        if v == self.master.nv {
            let sector = (2 * place.tu - if place.mirror { 1 } else { 0 }).rem_euclid(2 * kc2);
            return VKey::Top { sector, zi, i: i as u32 };
        }
        VKey::Interior { tile: tile_id(place, self.master.kc, self.inst.m_c), i: i as u32, v: v as u32 }
    }

    /// Canonical tower-unit position for a shared-boundary key.
    fn canonical_pos(&self, key: &VKey) -> [f64; 3] {
        let m = self.master;
        let nv = m.nv as i64;
        let pi = std::f64::consts::PI;
        let kk = m.kc as f64;
        match key {
            VKey::Axis { lvl } => [0.0, 0.0, *lvl as f64 * pi],
            VKey::Ray { lvl, dir, i } => {
                let ang = *dir as f64 * pi / kk;
                let (s, c) = ang.sin_cos();
                let x = m.xs_row0[*i as usize];
                [x * c, x * s, *lvl as f64 * pi]
            }
            VKey::Mirror { plane, zi } => {
                let r2 = zi.rem_euclid(2 * nv);
                let v_eff = r2.min(2 * nv - r2) as usize;
                let ang = *plane as f64 * pi / (2.0 * kk);
                let (s, c) = ang.sin_cos();
                let r = m.cv[v_eff];
                [r * c, r * s, *zi as f64 * pi / (2.0 * nv as f64)]
            }
            VKey::Top { sector, zi, i } => {
                let (x, y) = m.top_xy[*i as usize];
                let (ang, yy) = if sector.rem_euclid(2) == 0 {
                    (*sector as f64 * pi / (2.0 * kk), y)
                } else {
                    ((*sector + 1) as f64 * pi / (2.0 * kk), -y)
                };
                let (s, c) = ang.sin_cos();
                [c * x - s * yy, s * x + c * yy, *zi as f64 * pi / (2.0 * nv as f64)]
            }
            VKey::Seam { dir, zi } => {
                let ang = *dir as f64 * pi / kk;
                let (s, c) = ang.sin_cos();
                [m.rho * c, m.rho * s, *zi as f64 * pi / (2.0 * nv as f64)]
            }
            VKey::Interior { .. } => unreachable!(),
        }
    }
}

fn tile_id(place: &TilePlace, kc: u32, m_c: u32) -> u32 {
    let kc2 = 2 * kc as i64;
    let a = place.tu.rem_euclid(kc2) as u32;
    let b = if place.mirror { 1u32 } else { 0 };
    let c = if place.zsign < 0 { 1u32 } else { 0 };
    let d = place.zshift.rem_euclid(2 * m_c as i64) as u32;
    ((d * 4 + c * 2 + b) * (2 * kc)) + a
}

/// Map a tower-unit point to S^3 through the wrap scaling, the cylindrical
/// coordinate map, and the positioning rotation.
pub fn tower_to_sphere(inst: &TowerInstance, p: [f64; 3]) -> Vector4<f64> {
    let mc = inst.m_c as f64;
    let q = phi([p[0] / mc, p[1] / mc, p[2] / mc]);
    inst.positioning.matrix * q.0
}

/// Build the wrapped tower mesh (seams left open).
fn build_tower(
    inst: &TowerInstance,
    master: &MasterTile,
) -> Result<BuiltTower, AssemblyError> {
    let kc = master.kc;
    let mut b = TowerBuilder { master, inst, key_map: HashMap::new() };
    let mut vertices: Vec<Vector4<f64>> = Vec::new();
    let mut charts: Vec<(TilePlace, MasterChart)> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    let mut seam_vertices: Vec<(u32, i64, i64)> = Vec::new();

    let lunes = 2 * kc as i64;
    for period in 0..inst.m_c as i64 {
        for lune in 0..lunes {
            let lplace = TilePlace {
                tu: -lune,
                mirror: false,
                zsign: if lune % 2 == 0 { 1 } else { -1 },
                zshift: 0,
            };
            let pplace = TilePlace { tu: 0, mirror: false, zsign: 1, zshift: 2 * period };
            for q in QUADRANTS {
                let place = TilePlace::compose(pplace, TilePlace::compose(lplace, q));
                // resolve the grid
                let ni = master.ni;
                let nv = master.nv;
                let mut ids = vec![0u32; (ni + 1) * (nv + 1)];
                for v in 0..=nv {
                    for i in 0..=ni {
                        let key = b.classify(&place, i, v);
                        let id = match key {
                            VKey::Interior { .. } => {
                                let mv = master.vert(i, v);
                                let pos = place.apply(kc, mv.pos);
                                let id = vertices.len() as u32;
                                vertices.push(tower_to_sphere(inst, pos));
                                charts.push((place, mv.chart));
                                id
                            }
                            ref k => {
                                if let Some(&id) = b.key_map.get(k) {
                                    id
                                } else {
                                    let pos = b.canonical_pos(k);
                                    let id = vertices.len() as u32;
                                    vertices.push(tower_to_sphere(inst, pos));
                                    charts.push((place, master.vert(i, v).chart));
                                    b.key_map.insert(k.clone(), id);
                                    if let VKey::Seam { dir, zi } = k {
                                        seam_vertices.push((id, *dir, *zi));
                                    }
                                    id
                                }
                            }
                        };
                        ids[v * (ni + 1) + i] = id;
                    }
                }
                let flip = place.orientation_reversing();
                for v in 0..nv {
                    for i in 0..ni {
                        let v00 = ids[v * (ni + 1) + i];
                        let v10 = ids[v * (ni + 1) + i + 1];
                        let v01 = ids[(v + 1) * (ni + 1) + i];
                        let v11 = ids[(v + 1) * (ni + 1) + i + 1];
                        if v00 == v10 || v00 == v01 {
                            continue;
                        }
                        if flip {
                            triangles.push([v00, v11, v10]);
                            triangles.push([v00, v01, v11]);
                        } else {
                            triangles.push([v00, v10, v11]);
                            triangles.push([v00, v11, v01]);
                        }
                    }
                }
            }
        }
    }
    Ok(BuiltTower { vertices, triangles, charts, seam_vertices })
}

// ---------------------------------------------------------------------------
// Whole-surface assembly.
// ---------------------------------------------------------------------------

/// Chart provenance of an assembled vertex.
#[derive(Debug, Clone, Copy)]
pub struct VertexChart {
    pub tower: u32,
    pub place: TilePlace,
    pub chart: MasterChart,
}

pub struct AssembledSurface {
    pub spec: InitialSurfaceSpec,
    pub mesh: SurfaceMesh,
    pub towers: Vec<TowerInstance>,
    pub charts: Vec<VertexChart>,
    pub seam_vertex_count: usize,
    pub resolution: u32,
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

/// Grid parameters per tower derived from a resolution knob: the seam lattice
/// `nv * m_c` is shared across all towers so seams match vertex for vertex.
fn grid_for(towers: &[TowerInstance], resolution: u32) -> Vec<(usize, usize, usize, usize)> {
    let l0 = towers.iter().map(|t| t.m_c).fold(1u32, lcm);
    let mmax = towers.iter().map(|t| t.m_c).max().unwrap();
    let target = (resolution / 8).max(2);
    let lattice = l0 * ((target * mmax + l0 - 1) / l0).max(1);
    towers
        .iter()
        .map(|t| {
            let nv = (lattice / t.m_c) as usize;
            let m_core = ((resolution / 4).max(4) as usize).min(40);
            let spacing = std::f64::consts::FRAC_PI_2 / nv as f64;
            let nb = ((t.width / spacing).ceil() as usize).clamp(4, 40);
            let nf = (((t.rho - t.a_eff - t.width) / spacing).ceil() as usize).clamp(2, 24);
            (nv, m_core, nb, nf)
        })
        .collect()
}

/// Assemble the watertight initial-surface mesh at the given resolution.
pub fn assemble(spec: &InitialSurfaceSpec, resolution: u32) -> Result<AssembledSurface, AssemblyError> {
    spec.validate()?;
    let resolution = resolution.max(16);
    let towers = towers_for(spec)?;
    let grids = grid_for(&towers, resolution);

    // one master per distinct tower class
    let mut masters: Vec<MasterTile> = Vec::new();
    let mut master_of: Vec<usize> = Vec::new();
    for (t, g) in towers.iter().zip(&grids) {
        let found = masters.iter().position(|m| {
            m.kc == t.kc
                && (m.rho - t.rho).abs() < 1e-12
                && (m.a_eff - t.a_eff).abs() < 1e-12
                && (m.width - t.width).abs() < 1e-12
                && m.nv == g.0
                && m.m_core == g.1
        });
        match found {
            Some(i) => master_of.push(i),
            None => {
                masters.push(MasterTile::build(t.kc, t.rho, t.a_eff, t.width, g.0, g.1, g.2, g.3)?);
                master_of.push(masters.len() - 1);
            }
        }
    }

    let mut vertices: Vec<Vector4<f64>> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    let mut charts: Vec<VertexChart> = Vec::new();
    // seam registry across towers: quantized position -> vertex id
    let mut seam_cells: HashMap<[i64; 4], Vec<u32>> = HashMap::new();
    let seam_cell = 1e-5;
    let mut seam_total = 0usize;

    for (ti, inst) in towers.iter().enumerate() {
        let master = &masters[master_of[ti]];
        let bt = build_tower(inst, master)?;
        let seam_flags: std::collections::HashSet<u32> =
            bt.seam_vertices.iter().map(|s| s.0).collect();
        // remap the tower's vertices into the global pool
        let mut remap = vec![0u32; bt.vertices.len()];
        for (vi, v) in bt.vertices.iter().enumerate() {
            if seam_flags.contains(&(vi as u32)) {
                // match against already-registered seam vertices
                let base = [
                    (v[0] / seam_cell).floor() as i64,
                    (v[1] / seam_cell).floor() as i64,
                    (v[2] / seam_cell).floor() as i64,
                    (v[3] / seam_cell).floor() as i64,
                ];
                let mut found: Option<u32> = None;
                let mut nearest = f64::INFINITY;
                'cells: for a in -1..=1i64 {
                    for b in -1..=1i64 {
                        for c in -1..=1i64 {
                            for d in -1..=1i64 {
                                if let Some(ids) =
                                    seam_cells.get(&[base[0] + a, base[1] + b, base[2] + c, base[3] + d])
                                {
                                    for &id in ids {
                                        let dist = (vertices[id as usize] - v).norm();
                                        nearest = nearest.min(dist);
                                        if dist < 1e-9 {
                                            found = Some(id);
                                            break 'cells;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                if found.is_none() && nearest < 1e-4 {
                    return Err(AssemblyError::SeamMismatch(format!(
                        "tower {} seam vertex off-lattice by {nearest:.3e}",
                        inst.label
                    )));
                }
                let id = match found {
                    Some(id) => {
                        seam_total += 1;
                        id
                    }
                    None => {
                        let id = vertices.len() as u32;
                        vertices.push(*v);
                        charts.push(VertexChart {
                            tower: ti as u32,
                            place: bt.charts[vi].0,
                            chart: bt.charts[vi].1,
                        });
                        seam_cells.entry(base).or_default().push(id);
                        id
                    }
                };
                remap[vi] = id;
            } else {
                let id = vertices.len() as u32;
                vertices.push(*v);
                charts.push(VertexChart {
                    tower: ti as u32,
                    place: bt.charts[vi].0,
                    chart: bt.charts[vi].1,
                });
                remap[vi] = id;
            }
        }
        for t in &bt.triangles {
            triangles.push([remap[t[0] as usize], remap[t[1] as usize], remap[t[2] as usize]]);
        }
    }

    let mut mesh = SurfaceMesh::new(vertices, triangles);
    mesh.audit_watertight().map_err(|e| {
        AssemblyError::SeamMismatch(format!("stitched mesh not watertight: {e}"))
    })?;
    mesh.orient()?;
    mesh.chart_refs = (0..mesh.vertex_count()).map(|i| Some((charts[i].tower, i as u32))).collect();

    let mut out = AssembledSurface {
        spec: *spec,
        mesh,
        towers,
        charts,
        seam_vertex_count: seam_total,
        resolution,
    };
    assign_region_tags(&mut out);
    Ok(out)
}

/// Tag vertices as tower collars or toral sheets by distance to the
/// intersection circles, mirroring the covering by extended standard regions.
fn assign_region_tags(surf: &mut AssembledSurface) {
    let config = surf.spec.configuration();
    let tags: Vec<Option<RegionTag>> = surf
        .mesh
        .vertices
        .iter()
        .map(|v| {
            let p = PointS3::new(*v);
            let mut best: Option<(f64, &TowerInstance)> = None;
            for t in &surf.towers {
                let d = t.axis.distance_to(&p) * t.m_c as f64;
                if d < t.a_eff && best.map_or(true, |(bd, _)| d < bd) {
                    best = Some((d, t));
                }
            }
            if let Some((_, t)) = best {
                return Some(RegionTag::Tower {
                    circle: t.label.clone(),
                    m_c: t.m_c,
                    k_c: t.kc,
                });
            }
            // toral sheet: nearest configuration torus and band
            let mut bi = 0usize;
            let mut bd = f64::INFINITY;
            for (i, t) in config.tori.iter().enumerate() {
                let d = t.distance_to(&p);
                if d < bd {
                    bd = d;
                    bi = i;
                }
            }
            let t = &config.tori[bi];
            let u = t.axis.angle_of(&v);
            let band = if u.rem_euclid(2.0 * std::f64::consts::PI) < std::f64::consts::PI {
                0
            } else {
                1
            };
            Some(RegionTag::Torus { component: format!("T{bi}:{band}") })
        })
        .collect();
    surf.mesh.tags = tags;
}

/// Max over group elements of the one-sided Hausdorff distance from the
/// transformed vertex set to the mesh. True symmetries permute the vertex set
/// exactly, which gives a fast path; anything else falls back to the locator.
pub fn symmetry_invariance(mesh: &SurfaceMesh, group: &[SphereIsometry]) -> f64 {
    let mut locator: Option<TriangleLocator> = None;
    let mut worst: f64 = 0.0;
    for g in group {
        if let Some(perm) = crate::mesh::vertex_permutation(mesh, g, 1e-9) {
            for (i, &j) in perm.iter().enumerate() {
                let d = (g.matrix * mesh.vertices[i] - mesh.vertices[j]).norm();
                worst = worst.max(d);
            }
            continue;
        }
        let loc = locator.get_or_insert_with(|| TriangleLocator::new(mesh));
        for v in &mesh.vertices {
            let img = g.matrix * v;
            let d = loc.distance_to_mesh(&img);
            worst = worst.max(d);
            if worst > 1.0 {
                return worst;
            }
        }
    }
    worst
}

/// Scaffold containment residual: max over dense samples of the scaffold
/// circles of the distance to the mesh.
pub fn scaffold_residual(surf: &AssembledSurface, samples_per_circle: usize) -> f64 {
    let (k, m) = (surf.spec.k(), surf.spec.m());
    let kind = match surf.spec {
        InitialSurfaceSpec::M { .. } => crate::sphere::ScaffoldKind::Ckm,
        InitialSurfaceSpec::N { .. } => crate::sphere::ScaffoldKind::CkmPrime,
    };
    let scaffold = crate::sphere::build_scaffolding(k, m, kind);
    let locator = TriangleLocator::new(&surf.mesh);
    let mut worst: f64 = 0.0;
    for c in &scaffold.circles {
        for i in 0..samples_per_circle {
            let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.382) / samples_per_circle as f64;
            let p = c.point(t);
            worst = worst.max(locator.distance_to_mesh(&p.0));
        }
    }
    worst
}

/// Alignment invariant of an M-surface whose parity regime admits one
/// (m even, both periods odd): whether the global normal points the same way
/// along the circle at both endpoints of a scaffold arc joining the marked
/// points on the two axis circles.
pub fn alignment_invariant(surf: &AssembledSurface) -> Result<bool, AssemblyError> {
    let (_k, m, n1, n2) = match surf.spec {
        InitialSurfaceSpec::M { k, m, n1, n2, .. } => (k, m, n1, n2),
        _ => {
            return Err(AssemblyError::InvalidSpec(
                "alignment invariant defined for M surfaces".into(),
            ))
        }
    };
    if m % 2 != 0 || n1 % 2 == 0 || n2 % 2 == 0 {
        return Err(AssemblyError::InvalidSpec(
            "alignment invariant requires even m and odd periods".into(),
        ));
    }
    let s1 = normal_sign_at(surf, &circle_c1(), 0.0)?;
    let s2 = normal_sign_at(surf, &circle_c2(), 0.0)?;
    Ok(s1 == s2)
}

/// Sign of the mesh normal against the circle velocity at the marked point
/// `circle.point(t0)`, which must be a mesh vertex (an axis saddle).
pub fn normal_sign_at(
    surf: &AssembledSurface,
    circle: &GreatCircle,
    t0: f64,
) -> Result<i8, AssemblyError> {
    let p = circle.point(t0);
    let mut best = (f64::INFINITY, 0usize);
    for (i, v) in surf.mesh.vertices.iter().enumerate() {
        let d = (v - p.0).norm();
        if d < best.0 {
            best = (d, i);
        }
    }
    if best.0 > 1e-8 {
        return Err(AssemblyError::InvalidSpec(format!(
            "marked point not a mesh vertex (nearest {:.2e})",
            best.0
        )));
    }
    let n = surf.mesh.normals[best.1];
    let vel = circle.velocity(t0);
    let d = n.dot(&vel);
    if d.abs() < 1e-6 {
        return Err(AssemblyError::InvalidSpec("normal not aligned with the circle".into()));
    }
    Ok(if d > 0.0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_m(k: u32, m: u32, n1: u32, n2: u32, sigma: u8) -> InitialSurfaceSpec {
        InitialSurfaceSpec::M { k, m, n1, n2, sigma }
    }

    fn spec_n(k: u32, m: u32, n: u32, np1: u32, npm1: u32) -> InitialSurfaceSpec {
        InitialSurfaceSpec::N { k, m, n, np1, npm1, sp1: 0, spm1: 0 }
    }

    #[test]
    fn validation() {
        assert!(spec_m(2, 1, 2, 2, 0).validate().is_err());
        assert!(spec_m(1, 1, 1, 1, 0).validate().is_err());
        assert!(spec_m(2, 1, 1, 2, 0).validate().is_ok());
        assert!(spec_n(2, 1, 2, 2, 2).validate().is_err());
        assert!(spec_n(2, 1, 2, 1, 1).validate().is_ok());
    }

    #[test]
    fn genus_formulas() {
        assert_eq!(spec_m(2, 1, 1, 1, 0).genus_formula(), 5);
        assert_eq!(spec_m(2, 2, 1, 1, 0).genus_formula(), 9);
        assert_eq!(spec_m(3, 1, 1, 1, 0).genus_formula(), 13);
        assert_eq!(spec_m(3, 2, 1, 2, 0).genus_formula(), 37);
        assert_eq!(spec_m(2, 1, 1, 2, 1).genus_formula(), 7);
        assert_eq!(spec_n(2, 1, 1, 1, 1).genus_formula(), 25);
        assert_eq!(spec_n(2, 1, 2, 1, 1).genus_formula(), 33);
        assert_eq!(spec_n(3, 1, 1, 1, 1).genus_formula(), 61);
    }

    #[test]
    fn wings_land_on_configuration_tori() {
        // flat wing strips of every tower must lie on tori of the
        // configuration: this pins the positioning rotations
        for spec in [spec_m(2, 1, 1, 1, 0), spec_m(2, 1, 1, 1, 1)] {
            let towers = towers_for(&spec).unwrap();
            let config = spec.configuration();
            for t in &towers {
                for wing in 0..2 * t.kc as i64 {
                    for iz in 0..6 {
                        let x = t.rho - 0.02;
                        let ang = wing as f64 * std::f64::consts::PI / t.kc as f64;
                        let p = [x * ang.cos(), x * ang.sin(), 0.4 + 0.9 * iz as f64];
                        let v = tower_to_sphere(t, p);
                        let q = PointS3::new(v);
                        let d = config
                            .tori
                            .iter()
                            .map(|tor| tor.distance_to(&q))
                            .fold(f64::INFINITY, f64::min);
                        assert!(d < 1e-9, "{} wing {wing}: off tori by {d:.2e}", t.label);
                    }
                }
            }
        }
        let spec = spec_n(2, 1, 1, 1, 1);
        let towers = towers_for(&spec).unwrap();
        let config = spec.configuration();
        for t in &towers {
            for wing in 0..2 * t.kc as i64 {
                let x = t.rho - 0.01;
                let ang = wing as f64 * std::f64::consts::PI / t.kc as f64;
                let p = [x * ang.cos(), x * ang.sin(), 1.1];
                let v = tower_to_sphere(t, p);
                let q = PointS3::new(v);
                let d =
                    config.tori.iter().map(|tor| tor.distance_to(&q)).fold(f64::INFINITY, f64::min);
                assert!(d < 1e-9, "{} wing {wing}: off tori by {d:.2e}", t.label);
            }
        }
    }

    #[test]
    fn master_tile_builds() {
        let (a, w) = straightening_policy(2, 1, std::f64::consts::FRAC_PI_2).unwrap();
        let m = MasterTile::build(2, std::f64::consts::FRAC_PI_2, a, w, 4, 6, 4, 2).unwrap();
        // join continuity between core and wing columns
        for v in 0..=m.nv {
            for i in 1..=m.ni {
                let p = m.vert(i, v).pos;
                let q = m.vert(i - 1, v).pos;
                let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2))
                    .sqrt();
                assert!(d < 0.8, "jump {d} at col {i} row {v}");
            }
        }
        // row 0 lies on the horizontal ray exactly
        for i in 0..=m.ni {
            assert_eq!(m.vert(i, 0).pos[1], 0.0);
            assert_eq!(m.vert(i, 0).pos[2], 0.0);
        }
    }

    #[test]
    fn smallest_m_surface_is_watertight_genus_five() {
        let surf = assemble(&spec_m(2, 1, 1, 1, 0), 16).unwrap();
        surf.mesh.audit_watertight().unwrap();
        assert_eq!(surf.mesh.genus().unwrap(), 5);
        assert!(crate::mesh::vertices_on_sphere_defect(&surf.mesh) < 1e-12);
    }
}
