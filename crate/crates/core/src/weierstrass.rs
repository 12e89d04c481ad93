//! The maximally symmetric singly periodic towers of order k in Euclidean
//! 3-space, built from their Weierstrass data on the closed unit disc
//! punctured at the 2k-th roots of -1.
//!
//! Two coordinate conventions appear here:
//!
//! * "chart" coordinates: the raw Weierstrass image of the disc. The
//!   fundamental sector `D = {r e^{i phi}: 0 <= r <= 1, 0 <= phi <= pi/2k}`
//!   maps into the slab `0 <= z <= pi/2k` and the wedge
//!   `-pi/2k <= theta <= 0`; the wing sits at the puncture
//!   `omega_1 = e^{i pi/2k}`.
//! * "normalized" coordinates: the chart image scaled by `k` and rotated by
//!   `pi/2k` about the z-axis. The tower then has vertical period `2 pi`,
//!   horizontal lines at `z` in `pi Z` along the directions `j pi / k`, and
//!   its wings are asymptotic to the vertical planes through those lines.

use num_complex::Complex64;
use thiserror::Error;

use crate::cutoff::cutoff;

#[derive(Debug, Error)]
pub enum WeierstrassError {
    #[error("parameter collides with a 2k-th root of -1")]
    SingularParameter,
    #[error("Newton inversion diverged (last iterate {last}, residual {residual:.3e})")]
    NewtonDivergence { last: Complex64, residual: f64 },
    #[error("straightening radius {a:.3} does not exceed the wing onset {onset:.3}; m too small")]
    MTooSmall { a: f64, onset: f64 },
    #[error("not enough samples for a fit")]
    InsufficientSamples,
}

/// Point of the Euclidean tower.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TowerPoint {
    pub position: [f64; 3],
}

impl TowerPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { position: [x, y, z] }
    }
}

/// Complex parameter in the closed unit disc, kept away from the punctures.
#[derive(Debug, Clone, Copy)]
pub struct UnitDiscParameter {
    pub w: Complex64,
}

impl UnitDiscParameter {
    pub fn new(k: u32, w: Complex64) -> Result<Self, WeierstrassError> {
        if w.norm() > 1.0 + 1e-12 {
            return Err(WeierstrassError::SingularParameter);
        }
        for root in roots_of_minus_one(k) {
            if (w - root).norm() < 1e-13 {
                return Err(WeierstrassError::SingularParameter);
            }
        }
        Ok(Self { w })
    }

    /// Chart-coordinate image under the order-k embedding.
    pub fn map(&self, k: u32) -> Result<TowerPoint, WeierstrassError> {
        weierstrass_map(k, self.w)
    }
}

/// The 2k-th roots of -1, `omega_j = e^{i pi (2j-1) / 2k}` for j = 1..=2k,
/// so `omega_1 = e^{i pi / 2k}` closes the fundamental sector.
pub fn roots_of_minus_one(k: u32) -> Vec<Complex64> {
    let kk = k as f64;
    (1..=2 * k)
        .map(|j| Complex64::from_polar(1.0, std::f64::consts::PI * (2.0 * j as f64 - 1.0) / (2.0 * kk)))
        .collect()
}

fn check_regular(k: u32, w: Complex64) -> Result<(), WeierstrassError> {
    for root in roots_of_minus_one(k) {
        if (w - root).norm() < 1e-13 {
            return Err(WeierstrassError::SingularParameter);
        }
    }
    Ok(())
}

/// Chart-coordinate Weierstrass embedding of the punctured disc.
///
/// x and y are log sums over the punctures, z a sum of arguments; each
/// `arg(1 - w/omega_j)` stays in the right half plane for |w| <= 1, so the
/// per-term principal branch is the branch vanishing at the origin.
pub fn weierstrass_map(k: u32, w: Complex64) -> Result<TowerPoint, WeierstrassError> {
    check_regular(k, w)?;
    let kk = k as f64;
    let mut x = 0.0;
    let mut y = 0.0;
    let mut z = 0.0;
    for (idx, omega) in roots_of_minus_one(k).into_iter().enumerate() {
        let j = idx + 1;
        let log_term = (w - omega).norm().ln();
        x += -omega.re * log_term;
        y += omega.im * log_term;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        z += sign * (Complex64::new(1.0, 0.0) - w / omega).arg();
    }
    Ok(TowerPoint::new(x / kk, y / kk, z / kk))
}

/// Holomorphic integrands of (dx, dy, dz) with respect to w.
///
/// `dx = Re[f_x dw]` and so on. These are the rows of every Jacobian used in
/// the Newton inversions and the conformal metric density.
pub fn weierstrass_differential(
    k: u32,
    w: Complex64,
) -> Result<[Complex64; 3], WeierstrassError> {
    check_regular(k, w)?;
    let n = 2 * k as i32;
    let wk2 = w.powi(n - 2);
    let denom = Complex64::new(1.0, 0.0) + w.powi(n);
    if denom.norm() < 1e-300 {
        return Err(WeierstrassError::SingularParameter);
    }
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let fx = (one - wk2) / denom;
    let fy = i * (one + wk2) / denom;
    let fz = 2.0 * w.powi(k as i32 - 1) / denom;
    Ok([fx, fy, fz])
}

/// Conformal factor of the induced metric in the chart, i.e. the tower metric
/// is `density * |dw|^2`. Equals `((|w|^{2k-2}+1) / |w^{2k}+1|)^2`, finite at
/// the origin and blowing up only at the punctures.
pub fn tower_metric_density(k: u32, w: Complex64) -> Result<f64, WeierstrassError> {
    check_regular(k, w)?;
    let n = 2 * k as i32;
    let numer = w.norm().powi(n - 2) + 1.0;
    let denom = (w.powi(n) + Complex64::new(1.0, 0.0)).norm();
    Ok((numer / denom).powi(2))
}

/// Second fundamental form of the chart embedding evaluated on the tangent
/// vector `v` (complex number in the w-plane):
/// `A(v, v) = 2 (k-1) Re[v^2 w^{k-2} / (1 + w^{2k})]`.
pub fn second_form_tower(k: u32, w: Complex64, v: Complex64) -> Result<f64, WeierstrassError> {
    check_regular(k, w)?;
    let coeff = second_form_coefficient(k, w)?;
    Ok((coeff * v * v).re)
}

/// The complex coefficient `a(w)` with `A(v,v) = Re[a v^2]`.
pub fn second_form_coefficient(k: u32, w: Complex64) -> Result<Complex64, WeierstrassError> {
    check_regular(k, w)?;
    let n = 2 * k as i32;
    let denom = Complex64::new(1.0, 0.0) + w.powi(n);
    Ok(2.0 * (k as f64 - 1.0) * w.powi(k as i32 - 2) / denom)
}

/// Squared norm of the chart second fundamental form with respect to the
/// induced metric: `2 |a|^2 / density^2`.
pub fn norm_sq_second_form(k: u32, w: Complex64) -> Result<f64, WeierstrassError> {
    let a = second_form_coefficient(k, w)?.norm();
    let lambda = tower_metric_density(k, w)?;
    Ok(2.0 * a * a / (lambda * lambda))
}

// ---------------------------------------------------------------------------
// Wing chart: the (s, z) coordinates near the puncture omega_1 and the graph
// height t over the asymptotic half-plane.
// ---------------------------------------------------------------------------

/// Helper carrying the root layout for the wing computations at fixed k.
struct WingFrame {
    k: u32,
    omega1: Complex64,
    /// pairs (omega_j, omega_1^2 conj(omega_j), Re/Im weights) for j = 2..=k
    pairs: Vec<(Complex64, Complex64, f64, f64)>,
    /// the constant c = lim_{w -> omega_1} (k s(w) + ln|w - omega_1|)
    c: f64,
}

impl WingFrame {
    fn new(k: u32) -> Self {
        let roots = roots_of_minus_one(k);
        let omega1 = roots[0];
        let mut pairs = Vec::new();
        for j in 2..=k as usize {
            let omega_j = roots[j - 1];
            let mirror = omega1 * omega1 * omega_j.conj();
            let weight = omega1.conj() * omega_j;
            pairs.push((omega_j, mirror, weight.re, weight.im));
        }
        let mut frame = Self { k, omega1, pairs, c: 0.0 };
        frame.c = frame.s_regular_part(omega1);
        frame
    }

    /// The analytic part of k*s: everything except the -ln|w - omega_1| term.
    fn s_regular_part(&self, w: Complex64) -> f64 {
        let mut v = (w + self.omega1).norm().ln();
        for &(omega_j, mirror, re_w, _) in &self.pairs {
            v -= re_w * ((w - omega_j).norm() * (w - mirror).norm()).ln();
        }
        v
    }

    /// k*s as a function of the offset delta = w - omega_1.
    fn ks(&self, delta: Complex64) -> f64 {
        -delta.norm().ln() + self.s_regular_part(self.omega1 + delta)
    }

    /// k*z as a function of delta; `arg(1 - w/omega_1) = arg(-delta/omega_1)`.
    fn kz(&self, delta: Complex64) -> f64 {
        let w = self.omega1 + delta;
        let mut v = (-delta / self.omega1).arg();
        let roots = roots_of_minus_one(self.k);
        for (idx, omega) in roots.iter().enumerate().skip(1) {
            let j = idx + 1;
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            v += sign * (Complex64::new(1.0, 0.0) - w / omega).arg();
        }
        v
    }

    /// k*t: the graph height sum, analytic across the puncture.
    fn kt(&self, delta: Complex64) -> f64 {
        let w = self.omega1 + delta;
        let mut v = 0.0;
        for &(omega_j, mirror, _, im_w) in &self.pairs {
            v += im_w * ((w - omega_j).norm() / (w - mirror).norm()).ln();
        }
        v
    }

    /// Jacobian of (ks, kz) with respect to (Re delta, Im delta).
    fn jacobian(&self, delta: Complex64) -> [[f64; 2]; 2] {
        let w = self.omega1 + delta;
        // d(ks) = Re[g_s d delta], d(kz) = Re[g_z d delta]
        let mut gs = -1.0 / delta;
        gs += 1.0 / (w + self.omega1);
        for &(omega_j, mirror, re_w, _) in &self.pairs {
            gs -= re_w * (1.0 / (w - omega_j) + 1.0 / (w - mirror));
        }
        // kz = sum of args; d arg(1 - w/omega) = Re[i/(omega - w) ... ] via
        // d arg(u) = Im[du/u]; u = 1 - w/omega, du = -d delta / omega.
        let mut gz = Complex64::new(0.0, 0.0);
        let roots = roots_of_minus_one(self.k);
        for (idx, omega) in roots.iter().enumerate() {
            let j = idx + 1;
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let u = Complex64::new(1.0, 0.0) - w / omega;
            // Im[du/u] = Re[-i du / u]; as a linear form in d delta:
            gz += sign * (-Complex64::new(0.0, 1.0)) * (-1.0 / (omega * u));
        }
        [[gs.re, -gs.im], [gz.re, -gz.im]]
    }

    /// Asymptotic initializer: delta ~ -omega_1 e^{c - k(s - i z)}.
    fn initializer(&self, s: f64, z: f64) -> Complex64 {
        -self.omega1 * Complex64::from_polar((self.c - self.k as f64 * s).exp(), self.k as f64 * z)
    }
}

const NEWTON_MAX_ITERS: usize = 50;
const NEWTON_TOL: f64 = 1e-12;

/// Newton solve of `(s, z)(omega_1 + delta) = (s_target, z_target)` starting
/// from `seed`. Damping halves the step when the residual increases.
fn newton_wing(
    frame: &WingFrame,
    s_target: f64,
    z_target: f64,
    seed: Complex64,
) -> Result<Complex64, WeierstrassError> {
    let kk = frame.k as f64;
    let mut delta = seed;
    let mut res = residual(frame, delta, s_target, z_target, kk);
    for _ in 0..NEWTON_MAX_ITERS {
        if res.0 < NEWTON_TOL {
            return Ok(delta);
        }
        let jac = frame.jacobian(delta);
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let (fs, fz) = res.1;
        let da = (fs * jac[1][1] - fz * jac[0][1]) / det;
        let db = (fz * jac[0][0] - fs * jac[1][0]) / det;
        let mut step = Complex64::new(-da, -db);
        let mut improved = false;
        for _ in 0..8 {
            let cand = delta + step;
            if cand.norm() > 1e-300 {
                let cres = residual(frame, cand, s_target, z_target, kk);
                if cres.0 < res.0 {
                    delta = cand;
                    res = cres;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if res.0 < NEWTON_TOL {
        Ok(delta)
    } else {
        Err(WeierstrassError::NewtonDivergence { last: frame.omega1 + delta, residual: res.0 })
    }
}

fn residual(
    frame: &WingFrame,
    delta: Complex64,
    s_target: f64,
    z_target: f64,
    kk: f64,
) -> (f64, (f64, f64)) {
    let fs = frame.ks(delta) - kk * s_target;
    let fz = frame.kz(delta) - kk * z_target;
    (fs.hypot(fz), (fs, fz))
}

/// Wing chart sample grid, in chart units.
#[derive(Debug, Clone)]
pub struct WingChart {
    pub k: u32,
    pub s_min: f64,
    pub s_values: Vec<f64>,
    pub z_values: Vec<f64>,
    /// heights t with row index over s, column index over z
    pub heights: Vec<Vec<f64>>,
}

/// Graph height of the wing over the asymptotic half-plane, in chart units:
/// inverts `w -> (s(w), z(w))` by Newton from the asymptotic initializer and
/// evaluates t. `s` must be at or beyond the onset radius (see
/// [`wing_onset_chart`]); `z` ranges over one chart period `|z| <= pi/2k`.
pub fn wing_height(k: u32, s: f64, z: f64) -> Result<f64, WeierstrassError> {
    wing_invert(k, s, z).map(|r| r.1)
}

/// Same inversion but also returns the recovered disc parameter. Below the
/// wing onset the iteration either fails or lands outside the wing sector of
/// the parameter disc; both are reported as divergence with the last iterate.
pub fn wing_invert(k: u32, s: f64, z: f64) -> Result<(Complex64, f64), WeierstrassError> {
    let frame = WingFrame::new(k);
    let delta = newton_wing(&frame, s, z, frame.initializer(s, z))?;
    let w = frame.omega1 + delta;
    // the wing occupies the double sector of the disc centered on the
    // puncture: heights of both signs live on the two adjacent tiles. The
    // chart folds along the boundary arc, so edge solutions may wobble
    // slightly across it; genuinely rogue sheets sit much farther out.
    let half = std::f64::consts::PI / (2.0 * k as f64);
    if w.norm() > 1.0 + 1e-4 || (w.arg() - half).abs() > half + 5e-3 {
        return Err(WeierstrassError::NewtonDivergence { last: w, residual: f64::INFINITY });
    }
    Ok((w, frame.kt(delta) / k as f64))
}

/// Newton inversion with an explicit seed (used for continuation toward the
/// tower core where the asymptotic initializer no longer converges).
pub fn wing_invert_seeded(
    k: u32,
    s: f64,
    z: f64,
    seed_w: Complex64,
) -> Result<(Complex64, f64), WeierstrassError> {
    let frame = WingFrame::new(k);
    let delta = newton_wing(&frame, s, z, seed_w - frame.omega1)?;
    Ok((frame.omega1 + delta, frame.kt(delta) / k as f64))
}

/// Wing-frame coordinates of a chart point: `s` along the wing axis, `z` the
/// height, `t` the transverse graph coordinate (all chart units).
pub fn chart_szt(k: u32, w: Complex64) -> Result<(f64, f64, f64), WeierstrassError> {
    let p = weierstrass_map(k, w)?;
    let omega1 = roots_of_minus_one(k)[0];
    let [x, y, z] = p.position;
    Ok((omega1.re * x - omega1.im * y, z, omega1.im * x + omega1.re * y))
}

/// Newton solve of `(s, z)(w) = (s_target, z_target)` using the full disc
/// formulas, seeded at `seed`; the caller controls continuation.
pub fn newton_invert_sz(
    k: u32,
    s_target: f64,
    z_target: f64,
    seed: Complex64,
) -> Result<Complex64, WeierstrassError> {
    let omega1 = roots_of_minus_one(k)[0];
    let mut w = seed;
    let eval = |w: Complex64| -> Result<(f64, f64, [[f64; 2]; 2]), WeierstrassError> {
        let (s, z, _) = chart_szt(k, w)?;
        let d = weierstrass_differential(k, w)?;
        let fs = d[0] * omega1.re - d[1] * omega1.im;
        let fz = d[2];
        Ok((s - s_target, z - z_target, [[fs.re, -fs.im], [fz.re, -fz.im]]))
    };
    let (mut es, mut ez, mut jac) = eval(w)?;
    let mut res = es.hypot(ez);
    for _ in 0..NEWTON_MAX_ITERS {
        if res < NEWTON_TOL {
            return Ok(w);
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let da = (es * jac[1][1] - ez * jac[0][1]) / det;
        let db = (ez * jac[0][0] - es * jac[1][0]) / det;
        let mut step = Complex64::new(-da, -db);
        let mut improved = false;
        for _ in 0..10 {
            let cand = w + step;
            if let Ok((cs, cz, cj)) = eval(cand) {
                let cres = cs.hypot(cz);
                if cres < res {
                    w = cand;
                    es = cs;
                    ez = cz;
                    jac = cj;
                    res = cres;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if res < NEWTON_TOL {
        Ok(w)
    } else {
        Err(WeierstrassError::NewtonDivergence { last: w, residual: res })
    }
}

/// Continuation toward a target along a straight segment in the (s, z) chart,
/// subdividing adaptively when a direct Newton step fails.
pub fn newton_march_sz(
    k: u32,
    from: (f64, f64),
    to: (f64, f64),
    seed: Complex64,
) -> Result<Complex64, WeierstrassError> {
    let mut w = seed;
    let mut lo = 0.0f64;
    let mut step = 1.0f64;
    let mut cur = from;
    while lo < 1.0 {
        let hi = (lo + step).min(1.0);
        let target = (from.0 + (to.0 - from.0) * hi, from.1 + (to.1 - from.1) * hi);
        match newton_invert_sz(k, target.0, target.1, w) {
            Ok(sol) => {
                w = sol;
                lo = hi;
                cur = target;
                step = (step * 2.0).min(1.0 - lo).max(1e-12);
            }
            Err(e) => {
                step *= 0.5;
                if step < 1e-6 {
                    let _ = cur;
                    return Err(e);
                }
            }
        }
    }
    Ok(w)
}

/// Smallest chart radius (in the normalized x = k s variable) at which the
/// asymptotic-initializer Newton converges over a full z period and the wing
/// is a graph staying strictly inside its wedge. Cached per k.
pub fn wing_onset_chart(k: u32) -> f64 {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&k) {
        return *v;
    }
    let kk = k as f64;
    let half_period = std::f64::consts::PI / (2.0 * kk);
    let wedge = (half_period).tan();
    let zs: Vec<f64> = (0..=32).map(|i| -half_period + half_period * (i as f64) / 16.0).collect();
    let mut onset = 8.0;
    let mut x = 8.0;
    while x > 0.3 {
        let s = x / kk;
        let ok = zs.iter().all(|&z| match wing_height(k, s, z) {
            Ok(t) => (kk * t).abs() < 0.9 * x * wedge,
            Err(_) => false,
        });
        if ok {
            onset = x;
            x -= 0.05;
        } else {
            break;
        }
    }
    cache.lock().unwrap().insert(k, onset);
    onset
}

/// Onset radius for the assembler, in the normalized wing coordinate
/// `x = k s`: beyond the corner where the inner boundary curve of the
/// fundamental sector tops out, the surface splits into graph wings over
/// disjoint open wedges, so straightening may begin there. The corner sits at
/// `x = k s(1)`; a small margin is added.
pub fn wing_onset_assembly(k: u32) -> f64 {
    let (s1, _, _) = chart_szt(k, Complex64::new(1.0 - 1e-12, 0.0))
        .expect("corner evaluation cannot hit a puncture");
    k as f64 * s1 + 0.12
}

/// Whether `w` lies in (a slight enlargement of) the closed fundamental
/// sector `0 <= arg w <= pi/2k`, `|w| <= 1`.
pub fn in_sector(k: u32, w: Complex64) -> bool {
    let eps = 1e-9;
    w.norm() <= 1.0 + eps && w.arg() >= -eps && w.arg() <= std::f64::consts::PI / (2.0 * k as f64) + eps
}

/// Sample a wing chart on a tensor grid.
pub fn sample_wing_chart(
    k: u32,
    s_min: f64,
    s_max: f64,
    ns: usize,
    nz: usize,
) -> Result<WingChart, WeierstrassError> {
    let kk = k as f64;
    let half = std::f64::consts::PI / (2.0 * kk);
    let s_values: Vec<f64> = (0..=ns)
        .map(|i| s_min + (s_max - s_min) * i as f64 / ns as f64)
        .collect();
    let z_values: Vec<f64> = (0..=nz).map(|j| -half + 2.0 * half * j as f64 / nz as f64).collect();
    let mut heights = Vec::with_capacity(s_values.len());
    for &s in &s_values {
        let mut row = Vec::with_capacity(z_values.len());
        for &z in &z_values {
            row.push(wing_height(k, s, z)?);
        }
        heights.push(row);
    }
    Ok(WingChart { k, s_min, s_values, z_values, heights })
}

/// Least-squares slope of `log max_z |t(s, .)|` against s over the given
/// range. For the towers this sits near -k.
pub fn wing_decay_fit(k: u32, s_min: f64, s_max: f64, ns: usize) -> Result<f64, WeierstrassError> {
    if ns < 3 {
        return Err(WeierstrassError::InsufficientSamples);
    }
    let chart = sample_wing_chart(k, s_min, s_max, ns, 24)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &s) in chart.s_values.iter().enumerate() {
        let max_t = chart.heights[i].iter().fold(0.0_f64, |m, &t| m.max(t.abs()));
        if max_t > 0.0 {
            xs.push(s);
            ys.push(max_t.ln());
        }
    }
    if xs.len() < 3 {
        return Err(WeierstrassError::InsufficientSamples);
    }
    Ok(linear_fit_slope(&xs, &ys))
}

pub(crate) fn linear_fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

// ---------------------------------------------------------------------------
// Normalized tower, straightening, symmetries.
// ---------------------------------------------------------------------------

/// Chart -> normalized coordinates: scale by k and rotate by pi/2k about the
/// z-axis.
pub fn normalize_point(k: u32, p: TowerPoint) -> TowerPoint {
    let kk = k as f64;
    let ang = std::f64::consts::PI / (2.0 * kk);
    let (s, c) = ang.sin_cos();
    let [x, y, z] = p.position;
    TowerPoint::new(kk * (c * x - s * y), kk * (s * x + c * y), kk * z)
}

/// Normalized wing height `W_k(x, z) = k t(x/k, z/k)`; the wing through the
/// positive x-axis is the graph `y = W_k(x, z)`.
pub fn wing_height_normalized(k: u32, x: f64, z: f64) -> Result<f64, WeierstrassError> {
    let kk = k as f64;
    Ok(kk * wing_height(k, x / kk, z / kk)?)
}

/// Rigid motion of R^3 with a parity flag recording its action on the tower
/// normal.
#[derive(Debug, Clone, Copy)]
pub struct EuclideanSymmetry {
    pub kind: SymmetryKind,
    pub matrix: [[f64; 3]; 3],
    pub offset: [f64; 3],
    pub parity: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryKind {
    RotationAboutLine,
    ReflectionThroughPlane,
    ScrewOrTranslation,
}

impl EuclideanSymmetry {
    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        let m = &self.matrix;
        [
            m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2] + self.offset[0],
            m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2] + self.offset[1],
            m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2] + self.offset[2],
        ]
    }

    pub fn rotation_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            kind: SymmetryKind::RotationAboutLine,
            matrix: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
            offset: [0.0; 3],
            parity: 1,
        }
    }

    pub fn rotation_x_pi() -> Self {
        Self {
            kind: SymmetryKind::RotationAboutLine,
            matrix: [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]],
            offset: [0.0; 3],
            parity: -1,
        }
    }

    pub fn translation_z(dz: f64) -> Self {
        Self {
            kind: SymmetryKind::ScrewOrTranslation,
            matrix: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            offset: [0.0, 0.0, dz],
            parity: 1,
        }
    }

    /// Reflection through the vertical plane at polar angle `theta`.
    pub fn reflection_vertical_plane(theta: f64) -> Self {
        let (s, c) = (2.0 * theta).sin_cos();
        Self {
            kind: SymmetryKind::ReflectionThroughPlane,
            matrix: [[c, s, 0.0], [s, -c, 0.0], [0.0, 0.0, 1.0]],
            offset: [0.0; 3],
            parity: -1,
        }
    }

    /// Reflection through the horizontal plane `z = h`.
    pub fn reflection_horizontal_plane(h: f64) -> Self {
        Self {
            kind: SymmetryKind::ReflectionThroughPlane,
            matrix: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]],
            offset: [0.0, 0.0, 2.0 * h],
            parity: -1,
        }
    }
}

/// Generators of the symmetry group of the normalized tower: the rotation by
/// `2 pi / k` about the axis, the half-turn about the x-axis, the vertical
/// period, and the two reflections.
pub fn tower_symmetry_generators(k: u32) -> Vec<EuclideanSymmetry> {
    let kk = k as f64;
    vec![
        EuclideanSymmetry::rotation_z(2.0 * std::f64::consts::PI / kk),
        EuclideanSymmetry::rotation_x_pi(),
        EuclideanSymmetry::translation_z(2.0 * std::f64::consts::PI),
        EuclideanSymmetry::reflection_vertical_plane(std::f64::consts::PI / (2.0 * kk)),
        EuclideanSymmetry::reflection_horizontal_plane(std::f64::consts::PI / 2.0),
    ]
}

/// Generators of the reflection group of the horizontal-line union alone
/// (the first three of [`tower_symmetry_generators`]).
pub fn line_reflection_generators(k: u32) -> Vec<EuclideanSymmetry> {
    tower_symmetry_generators(k).into_iter().take(3).collect()
}

/// Sampled fundamental piece of the normalized tower together with the
/// symmetry generators that tile the full tower from it.
pub struct TowerPatch {
    pub k: u32,
    /// grid over the fundamental sector, row-major with `nr+1` radial rows
    pub points: Vec<TowerPoint>,
    pub disc_params: Vec<Complex64>,
    pub nr: usize,
    pub ntheta: usize,
    pub generators: Vec<EuclideanSymmetry>,
}

/// Sample the image of the fundamental sector on an `nr x ntheta` tensor grid
/// in (r, theta) with geometric refinement of r toward the boundary circle
/// (where the puncture sits), then normalize.
pub fn build_tower_patch(k: u32, nr: usize, ntheta: usize) -> Result<TowerPatch, WeierstrassError> {
    let kk = k as f64;
    let mut points = Vec::with_capacity((nr + 1) * (ntheta + 1));
    let mut disc_params = Vec::with_capacity((nr + 1) * (ntheta + 1));
    for i in 0..=nr {
        let u = i as f64 / nr as f64;
        // geometric squeeze toward r = 1
        let r = 1.0 - (1.0 - u) * (1.0 - 0.97 * u);
        for j in 0..=ntheta {
            let phi = std::f64::consts::PI / (2.0 * kk) * j as f64 / ntheta as f64;
            let mut w = Complex64::from_polar(r.min(0.999_999), phi);
            // keep clear of the corner puncture
            if (w - Complex64::from_polar(1.0, std::f64::consts::PI / (2.0 * kk))).norm() < 1e-3 {
                w *= 0.999;
            }
            let p = weierstrass_map(k, w)?;
            points.push(normalize_point(k, p));
            disc_params.push(w);
        }
    }
    Ok(TowerPatch { k, points, disc_params, nr, ntheta, generators: tower_symmetry_generators(k) })
}

/// Straightening radius `a_m = m pi / 4 - 10`.
pub fn straightening_radius(m: u32) -> f64 {
    m as f64 * std::f64::consts::PI / 4.0 - 10.0
}

/// The wing-straightening map in normalized coordinates. Identity for points
/// whose wing coordinate is below `a`; beyond, the transverse graph height is
/// multiplied by the cutoff that vanishes past `a + width`. Extended to all
/// wings by equivariance under the tower symmetries.
pub fn straighten_point(k: u32, a: f64, width: f64, p: TowerPoint) -> TowerPoint {
    let [x, y, z] = p.position;
    let kk = k as f64;
    let sector = std::f64::consts::PI / kk;
    let theta = y.atan2(x);
    let widx = (theta / sector).round();
    let wang = widx * sector;
    let (sw, cw) = wang.sin_cos();
    // wing-local coordinates
    let xl = cw * x + sw * y;
    let yl = -sw * x + cw * y;
    if xl < a {
        return p;
    }
    let factor = cutoff(a + width, a, xl);
    let yl2 = yl * factor;
    TowerPoint::new(cw * xl - sw * yl2, sw * xl + cw * yl2, z)
}

/// Straightened tower map with the canonical parameters `a = m pi/4 - 10`,
/// unit blend width. Rejects m below the wing onset.
pub fn straightened_tower_map(k: u32, m: u32, p: TowerPoint) -> Result<TowerPoint, WeierstrassError> {
    let a = straightening_radius(m);
    let onset = wing_onset_chart(k);
    if a <= onset {
        return Err(WeierstrassError::MTooSmall { a, onset });
    }
    Ok(straighten_point(k, a, 1.0, p))
}
