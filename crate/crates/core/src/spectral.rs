//! Model spectral problems: the linearized operator on the hemisphere pieces
//! of the tower in its pulled-back spherical metric (closed-form radial
//! modes, ladder factorization, transcendental root equations, shooting
//! counts), the Poisson solver on a Euclidean strip by Fourier sine synthesis
//! and Green's functions, and the flat-torus kernel bookkeeping.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("no root in the admissible range")]
    NoRoot,
    #[error("shooting failed for mode {0}")]
    ShootingFailure(i64),
    #[error("forcing violates the required reflection equivariance (defect {0:.3e})")]
    EquivarianceViolation(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// `tanh((k-1) ln r)` written rationally: `(r^{2k-2} - 1) / (r^{2k-2} + 1)`.
fn tau(k: u32, r: f64) -> f64 {
    let p = r.powi(2 * k as i32 - 2);
    (p - 1.0) / (p + 1.0)
}

/// The Dirichlet kernel direction in its customary normalization
/// `(r^{2k-2} - 1) / (r^{2k-2} + 1)`, proportional to the lambda = 0 radial
/// mode; tends to -1 at the puncture and vanishes at the equator.
pub fn radial_kernel_mode(k: u32, r: f64) -> f64 {
    tau(k, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RadialKind {
    /// `u_lambda(r) = (lambda - (k-1) tau) r^lambda`
    ULambda,
    /// logarithmic companion at lambda = 0
    UZeroPrime,
    /// companion at lambda = k-1
    UKMinusOnePrime,
}

/// Closed-form radial modes of the cylinder-form operator.
pub fn radial_eigenfunction(
    kind: RadialKind,
    k: u32,
    lambda: f64,
    r: f64,
) -> Result<f64, SpectralError> {
    if r <= 0.0 && kind != RadialKind::ULambda {
        return Err(SpectralError::InvalidParameter("singular kind at r = 0".into()));
    }
    if r < 0.0 {
        return Err(SpectralError::InvalidParameter("negative radius".into()));
    }
    let km1 = k as f64 - 1.0;
    Ok(match kind {
        RadialKind::ULambda => (lambda - km1 * tau(k, r)) * r.powf(lambda),
        RadialKind::UZeroPrime => 1.0 - km1 * tau(k, r) * r.ln(),
        RadialKind::UKMinusOnePrime => {
            let p = r.powf(2.0 * km1);
            r.powf(km1) * (p - 1.0 / p + 4.0 * km1 * r.ln()) / (p + 1.0)
        }
    })
}

/// The ladder operators `A_pm f = r f' +- (k-1) tau f`, applied by central
/// differences in log radius.
pub fn ladder_apply(
    k: u32,
    sign: f64,
    f: &dyn Fn(f64) -> f64,
    r: f64,
    h: f64,
) -> f64 {
    // r d/dr = d/d rho with rho = ln r
    let rho = r.ln();
    let df = (f((rho + h).exp()) - f((rho - h).exp())) / (2.0 * h);
    df + sign * (k as f64 - 1.0) * tau(k, r) * f(r)
}

/// Potential of the cylinder-form operator:
/// `8 (k-1)^2 r^{2k-2} / (r^{2k-2}+1)^2 = 2 (k-1)^2 sech^2((k-1) ln r)`.
pub fn cylinder_potential(k: u32, r: f64) -> f64 {
    let km1 = k as f64 - 1.0;
    let c = (km1 * r.ln()).cosh();
    2.0 * km1 * km1 / (c * c)
}

/// Radial part of the cylinder operator applied by log-grid differences:
/// `(r d/dr)^2 f + (V - l^2) f`.
pub fn cylinder_apply(k: u32, ell: i64, f: &dyn Fn(f64) -> f64, r: f64, h: f64) -> f64 {
    let rho = r.ln();
    let d2 = (f((rho + h).exp()) - 2.0 * f(r) + f((rho - h).exp())) / (h * h);
    d2 + (cylinder_potential(k, r) - (ell * ell) as f64) * f(r)
}

// ---------------------------------------------------------------------------
// Transcendental root for the Neumann problem.
// ---------------------------------------------------------------------------

/// Left side `lambda coth(lambda ln eps)` minus right side
/// `(k-1) tanh((k-1) ln eps)`.
fn neumann_root_function(k: u32, ln_eps: f64, lambda: f64) -> f64 {
    let lhs = if lambda.abs() < 1e-12 {
        1.0 / ln_eps
    } else {
        lambda / (lambda * ln_eps).tanh()
    };
    let rhs = (k as f64 - 1.0) * ((k as f64 - 1.0) * ln_eps).tanh();
    lhs - rhs
}

/// The unique positive solution of
/// `lambda coth(lambda ln eps) = (k-1) tanh((k-1) ln eps)`, found by
/// bisection with a uniqueness scan; a secant polish cross-checks it.
pub fn neumann_negative_root(k: u32, eps: f64) -> Result<(f64, f64), SpectralError> {
    if !(0.0..1.0).contains(&eps) || eps <= 0.0 {
        return Err(SpectralError::InvalidParameter("eps must lie in (0,1)".into()));
    }
    let ln_eps = eps.ln();
    let hi = 10.0 * k as f64;
    let n = 20_000;
    let mut count = 0;
    let mut bracket = None;
    let mut prev = neumann_root_function(k, ln_eps, 1e-9);
    for i in 1..=n {
        let lam = hi * i as f64 / n as f64;
        let val = neumann_root_function(k, ln_eps, lam);
        if prev == 0.0 || prev * val < 0.0 {
            count += 1;
            bracket = Some((hi * (i - 1) as f64 / n as f64, lam));
        }
        prev = val;
    }
    if count != 1 {
        return Err(SpectralError::NoRoot);
    }
    let (mut lo, mut hi) = bracket.unwrap();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if neumann_root_function(k, ln_eps, lo.max(1e-12)) * neumann_root_function(k, ln_eps, mid)
            <= 0.0
        {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let bis = 0.5 * (lo + hi);
    // independent secant iteration from a different start
    let mut a = bis * 0.7 + 0.1;
    let mut b = bis * 1.3 + 0.05;
    for _ in 0..80 {
        let fa = neumann_root_function(k, ln_eps, a);
        let fb = neumann_root_function(k, ln_eps, b);
        if (fb - fa).abs() < 1e-300 {
            break;
        }
        let c = b - fb * (b - a) / (fb - fa);
        a = b;
        b = c.clamp(1e-12, 10.0 * k as f64);
    }
    Ok((bis, b))
}

// ---------------------------------------------------------------------------
// Shooting counts on the annulus.
// ---------------------------------------------------------------------------

/// Runge-Kutta-Fehlberg 4(5) integration of `v'' = q(rho) v` over
/// `[rho0, 0]`, recording sign changes of v; returns
/// (v(0), v'(0), zeros, max |v|, max |v'|).
fn shoot(q: &dyn Fn(f64) -> f64, rho0: f64, rel_tol: f64) -> (f64, f64, usize, f64, f64) {
    let mut y = [0.0f64, 1.0f64];
    let mut rho = rho0;
    let mut h = (-rho0) / 400.0;
    let h_max = (-rho0) / 200.0;
    let mut zeros = 0usize;
    let mut last_sign = 0.0f64;
    let mut vmax = 0.0f64;
    let mut dvmax = 1.0f64;
    let deriv = |rho: f64, y: &[f64; 2]| -> [f64; 2] { [y[1], q(rho) * y[0]] };
    // Fehlberg coefficients
    const A: [f64; 6] = [0.0, 0.25, 3.0 / 8.0, 12.0 / 13.0, 1.0, 0.5];
    const B: [[f64; 5]; 6] = [
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [0.25, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
        [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
        [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
        [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
    ];
    const C4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0];
    const C5: [f64; 6] =
        [16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0];
    while rho < -1e-14 {
        if rho + h > 0.0 {
            h = -rho;
        }
        let mut ks = [[0.0f64; 2]; 6];
        for i in 0..6 {
            let mut yy = y;
            for j in 0..i {
                yy[0] += h * B[i][j] * ks[j][0];
                yy[1] += h * B[i][j] * ks[j][1];
            }
            ks[i] = deriv(rho + A[i] * h, &yy);
        }
        let mut y4 = y;
        let mut y5 = y;
        for i in 0..6 {
            y4[0] += h * C4[i] * ks[i][0];
            y4[1] += h * C4[i] * ks[i][1];
            y5[0] += h * C5[i] * ks[i][0];
            y5[1] += h * C5[i] * ks[i][1];
        }
        let scale = y[0].abs().max(y[1].abs()).max(1.0);
        let err = ((y4[0] - y5[0]).abs().max((y4[1] - y5[1]).abs())) / scale;
        if err > rel_tol && h > 1e-12 {
            h *= 0.5;
            continue;
        }
        rho += h;
        y = y5;
        if err < rel_tol / 64.0 {
            h = (h * 2.0).min(h_max);
        }
        let s = y[0];
        vmax = vmax.max(s.abs());
        dvmax = dvmax.max(y[1].abs());
        if last_sign != 0.0 && s != 0.0 && s.signum() != last_sign {
            zeros += 1;
        }
        if s != 0.0 {
            last_sign = s.signum();
        }
    }
    (y[0], y[1], zeros, vmax, dvmax)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryCounts {
    pub nullity: usize,
    pub negatives: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HemisphereReport {
    pub k: u32,
    pub eps: f64,
    pub dirichlet: BoundaryCounts,
    pub neumann: BoundaryCounts,
    /// per-mode (ell, dirichlet negatives, neumann negatives)
    pub modes: Vec<(i64, usize, usize)>,
    /// the mode carrying the negative Neumann eigenvalue, when present
    pub neumann_negative_mode: Option<i64>,
}

/// Count the near-zero shifted eigenvalue of one mode by locating the
/// eigenvalue of smallest magnitude through a boundary-function scan.
pub fn nearest_eigenvalue(
    k: u32,
    ell: i64,
    rho0: f64,
    neumann: bool,
) -> f64 {
    let boundary = |mu: f64| -> f64 {
        let q = move |rho: f64| {
            (ell * ell) as f64 - cylinder_potential(k, rho.exp())
                - mu / rho.cosh().powi(2)
        };
        let (v0, dv0, _, _, _) = shoot(&q, rho0, 1e-10);
        if neumann {
            dv0
        } else {
            v0
        }
    };
    let mut prev = boundary(-3.0);
    let mut best = f64::INFINITY;
    let steps = 180;
    for i in 1..=steps {
        let mu = -3.0 + 6.0 * i as f64 / steps as f64;
        let val = boundary(mu);
        if prev * val < 0.0 {
            let (mut lo, mut hi) = (mu - 6.0 / steps as f64, mu);
            let mut flo = boundary(lo);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = boundary(mid);
                if flo * fm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            let root = 0.5 * (lo + hi);
            if root.abs() < best.abs() {
                best = root;
            }
        }
        prev = val;
    }
    best
}

/// Shooting/Sturm spectral counts for the radial problems on the annulus
/// `(eps, 1)` with Dirichlet data at the inner edge and either Dirichlet or
/// Neumann data at the equator. Nullity is attributed to modes whose
/// nearest eigenvalue contracts toward zero under halving of eps.
pub fn hemisphere_counts(k: u32, eps: f64, l_max: i64) -> Result<HemisphereReport, SpectralError> {
    if !(0.0..=0.1).contains(&eps) || eps <= 0.0 {
        return Err(SpectralError::InvalidParameter("eps must lie in (0, 0.1]".into()));
    }
    let rho0 = eps.ln();
    let mut dirichlet = BoundaryCounts { nullity: 0, negatives: 0 };
    let mut neumann = BoundaryCounts { nullity: 0, negatives: 0 };
    let mut modes = Vec::new();
    let mut neumann_mode = None;
    let mut ell = 0i64;
    while ell <= l_max {
        let mult = if ell == 0 { 1 } else { 2 };
        let q0 = |rho: f64| (ell * ell) as f64 - cylinder_potential(k, rho.exp());
        let (v0, dv0, zeros, vmax, dvmax) = shoot(&q0, rho0, 1e-10);
        if !v0.is_finite() || !dv0.is_finite() {
            return Err(SpectralError::ShootingFailure(ell));
        }
        let d_neg = zeros;
        let n_neg = zeros + if v0 * dv0 < 0.0 { 1 } else { 0 };
        dirichlet.negatives += mult * d_neg;
        neumann.negatives += mult * n_neg;
        if n_neg > 0 && neumann_mode.is_none() {
            neumann_mode = Some(ell);
        }
        // near-kernel detection: the homogeneous shot flags candidate modes
        // whose boundary value is anomalously small; a candidate is a kernel
        // mode when its nearest eigenvalue is small and keeps contracting as
        // eps halves (the hemisphere kernel reappears on the annulus as an
        // eigenvalue decaying like 1 / |ln eps|)
        if v0.abs() / vmax < 0.55 {
            let mu1 = nearest_eigenvalue(k, ell, rho0, false);
            if mu1.is_finite() && mu1.abs() < 0.95 {
                let mu2 = nearest_eigenvalue(k, ell, (eps / 2.0).ln(), false);
                if mu2.abs() < mu1.abs() {
                    dirichlet.nullity += mult;
                }
            }
        }
        if dv0.abs() / dvmax < 0.55 {
            let nu1 = nearest_eigenvalue(k, ell, rho0, true);
            if nu1.is_finite() && nu1.abs() < 0.95 {
                let nu2 = nearest_eigenvalue(k, ell, (eps / 2.0).ln(), true);
                if nu2.abs() < nu1.abs() {
                    neumann.nullity += mult;
                }
            }
        }
        modes.push((ell, d_neg, n_neg));
        ell += k as i64;
    }
    Ok(HemisphereReport {
        k,
        eps,
        dirichlet,
        neumann,
        modes,
        neumann_negative_mode: neumann_mode,
    })
}

/// Independent negative-count oracle: finite differences on a uniform log
/// grid and LDL^T inertia of the stiffness-plus-potential matrix.
pub fn inertia_negative_count(k: u32, ell: i64, eps: f64, neumann: bool, n: usize) -> usize {
    let rho0 = eps.ln();
    let h = -rho0 / n as f64;
    // unknowns at rho0 + i h for i = 1..=n-1, plus the equator node for the
    // Neumann case; quadratic form of -(v'' + (V - l^2) v)
    let m = if neumann { n } else { n - 1 };
    let mut diag = vec![0.0f64; m];
    let mut off = vec![0.0f64; m.saturating_sub(1)];
    for i in 0..m {
        let rho = rho0 + (i + 1) as f64 * h;
        let pot = cylinder_potential(k, rho.exp()) - (ell * ell) as f64;
        let w = if neumann && i == m - 1 { 1.0 } else { 2.0 };
        diag[i] = w / (h * h) - pot * if neumann && i == m - 1 { 0.5 } else { 1.0 };
        if i + 1 < m {
            off[i] = -1.0 / (h * h);
        }
    }
    // LDL^T inertia
    let mut negs = 0usize;
    let mut d_prev = diag[0];
    if d_prev < 0.0 {
        negs += 1;
    }
    for i in 1..m {
        let l = off[i - 1] / d_prev;
        let d = diag[i] - l * off[i - 1];
        if d < 0.0 {
            negs += 1;
        }
        d_prev = d;
    }
    negs
}

// ---------------------------------------------------------------------------
// Conformal factor and potential of the pulled-back spherical metric.
// ---------------------------------------------------------------------------

/// `(e^{2 phi}, e^{-2 phi} |A|^2)` of the tower in the chart coordinate.
pub fn eta_factor(k: u32, z: num_complex::Complex64) -> (f64, f64) {
    let kk = k as f64;
    let zn = z.norm();
    let z2k = z.powi(2 * k as i32);
    let conf = 4.0 * (z2k + num_complex::Complex64::new(1.0, 0.0)).norm_sqr()
        / (kk * kk * (zn * zn + 1.0).powi(2) * (zn.powi(2 * k as i32 - 2) + 1.0).powi(2));
    let km1 = kk - 1.0;
    let pot = 2.0
        * km1
        * km1
        * zn.powi(2 * k as i32 - 4)
        * ((zn * zn + 1.0) / (zn.powi(2 * k as i32 - 2) + 1.0)).powi(2);
    (conf, pot)
}

// ---------------------------------------------------------------------------
// The strip Poisson solver.
// ---------------------------------------------------------------------------

/// Dirichlet Green's function of `d^2/dx^2 - n^2/Y^2` on `(0, X pi)`,
/// evaluated stably in log space.
pub fn strip_green(n: u32, x_width: f64, y_period: f64, x: f64, xp: f64) -> f64 {
    let nn = n as f64;
    let l = x_width * std::f64::consts::PI;
    let (lo, hi) = if x <= xp { (x, xp) } else { (xp, x) };
    let a = nn * lo / y_period;
    let b = nn * (l - hi) / y_period;
    let c = nn * l / y_period;
    // sinh(a) sinh(b) / sinh(c), all arguments nonnegative, a + b <= c
    let ratio = ((a + b - c).exp())
        * (1.0 - (-2.0 * a).exp())
        * (1.0 - (-2.0 * b).exp())
        / (2.0 * (1.0 - (-2.0 * c).exp()));
    -(y_period / nn) * ratio
}

pub struct StripProblem<'a> {
    /// width parameter: the strip is (0, X pi) x R
    pub x_width: f64,
    /// reflection half-period parameter: forcing odd under y -> -y and
    /// y -> 2 Y pi - y
    pub y_period: f64,
    pub forcing: &'a dyn Fn(f64, f64) -> f64,
}

pub struct StripSolution {
    pub x_width: f64,
    pub y_period: f64,
    pub xs: Vec<f64>,
    /// per-mode coefficient functions on the x grid
    pub modes: Vec<Vec<f64>>,
}

impl StripSolution {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let l = self.x_width * std::f64::consts::PI;
        let xx = x.clamp(0.0, l);
        let fx = xx / l * (self.xs.len() - 1) as f64;
        let i = (fx.floor() as usize).min(self.xs.len() - 2);
        let t = fx - i as f64;
        let mut total = 0.0;
        for (mi, coeffs) in self.modes.iter().enumerate() {
            let n = (mi + 1) as f64;
            let c = coeffs[i] * (1.0 - t) + coeffs[i + 1] * t;
            total += c * (n * y / self.y_period).sin();
        }
        total
    }
}

/// Solve the Dirichlet Poisson problem on the strip for forcing odd under the
/// horizontal reflections: Fourier sine synthesis in y, Green's quadrature in
/// x. The mode cutoff grows until the geometric tail estimate drops below the
/// tolerance.
pub fn strip_solve(
    problem: &StripProblem,
    nx: usize,
    ny: usize,
    tail_tol: f64,
) -> Result<StripSolution, SpectralError> {
    let l = problem.x_width * std::f64::consts::PI;
    let yp = problem.y_period * std::f64::consts::PI;
    // equivariance check on samples
    let mut defect: f64 = 0.0;
    for i in 0..8 {
        let x = l * (i as f64 + 0.5) / 8.0;
        for j in 0..8 {
            let y = yp * (j as f64 + 0.37) / 8.0;
            let f = problem.forcing;
            defect = defect.max((f(x, y) + f(x, -y)).abs());
            defect = defect.max((f(x, y) + f(x, 2.0 * yp - y)).abs());
        }
    }
    if defect > 1e-9 {
        return Err(SpectralError::EquivarianceViolation(defect));
    }
    let xs: Vec<f64> = (0..=nx).map(|i| l * i as f64 / nx as f64).collect();
    // sine coefficients of the forcing on the x grid
    let mut f_sup: f64 = 0.0;
    let coeff = |n: u32, x: f64| -> f64 {
        let mut acc = 0.0;
        for j in 0..ny {
            let y = yp * (j as f64 + 0.5) / ny as f64;
            acc += (problem.forcing)(x, y) * (n as f64 * y / problem.y_period).sin();
        }
        acc * 2.0 / ny as f64
    };
    for i in 0..=nx {
        f_sup = f_sup.max((problem.forcing)(xs[i], yp * 0.31).abs());
    }
    let mut modes = Vec::new();
    let mut n = 1u32;
    let mut small_streak = 0usize;
    let _ = f_sup;
    loop {
        let fn_x: Vec<f64> = xs.iter().map(|&x| coeff(n, x)).collect();
        let fn_sup = fn_x.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        // Green's quadrature: trapezoid with the kink at x' = x respected by
        // the grid alignment
        let hx = l / nx as f64;
        let un: Vec<f64> = (0..=nx)
            .map(|i| {
                let x = xs[i];
                let mut acc = 0.0;
                for j in 0..=nx {
                    let w = if j == 0 || j == nx { 0.5 } else { 1.0 };
                    acc += w
                        * strip_green(n, problem.x_width, problem.y_period, x, xs[j])
                        * fn_x[j];
                }
                acc * hx
            })
            .collect();
        modes.push(un);
        // stop once several consecutive modes contribute below the tolerance
        // (the per-mode bound is Y^2 / n^2 times the mode amplitude)
        let tail = problem.y_period * problem.y_period / (n as f64 * n as f64) * fn_sup;
        if tail < tail_tol {
            small_streak += 1;
            if small_streak >= 3 && n >= 4 {
                break;
            }
        } else {
            small_streak = 0;
        }
        if n as usize > 4 * ny {
            break;
        }
        n += 1;
    }
    Ok(StripSolution { x_width: problem.x_width, y_period: problem.y_period, xs, modes })
}

/// Dense five-point Dirichlet solve on `(0, X pi) x (0, Y pi)` by conjugate
/// gradients, for use as an independent oracle.
pub fn strip_fd_oracle(
    x_width: f64,
    y_period: f64,
    forcing: &dyn Fn(f64, f64) -> f64,
    nx: usize,
    ny: usize,
) -> (Vec<f64>, usize, f64) {
    let lx = x_width * std::f64::consts::PI;
    let ly = y_period * std::f64::consts::PI;
    let hx = lx / nx as f64;
    let hy = ly / ny as f64;
    let m = (nx - 1) * (ny - 1);
    let idx = |i: usize, j: usize| (j - 1) * (nx - 1) + (i - 1);
    let mut rhs = vec![0.0f64; m];
    for j in 1..ny {
        for i in 1..nx {
            rhs[idx(i, j)] = -forcing(i as f64 * hx, j as f64 * hy);
        }
    }
    let apply = |u: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0f64; m];
        for j in 1..ny {
            for i in 1..nx {
                let c = u[idx(i, j)];
                let left = if i > 1 { u[idx(i - 1, j)] } else { 0.0 };
                let right = if i < nx - 1 { u[idx(i + 1, j)] } else { 0.0 };
                let down = if j > 1 { u[idx(i, j - 1)] } else { 0.0 };
                let up = if j < ny - 1 { u[idx(i, j + 1)] } else { 0.0 };
                out[idx(i, j)] =
                    (2.0 * c - left - right) / (hx * hx) + (2.0 * c - down - up) / (hy * hy);
            }
        }
        out
    };
    // conjugate gradients on the positive definite -Laplacian
    let mut u = vec![0.0f64; m];
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rs: f64 = r.iter().map(|a| a * a).sum();
    let rhs_norm = rs.sqrt().max(1e-300);
    let mut iters = 0usize;
    for it in 0..20 * m {
        let ap = apply(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap.abs() < 1e-300 {
            break;
        }
        let alpha = rs / pap;
        for i in 0..m {
            u[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new: f64 = r.iter().map(|a| a * a).sum();
        iters = it + 1;
        if rs_new.sqrt() / rhs_norm < 1e-10 {
            break;
        }
        let beta = rs_new / rs;
        rs = rs_new;
        for i in 0..m {
            p[i] = r[i] + beta * p[i];
        }
    }
    (u, iters, rs.sqrt() / rhs_norm)
}

// ---------------------------------------------------------------------------
// Flat-torus kernel bookkeeping.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct FlatTorusKernelReport {
    pub basis_residual: f64,
    /// for each family: (description, contains four)
    pub exclusions: Vec<(String, bool)>,
}

/// The four-function kernel basis of `Delta + 4` on the flat square torus and
/// the Dirichlet eigenvalue families that must avoid the value 4.
pub fn flat_torus_kernel_report(cutoff: i64) -> FlatTorusKernelReport {
    let s = 2.0f64.sqrt();
    // analytic second derivatives of the kernel basis
    let basis: [Box<dyn Fn(f64, f64) -> (f64, f64)>; 4] = [
        Box::new(move |x, y| ((s * x).sin() * (s * y).sin(), -4.0 * (s * x).sin() * (s * y).sin())),
        Box::new(move |x, y| ((s * x).sin() * (s * y).cos(), -4.0 * (s * x).sin() * (s * y).cos())),
        Box::new(move |x, y| ((s * x).cos() * (s * y).sin(), -4.0 * (s * x).cos() * (s * y).sin())),
        Box::new(move |x, y| ((s * x).cos() * (s * y).cos(), -4.0 * (s * x).cos() * (s * y).cos())),
    ];
    let mut worst: f64 = 0.0;
    for f in &basis {
        for i in 0..17 {
            for j in 0..17 {
                let x = 0.37 * i as f64;
                let y = 0.53 * j as f64;
                let (val, lap) = f(x, y);
                worst = worst.max((lap + 4.0 * val).abs());
            }
        }
    }
    let families: Vec<(String, Box<dyn Fn(i64, i64) -> i64>, bool)> = vec![
        ("j1^2 + j2^2, j >= 1".into(), Box::new(|a, b| a * a + b * b), false),
        ("j1^2 + 4 j2^2, j >= 1".into(), Box::new(|a, b| a * a + 4 * b * b), false),
        ("16 j1^2 + j2^2, j >= 1".into(), Box::new(|a, b| 16 * a * a + b * b), false),
        ("8 j1^2 + 2 j2^2, j >= 0".into(), Box::new(|a, b| 8 * a * a + 2 * b * b), true),
    ];
    let mut exclusions = Vec::new();
    for (name, f, from_zero) in families {
        let start = if from_zero { 0 } else { 1 };
        let mut contains = false;
        for a in start..=cutoff {
            for b in start..=cutoff {
                let v = f(a, b);
                if v == 4 && (a > 0 || b > 0) {
                    contains = true;
                }
            }
        }
        exclusions.push((name, contains));
    }
    FlatTorusKernelReport { basis_residual: worst, exclusions }
}

/// Monotonicity certificate used by the uniqueness argument for the root
/// equation: `x tanh(c x)` is even and strictly monotone on the positive
/// axis for any nonzero c (increasing for positive c, decreasing otherwise).
pub fn tanh_monotonicity_certificate(c: f64, n: usize) -> bool {
    if c == 0.0 {
        return false;
    }
    let dir = c.signum();
    let f = |x: f64| x * (c * x).tanh();
    let mut prev = f(0.0);
    for i in 1..=n {
        let x = 10.0 * i as f64 / n as f64;
        let v = f(x);
        if dir * (v - prev) <= 0.0 {
            return false;
        }
        if (f(-x) - v).abs() > 1e-12 * v.abs().max(1.0) {
            return false;
        }
        prev = v;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_values() {
        for k in [2u32, 3, 5] {
            let u0 = |r: f64| radial_eigenfunction(RadialKind::ULambda, k, 0.0, r).unwrap();
            assert!(u0(1.0).abs() < 1e-15);
            assert!((u0(1e-9) - (k as f64 - 1.0)).abs() < 1e-6);
            // kernel direction in its plain normalization
            assert!(radial_kernel_mode(k, 1.0).abs() < 1e-15);
            assert!((radial_kernel_mode(k, 1e-9) + 1.0).abs() < 1e-6);
            // d/dr of the (k-1)' companion at r = 1 equals 4(k-1)
            let h = 1e-6;
            let up = radial_eigenfunction(RadialKind::UKMinusOnePrime, k, 0.0, 1.0 + h).unwrap();
            let um = radial_eigenfunction(RadialKind::UKMinusOnePrime, k, 0.0, 1.0 - h).unwrap();
            let d = (up - um) / (2.0 * h);
            assert!((d - 4.0 * (k as f64 - 1.0)).abs() < 1e-5, "k={k} d={d}");
            // value at 1 is zero
            let u1 = radial_eigenfunction(RadialKind::UKMinusOnePrime, k, 0.0, 1.0).unwrap();
            assert!(u1.abs() < 1e-14);
        }
    }

    #[test]
    fn ladder_applied_to_power_gives_radial_mode() {
        let k = 3u32;
        for lambda in [1.0, 2.0, 3.5] {
            for r in [0.3, 0.7, 0.95] {
                let f = move |r: f64| r.powf(lambda);
                let got = ladder_apply(k, -1.0, &f, r, 1e-6);
                let expect = radial_eigenfunction(RadialKind::ULambda, k, lambda, r).unwrap();
                assert!((got - expect).abs() < 1e-6, "lambda={lambda} r={r}");
            }
        }
    }

    #[test]
    fn cylinder_kernel_and_factorization() {
        for k in [2u32, 3] {
            let u0 = move |r: f64| radial_eigenfunction(RadialKind::ULambda, k, 0.0, r).unwrap();
            let h = 1e-4;
            let mut worst: f64 = 0.0;
            for i in 1..100 {
                let r = 0.02 + 0.0097 * i as f64;
                worst = worst.max(cylinder_apply(k, 0, &u0, r, h).abs());
            }
            assert!(worst < 5.0 * h * h / (h * h) * 1e-7 + 1e-6, "k={k} worst={worst}");
        }
        // potential identity as operators on smooth test functions
        let k = 3u32;
        let km1 = k as f64 - 1.0;
        for t in 1..=10 {
            let a = 0.3 + 0.05 * t as f64;
            let f = move |r: f64| (a * r).sin() + 0.3 * (1.7 * a * r).cos();
            for r in [0.4, 0.6, 0.8] {
                let h = 1e-5;
                let am_ap = {
                    let ap = move |r: f64| ladder_apply(k, 1.0, &f, r, h);
                    ladder_apply(k, -1.0, &ap, r, h)
                };
                let rho = r.ln();
                let d2 = (f((rho + h).exp()) - 2.0 * f(r) + f((rho - h).exp())) / (h * h);
                let got = am_ap - d2 + km1 * km1 * f(r);
                let expect = cylinder_potential(k, r) * f(r);
                assert!((got - expect).abs() < 1e-3, "r={r} got={got} expect={expect}");
            }
        }
    }

    #[test]
    fn neumann_root_uniqueness_and_limit() {
        for k in [2u32, 3] {
            let mut prev = 0.0;
            for (i, eps) in [(-5.0f64).exp(), (-10.0f64).exp(), (-20.0f64).exp()]
                .into_iter()
                .enumerate()
            {
                let (bis, secant) = neumann_negative_root(k, eps).unwrap();
                assert!((bis - secant).abs() < 1e-8, "two-solver disagreement");
                if i > 0 {
                    let now = (bis - (k as f64 - 1.0)).abs();
                    let before = (prev - (k as f64 - 1.0)).abs();
                    assert!(now < before || now < 1e-12, "{now} vs {before}");
                }
                prev = bis;
            }
            let (lam, _) = neumann_negative_root(k, (-20.0f64).exp()).unwrap();
            assert!((lam - (k as f64 - 1.0)).abs() < 1e-3, "k={k} lam={lam}");
        }
    }

    #[test]
    fn monotonicity_certificates() {
        for c in [1.0, -1.0, 6.9, -13.8] {
            assert!(tanh_monotonicity_certificate(c, 2000));
        }
    }

    #[test]
    fn eta_values() {
        // conformal factor at the origin is 4 / k^2; the k = 2 potential is
        // identically 2
        for k in [2u32, 3, 4] {
            let (conf, _) = eta_factor(k, num_complex::Complex64::new(0.0, 0.0));
            assert!((conf - 4.0 / (k as f64 * k as f64)).abs() < 1e-14);
        }
        for i in 0..20 {
            let z = num_complex::Complex64::from_polar(0.1 + 0.2 * i as f64, 0.7 * i as f64);
            let (_, pot) = eta_factor(2, z);
            assert!((pot - 2.0).abs() < 1e-12);
        }
        // boundedness of the potential over a wide range of radii
        for k in [3u32, 4] {
            let bound = 2.0 * (k as f64 - 1.0).powi(2) * 4.0;
            for i in 0..60 {
                let z = num_complex::Complex64::from_polar(10.0f64.powf(-3.0 + 0.1 * i as f64), 0.3);
                let (_, pot) = eta_factor(k, z);
                assert!(pot.is_finite() && pot >= 0.0 && pot < bound, "k={k} pot={pot}");
            }
        }
    }

    #[test]
    fn green_function_basics() {
        let (x_width, y_period) = (4.0, 0.5);
        let l = x_width * std::f64::consts::PI;
        for n in [1u32, 3, 9] {
            assert_eq!(strip_green(n, x_width, y_period, 0.0, 3.0), 0.0);
            assert!(strip_green(n, x_width, y_period, l, 3.0).abs() < 1e-14);
            let a = strip_green(n, x_width, y_period, 2.0, 5.0);
            let b = strip_green(n, x_width, y_period, 5.0, 2.0);
            assert!((a - b).abs() < 1e-15);
        }
        // huge aspect ratio remains finite in log space
        let g = strip_green(40, 1000.0, 0.5, 1500.0, 1501.0);
        assert!(g.is_finite() && g.abs() < 1.0);
    }

    #[test]
    fn green_is_a_fundamental_solution() {
        // integrate G against v'' - n^2/Y^2 v for smooth compactly supported
        // v and recover -v(x')
        let (x_width, y_period) = (2.0, 0.5);
        let l = x_width * std::f64::consts::PI;
        let n = 2u32;
        let v = |x: f64| {
            let t = (x - 2.0) / 1.4;
            if t.abs() >= 1.0 {
                0.0
            } else {
                (1.0 - t * t).powi(4)
            }
        };
        let vpp = |x: f64| {
            let h = 1e-5;
            (v(x + h) - 2.0 * v(x) + v(x - h)) / (h * h)
        };
        for xp in [1.7, 2.2, 2.9] {
            let m = 40_000;
            let mut acc = 0.0;
            for i in 0..=m {
                let x = l * i as f64 / m as f64;
                let w = if i == 0 || i == m { 0.5 } else { 1.0 };
                acc += w
                    * strip_green(n, x_width, y_period, x, xp)
                    * (vpp(x) - (n as f64 / y_period).powi(2) * v(x));
            }
            acc *= l / m as f64;
            assert!((acc - v(xp)).abs() < 1e-6, "xp={xp} acc={acc} v={}", v(xp));
        }
    }

    #[test]
    fn flat_torus_kernel() {
        let rep = flat_torus_kernel_report(100);
        assert!(rep.basis_residual < 1e-12);
        for (name, contains) in &rep.exclusions {
            assert!(!contains, "family {name} contains 4");
        }
    }
}
