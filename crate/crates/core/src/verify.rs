//! The acceptance suite: every quantitative exit criterion with its pinned
//! tolerance, runnable as a batch. Each criterion returns a row with the
//! measured values, the expectation, and a pass flag; the final experimental
//! row is informative and never gates.

use std::time::Instant;

use serde::Serialize;

use crate::assembly::{assemble, symmetry_invariance, InitialSurfaceSpec};
use crate::curvature::{mean_curvature_scaling, tower_minimality_residual};
use crate::jacobi::{jacobi_solve, perturb_to_minimal, DiscreteJacobi, GroupAction};
use crate::sphere::{
    build_symmetry_group, circle_c1, circle_c2, circle_cdprime, circle_cphi, circle_cprime,
    phi_cyl, phi_pullback_metric, rotation_about_circle, GroupKind,
};
use crate::spectral::{
    flat_torus_kernel_report, hemisphere_counts, neumann_negative_root, strip_fd_oracle,
    strip_solve, StripProblem,
};
use crate::weierstrass::wing_decay_fit;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub claim: String,
    pub measured: String,
    pub expected: String,
    pub passed: bool,
    pub gating: bool,
    pub runtime_ms: u128,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2}  {:<22} {:>8.1}s  {}",
            if self.passed { "PASS" } else if self.gating { "FAIL" } else { "info" },
            self.id,
            self.name,
            self.runtime_ms as f64 / 1000.0,
            self.measured
        )
    }
}

fn row(
    id: u32,
    name: &str,
    claim: &str,
    expected: &str,
    gating: bool,
    start: Instant,
    passed: bool,
    measured: String,
) -> CriterionReport {
    CriterionReport {
        id,
        name: name.into(),
        claim: claim.into(),
        measured,
        expected: expected.into(),
        passed,
        gating,
        runtime_ms: start.elapsed().as_millis(),
    }
}

pub fn criterion_genus_matrix() -> CriterionReport {
    let t = Instant::now();
    let cases: Vec<InitialSurfaceSpec> = vec![
        InitialSurfaceSpec::M { k: 2, m: 1, n1: 1, n2: 1, sigma: 0 },
        InitialSurfaceSpec::M { k: 2, m: 2, n1: 1, n2: 1, sigma: 0 },
        InitialSurfaceSpec::M { k: 3, m: 1, n1: 1, n2: 1, sigma: 0 },
        InitialSurfaceSpec::M { k: 3, m: 2, n1: 1, n2: 2, sigma: 0 },
        InitialSurfaceSpec::M { k: 2, m: 1, n1: 1, n2: 2, sigma: 1 },
        InitialSurfaceSpec::N { k: 2, m: 1, n: 1, np1: 1, npm1: 1, sp1: 0, spm1: 0 },
        InitialSurfaceSpec::N { k: 2, m: 1, n: 2, np1: 1, npm1: 1, sp1: 0, spm1: 0 },
        InitialSurfaceSpec::N { k: 3, m: 1, n: 1, np1: 1, npm1: 1, sp1: 0, spm1: 0 },
    ];
    let mut all = true;
    let mut parts = Vec::new();
    for spec in &cases {
        match assemble(spec, 16) {
            Ok(surf) => match surf.mesh.genus() {
                Ok(g) => {
                    let ok = g == spec.genus_formula();
                    all &= ok;
                    parts.push(format!("{}={g}{}", spec.label(), if ok { "" } else { "!" }));
                }
                Err(e) => {
                    all = false;
                    parts.push(format!("{}: {e}", spec.label()));
                }
            },
            Err(e) => {
                all = false;
                parts.push(format!("{}: {e}", spec.label()));
            }
        }
    }
    row(
        1,
        "genus-matrix",
        "meshed genus equals the closed-form handle count for eight surfaces",
        "exact equality",
        true,
        t,
        all,
        parts.join(" "),
    )
}

pub fn criterion_tower_minimality() -> CriterionReport {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for k in [2u32, 3, 4] {
        worst = worst.max(tower_minimality_residual(k, 128));
    }
    row(
        2,
        "tower-minimality",
        "Euclidean mean curvature of the Weierstrass patches vanishes relative to |A|",
        "<= 1e-6 for k in {2,3,4} at 128x128",
        true,
        t,
        worst <= 1e-6,
        format!("max relative |H| = {worst:.2e}"),
    )
}

pub fn criterion_wing_decay() -> CriterionReport {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [2u32, 3] {
        let lo = crate::weierstrass::wing_onset_chart(k) / k as f64 + 0.15;
        let slope = wing_decay_fit(k, lo, lo + 2.5, 18).unwrap_or(f64::NAN);
        let pass = slope >= -1.2 * k as f64 && slope <= -0.8 * k as f64;
        ok &= pass;
        parts.push(format!("k={k}: {slope:.3}"));
    }
    let lo4 = crate::weierstrass::wing_onset_chart(4) / 4.0 + 0.15;
    let s4 = wing_decay_fit(4, lo4, lo4 + 2.0, 16).unwrap_or(f64::NAN);
    ok &= s4 <= -1.0;
    parts.push(format!("k=4: {s4:.3}"));
    row(
        3,
        "wing-decay",
        "fitted slope of log wing height against the axis coordinate",
        "in [-1.2k, -0.8k] for k in {2,3}; <= -1 always",
        true,
        t,
        ok,
        parts.join("  "),
    )
}

pub fn criterion_pullback_metric() -> CriterionReport {
    let t = Instant::now();
    let mut state = 0x5bd1e995u64;
    let mut rand = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r = 0.05 + 1.3 * rand();
        let th = 2.0 * std::f64::consts::PI * rand();
        let z = 5.0 * rand();
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
                worst = worst.max((gram[i][j] - g[i][j]).abs());
            }
        }
    }
    row(
        4,
        "pullback-identity",
        "analytic pullback metric of the cylindrical map equals the difference Gram matrix",
        "<= 1e-6 at 100 random points",
        true,
        t,
        worst <= 1e-6,
        format!("max entry defect = {worst:.2e}"),
    )
}

pub fn criterion_symmetry_suite() -> CriterionReport {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    // mesh invariance under the full groups
    let m_spec = InitialSurfaceSpec::M { k: 2, m: 1, n1: 1, n2: 1, sigma: 0 };
    let m_surf = assemble(&m_spec, 20).unwrap();
    let g = build_symmetry_group(2, 1, GroupKind::G).unwrap();
    let h = m_surf.mesh.max_edge_length();
    let res_m = symmetry_invariance(&m_surf.mesh, &g);
    ok &= res_m <= 2.0 * h;
    parts.push(format!("M residual {res_m:.1e} (2h={:.1e})", 2.0 * h));
    let n_spec = InitialSurfaceSpec::N { k: 2, m: 1, n: 1, np1: 1, npm1: 1, sp1: 0, spm1: 0 };
    let n_surf = assemble(&n_spec, 16).unwrap();
    let gp = build_symmetry_group(2, 1, GroupKind::GPrime).unwrap();
    let hn = n_surf.mesh.max_edge_length();
    let res_n = symmetry_invariance(&n_surf.mesh, &gp);
    ok &= res_n <= 2.0 * hn;
    parts.push(format!("N residual {res_n:.1e}"));
    // minimal group order
    let gmin = build_symmetry_group(2, 1, GroupKind::GMin).unwrap();
    ok &= gmin.len() == 4;
    parts.push(format!("|Gmin|={}", gmin.len()));
    // reflection composition identities at random angles and indices
    let pi = std::f64::consts::PI;
    let mut state = 77u64;
    let mut rand = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (p1, p2, q1, q2) = (rand() * pi, rand() * pi, rand() * pi, rand() * pi);
        let lhs = rotation_about_circle(&circle_cphi(p1, p2), pi)
            .compose(&rotation_about_circle(&circle_cphi(q1, q2), pi));
        let rhs = rotation_about_circle(&circle_c1(), 2.0 * (p2 - q2))
            .compose(&rotation_about_circle(&circle_c2(), 2.0 * (p1 - q1)));
        worst = worst.max((lhs.matrix - rhs.matrix).norm());
        let (s1, s2) = (rand() * 2.0 * pi, rand() * 2.0 * pi);
        let lhs2 = rotation_about_circle(&circle_cdprime(s1), pi)
            .compose(&rotation_about_circle(&circle_cdprime(s2), pi));
        let rhs2 = rotation_about_circle(&circle_c1(), s1 - s2)
            .compose(&rotation_about_circle(&circle_c2(), s1 - s2));
        worst = worst.max((lhs2.matrix - rhs2.matrix).norm());
        let k = 2 + (rand() * 3.0) as u32;
        let (j, l) = ((rand() * 6.0).floor(), (rand() * 6.0).floor());
        let lhs3 = rotation_about_circle(&circle_cprime(k, j), pi)
            .compose(&rotation_about_circle(&circle_cprime(k, l), pi));
        let rhs3 = rotation_about_circle(&circle_c1(), (j - l) * pi / k as f64)
            .compose(&rotation_about_circle(&circle_c2(), (l - j) * pi / k as f64));
        worst = worst.max((lhs3.matrix - rhs3.matrix).norm());
    }
    ok &= worst <= 1e-12;
    parts.push(format!("composition defect {worst:.1e}"));
    row(
        5,
        "symmetry-suite",
        "group invariance of the meshes, the order-four minimal group, and the circle-reflection composition identities",
        "residuals <= 2h; |Gmin| = 4; identities to 1e-12",
        true,
        t,
        ok,
        parts.join("  "),
    )
}

pub fn criterion_clifford_constants() -> CriterionReport {
    let t = Instant::now();
    let f = |u: f64, v: f64| {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        nalgebra::Vector4::new(r * u.cos(), r * u.sin(), r * v.cos(), r * v.sin())
    };
    let mut worst_h: f64 = 0.0;
    let mut worst_a: f64 = 0.0;
    for i in 0..12 {
        for j in 0..12 {
            let u = 2.0 * std::f64::consts::PI * i as f64 / 12.0;
            let v = 2.0 * std::f64::consts::PI * (j as f64 + 0.3) / 12.0;
            let forms =
                crate::curvature::forms_at_sphere(&f, u, v, crate::curvature::default_fd_step());
            worst_h = worst_h.max(forms.h.abs());
            worst_a = worst_a.max((forms.norm_sq_a - 2.0).abs());
        }
    }
    // the operator reduces to Delta + 4 there: constants map to 4 * constant
    let mut mesh = crate::mesh::clifford_torus_mesh(24, 24);
    mesh.orient().unwrap();
    let op = DiscreteJacobi::from_mesh(&mesh, vec![4.0; mesh.vertex_count()]);
    let lu = op.apply(&vec![1.0; op.n]);
    let const_defect =
        lu.iter().map(|v| (v - 4.0).abs()).fold(0.0f64, f64::max);
    let ok = worst_h <= 1e-6 && worst_a <= 1e-6 && const_defect <= 1e-10;
    row(
        6,
        "clifford-constants",
        "vanishing mean curvature, squared second form equal to two, and the constant-potential reduction of the Jacobi operator",
        "|H| <= 1e-6, ||A|^2 - 2| <= 1e-6, constant test to 1e-10",
        true,
        t,
        ok,
        format!("|H|={worst_h:.1e} |A|^2 defect={worst_a:.1e} const={const_defect:.1e}"),
    )
}

pub fn criterion_hemisphere_counts() -> CriterionReport {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [2u32, 3, 4] {
        for eps in [1e-2, 1e-3] {
            match hemisphere_counts(k, eps, (8 * k) as i64) {
                Ok(rep) => {
                    // counts must also survive halving of the inner radius
                    let halved = hemisphere_counts(k, eps / 2.0, (8 * k) as i64);
                    let stable = halved.as_ref().map_or(false, |r2| {
                        r2.dirichlet.nullity == rep.dirichlet.nullity
                            && r2.dirichlet.negatives == rep.dirichlet.negatives
                            && r2.neumann.nullity == rep.neumann.nullity
                            && r2.neumann.negatives == rep.neumann.negatives
                    });
                    let pass = stable
                        && rep.dirichlet.nullity == 1
                        && rep.dirichlet.negatives == 0
                        && rep.neumann.nullity == 0
                        && rep.neumann.negatives == 1;
                    ok &= pass;
                    if !pass {
                        parts.push(format!(
                            "k={k} eps={eps:.0e}: D=({},{}) N=({},{})",
                            rep.dirichlet.nullity,
                            rep.dirichlet.negatives,
                            rep.neumann.nullity,
                            rep.neumann.negatives
                        ));
                    }
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("k={k} eps={eps:.0e}: {e}"));
                }
            }
        }
        // root location at very small eps
        match neumann_negative_root(k, (-20.0f64).exp()) {
            Ok((lam, _)) => {
                let pass = (lam - (k as f64 - 1.0)).abs() <= 1e-3;
                ok &= pass;
                parts.push(format!("k={k} root={lam:.6}"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("k={k} root: {e}"));
            }
        }
    }
    row(
        7,
        "hemisphere-spectra",
        "Dirichlet kernel dimension one with no negatives; Neumann trivial kernel with one negative; the transcendental root tends to k-1",
        "counts (1,0) and (0,1) for k in {2,3,4}, eps in {1e-2,1e-3}; root within 1e-3",
        true,
        t,
        ok,
        parts.join("  "),
    )
}

pub fn criterion_strip_solver() -> CriterionReport {
    let t = Instant::now();
    let y_period = 0.5;
    let forcing = move |x: f64, y: f64| {
        let tb = (x - 6.0) / 2.5;
        let bump = if tb.abs() >= 1.0 { 0.0 } else { (1.0 - tb * tb).powi(3) };
        bump * ((y / y_period).sin() + 0.4 * (3.0 * y / y_period).sin())
    };
    // oracle agreement at X = 4
    let x_width = 4.0;
    let sol =
        strip_solve(&StripProblem { x_width, y_period, forcing: &forcing }, 768, 128, 1e-10)
            .unwrap();
    let (nx, ny) = (768usize, 96usize);
    let (grid, _it, _res) = strip_fd_oracle(x_width, y_period, &forcing, nx, ny);
    let lx = x_width * std::f64::consts::PI;
    let ly = y_period * std::f64::consts::PI;
    let mut sup_u: f64 = 0.0;
    let mut sup_err: f64 = 0.0;
    for j in 1..ny {
        for i in 1..nx {
            let x = lx * i as f64 / nx as f64;
            let y = ly * j as f64 / ny as f64;
            let a = sol.eval(x, y);
            let b = grid[(j - 1) * (nx - 1) + (i - 1)];
            sup_u = sup_u.max(b.abs());
            sup_err = sup_err.max((a - b).abs());
        }
    }
    let rel = sup_err / sup_u;
    // decay rate left of the support
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..18 {
        let x = 0.4 + 0.1 * i as f64;
        let mut sup: f64 = 0.0;
        for j in 1..30 {
            sup = sup.max(sol.eval(x, ly * j as f64 / 30.0).abs());
        }
        xs.push(x);
        ys.push(sup.max(1e-300).ln());
    }
    let slope = crate::weierstrass::linear_fit_slope(&xs, &ys);
    // sup-norm constant across doubling widths
    let mut consts = Vec::new();
    for xw in [4.0, 8.0, 16.0] {
        let s = strip_solve(
            &StripProblem { x_width: xw, y_period, forcing: &forcing },
            (96.0 * xw) as usize,
            96,
            1e-9,
        )
        .unwrap();
        let mut su: f64 = 0.0;
        let mut sf: f64 = 0.0;
        for i in 0..400 {
            let x = xw * std::f64::consts::PI * i as f64 / 400.0;
            for j in 1..20 {
                let y = ly * j as f64 / 20.0;
                su = su.max(s.eval(x, y).abs());
                sf = sf.max(forcing(x, y).abs());
            }
        }
        consts.push(su / sf);
    }
    let drift = consts
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / w[0])
        .fold(0.0f64, f64::max);
    let ok = rel <= 1e-3 && slope >= 1.0 / y_period - 0.1 && drift <= 0.10;
    row(
        8,
        "strip-solver",
        "sine-series Poisson solution matches a dense five-point solve, decays at the first-mode rate, and its norm constant ignores the width",
        "relative error <= 1e-3; rate >= 1/Y - 0.1; drift <= 10%",
        true,
        t,
        ok,
        format!("rel={rel:.2e} rate={slope:.3} drift={:.1}%", drift * 100.0),
    )
}

pub fn criterion_flat_torus_kernel() -> CriterionReport {
    let t = Instant::now();
    let rep = flat_torus_kernel_report(100);
    let ok = rep.basis_residual <= 1e-12 && rep.exclusions.iter().all(|e| !e.1);
    row(
        9,
        "flat-torus-kernel",
        "the four-function kernel of the flat-torus operator and the absence of four from the Dirichlet eigenvalue families",
        "residual <= 1e-12; 4 excluded up to 100",
        true,
        t,
        ok,
        format!("residual={:.1e}, families checked={}", rep.basis_residual, rep.exclusions.len()),
    )
}

pub fn criterion_curvature_scaling() -> CriterionReport {
    let t = Instant::now();
    match mean_curvature_scaling(2, 1, 1, &[4, 8, 16], 20) {
        Ok((p, values)) => row(
            10,
            "curvature-scaling",
            "fitted growth exponent of the sup of mean curvature in the wrap count",
            "p <= 0.6",
            true,
            t,
            p <= 0.6,
            format!(
                "p = {p:.3}; sup|H| = {}",
                values.iter().map(|(m, v)| format!("m={m}:{v:.2e}")).collect::<Vec<_>>().join(" ")
            ),
        ),
        Err(e) => row(
            10,
            "curvature-scaling",
            "fitted growth exponent of the sup of mean curvature in the wrap count",
            "p <= 0.6",
            true,
            t,
            false,
            format!("{e}"),
        ),
    }
}

pub fn criterion_jacobi_solve() -> CriterionReport {
    let t = Instant::now();
    let spec = InitialSurfaceSpec::M { k: 2, m: 4, n1: 1, n2: 1, sigma: 0 };
    let surf = assemble(&spec, 16).unwrap();
    let group = build_symmetry_group(2, 4, GroupKind::G).unwrap();
    let action = match GroupAction::build(&surf.mesh, &group, 1e-9) {
        Ok(a) => a,
        Err(e) => {
            return row(
                11,
                "jacobi-solve",
                "group-odd solvability of the discrete Jacobi equation",
                "manufactured round trip <= 1e-6",
                true,
                t,
                false,
                format!("{e}"),
            )
        }
    };
    let op = DiscreteJacobi::from_assembled_symmetrized(&surf, &action);
    let mut state = 0x2545f4914f6cdd1du64;
    let noise: Vec<f64> = (0..op.n)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    let u0 = action.project_odd(&noise);
    let u0n = u0.iter().map(|a| a * a).sum::<f64>().sqrt();
    let f = op.apply(&u0);
    match jacobi_solve(&op, &action, &f, 1e-12) {
        Ok(rep) => {
            let err =
                rep.u.iter().zip(&u0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() / u0n;
            let nonsingular = rep.condition_estimate.is_finite() && rep.condition_estimate > 0.0;
            row(
                11,
                "jacobi-solve",
                "group-odd solvability of the discrete Jacobi equation",
                "manufactured round trip <= 1e-6; projected system nonsingular",
                true,
                t,
                err <= 1e-6 && nonsingular,
                format!("relative error {err:.2e}; condition ~ {:.2e}", rep.condition_estimate),
            )
        }
        Err(e) => row(
            11,
            "jacobi-solve",
            "group-odd solvability of the discrete Jacobi equation",
            "manufactured round trip <= 1e-6",
            true,
            t,
            false,
            format!("{e}"),
        ),
    }
}

pub fn criterion_perturbation() -> CriterionReport {
    let t = Instant::now();
    let spec = InitialSurfaceSpec::M { k: 2, m: 8, n1: 1, n2: 1, sigma: 0 };
    let surf = match assemble(&spec, 16) {
        Ok(s) => s,
        Err(e) => {
            return row(
                12,
                "minimality-iteration",
                "experimental normal-graph iteration reduces the mean curvature",
                "5x within 10 iterations (non-gating)",
                false,
                t,
                false,
                format!("{e}"),
            )
        }
    };
    let group = build_symmetry_group(2, 8, GroupKind::G).unwrap();
    let action = match GroupAction::build(&surf.mesh, &group, 1e-9) {
        Ok(a) => a,
        Err(e) => {
            return row(
                12,
                "minimality-iteration",
                "experimental normal-graph iteration reduces the mean curvature",
                "5x within 10 iterations (non-gating)",
                false,
                t,
                false,
                format!("{e}"),
            )
        }
    };
    match perturb_to_minimal(&surf, &action, 10) {
        Ok(rep) => {
            let first = rep.residual_history.first().copied().unwrap_or(0.0);
            let last = rep.residual_history.last().copied().unwrap_or(0.0);
            row(
                12,
                "minimality-iteration",
                "experimental normal-graph iteration reduces the mean curvature",
                "5x within 10 iterations (non-gating)",
                false,
                t,
                rep.success,
                format!(
                    "residual {first:.2e} -> {last:.2e} in {} steps; |u| = {:.2e} {}",
                    rep.residual_history.len() - 1,
                    rep.final_u_sup,
                    rep.note
                ),
            )
        }
        Err(e) => row(
            12,
            "minimality-iteration",
            "experimental normal-graph iteration reduces the mean curvature",
            "5x within 10 iterations (non-gating)",
            false,
            t,
            false,
            format!("diagnostic: {e}"),
        ),
    }
}

/// Run the full suite in order.
pub fn run_acceptance() -> Vec<CriterionReport> {
    vec![
        criterion_genus_matrix(),
        criterion_tower_minimality(),
        criterion_wing_decay(),
        criterion_pullback_metric(),
        criterion_symmetry_suite(),
        criterion_clifford_constants(),
        criterion_hemisphere_counts(),
        criterion_strip_solver(),
        criterion_flat_torus_kernel(),
        criterion_curvature_scaling(),
        criterion_jacobi_solve(),
        criterion_perturbation(),
    ]
}

/// Claim catalogue for the report interface: stable identifiers with the
/// mathematical statement each check pins down.
pub fn claim_catalogue() -> Vec<(String, String)> {
    vec![
        ("genus.M".into(), "genus of an M surface is k(k-1)m(n1+n2)+1".into()),
        ("genus.N".into(), "genus of an N surface is 2k^2 m(n'1+n'-1)+4kmn(k-1)+1".into()),
        ("tower.minimality".into(), "the Weierstrass patches have vanishing mean curvature".into()),
        ("tower.decay".into(), "wing heights decay like exp(-k s) in the axis coordinate".into()),
        ("tower.slab-wedge".into(), "the fundamental patch stays in its slab and wedge".into()),
        ("phi.pullback".into(), "the cylindrical map pulls the round metric back to dr^2 + sin^2 r dtheta^2 + 2 sin^2 r dtheta dz + dz^2".into()),
        ("phi.intertwine".into(), "the cylindrical map intertwines Euclidean motions with rotations about the coordinate circles".into()),
        ("config.angles".into(), "the k tori meet along the coordinate circles at equal angles pi/k".into()),
        ("scaffold.counts".into(), "scaffold circle counts are k^2 m and 2k^2 m + 2km".into()),
        ("group.orders".into(), "the reflection groups close with parity a homomorphism".into()),
        ("group.min".into(), "the minimal symmetry group has exactly four elements".into()),
        ("symcomp".into(), "products of circle reflections reduce to rotations about the coordinate circles".into()),
        ("clifford.constants".into(), "Clifford tori satisfy H = 0 and |A|^2 = 2".into()),
        ("surface.watertight".into(), "assembled initial surfaces are watertight and embedded".into()),
        ("surface.symmetry".into(), "assembled surfaces are invariant under their reflection groups".into()),
        ("surface.scaffold".into(), "the scaffolding lies on the assembled surfaces".into()),
        ("surface.alignment".into(), "the normal alignment invariant flips with the alignment datum".into()),
        ("regions.estimates".into(), "toral sheets approach the flat torus exponentially in the boundary distance".into()),
        ("curvature.scaling".into(), "the sup of mean curvature grows slower than the half power of the wrap count".into()),
        ("jacobi.operator".into(), "the Jacobi operator is the Laplacian plus |A|^2 + 2, reducing to Delta + 4 on Clifford tori".into()),
        ("jacobi.solve".into(), "the group-odd projected Jacobi system is solvable".into()),
        ("hemisphere.counts".into(), "Dirichlet kernel of dimension one without negatives; Neumann one negative without kernel".into()),
        ("hemisphere.root".into(), "the Neumann root equation has a unique solution tending to k-1".into()),
        ("strip.solver".into(), "the strip Poisson solver has width-independent norm and first-mode decay".into()),
        ("flat-torus.kernel".into(), "the flat-torus operator kernel is four dimensional and 4 avoids the Dirichlet families".into()),
        ("perturbation".into(), "the normal-graph iteration reduces mean curvature (experimental)".into()),
    ]
}
