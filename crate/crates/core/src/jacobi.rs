//! Discrete Jacobi operator on assembled meshes: intrinsic cotangent
//! Laplacian with mixed Voronoi areas plus the potential `|A|^2 + 2`, the
//! projector onto group-odd functions, a symmetric indefinite solver, and the
//! experimental normal-graph iteration toward minimality.

use nalgebra::Vector4;
use thiserror::Error;

use crate::assembly::AssembledSurface;
use crate::mesh::{vertex_permutation, SurfaceMesh};
use crate::sphere::SphereIsometry;

#[derive(Debug, Error)]
pub enum JacobiError {
    #[error("group element does not permute the mesh vertices")]
    NotEquivariant,
    #[error("projected system is near singular (condition estimate {0:.3e})")]
    NearSingular(f64),
    #[error("normal graph exceeds the injectivity bound (|u| = {0:.3e}, bound {1:.3e})")]
    GraphOverlap(f64, f64),
    #[error("solver failed to converge: residual {0:.3e}")]
    NoConvergence(f64),
}

/// Sparse symmetric operator `M u = K u + D u`, where K is the cotangent
/// stiffness and D the diagonal mass-times-potential; the Jacobi operator
/// itself is `L u = (1/area) M u`.
pub struct DiscreteJacobi {
    pub n: usize,
    pub neighbors: Vec<Vec<(u32, f64)>>,
    pub diag_weight: Vec<f64>,
    pub area: Vec<f64>,
    pub potential: Vec<f64>,
}

/// Cotangent weights and mixed Voronoi areas of a closed mesh.
pub fn cotan_weights(mesh: &SurfaceMesh) -> (Vec<Vec<(u32, f64)>>, Vec<f64>, Vec<f64>) {
    let n = mesh.vertex_count();
    let mut wmap: Vec<std::collections::HashMap<u32, f64>> =
        vec![std::collections::HashMap::new(); n];
    let mut area = vec![0.0f64; n];
    for t in &mesh.triangles {
        let p = [
            mesh.vertices[t[0] as usize],
            mesh.vertices[t[1] as usize],
            mesh.vertices[t[2] as usize],
        ];
        let mut cots = [0.0f64; 3];
        for c in 0..3 {
            let a = p[(c + 1) % 3] - p[c];
            let b = p[(c + 2) % 3] - p[c];
            let dot = a.dot(&b);
            let cross = (a.norm_squared() * b.norm_squared() - dot * dot).max(1e-300).sqrt();
            cots[c] = dot / cross;
        }
        let tri_area = 0.5
            * ((p[1] - p[0]).norm_squared() * (p[2] - p[0]).norm_squared()
                - ((p[1] - p[0]).dot(&(p[2] - p[0]))).powi(2))
            .max(0.0)
            .sqrt();
        for c in 0..3 {
            let i = t[(c + 1) % 3];
            let j = t[(c + 2) % 3];
            *wmap[i as usize].entry(j).or_insert(0.0) += 0.5 * cots[c];
            *wmap[j as usize].entry(i).or_insert(0.0) += 0.5 * cots[c];
        }
        let obtuse = (0..3).position(|c| cots[c] < 0.0);
        match obtuse {
            None => {
                for c in 0..3 {
                    let e1 = (p[(c + 1) % 3] - p[c]).norm_squared();
                    let e2 = (p[(c + 2) % 3] - p[c]).norm_squared();
                    area[t[c] as usize] += (e1 * cots[(c + 2) % 3] + e2 * cots[(c + 1) % 3]) / 8.0;
                }
            }
            Some(oc) => {
                for c in 0..3 {
                    area[t[c] as usize] += if c == oc { tri_area / 2.0 } else { tri_area / 4.0 };
                }
            }
        }
    }
    let neighbors: Vec<Vec<(u32, f64)>> = wmap
        .into_iter()
        .map(|m| {
            let mut v: Vec<(u32, f64)> = m.into_iter().collect();
            v.sort_unstable_by_key(|e| e.0);
            v
        })
        .collect();
    let diag: Vec<f64> =
        neighbors.iter().map(|row| row.iter().map(|e| e.1).sum::<f64>()).collect();
    (neighbors, diag, area)
}

impl DiscreteJacobi {
    pub fn from_mesh(mesh: &SurfaceMesh, potential: Vec<f64>) -> Self {
        let (neighbors, diag_weight, area) = cotan_weights(mesh);
        DiscreteJacobi { n: mesh.vertex_count(), neighbors, diag_weight, area, potential }
    }

    /// Potential `|A|^2 + 2` evaluated through the vertex charts.
    pub fn from_assembled(surf: &AssembledSurface) -> Self {
        use rayon::prelude::*;
        let potential: Vec<f64> = (0..surf.mesh.vertex_count())
            .into_par_iter()
            .map(|vi| crate::curvature::vertex_norm_sq_a(surf, vi) + 2.0)
            .collect();
        Self::from_mesh(&surf.mesh, potential)
    }

    /// Same, with the potential averaged over the group orbits. The true
    /// potential is group invariant; averaging removes the chart-level
    /// finite-difference noise that would otherwise break equivariance of
    /// the discrete operator.
    pub fn from_assembled_symmetrized(surf: &AssembledSurface, action: &GroupAction) -> Self {
        let mut op = Self::from_assembled(surf);
        let n = op.n;
        let mut avg = vec![0.0f64; n];
        for (inv, _sign) in &action.elements {
            for i in 0..n {
                avg[i] += op.potential[inv[i] as usize];
            }
        }
        let scale = 1.0 / action.elements.len() as f64;
        for (p, a) in op.potential.iter_mut().zip(avg) {
            *p = a * scale;
        }
        op
    }

    /// `(L u)_i = (Delta u)_i + pot_i u_i`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let mut acc = 0.0;
                for &(j, w) in &self.neighbors[i] {
                    acc += w * (u[j as usize] - u[i]);
                }
                acc / self.area[i] + self.potential[i] * u[i]
            })
            .collect()
    }

    /// The symmetrized operator `M u = area * L u`.
    pub fn apply_sym(&self, u: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let mut acc = 0.0;
                for &(j, w) in &self.neighbors[i] {
                    acc += w * (u[j as usize] - u[i]);
                }
                acc + self.area[i] * self.potential[i] * u[i]
            })
            .collect()
    }

    pub fn inner_area(&self, u: &[f64], v: &[f64]) -> f64 {
        (0..self.n).map(|i| self.area[i] * u[i] * v[i]).sum()
    }
}

/// Signed vertex permutation action of a group on mesh functions:
/// `(g . u)(x) = (-1)^g u(g^{-1} x)`.
pub struct GroupAction {
    pub elements: Vec<(Vec<u32>, f64)>,
}

impl GroupAction {
    pub fn build(
        mesh: &SurfaceMesh,
        group: &[SphereIsometry],
        tol: f64,
    ) -> Result<GroupAction, JacobiError> {
        let mut elements = Vec::with_capacity(group.len());
        for g in group {
            let perm = vertex_permutation(mesh, g, tol).ok_or(JacobiError::NotEquivariant)?;
            let mut inv = vec![0u32; perm.len()];
            for (i, &p) in perm.iter().enumerate() {
                inv[p] = i as u32;
            }
            elements.push((inv, g.parity as f64));
        }
        Ok(GroupAction { elements })
    }

    pub fn act(&self, e: usize, u: &[f64]) -> Vec<f64> {
        let (inv, sign) = &self.elements[e];
        (0..u.len()).map(|i| sign * u[inv[i] as usize]).collect()
    }

    /// Projector onto the odd subspace.
    pub fn project_odd(&self, u: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; u.len()];
        for (inv, sign) in &self.elements {
            for i in 0..u.len() {
                acc[i] += sign * u[inv[i] as usize];
            }
        }
        let scale = 1.0 / self.elements.len() as f64;
        for a in &mut acc {
            *a *= scale;
        }
        acc
    }
}

/// MINRES for a symmetric (possibly indefinite) system.
fn minres(
    op: &dyn Fn(&[f64]) -> Vec<f64>,
    rhs: &[f64],
    tol: f64,
    max_iters: usize,
) -> (Vec<f64>, f64, usize) {
    let n = rhs.len();
    let mut x = vec![0.0; n];
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let b_norm = norm(rhs);
    if b_norm == 0.0 {
        return (x, 0.0, 0);
    }
    let mut v_prev = vec![0.0; n];
    let mut v = rhs.to_vec();
    let mut beta = b_norm;
    for e in v.iter_mut() {
        *e /= beta;
    }
    let (mut c_prev, mut s_prev, mut c, mut s) = (1.0f64, 0.0f64, 1.0f64, 0.0f64);
    let mut w_prev = vec![0.0; n];
    let mut w_prev2 = vec![0.0; n];
    let mut eta = beta;
    let mut res = b_norm;
    for it in 0..max_iters {
        let mut av = op(&v);
        let alpha: f64 = av.iter().zip(&v).map(|(a, b)| a * b).sum();
        for i in 0..n {
            av[i] -= alpha * v[i] + beta * v_prev[i];
        }
        let beta_new = norm(&av);
        let delta = c * alpha - c_prev * s * beta;
        let rho1 = (delta * delta + beta_new * beta_new).sqrt();
        let rho2 = s * alpha + c_prev * c * beta;
        let rho3 = s_prev * beta;
        if rho1 < 1e-300 {
            break;
        }
        let c_new = delta / rho1;
        let s_new = beta_new / rho1;
        let mut w = vec![0.0; n];
        for i in 0..n {
            w[i] = (v[i] - rho2 * w_prev[i] - rho3 * w_prev2[i]) / rho1;
            x[i] += c_new * eta * w[i];
        }
        res *= s_new.abs();
        if res / b_norm < tol {
            return (x, res / b_norm, it + 1);
        }
        eta = -s_new * eta;
        w_prev2 = std::mem::take(&mut w_prev);
        w_prev = w;
        v_prev = std::mem::replace(&mut v, av);
        if beta_new < 1e-300 {
            break;
        }
        for e in v.iter_mut() {
            *e /= beta_new;
        }
        c_prev = c;
        s_prev = s;
        c = c_new;
        s = s_new;
        beta = beta_new;
    }
    let final_res = {
        let ax = op(&x);
        let r: f64 = ax.iter().zip(rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        r.sqrt() / b_norm
    };
    (x, final_res, max_iters)
}

pub struct SolveReport {
    pub u: Vec<f64>,
    pub relative_residual: f64,
    pub iterations: usize,
    pub condition_estimate: f64,
    pub annihilated_input: bool,
}

/// Solve `L u = f` on the group-odd subspace by MINRES on the symmetrized
/// projected system, with a crude condition estimate.
pub fn jacobi_solve(
    op: &DiscreteJacobi,
    action: &GroupAction,
    f: &[f64],
    tol: f64,
) -> Result<SolveReport, JacobiError> {
    let fo = action.project_odd(f);
    let rhs: Vec<f64> = (0..op.n).map(|i| op.area[i] * fo[i]).collect();
    let rhs_norm: f64 = rhs.iter().map(|a| a * a).sum::<f64>().sqrt();
    let f_norm: f64 = f.iter().map(|a| a * a).sum::<f64>().sqrt();
    if rhs_norm < 1e-14 * (1.0 + f_norm) {
        return Ok(SolveReport {
            u: vec![0.0; op.n],
            relative_residual: 0.0,
            iterations: 0,
            condition_estimate: 0.0,
            annihilated_input: f_norm > 0.0,
        });
    }
    let apply = |u: &[f64]| -> Vec<f64> {
        let pu = action.project_odd(u);
        let m = op.apply_sym(&pu);
        action.project_odd(&m)
    };
    let (u, rel, iters) = minres(&apply, &rhs, tol, 6 * op.n);
    let u = action.project_odd(&u);
    let mut p: Vec<f64> =
        (0..op.n).map(|i| ((i.wrapping_mul(2654435761)) % 1000) as f64 / 1000.0 - 0.5).collect();
    p = action.project_odd(&p);
    let mut lam_max: f64 = 1.0;
    for _ in 0..30 {
        let q = apply(&p);
        lam_max = q.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-300);
        p = q.iter().map(|a| a / lam_max).collect();
    }
    let unorm2: f64 = u.iter().map(|a| a * a).sum();
    let lam_small = if unorm2 > 0.0 {
        (u.iter().zip(apply(&u)).map(|(a, b)| a * b).sum::<f64>() / unorm2).abs()
    } else {
        lam_max
    };
    let cond = lam_max / lam_small.max(1e-300);
    if rel > tol * 10.0 {
        return Err(JacobiError::NoConvergence(rel));
    }
    Ok(SolveReport {
        u,
        relative_residual: rel,
        iterations: iters,
        condition_estimate: cond,
        annihilated_input: false,
    })
}

// ---------------------------------------------------------------------------
// Discrete mean curvature and the normal-graph iteration.
// ---------------------------------------------------------------------------

/// Discrete mean curvature relative to the given vertex normals, using that
/// coordinate functions of a surface in the unit 3-sphere satisfy
/// `Delta X = H nu - 2 X`.
pub fn discrete_mean_curvature(mesh: &SurfaceMesh, normals: &[Vector4<f64>]) -> Vec<f64> {
    let (neighbors, _diag, area) = cotan_weights(mesh);
    (0..mesh.vertex_count())
        .map(|i| {
            let mut lap = Vector4::zeros();
            for &(j, w) in &neighbors[i] {
                lap += (mesh.vertices[j as usize] - mesh.vertices[i]) * w;
            }
            lap /= area[i];
            (lap + mesh.vertices[i] * 2.0).dot(&normals[i])
        })
        .collect()
}

pub struct PerturbationReport {
    pub residual_history: Vec<f64>,
    pub final_u_sup: f64,
    pub success: bool,
    pub note: String,
}

/// Experimental fixed-point iteration toward minimality: repeatedly solve the
/// initial-surface Jacobi equation against the current discrete mean
/// curvature and flow along the normal graph, with step halving on residual
/// increase. Non-convergence is reported, not an error.
pub fn perturb_to_minimal(
    surf: &AssembledSurface,
    action: &GroupAction,
    max_iters: usize,
) -> Result<PerturbationReport, JacobiError> {
    let op = DiscreteJacobi::from_assembled_symmetrized(surf, action);
    let base = &surf.mesh;
    let bound = 0.3 * base.mean_edge_length();
    let mut u = vec![0.0; op.n];
    let deform = |u: &[f64]| -> (SurfaceMesh, Vec<Vector4<f64>>) {
        let mut m = base.clone();
        for i in 0..op.n {
            let p = base.vertices[i];
            let nu = base.normals[i];
            m.vertices[i] = p * u[i].cos() + nu * u[i].sin();
        }
        m.compute_normals();
        let normals: Vec<Vector4<f64>> = (0..op.n)
            .map(|i| {
                let n = m.normals[i];
                let reference = base.normals[i] * u[i].cos() - base.vertices[i] * u[i].sin();
                if n.dot(&reference) < 0.0 {
                    -n
                } else {
                    n
                }
            })
            .collect();
        (m, normals)
    };
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let (m0, n0) = deform(&u);
    let mut res = sup(&action.project_odd(&discrete_mean_curvature(&m0, &n0)));
    let mut history = vec![res];
    let mut note = String::new();
    for _ in 0..max_iters {
        let (mc, nc) = deform(&u);
        let h = discrete_mean_curvature(&mc, &nc);
        let solve = jacobi_solve(&op, action, &h, 1e-10)?;
        let mut improved = false;
        let mut step = 1.0;
        for _ in 0..5 {
            let cand: Vec<f64> = (0..op.n).map(|i| u[i] - step * solve.u[i]).collect();
            let cand_sup = sup(&cand);
            if cand_sup > bound {
                return Err(JacobiError::GraphOverlap(cand_sup, bound));
            }
            let (m2, n2) = deform(&cand);
            let r2 = sup(&action.project_odd(&discrete_mean_curvature(&m2, &n2)));
            if r2 < res {
                u = cand;
                res = r2;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        history.push(res);
        if !improved {
            note = "residual stagnated".into();
            break;
        }
    }
    let success = history[0] > 0.0 && res <= history[0] / 5.0;
    Ok(PerturbationReport { residual_history: history, final_u_sup: sup(&u), success, note })
}
