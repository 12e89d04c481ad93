//! Watertight triangle meshes with vertices on S^3: half-edge audit, Euler
//! characteristic and genus, global orientation, distances to point clouds,
//! and a self-intersection scan.

use nalgebra::Vector4;
use std::collections::HashMap;
use thiserror::Error;

use crate::sphere::{PointS3, SphereIsometry};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh is not watertight: {0}")]
    NotWatertight(String),
    #[error("mesh is not orientable")]
    NotOrientable,
    #[error("mesh is empty or degenerate")]
    Degenerate,
}

/// Per-vertex region tag: a tower collar around an intersection circle or a
/// toral sheet between circles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegionTag {
    Tower { circle: String, m_c: u32, k_c: u32 },
    Torus { component: String },
}

/// Triangle mesh on S^3 with optional per-vertex region tags and chart
/// provenance indices maintained by the assembler.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub vertices: Vec<Vector4<f64>>,
    pub triangles: Vec<[u32; 3]>,
    pub normals: Vec<Vector4<f64>>,
    pub tags: Vec<Option<RegionTag>>,
    /// assembler-defined chart handle per vertex (tower id, chart data index)
    pub chart_refs: Vec<Option<(u32, u32)>>,
}

impl SurfaceMesh {
    pub fn new(vertices: Vec<Vector4<f64>>, triangles: Vec<[u32; 3]>) -> Self {
        let n = vertices.len();
        Self {
            vertices,
            triangles,
            normals: Vec::new(),
            tags: vec![None; n],
            chart_refs: vec![None; n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        let mut edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    /// Every undirected edge must be shared by exactly two triangles and no
    /// triangle may be degenerate.
    pub fn audit_watertight(&self) -> Result<(), MeshError> {
        if self.triangles.is_empty() {
            return Err(MeshError::Degenerate);
        }
        let mut edge_count: HashMap<(u32, u32), u32> = HashMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(MeshError::NotWatertight(format!("degenerate triangle {ti}")));
            }
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *edge_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        for (e, c) in &edge_count {
            if *c != 2 {
                return Err(MeshError::NotWatertight(format!(
                    "edge {:?} shared by {} triangles",
                    e, c
                )));
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// Genus of a closed connected orientable mesh.
    pub fn genus(&self) -> Result<i64, MeshError> {
        self.audit_watertight()?;
        Ok((2 - self.euler_characteristic()) / 2)
    }

    /// Make the triangle windings globally consistent by breadth-first
    /// propagation, then fix the global sign so that the vertex normal at the
    /// point closest to (1,0,0,0) has positive inner product with (0,1,0,0),
    /// when such a vertex exists on the mesh. Fills `normals`.
    pub fn orient(&mut self) -> Result<(), MeshError> {
        self.audit_watertight()?;
        // adjacency via directed edges
        let mut edge_to_faces: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edge_to_faces.entry((a.min(b), a.max(b))).or_default().push(ti);
            }
        }
        let nf = self.triangles.len();
        let mut visited = vec![false; nf];
        let mut stack = vec![0usize];
        visited[0] = true;
        while let Some(fi) = stack.pop() {
            let t = self.triangles[fi];
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (a.min(b), a.max(b));
                for &fj in &edge_to_faces[&key] {
                    if fj == fi || visited[fj] {
                        continue;
                    }
                    // consistent orientation: the shared edge must appear in
                    // opposite directions in the two faces
                    let u = self.triangles[fj];
                    let has_same_dir = [(u[0], u[1]), (u[1], u[2]), (u[2], u[0])]
                        .iter()
                        .any(|&(c, d)| (c, d) == (a, b));
                    if has_same_dir {
                        self.triangles[fj].swap(1, 2);
                    }
                    visited[fj] = true;
                    stack.push(fj);
                }
            }
        }
        if visited.iter().any(|v| !v) {
            // disconnected: orient each component from its first face; a
            // disconnected surface mesh is rejected by genus checks anyway
            for start in 0..nf {
                if !visited[start] {
                    visited[start] = true;
                    let mut st = vec![start];
                    while let Some(fi) = st.pop() {
                        let t = self.triangles[fi];
                        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                            let key = (a.min(b), a.max(b));
                            for &fj in &edge_to_faces[&key] {
                                if fj == fi || visited[fj] {
                                    continue;
                                }
                                let u = self.triangles[fj];
                                let same = [(u[0], u[1]), (u[1], u[2]), (u[2], u[0])]
                                    .iter()
                                    .any(|&(c, d)| (c, d) == (a, b));
                                if same {
                                    self.triangles[fj].swap(1, 2);
                                }
                                visited[fj] = true;
                                st.push(fj);
                            }
                        }
                    }
                }
            }
        }
        // verify consistency
        let mut dir_edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                if !dir_edges.insert((a, b)) {
                    return Err(MeshError::NotOrientable);
                }
            }
        }
        self.compute_normals();
        // anchor the global sign
        let anchor = Vector4::new(1.0, 0.0, 0.0, 0.0);
        let mut best = (f64::INFINITY, 0usize);
        for (i, v) in self.vertices.iter().enumerate() {
            let d = (v - anchor).norm();
            if d < best.0 {
                best = (d, i);
            }
        }
        if best.0 < 1e-6 {
            let dir = self.normals[best.1].dot(&Vector4::new(0.0, 1.0, 0.0, 0.0));
            if dir < 0.0 {
                self.flip_orientation();
            }
        }
        Ok(())
    }

    pub fn flip_orientation(&mut self) {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
        for n in &mut self.normals {
            *n = -*n;
        }
    }

    /// Per-vertex unit normals tangent to S^3, area-weighted over faces.
    pub fn compute_normals(&mut self) {
        let n = self.vertices.len();
        let mut acc = vec![Vector4::zeros(); n];
        for t in &self.triangles {
            let a = self.vertices[t[0] as usize];
            let b = self.vertices[t[1] as usize];
            let c = self.vertices[t[2] as usize];
            let centroid = ((a + b + c) / 3.0).normalize();
            let fnorm = cross4(&centroid, &(b - a), &(c - a));
            for &vi in t {
                acc[vi as usize] += fnorm;
            }
        }
        self.normals = (0..n)
            .map(|i| {
                let mut v = acc[i];
                let p = self.vertices[i];
                v -= p * p.dot(&v);
                let nv = v.norm();
                if nv > 1e-300 {
                    v / nv
                } else {
                    Vector4::zeros()
                }
            })
            .collect();
    }

    pub fn max_edge_length(&self) -> f64 {
        let mut h: f64 = 0.0;
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                h = h.max((self.vertices[a as usize] - self.vertices[b as usize]).norm());
            }
        }
        h
    }

    pub fn mean_edge_length(&self) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                sum += (self.vertices[a as usize] - self.vertices[b as usize]).norm();
                count += 1;
            }
        }
        sum / count as f64
    }

    pub fn transform(&self, iso: &SphereIsometry) -> SurfaceMesh {
        let mut m = self.clone();
        for v in &mut m.vertices {
            *v = iso.matrix * *v;
        }
        if !m.normals.is_empty() {
            for n in &mut m.normals {
                *n = iso.matrix * *n;
            }
        }
        m
    }

    /// One-sided Hausdorff distance from a point cloud to this mesh.
    pub fn one_sided_hausdorff_from(&self, points: &[Vector4<f64>]) -> f64 {
        let locator = TriangleLocator::new(self);
        points
            .iter()
            .map(|p| locator.distance_to_mesh(p))
            .fold(0.0, f64::max)
    }

    /// Scan for intersecting non-adjacent triangle pairs. Returns offending
    /// pairs (expected empty for embedded surfaces) and the count of skipped
    /// degenerate (needle) triangles.
    pub fn embeddedness_check(&self) -> (Vec<(u32, u32)>, usize) {
        let mut hits = Vec::new();
        let mut skipped = 0usize;
        let nf = self.triangles.len();
        // broad phase grid on triangle AABBs
        let mut diam: f64 = 0.0;
        for t in &self.triangles {
            let a = self.vertices[t[0] as usize];
            let b = self.vertices[t[1] as usize];
            let c = self.vertices[t[2] as usize];
            diam = diam.max((a - b).norm()).max((b - c).norm()).max((a - c).norm());
        }
        let cell = (diam * 1.01).max(1e-9);
        let mut grid: HashMap<[i32; 4], Vec<u32>> = HashMap::new();
        let key_of = |v: &Vector4<f64>| -> [i32; 4] {
            [
                (v[0] / cell).floor() as i32,
                (v[1] / cell).floor() as i32,
                (v[2] / cell).floor() as i32,
                (v[3] / cell).floor() as i32,
            ]
        };
        for (ti, t) in self.triangles.iter().enumerate() {
            let mut lo = [i32::MAX; 4];
            let mut hi = [i32::MIN; 4];
            for &vi in t {
                let k = key_of(&self.vertices[vi as usize]);
                for d in 0..4 {
                    lo[d] = lo[d].min(k[d]);
                    hi[d] = hi[d].max(k[d]);
                }
            }
            let mut cells = vec![];
            for a in lo[0]..=hi[0] {
                for b in lo[1]..=hi[1] {
                    for c in lo[2]..=hi[2] {
                        for d in lo[3]..=hi[3] {
                            cells.push([a, b, c, d]);
                        }
                    }
                }
            }
            for k in cells {
                grid.entry(k).or_default().push(ti as u32);
            }
        }
        let mut tested = std::collections::HashSet::new();
        let share_vertex = |i: u32, j: u32| -> bool {
            let ti = self.triangles[i as usize];
            let tj = self.triangles[j as usize];
            ti.iter().any(|a| tj.contains(a))
        };
        for bucket in grid.values() {
            for (ii, &i) in bucket.iter().enumerate() {
                for &j in &bucket[ii + 1..] {
                    if i == j || share_vertex(i, j) {
                        continue;
                    }
                    let pair = (i.min(j), i.max(j));
                    if !tested.insert(pair) {
                        continue;
                    }
                    match self.triangles_intersect(i as usize, j as usize) {
                        Some(true) => hits.push(pair),
                        Some(false) => {}
                        None => skipped += 1,
                    }
                }
            }
        }
        let _ = nf;
        hits.sort_unstable();
        (hits, skipped)
    }

    /// Tangent-projection triangle intersection test; `None` marks a skipped
    /// needle triangle.
    fn triangles_intersect(&self, i: usize, j: usize) -> Option<bool> {
        let ti = self.triangles[i];
        let tj = self.triangles[j];
        let pa: Vec<Vector4<f64>> = ti.iter().map(|&v| self.vertices[v as usize]).collect();
        let pb: Vec<Vector4<f64>> = tj.iter().map(|&v| self.vertices[v as usize]).collect();
        let mut center = Vector4::zeros();
        for p in pa.iter().chain(pb.iter()) {
            center += p;
        }
        let n = center.norm();
        if n < 1e-9 {
            return Some(false);
        }
        let center = center / n;
        // tangent basis at center
        let mut basis: Vec<Vector4<f64>> = Vec::new();
        for cand in [
            Vector4::new(1.0, 0.0, 0.0, 0.0),
            Vector4::new(0.0, 1.0, 0.0, 0.0),
            Vector4::new(0.0, 0.0, 1.0, 0.0),
            Vector4::new(0.0, 0.0, 0.0, 1.0),
        ] {
            let mut v = cand - center * center.dot(&cand);
            for b in &basis {
                v -= b * b.dot(&v);
            }
            if v.norm() > 0.3 {
                basis.push(v.normalize());
                if basis.len() == 3 {
                    break;
                }
            }
        }
        if basis.len() < 3 {
            return Some(false);
        }
        let proj = |p: &Vector4<f64>| -> [f64; 3] {
            [basis[0].dot(p), basis[1].dot(p), basis[2].dot(p)]
        };
        let a3: Vec<[f64; 3]> = pa.iter().map(|p| proj(p)).collect();
        let b3: Vec<[f64; 3]> = pb.iter().map(|p| proj(p)).collect();
        if tri_degenerate(&a3) || tri_degenerate(&b3) {
            return None;
        }
        Some(tri_tri_intersect_3d(&a3, &b3))
    }
}

/// Generalized cross product in R^4: a vector orthogonal to a, b, c.
pub fn cross4(a: &Vector4<f64>, b: &Vector4<f64>, c: &Vector4<f64>) -> Vector4<f64> {
    let m = |i: usize, j: usize, k: usize| -> f64 {
        a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i])
            + a[k] * (b[i] * c[j] - b[j] * c[i])
    };
    Vector4::new(m(1, 2, 3), -m(0, 2, 3), m(0, 1, 3), -m(0, 1, 2))
}

fn tri_degenerate(t: &[[f64; 3]]) -> bool {
    let e0 = sub3(&t[1], &t[0]);
    let e1 = sub3(&t[2], &t[0]);
    let n = cross3(&e0, &e1);
    let area2 = norm3(&n);
    let scale =
        norm3(&e0).max(norm3(&e1)).max(norm3(&sub3(&t[2], &t[1])));
    area2 < 1e-12 * scale * scale
}

fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Segment-triangle intersection in 3D with a small interior tolerance, so
/// that contacts confined to shared boundary curves do not count.
fn segment_hits_triangle(p0: &[f64; 3], p1: &[f64; 3], tri: &[[f64; 3]]) -> bool {
    let e0 = sub3(&tri[1], &tri[0]);
    let e1 = sub3(&tri[2], &tri[0]);
    let n = cross3(&e0, &e1);
    let d = sub3(p1, p0);
    let denom = dot3(&n, &d);
    let w = sub3(&tri[0], p0);
    let num = dot3(&n, &w);
    if denom.abs() < 1e-14 {
        return false;
    }
    let t = num / denom;
    let eps = 1e-9;
    if !(eps..=1.0 - eps).contains(&t) {
        return false;
    }
    let hit = [p0[0] + t * d[0], p0[1] + t * d[1], p0[2] + t * d[2]];
    // barycentric
    let v = sub3(&hit, &tri[0]);
    let d00 = dot3(&e0, &e0);
    let d01 = dot3(&e0, &e1);
    let d11 = dot3(&e1, &e1);
    let dv0 = dot3(&v, &e0);
    let dv1 = dot3(&v, &e1);
    let det = d00 * d11 - d01 * d01;
    if det.abs() < 1e-20 {
        return false;
    }
    let s = (d11 * dv0 - d01 * dv1) / det;
    let u = (d00 * dv1 - d01 * dv0) / det;
    let margin = 1e-7;
    s > margin && u > margin && s + u < 1.0 - margin
}

fn tri_tri_intersect_3d(a: &[[f64; 3]], b: &[[f64; 3]]) -> bool {
    for i in 0..3 {
        let j = (i + 1) % 3;
        if segment_hits_triangle(&a[i], &a[j], b) || segment_hits_triangle(&b[i], &b[j], a) {
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Nearest-triangle queries.
// ---------------------------------------------------------------------------

/// Uniform grid over mesh triangles for nearest-distance queries.
pub struct TriangleLocator<'a> {
    mesh: &'a SurfaceMesh,
    cell: f64,
    grid: HashMap<[i32; 4], Vec<u32>>,
}

impl<'a> TriangleLocator<'a> {
    pub fn new(mesh: &'a SurfaceMesh) -> Self {
        // cell on the mean-edge scale keeps buckets small even when a few
        // coarse fan triangles are much larger than typical
        let cell = (mesh.mean_edge_length() * 1.2).max(1e-6);
        let mut grid: HashMap<[i32; 4], Vec<u32>> = HashMap::new();
        for (ti, t) in mesh.triangles.iter().enumerate() {
            let mut lo = [i32::MAX; 4];
            let mut hi = [i32::MIN; 4];
            for &vi in t {
                let v = mesh.vertices[vi as usize];
                for d in 0..4 {
                    let k = (v[d] / cell).floor() as i32;
                    lo[d] = lo[d].min(k);
                    hi[d] = hi[d].max(k);
                }
            }
            for a in lo[0]..=hi[0] {
                for b in lo[1]..=hi[1] {
                    for c in lo[2]..=hi[2] {
                        for d in lo[3]..=hi[3] {
                            grid.entry([a, b, c, d]).or_default().push(ti as u32);
                        }
                    }
                }
            }
        }
        Self { mesh, cell, grid }
    }

    pub fn distance_to_mesh(&self, p: &Vector4<f64>) -> f64 {
        let base = [
            (p[0] / self.cell).floor() as i32,
            (p[1] / self.cell).floor() as i32,
            (p[2] / self.cell).floor() as i32,
            (p[3] / self.cell).floor() as i32,
        ];
        let mut best = f64::INFINITY;
        for radius in 1..=16i32 {
            for a in -radius..=radius {
                for b in -radius..=radius {
                    for c in -radius..=radius {
                        for d in -radius..=radius {
                            if a.abs().max(b.abs()).max(c.abs()).max(d.abs()) != radius && radius > 1
                            {
                                continue;
                            }
                            if let Some(tris) =
                                self.grid.get(&[base[0] + a, base[1] + b, base[2] + c, base[3] + d])
                            {
                                for &ti in tris {
                                    best =
                                        best.min(self.point_triangle_distance(p, ti as usize));
                                }
                            }
                        }
                    }
                }
            }
            // every unscanned triangle overlaps only cells at Chebyshev
            // distance > radius, so its closest point is farther than this
            if best <= radius as f64 * self.cell {
                return best;
            }
        }
        if best.is_infinite() {
            for ti in 0..self.mesh.triangles.len() {
                best = best.min(self.point_triangle_distance(p, ti));
            }
        }
        best
    }

    fn point_triangle_distance(&self, p: &Vector4<f64>, ti: usize) -> f64 {
        let t = self.mesh.triangles[ti];
        let a = self.mesh.vertices[t[0] as usize];
        let b = self.mesh.vertices[t[1] as usize];
        let c = self.mesh.vertices[t[2] as usize];
        point_triangle_distance4(p, &a, &b, &c)
    }
}

/// Distance from a point to a (flat) triangle in R^4 via barycentric
/// projection with edge clamping.
pub fn point_triangle_distance4(
    p: &Vector4<f64>,
    a: &Vector4<f64>,
    b: &Vector4<f64>,
    c: &Vector4<f64>,
) -> f64 {
    let e0 = b - a;
    let e1 = c - a;
    let w = p - a;
    let d00 = e0.dot(&e0);
    let d01 = e0.dot(&e1);
    let d11 = e1.dot(&e1);
    let w0 = w.dot(&e0);
    let w1 = w.dot(&e1);
    let det = d00 * d11 - d01 * d01;
    let (mut s, mut t) = if det.abs() > 1e-300 {
        ((d11 * w0 - d01 * w1) / det, (d00 * w1 - d01 * w0) / det)
    } else {
        (0.0, 0.0)
    };
    if s >= 0.0 && t >= 0.0 && s + t <= 1.0 {
        let q = a + e0 * s + e1 * t;
        return (p - q).norm();
    }
    // clamp to the three edges
    let seg = |p0: &Vector4<f64>, p1: &Vector4<f64>| -> f64 {
        let d = p1 - p0;
        let l2 = d.dot(&d);
        let u = if l2 > 1e-300 { ((p - p0).dot(&d) / l2).clamp(0.0, 1.0) } else { 0.0 };
        let q = p0 + d * u;
        (p - q).norm()
    };
    s = s.clamp(0.0, 1.0);
    t = t.clamp(0.0, 1.0);
    let _ = (s, t);
    seg(a, b).min(seg(b, c)).min(seg(a, c))
}

/// Map mesh vertices to their images under an isometry and find the matching
/// vertex permutation, or `None` when some image is farther than `tol` from
/// every vertex.
pub fn vertex_permutation(
    mesh: &SurfaceMesh,
    iso: &SphereIsometry,
    tol: f64,
) -> Option<Vec<usize>> {
    let n = mesh.vertices.len();
    let cell = (4.0 * tol).max(1e-8).max(mesh.mean_edge_length() * 0.5);
    let mut grid: HashMap<[i32; 4], Vec<u32>> = HashMap::new();
    let key_of = |v: &Vector4<f64>| -> [i32; 4] {
        [
            (v[0] / cell).floor() as i32,
            (v[1] / cell).floor() as i32,
            (v[2] / cell).floor() as i32,
            (v[3] / cell).floor() as i32,
        ]
    };
    for (i, v) in mesh.vertices.iter().enumerate() {
        grid.entry(key_of(v)).or_default().push(i as u32);
    }
    let mut perm = vec![usize::MAX; n];
    for (i, v) in mesh.vertices.iter().enumerate() {
        let img = iso.matrix * v;
        let base = key_of(&img);
        let mut best = (f64::INFINITY, usize::MAX);
        for a in -1..=1 {
            for b in -1..=1 {
                for c in -1..=1 {
                    for d in -1..=1 {
                        if let Some(cands) =
                            grid.get(&[base[0] + a, base[1] + b, base[2] + c, base[3] + d])
                        {
                            for &j in cands {
                                let dist = (mesh.vertices[j as usize] - img).norm();
                                if dist < best.0 {
                                    best = (dist, j as usize);
                                }
                            }
                        }
                    }
                }
            }
        }
        if best.0 > tol {
            return None;
        }
        perm[i] = best.1;
    }
    Some(perm)
}

/// Structured mesh of the Clifford torus with the coordinate circles as axes,
/// `nu x nv` quads; exact genus 1.
pub fn clifford_torus_mesh(nu: usize, nv: usize) -> SurfaceMesh {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let u = 2.0 * std::f64::consts::PI * i as f64 / nu as f64;
            let v = 2.0 * std::f64::consts::PI * j as f64 / nv as f64;
            vertices.push(Vector4::new(r * u.cos(), r * u.sin(), r * v.cos(), r * v.sin()));
        }
    }
    let idx = |i: usize, j: usize| -> u32 { ((i % nu) * nv + (j % nv)) as u32 };
    let mut triangles = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    SurfaceMesh::new(vertices, triangles)
}

/// Spherical distance helper for tests and reports.
pub fn chord_to_arc(d: f64) -> f64 {
    2.0 * (d / 2.0).clamp(-1.0, 1.0).asin()
}

pub fn vertices_on_sphere_defect(mesh: &SurfaceMesh) -> f64 {
    mesh.vertices.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max)
}

impl SurfaceMesh {
    pub fn points(&self) -> Vec<PointS3> {
        self.vertices.iter().map(|v| PointS3::new(*v)).collect()
    }
}
