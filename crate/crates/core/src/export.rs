//! Mesh and report serialization: ASCII OBJ through a stereographic
//! projection (raw 4d coordinates preserved in comments), binary
//! little-endian PLY with four float position properties and optional
//! per-vertex scalars, and deterministic JSON reports.

use std::io::Write;

use nalgebra::Vector4;

use crate::mesh::SurfaceMesh;

/// Pole selection for the stereographic projection: a point of S^3 far from
/// every mesh vertex, chosen from a deterministic candidate grid.
pub fn pick_projection_pole(mesh: &SurfaceMesh) -> Vector4<f64> {
    let mut best = (f64::NEG_INFINITY, Vector4::new(0.0, 0.0, 0.0, -1.0));
    let n = 6;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let u = std::f64::consts::PI * (a as f64 + 0.5) / n as f64;
                let v = std::f64::consts::PI * (b as f64 + 0.5) / n as f64;
                let w = 2.0 * std::f64::consts::PI * (c as f64 + 0.5) / n as f64;
                let cand = Vector4::new(
                    u.sin() * v.sin() * w.cos(),
                    u.sin() * v.sin() * w.sin(),
                    u.sin() * v.cos(),
                    u.cos(),
                );
                let mut min_d = f64::INFINITY;
                for vert in mesh.vertices.iter().step_by(7) {
                    min_d = min_d.min((vert - cand).norm());
                }
                if min_d > best.0 {
                    best = (min_d, cand);
                }
            }
        }
    }
    best.1
}

/// Stereographic projection of S^3 from `pole` into R^3 (the tangent
/// hyperplane through the antipode).
pub fn stereographic(p: &Vector4<f64>, pole: &Vector4<f64>) -> [f64; 3] {
    // orthonormal frame of the pole's complement
    let mut basis: Vec<Vector4<f64>> = Vec::new();
    for cand in [
        Vector4::new(1.0, 0.0, 0.0, 0.0),
        Vector4::new(0.0, 1.0, 0.0, 0.0),
        Vector4::new(0.0, 0.0, 1.0, 0.0),
        Vector4::new(0.0, 0.0, 0.0, 1.0),
    ] {
        let mut v = cand - pole * pole.dot(&cand);
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
    let denom = 1.0 - pole.dot(p);
    let scale = if denom.abs() < 1e-12 { 1e12 } else { 1.0 / denom };
    [basis[0].dot(p) * scale, basis[1].dot(p) * scale, basis[2].dot(p) * scale]
}

/// ASCII OBJ with the stereographic image as vertex positions and the exact
/// R^4 coordinates in `# v4` comment lines.
pub fn write_obj(
    mesh: &SurfaceMesh,
    pole: Option<Vector4<f64>>,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    let pole = pole.unwrap_or_else(|| pick_projection_pole(mesh));
    writeln!(out, "# surface mesh on the unit 3-sphere")?;
    writeln!(
        out,
        "# stereographic projection pole: {:.17} {:.17} {:.17} {:.17}",
        pole[0], pole[1], pole[2], pole[3]
    )?;
    for v in &mesh.vertices {
        writeln!(out, "# v4 {:.17} {:.17} {:.17} {:.17}", v[0], v[1], v[2], v[3])?;
        let q = stereographic(v, &pole);
        writeln!(out, "v {:.17} {:.17} {:.17}", q[0], q[1], q[2])?;
    }
    for t in &mesh.triangles {
        writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

/// Binary little-endian PLY with four float32 position properties and any
/// number of named per-vertex scalar properties.
pub fn write_ply(
    mesh: &SurfaceMesh,
    scalars: &[(&str, &[f64])],
    out: &mut dyn Write,
) -> std::io::Result<()> {
    let n = mesh.vertex_count();
    for (_, vals) in scalars {
        assert_eq!(vals.len(), n, "scalar property length mismatch");
    }
    writeln!(out, "ply")?;
    writeln!(out, "format binary_little_endian 1.0")?;
    writeln!(out, "element vertex {n}")?;
    for name in ["x", "y", "z", "w"] {
        writeln!(out, "property float {name}")?;
    }
    for (name, _) in scalars {
        writeln!(out, "property float {name}")?;
    }
    writeln!(out, "element face {}", mesh.face_count())?;
    writeln!(out, "property list uchar uint vertex_indices")?;
    writeln!(out, "end_header")?;
    for (i, v) in mesh.vertices.iter().enumerate() {
        for d in 0..4 {
            out.write_all(&(v[d] as f32).to_le_bytes())?;
        }
        for (_, vals) in scalars {
            out.write_all(&(vals[i] as f32).to_le_bytes())?;
        }
    }
    for t in &mesh.triangles {
        out.write_all(&[3u8])?;
        for &vi in t {
            out.write_all(&vi.to_le_bytes())?;
        }
    }
    Ok(())
}
