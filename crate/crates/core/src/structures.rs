//! Immersed structures: closed marker curves in 2D, triangulated surfaces
//! in 3D, and the elastic force models used by the benchmark scenarios.

use crate::coupling::MarkerSet;
use crate::{Error, Result};

/// A closed curve sampled at M markers, parametrized by s in [0, 2pi).
/// `weights` holds the quadrature weight ds = 2pi/M per marker.
#[derive(Clone, Debug)]
pub struct ClosedCurve {
    pub markers: MarkerSet,
}

impl ClosedCurve {
    pub fn new(positions: Vec<[f64; 3]>) -> Result<Self> {
        let m = positions.len();
        if m < 3 {
            return Err(Error::InvalidGeometry(format!(
                "closed curve needs at least 3 markers, got {m}"
            )));
        }
        let ds = 2.0 * std::f64::consts::PI / m as f64;
        Ok(Self {
            markers: MarkerSet {
                positions,
                weights: vec![ds; m],
            },
        })
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }
}

/// A closed triangulated surface with per-vertex markers. Triangles are
/// index triples with outward (counterclockwise seen from outside)
/// orientation. Vertex weights are 1: force models on meshes return
/// force-times-weight directly.
#[derive(Clone, Debug)]
pub struct TriMesh {
    pub markers: MarkerSet,
    pub triangles: Vec<[usize; 3]>,
    pub level: usize,
}

/// Circle of radius `r` about `center`, M markers, in the z = center_z plane.
pub fn make_circle(center: [f64; 3], r: f64, m: usize) -> Result<ClosedCurve> {
    make_ellipse(center, r, r, m)
}

/// Axis-aligned ellipse with semi-axes `a`, `b` about `center`.
pub fn make_ellipse(center: [f64; 3], a: f64, b: f64, m: usize) -> Result<ClosedCurve> {
    let positions = (0..m)
        .map(|k| {
            let s = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            [center[0] + a * s.cos(), center[1] + b * s.sin(), center[2]]
        })
        .collect();
    ClosedCurve::new(positions)
}

/// Perturbed circle `r(s) = r (1 + eps cos(p s))` used by the membrane
/// benchmark.
pub fn make_perturbed_circle(
    center: [f64; 3],
    r: f64,
    eps: f64,
    p: usize,
    m: usize,
) -> Result<ClosedCurve> {
    let positions = (0..m)
        .map(|k| {
            let s = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            let rs = r * (1.0 + eps * (p as f64 * s).cos());
            [center[0] + rs * s.cos(), center[1] + rs * s.sin(), center[2]]
        })
        .collect();
    ClosedCurve::new(positions)
}

/// Icosahedral sphere of radius `r` about `center` after `level` rounds of
/// midpoint subdivision: 10 * 4^level + 2 vertices, 20 * 4^level faces.
pub fn make_icosphere(center: [f64; 3], r: f64, level: usize) -> TriMesh {
    // Unit icosahedron from three orthogonal golden rectangles.
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let raw: [[f64; 3]; 12] = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut verts: Vec<[f64; 3]> = raw
        .iter()
        .map(|v| {
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / norm, v[1] / norm, v[2] / norm]
        })
        .collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    use std::collections::HashMap;
    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let (va, vb) = (verts[a], verts[b]);
                let m = [
                    (va[0] + vb[0]) / 2.0,
                    (va[1] + vb[1]) / 2.0,
                    (va[2] + vb[2]) / 2.0,
                ];
                let norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
                verts.push([m[0] / norm, m[1] / norm, m[2] / norm]);
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(tris.len() * 4);
        for &[a, b, c] in &tris {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        tris = next;
    }
    debug_assert_eq!(verts.len(), 10 * 4usize.pow(level as u32) + 2);
    debug_assert_eq!(tris.len(), 20 * 4usize.pow(level as u32));

    let positions = verts
        .into_iter()
        .map(|v| {
            [
                center[0] + r * v[0],
                center[1] + r * v[1],
                center[2] + r * v[2],
            ]
        })
        .collect();
    TriMesh {
        markers: MarkerSet {
            positions,
            weights: vec![1.0; 10 * 4usize.pow(level as u32) + 2],
        },
        triangles: tris,
        level,
    }
}

/// Sample a closed parametric shape at `m` uniform parameters in [0, 2pi).
pub fn sample_closed(shape: impl Fn(f64) -> [f64; 3], m: usize) -> Vec<[f64; 3]> {
    (0..m)
        .map(|k| shape(2.0 * std::f64::consts::PI * k as f64 / m as f64))
        .collect()
}

/// Passive tracers on the same analytic initial shape as a curve of `m`
/// markers, at `multiplier` times the density. Tracers carry no force.
pub fn make_tracers(shape: impl Fn(f64) -> [f64; 3], m: usize, multiplier: usize) -> Vec<[f64; 3]> {
    sample_closed(shape, m * multiplier)
}

/// Uniform surface tension on a closed curve: minus the gradient of the
/// polygonal arc-length energy, `F_m ds = gamma (t_{m+1/2} - t_{m-1/2})`
/// with unit tangents t. Returns the product `F ds` per marker.
pub fn surface_tension_force_2d(
    curve: &ClosedCurve,
    gamma: f64,
    scale: f64,
) -> Result<Vec<[f64; 3]>> {
    let m = curve.len();
    let x = &curve.markers.positions;
    let tangent = |k: usize| -> Result<[f64; 3]> {
        let (a, b) = (x[k], x[(k + 1) % m]);
        let d = sub(b, a);
        let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if norm <= 1e-14 * scale {
            return Err(Error::DegenerateSegment(k));
        }
        Ok([d[0] / norm, d[1] / norm, d[2] / norm])
    };
    (0..m)
        .map(|k| {
            let ahead = tangent(k)?;
            let behind = tangent((k + m - 1) % m)?;
            Ok([
                gamma * (ahead[0] - behind[0]),
                gamma * (ahead[1] - behind[1]),
                gamma * (ahead[2] - behind[2]),
            ])
        })
        .collect()
}

/// Zero-rest-length linear springs: force density
/// `F_m = kappa (X_{m+1} - 2 X_m + X_{m-1}) / ds^2`.
pub fn spring_force(curve: &ClosedCurve, kappa: f64) -> Vec<[f64; 3]> {
    let m = curve.len();
    let ds = 2.0 * std::f64::consts::PI / m as f64;
    let x = &curve.markers.positions;
    (0..m)
        .map(|k| {
            let (prev, next) = (x[(k + m - 1) % m], x[(k + 1) % m]);
            let cur = x[k];
            [
                kappa * (next[0] - 2.0 * cur[0] + prev[0]) / (ds * ds),
                kappa * (next[1] - 2.0 * cur[1] + prev[1]) / (ds * ds),
                0.0,
            ]
        })
        .collect()
}

/// Parametric stiffness `kappa(t) = k_c (1 + 2 tau sin(omega0 t))`.
pub fn parametric_stiffness(k_c: f64, tau: f64, omega0: f64, t: f64) -> f64 {
    k_c * (1.0 + 2.0 * tau * (omega0 * t).sin())
}

/// Uniform surface tension on a closed triangulated surface: minus the
/// gradient of the total triangle area. For each triangle (X, X', X'')
/// the contribution to the vertex holding X is `-gamma/2 (X' - X'') x
/// n_hat`, accumulated cyclically; the output is force times weight per
/// vertex (vertex weights are 1).
pub fn surface_tension_force_3d(mesh: &TriMesh, gamma: f64) -> Result<Vec<[f64; 3]>> {
    let x = &mesh.markers.positions;
    let mut f = vec![[0.0; 3]; x.len()];
    for (face, &[a, b, c]) in mesh.triangles.iter().enumerate() {
        let (xa, xb, xc) = (x[a], x[b], x[c]);
        let e1 = sub(xb, xa);
        let e2 = sub(xc, xa);
        let n = cross(e1, e2);
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateFace(face));
        }
        let nhat = [n[0] / norm, n[1] / norm, n[2] / norm];
        // Vertex v sees the opposite edge (next - prev).
        for (v, p, q) in [(a, b, c), (b, c, a), (c, a, b)] {
            let edge = sub(x[p], x[q]);
            let contrib = cross(edge, nhat);
            for axis in 0..3 {
                f[v][axis] -= gamma / 2.0 * contrib[axis];
            }
        }
    }
    Ok(f)
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
