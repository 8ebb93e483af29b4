use std::collections::HashSet;

use dfib::structures::{
    make_circle, make_ellipse, make_icosphere, make_perturbed_circle, make_tracers,
    parametric_stiffness, sample_closed, spring_force, surface_tension_force_2d,
    surface_tension_force_3d, ClosedCurve,
};

const PI: f64 = std::f64::consts::PI;

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Polygonal arc-length energy of a closed marker loop.
fn arc_length_energy(x: &[[f64; 3]], gamma: f64) -> f64 {
    let m = x.len();
    gamma
        * (0..m)
            .map(|k| {
                let (a, b) = (x[k], x[(k + 1) % m]);
                norm([b[0] - a[0], b[1] - a[1], b[2] - a[2]])
            })
            .sum::<f64>()
}

/// Total triangle area of a mesh configuration.
fn surface_energy(x: &[[f64; 3]], tris: &[[usize; 3]], gamma: f64) -> f64 {
    let mut area = 0.0;
    for &[a, b, c] in tris {
        let e1 = [
            x[b][0] - x[a][0],
            x[b][1] - x[a][1],
            x[b][2] - x[a][2],
        ];
        let e2 = [
            x[c][0] - x[a][0],
            x[c][1] - x[a][1],
            x[c][2] - x[a][2],
        ];
        let cr = [
            e1[1] * e2[2] - e1[2] * e2[1],
            e1[2] * e2[0] - e1[0] * e2[2],
            e1[0] * e2[1] - e1[1] * e2[0],
        ];
        area += 0.5 * norm(cr);
    }
    gamma * area
}

#[test]
fn regular_polygon_tension_magnitude() {
    let (gamma, r, m) = (1.7, 0.25, 48);
    let curve = make_circle([0.5, 0.5, 0.0], r, m).unwrap();
    let f = surface_tension_force_2d(&curve, gamma, r).unwrap();
    let expected = 2.0 * gamma * (PI / m as f64).sin();
    for (k, fk) in f.iter().enumerate() {
        assert!((norm(*fk) - expected).abs() < 1e-13);
        // points radially inward
        let s = 2.0 * PI * k as f64 / m as f64;
        let radial = fk[0] * s.cos() + fk[1] * s.sin();
        assert!((radial + expected).abs() < 1e-12);
    }
}

#[test]
fn tension_2d_matches_energy_gradient() {
    let (gamma, m) = (0.9, 37);
    let curve = make_ellipse([0.5, 0.4, 0.0], 0.3, 0.17, m).unwrap();
    let f = surface_tension_force_2d(&curve, gamma, 0.3).unwrap();
    let step = 1e-6 * 0.3;
    let scale = f.iter().map(|v| norm(*v)).fold(0.0f64, f64::max);
    for k in [0usize, 5, 18, m - 1] {
        for axis in 0..2 {
            let mut xp = curve.markers.positions.clone();
            xp[k][axis] += step;
            let mut xm = curve.markers.positions.clone();
            xm[k][axis] -= step;
            let grad = (arc_length_energy(&xp, gamma) - arc_length_energy(&xm, gamma))
                / (2.0 * step);
            assert!(
                (f[k][axis] + grad).abs() < 1e-6 * scale,
                "marker {k} axis {axis}: {} vs {}",
                f[k][axis],
                -grad
            );
        }
    }
}

#[test]
fn tension_3d_matches_energy_gradient() {
    let gamma = 1.3;
    let mesh = make_icosphere([0.5, 0.5, 0.5], 0.2, 1);
    let f = surface_tension_force_3d(&mesh, gamma).unwrap();
    let step = 1e-6 * 0.2;
    let scale = f.iter().map(|v| norm(*v)).fold(0.0f64, f64::max);
    for k in [0usize, 7, 23] {
        for axis in 0..3 {
            let mut xp = mesh.markers.positions.clone();
            xp[k][axis] += step;
            let mut xm = mesh.markers.positions.clone();
            xm[k][axis] -= step;
            let grad = (surface_energy(&xp, &mesh.triangles, gamma)
                - surface_energy(&xm, &mesh.triangles, gamma))
                / (2.0 * step);
            assert!(
                (f[k][axis] + grad).abs() < 1e-6 * scale,
                "vertex {k} axis {axis}: {} vs {}",
                f[k][axis],
                -grad
            );
        }
    }
}

#[test]
fn forces_sum_to_zero() {
    let curve = make_ellipse([0.5, 0.5, 0.0], 0.3, 0.2, 41).unwrap();
    let mut total = [0.0; 3];
    for f in surface_tension_force_2d(&curve, 2.0, 0.3).unwrap() {
        for a in 0..3 {
            total[a] += f[a];
        }
    }
    assert!(norm(total) < 1e-13);

    total = [0.0; 3];
    for f in spring_force(&curve, 5.0) {
        for a in 0..3 {
            total[a] += f[a];
        }
    }
    assert!(norm(total) < 1e-10);

    let mesh = make_icosphere([0.5, 0.5, 0.5], 0.15, 2);
    total = [0.0; 3];
    for f in surface_tension_force_3d(&mesh, 1.0).unwrap() {
        for a in 0..3 {
            total[a] += f[a];
        }
    }
    assert!(norm(total) < 1e-12);
}

#[test]
fn degenerate_segment_is_rejected() {
    let mut pts = sample_closed(
        |s| [0.5 + 0.2 * s.cos(), 0.5 + 0.2 * s.sin(), 0.0],
        12,
    );
    pts[3] = pts[4];
    let curve = ClosedCurve::new(pts).unwrap();
    assert!(surface_tension_force_2d(&curve, 1.0, 0.2).is_err());
}

#[test]
fn spring_force_on_circle() {
    let (kappa, r, m) = (3.0, 0.25, 64);
    let curve = make_circle([0.5, 0.5, 0.0], r, m).unwrap();
    let ds = 2.0 * PI / m as f64;
    let f = spring_force(&curve, kappa);
    // |X+ - 2X + X-| = 2R(1 - cos ds); the force is the second difference
    // divided by ds^2, scaled by kappa.
    let expected = kappa * 2.0 * r * (1.0 - ds.cos()) / (ds * ds);
    for fk in &f {
        assert!((norm(*fk) - expected).abs() < 1e-10 * expected);
    }
    // linear in kappa
    let f2 = spring_force(&curve, 2.0 * kappa);
    for (a, b) in f.iter().zip(&f2) {
        for axis in 0..3 {
            assert!((2.0 * a[axis] - b[axis]).abs() < 1e-12 * expected);
        }
    }
}

#[test]
fn parametric_stiffness_modulation() {
    let k_c = 10.0;
    assert!((parametric_stiffness(k_c, 0.4, 10.0, 0.0) - k_c).abs() < 1e-14);
    let peak = parametric_stiffness(k_c, 0.4, 10.0, PI / 20.0);
    assert!((peak - 18.0).abs() < 1e-12);
    let trough = parametric_stiffness(k_c, 0.5, 10.0, 3.0 * PI / 20.0);
    assert!(trough.abs() < 1e-12);
}

#[test]
fn icosphere_counts_and_geometry() {
    let center = [0.5, 0.5, 0.5];
    let r = 0.1;
    for level in 0..4usize {
        let mesh = make_icosphere(center, r, level);
        let nv = 10 * 4usize.pow(level as u32) + 2;
        let nf = 20 * 4usize.pow(level as u32);
        assert_eq!(mesh.markers.len(), nv);
        assert_eq!(mesh.triangles.len(), nf);
        assert_eq!(mesh.level, level);
        // all vertices exactly on the sphere
        for x in &mesh.markers.positions {
            let d = norm([x[0] - center[0], x[1] - center[1], x[2] - center[2]]);
            assert!((d - r).abs() < 1e-14);
        }
        // closed orientable surface: V - E + F = 2
        let mut edges = HashSet::new();
        for &[a, b, c] in &mesh.triangles {
            for (u, v) in [(a, b), (b, c), (c, a)] {
                edges.insert((u.min(v), u.max(v)));
            }
        }
        assert_eq!(nv + nf, edges.len() + 2);
        // reasonably uniform edge lengths
        let lengths: Vec<f64> = edges
            .iter()
            .map(|&(a, b)| {
                let (xa, xb) = (mesh.markers.positions[a], mesh.markers.positions[b]);
                norm([xb[0] - xa[0], xb[1] - xa[1], xb[2] - xa[2]])
            })
            .collect();
        let emin = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        let emax = lengths.iter().cloned().fold(0.0f64, f64::max);
        assert!(emax / emin < 1.5, "edge ratio {} at level {level}", emax / emin);
    }
}

#[test]
fn perturbed_circle_radius_profile() {
    let (r, eps, p, m) = (1.0, 0.05, 2usize, 100usize);
    let center = [2.5, 2.5, 0.0];
    let curve = make_perturbed_circle(center, r, eps, p, m).unwrap();
    for (k, x) in curve.markers.positions.iter().enumerate() {
        let s = 2.0 * PI * k as f64 / m as f64;
        let expected = r * (1.0 + eps * (p as f64 * s).cos());
        let d = norm([x[0] - center[0], x[1] - center[1], 0.0]);
        assert!((d - expected).abs() < 1e-13);
    }
    // uniform parametric weights
    for &w in &curve.markers.weights {
        assert!((w - 2.0 * PI / m as f64).abs() < 1e-15);
    }
}

#[test]
fn tracer_sampling_counts() {
    let shape = |s: f64| [0.5 + 0.25 * s.cos(), 0.5 + 0.25 * s.sin(), 0.0];
    assert_eq!(sample_closed(shape, 17).len(), 17);
    let tracers = make_tracers(shape, 17, 20);
    assert_eq!(tracers.len(), 340);
    // tracers lie on the same analytic shape
    for x in &tracers {
        let d = norm([x[0] - 0.5, x[1] - 0.5, 0.0]);
        assert!((d - 0.25).abs() < 1e-14);
    }
    assert!(ClosedCurve::new(sample_closed(shape, 2)).is_err());
}
