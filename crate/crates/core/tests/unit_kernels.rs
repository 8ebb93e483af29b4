use dfib::kernels::{delta_h, grad_delta_h, Kernel, KERNEL_NAMES};
use std::sync::Arc;

fn builtin_kernels() -> Vec<Kernel> {
    ["std4", "bspline4", "bspline6"]
        .iter()
        .map(|n| Kernel::by_name(n).unwrap())
        .collect()
}

#[test]
fn names_and_lookup() {
    assert_eq!(KERNEL_NAMES, &["std4", "bspline4", "bspline6", "c3five", "c3six"]);
    assert!(Kernel::by_name("std4").is_some());
    assert!(Kernel::by_name("nope").is_none());
    // custom registry slots are not built in
    assert!(Kernel::by_name("c3five").is_none());
    assert!(Kernel::by_name("c3six").is_none());
}

#[test]
fn partition_of_unity() {
    for kernel in builtin_kernels() {
        let w = kernel.half_width() as i64;
        for step in 0..200 {
            let r = -0.5 + step as f64 / 200.0;
            let sum: f64 = (-w - 1..=w + 1).map(|j| kernel.phi(r - j as f64)).sum();
            assert!(
                (sum - 1.0).abs() < 1e-13,
                "{}: sum {} at r={r}",
                kernel.name(),
                sum
            );
        }
    }
}

#[test]
fn first_moment_vanishes() {
    for kernel in builtin_kernels() {
        let w = kernel.half_width() as i64;
        for step in 0..100 {
            let r = -0.5 + step as f64 / 100.0;
            let m1: f64 = (-w - 1..=w + 1)
                .map(|j| (r - j as f64) * kernel.phi(r - j as f64))
                .sum();
            assert!(m1.abs() < 1e-12, "{}: m1 {} at r={r}", kernel.name(), m1);
        }
    }
}

#[test]
fn compact_support_and_symmetry() {
    for kernel in builtin_kernels() {
        let w = kernel.half_width() as f64;
        assert_eq!(kernel.phi(w), 0.0);
        assert_eq!(kernel.phi(-w), 0.0);
        assert_eq!(kernel.phi(w + 0.3), 0.0);
        assert_eq!(kernel.dphi(w + 0.3), 0.0);
        for step in 1..50 {
            let r = step as f64 * w / 50.0;
            assert!((kernel.phi(r) - kernel.phi(-r)).abs() < 1e-15);
            assert!((kernel.dphi(r) + kernel.dphi(-r)).abs() < 1e-15);
        }
    }
}

#[test]
fn derivative_matches_finite_differences() {
    for kernel in builtin_kernels() {
        let w = kernel.half_width() as f64;
        let eps = 1e-6;
        for step in 0..400 {
            let r = -w + 0.011 + step as f64 * (2.0 * w - 0.022) / 400.0;
            // skip the knots where std4 has unbounded higher derivatives
            if (r.abs().fract() < 2e-2) || (r.abs().fract() > 1.0 - 2e-2) {
                continue;
            }
            let fd = (kernel.phi(r + eps) - kernel.phi(r - eps)) / (2.0 * eps);
            assert!(
                (kernel.dphi(r) - fd).abs() < 1e-7,
                "{} at r={r}: {} vs {}",
                kernel.name(),
                kernel.dphi(r),
                fd
            );
        }
    }
}

#[test]
fn continuity_matches_smoothness_class() {
    // phi and its derivatives up to the smoothness order are continuous at
    // the knots; probe one-sided limits numerically.
    for kernel in builtin_kernels() {
        let w = kernel.half_width() as i64;
        let eps = 1e-9;
        for knot in (-w..=w).map(|k| k as f64) {
            let jump_phi = (kernel.phi(knot + eps) - kernel.phi(knot - eps)).abs();
            assert!(jump_phi < 1e-7, "{} phi jump at {knot}", kernel.name());
            if kernel.smoothness() >= 1 {
                let jump = (kernel.dphi(knot + eps) - kernel.dphi(knot - eps)).abs();
                assert!(jump < 1e-6, "{} dphi jump at {knot}", kernel.name());
            }
        }
    }
}

#[test]
fn known_center_values() {
    assert!((Kernel::BSpline4.phi(0.0) - 2.0 / 3.0).abs() < 1e-15);
    assert!((Kernel::BSpline6.phi(0.0) - 11.0 / 20.0).abs() < 1e-15);
    assert!((Kernel::StdFourPoint.phi(0.0) - 0.5).abs() < 1e-15);
    assert!((Kernel::StdFourPoint.phi(1.0) - 0.25).abs() < 1e-15);
}

#[test]
fn tensor_delta_normalization() {
    let kernel = Kernel::BSpline6;
    let h = 0.1;
    // sum over the lattice of delta_h times h^dim is 1 (2D)
    let mut sum = 0.0;
    let x = [0.033, -0.041];
    for i in -5..5 {
        for j in -5..5 {
            let offset = [x[0] - i as f64 * h, x[1] - j as f64 * h];
            sum += delta_h(&kernel, &offset, h) * h * h;
        }
    }
    assert!((sum - 1.0).abs() < 1e-13);
}

#[test]
fn grad_delta_matches_finite_differences() {
    let kernel = Kernel::BSpline6;
    let h = 0.25;
    let offset = [0.07, -0.12, 0.18];
    let g = grad_delta_h(&kernel, &offset, h);
    let eps = 1e-6;
    for axis in 0..3 {
        let mut p = offset;
        let mut m = offset;
        p[axis] += eps;
        m[axis] -= eps;
        let fd = (delta_h(&kernel, &p, h) - delta_h(&kernel, &m, h)) / (2.0 * eps);
        assert!((g[axis] - fd).abs() < 1e-4 * fd.abs().max(1.0));
    }
}

#[test]
fn custom_kernel_slot() {
    // register a hat function in a custom slot and use it like a builtin
    let hat = Kernel::custom(
        "c3five",
        1,
        0,
        Arc::new(|r: f64| (1.0 - r.abs()).max(0.0)),
        Arc::new(|r: f64| {
            if r.abs() >= 1.0 {
                0.0
            } else if r < 0.0 {
                1.0
            } else {
                -1.0
            }
        }),
    );
    assert_eq!(hat.name(), "c3five");
    assert_eq!(hat.half_width(), 1);
    assert_eq!(hat.phi(0.0), 1.0);
    assert_eq!(hat.phi(0.5), 0.5);
    assert_eq!(hat.dphi(0.5), -1.0);
}
