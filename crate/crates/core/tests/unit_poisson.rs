mod common;

use common::{random_field, rng};
use dfib::grid::{laplacian_h, GridGeometry, StaggeredField, Subgrid};
use dfib::poisson::{solve_scalar_poisson, solve_vector_poisson, SpectralPlan, Tally};
use dfib::Error;

const PI: f64 = std::f64::consts::PI;

fn remove_mean(f: &mut StaggeredField) {
    for comp in 0..f.ncomp() {
        let mean = f.comp(comp).iter().sum::<f64>() / f.comp(comp).len() as f64;
        f.add_constant(comp, -mean);
    }
}

#[test]
fn discrete_eigenfunctions_solve_exactly() {
    for (dim, n, l) in [(2usize, 16usize, 1.0f64), (3, 8, 2.0)] {
        let geom = GridGeometry::new(dim, n, l).unwrap();
        let plan = SpectralPlan::new(geom);
        let tally = Tally::new();
        let h = geom.h();
        let k = [2usize, 1, 3];
        let rhs = StaggeredField::from_fn(geom, Subgrid::Cell, |_, x| {
            (0..dim)
                .map(|a| (2.0 * PI * k[a] as f64 * x[a] / l).cos())
                .product()
        });
        let u = solve_scalar_poisson(&rhs, &plan, &tally).unwrap();
        let lambda: f64 = (0..dim)
            .map(|a| -4.0 / (h * h) * (PI * k[a] as f64 / n as f64).sin().powi(2))
            .sum();
        let mut expected = rhs.clone();
        expected.scale(1.0 / lambda);
        let mut diff = u.clone();
        diff.axpy(-1.0, &expected);
        assert!(diff.linf() < 1e-13 * expected.linf());
    }
}

#[test]
fn residual_of_random_solve() {
    let mut r = rng(11);
    for (dim, n) in [(2usize, 12usize), (3, 6)] {
        let geom = GridGeometry::new(dim, n, 1.1).unwrap();
        let plan = SpectralPlan::new(geom);
        let tally = Tally::new();
        for subgrid in [Subgrid::Cell, Subgrid::Node] {
            let mut rhs = random_field(geom, subgrid, &mut r);
            remove_mean(&mut rhs);
            let u = solve_scalar_poisson(&rhs, &plan, &tally).unwrap();
            let mut res = laplacian_h(&u);
            res.axpy(-1.0, &rhs);
            assert!(res.linf() < 1e-10 * rhs.linf() / geom.h().powi(2));
            // solution has zero mean
            let mean: f64 = u.comp(0).iter().sum::<f64>() / u.comp(0).len() as f64;
            assert!(mean.abs() < 1e-12 * u.linf().max(1e-300));
        }
    }
}

#[test]
fn vector_solve_negates_laplacian() {
    let mut r = rng(12);
    for (dim, n, subgrid) in [
        (2usize, 12usize, Subgrid::Face),
        (3, 6, Subgrid::Face),
        (3, 6, Subgrid::Edge),
    ] {
        let geom = GridGeometry::new(dim, n, 1.0).unwrap();
        let plan = SpectralPlan::new(geom);
        let tally = Tally::new();
        let mut rhs = random_field(geom, subgrid, &mut r);
        remove_mean(&mut rhs);
        let u = solve_vector_poisson(&rhs, &plan, &tally).unwrap();
        let mut res = laplacian_h(&u);
        res.scale(-1.0);
        res.axpy(-1.0, &rhs);
        assert!(res.linf() < 1e-10 * rhs.linf() / geom.h().powi(2));
        assert_eq!(tally.poisson() % dim, 0);
    }
}

#[test]
fn nonzero_mean_rhs_is_rejected() {
    let geom = GridGeometry::new(2, 8, 1.0).unwrap();
    let plan = SpectralPlan::new(geom);
    let tally = Tally::new();
    let mut rhs = StaggeredField::zeros(geom, Subgrid::Cell);
    rhs.add_constant(0, 1.0);
    match solve_scalar_poisson(&rhs, &plan, &tally) {
        Err(Error::NonZeroMeanRhs { .. }) => {}
        other => panic!("expected NonZeroMeanRhs, got {other:?}"),
    }
}

#[test]
fn scalar_vector_subgrid_contracts() {
    let geom = GridGeometry::new(2, 8, 1.0).unwrap();
    let plan = SpectralPlan::new(geom);
    let tally = Tally::new();
    let face = StaggeredField::zeros(geom, Subgrid::Face);
    let cell = StaggeredField::zeros(geom, Subgrid::Cell);
    assert!(solve_scalar_poisson(&face, &plan, &tally).is_err());
    assert!(solve_vector_poisson(&cell, &plan, &tally).is_err());
}

#[test]
fn tally_counts_component_solves() {
    let mut r = rng(13);
    let geom = GridGeometry::new(3, 6, 1.0).unwrap();
    let plan = SpectralPlan::new(geom);
    let tally = Tally::new();
    let mut rhs = random_field(geom, Subgrid::Face, &mut r);
    remove_mean(&mut rhs);
    solve_vector_poisson(&rhs, &plan, &tally).unwrap();
    assert_eq!(tally.poisson(), 3);
    let mut srhs = random_field(geom, Subgrid::Cell, &mut r);
    remove_mean(&mut srhs);
    solve_scalar_poisson(&srhs, &plan, &tally).unwrap();
    assert_eq!(tally.poisson(), 4);
    tally.reset();
    assert_eq!(tally.poisson(), 0);
}

#[test]
fn fft_work_scales_like_n_log_n() {
    // The number of 1D line transforms per solve is dim * n^(dim-1) * 2
    // (forward + inverse), each of length n: total work Theta(n^dim log n).
    let tally = Tally::new();
    for n in [8usize, 16] {
        let geom = GridGeometry::new(2, n, 1.0).unwrap();
        let plan = SpectralPlan::new(geom);
        let rhs = StaggeredField::from_fn(geom, Subgrid::Cell, |_, x| {
            (2.0 * PI * x[0]).sin()
        });
        plan.fft_lines.store(0, std::sync::atomic::Ordering::Relaxed);
        solve_scalar_poisson(&rhs, &plan, &tally).unwrap();
        let lines = plan.fft_lines.load(std::sync::atomic::Ordering::Relaxed);
        assert_eq!(lines, 2 * 2 * n);
    }
}
