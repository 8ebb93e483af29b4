//! Periodic incompressible Navier-Stokes step: skew-symmetric advection
//! and the coupled Crank-Nicolson velocity-pressure solve in transform
//! space. On a fully periodic grid the coupled solve is exact to roundoff,
//! so there is no splitting error to manage.

use num_complex::Complex64;

use crate::grid::{self, GridGeometry, StaggeredField, Subgrid};
use crate::poisson::{SpectralPlan, Tally};
use crate::{Error, Result};

/// Fluid state advanced by the time stepper.
#[derive(Clone, Debug)]
pub struct FluidState {
    pub u: StaggeredField,
    /// Advection term at the previous step, for AB2 extrapolation.
    pub n_prev: Option<StaggeredField>,
    pub t: f64,
    pub step_index: usize,
    pub rho: f64,
    pub mu: f64,
}

impl FluidState {
    pub fn new(u: StaggeredField, rho: f64, mu: f64) -> Self {
        assert_eq!(u.subgrid, Subgrid::Face);
        FluidState {
            u,
            n_prev: None,
            t: 0.0,
            step_index: 0,
            rho,
            mu,
        }
    }
}

/// Averaged collocated advective velocity: component `beta` of u averaged
/// onto the grid of face component `alpha`. For `beta == alpha` this is the
/// component itself; otherwise the 4-point average of the surrounding
/// samples (offsets {-1,0} on axis alpha, {0,+1} on axis beta).
fn collocated_component(u: &StaggeredField, alpha: usize, beta: usize) -> Vec<f64> {
    let geom = u.geom;
    if alpha == beta {
        return u.comp(alpha).to_vec();
    }
    let src = u.comp(beta);
    let n = geom.n as i64;
    let nk = if geom.dim == 3 { n } else { 1 };
    let mut out = vec![0.0; src.len()];
    for k in 0..nk {
        for j in 0..n {
            for i in 0..n {
                let c = [i, j, k];
                let mut acc = 0.0;
                for da in 0..2i64 {
                    for db in 0..2i64 {
                        let mut m = c;
                        m[alpha] += da - 1;
                        m[beta] += db;
                        acc += src[geom.idx(m)];
                    }
                }
                out[geom.idx(c)] = 0.25 * acc;
            }
        }
    }
    out
}

/// Skew-symmetric advection operator on the face grid:
/// `N(u)_a = 1/2 ut . grad_2h(u_a) + 1/2 div_2h(ut u_a)` with the wide
/// (2h-spaced) central differences, so every term stays on the grid of
/// `u_a`.
pub fn advection(u: &StaggeredField) -> StaggeredField {
    assert_eq!(u.subgrid, Subgrid::Face);
    let geom = u.geom;
    let mut out = StaggeredField::zeros(geom, Subgrid::Face);
    for alpha in 0..geom.dim {
        let ua = u.comp(alpha);
        let acc = out.comp_mut(alpha);
        for beta in 0..geom.dim {
            let ut = collocated_component(u, alpha, beta);
            let grad_wide = grid::diff_wide(&geom, ua, beta);
            let prod: Vec<f64> = ut.iter().zip(ua).map(|(a, b)| a * b).collect();
            let div_wide = grid::diff_wide(&geom, &prod, beta);
            for ((o, (g, d)), w) in acc
                .iter_mut()
                .zip(grad_wide.iter().zip(&div_wide))
                .zip(&ut)
            {
                *o += 0.5 * (w * g + d);
            }
        }
    }
    out
}

/// Index-space symbols of the staggered divergence (forward) and gradient
/// (backward) differences for one axis at phase angle theta.
fn div_grad_symbols(theta: f64, h: f64) -> (Complex64, Complex64) {
    let z = Complex64::from_polar(1.0, theta);
    let d = (z - 1.0) / h;
    let g = (1.0 - z.conj()) / h;
    (d, g)
}

/// One Crank-Nicolson step of the momentum equation with a given advection
/// extrapolation `n_tilde` and midstep force density `f_half`, solved
/// coupled with the discrete Leray projection in transform space.
///
/// Returns `(u_next, p_half)`; `u_next` is discretely divergence-free to
/// roundoff and `p_half` has zero mean.
pub fn ns_step(
    u: &StaggeredField,
    n_tilde: &StaggeredField,
    f_half: &StaggeredField,
    dt: f64,
    rho: f64,
    mu: f64,
    plan: &SpectralPlan,
    tally: &Tally,
) -> Result<(StaggeredField, StaggeredField)> {
    if !(dt > 0.0) {
        return Err(Error::ZeroDt(dt));
    }
    grid::ensure_same_geom(&u.geom, &plan.geom)?;
    grid::ensure_same_geom(&u.geom, &n_tilde.geom)?;
    grid::ensure_same_geom(&u.geom, &f_half.geom)?;
    let geom = u.geom;
    let div_u = grid::div_h(u)?;
    let u_scale = u.linf();
    if div_u.linf() > 1e-11 * u_scale.max(1e-300) && u_scale > 0.0 {
        return Err(Error::NonDivFreeInput(div_u.linf()));
    }

    // rhs = rho u / dt - rho n_tilde + (mu/2) L u + f
    let mut rhs = u.clone();
    rhs.scale(rho / dt);
    rhs.axpy(-rho, n_tilde);
    rhs.axpy(0.5 * mu, &grid::laplacian_h(u));
    rhs.axpy(1.0, f_half);

    let dim = geom.dim;
    let n = geom.n;
    let h = geom.h();
    let mut spectra: Vec<Vec<Complex64>> = (0..dim).map(|c| plan.forward(rhs.comp(c))).collect();
    let mut p_hat = vec![Complex64::default(); geom.len()];

    let two_pi = 2.0 * std::f64::consts::PI;
    for idx in 1..geom.len() {
        let c = geom.coords(idx);
        let lambda = plan.eigenvalue(idx);
        let mut d = [Complex64::default(); 3];
        let mut g = [Complex64::default(); 3];
        for axis in 0..dim {
            let theta = two_pi * c[axis] as f64 / n as f64;
            let (da, ga) = div_grad_symbols(theta, h);
            d[axis] = da;
            g[axis] = ga;
        }
        // Leray projection: remove the gradient part of the rhs.
        let mut s = Complex64::default();
        for axis in 0..dim {
            s += d[axis] * spectra[axis][idx];
        }
        let p = s / lambda;
        p_hat[idx] = p;
        let denom = rho / dt - 0.5 * mu * lambda;
        for axis in 0..dim {
            spectra[axis][idx] = (spectra[axis][idx] - g[axis] * p) / denom;
        }
    }
    // zero mode: uniform momentum balance, no pressure contribution
    for axis in 0..dim {
        spectra[axis][0] /= rho / dt;
    }

    let mut u_next = StaggeredField::zeros(geom, Subgrid::Face);
    for (axis, spec) in spectra.into_iter().enumerate() {
        u_next.comp_mut(axis).copy_from_slice(&plan.inverse(spec));
    }
    let mut p = StaggeredField::zeros(geom, Subgrid::Cell);
    p.comp_mut(0).copy_from_slice(&plan.inverse(p_hat));

    // component solves plus the pressure recovery
    tally.add_poisson(dim + 1);
    Ok((u_next, p))
}

/// Convenience: a zero advection field for linearized steps.
pub fn zero_advection(geom: GridGeometry) -> StaggeredField {
    StaggeredField::zeros(geom, Subgrid::Face)
}
