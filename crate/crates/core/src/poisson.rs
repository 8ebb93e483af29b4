//! Spectral (discrete Fourier) solvers for periodic Poisson problems on
//! any staggered subgrid, plus the cost tallies used by the per-step audit.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::{GridGeometry, StaggeredField};
use crate::{Error, Result};

/// Per-step cost counters: scalar Poisson solves and scalar
/// interpolation/spreading passes between the grid and the Lagrangian mesh.
#[derive(Debug, Default)]
pub struct Tally {
    pub scalar_poisson_solves: AtomicUsize,
    pub scalar_transfers: AtomicUsize,
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_poisson(&self, n: usize) {
        self.scalar_poisson_solves.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_transfers(&self, n: usize) {
        self.scalar_transfers.fetch_add(n, Ordering::Relaxed);
    }

    pub fn poisson(&self) -> usize {
        self.scalar_poisson_solves.load(Ordering::Relaxed)
    }

    pub fn transfers(&self) -> usize {
        self.scalar_transfers.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.scalar_poisson_solves.store(0, Ordering::Relaxed);
        self.scalar_transfers.store(0, Ordering::Relaxed);
    }
}

/// Reusable transform plan for one grid geometry: cached FFT plans and the
/// eigenvalues of the compact Laplacian, lambda(k) = -(4/h^2) sum_a
/// sin^2(pi k_a / n).
pub struct SpectralPlan {
    pub geom: GridGeometry,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    eigenvalues: Vec<f64>,
    /// 1D line transforms performed, for the cost-scaling audit.
    pub fft_lines: AtomicUsize,
}

impl SpectralPlan {
    pub fn new(geom: GridGeometry) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(geom.n);
        let inverse = planner.plan_fft_inverse(geom.n);
        let h = geom.h();
        let n = geom.n;
        let mut eigenvalues = vec![0.0; geom.len()];
        for (idx, ev) in eigenvalues.iter_mut().enumerate() {
            let c = geom.coords(idx);
            let mut s = 0.0;
            for axis in 0..geom.dim {
                let t = (std::f64::consts::PI * c[axis] as f64 / n as f64).sin();
                s += t * t;
            }
            *ev = -4.0 / (h * h) * s;
        }
        SpectralPlan {
            geom,
            forward,
            inverse,
            eigenvalues,
            fft_lines: AtomicUsize::new(0),
        }
    }

    pub fn eigenvalue(&self, idx: usize) -> f64 {
        self.eigenvalues[idx]
    }

    /// Forward DFT of a real component array into a caller-owned complex buffer.
    pub fn forward(&self, src: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = src.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, true);
        buf
    }

    /// Inverse DFT; returns the real part (imaginary parts are roundoff for
    /// spectra of real data).
    pub fn inverse(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut buf, false);
        let scale = 1.0 / self.geom.len() as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    fn transform(&self, buf: &mut [Complex64], forward: bool) {
        let n = self.geom.n;
        let dim = self.geom.dim;
        let fft = if forward { &self.forward } else { &self.inverse };
        let mut line = vec![Complex64::default(); n];
        for axis in 0..dim {
            let stride = n.pow(axis as u32);
            let lines = self.geom.len() / n;
            for l in 0..lines {
                // base offset of the l-th line along `axis`
                let block = stride * n;
                let outer = l / stride;
                let inner = l % stride;
                let base = outer * block + inner;
                if stride == 1 {
                    fft.process(&mut buf[base..base + n]);
                } else {
                    for (t, slot) in line.iter_mut().enumerate() {
                        *slot = buf[base + t * stride];
                    }
                    fft.process(&mut line);
                    for (t, slot) in line.iter().enumerate() {
                        buf[base + t * stride] = *slot;
                    }
                }
            }
            self.fft_lines.fetch_add(lines, Ordering::Relaxed);
        }
    }

    /// Solve `L_h u = rhs` for one component array with zero-mean solution.
    /// The rhs mean must vanish to within `1e-11 * ||rhs||_inf` (solvability
    /// of the periodic problem); a roundoff-level mean is subtracted.
    pub fn solve_scalar_component(&self, rhs: &[f64], tally: &Tally) -> Result<Vec<f64>> {
        let len = self.geom.len() as f64;
        let mean: f64 = rhs.iter().sum::<f64>() / len;
        let linf = rhs.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let tol = 1e-11 * linf;
        if mean.abs() > tol && linf > 0.0 {
            return Err(Error::NonZeroMeanRhs {
                mean: mean.abs(),
                tol,
            });
        }
        let mut buf = self.forward(rhs);
        buf[0] = Complex64::new(0.0, 0.0);
        for (idx, v) in buf.iter_mut().enumerate().skip(1) {
            *v /= self.eigenvalues[idx];
        }
        tally.add_poisson(1);
        Ok(self.inverse(buf))
    }
}

/// Solve the scalar Poisson problem `L_h u = rhs` on the rhs's subgrid.
pub fn solve_scalar_poisson(
    rhs: &StaggeredField,
    plan: &SpectralPlan,
    tally: &Tally,
) -> Result<StaggeredField> {
    if !rhs.is_scalar() {
        return Err(Error::ScalarInputExpected(rhs.subgrid.name().into()));
    }
    let mut out = StaggeredField::zeros(rhs.geom, rhs.subgrid);
    let sol = plan.solve_scalar_component(rhs.comp(0), tally)?;
    out.comp_mut(0).copy_from_slice(&sol);
    Ok(out)
}

/// Solve the vector Poisson problem `-L_h u = rhs` componentwise on the
/// rhs's Face or Edge subgrid, with zero-mean components.
pub fn solve_vector_poisson(
    rhs: &StaggeredField,
    plan: &SpectralPlan,
    tally: &Tally,
) -> Result<StaggeredField> {
    if rhs.is_scalar() {
        return Err(Error::VectorInputExpected(rhs.subgrid.name().into()));
    }
    let mut out = StaggeredField::zeros(rhs.geom, rhs.subgrid);
    for comp in 0..rhs.ncomp() {
        let mut u = plan.solve_scalar_component(rhs.comp(comp), tally)?;
        for v in u.iter_mut() {
            *v = -*v;
        }
        out.comp_mut(comp).copy_from_slice(&u);
    }
    Ok(out)
}
