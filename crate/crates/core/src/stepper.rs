//! Time integration: marker/fluid coupling wrapped around the
//! Crank-Nicolson / Adams-Bashforth fluid solver. One step is
//!
//! 1. interpolate `u^n` at the markers and move them a half step;
//! 2. evaluate the elastic force at the midpoint configuration and spread;
//! 3. advance the fluid with the AB2-extrapolated advection term;
//! 4. re-interpolate the time-averaged velocity at the midpoint
//!    configuration and complete the marker update.
//!
//! The first step has no advection history and uses a two-solve
//! predictor-corrector (midpoint RK2) bootstrap instead of AB2.

use crate::coupling::{
    build_vector_potential, dfib_interpolate, dfib_spread, ibmac_interpolate, ibmac_spread,
    MarkerSet,
};
use crate::fluid::{advection, ns_step};
use crate::grid::{GridGeometry, StaggeredField, Subgrid};
use crate::kernels::Kernel;
use crate::poisson::{SpectralPlan, Tally};
use crate::{Error, Result};

/// Which velocity-interpolation / force-spreading pair to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Divergence-free coupling through the discrete vector potential.
    Dfib,
    /// Conventional staggered-grid immersed boundary coupling.
    Ibmac,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dfib => "dfib",
            Method::Ibmac => "ibmac",
        }
    }
}

/// Elastic force evaluation: positions and time to per-marker force
/// amplitudes (densities for weighted marker sets, totals when weights
/// are 1).
pub type ForceFn = Box<dyn Fn(&[[f64; 3]], f64) -> crate::Result<Vec<[f64; 3]>>>;

/// Cumulative operation counts mirrored out of the [`Tally`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepCounters {
    pub scalar_poisson_solves: usize,
    pub scalar_transfers: usize,
}

/// Full simulation state: fluid, structure markers, passive tracers, and
/// the spectral plan / force model they share.
pub struct SimState {
    pub geom: GridGeometry,
    pub method: Method,
    pub kernel: Kernel,
    pub rho: f64,
    pub mu: f64,
    pub dt: f64,
    pub u: StaggeredField,
    pub pressure: Option<StaggeredField>,
    pub markers: MarkerSet,
    pub tracers: Vec<[f64; 3]>,
    pub force: ForceFn,
    pub plan: SpectralPlan,
    pub tally: Tally,
    pub t: f64,
    pub step_index: usize,
    n_prev: Option<StaggeredField>,
}

impl SimState {
    pub fn new(
        geom: GridGeometry,
        method: Method,
        kernel: Kernel,
        rho: f64,
        mu: f64,
        dt: f64,
        markers: MarkerSet,
        force: ForceFn,
    ) -> Self {
        Self {
            geom,
            method,
            kernel,
            rho,
            mu,
            dt,
            u: StaggeredField::zeros(geom, Subgrid::Face),
            pressure: None,
            markers,
            tracers: Vec::new(),
            force,
            plan: SpectralPlan::new(geom),
            tally: Tally::default(),
            t: 0.0,
            step_index: 0,
            n_prev: None,
        }
    }

    pub fn counters(&self) -> StepCounters {
        StepCounters {
            scalar_poisson_solves: self.tally.poisson(),
            scalar_transfers: self.tally.transfers(),
        }
    }

    pub fn reset_counters(&self) {
        self.tally.reset();
    }

    /// Interpolate `u` at the markers and tracers in one pass set (one
    /// gather per scalar component, shared by all points).
    fn interpolate(&self, u: &StaggeredField) -> Result<(Vec<[f64; 3]>, Vec<[f64; 3]>)> {
        let nm = self.markers.len();
        let mut points = self.markers.positions.clone();
        points.extend_from_slice(&self.tracers);
        let vels = match self.method {
            Method::Dfib => {
                let pot = build_vector_potential(u, &self.plan, &self.tally)?;
                dfib_interpolate(&pot, &points, &self.kernel, &self.tally)
            }
            Method::Ibmac => ibmac_interpolate(u, &points, &self.kernel, &self.tally),
        };
        let tracer_vels = vels[nm..].to_vec();
        let mut marker_vels = vels;
        marker_vels.truncate(nm);
        Ok((marker_vels, tracer_vels))
    }

    fn spread(&self, positions: &[[f64; 3]], forces: &[[f64; 3]]) -> Result<StaggeredField> {
        let set = MarkerSet {
            positions: positions.to_vec(),
            weights: self.markers.weights.clone(),
        };
        match self.method {
            Method::Dfib => dfib_spread(&set, forces, &self.kernel, &self.plan, &self.tally),
            Method::Ibmac => Ok(ibmac_spread(
                &set,
                forces,
                &self.kernel,
                self.geom,
                &self.tally,
            )),
        }
    }

    /// Advance one step of size `dt`.
    pub fn step(&mut self) -> Result<()> {
        if self.n_prev.is_none() && self.step_index > 0 {
            return Err(Error::MissingHistory);
        }
        let dt = self.dt;
        let dim = self.geom.dim;

        // Stage 1: markers to the midpoint configuration.
        let (mvel, tvel) = self.interpolate(&self.u)?;
        let mid_markers = advect(&self.markers.positions, &mvel, dt / 2.0, dim);
        let mid_tracers = advect(&self.tracers, &tvel, dt / 2.0, dim);

        // Stage 2: midpoint force, spread to the grid.
        let forces = (self.force)(&mid_markers, self.t + dt / 2.0)?;
        let f_half = self.spread(&mid_markers, &forces)?;

        // Stage 3: fluid update.
        let n_cur = advection(&self.u);
        let (u_next, p_half) = match &self.n_prev {
            Some(n_prev) => {
                let mut n_tilde = n_cur.clone();
                n_tilde.scale(1.5);
                n_tilde.axpy(-0.5, n_prev);
                ns_step(
                    &self.u, &n_tilde, &f_half, dt, self.rho, self.mu, &self.plan, &self.tally,
                )?
            }
            None => {
                // Midpoint RK2 bootstrap: predictor with the current
                // advection term, corrector with the trapezoidal average.
                let (u_star, _) = ns_step(
                    &self.u, &n_cur, &f_half, dt, self.rho, self.mu, &self.plan, &self.tally,
                )?;
                let n_star = advection(&u_star);
                let mut n_tilde = n_cur.clone();
                n_tilde.axpy(1.0, &n_star);
                n_tilde.scale(0.5);
                ns_step(
                    &self.u, &n_tilde, &f_half, dt, self.rho, self.mu, &self.plan, &self.tally,
                )?
            }
        };

        // Stage 4: complete the marker update with the time-averaged
        // velocity sampled at the midpoint configuration.
        let mut u_avg = self.u.clone();
        u_avg.axpy(1.0, &u_next);
        u_avg.scale(0.5);
        let saved_markers = std::mem::replace(&mut self.markers.positions, mid_markers);
        let saved_tracers = std::mem::replace(&mut self.tracers, mid_tracers);
        let (mvel_half, tvel_half) = self.interpolate(&u_avg)?;
        self.markers.positions = advect(&saved_markers, &mvel_half, dt, dim);
        self.tracers = advect(&saved_tracers, &tvel_half, dt, dim);

        self.u = u_next;
        self.pressure = Some(p_half);
        self.n_prev = Some(n_cur);
        self.t += dt;
        self.step_index += 1;
        Ok(())
    }
}

fn advect(positions: &[[f64; 3]], velocities: &[[f64; 3]], dt: f64, dim: usize) -> Vec<[f64; 3]> {
    positions
        .iter()
        .zip(velocities)
        .map(|(x, v)| {
            let mut y = *x;
            for axis in 0..dim {
                y[axis] += dt * v[axis];
            }
            y
        })
        .collect()
}
