//! Lagrangian-Eulerian coupling: conventional (IBMAC) spreading and
//! interpolation, and the divergence-free (DFIB) pair that routes through a
//! discrete vector potential (a streamfunction in 2D).
//!
//! The DFIB interpolant is the continuum curl of the kernel-interpolated
//! potential, so it is continuously divergence-free; DFIB spreading is its
//! exact adjoint under the h^dim / Delta-s weighted inner products.

use crate::grid::{self, GridGeometry, StaggeredField, Subgrid};
use crate::kernels::Kernel;
use crate::poisson::{solve_vector_poisson, SpectralPlan, Tally};
use crate::{Error, Result};

/// Lagrangian markers: positions (length units, interpreted periodically)
/// and per-marker quadrature weights Delta-s.
#[derive(Clone, Debug)]
pub struct MarkerSet {
    pub positions: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl MarkerSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Discrete vector potential of a divergence-free face velocity: an
/// edge-centered vector in 3D, a node-centered streamfunction in 2D, plus
/// the mean flow that the curl cannot represent.
#[derive(Clone, Debug)]
pub struct VectorPotential {
    pub field: StaggeredField,
    pub u0: [f64; 3],
}

const MAX_STENCIL: usize = 8;

struct AxisStencil {
    start: i64,
    len: usize,
    w: [f64; MAX_STENCIL],
}

/// Kernel weights along one axis for samples at `(m + stagger) h` around
/// the point coordinate `x`. `deriv` selects `phi' / h` in place of `phi`.
fn axis_stencil(kernel: &Kernel, x_over_h: f64, stagger: f64, inv_h: f64, deriv: bool) -> AxisStencil {
    let w = kernel.half_width();
    let start = (x_over_h - stagger - w as f64).floor() as i64 + 1;
    let len = 2 * w;
    debug_assert!(len <= MAX_STENCIL);
    let mut weights = [0.0; MAX_STENCIL];
    for (t, slot) in weights.iter_mut().enumerate().take(len) {
        let r = (start + t as i64) as f64 + stagger - x_over_h;
        *slot = if deriv {
            kernel.dphi(r) * inv_h
        } else {
            kernel.phi(r)
        };
    }
    AxisStencil {
        start,
        len,
        w: weights,
    }
}

fn stencils(
    geom: &GridGeometry,
    subgrid: Subgrid,
    comp: usize,
    kernel: &Kernel,
    point: &[f64; 3],
    deriv_axis: Option<usize>,
) -> [AxisStencil; 3] {
    let h = geom.h();
    let inv_h = 1.0 / h;
    std::array::from_fn(|axis| {
        if axis < geom.dim {
            axis_stencil(
                kernel,
                point[axis] * inv_h,
                GridGeometry::stagger(subgrid, comp, axis),
                inv_h,
                deriv_axis == Some(axis),
            )
        } else {
            AxisStencil {
                start: 0,
                len: 1,
                w: {
                    let mut w = [0.0; MAX_STENCIL];
                    w[0] = 1.0;
                    w
                },
            }
        }
    })
}

/// One scalar interpolation pass: for each point, sum `data(x) W(x - X) h^dim`
/// where W is the tensor-product delta (h^dim cancels its normalization),
/// optionally with the kernel derivative along `deriv_axis`.
fn gather_pass(
    data: &[f64],
    geom: &GridGeometry,
    subgrid: Subgrid,
    comp: usize,
    kernel: &Kernel,
    deriv_axis: Option<usize>,
    points: &[[f64; 3]],
    out: &mut [f64],
    scale: f64,
    tally: &Tally,
) {
    for (p, acc) in points.iter().zip(out.iter_mut()) {
        let st = stencils(geom, subgrid, comp, kernel, p, deriv_axis);
        let mut sum = 0.0;
        let kmax = if geom.dim == 3 { st[2].len } else { 1 };
        for tk in 0..kmax {
            let wk = st[2].w[tk];
            if wk == 0.0 {
                continue;
            }
            for tj in 0..st[1].len {
                let wjk = st[1].w[tj] * wk;
                if wjk == 0.0 {
                    continue;
                }
                for ti in 0..st[0].len {
                    let idx = geom.idx([
                        st[0].start + ti as i64,
                        st[1].start + tj as i64,
                        st[2].start + tk as i64,
                    ]);
                    sum += data[idx] * st[0].w[ti] * wjk;
                }
            }
        }
        *acc += scale * sum;
    }
    tally.add_transfers(1);
}

/// One scalar spreading pass: scatter `amp[m] W(x - X_m)` into `data`,
/// where W carries the delta's `h^-dim` normalization.
fn scatter_pass(
    data: &mut [f64],
    geom: &GridGeometry,
    subgrid: Subgrid,
    comp: usize,
    kernel: &Kernel,
    deriv_axis: Option<usize>,
    points: &[[f64; 3]],
    amps: &[f64],
    tally: &Tally,
) {
    let inv_hd = geom.h().powi(-(geom.dim as i32));
    for (p, &amp) in points.iter().zip(amps) {
        if amp == 0.0 {
            continue;
        }
        let st = stencils(geom, subgrid, comp, kernel, p, deriv_axis);
        let a = amp * inv_hd;
        let kmax = if geom.dim == 3 { st[2].len } else { 1 };
        for tk in 0..kmax {
            let wk = st[2].w[tk] * a;
            if wk == 0.0 {
                continue;
            }
            for tj in 0..st[1].len {
                let wjk = st[1].w[tj] * wk;
                if wjk == 0.0 {
                    continue;
                }
                for ti in 0..st[0].len {
                    let idx = geom.idx([
                        st[0].start + ti as i64,
                        st[1].start + tj as i64,
                        st[2].start + tk as i64,
                    ]);
                    data[idx] += st[0].w[ti] * wjk;
                }
            }
        }
    }
    tally.add_transfers(1);
}

/// Conventional IB force spreading: `f(x) = sum_m F_m delta_h(x - X_m) ds_m`
/// per face component.
pub fn ibmac_spread(
    markers: &MarkerSet,
    forces: &[[f64; 3]],
    kernel: &Kernel,
    geom: GridGeometry,
    tally: &Tally,
) -> StaggeredField {
    let mut f = StaggeredField::zeros(geom, Subgrid::Face);
    for comp in 0..geom.dim {
        let amps: Vec<f64> = forces
            .iter()
            .zip(&markers.weights)
            .map(|(fm, &ds)| fm[comp] * ds)
            .collect();
        scatter_pass(
            f.comp_mut(comp),
            &geom,
            Subgrid::Face,
            comp,
            kernel,
            None,
            &markers.positions,
            &amps,
            tally,
        );
    }
    f
}

/// Conventional IB velocity interpolation at arbitrary points:
/// `U(X) = sum_x u(x) delta_h(x - X) h^dim` per component.
pub fn ibmac_interpolate(
    u: &StaggeredField,
    points: &[[f64; 3]],
    kernel: &Kernel,
    tally: &Tally,
) -> Vec<[f64; 3]> {
    assert_eq!(u.subgrid, Subgrid::Face);
    let geom = u.geom;
    let mut out = vec![[0.0; 3]; points.len()];
    let mut comp_vals = vec![0.0; points.len()];
    for comp in 0..geom.dim {
        comp_vals.iter_mut().for_each(|v| *v = 0.0);
        gather_pass(
            u.comp(comp),
            &geom,
            Subgrid::Face,
            comp,
            kernel,
            None,
            points,
            &mut comp_vals,
            1.0,
            tally,
        );
        for (o, v) in out.iter_mut().zip(&comp_vals) {
            o[comp] = *v;
        }
    }
    out
}

/// Build the discrete vector potential of a discretely divergence-free
/// face velocity: 3D solves `-L a = curl u` on edges with zero-mean
/// components; 2D solves `-L psi = curl u` on nodes. The mean flow `u0` is
/// carried separately.
pub fn build_vector_potential(
    u: &StaggeredField,
    plan: &SpectralPlan,
    tally: &Tally,
) -> Result<VectorPotential> {
    assert_eq!(u.subgrid, Subgrid::Face);
    let geom = u.geom;
    let div = grid::div_h(u)?;
    let scale = u.linf();
    if scale > 0.0 && div.linf() > 1e-11 * scale {
        return Err(Error::NonDivFreeInput(div.linf()));
    }
    let mean = grid::field_mean(u);
    let mut u0 = [0.0; 3];
    u0[..geom.dim].copy_from_slice(&mean);

    let vorticity = grid::curl_h(u)?;
    let field = if geom.dim == 2 {
        let mut psi = StaggeredField::zeros(geom, Subgrid::Node);
        let mut rhs = vorticity.comp(0).to_vec();
        for v in rhs.iter_mut() {
            *v = -*v;
        }
        // L psi = -curl u, i.e. -L psi = curl u
        let sol = plan.solve_scalar_component(&rhs, tally)?;
        psi.comp_mut(0).copy_from_slice(&sol);
        psi
    } else {
        solve_vector_poisson(&vorticity, plan, tally)?
    };
    Ok(VectorPotential { field, u0 })
}

/// Divergence-free velocity interpolation at arbitrary points:
/// `U(X) = u0 + sum_E a(x) x (grad delta_h)(x - X) h^3` in 3D, and the
/// streamfunction analog `u0 + sum_N psi (-d2, d1) delta_h(x - X) h^2` in 2D.
pub fn dfib_interpolate(
    potential: &VectorPotential,
    points: &[[f64; 3]],
    kernel: &Kernel,
    tally: &Tally,
) -> Vec<[f64; 3]> {
    let geom = potential.field.geom;
    let mut out = vec![potential.u0; points.len()];
    let mut vals = vec![0.0; points.len()];
    if geom.dim == 2 {
        let psi = potential.field.comp(0);
        // U1 = u0_1 - sum psi d2(delta) h^2
        vals.iter_mut().for_each(|v| *v = 0.0);
        gather_pass(psi, &geom, Subgrid::Node, 0, kernel, Some(1), points, &mut vals, -1.0, tally);
        for (o, v) in out.iter_mut().zip(&vals) {
            o[0] += v;
        }
        // U2 = u0_2 + sum psi d1(delta) h^2
        vals.iter_mut().for_each(|v| *v = 0.0);
        gather_pass(psi, &geom, Subgrid::Node, 0, kernel, Some(0), points, &mut vals, 1.0, tally);
        for (o, v) in out.iter_mut().zip(&vals) {
            o[1] += v;
        }
    } else {
        // U_a = u0_a + sum [a_j dk(delta) - a_k dj(delta)] h^3, (a,j,k) cyclic
        for alpha in 0..3 {
            let j = (alpha + 1) % 3;
            let k = (alpha + 2) % 3;
            vals.iter_mut().for_each(|v| *v = 0.0);
            gather_pass(
                potential.field.comp(j),
                &geom,
                Subgrid::Edge,
                j,
                kernel,
                Some(k),
                points,
                &mut vals,
                1.0,
                tally,
            );
            gather_pass(
                potential.field.comp(k),
                &geom,
                Subgrid::Edge,
                k,
                kernel,
                Some(j),
                points,
                &mut vals,
                -1.0,
                tally,
            );
            for (o, v) in out.iter_mut().zip(&vals) {
                o[alpha] += v;
            }
        }
    }
    out
}

/// Divergence-free force spreading, the adjoint of [`dfib_interpolate`].
///
/// 3D: assemble `G = sum_m (grad delta_h)(x - X_m) x F_m ds` on edges,
/// solve `-L f = curl G` on faces, then add the uniform mean force
/// `f0 = sum_m F_m ds / V`. 2D: scatter the scalar
/// `g = sum_m [F_2 d1 - F_1 d2] delta_h(x - X_m) ds` onto nodes and solve
/// `-L f_1 = D2 g`, `-L f_2 = -D1 g`. The result minus `f0` is discretely
/// divergence-free.
pub fn dfib_spread(
    markers: &MarkerSet,
    forces: &[[f64; 3]],
    kernel: &Kernel,
    plan: &SpectralPlan,
    tally: &Tally,
) -> Result<StaggeredField> {
    let geom = plan.geom;
    let volume = geom.volume();
    let mut f0 = [0.0; 3];
    for (fm, &ds) in forces.iter().zip(&markers.weights) {
        for axis in 0..geom.dim {
            f0[axis] += fm[axis] * ds / volume;
        }
    }

    let mut f = if geom.dim == 2 {
        let mut g = StaggeredField::zeros(geom, Subgrid::Node);
        let amps1: Vec<f64> = forces
            .iter()
            .zip(&markers.weights)
            .map(|(fm, &ds)| fm[1] * ds)
            .collect();
        scatter_pass(
            g.comp_mut(0),
            &geom,
            Subgrid::Node,
            0,
            kernel,
            Some(0),
            &markers.positions,
            &amps1,
            tally,
        );
        let amps2: Vec<f64> = forces
            .iter()
            .zip(&markers.weights)
            .map(|(fm, &ds)| -fm[0] * ds)
            .collect();
        scatter_pass(
            g.comp_mut(0),
            &geom,
            Subgrid::Node,
            0,
            kernel,
            Some(1),
            &markers.positions,
            &amps2,
            tally,
        );
        let rhs1 = grid::diff_half(&geom, g.comp(0), 1, true);
        let mut rhs2 = grid::diff_half(&geom, g.comp(0), 0, true);
        for v in rhs2.iter_mut() {
            *v = -*v;
        }
        let mut f = StaggeredField::zeros(geom, Subgrid::Face);
        for (comp, rhs) in [rhs1, rhs2].into_iter().enumerate() {
            let mut sol = plan.solve_scalar_component(&rhs, tally)?;
            for v in sol.iter_mut() {
                *v = -*v;
            }
            f.comp_mut(comp).copy_from_slice(&sol);
        }
        f
    } else {
        let mut big_g = StaggeredField::zeros(geom, Subgrid::Edge);
        for i in 0..3 {
            let j = (i + 1) % 3;
            let k = (i + 2) % 3;
            // G_i = sum_m [dj(delta) F_k - dk(delta) F_j] ds
            let amps_k: Vec<f64> = forces
                .iter()
                .zip(&markers.weights)
                .map(|(fm, &ds)| fm[k] * ds)
                .collect();
            scatter_pass(
                big_g.comp_mut(i),
                &geom,
                Subgrid::Edge,
                i,
                kernel,
                Some(j),
                &markers.positions,
                &amps_k,
                tally,
            );
            let amps_j: Vec<f64> = forces
                .iter()
                .zip(&markers.weights)
                .map(|(fm, &ds)| -fm[j] * ds)
                .collect();
            scatter_pass(
                big_g.comp_mut(i),
                &geom,
                Subgrid::Edge,
                i,
                kernel,
                Some(k),
                &markers.positions,
                &amps_j,
                tally,
            );
        }
        let rhs = grid::curl_h(&big_g)?;
        solve_vector_poisson(&rhs, plan, tally)?
    };

    for comp in 0..geom.dim {
        f.add_constant(comp, f0[comp]);
    }
    Ok(f)
}
