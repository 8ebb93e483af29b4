//! Periodic uniform staggered grids and discrete vector calculus.
//!
//! Four subgrids are used: cell centers (scalars like pressure), nodes
//! (scalars like the 2D streamfunction), faces (vectors like velocity and
//! force density) and edges (vectors like the 3D vector potential).
//! With meshwidth `h`, sample `i` of a component sits at `(i + stagger) h`
//! along each axis, where the stagger is 0 or 1/2 depending on the subgrid
//! and component. All index arithmetic wraps modulo `n`.

use crate::{Error, Result};

/// Which staggered subgrid a field lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subgrid {
    Cell,
    Node,
    Face,
    Edge,
}

impl Subgrid {
    pub fn is_scalar(self) -> bool {
        matches!(self, Subgrid::Cell | Subgrid::Node)
    }

    pub fn name(self) -> &'static str {
        match self {
            Subgrid::Cell => "Cell",
            Subgrid::Node => "Node",
            Subgrid::Face => "Face",
            Subgrid::Edge => "Edge",
        }
    }
}

/// Uniform periodic cubic/square grid: `n` cells per axis on `[0, L]^dim`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridGeometry {
    pub dim: usize,
    pub n: usize,
    pub box_length: f64,
}

impl GridGeometry {
    pub fn new(dim: usize, n: usize, box_length: f64) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGeometry(format!("dim must be 2 or 3, got {dim}")));
        }
        if n < 4 {
            return Err(Error::InvalidGeometry(format!("n must be >= 4, got {n}")));
        }
        if !(box_length > 0.0) {
            return Err(Error::InvalidGeometry(format!("box length must be positive, got {box_length}")));
        }
        Ok(GridGeometry { dim, n, box_length })
    }

    pub fn h(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Total samples per component.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Domain volume (area in 2D).
    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    pub fn wrap(&self, i: i64) -> usize {
        i.rem_euclid(self.n as i64) as usize
    }

    /// Flat index of integer coordinates (x1 fastest), wrapped periodically.
    pub fn idx(&self, c: [i64; 3]) -> usize {
        let n = self.n;
        let i = self.wrap(c[0]);
        let j = self.wrap(c[1]);
        if self.dim == 2 {
            i + n * j
        } else {
            i + n * (j + n * self.wrap(c[2]))
        }
    }

    /// Inverse of `idx` for in-range indices.
    pub fn coords(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        let i = idx % n;
        let rest = idx / n;
        if self.dim == 2 {
            [i as i64, rest as i64, 0]
        } else {
            [i as i64, (rest % n) as i64, (rest / n) as i64]
        }
    }

    /// Stagger (0 or 1/2, in units of h) of component `comp` of `subgrid`
    /// along `axis`.
    pub fn stagger(subgrid: Subgrid, comp: usize, axis: usize) -> f64 {
        match subgrid {
            Subgrid::Cell => 0.5,
            Subgrid::Node => 0.0,
            // Component alpha of a face field is normal to the alpha faces:
            // integer coordinate on its own axis, half-shifted on the others.
            Subgrid::Face => {
                if axis == comp {
                    0.0
                } else {
                    0.5
                }
            }
            // Component alpha of an edge field is parallel to the alpha edges.
            Subgrid::Edge => {
                if axis == comp {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }

    /// Physical coordinate of sample `c` of component `comp` on `subgrid`.
    pub fn position(&self, subgrid: Subgrid, comp: usize, c: [i64; 3]) -> [f64; 3] {
        let h = self.h();
        let mut x = [0.0; 3];
        for (axis, xa) in x.iter_mut().enumerate().take(self.dim) {
            *xa = (c[axis] as f64 + Self::stagger(subgrid, comp, axis)) * h;
        }
        x
    }
}

/// A grid function tagged with its staggered subgrid.
///
/// Scalar subgrids (Cell, Node) hold one component; vector subgrids
/// (Face, Edge) hold `dim` components, each an `n^dim` array.
#[derive(Clone, Debug, PartialEq)]
pub struct StaggeredField {
    pub geom: GridGeometry,
    pub subgrid: Subgrid,
    comps: Vec<Vec<f64>>,
}

impl StaggeredField {
    pub fn zeros(geom: GridGeometry, subgrid: Subgrid) -> Self {
        let ncomp = if subgrid.is_scalar() { 1 } else { geom.dim };
        assert!(
            !(subgrid == Subgrid::Edge && geom.dim == 2),
            "edge fields exist only in 3D; the 2D vector potential is a Node scalar"
        );
        StaggeredField {
            geom,
            subgrid,
            comps: vec![vec![0.0; geom.len()]; ncomp],
        }
    }

    pub fn from_fn<F: FnMut(usize, [f64; 3]) -> f64>(
        geom: GridGeometry,
        subgrid: Subgrid,
        mut f: F,
    ) -> Self {
        let mut out = Self::zeros(geom, subgrid);
        for comp in 0..out.ncomp() {
            for idx in 0..geom.len() {
                let x = geom.position(subgrid, comp, geom.coords(idx));
                out.comps[comp][idx] = f(comp, x);
            }
        }
        out
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.comps[c]
    }

    pub fn is_scalar(&self) -> bool {
        self.subgrid.is_scalar()
    }

    /// In-place `self += scale * other` (same subgrid and geometry).
    pub fn axpy(&mut self, scale: f64, other: &StaggeredField) {
        assert_eq!(self.subgrid, other.subgrid);
        assert_eq!(self.geom, other.geom);
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += scale * y;
            }
        }
    }

    pub fn scale(&mut self, scale: f64) {
        for a in self.comps.iter_mut() {
            for x in a.iter_mut() {
                *x *= scale;
            }
        }
    }

    pub fn add_constant(&mut self, comp: usize, c: f64) {
        for x in self.comps[comp].iter_mut() {
            *x += c;
        }
    }

    /// Maximum absolute value over all components.
    pub fn linf(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Volume-weighted l2 norm: sqrt(sum |.|^2 h^dim).
    pub fn l2(&self) -> f64 {
        let w = self.geom.h().powi(self.geom.dim as i32);
        let s: f64 = self
            .comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v * v)
            .sum();
        (s * w).sqrt()
    }

    /// h^dim-weighted inner product with `other`.
    pub fn dot(&self, other: &StaggeredField) -> f64 {
        assert_eq!(self.subgrid, other.subgrid);
        let w = self.geom.h().powi(self.geom.dim as i32);
        let mut s = 0.0;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (x, y) in a.iter().zip(b) {
                s += x * y;
            }
        }
        s * w
    }
}

pub(crate) fn ensure_same_geom(a: &GridGeometry, b: &GridGeometry) -> Result<()> {
    if a != b {
        return Err(Error::GeometryMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

/// Half-shifted central difference along `axis`: output sample i is
/// `(src[i+1] - src[i]) / h` (forward) or `(src[i] - src[i-1]) / h`
/// (backward), with periodic wrap. Forward moves the stagger from 0 to
/// 1/2, backward from 1/2 to 0.
pub(crate) fn diff_half(geom: &GridGeometry, src: &[f64], axis: usize, forward: bool) -> Vec<f64> {
    let n = geom.n as i64;
    let inv_h = 1.0 / geom.h();
    let mut out = vec![0.0; src.len()];
    let nk = if geom.dim == 3 { geom.n as i64 } else { 1 };
    for k in 0..nk {
        for j in 0..n {
            for i in 0..n {
                let c = [i, j, k];
                let mut cp = c;
                let mut cm = c;
                if forward {
                    cp[axis] += 1;
                } else {
                    cm[axis] -= 1;
                }
                out[geom.idx(c)] = (src[geom.idx(cp)] - src[geom.idx(cm)]) * inv_h;
            }
        }
    }
    out
}

/// Wide central difference along `axis` with spacing 2h; input and output
/// share a subgrid.
pub(crate) fn diff_wide(geom: &GridGeometry, src: &[f64], axis: usize) -> Vec<f64> {
    let n = geom.n as i64;
    let inv_2h = 1.0 / (2.0 * geom.h());
    let mut out = vec![0.0; src.len()];
    let nk = if geom.dim == 3 { geom.n as i64 } else { 1 };
    for k in 0..nk {
        for j in 0..n {
            for i in 0..n {
                let c = [i, j, k];
                let mut cp = c;
                let mut cm = c;
                cp[axis] += 1;
                cm[axis] -= 1;
                out[geom.idx(c)] = (src[geom.idx(cp)] - src[geom.idx(cm)]) * inv_2h;
            }
        }
    }
    out
}

/// Discrete gradient: Cell -> Face or Node -> Edge (3D).
pub fn grad_h(phi: &StaggeredField) -> Result<StaggeredField> {
    if !phi.is_scalar() {
        return Err(Error::ScalarInputExpected(phi.subgrid.name().into()));
    }
    let geom = phi.geom;
    let target = match phi.subgrid {
        Subgrid::Cell => Subgrid::Face,
        Subgrid::Node => {
            if geom.dim == 2 {
                return Err(Error::InvalidSubgrid(
                    "Node -> Edge gradient is 3D only".into(),
                ));
            }
            Subgrid::Edge
        }
        _ => unreachable!(),
    };
    let mut out = StaggeredField::zeros(geom, target);
    for axis in 0..geom.dim {
        // Cell (1/2) -> Face (0): backward; Node (0) -> Edge (1/2): forward.
        let forward = phi.subgrid == Subgrid::Node;
        out.comps[axis] = diff_half(&geom, phi.comp(0), axis, forward);
    }
    Ok(out)
}

/// Discrete divergence: Face -> Cell or Edge -> Node.
pub fn div_h(v: &StaggeredField) -> Result<StaggeredField> {
    if v.is_scalar() {
        return Err(Error::VectorInputExpected(v.subgrid.name().into()));
    }
    let geom = v.geom;
    let (target, forward) = match v.subgrid {
        Subgrid::Face => (Subgrid::Cell, true),
        Subgrid::Edge => (Subgrid::Node, false),
        _ => unreachable!(),
    };
    let mut out = StaggeredField::zeros(geom, target);
    for axis in 0..geom.dim {
        let d = diff_half(&geom, v.comp(axis), axis, forward);
        for (o, x) in out.comps[0].iter_mut().zip(&d) {
            *o += x;
        }
    }
    Ok(out)
}

/// Discrete curl.
///
/// 3D: Face -> Edge or Edge -> Face, componentwise `(curl v)_i = D_j v_k - D_k v_j`.
/// 2D: Face -> Node scalar `D_1 v_2 - D_2 v_1`, and Node -> Face "rot"
/// `(D_2 psi, -D_1 psi)`.
pub fn curl_h(v: &StaggeredField) -> Result<StaggeredField> {
    let geom = v.geom;
    if v.subgrid == Subgrid::Cell {
        return Err(Error::InvalidSubgrid("curl rejects Cell input".into()));
    }
    if geom.dim == 2 {
        match v.subgrid {
            Subgrid::Face => {
                // scalar vorticity on nodes; Face (1/2 transverse) -> Node: backward
                let d1v2 = diff_half(&geom, v.comp(1), 0, false);
                let d2v1 = diff_half(&geom, v.comp(0), 1, false);
                let mut out = StaggeredField::zeros(geom, Subgrid::Node);
                for (o, (a, b)) in out.comps[0].iter_mut().zip(d1v2.iter().zip(&d2v1)) {
                    *o = a - b;
                }
                Ok(out)
            }
            Subgrid::Node => {
                // rot of the streamfunction; Node -> Face: forward
                let mut out = StaggeredField::zeros(geom, Subgrid::Face);
                out.comps[0] = diff_half(&geom, v.comp(0), 1, true);
                let d1 = diff_half(&geom, v.comp(0), 0, true);
                out.comps[1] = d1.iter().map(|x| -x).collect();
                Ok(out)
            }
            _ => Err(Error::InvalidSubgrid(v.subgrid.name().into())),
        }
    } else {
        let (target, forward) = match v.subgrid {
            Subgrid::Face => (Subgrid::Edge, false),
            Subgrid::Edge => (Subgrid::Face, true),
            _ => return Err(Error::InvalidSubgrid(v.subgrid.name().into())),
        };
        let mut out = StaggeredField::zeros(geom, target);
        for i in 0..3 {
            let j = (i + 1) % 3;
            let k = (i + 2) % 3;
            let djvk = diff_half(&geom, v.comp(k), j, forward);
            let dkvj = diff_half(&geom, v.comp(j), k, forward);
            for (o, (a, b)) in out.comps[i].iter_mut().zip(djvk.iter().zip(&dkvj)) {
                *o = a - b;
            }
        }
        Ok(out)
    }
}

/// Compact (2 dim + 1)-point Laplacian, applied componentwise on the
/// component's own shifted subgrid.
pub fn laplacian_h(field: &StaggeredField) -> StaggeredField {
    let geom = field.geom;
    let n = geom.n as i64;
    let inv_h2 = 1.0 / (geom.h() * geom.h());
    let nk = if geom.dim == 3 { n } else { 1 };
    let mut out = StaggeredField::zeros(geom, field.subgrid);
    for comp in 0..field.ncomp() {
        let src = field.comp(comp);
        let dst = out.comp_mut(comp);
        for k in 0..nk {
            for j in 0..n {
                for i in 0..n {
                    let c = [i, j, k];
                    let center = src[geom.idx(c)];
                    let mut acc = 0.0;
                    for axis in 0..geom.dim {
                        let mut cp = c;
                        let mut cm = c;
                        cp[axis] += 1;
                        cm[axis] -= 1;
                        acc += src[geom.idx(cp)] - 2.0 * center + src[geom.idx(cm)];
                    }
                    dst[geom.idx(c)] = acc * inv_h2;
                }
            }
        }
    }
    out
}

/// Arithmetic mean per component (equals the volume-weighted mean on a
/// uniform grid).
pub fn field_mean(field: &StaggeredField) -> Vec<f64> {
    let len = field.geom.len() as f64;
    (0..field.ncomp())
        .map(|c| field.comp(c).iter().sum::<f64>() / len)
        .collect()
}

/// Restrict a fine field (2N per axis) to a coarse geometry (N per axis).
///
/// Per axis: where the coarse stagger is 0 the coarse sample coincides with
/// fine index 2i and is taken directly; where it is 1/2 the coarse location
/// is midway between fine samples 2i and 2i+1 and their average is used.
/// Cell scalars therefore average the 2^dim covering fine cells, node
/// scalars are pure point samples, and face/edge components are exact along
/// their own axis.
pub fn restrict_2n_to_n(fine: &StaggeredField, coarse_geom: GridGeometry) -> Result<StaggeredField> {
    let fg = fine.geom;
    if fg.dim != coarse_geom.dim
        || fg.n != 2 * coarse_geom.n
        || (fg.box_length - coarse_geom.box_length).abs() > 1e-12 * coarse_geom.box_length
    {
        return Err(Error::GeometryMismatch(format!(
            "restriction requires an exact 2:1 grid pair, got fine {fg:?} vs coarse {coarse_geom:?}"
        )));
    }
    let mut out = StaggeredField::zeros(coarse_geom, fine.subgrid);
    let n = coarse_geom.n as i64;
    let nk = if coarse_geom.dim == 3 { n } else { 1 };
    for comp in 0..out.ncomp() {
        // axes where the coarse sample falls between two fine samples
        let half_axes: Vec<usize> = (0..coarse_geom.dim)
            .filter(|&a| GridGeometry::stagger(fine.subgrid, comp, a) == 0.5)
            .collect();
        let samples = 1usize << half_axes.len();
        let src = fine.comp(comp);
        for k in 0..nk {
            for j in 0..n {
                for i in 0..n {
                    let c = [i, j, k];
                    let base = [2 * c[0], 2 * c[1], 2 * c[2]];
                    let mut acc = 0.0;
                    for mask in 0..samples {
                        let mut fc = base;
                        for (bit, &axis) in half_axes.iter().enumerate() {
                            if mask >> bit & 1 == 1 {
                                fc[axis] += 1;
                            }
                        }
                        acc += src[fg.idx(fc)];
                    }
                    out.comps[comp][coarse_geom.idx(c)] = acc / samples as f64;
                }
            }
        }
    }
    Ok(out)
}
