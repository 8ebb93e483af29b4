//! One-dimensional immersed-boundary kernels and the tensor-product
//! regularized delta function.
//!
//! Each kernel is an even, compactly supported piecewise polynomial (or
//! closed form) `phi(r)` in grid units, with an analytic first derivative.
//! `delta_h` is the tensor product `h^-dim prod phi(x_a / h)` and
//! `grad_delta_h` replaces one factor by `phi' / h`.

use std::fmt;
use std::sync::Arc;

/// Kernel selector names accepted in configs and the CLI.
pub const KERNEL_NAMES: &[&str] = &["std4", "bspline4", "bspline6", "c3five", "c3six"];

#[derive(Clone)]
pub enum Kernel {
    /// Standard 4-point IB kernel (C^1).
    StdFourPoint,
    /// 4-point cubic B-spline kernel (C^2).
    BSpline4,
    /// 6-point quintic B-spline kernel (C^4).
    BSpline6,
    /// Registry slot for an externally supplied kernel (e.g. the C^3
    /// 5-point and 6-point kernels, whose closed forms are not built in).
    Custom {
        name: String,
        half_width: usize,
        smoothness: u32,
        value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Kernel {
    /// Look up a built-in kernel by its config name. `c3five`/`c3six` are
    /// registry slots only and must be supplied via [`Kernel::custom`].
    pub fn by_name(name: &str) -> Option<Kernel> {
        match name {
            "std4" => Some(Kernel::StdFourPoint),
            "bspline4" => Some(Kernel::BSpline4),
            "bspline6" => Some(Kernel::BSpline6),
            _ => None,
        }
    }

    pub fn custom(
        name: impl Into<String>,
        half_width: usize,
        smoothness: u32,
        value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    ) -> Kernel {
        Kernel::Custom {
            name: name.into(),
            half_width,
            smoothness,
            value,
            derivative,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Kernel::StdFourPoint => "std4",
            Kernel::BSpline4 => "bspline4",
            Kernel::BSpline6 => "bspline6",
            Kernel::Custom { name, .. } => name,
        }
    }

    /// Half-support width w in grid units: phi(r) = 0 for |r| >= w.
    pub fn half_width(&self) -> usize {
        match self {
            Kernel::StdFourPoint | Kernel::BSpline4 => 2,
            Kernel::BSpline6 => 3,
            Kernel::Custom { half_width, .. } => *half_width,
        }
    }

    /// Smoothness class k: phi is C^k.
    pub fn smoothness(&self) -> u32 {
        match self {
            Kernel::StdFourPoint => 1,
            Kernel::BSpline4 => 2,
            Kernel::BSpline6 => 4,
            Kernel::Custom { smoothness, .. } => *smoothness,
        }
    }

    /// Kernel value phi(r); exactly 0 for |r| >= half width.
    pub fn phi(&self, r: f64) -> f64 {
        let a = r.abs();
        if a >= self.half_width() as f64 {
            return 0.0;
        }
        match self {
            Kernel::StdFourPoint => {
                if a < 1.0 {
                    0.125 * (3.0 - 2.0 * a + (1.0 + 4.0 * a - 4.0 * a * a).sqrt())
                } else {
                    0.125 * (5.0 - 2.0 * a - (-7.0 + 12.0 * a - 4.0 * a * a).sqrt())
                }
            }
            Kernel::BSpline4 => {
                if a < 1.0 {
                    2.0 / 3.0 - a * a + 0.5 * a * a * a
                } else {
                    4.0 / 3.0 - 2.0 * a + a * a - a * a * a / 6.0
                }
            }
            Kernel::BSpline6 => {
                let a2 = a * a;
                if a < 1.0 {
                    11.0 / 20.0 - 0.5 * a2 + 0.25 * a2 * a2 - a2 * a2 * a / 12.0
                } else if a < 2.0 {
                    17.0 / 40.0 + 0.625 * a - 1.75 * a2 + 1.25 * a2 * a - 0.375 * a2 * a2
                        + a2 * a2 * a / 24.0
                } else {
                    81.0 / 40.0 - 3.375 * a + 2.25 * a2 - 0.75 * a2 * a + 0.125 * a2 * a2
                        - a2 * a2 * a / 120.0
                }
            }
            Kernel::Custom { value, .. } => value(r),
        }
    }

    /// Analytic derivative phi'(r) (odd in r).
    pub fn dphi(&self, r: f64) -> f64 {
        let a = r.abs();
        if a >= self.half_width() as f64 {
            return 0.0;
        }
        let d = match self {
            Kernel::StdFourPoint => {
                if a < 1.0 {
                    0.125 * (-2.0 + (2.0 - 4.0 * a) / (1.0 + 4.0 * a - 4.0 * a * a).sqrt())
                } else {
                    0.125 * (-2.0 - (6.0 - 4.0 * a) / (-7.0 + 12.0 * a - 4.0 * a * a).sqrt())
                }
            }
            Kernel::BSpline4 => {
                if a < 1.0 {
                    -2.0 * a + 1.5 * a * a
                } else {
                    -2.0 + 2.0 * a - 0.5 * a * a
                }
            }
            Kernel::BSpline6 => {
                let a2 = a * a;
                if a < 1.0 {
                    -a + a2 * a - 5.0 * a2 * a2 / 12.0
                } else if a < 2.0 {
                    0.625 - 3.5 * a + 3.75 * a2 - 1.5 * a2 * a + 5.0 * a2 * a2 / 24.0
                } else {
                    -3.375 + 4.5 * a - 2.25 * a2 + 0.5 * a2 * a - a2 * a2 / 24.0
                }
            }
            Kernel::Custom { derivative, .. } => return derivative(r),
        };
        if r < 0.0 {
            -d
        } else {
            d
        }
    }
}

/// Tensor-product regularized delta at a physical offset (length units).
pub fn delta_h(kernel: &Kernel, offset: &[f64], h: f64) -> f64 {
    let mut v = h.powi(-(offset.len() as i32));
    for &dx in offset {
        v *= kernel.phi(dx / h);
    }
    v
}

/// Gradient of the tensor-product delta with respect to its argument.
pub fn grad_delta_h(kernel: &Kernel, offset: &[f64], h: f64) -> Vec<f64> {
    let dim = offset.len();
    let scale = h.powi(-(dim as i32));
    let phis: Vec<f64> = offset.iter().map(|&dx| kernel.phi(dx / h)).collect();
    (0..dim)
        .map(|a| {
            let mut v = scale * kernel.dphi(offset[a] / h) / h;
            for (b, &p) in phis.iter().enumerate() {
                if b != a {
                    v *= p;
                }
            }
            v
        })
        .collect()
}
