//! Measurement utilities: enclosed area and volume of marker structures,
//! spline-based area for scattered tracer loops, perturbation-mode
//! amplitudes, and time-series bookkeeping for the benchmark runs.

use crate::grid::StaggeredField;
use crate::structures::TriMesh;
use crate::{Error, Result};

/// Shoelace area of the polygon through the markers, in order.
pub fn polygon_area(positions: &[[f64; 3]]) -> f64 {
    let m = positions.len();
    let mut twice = 0.0;
    for k in 0..m {
        let (a, b) = (positions[k], positions[(k + 1) % m]);
        twice += a[0] * b[1] - b[0] * a[1];
    }
    twice.abs() / 2.0
}

/// Periodic cubic spline through uniformly-parametrized samples: stores the
/// knot values and second derivatives per coordinate.
pub struct PeriodicSpline {
    values: Vec<f64>,
    second: Vec<f64>,
}

impl PeriodicSpline {
    /// Fit a C^2 periodic cubic spline through `y` at parameters
    /// `s_k = k / M` (period 1).
    pub fn fit(y: &[f64]) -> Result<Self> {
        let m = y.len();
        if m < 3 {
            return Err(Error::SplineSingular);
        }
        let d = 1.0 / m as f64;
        // m_{k-1} + 4 m_k + m_{k+1} = 6 (y_{k+1} - 2 y_k + y_{k-1}) / d^2,
        // cyclically; solved by Sherman-Morrison on the tridiagonal core.
        let rhs: Vec<f64> = (0..m)
            .map(|k| 6.0 * (y[(k + 1) % m] - 2.0 * y[k] + y[(k + m - 1) % m]) / (d * d))
            .collect();
        let second = solve_cyclic_tridiag(1.0, 4.0, 1.0, &rhs)?;
        Ok(Self {
            values: y.to_vec(),
            second,
        })
    }

    pub fn knots(&self) -> usize {
        self.values.len()
    }

    /// Value at parameter `s` (period 1).
    pub fn eval(&self, s: f64) -> f64 {
        let m = self.values.len();
        let d = 1.0 / m as f64;
        let sw = s.rem_euclid(1.0) * m as f64;
        let k = (sw.floor() as usize).min(m - 1);
        let t = sw - k as f64;
        let (y0, y1) = (self.values[k], self.values[(k + 1) % m]);
        let (m0, m1) = (self.second[k], self.second[(k + 1) % m]);
        let u = 1.0 - t;
        y0 * u + y1 * t + d * d / 6.0 * ((u * u * u - u) * m0 + (t * t * t - t) * m1)
    }

    /// Derivative with respect to `s` at parameter `s`.
    pub fn deriv(&self, s: f64) -> f64 {
        let m = self.values.len();
        let d = 1.0 / m as f64;
        let sw = s.rem_euclid(1.0) * m as f64;
        let k = (sw.floor() as usize).min(m - 1);
        let t = sw - k as f64;
        let (y0, y1) = (self.values[k], self.values[(k + 1) % m]);
        let (m0, m1) = (self.second[k], self.second[(k + 1) % m]);
        let u = 1.0 - t;
        (y1 - y0) / d + d / 6.0 * ((1.0 - 3.0 * u * u) * m0 + (3.0 * t * t - 1.0) * m1)
    }
}

/// Solve a cyclic tridiagonal system with constant bands (a, b, c) by
/// Sherman-Morrison over the Thomas algorithm.
fn solve_cyclic_tridiag(a: f64, b: f64, c: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    if n < 3 {
        return Err(Error::SplineSingular);
    }
    let gamma = -b;
    // Modified diagonal absorbs the corners via u v^T with
    // u = (gamma, 0, .., 0, a), v = (1, 0, .., 0, c/gamma).
    let mut diag = vec![b; n];
    diag[0] = b - gamma;
    diag[n - 1] = b - a * c / gamma;
    let x = thomas(a, &diag, c, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = a;
    let z = thomas(a, &diag, c, &u)?;
    let vx = x[0] + c / gamma * x[n - 1];
    let vz = z[0] + c / gamma * z[n - 1];
    let denom = 1.0 + vz;
    if denom.abs() < 1e-14 {
        return Err(Error::SplineSingular);
    }
    let factor = vx / denom;
    Ok(x.iter().zip(&z).map(|(xi, zi)| xi - factor * zi).collect())
}

fn thomas(a: f64, diag: &[f64], c: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    if diag[0].abs() < 1e-14 {
        return Err(Error::SplineSingular);
    }
    cp[0] = c / diag[0];
    dp[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - a * cp[i - 1];
        if denom.abs() < 1e-14 {
            return Err(Error::SplineSingular);
        }
        cp[i] = c / denom;
        dp[i] = (rhs[i] - a * dp[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Area enclosed by the C^2 periodic spline through the markers, from the
/// exact contour integral (1/2) oint (x y' - y x') ds. The integrand is a
/// quintic per knot interval, so 3-point Gauss quadrature is exact.
pub fn spline_area(positions: &[[f64; 3]]) -> Result<f64> {
    let xs: Vec<f64> = positions.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = positions.iter().map(|p| p[1]).collect();
    let sx = PeriodicSpline::fit(&xs)?;
    let sy = PeriodicSpline::fit(&ys)?;
    let m = positions.len();
    let d = 1.0 / m as f64;
    // Gauss-Legendre nodes on [0, 1], exact through degree 5.
    let half_sqrt35 = 0.5 * (3.0f64 / 5.0).sqrt();
    let nodes = [0.5 - half_sqrt35, 0.5, 0.5 + half_sqrt35];
    let wts = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];
    let mut area = 0.0;
    for k in 0..m {
        for (t, w) in nodes.iter().zip(&wts) {
            let s = (k as f64 + t) * d;
            area += w * d * (sx.eval(s) * sy.deriv(s) - sy.eval(s) * sx.deriv(s));
        }
    }
    Ok(area.abs() / 2.0)
}

/// Resample a marker loop at `m_out` uniform spline parameters; used to
/// compare curves with different marker counts.
pub fn resample_curve(positions: &[[f64; 3]], m_out: usize) -> Result<Vec<[f64; 3]>> {
    let xs: Vec<f64> = positions.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = positions.iter().map(|p| p[1]).collect();
    let sx = PeriodicSpline::fit(&xs)?;
    let sy = PeriodicSpline::fit(&ys)?;
    Ok((0..m_out)
        .map(|k| {
            let s = k as f64 / m_out as f64;
            [sx.eval(s), sy.eval(s), 0.0]
        })
        .collect())
}

/// Signed volume enclosed by a closed triangulated surface, from the
/// divergence theorem applied per triangle.
pub fn mesh_volume(mesh: &TriMesh) -> f64 {
    let x = &mesh.markers.positions;
    let mut six_v = 0.0;
    for &[a, b, c] in &mesh.triangles {
        let (xa, xb, xc) = (x[a], x[b], x[c]);
        six_v += xa[0] * (xb[1] * xc[2] - xb[2] * xc[1])
            + xa[1] * (xb[2] * xc[0] - xb[0] * xc[2])
            + xa[2] * (xb[0] * xc[1] - xb[1] * xc[0]);
    }
    (six_v / 6.0).abs()
}

/// Amplitude of the p-th Fourier mode of the marker radii about `center`:
/// `|(2/M) sum_k r_k exp(-i p s_k)|`.
pub fn mode_amplitude(positions: &[[f64; 3]], center: [f64; 3], p: usize) -> f64 {
    let m = positions.len();
    let mut re = 0.0;
    let mut im = 0.0;
    for (k, x) in positions.iter().enumerate() {
        let r = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2)).sqrt();
        let angle = 2.0 * std::f64::consts::PI * (p * k) as f64 / m as f64;
        re += r * angle.cos();
        im -= r * angle.sin();
    }
    2.0 / m as f64 * (re * re + im * im).sqrt()
}

/// Max-norm of the velocity over all face samples and components.
pub fn max_velocity(u: &StaggeredField) -> f64 {
    u.linf()
}

/// Max-norm discrepancy between two marker loops after resampling both to
/// `m_out` uniform spline parameters; used for successive-refinement
/// convergence estimates.
pub fn successive_marker_error(
    coarse: &[[f64; 3]],
    fine: &[[f64; 3]],
    m_out: usize,
) -> Result<f64> {
    let a = resample_curve(coarse, m_out)?;
    let b = resample_curve(fine, m_out)?;
    let mut err: f64 = 0.0;
    for (pa, pb) in a.iter().zip(&b) {
        err = err.max((pa[0] - pb[0]).abs()).max((pa[1] - pb[1]).abs());
    }
    Ok(err)
}

/// A labelled record of scalar observables over time, written as CSV with
/// `t` as the first column and full double precision.
pub struct TimeSeries {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(columns: &[&str]) -> Self {
        let mut cols = vec!["t".to_string()];
        cols.extend(columns.iter().map(|s| s.to_string()));
        Self {
            columns: cols,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, values: &[f64]) {
        assert_eq!(values.len() + 1, self.columns.len());
        let mut row = Vec::with_capacity(self.columns.len());
        row.push(t);
        row.extend_from_slice(values);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Last value of a named column, if any rows were recorded.
    pub fn last(&self, column: &str) -> Option<f64> {
        let idx = self.columns.iter().position(|c| c == column)?;
        self.rows.last().map(|row| row[idx])
    }

    /// Max over time of a named column.
    pub fn max(&self, column: &str) -> Option<f64> {
        let idx = self.columns.iter().position(|c| c == column)?;
        self.rows
            .iter()
            .map(|row| row[idx])
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}
