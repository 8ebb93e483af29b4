use dfib::diagnostics::{
    mesh_volume, mode_amplitude, polygon_area, resample_curve, spline_area,
    successive_marker_error, PeriodicSpline, TimeSeries,
};
use dfib::structures::{make_circle, make_icosphere, make_perturbed_circle, sample_closed};

const PI: f64 = std::f64::consts::PI;

#[test]
fn polygon_area_of_square_and_polygon() {
    let square = vec![
        [0.0, 0.0, 0.0],
        [2.0, 0.0, 0.0],
        [2.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
    ];
    assert!((polygon_area(&square) - 2.0).abs() < 1e-15);
    // orientation independent
    let mut rev = square.clone();
    rev.reverse();
    assert!((polygon_area(&rev) - 2.0).abs() < 1e-15);

    let (r, m) = (0.3, 50usize);
    let circle = make_circle([0.5, 0.5, 0.0], r, m).unwrap();
    let exact = 0.5 * m as f64 * r * r * (2.0 * PI / m as f64).sin();
    assert!((polygon_area(&circle.markers.positions) - exact).abs() < 1e-15);
}

#[test]
fn spline_interpolates_knots_and_converges() {
    let f = |s: f64| (2.0 * PI * s).sin() + 0.3 * (4.0 * PI * s).cos();
    let mut errs = Vec::new();
    for m in [16usize, 32] {
        let y: Vec<f64> = (0..m).map(|k| f(k as f64 / m as f64)).collect();
        let sp = PeriodicSpline::fit(&y).unwrap();
        for (k, &yk) in y.iter().enumerate() {
            assert!((sp.eval(k as f64 / m as f64) - yk).abs() < 1e-13);
        }
        let mut e: f64 = 0.0;
        for j in 0..(7 * m) {
            let s = (j as f64 + 0.41) / (7 * m) as f64;
            e = e.max((sp.eval(s) - f(s)).abs());
        }
        errs.push(e);
    }
    // cubic spline: fourth-order interpolation error
    let ratio = errs[0] / errs[1];
    assert!(ratio > 12.0, "spline convergence ratio {ratio}");
    assert!(PeriodicSpline::fit(&[1.0, 2.0]).is_err());
}

#[test]
fn spline_derivative_matches_finite_difference() {
    let f = |s: f64| (2.0 * PI * s).sin();
    let m = 40;
    let y: Vec<f64> = (0..m).map(|k| f(k as f64 / m as f64)).collect();
    let sp = PeriodicSpline::fit(&y).unwrap();
    let eps = 1e-7;
    for j in 0..17 {
        let s = (j as f64 + 0.37) / 17.0;
        let fd = (sp.eval(s + eps) - sp.eval(s - eps)) / (2.0 * eps);
        assert!((sp.deriv(s) - fd).abs() < 1e-5);
    }
}

#[test]
fn spline_area_matches_dense_polygon_of_spline() {
    // An irregular smooth loop: the spline area must agree with the polygon
    // area of a very fine resampling of the same spline.
    let shape = |s: f64| {
        [
            0.5 + 0.3 * s.cos() + 0.02 * (3.0 * s).cos(),
            0.5 + 0.22 * s.sin() - 0.03 * (2.0 * s).sin(),
            0.0,
        ]
    };
    let pts = sample_closed(shape, 48);
    let a_spline = spline_area(&pts).unwrap();
    let dense = resample_curve(&pts, 200_000).unwrap();
    let a_dense = polygon_area(&dense);
    assert!(
        (a_spline - a_dense).abs() < 1e-9,
        "{a_spline} vs {a_dense}"
    );
}

#[test]
fn spline_area_of_circle_is_spectrally_accurate() {
    let r = 0.25;
    let pts = make_circle([0.5, 0.5, 0.0], r, 64).unwrap();
    let exact = PI * r * r;
    let err = (spline_area(&pts.markers.positions).unwrap() - exact).abs();
    assert!(err < 1e-7, "circle spline area error {err:e}");
    // far better than the polygon area at the same marker count
    let poly_err = (polygon_area(&pts.markers.positions) - exact).abs();
    assert!(err < 1e-3 * poly_err);
}

#[test]
fn mesh_volume_of_icosahedron_and_sphere() {
    let r = 0.2;
    let mesh = make_icosphere([0.5, 0.5, 0.5], r, 0);
    // icosahedron with circumradius r: edge a = 4r/sqrt(10+2 sqrt 5),
    // volume 5(3+sqrt 5)/12 a^3
    let a = 4.0 * r / (10.0 + 2.0 * 5.0f64.sqrt()).sqrt();
    let exact = 5.0 * (3.0 + 5.0f64.sqrt()) / 12.0 * a.powi(3);
    assert!((mesh_volume(&mesh) - exact).abs() < 1e-14);

    let fine = make_icosphere([0.5, 0.5, 0.5], r, 4);
    let ball = 4.0 / 3.0 * PI * r.powi(3);
    // inscribed polyhedron: volume deficit shrinks with the squared edge
    let rel = (mesh_volume(&fine) - ball).abs() / ball;
    assert!(rel < 5e-3, "refined icosphere volume off by {rel:e}");
    let finer = make_icosphere([0.5, 0.5, 0.5], r, 5);
    let rel2 = (mesh_volume(&finer) - ball).abs() / ball;
    assert!(rel2 < 0.3 * rel, "volume deficit not shrinking: {rel2:e} vs {rel:e}");
}

#[test]
fn mode_amplitude_recovers_perturbation() {
    let (r, eps, p, m) = (1.0, 0.05, 2usize, 256usize);
    let center = [2.5, 2.5, 0.0];
    let curve = make_perturbed_circle(center, r, eps, p, m).unwrap();
    let amp = mode_amplitude(&curve.markers.positions, center, p);
    assert!((amp - r * eps).abs() < 1e-12);
    // other modes are empty
    assert!(mode_amplitude(&curve.markers.positions, center, p + 1) < 1e-12);
}

#[test]
fn resampling_error_metric() {
    let shape = |s: f64| [0.5 + 0.3 * s.cos(), 0.5 + 0.2 * s.sin(), 0.0];
    let coarse = sample_closed(shape, 32);
    let fine = sample_closed(shape, 64);
    // same underlying loop: discrepancy is only spline resolution
    let err = successive_marker_error(&coarse, &fine, 128).unwrap();
    assert!(err < 1e-5, "same-shape resample error {err:e}");
    let self_err = successive_marker_error(&coarse, &coarse, 128).unwrap();
    assert!(self_err == 0.0);
    // a genuinely different loop is detected
    let other = sample_closed(|s| [0.5 + 0.31 * s.cos(), 0.5 + 0.2 * s.sin(), 0.0], 32);
    assert!(successive_marker_error(&coarse, &other, 128).unwrap() > 5e-3);
}

#[test]
fn timeseries_csv_and_queries() {
    let mut ts = TimeSeries::new(&["a", "b"]);
    ts.push(0.0, &[1.0, -2.0]);
    ts.push(0.5, &[3.0, 0.25]);
    assert_eq!(ts.last("a"), Some(3.0));
    assert_eq!(ts.max("b"), Some(0.25));
    assert_eq!(ts.last("missing"), None);
    let csv = ts.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,a,b"));
    assert_eq!(csv.lines().count(), 3);
    // full precision round trip
    let row: Vec<f64> = csv
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row, vec![0.5, 3.0, 0.25]);
}
