use gpscat::compare::{curve, is_unimodal, success, sweep, Axis, Method, SweepSpec};
use gpscat::gauss_core::db_to_r;

#[test]
fn sweep_rows_follow_the_grid() {
    let spec = SweepSpec::new(
        vec![Method::Gps, Method::Homodyne],
        Axis::Decibel,
        (1.0, 3.0, 0.5),
        vec![2, 4],
        1e8,
    )
    .unwrap();
    let points = sweep(&spec);
    assert_eq!(points.len(), 5 * 2 * 2);
    assert_eq!(points[0].axis_value, 1.0);
    assert_eq!(points[0].method, Method::Gps);
    assert_eq!(points[3].method, Method::Homodyne);
    assert_eq!(points[3].n, 4);
    assert_eq!(points[4].axis_value, 1.5);
    for p in &points {
        let res = p.outcome.as_ref().unwrap();
        assert_eq!(res.rate, res.probability * 1e8);
        let direct = success(p.method, db_to_r(p.axis_value), p.n).unwrap();
        assert_eq!(direct.probability, res.probability);
    }
}

#[test]
fn gps_curves_peak_once() {
    let spec = SweepSpec::new(
        vec![Method::Gps],
        Axis::Squeezing,
        (0.05, 2.5, 0.05),
        vec![5, 10],
        1e8,
    )
    .unwrap();
    let points = sweep(&spec);
    for n in [5, 10] {
        let values: Vec<f64> = curve(&points, Method::Gps, n)
            .into_iter()
            .map(|(_, p)| p)
            .collect();
        assert!(is_unimodal(&values), "n={n}");
    }
}

#[test]
fn gps_beats_conventional_by_orders_of_magnitude() {
    let r = db_to_r(10.0);
    let gps = success(Method::Gps, r, 10).unwrap().probability;
    let conv = success(Method::Conventional, r, 10).unwrap().probability;
    assert!(gps / conv >= 1e3, "{}", gps / conv);
}
