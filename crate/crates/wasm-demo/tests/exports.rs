use entmeter_wasm_demo::{pure_summary, storage_rows, werner_rows};

#[test]
fn werner_rows_are_flat_triples() {
    let v = werner_rows(11, 0.5).unwrap();
    assert_eq!(v.len(), 33);
    let last = &v[30..];
    assert_eq!(last[0], 1.0);
    assert!((last[1] - 1.0).abs() < 1e-12 && (last[2] - 1.0).abs() < 1e-12);
    for row in v.chunks(3) {
        assert!(row[1] <= row[2] + 1e-12);
    }
}

#[test]
fn storage_decays_monotonically() {
    let v = storage_rows(1.0, 0.1, 8, 0.5).unwrap();
    assert_eq!(v.len(), 27);
    assert!((v[1] - 1.0).abs() < 1e-12);
    for pair in v.chunks(3).collect::<Vec<_>>().windows(2) {
        assert!(pair[1][1] <= pair[0][1] + 1e-12);
        assert!(pair[1][2] <= pair[0][2] + 1e-12);
    }
}

#[test]
fn pure_summary_tracks_angle() {
    let theta: f64 = 0.4;
    let v = pure_summary(theta, 1.3).unwrap();
    assert!((v[0] - (2.0 * theta).sin()).abs() < 1e-12);
    assert!((v[1] - (2.0 * theta).sin().powi(2) / 4.0).abs() < 1e-12);
    assert!((v[3] - v[0]).abs() < 1e-9);
}

#[test]
fn bad_parameters_are_reported() {
    assert!(werner_rows(11, 2.0).is_err());
    assert!(storage_rows(0.5, 1.5, 3, 0.5).is_err());
}
