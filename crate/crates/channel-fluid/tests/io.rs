use channel_fluid::io::*;
use channel_fluid::*;
use ndarray::Array2;

fn geom() -> ChannelGeometry {
    ChannelGeometry::new(2.0, 0.9, 16, 16).unwrap()
}

fn sample_rows() -> Vec<Diagnostics> {
    (0..4)
        .map(|i| Diagnostics {
            t: 0.1 * i as f64,
            energy: 1.0 / 3.0 + i as f64,
            enstrophy: std::f64::consts::PI,
            pert_enstrophy: 1e-300 * i as f64,
            circulation: -2.5e-17,
            h2: -5.078e-7,
            p_norm: 0.0,
        })
        .collect()
}

#[test]
fn snapshot_round_trips_bit_exactly() {
    let g = geom();
    let w = FluidState::perturbed(&g, 0.3, 1).omega;
    let bytes = encode_snapshot("omega", &g, 1.25, w.view()).unwrap();
    let header_end = bytes.iter().position(|&b| b == b'\n').unwrap();
    assert_eq!(
        std::str::from_utf8(&bytes[..header_end]).unwrap(),
        "GEOFLOW-FIELD v1 name=omega Nx=16 Ny=16 X=2 Y=0.9 t=1.25"
    );
    assert_eq!(bytes.len() - header_end - 1, 17 * 16 * 8);
    // First value, little endian, row y = 0 first.
    assert_eq!(&bytes[header_end + 1..header_end + 9], &w[[0, 0]].to_le_bytes());
    let s = decode_snapshot(&bytes).unwrap();
    assert_eq!((s.nx, s.ny, s.x_len, s.y_len, s.t), (16, 16, 2.0, 0.9, 1.25));
    assert_eq!(s.name, "omega");
    assert_eq!(s.data, w);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("omega.bin");
    write_snapshot(&path, "omega", &g, 1.25, w.view()).unwrap();
    assert_eq!(read_snapshot(&path).unwrap(), s);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1, "no temporary left behind");
}

#[test]
fn malformed_snapshots_are_rejected() {
    let g = geom();
    let w = Array2::zeros((17, 16));
    let bytes = encode_snapshot("w", &g, 0.0, w.view()).unwrap();
    let err = decode_snapshot(&bytes[..bytes.len() - 8]).unwrap_err().to_string();
    assert!(err.contains("2168") && err.contains("2176"), "{err}");
    let mut wrong_tag = bytes.clone();
    wrong_tag[15] = b'2';
    assert!(decode_snapshot(&wrong_tag).is_err());
    assert!(decode_snapshot(b"no newline").is_err());
    assert!(encode_snapshot("two words", &g, 0.0, w.view()).is_err());
    assert!(encode_snapshot("w", &g, 0.0, Array2::zeros((16, 16)).view()).is_err());
}

#[test]
fn time_series_round_trips() {
    let rows = sample_rows();
    let bytes = encode_timeseries(&rows).unwrap();
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.starts_with("t,energy,enstrophy,pert_enstrophy,circulation,H2,p_norm\n"));
    assert_eq!(text.lines().count(), 5);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    write_timeseries(&path, &rows).unwrap();
    assert_eq!(read_timeseries(&path).unwrap(), rows);
}

#[test]
fn time_series_with_a_foreign_header_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "t,energy\n0,1\n").unwrap();
    assert!(matches!(read_timeseries(&path), Err(FluidError::Format(_))));
}
