use nalgebra::DMatrix;
use proxdist_cli::io::*;

#[test]
fn csv_parses_rows() {
    let m = parse_matrix_csv("1,2\n3,4\n").unwrap();
    assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
    let m = parse_matrix_csv(" 1.5 , -2e-3\n\n7,8\n").unwrap();
    assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.5, -2e-3, 7.0, 8.0]));
}

#[test]
fn csv_errors_name_the_line() {
    let e = parse_matrix_csv("1,2\n3\n").unwrap_err().to_string();
    assert!(e.contains("line 2"), "{e}");
    let e = parse_matrix_csv("1,2\n3,4\n5,x\n").unwrap_err().to_string();
    assert!(e.contains("line 3"), "{e}");
    assert!(parse_matrix_csv("").is_err());
}

#[test]
fn csv_text_round_trip() {
    let m = DMatrix::from_row_slice(2, 3, &[0.1, -1e-17, 3.0, 1.0 / 3.0, 2.5e10, -7.0]);
    assert_eq!(parse_matrix_csv(&format_matrix_csv(&m)).unwrap(), m);
}

#[test]
fn p2_scales_to_unit_interval() {
    let img = parse_pgm(b"P2\n# a comment\n3 2\n255\n0 255 51\n102 # mid-raster\n 204 255\n").unwrap();
    assert_eq!(img.maxval, 255);
    assert_eq!(img.pixels.shape(), (2, 3));
    assert_eq!(img.pixels[(0, 1)], 1.0);
    assert_eq!(img.pixels[(0, 2)], 0.2);
    assert_eq!(img.pixels[(1, 0)], 0.4);
}

#[test]
fn p5_round_trip_is_byte_identical() {
    let mut bytes = b"P5\n16 16\n255\n".to_vec();
    bytes.extend((0..256u32).map(|i| ((i * 37) % 256) as u8));
    let img = parse_pgm(&bytes).unwrap();
    assert_eq!(encode_pgm(&img), bytes);

    let mut wide = b"P5\n2 1\n1000\n".to_vec();
    wide.extend_from_slice(&999u16.to_be_bytes());
    wide.extend_from_slice(&7u16.to_be_bytes());
    let img = parse_pgm(&wide).unwrap();
    assert_eq!(img.pixels[(0, 0)], 0.999);
    assert_eq!(encode_pgm(&img), wide);
}

#[test]
fn pgm_rejects_malformed() {
    assert!(parse_pgm(b"P6\n1 1\n255\n\0\0\0").is_err());
    assert!(parse_pgm(b"P5\n4 4\n255\n\0\0").is_err());
    assert!(parse_pgm(b"P2\n1 1\n0\n0\n").is_err());
    assert!(parse_pgm(b"P2\n1 1\n10\n11\n").is_err());
    assert!(parse_pgm(b"P2\n2 1\n10\n1\n").is_err());
}
