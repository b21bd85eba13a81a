use std::path::Path;

use nisim::io::*;
use nisim::Error;

#[test]
fn format_from_extension() {
    assert_eq!(InputFormat::from_path(Path::new("a/target.csv")), InputFormat::Csv);
    assert_eq!(InputFormat::from_path(Path::new("T.CSV")), InputFormat::Csv);
    assert_eq!(InputFormat::from_path(Path::new("target.json")), InputFormat::Json);
    assert_eq!(InputFormat::from_path(Path::new("target")), InputFormat::Json);
}

#[test]
fn csv_rows() {
    let rows = matrix_from_csv(b"# header comment\n 0.25 , 0.25\n0.5,0\n").unwrap();
    assert_eq!(rows, vec![vec![0.25, 0.25], vec![0.5, 0.0]]);
    assert!(matches!(matrix_from_csv(b""), Err(Error::Format(_))));
    assert!(matches!(matrix_from_csv(b"0.5,x\n"), Err(Error::Format(_))));
}

#[test]
fn csv_and_json_agree() {
    let a = distribution_matrix(b"0.1,0.2\n0.3,0.4\n", InputFormat::Csv).unwrap();
    let b = distribution_matrix(b"[[0.1,0.2],[0.3,0.4]]", InputFormat::Json).unwrap();
    assert_eq!(a, b);
    let p = joint_pmf(b"0.5,0\n0,0.5", InputFormat::Csv).unwrap();
    let q = joint_pmf(br#"{"alphabet_x":2,"alphabet_y":2,"mass":[[0.5,0],[0,0.5]]}"#, InputFormat::Json).unwrap();
    assert_eq!(p, q);
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(distribution_matrix(b"0.1,0.2\n0.3\n", InputFormat::Csv).is_err());
    assert!(distribution_matrix(b"0.5,0.6\n0,0\n", InputFormat::Csv).is_err());
    assert!(matches!(distribution_matrix(b"{", InputFormat::Json), Err(Error::Format(_))));
    assert!(joint_pmf(b"-0.5,1.5\n", InputFormat::Csv).is_err());
}
