//! Every checked-in fuzz seed goes through the same reader its fuzz target uses.
//! Seeds whose names start with a known-bad prefix must be rejected; the rest must parse.

use std::fs;
use std::path::{Path, PathBuf};

use nisim::discrete::{DiscreteDecision, JointPmf};
use nisim::io::{self, InputFormat};
use nisim::netsearch::{GaussianDecision, SearchConfig};
use nisim::stability::{CellFunction, DistributionMatrix};
use nisim::variational::{PartitionGrid, QuadraticObjective};

const BAD: [&str; 6] = ["bad", "unknown", "ragged", "nan", "negative", "zero"];

fn seeds(target: &str) -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<PathBuf> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds in {}", dir.display());
    out
}

fn tagged(bytes: &[u8]) -> (InputFormat, &[u8]) {
    let (&tag, rest) = bytes.split_first().unwrap();
    (if tag % 2 == 0 { InputFormat::Json } else { InputFormat::Csv }, rest)
}

fn check<T>(target: &str, parse: impl Fn(&[u8]) -> nisim::Result<T>) {
    for path in seeds(target) {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let result = parse(&fs::read(&path).unwrap());
        if BAD.iter().any(|b| name.starts_with(b)) {
            assert!(result.is_err(), "{target}/{name} should be rejected");
        } else if let Err(e) = result {
            panic!("{target}/{name}: {e}");
        }
    }
}

fn round_trip<T: serde::de::DeserializeOwned + serde::Serialize + PartialEq + std::fmt::Debug>(b: &[u8]) -> nisim::Result<T> {
    let v: T = io::from_json(b)?;
    let back: T = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(back, v);
    Ok(v)
}

#[test]
fn seeds_parse_as_labelled() {
    check("cell_function_json", round_trip::<CellFunction>);
    check("distribution_matrix", |b| {
        let (format, rest) = tagged(b);
        io::distribution_matrix(rest, format).and_then(|d| round_trip::<DistributionMatrix>(serde_json::to_string(&d).unwrap().as_bytes()))
    });
    check("joint_pmf", |b| {
        let (format, rest) = tagged(b);
        io::joint_pmf(rest, format).and_then(|p| round_trip::<JointPmf>(serde_json::to_string(&p).unwrap().as_bytes()))
    });
    check("quadratic_objective_json", round_trip::<QuadraticObjective>);
    check("partition_json", round_trip::<PartitionGrid>);
    check("search_config_json", round_trip::<SearchConfig>);
    check("decision_json", |b| round_trip::<GaussianDecision>(b).map(|_| ()).or_else(|_| round_trip::<DiscreteDecision>(b).map(|_| ())));
}
