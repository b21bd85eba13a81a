//! Both input encodings of a target matrix. The first byte picks the format.

#![no_main]

use libfuzzer_sys::fuzz_target;
use nisim::io::{distribution_matrix, InputFormat};
use nisim::stability::DistributionMatrix;

fuzz_target!(|data: &[u8]| {
    let Some((&tag, rest)) = data.split_first() else { return };
    let format = if tag % 2 == 0 { InputFormat::Json } else { InputFormat::Csv };
    if let Ok(d) = distribution_matrix(rest, format) {
        let sum: f64 = d.entries().iter().sum();
        assert!((sum - 1.0).abs() < 1e-6);
        assert!(d.entries().iter().all(|v| *v >= 0.0));
        let text = serde_json::to_string(&d).unwrap();
        let back: DistributionMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }
});
