#![no_main]

use libfuzzer_sys::fuzz_target;
use nisim::discrete::{maximal_correlation, JointPmf};
use nisim::io::{joint_pmf, InputFormat};

fuzz_target!(|data: &[u8]| {
    let Some((&tag, rest)) = data.split_first() else { return };
    let format = if tag % 2 == 0 { InputFormat::Json } else { InputFormat::Csv };
    if let Ok(p) = joint_pmf(rest, format) {
        let text = serde_json::to_string(&p).unwrap();
        let back: JointPmf = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        // keep the SVD small
        if p.alphabet_x() * p.alphabet_y() <= 4096 {
            if let Ok(r) = maximal_correlation(&p) {
                assert!((-1e-9..=1.0 + 1e-9).contains(&r));
            }
        }
    }
});
