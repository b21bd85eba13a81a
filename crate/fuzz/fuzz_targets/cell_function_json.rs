#![no_main]

use libfuzzer_sys::fuzz_target;
use nisim::stability::CellFunction;

fuzz_target!(|data: &[u8]| {
    if let Ok(f) = nisim::io::from_json::<CellFunction>(data) {
        let text = serde_json::to_string(&f).unwrap();
        let back: CellFunction = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let masses = f.component_masses();
        assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
});
