#![no_main]

use libfuzzer_sys::fuzz_target;
use nisim::variational::QuadraticObjective;

fuzz_target!(|data: &[u8]| {
    if let Ok(obj) = nisim::io::from_json::<QuadraticObjective>(data) {
        let text = serde_json::to_string(&obj).unwrap();
        let back: QuadraticObjective = serde_json::from_str(&text).unwrap();
        assert_eq!(back, obj);
    }
});
