#![no_main]

use libfuzzer_sys::fuzz_target;
use nisim::discrete::DiscreteDecision;
use nisim::netsearch::GaussianDecision;

fuzz_target!(|data: &[u8]| {
    if let Ok(d) = nisim::io::from_json::<GaussianDecision>(data) {
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<GaussianDecision>(&text).unwrap(), d);
    }
    if let Ok(d) = nisim::io::from_json::<DiscreteDecision>(data) {
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<DiscreteDecision>(&text).unwrap(), d);
    }
});
