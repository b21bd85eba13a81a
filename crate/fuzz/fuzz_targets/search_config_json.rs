#![no_main]

use libfuzzer_sys::fuzz_target;
use nisim::gauss::Correlation;
use nisim::netsearch::SearchConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(config) = nisim::io::from_json::<SearchConfig>(data) {
        let text = serde_json::to_string(&config).unwrap();
        let back: SearchConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, config);
        for r in [-0.5, 0.3, 0.9] {
            let _ = config.validate(Correlation::new(r).unwrap());
        }
    }
});
