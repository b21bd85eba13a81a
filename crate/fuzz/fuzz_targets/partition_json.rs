#![no_main]

use libfuzzer_sys::fuzz_target;
use nisim::variational::PartitionGrid;

fuzz_target!(|data: &[u8]| {
    if let Ok(p) = nisim::io::from_json::<PartitionGrid>(data) {
        let text = serde_json::to_string(&p).unwrap();
        let back: PartitionGrid = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        let (f, g) = p.to_cell_functions();
        assert_eq!(f.m(), p.m());
        assert_eq!(g.grid(), p.grid());
    }
});
