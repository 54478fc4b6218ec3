//! Fuzz deserialization of saved split assignments.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qsarkit::split::SplitAssignment;

fuzz_target!(|data: &[u8]| {
    if let Ok(split) = serde_json::from_slice::<SplitAssignment>(data) {
        let _ = split.n_train();
        let _ = split.n_test();
        // JSON has no encoding for non-finite floats, so only finite
        // assignments are expected to round-trip.
        if split.dissimilarity.is_finite() && split.radius.is_finite() {
            let json = serde_json::to_vec(&split).unwrap();
            let back: SplitAssignment = serde_json::from_slice(&json).unwrap();
            assert_eq!(split, back);
        }
    }
});
