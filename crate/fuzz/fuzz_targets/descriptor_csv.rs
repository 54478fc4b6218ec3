//! Fuzz the descriptor-table parser. Accepted matrices must hold their
//! shape and uniqueness invariants.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qsarkit::ingest::parse_descriptor_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(matrix) = parse_descriptor_csv(data) {
        assert_eq!(matrix.values.rows(), matrix.compound_ids.len());
        assert_eq!(matrix.values.cols(), matrix.descriptor_names.len());
        assert!(matrix.values.all_finite());
        assert!(matrix.n_compounds() > 0);
        assert!(matrix.n_descriptors() > 0);
    }
});
