//! Fuzz the activity-table parser with arbitrary bytes, under both
//! ic50-sign policies. Parsing must never panic; accepted tables must
//! satisfy the record invariants.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qsarkit::ingest::{parse_activity_csv, IngestOptions};

fuzz_target!(|data: &[u8]| {
    for abs_ic50 in [false, true] {
        if let Ok(records) = parse_activity_csv(data, &IngestOptions { abs_ic50 }) {
            for record in &records {
                assert!(!record.id.is_empty());
                assert!(record.pic50.is_finite());
                if let Some(ic50) = record.ic50 {
                    assert!(ic50.is_finite());
                }
            }
        }
    }
});
