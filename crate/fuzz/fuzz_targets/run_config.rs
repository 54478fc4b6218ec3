//! Fuzz the flat key = value config parser and the RunConfig builder.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qsarkit::pipeline::ConfigBuilder;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(builder) = ConfigBuilder::from_config_text(text) {
            // Building may fail on missing/conflicting keys, never panic.
            let _ = builder.build();
        }
    }
});
