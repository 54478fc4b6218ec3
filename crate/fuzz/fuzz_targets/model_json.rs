//! Fuzz external-model loading. Models that validate must predict without
//! panicking and survive a serialize/deserialize round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qsarkit::regression::FittedModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(model) = FittedModel::from_json(data) {
        let zeros: Vec<f64> = vec![0.0; model.spec.descriptors.len()];
        let pred = model.predict_slice(&zeros).unwrap();
        assert_eq!(pred, model.intercept);

        let json = model.to_json();
        let back = FittedModel::from_json(json.as_bytes()).unwrap();
        assert_eq!(model, back);
    }
});
