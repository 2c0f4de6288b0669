#![no_main]

use libfuzzer_sys::fuzz_target;
use std::sync::OnceLock;
use std::sync::Arc;

use genus2::qfield::{qf_new, QuadField};

fn field() -> &'static Arc<QuadField> {
    static F: OnceLock<Arc<QuadField>> = OnceLock::new();
    F.get_or_init(|| qf_new(53).unwrap())
}

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = genus2::curve::parse_curve_json(field(), text);
        let _ = genus2::matching::parse_curves_json(text);
    }
});
