#![no_main]

use libfuzzer_sys::fuzz_target;
use std::sync::OnceLock;
use std::sync::Arc;

use genus2::qfield::{parse_qelem, qf_new, QuadField};

fn field() -> &'static Arc<QuadField> {
    static F: OnceLock<Arc<QuadField>> = OnceLock::new();
    F.get_or_init(|| qf_new(193).unwrap())
}

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(x) = parse_qelem(field(), text) {
            // a successful parse must round-trip
            let again = parse_qelem(field(), &x.to_string()).unwrap();
            assert_eq!(x, again);
        }
    }
});
