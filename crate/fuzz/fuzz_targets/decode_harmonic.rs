#![no_main]

use libfuzzer_sys::fuzz_target;
use phodge::json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(h) = json::decode_harmonic_datum(text, None) {
        assert_eq!(json::decode_harmonic_datum(&json::encode_harmonic_datum(&h), None).unwrap(), h);
    }
    if let Ok(pkg) = json::decode_package(text, None) {
        assert_eq!(json::decode_package(&json::encode_package(&pkg), None).unwrap(), pkg);
    }
});
