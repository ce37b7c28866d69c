#![no_main]

use libfuzzer_sys::fuzz_target;
use phodge::json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = json::decode_spectral_element(text, None) {
        let again = json::decode_spectral_element(&json::encode_spectral_element(&s), None).unwrap();
        assert!(again.eq_within(&s));
    }
});
