#![no_main]

use libfuzzer_sys::fuzz_target;
use phodge::json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(b) = json::decode_invariant_tuple(text, None) {
        let again = json::decode_invariant_tuple(&json::encode_invariant_tuple(&b), None).unwrap();
        assert_eq!(again, b);
    }
});
