#![no_main]

use libfuzzer_sys::fuzz_target;
use phodge::json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = json::decode_connection(text, None) {
        assert_eq!(json::decode_connection(&json::encode_connection(&c), None).unwrap(), c);
    }
});
