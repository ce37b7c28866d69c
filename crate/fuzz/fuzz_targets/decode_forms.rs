#![no_main]

use libfuzzer_sys::fuzz_target;
use phodge::json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(w) = json::decode_one_form(text, None) {
        assert_eq!(json::decode_one_form(&json::encode_one_form(&w), None).unwrap(), w);
    }
    if let Ok(w) = json::decode_twist_form(text, None) {
        assert_eq!(json::decode_twist_form(&json::encode_twist_form(&w), None).unwrap(), w);
    }
    if let Ok(s) = json::decode_series_doc(text, None) {
        assert_eq!(json::decode_series_doc(&json::encode_series(&s), None).unwrap(), s);
    }
});
