#![no_main]

use libfuzzer_sys::fuzz_target;
use phodge::json;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = json::decode_matrix_doc(text, None) {
        assert_eq!(json::decode_matrix_doc(&json::encode_matrix_doc(&m), None).unwrap(), m);
    }
    if let Ok(h) = json::decode_fhiggs(text, None) {
        assert_eq!(json::decode_fhiggs(&json::encode_fhiggs(&h), None).unwrap(), h);
    }
    let _ = json::decode_higgs_side(text, None);
});
