#![no_main]

use libfuzzer_sys::fuzz_target;
use phodge::algebra::text::{format_series, parse_series};
use phodge::{FieldSpec, Var};

// first byte picks the field and coordinate, second the precision
fuzz_target!(|data: &[u8]| {
    let [sel, prec, rest @ ..] = data else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let p = [2, 3, 5, 7][(sel & 3) as usize];
    let field = if sel & 4 == 0 {
        FieldSpec::prime(p).unwrap()
    } else {
        FieldSpec::extension(2, &[1, 1, 1]).unwrap()
    };
    let var = if sel & 8 == 0 { Var::Z } else { Var::ZPrime };
    if let Ok(s) = parse_series(text, field, var, *prec as usize) {
        let again = parse_series(&format_series(&s), field, var, *prec as usize).expect("canonical text parses");
        assert_eq!(again, s);
    }
});
