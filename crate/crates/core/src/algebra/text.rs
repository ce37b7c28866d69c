//! Text form of series.
//!
//! Grammar: terms `c`, `c*z^k`, `c*z`, `z^k`, `z` joined by `+`, where `c` is
//! an integer in `0..p` or, for `k > 1`, a digit vector `[a0,...,a_{k-1}]` in
//! the modulus basis. `z'` is accepted as the symbol for `z'`-series.
//! Repeated exponents are summed; terms at or beyond the precision are
//! dropped.
//!
//! Canonical output lists terms by ascending exponent, omits zero terms and
//! unit coefficients, always writes the symbol as `z`, and prints the zero
//! series as `0`.

use crate::algebra::field::{Fe, FieldSpec};
use crate::algebra::series::{TruncSeries, Var};

/// Exponents above this are rejected outright.
pub const MAX_EXPONENT: u64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{message} (at byte {offset})")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

pub fn format_fe(field: FieldSpec, c: Fe) -> String {
    if field.ext_degree() == 1 {
        return c.digits()[0].to_string();
    }
    let digits: Vec<String> = c.digits()[..field.ext_degree()].iter().map(|d| d.to_string()).collect();
    format!("[{}]", digits.join(","))
}

pub fn format_series(s: &TruncSeries) -> String {
    let field = s.field();
    let terms: Vec<String> = s
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, &c)| match (m, c == field.one()) {
            (0, _) => format_fe(field, c),
            (1, true) => "z".to_string(),
            (1, false) => format!("{}*z", format_fe(field, c)),
            (_, true) => format!("z^{m}"),
            (_, false) => format!("{}*z^{m}", format_fe(field, c)),
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { offset: self.pos, message: message.into() }
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        // digits only, so the slice is valid UTF-8
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<u64>().map_err(|_| ParseError { offset: start, message: "integer too large".into() })
    }
}

fn parse_coefficient(cur: &mut Cursor<'_>, field: FieldSpec) -> Result<Fe, ParseError> {
    if cur.eat(b'[') {
        if field.ext_degree() == 1 {
            return Err(cur.err("vector coefficients require an extension field"));
        }
        let mut digits = Vec::new();
        loop {
            let at = cur.pos;
            let d = cur.integer()?;
            if d >= field.p() as u64 {
                return Err(ParseError { offset: at, message: format!("digit {d} is not below p = {}", field.p()) });
            }
            digits.push(d);
            if cur.eat(b']') {
                break;
            }
            if !cur.eat(b',') {
                return Err(cur.err("expected ',' or ']'"));
            }
        }
        if digits.len() != field.ext_degree() {
            return Err(cur.err(format!(
                "coefficient vector has {} digits, field has degree {}",
                digits.len(),
                field.ext_degree()
            )));
        }
        return field.from_digits(&digits).ok_or_else(|| cur.err("invalid coefficient vector"));
    }
    let at = cur.pos;
    let c = cur.integer()?;
    if c >= field.p() as u64 {
        return Err(ParseError { offset: at, message: format!("coefficient {c} is not below p = {}", field.p()) });
    }
    Ok(field.from_u64(c))
}

fn parse_symbol(cur: &mut Cursor<'_>, var: Var) -> Result<u64, ParseError> {
    if !cur.eat(b'z') {
        return Err(cur.err("expected 'z'"));
    }
    if cur.src.get(cur.pos) == Some(&b'\'') {
        if var != Var::ZPrime {
            return Err(cur.err("symbol z' used in a z-series"));
        }
        cur.pos += 1;
    }
    if cur.eat(b'^') {
        let at = cur.pos;
        let e = cur.integer()?;
        if e > MAX_EXPONENT {
            return Err(ParseError { offset: at, message: "exponent too large".into() });
        }
        Ok(e)
    } else {
        Ok(1)
    }
}

/// Parses the text form into a series of the given precision.
pub fn parse_series(text: &str, field: FieldSpec, var: Var, precision: usize) -> Result<TruncSeries, ParseError> {
    let mut cur = Cursor { src: text.as_bytes(), pos: 0 };
    let mut coeffs = vec![Fe::ZERO; precision];
    loop {
        let (c, e) = match cur.peek() {
            Some(b'z') => (field.one(), parse_symbol(&mut cur, var)?),
            Some(b'[') | Some(b'0'..=b'9') => {
                let c = parse_coefficient(&mut cur, field)?;
                if cur.eat(b'*') {
                    (c, parse_symbol(&mut cur, var)?)
                } else {
                    (c, 0)
                }
            }
            Some(_) => return Err(cur.err("unexpected character")),
            None => return Err(cur.err("expected a term")),
        };
        if (e as usize) < precision {
            let slot = &mut coeffs[e as usize];
            *slot = field.add(*slot, c);
        }
        match cur.peek() {
            None => break,
            Some(b'+') => {
                cur.pos += 1;
            }
            Some(_) => return Err(cur.err("expected '+' or end of input")),
        }
    }
    Ok(TruncSeries::new(field, var, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_forms() {
        let f = FieldSpec::prime(3).unwrap();
        let s = parse_series("z^3 + 2 + 2*z^3 + z", f, Var::Z, 5).unwrap();
        assert_eq!(format_series(&s), "2 + z");
        let s = parse_series("0", f, Var::Z, 5).unwrap();
        assert_eq!(format_series(&s), "0");
        let s = parse_series(" 2*z^2+1 ", f, Var::ZPrime, 2).unwrap();
        assert_eq!(format_series(&s), "1");
        let s = parse_series("z'^1", f, Var::ZPrime, 4).unwrap();
        assert_eq!(format_series(&s), "z");
    }

    #[test]
    fn vector_coefficients() {
        let f4 = FieldSpec::extension(2, &[1, 1, 1]).unwrap();
        let s = parse_series("[0,1]*z + [1,0]", f4, Var::Z, 3).unwrap();
        assert_eq!(format_series(&s), "[1,0] + [0,1]*z");
        assert!(parse_series("[0,1,1]", f4, Var::Z, 3).is_err());
        assert_eq!(format_series(&parse_series("1*z", f4, Var::Z, 3).unwrap()), "z");
    }

    #[test]
    fn rejects_malformed_input() {
        let f = FieldSpec::prime(5).unwrap();
        for bad in ["", "+", "z^", "5", "2*", "z'", "3z", "1 + + 2", "z^99999999999999999999999", "[1]"] {
            assert!(parse_series(bad, f, Var::Z, 4).is_err(), "{bad:?}");
        }
    }

    proptest! {
        #[test]
        fn format_then_parse_is_identity(
            p in prop::sample::select(vec![2u64, 3, 5, 7]),
            raw in prop::collection::vec(0u64..1000, 0..12),
            prime_var in any::<bool>(),
        ) {
            let f = FieldSpec::prime(p).unwrap();
            let var = if prime_var { Var::ZPrime } else { Var::Z };
            let s = TruncSeries::new(f, var, raw.iter().map(|&c| f.from_u64(c)).collect());
            let back = parse_series(&format_series(&s), f, var, s.precision()).unwrap();
            prop_assert_eq!(back, s);
        }

        #[test]
        fn parser_never_panics(text in "\\PC{0,40}") {
            let f = FieldSpec::prime(3).unwrap();
            let _ = parse_series(&text, f, Var::ZPrime, 6);
        }
    }
}
