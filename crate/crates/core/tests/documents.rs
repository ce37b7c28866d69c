use phodge::connection::{gauge, Connection};
use phodge::harmonic::{canonical_harmonic, cinv, inverse, solve_harmonic, Higgs};
use phodge::hitchin::{companion_section, InvariantTuple};
use phodge::json;
use phodge::{Error, FieldSpec, SeriesMatrix, TruncSeries, Var};

fn ser(p: u64, c: &[i64], n: usize) -> TruncSeries {
    TruncSeries::from_ints(FieldSpec::prime(p).unwrap(), Var::Z, c, n)
}

fn rank_two() -> Connection {
    let g = SeriesMatrix::from_rows(vec![vec![ser(3, &[1], 18), ser(3, &[0, 1], 18)], vec![ser(3, &[0, 2, 1], 18), ser(3, &[1, 1], 18)]]).unwrap();
    let base = SeriesMatrix::diagonal(&[ser(3, &[1], 18), ser(3, &[0, 0, 1], 18)]).unwrap();
    gauge(&g, &Connection::new(base).unwrap()).unwrap()
}

#[test]
fn package_round_trip() {
    let pkg = solve_harmonic(&rank_two()).unwrap();
    let text = json::encode_package(&pkg);
    assert_eq!(json::decode_package(&text, None).unwrap(), pkg);
    assert_eq!(json::decode_harmonic_datum(&text, None).unwrap(), pkg.harmonic);
    let h = json::encode_harmonic_datum(&pkg.harmonic);
    assert_eq!(json::decode_harmonic_datum(&h, None).unwrap(), pkg.harmonic);
    let v: serde_json::Value = serde_json::from_str(&h).unwrap();
    assert_eq!(v["frame"], "eigen");
    assert_eq!(v["b_prime"]["var"], "z'");
}

#[test]
fn cinv_and_higgs_documents() {
    let nabla = rank_two();
    let pkg = solve_harmonic(&nabla).unwrap();
    let out = cinv(&nabla, &inverse(&pkg.harmonic)).unwrap();
    let text = json::encode_cinv(&out);
    assert_eq!(json::decode_higgs_side(&text, None).unwrap(), out.higgs);
    let higgs = json::encode_higgs(&pkg.higgs);
    assert_eq!(json::decode_higgs(&higgs, None).unwrap(), pkg.higgs);
    // a Higgs field lives on the twist
    assert!(matches!(json::decode_higgs(&json::encode_connection(&nabla), None), Err(Error::Schema { .. })));
}

#[test]
fn spectral_and_inverse_documents() {
    let f = FieldSpec::prime(3).unwrap();
    let bp = InvariantTuple::new(
        vec![TruncSeries::from_ints(f, Var::ZPrime, &[1, 1], 4), TruncSeries::from_ints(f, Var::ZPrime, &[0, 1], 4)],
        1,
    )
    .unwrap();
    let h = canonical_harmonic(&bp).unwrap();
    let s = json::encode_spectral_element(h.theta());
    assert_eq!(json::decode_spectral_element(&s, None).unwrap(), *h.theta());
    let inv = inverse(&h);
    assert_eq!(json::decode_harmonic_datum(&json::encode_harmonic_datum(&inv), None).unwrap(), inv);
    let phi = Higgs::new(companion_section(&bp).unwrap()).unwrap();
    assert_eq!(json::decode_higgs(&json::encode_higgs(&phi), None).unwrap(), phi);
}

#[test]
fn tampered_theta_is_refused() {
    let pkg = solve_harmonic(&rank_two()).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&json::encode_harmonic_datum(&pkg.harmonic)).unwrap();
    v["theta"]["coeffs_in_lambda"][0] = serde_json::json!("1 + z^5");
    let err = json::decode_harmonic_datum(&v.to_string(), None).unwrap_err();
    assert!(matches!(err, Error::CurvatureNonzero { .. } | Error::InternalInconsistency { .. }), "{err:?}");
}

#[test]
fn precision_cap() {
    let text = format!(r#"{{"p":2,"var":"z","precision":{},"rank":1,"matrix":[["0"]]}}"#, json::MAX_PRECISION + 1);
    match json::decode_connection(&text, None) {
        Err(Error::Schema { path, .. }) => assert_eq!(path, "precision"),
        other => panic!("{other:?}"),
    }
}
