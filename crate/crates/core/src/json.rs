//! JSON documents for every value the CLI reads or writes.
//!
//! Each top-level document starts with a field header
//! `{"p": 3, "ext_degree": 1, "modulus": null, ...}`; `modulus` lists the
//! ascending coefficients of the monic modulus when `ext_degree > 1`. On
//! input the header may be omitted if the caller supplies a default field.
//! Series are strings in the grammar of [`crate::algebra::text`].

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::text::{format_series, parse_series};
use crate::algebra::{FieldSpec, SeriesMatrix, TruncSeries, Var};
use crate::cartier::{OneForm, TwistOneForm};
use crate::connection::{Connection, FHiggs};
use crate::error::{Error, Result};
use crate::harmonic::{CinvOutput, CorrespondencePackage, FrameKind, HarmonicDatum, Higgs};
use crate::hitchin::InvariantTuple;
use crate::spectral::{build_spectral, SpectralElement};
use crate::MAX_RANK;

/// Largest precision accepted on input.
pub const MAX_PRECISION: usize = 4096;

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
pub struct FieldHeader {
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default)]
    pub ext_degree: Option<usize>,
    #[serde(default)]
    pub modulus: Option<Vec<u64>>,
}

impl FieldHeader {
    pub fn of(field: FieldSpec) -> Self {
        FieldHeader {
            p: Some(field.p() as u64),
            ext_degree: Some(field.ext_degree()),
            modulus: field.modulus_coefficients(),
        }
    }

    /// The field named by the header, or `fallback` when `p` is absent.
    pub fn field(&self, fallback: Option<FieldSpec>) -> Result<FieldSpec> {
        let p = match (self.p, fallback) {
            (Some(p), _) => p,
            (None, Some(f)) if self.ext_degree.is_none() && self.modulus.is_none() => return Ok(f),
            _ => return Err(schema("p", "missing field p and no default field given")),
        };
        match (self.ext_degree.unwrap_or(1), &self.modulus) {
            (1, None) => FieldSpec::prime(p),
            (k, Some(m)) => {
                if m.len() != k + 1 {
                    return Err(schema("modulus", format!("expected {} coefficients for ext_degree {k}", k + 1)));
                }
                FieldSpec::extension(p, m)
            }
            (k, None) => Err(schema("modulus", format!("ext_degree {k} needs a modulus"))),
        }
    }
}

/// A top-level document: field header followed by the body's fields.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Doc<B> {
    #[serde(flatten)]
    pub field: FieldHeader,
    #[serde(flatten)]
    pub body: B,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct MatrixBody {
    pub var: String,
    pub precision: usize,
    pub rank: usize,
    pub matrix: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist_weight: Option<u32>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct InvariantsBody {
    pub var: String,
    pub rank: usize,
    pub precision: usize,
    pub entries: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist_weight: Option<u32>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct OneFormBody {
    pub var: String,
    pub precision: usize,
    pub coefficient: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct SeriesBody {
    pub var: String,
    pub precision: usize,
    pub series: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct SpectralBody {
    pub b: InvariantsBody,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<usize>,
    pub coeffs_in_lambda: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct HarmonicBody {
    pub b_prime: InvariantsBody,
    pub theta: SpectralBody,
    pub frame: String,
    #[serde(default)]
    pub inverse: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct PackageBody {
    pub connection: MatrixBody,
    pub higgs: MatrixBody,
    pub harmonic: HarmonicBody,
    pub gauge: MatrixBody,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CinvBody {
    pub frame: MatrixBody,
    pub higgs: MatrixBody,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

/// Parses a document, reporting the path of the first offending field.
pub fn parse_doc<B: DeserializeOwned>(text: &str) -> Result<Doc<B>> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn decode_var(text: &str, path: &str) -> Result<Var> {
    Var::parse(text).ok_or_else(|| schema(join(path, "var"), format!("unknown coordinate {text:?}")))
}

fn check_precision(precision: usize, path: &str) -> Result<()> {
    if precision > MAX_PRECISION {
        return Err(schema(join(path, "precision"), format!("precision {precision} exceeds {MAX_PRECISION}")));
    }
    Ok(())
}

fn check_rank(rank: usize, path: &str) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        return Err(schema(join(path, "rank"), format!("rank must be in 1..={MAX_RANK}")));
    }
    Ok(())
}

fn decode_series(text: &str, field: FieldSpec, var: Var, precision: usize, path: &str) -> Result<TruncSeries> {
    parse_series(text, field, var, precision).map_err(|e| schema(path, e.to_string()))
}

fn encode_matrix(m: &SeriesMatrix, twist_weight: Option<u32>) -> MatrixBody {
    MatrixBody {
        var: m.var().as_str().to_string(),
        precision: m.precision(),
        rank: m.rank(),
        matrix: m.rows().iter().map(|r| r.iter().map(format_series).collect()).collect(),
        twist_weight,
    }
}

fn decode_matrix(body: &MatrixBody, field: FieldSpec, path: &str) -> Result<SeriesMatrix> {
    let var = decode_var(&body.var, path)?;
    check_precision(body.precision, path)?;
    check_rank(body.rank, path)?;
    if body.matrix.len() != body.rank {
        return Err(schema(join(path, "matrix"), format!("expected {} rows, found {}", body.rank, body.matrix.len())));
    }
    let mut rows = Vec::with_capacity(body.rank);
    for (i, row) in body.matrix.iter().enumerate() {
        if row.len() != body.rank {
            return Err(schema(
                format!("{}[{i}]", join(path, "matrix")),
                format!("expected {} entries, found {}", body.rank, row.len()),
            ));
        }
        let entries = row
            .iter()
            .enumerate()
            .map(|(j, s)| decode_series(s, field, var, body.precision, &format!("{}[{i}][{j}]", join(path, "matrix"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(entries);
    }
    SeriesMatrix::from_rows(rows)
}

fn encode_invariants(b: &InvariantTuple) -> InvariantsBody {
    InvariantsBody {
        var: b.var().as_str().to_string(),
        rank: b.rank(),
        precision: b.precision(),
        entries: b.entries().iter().map(format_series).collect(),
        twist_weight: (b.twist_weight() != 1).then_some(b.twist_weight()),
    }
}

fn decode_invariants(body: &InvariantsBody, field: FieldSpec, path: &str) -> Result<InvariantTuple> {
    let var = decode_var(&body.var, path)?;
    check_precision(body.precision, path)?;
    check_rank(body.rank, path)?;
    if body.entries.len() != body.rank {
        return Err(schema(join(path, "entries"), format!("expected {} entries, found {}", body.rank, body.entries.len())));
    }
    let entries = body
        .entries
        .iter()
        .enumerate()
        .map(|(i, s)| decode_series(s, field, var, body.precision, &format!("{}[{i}]", join(path, "entries"))))
        .collect::<Result<Vec<_>>>()?;
    InvariantTuple::new(entries, body.twist_weight.unwrap_or(1))
}

fn encode_spectral(s: &SpectralElement) -> SpectralBody {
    SpectralBody {
        b: encode_invariants(s.ring().invariants()),
        precision: (s.precision() != s.ring().precision()).then_some(s.precision()),
        coeffs_in_lambda: s.coeffs().iter().map(format_series).collect(),
    }
}

fn decode_spectral(body: &SpectralBody, field: FieldSpec, path: &str) -> Result<SpectralElement> {
    let b = decode_invariants(&body.b, field, &join(path, "b"))?;
    let precision = body.precision.unwrap_or(b.precision());
    check_precision(precision, path)?;
    if body.coeffs_in_lambda.len() != b.rank() {
        return Err(schema(
            join(path, "coeffs_in_lambda"),
            format!("expected {} coefficients, found {}", b.rank(), body.coeffs_in_lambda.len()),
        ));
    }
    let coeffs = body
        .coeffs_in_lambda
        .iter()
        .enumerate()
        .map(|(i, s)| decode_series(s, field, b.var(), precision, &format!("{}[{i}]", join(path, "coeffs_in_lambda"))))
        .collect::<Result<Vec<_>>>()?;
    build_spectral(&b).element(coeffs)
}

fn encode_harmonic(h: &HarmonicDatum) -> HarmonicBody {
    HarmonicBody {
        b_prime: encode_invariants(h.b_prime()),
        theta: encode_spectral(h.theta()),
        frame: h.frame().as_str().to_string(),
        inverse: h.is_inverse(),
    }
}

fn decode_harmonic(body: &HarmonicBody, field: FieldSpec, path: &str) -> Result<HarmonicDatum> {
    let b_prime = decode_invariants(&body.b_prime, field, &join(path, "b_prime"))?;
    let theta = decode_spectral(&body.theta, field, &join(path, "theta"))?;
    let frame = FrameKind::parse(&body.frame)
        .ok_or_else(|| schema(join(path, "frame"), format!("unknown frame {:?}", body.frame)))?;
    HarmonicDatum::new(b_prime, theta, frame, body.inverse)
}

fn doc<B>(field: FieldSpec, body: B) -> Doc<B> {
    Doc { field: FieldHeader::of(field), body }
}

fn require_var(found: Var, wanted: Var, path: &str) -> Result<()> {
    if found != wanted {
        return Err(schema(join(path, "var"), format!("expected {wanted}, found {found}")));
    }
    Ok(())
}

pub fn encode_connection(c: &Connection) -> String {
    to_json(&doc(c.field(), encode_matrix(c.matrix(), None)))
}

pub fn decode_connection(text: &str, fallback: Option<FieldSpec>) -> Result<Connection> {
    let d: Doc<MatrixBody> = parse_doc(text)?;
    let field = d.field.field(fallback)?;
    let m = decode_matrix(&d.body, field, "")?;
    require_var(m.var(), Var::Z, "")?;
    Connection::new(m)
}

pub fn encode_fhiggs(h: &FHiggs) -> String {
    to_json(&doc(h.psi().field(), encode_matrix(h.psi(), Some(h.twist_weight()))))
}

/// Any square series matrix document (connections, F-Higgs fields,
/// Higgs fields, gauges).
pub fn decode_matrix_doc(text: &str, fallback: Option<FieldSpec>) -> Result<SeriesMatrix> {
    let d: Doc<MatrixBody> = parse_doc(text)?;
    let field = d.field.field(fallback)?;
    decode_matrix(&d.body, field, "")
}

/// A matrix document together with its twist weight (1 when absent).
pub fn decode_weighted_matrix(text: &str, fallback: Option<FieldSpec>) -> Result<(SeriesMatrix, u32)> {
    let d: Doc<MatrixBody> = parse_doc(text)?;
    let field = d.field.field(fallback)?;
    Ok((decode_matrix(&d.body, field, "")?, d.body.twist_weight.unwrap_or(1)))
}

pub fn decode_fhiggs(text: &str, fallback: Option<FieldSpec>) -> Result<FHiggs> {
    let (m, w) = decode_weighted_matrix(text, fallback)?;
    require_var(m.var(), Var::Z, "")?;
    if w != m.field().p() {
        return Err(schema("twist_weight", format!("an F-Higgs field has twist weight {}", m.field().p())));
    }
    FHiggs::new(m)
}

pub fn encode_matrix_doc(m: &SeriesMatrix) -> String {
    to_json(&doc(m.field(), encode_matrix(m, None)))
}

pub fn encode_higgs(h: &Higgs) -> String {
    encode_matrix_doc(h.phi())
}

pub fn decode_higgs(text: &str, fallback: Option<FieldSpec>) -> Result<Higgs> {
    let m = decode_matrix_doc(text, fallback)?;
    require_var(m.var(), Var::ZPrime, "")?;
    Higgs::new(m)
}

pub fn encode_invariant_tuple(b: &InvariantTuple) -> String {
    to_json(&doc(b.field(), encode_invariants(b)))
}

pub fn decode_invariant_tuple(text: &str, fallback: Option<FieldSpec>) -> Result<InvariantTuple> {
    let d: Doc<InvariantsBody> = parse_doc(text)?;
    let field = d.field.field(fallback)?;
    decode_invariants(&d.body, field, "")
}

pub fn encode_one_form(w: &OneForm) -> String {
    let s = w.coefficient();
    to_json(&doc(
        s.field(),
        OneFormBody { var: s.var().as_str().to_string(), precision: s.precision(), coefficient: format_series(s) },
    ))
}

pub fn encode_twist_form(w: &TwistOneForm) -> String {
    let s = w.coefficient();
    to_json(&doc(
        s.field(),
        OneFormBody { var: s.var().as_str().to_string(), precision: s.precision(), coefficient: format_series(s) },
    ))
}

fn decode_form_coefficient(text: &str, fallback: Option<FieldSpec>) -> Result<TruncSeries> {
    let d: Doc<OneFormBody> = parse_doc(text)?;
    let field = d.field.field(fallback)?;
    let var = decode_var(&d.body.var, "")?;
    check_precision(d.body.precision, "")?;
    decode_series(&d.body.coefficient, field, var, d.body.precision, "coefficient")
}

pub fn decode_one_form(text: &str, fallback: Option<FieldSpec>) -> Result<OneForm> {
    let s = decode_form_coefficient(text, fallback)?;
    require_var(s.var(), Var::Z, "")?;
    OneForm::new(s)
}

pub fn decode_twist_form(text: &str, fallback: Option<FieldSpec>) -> Result<TwistOneForm> {
    let s = decode_form_coefficient(text, fallback)?;
    require_var(s.var(), Var::ZPrime, "")?;
    TwistOneForm::new(s)
}

pub fn encode_series(s: &TruncSeries) -> String {
    to_json(&doc(
        s.field(),
        SeriesBody { var: s.var().as_str().to_string(), precision: s.precision(), series: format_series(s) },
    ))
}

pub fn decode_series_doc(text: &str, fallback: Option<FieldSpec>) -> Result<TruncSeries> {
    let d: Doc<SeriesBody> = parse_doc(text)?;
    let field = d.field.field(fallback)?;
    let var = decode_var(&d.body.var, "")?;
    check_precision(d.body.precision, "")?;
    decode_series(&d.body.series, field, var, d.body.precision, "series")
}

pub fn encode_spectral_element(s: &SpectralElement) -> String {
    to_json(&doc(s.field(), encode_spectral(s)))
}

pub fn decode_spectral_element(text: &str, fallback: Option<FieldSpec>) -> Result<SpectralElement> {
    let d: Doc<SpectralBody> = parse_doc(text)?;
    let field = d.field.field(fallback)?;
    decode_spectral(&d.body, field, "")
}

pub fn encode_harmonic_datum(h: &HarmonicDatum) -> String {
    to_json(&doc(h.theta().field(), encode_harmonic(h)))
}

/// Decodes a harmonic datum, re-verifying its certificates. A full
/// correspondence package is accepted too; its harmonic part is used.
pub fn decode_harmonic_datum(text: &str, fallback: Option<FieldSpec>) -> Result<HarmonicDatum> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| schema("", e.to_string()))?;
    if value.get("harmonic").is_some() {
        return Ok(decode_package(text, fallback)?.harmonic);
    }
    let d: Doc<HarmonicBody> = parse_doc(text)?;
    let field = d.field.field(fallback)?;
    decode_harmonic(&d.body, field, "")
}

pub fn encode_package(pkg: &CorrespondencePackage) -> String {
    let body = PackageBody {
        connection: encode_matrix(pkg.connection.matrix(), None),
        higgs: encode_matrix(pkg.higgs.phi(), None),
        harmonic: encode_harmonic(&pkg.harmonic),
        gauge: encode_matrix(&pkg.gauge, None),
    };
    to_json(&doc(pkg.connection.field(), body))
}

pub fn decode_package(text: &str, fallback: Option<FieldSpec>) -> Result<CorrespondencePackage> {
    let d: Doc<PackageBody> = parse_doc(text)?;
    let field = d.field.field(fallback)?;
    let connection = decode_matrix(&d.body.connection, field, "connection")?;
    require_var(connection.var(), Var::Z, "connection")?;
    let higgs = decode_matrix(&d.body.higgs, field, "higgs")?;
    require_var(higgs.var(), Var::ZPrime, "higgs")?;
    Ok(CorrespondencePackage {
        connection: Connection::new(connection)?,
        higgs: Higgs::new(higgs)?,
        harmonic: decode_harmonic(&d.body.harmonic, field, "harmonic")?,
        gauge: decode_matrix(&d.body.gauge, field, "gauge")?,
    })
}

pub fn encode_cinv(out: &CinvOutput) -> String {
    let body = CinvBody { frame: encode_matrix(&out.frame, None), higgs: encode_matrix(out.higgs.phi(), None) };
    to_json(&doc(out.frame.field(), body))
}

/// Accepts either a bare Higgs matrix document or a `cinv` output.
pub fn decode_higgs_side(text: &str, fallback: Option<FieldSpec>) -> Result<Higgs> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| schema("", e.to_string()))?;
    if value.get("frame").is_some() && value.get("higgs").is_some() {
        let d: Doc<CinvBody> = parse_doc(text)?;
        let field = d.field.field(fallback)?;
        let m = decode_matrix(&d.body.higgs, field, "higgs")?;
        require_var(m.var(), Var::ZPrime, "higgs")?;
        return Higgs::new(m);
    }
    decode_higgs(text, fallback)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONN: &str = r#"{"p":2,"ext_degree":1,"modulus":null,"var":"z","precision":12,"rank":2,"matrix":[["0","1"],["z","0"]]}"#;

    #[test]
    fn connection_round_trip() {
        let c = decode_connection(CONN, None).unwrap();
        assert_eq!(c.precision(), 12);
        let text = encode_connection(&c);
        assert_eq!(decode_connection(&text, None).unwrap(), c);
    }

    #[test]
    fn header_fallback() {
        let body = r#"{"var":"z","precision":4,"rank":1,"matrix":[["1 + z"]]}"#;
        assert!(matches!(decode_connection(body, None), Err(Error::Schema { .. })));
        let c = decode_connection(body, Some(FieldSpec::prime(5).unwrap())).unwrap();
        assert_eq!(c.p(), 5);
    }

    #[test]
    fn schema_paths() {
        let bad = r#"{"p":2,"var":"z","precision":4,"rank":2,"matrix":[["0","1"],["z","2"]]}"#;
        match decode_connection(bad, None) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "matrix[1][1]"),
            other => panic!("{other:?}"),
        }
        let bad = r#"{"p":2,"var":"z","precision":"4","rank":1,"matrix":[["0"]]}"#;
        assert!(matches!(decode_connection(bad, None), Err(Error::Schema { .. })));
        let bad = r#"{"p":2,"var":"w","precision":4,"rank":1,"matrix":[["0"]]}"#;
        match decode_connection(bad, None) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "var"),
            other => panic!("{other:?}"),
        }
        let bad = r#"{"p":4,"var":"z","precision":4,"rank":1,"matrix":[["0"]]}"#;
        assert!(matches!(decode_connection(bad, None), Err(Error::InvalidField(_))));
    }

    #[test]
    fn extension_header() {
        let text = r#"{"p":2,"ext_degree":2,"modulus":[1,1,1],"var":"z","precision":3,"coefficient":"[0,1]*z"}"#;
        let w = decode_one_form(text, None).unwrap();
        assert_eq!(w.field().ext_degree(), 2);
        assert_eq!(decode_one_form(&encode_one_form(&w), None).unwrap(), w);
        let missing = r#"{"p":2,"ext_degree":2,"var":"z","precision":3,"coefficient":"0"}"#;
        assert!(decode_one_form(missing, None).is_err());
    }

    #[test]
    fn invariants_shape() {
        let f = FieldSpec::prime(2).unwrap();
        let b = InvariantTuple::new(
            vec![TruncSeries::from_ints(f, Var::ZPrime, &[0], 6), TruncSeries::from_ints(f, Var::ZPrime, &[0, 1], 6)],
            1,
        )
        .unwrap();
        let text = encode_invariant_tuple(&b);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["var"], "z'");
        assert_eq!(v["entries"], serde_json::json!(["0", "z"]));
        assert_eq!(decode_invariant_tuple(&text, None).unwrap(), b);
    }
}
