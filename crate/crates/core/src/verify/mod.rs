//! Deterministic randomized verification suites.
//!
//! Every trial draws its instance from a SplitMix64 stream derived from
//! `(seed, suite, p, rank, trial)`, so a report depends only on its
//! parameters. Groups of trials run on separate threads and are merged in
//! a fixed order.

pub mod gen;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{FieldSpec, SeriesMatrix, TruncSeries, Var};
use crate::cartier::{flat_sections, hp, kernel_unit, solve_hp, OneForm, TwistOneForm};
use crate::connection::{check_horizontality, dlog, gauge, pcurv, Connection};
use crate::error::{Error, Result};
use crate::harmonic::{canonical_harmonic, check_equations, cinv, cmap, inverse, solve_harmonic, CorrespondencePackage};
use crate::hitchin::{char_invariants, companion_section, phitchin};
use crate::json;
use crate::rng::SplitMix64;
use crate::MAX_RANK;

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Pcurv,
    Hitchin,
    Cartier,
    Exactness,
    Harmonic,
    Roundtrip,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Pcurv, Suite::Hitchin, Suite::Cartier, Suite::Exactness, Suite::Harmonic, Suite::Roundtrip];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Pcurv => "pcurv",
            Suite::Hitchin => "hitchin",
            Suite::Cartier => "cartier",
            Suite::Exactness => "exactness",
            Suite::Harmonic => "harmonic",
            Suite::Roundtrip => "roundtrip",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        [Suite::All].iter().chain(Suite::EACH.iter()).copied().find(|x| x.as_str() == s)
    }

    fn label(&self) -> u64 {
        *self as u64
    }

    /// Precision used when none is given.
    pub fn default_precision(&self, p: usize) -> usize {
        match self {
            Suite::Harmonic | Suite::Roundtrip => 4 * p + 4,
            _ => 3 * p + 4,
        }
    }

    fn per_rank(&self) -> bool {
        !matches!(self, Suite::Exactness)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub p: Vec<u64>,
    pub rank: Vec<usize>,
    pub precision: Option<usize>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct PropertyCount {
    pub name: String,
    pub pass: usize,
    pub fail: usize,
}

/// The first failing trial: where it came from, its input and the residual.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub property: String,
    pub p: u64,
    pub rank: usize,
    pub trial: usize,
    pub input: Value,
    pub detail: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Skipped {
    pub suite: String,
    pub p: u64,
    pub rank: usize,
    pub reason: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub suite: String,
    pub parameters: Params,
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub properties: Vec<PropertyCount>,
    pub skipped: Vec<Skipped>,
    pub first_failure: Option<Certificate>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.fail == 0
    }

    pub fn property(&self, name: &str) -> Option<&PropertyCount> {
        self.properties.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        json::to_json(self)
    }
}

#[derive(Clone, Copy)]
struct Ctx {
    suite: Suite,
    field: FieldSpec,
    p: u64,
    rank: usize,
    trial: usize,
    precision: usize,
}

#[derive(Default)]
struct Tally {
    props: Vec<PropertyCount>,
    first: Option<Certificate>,
    skipped: Vec<Skipped>,
}

type Check = std::result::Result<(), String>;

impl Tally {
    fn record(&mut self, ctx: &Ctx, name: &str, input: impl FnOnce() -> Value, outcome: Check) {
        let name = format!("{}.{name}", ctx.suite.as_str());
        let idx = match self.props.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.props.push(PropertyCount { name: name.clone(), pass: 0, fail: 0 });
                self.props.len() - 1
            }
        };
        match outcome {
            Ok(()) => self.props[idx].pass += 1,
            Err(detail) => {
                self.props[idx].fail += 1;
                if self.first.is_none() {
                    self.first = Some(Certificate {
                        property: name,
                        p: ctx.p,
                        rank: ctx.rank,
                        trial: ctx.trial,
                        input: input(),
                        detail,
                    });
                }
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        for c in other.props {
            match self.props.iter_mut().find(|x| x.name == c.name) {
                Some(x) => {
                    x.pass += c.pass;
                    x.fail += c.fail;
                }
                None => self.props.push(c),
            }
        }
        if self.first.is_none() {
            self.first = other.first;
        }
        self.skipped.extend(other.skipped);
    }
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{}: {e}", e.code()))
}

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

fn value(text: String) -> Value {
    serde_json::from_str(&text).unwrap_or(Value::Null)
}

fn conn_value(c: &Connection) -> Value {
    value(json::encode_connection(c))
}

fn show(m: &SeriesMatrix) -> String {
    value(json::encode_matrix_doc(m))["matrix"].to_string()
}

/// Runs a suite. Fails only on invalid parameters; property failures are
/// reported inside the result.
pub fn run(suite: Suite, params: &Params) -> Result<VerifyReport> {
    let mut fields = Vec::new();
    for &p in &params.p {
        let f = FieldSpec::prime(p)?;
        if f.p() as usize > 97 {
            return Err(Error::InvalidField(format!("verification suites support p < 100, got {p}")));
        }
        fields.push(f);
    }
    for &n in &params.rank {
        if n == 0 || n > MAX_RANK {
            return Err(Error::RankTooLarge { rank: n, max: MAX_RANK });
        }
    }
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut groups = Vec::new();
    for &s in &suites {
        for &field in &fields {
            let ranks: &[usize] = if s.per_rank() { &params.rank } else { &[1] };
            for &n in ranks {
                let precision = params.precision.unwrap_or_else(|| s.default_precision(field.p() as usize));
                // every suite's constructions need a few orders beyond 2p
                let required = 2 * field.p() as usize + 2;
                if precision < required {
                    return Err(Error::InsufficientPrecision { required, actual: precision });
                }
                groups.push(Ctx { suite: s, field, p: field.p() as u64, rank: n, trial: 0, precision });
            }
        }
    }
    let tallies: Vec<Tally> = std::thread::scope(|scope| {
        let handles: Vec<_> = groups
            .iter()
            .map(|ctx| scope.spawn(move || run_group(*ctx, params.trials, params.seed)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("verification thread panicked")).collect()
    });
    let mut total = Tally::default();
    for t in tallies {
        total.merge(t);
    }
    let pass = total.props.iter().map(|c| c.pass).sum();
    let fail = total.props.iter().map(|c| c.fail).sum();
    Ok(VerifyReport {
        suite: suite.as_str().to_string(),
        parameters: params.clone(),
        total: pass + fail,
        pass,
        fail,
        properties: total.props,
        skipped: total.skipped,
        first_failure: total.first,
    })
}

fn run_group(base: Ctx, trials: usize, seed: u64) -> Tally {
    let mut tally = Tally::default();
    if matches!(base.suite, Suite::Harmonic | Suite::Roundtrip) && base.field.order() < base.rank as u128 {
        tally.skipped.push(Skipped {
            suite: base.suite.as_str().to_string(),
            p: base.p,
            rank: base.rank,
            reason: "field has fewer elements than the rank, so no split regular-semisimple instance exists".into(),
        });
        return tally;
    }
    for trial in 0..trials {
        let ctx = Ctx { trial, ..base };
        match ctx.suite {
            Suite::Pcurv => pcurv_trial(&ctx, seed, &mut tally),
            Suite::Hitchin => hitchin_trial(&ctx, seed, &mut tally),
            Suite::Cartier => cartier_trial(&ctx, seed, &mut tally),
            Suite::Exactness => exactness_trial(&ctx, seed, &mut tally),
            Suite::Harmonic => harmonic_trial(&ctx, seed, &mut tally),
            Suite::Roundtrip => roundtrip_trial(&ctx, seed, &mut tally),
            Suite::All => unreachable!("expanded by run"),
        }
    }
    tally
}

fn stream(ctx: &Ctx, seed: u64, suite: Suite) -> SplitMix64 {
    SplitMix64::derive(seed, &[suite.label(), ctx.p, ctx.rank as u64, ctx.trial as u64])
}

/// `f^p + ∂^{p-1} f`.
pub fn rank_one_pcurv(f: &TruncSeries) -> Result<TruncSeries> {
    let p = f.field().p() as usize;
    f.pow(p as u64).try_add(&f.derive_n(p - 1)?)
}

fn descent_check(nabla: &Connection) -> Check {
    let psi = lib(pcurv(nabla))?;
    let b = lib(char_invariants(psi.psi()))?;
    let p = nabla.p() as usize;
    for (i, e) in b.entries().iter().enumerate() {
        if let Some((m, _)) = e.coeffs().iter().enumerate().find(|(m, c)| m % p != 0 && !c.is_zero()) {
            return Err(format!("b_{} has a nonzero coefficient at z^{m}", i + 1));
        }
    }
    match phitchin(nabla) {
        Err(e @ Error::InternalInconsistency { .. }) => Err(format!("{}: {e}", e.code())),
        Err(e) => Err(format!("phitchin refused a descended tuple: {}: {e}", e.code())),
        Ok(_) => Ok(()),
    }
}

fn pcurv_trial(ctx: &Ctx, seed: u64, t: &mut Tally) {
    let mut rng = stream(ctx, seed, ctx.suite);
    let nabla = gen::connection(ctx.field, ctx.rank, ctx.precision, &mut rng);
    let input = || conn_value(&nabla);
    if ctx.rank == 1 {
        let check = (|| {
            let psi = lib(pcurv(&nabla))?;
            let closed = lib(rank_one_pcurv(nabla.matrix().get(0, 0)))?;
            let got = psi.psi().get(0, 0);
            ensure(got.eq_within(&closed) && got.precision() == closed.precision(), || {
                format!("p-fold application {} against closed form {}", show(psi.psi()), crate::algebra::text::format_series(&closed))
            })
        })();
        t.record(ctx, "closed_form", input, check);
    }
    let check = (|| {
        let report = lib(check_horizontality(&nabla))?;
        ensure(report.passed(), || format!("residual {}", show(&report.residual)))
    })();
    t.record(ctx, "horizontality", input, check);
    t.record(ctx, "descent", input, descent_check(&nabla));
}

fn hitchin_trial(ctx: &Ctx, seed: u64, t: &mut Tally) {
    let mut rng = stream(ctx, seed, ctx.suite);
    let nabla = gen::connection(ctx.field, ctx.rank, ctx.precision + 1, &mut rng);
    let g = gen::unit_matrix(ctx.field, ctx.rank, ctx.precision + 1, &mut rng);
    let input = || serde_json::json!({"connection": conn_value(&nabla), "gauge": value(json::encode_matrix_doc(&g))});
    t.record(ctx, "descent", input, descent_check(&nabla));
    let check = (|| {
        let moved = lib(gauge(&g, &nabla))?;
        let b0 = lib(phitchin(&nabla))?;
        let b1 = lib(phitchin(&moved))?;
        ensure(b0.eq_within(&b1), || {
            format!("phitchin {} against {} after gauge", json::encode_invariant_tuple(&b0), json::encode_invariant_tuple(&b1))
        })
    })();
    t.record(ctx, "gauge_invariance", input, check);
    let check = (|| {
        let b = lib(phitchin(&nabla))?;
        let back = lib(char_invariants(&lib(companion_section(&b))?))?;
        ensure(back.eq_within(&b), || "companion section has different invariants".into())
    })();
    t.record(ctx, "companion_round_trip", input, check);
}

fn cartier_trial(ctx: &Ctx, seed: u64, t: &mut Tally) {
    let mut rng = stream(ctx, seed, ctx.suite);
    let (p, n, prec) = (ctx.p as usize, ctx.rank, ctx.precision);
    if ctx.trial.is_multiple_of(2) {
        let nabla = match gen::pullback_connection(ctx.field, n, prec, &mut rng) {
            Ok(c) => c,
            Err(e) => return t.record(ctx, "pullback_descends", || Value::Null, lib(Err(e))),
        };
        let check = (|| {
            let psi = lib(pcurv(&nabla))?;
            ensure(psi.psi().is_zero(), || format!("pullback has p-curvature {}", show(psi.psi())))?;
            let flat = lib(flat_sections(&nabla))?;
            let canon = lib(gauge(&lib(flat.gauge.inverse())?, &nabla))?;
            ensure(canon.matrix().is_zero(), || format!("flat frame leaves {}", show(canon.matrix())))
        })();
        t.record(ctx, "pullback_descends", || conn_value(&nabla), check);
    } else {
        // ∂ + c z^m E_ab in a random frame, m = jp + p - 1
        let j = rng.below(((prec - p) / p + 1) as u64) as usize;
        let m = j * p + p - 1;
        let (a, b) = (rng.below(n as u64) as usize, rng.below(n as u64) as usize);
        let c = gen::nonzero_fe(ctx.field, &mut rng);
        let built = (|| {
            let bump = SeriesMatrix::from_fn(n, |i, k| {
                if (i, k) == (a, b) {
                    TruncSeries::monomial(ctx.field, Var::Z, c, m, prec + 1)
                } else {
                    TruncSeries::zero(ctx.field, Var::Z, prec + 1)
                }
            })?;
            let g = gen::unit_matrix(ctx.field, n, prec + 1, &mut rng);
            gauge(&g, &Connection::new(bump)?)
        })();
        let nabla = match built {
            Ok(c) => c,
            Err(e) => return t.record(ctx, "injected_obstructed", || Value::Null, lib(Err(e))),
        };
        let check = (|| {
            let psi = lib(pcurv(&nabla))?;
            ensure(!psi.psi().is_zero(), || "injected p-curvature is invisible".into())?;
            match flat_sections(&nabla) {
                Err(Error::NonzeroPCurvature { order, .. }) if order == m => Ok(()),
                Err(Error::NonzeroPCurvature { order, .. }) => Err(format!("obstruction at order {order}, predicted {m}")),
                Err(e) => lib(Err(e)),
                Ok(_) => Err(format!("flat sections found despite p-curvature injected at order {m}")),
            }
        })();
        t.record(ctx, "injected_obstructed", || conn_value(&nabla), check);
    }
}

fn exactness_trial(ctx: &Ctx, seed: u64, t: &mut Tally) {
    let mut rng = stream(ctx, seed, ctx.suite);
    let (f, prec) = (ctx.field, ctx.precision);
    let u = gen::unit(f, Var::Z, prec + 1, &mut rng);
    let series_value = |s: &TruncSeries| value(json::encode_series(s));
    let check = (|| {
        let w = lib(OneForm::new(lib(dlog(&u))?))?;
        let image = lib(hp(&w))?;
        ensure(image.coefficient().is_zero(), || {
            format!("h_p(dlog u) = {}", crate::algebra::text::format_series(image.coefficient()))
        })
    })();
    t.record(ctx, "dlog_in_kernel", || series_value(&u), check);

    let w = if rng.coin() {
        let v = gen::unit(f, Var::Z, prec + 1, &mut rng);
        dlog(&v).map(|s| s.truncate(prec))
    } else {
        Ok(gen::series(f, Var::Z, prec, &mut rng))
    };
    let form_value = |w: &Result<TruncSeries>| w.as_ref().map(series_value).unwrap_or(Value::Null);
    let check = (|| {
        let w = lib(OneForm::new(lib(w.clone())?))?;
        let in_kernel = lib(hp(&w))?.coefficient().is_zero();
        match kernel_unit(&w) {
            Ok(g) => {
                ensure(in_kernel, || "kernel unit produced outside the kernel".into())?;
                let back = lib(dlog(&g))?;
                ensure(back.eq_within(w.coefficient()) && g.residue() == f.one(), || "dlog of kernel unit differs".into())
            }
            Err(Error::NonzeroPCurvature { .. }) => ensure(!in_kernel, || "form in the kernel has no unit".into()),
            Err(e) => lib(Err(e)),
        }
    })();
    t.record(ctx, "kernel_constructive", || form_value(&w), check);

    let eta = gen::series(f, Var::ZPrime, prec, &mut rng);
    let check = (|| {
        let target = lib(TwistOneForm::new(eta.clone()))?;
        let u = lib(solve_hp(&target))?;
        let image = lib(hp(&u))?;
        ensure(image.coefficient().eq_within(&eta) && image.precision() >= eta.precision(), || {
            format!("h_p(solve_hp(η)) = {}", crate::algebra::text::format_series(image.coefficient()))
        })
    })();
    t.record(ctx, "section", || series_value(&eta), check);
}

fn harmonic_instance(ctx: &Ctx, seed: u64) -> Result<Connection> {
    let mut rng = stream(ctx, seed, Suite::Harmonic);
    gen::split_semisimple(ctx.field, ctx.rank, ctx.precision, &mut rng).expect("field large enough")
}

fn harmonic_trial(ctx: &Ctx, seed: u64, t: &mut Tally) {
    let nabla = match harmonic_instance(ctx, seed) {
        Ok(c) => c,
        Err(e) => return t.record(ctx, "accepted", || Value::Null, lib(Err(e))),
    };
    let input = || conn_value(&nabla);
    let pkg = match solve_harmonic(&nabla) {
        Ok(pkg) => pkg,
        Err(e) => return t.record(ctx, "accepted", input, lib(Err(e))),
    };
    t.record(ctx, "accepted", input, Ok(()));
    let report = check_equations(&pkg);
    let field = |get: fn(&crate::harmonic::EquationReport) -> bool, what: &str| -> Check {
        match &report {
            Ok(r) => ensure(get(r), || format!("{what} fails on the solver output")),
            Err(e) => Err(format!("{}: {e}", e.code())),
        }
    };
    t.record(ctx, "curvature_vanishes", input, field(|r| r.curvature_vanishes, "Ψ(∇ - a(θ)) = 0"));
    t.record(ctx, "commutes", input, field(|r| r.commutes, "[Ψ, a(θ)] = 0"));
    t.record(ctx, "horizontal", input, field(|r| r.horizontal, "horizontality of the transported Ψ"));
    t.record(ctx, "linked", input, field(|r| r.linked, "gauge(g^-1, ∇) = cmap(θ, φ')"));
}

/// `G^{-1} A G + G^{-1} ∂G`, written out rather than through `gauge`.
fn conjugate(g: &SeriesMatrix, a: &SeriesMatrix) -> Result<SeriesMatrix> {
    let gi = g.inverse()?;
    gi.try_mul(&a.try_mul(g)?.try_add(&g.derive()?)?)
}

fn roundtrip_trial(ctx: &Ctx, seed: u64, t: &mut Tally) {
    let nabla = match harmonic_instance(ctx, seed) {
        Ok(c) => c,
        Err(e) => return t.record(ctx, "cmap_cinv", || Value::Null, lib(Err(e))),
    };
    let input = || conn_value(&nabla);
    let pkg: CorrespondencePackage = match solve_harmonic(&nabla) {
        Ok(pkg) => pkg,
        Err(e) => return t.record(ctx, "cmap_cinv", input, lib(Err(e))),
    };
    let h = &pkg.harmonic;

    let check = (|| {
        let out = lib(cinv(&nabla, &inverse(h)))?;
        let rebuilt = lib(cmap(h, &out.higgs))?;
        let moved = lib(conjugate(&out.frame, nabla.matrix()))?;
        ensure(moved.eq_within(rebuilt.matrix()), || {
            format!("G^-1 A G + G^-1 ∂G = {} but cmap gives {}", show(&moved), show(rebuilt.matrix()))
        })
    })();
    t.record(ctx, "cmap_cinv", input, check);

    let check = (|| {
        let built = lib(cmap(h, &pkg.higgs))?;
        let out = lib(cinv(&built, &inverse(h)))?;
        let g = &out.frame;
        let before = lib(pkg.higgs.phi().pullback())?;
        let after = lib(out.higgs.phi().pullback())?;
        let conj = lib(lib(g.inverse())?.try_mul(&before).and_then(|m| m.try_mul(g)))?;
        ensure(conj.eq_within(&after), || {
            format!("G^-1 F*φ' G = {} but cinv gives F*φ'' = {}", show(&conj), show(&after))
        })?;
        let back = lib(cmap(h, &out.higgs))?;
        let moved = lib(conjugate(g, built.matrix()))?;
        ensure(moved.eq_within(back.matrix()), || "frame of cinv does not carry cmap(φ') to cmap(φ'')".into())
    })();
    t.record(ctx, "cinv_cmap", input, check);

    let check = (|| {
        let other = lib(canonical_harmonic(h.b_prime()))?;
        let diff = lib(crate::harmonic::torsor_difference(h, &other))?;
        ensure(lib(diff.delta.pcurv())?.is_zero(), || "δ has nonzero p-curvature".into())?;
        ensure(lib(diff.unit.dlog())?.eq_within(&diff.delta), || "dlog u differs from δ".into())
    })();
    t.record(ctx, "torsor", input, check);
}
