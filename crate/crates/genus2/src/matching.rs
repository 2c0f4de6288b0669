//! Euler-factor screening and verification: curves against eigenvalue
//! tables, and surface points against forms via mod-p reconstruction.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counting::frobenius_charpoly;
use crate::curve::{reduce_mod, triples_to_poly, curve_new, CurveError, GenusTwoCurve, IgusaClebsch};
use crate::hecke::{euler_factor, HeckeError, HeckeForm};
use crate::poly::Fqw;
use crate::qfield::{
    prime_from_generator, qf_new, reduce_elem, residue_field, PrimeIdeal, QElem, QuadField,
};
use crate::surfaces::{
    enumerate_field_points, enumerate_points, ic_at, mestre_reconstruct, CandidatePoint,
    SurfError, SurfaceModel,
};
use crate::poly::FieldElem;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchError {
    #[error("curve and form live over different base fields")]
    FieldMismatch,
    #[error("surface model carries no invariant map")]
    MapMissing,
    #[error("invariant map is undefined at this point")]
    MapUndefined,
    #[error("dataset error: {0}")]
    Data(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "up-to-sign")]
    UpToSign,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchRecord {
    pub norm: u64,
    pub gen: String,
    pub s_obs: i64,
    pub t_obs: i64,
    pub s_exp: i64,
    pub t_exp: i64,
    /// "+" (equal), "-" (equal after T -> -T), or "fail"
    pub sign: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SkippedPrime {
    pub norm: u64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchReport {
    pub verdict: String,
    pub mode: Mode,
    pub records: Vec<MatchRecord>,
    pub skipped: Vec<SkippedPrime>,
}

impl MatchReport {
    fn finish(mode: Mode, records: Vec<MatchRecord>, skipped: Vec<SkippedPrime>) -> MatchReport {
        let ok = records.iter().all(|r| match mode {
            Mode::Exact => r.sign == "+",
            Mode::UpToSign => r.sign != "fail",
        });
        MatchReport {
            verdict: if ok { "pass" } else { "fail" }.into(),
            mode,
            records,
            skipped,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

fn compare_record(
    norm: u64,
    gen: String,
    obs: (i64, i64),
    exp: (i64, i64),
) -> MatchRecord {
    let sign = if obs == exp {
        "+"
    } else if (-obs.0, obs.1) == exp {
        "-"
    } else {
        "fail"
    };
    MatchRecord {
        norm,
        gen,
        s_obs: obs.0,
        t_obs: obs.1,
        s_exp: exp.0,
        t_exp: exp.1,
        sign: sign.into(),
    }
}

/// Compare the curve's Frobenius data with the form's eigenvalue table at
/// every table prime of norm <= `norm_bound`. Unusable primes (coefficient
/// denominators, bad reduction) are recorded as skipped, not failed.
pub fn verify_curve_against_form(
    field: &Arc<QuadField>,
    curve: &GenusTwoCurve<QElem>,
    form: &HeckeForm,
    norm_bound: u64,
    mode: Mode,
) -> Result<MatchReport, MatchError> {
    if **field != *form.base {
        return Err(MatchError::FieldMismatch);
    }
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for row in &form.rows {
        if row.norm > norm_bound {
            continue;
        }
        let Ok(prime) = prime_from_generator(&row.gen) else {
            skipped.push(SkippedPrime {
                norm: row.norm,
                reason: "generator does not define a prime".into(),
            });
            continue;
        };
        let expected = euler_factor(form, &prime).expect("row prime is in its own table");
        match reduce_mod(field, curve, &prime) {
            Ok(red) => {
                let (fq, _) = residue_field(field, &prime);
                let chi = frobenius_charpoly(&red, &Arc::new(fq));
                records.push(compare_record(
                    row.norm,
                    row.gen.to_string(),
                    (chi.s, chi.t),
                    (expected.s, expected.t),
                ));
            }
            Err(CurveError::DenominatorClash) => skipped.push(SkippedPrime {
                norm: row.norm,
                reason: "residue characteristic divides a coefficient denominator".into(),
            }),
            Err(_) => skipped.push(SkippedPrime {
                norm: row.norm,
                reason: "residue characteristic divides disc".into(),
            }),
        }
    }
    Ok(MatchReport::finish(mode, records, skipped))
}

/// Screen one surface point against a form: reduce its invariants at each
/// prime, reconstruct a curve over the residue field, and compare Euler
/// factors up to sign (the twist is not determined mod p).
pub fn screen_point(
    m: &SurfaceModel,
    field: &Arc<QuadField>,
    form: &HeckeForm,
    r: &QElem,
    s: &QElem,
    primes: &[PrimeIdeal],
) -> Result<MatchReport, MatchError> {
    screen_point_inner(m, field, form, r, s, primes, false)
}

fn screen_point_inner(
    m: &SurfaceModel,
    field: &Arc<QuadField>,
    form: &HeckeForm,
    r: &QElem,
    s: &QElem,
    primes: &[PrimeIdeal],
    abort_on_fail: bool,
) -> Result<MatchReport, MatchError> {
    let ic = match ic_at(m, r, s) {
        Ok(ic) => ic,
        Err(SurfError::MapMissing) => return Err(MatchError::MapMissing),
        Err(_) => return Err(MatchError::MapUndefined),
    };
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for prime in primes {
        let gen = prime
            .generator
            .as_ref()
            .map(|g| g.to_string())
            .unwrap_or_else(|| format!("p{}", prime.p));
        if matches!(prime.p, 2 | 3 | 5) {
            skipped.push(SkippedPrime {
                norm: prime.norm(),
                reason: "reconstruction unsupported in characteristic 2, 3, 5".into(),
            });
            continue;
        }
        let expected = match euler_factor(form, prime) {
            Ok(e) => e,
            Err(HeckeError::PrimeNotInTable) => {
                skipped.push(SkippedPrime {
                    norm: prime.norm(),
                    reason: "prime not in eigenvalue table".into(),
                });
                continue;
            }
            Err(e) => return Err(MatchError::Data(e.to_string())),
        };
        let (fq, wimg) = residue_field(field, prime);
        let fq = Arc::new(fq);
        let red = |x: &QElem| {
            reduce_elem(field, prime, &fq, &wimg, x)
                .ok()
                .map(|e| Fqw::new(fq.clone(), e))
        };
        let (Some(i2), Some(i4), Some(i6), Some(i10)) =
            (red(&ic.i2), red(&ic.i4), red(&ic.i6), red(&ic.i10))
        else {
            skipped.push(SkippedPrime {
                norm: prime.norm(),
                reason: "invariant denominators meet the prime".into(),
            });
            continue;
        };
        if i10.is_zero() {
            skipped.push(SkippedPrime {
                norm: prime.norm(),
                reason: "invariants degenerate mod p".into(),
            });
            continue;
        }
        let icp = IgusaClebsch { i2, i4, i6, i10 };
        match mestre_reconstruct(&fq, &icp) {
            Ok(curve) => {
                let chi = frobenius_charpoly(&curve, &fq);
                let rec = compare_record(
                    prime.norm(),
                    gen,
                    (chi.s, chi.t),
                    (expected.s, expected.t),
                );
                let failed = rec.sign == "fail";
                records.push(rec);
                if failed && abort_on_fail {
                    break;
                }
            }
            Err(SurfError::NonGenericStratum) => skipped.push(SkippedPrime {
                norm: prime.norm(),
                reason: "degenerate stratum; reconstruction skipped".into(),
            }),
            Err(e) => return Err(MatchError::Data(e.to_string())),
        }
    }
    Ok(MatchReport::finish(Mode::UpToSign, records, skipped))
}

/// The form's table primes usable for reconstruction-based screening, in
/// table order: residue characteristic away from 2, 3, 5.
pub fn screening_primes(form: &HeckeForm, budget: usize) -> Vec<PrimeIdeal> {
    form.rows
        .iter()
        .filter_map(|r| prime_from_generator(&r.gen).ok())
        .filter(|p| !matches!(p.p, 2 | 3 | 5))
        .take(budget)
        .collect()
}

/// Candidate search space for `hunt`.
pub enum HuntSpace {
    Rational { height: u64, sieve: Vec<u64> },
    FieldBox { num_bound: i64, den: i64 },
}

/// Enumerate candidate points, screen each against the form with early
/// abort, and return the survivors with full (non-aborted) reports, in
/// enumeration order regardless of worker count.
pub fn hunt(
    m: &SurfaceModel,
    field: &Arc<QuadField>,
    form: &HeckeForm,
    space: &HuntSpace,
    prime_budget: usize,
) -> Result<Vec<(CandidatePoint, MatchReport)>, MatchError> {
    if m.icmap.is_none() {
        return Err(MatchError::MapMissing);
    }
    let candidates = match space {
        HuntSpace::Rational { height, sieve } => enumerate_points(m, field, *height, sieve),
        HuntSpace::FieldBox { num_bound, den } => {
            enumerate_field_points(m, field, *num_bound, *den)
        }
    };
    let primes = screening_primes(form, prime_budget);
    let survivors: Vec<CandidatePoint> = candidates
        .into_par_iter()
        .filter(|cp| {
            match screen_point_inner(m, field, form, &cp.r, &cp.s, &primes, true) {
                Ok(rep) => rep.passed(),
                // undefined invariant map (branch of the model): cannot be
                // screened, so it cannot survive
                Err(MatchError::MapUndefined) => false,
                Err(_) => false,
            }
        })
        .collect();
    survivors
        .into_iter()
        .map(|cp| {
            screen_point(m, field, form, &cp.r, &cp.s, &primes).map(|rep| (cp, rep))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// curve dataset

#[derive(Deserialize)]
struct CurvesFile {
    curves: Vec<CurveRec>,
}

#[derive(Deserialize)]
struct CurveRec {
    #[serde(rename = "D")]
    d: u64,
    #[serde(rename = "coeffD")]
    coeff_d: u64,
    form: String,
    #[serde(rename = "P")]
    p: Vec<[i64; 3]>,
    #[serde(rename = "Q")]
    q: Vec<[i64; 3]>,
}

pub struct CurveEntry {
    pub d: u64,
    pub coeff_d: u64,
    pub form: String,
    pub field: Arc<QuadField>,
    pub curve: GenusTwoCurve<QElem>,
}

/// Parse a curve-table document (see `data::CURVES_JSON`).
pub fn parse_curves_json(text: &str) -> Result<Vec<CurveEntry>, MatchError> {
    let file: CurvesFile =
        serde_json::from_str(text).map_err(|e| MatchError::Data(e.to_string()))?;
    file.curves
        .into_iter()
        .map(|rec| {
            let field = qf_new(rec.d).map_err(|e| MatchError::Data(e.to_string()))?;
            let p = triples_to_poly(&field, &rec.p);
            let q = triples_to_poly(&field, &rec.q);
            let curve = curve_new(p, q, 0).map_err(|e| MatchError::Data(e.to_string()))?;
            Ok(CurveEntry {
                d: rec.d,
                coeff_d: rec.coeff_d,
                form: rec.form,
                field,
                curve,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{CURVES_JSON, FORMS_JSON};
    use crate::hecke::{find_form, parse_forms};
    use crate::qfield::qe_frac;
    use crate::surfaces::registry_get;

    fn dataset() -> (Vec<CurveEntry>, Vec<HeckeForm>) {
        (
            parse_curves_json(CURVES_JSON).unwrap(),
            parse_forms(FORMS_JSON).unwrap(),
        )
    }

    fn entry<'a>(cs: &'a [CurveEntry], d: u64, cd: u64) -> &'a CurveEntry {
        cs.iter().find(|c| c.d == d && c.coeff_d == cd).unwrap()
    }

    #[test]
    fn c193_matches_its_form() {
        let (cs, fs) = dataset();
        let e = entry(&cs, 193, 17);
        let f = find_form(&fs, 193, 17, Some(&e.form)).unwrap();
        let rep =
            verify_curve_against_form(&e.field, &e.curve, f, u64::MAX, Mode::UpToSign).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(!rep.records.is_empty());
    }

    #[test]
    fn c929_skips_the_norm_nine_row() {
        let (cs, fs) = dataset();
        let e = entry(&cs, 929, 13);
        let f = find_form(&fs, 929, 13, Some(&e.form)).unwrap();
        let rep =
            verify_curve_against_form(&e.field, &e.curve, f, u64::MAX, Mode::UpToSign).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.skipped.iter().any(|s| s.norm == 9));
        assert!(rep.records.iter().all(|r| r.norm != 9));
    }

    #[test]
    fn field_mismatch_detected() {
        let (cs, fs) = dataset();
        let e = entry(&cs, 53, 8);
        let f = find_form(&fs, 193, 17, None).unwrap();
        assert!(matches!(
            verify_curve_against_form(&e.field, &e.curve, f, 100, Mode::UpToSign),
            Err(MatchError::FieldMismatch)
        ));
    }

    #[test]
    fn screen_accepts_the_d53_point() {
        let (_, fs) = dataset();
        let m = registry_get(8).unwrap();
        let field = qf_new(53).unwrap();
        let f = find_form(&fs, 53, 8, None).unwrap();
        let r = qe_frac(&field, -24, -10, 121);
        let s = qe_frac(&field, 136, -24, 121);
        let primes = screening_primes(f, 10);
        assert_eq!(primes.len(), 10);
        let rep = screen_point(&m, &field, f, &r, &s, &primes).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.records.len() >= 5);
    }

    #[test]
    fn screen_rejects_a_generic_point() {
        let (_, fs) = dataset();
        let m = registry_get(8).unwrap();
        let field = qf_new(53).unwrap();
        let f = find_form(&fs, 53, 8, None).unwrap();
        let one = QElem::from_i64(&field, 1);
        let primes = screening_primes(f, 10);
        let rep = screen_point(&m, &field, f, &one, &one, &primes).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn screen_without_icmap_is_an_error() {
        let (_, fs) = dataset();
        let m = registry_get(17).unwrap();
        let field = qf_new(193).unwrap();
        let f = find_form(&fs, 193, 17, None).unwrap();
        let z = QElem::zero(&field);
        let primes = screening_primes(f, 5);
        assert!(matches!(
            screen_point(&m, &field, f, &z, &z, &primes),
            Err(MatchError::MapMissing)
        ));
    }

    #[test]
    fn hunt_small_height_is_empty() {
        let (_, fs) = dataset();
        let m = registry_get(8).unwrap();
        let field = qf_new(53).unwrap();
        let f = find_form(&fs, 53, 8, None).unwrap();
        let space = HuntSpace::Rational {
            height: 2,
            sieve: vec![7, 11, 13, 16, 9],
        };
        let out = hunt(&m, &field, f, &space, 8).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn hunt_zero_budget_is_vacuous() {
        let (_, fs) = dataset();
        let m = registry_get(8).unwrap();
        let field = qf_new(53).unwrap();
        let f = find_form(&fs, 53, 8, None).unwrap();
        let space = HuntSpace::Rational {
            height: 2,
            sieve: vec![],
        };
        let out = hunt(&m, &field, f, &space, 0).unwrap();
        // every screenable candidate survives a vacuous screen
        let candidates = enumerate_points(&m, &field, 2, &[]);
        let screenable = candidates
            .iter()
            .filter(|cp| ic_at(&m, &cp.r, &cp.s).is_ok())
            .count();
        assert_eq!(out.len(), screenable);
        assert!(out.iter().all(|(_, rep)| rep.passed()));
    }

    #[test]
    fn early_abort_matches_full_screening() {
        let (_, fs) = dataset();
        let m = registry_get(8).unwrap();
        let field = qf_new(53).unwrap();
        let f = find_form(&fs, 53, 8, None).unwrap();
        let primes = screening_primes(f, 6);
        for cp in enumerate_points(&m, &field, 3, &[]) {
            let full = screen_point(&m, &field, f, &cp.r, &cp.s, &primes);
            let aborted = screen_point_inner(&m, &field, f, &cp.r, &cp.s, &primes, true);
            match (full, aborted) {
                (Ok(a), Ok(b)) => assert_eq!(a.passed(), b.passed()),
                (Err(a), Err(b)) => assert_eq!(a, b),
                (a, b) => panic!("divergent outcomes {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn report_json_roundtrip() {
        let (cs, fs) = dataset();
        let e = entry(&cs, 193, 17);
        let f = find_form(&fs, 193, 17, Some(&e.form)).unwrap();
        let rep =
            verify_curve_against_form(&e.field, &e.curve, f, 30, Mode::UpToSign).unwrap();
        let text = serde_json::to_string(&rep).unwrap();
        assert!(text.contains("\"up-to-sign\""));
        let back: MatchReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.verdict, rep.verdict);
        assert_eq!(back.records.len(), rep.records.len());
        // deterministic serialization
        assert_eq!(text, serde_json::to_string(&rep).unwrap());
    }

    #[test]
    fn dataset_parses_and_is_wellformed() {
        let (cs, fs) = dataset();
        assert_eq!(cs.len(), 20);
        for e in &cs {
            assert!(
                find_form(&fs, e.d, e.coeff_d, Some(&e.form)).is_some(),
                "curve {}/{} has no form",
                e.d,
                e.coeff_d
            );
        }
    }
}
