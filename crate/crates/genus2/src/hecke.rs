//! Hecke-eigenvalue tables, Euler factors, and Galois-case classification.

use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counting::FrobeniusQuartic;
use crate::qfield::{prime_from_generator, qf_new, PrimeIdeal, QElem, QuadField};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HeckeError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("inconsistent table row: {0}")]
    Consistency(String),
    #[error("prime not present in the eigenvalue table")]
    PrimeNotInTable,
    #[error("not enough split pairs to classify")]
    InsufficientData,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    I,
    II,
    III,
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Case::I => write!(f, "I"),
            Case::II => write!(f, "II"),
            Case::III => write!(f, "III"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HeckeRow {
    pub norm: u64,
    pub gen: QElem,
    pub ap: QElem,
    pub s: Option<i64>,
    pub t: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct HeckeForm {
    pub base_d: u64,
    pub coeff_d: u64,
    pub label: String,
    pub base: Arc<QuadField>,
    pub coeff: Arc<QuadField>,
    pub rows: Vec<HeckeRow>,
}

// -------------------------------------------------------------------------
// file format

#[derive(Serialize, Deserialize)]
struct FormsFile {
    forms: Vec<FormBlock>,
}

#[derive(Serialize, Deserialize)]
struct FormBlock {
    #[serde(rename = "baseD")]
    base_d: u64,
    #[serde(rename = "coeffD")]
    coeff_d: u64,
    #[serde(default)]
    label: Option<String>,
    rows: Vec<RowRec>,
}

#[derive(Serialize, Deserialize)]
struct RowRec {
    norm: u64,
    gen: [i64; 3],
    ap: [i64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<i64>,
}

fn triple(field: &Arc<QuadField>, t: &[i64; 3]) -> Result<QElem, HeckeError> {
    if t[2] == 0 {
        return Err(HeckeError::Schema("zero denominator".into()));
    }
    Ok(crate::qfield::qe_frac(field, t[0], t[1], t[2]))
}

/// Parse and validate an eigenvalue document (see `data::FORMS_JSON`).
pub fn parse_forms(text: &str) -> Result<Vec<HeckeForm>, HeckeError> {
    let file: FormsFile =
        serde_json::from_str(text).map_err(|e| HeckeError::Schema(e.to_string()))?;
    let mut out = Vec::new();
    for b in &file.forms {
        let base = qf_new(b.base_d)
            .map_err(|e| HeckeError::Schema(format!("baseD {}: {e}", b.base_d)))?;
        let coeff = qf_new(b.coeff_d)
            .map_err(|e| HeckeError::Schema(format!("coeffD {}: {e}", b.coeff_d)))?;
        let mut rows = Vec::new();
        for r in &b.rows {
            rows.push(HeckeRow {
                norm: r.norm,
                gen: triple(&base, &r.gen)?,
                ap: triple(&coeff, &r.ap)?,
                s: r.s,
                t: r.t,
            });
        }
        let form = HeckeForm {
            base_d: b.base_d,
            coeff_d: b.coeff_d,
            label: b.label.clone().unwrap_or_else(|| "a".into()),
            base,
            coeff,
            rows,
        };
        let violations = check_table_consistency(&form);
        if let Some(v) = violations.first() {
            return Err(HeckeError::Consistency(v.clone()));
        }
        out.push(form);
    }
    Ok(out)
}

/// Serialize forms back into the document format (round-trips with parse).
pub fn serialize_forms(forms: &[HeckeForm]) -> String {
    let to_triple = |e: &QElem| -> [i64; 3] {
        [
            i64::try_from(&e.a).unwrap(),
            i64::try_from(&e.b).unwrap(),
            i64::try_from(&e.den).unwrap(),
        ]
    };
    let file = FormsFile {
        forms: forms
            .iter()
            .map(|f| FormBlock {
                base_d: f.base_d,
                coeff_d: f.coeff_d,
                label: Some(f.label.clone()),
                rows: f
                    .rows
                    .iter()
                    .map(|r| RowRec {
                        norm: r.norm,
                        gen: to_triple(&r.gen),
                        ap: to_triple(&r.ap),
                        s: r.s,
                        t: r.t,
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).unwrap()
}

/// Integer trace of an eigenvalue (errors if not integral).
fn int_trace(e: &QElem) -> Option<i64> {
    let (n, d) = e.trace();
    if d.is_one() {
        i64::try_from(&n).ok()
    } else {
        None
    }
}

fn int_norm(e: &QElem) -> Option<i64> {
    let (n, d) = e.norm();
    if d.is_one() {
        i64::try_from(&n).ok()
    } else {
        None
    }
}

/// s/t identities, Weil bounds and generator norms for every row.
pub fn check_table_consistency(f: &HeckeForm) -> Vec<String> {
    let mut viol = Vec::new();
    for (i, r) in f.rows.iter().enumerate() {
        let tag = |msg: &str| format!("{}/{}{}, row {} (norm {}): {}", f.base_d, f.coeff_d, f.label, i, r.norm, msg);
        match prime_from_generator(&r.gen) {
            Ok(pr) => {
                if pr.norm() != r.norm {
                    viol.push(tag(&format!("generator norm {} != {}", pr.norm(), r.norm)));
                }
            }
            Err(_) => viol.push(tag("generator does not define a prime")),
        }
        let (tr, nm) = (int_trace(&r.ap), int_norm(&r.ap));
        match (r.s, tr) {
            (Some(s), Some(t)) if s != t => viol.push(tag(&format!("s {} != Tr(ap) {}", s, t))),
            (Some(_), None) => viol.push(tag("ap has non-integral trace")),
            _ => {}
        }
        match (r.t, nm) {
            (Some(t), Some(n)) if t != n + 2 * r.norm as i64 => {
                viol.push(tag(&format!("t {} != N(ap)+2q {}", t, n + 2 * r.norm as i64)))
            }
            (Some(_), None) => viol.push(tag("ap has non-integral norm")),
            _ => {}
        }
        // Weil bound at both archimedean places
        let bound = 2.0 * (r.norm as f64).sqrt() + 1e-9;
        if r.ap.approx().abs() > bound || r.ap.conj().approx().abs() > bound {
            viol.push(tag("Weil bound violated"));
        }
    }
    viol
}

/// Euler factor at P: q = N(P), s = Tr(a_p), t = N(a_p) + 2q.
/// Rows are matched by the reduction datum (p, root), not the generator.
pub fn euler_factor(f: &HeckeForm, prime: &PrimeIdeal) -> Result<FrobeniusQuartic, HeckeError> {
    for r in &f.rows {
        let Ok(pr) = prime_from_generator(&r.gen) else {
            continue;
        };
        if pr.p == prime.p && pr.deg == prime.deg && pr.root == prime.root {
            let s = int_trace(&r.ap)
                .ok_or_else(|| HeckeError::Consistency("non-integral trace".into()))?;
            let t = int_norm(&r.ap)
                .ok_or_else(|| HeckeError::Consistency("non-integral norm".into()))?
                + 2 * r.norm as i64;
            return Ok(FrobeniusQuartic { q: r.norm, s, t });
        }
    }
    Err(HeckeError::PrimeNotInTable)
}

/// Galois case: I if a_{sigma(P)} = a_P for every available split pair,
/// II if a_{sigma(P)} = tau(a_P) for every pair, III otherwise.
pub fn classify_case(f: &HeckeForm) -> Result<Case, HeckeError> {
    let mut pairs: Vec<(&HeckeRow, &HeckeRow)> = Vec::new();
    for (i, r1) in f.rows.iter().enumerate() {
        for r2 in f.rows.iter().skip(i + 1) {
            if r1.norm != r2.norm {
                continue;
            }
            let (Ok(p1), Ok(p2)) = (prime_from_generator(&r1.gen), prime_from_generator(&r2.gen))
            else {
                continue;
            };
            if p1.deg == 1 && p2.deg == 1 && !p1.ramified && p1.root != p2.root {
                pairs.push((r1, r2));
            }
        }
    }
    if pairs.len() < 3 {
        return Err(HeckeError::InsufficientData);
    }
    if pairs.iter().all(|(a, b)| a.ap == b.ap) {
        return Ok(Case::I);
    }
    if pairs.iter().all(|(a, b)| a.ap.conj() == b.ap) {
        return Ok(Case::II);
    }
    Ok(Case::III)
}

/// Look up a form block by base/coefficient discriminant and optional label.
pub fn find_form<'a>(
    forms: &'a [HeckeForm],
    base_d: u64,
    coeff_d: u64,
    label: Option<&str>,
) -> Option<&'a HeckeForm> {
    forms
        .iter()
        .find(|f| f.base_d == base_d && f.coeff_d == coeff_d && label.map_or(true, |l| f.label == l))
}
