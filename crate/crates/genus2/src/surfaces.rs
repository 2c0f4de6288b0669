//! Surface double-cover models z^2 = f(r,s), candidate-point filtering and
//! enumeration, and reconstruction of genus-2 curves from their invariants
//! over finite fields (conic/cubic method plus a brute-force oracle).

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{curve_new, ic_weighted_equal, GenusTwoCurve, IgusaClebsch};
use crate::finitefield::{FqField, FqElem};
use crate::invariants::{igusa_clebsch_sextic, BForm};
use crate::poly::{rat_is_square, FieldElem, Fqw, Poly};
use crate::qfield::{is_square_in_f, qe_frac, splitting_type, primes_above, QElem, QuadField, SplittingType};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfError {
    #[error("no built-in model for this discriminant")]
    UnknownModel,
    #[error("model carries no invariant map")]
    MapMissing,
    #[error("invariant map denominator vanishes at this point")]
    DenominatorVanishes,
    #[error("reconstruction unavailable in characteristic 2, 3 or 5")]
    BadCharacteristic,
    #[error("invariants lie on a degenerate stratum; reconstruction skipped")]
    NonGenericStratum,
    #[error("no curve attains these invariants")]
    NotFound,
    #[error("cannot parse surface file: {0}")]
    Parse(String),
}

/// num/den * r^dr * s^ds
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Monomial(pub u32, pub u32, pub i64, pub i64);

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatFn {
    pub num: Vec<Monomial>,
    pub den: Vec<Monomial>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IcMap {
    #[serde(rename = "I2")]
    pub i2: RatFn,
    #[serde(rename = "I4")]
    pub i4: RatFn,
    #[serde(rename = "I6")]
    pub i6: RatFn,
    #[serde(rename = "I10")]
    pub i10: RatFn,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceModel {
    #[serde(rename = "coeffD")]
    pub coeff_d: u64,
    pub cover: Vec<Monomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icmap: Option<IcMap>,
    #[serde(default)]
    pub provenance: String,
}

pub fn parse_surface_json(text: &str) -> Result<SurfaceModel, SurfError> {
    let m: SurfaceModel =
        serde_json::from_str(text).map_err(|e| SurfError::Parse(e.to_string()))?;
    if m.cover.is_empty() {
        return Err(SurfError::Parse("empty cover polynomial".into()));
    }
    for mon in m.cover.iter().chain(m.icmap.iter().flat_map(|ic| {
        [&ic.i2, &ic.i4, &ic.i6, &ic.i10]
            .into_iter()
            .flat_map(|f| f.num.iter().chain(f.den.iter()))
    })) {
        if mon.3 == 0 {
            return Err(SurfError::Parse("zero denominator in monomial".into()));
        }
    }
    Ok(m)
}

/// Built-in models (8 with invariant map, 17 cover-only).
pub fn registry_get(coeff_d: u64) -> Result<SurfaceModel, SurfError> {
    match coeff_d {
        8 => parse_surface_json(crate::data::SURFACE8_JSON),
        17 => parse_surface_json(crate::data::SURFACE17_JSON),
        _ => Err(SurfError::UnknownModel),
    }
}

fn eval_monomials<T: FieldElem>(mons: &[Monomial], r: &T, s: &T) -> T {
    let mut acc = r.zero_like();
    // reuse small power tables
    let maxr = mons.iter().map(|m| m.0).max().unwrap_or(0) as usize;
    let maxs = mons.iter().map(|m| m.1).max().unwrap_or(0) as usize;
    let mut rp = Vec::with_capacity(maxr + 1);
    rp.push(r.one_like());
    for i in 1..=maxr {
        let prev: &T = &rp[i - 1];
        rp.push(prev.mul(r));
    }
    let mut sps = Vec::with_capacity(maxs + 1);
    sps.push(r.one_like());
    for i in 1..=maxs {
        let prev: &T = &sps[i - 1];
        sps.push(prev.mul(s));
    }
    for &Monomial(dr, ds, num, den) in mons {
        let c = r
            .from_i64_like(num)
            .mul(&r.from_i64_like(den).inv().expect("invertible denominator"));
        acc = acc.add(&c.mul(&rp[dr as usize]).mul(&sps[ds as usize]));
    }
    acc
}

/// Exact value of the cover polynomial f(r,s).
pub fn eval_cover<T: FieldElem>(m: &SurfaceModel, r: &T, s: &T) -> T {
    eval_monomials(&m.cover, r, s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareClass {
    /// square in the base field (for rational inputs: a rational square)
    One,
    /// baseD times a rational square
    BaseD,
    NonSquare,
}

#[derive(Clone, Debug)]
pub struct CandidatePoint {
    pub r: QElem,
    pub s: QElem,
    pub cover_value: QElem,
    pub square_class: SquareClass,
}

fn qelem_to_rational(x: &QElem) -> Option<BigRational> {
    if x.is_rational() {
        Some(BigRational::new(x.a.clone(), x.den.clone()))
    } else {
        None
    }
}

/// Accept (r,s) iff f(r,s) is nonzero and a square in F = Q(sqrt(baseD)).
pub fn is_candidate_point(
    m: &SurfaceModel,
    field: &Arc<QuadField>,
    r: &QElem,
    s: &QElem,
) -> Option<CandidatePoint> {
    let v = eval_cover(m, r, s);
    if v.is_zero() {
        return None;
    }
    let class = match qelem_to_rational(&v) {
        Some(vr) => {
            if rat_is_square(&vr).is_some() {
                SquareClass::One
            } else if rat_is_square(&(&vr / BigRational::from(BigInt::from(field.disc())))).is_some() {
                SquareClass::BaseD
            } else {
                SquareClass::NonSquare
            }
        }
        None => {
            if is_square_in_f(&v).is_some() {
                SquareClass::One
            } else {
                SquareClass::NonSquare
            }
        }
    };
    if class == SquareClass::NonSquare {
        return None;
    }
    Some(CandidatePoint {
        r: r.clone(),
        s: s.clone(),
        cover_value: v,
        square_class: class,
    })
}

/// Rationals num/den in lowest terms with |num| <= h and 1 <= den <= h,
/// ordered by denominator then numerator.
pub fn height_values(h: u64) -> Vec<(i64, i64)> {
    let h = h as i64;
    let mut out = Vec::new();
    for den in 1..=h {
        for num in -h..=h {
            if gcd64(num.unsigned_abs(), den as u64) == 1 {
                out.push((num, den));
            }
        }
    }
    out
}

fn gcd64(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd64(b, a % b) }
}

/// Residues mod m attained by y^2 or D*y^2 (sieve acceptance set).
fn sieve_table(m: u64, base_d: u64) -> Vec<bool> {
    let mut ok = vec![false; m as usize];
    for y in 0..m {
        ok[((y * y) % m) as usize] = true;
        ok[((base_d % m) * (y * y) % m) as usize] = true;
    }
    ok
}

fn sieve_pass(
    cover: &[Monomial],
    tables: &[(u64, Vec<bool>)],
    r: (i64, i64),
    s: (i64, i64),
) -> bool {
    'modulus: for (m, tab) in tables {
        let m = *m;
        if gcd64(r.1 as u64 % m, m) != 1 || gcd64(s.1 as u64 % m, m) != 1 {
            continue; // cannot reduce this point; sieve is inconclusive
        }
        let rv = mod_frac(r.0, r.1, m);
        let sv = mod_frac(s.0, s.1, m);
        let mut acc = 0u64;
        for &Monomial(dr, ds, num, den) in cover {
            if gcd64(den.unsigned_abs() % m, m) != 1 {
                continue 'modulus;
            }
            let c = mod_frac(num, den, m);
            acc = (acc + c * pow_mod(rv, dr, m) % m * pow_mod(sv, ds, m)) % m;
        }
        if !tab[acc as usize] {
            return false;
        }
    }
    true
}

fn mod_frac(num: i64, den: i64, m: u64) -> u64 {
    let n = num.rem_euclid(m as i64) as u64;
    let d = den.rem_euclid(m as i64) as u64;
    n * inv_mod(d, m) % m
}

fn inv_mod(a: u64, m: u64) -> u64 {
    // m is tiny; brute force
    (1..m).find(|&x| a * x % m == 1).expect("invertible")
}

fn pow_mod(mut b: u64, mut e: u32, m: u64) -> u64 {
    let mut acc = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// All rational candidate points of height <= h, pre-filtered by
/// quadratic-residue sieving modulo `sieve_moduli`, then tested exactly.
pub fn enumerate_points(
    m: &SurfaceModel,
    field: &Arc<QuadField>,
    height: u64,
    sieve_moduli: &[u64],
) -> Vec<CandidatePoint> {
    let values = height_values(height);
    let tables: Vec<(u64, Vec<bool>)> = sieve_moduli
        .iter()
        .map(|&md| (md, sieve_table(md, field.disc())))
        .collect();
    let mut out = Vec::new();
    for &rv in &values {
        for &sv in &values {
            if !sieve_pass(&m.cover, &tables, rv, sv) {
                continue;
            }
            let r = qe_frac(field, rv.0, 0, rv.1);
            let s = qe_frac(field, sv.0, 0, sv.1);
            if let Some(cp) = is_candidate_point(m, field, &r, &s) {
                out.push(cp);
            }
        }
    }
    out
}

/// Candidate points with coordinates (a + b*w)/den, |a|,|b| <= num_bound,
/// pre-screened modulo split primes, then tested exactly. Deterministic
/// order regardless of thread count.
pub fn enumerate_field_points(
    m: &SurfaceModel,
    field: &Arc<QuadField>,
    num_bound: i64,
    den: i64,
) -> Vec<CandidatePoint> {
    assert!(den != 0 && num_bound >= 0);
    // residue conditions at degree-1 primes away from 2, D and den
    let mut conds: Vec<(u64, u64)> = Vec::new(); // (p, image of w)
    let mut p = 3u64;
    while conds.len() < 24 {
        if crate::finitefield::is_prime(p)
            && field.disc() % p != 0
            && den.unsigned_abs() % p != 0
            && matches!(splitting_type(field, p), SplittingType::Split)
        {
            for pr in primes_above(field, p) {
                conds.push((p, pr.root.expect("split prime has a root")));
            }
        }
        p += 2;
    }
    let n = num_bound;
    let values: Vec<(i64, i64)> = (-n..=n)
        .flat_map(|a| (-n..=n).map(move |b| (a, b)))
        .collect();
    // per condition: squares-mod-p table and residues of every value
    struct Cond {
        p: u64,
        sq: Vec<bool>,
        res: Vec<u64>, // value residues (a + b*w)/den mod p
    }
    let conds: Vec<Cond> = conds
        .iter()
        .map(|&(p, w)| {
            let mut sq = vec![false; p as usize];
            for y in 0..p {
                sq[(y * y % p) as usize] = true;
            }
            let dinv = inv_mod(den.rem_euclid(p as i64) as u64, p);
            let res = values
                .iter()
                .map(|&(a, b)| {
                    let av = a.rem_euclid(p as i64) as u64;
                    let bv = b.rem_euclid(p as i64) as u64;
                    (av + bv * w) % p * dinv % p
                })
                .collect();
            Cond { p, sq, res }
        })
        .collect();
    // cover grouped by s-degree for Horner evaluation
    let max_ds = m.cover.iter().map(|mo| mo.1).max().unwrap_or(0) as usize;
    let survivors: Vec<(usize, usize)> = (0..values.len())
        .into_par_iter()
        .flat_map_iter(|ri| {
            // per condition: coefficients of f(r, .) as polynomial in s
            let coef: Vec<Vec<u64>> = conds
                .iter()
                .map(|c| {
                    let rv = c.res[ri];
                    let mut cs = vec![0u64; max_ds + 1];
                    for &Monomial(dr, ds, num, dn) in &m.cover {
                        let v = mod_frac(num, dn, c.p) * pow_mod(rv, dr, c.p) % c.p;
                        cs[ds as usize] = (cs[ds as usize] + v) % c.p;
                    }
                    cs
                })
                .collect();
            let conds = &conds;
            (0..values.len()).filter_map(move |si| {
                for (c, cs) in conds.iter().zip(&coef) {
                    let sv = c.res[si];
                    let mut acc = 0u64;
                    for &co in cs.iter().rev() {
                        acc = (acc * sv + co) % c.p;
                    }
                    if !c.sq[acc as usize] {
                        return None;
                    }
                }
                Some((ri, si))
            })
        })
        .collect();
    let mut out = Vec::new();
    for (ri, si) in survivors {
        let (a, b) = values[ri];
        let (a2, b2) = values[si];
        let r = qe_frac(field, a, b, den);
        let s = qe_frac(field, a2, b2, den);
        if let Some(cp) = is_candidate_point(m, field, &r, &s) {
            out.push(cp);
        }
    }
    out
}

fn eval_ratfn<T: FieldElem>(f: &RatFn, r: &T, s: &T) -> Result<T, SurfError> {
    let d = eval_monomials(&f.den, r, s);
    if d.is_zero() {
        return Err(SurfError::DenominatorVanishes);
    }
    Ok(eval_monomials(&f.num, r, s).mul(&d.inv().unwrap()))
}

/// Igusa-Clebsch invariants of the surface point via the model's map.
pub fn ic_at<T: FieldElem>(m: &SurfaceModel, r: &T, s: &T) -> Result<IgusaClebsch<T>, SurfError> {
    let map = m.icmap.as_ref().ok_or(SurfError::MapMissing)?;
    Ok(IgusaClebsch {
        i2: eval_ratfn(&map.i2, r, s)?,
        i4: eval_ratfn(&map.i4, r, s)?,
        i6: eval_ratfn(&map.i6, r, s)?,
        i10: eval_ratfn(&map.i10, r, s)?,
    })
}

// ---------------------------------------------------------------------------
// reconstruction from invariants

/// Monomial c * A^a B^b C^c D^d in the quadratic/quartic/sextic/decic
/// invariants of a sextic.
type InvMono = (u8, u8, u8, u8, i64);

// Gram matrix of the three order-2 covariants y1,y2,y3 under the second
// transvectant pairing, scaled by 18 to clear denominators; the conic used
// for reconstruction is its adjugate.
const G_ENTRIES: [&[InvMono]; 6] = [
    &[(1, 1, 0, 0, 6), (0, 0, 1, 0, 36)],                       // 18*G11
    &[(0, 2, 0, 0, 12), (1, 0, 1, 0, 12)],                      // 18*G12
    &[(0, 0, 0, 1, 18)],                                        // 18*G13
    &[(0, 0, 0, 1, 18)],                                        // 18*G22
    &[(0, 3, 0, 0, 6), (1, 1, 1, 0, 8), (0, 0, 2, 0, 12)],      // 18*G23
    &[(0, 2, 1, 0, 4), (1, 0, 2, 0, 4), (0, 1, 0, 1, 9)],       // 18*G33
];

// Coefficients of the cubic sum c_ijk z_i z_j z_k (i<=j<=k) satisfying
// sum c_ijk y_i y_j y_k = LAMBDA * f identically for every sextic f.
const CUBIC: [&[InvMono]; 10] = [
    &[(0, 4, 0, 0, -18), (1, 2, 1, 0, -24), (0, 1, 2, 0, -48)], // 111
    &[(0, 2, 1, 0, -66), (1, 0, 2, 0, -48), (0, 1, 0, 1, 54)],  // 112
    &[(0, 3, 0, 0, 90), (1, 1, 1, 0, 96), (0, 0, 2, 0, 144)],   // 113
    &[(0, 3, 0, 0, 9), (1, 1, 1, 0, 36), (0, 0, 2, 0, 108)],    // 122
    &[(1, 2, 0, 0, -36), (0, 1, 1, 0, -108), (0, 0, 0, 1, -54)], // 123
    &[(0, 2, 0, 0, -126), (1, 0, 1, 0, -72)],                   // 133
    &[(0, 1, 1, 0, -9), (0, 0, 0, 1, -27)],                     // 222
    &[(0, 2, 0, 0, 27)],                                        // 223
    &[(1, 1, 0, 0, 36), (0, 0, 1, 0, 54)],                      // 233
    &[(0, 1, 0, 0, 54)],                                        // 333
];

const LAMBDA: &[InvMono] = &[
    (0, 6, 0, 0, 2),
    (1, 4, 1, 0, 8),
    (2, 2, 2, 0, 8),
    (0, 3, 2, 0, 24),
    (1, 1, 3, 0, 48),
    (0, 0, 4, 0, 72),
    (1, 3, 0, 1, -6),
    (0, 2, 1, 1, -72),
    (1, 0, 2, 1, -36),
    (0, 1, 0, 2, 27),
];

fn eval_inv<T: FieldElem>(mons: &[InvMono], v: &[T; 4]) -> T {
    let mut acc = v[0].zero_like();
    for &(a, b, c, d, coef) in mons {
        let mut t = v[0].from_i64_like(coef);
        for (x, e) in v.iter().zip([a, b, c, d]) {
            for _ in 0..e {
                t = t.mul(x);
            }
        }
        acc = acc.add(&t);
    }
    acc
}

/// Clebsch (A,B,C,D) from Igusa-Clebsch; requires characteristic not 2,3,5.
pub fn clebsch_from_ic<T: FieldElem>(ic: &IgusaClebsch<T>) -> [T; 4] {
    let k = |n: i64| ic.i2.from_i64_like(n);
    let inv = |n: i64| k(n).inv().expect("characteristic away from 2,3,5");
    let a = ic.i2.mul(&inv(-120));
    let a2 = a.mul(&a);
    let b = ic.i4.add(&a2.mul(&k(720))).mul(&inv(6750));
    let c = ic
        .i6
        .sub(&a2.mul(&a).mul(&k(8640)))
        .add(&a.mul(&b).mul(&k(108000)))
        .mul(&inv(202500));
    let d = ic
        .i10
        .add(&a2.mul(&a2).mul(&a).mul(&k(62208)))
        .sub(&a2.mul(&a).mul(&b).mul(&k(972000)))
        .sub(&a2.mul(&c).mul(&k(1620000)))
        .add(&a.mul(&b).mul(&b).mul(&k(3037500)))
        .add(&b.mul(&c).mul(&k(6075000)))
        .mul(&inv(-4556250));
    [a, b, c, d]
}

type Mat3<T> = [[T; 3]; 3];

fn adj3<T: FieldElem>(m: &Mat3<T>) -> Mat3<T> {
    let co = |r1: usize, c1: usize, r2: usize, c2: usize| {
        m[r1][c1].mul(&m[r2][c2]).sub(&m[r1][c2].mul(&m[r2][c1]))
    };
    // adjugate of a symmetric matrix is symmetric
    [
        [co(1, 1, 2, 2), co(0, 2, 2, 1), co(0, 1, 1, 2)],
        [co(1, 2, 2, 0), co(0, 0, 2, 2), co(0, 2, 1, 0)],
        [co(1, 0, 2, 1), co(0, 1, 2, 0), co(0, 0, 1, 1)],
    ]
}

fn det3<T: FieldElem>(m: &Mat3<T>) -> T {
    let a = adj3(m);
    m[0][0]
        .mul(&a[0][0])
        .add(&m[0][1].mul(&a[1][0]))
        .add(&m[0][2].mul(&a[2][0]))
}

fn quad_form<T: FieldElem>(m: &Mat3<T>, z: &[T; 3]) -> T {
    let mut acc = z[0].zero_like();
    for i in 0..3 {
        for j in 0..3 {
            acc = acc.add(&m[i][j].mul(&z[i]).mul(&z[j]));
        }
    }
    acc
}

/// product of binary forms in ascending powers of t
fn mul_forms<T: FieldElem>(a: &[T], b: &[T]) -> Vec<T> {
    let z = a[0].zero_like();
    let mut out = vec![z; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Reconstruct a genus-2 curve over F_q from Igusa-Clebsch invariants via
/// the conic-and-cubic method. The conic always has a rational point over a
/// finite field; degenerate invariant strata are reported, not guessed at.
pub fn mestre_reconstruct(
    fq: &Arc<FqField>,
    ic: &IgusaClebsch<Fqw>,
) -> Result<GenusTwoCurve<Fqw>, SurfError> {
    if matches!(fq.p(), 2 | 3 | 5) {
        return Err(SurfError::BadCharacteristic);
    }
    let abcd = clebsch_from_ic(ic);
    let lambda = eval_inv(LAMBDA, &abcd);
    if lambda.is_zero() {
        return Err(SurfError::NonGenericStratum);
    }
    let ge = |i: usize| eval_inv(G_ENTRIES[i], &abcd);
    let g: Mat3<Fqw> = [
        [ge(0), ge(1), ge(2)],
        [ge(1), ge(3), ge(4)],
        [ge(2), ge(4), ge(5)],
    ];
    if det3(&g).is_zero() {
        return Err(SurfError::NonGenericStratum);
    }
    let m = adj3(&g);
    // find a point on the conic z^T M z = 0
    let wrap = |e: FqElem| Fqw::new(fq.clone(), e);
    let zero = wrap(fq.zero());
    let one = wrap(fq.one());
    let mut point: Option<[Fqw; 3]> = None;
    'search: for x in fq.elements() {
        for y in fq.elements() {
            let z = [one.clone(), wrap(x.clone()), wrap(y)];
            if quad_form(&m, &z).is_zero() {
                point = Some(z);
                break 'search;
            }
        }
    }
    if point.is_none() {
        for y in fq.elements() {
            let z = [zero.clone(), one.clone(), wrap(y)];
            if quad_form(&m, &z).is_zero() {
                point = Some(z);
                break;
            }
        }
    }
    if point.is_none() {
        let z = [zero.clone(), zero.clone(), one.clone()];
        if quad_form(&m, &z).is_zero() {
            point = Some(z);
        }
    }
    let p0 = point.ok_or(SurfError::NonGenericStratum)?;
    // parametrize by lines through p0 in directions e_{i1}, e_{i2}
    let j0 = (0..3).find(|&i| !p0[i].is_zero()).unwrap();
    let [i1, i2] = match j0 {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    };
    let dot = |col: usize| -> Fqw {
        (0..3).fold(zero.clone(), |acc, k| acc.add(&p0[k].mul(&m[k][col])))
    };
    let (l1, l2) = (dot(i1), dot(i2));
    let (q11, q12, q22) = (m[i1][i1].clone(), m[i1][i2].clone(), m[i2][i2].clone());
    let two = one.from_i64_like(2);
    // phi_k(t,u) = Q(d)*p0_k - 2*(p0^T M d)*d_k, ascending powers of t
    let phi: Vec<Vec<Fqw>> = (0..3)
        .map(|k| {
            let d1 = if k == i1 { one.clone() } else { zero.clone() };
            let d2 = if k == i2 { one.clone() } else { zero.clone() };
            vec![
                q22.mul(&p0[k]).sub(&two.mul(&l2).mul(&d2)), // u^2
                two.mul(&q12)
                    .mul(&p0[k])
                    .sub(&two.mul(&l1.mul(&d2).add(&l2.mul(&d1)))), // t u
                q11.mul(&p0[k]).sub(&two.mul(&l1).mul(&d1)), // t^2
            ]
        })
        .collect();
    // sextic = cubic form evaluated on the parametrization
    let mut sextic = vec![zero.clone(); 7];
    let mut idx = 0;
    for i in 0..3 {
        for j in i..3 {
            for k in j..3 {
                let coef = eval_inv(CUBIC[idx], &abcd);
                idx += 1;
                if coef.is_zero() {
                    continue;
                }
                let prod = mul_forms(&mul_forms(&phi[i], &phi[j]), &phi[k]);
                for (t, v) in sextic.iter_mut().zip(&prod) {
                    *t = t.add(&coef.mul(v));
                }
            }
        }
    }
    let f = Poly::new(sextic);
    let curve =
        curve_new(f, Poly::zero(), fq.p()).map_err(|_| SurfError::NonGenericStratum)?;
    let got = curve.igusa_clebsch().map_err(|_| SurfError::BadCharacteristic)?;
    if !ic_weighted_equal(&got, ic) {
        return Err(SurfError::NonGenericStratum);
    }
    Ok(curve)
}

/// Independent oracle: brute force over monic sextics and quintics until a
/// curve with weighted-equal invariants appears. Only sensible for tiny q.
pub fn exhaustive_reconstruct(
    fq: &Arc<FqField>,
    ic: &IgusaClebsch<Fqw>,
) -> Result<GenusTwoCurve<Fqw>, SurfError> {
    if matches!(fq.p(), 2 | 3 | 5) {
        return Err(SurfError::BadCharacteristic);
    }
    let q = fq.q();
    let wrap = |e: FqElem| Fqw::new(fq.clone(), e);
    let els: Vec<Fqw> = fq.elements().map(wrap).collect();
    let one = els[0].one_like();
    let zero = els[0].zero_like();
    for deg in [6usize, 5] {
        let mut odo = vec![0usize; deg];
        loop {
            let mut c: Vec<Fqw> = odo.iter().map(|&i| els[i].clone()).collect();
            c.push(one.clone());
            if deg == 5 {
                c.push(zero.clone());
            }
            let form = BForm::new(c.clone(), 6);
            let got = igusa_clebsch_sextic(&form);
            let got = IgusaClebsch {
                i2: got[0].clone(),
                i4: got[1].clone(),
                i6: got[2].clone(),
                i10: got[3].clone(),
            };
            if ic_weighted_equal(&got, ic) {
                c.truncate(deg + 1);
                if let Ok(curve) = curve_new(Poly::new(c), Poly::zero(), fq.p()) {
                    return Ok(curve);
                }
            }
            // advance odometer
            let mut i = 0;
            loop {
                if i == deg {
                    break;
                }
                odo[i] += 1;
                if odo[i] < q as usize {
                    break;
                }
                odo[i] = 0;
                i += 1;
            }
            if i == deg {
                break;
            }
        }
    }
    Err(SurfError::NotFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::frobenius_charpoly;
    use crate::finitefield::fq_new;
    use crate::qfield::{qe, qf_new, reduce_elem, residue_field};

    fn rng_next(state: &mut u64) -> u64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        *state
    }

    #[test]
    fn registry_models() {
        let m8 = registry_get(8).unwrap();
        assert_eq!(m8.coeff_d, 8);
        assert!(m8.icmap.is_some());
        let m17 = registry_get(17).unwrap();
        assert!(m17.icmap.is_none());
        assert!(m17
            .cover
            .iter()
            .any(|&Monomial(i, j, n, d)| (i, j, n, d) == (0, 3, -256, 1)));
        assert!(matches!(registry_get(5), Err(SurfError::UnknownModel)));
    }

    #[test]
    fn cover_values() {
        let m8 = registry_get(8).unwrap();
        let f = qf_new(53).unwrap();
        let z = QElem::zero(&f);
        assert_eq!(eval_cover(&m8, &z, &z), QElem::from_i64(&f, 4));
        let m17 = registry_get(17).unwrap();
        let f193 = qf_new(193).unwrap();
        let v = eval_cover(&m17, &QElem::zero(&f193), &qe_frac(&f193, -1, 0, 4));
        assert_eq!(v, qe_frac(&f193, 193, 0, 16));
    }

    #[test]
    fn candidate_filter() {
        let m17 = registry_get(17).unwrap();
        let f193 = qf_new(193).unwrap();
        let f53 = qf_new(53).unwrap();
        let cp = is_candidate_point(
            &m17,
            &f193,
            &QElem::zero(&f193),
            &qe_frac(&f193, -1, 0, 4),
        )
        .expect("193/16 is 193 times a square");
        assert_eq!(cp.square_class, SquareClass::BaseD);
        assert!(is_candidate_point(&m17, &f53, &QElem::zero(&f53), &qe_frac(&f53, -1, 0, 4))
            .is_none());
        // branch locus rejected: f8(0, 2) = 0
        let m8 = registry_get(8).unwrap();
        assert!(
            is_candidate_point(&m8, &f53, &QElem::zero(&f53), &QElem::from_i64(&f53, 2))
                .is_none()
        );
    }

    #[test]
    fn d53_point_is_square() {
        let m8 = registry_get(8).unwrap();
        let f = qf_new(53).unwrap();
        let r = qe_frac(&f, -24, -10, 121);
        let s = qe_frac(&f, 136, -24, 121);
        let cp = is_candidate_point(&m8, &f, &r, &s).expect("the table point lies on the cover");
        assert_eq!(cp.square_class, SquareClass::One);
    }

    #[test]
    fn height_value_counts() {
        assert_eq!(height_values(1).len(), 3); // 0, 1, -1
        assert_eq!(height_values(2).len(), 7); // + 2, -2, 1/2, -1/2
    }

    #[test]
    fn sieve_soundness_small_heights() {
        let m17 = registry_get(17).unwrap();
        let f193 = qf_new(193).unwrap();
        for h in [4, 8] {
            let sieved = enumerate_points(&m17, &f193, h, &[7, 11, 13, 16, 9]);
            let plain = enumerate_points(&m17, &f193, h, &[]);
            assert_eq!(sieved.len(), plain.len(), "height {h}");
            for (a, b) in sieved.iter().zip(&plain) {
                assert_eq!((&a.r, &a.s), (&b.r, &b.s));
            }
        }
    }

    #[test]
    fn field_box_soundness() {
        let m8 = registry_get(8).unwrap();
        let f = qf_new(53).unwrap();
        let fast = enumerate_field_points(&m8, &f, 4, 11);
        let mut slow = Vec::new();
        for (a, b) in (-4..=4).flat_map(|a| (-4..=4).map(move |b| (a, b))) {
            for (a2, b2) in (-4..=4).flat_map(|a| (-4..=4).map(move |b| (a, b))) {
                let r = qe_frac(&f, a, b, 11);
                let s = qe_frac(&f, a2, b2, 11);
                if let Some(cp) = is_candidate_point(&m8, &f, &r, &s) {
                    slow.push(cp);
                }
            }
        }
        assert_eq!(fast.len(), slow.len());
        for (a, b) in fast.iter().zip(&slow) {
            assert_eq!((&a.r, &a.s), (&b.r, &b.s));
        }
    }

    #[test]
    fn icmap_at_d53_point() {
        let m8 = registry_get(8).unwrap();
        let f = qf_new(53).unwrap();
        let r = qe_frac(&f, -24, -10, 121);
        let s = qe_frac(&f, 136, -24, 121);
        let ic = ic_at(&m8, &r, &s).unwrap();
        let expect = IgusaClebsch {
            i2: qe(&f, 208, 88),
            i4: qe(&f, -1660, -588),
            i6: qe(&f, -428792, -135456),
            i10: qe(&f, 643072, 204800),
        };
        assert!(ic_weighted_equal(&ic, &expect));
        // degenerate and missing-map errors
        assert_eq!(
            ic_at(&m8, &QElem::zero(&f), &s).unwrap_err(),
            SurfError::DenominatorVanishes
        );
        let m17 = registry_get(17).unwrap();
        assert_eq!(ic_at(&m17, &r, &s).unwrap_err(), SurfError::MapMissing);
    }

    fn random_curve(fq: &Arc<FqField>, state: &mut u64) -> GenusTwoCurve<Fqw> {
        loop {
            let c: Vec<Fqw> = (0..7)
                .map(|_| Fqw::new(fq.clone(), fq.from_u64(rng_next(state) % fq.q())))
                .collect();
            if let Ok(cu) = curve_new(Poly::new(c), Poly::zero(), fq.p()) {
                if cu.s.degree().map_or(false, |d| d >= 5) {
                    return cu;
                }
            }
        }
    }

    #[test]
    fn mestre_roundtrip_random_curves() {
        let mut state = 0x5eed_5eed_1234_5678u64;
        for p in [7u64, 11, 13] {
            let fq = Arc::new(fq_new(p, 1));
            for _ in 0..17 {
                let c = random_curve(&fq, &mut state);
                let ic = c.igusa_clebsch().unwrap();
                match mestre_reconstruct(&fq, &ic) {
                    Ok(rec) => {
                        assert!(ic_weighted_equal(&rec.igusa_clebsch().unwrap(), &ic));
                    }
                    Err(SurfError::NonGenericStratum) => {} // extra-automorphism locus
                    Err(e) => panic!("unexpected {e:?}"),
                }
            }
        }
    }

    #[test]
    fn mestre_matches_exhaustive_oracle() {
        let fq = Arc::new(fq_new(7, 1));
        let mut state = 0xabcdef0123456789u64;
        let mut done = 0;
        while done < 4 {
            let c = random_curve(&fq, &mut state);
            let ic = c.igusa_clebsch().unwrap();
            let rec = match mestre_reconstruct(&fq, &ic) {
                Ok(r) => r,
                Err(SurfError::NonGenericStratum) => continue,
                Err(e) => panic!("unexpected {e:?}"),
            };
            let oracle = exhaustive_reconstruct(&fq, &ic).unwrap();
            assert!(ic_weighted_equal(
                &rec.igusa_clebsch().unwrap(),
                &oracle.igusa_clebsch().unwrap()
            ));
            // charpolys agree up to the twist T -> -T
            let a = frobenius_charpoly(&rec, &fq);
            let b = frobenius_charpoly(&oracle, &fq);
            assert!(a == b || a == b.twist());
            done += 1;
        }
    }

    #[test]
    fn exhaustive_rejects_degenerate() {
        let fq = Arc::new(fq_new(7, 1));
        let w = |n: i64| Fqw::new(fq.clone(), fq.from_i64(n));
        let ic = IgusaClebsch {
            i2: w(1),
            i4: w(1),
            i6: w(1),
            i10: w(0),
        };
        assert!(matches!(exhaustive_reconstruct(&fq, &ic), Err(SurfError::NotFound)));
        let fq3 = Arc::new(fq_new(3, 1));
        let w3 = |n: i64| Fqw::new(fq3.clone(), fq3.from_i64(n));
        let ic3 = IgusaClebsch {
            i2: w3(1),
            i4: w3(1),
            i6: w3(1),
            i10: w3(1),
        };
        assert!(matches!(mestre_reconstruct(&fq3, &ic3), Err(SurfError::BadCharacteristic)));
    }

    #[test]
    fn icmap_reduction_compatible_with_reconstruction() {
        // IC of a surface point, reduced at a good degree-1 prime, should be
        // attained by the reconstructed curve.
        let m8 = registry_get(8).unwrap();
        let f = qf_new(53).unwrap();
        let mut state = 0x1357_9bdf_2468_aceu64;
        let mut done = 0;
        while done < 6 {
            let a = (rng_next(&mut state) % 9) as i64 - 4;
            let b = (rng_next(&mut state) % 9) as i64 - 4;
            let r = qe_frac(&f, a, b, 3);
            let s = qe_frac(&f, (rng_next(&mut state) % 9) as i64 - 4, 1, 2);
            if r.is_zero() || s.is_zero() {
                continue;
            }
            let Ok(ic) = ic_at(&m8, &r, &s) else { continue };
            // reduce at a split prime of norm 7 or 11...
            let p = [7u64, 11, 13, 29]
                .into_iter()
                .flat_map(|p| primes_above(&f, p))
                .find(|pr| pr.deg == 1)
                .unwrap();
            let (rf, wimg) = residue_field(&f, &p);
            let rf = Arc::new(rf);
            let red = |x: &QElem| -> Option<Fqw> {
                reduce_elem(&f, &p, &rf, &wimg, x).ok().map(|e| Fqw::new(rf.clone(), e))
            };
            let (Some(i2), Some(i4), Some(i6), Some(i10)) =
                (red(&ic.i2), red(&ic.i4), red(&ic.i6), red(&ic.i10))
            else {
                continue;
            };
            if i10.is_zero() {
                continue; // bad reduction for this point
            }
            let icp = IgusaClebsch { i2, i4, i6, i10 };
            match mestre_reconstruct(&rf, &icp) {
                Ok(c) => {
                    assert!(ic_weighted_equal(&c.igusa_clebsch().unwrap(), &icp));
                    done += 1;
                }
                Err(SurfError::NonGenericStratum) => continue,
                Err(e) => panic!("unexpected {e:?}"),
            }
        }
    }

    #[test]
    fn parse_rejects_bad_documents() {
        assert!(matches!(parse_surface_json("{"), Err(SurfError::Parse(_))));
        assert!(matches!(
            parse_surface_json(r#"{"coeffD": 8, "cover": []}"#),
            Err(SurfError::Parse(_))
        ));
        assert!(matches!(
            parse_surface_json(r#"{"coeffD": 8, "cover": [[0,0,1,0]]}"#),
            Err(SurfError::Parse(_))
        ));
    }
}
