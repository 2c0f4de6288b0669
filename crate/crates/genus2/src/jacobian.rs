//! Mumford-representation divisor arithmetic (Cantor's algorithm) on
//! odd-degree models y^2 + h(x) y = f(x), deg f = 5, over finite fields.

use std::sync::Arc;

use thiserror::Error;

use crate::curve::{curve_over_fq, reduce_mod, CurveError, GenusTwoCurve};
use crate::finitefield::FqField;
use crate::poly::{FieldElem, Fqw, Poly};
use crate::qfield::{reduce_elem, residue_field, PrimeIdeal, QElem, QuadField};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JacError {
    #[error("the model has no rational Weierstrass point")]
    NoRationalWeierstrassPoint,
    #[error("prime unusable for this verification")]
    Skip,
    #[error("reduction of the model is singular")]
    BadReduction,
}

/// Odd-degree model with the data needed to map points from the source model:
/// u = 1/(x - x0), v = (y + adj(x)) u^3.
pub struct OddModel {
    pub curve: GenusTwoCurve<Fqw>,
    pub fq: Arc<FqField>,
    pub x0: Fqw,
    adj: Poly<Fqw>,
}

/// Move a rational Weierstrass point of C to infinity. In odd characteristic
/// the Weierstrass x-coordinates are the roots of S = 4P+Q^2; in
/// characteristic 2 they are the roots of Q.
pub fn to_odd_model(
    c: &GenusTwoCurve<Fqw>,
    fq: &Arc<FqField>,
) -> Result<OddModel, JacError> {
    to_odd_model_avoiding(c, fq, &[])
}

/// As `to_odd_model`, but never moves one of the listed x-coordinates to
/// infinity (the caller still needs to map affine points there).
pub fn to_odd_model_avoiding(
    c: &GenusTwoCurve<Fqw>,
    fq: &Arc<FqField>,
    avoid: &[Fqw],
) -> Result<OddModel, JacError> {
    let one = Fqw::new(fq.clone(), fq.one());
    let ram = if fq.p() == 2 { &c.q } else { &c.s };
    for x in fq.elements() {
        let x0 = Fqw::new(fq.clone(), x);
        if avoid.contains(&x0) || !ram.eval(&x0).is_zero() {
            continue;
        }
        let sh = Poly::new(vec![x0.clone(), one.clone()]); // x + x0
        if fq.p() == 2 {
            let h = c.q.compose(&sh).reverse(3);
            let ft = c.p.compose(&sh).reverse(6);
            // kill the u^6 term with y -> y + c u^3, c = sqrt(P(x0))
            let c6 = ft.coeff(6, &one);
            let cc = Fqw::new(fq.clone(), fq.sqrt(&c6.elem).expect("char 2 sqrt"));
            let f = ft
                .sub(&Poly::new(vec![cc.mul(&cc)]).shift(6))
                .sub(&h.scal(&cc).shift(3));
            if f.degree() != Some(5) {
                continue;
            }
            let Ok(curve) = curve_over_fq(f, h, fq) else {
                continue;
            };
            return Ok(OddModel {
                curve,
                fq: fq.clone(),
                x0,
                adj: Poly::constant(cc),
            });
        } else {
            let f = c.s.compose(&sh).reverse(6).scal(
                &one.from_i64_like(4).inv().unwrap(),
            );
            debug_assert_eq!(f.degree(), Some(5)); // S squarefree
            let curve = curve_over_fq(f, Poly::zero(), fq).expect("isomorphic model");
            let half = one.from_i64_like(2).inv().unwrap();
            return Ok(OddModel {
                curve,
                fq: fq.clone(),
                x0,
                adj: c.q.scal(&half),
            });
        }
    }
    Err(JacError::NoRationalWeierstrassPoint)
}

impl OddModel {
    /// Image of an affine point (x, y) of the source model, x != x0.
    pub fn map_point(&self, x: &Fqw, y: &Fqw) -> Option<(Fqw, Fqw)> {
        let u = x.sub(&self.x0).inv()?;
        let u3 = u.mul(&u).mul(&u);
        let v = y.add(&self.adj.eval(x)).mul(&u3);
        debug_assert!(self.on_curve(&u, &v));
        Some((u, v))
    }

    pub fn on_curve(&self, x: &Fqw, y: &Fqw) -> bool {
        y.mul(y)
            .add(&self.curve.q.eval(x).mul(y))
            .sub(&self.curve.p.eval(x))
            .is_zero()
    }
}

/// Reduced Mumford divisor (u monic, deg u <= 2, deg v < deg u,
/// u | v^2 + vh - f); the identity is (1, 0).
#[derive(Clone, Debug, PartialEq)]
pub struct MumfordDivisor {
    pub u: Poly<Fqw>,
    pub v: Poly<Fqw>,
}

pub fn identity(fq: &Arc<FqField>) -> MumfordDivisor {
    MumfordDivisor {
        u: Poly::constant(Fqw::new(fq.clone(), fq.one())),
        v: Poly::zero(),
    }
}

impl MumfordDivisor {
    pub fn is_identity(&self) -> bool {
        self.u.degree() == Some(0)
    }

    pub fn from_point(x: &Fqw, y: &Fqw) -> MumfordDivisor {
        MumfordDivisor {
            u: Poly::x_minus(x),
            v: Poly::constant(y.clone()),
        }
    }
}

pub fn is_valid(m: &OddModel, d: &MumfordDivisor) -> bool {
    if d.u.lc().map_or(true, |l| *l != l.one_like()) {
        return false;
    }
    if d.u.degree() > Some(2) || (!d.v.is_zero() && d.v.degree() >= d.u.degree()) {
        return false;
    }
    d.v.mul(&d.v)
        .add(&d.v.mul(&m.curve.q))
        .sub(&m.curve.p)
        .rem(&d.u)
        .is_zero()
}

/// Monic extended gcd: g = s a + t b.
fn ext_gcd(a: &Poly<Fqw>, b: &Poly<Fqw>, w: &Fqw) -> (Poly<Fqw>, Poly<Fqw>, Poly<Fqw>) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::constant(w.one_like()), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::constant(w.one_like()));
    while !r1.is_zero() {
        let (q, r2) = r0.divrem(&r1);
        let s2 = s0.sub(&q.mul(&s1));
        let t2 = t0.sub(&q.mul(&t1));
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let linv = r0.lc().expect("gcd of nonzero input").inv().unwrap();
    let li = Fqw::new(w.field.clone(), linv.elem);
    (r0.scal(&li), s0.scal(&li), t0.scal(&li))
}

/// Cantor composition + reduction.
pub fn cantor_add(m: &OddModel, a: &MumfordDivisor, b: &MumfordDivisor) -> MumfordDivisor {
    let w = Fqw::new(m.fq.clone(), m.fq.one());
    let f = &m.curve.p;
    let h = &m.curve.q;
    let (d1, e1, e2) = ext_gcd(&a.u, &b.u, &w);
    let sum = a.v.add(&b.v).add(h);
    let (d, c1, c2) = if sum.is_zero() {
        (d1.clone(), Poly::constant(w.one_like()), Poly::zero())
    } else {
        let (d, c1, c2) = ext_gcd(&d1, &sum, &w);
        (d, c1.mul(&Poly::constant(w.one_like())), c2)
    };
    // adjust cofactors: d = (c1 e1) u1 + (c1 e2) u2 + c2 (v1+v2+h)
    let s1 = c1.mul(&e1);
    let s2 = c1.mul(&e2);
    let s3 = c2;
    let (mut u, r) = a.u.mul(&b.u).divrem(&d.mul(&d));
    debug_assert!(r.is_zero());
    let num = s1
        .mul(&a.u)
        .mul(&b.v)
        .add(&s2.mul(&b.u).mul(&a.v))
        .add(&s3.mul(&a.v.mul(&b.v).add(f)));
    let (vq, vr) = num.divrem(&d);
    debug_assert!(vr.is_zero());
    let mut v = vq.rem(&u);
    // reduction to deg u <= genus
    while u.degree().map_or(0, |d| d) > 2 {
        let num = f.sub(&v.mul(h)).sub(&v.mul(&v));
        let (unew, r) = num.divrem(&u);
        debug_assert!(r.is_zero());
        let unew = unew.monic();
        v = h.neg().sub(&v).rem(&unew);
        u = unew;
    }
    u = u.monic();
    v = v.rem(&u);
    debug_assert!(is_valid(m, &MumfordDivisor { u: u.clone(), v: v.clone() }));
    MumfordDivisor { u, v }
}

/// Inverse class: v -> -v - h mod u.
pub fn cantor_neg(m: &OddModel, a: &MumfordDivisor) -> MumfordDivisor {
    let v = m.curve.q.neg().sub(&a.v).rem(&a.u);
    MumfordDivisor { u: a.u.clone(), v }
}

pub fn scalar_mul(m: &OddModel, n: u64, a: &MumfordDivisor) -> MumfordDivisor {
    let mut acc = identity(&m.fq);
    let mut base = a.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = cantor_add(m, &acc, &base);
        }
        n >>= 1;
        if n > 0 {
            base = cantor_add(m, &base, &base);
        }
    }
    acc
}

/// True iff the class of `a` has order exactly n.
pub fn has_exact_order(m: &OddModel, a: &MumfordDivisor, n: u64) -> bool {
    if !scalar_mul(m, n, a).is_identity() {
        return false;
    }
    let mut rest = n;
    let mut p = 2;
    let mut prime_divs = Vec::new();
    while p * p <= rest {
        if rest % p == 0 {
            prime_divs.push(p);
            while rest % p == 0 {
                rest /= p;
            }
        }
        p += 1;
    }
    if rest > 1 {
        prime_divs.push(rest);
    }
    prime_divs
        .iter()
        .all(|&p| !scalar_mul(m, n / p, a).is_identity())
}

/// A point with x-coordinate a root alpha of a quadratic over the base field
/// and y-coordinate a polynomial in alpha.
pub struct QuadraticPoint {
    /// monic quadratic minimal polynomial of alpha
    pub minpoly: Poly<QElem>,
    /// y as a polynomial in alpha
    pub y: Poly<QElem>,
}

/// Reduce the point pair {P, sigma'(P)} modulo `prime`, form the class of
/// P + sigma'(P) minus the degree-2 divisor at infinity on an odd model, and
/// check that it has order exactly n.
///
/// The two points at infinity of the source model map to the pair of points
/// over u = 0 of the odd model; they are conjugate under the hyperelliptic
/// involution, so their divisor minus twice infinity is principal and no
/// correction term is needed.
pub fn verify_torsion_order(
    field: &Arc<QuadField>,
    c: &GenusTwoCurve<QElem>,
    point: &QuadraticPoint,
    n: u64,
    prime: &PrimeIdeal,
) -> Result<bool, JacError> {
    let r = reduce_mod(field, c, prime).map_err(|e| match e {
        CurveError::DenominatorClash => JacError::Skip,
        _ => JacError::BadReduction,
    })?;
    let (fq, wimg) = residue_field(field, prime);
    let fq = Arc::new(fq);
    let red_poly = |p: &Poly<QElem>| -> Result<Poly<Fqw>, JacError> {
        let mut out = Vec::new();
        for coef in &p.c {
            let v = reduce_elem(field, prime, &fq, &wimg, coef).map_err(|_| JacError::Skip)?;
            out.push(Fqw::new(fq.clone(), v));
        }
        Ok(Poly::new(out))
    };
    let mp = red_poly(&point.minpoly)?;
    let yp = red_poly(&point.y)?;
    if mp.degree() != Some(2) {
        return Err(JacError::Skip);
    }
    // rational roots of the reduced minimal polynomial
    let roots: Vec<Fqw> = fq
        .elements()
        .map(|e| Fqw::new(fq.clone(), e))
        .filter(|x| mp.eval(x).is_zero())
        .collect();
    let double_root = roots.len() == 1 && mp.derivative().eval(&roots[0]).is_zero();
    if roots.len() != 2 && !double_root {
        return Err(JacError::Skip);
    }
    let model = to_odd_model_avoiding(&r, &fq, &roots).map_err(|_| JacError::Skip)?;
    let mut imgs = Vec::new();
    for alpha in &roots {
        let y = yp.eval(alpha);
        // the reduced point must lie on the reduced model
        if !y
            .mul(&y)
            .add(&r.q.eval(alpha).mul(&y))
            .sub(&r.p.eval(alpha))
            .is_zero()
        {
            return Err(JacError::BadReduction);
        }
        let Some(img) = model.map_point(alpha, &y) else {
            return Err(JacError::Skip); // point collides with the moved root
        };
        imgs.push(img);
    }
    let d = if double_root {
        // alpha = sigma'(alpha): D = 2(P) - 2*infinity, via the tangent line
        // v = v1 + m (X - u1) with (X - u1)^2 | v^2 + vh - f
        let (u1, v1) = &imgs[0];
        let f = &model.curve.p;
        let h = &model.curve.q;
        let den = v1.from_i64_like(2).mul(v1).add(&h.eval(u1));
        let Some(dinv) = den.inv() else {
            return Err(JacError::Skip); // the point reduces to a Weierstrass point
        };
        let m = f
            .derivative()
            .eval(u1)
            .sub(&v1.mul(&h.derivative().eval(u1)))
            .mul(&dinv);
        let xm = Poly::x_minus(u1);
        let d = MumfordDivisor {
            u: xm.mul(&xm),
            v: Poly::constant(v1.clone()).add(&xm.scal(&m)),
        };
        debug_assert!(is_valid(&model, &d));
        d
    } else {
        let d0 = MumfordDivisor::from_point(&imgs[0].0, &imgs[0].1);
        let d1 = MumfordDivisor::from_point(&imgs[1].0, &imgs[1].1);
        cantor_add(&model, &d0, &d1)
    };
    Ok(has_exact_order(&model, &d, n))
}

/// All affine points of the odd model with the given x (used by tests).
pub fn points_at_x(m: &OddModel, x: &Fqw) -> Vec<(Fqw, Fqw)> {
    m.fq
        .elements()
        .map(|e| Fqw::new(m.fq.clone(), e))
        .filter(|y| m.on_curve(x, y))
        .map(|y| (x.clone(), y.clone()))
        .collect()
}
