//! Dense univariate polynomials over an abstract field.
//!
//! Field elements carry their own context (a `QElem` knows its field, an
//! `Fqw` wraps the finite-field handle), so constructors that need a fresh
//! zero or one take a witness element.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::Debug;
use std::sync::Arc;

use crate::finitefield::{FqElem, FqField};
use crate::qfield::QElem;

pub trait FieldElem: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
}

impl FieldElem for QElem {
    fn zero_like(&self) -> Self {
        QElem::zero(&self.field)
    }
    fn one_like(&self) -> Self {
        QElem::one(&self.field)
    }
    fn from_i64_like(&self, n: i64) -> Self {
        QElem::from_i64(&self.field, n)
    }
    fn add(&self, o: &Self) -> Self {
        QElem::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        QElem::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        QElem::mul(self, o)
    }
    fn neg(&self) -> Self {
        QElem::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        QElem::inv(self)
    }
    fn is_zero(&self) -> bool {
        QElem::is_zero(self)
    }
}

impl FieldElem for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn from_i64_like(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Finite-field element together with its field handle.
#[derive(Clone, PartialEq)]
pub struct Fqw {
    pub field: Arc<FqField>,
    pub elem: FqElem,
}

impl Fqw {
    pub fn new(field: Arc<FqField>, elem: FqElem) -> Fqw {
        Fqw { field, elem }
    }
}

impl Debug for Fqw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.elem.coeffs())
    }
}

impl FieldElem for Fqw {
    fn zero_like(&self) -> Self {
        Fqw::new(self.field.clone(), self.field.zero())
    }
    fn one_like(&self) -> Self {
        Fqw::new(self.field.clone(), self.field.one())
    }
    fn from_i64_like(&self, n: i64) -> Self {
        Fqw::new(self.field.clone(), self.field.from_i64(n))
    }
    fn add(&self, o: &Self) -> Self {
        Fqw::new(self.field.clone(), self.field.add(&self.elem, &o.elem))
    }
    fn sub(&self, o: &Self) -> Self {
        Fqw::new(self.field.clone(), self.field.sub(&self.elem, &o.elem))
    }
    fn mul(&self, o: &Self) -> Self {
        Fqw::new(self.field.clone(), self.field.mul(&self.elem, &o.elem))
    }
    fn neg(&self) -> Self {
        Fqw::new(self.field.clone(), self.field.neg(&self.elem))
    }
    fn inv(&self) -> Option<Self> {
        self.field
            .inv(&self.elem)
            .map(|e| Fqw::new(self.field.clone(), e))
    }
    fn is_zero(&self) -> bool {
        self.field.is_zero(&self.elem)
    }
}

/// Coefficients in increasing degree; no trailing zeros (empty = zero poly).
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<T: FieldElem> {
    pub c: Vec<T>,
}

impl<T: FieldElem> Poly<T> {
    pub fn new(mut c: Vec<T>) -> Poly<T> {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Poly<T> {
        Poly { c: vec![] }
    }

    pub fn constant(v: T) -> Poly<T> {
        Poly::new(vec![v])
    }

    pub fn x_minus(a: &T) -> Poly<T> {
        Poly::new(vec![a.neg(), a.one_like()])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn lc(&self) -> Option<&T> {
        self.c.last()
    }

    pub fn coeff(&self, i: usize, witness: &T) -> T {
        self.c.get(i).cloned().unwrap_or_else(|| witness.zero_like())
    }

    pub fn add(&self, o: &Poly<T>) -> Poly<T> {
        let n = self.c.len().max(o.c.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let v = match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.push(v);
        }
        Poly::new(out)
    }

    pub fn sub(&self, o: &Poly<T>) -> Poly<T> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly<T> {
        Poly {
            c: self.c.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn mul(&self, o: &Poly<T>) -> Poly<T> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let z = self.c[0].zero_like();
        let mut out = vec![z; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }

    pub fn scal(&self, s: &T) -> Poly<T> {
        Poly::new(self.c.iter().map(|a| a.mul(s)).collect())
    }

    pub fn scal_i64(&self, s: i64) -> Poly<T> {
        if self.is_zero() {
            return Poly::zero();
        }
        let sv = self.c[0].from_i64_like(s);
        self.scal(&sv)
    }

    pub fn shift(&self, k: usize) -> Poly<T> {
        if self.is_zero() {
            return Poly::zero();
        }
        let z = self.c[0].zero_like();
        let mut out = vec![z; k];
        out.extend(self.c.iter().cloned());
        Poly::new(out)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = x.zero_like();
        for a in self.c.iter().rev() {
            acc = acc.mul(x).add(a);
        }
        acc
    }

    pub fn derivative(&self) -> Poly<T> {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.mul(&a.from_i64_like(i as i64)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Poly<T> {
        match self.lc() {
            None => Poly::zero(),
            Some(l) => self.scal(&l.inv().expect("nonzero leading coefficient")),
        }
    }

    pub fn divrem(&self, d: &Poly<T>) -> (Poly<T>, Poly<T>) {
        let dd = d.degree().expect("division by zero polynomial");
        let linv = d.lc().unwrap().inv().expect("unit leading coefficient");
        let mut rem = self.c.clone();
        if rem.len() < dd + 1 {
            return (Poly::zero(), self.clone());
        }
        let z = d.c[0].zero_like();
        let mut quo = vec![z; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = rem[i].mul(&linv);
            quo[i - dd] = q.clone();
            for (j, dc) in d.c.iter().enumerate() {
                rem[i - dd + j] = rem[i - dd + j].sub(&q.mul(dc));
            }
        }
        (Poly::new(quo), Poly::new(rem))
    }

    pub fn rem(&self, d: &Poly<T>) -> Poly<T> {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &Poly<T>) -> Poly<T> {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Res(self, o) via the Euclidean remainder chain.
    pub fn resultant(&self, o: &Poly<T>) -> T {
        let witness = self
            .c
            .first()
            .or_else(|| o.c.first())
            .expect("resultant of zero polynomials")
            .clone();
        let mut a = self.clone();
        let mut b = o.clone();
        let mut acc = witness.one_like();
        loop {
            let (da, db) = match (a.degree(), b.degree()) {
                (Some(da), Some(db)) => (da, db),
                _ => return witness.zero_like(),
            };
            if db == 0 {
                // res(a, const) = const^deg(a)
                let mut p = witness.one_like();
                for _ in 0..da {
                    p = p.mul(&b.c[0]);
                }
                return acc.mul(&p);
            }
            let r = a.rem(&b);
            let dr = r.degree();
            // res(a,b) = (-1)^(da*db) lc(b)^(da - dr) res(b, r)
            let sign = if (da * db) % 2 == 1 { -1 } else { 1 };
            let drop = da - dr.map_or(0, |d| d);
            let mut lcp = witness.one_like();
            for _ in 0..drop {
                lcp = lcp.mul(b.lc().unwrap());
            }
            if r.is_zero() {
                return witness.zero_like();
            }
            acc = acc.mul(&lcp).mul(&witness.from_i64_like(sign));
            a = b;
            b = r;
        }
    }

    /// disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lc(f), n = deg f.
    pub fn discriminant(&self) -> T {
        let n = self.degree().expect("discriminant of zero polynomial");
        let res = self.resultant(&self.derivative());
        let lcinv = self.lc().unwrap().inv().unwrap();
        let sign = if (n * (n - 1) / 2) % 2 == 1 { -1 } else { 1 };
        res.mul(&lcinv).mul(&self.c[0].from_i64_like(sign))
    }

    /// Composition self(g(x)).
    pub fn compose(&self, g: &Poly<T>) -> Poly<T> {
        let mut acc = Poly::zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(a.clone()));
        }
        acc
    }

    /// Coefficient reversal against a fixed degree bound: x^n * f(1/x).
    pub fn reverse(&self, n: usize) -> Poly<T> {
        if self.is_zero() {
            return Poly::zero();
        }
        assert!(self.c.len() <= n + 1);
        let z = self.c[0].zero_like();
        let mut out = vec![z; n + 1];
        for (i, a) in self.c.iter().enumerate() {
            out[n - i] = a.clone();
        }
        Poly::new(out)
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_is_square(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finitefield::fq_new;

    fn qp(c: &[(i64, i64)]) -> Poly<BigRational> {
        Poly::new(c.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn divrem_roundtrip() {
        let f = qp(&[(3, 1), (0, 1), (1, 1), (2, 1), (5, 1)]);
        let d = qp(&[(1, 2), (1, 1), (3, 1)]);
        let (q, r) = f.divrem(&d);
        assert_eq!(q.mul(&d).add(&r), f);
        assert!(r.degree().unwrap() < d.degree().unwrap());
    }

    #[test]
    fn gcd_common_factor() {
        let g = qp(&[(1, 1), (2, 1), (1, 1)]);
        let a = g.mul(&qp(&[(3, 1), (1, 1)]));
        let b = g.mul(&qp(&[(-1, 1), (0, 1), (1, 1)]));
        assert_eq!(a.gcd(&b), g.monic());
    }

    #[test]
    fn resultant_quadratics() {
        // res(x^2-1, x^2-4) = 9
        let a = qp(&[(-1, 1), (0, 1), (1, 1)]);
        let b = qp(&[(-4, 1), (0, 1), (1, 1)]);
        assert_eq!(a.resultant(&b), rat(9, 1));
        // res with shared root = 0
        let c = qp(&[(-2, 1), (1, 1)]).mul(&qp(&[(5, 1), (1, 1)]));
        let d = qp(&[(-2, 1), (1, 1)]).mul(&qp(&[(7, 1), (1, 1)]));
        assert_eq!(c.resultant(&d), rat(0, 1));
    }

    #[test]
    fn discriminant_examples() {
        // disc(ax^2+bx+c) = b^2-4ac
        let f = qp(&[(5, 1), (3, 1), (2, 1)]);
        assert_eq!(f.discriminant(), rat(9 - 40, 1));
        // disc(x^3+px+q) = -4p^3-27q^2
        let g = qp(&[(2, 1), (-1, 1), (0, 1), (1, 1)]);
        assert_eq!(g.discriminant(), rat(4 - 108, 1));
        // product formula check: disc((x-1)(x-2)(x-3)) = 4
        let h = qp(&[(-6, 1), (11, 1), (-6, 1), (1, 1)]);
        assert_eq!(h.discriminant(), rat(4, 1));
    }

    #[test]
    fn fq_poly_gcd() {
        let f7 = Arc::new(fq_new(7, 1));
        let w = |n: i64| Fqw::new(f7.clone(), f7.from_i64(n));
        // (x-2)(x-3) and (x-2)(x-5) over F_7
        let a = Poly::x_minus(&w(2)).mul(&Poly::x_minus(&w(3)));
        let b = Poly::x_minus(&w(2)).mul(&Poly::x_minus(&w(5)));
        let g = a.gcd(&b);
        assert_eq!(g, Poly::x_minus(&w(2)));
    }

    #[test]
    fn compose_reverse() {
        let f = qp(&[(1, 1), (0, 1), (1, 1)]); // x^2+1
        let g = qp(&[(1, 1), (2, 1)]); // 2x+1
        assert_eq!(f.compose(&g), qp(&[(2, 1), (4, 1), (4, 1)]));
        let h = qp(&[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(h.reverse(2), qp(&[(3, 1), (2, 1), (1, 1)]));
        assert_eq!(h.reverse(3), qp(&[(0, 1), (3, 1), (2, 1), (1, 1)]));
    }
}
