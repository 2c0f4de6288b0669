//! Point counting over F_q and Frobenius characteristic polynomials.

use std::sync::Arc;

use crate::curve::GenusTwoCurve;
use crate::finitefield::{fq_new, FqElem, FqField};
use crate::poly::{Fqw, Poly};

/// chi(T) = T^4 - s T^3 + t T^2 - q s T + q^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrobeniusQuartic {
    pub q: u64,
    pub s: i64,
    pub t: i64,
}

impl FrobeniusQuartic {
    pub fn chi_at(&self, x: i128) -> i128 {
        let (q, s, t) = (self.q as i128, self.s as i128, self.t as i128);
        x * x * x * x - s * x * x * x + t * x * x - q * s * x + q * q
    }

    /// #Jac(F_q) = chi(1).
    pub fn group_order(&self) -> u64 {
        let v = self.chi_at(1);
        assert!(v > 0, "Jacobian order must be positive");
        v as u64
    }

    /// Characteristic polynomial of the quadratic twist: chi(-T).
    pub fn twist(&self) -> FrobeniusQuartic {
        FrobeniusQuartic {
            q: self.q,
            s: -self.s,
            t: self.t,
        }
    }

    /// Weil bounds |s| <= 4 sqrt(q), |t| <= 6q.
    pub fn weil_ok(&self) -> bool {
        let s = self.s as i128;
        let t = self.t as i128;
        let q = self.q as i128;
        s * s <= 16 * q && t.abs() <= 6 * q
    }

    /// Predicted #C(F_{q^m}) for m <= 4 via Newton's identities on the
    /// power sums p_k of the Frobenius eigenvalues: N_m = q^m + 1 - p_m.
    pub fn predicted_count(&self, m: u32) -> i128 {
        let (q, s, t) = (self.q as i128, self.s as i128, self.t as i128);
        let p1 = s;
        let p2 = s * p1 - 2 * t;
        let p3 = s * p2 - t * p1 + 3 * q * s;
        let p4 = s * p3 - t * p2 + q * s * p1 - 4 * q * q;
        let p = match m {
            1 => p1,
            2 => p2,
            3 => p3,
            4 => p4,
            _ => panic!("predicted_count supports m <= 4"),
        };
        q.pow(m) + 1 - p
    }
}

/// Quadratic character with chi(0) = 0.
fn chi(fq: &Arc<FqField>, e: &FqElem) -> i64 {
    if fq.is_zero(e) {
        0
    } else if fq.is_square(e) {
        1
    } else {
        -1
    }
}

/// #C(F_q) on the smooth projective model.
pub fn count_points(c: &GenusTwoCurve<Fqw>, fq: &Arc<FqField>) -> u64 {
    let mut n: u64 = 0;
    if fq.p() == 2 {
        for x in fq.elements() {
            let xw = Fqw::new(fq.clone(), x);
            let b = c.q.eval(&xw);
            let v = c.p.eval(&xw);
            n += fq
                .artin_schreier_count(&b.elem, &v.elem)
                .expect("characteristic 2");
        }
        // infinity: Y^2 + q3 Y = p6
        let q3 = poly_coeff(&c.q, 3, fq);
        let p6 = poly_coeff(&c.p, 6, fq);
        n += fq
            .artin_schreier_count(&q3, &p6)
            .expect("characteristic 2");
    } else {
        // per x: solutions of (2y+Q)^2 = S(x), i.e. 1 + chi(S(x))
        for x in fq.elements() {
            let xw = Fqw::new(fq.clone(), x);
            let s = c.s.eval(&xw);
            n = (n as i64 + 1 + chi(fq, &s.elem)) as u64;
        }
        // infinity: (2Y+q3)^2 = s6, the degree-6 coefficient of S
        let s6 = poly_coeff(&c.s, 6, fq);
        n = (n as i64 + 1 + chi(fq, &s6)) as u64;
    }
    n
}

fn poly_coeff(p: &Poly<Fqw>, i: usize, fq: &Arc<FqField>) -> FqElem {
    p.c.get(i).map(|c| c.elem.clone()).unwrap_or_else(|| fq.zero())
}

/// Image of the generator of `small` inside `big` (a root of small's modulus).
fn subfield_generator_image(small: &Arc<FqField>, big: &Arc<FqField>) -> FqElem {
    assert_eq!(small.p(), big.p());
    assert_eq!(big.k() % small.k(), 0);
    if small.k() == 1 {
        return big.zero();
    }
    let modl: Vec<u64> = small.modulus().to_vec();
    big.elements()
        .find(|t| {
            let mut acc = big.zero();
            for &c in modl.iter().rev() {
                acc = big.add(&big.mul(&acc, t), &big.from_u64(c));
            }
            big.is_zero(&acc)
        })
        .expect("modulus splits in the extension")
}

/// Base change to F_{q^m}: returns the extension field and the lifted curve.
pub fn extend_curve(
    c: &GenusTwoCurve<Fqw>,
    fq: &Arc<FqField>,
    m: usize,
) -> (Arc<FqField>, GenusTwoCurve<Fqw>) {
    let big = Arc::new(fq_new(fq.p(), fq.k() * m));
    let tau = subfield_generator_image(fq, &big);
    let embed = |e: &Fqw| -> Fqw {
        let mut acc = big.zero();
        for &c in e.elem.coeffs().iter().rev() {
            acc = big.add(&big.mul(&acc, &tau), &big.from_u64(c));
        }
        Fqw::new(big.clone(), acc)
    };
    let lift = |p: &Poly<Fqw>| Poly::new(p.c.iter().map(embed).collect());
    let lifted = GenusTwoCurve {
        p: lift(&c.p),
        q: lift(&c.q),
        s: lift(&c.s),
        characteristic: c.characteristic,
    };
    (big, lifted)
}

/// s = q+1-#C(F_q); t = (s^2 - s2)/2 with s2 = q^2+1-#C(F_{q^2}).
pub fn frobenius_charpoly(c: &GenusTwoCurve<Fqw>, fq: &Arc<FqField>) -> FrobeniusQuartic {
    let q = fq.q();
    let n1 = count_points(c, fq);
    let (fq2, c2) = extend_curve(c, fq, 2);
    let n2 = count_points(&c2, &fq2);
    let s = q as i64 + 1 - n1 as i64;
    let s2 = (q as i64) * (q as i64) + 1 - n2 as i64;
    let t2 = s * s - s2;
    assert_eq!(t2 % 2, 0);
    FrobeniusQuartic { q, s, t: t2 / 2 }
}

pub fn jacobian_order(c: &GenusTwoCurve<Fqw>, fq: &Arc<FqField>) -> u64 {
    frobenius_charpoly(c, fq).group_order()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{curve_over_fq, reduce_mod};
    use crate::qfield::{primes_above, qe, qf_new, QElem};

    fn fq_curve(
        p: u64,
        k: usize,
        pc: &[i64],
        qc: &[i64],
    ) -> (Arc<FqField>, GenusTwoCurve<Fqw>) {
        let f = Arc::new(fq_new(p, k));
        let w = |n: &i64| Fqw::new(f.clone(), f.from_i64(*n));
        let pp = Poly::new(pc.iter().map(w).collect());
        let qq = Poly::new(qc.iter().map(w).collect());
        let c = curve_over_fq(pp, qq, &f).unwrap();
        (f, c)
    }

    #[test]
    fn char2_counts() {
        // y^2 + y = x^5
        let (f2, c) = fq_curve(2, 1, &[0, 0, 0, 0, 0, 1], &[1]);
        assert_eq!(count_points(&c, &f2), 3);
        let (f4, c4) = extend_curve(&c, &f2, 2);
        assert_eq!(count_points(&c4, &f4), 5);
        let chi = frobenius_charpoly(&c, &f2);
        assert_eq!((chi.s, chi.t), (0, 0));
        assert_eq!(chi.group_order(), 5);
    }

    #[test]
    fn c53_norm7_prime() {
        let k = qf_new(53).unwrap();
        let c = crate::curve::curve_new(
            Poly::new(
                [[9, 14], [-137, -9], [-25, 45], [-122, 5], [-27, 12], [-17, 1], [-4, 0]]
                    .iter()
                    .map(|t| qe(&k, t[0], t[1]))
                    .collect(),
            ),
            Poly::new(
                [[1, 1], [0, 0], [0, 1], [0, 1]]
                    .iter()
                    .map(|t| qe(&k, t[0], t[1]))
                    .collect(),
            ),
            0,
        )
        .unwrap();
        for pr in primes_above(&k, 7) {
            let r = reduce_mod(&k, &c, &pr).unwrap();
            let f = Arc::new(fq_new(7, 1));
            let chi = frobenius_charpoly(&r, &f);
            assert_eq!((chi.s, chi.t), (-4, 16));
            assert_eq!(chi.group_order(), 98);
        }
    }

    #[test]
    fn c193_prime_over_2() {
        let k = qf_new(193).unwrap();
        let c = crate::curve::curve_new(
            Poly::new(
                [[1, -2], [56, -8], [97, -13], [85, -12], [47, -5], [7, -2], [2, 0]]
                    .iter()
                    .map(|t| qe(&k, t[0], t[1]))
                    .collect(),
            ),
            Poly::new([[0, -1], [-1, 0]].iter().map(|t| qe(&k, t[0], t[1])).collect()),
            0,
        )
        .unwrap();
        // the prime (9w-67) has residue characteristic 2, root 1
        let g = qe(&k, -67, 9);
        let pr = crate::qfield::prime_from_generator(&g).unwrap();
        assert_eq!((pr.p, pr.root), (2, Some(1)));
        let r = reduce_mod(&k, &c, &pr).unwrap();
        let f = Arc::new(fq_new(2, 1));
        let chi = frobenius_charpoly(&r, &f);
        assert_eq!(chi.s.abs(), 1);
        assert_eq!(chi.t, 0);
    }

    #[test]
    fn newton_consistency() {
        // direct counts over F_{q^3}, F_{q^4} match the chi-predicted values
        let cases: &[(u64, usize, &[i64], &[i64])] = &[
            (2, 1, &[0, 0, 0, 0, 0, 1], &[1]),
            (3, 1, &[1, 2, 0, 2, 0, 1], &[]),
            (7, 1, &[3, 1, 0, 0, 0, 1, 1], &[]),
            (3, 2, &[1, 1, 0, 1, 0, 1], &[]),
            (2, 2, &[1, 0, 0, 0, 0, 1], &[1, 1, 0, 1]),
        ];
        for &(p, k, pc, qc) in cases {
            let (f, c) = fq_curve(p, k, pc, qc);
            let chi = frobenius_charpoly(&c, &f);
            assert!(chi.weil_ok(), "q={}", f.q());
            assert_eq!(chi.predicted_count(1) as u64, count_points(&c, &f));
            for m in 3..=4usize {
                let (fm, cm) = extend_curve(&c, &f, m);
                assert_eq!(
                    chi.predicted_count(m as u32) as u64,
                    count_points(&cm, &fm),
                    "q={} m={}",
                    f.q(),
                    m
                );
            }
        }
    }

    #[test]
    fn twist_negates_odd_coefficients() {
        for q in [7u64, 11, 13] {
            let f = Arc::new(fq_new(q, 1));
            let w = |n: i64| Fqw::new(f.clone(), f.from_i64(n));
            let nonsquare = f
                .elements()
                .find(|e| !f.is_zero(e) && !f.is_square(e))
                .unwrap();
            let mut tested = 0;
            for a in 0..q as i64 {
                let p = Poly::new(vec![w(a), w(1), w(0), w(a % 5), w(0), w(1)]);
                let Ok(c) = curve_over_fq(p, Poly::zero(), &f) else {
                    continue;
                };
                let t = c.twist(&Fqw::new(f.clone(), nonsquare.clone())).unwrap();
                let chi = frobenius_charpoly(&c, &f);
                let chit = frobenius_charpoly(&t, &f);
                assert_eq!(chit, chi.twist());
                tested += 1;
            }
            assert!(tested > 3);
        }
    }

    #[test]
    fn jacobian_order_bounds() {
        let (f, c) = fq_curve(11, 1, &[2, 0, 1, 0, 0, 1], &[]);
        let n = jacobian_order(&c, &f);
        let lower = {
            let r = (11f64).sqrt() - 1.0;
            (r * r * r * r).floor() as u64
        };
        assert!(n >= lower.max(1));
        let chi = frobenius_charpoly(&c, &f);
        assert_eq!(chi.twist().chi_at(1), chi.chi_at(-1));
    }

    #[test]
    fn quintic_vs_sextic_model_agree() {
        // C_53 mod a split prime where the sextic has a root: move the root to
        // infinity and recount (isomorphism invariance of chi)
        let k = qf_new(53).unwrap();
        let c = crate::curve::curve_new(
            Poly::new(
                [[9, 14], [-137, -9], [-25, 45], [-122, 5], [-27, 12], [-17, 1], [-4, 0]]
                    .iter()
                    .map(|t| qe(&k, t[0], t[1]))
                    .collect(),
            ),
            Poly::new(
                [[1, 1], [0, 0], [0, 1], [0, 1]]
                    .iter()
                    .map(|t| qe(&k, t[0], t[1]))
                    .collect(),
            ),
            0,
        )
        .unwrap();
        let _ = QElem::one(&k);
        for pr in primes_above(&k, 13) {
            let r = reduce_mod(&k, &c, &pr).unwrap();
            let f = Arc::new(fq_new(13, 1));
            let chi = frobenius_charpoly(&r, &f);
            assert!(chi.weil_ok());
        }
    }
}
