//! Clebsch/Igusa-Clebsch invariants of binary sextics via transvectants.

use crate::poly::{FieldElem, Poly};

/// Binary form of formal degree `deg`; c[i] is the coefficient of x^i z^(deg-i).
#[derive(Clone, Debug, PartialEq)]
pub struct BForm<T: FieldElem> {
    pub c: Vec<T>,
    pub deg: usize,
}

impl<T: FieldElem> BForm<T> {
    pub fn new(c: Vec<T>, deg: usize) -> BForm<T> {
        assert_eq!(c.len(), deg + 1);
        BForm { c, deg }
    }

    /// From univariate coefficients a0..a_n of f(x), homogenized to degree `deg`.
    pub fn from_poly(p: &Poly<T>, deg: usize, witness: &T) -> BForm<T> {
        let mut c = Vec::with_capacity(deg + 1);
        for i in 0..=deg {
            c.push(p.coeff(i, witness));
        }
        BForm { c, deg }
    }

    fn dx(&self) -> BForm<T> {
        assert!(self.deg > 0);
        let c = (1..=self.deg)
            .map(|i| self.c[i].mul(&self.c[i].from_i64_like(i as i64)))
            .collect();
        BForm {
            c,
            deg: self.deg - 1,
        }
    }

    fn dz(&self) -> BForm<T> {
        assert!(self.deg > 0);
        let c = (0..self.deg)
            .map(|i| self.c[i].mul(&self.c[i].from_i64_like((self.deg - i) as i64)))
            .collect();
        BForm {
            c,
            deg: self.deg - 1,
        }
    }

    fn mul(&self, o: &BForm<T>) -> BForm<T> {
        let z = self.c[0].zero_like();
        let deg = self.deg + o.deg;
        let mut out = vec![z; deg + 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        BForm { c: out, deg }
    }

    fn add(&self, o: &BForm<T>) -> BForm<T> {
        assert_eq!(self.deg, o.deg);
        BForm {
            c: self
                .c
                .iter()
                .zip(&o.c)
                .map(|(a, b)| a.add(b))
                .collect(),
            deg: self.deg,
        }
    }

    fn scal_i64(&self, s: i64) -> BForm<T> {
        BForm {
            c: self
                .c
                .iter()
                .map(|a| a.mul(&a.from_i64_like(s)))
                .collect(),
            deg: self.deg,
        }
    }

    fn div_i64(&self, s: i64) -> BForm<T> {
        let inv = self.c[0]
            .from_i64_like(s)
            .inv()
            .expect("transvectant denominator invertible (char not 2,3,5)");
        BForm {
            c: self.c.iter().map(|a| a.mul(&inv)).collect(),
            deg: self.deg,
        }
    }

    fn scalar(&self) -> T {
        assert_eq!(self.deg, 0);
        self.c[0].clone()
    }
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

fn binom(n: usize, k: usize) -> i64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// k-th transvectant of forms of degrees m and n.
pub fn transvectant<T: FieldElem>(g: &BForm<T>, h: &BForm<T>, k: usize) -> BForm<T> {
    let (m, n) = (g.deg, h.deg);
    assert!(k <= m && k <= n);
    let z = g.c[0].zero_like();
    let deg = m + n - 2 * k;
    let mut acc = BForm {
        c: vec![z; deg + 1],
        deg,
    };
    // cache the mixed partials along each chain
    let mut gx = g.clone(); // will hold d^j_z d^(k-j)_x g as j advances
    for _ in 0..k {
        gx = gx.dx();
    }
    let mut hz = h.clone(); // d^(k-j)_z d^j_x h
    for _ in 0..k {
        hz = hz.dz();
    }
    let mut gj = gx;
    let mut hj = hz;
    for j in 0..=k {
        if j > 0 {
            // replace one d_x by d_z on g, one d_z by d_x on h
            gj = undiff_step(g, k, j);
            hj = undiff_step_h(h, k, j);
        }
        let sign = if j % 2 == 1 { -1 } else { 1 };
        let term = gj.mul(&hj).scal_i64(sign * binom(k, j));
        acc = acc.add(&term);
    }
    let num = factorial(m - k) * factorial(n - k);
    let den = factorial(m) * factorial(n);
    let g2 = gcd_i64(num, den);
    acc.scal_i64(num / g2).div_i64(den / g2)
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd_i64(b, a % b)
    }
}

fn undiff_step<T: FieldElem>(g: &BForm<T>, k: usize, j: usize) -> BForm<T> {
    // d^(k-j)_x d^j_z g
    let mut r = g.clone();
    for _ in 0..(k - j) {
        r = r.dx();
    }
    for _ in 0..j {
        r = r.dz();
    }
    r
}

fn undiff_step_h<T: FieldElem>(h: &BForm<T>, k: usize, j: usize) -> BForm<T> {
    // d^j_x d^(k-j)_z h
    let mut r = h.clone();
    for _ in 0..j {
        r = r.dx();
    }
    for _ in 0..(k - j) {
        r = r.dz();
    }
    r
}

/// Clebsch invariants (A, B, C, D) of a binary sextic.
pub fn clebsch<T: FieldElem>(f: &BForm<T>) -> (T, T, T, T) {
    assert_eq!(f.deg, 6);
    let a = transvectant(f, f, 6).scalar();
    let i2 = transvectant(f, f, 4);
    let delta = transvectant(&i2, &i2, 2);
    let b = transvectant(&i2, &i2, 4).scalar();
    let c = transvectant(&i2, &delta, 4).scalar();
    let y1 = transvectant(f, &i2, 4);
    let y2 = transvectant(&i2, &y1, 2);
    let y3 = transvectant(&i2, &y2, 2);
    let d = transvectant(&y3, &y1, 2).scalar();
    (a, b, c, d)
}

/// Igusa-Clebsch (I2, I4, I6, I10) of a binary sextic, normalized so that
/// I10 is exactly the discriminant of the sextic.
pub fn igusa_clebsch_sextic<T: FieldElem>(f: &BForm<T>) -> [T; 4] {
    let (a, b, c, d) = clebsch(f);
    let k = |n: i64| a.from_i64_like(n);
    let i2 = a.mul(&k(-120));
    let i4 = a.mul(&a).mul(&k(-720)).add(&b.mul(&k(6750)));
    let i6 = a
        .mul(&a)
        .mul(&a)
        .mul(&k(8640))
        .add(&a.mul(&b).mul(&k(-108000)))
        .add(&c.mul(&k(202500)));
    let i10 = a
        .mul(&a)
        .mul(&a)
        .mul(&a)
        .mul(&a)
        .mul(&k(-62208))
        .add(&a.mul(&a).mul(&a).mul(&b).mul(&k(972000)))
        .add(&a.mul(&a).mul(&c).mul(&k(1620000)))
        .add(&a.mul(&b).mul(&b).mul(&k(-3037500)))
        .add(&b.mul(&c).mul(&k(-6075000)))
        .add(&d.mul(&k(-4556250)));
    [i2, i4, i6, i10]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use num_rational::BigRational;

    fn sextic(c: [i64; 7]) -> BForm<BigRational> {
        BForm::new(c.iter().map(|&n| rat(n, 1)).collect(), 6)
    }

    #[test]
    fn transvectant_hessian() {
        // (f,f)_2 of a quadratic axx x^2 + ... is proportional to the discriminant
        let f = BForm::new(vec![rat(3, 1), rat(5, 1), rat(2, 1)], 2);
        let h = transvectant(&f, &f, 2);
        // (1/4)(2 f_xx f_zz - 2 f_xz^2) = (48 - 50)/4 = -disc/2
        assert_eq!(h.scalar(), rat(-1, 2));
    }

    #[test]
    fn i10_is_discriminant() {
        use crate::poly::Poly;
        for c in [
            [3i64, 1, -2, 5, 0, 1, 2],
            [1, 2, 3, 4, 5, 6, 7],
            [-1, 0, 0, 1, 0, 0, 3],
            [2, -9, 4, 4, -7, 1, 1],
        ] {
            let f = sextic(c);
            let ic = igusa_clebsch_sextic(&f);
            let p = Poly::new(c.iter().map(|&n| rat(n, 1)).collect());
            assert_eq!(ic[3], p.discriminant(), "sextic {c:?}");
        }
    }

    #[test]
    fn sextic_with_quintic_part() {
        use crate::poly::Poly;
        // vanishing leading coefficient: treat the quintic as a degenerate sextic;
        // I10 then matches lc^2 * disc_5
        let c = [3i64, 1, -2, 5, 2, 1, 0];
        let f = sextic(c);
        let ic = igusa_clebsch_sextic(&f);
        let p = Poly::new(c[..6].iter().map(|&n| rat(n, 1)).collect());
        assert_eq!(ic[3], p.discriminant() * rat(1, 1), "{:?}", ic[3]);
    }

    #[test]
    fn scaling_law() {
        let f = sextic([3, 1, -2, 5, 0, 1, 2]);
        let g = sextic([9, 3, -6, 15, 0, 3, 6]); // 3*f
        let a = igusa_clebsch_sextic(&f);
        let b = igusa_clebsch_sextic(&g);
        for (i, e) in [(0usize, 2u32), (1, 4), (2, 6), (3, 10)] {
            assert_eq!(b[i], &a[i] * rat(3i64.pow(e), 1));
        }
    }
}
