//! Arithmetic in small finite fields F_{p^k}.
//!
//! Elements are coefficient vectors over F_p in the polynomial basis given by
//! a fixed monic irreducible modulus (the lexicographically least one, so that
//! results are reproducible across runs). Sizes here are tiny: point counting
//! needs q^2 up to a few thousand, and the property suites go up to p^k ~ 6561
//! for Newton-identity cross-checks.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FqError {
    #[error("operation requires characteristic 2")]
    WrongCharacteristic,
}

/// F_{p^k} with a fixed polynomial-basis representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqField {
    p: u64,
    k: usize,
    /// Monic modulus of degree k; `modulus[i]` is the x^i coefficient, with
    /// `modulus[k] == 1`.
    modulus: Vec<u64>,
}

/// An element of F_{p^k}: `c[i]` is the coefficient of x^i, 0 <= c[i] < p.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqElem {
    c: Vec<u64>,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

// Dense polynomials over F_p, used only for the irreducibility search.
mod fppoly {
    use super::pow_mod;

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = pow_mod(m[dm], p - 2, p);
        while r.len() > dm {
            let d = r.len() - 1 - dm;
            let c = r[r.len() - 1] * lead_inv % p;
            for i in 0..=dm {
                let idx = i + d;
                r[idx] = (r[idx] + p - c * m[i] % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, m, p)
    }

    pub fn powmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut base = rem(a, m, p);
        let mut r = vec![1u64];
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(&r, &base, m, p);
            }
            base = mulmod(&base, &base, m, p);
            e >>= 1;
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }
}

/// Rabin irreducibility test for a monic polynomial of degree k over F_p.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    let x = vec![0, 1];
    // x^(p^k) == x mod m
    let e = (p as u128).pow(k as u32);
    let xq = fppoly::powmod(&x, e, m, p);
    let mut diff = xq;
    // subtract x
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    fppoly::trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    // gcd(x^(p^(k/l)) - x, m) == 1 for each prime l | k
    let mut primes = vec![];
    let mut kk = k;
    let mut d = 2;
    while d * d <= kk {
        if kk % d == 0 {
            primes.push(d);
            while kk % d == 0 {
                kk /= d;
            }
        }
        d += 1;
    }
    if kk > 1 {
        primes.push(kk);
    }
    for l in primes {
        let e = (p as u128).pow((k / l) as u32);
        let mut g = fppoly::powmod(&x, e, m, p);
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        fppoly::trim(&mut g);
        let gc = fppoly::gcd(&g, m, p);
        if gc.len() != 1 {
            return false;
        }
    }
    true
}

/// Build F_{p^k}. The modulus is the lexicographically least monic irreducible
/// of degree k (coefficients compared from the constant term up).
pub fn fq_new(p: u64, k: usize) -> FqField {
    assert!(k >= 1, "k must be >= 1");
    assert!(is_prime(p), "p must be prime");
    if k == 1 {
        return FqField {
            p,
            k,
            modulus: vec![0, 1],
        };
    }
    // enumerate lower coefficients as a base-p counter, least significant = c0
    let total = (p as u128).pow(k as u32);
    let mut idx: u128 = 0;
    while idx < total {
        let mut m = vec![0u64; k + 1];
        m[k] = 1;
        let mut t = idx;
        for i in 0..k {
            m[i] = (t % p as u128) as u64;
            t /= p as u128;
        }
        if is_irreducible(&m, p) {
            return FqField { p, k, modulus: m };
        }
        idx += 1;
    }
    unreachable!("irreducible polynomial of every degree exists")
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FqField {
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn q(&self) -> u64 {
        self.p.pow(self.k as u32)
    }
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FqElem {
        FqElem {
            c: vec![0; self.k],
        }
    }
    pub fn one(&self) -> FqElem {
        self.from_u64(1)
    }
    pub fn from_u64(&self, n: u64) -> FqElem {
        let mut c = vec![0; self.k];
        c[0] = n % self.p;
        FqElem { c }
    }
    pub fn from_i64(&self, n: i64) -> FqElem {
        let p = self.p as i64;
        self.from_u64(n.rem_euclid(p) as u64)
    }
    /// Element from polynomial coefficients (little-endian, length <= k).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> FqElem {
        assert!(coeffs.len() <= self.k);
        let mut c = vec![0; self.k];
        for (i, &x) in coeffs.iter().enumerate() {
            c[i] = x % self.p;
        }
        FqElem { c }
    }
    pub fn is_zero(&self, a: &FqElem) -> bool {
        a.c.iter().all(|&x| x == 0)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let c = a
            .c
            .iter()
            .zip(&b.c)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        FqElem { c }
    }
    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let c = a
            .c
            .iter()
            .zip(&b.c)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect();
        FqElem { c }
    }
    pub fn neg(&self, a: &FqElem) -> FqElem {
        let c = a.c.iter().map(|&x| (self.p - x) % self.p).collect();
        FqElem { c }
    }
    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.p;
        let k = self.k;
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            if a.c[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + a.c[i] * b.c[j]) % p;
            }
        }
        // reduce by the monic modulus
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..k {
                let idx = d - k + i;
                prod[idx] = (prod[idx] + p - c * self.modulus[i] % p) % p;
            }
        }
        prod.truncate(k);
        FqElem { c: prod }
    }
    pub fn scal(&self, n: u64, a: &FqElem) -> FqElem {
        let n = n % self.p;
        let c = a.c.iter().map(|&x| x * n % self.p).collect();
        FqElem { c }
    }
    pub fn pow(&self, a: &FqElem, mut e: u128) -> FqElem {
        let mut base = a.clone();
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        r
    }
    /// Multiplicative inverse; None for zero.
    pub fn inv(&self, a: &FqElem) -> Option<FqElem> {
        if self.is_zero(a) {
            return None;
        }
        let q = (self.p as u128).pow(self.k as u32);
        Some(self.pow(a, q - 2))
    }
    /// Frobenius x -> x^p.
    pub fn frobenius(&self, a: &FqElem) -> FqElem {
        self.pow(a, self.p as u128)
    }
    /// Absolute trace to the prime field F_p, returned as an integer in [0,p).
    pub fn abs_trace(&self, a: &FqElem) -> u64 {
        let mut acc = self.zero();
        let mut x = a.clone();
        for _ in 0..self.k {
            acc = self.add(&acc, &x);
            x = self.frobenius(&x);
        }
        debug_assert!(acc.c[1..].iter().all(|&v| v == 0));
        acc.c[0]
    }

    /// Iterate over all q elements in a deterministic order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> + '_ {
        let q = (self.p as u128).pow(self.k as u32);
        (0..q).map(move |mut t| {
            let mut c = vec![0u64; self.k];
            for ci in c.iter_mut() {
                *ci = (t % self.p as u128) as u64;
                t /= self.p as u128;
            }
            FqElem { c }
        })
    }

    /// Legendre-style square test: x^((q-1)/2) for odd q; always true in char 2.
    pub fn is_square(&self, a: &FqElem) -> bool {
        if self.is_zero(a) {
            return true;
        }
        if self.p == 2 {
            return true;
        }
        let q = (self.p as u128).pow(self.k as u32);
        let s = self.pow(a, (q - 1) / 2);
        s == self.one()
    }

    /// Square root, if one exists. Tonelli–Shanks for odd characteristic,
    /// repeated squaring (x -> x^(q/2)) in characteristic 2.
    pub fn sqrt(&self, a: &FqElem) -> Option<FqElem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        let q = (self.p as u128).pow(self.k as u32);
        if self.p == 2 {
            // squaring is bijective: sqrt(a) = a^(q/2)
            return Some(self.pow(a, q / 2));
        }
        if !self.is_square(a) {
            return None;
        }
        if q % 4 == 3 {
            return Some(self.pow(a, (q + 1) / 4));
        }
        // Tonelli–Shanks: q - 1 = 2^s * m, m odd
        let mut m = q - 1;
        let mut s = 0u32;
        while m % 2 == 0 {
            m /= 2;
            s += 1;
        }
        // deterministic non-residue scan
        let nr = self
            .elements()
            .find(|x| !self.is_zero(x) && !self.is_square(x))
            .expect("non-residue exists in odd characteristic");
        let mut c = self.pow(&nr, m);
        let mut t = self.pow(a, m);
        let mut r = self.pow(a, (m + 1) / 2);
        let mut e = s;
        loop {
            if t == self.one() {
                return Some(r);
            }
            // find least i with t^(2^i) = 1
            let mut i = 0;
            let mut t2 = t.clone();
            while t2 != self.one() {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let b = self.pow(&c, 1 << (e - i - 1) as u128);
            r = self.mul(&r, &b);
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            e = i;
        }
    }

    /// Number of y in F_q with y^2 + b*y = c (characteristic 2 only).
    pub fn artin_schreier_count(&self, b: &FqElem, c: &FqElem) -> Result<u64, FqError> {
        if self.p != 2 {
            return Err(FqError::WrongCharacteristic);
        }
        if self.is_zero(b) {
            return Ok(1);
        }
        let b2 = self.mul(b, b);
        let u = self.mul(c, &self.inv(&b2).unwrap());
        Ok(if self.abs_trace(&u) == 0 { 2 } else { 0 })
    }

    /// Find a root of the quadratic x^2 - c1*x - c0 in this field, if any.
    /// Deterministic: returns the least root in element-enumeration order.
    pub fn quadratic_root(&self, c1: i64, c0: i64) -> Option<FqElem> {
        let c1 = self.from_i64(c1);
        let c0 = self.from_i64(c0);
        self.elements().find(|x| {
            let v = self.sub(&self.sub(&self.mul(x, x), &self.mul(&c1, x)), &c0);
            self.is_zero(&v)
        })
    }
}

impl FqElem {
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }
    /// For prime fields, the value as an integer in [0, p).
    pub fn residue(&self) -> u64 {
        debug_assert!(self.c[1..].iter().all(|&v| v == 0));
        self.c[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_modulus_is_unique_irreducible() {
        let f = fq_new(2, 2);
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn f9_basics() {
        let f = fq_new(3, 2);
        assert_eq!(f.q(), 9);
        let els: Vec<_> = f.elements().collect();
        assert_eq!(els.len(), 9);
        // multiplicative group order 8
        for e in &els {
            if !f.is_zero(e) {
                assert_eq!(f.pow(e, 8), f.one());
            }
        }
    }

    #[test]
    fn sqrt_f7() {
        let f = fq_new(7, 1);
        let two = f.from_u64(2);
        let r = f.sqrt(&two).unwrap();
        assert_eq!(f.mul(&r, &r), two);
        assert!([3, 4].contains(&r.residue()));
        assert_eq!(f.sqrt(&f.from_u64(3)), None);
    }

    #[test]
    fn sqrt_exhaustive_small() {
        for (p, k) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (3, 4)] {
            let f = fq_new(p, k);
            for x in f.elements() {
                let sq = f.mul(&x, &x);
                let r = f.sqrt(&sq).expect("square must have a root");
                assert_eq!(f.mul(&r, &r), sq, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn artin_schreier_examples() {
        let f2 = fq_new(2, 1);
        assert_eq!(
            f2.artin_schreier_count(&f2.one(), &f2.one()).unwrap(),
            0
        );
        let f4 = fq_new(2, 2);
        assert_eq!(
            f4.artin_schreier_count(&f4.one(), &f4.one()).unwrap(),
            2
        );
        assert_eq!(f4.artin_schreier_count(&f4.zero(), &f4.one()).unwrap(), 1);
        let f7 = fq_new(7, 1);
        assert_eq!(
            f7.artin_schreier_count(&f7.one(), &f7.one()),
            Err(FqError::WrongCharacteristic)
        );
    }

    #[test]
    fn artin_schreier_matches_enumeration() {
        for k in 1..=4 {
            let f = fq_new(2, k);
            for b in f.elements() {
                for c in f.elements() {
                    let direct = f
                        .elements()
                        .filter(|y| {
                            let lhs = f.add(&f.mul(y, y), &f.mul(&b, y));
                            lhs == c
                        })
                        .count() as u64;
                    assert_eq!(f.artin_schreier_count(&b, &c).unwrap(), direct);
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_prime_field() {
        for (p, k) in [(2, 3), (3, 2), (5, 2), (7, 2)] {
            let f = fq_new(p, k);
            let fixed = f
                .elements()
                .filter(|x| f.frobenius(x) == *x)
                .count() as u64;
            assert_eq!(fixed, p);
        }
    }

    #[test]
    fn inverse_roundtrip() {
        for (p, k) in [(3, 2), (7, 1), (2, 4), (11, 2)] {
            let f = fq_new(p, k);
            for x in f.elements() {
                match f.inv(&x) {
                    None => assert!(f.is_zero(&x)),
                    Some(ix) => assert_eq!(f.mul(&x, &ix), f.one()),
                }
            }
        }
    }

    #[test]
    fn quadratic_root_finds_known() {
        // x^2 - x - 13 mod 7 has roots 5 and 3
        let f7 = fq_new(7, 1);
        let r = f7.quadratic_root(1, 13).unwrap();
        assert!([3, 5].contains(&r.residue()));
    }
}
