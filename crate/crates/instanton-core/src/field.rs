//! Exact arithmetic over a prime field F_p and small extensions F_{p^e}.
//!
//! The session prime is a runtime value (default [`DEFAULT_PRIME`], a 31-bit
//! prime), so field contexts are small `Copy` values threaded through every
//! matrix. Elements of F_p are residues in `u64`; since p < 2^32, products
//! fit in `u64` without widening. Extension elements are coefficient vectors
//! of length e ≤ 4 reduced modulo a fixed irreducible polynomial found
//! deterministically from (p, e).

use crate::error::{Error, Result};
use rand::RngExt;

/// Default session prime: the largest prime below 2^31 - 1.
pub const DEFAULT_PRIME: u64 = 2_147_483_629;

/// Maximum supported extension degree.
pub const MAX_EXT_DEGREE: usize = 4;

/// Field operations abstracted over the element representation, so dense
/// matrix code works identically over F_p and F_{p^e}.
pub trait FieldOps: Copy + PartialEq + std::fmt::Debug {
    type Elem: Copy + Eq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: Self::Elem) -> bool;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: Self::Elem) -> Option<Self::Elem>;
    /// Uniform random element.
    fn sample<R: RngExt>(&self, rng: &mut R) -> Self::Elem;
}

/// The prime field F_p, p an odd prime below 2^32.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Result<Fp> {
        if !(3..(1 << 32)).contains(&p) || !is_prime_u64(p) {
            return Err(Error::BadModulus(p));
        }
        Ok(Fp { p })
    }

    pub fn default_prime() -> Fp {
        Fp { p: DEFAULT_PRIME }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn from_u64(&self, v: u64) -> u64 {
        v % self.p
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        let r = v.rem_euclid(self.p as i64);
        r as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }

    /// Inverse of 2, used by the canonical projectors. Exists since p is odd.
    pub fn half(&self) -> u64 {
        self.p.div_ceil(2)
    }
}

impl FieldOps for Fp {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn is_zero(&self, a: u64) -> bool {
        a == 0
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    fn neg(&self, a: u64) -> u64 {
        (self.p - a) % self.p
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    fn sample<R: RngExt>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.p)
    }
}

/// An element of F_{p^e}: coefficients of a polynomial of degree < e in the
/// residue class ring F_p\[x\]/(irreducible). Unused slots stay zero so that
/// derived `Eq` is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtElem(pub [u64; MAX_EXT_DEGREE]);

/// The extension field F_{p^e}, e ≤ 4.
///
/// The defining irreducible is the first monic degree-e polynomial (in a
/// fixed enumeration of small coefficient patterns) that passes the
/// Frobenius irreducibility test, so the same (p, e) always yields the same
/// field tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtField {
    base: Fp,
    e: usize,
    /// Coefficients of the monic irreducible, constant term first;
    /// `irred[e]` is 1.
    irred: [u64; MAX_EXT_DEGREE + 1],
}

impl ExtField {
    pub fn new(base: Fp, e: usize) -> Result<ExtField> {
        if !(1..=MAX_EXT_DEGREE).contains(&e) {
            return Err(Error::InvalidParameter(format!(
                "extension degree {e} not in 1..={MAX_EXT_DEGREE}"
            )));
        }
        let irred = find_irreducible(base, e)?;
        Ok(ExtField { base, e, irred })
    }

    pub fn degree(&self) -> usize {
        self.e
    }

    pub fn base(&self) -> Fp {
        self.base
    }

    pub fn embed(&self, a: u64) -> ExtElem {
        let mut c = [0u64; MAX_EXT_DEGREE];
        c[0] = a % self.base.p;
        ExtElem(c)
    }

    fn reduce_product(&self, conv: [u128; 2 * MAX_EXT_DEGREE - 1]) -> ExtElem {
        let p = self.base.p;
        let e = self.e;
        let mut c = [0u64; 2 * MAX_EXT_DEGREE - 1];
        for (ci, &v) in c.iter_mut().zip(conv.iter()) {
            *ci = (v % p as u128) as u64;
        }
        // x^e = -(irred[e-1] x^{e-1} + ... + irred[0]), applied top down.
        for k in (e..2 * e - 1).rev() {
            let lead = c[k];
            if lead == 0 {
                continue;
            }
            c[k] = 0;
            for i in 0..e {
                let t = (p - self.irred[i]) % p * lead % p;
                c[k - e + i] = (c[k - e + i] + t) % p;
            }
        }
        let mut out = [0u64; MAX_EXT_DEGREE];
        out[..e].copy_from_slice(&c[..e]);
        ExtElem(out)
    }

    fn pow(&self, base: ExtElem, mut exp: u128) -> ExtElem {
        let mut acc = self.one();
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    fn order(&self) -> u128 {
        let mut q = 1u128;
        for _ in 0..self.e {
            q *= self.base.p as u128;
        }
        q
    }
}

impl FieldOps for ExtField {
    type Elem = ExtElem;

    fn zero(&self) -> ExtElem {
        ExtElem([0; MAX_EXT_DEGREE])
    }

    fn one(&self) -> ExtElem {
        self.embed(1)
    }

    fn is_zero(&self, a: ExtElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    fn add(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        let p = self.base.p;
        let mut c = [0u64; MAX_EXT_DEGREE];
        for (ci, (&ai, &bi)) in c.iter_mut().zip(a.0.iter().zip(b.0.iter())).take(self.e) {
            *ci = (ai + bi) % p;
        }
        ExtElem(c)
    }

    fn sub(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        let p = self.base.p;
        let mut c = [0u64; MAX_EXT_DEGREE];
        for (ci, (&ai, &bi)) in c.iter_mut().zip(a.0.iter().zip(b.0.iter())).take(self.e) {
            *ci = (ai + p - bi) % p;
        }
        ExtElem(c)
    }

    fn neg(&self, a: ExtElem) -> ExtElem {
        self.sub(self.zero(), a)
    }

    fn mul(&self, a: ExtElem, b: ExtElem) -> ExtElem {
        let mut conv = [0u128; 2 * MAX_EXT_DEGREE - 1];
        for i in 0..self.e {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..self.e {
                conv[i + j] += a.0[i] as u128 * b.0[j] as u128;
            }
        }
        self.reduce_product(conv)
    }

    fn inv(&self, a: ExtElem) -> Option<ExtElem> {
        if self.is_zero(a) {
            None
        } else {
            Some(self.pow(a, self.order() - 2))
        }
    }

    fn sample<R: RngExt>(&self, rng: &mut R) -> ExtElem {
        let mut c = [0u64; MAX_EXT_DEGREE];
        for ci in c.iter_mut().take(self.e) {
            *ci = rng.random_range(0..self.base.p);
        }
        ExtElem(c)
    }
}

/// Deterministic Miller–Rabin, valid for all u64 inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut acc = 1u64;
        a %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        acc
    };
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// --- irreducible polynomial search -------------------------------------

fn poly_mulmod(fp: Fp, a: &[u64], b: &[u64], modulus: &[u64]) -> Vec<u64> {
    let e = modulus.len() - 1;
    let mut conv = vec![0u128; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            conv[i + j] += ai as u128 * bj as u128;
        }
    }
    let p = fp.p;
    let mut c: Vec<u64> = conv.iter().map(|&v| (v % p as u128) as u64).collect();
    for k in (e..c.len()).rev() {
        let lead = c[k];
        if lead == 0 {
            continue;
        }
        c[k] = 0;
        for i in 0..e {
            let t = (p - modulus[i]) % p * lead % p;
            c[k - e + i] = (c[k - e + i] + t) % p;
        }
    }
    c.truncate(e.max(1));
    c
}

fn poly_powmod(fp: Fp, base: &[u64], mut exp: u128, modulus: &[u64]) -> Vec<u64> {
    let e = modulus.len() - 1;
    let mut acc = vec![0u64; e.max(1)];
    acc[0] = 1;
    let mut b = base.to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mulmod(fp, &acc, &b, modulus);
        }
        b = poly_mulmod(fp, &b, &b, modulus);
        exp >>= 1;
    }
    acc
}

fn poly_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn poly_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

/// Remainder of a modulo b (b nonzero).
fn poly_rem(fp: Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = poly_trim(a.to_vec());
    let b = poly_trim(b.to_vec());
    let bl_inv = fp.inv(*b.last().unwrap()).expect("nonzero divisor");
    while a.len() >= b.len() && !poly_is_zero(&a) {
        let shift = a.len() - b.len();
        let q = fp.mul(*a.last().unwrap(), bl_inv);
        for (i, &bi) in b.iter().enumerate() {
            a[shift + i] = fp.sub(a[shift + i], fp.mul(q, bi));
        }
        a = poly_trim(a);
        if a.len() == 1 && a[0] == 0 {
            break;
        }
    }
    a
}

fn poly_gcd_is_one(fp: Fp, a: &[u64], b: &[u64]) -> bool {
    let mut a = poly_trim(a.to_vec());
    let mut b = poly_trim(b.to_vec());
    while !poly_is_zero(&b) {
        let r = poly_rem(fp, &a, &b);
        a = b;
        b = r;
    }
    a.len() == 1 && a[0] != 0
}

/// Frobenius test: monic f of degree e is irreducible over F_p iff
/// x^{p^e} ≡ x (mod f) and gcd(x^{p^{e/q}} − x, f) = 1 for each prime q | e.
fn is_irreducible(fp: Fp, f: &[u64]) -> bool {
    let e = f.len() - 1;
    let p = fp.p as u128;
    if e == 1 {
        return true;
    }
    let mut x = vec![0u64; e];
    x[1] = 1;
    // x^{p^e} == x
    let mut q_exp = 1u128;
    for _ in 0..e {
        q_exp *= p;
    }
    let frob_e = poly_powmod(fp, &x, q_exp, f);
    if frob_e != x {
        return false;
    }
    let prime_divisors: &[usize] = match e {
        2 => &[2],
        3 => &[3],
        4 => &[2],
        _ => unreachable!("degree bounded by MAX_EXT_DEGREE"),
    };
    for &q in prime_divisors {
        let mut d_exp = 1u128;
        for _ in 0..e / q {
            d_exp *= p;
        }
        let frob = poly_powmod(fp, &x, d_exp, f);
        // gcd(frob - x, f) must be 1
        let mut diff = frob;
        for (i, &xi) in x.iter().enumerate() {
            diff[i] = fp.sub(diff[i], xi);
        }
        if poly_is_zero(&diff) || !poly_gcd_is_one(fp, f, &diff) {
            return false;
        }
    }
    true
}

fn find_irreducible(fp: Fp, e: usize) -> Result<[u64; MAX_EXT_DEGREE + 1]> {
    if e == 1 {
        let mut out = [0u64; MAX_EXT_DEGREE + 1];
        out[1] = 1;
        return Ok(out);
    }
    // Enumerate small coefficient patterns: counter digits in base 256 give
    // the low coefficients. Irreducibles have density ~1/e, so this ends
    // almost immediately.
    for counter in 0u64..(1 << 20) {
        let mut f = vec![0u64; e + 1];
        f[e] = 1;
        for (i, fi) in f.iter_mut().enumerate().take(e) {
            *fi = (counter >> (8 * i)) & 0xff;
        }
        if f[0] == 0 {
            continue; // divisible by x
        }
        if is_irreducible(fp, &f) {
            let mut out = [0u64; MAX_EXT_DEGREE + 1];
            out[..e + 1].copy_from_slice(&f);
            return Ok(out);
        }
    }
    Err(Error::NotFound(format!(
        "no irreducible of degree {e} found over F_{}",
        fp.p
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;

    #[test]
    fn default_prime_is_prime() {
        assert!(is_prime_u64(DEFAULT_PRIME));
        assert!(Fp::new(DEFAULT_PRIME).is_ok());
        assert!(Fp::new(2).is_err());
        assert!(Fp::new(2_147_483_630).is_err());
    }

    #[test]
    fn small_prime_arithmetic() {
        let f = Fp::new(7).unwrap();
        assert_eq!(f.inv(2), Some(4));
        assert_eq!(f.inv(3), Some(5));
        assert_eq!(f.inv(0), None);
        assert_eq!(f.mul(f.half(), 2), 1);
    }

    #[test]
    fn field_axioms_on_samples() {
        let f = Fp::default_prime();
        let mut rng = Seed(1).rng();
        for _ in 0..200 {
            let a = f.sample(&mut rng);
            let b = f.sample(&mut rng);
            let c = f.sample(&mut rng);
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn extension_field_axioms() {
        let base = Fp::default_prime();
        for e in 2..=4 {
            let k = ExtField::new(base, e).unwrap();
            let mut rng = Seed(e as u64).rng();
            for _ in 0..50 {
                let a = k.sample(&mut rng);
                let b = k.sample(&mut rng);
                let c = k.sample(&mut rng);
                assert_eq!(k.mul(a, k.mul(b, c)), k.mul(k.mul(a, b), c));
                assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
                if !k.is_zero(a) {
                    assert_eq!(k.mul(a, k.inv(a).unwrap()), k.one());
                }
            }
        }
    }

    #[test]
    fn extension_is_deterministic() {
        let base = Fp::default_prime();
        let k1 = ExtField::new(base, 2).unwrap();
        let k2 = ExtField::new(base, 2).unwrap();
        assert_eq!(k1, k2);
    }

    #[test]
    fn embed_respects_base_arithmetic() {
        let base = Fp::new(10007).unwrap();
        let k = ExtField::new(base, 3).unwrap();
        let a = 1234u64;
        let b = 4567u64;
        assert_eq!(k.mul(k.embed(a), k.embed(b)), k.embed(base.mul(a, b)));
        assert_eq!(k.add(k.embed(a), k.embed(b)), k.embed(base.add(a, b)));
    }
}
