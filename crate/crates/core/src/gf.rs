//! Finite fields F_q with q = p^e.
//!
//! Elements are encoded as integers in `[0, q)` by packing the coefficients of
//! their polynomial representative as little-endian base-p digits, so in a
//! prime field the encoding is the residue itself. Multiplication goes
//! through exp/log tables built on the smallest primitive element; fields
//! with q ≤ 256 additionally keep full addition and multiplication tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A field element, stored by its canonical encoding.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(pub u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Characteristic, degree and defining polynomial of a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    /// Monic modulus, little-endian coefficients, length `e + 1`.
    pub modulus: Vec<u32>,
}

/// Conway polynomials for the non-prime orders the toolkit ships.
const CONWAY: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (5, 2, &[2, 4, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (7, 2, &[3, 6, 1]),
    (11, 2, &[2, 7, 1]),
    (13, 2, &[2, 12, 1]),
];

const TABLE_LIMIT: usize = 256;

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power into `(p, e)`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, little-endian, used only while building tables.
fn poly_trim(a: &mut Vec<u32>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let shift = r.len() - 1 - dm;
        let c = r[r.len() - 1] * lead_inv % p;
        for (i, &mc) in m.iter().enumerate() {
            let k = i + shift;
            r[k] = (r[k] + p - c * mc % p) % p;
        }
        poly_trim(&mut r);
        if r.len() - 1 < dm {
            break;
        }
    }
    r
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        k >>= 1;
    }
    r as u32
}

fn decode(mut v: u32, p: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let d = v % p;
            v /= p;
            d
        })
        .collect()
}

fn encode(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Exact arithmetic tables for one finite field.
#[derive(Clone)]
pub struct Gf {
    spec: FieldSpec,
    q: usize,
    primitive: Fe,
    exp: Vec<u16>,
    log: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    frob: Vec<u16>,
    add_tab: Option<Vec<u16>>,
    mul_tab: Option<Vec<u16>>,
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) modulus {:?}", self.q, self.spec.modulus)
    }
}

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Gf {
    /// Builds F_{p^e} from an explicit monic modulus, checking irreducibility
    /// by trial division.
    pub fn new(p: u32, e: u32, modulus: &[u32]) -> Result<Gf> {
        if !is_prime(p) {
            return Err(Error::Field(format!("characteristic {p} is not prime")));
        }
        if e == 0 {
            return Err(Error::Field("extension degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(e).filter(|&q| q <= 1 << 16).ok_or_else(|| {
            Error::Field(format!("order {p}^{e} exceeds 2^16"))
        })?;
        if modulus.len() != e as usize + 1 || modulus[e as usize] != 1 {
            return Err(Error::Field(format!(
                "modulus {modulus:?} is not monic of degree {e}"
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::Field(format!("modulus {modulus:?} has coefficients outside F_{p}")));
        }
        if let Some(factor) = find_factor(modulus, p) {
            return Err(Error::Field(format!(
                "modulus {modulus:?} is reducible over F_{p}: divisible by {factor:?}"
            )));
        }
        Ok(Self::build(FieldSpec { p, e, modulus: modulus.to_vec() }, q as usize))
    }

    /// Builds F_q for a prime power q, taking the modulus from the shipped
    /// Conway table when q is not prime.
    pub fn with_order(q: u32) -> Result<Gf> {
        let (p, e) = prime_power(q).ok_or_else(|| Error::Field(format!("{q} is not a prime power")))?;
        if e == 1 {
            return Gf::new(p, 1, &[0, 1]);
        }
        let modulus = CONWAY
            .iter()
            .find(|(cp, ce, _)| *cp == p && *ce == e)
            .map(|(_, _, m)| *m)
            .ok_or_else(|| Error::Field(format!("no modulus shipped for q = {q}")))?;
        Gf::new(p, e, modulus)
    }

    /// Orders for which a modulus is available without user input.
    pub fn shipped_orders() -> Vec<u32> {
        CONWAY.iter().map(|(p, e, _)| p.pow(*e)).collect()
    }

    fn build(spec: FieldSpec, q: usize) -> Gf {
        let (p, e) = (spec.p, spec.e);
        let slow_mul = |a: u32, b: u32| -> u32 {
            let da = decode(a, p, e);
            let db = decode(b, p, e);
            let mut prod = vec![0u32; 2 * e as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let mut r = poly_rem(&prod, &spec.modulus, p);
            r.resize(e as usize, 0);
            encode(&r, p)
        };
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let slow_pow = |a: u32, mut k: u64| -> u32 {
            let mut r = 1u32;
            let mut b = a;
            while k > 0 {
                if k & 1 == 1 {
                    r = slow_mul(r, b);
                }
                b = slow_mul(b, b);
                k >>= 1;
            }
            r
        };
        let primitive = (1..q as u32)
            .find(|&g| factors.iter().all(|&r| slow_pow(g, order / r) != 1))
            .expect("multiplicative group of a finite field is cyclic");

        let mut exp = vec![0u16; 2 * (q - 1).max(1)];
        let mut log = vec![0u16; q];
        let mut x = 1u32;
        for k in 0..q - 1 {
            exp[k] = x as u16;
            log[x as usize] = k as u16;
            x = slow_mul(x, primitive);
        }
        for k in q - 1..exp.len() {
            exp[k] = exp[k - (q - 1)];
        }

        let add_digits = |a: u32, b: u32| -> u32 {
            let da = decode(a, p, e);
            let db = decode(b, p, e);
            let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
            encode(&s, p)
        };
        let neg: Vec<u16> = (0..q as u32)
            .map(|a| encode(&decode(a, p, e).iter().map(|&d| (p - d) % p).collect::<Vec<_>>(), p) as u16)
            .collect();
        let mut inv = vec![0u16; q];
        for a in 1..q {
            inv[a] = exp[(q - 1 - log[a] as usize) % (q - 1)];
        }
        let frob: Vec<u16> = (0..q)
            .map(|a| if a == 0 { 0 } else { exp[(log[a] as usize * p as usize) % (q - 1)] })
            .collect();

        let (add_tab, mul_tab) = if q <= TABLE_LIMIT {
            let mut at = vec![0u16; q * q];
            let mut mt = vec![0u16; q * q];
            for a in 0..q {
                for b in 0..q {
                    at[a * q + b] = add_digits(a as u32, b as u32) as u16;
                    mt[a * q + b] = if a == 0 || b == 0 {
                        0
                    } else {
                        exp[log[a] as usize + log[b] as usize]
                    };
                }
            }
            (Some(at), Some(mt))
        } else {
            (None, None)
        };

        Gf {
            spec,
            q,
            primitive: Fe(primitive as u16),
            exp,
            log,
            neg,
            inv,
            frob,
            add_tab,
            mul_tab,
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.spec.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.spec.e
    }

    /// The primitive element the exp/log tables are indexed by.
    pub fn primitive(&self) -> Fe {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.q as u16).map(Fe)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> + '_ {
        (1..self.q as u16).map(Fe)
    }

    /// Image of an integer in the prime subfield.
    pub fn int(&self, k: i64) -> Fe {
        Fe(k.rem_euclid(self.spec.p as i64) as u16)
    }

    pub fn element(&self, v: u32) -> Result<Fe> {
        if (v as usize) < self.q {
            Ok(Fe(v as u16))
        } else {
            Err(Error::Domain(format!("{v} is not an element of GF({})", self.q)))
        }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        match &self.add_tab {
            Some(t) => Fe(t[a.idx() * self.q + b.idx()]),
            None => self.add_slow(a, b),
        }
    }

    fn add_slow(&self, a: Fe, b: Fe) -> Fe {
        let p = self.spec.p;
        if p == 2 {
            return Fe(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0 as u32, b.0 as u32);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.spec.e {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        Fe(out as u16)
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.neg[a.idx()])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        match &self.mul_tab {
            Some(t) => Fe(t[a.idx() * self.q + b.idx()]),
            None => {
                if a.is_zero() || b.is_zero() {
                    Fe::ZERO
                } else {
                    Fe(self.exp[self.log[a.idx()] as usize + self.log[b.idx()] as usize])
                }
            }
        }
    }

    /// Multiplicative inverse; `inv(0)` is reported as 0.
    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        Fe(self.inv[a.idx()])
    }

    pub fn checked_inv(&self, a: Fe) -> Option<Fe> {
        (!a.is_zero()).then(|| self.inv(a))
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        debug_assert!(!b.is_zero(), "division by zero");
        self.mul(a, self.inv(b))
    }

    /// `a + b*c`, the inner step of every elimination loop.
    #[inline]
    pub fn mul_add(&self, a: Fe, b: Fe, c: Fe) -> Fe {
        self.add(a, self.mul(b, c))
    }

    pub fn pow(&self, a: Fe, k: u64) -> Fe {
        if k == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let l = self.log[a.idx()] as u64 * (k % (self.q as u64 - 1)) % (self.q as u64 - 1);
        Fe(self.exp[l as usize])
    }

    /// The Frobenius map x ↦ x^p.
    #[inline]
    pub fn frobenius(&self, a: Fe) -> Fe {
        Fe(self.frob[a.idx()])
    }

    /// x ↦ x^(p^k).
    pub fn frobenius_pow(&self, mut a: Fe, k: u32) -> Fe {
        for _ in 0..k % self.spec.e {
            a = self.frobenius(a);
        }
        a
    }

    pub fn log(&self, a: Fe) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.idx()] as u32)
    }

    pub fn is_square(&self, a: Fe) -> bool {
        a.is_zero() || self.q.is_multiple_of(2) || self.log[a.idx()].is_multiple_of(2)
    }

    /// A square root of `a`, taking the root with the smaller encoding when
    /// there are two.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if a.is_zero() {
            return Some(Fe::ZERO);
        }
        if self.q.is_multiple_of(2) {
            return Some(self.pow(a, self.q as u64 / 2));
        }
        let l = self.log[a.idx()] as usize;
        if l % 2 == 1 {
            return None;
        }
        let r = Fe(self.exp[l / 2]);
        Some(r.min(self.neg(r)))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fe) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::Domain("zero has no multiplicative order".into()));
        }
        let n = self.q as u64 - 1;
        Ok(n / gcd(self.log[a.idx()] as u64, n))
    }

    pub fn is_primitive(&self, a: Fe) -> Result<bool> {
        Ok(self.order(a)? == self.q as u64 - 1)
    }

    /// Dot product of two equal-length vectors.
    #[inline]
    pub fn dot(&self, a: &[Fe], b: &[Fe]) -> Fe {
        a.iter().zip(b).fold(Fe::ZERO, |acc, (&x, &y)| self.mul_add(acc, x, y))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Smallest monic factor of degree ≤ deg/2, if any.
fn find_factor(m: &[u32], p: u32) -> Option<Vec<u32>> {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for v in 0..count {
            let mut cand = decode(v as u32, p, d as u32);
            cand.push(1);
            let r = poly_rem(m, &cand, p);
            if r.iter().all(|&c| c == 0) {
                return Some(cand);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f2 = Gf::new(2, 1, &[1, 1]).unwrap();
        assert_eq!(f2.add(Fe(1), Fe(1)), Fe(0));
        let f5 = Gf::new(5, 1, &[0, 1]).unwrap();
        assert_eq!(f5.mul(Fe(3), Fe(4)), Fe(2));
        assert_eq!(f5.int(-1), Fe(4));
    }

    #[test]
    fn f4_generator_satisfies_its_modulus() {
        let f4 = Gf::new(2, 2, &[1, 1, 1]).unwrap();
        // x = encoding 2, x + 1 = encoding 3
        assert_eq!(f4.mul(Fe(2), Fe(2)), Fe(3));
    }

    #[test]
    fn reducible_modulus_is_rejected_with_factor() {
        // x^2 + 1 = (x + 1)^2 over F_2
        let err = Gf::new(2, 2, &[1, 0, 1]).unwrap_err();
        assert!(err.to_string().contains("[1, 1]"), "{err}");
        assert!(Gf::new(3, 2, &[1, 0, 2]).is_err());
        assert!(Gf::new(4, 1, &[0, 1]).is_err());
    }

    #[test]
    fn shipped_moduli_load() {
        for q in Gf::shipped_orders() {
            let f = Gf::with_order(q).unwrap();
            assert_eq!(f.q(), q as usize);
        }
        assert!(Gf::with_order(6).is_err());
    }

    #[test]
    fn square_roots() {
        let f4 = Gf::with_order(4).unwrap();
        let r = f4.sqrt(Fe(2)).unwrap();
        assert_eq!(f4.mul(r, r), Fe(2));
        let f5 = Gf::with_order(5).unwrap();
        assert_eq!(f5.sqrt(Fe(4)), Some(Fe(2)));
        assert_eq!(f5.sqrt(Fe(2)), None);
    }

    #[test]
    fn primitivity() {
        let f5 = Gf::with_order(5).unwrap();
        assert!(f5.is_primitive(Fe(2)).unwrap());
        assert!(!f5.is_primitive(Fe(4)).unwrap());
        assert!(f5.is_primitive(Fe(0)).is_err());
        let f2 = Gf::with_order(2).unwrap();
        assert!(f2.is_primitive(Fe(1)).unwrap());
    }

    #[test]
    fn full_scan_field_laws() {
        for q in [2u32, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64] {
            let f = Gf::with_order(q).unwrap();
            let mut squares = std::collections::HashSet::new();
            for x in f.elements() {
                assert_eq!(f.pow(x, q as u64), x, "Fermat fails in GF({q})");
                if !x.is_zero() {
                    assert_eq!(f.mul(x, f.inv(x)), Fe::ONE);
                    squares.insert(f.mul(x, x));
                }
                assert_eq!(f.add(x, f.neg(x)), Fe::ZERO);
            }
            let expected = if q % 2 == 0 { q - 1 } else { (q - 1) / 2 };
            assert_eq!(squares.len() as u32, expected);
            if q <= 16 {
                for x in f.elements() {
                    for y in f.elements() {
                        assert_eq!(
                            f.frobenius(f.add(x, y)),
                            f.add(f.frobenius(x), f.frobenius(y))
                        );
                        assert_eq!(
                            f.frobenius(f.mul(x, y)),
                            f.mul(f.frobenius(x), f.frobenius(y))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn large_prime_uses_log_tables() {
        let f = Gf::with_order(257).unwrap();
        assert_eq!(f.mul(Fe(256), Fe(256)), Fe(1));
        assert_eq!(f.add(Fe(200), Fe(100)), Fe(43));
        let f = Gf::with_order(65521).unwrap();
        let a = Fe(12345);
        assert_eq!(f.mul(a, f.inv(a)), Fe::ONE);
    }
}
