//! Exact arithmetic in cyclotomic number fields Q(ζ_N).
//!
//! Every character value, Gauss sum and matrix entry in this crate lives in
//! some Q(ζ_N). Elements are stored in the power basis 1, ζ, ..., ζ^{φ(N)-1}
//! modulo the Nth cyclotomic polynomial Φ_N, with exact rational coefficients.
//! Reducing modulo Φ_N (rather than X^N - 1) keeps the representation a field,
//! so equality of identities is decidable by coefficient comparison.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num::complex::Complex64;
use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::error::Error;

/// Exact rational scalar.
pub type Rat = BigRational;

/// Euler totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn divisors(n: u64) -> Vec<u64> {
    let mut ds: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    ds.sort_unstable();
    ds
}

/// The Nth cyclotomic polynomial Φ_N, as integer coefficients from degree 0 up.
///
/// Computed by exact division of X^N - 1 by the product of Φ_d over proper
/// divisors d of N.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    let mut cache: HashMap<u64, Vec<BigInt>> = HashMap::new();
    for d in divisors(n) {
        // X^d - 1
        let mut num = vec![BigInt::zero(); d as usize + 1];
        num[0] = -BigInt::one();
        num[d as usize] = BigInt::one();
        let mut quotient = num;
        for e in divisors(d) {
            if e < d {
                quotient = int_poly_div_exact(&quotient, &cache[&e]);
            }
        }
        cache.insert(d, quotient);
    }
    cache.remove(&n).unwrap()
}

/// Exact division of integer polynomials; panics on a nonzero remainder.
fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem: Vec<BigInt> = num.to_vec();
    let dn = rem.len() - 1;
    assert!(dn >= dd);
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for i in (0..=dn - dd).rev() {
        let c = rem[i + dd].clone();
        quot[i] = c.clone();
        for j in 0..=dd {
            rem[i + j] -= &c * &den[j];
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

/// Shared description of Q(ζ_N): the modulus, φ(N) and the monic minimal
/// polynomial Φ_N with rational coefficients.
#[derive(Debug, PartialEq, Eq)]
pub struct CycloField {
    pub modulus: u64,
    pub degree: usize,
    min_poly: Vec<Rat>,
    min_poly_int: Vec<BigInt>,
}

static FIELDS: Lazy<Mutex<HashMap<u64, Arc<CycloField>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

impl CycloField {
    /// Fetch (or build and cache) the field with the given modulus.
    pub fn get(modulus: u64) -> Arc<CycloField> {
        let mut map = FIELDS.lock().unwrap();
        map.entry(modulus)
            .or_insert_with(|| {
                let phi = cyclotomic_polynomial(modulus);
                let degree = phi.len() - 1;
                let min_poly = phi.iter().cloned().map(Rat::from_integer).collect();
                Arc::new(CycloField { modulus, degree, min_poly, min_poly_int: phi })
            })
            .clone()
    }

    /// Reduce a polynomial in ζ (coefficients from degree 0 up, any length)
    /// modulo Φ_N, returning exactly `degree` coefficients.
    fn reduce(&self, mut poly: Vec<Rat>) -> Vec<Rat> {
        let d = self.degree;
        while poly.len() > d {
            let top = poly.len() - 1;
            let c = poly[top].clone();
            if !c.is_zero() {
                for j in 0..=d {
                    let idx = top - d + j;
                    let t = &c * &self.min_poly[j];
                    poly[idx] -= t;
                }
            }
            poly.pop();
        }
        poly.resize(d, Rat::zero());
        poly
    }

    /// Same reduction for integer polynomials (Φ_N is monic over Z).
    fn reduce_int(&self, mut poly: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.degree;
        while poly.len() > d {
            let top = poly.len() - 1;
            let c = poly[top].clone();
            if !c.is_zero() {
                for j in 0..=d {
                    let idx = top - d + j;
                    let t = &c * &self.min_poly_int[j];
                    poly[idx] -= t;
                }
            }
            poly.pop();
        }
        poly.resize(d, BigInt::zero());
        poly
    }
}

/// Common-denominator form of a rational coefficient vector.
fn clear_denominators(coeffs: &[Rat]) -> (Vec<BigInt>, BigInt) {
    let mut den = BigInt::one();
    for c in coeffs {
        let d = c.denom();
        let g = num::integer::gcd(den.clone(), d.clone());
        den = den / g * d;
    }
    let ints = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    (ints, den)
}

/// An element of Q(ζ_N), reduced modulo Φ_N.
#[derive(Clone)]
pub struct CycloNum {
    field: Arc<CycloField>,
    coeffs: Vec<Rat>,
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        self.field.modulus == other.field.modulus && self.coeffs == other.coeffs
    }
}
impl Eq for CycloNum {}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloNum(ζ{}; {})", self.field.modulus, self.coeff_string())
    }
}

impl CycloNum {
    pub fn zero(field: &Arc<CycloField>) -> Self {
        CycloNum { field: field.clone(), coeffs: vec![Rat::zero(); field.degree] }
    }

    pub fn one(field: &Arc<CycloField>) -> Self {
        Self::from_rational(field, Rat::one())
    }

    pub fn from_rational(field: &Arc<CycloField>, r: Rat) -> Self {
        let mut coeffs = vec![Rat::zero(); field.degree];
        coeffs[0] = r;
        CycloNum { field: field.clone(), coeffs }
    }

    pub fn from_int(field: &Arc<CycloField>, k: i64) -> Self {
        Self::from_rational(field, Rat::from_integer(BigInt::from(k)))
    }

    /// ζ_N^k, with k taken modulo N.
    pub fn root_of_unity(field: &Arc<CycloField>, k: i64) -> Self {
        let n = field.modulus as i64;
        let k = k.rem_euclid(n) as usize;
        let mut poly = vec![Rat::zero(); k + 1];
        poly[k] = Rat::one();
        CycloNum { field: field.clone(), coeffs: field.reduce(poly) }
    }

    /// ζ_m^j embedded in Q(ζ_N), requiring m | N.
    pub fn root_of_order(field: &Arc<CycloField>, m: u64, j: i64) -> Self {
        assert!(m >= 1 && field.modulus % m == 0, "order {m} does not divide modulus {}", field.modulus);
        let step = (field.modulus / m) as i64;
        Self::root_of_unity(field, step * j.rem_euclid(m as i64))
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn modulus(&self) -> u64 {
        self.field.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Rational part, if the element is a rational scalar.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn check_same_field(&self, other: &Self) -> Result<(), Error> {
        if self.field.modulus != other.field.modulus {
            return Err(Error::ModulusMismatch { left: self.field.modulus, right: other.field.modulus });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, Error> {
        self.check_same_field(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(CycloNum { field: self.field.clone(), coeffs })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, Error> {
        self.check_same_field(other)?;
        // clear denominators first: the schoolbook product and the Φ_N
        // reduction then run over integers, with a single rational
        // normalization per output coefficient
        let (pa, da) = clear_denominators(&self.coeffs);
        let (pb, db) = clear_denominators(&other.coeffs);
        let d = self.field.degree;
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in pa.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in pb.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                prod[i + j] += a * b;
            }
        }
        let den = da * db;
        let coeffs = self
            .field
            .reduce_int(prod)
            .into_iter()
            .map(|c| Rat::new(c, den.clone()))
            .collect();
        Ok(CycloNum { field: self.field.clone(), coeffs })
    }

    pub fn add(&self, other: &Self) -> Self {
        self.checked_add(other).unwrap()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).unwrap()
    }

    pub fn neg(&self) -> Self {
        CycloNum { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        CycloNum { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Φ_N.
    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Bezout: find u with u * self ≡ 1 (mod Φ_N).
        let mut r0 = self.field.min_poly.clone();
        let mut r1 = trim(self.coeffs.clone());
        let zero_poly: Vec<Rat> = vec![];
        let one_poly: Vec<Rat> = vec![Rat::one()];
        let mut t0 = zero_poly;
        let mut t1 = one_poly;
        while !r1.is_empty() {
            let (q, r) = rat_poly_divmod(&r0, &r1);
            let t = rat_poly_sub(&t0, &rat_poly_mul(&q, &t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        // r0 is the gcd, a nonzero constant since Φ_N is irreducible over Q
        // and self is nonzero of smaller degree.
        assert!(r0.len() == 1, "Phi_N must be coprime to a nonzero element");
        let c = r0[0].recip();
        let inv = t0.iter().map(|x| x * &c).collect::<Vec<_>>();
        Ok(CycloNum { field: self.field.clone(), coeffs: self.field.reduce(inv) })
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().expect("pow of zero to a negative exponent").pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Complex conjugation, i.e. the Galois automorphism ζ_N ↦ ζ_N^{-1}.
    pub fn conj(&self) -> Self {
        let n = self.field.modulus as usize;
        let mut poly = vec![Rat::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                poly[(n - i) % n] += c;
            }
        }
        CycloNum { field: self.field.clone(), coeffs: self.field.reduce(poly) }
    }

    /// Floating approximation at ζ_N = e^{2πi/N}. Diagnostics and sign
    /// disambiguation only; never used in equality tests.
    pub fn complex_embed(&self) -> Complex64 {
        let n = self.field.modulus as f64;
        let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            let cf = c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN);
            acc = acc * zeta + Complex64::new(cf, 0.0);
        }
        acc
    }

    /// Canonical coefficient-vector string, e.g. `84:1,-1/2,0,...`.
    pub fn coeff_string(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("{}:{}", self.field.modulus, parts.join(","))
    }

    /// Parse the format produced by [`CycloNum::coeff_string`].
    pub fn parse_coeff_string(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("bad cyclotomic literal: {s}"));
        let (modstr, rest) = s.split_once(':').ok_or_else(bad)?;
        let modulus: u64 = modstr.parse().map_err(|_| bad())?;
        let field = CycloField::get(modulus);
        let mut coeffs = Vec::with_capacity(field.degree);
        for part in rest.split(',') {
            let r: Rat = part.trim().parse().map_err(|_| bad())?;
            coeffs.push(r);
        }
        if coeffs.len() != field.degree {
            return Err(bad());
        }
        Ok(CycloNum { field, coeffs })
    }
}

impl serde::Serialize for CycloNum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.coeff_string())
    }
}

impl<'de> serde::Deserialize<'de> for CycloNum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CycloNum::parse_coeff_string(&s).map_err(serde::de::Error::custom)
    }
}

fn trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
    p
}

fn rat_poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn rat_poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let len = a.len().max(b.len());
    let mut out = vec![Rat::zero(); len];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

fn rat_poly_divmod(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    assert!(!den.is_empty());
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    let mut rem = num.to_vec();
    if rem.len() <= dd {
        return (vec![], trim(rem));
    }
    let mut quot = vec![Rat::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + dd] / &lead;
        if !c.is_zero() {
            for j in 0..=dd {
                let t = &c * &den[j];
                rem[i + j] -= t;
            }
        }
        quot[i] = c;
    }
    (trim(quot), trim(rem))
}

/// True when the embedding of a (necessarily real) element is positive.
/// Used only to pin the sign of square roots.
pub fn embeds_positive(z: &CycloNum) -> bool {
    let e = z.complex_embed();
    assert!(e.im.abs() < 1e-6, "sign check applied to a non-real element");
    e.re > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_poly(coeffs: &[i64]) -> Vec<BigInt> {
        coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic_polynomial(1), int_poly(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(4), int_poly(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), int_poly(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), int_poly(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn roots_of_unity() {
        let f4 = CycloField::get(4);
        assert_eq!(CycloNum::root_of_unity(&f4, 2), CycloNum::from_int(&f4, -1));
        let f3 = CycloField::get(3);
        assert!(CycloNum::root_of_unity(&f3, 0).is_one());
        let z = CycloNum::root_of_unity(&f3, 1).mul(&CycloNum::root_of_unity(&f3, 2));
        assert!(z.is_one());
    }

    #[test]
    fn order_of_root_powers() {
        let f12 = CycloField::get(12);
        for k in 0..12i64 {
            let z = CycloNum::root_of_unity(&f12, k);
            let expected_order = 12 / num::integer::gcd(12, k.rem_euclid(12) as u64).max(1);
            let mut order = 1;
            let mut acc = z.clone();
            while !acc.is_one() {
                acc = acc.mul(&z);
                order += 1;
                assert!(order <= 12);
            }
            if k == 0 {
                assert_eq!(order, 1);
            } else {
                assert_eq!(order as u64, expected_order);
            }
            assert!(z.pow(12).is_one());
        }
    }

    #[test]
    fn field_arithmetic() {
        // (1 + ζ₃)(−ζ₃) = 1, using ζ₃² = −1 − ζ₃.
        let f3 = CycloField::get(3);
        let z = CycloNum::root_of_unity(&f3, 1);
        let lhs = CycloNum::one(&f3).add(&z).mul(&z.neg());
        assert!(lhs.is_one());

        let f7 = CycloField::get(7);
        let z7 = CycloNum::root_of_unity(&f7, 1);
        assert_eq!(z7.conj(), CycloNum::root_of_unity(&f7, 6));

        let two = CycloNum::from_int(&f7, 2);
        assert_eq!(
            two.inv().unwrap().as_rational().unwrap(),
            Rat::new(BigInt::from(1), BigInt::from(2))
        );
    }

    #[test]
    fn inverse_errors() {
        let f5 = CycloField::get(5);
        assert!(matches!(CycloNum::zero(&f5).inv(), Err(Error::DivisionByZero)));
        let f7 = CycloField::get(7);
        let a = CycloNum::one(&f5);
        let b = CycloNum::one(&f7);
        assert!(matches!(a.checked_mul(&b), Err(Error::ModulusMismatch { .. })));
    }

    #[test]
    fn conj_is_ring_involution() {
        let f12 = CycloField::get(12);
        let a = CycloNum::root_of_unity(&f12, 5).add(&CycloNum::from_int(&f12, 3));
        let b = CycloNum::root_of_unity(&f12, 7).sub(&CycloNum::from_int(&f12, 2));
        assert_eq!(a.conj().conj(), a);
        assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        assert_eq!(a.add(&b).conj(), a.conj().add(&b.conj()));
        // z * conj(z) is real and nonnegative.
        let norm = a.mul(&a.conj()).complex_embed();
        assert!(norm.im.abs() < 1e-9 && norm.re >= 0.0);
    }

    #[test]
    fn complex_embedding() {
        let f4 = CycloField::get(4);
        let i = CycloNum::root_of_unity(&f4, 1).complex_embed();
        assert!((i.re).abs() < 1e-12 && (i.im - 1.0).abs() < 1e-12);
        let f3 = CycloField::get(3);
        let s = CycloNum::root_of_unity(&f3, 1).add(&CycloNum::root_of_unity(&f3, 2)).complex_embed();
        assert!((s.re + 1.0).abs() < 1e-12 && s.im.abs() < 1e-12);
    }

    #[test]
    fn coeff_string_roundtrip() {
        let f12 = CycloField::get(12);
        let a = CycloNum::root_of_unity(&f12, 5)
            .scale(&Rat::new(BigInt::from(-3), BigInt::from(7)))
            .add(&CycloNum::from_int(&f12, 2));
        let s = a.coeff_string();
        assert_eq!(CycloNum::parse_coeff_string(&s).unwrap(), a);
    }
}
