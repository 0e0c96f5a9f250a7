//! Arithmetic in the residue field F_q (q = p^f), discrete logarithms,
//! residue characters and Gauss sums.
//!
//! Discrete logs are held in a full table built once at construction; at desk
//! scale (q up to ~10^4) this beats any fancier method. The Gauss sum is the
//! engine behind every ramified epsilon-factor.

use std::collections::HashMap;
use std::sync::Arc;

use crate::cyclo::{CycloField, CycloNum};
use crate::error::Error;

/// Element of F_q as f coefficients in [0, p), low degree first.
pub type FqElem = Vec<u64>;

/// A concrete model of F_q = F_p[X]/(m), with a fixed generator of F_q* and a
/// precomputed discrete-log table.
#[derive(Debug)]
pub struct FqDescriptor {
    pub p: u64,
    pub f: usize,
    pub q: u64,
    /// Monic defining polynomial of degree f (f+1 coefficients mod p).
    /// For f = 1 this is the placeholder X.
    pub modulus_poly: Vec<u64>,
    pub generator: FqElem,
    dlog_table: HashMap<FqElem, u64>,
    powers: Vec<FqElem>,
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == [n]
}

impl FqDescriptor {
    /// Build F_p (f = 1).
    pub fn prime_field(p: u64) -> Result<Arc<Self>, Error> {
        Self::new(p, 1, None)
    }

    /// Build F_{p^f}. A monic irreducible defining polynomial must be supplied
    /// when f > 1; irreducibility is verified, not assumed.
    pub fn new(p: u64, f: usize, modulus_poly: Option<Vec<u64>>) -> Result<Arc<Self>, Error> {
        if !is_prime(p) || p == 2 {
            return Err(Error::Domain(format!("p = {p} must be an odd prime")));
        }
        if f == 0 {
            return Err(Error::Domain("f must be positive".into()));
        }
        let q = p.checked_pow(f as u32).ok_or_else(|| Error::Domain("q overflows".into()))?;
        let modulus_poly = if f == 1 {
            vec![0, 1]
        } else {
            let m = modulus_poly
                .ok_or_else(|| Error::Domain("modulus_poly required when f > 1".into()))?
                .iter()
                .map(|c| c % p)
                .collect::<Vec<_>>();
            if m.len() != f + 1 || m[f] != 1 {
                return Err(Error::Domain("modulus_poly must be monic of degree f".into()));
            }
            if !poly_is_irreducible(&m, p, f) {
                return Err(Error::Domain("modulus_poly is reducible over F_p".into()));
            }
            m
        };
        let mut desc = FqDescriptor {
            p,
            f,
            q,
            modulus_poly,
            generator: vec![0; f],
            dlog_table: HashMap::new(),
            powers: Vec::new(),
        };
        desc.generator = desc.find_generator();
        let mut powers = Vec::with_capacity((q - 1) as usize);
        let mut table = HashMap::with_capacity((q - 1) as usize);
        let mut acc = desc.one();
        for i in 0..q - 1 {
            table.insert(acc.clone(), i);
            powers.push(acc.clone());
            acc = desc.mul(&acc, &desc.generator);
        }
        debug_assert_eq!(acc, desc.one());
        desc.dlog_table = table;
        desc.powers = powers;
        Ok(Arc::new(desc))
    }

    pub fn zero(&self) -> FqElem {
        vec![0; self.f]
    }

    pub fn one(&self) -> FqElem {
        self.from_residue(1)
    }

    pub fn from_residue(&self, r: i64) -> FqElem {
        let mut e = vec![0; self.f];
        e[0] = r.rem_euclid(self.p as i64) as u64;
        e
    }

    pub fn is_zero(&self, x: &FqElem) -> bool {
        x.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        a.iter().map(|&x| (self.p - x) % self.p).collect()
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let p = self.p as u128;
        let mut prod = vec![0u128; 2 * self.f - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        // reduce by the monic modulus polynomial
        for i in (self.f..prod.len()).rev() {
            let c = prod[i];
            if c != 0 {
                prod[i] = 0;
                for j in 0..self.f {
                    let m = self.modulus_poly[j] as u128;
                    prod[i - self.f + j] = (prod[i - self.f + j] + (p - m % p) * c) % p;
                }
            }
        }
        prod[..self.f].iter().map(|&c| c as u64).collect()
    }

    pub fn pow(&self, a: &FqElem, mut e: u64) -> FqElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FqElem) -> Result<FqElem, Error> {
        let d = self.dlog(a)?;
        Ok(self.pow_of_generator((self.q - 1 - d) % (self.q - 1)))
    }

    /// g^e for the fixed generator g.
    pub fn pow_of_generator(&self, e: u64) -> FqElem {
        self.powers[(e % (self.q - 1)) as usize].clone()
    }

    /// Smallest (lexicographic coefficient order) element of order q - 1.
    fn find_generator(&self) -> FqElem {
        let factors = prime_factors(self.q - 1);
        let mut candidate = self.zero();
        loop {
            // increment in lexicographic coefficient order
            let mut i = self.f;
            loop {
                i -= 1;
                candidate[i] += 1;
                if candidate[i] < self.p {
                    break;
                }
                candidate[i] = 0;
                assert!(i > 0, "no generator found");
            }
            if self.is_zero(&candidate) {
                continue;
            }
            let full_order = factors.iter().all(|&ell| self.pow(&candidate, (self.q - 1) / ell) != self.one());
            if full_order && self.pow(&candidate, self.q - 1) == self.one() {
                return candidate;
            }
        }
    }

    /// Discrete log base the fixed generator; errors on zero.
    pub fn dlog(&self, x: &FqElem) -> Result<u64, Error> {
        if self.is_zero(x) {
            return Err(Error::Domain("dlog of zero".into()));
        }
        Ok(*self.dlog_table.get(x).expect("element not reduced"))
    }

    /// Tr_{F_q/F_p}(x) as a residue mod p.
    pub fn trace_to_prime_field(&self, x: &FqElem) -> u64 {
        let mut acc = self.zero();
        let mut y = x.clone();
        for _ in 0..self.f {
            acc = self.add(&acc, &y);
            y = self.pow(&y, self.p);
        }
        debug_assert!(acc[1..].iter().all(|&c| c == 0), "trace must lie in the prime field");
        acc[0]
    }

    /// Residue additive character value ζ_p^{Tr(x)} in Q(ζ_N). Requires p | N.
    pub fn residue_additive_value(&self, cyclo: &Arc<CycloField>, x: &FqElem) -> CycloNum {
        CycloNum::root_of_order(cyclo, self.p, self.trace_to_prime_field(x) as i64)
    }

    /// Residue multiplicative character value ζ_{q-1}^{k dlog(x)}. Requires
    /// q - 1 | N and x ≠ 0.
    pub fn residue_mult_value(&self, cyclo: &Arc<CycloField>, k: i64, x: &FqElem) -> Result<CycloNum, Error> {
        let d = self.dlog(x)? as i64;
        Ok(CycloNum::root_of_order(cyclo, self.q - 1, k.rem_euclid((self.q - 1) as i64) * d))
    }

    /// Gauss sum Σ_{t ∈ F_q*} ω^k(t) ζ_p^{Tr(w t)} for a unit w.
    pub fn gauss_sum(&self, cyclo: &Arc<CycloField>, k: i64, w: &FqElem) -> Result<CycloNum, Error> {
        if self.is_zero(w) {
            return Err(Error::Domain("gauss_sum with zero twist".into()));
        }
        let mut acc = CycloNum::zero(cyclo);
        for t in &self.powers {
            let mult = self.residue_mult_value(cyclo, k, t)?;
            let add = self.residue_additive_value(cyclo, &self.mul(w, t));
            acc = acc.add(&mult.mul(&add));
        }
        Ok(acc)
    }

    /// Exact √q > 0 inside Q(ζ_N), built from the quadratic Gauss sum
    /// τ = Σ_{t ∈ F_p*} (t|p) ζ_p^t, which equals √p for p ≡ 1 (4) and i√p
    /// for p ≡ 3 (4). Requires 4p | N.
    pub fn sqrt_q(&self, cyclo: &Arc<CycloField>) -> CycloNum {
        let p = self.p;
        let mut tau = CycloNum::zero(cyclo);
        for t in 1..p {
            let legendre = mod_pow(t, (p - 1) / 2, p);
            let sign = if legendre == 1 { 1 } else { -1 };
            let term = CycloNum::root_of_order(cyclo, p, t as i64);
            tau = if sign == 1 { tau.add(&term) } else { tau.sub(&term) };
        }
        let sqrt_p = if p % 4 == 1 {
            tau
        } else {
            tau.mul(&CycloNum::root_of_order(cyclo, 4, -1))
        };
        let sqrt_q = sqrt_p.pow(self.f as i64);
        debug_assert_eq!(
            sqrt_q.mul(&sqrt_q),
            CycloNum::from_int(cyclo, self.q as i64),
            "sqrt_q^2 must equal q"
        );
        debug_assert!(crate::cyclo::embeds_positive(&sqrt_q));
        sqrt_q
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Irreducibility over F_p of a monic degree-f polynomial: m is irreducible
/// iff X^{p^f} ≡ X (mod m) and gcd(X^{p^{f/ell}} - X, m) = 1 for every prime
/// ell | f. (For f ≤ 3 this subsumes the no-roots check.)
fn poly_is_irreducible(m: &[u64], p: u64, f: usize) -> bool {
    let frob = |k: usize| -> Vec<u64> {
        // X^{p^k} mod m by repeated exponentiation
        let mut x = vec![0u64, 1];
        for _ in 0..k {
            x = poly_mod_pow(&x, p, m, p);
        }
        x
    };
    let x = vec![0u64, 1];
    let top = poly_mod_sub(&frob(f), &x, p);
    if !top.is_empty() {
        return false;
    }
    for ell in prime_factors(f as u64) {
        let g = poly_mod_sub(&frob(f / ell as usize), &x, p);
        if poly_gcd(&g, m, p).len() != 1 {
            return false;
        }
    }
    true
}

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_mod_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] = c % p;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] = (out[i] + p - c % p) % p;
    }
    poly_trim(out)
}

fn poly_mod_mul(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p as u128;
        }
    }
    // reduce mod monic m
    let d = m.len() - 1;
    for i in (d..prod.len()).rev() {
        let c = prod[i];
        if c != 0 {
            prod[i] = 0;
            for j in 0..d {
                let mm = m[j] as u128 % p as u128;
                prod[i - d + j] = (prod[i - d + j] + (p as u128 - mm) * c) % p as u128;
            }
        }
    }
    poly_trim(prod.iter().map(|&c| c as u64).collect())
}

fn poly_mod_pow(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut base = a.to_vec();
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mod_mul(&acc, &base, m, p);
        }
        base = poly_mod_mul(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r0 = poly_trim(a.to_vec());
    let mut r1 = poly_trim(b.to_vec());
    while !r1.is_empty() {
        let r = poly_rem(&r0, &r1, p);
        r0 = r1;
        r1 = r;
    }
    // normalize monic
    if let Some(&lead) = r0.last() {
        let inv = mod_pow(lead, p - 2, p);
        for c in &mut r0 {
            *c = *c * inv % p;
        }
    }
    r0
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let lead_inv = mod_pow(b[db], p - 2, p);
    let mut rem: Vec<u64> = a.iter().map(|&c| c % p).collect();
    while rem.len() > db {
        let top = rem.len() - 1;
        let c = rem[top] * lead_inv % p;
        if c != 0 {
            for j in 0..=db {
                rem[top - db + j] = (rem[top - db + j] + p - c * b[j] % p) % p;
            }
        }
        rem.pop();
        rem = poly_trim(rem);
        if rem.len() <= db {
            break;
        }
    }
    poly_trim(rem)
}
