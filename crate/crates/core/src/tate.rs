//! Tate L-, ε- and γ-factors for tame characters, held exactly as ratios of
//! Laurent polynomials in X = q^{-s} with coefficients in Q(ζ_N).
//!
//! ε is defined by the closed tame formulas (a monomial for unramified χ, one
//! Gauss sum for ramified tame χ); the functional equations are then exact
//! Laurent-rational identities and serve as the acceptance oracle for the
//! convention. Half-integer powers of q are first-class via the exact √q, so
//! additive conductors of any parity are supported.

use std::sync::Arc;

use crate::cyclo::{CycloField, CycloNum, Rat};
use crate::error::Error;
use crate::finite_field::FqElem;
use crate::local_field::{FStarElem, TameLocalDatum};
use num::BigInt;

/// Multiplicative character of F* of conductor ≤ 1: unit-restriction exponent
/// k (so units map by t ↦ ζ_{q-1}^{k·dlog t}) together with the value at ϖ.
#[derive(Clone, Debug)]
pub struct TameMultChar {
    pub datum: Arc<TameLocalDatum>,
    pub k: u64,
    pub w_value: CycloNum,
}

impl PartialEq for TameMultChar {
    fn eq(&self, other: &Self) -> bool {
        self.k % (self.datum.q() - 1) == other.k % (other.datum.q() - 1) && self.w_value == other.w_value
    }
}

impl TameMultChar {
    pub fn new(datum: Arc<TameLocalDatum>, k: u64, w_value: CycloNum) -> Self {
        let k = k % (datum.q() - 1);
        TameMultChar { datum, k, w_value }
    }

    pub fn trivial(datum: &Arc<TameLocalDatum>) -> Self {
        let one = CycloNum::one(&datum.cyclo);
        Self::new(datum.clone(), 0, one)
    }

    /// θ_u: the unique nontrivial unramified quadratic character, x ↦ (-1)^{v(x)}.
    pub fn unramified_quadratic(datum: &Arc<TameLocalDatum>) -> Self {
        Self::new(datum.clone(), 0, CycloNum::from_int(&datum.cyclo, -1))
    }

    /// Ramified quadratic character (Legendre symbol on units) with the given
    /// value at ϖ.
    pub fn ramified_quadratic(datum: &Arc<TameLocalDatum>, w_sign: i64) -> Self {
        assert!(w_sign == 1 || w_sign == -1);
        Self::new(datum.clone(), (datum.q() - 1) / 2, CycloNum::from_int(&datum.cyclo, w_sign))
    }

    /// The three nontrivial quadratic characters of F* (n odd).
    pub fn nontrivial_quadratics(datum: &Arc<TameLocalDatum>) -> Vec<TameMultChar> {
        vec![
            Self::unramified_quadratic(datum),
            Self::ramified_quadratic(datum, 1),
            Self::ramified_quadratic(datum, -1),
        ]
    }

    pub fn value(&self, x: &FStarElem) -> CycloNum {
        let fq = &self.datum.field;
        let d = fq.dlog(&x.unit).expect("unit part must be nonzero") as i64;
        let unit_part = CycloNum::root_of_order(&self.datum.cyclo, fq.q - 1, self.k as i64 * d);
        self.w_value.pow(x.valuation).mul(&unit_part)
    }

    pub fn at_minus_one(&self) -> CycloNum {
        CycloNum::root_of_order(&self.datum.cyclo, self.datum.q() - 1, self.k as i64 * ((self.datum.q() - 1) / 2) as i64)
    }

    pub fn mul(&self, other: &TameMultChar) -> TameMultChar {
        TameMultChar::new(self.datum.clone(), self.k + other.k, self.w_value.mul(&other.w_value))
    }

    pub fn inv(&self) -> TameMultChar {
        let qm1 = self.datum.q() - 1;
        TameMultChar::new(self.datum.clone(), (qm1 - self.k % qm1) % qm1, self.w_value.inv().expect("character value is a unit"))
    }

    pub fn pow(&self, m: i64) -> TameMultChar {
        let qm1 = self.datum.q() - 1;
        let k = (self.k as i64 * m).rem_euclid(qm1 as i64) as u64;
        TameMultChar::new(self.datum.clone(), k, self.w_value.pow(m))
    }

    pub fn is_trivial(&self) -> bool {
        self.k == 0 && self.w_value.is_one()
    }

    pub fn is_quadratic(&self) -> bool {
        self.pow(2).is_trivial()
    }

    pub fn is_ramified(&self) -> bool {
        self.k % (self.datum.q() - 1) != 0
    }

    /// Conductor e(χ): 0 if unramified, else 1 (tame).
    pub fn conductor(&self) -> i64 {
        if self.is_ramified() {
            1
        } else {
            0
        }
    }
}

/// Additive character of F, represented by its conductor e (the smallest k
/// with ψ trivial on 𝔭^k) and a unit twist: relative to the base conductor-0
/// character whose residue character is t ↦ ζ_p^{Tr t}, this is ψ_c with
/// c = ϖ^{-e} · twist. Twisting by c lowers the conductor by v(c).
#[derive(Clone, Debug)]
pub struct AdditiveCharData {
    pub datum: Arc<TameLocalDatum>,
    pub e: i64,
    pub twist: FqElem,
}

impl AdditiveCharData {
    pub fn base(datum: &Arc<TameLocalDatum>) -> Self {
        AdditiveCharData { datum: datum.clone(), e: 0, twist: datum.field.one() }
    }

    pub fn with_conductor(datum: &Arc<TameLocalDatum>, e: i64) -> Self {
        AdditiveCharData { datum: datum.clone(), e, twist: datum.field.one() }
    }

    /// ψ ↦ ψ_c: conductor drops by v(c), the twist is multiplied by unit(c).
    pub fn twist_by(&self, c: &FStarElem) -> Self {
        assert!(!self.datum.field.is_zero(&c.unit));
        AdditiveCharData {
            datum: self.datum.clone(),
            e: self.e - c.valuation,
            twist: self.datum.field.mul(&self.twist, &c.unit),
        }
    }

    /// ψ_n: twist by the integer n (a unit since gcd(n, p) = 1).
    pub fn times_int(&self, m: i64) -> Self {
        let c = FStarElem::new(0, self.datum.field.from_residue(m));
        self.twist_by(&c)
    }

    /// The element c with ψ = (ψ_base)_c.
    pub fn c_elem(&self) -> FStarElem {
        FStarElem::new(-self.e, self.twist.clone())
    }
}

/// Laurent polynomial in X with CycloNum coefficients: X^{low} · Σ c_i X^i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    field: Arc<CycloField>,
    low: i64,
    coeffs: Vec<CycloNum>,
}

impl LaurentPoly {
    pub fn zero(field: &Arc<CycloField>) -> Self {
        LaurentPoly { field: field.clone(), low: 0, coeffs: vec![] }
    }

    pub fn constant(c: CycloNum) -> Self {
        let field = c.field().clone();
        Self::from_terms(&field, 0, vec![c])
    }

    pub fn one(field: &Arc<CycloField>) -> Self {
        Self::constant(CycloNum::one(field))
    }

    pub fn monomial(c: CycloNum, exp: i64) -> Self {
        let field = c.field().clone();
        Self::from_terms(&field, exp, vec![c])
    }

    /// Build from coefficients starting at X^{low}; trims zero ends.
    pub fn from_terms(field: &Arc<CycloField>, mut low: i64, mut coeffs: Vec<CycloNum>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        let lead_zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros > 0 {
            coeffs.drain(..lead_zeros);
            low += lead_zeros as i64;
        }
        if coeffs.is_empty() {
            low = 0;
        }
        LaurentPoly { field: field.clone(), low, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let mut out = vec![CycloNum::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::from_terms(&self.field, self.low + other.low, out)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = (self.low + self.coeffs.len() as i64).max(other.low + other.coeffs.len() as i64);
        let mut out = vec![CycloNum::zero(&self.field); (high - low) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let idx = (self.low - low) as usize + i;
            out[idx] = out[idx].add(c);
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            let idx = (other.low - low) as usize + i;
            out[idx] = out[idx].add(c);
        }
        Self::from_terms(&self.field, low, out)
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            field: self.field.clone(),
            low: self.low,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Evaluate at a nonzero point.
    pub fn eval(&self, x0: &CycloNum) -> CycloNum {
        let mut acc = CycloNum::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x0).add(c);
        }
        acc.mul(&x0.pow(self.low))
    }

    /// Multiplicity of x0 (nonzero) as a root, together with the quotient by
    /// (X - x0)^multiplicity.
    fn root_multiplicity(&self, x0: &CycloNum) -> (usize, LaurentPoly) {
        let mut mult = 0;
        let mut cur = self.clone();
        loop {
            if cur.is_zero() || !cur.eval(x0).is_zero() {
                return (mult, cur);
            }
            // synthetic division of the ordinary part by (X - x0)
            let n = cur.coeffs.len();
            let mut quot = vec![CycloNum::zero(&self.field); n - 1];
            let mut carry = CycloNum::zero(&self.field);
            for i in (1..n).rev() {
                carry = cur.coeffs[i].add(&carry.mul(x0));
                quot[i - 1] = carry.clone();
            }
            cur = Self::from_terms(&self.field, cur.low, quot);
            mult += 1;
        }
    }

    /// Substitute X ↦ scale · X^{±1}.
    pub fn substitute(&self, scale: &CycloNum, invert: bool) -> Self {
        let mut out = Self::zero(&self.field);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.low + i as i64;
            let coeff = c.mul(&scale.pow(k));
            let exp = if invert { -k } else { k };
            out = out.add(&Self::monomial(coeff, exp));
        }
        out
    }
}

/// Ratio of Laurent polynomials; the home of L, ε, γ and μ as functions of s.
#[derive(Clone, Debug)]
pub struct LaurentRat {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

impl LaurentRat {
    pub fn one(field: &Arc<CycloField>) -> Self {
        LaurentRat { num: LaurentPoly::one(field), den: LaurentPoly::one(field) }
    }

    pub fn constant(c: CycloNum) -> Self {
        let field = c.field().clone();
        LaurentRat { num: LaurentPoly::constant(c), den: LaurentPoly::one(&field) }
    }

    pub fn monomial(c: CycloNum, exp: i64) -> Self {
        let field = c.field().clone();
        LaurentRat { num: LaurentPoly::monomial(c, exp), den: LaurentPoly::one(&field) }
    }

    pub fn from_parts(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        LaurentRat { num, den }
    }

    pub fn mul(&self, other: &Self) -> Self {
        LaurentRat { num: self.num.mul(&other.num), den: self.den.mul(&other.den) }
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(LaurentRat { num: self.den.clone(), den: self.num.clone() })
    }

    pub fn scale(&self, c: &CycloNum) -> Self {
        LaurentRat { num: self.num.mul(&LaurentPoly::constant(c.clone())), den: self.den.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Exact equality as rational functions, by cross-multiplication.
    pub fn eq_rat(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// Substitute X ↦ scale · X^{±1} in both numerator and denominator.
    pub fn substitute(&self, scale: &CycloNum, invert: bool) -> Self {
        LaurentRat { num: self.num.substitute(scale, invert), den: self.den.substitute(scale, invert) }
    }

    /// Evaluate at a nonzero point, cancelling any shared (X - x0) factors;
    /// a genuine pole is reported with its order.
    pub fn eval(&self, x0: &CycloNum) -> Result<CycloNum, Error> {
        let (mn, num) = self.num.root_multiplicity(x0);
        let (md, den) = self.den.root_multiplicity(x0);
        if self.num.is_zero() {
            return Ok(CycloNum::zero(x0.field()));
        }
        if md > mn {
            return Err(Error::Pole { order: md - mn });
        }
        let num_val = if mn > md {
            CycloNum::zero(x0.field())
        } else {
            num.eval(x0)
        };
        let den_val = den.eval(x0);
        Ok(num_val.mul(&den_val.inv().expect("denominator nonzero after cancellation")))
    }

    /// Order of the pole at x0 (0 when regular).
    pub fn pole_order(&self, x0: &CycloNum) -> usize {
        let (mn, _) = self.num.root_multiplicity(x0);
        let (md, _) = self.den.root_multiplicity(x0);
        md.saturating_sub(mn)
    }
}

/// X evaluated at s = s2/2, i.e. q^{-s} = √q^{-s2}.
pub fn x_at_half_s(datum: &TameLocalDatum, s2: i64) -> CycloNum {
    datum.sqrt_q.pow(-s2)
}

/// Evaluate a Laurent rational at s = s2/2 exactly.
pub fn evaluate(datum: &TameLocalDatum, f: &LaurentRat, s2: i64) -> Result<CycloNum, Error> {
    f.eval(&x_at_half_s(datum, s2))
}

/// L(s, χ): 1/(1 - χ(ϖ) X) for unramified χ, 1 otherwise.
pub fn l_factor(chi: &TameMultChar) -> LaurentRat {
    let field = &chi.datum.cyclo;
    if chi.is_ramified() {
        LaurentRat::one(field)
    } else {
        let den = LaurentPoly::one(field).sub(&LaurentPoly::monomial(chi.w_value.clone(), 1));
        LaurentRat::from_parts(LaurentPoly::one(field), den)
    }
}

/// ε(s, χ, ψ) as a monomial c · X^m with m = e(χ) - e(ψ), by the closed tame
/// formulas.
///
/// Unramified χ: ε = (χ(ϖ) √q X)^{-e(ψ)}. Ramified tame χ: the base value at
/// conductor 0 and unit twist 1 is χ(ϖ)·G(ω^{-k}, 1)·X, transported to
/// general ψ_c by ε(s, χ, ψ_c) = χ(c) |c|^{s-1/2} ε(s, χ, ψ).
pub fn epsilon_factor(chi: &TameMultChar, psi: &AdditiveCharData) -> LaurentRat {
    let datum = &chi.datum;
    let field = &datum.cyclo;
    let e = psi.e;
    if !chi.is_ramified() {
        let coeff = chi.w_value.pow(-e).mul(&datum.sqrt_q.pow(-e));
        LaurentRat::monomial(coeff, -e)
    } else {
        let fq = &datum.field;
        let gauss = fq.gauss_sum(field, -(chi.k as i64), &fq.one()).expect("unit twist");
        let chi_c = chi.value(&psi.c_elem());
        let coeff = chi_c.mul(&datum.sqrt_q.pow(-e)).mul(&chi.w_value).mul(&gauss);
        LaurentRat::monomial(coeff, 1 - e)
    }
}

/// γ(s, χ, ψ) = ε(s, χ, ψ) · L(1-s, χ^{-1}) / L(s, χ), with L(1-s, ·)
/// realized by the substitution X ↦ q^{-1} X^{-1}.
pub fn gamma_factor(chi: &TameMultChar, psi: &AdditiveCharData) -> LaurentRat {
    let datum = &chi.datum;
    let field = &datum.cyclo;
    let eps = epsilon_factor(chi, psi);
    let q_inv = CycloNum::from_int(field, datum.q() as i64).inv().unwrap();
    let l_dual = l_factor(&chi.inv()).substitute(&q_inv, true);
    let l_here_inv = l_factor(chi).inv().expect("L-factor is nonzero");
    eps.mul(&l_dual).mul(&l_here_inv)
}

/// Convenience: rational scalar in Q(ζ_N).
pub fn rational(field: &Arc<CycloField>, num: i64, den: i64) -> CycloNum {
    assert!(den != 0);
    let r = Rat::new(BigInt::from(num), BigInt::from(den));
    CycloNum::from_rational(field, r)
}

/// q^m as an exact element.
pub fn q_power(datum: &TameLocalDatum, m: i64) -> CycloNum {
    CycloNum::from_int(&datum.cyclo, datum.q() as i64).pow(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::FqDescriptor;

    fn datum(p: u64, n: u64) -> Arc<TameLocalDatum> {
        TameLocalDatum::new(FqDescriptor::prime_field(p).unwrap(), n).unwrap()
    }

    #[test]
    fn l_factors() {
        let d = datum(7, 3);
        let triv = TameMultChar::trivial(&d);
        // trivial character: 1/(1 - X); at s = 1 this is q/(q-1)
        let l = l_factor(&triv);
        assert_eq!(evaluate(&d, &l, 2).unwrap(), rational(&d.cyclo, 7, 6));
        // ramified characters have L = 1
        let ram = TameMultChar::ramified_quadratic(&d, 1);
        assert!(l_factor(&ram).eq_rat(&LaurentRat::one(&d.cyclo)));
        // θ_u: 1/(1 + X)
        let theta_u = TameMultChar::unramified_quadratic(&d);
        assert_eq!(evaluate(&d, &l_factor(&theta_u), 2).unwrap(), rational(&d.cyclo, 7, 8));
    }

    #[test]
    fn evaluate_points() {
        let d = datum(7, 3);
        let x = LaurentRat::monomial(CycloNum::one(&d.cyclo), 1);
        // X at s = 1/2 is 1/√q
        assert_eq!(evaluate(&d, &x, 1).unwrap(), d.sqrt_q.inv().unwrap());
        // pole of 1/(1 - X) at s = 0
        let triv = TameMultChar::trivial(&d);
        match evaluate(&d, &l_factor(&triv), 0) {
            Err(Error::Pole { order }) => assert_eq!(order, 1),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn epsilon_unramified_base_is_one() {
        let d = datum(7, 3);
        let psi = AdditiveCharData::base(&d);
        for chi in [TameMultChar::trivial(&d), TameMultChar::unramified_quadratic(&d)] {
            assert!(epsilon_factor(&chi, &psi).eq_rat(&LaurentRat::one(&d.cyclo)));
        }
    }

    #[test]
    fn gamma_theta_u_at_one() {
        // γ(1, θ_u, ψ) = (q+1)/(2q): 4/7 at q = 7
        let d = datum(7, 3);
        let psi = AdditiveCharData::base(&d);
        let theta_u = TameMultChar::unramified_quadratic(&d);
        let g = evaluate(&d, &gamma_factor(&theta_u, &psi), 2).unwrap();
        assert_eq!(g, rational(&d.cyclo, 4, 7));
    }

    #[test]
    fn gamma_trivial_shape() {
        // trivial χ, e(ψ) = 0: γ(s) = (1 - X)/(1 - q^{-1} X^{-1})
        let d = datum(7, 3);
        let psi = AdditiveCharData::base(&d);
        let triv = TameMultChar::trivial(&d);
        let g = gamma_factor(&triv, &psi);
        let one = LaurentPoly::one(&d.cyclo);
        let num = one.sub(&LaurentPoly::monomial(CycloNum::one(&d.cyclo), 1));
        let den = one.sub(&LaurentPoly::monomial(q_power(&d, -1), -1));
        assert!(g.eq_rat(&LaurentRat::from_parts(num, den)));
    }

    #[test]
    fn gamma_ramified_is_epsilon() {
        let d = datum(13, 3);
        let psi = AdditiveCharData::with_conductor(&d, 1);
        let chi = TameMultChar::new(d.clone(), 5, CycloNum::root_of_order(&d.cyclo, 12, 2));
        assert!(gamma_factor(&chi, &psi).eq_rat(&epsilon_factor(&chi, &psi)));
    }

    #[test]
    fn epsilon_functional_equations() {
        // Eqs (1), (2), (3)-as-read, (5) for a sample of characters and conductors.
        for (p, n) in [(7u64, 3u64), (13, 3)] {
            let d = datum(p, n);
            let field = &d.cyclo;
            let qm1 = d.q() - 1;
            for k in 0..qm1 {
                for w_exp in [0i64, 1, (qm1 / 2) as i64] {
                    let chi = TameMultChar::new(d.clone(), k, CycloNum::root_of_order(field, qm1, w_exp));
                    for e in [-1i64, 0, 1, 2] {
                        let psi = AdditiveCharData::with_conductor(&d, e);
                        let eps = epsilon_factor(&chi, &psi);
                        let q_inv = q_power(&d, -1);

                        // (1): ε(1-s, χ^{-1}, ψ) = χ(-1) ε(s, χ, ψ)^{-1}
                        let lhs1 = epsilon_factor(&chi.inv(), &psi).substitute(&q_inv, true);
                        let rhs1 = eps.inv().unwrap().scale(&chi.at_minus_one());
                        assert!(lhs1.eq_rat(&rhs1), "eq1 failed k={k} e={e}");

                        // (2): ε(s, χ, ψ_c) = χ(c) |c|^{s-1/2} ε(s, χ, ψ)
                        for c in [d.uniformizer(), d.elem(-1, 1), d.elem(0, 3), d.elem(1, 3)] {
                            let lhs2 = epsilon_factor(&chi, &psi.twist_by(&c));
                            let abs_c =
                                LaurentRat::monomial(d.sqrt_q.pow(c.valuation), c.valuation);
                            let rhs2 = eps.mul(&abs_c).scale(&chi.value(&c));
                            assert!(lhs2.eq_rat(&rhs2), "eq2 failed k={k} e={e}");
                        }

                        // (3) at t = 1 with the exponent read as (e(ψ)-e(χ))t
                        let lhs3 = eps.substitute(&q_inv, false);
                        let rhs3 = eps.scale(&q_power(&d, e - chi.conductor()));
                        assert!(lhs3.eq_rat(&rhs3), "eq3 failed k={k} e={e}");

                        // (5): ε(1-s, χ^{-1}, ψ) ε(1+s, χ, ψ) = χ(-1) q^{e(ψ)-e(χ)}
                        let shifted = eps.substitute(&q_inv, false); // s ↦ s+1
                        let lhs5 = lhs1.mul(&shifted);
                        let rhs5 = LaurentRat::constant(
                            chi.at_minus_one().mul(&q_power(&d, e - chi.conductor())),
                        );
                        assert!(lhs5.eq_rat(&rhs5), "eq5 failed k={k} e={e}");
                    }
                }
            }
        }
    }
}
