//! The tame local-field model: F* modulo 1+P, the quotient F*/F*ⁿ, the
//! nth-power Hilbert symbol, the characters η_x and maximal isotropic
//! subgroup pairs (J̄, K̄).
//!
//! Elements of F* are modeled as ϖ^v·u with u a unit residue; this is
//! sufficient because every character in scope has conductor ≤ 1 and the
//! symbol is tame. The tame evaluation formula (tame symbol composed with the
//! (q-1)/n power map) is certified by the bilinearity / antisymmetry / kernel
//! invariants in the test suite rather than trusted.

use std::collections::BTreeSet;
use std::sync::Arc;

use once_cell::sync::OnceCell;

use crate::cyclo::{CycloField, CycloNum};
use crate::error::Error;
use crate::finite_field::{FqDescriptor, FqElem};
use crate::tate::TameMultChar;

/// Element of F* modulo 1+P: x = ϖ^v · u.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FStarElem {
    pub valuation: i64,
    pub unit: FqElem,
}

impl FStarElem {
    pub fn new(valuation: i64, unit: FqElem) -> Self {
        FStarElem { valuation, unit }
    }
}

/// Class in F*/F*ⁿ, written additively as (valuation mod n, dlog of unit mod n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct ClassModN {
    pub a: u64,
    pub b: u64,
}

impl ClassModN {
    pub fn zero() -> Self {
        ClassModN { a: 0, b: 0 }
    }

    pub fn add(&self, other: &Self, n: u64) -> Self {
        ClassModN { a: (self.a + other.a) % n, b: (self.b + other.b) % n }
    }

    pub fn neg(&self, n: u64) -> Self {
        ClassModN { a: (n - self.a % n) % n, b: (n - self.b % n) % n }
    }

    pub fn sub(&self, other: &Self, n: u64) -> Self {
        self.add(&other.neg(n), n)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

/// A pair (J̄, K̄) of maximal isotropic subgroups with J̄ × K̄ = F*/F*ⁿ and
/// k ↦ η_k|_J̄ an isomorphism onto the dual of J̄. Elements are kept in a
/// fixed lexicographic order so matrix indexing is deterministic.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct IsotropicPair {
    pub j_elements: Vec<ClassModN>,
    pub k_elements: Vec<ClassModN>,
}

/// The ambient arithmetic context: residue field, cover degree n, cyclotomic
/// modulus N = lcm(4, p, q-1) and an exact √q.
pub struct TameLocalDatum {
    pub field: Arc<FqDescriptor>,
    pub n: u64,
    pub cyclo: Arc<CycloField>,
    pub sqrt_q: CycloNum,
    isotropics: OnceCell<Vec<Vec<ClassModN>>>,
    pairs: OnceCell<Vec<IsotropicPair>>,
}

impl std::fmt::Debug for TameLocalDatum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TameLocalDatum")
            .field("p", &self.field.p)
            .field("f", &self.field.f)
            .field("n", &self.n)
            .field("N", &self.cyclo.modulus)
            .finish()
    }
}

impl TameLocalDatum {
    pub fn new(field: Arc<FqDescriptor>, n: u64) -> Result<Arc<Self>, Error> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::Domain(format!("n = {n} must be an odd integer >= 3")));
        }
        if (field.q - 1) % n != 0 {
            return Err(Error::Domain(format!(
                "tame condition violated: n = {n} does not divide q - 1 = {}",
                field.q - 1
            )));
        }
        let big_n = num::integer::lcm(num::integer::lcm(4, field.p), field.q - 1);
        let cyclo = CycloField::get(big_n);
        let sqrt_q = field.sqrt_q(&cyclo);
        Ok(Arc::new(TameLocalDatum {
            field,
            n,
            cyclo,
            sqrt_q,
            isotropics: OnceCell::new(),
            pairs: OnceCell::new(),
        }))
    }

    pub fn q(&self) -> u64 {
        self.field.q
    }

    /// Normalize an element spec so the unit lives in the residue field.
    pub fn elem(&self, valuation: i64, unit_residue: i64) -> FStarElem {
        FStarElem::new(valuation, self.field.from_residue(unit_residue))
    }

    pub fn uniformizer(&self) -> FStarElem {
        FStarElem::new(1, self.field.one())
    }

    pub fn unit_one(&self) -> FStarElem {
        FStarElem::new(0, self.field.one())
    }

    /// Quotient map F* → F*/F*ⁿ; the kernel is exactly F*ⁿ·(1+P).
    pub fn class_of(&self, x: &FStarElem) -> ClassModN {
        let n = self.n;
        let a = x.valuation.rem_euclid(n as i64) as u64;
        let b = self.field.dlog(&x.unit).expect("unit part must be nonzero") % n;
        ClassModN { a, b }
    }

    /// Canonical lift (a, b) ↦ ϖ^a · g^b of a class to F*.
    pub fn lift(&self, c: &ClassModN) -> FStarElem {
        FStarElem::new(c.a as i64, self.field.pow_of_generator(c.b))
    }

    pub fn mul_elems(&self, x: &FStarElem, y: &FStarElem) -> FStarElem {
        FStarElem::new(x.valuation + y.valuation, self.field.mul(&x.unit, &y.unit))
    }

    /// The tame nth-power Hilbert symbol
    /// (x, y) = ω((-1)^{v(x)v(y)} u_x^{v(y)} u_y^{-v(x)})^{(q-1)/n} ∈ μ_n.
    pub fn hilbert_symbol(&self, x: &FStarElem, y: &FStarElem) -> CycloNum {
        let fq = &self.field;
        let qm1 = (fq.q - 1) as i64;
        let du_x = fq.dlog(&x.unit).expect("unit part must be nonzero") as i64;
        let du_y = fq.dlog(&y.unit).expect("unit part must be nonzero") as i64;
        // dlog of the tame-symbol unit (-1)^{v_x v_y} u_x^{v_y} u_y^{-v_x}
        let dlog_t = (x.valuation * y.valuation).rem_euclid(2) * (qm1 / 2) + y.valuation * du_x
            - x.valuation * du_y;
        CycloNum::root_of_order(&self.cyclo, self.n, dlog_t.rem_euclid(self.n as i64))
    }

    /// The pairing induced on F*/F*ⁿ, evaluated on canonical lifts.
    pub fn class_pairing(&self, c1: &ClassModN, c2: &ClassModN) -> CycloNum {
        self.hilbert_symbol(&self.lift(c1), &self.lift(c2))
    }

    /// The character η_x: y ↦ (x, y) of F*, of order dividing n.
    pub fn eta_character(self: &Arc<Self>, x: &FStarElem) -> TameMultChar {
        let qm1 = (self.field.q - 1) as i64;
        // on units: (x, u) = ζ_n^{-v(x) dlog u}
        let k = (-x.valuation * qm1 / self.n as i64).rem_euclid(qm1);
        let w = self.hilbert_symbol(x, &self.uniformizer());
        TameMultChar::new(self.clone(), k as u64, w)
    }

    /// All order-n subgroups of (Z/n)² on which the pairing is trivial,
    /// found by exhaustive subgroup enumeration.
    pub fn enumerate_maximal_isotropics(&self) -> &Vec<Vec<ClassModN>> {
        self.isotropics.get_or_init(|| {
            let n = self.n;
            let all: Vec<ClassModN> =
                (0..n).flat_map(|a| (0..n).map(move |b| ClassModN { a, b })).collect();
            let mut seen: BTreeSet<Vec<ClassModN>> = BTreeSet::new();
            // subgroups generated by at most two elements cover everything in (Z/n)^2
            for g1 in &all {
                for g2 in &all {
                    let sub = span(&[*g1, *g2], n);
                    if sub.len() == n as usize {
                        seen.insert(sub);
                    }
                }
            }
            let one = CycloNum::one(&self.cyclo);
            seen.into_iter()
                .filter(|s| {
                    s.iter().all(|x| s.iter().all(|y| self.class_pairing(x, y) == one))
                })
                .collect()
        })
    }

    /// All ordered pairs (J̄, K̄) of maximal isotropics satisfying the
    /// complement and duality properties; both are re-verified, not assumed.
    pub fn isotropic_pairs(&self) -> &Vec<IsotropicPair> {
        self.pairs.get_or_init(|| {
            let isos = self.enumerate_maximal_isotropics().clone();
            let mut out = Vec::new();
            for j in &isos {
                for k in &isos {
                    if j == k {
                        continue;
                    }
                    // property (1): trivial intersection, so J + K is everything
                    let trivial_meet = j.iter().filter(|x| k.contains(x)).count() == 1;
                    if !trivial_meet {
                        continue;
                    }
                    // property (2): k ↦ η_k|_J injective into the dual of J
                    let mut tables: Vec<Vec<CycloNum>> = Vec::new();
                    let mut injective = true;
                    for kk in k {
                        let row: Vec<CycloNum> =
                            j.iter().map(|jj| self.class_pairing(kk, jj)).collect();
                        if tables.contains(&row) {
                            injective = false;
                            break;
                        }
                        tables.push(row);
                    }
                    if injective {
                        out.push(IsotropicPair { j_elements: j.clone(), k_elements: k.clone() });
                    }
                }
            }
            assert!(!out.is_empty(), "no valid isotropic pair: datum inconsistency");
            out
        })
    }

    /// The standard pair (units·F*ⁿ, ⟨ϖ⟩·F*ⁿ) when it is valid.
    pub fn standard_pair(&self) -> IsotropicPair {
        let n = self.n;
        let j: Vec<ClassModN> = (0..n).map(|b| ClassModN { a: 0, b }).collect();
        let k: Vec<ClassModN> = (0..n).map(|a| ClassModN { a, b: 0 }).collect();
        IsotropicPair { j_elements: j, k_elements: k }
    }
}

fn span(gens: &[ClassModN], n: u64) -> Vec<ClassModN> {
    let mut set: BTreeSet<ClassModN> = BTreeSet::new();
    set.insert(ClassModN::zero());
    loop {
        let mut grew = false;
        let current: Vec<ClassModN> = set.iter().copied().collect();
        for x in &current {
            for g in gens {
                let y = x.add(g, n);
                if set.insert(y) {
                    grew = true;
                }
            }
        }
        if !grew {
            return set.into_iter().collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(p: u64, n: u64) -> Arc<TameLocalDatum> {
        TameLocalDatum::new(FqDescriptor::prime_field(p).unwrap(), n).unwrap()
    }

    #[test]
    fn construction_guards() {
        let fq = FqDescriptor::prime_field(7).unwrap();
        assert!(TameLocalDatum::new(fq.clone(), 4).is_err());
        assert!(TameLocalDatum::new(fq.clone(), 5).is_err()); // 5 does not divide 6
        assert!(TameLocalDatum::new(fq, 3).is_ok());
    }

    #[test]
    fn class_map() {
        let d = datum(7, 3);
        // q = 7, g = 3: (v=4, u=3) -> (1, 1)
        assert_eq!(d.class_of(&d.elem(4, 3)), ClassModN { a: 1, b: 1 });
        assert_eq!(d.class_of(&d.unit_one()), ClassModN::zero());
        // nth powers die: x^3 for x = (1, g)
        let x = d.elem(1, 3);
        let x3 = d.mul_elems(&d.mul_elems(&x, &x), &x);
        assert_eq!(d.class_of(&x3), ClassModN::zero());
    }

    #[test]
    fn hilbert_symbol_values() {
        let d = datum(7, 3);
        let pi = d.uniformizer();
        let g = d.elem(0, 3);
        // units pair trivially
        assert!(d.hilbert_symbol(&g, &d.elem(0, 5)).is_one());
        // (ϖ, ϖ) = ω(-1)^2 = 1
        assert!(d.hilbert_symbol(&pi, &pi).is_one());
        // (ϖ, g) = ζ₃^{-1}
        assert_eq!(d.hilbert_symbol(&pi, &g), CycloNum::root_of_order(&d.cyclo, 3, -1));
    }

    #[test]
    fn hilbert_symbol_laws_exhaustive() {
        for (p, n) in [(7u64, 3u64), (11, 5)] {
            let d = datum(p, n);
            let classes: Vec<ClassModN> =
                (0..n).flat_map(|a| (0..n).map(move |b| ClassModN { a, b })).collect();
            let one = CycloNum::one(&d.cyclo);
            for x in &classes {
                let lx = d.lift(x);
                // kernel: pairs trivially with everything iff class is zero
                let all_trivial = classes.iter().all(|y| d.class_pairing(x, y) == one);
                assert_eq!(all_trivial, x.is_zero());
                // (x, -x) = 1 and (x, -1) = 1
                let minus_one = d.elem(0, -1);
                let minus_x = d.mul_elems(&lx, &minus_one);
                assert!(d.hilbert_symbol(&lx, &minus_x).is_one());
                assert!(d.hilbert_symbol(&lx, &minus_one).is_one());
                for y in &classes {
                    // antisymmetry
                    let fwd = d.class_pairing(x, y);
                    let bwd = d.class_pairing(y, x);
                    assert!(fwd.mul(&bwd).is_one());
                    // bilinearity against a third element
                    for z in &classes {
                        let xz = x.add(z, n);
                        assert_eq!(
                            d.class_pairing(&xz, y),
                            d.class_pairing(x, y).mul(&d.class_pairing(z, y))
                        );
                    }
                }
            }
            // non-degeneracy: the Gram table has trivial radical
            for x in &classes {
                if !x.is_zero() {
                    assert!(classes.iter().any(|y| d.class_pairing(x, y) != one));
                }
            }
        }
    }

    #[test]
    fn eta_characters() {
        let d = datum(7, 3);
        // η_1 is trivial
        let triv = d.eta_character(&d.unit_one());
        assert!(triv.is_trivial());
        // η_ϖ matches the symbol on generators
        let eta = d.eta_character(&d.uniformizer());
        let pi = d.uniformizer();
        let g = d.elem(0, 3);
        assert_eq!(eta.value(&g), d.hilbert_symbol(&pi, &g));
        assert_eq!(eta.value(&pi), d.hilbert_symbol(&pi, &pi));
        // bilinearity: η_x · η_x' = η_{xx'}
        let x = d.elem(1, 3);
        let y = d.elem(2, 5);
        let lhs = d.eta_character(&x).mul(&d.eta_character(&y));
        let rhs = d.eta_character(&d.mul_elems(&x, &y));
        for t in [d.uniformizer(), d.elem(0, 3), d.elem(1, 5), d.elem(-1, 2)] {
            assert_eq!(lhs.value(&t), rhs.value(&t));
        }
    }

    #[test]
    fn isotropic_counts() {
        let d3 = datum(7, 3);
        assert_eq!(d3.enumerate_maximal_isotropics().len(), 4);
        assert_eq!(d3.isotropic_pairs().len(), 12);
        let d5 = datum(11, 5);
        assert_eq!(d5.enumerate_maximal_isotropics().len(), 6);
        assert_eq!(d5.isotropic_pairs().len(), 30);
    }

    #[test]
    fn standard_pair_is_listed() {
        let d = datum(7, 3);
        let std_pair = d.standard_pair();
        assert!(d
            .enumerate_maximal_isotropics()
            .iter()
            .any(|s| *s == std_pair.j_elements));
        assert!(d.isotropic_pairs().contains(&std_pair));
        // (J, J) never appears
        assert!(d.isotropic_pairs().iter().all(|p| p.j_elements != p.k_elements));
    }
}
