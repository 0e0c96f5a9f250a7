//! Randomized algebraic invariants for the cyclotomic arithmetic layer.

use std::sync::Arc;

use proptest::prelude::*;

use whittaker_scatter::cyclo::{embeds_positive, CycloField, CycloNum, Rat};
use whittaker_scatter::Error;

fn field() -> Arc<CycloField> {
    CycloField::get(84) // lcm(4, 7, 6): the working field for q = 7, n = 3
}

fn rat(n: i32, d: u8) -> Rat {
    Rat::new(n.into(), (d as i64 + 1).into())
}

prop_compose! {
    /// Sparse random element: a few rational multiples of roots of unity.
    fn cyclo_num()(terms in prop::collection::vec((0i64..84, -20i32..20, 0u8..6), 1..5)) -> CycloNum {
        let f = field();
        let mut acc = CycloNum::zero(&f);
        for (e, n, d) in terms {
            acc = acc.add(&CycloNum::root_of_unity(&f, e).scale(&rat(n, d)));
        }
        acc
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in cyclo_num(), b in cyclo_num(), c in cyclo_num()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.sub(&a), CycloNum::zero(a.field()));
    }

    #[test]
    fn inverses(a in cyclo_num()) {
        match a.inv() {
            Ok(inv) => prop_assert!(a.mul(&inv).is_one()),
            Err(Error::DivisionByZero) => prop_assert!(a.is_zero()),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn conjugation_is_an_involution_and_ring_map(a in cyclo_num(), b in cyclo_num()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!(a.add(&b).conj(), a.conj().add(&b.conj()));
        prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        // the norm is real: fixed by conjugation
        let norm = a.mul(&a.conj());
        prop_assert_eq!(norm.conj(), norm.clone());
        // and non-negative in the embedding (zero only for zero)
        if !a.is_zero() {
            prop_assert!(embeds_positive(&norm));
        }
    }

    #[test]
    fn coeff_string_round_trip(a in cyclo_num()) {
        let parsed = CycloNum::parse_coeff_string(&a.coeff_string()).unwrap();
        prop_assert_eq!(parsed, a);
    }

    #[test]
    fn pow_matches_repeated_multiplication(a in cyclo_num(), e in 0i64..6) {
        let mut expected = CycloNum::one(a.field());
        for _ in 0..e {
            expected = expected.mul(&a);
        }
        prop_assert_eq!(a.pow(e), expected);
    }
}
