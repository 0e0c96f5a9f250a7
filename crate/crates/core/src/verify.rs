//! The full identity suite behind `verify`: ε functional equations, Gauss-sum
//! laws, Hilbert pairing laws, Fourier inversion, trace/involution/rank
//! identities, Plancherel consistency, the conductor sum, the fix/swap and
//! labeling predicates, and choice-independence across isotropic pairs.
//!
//! Every check is exact; a failing check carries a witness. Independent
//! configurations fan out through [`crate::par`].

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cyclo::CycloNum;
use crate::error::Error;
use crate::finite_field::FqDescriptor;
use crate::local_field::{ClassModN, IsotropicPair, TameLocalDatum};
use crate::par;
use crate::report::{AnalysisConfig, PairPolicy, ThetaSelector};
use crate::tate::{
    epsilon_factor, evaluate, gamma_factor, q_power, AdditiveCharData, LaurentRat, TameMultChar,
};
use crate::whittaker::{
    self, gamma_at_one, psi_c_matrix, sign_of, whittaker_dims, CheckOutcome,
    GlAction,
};

/// Deliberate corruptions for exercising the failure-reporting path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Perturb one ε-factor as if a Gauss sum were wrong.
    CorruptGauss,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    pub fault: Option<Fault>,
    pub seed: u64,
}

/// Build the datum a config describes. Construction failures are config
/// errors, not internal ones.
pub fn build_datum(config: &AnalysisConfig) -> Result<Arc<TameLocalDatum>, Error> {
    let field = FqDescriptor::new(config.p, config.f, config.modulus_poly.clone())
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    TameLocalDatum::new(field, config.n).map_err(|e| Error::InvalidConfig(e.to_string()))
}

pub fn select_theta(datum: &Arc<TameLocalDatum>, sel: ThetaSelector) -> TameMultChar {
    match sel {
        ThetaSelector::Unramified => TameMultChar::unramified_quadratic(datum),
        ThetaSelector::RamifiedPlus => TameMultChar::ramified_quadratic(datum, 1),
        ThetaSelector::RamifiedMinus => TameMultChar::ramified_quadratic(datum, -1),
    }
}

pub fn select_pairs(datum: &Arc<TameLocalDatum>, policy: PairPolicy) -> Result<Vec<IsotropicPair>, Error> {
    match policy {
        PairPolicy::Standard => Ok(vec![datum.standard_pair()]),
        PairPolicy::All => Ok(datum.isotropic_pairs().clone()),
        PairPolicy::Index(i) => {
            let pairs = datum.isotropic_pairs();
            pairs
                .get(i)
                .cloned()
                .map(|p| vec![p])
                .ok_or_else(|| Error::InvalidConfig(format!("pair index {i} out of range (have {})", pairs.len())))
        }
    }
}

/// Run every suite for the datum; returns one outcome per named check.
pub fn run_suite(config: &AnalysisConfig, options: &VerifyOptions) -> Result<Vec<CheckOutcome>, Error> {
    let datum = build_datum(config)?;
    let mut out = Vec::new();
    out.extend(epsilon_suite(&datum, options));
    out.extend(gauss_suite(&datum));
    out.extend(hilbert_suite(&datum));
    out.extend(fourier_suite(&datum, options.seed));
    out.extend(scattering_suite(&datum));
    out.extend(choice_independence_suite(&datum));
    out.extend(plancherel_suite(&datum));
    out.extend(conductor_sum_suite(&datum));
    out.extend(predicate_suite(&datum));
    out.extend(normalizer_suite(&datum));
    Ok(out)
}

fn all_tame_characters(datum: &Arc<TameLocalDatum>) -> Vec<TameMultChar> {
    let qm1 = datum.q() - 1;
    let mut chars = Vec::new();
    for k in 0..qm1 {
        for w_exp in [0i64, 1, (qm1 / 2) as i64] {
            chars.push(TameMultChar::new(
                datum.clone(),
                k,
                CycloNum::root_of_order(&datum.cyclo, qm1, w_exp),
            ));
        }
    }
    chars
}

/// ε functional equations (1), (2), (3)-as-read and (5) as exact
/// Laurent-rational identities, for every tame character and e(ψ) ∈ {-1,0,1,2}.
pub fn epsilon_suite(datum: &Arc<TameLocalDatum>, options: &VerifyOptions) -> Vec<CheckOutcome> {
    let q_inv = q_power(datum, -1);
    let corrupt = options.fault == Some(Fault::CorruptGauss);
    let mut eq = [true; 4];
    let mut witness = [const { String::new() }; 4];

    for chi in all_tame_characters(datum) {
        for e in [-1i64, 0, 1, 2] {
            let psi = AdditiveCharData::with_conductor(datum, e);
            let mut eps = epsilon_factor(&chi, &psi);
            if corrupt {
                // simulate a wrong Gauss sum: scale ε by a nontrivial root of unity
                eps = eps.scale(&CycloNum::root_of_unity(&datum.cyclo, 1));
            }

            let dual = epsilon_factor(&chi.inv(), &psi).substitute(&q_inv, true);
            let checks = [
                // (1): ε(1-s, χ^{-1}, ψ) = χ(-1) ε(s, χ, ψ)^{-1}
                dual.eq_rat(&eps.inv().unwrap().scale(&chi.at_minus_one())),
                // (2): ε(s, χ, ψ_c) = χ(c) |c|^{s-1/2} ε(s, χ, ψ)
                {
                    let mut ok = true;
                    for c in [datum.uniformizer(), datum.elem(-1, 1), datum.elem(0, 3), datum.elem(1, 3)] {
                        let lhs = epsilon_factor(&chi, &psi.twist_by(&c));
                        let abs_c = LaurentRat::monomial(datum.sqrt_q.pow(c.valuation), c.valuation);
                        let rhs = epsilon_factor(&chi, &psi).mul(&abs_c).scale(&chi.value(&c));
                        ok &= lhs.eq_rat(&rhs);
                    }
                    ok
                },
                // (3) at t = 1, exponent read as (e(ψ)-e(χ))t
                eps.substitute(&q_inv, false).eq_rat(&eps.scale(&q_power(datum, e - chi.conductor()))),
                // (5): ε(1-s, χ^{-1}, ψ) ε(1+s, χ, ψ) = χ(-1) q^{e(ψ)-e(χ)}
                dual.mul(&eps.substitute(&q_inv, false)).eq_rat(&LaurentRat::constant(
                    chi.at_minus_one().mul(&q_power(datum, e - chi.conductor())),
                )),
            ];
            for (i, ok) in checks.iter().enumerate() {
                if !ok && eq[i] {
                    eq[i] = false;
                    witness[i] = format!("k = {}, e(ψ) = {e}", chi.k);
                }
            }
        }
    }
    vec![
        CheckOutcome::new("epsilon_eq_1", eq[0], witness[0].clone()),
        CheckOutcome::new("epsilon_eq_2", eq[1], witness[1].clone()),
        CheckOutcome::new("epsilon_eq_3", eq[2], witness[2].clone()),
        CheckOutcome::new("epsilon_eq_5", eq[3], witness[3].clone()),
    ]
}

/// G(χ)G(χ^{-1}) = χ(-1)q and |G|² = q for all nontrivial residue characters.
pub fn gauss_suite(datum: &Arc<TameLocalDatum>) -> Vec<CheckOutcome> {
    let fq = &datum.field;
    let cyclo = &datum.cyclo;
    let q = CycloNum::from_int(cyclo, datum.q() as i64);
    let mut product_ok = true;
    let mut modulus_ok = true;
    let mut witness = String::new();
    for k in 1..(datum.q() - 1) as i64 {
        let g = fq.gauss_sum(cyclo, k, &fq.one()).unwrap();
        let gbar = fq.gauss_sum(cyclo, -k, &fq.one()).unwrap();
        let chi_minus_one = fq.residue_mult_value(cyclo, k, &fq.from_residue(-1)).unwrap();
        if g.mul(&gbar) != chi_minus_one.mul(&q) {
            product_ok = false;
            witness = format!("k = {k}");
        }
        if g.mul(&g.conj()) != q {
            modulus_ok = false;
            witness = format!("k = {k}");
        }
    }
    let mut out = vec![
        CheckOutcome::new("gauss_product", product_ok, witness.clone()),
        CheckOutcome::new("gauss_modulus", modulus_ok, witness),
    ];
    if datum.q() == 7 {
        let g = fq.gauss_sum(cyclo, 3, &fq.one()).unwrap();
        out.push(CheckOutcome::new(
            "gauss_quadratic_square",
            g.mul(&g) == CycloNum::from_int(cyclo, -7),
            "G(χ₂)² = -7",
        ));
    }
    out
}

/// Bilinearity, antisymmetry, kernel, non-degeneracy and (x, -1) = 1, all by
/// exhaustion over (Z/n)².
pub fn hilbert_suite(datum: &Arc<TameLocalDatum>) -> Vec<CheckOutcome> {
    let n = datum.n;
    let classes: Vec<ClassModN> =
        (0..n).flat_map(|a| (0..n).map(move |b| ClassModN { a, b })).collect();
    let one = CycloNum::one(&datum.cyclo);
    let mut bilinear = true;
    let mut antisym = true;
    let mut kernel = true;
    let mut nondegen = true;
    let mut minus_one = true;
    for x in &classes {
        let lx = datum.lift(x);
        let m1 = datum.elem(0, -1);
        if !datum.hilbert_symbol(&lx, &m1).is_one() {
            minus_one = false;
        }
        if !datum.hilbert_symbol(&lx, &datum.mul_elems(&lx, &m1)).is_one() {
            minus_one = false;
        }
        let all_trivial = classes.iter().all(|y| datum.class_pairing(x, y) == one);
        if all_trivial != x.is_zero() {
            kernel = false;
        }
        if !x.is_zero() && classes.iter().all(|y| datum.class_pairing(x, y) == one) {
            nondegen = false;
        }
        for y in &classes {
            if !datum.class_pairing(x, y).mul(&datum.class_pairing(y, x)).is_one() {
                antisym = false;
            }
            for z in &classes {
                let lhs = datum.class_pairing(&x.add(z, n), y);
                let rhs = datum.class_pairing(x, y).mul(&datum.class_pairing(z, y));
                if lhs != rhs {
                    bilinear = false;
                }
            }
        }
    }
    vec![
        CheckOutcome::new("hilbert_bilinear", bilinear, "exhaustive over (Z/n)²"),
        CheckOutcome::new("hilbert_antisymmetric", antisym, "exhaustive over (Z/n)²"),
        CheckOutcome::new("hilbert_kernel", kernel, "kernel = F*ⁿ"),
        CheckOutcome::new("hilbert_nondegenerate", nondegen, "trivial radical"),
        CheckOutcome::new("hilbert_minus_one", minus_one, "(x,-1) = (x,-x) = 1"),
    ]
}

/// Fourier inversion Σ_k γ_J(s, χ, ψ, k) = γ(s, χ, ψ) for 20 seeded random
/// tame characters at s ∈ {1/2, 1}, over the standard pair.
pub fn fourier_suite(datum: &Arc<TameLocalDatum>, seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pair = datum.standard_pair();
    let psi = AdditiveCharData::base(datum);
    let qm1 = datum.q() - 1;
    let mut ok = true;
    let mut witness = String::from("20 random tame characters, s ∈ {1/2, 1}");
    let mut tested = 0;
    let n_inv = CycloNum::from_int(&datum.cyclo, datum.n as i64).inv().unwrap();
    while tested < 20 {
        let k = rng.gen_range(0..qm1);
        let w_exp = rng.gen_range(0..qm1) as i64;
        let chi = TameMultChar::new(datum.clone(), k, CycloNum::root_of_order(&datum.cyclo, qm1, w_exp));
        // a pole in the direct value or any summand disqualifies the sample
        let mut samples = Vec::new();
        let mut poles = false;
        for s2 in [1i64, 2] {
            let direct = evaluate(datum, &gamma_factor(&chi, &psi), s2);
            let j_values: Vec<Result<CycloNum, Error>> = pair
                .j_elements
                .iter()
                .map(|j| {
                    let eta = datum.eta_character(&datum.lift(j));
                    evaluate(datum, &gamma_factor(&chi.mul(&eta), &psi), s2)
                })
                .collect();
            if direct.is_err() || j_values.iter().any(|v| v.is_err()) {
                poles = true;
                break;
            }
            let j_values: Vec<CycloNum> = j_values.into_iter().map(|v| v.unwrap()).collect();
            samples.push((s2, direct.unwrap(), j_values));
        }
        if poles {
            continue;
        }
        tested += 1;
        for (s2, direct, j_values) in samples {
            let total = pair
                .k_elements
                .iter()
                .map(|k_cls| {
                    // γ_J(s, χ, ψ, k) from the shared per-j values
                    pair.j_elements
                        .iter()
                        .zip(&j_values)
                        .map(|(j, v)| v.mul(&datum.class_pairing(k_cls, j)))
                        .fold(CycloNum::zero(&datum.cyclo), |acc, v| acc.add(&v))
                        .mul(&n_inv)
                })
                .fold(CycloNum::zero(&datum.cyclo), |acc, v| acc.add(&v));
            if total != direct {
                ok = false;
                witness = format!("k = {}, w exponent = {w_exp}, s = {s2}/2", chi.k);
            }
        }
    }
    vec![CheckOutcome::new("fourier_inversion", ok, witness)]
}

fn c_representatives(datum: &Arc<TameLocalDatum>) -> Vec<crate::local_field::FStarElem> {
    // representatives of F*/F*²: 1, unit non-square, ϖ, ϖ·non-square
    let g = datum.field.generator.clone();
    vec![
        datum.unit_one(),
        crate::local_field::FStarElem::new(0, g.clone()),
        datum.uniformizer(),
        crate::local_field::FStarElem::new(1, g),
    ]
}

/// Trace theorem, involution, non-scalarity and the dimension theorem for all
/// nontrivial quadratic θ, e(ψ) ∈ {0, 1} and c over F*/F*² representatives,
/// on the standard pair.
pub fn scattering_suite(datum: &Arc<TameLocalDatum>) -> Vec<CheckOutcome> {
    let pair = datum.standard_pair();
    let configs: Vec<(TameMultChar, i64)> = TameMultChar::nontrivial_quadratics(datum)
        .into_iter()
        .flat_map(|t| [(t.clone(), 0i64), (t, 1i64)])
        .collect();
    let results: Vec<(bool, bool, bool, bool, String)> = par::map_collect(configs, |(theta, e)| {
        let psi = AdditiveCharData::with_conductor(datum, e);
        let gamma = gamma_at_one(datum, &theta, &psi).unwrap();
        let gamma_inv = gamma.inv().unwrap();
        let gamma2 = gamma.mul(&gamma);
        let mut trace_ok = true;
        let mut invol_ok = true;
        let mut scalar_ok = true;
        let mut dims_ok = true;
        let mut witness = String::new();
        for c in c_representatives(datum) {
            let m = psi_c_matrix(datum, &theta, &psi, &c, &pair).unwrap();
            let expected_trace = theta.value(&c).mul(&gamma);
            if m.trace().unwrap() != expected_trace {
                trace_ok = false;
                witness = format!("θ: k={} w={:?}, e(ψ)={e}, v(c)={}", theta.k, theta.w_value, c.valuation);
            }
            let m2 = m.mat_mul(&m).unwrap();
            if !m2.is_scalar().map_or(false, |z| z == gamma2) {
                invol_ok = false;
            }
            if m.is_scalar().is_some() {
                scalar_ok = false;
            }
            let (dp, dm) = whittaker::rank_dims(datum, &m.scalar_mul(&gamma_inv)).unwrap();
            let tc = sign_of(&theta.value(&c)).unwrap();
            let n = datum.n as i64;
            if (dp as i64, dm as i64) != ((n + tc) / 2, (n - tc) / 2) {
                dims_ok = false;
            }
        }
        (trace_ok, invol_ok, scalar_ok, dims_ok, witness)
    });
    let fold = |sel: fn(&(bool, bool, bool, bool, String)) -> bool| results.iter().all(sel);
    let witness = results.iter().map(|r| r.4.clone()).find(|w| !w.is_empty()).unwrap_or_default();
    vec![
        CheckOutcome::new("trace_theorem", fold(|r| r.0), witness.clone()),
        CheckOutcome::new("involution", fold(|r| r.1), "M² = γ(1,θ,ψ)²·Id"),
        CheckOutcome::new("not_scalar", fold(|r| r.2), "M never scalar"),
        CheckOutcome::new("dimension_theorem", fold(|r| r.3), "ranks match (n±θ(c))/2"),
    ]
}

/// Trace and both ranks are identical across every valid isotropic pair. The
/// γ-table is shared across pairs; only the assembly differs.
pub fn choice_independence_suite(datum: &Arc<TameLocalDatum>) -> Vec<CheckOutcome> {
    let pairs = datum.isotropic_pairs().clone();
    let psi = AdditiveCharData::base(datum);
    let mut ok = true;
    let mut witness = format!("{} pairs", pairs.len());
    for theta in TameMultChar::nontrivial_quadratics(datum) {
        let gamma_inv = gamma_at_one(datum, &theta, &psi).unwrap().inv().unwrap();
        for c in [datum.unit_one(), datum.uniformizer()] {
            let table = whittaker::gamma_table(datum, &theta, &psi.twist_by(&c)).unwrap();
            let scale = datum.sqrt_q.pow(c.valuation);
            let per_pair: Vec<(CycloNum, usize, usize)> = par::map_collect(pairs.clone(), |pair| {
                let m = whittaker::scattering_matrix_from_table(datum, &table, &pair)
                    .scalar_mul(&scale);
                let trace = m.trace().unwrap();
                let (dp, dm) = whittaker::rank_dims(datum, &m.scalar_mul(&gamma_inv)).unwrap();
                (trace, dp, dm)
            });
            let first = &per_pair[0];
            if !per_pair.iter().all(|r| r == first) {
                ok = false;
                witness = format!("θ: k={}, v(c)={}", theta.k, c.valuation);
            }
        }
    }
    vec![CheckOutcome::new("choice_independence", ok, witness)]
}

pub fn plancherel_suite(datum: &Arc<TameLocalDatum>) -> Vec<CheckOutcome> {
    let psi = AdditiveCharData::base(datum);
    let mut ok = true;
    let mut witness = String::from("μ^{-1} finite at s=0 and θ(-1)μ(0) = γ(1,θ,ψ)²");
    for theta in TameMultChar::nontrivial_quadratics(datum) {
        if let Err(e) = whittaker::plancherel_check(datum, &theta, &psi) {
            ok = false;
            witness = e.to_string();
        }
    }
    vec![CheckOutcome::new("plancherel_consistency", ok, witness)]
}

pub fn conductor_sum_suite(datum: &Arc<TameLocalDatum>) -> Vec<CheckOutcome> {
    let mut ok = true;
    for sign in [1, -1] {
        let theta = TameMultChar::ramified_quadratic(datum, sign);
        ok &= whittaker::conductor_sum_check(datum, &theta).unwrap_or(false);
    }
    // unramified θ must be rejected
    let rejected =
        whittaker::conductor_sum_check(datum, &TameMultChar::unramified_quadratic(datum)).is_err();
    vec![CheckOutcome::new(
        "conductor_sum",
        ok && rejected,
        "n^{-2} Σ_η q^{-e(θη)} = q^{-1}",
    )]
}

/// Fix/swap prediction and the unramified labeling, including consistency of
/// the label flip with the dimension theorem under ψ ↦ ψ_c.
pub fn predicate_suite(datum: &Arc<TameLocalDatum>) -> Vec<CheckOutcome> {
    let psi = AdditiveCharData::base(datum);
    let pair = datum.standard_pair();
    let mut gl_ok = true;
    let mut label_ok = true;
    let mut witness = String::new();

    for theta in TameMultChar::nontrivial_quadratics(datum) {
        for c in c_representatives(datum) {
            let predicted = whittaker::gl2_action_predict(&theta, &c).unwrap();
            let expected = if sign_of(&theta.value(&c)).unwrap() == 1 { GlAction::Fix } else { GlAction::Swap };
            if predicted != expected {
                gl_ok = false;
            }
            // squares always fix
            let c2 = datum.mul_elems(&c, &c);
            if whittaker::gl2_action_predict(&theta, &c2).unwrap() != GlAction::Fix {
                gl_ok = false;
            }
            // re-labeling: dims w.r.t. ψ_c as base at c' = 1 match dims w.r.t.
            // ψ at c, swapped exactly when θ(c) = -1
            let base_dims = whittaker_dims(datum, &theta, &psi, &c, &pair).unwrap();
            let rebased =
                whittaker_dims(datum, &theta, &psi.twist_by(&c), &datum.unit_one(), &pair).unwrap();
            let expected_rebased = (
                ((datum.n as usize) + 1) / 2,
                ((datum.n as usize).saturating_sub(1)) / 2,
            );
            if rebased != expected_rebased {
                label_ok = false;
                witness = format!("rebased dims {rebased:?}");
            }
            let swap = sign_of(&theta.value(&c)).unwrap() == -1;
            let translated = if swap { (base_dims.1, base_dims.0) } else { base_dims };
            if translated != expected_rebased {
                label_ok = false;
                witness = format!("translated dims {translated:?}");
            }
        }
    }

    // unramified labels: parity of e(ψ) decides which summand is ψ-generic
    let theta_u = TameMultChar::unramified_quadratic(datum);
    let mut parity_ok = whittaker::unramified_labels(0) == (('+', '-'), 1)
        && whittaker::unramified_labels(1) == (('-', '+'), -1)
        && whittaker::unramified_labels(2) == (('+', '-'), 1);
    // consistency: θ_u(c) = (-1)^{v(c)} and e(ψ_c) = e(ψ) + v(c) make the
    // label flip match the fix/swap prediction
    for v in [0i64, 1] {
        let c = datum.elem(v, 1);
        let flip_labels = whittaker::unramified_labels(v).0 != whittaker::unramified_labels(0).0;
        let swap = whittaker::gl2_action_predict(&theta_u, &c).unwrap() == GlAction::Swap;
        parity_ok &= flip_labels == swap;
    }
    vec![
        CheckOutcome::new("gl2_action", gl_ok, "θ(det g) decides fix/swap"),
        CheckOutcome::new("relabeling_consistency", label_ok, witness),
        CheckOutcome::new("unramified_labels", parity_ok, "labels flip with parity of e(ψ)"),
    ]
}

pub fn normalizer_suite(datum: &Arc<TameLocalDatum>) -> Vec<CheckOutcome> {
    let mut ok = true;
    let mut signs = Vec::new();
    for theta in TameMultChar::nontrivial_quadratics(datum) {
        for e in [0i64, 1] {
            let psi = AdditiveCharData::with_conductor(datum, e);
            match whittaker::normalizer_compare(datum, &theta, &psi) {
                Ok(sign) => signs.push(sign),
                Err(_) => ok = false,
            }
        }
    }
    // θ_u with e(ψ) = 0 must give +1
    let theta_u = TameMultChar::unramified_quadratic(datum);
    let base = whittaker::normalizer_compare(datum, &theta_u, &AdditiveCharData::base(datum));
    ok &= base.map_or(false, |s| s == 1);
    vec![CheckOutcome::new("normalizer_sign", ok, format!("signs {signs:?}"))]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(p: u64, n: u64) -> AnalysisConfig {
        AnalysisConfig {
            p,
            f: 1,
            n,
            modulus_poly: None,
            theta: ThetaSelector::Unramified,
            psi_conductor: 0,
            psi_twist: None,
            c_list: vec![],
            pair_policy: PairPolicy::Standard,
        }
    }

    #[test]
    fn full_suite_passes_q7() {
        let outcomes = run_suite(&config(7, 3), &VerifyOptions::default()).unwrap();
        for o in &outcomes {
            assert!(o.pass, "check {} failed: {}", o.name, o.witness);
        }
    }

    #[test]
    fn fault_injection_names_the_failing_identity() {
        let opts = VerifyOptions { fault: Some(Fault::CorruptGauss), seed: 0 };
        let datum = build_datum(&config(7, 3)).unwrap();
        let outcomes = epsilon_suite(&datum, &opts);
        let eq1 = outcomes.iter().find(|o| o.name == "epsilon_eq_1").unwrap();
        assert!(!eq1.pass);
    }
}
