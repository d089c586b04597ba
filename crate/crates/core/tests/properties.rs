//! Standalone property suites: algebraic invariants checked on randomized
//! inputs, plus the exhaustive grading sweep.

use bpz_core::nilpotent::NilCoeff;
use bpz_core::oracle_jet::verify_integrand_bpz;
use bpz_core::ratfunc::{ChiMode, RatFunc};
use bpz_core::termalg::{canonicalize, LinComb, TermKey};
use bpz_core::virasoro::{apply_l, RuleParams};
use proptest::prelude::*;

/// Small random polynomial as a coefficient vector.
fn poly_strategy() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..=9, 0..=4)
}

fn ratfunc_strategy() -> impl Strategy<Value = RatFunc> {
    (poly_strategy(), poly_strategy())
        .prop_filter_map("nonzero denominator", |(num, den)| {
            RatFunc::ratio_of_coeffs(&num, &den).ok()
        })
}

fn nonzero_ratfunc_strategy() -> impl Strategy<Value = RatFunc> {
    ratfunc_strategy().prop_filter("nonzero", |x| !x.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_axioms(a in ratfunc_strategy(), b in ratfunc_strategy(), c in ratfunc_strategy()) {
        // associativity and commutativity
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        // distributivity
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        // identities and inverses
        prop_assert_eq!(&a + &RatFunc::zero(), a.clone());
        prop_assert_eq!(&a * &RatFunc::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn multiplicative_inverse(a in nonzero_ratfunc_strategy()) {
        prop_assert!((&a * &a.inverse().unwrap()).is_one());
    }

    #[test]
    fn operations_stay_canonical(a in ratfunc_strategy(), b in ratfunc_strategy()) {
        prop_assert!((&a + &b).is_reduced());
        prop_assert!((&a * &b).is_reduced());
        prop_assert!((&a - &b).is_reduced());
        if !b.is_zero() {
            prop_assert!(a.checked_div(&b).unwrap().is_reduced());
        }
    }

    #[test]
    fn rendering_roundtrip(a in ratfunc_strategy()) {
        let back: RatFunc = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }
}

fn small_key_strategy() -> impl Strategy<Value = TermKey> {
    (
        prop::collection::vec(1i64..=3, 0..=2),
        prop::collection::vec(1i64..=3, 0..=2),
    )
        .prop_map(|(p, q)| canonicalize(&p, &q).unwrap())
}

fn lincomb_strategy() -> impl Strategy<Value = LinComb> {
    prop::collection::vec((small_key_strategy(), ratfunc_strategy()), 0..=5).prop_map(|terms| {
        let mut v = LinComb::new();
        for (k, c) in terms {
            v.add_term(k, c);
        }
        v
    })
}

proptest! {
    #[test]
    fn lincomb_module_axioms(
        v in lincomb_strategy(),
        w in lincomb_strategy(),
        c1 in ratfunc_strategy(),
        c2 in ratfunc_strategy(),
    ) {
        // (c1 + c2) v == c1 v + c2 v
        let lhs = v.scaled(&(&c1 + &c2));
        let mut rhs = v.scaled(&c1);
        rhs.add_scaled(&c2, &v);
        prop_assert_eq!(lhs, rhs);
        // c1 (v + w) == c1 v + c1 w
        let mut sum = v.clone();
        sum.add_scaled(&RatFunc::one(), &w);
        let lhs = sum.scaled(&c1);
        let mut rhs = v.scaled(&c1);
        rhs.add_scaled(&c1, &w);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lincomb_never_stores_zero(v in lincomb_strategy(), w in lincomb_strategy()) {
        let mut acc = v.clone();
        acc.add_scaled(&RatFunc::from_int(-1), &w);
        for (_, coeff) in acc.iter() {
            prop_assert!(!coeff.is_zero());
        }
        // exact self-cancellation drains the map
        let mut zero = v.clone();
        zero.add_scaled(&RatFunc::from_int(-1), &v);
        prop_assert!(zero.is_empty());
    }

    #[test]
    fn canonicalize_is_permutation_invariant(
        mut p in prop::collection::vec(1i64..=5, 0..=4),
        mut q in prop::collection::vec(1i64..=5, 0..=4),
        seed in any::<u64>(),
    ) {
        let base = canonicalize(&p, &q).unwrap();
        // a cheap deterministic shuffle
        let n = p.len().max(1);
        p.rotate_left((seed as usize) % n);
        let m = q.len().max(1);
        q.rotate_left((seed as usize) % m);
        prop_assert_eq!(canonicalize(&p, &q).unwrap(), base.clone());
        // idempotence through the rendered parts
        let again = canonicalize(
            &base.p_part().iter().map(|&x| x as i64).collect::<Vec<_>>(),
            &base.q_part().iter().map(|&x| x as i64).collect::<Vec<_>>(),
        ).unwrap();
        prop_assert_eq!(again, base);
    }

    #[test]
    fn nilpotent_annihilation(
        masks in prop::collection::vec(1u64..=0xff, 1..=4),
        repeat_bit in 0u32..8,
    ) {
        // Any product with a repeated generator dies.
        let bit = 1u64 << repeat_bit;
        let mut x = NilCoeff::scalar(RatFunc::one());
        use bpz_core::jet::Coeff;
        for m in &masks {
            let mut f = NilCoeff::new();
            f.insert(*m | bit, RatFunc::one());
            x = x.mul(&f);
        }
        if masks.len() >= 2 {
            prop_assert!(x.is_empty());
        }
        // and the square of any purely nilpotent element with one mask dies
        let mut y = NilCoeff::new();
        y.insert(masks[0], RatFunc::from_int(3));
        prop_assert!(y.mul(&y).is_empty());
    }
}

/// All basis keys of total degree <= max, as partition pairs.
fn keys_up_to(max: u32) -> Vec<TermKey> {
    fn partitions(d: u32) -> Vec<Vec<i64>> {
        fn rec(d: u32, max_part: u32, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
            if d == 0 {
                out.push(cur.clone());
                return;
            }
            for part in (1..=d.min(max_part)).rev() {
                cur.push(part as i64);
                rec(d - part, part, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(d, d.max(1), &mut Vec::new(), &mut out);
        out
    }
    let mut keys = Vec::new();
    for d in 0..=max {
        for dp in 0..=d {
            for p in partitions(dp) {
                for q in partitions(d - dp) {
                    keys.push(canonicalize(&p, &q).unwrap());
                }
            }
        }
    }
    keys
}

#[test]
fn grading_invariant_exhaustive_degree_six() {
    // Every output key of every admissible application has degree
    // exactly degree(input) + n, for all keys of degree <= 6.
    let mut checked = 0usize;
    for mode in ChiMode::BOTH {
        let params = RuleParams::full(6, mode);
        for key in keys_up_to(6) {
            let d = key.total_degree();
            for n in 1..=(6u32.saturating_sub(d)) {
                let out = apply_l(n, &key, &params).unwrap();
                assert!(!out.is_empty());
                for (k, _) in out.iter() {
                    assert_eq!(k.total_degree(), d + n, "key {key}, n = {n}");
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn reports_are_bytewise_deterministic_under_fixed_seed() {
    let a = verify_integrand_bpz(3, ChiMode::TwoOverGamma, 3, 5, 2024).unwrap();
    let b = verify_integrand_bpz(3, ChiMode::TwoOverGamma, 3, 5, 2024).unwrap();
    assert_eq!(a.to_json_pretty(), b.to_json_pretty());
}
