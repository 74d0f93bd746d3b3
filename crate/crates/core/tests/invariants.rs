use fibtower_core::fib::fib;
use fibtower_core::pisano::{fib_mod, verify_period};
use fibtower_core::verify::fast_doubling_agrees;
use fibtower_core::{
    build_chain, factorize, pisano_period, run_sweep, tower_residue, FactoredNatural, Grid,
    SweepReport, TowerSpec,
};
use num_bigint::BigUint;
use num_integer::Integer;
use proptest::prelude::*;

const BUDGET: u64 = 1 << 24;

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn factored(v: u64) -> FactoredNatural {
    factorize(&big(v), BUDGET).unwrap()
}

fn period(m: u64) -> u64 {
    pisano_period(&factored(m)).unwrap().value().try_into().unwrap()
}

#[test]
fn fast_doubling_matches_recurrence() {
    assert_eq!(fast_doubling_agrees(10_000), None);
}

#[test]
fn fib_mod_matches_exact_for_small_moduli() {
    let exact: Vec<BigUint> = (0..=10_000).map(|i| fib(i).unwrap()).collect();
    for m in (1..=64).chain([97, 1000, 4096, 9973, 10_000]) {
        let m_big = big(m);
        for (i, f) in exact.iter().enumerate() {
            assert_eq!(fib_mod(&big(i as u64), &m_big), f % &m_big, "i={i} M={m}");
        }
    }
}

#[test]
fn residues_repeat_with_period() {
    for m in 1..=1000u64 {
        let pi = period(m) as usize;
        let mut seq = vec![0u64, 1 % m];
        while seq.len() <= 10_000 {
            let next = (seq[seq.len() - 1] + seq[seq.len() - 2]) % m;
            seq.push(next);
        }
        for i in 0..=10_000 {
            assert_eq!(seq[i], seq[i % pi], "M={m} i={i}");
        }
    }
}

#[test]
fn chains_over_small_targets_verify() {
    for target in 1..=300u64 {
        for k in 1..=4 {
            let chain = build_chain(k, &factored(target)).unwrap();
            assert!(chain.verify(), "target={target} k={k}");
            assert_eq!(chain.levels().len() as u64, k);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn fib_mod_agrees_with_exact(i in 0u64..=10_000, m in 1u64..=10_000) {
        let m = big(m);
        prop_assert_eq!(fib_mod(&big(i), &m), fib(i).unwrap() % &m);
    }

    #[test]
    fn index_reduces_mod_period(i in 0u64..=10_000, m in 1u64..=1000) {
        let reduced = i % period(m);
        prop_assert_eq!(fib_mod(&big(i), &big(m)), fib_mod(&big(reduced), &big(m)));
    }

    #[test]
    fn period_of_coprime_product_is_lcm(a in 1u64..=300, b in 1u64..=300) {
        prop_assume!(a.gcd(&b) == 1);
        prop_assert_eq!(period(a * b), period(a).lcm(&period(b)));
    }

    #[test]
    fn factored_period_is_minimal(m in 1u64..=1_000_000) {
        let p = pisano_period(&factored(m)).unwrap();
        prop_assert!(verify_period(&big(m), &p));
    }

    #[test]
    fn tower_residue_is_crt_consistent(
        k in 1u64..=4,
        n in 1u64..=12,
        m in 1u64..=2,
        a in 1u64..=500,
        b in 1u64..=500,
    ) {
        prop_assume!(a.gcd(&b) == 1);
        let spec = TowerSpec::new(k, n, m).unwrap();
        let whole = tower_residue(&spec, &factored(a * b)).unwrap();
        let part = tower_residue(&spec, &factored(a)).unwrap();
        prop_assert_eq!(whole % big(a), part);
    }

    #[test]
    fn factorization_multiplies_back(x in 1u64..=u64::MAX) {
        let f = factored(x);
        prop_assert!(f.verify());
        prop_assert_eq!(f.value(), &big(x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sweep_report_round_trips(k_hi in 1u64..=4, n_lo in 1u64..=10, n_len in 0u64..=3, m_hi in 1u64..=3) {
        let grid = Grid {
            k: format!("1..={k_hi}").parse().unwrap(),
            n: format!("{n_lo}..={}", n_lo + n_len).parse().unwrap(),
            m: format!("1..={m_hi}").parse().unwrap(),
        };
        let report = run_sweep(&grid, 2).unwrap();
        let text = report.to_json();
        let back = SweepReport::from_json(&text).unwrap();
        prop_assert_eq!(&back, &report);
        prop_assert_eq!(back.to_json(), text);
    }
}
