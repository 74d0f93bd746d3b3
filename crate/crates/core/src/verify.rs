//! Property suites over the identities, lemmas and oracle agreement.
//! Each suite returns one [`PropertyOutcome`] per property family.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::factor::{factorize, DEFAULT_RHO_BUDGET, DEFAULT_RHO_SEED};
use crate::fib::{self, fib};
use crate::lemmas;
use crate::oracle::{oracle_eval, oracle_feasible};
use crate::pisano::{default_brute_cap, pisano_period, pisano_period_brute};
use crate::tower::{analyze, lemma4_check, tower_residue, TowerSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub cases: u64,
    pub passed: bool,
    pub counterexample: Option<String>,
}

impl fmt::Display for PropertyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "pass" } else { "FAIL" };
        write!(f, "[{verdict}] {} ({} cases)", self.name, self.cases)?;
        if let Some(c) = &self.counterexample {
            write!(f, ": counterexample {c}")?;
        }
        Ok(())
    }
}

/// Accumulates cases for one property, keeping the first failure.
struct Tally {
    name: String,
    cases: u64,
    failure: Option<String>,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally {
            name: name.to_owned(),
            cases: 0,
            failure: None,
        }
    }

    fn check(&mut self, outcome: Result<bool>, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if self.failure.is_some() {
            return;
        }
        match outcome {
            Ok(true) => {}
            Ok(false) => self.failure = Some(describe()),
            Err(e) => self.failure = Some(format!("{} ({e})", describe())),
        }
    }

    fn finish(self) -> PropertyOutcome {
        PropertyOutcome {
            passed: self.failure.is_none() && self.cases > 0,
            name: self.name,
            cases: self.cases,
            counterexample: self.failure,
        }
    }
}

/// The seven classical identity families, on fixed exhaustive ranges.
pub fn identity_suite() -> Vec<PropertyOutcome> {
    let mut out = Vec::new();

    let mut t = Tally::new("gcd(F_a, F_b) = F_gcd(a,b), 1 <= a,b <= 40");
    for a in 1..=40 {
        for b in 1..=40 {
            t.check(fib::gcd_identity_check(a, b), || format!("a={a} b={b}"));
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("F_nr binomial expansion, 1 <= n <= 10, 1 <= r <= 30");
    for n in 1..=10 {
        for r in 1..=30 {
            let ok = fib::expansion_rhs(n, r).and_then(|rhs| Ok(rhs == fib(n * r)?));
            t.check(ok, || format!("n={n} r={r}"));
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("F_a | F_b iff a | b, 3 <= a <= 30, 1 <= b <= 200");
    for a in 3..=30 {
        for b in 1..=200 {
            t.check(fib::divisibility_criterion_check(a, b), || format!("a={a} b={b}"));
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("Cassini F_(n+1) F_(n-1) - F_n^2 = (-1)^n, 1 <= n <= 50");
    for n in 1..=50u64 {
        let expected = if n % 2 == 0 { 1 } else { -1 };
        t.check(fib::cassini(n).map(|c| c == expected.into()), || format!("n={n}"));
    }
    out.push(t.finish());

    let mut t = Tally::new("F_(n-1)^2 = F_(n+1)^2 = (-1)^n mod F_n, 1 <= n <= 50");
    for n in 1..=50 {
        t.check(fib::square_congruence_check(n), || format!("n={n}"));
    }
    out.push(t.finish());

    let mut t = Tally::new("F_(a+b) = F_(a+1) F_b + F_a F_(b-1), 1 <= a,b <= 40");
    for a in 1..=40 {
        for b in 1..=40 {
            t.check(fib::addition_formula_check(a, b), || format!("a={a} b={b}"));
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("a = b (mod 6) => F_a = F_b (mod 4), 0 <= a,b <= 200; gcd(n,6)=1 => F_n = 1 (mod 4)");
    for a in 0..=200 {
        for b in (a % 6..=200).step_by(6) {
            t.check(fib::period6_mod4_check(a, b), || format!("a={a} b={b}"));
        }
    }
    for n in (1..=200).filter(|n| n % 2 != 0 && n % 3 != 0) {
        t.check(fib::coprime_six_unit_check(n), || format!("n={n}"));
    }
    out.push(t.finish());

    out
}

/// Grid used by the parity facts and the oracle suite: n ≤ 25, k ≤ 6, m ≤ 3.
pub fn acceptance_specs(k_min: u64, n_min: u64) -> Vec<TowerSpec> {
    let mut out = Vec::new();
    for n in n_min..=25 {
        for k in k_min..=6 {
            for m in 1..=3 {
                out.push(TowerSpec { k, n, m });
            }
        }
    }
    out
}

pub fn lemma_suite() -> Vec<PropertyOutcome> {
    let mut out = Vec::new();

    let mut t = Tally::new("F_n^(s-1) | r => F_n^s | F_nr, 2 <= n <= 8, 1 <= s <= 3, r <= 60");
    for n in 2..=8 {
        let f_n = fib(n).expect("small");
        for s in 1..=3u32 {
            let step = f_n.pow(s - 1);
            for r in (1..=60u64).filter(|r| (BigUint::from(*r) % &step).is_zero()) {
                t.check(lemmas::power_divisibility_check(n, s as u64, r), || format!("n={n} s={s} r={r}"));
            }
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("F_n^(k+1) | F(n F_n^k), 3 <= n <= 10, 1 <= k <= 4");
    for n in 3..=10 {
        for k in 1..=4 {
            let ok = analyze(&TowerSpec { k: 2, n, m: k }).map(|r| r.divisibility_ok);
            t.check(ok, || format!("n={n} k={k}"));
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("prime witness p | s, p^c | j for minimal c (500 random triples)");
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_RHO_SEED);
    let mut found = 0;
    while found < 500 {
        let a = BigUint::from(rng.gen_range(1u32..=50));
        let j = BigUint::from(rng.gen_range(1u32..=64));
        let s = BigUint::from(rng.gen_range(2u32..=12));
        match lemmas::lemma1_witness(&a, &j, &s) {
            Err(crate::Error::NoC { .. }) => continue,
            res => {
                found += 1;
                t.check(res.map(|w| w.is_valid()), || format!("a={a} j={j} s={s}"));
            }
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("s^(k+l) | C(r,j) s^j, s <= 5, k,l <= 3, r = s^k b, b <= 6");
    for s in 1..=5u64 {
        for k in 1..=3u32 {
            for l in 1..=3 {
                for b in 1..=6 {
                    let r = s.pow(k) * b;
                    t.check(lemmas::lemma2_check(s, k as u64, l, r), || {
                        format!("s={s} k={k} l={l} r={r}")
                    });
                }
            }
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("parity of G: 2 | r iff 3|n or 4|n; r = 1 (mod 4); r = 0 (mod 8)");
    for spec in acceptance_specs(2, 1) {
        let ok = lemma4_check(&spec).map(|(a, b, c)| a && b && c);
        t.check(ok, || spec.to_string());
    }
    out.push(t.finish());

    let mut t = Tally::new("F_nr / F_n^(k+1) = A + B (mod F_n), 3 <= n <= 8, k <= 2, b <= 4");
    for n in 3..=8u64 {
        let f_n = fib(n).expect("small");
        for k in 1..=2u32 {
            for b in 1..=4u64 {
                let r = &f_n.pow(k) * b;
                let r: u64 = r.try_into().expect("small");
                if n * r > 1_000_000 {
                    continue;
                }
                t.check(lemmas::truncation_check(n, r, k as u64), || {
                    format!("n={n} k={k} r={r}")
                });
            }
        }
    }
    out.push(t.finish());

    out
}

/// Modular engine against exact evaluation for every grid spec the oracle
/// can afford at `max_index`.
pub fn oracle_suite(max_index: u64) -> Vec<PropertyOutcome> {
    let mut valuation = Tally::new("oracle valuation >= k+m-1, = k+m-1 when n >= 4, k >= 2");
    let mut unit = Tally::new("oracle unit residue = modular engine unit residue");
    let mut probes = Tally::new("tower residue = exact G mod {7, 8, 97, F_n^(k+m)}");
    for spec in acceptance_specs(1, 1) {
        if !oracle_feasible(&spec, max_index) {
            continue;
        }
        let exact = match oracle_eval(&spec, max_index) {
            Ok(r) => r,
            Err(e) => {
                valuation.check(Err(e), || spec.to_string());
                continue;
            }
        };
        let report = analyze(&spec);
        let expected = spec.expected_valuation();
        valuation.check(
            Ok(match exact.valuation {
                None => true,
                Some(v) if spec.k >= 2 && spec.n >= 4 => v == expected,
                Some(v) => v >= expected,
            }),
            || format!("{spec}: valuation {:?}", exact.valuation),
        );
        unit.check(
            report.map(|r| exact.quotient_residue.as_ref() == Some(&r.unit_residue)),
            || spec.to_string(),
        );
        let f_n = fib(spec.n).expect("small");
        let top = f_n.pow((expected + 1) as u32);
        for modulus in [BigUint::from(7u32), BigUint::from(8u32), BigUint::from(97u32), top] {
            let ok = factorize(&modulus, DEFAULT_RHO_BUDGET)
                .and_then(|f| tower_residue(&spec, &f))
                .map(|r| r == &exact.value % &modulus);
            probes.check(ok, || format!("{spec} mod {modulus}"));
        }
    }
    vec![valuation.finish(), unit.finish(), probes.finish()]
}

/// Factored π(M) against brute iteration for all 1 <= M <= `limit`.
pub fn pisano_suite(limit: u64) -> Vec<PropertyOutcome> {
    use rayon::prelude::*;
    let failures: Vec<u64> = (1..=limit)
        .into_par_iter()
        .filter(|&m| {
            let brute = pisano_period_brute(m, default_brute_cap(m));
            let factored = factorize(&BigUint::from(m), DEFAULT_RHO_BUDGET)
                .and_then(|f| pisano_period(&f));
            match (brute, factored) {
                (Ok(b), Ok(f)) => *f.value() != BigUint::from(b),
                _ => true,
            }
        })
        .collect();
    let mut small = Tally::new("pi(4) = 6");
    small.check(
        pisano_period(&factorize(&BigUint::from(4u32), 1).expect("tiny"))
            .map(|p| p.value() == &BigUint::from(6u32)),
        || "pi(4)".into(),
    );
    vec![
        PropertyOutcome {
            name: format!("factored pi(M) = brute pi(M), 1 <= M <= {limit}"),
            cases: limit,
            passed: failures.is_empty(),
            counterexample: failures.first().map(|m| format!("M={m}")),
        },
        small.finish(),
    ]
}

/// Fast doubling against the plain recurrence for 0 <= i <= `limit`.
pub fn fast_doubling_agrees(limit: u64) -> Option<u64> {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for i in 0..=limit {
        if fib(i).as_ref() != Ok(&a) {
            return Some(i);
        }
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    None
}
