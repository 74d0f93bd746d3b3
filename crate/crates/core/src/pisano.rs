//! Fibonacci numbers modulo M, Pisano periods, and the descending period
//! chains used to reduce tower indices.
//!
//! π(M) is assembled from prime powers: π(p) is the least divisor of p - 1
//! (p = ±1 mod 5) or 2(p + 1) (p = ±2 mod 5) with the period property, and
//! π(p^e) is found by shrinking the candidate p^(e-1)·π(p) prime by prime.
//! Nothing assumes π(p^2) = p·π(p); every candidate is minimized explicitly.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{factorize, FactoredNatural, DEFAULT_RHO_BUDGET};

/// Moduli below this are handed to the brute iterator by [`PisanoMethod::Auto`].
pub const BRUTE_AUTO_LIMIT: u64 = 10_000_000;

fn fib_pair_mod_u64(i: &BigUint, m: u64) -> (u64, u64) {
    let m128 = m as u128;
    let (mut a, mut b) = (0u128, 1u128 % m128);
    for bit in (0..i.bits()).rev() {
        let two_b_minus_a = (2 * b + m128 - a) % m128;
        let even = a * two_b_minus_a % m128;
        let odd = (a * a % m128 + b * b % m128) % m128;
        if i.bit(bit) {
            a = odd;
            b = (even + odd) % m128;
        } else {
            a = even;
            b = odd;
        }
    }
    (a as u64, b as u64)
}

fn fib_pair_mod_big(i: &BigUint, m: &BigUint) -> (BigUint, BigUint) {
    let mut a = BigUint::zero();
    let mut b = BigUint::one() % m;
    for bit in (0..i.bits()).rev() {
        let two_b_minus_a = ((&b << 1u32) + m - &a) % m;
        let even = (&a * two_b_minus_a) % m;
        let odd = (&a * &a + &b * &b) % m;
        if i.bit(bit) {
            b = (&even + &odd) % m;
            a = odd;
        } else {
            a = even;
            b = odd;
        }
    }
    (a, b)
}

/// `(F_i mod m, F_{i+1} mod m)`.
pub fn fib_pair_mod(i: &BigUint, m: &BigUint) -> (BigUint, BigUint) {
    assert!(!m.is_zero(), "modulus must be positive");
    match m.to_u64() {
        Some(small) => {
            let (a, b) = fib_pair_mod_u64(i, small);
            (BigUint::from(a), BigUint::from(b))
        }
        None => fib_pair_mod_big(i, m),
    }
}

/// F_i mod m by fast doubling; total for i = 0 and m = 1.
pub fn fib_mod(i: &BigUint, m: &BigUint) -> BigUint {
    fib_pair_mod(i, m).0
}

/// F_t = 0 and F_{t+1} = 1 modulo `m`.
pub fn has_period_property(t: &BigUint, m: &BigUint) -> bool {
    let (a, b) = fib_pair_mod(t, m);
    a.is_zero() && b == BigUint::one() % m
}

/// Shrinks a known multiple of the period to the period itself.
fn minimize_period(candidate: FactoredNatural, modulus: &BigUint) -> Result<FactoredNatural> {
    if !has_period_property(candidate.value(), modulus) {
        return Err(Error::PreconditionViolated(format!(
            "{} is not a period multiple for modulus {modulus}",
            candidate.value()
        )));
    }
    let mut current = candidate;
    let primes: Vec<BigUint> = current.factors().iter().map(|(p, _)| p.clone()).collect();
    for p in primes {
        while let Some(smaller) = current.divide_prime(&p) {
            if has_period_property(smaller.value(), modulus) {
                current = smaller;
            } else {
                break;
            }
        }
    }
    Ok(current)
}

fn prime_period(p: &BigUint) -> Result<FactoredNatural> {
    match p.to_u64() {
        Some(2) => return Ok(FactoredNatural::prime_power(BigUint::from(3u32), 1)),
        Some(5) => {
            return Ok(FactoredNatural::from_prime_powers([
                (BigUint::from(2u32), 2),
                (BigUint::from(5u32), 1),
            ]))
        }
        _ => {}
    }
    let bound = match (p % 5u32).to_u32().unwrap() {
        1 | 4 => p - 1u32,
        _ => (p + 1u32) << 1u32,
    };
    let bound = factorize(&bound, DEFAULT_RHO_BUDGET)?;
    minimize_period(bound, p)
}

fn prime_power_period(p: &BigUint, e: u32) -> Result<FactoredNatural> {
    let base = prime_period(p)?;
    if e == 1 {
        return Ok(base);
    }
    let candidate = base.mul(&FactoredNatural::prime_power(p.clone(), e - 1));
    minimize_period(candidate, &p.pow(e))
}

/// π(M) from the factorization of M, returned factored.
pub fn pisano_period(m: &FactoredNatural) -> Result<FactoredNatural> {
    let mut acc = FactoredNatural::one();
    for (p, e) in m.factors() {
        acc = acc.lcm(&prime_power_period(p, *e)?);
    }
    Ok(acc)
}

/// Default step cap for [`pisano_period_brute`]: π(M) ≤ 6M always.
pub fn default_brute_cap(m: u64) -> u64 {
    m.saturating_mul(6)
}

/// Iterates pairs mod `m` until (0, 1) recurs.
pub fn pisano_period_brute(m: u64, cap: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::PreconditionViolated("modulus must be positive".into()));
    }
    if m == 1 {
        return Ok(1);
    }
    let (mut a, mut b) = (0u64, 1u64);
    for t in 1..=cap {
        let c = if a >= m - b { a - (m - b) } else { a + b };
        a = b;
        b = c;
        if a == 0 && b == 1 {
            return Ok(t);
        }
    }
    Err(Error::CapExceeded { modulus: m, cap })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PisanoMethod {
    Brute,
    Factored,
    /// Factored, cross-checked by brute iteration below [`BRUTE_AUTO_LIMIT`].
    Auto,
}

/// π(M) by the requested method. `Auto` cross-checks both routes when the
/// brute one is affordable and reports disagreement as an error.
pub fn pisano_period_with(m: &BigUint, method: PisanoMethod) -> Result<BigUint> {
    let brute = |m: &BigUint| -> Result<BigUint> {
        let small = m.to_u64().ok_or_else(|| {
            Error::PreconditionViolated(format!("brute Pisano needs a 64-bit modulus, got {m}"))
        })?;
        Ok(BigUint::from(pisano_period_brute(small, default_brute_cap(small))?))
    };
    let factored = |m: &BigUint| -> Result<BigUint> {
        let f = factorize(m, DEFAULT_RHO_BUDGET)?;
        Ok(pisano_period(&f)?.value().clone())
    };
    match method {
        PisanoMethod::Brute => brute(m),
        PisanoMethod::Factored => factored(m),
        PisanoMethod::Auto => {
            let f = factored(m)?;
            if *m < BigUint::from(BRUTE_AUTO_LIMIT) {
                let b = brute(m)?;
                if b != f {
                    return Err(Error::PreconditionViolated(format!(
                        "Pisano routes disagree for {m}: brute {b}, factored {f}"
                    )));
                }
            }
            Ok(f)
        }
    }
}

/// True if `period` has the period property mod `modulus` and no
/// `period / q` does, for q over the primes of `period`.
pub fn verify_period(modulus: &BigUint, period: &FactoredNatural) -> bool {
    has_period_property(period.value(), modulus)
        && period.factors().iter().all(|(q, _)| {
            let smaller = period.divide_prime(q).expect("q is a factor");
            !has_period_property(smaller.value(), modulus)
        })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLevel {
    pub modulus: FactoredNatural,
    pub period: FactoredNatural,
}

/// Levels 1..=k, base first. Level j's modulus is the period of level j+1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PisanoChain {
    levels: Vec<ChainLevel>,
}

/// Compact record of a chain for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDigest {
    #[serde(with = "crate::dec::int")]
    pub depth: u64,
    /// Level moduli from the tower base up to the target, in decimal.
    pub moduli: Vec<String>,
    pub verified: bool,
}

impl PisanoChain {
    pub fn levels(&self) -> &[ChainLevel] {
        &self.levels
    }

    pub fn target(&self) -> &FactoredNatural {
        &self.levels.last().expect("chains are nonempty").modulus
    }

    /// Linkage between levels, factorization invariants and period minimality.
    pub fn verify(&self) -> bool {
        let linked = self
            .levels
            .windows(2)
            .all(|w| w[0].modulus.value() == w[1].period.value());
        linked
            && self.levels.iter().all(|l| {
                l.modulus.verify() && l.period.verify() && verify_period(l.modulus.value(), &l.period)
            })
    }

    pub fn digest(&self) -> ChainDigest {
        ChainDigest {
            depth: self.levels.len() as u64,
            moduli: self
                .levels
                .iter()
                .map(|l| l.modulus.value().to_string())
                .collect(),
            verified: self.verify(),
        }
    }
}

/// Builds M_k = target, M_{j} = π(M_{j+1}) down to M_1, target first.
pub fn build_chain(k: u64, target: &FactoredNatural) -> Result<PisanoChain> {
    if k == 0 {
        return Err(Error::PreconditionViolated("chain height must be >= 1".into()));
    }
    let mut levels = Vec::with_capacity(k as usize);
    let mut modulus = target.clone();
    for _ in 0..k {
        let period = pisano_period(&modulus)?;
        levels.push(ChainLevel {
            modulus,
            period: period.clone(),
        });
        modulus = period;
    }
    levels.reverse();
    Ok(PisanoChain { levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fib::fib;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn factored(v: u64) -> FactoredNatural {
        factorize(&big(v), DEFAULT_RHO_BUDGET).unwrap()
    }

    #[test]
    fn fib_mod_examples() {
        assert_eq!(fib_mod(&big(91), &big(4)), big(1));
        assert_eq!(fib_mod(&big(0), &big(17)), big(0));
        assert_eq!(fib_mod(&big(48), &big(64)), big(0));
        assert_eq!(big(4_807_526_976) % 64u32, big(0));
        assert_eq!(fib_mod(&big(12), &big(1)), big(0));
        assert_eq!(fib_pair_mod(&big(0), &big(1)), (big(0), big(0)));
    }

    #[test]
    fn big_modulus_path_matches_exact() {
        let m = BigUint::parse_bytes(b"1000000000000000000000000000057", 10).unwrap();
        for i in [0u64, 1, 2, 100, 777, 5000] {
            assert_eq!(fib_mod(&big(i), &m), fib(i).unwrap() % &m);
        }
    }

    #[test]
    fn period_examples() {
        assert_eq!(pisano_period(&factored(4)).unwrap().value(), &big(6));
        assert_eq!(pisano_period(&factored(1)).unwrap().value(), &big(1));
        assert_eq!(pisano_period(&factored(16)).unwrap().value(), &big(24));
        assert_eq!(pisano_period(&factored(10)).unwrap().value(), &big(60));
        assert_eq!(pisano_period(&factored(3001)).unwrap().value(), &big(100));
    }

    #[test]
    fn brute_examples() {
        assert_eq!(pisano_period_brute(2, 12).unwrap(), 3);
        assert_eq!(pisano_period_brute(10, 60).unwrap(), 60);
        assert_eq!(pisano_period_brute(1, 6).unwrap(), 1);
        assert_eq!(pisano_period_brute(16, 96).unwrap(), 24);
        assert!(matches!(
            pisano_period_brute(10, 59),
            Err(Error::CapExceeded { modulus: 10, cap: 59 })
        ));
        assert!(pisano_period_brute(0, 10).is_err());
    }

    #[test]
    fn methods_agree() {
        for m in [1u64, 2, 4, 97, 1000, 75_025] {
            let b = pisano_period_with(&big(m), PisanoMethod::Brute).unwrap();
            let f = pisano_period_with(&big(m), PisanoMethod::Factored).unwrap();
            let a = pisano_period_with(&big(m), PisanoMethod::Auto).unwrap();
            assert_eq!(b, f);
            assert_eq!(a, f);
        }
    }

    #[test]
    fn chain_examples() {
        let c = build_chain(3, &factored(16)).unwrap();
        let moduli: Vec<_> = c.levels().iter().map(|l| l.modulus.value().clone()).collect();
        assert_eq!(moduli, vec![big(24), big(24), big(16)]);
        assert!(c.verify());

        let c = build_chain(1, &factored(12)).unwrap();
        assert_eq!(c.levels().len(), 1);
        assert_eq!(c.levels()[0].period.value(), &big(24));

        let c = build_chain(2, &factored(9)).unwrap();
        let moduli: Vec<_> = c.levels().iter().map(|l| l.modulus.value().clone()).collect();
        assert_eq!(moduli, vec![big(24), big(9)]);
        assert!(c.digest().verified);
        assert!(build_chain(0, &factored(9)).is_err());
    }

    #[test]
    fn prime_power_periods_are_minimized() {
        // π(5^e) = 4·5^e, π(2^e) = 3·2^(e-1)
        for e in 1..8u32 {
            let p = pisano_period(&FactoredNatural::prime_power(big(5), e)).unwrap();
            assert_eq!(p.value(), &(big(4) * big(5).pow(e)));
            let p = pisano_period(&FactoredNatural::prime_power(big(2), e)).unwrap();
            assert_eq!(p.value(), &(big(3) * big(2).pow(e - 1)));
        }
        let huge = FactoredNatural::prime_power(big(3001), 9);
        let p = pisano_period(&huge).unwrap();
        assert!(verify_period(huge.value(), &p));
    }

    #[test]
    fn tampered_chain_fails_verification() {
        let mut c = build_chain(2, &factored(9)).unwrap();
        c.levels[1].period = factored(48);
        assert!(!c.verify());
    }
}
