//! Integer factorization: trial division by small primes, then Brent's
//! variant of Pollard rho on whatever composite cofactor remains.
//!
//! Runs are deterministic: the rho parameters are drawn from a ChaCha stream
//! seeded with [`DEFAULT_RHO_SEED`] unless a seed is passed explicitly.

use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Seed for the rho parameter stream; recorded in sweep reports.
pub const DEFAULT_RHO_SEED: u64 = 0x00f1_b70e;

/// Total rho iterations allowed for one `factorize` call.
pub const DEFAULT_RHO_BUDGET: u64 = 1 << 24;

const TRIAL_LIMIT: u32 = 1000;

/// A natural number carried together with its prime factorization.
///
/// Primes are strictly increasing and every exponent is at least one. The
/// empty factor list denotes 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredNatural {
    value: BigUint,
    factors: Vec<(BigUint, u32)>,
}

impl FactoredNatural {
    pub fn one() -> Self {
        FactoredNatural {
            value: BigUint::one(),
            factors: Vec::new(),
        }
    }

    /// Builds from arbitrary (prime, exponent) pairs, merging repeats.
    /// The caller vouches that each base is prime.
    pub fn from_prime_powers<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (BigUint, u32)>,
    {
        let mut factors: Vec<(BigUint, u32)> = pairs.into_iter().filter(|(_, e)| *e > 0).collect();
        factors.sort();
        let mut merged: Vec<(BigUint, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        let value = merged
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        FactoredNatural {
            value,
            factors: merged,
        }
    }

    pub fn prime_power(p: BigUint, e: u32) -> Self {
        Self::from_prime_powers([(p, e)])
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn mul(&self, other: &FactoredNatural) -> FactoredNatural {
        Self::from_prime_powers(self.factors.iter().chain(other.factors.iter()).cloned())
    }

    pub fn pow(&self, e: u32) -> FactoredNatural {
        Self::from_prime_powers(self.factors.iter().map(|(p, f)| (p.clone(), f * e)))
    }

    /// Least common multiple: maximum exponent per prime.
    pub fn lcm(&self, other: &FactoredNatural) -> FactoredNatural {
        let mut out: Vec<(BigUint, u32)> = Vec::new();
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.factors, &other.factors);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push(b[j].clone());
                j += 1;
            } else {
                out.push((a[i].0.clone(), a[i].1.max(b[j].1)));
                i += 1;
                j += 1;
            }
        }
        Self::from_prime_powers(out)
    }

    /// Divides out one copy of `p`, or returns `None` if `p` is not a factor.
    pub fn divide_prime(&self, p: &BigUint) -> Option<FactoredNatural> {
        let pos = self.factors.iter().position(|(q, _)| q == p)?;
        let mut factors = self.factors.clone();
        if factors[pos].1 == 1 {
            factors.remove(pos);
        } else {
            factors[pos].1 -= 1;
        }
        Some(FactoredNatural {
            value: &self.value / p,
            factors,
        })
    }

    /// Checks the representation invariants, including primality of bases.
    pub fn verify(&self) -> bool {
        let increasing = self.factors.windows(2).all(|w| w[0].0 < w[1].0);
        let positive = self.factors.iter().all(|(_, e)| *e >= 1);
        let product = self
            .factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        increasing
            && positive
            && product == self.value
            && self.factors.iter().all(|(p, _)| is_probable_prime(p))
    }
}

impl fmt::Display for FactoredNatural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (idx, (p, e)) in self.factors.iter().enumerate() {
            if idx > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

fn small_primes() -> Vec<u32> {
    let limit = TRIAL_LIMIT as usize;
    let mut sieve = vec![true; limit + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= limit {
        if sieve[i] {
            for j in (i * i..=limit).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    (2..=limit).filter(|&i| sieve[i]).map(|i| i as u32).collect()
}

const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin. Deterministic below 3.3e24 (first 13 prime bases); above
/// that, 24 extra bases from a fixed-seed stream are added.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        if small < 2 {
            return false;
        }
        for p in MR_BASES {
            if small == p as u64 {
                return true;
            }
            if small % p as u64 == 0 {
                return false;
            }
        }
    } else if MR_BASES.iter().any(|&p| (n % p).is_zero()) {
        return false;
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;

    let witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            return false;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                return false;
            }
        }
        true
    };

    if MR_BASES.iter().any(|&a| witness(&BigUint::from(a))) {
        return false;
    }
    let deterministic_bound = BigUint::parse_bytes(b"3317044064679887385961981", 10).unwrap();
    if *n < deterministic_bound {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_RHO_SEED);
    let two = BigUint::from(2u32);
    (0..24).all(|_| !witness(&rng.gen_biguint_range(&two, &n_minus_1)))
}

/// Complete factorization with the default seed.
pub fn factorize(x: &BigUint, budget: u64) -> Result<FactoredNatural> {
    factorize_seeded(x, budget, DEFAULT_RHO_SEED)
}

pub fn factorize_seeded(x: &BigUint, budget: u64, seed: u64) -> Result<FactoredNatural> {
    if x.is_zero() {
        return Err(Error::PreconditionViolated("cannot factor zero".into()));
    }
    let mut rest = x.clone();
    let mut pairs: Vec<(BigUint, u32)> = Vec::new();
    for p in small_primes() {
        if rest.is_one() {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&BigUint::from(p));
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            pairs.push((BigUint::from(p), e));
        }
    }
    if !rest.is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut left = budget;
        let trial_sq = BigUint::from(TRIAL_LIMIT) * TRIAL_LIMIT;
        let mut stack = vec![rest];
        while let Some(c) = stack.pop() {
            if c < trial_sq || is_probable_prime(&c) {
                pairs.push((c, 1));
                continue;
            }
            match rho_split(&c, &mut rng, &mut left) {
                Some(d) => {
                    let other = &c / &d;
                    stack.push(d);
                    stack.push(other);
                }
                None => return Err(Error::FactorBudgetExceeded { value: c }),
            }
        }
    }
    Ok(FactoredNatural::from_prime_powers(pairs))
}

/// Brent's cycle-finding rho; returns a proper factor of composite `n`.
fn rho_split(n: &BigUint, rng: &mut ChaCha8Rng, budget: &mut u64) -> Option<BigUint> {
    const BATCH: u64 = 128;
    let one = BigUint::one();
    let absdiff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    while *budget > 0 {
        let c = rng.gen_biguint_range(&one, n);
        let step = |v: &BigUint| (v * v + &c) % n;
        let mut y = rng.gen_biguint_below(n);
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut g = BigUint::one();
        let mut q = BigUint::one();
        let mut r: u64 = 1;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = step(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let run = BATCH.min(r - k);
                for _ in 0..run {
                    y = step(&y);
                    q = (q * absdiff(&x, &y)) % n;
                }
                *budget = budget.saturating_sub(run);
                g = q.gcd(n);
                k += run;
            }
            r *= 2;
            if *budget == 0 && g.is_one() {
                return None;
            }
        }
        if g == *n {
            // batch overshot; redo one step at a time from the saved point
            loop {
                ys = step(&ys);
                g = absdiff(&x, &ys).gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return Some(g);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn pairs(f: &FactoredNatural) -> Vec<(u64, u32)> {
        f.factors()
            .iter()
            .map(|(p, e)| (p.to_u64().unwrap(), *e))
            .collect()
    }

    #[test]
    fn factor_examples() {
        let f = factorize(&big(832_040), DEFAULT_RHO_BUDGET).unwrap();
        assert_eq!(pairs(&f), vec![(2, 3), (5, 1), (11, 1), (31, 1), (61, 1)]);
        assert!(factorize(&big(1), DEFAULT_RHO_BUDGET).unwrap().is_one());
        let f = factorize(&big(144), DEFAULT_RHO_BUDGET).unwrap();
        assert_eq!(pairs(&f), vec![(2, 4), (3, 2)]);
        assert!(factorize(&big(0), DEFAULT_RHO_BUDGET).is_err());
    }

    #[test]
    fn rho_splits_large_semiprimes() {
        // 1000003 * 1000033 and a product of two 31-bit primes
        let n = big(1_000_003) * big(1_000_033);
        let f = factorize(&n, DEFAULT_RHO_BUDGET).unwrap();
        assert_eq!(pairs(&f), vec![(1_000_003, 1), (1_000_033, 1)]);
        let n = big(2_147_483_647) * big(2_147_483_629) * big(2_147_483_629);
        let f = factorize(&n, DEFAULT_RHO_BUDGET).unwrap();
        assert_eq!(pairs(&f), vec![(2_147_483_629, 2), (2_147_483_647, 1)]);
        assert!(f.verify());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let n = big(1_000_003) * big(1_000_033);
        assert!(matches!(
            factorize(&n, 1),
            Err(Error::FactorBudgetExceeded { .. })
        ));
    }

    #[test]
    fn primality() {
        let primes = [2u64, 3, 5, 41, 43, 997, 75_025 / 25, 28_657, 2_147_483_647];
        for p in primes {
            assert!(is_probable_prime(&big(p)), "{p}");
        }
        for c in [0u64, 1, 4, 561, 1105, 75_025, 3_215_031_751] {
            assert!(!is_probable_prime(&big(c)), "{c}");
        }
        // 2^89 - 1 is a Mersenne prime above the deterministic bound
        let m89 = (BigUint::one() << 89u32) - 1u32;
        assert!(is_probable_prime(&m89));
        assert!(!is_probable_prime(&(&m89 * 3u32)));
    }

    #[test]
    fn lcm_and_division() {
        let a = factorize(&big(24), 100).unwrap();
        let b = factorize(&big(90), 100).unwrap();
        assert_eq!(a.lcm(&b).value(), &big(360));
        assert_eq!(a.mul(&b).value(), &big(2160));
        assert_eq!(a.pow(3).value(), &big(13_824));
        assert_eq!(a.divide_prime(&big(2)).unwrap().value(), &big(12));
        assert!(a.divide_prime(&big(5)).is_none());
        assert_eq!(a.to_string(), "2^3 * 3");
    }
}
