//! Exact Fibonacci numbers and the classical identities they satisfy.
//!
//! Indexing follows F_0 = 0, F_1 = F_2 = 1. Every value here is exact; the
//! modular engine in [`crate::pisano`] is checked against these.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest index [`fib`] will evaluate exactly.
pub const DEFAULT_MAX_EXACT_INDEX: u64 = 50_000_000;

/// Returns `(F_i, F_{i+1})` by fast doubling over the bits of `i`.
pub(crate) fn fib_pair(i: u64) -> (BigUint, BigUint) {
    let mut a = BigUint::zero();
    let mut b = BigUint::one();
    if i == 0 {
        return (a, b);
    }
    let bits = 64 - i.leading_zeros();
    for shift in (0..bits).rev() {
        // F_{2t} = F_t (2F_{t+1} - F_t), F_{2t+1} = F_t^2 + F_{t+1}^2
        let two_b_minus_a = (&b << 1u32) - &a;
        let even = &a * two_b_minus_a;
        let odd = &a * &a + &b * &b;
        if (i >> shift) & 1 == 1 {
            b = &even + &odd;
            a = odd;
        } else {
            a = even;
            b = odd;
        }
    }
    (a, b)
}

/// F_i with the default exact-index budget.
pub fn fib(i: u64) -> Result<BigUint> {
    fib_with_budget(i, DEFAULT_MAX_EXACT_INDEX)
}

pub fn fib_with_budget(i: u64, max_index: u64) -> Result<BigUint> {
    if i > max_index {
        return Err(Error::BudgetExceeded {
            index: BigUint::from(i),
            max: max_index,
        });
    }
    Ok(fib_pair(i).0)
}

/// F_i for an index held as a big integer.
pub fn fib_big(i: &BigUint, max_index: u64) -> Result<BigUint> {
    match i.to_u64() {
        Some(small) => fib_with_budget(small, max_index),
        None => Err(Error::BudgetExceeded {
            index: i.clone(),
            max: max_index,
        }),
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::PreconditionViolated(msg.to_owned()))
    }
}

/// gcd(F_a, F_b) = F_gcd(a,b).
pub fn gcd_identity_check(a: u64, b: u64) -> Result<bool> {
    require(a >= 1 && b >= 1, "gcd identity needs a, b >= 1")?;
    let lhs = fib(a)?.gcd(&fib(b)?);
    Ok(lhs == fib(a.gcd(&b))?)
}

/// Exact binomial coefficient C(r, j) by the multiplicative formula.
pub fn binomial(r: u64, j: u64) -> BigUint {
    if j > r {
        return BigUint::zero();
    }
    let j = j.min(r - j);
    let mut acc = BigUint::one();
    for t in 1..=j {
        // C(r, t) = C(r, t-1) * (r - t + 1) / t, each step exact
        acc *= r - t + 1;
        acc /= t;
    }
    acc
}

/// Right-hand side of F_{nr} = sum_{j=1}^{r} C(r,j) F_n^j F_{n-1}^{r-j} F_j.
pub fn expansion_rhs(n: u64, r: u64) -> Result<BigUint> {
    require(n >= 1 && r >= 1, "expansion needs n, r >= 1")?;
    let top = n.checked_mul(r).ok_or_else(|| Error::BudgetExceeded {
        index: BigUint::from(n) * r,
        max: DEFAULT_MAX_EXACT_INDEX,
    })?;
    if top > DEFAULT_MAX_EXACT_INDEX {
        return Err(Error::BudgetExceeded {
            index: BigUint::from(top),
            max: DEFAULT_MAX_EXACT_INDEX,
        });
    }
    let f_n = fib(n)?;
    let f_prev = fib(n - 1)?;
    // walk j upward keeping C(r,j), F_n^j and F_j, F_{j+1} incremental
    let mut sum = BigUint::zero();
    let mut binom = BigUint::one();
    let mut fn_pow = BigUint::one();
    let (mut f_j, mut f_next) = (BigUint::zero(), BigUint::one());
    for j in 1..=r {
        binom = binom * (r - j + 1) / j;
        fn_pow *= &f_n;
        let t = &f_j + &f_next;
        f_j = std::mem::replace(&mut f_next, t);
        if f_prev.is_zero() && j < r {
            continue;
        }
        sum += &binom * &fn_pow * f_prev.pow((r - j) as u32) * &f_j;
    }
    Ok(sum)
}

/// F_{n+1} F_{n-1} - F_n^2, which Cassini's identity says is (-1)^n.
pub fn cassini(n: u64) -> Result<BigInt> {
    require(n >= 1, "cassini needs n >= 1")?;
    if n > DEFAULT_MAX_EXACT_INDEX {
        return Err(Error::BudgetExceeded {
            index: BigUint::from(n),
            max: DEFAULT_MAX_EXACT_INDEX,
        });
    }
    let (f_prev, f_n) = fib_pair(n - 1);
    let f_next = &f_prev + &f_n;
    Ok(BigInt::from(f_next * f_prev) - BigInt::from(&f_n * &f_n))
}

/// F_{a+b} = F_{a+1} F_b + F_a F_{b-1}.
pub fn addition_formula_check(a: u64, b: u64) -> Result<bool> {
    require(a >= 1 && b >= 1, "addition formula needs a, b >= 1")?;
    let lhs = fib(a + b)?;
    let rhs = fib(a + 1)? * fib(b)? + fib(a)? * fib(b - 1)?;
    Ok(lhs == rhs)
}

/// For a >= 3: F_a | F_b exactly when a | b.
pub fn divisibility_criterion_check(a: u64, b: u64) -> Result<bool> {
    require(a >= 3, "divisibility criterion needs a >= 3")?;
    let divides = fib(b)?.is_multiple_of(&fib(a)?);
    Ok(divides == (b % a == 0))
}

/// (-1)^n as a canonical residue in [0, modulus).
pub fn sign_residue(n_is_odd: bool, modulus: &BigUint) -> BigUint {
    if modulus.is_one() {
        BigUint::zero()
    } else if n_is_odd {
        modulus - 1u32
    } else {
        BigUint::one()
    }
}

/// F_{n-1}^2 and F_{n+1}^2 are both congruent to (-1)^n mod F_n.
pub fn square_congruence_check(n: u64) -> Result<bool> {
    require(n >= 1, "square congruence needs n >= 1")?;
    let f_n = fib(n)?;
    let f_prev = fib(n - 1)?;
    let f_next = fib(n + 1)?;
    let expected = sign_residue(n.is_odd(), &f_n);
    Ok((&f_prev * &f_prev) % &f_n == expected && (&f_next * &f_next) % &f_n == expected)
}

/// If a = b (mod 6) then F_a = F_b (mod 4).
pub fn period6_mod4_check(a: u64, b: u64) -> Result<bool> {
    require(a % 6 == b % 6, "period-6 check needs a = b (mod 6)")?;
    Ok(fib(a)? % 4u32 == fib(b)? % 4u32)
}

/// If gcd(n, 6) = 1 then F_n = 1 (mod 4).
pub fn coprime_six_unit_check(n: u64) -> Result<bool> {
    require(n.gcd(&6) == 1, "needs gcd(n, 6) = 1")?;
    Ok(fib(n)? % 4u32 == BigUint::one())
}

/// Largest e with base^e | x.
pub fn valuation(base: &BigUint, x: &BigUint) -> Result<u64> {
    require(*base >= BigUint::from(2u32), "valuation base must be >= 2")?;
    require(!x.is_zero(), "valuation of zero is unbounded")?;
    let mut e = 0;
    let mut rest = x.clone();
    loop {
        let (q, r) = rest.div_rem(base);
        if !r.is_zero() {
            return Ok(e);
        }
        rest = q;
        e += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn small_values() {
        assert_eq!(fib(0).unwrap(), big(0));
        assert_eq!(fib(1).unwrap(), big(1));
        assert_eq!(fib(2).unwrap(), big(1));
        assert_eq!(fib(12).unwrap(), big(144));
        assert_eq!(fib(48).unwrap(), big(4_807_526_976));
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            fib_with_budget(11, 10),
            Err(Error::BudgetExceeded { max: 10, .. })
        ));
        assert!(fib(DEFAULT_MAX_EXACT_INDEX + 1).is_err());
        let huge = BigUint::from(u64::MAX) * 3u32;
        assert!(fib_big(&huge, u64::MAX).is_err());
    }

    #[test]
    fn gcd_identity_examples() {
        assert!(gcd_identity_check(12, 18).unwrap());
        assert_eq!(big(144).gcd(&big(2584)), big(8));
        assert!(gcd_identity_check(1, 1).unwrap());
        assert!(gcd_identity_check(5, 10).unwrap());
        assert!(gcd_identity_check(0, 3).is_err());
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(expansion_rhs(2, 3).unwrap(), big(8));
        assert_eq!(expansion_rhs(3, 4).unwrap(), big(144));
        for n in 1..20 {
            assert_eq!(expansion_rhs(n, 1).unwrap(), fib(n).unwrap());
        }
        // n = 1 has F_0 = 0, only the j = r term survives
        assert_eq!(expansion_rhs(1, 7).unwrap(), big(13));
    }

    #[test]
    fn cassini_examples() {
        assert_eq!(cassini(5).unwrap(), BigInt::from(-1));
        assert_eq!(cassini(2).unwrap(), BigInt::from(1));
        assert_eq!(cassini(1).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn addition_examples() {
        assert!(addition_formula_check(3, 4).unwrap());
        assert!(addition_formula_check(1, 1).unwrap());
        assert!(addition_formula_check(10, 10).unwrap());
        assert_eq!(fib(20).unwrap(), big(6765));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&big(2), &big(8)).unwrap(), 3);
        assert_eq!(valuation(&big(3), &big(144)).unwrap(), 2);
        assert_eq!(valuation(&big(5), &big(7)).unwrap(), 0);
        assert!(valuation(&big(1), &big(7)).is_err());
        assert!(valuation(&big(2), &big(0)).is_err());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(9, 1), big(9));
        assert_eq!(binomial(4, 3), big(4));
        assert_eq!(binomial(10, 5), big(252));
        assert_eq!(binomial(3, 5), big(0));
        assert_eq!(binomial(60, 30), big(118_264_581_564_861_424));
    }

    #[test]
    fn other_identity_examples() {
        assert!(square_congruence_check(7).unwrap());
        assert!(period6_mod4_check(1, 91).unwrap());
        assert!(period6_mod4_check(1, 2).is_err());
        assert!(coprime_six_unit_check(25).unwrap());
        assert!(divisibility_criterion_check(4, 12).unwrap());
        assert!(divisibility_criterion_check(4, 13).unwrap());
    }
}
