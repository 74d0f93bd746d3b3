//! Executable forms of the divisibility lemmas behind the tower results,
//! plus the two-term truncation of the F_{nr} expansion.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::factor::{factorize, DEFAULT_RHO_BUDGET};
use crate::fib::{binomial, fib};

/// Minimal c with j | a·s^c and a prime p with p | s and p^c | j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma1Witness {
    pub a: BigUint,
    pub j: BigUint,
    pub s: BigUint,
    pub c: u32,
    pub p: BigUint,
}

impl Lemma1Witness {
    /// Re-checks minimality of c and the witness conditions from scratch.
    pub fn is_valid(&self) -> bool {
        let divides = |c: u32| (&self.a * self.s.pow(c)).is_multiple_of(&self.j);
        let minimal = self.c == 0 || !divides(self.c - 1);
        divides(self.c)
            && minimal
            && self.s.is_multiple_of(&self.p)
            && self.j.is_multiple_of(&self.p.pow(self.c))
            && crate::factor::is_probable_prime(&self.p)
    }
}

/// Finds the least c with j | a·s^c and a prime witness for it.
///
/// The search stops at the largest prime exponent in j; if no c up to
/// there works then none does, and `NoC` is returned.
pub fn lemma1_witness(a: &BigUint, j: &BigUint, s: &BigUint) -> Result<Lemma1Witness> {
    if a.is_zero() || j.is_zero() || *s < BigUint::from(2u32) {
        return Err(Error::PreconditionViolated(
            "witness search needs a, j >= 1 and s >= 2".into(),
        ));
    }
    let j_factors = factorize(j, DEFAULT_RHO_BUDGET)?;
    let bound = j_factors.factors().iter().map(|(_, e)| *e).max().unwrap_or(0);
    let c = (0..=bound)
        .find(|&c| (a * s.pow(c)).is_multiple_of(j))
        .ok_or_else(|| Error::NoC {
            a: a.clone(),
            j: j.clone(),
            s: s.clone(),
        })?;
    let s_factors = factorize(s, DEFAULT_RHO_BUDGET)?;
    let p = s_factors
        .factors()
        .iter()
        .map(|(p, _)| p)
        .find(|p| j.is_multiple_of(&p.pow(c)))
        .cloned()
        .ok_or_else(|| Error::NoWitness {
            a: a.clone(),
            j: j.clone(),
            s: s.clone(),
            c,
        })?;
    Ok(Lemma1Witness {
        a: a.clone(),
        j: j.clone(),
        s: s.clone(),
        c,
        p,
    })
}

/// 2^(j-l+1) > j, with negative exponents treated as fractions.
fn qualifies(j: u64, l: u64) -> bool {
    if j + 1 < l {
        return false;
    }
    let e = j + 1 - l;
    e >= 64 || (1u64 << e) > j
}

/// Given s^k | r: s^(k+l) | C(r,j)·s^j for every 1 ≤ j ≤ r with
/// 2^(j-l+1) > j, and s^(k+2) | C(r,j)·s^j for every 3 ≤ j ≤ r.
pub fn lemma2_check(s: u64, k: u64, l: u64, r: u64) -> Result<bool> {
    if s == 0 || r == 0 {
        return Err(Error::PreconditionViolated("need s, r >= 1".into()));
    }
    let s_big = BigUint::from(s);
    if !BigUint::from(r).is_multiple_of(&s_big.pow(k as u32)) {
        return Err(Error::PreconditionViolated(format!("{s}^{k} does not divide {r}")));
    }
    let main = s_big.pow((k + l) as u32);
    let particular = s_big.pow((k + 2) as u32);
    let mut binom = BigUint::one();
    let mut s_pow = BigUint::one();
    for j in 1..=r {
        binom = binom * (r - j + 1) / j;
        s_pow *= s;
        let term = &binom * &s_pow;
        if qualifies(j, l) && !term.is_multiple_of(&main) {
            return Ok(false);
        }
        if j >= 3 && !term.is_multiple_of(&particular) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// F_n^s | F_{nr} whenever F_n^(s-1) | r.
pub fn power_divisibility_check(n: u64, s: u64, r: u64) -> Result<bool> {
    if s == 0 {
        return Err(Error::PreconditionViolated("need s >= 1".into()));
    }
    let f_n = fib(n)?;
    if !BigUint::from(r).is_multiple_of(&f_n.pow((s - 1) as u32)) {
        return Err(Error::PreconditionViolated(format!(
            "F_{n}^{} does not divide {r}",
            s - 1
        )));
    }
    Ok(fib(n * r)?.is_multiple_of(&f_n.pow(s as u32)))
}

/// The two surviving terms of F_{nr} / F_n^(k+1) modulo F_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationPair {
    /// (r / F_n^k) · F_{n-1}^(r-1) mod F_n
    pub a: BigUint,
    /// (C(r,2) · F_n / F_n^k) · F_{n-1}^(r-2) mod F_n
    pub b: BigUint,
}

fn exact_div(num: &BigUint, den: &BigUint, what: &str) -> Result<BigUint> {
    let (q, rem) = num.div_rem(den);
    if rem.is_zero() {
        Ok(q)
    } else {
        Err(Error::PreconditionViolated(format!("{what} is not an exact quotient")))
    }
}

/// A and B for r with F_n^k | r. All divisions are exact before reducing.
pub fn truncation_residues(n: u64, r: u64, k: u64) -> Result<TruncationPair> {
    if n == 0 || r == 0 || k == 0 {
        return Err(Error::PreconditionViolated("need n, r, k >= 1".into()));
    }
    let f_n = fib(n)?;
    let f_prev = fib(n - 1)?;
    let fn_k = f_n.pow(k as u32);
    let r_big = BigUint::from(r);
    let r_over = exact_div(&r_big, &fn_k, "r / F_n^k")
        .map_err(|_| Error::PreconditionViolated(format!("F_{n}^{k} does not divide {r}")))?;
    let a = (r_over * f_prev.modpow(&BigUint::from(r - 1), &f_n)) % &f_n;
    let b_coeff = exact_div(&(binomial(r, 2) * &f_n), &fn_k, "C(r,2) F_n / F_n^k")?;
    let b = (b_coeff * f_prev.modpow(&BigUint::from(r.saturating_sub(2)), &f_n)) % &f_n;
    Ok(TruncationPair { a, b })
}

/// F_{nr} / F_n^(k+1) ≡ A + B (mod F_n).
pub fn truncation_check(n: u64, r: u64, k: u64) -> Result<bool> {
    let pair = truncation_residues(n, r, k)?;
    let f_n = fib(n)?;
    let top = n
        .checked_mul(r)
        .ok_or_else(|| Error::PreconditionViolated("n*r overflows".into()))?;
    let lhs = exact_div(&fib(top)?, &f_n.pow((k + 1) as u32), "F_nr / F_n^(k+1)")? % &f_n;
    Ok(lhs == (pair.a + pair.b) % &f_n)
}
