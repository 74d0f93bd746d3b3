//! The Fibonacci tower G(1,n,m) = F_n^m, G(k+1,n,m) = F(n·G(k,n,m)).
//!
//! For k ≥ 2 the values are Fibonacci numbers at astronomically large
//! indices, so they are never built. Instead G is evaluated modulo a target
//! through a [`PisanoChain`]: the residue at level j is only needed modulo
//! the period of level j+1's modulus. Reducing G modulo F_n^(k+m) is enough
//! to read off both the divisibility by F_n^(k+m-1) and the unit residue
//! G / F_n^(k+m-1) mod F_n.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{factorize, FactoredNatural, DEFAULT_RHO_BUDGET};
use crate::fib::{fib, sign_residue};
use crate::pisano::{build_chain, fib_mod, ChainDigest, PisanoChain};

/// Parameters (k, n, m) of G(k, n, m). All three are at least one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TowerSpec {
    #[serde(with = "crate::dec::int")]
    pub k: u64,
    #[serde(with = "crate::dec::int")]
    pub n: u64,
    #[serde(with = "crate::dec::int")]
    pub m: u64,
}

impl TowerSpec {
    pub fn new(k: u64, n: u64, m: u64) -> Result<Self> {
        if k == 0 || n == 0 || m == 0 {
            return Err(Error::PreconditionViolated(format!(
                "tower parameters must be >= 1, got k={k} n={n} m={m}"
            )));
        }
        Ok(TowerSpec { k, n, m })
    }

    /// Exponent k + m - 1 that the divisibility result promises.
    pub fn expected_valuation(&self) -> u64 {
        self.k + self.m - 1
    }

    /// Whether the residue formula covers this spec (k ≥ 2, n ≥ 3).
    pub fn in_formula_range(&self) -> bool {
        self.k >= 2 && self.n >= 3
    }
}

impl fmt::Display for TowerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G({},{},{})", self.k, self.n, self.m)
    }
}

/// Which closed form the residue G / F_n^(k+m-1) mod F_n takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseTag {
    /// residue 1
    UnitOne,
    /// residue F_{n-1}
    #[serde(rename = "F_NMINUS1")]
    FNMinus1,
    /// residue (F_{n-3}/2)^(k-1)
    HalfPow,
    /// residue (-1)^n (F_{n-3}/2)^(k-1)
    SignedHalfPow,
    /// k < 2 or n < 3
    OutOfRange,
}

impl CaseTag {
    pub const ALL: [CaseTag; 5] = [
        CaseTag::UnitOne,
        CaseTag::FNMinus1,
        CaseTag::HalfPow,
        CaseTag::SignedHalfPow,
        CaseTag::OutOfRange,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::UnitOne => "UNIT_ONE",
            CaseTag::FNMinus1 => "F_NMINUS1",
            CaseTag::HalfPow => "HALF_POW",
            CaseTag::SignedHalfPow => "SIGNED_HALF_POW",
            CaseTag::OutOfRange => "OUT_OF_RANGE",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The individual hypotheses of the residue formula. Several of them share
/// a closed form; [`Branch::tag`] maps each to its [`CaseTag`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    /// 2 | k, 3 ∤ n
    UnitOneEvenK,
    /// 2 ∤ k, 3 ∤ n, 4 ∤ n
    UnitOneOddK,
    /// 2 ∤ k, 3 ∤ n, 4 | n
    #[serde(rename = "F_NMINUS1_ODD_K")]
    FNMinus1OddK,
    /// 2 ∤ k, 3 | n, m ≥ 2
    HalfPowOddKMultiM,
    /// 2 | k, 3 | n, m = 1
    HalfPowEvenKSingleM,
    /// 2 | k, 3 | n, m ≥ 2
    SignedHalfPowEvenKMultiM,
    /// 2 ∤ k, 3 | n, m = 1
    SignedHalfPowOddKSingleM,
}

impl Branch {
    pub const ALL: [Branch; 7] = [
        Branch::UnitOneEvenK,
        Branch::UnitOneOddK,
        Branch::FNMinus1OddK,
        Branch::HalfPowOddKMultiM,
        Branch::HalfPowEvenKSingleM,
        Branch::SignedHalfPowEvenKMultiM,
        Branch::SignedHalfPowOddKSingleM,
    ];

    /// Branch for a spec in formula range, `None` otherwise.
    pub fn classify(spec: &TowerSpec) -> Option<Branch> {
        if !spec.in_formula_range() {
            return None;
        }
        let k_even = spec.k % 2 == 0;
        let three = spec.n % 3 == 0;
        let four = spec.n % 4 == 0;
        let single = spec.m == 1;
        Some(match (three, k_even) {
            (false, true) => Branch::UnitOneEvenK,
            (false, false) if !four => Branch::UnitOneOddK,
            (false, false) => Branch::FNMinus1OddK,
            (true, false) if !single => Branch::HalfPowOddKMultiM,
            (true, true) if single => Branch::HalfPowEvenKSingleM,
            (true, true) => Branch::SignedHalfPowEvenKMultiM,
            (true, false) => Branch::SignedHalfPowOddKSingleM,
        })
    }

    pub fn tag(&self) -> CaseTag {
        match self {
            Branch::UnitOneEvenK | Branch::UnitOneOddK => CaseTag::UnitOne,
            Branch::FNMinus1OddK => CaseTag::FNMinus1,
            Branch::HalfPowOddKMultiM | Branch::HalfPowEvenKSingleM => CaseTag::HalfPow,
            Branch::SignedHalfPowEvenKMultiM | Branch::SignedHalfPowOddKSingleM => {
                CaseTag::SignedHalfPow
            }
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::UnitOneEvenK => "UNIT_ONE_EVEN_K",
            Branch::UnitOneOddK => "UNIT_ONE_ODD_K",
            Branch::FNMinus1OddK => "F_NMINUS1_ODD_K",
            Branch::HalfPowOddKMultiM => "HALF_POW_ODD_K_MULTI_M",
            Branch::HalfPowEvenKSingleM => "HALF_POW_EVEN_K_SINGLE_M",
            Branch::SignedHalfPowEvenKMultiM => "SIGNED_HALF_POW_EVEN_K_MULTI_M",
            Branch::SignedHalfPowOddKSingleM => "SIGNED_HALF_POW_ODD_K_SINGLE_M",
        }
    }
}

/// Everything [`analyze`] learns about one spec.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub spec: TowerSpec,
    #[serde(with = "crate::dec::big")]
    pub fn_value: BigUint,
    #[serde(with = "crate::dec::int")]
    pub expected_valuation: u64,
    /// F_n^(k+m-1) divides G.
    pub divisibility_ok: bool,
    /// G / F_n^(k+m-1) mod F_n.
    #[serde(with = "crate::dec::big")]
    pub unit_residue: BigUint,
    /// Unit residue is nonzero, i.e. the divisibility is exact. `None` when
    /// F_n = 1 and every power divides.
    pub exact: Option<bool>,
    pub case: CaseTag,
    pub branch: Option<Branch>,
    #[serde(with = "crate::dec::opt_big")]
    pub predicted_residue: Option<BigUint>,
    #[serde(rename = "match")]
    pub matches: Option<bool>,
    pub chain: ChainDigest,
}

impl AnalysisReport {
    /// F_n = 1 (n = 1, 2): every power divides and the unit is meaningless.
    pub fn trivial_base(&self) -> bool {
        self.fn_value.is_one()
    }
}

fn factored_fn(n: u64) -> Result<(BigUint, FactoredNatural)> {
    let f_n = fib(n)?;
    let factored = factorize(&f_n, DEFAULT_RHO_BUDGET)?;
    Ok((f_n, factored))
}

/// G(k,n,m) mod the chain target, walking the chain from its base.
pub fn tower_residue_with_chain(spec: &TowerSpec, chain: &PisanoChain) -> Result<BigUint> {
    let levels = chain.levels();
    if levels.len() as u64 != spec.k {
        return Err(Error::PreconditionViolated(format!(
            "chain depth {} does not match tower height {}",
            levels.len(),
            spec.k
        )));
    }
    let f_n = fib(spec.n)?;
    let n = BigUint::from(spec.n);
    let mut residue = f_n.modpow(&BigUint::from(spec.m), levels[0].modulus.value());
    for pair in levels.windows(2) {
        let index = (&n * &residue) % pair[0].modulus.value();
        residue = fib_mod(&index, pair[1].modulus.value());
    }
    Ok(residue)
}

/// G(k,n,m) mod M.
pub fn tower_residue(spec: &TowerSpec, modulus: &FactoredNatural) -> Result<BigUint> {
    let chain = build_chain(spec.k, modulus)?;
    tower_residue_with_chain(spec, &chain)
}

/// The closed-form prediction for G / F_n^(k+m-1) mod F_n.
pub fn predicted_residue(spec: &TowerSpec) -> Result<(CaseTag, Option<BigUint>)> {
    let Some(branch) = Branch::classify(spec) else {
        return Ok((CaseTag::OutOfRange, None));
    };
    let f_n = fib(spec.n)?;
    let tag = branch.tag();
    let value = match tag {
        CaseTag::UnitOne => BigUint::one() % &f_n,
        CaseTag::FNMinus1 => fib(spec.n - 1)? % &f_n,
        CaseTag::HalfPow | CaseTag::SignedHalfPow => {
            let f_n3 = fib(spec.n - 3)?;
            // 3 | n gives 3 | n-3, hence F_3 = 2 divides F_{n-3}
            if f_n3.is_odd() {
                return Err(Error::PreconditionViolated(format!(
                    "F_{} is odd",
                    spec.n - 3
                )));
            }
            let half = f_n3 >> 1u32;
            let power = half.modpow(&BigUint::from(spec.k - 1), &f_n);
            if tag == CaseTag::SignedHalfPow {
                signed(spec.n, &power, &f_n)
            } else {
                power
            }
        }
        CaseTag::OutOfRange => unreachable!("classified specs are in range"),
    };
    Ok((tag, Some(value)))
}

/// Reduces G modulo F_n^(k+m) and reads off divisibility, the unit residue
/// and whether it agrees with the closed form.
pub fn analyze(spec: &TowerSpec) -> Result<AnalysisReport> {
    let (f_n, f_n_factored) = factored_fn(spec.n)?;
    let expected = spec.expected_valuation();
    let target = f_n_factored.pow((expected + 1) as u32);
    let chain = build_chain(spec.k, &target)?;
    let residue = tower_residue_with_chain(spec, &chain)?;

    // residue = G - q F_n^(k+m), so its quotient by F_n^(k+m-1) agrees with
    // G's modulo F_n. A nonzero remainder here is a genuine counterexample.
    let divisor = f_n.pow(expected as u32);
    let (quotient, rem) = residue.div_rem(&divisor);
    let divisibility_ok = rem.is_zero();
    let unit_residue = quotient % &f_n;
    let exact = (!f_n.is_one()).then(|| divisibility_ok && !unit_residue.is_zero());

    let (case, predicted) = predicted_residue(spec)?;
    let matches = predicted.as_ref().map(|p| *p == unit_residue);
    Ok(AnalysisReport {
        spec: *spec,
        fn_value: f_n,
        expected_valuation: expected,
        divisibility_ok,
        unit_residue,
        exact,
        case,
        branch: Branch::classify(spec),
        predicted_residue: predicted,
        matches,
        chain: chain.digest(),
    })
}

/// Truth of the three parity facts about r = G(k,n,m), k ≥ 2:
/// (i) 2 | r iff 3 | n or 4 | n; (ii) 2 ∤ n, 3 ∤ n ⇒ r ≡ 1 (mod 4);
/// (iii) 3 | n ⇒ r ≡ 0 (mod 8). Clauses with false hypotheses hold vacuously.
pub fn lemma4_check(spec: &TowerSpec) -> Result<(bool, bool, bool)> {
    if spec.k < 2 {
        return Err(Error::PreconditionViolated("parity facts need k >= 2".into()));
    }
    let eight = FactoredNatural::prime_power(BigUint::from(2u32), 3);
    let r = tower_residue(spec, &eight)?;
    let n = spec.n;
    let even = r.is_even();
    let first = even == (n % 3 == 0 || n % 4 == 0);
    let second = !(n % 2 != 0 && n % 3 != 0) || (&r % 4u32) == BigUint::one();
    let third = n % 3 != 0 || r.is_zero();
    Ok((first, second, third))
}

/// (-1)^n x mod F_n, kept canonical.
pub fn signed(n: u64, x: &BigUint, f_n: &BigUint) -> BigUint {
    (sign_residue(n % 2 == 1, f_n) * x) % f_n
}
