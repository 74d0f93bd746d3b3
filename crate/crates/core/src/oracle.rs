//! Brute-force ground truth: G(k,n,m) built exactly, level by level.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fib::{fib, fib_with_budget, valuation};
use crate::tower::TowerSpec;

/// Default ceiling on any Fibonacci index the oracle will evaluate.
pub const DEFAULT_ORACLE_MAX_INDEX: u64 = 2_000_000;

/// Exact evaluation of one tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub spec: TowerSpec,
    pub value: BigUint,
    /// Index of the top Fibonacci number; `None` for k = 1.
    pub top_index: Option<u64>,
    /// Exact F_n-adic valuation; `None` when F_n = 1.
    pub valuation: Option<u64>,
    /// (G / F_n^valuation) mod F_n.
    pub unit_residue: BigUint,
    /// (G / F_n^(k+m-1)) mod F_n, or `None` if that power does not divide G.
    pub quotient_residue: Option<BigUint>,
}

/// Walks the index ladder n·G(j). Returns the values of levels 1..=`upto`.
fn ladder(spec: &TowerSpec, upto: u64, max_index: u64) -> Result<Vec<BigUint>> {
    let f_n = fib(spec.n)?;
    let mut values = vec![f_n.pow(spec.m as u32)];
    for level in 2..=upto {
        let prev = values.last().expect("nonempty");
        let index = (prev * spec.n)
            .to_u64()
            .filter(|&i| i <= max_index)
            .ok_or(Error::OracleBudgetExceeded {
                level,
                max: max_index,
            })?;
        values.push(fib_with_budget(index, max_index)?);
    }
    Ok(values)
}

/// Would [`oracle_eval`] stay within `max_index`? Only the levels below
/// the top are built.
pub fn oracle_feasible(spec: &TowerSpec, max_index: u64) -> bool {
    if spec.k == 1 {
        return true;
    }
    let below = match ladder(spec, spec.k - 1, max_index) {
        Ok(v) => v,
        Err(_) => return false,
    };
    match below.last() {
        None => true,
        Some(g) => (g * spec.n) <= BigUint::from(max_index),
    }
}

pub fn oracle_eval(spec: &TowerSpec, max_index: u64) -> Result<OracleResult> {
    let values = ladder(spec, spec.k, max_index)?;
    let top_index = (spec.k >= 2).then(|| {
        (&values[values.len() - 2] * spec.n)
            .to_u64()
            .expect("checked by the ladder")
    });
    let value = values.last().expect("nonempty").clone();
    let f_n = fib(spec.n)?;
    if f_n.is_one() {
        return Ok(OracleResult {
            spec: *spec,
            value,
            top_index,
            valuation: None,
            unit_residue: BigUint::zero(),
            quotient_residue: Some(BigUint::zero()),
        });
    }
    let v = valuation(&f_n, &value)?;
    let unit_residue = (&value / f_n.pow(v as u32)) % &f_n;
    let (q, rem) = value.div_rem(&f_n.pow(spec.expected_valuation() as u32));
    let quotient_residue = rem.is_zero().then(|| q % &f_n);
    Ok(OracleResult {
        spec: *spec,
        value,
        top_index,
        valuation: Some(v),
        unit_residue,
        quotient_residue,
    })
}
