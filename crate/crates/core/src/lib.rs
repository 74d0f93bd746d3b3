//! Exact F_n-adic structure of the Fibonacci tower G(k,n,m).
//!
//! * [`fib`]: exact Fibonacci numbers and classical identities.
//! * [`factor`], [`pisano`]: factorization, Pisano periods and period chains.
//! * [`tower`]: modular evaluation of G, valuation and residue classification.
//! * [`lemmas`], [`oracle`]: lemma checkers and exact ground truth.
//! * [`sweep`], [`verify`]: grid reports and property suites.

mod dec;
pub mod error;
pub mod factor;
pub mod fib;
pub mod lemmas;
pub mod oracle;
pub mod pisano;
pub mod sweep;
pub mod tower;
pub mod verify;

pub use error::{Error, Result};
pub use factor::{factorize, FactoredNatural};
pub use oracle::{oracle_eval, oracle_feasible, OracleResult};
pub use pisano::{build_chain, fib_mod, pisano_period, pisano_period_brute, PisanoChain};
pub use sweep::{run_sweep, Grid, Span, SweepReport};
pub use tower::{analyze, predicted_residue, tower_residue, AnalysisReport, CaseTag, TowerSpec};
