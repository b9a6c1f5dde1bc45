//! Integer sets cut out by a bound θ on the size of the next prime factor.
//!
//! An integer `n = p_1^a_1 ··· p_k^a_k` (with `p_1 < ··· < p_k`) belongs to
//! `B_θ` when every `p_i` is at most θ of the product of the earlier prime
//! powers. Different choices of θ give prime powers, almost primes, smooth,
//! t-dense and practical numbers.
//!
//! The crate covers:
//!
//! - [`arith`]: prime tables, factorization, σ, ω, μ, φ, Ψ(x, y)
//! - [`theta`]: θ specs, exact evaluation and the q-lift θ_q
//! - [`genset`]: membership and depth-first enumeration of `B_θ(x)`
//! - [`census`]: residue-class counts, the Möbius identity, the θ_q sandwich
//! - [`density`]: the series for c_θ and the ratios r_q, r_{q,a}
//! - [`laws`]: element-wise checks of the structural claims
//! - [`cli`]: the `thetaset` command line
//!
//! ```
//! use thetaset::{census, ThetaSpec, Workbench};
//!
//! let bench = Workbench::new(1);
//! let practical: ThetaSpec = "practical".parse().unwrap();
//! assert_eq!(census::count(&bench, &practical, 20).unwrap(), 9);
//! ```

pub mod arith;
pub mod census;
pub mod cli;
pub mod density;
pub mod error;
pub mod genset;
pub mod laws;
pub mod theta;
mod workbench;

pub use arith::{Factorization, PrimeList, PrimeTables};
pub use error::{Error, Result};
pub use genset::{enumerate, is_member, Member, MemberStream};
pub use theta::{lift_q, ExtendedBound, ThetaSpec};
pub use workbench::Workbench;
