//! Threshold functions θ and their exact evaluation.
//!
//! A [`ThetaSpec`] names one of the classical choices of θ (prime powers,
//! almost primes, smooth, t-dense and practical numbers) or the q-lift θ_q of
//! a monotone base. Evaluation returns an [`ExtendedBound`], an exact rational
//! or +∞, so that the boundary case `p == θ(n)` is never lost to rounding.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::arith::{gcd, trial_factorize, Factorization};
use crate::error::{Error, Result};

/// A value of θ: a non-negative rational `num / den`, or +∞.
#[derive(Clone, Copy, Debug)]
pub enum ExtendedBound {
    Finite { num: u128, den: u64 },
    Infinite,
}

impl ExtendedBound {
    pub fn integer(v: u128) -> Self {
        ExtendedBound::Finite { num: v, den: 1 }
    }

    /// True iff `p <= self`.
    #[inline]
    pub fn admits(&self, p: u64) -> bool {
        match *self {
            ExtendedBound::Infinite => true,
            ExtendedBound::Finite { num, den } => (p as u128) * (den as u128) <= num,
        }
    }

    /// ⌊self⌋, or `None` for +∞.
    pub fn floor(&self) -> Option<u128> {
        match *self {
            ExtendedBound::Infinite => None,
            ExtendedBound::Finite { num, den } => Some(num / den as u128),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedBound::Infinite)
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            ExtendedBound::Infinite => f64::INFINITY,
            ExtendedBound::Finite { num, den } => num as f64 / den as f64,
        }
    }
}

impl Ord for ExtendedBound {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedBound::*;
        match (*self, *other) {
            (Infinite, Infinite) => Ordering::Equal,
            (Infinite, _) => Ordering::Greater,
            (_, Infinite) => Ordering::Less,
            (Finite { num: a, den: b }, Finite { num: c, den: d }) => {
                let (b, d) = (b as u128, d as u128);
                // compare integer parts, then fractional parts; avoids overflow
                match (a / b).cmp(&(c / d)) {
                    Ordering::Equal => ((a % b) * d).cmp(&((c % d) * b)),
                    o => o,
                }
            }
        }
    }
}

impl PartialOrd for ExtendedBound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for ExtendedBound {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtendedBound {}

impl fmt::Display for ExtendedBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ExtendedBound::Infinite => f.write_str("inf"),
            ExtendedBound::Finite { num, den: 1 } => write!(f, "{num}"),
            ExtendedBound::Finite { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

/// The density parameter t = num/den of t-dense integers, kept reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DenseRatio {
    num: u64,
    den: u64,
}

impl DenseRatio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::precondition("dense ratio denominator must be positive"));
        }
        let g = gcd(num, den);
        let (num, den) = (num / g, den / g);
        if num < 2 * den {
            return Err(Error::precondition(format!(
                "dense ratio {num}/{den} must be at least 2"
            )));
        }
        Ok(DenseRatio { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// θ lifted by a modulus q. Only [`lift_q`] builds these.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lift {
    base: Box<ThetaSpec>,
    q: u64,
    q_primes: Vec<u64>,
}

impl Lift {
    pub fn base(&self) -> &ThetaSpec {
        &self.base
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Prime factors of q in nondecreasing order, with multiplicity.
    pub fn q_primes(&self) -> &[u64] {
        &self.q_primes
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ThetaSpec {
    /// θ(1) = ∞, θ(n) = P+(n).
    PrimePowers,
    /// θ(n) = ∞ while ω(n) < k, then P+(n).
    AlmostPrime { k: u32 },
    /// θ(n) = max(y, P+(n)).
    Smooth { y: u64 },
    /// θ(n) = t·n.
    Dense(DenseRatio),
    /// θ(n) = σ(n) + 1.
    Practical,
    Lifted(Lift),
}

impl ThetaSpec {
    pub fn dense(num: u64, den: u64) -> Result<Self> {
        Ok(ThetaSpec::Dense(DenseRatio::new(num, den)?))
    }

    pub fn smooth(y: u64) -> Result<Self> {
        if y < 2 {
            return Err(Error::precondition("smooth bound y must be at least 2"));
        }
        Ok(ThetaSpec::Smooth { y })
    }

    pub fn almost_prime(k: u32) -> Result<Self> {
        if k < 1 {
            return Err(Error::precondition("almost-prime k must be at least 1"));
        }
        Ok(ThetaSpec::AlmostPrime { k })
    }

    /// Whether θ(n) <= θ(mn) for all n, m.
    pub fn is_monotone(&self) -> bool {
        match self {
            ThetaSpec::Dense(_) | ThetaSpec::Practical | ThetaSpec::Smooth { .. } => true,
            ThetaSpec::PrimePowers | ThetaSpec::AlmostPrime { .. } => false,
            ThetaSpec::Lifted(l) => l.base.is_monotone(),
        }
    }

    /// Whether n <= θ(n) holds, which together with monotonicity is what the
    /// density series and the progression classifier need.
    pub fn dominates_identity(&self) -> bool {
        match self {
            ThetaSpec::Dense(_) | ThetaSpec::Practical => true,
            ThetaSpec::Lifted(l) => l.base.dominates_identity(),
            _ => false,
        }
    }

    pub fn lift(&self, q: u64) -> Result<ThetaSpec> {
        lift_q(self, q)
    }

    /// The unlifted spec underneath, or `self`.
    pub fn root(&self) -> &ThetaSpec {
        match self {
            ThetaSpec::Lifted(l) => &l.base,
            s => s,
        }
    }

    pub fn eval(&self, f: &Factorization) -> Result<ExtendedBound> {
        theta_eval(self, f)
    }

    pub fn prime_fits(&self, f: &Factorization, p: u64) -> Result<bool> {
        prime_fits(self, f, p)
    }
}

/// θ(n) for the factorized `n`.
pub fn theta_eval(spec: &ThetaSpec, f: &Factorization) -> Result<ExtendedBound> {
    Ok(match spec {
        ThetaSpec::PrimePowers => {
            if f.n() == 1 {
                ExtendedBound::Infinite
            } else {
                ExtendedBound::integer(f.pplus() as u128)
            }
        }
        ThetaSpec::AlmostPrime { k } => {
            if f.omega() < *k as usize {
                ExtendedBound::Infinite
            } else {
                ExtendedBound::integer(f.pplus() as u128)
            }
        }
        ThetaSpec::Smooth { y } => ExtendedBound::integer((*y).max(f.pplus()) as u128),
        ThetaSpec::Dense(t) => ExtendedBound::Finite {
            num: (t.num as u128)
                .checked_mul(f.n() as u128)
                .ok_or(Error::Overflow("t*n"))?,
            den: t.den,
        },
        ThetaSpec::Practical => ExtendedBound::integer(f.sigma()? as u128 + 1),
        ThetaSpec::Lifted(lift) => return lifted_eval(lift, f),
    })
}

// θ_q(n) = θ(n q_1 ... q_j), j maximal with q_i <= θ(n q_1 ... q_{i-1}).
fn lifted_eval(lift: &Lift, f: &Factorization) -> Result<ExtendedBound> {
    let base = &*lift.base;
    let mut value = theta_eval(base, f)?;
    let mut absorbed: Option<Factorization> = None;
    for &qi in &lift.q_primes {
        if !value.admits(qi) {
            break;
        }
        let next = absorbed.as_ref().unwrap_or(f).times_prime(qi)?;
        value = theta_eval(base, &next)?;
        absorbed = Some(next);
    }
    Ok(value)
}

/// Exact test `p <= θ(n)`.
pub fn prime_fits(spec: &ThetaSpec, f: &Factorization, p: u64) -> Result<bool> {
    Ok(theta_eval(spec, f)?.admits(p))
}

/// Builds θ_q from a monotone, unlifted base.
pub fn lift_q(spec: &ThetaSpec, q: u64) -> Result<ThetaSpec> {
    if q < 2 {
        return Err(Error::precondition("lift modulus q must be at least 2"));
    }
    if matches!(spec, ThetaSpec::Lifted(_)) {
        return Err(Error::precondition(
            "cannot lift an already lifted theta; multiply the moduli instead",
        ));
    }
    if !spec.is_monotone() {
        return Err(Error::precondition(format!(
            "theta `{spec}` is not monotone, so theta_q is undefined"
        )));
    }
    let q_primes = trial_factorize(q)?
        .factors()
        .iter()
        .flat_map(|&(p, e)| std::iter::repeat_n(p, e as usize))
        .collect();
    Ok(ThetaSpec::Lifted(Lift {
        base: Box::new(spec.clone()),
        q,
        q_primes,
    }))
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaSpec::PrimePowers => f.write_str("prime-powers"),
            ThetaSpec::AlmostPrime { k } => write!(f, "almost-prime:{k}"),
            ThetaSpec::Smooth { y } => write!(f, "smooth:{y}"),
            ThetaSpec::Dense(t) if t.den == 1 => write!(f, "dense:{}", t.num),
            ThetaSpec::Dense(t) => write!(f, "dense:{}/{}", t.num, t.den),
            ThetaSpec::Practical => f.write_str("practical"),
            ThetaSpec::Lifted(l) => write!(f, "{}@q={}", l.base, l.q),
        }
    }
}

impl FromStr for ThetaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let num = |v: &str| -> Result<u64> {
            v.trim()
                .parse::<u64>()
                .map_err(|_| bad(&format!("`{v}` is not a natural number")))
        };
        let (name, arg) = match s.trim().split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s.trim(), None),
        };
        let spec = match (name, arg) {
            ("practical", None) => ThetaSpec::Practical,
            ("prime-powers", None) => ThetaSpec::PrimePowers,
            ("dense", Some(a)) => {
                let (u, v) = match a.split_once('/') {
                    Some((u, v)) => (num(u)?, num(v)?),
                    None => (num(a)?, 1),
                };
                ThetaSpec::dense(u, v)
            }
            .map_err(|e| bad(&e.to_string()))?,
            ("smooth", Some(a)) => ThetaSpec::smooth(num(a)?).map_err(|e| bad(&e.to_string()))?,
            ("almost-prime", Some(a)) => {
                let k = u32::try_from(num(a)?).map_err(|_| bad("k too large"))?;
                ThetaSpec::almost_prime(k).map_err(|e| bad(&e.to_string()))?
            }
            ("practical" | "prime-powers", Some(_)) => return Err(bad("takes no argument")),
            ("dense" | "smooth" | "almost-prime", None) => {
                return Err(bad("missing `:<argument>`"))
            }
            _ => {
                return Err(bad(
                    "expected practical | dense:<u>[/<v>] | smooth:<y> | almost-prime:<k> | prime-powers",
                ))
            }
        };
        Ok(spec)
    }
}
