//! Prime tables, factorizations and the multiplicative functions used by the
//! counting and density code.
//!
//! Two table types exist. [`PrimeList`] holds only the primes up to a bound and
//! is cheap enough to reach 10^9. [`PrimeTables`] adds a smallest-prime-factor
//! lookup for fast factorization of every integer up to its limit.

use std::env;

use crate::error::{Error, Result};

/// Environment variable capping the bytes any single prime table may allocate.
pub const TABLE_BUDGET_ENV: &str = "THETASET_MAX_TABLE_BYTES";

const DEFAULT_TABLE_BUDGET: u64 = 4 << 30;

const SEGMENT_ODDS: usize = 1 << 18;

/// The configured memory cap for prime tables, in bytes.
pub fn table_budget_bytes() -> u64 {
    env::var(TABLE_BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_TABLE_BUDGET)
}

pub(crate) fn check_budget(what: &str, bytes: u64) -> Result<()> {
    let budget = table_budget_bytes();
    if bytes > budget {
        return Err(Error::Resource(format!(
            "{what} needs about {bytes} bytes, budget is {budget} ({TABLE_BUDGET_ENV})"
        )));
    }
    Ok(())
}

/// Upper estimate of π(limit), used only for allocation sizing.
pub(crate) fn prime_count_upper(limit: u64) -> u64 {
    if limit < 17 {
        return limit;
    }
    let l = limit as f64;
    (1.26 * l / l.ln()) as u64 + 1
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Integer square root, rounded down.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

/// Ascending list of every prime up to `limit`.
#[derive(Clone, Debug)]
pub struct PrimeList {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeList {
    pub fn new(limit: u64) -> Result<Self> {
        let bytes = 8 * prime_count_upper(limit) + SEGMENT_ODDS as u64;
        check_budget("prime list", bytes)?;
        Ok(PrimeList {
            limit,
            primes: sieve_primes(limit),
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Whether `p` is prime. Only meaningful for `p <= limit`.
    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    /// Index of the first prime strictly greater than `v`.
    pub fn index_after(&self, v: u64) -> usize {
        self.primes.partition_point(|&p| p <= v)
    }
}

/// Segmented sieve over odd numbers.
fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut primes = Vec::with_capacity(prime_count_upper(limit) as usize);
    primes.push(2);
    if limit < 3 {
        return primes;
    }

    let root = isqrt(limit);
    let base: Vec<u64> = {
        let mut composite = vec![false; root as usize + 1];
        let mut out = Vec::new();
        for i in 3..=root as usize {
            if i % 2 == 1 && !composite[i] {
                out.push(i as u64);
                let mut j = i * i;
                while j <= root as usize {
                    composite[j] = true;
                    j += 2 * i;
                }
            }
        }
        out
    };
    // index i stands for the odd number 2i + 1
    let last_index = (limit - 1) / 2;
    let mut next: Vec<u64> = base.iter().map(|&p| (p * p - 1) / 2).collect();
    let mut flags = vec![false; SEGMENT_ODDS];
    let mut lo = 1u64;
    while lo <= last_index {
        let hi = (lo + SEGMENT_ODDS as u64).min(last_index + 1);
        let span = (hi - lo) as usize;
        flags[..span].iter_mut().for_each(|f| *f = false);
        for (k, &p) in base.iter().enumerate() {
            let mut j = next[k];
            while j < hi {
                flags[(j - lo) as usize] = true;
                j += p;
            }
            next[k] = j;
        }
        for (off, &composite) in flags[..span].iter().enumerate() {
            if !composite {
                primes.push(2 * (lo + off as u64) + 1);
            }
        }
        lo = hi;
    }
    primes
}

/// Smallest-prime-factor table plus the primes up to `limit`.
#[derive(Clone, Debug)]
pub struct PrimeTables {
    spf: Vec<u32>,
    list: PrimeList,
}

impl PrimeTables {
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Domain {
                what: "prime table limit",
                value: limit,
            });
        }
        if limit > u32::MAX as u64 {
            return Err(Error::Resource(format!(
                "spf table limit {limit} exceeds 32-bit storage"
            )));
        }
        check_budget(
            "spf table",
            4 * (limit + 1) + 8 * prime_count_upper(limit),
        )?;

        // linear sieve
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u64> = Vec::with_capacity(prime_count_upper(limit) as usize);
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u64);
            }
            let si = spf[i] as u64;
            for &p in &primes {
                if p > si {
                    break;
                }
                let m = i as u64 * p;
                if m > limit {
                    break;
                }
                spf[m as usize] = p as u32;
            }
        }
        Ok(PrimeTables {
            spf,
            list: PrimeList { limit, primes },
        })
    }

    pub fn limit(&self) -> u64 {
        self.list.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.list.primes
    }

    pub fn prime_list(&self) -> &PrimeList {
        &self.list
    }

    /// Smallest prime factor of `n`, for `2 <= n <= limit`.
    pub fn spf(&self, n: u64) -> Result<u64> {
        if n < 2 || n > self.limit() {
            return Err(Error::Domain {
                what: "spf",
                value: n,
            });
        }
        Ok(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        if n < 2 {
            return Ok(false);
        }
        if n <= self.limit() {
            return Ok(self.spf[n as usize] as u64 == n);
        }
        Ok(self.factorize(n)?.factors() == [(n, 1)])
    }

    /// Factorizes `n`. Values above the table are reduced by trial division
    /// with the stored primes, which works up to `limit^2`.
    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return Err(Error::Domain {
                what: "factorize",
                value: 0,
            });
        }
        let limit = self.limit();
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut rest = n;
        let push = |p: u64, factors: &mut Vec<(u64, u32)>| match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        };

        if rest > limit {
            let mut idx = 0;
            let primes = self.primes();
            while rest > limit {
                let Some(&p) = primes.get(idx) else {
                    // no factor <= limit remains
                    if (limit as u128 + 1).pow(2) > rest as u128 {
                        push(rest, &mut factors);
                        rest = 1;
                        break;
                    }
                    return Err(Error::Domain {
                        what: "factorize (beyond table range)",
                        value: n,
                    });
                };
                if p * p > rest {
                    // rest has no factor up to its square root
                    push(rest, &mut factors);
                    rest = 1;
                    break;
                }
                while rest % p == 0 {
                    rest /= p;
                    push(p, &mut factors);
                }
                idx += 1;
            }
        }
        while rest > 1 {
            let p = self.spf[rest as usize] as u64;
            rest /= p;
            push(p, &mut factors);
        }
        Ok(Factorization { n, factors })
    }
}

/// Prime factorization with primes in strictly increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Default for Factorization {
    fn default() -> Self {
        Self::one()
    }
}

impl Factorization {
    pub fn one() -> Self {
        Factorization {
            n: 1,
            factors: Vec::new(),
        }
    }

    /// Builds a factorization from `(prime, exponent)` pairs. Primality of the
    /// bases is trusted; ordering, exponents and the product are checked.
    pub fn from_factors(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut n: u64 = 1;
        let mut prev = 1;
        for &(p, e) in &factors {
            if p <= prev || e == 0 {
                return Err(Error::precondition(
                    "factors must have strictly increasing primes and positive exponents",
                ));
            }
            prev = p;
            let pe = p.checked_pow(e).ok_or(Error::Overflow("factorization product"))?;
            n = n.checked_mul(pe).ok_or(Error::Overflow("factorization product"))?;
        }
        Ok(Factorization { n, factors })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Largest prime factor; 1 for n = 1.
    pub fn pplus(&self) -> u64 {
        self.factors.last().map_or(1, |&(p, _)| p)
    }

    /// Smallest prime factor; `None` (standing for +∞) for n = 1.
    pub fn pminus(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Sum of divisors, computed in 128-bit and rejected if it exceeds `u64`.
    pub fn sigma(&self) -> Result<u64> {
        let mut total: u128 = 1;
        for &(p, e) in &self.factors {
            total = total
                .checked_mul(prime_power_sigma(p, e)?)
                .ok_or(Error::Overflow("sigma"))?;
        }
        u64::try_from(total).map_err(|_| Error::Overflow("sigma"))
    }

    pub fn mobius(&self) -> i8 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn euler_phi(&self) -> u64 {
        self.factors
            .iter()
            .fold(1, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
    }

    /// All divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// The factorization of `n * p` for a prime `p` of any size.
    pub fn times_prime(&self, p: u64) -> Result<Factorization> {
        let mut out = self.clone();
        out.multiply_prime(p)?;
        Ok(out)
    }

    /// The factorization of the product of `self` and `other`.
    pub fn mul(&self, other: &Factorization) -> Result<Factorization> {
        let n = self
            .n
            .checked_mul(other.n)
            .ok_or(Error::Overflow("factorization product"))?;
        let (a, b) = (&self.factors, &other.factors);
        let mut factors = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(&(p, e)), Some(&(q, f))) if p == q => {
                    factors.push((p, e + f));
                    i += 1;
                    j += 1;
                }
                (Some(&(p, e)), Some(&(q, _))) if p < q => {
                    factors.push((p, e));
                    i += 1;
                }
                (Some(&x), None) => {
                    factors.push(x);
                    i += 1;
                }
                (_, Some(&y)) => {
                    factors.push(y);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Ok(Factorization { n, factors })
    }

    pub(crate) fn multiply_prime(&mut self, p: u64) -> Result<()> {
        self.n = self
            .n
            .checked_mul(p)
            .ok_or(Error::Overflow("factorization product"))?;
        match self.factors.binary_search_by_key(&p, |&(q, _)| q) {
            Ok(i) => self.factors[i].1 += 1,
            Err(i) => self.factors.insert(i, (p, 1)),
        }
        Ok(())
    }

    /// Divides by the largest prime once. Caller guarantees n > 1.
    pub(crate) fn divide_largest(&mut self) {
        let last = self.factors.last_mut().expect("n > 1");
        self.n /= last.0;
        last.1 -= 1;
        if last.1 == 0 {
            self.factors.pop();
        }
    }
}

/// σ(p^e) = 1 + p + ... + p^e.
pub(crate) fn prime_power_sigma(p: u64, e: u32) -> Result<u128> {
    let mut term: u128 = 1;
    let mut sum: u128 = 1;
    for _ in 0..e {
        term = term
            .checked_mul(p as u128)
            .ok_or(Error::Overflow("sigma"))?;
        sum = sum.checked_add(term).ok_or(Error::Overflow("sigma"))?;
    }
    Ok(sum)
}

/// Factorization by plain trial division; intended for moduli and other
/// small arguments that do not warrant a table.
pub fn trial_factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain {
            what: "factorize",
            value: 0,
        });
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut d = 2u64;
    while d.saturating_mul(d) <= rest {
        if rest % d == 0 {
            let mut e = 0;
            while rest % d == 0 {
                rest /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

pub fn mobius(m: u64) -> Result<i8> {
    Ok(trial_factorize(m)?.mobius())
}

pub fn euler_phi(q: u64) -> Result<u64> {
    Ok(trial_factorize(q)?.euler_phi())
}

/// Ψ(x, y): the number of n <= x whose prime factors are all <= y
/// (n = 1 included).
pub fn smooth_count(x: u64, y: u64) -> Result<u64> {
    if x == 0 {
        return Ok(0);
    }
    if y >= x {
        return Ok(x);
    }
    let list = PrimeList::new(y)?;
    Ok(psi_rec(x, list.primes()))
}

// Ψ(x, p_k) = 1 + Σ_{p_i <= min(x, p_k)} Ψ(x/p_i, p_i), where `primes` is
// every prime <= p_k.
fn psi_rec(x: u64, primes: &[u64]) -> u64 {
    match primes.last() {
        _ if x <= 1 => x,
        None => 1,
        Some(&p) if p >= x => x,
        Some(_) => {
            1 + primes
                .iter()
                .take_while(|&&q| q <= x)
                .enumerate()
                .map(|(i, &q)| psi_rec(x / q, &primes[..=i]))
                .sum::<u64>()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_to_ten() {
        let t = PrimeTables::new(10).unwrap();
        assert_eq!(t.primes(), &[2, 3, 5, 7]);
        assert_eq!(t.spf(9).unwrap(), 3);
        assert!(t.spf(1).is_err());
        assert!(t.spf(11).is_err());
    }

    #[test]
    fn segmented_sieve_matches_linear_sieve() {
        let t = PrimeTables::new(2_000_000).unwrap();
        let l = PrimeList::new(2_000_000).unwrap();
        assert_eq!(t.primes(), l.primes());
        for limit in [0, 1, 2, 3, 4, 9, 25, 26, 1_000] {
            let small = PrimeList::new(limit).unwrap();
            let want: Vec<u64> = (2..=limit).filter(|&n| (2..n).all(|d| n % d != 0)).collect();
            assert_eq!(small.primes(), want.as_slice(), "limit {limit}");
        }
    }

    #[test]
    fn factorize_examples() {
        let t = PrimeTables::new(100).unwrap();
        assert!(t.factorize(1).unwrap().factors().is_empty());
        assert_eq!(t.factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(t.factorize(97).unwrap().factors(), &[(97, 1)]);
        // above the table, by trial division
        assert_eq!(t.factorize(9_797).unwrap().factors(), &[(97, 1), (101, 1)]);
        assert_eq!(t.factorize(8_192).unwrap().factors(), &[(2, 13)]);
        assert_eq!(t.factorize(10_007).unwrap().factors(), &[(10_007, 1)]);
        assert!(t.factorize(0).is_err());
        assert!(t.factorize(103 * 107).is_err());
    }

    #[test]
    fn factorize_reconstructs_every_n() {
        let t = PrimeTables::new(100_000).unwrap();
        for n in 1..=100_000u64 {
            let f = t.factorize(n).unwrap();
            let prod: u64 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            assert_eq!(f.n() == 1, f.factors().is_empty());
        }
    }

    #[test]
    fn multiplicative_functions_match_naive_scan() {
        let naive_prime = |p: u64| p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
        let t = PrimeTables::new(10_000).unwrap();
        for n in 1..=10_000u64 {
            let f = t.factorize(n).unwrap();
            let divs: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            assert_eq!(f.sigma().unwrap(), divs.iter().sum::<u64>());
            assert_eq!(f.divisors(), divs);
            let distinct = divs.iter().filter(|&&d| naive_prime(d)).count();
            assert_eq!(f.omega(), distinct);
            assert_eq!(
                f.euler_phi(),
                (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
            );
            let squarefree = divs.iter().all(|&d| d == 1 || n % (d * d) != 0);
            let expected_mu = match (squarefree, distinct % 2) {
                (false, _) => 0,
                (true, 0) => 1,
                (true, _) => -1,
            };
            assert_eq!(f.mobius(), expected_mu, "n = {n}");
        }
    }

    #[test]
    fn small_values() {
        let t = PrimeTables::new(100).unwrap();
        let f = |n| t.factorize(n).unwrap();
        assert_eq!(f(1).sigma().unwrap(), 1);
        assert_eq!(f(4).sigma().unwrap(), 7);
        assert_eq!(f(12).sigma().unwrap(), 28);
        assert_eq!((f(12).omega(), f(12).pplus()), (2, 3));
        assert_eq!((f(1).omega(), f(1).pplus()), (0, 1));
        assert_eq!((f(30).omega(), f(30).pplus()), (3, 5));
        assert_eq!(f(1).pminus(), None);
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(euler_phi(12).unwrap(), 4);
        assert_eq!(euler_phi(1).unwrap(), 1);
    }

    #[test]
    fn sigma_overflow_is_detected() {
        let f = Factorization::from_factors(vec![(2, 62), (3, 1)]).unwrap();
        assert_eq!(f.sigma(), Err(Error::Overflow("sigma")));
        let f = Factorization::from_factors(vec![(2, 63)]).unwrap();
        assert_eq!(f.sigma().unwrap(), u64::MAX);
    }

    #[test]
    fn merge_and_insert() {
        let a = trial_factorize(12).unwrap();
        let b = trial_factorize(45).unwrap();
        assert_eq!(a.mul(&b).unwrap(), trial_factorize(540).unwrap());
        assert_eq!(b.times_prime(2).unwrap(), trial_factorize(90).unwrap());
        assert_eq!(b.times_prime(5).unwrap(), trial_factorize(225).unwrap());
        let mut c = trial_factorize(18).unwrap();
        c.divide_largest();
        assert_eq!(c, trial_factorize(6).unwrap());
        c.divide_largest();
        assert_eq!(c, trial_factorize(2).unwrap());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(smooth_count(25, 5).unwrap(), 16);
        assert_eq!(smooth_count(10, 1).unwrap(), 1);
        assert_eq!(smooth_count(10, 2).unwrap(), 4);
        assert_eq!(smooth_count(10, 10).unwrap(), 10);
        assert_eq!(smooth_count(0, 10).unwrap(), 0);
    }

    #[test]
    fn psi_matches_scan() {
        let t = PrimeTables::new(3_000).unwrap();
        for y in [1, 2, 3, 4, 7, 10, 31, 100, 2_999] {
            let mut count = 0;
            for x in 1..=3_000u64 {
                if t.factorize(x).unwrap().pplus() <= y {
                    count += 1;
                }
                if x % 97 == 0 || x < 50 {
                    assert_eq!(smooth_count(x, y).unwrap(), count, "x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn budget_guard() {
        assert!(check_budget("x", 10).is_ok());
        assert!(matches!(
            check_budget("x", u64::MAX),
            Err(Error::Resource(_))
        ));
    }
}
