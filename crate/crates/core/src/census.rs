//! Counting members of `B_θ(x)` by residue class, divisibility and gcd with a
//! modulus, plus the exact identities relating those counts.
//!
//! The free functions stream over one enumeration per call. [`MemberSet`]
//! materializes `B_θ(x)` once for callers that ask many questions about the
//! same set.

use serde::Serialize;

use crate::arith::{gcd, trial_factorize};
use crate::error::{Error, Result};
use crate::genset::{enumerate, Member};
use crate::theta::{lift_q, ThetaSpec};
use crate::workbench::Workbench;

/// Counts of members of `B_θ(x)` in each residue class modulo q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueHistogram {
    pub x: u64,
    pub q: u64,
    pub counts: Vec<u64>,
}

impl ResidueHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn class(&self, a: i64) -> u64 {
        self.counts[normalize_residue(a, self.q) as usize]
    }

    /// Members sharing gcd exactly `d` with q.
    pub fn gcd_class(&self, d: u64) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .filter(|&(a, _)| gcd(a as u64, self.q) == d)
            .map(|(_, &c)| c)
            .sum()
    }
}

/// Outcome of `B_{θ_q}(x/q) − R(x,q) ≤ B_{θ,q}(x) ≤ B_{θ_q}(x/q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub x: u64,
    pub q: u64,
    pub lower: i64,
    pub mid: u64,
    pub upper: u64,
    /// R(x, q), the slack between the two bounds.
    pub remainder: u64,
    pub pass: bool,
}

/// `a mod q` in `[0, q)`.
pub fn normalize_residue(a: i64, q: u64) -> u64 {
    (a as i128).rem_euclid(q as i128) as u64
}

fn require_modulus(q: u64) -> Result<()> {
    if q == 0 {
        return Err(Error::precondition("modulus q must be at least 1"));
    }
    Ok(())
}

fn require_divisor(q: u64, d: u64) -> Result<()> {
    require_modulus(q)?;
    if d == 0 || q % d != 0 {
        return Err(Error::precondition(format!("{d} does not divide {q}")));
    }
    Ok(())
}

fn tally<T, I, V>(bench: &Workbench, spec: &ThetaSpec, x: u64, init: I, visit: V) -> Result<Vec<T>>
where
    T: Send,
    I: Fn() -> T + Sync,
    V: Fn(&mut T, &Member) + Sync,
{
    let primes = bench.primes_for(spec, x)?;
    enumerate(spec, x, &primes)?.fold(bench, init, visit)
}

fn tally_where(bench: &Workbench, spec: &ThetaSpec, x: u64, keep: impl Fn(u64) -> bool + Sync) -> Result<u64> {
    Ok(tally(bench, spec, x, || 0u64, |c, m| {
        if keep(m.n()) {
            *c += 1
        }
    })?
    .into_iter()
    .sum())
}

/// B(x). B(0) = 0.
pub fn count(bench: &Workbench, spec: &ThetaSpec, x: u64) -> Result<u64> {
    tally_where(bench, spec, x, |_| true)
}

/// B(x, q, a); `a` may be negative and is reduced mod q.
pub fn count_class(bench: &Workbench, spec: &ThetaSpec, x: u64, q: u64, a: i64) -> Result<u64> {
    require_modulus(q)?;
    let a = normalize_residue(a, q);
    tally_where(bench, spec, x, |n| n % q == a)
}

/// B_q(x), the members divisible by q.
pub fn count_multiples(bench: &Workbench, spec: &ThetaSpec, x: u64, q: u64) -> Result<u64> {
    require_modulus(q)?;
    tally_where(bench, spec, x, |n| n % q == 0)
}

/// Members n with gcd(n, q) = d.
pub fn count_gcd_class(bench: &Workbench, spec: &ThetaSpec, x: u64, q: u64, d: u64) -> Result<u64> {
    require_divisor(q, d)?;
    tally_where(bench, spec, x, |n| gcd(n, q) == d)
}

/// `(μ(m), d·m)` for each squarefree divisor m of q/d.
fn mobius_terms(q: u64, d: u64) -> Result<Vec<(i64, u64)>> {
    let f = trial_factorize(q / d)?;
    Ok(f.divisors()
        .into_iter()
        .filter_map(|m| {
            let mu = trial_factorize(m).ok()?.mobius();
            (mu != 0).then_some((mu as i64, d * m))
        })
        .collect())
}

/// Σ_{m | q/d} μ(m) B_{dm}(x), which equals [`count_gcd_class`].
pub fn mobius_rhs(bench: &Workbench, spec: &ThetaSpec, x: u64, q: u64, d: u64) -> Result<i64> {
    require_divisor(q, d)?;
    let terms = mobius_terms(q, d)?;
    let counts = tally(bench, spec, x, || vec![0u64; terms.len()], |acc, m| {
        let n = m.n();
        for (slot, &(_, dm)) in acc.iter_mut().zip(&terms) {
            if n % dm == 0 {
                *slot += 1;
            }
        }
    })?;
    let mut total = 0i64;
    for part in counts {
        for (c, &(mu, _)) in part.iter().zip(&terms) {
            total += mu * *c as i64;
        }
    }
    Ok(total)
}

/// All q residue-class counts from a single enumeration pass.
pub fn histogram(bench: &Workbench, spec: &ThetaSpec, x: u64, q: u64) -> Result<ResidueHistogram> {
    require_modulus(q)?;
    let parts = tally(bench, spec, x, || vec![0u64; q as usize], |acc, m| {
        acc[(m.n() % q) as usize] += 1
    })?;
    let mut counts = vec![0u64; q as usize];
    for part in parts {
        for (c, p) in counts.iter_mut().zip(part) {
            *c += p;
        }
    }
    Ok(ResidueHistogram { x, q, counts })
}

/// B_q(x) / B(x).
pub fn r_empirical(bench: &Workbench, spec: &ThetaSpec, x: u64, q: u64) -> Result<f64> {
    require_modulus(q)?;
    let parts = tally(bench, spec, x, || (0u64, 0u64), |acc, m| {
        acc.0 += 1;
        if m.n() % q == 0 {
            acc.1 += 1;
        }
    })?;
    let (all, mult) = parts
        .into_iter()
        .fold((0, 0), |(a, b), (c, d)| (a + c, b + d));
    if all == 0 {
        return Err(Error::precondition("B(x) is empty"));
    }
    Ok(mult as f64 / all as f64)
}

/// R(x, q) = |{n <= x/q : θ(n) < P+(q)}|, by an exact scan.
pub fn r_count(bench: &Workbench, spec: &ThetaSpec, x: u64, q: u64) -> Result<u64> {
    if q < 2 {
        return Err(Error::precondition("R(x, q) needs q >= 2"));
    }
    let top = x / q;
    if top == 0 {
        return Ok(0);
    }
    let big = trial_factorize(q)?.pplus();
    let tables = bench.tables_up_to(top)?;
    let mut hits = 0;
    for n in 1..=top {
        if !spec.eval(&tables.factorize(n)?)?.admits(big) {
            hits += 1;
        }
    }
    Ok(hits)
}

/// Checks the θ_q sandwich for one (x, q).
pub fn sandwich_check(bench: &Workbench, spec: &ThetaSpec, x: u64, q: u64) -> Result<SandwichReport> {
    let lifted = lift_q(spec, q)?;
    let upper = count(bench, &lifted, x / q)?;
    let mid = count_multiples(bench, spec, x, q)?;
    let remainder = r_count(bench, spec, x, q)?;
    let lower = upper as i64 - remainder as i64;
    Ok(SandwichReport {
        x,
        q,
        lower,
        mid,
        upper,
        remainder,
        pass: lower <= mid as i64 && mid <= upper,
    })
}

/// `B_θ(x)` held in memory, sorted ascending.
#[derive(Clone, Debug)]
pub struct MemberSet {
    x: u64,
    members: Vec<u64>,
}

impl MemberSet {
    pub fn build(bench: &Workbench, spec: &ThetaSpec, x: u64) -> Result<Self> {
        let parts = tally(bench, spec, x, Vec::new, |v: &mut Vec<u64>, m| v.push(m.n()))?;
        let mut members: Vec<u64> = parts.into_iter().flatten().collect();
        members.sort_unstable();
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]), "duplicate member");
        Ok(MemberSet { x, members })
    }

    pub fn from_sorted(x: u64, members: Vec<u64>) -> Self {
        MemberSet { x, members }
    }

    pub fn limit(&self) -> u64 {
        self.x
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn contains(&self, n: u64) -> bool {
        self.members.binary_search(&n).is_ok()
    }

    pub fn count(&self) -> u64 {
        self.members.len() as u64
    }

    /// B(y) for y <= x.
    pub fn count_upto(&self, y: u64) -> u64 {
        self.members.partition_point(|&n| n <= y) as u64
    }

    fn count_if(&self, keep: impl Fn(u64) -> bool) -> u64 {
        self.members.iter().filter(|&&n| keep(n)).count() as u64
    }

    pub fn count_class(&self, q: u64, a: i64) -> Result<u64> {
        require_modulus(q)?;
        let a = normalize_residue(a, q);
        Ok(self.count_if(|n| n % q == a))
    }

    pub fn count_multiples(&self, q: u64) -> Result<u64> {
        require_modulus(q)?;
        Ok(self.count_if(|n| n % q == 0))
    }

    pub fn count_gcd_class(&self, q: u64, d: u64) -> Result<u64> {
        require_divisor(q, d)?;
        Ok(self.count_if(|n| gcd(n, q) == d))
    }

    pub fn mobius_rhs(&self, q: u64, d: u64) -> Result<i64> {
        require_divisor(q, d)?;
        let mut total = 0;
        for (mu, dm) in mobius_terms(q, d)? {
            total += mu * self.count_multiples(dm)? as i64;
        }
        Ok(total)
    }

    pub fn histogram(&self, q: u64) -> Result<ResidueHistogram> {
        require_modulus(q)?;
        let mut counts = vec![0u64; q as usize];
        for &n in &self.members {
            counts[(n % q) as usize] += 1;
        }
        Ok(ResidueHistogram { x: self.x, q, counts })
    }
}
