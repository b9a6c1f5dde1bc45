//! Density constants of `B_θ`.
//!
//! Under `n <= θ(n) ≪ σ(n)` and monotone θ, `B(x) ~ c_θ x / log x` with
//!
//! ```text
//! c_θ = 1/(1 − e^{−γ}) Σ_{n∈B} (1/n) (S(θ(n)) − log n) P(θ(n)),
//! S(y) = Σ_{p≤y} log p/(p−1),   P(y) = Π_{p≤y} (1 − 1/p).
//! ```
//!
//! The series is summed over `B(N)` and completed with a tail estimate. The
//! weights `g(n) = P(θ(n))/n` satisfy `Σ_{n∈B} g(n) = 1` exactly (each m ≥ 1
//! splits uniquely as `n·r` with `n ∈ B` and every prime of r above θ(n)),
//! so the missing weight `1 − Σ_{n≤N} g(n)` is known. The tail is that weight
//! times the g-weighted mean of `S(θ(n)) − log n` over `(N/10, N]`.
//!
//! From c_θ: `c_q = c_{θ_q}/q`, `r_q = c_q/c_θ`, and
//! `r_{q,a} = φ(q/d)^{-1} Σ_{m | q/d} μ(m) r_{dm}` with `d = gcd(a, q)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::{check_budget, gcd, prime_count_upper, trial_factorize, PrimeList};
use crate::census::normalize_residue;
use crate::error::{Error, Result};
use crate::genset::enumerate;
use crate::theta::{lift_q, ExtendedBound, ThetaSpec};
use crate::workbench::Workbench;

/// Euler's constant (OEIS A001620).
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// 1 / (1 − e^{−γ}).
pub fn series_scale() -> f64 {
    1.0 / -(-EULER_GAMMA).exp_m1()
}

/// Default truncation point N of the series.
pub const DEFAULT_TRUNCATION: u64 = 1_000_000;

/// Neumaier compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Prefix values of S(y) and P(y) over the primes up to `limit`.
#[derive(Clone, Debug)]
pub struct MertensTables {
    limit: u64,
    primes: Vec<u64>,
    s: Vec<f64>,
    p: Vec<f64>,
}

impl MertensTables {
    pub fn build(limit: u64) -> Result<Self> {
        check_budget("Mertens tables", 24 * prime_count_upper(limit))?;
        let primes = PrimeList::new(limit)?.primes().to_vec();
        let mut s = Vec::with_capacity(primes.len());
        let mut p = Vec::with_capacity(primes.len());
        let mut s_acc = CompensatedSum::default();
        let mut log_p_acc = CompensatedSum::default();
        for &q in &primes {
            let qf = q as f64;
            s_acc.add(qf.ln() / (qf - 1.0));
            log_p_acc.add((-1.0 / qf).ln_1p());
            s.push(s_acc.value());
            p.push(log_p_acc.value().exp());
        }
        Ok(MertensTables { limit, primes, s, p })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn index(&self, y: u64) -> Option<usize> {
        self.primes.partition_point(|&p| p <= y).checked_sub(1)
    }

    /// S(y) = Σ_{p≤y} log p/(p−1). Requires `y <= limit`.
    pub fn s(&self, y: u64) -> f64 {
        debug_assert!(y <= self.limit);
        self.index(y).map_or(0.0, |i| self.s[i])
    }

    /// P(y) = Π_{p≤y} (1 − 1/p). Requires `y <= limit`.
    pub fn p(&self, y: u64) -> f64 {
        debug_assert!(y <= self.limit);
        self.index(y).map_or(1.0, |i| self.p[i])
    }

    /// (S, P) at a θ value, or `None` when it lies beyond the table.
    pub fn at(&self, bound: &ExtendedBound) -> Option<(f64, f64)> {
        let y = bound.floor()?;
        if y > self.limit as u128 {
            return None;
        }
        Some(match self.index(y as u64) {
            None => (0.0, 1.0),
            Some(i) => (self.s[i], self.p[i]),
        })
    }
}

/// A truncated and tail-completed value of c_θ.
#[derive(Clone, Debug, Serialize)]
pub struct DensityEstimate {
    pub spec: String,
    pub truncation: u64,
    /// Partial sum plus tail estimate; this is the reported c_θ.
    pub value: f64,
    /// The plain truncated series over n <= N, scaled by 1/(1 − e^{−γ}).
    pub partial_sum: f64,
    pub tail_estimate: f64,
    /// |contribution of n ∈ (N/10, N]| to the scaled partial sum.
    pub tail_indicator: f64,
    /// 1 − Σ_{n≤N} g(n), the weight not yet summed.
    pub residual_mass: f64,
    pub members: u64,
}

#[derive(Clone, Copy, Default)]
struct SeriesChunk {
    f: CompensatedSum,
    g: CompensatedSum,
    f_window: CompensatedSum,
    g_window: CompensatedSum,
    members: u64,
    beyond_table: Option<u128>,
}

fn require_series_spec(spec: &ThetaSpec) -> Result<()> {
    if !(spec.is_monotone() && spec.dominates_identity()) {
        return Err(Error::precondition(format!(
            "the density series needs a monotone theta with theta(n) >= n; `{spec}` is not"
        )));
    }
    Ok(())
}

/// Largest ⌊θ(n)⌋ over `n ∈ B_θ(N)`, the Mertens table size the series needs.
pub fn required_table_limit(bench: &Workbench, spec: &ThetaSpec, truncation: u64) -> Result<u64> {
    require_series_spec(spec)?;
    let primes = bench.primes_for(spec, truncation)?;
    let parts = enumerate(spec, truncation, &primes)?.fold(bench, || 0u128, |acc, m| {
        *acc = (*acc).max(m.theta().floor().unwrap_or(u128::MAX));
    })?;
    let top = parts.into_iter().max().unwrap_or(2);
    u64::try_from(top).map_err(|_| Error::Overflow("theta bound"))
}

/// Mertens tables large enough for c_θ and every c_q with q <= q_max.
pub fn mertens_for(bench: &Workbench, spec: &ThetaSpec, truncation: u64, q_max: u64) -> Result<MertensTables> {
    let mut limit = required_table_limit(bench, spec, truncation)?;
    for q in 2..=q_max {
        limit = limit.max(required_table_limit(bench, &lift_q(spec, q)?, truncation)?);
    }
    MertensTables::build(limit)
}

/// c_θ from the series truncated at N.
pub fn c_theta(bench: &Workbench, spec: &ThetaSpec, truncation: u64, tables: &MertensTables) -> Result<DensityEstimate> {
    require_series_spec(spec)?;
    if truncation < 10 {
        return Err(Error::precondition("truncation N must be at least 10"));
    }
    let window_start = truncation / 10;
    let primes = bench.primes_for(spec, truncation)?;
    let chunks = enumerate(spec, truncation, &primes)?.fold(bench, SeriesChunk::default, |acc, m| {
        let theta = m.theta();
        let Some((s, p)) = tables.at(&theta) else {
            let y = theta.floor().unwrap_or(u128::MAX);
            acc.beyond_table = Some(acc.beyond_table.map_or(y, |b| b.max(y)));
            return;
        };
        let n = m.n();
        let g = p / n as f64;
        let f = g * (s - (n as f64).ln());
        acc.f.add(f);
        acc.g.add(g);
        if n > window_start {
            acc.f_window.add(f);
            acc.g_window.add(g);
        }
        acc.members += 1;
    })?;

    let mut total = SeriesChunk::default();
    for c in &chunks {
        total.f.merge(&c.f);
        total.g.merge(&c.g);
        total.f_window.merge(&c.f_window);
        total.g_window.merge(&c.g_window);
        total.members += c.members;
        if let Some(y) = c.beyond_table {
            total.beyond_table = Some(total.beyond_table.map_or(y, |b| b.max(y)));
        }
    }
    if let Some(y) = total.beyond_table {
        return Err(Error::Resource(format!(
            "Mertens tables reach {} but theta reaches {y} for {spec} at N = {truncation}",
            tables.limit()
        )));
    }

    let scale = series_scale();
    let g_window = total.g_window.value();
    let mean_weight = if g_window > 0.0 {
        total.f_window.value() / g_window
    } else {
        0.0
    };
    let residual_mass = 1.0 - total.g.value();
    let partial_sum = scale * total.f.value();
    let tail_estimate = scale * mean_weight * residual_mass;
    Ok(DensityEstimate {
        spec: spec.to_string(),
        truncation,
        value: partial_sum + tail_estimate,
        partial_sum,
        tail_estimate,
        tail_indicator: scale * total.f_window.value().abs(),
        residual_mass,
        members: total.members,
    })
}

/// Caches the c_{θ_q} estimates behind r_q and r_{q,a} for one base spec.
pub struct DensitySolver<'a> {
    bench: &'a Workbench,
    spec: ThetaSpec,
    truncation: u64,
    tables: &'a MertensTables,
    cache: BTreeMap<u64, DensityEstimate>,
}

/// One row of the r_q table.
#[derive(Clone, Debug, Serialize)]
pub struct RqRow {
    pub q: u64,
    pub c_q: f64,
    pub r_q: f64,
}

impl<'a> DensitySolver<'a> {
    pub fn new(bench: &'a Workbench, spec: &ThetaSpec, truncation: u64, tables: &'a MertensTables) -> Result<Self> {
        if matches!(spec, ThetaSpec::Lifted(_)) {
            return Err(Error::precondition("the solver lifts the base spec itself"));
        }
        require_series_spec(spec)?;
        Ok(DensitySolver {
            bench,
            spec: spec.clone(),
            truncation,
            tables,
            cache: BTreeMap::new(),
        })
    }

    /// The estimate of c_{θ_q} (q = 1 gives c_θ).
    pub fn estimate(&mut self, q: u64) -> Result<&DensityEstimate> {
        if q == 0 {
            return Err(Error::precondition("modulus q must be at least 1"));
        }
        if !self.cache.contains_key(&q) {
            let spec = if q == 1 { self.spec.clone() } else { lift_q(&self.spec, q)? };
            let est = c_theta(self.bench, &spec, self.truncation, self.tables)?;
            self.cache.insert(q, est);
        }
        Ok(&self.cache[&q])
    }

    pub fn c_theta(&mut self) -> Result<f64> {
        Ok(self.estimate(1)?.value)
    }

    /// c_q = c_{θ_q} / q.
    pub fn c_q(&mut self, q: u64) -> Result<f64> {
        Ok(self.estimate(q)?.value / q as f64)
    }

    /// r_q = c_q / c_θ.
    pub fn r_q(&mut self, q: u64) -> Result<f64> {
        if q == 1 {
            return Ok(1.0);
        }
        Ok(self.c_q(q)? / self.c_theta()?)
    }

    /// r_{q,a} via the Möbius average over divisors of q/gcd(a, q).
    pub fn r_qa(&mut self, q: u64, a: i64) -> Result<f64> {
        if q == 0 {
            return Err(Error::precondition("modulus q must be at least 1"));
        }
        let d = gcd(normalize_residue(a, q), q);
        let reduced = trial_factorize(q / d)?;
        let mut total = CompensatedSum::default();
        for m in reduced.divisors() {
            let mu = trial_factorize(m)?.mobius();
            if mu != 0 {
                total.add(mu as f64 * self.r_q(d * m)?);
            }
        }
        Ok(total.value() / reduced.euler_phi() as f64)
    }

    /// Rows q = 2..=q_max.
    pub fn table(&mut self, q_max: u64) -> Result<Vec<RqRow>> {
        (2..=q_max)
            .map(|q| {
                Ok(RqRow {
                    q,
                    c_q: self.c_q(q)?,
                    r_q: self.r_q(q)?,
                })
            })
            .collect()
    }
}

pub fn c_q(bench: &Workbench, spec: &ThetaSpec, q: u64, truncation: u64, tables: &MertensTables) -> Result<f64> {
    DensitySolver::new(bench, spec, truncation, tables)?.c_q(q)
}

pub fn r_q(bench: &Workbench, spec: &ThetaSpec, q: u64, truncation: u64, tables: &MertensTables) -> Result<f64> {
    DensitySolver::new(bench, spec, truncation, tables)?.r_q(q)
}

pub fn r_qa(bench: &Workbench, spec: &ThetaSpec, q: u64, a: i64, truncation: u64, tables: &MertensTables) -> Result<f64> {
    DensitySolver::new(bench, spec, truncation, tables)?.r_qa(q, a)
}

pub fn table_rq(bench: &Workbench, spec: &ThetaSpec, q_max: u64, truncation: u64, tables: &MertensTables) -> Result<Vec<RqRow>> {
    DensitySolver::new(bench, spec, truncation, tables)?.table(q_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mertens_small_values() {
        let t = MertensTables::build(100).unwrap();
        assert!((t.s(2) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(t.p(2), 0.5);
        assert!((t.p(3) - 1.0 / 3.0).abs() < 1e-15);
        assert!((t.p(4) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.s(1), 0.0);
        assert_eq!(t.p(1), 1.0);
        assert_eq!(t.at(&ExtendedBound::Infinite), None);
        assert_eq!(t.at(&ExtendedBound::integer(101)), None);
        assert_eq!(t.at(&ExtendedBound::Finite { num: 7, den: 2 }), Some((t.s(3), t.p(3))));
    }

    #[test]
    fn mertens_monotone_and_asymptotic() {
        let t = MertensTables::build(1_000_000).unwrap();
        let mut prev = (0.0, 1.0);
        for y in (2..1_000_000).step_by(997) {
            let (s, p) = (t.s(y), t.p(y));
            assert!(s >= prev.0 && p <= prev.1 && p > 0.0);
            prev = (s, p);
        }
        // Σ log p/(p−1) = log y − γ + o(1); Π(1 − 1/p) ~ e^{−γ}/log y
        let y = 1_000_000f64;
        assert!((t.s(1_000_000) - (y.ln() - EULER_GAMMA)).abs() < 2e-3);
        assert!((t.p(1_000_000) * y.ln() * EULER_GAMMA.exp() - 1.0).abs() < 2e-3);
    }

    #[test]
    fn scale_constant() {
        // 1/(1 − e^{−γ}) = 2.2810...; e^{−γ} = 0.56145948356688516982
        let e = 0.561_459_483_566_885_169_82_f64;
        assert!((series_scale() - 1.0 / (1.0 - e)).abs() < 1e-14);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn rejects_non_series_specs() {
        let b = Workbench::new(1);
        let t = MertensTables::build(100).unwrap();
        for spec in [ThetaSpec::PrimePowers, ThetaSpec::almost_prime(2).unwrap(), ThetaSpec::smooth(7).unwrap()] {
            assert!(matches!(c_theta(&b, &spec, 1_000, &t), Err(Error::Precondition(_))));
        }
        // table too small is a resource error
        assert!(matches!(c_theta(&b, &ThetaSpec::Practical, 1_000, &t), Err(Error::Resource(_))));
    }

    #[test]
    fn normalization_weights_approach_one() {
        let b = Workbench::new(1);
        let spec = ThetaSpec::dense(2, 1).unwrap();
        let t = MertensTables::build(required_table_limit(&b, &spec, 100_000).unwrap()).unwrap();
        let small = c_theta(&b, &spec, 10_000, &t).unwrap();
        let big = c_theta(&b, &spec, 100_000, &t).unwrap();
        assert!(small.residual_mass > big.residual_mass);
        assert!(big.residual_mass > 0.0 && big.residual_mass < 0.1);
    }

    #[test]
    fn residue_shares_sum_to_one() {
        let b = Workbench::new(2);
        let spec = ThetaSpec::Practical;
        let n = 100_000;
        let t = mertens_for(&b, &spec, n, 12).unwrap();
        let mut solver = DensitySolver::new(&b, &spec, n, &t).unwrap();
        for q in [2u64, 3, 5, 12] {
            let total: f64 = (0..q as i64).map(|a| solver.r_qa(q, a).unwrap()).sum();
            assert!((total - 1.0).abs() < 0.02, "q={q} total={total}");
            assert_eq!(solver.r_qa(q, 0).unwrap(), solver.r_q(q).unwrap());
        }
        assert_eq!(solver.r_q(1).unwrap(), 1.0);
        assert_eq!(solver.c_q(1).unwrap(), solver.c_theta().unwrap());
    }
}
