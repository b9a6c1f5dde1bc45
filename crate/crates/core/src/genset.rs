//! Membership in `B_θ` and depth-first enumeration of `B_θ(x)`.
//!
//! Every n ≥ 2 has a unique increasing factorization, so walking the tree
//! "append a larger prime power whose prime passes the θ test" from the root
//! n = 1 visits each member exactly once. The θ test is applied once per new
//! prime; the exponent of that prime does not enter its own test.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::arith::{isqrt, Factorization, PrimeList, PrimeTables};
use crate::error::{Error, Result};
use crate::theta::{theta_eval, ExtendedBound, ThetaSpec};
use crate::workbench::Workbench;

/// Number of independent subtrees the parallel fold aims for. Fixed, so the
/// split (and any floating-point reduction over it) does not depend on the
/// worker count.
const TARGET_TASKS: usize = 256;

/// Largest prime that can extend a member of `B_θ(x)`.
pub fn prime_bound(spec: &ThetaSpec, x: u64) -> u64 {
    let x128 = x as u128;
    let sqrt = |v: u128| isqrt(v.min(u64::MAX as u128) as u64) + 1;
    let practical = |scale: u128| {
        // σ(n) <= n (1 + ln n), so p^2 <= scale * x * (2 + ln(scale * x))
        let lx = ((scale * x128.max(1)) as f64).ln().ceil() as u128;
        sqrt(scale * x128 * (2 + lx)) + 1
    };
    let bound = match spec {
        ThetaSpec::PrimePowers | ThetaSpec::AlmostPrime { .. } => x,
        ThetaSpec::Smooth { y } => *y,
        ThetaSpec::Dense(t) => sqrt(t.num() as u128 * x128 / t.den() as u128),
        ThetaSpec::Practical => practical(1),
        ThetaSpec::Lifted(l) => {
            let q = l.q() as u128;
            match l.base() {
                ThetaSpec::Smooth { y } => (*y).max(*l.q_primes().last().unwrap_or(&1)),
                ThetaSpec::Dense(t) => sqrt(t.num() as u128 * q * x128 / t.den() as u128),
                ThetaSpec::Practical => practical(q),
                _ => x,
            }
        }
    };
    bound.min(x)
}

/// Membership test on a factorized integer.
pub fn is_member_factored(spec: &ThetaSpec, f: &Factorization) -> Result<bool> {
    let mut prefix = Factorization::one();
    for &(p, e) in f.factors() {
        if !theta_eval(spec, &prefix)?.admits(p) {
            return Ok(false);
        }
        for _ in 0..e {
            prefix.multiply_prime(p)?;
        }
    }
    Ok(true)
}

pub fn is_member(spec: &ThetaSpec, n: u64, tables: &PrimeTables) -> Result<bool> {
    is_member_factored(spec, &tables.factorize(n)?)
}

/// One member of `B_θ(x)` as produced by the enumeration.
#[derive(Clone, Copy, Debug)]
pub struct Member<'a> {
    factorization: &'a Factorization,
    theta: ExtendedBound,
}

impl<'a> Member<'a> {
    #[inline]
    pub fn n(&self) -> u64 {
        self.factorization.n()
    }

    pub fn factorization(&self) -> &'a Factorization {
        self.factorization
    }

    /// θ evaluated at this member.
    #[inline]
    pub fn theta(&self) -> ExtendedBound {
        self.theta
    }
}

#[derive(Clone, Debug)]
struct Subtree {
    root: Factorization,
    theta: ExtendedBound,
    next_prime: usize,
}

/// The members of `B_θ ∩ [1, x]`, produced in depth-first order.
#[derive(Clone, Copy, Debug)]
pub struct MemberStream<'a> {
    spec: &'a ThetaSpec,
    limit: u64,
    primes: &'a [u64],
}

pub fn enumerate<'a>(spec: &'a ThetaSpec, x: u64, primes: &'a PrimeList) -> Result<MemberStream<'a>> {
    MemberStream::new(spec, x, primes)
}

impl<'a> MemberStream<'a> {
    pub fn new(spec: &'a ThetaSpec, x: u64, primes: &'a PrimeList) -> Result<Self> {
        let need = prime_bound(spec, x);
        if primes.limit() < need {
            return Err(Error::precondition(format!(
                "prime list reaches {} but enumerating {spec} to {x} needs {need}",
                primes.limit()
            )));
        }
        Ok(MemberStream {
            spec,
            limit: x,
            primes: primes.primes(),
        })
    }

    pub fn spec(&self) -> &'a ThetaSpec {
        self.spec
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Visits every member in depth-first order.
    pub fn for_each<F: FnMut(&Member)>(&self, mut visit: F) -> Result<()> {
        if self.limit == 0 {
            return Ok(());
        }
        let mut root = Factorization::one();
        let theta = theta_eval(self.spec, &root)?;
        self.descend(&mut root, theta, 0, &mut visit)
    }

    /// Member values in depth-first order.
    pub fn collect_values(&self) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        self.for_each(|m| out.push(m.n()))?;
        Ok(out)
    }

    pub fn count(&self, bench: &Workbench) -> Result<u64> {
        Ok(self
            .fold(bench, || 0u64, |acc, _| *acc += 1)?
            .into_iter()
            .sum())
    }

    /// Folds members into one accumulator per subtree of a fixed split and
    /// returns the accumulators in split order. The split depends only on
    /// the spec and the limit, so merging the result left to right gives the
    /// same answer for every worker count.
    pub fn fold<T, I, V>(&self, bench: &Workbench, init: I, visit: V) -> Result<Vec<T>>
    where
        T: Send,
        I: Fn() -> T + Sync,
        V: Fn(&mut T, &Member) + Sync,
    {
        let mut head = init();
        if self.limit == 0 {
            return Ok(vec![head]);
        }
        let tasks = self.split(|m| visit(&mut head, m))?;
        let run = |task: &Subtree| -> Result<T> {
            let mut acc = init();
            let mut f = task.root.clone();
            self.descend(&mut f, task.theta, task.next_prime, &mut |m| visit(&mut acc, m))?;
            Ok(acc)
        };
        let rest: Vec<T> = if bench.workers() == 1 {
            tasks.iter().map(run).collect::<Result<_>>()?
        } else {
            bench.run(|| tasks.par_iter().map(run).collect::<Result<Vec<_>>>())??
        };
        let mut out = Vec::with_capacity(rest.len() + 1);
        out.push(head);
        out.extend(rest);
        Ok(out)
    }

    fn descend<F: FnMut(&Member)>(
        &self,
        f: &mut Factorization,
        theta: ExtendedBound,
        start: usize,
        visit: &mut F,
    ) -> Result<()> {
        visit(&Member {
            factorization: f,
            theta,
        });
        let n = f.n();
        for idx in start..self.primes.len() {
            let p = self.primes[idx];
            if n > self.limit / p || !theta.admits(p) {
                break;
            }
            let mut pushed = 0;
            loop {
                f.multiply_prime(p)?;
                pushed += 1;
                let child = theta_eval(self.spec, f)?;
                self.descend(f, child, idx + 1, visit)?;
                if f.n() > self.limit / p {
                    break;
                }
            }
            for _ in 0..pushed {
                f.divide_largest();
            }
        }
        Ok(())
    }

    fn children(&self, node: &Subtree) -> Result<Vec<Subtree>> {
        let mut out = Vec::new();
        let n = node.root.n();
        for idx in node.next_prime..self.primes.len() {
            let p = self.primes[idx];
            if n > self.limit / p || !node.theta.admits(p) {
                break;
            }
            let mut f = node.root.clone();
            loop {
                f.multiply_prime(p)?;
                out.push(Subtree {
                    theta: theta_eval(self.spec, &f)?,
                    root: f.clone(),
                    next_prime: idx + 1,
                });
                if f.n() > self.limit / p {
                    break;
                }
            }
        }
        Ok(out)
    }

    // Breadth-first expansion from the root until enough subtrees exist.
    // Expanded nodes are handed to `emit`; the rest become tasks.
    fn split<E: FnMut(&Member)>(&self, mut emit: E) -> Result<Vec<Subtree>> {
        let root = Factorization::one();
        let mut frontier = VecDeque::from([Subtree {
            theta: theta_eval(self.spec, &root)?,
            root,
            next_prime: 0,
        }]);
        let mut expansions = 0;
        while frontier.len() < TARGET_TASKS && expansions < 4 * TARGET_TASKS {
            let Some(node) = frontier.pop_front() else {
                break;
            };
            expansions += 1;
            emit(&Member {
                factorization: &node.root,
                theta: node.theta,
            });
            frontier.extend(self.children(&node)?);
        }
        Ok(frontier.into())
    }
}
