//! Element-level checks of the structural facts about `B_θ`:
//!
//! - `{m : mq ∈ B_θ} ⊂ B_{θ_q} ⊂ {m : mq ∈ B_θ} ∪ {m : θ(m) < P+(q)}`
//! - equidistribution over the classes coprime to q (reported, not asserted)
//! - closure: `m ∈ B`, `m > q`, `n ≡ 1 (mod q)`, n (q+1)-dense ⇒ `mn ∈ B`
//! - the 0 / 1 / ∞ classification of arithmetic progressions

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{gcd, trial_factorize};
use crate::census::{histogram, normalize_residue, MemberSet};
use crate::error::{Error, Result};
use crate::genset::{enumerate, is_member_factored};
use crate::theta::{lift_q, ThetaSpec};
use crate::workbench::Workbench;

/// Result of one law check. It passes iff no counterexample was found.
#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub law: String,
    pub parameters: Vec<(String, String)>,
    pub checked: u64,
    pub counterexamples: Vec<String>,
    pub summary: Vec<(String, f64)>,
}

impl LawReport {
    fn new(law: &str, parameters: &[(&str, String)]) -> Self {
        LawReport {
            law: law.to_string(),
            parameters: parameters
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            checked: 0,
            counterexamples: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// Concatenates the counterexamples of several reports of the same law.
    pub fn merge(&mut self, other: LawReport) {
        self.checked += other.checked;
        self.counterexamples.extend(other.counterexamples);
    }
}

fn require_monotone_base(spec: &ThetaSpec) -> Result<()> {
    if matches!(spec, ThetaSpec::Lifted(_)) || !spec.is_monotone() {
        return Err(Error::precondition(format!(
            "`{spec}` must be an unlifted monotone theta"
        )));
    }
    Ok(())
}

fn require_dense_like(spec: &ThetaSpec) -> Result<()> {
    require_monotone_base(spec)?;
    if !spec.dominates_identity() {
        return Err(Error::precondition(format!(
            "`{spec}` must satisfy theta(n) >= n (dense or practical)"
        )));
    }
    Ok(())
}

/// Checks both set inclusions for every m <= m_max.
pub fn verify_inclusions(bench: &Workbench, spec: &ThetaSpec, q: u64, m_max: u64) -> Result<LawReport> {
    require_monotone_base(spec)?;
    let lifted = lift_q(spec, q)?;
    let fq = trial_factorize(q)?;
    let big = fq.pplus();
    let tables = bench.tables_up_to(m_max.max(2))?;
    let mut report = LawReport::new(
        "inclusion",
        &[("theta", spec.to_string()), ("q", q.to_string()), ("m_max", m_max.to_string())],
    );
    for m in 1..=m_max {
        let fm = tables.factorize(m)?;
        let mq_in = is_member_factored(spec, &fm.mul(&fq)?)?;
        let m_in_lift = is_member_factored(&lifted, &fm)?;
        let small_theta = !spec.eval(&fm)?.admits(big);
        if mq_in && !m_in_lift {
            report
                .counterexamples
                .push(format!("m={m}: mq in B but m not in B_theta_q"));
        }
        if m_in_lift && !mq_in && !small_theta {
            report
                .counterexamples
                .push(format!("m={m}: m in B_theta_q but mq not in B and theta(m) >= P+(q)"));
        }
        report.checked += 1;
    }
    Ok(report)
}

/// One row of the equidistribution table.
#[derive(Clone, Debug, Serialize)]
pub struct EquidistRow {
    pub x: u64,
    pub count: u64,
    /// Members coprime to q.
    pub coprime: u64,
    /// max over a coprime to q of |B(x,q,a) − coprime/φ(q)|.
    pub max_deviation: f64,
    pub relative_deviation: f64,
    /// max_deviation · log x / x.
    pub scaled_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquidistReport {
    pub theta: String,
    pub q: u64,
    pub rows: Vec<EquidistRow>,
}

impl EquidistReport {
    pub fn to_law_report(&self) -> LawReport {
        let mut r = LawReport::new("equidist", &[("theta", self.theta.clone()), ("q", self.q.to_string())]);
        r.checked = self.rows.len() as u64;
        for row in &self.rows {
            r.summary.push((format!("relative_deviation@{}", row.x), row.relative_deviation));
        }
        r
    }
}

/// Measures how evenly members spread over the classes coprime to q.
pub fn equidist_report(bench: &Workbench, spec: &ThetaSpec, xs: &[u64], q: u64) -> Result<EquidistReport> {
    if q < 2 {
        return Err(Error::precondition("equidistribution needs q >= 2"));
    }
    let phi = trial_factorize(q)?.euler_phi() as f64;
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let hist = histogram(bench, spec, x, q)?;
        let coprime = hist.gcd_class(1);
        let mean = coprime as f64 / phi;
        let max_deviation = hist
            .counts
            .iter()
            .enumerate()
            .filter(|&(a, _)| gcd(a as u64, q) == 1)
            .map(|(_, &c)| (c as f64 - mean).abs())
            .fold(0.0, f64::max);
        let count = hist.total();
        rows.push(EquidistRow {
            x,
            count,
            coprime,
            max_deviation,
            relative_deviation: if count > 0 { max_deviation / count as f64 } else { 0.0 },
            scaled_deviation: max_deviation * (x as f64).ln().max(1.0) / x as f64,
        });
    }
    Ok(EquidistReport {
        theta: spec.to_string(),
        q,
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClosurePair {
    pub m: u64,
    pub n: u64,
}

/// Asserts `mn ∈ B` for each pair. Pairs that do not meet the construction's
/// hypotheses are a precondition error, not a law failure.
pub fn closure_check(spec: &ThetaSpec, q: u64, pairs: &[ClosurePair]) -> Result<LawReport> {
    require_dense_like(spec)?;
    if q < 2 {
        return Err(Error::precondition("closure needs q >= 2"));
    }
    let dense = ThetaSpec::dense(q + 1, 1)?;
    let mut report = LawReport::new("closure", &[("theta", spec.to_string()), ("q", q.to_string())]);
    for &ClosurePair { m, n } in pairs {
        let fm = trial_factorize(m)?;
        let fnn = trial_factorize(n)?;
        if m <= q || !is_member_factored(spec, &fm)? {
            return Err(Error::precondition(format!("m={m} must be a member greater than q={q}")));
        }
        if n % q != 1 % q {
            return Err(Error::precondition(format!("n={n} is not 1 mod {q}")));
        }
        if !is_member_factored(&dense, &fnn)? {
            return Err(Error::precondition(format!("n={n} is not {}-dense", q + 1)));
        }
        if !is_member_factored(spec, &fm.mul(&fnn)?)? {
            report.counterexamples.push(format!("m={m} n={n}: mn not in B"));
        }
        report.checked += 1;
    }
    Ok(report)
}

/// Draws `count` valid pairs with m from `B ∩ (q, cap]` and n from the
/// (q+1)-dense integers `<= cap` that are 1 mod q.
pub fn closure_sample(bench: &Workbench, spec: &ThetaSpec, q: u64, count: usize, cap: u64, seed: u64) -> Result<Vec<ClosurePair>> {
    require_dense_like(spec)?;
    let dense = ThetaSpec::dense(q + 1, 1)?;
    let ns: Vec<u64> = MemberSet::build(bench, &dense, cap)?
        .members()
        .iter()
        .copied()
        .filter(|&n| n % q == 1 % q)
        .collect();
    let ms: Vec<u64> = MemberSet::build(bench, spec, cap)?
        .members()
        .iter()
        .copied()
        .filter(|&m| m > q)
        .collect();
    if ns.is_empty() || ms.is_empty() {
        return Err(Error::precondition(format!("cap {cap} leaves no valid pairs")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| ClosurePair {
            m: *ms.choose(&mut rng).expect("nonempty"),
            n: *ns.choose(&mut rng).expect("nonempty"),
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Empty,
    Singleton(u64),
    Infinite,
}

/// How many members of `B` lie in the class a mod q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProgressionClass {
    pub q: u64,
    pub a: u64,
    pub verdict: Verdict,
    pub search_bound: u64,
    pub members_found: u64,
}

impl ProgressionClass {
    /// Only `Infinite` is certain; the others hold up to `search_bound`.
    pub fn is_heuristic(&self) -> bool {
        !matches!(self.verdict, Verdict::Infinite)
    }

    pub fn label(&self) -> String {
        match self.verdict {
            Verdict::Empty => "Empty (heuristic)".to_string(),
            Verdict::Singleton(n) => format!("Singleton({n}) (heuristic)"),
            Verdict::Infinite => "Infinite".to_string(),
        }
    }
}

impl fmt::Display for ProgressionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Classifies a mod q as holding zero, one or infinitely many members. A
/// member at or above q makes the class infinite (it then carries a positive
/// share of `B`).
pub fn classify_progression(bench: &Workbench, spec: &ThetaSpec, q: u64, a: i64, search_bound: u64) -> Result<ProgressionClass> {
    require_dense_like(spec)?;
    if q == 0 {
        return Err(Error::precondition("modulus q must be at least 1"));
    }
    if search_bound < q {
        return Err(Error::precondition(format!("search bound {search_bound} is below q = {q}")));
    }
    let a = normalize_residue(a, q);
    let primes = bench.primes_for(spec, search_bound)?;
    let parts = enumerate(spec, search_bound, &primes)?.fold(bench, || (0u64, u64::MAX), |acc, m| {
        let n = m.n();
        if n % q == a {
            acc.0 += 1;
            acc.1 = acc.1.min(n);
        }
    })?;
    let (found, smallest) = parts
        .into_iter()
        .fold((0, u64::MAX), |(c, s), (c2, s2)| (c + c2, s.min(s2)));
    let verdict = match found {
        0 => Verdict::Empty,
        1 if smallest < q => Verdict::Singleton(smallest),
        _ => Verdict::Infinite,
    };
    Ok(ProgressionClass {
        q,
        a,
        verdict,
        search_bound,
        members_found: found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusions_small_case() {
        let b = Workbench::new(1);
        let d2 = ThetaSpec::dense(2, 1).unwrap();
        let rep = verify_inclusions(&b, &d2, 3, 12).unwrap();
        assert!(rep.pass(), "{:?}", rep.counterexamples);
        let lifted = lift_q(&d2, 3).unwrap();
        let set = MemberSet::build(&b, &lifted, 12).unwrap();
        assert_eq!(set.members(), &[1, 2, 4, 6, 8, 10, 12]);
        assert!(verify_inclusions(&b, &ThetaSpec::Practical, 2, 1_000).unwrap().pass());
        assert!(matches!(
            verify_inclusions(&b, &ThetaSpec::PrimePowers, 3, 10),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn closure_examples() {
        let rep = closure_check(&ThetaSpec::Practical, 2, &[ClosurePair { m: 4, n: 3 }]).unwrap();
        assert!(rep.pass());
        let d2 = ThetaSpec::dense(2, 1).unwrap();
        assert!(closure_check(&d2, 3, &[ClosurePair { m: 6, n: 4 }]).unwrap().pass());
        assert!(matches!(
            closure_check(&d2, 3, &[ClosurePair { m: 6, n: 7 }]),
            Err(Error::Precondition(_))
        ));
        assert!(closure_check(&d2, 3, &[ClosurePair { m: 2, n: 4 }]).is_err());
        assert!(closure_check(&d2, 3, &[ClosurePair { m: 6, n: 3 }]).is_err());
    }

    #[test]
    fn closure_sample_pairs_are_valid() {
        let b = Workbench::new(1);
        let pairs = closure_sample(&b, &ThetaSpec::Practical, 5, 200, 5_000, 7).unwrap();
        assert_eq!(pairs.len(), 200);
        assert!(closure_check(&ThetaSpec::Practical, 5, &pairs).unwrap().pass());
        assert_eq!(pairs, closure_sample(&b, &ThetaSpec::Practical, 5, 200, 5_000, 7).unwrap());
    }

    #[test]
    fn progression_classes_mod_12() {
        let b = Workbench::new(1);
        let p = ThetaSpec::Practical;
        let c = classify_progression(&b, &p, 12, 10, 1_000_000).unwrap();
        assert_eq!(c.verdict, Verdict::Empty);
        assert_eq!(c.to_string(), "Empty (heuristic)");
        assert_eq!(classify_progression(&b, &p, 12, 2, 1_000_000).unwrap().verdict, Verdict::Singleton(2));
        let inf = classify_progression(&b, &p, 12, 4, 1_000_000).unwrap();
        assert_eq!(inf.verdict, Verdict::Infinite);
        assert!(!inf.is_heuristic());
        assert!(classify_progression(&b, &p, 12, 4, 11).is_err());
        assert!(classify_progression(&b, &ThetaSpec::smooth(7).unwrap(), 12, 4, 100).is_err());
    }

    #[test]
    fn equidist_examples() {
        let b = Workbench::new(1);
        let d2 = ThetaSpec::dense(2, 1).unwrap();
        let rep = equidist_report(&b, &d2, &[10_000], 2).unwrap();
        assert_eq!(rep.rows[0].max_deviation, 0.0);
        let hist = histogram(&b, &d2, 100_000, 12).unwrap();
        for a in (1..12).step_by(2) {
            // 1 is the only odd member, and it sits in class 1
            assert_eq!(hist.counts[a], u64::from(a == 1));
        }
        assert!(equidist_report(&b, &d2, &[100], 1).is_err());
    }
}
