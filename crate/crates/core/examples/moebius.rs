//! Counts by gcd class, directly and through the Möbius sum over multiples.

use thetaset::{arith::trial_factorize, census::MemberSet, ThetaSpec, Workbench};

fn main() -> thetaset::Result<()> {
    let bench = Workbench::new(1);
    let spec = ThetaSpec::dense(3, 1)?;
    let x = 100_000;
    let set = MemberSet::build(&bench, &spec, x)?;
    for q in [12u64, 30, 60] {
        println!("{spec}, x = {x}, q = {q}");
        for d in trial_factorize(q)?.divisors() {
            let direct = set.count_gcd_class(q, d)?;
            let sum = set.mobius_rhs(q, d)?;
            println!("  d = {d:>2}  direct {direct:>6}  moebius {sum:>6}");
            assert_eq!(direct as i64, sum);
        }
    }
    Ok(())
}
