//! Brackets the number of multiples of q by counts of the lifted set.

use thetaset::{census, ThetaSpec, Workbench};

fn main() -> thetaset::Result<()> {
    let bench = Workbench::new(1);
    let x = 1_000_000;
    for spec in [ThetaSpec::Practical, ThetaSpec::dense(2, 1)?] {
        println!("{spec}, x = {x}");
        println!("   q      lower     B_q(x)      upper   R(x,q)");
        for q in [2u64, 3, 5, 6, 12, 30] {
            let s = census::sandwich_check(&bench, &spec, x, q)?;
            println!("{:>4} {:>10} {:>10} {:>10} {:>8}  {}", q, s.lower, s.mid, s.upper, s.remainder, if s.pass { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}
