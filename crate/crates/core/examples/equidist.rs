//! Spread of practical numbers over the residues coprime to 5.

use thetaset::{laws, ThetaSpec, Workbench};

fn main() -> thetaset::Result<()> {
    let bench = Workbench::new(std::thread::available_parallelism().map_or(1, |n| n.get()));
    let xs = [10_000, 100_000, 1_000_000, 10_000_000];
    let rep = laws::equidist_report(&bench, &ThetaSpec::Practical, &xs, 5)?;
    println!("{:>10} {:>9} {:>9} {:>10} {:>10}", "x", "B(x)", "coprime", "D(x)", "D(x)/B(x)");
    for r in &rep.rows {
        println!("{:>10} {:>9} {:>9} {:>10.2} {:>10.6}", r.x, r.count, r.coprime, r.max_deviation, r.relative_deviation);
    }
    Ok(())
}
