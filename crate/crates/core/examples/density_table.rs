//! Series estimates of c_θ and r_q for q = 2..20.
//!
//!     cargo run --release --example density_table -- practical 1000000

use thetaset::{density, ThetaSpec, Workbench};

fn main() -> thetaset::Result<()> {
    let mut args = std::env::args().skip(1);
    let spec: ThetaSpec = args.next().as_deref().unwrap_or("dense:2").parse()?;
    let n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(100_000);
    let bench = Workbench::new(std::thread::available_parallelism().map_or(1, |n| n.get()));
    let tables = density::mertens_for(&bench, &spec, n, 20)?;
    let mut solver = density::DensitySolver::new(&bench, &spec, n, &tables)?;
    let est = solver.estimate(1)?.clone();
    println!("{spec}  N = {n}  c = {:.5}  (partial {:.5}, tail {:.5}, members {})", est.value, est.partial_sum, est.tail_estimate, est.members);
    for row in solver.table(20)? {
        println!("  q = {:>2}  r_q = {:.5}", row.q, row.r_q);
    }
    Ok(())
}
