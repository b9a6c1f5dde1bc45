//! Residue-class histogram of practical numbers modulo 10 (last digits).

use thetaset::{census, ThetaSpec, Workbench};

fn main() -> thetaset::Result<()> {
    let x = 10_000_000;
    let bench = Workbench::new(std::thread::available_parallelism().map_or(1, |n| n.get()));
    let hist = census::histogram(&bench, &ThetaSpec::Practical, x, 10)?;
    let total = hist.total() as f64;
    println!("practical numbers up to {x}: {}", hist.total());
    for (digit, &c) in hist.counts.iter().enumerate() {
        println!("  last digit {digit}: {c:>9}  {:6.2}%", 100.0 * c as f64 / total);
    }
    Ok(())
}
