//! Classifies the progressions a mod 12 by their practical members.

use thetaset::{laws, ThetaSpec, Workbench};

fn main() -> thetaset::Result<()> {
    let bench = Workbench::new(1);
    for a in 0..12 {
        let c = laws::classify_progression(&bench, &ThetaSpec::Practical, 12, a, 1_000_000)?;
        println!("{a:>2} mod 12: {:>6} members  {}", c.members_found, c.label());
    }
    Ok(())
}
