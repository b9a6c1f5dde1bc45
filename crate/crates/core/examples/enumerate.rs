//! Lists the members of several θ-sets below a small limit.
//!
//!     cargo run --example enumerate -- 100

use thetaset::{census::MemberSet, ThetaSpec, Workbench};

fn main() -> thetaset::Result<()> {
    let x: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let bench = Workbench::new(1);
    for name in ["practical", "dense:2", "dense:5/2", "smooth:7", "almost-prime:2", "prime-powers"] {
        let spec: ThetaSpec = name.parse()?;
        let set = MemberSet::build(&bench, &spec, x)?;
        let shown: Vec<String> = set.members().iter().take(24).map(u64::to_string).collect();
        let more = if set.count() > 24 { ", ..." } else { "" };
        println!("{name:>15}  B({x}) = {:<5} {}{more}", set.count(), shown.join(", "));
    }
    Ok(())
}
