//! Element-wise inclusion and closure checks for the lifted sets.

use thetaset::{laws, ThetaSpec, Workbench};

fn main() -> thetaset::Result<()> {
    let bench = Workbench::new(1);
    for spec in [ThetaSpec::Practical, ThetaSpec::dense(2, 1)?, ThetaSpec::dense(3, 1)?] {
        for q in [2u64, 6, 10] {
            let inc = laws::verify_inclusions(&bench, &spec, q, 10_000)?;
            let pairs = laws::closure_sample(&bench, &spec, q, 1_000, 10_000, 7)?;
            let clo = laws::closure_check(&spec, q, &pairs)?;
            println!(
                "{:>10} q = {q:>2}  inclusion {}/{} ok  closure {}/{} ok",
                spec.to_string(),
                inc.checked - inc.counterexamples.len() as u64,
                inc.checked,
                clo.checked - clo.counterexamples.len() as u64,
                clo.checked
            );
        }
    }
    Ok(())
}
