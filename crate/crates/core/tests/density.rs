use thetaset::census::MemberSet;
use thetaset::density::{mertens_for, DensitySolver, MertensTables};
use thetaset::{ThetaSpec, Workbench};

const N: u64 = 1_000_000;

fn within(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn tables(bench: &Workbench, spec: &ThetaSpec, n: u64) -> MertensTables {
    mertens_for(bench, spec, n, 20).unwrap()
}

#[test]
fn dense_two() {
    let bench = Workbench::new(1);
    let spec = ThetaSpec::dense(2, 1).unwrap();
    let t = tables(&bench, &spec, N);
    let mut s = DensitySolver::new(&bench, &spec, N, &t).unwrap();
    let c = s.c_theta().unwrap();

    let small_t = tables(&bench, &spec, 100_000);
    let mut small = DensitySolver::new(&bench, &spec, 100_000, &small_t).unwrap();
    let coarse = small.estimate(1).unwrap().clone();
    assert!((coarse.value - c).abs() < 5.0 * coarse.tail_indicator.abs().max(1e-12), "{} vs {c}", coarse.value);
    for q in 2..=20 {
        assert!((small.r_q(q).unwrap() - s.r_q(q).unwrap()).abs() < 0.01);
    }

    assert!(within(s.c_q(2).unwrap(), c, 0.01 * c));
    assert!(within(s.r_q(5).unwrap(), 0.38362, 0.01));
    assert!(within(s.r_qa(12, 4).unwrap(), 0.1841, 0.01));
    assert!(within(s.r_qa(12, 0).unwrap(), s.r_q(12).unwrap(), 1e-12));
    assert_eq!(s.c_q(1).unwrap(), c);

    let rows = s.table(20).unwrap();
    let r = |q: u64| rows[q as usize - 2].r_q;
    assert!(within(r(2), 1.0, 1e-3));
    assert!(within(r(6), r(3), 1e-3));
    assert!(within(r(10), r(5), 1e-3));
    for q in 2..=20u64 {
        for d in 2..q {
            if q % d == 0 {
                assert!(r(q) <= r(d) + 0.01, "r_{q} > r_{d}");
            }
        }
    }
    let mut residues = 0.0;
    for a in 0..12 {
        residues += s.r_qa(12, a).unwrap();
    }
    assert!(within(residues, 1.0, 1e-9));

    let four = ThetaSpec::dense(4, 1).unwrap();
    let t4 = tables(&bench, &four, N);
    let c4 = DensitySolver::new(&bench, &four, N, &t4).unwrap().c_theta().unwrap();
    assert!(within(c4, 2.0 * c, 0.01 * 2.0 * c), "{c4} vs 2 * {c}");
}

#[test]
fn practical() {
    let bench = Workbench::new(1);
    let spec = ThetaSpec::Practical;
    let t = tables(&bench, &spec, N);
    let mut s = DensitySolver::new(&bench, &spec, N, &t).unwrap();
    let c = s.c_theta().unwrap();
    assert!(within(s.c_q(2).unwrap(), c, 0.01 * c));
    assert!(within(s.r_q(3).unwrap(), 0.64880, 0.01));
    assert!(within(s.r_qa(5, 1).unwrap(), 0.1543, 0.01));

    let x = 10_000_000u64;
    let count = MemberSet::build(&bench, &spec, x).unwrap().count() as f64;
    let predicted = c * x as f64 / (x as f64).ln();
    assert!((predicted - count).abs() / count < 0.05, "{predicted} vs {count}");
}

#[test]
fn dense_three() {
    let bench = Workbench::new(1);
    let spec = ThetaSpec::dense(3, 1).unwrap();
    let t = tables(&bench, &spec, N);
    let mut s = DensitySolver::new(&bench, &spec, N, &t).unwrap();
    assert!(within(s.r_q(2).unwrap(), 0.79003, 0.01));
}
