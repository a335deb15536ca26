//! Signature of the pull-back metric in several charts.

use mageo::metric::classify;
use mageo::poly::int;
use mageo::{fold_example, ChartKind, GeneratingFunction};

pub fn run() {
    let gf = fold_example();
    for pt in [[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]] {
        let s = classify(&gf, &pt, 1e-9);
        println!("T at {pt:?}: {} ({}, {}, {})", s.label, s.n_pos, s.n_neg, s.n_zero);
    }
    let convex = GeneratingFunction::parse(ChartKind::ClassicalP, "x^2/2 + y^2/2 + z^2/2", int(1)).unwrap();
    let saddle = GeneratingFunction::parse(ChartKind::ClassicalP, "x*z - y^2/2", int(1)).unwrap();
    for (name, gf) in [("convex P", convex), ("saddle P", saddle)] {
        let s = classify(&gf, &[0.1, 0.2, 0.3], 1e-9);
        println!("{name}: {} eigenvalues {:?}", s.label, s.eigenvalues);
    }
}

#[allow(dead_code)]
fn main() {
    run();
}
