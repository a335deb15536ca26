//! Null bicharacteristics of the fold example compared with the closed-form
//! geodesics, one of them running into the parabolic boundary.

use mageo::characteristics::{
    analytic_null_geodesic, example_null_covector, trace_bicharacteristic, BicharState, Orientation, TraceOptions,
};
use mageo::fold_example;

pub fn run() {
    let gf = fold_example();
    for (c1, c2, z0, o) in [(0.5, 1.0, 1.0, Orientation::Ascending), (0.0, 1.0, 1.0, Orientation::Descending)] {
        let p = example_null_covector(c1, c2, z0, o).unwrap();
        let opts = TraceOptions { step: 1e-3, max_steps: 2000, ..Default::default() };
        let trace = trace_bicharacteristic(&gf, BicharState::new([0.0, 0.0, z0], p), &opts).unwrap();
        let end = trace.last();
        let exact = analytic_null_geodesic(c1, c2, z0, end.q[2], o).unwrap();
        println!("c1 = {c1}, {o:?}: {} steps, {}", trace.states.len() - 1, trace.termination);
        println!("  end Z = {:.6}", end.q[2]);
        println!("  dx traced {:+.12} closed form {:+.12}", end.q[0], exact.dx);
        println!("  dy traced {:+.12} closed form {:+.12}", end.q[1], exact.dy);
        println!("  max |H - H0| = {:e}", trace.max_hamiltonian_drift());
    }
}

#[allow(dead_code)]
fn main() {
    run();
}
