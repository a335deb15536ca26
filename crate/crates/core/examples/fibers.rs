//! Preimages of physical points, the multivalued geopotential and the convex branch.

use mageo::fold_example;
use mageo::singular::{branch_select_convex, fiber_solve, FiberOptions};

pub fn run() {
    let gf = fold_example();
    let opts = FiberOptions::default();
    for base in [[2.0, 0.5, 1.0], [1.0, 0.0, 0.5], [0.0, 0.0, 1.0]] {
        let bp = fiber_solve(&gf, base, &opts).unwrap();
        let sel = branch_select_convex(&bp);
        println!("over {base:?}: {} preimages, convex branch {:?}", bp.fibers.len(), sel.index);
        for f in &bp.fibers {
            println!("  Z = {:>8.5}  P = {:>8.5}  convex = {}", f.chart_point[2], f.p_value, f.convex);
        }
    }
}

#[allow(dead_code)]
fn main() {
    run();
}
