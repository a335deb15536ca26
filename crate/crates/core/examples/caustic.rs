//! Singular locus of the fold example and its image, the caustic `z = x^2/2`.

use mageo::grid::Axis;
use mageo::poly::int;
use mageo::singular::{caustic_sweep, singular_locus_poly, SliceGrid};
use mageo::fold_example;

pub fn run() {
    let gf = fold_example();
    println!("det d(pi) = {}", singular_locus_poly(&gf));
    let grid = SliceGrid::new([0, 1], [Axis::new(int(-2), int(2), 9).unwrap(), Axis::single(int(0))]).unwrap();
    let sweep = caustic_sweep(&gf, &grid, 1e-9);
    for s in &sweep.samples {
        let [x, _, z] = s.base_point;
        println!("x = {x:>5.2}  z = {z:>5.2}  z - x^2/2 = {:e}", z - x * x / 2.0);
    }
}

#[allow(dead_code)]
fn main() {
    run();
}
