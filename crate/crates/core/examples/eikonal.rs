//! Eikonal residuals: a characteristic function built from the cusp family
//! against a non-characteristic plane.

use mageo::characteristics::{eikonal_residual, eikonal_residual_gradient};
use mageo::fold_example;
use mageo::poly::parse_poly;

pub fn run() {
    let gf = fold_example();
    let plane = parse_poly("x", &["x", "y", "Z"]).unwrap();
    for z in [0.5f64, 1.0, 2.0] {
        let pt = [0.0, 0.0, z];
        let cusp = [0.0, 1.0, z.sqrt()];
        println!(
            "Z = {z}: characteristic {:e}, plane F = x {:.3}",
            eikonal_residual_gradient(&gf, &cusp, &pt).unwrap(),
            eikonal_residual(&gf, &plane, &pt).unwrap()
        );
    }
}

#[allow(dead_code)]
fn main() {
    run();
}
