//! Residual, Hessian and pull-back metric of the fold example in the `T` chart.

use mageo::fold_example;
use mageo::metric::{ma_residual_poly, pullback_metric, pullback_metric_poly};

pub fn run() {
    let gf = fold_example();
    println!("potential: {}", gf.potential());
    println!("residual:  {:?}", ma_residual_poly(&gf).to_string());
    let h = pullback_metric_poly(&gf);
    for row in &h {
        let cells: Vec<String> = row.iter().map(|p| format!("{p:>6}")).collect();
        println!("h = [{}]", cells.join(", "));
    }
    let pt = [0.3, -1.0, 2.0];
    let num = pullback_metric(&gf, &pt);
    println!("h({pt:?}) diagonal = {:?}, det = {:e}", [num.get(0, 0), num.get(1, 1), num.get(2, 2)], num.det());
}

#[allow(dead_code)]
fn main() {
    run();
}
