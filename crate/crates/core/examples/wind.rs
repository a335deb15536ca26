//! Semigeostrophic state and wind on the convex branch along a vertical section.

use mageo::grid::Axis;
use mageo::poly::int;
use mageo::sg::{wind_csv, wind_field_sweep, Branch, EpsilonChoice, Section};
use mageo::singular::FiberOptions;
use mageo::fold_example;

pub fn run() {
    let gf = fold_example();
    let section = Section {
        x: Axis::new(int(-2), int(2), 5).unwrap(),
        z: Axis::new(int(-1), int(1), 3).unwrap(),
        y: 0.0,
    };
    let rows = wind_field_sweep(&gf, Branch::Convex, &section, &EpsilonChoice::default(), &FiberOptions::default());
    print!("{}", wind_csv(&rows));
}

#[allow(dead_code)]
fn main() {
    run();
}
