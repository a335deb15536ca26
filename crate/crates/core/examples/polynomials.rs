//! Exact polynomial arithmetic: parse, differentiate, print, isolate real roots.

use mageo::poly::{parse_poly, rat};

pub fn run() {
    let vars = ["x", "y", "Z"];
    let t = parse_poly("y^2/2 - x^2*Z/2 + Z^3/6", &vars).unwrap();
    println!("T        = {t}");
    for v in vars {
        println!("dT/d{v}    = {}", t.diff(v).unwrap());
    }
    let p = parse_poly("(x - 1)^2*(x + 2)*(3*x - 1)", &["x"]).unwrap();
    println!("p        = {p}");
    let roots = p.to_univariate(0).unwrap().real_roots().unwrap();
    for r in roots {
        println!("root {:>22.16e} multiplicity {} exact {:?}", r.value, r.multiplicity, r.exact.map(|e| e.to_string()));
    }
    let at = t.eval_rational(&[rat(1, 2), rat(1, 3), rat(2, 1)]).unwrap();
    println!("T(1/2, 1/3, 2) = {at}");
}

#[allow(dead_code)]
fn main() {
    run();
}
