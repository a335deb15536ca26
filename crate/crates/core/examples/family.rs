//! Polynomial solutions of the dual equation grown from cubic coefficients.

use mageo::family::{build_family, compare_recursions, reference_recursions, FamilySpec};
use mageo::metric::ma_residual_poly;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run() {
    println!("recursion mismatches: {}", compare_recursions(&reference_recursions()).unwrap().len());
    let fold = build_family(&FamilySpec::fold_example()).unwrap();
    println!("fold spec  -> {}", fold.gf.potential());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let spec = FamilySpec::random(&mut rng);
    let sol = build_family(&spec).unwrap();
    println!("random spec residual zero: {}", ma_residual_poly(&sol.gf).is_zero());
    println!("degrees by level: {:?}", sol.degrees);
    println!("T1_1 = {}", sol.coefficients[&mageo::family::Coefficient::T1_1]);
}

#[allow(dead_code)]
fn main() {
    run();
}
