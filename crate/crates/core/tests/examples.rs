//! Runs every example so that they stay in step with the library.

#[path = "../examples/bicharacteristics.rs"]
mod bicharacteristics;
#[path = "../examples/caustic.rs"]
mod caustic;
#[path = "../examples/classify.rs"]
mod classify;
#[path = "../examples/eikonal.rs"]
mod eikonal;
#[path = "../examples/family.rs"]
mod family;
#[path = "../examples/fibers.rs"]
mod fibers;
#[path = "../examples/polynomials.rs"]
mod polynomials;
#[path = "../examples/pullback_metric.rs"]
mod pullback_metric;
#[path = "../examples/verify_paper.rs"]
mod verify_paper;
#[path = "../examples/wind.rs"]
mod wind;

#[test]
fn examples_run() {
    polynomials::run();
    pullback_metric::run();
    classify::run();
    caustic::run();
    fibers::run();
    bicharacteristics::run();
    eikonal::run();
    family::run();
    wind::run();
}

#[test]
fn reproduction_report_lists_every_check() {
    let passed = verify_paper::run();
    let report = mageo::verify::run_all(&Default::default());
    assert_eq!(report.criteria.len(), 12);
    assert_eq!(passed, report.passed);
}
