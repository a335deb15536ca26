//! Acceptance checks for the fold example and the solution families, one
//! PASS/FAIL line each. Oracles are closed forms evaluated here, not the
//! library's own verification routines.

use std::process::Command;

use mageo::characteristics::{
    analytic_null_geodesic, analytic_null_geodesic_exact, eikonal_residual, eikonal_residual_gradient,
    example_null_covector, trace_bicharacteristic, BicharState, Orientation, TraceOptions,
};
use mageo::family::{build_family, DegreeReport, FamilySpec};
use mageo::grid::{grid3, Axis};
use mageo::metric::{
    ambient_metric, classify, hessian, immersion_jacobian, linearization_matrix, ma_residual_poly, pullback_metric,
    pullback_metric_poly, SignatureLabel,
};
use mageo::poly::{format_rational, int, parse_poly, rat, to_f64, Poly, Rational};
use mageo::sg::{balance_residual, wind_field_sweep, Branch, EpsilonChoice, Section};
use mageo::singular::{branch_select_convex, caustic_sweep, dpi_det, fiber_solve, multivalued_P, FiberOptions, SliceGrid};
use mageo::{fold_example, ChartKind, GeneratingFunction, Sym3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fold_text() -> Poly {
    parse_poly("y^2/2 - x^2*Z/2 + Z^3/6", &["x", "y", "Z"]).unwrap()
}

fn c1() -> Outcome {
    let t = fold_text();
    let d = |a: &str, b: &str| t.diff(a).unwrap().diff(b).unwrap();
    let residual = &(&(&d("x", "x") * &d("y", "y")) - &(&d("x", "y") * &d("x", "y"))) + &d("Z", "Z");
    let lib = ma_residual_poly(&fold_example());
    check(
        residual.is_zero() && lib.is_zero(),
        format!("hand-built residual `{residual}`, library residual `{lib}`"),
    )
}

fn c2() -> Outcome {
    let gf = fold_example();
    let v = ["x", "y", "Z"];
    let p = |s: &str| parse_poly(s, &v).unwrap();
    let want = [[p("-2*Z"), p("0"), p("0")], [p("0"), p("2"), p("0")], [p("0"), p("0"), p("-2*Z")]];
    let symbolic = pullback_metric_poly(&gf) == want;
    let g = ambient_metric(&gf);
    let ax = Axis::from_ints(-2, 2, 21).unwrap();
    let mut worst = 0.0f64;
    for pt in grid3(&[ax.clone(), ax.clone(), ax]) {
        let j = immersion_jacobian(&gf, &pt);
        let oracle = [-2.0 * pt[2], 2.0, -2.0 * pt[2]];
        for a in 0..3 {
            for b in 0..3 {
                let mut h = 0.0;
                for k in 0..6 {
                    for l in 0..6 {
                        h += j[k][a] * g[k][l] * j[l][b];
                    }
                }
                let want = if a == b { oracle[a] } else { 0.0 };
                worst = worst.max((h - want).abs());
                worst = worst.max((pullback_metric(&gf, &pt).get(a, b) - want).abs());
            }
        }
    }
    check(symbolic && worst <= 1e-12, format!("symbolic {symbolic}, max |J^T G J - 2 diag(-Z, 1, -Z)| = {worst:e} on 21^3 nodes"))
}

fn rel(a: &Sym3, b: &Sym3) -> f64 {
    a.max_abs_diff(b) / a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE)
}

/// `2 adj(A)` with `A = [[T_yy, -T_xy, 0], [-T_xy, T_xx, 0], [0, 0, eps]]` built from the Hessian.
fn adjugate_oracle(gf: &GeneratingFunction, pt: &[f64; 3]) -> Sym3 {
    let h = hessian(gf, pt);
    let e = gf.eps_q_f64();
    let (txx, txy, tyy) = (h.get(0, 0), h.get(0, 1), h.get(1, 1));
    let a = Sym3::new(tyy, -txy, 0.0, txx, 0.0, e);
    a.adjugate().scale(2.0)
}

fn c3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut gfs = vec![fold_example()];
    for _ in 0..20 {
        gfs.push(build_family(&FamilySpec::random(&mut rng)).map_err(|e| e.to_string())?.gf);
    }
    let mut worst = 0.0f64;
    for gf in &gfs {
        for _ in 0..100 {
            let pt = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
            let h = pullback_metric(gf, &pt);
            let lib = linearization_matrix(gf, &pt).map_err(|e| e.to_string())?.adjugate().scale(2.0);
            worst = worst.max(rel(&h, &adjugate_oracle(gf, &pt))).max(rel(&h, &lib));
        }
    }
    check(worst <= 1e-10, format!("max relative |h - 2 adj A| = {worst:e} over {} solutions x 100 points", gfs.len()))
}

/// `x^T M x / 2` as polynomial text for a symmetric rational matrix.
fn quadratic_text(m: &[[Rational; 3]; 3]) -> String {
    let v = ["x", "y", "z"];
    let mut terms = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            let c = if i == j { &m[i][j] / int(2) } else { m[i][j].clone() };
            terms.push(format!("({})*{}*{}", format_rational(&c), v[i], v[j]));
        }
    }
    terms.join(" + ")
}

/// `U^T D U` with `U` unit upper triangular, so the determinant is that of `D`.
fn sheared(d: [Rational; 3], u: [Rational; 3]) -> [[Rational; 3]; 3] {
    let um = [[int(1), u[0].clone(), u[1].clone()], [int(0), int(1), u[2].clone()], [int(0), int(0), int(1)]];
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).map(|k| &um[k][i] * &d[k] * &um[k][j]).fold(int(0), |a, b| a + b))
    })
}

fn c4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut r = |lo: i64, hi: i64| rat(rng.gen_range(lo..=hi), rng.gen_range(1..=4));
    let mut worst = 0.0f64;
    let mut count = 0;
    for eps in [rat(1, 1), rat(1, 4), rat(3, 1), rat(5, 3)] {
        for saddle in [false, true] {
            for _ in 0..5 {
                let a = r(1, 6);
                let b = r(1, 6);
                let d = if saddle {
                    [a.clone(), -b.clone(), -(&eps / (&a * &b))]
                } else {
                    [a.clone(), b.clone(), &eps / (&a * &b)]
                };
                let m = sheared(d, [r(-3, 3), r(-3, 3), r(-3, 3)]);
                let gf = GeneratingFunction::parse(ChartKind::ClassicalP, &quadratic_text(&m), eps.clone())
                    .map_err(|e| e.to_string())?;
                if !ma_residual_poly(&gf).is_zero() {
                    return Err(format!("det Hess P != eps_q for {}", gf.potential()));
                }
                let want = 8.0 * to_f64(&eps).powi(4);
                let mut prng = ChaCha8Rng::seed_from_u64(count);
                for _ in 0..20 {
                    let pt = [prng.gen_range(-2.0..2.0), prng.gen_range(-2.0..2.0), prng.gen_range(-2.0..2.0)];
                    worst = worst.max((pullback_metric(&gf, &pt).det() - want).abs() / want);
                }
                count += 1;
            }
        }
    }
    check(worst <= 1e-10, format!("max relative |det h - 8 eps_q^4| = {worst:e} over {count} quadratics"))
}

fn c5() -> Outcome {
    let gf = fold_example();
    let ax = Axis::from_ints(-2, 2, 41).unwrap();
    let (mut singular, mut parabolic, mut disagree) = (0, 0, 0);
    for pt in grid3(&[ax.clone(), ax.clone(), ax]) {
        let s = dpi_det(&gf, &pt).abs() < 1e-9;
        let p = classify(&gf, &pt, 1e-9).label == SignatureLabel::Parabolic;
        singular += usize::from(s);
        parabolic += usize::from(p);
        disagree += usize::from(s != p);
        if s && pt[2] != 0.0 {
            return Err(format!("singular node off Z = 0: {pt:?}"));
        }
    }
    check(
        disagree == 0 && singular == 41 * 41,
        format!("{singular} singular, {parabolic} parabolic, {disagree} disagreements on 41^3 nodes"),
    )
}

fn c6() -> Outcome {
    let gf = fold_example();
    let grid = SliceGrid::new([0, 1], [Axis::from_ints(-4, 4, 81).unwrap(), Axis::from_ints(-2, 2, 9).unwrap()]).unwrap();
    let sweep = caustic_sweep(&gf, &grid, 1e-9);
    let worst = sweep.samples.iter().map(|s| (s.base_point[2] - s.base_point[0].powi(2) / 2.0).abs()).fold(0.0, f64::max);
    check(
        sweep.samples.len() == 81 * 9 && worst <= 1e-12,
        format!("{} samples, max |z - x^2/2| = {worst:e}", sweep.samples.len()),
    )
}

fn c7() -> Outcome {
    let gf = fold_example();
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut chart = 0.0f64;
    for _ in 0..500 {
        let pt = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let (p, _) = multivalued_P(&gf, &pt).map_err(|e| e.to_string())?;
        chart = chart.max((p - (pt[1] * pt[1] / 2.0 - pt[2].powi(3) / 3.0)).abs());
    }
    let mut branch = 0.0f64;
    let mut n = 0;
    while n < 300 {
        let b = [rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0)];
        let disc: f64 = b[0] * b[0] - 2.0 * b[2];
        if disc < 1e-2 {
            continue;
        }
        let bp = fiber_solve(&gf, b, &FiberOptions::default()).map_err(|e| e.to_string())?;
        let i = branch_select_convex(&bp).index.ok_or(format!("no convex branch over {b:?}"))?;
        let f = &bp.fibers[i];
        if f.chart_point[2] >= 0.0 {
            return Err(format!("convex branch over {b:?} has Z >= 0"));
        }
        branch = branch.max((f.p_value - (b[1] * b[1] / 2.0 + disc.powf(1.5) / 3.0)).abs());
        n += 1;
    }
    check(
        chart <= 1e-12 && branch <= 1e-10,
        format!("chart-side max deviation {chart:e} (500 points), convex branch max deviation {branch:e} ({n} bases)"),
    )
}

fn c8() -> Outcome {
    let gf = fold_example();
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let opts = TraceOptions { step: 1e-3, max_steps: 800, ..Default::default() };
    let (mut dev, mut drift) = (0.0f64, 0.0f64);
    for _ in 0..25 {
        let c1: f64 = rng.gen_range(0.1..1.0);
        let c2: f64 = rng.gen_range(0.5..1.5);
        let z0 = c1 * c1 / (c2 * c2) + rng.gen_range(0.2..2.0);
        let p = example_null_covector(c1, c2, z0, Orientation::Ascending).map_err(|e| e.to_string())?;
        let tr = trace_bicharacteristic(&gf, BicharState::new([0.0, 0.0, z0], p), &opts).map_err(|e| e.to_string())?;
        for st in &tr.states {
            let g = analytic_null_geodesic(c1, c2, z0, st.q[2], Orientation::Ascending).map_err(|e| e.to_string())?;
            dev = dev.max((st.q[0] - g.dx).abs()).max((st.q[1] - g.dy).abs());
        }
        drift = drift.max(tr.max_hamiltonian_drift());
    }
    check(dev <= 1e-6 && drift <= 1e-8, format!("25 traces, max displacement deviation {dev:e}, max H drift {drift:e}"))
}

fn c9() -> Outcome {
    let alpha = mageo::verify::cusp_exponent(0.01)?;
    let sq = |z: i64| {
        analytic_null_geodesic_exact(&int(0), &int(1), &int(0), &int(z), Orientation::Ascending)
            .map(|(_, _, dy)| format_rational(&(&dy * &dy)))
            .unwrap_or_default()
    };
    let (a, b) = (sq(1), sq(4));
    check(
        (alpha - 1.5).abs() <= 0.015 && a == "4/9" && b == "256/9",
        format!("fitted exponent {alpha:.6}, (dy)^2 at Z = 1, 4: {a}, {b}"),
    )
}

fn c10() -> Outcome {
    let want = DegreeReport { t3: Some(1), t2: Some(4), t1: Some(7), t0: Some(10) };
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut off = Vec::new();
    for k in 0..50 {
        let sol = build_family(&FamilySpec::random(&mut rng)).map_err(|e| e.to_string())?;
        if !ma_residual_poly(&sol.gf).is_zero() {
            return Err(format!("spec {k} has a nonzero residual"));
        }
        if sol.degrees != want {
            off.push(sol.degrees);
        }
    }
    let round_trip = build_family(&FamilySpec::fold_example()).map_err(|e| e.to_string())?.gf.potential() == &fold_text();
    let seen = off.first().map(|d| format!(", observed ({:?}, {:?}, {:?}, {:?})", d.t3, d.t2, d.t1, d.t0)).unwrap_or_default();
    check(
        off.is_empty() && round_trip,
        format!("50 residuals zero, {} of 50 off the degrees (1, 4, 7, 10){seen}, round trip {round_trip}", off.len()),
    )
}

fn c11() -> Outcome {
    let gf = fold_example();
    let eps = EpsilonChoice::default();
    let q_g = to_f64(&eps.q_g(&gf));
    let section = Section { x: Axis::from_ints(-3, 3, 61).unwrap(), z: Axis::from_ints(-3, 3, 61).unwrap(), y: 0.0 };
    let rows = wind_field_sweep(&gf, Branch::Convex, &section, &eps, &FiberOptions::default());
    let (mut uw, mut dv, mut res, mut n) = (0.0f64, 0.0f64, 0.0f64, 0);
    for r in &rows {
        let [x, _, z] = r.base;
        let Some(s) = &r.state else {
            if x * x - 2.0 * z > 1e-9 {
                return Err(format!("elliptic node {:?} not reconstructed", r.base));
            }
            continue;
        };
        n += 1;
        uw = uw.max(s.u.abs()).max(s.w.abs());
        dv = dv.max((s.v - q_g * (x * (x * x - 2.0 * z).sqrt() - x)).abs());
        res = res.max(balance_residual(s, &eps).iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    check(
        n > 0 && uw <= 1e-12 && dv <= 1e-10 && res <= 1e-10,
        format!("{n} nodes, max |u|, |w| {uw:e}, max v deviation {dv:e}, max balance residual {res:e}"),
    )
}

fn c12() -> Outcome {
    let gf = fold_example();
    let mut rng = ChaCha8Rng::seed_from_u64(121);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let pt = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.01..4.0f64)];
        if classify(&gf, &pt, 1e-9).label != SignatureLabel::Hyperbolic {
            return Err(format!("{pt:?} is not hyperbolic"));
        }
        // F = y - (2/3) Z^(3/2), the cusp family with x' = 0.
        let grad = [0.0, 1.0, -pt[2].sqrt()];
        worst = worst.max(eikonal_residual_gradient(&gf, &grad, &pt).map_err(|e| e.to_string())?.abs());
    }
    let plane = parse_poly("x", &["x", "y", "Z"]).unwrap();
    let mut least = f64::INFINITY;
    for k in 0..=40 {
        let z = 0.5 + 1.5 * k as f64 / 40.0;
        least = least.min(eikonal_residual(&gf, &plane, &[-0.7, 0.4, z]).map_err(|e| e.to_string())?.abs());
    }
    check(worst <= 1e-10 && least >= 0.1, format!("max characteristic residual {worst:e}, min |residual| of F = x {least:.4}"))
}

fn c13() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_mageo")).arg("verify-paper").output().map_err(|e| e.to_string())?;
    let code = out.status.code().unwrap_or(-1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    check(code == 0, format!("verify-paper exit code {code} {}", stderr.trim()))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("example residual", c1),
        ("metric closed form", c2),
        ("adjugate identity", c3),
        ("determinant law", c4),
        ("parabolic = singular", c5),
        ("caustic law", c6),
        ("multivalued geopotential", c7),
        ("bicharacteristic oracle", c8),
        ("cusp exponent", c9),
        ("family builder", c10),
        ("SG reconstruction", c11),
        ("eikonal", c12),
        ("verify-paper exit status", c13),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(d) => println!("PASS {:>2} {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
