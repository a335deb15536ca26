//! Hessians, Monge-Ampère residuals, the ambient split-signature metric, its
//! pull-back to the solution surface and the resulting type classification.

use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::chart::{AmbientPoint, ChartKind, ChartPoint, GeneratingFunction};
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Sym3};
use crate::poly::{Poly, Rational};

/// Relative tolerance for treating an eigenvalue as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

fn sym_from(entries: &[[crate::poly::NumPoly; 3]; 3], pt: &ChartPoint) -> Sym3 {
    let e = |i: usize, j: usize| entries[i][j].eval(pt);
    Sym3::new(e(0, 0), e(0, 1), e(0, 2), e(1, 1), e(1, 2), e(2, 2))
}

/// Second derivatives of the potential in the chart's own variables.
pub fn hessian(gf: &GeneratingFunction, pt: &ChartPoint) -> Sym3 {
    sym_from(&gf.derived().num_hessian, pt)
}

/// Left side minus right side of the chart's Monge-Ampère equation, exactly.
///
/// * `P`: `det Hess P - eps_q`
/// * `R`: `det Hess R - 1/eps_q`
/// * `S`: `eps_q (S_XX S_YY - S_XY^2) + S_zz`
/// * `T`: `T_xx T_yy - T_xy^2 + eps_q T_ZZ`
pub fn ma_residual_poly(gf: &GeneratingFunction) -> Poly {
    let h = gf.hessian_polys();
    let e = gf.eps_q();
    let det2 = || &(&h[0][0] * &h[1][1]) - &(&h[0][1] * &h[0][1]);
    let det3 = || crate::chart::det3_poly(&std::array::from_fn(|i| std::array::from_fn(|j| &h[i][j])));
    let pot = gf.potential();
    match gf.chart() {
        ChartKind::ClassicalP => det3() - pot.constant_like(e.clone()),
        ChartKind::DualR => det3() - pot.constant_like(Rational::one() / e),
        ChartKind::DualS => det2().scale(e) + h[2][2].clone(),
        ChartKind::DualT => det2() + h[2][2].scale(e),
    }
}

/// Numeric residual of the chart's Monge-Ampère equation at `pt`.
pub fn ma_residual(gf: &GeneratingFunction, pt: &ChartPoint) -> f64 {
    let h = hessian(gf, pt);
    let e = gf.eps_q_f64();
    let det2 = h.get(0, 0) * h.get(1, 1) - h.get(0, 1) * h.get(0, 1);
    match gf.chart() {
        ChartKind::ClassicalP => h.det() - e,
        ChartKind::DualR => h.det() - 1.0 / e,
        ChartKind::DualS => e * det2 + h.get(2, 2),
        ChartKind::DualT => det2 + e * h.get(2, 2),
    }
}

/// The ambient point over a chart point.
pub fn immersion(gf: &GeneratingFunction, pt: &ChartPoint) -> AmbientPoint {
    let im = &gf.derived().num_immersion;
    AmbientPoint::from_array(std::array::from_fn(|k| im[k].eval(pt)))
}

/// `J[k][j] = d(ambient_k)/d(chart_j)`, rows in the order `x, y, z, X, Y, Z`.
pub fn immersion_jacobian(gf: &GeneratingFunction, pt: &ChartPoint) -> [[f64; 3]; 6] {
    let jac = &gf.derived().num_jacobian;
    std::array::from_fn(|k| std::array::from_fn(|j| jac[k][j].eval(pt)))
}

/// The constant metric `2 eps_q (dx dX + dy dY + dz dZ)` as a 6x6 matrix.
pub fn ambient_metric(gf: &GeneratingFunction) -> [[f64; 6]; 6] {
    ambient_metric_exact(gf.eps_q()).map(|row| row.map(|c| crate::poly::to_f64(&c)))
}

pub fn ambient_metric_exact(eps_q: &Rational) -> [[Rational; 6]; 6] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            if i + 3 == j || j + 3 == i {
                eps_q.clone()
            } else {
                Rational::from_integer(0.into())
            }
        })
    })
}

/// `J^T G J` evaluated numerically from the Jacobian.
pub fn pullback_metric(gf: &GeneratingFunction, pt: &ChartPoint) -> Sym3 {
    let jac = immersion_jacobian(gf, pt);
    let g = ambient_metric(gf);
    let mut m: Mat3 = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for a in 0..6 {
                for b in 0..6 {
                    if g[a][b] != 0.0 {
                        acc += jac[a][i] * g[a][b] * jac[b][j];
                    }
                }
            }
            *out = acc;
        }
    }
    Sym3::from_matrix(&m)
}

/// The same metric from its exact polynomial entries.
pub fn pullback_metric_exact_entries(gf: &GeneratingFunction, pt: &ChartPoint) -> Sym3 {
    sym_from(&gf.derived().num_metric, pt)
}

/// Exact polynomial entries of the pull-back metric.
pub fn pullback_metric_poly(gf: &GeneratingFunction) -> [[Poly; 3]; 3] {
    gf.metric_polys().clone()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignatureLabel {
    Elliptic,
    Hyperbolic,
    Parabolic,
    Other,
}

impl fmt::Display for SignatureLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignatureLabel::Elliptic => "elliptic",
            SignatureLabel::Hyperbolic => "hyperbolic",
            SignatureLabel::Parabolic => "parabolic",
            SignatureLabel::Other => "other",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Signature {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
    pub label: SignatureLabel,
    pub tol: f64,
    pub eigenvalues: [f64; 3],
}

impl Signature {
    pub fn from_eigenvalues(eigenvalues: [f64; 3], tol: f64) -> Self {
        let scale = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let zero = tol * (1.0 + scale);
        let n_zero = eigenvalues.iter().filter(|v| v.abs() <= zero).count();
        let n_pos = eigenvalues.iter().filter(|v| **v > zero).count();
        let n_neg = 3 - n_zero - n_pos;
        let label = match (n_pos, n_neg, n_zero) {
            (3, 0, 0) => SignatureLabel::Elliptic,
            (1, 2, 0) => SignatureLabel::Hyperbolic,
            (_, _, z) if z >= 1 => SignatureLabel::Parabolic,
            _ => SignatureLabel::Other,
        };
        Signature {
            n_pos,
            n_neg,
            n_zero,
            label,
            tol,
            eigenvalues,
        }
    }
}

/// Type of the pull-back metric at `pt`.
pub fn classify(gf: &GeneratingFunction, pt: &ChartPoint, tol: f64) -> Signature {
    Signature::from_eigenvalues(pullback_metric(gf, pt).eigenvalues(), tol)
}

/// Coefficient matrix of the linearised equation, for the `P` and `T` charts.
pub fn linearization_matrix(gf: &GeneratingFunction, pt: &ChartPoint) -> Result<Sym3> {
    let h = hessian(gf, pt);
    match gf.chart() {
        ChartKind::ClassicalP => Ok(h.adjugate()),
        ChartKind::DualT => Ok(Sym3::new(
            h.get(1, 1),
            -h.get(0, 1),
            0.0,
            h.get(0, 0),
            0.0,
            gf.eps_q_f64(),
        )),
        chart => Err(Error::UnsupportedChart {
            operation: "linearization_matrix",
            chart,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::fold_example;
    use crate::poly::{int, parse_poly};
    use proptest::prelude::*;

    fn quad(eps: i64) -> GeneratingFunction {
        GeneratingFunction::parse(ChartKind::ClassicalP, "(x^2+y^2+z^2)/2", int(eps)).unwrap()
    }

    fn close(a: &Sym3, b: &Sym3, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn hessians() {
        assert_eq!(hessian(&quad(1), &[3.0, -1.0, 2.0]), Sym3::identity());
        assert_eq!(hessian(&fold_example(), &[0.0, 0.0, 1.0]), Sym3::diag(-1.0, 1.0, 1.0));
        let saddle =
            GeneratingFunction::parse(ChartKind::ClassicalP, "-x^2/2 - y^2/2 + z^2/2", int(1)).unwrap();
        assert_eq!(hessian(&saddle, &[0.5, 0.5, 0.5]), Sym3::diag(-1.0, -1.0, 1.0));
    }

    #[test]
    fn residuals() {
        let gf = fold_example();
        assert!(ma_residual_poly(&gf).is_zero());
        assert_eq!(ma_residual(&gf, &[0.3, -1.2, 0.7]), 0.0);
        assert_eq!(ma_residual(&quad(1), &[1.0, 2.0, 3.0]), 0.0);
        assert_eq!(ma_residual(&quad(2), &[1.0, 2.0, 3.0]), -1.0);
        assert_eq!(ma_residual_poly(&quad(2)).to_string(), "-1");
        let r = GeneratingFunction::parse(ChartKind::DualR, "(X^2+Y^2+Z^2)/2", int(1)).unwrap();
        assert!(ma_residual_poly(&r).is_zero());
        let s = GeneratingFunction::parse(ChartKind::DualS, "X^2/2 + Y^2/2 - z^2/2", int(1)).unwrap();
        assert!(ma_residual_poly(&s).is_zero());
    }

    #[test]
    fn immersions() {
        let gf = fold_example();
        assert_eq!(immersion(&gf, &[2.0, 0.0, 0.0]).to_array(), [2.0, 0.0, 2.0, 0.0, 0.0, 0.0]);
        assert_eq!(immersion(&gf, &[0.0, 0.0, 1.0]).to_array(), [0.0, 0.0, -0.5, 0.0, 0.0, 1.0]);
        // X = T_x = -x Z
        assert_eq!(immersion(&gf, &[2.0, 0.0, 1.5]).px, -3.0);
        assert_eq!(immersion(&quad(1), &[1.0, 2.0, 3.0]).to_array(), [1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn jacobians() {
        let j = immersion_jacobian(&fold_example(), &[0.0, 0.0, 1.0]);
        let expect = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, -1.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        assert_eq!(j, expect);
        let p = GeneratingFunction::parse(ChartKind::ClassicalP, "x^3*y + z^2*x - y", int(1)).unwrap();
        let pt = [0.4, -1.1, 2.0];
        let j = immersion_jacobian(&p, &pt);
        let h = hessian(&p, &pt).to_matrix();
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(j[i][k], if i == k { 1.0 } else { 0.0 });
                assert_eq!(j[i + 3][k], h[i][k]);
            }
        }
        let r = GeneratingFunction::parse(ChartKind::DualR, "X^2*Y + Z^3", int(1)).unwrap();
        let j = immersion_jacobian(&r, &pt);
        let h = hessian(&r, &pt).to_matrix();
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(j[i][k], h[i][k]);
                assert_eq!(j[i + 3][k], if i == k { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn ambient() {
        let g = ambient_metric(&quad(1));
        for i in 0..6 {
            for j in 0..6 {
                let e = if (i as i32 - j as i32).abs() == 3 { 1.0 } else { 0.0 };
                assert_eq!(g[i][j], e);
            }
        }
        let g3 = ambient_metric(&quad(3));
        assert_eq!(g3[2][5], 3.0);
        assert_eq!(g3[5][2], 3.0);
    }

    #[test]
    fn pullbacks() {
        let gf = fold_example();
        assert_eq!(pullback_metric(&gf, &[0.0, 0.0, 1.0]), Sym3::diag(-2.0, 2.0, -2.0));
        assert_eq!(pullback_metric(&gf, &[0.0, 0.0, -1.0]), Sym3::diag(2.0, 2.0, 2.0));
        assert_eq!(pullback_metric(&quad(1), &[0.1, 0.2, 0.3]), Sym3::diag(2.0, 2.0, 2.0));
        let h = pullback_metric_poly(&gf);
        let v = gf.chart().variables();
        let p = |s: &str| parse_poly(s, &v).unwrap();
        assert_eq!(h[0][0], p("-2*Z"));
        assert_eq!(h[1][1], p("2"));
        assert_eq!(h[2][2], p("-2*Z"));
        assert!(h[0][1].is_zero() && h[0][2].is_zero() && h[1][2].is_zero());
    }

    #[test]
    fn classification() {
        let gf = fold_example();
        let s = classify(&gf, &[0.0, 0.0, 1.0], DEFAULT_ZERO_TOL);
        assert_eq!((s.n_pos, s.n_neg, s.n_zero, s.label), (1, 2, 0, SignatureLabel::Hyperbolic));
        let s = classify(&gf, &[0.0, 0.0, 0.0], DEFAULT_ZERO_TOL);
        assert_eq!((s.n_zero, s.label), (2, SignatureLabel::Parabolic));
        let s = classify(&quad(1), &[1.0, 1.0, 1.0], DEFAULT_ZERO_TOL);
        assert_eq!(s.label, SignatureLabel::Elliptic);
        assert_eq!(classify(&gf, &[0.0, 0.0, -1.0], 1e-9).label, SignatureLabel::Elliptic);
    }

    #[test]
    fn linearization() {
        assert_eq!(linearization_matrix(&quad(1), &[0.0; 3]).unwrap(), Sym3::identity());
        let gf = fold_example();
        let a = linearization_matrix(&gf, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(a, Sym3::diag(1.0, -1.0, 1.0));
        assert_eq!(a.adjugate().scale(2.0), pullback_metric(&gf, &[0.0, 0.0, 1.0]));
        let r = GeneratingFunction::parse(ChartKind::DualR, "X^2", int(1)).unwrap();
        assert!(matches!(
            linearization_matrix(&r, &[0.0; 3]),
            Err(Error::UnsupportedChart { .. })
        ));
    }

    fn central_second(gf: &GeneratingFunction, pt: &ChartPoint, i: usize, j: usize, h: f64) -> f64 {
        let f = |di: f64, dj: f64| {
            let mut q = *pt;
            q[i] += di;
            q[j] += dj;
            gf.potential().eval(&q).unwrap()
        };
        (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h)
    }

    #[test]
    fn hessian_matches_finite_differences_at_second_order() {
        let gf = GeneratingFunction::parse(
            ChartKind::DualS,
            "X^4*z/12 - X*Y^3 + z^5/20 + X*Y*z^2",
            int(1),
        )
        .unwrap();
        let pt = [0.7, -0.4, 1.1];
        let exact = hessian(&gf, &pt);
        let err = |h: f64| {
            let mut m = 0.0f64;
            for i in 0..3 {
                for j in 0..3 {
                    m = m.max((central_second(&gf, &pt, i, j, h) - exact.get(i, j)).abs());
                }
            }
            m
        };
        let steps = [0.08, 0.04, 0.02, 0.01];
        for w in steps.windows(2) {
            let order = (err(w[0]) / err(w[1])).log2();
            assert!(order >= 1.9, "observed order {order}");
        }
    }

    proptest! {
        #[test]
        fn classical_closed_form_and_determinant(
            c in -3i64..3, d in -3i64..3, eps in 1i64..5,
            x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0,
        ) {
            // det Hess = eps for any f(x) added to x z - eps y^2/2
            let text = format!("x*z - {eps}*y^2/2 + {c}*x^3 + {d}*x^4/7");
            let gf = GeneratingFunction::parse(ChartKind::ClassicalP, &text, int(eps)).unwrap();
            prop_assert!(ma_residual_poly(&gf).is_zero());
            let pt = [x, y, z];
            let h = pullback_metric(&gf, &pt);
            let closed = hessian(&gf, &pt).scale(2.0 * eps as f64);
            prop_assert!(close(&h, &closed, 1e-12 * (1.0 + closed.max_abs())));
            let e4 = 8.0 * (eps as f64).powi(4);
            prop_assert!((h.det() - e4).abs() <= 1e-10 * e4);
            let lab = classify(&gf, &pt, DEFAULT_ZERO_TOL).label;
            prop_assert!(lab != SignatureLabel::Parabolic && lab != SignatureLabel::Other);
            let adj = linearization_matrix(&gf, &pt).unwrap().adjugate().scale(2.0);
            prop_assert!(close(&h, &adj, 1e-10 * (1.0 + h.max_abs())));
        }

        #[test]
        fn dual_t_block_form(x in -2.0f64..2.0, y in -2.0f64..2.0, zz in -2.0f64..2.0) {
            let gf = fold_example();
            let pt = [x, y, zz];
            let h = pullback_metric(&gf, &pt);
            let hs = hessian(&gf, &pt);
            let det2 = hs.get(0, 0) * hs.get(1, 1) - hs.get(0, 1).powi(2);
            let via_tzz = Sym3::new(hs.get(0, 0), hs.get(0, 1), 0.0, hs.get(1, 1), 0.0, -hs.get(2, 2)).scale(2.0);
            let via_det = Sym3::new(hs.get(0, 0), hs.get(0, 1), 0.0, hs.get(1, 1), 0.0, det2).scale(2.0);
            prop_assert!(close(&h, &via_tzz, 1e-12));
            prop_assert!(close(&h, &via_det, 1e-12));
            prop_assert!(close(&h, &pullback_metric_exact_entries(&gf, &pt), 1e-12));
            let adj = linearization_matrix(&gf, &pt).unwrap().adjugate().scale(2.0);
            prop_assert!(close(&h, &adj, 1e-10 * (1.0 + h.max_abs())));
        }
    }
}
