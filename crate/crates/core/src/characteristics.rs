//! Null covectors of the pull-back metric and the Hamiltonian flow of
//! `H(q, p) = h^{ij}(q) p_i p_j`, whose null integral curves are the
//! bicharacteristics.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::chart::{ChartKind, ChartPoint, GeneratingFunction};
use crate::error::{Error, Result};
use crate::linalg::Sym3;
use crate::metric::pullback_metric_exact_entries;
use crate::poly::{exact_sqrt, Poly, Rational};
use crate::table::{fmt_f64, Csv};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BicharState {
    pub q: [f64; 3],
    pub p: [f64; 3],
    pub s: f64,
}

impl BicharState {
    pub fn new(q: [f64; 3], p: [f64; 3]) -> Self {
        BicharState { q, p, s: 0.0 }
    }

    /// Same point with the covector negated, which reverses the flow direction.
    pub fn reversed(&self) -> Self {
        BicharState {
            p: self.p.map(|v| -v),
            ..*self
        }
    }
}

fn inverse_metric(gf: &GeneratingFunction, q: &ChartPoint) -> Result<(Sym3, Sym3)> {
    let h = pullback_metric_exact_entries(gf, q);
    let det = h.det();
    let scale = 1.0 + h.max_abs();
    if !det.is_finite() || det.abs() <= 1e-14 * scale * scale * scale {
        return Err(Error::SingularMetric { point: *q, det });
    }
    let inv = h.inverse().ok_or(Error::SingularMetric { point: *q, det })?;
    Ok((h, inv))
}

/// `p^T h^-1 p` at `state.q`.
pub fn hamiltonian(gf: &GeneratingFunction, state: &BicharState) -> Result<f64> {
    let (_, inv) = inverse_metric(gf, &state.q)?;
    Ok(inv.quad_form(&state.p))
}

/// Completes a covector to a null one by solving the quadratic `H = 0` for
/// component `free`. `fixed` lists the other two components in index order.
/// Returns zero, one or two completions, ascending in the free component.
pub fn null_project(gf: &GeneratingFunction, q: &ChartPoint, fixed: [f64; 2], free: usize) -> Result<Vec<[f64; 3]>> {
    if free > 2 {
        return Err(Error::InvalidInput(format!("free index {free} out of range")));
    }
    let (_, inv) = inverse_metric(gf, q)?;
    let others: Vec<usize> = (0..3).filter(|&i| i != free).collect();
    let mut base = [0.0; 3];
    base[others[0]] = fixed[0];
    base[others[1]] = fixed[1];
    let a = inv.get(free, free);
    let b = 2.0 * others.iter().map(|&j| inv.get(free, j) * base[j]).sum::<f64>();
    let c = inv.quad_form(&base);
    let with = |t: f64| {
        let mut p = base;
        p[free] = t;
        p
    };
    let scale = 1.0 + inv.max_abs();
    if a.abs() <= 1e-14 * scale {
        if b.abs() <= 1e-14 * scale {
            return Ok(if c.abs() <= 1e-14 * scale { vec![base] } else { vec![] });
        }
        return Ok(vec![with(-c / b)]);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Ok(vec![]);
    }
    if disc == 0.0 {
        return Ok(vec![with(-b / (2.0 * a))]);
    }
    // Stable form avoiding cancellation.
    let r = -0.5 * (b + b.signum() * disc.sqrt());
    let (mut t0, mut t1) = if r == 0.0 {
        let t = (disc.sqrt()) / (2.0 * a);
        (t, -t)
    } else {
        (r / a, c / r)
    };
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    Ok(vec![with(t0), with(t1)])
}

/// Hamilton's equations: `q' = 2 h^-1 p`, `p'_i = w^T (d_i h) w` with `w = h^-1 p`.
pub fn ham_rhs(gf: &GeneratingFunction, state: &BicharState) -> Result<([f64; 3], [f64; 3])> {
    let (_, inv) = inverse_metric(gf, &state.q)?;
    let w = inv.mul_vec(&state.p);
    let grad = &gf.derived().num_metric_grad;
    let qdot = w.map(|v| 2.0 * v);
    let pdot = std::array::from_fn(|k| {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += w[i] * grad[k][i][j].eval(&state.q) * w[j];
            }
        }
        acc
    });
    Ok((qdot, pdot))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Termination {
    MaxSteps,
    ParabolicBoundary,
    DomainExit,
    Diverged,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogEntry {
    pub hamiltonian: f64,
    pub det_h: f64,
    /// Number of positive eigenvalues of the metric.
    #[serde(skip)]
    pub n_pos: usize,
    /// `(x' Z, y')` for metrics of the shape `diag(a Z, b, c Z)` in the `T` chart.
    pub conserved: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    pub states: Vec<BicharState>,
    pub termination: Termination,
    pub conserved_log: Vec<LogEntry>,
}

impl Trace {
    pub fn last(&self) -> &BicharState {
        self.states.last().expect("a trace holds its initial state")
    }

    pub fn max_hamiltonian_drift(&self) -> f64 {
        let h0 = self.conserved_log[0].hamiltonian;
        self.conserved_log.iter().fold(0.0f64, |m, e| m.max((e.hamiltonian - h0).abs()))
    }

    pub fn to_csv(&self) -> String {
        let has_c = self.conserved_log.iter().any(|e| e.conserved.is_some());
        let mut cols = vec!["s", "q1", "q2", "q3", "p1", "p2", "p3", "H", "det_h"];
        if has_c {
            cols.extend(["xdot_Z", "ydot"]);
        }
        let mut c = Csv::with_header(&cols);
        for (st, log) in self.states.iter().zip(&self.conserved_log) {
            let mut row: Vec<String> = std::iter::once(&st.s)
                .chain(&st.q)
                .chain(&st.p)
                .chain([&log.hamiltonian, &log.det_h])
                .map(|v| fmt_f64(*v))
                .collect();
            if let Some(k) = log.conserved {
                row.extend(k.iter().map(|v| fmt_f64(*v)));
            }
            c.row(row);
        }
        c.comment(&format!("termination: {}", self.termination));
        c.finish()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceOptions {
    pub step: f64,
    pub max_steps: usize,
    /// Stop once `|det h|` falls below this; `None` means `1e-6 |det h|` at the start.
    pub stop_tol: Option<f64>,
    /// Closed box `[lo, hi]` per chart coordinate.
    pub domain: [[f64; 2]; 3],
    /// Largest `|H|` accepted for the initial state.
    pub null_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            step: 1e-3,
            max_steps: 1000,
            stop_tol: None,
            domain: [[-1e6, 1e6]; 3],
            null_tol: 1e-10,
        }
    }
}

fn shows_example_invariants(gf: &GeneratingFunction) -> bool {
    if gf.chart() != ChartKind::DualT {
        return false;
    }
    let h = gf.metric_polys();
    let off_diagonal_zero = h[0][1].is_zero() && h[0][2].is_zero() && h[1][2].is_zero();
    let only_z = (0..3).all(|i| !h[i][i].depends_on(0) && !h[i][i].depends_on(1));
    let lin_z = |p: &Poly| p.degree_in(2).unwrap_or(0) <= 1 && p.constant_term() == Rational::from_integer(0.into());
    off_diagonal_zero && only_z && lin_z(&h[0][0]) && h[1][1].is_constant()
}

fn log_entry(gf: &GeneratingFunction, st: &BicharState, conserved: bool) -> Result<LogEntry> {
    let (h, inv) = inverse_metric(gf, &st.q)?;
    let c = if conserved {
        let w = inv.mul_vec(&st.p);
        Some([2.0 * w[0] * st.q[2], 2.0 * w[1]])
    } else {
        None
    };
    Ok(LogEntry {
        hamiltonian: inv.quad_form(&st.p),
        det_h: h.det(),
        n_pos: h.eigenvalues().iter().filter(|v| **v > 0.0).count(),
        conserved: c,
    })
}

fn rk4(gf: &GeneratingFunction, st: &BicharState, h: f64) -> Result<BicharState> {
    let shift = |st: &BicharState, k: &([f64; 3], [f64; 3]), a: f64| BicharState {
        q: std::array::from_fn(|i| st.q[i] + a * k.0[i]),
        p: std::array::from_fn(|i| st.p[i] + a * k.1[i]),
        s: st.s + a,
    };
    let k1 = ham_rhs(gf, st)?;
    let k2 = ham_rhs(gf, &shift(st, &k1, h / 2.0))?;
    let k3 = ham_rhs(gf, &shift(st, &k2, h / 2.0))?;
    let k4 = ham_rhs(gf, &shift(st, &k3, h))?;
    let comb = |a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3], base: [f64; 3]| {
        std::array::from_fn(|i| base[i] + h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]))
    };
    Ok(BicharState {
        q: comb(k1.0, k2.0, k3.0, k4.0, st.q),
        p: comb(k1.1, k2.1, k3.1, k4.1, st.p),
        s: st.s + h,
    })
}

/// Integrates the Hamiltonian flow with fixed-step classical RK4.
///
/// The parabolic boundary is detected when `|det h|` drops below the stop
/// tolerance (that state is kept) or when a step changes the sign of `det h`
/// or the number of positive eigenvalues of `h` (that step is discarded).
pub fn trace_bicharacteristic(gf: &GeneratingFunction, initial: BicharState, opts: &TraceOptions) -> Result<Trace> {
    if !(opts.step > 0.0 && opts.step.is_finite()) {
        return Err(Error::InvalidInput(format!("step must be positive, got {}", opts.step)));
    }
    let h0 = hamiltonian(gf, &initial)?;
    if h0.abs() > opts.null_tol {
        return Err(Error::NotNull(h0));
    }
    let conserved = shows_example_invariants(gf);
    let first = log_entry(gf, &initial, conserved)?;
    let stop_tol = opts.stop_tol.unwrap_or(1e-6 * first.det_h.abs());
    let inside = |q: &[f64; 3]| (0..3).all(|i| q[i] >= opts.domain[i][0] && q[i] <= opts.domain[i][1]);
    if !inside(&initial.q) {
        return Err(Error::Domain(format!("initial point {:?} lies outside the domain box", initial.q)));
    }
    let mut trace = Trace {
        states: vec![initial],
        termination: Termination::MaxSteps,
        conserved_log: vec![first],
    };
    let sign0 = first.det_h.signum();
    for _ in 0..opts.max_steps {
        let next = match rk4(gf, trace.last(), opts.step) {
            Ok(n) => n,
            Err(_) => {
                trace.termination = Termination::ParabolicBoundary;
                break;
            }
        };
        if next.q.iter().chain(&next.p).any(|v| !v.is_finite()) {
            trace.termination = Termination::Diverged;
            break;
        }
        if !inside(&next.q) {
            trace.termination = Termination::DomainExit;
            break;
        }
        let entry = match log_entry(gf, &next, conserved) {
            Ok(e) => e,
            Err(_) => {
                trace.termination = Termination::ParabolicBoundary;
                break;
            }
        };
        if entry.det_h.signum() != sign0 || entry.n_pos != first.n_pos {
            trace.termination = Termination::ParabolicBoundary;
            break;
        }
        trace.states.push(next);
        trace.conserved_log.push(entry);
        if entry.det_h.abs() < stop_tol {
            trace.termination = Termination::ParabolicBoundary;
            break;
        }
    }
    Ok(trace)
}

/// Traces from `initial` in both orientations (`p` and `-p`).
pub fn trace_both(gf: &GeneratingFunction, initial: BicharState, opts: &TraceOptions) -> Result<[Trace; 2]> {
    let fwd = trace_bicharacteristic(gf, initial, opts)?;
    let back = trace_bicharacteristic(gf, initial.reversed(), opts)?;
    Ok([fwd, back])
}

/// Independent traces over many initial states, in input order.
pub fn trace_sweep(gf: &GeneratingFunction, initials: &[BicharState], opts: &TraceOptions) -> Vec<Result<Trace>> {
    initials.par_iter().map(|st| trace_bicharacteristic(gf, *st, opts)).collect()
}

/// `(dF)^T h^-1 (dF)` at `pt`; zero when the level sets of `F` are characteristic.
pub fn eikonal_residual(gf: &GeneratingFunction, f: &Poly, pt: &ChartPoint) -> Result<f64> {
    let expected = gf.chart().variables();
    if f.variables() != expected {
        return Err(Error::ChartVariables {
            expected: expected.iter().map(|s| s.to_string()).collect(),
            got: f.variables().to_vec(),
        });
    }
    let grad: [f64; 3] = std::array::from_fn(|i| f.diff_index(i).compile().eval(pt));
    eikonal_residual_gradient(gf, &grad, pt)
}

/// Eikonal residual for a gradient supplied numerically.
pub fn eikonal_residual_gradient(gf: &GeneratingFunction, grad: &[f64; 3], pt: &ChartPoint) -> Result<f64> {
    let (_, inv) = inverse_metric(gf, pt)?;
    Ok(inv.quad_form(grad))
}

/// Which way `Z` moves along a null geodesic of the fold example.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Ascending,
    Descending,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Ascending => 1.0,
            Orientation::Descending => -1.0,
        }
    }
}

/// Displacements along a light-like geodesic of `2(-Z dx^2 + dy^2 - Z dZ^2)`
/// with `x' Z = c1`, `y' = c2`, between heights `z0` and `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NullGeodesic {
    /// Flow parameter elapsed; `y' = c2` fixes it as `dy / c2`.
    pub s: f64,
    pub dx: f64,
    pub dy: f64,
}

fn geodesic_domain(c1: f64, c2: f64, z0: f64, z: f64) -> Result<()> {
    if c2 == 0.0 || !c2.is_finite() {
        return Err(Error::Domain("c2 must be nonzero".into()));
    }
    for zz in [z0, z] {
        if c2 * c2 * zz < c1 * c1 {
            return Err(Error::Domain(format!("c2^2 Z >= c1^2 fails at Z = {zz}")));
        }
    }
    Ok(())
}

/// Closed-form displacements; orientation `Ascending` means `Z` increases with `s`.
pub fn analytic_null_geodesic(c1: f64, c2: f64, z0: f64, z: f64, orientation: Orientation) -> Result<NullGeodesic> {
    geodesic_domain(c1, c2, z0, z)?;
    let root = |zz: f64| (c2 * c2 * zz - c1 * c1).max(0.0).sqrt();
    let xpart = |zz: f64| 2.0 * c1 * root(zz) / (c2 * c2);
    let ypart = |zz: f64| 2.0 * root(zz) * (c2 * c2 * zz + 2.0 * c1 * c1) / (3.0 * c2 * c2 * c2);
    let sg = orientation.sign();
    let dy = sg * (ypart(z) - ypart(z0));
    Ok(NullGeodesic {
        s: dy / c2,
        dx: sg * (xpart(z) - xpart(z0)),
        dy,
    })
}

/// Exact version, available when both square roots are rational.
pub fn analytic_null_geodesic_exact(
    c1: &Rational,
    c2: &Rational,
    z0: &Rational,
    z: &Rational,
    orientation: Orientation,
) -> Result<(Rational, Rational, Rational)> {
    let zero = Rational::from_integer(0.into());
    if c2 == &zero {
        return Err(Error::Domain("c2 must be nonzero".into()));
    }
    let c22 = c2 * c2;
    let c12 = c1 * c1;
    let root = |zz: &Rational| {
        let u = &c22 * zz - &c12;
        if u < zero {
            return Err(Error::Domain("c2^2 Z >= c1^2 fails".into()));
        }
        exact_sqrt(&u).ok_or_else(|| Error::Domain("square root is irrational".into()))
    };
    let two = Rational::from_integer(2.into());
    let three = Rational::from_integer(3.into());
    let ypart = |zz: &Rational| -> Result<Rational> {
        Ok(&two * root(zz)? * (&c22 * zz + &two * &c12) / (&three * &c22 * c2))
    };
    let xpart = |zz: &Rational| -> Result<Rational> { Ok(&two * c1 * root(zz)? / &c22) };
    let sg = match orientation {
        Orientation::Ascending => Rational::from_integer(1.into()),
        Orientation::Descending => Rational::from_integer((-1).into()),
    };
    let dy = &sg * (ypart(z)? - ypart(z0)?);
    let dx = &sg * (xpart(z)? - xpart(z0)?);
    Ok((&dy / c2, dx, dy))
}

/// The null covector over `(x, y, Z)` of the fold example with `x' Z = c1`,
/// `y' = c2` and `Z` moving in the requested direction.
pub fn example_null_covector(c1: f64, c2: f64, z: f64, orientation: Orientation) -> Result<[f64; 3]> {
    let u = c2 * c2 * z - c1 * c1;
    if u < 0.0 || z <= 0.0 {
        return Err(Error::Domain(format!("no real null covector at Z = {z}")));
    }
    Ok([-c1, c2, -orientation.sign() * u.sqrt()])
}

/// Least-squares fit of `y = a x^k` on log scales; returns `(k, a)`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput("need at least two paired samples".into()));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan() || *v <= 0.0) {
        return Err(Error::InvalidInput("power-law fit needs positive samples".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("abscissae are all equal".into()));
    }
    let k = sxy / sxx;
    Ok((k, (my - k * mx).exp()))
}
