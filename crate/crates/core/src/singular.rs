//! Where the solution surface folds over physical space: the singular locus
//! of the projection, its caustic image, fibers over base points and the
//! multivalued geopotential with its convex branch.

use rayon::prelude::*;
use serde::Serialize;

use crate::chart::{ChartKind, ChartPoint, GeneratingFunction};
use crate::error::{Error, Result};
use crate::grid::Axis;
use crate::linalg::{inverse3, mat_mul, Mat3, Sym3};
use crate::metric::{immersion, immersion_jacobian};
use crate::poly::{from_f64, Poly, Rational};
use crate::table::{fmt_f64, Csv};

/// Determinant of the differential of `(x, y, z)` along the surface.
pub fn dpi_det(gf: &GeneratingFunction, pt: &ChartPoint) -> f64 {
    gf.derived().num_dpi.eval(pt)
}

/// Exact polynomial whose zero set in chart coordinates is the singular locus.
pub fn singular_locus_poly(gf: &GeneratingFunction) -> Poly {
    gf.derived().dpi.clone()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CausticSample {
    pub chart_point: [f64; 3],
    pub base_point: [f64; 3],
    pub det_dpi: f64,
    pub multiplicity: u32,
}

/// Nodes over two chart variables; the third is solved for.
#[derive(Clone, Debug)]
pub struct SliceGrid {
    free: [usize; 2],
    axes: [Axis; 2],
}

impl SliceGrid {
    pub fn new(free: [usize; 2], axes: [Axis; 2]) -> Result<Self> {
        if free[0] == free[1] || free.iter().any(|&i| i > 2) {
            return Err(Error::InvalidInput(format!("bad free chart indices {free:?}")));
        }
        Ok(SliceGrid { free, axes })
    }

    pub fn solved(&self) -> usize {
        3 - self.free[0] - self.free[1]
    }

    fn nodes(&self) -> Vec<[Rational; 2]> {
        let a = self.axes[0].nodes();
        let b = self.axes[1].nodes();
        a.iter()
            .flat_map(|u| b.iter().map(move |v| [u.clone(), v.clone()]))
            .collect()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CausticSweep {
    /// Samples in row-major node order, roots ascending within a node.
    pub samples: Vec<CausticSample>,
    /// Nodes where the locus vanishes identically along the solved variable.
    pub skipped: Vec<[f64; 2]>,
    /// Roots dropped because `|det_dpi|` exceeded the tolerance after evaluation.
    pub rejected: usize,
}

impl CausticSweep {
    pub const CSV_COLUMNS: [&'static str; 8] = ["q1", "q2", "q3", "x", "y", "z", "det_dpi", "multiplicity"];

    pub fn to_csv(&self) -> String {
        let mut c = Csv::with_header(&Self::CSV_COLUMNS);
        for s in &self.samples {
            let mut f: Vec<String> = s.chart_point.iter().chain(&s.base_point).map(|v| fmt_f64(*v)).collect();
            f.push(fmt_f64(s.det_dpi));
            f.push(s.multiplicity.to_string());
            c.row(f);
        }
        c.finish()
    }
}

enum SliceOutcome {
    Samples(Vec<CausticSample>, usize),
    Skipped([f64; 2]),
}

/// Projects the singular locus to physical space over a grid of slices.
pub fn caustic_sweep(gf: &GeneratingFunction, grid: &SliceGrid, tol: f64) -> CausticSweep {
    let locus = singular_locus_poly(gf);
    let solved = grid.solved();
    let outcomes: Vec<SliceOutcome> = grid
        .nodes()
        .par_iter()
        .map(|[a, b]| {
            let slice = locus.fix(grid.free[0], a).fix(grid.free[1], b);
            let uni = slice.to_univariate(solved).expect("other variables were fixed");
            let fa = crate::poly::to_f64(a);
            let fb = crate::poly::to_f64(b);
            let Some(roots) = uni.real_roots() else {
                return SliceOutcome::Skipped([fa, fb]);
            };
            let mut out = Vec::new();
            let mut rejected = 0;
            for r in roots {
                let mut pt = [0.0; 3];
                pt[grid.free[0]] = fa;
                pt[grid.free[1]] = fb;
                pt[solved] = r.value;
                let det = dpi_det(gf, &pt);
                if det.abs() > tol {
                    rejected += 1;
                    continue;
                }
                out.push(CausticSample {
                    chart_point: pt,
                    base_point: immersion(gf, &pt).base(),
                    det_dpi: det,
                    multiplicity: r.multiplicity,
                });
            }
            SliceOutcome::Samples(out, rejected)
        })
        .collect();
    let mut sweep = CausticSweep::default();
    for o in outcomes {
        match o {
            SliceOutcome::Samples(s, r) => {
                sweep.samples.extend(s);
                sweep.rejected += r;
            }
            SliceOutcome::Skipped(n) => sweep.skipped.push(n),
        }
    }
    sweep
}

/// Exact geopotential on the branch through each chart point (dual charts only).
pub fn multivalued_p_poly(gf: &GeneratingFunction) -> Result<Poly> {
    gf.derived().geopotential.clone().ok_or(Error::UnsupportedChart {
        operation: "multivalued_P",
        chart: gf.chart(),
    })
}

/// Geopotential value and base point of the branch through `pt`.
#[allow(non_snake_case)]
pub fn multivalued_P(gf: &GeneratingFunction, pt: &ChartPoint) -> Result<(f64, [f64; 3])> {
    let p = gf.derived().num_geopotential.as_ref().ok_or(Error::UnsupportedChart {
        operation: "multivalued_P",
        chart: gf.chart(),
    })?;
    Ok((p.eval(pt), immersion(gf, pt).base()))
}

/// Hessian of the local branch of `P` at a chart point: `B T^-1` with `T`, `B`
/// the base and momentum blocks of the immersion Jacobian. `None` on the
/// singular locus.
pub fn branch_hessian(gf: &GeneratingFunction, pt: &ChartPoint) -> Option<Sym3> {
    let j = immersion_jacobian(gf, pt);
    let top: Mat3 = [j[0], j[1], j[2]];
    let bottom: Mat3 = [j[3], j[4], j[5]];
    let inv = inverse3(&top)?;
    let m = mat_mul(&bottom, &inv);
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return None;
    }
    Some(Sym3::from_matrix(&m))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberPoint {
    pub chart_point: [f64; 3],
    #[serde(rename = "P")]
    pub p_value: f64,
    pub convex: bool,
    /// On the singular locus (a merged double root or a vanishing `det_dpi`).
    pub degenerate: bool,
    pub multiplicity: u32,
    pub branch_hessian: Option<Sym3>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedFailure {
    pub seed: [f64; 3],
    pub reason: String,
}

/// All preimages of a base point on the solution surface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchPoint {
    pub base_point: [f64; 3],
    pub fibers: Vec<FiberPoint>,
    /// Newton seeds that did not converge.
    pub failures: Vec<SeedFailure>,
}

impl BranchPoint {
    pub fn fiber_values(&self) -> Vec<[f64; 3]> {
        self.fibers.iter().map(|f| f.chart_point).collect()
    }

    pub fn p_values(&self) -> Vec<f64> {
        self.fibers.iter().map(|f| f.p_value).collect()
    }

    pub fn convex_flags(&self) -> Vec<bool> {
        self.fibers.iter().map(|f| f.convex).collect()
    }
}

#[derive(Clone, Debug)]
pub struct FiberOptions {
    /// Starting points for Newton iteration on charts without a polynomial fiber equation.
    pub seeds: Vec<ChartPoint>,
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Leading minors must exceed this for a branch to count as convex.
    pub convex_tol: f64,
    pub degenerate_tol: f64,
}

impl Default for FiberOptions {
    fn default() -> Self {
        FiberOptions {
            seeds: Vec::new(),
            newton_tol: 1e-12,
            max_iter: 60,
            convex_tol: 1e-9,
            degenerate_tol: 1e-9,
        }
    }
}

fn exact(v: f64, what: &str) -> Result<Rational> {
    from_f64(v).ok_or_else(|| Error::Domain(format!("{what} must be finite, got {v}")))
}

fn fiber_point(gf: &GeneratingFunction, pt: ChartPoint, multiplicity: u32, opts: &FiberOptions) -> FiberPoint {
    let p_value = match gf.chart() {
        ChartKind::ClassicalP => gf.potential().eval(&pt).unwrap_or(f64::NAN),
        _ => multivalued_P(gf, &pt).map(|r| r.0).unwrap_or(f64::NAN),
    };
    let degenerate = multiplicity > 1 || dpi_det(gf, &pt).abs() <= opts.degenerate_tol;
    let branch_hessian = if degenerate { None } else { branch_hessian(gf, &pt) };
    let convex = branch_hessian
        .as_ref()
        .is_some_and(|h| h.leading_minors().iter().all(|m| *m > opts.convex_tol));
    FiberPoint {
        chart_point: pt,
        p_value,
        convex,
        degenerate,
        multiplicity,
        branch_hessian,
    }
}

fn newton(gf: &GeneratingFunction, base: &[f64; 3], seed: ChartPoint, opts: &FiberOptions) -> Result<ChartPoint, String> {
    let mut q = seed;
    for _ in 0..opts.max_iter {
        let b = immersion(gf, &q).base();
        let r = [b[0] - base[0], b[1] - base[1], b[2] - base[2]];
        let scale = 1.0 + base.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if r.iter().all(|v| v.abs() <= opts.newton_tol * scale) {
            return Ok(q);
        }
        let j = immersion_jacobian(gf, &q);
        let top: Mat3 = [j[0], j[1], j[2]];
        let step = crate::linalg::solve3(&top, &r).ok_or("singular projection Jacobian")?;
        for i in 0..3 {
            q[i] -= step[i];
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err("iterate became non-finite".into());
        }
    }
    Err(format!("no convergence in {} iterations", opts.max_iter))
}

/// Finds every preimage of `base`. For the `T` chart the fiber equation
/// `z + T_Z(x, y, Z) = 0` is solved exactly as a polynomial in `Z`; the `P`
/// chart has the base itself as sole preimage; `R` and `S` use Newton from
/// `opts.seeds`.
pub fn fiber_solve(gf: &GeneratingFunction, base: [f64; 3], opts: &FiberOptions) -> Result<BranchPoint> {
    let mut out = BranchPoint {
        base_point: base,
        fibers: Vec::new(),
        failures: Vec::new(),
    };
    match gf.chart() {
        ChartKind::ClassicalP => {
            out.fibers.push(fiber_point(gf, base, 1, opts));
        }
        ChartKind::DualT => {
            let [x, y, z] = [exact(base[0], "x")?, exact(base[1], "y")?, exact(base[2], "z")?];
            let eq = &gf.immersion_polys()[2].fix(0, &x).fix(1, &y) - &gf.potential().constant_like(z);
            let uni = eq.to_univariate(2)?;
            let roots = uni.real_roots().ok_or_else(|| {
                Error::Degenerate(format!("fiber equation vanishes identically over {base:?}"))
            })?;
            for r in roots {
                out.fibers.push(fiber_point(gf, [base[0], base[1], r.value], r.multiplicity, opts));
            }
        }
        ChartKind::DualR | ChartKind::DualS => {
            if opts.seeds.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "chart {} needs Newton seeds for fiber solving",
                    gf.chart()
                )));
            }
            for seed in &opts.seeds {
                match newton(gf, &base, *seed, opts) {
                    Ok(q) => {
                        let dup = out.fibers.iter().any(|f| {
                            f.chart_point.iter().zip(&q).all(|(a, b)| (a - b).abs() <= 1e-8 * (1.0 + a.abs()))
                        });
                        if !dup {
                            out.fibers.push(fiber_point(gf, q, 1, opts));
                        }
                    }
                    Err(reason) => out.failures.push(SeedFailure { seed: *seed, reason }),
                }
            }
        }
    }
    Ok(out)
}

/// Fiber solves over many base points, in input order.
pub fn fiber_sweep(gf: &GeneratingFunction, bases: &[[f64; 3]], opts: &FiberOptions) -> Vec<Result<BranchPoint>> {
    bases.par_iter().map(|b| fiber_solve(gf, *b, opts)).collect()
}

pub const BRANCH_CSV_COLUMNS: [&str; 10] = ["x", "y", "z", "q1", "q2", "q3", "P", "convex", "degenerate", "multiplicity"];

/// One row per fiber point; bases with an empty fiber produce no rows.
pub fn branch_csv(points: &[BranchPoint]) -> String {
    let mut c = Csv::with_header(&BRANCH_CSV_COLUMNS);
    for bp in points {
        for f in &bp.fibers {
            let mut row: Vec<String> = bp.base_point.iter().chain(&f.chart_point).map(|v| fmt_f64(*v)).collect();
            row.push(fmt_f64(f.p_value));
            row.push(f.convex.to_string());
            row.push(f.degenerate.to_string());
            row.push(f.multiplicity.to_string());
            c.row(row);
        }
    }
    c.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BranchSelection {
    pub index: Option<usize>,
    /// More than one convex branch; `index` is the first of them.
    pub ambiguous: bool,
}

/// Picks the branch with positive definite Hessian of `P`.
pub fn branch_select_convex(bp: &BranchPoint) -> BranchSelection {
    let convex: Vec<usize> = bp.fibers.iter().enumerate().filter(|(_, f)| f.convex).map(|(i, _)| i).collect();
    BranchSelection {
        index: convex.first().copied(),
        ambiguous: convex.len() > 1,
    }
}
