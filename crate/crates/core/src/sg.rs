//! Semigeostrophic fields on one branch of a solution: absolute momentum
//! `(M, N)`, scaled potential temperature `eps theta`, the geostrophic wind and
//! the full velocity from the linear momentum balance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chart::{ChartPoint, GeneratingFunction};
use crate::error::{Error, Result};
use crate::grid::Axis;
use crate::linalg::{det3, solve3, Mat3, Sym3};
use crate::metric::{classify, immersion, SignatureLabel, DEFAULT_ZERO_TOL};
use crate::poly::{int, to_f64, Rational};
use crate::singular::{branch_select_convex, fiber_solve, FiberOptions};
use crate::table::{fmt_f64, Csv};

/// Rossby number; the potential vorticity follows as `q_g = eps_q / epsilon`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonChoice {
    pub epsilon: Rational,
}

impl Default for EpsilonChoice {
    fn default() -> Self {
        EpsilonChoice { epsilon: int(1) }
    }
}

impl EpsilonChoice {
    pub fn new(epsilon: Rational) -> Result<Self> {
        if epsilon <= int(0) {
            return Err(Error::InvalidInput("epsilon must be positive".into()));
        }
        Ok(EpsilonChoice { epsilon })
    }

    pub fn q_g(&self, gf: &GeneratingFunction) -> Rational {
        gf.eps_q() / &self.epsilon
    }

    pub fn epsilon_f64(&self) -> f64 {
        to_f64(&self.epsilon)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchLabel {
    Elliptic,
    Hyperbolic,
    Degenerate,
}

/// Which preimage of a base point to follow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// The branch on which `P` is convex.
    Convex,
    /// Position in the fiber as returned by [`fiber_solve`].
    Index(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SGState {
    pub base: [f64; 3],
    pub chart_point: ChartPoint,
    #[serde(rename = "P")]
    pub p_value: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub theta_eps: f64,
    pub u_g: f64,
    pub v_g: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub branch_label: BranchLabel,
    pub hessian_p: Sym3,
    /// The wind relations are only established for `eps_q = 1`.
    pub outside_verified_regime: bool,
}

fn system(hess: &Sym3, epsilon: f64) -> Mat3 {
    let h = hess.to_matrix();
    [h[0], h[1], h[2].map(|v| v / epsilon)]
}

/// Solves `grad M . u = u_g`, `grad N . u = v_g`, `grad theta . u = 0`.
pub fn velocity_reconstruct(state: &SGState, eps: &EpsilonChoice) -> Result<[f64; 3]> {
    let a = system(&state.hessian_p, eps.epsilon_f64());
    let d = det3(&a);
    if d == 0.0 || !d.is_finite() {
        return Err(Error::Degenerate(format!("momentum balance is singular at {:?}", state.base)));
    }
    solve3(&a, &[state.u_g, state.v_g, 0.0])
        .ok_or_else(|| Error::Degenerate(format!("momentum balance is singular at {:?}", state.base)))
}

/// Left side minus right side of the momentum balance for the stored velocity.
pub fn balance_residual(state: &SGState, eps: &EpsilonChoice) -> [f64; 3] {
    let a = system(&state.hessian_p, eps.epsilon_f64());
    let vel = [state.u, state.v, state.w];
    let rhs = [state.u_g, state.v_g, 0.0];
    std::array::from_fn(|i| (0..3).map(|j| a[i][j] * vel[j]).sum::<f64>() - rhs[i])
}

/// The full state on the chosen branch over `base`.
pub fn branch_state(
    gf: &GeneratingFunction,
    base: [f64; 3],
    branch: Branch,
    eps: &EpsilonChoice,
    opts: &FiberOptions,
) -> Result<SGState> {
    let bp = fiber_solve(gf, base, opts)?;
    if bp.fibers.is_empty() {
        return Err(Error::Domain(format!("{base:?} has no preimage on the solution")));
    }
    let idx = match branch {
        Branch::Convex => match branch_select_convex(&bp).index {
            Some(i) => i,
            None if bp.fibers.iter().any(|f| f.degenerate) => {
                return Err(Error::Degenerate(format!("{base:?} lies on the caustic")))
            }
            None => return Err(Error::Domain(format!("no convex branch over {base:?}"))),
        },
        Branch::Index(i) if i < bp.fibers.len() => i,
        Branch::Index(i) => {
            return Err(Error::Domain(format!("fiber over {base:?} has {} points, asked for {i}", bp.fibers.len())))
        }
    };
    let fp = &bp.fibers[idx];
    if fp.degenerate {
        return Err(Error::Degenerate(format!("{base:?} lies on the caustic")));
    }
    let hess = fp
        .branch_hessian
        .ok_or_else(|| Error::Degenerate(format!("branch Hessian undefined over {base:?}")))?;
    let amb = immersion(gf, &fp.chart_point);
    let q_g = to_f64(&eps.q_g(gf));
    let label = match classify(gf, &fp.chart_point, DEFAULT_ZERO_TOL).label {
        SignatureLabel::Elliptic => BranchLabel::Elliptic,
        SignatureLabel::Hyperbolic => BranchLabel::Hyperbolic,
        _ => BranchLabel::Degenerate,
    };
    let mut st = SGState {
        base,
        chart_point: fp.chart_point,
        p_value: fp.p_value,
        m: amb.px,
        n: amb.py,
        theta_eps: amb.pz,
        u_g: q_g * (base[1] - amb.py),
        v_g: q_g * (amb.px - base[0]),
        u: 0.0,
        v: 0.0,
        w: 0.0,
        branch_label: label,
        hessian_p: hess,
        outside_verified_regime: gf.eps_q() != &int(1),
    };
    let [u, v, w] = velocity_reconstruct(&st, eps)?;
    st.u = u;
    st.v = v;
    st.w = w;
    Ok(st)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainFlag {
    Ok,
    /// No preimage, or no branch of the requested kind.
    Outside,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindRow {
    pub base: [f64; 3],
    pub flag: DomainFlag,
    pub state: Option<SGState>,
}

/// Section `y = const` of physical space.
#[derive(Clone, Debug)]
pub struct Section {
    pub x: Axis,
    pub z: Axis,
    pub y: f64,
}

pub const WIND_CSV_COLUMNS: [&str; 14] =
    ["x", "y", "z", "domain_flag", "P", "M", "N", "theta_eps", "u_g", "v_g", "u", "v", "w", "|v|"];

/// Per-node states over a section in row-major `(x, z)` order.
pub fn wind_field_sweep(
    gf: &GeneratingFunction,
    branch: Branch,
    section: &Section,
    eps: &EpsilonChoice,
    opts: &FiberOptions,
) -> Vec<WindRow> {
    let xs = section.x.nodes_f64();
    let zs = section.z.nodes_f64();
    let bases: Vec<[f64; 3]> = xs.iter().flat_map(|&x| zs.iter().map(move |&z| [x, section.y, z])).collect();
    bases
        .par_iter()
        .map(|&b| match branch_state(gf, b, branch, eps, opts) {
            Ok(st) => WindRow { base: b, flag: DomainFlag::Ok, state: Some(st) },
            Err(Error::Degenerate(_)) => WindRow { base: b, flag: DomainFlag::Degenerate, state: None },
            Err(_) => WindRow { base: b, flag: DomainFlag::Outside, state: None },
        })
        .collect()
}

pub fn wind_csv(rows: &[WindRow]) -> String {
    let mut c = Csv::with_header(&WIND_CSV_COLUMNS);
    for r in rows {
        let mut f: Vec<String> = r.base.iter().map(|v| fmt_f64(*v)).collect();
        f.push(
            match r.flag {
                DomainFlag::Ok => "ok",
                DomainFlag::Outside => "outside",
                DomainFlag::Degenerate => "degenerate",
            }
            .to_string(),
        );
        match &r.state {
            Some(s) => f.extend(
                [s.p_value, s.m, s.n, s.theta_eps, s.u_g, s.v_g, s.u, s.v, s.w, s.v.abs()].map(fmt_f64),
            ),
            None => f.extend(std::iter::repeat_n(String::new(), 10)),
        }
        c.row(f);
    }
    if rows.iter().any(|r| r.state.as_ref().is_some_and(|s| s.outside_verified_regime)) {
        c.comment("eps_q != 1: wind relations used outside their verified regime");
    }
    c.finish()
}
