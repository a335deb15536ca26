//! Charts on a Lagrangian submanifold of the phase space `(x, y, z, X, Y, Z)`
//! and the generating functions that define the submanifold in each chart.
//!
//! | chart | coordinates | remaining coordinates                    |
//! |-------|-------------|------------------------------------------|
//! | `P`   | `x, y, z`   | `X = P_x, Y = P_y, Z = P_z`              |
//! | `R`   | `X, Y, Z`   | `x = R_X, y = R_Y, z = R_Z`              |
//! | `S`   | `X, Y, z`   | `x = S_X, y = S_Y, Z = -S_z`             |
//! | `T`   | `x, y, Z`   | `z = -T_Z, X = T_x, Y = T_y`             |

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{format_rational, parse_poly, parse_rational, NumPoly, Poly, Rational};

/// Ambient coordinate names in storage order.
pub const AMBIENT: [&str; 6] = ["x", "y", "z", "X", "Y", "Z"];

pub type ChartPoint = [f64; 3];

/// A point of the phase space `T*R^3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    #[serde(rename = "X")]
    pub px: f64,
    #[serde(rename = "Y")]
    pub py: f64,
    #[serde(rename = "Z")]
    pub pz: f64,
}

impl AmbientPoint {
    pub fn from_array(a: [f64; 6]) -> Self {
        AmbientPoint {
            x: a[0],
            y: a[1],
            z: a[2],
            px: a[3],
            py: a[4],
            pz: a[5],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.x, self.y, self.z, self.px, self.py, self.pz]
    }

    /// Bundle projection to physical space.
    pub fn base(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn momentum(&self) -> [f64; 3] {
        [self.px, self.py, self.pz]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartKind {
    /// Graph of a classical geopotential `P(x, y, z)`.
    #[serde(rename = "P")]
    ClassicalP,
    #[serde(rename = "R")]
    DualR,
    #[serde(rename = "S")]
    DualS,
    #[serde(rename = "T")]
    DualT,
}

impl ChartKind {
    pub const ALL: [ChartKind; 4] = [
        ChartKind::ClassicalP,
        ChartKind::DualR,
        ChartKind::DualS,
        ChartKind::DualT,
    ];

    pub fn variables(self) -> [&'static str; 3] {
        match self {
            ChartKind::ClassicalP => ["x", "y", "z"],
            ChartKind::DualR => ["X", "Y", "Z"],
            ChartKind::DualS => ["X", "Y", "z"],
            ChartKind::DualT => ["x", "y", "Z"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChartKind::ClassicalP => "P",
            ChartKind::DualR => "R",
            ChartKind::DualS => "S",
            ChartKind::DualT => "T",
        }
    }
}

impl fmt::Display for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChartKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "P" => Ok(ChartKind::ClassicalP),
            "R" => Ok(ChartKind::DualR),
            "S" => Ok(ChartKind::DualS),
            "T" => Ok(ChartKind::DualT),
            other => Err(Error::UnknownChart(other.to_string())),
        }
    }
}

/// Symbolic data derived once from a generating function.
pub(crate) struct Derived {
    pub immersion: [Poly; 6],
    /// `jacobian[k][j] = d(ambient_k) / d(chart_j)`
    pub jacobian: [[Poly; 3]; 6],
    pub hessian: [[Poly; 3]; 3],
    pub metric: [[Poly; 3]; 3],
    pub dpi: Poly,
    pub num_dpi: NumPoly,
    /// Geopotential on the branch through a chart point, for the dual charts.
    pub geopotential: Option<Poly>,
    pub num_geopotential: Option<NumPoly>,
    pub num_immersion: [NumPoly; 6],
    pub num_jacobian: [[NumPoly; 3]; 6],
    pub num_hessian: [[NumPoly; 3]; 3],
    pub num_metric: [[NumPoly; 3]; 3],
    /// `num_metric_grad[k][i][j] = d h_ij / d q_k`
    pub num_metric_grad: [[[NumPoly; 3]; 3]; 3],
}

/// A chart, a polynomial potential over its coordinates and the constant
/// `eps_q` (the product of Rossby number and potential vorticity).
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "GfRecord", into = "GfRecord")]
pub struct GeneratingFunction {
    chart: ChartKind,
    potential: Poly,
    eps_q: Rational,
    derived: Arc<Derived>,
}

/// Serialized form: `{"chart": "T", "potential": "...", "eps_q": "1"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GfRecord {
    pub chart: String,
    pub potential: String,
    pub eps_q: String,
}

impl TryFrom<GfRecord> for GeneratingFunction {
    type Error = Error;

    fn try_from(r: GfRecord) -> Result<Self> {
        let chart: ChartKind = r.chart.parse()?;
        let eps_q = parse_rational(&r.eps_q)?;
        GeneratingFunction::parse(chart, &r.potential, eps_q)
    }
}

impl From<GeneratingFunction> for GfRecord {
    fn from(gf: GeneratingFunction) -> Self {
        GfRecord {
            chart: gf.chart.name().to_string(),
            potential: gf.potential.to_string(),
            eps_q: format_rational(&gf.eps_q),
        }
    }
}

impl fmt::Debug for GeneratingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratingFunction")
            .field("chart", &self.chart)
            .field("potential", &self.potential.to_string())
            .field("eps_q", &format_rational(&self.eps_q))
            .finish()
    }
}

impl PartialEq for GeneratingFunction {
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart && self.potential == other.potential && self.eps_q == other.eps_q
    }
}

fn compile3(p: &[Poly; 3]) -> [NumPoly; 3] {
    std::array::from_fn(|i| p[i].compile())
}

fn compile33(p: &[[Poly; 3]; 3]) -> [[NumPoly; 3]; 3] {
    std::array::from_fn(|i| compile3(&p[i]))
}

pub(crate) fn det3_poly(m: &[[&Poly; 3]; 3]) -> Poly {
    let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
        &(m[r0][c0] * m[r1][c1]) - &(m[r0][c1] * m[r1][c0])
    };
    &(&(m[0][0] * &minor(1, 2, 1, 2)) - &(m[0][1] * &minor(1, 2, 0, 2))) + &(m[0][2] * &minor(1, 2, 0, 1))
}

impl GeneratingFunction {
    pub fn new(chart: ChartKind, potential: Poly, eps_q: Rational) -> Result<Self> {
        if !eps_q.is_positive() {
            return Err(Error::InvalidEpsQ(format_rational(&eps_q)));
        }
        let expected = chart.variables();
        if potential.variables() != expected {
            return Err(Error::ChartVariables {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                got: potential.variables().to_vec(),
            });
        }
        let derived = Arc::new(derive(chart, &potential, &eps_q));
        Ok(GeneratingFunction {
            chart,
            potential,
            eps_q,
            derived,
        })
    }

    /// Parses the potential over the chart's variables.
    pub fn parse(chart: ChartKind, potential: &str, eps_q: Rational) -> Result<Self> {
        let p = parse_poly(potential, &chart.variables())?;
        Self::new(chart, p, eps_q)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: GfRecord =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        rec.try_into()
    }

    pub fn to_record(&self) -> GfRecord {
        self.clone().into()
    }

    pub fn chart(&self) -> ChartKind {
        self.chart
    }

    pub fn potential(&self) -> &Poly {
        &self.potential
    }

    pub fn eps_q(&self) -> &Rational {
        &self.eps_q
    }

    pub fn eps_q_f64(&self) -> f64 {
        crate::poly::to_f64(&self.eps_q)
    }

    pub(crate) fn derived(&self) -> &Derived {
        &self.derived
    }

    /// The six ambient coordinates as polynomials in the chart variables.
    pub fn immersion_polys(&self) -> &[Poly; 6] {
        &self.derived.immersion
    }

    /// `d(ambient_k)/d(chart_j)` as exact polynomials.
    pub fn jacobian_polys(&self) -> &[[Poly; 3]; 6] {
        &self.derived.jacobian
    }

    /// Second derivatives of the potential in the chart's own variables.
    pub fn hessian_polys(&self) -> &[[Poly; 3]; 3] {
        &self.derived.hessian
    }

    /// Exact pull-back metric entries `J^T G J`.
    pub fn metric_polys(&self) -> &[[Poly; 3]; 3] {
        &self.derived.metric
    }

    /// Same generating function with a different potential (same chart and `eps_q`).
    pub fn with_potential(&self, potential: Poly) -> Result<Self> {
        Self::new(self.chart, potential, self.eps_q.clone())
    }
}

fn derive(chart: ChartKind, pot: &Poly, eps_q: &Rational) -> Derived {
    let q = |i: usize| pot.monomial(i, 1, Rational::one());
    let d = |i: usize| pot.diff_index(i);
    let immersion: [Poly; 6] = match chart {
        ChartKind::ClassicalP => [q(0), q(1), q(2), d(0), d(1), d(2)],
        ChartKind::DualR => [d(0), d(1), d(2), q(0), q(1), q(2)],
        ChartKind::DualS => [d(0), d(1), q(2), q(0), q(1), -d(2)],
        ChartKind::DualT => [q(0), q(1), -d(2), d(0), d(1), q(2)],
    };
    let jacobian: [[Poly; 3]; 6] =
        std::array::from_fn(|k| std::array::from_fn(|j| immersion[k].diff_index(j)));
    let hessian: [[Poly; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| pot.diff_index(i).diff_index(j)));
    // g = eps_q (dx dX + dX dx + ...), so h_ij = eps_q sum_k (J_ki J_(k+3)j + J_(k+3)i J_kj)
    let metric: [[Poly; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = pot.empty_like();
            for k in 0..3 {
                acc = acc + &jacobian[k][i] * &jacobian[k + 3][j];
                acc = acc + &jacobian[k + 3][i] * &jacobian[k][j];
            }
            acc.scale(eps_q)
        })
    });
    let dpi = det3_poly(&std::array::from_fn(|i| std::array::from_fn(|j| &jacobian[i][j])));
    let geopotential = match chart {
        ChartKind::ClassicalP => None,
        ChartKind::DualR => Some(&(&(&(&q(0) * &immersion[0]) + &(&q(1) * &immersion[1])) + &(&q(2) * &immersion[2])) - pot),
        ChartKind::DualS => Some(&(&(&q(0) * &immersion[0]) + &(&q(1) * &immersion[1])) - pot),
        ChartKind::DualT => Some(&(&q(2) * &immersion[2]) + pot),
    };
    let num_metric_grad = std::array::from_fn(|k| {
        std::array::from_fn(|i| std::array::from_fn(|j| metric[i][j].diff_index(k).compile()))
    });
    Derived {
        num_immersion: std::array::from_fn(|k| immersion[k].compile()),
        num_jacobian: std::array::from_fn(|k| compile3(&jacobian[k])),
        num_hessian: compile33(&hessian),
        num_metric: compile33(&metric),
        num_metric_grad,
        num_dpi: dpi.compile(),
        num_geopotential: geopotential.as_ref().map(Poly::compile),
        geopotential,
        immersion,
        jacobian,
        hessian,
        metric,
        dpi,
    }
}

/// The fold-deformation example `T = y^2/2 - x^2 Z/2 + Z^3/6` with `eps_q = 1`.
pub fn fold_example() -> GeneratingFunction {
    GeneratingFunction::parse(
        ChartKind::DualT,
        "y^2/2 - x^2*Z/2 + Z^3/6",
        Rational::one(),
    )
    .expect("built-in example parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    #[test]
    fn rejects_bad_eps_and_variables() {
        let p = parse_poly("x^2", &["x", "y", "z"]).unwrap();
        assert!(matches!(
            GeneratingFunction::new(ChartKind::ClassicalP, p.clone(), int(0)),
            Err(Error::InvalidEpsQ(_))
        ));
        assert!(matches!(
            GeneratingFunction::new(ChartKind::DualT, p, int(1)),
            Err(Error::ChartVariables { .. })
        ));
        assert!(GeneratingFunction::parse(ChartKind::DualT, "x^2 + z", int(1)).is_err());
    }

    #[test]
    fn record_round_trip() {
        let gf = fold_example();
        let json = serde_json::to_string(&gf).unwrap();
        assert_eq!(
            json,
            r#"{"chart":"T","potential":"-1/2*x^2*Z + 1/6*Z^3 + 1/2*y^2","eps_q":"1"}"#
        );
        let back = GeneratingFunction::from_json(&json).unwrap();
        assert_eq!(back, gf);
        let bad = r#"{"chart":"Q","potential":"x","eps_q":"1"}"#;
        assert!(matches!(
            GeneratingFunction::from_json(bad),
            Err(Error::UnknownChart(_))
        ));
        let extra = r#"{"chart":"T","potential":"x","eps_q":"1","foo":1}"#;
        assert!(GeneratingFunction::from_json(extra).is_err());
        let neg = r#"{"chart":"T","potential":"x","eps_q":"-1/2"}"#;
        assert!(GeneratingFunction::from_json(neg).is_err());
    }

    #[test]
    fn dual_t_immersion_polys() {
        let gf = fold_example();
        let v = gf.chart().variables();
        let im = gf.immersion_polys();
        assert_eq!(im[2], parse_poly("x^2/2 - Z^2/2", &v).unwrap());
        assert_eq!(im[3], parse_poly("-x*Z", &v).unwrap());
        assert_eq!(im[4], parse_poly("y", &v).unwrap());
        assert_eq!(gf.eps_q(), &rat(1, 1));
    }
}
