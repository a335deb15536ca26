//! Evenly spaced axes with exact rational nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{format_rational, int, parse_rational, to_f64, Rational};

/// `count` equally spaced nodes from `start` to `stop` inclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    start: Rational,
    stop: Rational,
    count: usize,
}

/// Serialized form of an [`Axis`]: rationals as strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub start: String,
    pub stop: String,
    pub count: usize,
}

impl Axis {
    pub fn new(start: Rational, stop: Rational, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidInput("axis needs at least one node".into()));
        }
        if count > 1 && start >= stop {
            return Err(Error::InvalidInput(format!(
                "axis bounds must satisfy start < stop, got {} .. {}",
                format_rational(&start),
                format_rational(&stop)
            )));
        }
        Ok(Axis { start, stop, count })
    }

    pub fn single(value: Rational) -> Self {
        Axis {
            start: value.clone(),
            stop: value,
            count: 1,
        }
    }

    pub fn from_ints(start: i64, stop: i64, count: usize) -> Result<Self> {
        Self::new(int(start), int(stop), count)
    }

    pub fn from_spec(spec: &AxisSpec) -> Result<Self> {
        Self::new(parse_rational(&spec.start)?, parse_rational(&spec.stop)?, spec.count)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn node(&self, k: usize) -> Rational {
        if self.count == 1 {
            return self.start.clone();
        }
        let t = Rational::new((k as i64).into(), ((self.count - 1) as i64).into());
        &self.start + (&self.stop - &self.start) * t
    }

    pub fn nodes(&self) -> Vec<Rational> {
        (0..self.count).map(|k| self.node(k)).collect()
    }

    pub fn nodes_f64(&self) -> Vec<f64> {
        self.nodes().iter().map(to_f64).collect()
    }
}

/// Row-major product of three axes, the last varying fastest.
pub fn grid3(axes: &[Axis; 3]) -> Vec<[f64; 3]> {
    let [a, b, c] = axes.each_ref().map(|ax| ax.nodes_f64());
    let mut out = Vec::with_capacity(a.len() * b.len() * c.len());
    for &u in &a {
        for &v in &b {
            for &w in &c {
                out.push([u, v, w]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn nodes_are_exact() {
        let ax = Axis::from_ints(-2, 2, 41).unwrap();
        assert_eq!(ax.node(20), int(0));
        assert_eq!(ax.node(1), rat(-19, 10));
        assert_eq!(ax.nodes_f64()[40], 2.0);
        assert!(Axis::from_ints(1, 0, 3).is_err());
        assert!(Axis::from_ints(0, 1, 0).is_err());
        assert_eq!(Axis::single(rat(1, 3)).nodes(), vec![rat(1, 3)]);
        let spec = AxisSpec { start: "-1/2".into(), stop: "1/2".into(), count: 3 };
        assert_eq!(Axis::from_spec(&spec).unwrap().nodes_f64(), vec![-0.5, 0.0, 0.5]);
        assert_eq!(grid3(&[ax.clone(), Axis::single(int(0)), Axis::single(int(1))]).len(), 41);
    }
}
