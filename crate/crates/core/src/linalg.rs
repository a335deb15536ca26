//! Small fixed-size linear algebra: symmetric 3x3 matrices and 3x3 helpers.

use serde::{Deserialize, Serialize};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Symmetric 3x3 real matrix stored by its upper triangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sym3 {
    upper: [f64; 6],
}

const IDX: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];

impl Sym3 {
    pub fn new(xx: f64, xy: f64, xz: f64, yy: f64, yz: f64, zz: f64) -> Self {
        Sym3 {
            upper: [xx, xy, xz, yy, yz, zz],
        }
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Self::new(a, 0.0, 0.0, b, 0.0, c)
    }

    pub fn identity() -> Self {
        Self::diag(1.0, 1.0, 1.0)
    }

    /// Symmetric part `(m + m^T) / 2` of a general matrix.
    pub fn from_matrix(m: &Mat3) -> Self {
        let s = |i: usize, j: usize| 0.5 * (m[i][j] + m[j][i]);
        Self::new(m[0][0], s(0, 1), s(0, 2), m[1][1], s(1, 2), m[2][2])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[IDX[i][j]]
    }

    pub fn to_matrix(&self) -> Mat3 {
        std::array::from_fn(|i| std::array::from_fn(|j| self.get(i, j)))
    }

    pub fn scale(&self, k: f64) -> Self {
        Sym3 {
            upper: self.upper.map(|v| v * k),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Sym3) -> f64 {
        self.upper
            .iter()
            .zip(&other.upper)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn det(&self) -> f64 {
        det3(&self.to_matrix())
    }

    pub fn trace(&self) -> f64 {
        self.upper[0] + self.upper[3] + self.upper[5]
    }

    pub fn adjugate(&self) -> Sym3 {
        Sym3::from_matrix(&adj3(&self.to_matrix()))
    }

    /// Inverse via the adjugate; `None` when the determinant is exactly zero.
    pub fn inverse(&self) -> Option<Sym3> {
        let d = self.det();
        (d != 0.0 && d.is_finite()).then(|| self.adjugate().scale(1.0 / d))
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        std::array::from_fn(|i| (0..3).map(|j| self.get(i, j) * v[j]).sum())
    }

    pub fn quad_form(&self, v: &Vec3) -> f64 {
        let w = self.mul_vec(v);
        v[0] * w[0] + v[1] * w[1] + v[2] * w[2]
    }

    /// Leading principal minors of orders 1, 2 and 3.
    pub fn leading_minors(&self) -> [f64; 3] {
        let m = |i, j| self.get(i, j);
        [m(0, 0), m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1), self.det()]
    }

    /// Eigenvalues in ascending order (cyclic Jacobi rotations).
    pub fn eigenvalues(&self) -> [f64; 3] {
        let mut a = self.to_matrix();
        for _ in 0..64 {
            let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
            let scale = a[0][0].abs() + a[1][1].abs() + a[2][2].abs();
            if off == 0.0 || off <= f64::EPSILON * f64::EPSILON * scale {
                break;
            }
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..3 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..3 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
        let mut ev = [a[0][0], a[1][1], a[2][2]];
        ev.sort_by(|x, y| x.total_cmp(y));
        ev
    }
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Classical adjugate (transpose of the cofactor matrix).
pub fn adj3(m: &Mat3) -> Mat3 {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    [
        [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
        [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
        [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
    ]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn mat_vec(a: &Mat3, v: &Vec3) -> Vec3 {
    std::array::from_fn(|i| (0..3).map(|k| a[i][k] * v[k]).sum())
}

/// Solves `a x = b` by Cramer's rule through the adjugate. `None` if `det a == 0`.
pub fn solve3(a: &Mat3, b: &Vec3) -> Option<Vec3> {
    let d = det3(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let x = mat_vec(&adj3(a), b);
    Some(x.map(|v| v / d))
}

pub fn inverse3(a: &Mat3) -> Option<Mat3> {
    let d = det3(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    Some(adj3(a).map(|row| row.map(|v| v / d)))
}
