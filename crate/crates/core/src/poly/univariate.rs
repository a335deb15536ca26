//! Dense univariate polynomials over the rationals and exact real-root isolation.
//!
//! Roots are isolated with Sturm sequences on the square-free parts of a
//! Yun decomposition, so repeated roots (fold tangencies) are reported once
//! with their multiplicity instead of being lost to sign-change tests.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{abs, from_f64, int, midpoint, to_f64, Rational};

const MAX_REFINE_STEPS: usize = 400;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    /// Coefficients from the constant term upward; no trailing zeros.
    coeffs: Vec<Rational>,
}

/// A real root of a univariate polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: u32,
    /// Set when bisection landed exactly on a rational root.
    pub exact: Option<Rational>,
    /// Isolating interval `(lo, hi]` after refinement.
    pub lo: Rational,
    pub hi: Rational,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        UniPoly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).unwrap_or(&zero) - other.coeffs.get(k).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    fn monic(&self) -> UniPoly {
        match self.leading() {
            Some(l) if !l.is_one() => {
                let l = l.clone();
                UniPoly::new(self.coeffs.iter().map(|c| c / &l).collect())
            }
            _ => self.clone(),
        }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dl = d.leading().expect("division by the zero polynomial").clone();
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPoly::new(vec![]), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `self = c * prod f_i^i` with each `f_i`
    /// square-free and pairwise coprime. Constant factors are omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(UniPoly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let df = self.derivative();
        let a0 = self.gcd(&df);
        let mut b = self.div_rem(&a0).0;
        let c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            let nb = b.div_rem(&a).0;
            let nc = d.div_rem(&a).0;
            if a.degree().unwrap_or(0) > 0 {
                out.push((a, i));
            }
            d = nc.sub(&nb.derivative());
            b = nb;
            i += 1;
        }
        out
    }

    /// Canonical Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone()];
        let d = self.derivative();
        if d.is_zero() {
            return seq;
        }
        seq.push(d);
        loop {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(UniPoly::new(r.coeffs.into_iter().map(|c| -c).collect()));
        }
        seq
    }

    /// Cauchy bound: every real root lies strictly inside `(-B, B)`.
    fn cauchy_bound(&self) -> Rational {
        let lead = abs(self.leading().expect("nonzero polynomial"));
        let n = self.coeffs.len() - 1;
        let m = self.coeffs[..n]
            .iter()
            .map(|c| abs(c) / &lead)
            .max()
            .unwrap_or_else(Rational::zero);
        m + Rational::one()
    }

    /// All distinct real roots in increasing order with multiplicities.
    /// Returns `None` for the zero polynomial.
    pub fn real_roots(&self) -> Option<Vec<RealRoot>> {
        if self.is_zero() {
            return None;
        }
        let mut roots = Vec::new();
        for (factor, mult) in self.squarefree_decomposition() {
            for mut r in isolate_squarefree(&factor) {
                r.multiplicity = mult;
                roots.push(r);
            }
        }
        roots.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(Ordering::Equal));
        Some(roots)
    }
}

/// Integer multiple of a polynomial, for sign evaluation without gcds.
struct SignPoly {
    coeffs: Vec<BigInt>,
}

impl SignPoly {
    fn new(p: &UniPoly) -> Self {
        let lcm = p
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        SignPoly {
            coeffs: p.coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect(),
        }
    }

    /// Sign of the polynomial at `num/den`, from `sum a_i num^i den^(n-i)`.
    fn sign_at(&self, x: &Rational) -> i8 {
        let (num, den) = (x.numer(), x.denom());
        let Some((lead, rest)) = self.coeffs.split_last() else {
            return 0;
        };
        let mut acc = lead.clone();
        let mut den_pow = BigInt::one();
        for c in rest.iter().rev() {
            den_pow *= den;
            acc = acc * num + c * &den_pow;
        }
        match acc.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }
}

fn variations(seq: &[SignPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let s = p.sign_at(x);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn isolate_squarefree(p: &UniPoly) -> Vec<RealRoot> {
    let seq: Vec<SignPoly> = p.sturm_sequence().iter().map(SignPoly::new).collect();
    let b = p.cauchy_bound();
    let mut isolated = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = variations(&seq, &lo) - variations(&seq, &hi);
        match n {
            0 => {}
            1 => isolated.push((lo, hi)),
            _ => {
                let mid = short_midpoint(&lo, &hi);
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    isolated
        .into_iter()
        .map(|(lo, hi)| refine(&seq, lo, hi))
        .collect()
}

fn narrow_enough(lo: &Rational, hi: &Rational) -> bool {
    let width = to_f64(&(hi - lo));
    let scale = to_f64(lo).abs().max(to_f64(hi).abs());
    width <= scale * f64::EPSILON * 0.25 || width < 1e-300
}

/// A point strictly inside `(lo, hi)` with a short binary expansion, so that
/// repeated bisection does not grow denominators.
fn short_midpoint(lo: &Rational, hi: &Rational) -> Rational {
    let mid = midpoint(lo, hi);
    match from_f64(to_f64(&mid)) {
        Some(m) if &m > lo && &m < hi => m,
        _ => mid,
    }
}

/// Shrinks `(lo, hi]`, known to hold exactly one root of square-free `p`.
fn refine(seq: &[SignPoly], mut lo: Rational, mut hi: Rational) -> RealRoot {
    let done = |value: Rational, lo: Rational, hi: Rational, exact: bool| RealRoot {
        value: to_f64(&value),
        multiplicity: 1,
        exact: exact.then(|| value.clone()),
        lo,
        hi,
    };
    let sp = &seq[0];
    if sp.sign_at(&hi) == 0 {
        return done(hi.clone(), lo, hi, true);
    }
    let mut s_lo = sp.sign_at(&lo);
    for _ in 0..MAX_REFINE_STEPS {
        if narrow_enough(&lo, &hi) {
            break;
        }
        let mid = short_midpoint(&lo, &hi);
        let fm = sp.sign_at(&mid);
        if fm == 0 {
            return done(mid, lo, hi, true);
        }
        let left_has_root = if s_lo != 0 {
            fm != s_lo
        } else {
            variations(seq, &lo) - variations(seq, &mid) == 1
        };
        if left_has_root {
            hi = mid;
        } else {
            lo = mid;
            s_lo = fm;
        }
    }
    done(midpoint(&lo, &hi), lo, hi, false)
}
