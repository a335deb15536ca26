//! Exact multivariate polynomials with rational coefficients.
//!
//! A [`Poly`] is defined over an ordered list of named variables and stores a
//! sparse map from exponent vectors to nonzero [`Rational`] coefficients. All
//! operations are pure; floats only appear when a polynomial is evaluated.

mod parse;
mod rational;
pub mod univariate;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

pub use parse::parse_poly;
pub use rational::{exact_sqrt, format_rational, from_f64, int, parse_rational, rat, to_f64, Rational};
pub(crate) use rational::{abs, midpoint};
pub use univariate::{RealRoot, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },
    #[error("exponent at position {pos} must be a non-negative integer literal")]
    BadExponent { pos: usize },
    #[error("division by a non-constant expression at position {pos}")]
    DivisionByNonConstant { pos: usize },
    #[error("division by zero at position {pos}")]
    DivisionByZero { pos: usize },
    #[error("expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch { left: Vec<String>, right: Vec<String> },
    #[error("polynomial is not univariate in `{0}`")]
    NotUnivariate(String),
}

/// Sparse multivariate polynomial over an ordered variable list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    vars: Arc<[String]>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    pub fn zero<S: AsRef<str>>(vars: &[S]) -> Self {
        Poly {
            vars: vars.iter().map(|v| v.as_ref().to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<S: AsRef<str>>(vars: &[S], c: Rational) -> Self {
        Self::zero(vars).with_constant(c)
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var<S: AsRef<str>>(vars: &[S], name: &str) -> Result<Self, PolyError> {
        let p = Self::zero(vars);
        let i = p.index_of(name)?;
        Ok(p.monomial(i, 1, Rational::one()))
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; duplicates are summed.
    pub fn from_terms<S: AsRef<str>>(
        vars: &[S],
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self, PolyError> {
        let mut p = Self::zero(vars);
        let n = p.vars.len();
        for (exps, c) in terms {
            if exps.len() != n {
                return Err(PolyError::ArityMismatch {
                    expected: n,
                    got: exps.len(),
                });
            }
            p.add_term(exps, c);
        }
        Ok(p)
    }

    fn with_constant(mut self, c: Rational) -> Self {
        let n = self.vars.len();
        self.add_term(vec![0; n], c);
        self
    }

    /// `c * vars[i]^e` over the same variable list as `self`.
    pub fn monomial(&self, i: usize, e: u32, c: Rational) -> Self {
        let mut exps = vec![0; self.vars.len()];
        exps[i] = e;
        let mut p = self.empty_like();
        p.add_term(exps, c);
        p
    }

    /// Zero polynomial sharing this polynomial's variables.
    pub fn empty_like(&self) -> Self {
        Poly {
            vars: Arc::clone(&self.vars),
            terms: BTreeMap::new(),
        }
    }

    /// Constant polynomial sharing this polynomial's variables.
    pub fn constant_like(&self, c: Rational) -> Self {
        self.empty_like().with_constant(c)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, PolyError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| PolyError::UnknownVariable {
                name: name.to_string(),
                pos: 0,
            })
    }

    /// Terms in ascending lexicographic order of exponent vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.vars.len()])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Coefficient of the given monomial (zero when absent).
    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Degree in variable `i`; `None` for the zero polynomial.
    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    /// True when variable `i` appears in some term.
    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    fn check_same_vars(&self, other: &Poly) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(PolyError::VariableMismatch {
                left: self.vars.to_vec(),
                right: other.vars.to_vec(),
            })
        }
    }

    fn assert_same_vars(&self, other: &Poly) {
        if let Err(e) = self.check_same_vars(other) {
            panic!("polynomial arithmetic across variable lists: {e}");
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return self.empty_like();
        }
        Poly {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = self.constant_like(Rational::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative by variable name.
    pub fn diff(&self, var: &str) -> Result<Self, PolyError> {
        Ok(self.diff_index(self.index_of(var)?))
    }

    /// Partial derivative by variable index.
    pub fn diff_index(&self, i: usize) -> Self {
        let mut out = self.empty_like();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * int(e[i] as i64));
        }
        out
    }

    /// Antiderivative in variable `i` with zero constant of integration.
    pub fn antiderivative_index(&self, i: usize) -> Self {
        let mut out = self.empty_like();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[i] += 1;
            let k = int(e2[i] as i64);
            out.add_term(e2, c / k);
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        self.check_arity(point.len())?;
        let terms: Vec<_> = self.terms.iter().map(|(e, c)| (e.as_slice(), c.clone())).collect();
        Ok(horner(&terms, 0, point))
    }

    /// Floating-point evaluation (nested Horner scheme, one variable at a time).
    pub fn eval(&self, point: &[f64]) -> Result<f64, PolyError> {
        self.check_arity(point.len())?;
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(e, c)| (e.as_slice(), to_f64(c)))
            .collect();
        Ok(horner(&terms, 0, point))
    }

    fn check_arity(&self, got: usize) -> Result<(), PolyError> {
        if got != self.vars.len() {
            return Err(PolyError::ArityMismatch {
                expected: self.vars.len(),
                got,
            });
        }
        Ok(())
    }

    /// Pre-converts coefficients to `f64` for repeated evaluation.
    pub fn compile(&self) -> NumPoly {
        NumPoly {
            nvars: self.vars.len(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), to_f64(c)))
                .collect(),
        }
    }

    /// Substitutes a rational value for variable `i`, keeping the variable list.
    pub fn fix(&self, i: usize, value: &Rational) -> Self {
        let mut out = self.empty_like();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = std::mem::take(&mut e2[i]);
            out.add_term(e2, c * num_traits::pow(value.clone(), k as usize));
        }
        out
    }

    /// Replaces variable `i` by `images[i]`; all images share one target variable list.
    pub fn compose(&self, images: &[Poly]) -> Result<Poly, PolyError> {
        self.check_arity(images.len())?;
        let Some(first) = images.first() else {
            return Ok(self.clone());
        };
        for im in &images[1..] {
            first.check_same_vars(im)?;
        }
        let mut powers: Vec<Vec<Poly>> = images
            .iter()
            .map(|im| vec![im.constant_like(Rational::one())])
            .collect();
        let mut out = first.empty_like();
        for (e, c) in &self.terms {
            let mut term = first.constant_like(c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                if k > 0 {
                    term = &term * &powers[i][k as usize];
                }
            }
            out = out + term;
        }
        Ok(out)
    }

    /// Re-expresses the polynomial over another variable list that contains
    /// every variable this polynomial actually uses.
    pub fn reindex<S: AsRef<str>>(&self, vars: &[S]) -> Result<Poly, PolyError> {
        let mut out = Poly::zero(vars);
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w.as_ref() == v))
            .collect();
        for (e, c) in &self.terms {
            let mut e2 = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| PolyError::UnknownVariable {
                    name: self.vars[i].clone(),
                    pos: 0,
                })?;
                e2[j] += k;
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Dense univariate view when only variable `i` appears.
    pub fn to_univariate(&self, i: usize) -> Result<UniPoly, PolyError> {
        let mut coeffs = Vec::new();
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(j, &k)| j != i && k > 0) {
                return Err(PolyError::NotUnivariate(self.vars[i].clone()));
            }
            let k = e[i] as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rational::zero());
            }
            coeffs[k] = c.clone();
        }
        Ok(UniPoly::new(coeffs))
    }

    /// Collects terms by the exponents of the selected variables; each coefficient
    /// is a polynomial over the same variable list with those variables removed.
    pub fn coefficients_in(&self, selected: &[usize]) -> BTreeMap<Vec<u32>, Poly> {
        let mut out: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let key: Vec<u32> = selected.iter().map(|&i| e[i]).collect();
            let mut rest = e.clone();
            for &i in selected {
                rest[i] = 0;
            }
            out.entry(key)
                .or_insert_with(|| self.empty_like())
                .add_term(rest, c.clone());
        }
        out
    }
}

trait Scalar: Clone + Zero + One + Add<Output = Self> + Mul<Output = Self> {}
impl<T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>> Scalar for T {}

/// Nested Horner evaluation over terms sorted lexicographically by exponent vector.
fn horner<E: AsRef<[u32]>, T: Scalar>(terms: &[(E, T)], k: usize, x: &[T]) -> T {
    if terms.is_empty() {
        return T::zero();
    }
    if k == x.len() {
        return terms
            .iter()
            .fold(T::zero(), |acc, (_, c)| acc + c.clone());
    }
    // Groups of equal exponent in variable k are contiguous and ascending.
    let mut groups: Vec<(u32, &[(E, T)])> = Vec::new();
    let mut start = 0;
    for j in 1..=terms.len() {
        if j == terms.len() || terms[j].0.as_ref()[k] != terms[start].0.as_ref()[k] {
            groups.push((terms[start].0.as_ref()[k], &terms[start..j]));
            start = j;
        }
    }
    let mut iter = groups.iter().rev();
    let (mut last_e, slice) = iter.next().unwrap();
    let mut acc = horner(slice, k + 1, x);
    for (e, slice) in iter {
        acc = acc * num_traits::pow(x[k].clone(), (last_e - e) as usize) + horner(slice, k + 1, x);
        last_e = *e;
    }
    acc * num_traits::pow(x[k].clone(), last_e as usize)
}

/// A polynomial with `f64` coefficients prepared for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct NumPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl NumPoly {
    pub fn eval(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.nvars);
        horner(&self.terms, 0, point)
    }
}

/// Graded order: higher total degree first, ties broken by descending lex order.
fn graded_desc(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| graded_desc(a.0, b.0));
        for (n, (e, c)) in terms.into_iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&k| k == 0);
            if is_const || !mag.is_one() {
                factors.push(format_rational(&mag));
            }
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], k)),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.vars.join(","), self)
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self.assert_same_vars(&rhs);
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.assert_same_vars(rhs);
        let mut out = self.empty_like();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XYZ: [&str; 3] = ["x", "y", "Z"];

    fn p(s: &str) -> Poly {
        parse_poly(s, &XYZ).unwrap()
    }

    #[test]
    fn diff_of_fold_potential() {
        let t = p("y^2/2 - x^2*Z/2 + Z^3/6");
        assert_eq!(-t.diff("Z").unwrap(), p("x^2/2 - Z^2/2"));
        assert_eq!(p("Z^3/6").diff("Z").unwrap(), p("Z^2/2"));
        assert!(p("7/3").diff("x").unwrap().is_zero());
        assert!(t.diff("w").is_err());
    }

    #[test]
    fn eval_exact_and_float() {
        let t = p("y^2/2 - x^2*Z/2 + Z^3/6");
        assert_eq!(t.eval_rational(&[int(1), int(1), int(1)]).unwrap(), rat(1, 6));
        let mz = -t.diff("Z").unwrap();
        assert_eq!(mz.eval(&[2.0, 0.0, 0.0]).unwrap(), 2.0);
        assert_eq!(Poly::zero(&XYZ).eval(&[3.0, 1.0, 2.0]).unwrap(), 0.0);
        assert!(matches!(
            t.eval(&[1.0, 2.0]),
            Err(PolyError::ArityMismatch { expected: 3, got: 2 })
        ));
        let c = t.compile();
        assert!((c.eval(&[1.5, -2.0, 0.5]) - t.eval(&[1.5, -2.0, 0.5]).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn printing_is_graded_and_reparses() {
        let t = p("y^2/2 - x^2*Z/2 + Z^3/6");
        let s = t.to_string();
        assert_eq!(s, "-1/2*x^2*Z + 1/6*Z^3 + 1/2*y^2");
        assert_eq!(p(&s), t);
        assert_eq!(Poly::zero(&XYZ).to_string(), "0");
        assert_eq!(p("-x + 3").to_string(), "-x + 3");
    }

    #[test]
    fn compose_and_fix() {
        let t = p("x*y + Z");
        let vars = ["s"];
        let s = Poly::var(&vars, "s").unwrap();
        let images = [s.clone(), s.pow(2), s.constant_like(int(1))];
        let c = t.compose(&images).unwrap();
        assert_eq!(c, parse_poly("s^3 + 1", &vars).unwrap());
        assert_eq!(t.fix(0, &int(2)), p("2*y + Z"));
    }

    #[test]
    fn reindex_and_univariate() {
        let z = parse_poly("Z^2 - 4", &["Z"]).unwrap();
        let lifted = z.reindex(&XYZ).unwrap();
        assert_eq!(lifted, p("Z^2 - 4"));
        assert!(p("x + 1").reindex(&["y"]).is_err());
        let u = lifted.to_univariate(2).unwrap();
        assert_eq!(u.degree(), Some(2));
        assert!(p("x*Z").to_univariate(2).is_err());
    }

    #[test]
    fn antiderivative_inverts_diff() {
        let q = p("3*Z^2 + 2*x*Z + 5");
        let a = q.antiderivative_index(2);
        assert_eq!(a.diff_index(2), q);
        assert!(a.constant_term().is_zero());
    }

    #[test]
    fn coefficients_in_selected_variables() {
        let q = p("x^2*Z + 3*x^2 + y*Z^2 - 1");
        let cs = q.coefficients_in(&[0, 1]);
        assert_eq!(cs[&vec![2, 0]], p("Z + 3"));
        assert_eq!(cs[&vec![0, 1]], p("Z^2"));
        assert_eq!(cs[&vec![0, 0]], p("-1"));
    }
}
