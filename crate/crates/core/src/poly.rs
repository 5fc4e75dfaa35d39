//! Sparse multivariate polynomials with their tropical approximations.
//!
//! All evaluation happens in log coordinates `y = log x` with the tropical
//! maximum factored out, so points spanning hundreds of orders of magnitude
//! never overflow.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub exponent: Vec<u32>,
    pub coeff: Complex64,
}

/// Polynomial given by its support and nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePolynomial {
    n_vars: usize,
    terms: Vec<Term>,
}

/// A point in logarithmic coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LogPoint(Vec<f64>);

impl LogPoint {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("log point entry {i} is not finite")));
        }
        Ok(Self(y))
    }

    /// `log` of a positive point.
    pub fn from_positive(x: &[f64]) -> Result<Self> {
        Self::new(x.iter().map(|v| v.ln()).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Deref for LogPoint {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `p(e^y) = phase * exp(log_abs)`. `vanished` is set on exact cancellation,
/// in which case `log_abs` is `-inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub log_abs: f64,
    pub phase: Complex64,
    pub vanished: bool,
}

impl LogValue {
    /// Principal-branch `log p(e^y)`.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.log_abs, self.phase.arg())
    }
}

impl SparsePolynomial {
    /// Build from terms, rejecting zero coefficients, duplicate exponents and
    /// exponent vectors of the wrong length.
    pub fn new(n_vars: usize, terms: Vec<Term>) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::Polynomial("need at least one variable".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for (i, t) in terms.iter().enumerate() {
            if t.exponent.len() != n_vars {
                return Err(Error::Polynomial(format!(
                    "term {i}: exponent has length {}, expected {n_vars}",
                    t.exponent.len()
                )));
            }
            if t.coeff == Complex64::new(0.0, 0.0) || !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
                return Err(Error::Polynomial(format!("term {i}: coefficient must be finite and nonzero")));
            }
            if !seen.insert(t.exponent.clone()) {
                return Err(Error::Polynomial(format!("term {i}: duplicate exponent {:?}", t.exponent)));
            }
        }
        Ok(Self { n_vars, terms })
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real(n_vars: usize, terms: &[(f64, &[u32])]) -> Result<Self> {
        Self::new(
            n_vars,
            terms
                .iter()
                .map(|(c, e)| Term {
                    exponent: e.to_vec(),
                    coeff: Complex64::new(*c, 0.0),
                })
                .collect(),
        )
    }

    pub fn zero(n_vars: usize) -> Self {
        Self {
            n_vars,
            terms: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &[u32]> {
        self.terms.iter().map(|t| t.exponent.as_slice())
    }

    /// Common total degree, if every term has the same one.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.iter().map(|t| t.exponent.iter().sum::<u32>());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree().is_some()
    }

    fn dot(y: &[f64], e: &[u32]) -> f64 {
        y.iter().zip(e).map(|(a, &b)| a * b as f64).sum()
    }

    /// `log p^tr(e^y) = max over the support of <y, l>`.
    pub fn trop_eval_log(&self, y: &[f64]) -> Result<f64> {
        if self.terms.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self
            .terms
            .iter()
            .map(|t| Self::dot(y, &t.exponent))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Truncation to the face of the Newton polytope maximizing `<y, .>`.
    ///
    /// Support points within `1e-12 * max(1, |max|)` of the maximum count as
    /// tying, which absorbs rounding in the dot products.
    pub fn truncate(&self, y: &[f64]) -> Result<SparsePolynomial> {
        let m = self.trop_eval_log(y)?;
        let tol = 1e-12 * m.abs().max(1.0);
        let terms = self
            .terms
            .iter()
            .filter(|t| m - Self::dot(y, &t.exponent) <= tol)
            .cloned()
            .collect();
        Ok(SparsePolynomial {
            n_vars: self.n_vars,
            terms,
        })
    }

    /// `sum |c_l|`, so that `|p(x)| <= C p^tr(x)` for all positive `x`.
    pub fn upper_bound_constant(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// Smallest coefficient modulus. For positive coefficients this is a lower
    /// bound constant: `min_c * p^tr(x) <= p(x)`.
    pub fn min_abs_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn has_positive_coefficients(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.im == 0.0 && t.coeff.re > 0.0)
    }

    /// Stable evaluation of `p(e^y)`.
    pub fn eval_log(&self, y: &[f64]) -> Result<LogValue> {
        let m = self.trop_eval_log(y)?;
        let mut s = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            s += t.coeff * (Self::dot(y, &t.exponent) - m).exp();
        }
        let a = s.norm();
        if a == 0.0 {
            return Ok(LogValue {
                log_abs: f64::NEG_INFINITY,
                phase: Complex64::new(1.0, 0.0),
                vanished: true,
            });
        }
        Ok(LogValue {
            log_abs: m + a.ln(),
            phase: s / a,
            vanished: false,
        })
    }

    /// Parse the line based text format: `coeff_re coeff_im e1 ... en` per
    /// line, `#` comments and blank lines ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n_vars = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 3 {
                return Err(err("expected `coeff_re coeff_im e1 ... en`".into()));
            }
            let re: f64 = fields[0].parse().map_err(|_| err(format!("bad real part `{}`", fields[0])))?;
            let im: f64 = fields[1].parse().map_err(|_| err(format!("bad imaginary part `{}`", fields[1])))?;
            let exponent = fields[2..]
                .iter()
                .map(|s| s.parse::<u32>().map_err(|_| err(format!("bad exponent `{s}`"))))
                .collect::<Result<Vec<_>>>()?;
            match n_vars {
                None => n_vars = Some(exponent.len()),
                Some(n) if n != exponent.len() => {
                    return Err(err(format!("expected {n} exponents, found {}", exponent.len())))
                }
                _ => {}
            }
            terms.push(Term {
                exponent,
                coeff: Complex64::new(re, im),
            });
        }
        let n = n_vars.ok_or_else(|| Error::Polynomial("no terms".into()))?;
        Self::new(n, terms)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

impl fmt::Display for SparsePolynomial {
    /// Writes the text format accepted by [`SparsePolynomial::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            write!(f, "{:?} {:?}", t.coeff.re, t.coeff.im)?;
            for e in &t.exponent {
                write!(f, " {e}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> SparsePolynomial {
        // a x1^2 x2 + b x1 x2 x3 + c x3^3
        SparsePolynomial::from_real(3, &[(2.0, &[2, 1, 0]), (-5.0, &[1, 1, 1]), (0.5, &[0, 0, 3])]).unwrap()
    }

    #[test]
    fn tropical_value_of_the_cubic() {
        let p = example();
        let y = [2f64.ln(), 0.0, 0.0];
        assert!((p.trop_eval_log(&y).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert_eq!(p.trop_eval_log(&[0.0; 3]).unwrap(), 0.0);
        let q = SparsePolynomial::from_real(2, &[(1.0, &[1, 0]), (1.0, &[0, 1])]).unwrap();
        assert_eq!(q.trop_eval_log(&[3f64.ln(), 5f64.ln()]).unwrap(), 5f64.ln());
    }

    #[test]
    fn zero_polynomial_errors() {
        let z = SparsePolynomial::zero(2);
        assert!(matches!(z.trop_eval_log(&[0.0, 0.0]), Err(Error::ZeroPolynomial)));
        assert_eq!(
            z.trop_eval_log(&[0.0, 0.0]).unwrap_err().to_string(),
            "zero polynomial has no tropical approximation"
        );
    }

    #[test]
    fn truncation() {
        let p = example();
        let t = p.truncate(&[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(t.terms().len(), 1);
        assert_eq!(t.terms()[0].exponent, vec![2, 1, 0]);
        assert_eq!(p.truncate(&[0.0; 3]).unwrap(), p);

        let psi = SparsePolynomial::from_real(3, &[(1.0, &[1, 0, 0]), (1.0, &[0, 1, 0]), (1.0, &[0, 0, 1])]).unwrap();
        let t = psi.truncate(&[0.0, 0.0, -1.0]).unwrap();
        let exps: Vec<_> = t.support().map(|e| e.to_vec()).collect();
        assert_eq!(exps, vec![vec![1, 0, 0], vec![0, 1, 0]]);
    }

    #[test]
    fn bound_constants() {
        let p = SparsePolynomial::from_real(2, &[(1.0, &[1, 0]), (1.0, &[0, 1])]).unwrap();
        assert_eq!(p.upper_bound_constant(), 2.0);
        let q = SparsePolynomial::from_real(2, &[(3.0, &[2, 0]), (-2.0, &[0, 2])]).unwrap();
        assert_eq!(q.upper_bound_constant(), 5.0);
        assert_eq!(q.min_abs_coefficient(), 2.0);
    }

    #[test]
    fn log_evaluation() {
        let p = SparsePolynomial::from_real(2, &[(1.0, &[1, 0]), (1.0, &[0, 1])]).unwrap();
        let v = p.eval_log(&[0.0, 0.0]).unwrap();
        assert!((v.log_abs - 2f64.ln()).abs() < 1e-15);
        assert_eq!(v.phase, Complex64::new(1.0, 0.0));

        let d = SparsePolynomial::from_real(2, &[(1.0, &[1, 0]), (-1.0, &[0, 1])]).unwrap();
        let v = d.eval_log(&[0.0, 0.0]).unwrap();
        assert!(v.vanished);
        assert_eq!(v.log_abs, f64::NEG_INFINITY);

        // log(e^700 + 1) = 700 + log1p(e^-700), which is 700 in double precision.
        let v = p.eval_log(&[700.0, 0.0]).unwrap();
        assert!(v.log_abs.is_finite());
        assert_eq!(v.log_abs, 700.0);
    }

    #[test]
    fn negative_phase() {
        let p = SparsePolynomial::from_real(1, &[(-3.0, &[2])]).unwrap();
        let v = p.eval_log(&[1.0]).unwrap();
        assert!((v.log_abs - (3f64.ln() + 2.0)).abs() < 1e-14);
        assert!((v.phase - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn text_format() {
        let text = "# triangle\n1 0 1 0 0\n1 0 0 1 0\n\n1 0 0 0 1\n";
        let p = SparsePolynomial::parse(text).unwrap();
        assert_eq!(p.n_vars(), 3);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(SparsePolynomial::parse(&p.to_string()).unwrap(), p);

        assert!(matches!(SparsePolynomial::parse("1 0 1 0\n1 0 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(SparsePolynomial::parse("1 0 1 0\n2 0 1 0\n").is_err());
        assert!(SparsePolynomial::parse("0 0 1 0\n").is_err());
    }
}
