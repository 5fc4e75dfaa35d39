//! Projective integrals `int prod a_i^nu_i / prod b_j^rho_j Omega` of
//! homogeneous polynomials, integrated through an explicit sector table.

use std::str::FromStr;

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, fmt_q, parse_q, q_from_f64, Q};
use crate::feynman::{expand_symanzik, FeynmanGraph};
use crate::poly::{SparsePolynomial, Term};
use crate::sample::{Integrand, TropicalSample};
use crate::sector::{build_refined_fan, minkowski_vertices, SectorTable};

/// A complex exponent whose real part is kept exactly, since it scales the
/// Newton polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct Power {
    pub re: Q,
    pub im: f64,
}

impl Power {
    pub fn real(re: Q) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn from_f64(re: f64) -> Result<Self> {
        Ok(Self::real(q_from_f64(re)?))
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(exact::q_to_f64(&self.re), self.im)
    }
}

/// Accepts `re` or `re:im`; the real part may be an integer, a fraction
/// `a/b` or a decimal.
impl FromStr for Power {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("invalid power {s:?}, expected re or re:im"));
        let (re, im) = match s.split_once(':') {
            Some((re, im)) => (re, im.trim().parse::<f64>().map_err(|_| bad())?),
            None => (s, 0.0),
        };
        let re = parse_q(re.trim()).ok_or_else(bad)?;
        if !im.is_finite() {
            return Err(bad());
        }
        Ok(Self { re, im })
    }
}

#[derive(Debug, Clone)]
pub struct Factor {
    pub poly: SparsePolynomial,
    pub power: Power,
}

impl Factor {
    pub fn new(poly: SparsePolynomial, power: Power) -> Self {
        Self { poly, power }
    }
}

/// The integrand data. Each polynomial must be homogeneous and every power
/// must have non-negative real part.
#[derive(Debug, Clone)]
pub struct EulerMellin {
    n: usize,
    numerators: Vec<Factor>,
    denominators: Vec<Factor>,
}

fn exponents(p: &SparsePolynomial) -> Vec<Vec<Q>> {
    p.support()
        .map(|e| e.iter().map(|&k| exact::q(i64::from(k))).collect())
        .collect()
}

impl EulerMellin {
    pub fn new(numerators: Vec<Factor>, denominators: Vec<Factor>) -> Result<Self> {
        let n = denominators
            .first()
            .or(numerators.first())
            .map(|f| f.poly.n_vars())
            .ok_or_else(|| Error::InvalidInput("no polynomials given".into()))?;
        let mut deg = Complex64::zero();
        let mut deg_re = Q::zero();
        for (k, (f, sign)) in numerators
            .iter()
            .map(|f| (f, 1.0))
            .chain(denominators.iter().map(|f| (f, -1.0)))
            .enumerate()
        {
            if f.poly.n_vars() != n {
                return Err(Error::InvalidInput(format!(
                    "polynomial {k} has {} variables, expected {n}",
                    f.poly.n_vars()
                )));
            }
            if f.poly.is_empty() {
                return Err(Error::ZeroPolynomial);
            }
            let d = f
                .poly
                .degree()
                .ok_or_else(|| Error::Inhomogeneous(format!("polynomial {k} is not homogeneous")))?;
            if f.power.re.is_negative() {
                return Err(Error::InvalidInput(format!(
                    "power {k} has negative real part {}",
                    fmt_q(&f.power.re)
                )));
            }
            deg += f.power.value() * f64::from(d) * sign;
            let dq = exact::q(i64::from(d)) * &f.power.re;
            deg_re = if sign > 0.0 { deg_re + dq } else { deg_re - dq };
        }
        if !deg_re.is_zero() || deg.im.abs() > 1e-12 {
            return Err(Error::Inhomogeneous(format!(
                "integrand has degree {deg}, not 0"
            )));
        }
        Ok(Self {
            n,
            numerators,
            denominators,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn numerators(&self) -> &[Factor] {
        &self.numerators
    }

    pub fn denominators(&self) -> &[Factor] {
        &self.denominators
    }

    /// Vertices of `A = sum Re nu_i NP(a_i)` and `B = sum Re rho_j NP(b_j)`.
    pub fn polytopes(&self) -> (Vec<Vec<Q>>, Vec<Vec<Q>>) {
        let mk = |fs: &[Factor]| {
            let terms: Vec<(Q, Vec<Vec<Q>>)> = fs.iter().map(|f| (f.power.re.clone(), exponents(&f.poly))).collect();
            let v = minkowski_vertices(&terms);
            if v.is_empty() {
                vec![vec![Q::zero(); self.n]]
            } else {
                v
            }
        };
        (mk(&self.numerators), mk(&self.denominators))
    }

    /// Exact sector decomposition; fails with `R1Violated`/`R2Violated` for
    /// divergent integrals.
    pub fn sector_table(&self) -> Result<SectorTable> {
        let (a, b) = self.polytopes();
        build_refined_fan(&a, &b)
    }

    pub fn integrand(&self) -> EulerMellinIntegrand<'_> {
        EulerMellinIntegrand { problem: self }
    }

    /// `log R` at a point, `None` if some polynomial vanishes there.
    pub fn log_residual(&self, y: &[f64]) -> Result<Option<Complex64>> {
        let mut acc = Complex64::zero();
        for (f, sign) in self
            .numerators
            .iter()
            .map(|f| (f, 1.0))
            .chain(self.denominators.iter().map(|f| (f, -1.0)))
        {
            let v = f.poly.eval_log(y)?;
            if v.vanished {
                return Ok(None);
            }
            let nu = f.power.value();
            let t = f.poly.trop_eval_log(y)?;
            acc += sign * (nu * v.ln() - nu.re * t);
        }
        Ok(Some(acc))
    }

    /// The Feynman parametric integrand `prod x_e^{nu_e} Psi^{omega - D/2} Phi^{-omega}`
    /// with expanded Symanzik polynomials.
    pub fn from_feynman(g: &FeynmanGraph) -> Result<Self> {
        let e = g.num_edges();
        let sym = expand_symanzik(g)?;
        let omega = g.omega();
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (i, &nu) in g.nu().iter().enumerate() {
            let mut exponent = vec![0; e];
            exponent[i] = 1;
            let x = SparsePolynomial::new(
                e,
                vec![Term {
                    exponent,
                    coeff: Complex64::new(1.0, 0.0),
                }],
            )?;
            num.push(Factor::new(x, Power::from_f64(nu)?));
        }
        let psi_power = Power::from_f64(omega - g.dim() / 2.0)?;
        if psi_power.re.is_positive() {
            num.push(Factor::new(sym.psi.clone(), psi_power));
        } else if psi_power.re.is_negative() {
            den.push(Factor::new(sym.psi.clone(), Power::real(-psi_power.re)));
        }
        if omega != 0.0 {
            let phi = sym.phi.ok_or(Error::ExceptionalKinematics { omega })?;
            let p = Power::from_f64(omega.abs())?;
            if omega > 0.0 {
                den.push(Factor::new(phi, p));
            } else {
                num.push(Factor::new(phi, p));
            }
        }
        Self::new(num, den)
    }
}

/// `R = prod a_i^nu_i / (a_i^tr)^{Re nu_i} / prod (b_j^rho_j / (b_j^tr)^{Re rho_j})`
/// as `[Re R, Im R]`. Points where a polynomial vanishes are rejected.
pub struct EulerMellinIntegrand<'a> {
    problem: &'a EulerMellin,
}

impl Integrand for EulerMellinIntegrand<'_> {
    type Workspace = ();

    fn workspace(&self) {}

    fn components(&self) -> usize {
        2
    }

    fn eval(&self, _: &mut (), s: &TropicalSample, out: &mut [f64]) -> bool {
        match self.problem.log_residual(&s.log_x) {
            Ok(Some(l)) => {
                let r = l.exp();
                if !(r.re.is_finite() && r.im.is_finite()) {
                    return false;
                }
                out[0] = r.re;
                out[1] = r.im;
                true
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;
    use crate::mc::{estimate, RunOptions};

    fn bubble_problem() -> EulerMellin {
        let x1x2 = SparsePolynomial::from_real(2, &[(1.0, &[1, 1])]).unwrap();
        let psi = SparsePolynomial::from_real(2, &[(1.0, &[1, 0]), (1.0, &[0, 1])]).unwrap();
        EulerMellin::new(
            vec![Factor::new(x1x2, Power::real(q(1)))],
            vec![Factor::new(psi, Power::real(q(2)))],
        )
        .unwrap()
    }

    #[test]
    fn powers_parse() {
        assert_eq!("3/2".parse::<Power>().unwrap(), Power::real(Q::new(3.into(), 2.into())));
        let p: Power = "0.5:-1.25".parse().unwrap();
        assert_eq!((exact::q_to_f64(&p.re), p.im), (0.5, -1.25));
        assert!("x".parse::<Power>().is_err());
        assert!("1:y".parse::<Power>().is_err());
    }

    #[test]
    fn degree_balance() {
        let psi = SparsePolynomial::from_real(2, &[(1.0, &[1, 0]), (1.0, &[0, 1])]).unwrap();
        let r = EulerMellin::new(vec![], vec![Factor::new(psi.clone(), Power::real(q(1)))]);
        assert!(matches!(r, Err(Error::Inhomogeneous(_))));
        let inh = SparsePolynomial::from_real(2, &[(1.0, &[1, 0]), (1.0, &[0, 0])]).unwrap();
        let r = EulerMellin::new(vec![], vec![Factor::new(inh, Power::real(q(1)))]);
        assert!(matches!(r, Err(Error::Inhomogeneous(_))));
        let r = EulerMellin::new(vec![Factor::new(psi, Power::real(q(-1)))], vec![]);
        assert!(r.is_err());
    }

    #[test]
    fn bubble_period() {
        let p = bubble_problem();
        let t = p.sector_table().unwrap();
        assert_eq!(t.len(), 2);
        assert!((t.total() - 2.0).abs() < 1e-15);
        let rep = estimate(&t, &p.integrand(), RunOptions::new(200_000, 3)).unwrap();
        assert!((rep.estimate[0] - 1.0).abs() < 4.0 * rep.std_error[0]);
        assert_eq!(rep.estimate[1], 0.0);
    }

    #[test]
    fn feynman_bridge_matches_bubble() {
        let g = crate::feynman::generate::bubble(1.0);
        let p = EulerMellin::from_feynman(&g).unwrap();
        let (a, b) = p.polytopes();
        assert_eq!(a, vec![vec![q(1), q(1)]]);
        assert_eq!(b.len(), 2);
        assert!((p.sector_table().unwrap().total() - 2.0).abs() < 1e-15);
        let l = p.log_residual(&[0.0, 0.0]).unwrap().unwrap();
        assert!((l.re - (0.25f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn complex_power_phase() {
        // (x1 + x2)^{i t} / (x1 + x2)^{i t} x1 x2 / (x1 + x2)^2 keeps the bubble value.
        let psi = SparsePolynomial::from_real(2, &[(1.0, &[1, 0]), (1.0, &[0, 1])]).unwrap();
        let x1x2 = SparsePolynomial::from_real(2, &[(1.0, &[1, 1])]).unwrap();
        let p = EulerMellin::new(
            vec![
                Factor::new(x1x2, Power::real(q(1))),
                Factor::new(psi.clone(), Power { re: q(0), im: 0.7 }),
            ],
            vec![
                Factor::new(psi.clone(), Power::real(q(2))),
                Factor::new(psi, Power { re: q(0), im: 0.7 }),
            ],
        )
        .unwrap();
        let l = p.log_residual(&[0.3, -1.0]).unwrap().unwrap();
        let plain = bubble_problem().log_residual(&[0.3, -1.0]).unwrap().unwrap();
        assert!((l - plain).norm() < 1e-14);
    }
}
