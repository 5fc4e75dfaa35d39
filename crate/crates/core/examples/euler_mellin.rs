//! A general Euler-Mellin integral with complex exponents, the projective
//! Dirichlet integral
//!
//!     int x1^(1+i/2) x2 x3^2 / (x1 + x2 + x3)^(4+i/2) dx/x
//!       = Gamma(1+i/2) Gamma(1) Gamma(2) / Gamma(4+i/2).
//!
//! The sector fan is built from the Newton polytopes, then sampled.
//!
//!     cargo run --release --example euler_mellin

use num_complex::Complex64;
use troquad::exact::q;
use troquad::{estimate, EulerMellin, Factor, Power, RunOptions, SparsePolynomial};

fn main() -> troquad::Result<()> {
    let monomial = |i: usize| {
        let mut e = [0u32; 3];
        e[i] = 1;
        SparsePolynomial::from_real(3, &[(1.0, &e)])
    };
    let sum = SparsePolynomial::from_real(3, &[(1.0, &[1, 0, 0]), (1.0, &[0, 1, 0]), (1.0, &[0, 0, 1])])?;
    let problem = EulerMellin::new(
        vec![
            Factor::new(monomial(0)?, Power { re: q(1), im: 0.5 }),
            Factor::new(monomial(1)?, Power::real(q(1))),
            Factor::new(monomial(2)?, Power::real(q(2))),
        ],
        vec![Factor::new(sum, Power { re: q(4), im: 0.5 })],
    )?;
    let sectors = problem.sector_table()?;
    println!("{} sectors, I_tr = {}", sectors.len(), sectors.total());

    let r = estimate(&sectors, &problem.integrand(), RunOptions::new(2_000_000, 5))?;
    let z = Complex64::new(0.0, 0.5);
    let exact = 1.0 / ((1.0 + z) * (2.0 + z) * (3.0 + z));
    println!("Re {:.6} +- {:.1e}   exact {:.6}", r.estimate[0], r.std_error[0], exact.re);
    println!("Im {:.6} +- {:.1e}   exact {:.6}", r.estimate[1], r.std_error[1], exact.im);
    Ok(())
}
