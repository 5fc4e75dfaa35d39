//! Exact rational and integer linear algebra for cone construction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Exact conversion of a finite double.
pub fn q_from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::InvalidInput(format!("{x} is not a finite number")))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parse `a`, `a/b` or a decimal literal such as `-0.25` or `1e-3`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b.is_zero() {
            return None;
        }
        return Some(Q::new(a, b));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Some(Q::from_integer(i));
    }
    // Decimal literals are read exactly, not through their nearest double.
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        Q::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        v = -v;
    }
    Some(v)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Positive multiple of `v` with coprime integer entries.
pub fn primitive(v: &[Q]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    primitive_int(ints)
}

pub fn primitive_int(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x /= &g;
        }
    }
    v
}

pub fn to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// Row echelon form in place; returns the pivot columns.
fn echelon(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    echelon(&mut m).len()
}

pub fn rank_int(rows: &[&[BigInt]]) -> usize {
    let m: Vec<Vec<Q>> = rows.iter().map(|r| to_q(r)).collect();
    rank(&m)
}

/// Determinant by Gaussian elimination over the rationals.
pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    d
}

/// Solve `sum_k coeffs[k] * cols[k] = target` for linearly independent
/// `cols`; `None` if `target` is outside their span.
pub fn solve_in_span(cols: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let k = cols.len();
    let d = target.len();
    let mut m: Vec<Vec<Q>> = (0..d)
        .map(|i| {
            let mut row: Vec<Q> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = echelon(&mut m);
    if pivots.contains(&k) || pivots.len() < k {
        return None;
    }
    Some((0..k).map(|i| m[i][k].clone()).collect())
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_q("3/6"), Some(Q::new(1.into(), 2.into())));
        assert_eq!(parse_q("-0.25"), Some(Q::new((-1).into(), 4.into())));
        assert_eq!(parse_q("1e-3"), Some(Q::new(1.into(), 1000.into())));
        assert_eq!(parse_q("2.5E2"), Some(q(250)));
        assert_eq!(parse_q("7"), Some(q(7)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("x"), None);
        assert_eq!(parse_q("."), None);
    }

    #[test]
    fn determinant_and_rank() {
        let m = vec![qv(&[2, 0, 1]), qv(&[1, 3, 2]), qv(&[1, 1, 2])];
        assert_eq!(det(&m), q(6));
        assert_eq!(rank(&m), 3);
        let s = vec![qv(&[1, 2]), qv(&[2, 4])];
        assert_eq!(det(&s), q(0));
        assert_eq!(rank(&s), 1);
    }

    #[test]
    fn primitive_vectors() {
        let v = vec![Q::new(1.into(), 2.into()), Q::new((-3).into(), 4.into())];
        assert_eq!(primitive(&v), vec![BigInt::from(2), BigInt::from(-3)]);
        assert_eq!(primitive_int(vec![4.into(), 6.into(), 0.into()]), vec![BigInt::from(2), BigInt::from(3), BigInt::from(0)]);
    }

    #[test]
    fn span_solve() {
        let cols = vec![qv(&[1, 0, 1]), qv(&[0, 1, 1])];
        assert_eq!(solve_in_span(&cols, &qv(&[2, 3, 5])), Some(qv(&[2, 3])));
        assert_eq!(solve_in_span(&cols, &qv(&[2, 3, 4])), None);
    }
}
