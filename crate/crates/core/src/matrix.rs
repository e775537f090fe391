//! Dense exact rational matrices and characteristic polynomials.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_traits::{One, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{format_rational, RationalInput, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Q::one())
    }

    pub fn scalar(n: usize, c: Q) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn diagonal(entries: &[Q]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(RationalMatrix {
            rows: r,
            cols: if r == 0 { 0 } else { c },
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from integer pairs `(num, den)`; handy in tests and examples.
    pub fn from_fractions(rows: &[&[(i64, i64)]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&(n, d)| Q::new(n.into(), d.into())).collect())
            .collect();
        Self::from_rows(rows).expect("rectangular input")
    }

    pub fn from_columns(cols: &[Vec<Q>]) -> Result<Self> {
        let n = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::Dimension("ragged columns".into()));
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    /// Companion matrix of the monic polynomial with coefficients `a_0..a_{n-1}`.
    pub fn companion(coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut m = Self::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = Q::one();
        }
        for (i, a) in coeffs.iter().enumerate() {
            m[(i, n - 1)] = -a.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Q> {
        self.data.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Q) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Q::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn try_mul(&self, rhs: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> RationalMatrix {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.try_mul(self).unwrap();
        }
        acc
    }

    /// Vertical concatenation `[self; other]`.
    pub fn stack(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension("stacking needs equal column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(RationalMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn augment(&self, other: &RationalMatrix) -> Result<RationalMatrix> {
        Ok(self.transpose().stack(&other.transpose())?.transpose())
    }

    /// Copies the block with top-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> RationalMatrix {
        let mut b = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                b[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        b
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &RationalMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    /// Block lower-triangular assembly `[[a1, 0], [b, a2]]`.
    pub fn block_lower(a1: &RationalMatrix, b: &RationalMatrix, a2: &RationalMatrix) -> Result<Self> {
        if !a1.is_square() || !a2.is_square() || b.rows != a2.rows || b.cols != a1.cols {
            return Err(Error::Dimension(format!(
                "block assembly needs square A1 ({}x{}), square A2 ({}x{}) and B of shape {}x{} (got {}x{})",
                a1.rows, a1.cols, a2.rows, a2.cols, a2.rows, a1.cols, b.rows, b.cols
            )));
        }
        let n = a1.rows + a2.rows;
        let mut m = Self::zeros(n, n);
        m.set_block(0, 0, a1);
        m.set_block(a1.rows, 0, b);
        m.set_block(a1.rows, a1.rows, a2);
        Ok(m)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Determinant by Gaussian elimination over the rationals.
    pub fn determinant(&self) -> Result<Q> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Q::one();
        for c in 0..n {
            let Some(piv) = (c..n).find(|&r| !m[(r, c)].is_zero()) else {
                return Ok(Q::zero());
            };
            if piv != c {
                m.swap_rows(piv, c);
                det = -det;
            }
            let pv = m[(c, c)].clone();
            det *= &pv;
            for r in c + 1..n {
                if m[(r, c)].is_zero() {
                    continue;
                }
                let f = &m[(r, c)] / &pv;
                for j in c..n {
                    let d = &f * &m[(c, j)];
                    m[(r, j)] -= d;
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<RationalMatrix> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let piv = (c..n).find(|&r| !m[(r, c)].is_zero()).ok_or(Error::Singular)?;
            m.swap_rows(piv, c);
            inv.swap_rows(piv, c);
            let pv = m[(c, c)].clone();
            for j in 0..n {
                m[(c, j)] /= &pv;
                inv[(c, j)] /= &pv;
            }
            for r in 0..n {
                if r == c || m[(r, c)].is_zero() {
                    continue;
                }
                let f = m[(r, c)].clone();
                for j in 0..n {
                    let a = &f * &m[(c, j)];
                    m[(r, j)] -= a;
                    let b = &f * &inv[(c, j)];
                    inv[(r, j)] -= b;
                }
            }
        }
        Ok(inv)
    }

    /// Characteristic polynomial `det(X·I − A)`.
    pub fn charpoly(&self) -> Result<MonicPolynomial> {
        charpoly(self)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Q;

    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;

    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        self.try_mul(rhs).expect("matrix dimensions")
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<Vec<RationalInput>> = Vec::deserialize(d)?;
        let rows = raw
            .into_iter()
            .map(|r| r.into_iter().map(RationalInput::into_rational).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        RationalMatrix::from_rows(rows).map_err(de::Error::custom)
    }
}

/// Monic polynomial `X^n + a_{n-1} X^{n-1} + … + a_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonicPolynomial {
    coeffs: Vec<Q>,
}

impl MonicPolynomial {
    /// From the non-leading coefficients `a_0..a_{n-1}`.
    pub fn new(coeffs: Vec<Q>) -> Self {
        MonicPolynomial { coeffs }
    }

    /// `∏ (X − r)`.
    pub fn from_roots(roots: &[Q]) -> Self {
        // full coefficient vector, lowest degree first, leading 1 kept at the end
        let mut full = vec![Q::one()];
        for r in roots {
            let mut next = vec![Q::zero(); full.len() + 1];
            for (i, c) in full.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            full = next;
        }
        full.pop();
        MonicPolynomial { coeffs: full }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `X^i`, including the implicit leading 1.
    pub fn coeff(&self, i: usize) -> Q {
        match i.cmp(&self.coeffs.len()) {
            std::cmp::Ordering::Less => self.coeffs[i].clone(),
            std::cmp::Ordering::Equal => Q::one(),
            std::cmp::Ordering::Greater => Q::zero(),
        }
    }

    /// Non-leading coefficients `a_0..a_{n-1}`.
    pub fn lower_coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Parses a monic polynomial in `X`, e.g. `"X^2-10/3X+1"` or `"x^3 - 2*x + 1/9"`.
    pub fn parse(s: &str) -> Result<Self> {
        parse_monic(s)
    }
}

impl fmt::Display for MonicPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut out = String::new();
        for i in (0..=n).rev() {
            let c = self.coeff(i);
            if c.is_zero() {
                continue;
            }
            let neg = c < Q::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{i}"),
            };
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}{mono}"));
            }
        }
        write!(f, "{out}")
    }
}

fn parse_monic(s: &str) -> Result<MonicPolynomial> {
    let bad = |m: &str| Error::Parse(format!("malformed polynomial {s:?}: {m}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty"));
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (idx, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && idx > 0 && !cur.is_empty() {
            terms.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else if (ch == '+' || ch == '-') && cur.is_empty() {
            if ch == '-' {
                neg = !neg;
            }
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(bad("dangling sign"));
    }
    terms.push((neg, cur));

    let mut by_degree: std::collections::BTreeMap<usize, Q> = Default::default();
    for (neg, t) in terms {
        let lower = t.to_ascii_lowercase();
        let (coef, deg) = match lower.find('x') {
            None => (crate::padic::parse_rational(&lower)?, 0usize),
            Some(pos) => {
                let c = lower[..pos].trim_end_matches('*');
                let coef = if c.is_empty() {
                    Q::one()
                } else {
                    crate::padic::parse_rational(c)?
                };
                let rest = &lower[pos + 1..];
                let deg = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .and_then(|d| d.parse::<usize>().ok())
                        .ok_or_else(|| bad("bad exponent"))?
                };
                (coef, deg)
            }
        };
        let coef = if neg { -coef } else { coef };
        *by_degree.entry(deg).or_insert_with(Q::zero) += coef;
    }
    by_degree.retain(|_, c| !c.is_zero());
    let (&deg, lead) = by_degree.iter().next_back().ok_or_else(|| bad("zero polynomial"))?;
    if !lead.is_one() {
        return Err(bad("leading coefficient must be 1"));
    }
    let coeffs = (0..deg)
        .map(|i| by_degree.get(&i).cloned().unwrap_or_else(Q::zero))
        .collect();
    Ok(MonicPolynomial { coeffs })
}

/// `det(X·I − A)` via reduction to upper Hessenberg form by rational
/// similarity transforms, followed by the Hessenberg determinant recurrence.
pub fn charpoly(a: &RationalMatrix) -> Result<MonicPolynomial> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "characteristic polynomial of {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut h = a.clone();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| !h[(i, m - 1)].is_zero()) else {
            continue;
        };
        if i != m {
            h.swap_rows(i, m);
            h.swap_cols(i, m);
        }
        let pivot = h[(m, m - 1)].clone();
        for i in m + 1..n {
            if h[(i, m - 1)].is_zero() {
                continue;
            }
            let u = &h[(i, m - 1)] / &pivot;
            // row_i -= u·row_m, then col_m += u·col_i keeps the similarity class
            for j in 0..n {
                let d = &u * &h[(m, j)];
                h[(i, j)] -= d;
            }
            for r in 0..n {
                let d = &u * &h[(r, i)];
                h[(r, m)] += d;
            }
        }
    }

    // polys[k] = charpoly of the leading k×k block, full coefficient vectors
    let mut polys: Vec<Vec<Q>> = vec![vec![Q::one()]];
    for k in 1..=n {
        let prev = &polys[k - 1];
        let mut next = vec![Q::zero(); k + 1];
        for (i, c) in prev.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * &h[(k - 1, k - 1)];
        }
        let mut t = Q::one();
        for i in (1..k).rev() {
            t *= &h[(i, i - 1)];
            if t.is_zero() {
                break;
            }
            let f = &t * &h[(i - 1, k - 1)];
            for (j, c) in polys[i - 1].iter().enumerate() {
                next[j] -= &f * c;
            }
        }
        polys.push(next);
    }
    let mut full = polys.pop().unwrap();
    full.pop();
    Ok(MonicPolynomial { coeffs: full })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    /// Leibniz expansion of det(X·I − A) with polynomial entries; independent
    /// of the Hessenberg route.
    fn leibniz_charpoly(a: &RationalMatrix) -> Vec<Q> {
        let n = a.rows();
        let entry = |i: usize, j: usize| -> Vec<Q> {
            if i == j {
                vec![-a[(i, j)].clone(), Q::one()]
            } else {
                vec![-a[(i, j)].clone()]
            }
        };
        let mut total = vec![Q::zero(); n + 1];
        let mut perm: Vec<usize> = (0..n).collect();
        permute(&mut perm, 0, &mut |p: &[usize]| {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let mut prod = vec![Q::one()];
            for (i, &pi) in p.iter().enumerate() {
                let e = entry(i, pi);
                let mut next = vec![Q::zero(); prod.len() + e.len() - 1];
                for (x, cx) in prod.iter().enumerate() {
                    for (y, cy) in e.iter().enumerate() {
                        next[x + y] += cx * cy;
                    }
                }
                prod = next;
            }
            for (k, c) in prod.into_iter().enumerate() {
                if inversions % 2 == 0 {
                    total[k] += c;
                } else {
                    total[k] -= c;
                }
            }
        });
        total
    }

    fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == p.len() {
            f(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, f);
            p.swap(k, i);
        }
    }

    fn full_coeffs(f: &MonicPolynomial) -> Vec<Q> {
        (0..=f.degree()).map(|i| f.coeff(i)).collect()
    }

    #[test]
    fn charpoly_examples() {
        let id = RationalMatrix::identity(2);
        assert_eq!(charpoly(&id).unwrap().lower_coeffs(), &[q(1, 1), q(-2, 1)]);

        let comp = RationalMatrix::companion(&[q(5, 7), q(-3, 2)]);
        assert_eq!(charpoly(&comp).unwrap().lower_coeffs(), &[q(5, 7), q(-3, 2)]);

        let d = RationalMatrix::diagonal(&[q(1, 3), q(3, 1)]);
        assert_eq!(charpoly(&d).unwrap().lower_coeffs(), &[q(1, 1), q(-10, 3)]);

        assert!(charpoly(&RationalMatrix::zeros(2, 3)).is_err());
        assert_eq!(charpoly(&RationalMatrix::zeros(0, 0)).unwrap().degree(), 0);
    }

    #[test]
    fn charpoly_needs_pivoting() {
        // zero subdiagonal entries force a row/column swap during reduction
        let a = RationalMatrix::from_fractions(&[
            &[(1, 1), (2, 1), (3, 1), (0, 1)],
            &[(0, 1), (0, 1), (1, 5), (1, 1)],
            &[(4, 1), (0, 1), (0, 1), (2, 3)],
            &[(0, 1), (7, 1), (0, 1), (1, 1)],
        ]);
        assert_eq!(full_coeffs(&charpoly(&a).unwrap()), leibniz_charpoly(&a));
    }

    #[test]
    fn polynomial_parsing() {
        let f = MonicPolynomial::parse("X^2-10/3X+1").unwrap();
        assert_eq!(f.lower_coeffs(), &[q(1, 1), q(-10, 3)]);
        let g = MonicPolynomial::parse("x^3 - 2*x + 1/9").unwrap();
        assert_eq!(g.lower_coeffs(), &[q(1, 9), q(-2, 1), q(0, 1)]);
        let h = MonicPolynomial::parse("X^2").unwrap();
        assert_eq!(h.lower_coeffs(), &[q(0, 1), q(0, 1)]);
        assert!(MonicPolynomial::parse("2X^2+1").is_err());
        assert!(MonicPolynomial::parse("X^2+").is_err());
        assert!(MonicPolynomial::parse("X^a").is_err());
        assert_eq!(f.to_string(), "X^2 - 10/3X + 1");
        assert_eq!(MonicPolynomial::parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn from_roots_expands() {
        let f = MonicPolynomial::from_roots(&[q(1, 3), q(3, 1)]);
        assert_eq!(f.lower_coeffs(), &[q(1, 1), q(-10, 3)]);
        assert!(f.eval(&q(3, 1)).is_zero());
    }

    #[test]
    fn inverse_and_determinant() {
        let a = RationalMatrix::from_fractions(&[&[(2, 1), (1, 3)], &[(5, 1), (1, 1)]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, RationalMatrix::identity(2));
        assert_eq!(a.determinant().unwrap(), q(1, 3));
        let s = RationalMatrix::from_fractions(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]]);
        assert!(matches!(s.inverse(), Err(Error::Singular)));
        assert!(s.determinant().unwrap().is_zero());
    }

    #[test]
    fn json_shape() {
        let a = RationalMatrix::from_fractions(&[&[(1, 3), (2, 1)]]);
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"[["1/3","2/1"]]"#);
        let b: RationalMatrix = serde_json::from_str(r#"[["1/3", 2]]"#).unwrap();
        assert_eq!(a, b);
    }

    fn matrix(n: usize) -> impl Strategy<Value = RationalMatrix> {
        proptest::collection::vec((-9i64..10, 1i64..10), n * n).prop_map(move |v| {
            let rows = v
                .chunks(n)
                .map(|r| r.iter().map(|&(a, b)| q(a, b)).collect())
                .collect();
            RationalMatrix::from_rows(rows).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn charpoly_matches_leibniz(a in (1usize..5).prop_flat_map(matrix)) {
            prop_assert_eq!(full_coeffs(&charpoly(&a).unwrap()), leibniz_charpoly(&a));
        }

        #[test]
        fn charpoly_similarity_invariant(a in matrix(3), s in matrix(3)) {
            prop_assume!(!s.determinant().unwrap().is_zero());
            let conj = &(&s * &a) * &s.inverse().unwrap();
            prop_assert_eq!(charpoly(&conj).unwrap(), charpoly(&a).unwrap());
        }
    }
}
