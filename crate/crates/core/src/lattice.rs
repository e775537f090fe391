//! Full-rank p-local lattices in rational n-space.
//!
//! A lattice is the `Z_(p)`-span of the columns of an invertible basis, where
//! `Z_(p)` is the ring of rationals with denominator prime to `p`. These are
//! exactly the compact open subgroups of `Q_p^n` in rational coordinates.
//! Bases are kept in a canonical lower-triangular column Hermite form: the
//! diagonal holds powers of `p` and every entry below the diagonal is reduced
//! modulo the diagonal entry of its row.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::padic::{is_p_integral, reduce_mod_p_power, vp_finite, Prime, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Lattice {
    p: Prime,
    dim: usize,
    basis: RationalMatrix,
}

impl Lattice {
    /// Canonical form of the p-local column span of `generators`.
    pub fn canonicalize(p: Prime, generators: &RationalMatrix) -> Result<Lattice> {
        let n = generators.rows();
        if n == 0 {
            return Err(Error::Dimension("lattice of dimension 0".into()));
        }
        let k = generators.cols();
        let mut m = generators.clone();
        let mut diag_exp = Vec::with_capacity(n);
        for i in 0..n {
            let best = (i..k)
                .filter(|&j| !m[(i, j)].is_zero())
                .min_by_key(|&j| vp_finite(&m[(i, j)], p))
                .ok_or(Error::RankDeficient { rank: i, dim: n })?;
            m.swap_cols(i, best);
            let e = vp_finite(&m[(i, i)], p);
            let unit = p.pow(e) / &m[(i, i)];
            for r in i..n {
                m[(r, i)] *= &unit;
            }
            for j in i + 1..k {
                if m[(i, j)].is_zero() {
                    continue;
                }
                let f = &m[(i, j)] / &m[(i, i)];
                for r in i..n {
                    let d = &f * &m[(r, i)];
                    m[(r, j)] -= d;
                }
            }
            diag_exp.push(e);
        }
        let mut basis = m.block(0, 0, n, n);
        for j in 0..n {
            for i in j + 1..n {
                let x = basis[(i, j)].clone();
                if x.is_zero() {
                    continue;
                }
                let r = reduce_mod_p_power(&x, p, diag_exp[i]);
                let c = (x - &r) / p.pow(diag_exp[i]);
                if c.is_zero() {
                    continue;
                }
                for t in i..n {
                    let d = &c * &basis[(t, i)];
                    basis[(t, j)] -= d;
                }
            }
        }
        Ok(Lattice { p, dim: n, basis })
    }

    /// `Z_(p)^n`.
    pub fn standard(p: Prime, dim: usize) -> Lattice {
        Lattice {
            p,
            dim,
            basis: RationalMatrix::identity(dim),
        }
    }

    /// `p^k · Z_(p)^n`.
    pub fn scaled_standard(p: Prime, dim: usize, k: i64) -> Lattice {
        Lattice {
            p,
            dim,
            basis: RationalMatrix::scalar(dim, p.pow(k)),
        }
    }

    /// `p^{k_1}Z_(p) × … × p^{k_n}Z_(p)`.
    pub fn diagonal(p: Prime, exponents: &[i64]) -> Lattice {
        let d: Vec<Q> = exponents.iter().map(|&k| p.pow(k)).collect();
        Lattice {
            p,
            dim: exponents.len(),
            basis: RationalMatrix::diagonal(&d),
        }
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    /// Exponents of the diagonal of the canonical basis.
    pub fn diagonal_exponents(&self) -> Vec<i64> {
        (0..self.dim)
            .map(|i| vp_finite(&self.basis[(i, i)], self.p))
            .collect()
    }

    /// `v_p(det B)`; lattice indices are differences of this quantity.
    pub fn covolume_exponent(&self) -> i64 {
        self.diagonal_exponents().iter().sum()
    }

    /// Inverse of the canonical basis: `x ∈ L` iff `B⁻¹x` is p-integral.
    pub fn dual_constraints(&self) -> RationalMatrix {
        // lower triangular, so forward substitution on each unit vector
        let n = self.dim;
        let mut inv = RationalMatrix::zeros(n, n);
        for c in 0..n {
            for i in c..n {
                let mut s = if i == c { Q::from_integer(1.into()) } else { Q::zero() };
                for k in c..i {
                    if !self.basis[(i, k)].is_zero() {
                        s -= &self.basis[(i, k)] * &inv[(k, c)];
                    }
                }
                inv[(i, c)] = s / &self.basis[(i, i)];
            }
        }
        inv
    }

    pub fn contains_vector(&self, x: &[Q]) -> bool {
        assert_eq!(x.len(), self.dim, "vector dimension");
        let coords = self.dual_constraints().mul_vec(x);
        coords.iter().all(|c| is_p_integral(c, self.p))
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Lattice) -> bool {
        self.p == other.p
            && self.dim == other.dim
            && self
                .dual_constraints()
                .try_mul(&other.basis)
                .expect("square bases")
                .entries()
                .all(|c| is_p_integral(c, self.p))
    }

    fn check_compatible(&self, other: &Lattice) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p.get(), other.p.get()));
        }
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "lattices of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    /// `log_p [self : sub]` for `sub ⊆ self`.
    pub fn log_index(&self, sub: &Lattice) -> Result<u64> {
        self.check_compatible(sub)?;
        if !self.contains(sub) {
            return Err(Error::NotContained);
        }
        Ok((sub.covolume_exponent() - self.covolume_exponent()) as u64)
    }

    /// `[self : sub]` for `sub ⊆ self`.
    pub fn index(&self, sub: &Lattice) -> Result<BigUint> {
        Ok(self.p.pow_uint(self.log_index(sub)?))
    }

    /// Smallest lattice containing both.
    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        self.check_compatible(other)?;
        Lattice::canonicalize(self.p, &self.basis.augment(&other.basis)?)
    }

    pub fn intersection(&self, other: &Lattice) -> Result<Lattice> {
        self.check_compatible(other)?;
        integral_preimage_lattice(
            self.p,
            &self.dual_constraints().stack(&other.dual_constraints())?,
        )
    }

    /// `A(L)`, defined when `A` is invertible.
    pub fn image(&self, a: &RationalMatrix) -> Result<Lattice> {
        if a.rows() != self.dim || a.cols() != self.dim {
            return Err(Error::Dimension("map does not act on the lattice's space".into()));
        }
        Lattice::canonicalize(self.p, &(a * &self.basis)).map_err(|e| match e {
            Error::RankDeficient { .. } => Error::Singular,
            other => other,
        })
    }

    /// `{x ∈ bound : A·x ∈ self}`. The bounding lattice keeps the result
    /// full rank when `A` is singular.
    pub fn preimage_within(&self, a: &RationalMatrix, bound: &Lattice) -> Result<Lattice> {
        self.check_compatible(bound)?;
        if a.rows() != self.dim || a.cols() != self.dim {
            return Err(Error::Dimension("map does not act on the lattice's space".into()));
        }
        let constraints = bound
            .dual_constraints()
            .stack(&(&self.dual_constraints() * a))?;
        integral_preimage_lattice(self.p, &constraints)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(p={}, basis={})", self.p, self.basis)
    }
}

/// Deserialization re-canonicalizes, so hand-written bases are accepted.
impl<'de> Deserialize<'de> for Lattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            p: Prime,
            dim: usize,
            basis: RationalMatrix,
        }
        let raw = Raw::deserialize(d)?;
        if raw.basis.rows() != raw.dim || raw.basis.cols() != raw.dim {
            return Err(serde::de::Error::custom("basis shape does not match dim"));
        }
        Lattice::canonicalize(raw.p, &raw.basis).map_err(serde::de::Error::custom)
    }
}

/// `{x : M·x is p-integral in every coordinate}` for `M` of full column rank.
///
/// Row operations over `Z_(p)` bring `M` to an upper-triangular block `T` on
/// top of zero rows; the solution set is then `T⁻¹·Z_(p)^n`.
pub fn integral_preimage_lattice(p: Prime, m: &RationalMatrix) -> Result<Lattice> {
    let rows = m.rows();
    let n = m.cols();
    if n == 0 {
        return Err(Error::Dimension("lattice of dimension 0".into()));
    }
    let mut t = m.clone();
    for c in 0..n {
        let piv = (c..rows)
            .filter(|&r| !t[(r, c)].is_zero())
            .min_by_key(|&r| vp_finite(&t[(r, c)], p))
            .ok_or(Error::RankDeficient { rank: c, dim: n })?;
        t.swap_rows(piv, c);
        for r in c + 1..rows {
            if t[(r, c)].is_zero() {
                continue;
            }
            let f = &t[(r, c)] / &t[(c, c)];
            for j in c..n {
                let d = &f * &t[(c, j)];
                t[(r, j)] -= d;
            }
        }
    }
    let top = t.block(0, 0, n, n);
    Lattice::canonicalize(p, &top.inverse()?)
}
