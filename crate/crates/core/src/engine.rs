//! Brute-force oracles on `Q_p^n`: entropy as the growth rate of cotrajectory
//! indices, scale by Möller's limit formula, a bounded search for small
//! displacement indices, and a checker for additivity along invariant subspaces.
//!
//! None of these routes look at eigenvalues; they only intersect, add and
//! compare lattices, so they are independent of [`crate::newton`].

use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::RationalMatrix;
use crate::newton::yuzvinski_entropy;
use crate::padic::{EntropyValue, Prime};

pub const DEFAULT_WINDOW: usize = 5;
pub const DEFAULT_CAP: usize = 40;

/// Trace of a limit computation over integer per-step exponents.
///
/// The tracked sequence `e_n` is eventually `n·d + g(n)` with `g` periodic:
/// for cotrajectories `g` is constant after a short transient, while Möller's
/// sequence can keep oscillating (for instance `3, 0, 3, 0, …` when a unipotent
/// part rotates the lattice). The limit is accepted once the last `window`
/// blocks of `period` consecutive increments are identical, and then equals the
/// block sum divided by the period. With `period = 1` this is plain eventual
/// constancy of the increments.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitDiagnostics {
    /// Successive differences of the tracked exponents, the first taken
    /// against 0. Cotrajectory traces start at `C_2`, as `C_1 = U`.
    pub increments: Vec<i64>,
    /// 1-based position of the first increment of the repeating window.
    pub stabilized_at: Option<usize>,
    pub period: Option<usize>,
    pub window: usize,
    pub cap: usize,
}

impl LimitDiagnostics {
    pub(crate) fn new(window: usize, cap: usize) -> Self {
        LimitDiagnostics {
            increments: Vec::new(),
            stabilized_at: None,
            period: None,
            window,
            cap,
        }
    }

    /// Records an increment; returns the per-step limit once a repeating
    /// window is found.
    pub(crate) fn push(&mut self, d: i64) -> Option<i64> {
        self.increments.push(d);
        let len = self.increments.len();
        for period in 1..=len / self.window {
            let span = period * self.window;
            let tail = &self.increments[len - span..];
            if !(period..span).all(|i| tail[i] == tail[i - period]) {
                continue;
            }
            let block: i64 = tail[..period].iter().sum();
            if block % period as i64 != 0 {
                continue;
            }
            self.stabilized_at = Some(len - span + 1);
            self.period = Some(period);
            return Some(block / period as i64);
        }
        None
    }
}

pub(crate) fn check_limits(window: usize, cap: usize) -> Result<()> {
    if window == 0 || cap < window {
        return Err(Error::Invalid(format!(
            "window must be positive and at most cap (window {window}, cap {cap})"
        )));
    }
    Ok(())
}

fn check_acts_on(a: &RationalMatrix, u: &Lattice) -> Result<()> {
    if !a.is_square() || a.rows() != u.dim() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix does not act on a lattice of dimension {}",
            a.rows(),
            a.cols(),
            u.dim()
        )));
    }
    Ok(())
}

/// `C_n(A, U) = U ∩ A⁻¹U ∩ … ∩ A^{−n+1}U`, with preimages in place of inverses
/// so singular maps are allowed.
///
/// Built with the recursion `C_{n+1} = U ∩ A⁻¹(C_n)`.
pub fn cotrajectory(a: &RationalMatrix, u: &Lattice, n: usize) -> Result<Lattice> {
    check_acts_on(a, u)?;
    if n == 0 {
        return Err(Error::Invalid("cotrajectories are indexed from 1".into()));
    }
    let mut c = u.clone();
    for _ in 1..n {
        c = c.preimage_within(a, u)?;
    }
    Ok(c)
}

/// Entropy as `lim log_p[U : C_n(A, U)] / n` at the base lattice `U`.
pub fn htop_oracle_at(
    a: &RationalMatrix,
    u: &Lattice,
    window: usize,
    cap: usize,
) -> Result<(EntropyValue, LimitDiagnostics)> {
    check_acts_on(a, u)?;
    let mut c = u.clone();
    let (limit, diag) = run_limit(window, cap, || {
        if u.dim() == 0 {
            return Ok(0);
        }
        c = c.preimage_within(a, u)?;
        Ok(u.log_index(&c)? as i64)
    })?;
    Ok((EntropyValue::log_p(u.p(), limit), diag))
}

/// Feeds the increments of the sequence produced by `next` to the detector.
pub(crate) fn run_limit(window: usize, cap: usize, mut next: impl FnMut() -> Result<i64>) -> Result<(u64, LimitDiagnostics)> {
    check_limits(window, cap)?;
    let mut diag = LimitDiagnostics::new(window, cap);
    let mut prev = 0i64;
    for _ in 0..cap {
        let e = next()?;
        if let Some(limit) = diag.push(e - prev) {
            return Ok((limit as u64, diag));
        }
        prev = e;
    }
    Err(Error::NoStabilization { window, cap })
}

/// Cotrajectory entropy at `U = Z_(p)^n`. Since `C_n(A, p^kU) = p^k·C_n(A, U)`,
/// every scalar multiple of the standard lattice gives the same value.
pub fn htop_oracle(
    a: &RationalMatrix,
    p: Prime,
    window: usize,
    cap: usize,
) -> Result<(EntropyValue, LimitDiagnostics)> {
    htop_oracle_at(a, &Lattice::standard(p, a.rows()), window, cap)
}

/// Scale by Möller's formula: the increments of `e_n = log_p[U + AⁿU : U]`.
///
/// `AⁿU` may be degenerate for singular `A`; the sum with `U` is formed
/// before canonicalization so it is always full rank.
pub fn moeller_scale_oracle(
    a: &RationalMatrix,
    u: &Lattice,
    window: usize,
    cap: usize,
) -> Result<(BigUint, LimitDiagnostics)> {
    check_acts_on(a, u)?;
    let p = u.p();
    let mut image = u.basis().clone();
    let (limit, diag) = run_limit(window, cap, || {
        if u.dim() == 0 {
            return Ok(0);
        }
        image = a * &image;
        let sum = Lattice::canonicalize(p, &u.basis().augment(&image)?)?;
        Ok(sum.log_index(u)? as i64)
    })?;
    Ok((p.pow_uint(limit), diag))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScaleSearch {
    pub best_log_index: u64,
    #[serde(serialize_with = "serialize_biguint")]
    pub best_index: BigUint,
    pub witness: Lattice,
    pub candidates: usize,
}

pub(crate) fn serialize_biguint<S: serde::Serializer>(
    x: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Minimum of `[A(U) : A(U) ∩ U]` over `U = p^{k_1}Z_(p) × … × p^{k_n}Z_(p)`
/// with every `k_i` in `k_range`.
///
/// The index is unchanged by a common shift of all `k_i`, so only tuples whose
/// smallest exponent equals the lower end of the range are evaluated; every
/// other tuple in the family is a shift of one of these. The result bounds the
/// scale from above and is not a certificate of minimality.
pub fn min_scale_search(
    a: &RationalMatrix,
    p: Prime,
    k_range: RangeInclusive<i64>,
) -> Result<ScaleSearch> {
    if !a.is_square() {
        return Err(Error::Dimension("scale of a non-square matrix".into()));
    }
    if k_range.is_empty() {
        return Err(Error::Invalid("empty exponent range".into()));
    }
    if a.determinant()?.is_zero() {
        return Err(Error::Singular);
    }
    let n = a.rows();
    let lo = *k_range.start();
    let width = (k_range.end() - lo + 1) as usize;
    let mut best: Option<(u64, Lattice)> = None;
    let mut candidates = 0;
    let mut digits = vec![0usize; n];
    loop {
        if digits.contains(&0) {
            let exps: Vec<i64> = digits.iter().map(|&d| lo + d as i64).collect();
            let u = Lattice::diagonal(p, &exps);
            let image = u.image(a)?;
            let overlap = image.intersection(&u)?;
            let idx = image.log_index(&overlap)?;
            candidates += 1;
            if best.as_ref().is_none_or(|(b, _)| idx < *b) {
                best = Some((idx, u));
            }
        }
        // odometer over width^n tuples
        let mut i = 0;
        while i < n {
            digits[i] += 1;
            if digits[i] < width {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    let (best_log_index, witness) = best.expect("at least one candidate");
    Ok(ScaleSearch {
        best_log_index,
        best_index: p.pow_uint(best_log_index),
        witness,
        candidates,
    })
}

/// Entropy of one map by both routes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualEntropy {
    pub formula: EntropyValue,
    pub oracle: EntropyValue,
    pub diagnostics: LimitDiagnostics,
}

impl DualEntropy {
    pub fn compute(a: &RationalMatrix, p: Prime, window: usize, cap: usize) -> Result<Self> {
        let formula = yuzvinski_entropy(a, p)?;
        let (oracle, diagnostics) = htop_oracle(a, p, window, cap)?;
        Ok(DualEntropy {
            formula,
            oracle,
            diagnostics,
        })
    }

    pub fn agree(&self) -> bool {
        self.formula == self.oracle
    }
}

/// Additivity check for `A = [[A1, 0], [B, A2]]` on `Q_p^{n1+n2}`.
///
/// The trailing coordinates span an `A`-invariant subspace on which `A` acts
/// by `A2`; `A1` is the induced map on the quotient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdditionReport {
    pub p: Prime,
    pub whole: DualEntropy,
    pub invariant: DualEntropy,
    pub quotient: DualEntropy,
    pub formula_additive: bool,
    pub oracle_additive: bool,
    pub paths_agree: bool,
}

impl AdditionReport {
    pub fn holds(&self) -> bool {
        self.formula_additive && self.oracle_additive && self.paths_agree
    }
}

pub fn check_addition_qpn(
    a1: &RationalMatrix,
    b: &RationalMatrix,
    a2: &RationalMatrix,
    p: Prime,
    window: usize,
    cap: usize,
) -> Result<AdditionReport> {
    let a = RationalMatrix::block_lower(a1, b, a2)?;
    let whole = DualEntropy::compute(&a, p, window, cap)?;
    let quotient = DualEntropy::compute(a1, p, window, cap)?;
    let invariant = DualEntropy::compute(a2, p, window, cap)?;
    let formula_additive = whole.formula == quotient.formula.sum(&invariant.formula);
    let oracle_additive = whole.oracle == quotient.oracle.sum(&invariant.oracle);
    let paths_agree = whole.agree() && quotient.agree() && invariant.agree();
    Ok(AdditionReport {
        p,
        whole,
        invariant,
        quotient,
        formula_additive,
        oracle_additive,
        paths_agree,
    })
}
