//! The Heisenberg groups `H(Z_p) ⊂ H(Q_p)` of unipotent upper triangular
//! 3×3 matrices `M(a, b; z)`, a family of diagonal endomorphisms and the
//! inner automorphisms.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::engine::{run_limit, LimitDiagnostics};
use crate::error::{Error, Result};
use crate::group::Classification;
use crate::matrix::RationalMatrix;
use crate::newton::yuzvinski_entropy;
use crate::padic::{is_p_integral, serde_rational, vp_finite, EntropyValue, Prime, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    Zp,
    Qp,
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zp" => Ok(Ring::Zp),
            "qp" => Ok(Ring::Qp),
            other => Err(Error::Parse(format!("ring must be zp or qp, got {other:?}"))),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ring::Zp => "zp",
            Ring::Qp => "qp",
        })
    }
}

/// `M(a, b; z)`, i.e. the matrix `[[1, a, z], [0, 1, b], [0, 0, 1]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HeisenbergElement {
    #[serde(with = "serde_rational")]
    pub a: Q,
    #[serde(with = "serde_rational")]
    pub b: Q,
    #[serde(with = "serde_rational")]
    pub z: Q,
}

impl HeisenbergElement {
    pub fn new(a: Q, b: Q, z: Q) -> Self {
        HeisenbergElement { a, b, z }
    }

    pub fn identity() -> Self {
        Self::new(Q::zero(), Q::zero(), Q::zero())
    }

    pub fn central(z: Q) -> Self {
        Self::new(Q::zero(), Q::zero(), z)
    }

    /// `M(a,b;z)·M(a',b';z') = M(a+a', b+b'; z+z'+a·b')`.
    pub fn hmul(&self, other: &HeisenbergElement) -> HeisenbergElement {
        HeisenbergElement {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            z: &self.z + &other.z + &self.a * &other.b,
        }
    }

    pub fn inverse(&self) -> HeisenbergElement {
        HeisenbergElement {
            a: -&self.a,
            b: -&self.b,
            z: &self.a * &self.b - &self.z,
        }
    }

    /// `x y x⁻¹ y⁻¹`.
    pub fn commutator(&self, other: &HeisenbergElement) -> HeisenbergElement {
        self.hmul(other).hmul(&self.inverse()).hmul(&other.inverse())
    }

    pub fn is_central(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Membership in `H(Z_p)`.
    pub fn is_integral(&self, p: Prime) -> bool {
        [&self.a, &self.b, &self.z].iter().all(|x| is_p_integral(x, p))
    }

    pub fn to_matrix(&self) -> RationalMatrix {
        let (o, l) = (Q::zero(), Q::one());
        RationalMatrix::from_rows(vec![
            vec![l.clone(), self.a.clone(), self.z.clone()],
            vec![o.clone(), l.clone(), self.b.clone()],
            vec![o.clone(), o, l],
        ])
        .expect("3x3")
    }
}

impl fmt::Display for HeisenbergElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M({}, {}; {})", self.a, self.b, self.z)
    }
}

/// `M(a, b; z) ↦ M(s·a, t·b; s·t·z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalEndo {
    #[serde(with = "serde_rational")]
    pub s: Q,
    #[serde(with = "serde_rational")]
    pub t: Q,
}

impl DiagonalEndo {
    pub fn new(s: Q, t: Q) -> Self {
        DiagonalEndo { s, t }
    }

    pub fn apply(&self, x: &HeisenbergElement) -> HeisenbergElement {
        HeisenbergElement {
            a: &self.s * &x.a,
            b: &self.t * &x.b,
            z: &self.s * &self.t * &x.z,
        }
    }

    pub fn compose(&self, other: &DiagonalEndo) -> DiagonalEndo {
        DiagonalEndo::new(&self.s * &other.s, &self.t * &other.t)
    }

    pub fn is_automorphism(&self) -> bool {
        !self.s.is_zero() && !self.t.is_zero()
    }

    /// Whether the map preserves `H(Z_p)`.
    pub fn is_integral(&self, p: Prime) -> bool {
        is_p_integral(&self.s, p) && is_p_integral(&self.t, p)
    }

    /// Linear action on the coordinates `(a, b, z)`.
    pub fn coordinate_matrix(&self) -> RationalMatrix {
        RationalMatrix::diagonal(&[self.s.clone(), self.t.clone(), &self.s * &self.t])
    }
}

/// Conjugation by `M(a0, b0; ·)`: `M(a, b; z) ↦ M(a, b; z + a0·b − b0·a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InnerAuto {
    #[serde(with = "serde_rational")]
    pub a0: Q,
    #[serde(with = "serde_rational")]
    pub b0: Q,
}

impl InnerAuto {
    pub fn new(a0: Q, b0: Q) -> Self {
        InnerAuto { a0, b0 }
    }

    pub fn conjugator(&self) -> HeisenbergElement {
        HeisenbergElement::new(self.a0.clone(), self.b0.clone(), Q::zero())
    }

    pub fn apply(&self, x: &HeisenbergElement) -> HeisenbergElement {
        HeisenbergElement {
            a: x.a.clone(),
            b: x.b.clone(),
            z: &x.z + &self.a0 * &x.b - &self.b0 * &x.a,
        }
    }

    pub fn coordinate_matrix(&self) -> RationalMatrix {
        let (o, l) = (Q::zero(), Q::one());
        RationalMatrix::from_rows(vec![
            vec![l.clone(), o.clone(), o.clone()],
            vec![o.clone(), l.clone(), o],
            vec![-&self.b0, self.a0.clone(), l],
        ])
        .expect("3x3")
    }
}

/// Entropy split along the center `Z ≅ Q_p` and the quotient `H/Z ≅ Q_p²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalEntropy {
    pub center: EntropyValue,
    pub quotient: EntropyValue,
    pub total: EntropyValue,
}

/// Center plus quotient; only for automorphisms, where additivity is known.
pub fn entropy_diagonal(phi: &DiagonalEndo, p: Prime) -> Result<DiagonalEntropy> {
    if !phi.is_automorphism() {
        return Err(Error::Invalid(
            "the center/quotient decomposition is only used for automorphisms (s, t nonzero)".into(),
        ));
    }
    let center = yuzvinski_entropy(&RationalMatrix::scalar(1, &phi.s * &phi.t), p)?;
    let quotient = yuzvinski_entropy(&RationalMatrix::diagonal(&[phi.s.clone(), phi.t.clone()]), p)?;
    let total = center.sum(&quotient);
    Ok(DiagonalEntropy { center, quotient, total })
}

/// Whether `H(p^k Z_p)` is a subgroup: the `a·b'` term lands at level `2k`.
pub fn heisenberg_base_is_subgroup(k: i64) -> bool {
    2 * k >= k
}

/// Cotrajectory entropy at the base `U_k = H(p^k Z_p)`.
///
/// Each `φ^j` scales the coordinates separately, so `C_n(φ, U_k)` is the box
/// `p^α Z_p × p^β Z_p × p^γ Z_p` and its index in `U_k` is `p^{(α−k)+(β−k)+(γ−k)}`.
pub fn entropy_oracle_diagonal(
    phi: &DiagonalEndo,
    p: Prime,
    k: i64,
    window: usize,
    cap: usize,
) -> Result<(EntropyValue, LimitDiagnostics)> {
    if !heisenberg_base_is_subgroup(k) {
        return Err(Error::Invalid(format!("H(p^{k} Z_p) is not a subgroup")));
    }
    let multipliers = [phi.s.clone(), phi.t.clone(), &phi.s * &phi.t];
    // j = 0 only asks for membership in U_k itself
    let mut powers = multipliers.to_vec();
    let mut levels = [k; 3];
    let (limit, diag) = run_limit(window, cap, || {
        for ((level, power), m) in levels.iter_mut().zip(powers.iter_mut()).zip(&multipliers) {
            // constraint m^j·x ∈ p^k Z_p, i.e. v(x) ≥ k − v(m^j)
            if !power.is_zero() {
                *level = (*level).max(k - vp_finite(power, p));
            }
            *power = &*power * m;
        }
        Ok(levels.iter().map(|l| l - k).sum())
    })?;
    Ok((EntropyValue::log_p(p, limit), diag))
}

pub fn entropy_inner(iota: &InnerAuto, p: Prime) -> Result<EntropyValue> {
    yuzvinski_entropy(&iota.coordinate_matrix(), p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub endo: DiagonalEndo,
    /// `None` for non-invertible maps, which only get the oracle value.
    pub formula: Option<EntropyValue>,
    pub oracle: EntropyValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeisenbergClassification {
    pub ring: Ring,
    pub p: Prime,
    pub classification: Classification,
    pub evidence: Vec<Evidence>,
    /// A map of positive entropy, when the class is not `E0`.
    pub witness: Option<Evidence>,
    pub evidence_consistent: bool,
}

fn gather_evidence(phi: &DiagonalEndo, p: Prime, window: usize, cap: usize) -> Result<Evidence> {
    let formula = if phi.is_automorphism() {
        Some(entropy_diagonal(phi, p)?.total)
    } else {
        None
    };
    let (oracle, _) = entropy_oracle_diagonal(phi, p, 0, window, cap)?;
    Ok(Evidence {
        endo: phi.clone(),
        formula,
        oracle,
    })
}

/// `H(Z_p)` is `E0` and `H(Q_p)` is in `E<inf` but not `E0`; the sample is run
/// through both entropy routes as supporting evidence.
///
/// For `Zp` every sampled map must preserve `H(Z_p)`.
pub fn classify_heisenberg(
    ring: Ring,
    p: Prime,
    sample: &[DiagonalEndo],
    window: usize,
    cap: usize,
) -> Result<HeisenbergClassification> {
    if ring == Ring::Zp {
        if let Some(bad) = sample.iter().find(|phi| !phi.is_integral(p)) {
            return Err(Error::Invalid(format!(
                "s = {}, t = {} does not map H(Z_{p}) into itself",
                bad.s, bad.t
            )));
        }
    }
    let evidence = sample
        .iter()
        .map(|phi| gather_evidence(phi, p, window, cap))
        .collect::<Result<Vec<_>>>()?;
    let agree = |e: &Evidence| e.formula.as_ref().is_none_or(|f| *f == e.oracle);
    let (classification, witness) = match ring {
        Ring::Zp => (Classification::E0, None),
        Ring::Qp => {
            let w = gather_evidence(&DiagonalEndo::new(p.pow(-1), Q::one()), p, window, cap)?;
            (Classification::EFiniteNotE0, Some(w))
        }
    };
    let evidence_consistent = evidence.iter().chain(&witness).all(agree)
        && match ring {
            Ring::Zp => evidence.iter().all(|e| e.oracle.is_zero()),
            Ring::Qp => witness.as_ref().is_some_and(|w| !w.oracle.is_zero()),
        };
    Ok(HeisenbergClassification {
        ring,
        p,
        classification,
        evidence,
        witness,
        evidence_consistent,
    })
}

/// Diagonal maps with `s, t ∈ {0, ±1, ±p^i·u}` for small `i`, `u` a unit;
/// for `Zp` only the integral ones.
pub fn default_sample(ring: Ring, p: Prime) -> Vec<DiagonalEndo> {
    let unit = Q::from_integer((p.get() as i64 + 1).into());
    let mut values = vec![Q::zero(), Q::one(), -Q::one()];
    for i in -2..=2 {
        values.push(p.pow(i) * &unit);
    }
    values.retain(|v| ring == Ring::Qp || is_p_integral(v, p));
    let mut out = Vec::new();
    for s in &values {
        for t in &values {
            out.push(DiagonalEndo::new(s.clone(), t.clone()));
        }
    }
    out
}
