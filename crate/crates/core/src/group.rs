//! Locally compact abelian p-groups of finite rank,
//! `G = Z_p^{n1} × Q_p^{n2} × Z(p^∞)^{n3} × F` with `F = ⊕ Z(p^{k_i})`,
//! and their continuous endomorphisms as block matrices.
//!
//! An endomorphism is stored as one square rational matrix over the
//! concatenated coordinates `(Z_p, Q_p, Prüfer, finite)`. Blocks are read as:
//!
//! | target ← source      | entry                                              |
//! |----------------------|----------------------------------------------------|
//! | Z_p ← Z_p            | p-integral rational                                |
//! | Q_p ← Z_p, Q_p ← Q_p | any rational                                       |
//! | Prüfer ← Z_p         | image of 1, taken modulo `Z_(p)`                   |
//! | Prüfer ← Q_p         | `c` with `x ↦ c·x mod Z_(p)`                       |
//! | Prüfer ← Prüfer      | p-integral rational (an element of `Z_p`)          |
//! | Prüfer ← finite      | image of the generator, order dividing its source  |
//! | finite ← Z_p         | image of 1, a residue mod `p^{k_j}`                |
//! | finite ← finite      | residue mod `p^{k_j}`, divisible by `p^{k_j−k_i}`  |
//!
//! The remaining seven blocks are forced to vanish.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::newton::yuzvinski_entropy;
use crate::padic::{is_p_integral, reduce_mod_p_power, residue_of_integral, vp, EntropyValue, ExtendedValuation, Prime, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Zp,
    Qp,
    Pruefer,
    Finite,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::Zp, Component::Qp, Component::Pruefer, Component::Finite];

    pub fn name(self) -> &'static str {
        match self {
            Component::Zp => "zp",
            Component::Qp => "qp",
            Component::Pruefer => "pruefer",
            Component::Finite => "finite",
        }
    }

    /// Why no nonzero continuous homomorphism `source → self` exists, if so.
    pub fn forced_zero_from(self, source: Component) -> Option<&'static str> {
        use Component::*;
        match (self, source) {
            (Zp, Qp) => Some("no nonzero continuous hom Q_p -> Z_p: the image would be a divisible subgroup of Z_p"),
            (Zp, Pruefer) => Some("no nonzero hom Z(p^inf) -> Z_p: torsion into torsion-free"),
            (Zp, Finite) => Some("no nonzero hom from a finite group into torsion-free Z_p"),
            (Qp, Pruefer) => Some("no nonzero hom Z(p^inf) -> Q_p: torsion into torsion-free"),
            (Qp, Finite) => Some("no nonzero hom from a finite group into torsion-free Q_p"),
            (Finite, Qp) => Some("no nonzero continuous hom Q_p -> finite group: divisible image is trivial"),
            (Finite, Pruefer) => Some("no nonzero hom Z(p^inf) -> finite group: divisible image is trivial"),
            _ => None,
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zp" => Ok(Component::Zp),
            "qp" => Ok(Component::Qp),
            "pruefer" | "prufer" | "prüfer" => Ok(Component::Pruefer),
            "finite" | "f" => Ok(Component::Finite),
            other => Err(Error::Parse(format!("unknown group component {other:?}"))),
        }
    }
}

/// Entropy classes of a topological group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Every continuous endomorphism has zero entropy.
    E0,
    /// Every continuous endomorphism has finite entropy, and some has positive entropy.
    EFiniteNotE0,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::E0 => f.write_str("E0"),
            Classification::EFiniteNotE0 => f.write_str("E<inf \\ E0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteRankPGroup {
    pub p: Prime,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    /// Exponents `k_i` of the cyclic factors `Z(p^{k_i})`.
    pub torsion: Vec<u32>,
}

impl FiniteRankPGroup {
    pub fn new(p: Prime, n1: usize, n2: usize, n3: usize, torsion: Vec<u32>) -> Result<Self> {
        if torsion.contains(&0) {
            return Err(Error::Invalid("cyclic torsion factors need exponent ≥ 1".into()));
        }
        Ok(FiniteRankPGroup { p, n1, n2, n3, torsion })
    }

    pub fn zp(p: Prime, n: usize) -> Self {
        FiniteRankPGroup { p, n1: n, n2: 0, n3: 0, torsion: vec![] }
    }

    pub fn qp(p: Prime, n: usize) -> Self {
        FiniteRankPGroup { p, n1: 0, n2: n, n3: 0, torsion: vec![] }
    }

    pub fn pruefer(p: Prime, n: usize) -> Self {
        FiniteRankPGroup { p, n1: 0, n2: 0, n3: n, torsion: vec![] }
    }

    pub fn n4(&self) -> usize {
        self.torsion.len()
    }

    pub fn component_dim(&self, c: Component) -> usize {
        match c {
            Component::Zp => self.n1,
            Component::Qp => self.n2,
            Component::Pruefer => self.n3,
            Component::Finite => self.n4(),
        }
    }

    pub fn offset(&self, c: Component) -> usize {
        match c {
            Component::Zp => 0,
            Component::Qp => self.n1,
            Component::Pruefer => self.n1 + self.n2,
            Component::Finite => self.n1 + self.n2 + self.n3,
        }
    }

    /// Total number of coordinates, which is also `rank_p`.
    pub fn total_dim(&self) -> usize {
        self.n1 + self.n2 + self.n3 + self.n4()
    }

    pub fn rank_p(&self) -> usize {
        self.total_dim()
    }

    /// Pontryagin dual: `Z_p` and `Z(p^∞)` swap, `Q_p` and `F` are self-dual.
    pub fn dual_group(&self) -> FiniteRankPGroup {
        FiniteRankPGroup {
            p: self.p,
            n1: self.n3,
            n2: self.n2,
            n3: self.n1,
            torsion: self.torsion.clone(),
        }
    }

    /// `E0` exactly when there is no `Q_p` factor; always of finite entropy.
    pub fn classify(&self) -> Classification {
        if self.n2 == 0 {
            Classification::E0
        } else {
            Classification::EFiniteNotE0
        }
    }
}

impl fmt::Display for FiniteRankPGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        let mut parts = Vec::new();
        for (n, name) in [(self.n1, format!("Z_{p}")), (self.n2, format!("Q_{p}")), (self.n3, format!("Z({p}^inf)"))] {
            match n {
                0 => {}
                1 => parts.push(name),
                _ => parts.push(format!("{name}^{n}")),
            }
        }
        for k in &self.torsion {
            parts.push(format!("Z({p}^{k})"));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" x "))
    }
}

impl<'de> Deserialize<'de> for FiniteRankPGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            p: Prime,
            #[serde(default)]
            n1: usize,
            #[serde(default)]
            n2: usize,
            #[serde(default)]
            n3: usize,
            #[serde(default)]
            torsion: Vec<u32>,
        }
        let r = Raw::deserialize(d)?;
        FiniteRankPGroup::new(r.p, r.n1, r.n2, r.n3, r.torsion).map_err(serde::de::Error::custom)
    }
}

/// One failed constraint of a block endomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub target: Component,
    pub source: Component,
    pub row: usize,
    pub col: usize,
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "block {}<-{} entry ({}, {}): {}",
            self.target, self.source, self.row, self.col, self.constraint
        )
    }
}

/// An element of a finite-rank p-group in concrete coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixedElement {
    #[serde(with = "serde_rational_vec")]
    pub zp: Vec<Q>,
    #[serde(with = "serde_rational_vec")]
    pub qp: Vec<Q>,
    /// Canonical representatives in `[0, 1)` with p-power denominators.
    #[serde(with = "serde_rational_vec")]
    pub pruefer: Vec<Q>,
    /// Residues in `[0, p^{k_i})`.
    pub finite: Vec<String>,
    #[serde(skip)]
    finite_values: Vec<BigInt>,
}

mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(crate::padic::format_rational).collect();
        strs.serialize(s)
    }
}

impl MixedElement {
    /// Normalizes the torsion coordinates; rejects non-integral `Z_p` coordinates.
    pub fn new(group: &FiniteRankPGroup, zp: Vec<Q>, qp: Vec<Q>, pruefer: Vec<Q>, finite: Vec<Q>) -> Result<Self> {
        if zp.len() != group.n1 || qp.len() != group.n2 || pruefer.len() != group.n3 || finite.len() != group.n4() {
            return Err(Error::Dimension(format!("element does not fit {group}")));
        }
        let p = group.p;
        if let Some(bad) = zp.iter().find(|x| !is_p_integral(x, p)) {
            return Err(Error::Invalid(format!("Z_{p} coordinate {bad} is not {p}-integral")));
        }
        let pruefer = pruefer.iter().map(|x| reduce_mod_p_power(x, p, 0)).collect();
        let finite_values = finite
            .iter()
            .zip(&group.torsion)
            .map(|(x, &k)| crate::padic::residue_mod(x, p, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(MixedElement {
            zp,
            qp,
            pruefer,
            finite: finite_values.iter().map(|v| v.to_string()).collect(),
            finite_values,
        })
    }

    pub fn zero(group: &FiniteRankPGroup) -> Self {
        let z = |n| vec![Q::zero(); n];
        Self::new(group, z(group.n1), z(group.n2), z(group.n3), z(group.n4())).expect("zero element")
    }

    pub fn finite_residues(&self) -> &[BigInt] {
        &self.finite_values
    }

    fn coordinates(&self) -> Vec<Q> {
        let mut v = Vec::new();
        v.extend(self.zp.iter().cloned());
        v.extend(self.qp.iter().cloned());
        v.extend(self.pruefer.iter().cloned());
        v.extend(self.finite_values.iter().map(|r| Q::from_integer(r.clone())));
        v
    }

    fn from_coordinates(group: &FiniteRankPGroup, v: Vec<Q>) -> Result<Self> {
        let split = |c: Component| v[group.offset(c)..group.offset(c) + group.component_dim(c)].to_vec();
        MixedElement::new(
            group,
            split(Component::Zp),
            split(Component::Qp),
            split(Component::Pruefer),
            split(Component::Finite),
        )
    }

    pub fn add(&self, other: &MixedElement, group: &FiniteRankPGroup) -> Result<MixedElement> {
        let v = self
            .coordinates()
            .iter()
            .zip(other.coordinates())
            .map(|(a, b)| a + b)
            .collect();
        MixedElement::from_coordinates(group, v)
    }
}

/// A continuous endomorphism of a [`FiniteRankPGroup`] in block form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockEndomorphism {
    group: FiniteRankPGroup,
    matrix: RationalMatrix,
}

impl BlockEndomorphism {
    pub fn zero(group: FiniteRankPGroup) -> Self {
        let n = group.total_dim();
        BlockEndomorphism { group, matrix: RationalMatrix::zeros(n, n) }
    }

    pub fn identity(group: FiniteRankPGroup) -> Self {
        let n = group.total_dim();
        BlockEndomorphism { group, matrix: RationalMatrix::identity(n) }
    }

    /// Assembles the blocks; omitted blocks are zero. Entries are brought to
    /// canonical residues but constraints are only checked by [`Self::validate`].
    pub fn from_blocks(
        group: FiniteRankPGroup,
        blocks: impl IntoIterator<Item = ((Component, Component), RationalMatrix)>,
    ) -> Result<Self> {
        let mut out = Self::zero(group);
        for ((target, source), m) in blocks {
            out.set_block(target, source, &m)?;
        }
        out.normalize();
        Ok(out)
    }

    /// Wraps a full square matrix over the concatenated coordinates.
    pub fn from_matrix(group: FiniteRankPGroup, matrix: RationalMatrix) -> Result<Self> {
        let n = group.total_dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Dimension(format!("{n}x{n} matrix needed for {group}")));
        }
        let mut out = BlockEndomorphism { group, matrix };
        out.normalize();
        Ok(out)
    }

    pub fn group(&self) -> &FiniteRankPGroup {
        &self.group
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    fn set_block(&mut self, target: Component, source: Component, m: &RationalMatrix) -> Result<()> {
        let (r, c) = (self.group.component_dim(target), self.group.component_dim(source));
        if m.rows() != r || m.cols() != c {
            return Err(Error::Dimension(format!(
                "block {target}<-{source} must be {r}x{c}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        self.matrix.set_block(self.group.offset(target), self.group.offset(source), m);
        Ok(())
    }

    pub fn block(&self, target: Component, source: Component) -> RationalMatrix {
        self.matrix.block(
            self.group.offset(target),
            self.group.offset(source),
            self.group.component_dim(target),
            self.group.component_dim(source),
        )
    }

    /// Canonical residues for the blocks that are only defined modulo something.
    fn normalize(&mut self) {
        let g = &self.group;
        let p = g.p;
        for source in [Component::Zp, Component::Finite] {
            for i in 0..g.n3 {
                for j in 0..g.component_dim(source) {
                    let (r, c) = (g.offset(Component::Pruefer) + i, g.offset(source) + j);
                    self.matrix[(r, c)] = reduce_mod_p_power(&self.matrix[(r, c)], p, 0);
                }
            }
        }
        for (jrow, &k) in g.torsion.iter().enumerate() {
            let r = g.offset(Component::Finite) + jrow;
            let modulus = p.to_bigint().pow(k);
            for source in [Component::Zp, Component::Finite] {
                for j in 0..g.component_dim(source) {
                    let c = g.offset(source) + j;
                    let x = &self.matrix[(r, c)];
                    if is_p_integral(x, p) {
                        self.matrix[(r, c)] = Q::from_integer(residue_of_integral(x, &modulus));
                    }
                }
            }
        }
    }

    /// Checks every forced-zero, integrality and order constraint.
    pub fn violations(&self) -> Vec<Violation> {
        let g = &self.group;
        let p = g.p;
        let mut out = Vec::new();
        let mut report = |t: Component, s: Component, i: usize, j: usize, why: String| {
            out.push(Violation { target: t, source: s, row: i, col: j, constraint: why });
        };
        for t in Component::ALL {
            for s in Component::ALL {
                let b = self.block(t, s);
                for i in 0..b.rows() {
                    for j in 0..b.cols() {
                        let x = &b[(i, j)];
                        if let Some(why) = t.forced_zero_from(s) {
                            if !x.is_zero() {
                                report(t, s, i, j, why.to_string());
                            }
                            continue;
                        }
                        match (t, s) {
                            (Component::Zp, Component::Zp) if !is_p_integral(x, p) => {
                                report(t, s, i, j, format!("{x} is not {p}-integral; End(Z_p) = Z_p"))
                            }
                            (Component::Pruefer, Component::Pruefer) if !is_p_integral(x, p) => {
                                report(t, s, i, j, format!("{x} is not {p}-integral; End(Z(p^inf)) = Z_p"))
                            }
                            (Component::Pruefer, Component::Finite) => {
                                let k = g.torsion[j] as i64;
                                if vp(x, p) < ExtendedValuation::Finite(-k) {
                                    report(t, s, i, j, format!("image {x} of a generator of order {p}^{k} has larger order"));
                                }
                            }
                            (Component::Finite, Component::Zp) if !is_p_integral(x, p) => {
                                report(t, s, i, j, format!("{x} is not a residue modulo {p}^{}", g.torsion[i]))
                            }
                            (Component::Finite, Component::Finite) => {
                                let (ki, kj) = (g.torsion[j] as i64, g.torsion[i] as i64);
                                let needed = (kj - ki).max(0);
                                let v = vp(x, p).min(ExtendedValuation::Finite(kj));
                                if !is_p_integral(x, p) {
                                    report(t, s, i, j, format!("{x} is not a residue modulo {p}^{kj}"));
                                } else if v < ExtendedValuation::Finite(needed) {
                                    report(t, s, i, j, format!(
                                        "hom Z({p}^{ki}) -> Z({p}^{kj}) needs the image of 1 divisible by {p}^{needed}"
                                    ));
                                }
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidEndomorphism(v))
        }
    }

    fn check_same_group(&self, other: &BlockEndomorphism) -> Result<()> {
        if self.group != other.group {
            return Err(Error::Dimension(format!(
                "endomorphisms of different groups ({} vs {})",
                self.group, other.group
            )));
        }
        Ok(())
    }

    pub fn apply(&self, x: &MixedElement) -> Result<MixedElement> {
        let coords = x.coordinates();
        if coords.len() != self.group.total_dim() {
            return Err(Error::Dimension("element does not belong to the group".into()));
        }
        MixedElement::from_coordinates(&self.group, self.matrix.mul_vec(&coords))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &BlockEndomorphism) -> Result<BlockEndomorphism> {
        self.check_same_group(other)?;
        BlockEndomorphism::from_matrix(self.group.clone(), &self.matrix * &other.matrix)
    }

    /// The `Q_p ← Q_p` block: the induced map on the divisible part of the
    /// torsion-free quotient, which carries all of the entropy.
    pub fn reduce_to_divisible_quotient(&self) -> RationalMatrix {
        self.block(Component::Qp, Component::Qp)
    }

    /// `[[Z_p←Z_p, 0], [Q_p←Z_p, Q_p←Q_p]]` acting on `Q_p^{n1+n2}`.
    pub fn torsion_free_quotient(&self) -> RationalMatrix {
        let n = self.group.n1 + self.group.n2;
        self.matrix.block(0, 0, n, n)
    }

    pub fn entropy(&self) -> Result<EntropyValue> {
        self.validate()?;
        yuzvinski_entropy(&self.reduce_to_divisible_quotient(), self.group.p)
    }

    /// Nonzero blocks keyed as `"target<-source"`.
    pub fn block_map(&self) -> BTreeMap<String, RationalMatrix> {
        let mut out = BTreeMap::new();
        for t in Component::ALL {
            for s in Component::ALL {
                let b = self.block(t, s);
                if b.rows() > 0 && b.cols() > 0 && !b.is_zero() {
                    out.insert(format!("{t}<-{s}"), b);
                }
            }
        }
        out
    }

    pub fn from_block_map(group: FiniteRankPGroup, blocks: BTreeMap<String, RationalMatrix>) -> Result<Self> {
        let parsed = blocks
            .into_iter()
            .map(|(key, m)| {
                let (t, s) = key
                    .split_once("<-")
                    .ok_or_else(|| Error::Parse(format!("block key {key:?} must look like \"qp<-zp\"")))?;
                Ok(((t.parse()?, s.parse()?), m))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_blocks(group, parsed)
    }
}

impl Serialize for BlockEndomorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EndomorphismDocument {
            group: self.group.clone(),
            endo: self.block_map(),
        }
        .serialize(s)
    }
}

/// JSON shape `{"group": {...}, "endo": {"qp<-qp": [["1/3"]], ...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EndomorphismDocument {
    pub group: FiniteRankPGroup,
    #[serde(default)]
    pub endo: BTreeMap<String, RationalMatrix>,
}

impl EndomorphismDocument {
    pub fn into_endomorphism(self) -> Result<BlockEndomorphism> {
        BlockEndomorphism::from_block_map(self.group, self.endo)
    }
}

/// `φ(x, y) = (ξ1·x, ξ2·y + ξ3·x)` on `Z_p × Q_p`.
pub fn zp_qp_endomorphism(p: Prime, xi1: Q, xi2: Q, xi3: Q) -> Result<BlockEndomorphism> {
    let one = |x: Q| RationalMatrix::from_rows(vec![vec![x]]).expect("1x1");
    BlockEndomorphism::from_blocks(
        FiniteRankPGroup::new(p, 1, 1, 0, vec![])?,
        [
            ((Component::Zp, Component::Zp), one(xi1)),
            ((Component::Qp, Component::Qp), one(xi2)),
            ((Component::Qp, Component::Zp), one(xi3)),
        ],
    )
}
