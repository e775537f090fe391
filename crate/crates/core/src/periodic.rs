//! Periodic groups with finitely many nonzero p-components.
//!
//! Homomorphisms between components at different primes are trivial, so an
//! endomorphism is just one block endomorphism per prime.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{BlockEndomorphism, Classification, FiniteRankPGroup};
use crate::matrix::RationalMatrix;
use crate::padic::{EntropyValue, Prime};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PeriodicGroup {
    components: BTreeMap<Prime, FiniteRankPGroup>,
}

impl PeriodicGroup {
    pub fn new(components: impl IntoIterator<Item = FiniteRankPGroup>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for g in components {
            let p = g.p;
            if map.insert(p, g).is_some() {
                return Err(Error::Invalid(format!("two components at the prime {p}")));
            }
        }
        Ok(PeriodicGroup { components: map })
    }

    pub fn from_map(components: BTreeMap<Prime, FiniteRankPGroup>) -> Result<Self> {
        for (key, g) in &components {
            if *key != g.p {
                return Err(Error::PrimeMismatch(key.get(), g.p.get()));
            }
        }
        Ok(PeriodicGroup { components })
    }

    pub fn component(&self, p: Prime) -> Option<&FiniteRankPGroup> {
        self.components.get(&p)
    }

    pub fn components(&self) -> &BTreeMap<Prime, FiniteRankPGroup> {
        &self.components
    }

    pub fn primes(&self) -> impl Iterator<Item = Prime> + '_ {
        self.components.keys().copied()
    }

    /// `E0` iff every component is; finite support keeps everything in `E<inf`.
    pub fn classify(&self) -> Classification {
        if self.components.values().all(|g| g.classify() == Classification::E0) {
            Classification::E0
        } else {
            Classification::EFiniteNotE0
        }
    }
}

impl<'de> Deserialize<'de> for PeriodicGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            components: BTreeMap<Prime, FiniteRankPGroup>,
        }
        let raw = Raw::deserialize(d)?;
        PeriodicGroup::from_map(raw.components).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicEndomorphism {
    group: PeriodicGroup,
    components: BTreeMap<Prime, BlockEndomorphism>,
}

impl PeriodicEndomorphism {
    /// Primes of `group` missing from `endos` get the zero endomorphism.
    pub fn new(group: PeriodicGroup, mut endos: BTreeMap<Prime, BlockEndomorphism>) -> Result<Self> {
        if let Some(p) = endos.keys().find(|p| group.component(**p).is_none()) {
            return Err(Error::Invalid(format!("endomorphism given at {p}, which is not in the support")));
        }
        for (p, g) in &group.components {
            match endos.get(p) {
                Some(phi) if phi.group() != g => {
                    return Err(Error::Dimension(format!("component endomorphism at {p} acts on {}, expected {g}", phi.group())))
                }
                Some(_) => {}
                None => {
                    endos.insert(*p, BlockEndomorphism::zero(g.clone()));
                }
            }
        }
        Ok(PeriodicEndomorphism { group, components: endos })
    }

    pub fn identity(group: PeriodicGroup) -> Self {
        let components = group
            .components
            .iter()
            .map(|(p, g)| (*p, BlockEndomorphism::identity(g.clone())))
            .collect();
        PeriodicEndomorphism { group, components }
    }

    pub fn group(&self) -> &PeriodicGroup {
        &self.group
    }

    pub fn restrict(&self, p: Prime) -> Option<&BlockEndomorphism> {
        self.components.get(&p)
    }

    pub fn validate(&self) -> Result<()> {
        self.components.values().try_for_each(BlockEndomorphism::validate)
    }

    pub fn component_entropies(&self) -> Result<BTreeMap<Prime, EntropyValue>> {
        self.components.iter().map(|(p, phi)| Ok((*p, phi.entropy()?))).collect()
    }

    /// Sum of the entropies of the restrictions to the p-components.
    pub fn entropy(&self) -> Result<EntropyValue> {
        Ok(self.component_entropies()?.into_values().sum())
    }

    /// `self ∘ other`, prime by prime.
    pub fn compose(&self, other: &PeriodicEndomorphism) -> Result<PeriodicEndomorphism> {
        if self.group != other.group {
            return Err(Error::Dimension("endomorphisms of different periodic groups".into()));
        }
        let components = self
            .components
            .iter()
            .map(|(p, phi)| Ok((*p, phi.compose(&other.components[p])?)))
            .collect::<Result<_>>()?;
        Ok(PeriodicEndomorphism { group: self.group.clone(), components })
    }
}

impl Serialize for PeriodicEndomorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PeriodicDocument {
            components: self.group.components.clone(),
            endo: self.components.iter().map(|(p, phi)| (*p, phi.block_map())).collect(),
        }
        .serialize(s)
    }
}

/// JSON shape `{"components": {"2": <group>}, "endo": {"2": {"qp<-qp": ...}}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicDocument {
    pub components: BTreeMap<Prime, FiniteRankPGroup>,
    #[serde(default)]
    pub endo: BTreeMap<Prime, BTreeMap<String, RationalMatrix>>,
}

impl PeriodicDocument {
    pub fn into_endomorphism(self) -> Result<PeriodicEndomorphism> {
        let group = PeriodicGroup::from_map(self.components)?;
        let mut endos = BTreeMap::new();
        for (p, blocks) in self.endo {
            let g = group
                .component(p)
                .ok_or_else(|| Error::Invalid(format!("endomorphism given at {p}, which is not in the support")))?;
            endos.insert(p, BlockEndomorphism::from_block_map(g.clone(), blocks)?);
        }
        PeriodicEndomorphism::new(group, endos)
    }
}
