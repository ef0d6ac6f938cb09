//! Set maps between finite spaces, addressed by point index.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::FiniteMetricSpace;

#[derive(Serialize, Deserialize)]
struct PairsWire {
    pairs: Vec<(usize, usize)>,
}

/// A total map `0..n → 0..m`, stored as the image of each source index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TotalMap {
    images: Vec<usize>,
}

impl TotalMap {
    pub fn new(images: Vec<usize>) -> Self {
        TotalMap { images }
    }

    pub fn identity(n: usize) -> Self {
        TotalMap::new((0..n).collect())
    }

    pub fn constant(n: usize, value: usize) -> Self {
        TotalMap::new(vec![value; n])
    }

    /// Builds a total map from `(source, target)` pairs covering `0..source_len` exactly once.
    pub fn from_pairs(pairs: &[(usize, usize)], source_len: usize) -> Result<Self> {
        let mut images = vec![None; source_len];
        for &(s, t) in pairs {
            let slot = images
                .get_mut(s)
                .ok_or_else(|| Error::structural(format!("map source index {s} out of range")))?;
            if slot.replace(t).is_some() {
                return Err(Error::structural(format!("map assigns source {s} twice")));
            }
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(s, t)| t.ok_or_else(|| Error::structural(format!("map is undefined at {s}"))))
            .collect::<Result<_>>()?;
        Ok(TotalMap { images })
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.images.iter().copied().enumerate().collect()
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Errors unless every image index is below `target_len`.
    pub fn check_target(&self, target_len: usize) -> Result<()> {
        match self.images.iter().position(|&t| t >= target_len) {
            Some(s) => Err(Error::structural(format!(
                "map sends {s} to {}, but the target has {target_len} points",
                self.images[s]
            ))),
            None => Ok(()),
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &TotalMap) -> TotalMap {
        TotalMap::new(self.images.iter().map(|&i| other.apply(i)).collect())
    }

    pub fn image(&self) -> BTreeSet<usize> {
        self.images.iter().copied().collect()
    }

    pub fn is_surjective_onto(&self, target_len: usize) -> bool {
        self.image().len() == target_len
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.images.len()
    }

    /// Point-inverses keyed by target index (only nonempty ones).
    pub fn fibers(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (s, &t) in self.images.iter().enumerate() {
            out.entry(t).or_default().push(s);
        }
        out
    }

    /// Sup distance `max_x d(f(x), g(x))` between two maps into `target`.
    pub fn sup_distance(&self, other: &TotalMap, target: &FiniteMetricSpace) -> Scalar {
        assert_eq!(self.len(), other.len(), "maps have different sources");
        self.images
            .iter()
            .zip(&other.images)
            .map(|(&a, &b)| target.d(a, b).clone())
            .max()
            .unwrap_or_else(Scalar::zero)
    }
}

impl Serialize for TotalMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PairsWire { pairs: self.pairs() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TotalMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = PairsWire::deserialize(d)?;
        let n = wire.pairs.len();
        TotalMap::from_pairs(&wire.pairs, n).map_err(serde::de::Error::custom)
    }
}

/// A map defined on a subset of the source (the `f: A → Y` of an adjunction).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PartialMap {
    assignment: BTreeMap<usize, usize>,
}

impl PartialMap {
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let mut assignment = BTreeMap::new();
        for &(s, t) in pairs {
            if assignment.insert(s, t).is_some() {
                return Err(Error::structural(format!("map assigns source {s} twice")));
            }
        }
        Ok(PartialMap { assignment })
    }

    pub fn domain(&self) -> Vec<usize> {
        self.assignment.keys().copied().collect()
    }

    pub fn get(&self, s: usize) -> Option<usize> {
        self.assignment.get(&s).copied()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.assignment.iter().map(|(&s, &t)| (s, t)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    /// Validates indices against the source and target sizes.
    pub fn check_bounds(&self, source_len: usize, target_len: usize) -> Result<()> {
        for (&s, &t) in &self.assignment {
            if s >= source_len || t >= target_len {
                return Err(Error::structural(format!(
                    "partial map pair ({s}, {t}) out of range"
                )));
            }
        }
        Ok(())
    }
}

impl Serialize for PartialMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PairsWire { pairs: self.pairs() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = PairsWire::deserialize(d)?;
        PartialMap::from_pairs(&wire.pairs).map_err(serde::de::Error::custom)
    }
}
