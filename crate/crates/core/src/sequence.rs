//! Rational sequences with finite support and a constant tail.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A sequence `ℕ → ℚ` equal to `tail` outside a finite set of indices.
///
/// Stored canonically: no support entry equals the tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "SequenceWire")]
pub struct SequencePoint {
    support: BTreeMap<u64, Scalar>,
    #[serde(default)]
    tail: Scalar,
}

#[derive(Deserialize)]
struct SequenceWire {
    support: BTreeMap<u64, Scalar>,
    #[serde(default)]
    tail: Scalar,
}

impl From<SequenceWire> for SequencePoint {
    fn from(w: SequenceWire) -> Self {
        SequencePoint::new(w.support, w.tail)
    }
}

impl SequencePoint {
    pub fn new(support: BTreeMap<u64, Scalar>, tail: Scalar) -> Self {
        let support = support.into_iter().filter(|(_, v)| *v != tail).collect();
        SequencePoint { support, tail }
    }

    pub fn zero() -> Self {
        SequencePoint::constant(Scalar::zero())
    }

    pub fn constant(c: Scalar) -> Self {
        SequencePoint {
            support: BTreeMap::new(),
            tail: c,
        }
    }

    /// The sequence `(c_0, c_1, ..., c_{k-1}, 0, 0, ...)`.
    pub fn from_prefix(coords: &[Scalar]) -> Self {
        let support = coords
            .iter()
            .enumerate()
            .map(|(i, c)| (i as u64, c.clone()))
            .collect();
        SequencePoint::new(support, Scalar::zero())
    }

    pub fn support(&self) -> &BTreeMap<u64, Scalar> {
        &self.support
    }

    pub fn tail(&self) -> &Scalar {
        &self.tail
    }

    pub fn get(&self, i: u64) -> &Scalar {
        self.support.get(&i).unwrap_or(&self.tail)
    }

    pub fn with(mut self, i: u64, value: Scalar) -> Self {
        if value == self.tail {
            self.support.remove(&i);
        } else {
            self.support.insert(i, value);
        }
        self
    }

    /// Applies `f` to every coordinate, tail included.
    pub fn map_coords<F: Fn(&Scalar) -> Scalar>(&self, f: F) -> SequencePoint {
        let support = self.support.iter().map(|(&i, v)| (i, f(v))).collect();
        SequencePoint::new(support, f(&self.tail))
    }

    /// Indices where either sequence may differ from its tail.
    fn joint_support<'a>(&'a self, other: &'a SequencePoint) -> impl Iterator<Item = u64> + 'a {
        let mut keys: Vec<u64> = self.support.keys().chain(other.support.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
    }

    /// Sup-norm distance. The tails contribute because they repeat infinitely often.
    pub fn sup_distance(&self, other: &SequencePoint) -> Scalar {
        let mut best = (&self.tail - &other.tail).abs();
        for i in self.joint_support(other) {
            let d = (self.get(i) - other.get(i)).abs();
            if d > best {
                best = d;
            }
        }
        best
    }

    /// Largest absolute coordinate.
    pub fn sup_norm(&self) -> Scalar {
        self.support
            .values()
            .map(Scalar::abs)
            .fold(self.tail.abs(), Scalar::max)
    }

    pub fn all_coords<F: Fn(&Scalar) -> bool>(&self, pred: F) -> bool {
        pred(&self.tail) && self.support.values().all(pred)
    }
}

/// Retraction of `[0,1]`-valued sequences onto those vanishing at infinity.
///
/// The distance to that subspace is the limsup, which is the tail here;
/// coordinates below it become 0 and the rest drop by it.
pub fn q0_retract(x: &SequencePoint) -> Result<SequencePoint> {
    require_unit_range(x, "q0 retraction")?;
    let c = x.tail().clone();
    Ok(x.map_coords(|v| if *v < c { Scalar::zero() } else { v - &c }))
}

/// `H_t(u) = max{0, 1 − (1 − u)(1 + t)}` on `[0, 1]`.
pub fn contraction_step(u: &Scalar, t: &Scalar) -> Scalar {
    let one = Scalar::one();
    (&one - (&one - u) * (&one + t)).max(Scalar::zero())
}

/// Coordinatewise `H_t`: the identity at `t = 0`, fixes 0 and 1, and at
/// `t = 1` sends `[0, 1/2]` to 0.
pub fn tail_contraction(x: &SequencePoint, t: &Scalar) -> Result<SequencePoint> {
    require_unit_range(x, "tail contraction")?;
    require_unit_parameter(t)?;
    Ok(x.map_coords(|v| contraction_step(v, t)))
}

pub(crate) fn require_unit_parameter(t: &Scalar) -> Result<()> {
    if t.is_negative() || *t > Scalar::one() {
        return Err(Error::precondition(format!("homotopy parameter {t} is outside [0, 1]")));
    }
    Ok(())
}

fn require_unit_range(x: &SequencePoint, what: &str) -> Result<()> {
    if !x.all_coords(|v| !v.is_negative() && *v <= Scalar::one()) {
        return Err(Error::precondition(format!("{what} needs coordinates in [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn canonical_form_drops_tail_entries() {
        let mut s = BTreeMap::new();
        s.insert(0, q(1, 2));
        s.insert(3, q(1, 2));
        let p = SequencePoint::new(s, q(1, 2));
        assert!(p.support().is_empty());
        assert_eq!(p, SequencePoint::constant(q(1, 2)));
    }

    #[test]
    fn distance_sees_tails() {
        let a = SequencePoint::from_prefix(&[q(1, 1)]);
        let b = SequencePoint::constant(q(1, 4));
        assert_eq!(a.sup_distance(&b), q(3, 4));
        assert_eq!(b.sup_distance(&SequencePoint::zero()), q(1, 4));
        assert_eq!(a.sup_distance(&a), Scalar::zero());
    }

    #[test]
    fn json_shape() {
        let p = SequencePoint::zero().with(2, q(1, 3));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"support":{"2":"1/3"},"tail":"0"}"#);
        let back: SequencePoint = serde_json::from_str(r#"{"support":{"2":"1/3","5":"0"}}"#).unwrap();
        assert_eq!(back, p);
    }

    fn point(entries: &[(u64, Scalar)], tail: Scalar) -> SequencePoint {
        SequencePoint::new(entries.iter().cloned().collect(), tail)
    }

    #[test]
    fn q0_retraction_examples() {
        let x = SequencePoint::from_prefix(&[q(1, 3), q(1, 1)]);
        assert_eq!(q0_retract(&x).unwrap(), x);
        assert_eq!(q0_retract(&SequencePoint::constant(q(2, 5))).unwrap(), SequencePoint::zero());
        let y = point(&[(0, q(1, 1))], q(1, 2));
        assert_eq!(q0_retract(&y).unwrap(), point(&[(0, q(1, 2))], q(0, 1)));
        let z = point(&[(0, q(1, 4)), (5, q(3, 4))], q(1, 2));
        let r = q0_retract(&z).unwrap();
        assert_eq!(r, point(&[(5, q(1, 4))], q(0, 1)));
        assert_eq!(q0_retract(&r).unwrap(), r);
        assert!(q0_retract(&SequencePoint::constant(q(3, 2))).is_err());
    }

    #[test]
    fn contraction_examples() {
        let x = SequencePoint::from_prefix(&[q(1, 2), q(3, 4), q(1, 1), q(1, 5)]);
        assert_eq!(tail_contraction(&x, &q(0, 1)).unwrap(), x);
        let y = tail_contraction(&x, &q(1, 1)).unwrap();
        assert_eq!(y, SequencePoint::from_prefix(&[q(0, 1), q(1, 2), q(1, 1), q(0, 1)]));
        assert!(tail_contraction(&x, &q(3, 2)).is_err());
        assert!(tail_contraction(&SequencePoint::from_prefix(&[q(-1, 2)]), &q(0, 1)).is_err());
    }
}
