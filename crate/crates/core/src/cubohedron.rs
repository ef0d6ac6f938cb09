//! Subcomplexes of the cubulation of finite sequences by cubes of edge
//! `2^-n`, and the lattice homotopy that retracts neighborhoods onto them.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sequence::{contraction_step, require_unit_parameter, SequencePoint};

/// Largest extent for which faces are enumerated (`3^k` faces).
pub const FACE_EXTENT_CAP: usize = 12;

/// `{x : x_i ∈ [b_i, b_i + h] for i ∈ extent, x_i = b_i otherwise}` with `h` the edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "CubeWire")]
pub struct Cube {
    pub base: BTreeMap<u64, Scalar>,
    pub extent: BTreeSet<u64>,
}

#[derive(Deserialize)]
struct CubeWire {
    #[serde(default)]
    base: BTreeMap<u64, Scalar>,
    #[serde(default)]
    extent: BTreeSet<u64>,
}

impl From<CubeWire> for Cube {
    fn from(w: CubeWire) -> Self {
        Cube::new(w.base, w.extent)
    }
}

impl Cube {
    pub fn new(base: BTreeMap<u64, Scalar>, extent: BTreeSet<u64>) -> Self {
        let base = base.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Cube { base, extent }
    }

    pub fn vertex(base: BTreeMap<u64, Scalar>) -> Self {
        Cube::new(base, BTreeSet::new())
    }

    pub fn dimension(&self) -> usize {
        self.extent.len()
    }

    fn base_at(&self, i: u64) -> Scalar {
        self.base.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    fn touched(&self, x: &SequencePoint) -> BTreeSet<u64> {
        self.base
            .keys()
            .chain(&self.extent)
            .chain(x.support().keys())
            .copied()
            .collect()
    }

    pub fn contains(&self, x: &SequencePoint, edge: &Scalar) -> bool {
        if !x.tail().is_zero() {
            return false;
        }
        self.touched(x).into_iter().all(|i| {
            let (v, b) = (x.get(i), self.base_at(i));
            if self.extent.contains(&i) {
                *v >= b && *v <= &b + edge
            } else {
                *v == b
            }
        })
    }

    /// Sup distance from `x` to the cube.
    pub fn distance(&self, x: &SequencePoint, edge: &Scalar) -> Scalar {
        let mut best = x.tail().abs();
        for i in self.touched(x) {
            let (v, b) = (x.get(i), self.base_at(i));
            let gap = if self.extent.contains(&i) {
                let top = &b + edge;
                if *v < b {
                    &b - v
                } else if *v > top {
                    v - &top
                } else {
                    Scalar::zero()
                }
            } else {
                (v - &b).abs()
            };
            best = best.max(gap);
        }
        best
    }

    /// All faces, the cube itself included.
    pub fn faces(&self, edge: &Scalar) -> Vec<Cube> {
        let mut out = vec![Cube { base: self.base.clone(), extent: BTreeSet::new() }];
        for &i in &self.extent {
            let mut next = Vec::with_capacity(out.len() * 3);
            for face in out {
                let mut spanning = face.clone();
                spanning.extent.insert(i);
                let mut top = face.clone();
                let raised = self.base_at(i) + edge;
                if raised.is_zero() {
                    top.base.remove(&i);
                } else {
                    top.base.insert(i, raised);
                }
                next.push(face);
                next.push(spanning);
                next.push(top);
            }
            out = next;
        }
        out
    }

    /// Whether `self` is a face of `other`.
    pub fn is_face_of(&self, other: &Cube, edge: &Scalar) -> bool {
        if !self.extent.is_subset(&other.extent) {
            return false;
        }
        let probe = SequencePoint::new(
            self.base.clone().into_iter().collect(),
            Scalar::zero(),
        );
        other.contains(&probe, edge)
            && self.extent.iter().all(|&i| self.base_at(i) == other.base_at(i))
    }
}

/// A finite subcomplex of the `2^-level` cubulation, given by generating
/// cubes; its cubes are all faces of those.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Cubohedron {
    pub level: u32,
    pub cubes: Vec<Cube>,
    #[serde(skip)]
    closure: OnceLock<BTreeSet<Cube>>,
}

impl PartialEq for Cubohedron {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.cubes == other.cubes
    }
}

impl Eq for Cubohedron {}

impl Cubohedron {
    pub fn new(level: u32, cubes: Vec<Cube>) -> Result<Self> {
        let k = Cubohedron { level, cubes, closure: OnceLock::new() };
        k.validate()?;
        Ok(k)
    }

    pub fn edge(&self) -> Scalar {
        Scalar::pow2_neg(self.level as i64)
    }

    /// Every base vertex must lie on the lattice.
    pub fn validate(&self) -> Result<()> {
        let edge = self.edge();
        for (k, cube) in self.cubes.iter().enumerate() {
            if let Some((i, v)) = cube.base.iter().find(|(_, v)| !(*v / &edge).is_integer()) {
                return Err(Error::structural(format!(
                    "cube {k} has coordinate {i} = {v}, off the lattice of edge {edge}"
                )));
            }
            if cube.extent.len() > FACE_EXTENT_CAP {
                return Err(Error::CapExceeded {
                    what: "cube dimension".into(),
                    size: cube.extent.len(),
                    cap: FACE_EXTENT_CAP,
                });
            }
        }
        Ok(())
    }

    /// All cubes of the complex, faces included.
    pub fn closure(&self) -> &BTreeSet<Cube> {
        self.closure.get_or_init(|| {
            let edge = self.edge();
            self.cubes.iter().flat_map(|c| c.faces(&edge)).collect()
        })
    }

    /// Generating cubes that are not faces of other generating cubes.
    pub fn maximal_cubes(&self) -> Vec<Cube> {
        let edge = self.edge();
        let unique: BTreeSet<&Cube> = self.cubes.iter().collect();
        unique
            .iter()
            .filter(|c| !unique.iter().any(|d| d != *c && c.is_face_of(d, &edge)))
            .map(|c| (*c).clone())
            .collect()
    }

    pub fn contains(&self, x: &SequencePoint) -> bool {
        let edge = self.edge();
        self.cubes.iter().any(|c| c.contains(x, &edge))
    }

    /// Sup distance from `x` to the complex; `None` when it has no cubes.
    pub fn distance(&self, x: &SequencePoint) -> Option<Scalar> {
        let edge = self.edge();
        self.cubes.iter().map(|c| c.distance(x, &edge)).min()
    }
}

pub fn subcomplex_membership(x: &SequencePoint, k: &Cubohedron) -> bool {
    k.contains(x)
}

/// Nearest integer, ties broken downward.
fn nearest_integer(v: &Scalar) -> Scalar {
    let half = Scalar::ratio(1, 2);
    let up = (v + &half).floor();
    if &up - v == half {
        up - Scalar::one()
    } else {
        up
    }
}

/// `G_t(v) = [v] + g_t(v − [v])` with `g_t(u) = sign(u)·H_t(2|u|)/2`.
fn lattice_step(v: &Scalar, t: &Scalar) -> Scalar {
    let center = nearest_integer(v);
    let u = v - &center;
    let two = Scalar::from_int(2);
    let magnitude = contraction_step(&(&two * u.abs()), t) / &two;
    if u.is_negative() {
        center - magnitude
    } else {
        center + magnitude
    }
}

/// Coordinatewise `2^-n·G_t(2^n·x)`.
///
/// Fixes every point of the `2^-n` and `2^{-n-1}` lattices and at `t = 1`
/// moves everything within `2^{-n-2}` of a lattice value onto it.
pub fn lattice_homotopy(x: &SequencePoint, t: &Scalar, n: u32) -> Result<SequencePoint> {
    require_unit_parameter(t)?;
    let scale = Scalar::pow2_neg(-(n as i64));
    let edge = Scalar::pow2_neg(n as i64);
    Ok(x.map_coords(|v| lattice_step(&(v * &scale), t) * &edge))
}

/// The smallest cube of the `2^-n` lattice containing `x` (tail must be 0).
pub fn carrier(x: &SequencePoint, n: u32) -> Result<Cube> {
    if !x.tail().is_zero() {
        return Err(Error::precondition("carrier needs a finitely supported point"));
    }
    let edge = Scalar::pow2_neg(n as i64);
    let mut base = BTreeMap::new();
    let mut extent = BTreeSet::new();
    for (&i, v) in x.support() {
        let cell = v / &edge;
        if cell.is_integer() {
            base.insert(i, v.clone());
        } else {
            base.insert(i, cell.floor() * &edge);
            extent.insert(i);
        }
    }
    Ok(Cube::new(base, extent))
}

/// Union of the carriers of `points`; any complex containing the points
/// contains every carrier, since each point lies in the relative interior
/// of its own carrier.
pub fn minimal_enclosing_subcomplex(points: &[SequencePoint], n: u32) -> Result<Cubohedron> {
    let carriers: BTreeSet<Cube> = points.iter().map(|p| carrier(p, n)).collect::<Result<_>>()?;
    let k = Cubohedron::new(n, carriers.into_iter().collect())?;
    let maximal = k.maximal_cubes();
    Cubohedron::new(n, maximal)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetractSample {
    pub distance: Scalar,
    pub within_band: bool,
    pub lands_in_complex: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetractReport {
    pub band: Scalar,
    pub samples: Vec<RetractSample>,
    /// Samples inside the band whose image left the complex.
    pub failures: usize,
    pub within_band: usize,
}

/// Applies `lattice_homotopy(·, 1, n)` to each sample and records whether it
/// lands in `k`; landing is only guaranteed within `2^{-n-2}` of `k`.
pub fn neighborhood_retract_check(k: &Cubohedron, samples: &[SequencePoint], n: u32) -> Result<RetractReport> {
    k.validate()?;
    if n < k.level {
        return Err(Error::precondition(format!(
            "lattice level {n} is coarser than the complex level {}",
            k.level
        )));
    }
    if k.cubes.is_empty() {
        return Err(Error::precondition("complex has no cubes"));
    }
    let band = Scalar::pow2_neg(n as i64 + 2);
    let one = Scalar::one();
    let mut rows = Vec::with_capacity(samples.len());
    for x in samples {
        let distance = k.distance(x).expect("nonempty complex");
        let image = lattice_homotopy(x, &one, n)?;
        rows.push(RetractSample {
            within_band: distance <= band,
            lands_in_complex: k.contains(&image),
            distance,
        });
    }
    Ok(RetractReport {
        failures: rows.iter().filter(|r| r.within_band && !r.lands_in_complex).count(),
        within_band: rows.iter().filter(|r| r.within_band).count(),
        band,
        samples: rows,
    })
}
