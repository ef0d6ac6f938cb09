//! Chain metrics on quotients, and metrics on amalgams and adjunction spaces.
//!
//! Given a surjection `f: S → Q`, the chain metric `d_n` on `Q` is the
//! infimum, over chains `x = x_0, ..., x_n = y` in `Q`, of the sums of the
//! block distances `d(f⁻¹ x_i, f⁻¹ x_{i+1})`. Because the summands only depend
//! on consecutive classes, the infimum is a min-plus matrix power of the block
//! distance matrix `B`: chains of exactly `n` steps and chains of at most `n`
//! steps give the same value (`B` has zero diagonal, so a chain can stall).
//! Hence `d_n = B^{⊗n}` and `d_∞ = B^{⊗(k-1)}` for `k` classes, since a
//! shortest chain never revisits a class.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinators::{disjoint_union_metric, union_with_cross};
use crate::embed::extend_metric;
use crate::error::{Error, Result};
use crate::maps::PartialMap;
use crate::modulus::{ModulusRow, ModulusTable};
use crate::scalar::Scalar;
use crate::space::{check_matrix, Axiom, FiniteMetricSpace};

type Matrix = Vec<Vec<Scalar>>;

/// A surjection from point indices onto class indices `0..class_count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SurjectionWire", into = "SurjectionWire")]
pub struct Surjection {
    class_of: Vec<usize>,
    class_count: usize,
}

#[derive(Serialize, Deserialize)]
struct SurjectionWire {
    class_of: Vec<usize>,
}

impl TryFrom<SurjectionWire> for Surjection {
    type Error = Error;
    fn try_from(w: SurjectionWire) -> Result<Self> {
        Surjection::new(w.class_of)
    }
}

impl From<Surjection> for SurjectionWire {
    fn from(s: Surjection) -> Self {
        SurjectionWire { class_of: s.class_of }
    }
}

impl Surjection {
    /// Errors unless the class indices used are exactly `0..k` for some `k`.
    pub fn new(class_of: Vec<usize>) -> Result<Self> {
        let used: BTreeSet<usize> = class_of.iter().copied().collect();
        let class_count = used.len();
        if let Some(&top) = used.iter().next_back() {
            if top + 1 != class_count {
                let missing = (0..top).find(|c| !used.contains(c)).unwrap_or(top);
                return Err(Error::structural(format!("class {missing} has no preimage")));
            }
        }
        Ok(Surjection { class_of, class_count })
    }

    pub fn identity(n: usize) -> Self {
        Surjection {
            class_of: (0..n).collect(),
            class_count: n,
        }
    }

    /// Collapses each listed block to one class; remaining points become
    /// singletons. Classes are numbered by their smallest member.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut rep: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for block in blocks {
            let lead = *block.iter().min().ok_or_else(|| Error::structural("empty block"))?;
            for &x in block {
                if x >= n {
                    return Err(Error::structural(format!("block member {x} out of range")));
                }
                if seen[x] {
                    return Err(Error::precondition(format!("point {x} lies in two blocks")));
                }
                seen[x] = true;
                rep[x] = lead;
            }
        }
        let mut reps: Vec<usize> = rep.clone();
        reps.sort_unstable();
        reps.dedup();
        let class_of = rep.iter().map(|r| reps.binary_search(r).unwrap()).collect();
        Surjection::new(class_of)
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn classes(&self) -> &[usize] {
        &self.class_of
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn source_len(&self) -> usize {
        self.class_of.len()
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    /// Class labels: the member label for singletons, `[a,b,...]` otherwise.
    pub fn class_labels(&self, m: &FiniteMetricSpace) -> Vec<String> {
        self.members()
            .iter()
            .map(|ms| match ms.as_slice() {
                [x] => m.label(*x).to_string(),
                _ => {
                    let parts: Vec<&str> = ms.iter().map(|&x| m.label(x)).collect();
                    format!("[{}]", parts.join(","))
                }
            })
            .collect()
    }

    fn check_source(&self, m: &FiniteMetricSpace) -> Result<()> {
        if self.class_of.len() != m.len() {
            return Err(Error::structural(format!(
                "surjection is defined on {} points, space has {}",
                self.class_of.len(),
                m.len()
            )));
        }
        Ok(())
    }
}

/// Minimum distance between point-inverses, for every pair of classes.
pub fn block_distance(m: &FiniteMetricSpace, f: &Surjection) -> Result<Matrix> {
    f.check_source(m)?;
    let k = f.class_count();
    let mut out: Vec<Vec<Option<Scalar>>> = vec![vec![None; k]; k];
    for i in 0..m.len() {
        for j in (i + 1)..m.len() {
            let (a, b) = (f.class_of(i), f.class_of(j));
            if a == b {
                continue;
            }
            let d = m.d(i, j);
            let slot = &mut out[a][b];
            if slot.as_ref().map_or(true, |cur| d < cur) {
                *slot = Some(d.clone());
                out[b][a] = Some(d.clone());
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|row| row.into_iter().map(|d| d.unwrap_or_else(Scalar::zero)).collect())
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainLength {
    Finite(usize),
    Infinite,
}

impl fmt::Display for ChainLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainLength::Finite(n) => write!(f, "{n}"),
            ChainLength::Infinite => f.write_str("inf"),
        }
    }
}

/// `d_n` on the classes of a surjection, with its metric audit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMetric {
    pub n: ChainLength,
    pub values: Matrix,
    /// No triangle or positivity violation.
    pub is_metric: bool,
    /// Triangle inequality holds (positivity not required).
    pub triangle_valid: bool,
    pub triangle_witness: Option<[usize; 3]>,
    /// `d_n` coincides with `d_∞` entrywise.
    pub equals_dinf: bool,
}

impl ChainMetric {
    /// The biconditional `d_∞ = d_n ⟺ d_n satisfies the triangle inequality`.
    pub fn lemma_holds(&self) -> bool {
        self.equals_dinf == self.triangle_valid
    }

    pub fn to_space(&self, labels: Vec<String>) -> FiniteMetricSpace {
        FiniteMetricSpace::new(labels, self.values.clone()).expect("square matrix")
    }
}

fn min_plus_step(current: &Matrix, block: &Matrix) -> Matrix {
    let k = current.len();
    let mut next = current.clone();
    for x in 0..k {
        for y in (x + 1)..k {
            let mut best = next[x][y].clone();
            for z in 0..k {
                let via = &current[x][z] + &block[z][y];
                if via < best {
                    best = via;
                }
            }
            next[y][x] = best.clone();
            next[x][y] = best;
        }
    }
    next
}

/// `d_n` by iterated min-plus steps over chains of at most `n` segments.
pub fn chain_power(block: &Matrix, n: usize) -> Matrix {
    let k = block.len();
    let steps = n.max(1).min(k.saturating_sub(1).max(1));
    let mut current = block.clone();
    for _ in 1..steps {
        let next = min_plus_step(&current, block);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// All-pairs shortest paths (Floyd–Warshall) on a symmetric weight matrix.
pub fn shortest_paths(block: &Matrix) -> Matrix {
    let k = block.len();
    let mut d = block.clone();
    for z in 0..k {
        for x in 0..k {
            for y in 0..k {
                let via = &d[x][z] + &d[z][y];
                if via < d[x][y] {
                    d[x][y] = via;
                }
            }
        }
    }
    d
}

/// The chain metric `d_n` (or `d_∞`) of `m` under `f`.
pub fn chain_metric(m: &FiniteMetricSpace, f: &Surjection, n: ChainLength) -> Result<ChainMetric> {
    if n == ChainLength::Finite(0) {
        return Err(Error::precondition("chain length must be at least 1"));
    }
    let block = block_distance(m, f)?;
    let dinf = shortest_paths(&block);
    let values = match n {
        ChainLength::Finite(n) => chain_power(&block, n),
        ChainLength::Infinite => dinf.clone(),
    };
    Ok(audit(n, values, &dinf))
}

fn audit(n: ChainLength, values: Matrix, dinf: &Matrix) -> ChainMetric {
    let report = check_matrix(&values, false).expect("square matrix");
    let triangle_witness = report.violation(Axiom::Triangle).map(|v| [v.witness[0], v.witness[1], v.witness[2]]);
    ChainMetric {
        n,
        is_metric: report.passed,
        triangle_valid: triangle_witness.is_none(),
        triangle_witness,
        equals_dinf: &values == dinf,
        values,
    }
}

/// Finite-scale modulus of the identity `(Q, d_∞) → (Q, d_n)`.
///
/// Rows run over the `d_∞` spectrum; each `ε` is the largest `d_n` among class
/// pairs with `d_∞ ≤ δ`.
pub fn quotient_order_modulus(m: &FiniteMetricSpace, f: &Surjection, n: usize) -> Result<ModulusTable> {
    let block = block_distance(m, f)?;
    let dn = chain_power(&block, n);
    let dinf = shortest_paths(&block);
    let k = block.len();
    let mut entries: Vec<(Scalar, Scalar)> = Vec::new();
    for x in 0..k {
        for y in (x + 1)..k {
            entries.push((dinf[x][y].clone(), dn[x][y].clone()));
        }
    }
    entries.sort();
    let spectrum: BTreeSet<Scalar> = entries.iter().map(|e| e.0.clone()).collect();
    let mut rows = Vec::new();
    let mut running = Scalar::zero();
    let mut idx = 0;
    for delta in spectrum {
        while idx < entries.len() && entries[idx].0 <= delta {
            running = running.max(entries[idx].1.clone());
            idx += 1;
        }
        rows.push(ModulusRow {
            delta,
            epsilon: running.clone(),
        });
    }
    Ok(ModulusTable { rows })
}

/// A quotient metric together with the chain-metric certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedQuotient {
    pub space: FiniteMetricSpace,
    pub surjection: Surjection,
    /// Chain length used for `space` (2 or 3 in this module).
    pub n: usize,
    pub equals_dinf: bool,
    pub is_metric: bool,
}

fn certified(source: &FiniteMetricSpace, f: Surjection, n: usize) -> Result<CertifiedQuotient> {
    let cm = chain_metric(source, &f, ChainLength::Finite(n))?;
    let space = cm.to_space(f.class_labels(source));
    Ok(CertifiedQuotient {
        space,
        surjection: f,
        n,
        equals_dinf: cm.equals_dinf,
        is_metric: cm.is_metric,
    })
}

/// Smallest distance between points of two different members of `family`
/// with at least two points, or `None` when there are fewer than two such.
pub fn family_separation(x: &FiniteMetricSpace, family: &[Vec<usize>]) -> Option<Scalar> {
    let collapsed: Vec<&Vec<usize>> = family.iter().filter(|m| m.len() > 1).collect();
    let mut best: Option<Scalar> = None;
    for (i, a) in collapsed.iter().enumerate() {
        for b in &collapsed[i + 1..] {
            for &p in a.iter() {
                for &q in b.iter() {
                    let d = x.d(p, q);
                    if best.as_ref().map_or(true, |m| d < m) {
                        best = Some(d.clone());
                    }
                }
            }
        }
    }
    best
}

/// `d_2` on the quotient collapsing each member of a disjoint family.
///
/// The metric is first truncated at the family separation `ε`, which keeps
/// the uniformity. After truncation a chain through two different members
/// costs at least `ε`, so `d_2 = d_∞`. Without it a chain hopping across
/// several members can undercut `d_2`.
pub fn quotient_by_discrete_family(x: &FiniteMetricSpace, family: &[Vec<usize>]) -> Result<CertifiedQuotient> {
    let f = Surjection::from_blocks(x.len(), family)?;
    let source = match family_separation(x, family) {
        Some(eps) if !eps.is_positive() => {
            return Err(Error::precondition("family members are at distance zero"));
        }
        Some(eps) => FiniteMetricSpace::from_fn(x.labels().to_vec(), |i, j| x.d(i, j).clone().min(eps.clone())),
        None => x.clone(),
    };
    certified(&source, f, 2)
}

/// Glues `x` and `y` along an isometry `a_k ↦ b_k`, metrized by `d_2`.
///
/// Classes: the points of `x` in order, then the points of `y` outside `b`.
pub fn amalgamated_union(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    a: &[usize],
    b: &[usize],
) -> Result<CertifiedQuotient> {
    let union = disjoint_union_metric(x, y)?;
    let f = gluing_surjection(x, y, a, b)?;
    certified(&union, f, 2)
}

/// Same as [`amalgamated_union`] but without the diameter bound, using a
/// disjoint union whose cross distance is `cross` (a metric when both
/// diameters are at most `2·cross`).
pub(crate) fn amalgamated_union_with_cross(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    a: &[usize],
    b: &[usize],
    cross: &Scalar,
) -> Result<CertifiedQuotient> {
    let two_cross = cross + cross;
    x.require_diameter_at_most(&two_cross, "amalgam, left part")?;
    y.require_diameter_at_most(&two_cross, "amalgam, right part")?;
    let union = union_with_cross(x, y, cross);
    let f = gluing_surjection(x, y, a, b)?;
    certified(&union, f, 2)
}

fn gluing_surjection(x: &FiniteMetricSpace, y: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<Surjection> {
    if a.len() != b.len() {
        return Err(Error::structural("gluing map lists differ in length"));
    }
    if a.iter().any(|&i| i >= x.len()) || b.iter().any(|&j| j >= y.len()) {
        return Err(Error::structural("gluing index out of range"));
    }
    let distinct = |s: &[usize]| s.iter().collect::<BTreeSet<_>>().len() == s.len();
    if !distinct(a) || !distinct(b) {
        return Err(Error::precondition("gluing map is not a bijection"));
    }
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let (da, db) = (x.d(a[i], a[j]), y.d(b[i], b[j]));
            if da != db {
                return Err(Error::precondition(format!(
                    "gluing map is not isometric: d({}, {}) = {da} but d({}, {}) = {db}",
                    x.label(a[i]),
                    x.label(a[j]),
                    y.label(b[i]),
                    y.label(b[j])
                )));
            }
        }
    }
    let nx = x.len();
    let mut class_of: Vec<usize> = (0..nx).collect();
    let mut next = nx;
    for j in 0..y.len() {
        match b.iter().position(|&bj| bj == j) {
            Some(k) => class_of.push(a[k]),
            None => {
                class_of.push(next);
                next += 1;
            }
        }
    }
    Surjection::new(class_of)
}

/// The identification `X ⊔ Y → X ∪_f Y` for a map `f` on `A ⊆ X`.
///
/// Classes: points of `X ∖ A` in order, then one class `[y]` per `y ∈ Y`.
pub fn adjunction_surjection(nx: usize, ny: usize, f: &PartialMap) -> Result<Surjection> {
    f.check_bounds(nx, ny)?;
    let free: Vec<usize> = (0..nx).filter(|&x| f.get(x).is_none()).collect();
    let offset = free.len();
    let mut class_of = vec![0; nx + ny];
    for (k, &x) in free.iter().enumerate() {
        class_of[x] = k;
    }
    for (s, t) in f.pairs() {
        class_of[s] = offset + t;
    }
    for y in 0..ny {
        class_of[nx + y] = offset + y;
    }
    Surjection::new(class_of)
}

/// `d_3` of the adjunction identification on a disjoint-union metric whose
/// first `nx` points are `X`. Returns the quotient and whether `d_3 = d_∞`.
pub fn adjunction_d3(union: &FiniteMetricSpace, nx: usize, f: &PartialMap) -> Result<CertifiedQuotient> {
    let ny = union
        .len()
        .checked_sub(nx)
        .ok_or_else(|| Error::structural("union is smaller than X"))?;
    let s = adjunction_surjection(nx, ny, f)?;
    certified(union, s, 3)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjunctionResult {
    /// `d_3` on the classes: free points of `X` first, then `[y]` for each `y`.
    pub space: FiniteMetricSpace,
    /// The metric on `X ⊔ Y` built from the extended adjusted metric.
    pub disjoint_union: FiniteMetricSpace,
    pub surjection: Surjection,
    /// Class index of the first `[y]`.
    pub first_y_class: usize,
    pub d3_equals_dinf: bool,
    pub is_metric: bool,
    /// `d_3([y],[z]) = d_Y(y,z)` for all `y, z`.
    pub embedded_y: bool,
    /// `d_3(x,[y]) ≥ min(1, d(x,A)) > 0` for all free `x` and all `y`. The 1
    /// is the cross distance, which a direct chain from `x` to `y` may use.
    pub free_points_separated: bool,
    /// The identification is 1-Lipschitz from `disjoint_union`.
    pub identification_lipschitz: bool,
}

/// Metrizes `X ∪_f Y` for `f: A → Y`, `A ⊆ X` given by the domain of `f`.
///
/// Pipeline: the adjusted metric `D = d_X + d_Y∘(f×f)` on `A` is extended to
/// `X`; the result is joined to `Y` with cross distance 1; the identification
/// is metrized by `d_3`. Both spaces must have diameter at most 1.
pub fn adjunction_space(x: &FiniteMetricSpace, y: &FiniteMetricSpace, f: &PartialMap) -> Result<AdjunctionResult> {
    if f.is_empty() {
        return Err(Error::precondition("adjunction needs a nonempty subset A"));
    }
    f.check_bounds(x.len(), y.len())?;
    let one = Scalar::one();
    x.require_diameter_at_most(&one, "adjunction, X")?;
    y.require_diameter_at_most(&one, "adjunction, Y")?;

    let a = f.domain();
    let fa: Vec<usize> = a.iter().map(|&s| f.get(s).unwrap()).collect();
    let adjusted = FiniteMetricSpace::from_fn(a.iter().map(|&s| x.label(s).to_string()).collect(), |i, j| {
        x.d(a[i], a[j]) + y.d(fa[i], fa[j])
    });
    let extended = extend_metric(x, &a, &adjusted)?;
    let union = union_with_cross(&extended, y, &one);
    let nx = x.len();
    let mut q = adjunction_d3(&union, nx, f)?;
    let labels: Vec<String> = (0..nx)
        .filter(|s| f.get(*s).is_none())
        .map(|s| x.label(s).to_string())
        .chain(y.labels().iter().map(|l| format!("[{l}]")))
        .collect();
    q.space = q.space.with_labels(labels)?;

    let first_y_class = nx - a.len();
    let d3 = &q.space;
    let embedded_y = (0..y.len())
        .all(|i| (0..y.len()).all(|j| d3.d(first_y_class + i, first_y_class + j) == y.d(i, j)));
    let free_points_separated = (0..first_y_class).all(|c| {
        let xpt = q.surjection.members()[c][0];
        let to_a = extended.dist_to_set(xpt, &a).expect("A nonempty");
        let bound = to_a.clone().min(one.clone());
        to_a.is_positive() && (0..y.len()).all(|j| d3.d(c, first_y_class + j) >= &bound)
    });
    let identification_lipschitz = union
        .pairs()
        .all(|(i, j)| d3.d(q.surjection.class_of(i), q.surjection.class_of(j)) <= union.d(i, j));

    Ok(AdjunctionResult {
        space: q.space,
        disjoint_union: union,
        surjection: q.surjection,
        first_y_class,
        d3_equals_dinf: q.equals_dinf,
        is_metric: q.is_metric,
        embedded_y,
        free_points_separated,
        identification_lipschitz,
    })
}

/// A finite slice of the classic example of a quotient map that is of type 3
/// but not of type 1.
///
/// Each component `i = 1..=components` is `X₊ × X₋ × {-1/i, 0, 1/i}` where
/// `X₊`, `X₋` are two-point spaces with distance `eta`; the `l1` product metric
/// is used, and components sit at distance 1 apart along the first axis of
/// the plane. At level `+1/i` the `X₋` coordinate is collapsed, at `-1/i`
/// the `X₊` coordinate. Points are ordered `(i, t, p, m)` lexicographically
/// with `t` running `-1/i, 0, 1/i`.
pub fn type_two_fixture(components: usize, eta: &Scalar) -> (FiniteMetricSpace, Surjection) {
    let mut pts: Vec<(usize, Scalar, usize, usize, i8)> = Vec::new();
    for i in 1..=components {
        let step = Scalar::ratio(1, i as i64);
        for (sign, t) in [(-1i8, -step.clone()), (0, Scalar::zero()), (1, step.clone())] {
            for p in 0..2 {
                for m in 0..2 {
                    pts.push((i, t.clone(), p, m, sign));
                }
            }
        }
    }
    let labels = pts
        .iter()
        .map(|(i, t, p, m, _)| format!("({i},{t},p{p},m{m})"))
        .collect();
    let eta = eta.clone();
    let space = FiniteMetricSpace::from_fn(labels, |a, b| {
        let (pa, pb) = (&pts[a], &pts[b]);
        let comp = Scalar::from_int((pa.0 as i64 - pb.0 as i64).abs());
        let level = (&pa.1 - &pb.1).abs();
        let plus = if pa.2 == pb.2 { Scalar::zero() } else { eta.clone() };
        let minus = if pa.3 == pb.3 { Scalar::zero() } else { eta.clone() };
        comp + level + plus + minus
    });
    let mut key_class: Vec<(usize, i8, Option<usize>, Option<usize>)> = Vec::new();
    let mut class_of = Vec::with_capacity(pts.len());
    for (i, _, p, m, sign) in &pts {
        let key = match sign {
            1 => (*i, 1, Some(*p), None),
            -1 => (*i, -1, None, Some(*m)),
            _ => (*i, 0, Some(*p), Some(*m)),
        };
        let c = match key_class.iter().position(|k| *k == key) {
            Some(c) => c,
            None => {
                key_class.push(key);
                key_class.len() - 1
            }
        };
        class_of.push(c);
    }
    (space, Surjection::new(class_of).expect("every class is hit"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::space::is_metric;

    fn int(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn line(n: i64) -> FiniteMetricSpace {
        FiniteMetricSpace::on_line(&(0..n).map(int).collect::<Vec<_>>())
    }

    #[test]
    fn block_distance_cases() {
        let m = line(3);
        assert_eq!(block_distance(&m, &Surjection::identity(3)).unwrap(), m.matrix());
        let all = Surjection::new(vec![0, 0, 0]).unwrap();
        assert_eq!(block_distance(&m, &all).unwrap(), vec![vec![int(0)]]);
        let ac = Surjection::from_blocks(3, &[vec![0, 2]]).unwrap();
        let b = block_distance(&m, &ac).unwrap();
        assert_eq!(b[ac.class_of(0)][ac.class_of(1)], int(1));
    }

    #[test]
    fn non_surjective_rejected() {
        assert!(Surjection::new(vec![0, 2]).unwrap_err().is_input_error());
        assert!(serde_json::from_str::<Surjection>(r#"{"class_of":[1,1]}"#).is_err());
    }

    #[test]
    fn identity_chain_metric() {
        let m = line(4);
        let cm = chain_metric(&m, &Surjection::identity(4), ChainLength::Finite(1)).unwrap();
        assert_eq!(cm.values, m.matrix());
        assert!(cm.is_metric && cm.equals_dinf && cm.lemma_holds());
    }

    #[test]
    fn collapsing_line_ends() {
        let m = line(4);
        let f = Surjection::from_blocks(4, &[vec![0, 3]]).unwrap();
        let cm = chain_metric(&m, &f, ChainLength::Finite(2)).unwrap();
        let (c, one, two) = (f.class_of(0), f.class_of(1), f.class_of(2));
        assert_eq!(cm.values[c][one], int(1));
        assert_eq!(cm.values[one][two], int(1));
        assert_eq!(cm.values[c][two], int(1));
        assert!(cm.equals_dinf && cm.is_metric);
    }

    #[test]
    fn d1_can_fail_triangle() {
        // collapsing {0,3} on a 4-point line: d_1(1,2) = 1 but d_1 can be worse
        // on the 6-point line with {0,5} collapsed
        let m = line(6);
        let f = Surjection::from_blocks(6, &[vec![0, 5]]).unwrap();
        let d1 = chain_metric(&m, &f, ChainLength::Finite(1)).unwrap();
        assert!(!d1.triangle_valid);
        assert!(!d1.equals_dinf);
        assert!(d1.lemma_holds());
        let dinf = chain_metric(&m, &f, ChainLength::Infinite).unwrap();
        assert!(dinf.is_metric);
    }

    #[test]
    fn order_modulus() {
        let m = line(4);
        let t = quotient_order_modulus(&m, &Surjection::identity(4), 1).unwrap();
        assert!(t.rows.iter().all(|r| r.delta == r.epsilon));
        let one = quotient_order_modulus(&m, &Surjection::new(vec![0; 4]).unwrap(), 1).unwrap();
        assert!(one.rows.is_empty());
    }

    #[test]
    fn type_two_ratio_grows() {
        let eta = q(1, 1);
        let (space, f) = type_two_fixture(4, &eta);
        let block = block_distance(&space, &f).unwrap();
        let d1 = chain_power(&block, 1);
        let dinf = shortest_paths(&block);
        let mut ratios = Vec::new();
        for i in 1..=4usize {
            // (p0,m0,0) and (p1,m1,0) in component i
            let base = (i - 1) * 12 + 4;
            let (a, b) = (f.class_of(base), f.class_of(base + 3));
            ratios.push(&d1[a][b] / &dinf[a][b]);
        }
        assert_eq!(ratios[0], int(1));
        assert!(ratios.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(ratios[3], int(2));
        let cm = chain_metric(&space, &f, ChainLength::Finite(3)).unwrap();
        assert!(cm.equals_dinf);
    }

    #[test]
    fn discrete_family() {
        let m = line(4);
        let singletons: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
        let qd = quotient_by_discrete_family(&m, &singletons).unwrap();
        assert!(qd.space.isometric_as_indexed(&m));
        let qd = quotient_by_discrete_family(&m, &[vec![0, 3]]).unwrap();
        assert!(qd.equals_dinf && qd.is_metric);
        assert!(quotient_by_discrete_family(&m, &[vec![0, 1], vec![1, 2]]).is_err());
    }

    #[test]
    fn hopping_chain_needs_truncation() {
        let m = FiniteMetricSpace::on_line(&[-1, 0, 10, 11, 21, 22].map(int));
        let family = [vec![1, 2], vec![3, 4]];
        let raw = chain_metric(&m, &Surjection::from_blocks(6, &family).unwrap(), ChainLength::Finite(2)).unwrap();
        assert!(!raw.equals_dinf);
        let qd = quotient_by_discrete_family(&m, &family).unwrap();
        assert_eq!(family_separation(&m, &family), Some(int(1)));
        assert!(qd.equals_dinf && qd.is_metric);
    }

    #[test]
    fn two_segments_glued_at_an_endpoint() {
        let seg = FiniteMetricSpace::uniform(2, int(1));
        let g = amalgamated_union(&seg, &seg, &[1], &[0]).unwrap();
        assert_eq!(g.space.len(), 3);
        assert!(g.space.matrix().iter().flatten().all(|d| d.is_zero() || *d == int(1)));
        assert!(g.equals_dinf);
        let identity = amalgamated_union(&seg, &seg, &[0, 1], &[0, 1]).unwrap();
        assert!(identity.space.isometric_as_indexed(&seg));
    }

    #[test]
    fn gluing_must_be_isometric() {
        let a = FiniteMetricSpace::on_line(&[q(0, 1), q(1, 2)]);
        let b = FiniteMetricSpace::on_line(&[q(0, 1), q(1, 4)]);
        let err = amalgamated_union(&a, &b, &[0, 1], &[0, 1]).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn adjunction_two_points_onto_a_point() {
        let x = FiniteMetricSpace::uniform(2, int(1));
        let y = FiniteMetricSpace::singleton();
        let f = PartialMap::from_pairs(&[(1, 0)]).unwrap();
        let r = adjunction_space(&x, &y, &f).unwrap();
        assert_eq!(r.space.len(), 2);
        assert_eq!(r.space.d(0, 1), &int(1));
        assert!(r.d3_equals_dinf && r.is_metric && r.embedded_y && r.free_points_separated);
        assert!(r.identification_lipschitz);
    }

    #[test]
    fn adjunction_along_everything() {
        let x = FiniteMetricSpace::on_line(&[q(0, 1), q(1, 3), q(1, 1)]);
        let f = PartialMap::from_pairs(&[(0, 0), (1, 1), (2, 2)]).unwrap();
        let r = adjunction_space(&x, &x, &f).unwrap();
        assert!(r.space.isometric_as_indexed(&x));
        assert!(is_metric(&r.space));
    }

    #[test]
    fn adjunction_rejects_empty_domain() {
        let x = FiniteMetricSpace::uniform(2, int(1));
        let err = adjunction_space(&x, &x, &PartialMap::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }
}
