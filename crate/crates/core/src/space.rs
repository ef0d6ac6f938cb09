//! Finite metric spaces as labeled distance matrices, and the axiom checker.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Labeled point set with an exact-rational distance matrix.
///
/// Construction only validates shape; whether the matrix is actually a
/// (pseudo-)metric is decided by [`check_metric_axioms`]. Every constructor in
/// this crate returns spaces that pass the checker.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    points: Vec<String>,
    dist: Vec<Vec<Scalar>>,
}

impl FiniteMetricSpace {
    pub fn new(points: Vec<String>, dist: Vec<Vec<Scalar>>) -> Result<Self> {
        let space = FiniteMetricSpace { points, dist };
        space.validate_shape()?;
        Ok(space)
    }

    /// Builds a space from a distance function on `labels`.
    pub fn from_fn<F>(points: Vec<String>, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> Scalar,
    {
        let n = points.len();
        let mut dist = vec![vec![Scalar::zero(); n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                dist[j][i] = d.clone();
                dist[i][j] = d;
            }
        }
        FiniteMetricSpace { points, dist }
    }

    /// Points `0..n` labeled by their index.
    pub fn from_matrix(dist: Vec<Vec<Scalar>>) -> Result<Self> {
        let points = (0..dist.len()).map(|i| i.to_string()).collect();
        FiniteMetricSpace::new(points, dist)
    }

    /// Points of the real line with the absolute-value metric.
    pub fn on_line(coords: &[Scalar]) -> Self {
        let points = coords.iter().map(|c| c.to_string()).collect();
        FiniteMetricSpace::from_fn(points, |i, j| (&coords[i] - &coords[j]).abs())
    }

    /// `n` points, all pairwise at distance `d`.
    pub fn uniform(n: usize, d: Scalar) -> Self {
        let points = (0..n).map(|i| i.to_string()).collect();
        FiniteMetricSpace::from_fn(points, |_, _| d.clone())
    }

    pub fn singleton() -> Self {
        FiniteMetricSpace::uniform(1, Scalar::zero())
    }

    /// Shape validation used after deserialization.
    pub fn validate_shape(&self) -> Result<()> {
        let n = self.points.len();
        if self.dist.len() != n {
            return Err(Error::structural(format!(
                "distance matrix has {} rows but there are {} labels",
                self.dist.len(),
                n
            )));
        }
        for (i, row) in self.dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::structural(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.points
    }

    pub fn label(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.dist
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> &Scalar {
        &self.dist[i][j]
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::structural("label count mismatch"));
        }
        self.points = labels;
        Ok(self)
    }

    pub fn diameter(&self) -> Scalar {
        self.pairs()
            .map(|(i, j)| self.d(i, j).clone())
            .max()
            .unwrap_or_else(Scalar::zero)
    }

    /// Smallest positive off-diagonal distance, if any.
    pub fn min_positive_distance(&self) -> Option<Scalar> {
        self.pairs()
            .map(|(i, j)| self.d(i, j))
            .filter(|d| d.is_positive())
            .min()
            .cloned()
    }

    /// Sorted distinct off-diagonal distances.
    pub fn spectrum(&self) -> Vec<Scalar> {
        let set: BTreeSet<&Scalar> = self.pairs().map(|(i, j)| self.d(i, j)).collect();
        set.into_iter().cloned().collect()
    }

    /// Unordered index pairs `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
    }

    /// Distance from a point to a set; `None` for the empty set.
    pub fn dist_to_set(&self, x: usize, set: &[usize]) -> Option<Scalar> {
        set.iter().map(|&a| self.d(x, a)).min().cloned()
    }

    /// The induced subspace on `subset` (in the given order).
    pub fn restrict(&self, subset: &[usize]) -> FiniteMetricSpace {
        let labels = subset.iter().map(|&i| self.points[i].clone()).collect();
        FiniteMetricSpace::from_fn(labels, |a, b| self.d(subset[a], subset[b]).clone())
    }

    /// Multiplies every distance by `factor`.
    pub fn scaled(&self, factor: &Scalar) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(self.points.clone(), |i, j| self.d(i, j) * factor)
    }

    /// Rescale helper: returns the space scaled so its diameter is at most
    /// `bound`, together with the factor used (1 when no scaling was needed).
    pub fn rescaled_to_diameter(&self, bound: &Scalar) -> (FiniteMetricSpace, Scalar) {
        let diam = self.diameter();
        if diam <= *bound {
            (self.clone(), Scalar::one())
        } else {
            let factor = bound / &diam;
            (self.scaled(&factor), factor)
        }
    }

    /// Errors naming the first pair (lexicographic) farther apart than `bound`.
    pub fn require_diameter_at_most(&self, bound: &Scalar, what: &str) -> Result<()> {
        if let Some((i, j)) = self.pairs().find(|&(i, j)| self.d(i, j) > bound) {
            return Err(Error::precondition(format!(
                "{what}: diameter exceeds {bound}; d({}, {}) = {}",
                self.label(i),
                self.label(j),
                self.d(i, j)
            )));
        }
        Ok(())
    }

    /// Float copy of the matrix.
    pub fn to_f64_matrix(&self) -> Vec<Vec<f64>> {
        self.dist
            .iter()
            .map(|row| row.iter().map(Scalar::to_f64).collect())
            .collect()
    }

    /// True when the two spaces have the same labels and identical matrices.
    pub fn same_as(&self, other: &FiniteMetricSpace) -> bool {
        self == other
    }

    /// True when the matrices agree entrywise (labels ignored).
    pub fn isometric_as_indexed(&self, other: &FiniteMetricSpace) -> bool {
        self.dist == other.dist
    }
}

impl fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FiniteMetricSpace({} points)", self.len())?;
        for (i, row) in self.dist.iter().enumerate() {
            write!(f, "  {:>6}:", self.points[i])?;
            for d in row {
                write!(f, " {d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    ZeroDiagonal,
    NonNegativity,
    Symmetry,
    Positivity,
    Triangle,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::ZeroDiagonal => "zero_diagonal",
            Axiom::NonNegativity => "non_negativity",
            Axiom::Symmetry => "symmetry",
            Axiom::Positivity => "positivity",
            Axiom::Triangle => "triangle",
        };
        f.write_str(name)
    }
}

/// One failed axiom with its lexicographically smallest witness.
///
/// For the triangle axiom the witness is `(a, b, c)` with `b` the
/// intermediate point: `lhs = d(a, c)`, `rhs = d(a, b) + d(b, c)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witness: Vec<usize>,
    pub lhs: Scalar,
    pub rhs: Scalar,
    /// Total number of violating tuples for this axiom.
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn violation(&self, axiom: Axiom) -> Option<&Violation> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }
}

/// Audits a distance matrix against the metric axioms.
///
/// With `allow_pseudo` the positivity axiom (`d(a,b) = 0 ⟹ a = b`) is skipped.
pub fn check_metric_axioms(m: &FiniteMetricSpace, allow_pseudo: bool) -> Result<AxiomReport> {
    m.validate_shape()?;
    check_matrix(m.matrix(), allow_pseudo)
}

/// Same as [`check_metric_axioms`] on a bare square matrix.
pub fn check_matrix(dist: &[Vec<Scalar>], allow_pseudo: bool) -> Result<AxiomReport> {
    let n = dist.len();
    if dist.iter().any(|row| row.len() != n) {
        return Err(Error::structural("distance matrix is not square"));
    }
    let zero = Scalar::zero();
    let mut violations = Vec::new();
    let record = |axiom, witness: Vec<usize>, lhs: &Scalar, rhs: Scalar, slot: &mut Option<Violation>| {
        match slot {
            Some(v) => v.count += 1,
            None => {
                *slot = Some(Violation {
                    axiom,
                    witness,
                    lhs: lhs.clone(),
                    rhs,
                    count: 1,
                })
            }
        }
    };

    let mut diag = None;
    for i in 0..n {
        if !dist[i][i].is_zero() {
            record(Axiom::ZeroDiagonal, vec![i], &dist[i][i], zero.clone(), &mut diag);
        }
    }
    let (mut neg, mut sym, mut pos) = (None, None, None);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = &dist[i][j];
            if d.is_negative() {
                record(Axiom::NonNegativity, vec![i, j], d, zero.clone(), &mut neg);
            }
            if i < j && dist[i][j] != dist[j][i] {
                record(Axiom::Symmetry, vec![i, j], d, dist[j][i].clone(), &mut sym);
            }
            if !allow_pseudo && i < j && d.is_zero() {
                record(Axiom::Positivity, vec![i, j], d, zero.clone(), &mut pos);
            }
        }
    }
    let mut tri = None;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a == c || a == b || b == c {
                    continue;
                }
                let rhs = &dist[a][b] + &dist[b][c];
                if dist[a][c] > rhs {
                    record(Axiom::Triangle, vec![a, b, c], &dist[a][c], rhs, &mut tri);
                }
            }
        }
    }
    violations.extend([diag, neg, sym, pos, tri].into_iter().flatten());
    Ok(AxiomReport {
        passed: violations.is_empty(),
        violations,
    })
}

/// Convenience: panics-free boolean form of the axiom check.
pub fn is_metric(m: &FiniteMetricSpace) -> bool {
    check_metric_axioms(m, false).map(|r| r.passed).unwrap_or(false)
}

pub fn is_pseudo_metric(m: &FiniteMetricSpace) -> bool {
    check_metric_axioms(m, true).map(|r| r.passed).unwrap_or(false)
}
