use serde::{Deserialize, Serialize};

use super::validate_grid;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::FiniteMetricSpace;

/// Tolerance used when comparing a rational diameter with `π`.
pub const PI_TOLERANCE: f64 = 1e-12;

/// A norm on `Q^k`.
///
/// `Blocks(sizes)` splits the coordinates into consecutive blocks, takes the
/// `l1` norm of each and the maximum over blocks; coordinates past the last
/// block count as blocks of size one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    #[default]
    Sup,
    L1,
    Blocks(Vec<usize>),
}

impl Norm {
    fn block_sizes(&self, dim: usize) -> Vec<usize> {
        match self {
            Norm::Sup => vec![1; dim],
            Norm::L1 if dim == 0 => Vec::new(),
            Norm::L1 => vec![dim],
            Norm::Blocks(sizes) => {
                let covered: usize = sizes.iter().sum();
                let mut out = sizes.clone();
                out.extend(std::iter::repeat(1).take(dim.saturating_sub(covered)));
                out
            }
        }
    }

    fn from_blocks(sizes: Vec<usize>) -> Norm {
        let sizes: Vec<usize> = sizes.into_iter().filter(|&s| s > 0).collect();
        if sizes.iter().all(|&s| s == 1) {
            Norm::Sup
        } else if sizes.len() == 1 {
            Norm::L1
        } else {
            Norm::Blocks(sizes)
        }
    }

    pub fn eval(&self, v: &[Scalar]) -> Scalar {
        let mut best = Scalar::zero();
        let mut start = 0;
        for size in self.block_sizes(v.len()) {
            let end = (start + size).min(v.len());
            let block: Scalar = v[start..end].iter().map(Scalar::abs).sum();
            best = best.max(block);
            start = end;
        }
        best
    }
}

/// Finitely many rational points of `Q^dim` under a norm.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormedPointSet {
    pub dim: usize,
    pub points: Vec<Vec<Scalar>>,
    #[serde(default)]
    pub norm: Norm,
}

impl NormedPointSet {
    pub fn new(dim: usize, points: Vec<Vec<Scalar>>, norm: Norm) -> Result<Self> {
        let set = NormedPointSet { dim, points, norm };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self.points.iter().position(|p| p.len() != self.dim) {
            return Err(Error::structural(format!(
                "point {i} has {} coordinates, expected {}",
                self.points[i].len(),
                self.dim
            )));
        }
        if let Norm::Blocks(sizes) = &self.norm {
            if sizes.iter().sum::<usize>() > self.dim {
                return Err(Error::structural("norm blocks exceed the dimension"));
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

    pub fn norm_of(&self, i: usize) -> Scalar {
        self.norm.eval(&self.points[i])
    }

    pub fn distance(&self, i: usize, j: usize) -> Scalar {
        let diff: Vec<Scalar> = self.points[i].iter().zip(&self.points[j]).map(|(a, b)| a - b).collect();
        self.norm.eval(&diff)
    }

    pub fn to_metric_space(&self) -> FiniteMetricSpace {
        let labels = (0..self.len()).map(|i| format!("p{i}")).collect();
        FiniteMetricSpace::from_fn(labels, |i, j| self.distance(i, j))
    }

    /// The largest norm of a point.
    pub fn radius(&self) -> Scalar {
        (0..self.len()).map(|i| self.norm_of(i)).max().unwrap_or_else(Scalar::zero)
    }

    /// Scales the set into the closed unit ball; returns the set and the factor used.
    pub fn rescaled_into_unit_ball(&self) -> (NormedPointSet, Scalar) {
        let r = self.radius();
        if r <= Scalar::one() {
            return (self.clone(), Scalar::one());
        }
        let factor = Scalar::one() / r;
        let points = self
            .points
            .iter()
            .map(|p| p.iter().map(|c| c * &factor).collect())
            .collect();
        (
            NormedPointSet { dim: self.dim, points, norm: self.norm.clone() },
            factor,
        )
    }

    fn push_unique(points: &mut Vec<Vec<Scalar>>, p: Vec<Scalar>) {
        if !points.contains(&p) {
            points.push(p);
        }
    }
}

/// `d_E` for base distance `d` and levels `t, s`, in the form
/// `sqrt((t − s)² + 4ts·sin²(d/2))`, which avoids the cancellation in the cosine form.
pub fn euclidean_cone_distance(d: f64, t: f64, s: f64) -> f64 {
    let h = (d / 2.0).sin();
    ((t - s).powi(2) + 4.0 * t * s * h * h).sqrt()
}

/// Float distances on `X × grid / X × {0}`: the vertex (index 0), then levels
/// `t > 0` in order, base points within a level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EuclideanCone {
    pub t_grid: Vec<Scalar>,
    pub base_len: usize,
    pub dist: Vec<Vec<f64>>,
}

impl EuclideanCone {
    /// Index of `[(x, t_k)]`; level 0 is the vertex.
    pub fn index(&self, x: usize, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            1 + (k - 1) * self.base_len + x
        }
    }
}

pub fn euclidean_cone_metric(base: &FiniteMetricSpace, t_grid: &[Scalar]) -> Result<EuclideanCone> {
    validate_grid(t_grid, &Scalar::zero(), &Scalar::one())?;
    let diam = base.diameter().to_f64();
    if diam > std::f64::consts::PI + PI_TOLERANCE {
        return Err(Error::precondition(format!(
            "Euclidean cone needs diameter at most pi, got {diam}"
        )));
    }
    let n = base.len();
    let levels: Vec<f64> = t_grid.iter().map(Scalar::to_f64).collect();
    let size = 1 + (levels.len() - 1) * n;
    let coords = |i: usize| -> (usize, f64) {
        if i == 0 {
            (0, 0.0)
        } else {
            ((i - 1) % n, levels[1 + (i - 1) / n])
        }
    };
    let mut dist = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in (i + 1)..size {
            let ((x, t), (y, s)) = (coords(i), coords(j));
            let d = if i == 0 { s } else { euclidean_cone_distance(base.d(x, y).to_f64(), t, s) };
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    Ok(EuclideanCone { t_grid: t_grid.to_vec(), base_len: n, dist })
}

/// `cS` sampled on a grid of `[0, 1]`: the points `((1 − t)·x, t)` in `V × R`
/// under `max(‖v‖, |t|)`, level by level, duplicates dropped (the apex once).
pub fn rectilinear_cone(s: &NormedPointSet, t_grid: &[Scalar]) -> Result<NormedPointSet> {
    s.validate()?;
    validate_grid(t_grid, &Scalar::zero(), &Scalar::one())?;
    let mut points = Vec::new();
    for t in t_grid {
        let w = Scalar::one() - t;
        for p in &s.points {
            let mut q: Vec<Scalar> = p.iter().map(|c| c * &w).collect();
            q.push(t.clone());
            NormedPointSet::push_unique(&mut points, q);
        }
    }
    let mut blocks = s.norm.block_sizes(s.dim);
    blocks.push(1);
    NormedPointSet::new(s.dim + 1, points, Norm::from_blocks(blocks))
}

/// `ST ⊆ V × W × R` sampled on a grid of `[-1, 1]`: the segment from
/// `(s, 0, -1)` to `(0, t, 1)` passes through `((1 − λ)s, λt, u)` with `λ = (1 + u)/2`.
pub fn independent_rectilinear_join(s: &NormedPointSet, t: &NormedPointSet, u_grid: &[Scalar]) -> Result<NormedPointSet> {
    s.validate()?;
    t.validate()?;
    validate_grid(u_grid, &Scalar::from_int(-1), &Scalar::one())?;
    let half = Scalar::ratio(1, 2);
    let mut points = Vec::new();
    for u in u_grid {
        let lambda = (Scalar::one() + u) * &half;
        let mu = Scalar::one() - &lambda;
        for p in &s.points {
            for r in &t.points {
                let mut q: Vec<Scalar> = p.iter().map(|c| c * &mu).collect();
                q.extend(r.iter().map(|c| c * &lambda));
                q.push(u.clone());
                NormedPointSet::push_unique(&mut points, q);
            }
        }
    }
    let mut blocks = s.norm.block_sizes(s.dim);
    blocks.extend(t.norm.block_sizes(t.dim));
    blocks.push(1);
    NormedPointSet::new(s.dim + t.dim + 1, points, Norm::from_blocks(blocks))
}

/// One compared pair: points `x, y` of the set at levels `t, s`, with the
/// vertex at level 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSample {
    pub x: usize,
    pub y: usize,
    pub t: Scalar,
    pub s: Scalar,
    /// Rectilinear-cone distance `max(‖t·x − s·y‖, |t − s|)`, exact.
    pub rectilinear: Scalar,
    pub euclidean: f64,
    pub upper_ok: bool,
    pub lower_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeComparisonReport {
    pub tolerance: f64,
    pub samples: Vec<ComparisonSample>,
    pub violations: usize,
    /// Largest `E / S` over samples with `S > 0`.
    pub max_euclidean_over_rectilinear: f64,
    /// Largest `S / E` over samples with `E > 0`.
    pub max_rectilinear_over_euclidean: f64,
}

/// Checks `E ≤ 3S` and `S ≤ 5E` on sampled pairs, where `S` is the
/// rectilinear-cone distance and `E` the Euclidean-cone distance over the
/// norm metric of `set`.
pub fn cone_comparison_bounds(
    set: &NormedPointSet,
    samples: &[(usize, usize, Scalar, Scalar)],
    tolerance: f64,
) -> Result<ConeComparisonReport> {
    set.validate()?;
    if let Some(i) = (0..set.len()).find(|&i| set.norm_of(i) > Scalar::one()) {
        return Err(Error::precondition(format!(
            "point {i} has norm {} outside the unit ball",
            set.norm_of(i)
        )));
    }
    let unit = Scalar::zero()..=Scalar::one();
    let mut out = Vec::with_capacity(samples.len());
    let (mut worst_up, mut worst_down) = (0.0f64, 0.0f64);
    for (x, y, t, s) in samples {
        if *x >= set.len() || *y >= set.len() {
            return Err(Error::structural("sample index out of range"));
        }
        if !unit.contains(t) || !unit.contains(s) {
            return Err(Error::precondition("sample levels must lie in [0, 1]"));
        }
        let diff: Vec<Scalar> = set.points[*x]
            .iter()
            .zip(&set.points[*y])
            .map(|(a, b)| t * a - s * b)
            .collect();
        let rect = set.norm.eval(&diff).max((t - s).abs());
        let e = euclidean_cone_distance(set.distance(*x, *y).to_f64(), t.to_f64(), s.to_f64());
        let sf = rect.to_f64();
        if sf > 0.0 {
            worst_up = worst_up.max(e / sf);
        }
        if e > 0.0 {
            worst_down = worst_down.max(sf / e);
        }
        out.push(ComparisonSample {
            x: *x,
            y: *y,
            t: t.clone(),
            s: s.clone(),
            rectilinear: rect,
            euclidean: e,
            upper_ok: e <= 3.0 * sf + tolerance,
            lower_ok: sf <= 5.0 * e + tolerance,
        });
    }
    let violations = out.iter().filter(|c| !(c.upper_ok && c.lower_ok)).count();
    Ok(ConeComparisonReport {
        tolerance,
        samples: out,
        violations,
        max_euclidean_over_rectilinear: worst_up,
        max_rectilinear_over_euclidean: worst_down,
    })
}
