use serde::{Deserialize, Serialize};

use super::validate_grid;
use crate::combinators::{product_metric, union_with_cross, ProductNorm};
use crate::error::{Error, Result};
use crate::maps::{PartialMap, TotalMap};
use crate::quotient::adjunction_d3;
use crate::scalar::Scalar;
use crate::space::FiniteMetricSpace;

/// `X × grid ∪ Y` with `(x, 1)` glued to `f(x)`.
///
/// Classes: `[(x, t)]` for grid levels `t < 1` (level-major, then `x`),
/// followed by `[y]` for every `y ∈ Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderSpace {
    x: FiniteMetricSpace,
    y: FiniteMetricSpace,
    f: TotalMap,
    t_grid: Vec<Scalar>,
}

impl CylinderSpace {
    pub fn new(x: FiniteMetricSpace, y: FiniteMetricSpace, f: TotalMap, t_grid: Vec<Scalar>) -> Result<Self> {
        validate_grid(&t_grid, &Scalar::zero(), &Scalar::one())?;
        if f.len() != x.len() {
            return Err(Error::structural(format!(
                "map has {} entries but the source has {} points",
                f.len(),
                x.len()
            )));
        }
        f.check_target(y.len())?;
        Ok(CylinderSpace { x, y, f, t_grid })
    }

    pub fn source(&self) -> &FiniteMetricSpace {
        &self.x
    }

    pub fn target(&self) -> &FiniteMetricSpace {
        &self.y
    }

    pub fn map(&self) -> &TotalMap {
        &self.f
    }

    pub fn t_grid(&self) -> &[Scalar] {
        &self.t_grid
    }

    fn open_levels(&self) -> usize {
        self.t_grid.len() - 1
    }

    pub fn len(&self) -> usize {
        self.open_levels() * self.x.len() + self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of the first `[y]` class.
    pub fn first_target_class(&self) -> usize {
        self.open_levels() * self.x.len()
    }

    /// Class of `(x, t_k)`; the top level lands in `[f(x)]`.
    pub fn class_of(&self, x: usize, k: usize) -> usize {
        if k == self.open_levels() {
            self.target_class(self.f.apply(x))
        } else {
            k * self.x.len() + x
        }
    }

    pub fn target_class(&self, y: usize) -> usize {
        self.first_target_class() + y
    }

    /// `d_X(x, x') + d_Y(f(x), f(x'))`, the metric the cylinder is built on.
    pub fn adjusted_metric(&self) -> FiniteMetricSpace {
        FiniteMetricSpace::from_fn(self.x.labels().to_vec(), |i, j| {
            self.x.d(i, j) + self.y.d(self.f.apply(i), self.f.apply(j))
        })
    }

    /// The cylinder of `f` restricted to `subset`, with the same target and grid.
    pub fn restricted(&self, subset: &[usize]) -> Result<CylinderSpace> {
        if subset.iter().any(|&a| a >= self.x.len()) {
            return Err(Error::structural("subset index out of range"));
        }
        let f = TotalMap::new(subset.iter().map(|&a| self.f.apply(a)).collect());
        CylinderSpace::new(self.x.restrict(subset), self.y.clone(), f, self.t_grid.clone())
    }

    fn labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.len());
        for t in &self.t_grid[..self.open_levels()] {
            out.extend(self.x.labels().iter().map(|x| format!("({x},{t})")));
        }
        out.extend(self.y.labels().iter().map(|y| format!("[{y}]")));
        out
    }
}

/// `d_3` on the cylinder classes:
///
/// * `d([y], [y']) = d_Y(y, y')`
/// * `d([(x,t)], [y]) = (1 − t) + d_Y(f(x), y)`
/// * `d([(x,t)], [(x',t')]) = min{D(x,x') + |t − t'|, (1 − t) + (1 − t') + d_Y(f(x), f(x'))}`
///
/// where `D` is [`CylinderSpace::adjusted_metric`].
pub fn mapping_cylinder_metric(c: &CylinderSpace) -> FiniteMetricSpace {
    let adjusted = c.adjusted_metric();
    let split = c.first_target_class();
    let n = c.x.len().max(1);
    let one = Scalar::one();
    FiniteMetricSpace::from_fn(c.labels(), |i, j| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if i >= split {
            return c.y.d(i - split, j - split).clone();
        }
        let (x, t) = (i % n, &c.t_grid[i / n]);
        let fx = c.f.apply(x);
        if j >= split {
            return (&one - t) + c.y.d(fx, j - split);
        }
        let (x2, t2) = (j % n, &c.t_grid[j / n]);
        let direct = adjusted.d(x, x2) + (t - t2).abs();
        let via_target = (&one - t) + (&one - t2) + c.y.d(fx, c.f.apply(x2));
        direct.min(via_target)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderCertificate {
    pub space: FiniteMetricSpace,
    /// The adjusted source metric the formulas use.
    pub adjusted: FiniteMetricSpace,
    /// The formulas agree with `d_3` of the adjunction `X×I ∪ Y` class by class.
    pub equals_adjunction: bool,
    pub max_discrepancy: Scalar,
    /// `d_3 = d_∞` on the adjunction.
    pub d3_equals_dinf: bool,
    pub is_metric: bool,
}

/// Computes the cylinder metric and compares it with the adjunction quotient
/// of `(X, D) × grid` (l1 product) and `Y` along `(x, 1) ↦ f(x)`, where the
/// two summands are placed far enough apart that no chain gains by jumping
/// between them.
pub fn mapping_cylinder_certificate(c: &CylinderSpace) -> Result<CylinderCertificate> {
    let space = mapping_cylinder_metric(c);
    let adjusted = c.adjusted_metric();
    let grid = FiniteMetricSpace::on_line(&c.t_grid);
    let product = product_metric(&adjusted, &grid, ProductNorm::L1);
    let cross = product.diameter().max(Scalar::one() + c.y.diameter()) + Scalar::one();
    let union = union_with_cross(&product, &c.y, &cross);

    let g = c.t_grid.len();
    let top = g - 1;
    let pairs: Vec<(usize, usize)> = (0..c.x.len()).map(|x| (x * g + top, c.f.apply(x))).collect();
    let glue = PartialMap::from_pairs(&pairs)?;
    let quotient = adjunction_d3(&union, product.len(), &glue)?;

    // cylinder class -> adjunction class
    let mut target = vec![0; c.len()];
    for x in 0..c.x.len() {
        for k in 0..top {
            target[c.class_of(x, k)] = quotient.surjection.class_of(x * g + k);
        }
    }
    for y in 0..c.y.len() {
        target[c.target_class(y)] = quotient.surjection.class_of(product.len() + y);
    }
    let mut max_discrepancy = Scalar::zero();
    for (i, j) in space.pairs() {
        let diff = (space.d(i, j) - quotient.space.d(target[i], target[j])).abs();
        max_discrepancy = max_discrepancy.max(diff);
    }
    Ok(CylinderCertificate {
        equals_adjunction: max_discrepancy.is_zero(),
        is_metric: crate::space::is_metric(&space),
        space,
        adjusted,
        max_discrepancy,
        d3_equals_dinf: quotient.equals_dinf,
    })
}

/// Whether the cylinder of `f|A` is the subspace of the cylinder of `f`
/// spanned by `A × grid` and `Y`, entry by entry.
pub fn sub_cylinder_check(c: &CylinderSpace, subset: &[usize]) -> Result<bool> {
    let small = c.restricted(subset)?;
    let whole = mapping_cylinder_metric(c);
    let part = mapping_cylinder_metric(&small);
    let mut classes = vec![0; small.len()];
    for (ia, &a) in subset.iter().enumerate() {
        for k in 0..c.open_levels() {
            classes[small.class_of(ia, k)] = c.class_of(a, k);
        }
    }
    for y in 0..c.y.len() {
        classes[small.target_class(y)] = c.target_class(y);
    }
    Ok(whole.restrict(&classes).matrix() == part.matrix())
}
