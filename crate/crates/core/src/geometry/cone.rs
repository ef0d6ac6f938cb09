use serde::{Deserialize, Serialize};

use super::validate_grid;
use crate::combinators::{product_metric, ProductNorm};
use crate::error::{Error, Result};
use crate::quotient::amalgamated_union;
use crate::scalar::Scalar;
use crate::space::FiniteMetricSpace;

/// `X × grid / X × {1}` for a grid in `[0, 1]`.
///
/// Points are ordered level by level (`t` ascending, `t < 1`), base points
/// within a level, with the vertex last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSpace {
    base: FiniteMetricSpace,
    t_grid: Vec<Scalar>,
}

impl ConeSpace {
    pub fn new(base: FiniteMetricSpace, t_grid: Vec<Scalar>) -> Result<Self> {
        validate_grid(&t_grid, &Scalar::zero(), &Scalar::one())?;
        Ok(ConeSpace { base, t_grid })
    }

    pub fn base(&self) -> &FiniteMetricSpace {
        &self.base
    }

    pub fn t_grid(&self) -> &[Scalar] {
        &self.t_grid
    }

    fn levels(&self) -> &[Scalar] {
        &self.t_grid[..self.t_grid.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.levels().len() * self.base.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertex(&self) -> usize {
        self.len() - 1
    }

    /// Index of `[(x, t_k)]`; `k` may name the top level, giving the vertex.
    pub fn index(&self, x: usize, k: usize) -> usize {
        if k + 1 == self.t_grid.len() {
            self.vertex()
        } else {
            k * self.base.len() + x
        }
    }

    /// `(x, t)` for a non-vertex index.
    fn coords(&self, i: usize) -> Option<(usize, &Scalar)> {
        if i == self.vertex() {
            None
        } else {
            Some((i % self.base.len(), &self.levels()[i / self.base.len()]))
        }
    }
}

/// `d_2` on the cone: `min{d(x,x') + |t−t'|, (1−t) + (1−t')}`, vertex at `t = 1`.
pub fn cone_metric(c: &ConeSpace) -> FiniteMetricSpace {
    let one = Scalar::one();
    let mut labels: Vec<String> = c
        .levels()
        .iter()
        .flat_map(|t| c.base.labels().iter().map(move |x| format!("({x},{t})")))
        .collect();
    labels.push("v".into());
    FiniteMetricSpace::from_fn(labels, |i, j| match (c.coords(i), c.coords(j)) {
        (Some((x, t)), Some((y, s))) => {
            let direct = c.base.d(x, y) + (t - s).abs();
            let via_vertex = (&one - t) + (&one - s);
            direct.min(via_vertex)
        }
        (Some((_, t)), None) | (None, Some((_, t))) => &one - t,
        (None, None) => Scalar::zero(),
    })
}

/// `X × Y × grid / ~` for a grid in `[-1, 1]`; at `t = -1` only `x` is
/// remembered and at `t = 1` only `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinSpace {
    x: FiniteMetricSpace,
    y: FiniteMetricSpace,
    t_grid: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JoinClass {
    /// `[(x, *, -1)]`
    XEnd { x: usize },
    /// `[(x, y, t)]` with `-1 < t < 1`, `t` given as a grid index.
    Middle { x: usize, y: usize, level: usize },
    /// `[(*, y, 1)]`
    YEnd { y: usize },
}

impl JoinSpace {
    pub fn new(x: FiniteMetricSpace, y: FiniteMetricSpace, t_grid: Vec<Scalar>) -> Result<Self> {
        validate_grid(&t_grid, &Scalar::from_int(-1), &Scalar::one())?;
        if x.is_empty() || y.is_empty() {
            return Err(Error::precondition("join factors must be nonempty"));
        }
        Ok(JoinSpace { x, y, t_grid })
    }

    pub fn t_grid(&self) -> &[Scalar] {
        &self.t_grid
    }

    /// Classes: the `X` end, then interior levels (`x`-major within a level), then the `Y` end.
    pub fn classes(&self) -> Vec<JoinClass> {
        let mut out: Vec<JoinClass> = (0..self.x.len()).map(|x| JoinClass::XEnd { x }).collect();
        for level in 1..self.t_grid.len() - 1 {
            for x in 0..self.x.len() {
                for y in 0..self.y.len() {
                    out.push(JoinClass::Middle { x, y, level });
                }
            }
        }
        out.extend((0..self.y.len()).map(|y| JoinClass::YEnd { y }));
        out
    }

    /// A representative `(x, y, t)` of the class.
    fn representative<'a>(&'a self, c: &JoinClass, minus: &'a Scalar, plus: &'a Scalar) -> (usize, usize, &'a Scalar) {
        match *c {
            JoinClass::XEnd { x } => (x, 0, minus),
            JoinClass::Middle { x, y, level } => (x, y, &self.t_grid[level]),
            JoinClass::YEnd { y } => (0, y, plus),
        }
    }

    fn label(&self, c: &JoinClass) -> String {
        match *c {
            JoinClass::XEnd { x } => format!("({},*,-1)", self.x.label(x)),
            JoinClass::Middle { x, y, level } => {
                format!("({},{},{})", self.x.label(x), self.y.label(y), self.t_grid[level])
            }
            JoinClass::YEnd { y } => format!("(*,{},1)", self.y.label(y)),
        }
    }
}

/// The four-chain minimum `d_3` on the join classes.
pub fn join_metric(j: &JoinSpace) -> FiniteMetricSpace {
    let classes = j.classes();
    let labels = classes.iter().map(|c| j.label(c)).collect();
    let (minus, plus) = (Scalar::from_int(-1), Scalar::one());
    let (one, two) = (Scalar::one(), Scalar::from_int(2));
    FiniteMetricSpace::from_fn(labels, |a, b| {
        let (x, y, t) = j.representative(&classes[a], &minus, &plus);
        let (x2, y2, t2) = j.representative(&classes[b], &minus, &plus);
        let (dx, dy) = (j.x.d(x, x2), j.y.d(y, y2));
        let gap = (t - t2).abs();
        let direct = dx + dy + &gap;
        let via_x_end = dx + (t + &one) + (t2 + &one);
        let via_y_end = dy + (&one - t) + (&one - t2);
        let via_both = (&two - &gap) + &two;
        direct.min(via_x_end).min(via_y_end).min(via_both)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinAmalgamReport {
    pub equal: bool,
    pub max_discrepancy: Scalar,
    pub classes: usize,
}

/// Compares the join metric with the amalgam `CX × Y ∪_{X×Y} X × CY` of the
/// two `l1` cone-product metrics, class by class.
///
/// The grid must contain `-1`, `0` and `1`; its nonnegative part is the cone
/// grid of `CX` and the negated nonpositive part that of `CY`. The amalgam
/// is formed at scale `1/4` (both pieces have diameter at most 4) and scaled back.
pub fn join_amalgam_equality(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    t_grid: &[Scalar],
) -> Result<JoinAmalgamReport> {
    let two = Scalar::from_int(2);
    x.require_diameter_at_most(&two, "join amalgam, X")?;
    y.require_diameter_at_most(&two, "join amalgam, Y")?;
    let join = JoinSpace::new(x.clone(), y.clone(), t_grid.to_vec())?;
    let zero_level = t_grid
        .iter()
        .position(Scalar::is_zero)
        .ok_or_else(|| Error::precondition("join amalgam grid must contain 0"))?;

    let pos: Vec<Scalar> = t_grid[zero_level..].to_vec();
    let neg: Vec<Scalar> = t_grid[..=zero_level].iter().rev().map(|t| -t).collect();
    let cx = ConeSpace::new(x.clone(), pos)?;
    let cy = ConeSpace::new(y.clone(), neg)?;
    let p = product_metric(&cone_metric(&cx), y, ProductNorm::L1);
    let q = product_metric(x, &cone_metric(&cy), ProductNorm::L1);
    let (ny, ncy) = (y.len(), cy.len());
    let p_index = |cone: usize, yy: usize| cone * ny + yy;
    let q_index = |xx: usize, cone: usize| xx * ncy + cone;

    let mut a = Vec::new();
    let mut b = Vec::new();
    for xx in 0..x.len() {
        for yy in 0..ny {
            a.push(p_index(cx.index(xx, 0), yy));
            b.push(q_index(xx, cy.index(yy, 0)));
        }
    }
    let quarter = Scalar::ratio(1, 4);
    let glued = amalgamated_union(&p.scaled(&quarter), &q.scaled(&quarter), &a, &b)?;
    let amalgam = glued.space.scaled(&Scalar::from_int(4));

    let offset = p.len();
    let class_in_amalgam = |c: &JoinClass| -> usize {
        let union_index = match *c {
            JoinClass::XEnd { x: xx } => offset + q_index(xx, cy.vertex()),
            JoinClass::YEnd { y: yy } => p_index(cx.vertex(), yy),
            JoinClass::Middle { x: xx, y: yy, level } => {
                if level >= zero_level {
                    p_index(cx.index(xx, level - zero_level), yy)
                } else {
                    offset + q_index(xx, cy.index(yy, zero_level - level))
                }
            }
        };
        glued.surjection.class_of(union_index)
    };

    let classes = join.classes();
    let target: Vec<usize> = classes.iter().map(class_in_amalgam).collect();
    let d3 = join_metric(&join);
    let mut max_discrepancy = Scalar::zero();
    for i in 0..classes.len() {
        for k in (i + 1)..classes.len() {
            let diff = (d3.d(i, k) - amalgam.d(target[i], target[k])).abs();
            max_discrepancy = max_discrepancy.max(diff);
        }
    }
    let mut distinct = target.clone();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(JoinAmalgamReport {
        equal: max_discrepancy.is_zero() && distinct.len() == amalgam.len(),
        max_discrepancy,
        classes: classes.len(),
    })
}
