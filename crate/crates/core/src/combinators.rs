//! Products, disjoint unions, weighted sups and the Hausdorff hyperspace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::FiniteMetricSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductNorm {
    L1,
    /// Squared Euclidean distance, so values stay rational. The result is not
    /// itself a metric; take square roots via [`l2_float_view`].
    L2Squared,
    Linf,
}

/// Product `M × N`, points ordered row-major as `(m, n)`.
pub fn product_metric(m: &FiniteMetricSpace, n: &FiniteMetricSpace, norm: ProductNorm) -> FiniteMetricSpace {
    let k = n.len();
    let labels = m
        .labels()
        .iter()
        .flat_map(|a| n.labels().iter().map(move |b| format!("({a},{b})")))
        .collect();
    FiniteMetricSpace::from_fn(labels, |p, r| {
        let (a, b) = (m.d(p / k, r / k), n.d(p % k, r % k));
        match norm {
            ProductNorm::L1 => a + b,
            ProductNorm::L2Squared => a * a + b * b,
            ProductNorm::Linf => a.clone().max(b.clone()),
        }
    })
}

/// Euclidean distances of an `L2Squared` product, as floats.
pub fn l2_float_view(squared: &FiniteMetricSpace) -> Vec<Vec<f64>> {
    squared
        .matrix()
        .iter()
        .map(|row| row.iter().map(|d| d.to_f64().sqrt()).collect())
        .collect()
}

/// `M ⊔ N` with every cross distance equal to 1. Labels are prefixed `L:` and `R:`.
pub fn disjoint_union_metric(m: &FiniteMetricSpace, n: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    let one = Scalar::one();
    m.require_diameter_at_most(&one, "disjoint union, left summand")?;
    n.require_diameter_at_most(&one, "disjoint union, right summand")?;
    Ok(union_with_cross(m, n, &one))
}

/// Disjoint union with a fixed cross distance and no diameter check.
///
/// This is a metric whenever both diameters are at most twice `cross`.
pub(crate) fn union_with_cross(m: &FiniteMetricSpace, n: &FiniteMetricSpace, cross: &Scalar) -> FiniteMetricSpace {
    let split = m.len();
    let labels = m
        .labels()
        .iter()
        .map(|a| format!("L:{a}"))
        .chain(n.labels().iter().map(|b| format!("R:{b}")))
        .collect();
    FiniteMetricSpace::from_fn(labels, |i, j| match (i < split, j < split) {
        (true, true) => m.d(i, j).clone(),
        (false, false) => n.d(i - split, j - split).clone(),
        _ => cross.clone(),
    })
}

/// `max_i 2^{-(i+1)} d_i(a_i, b_i)`; level `k` of the slice has weight `2^{-(k+1)}`.
pub fn weighted_sup_distance(levels: &[FiniteMetricSpace], a: &[usize], b: &[usize]) -> Scalar {
    levels
        .iter()
        .enumerate()
        .map(|(k, lv)| lv.d(a[k], b[k]) * Scalar::pow2_neg(k as i64 + 1))
        .max()
        .unwrap_or_else(Scalar::zero)
}

/// Weighted sup metric restricted to the given tuples.
pub fn weighted_sup_on(levels: &[FiniteMetricSpace], tuples: &[Vec<usize>]) -> FiniteMetricSpace {
    let labels = tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().enumerate().map(|(k, &x)| levels[k].label(x)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    FiniteMetricSpace::from_fn(labels, |i, j| weighted_sup_distance(levels, &tuples[i], &tuples[j]))
}

pub const WEIGHTED_SUP_CAP: usize = 4096;

/// Weighted sup metric on the full product of `levels` (indexing from 1).
pub fn weighted_sup_metric(levels: &[FiniteMetricSpace]) -> Result<FiniteMetricSpace> {
    let one = Scalar::one();
    for (k, lv) in levels.iter().enumerate() {
        lv.require_diameter_at_most(&one, &format!("weighted sup, level {}", k + 1))?;
    }
    let size = levels.iter().try_fold(1usize, |acc, lv| acc.checked_mul(lv.len()));
    match size {
        Some(s) if s <= WEIGHTED_SUP_CAP => {}
        _ => {
            return Err(Error::CapExceeded {
                what: "weighted sup product".into(),
                size: size.unwrap_or(usize::MAX),
                cap: WEIGHTED_SUP_CAP,
            })
        }
    }
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    for lv in levels {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (0..lv.len()).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    Ok(weighted_sup_on(levels, &tuples))
}

pub const HAUSDORFF_CAP: usize = 12;

/// Nonempty subsets of `0..n` as bitmasks, in increasing mask order.
pub fn nonempty_subsets(n: usize) -> impl Iterator<Item = u32> {
    1..(1u32 << n)
}

fn mask_members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

/// `min(d_H, 1)` on the nonempty subsets of `m` (mask order), with `cap` bounding `|m|`.
pub fn hausdorff_hyperspace(m: &FiniteMetricSpace, cap: usize) -> Result<FiniteMetricSpace> {
    let n = m.len();
    let cap = cap.min(20);
    if n > cap {
        return Err(Error::CapExceeded {
            what: "hyperspace base".into(),
            size: n,
            cap,
        });
    }
    let masks: Vec<u32> = nonempty_subsets(n).collect();
    // to_set[x][s] = d(x, subset s)
    let to_set: Vec<Vec<Scalar>> = (0..n)
        .map(|x| {
            masks
                .iter()
                .map(|&s| mask_members(s).map(|a| m.d(x, a)).min().cloned().expect("nonempty"))
                .collect()
        })
        .collect();
    let one = Scalar::one();
    let labels = masks
        .iter()
        .map(|&s| {
            let parts: Vec<&str> = mask_members(s).map(|i| m.label(i)).collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    Ok(FiniteMetricSpace::from_fn(labels, |i, j| {
        let (a, b) = (masks[i], masks[j]);
        let one_way = mask_members(a).map(|x| &to_set[x][j]);
        let other_way = mask_members(b).map(|x| &to_set[x][i]);
        let h = one_way.chain(other_way).max().cloned().unwrap_or_else(Scalar::zero);
        h.min(one.clone())
    }))
}
