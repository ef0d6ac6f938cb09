//! Kuratowski embedding, McShane extension, and extension of metrics from a subset.

use crate::error::{Error, Result};
use crate::quotient::{chain_metric, ChainLength, Surjection};
use crate::scalar::Scalar;
use crate::sequence::SequencePoint;
use crate::space::{check_metric_axioms, FiniteMetricSpace};

/// `x ↦ (d(x, p))_p` into sequence space with the sup norm; coordinate `k` is point `k`.
pub fn kuratowski_embed(m: &FiniteMetricSpace) -> Result<Vec<SequencePoint>> {
    m.require_diameter_at_most(&Scalar::one(), "Kuratowski embedding")?;
    Ok((0..m.len())
        .map(|x| SequencePoint::from_prefix(&m.matrix()[x]))
        .collect())
}

/// Smallest `L` with `|g(a) − g(b)| ≤ L·d(a, b)` on `subset`, or an error if
/// two distinct points at distance 0 carry different values.
pub fn lipschitz_constant(x: &FiniteMetricSpace, subset: &[usize], g: &[Scalar]) -> Result<Scalar> {
    let mut best = Scalar::zero();
    for i in 0..subset.len() {
        for j in (i + 1)..subset.len() {
            let rise = (&g[i] - &g[j]).abs();
            let run = x.d(subset[i], subset[j]);
            if run.is_zero() {
                if !rise.is_zero() {
                    return Err(Error::precondition(format!(
                        "values differ at points {} and {} at distance 0",
                        x.label(subset[i]),
                        x.label(subset[j])
                    )));
                }
                continue;
            }
            best = best.max(rise / run);
        }
    }
    Ok(best)
}

/// Extends `g` (values on `subset`, in order) to all of `x` by
/// `g'(p) = min_a (g(a) + L·d(p, a))`.
pub fn mcshane_extend(x: &FiniteMetricSpace, subset: &[usize], g: &[Scalar], lipschitz: &Scalar) -> Result<Vec<Scalar>> {
    if subset.is_empty() || subset.len() != g.len() {
        return Err(Error::structural("McShane extension needs one value per subset point"));
    }
    for i in 0..subset.len() {
        for j in (i + 1)..subset.len() {
            let rise = (&g[i] - &g[j]).abs();
            if rise > lipschitz * x.d(subset[i], subset[j]) {
                return Err(Error::precondition(format!(
                    "function is not {lipschitz}-Lipschitz on ({}, {})",
                    x.label(subset[i]),
                    x.label(subset[j])
                )));
            }
        }
    }
    Ok((0..x.len())
        .map(|p| {
            subset
                .iter()
                .zip(g)
                .map(|(&a, ga)| ga + lipschitz * x.d(p, a))
                .min()
                .expect("nonempty subset")
        })
        .collect())
}

/// Extends a metric `d` given on `subset` (indexed in subset order) to a
/// metric on all of `x` that restricts to `d` exactly.
///
/// The extension is the sup-norm pairing of two pseudometrics: the
/// coordinatewise McShane extension of the Kuratowski embedding of
/// `(subset, d)`, capped at `diam d`, and the `d_2` metric of `x` with
/// `subset` collapsed, scaled to diameter 1. `d` may have diameter up to 2.
pub fn extend_metric(x: &FiniteMetricSpace, subset: &[usize], d: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    if subset.is_empty() {
        return Err(Error::precondition("cannot extend from an empty subset"));
    }
    if d.len() != subset.len() {
        return Err(Error::structural("subset metric has the wrong number of points"));
    }
    if subset.iter().any(|&a| a >= x.len()) {
        return Err(Error::structural("subset index out of range"));
    }
    let audit = check_metric_axioms(d, false)?;
    if let Some(v) = audit.violations.first() {
        return Err(Error::precondition(format!(
            "metric on the subset fails {} at {:?}",
            v.axiom, v.witness
        )));
    }
    d.require_diameter_at_most(&Scalar::from_int(2), "metric extension")?;
    if !check_metric_axioms(x, false)?.passed {
        return Err(Error::precondition("ambient space is not a metric space"));
    }

    let cap = d.diameter();
    let mut lipschitz = Scalar::zero();
    for (i, j) in d.pairs() {
        lipschitz = lipschitz.max(d.d(i, j) / x.d(subset[i], subset[j]));
    }
    let coords: Vec<Vec<Scalar>> = (0..subset.len())
        .map(|k| {
            let g: Vec<Scalar> = (0..subset.len()).map(|b| d.d(b, k).clone()).collect();
            mcshane_extend(x, subset, &g, &lipschitz)
                .expect("Kuratowski coordinates are Lipschitz")
                .into_iter()
                .map(|v| v.min(cap.clone()))
                .collect()
        })
        .collect();

    let collapse = Surjection::from_blocks(x.len(), &[subset.to_vec()])?;
    let d2 = chain_metric(x, &collapse, ChainLength::Finite(2))?.values;
    let quotient_diam = d2.iter().flatten().max().cloned().unwrap_or_else(Scalar::zero);

    Ok(FiniteMetricSpace::from_fn(x.labels().to_vec(), |p, r| {
        let mut best = coords
            .iter()
            .map(|c| (&c[p] - &c[r]).abs())
            .max()
            .unwrap_or_else(Scalar::zero);
        if quotient_diam.is_positive() {
            let collapsed = &d2[collapse.class_of(p)][collapse.class_of(r)] / &quotient_diam;
            best = best.max(collapsed);
        }
        best
    }))
}
