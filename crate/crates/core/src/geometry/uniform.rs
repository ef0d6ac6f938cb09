use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::TotalMap;
use crate::modulus::{continuity_modulus, ModulusTable};
use crate::scalar::Scalar;
use crate::space::FiniteMetricSpace;

/// A modulus `δ` on a finite family of maps, with its certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformModulus {
    pub epsilon: Scalar,
    pub deltas: Vec<Scalar>,
    /// `n` with the map in `U_{n+1} ∖ U_n`; `-1` for members of `U_0`.
    pub bands: Vec<i64>,
    /// Every map is `(δ(p), ε)`-continuous.
    pub continuity_ok: bool,
    /// `|δ(p) − δ(p')| ≤ (6/ε)·d(p, p')` for all pairs.
    pub lipschitz_ok: bool,
    pub lipschitz_witness: Option<(usize, usize)>,
}

/// Builds `δ` on the family with the nested-neighborhood construction.
///
/// `Z_n` holds the `(2^-n, ε/3)`-continuous maps and `U_n` is the open
/// `(1 − 2^{-n-1})·ε/3`-neighborhood of `Z_n` inside the family, in the sup
/// distance. On `U_{n+1} ∖ U_n` the value is
/// `δ(p) = 2^{-n-1} − min((3/ε)·d(p, U_n), 2^{-n-2})`, and `δ = 1/2` on `U_0`.
pub fn uniform_modulus(
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    maps: &[TotalMap],
    epsilon: &Scalar,
) -> Result<UniformModulus> {
    if !epsilon.is_positive() {
        return Err(Error::precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    for (k, f) in maps.iter().enumerate() {
        if f.len() != source.len() {
            return Err(Error::structural(format!("map {k} is not defined on every source point")));
        }
        f.check_target(target.len())?;
    }
    let m = maps.len();
    let tables: Vec<ModulusTable> = maps.iter().map(|f| continuity_modulus(source, target, f)).collect();
    let dist: Vec<Vec<Scalar>> = (0..m)
        .map(|i| (0..m).map(|j| maps[i].sup_distance(&maps[j], target)).collect())
        .collect();
    let third = epsilon / Scalar::from_int(3);
    let scale = Scalar::from_int(3) / epsilon;

    let mut bands: Vec<Option<i64>> = vec![None; m];
    let mut deltas = vec![Scalar::zero(); m];
    let mut previous: Vec<usize> = Vec::new();
    let mut n: i64 = -1;
    while bands.iter().any(Option::is_none) {
        let level = n + 1;
        let z: Vec<usize> = (0..m)
            .filter(|&p| tables[p].holds(&Scalar::pow2_neg(level), &third))
            .collect();
        let radius = (Scalar::one() - Scalar::pow2_neg(level + 1)) * &third;
        let u: Vec<usize> = (0..m).filter(|&p| z.iter().any(|&q| dist[p][q] < radius)).collect();
        for &p in &u {
            if bands[p].is_some() {
                continue;
            }
            bands[p] = Some(n);
            // with U_n empty the distance is infinite and the cap applies
            deltas[p] = if previous.is_empty() {
                Scalar::pow2_neg(n + 2)
            } else {
                let gap = previous.iter().map(|&q| dist[p][q].clone()).min().expect("nonempty");
                Scalar::pow2_neg(n + 1) - (&scale * gap).min(Scalar::pow2_neg(n + 2))
            };
        }
        previous = u;
        n += 1;
        if n > 4096 {
            return Err(Error::precondition("family does not stabilize"));
        }
    }

    let continuity_ok = (0..m).all(|p| tables[p].holds(&deltas[p], epsilon));
    let bound = Scalar::from_int(6) / epsilon;
    let mut lipschitz_witness = None;
    'scan: for i in 0..m {
        for j in (i + 1)..m {
            if (&deltas[i] - &deltas[j]).abs() > &bound * &dist[i][j] {
                lipschitz_witness = Some((i, j));
                break 'scan;
            }
        }
    }
    Ok(UniformModulus {
        epsilon: epsilon.clone(),
        deltas,
        bands: bands.into_iter().map(|b| b.expect("assigned")).collect(),
        continuity_ok,
        lipschitz_ok: lipschitz_witness.is_none(),
        lipschitz_witness,
    })
}
