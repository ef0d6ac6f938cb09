//! Uniform embedding of a finite metric space into sequence space through
//! point-finite refinements of ball covers.

use serde::{Deserialize, Serialize};

use crate::covers::{ball_cover, lebesgue_number, point_finite_refinement, Cover};
use crate::error::{Error, Result};
use crate::maps::TotalMap;
use crate::modulus::{continuity_modulus, ModulusTable};
use crate::scalar::{Extended, Scalar};
use crate::sequence::SequencePoint;
use crate::space::FiniteMetricSpace;

/// Data for one scale `n` of the embedding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingLevel {
    pub n: usize,
    /// Members `V_{n,i}` of the point-finite refinement of the `2^-n` ball cover.
    pub cover: Cover,
    pub lebesgue: Extended,
    /// Cap on the level-`n` coordinates: `min(2^-n, L/2)`, or `2^-n` when `L` is infinite.
    pub lambda: Scalar,
    /// Sequence index of the coordinate `(n, 0)`.
    pub offset: u64,
}

/// One checked implication `d(F(x), F(y)) ≤ λ_n/2 ⟹ d(x, y) ≤ 2^{1-n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub n: usize,
    pub half_lambda: Scalar,
    pub threshold: Scalar,
    pub holds: bool,
    pub witness: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCertificate {
    /// Continuity modulus of `F` into sup-norm sequence space.
    pub continuity: ModulusTable,
    pub separation: Vec<SeparationRow>,
    /// Level-`n` coordinates lie in `[0, 2^-n]`.
    pub coordinate_bound_holds: bool,
    /// Images are pairwise distinct.
    pub injective: bool,
    /// Injectivity follows from the rows alone: they all hold and the
    /// smallest distance exceeds the finest threshold.
    pub injective_from_rows: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AharoniEmbedding {
    pub points: Vec<SequencePoint>,
    pub levels: Vec<EmbeddingLevel>,
    pub certificate: EmbeddingCertificate,
}

/// `d(x, M ∖ V)`, taken as 0 when `V = M`: such a member separates no pair.
fn distance_to_complement(m: &FiniteMetricSpace, x: usize, member: &[usize]) -> Scalar {
    let outside: Vec<usize> = (0..m.len()).filter(|p| member.binary_search(p).is_err()).collect();
    m.dist_to_set(x, &outside).unwrap_or_else(Scalar::zero)
}

/// Builds `F(x)_{(n,i)} = min{d(x, M ∖ V_{n,i}), λ_n}` for `n = 1..=depth`.
///
/// At scale `n` the `2^-n` ball cover is refined through the `2^-n/9` ball
/// cover, whose double strong star-refinement property holds for any metric.
pub fn aharoni_embed(m: &FiniteMetricSpace, depth: usize) -> Result<AharoniEmbedding> {
    m.require_diameter_at_most(&Scalar::one(), "Aharoni embedding")?;
    let mut levels = Vec::with_capacity(depth);
    let mut offset = 0u64;
    for n in 1..=depth {
        let radius = Scalar::pow2_neg(n as i64);
        let coarse = ball_cover(m, &radius)?;
        let fine = ball_cover(m, &(&radius / Scalar::from_int(9)))?;
        let refinement = point_finite_refinement(&coarse, &fine)
            .map_err(|e| Error::precondition(format!("refinement at level {n} failed: {e}")))?;
        if !(refinement.refines_target && refinement.covers_ground) {
            return Err(Error::precondition(format!("refinement at level {n} is not a refining cover")));
        }
        let lebesgue = lebesgue_number(&refinement.cover, m)?;
        let lambda = match &lebesgue {
            Extended::Finite(l) => radius.clone().min(l / Scalar::from_int(2)),
            Extended::Infinite => radius.clone(),
        };
        let members = refinement.cover.len() as u64;
        levels.push(EmbeddingLevel { n, cover: refinement.cover, lebesgue, lambda, offset });
        offset += members;
    }

    let points: Vec<SequencePoint> = (0..m.len())
        .map(|x| {
            let mut p = SequencePoint::zero();
            for level in &levels {
                for (i, member) in level.cover.sets().iter().enumerate() {
                    let value = distance_to_complement(m, x, member).min(level.lambda.clone());
                    p = p.with(level.offset + i as u64, value);
                }
            }
            p
        })
        .collect();

    let certificate = certify(m, &points, &levels);
    Ok(AharoniEmbedding { points, levels, certificate })
}

fn certify(m: &FiniteMetricSpace, points: &[SequencePoint], levels: &[EmbeddingLevel]) -> EmbeddingCertificate {
    let image = FiniteMetricSpace::from_fn(m.labels().to_vec(), |i, j| points[i].sup_distance(&points[j]));
    let continuity = continuity_modulus(m, &image, &TotalMap::identity(m.len()));
    let two = Scalar::from_int(2);
    let separation: Vec<SeparationRow> = levels
        .iter()
        .map(|level| {
            let half_lambda = &level.lambda / &two;
            let threshold = Scalar::pow2_neg(level.n as i64 - 1);
            let witness = m
                .pairs()
                .find(|&(i, j)| image.d(i, j) <= &half_lambda && m.d(i, j) > &threshold);
            SeparationRow { n: level.n, half_lambda, threshold, holds: witness.is_none(), witness }
        })
        .collect();
    let coordinate_bound_holds = levels.iter().all(|level| {
        let cap = Scalar::pow2_neg(level.n as i64);
        points.iter().all(|p| {
            (0..level.cover.len() as u64).all(|i| {
                let v = p.get(level.offset + i);
                !v.is_negative() && *v <= cap
            })
        })
    });
    let injective = image.pairs().all(|(i, j)| image.d(i, j).is_positive());
    let injective_from_rows = separation.iter().all(|r| r.holds)
        && match (separation.last(), m.min_positive_distance()) {
            (Some(r), Some(d)) => d > r.threshold && m.pairs().all(|(i, j)| m.d(i, j).is_positive()),
            (_, None) => true,
            (None, Some(_)) => false,
        };
    EmbeddingCertificate { continuity, separation, coordinate_bound_holds, injective, injective_from_rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn one_point_goes_to_zero() {
        let e = aharoni_embed(&FiniteMetricSpace::singleton(), 3).unwrap();
        assert_eq!(e.points, vec![SequencePoint::zero()]);
        assert!(e.certificate.separation.iter().all(|r| r.holds));
        assert!(e.certificate.injective && e.certificate.injective_from_rows);
    }

    #[test]
    fn two_points_at_distance_one() {
        let m = FiniteMetricSpace::uniform(2, q(1, 1));
        let e = aharoni_embed(&m, 2).unwrap();
        assert!(e.certificate.separation.iter().all(|r| r.holds));
        assert!(e.certificate.coordinate_bound_holds);
        assert!(e.certificate.injective);
        assert_ne!(e.points[0], e.points[1]);
        assert_eq!(e.levels[0].lambda, q(1, 2));
    }

    #[test]
    fn line_sample() {
        let m = FiniteMetricSpace::on_line(&[q(0, 1), q(1, 16), q(1, 4), q(5, 8), q(1, 1)]);
        let e = aharoni_embed(&m, 4).unwrap();
        let c = &e.certificate;
        assert!(c.separation.iter().all(|r| r.holds), "{:?}", c.separation);
        assert!(c.coordinate_bound_holds && c.injective && c.continuity.is_monotone());
        for (i, j) in m.pairs() {
            let d = e.points[i].sup_distance(&e.points[j]);
            assert!(c.continuity.holds(m.d(i, j), &d));
        }
    }

    #[test]
    fn diameter_precondition() {
        let m = FiniteMetricSpace::uniform(2, q(3, 2));
        assert!(matches!(aharoni_embed(&m, 2), Err(Error::Precondition(_))));
    }
}
