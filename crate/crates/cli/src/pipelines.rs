//! `check`, `metrize` and `embed`.

use metrize::aharoni::aharoni_embed;
use metrize::covers::{au_metrize, validate_fundamental_sequence};
use metrize::sequence::q0_retract;
use metrize::space::Axiom;
use metrize::{check_metric_axioms, FiniteMetricSpace, FundamentalSequence, Scalar};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::input::{load, maybe_rescale, require_metric, shaped, CmdResult};
use crate::report::{Check, Report};
use crate::Ctx;

pub fn check(report: &mut Report, path: &str, pseudo: bool) -> CmdResult {
    let m: FiniteMetricSpace = load(report, path)?;
    shaped(&m, "space")?;
    let audit = check_metric_axioms(&m, pseudo)?;
    let axioms = [Axiom::ZeroDiagonal, Axiom::NonNegativity, Axiom::Symmetry, Axiom::Positivity, Axiom::Triangle];
    for axiom in axioms {
        if pseudo && axiom == Axiom::Positivity {
            continue;
        }
        let check = match audit.violation(axiom) {
            None => Check::new(axiom.to_string(), true),
            Some(v) => Check::new(axiom.to_string(), false)
                .witness(&v.witness)
                .scalar("lhs", &v.lhs)
                .scalar("rhs", &v.rhs)
                .scalar("count", v.count),
        };
        report.push(check);
    }
    report.set_output(json!({ "points": m.len(), "diameter": m.diameter(), "axioms": audit }));
    Ok(())
}

/// `f` recomputed from cover membership alone.
fn brute_pre_distance(seq: &FundamentalSequence, x: usize, y: usize) -> Scalar {
    let mut best = Scalar::one();
    for (k, cover) in seq.covers.iter().enumerate() {
        let level = k + 1;
        if level % 2 == 0 && cover.sets().iter().any(|u| u.contains(&x) && u.contains(&y)) {
            best = best.min(Scalar::pow2_neg(level as i64 / 2));
        }
    }
    best
}

pub fn metrize(ctx: &Ctx, report: &mut Report, path: &str) -> CmdResult {
    let seq: FundamentalSequence = load(report, path)?;
    let verdict = validate_fundamental_sequence(&seq)?;
    report.push(Check::new("fundamental_sequence", verdict.witness.is_none()).witness_on_fail(&verdict.witness));
    if verdict.witness.is_some() {
        return Ok(());
    }
    let out = au_metrize(&seq)?;
    report.push(
        Check::new("d_le_f_le_2d", out.sandwich_holds)
            .witness_on_fail(out.sandwich_witness)
            .scalar("pairs", out.space.pairs().count()),
    );
    report.push(Check::new("even_covers_fine", out.even_covers_fine));
    report.push(Check::new("small_sets_in_stars", out.small_sets_in_stars));
    report.push(Check::new("small_sets_refine_odd", out.small_sets_refine_odd));
    let mut even = Check::info("small_sets_refine_even");
    even = even.scalar("holds", out.small_sets_refine_even);
    report.push(even);
    report.push(Check::new("is_metric", check_metric_axioms(&out.space, false)?.passed));

    if let Some(seed) = ctx.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shuffled = FundamentalSequence {
            covers: seq
                .covers
                .iter()
                .map(|c| {
                    let mut order: Vec<usize> = (0..c.len()).collect();
                    order.shuffle(&mut rng);
                    c.reordered(&order)
                })
                .collect(),
        };
        let again = au_metrize(&shuffled)?;
        report.push(Check::new("member_order_invariant", again.space == out.space));
    }
    if ctx.oracle {
        let n = seq.ground();
        let mismatch = (0..n)
            .flat_map(|x| ((x + 1)..n).map(move |y| (x, y)))
            .find(|&(x, y)| brute_pre_distance(&seq, x, y) != out.pre_distance[x][y]);
        report.push(Check::new("oracle_pre_distance", mismatch.is_none()).witness_on_fail(mismatch));
    }
    report.set_output(json!({ "space": out.space, "pre_distance": out.pre_distance }));
    Ok(())
}

pub fn embed(report: &mut Report, path: &str, depth: usize, rescale: bool) -> CmdResult {
    let m: FiniteMetricSpace = load(report, path)?;
    require_metric(&m, "space")?;
    let (m, factor) = maybe_rescale(m, &Scalar::one(), rescale);
    let e = aharoni_embed(&m, depth)?;
    let cert = &e.certificate;
    for row in &cert.separation {
        report.push(
            Check::new(format!("separation_level_{}", row.n), row.holds)
                .witness_on_fail(row.witness)
                .scalar("half_lambda", &row.half_lambda)
                .scalar("threshold", &row.threshold),
        );
    }
    report.push(Check::new("coordinate_bounds", cert.coordinate_bound_holds));
    report.push(Check::new("injective", cert.injective));
    report.push(Check::info("injective_from_rows").scalar("holds", cert.injective_from_rows));
    report.push(Check::new("continuity_modulus_monotone", cert.continuity.is_monotone()));
    let fixed = e.points.iter().map(q0_retract).collect::<Result<Vec<_>, _>>()?;
    report.push(Check::new("image_in_q0", fixed == e.points));
    report.set_output(json!({
        "rescale_factor": factor,
        "points": e.points,
        "levels": e.levels,
        "continuity": cert.continuity,
    }));
    Ok(())
}
