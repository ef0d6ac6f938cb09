//! `build`: quotients and geometric constructions.

use metrize::combinators::{product_metric, ProductNorm};
use metrize::geometry::{
    cone_metric, euclidean_cone_metric, join_amalgam_equality, join_metric, mapping_cylinder_certificate,
    validate_grid, ConeSpace, CylinderSpace, JoinSpace,
};
use metrize::invlim::{telescope_metric, InverseSequenceTruncation};
use metrize::quotient::{adjunction_space, amalgamated_union, chain_metric, family_separation, quotient_by_discrete_family};
use metrize::{check_metric_axioms, ChainLength, FiniteMetricSpace, PartialMap, Scalar, Surjection, TotalMap};
use serde::Deserialize;
use serde_json::json;

use crate::input::{grid_or, load, maybe_rescale, require_metric, shaped, CmdResult, Fail};
use crate::report::{round15, Check, Report};
use crate::{BuildKind, Ctx};

const UNIT_GRID: &[(i64, i64)] = &[(0, 1), (1, 2), (1, 1)];
const SIGNED_GRID: &[(i64, i64)] = &[(-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1)];

#[derive(Deserialize)]
struct OneSpace {
    space: FiniteMetricSpace,
}

#[derive(Deserialize)]
struct TwoSpaces {
    x: FiniteMetricSpace,
    y: FiniteMetricSpace,
}

#[derive(Deserialize)]
struct CylinderInput {
    source: FiniteMetricSpace,
    target: FiniteMetricSpace,
    map: TotalMap,
}

#[derive(Deserialize)]
struct AdjunctionInput {
    x: FiniteMetricSpace,
    y: FiniteMetricSpace,
    map: PartialMap,
}

#[derive(Deserialize)]
struct AmalgamInput {
    x: FiniteMetricSpace,
    y: FiniteMetricSpace,
    a: Vec<usize>,
    b: Vec<usize>,
}

#[derive(Deserialize)]
struct QuotientInput {
    space: FiniteMetricSpace,
    surjection: Option<Surjection>,
    family: Option<Vec<Vec<usize>>>,
    /// Chain length; `d_∞` when absent.
    n: Option<usize>,
}

#[derive(Deserialize)]
struct TelescopeInput {
    #[serde(flatten)]
    truncation: InverseSequenceTruncation,
    a: Option<usize>,
    b: Option<usize>,
}

pub fn run(ctx: &Ctx, report: &mut Report, kind: BuildKind, path: &str, grid: Option<&str>, rescale: bool) -> CmdResult {
    match kind {
        BuildKind::Cone => cone(ctx, report, path, grid),
        BuildKind::Join => join(ctx, report, path, grid, rescale),
        BuildKind::Cylinder => cylinder(report, path, grid),
        BuildKind::Adjunction => adjunction(report, path, rescale),
        BuildKind::Amalgam => amalgam(report, path),
        BuildKind::Quotient => quotient(ctx, report, path),
        BuildKind::Telescope => telescope(report, path, grid),
        BuildKind::EuclideanCone => euclidean_cone(report, path, grid, rescale),
    }
}

fn metric_check(m: &FiniteMetricSpace) -> CmdResult<Check> {
    let audit = check_metric_axioms(m, false)?;
    Ok(Check::new("is_metric", audit.passed).witness_on_fail(audit.violations.first()))
}

/// Compares `closed` with `d_∞` of `product` collapsed by `class_of`.
fn oracle_check(closed: &FiniteMetricSpace, product: &FiniteMetricSpace, class_of: Vec<usize>) -> CmdResult<Check> {
    let f = Surjection::new(class_of)?;
    let dinf = chain_metric(product, &f, ChainLength::Infinite)?;
    let mismatch = closed.pairs().find(|&(i, j)| closed.d(i, j) != &dinf.values[i][j]);
    Ok(Check::new("oracle_collapsed_product", mismatch.is_none()).witness_on_fail(mismatch))
}

fn cone(ctx: &Ctx, report: &mut Report, path: &str, grid: Option<&str>) -> CmdResult {
    let input: OneSpace = load(report, path)?;
    require_metric(&input.space, "space")?;
    let g = grid_or(grid, UNIT_GRID)?;
    let c = ConeSpace::new(input.space.clone(), g.clone())?;
    let m = cone_metric(&c);
    report.push(metric_check(&m)?);
    let one = Scalar::one();
    let n = input.space.len();
    let vertex_ok = (0..g.len() - 1).all(|k| (0..n).all(|x| m.d(c.vertex(), c.index(x, k)) == &(&one - &g[k])));
    report.push(Check::new("vertex_row_is_one_minus_t", vertex_ok));
    let base_ok = (0..n).all(|x| (0..n).all(|y| m.d(c.index(x, 0), c.index(y, 0)) == input.space.d(x, y)));
    if g[0].is_zero() {
        report.push(Check::new("base_level_isometric", base_ok));
    }
    if ctx.oracle {
        let product = product_metric(&input.space, &FiniteMetricSpace::on_line(&g), ProductNorm::L1);
        let class_of = (0..product.len()).map(|p| c.index(p / g.len(), p % g.len())).collect();
        report.push(oracle_check(&m, &product, class_of)?);
    }
    report.set_output(json!({ "grid": g, "vertex": c.vertex(), "space": m }));
    Ok(())
}

fn join(ctx: &Ctx, report: &mut Report, path: &str, grid: Option<&str>, rescale: bool) -> CmdResult {
    let input: TwoSpaces = load(report, path)?;
    require_metric(&input.x, "x")?;
    require_metric(&input.y, "y")?;
    let two = Scalar::from_int(2);
    let (x, fx) = maybe_rescale(input.x, &two, rescale);
    let (y, fy) = maybe_rescale(input.y, &two, rescale);
    let g = grid_or(grid, SIGNED_GRID)?;
    let j = JoinSpace::new(x.clone(), y.clone(), g.clone())?;
    let m = join_metric(&j);
    report.push(metric_check(&m)?);
    if g.iter().any(Scalar::is_zero) && x.diameter() <= two && y.diameter() <= two {
        let amalgam = join_amalgam_equality(&x, &y, &g)?;
        report.push(
            Check::new("equals_amalgam_of_cone_products", amalgam.equal)
                .scalar("max_discrepancy", &amalgam.max_discrepancy),
        );
    } else {
        report.push(Check::info("equals_amalgam_of_cone_products").scalar("skipped", "grid lacks 0 or diameter exceeds 2"));
    }
    if ctx.oracle {
        let (nx, ny, last) = (x.len(), y.len(), g.len() - 1);
        let product = product_metric(&product_metric(&x, &y, ProductNorm::L1), &FiniteMetricSpace::on_line(&g), ProductNorm::L1);
        let class_of = (0..product.len())
            .map(|p| {
                let (pair, k) = (p / g.len(), p % g.len());
                let (a, b) = (pair / ny, pair % ny);
                match k {
                    0 => a,
                    k if k == last => nx + (last - 1) * nx * ny + b,
                    k => nx + (k - 1) * nx * ny + a * ny + b,
                }
            })
            .collect();
        report.push(oracle_check(&m, &product, class_of)?);
    }
    report.set_output(json!({ "grid": g, "rescale_factors": [fx, fy], "classes": j.classes(), "space": m }));
    Ok(())
}

fn cylinder(report: &mut Report, path: &str, grid: Option<&str>) -> CmdResult {
    let input: CylinderInput = load(report, path)?;
    require_metric(&input.source, "source")?;
    require_metric(&input.target, "target")?;
    let g = grid_or(grid, UNIT_GRID)?;
    let c = CylinderSpace::new(input.source, input.target, input.map, g.clone())?;
    let cert = mapping_cylinder_certificate(&c)?;
    report.push(metric_check(&cert.space)?);
    report.push(Check::new("d3_equals_dinf", cert.d3_equals_dinf));
    report.push(
        Check::new("equals_adjunction_quotient", cert.equals_adjunction).scalar("max_discrepancy", &cert.max_discrepancy),
    );
    report.set_output(json!({ "grid": g, "first_target_class": c.first_target_class(), "space": cert.space }));
    Ok(())
}

fn adjunction(report: &mut Report, path: &str, rescale: bool) -> CmdResult {
    let input: AdjunctionInput = load(report, path)?;
    require_metric(&input.x, "x")?;
    require_metric(&input.y, "y")?;
    let one = Scalar::one();
    let (x, fx) = maybe_rescale(input.x, &one, rescale);
    let (y, fy) = maybe_rescale(input.y, &one, rescale);
    let r = adjunction_space(&x, &y, &input.map)?;
    report.push(Check::new("d3_equals_dinf", r.d3_equals_dinf));
    report.push(Check::new("is_metric", r.is_metric));
    report.push(Check::new("y_embeds_isometrically", r.embedded_y));
    report.push(Check::new("free_points_separated", r.free_points_separated));
    report.push(Check::new("identification_lipschitz", r.identification_lipschitz));
    report.set_output(json!({
        "rescale_factors": [fx, fy],
        "first_y_class": r.first_y_class,
        "surjection": r.surjection,
        "space": r.space,
    }));
    Ok(())
}

fn amalgam(report: &mut Report, path: &str) -> CmdResult {
    let input: AmalgamInput = load(report, path)?;
    require_metric(&input.x, "x")?;
    require_metric(&input.y, "y")?;
    let q = amalgamated_union(&input.x, &input.y, &input.a, &input.b)?;
    report.push(Check::new("d2_equals_dinf", q.equals_dinf));
    report.push(Check::new("is_metric", q.is_metric));
    let nx = input.x.len();
    let x_embeds = (0..nx).all(|i| (0..nx).all(|j| q.space.d(i, j) == input.x.d(i, j)));
    let y_embeds = (0..input.y.len()).all(|i| {
        (0..input.y.len()).all(|j| q.space.d(q.surjection.class_of(nx + i), q.surjection.class_of(nx + j)) == input.y.d(i, j))
    });
    report.push(Check::new("x_embeds_isometrically", x_embeds));
    report.push(Check::new("y_embeds_isometrically", y_embeds));
    report.set_output(json!({ "surjection": q.surjection, "space": q.space }));
    Ok(())
}

/// `d_∞` of a quotient from scratch: block distances, then Floyd–Warshall.
fn brute_dinf(m: &FiniteMetricSpace, f: &Surjection) -> Vec<Vec<Scalar>> {
    let k = f.class_count();
    let mut d: Vec<Vec<Option<Scalar>>> = vec![vec![None; k]; k];
    for x in 0..m.len() {
        for y in 0..m.len() {
            let (a, b) = (f.class_of(x), f.class_of(y));
            let v = if a == b { Scalar::zero() } else { m.d(x, y).clone() };
            if d[a][b].as_ref().map_or(true, |old| v < *old) {
                d[a][b] = Some(v);
            }
        }
    }
    let mut d: Vec<Vec<Scalar>> = d.into_iter().map(|r| r.into_iter().map(|v| v.expect("nonempty class")).collect()).collect();
    for z in 0..k {
        for a in 0..k {
            for b in 0..k {
                let via = &d[a][z] + &d[z][b];
                if via < d[a][b] {
                    d[a][b] = via;
                }
            }
        }
    }
    d
}

fn quotient(ctx: &Ctx, report: &mut Report, path: &str) -> CmdResult {
    let input: QuotientInput = load(report, path)?;
    shaped(&input.space, "space")?;
    if !check_metric_axioms(&input.space, true)?.passed {
        return Err(Fail::math("space is not a pseudo-metric"));
    }
    match (input.surjection, input.family) {
        (Some(f), None) => {
            if f.source_len() != input.space.len() {
                return Err(Fail::input("surjection and space have different sizes"));
            }
            let length = input.n.map_or(ChainLength::Infinite, ChainLength::Finite);
            let cm = chain_metric(&input.space, &f, length)?;
            report.push(Check::new("dn_equals_dinf_iff_triangle", cm.lemma_holds()));
            report.push(
                Check::info("triangle_valid")
                    .scalar("holds", cm.triangle_valid)
                    .scalar("witness", cm.triangle_witness),
            );
            report.push(Check::info("equals_dinf").scalar("holds", cm.equals_dinf));
            report.push(Check::info("positive").scalar("holds", cm.is_metric));
            if ctx.oracle {
                let fast = chain_metric(&input.space, &f, ChainLength::Infinite)?;
                report.push(Check::new("oracle_dinf_agrees", fast.values == brute_dinf(&input.space, &f)));
            }
            report.set_output(json!({ "n": length.to_string(), "space": cm.to_space(f.class_labels(&input.space)) }));
        }
        (None, Some(family)) => {
            let q = quotient_by_discrete_family(&input.space, &family)?;
            report.push(Check::new("d2_equals_dinf", q.equals_dinf));
            report.push(Check::new("is_metric", q.is_metric));
            if ctx.oracle {
                let trunc = family_separation(&input.space, &family);
                report.push(Check::info("truncation").scalar("epsilon", trunc));
            }
            report.set_output(json!({ "surjection": q.surjection, "space": q.space }));
        }
        _ => return Err(Fail::input("quotient input needs exactly one of `surjection` and `family`")),
    }
    Ok(())
}

fn telescope(report: &mut Report, path: &str, grid: Option<&str>) -> CmdResult {
    let input: TelescopeInput = load(report, path)?;
    let t = input.truncation;
    for (i, level) in t.levels().iter().enumerate() {
        require_metric(level, &format!("level {i}"))?;
    }
    let g = grid_or(grid, UNIT_GRID)?;
    let (a, b) = (input.a.unwrap_or(0), input.b.unwrap_or(t.depth()));
    let tel = telescope_metric(&t, a, b, &g)?;
    for stage in &tel.stages {
        report.push(Check::new(format!("stage_{}_d3_equals_dinf", stage.bond), stage.equals_dinf));
        report.push(Check::new(format!("stage_{}_is_metric", stage.bond), stage.is_metric));
    }
    report.push(metric_check(&tel.space)?);
    report.set_output(json!({ "grid": g, "segment": [a, b], "level_classes": tel.level_classes, "space": tel.space }));
    Ok(())
}

fn euclidean_cone(report: &mut Report, path: &str, grid: Option<&str>, rescale: bool) -> CmdResult {
    let input: OneSpace = load(report, path)?;
    require_metric(&input.space, "space")?;
    // 3 is the largest integer below pi, the diameter the construction allows
    let (base, factor) = maybe_rescale(input.space, &Scalar::from_int(3), rescale);
    let g = grid_or(grid, UNIT_GRID)?;
    validate_grid(&g, &Scalar::zero(), &Scalar::one())?;
    let cone = euclidean_cone_metric(&base, &g)?;
    let n = base.len();
    let mut worst_level = 0.0f64;
    for k in 1..g.len() {
        let t = g[k].to_f64();
        for x in 0..n {
            for y in 0..n {
                let expected = 2.0 * t * (base.d(x, y).to_f64() / 2.0).sin();
                worst_level = worst_level.max((cone.dist[cone.index(x, k)][cone.index(y, k)] - expected).abs());
            }
        }
    }
    report.push(Check::new("same_level_identity", worst_level <= 1e-12).scalar("max_error", round15(worst_level)));
    let vertex_ok = (1..g.len()).all(|k| (0..n).all(|x| (cone.dist[0][cone.index(x, k)] - g[k].to_f64()).abs() <= 1e-12));
    report.push(Check::new("vertex_distance_is_t", vertex_ok));
    let size = cone.dist.len();
    let mut worst_triangle = 0.0f64;
    for a in 0..size {
        for b in 0..size {
            for c in 0..size {
                worst_triangle = worst_triangle.max(cone.dist[a][c] - cone.dist[a][b] - cone.dist[b][c]);
            }
        }
    }
    report.push(Check::new("triangle_within_tolerance", worst_triangle <= 1e-9).scalar("max_excess", round15(worst_triangle)));
    let dist: Vec<Vec<f64>> = cone.dist.iter().map(|r| r.iter().map(|&v| round15(v)).collect()).collect();
    report.set_output(json!({ "grid": g, "rescale_factor": factor, "vertex": 0, "base_len": n, "dist": dist }));
    Ok(())
}
