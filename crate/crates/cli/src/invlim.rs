//! `invlim`: threads, Mittag-Leffler, convergence, separation and ladders.

use metrize::invlim::{
    cauchy_report_at, convergence_report_at, mittag_leffler_report, perturbation_limit, separation_index, thread_space,
    threads, ContainmentReport, InverseSequenceTruncation, LadderData, Stabilization, Thread,
};
use metrize::{Scalar, TotalMap};
use serde_json::json;

use crate::input::{load, parse_csv, shaped, CmdResult, Fail};
use crate::report::{Check, Report};
use crate::{Ctx, InvlimAction};

/// Cap on the product of level sizes for the brute-force thread oracle.
const ORACLE_PRODUCT_CAP: usize = 1 << 20;

pub fn run(ctx: &Ctx, report: &mut Report, action: InvlimAction, path: &str, eps: Option<&str>) -> CmdResult {
    let epsilons = eps.map(|s| parse_csv(s, "epsilon")).transpose()?;
    if let Some(e) = &epsilons {
        if e.iter().any(|x| !x.is_positive()) {
            return Err(Fail::math("epsilon values must be positive"));
        }
    }
    if action == InvlimAction::Perturb {
        let ladder: LadderData = load(report, path)?;
        return perturb(report, &ladder);
    }
    let t: InverseSequenceTruncation = load(report, path)?;
    for (i, level) in t.levels().iter().enumerate() {
        shaped(level, &format!("level {i}"))?;
    }
    match action {
        InvlimAction::Threads => thread_cmd(ctx, report, &t),
        InvlimAction::Ml => ml(report, &t),
        InvlimAction::Converge => {
            containment(report, "convergent", convergence_report_at(&t, epsilons.as_deref()));
            Ok(())
        }
        InvlimAction::Cauchy => {
            containment(report, "cauchy", cauchy_report_at(&t, epsilons.as_deref()));
            Ok(())
        }
        InvlimAction::Separate => separate(report, &t, epsilons),
        InvlimAction::Perturb => unreachable!(),
    }
}

/// Every compatible tuple, by scanning the full product of the levels.
fn brute_threads(t: &InverseSequenceTruncation) -> Option<Vec<Vec<usize>>> {
    let sizes: Vec<usize> = t.levels().iter().map(|l| l.len()).collect();
    let total = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s))?;
    if total > ORACLE_PRODUCT_CAP {
        return None;
    }
    let mut out = Vec::new();
    for code in 0..total {
        let mut rest = code;
        let tuple: Vec<usize> = sizes
            .iter()
            .map(|&s| {
                let v = rest % s;
                rest /= s;
                v
            })
            .collect();
        if t.bonds().iter().enumerate().all(|(i, p)| p.apply(tuple[i + 1]) == tuple[i]) {
            out.push(tuple);
        }
    }
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    Some(out)
}

fn thread_cmd(ctx: &Ctx, report: &mut Report, t: &InverseSequenceTruncation) -> CmdResult {
    let ths = threads(t)?;
    report.push(Check::new("threads_compatible", ths.iter().all(|th| th.is_compatible(t))).scalar("count", ths.len()));
    if ctx.oracle {
        match brute_threads(t) {
            Some(all) => {
                let mut fast: Vec<Vec<usize>> = ths.iter().map(|Thread(v)| v.clone()).collect();
                fast.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
                report.push(Check::new("oracle_threads", fast == all));
            }
            None => report.push(Check::info("oracle_threads").scalar("skipped", "product of levels too large")),
        }
    }
    let space = thread_space(t, &ths);
    report.set_output(json!({ "threads": ths, "space": space }));
    Ok(())
}

fn ml(report: &mut Report, t: &InverseSequenceTruncation) -> CmdResult {
    let r = mittag_leffler_report(t);
    for chain in &r.chains {
        let check = match chain.verdict {
            Stabilization::StabilizedAt { from } => Check::new(format!("level_{}_stabilizes", chain.level), true).scalar("from", from),
            Stabilization::NotStabilized => Check::new(format!("level_{}_stabilizes", chain.level), false),
        };
        report.push(check);
    }
    report.push(Check::info("bonds_surjective").witness(&r.bonds_surjective));
    report.set_output(&r);
    Ok(())
}

fn containment(report: &mut Report, name: &str, r: ContainmentReport) {
    let failing = r.rows.iter().find(|row| !row.passes).map(|row| json!({ "level": row.level, "epsilon": row.epsilon }));
    report.push(Check::new(name, r.passes).witness_on_fail(failing).scalar("rows", r.rows.len()));
    report.set_output(&r);
}

fn separate(report: &mut Report, t: &InverseSequenceTruncation, epsilons: Option<Vec<Scalar>>) -> CmdResult {
    let ths = threads(t)?;
    let eps = match epsilons {
        Some(e) => e,
        None => thread_space(t, &ths).spectrum().into_iter().filter(Scalar::is_positive).collect(),
    };
    let mut out = Vec::new();
    for e in &eps {
        let s = separation_index(t, e)?;
        report.push(
            Check::new(format!("separates_at_{e}"), s.level.is_some())
                .scalar("level", s.level)
                .scalar("lambda", &s.lambda),
        );
        out.push(s);
    }
    report.set_output(&out);
    Ok(())
}

fn perturb(report: &mut Report, ladder: &LadderData) -> CmdResult {
    for (i, level) in ladder.source.levels().iter().chain(ladder.target.levels()).enumerate() {
        shaped(level, &format!("level {i}"))?;
    }
    let r = perturbation_limit(ladder)?;
    report.push(Check::new("hypotheses", r.hypotheses_hold).witness_on_fail(r.failures.first()));
    for row in &r.closeness {
        report.push(
            Check::new(format!("closeness_level_{}", row.level), row.holds)
                .scalar("distance", &row.distance)
                .scalar("bound", &row.bound),
        );
    }
    report.push(Check::new("telescoping_bounds", r.telescoping.iter().all(|b| b.holds)));
    let max_closeness = r.closeness.iter().map(|b| b.distance.clone()).max().unwrap_or_else(Scalar::zero);
    report.push(Check::info("limit_map").scalar("max_closeness", max_closeness).scalar("injective", r.injective));
    report.push(Check::new("collapses_within_bounds", r.collapses_within_bounds));
    let limit: &TotalMap = &r.limit_map;
    report.set_output(json!({ "limit_map": limit, "report": r }));
    Ok(())
}
