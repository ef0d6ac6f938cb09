//! Truncated inverse sequences of finite metric spaces.
//!
//! A truncation holds levels `X_0..X_N` and bonds `p_i: X_{i+1} → X_i`. Every
//! verdict here is about levels `0..N` only. A thread is fixed by its top
//! coordinate, so the deepest level stands in for the limit: the convergence
//! and Cauchy tables compare the levels `0..N-1` with it and with each other.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::combinators::weighted_sup_on;
use crate::error::{Error, Result};
use crate::geometry::{mapping_cylinder_metric, CylinderSpace};
use crate::maps::TotalMap;
use crate::modulus::{continuity_modulus, separation_modulus, ModulusTable};
use crate::quotient::amalgamated_union_with_cross;
use crate::scalar::{Extended, Scalar};
use crate::space::FiniteMetricSpace;

/// Default cap on level sizes when enumerating threads.
pub const LEVEL_CAP: usize = 16;

#[derive(Serialize, Deserialize)]
struct TruncationWire {
    levels: Vec<FiniteMetricSpace>,
    bonds: Vec<TotalMap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TruncationWire", into = "TruncationWire")]
pub struct InverseSequenceTruncation {
    levels: Vec<FiniteMetricSpace>,
    bonds: Vec<TotalMap>,
    /// `composites[j][i] = p^j_i` for `i ≤ j`.
    composites: Vec<Vec<TotalMap>>,
}

impl TryFrom<TruncationWire> for InverseSequenceTruncation {
    type Error = Error;

    fn try_from(w: TruncationWire) -> Result<Self> {
        InverseSequenceTruncation::new(w.levels, w.bonds)
    }
}

impl From<InverseSequenceTruncation> for TruncationWire {
    fn from(t: InverseSequenceTruncation) -> Self {
        TruncationWire { levels: t.levels, bonds: t.bonds }
    }
}

impl InverseSequenceTruncation {
    pub fn new(levels: Vec<FiniteMetricSpace>, bonds: Vec<TotalMap>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::structural("a truncation needs at least one level"));
        }
        if bonds.len() + 1 != levels.len() {
            return Err(Error::structural(format!(
                "{} levels need {} bonds, got {}",
                levels.len(),
                levels.len() - 1,
                bonds.len()
            )));
        }
        for lv in &levels {
            lv.validate_shape()?;
        }
        for (i, p) in bonds.iter().enumerate() {
            if p.len() != levels[i + 1].len() {
                return Err(Error::structural(format!(
                    "bond {i} has {} entries but level {} has {} points",
                    p.len(),
                    i + 1,
                    levels[i + 1].len()
                )));
            }
            p.check_target(levels[i].len())?;
        }
        let composites = (0..levels.len())
            .map(|j| {
                let mut row = vec![TotalMap::identity(levels[j].len()); j + 1];
                for i in (0..j).rev() {
                    row[i] = row[i + 1].then(&bonds[i]);
                }
                row
            })
            .collect();
        Ok(InverseSequenceTruncation { levels, bonds, composites })
    }

    /// Index `N` of the deepest level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[FiniteMetricSpace] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &FiniteMetricSpace {
        &self.levels[i]
    }

    pub fn bonds(&self) -> &[TotalMap] {
        &self.bonds
    }

    /// `p^j_i: X_j → X_i` for `i ≤ j`.
    pub fn composite(&self, i: usize, j: usize) -> &TotalMap {
        assert!(i <= j && j <= self.depth(), "composite p^{j}_{i} out of range");
        &self.composites[j][i]
    }

    /// `p^k_i(X_k)`.
    pub fn image(&self, i: usize, k: usize) -> BTreeSet<usize> {
        self.composite(i, k).image()
    }

    pub fn bonds_surjective(&self) -> Vec<bool> {
        self.bonds
            .iter()
            .enumerate()
            .map(|(i, p)| p.is_surjective_onto(self.levels[i].len()))
            .collect()
    }

    fn require_cap(&self, cap: usize) -> Result<()> {
        match self.levels.iter().map(FiniteMetricSpace::len).max() {
            Some(size) if size > cap => Err(Error::CapExceeded { what: "inverse sequence level".into(), size, cap }),
            _ => Ok(()),
        }
    }
}

/// A compatible tuple `(x_0, ..., x_N)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Thread(pub Vec<usize>);

impl Thread {
    pub fn is_compatible(&self, t: &InverseSequenceTruncation) -> bool {
        self.0.len() == t.levels.len() && t.bonds.iter().enumerate().all(|(i, p)| p.apply(self.0[i + 1]) == self.0[i])
    }
}

/// All threads, ordered by their top coordinate (thread `k` ends at `k`).
pub fn threads(t: &InverseSequenceTruncation) -> Result<Vec<Thread>> {
    threads_with_cap(t, LEVEL_CAP)
}

pub fn threads_with_cap(t: &InverseSequenceTruncation, cap: usize) -> Result<Vec<Thread>> {
    t.require_cap(cap)?;
    let n = t.depth();
    Ok((0..t.levels[n].len())
        .map(|top| Thread((0..=n).map(|i| t.composite(i, n).apply(top)).collect()))
        .collect())
}

/// The weighted sup metric restricted to `threads`.
pub fn thread_space(t: &InverseSequenceTruncation, threads: &[Thread]) -> FiniteMetricSpace {
    let tuples: Vec<Vec<usize>> = threads.iter().map(|th| th.0.clone()).collect();
    weighted_sup_on(&t.levels, &tuples)
}

/// The projection of the threads onto level `i`.
fn projection(threads: &[Thread], i: usize) -> TotalMap {
    TotalMap::new(threads.iter().map(|th| th.0[i]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Stabilization {
    /// Images agree from level `from` through `N`.
    StabilizedAt { from: usize },
    /// The last two images differ.
    NotStabilized,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageChain {
    pub level: usize,
    /// `p^k_i(X_k)` for `k = i..=N`.
    pub images: Vec<Vec<usize>>,
    pub verdict: Stabilization,
}

impl ImageChain {
    /// Whether the images agree from level `j` through `N`.
    pub fn stable_from(&self, j: usize) -> bool {
        let start = j.saturating_sub(self.level).min(self.images.len() - 1);
        self.images[start..].windows(2).all(|w| w[0] == w[1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MittagLefflerReport {
    pub chains: Vec<ImageChain>,
    pub bonds_surjective: Vec<bool>,
}

impl MittagLefflerReport {
    pub fn all_stabilized(&self) -> bool {
        self.chains.iter().all(|c| matches!(c.verdict, Stabilization::StabilizedAt { .. }))
    }
}

/// Image chains `p^k_i(X_k)` with their stabilization levels. Metrics are ignored.
pub fn mittag_leffler_report(t: &InverseSequenceTruncation) -> MittagLefflerReport {
    let n = t.depth();
    let chains = (0..=n)
        .map(|i| {
            let images: Vec<Vec<usize>> = (i..=n).map(|k| t.image(i, k).into_iter().collect()).collect();
            let mut from = n;
            while from > i && images[from - 1 - i] == images[from - i] {
                from -= 1;
            }
            let verdict = if from < n || i == n {
                Stabilization::StabilizedAt { from }
            } else {
                Stabilization::NotStabilized
            };
            ImageChain { level: i, images, verdict }
        })
        .collect();
    MittagLefflerReport { chains, bonds_surjective: t.bonds_surjective() }
}

/// One `(level, ε)` entry of a containment table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentRow {
    pub level: usize,
    pub epsilon: Scalar,
    /// One flag per level `k = level..N-1`; see the report functions.
    pub checks: Vec<bool>,
    /// Smallest `k` from which the tail statement holds.
    pub from: Option<usize>,
    /// The statement holds from some `k < N-1`, or there is nothing to test.
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub rows: Vec<ContainmentRow>,
    pub passes: bool,
}

impl ContainmentReport {
    pub fn row(&self, level: usize, epsilon: &Scalar) -> Option<&ContainmentRow> {
        self.rows.iter().find(|r| r.level == level && r.epsilon == *epsilon)
    }
}

/// `a ⊆ N_ε(b)` in `m`, with closed neighborhoods.
fn within(m: &FiniteMetricSpace, a: &BTreeSet<usize>, b: &BTreeSet<usize>, eps: &Scalar) -> bool {
    a.iter().all(|&x| b.iter().any(|&y| m.d(x, y) <= eps))
}

fn positive_spectrum(m: &FiniteMetricSpace) -> Vec<Scalar> {
    m.spectrum().into_iter().filter(Scalar::is_positive).collect()
}

fn containment_report<F>(t: &InverseSequenceTruncation, epsilons: Option<&[Scalar]>, mut tail: F) -> ContainmentReport
where
    F: FnMut(usize, &Scalar) -> (Vec<bool>, Option<usize>),
{
    let last = t.depth().saturating_sub(1);
    let mut rows = Vec::new();
    for i in 0..t.depth() {
        let eps_list = match epsilons {
            Some(list) => list.to_vec(),
            None => positive_spectrum(&t.levels[i]),
        };
        for eps in eps_list {
            let (checks, from) = tail(i, &eps);
            let passes = i >= last || from.is_some_and(|k| k < last);
            rows.push(ContainmentRow { level: i, epsilon: eps, checks, from, passes });
        }
    }
    let passes = rows.iter().all(|r| r.passes);
    ContainmentReport { rows, passes }
}

/// Convergence table over the positive spectrum of each level.
///
/// `checks[j - i]` says `p^j_i(X_j) ⊆ N_ε(p^N_i(X_N))`; `from` is the smallest
/// `k` with every check from `k` to `N-1` true.
pub fn convergence_report(t: &InverseSequenceTruncation) -> ContainmentReport {
    convergence_report_at(t, None)
}

/// [`convergence_report`] at explicit scales (the same list on every level).
pub fn convergence_report_at(t: &InverseSequenceTruncation, epsilons: Option<&[Scalar]>) -> ContainmentReport {
    let n = t.depth();
    containment_report(t, epsilons, |i, eps| {
        let limit = t.image(i, n);
        let checks: Vec<bool> = (i..n).map(|j| within(&t.levels[i], &t.image(i, j), &limit, eps)).collect();
        let bad = checks.iter().rposition(|c| !c);
        let from = match bad {
            None => Some(i),
            Some(b) if b + 1 < checks.len() => Some(i + b + 1),
            Some(_) => None,
        };
        (checks, from)
    })
}

/// Cauchy table over the positive spectrum of each level.
///
/// `checks[k - i]` says `p^k_i(X_k) ⊆ N_ε(p^j_i(X_j))` for every `j` with
/// `k < j ≤ N-1`; `from` is the first `k` where that holds.
pub fn cauchy_report(t: &InverseSequenceTruncation) -> ContainmentReport {
    cauchy_report_at(t, None)
}

pub fn cauchy_report_at(t: &InverseSequenceTruncation, epsilons: Option<&[Scalar]>) -> ContainmentReport {
    let n = t.depth();
    containment_report(t, epsilons, |i, eps| {
        let images: Vec<BTreeSet<usize>> = (i..n).map(|k| t.image(i, k)).collect();
        let checks: Vec<bool> = (0..images.len())
            .map(|k| images[k + 1..].iter().all(|later| within(&t.levels[i], &images[k], later, eps)))
            .collect();
        let from = checks.iter().position(|&c| c).map(|k| i + k);
        (checks, from)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationLevel {
    pub level: usize,
    pub table: ModulusTable,
    /// `λ` for which the projection is `(ε, λ)`-separating, if any.
    pub lambda: Option<Extended>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationIndex {
    pub epsilon: Scalar,
    /// Smallest level whose projection separates at scale `ε`; `None` within the truncation.
    pub level: Option<usize>,
    pub lambda: Option<Extended>,
    pub scanned: Vec<SeparationLevel>,
}

/// Largest usable `λ` for a separation table at scale `eps`.
///
/// Points with equal images must already be `eps`-close. After that the
/// largest spectrum value that still works is taken; when none does, half the
/// smallest positive image distance works, and a one-point image admits every `λ`.
fn separating_lambda(table: &ModulusTable, eps: &Scalar) -> Option<Extended> {
    let first = table.rows.first()?;
    if first.epsilon > *eps {
        return None;
    }
    if let Some(d) = table.largest_delta_for(eps) {
        return Some(Extended::Finite(d));
    }
    match table.rows.get(1) {
        Some(row) => Some(Extended::Finite(&row.delta / Scalar::from_int(2))),
        None => Some(Extended::Infinite),
    }
}

/// Scans the projections `threads → X_i` for the first `(ε, λ)`-separating one.
pub fn separation_index(t: &InverseSequenceTruncation, eps: &Scalar) -> Result<SeparationIndex> {
    let ths = threads(t)?;
    if ths.is_empty() {
        return Err(Error::precondition("the truncation has no threads"));
    }
    let space = thread_space(t, &ths);
    let mut scanned = Vec::new();
    let mut found = None;
    for i in 0..=t.depth() {
        let table = separation_modulus(&space, &t.levels[i], &projection(&ths, i));
        let lambda = separating_lambda(&table, eps);
        let hit = lambda.clone();
        scanned.push(SeparationLevel { level: i, table, lambda });
        if let Some(l) = hit {
            found = Some((i, l));
            break;
        }
    }
    Ok(SeparationIndex {
        epsilon: eps.clone(),
        level: found.as_ref().map(|(i, _)| *i),
        lambda: found.map(|(_, l)| l),
        scanned,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TelescopeStage {
    /// Index `k` of the bond whose cylinder was glued on.
    pub bond: usize,
    pub equals_dinf: bool,
    pub is_metric: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Telescope {
    pub space: FiniteMetricSpace,
    /// Classes carrying each level `a..=b`, in level order.
    pub level_classes: Vec<Vec<usize>>,
    pub stages: Vec<TelescopeStage>,
}

impl Telescope {
    pub fn certified(&self) -> bool {
        self.stages.iter().all(|s| s.equals_dinf && s.is_metric)
    }
}

/// The finite telescope `MC(p_a) ∪ MC(p_{a+1}) ∪ ... ∪ MC(p_{b-1})`.
///
/// Each cylinder's bottom slice `X_{k+1} × {0}` is glued to the target of the
/// next cylinder. That target carries the slice metric, so the gluing is an
/// isometry and every piece embeds isometrically.
pub fn telescope_metric(t: &InverseSequenceTruncation, a: usize, b: usize, t_grid: &[Scalar]) -> Result<Telescope> {
    if a > b || b > t.depth() {
        return Err(Error::precondition(format!("segment [{a}, {b}] is not inside [0, {}]", t.depth())));
    }
    let mut target = t.levels[a].clone();
    let mut level_classes: Vec<Vec<usize>> = Vec::new();
    let mut tele: Option<FiniteMetricSpace> = None;
    let mut stages = Vec::new();
    for k in a..b {
        let cyl = CylinderSpace::new(t.levels[k + 1].clone(), target, t.bonds[k].clone(), t_grid.to_vec())?;
        let piece = mapping_cylinder_metric(&cyl);
        let targets: Vec<usize> = (0..cyl.target().len()).map(|y| cyl.target_class(y)).collect();
        let slice: Vec<usize> = (0..cyl.source().len()).map(|x| cyl.class_of(x, 0)).collect();
        let (space, placed) = match tele.take() {
            None => {
                level_classes.push(targets);
                (piece.clone(), (0..piece.len()).collect::<Vec<_>>())
            }
            Some(left) => {
                let glued = level_classes.last().expect("previous slice").clone();
                let cross = left.diameter() + piece.diameter() + Scalar::one();
                let q = amalgamated_union_with_cross(&left, &piece, &glued, &targets, &cross)?;
                stages.push(TelescopeStage { bond: k, equals_dinf: q.equals_dinf, is_metric: q.is_metric });
                let placed = (0..piece.len()).map(|p| q.surjection.class_of(left.len() + p)).collect();
                (q.space, placed)
            }
        };
        level_classes.push(slice.iter().map(|&c| placed[c]).collect());
        target = piece.restrict(&slice);
        tele = Some(space);
    }
    let space = match tele {
        Some(s) => s,
        None => {
            level_classes.push((0..t.levels[a].len()).collect());
            t.levels[a].clone()
        }
    };
    Ok(Telescope { space, level_classes, stages })
}

/// Two inverse sequences joined by maps `f_i: X_{n_i} → Y_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderData {
    #[serde(flatten)]
    pub source: InverseSequenceTruncation,
    pub target: InverseSequenceTruncation,
    pub cross: Vec<TotalMap>,
    /// `n_i`; the identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
    /// Closeness budgets `α_i` for `i < M`; the measured closeness when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<Scalar>>,
    /// `β_j` for `j ≤ M`; a ninth of the smallest distance of `Y_j` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<Scalar>>,
}

impl LadderData {
    pub fn indices(&self) -> Vec<usize> {
        match &self.indices {
            Some(v) => v.clone(),
            None => (0..self.cross.len()).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.target.depth();
        if self.cross.len() != m + 1 {
            return Err(Error::structural(format!(
                "{} target levels need {} cross maps, got {}",
                m + 1,
                m + 1,
                self.cross.len()
            )));
        }
        let idx = self.indices();
        if idx.len() != m + 1 {
            return Err(Error::structural("indices must have one entry per target level"));
        }
        if idx.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::precondition("indices must be nondecreasing"));
        }
        if idx.iter().any(|&n| n > self.source.depth()) {
            return Err(Error::structural("index beyond the source truncation"));
        }
        for (i, f) in self.cross.iter().enumerate() {
            if f.len() != self.source.level(idx[i]).len() {
                return Err(Error::structural(format!("cross map {i} is not defined on all of its source level")));
            }
            f.check_target(self.target.level(i).len())?;
        }
        if let Some(a) = &self.alphas {
            if a.len() != m {
                return Err(Error::structural(format!("expected {m} alphas, got {}", a.len())));
            }
            if a.iter().any(Scalar::is_negative) {
                return Err(Error::precondition("alphas must be nonnegative"));
            }
        }
        if let Some(b) = &self.betas {
            if b.len() != m + 1 {
                return Err(Error::structural(format!("expected {} betas, got {}", m + 1, b.len())));
            }
            if b.iter().any(|x| !x.is_positive()) {
                return Err(Error::precondition("betas must be positive"));
            }
        }
        Ok(())
    }

    /// `β_j`, explicit or a ninth of the smallest distance of `Y_j` (1/9 for a point).
    pub fn betas(&self) -> Vec<Scalar> {
        match &self.betas {
            Some(b) => b.clone(),
            None => self
                .target
                .levels()
                .iter()
                .map(|y| y.min_positive_distance().unwrap_or_else(Scalar::one) / Scalar::from_int(9))
                .collect(),
        }
    }

    /// `f_i ∘ p^{n_{i+1}}_{n_i}` and `q_i ∘ f_{i+1}`, both on `X_{n_{i+1}}`.
    fn square(&self, i: usize) -> (TotalMap, TotalMap) {
        let idx = self.indices();
        let down = self.source.composite(idx[i], idx[i + 1]).then(&self.cross[i]);
        let across = self.cross[i + 1].then(&self.target.bonds()[i]);
        (down, across)
    }

    /// `F^{(i)}_j = q^i_j ∘ f_i ∘ p^N_{n_i}` on the top source level.
    fn approximant(&self, i: usize, j: usize) -> TotalMap {
        let idx = self.indices();
        self.source
            .composite(idx[i], self.source.depth())
            .then(&self.cross[i])
            .then(self.target.composite(j, i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// The ladder square at level `i` is not `α_i`-commutative.
    Closeness,
    /// `q^i_j` is not `(α_i, 2^{j-i}β_j)`-continuous.
    Continuity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisFailure {
    pub hypothesis: Hypothesis,
    pub level: usize,
    /// The lower level `j` for continuity failures.
    pub lower: Option<usize>,
    /// For closeness, the source point whose two images disagree.
    pub point: Option<usize>,
    /// A pair of points of `Y_level` witnessing the failure.
    pub pair: (usize, usize),
    pub measured: Scalar,
    pub bound: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    /// Target level `j`.
    pub level: usize,
    /// Approximant index `i`, for telescoping rows.
    pub step: Option<usize>,
    pub distance: Scalar,
    pub bound: Scalar,
    pub holds: bool,
}

/// Separation constants of one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderSeparation {
    pub level: usize,
    /// `q^N_i` on target threads is `(δ_i, 9β_i)`-separating.
    pub delta: Scalar,
    /// `f_i` is `(γ_i, 5β_i)`-separating.
    pub gamma: Scalar,
    /// `p^N_{n_i}` on source threads is `(ε_i, γ_i)`-separating.
    pub epsilon: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub alphas: Vec<Scalar>,
    pub measured: Vec<Scalar>,
    pub betas: Vec<Scalar>,
    pub failures: Vec<HypothesisFailure>,
    pub hypotheses_hold: bool,
    /// Source thread (by top point) to target thread (by top point).
    pub limit_map: TotalMap,
    pub telescoping: Vec<BoundRow>,
    /// `d(q^N_j ∘ F, f_j ∘ p^N_{n_j}) ≤ 2β_j`.
    pub closeness: Vec<BoundRow>,
    pub bounds_hold: bool,
    pub separation: Vec<LadderSeparation>,
    pub injective: bool,
    /// Distinct source threads with equal images are within every `ε_i`.
    pub collapses_within_bounds: bool,
}

fn first_far_point(f: &TotalMap, g: &TotalMap, m: &FiniteMetricSpace, bound: &Scalar) -> Option<usize> {
    (0..f.len()).find(|&x| m.d(f.apply(x), g.apply(x)) > bound)
}

/// Checks the ladder hypotheses, builds the limit map and its bounds.
pub fn perturbation_limit(ladder: &LadderData) -> Result<PerturbationReport> {
    ladder.validate()?;
    let (x, y) = (&ladder.source, &ladder.target);
    let m = y.depth();
    let betas = ladder.betas();
    let two = Scalar::from_int(2);

    let measured: Vec<Scalar> = (0..m)
        .map(|i| {
            let (down, across) = ladder.square(i);
            down.sup_distance(&across, y.level(i))
        })
        .collect();
    let alphas = ladder.alphas.clone().unwrap_or_else(|| measured.clone());

    let mut failures = Vec::new();
    for i in 0..m {
        let (down, across) = ladder.square(i);
        if let Some(p) = first_far_point(&down, &across, y.level(i), &alphas[i]) {
            failures.push(HypothesisFailure {
                hypothesis: Hypothesis::Closeness,
                level: i,
                lower: None,
                point: Some(p),
                pair: (down.apply(p), across.apply(p)),
                measured: measured[i].clone(),
                bound: alphas[i].clone(),
            });
        }
        for j in 0..=i {
            let q = y.composite(j, i);
            let bound = &betas[j] * Scalar::pow2_neg((i - j) as i64);
            let table = continuity_modulus(y.level(i), y.level(j), q);
            if !table.holds(&alphas[i], &bound) {
                let pair = y
                    .level(i)
                    .pairs()
                    .find(|&(u, v)| y.level(i).d(u, v) <= &alphas[i] && y.level(j).d(q.apply(u), q.apply(v)) > &bound)
                    .expect("a failing row has a witness");
                failures.push(HypothesisFailure {
                    hypothesis: Hypothesis::Continuity,
                    level: i,
                    lower: Some(j),
                    point: None,
                    pair,
                    measured: table.epsilon_at(&alphas[i]),
                    bound,
                });
            }
        }
    }

    let mut telescoping = Vec::new();
    let mut closeness = Vec::new();
    for j in 0..=m {
        for i in j..m {
            let distance = ladder.approximant(i + 1, j).sup_distance(&ladder.approximant(i, j), y.level(j));
            let bound = &betas[j] * Scalar::pow2_neg((i - j) as i64);
            let holds = distance <= bound;
            telescoping.push(BoundRow { level: j, step: Some(i), distance, bound, holds });
        }
        let idx = ladder.indices();
        let direct = x.composite(idx[j], x.depth()).then(&ladder.cross[j]);
        let distance = ladder.approximant(m, j).sup_distance(&direct, y.level(j));
        let bound = &two * &betas[j];
        let holds = distance <= bound;
        closeness.push(BoundRow { level: j, step: None, distance, bound, holds });
    }
    let limit_map = ladder.approximant(m, m);
    let bounds_hold = telescoping.iter().chain(&closeness).all(|r| r.holds);

    let x_threads = threads(x)?;
    let y_threads = threads(y)?;
    let x_space = thread_space(x, &x_threads);
    let y_space = thread_space(y, &y_threads);
    let idx = ladder.indices();
    let nine = Scalar::from_int(9);
    let five = Scalar::from_int(5);
    let separation: Vec<LadderSeparation> = (0..=m)
        .map(|i| {
            let delta = separation_modulus(&y_space, y.level(i), &projection(&y_threads, i)).epsilon_at(&(&nine * &betas[i]));
            let gamma = separation_modulus(x.level(idx[i]), y.level(i), &ladder.cross[i]).epsilon_at(&(&five * &betas[i]));
            let epsilon = separation_modulus(&x_space, x.level(idx[i]), &projection(&x_threads, idx[i])).epsilon_at(&gamma);
            LadderSeparation { level: i, delta, gamma, epsilon }
        })
        .collect();
    let injective = limit_map.is_injective();
    let tightest = separation.iter().map(|s| s.epsilon.clone()).min().unwrap_or_else(Scalar::zero);
    let collapses_within_bounds = x_space
        .pairs()
        .filter(|&(a, b)| limit_map.apply(a) == limit_map.apply(b))
        .all(|(a, b)| x_space.d(a, b) <= &tightest);

    Ok(PerturbationReport {
        hypotheses_hold: failures.is_empty(),
        alphas,
        measured,
        betas,
        failures,
        limit_map,
        telescoping,
        closeness,
        bounds_hold,
        separation,
        injective,
        collapses_within_bounds,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompetitorVerdict {
    /// First level `j` where `q^N_j ∘ G` leaves the `2β_j` budget, with a source point.
    pub rejected_at: Option<(usize, usize)>,
    /// Sup distance between the two maps in the target thread metric.
    pub thread_distance: Scalar,
    /// Smallest `δ_i`; an accepted competitor must be this close to the limit map.
    pub separation_bound: Scalar,
    pub within_bound: bool,
}

/// Tests a competing map `G` (source top point to target top point) against
/// the uniqueness bound of the limit map.
pub fn competitor_check(ladder: &LadderData, report: &PerturbationReport, g: &TotalMap) -> Result<CompetitorVerdict> {
    let (x, y) = (&ladder.source, &ladder.target);
    let m = y.depth();
    if g.len() != x.level(x.depth()).len() {
        return Err(Error::structural("competitor must be defined on the top source level"));
    }
    g.check_target(y.level(m).len())?;
    let idx = ladder.indices();
    let two = Scalar::from_int(2);
    let mut rejected_at = None;
    for j in 0..=m {
        let projected = g.then(y.composite(j, m));
        let direct = x.composite(idx[j], x.depth()).then(&ladder.cross[j]);
        if let Some(p) = first_far_point(&projected, &direct, y.level(j), &(&two * &report.betas[j])) {
            rejected_at = Some((j, p));
            break;
        }
    }
    let y_space = thread_space(y, &threads(y)?);
    let thread_distance = g.sup_distance(&report.limit_map, &y_space);
    let separation_bound = report.separation.iter().map(|s| s.delta.clone()).min().unwrap_or_else(Scalar::zero);
    Ok(CompetitorVerdict {
        within_bound: thread_distance <= separation_bound,
        rejected_at,
        thread_distance,
        separation_bound,
    })
}

/// Sample truncations with known behavior.
pub mod fixtures {
    use super::*;

    fn discrete(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::uniform(n, Scalar::one())
    }

    /// Levels `[1], [2], ..., [n]` (discrete) with retractions collapsing the new point onto the previous top.
    pub fn retraction_ladder(n: usize) -> InverseSequenceTruncation {
        let levels = (1..=n).map(discrete).collect();
        let bonds = (1..n).map(|k| TotalMap::new((0..=k).map(|x| x.min(k - 1)).collect())).collect();
        InverseSequenceTruncation::new(levels, bonds).expect("well formed")
    }

    /// `n` copies of `m` with identity bonds.
    pub fn constant(m: &FiniteMetricSpace, n: usize) -> InverseSequenceTruncation {
        let levels = vec![m.clone(); n];
        let bonds = vec![TotalMap::identity(m.len()); n.saturating_sub(1)];
        InverseSequenceTruncation::new(levels, bonds).expect("well formed")
    }

    fn nested_line(coords: &[Scalar], n: usize) -> InverseSequenceTruncation {
        // level k keeps coords[k..]; the last level is empty
        let levels: Vec<FiniteMetricSpace> = (0..=n)
            .map(|k| FiniteMetricSpace::on_line(&coords[k.min(coords.len())..]))
            .collect();
        let bonds = (0..n).map(|k| TotalMap::new((0..levels[k + 1].len()).map(|x| x + 1).collect())).collect();
        InverseSequenceTruncation::new(levels, bonds).expect("well formed")
    }

    /// `{2^-k, ..., 2^-(n-1)}` at level `k < n` under inclusions, and an empty level `n`.
    pub fn cauchy_divergent_chain(n: usize) -> InverseSequenceTruncation {
        let coords: Vec<Scalar> = (0..n).map(|m| Scalar::pow2_neg(m as i64)).collect();
        nested_line(&coords, n)
    }

    /// `{k, ..., n-1}` at level `k < n` under inclusions, and an empty level `n`.
    pub fn non_cauchy_chain(n: usize) -> InverseSequenceTruncation {
        let coords: Vec<Scalar> = (0..n).map(|m| Scalar::from_int(m as i64)).collect();
        nested_line(&coords, n)
    }
}
