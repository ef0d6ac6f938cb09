//! Covers of finite ground sets: refinement and star calculus, Lebesgue
//! numbers, point-finite refinements, and metrization of fundamental
//! sequences of covers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quotient::shortest_paths;
use crate::scalar::{Extended, Scalar};
use crate::space::FiniteMetricSpace;

/// A finite cover of `0..ground` by nonempty sets.
///
/// Members are stored sorted; repeated members are dropped, keeping the
/// first occurrence, so member order is otherwise the input order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CoverWire", into = "CoverWire")]
pub struct Cover {
    ground: usize,
    sets: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct CoverWire {
    ground: usize,
    sets: Vec<Vec<usize>>,
}

impl TryFrom<CoverWire> for Cover {
    type Error = Error;
    fn try_from(w: CoverWire) -> Result<Self> {
        Cover::new(w.ground, w.sets)
    }
}

impl From<Cover> for CoverWire {
    fn from(c: Cover) -> Self {
        CoverWire {
            ground: c.ground,
            sets: c.sets,
        }
    }
}

impl Cover {
    pub fn new(ground: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut canonical = Vec::with_capacity(sets.len());
        let mut covered = vec![false; ground];
        for set in sets {
            let set: Vec<usize> = set.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
            if set.is_empty() {
                return Err(Error::structural("cover has an empty member"));
            }
            if let Some(&x) = set.iter().find(|&&x| x >= ground) {
                return Err(Error::structural(format!("cover member mentions {x}, ground has {ground} points")));
            }
            for &x in &set {
                covered[x] = true;
            }
            if seen.insert(set.clone()) {
                canonical.push(set);
            }
        }
        if let Some(x) = covered.iter().position(|c| !c) {
            return Err(Error::structural(format!("point {x} is not covered")));
        }
        Ok(Cover {
            ground,
            sets: canonical,
        })
    }

    /// `{S}`.
    pub fn trivial(ground: usize) -> Self {
        let sets = if ground == 0 { vec![] } else { vec![(0..ground).collect()] };
        Cover { ground, sets }
    }

    pub fn singletons(ground: usize) -> Self {
        Cover {
            ground,
            sets: (0..ground).map(|x| vec![x]).collect(),
        }
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    fn same_ground(&self, other: &Cover) -> Result<()> {
        if self.ground != other.ground {
            return Err(Error::structural(format!(
                "covers live on grounds of sizes {} and {}",
                self.ground, other.ground
            )));
        }
        Ok(())
    }

    /// The same members in a different order.
    pub fn reordered(&self, order: &[usize]) -> Cover {
        Cover {
            ground: self.ground,
            sets: order.iter().map(|&i| self.sets[i].clone()).collect(),
        }
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn meets(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|x| b.binary_search(x).is_ok())
}

fn contained_in_some(set: &[usize], cover: &Cover) -> bool {
    cover.sets.iter().any(|v| is_subset(set, v))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A member of the finer cover lying in no member of the coarser one.
    UncoveredSet { set: Vec<usize> },
    /// A point whose star lies in no member of the coarser cover.
    PointStar { point: usize, star: Vec<usize> },
    /// A member whose star lies in no member of the coarser cover.
    MemberStar { member: Vec<usize>, star: Vec<usize> },
    /// The sequence has fewer than two covers.
    TooShort { covers: usize },
    /// Cover `level` (1-based) does not star-refine its predecessor.
    Chain { level: usize, inner: Box<Witness> },
    /// No cover of the sequence separates the two points.
    Unseparated { a: usize, b: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl RefinementVerdict {
    fn pass() -> Self {
        RefinementVerdict { holds: true, witness: None }
    }

    fn fail(w: Witness) -> Self {
        RefinementVerdict {
            holds: false,
            witness: Some(w),
        }
    }
}

/// Whether every member of `c` lies in some member of `d`.
pub fn refines(c: &Cover, d: &Cover) -> Result<RefinementVerdict> {
    c.same_ground(d)?;
    Ok(match c.sets.iter().find(|u| !contained_in_some(u, d)) {
        Some(u) => RefinementVerdict::fail(Witness::UncoveredSet { set: u.clone() }),
        None => RefinementVerdict::pass(),
    })
}

/// Union of the members of `c` that meet `t`.
pub fn star(t: &[usize], c: &Cover) -> Vec<usize> {
    let mut t_sorted = t.to_vec();
    t_sorted.sort_unstable();
    t_sorted.dedup();
    let mut out = BTreeSet::new();
    for u in &c.sets {
        if meets(u, &t_sorted) {
            out.extend(u.iter().copied());
        }
    }
    out.into_iter().collect()
}

/// Whether the point stars `{st({x}, c)}` refine `d`.
pub fn star_refines(c: &Cover, d: &Cover) -> Result<RefinementVerdict> {
    c.same_ground(d)?;
    for x in 0..c.ground {
        let s = star(&[x], c);
        if !contained_in_some(&s, d) {
            return Ok(RefinementVerdict::fail(Witness::PointStar { point: x, star: s }));
        }
    }
    Ok(RefinementVerdict::pass())
}

/// Whether the member stars `{st(U, c)}` refine `d`.
pub fn strong_star_refines(c: &Cover, d: &Cover) -> Result<RefinementVerdict> {
    c.same_ground(d)?;
    for u in &c.sets {
        let s = star(u, c);
        if !contained_in_some(&s, d) {
            return Ok(RefinementVerdict::fail(Witness::MemberStar {
                member: u.clone(),
                star: s,
            }));
        }
    }
    Ok(RefinementVerdict::pass())
}

/// Nonempty pairwise intersections, in `(c, d)` member order.
pub fn meet(c: &Cover, d: &Cover) -> Result<Cover> {
    c.same_ground(d)?;
    let sets = c
        .sets
        .iter()
        .flat_map(|u| {
            d.sets
                .iter()
                .map(move |v| u.iter().copied().filter(|x| v.binary_search(x).is_ok()).collect::<Vec<_>>())
        })
        .filter(|s| !s.is_empty())
        .collect();
    Cover::new(c.ground, sets)
}

/// Closed balls `{y : d(x, y) ≤ r}`, one per point.
pub fn ball_cover(m: &FiniteMetricSpace, r: &Scalar) -> Result<Cover> {
    if !r.is_positive() {
        return Err(Error::precondition("ball radius must be positive"));
    }
    let sets = (0..m.len())
        .map(|x| (0..m.len()).filter(|&y| m.d(x, y) <= r).collect())
        .collect();
    Cover::new(m.len(), sets)
}

pub const CLIQUE_GROUND_CAP: usize = 128;

/// Maximal cliques of the graph on `0..n` given by adjacency bitmasks.
pub fn maximal_cliques(adj: &[u128]) -> Vec<u128> {
    fn expand(r: u128, mut p: u128, mut x: u128, adj: &[u128], out: &mut Vec<u128>) {
        if p == 0 {
            if x == 0 {
                out.push(r);
            }
            return;
        }
        let pivot = (p | x).trailing_zeros() as usize;
        let mut candidates = p & !adj[pivot];
        while candidates != 0 {
            let v = candidates.trailing_zeros() as usize;
            let bit = 1u128 << v;
            expand(r | bit, p & adj[v], x & adj[v], adj, out);
            p &= !bit;
            x |= bit;
            candidates &= !bit;
        }
    }
    let n = adj.len();
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut out = Vec::new();
    expand(0, all, 0, adj, &mut out);
    out
}

fn mask_of(set: &[usize]) -> u128 {
    set.iter().fold(0, |m, &x| m | (1u128 << x))
}

/// Largest `λ` in the distance spectrum (or infinity) such that every subset
/// of diameter `< λ` lies in one member of `c`.
///
/// A subset of diameter `< λ` is a clique of the graph joining points at
/// distance `< λ`, so it suffices to test the maximal cliques. The test is
/// monotone in `λ`, so the spectrum is scanned upwards. Infinity means the
/// whole ground set is a member.
pub fn lebesgue_number(c: &Cover, m: &FiniteMetricSpace) -> Result<Extended> {
    if c.ground != m.len() {
        return Err(Error::structural("cover and space have different sizes"));
    }
    if m.len() > CLIQUE_GROUND_CAP {
        return Err(Error::CapExceeded {
            what: "Lebesgue number ground set".into(),
            size: m.len(),
            cap: CLIQUE_GROUND_CAP,
        });
    }
    let members: Vec<u128> = c.sets.iter().map(|s| mask_of(s)).collect();
    let fits = |clique: u128| members.iter().any(|&u| clique & !u == 0);
    let mut best: Option<Scalar> = None;
    for lambda in m.spectrum().into_iter().filter(Scalar::is_positive) {
        let adj: Vec<u128> = (0..m.len())
            .map(|x| {
                (0..m.len())
                    .filter(|&y| y != x && m.d(x, y) < &lambda)
                    .fold(0, |a, y| a | (1u128 << y))
            })
            .collect();
        if maximal_cliques(&adj).into_iter().all(fits) {
            best = Some(lambda);
        } else {
            return Ok(match best {
                Some(b) => Extended::Finite(b),
                None => Extended::Finite(Scalar::zero()),
            });
        }
    }
    let everything = mask_of(&(0..m.len()).collect::<Vec<_>>());
    if fits(everything) {
        return Ok(Extended::Infinite);
    }
    Ok(Extended::Finite(best.unwrap_or_else(Scalar::zero)))
}

/// Largest number of members containing a single point.
pub fn multiplicity(c: &Cover) -> usize {
    point_counts(c).into_iter().max().unwrap_or(0)
}

/// Number of members containing each point.
pub fn point_counts(c: &Cover) -> Vec<usize> {
    let mut counts = vec![0; c.ground];
    for u in &c.sets {
        for &x in u {
            counts[x] += 1;
        }
    }
    counts
}

/// For each member, the number of members (itself included) it meets.
pub fn star_counts(c: &Cover) -> Vec<usize> {
    c.sets
        .iter()
        .map(|u| c.sets.iter().filter(|v| meets(u, v)).count())
        .collect()
}

/// Covers `C_1, ..., C_K` of a common ground set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalSequence {
    pub covers: Vec<Cover>,
}

impl FundamentalSequence {
    pub fn ground(&self) -> usize {
        self.covers.first().map_or(0, Cover::ground)
    }

    /// `C_k` for `k ≥ 1`; `C_0` is the trivial cover.
    pub fn level(&self, k: usize) -> Option<Cover> {
        match k {
            0 => Some(Cover::trivial(self.ground())),
            _ => self.covers.get(k - 1).cloned(),
        }
    }
}

/// Checks the star-refinement chain and that every pair is eventually separated.
pub fn validate_fundamental_sequence(f: &FundamentalSequence) -> Result<RefinementVerdict> {
    if f.covers.len() < 2 {
        return Ok(RefinementVerdict::fail(Witness::TooShort { covers: f.covers.len() }));
    }
    let ground = f.ground();
    for (k, pair) in f.covers.windows(2).enumerate() {
        let v = star_refines(&pair[1], &pair[0])?;
        if let Some(w) = v.witness {
            return Ok(RefinementVerdict::fail(Witness::Chain {
                level: k + 2,
                inner: Box::new(w),
            }));
        }
    }
    for a in 0..ground {
        for b in (a + 1)..ground {
            let separated = f
                .covers
                .iter()
                .any(|c| !c.sets.iter().any(|u| u.binary_search(&a).is_ok() && u.binary_search(&b).is_ok()));
            if !separated {
                return Ok(RefinementVerdict::fail(Witness::Unseparated { a, b }));
            }
        }
    }
    Ok(RefinementVerdict::pass())
}

/// `f(x, y) = min{2^{-n} : x, y share a member of C_{2n}}`, with `C_0 = {S}`.
pub fn pre_distance(f: &FundamentalSequence) -> Vec<Vec<Scalar>> {
    let n = f.ground();
    let mut out = vec![vec![Scalar::zero(); n]; n];
    for x in 0..n {
        for y in (x + 1)..n {
            let mut best = Scalar::one();
            let mut level = 2;
            while level <= f.covers.len() {
                let c = &f.covers[level - 1];
                if c.sets.iter().any(|u| u.binary_search(&x).is_ok() && u.binary_search(&y).is_ok()) {
                    best = best.min(Scalar::pow2_neg(level as i64 / 2));
                }
                level += 2;
            }
            out[x][y] = best.clone();
            out[y][x] = best;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrization {
    pub space: FiniteMetricSpace,
    pub pre_distance: Vec<Vec<Scalar>>,
    /// `d ≤ f ≤ 2d` on every pair.
    pub sandwich_holds: bool,
    pub sandwich_witness: Option<(usize, usize)>,
    /// Each member of `C_{2n}` has `d`-diameter at most `2^{-n}`.
    pub even_covers_fine: bool,
    /// Each set of `d`-diameter at most `2^{-n-1}` lies in the `C_{2n}`-star
    /// of each of its points.
    pub small_sets_in_stars: bool,
    /// Each set of `d`-diameter at most `2^{-n-1}` lies in a member of `C_{2n-1}`.
    pub small_sets_refine_odd: bool,
    /// Each set of `d`-diameter at most `2^{-n-1}` lies in a member of
    /// `C_{2n}`. Reported only; it can fail on valid sequences.
    pub small_sets_refine_even: bool,
}

/// Metrizes a fundamental sequence of covers by chain sums of `f`.
pub fn au_metrize(f: &FundamentalSequence) -> Result<Metrization> {
    let verdict = validate_fundamental_sequence(f)?;
    if let Some(w) = verdict.witness {
        return Err(Error::precondition(format!("invalid fundamental sequence: {w:?}")));
    }
    let n = f.ground();
    if n > CLIQUE_GROUND_CAP {
        return Err(Error::CapExceeded {
            what: "fundamental sequence ground set".into(),
            size: n,
            cap: CLIQUE_GROUND_CAP,
        });
    }
    let pre = pre_distance(f);
    let d = shortest_paths(&pre);
    let labels = (0..n).map(|i| i.to_string()).collect();
    let space = FiniteMetricSpace::new(labels, d.clone())?;

    let mut sandwich_witness = None;
    'outer: for x in 0..n {
        for y in (x + 1)..n {
            let twice = &d[x][y] + &d[x][y];
            if d[x][y] > pre[x][y] || pre[x][y] > twice {
                sandwich_witness = Some((x, y));
                break 'outer;
            }
        }
    }

    let diam_of = |set: &[usize]| {
        set.iter()
            .flat_map(|&a| set.iter().map(move |&b| (a, b)))
            .map(|(a, b)| d[a][b].clone())
            .max()
            .unwrap_or_else(Scalar::zero)
    };
    let mut even_covers_fine = true;
    let mut small_sets_in_stars = true;
    let mut small_sets_refine_odd = true;
    let mut small_sets_refine_even = true;
    let mut level = 2;
    while level <= f.covers.len() {
        let half = level / 2;
        let c = &f.covers[level - 1];
        let bound = Scalar::pow2_neg(half as i64);
        if c.sets.iter().any(|u| diam_of(u) > bound) {
            even_covers_fine = false;
        }
        let small = Scalar::pow2_neg(half as i64 + 1);
        let adj: Vec<u128> = (0..n)
            .map(|x| (0..n).filter(|&y| y != x && d[x][y] <= small).fold(0, |a, y| a | (1u128 << y)))
            .collect();
        let odd = &f.covers[level - 2];
        for clique in maximal_cliques(&adj) {
            let members: Vec<usize> = (0..n).filter(|&x| clique & (1u128 << x) != 0).collect();
            if !members.iter().all(|&x| is_subset(&members, &star(&[x], c))) {
                small_sets_in_stars = false;
            }
            if !contained_in_some(&members, odd) {
                small_sets_refine_odd = false;
            }
            if !contained_in_some(&members, c) {
                small_sets_refine_even = false;
            }
        }
        level += 2;
    }

    Ok(Metrization {
        space,
        pre_distance: pre,
        sandwich_holds: sandwich_witness.is_none(),
        sandwich_witness,
        even_covers_fine,
        small_sets_in_stars,
        small_sets_refine_odd,
        small_sets_refine_even,
    })
}

/// Standard basis of ball covers at radii `3^{-k}`, `k = 1..=depth`.
pub fn standard_basis(m: &FiniteMetricSpace, depth: usize) -> Result<FundamentalSequence> {
    let mut covers = Vec::with_capacity(depth);
    let mut r = Scalar::one();
    for _ in 0..depth {
        r = r / Scalar::from_int(3);
        covers.push(ball_cover(m, &r)?);
    }
    Ok(FundamentalSequence { covers })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointFiniteRefinement {
    pub cover: Cover,
    /// The members `V_n` in construction order, before canonicalization.
    pub members: Vec<Vec<usize>>,
    /// For each entry of `members`, the position `n` of the member `U_n` of
    /// the fine cover it was grown from.
    pub origins: Vec<usize>,
    pub refines_target: bool,
    pub covers_ground: bool,
    /// `U_i ∩ V_n ≠ ∅ ⟹ n ≤ i` for all pairs, so each `U_i` meets at most
    /// `i + 1` of the `V_n`.
    pub index_bound_holds: bool,
}

/// Checks that `c` strongly star-refines a cover that strongly star-refines
/// `d`, using the coarsest candidate `{st(U, c) : U ∈ c}`.
pub fn double_strong_star_check(d: &Cover, c: &Cover) -> Result<RefinementVerdict> {
    c.same_ground(d)?;
    let mid = Cover::new(c.ground, c.sets.iter().map(|u| star(u, c)).collect())?;
    strong_star_refines(&mid, d)
}

/// Point-finite refinement of `d` grown from the members of `c` in order:
/// `W_n = st(U_n) ∖ ⋃_{k<n} st(U_k)`, `V_n = st(W_n)` (stars in `c`).
pub fn point_finite_refinement(d: &Cover, c: &Cover) -> Result<PointFiniteRefinement> {
    let pre = double_strong_star_check(d, c)?;
    if let Some(w) = pre.witness {
        return Err(Error::precondition(format!(
            "fine cover is not a strong star-refinement of a strong star-refinement of the target: {w:?}"
        )));
    }
    let stars: Vec<Vec<usize>> = c.sets.iter().map(|u| star(u, c)).collect();
    let mut taken = vec![false; c.ground];
    let mut sets = Vec::new();
    let mut origins = Vec::new();
    for (n, s) in stars.iter().enumerate() {
        let w: Vec<usize> = s.iter().copied().filter(|&x| !taken[x]).collect();
        for &x in s {
            taken[x] = true;
        }
        if !w.is_empty() {
            sets.push(star(&w, c));
            origins.push(n);
        }
    }
    let covered: BTreeSet<usize> = sets.iter().flatten().copied().collect();
    let covers_ground = covered.len() == c.ground;
    let cover = Cover::new(c.ground, sets.clone())?;
    let refines_target = refines(&cover, d)?.holds;
    let index_bound_holds = sets.iter().zip(&origins).all(|(v, &n)| {
        c.sets
            .iter()
            .enumerate()
            .all(|(i, u)| !meets(u, v) || n <= i)
    });
    Ok(PointFiniteRefinement {
        cover,
        members: sets,
        origins,
        refines_target,
        covers_ground,
        index_bound_holds,
    })
}
