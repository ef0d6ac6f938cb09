//! Random instances for tests, benches and the command line.
//!
//! Every generator draws from the caller's `Rng`, so a seeded generator gives
//! reproducible instances.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::covers::{Cover, FundamentalSequence};
use crate::cubohedron::{Cube, Cubohedron};
use crate::geometry::{Norm, NormedPointSet};
use crate::invlim::{InverseSequenceTruncation, LadderData};
use crate::maps::{PartialMap, TotalMap};
use crate::modulus::continuity_modulus;
use crate::quotient::{shortest_paths, Surjection};
use crate::scalar::Scalar;
use crate::sequence::SequencePoint;
use crate::space::FiniteMetricSpace;

/// `k/den` with `k` uniform in `lo..=hi`.
pub fn scalar<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Scalar {
    Scalar::ratio(rng.gen_range(lo..=hi), den)
}

/// Shortest-path metric of a complete graph with weights in `[1/den, 1]`.
///
/// Distances are multiples of `1/den`, at least `1/den` and at most 1.
pub fn metric<R: Rng + ?Sized>(rng: &mut R, n: usize, den: i64) -> FiniteMetricSpace {
    let mut w = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = scalar(rng, 1, den, den);
            w[i][j] = d.clone();
            w[j][i] = d;
        }
    }
    FiniteMetricSpace::from_matrix(shortest_paths(&w)).expect("square matrix")
}

/// Like [`metric`], but some pairs are at distance zero.
pub fn pseudo_metric<R: Rng + ?Sized>(rng: &mut R, n: usize, den: i64) -> FiniteMetricSpace {
    let mut w = vec![vec![Scalar::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = if rng.gen_bool(0.2) { Scalar::zero() } else { scalar(rng, 1, den, den) };
            w[i][j] = d.clone();
            w[j][i] = d;
        }
    }
    FiniteMetricSpace::from_matrix(shortest_paths(&w)).expect("square matrix")
}

/// A surjection of `0..n` onto `0..k` (`1 ≤ k ≤ n`).
pub fn surjection<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Surjection {
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    let mut classes: Vec<usize> = (0..k).chain((k..n).map(|_| rng.gen_range(0..k))).collect();
    classes.shuffle(rng);
    // renumber by first occurrence so the class order is canonical
    let mut seen = BTreeMap::new();
    let canonical = classes
        .iter()
        .map(|c| {
            let next = seen.len();
            *seen.entry(*c).or_insert(next)
        })
        .collect();
    Surjection::new(canonical).expect("onto")
}

pub fn total_map<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> TotalMap {
    TotalMap::new((0..n).map(|_| rng.gen_range(0..m)).collect())
}

/// A surjective map `0..n → 0..m` (`1 ≤ m ≤ n`).
pub fn onto_map<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> TotalMap {
    TotalMap::new(surjection(rng, n, m).classes().to_vec())
}

/// A map from a nonempty subset of `0..nx` of size at most `max_domain` into `0..ny`.
pub fn partial_map<R: Rng + ?Sized>(rng: &mut R, nx: usize, ny: usize, max_domain: usize) -> PartialMap {
    let size = rng.gen_range(1..=max_domain.min(nx).max(1));
    let mut domain: Vec<usize> = (0..nx).collect();
    domain.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = domain[..size].iter().map(|&a| (a, rng.gen_range(0..ny))).collect();
    pairs.sort();
    PartialMap::from_pairs(&pairs).expect("distinct sources")
}

/// A cover of `0..ground` by `members` random nonempty sets.
pub fn cover<R: Rng + ?Sized>(rng: &mut R, ground: usize, members: usize) -> Cover {
    let members = members.max(1);
    let mut sets: Vec<BTreeSet<usize>> = (0..members)
        .map(|_| {
            let mut s: BTreeSet<usize> = (0..ground).filter(|_| rng.gen_bool(0.35)).collect();
            if s.is_empty() && ground > 0 {
                s.insert(rng.gen_range(0..ground));
            }
            s
        })
        .collect();
    for x in 0..ground {
        if !sets.iter().any(|s| s.contains(&x)) {
            let k = rng.gen_range(0..members);
            sets[k].insert(x);
        }
    }
    Cover::new(ground, sets.into_iter().map(|s| s.into_iter().collect()).collect()).expect("valid cover")
}

/// A fundamental sequence of `depth ≥ 2` covers on `ground` points.
///
/// Half the time the covers are nested partitions ending in singletons;
/// otherwise they are the `3^-k` ball covers of a random metric whose
/// distances are at least `1/8`.
pub fn fundamental_sequence<R: Rng + ?Sized>(rng: &mut R, ground: usize, depth: usize) -> FundamentalSequence {
    let depth = depth.max(2);
    if rng.gen_bool(0.5) {
        let mut blocks: Vec<Vec<usize>> = vec![(0..ground).collect()];
        let mut covers = Vec::with_capacity(depth);
        for level in 0..depth {
            blocks = if level + 1 == depth {
                (0..ground).map(|x| vec![x]).collect()
            } else {
                blocks
                    .into_iter()
                    .flat_map(|b| {
                        if b.len() > 1 && rng.gen_bool(0.5) {
                            let cut = rng.gen_range(1..b.len());
                            vec![b[..cut].to_vec(), b[cut..].to_vec()]
                        } else {
                            vec![b]
                        }
                    })
                    .collect()
            };
            covers.push(Cover::new(ground, blocks.clone()).expect("partition"));
        }
        FundamentalSequence { covers }
    } else {
        let m = metric(rng, ground, 8);
        crate::covers::standard_basis(&m, depth).expect("ball covers")
    }
}

/// `count` random maps between spaces of the given sizes.
pub fn family<R: Rng + ?Sized>(rng: &mut R, source: usize, target: usize, count: usize) -> Vec<TotalMap> {
    (0..count).map(|_| total_map(rng, source, target)).collect()
}

/// `n` points with coordinates in `[-1, 1]` (multiples of `1/16`), scaled into the unit ball.
pub fn point_set<R: Rng + ?Sized>(rng: &mut R, dim: usize, n: usize, norm: Norm) -> NormedPointSet {
    let points = (0..n).map(|_| (0..dim).map(|_| scalar(rng, -16, 16, 16)).collect()).collect();
    NormedPointSet::new(dim, points, norm)
        .expect("well formed")
        .rescaled_into_unit_ball()
        .0
}

/// Up to `max_cubes` cubes of edge `2^-level` with bases in `[-2, 2)` on `coords` coordinates.
pub fn cubohedron<R: Rng + ?Sized>(rng: &mut R, level: u32, max_cubes: usize, coords: u64) -> Cubohedron {
    let cells = 2i64 << level;
    let edge = Scalar::pow2_neg(level as i64);
    let count = rng.gen_range(1..=max_cubes.max(1));
    let cubes = (0..count)
        .map(|_| {
            let base = (0..coords)
                .filter(|_| rng.gen_bool(0.6))
                .collect::<Vec<u64>>()
                .into_iter()
                .map(|i| (i, Scalar::from_int(rng.gen_range(-cells..cells)) * &edge))
                .collect();
            let extent = (0..coords).filter(|_| rng.gen_bool(0.4)).collect();
            Cube::new(base, extent)
        })
        .collect();
    Cubohedron::new(level, cubes).expect("lattice bases")
}

/// A point of `k` moved by at most `band` in each of the first `coords` coordinates.
///
/// Offsets are multiples of `band / 8`.
pub fn point_near<R: Rng + ?Sized>(rng: &mut R, k: &Cubohedron, band: &Scalar, coords: u64) -> SequencePoint {
    let edge = k.edge();
    let cube = k.cubes.choose(rng).expect("nonempty complex");
    let mut p = SequencePoint::zero();
    let touched: BTreeSet<u64> = cube.base.keys().chain(&cube.extent).copied().chain(0..coords).collect();
    for i in touched {
        let mut v = cube.base.get(&i).cloned().unwrap_or_else(Scalar::zero);
        if cube.extent.contains(&i) {
            v = v + &edge * scalar(rng, 0, 16, 16);
        }
        v = v + band * scalar(rng, -8, 8, 8);
        p = p.with(i, v);
    }
    p
}

/// A truncation with `depth + 1` levels of at most `max_size` points each.
///
/// With `onto` every bond is surjective, and level sizes grow with depth.
pub fn truncation<R: Rng + ?Sized>(rng: &mut R, depth: usize, max_size: usize, onto: bool) -> InverseSequenceTruncation {
    let mut sizes = Vec::with_capacity(depth + 1);
    let mut size = rng.gen_range(1..=max_size.max(1));
    for _ in 0..=depth {
        sizes.push(size);
        size = if onto { rng.gen_range(size..=max_size.max(size)) } else { rng.gen_range(1..=max_size.max(1)) };
    }
    let levels = sizes.iter().map(|&n| metric(rng, n, 8)).collect();
    let bonds = (0..depth)
        .map(|i| if onto { onto_map(rng, sizes[i + 1], sizes[i]) } else { total_map(rng, sizes[i + 1], sizes[i]) })
        .collect();
    InverseSequenceTruncation::new(levels, bonds).expect("consistent sizes")
}

/// A ladder over two random truncations whose squares commute exactly.
///
/// The target bonds are onto, so each cross map can be lifted level by level.
pub fn commuting_ladder<R: Rng + ?Sized>(rng: &mut R, depth: usize, max_size: usize) -> LadderData {
    let source = truncation(rng, depth, max_size, false);
    let target = truncation(rng, depth, max_size, true);
    let mut cross = vec![total_map(rng, source.level(0).len(), target.level(0).len())];
    for i in 0..depth {
        let q = &target.bonds()[i];
        let fibers = q.fibers();
        let below = source.bonds()[i].then(&cross[i]);
        let lifted = (0..source.level(i + 1).len())
            .map(|x| *fibers[&below.apply(x)].choose(rng).expect("onto bond"))
            .collect();
        cross.push(TotalMap::new(lifted));
    }
    LadderData { source, target, cross, indices: None, alphas: None, betas: None }
}

/// Moves one value of the cross map at `level ≥ 1`, then picks `β` large
/// enough for the continuity hypothesis with the measured closeness.
pub fn perturbed_ladder<R: Rng + ?Sized>(rng: &mut R, mut ladder: LadderData, level: usize) -> LadderData {
    let y = ladder.target.level(level).len();
    let f = &mut ladder.cross[level];
    let mut images = f.images().to_vec();
    let x = rng.gen_range(0..images.len());
    images[x] = rng.gen_range(0..y);
    *f = TotalMap::new(images);
    ladder.betas = Some(sufficient_betas(&ladder));
    ladder
}

/// Smallest `β_j` with every `q^i_j` being `(α_i, 2^{j-i}β_j)`-continuous at
/// the measured closeness, raised to the default where that is larger.
pub fn sufficient_betas(ladder: &LadderData) -> Vec<Scalar> {
    let y = &ladder.target;
    let m = y.depth();
    let measured: Vec<Scalar> = (0..m)
        .map(|i| {
            let idx = ladder.indices();
            let down = ladder.source.composite(idx[i], idx[i + 1]).then(&ladder.cross[i]);
            let across = ladder.cross[i + 1].then(&y.bonds()[i]);
            down.sup_distance(&across, y.level(i))
        })
        .collect();
    let defaults = LadderData { betas: None, ..ladder.clone() }.betas();
    (0..=m)
        .map(|j| {
            (j..m)
                .map(|i| {
                    let eps = continuity_modulus(y.level(i), y.level(j), y.composite(j, i)).epsilon_at(&measured[i]);
                    eps * Scalar::pow2_neg(j as i64 - i as i64)
                })
                .fold(defaults[j].clone(), Scalar::max)
        })
        .collect()
}
