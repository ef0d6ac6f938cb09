#![allow(dead_code)]

use metrize::{FiniteMetricSpace, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub type Matrix = Vec<Vec<Scalar>>;

/// `B(a, b) = min{d(x, y) : x ∈ a, y ∈ b}` over the classes of `class_of`.
pub fn block_distances(m: &FiniteMetricSpace, class_of: &[usize]) -> Matrix {
    let k = class_of.iter().max().map_or(0, |c| c + 1);
    let mut best: Vec<Vec<Option<Scalar>>> = vec![vec![None; k]; k];
    for x in 0..m.len() {
        for y in 0..m.len() {
            let (a, b) = (class_of[x], class_of[y]);
            let d = if a == b { Scalar::zero() } else { m.d(x, y).clone() };
            let slot = &mut best[a][b];
            if slot.as_ref().map_or(true, |s| d < *s) {
                *slot = Some(d);
            }
        }
    }
    best.into_iter()
        .map(|row| row.into_iter().map(|v| v.expect("classes are nonempty")).collect())
        .collect()
}

/// Plain Floyd–Warshall.
pub fn floyd_warshall(mut d: Matrix) -> Matrix {
    let k = d.len();
    for z in 0..k {
        for x in 0..k {
            for y in 0..k {
                let via = &d[x][z] + &d[z][y];
                if via < d[x][y] {
                    d[x][y] = via;
                }
            }
        }
    }
    d
}

/// `d_∞` of the quotient by `class_of`, computed from scratch.
pub fn oracle_dinf(m: &FiniteMetricSpace, class_of: &[usize]) -> Matrix {
    floyd_warshall(block_distances(m, class_of))
}

/// Minimum over chains of at most `n` block segments, by enumerating the
/// intermediate classes one step at a time.
pub fn oracle_dn(m: &FiniteMetricSpace, class_of: &[usize], n: usize) -> Matrix {
    let b = block_distances(m, class_of);
    let k = b.len();
    let mut cur = b.clone();
    for _ in 1..n {
        let mut next = cur.clone();
        for x in 0..k {
            for y in 0..k {
                for z in 0..k {
                    let via = &cur[x][z] + &b[z][y];
                    if via < next[x][y] {
                        next[x][y] = via;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

pub fn triangle_ok(d: &Matrix) -> bool {
    let k = d.len();
    (0..k).all(|x| (0..k).all(|y| (0..k).all(|z| d[x][y] <= &d[x][z] + &d[z][y])))
}

pub fn line(coords: &[(i64, i64)]) -> FiniteMetricSpace {
    FiniteMetricSpace::on_line(&coords.iter().map(|&(a, b)| Scalar::ratio(a, b)).collect::<Vec<_>>())
}
