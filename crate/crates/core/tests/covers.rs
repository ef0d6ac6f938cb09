mod common;

use metrize::covers::{
    au_metrize, ball_cover, lebesgue_number, meet, point_finite_refinement, refines, star_refines,
    strong_star_refines, Cover,
};
use metrize::{gen, Extended, FiniteMetricSpace, Scalar};
use proptest::prelude::*;

fn subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

fn refines_oracle(c: &Cover, d: &Cover) -> bool {
    c.sets().iter().all(|u| d.sets().iter().any(|v| subset(u, v)))
}

fn balls(m: &FiniteMetricSpace, r: Scalar) -> Cover {
    ball_cover(m, &r).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn meet_refines_both(seed in any::<u64>(), n in 1usize..10, a in 1usize..5, b in 1usize..5) {
        let mut rng = common::rng(seed);
        let (c, d) = (gen::cover(&mut rng, n, a), gen::cover(&mut rng, n, b));
        let m = meet(&c, &d).unwrap();
        prop_assert!(refines(&m, &c).unwrap().holds && refines(&m, &d).unwrap().holds);
        prop_assert!(refines_oracle(&m, &c) && refines_oracle(&m, &d));
    }

    #[test]
    fn star_refinement_implications(seed in any::<u64>(), n in 1usize..9, k in 1u32..4) {
        let mut rng = common::rng(seed);
        let random = [gen::cover(&mut rng, n, 3), gen::cover(&mut rng, n, 2), gen::cover(&mut rng, n, 4)];
        let m = gen::metric(&mut rng, n, 8);
        let r = Scalar::pow2_neg(k as i64 - 1);
        let nested = [balls(&m, &r / Scalar::from_int(4)), balls(&m, &r / Scalar::from_int(2)), balls(&m, r.clone())];
        for [c, b, d] in [random, nested.clone()] {
            if strong_star_refines(&c, &d).unwrap().holds {
                prop_assert!(star_refines(&c, &d).unwrap().holds);
            }
            if star_refines(&c, &b).unwrap().holds && star_refines(&b, &d).unwrap().holds {
                prop_assert!(strong_star_refines(&c, &d).unwrap().holds);
            }
        }
        // halving closed balls always star-refines
        prop_assert!(star_refines(&nested[1], &nested[2]).unwrap().holds);
    }

    #[test]
    fn small_balls_refine_uniform_covers(seed in any::<u64>(), n in 1usize..9, members in 1usize..5, frac in 1i64..8) {
        let mut rng = common::rng(seed);
        let m = gen::metric(&mut rng, n, 8);
        let d = gen::cover(&mut rng, n, members);
        let eps = match lebesgue_number(&d, &m).unwrap() {
            Extended::Infinite => Scalar::one(),
            // closed balls of radius exactly L/2 can have diameter L, so stay below it
            Extended::Finite(l) => l * Scalar::ratio(frac, 16),
        };
        if eps.is_positive() {
            prop_assert!(refines_oracle(&balls(&m, eps), &d));
        }
    }

    #[test]
    fn metrization_sandwich(seed in any::<u64>(), n in 1usize..7, depth in 2usize..7) {
        let f = gen::fundamental_sequence(&mut common::rng(seed), n, depth);
        let out = au_metrize(&f).unwrap();
        // f from memberships, independently
        let mut pre = vec![vec![Scalar::zero(); n]; n];
        for x in 0..n {
            for y in 0..n {
                if x == y { continue; }
                let mut best = Scalar::one();
                let mut level = 2;
                while level <= f.covers.len() {
                    if f.covers[level - 1].sets().iter().any(|u| u.contains(&x) && u.contains(&y)) {
                        best = best.min(Scalar::pow2_neg(level as i64 / 2));
                    }
                    level += 2;
                }
                pre[x][y] = best;
            }
        }
        let d = common::floyd_warshall(pre.clone());
        prop_assert!(out.sandwich_holds);
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(out.space.d(x, y), &d[x][y]);
                prop_assert!(d[x][y] <= pre[x][y] && pre[x][y] <= &d[x][y] + &d[x][y]);
            }
        }
        prop_assert!(metrize::check_metric_axioms(&out.space, false).unwrap().passed);
    }

    #[test]
    fn point_finite_refinement_props(seed in any::<u64>(), n in 1usize..11, members in 1usize..5, k in 0i64..3) {
        let mut rng = common::rng(seed);
        let m = gen::metric(&mut rng, n, 16);
        let r = Scalar::pow2_neg(k);
        let instances = [
            (gen::cover(&mut rng, n, members), Cover::singletons(n)),
            (balls(&m, r.clone()), balls(&m, r / Scalar::from_int(9))),
        ];
        for (d, c) in instances {
            let out = point_finite_refinement(&d, &c).unwrap();
            prop_assert!(out.refines_target && out.covers_ground && out.index_bound_holds);
            prop_assert!(refines_oracle(&out.cover, &d));
            let union: std::collections::BTreeSet<usize> = out.cover.sets().iter().flatten().copied().collect();
            prop_assert_eq!(union.len(), n);
            for (v, &origin) in out.members.iter().zip(&out.origins) {
                for (i, u) in c.sets().iter().enumerate() {
                    if u.iter().any(|x| v.contains(x)) {
                        prop_assert!(origin <= i);
                    }
                }
            }
        }
    }
}
