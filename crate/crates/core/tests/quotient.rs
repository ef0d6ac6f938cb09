mod common;

use metrize::quotient::{adjunction_space, amalgamated_union, chain_metric, quotient_by_discrete_family};
use metrize::{gen, ChainLength, FiniteMetricSpace, Scalar, Surjection};
use proptest::prelude::*;

fn instance(seed: u64, n: usize, k: usize, pseudo: bool) -> (FiniteMetricSpace, Surjection) {
    let mut rng = common::rng(seed);
    let m = if pseudo { gen::pseudo_metric(&mut rng, n, 6) } else { gen::metric(&mut rng, n, 6) };
    let f = gen::surjection(&mut rng, n, k.min(n));
    (m, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_metrics_decrease_to_dinf(seed in any::<u64>(), n in 1usize..9, k in 1usize..9, pseudo in any::<bool>()) {
        let (m, f) = instance(seed, n, k, pseudo);
        let dinf = chain_metric(&m, &f, ChainLength::Infinite).unwrap();
        prop_assert_eq!(&dinf.values, &common::oracle_dinf(&m, f.classes()));
        let mut previous = common::block_distances(&m, f.classes());
        for len in 1..=6 {
            let cm = chain_metric(&m, &f, ChainLength::Finite(len)).unwrap();
            prop_assert_eq!(&cm.values, &common::oracle_dn(&m, f.classes(), len));
            for (row, prev) in cm.values.iter().zip(&previous) {
                for (v, p) in row.iter().zip(prev) {
                    prop_assert!(v <= p);
                }
            }
            for (row, lim) in cm.values.iter().zip(&dinf.values) {
                for (v, l) in row.iter().zip(lim) {
                    prop_assert!(l <= v);
                }
            }
            prop_assert!(cm.lemma_holds());
            prop_assert_eq!(cm.triangle_valid, common::triangle_ok(&cm.values));
            previous = cm.values;
        }
    }

    #[test]
    fn stable_doubling_gives_triangle(seed in any::<u64>(), n in 1usize..9, k in 1usize..9, len in 1usize..4) {
        let (m, f) = instance(seed, n, k, false);
        let dn = common::oracle_dn(&m, f.classes(), len);
        if dn == common::oracle_dn(&m, f.classes(), 2 * len) {
            prop_assert!(common::triangle_ok(&dn));
            prop_assert!(chain_metric(&m, &f, ChainLength::Finite(len)).unwrap().equals_dinf);
        }
    }

    #[test]
    fn discrete_family_quotients_are_two_step(seed in any::<u64>(), n in 1usize..10, k in 1usize..10) {
        let (m, f) = instance(seed, n, k, false);
        let family = f.members();
        let q = quotient_by_discrete_family(&m, &family).unwrap();
        prop_assert!(q.equals_dinf && q.is_metric);
        prop_assert!(metrize::check_metric_axioms(&q.space, false).unwrap().passed);
        prop_assert!(common::triangle_ok(&q.space.matrix().to_vec()));
        // the quotient map is 1-Lipschitz
        for (x, y) in m.pairs() {
            prop_assert!(q.space.d(q.surjection.class_of(x), q.surjection.class_of(y)) <= m.d(x, y));
        }
    }

    #[test]
    fn amalgams_are_two_step(seed in any::<u64>(), n in 2usize..10, shared in 1usize..4) {
        let mut rng = common::rng(seed);
        let w = gen::metric(&mut rng, n, 6);
        let shared = shared.min(n - 1);
        // X = first part plus the shared points, Y = shared points plus the rest
        let split = rng_split(seed, n, shared);
        let xs: Vec<usize> = (0..split + shared).collect();
        let ys: Vec<usize> = (split..n).collect();
        let (x, y) = (w.restrict(&xs), w.restrict(&ys));
        let a: Vec<usize> = (split..split + shared).collect();
        let b: Vec<usize> = (0..shared).collect();
        let g = amalgamated_union(&x, &y, &a, &b).unwrap();
        prop_assert!(g.equals_dinf && g.is_metric);
        prop_assert_eq!(&g.space.matrix().to_vec(), &common::oracle_dinf(&metrize::combinators::disjoint_union_metric(&x, &y).unwrap(), g.surjection.classes()));
        for i in 0..x.len() {
            for j in 0..x.len() {
                prop_assert_eq!(g.space.d(i, j), x.d(i, j));
            }
        }
        let class_of_y = |j: usize| g.surjection.class_of(x.len() + j);
        for i in 0..y.len() {
            for j in 0..y.len() {
                prop_assert_eq!(g.space.d(class_of_y(i), class_of_y(j)), y.d(i, j));
            }
        }
    }

    #[test]
    fn adjunction_certificates(seed in any::<u64>(), nx in 1usize..7, ny in 1usize..5, dom in 1usize..5) {
        let mut rng = common::rng(seed);
        let x = gen::metric(&mut rng, nx, 6);
        let y = gen::metric(&mut rng, ny, 6);
        let f = gen::partial_map(&mut rng, nx, ny, dom);
        let r = adjunction_space(&x, &y, &f).unwrap();
        prop_assert!(r.d3_equals_dinf && r.is_metric && r.embedded_y && r.free_points_separated && r.identification_lipschitz);
        let oracle = common::oracle_dinf(&r.disjoint_union, r.surjection.classes());
        prop_assert_eq!(&r.space.matrix().to_vec(), &oracle);
        for i in 0..ny {
            for j in 0..ny {
                prop_assert_eq!(&oracle[r.first_y_class + i][r.first_y_class + j], y.d(i, j));
            }
        }
        let a = f.domain();
        for c in 0..r.first_y_class {
            let xpt = r.surjection.members()[c][0];
            let to_a = a.iter().map(|&s| r.disjoint_union.d(xpt, s).clone()).min().unwrap();
            prop_assert!(to_a.is_positive());
            let bound = to_a.min(Scalar::one());
            for j in 0..ny {
                prop_assert!(oracle[c][r.first_y_class + j] >= bound);
            }
        }
        for (p, s) in r.disjoint_union.pairs() {
            prop_assert!(&oracle[r.surjection.class_of(p)][r.surjection.class_of(s)] <= r.disjoint_union.d(p, s));
        }
        prop_assert!(r.disjoint_union.pairs().all(|(p, s)| r.disjoint_union.d(p, s) <= &Scalar::from_int(2)));
    }
}

fn rng_split(seed: u64, n: usize, shared: usize) -> usize {
    (seed as usize) % (n - shared + 1)
}
