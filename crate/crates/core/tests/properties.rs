mod common;

use latinapprox::oracle::{brute_force_realize, isotopic};
use latinapprox::{
    amalgamation, complete_partial, gqq_of, lattice_partition, line_sums, loopify, rado_allocate, realize_amalgamation,
    round_to_amalgam, support_sets, verify_line_laws, verify_partition, w_exact, w_montecarlo, AtomizedSpace,
    CayleyTable, CompactWindow, GroupElement, GroupModel, IntegerAmalgam, LatinSquare, NeighborhoodSpec, Partition,
    PartialLatinSquare, PartitionError, RadoInstance, Rational, RoundingMode, Scalar, WTensor,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn r(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| r(n, d))
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (0i64..60, 1i64..60).prop_filter("in [0,1)", |(n, d)| n < d).prop_map(|(n, d)| r(n, d))
}

fn affine_element() -> impl Strategy<Value = Vec<Rational>> {
    ((1i64..20, 1i64..8), rational()).prop_map(|((a, d), b)| vec![r(a, d), b])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn affine_group_axioms(x in affine_element(), y in affine_element(), z in affine_element()) {
        let m = GroupModel::<Rational>::affine_line();
        let (x, y, z) = (m.element(x).unwrap(), m.element(y).unwrap(), m.element(z).unwrap());
        let left = m.mul(&m.mul(&x, &y).unwrap(), &z).unwrap();
        let right = m.mul(&x, &m.mul(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(m.mul(&x, &m.inv(&x).unwrap()).unwrap(), m.identity());
        prop_assert_eq!(m.mul(&m.identity(), &y).unwrap(), y);
    }

    #[test]
    fn torus_group_axioms(a in unit_rational(), b in unit_rational(), c in unit_rational(), d in unit_rational()) {
        let m = GroupModel::<Rational>::torus(2);
        let x = m.element(vec![a.clone(), b.clone()]).unwrap();
        let y = m.element(vec![c.clone(), d.clone()]).unwrap();
        prop_assert_eq!(m.mul(&x, &y).unwrap(), m.mul(&y, &x).unwrap());
        prop_assert_eq!(m.mul(&x, &m.inv(&x).unwrap()).unwrap(), m.identity());
        let dist = m.dist(&x, &y).unwrap();
        prop_assert!(dist >= Rational::zero() && dist <= r(1, 2));
        prop_assert_eq!(dist, m.dist(&y, &x).unwrap());
    }

    #[test]
    fn torus_metric_is_invariant(a in unit_rational(), b in unit_rational(), g in unit_rational()) {
        let m = GroupModel::<Rational>::torus(1);
        let (x, y, g) = (m.element(vec![a]).unwrap(), m.element(vec![b]).unwrap(), m.element(vec![g]).unwrap());
        let before = m.dist(&x, &y).unwrap();
        prop_assert_eq!(m.dist(&m.mul(&g, &x).unwrap(), &m.mul(&g, &y).unwrap()).unwrap(), before.clone());
        prop_assert_eq!(m.dist(&m.mul(&x, &g).unwrap(), &m.mul(&y, &g).unwrap()).unwrap(), before);
    }

    #[test]
    fn cayley_tables_are_groups(k in 1usize..5) {
        let t = CayleyTable::symmetric(k);
        let n = t.order();
        for a in 0..n {
            prop_assert_eq!(t.mul(a, t.inv(a)), t.identity());
            for b in 0..n {
                for c in 0..n {
                    prop_assert_eq!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn realized_amalgams_match_exactly(seed in any::<u64>(), n in 1usize..5, t in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_amalgam(n, t, &mut rng);
        let (sq, groups) = realize_amalgamation(&m).unwrap();
        prop_assert!(sq.is_latin());
        prop_assert!(groups.is_equisized());
        let outline: Vec<i64> = m.entries.iter().map(|x| x * m.t).collect();
        prop_assert_eq!(amalgamation(&sq, &groups), outline);
        let support = |i: usize, j: usize, k: usize| m.entries[i + n * (j + n * k)] > 0;
        prop_assert!(gqq_of(&sq, &groups).is_subset_of_support(n, support));
    }

    #[test]
    fn amalgam_of_a_square_realizes(seed in any::<u64>(), n in 1usize..4, t in 1usize..4) {
        // amalgamating a square of order n·t by t-blocks gives t²-line sums; split it back
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sq = common::random_latin(n * t, &mut rng);
        let groups = latinapprox::GroupedPartition::contiguous(n, t);
        let counts = amalgamation(&sq, &groups);
        let m = IntegerAmalgam::compact(n, (t * t) as i64, counts.clone()).unwrap();
        let (back, back_groups) = realize_amalgamation(&m).unwrap();
        let outline: Vec<i64> = counts.iter().map(|x| x * (t * t) as i64).collect();
        prop_assert_eq!(amalgamation(&back, &back_groups), outline);
    }

    #[test]
    fn completion_embeds(seed in any::<u64>(), n in 1usize..8, p in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (partial, _) = common::random_partial(n, p, &mut rng);
        let sq = complete_partial(&partial).unwrap();
        prop_assert_eq!(sq.order(), 2 * n);
        prop_assert!(sq.is_latin());
        for (r, c, s) in partial.filled() {
            prop_assert_eq!(sq.get(r, c), s);
        }
    }

    #[test]
    fn loopify_gives_a_unit(seed in any::<u64>(), n in 1usize..13) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sq = common::random_latin(n, &mut rng);
        let q0 = rng.gen_range(0..n);
        let l = loopify(&sq, q0).unwrap();
        prop_assert!(l.is_latin());
        prop_assert!(common::has_unit(&l, q0));
        prop_assert!(n > 6 || isotopic(&sq, &l));
    }

    #[test]
    fn csv_and_json_round_trip(seed in any::<u64>(), n in 1usize..7, p in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (partial, sq) = common::random_partial(n, p, &mut rng);
        prop_assert_eq!(&LatinSquare::from_csv(&sq.to_csv()).unwrap(), &sq);
        prop_assert_eq!(&LatinSquare::from_json(&sq.to_json(None)).unwrap().0, &sq);
        prop_assert_eq!(&PartialLatinSquare::from_csv(&partial.to_csv()).unwrap(), &partial);
        prop_assert_eq!(&PartialLatinSquare::from_json(&partial.to_json(None)).unwrap().0, &partial);
        let m = common::random_amalgam(n.min(4), 2, &mut rng);
        prop_assert_eq!(&IntegerAmalgam::from_json(&m.to_json()).unwrap(), &m);
    }

    #[test]
    fn rado_agrees_with_exhaustive_hall(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=12);
        let atoms = rng.gen_range(n..=40);
        let points = (0..atoms).map(|a| GroupElement::Line(r(a as i64, 1))).collect();
        let space = AtomizedSpace::from_weights(points, vec![r(1, atoms as i64); atoms], r(1, 1));
        let sets: Vec<Vec<usize>> = (0..n)
            .map(|_| (0..atoms).filter(|_| rng.gen_bool(0.3)).collect())
            .collect();
        let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
        let total: i64 = raw.iter().sum();
        let targets: Vec<Rational> = raw.iter().map(|&x| r(x, total)).collect();
        let inst = RadoInstance::new(sets, targets);
        let exhaustive = inst.hall_violation_exhaustive(&space);
        match rado_allocate(&space, &inst) {
            Err(PartitionError::HallViolation { subset, .. }) => {
                prop_assert!(exhaustive.is_some());
                prop_assert!(inst.hall_slack(&space, &subset) < Rational::zero());
            }
            Ok(p) => {
                prop_assert!(exhaustive.is_none());
                for (i, cell) in p.cells.iter().enumerate() {
                    if let latinapprox::Cell::Atoms(ids) = cell {
                        prop_assert!(ids.iter().all(|a| inst.cover_sets[i].contains(a)));
                    }
                }
            }
            Err(PartitionError::AtomTooCoarse { .. }) => prop_assert!(exhaustive.is_none()),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

#[test]
fn lattice_partitions_are_fine_and_equisized() {
    for (d, n) in [(1, 4), (1, 9), (2, 3), (3, 2)] {
        let m = GroupModel::<Rational>::torus(d);
        let p: Partition<Rational> = lattice_partition(&m, n).unwrap();
        let u = NeighborhoodSpec::new(r(1, n as i64)).unwrap();
        let rep = verify_partition(&p, &u, &m, None);
        assert!(rep.disjoint && rep.fine && rep.equisize && rep.representatives_inside);
        assert_eq!(rep.total_measure, Rational::one());
        assert_eq!(p.len(), n.pow(d as u32));
    }
}

#[test]
fn rounding_keeps_line_sums() {
    for n in [2usize, 4, 8] {
        let m = GroupModel::<Rational>::torus(1);
        let p = lattice_partition(&m, n).unwrap();
        let window = CompactWindow::whole_group();
        let w = w_exact(&p, &m, &window).unwrap();
        let s = support_sets(&p, &m, &window).unwrap();
        verify_line_laws(&w, &s, &Rational::one()).unwrap();
        let am = round_to_amalgam(&w, &s, &Rational::one(), 2, RoundingMode::Compact).unwrap();
        for k in 0..n * n {
            let (a, b) = (k % n, k / n);
            let over_k: i64 = (0..n).map(|x| am.get(a, b, x)).sum();
            let over_j: i64 = (0..n).map(|x| am.get(a, x, b)).sum();
            let over_i: i64 = (0..n).map(|x| am.get(x, a, b)).sum();
            assert_eq!((over_k, over_j, over_i), (2, 2, 2));
        }
        for (idx, &e) in am.entries.iter().enumerate() {
            if e > 0 {
                assert!(w.entries[idx] > Rational::zero());
            }
        }
    }
}

#[test]
fn brute_force_agrees_on_tiny_amalgams() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..40 {
        let n = rng.gen_range(1..=2);
        let t = rng.gen_range(1..=3);
        let m = common::random_amalgam(n, t, &mut rng);
        let ours = realize_amalgamation(&m).unwrap();
        let oracle = brute_force_realize(&m).unwrap().expect("realizable");
        let outline: Vec<i64> = m.entries.iter().map(|x| x * m.t).collect();
        assert_eq!(amalgamation(&ours.0, &ours.1), outline);
        assert_eq!(amalgamation(&oracle.0, &oracle.1), outline);
    }
}

/// Independent tensor for the circle: brute-force midpoint rule on a fine grid.
fn circle_tensor_by_grid(n: usize, grid: usize) -> Vec<f64> {
    let mut w = vec![0.0; n * n * n];
    let h = 1.0 / grid as f64;
    for a in 0..grid {
        for b in 0..grid {
            let x = (a as f64 + 0.5) * h;
            let y = (b as f64 + 0.5) * h;
            let q = (x - y).rem_euclid(1.0);
            let cell = |v: f64| ((v * n as f64) as usize).min(n - 1);
            w[cell(q) + n * (cell(y) + n * cell(x))] += h * h;
        }
    }
    w
}

#[test]
fn exact_circle_tensor_matches_grid_integration() {
    for n in [2usize, 3, 5] {
        let m = GroupModel::<Rational>::torus(1);
        let p = lattice_partition(&m, n).unwrap();
        let w = w_exact(&p, &m, &CompactWindow::whole_group()).unwrap();
        let grid = circle_tensor_by_grid(n, 997);
        for (e, g) in w.entries.iter().zip(&grid) {
            assert!((e.to_f64_lossy() - g).abs() < 5e-3, "{e} vs {g}");
        }
        let sums = line_sums(&w);
        assert!(sums.over_k.iter().all(|s| *s == r(1, (n * n) as i64)));
    }
}

#[test]
fn montecarlo_within_four_sigma_in_most_runs() {
    let m = GroupModel::<f64>::torus(1);
    let exact_model = GroupModel::<Rational>::torus(1);
    let p = lattice_partition(&m, 4).unwrap();
    let exact = w_exact(&lattice_partition(&exact_model, 4).unwrap(), &exact_model, &CompactWindow::whole_group()).unwrap();
    let good = (0..100u64)
        .filter(|&seed| {
            let w: WTensor<f64> = w_montecarlo(&p, &m, &CompactWindow::whole_group(), 64_000, seed).unwrap();
            let sd = w.mc_stddev.as_ref().unwrap();
            w.entries
                .iter()
                .zip(&exact.entries)
                .zip(sd)
                .all(|((a, e), s)| (a - e.to_f64_lossy()).abs() <= 4.0 * s.max(1e-12))
        })
        .count();
    assert!(good >= 95, "{good}/100 runs within 4 sigma");
}

#[test]
fn montecarlo_error_shrinks_with_samples() {
    let m = GroupModel::<f64>::torus(1);
    let exact_model = GroupModel::<Rational>::torus(1);
    let p = lattice_partition(&m, 4).unwrap();
    let exact = w_exact(&lattice_partition(&exact_model, 4).unwrap(), &exact_model, &CompactWindow::whole_group()).unwrap();
    let mean_err = |samples: usize| {
        (0..20u64)
            .map(|seed| {
                let w = w_montecarlo(&p, &m, &CompactWindow::whole_group(), samples, seed).unwrap();
                w.entries.iter().zip(&exact.entries).map(|(a, e)| (a - e.to_f64_lossy()).abs()).sum::<f64>()
            })
            .sum::<f64>()
    };
    assert!(mean_err(256_000) < mean_err(16_000));
}
