mod common;

use coarselab::backends::LsrBackend;
use coarselab::dimension::{self, Cover, IntervalRule};
use coarselab::famtable;
use coarselab::lineset::hausdorff_distance;
use coarselab::setcore::{downward_closure, ll_refines, vee};
use coarselab::structures::{self, ClosureOp, ExplicitLSR};
use coarselab::{ExtendedDistance, Family, LineSet, Subset, Universe};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const W: usize = 4;

fn family() -> impl Strategy<Value = Family> {
    prop::collection::btree_set(0u32..16, 0..5).prop_map(|s| Family::new(W, s.into_iter().map(Subset)).unwrap())
}

fn masks(f: &Family) -> Vec<u32> {
    f.members().iter().map(|s| s.mask()).collect()
}

fn periodic() -> impl Strategy<Value = (Vec<u64>, Vec<(u64, u64)>)> {
    (prop::collection::vec(0u64..30, 0..4), prop::collection::vec((0u64..20, 1u64..9), 0..3))
        .prop_filter("nonempty", |(f, p)| !f.is_empty() || !p.is_empty())
}

fn line((finite, progs): (Vec<u64>, Vec<(u64, u64)>)) -> LineSet {
    LineSet::periodic(finite, progs, vec![]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vee_matches_pairwise_unions(a in family(), b in family()) {
        let v = vee(&a, &b).unwrap();
        prop_assert_eq!(code(&masks(&v)), common::vee(code(&masks(&a)), code(&masks(&b))));
        prop_assert_eq!(v, vee(&b, &a).unwrap());
        prop_assert_eq!(famtable::code_of(&vee(&a, &b).unwrap()), famtable::vee_code(famtable::code_of(&a), famtable::code_of(&b)));
    }

    #[test]
    fn vee_is_associative(a in family(), b in family(), c in family()) {
        let left = vee(&vee(&a, &b).unwrap(), &c).unwrap();
        let right = vee(&a, &vee(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn ll_refines_matches_definition(a in family(), b in family(), c in family()) {
        let oracle = |b: &Family, a: &Family| masks(a).iter().all(|x| masks(b).iter().any(|y| y & !x == 0));
        prop_assert_eq!(ll_refines(&b, &a).unwrap(), oracle(&b, &a));
        prop_assert!(ll_refines(&a, &a).unwrap() || a.is_empty());
        if ll_refines(&c, &b).unwrap() && ll_refines(&b, &a).unwrap() {
            prop_assert!(ll_refines(&c, &a).unwrap());
        }
        // A ∨ B is refined by A
        prop_assert!(b.is_empty() || ll_refines(&a, &vee(&a, &b).unwrap()).unwrap());
    }

    #[test]
    fn downward_closure_is_idempotent_and_monotone(a in family(), b in family()) {
        let once = downward_closure(&[a.clone()], 1 << 20).unwrap();
        let twice = downward_closure(&once, 1 << 20).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.len(), 1usize << a.len());
        let both = downward_closure(&[a, b], 1 << 20).unwrap();
        prop_assert!(once.iter().all(|f| both.contains(f)));
    }

    #[test]
    fn closure_from_closed_sets_is_kuratowski(closed in prop::collection::vec(0u32..16, 0..6)) {
        let cl = ClosureOp::from_closed_sets(W, &closed).unwrap();
        for a in 0u32..16 {
            prop_assert_eq!(a & !cl.close(a), 0);
            prop_assert_eq!(cl.close(cl.close(a)), cl.close(a));
            for b in 0u32..16 {
                prop_assert_eq!(cl.close(a | b), cl.close(a) | cl.close(b));
            }
        }
        prop_assert_eq!(cl.close(0), 0);
    }

    #[test]
    fn hausdorff_is_a_pseudometric(a in periodic(), b in periodic(), c in periodic()) {
        let (a, b, c) = (line(a), line(b), line(c));
        let d = |x: &LineSet, y: &LineSet| hausdorff_distance(x, y).unwrap();
        prop_assert_eq!(d(&a, &a), ExtendedDistance::Finite(0));
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        if let (ExtendedDistance::Finite(ab), ExtendedDistance::Finite(bc)) = (d(&a, &b), d(&b, &c)) {
            prop_assert!(d(&a, &c).at_most(ab + bc));
        }
    }

    #[test]
    fn periodic_union_is_pointwise(a in periodic(), b in periodic()) {
        let (a, b) = (line(a), line(b));
        let u = a.union(&b).unwrap();
        for n in 0..400 {
            prop_assert_eq!(u.member(n), a.member(n) || b.member(n));
        }
    }

    #[test]
    fn generated_structures_satisfy_the_axioms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_lsr(3, &mut rng);
        prop_assert!(structures::check_lsr_axioms(&c).all_pass());
        prop_assert_eq!(structures::is_ls_regular(&c), ls_regular(&c));
        let gens = c.families();
        prop_assert_eq!(ExplicitLSR::generated_by(c.universe().clone(), &gens).unwrap().maximal(), c.maximal());
    }
}

/// Star-finiteness against windowed brute force: a point's incidence in the
/// distinct windowed members stops growing exactly for star-finite rules.
#[test]
fn topo_star_finite_gate() {
    let mut rng = ChaCha8Rng::seed_from_u64(1024);
    let mut seen = 0;
    while seen < 50 {
        let lo_a = rng.gen_range(0..3);
        let lo_b = rng.gen_range(0..5);
        let hi_a = lo_a + rng.gen_range(0..3);
        let hi_b = lo_b + rng.gen_range(0..5);
        let rule = IntervalRule::new(lo_a, lo_b, hi_a, hi_b).unwrap();
        let incidence = |n: u64| {
            let mut ms: Vec<(u64, u64)> = (0..=n)
                .map(|i| (lo_a * i + lo_b, hi_a * i + hi_b))
                .filter(|(lo, _)| *lo <= n)
                .map(|(lo, hi)| (lo, hi.min(n)))
                .collect();
            ms.sort();
            ms.dedup();
            let p = lo_b.max(1);
            ms.iter().filter(|(lo, hi)| *lo <= p && p <= *hi).count()
        };
        let stable = (6..10).all(|e| incidence(1 << e) == incidence(1 << (e + 1)));
        let v = dimension::is_uniformly_bounded(&Cover::Rule(rule), &LsrBackend::TopoTrace).unwrap();
        assert_eq!(v.is_yes(), stable, "{rule:?}");
        seen += 1;
    }
}

#[test]
fn uniformly_bounded_matches_transversal_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let c = random_lsr(3, &mut rng);
        let b = LsrBackend::Explicit(c.clone());
        for _ in 0..10 {
            let mut cover: Vec<u32> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(1..8)).collect();
            cover.sort_unstable();
            cover.dedup();
            let v = dimension::is_uniformly_bounded(&Cover::Explicit { width: 3, members: cover.clone() }, &b).unwrap();
            assert_eq!(v.is_yes(), uniformly_bounded(&c, &cover), "{cover:?}");
        }
    }
}

#[test]
fn explicit_suites_on_partition_structures() {
    for n in 1..=3 {
        let u = Universe::letters(n).unwrap();
        for p in partitions(n) {
            let c = LsrBackend::partition(u.clone(), &p).unwrap().to_explicit().unwrap();
            assert!(structures::check_lsr_axioms(&c).all_pass());
            assert!(structures::is_ls_regular(&c));
            let nr = coarselab::backends::induced_nearness(&c, &ClosureOp::discrete(n).unwrap()).unwrap();
            assert!(structures::check_nearness_axioms(&nr).all_pass(), "{p:?}");
        }
    }
}
