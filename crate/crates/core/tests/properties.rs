use std::collections::HashMap;

use kappa_core::kappa::{lambda_coeff, product_with, reduce_to_basis, x_coeff, KappaMonomial, KappaPoly, Method, ModuliContext};
use kappa_core::numeric::{binomial, falling_factorial, ratio};
use kappa_core::oracle::{integrate_kappa_top, pair_kappa_stratum, psi_integral, DimensionSequence};
use kappa_core::partition::{
    bell, enumerate_set_partitions, induced_partition, refinements, refines, restrict_partition,
    stirling2,
};
use kappa_core::{Exec, IntMultiSet, SetPartition};
use num_bigint::BigInt;
use proptest::prelude::*;

fn partition_of(labels: &[usize]) -> SetPartition {
    SetPartition::from_labels(labels)
}

/// Common refinement of two partitions of the same ground set.
fn meet(p: &SetPartition, r: &SetPartition) -> SetPartition {
    let mut ids = HashMap::new();
    let labels: Vec<usize> = (0..p.ground_size())
        .map(|i| {
            let next = ids.len();
            *ids.entry((p.block_of(i), r.block_of(i))).or_insert(next)
        })
        .collect();
    SetPartition::from_labels(&labels)
}

fn labels(k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..k, k)
}

fn partition_pair() -> impl Strategy<Value = (SetPartition, SetPartition)> {
    (1usize..=7).prop_flat_map(|k| (labels(k), labels(k)))
        .prop_map(|(a, b)| (partition_of(&a), partition_of(&b)))
}

fn small_multiset(max_len: usize, max_entry: u32) -> impl Strategy<Value = IntMultiSet> {
    prop::collection::vec(1..=max_entry, 1..=max_len).prop_map(IntMultiSet::new)
}

proptest! {
    #[test]
    fn refinement_is_a_partial_order((p, r) in partition_pair()) {
        prop_assert!(refines(&p, &p).unwrap());
        if refines(&p, &r).unwrap() && refines(&r, &p).unwrap() {
            prop_assert_eq!(&p, &r);
        }
        let m = meet(&p, &r);
        prop_assert!(refines(&m, &p).unwrap() && refines(&m, &r).unwrap());
        prop_assert!(refines(&SetPartition::finest(p.ground_size()), &m).unwrap());
        prop_assert!(refines(&m, &SetPartition::coarsest(p.ground_size())).unwrap());
    }

    #[test]
    fn induced_partition_has_one_block_per_coarse_block((p, r) in partition_pair()) {
        let q = meet(&p, &r);
        let induced = induced_partition(&p, &q).unwrap();
        prop_assert_eq!(induced.len(), p.len());
        prop_assert_eq!(induced.ground_size(), q.len());
    }

    #[test]
    fn restrictions_reassemble((p, r) in partition_pair()) {
        let q = meet(&p, &r);
        let mut total = 0;
        for block in p.blocks() {
            let sub = restrict_partition(&q, block).unwrap();
            prop_assert_eq!(sub.ground_size(), block.len());
            total += sub.len();
            // map back: indices in the same restricted block share a q-block
            for (x, &i) in block.iter().enumerate() {
                for (y, &j) in block.iter().enumerate() {
                    prop_assert_eq!(sub.block_of(x) == sub.block_of(y), q.block_of(i) == q.block_of(j));
                }
            }
        }
        prop_assert_eq!(total, q.len());
    }

    #[test]
    fn canonical_form_is_idempotent(l in (1usize..=8).prop_flat_map(labels)) {
        let p = partition_of(&l);
        prop_assert_eq!(&SetPartition::from_blocks(p.blocks().to_vec()).unwrap(), &p);
        prop_assert_eq!(&SetPartition::from_labels(p.labels()), &p);
        prop_assert_eq!(&SetPartition::parse(&p.to_string()).unwrap(), &p);
    }

    #[test]
    fn refinements_are_exactly_the_refining_partitions(l in (1usize..=5).prop_flat_map(labels)) {
        let p = partition_of(&l);
        let listed = refinements(&p);
        let filtered: Vec<SetPartition> = enumerate_set_partitions(p.ground_size(), None)
            .filter(|q| refines(q, &p).unwrap())
            .collect();
        prop_assert_eq!(listed.len(), filtered.len());
        for q in &filtered {
            prop_assert!(listed.contains(q));
        }
    }

    #[test]
    fn falling_factorial_binomial_theorem(x in -20i64..=20, y in -20i64..=20, n in 0usize..=10) {
        let lhs = falling_factorial(&BigInt::from(x + y), n);
        let rhs: BigInt = (0..=n)
            .map(|i| binomial(n as i64, i as i64)
                * falling_factorial(&BigInt::from(x), i)
                * falling_factorial(&BigInt::from(y), n - i))
            .sum();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn psi_integral_is_symmetric(mut e in prop::collection::vec(0u32..4, 3..8), seed in any::<u64>()) {
        let before = psi_integral(&e).unwrap();
        let len = e.len();
        e.rotate_left((seed as usize) % len);
        e.swap(0, (seed as usize / 7) % len);
        prop_assert_eq!(psi_integral(&e).unwrap(), before);
    }

    #[test]
    fn product_is_graded_and_method_independent(a in small_multiset(4, 3), d in 1usize..=5, g in 0u32..=1) {
        let n = a.sum() + d as u32 + 2 - 2 * g;
        let ctx = ModuliContext::new(g, n);
        let closed = product_with(&a, &ctx, Method::Closed, Exec::Sequential).unwrap();
        for (m, _) in closed.terms() {
            prop_assert_eq!(m.degree(), a.sum());
            prop_assert!(m.len() <= d);
        }
        for method in [Method::Recursive, Method::Ck] {
            prop_assert_eq!(&product_with(&a, &ctx, method, Exec::Sequential).unwrap(), &closed);
        }
    }

    #[test]
    fn top_degree_three_ways(a in small_multiset(4, 3)) {
        let total = a.sum();
        let lambda = lambda_coeff(&a).unwrap();
        prop_assert_eq!(&integrate_kappa_top(&a, total + 3).unwrap(), &lambda);
        let dims = DimensionSequence::new(IntMultiSet::from([total]));
        prop_assert_eq!(&pair_kappa_stratum(&a, &dims).unwrap(), &lambda);
    }

    /// Basis reduction of a combination `c1 κ_B1 + c2 κ_B2` pairs with every
    /// stratum exactly like the combination itself.
    #[test]
    fn pairing_is_bilinear_and_preserved_by_reduction(
        b1 in small_multiset(3, 3),
        split in 0usize..3,
        c1 in -5i64..=5,
        c2 in -5i64..=5,
        d in 1usize..=4,
    ) {
        let total = b1.sum();
        // a second monomial of the same degree
        let parts = b1.len().max(1);
        let b2: IntMultiSet = {
            let k = 1 + split % parts;
            let head = total - (k as u32 - 1);
            std::iter::once(head).chain(std::iter::repeat_n(1, k - 1)).collect()
        };
        let mut combo = KappaPoly::zero();
        combo.add_term(KappaMonomial::new(b1.clone()).unwrap(), ratio(c1, 1));
        combo.add_term(KappaMonomial::new(b2.clone()).unwrap(), ratio(c2, 1));
        let n = total + d as u32 + 2;
        let reduced = reduce_to_basis(&combo, 0, n).unwrap();
        for part in kappa_core::multiset::integer_partitions(total, d) {
            let mut dims = part.into_vec();
            dims.resize(d, 0);
            let dims = DimensionSequence::new(IntMultiSet::new(dims));
            let direct = pair_kappa_stratum(&b1, &dims).unwrap() * ratio(c1, 1)
                + pair_kappa_stratum(&b2, &dims).unwrap() * ratio(c2, 1);
            let mut via_basis = ratio(0, 1);
            for (m, c) in reduced.terms() {
                via_basis += pair_kappa_stratum(m.indices(), &dims).unwrap() * c;
            }
            prop_assert_eq!(direct, via_basis);
        }
    }

    #[test]
    fn coefficients_ignore_execution_strategy(a in small_multiset(4, 4), d in 1usize..=4) {
        let ctx = ModuliContext::genus_zero(a.sum() + d as u32 + 2);
        prop_assert_eq!(
            product_with(&a, &ctx, Method::Closed, Exec::Sequential).unwrap(),
            product_with(&a, &ctx, Method::Closed, Exec::Parallel).unwrap()
        );
    }
}

#[test]
fn enumeration_counts_match_bell_and_stirling() {
    for k in 0..=8usize {
        assert_eq!(BigInt::from(enumerate_set_partitions(k, None).count()), bell(k));
        for m in 0..=k + 1 {
            assert_eq!(
                BigInt::from(enumerate_set_partitions(k, Some(m)).count()),
                stirling2(k, m),
                "k={k} m={m}"
            );
        }
    }
}

#[test]
fn x_coeff_rejects_too_many_blocks() {
    let a = IntMultiSet::from([1, 1, 1]);
    assert!(x_coeff(&SetPartition::finest(3), &a, 2, Method::Closed).is_err());
}
