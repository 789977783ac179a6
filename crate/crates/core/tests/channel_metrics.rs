//! Oracles for the distance layer: metric axioms, the BFS shortest-path
//! check on the full flat lattice, the submodular-chain inequalities with
//! their protocol-specific equality cases, and the half-sum identity for the
//! modified distance.

use flatcode_core::channel::{
    apply_operator_channel, distance, enumerate_all_flats, join_rank, lattice_bfs_distance,
    meet, parallel_hyperplanes,
};
use flatcode_core::gf::Field;
use flatcode_core::matroid::{Flat, Matroid, Protocol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn matroid(kind: Protocol, q: u64, n: usize) -> Matroid {
    Matroid::new(kind, Field::of_order(q).unwrap(), n)
}

fn random_flat_any_rank(m: &Matroid, max_rank: usize, rng: &mut ChaCha12Rng) -> Flat {
    let k = rng.gen_range(0..=max_rank);
    m.random_flat(k, rng).unwrap()
}

#[test]
fn metric_axioms_on_random_triples() {
    let mut rng = ChaCha12Rng::seed_from_u64(300);
    for (kind, q, n) in [
        (Protocol::Saf, 3u64, 2usize),
        (Protocol::Rlnc, 2, 4),
        (Protocol::Ranc, 2, 3),
    ] {
        let m = matroid(kind, q, n);
        let max_rank = m.rank_small().min(3);
        for _ in 0..2000 {
            let f = random_flat_any_rank(&m, max_rank, &mut rng);
            let g = random_flat_any_rank(&m, max_rank, &mut rng);
            let h = random_flat_any_rank(&m, max_rank, &mut rng);
            let dfg = distance(&m, &f, &g).unwrap();
            let dgf = distance(&m, &g, &f).unwrap();
            assert_eq!(dfg.lattice, dgf.lattice);
            assert_eq!(dfg.modified, dgf.modified);
            assert_eq!(dfg.lattice == 0, m.flats_equal(&f, &g).unwrap());
            assert_eq!(dfg.modified == 0, m.flats_equal(&f, &g).unwrap());
            let dfh = distance(&m, &f, &h).unwrap();
            let dgh = distance(&m, &g, &h).unwrap();
            assert!(dfh.lattice <= dfg.lattice + dgh.lattice);
            assert!(dfh.modified <= dfg.modified + dgh.modified);
            // Half-sum identity relating the two metrics.
            let rank_gap = f.rank().abs_diff(g.rank());
            assert_eq!(2 * dfg.modified, dfg.lattice + rank_gap);
        }
    }
}

#[test]
fn bfs_oracle_equals_lattice_distance_on_all_pairs() {
    // Affine geometry on GF(2)^3 and projective geometry on GF(2)^4.
    for (kind, n) in [(Protocol::Ranc, 3usize), (Protocol::Rlnc, 4)] {
        let m = matroid(kind, 2, n);
        let all = enumerate_all_flats(&m).unwrap();
        // Sanity: the whole lattice is present.
        let expected: usize = (0..=m.rank_small())
            .map(|k| {
                let (nk, _) = m.flat_counts(k).unwrap();
                let nk: u64 = nk.try_into().unwrap();
                nk as usize
            })
            .sum();
        assert_eq!(all.len(), expected);
        for (i, f) in all.iter().enumerate() {
            for g in all.iter().skip(i) {
                let d = distance(&m, f, g).unwrap();
                let bfs = lattice_bfs_distance(&m, f, g).unwrap();
                assert_eq!(d.lattice, bfs, "{kind:?}");
            }
        }
    }
}

#[test]
fn submodular_chain_equality_cases() {
    let mut rng = ChaCha12Rng::seed_from_u64(301);
    // SAF and RLNC attain equality in both relaxations of d_L.
    for (kind, q, n) in [(Protocol::Saf, 3u64, 2usize), (Protocol::Rlnc, 2, 4)] {
        let m = matroid(kind, q, n);
        for _ in 0..500 {
            let f = random_flat_any_rank(&m, 3, &mut rng);
            let g = random_flat_any_rank(&m, 3, &mut rng);
            let d = distance(&m, &f, &g).unwrap();
            let w = meet(&m, &f, &g).unwrap();
            let join = join_rank(&m, &f, &g).unwrap();
            assert_eq!(d.lattice, join - w.rank(), "{kind:?} eq in first relaxation");
            assert_eq!(
                d.lattice,
                f.rank() + g.rank() - 2 * w.rank(),
                "{kind:?} eq in second relaxation"
            );
            assert_eq!(
                d.modified,
                f.rank().max(g.rank()) - w.rank(),
                "{kind:?} eq in modified relaxation"
            );
        }
    }
    // The affine geometry satisfies the inequalities, strictly for parallel
    // hyperplanes.
    let m = matroid(Protocol::Ranc, 2, 3);
    for _ in 0..500 {
        let f = random_flat_any_rank(&m, 4, &mut rng);
        let g = random_flat_any_rank(&m, 4, &mut rng);
        let d = distance(&m, &f, &g).unwrap();
        let w = meet(&m, &f, &g).unwrap();
        let join = join_rank(&m, &f, &g).unwrap();
        assert!(d.lattice <= join - w.rank());
        assert!(join - w.rank() <= f.rank() + g.rank() - 2 * w.rank());
        assert!(d.modified <= f.rank().max(g.rank()) - w.rank());
    }
    let (f, g) = parallel_hyperplanes(&m);
    let d = distance(&m, &f, &g).unwrap();
    let w = meet(&m, &f, &g).unwrap();
    assert!(d.lattice < join_rank(&m, &f, &g).unwrap() - w.rank());
    assert!(d.modified < f.rank().max(g.rank()) - w.rank());
}

#[test]
fn parallel_hyperplane_relaxations_violate_triangle_inequality() {
    // Against the whole space, the right-hand sides of the two relaxations
    // fail the triangle inequality, so neither is a metric on affine flats.
    let n = 3;
    let m = matroid(Protocol::Ranc, 2, n);
    let (f, g) = parallel_hyperplanes(&m);
    let whole = {
        let ground = m.enumerate_ground().unwrap();
        m.closure(&ground).unwrap()
    };
    let rhs1 = |a: &Flat, b: &Flat| {
        join_rank(&m, a, b).unwrap() - meet(&m, a, b).unwrap().rank()
    };
    // f→g directly costs n+1, but f→whole→g costs 1 + 1.
    assert_eq!(rhs1(&f, &g), n + 1);
    assert!(rhs1(&f, &whole) + rhs1(&whole, &g) < rhs1(&f, &g));
    let rhs2 = |a: &Flat, b: &Flat| {
        a.rank() + b.rank() - 2 * meet(&m, a, b).unwrap().rank()
    };
    assert_eq!(rhs2(&f, &g), 2 * n);
    assert!(rhs2(&f, &whole) + rhs2(&whole, &g) < rhs2(&f, &g));
}

#[test]
fn operator_channel_offsets_observed_high_frequency_at_large_q() {
    // With q = 2^8, random insertions land in generic position almost
    // surely, so the observed (δ, ε) equal the applied ones.
    let mut rng = ChaCha12Rng::seed_from_u64(302);
    let m = matroid(Protocol::Ranc, 256, 6);
    let mut exact = 0;
    let trials = 300;
    for _ in 0..trials {
        let f = m.random_flat(3, &mut rng).unwrap();
        let g = apply_operator_channel(&m, &f, 2, 1, &mut rng).unwrap();
        let d = distance(&m, &f, &g).unwrap();
        assert!(d.insertions <= 2 && d.deletions <= 1);
        if d.insertions == 2 && d.deletions == 1 {
            exact += 1;
        }
    }
    assert!(exact >= trials - 3, "only {exact}/{trials} at full offset");
}

#[test]
fn union_path_is_shortest_randomized() {
    // The distance via the join never exceeds any two-leg path through
    // another flat, matching the BFS oracle spot checks above.
    let mut rng = ChaCha12Rng::seed_from_u64(303);
    let m = matroid(Protocol::Ranc, 2, 3);
    let all = enumerate_all_flats(&m).unwrap();
    for _ in 0..300 {
        let pick = |rng: &mut ChaCha12Rng| {
            let i = rng.gen_range(0..all.len());
            all[i].clone()
        };
        let f = pick(&mut rng);
        let g = pick(&mut rng);
        let via = pick(&mut rng);
        let d = |a: &Flat, b: &Flat| distance(&m, a, b).unwrap().lattice;
        assert!(d(&f, &g) <= d(&f, &via) + d(&via, &g));
    }
}
