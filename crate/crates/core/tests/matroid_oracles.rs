//! Exhaustive and randomized oracles for the matroid layer: rank axioms,
//! closure idempotence, flat counts against enumeration, independence
//! augmentation, and an absorbing-chain oracle for the average delay.

use std::collections::BTreeMap;
use std::sync::Arc;

use flatcode_core::analysis::{average_delay, flat_cardinality};
use flatcode_core::gf::Field;
use flatcode_core::matroid::{Matroid, Packet, Protocol};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn matroid(kind: Protocol, q: u64, n: usize) -> Matroid {
    Matroid::new(kind, Field::of_order(q).unwrap(), n)
}

fn random_elements(m: &Matroid, count: usize, rng: &mut ChaCha12Rng) -> Vec<Packet> {
    (0..count).map(|_| m.sample_ground(rng)).collect()
}

#[test]
fn rank_axioms_randomized() {
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    for kind in [Protocol::Saf, Protocol::Rlnc, Protocol::Ranc] {
        let m = matroid(kind, 3, 3);
        for _ in 0..500 {
            let a = random_elements(&m, 3, &mut rng);
            let b = random_elements(&m, 2, &mut rng);
            // Monotone unit increments.
            let mut prev = 0;
            for i in 0..=a.len() {
                let r = m.rank_of(&a[..i]).unwrap();
                assert!(r >= prev && r <= prev + 1);
                prev = r;
            }
            // Submodularity with multiset intersection of the element lists.
            let union: Vec<Packet> = a.iter().chain(&b).cloned().collect();
            let inter: Vec<Packet> = a.iter().filter(|x| b.contains(x)).cloned().collect();
            let lhs = m.rank_of(&union).unwrap() + m.rank_of(&inter).unwrap();
            let rhs = m.rank_of(&a).unwrap() + m.rank_of(&b).unwrap();
            assert!(lhs <= rhs, "{kind:?}: submodularity violated");
        }
    }
}

#[test]
fn closure_is_idempotent_and_contains_inputs() {
    let mut rng = ChaCha12Rng::seed_from_u64(102);
    for kind in [Protocol::Saf, Protocol::Rlnc, Protocol::Ranc] {
        let m = matroid(kind, 4, 3);
        for _ in 0..200 {
            let elems = random_elements(&m, 3, &mut rng);
            let c1 = m.closure(&elems).unwrap();
            for e in &elems {
                assert!(m.contains(&c1, e).unwrap());
            }
            assert_eq!(c1.rank(), m.rank_of(&elems).unwrap());
            // Closing a spanning sample of the closure changes nothing.
            let sample: Vec<Packet> = (0..8)
                .filter_map(|_| m.sample_element(&c1, &mut rng).ok())
                .collect();
            let c2 = m.closure(&sample).unwrap();
            if c2.rank() == c1.rank() {
                assert!(m.flats_equal(&c1, &c2).unwrap());
            }
        }
    }
}

#[test]
fn ranc_flat_counts_match_enumeration_small_grid() {
    for q in [2u64, 3] {
        for n in 1..=4usize {
            if q == 3 && n == 4 {
                continue; // 1080 flats at k=2 still fine, but keep runtime low
            }
            let m = matroid(Protocol::Ranc, q, n);
            for k in 0..=n + 1 {
                let (n_k, c_k) = m.flat_counts(k).unwrap();
                let flats = m.enumerate_flats(k).unwrap();
                assert_eq!(BigUint::from(flats.len()), n_k, "q={q} n={n} k={k}");
                // Spot-check cardinalities by counting contained points.
                if k >= 1 {
                    let ground = m.enumerate_ground().unwrap();
                    for f in flats.iter().take(3) {
                        let cnt = ground.iter().filter(|p| m.contains(f, p).unwrap()).count();
                        assert_eq!(BigUint::from(cnt), c_k);
                    }
                }
            }
        }
    }
}

#[test]
fn ranc_flat_counts_match_enumeration_q3_n4() {
    let m = matroid(Protocol::Ranc, 3, 4);
    for k in 0..=5usize {
        let (n_k, _) = m.flat_counts(k).unwrap();
        let flats = m.enumerate_flats(k).unwrap();
        assert_eq!(BigUint::from(flats.len()), n_k, "k={k}");
    }
}

#[test]
fn independence_augmentation_randomized() {
    let mut rng = ChaCha12Rng::seed_from_u64(103);
    for kind in [Protocol::Saf, Protocol::Rlnc, Protocol::Ranc] {
        let m = matroid(kind, 4, 4);
        for _ in 0..100 {
            let k = 3;
            let flat = m.random_flat(k, &mut rng).unwrap();
            // An independent pair inside the flat…
            let mut indep: Vec<Packet> = Vec::new();
            while indep.len() < 2 {
                let e = m.sample_element(&flat, &mut rng).unwrap();
                let mut trial = indep.clone();
                trial.push(e.clone());
                if m.rank_of(&trial).unwrap() == trial.len() {
                    indep = trial;
                }
            }
            // …extends to a basis of the flat without leaving it.
            let mut steps = 0;
            while m.rank_of(&indep).unwrap() < k {
                let e = m.sample_element(&flat, &mut rng).unwrap();
                assert!(m.contains(&flat, &e).unwrap());
                let mut trial = indep.clone();
                trial.push(e);
                if m.rank_of(&trial).unwrap() > m.rank_of(&indep).unwrap() {
                    indep = trial;
                }
                steps += 1;
                assert!(steps < 10_000, "augmentation did not progress");
            }
            let spanned = m.closure(&indep).unwrap();
            assert!(m.flats_equal(&spanned, &flat).unwrap());
        }
    }
}

/// Expected number of uniform draws from a flat's elements until the seen
/// subset reaches full rank, by exact backward recursion over subsets.
fn absorbing_chain_delay(m: &Matroid, elements: &[Packet], k: usize) -> BigRational {
    let c = elements.len();
    assert!(c <= 16, "oracle only for tiny flats");
    let mut memo: BTreeMap<u32, BigRational> = BTreeMap::new();
    // Process subsets in decreasing popcount so successors are ready.
    let mut subsets: Vec<u32> = (0..(1u32 << c)).collect();
    subsets.sort_by_key(|s| std::cmp::Reverse(s.count_ones()));
    for s in subsets {
        let seen: Vec<Packet> = (0..c)
            .filter(|i| s >> i & 1 == 1)
            .map(|i| elements[i].clone())
            .collect();
        if m.rank_of(&seen).unwrap() == k {
            memo.insert(s, BigRational::zero());
            continue;
        }
        // E[S] = (1 + Σ_{e∉S} E[S∪e]/C) / (1 − |S|/C)
        let mut sum = BigRational::zero();
        for i in 0..c {
            if s >> i & 1 == 0 {
                sum += &memo[&(s | (1 << i))];
            }
        }
        let c_rat = BigRational::from_integer(c.into());
        let stay = BigRational::from_integer(s.count_ones().into()) / &c_rat;
        let e = (BigRational::one() + sum / &c_rat) / (BigRational::one() - stay);
        memo.insert(s, e);
    }
    memo[&0].clone()
}

#[test]
fn delay_matches_absorbing_chain_oracle_on_tiny_flats() {
    let mut rng = ChaCha12Rng::seed_from_u64(104);
    let cases = [
        (Protocol::Ranc, 2u64, 2usize, 2usize), // two-point line: delay 3
        (Protocol::Ranc, 3, 2, 2),
        (Protocol::Rlnc, 2, 3, 2),
        (Protocol::Saf, 2, 2, 3),
        (Protocol::Rlnc, 3, 2, 2),
    ];
    for (kind, q, n, k) in cases {
        let m = matroid(kind, q, n);
        let flat = m.random_flat(k, &mut rng).unwrap();
        // Enumerate the flat's elements.
        let ground = m.enumerate_ground().unwrap();
        let elems: Vec<Packet> = ground
            .into_iter()
            .filter(|p| m.contains(&flat, p).unwrap())
            .collect();
        assert_eq!(
            BigUint::from(elems.len()),
            flat_cardinality(kind, q, k),
            "cardinality mismatch"
        );
        let oracle = absorbing_chain_delay(&m, &elems, k);
        assert_eq!(oracle, average_delay(kind, q, k), "{kind:?} q={q} k={k}");
    }
    // The headline tiny value: a binary affine line has delay exactly 3.
    assert_eq!(
        average_delay(Protocol::Ranc, 2, 2),
        BigRational::from_integer(3.into())
    );
}

#[test]
fn saf_flats_are_plain_subsets() {
    // Any subset is a flat: closure adds nothing, at any rank.
    let mut rng = ChaCha12Rng::seed_from_u64(105);
    let m = matroid(Protocol::Saf, 5, 2);
    for _ in 0..100 {
        let elems = random_elements(&m, 4, &mut rng);
        let flat = m.closure(&elems).unwrap();
        let distinct: std::collections::BTreeSet<_> = elems.iter().cloned().collect();
        assert_eq!(flat.rank(), distinct.len());
        let ground = m.enumerate_ground().unwrap();
        for p in ground {
            assert_eq!(m.contains(&flat, &p).unwrap(), distinct.contains(&p));
        }
    }
}

#[test]
fn shared_field_contexts_are_thread_safe() {
    // Matroids and flats are immutable; sampling with per-thread RNGs on a
    // shared instance must agree with the sequential reference.
    let field = Field::of_order(16).unwrap();
    let m = Arc::new(Matroid::new(Protocol::Ranc, field, 6));
    let flat = Arc::new({
        let mut rng = ChaCha12Rng::seed_from_u64(106);
        m.random_flat(3, &mut rng).unwrap()
    });
    let mut handles = Vec::new();
    for t in 0..4u64 {
        let m = Arc::clone(&m);
        let flat = Arc::clone(&flat);
        handles.push(std::thread::spawn(move || {
            let mut rng = ChaCha12Rng::seed_from_u64(200 + t);
            let mut ok = true;
            for _ in 0..1000 {
                let e = m.sample_element(&flat, &mut rng).unwrap();
                ok &= m.contains(&flat, &e).unwrap();
            }
            ok
        }));
    }
    for h in handles {
        assert!(h.join().unwrap());
    }
}
