//! Bound consistency on enumerable instances: the generic Johnson oracle
//! against the specialized closed forms, the ordering between lower bound,
//! exact optimum, and every upper bound, achievability by lifted
//! maximum-rank-distance codes, and the Singleton count against the
//! enumerated min-over-flats form.

use flatcode_core::analysis::gaussian_binomial;
use flatcode_core::bounds::{
    code_bounds, exact_max_code, generic_johnson_oracle, max_clique_size,
};
use flatcode_core::channel::{distance, enumerate_all_flats, flat_contains_flat};
use flatcode_core::codes::{lift_affine, GabidulinCode};
use flatcode_core::codes::word_to_matrix;
use flatcode_core::gf::{ExtField, Field};
use flatcode_core::linalg::Matrix;
use flatcode_core::matroid::{Matroid, Protocol};
use num_bigint::BigUint;

fn ranc(q: u64, n: usize) -> Matroid {
    Matroid::new(Protocol::Ranc, Field::of_order(q).unwrap(), n)
}

#[test]
fn johnson_oracle_prefactors_match_closed_forms() {
    // Affine geometry on GF(2)^3, k = 2: the enumerated quantities behind
    // the Johnson bounds agree with the specialized arithmetic.
    let q = 2u64;
    let n = 3usize;
    let k = 2usize;
    let m = ranc(q, n);
    let ground = m.enumerate_ground().unwrap();
    assert_eq!(ground.len() as u64, q.pow(n as u32)); // N_1 = q^n

    let all = enumerate_all_flats(&m).unwrap();
    let flats_k: Vec<_> = all.iter().filter(|f| f.rank() == k).collect();
    let hyperplanes: Vec<_> = all.iter().filter(|f| f.rank() == n).collect();

    // c_k = q^{k-1}: every rank-k flat has the same cardinality.
    for f in &flats_k {
        let c = ground.iter().filter(|e| m.contains(f, e).unwrap()).count();
        assert_eq!(c as u64, q.pow((k - 1) as u32));
    }
    // N_{r-1} = q·[n over n-1]_q hyperplane flats.
    let expected_h: u64 = (q * u64::try_from(gaussian_binomial(n as u64, (n - 1) as u64, q))
        .unwrap()) as u64;
    assert_eq!(hyperplanes.len() as u64, expected_h);
    // h_k = [n-k+1 over 1]_q hyperplanes through every rank-k flat.
    let expected_hk: u64 =
        u64::try_from(gaussian_binomial((n - k + 1) as u64, 1, q)).unwrap();
    for f in &flats_k {
        let h = hyperplanes
            .iter()
            .filter(|hp| flat_contains_flat(&m, hp, f))
            .count();
        assert_eq!(h as u64, expected_hk);
    }
    // Contracting by a point yields the projective flat counts one level
    // down: rank-k flats through a fixed point number [n over k-1]_q.
    let e = &ground[3];
    let through = flats_k
        .iter()
        .filter(|f| m.contains(f, e).unwrap())
        .count();
    assert_eq!(
        BigUint::from(through),
        gaussian_binomial(n as u64, (k - 1) as u64, q)
    );
    // Restricting to a hyperplane yields the affine geometry one level down.
    let h = &hyperplanes[0];
    let inside = flats_k
        .iter()
        .filter(|f| flat_contains_flat(&m, h, f))
        .count();
    let m_small = ranc(q, n - 1);
    let (expect, _) = m_small.flat_counts(k).unwrap();
    assert_eq!(BigUint::from(inside), expect);
}

#[test]
fn bound_ordering_on_enumerable_instances() {
    for (q, n, k, d) in [
        (2u64, 3usize, 2usize, 2usize),
        (2, 4, 2, 2),
        (3, 3, 2, 2),
        (2, 3, 3, 2),
    ] {
        let m = ranc(q, n);
        let exact = exact_max_code(&m, k, d).unwrap();
        let report = code_bounds(q, n, k, d).unwrap();
        assert!(
            report.lower_lifted <= exact,
            "q={q} n={n} k={k} d={d}: lower {} vs exact {exact}",
            report.lower_lifted
        );
        assert!(
            exact <= report.upper_min(),
            "q={q} n={n} k={k} d={d}: exact {exact} vs uppers {:?}",
            report
        );
        // The generic oracle is also a certified upper bound.
        let oracle = generic_johnson_oracle(&m, k, d).unwrap();
        assert!(exact <= oracle, "exact {exact} vs oracle {oracle}");
        assert!(exact <= report.singleton);
    }
}

#[test]
fn singleton_count_matches_enumerated_min_over_flats() {
    // A(M,k,d) ≤ min over rank-(d-1) flats g of the number of rank-(k+d-1)
    // flats containing g; for the affine geometry this count is the Gaussian
    // binomial [n+2-d over k]_q.
    for (q, n, k, d) in [(2u64, 3usize, 2usize, 2usize), (2, 3, 1, 2), (3, 3, 2, 2)] {
        let m = ranc(q, n);
        let all = enumerate_all_flats(&m).unwrap();
        let gs: Vec<_> = all.iter().filter(|f| f.rank() == d - 1).collect();
        let bigs: Vec<_> = all.iter().filter(|f| f.rank() == k + d - 1).collect();
        let min_count = gs
            .iter()
            .map(|g| bigs.iter().filter(|f| flat_contains_flat(&m, f, g)).count())
            .min()
            .unwrap();
        let report = code_bounds(q, n, k, d).unwrap();
        if d > k.min(n + 1 - k) || d == 1 {
            continue; // convention branches carry no Singleton field to check
        }
        assert_eq!(BigUint::from(min_count), report.singleton, "q={q} n={n} k={k} d={d}");
    }
}

#[test]
fn lifted_mrd_codes_achieve_the_lower_bound() {
    // Exhaustive check on tiny instances: the affine liftings of a full
    // Gabidulin code hit the lower bound with exactly the designed distance.
    for (q, n, k, d) in [(2u64, 3usize, 2usize, 2usize), (2, 5, 2, 2), (2, 5, 3, 3)] {
        let field = Field::of_order(q).unwrap();
        let ext = ExtField::new(field.clone(), n - k + 1, None).unwrap();
        let code = GabidulinCode::new(ext.clone(), k, d, None).unwrap();
        let m = ranc(q, n);
        // Enumerate every message.
        let count: u64 = ext.order().try_into().unwrap();
        let mut flats = Vec::new();
        let mut idx = vec![0u64; code.dim()];
        'outer: loop {
            let msg: Vec<_> = idx.iter().map(|&i| ext.from_index(i)).collect();
            let word = code.encode(&msg).unwrap();
            let payload = word_to_matrix(&ext, &word);
            flats.push(lift_affine(&m, &payload).unwrap());
            for digit in idx.iter_mut() {
                *digit += 1;
                if *digit < count {
                    continue 'outer;
                }
                *digit = 0;
            }
            break;
        }
        let report = code_bounds(q, n, k, d).unwrap();
        assert_eq!(BigUint::from(flats.len()), report.lower_lifted);
        let mut min_d = usize::MAX;
        for i in 0..flats.len() {
            for j in i + 1..flats.len() {
                let dd = distance(&m, flats[i].flat(), flats[j].flat()).unwrap();
                min_d = min_d.min(dd.modified);
            }
        }
        assert_eq!(min_d, d, "q={q} n={n} k={k} d={d}");
    }
}

#[test]
fn clique_search_agrees_with_exhaustive_subset_scan_small() {
    // Independent check of the branch-and-bound on a small random graph.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(77);
    for _ in 0..30 {
        let n = 12;
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(0.4) {
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
            }
        }
        let mut best = 0;
        for mask in 0u32..(1 << n) {
            let verts: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let is_clique = verts
                .iter()
                .enumerate()
                .all(|(a, &u)| verts[a + 1..].iter().all(|&v| adj[u][v]));
            if is_clique {
                best = best.max(verts.len());
            }
        }
        assert_eq!(max_clique_size(&adj), best);
    }
}

#[test]
fn rlnc_partial_spread_witness() {
    // The maximum clique value 5 for 2-spaces of GF(2)^4 at distance 2 is
    // witnessed by an explicit spread: x ↦ αx graphs plus the two axes.
    let m = Matroid::new(Protocol::Rlnc, Field::binary(1).unwrap(), 4);
    let f = Field::binary(1).unwrap();
    let fe = |v: u64| flatcode_core::gf::Fe(v as u16);
    let mk = |rows: [[u64; 4]; 2]| {
        Matrix::from_rows(
            f.clone(),
            4,
            rows.iter()
                .map(|r| r.iter().map(|&v| fe(v)).collect())
                .collect(),
        )
        .row_space()
    };
    // GF(4)-line structure of GF(2)^4 gives the classical 5-member spread.
    let spread = [
        mk([[1, 0, 0, 0], [0, 1, 0, 0]]),
        mk([[0, 0, 1, 0], [0, 0, 0, 1]]),
        mk([[1, 0, 1, 0], [0, 1, 0, 1]]),
        mk([[1, 0, 0, 1], [0, 1, 1, 1]]),
        mk([[1, 0, 1, 1], [0, 1, 1, 0]]),
    ];
    for i in 0..5 {
        for j in i + 1..5 {
            let d = distance(
                &m,
                &flatcode_core::matroid::Flat::Linear(spread[i].clone()),
                &flatcode_core::matroid::Flat::Linear(spread[j].clone()),
            )
            .unwrap();
            assert_eq!(d.modified, 2, "members {i},{j} intersect");
        }
    }
    assert_eq!(exact_max_code(&m, 2, 2).unwrap(), BigUint::from(5u32));
}
