//! Independence and partial-decoding distributions against exhaustive
//! sequence enumeration on tiny flats, the decodable-count expectation
//! against subspace enumeration, and the rate sandwich bounds.

use flatcode_core::analysis::{
    flat_cardinality, kq_constant, matroid_rate, moments_decode, p_independent_table,
    ratio_to_f64,
};
use flatcode_core::gf::Field;
use flatcode_core::linalg::Matrix;
use flatcode_core::matroid::{Matroid, Packet, Protocol};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Exhaustive reception-sequence oracle: draws every length-r sequence of
/// flat elements and tallies the rank distribution.
fn sequence_rank_distribution(
    m: &Matroid,
    elements: &[Packet],
    k: usize,
    r: usize,
) -> Vec<BigRational> {
    let c = elements.len();
    let total = BigInt::from(c).pow(r as u32);
    let mut counts = vec![BigInt::zero(); k + 1];
    let mut idx = vec![0usize; r];
    'outer: loop {
        let seq: Vec<Packet> = idx.iter().map(|&i| elements[i].clone()).collect();
        let rank = m.rank_of(&seq).unwrap();
        counts[rank] += 1;
        for d in idx.iter_mut() {
            *d += 1;
            if *d < c {
                continue 'outer;
            }
            *d = 0;
        }
        break;
    }
    counts
        .into_iter()
        .map(|cnt| BigRational::new(cnt, total.clone()))
        .collect()
}

fn flat_elements(m: &Matroid, k: usize, rng: &mut ChaCha12Rng) -> Vec<Packet> {
    let flat = m.random_flat(k, rng).unwrap();
    m.enumerate_ground()
        .unwrap()
        .into_iter()
        .filter(|p| m.contains(&flat, p).unwrap())
        .collect()
}

#[test]
fn independence_distribution_matches_sequence_enumeration() {
    let mut rng = ChaCha12Rng::seed_from_u64(500);
    let cases = [
        (Protocol::Ranc, 2u64, 2usize, 2usize, 6usize),
        (Protocol::Ranc, 3, 2, 2, 5),
        (Protocol::Rlnc, 2, 3, 2, 5),
        (Protocol::Saf, 3, 1, 3, 5),
    ];
    for (kind, q, n, k, r_max) in cases {
        let m = Matroid::new(kind, Field::of_order(q).unwrap(), n);
        let elems = flat_elements(&m, k, &mut rng);
        assert_eq!(
            BigUint::from(elems.len()),
            flat_cardinality(kind, q, k),
            "{kind:?}"
        );
        let table = p_independent_table(kind, q, k, r_max);
        for r in 0..=r_max {
            let oracle = sequence_rank_distribution(&m, &elems, k, r);
            assert_eq!(table[r], oracle, "{kind:?} q={q} k={k} r={r}");
        }
    }
}

#[test]
fn decodable_expectation_matches_subspace_enumeration() {
    // E_D(L,3;2) at q=2: enumerate the seven 2-dim subflats of the lifted
    // rank-3 flat and average the number of canonical basis rows contained.
    let q = 2u64;
    let (n, k) = (6usize, 3usize);
    let field = Field::of_order(q).unwrap();
    let m = Matroid::new(Protocol::Rlnc, field.clone(), n);
    let mut rng = ChaCha12Rng::seed_from_u64(501);
    let payload = Matrix::random(field.clone(), k, n - k, &mut rng);
    let enc = m.encode_message(&payload).unwrap();
    let basis_matrix = Matrix::from_rows(
        field.clone(),
        n,
        enc.packets.iter().map(|p| p.0.clone()).collect(),
    );

    // Rank-2 subflats of the flat = 2-dim subspaces of the coefficient
    // space, pushed through the basis.
    let coeff = Matroid::new(Protocol::Rlnc, field.clone(), k);
    let sub_coeffs = coeff.enumerate_flats(2).unwrap();
    assert_eq!(sub_coeffs.len(), 7);
    let mut total = 0usize;
    for sc in &sub_coeffs {
        let cm = match sc {
            flatcode_core::matroid::Flat::Linear(c) => c.mul(&basis_matrix).unwrap(),
            _ => unreachable!(),
        };
        let subflat = flatcode_core::matroid::Flat::Linear(cm.row_space());
        let contained = enc
            .packets
            .iter()
            .filter(|p| m.contains(&subflat, p).unwrap())
            .count();
        total += contained;
    }
    let average = BigRational::new(BigInt::from(total), BigInt::from(sub_coeffs.len()));
    assert_eq!(
        average,
        BigRational::new(BigInt::from(9), BigInt::from(7))
    );
    let (e, _) = moments_decode(Protocol::Rlnc, q, k, 2).unwrap();
    assert_eq!(average, e);
}

#[test]
fn rate_sandwich_bounds_across_grid() {
    // SAF: 1 − log_q k/n ≤ R ≤ 1 − (log_q k − log_q e)/n.
    // RLNC: 1 − k/n ≤ R < 1 − (k + log_{q^k} K_q)/n.
    // RANC: 1 − (k−1)/n ≤ R < 1 − (k−1 + log_{q^k} K_q)/n.
    for q in [2u64, 16, 256] {
        let lnq = (q as f64).ln();
        let kq = kq_constant(q, 1e-14);
        for n in [6usize, 12, 20] {
            for k in 1..=n.min(8) {
                let eps = 1e-9;
                let r_s = matroid_rate(Protocol::Saf, q, n, k).rate;
                let logqk = (k as f64).ln() / lnq;
                let logqe = 1.0 / lnq;
                assert!(1.0 - logqk / n as f64 <= r_s + eps, "SAF lower q={q} n={n} k={k}");
                assert!(r_s <= 1.0 - (logqk - logqe) / n as f64 + eps, "SAF upper");

                let r_l = matroid_rate(Protocol::Rlnc, q, n, k).rate;
                let log_qk_kq = kq.ln() / (k as f64 * lnq);
                assert!(1.0 - k as f64 / n as f64 <= r_l + eps, "RLNC lower");
                assert!(
                    r_l < 1.0 - (k as f64 + log_qk_kq) / n as f64 + eps,
                    "RLNC upper q={q} n={n} k={k}"
                );

                let r_a = matroid_rate(Protocol::Ranc, q, n, k).rate;
                assert!(1.0 - (k as f64 - 1.0) / n as f64 <= r_a + eps, "RANC lower");
                assert!(
                    r_a < 1.0 - (k as f64 - 1.0 + log_qk_kq) / n as f64 + eps,
                    "RANC upper q={q} n={n} k={k}"
                );
            }
        }
    }
}

#[test]
fn throughput_gain_is_about_one_symbol_per_packet() {
    // At q=2^8, n=20, k=10 the affine protocol gains ≈ 1/n in throughput
    // over the linear one.
    let (q, n, k) = (256u64, 20usize, 10usize);
    let t_a = flatcode_core::analysis::throughput(Protocol::Ranc, q, n, k);
    let t_l = flatcode_core::analysis::throughput(Protocol::Rlnc, q, n, k);
    let gain = t_a - t_l;
    let target = 1.0 / n as f64;
    assert!(
        (gain - target).abs() / target < 0.10,
        "gain {gain} vs 1/n {target}"
    );
    // SAF at the same point is far below both.
    let t_s = flatcode_core::analysis::throughput(Protocol::Saf, q, n, k);
    assert!(t_s < 0.7 * t_l, "t_s = {t_s}, t_l = {t_l}");
}

#[test]
fn expected_independent_close_to_optimal_at_large_q() {
    // Shapes behind the independent-elements figure: at q = 2^8 the affine
    // curve stays within K_q of min(r, k).
    let (q, k) = (256u64, 10usize);
    let kq = kq_constant(q, 1e-14);
    for r in 1..=30usize {
        let (e, _) = flatcode_core::analysis::moments_independent(Protocol::Ranc, q, k, r);
        let cap = r.min(k);
        assert!(e <= BigRational::from_integer(BigInt::from(cap)));
        let e = ratio_to_f64(&e);
        assert!(e > kq * cap as f64, "r={r}: {e} vs {}", kq * cap as f64);
    }
}
