//! Exact-arithmetic calculators for the closed-form performance quantities of
//! the three protocols: combinatorial primitives, matroid rate, average
//! delay, throughput, the probability of independence (recursive and closed
//! forms), partial-decoding probabilities, and their moments.
//!
//! Everything probabilistic is computed in arbitrary-precision rationals and
//! converted to floats only at the output boundary.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::matroid::Protocol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisError {
    ParameterOutOfRange,
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::ParameterOutOfRange => write!(f, "parameter out of range"),
        }
    }
}

impl core::error::Error for AnalysisError {}

/// Exact probabilities and delays are plain big rationals.
pub type ExactProb = BigRational;

// ---------------------------------------------------------------------------
// Combinatorial primitives
// ---------------------------------------------------------------------------

/// Binomial coefficient with a big upper index (SAF has q^n ground elements).
pub fn binomial_big(n: &BigUint, k: u64) -> BigUint {
    if BigUint::from(k) > *n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    binomial_big(&BigUint::from(n), k)
}

/// Gaussian binomial, the number of k-dimensional subspaces of GF(q)^n.
/// Out-of-range arguments give 0.
pub fn gaussian_binomial(n: u64, k: u64, q: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let one = BigUint::one();
    let mut acc = BigUint::one();
    // Each prefix is itself a Gaussian binomial, so the division is exact.
    for i in 1..=k {
        acc = acc * (q.pow((n - k + i) as u32) - &one) / (q.pow(i as u32) - &one);
    }
    acc
}

/// Stirling number of the second kind, by the standard recurrence.
pub fn stirling2(r: u64, l: u64) -> BigUint {
    if l > r {
        return BigUint::zero();
    }
    if r == 0 {
        return BigUint::one(); // {0,0}
    }
    if l == 0 {
        return BigUint::zero();
    }
    let l = l as usize;
    let mut row = vec![BigUint::zero(); l + 1];
    row[0] = BigUint::one(); // {0,0}
    for _ in 1..=r {
        let mut next = vec![BigUint::zero(); l + 1];
        for j in 1..=l {
            next[j] = BigUint::from(j) * &row[j] + &row[j - 1];
        }
        row = next;
    }
    row[l].clone()
}

/// Truncated Euler product ∏_{i≥1} (1 − q^{-i}), with truncation error below
/// `tolerance`. Monotone increasing in q and tends to 1.
pub fn kq_constant(q: u64, tolerance: f64) -> f64 {
    assert!(q >= 2 && tolerance > 0.0);
    let inv_q = 1.0 / q as f64;
    let mut term = inv_q;
    let mut prod = 1.0f64;
    for _ in 0..20_000 {
        prod *= 1.0 - term;
        term *= inv_q;
        // Remaining log-mass is below 2·term, well within tolerance/2.
        if 4.0 * term < tolerance {
            break;
        }
    }
    prod
}

/// Exact rational brackets lo < K_q < hi from the partial product P_N:
/// K_q < P_N and K_q ≥ P_N (1 − 2 q^{-(N+1)}).
pub fn kq_brackets(q: u64, terms: u32) -> (BigRational, BigRational) {
    let q_big = BigInt::from(q);
    let mut p = BigRational::one();
    for i in 1..=terms {
        let qi = q_big.pow(i);
        p *= BigRational::new(&qi - BigInt::one(), qi);
    }
    let qn1 = q_big.pow(terms + 1);
    let lo = &p * BigRational::new(&qn1 - BigInt::from(2), qn1);
    (lo, p)
}

/// ⌊K_q^{-1}·x⌋, exact: the bracket is refined until both ends floor alike.
pub fn floor_kq_inv_times(q: u64, x: &BigUint) -> BigUint {
    let x = BigRational::from_integer(BigInt::from(x.clone()));
    let mut terms = 16u32;
    loop {
        let (lo, hi) = kq_brackets(q, terms);
        let a = (&x / hi).floor();
        let b = (&x / lo).floor();
        if a == b {
            return a.to_integer().to_biguint().expect("non-negative");
        }
        terms *= 2;
    }
}

/// Natural log of a big integer (x ≥ 1), accurate to ~1e-13 relative.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return Float::ln(x.to_f64().expect("fits"));
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().expect("53 bits fit");
    Float::ln(top) + shift as f64 * core::f64::consts::LN_2
}

/// Float value of a big rational, via the log of numerator and denominator.
pub fn ratio_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let sign = if x.numer().is_negative() { -1.0 } else { 1.0 };
    let ln = ln_big(x.numer().magnitude()) - ln_big(x.denom().magnitude());
    sign * Float::exp(ln)
}

// ---------------------------------------------------------------------------
// Flat counts and cardinalities (Table-like closed forms per protocol)
// ---------------------------------------------------------------------------

/// Number of rank-k flats: SAF C(q^n, k); RLNC the Gaussian binomial;
/// RANC q^{n-k+1}·[n over k-1]_q. Out-of-range k gives 0.
pub fn flat_count(kind: Protocol, q: u64, n: usize, k: usize) -> BigUint {
    let qb = BigUint::from(q);
    match kind {
        Protocol::Saf => binomial_big(&qb.pow(n as u32), k as u64),
        Protocol::Rlnc => gaussian_binomial(n as u64, k as u64, q),
        Protocol::Ranc => {
            if k == 0 {
                BigUint::one()
            } else if k > n + 1 {
                BigUint::zero()
            } else {
                qb.pow((n + 1 - k) as u32) * gaussian_binomial(n as u64, (k - 1) as u64, q)
            }
        }
    }
}

/// Cardinality of any rank-k flat: SAF k; RLNC (q^k−1)/(q−1); RANC q^{k-1}.
pub fn flat_cardinality(kind: Protocol, q: u64, k: usize) -> BigUint {
    match kind {
        Protocol::Saf => BigUint::from(k),
        Protocol::Rlnc => gaussian_binomial(k as u64, 1, q),
        Protocol::Ranc => {
            if k == 0 {
                BigUint::zero()
            } else {
                BigUint::from(q).pow((k - 1) as u32)
            }
        }
    }
}

/// The cardinalities C_0..C_k of a protocol's flats.
#[derive(Clone, Debug)]
pub struct CardinalityTable {
    pub kind: Protocol,
    pub c: Vec<BigUint>,
}

impl CardinalityTable {
    pub fn new(kind: Protocol, q: u64, k: usize) -> CardinalityTable {
        let c = (0..=k).map(|i| flat_cardinality(kind, q, i)).collect();
        CardinalityTable { kind, c }
    }
}

// ---------------------------------------------------------------------------
// Rate, delay, throughput
// ---------------------------------------------------------------------------

/// Matroid rate report: the exact flat count, its base-q logarithm, and the
/// rate log_q(N_k)/(n·k).
#[derive(Clone, Debug)]
pub struct RateReport {
    pub num_flats: BigUint,
    pub log_q_flats: f64,
    pub rate: f64,
}

pub fn matroid_rate(kind: Protocol, q: u64, n: usize, k: usize) -> RateReport {
    let num_flats = flat_count(kind, q, n, k);
    let log_q_flats = ln_big(&num_flats) / Float::ln(q as f64);
    let rate = log_q_flats / (n as f64 * k as f64);
    RateReport {
        num_flats,
        log_q_flats,
        rate,
    }
}

/// Average delay by the generic coupon-collector sum over the cardinality
/// table: D = Σ_{i=0}^{k-1} 1/(1 − C_i/C_k).
pub fn average_delay(kind: Protocol, q: u64, k: usize) -> ExactProb {
    assert!(k >= 1);
    let table = CardinalityTable::new(kind, q, k);
    let ck = BigInt::from(table.c[k].clone());
    let mut d = BigRational::zero();
    for i in 0..k {
        let ci = BigInt::from(table.c[i].clone());
        d += BigRational::new(ck.clone(), &ck - ci);
    }
    d
}

/// Average delay by the protocol-specific closed forms: k·H_k for SAF,
/// k + Σ (1−q^{j-k})/(q^j−1) for RLNC, k + Σ 1/(q^j−1) for RANC.
pub fn average_delay_closed(kind: Protocol, q: u64, k: usize) -> ExactProb {
    assert!(k >= 1);
    let qb = BigInt::from(q);
    match kind {
        Protocol::Saf => {
            let kk = BigInt::from(k);
            (1..=k)
                .map(|i| BigRational::new(kk.clone(), BigInt::from(i)))
                .sum()
        }
        Protocol::Rlnc => {
            let mut d = BigRational::from_integer(BigInt::from(k));
            for j in 1..k {
                let num = qb.pow((k - j) as u32) - BigInt::one();
                let den = qb.pow((k - j) as u32) * (qb.pow(j as u32) - BigInt::one());
                d += BigRational::new(num, den);
            }
            d
        }
        Protocol::Ranc => {
            let mut d = BigRational::from_integer(BigInt::from(k));
            for j in 1..k {
                d += BigRational::new(BigInt::one(), qb.pow(j as u32) - BigInt::one());
            }
            d
        }
    }
}

/// Throughput T = k·R/D, the useful fraction of each received packet.
pub fn throughput(kind: Protocol, q: u64, n: usize, k: usize) -> f64 {
    let r = matroid_rate(kind, q, n, k).rate;
    let d = ratio_to_f64(&average_delay(kind, q, k));
    k as f64 * r / d
}

// ---------------------------------------------------------------------------
// Probability of independence
// ---------------------------------------------------------------------------

/// Full table P[r'][l] of the probability to hold l independent elements
/// after r' receptions, for r' ≤ r, computed by the recursion
/// P(r+1, l+1) = (1 − C_l/C_k) P(r,l) + (C_{l+1}/C_k) P(r,l+1).
pub fn p_independent_table(kind: Protocol, q: u64, k: usize, r: usize) -> Vec<Vec<ExactProb>> {
    let table = CardinalityTable::new(kind, q, k);
    let ck = BigInt::from(table.c[k].clone());
    let ratio = |i: usize| BigRational::new(BigInt::from(table.c[i].clone()), ck.clone());
    let mut rows: Vec<Vec<ExactProb>> = Vec::with_capacity(r + 1);
    let mut row = vec![BigRational::zero(); k + 1];
    row[0] = BigRational::one();
    rows.push(row.clone());
    for _ in 1..=r {
        let mut next = vec![BigRational::zero(); k + 1];
        for l in 1..=k {
            let stay = if l < k {
                ratio(l) * &row[l]
            } else {
                // A packet inside the full flat never leaves it independent…
                // C_k/C_k = 1.
                row[l].clone()
            };
            let grow = (BigRational::one() - ratio(l - 1)) * &row[l - 1];
            next[l] = stay + grow;
        }
        row = next;
        rows.push(row.clone());
    }
    rows
}

/// Probability of l independent elements after r receptions (recursion).
pub fn p_independent(kind: Protocol, q: u64, k: usize, r: usize, l: usize) -> ExactProb {
    if l > k {
        return BigRational::zero();
    }
    p_independent_table(kind, q, k, r)[r][l].clone()
}

/// Probability of independence by the protocol-specific closed forms.
pub fn p_independent_closed(kind: Protocol, q: u64, k: usize, r: usize, l: usize) -> ExactProb {
    if r == 0 || l == 0 {
        return if r == 0 && l == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        };
    }
    if l > k || l > r {
        return BigRational::zero();
    }
    let qb = BigInt::from(q);
    match kind {
        Protocol::Saf => {
            // k!/(k^r (k-l)!) · {r over l}
            let mut falling = BigUint::one();
            for i in 0..l {
                falling *= BigUint::from((k - i) as u64);
            }
            let num = BigInt::from(falling * stirling2(r as u64, l as u64));
            BigRational::new(num, BigInt::from(k).pow(r as u32))
        }
        Protocol::Rlnc => {
            // [k over l]/(q^k−1)^r · Σ_s (−1)^s C(r,s) ∏_i (q^{r-s} − q^i)
            let mut sum = BigInt::zero();
            for s in 0..=(r - l) {
                let mut prod = BigInt::one();
                for i in 0..l {
                    prod *= qb.pow((r - s) as u32) - qb.pow(i as u32);
                }
                let term = BigInt::from(binomial(r as u64, s as u64)) * prod;
                if s % 2 == 0 {
                    sum += term;
                } else {
                    sum -= term;
                }
            }
            let num = BigInt::from(gaussian_binomial(k as u64, l as u64, q)) * sum;
            let den = (qb.pow(k as u32) - BigInt::one()).pow(r as u32);
            BigRational::new(num, den)
        }
        Protocol::Ranc => {
            // q^{-(k-1)(r-1)} [k-1 over l-1] ∏_{i=0}^{l-2} (q^{r-1} − q^i)
            let mut prod = BigInt::one();
            for i in 0..(l - 1) {
                prod *= qb.pow((r - 1) as u32) - qb.pow(i as u32);
            }
            let num =
                BigInt::from(gaussian_binomial((k - 1) as u64, (l - 1) as u64, q)) * prod;
            let den = qb.pow(((k - 1) * (r - 1)) as u32);
            BigRational::new(num, den)
        }
    }
}

/// Expectation and variance of the number of independent elements after r
/// receptions, from the exact distribution.
pub fn moments_independent(kind: Protocol, q: u64, k: usize, r: usize) -> (ExactProb, ExactProb) {
    let row = &p_independent_table(kind, q, k, r)[r];
    distribution_moments(row)
}

fn distribution_moments(probs: &[ExactProb]) -> (ExactProb, ExactProb) {
    let mut e = BigRational::zero();
    let mut e2 = BigRational::zero();
    for (v, p) in probs.iter().enumerate() {
        let vb = BigRational::from_integer(BigInt::from(v));
        e += &vb * p;
        e2 += &vb * &vb * p;
    }
    let var = e2 - &e * &e;
    (e, var)
}

// ---------------------------------------------------------------------------
// Partial decoding
// ---------------------------------------------------------------------------

/// F(a, l): the number of rank-l subflats of the transmitted rank-k flat
/// containing a fixed rank-a flat. Zero when a > l.
fn f_count(kind: Protocol, q: u64, k: usize, a: usize, l: usize) -> BigUint {
    if a > l {
        return BigUint::zero();
    }
    if l == 0 {
        return BigUint::one();
    }
    match kind {
        Protocol::Saf => binomial((k - a) as u64, (l - a) as u64),
        Protocol::Rlnc => gaussian_binomial((k - a) as u64, (l - a) as u64, q),
        Protocol::Ranc => {
            if a == 0 {
                BigUint::from(q).pow((k - l) as u32)
                    * gaussian_binomial((k - 1) as u64, (l - 1) as u64, q)
            } else {
                gaussian_binomial((k - a) as u64, (l - a) as u64, q)
            }
        }
    }
}

/// G(l, k): the number of rank-l subflats of the transmitted rank-k flat.
fn g_count(kind: Protocol, q: u64, k: usize, l: usize) -> BigUint {
    if l == 0 {
        return BigUint::one();
    }
    match kind {
        Protocol::Saf => binomial(k as u64, l as u64),
        Protocol::Rlnc => gaussian_binomial(k as u64, l as u64, q),
        Protocol::Ranc => f_count(kind, q, k, 0, l),
    }
}

/// Probability to decode exactly d canonical-basis elements after receiving
/// l independent elements:
/// P_D = C(k,d)/G(l,k) · Σ_{a=d}^{l} (−1)^{a+d} C(k−d, a−d) F(a,l).
pub fn p_decode(
    kind: Protocol,
    q: u64,
    k: usize,
    l: usize,
    d: usize,
) -> Result<ExactProb, AnalysisError> {
    if d > l || l > k {
        return Err(AnalysisError::ParameterOutOfRange);
    }
    if l == 0 {
        return Ok(BigRational::one()); // d == 0 forced
    }
    let mut sum = BigInt::zero();
    for a in d..=l {
        let term = BigInt::from(binomial((k - d) as u64, (a - d) as u64))
            * BigInt::from(f_count(kind, q, k, a, l));
        if (a + d) % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let num = BigInt::from(binomial(k as u64, d as u64)) * sum;
    let den = BigInt::from(g_count(kind, q, k, l));
    Ok(BigRational::new(num, den))
}

/// Expectation and variance of the number of decodable elements given l
/// independent receptions, from the binomial-moment identities:
/// E_D = k·F(1,l)/G and V_D = k[(k−1)F(2,l)+F(1,l)]/G − E_D².
pub fn moments_decode(
    kind: Protocol,
    q: u64,
    k: usize,
    l: usize,
) -> Result<(ExactProb, ExactProb), AnalysisError> {
    if l > k {
        return Err(AnalysisError::ParameterOutOfRange);
    }
    if l == 0 {
        return Ok((BigRational::zero(), BigRational::zero()));
    }
    let g = BigInt::from(g_count(kind, q, k, l));
    let f1 = BigInt::from(f_count(kind, q, k, 1, l));
    let f2 = BigInt::from(f_count(kind, q, k, 2, l));
    let e = BigRational::new(BigInt::from(k) * &f1, g.clone());
    let second = BigRational::new(
        BigInt::from(k) * (BigInt::from(k - 1) * f2 + f1),
        g,
    );
    let var = second - &e * &e;
    Ok((e, var))
}

// ---------------------------------------------------------------------------
// Total decoding: receptions → independence → decodable
// ---------------------------------------------------------------------------

/// Probability to decode exactly d elements after r raw receptions:
/// P_T(k; r, d) = Σ_l P_I(k; r, l) P_D(k; l, d).
pub fn p_total(kind: Protocol, q: u64, k: usize, r: usize, d: usize) -> ExactProb {
    if d > k || d > r {
        return BigRational::zero();
    }
    let pi = &p_independent_table(kind, q, k, r)[r];
    let mut acc = BigRational::zero();
    for l in d..=k.min(r) {
        if pi[l].is_zero() {
            continue;
        }
        acc += &pi[l] * p_decode(kind, q, k, l, d).expect("d <= l <= k");
    }
    acc
}

/// Expected number of decodable elements after r raw receptions.
pub fn e_total(kind: Protocol, q: u64, k: usize, r: usize) -> ExactProb {
    let pi = &p_independent_table(kind, q, k, r)[r];
    let mut acc = BigRational::zero();
    for l in 0..=k.min(r) {
        if pi[l].is_zero() {
            continue;
        }
        let (e_d, _) = moments_decode(kind, q, k, l).expect("l <= k");
        acc += &pi[l] * e_d;
    }
    acc
}
