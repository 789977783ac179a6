//! Cardinality bounds for codes on flats: the d = 1 and large-d convention
//! anchors, the projective upper-bound chain for the affine geometry, the
//! two Johnson-style refinements, a Singleton-style count, the achievable
//! lower bound from affine liftings of maximum-rank-distance codes, and
//! exact optima on tiny instances by branch-and-bound clique search.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::analysis::{flat_count, floor_kq_inv_times, gaussian_binomial};
use crate::channel::{distance, enumerate_all_flats, flat_contains_flat, ChannelError};
use crate::matroid::{Flat, Matroid, MatroidError, Packet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsError {
    ParameterOutOfRange,
    TooLarge,
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::ParameterOutOfRange => write!(f, "parameter out of range"),
            BoundsError::TooLarge => write!(f, "instance too large to enumerate"),
        }
    }
}

impl core::error::Error for BoundsError {}

impl From<ChannelError> for BoundsError {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::TooLarge => BoundsError::TooLarge,
            _ => BoundsError::ParameterOutOfRange,
        }
    }
}

impl From<MatroidError> for BoundsError {
    fn from(e: MatroidError) -> Self {
        match e {
            MatroidError::TooLarge => BoundsError::TooLarge,
            _ => BoundsError::ParameterOutOfRange,
        }
    }
}

/// Bounds on the maximum number of rank-k affine flats at pairwise modified
/// lattice distance ≥ d. All bounds are floored/ceiled to integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// Achievable: affine liftings of maximum-rank-distance codes.
    pub lower_lifted: BigUint,
    /// Projective-chain upper bound with the K_q constant, floored.
    pub upper_projective: BigUint,
    /// Contraction-side Johnson refinement.
    pub johnson_contraction: BigUint,
    /// Restriction-side Johnson refinement (nested ceilings).
    pub johnson_restriction: BigUint,
    /// Singleton-style flat count bound.
    pub singleton: BigUint,
    /// Exact optimum from clique search, when the instance is enumerable.
    pub exact: Option<BigUint>,
}

impl BoundsReport {
    /// The least of the upper bounds.
    pub fn upper_min(&self) -> BigUint {
        self.upper_projective
            .clone()
            .min(self.johnson_contraction.clone())
            .min(self.johnson_restriction.clone())
            .min(self.singleton.clone())
    }
}

/// Ceiling of a*b/c on big integers.
fn ceil_mul_div(a: &BigUint, b: &BigUint, c: &BigUint) -> BigUint {
    let prod = a * b;
    let (quo, rem) = prod.div_rem(c);
    if rem.is_zero() {
        quo
    } else {
        quo + BigUint::one()
    }
}

/// Bounds for codes on rank-k affine flats of the geometry on GF(q)^n with
/// minimum modified lattice distance d.
pub fn code_bounds(q: u64, n: usize, k: usize, d: usize) -> Result<BoundsReport, BoundsError> {
    if q < 2 || n < 1 || k < 1 || k > n + 1 || d < 1 {
        return Err(BoundsError::ParameterOutOfRange);
    }
    let rank = n + 1;
    let n_k = flat_count(crate::matroid::Protocol::Ranc, q, n, k);

    // Distance-1 codes can use every flat.
    if d == 1 {
        return Ok(BoundsReport {
            q,
            n,
            k,
            d,
            lower_lifted: n_k.clone(),
            upper_projective: n_k.clone(),
            johnson_contraction: n_k.clone(),
            johnson_restriction: n_k.clone(),
            singleton: n_k.clone(),
            exact: None,
        });
    }
    // No two distinct rank-k flats are farther than min{k, rank−k}.
    if d > k.min(rank - k) {
        let one = BigUint::one();
        return Ok(BoundsReport {
            q,
            n,
            k,
            d,
            lower_lifted: one.clone(),
            upper_projective: one.clone(),
            johnson_contraction: one.clone(),
            johnson_restriction: one.clone(),
            singleton: one.clone(),
            exact: None,
        });
    }

    // In the remaining range, 2 ≤ k ≤ n−1 and 2 ≤ d ≤ min{k, n−k+1}.
    let qb = BigUint::from(q);
    let exp_min = ((n - k + 1) * (k - d + 1)).min(k * (n + 2 - k - d));
    let lower_lifted = qb.pow(exp_min as u32);
    let upper_projective = floor_kq_inv_times(q, &lower_lifted);

    // Contraction side: q^{n-k+1} times the projective upper bound at
    // (n, k−1, d).
    let proj_exp = ((k - 1) * (n + 2 - k - d)).min((n - k + 1) * (k - d));
    let johnson_contraction =
        qb.pow((n - k + 1) as u32) * floor_kq_inv_times(q, &qb.pow(proj_exp as u32));

    // Restriction side: nested ceilings of q(q^{n'}−1)/(q^{n'-k+1}−1) down to
    // the anchor at n' = k+d−1.
    let mut acc = BigUint::one();
    for np in (k + d - 1)..=n {
        let num = &qb * (qb.pow(np as u32) - BigUint::one());
        let den = qb.pow((np - k + 1) as u32) - BigUint::one();
        acc = ceil_mul_div(&num, &acc, &den);
    }
    let johnson_restriction = acc;

    // Singleton-style chain: one contraction into the projective geometry on
    // GF(q)^n, then d−2 more, ending at a flat count.
    let singleton = gaussian_binomial((n + 2 - d) as u64, k as u64, q);

    Ok(BoundsReport {
        q,
        n,
        k,
        d,
        lower_lifted,
        upper_projective,
        johnson_contraction,
        johnson_restriction,
        singleton,
        exact: None,
    })
}

/// Exact maximum cardinality of a code on the rank-k flats of `m` with
/// minimum modified lattice distance d, by branch-and-bound clique search
/// over the compatibility graph. Only for enumerable instances.
pub fn exact_max_code(m: &Matroid, k: usize, d: usize) -> Result<BigUint, BoundsError> {
    let flats = m.enumerate_flats(k)?;
    let n = flats.len();
    if n > 2_000 {
        return Err(BoundsError::TooLarge);
    }
    if d == 0 {
        return Err(BoundsError::ParameterOutOfRange);
    }
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let dist = distance(m, &flats[i], &flats[j])?;
            if dist.modified >= d {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    Ok(BigUint::from(max_clique_size(&adj)))
}

/// Branch-and-bound maximum clique with a greedy coloring bound.
pub fn max_clique_size(adj: &[Vec<bool>]) -> usize {
    let n = adj.len();
    if n == 0 {
        return 0;
    }
    // Order vertices by descending degree for better early bounds.
    let mut order: Vec<usize> = (0..n).collect();
    let degree: Vec<usize> = (0..n).map(|i| adj[i].iter().filter(|&&b| b).count()).collect();
    order.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(a.cmp(&b)));

    let mut best = 0;
    let mut current = Vec::new();
    expand(adj, &order, &mut current, &mut best);
    best
}

fn expand(adj: &[Vec<bool>], candidates: &[usize], current: &mut Vec<usize>, best: &mut usize) {
    if candidates.is_empty() {
        if current.len() > *best {
            *best = current.len();
        }
        return;
    }
    // Greedy coloring bound: the clique inside `candidates` cannot exceed
    // the number of color classes.
    let bound = greedy_color_bound(adj, candidates);
    if current.len() + bound <= *best {
        return;
    }
    for (i, &v) in candidates.iter().enumerate() {
        if current.len() + (candidates.len() - i) <= *best {
            return;
        }
        let next: Vec<usize> = candidates[i + 1..]
            .iter()
            .copied()
            .filter(|&u| adj[v][u])
            .collect();
        current.push(v);
        expand(adj, &next, current, best);
        current.pop();
    }
}

fn greedy_color_bound(adj: &[Vec<bool>], vertices: &[usize]) -> usize {
    let mut colors: Vec<Vec<usize>> = Vec::new();
    for &v in vertices {
        let mut placed = false;
        for class in colors.iter_mut() {
            if class.iter().all(|&u| !adj[v][u]) {
                class.push(v);
                placed = true;
                break;
            }
        }
        if !placed {
            colors.push(vec![v]);
        }
    }
    colors.len()
}

/// Data underlying the generic Johnson-style bounds on a fully enumerable
/// matroid: contraction by the best element and restriction to the best
/// hyperplane, with all counts obtained by enumeration.
pub fn generic_johnson_oracle(m: &Matroid, k: usize, d: usize) -> Result<BigUint, BoundsError> {
    let all = enumerate_all_flats(m)?;
    let rank: usize = m.rank().try_into().map_err(|_| BoundsError::TooLarge)?;
    if k < 1 || k > rank {
        return Err(BoundsError::ParameterOutOfRange);
    }
    let ground = m.enumerate_ground()?;
    let flats_k: Vec<&Flat> = all.iter().filter(|f| f.rank() == k).collect();
    let hyperplanes: Vec<&Flat> = all.iter().filter(|f| f.rank() == rank - 1).collect();
    let n1 = BigUint::from(ground.len());
    let n_hyper = BigUint::from(hyperplanes.len());

    // c_k: minimum cardinality of a rank-k flat.
    let card = |f: &Flat| -> usize {
        ground
            .iter()
            .filter(|e| m.contains(f, e).expect("same matroid"))
            .count()
    };
    let c_k = flats_k.iter().map(|f| card(f)).min().unwrap_or(0);
    // h_k: minimum number of hyperplanes containing a rank-k flat.
    let h_k = flats_k
        .iter()
        .map(|f| {
            hyperplanes
                .iter()
                .filter(|h| flat_contains_flat(m, h, f))
                .count()
        })
        .min()
        .unwrap_or(0);
    if c_k == 0 || h_k == 0 {
        return Err(BoundsError::ParameterOutOfRange);
    }

    // Contraction bound: N_1/c_k · max_e A(flats of rank k through e).
    let mut contraction_best = BigUint::zero();
    for e in &ground {
        let through: Vec<&Flat> = flats_k
            .iter()
            .copied()
            .filter(|f| m.contains(f, e).expect("same matroid"))
            .collect();
        let a = max_code_among(m, &through, d)?;
        contraction_best = contraction_best.max(a);
    }
    let bound_contraction = n1 * contraction_best / BigUint::from(c_k);

    // Restriction bound: N_{r-1}/h_k · max_h A(flats of rank k inside h).
    let mut restriction_best = BigUint::zero();
    for h in &hyperplanes {
        let inside: Vec<&Flat> = flats_k
            .iter()
            .copied()
            .filter(|f| flat_contains_flat(m, h, f))
            .collect();
        let a = max_code_among(m, &inside, d)?;
        restriction_best = restriction_best.max(a);
    }
    let bound_restriction = n_hyper * restriction_best / BigUint::from(h_k);

    Ok(bound_contraction.min(bound_restriction))
}

/// Maximum clique restricted to a flat subfamily.
fn max_code_among(m: &Matroid, flats: &[&Flat], d: usize) -> Result<BigUint, BoundsError> {
    let n = flats.len();
    if n == 0 {
        return Ok(BigUint::zero());
    }
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if distance(m, flats[i], flats[j])?.modified >= d {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    Ok(BigUint::from(max_clique_size(&adj)))
}

/// Convenience: fills the `exact` field of a report when enumerable.
pub fn code_bounds_with_exact(
    q: u64,
    n: usize,
    k: usize,
    d: usize,
) -> Result<BoundsReport, BoundsError> {
    let mut report = code_bounds(q, n, k, d)?;
    let field = crate::gf::Field::of_order(q).map_err(|_| BoundsError::ParameterOutOfRange)?;
    let m = Matroid::new(crate::matroid::Protocol::Ranc, field, n);
    match exact_max_code(&m, k, d) {
        Ok(v) => report.exact = Some(v),
        Err(BoundsError::TooLarge) => {}
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// All packets of a small SAF matroid as a ground-set helper for tests.
pub fn saf_ground(m: &Matroid) -> Result<Vec<Packet>, BoundsError> {
    Ok(m.enumerate_ground()?)
}
