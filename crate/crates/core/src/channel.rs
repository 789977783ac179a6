//! The operator channel: insertions and deletions on the lattice of flats,
//! the lattice distance d_L = δ+ε and modified lattice distance
//! d_M = max(δ,ε), flat meets, a packet-level corruption model for codec
//! trials, and a breadth-first shortest-path oracle for small matroids.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use rand_core::RngCore;

use crate::gf::Fe;
use crate::linalg::Matrix;
use crate::matroid::{uniform_index, Flat, Matroid, MatroidError, Packet, Protocol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelError {
    KindMismatch,
    /// Insertions would exceed the matroid rank.
    RankOverflow,
    /// Deletions would take the rank below zero.
    RankUnderflow,
    TooLarge,
    Matroid(MatroidError),
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::KindMismatch => write!(f, "flats belong to different matroids"),
            ChannelError::RankOverflow => write!(f, "insertions exceed the matroid rank"),
            ChannelError::RankUnderflow => write!(f, "deletions exceed the flat rank"),
            ChannelError::TooLarge => write!(f, "matroid too large to enumerate"),
            ChannelError::Matroid(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ChannelError {}

impl From<MatroidError> for ChannelError {
    fn from(e: MatroidError) -> Self {
        ChannelError::Matroid(e)
    }
}

/// Insertion/deletion decomposition of the offset between two flats, with
/// both metrics. δ = rk(f∪g) − rk(f), ε = rk(f∪g) − rk(g),
/// d_L = δ+ε, d_M = max(δ,ε).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatDistance {
    pub insertions: usize,
    pub deletions: usize,
    pub lattice: usize,
    pub modified: usize,
}

/// Rank of the join cl(f ∪ g).
pub fn join_rank(m: &Matroid, f: &Flat, g: &Flat) -> Result<usize, ChannelError> {
    check_pair(m, f, g)?;
    Ok(match (f, g) {
        (Flat::Subset(a), Flat::Subset(b)) => a.union(b).count(),
        (Flat::Linear(a), Flat::Linear(b)) | (Flat::Affine(a), Flat::Affine(b)) => {
            a.stack_rank(b).expect("validated shapes")
        }
        _ => unreachable!("check_pair validated kinds"),
    })
}

fn check_pair(m: &Matroid, f: &Flat, g: &Flat) -> Result<(), ChannelError> {
    let ok = |fl: &Flat| match (m.kind(), fl) {
        (Protocol::Saf, Flat::Subset(_)) => true,
        (Protocol::Rlnc, Flat::Linear(mm)) => mm.cols() == m.n(),
        (Protocol::Ranc, Flat::Affine(mm)) => mm.cols() == m.n() + 1,
        _ => false,
    };
    if ok(f) && ok(g) {
        Ok(())
    } else {
        Err(ChannelError::KindMismatch)
    }
}

/// Distance between two flats of the same matroid.
pub fn distance(m: &Matroid, f: &Flat, g: &Flat) -> Result<FlatDistance, ChannelError> {
    let join = join_rank(m, f, g)?;
    let insertions = join - f.rank();
    let deletions = join - g.rank();
    Ok(FlatDistance {
        insertions,
        deletions,
        lattice: insertions + deletions,
        modified: insertions.max(deletions),
    })
}

/// Meet f ∧ g: set intersection for subsets; intersection of (homogenized)
/// row spaces otherwise. An affine intersection that misses the affine chart
/// is the empty rank-0 flat.
pub fn meet(m: &Matroid, f: &Flat, g: &Flat) -> Result<Flat, ChannelError> {
    check_pair(m, f, g)?;
    Ok(match (f, g) {
        (Flat::Subset(a), Flat::Subset(b)) => {
            Flat::Subset(a.intersection(b).cloned().collect())
        }
        (Flat::Linear(a), Flat::Linear(b)) => Flat::Linear(space_intersection(a, b)),
        (Flat::Affine(a), Flat::Affine(b)) => {
            let w = space_intersection(a, b);
            // Column 0 must be a pivot for the flat to contain any point.
            let has_chart = (0..w.rows()).any(|i| !w.get(i, 0).is_zero());
            if has_chart {
                Flat::Affine(w)
            } else {
                Flat::Affine(Matrix::zeros(m.field().clone(), 0, m.n() + 1))
            }
        }
        _ => unreachable!("check_pair validated kinds"),
    })
}

/// Intersection of row spaces via orthogonal complements:
/// (A ∩ B) = (A^⊥ + B^⊥)^⊥.
fn space_intersection(a: &Matrix, b: &Matrix) -> Matrix {
    let ka = a.kernel();
    let kb = b.kernel();
    let sum = ka.vstack(&kb).expect("same width");
    sum.kernel().row_space()
}

/// Applies δ uniform insertions (adjoin a random element outside the
/// current closure) followed by ε uniform deletions (replace the flat by a
/// uniform corank-1 subflat).
pub fn apply_operator_channel<R: RngCore + ?Sized>(
    m: &Matroid,
    f: &Flat,
    insertions: usize,
    deletions: usize,
    rng: &mut R,
) -> Result<Flat, ChannelError> {
    check_pair(m, f, f)?;
    if BigUint::from(f.rank() + insertions) > m.rank() {
        return Err(ChannelError::RankOverflow);
    }
    if f.rank() + insertions < deletions {
        return Err(ChannelError::RankUnderflow);
    }
    let mut cur = f.clone();
    for _ in 0..insertions {
        cur = insert_once(m, &cur, rng)?;
    }
    for _ in 0..deletions {
        cur = delete_once(m, &cur, rng)?;
    }
    Ok(cur)
}

/// Superflat of rank +1 through a uniform outside element.
fn insert_once<R: RngCore + ?Sized>(
    m: &Matroid,
    f: &Flat,
    rng: &mut R,
) -> Result<Flat, ChannelError> {
    loop {
        let e = m.sample_ground(rng);
        if !m.contains(f, &e)? {
            let mut elems = flat_spanning_elements(m, f);
            elems.push(e);
            return Ok(m.closure(&elems)?);
        }
    }
}

/// A spanning element list for a flat (basis points / packets).
pub fn flat_spanning_elements(m: &Matroid, f: &Flat) -> Vec<Packet> {
    match f {
        Flat::Subset(s) => s.iter().cloned().collect(),
        Flat::Linear(b) => (0..b.rows())
            .map(|i| {
                m.normalize_projective(b.row_vec(i))
                    .expect("basis rows are nonzero")
            })
            .collect(),
        Flat::Affine(b) => {
            // Row 0 is (1 | anchor); rows i ≥ 1 are (0 | direction).
            let mut out = Vec::with_capacity(b.rows());
            if b.rows() == 0 {
                return out;
            }
            let anchor: Vec<Fe> = b.row(0)[1..].to_vec();
            out.push(Packet(anchor.clone()));
            let fld = m.field();
            for i in 1..b.rows() {
                let p: Vec<Fe> = anchor
                    .iter()
                    .zip(&b.row(i)[1..])
                    .map(|(&x, &y)| fld.add(x, y))
                    .collect();
                out.push(Packet(p));
            }
            out
        }
    }
}

/// Uniform corank-1 subflat.
fn delete_once<R: RngCore + ?Sized>(
    m: &Matroid,
    f: &Flat,
    rng: &mut R,
) -> Result<Flat, ChannelError> {
    let k = f.rank();
    if k == 0 {
        return Err(ChannelError::RankUnderflow);
    }
    Ok(match f {
        Flat::Subset(s) => {
            // Drop a uniform element.
            let drop = uniform_index(rng, s.len());
            Flat::Subset(
                s.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != drop)
                    .map(|(_, p)| p.clone())
                    .collect(),
            )
        }
        Flat::Linear(b) => {
            // Kernel of a uniform nonzero functional on the flat's
            // coefficient space: each hyperplane has q−1 functionals.
            let fld = m.field();
            let coeffs: Vec<Fe> = loop {
                let c: Vec<Fe> = (0..k).map(|_| fld.sample(rng)).collect();
                if c.iter().any(|x| !x.is_zero()) {
                    break c;
                }
            };
            let sub = functional_kernel_rows(b, &coeffs);
            Flat::Linear(sub.row_space())
        }
        Flat::Affine(b) => {
            // Uniform hyperplane of the homogenized space that keeps the
            // column-0 pivot; resample otherwise.
            let fld = m.field();
            loop {
                let coeffs: Vec<Fe> = loop {
                    let c: Vec<Fe> = (0..k).map(|_| fld.sample(rng)).collect();
                    if c.iter().any(|x| !x.is_zero()) {
                        break c;
                    }
                };
                let sub = functional_kernel_rows(b, &coeffs).row_space();
                let has_chart = (0..sub.rows()).any(|i| !sub.get(i, 0).is_zero());
                if has_chart {
                    return Ok(Flat::Affine(sub));
                }
            }
        }
    })
}

/// Rows of `b` combined by a basis of the kernel of the functional `coeffs`
/// on coefficient space: a basis of the corank-1 subspace.
fn functional_kernel_rows(b: &Matrix, coeffs: &[Fe]) -> Matrix {
    let fld = b.field().clone();
    let k = b.rows();
    let func = Matrix::from_rows(fld, k, alloc::vec![coeffs.to_vec()]);
    let ker = func.kernel(); // (k-1) x k
    ker.mul(b).expect("dimensions agree")
}

/// Packet-level corruption: drops `loss` uniformly chosen packets, appends
/// `injections` uniform ground elements, and shuffles.
pub fn corrupt_packets<R: RngCore + ?Sized>(
    m: &Matroid,
    packets: &[Packet],
    injections: usize,
    loss: usize,
    rng: &mut R,
) -> Vec<Packet> {
    let mut out: Vec<Packet> = packets.to_vec();
    for _ in 0..loss.min(packets.len()) {
        let i = uniform_index(rng, out.len());
        out.swap_remove(i);
    }
    for _ in 0..injections {
        out.push(m.sample_ground(rng));
    }
    // Fisher-Yates.
    for i in (1..out.len()).rev() {
        let j = uniform_index(rng, i + 1);
        out.swap(i, j);
    }
    out
}

/// Shortest-path length between two flats on the cover graph of the full
/// flat lattice, by breadth-first search. Test oracle for small matroids.
pub fn lattice_bfs_distance(m: &Matroid, f: &Flat, g: &Flat) -> Result<usize, ChannelError> {
    check_pair(m, f, g)?;
    let all = enumerate_all_flats(m)?;
    let find = |x: &Flat| all.iter().position(|y| y == x);
    let (src, dst) = match (find(f), find(g)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(ChannelError::Matroid(MatroidError::InvalidElement)),
    };
    // Cover adjacency: rank difference one and containment.
    let n = all.len();
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if all[i].rank() + 1 == all[j].rank() && flat_contains_flat(m, &all[j], &all[i]) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut dist: Vec<Option<usize>> = alloc::vec![None; n];
    let mut queue = alloc::collections::VecDeque::new();
    dist[src] = Some(0);
    queue.push_back(src);
    while let Some(u) = queue.pop_front() {
        if u == dst {
            return Ok(dist[u].expect("visited"));
        }
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].expect("visited") + 1);
                queue.push_back(v);
            }
        }
    }
    unreachable!("flat lattice is connected")
}

/// All flats of every rank, for small matroids.
pub fn enumerate_all_flats(m: &Matroid) -> Result<Vec<Flat>, ChannelError> {
    let r: usize = m
        .rank()
        .try_into()
        .map_err(|_| ChannelError::TooLarge)?;
    let mut total = BigUint::default();
    for k in 0..=r {
        total += m.flat_counts(k).map_err(ChannelError::Matroid)?.0;
    }
    let total: u64 = total.try_into().map_err(|_| ChannelError::TooLarge)?;
    if total > 50_000 {
        return Err(ChannelError::TooLarge);
    }
    let mut out = Vec::with_capacity(total as usize);
    for k in 0..=r {
        out.extend(m.enumerate_flats(k)?);
    }
    Ok(out)
}

/// Containment g ⊆ f between flats of the same matroid.
pub fn flat_contains_flat(m: &Matroid, f: &Flat, g: &Flat) -> bool {
    match (f, g) {
        (Flat::Subset(a), Flat::Subset(b)) => b.is_subset(a),
        (Flat::Linear(a), Flat::Linear(b)) | (Flat::Affine(a), Flat::Affine(b)) => {
            a.stack_rank(b).expect("same width") == a.rows()
        }
        _ => {
            let _ = m;
            false
        }
    }
}

/// Two parallel hyperplane flats of the affine geometry: x_0 = 0 and
/// x_0 = 1, each of rank n. Used by distance examples and tests.
pub fn parallel_hyperplanes(m: &Matroid) -> (Flat, Flat) {
    assert_eq!(m.kind(), Protocol::Ranc);
    let n = m.n();
    let fld = m.field().clone();
    let build = |first: Fe| -> Flat {
        // Homogenized rref: row (1 | first, 0…0) plus directions e_2..e_n.
        let mut rows = Vec::with_capacity(n);
        let mut anchor = alloc::vec![Fe::ZERO; n + 1];
        anchor[0] = Fe::ONE;
        anchor[1] = first;
        rows.push(anchor);
        for j in 2..=n {
            let mut dir = alloc::vec![Fe::ZERO; n + 1];
            dir[j] = Fe::ONE;
            rows.push(dir);
        }
        Flat::Affine(Matrix::from_rows(fld.clone(), n + 1, rows))
    };
    (build(Fe::ZERO), build(Fe::ONE))
}
