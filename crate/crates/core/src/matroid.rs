//! The three protocol matroids on length-n packets over GF(q):
//!
//! - `Saf`: the free matroid on all q^n packets; flats are packet subsets.
//! - `Rlnc`: the projective geometry; elements are nonzero packets with
//!   leading symbol 1, flats are linear subspaces.
//! - `Ranc`: the affine geometry; elements are all packets viewed as points,
//!   flats are affine subspaces.
//!
//! Flats carry canonical representations (sorted packet sets, or reduced
//! row-echelon bases), so equal flats compare equal structurally. The module
//! also provides the uncoded systematic encode/decode path and partial
//! decoding through canonical bases.

use alloc::collections::BTreeSet;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use rand_core::RngCore;

use crate::gf::{Fe, Field};
use crate::linalg::{Echelon, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatroidError {
    /// Element is not in the matroid's ground set (e.g. the zero packet, or a
    /// packet whose leading nonzero symbol is not 1, for RLNC).
    InvalidElement,
    KindMismatch,
    RankOutOfRange,
    EmptyFlat,
    DuplicateRows,
    DimensionMismatch,
    /// Fewer independent packets than needed to span the transmitted flat.
    RankDeficient,
    /// Received packets do not reduce to a systematic canonical basis.
    NotSystematic,
    /// Instance too large to enumerate.
    TooLarge,
}

impl fmt::Display for MatroidError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatroidError::InvalidElement => write!(f, "element is not in the ground set"),
            MatroidError::KindMismatch => write!(f, "objects belong to different matroids"),
            MatroidError::RankOutOfRange => write!(f, "rank out of range"),
            MatroidError::EmptyFlat => write!(f, "flat has no elements"),
            MatroidError::DuplicateRows => write!(f, "message rows must be pairwise distinct"),
            MatroidError::DimensionMismatch => write!(f, "message dimensions do not match"),
            MatroidError::RankDeficient => write!(f, "received packets are rank deficient"),
            MatroidError::NotSystematic => {
                write!(f, "received packets do not form a systematic flat")
            }
            MatroidError::TooLarge => write!(f, "instance too large to enumerate"),
        }
    }
}

impl core::error::Error for MatroidError {}

/// Network protocol, naming the matroid family used for transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// Store-and-forward: free matroid.
    Saf,
    /// Random linear network coding: projective geometry.
    Rlnc,
    /// Random affine network coding: affine geometry.
    Ranc,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Saf => "saf",
            Protocol::Rlnc => "rlnc",
            Protocol::Ranc => "ranc",
        }
    }
}

/// A length-n packet of GF(q) symbols; the unit sent through the network.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Packet(pub Vec<Fe>);

impl fmt::Debug for Packet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{:?}", c)?;
        }
        write!(f, "]")
    }
}

impl Packet {
    pub fn from_indices(vals: &[u64]) -> Packet {
        Packet(vals.iter().map(|&v| Fe(v as u16)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A flat in canonical form.
///
/// - `Subset`: sorted set of packets (free matroid).
/// - `Linear`: rref basis, k×n, no zero rows.
/// - `Affine`: rref basis of the homogenized span, k×(n+1), column 0 a pivot
///   whenever k ≥ 1.
///
/// Canonical forms make structural equality coincide with flat equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Flat {
    Subset(BTreeSet<Packet>),
    Linear(Matrix),
    Affine(Matrix),
}

impl Flat {
    pub fn rank(&self) -> usize {
        match self {
            Flat::Subset(s) => s.len(),
            Flat::Linear(m) | Flat::Affine(m) => m.rows(),
        }
    }

    pub fn protocol(&self) -> Protocol {
        match self {
            Flat::Subset(_) => Protocol::Saf,
            Flat::Linear(_) => Protocol::Rlnc,
            Flat::Affine(_) => Protocol::Ranc,
        }
    }

    /// The rref basis matrix for subspace-backed flats.
    pub fn basis(&self) -> Option<&Matrix> {
        match self {
            Flat::Subset(_) => None,
            Flat::Linear(m) | Flat::Affine(m) => Some(m),
        }
    }
}

/// A systematic encoding of a message into a canonical basis of a flat.
#[derive(Clone, Debug)]
pub struct CanonicalBasisMessage {
    pub message: Matrix,
    pub packets: Vec<Packet>,
}

/// Uniform index in [0, n) by rejection.
pub(crate) fn uniform_index<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> usize {
    let n = n as u64;
    let zone = (u64::MAX / n) * n;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % n) as usize;
        }
    }
}

/// One of the three protocol matroids at fixed field order q and packet
/// length n. Immutable and shareable across threads.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matroid {
    kind: Protocol,
    field: Arc<Field>,
    n: usize,
}

impl Matroid {
    pub fn new(kind: Protocol, field: Arc<Field>, n: usize) -> Matroid {
        assert!(n >= 1, "packet length must be positive");
        Matroid { kind, field, n }
    }

    pub fn kind(&self) -> Protocol {
        self.kind
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rank of the matroid: q^n for SAF, n for RLNC, n+1 for RANC.
    pub fn rank(&self) -> BigUint {
        match self.kind {
            Protocol::Saf => BigUint::from(self.q()).pow(self.n as u32),
            Protocol::Rlnc => BigUint::from(self.n),
            Protocol::Ranc => BigUint::from(self.n + 1),
        }
    }

    /// Rank fits in usize for RLNC/RANC; SAF may exceed it, in which case
    /// usize::MAX is returned as a saturating stand-in.
    pub fn rank_small(&self) -> usize {
        self.rank().try_into().unwrap_or(usize::MAX)
    }

    fn check_packet(&self, p: &Packet) -> Result<(), MatroidError> {
        if p.len() != self.n {
            return Err(MatroidError::InvalidElement);
        }
        if p.0.iter().any(|c| c.0 as u64 >= self.q()) {
            return Err(MatroidError::InvalidElement);
        }
        if self.kind == Protocol::Rlnc {
            match p.0.iter().find(|c| !c.is_zero()) {
                Some(&c) if c == Fe::ONE => {}
                _ => return Err(MatroidError::InvalidElement),
            }
        }
        Ok(())
    }

    /// Scales a nonzero vector so its leading nonzero symbol is 1.
    pub fn normalize_projective(&self, mut v: Vec<Fe>) -> Option<Packet> {
        let lead = v.iter().find(|c| !c.is_zero()).copied()?;
        let inv = self.field.inv(lead).expect("nonzero");
        for c in v.iter_mut() {
            *c = self.field.mul(*c, inv);
        }
        Some(Packet(v))
    }

    fn homogenize(&self, p: &Packet) -> Vec<Fe> {
        let mut v = Vec::with_capacity(self.n + 1);
        v.push(Fe::ONE);
        v.extend_from_slice(&p.0);
        v
    }

    /// Matroid rank of a list of elements.
    pub fn rank_of(&self, elements: &[Packet]) -> Result<usize, MatroidError> {
        for p in elements {
            self.check_packet(p)?;
        }
        Ok(match self.kind {
            Protocol::Saf => {
                let set: BTreeSet<&Packet> = elements.iter().collect();
                set.len()
            }
            Protocol::Rlnc => {
                let mut ech = Echelon::new(self.field.clone(), self.n);
                for p in elements {
                    ech.absorb(p.0.clone());
                }
                ech.rank()
            }
            Protocol::Ranc => {
                let mut ech = Echelon::new(self.field.clone(), self.n + 1);
                for p in elements {
                    ech.absorb(self.homogenize(p));
                }
                ech.rank()
            }
        })
    }

    /// Closure of a list of elements, in canonical form.
    pub fn closure(&self, elements: &[Packet]) -> Result<Flat, MatroidError> {
        for p in elements {
            self.check_packet(p)?;
        }
        Ok(match self.kind {
            Protocol::Saf => Flat::Subset(elements.iter().cloned().collect()),
            Protocol::Rlnc => {
                let mut ech = Echelon::new(self.field.clone(), self.n);
                for p in elements {
                    ech.absorb(p.0.clone());
                }
                Flat::Linear(ech.to_matrix())
            }
            Protocol::Ranc => {
                let mut ech = Echelon::new(self.field.clone(), self.n + 1);
                for p in elements {
                    ech.absorb(self.homogenize(p));
                }
                Flat::Affine(ech.to_matrix())
            }
        })
    }

    fn check_flat(&self, flat: &Flat) -> Result<(), MatroidError> {
        let ok = match (self.kind, flat) {
            (Protocol::Saf, Flat::Subset(_)) => true,
            (Protocol::Rlnc, Flat::Linear(m)) => m.cols() == self.n,
            (Protocol::Ranc, Flat::Affine(m)) => m.cols() == self.n + 1,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(MatroidError::KindMismatch)
        }
    }

    /// Membership: adjoining `element` does not grow the rank.
    pub fn contains(&self, flat: &Flat, element: &Packet) -> Result<bool, MatroidError> {
        self.check_flat(flat)?;
        self.check_packet(element)?;
        Ok(match flat {
            Flat::Subset(s) => s.contains(element),
            Flat::Linear(m) => in_row_space(m, &element.0),
            Flat::Affine(m) => in_row_space(m, &self.homogenize(element)),
        })
    }

    /// Flat equality through canonical forms.
    pub fn flats_equal(&self, f: &Flat, g: &Flat) -> Result<bool, MatroidError> {
        self.check_flat(f)?;
        self.check_flat(g)?;
        Ok(f == g)
    }

    /// Uniform random element of a flat of rank ≥ 1.
    pub fn sample_element<R: RngCore + ?Sized>(
        &self,
        flat: &Flat,
        rng: &mut R,
    ) -> Result<Packet, MatroidError> {
        self.check_flat(flat)?;
        if flat.rank() == 0 {
            return Err(MatroidError::EmptyFlat);
        }
        Ok(match flat {
            Flat::Subset(s) => {
                let i = uniform_index(rng, s.len());
                s.iter().nth(i).expect("index in range").clone()
            }
            Flat::Linear(m) => {
                // Uniform nonzero coefficient vector; each projective point
                // of the flat has exactly q-1 preimages.
                let k = m.rows();
                let coeffs: Vec<Fe> = loop {
                    let c: Vec<Fe> = (0..k).map(|_| self.field.sample(rng)).collect();
                    if c.iter().any(|x| !x.is_zero()) {
                        break c;
                    }
                };
                let mut v = vec![Fe::ZERO; self.n];
                for (i, c) in coeffs.iter().enumerate() {
                    for (vj, mj) in v.iter_mut().zip(m.row(i)) {
                        *vj = self.field.add(*vj, self.field.mul(*c, *mj));
                    }
                }
                self.normalize_projective(v).expect("nonzero combination")
            }
            Flat::Affine(m) => {
                // Anchor point plus a uniform vector of the direction space.
                let k = m.rows();
                let mut v: Vec<Fe> = m.row(0)[1..].to_vec();
                for i in 1..k {
                    let c = self.field.sample(rng);
                    for (vj, mj) in v.iter_mut().zip(&m.row(i)[1..]) {
                        *vj = self.field.add(*vj, self.field.mul(c, *mj));
                    }
                }
                Packet(v)
            }
        })
    }

    /// Uniform random ground-set element.
    pub fn sample_ground<R: RngCore + ?Sized>(&self, rng: &mut R) -> Packet {
        match self.kind {
            Protocol::Saf | Protocol::Ranc => {
                Packet((0..self.n).map(|_| self.field.sample(rng)).collect())
            }
            Protocol::Rlnc => loop {
                let v: Vec<Fe> = (0..self.n).map(|_| self.field.sample(rng)).collect();
                if let Some(p) = self.normalize_projective(v) {
                    return p;
                }
            },
        }
    }

    /// Number of flats of rank k and cardinality of any rank-k flat.
    pub fn flat_counts(&self, k: usize) -> Result<(BigUint, BigUint), MatroidError> {
        if BigUint::from(k) > self.rank() {
            return Err(MatroidError::RankOutOfRange);
        }
        let q = self.q();
        Ok((
            crate::analysis::flat_count(self.kind, q, self.n, k),
            crate::analysis::flat_cardinality(self.kind, q, k),
        ))
    }

    /// Header width the systematic encoding adds to each message row.
    pub fn header_width(&self, k: usize) -> usize {
        match self.kind {
            Protocol::Saf => 0,
            Protocol::Rlnc => k,
            Protocol::Ranc => k - 1,
        }
    }

    /// Payload width of a rank-k message.
    pub fn payload_width(&self, k: usize) -> usize {
        self.n - self.header_width(k)
    }

    /// Systematic encoding of a message matrix into a canonical basis.
    ///
    /// SAF sends the k distinct rows as-is; RLNC prepends the identity
    /// header; RANC prepends the affine header whose row i is the i-th
    /// standard vector of length k-1 (zero for row 0).
    pub fn encode_message(&self, message: &Matrix) -> Result<CanonicalBasisMessage, MatroidError> {
        let k = message.rows();
        if k == 0 || BigUint::from(k) > self.rank() {
            return Err(MatroidError::DimensionMismatch);
        }
        if self.kind != Protocol::Saf && message.cols() != self.payload_width(k) {
            return Err(MatroidError::DimensionMismatch);
        }
        if self.kind == Protocol::Saf && message.cols() != self.n {
            return Err(MatroidError::DimensionMismatch);
        }
        let packets: Vec<Packet> = match self.kind {
            Protocol::Saf => {
                let rows: Vec<Packet> = (0..k).map(|i| Packet(message.row_vec(i))).collect();
                let set: BTreeSet<&Packet> = rows.iter().collect();
                if set.len() != k {
                    return Err(MatroidError::DuplicateRows);
                }
                rows
            }
            Protocol::Rlnc => (0..k)
                .map(|i| {
                    let mut v = vec![Fe::ZERO; self.n];
                    v[i] = Fe::ONE;
                    v[k..].copy_from_slice(message.row(i));
                    Packet(v)
                })
                .collect(),
            Protocol::Ranc => (0..k)
                .map(|i| {
                    let mut v = vec![Fe::ZERO; self.n];
                    if i > 0 {
                        v[i - 1] = Fe::ONE;
                    }
                    v[k - 1..].copy_from_slice(message.row(i));
                    Packet(v)
                })
                .collect(),
        };
        Ok(CanonicalBasisMessage {
            message: message.clone(),
            packets,
        })
    }

    /// Recovers the message matrix from any spanning set of the transmitted
    /// flat.
    ///
    /// For SAF the rows come back in canonical ascending order (a subset
    /// flat carries no row order).
    pub fn decode_message(&self, packets: &[Packet]) -> Result<Matrix, MatroidError> {
        for p in packets {
            self.check_packet(p)?;
        }
        match self.kind {
            Protocol::Saf => {
                let set: BTreeSet<Packet> = packets.iter().cloned().collect();
                let rows: Vec<Vec<Fe>> = set.into_iter().map(|p| p.0).collect();
                Ok(Matrix::from_rows(self.field.clone(), self.n, rows))
            }
            Protocol::Rlnc => {
                let mut ech = Echelon::new(self.field.clone(), self.n);
                for p in packets {
                    ech.absorb(p.0.clone());
                }
                let k = ech.rank();
                if k == 0 {
                    return Err(MatroidError::RankDeficient);
                }
                if ech.pivots() != (0..k).collect::<Vec<_>>() {
                    return Err(MatroidError::NotSystematic);
                }
                Ok(ech.to_matrix().submatrix(0, k, k, self.n))
            }
            Protocol::Ranc => {
                let mut ech = Echelon::new(self.field.clone(), self.n + 1);
                for p in packets {
                    ech.absorb(self.homogenize(p));
                }
                let k = ech.rank();
                if k == 0 {
                    return Err(MatroidError::RankDeficient);
                }
                if ech.pivots() != (0..k).collect::<Vec<_>>() {
                    return Err(MatroidError::NotSystematic);
                }
                // (I_k | M') with M' = (m_0; m_1 - m_0; …); undo the offsets.
                let mprime = ech.to_matrix().submatrix(0, k, k, self.n + 1);
                let mut rows: Vec<Vec<Fe>> = Vec::with_capacity(k);
                let first = mprime.row_vec(0);
                rows.push(first.clone());
                for i in 1..k {
                    let row: Vec<Fe> = mprime
                        .row(i)
                        .iter()
                        .zip(&first)
                        .map(|(&a, &b)| self.field.add(a, b))
                        .collect();
                    rows.push(row);
                }
                Ok(Matrix::from_rows(
                    self.field.clone(),
                    self.n + 1 - k,
                    rows,
                ))
            }
        }
    }

    /// Indices i such that canonical basis packet `basis[i]` lies in the
    /// closure of the received packets; these are the packets a destination
    /// can already decode.
    pub fn decodable_indices(
        &self,
        basis: &[Packet],
        received: &[Packet],
    ) -> Result<BTreeSet<usize>, MatroidError> {
        let cl = self.closure(received)?;
        let mut out = BTreeSet::new();
        for (i, b) in basis.iter().enumerate() {
            if self.contains(&cl, b)? {
                out.insert(i);
            }
        }
        Ok(out)
    }

    /// A random rank-k flat: the closure of uniformly sampled ground
    /// elements, drawn until the rank reaches k. (Not uniform over flats.)
    pub fn random_flat<R: RngCore + ?Sized>(
        &self,
        k: usize,
        rng: &mut R,
    ) -> Result<Flat, MatroidError> {
        if BigUint::from(k) > self.rank() {
            return Err(MatroidError::RankOutOfRange);
        }
        let width = if self.kind == Protocol::Ranc {
            self.n + 1
        } else {
            self.n
        };
        let mut ech = Echelon::new(self.field.clone(), width);
        let mut elems: Vec<Packet> = Vec::new();
        while elems.len() < k {
            let p = self.sample_ground(rng);
            let row = if self.kind == Protocol::Ranc {
                self.homogenize(&p)
            } else {
                p.0.clone()
            };
            let grew = if self.kind == Protocol::Saf {
                !elems.contains(&p)
            } else {
                ech.absorb(row)
            };
            if grew {
                elems.push(p);
            }
        }
        self.closure(&elems)
    }

    const ENUM_LIMIT: u64 = 500_000;

    /// All ground-set elements, for small instances.
    pub fn enumerate_ground(&self) -> Result<Vec<Packet>, MatroidError> {
        let q = self.q();
        let total = BigUint::from(q).pow(self.n as u32);
        let total: u64 = total.try_into().map_err(|_| MatroidError::TooLarge)?;
        if total > Self::ENUM_LIMIT {
            return Err(MatroidError::TooLarge);
        }
        let all = (0..total).map(|mut idx| {
            let mut v = vec![Fe::ZERO; self.n];
            for c in v.iter_mut().rev() {
                *c = Fe((idx % q) as u16);
                idx /= q;
            }
            Packet(v)
        });
        Ok(match self.kind {
            Protocol::Saf | Protocol::Ranc => all.collect(),
            Protocol::Rlnc => all
                .filter(|p| self.check_packet(p).is_ok())
                .collect(),
        })
    }

    /// All flats of rank k, for small instances.
    pub fn enumerate_flats(&self, k: usize) -> Result<Vec<Flat>, MatroidError> {
        let (n_k, _) = self.flat_counts(k)?;
        let n_k: u64 = n_k.try_into().map_err(|_| MatroidError::TooLarge)?;
        if n_k > Self::ENUM_LIMIT {
            return Err(MatroidError::TooLarge);
        }
        match self.kind {
            Protocol::Saf => {
                let ground = self.enumerate_ground()?;
                let mut out = Vec::with_capacity(n_k as usize);
                let mut idx: Vec<usize> = (0..k).collect();
                if k > ground.len() {
                    return Err(MatroidError::RankOutOfRange);
                }
                loop {
                    out.push(Flat::Subset(idx.iter().map(|&i| ground[i].clone()).collect()));
                    // Next lexicographic combination.
                    let mut i = k;
                    loop {
                        if i == 0 {
                            return Ok(out);
                        }
                        i -= 1;
                        if idx[i] != i + ground.len() - k {
                            break;
                        }
                    }
                    idx[i] += 1;
                    for j in i + 1..k {
                        idx[j] = idx[j - 1] + 1;
                    }
                    if k == 0 {
                        return Ok(out);
                    }
                }
            }
            Protocol::Rlnc => Ok(enumerate_rref(&self.field, self.n, k, false)
                .into_iter()
                .map(Flat::Linear)
                .collect()),
            Protocol::Ranc => Ok(enumerate_rref(&self.field, self.n + 1, k, true)
                .into_iter()
                .map(Flat::Affine)
                .collect()),
        }
    }
}

/// Membership of a vector in the row space of an rref matrix.
fn in_row_space(m: &Matrix, v: &[Fe]) -> bool {
    let f = m.field();
    let mut v = v.to_vec();
    for i in 0..m.rows() {
        let row = m.row(i);
        let p = row.iter().position(|c| !c.is_zero()).expect("no zero rows");
        let c = v[p];
        if c.is_zero() {
            continue;
        }
        for (a, b) in v.iter_mut().zip(row) {
            *a = f.sub(*a, f.mul(c, *b));
        }
    }
    v.iter().all(|c| c.is_zero())
}

/// Enumerates all k×w rref matrices of rank k over the field; when
/// `pivot_zero` is set, only those whose pivot set contains column 0.
fn enumerate_rref(field: &Arc<Field>, w: usize, k: usize, pivot_zero: bool) -> Vec<Matrix> {
    let mut out = Vec::new();
    if k > w {
        return out;
    }
    if k == 0 {
        out.push(Matrix::zeros(field.clone(), 0, w));
        return out;
    }
    // Iterate pivot column subsets, lexicographically.
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        if !pivot_zero || pivots[0] == 0 {
            emit_rref_for_pivots(field, w, &pivots, &mut out);
        }
        let mut i = k;
        let done = loop {
            if i == 0 {
                break true;
            }
            i -= 1;
            if pivots[i] != i + w - k {
                break false;
            }
        };
        if done {
            return out;
        }
        pivots[i] += 1;
        for j in i + 1..k {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
}

fn emit_rref_for_pivots(field: &Arc<Field>, w: usize, pivots: &[usize], out: &mut Vec<Matrix>) {
    let k = pivots.len();
    // Free cells: (i, j) with j > pivots[i] and j not a pivot column.
    let mut free: Vec<(usize, usize)> = Vec::new();
    for i in 0..k {
        for j in pivots[i] + 1..w {
            if !pivots.contains(&j) {
                free.push((i, j));
            }
        }
    }
    let q = field.order();
    let mut vals = vec![0u64; free.len()];
    loop {
        let mut m = Matrix::zeros(field.clone(), k, w);
        for (i, &p) in pivots.iter().enumerate() {
            m.set(i, p, Fe::ONE);
        }
        for (&(i, j), &v) in free.iter().zip(&vals) {
            m.set(i, j, Fe(v as u16));
        }
        out.push(m);
        // Odometer.
        let mut pos = 0;
        loop {
            if pos == vals.len() {
                return;
            }
            vals[pos] += 1;
            if vals[pos] < q {
                break;
            }
            vals[pos] = 0;
            pos += 1;
        }
    }
}
