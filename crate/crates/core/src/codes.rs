//! Rank-metric machinery and the error-correcting codecs.
//!
//! A Gabidulin code over GF(q^ν) evaluates q-linearized polynomials at
//! GF(q)-independent points; it is maximum-rank-distance, and its liftings
//! give flat codes: the row space of (I_k | M) for the linear lifting, the
//! affine closure of the rows of (I'_k | M) for the affine lifting, and the
//! indexed-header subset lifting for subsets. The affine pipeline decodes by
//! prepending the column 1 − Σ col_i and running the linear-lifting decoder,
//! so both protocols share one bounded rank-distance decoder.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_core::RngCore;

use crate::gf::{ExtElem, ExtField, Fe, Field};
use crate::linalg::{Echelon, Matrix};
use crate::matroid::{Flat, Matroid, Packet, Protocol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeError {
    LengthMismatch,
    ShapeMismatch,
    DimensionMismatch,
    /// Code parameters are invalid (length above the extension degree,
    /// dependent evaluation points, or a pipeline with 2k > n+1).
    InvalidCode,
    /// No codeword within the packing radius: a declared outcome, not a bug.
    DecodeFailure,
    /// Received flat spans fewer than k dimensions.
    RankDeficient,
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::LengthMismatch => write!(f, "message length does not match the code"),
            CodeError::ShapeMismatch => write!(f, "matrix shape does not match the pipeline"),
            CodeError::DimensionMismatch => write!(f, "matrix dimensions do not match"),
            CodeError::InvalidCode => write!(f, "invalid code parameters"),
            CodeError::DecodeFailure => write!(f, "no codeword within the decoding radius"),
            CodeError::RankDeficient => write!(f, "received packets span fewer than k dimensions"),
        }
    }
}

impl core::error::Error for CodeError {}

/// Rank distance: the rank of A − B.
pub fn rank_distance(a: &Matrix, b: &Matrix) -> Result<usize, CodeError> {
    let diff = a.sub(b).map_err(|_| CodeError::DimensionMismatch)?;
    Ok(diff.rank())
}

/// The k×ν matrix over GF(q) whose row j is the coordinate expansion of
/// word symbol j.
pub fn word_to_matrix(ext: &Arc<ExtField>, word: &[ExtElem]) -> Matrix {
    Matrix::from_rows(
        ext.base().clone(),
        ext.degree(),
        word.iter().map(|s| ext.expand(s)).collect(),
    )
}

pub fn matrix_to_word(ext: &Arc<ExtField>, m: &Matrix) -> Result<Vec<ExtElem>, CodeError> {
    if m.cols() != ext.degree() {
        return Err(CodeError::ShapeMismatch);
    }
    Ok((0..m.rows())
        .map(|i| ext.pack(m.row(i)).expect("width checked"))
        .collect())
}

/// A Gabidulin code: codewords are evaluations of q-linearized polynomials
/// of q-degree below K at N GF(q)-independent points of GF(q^ν).
///
/// Minimum rank distance is exactly d = N − K + 1 and the cardinality
/// q^{ν·K} meets the maximum possible for that distance.
pub struct GabidulinCode {
    ext: Arc<ExtField>,
    len: usize,
    dim: usize,
    dist: usize,
    eval: Vec<ExtElem>,
    /// eval_pow[j][i] = g_j^{q^i} for i < K.
    eval_pow: Vec<Vec<ExtElem>>,
    /// parity_pow[u][j] = h_j^{q^u} for u ≤ d−2 (empty when d = 1).
    parity_pow: Vec<Vec<ExtElem>>,
    /// Inverse of the K×K Moore matrix of the first K evaluation points.
    moore_inv: Matrix<ExtField>,
    /// ν×N matrix over GF(q) whose columns are the parity points' coordinate
    /// expansions, for locating error coordinates.
    parity_expand: Matrix<Field>,
}

impl GabidulinCode {
    /// Builds the code with the given evaluation points, or the polynomial
    /// basis {1, α, …, α^{N−1}} when none are given.
    pub fn new(
        ext: Arc<ExtField>,
        len: usize,
        dist: usize,
        eval: Option<Vec<ExtElem>>,
    ) -> Result<GabidulinCode, CodeError> {
        let m = ext.degree();
        if len == 0 || len > m || dist == 0 || dist > len {
            return Err(CodeError::InvalidCode);
        }
        let dim = len - dist + 1;
        let eval = match eval {
            Some(e) => {
                if e.len() != len {
                    return Err(CodeError::InvalidCode);
                }
                e
            }
            None => {
                let alpha = ext.alpha();
                let mut pts = Vec::with_capacity(len);
                let mut acc = ext.one();
                for _ in 0..len {
                    pts.push(acc.clone());
                    acc = ext.mul(&acc, &alpha);
                }
                pts
            }
        };
        // Evaluation points must be GF(q)-linearly independent.
        if word_to_matrix(&ext, &eval).rank() != len {
            return Err(CodeError::InvalidCode);
        }

        let eval_pow: Vec<Vec<ExtElem>> = eval
            .iter()
            .map(|g| {
                let mut pows = Vec::with_capacity(dim);
                let mut x = g.clone();
                for _ in 0..dim {
                    pows.push(x.clone());
                    x = ext.frobenius(&x, 1);
                }
                pows
            })
            .collect();

        let moore = Matrix::from_fn(ext.clone(), dim, dim, |i, j| {
            ext.frobenius(&eval[j], i as i64)
        });
        let moore_inv = moore.inverse().map_err(|_| CodeError::InvalidCode)?;

        // Parity points h: the one-dimensional kernel of the Moore-type
        // system Σ_j g_j^{q^p} h_j = 0 for p = K−N+1 … K−1.
        let (parity_pow, parity_expand) = if dist >= 2 {
            let rows = len - 1;
            let sys = Matrix::from_fn(ext.clone(), rows, len, |i, j| {
                let p = dim as i64 - 1 - i as i64;
                ext.frobenius(&eval[j], p)
            });
            let ker = sys.kernel();
            if ker.rows() != 1 {
                return Err(CodeError::InvalidCode);
            }
            let h: Vec<ExtElem> = (0..len).map(|j| ker.get(0, j).clone()).collect();
            let h_mat = word_to_matrix(&ext, &h);
            if h_mat.rank() != len {
                return Err(CodeError::InvalidCode);
            }
            let mut pow = Vec::with_capacity(dist - 1);
            let mut cur = h.clone();
            for _ in 0..dist - 1 {
                pow.push(cur.clone());
                cur = cur.iter().map(|x| ext.frobenius(x, 1)).collect();
            }
            (pow, h_mat.transpose())
        } else {
            (
                Vec::new(),
                Matrix::zeros(ext.base().clone(), ext.degree(), 0),
            )
        };

        Ok(GabidulinCode {
            ext,
            len,
            dim,
            dist,
            eval,
            eval_pow,
            parity_pow,
            moore_inv,
            parity_expand,
        })
    }

    pub fn ext(&self) -> &Arc<ExtField> {
        &self.ext
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dist(&self) -> usize {
        self.dist
    }

    pub fn eval_points(&self) -> &[ExtElem] {
        &self.eval
    }

    /// Correction radius ⌊(d−1)/2⌋.
    pub fn radius(&self) -> usize {
        (self.dist - 1) / 2
    }

    /// Evaluates the message's linearized polynomial at every point.
    pub fn encode(&self, message: &[ExtElem]) -> Result<Vec<ExtElem>, CodeError> {
        if message.len() != self.dim {
            return Err(CodeError::LengthMismatch);
        }
        Ok((0..self.len)
            .map(|j| {
                let mut acc = self.ext.zero();
                for (u, gp) in message.iter().zip(&self.eval_pow[j]) {
                    acc = self.ext.add(&acc, &self.ext.mul(u, gp));
                }
                acc
            })
            .collect())
    }

    fn syndromes(&self, received: &[ExtElem]) -> Vec<ExtElem> {
        self.parity_pow
            .iter()
            .map(|hrow| {
                let mut acc = self.ext.zero();
                for (r, h) in received.iter().zip(hrow) {
                    acc = self.ext.add(&acc, &self.ext.mul(r, h));
                }
                acc
            })
            .collect()
    }

    /// Interpolates the message from a clean codeword.
    fn message_of_codeword(&self, word: &[ExtElem]) -> Vec<ExtElem> {
        let prefix = &word[..self.dim];
        (0..self.dim)
            .map(|i| {
                let mut acc = self.ext.zero();
                for (j, c) in prefix.iter().enumerate() {
                    acc = self
                        .ext
                        .add(&acc, &self.ext.mul(c, self.moore_inv.get(j, i)));
                }
                acc
            })
            .collect()
    }

    /// Bounded rank-distance decoding (errors only): returns the message of
    /// the unique codeword within ⌊(d−1)/2⌋ of the received word, or
    /// `DecodeFailure` when there is none.
    pub fn decode(&self, received: &[ExtElem]) -> Result<Vec<ExtElem>, CodeError> {
        if received.len() != self.len {
            return Err(CodeError::LengthMismatch);
        }
        let s = self.syndromes(received);
        if s.iter().all(|x| self.ext.is_zero(x)) {
            return Ok(self.message_of_codeword(received));
        }
        for t in 1..=self.radius() {
            if let Some(msg) = self.try_decode_t(received, &s, t) {
                return Ok(msg);
            }
        }
        Err(CodeError::DecodeFailure)
    }

    /// Attempts decoding under the hypothesis of an error of rank exactly t.
    fn try_decode_t(&self, received: &[ExtElem], s: &[ExtElem], t: usize) -> Option<Vec<ExtElem>> {
        let ext = &self.ext;
        let d = self.dist;
        // Error-span polynomial σ = Σ σ_p x^{q^p}, σ_t = 1, satisfying
        // Σ_p σ_p s_{p+j}^{q^{-j}} = 0 for 0 ≤ j ≤ d−2−t.
        let rows = d - 1 - t;
        if rows < t {
            return None;
        }
        let sys = Matrix::from_fn(ext.clone(), rows, t, |j, p| {
            ext.frobenius(&s[p + j], -(j as i64))
        });
        let rhs: Vec<ExtElem> = (0..rows)
            .map(|j| ext.neg(&ext.frobenius(&s[t + j], -(j as i64))))
            .collect();
        let sigma_low = sys.solve_right(&rhs).ok()?;
        let mut sigma = sigma_low;
        sigma.push(ext.one());

        // Root space of σ as a GF(q)-linear map, via the coordinate matrix.
        let m = ext.degree();
        let base = ext.base().clone();
        let sigma_mat = Matrix::from_fn(base.clone(), m, m, |_, _| Fe::ZERO);
        let mut sigma_mat = sigma_mat;
        for i in 0..m {
            let basis_elem = {
                let mut c = vec![Fe::ZERO; m];
                c[i] = Fe::ONE;
                ext.pack(&c).expect("length m")
            };
            let mut img = ext.zero();
            for (p, coef) in sigma.iter().enumerate() {
                let fr = ext.frobenius(&basis_elem, p as i64);
                img = ext.add(&img, &ext.mul(coef, &fr));
            }
            for (r, c) in ext.expand(&img).into_iter().enumerate() {
                sigma_mat.set(r, i, c);
            }
        }
        let roots = sigma_mat.kernel();
        if roots.rows() != t {
            return None;
        }
        let locators: Vec<ExtElem> = (0..t)
            .map(|l| ext.pack(roots.row(l)).expect("length m"))
            .collect();

        // Error values: Σ_l X_l^{q^u} Y_l = s_u for all u.
        let val_sys = Matrix::from_fn(ext.clone(), d - 1, t, |u, l| {
            ext.frobenius(&locators[l], u as i64)
        });
        let values = val_sys.solve_right(s).ok()?;

        // Error coordinates: expand each locator over the parity points.
        let mut err = vec![ext.zero(); self.len];
        for (l, x) in locators.iter().enumerate() {
            let coords = self.parity_expand.solve_right(&ext.expand(x)).ok()?;
            for (j, c) in coords.into_iter().enumerate() {
                if !c.is_zero() {
                    let contrib = ext.mul_base(&values[l], c);
                    err[j] = ext.add(&err[j], &contrib);
                }
            }
        }
        let codeword: Vec<ExtElem> = received
            .iter()
            .zip(&err)
            .map(|(r, e)| ext.sub(r, e))
            .collect();
        let msg = self.message_of_codeword(&codeword);
        // Full verification: re-encode and check the rank of the residual.
        let reenc = self.encode(&msg).expect("message length");
        if reenc != codeword {
            return None;
        }
        let diff: Vec<ExtElem> = received
            .iter()
            .zip(&reenc)
            .map(|(r, c)| ext.sub(r, c))
            .collect();
        if word_to_matrix(ext, &diff).rank() > self.radius() {
            return None;
        }
        Some(msg)
    }
}

// ---------------------------------------------------------------------------
// Liftings
// ---------------------------------------------------------------------------

/// A payload lifted into a flat of its protocol matroid.
#[derive(Clone, Debug)]
pub enum LiftedCodeword {
    /// Subset lifting: word entry X_i becomes ground element i·q^{n-l} + X_i.
    Subset { word: Vec<u64>, flat: Flat },
    /// Row space of (I_k | M).
    Linear { payload: Matrix, flat: Flat },
    /// Affine closure of the rows of (I'_k | M).
    Affine { payload: Matrix, flat: Flat },
}

impl LiftedCodeword {
    pub fn flat(&self) -> &Flat {
        match self {
            LiftedCodeword::Subset { flat, .. }
            | LiftedCodeword::Linear { flat, .. }
            | LiftedCodeword::Affine { flat, .. } => flat,
        }
    }
}

/// Linear lifting of a k×(n−k) payload.
pub fn lift_linear(m: &Matroid, payload: &Matrix) -> Result<LiftedCodeword, CodeError> {
    if m.kind() != Protocol::Rlnc {
        return Err(CodeError::ShapeMismatch);
    }
    let enc = m
        .encode_message(payload)
        .map_err(|_| CodeError::ShapeMismatch)?;
    let flat = m.closure(&enc.packets).expect("valid packets");
    Ok(LiftedCodeword::Linear {
        payload: payload.clone(),
        flat,
    })
}

/// Affine lifting of a k×(n−k+1) payload.
pub fn lift_affine(m: &Matroid, payload: &Matrix) -> Result<LiftedCodeword, CodeError> {
    if m.kind() != Protocol::Ranc {
        return Err(CodeError::ShapeMismatch);
    }
    let enc = m
        .encode_message(payload)
        .map_err(|_| CodeError::ShapeMismatch)?;
    let flat = m.closure(&enc.packets).expect("valid packets");
    Ok(LiftedCodeword::Affine {
        payload: payload.clone(),
        flat,
    })
}

/// Subset lifting of a length-q^l word over [q^{n-l}]: entry X_i becomes the
/// packet encoding i·q^{n-l} + X_i.
pub fn lift_subset(m: &Matroid, level: usize, word: &[u64]) -> Result<LiftedCodeword, CodeError> {
    if m.kind() != Protocol::Saf || level > m.n() {
        return Err(CodeError::ShapeMismatch);
    }
    let q = m.q();
    let header_span = q.pow(level as u32);
    let payload_span = q.pow((m.n() - level) as u32);
    if word.len() as u64 != header_span {
        return Err(CodeError::LengthMismatch);
    }
    if word.iter().any(|&x| x >= payload_span) {
        return Err(CodeError::ShapeMismatch);
    }
    let mut packets = Vec::with_capacity(word.len());
    for (i, &x) in word.iter().enumerate() {
        let mut idx = i as u64 * payload_span + x;
        let mut v = vec![Fe::ZERO; m.n()];
        for c in v.iter_mut().rev() {
            *c = Fe((idx % q) as u16);
            idx /= q;
        }
        packets.push(Packet(v));
    }
    let flat = m.closure(&packets).expect("valid packets");
    Ok(LiftedCodeword::Subset {
        word: word.to_vec(),
        flat,
    })
}

/// Prepends the column 1 − Σ_{i=0}^{k-2} col_i to M, mapping the homogenized
/// affine row space onto the corresponding linear row space one symbol wider.
pub fn extend_received(m: &Matrix, k: usize) -> Result<Matrix, CodeError> {
    if k == 0 || m.cols() + 1 < k {
        return Err(CodeError::ShapeMismatch);
    }
    let f = m.field().clone();
    Ok(Matrix::from_fn(
        f.clone(),
        m.rows(),
        m.cols() + 1,
        |i, j| {
            if j == 0 {
                let mut acc = Fe::ONE;
                for c in 0..k - 1 {
                    acc = f.sub(acc, *m.get(i, c));
                }
                acc
            } else {
                *m.get(i, j - 1)
            }
        },
    ))
}

// ---------------------------------------------------------------------------
// Protocol codecs
// ---------------------------------------------------------------------------

/// Shared pipeline: reduce raw received vectors, check the systematic part,
/// and decode the payload block.
fn reduce_and_decode(
    code: &GabidulinCode,
    field: &Arc<Field>,
    width: usize,
    k: usize,
    rows: impl Iterator<Item = Vec<Fe>>,
) -> Result<Vec<ExtElem>, CodeError> {
    let mut ech = Echelon::new(field.clone(), width);
    for r in rows {
        ech.absorb(r);
    }
    if ech.rank() < k {
        return Err(CodeError::RankDeficient);
    }
    // The first k columns must all be pivots; otherwise the reception is in
    // non-generic position and the systematic reduction does not exist.
    if ech.pivots()[..k] != (0..k).collect::<Vec<_>>()[..] {
        return Err(CodeError::DecodeFailure);
    }
    let word: Vec<ExtElem> = (0..k)
        .map(|i| {
            code.ext()
                .pack(&ech.rows()[i][k..])
                .expect("payload width matches the extension degree")
        })
        .collect();
    code.decode(&word)
}

/// End-to-end affine-lifting codec: Gabidulin over GF(q^{n−k+1}), length k,
/// then affine lifting; decoding extends received points by the prepended
/// column and runs the bounded rank-distance decoder.
pub struct RancCodec {
    matroid: Matroid,
    k: usize,
    code: GabidulinCode,
}

impl RancCodec {
    pub fn new(field: Arc<Field>, n: usize, k: usize, dist: usize) -> Result<RancCodec, CodeError> {
        if k == 0 || 2 * k > n + 1 {
            return Err(CodeError::InvalidCode);
        }
        let ext = ExtField::new(field.clone(), n - k + 1, None).map_err(|_| CodeError::InvalidCode)?;
        let code = GabidulinCode::new(ext, k, dist, None)?;
        Ok(RancCodec {
            matroid: Matroid::new(Protocol::Ranc, field, n),
            k,
            code,
        })
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn code(&self) -> &GabidulinCode {
        &self.code
    }

    pub fn message_len(&self) -> usize {
        self.code.dim()
    }

    pub fn random_message<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<ExtElem> {
        (0..self.code.dim())
            .map(|_| self.code.ext().sample(rng))
            .collect()
    }

    pub fn encode(&self, message: &[ExtElem]) -> Result<Vec<Packet>, CodeError> {
        let word = self.code.encode(message)?;
        let payload = word_to_matrix(self.code.ext(), &word);
        let enc = self
            .matroid
            .encode_message(&payload)
            .map_err(|_| CodeError::ShapeMismatch)?;
        Ok(enc.packets)
    }

    /// Decodes any packet multiset whose affine closure has rank ≥ k and
    /// modified lattice distance at most ⌊(d−1)/2⌋ from the sent flat
    /// (non-generic receptions surface as `DecodeFailure`).
    pub fn decode(&self, received: &[Packet]) -> Result<Vec<ExtElem>, CodeError> {
        let n = self.matroid.n();
        for p in received {
            if p.len() != n {
                return Err(CodeError::ShapeMismatch);
            }
        }
        let field = self.matroid.field().clone();
        // Points → homogenized → multiply by the prepend map: (1|v) X is v
        // with the column 1 − Σ_{i<k-1} v_i in front.
        let f = field.clone();
        let k = self.k;
        let rows = received.iter().map(move |p| {
            let mut row = Vec::with_capacity(n + 1);
            let mut acc = Fe::ONE;
            for c in 0..k - 1 {
                acc = f.sub(acc, p.0[c]);
            }
            row.push(acc);
            row.extend_from_slice(&p.0);
            row
        });
        reduce_and_decode(&self.code, &field, n + 1, self.k, rows)
    }
}

/// End-to-end linear-lifting codec: Gabidulin over GF(q^{n−k}), length k,
/// lifted as the row space of (I_k | M).
pub struct RlncCodec {
    matroid: Matroid,
    k: usize,
    code: GabidulinCode,
}

impl RlncCodec {
    pub fn new(field: Arc<Field>, n: usize, k: usize, dist: usize) -> Result<RlncCodec, CodeError> {
        if k == 0 || 2 * k > n {
            return Err(CodeError::InvalidCode);
        }
        let ext = ExtField::new(field.clone(), n - k, None).map_err(|_| CodeError::InvalidCode)?;
        let code = GabidulinCode::new(ext, k, dist, None)?;
        Ok(RlncCodec {
            matroid: Matroid::new(Protocol::Rlnc, field, n),
            k,
            code,
        })
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn code(&self) -> &GabidulinCode {
        &self.code
    }

    pub fn message_len(&self) -> usize {
        self.code.dim()
    }

    pub fn random_message<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<ExtElem> {
        (0..self.code.dim())
            .map(|_| self.code.ext().sample(rng))
            .collect()
    }

    pub fn encode(&self, message: &[ExtElem]) -> Result<Vec<Packet>, CodeError> {
        let word = self.code.encode(message)?;
        let payload = word_to_matrix(self.code.ext(), &word);
        let enc = self
            .matroid
            .encode_message(&payload)
            .map_err(|_| CodeError::ShapeMismatch)?;
        Ok(enc.packets)
    }

    /// Decodes raw received vectors (normalization is irrelevant to the row
    /// space, so no projective validation is applied).
    pub fn decode(&self, received: &[Packet]) -> Result<Vec<ExtElem>, CodeError> {
        let n = self.matroid.n();
        for p in received {
            if p.len() != n {
                return Err(CodeError::ShapeMismatch);
            }
        }
        let field = self.matroid.field().clone();
        let rows = received.iter().map(|p| p.0.clone());
        reduce_and_decode(&self.code, &field, n, self.k, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn tiny_ext(q: u64, m: usize) -> Arc<ExtField> {
        ExtField::new(Field::of_order(q).unwrap(), m, None).unwrap()
    }

    #[test]
    fn zero_message_encodes_to_zero() {
        let ext = tiny_ext(2, 4);
        let code = GabidulinCode::new(ext.clone(), 4, 3, None).unwrap();
        let msg = vec![ext.zero(); code.dim()];
        let word = code.encode(&msg).unwrap();
        assert!(word.iter().all(|s| ext.is_zero(s)));
    }

    #[test]
    fn distance_one_code_is_a_bijection() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let ext = tiny_ext(2, 3);
        let code = GabidulinCode::new(ext.clone(), 3, 1, None).unwrap();
        assert_eq!(code.dim(), 3);
        for _ in 0..50 {
            let msg: Vec<ExtElem> = (0..3).map(|_| ext.sample(&mut rng)).collect();
            let word = code.encode(&msg).unwrap();
            assert_eq!(code.decode(&word).unwrap(), msg);
        }
    }

    #[test]
    fn hand_evaluation_single_coefficient() {
        // q=2, ν=2, N=2, K=1: message (u) encodes to (u·1, u·α).
        let ext = tiny_ext(2, 2);
        let code = GabidulinCode::new(ext.clone(), 2, 2, None).unwrap();
        assert_eq!(code.dim(), 1);
        let u = ext.alpha();
        let word = code.encode(core::slice::from_ref(&u)).unwrap();
        assert_eq!(word[0], u);
        assert_eq!(word[1], ext.mul(&u, &ext.alpha()));
    }

    #[test]
    fn rank_distance_basics() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let f = Field::binary(1).unwrap();
        let a = Matrix::random(f.clone(), 3, 4, &mut rng);
        assert_eq!(rank_distance(&a, &a).unwrap(), 0);
        // Outer product of nonzero vectors has rank 1.
        let u = [Fe(1), Fe(0), Fe(1)];
        let v = [Fe(1), Fe(1), Fe(0), Fe(1)];
        let outer = Matrix::from_fn(f.clone(), 3, 4, |i, j| f.mul(u[i], v[j]));
        let zero = Matrix::zeros(f, 3, 4);
        assert_eq!(rank_distance(&outer, &zero).unwrap(), 1);
    }

    #[test]
    fn rank_one_matrix_count_2x2_gf2() {
        // The number of 2×2 binary matrices of rank 1 is [2 over 1]·(2^2−1) = 9.
        let f = Field::binary(1).unwrap();
        let mut count = 0;
        for bits in 0..16u32 {
            let m = Matrix::from_fn(f.clone(), 2, 2, |i, j| Fe(((bits >> (2 * i + j)) & 1) as u16));
            if m.rank() == 1 {
                count += 1;
            }
        }
        assert_eq!(count, 9);
    }

    #[test]
    fn corrects_random_rank_t_errors() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for (q, m, n_len, d) in [(2u64, 6usize, 5usize, 3usize), (4, 5, 4, 3), (2, 8, 6, 5)] {
            let ext = tiny_ext(q, m);
            let code = GabidulinCode::new(ext.clone(), n_len, d, None).unwrap();
            let t = code.radius();
            let base = ext.base().clone();
            for _ in 0..100 {
                let msg: Vec<ExtElem> = (0..code.dim()).map(|_| ext.sample(&mut rng)).collect();
                let word = code.encode(&msg).unwrap();
                // Random rank-t error: product of full-rank N×t and t×m.
                let a = Matrix::random_full_rank(base.clone(), t, n_len, &mut rng).transpose();
                let b = Matrix::random_full_rank(base.clone(), t, m, &mut rng);
                let e = a.mul(&b).unwrap();
                let received: Vec<ExtElem> = word
                    .iter()
                    .enumerate()
                    .map(|(j, w)| ext.add(w, &ext.pack(e.row(j)).unwrap()))
                    .collect();
                assert_eq!(code.decode(&received).unwrap(), msg);
            }
        }
    }

    #[test]
    fn lift_linear_of_zero_is_unit_span() {
        let field = Field::binary(1).unwrap();
        let m = Matroid::new(Protocol::Rlnc, field.clone(), 5);
        let payload = Matrix::zeros(field.clone(), 2, 3);
        let lifted = lift_linear(&m, &payload).unwrap();
        match lifted.flat() {
            Flat::Linear(b) => {
                let expect = Matrix::from_fn(field, 2, 5, |i, j| {
                    if i == j {
                        Fe(1)
                    } else {
                        Fe(0)
                    }
                });
                assert_eq!(b, &expect);
            }
            _ => panic!("wrong lifting"),
        }
    }

    #[test]
    fn subset_lifting_doubles_hamming_distance() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let field = Field::binary(1).unwrap();
        let m = Matroid::new(Protocol::Saf, field, 4);
        let level = 2usize; // words of length 4 over [4]
        for _ in 0..100 {
            let w1: Vec<u64> = (0..4).map(|_| rng.next_u64() % 4).collect();
            let w2: Vec<u64> = (0..4).map(|_| rng.next_u64() % 4).collect();
            let h: usize = w1.iter().zip(&w2).filter(|(a, b)| a != b).count();
            let l1 = lift_subset(&m, level, &w1).unwrap();
            let l2 = lift_subset(&m, level, &w2).unwrap();
            let d = crate::channel::distance(&m, l1.flat(), l2.flat()).unwrap();
            assert_eq!(d.lattice, 2 * h);
        }
    }

    #[test]
    fn extend_received_identities() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let field = Field::of_order(5).unwrap();
        // k = 1: the prepended column is all ones.
        let m = Matrix::random(field.clone(), 3, 4, &mut rng);
        let ext = extend_received(&m, 1).unwrap();
        for i in 0..3 {
            assert_eq!(*ext.get(i, 0), Fe(1));
        }
        // Applied to (I'_k | C), the row space becomes that of (I_k | C).
        let k = 3;
        let n = 7;
        let matroid = Matroid::new(Protocol::Ranc, field.clone(), n);
        let payload = Matrix::random(field.clone(), k, n - k + 1, &mut rng);
        let enc = matroid.encode_message(&payload).unwrap();
        let pts = Matrix::from_rows(
            field.clone(),
            n,
            enc.packets.iter().map(|p| p.0.clone()).collect(),
        );
        let extended = extend_received(&pts, k).unwrap();
        let lin = Matroid::new(Protocol::Rlnc, field.clone(), n + 1);
        let lin_enc = lin.encode_message(&payload).unwrap();
        let lin_mat = Matrix::from_rows(
            field,
            n + 1,
            lin_enc.packets.iter().map(|p| p.0.clone()).collect(),
        );
        assert_eq!(extended.row_space(), lin_mat.row_space());
    }

    #[test]
    fn codec_clean_round_trip_with_recombination() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        let field = Field::of_order(16).unwrap();
        let (n, k, d) = (9, 4, 3);
        let ranc = RancCodec::new(field.clone(), n, k, d).unwrap();
        for _ in 0..50 {
            let msg = ranc.random_message(&mut rng);
            let sent = ranc.encode(&msg).unwrap();
            let flat = ranc.matroid().closure(&sent).unwrap();
            let mut received = Vec::new();
            loop {
                received.push(ranc.matroid().sample_element(&flat, &mut rng).unwrap());
                if ranc.matroid().rank_of(&received).unwrap() == k {
                    break;
                }
            }
            assert_eq!(ranc.decode(&received).unwrap(), msg);
        }
    }

    #[test]
    fn codec_corrects_injections() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let field = Field::of_order(16).unwrap();
        let (n, k, d) = (9, 4, 3);
        let t = (d - 1) / 2;
        let ranc = RancCodec::new(field.clone(), n, k, d).unwrap();
        let mut ok = 0;
        let trials = 200;
        for _ in 0..trials {
            let msg = ranc.random_message(&mut rng);
            let sent = ranc.encode(&msg).unwrap();
            let received =
                crate::channel::corrupt_packets(ranc.matroid(), &sent, t, 0, &mut rng);
            if ranc.decode(&received) == Ok(msg) {
                ok += 1;
            }
        }
        // Non-generic injections at q=16 are rare but possible.
        assert!(ok >= trials - 4, "only {ok}/{trials} recovered");
    }

    #[test]
    fn ranc_decode_equals_rlnc_decode_of_extended_matrix() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let field = Field::of_order(8).unwrap();
        let (n, k, d) = (9, 4, 3);
        let ranc = RancCodec::new(field.clone(), n, k, d).unwrap();
        // Same payload code: the linear pipeline one symbol wider.
        let rlnc = RlncCodec::new(field.clone(), n + 1, k, d).unwrap();
        for trial in 0..100 {
            let msg = ranc.random_message(&mut rng);
            let sent = ranc.encode(&msg).unwrap();
            let received = crate::channel::corrupt_packets(
                ranc.matroid(),
                &sent,
                (d - 1) / 2,
                usize::from(trial % 3 == 0),
                &mut rng,
            );
            let direct = ranc.decode(&received);
            let pts = Matrix::from_rows(
                field.clone(),
                n,
                received.iter().map(|p| p.0.clone()).collect(),
            );
            let extended = extend_received(&pts, k).unwrap();
            let as_packets: Vec<Packet> =
                (0..extended.rows()).map(|i| Packet(extended.row_vec(i))).collect();
            let via_linear = rlnc.decode(&as_packets);
            assert_eq!(direct, via_linear);
        }
    }

    #[test]
    fn rank_deficient_reception_reported() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let field = Field::of_order(16).unwrap();
        let ranc = RancCodec::new(field, 9, 4, 3).unwrap();
        let msg = ranc.random_message(&mut rng);
        let sent = ranc.encode(&msg).unwrap();
        assert_eq!(
            ranc.decode(&sent[..3]).err(),
            Some(CodeError::RankDeficient)
        );
    }

    #[test]
    fn pipeline_width_accounting() {
        // At equal (q, n, k, d) the affine payload is one column wider.
        let field = Field::of_order(4).unwrap();
        let (n, k, d) = (9, 4, 2);
        let ranc = RancCodec::new(field.clone(), n, k, d).unwrap();
        let rlnc = RlncCodec::new(field, n, k, d).unwrap();
        assert_eq!(ranc.code().ext().degree(), n - k + 1);
        assert_eq!(rlnc.code().ext().degree(), n - k);
        assert_eq!(ranc.message_len(), rlnc.message_len());
    }
}
