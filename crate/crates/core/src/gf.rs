//! Finite-field arithmetic: prime fields GF(p), binary fields GF(2^s), and
//! extension towers GF(q^m) with the q-power Frobenius map.
//!
//! Base-field elements are canonical integer indices in `[0, q)` (base-p digit
//! encoding of the coordinate vector over the prime field), with
//! multiplication done through log/antilog tables. Extension-field elements
//! are coordinate vectors over the base field in the polynomial basis
//! `{1, α, …, α^{m−1}}`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use rand_core::RngCore;

/// Errors from field construction and arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GfError {
    NonPrimeCharacteristic,
    ReducibleModulus,
    WrongModulusDegree,
    /// Only GF(p) with p < 2^16 and GF(2^s) with s ≤ 16 are supported as base
    /// fields, and extension degrees up to 64.
    UnsupportedField,
    DivisionByZero,
    WrongLength,
}

impl fmt::Display for GfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GfError::NonPrimeCharacteristic => write!(f, "characteristic is not prime"),
            GfError::ReducibleModulus => write!(f, "modulus polynomial is reducible"),
            GfError::WrongModulusDegree => write!(f, "modulus polynomial has the wrong degree"),
            GfError::UnsupportedField => write!(f, "unsupported field parameters"),
            GfError::DivisionByZero => write!(f, "division by zero"),
            GfError::WrongLength => write!(f, "coordinate sequence has the wrong length"),
        }
    }
}

impl core::error::Error for GfError {}

/// A base-field element, stored as its canonical index in `[0, q)`.
///
/// Index 0 is the additive identity and index 1 the multiplicative identity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub u16);

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A base field: GF(p) for prime p < 2^16, or GF(2^s) for s ≤ 16.
///
/// Immutable after construction and safe to share across threads; all
/// operations are pure.
pub struct Field {
    p: u64,
    s: u32,
    order: u64,
    /// Modulus polynomial over GF(p), little-endian coefficients, monic,
    /// length s+1. For prime fields this is `x`.
    modulus: Vec<u16>,
    /// log[a] is defined for a in [1, q); exp[i] = g^i for i in [0, q-1).
    log: Vec<u16>,
    exp: Vec<u16>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.s == other.s && self.modulus == other.modulus
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of binary polynomial division (bit-packed, LSB = constant term).
fn poly_rem_bits(mut a: u64, b: u64) -> u64 {
    let db = 63 - b.leading_zeros() as i32;
    loop {
        let da = 63 - (a.leading_zeros() as i32);
        if a == 0 || da < db {
            return a;
        }
        a ^= b << (da - db);
    }
}

fn is_irreducible_bits(f: u64, deg: u32) -> bool {
    for d in 1..=deg / 2 {
        for g in (1u64 << d)..(1u64 << (d + 1)) {
            if poly_rem_bits(f, g) == 0 {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Creates GF(p^s). When `modulus` is omitted, the irreducible polynomial
    /// of degree `s` over GF(p) with the smallest integer encoding is chosen
    /// (coefficients read as base-p digits, low degree = low-order digit).
    pub fn new(p: u64, s: u32, modulus: Option<&[u16]>) -> Result<Arc<Field>, GfError> {
        if !is_prime(p) {
            return Err(GfError::NonPrimeCharacteristic);
        }
        if s == 0 || p >= 1 << 16 || (s > 1 && p != 2) || (p == 2 && s > 16) {
            return Err(GfError::UnsupportedField);
        }
        let order = p.pow(s);

        let modulus: Vec<u16> = match modulus {
            Some(m) => {
                let mut m = m.to_vec();
                while m.last() == Some(&0) {
                    m.pop();
                }
                if m.len() != s as usize + 1 {
                    return Err(GfError::WrongModulusDegree);
                }
                if m.iter().any(|&c| c as u64 >= p) {
                    return Err(GfError::WrongModulusDegree);
                }
                // Normalize to monic; scaling does not change the quotient ring.
                if s > 1 {
                    if m[s as usize] != 1 {
                        return Err(GfError::WrongModulusDegree);
                    }
                    let bits = m
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (i, &c)| acc | ((c as u64) << i));
                    if !is_irreducible_bits(bits, s) {
                        return Err(GfError::ReducibleModulus);
                    }
                }
                m
            }
            None => {
                if s == 1 {
                    // x
                    vec![0, 1]
                } else {
                    // Sieve binary polynomials of degree s by ascending encoding.
                    let mut found = None;
                    for low in 0..(1u64 << s) {
                        let bits = (1u64 << s) | low;
                        if is_irreducible_bits(bits, s) {
                            found = Some(bits);
                            break;
                        }
                    }
                    let bits = found.expect("an irreducible polynomial of every degree exists");
                    (0..=s).map(|i| ((bits >> i) & 1) as u16).collect()
                }
            }
        };

        let mut field = Field {
            p,
            s,
            order,
            modulus,
            log: Vec::new(),
            exp: Vec::new(),
        };
        field.build_tables();
        Ok(Arc::new(field))
    }

    pub fn prime(p: u64) -> Result<Arc<Field>, GfError> {
        Field::new(p, 1, None)
    }

    pub fn binary(s: u32) -> Result<Arc<Field>, GfError> {
        Field::new(2, s, None)
    }

    /// Creates the field of order `q`, factoring `q` as p or 2^s.
    pub fn of_order(q: u64) -> Result<Arc<Field>, GfError> {
        if q.is_power_of_two() {
            Field::binary(q.trailing_zeros())
        } else {
            Field::prime(q)
        }
    }

    /// Multiplication from first principles, used only to build the tables.
    fn raw_mul(&self, a: u64, b: u64) -> u64 {
        if self.s == 1 {
            a * b % self.p
        } else {
            // Carryless multiply reduced by the modulus, on bit-packed polys.
            let modbits = self
                .modulus
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &c)| acc | ((c as u64) << i));
            let (mut acc, mut a, mut b) = (0u64, a, b);
            while b != 0 {
                if b & 1 != 0 {
                    acc ^= a;
                }
                b >>= 1;
                a <<= 1;
                if a >> self.s != 0 {
                    a ^= modbits;
                }
            }
            acc
        }
    }

    fn raw_pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 != 0 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&mut self) {
        let q = self.order;
        let group = q - 1;
        let mut factors = Vec::new();
        let mut rem = group;
        let mut d = 2;
        while d * d <= rem {
            if rem % d == 0 {
                factors.push(d);
                while rem % d == 0 {
                    rem /= d;
                }
            }
            d += 1;
        }
        if rem > 1 {
            factors.push(rem);
        }
        let gen = (2..q)
            .find(|&g| factors.iter().all(|&f| self.raw_pow(g, group / f) != 1))
            .unwrap_or(1);

        let mut exp = vec![0u16; group.max(1) as usize];
        let mut log = vec![0u16; q as usize];
        let mut acc = 1u64;
        for (i, e) in exp.iter_mut().enumerate() {
            *e = acc as u16;
            log[acc as usize] = i as u16;
            acc = self.raw_mul(acc, gen);
        }
        debug_assert_eq!(acc, 1);
        self.exp = exp;
        self.log = log;
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.s
    }

    pub fn modulus(&self) -> &[u16] {
        &self.modulus
    }

    /// Checked construction of an element from its index.
    pub fn fe(&self, v: u64) -> Fe {
        assert!(v < self.order, "index {} out of range for {:?}", v, self);
        Fe(v as u16)
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            Fe(a.0 ^ b.0)
        } else {
            Fe(((a.0 as u64 + b.0 as u64) % self.p) as u16)
        }
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 || a.0 == 0 {
            a
        } else {
            Fe((self.p - a.0 as u64) as u16)
        }
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.is_zero() || b.is_zero() {
            return Fe::ZERO;
        }
        let group = self.order - 1;
        let i = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % group;
        Fe(self.exp[i as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        let group = self.order - 1;
        let i = (group - self.log[a.0 as usize] as u64) % group;
        Ok(Fe(self.exp[i as usize]))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a` raised to a non-negative integer exponent; 0^0 = 1.
    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe::ONE;
        }
        if a.is_zero() {
            return Fe::ZERO;
        }
        let group = self.order - 1;
        let i = (self.log[a.0 as usize] as u64 % group) * (e % group) % group;
        Fe(self.exp[i as usize])
    }

    /// Uniform random element.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Fe {
        let q = self.order as u32;
        let zone = (u32::MAX / q) * q;
        loop {
            let v = rng.next_u32();
            if v < zone {
                return Fe((v % q) as u16);
            }
        }
    }

    /// Uniform random nonzero element.
    pub fn sample_nonzero<R: RngCore + ?Sized>(&self, rng: &mut R) -> Fe {
        loop {
            let v = self.sample(rng);
            if !v.is_zero() {
                return v;
            }
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.order).map(|v| Fe(v as u16))
    }
}

// ---------------------------------------------------------------------------
// Polynomials over a base field (little-endian coefficient vectors), used for
// extension-field construction and arithmetic.
// ---------------------------------------------------------------------------

pub(crate) mod poly {
    use super::*;

    pub fn deg(a: &[Fe]) -> Option<usize> {
        a.iter().rposition(|c| !c.is_zero())
    }

    pub fn trim(mut a: Vec<Fe>) -> Vec<Fe> {
        while a.last().map_or(false, |c| c.is_zero()) {
            a.pop();
        }
        a
    }

    pub fn add(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        let n = a.len().max(b.len());
        let mut out = vec![Fe::ZERO; n];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(Fe::ZERO);
            let y = b.get(i).copied().unwrap_or(Fe::ZERO);
            *o = f.add(x, y);
        }
        trim(out)
    }

    pub fn sub(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        let n = a.len().max(b.len());
        let mut out = vec![Fe::ZERO; n];
        for (i, o) in out.iter_mut().enumerate() {
            let x = a.get(i).copied().unwrap_or(Fe::ZERO);
            let y = b.get(i).copied().unwrap_or(Fe::ZERO);
            *o = f.sub(x, y);
        }
        trim(out)
    }

    pub fn mul(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Fe::ZERO; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        trim(out)
    }

    /// Remainder of `a` by `b`; `b` must be nonzero.
    pub fn rem(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        let db = deg(b).expect("division by the zero polynomial");
        let lead_inv = f.inv(b[db]).expect("nonzero leading coefficient");
        let mut r: Vec<Fe> = a.to_vec();
        loop {
            let dr = match deg(&r) {
                Some(d) if d >= db => d,
                _ => return trim(r),
            };
            let coef = f.mul(r[dr], lead_inv);
            let shift = dr - db;
            for (j, &bc) in b.iter().enumerate().take(db + 1) {
                r[shift + j] = f.sub(r[shift + j], f.mul(coef, bc));
            }
        }
    }

    pub fn gcd(f: &Field, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(f, &a, &b);
            a = b;
            b = r;
        }
        // Monic normalization.
        if let Some(d) = deg(&a) {
            let inv = f.inv(a[d]).expect("nonzero leading coefficient");
            for c in a.iter_mut() {
                *c = f.mul(*c, inv);
            }
        }
        a
    }

    pub fn pow_mod(f: &Field, base: &[Fe], e: &BigUint, modulus: &[Fe]) -> Vec<Fe> {
        let mut acc = vec![Fe::ONE];
        let mut b = rem(f, base, modulus);
        for i in 0..e.bits() {
            if e.bit(i) {
                acc = rem(f, &mul(f, &acc, &b), modulus);
            }
            b = rem(f, &mul(f, &b, &b), modulus);
        }
        acc
    }

    /// Rabin irreducibility test over GF(q).
    pub fn is_irreducible(f: &Field, p: &[Fe]) -> bool {
        let m = match deg(p) {
            Some(0) | None => return false,
            Some(1) => return true,
            Some(m) => m,
        };
        let q = BigUint::from(f.order());
        let x = vec![Fe::ZERO, Fe::ONE];
        // x^{q^m} ≡ x (mod p)
        let t = pow_mod(f, &x, &q.pow(m as u32), p);
        if !sub(f, &t, &x).is_empty() {
            return false;
        }
        let mut primes = Vec::new();
        let mut rem_m = m;
        let mut d = 2;
        while d * d <= rem_m {
            if rem_m % d == 0 {
                primes.push(d);
                while rem_m % d == 0 {
                    rem_m /= d;
                }
            }
            d += 1;
        }
        if rem_m > 1 {
            primes.push(rem_m);
        }
        for l in primes {
            let t = pow_mod(f, &x, &q.pow((m / l) as u32), p);
            let g = gcd(f, &sub(f, &t, &x), p);
            if deg(&g) != Some(0) {
                return false;
            }
        }
        true
    }
}

/// An extension field GF(q^m) over a base [`Field`] of order q.
///
/// Elements are length-`m` coordinate vectors in the polynomial basis.
pub struct ExtField {
    base: Arc<Field>,
    m: usize,
    /// Monic modulus over the base field, little-endian, length m+1.
    modulus: Vec<Fe>,
    /// α^q, the Frobenius image of the generator.
    frob_gen: ExtElem,
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for ExtField {}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.base.order(), self.m)
    }
}

/// An extension-field element: its coordinate vector over the base field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtElem(Vec<Fe>);

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl ExtElem {
    pub fn coeffs(&self) -> &[Fe] {
        &self.0
    }
}

impl ExtField {
    /// Creates GF(q^m) over `base`. When `modulus` is omitted, the degree-m
    /// irreducible polynomial over GF(q) with the smallest integer encoding
    /// (base-q digits) is selected by sieve.
    pub fn new(
        base: Arc<Field>,
        m: usize,
        modulus: Option<Vec<Fe>>,
    ) -> Result<Arc<ExtField>, GfError> {
        if m == 0 || m > 64 {
            return Err(GfError::UnsupportedField);
        }
        let modulus = match modulus {
            Some(mm) => {
                let mm = poly::trim(mm);
                if poly::deg(&mm) != Some(m) {
                    return Err(GfError::WrongModulusDegree);
                }
                let mut mm = mm;
                if mm[m] != Fe::ONE {
                    let inv = base.inv(mm[m]).expect("nonzero leading coefficient");
                    for c in mm.iter_mut() {
                        *c = base.mul(*c, inv);
                    }
                }
                if !poly::is_irreducible(&base, &mm) {
                    return Err(GfError::ReducibleModulus);
                }
                mm
            }
            None => {
                let q = base.order();
                let mut low = vec![Fe::ZERO; m];
                'sieve: loop {
                    let mut cand = low.clone();
                    cand.push(Fe::ONE);
                    if poly::is_irreducible(&base, &cand) {
                        break 'sieve cand;
                    }
                    // Odometer increment of the low part, base q.
                    for digit in low.iter_mut() {
                        if (digit.0 as u64) + 1 < q {
                            digit.0 += 1;
                            continue 'sieve;
                        }
                        *digit = Fe::ZERO;
                    }
                    panic!("no irreducible polynomial found, which is impossible");
                }
            }
        };

        let q = BigUint::from(base.order());
        let x = vec![Fe::ZERO, Fe::ONE];
        let beta = poly::pow_mod(&base, &x, &q, &modulus);
        let mut frob = beta;
        frob.resize(m, Fe::ZERO);
        Ok(Arc::new(ExtField {
            base,
            m,
            modulus,
            frob_gen: ExtElem(frob),
        }))
    }

    pub fn base(&self) -> &Arc<Field> {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[Fe] {
        &self.modulus
    }

    /// q^m as a big integer.
    pub fn order(&self) -> BigUint {
        BigUint::from(self.base.order()).pow(self.m as u32)
    }

    pub fn zero(&self) -> ExtElem {
        ExtElem(vec![Fe::ZERO; self.m])
    }

    pub fn one(&self) -> ExtElem {
        let mut c = vec![Fe::ZERO; self.m];
        c[0] = Fe::ONE;
        ExtElem(c)
    }

    /// The generator α (the class of x), when m > 1; for m = 1 this is the
    /// class of x, i.e. the negated constant term of the modulus.
    pub fn alpha(&self) -> ExtElem {
        if self.m == 1 {
            ExtElem(vec![self.base.neg(self.modulus[0])])
        } else {
            let mut c = vec![Fe::ZERO; self.m];
            c[1] = Fe::ONE;
            ExtElem(c)
        }
    }

    pub fn from_base(&self, a: Fe) -> ExtElem {
        let mut c = vec![Fe::ZERO; self.m];
        c[0] = a;
        ExtElem(c)
    }

    pub fn is_zero(&self, a: &ExtElem) -> bool {
        a.0.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| self.base.add(x, y))
                .collect(),
        )
    }

    pub fn neg(&self, a: &ExtElem) -> ExtElem {
        ExtElem(a.0.iter().map(|&x| self.base.neg(x)).collect())
    }

    pub fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| self.base.sub(x, y))
                .collect(),
        )
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let f = &*self.base;
        let mut prod = vec![Fe::ZERO; 2 * self.m - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = f.add(prod[i + j], f.mul(x, y));
            }
        }
        // Reduce by the monic modulus.
        for i in (self.m..prod.len()).rev() {
            let c = prod[i];
            if c.is_zero() {
                continue;
            }
            prod[i] = Fe::ZERO;
            for (j, &mc) in self.modulus.iter().enumerate().take(self.m) {
                prod[i - self.m + j] = f.sub(prod[i - self.m + j], f.mul(c, mc));
            }
        }
        prod.truncate(self.m);
        ExtElem(prod)
    }

    pub fn mul_base(&self, a: &ExtElem, c: Fe) -> ExtElem {
        ExtElem(a.0.iter().map(|&x| self.base.mul(x, c)).collect())
    }

    pub fn inv(&self, a: &ExtElem) -> Result<ExtElem, GfError> {
        if self.is_zero(a) {
            return Err(GfError::DivisionByZero);
        }
        // Extended Euclid on (modulus, a): track t with t·a ≡ gcd (mod modulus).
        let f = &*self.base;
        let mut r0: Vec<Fe> = self.modulus.clone();
        let mut r1 = poly::trim(a.0.clone());
        let mut t0: Vec<Fe> = Vec::new();
        let mut t1 = vec![Fe::ONE];
        while !r1.is_empty() {
            // Compute quotient of r0 by r1.
            let d1 = poly::deg(&r1).expect("nonzero");
            let lead_inv = f.inv(r1[d1]).expect("nonzero leading coefficient");
            let mut q = vec![Fe::ZERO; r0.len()];
            let mut r = r0.clone();
            while let Some(dr) = poly::deg(&r) {
                if dr < d1 {
                    break;
                }
                let coef = f.mul(r[dr], lead_inv);
                q[dr - d1] = coef;
                for (j, &bc) in r1.iter().enumerate().take(d1 + 1) {
                    r[dr - d1 + j] = f.sub(r[dr - d1 + j], f.mul(coef, bc));
                }
            }
            let q = poly::trim(q);
            let r = poly::trim(r);
            let qt1 = poly::mul(f, &q, &t1);
            let new_t = poly::add(f, &t0, &poly::mul(f, &[f.neg(Fe::ONE)], &qt1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = new_t;
        }
        // r0 is the gcd, a nonzero constant; scale t0 by its inverse.
        let d = poly::deg(&r0).expect("gcd of a nonzero element is nonzero");
        debug_assert_eq!(d, 0, "modulus is irreducible");
        let scale = f.inv(r0[0])?;
        let mut out = poly::mul(f, &t0, &[scale]);
        out = poly::rem(f, &out, &self.modulus);
        out.resize(self.m, Fe::ZERO);
        Ok(ExtElem(out))
    }

    pub fn div(&self, a: &ExtElem, b: &ExtElem) -> Result<ExtElem, GfError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &ExtElem, mut e: u64) -> ExtElem {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 != 0 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    /// The q-power Frobenius `a^{q^e}`; `e` may be negative (the map has
    /// order m). It is GF(q)-linear and additive.
    pub fn frobenius(&self, a: &ExtElem, e: i64) -> ExtElem {
        let steps = e.rem_euclid(self.m as i64) as usize;
        let mut x = a.clone();
        for _ in 0..steps {
            x = self.frobenius_once(&x);
        }
        x
    }

    /// a^q, computed by evaluating the coordinate polynomial at α^q.
    fn frobenius_once(&self, a: &ExtElem) -> ExtElem {
        let mut acc = self.zero();
        for &c in a.0.iter().rev() {
            acc = self.mul(&acc, &self.frob_gen);
            acc.0[0] = self.base.add(acc.0[0], c);
        }
        acc
    }

    /// Length-m coordinate expansion over the base field (polynomial basis).
    pub fn expand(&self, a: &ExtElem) -> Vec<Fe> {
        a.0.clone()
    }

    /// Inverse of [`ExtField::expand`].
    pub fn pack(&self, coeffs: &[Fe]) -> Result<ExtElem, GfError> {
        if coeffs.len() != self.m {
            return Err(GfError::WrongLength);
        }
        Ok(ExtElem(coeffs.to_vec()))
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> ExtElem {
        ExtElem((0..self.m).map(|_| self.base.sample(rng)).collect())
    }

    /// Element with canonical index `idx` (base-q digits), for enumerating
    /// small fields.
    pub fn from_index(&self, mut idx: u64) -> ExtElem {
        let q = self.base.order();
        let mut c = vec![Fe::ZERO; self.m];
        for coeff in c.iter_mut() {
            *coeff = Fe((idx % q) as u16);
            idx /= q;
        }
        debug_assert_eq!(idx, 0);
        ExtElem(c)
    }

    pub fn to_index(&self, a: &ExtElem) -> u64 {
        let q = self.base.order();
        a.0.iter().rev().fold(0u64, |acc, &c| acc * q + c.0 as u64)
    }

    /// All q^m elements; only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = ExtElem> + '_ {
        let count: u64 = self
            .order()
            .try_into()
            .expect("field too large to enumerate");
        (0..count).map(|i| self.from_index(i))
    }
}
