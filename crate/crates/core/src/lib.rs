//! Random network communications modeled as the transmission of flats of a
//! matroid.
//!
//! Three protocols are covered, each with its own matroid on length-`n`
//! packets over GF(q):
//!
//! - store-and-forward (SAF): the free matroid, flats are packet subsets;
//! - random linear network coding (RLNC): the projective geometry, flats are
//!   linear subspaces;
//! - random affine network coding (RANC): the affine geometry, flats are
//!   affine subspaces.
//!
//! On top of the matroid layer sit the operator channel with its two flat
//! metrics ([`channel`]), exact rational performance analytics ([`analysis`]),
//! rank-metric codecs built from liftings of Gabidulin codes ([`codes`]), and
//! cardinality bounds for codes on flats ([`bounds`]).
//!
//! The crate is `no_std` (with `alloc`); all IO lives in the companion CLI
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod bounds;
pub mod channel;
pub mod codes;
pub mod gf;
pub mod linalg;
pub mod matroid;

pub use gf::{ExtElem, ExtField, Fe, Field};
pub use linalg::Matrix;
pub use matroid::{Flat, Matroid, Packet, Protocol};
