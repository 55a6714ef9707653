//! Families of subsets of a finite universe, ordered by domination, with the
//! labelled arrow classes, lifting, factorizations, homotopy search, derived
//! values and the covering oracle built on them.
//!
//! Everything here is `no_std` with `alloc`; IO and formats live in the `posetal` crate.

#![no_std]

extern crate alloc;

pub mod atoms;
pub mod cover;
pub mod derived;
pub mod enumerate;
pub mod error;
pub mod factor;
pub mod family;
pub mod homotopy;
pub mod instance;
pub mod label;
pub mod lifting;
pub mod pool;
pub mod verify;

pub use atoms::{AtomSet, Permutation};
pub use error::Error;
pub use family::{arrow, arrow_exists, Family};
pub use instance::{Instance, Mode, Mutation, Variant};
pub use label::{Label, LabelSet};
