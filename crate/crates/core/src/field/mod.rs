//! Exact arithmetic in F_q and F_{q^l}.
//!
//! The base field is a polynomial quotient of F_p; the extension is built
//! directly over F_q as a two-level tower. Every element carries the
//! identifier of its owning field and binary operations check it.

mod base;
mod ext;
mod linearized;
pub(crate) mod poly;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use base::{BaseField, MAX_BASE_ORDER};
pub use ext::{ArithOp, ExtField};
pub use linearized::{linearized_eval, moore_matrix, q_powers};
pub use poly::prime_power;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("expected {expected} coordinates, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value {0} is outside the field")]
    OutOfRange(u64),
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("modulus is reducible")]
    Reducible,
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("field too large for this library")]
    TooLarge,
}

/// Identifies a concrete field by its defining data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldId(u64);

impl FieldId {
    fn derive(base: &BaseField, ext_modulus: &[u32]) -> Self {
        let mut words = vec![base.characteristic()];
        words.extend_from_slice(base.modulus());
        words.push(u32::MAX);
        words.extend_from_slice(ext_modulus);
        FieldId(crate::rng::fnv1a(words.iter().flat_map(|w| w.to_le_bytes())))
    }
}

/// An element of some [`ExtField`], stored by its packed coordinate value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: FieldId,
    value: u32,
}

impl FieldElement {
    pub(crate) fn new(field: FieldId, value: u32) -> Self {
        Self { field, value }
    }

    /// Packed value `sum_i c_i q^i` of the coordinates.
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> FieldId {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
