use crate::error::{Error, Result};

/// Default number of guard bits subtracted from `prec_bits` when stating tolerances.
pub const DEFAULT_GUARD: u32 = 16;
pub const DEFAULT_PREC_BITS: u32 = 128;

/// Working precision in bits and the tolerance `eps = 2^-(prec_bits - guard)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    prec_bits: u32,
    guard: u32,
}

impl PrecisionContext {
    pub fn new(prec_bits: u32) -> Result<Self> {
        Self::with_guard(prec_bits, DEFAULT_GUARD)
    }

    pub fn with_guard(prec_bits: u32, guard: u32) -> Result<Self> {
        if prec_bits < 64 {
            return Err(Error::InvalidParameter(alloc::format!(
                "prec_bits = {prec_bits} < 64"
            )));
        }
        if guard >= prec_bits - 8 {
            return Err(Error::InvalidParameter(alloc::format!(
                "guard {guard} too large for {prec_bits} bits"
            )));
        }
        Ok(Self { prec_bits, guard })
    }

    pub fn prec_bits(&self) -> u32 {
        self.prec_bits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// log2 of `eps`.
    pub fn eps_log2(&self) -> i32 {
        -((self.prec_bits - self.guard) as i32)
    }

    pub fn eps(&self) -> f64 {
        crate::mp::pow2(self.eps_log2())
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self { prec_bits: DEFAULT_PREC_BITS, guard: DEFAULT_GUARD }
    }
}
