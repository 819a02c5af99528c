use rug::ops::PowAssign;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::Real;
use crate::error::{Error, Result};

/// Extra bits carried beyond the requested decimal digits.
pub const GUARD_BITS: u32 = 32;

/// Working precision shared by every value of one computation.
///
/// The user-facing knob is the number of decimal digits `D`; the binary
/// precision is `ceil(D * log2(10)) + GUARD_BITS`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionCtx {
    digits: u32,
}

impl Default for PrecisionCtx {
    fn default() -> Self {
        PrecisionCtx { digits: Self::DEFAULT_DIGITS }
    }
}

impl PrecisionCtx {
    pub const DEFAULT_DIGITS: u32 = 64;
    pub const MIN_DIGITS: u32 = 16;

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::InvalidPrecision(digits));
        }
        Ok(PrecisionCtx { digits })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
    }

    pub fn real(&self, x: f64) -> Real {
        Real::from(Float::with_val(self.bits(), x))
    }

    pub fn int(&self, x: i64) -> Real {
        Real::from(Float::with_val(self.bits(), x))
    }

    pub fn zero(&self) -> Real {
        Real::from(Float::new(self.bits()))
    }

    pub fn one(&self) -> Real {
        self.int(1)
    }

    pub fn zeros(&self, n: usize) -> Vec<Real> {
        vec![self.zero(); n]
    }

    pub fn pi(&self) -> Real {
        Real::from(Float::with_val(self.bits(), rug::float::Constant::Pi))
    }

    /// `10^e`, correctly rounded.
    pub fn pow10(&self, e: i32) -> Real {
        let mut f = Float::with_val(self.bits(), 10);
        f.pow_assign(e);
        Real::from(f)
    }

    /// `10^(-D)`.
    pub fn eps(&self) -> Real {
        self.pow10(-(self.digits as i32))
    }

    pub fn rational(&self, q: &Rational) -> Real {
        Real::from(Float::with_val(self.bits(), q))
    }

    pub fn parse(&self, s: &str) -> Result<Real> {
        let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Real::from(Float::with_val(self.bits(), parsed)))
    }

    /// Rebinds a value to this context's precision.
    pub fn adopt(&self, x: &Real) -> Real {
        Real::from(Float::with_val(self.bits(), x.as_float()))
    }
}
