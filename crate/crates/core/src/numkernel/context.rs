use crate::error::{Error, Result};

/// log2(10), used to convert decimal digit counts into bits.
pub const LOG2_10: f64 = std::f64::consts::LOG2_10;

pub const MIN_BITS: u32 = 64;
pub const DEFAULT_GUARD_DIGITS: u32 = 10;

/// Working precision threaded through every multiprecision operation.
///
/// `bits` is the binary precision values are rounded to; `target_digits` is
/// the number of decimal digits a caller expects to be correct, and
/// `guard_digits` is the slack carried on top of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    bits: u32,
    target_digits: u32,
    guard_digits: u32,
}

fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32
}

impl PrecisionContext {
    /// Context for `target_digits` correct decimal digits with the default
    /// guard.
    pub fn new(target_digits: u32) -> Self {
        Self::with_guard(target_digits, DEFAULT_GUARD_DIGITS)
    }

    pub fn with_guard(target_digits: u32, guard_digits: u32) -> Self {
        let guard_digits = guard_digits.max(DEFAULT_GUARD_DIGITS);
        let bits = bits_for_digits(target_digits + guard_digits).max(MIN_BITS);
        Self {
            bits,
            target_digits,
            guard_digits,
        }
    }

    /// Builds a context from explicit fields, checking every invariant.
    pub fn try_from_parts(bits: u32, target_digits: u32, guard_digits: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::InvalidPrecision(format!(
                "bits = {bits} is below the minimum of {MIN_BITS}"
            )));
        }
        if guard_digits < DEFAULT_GUARD_DIGITS {
            return Err(Error::InvalidPrecision(format!(
                "guard_digits = {guard_digits} is below {DEFAULT_GUARD_DIGITS}"
            )));
        }
        let needed = bits_for_digits(target_digits + guard_digits);
        if bits < needed {
            return Err(Error::InvalidPrecision(format!(
                "{bits} bits cannot carry {target_digits}+{guard_digits} decimal digits (need {needed})"
            )));
        }
        Ok(Self {
            bits,
            target_digits,
            guard_digits,
        })
    }

    /// Context with a fixed binary precision; target digits are what the bits
    /// can carry after the default guard.
    pub fn from_bits(bits: u32) -> Self {
        let bits = bits.max(MIN_BITS);
        let carried = (bits as f64 / LOG2_10).floor() as u32;
        Self {
            bits,
            target_digits: carried.saturating_sub(DEFAULT_GUARD_DIGITS),
            guard_digits: DEFAULT_GUARD_DIGITS,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn target_digits(&self) -> u32 {
        self.target_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    /// Same target with the guard doubled, used when a closed form is known to
    /// cancel.
    pub fn doubled_guard(&self) -> Self {
        let mut ctx = Self::with_guard(self.target_digits, self.guard_digits * 2);
        ctx.bits = ctx.bits.max(self.bits);
        ctx
    }

    /// Same target, `extra` more bits of working precision.
    pub fn with_extra_bits(&self, extra: u32) -> Self {
        Self {
            bits: self.bits + extra,
            ..*self
        }
    }

    /// Same guard, different target.
    pub fn with_target(&self, target_digits: u32) -> Self {
        Self::with_guard(target_digits, self.guard_digits)
    }

    /// 10^(-target_digits) as an f64, handy for coarse tolerances.
    pub fn target_epsilon_f64(&self) -> f64 {
        10f64.powi(-(self.target_digits as i32))
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(50)
    }
}
