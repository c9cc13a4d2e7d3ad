//! Signed log-domain values.
//!
//! Kernel magnitudes like e^{-r^2/4t - nr/2} underflow f64 long before the
//! mathematically interesting range ends, so every kernel evaluator reports
//! a (log-magnitude, sign) pair alongside the raw value.

use serde::{Deserialize, Serialize};

/// A real number represented as sign * exp(log_magnitude).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    /// Natural log of the absolute value; -inf when the value is zero.
    pub log_magnitude: f64,
    /// +1, -1, or 0 (iff the value is exactly zero).
    pub sign: i8,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn new(log_magnitude: f64, sign: i8) -> LogValue {
        debug_assert!(sign == 1 || sign == -1 || sign == 0);
        if sign == 0 {
            LogValue::ZERO
        } else {
            LogValue {
                log_magnitude,
                sign,
            }
        }
    }

    /// Exact representation of a finite f64 (loses nothing for magnitudes
    /// within f64 range; that is the only case we construct from).
    pub fn from_value(v: f64) -> LogValue {
        if v == 0.0 {
            LogValue::ZERO
        } else {
            LogValue {
                log_magnitude: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    /// sign * exp(log_magnitude); may underflow to 0 or overflow to inf.
    pub fn value(&self) -> f64 {
        self.sign as f64 * self.log_magnitude.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn abs(&self) -> LogValue {
        LogValue {
            log_magnitude: self.log_magnitude,
            sign: if self.sign == 0 { 0 } else { 1 },
        }
    }

    /// Multiply by exp(shift) in the log domain.
    pub fn scale_log(&self, shift: f64) -> LogValue {
        if self.sign == 0 {
            LogValue::ZERO
        } else {
            LogValue {
                log_magnitude: self.log_magnitude + shift,
                sign: self.sign,
            }
        }
    }

    pub fn mul(&self, other: &LogValue) -> LogValue {
        let sign = self.sign * other.sign;
        if sign == 0 {
            LogValue::ZERO
        } else {
            LogValue {
                log_magnitude: self.log_magnitude + other.log_magnitude,
                sign,
            }
        }
    }

    /// log(self / other); both must be nonzero.
    pub fn log_ratio(&self, other: &LogValue) -> f64 {
        debug_assert!(self.sign != 0 && other.sign != 0);
        self.log_magnitude - other.log_magnitude
    }
}
