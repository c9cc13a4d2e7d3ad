//! Double-double arithmetic (~31 significant digits).
//!
//! The closed-form heat kernels are sums of monomials in `r`, `t^{-1/2}`,
//! `cosh r` and `1/sinh r` that cancel each other to many orders near the
//! diagonal: for H^7 the monomial sum at r = 1e-2 loses ~9 decimal digits,
//! for H^9 ~13. Plain f64 evaluation there cannot meet a 1e-7 relative
//! tolerance, so monomial sums (and the shifted-contour integrands) are
//! evaluated in double-double precision whenever r < 1.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Unevaluated sum `hi + lo` of two non-overlapping f64 values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// pi to double-double precision.
    pub const PI: Dd = Dd {
        hi: 3.141592653589793,
        lo: 1.2246467991473532e-16,
    };
    /// ln(2) to double-double precision.
    const LN2: Dd = Dd {
        hi: 0.6931471805599453,
        lo: 2.3190468138462996e-17,
    };

    #[inline]
    pub fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }

    /// Integer power by binary exponentiation; negative exponents invert.
    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        // One Newton step on the f64 estimate doubles its precision.
        let x = self.hi.sqrt();
        let x_dd = Dd::from(x);
        let r = (self - x_dd * x_dd) / Dd::from(2.0 * x);
        x_dd + r
    }

    /// exp(x) via argument reduction x = k ln2 + m, |m| <= ln2/2, Taylor on m.
    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from(f64::INFINITY);
        }
        if self.hi < -709.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let m = self - Dd::LN2 * Dd::from(k);
        // Taylor series of exp on |m| <= 0.35: terms fall below 1e-33 by n=26.
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..=26 {
            term = term * m / Dd::from(n as f64);
            sum = sum + term;
        }
        let scale = f64::powi(2.0, k as i32);
        Dd {
            hi: sum.hi * scale,
            lo: sum.lo * scale,
        }
    }

    pub fn sinh(self) -> Dd {
        let a = self.abs();
        let s = if a.hi < 0.1 {
            // Taylor: avoids the e^x - e^-x cancellation near zero.
            let x2 = a * a;
            let mut term = a;
            let mut sum = a;
            for n in 1..=9 {
                let d = (2 * n) as f64 * (2 * n + 1) as f64;
                term = term * x2 / Dd::from(d);
                sum = sum + term;
            }
            sum
        } else {
            let e = a.exp();
            (e - e.recip()) * Dd::from(0.5)
        };
        if self.hi < 0.0 {
            -s
        } else {
            s
        }
    }

    pub fn cosh(self) -> Dd {
        let e = self.abs().exp();
        (e + e.recip()) * Dd::from(0.5)
    }

    /// sin(x), accurate for |x| <= ~1.6 (Taylor only; callers gate the range).
    pub fn sin_small(self) -> Dd {
        let x2 = self * self;
        let mut term = self;
        let mut sum = self;
        for n in 1..=12 {
            let d = (2 * n) as f64 * (2 * n + 1) as f64;
            term = -term * x2 / Dd::from(d);
            sum = sum + term;
        }
        sum
    }

    /// cos(x), accurate for |x| <= ~1.6 (Taylor only; callers gate the range).
    pub fn cos_small(self) -> Dd {
        let x2 = self * self;
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..=12 {
            let d = (2 * n - 1) as f64 * (2 * n) as f64;
            term = -term * x2 / Dd::from(d);
            sum = sum + term;
        }
        sum
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from(q2);
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd::new(hi, lo + q3)
    }
}

/// Complex number with double-double components.
#[derive(Debug, Clone, Copy)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ONE: CDd = CDd {
        re: Dd { hi: 1.0, lo: 0.0 },
        im: Dd { hi: 0.0, lo: 0.0 },
    };

    pub fn new(re: Dd, im: Dd) -> CDd {
        CDd { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> CDd {
        CDd {
            re: Dd::from(re),
            im: Dd::from(im),
        }
    }
}

impl Add for CDd {
    type Output = CDd;
    #[inline]
    fn add(self, rhs: CDd) -> CDd {
        CDd {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Mul for CDd {
    type Output = CDd;
    #[inline]
    fn mul(self, rhs: CDd) -> CDd {
        CDd {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Mul<Dd> for CDd {
    type Output = CDd;
    #[inline]
    fn mul(self, rhs: Dd) -> CDd {
        CDd {
            re: self.re * rhs,
            im: self.im * rhs,
        }
    }
}
