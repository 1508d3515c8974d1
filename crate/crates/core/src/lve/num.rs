use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign};

use num_bigint::BigUint;
use num_traits::{Float, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Nonnegative real `m * 2^e` with an `f64` mantissa and an unbounded exponent.
///
/// Rescaling only ever multiplies the mantissa by powers of two, so results are
/// bit-identical to plain `f64` arithmetic whenever that does not overflow.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Ext {
    m: f64,
    e: i64,
}

const HI: f64 = 1.157920892373162e77; // 2^256
const LO: f64 = 8.636168555094445e-78; // 2^-256

fn pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

impl Ext {
    pub const ZERO: Ext = Ext { m: 0.0, e: 0 };
    pub const ONE: Ext = Ext { m: 1.0, e: 0 };

    pub fn new(v: f64) -> Self {
        Ext { m: v, e: 0 }.norm()
    }

    fn norm(self) -> Self {
        let a = self.m.abs();
        if self.m == 0.0 || !a.is_finite() {
            return Ext { m: self.m, e: if self.m == 0.0 { 0 } else { self.e } };
        }
        if (LO..=HI).contains(&a) {
            return self;
        }
        let (_, exp, _) = self.m.integer_decode();
        let k = exp as i64 + 52;
        Ext { m: self.m * pow2(-k), e: self.e + k }
    }

    fn unit(self) -> Self {
        let (_, exp, _) = self.m.integer_decode();
        let k = exp as i64 + 53;
        Ext { m: self.m * pow2(-k), e: self.e + k }
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0.0
    }

    /// Nearest `f64`; infinite or zero when out of range.
    pub fn to_f64(self) -> f64 {
        if self.m == 0.0 {
            return 0.0;
        }
        let mut m = self.m;
        let mut e = self.e;
        while e > 0 {
            let s = e.min(1000);
            m *= pow2(s);
            e -= s;
            if m.is_infinite() {
                return m;
            }
        }
        while e < 0 {
            let s = (-e).min(1000);
            m *= pow2(-s);
            e += s;
            if m == 0.0 {
                return 0.0;
            }
        }
        m
    }

    pub fn ln(self) -> f64 {
        self.m.ln() + self.e as f64 * std::f64::consts::LN_2
    }

    pub fn log10(self) -> f64 {
        self.m.log10() + self.e as f64 * std::f64::consts::LOG10_2
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        let bits = n.bits();
        if bits <= 1000 {
            return Ext::new(n.to_f64().unwrap());
        }
        let shift = bits - 64;
        Ext { m: (n >> shift).to_f64().unwrap(), e: shift as i64 }.norm()
    }

    pub fn powu(self, mut k: u64) -> Self {
        let mut base = self;
        let mut acc = Ext::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            k >>= 1;
            if k > 0 {
                base *= base;
            }
        }
        acc
    }

    /// `self^k`; zero to the zeroth power is one.
    pub fn pow_big(self, k: &BigUint) -> Self {
        if let Some(k) = k.to_u64() {
            return self.powu(k);
        }
        if self.m == 0.0 {
            return Ext::ZERO;
        }
        // too large to square out; go through log2
        let l = (self.m.log2() + self.e as f64) * k.to_f64().unwrap_or(f64::INFINITY);
        if !l.is_finite() || l.abs() > 9e18 {
            return if l > 0.0 { Ext { m: f64::INFINITY, e: 0 } } else { Ext::ZERO };
        }
        let whole = l.floor();
        Ext { m: (l - whole).exp2(), e: whole as i64 }
    }
}

impl From<f64> for Ext {
    fn from(v: f64) -> Self {
        Ext::new(v)
    }
}

impl Mul for Ext {
    type Output = Ext;
    fn mul(self, o: Ext) -> Ext {
        Ext { m: self.m * o.m, e: self.e + o.e }.norm()
    }
}

impl MulAssign for Ext {
    fn mul_assign(&mut self, o: Ext) {
        *self = *self * o;
    }
}

impl Add for Ext {
    type Output = Ext;
    fn add(self, o: Ext) -> Ext {
        if self.m == 0.0 {
            return o;
        }
        if o.m == 0.0 {
            return self;
        }
        let (hi, lo) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = hi.e - lo.e;
        if d > 1022 {
            return hi;
        }
        // scaling by a power of two keeps the sum identical to f64 addition
        if d <= 512 {
            return Ext { m: hi.m * pow2(d) + lo.m, e: lo.e }.norm();
        }
        Ext { m: hi.m + lo.m * pow2(-d), e: hi.e }.norm()
    }
}

impl AddAssign for Ext {
    fn add_assign(&mut self, o: Ext) {
        *self = *self + o;
    }
}

impl std::iter::Sum for Ext {
    fn sum<I: Iterator<Item = Ext>>(iter: I) -> Ext {
        iter.fold(Ext::ZERO, |a, b| a + b)
    }
}

impl std::iter::Product for Ext {
    fn product<I: Iterator<Item = Ext>>(iter: I) -> Ext {
        iter.fold(Ext::ONE, |a, b| a * b)
    }
}

impl PartialEq for Ext {
    fn eq(&self, o: &Self) -> bool {
        self.partial_cmp(o) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        if self.m.is_zero() || o.m.is_zero() || !self.m.is_finite() || !o.m.is_finite() {
            return self.m.partial_cmp(&o.m);
        }
        // mantissas in [0.5, 1) make the exponent decide first
        let (a, b) = (self.unit(), o.unit());
        Some(a.e.cmp(&b.e).then(a.m.partial_cmp(&b.m)?))
    }
}

impl fmt::Display for Ext {
    /// Scientific notation that stays finite past the `f64` range.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_f64();
        if v.is_finite() && (v == 0.0 || v.abs() >= 1e-300) {
            return write!(f, "{v:e}");
        }
        if !self.m.is_finite() {
            return write!(f, "{}", self.m);
        }
        let l = self.log10();
        let exp = l.floor();
        write!(f, "{}e{}", 10f64.powf(l - exp), exp as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_where_f64_is() {
        assert_eq!(Ext::new(4.0).powu(6).to_f64(), 4096.0);
        assert_eq!((Ext::new(0.1) * Ext::new(3.0)).to_f64(), 0.1 * 3.0);
        assert_eq!((Ext::new(0.1) + Ext::new(0.2)).to_f64(), 0.1 + 0.2);
        assert_eq!(Ext::new(2.5).pow_big(&BigUint::from(3u32)).to_f64(), 15.625);
    }

    #[test]
    fn survives_overflow() {
        let big = Ext::new(3.0).powu(992);
        assert!(big.to_f64().is_infinite());
        assert!((big.log10() - 992.0 * 3f64.log10()).abs() < 1e-9);
        let back = big * Ext::new(3.0).powu(990);
        assert!((back.ln() - 1982.0 * 3f64.ln()).abs() < 1e-9);
        assert_eq!(big.to_string().split('e').nth(1), Some("473"));
    }

    #[test]
    fn sums_far_apart() {
        let a = Ext::new(2.0).powu(2000);
        assert_eq!(a + Ext::ONE, a);
        let b = Ext::new(2.0).powu(700);
        assert!(((a + b).log10() - a.log10()).abs() < 1e-12);
        assert_eq!((Ext::ZERO + b).log10(), b.log10());
    }

    #[test]
    fn from_big_integers() {
        let n = BigUint::from(3u32).pow(1000);
        assert!((Ext::from_biguint(&n).log10() - 1000.0 * 3f64.log10()).abs() < 1e-9);
        assert_eq!(Ext::from_biguint(&BigUint::from(12345u32)).to_f64(), 12345.0);
    }
}
