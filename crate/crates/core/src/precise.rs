//! Certified fixed-point enclosures of real constants.
//!
//! A [`Dyadic`] is a closed interval `[lo, hi] * 2^-bits` with big-integer
//! endpoints. Every constructor guarantees the true value lies inside.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A certified floating-point enclosure `lo <= value <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    pub fn exact(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    /// Widen a rounded-to-nearest value by `ulps` units in the last place on each side.
    pub fn around(v: f64, ulps: u32) -> Self {
        let (mut lo, mut hi) = (v, v);
        for _ in 0..ulps {
            lo = lo.next_down();
            hi = hi.next_up();
        }
        Self { lo, hi }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// `Some(true)` if certainly below `other`, `Some(false)` if certainly
    /// at or above, `None` if the two enclosures overlap.
    pub fn certainly_below(&self, other: &Enclosure) -> Option<bool> {
        if self.hi < other.lo {
            Some(true)
        } else if self.lo >= other.hi {
            Some(false)
        } else {
            None
        }
    }
}

/// Round `n / 2^bits` to an f64 enclosure.
pub fn ratio_enclosure(n: &BigInt, bits: u32) -> Enclosure {
    if n.is_zero() {
        return Enclosure::exact(0.0);
    }
    let approx = dyadic_to_f64(n, bits);
    // truncation to 64 significant bits plus one rounding: well under 2 ulp
    Enclosure::around(approx, 2)
}

fn dyadic_to_f64(n: &BigInt, bits: u32) -> f64 {
    let neg = n.sign() == Sign::Minus;
    let mag = n.magnitude();
    let len = mag.bits();
    let (top, shift) = if len > 64 {
        let s = len - 64;
        ((mag >> s).to_u64().unwrap(), s as i64)
    } else {
        (mag.to_u64().unwrap(), 0)
    };
    let v = top as f64 * 2f64.powi((shift - bits as i64) as i32);
    if neg {
        -v
    } else {
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dyadic {
    pub lo: BigInt,
    pub hi: BigInt,
    pub bits: u32,
}

impl Dyadic {
    pub fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    pub fn width_ulps(&self) -> BigInt {
        &self.hi - &self.lo
    }

    /// Enclosure of `(P + sqrt(D)) / Q` for Q > 0 and D >= 0.
    pub fn quadratic(p: i128, d: u64, q: i128, bits: u32) -> Self {
        assert!(q > 0, "quadratic denominator must be positive");
        let scale = BigInt::one() << (2 * bits);
        let s = (BigInt::from(d) * scale).sqrt(); // floor(sqrt(D) * 2^bits)
        let exact = &s * &s == BigInt::from(d) << (2 * bits);
        let pb = BigInt::from(p) << bits;
        let qb = BigInt::from(q);
        let lo_num = &pb + &s;
        let hi_num = &pb + &s + if exact { BigInt::zero() } else { BigInt::one() };
        let lo = lo_num.div_floor(&qb);
        let hi = ceil_div(&hi_num, &qb);
        Self { lo, hi, bits }
    }

    pub fn rational(num: i64, den: u64, bits: u32) -> Self {
        let n = BigInt::from(num) << bits;
        let d = BigInt::from(den);
        Self {
            lo: n.div_floor(&d),
            hi: ceil_div(&n, &d),
            bits,
        }
    }

    /// π by Machin's formula, 16 atan(1/5) - 4 atan(1/239), with a
    /// rigorous bound on the accumulated truncation error.
    pub fn pi(bits: u32) -> Self {
        let work = bits + 64;
        let (a5, e5) = atan_inv(5, work);
        let (a239, e239) = atan_inv(239, work);
        let approx = BigInt::from(16) * a5 - BigInt::from(4) * a239;
        let err = BigInt::from(16u64 * e5 + 4 * e239);
        Self::from_work(approx, err, work, bits)
    }

    /// e = sum 1/k!.
    pub fn e(bits: u32) -> Self {
        let work = bits + 64;
        let mut term = BigInt::one() << work;
        let mut sum = BigInt::zero();
        let mut k = 0u64;
        while !term.is_zero() {
            sum += &term;
            k += 1;
            term /= k;
        }
        // each term is off by < 2 ulp; the discarded tail is < 4 ulp
        let err = BigInt::from(2 * (k + 1) + 4);
        Self::from_work(sum, err, work, bits)
    }

    fn from_work(approx: BigInt, err: BigInt, work: u32, bits: u32) -> Self {
        let shift = work - bits;
        let lo = (&approx - &err) >> shift; // arithmetic shift floors
        let hi = ceil_shift(&(&approx + &err), shift);
        Self { lo, hi, bits }
    }

    pub fn lo_enclosure(&self) -> Enclosure {
        ratio_enclosure(&self.lo, self.bits)
    }

    pub fn enclosure(&self) -> Enclosure {
        Enclosure {
            lo: ratio_enclosure(&self.lo, self.bits).lo,
            hi: ratio_enclosure(&self.hi, self.bits).hi,
        }
    }

    /// `Some(floor)` when both endpoints share an integer part.
    pub fn floor(&self) -> Option<BigInt> {
        let a = &self.lo >> self.bits;
        let b = &self.hi >> self.bits;
        (a == b).then_some(a)
    }

    pub fn scale(&self, q: &BigInt) -> Self {
        if q.is_negative() {
            Self {
                lo: &self.hi * q,
                hi: &self.lo * q,
                bits: self.bits,
            }
        } else {
            Self {
                lo: &self.lo * q,
                hi: &self.hi * q,
                bits: self.bits,
            }
        }
    }

    pub fn sub_int(&self, k: &BigInt) -> Self {
        let shifted = k << self.bits;
        Self {
            lo: &self.lo - &shifted,
            hi: &self.hi - &shifted,
            bits: self.bits,
        }
    }

    /// Enclosure of the distance to the nearest integer.
    pub fn dist_nearest_int(&self) -> Enclosure {
        let one = self.one();
        let half = &one >> 1;
        let fl = &self.lo >> self.bits;
        let fh = &self.hi >> self.bits;
        let dist = |t: &BigInt| -> BigInt {
            // t in [0, one)
            if t <= &half {
                t.clone()
            } else {
                &one - t
            }
        };
        let (lo, hi) = if fl == fh {
            let tl = &self.lo - (&fl << self.bits);
            let th = &self.hi - (&fl << self.bits);
            let dl = dist(&tl);
            let dh = dist(&th);
            let lo = dl.clone().min(dh.clone());
            let hi = if tl <= half && half <= th {
                half.clone()
            } else {
                dl.max(dh)
            };
            (lo, hi)
        } else if &fh - &fl == BigInt::one() {
            let tl = &self.lo - (&fl << self.bits);
            let th = &self.hi - (&fh << self.bits);
            let hi = (&one - tl).max(th).min(half.clone());
            (BigInt::zero(), hi)
        } else {
            (BigInt::zero(), half.clone())
        };
        Enclosure {
            lo: ratio_enclosure(&lo, self.bits).lo.max(0.0),
            hi: ratio_enclosure(&hi, self.bits).hi.min(0.5),
        }
    }
}

fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_mod_floor(d);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

fn ceil_shift(n: &BigInt, s: u32) -> BigInt {
    let f = n >> s;
    if (&f << s) == *n {
        f
    } else {
        f + 1
    }
}

/// atan(1/x) * 2^work, with an upper bound on the error in ulps.
fn atan_inv(x: u64, work: u32) -> (BigInt, u64) {
    let x2 = BigInt::from(x * x);
    let mut power = (BigInt::one() << work) / x;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    // `power` stays within 2 ulp of x^-(2k+1), so each term is within 3 ulp;
    // the alternating tail is below the first dropped term (< 1 ulp)
    (sum, 3 * k + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let p = Dyadic::pi(256);
        let e = p.enclosure();
        assert!(e.contains(std::f64::consts::PI));
        assert!(p.width_ulps() <= BigInt::from(2));
        // 3.14159265358979323846264338327950288419716939937510...
        let digits = BigInt::parse_bytes(b"314159265358979323846264338327950288419716939937510", 10).unwrap();
        let ten50 = BigInt::from(10).pow(50);
        let lo = (&p.lo * &ten50) >> 256u32;
        assert!(lo == digits || lo + 1 == digits);
    }

    #[test]
    fn e_digits() {
        let e = Dyadic::e(256);
        assert!(e.enclosure().contains(std::f64::consts::E));
        let digits = BigInt::parse_bytes(b"271828182845904523536028747135266249775724709369995", 10).unwrap();
        let ten50 = BigInt::from(10).pow(50);
        let lo = (&e.lo * &ten50) >> 256u32;
        assert!(lo == digits || lo + 1 == digits);
    }

    #[test]
    fn sqrt2_enclosure() {
        let s = Dyadic::quadratic(0, 2, 1, 128);
        let sq_lo = &s.lo * &s.lo;
        let sq_hi = &s.hi * &s.hi;
        let two = BigInt::from(2) << 256u32;
        assert!(sq_lo < two && two < sq_hi);
        assert_eq!(s.width_ulps(), BigInt::one());
    }

    #[test]
    fn dist_of_exact_integer_multiple() {
        let third = Dyadic::rational(1, 3, 64);
        let three = third.scale(&BigInt::from(3));
        let d = three.dist_nearest_int();
        assert_eq!(d.lo, 0.0);
        assert!(d.hi < 1e-18);
    }
}
