//! Rigorous handling of the angle θ: continued fractions, distance to the
//! nearest integer, the Diophantine lower-bound check, the set of
//! near-resonant shifts, and the reduction θ = k/r + θ'.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precise::{ratio_enclosure, Dyadic, Enclosure};

pub const DEFAULT_BITS: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedConstant {
    Pi,
    E,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThetaKind {
    /// (p + sqrt(d)) / q with q > 0 and d not a perfect square.
    Quadratic { p: i128, d: u64, q: i128 },
    Constant(NamedConstant),
    /// num / den in lowest terms, den > 0.
    Rational { num: i64, den: u64 },
}

/// An angle θ. Every use goes through θ mod 1, but the unreduced value is
/// kept for continued fractions.
#[derive(Debug, Clone)]
pub struct Theta {
    kind: ThetaKind,
    bits: u32,
    value: Dyadic,
    frac: Dyadic,
    int_part: BigInt,
    /// floor(frac(θ) * 2^128); used for fast phase reduction of nθ.
    fixed: u128,
}

impl Theta {
    pub fn new(kind: ThetaKind, bits: u32) -> Result<Self> {
        if bits < 64 {
            return Err(Error::InvalidArgument(format!(
                "precision of {bits} bits is below the 64-bit minimum"
            )));
        }
        let kind = match kind {
            ThetaKind::Quadratic { p, d, q } => {
                if q <= 0 {
                    return Err(Error::InvalidArgument("quadratic denominator must be positive".into()));
                }
                let s = d.sqrt();
                if s * s == d {
                    return Err(Error::InvalidArgument(format!("{d} is a perfect square")));
                }
                ThetaKind::Quadratic { p, d, q }
            }
            ThetaKind::Rational { num, den } => {
                if den == 0 {
                    return Err(Error::InvalidArgument("zero denominator".into()));
                }
                let g = num.unsigned_abs().gcd(&den).max(1);
                ThetaKind::Rational {
                    num: num / g as i64,
                    den: den / g,
                }
            }
            k => k,
        };
        let value = match &kind {
            ThetaKind::Quadratic { p, d, q } => Dyadic::quadratic(*p, *d, *q, bits),
            ThetaKind::Constant(NamedConstant::Pi) => Dyadic::pi(bits),
            ThetaKind::Constant(NamedConstant::E) => Dyadic::e(bits),
            ThetaKind::Rational { num, den } => Dyadic::rational(*num, *den, bits),
        };
        let int_part = match &kind {
            ThetaKind::Rational { num, den } => BigInt::from(num.div_euclid(*den as i64)),
            _ => value.floor().ok_or_else(|| {
                Error::PrecisionExhausted("integer part of theta not certified".into())
            })?,
        };
        let frac = value.sub_int(&int_part);
        let fixed = match &kind {
            ThetaKind::Rational { num, den } => {
                let a = num.rem_euclid(*den as i64) as u128;
                // floor(a/den * 2^128) by long division
                fixed_point_ratio(a, *den as u128)
            }
            _ => {
                let shifted = if bits >= 128 {
                    &frac.lo >> (bits - 128)
                } else {
                    &frac.lo << (128 - bits)
                };
                shifted.to_u128().unwrap_or(u128::MAX)
            }
        };
        Ok(Self {
            kind,
            bits,
            value,
            frac,
            int_part,
            fixed,
        })
    }

    pub fn sqrt(d: u64) -> Result<Self> {
        Self::new(ThetaKind::Quadratic { p: 0, d, q: 1 }, DEFAULT_BITS)
    }

    pub fn rational(num: i64, den: u64) -> Result<Self> {
        Self::new(ThetaKind::Rational { num, den }, DEFAULT_BITS)
    }

    pub fn pi() -> Self {
        Self::new(ThetaKind::Constant(NamedConstant::Pi), DEFAULT_BITS).expect("pi")
    }

    pub fn e() -> Self {
        Self::new(ThetaKind::Constant(NamedConstant::E), DEFAULT_BITS).expect("e")
    }

    /// √2 - 1, the default working angle (same as √2 modulo 1).
    pub fn sqrt2_minus_1() -> Self {
        Self::new(ThetaKind::Quadratic { p: -1, d: 2, q: 1 }, DEFAULT_BITS).expect("sqrt2")
    }

    /// (√5 - 1)/2.
    pub fn golden_minus_1() -> Self {
        Self::new(ThetaKind::Quadratic { p: -1, d: 5, q: 2 }, DEFAULT_BITS).expect("golden")
    }

    /// Parse `sqrt:D`, `quad:P,D,Q`, `const:pi`, `const:e` or `rat:a/q`.
    pub fn parse(spec: &str, bits: u32) -> Result<Self> {
        let bad = || Error::ThetaSpec(spec.to_string());
        let (tag, body) = spec.split_once(':').ok_or_else(bad)?;
        let kind = match tag.trim() {
            "sqrt" => ThetaKind::Quadratic {
                p: 0,
                d: body.trim().parse().map_err(|_| bad())?,
                q: 1,
            },
            "quad" => {
                let parts: Vec<&str> = body.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(bad());
                }
                ThetaKind::Quadratic {
                    p: parts[0].parse().map_err(|_| bad())?,
                    d: parts[1].parse().map_err(|_| bad())?,
                    q: parts[2].parse().map_err(|_| bad())?,
                }
            }
            "const" => match body.trim() {
                "pi" => ThetaKind::Constant(NamedConstant::Pi),
                "e" => ThetaKind::Constant(NamedConstant::E),
                _ => return Err(bad()),
            },
            "rat" => {
                let (a, q) = body.split_once('/').ok_or_else(bad)?;
                ThetaKind::Rational {
                    num: a.trim().parse().map_err(|_| bad())?,
                    den: q.trim().parse().map_err(|_| bad())?,
                }
            }
            _ => return Err(bad()),
        };
        Self::new(kind, bits)
    }

    pub fn kind(&self) -> &ThetaKind {
        &self.kind
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// ⌊θ⌋.
    pub fn integer_part(&self) -> &BigInt {
        &self.int_part
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.kind, ThetaKind::Rational { .. })
    }

    /// θ mod 1 as f64 (rounded).
    pub fn reduced(&self) -> f64 {
        match self.kind {
            ThetaKind::Rational { num, den } => num.rem_euclid(den as i64) as f64 / den as f64,
            _ => self.frac.enclosure().mid(),
        }
    }

    /// Certified enclosure of the unreduced value.
    pub fn enclosure(&self) -> Enclosure {
        self.value.enclosure()
    }

    pub fn reduced_dyadic(&self) -> &Dyadic {
        &self.frac
    }

    /// nθ mod 1 in [0, 1), reduced with 128 fractional bits before rounding
    /// to f64, so the error does not grow with n the way a float product would.
    #[inline]
    pub fn phase(&self, n: i64) -> f64 {
        if let ThetaKind::Rational { num, den } = self.kind {
            let a = num.rem_euclid(den as i64) as i128;
            let t = (n as i128 * a).rem_euclid(den as i128);
            return t as f64 / den as f64;
        }
        let v = (n as i128 as u128).wrapping_mul(self.fixed);
        (v >> 64) as u64 as f64 * (1.0 / 18446744073709551616.0)
    }

    /// Enclosure of ‖qθ‖ with width at most q * 2^-bits.
    pub fn dist_nearest_int(&self, q: i64) -> Enclosure {
        if q == 0 {
            return Enclosure::exact(0.0);
        }
        if let ThetaKind::Rational { num, den } = self.kind {
            let t = (q as i128 * num as i128).rem_euclid(den as i128) as u128;
            let d = t.min(den as u128 - t);
            if d == 0 {
                return Enclosure::exact(0.0);
            }
            return Enclosure::around(d as f64 / den as f64, 1);
        }
        self.frac.scale(&BigInt::from(q)).dist_nearest_int()
    }

    /// ‖qθ‖ by the 128-bit fixed-point route (independent of the big-integer path).
    pub fn dist_nearest_int_fast(&self, q: i64) -> f64 {
        let p = self.phase(q);
        p.min(1.0 - p)
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ThetaKind::Quadratic { p: 0, d, q: 1 } => write!(f, "sqrt:{d}"),
            ThetaKind::Quadratic { p, d, q } => write!(f, "quad:{p},{d},{q}"),
            ThetaKind::Constant(NamedConstant::Pi) => write!(f, "const:pi"),
            ThetaKind::Constant(NamedConstant::E) => write!(f, "const:e"),
            ThetaKind::Rational { num, den } => write!(f, "rat:{num}/{den}"),
        }
    }
}

fn fixed_point_ratio(a: u128, den: u128) -> u128 {
    // floor(a * 2^128 / den) for a < den, one bit at a time
    let mut rem = a;
    let mut out = 0u128;
    for _ in 0..128 {
        out <<= 1;
        // rem < den <= 2^64, so 2*rem fits
        rem <<= 1;
        if rem >= den {
            rem -= den;
            out |= 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    pub quotients: Vec<i128>,
    /// Convergents p_i / q_i.
    pub convergents: Vec<(i128, i128)>,
    /// True when the expansion ended because θ is rational.
    pub terminated: bool,
}

/// Partial quotients [a0; a1, a2, ...] of the unreduced θ and its convergents.
pub fn continued_fraction(theta: &Theta, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let (quotients, terminated) = match theta.kind {
        ThetaKind::Quadratic { p, d, q } => (quadratic_cf(p, d, q, depth)?, false),
        ThetaKind::Rational { num, den } => {
            let mut out = Vec::new();
            let (mut n, mut m) = (num as i128, den as i128);
            while m != 0 && out.len() < depth {
                let a = n.div_euclid(m);
                out.push(a);
                let rem = n - a * m;
                n = m;
                m = rem;
            }
            let done = m == 0;
            (out, done)
        }
        ThetaKind::Constant(_) => interval_cf(&theta.value, depth)?,
    };
    let mut convergents = Vec::with_capacity(quotients.len());
    let (mut p_prev, mut q_prev) = (1i128, 0i128);
    let (mut p, mut q) = (quotients[0], 1i128);
    convergents.push((p, q));
    for &a in &quotients[1..] {
        let overflow = || Error::InvalidArgument("convergent overflows 128 bits".into());
        let p_next = a.checked_mul(p).and_then(|v| v.checked_add(p_prev)).ok_or_else(overflow)?;
        let q_next = a.checked_mul(q).and_then(|v| v.checked_add(q_prev)).ok_or_else(overflow)?;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        convergents.push((p, q));
    }
    Ok(ContinuedFraction {
        quotients,
        convergents,
        terminated,
    })
}

fn quadratic_cf(p0: i128, d0: u64, q0: i128, depth: usize) -> Result<Vec<i128>> {
    let (mut p, mut d, mut q) = (p0, d0 as i128, q0);
    if (d - p * p) % q != 0 {
        // scale so that q | d - p^2
        let aq = q.abs();
        p *= aq;
        d = d.checked_mul(q * q).ok_or_else(|| Error::InvalidArgument("quadratic too large".into()))?;
        q *= aq;
    }
    let s = (d as u128).sqrt() as i128;
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        let a = if q > 0 {
            (p + s).div_euclid(q)
        } else {
            -(p + s).div_euclid(-q) - 1
        };
        out.push(a);
        p = a * q - p;
        q = (d - p * p) / q;
    }
    Ok(out)
}

fn interval_cf(value: &Dyadic, depth: usize) -> Result<(Vec<i128>, bool)> {
    // endpoints as fractions n/m
    let one = value.one();
    let (mut ln, mut lm) = (value.lo.clone(), one.clone());
    let (mut hn, mut hm) = (value.hi.clone(), one);
    let mut out = Vec::new();
    while out.len() < depth {
        let a = ln.div_floor(&lm);
        let b = hn.div_floor(&hm);
        if a != b {
            return Err(Error::PrecisionExhausted(format!(
                "enclosure certifies only {} partial quotients",
                out.len()
            )));
        }
        out.push(a.to_i128().ok_or_else(|| Error::InvalidArgument("quotient overflow".into()))?);
        let lr = &ln - &a * &lm;
        let hr = &hn - &a * &hm;
        if lr.is_zero() || hr.is_zero() {
            return Err(Error::PrecisionExhausted(format!(
                "enclosure certifies only {} partial quotients",
                out.len()
            )));
        }
        // x -> 1/(x - a) reverses the order of the endpoints
        let (nln, nlm) = (hm.clone(), hr);
        let (nhn, nhm) = (lm.clone(), lr);
        ln = nln;
        lm = nlm;
        hn = nhn;
        hm = nhm;
    }
    Ok((out, false))
}

/// Decreasing comparison function Υ for the Diophantine lower bound
/// ‖qθ‖ >= Υ(q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Upsilon {
    /// C exp(-q^c).
    ExpPower { c: f64 },
    /// C / q^2 (badly approximable θ).
    InverseSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiophantineProfile {
    pub upsilon: Upsilon,
    pub constant: f64,
}

impl DiophantineProfile {
    /// The default profile C exp(-q^{1/4}).
    pub fn quarter_power(constant: f64) -> Self {
        Self {
            upsilon: Upsilon::ExpPower { c: 0.25 },
            constant,
        }
    }

    pub fn eval(&self, q: f64) -> f64 {
        let shape = match self.upsilon {
            Upsilon::ExpPower { c } => (-q.powf(c)).exp(),
            Upsilon::InverseSquare => 1.0 / (q * q),
        };
        self.constant * shape
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    /// Some comparison could not be decided at the working precision.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub verdict: Verdict,
    pub constant: f64,
    pub q_max: u64,
    /// First q with ‖qθ‖ < C exp(-q^{1/4}).
    pub first_failure: Option<u64>,
    pub indeterminate: Vec<u64>,
    /// The q minimizing ‖qθ‖ / exp(-q^{1/4}), and that ratio.
    pub worst_q: u64,
    pub worst_ratio: f64,
}

/// Check ‖qθ‖ >= C exp(-q^{1/4}) for 1 <= q <= Q.
pub fn check_condition(theta: &Theta, constant: f64, q_max: u64) -> Result<ConditionReport> {
    if q_max < 1 {
        return Err(Error::InvalidArgument("Q must be at least 1".into()));
    }
    if !(constant > 0.0) {
        return Err(Error::InvalidArgument("C must be positive".into()));
    }
    let rows: Vec<(u64, Enclosure, Enclosure)> = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let dist = theta.dist_nearest_int(q as i64);
            let shape = (-(q as f64).powf(0.25)).exp();
            // exp/powf are not correctly rounded; 8 ulp covers both
            (q, dist, Enclosure::around(shape, 8))
        })
        .collect();
    let mut first_failure = None;
    let mut indeterminate = Vec::new();
    let (mut worst_q, mut worst_ratio) = (1u64, f64::INFINITY);
    for (q, dist, shape) in rows {
        let threshold = Enclosure {
            lo: constant * shape.lo * (1.0 - 1e-15),
            hi: constant * shape.hi * (1.0 + 1e-15),
        };
        match dist.certainly_below(&threshold) {
            Some(true) => {
                first_failure.get_or_insert(q);
            }
            Some(false) => {}
            None => indeterminate.push(q),
        }
        let ratio = dist.mid() / shape.mid();
        if ratio < worst_ratio {
            worst_ratio = ratio;
            worst_q = q;
        }
    }
    let verdict = if first_failure.is_some() {
        Verdict::Fail
    } else if !indeterminate.is_empty() {
        Verdict::Indeterminate
    } else {
        Verdict::Pass
    };
    Ok(ConditionReport {
        verdict,
        constant,
        q_max,
        first_failure,
        indeterminate,
        worst_q,
        worst_ratio,
    })
}

/// Integers ℓ with |ℓ| <= √x for which some k <= (log x)^{1+ε} puts kℓθ
/// within x^{-1/3} of an integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurlyLSet {
    pub x: f64,
    pub eps: f64,
    pub ell_max: i64,
    pub k_max: u64,
    pub threshold: f64,
    pub members: Vec<i64>,
    /// Smallest k certifying membership, parallel to `members`.
    pub witnesses: Vec<u64>,
    /// ℓ whose membership could not be decided at the working precision.
    pub undecided: Vec<i64>,
    pub min_gap: Option<i64>,
    /// min_gap / (log x)^{3/2}.
    pub spacing_ratio: Option<f64>,
}

impl CurlyLSet {
    pub fn contains(&self, ell: i64) -> bool {
        self.members.binary_search(&ell).is_ok()
    }
}

pub fn curly_l(theta: &Theta, x: f64, eps: f64) -> Result<CurlyLSet> {
    if !(x >= 16.0) {
        return Err(Error::InvalidArgument("x must be at least 16".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let log_x = x.ln();
    let k_max = log_x.powf(1.0 + eps).floor() as u64;
    let ell_max = x.sqrt().floor() as i64;
    let t = x.powf(-1.0 / 3.0);
    let thr = Enclosure::around(t, 8);

    let decided: Vec<(i64, Option<u64>, bool)> = (-ell_max..=ell_max)
        .into_par_iter()
        .map(|ell| {
            if ell == 0 {
                return (0, Some(1), false);
            }
            let mut undecided = false;
            for k in 1..=k_max.max(1) {
                let d = theta.dist_nearest_int(k as i64 * ell);
                // member iff ‖kℓθ‖ <= threshold
                if d.hi <= thr.lo {
                    return (ell, Some(k), false);
                }
                if d.lo <= thr.hi {
                    undecided = true;
                }
            }
            (ell, None, undecided)
        })
        .collect();

    let mut members = Vec::new();
    let mut witnesses = Vec::new();
    let mut undecided = Vec::new();
    for (ell, w, u) in decided {
        match w {
            Some(k) => {
                members.push(ell);
                witnesses.push(k);
            }
            None if u => undecided.push(ell),
            None => {}
        }
    }
    let min_gap = members.windows(2).map(|w| w[1] - w[0]).min();
    let spacing_ratio = min_gap.map(|g| g as f64 / log_x.powf(1.5));
    Ok(CurlyLSet {
        x,
        eps,
        ell_max,
        k_max,
        threshold: t,
        members,
        witnesses,
        undecided,
        min_gap,
        spacing_ratio,
    })
}

/// θ = k/r + θ' with k = ⌊rθ⌋ and 0 <= θ' < 1/r (θ taken mod 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModReduction {
    pub r: u64,
    pub k: u64,
    pub theta_prime: Enclosure,
}

impl ModReduction {
    pub fn theta_prime_mid(&self) -> f64 {
        self.theta_prime.mid()
    }
}

pub fn reduce_mod_r(theta: &Theta, r: u64) -> Result<ModReduction> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    if let ThetaKind::Rational { num, den } = theta.kind {
        let a = num.rem_euclid(den as i64) as i128;
        let ra = r as i128 * a;
        let k = ra.div_euclid(den as i128);
        let rem = ra - k * den as i128; // θ' = rem / (den r)
        let tp = rem as f64 / (den as f64 * r as f64);
        let theta_prime = if rem == 0 { Enclosure::exact(0.0) } else { Enclosure::around(tp, 2) };
        return Ok(ModReduction {
            r,
            k: k as u64,
            theta_prime,
        });
    }
    let scaled = theta.frac.scale(&BigInt::from(r));
    let k = scaled.floor().ok_or_else(|| {
        Error::PrecisionExhausted(format!("r*theta is too close to an integer for r = {r}"))
    })?;
    let rem = scaled.sub_int(&k);
    // θ' = rem / r
    let lo = ratio_enclosure(&rem.lo, rem.bits).lo / r as f64;
    let hi = ratio_enclosure(&rem.hi, rem.bits).hi / r as f64;
    let theta_prime = Enclosure {
        lo: lo.next_down().max(0.0),
        hi: hi.next_up(),
    };
    Ok(ModReduction {
        r,
        k: k.to_u64().expect("k fits u64"),
        theta_prime,
    })
}

/// Exact floor of qθ - the nearest integer a for a given q, and the
/// certified enclosure of |qθ - a| (θ taken mod 1).
pub fn offset_from(theta: &Theta, q: i64, a: i64) -> Enclosure {
    if let ThetaKind::Rational { num, den } = theta.kind {
        let t = num.rem_euclid(den as i64) as i128 * q as i128 - a as i128 * den as i128;
        return Enclosure::around(t.unsigned_abs() as f64 / den as f64, 1);
    }
    let v = theta.frac.scale(&BigInt::from(q)).sub_int(&BigInt::from(a));
    let e = v.enclosure();
    if e.lo >= 0.0 {
        e
    } else if e.hi <= 0.0 {
        Enclosure { lo: -e.hi, hi: -e.lo }
    } else {
        Enclosure { lo: 0.0, hi: e.hi.max(-e.lo) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cf_sqrt2_and_pell_denominators() {
        let cf = continued_fraction(&Theta::sqrt(2).unwrap(), 8).unwrap();
        assert_eq!(cf.quotients, vec![1, 2, 2, 2, 2, 2, 2, 2]);
        let cf = continued_fraction(&Theta::sqrt2_minus_1(), 6).unwrap();
        assert_eq!(cf.quotients[0], 0);
        let qs: Vec<i128> = cf.convergents.iter().map(|c| c.1).collect();
        // q_{i+1} = 2 q_i + q_{i-1}
        assert_eq!(qs, vec![1, 2, 5, 12, 29, 70]);
    }

    #[test]
    fn cf_pi_certified() {
        let cf = continued_fraction(&Theta::pi(), 5).unwrap();
        assert_eq!(cf.quotients, vec![3, 7, 15, 1, 292]);
        let cf = continued_fraction(&Theta::e(), 10).unwrap();
        assert_eq!(cf.quotients, vec![2, 1, 2, 1, 1, 4, 1, 1, 6, 1]);
        // a short enclosure runs out of certified quotients
        let coarse = Theta::new(ThetaKind::Constant(NamedConstant::Pi), 64).unwrap();
        assert!(matches!(
            continued_fraction(&coarse, 200),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn cf_golden_and_rational() {
        let g = Theta::golden_minus_1();
        let cf = continued_fraction(&g, 6).unwrap();
        assert_eq!(cf.quotients, vec![0, 1, 1, 1, 1, 1]);
        let cf = continued_fraction(&Theta::rational(22, 7).unwrap(), 10).unwrap();
        assert_eq!(cf.quotients, vec![3, 7]);
        assert!(cf.terminated);
        // a quadratic needing normalization: (1 + √3)/2
        let t = Theta::new(ThetaKind::Quadratic { p: 1, d: 3, q: 2 }, 256).unwrap();
        let cf = continued_fraction(&t, 6).unwrap();
        // (1+√3)/2 = 1.3660... = [1; 2, 1, 2, 1, 2]
        assert_eq!(cf.quotients, vec![1, 2, 1, 2, 1, 2]);
    }

    #[test]
    fn dist_examples() {
        let s = Theta::sqrt(2).unwrap();
        assert_eq!(s.dist_nearest_int(0), Enclosure::exact(0.0));
        let d = s.dist_nearest_int(5);
        assert!(d.contains(0.07106781186547524));
        assert!(d.width() < 1e-15);
        let third = Theta::rational(1, 3).unwrap();
        assert_eq!(third.dist_nearest_int(3), Enclosure::exact(0.0));
    }

    #[test]
    fn best_approximation_law() {
        let t = Theta::sqrt2_minus_1();
        let cf = continued_fraction(&t, 16).unwrap();
        let mut best = f64::INFINITY;
        let mut next_conv = cf.convergents.iter().map(|c| c.1 as i64).filter(|&q| q > 1).peekable();
        for q in 1..=100_000i64 {
            let d = t.dist_nearest_int(q).mid();
            if next_conv.peek() == Some(&q) {
                assert!(d < best, "convergent q = {q} is not a record");
                next_conv.next();
            } else {
                assert!(d > best || q == 1, "non-convergent q = {q} beats all earlier");
            }
            best = best.min(d);
        }
    }

    #[test]
    fn fast_phase_agrees_with_bigint() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for theta in [Theta::sqrt2_minus_1(), Theta::pi(), Theta::e()] {
            for _ in 0..1000 {
                let q: i64 = rng.gen_range(1..=1_000_000);
                let slow = theta.dist_nearest_int(q);
                let fast = theta.dist_nearest_int_fast(q);
                assert!((slow.mid() - fast).abs() < 1e-15, "q = {q}");
            }
        }
    }

    #[test]
    fn condition_examples() {
        let t = Theta::sqrt2_minus_1();
        let r = check_condition(&t, 1e6, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.first_failure, Some(1));

        // ‖qθ‖ / exp(-q^{1/4}) dips to about 0.077 near q = 169 and 408, so
        // C = 0.25 is too large while C = 0.05 holds through Q = 10^4.
        let r = check_condition(&t, 0.25, 10_000).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.first_failure, Some(12));
        assert_eq!(r.worst_q, 169);
        assert!((r.worst_ratio - 0.0769).abs() < 5e-4);
        let r = check_condition(&t, 0.05, 10_000).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);

        let rat = Theta::rational(22, 7).unwrap();
        let r = check_condition(&rat, 1e-3, 20).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.first_failure, Some(7));
        assert_eq!(r.worst_q, 7);
        assert_eq!(r.worst_ratio, 0.0);
    }

    #[test]
    fn curly_l_members() {
        let t = Theta::sqrt2_minus_1();
        let x = 1e4;
        let set = curly_l(&t, x, 0.1).unwrap();
        assert!(set.contains(0));
        assert!(set.undecided.is_empty());
        assert_eq!(set.k_max, (x.ln().powf(1.1)).floor() as u64);
        // brute force in plain f64; margins here are far above rounding
        for ell in -100i64..=100 {
            let member = (1..=set.k_max).any(|k| {
                let v = (k as i64 * ell) as f64 * (2f64.sqrt() - 1.0);
                (v - v.round()).abs() <= x.powf(-1.0 / 3.0)
            });
            assert_eq!(set.contains(ell), member, "ell = {ell}");
        }
        // rational θ: every ℓ is a member with witness q0
        let rat = Theta::rational(2, 5).unwrap();
        let set = curly_l(&rat, 1e4, 0.1).unwrap();
        assert_eq!(set.members.len() as i64, 2 * set.ell_max + 1);
        assert!(set.witnesses.iter().all(|&k| k <= 5));
    }

    #[test]
    fn reduction_examples() {
        let t = Theta::sqrt2_minus_1();
        let red = reduce_mod_r(&t, 101).unwrap();
        assert_eq!(red.k, 41);
        assert!(red.theta_prime.lo >= 0.0 && red.theta_prime.hi < 1.0 / 101.0);
        assert!((red.theta_prime.mid() - (0.41421356237309503 - 41.0 / 101.0)).abs() < 1e-16);
        assert!(red.theta_prime.width() < 1e-16);
        assert_eq!(reduce_mod_r(&t, 2).unwrap().k, 0);
        assert_eq!(reduce_mod_r(&t, 10007).unwrap().k, 4145);
        let rat = Theta::rational(1, 3).unwrap();
        let red = reduce_mod_r(&rat, 7).unwrap();
        assert_eq!(red.k, 2);
        assert!((red.theta_prime.mid() - 1.0 / 21.0).abs() < 1e-17);
    }

    #[test]
    fn parse_specs() {
        assert_eq!(Theta::parse("sqrt:2", 256).unwrap().to_string(), "sqrt:2");
        assert_eq!(Theta::parse("const:pi", 256).unwrap().to_string(), "const:pi");
        assert_eq!(Theta::parse("rat:22/7", 256).unwrap().to_string(), "rat:22/7");
        assert_eq!(Theta::parse("rat:2/6", 256).unwrap().to_string(), "rat:1/3");
        assert!((Theta::parse("sqrt:2", 256).unwrap().reduced() - 0.41421356237309503).abs() < 1e-16);
        assert!(Theta::parse("sqrt:4", 256).is_err());
        assert!(Theta::parse("bogus", 256).is_err());
        assert!(Theta::parse("rat:1/0", 256).is_err());
    }
}
