//! The off-diagonal sum over m₁m₂ = n₁n₂ inside [1, x]⁴, its (g, h, a, b)
//! parametrization and the three-case split used to bound it.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd_u64, mobius_table};
use crate::characters::{e, CharacterFamily};
use crate::diophantine::{curly_l, Theta};
use crate::error::{Error, Result};
use crate::sums::family_sums;
use crate::weight::WeightFunction;

/// m₁ = ga, m₂ = hb, n₁ = gb, n₂ = ha with gcd(a, b) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactorQuadruple {
    pub g: u64,
    pub h: u64,
    pub a: u64,
    pub b: u64,
}

impl FactorQuadruple {
    /// Inverse of [`FactorQuadruple::solution`]; `None` unless m₁m₂ = n₁n₂.
    pub fn from_solution(m1: u64, m2: u64, n1: u64, n2: u64) -> Option<Self> {
        if m1 == 0 || m2 == 0 || n1 == 0 || n2 == 0 || m1 as u128 * m2 as u128 != n1 as u128 * n2 as u128 {
            return None;
        }
        let g = gcd_u64(m1, n1);
        let (a, b) = (m1 / g, n1 / g);
        Some(Self { g, h: m2 / b, a, b })
    }

    /// (m₁, m₂, n₁, n₂).
    pub fn solution(&self) -> (u64, u64, u64, u64) {
        (self.g * self.a, self.h * self.b, self.g * self.b, self.h * self.a)
    }

    pub fn fits(&self, x: u64) -> bool {
        self.a.max(self.b) * self.g.max(self.h) <= x
    }

    pub fn is_diagonal(&self) -> bool {
        self.a == self.b || self.g == self.h
    }

    /// m₁ + m₂ - n₁ - n₂.
    pub fn frequency(&self) -> i64 {
        (self.g as i64 - self.h as i64) * (self.a as i64 - self.b as i64)
    }
}

/// |Σ_{1⩽n⩽y} e(nqθ)|², from the Fejér kernel.
pub fn fejer(y: u64, q: i64, theta: &Theta) -> f64 {
    let p = theta.phase(q);
    let p = if p > 0.5 { p - 1.0 } else { p };
    if p == 0.0 {
        return (y as f64).powi(2);
    }
    let den = (std::f64::consts::PI * p).sin();
    // reduce yp mod 1 before the sine so large y keeps full accuracy
    let yp = theta.phase(q.wrapping_mul(y as i64));
    let num = (std::f64::consts::PI * yp).sin();
    (num / den).powi(2)
}

fn coprime_mask(b: u64) -> Vec<bool> {
    let mut mask = vec![true; b as usize + 1];
    for (p, _) in factorize(b) {
        let mut m = p;
        while m <= b {
            mask[m as usize] = false;
            m += p;
        }
    }
    mask
}

/// Σ over admissible (g, h, a, b) of e((g-h)(a-b)θ). The (g, h) sum is
/// taken in closed form, (a, b) and (b, a) are paired, so the result is real.
pub fn offdiag_sum(x: u64, theta: &Theta) -> Complex64 {
    if x < 2 {
        return Complex64::new(0.0, 0.0);
    }
    let per_b: Vec<f64> = (2..=x)
        .into_par_iter()
        .map(|b| {
            let l = x / b;
            let mask = coprime_mask(b);
            let mut acc = 0.0;
            for a in 1..b {
                if mask[a as usize] {
                    acc += fejer(l, (b - a) as i64, theta) - l as f64;
                }
            }
            2.0 * acc
        })
        .collect();
    Complex64::new(per_b.iter().sum(), 0.0)
}

/// The same sum term by term, lexicographic in (g, h, a, b).
pub fn offdiag_parametrized(x: u64, theta: &Theta) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for g in 1..=x {
        for h in 1..=x {
            if g == h {
                continue;
            }
            let y = x / g.max(h);
            for a in 1..=y {
                for b in 1..=y {
                    if a != b && gcd_u64(a, b) == 1 {
                        let q = FactorQuadruple { g, h, a, b };
                        acc += e(theta.phase(q.frequency()));
                    }
                }
            }
        }
    }
    acc
}

/// Direct enumeration over m₁m₂ = n₁n₂ with {m₁, m₂} ≠ {n₁, n₂}.
pub fn offdiag_brute(x: u64, theta: &Theta) -> Complex64 {
    let profile = offdiag_profile_brute(x, theta);
    profile[x as usize].value
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub count: u64,
    pub value: Complex64,
}

fn cumulate(mut p: Vec<ProfileEntry>) -> Vec<ProfileEntry> {
    for i in 1..p.len() {
        p[i].count += p[i - 1].count;
        let prev = p[i - 1].value;
        p[i].value += prev;
    }
    p
}

/// Entry y holds the off-diagonal count and sum at x = y, for every y ⩽ x.
pub fn offdiag_profile_brute(x: u64, theta: &Theta) -> Vec<ProfileEntry> {
    let mut pairs: Vec<(u64, u64, u64)> = Vec::with_capacity((x * x) as usize);
    for m in 1..=x {
        for n in 1..=x {
            pairs.push((m * n, m, n));
        }
    }
    pairs.sort_unstable();
    let mut out = vec![ProfileEntry { count: 0, value: Complex64::new(0.0, 0.0) }; x as usize + 1];
    for bucket in pairs.chunk_by(|u, v| u.0 == v.0) {
        for &(_, m1, m2) in bucket {
            for &(_, n1, n2) in bucket {
                if (m1 == n1 && m2 == n2) || (m1 == n2 && m2 == n1) {
                    continue;
                }
                let top = m1.max(m2).max(n1).max(n2) as usize;
                out[top].count += 1;
                out[top].value += e(theta.phase(m1 as i64 + m2 as i64 - n1 as i64 - n2 as i64));
            }
        }
    }
    cumulate(out)
}

/// The parametrized side of [`offdiag_profile_brute`].
pub fn offdiag_profile_parametrized(x: u64, theta: &Theta) -> Vec<ProfileEntry> {
    let mut out = vec![ProfileEntry { count: 0, value: Complex64::new(0.0, 0.0) }; x as usize + 1];
    for a in 1..=x {
        for b in 1..=x {
            if a == b || gcd_u64(a, b) != 1 {
                continue;
            }
            let ab = a.max(b);
            for g in 1..=x / ab {
                for h in 1..=x / ab {
                    if g == h {
                        continue;
                    }
                    let q = FactorQuadruple { g, h, a, b };
                    let (m1, m2, n1, n2) = q.solution();
                    let top = m1.max(m2).max(n1).max(n2) as usize;
                    out[top].count += 1;
                    out[top].value += e(theta.phase(q.frequency()));
                }
            }
        }
    }
    cumulate(out)
}

/// Diagonal solutions {m₁, m₂} = {n₁, n₂} in [1, x]⁴.
pub fn diagonal_count(x: u64) -> u64 {
    2 * x * x - x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Case1Inner {
    pub g: u64,
    pub h: u64,
    pub x: u64,
    /// Σ_k μ(k) |Σ_{r ⩽ x/(k max(g,h))} e(k(g-h)rθ)|².
    pub mobius: Complex64,
    /// Σ over coprime a ≠ b ⩽ x/max(g,h) of e((g-h)(a-b)θ).
    pub coprime: Complex64,
    /// mobius - coprime; the a = b = 1 term, which is 1.
    pub difference: Complex64,
}

pub fn case1_inner(g: u64, h: u64, x: u64, theta: &Theta) -> Result<Case1Inner> {
    if g == h || g == 0 || h == 0 {
        return Err(Error::InvalidArgument("case 1 needs distinct positive g, h".into()));
    }
    if g.max(h).pow(2) > x {
        return Err(Error::InvalidArgument(format!("max(g, h) = {} exceeds √x", g.max(h))));
    }
    let y = x / g.max(h);
    let d = g as i64 - h as i64;
    let mu = mobius_table(y as usize);
    let mobius = mobius_unfolded(y, d, theta, &mu);
    let mut coprime = Complex64::new(0.0, 0.0);
    for a in 1..=y {
        for b in 1..=y {
            if a != b && gcd_u64(a, b) == 1 {
                coprime += e(theta.phase(d * (a as i64 - b as i64)));
            }
        }
    }
    let mobius = Complex64::new(mobius, 0.0);
    Ok(Case1Inner { g, h, x, mobius, coprime, difference: mobius - coprime })
}

fn mobius_unfolded(y: u64, d: i64, theta: &Theta, mu: &[i8]) -> f64 {
    (1..=y)
        .filter(|&k| mu[k as usize] != 0)
        .map(|k| mu[k as usize] as f64 * fejer(y / k, k as i64 * d, theta))
        .sum()
}

/// Contributions split by whether the relevant difference lies in 𝓛.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Strata {
    pub in_l: f64,
    pub out_l: f64,
}

impl Strata {
    pub fn total(&self) -> f64 {
        self.in_l + self.out_l
    }

    fn add(&mut self, member: bool, v: f64) {
        if member {
            self.in_l += v;
        } else {
            self.out_l += v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseDecomposition {
    pub x: u64,
    pub theta: String,
    pub sqrt_x: u64,
    /// max(g, h) ⩽ √x, split on g - h.
    pub case1: Strata,
    /// max(a, b) ⩽ √x, split on a - b.
    pub case2: Strata,
    /// Both maxima ⩽ √x, split on a - b.
    pub case3: Strata,
    pub combined: f64,
    pub offdiag: Complex64,
    pub relative_error: f64,
    /// Terms with g = h and max(a, b) ⩽ √x.
    pub g_eq_h_count: u64,
    /// g_eq_h_count / x^{3/2}.
    pub g_eq_h_constant: f64,
    pub curly_l_size: usize,
    pub ratio_to_x2: f64,
}

impl CaseDecomposition {
    pub fn s1(&self) -> f64 {
        self.case1.total()
    }
    pub fn s2(&self) -> f64 {
        self.case2.total()
    }
    pub fn s3(&self) -> f64 {
        self.case3.total()
    }
}

pub fn case_decomposition(x: u64, theta: &Theta, eps: f64) -> Result<CaseDecomposition> {
    if x < 16 {
        return Err(Error::InvalidArgument("case decomposition needs x >= 16".into()));
    }
    let s = x.isqrt();
    let l = curly_l(theta, x as f64, eps)?;
    let mu = mobius_table(x as usize);

    let mut case1 = Strata::default();
    for g in 1..=s {
        for h in 1..=s {
            if g == h {
                continue;
            }
            let d = g as i64 - h as i64;
            let v = mobius_unfolded(x / g.max(h), d, theta, &mu) - 1.0;
            case1.add(l.contains(d), v);
        }
    }

    let mut case2 = Strata::default();
    let mut case3 = Strata::default();
    let mut g_eq_h = 0;
    for a in 1..=s {
        for b in 1..=s {
            if a == b || gcd_u64(a, b) != 1 {
                continue;
            }
            let d = a as i64 - b as i64;
            let member = l.contains(d);
            let top = x / a.max(b);
            case2.add(member, fejer(top, d, theta) - top as f64);
            case3.add(member, fejer(s, d, theta) - s as f64);
            g_eq_h += top;
        }
    }

    let combined = case1.total() + case2.total() - case3.total();
    let offdiag = offdiag_sum(x, theta);
    let scale = offdiag.norm().max(1.0);
    Ok(CaseDecomposition {
        x,
        theta: theta.label(),
        sqrt_x: s,
        case1,
        case2,
        case3,
        combined,
        offdiag,
        relative_error: (offdiag - combined).norm() / scale,
        g_eq_h_count: g_eq_h,
        g_eq_h_constant: g_eq_h as f64 / (x as f64).powf(1.5),
        curly_l_size: l.members.len(),
        ratio_to_x2: offdiag.norm() / (x as f64).powi(2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortSumRow {
    pub x: u64,
    pub offdiag: Complex64,
    pub ratio_to_x2: f64,
}

pub fn ratio_scan(xs: &[u64], theta: &Theta) -> Vec<ShortSumRow> {
    xs.iter()
        .map(|&x| {
            let offdiag = offdiag_sum(x, theta);
            ShortSumRow { x, offdiag, ratio_to_x2: offdiag.norm() / (x as f64).powi(2) }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourthMomentClosure {
    pub r: u64,
    pub x: u64,
    /// 𝔼_χ |Σ_{n⩽x} χ(n)e(nθ)|⁴ over all r - 1 characters.
    pub moment4: f64,
    pub diagonal: u64,
    pub offdiag: f64,
    pub residual: f64,
}

/// For x ⩽ √r the congruence m₁m₂ ≡ n₁n₂ is an equality, so orthogonality
/// turns the family fourth moment into diagonal + off-diagonal.
pub fn fourth_moment_closure(r: u64, x: u64, theta: &Theta) -> Result<FourthMomentClosure> {
    if x * x > r {
        return Err(Error::InvalidArgument(format!("x = {x} exceeds √r for r = {r}")));
    }
    let fam = CharacterFamily::new(r)?;
    let fs = family_sums(&fam, x as f64, theta, &WeightFunction::flat());
    let moment4 = fs.moment(4.0);
    let diagonal = diagonal_count(x);
    let offdiag = offdiag_sum(x, theta).re;
    Ok(FourthMomentClosure {
        r,
        x,
        moment4,
        diagonal,
        offdiag,
        residual: (moment4 - diagonal as f64 - offdiag).abs(),
    })
}
