//! Exact counts of congruence and Diophantine solutions, paired with the
//! envelopes they are compared against.

use std::collections::HashSet;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_u64, tau};
use crate::diophantine::{offset_from, Theta};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub kind: String,
    pub params: Vec<(String, f64)>,
    pub count: u64,
    pub bound: f64,
    pub ratio: f64,
}

impl CountReport {
    fn new(kind: &str, params: &[(&str, f64)], count: u64, bound: f64) -> Self {
        Self {
            kind: kind.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            count,
            bound,
            ratio: if bound > 0.0 { count as f64 / bound } else { f64::INFINITY },
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

/// #{(a, b) mod q : ab ≡ d}. For each a the solutions in b exist iff
/// gcd(a, q) | d, and then there are gcd(a, q) of them.
pub fn n_fast(d: i64, q: u64) -> u64 {
    let dm = d.rem_euclid(q as i64) as u64;
    (0..q)
        .map(|a| {
            let g = gcd_u64(a, q);
            if dm.is_multiple_of(g) {
                g
            } else {
                0
            }
        })
        .sum()
}

pub fn n_brute(d: i64, q: u64) -> u64 {
    let dm = d.rem_euclid(q as i64) as u64;
    let mut count = 0;
    for a in 0..q {
        for b in 0..q {
            if (a * b) % q == dm {
                count += 1;
            }
        }
    }
    count
}

/// N(d, q) for every d mod q from one pass over all q² pairs.
pub fn n_brute_all(q: u64) -> Vec<u64> {
    let mut hist = vec![0; q as usize];
    for a in 0..q {
        for b in 0..q {
            hist[((a * b) % q) as usize] += 1;
        }
    }
    hist
}

pub fn count_n(d: i64, q: u64) -> Result<CountReport> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be at least 1".into()));
    }
    let g = gcd_u64(d.unsigned_abs(), q);
    let bound = (tau(g)? * q) as f64;
    Ok(CountReport::new("N", &[("d", d as f64), ("q", q as f64)], n_fast(d, q), bound))
}

/// Number of t in [lo, hi] with t ≡ c mod m.
fn count_in_class(lo: i64, hi: i64, c: i64, m: i64) -> u64 {
    if lo > hi {
        return 0;
    }
    let first = lo + (c - lo).rem_euclid(m);
    if first > hi {
        0
    } else {
        ((hi - first) / m + 1) as u64
    }
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    let eg = a.rem_euclid(m).extended_gcd(&m);
    eg.x.rem_euclid(m)
}

fn div_floor(a: i64, b: i64) -> i64 {
    Integer::div_floor(&a, &b)
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -Integer::div_floor(&-a, &b)
}

/// #{(a, b, c) : |a|, |b|, |c| ⩽ B, ab + 2cS = S² - 4P}.
pub fn nsp_fast(s: i64, p: i64, bx: i64) -> u64 {
    if bx < 0 {
        return 0;
    }
    let rhs = s * s - 4 * p;
    if s == 0 {
        return ab_equals(-4 * p, bx) * (2 * bx + 1) as u64;
    }
    let m = 2 * s.abs();
    // c = (rhs - ab)/(2S) must be an integer in [-B, B]
    let lo_prod = rhs - m * bx;
    let hi_prod = rhs + m * bx;
    let mut count = 0u64;
    for a in -bx..=bx {
        if a == 0 {
            if rhs.rem_euclid(m) == 0 && lo_prod <= 0 && 0 <= hi_prod {
                count += (2 * bx + 1) as u64;
            }
            continue;
        }
        let g = a.abs().gcd(&m);
        if rhs.rem_euclid(g) != 0 {
            continue;
        }
        let mg = m / g;
        let b0 = ((rhs / g).rem_euclid(mg) * mod_inverse(a / g, mg)).rem_euclid(mg);
        let (blo, bhi) = if a > 0 {
            (div_ceil(lo_prod, a), div_floor(hi_prod, a))
        } else {
            (div_ceil(hi_prod, a), div_floor(lo_prod, a))
        };
        count += count_in_class(blo.max(-bx), bhi.min(bx), b0, mg);
    }
    count
}

/// #{(a, b) : |a|, |b| ⩽ B, ab = n}.
fn ab_equals(n: i64, bx: i64) -> u64 {
    if n == 0 {
        return (4 * bx + 1) as u64;
    }
    let mut count = 0;
    for a in 1..=bx.min(n.abs()) {
        if n % a == 0 && (n / a).abs() <= bx {
            count += 2; // (a, n/a) and (-a, -n/a)
        }
    }
    count
}

pub fn nsp_brute(s: i64, p: i64, bx: i64) -> u64 {
    let rhs = s * s - 4 * p;
    let mut count = 0;
    for a in -bx..=bx {
        for b in -bx..=bx {
            let rest = rhs - a * b;
            if s == 0 {
                if rest == 0 {
                    count += (2 * bx + 1) as u64;
                }
            } else if rest % (2 * s) == 0 && (rest / (2 * s)).abs() <= bx {
                count += 1;
            }
        }
    }
    count
}

/// N_{S,P}(T) with the box |a|, |b|, |c| ⩽ box_constant·T.
pub fn count_nsp(s: i64, p: i64, t: u64, box_constant: f64) -> Result<CountReport> {
    if t == 0 {
        return Err(Error::InvalidArgument("T must be at least 1".into()));
    }
    if !(box_constant > 0.0) {
        return Err(Error::InvalidArgument("box constant must be positive".into()));
    }
    let bx = (box_constant * t as f64).floor() as i64;
    let count = nsp_fast(s, p, bx);
    let tf = t as f64;
    let bound = if s == 0 {
        // N_{0,P}(T) ≪ T |P|^ε; at P = 0 the count is of order T²
        if p == 0 {
            tf * tf
        } else {
            tf * (p.unsigned_abs() as f64).powf(0.05)
        }
    } else {
        let ts = tf / s.unsigned_abs() as f64;
        ts * (2.0 + ts).ln() * n_fast(-4 * p, s.unsigned_abs()) as f64
    };
    Ok(CountReport::new(
        "NSP",
        &[("S", s as f64), ("P", p as f64), ("T", tf), ("box_constant", box_constant)],
        count,
        bound,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiophantineTuple {
    pub s: i64,
    pub p: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl DiophantineTuple {
    pub fn on_surface(&self) -> bool {
        self.a * self.b + 2 * self.c * self.s == self.s * self.s - 4 * self.p
    }
}

/// Φ(m₁, m₂, n₁, n₂) = (n₁-n₂+m₁-m₂, n₁-n₂-m₁+m₂, m₁+m₂).
pub fn injection_phi(m1: i64, m2: i64, n1: i64, n2: i64) -> DiophantineTuple {
    DiophantineTuple {
        s: m1 + m2 - n1 - n2,
        p: n1 * n2 - m1 * m2,
        a: n1 - n2 + m1 - m2,
        b: n1 - n2 - m1 + m2,
        c: m1 + m2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionReport {
    pub bound: i64,
    pub quadruples: u64,
    pub fibers: u64,
    pub surface_violations: u64,
    pub identity_violations: u64,
    pub collisions: u64,
}

/// Exhaustive check of Φ over all quadruples with entries in [-bound, bound].
pub fn injection_check(bound: i64) -> InjectionReport {
    let mut seen: HashSet<DiophantineTuple> = HashSet::new();
    let mut fibers: HashSet<(i64, i64)> = HashSet::new();
    let (mut quads, mut surface, mut identity, mut collisions) = (0u64, 0u64, 0u64, 0u64);
    for m1 in -bound..=bound {
        for m2 in -bound..=bound {
            for n1 in -bound..=bound {
                for n2 in -bound..=bound {
                    quads += 1;
                    let t = injection_phi(m1, m2, n1, n2);
                    if !t.on_surface() {
                        surface += 1;
                    }
                    let lhs = (n1 - n2).pow(2) - (m1 - m2).pow(2) + t.c * t.c;
                    if lhs != (t.c - t.s).pow(2) - 4 * t.p {
                        identity += 1;
                    }
                    fibers.insert((t.s, t.p));
                    if !seen.insert(t) {
                        collisions += 1;
                    }
                }
            }
        }
    }
    InjectionReport {
        bound,
        quadruples: quads,
        fibers: fibers.len() as u64,
        surface_violations: surface,
        identity_violations: identity,
        collisions,
    }
}

fn admissible(members: &[i64], k: i64, r: i64) -> Vec<i64> {
    members
        .iter()
        .filter(|&&m| (k + m).rem_euclid(r) != 0)
        .map(|&m| (k + m).rem_euclid(r))
        .collect()
}

/// 𝒩₄: quadruples from `members` (minus the class m ≡ -k) with
/// (k+m₁)(k+m₂) ≡ (k+n₁)(k+n₂) mod r, as Σ over product buckets of size².
pub fn n4_meet_in_middle(members: &[i64], k: i64, r: u64) -> u64 {
    let vals = admissible(members, k, r as i64);
    let mut buckets = vec![0u64; r as usize];
    for &u in &vals {
        for &v in &vals {
            buckets[((u as u128 * v as u128) % r as u128) as usize] += 1;
        }
    }
    buckets.iter().map(|&c| c * c).sum()
}

pub fn n4_brute(members: &[i64], k: i64, r: u64) -> u64 {
    let vals = admissible(members, k, r as i64);
    let r = r as i64;
    let mut count = 0;
    for &a in &vals {
        for &b in &vals {
            let lhs = a * b % r;
            for &c in &vals {
                for &d in &vals {
                    if c * d % r == lhs {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

pub fn interval(lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi).collect()
}

pub fn count_n4(members: &[i64], k: i64, r: u64) -> Result<CountReport> {
    if members.len() > 4000 {
        return Err(Error::InvalidArgument("interval longer than 4000".into()));
    }
    let count = n4_meet_in_middle(members, k, r);
    let t = members.iter().map(|m| m.abs()).max().unwrap_or(0) as f64;
    let bound = t * t + t.powi(4) / r as f64;
    Ok(CountReport::new(
        "N4",
        &[("len", members.len() as f64), ("k", k as f64), ("r", r as f64)],
        count,
        bound,
    ))
}

/// 2|I'|² - |I'|: the quadruples with {m₁, m₂} = {n₁, n₂}.
pub fn n4_diagonal(members: &[i64], k: i64, r: u64) -> u64 {
    let n = admissible(members, k, r as i64).len() as u64;
    2 * n * n - n
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PigeonholeWitness {
    pub q: i64,
    pub d: i64,
    pub a: i64,
    /// Certified upper end of |qθ - a|.
    pub offset: f64,
    pub limit: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PigeonholeReport {
    pub report: CountReport,
    pub in_regime: bool,
    pub witness: Option<PigeonholeWitness>,
}

/// Number of P ≡ v mod r with |P| ⩽ M.
fn residues_in_box(v: i64, r: i64, m: i64) -> u64 {
    count_in_class(-m, m, v, r)
}

/// #{(S, P) ∈ [1, N] × [-M, M] : kS ≡ P mod r}.
pub fn pigeonhole_fast(n: u64, m: u64, k: i64, r: u64) -> u64 {
    let r = r as i64;
    (1..=n as i64)
        .map(|s| residues_in_box((k as i128 * s as i128).rem_euclid(r as i128) as i64, r, m as i64))
        .sum()
}

pub fn pigeonhole_brute(n: u64, m: u64, k: i64, r: u64) -> u64 {
    let r = r as i128;
    let mut count = 0;
    for s in 1..=n as i128 {
        for p in -(m as i128)..=m as i128 {
            if (k as i128 * s - p).rem_euclid(r) == 0 {
                count += 1;
            }
        }
    }
    count
}

pub fn pigeonhole_count(n: u64, m: u64, k: i64, r: u64, c: f64, theta: Option<&Theta>) -> Result<PigeonholeReport> {
    if n == 0 || r == 0 {
        return Err(Error::InvalidArgument("N and r must be positive".into()));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidArgument("c must be positive".into()));
    }
    let count = pigeonhole_fast(n, m, k, r);
    let bound = n as f64 / (2.0 + r as f64 / m.max(1) as f64).ln().powf(1.0 / c);
    let report = CountReport::new(
        "pigeonhole",
        &[("N", n as f64), ("M", m as f64), ("k", k as f64), ("r", r as f64), ("c", c)],
        count,
        bound,
    );
    let in_regime = r > m && m >= n && n >= 1;

    // a single hit (S, P) is itself a pair; with more, consecutive hits give
    // q = S' - S and d = P' - P, and the smallest such q is at most N/count
    let ri = r as i64;
    let mut hits = Vec::new();
    for s in 1..=n as i64 {
        let v = (k as i128 * s as i128).rem_euclid(ri as i128) as i64;
        let p = if v <= m as i64 && v <= ri - v {
            Some(v)
        } else if v - ri >= -(m as i64) {
            Some(v - ri)
        } else {
            None
        };
        if let Some(p) = p {
            hits.push((s, p));
        }
    }
    let mut best: Option<(i64, i64)> = hits.first().copied();
    for w in hits.windows(2) {
        let cand = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        if best.is_none_or(|b| cand.0 < b.0) {
            best = Some(cand);
        }
    }
    let witness = match (theta, best) {
        (Some(theta), Some((q, d))) => {
            let a = ((k as i128 * q as i128 - d as i128) / ri as i128) as i64;
            let offset = offset_from(theta, q, a).hi;
            let limit = 3.0 * m as f64 / r as f64;
            Some(PigeonholeWitness { q, d, a, offset, limit, holds: offset <= limit })
        }
        _ => None,
    };
    Ok(PigeonholeReport { report, in_regime, witness })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CleanCountReport {
    pub report: CountReport,
    pub admissible_pairs: u64,
    /// Σ_{P ≡ 0 mod r} N_{0,P}(T).
    pub s_zero_count: u64,
    /// T² + (T²/r)·T^{1+2ε}.
    pub s_zero_bound: f64,
    pub eps: f64,
}

/// Σ over |S| ⩽ T, |P| ⩽ T², kS ≡ P mod r of N_{S,P}(T).
pub fn clean_counting_harness(t: u64, r: u64, k: i64, box_constant: f64) -> Result<CleanCountReport> {
    if t == 0 {
        return Err(Error::InvalidArgument("T must be at least 1".into()));
    }
    let bx = (box_constant * t as f64).floor() as i64;
    let ti = t as i64;
    let p_max = ti * ti;
    let ri = r as i64;
    let per_s: Vec<(u64, u64)> = (-ti..=ti)
        .into_par_iter()
        .map(|s| {
            let v = (k as i128 * s as i128).rem_euclid(ri as i128) as i64;
            let first = -p_max + (v + p_max).rem_euclid(ri);
            let mut total = 0u64;
            let mut pairs = 0u64;
            let mut p = first;
            while p <= p_max {
                total += nsp_fast(s, p, bx);
                pairs += 1;
                p += ri;
            }
            (total, pairs)
        })
        .collect();
    let count: u64 = per_s.iter().map(|v| v.0).sum();
    let admissible_pairs = per_s.iter().map(|v| v.1).sum();
    let s_zero_count = per_s[ti as usize].0;
    let tf = t as f64;
    let eps = 0.05;
    let bound = tf * tf + tf.powi(4) / r as f64;
    Ok(CleanCountReport {
        report: CountReport::new(
            "clean",
            &[("T", tf), ("r", r as f64), ("k", k as f64), ("box_constant", box_constant)],
            count,
            bound,
        ),
        admissible_pairs,
        s_zero_count,
        s_zero_bound: tf * tf + tf * tf / r as f64 * tf.powf(1.0 + 2.0 * eps),
        eps,
    })
}

/// The same total by brute force over every (S, P) and every (a, b, c).
pub fn clean_counting_brute(t: u64, r: u64, k: i64, box_constant: f64) -> u64 {
    let bx = (box_constant * t as f64).floor() as i64;
    let ti = t as i64;
    let mut total = 0;
    for s in -ti..=ti {
        for p in -ti * ti..=ti * ti {
            if (k as i128 * s as i128 - p as i128).rem_euclid(r as i128) == 0 {
                total += nsp_brute(s, p, bx);
            }
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub n4: u64,
    pub sharp_sum: u64,
    pub sharp_s_max: i64,
    pub sharp_p_max: i64,
    pub sharp_box: i64,
    /// The same sum over |S| ⩽ 2 max|I|, |P| ⩽ 2 max|I|², box 2 max|I|.
    pub narrow_sum: u64,
    pub holds: bool,
}

/// 𝒩₄(I) against Σ_{kS ≡ P} N_{S,P} over the ranges Φ can reach.
pub fn fourth_moment_bridge(members: &[i64], k: i64, r: u64) -> BridgeReport {
    let n4 = n4_meet_in_middle(members, k, r);
    let mx = members.iter().map(|m| m.abs()).max().unwrap_or(0);
    let sum_over = |s_max: i64, p_max: i64, bx: i64| -> u64 {
        (-s_max..=s_max)
            .map(|s| {
                (-p_max..=p_max)
                    .filter(|&p| (k as i128 * s as i128 - p as i128).rem_euclid(r as i128) == 0)
                    .map(|p| nsp_fast(s, p, bx))
                    .sum::<u64>()
            })
            .sum()
    };
    // |a|, |b|, |S| ⩽ 4 max|I|, |c| ⩽ 2 max|I|, |P| ⩽ 2 max|I|²
    let sharp_s_max = 4 * mx;
    let sharp_p_max = 2 * mx * mx;
    let sharp_box = 4 * mx;
    let sharp_sum = sum_over(sharp_s_max, sharp_p_max, sharp_box);
    let narrow_sum = sum_over(2 * mx, 2 * mx * mx, 2 * mx);
    BridgeReport {
        n4,
        sharp_sum,
        sharp_s_max,
        sharp_p_max,
        sharp_box,
        narrow_sum,
        holds: n4 <= sharp_sum,
    }
}

/// #{(a, b) : |a|, |b| ⩽ T, (a, b) ≡ (u, v) mod S, |ab + 4P| ⩽ TS}.
pub fn hyperbola_congruence_count(u: i64, v: i64, s: i64, t: i64, p: i64) -> Result<u64> {
    if !(1 <= u && u <= s && 1 <= v && v <= s && s <= t) {
        return Err(Error::InvalidArgument("need 1 <= u, v <= S <= T".into()));
    }
    let lo = -t * s - 4 * p;
    let hi = t * s - 4 * p;
    let mut count = 0;
    let mut a = -t + (u + t).rem_euclid(s);
    while a <= t {
        if a == 0 {
            if lo <= 0 && 0 <= hi {
                count += count_in_class(-t, t, v, s);
            }
        } else {
            let (blo, bhi) = if a > 0 {
                (div_ceil(lo, a), div_floor(hi, a))
            } else {
                (div_ceil(hi, a), div_floor(lo, a))
            };
            count += count_in_class(blo.max(-t), bhi.min(t), v, s);
        }
        a += s;
    }
    Ok(count)
}

pub fn hyperbola_brute(u: i64, v: i64, s: i64, t: i64, p: i64) -> u64 {
    let mut count = 0;
    for a in -t..=t {
        for b in -t..=t {
            if (a - u).rem_euclid(s) == 0 && (b - v).rem_euclid(s) == 0 && (a * b + 4 * p).abs() <= t * s {
                count += 1;
            }
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicTail {
    pub s: i64,
    pub j_max: i64,
    pub partial: f64,
    pub tail_lo: f64,
    pub tail_hi: f64,
    pub value: f64,
    /// Half-width of the certified range for the full sum.
    pub uncertainty: f64,
    pub ratio: f64,
}

/// 𝒟(s) = Σ_{j ⩾ max(1,s)} j / max(1, j-s)³: partial sum to J plus
/// integral bounds on the rest.
pub fn dyadic_tail(s: i64, j_max: i64) -> Result<DyadicTail> {
    let start = s.max(1);
    if j_max < start + 10 {
        return Err(Error::InvalidArgument(format!("J_max must be at least {}", start + 10)));
    }
    let partial: f64 = (start..=j_max)
        .rev()
        .map(|j| j as f64 / ((j - s).max(1) as f64).powi(3))
        .sum();
    // the terms t/(t-s)³ decrease for t > -s/2, so the tail lies between
    // the integrals from J+1 and from J
    let antideriv = |t: f64| {
        let u = t - s as f64;
        1.0 / u + s as f64 / (2.0 * u * u)
    };
    let tail_lo = antideriv(j_max as f64 + 1.0);
    let tail_hi = antideriv(j_max as f64);
    let value = partial + 0.5 * (tail_lo + tail_hi);
    Ok(DyadicTail {
        s,
        j_max,
        partial,
        tail_lo,
        tail_hi,
        value,
        uncertainty: 0.5 * (tail_hi - tail_lo),
        ratio: (partial + tail_hi) / (start as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_count_examples() {
        assert_eq!(count_n(1, 5).unwrap().count, 4);
        assert_eq!(count_n(0, 4).unwrap().count, 8);
        assert_eq!(count_n(2, 4).unwrap().count, 4);
        assert!(count_n(1, 0).is_err());
    }

    #[test]
    fn point_count_fast_matches_brute() {
        for q in 1..=120u64 {
            for d in 0..q as i64 {
                let n = n_fast(d, q);
                assert_eq!(n, n_brute(d, q), "d={d} q={q}");
                assert_eq!(n, n_brute_all(q)[d as usize]);
                let rep = count_n(d, q).unwrap();
                assert!(rep.count as f64 <= rep.bound);
            }
        }
    }

    #[test]
    fn nsp_examples() {
        // ab = 0 in a 5×5 grid has 9 solutions, each with 5 choices of c
        assert_eq!(nsp_fast(0, 0, 2), 45);
        assert_eq!(nsp_brute(0, 0, 2), 45);
        assert_eq!(count_nsp(1, 0, 1, 1.0).unwrap().count, nsp_brute(1, 0, 1));
        // ab + 2c = 1 over the 27 triples, enumerated by hand:
        // (a,b,c) with ab ∈ {-1, 1}: ab = 1 → c = 0; ab = -1 → c = 1
        assert_eq!(nsp_brute(1, 0, 1), 4);
    }

    #[test]
    fn nsp_fast_matches_brute() {
        for s in -7..=7 {
            for p in -20..=20 {
                for bx in [1, 3, 8] {
                    assert_eq!(nsp_fast(s, p, bx), nsp_brute(s, p, bx), "S={s} P={p} B={bx}");
                }
            }
        }
    }

    #[test]
    fn phi_examples() {
        let t = injection_phi(1, 1, 1, 1);
        assert_eq!((t.a, t.b, t.c, t.s, t.p), (0, 0, 2, 0, 0));
        let t = injection_phi(2, 3, 1, 6);
        assert_eq!((t.a, t.b, t.c, t.s, t.p), (-6, -4, 5, -2, 0));
        assert!(t.on_surface());
        let t = injection_phi(2, 3, 1, 6);
        let rep = count_nsp(t.s, t.p, 6, 1.0).unwrap();
        assert!(rep.count >= 1);
    }

    #[test]
    fn injection_small_box() {
        let rep = injection_check(4);
        assert_eq!(rep.quadruples, 9u64.pow(4));
        assert_eq!(rep.surface_violations, 0);
        assert_eq!(rep.identity_violations, 0);
        assert_eq!(rep.collisions, 0);
    }

    #[test]
    fn n4_examples() {
        let members = interval(-4, 4);
        let fast = n4_meet_in_middle(&members, 41, 101);
        assert_eq!(fast, n4_brute(&members, 41, 101));
        assert!(fast >= n4_diagonal(&members, 41, 101));
        // an interval wide enough to hit the excluded class -k
        let members = interval(-45, -5);
        assert_eq!(n4_meet_in_middle(&members, 41, 101), n4_brute(&members, 41, 101));
        assert!(n4_meet_in_middle(&members, 41, 101) >= n4_diagonal(&members, 41, 101));
    }

    #[test]
    fn pigeonhole_examples() {
        let r = 10007;
        let k = 4145;
        let rep = pigeonhole_count(50, 100, k, r, 1.0 / 3.0, Some(&Theta::sqrt2_minus_1())).unwrap();
        assert_eq!(rep.report.count, pigeonhole_brute(50, 100, k, r));
        assert!(rep.in_regime);
        assert_eq!(rep.witness.is_some(), rep.report.count > 0);
        if let Some(w) = &rep.witness {
            assert!(w.holds);
        }
        // N = 1
        for k in [0i64, 5, 50, 101, 9000] {
            let expect = u64::from(k <= 100 || r as i64 - k <= 100);
            assert_eq!(pigeonhole_fast(1, 100, k, r), expect);
        }
        // M ⩾ r: every S has at least one P
        let rep = pigeonhole_count(10, 20, 3, 13, 1.0, None).unwrap();
        assert!(!rep.in_regime);
        assert_eq!(rep.report.count, pigeonhole_brute(10, 20, 3, 13));
        assert!(rep.report.count >= 10);
    }

    #[test]
    fn clean_counting_small() {
        for (t, r, k) in [(1u64, 7u64, 3i64), (2, 11, 4), (3, 13, 5), (4, 101, 41)] {
            let rep = clean_counting_harness(t, r, k, 1.0).unwrap();
            assert_eq!(rep.report.count, clean_counting_brute(t, r, k, 1.0), "T={t} r={r}");
        }
        // only P = 0 is admissible at S = 0 when T² < r
        let rep = clean_counting_harness(5, 101, 41, 1.0).unwrap();
        assert_eq!(rep.s_zero_count, nsp_fast(0, 0, 5));
    }

    #[test]
    fn bridge_small() {
        let rep = fourth_moment_bridge(&interval(-3, 3), 41, 101);
        assert!(rep.holds);
        assert!(rep.n4 <= rep.sharp_sum);
    }

    #[test]
    fn hyperbola_examples() {
        for u in 1..=10 {
            for v in 1..=10 {
                let c = hyperbola_congruence_count(u, v, 10, 10, 0).unwrap();
                assert_eq!(c, hyperbola_brute(u, v, 10, 10, 0));
                assert!(c <= 9);
            }
        }
        assert_eq!(hyperbola_congruence_count(3, 4, 5, 20, 1000).unwrap(), 0);
        assert_eq!(
            hyperbola_congruence_count(5, 5, 5, 30, 7).unwrap(),
            hyperbola_brute(5, 5, 5, 30, 7)
        );
        assert!(hyperbola_congruence_count(0, 1, 5, 30, 7).is_err());
    }

    #[test]
    fn dyadic_examples() {
        let d0 = dyadic_tail(0, 10_000).unwrap();
        assert!((d0.value - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-6);
        assert!(d0.uncertainty < 1e-7);
        // s = 10: 10 + 11 + Σ_{u⩾2} (u+10)/u³ = 21 + ζ(2) - 1 + 10(ζ(3) - 1)
        let d10 = dyadic_tail(10, 10_000).unwrap();
        let zeta3 = 1.202_056_903_159_594_3;
        let expect = 20.0 + std::f64::consts::PI.powi(2) / 6.0 + 10.0 * (zeta3 - 1.0);
        assert!((d10.value - expect).abs() < 1e-6);
        assert!(dyadic_tail(5, 10).is_err());
    }
}
