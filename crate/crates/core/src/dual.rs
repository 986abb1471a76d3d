//! The dual form of S(χ) under Poisson summation in (Z/rZ) × R:
//!
//! S(χ) = Σ_{m ∈ Z} f̂_r(m/r) f̂_∞(m/r),
//!
//! with f̂_r(m/r) = (1/r)Σ_t χ(t)e((k+m)t/r) and
//! f̂_∞(m/r) = ∫ w(t/x) e((θ' - m/r)t) dt, plus the dyadic split of the
//! m-range used to bound the fourth moment.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{Character, CharacterFamily, GaussData};
use crate::counting::{n4_diagonal, n4_meet_in_middle};
use crate::diophantine::{reduce_mod_r, Theta};
use crate::error::{Error, Result};
use crate::weight::WeightFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSetup {
    pub r: u64,
    pub x: f64,
    pub theta: String,
    pub k: i64,
    pub theta_prime: f64,
    pub delta: f64,
    pub j_max: usize,
}

impl DualSetup {
    pub fn new(r: u64, x: f64, theta: &Theta, delta: f64, j_max: usize) -> Result<Self> {
        if !(x >= 1.0) {
            return Err(Error::InvalidArgument("x must be at least 1".into()));
        }
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument("delta must be positive".into()));
        }
        let red = reduce_mod_r(theta, r)?;
        Ok(Self {
            r,
            x,
            theta: theta.label(),
            k: red.k as i64,
            theta_prime: red.theta_prime_mid(),
            delta,
            j_max,
        })
    }

    /// 2 + r/x.
    pub fn base(&self) -> f64 {
        2.0 + self.r as f64 / self.x
    }

    /// T_j = 2^j (2 + r/x).
    pub fn t(&self, j: usize) -> f64 {
        2f64.powi(j as i32) * self.base()
    }

    /// W_j = 2^{-jδ}.
    pub fn w(&self, j: usize) -> f64 {
        2f64.powf(-(j as f64) * self.delta)
    }

    /// 𝒲 = (Σ_{j⩾0} W_j)³.
    pub fn curly_w(&self) -> f64 {
        (1.0 / (1.0 - 2f64.powf(-self.delta))).powi(3)
    }

    /// I₀ = [-T₀, T₀]; I_j = {T_{j-1} < |m| ⩽ T_j}.
    pub fn level(&self, j: usize) -> Vec<i64> {
        let hi = self.t(j).floor() as i64;
        if j == 0 {
            return (-hi..=hi).collect();
        }
        let lo = self.t(j - 1).floor() as i64;
        (-hi..=-(lo + 1)).chain(lo + 1..=hi).collect()
    }

    /// The level containing m, if any level up to `j_max` does.
    pub fn level_of(&self, m: i64) -> Option<usize> {
        (0..=self.j_max).find(|&j| (m.unsigned_abs() as f64) <= self.t(j))
    }

    /// Frequency ω = x(θ' - m/r) seen by the weight.
    pub fn omega(&self, m: i64) -> f64 {
        self.x * (self.theta_prime - m as f64 / self.r as f64)
    }
}

/// f̂_∞(m/r) = x ∫₀¹ w(u) e(x(θ' - m/r)u) du, with an error estimate.
pub fn f_infty_hat(setup: &DualSetup, w: &WeightFunction, m: i64) -> Result<(Complex64, f64)> {
    let (v, err) = w.fourier(setup.omega(m))?;
    Ok((v * setup.x, err * setup.x))
}

/// f̂_∞ for |m| ⩽ M, stored at index m + M.
#[derive(Debug, Clone)]
pub struct DualTable {
    pub m_max: i64,
    pub values: Vec<Complex64>,
    pub errors: Vec<f64>,
}

impl DualTable {
    pub fn new(setup: &DualSetup, w: &WeightFunction, m_max: i64) -> Result<Self> {
        let rows: Vec<(Complex64, f64)> = (-m_max..=m_max)
            .into_par_iter()
            .map(|m| f_infty_hat(setup, w, m))
            .collect::<Result<_>>()?;
        let (values, errors) = rows.into_iter().unzip();
        Ok(Self { m_max, values, errors })
    }

    #[inline]
    pub fn get(&self, m: i64) -> Complex64 {
        self.values[(m + self.m_max) as usize]
    }

    pub fn error(&self, m: i64) -> f64 {
        self.errors[(m + self.m_max) as usize]
    }

    pub fn ascending(&self) -> impl Iterator<Item = i64> {
        ascending(self.m_max)
    }
}

/// m = 0, -1, 1, -2, 2, ..., -M, M.
pub fn ascending(m_max: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=m_max).flat_map(|a| [-a, a]))
}

/// ⌈100(2 + r/x)⌉.
pub fn default_m_max(setup: &DualSetup) -> i64 {
    (100.0 * setup.base()).ceil() as i64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonResidual {
    pub character: Character,
    pub m_max: i64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// Σ |f̂_r||err f̂_∞| over the truncated range.
    pub quadrature_error: f64,
}

fn check_poisson_inputs(setup: &DualSetup, w: &WeightFunction, m_max: i64) -> Result<()> {
    if !w.is_smooth() {
        return Err(Error::InvalidArgument(format!(
            "weight {w} is not smooth; the dual sum does not converge fast enough"
        )));
    }
    if (m_max as f64) < setup.r as f64 / setup.x {
        return Err(Error::InvalidArgument(format!(
            "M_max = {m_max} is below r/x = {:.3}",
            setup.r as f64 / setup.x
        )));
    }
    Ok(())
}

/// Truncated dual sum Σ_{|m|⩽M} f̂_r(m/r) f̂_∞(m/r), with the coefficients
/// from the Gauss sum.
pub fn dual_sum(fam: &CharacterFamily, gauss: &GaussData, setup: &DualSetup, table: &DualTable, m_max: i64) -> (Complex64, f64) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for m in ascending(m_max.min(table.m_max)) {
        let coeff = fam.dual_coefficient_from_gauss(gauss, m, setup.k);
        acc += coeff * table.get(m);
        err += coeff.norm() * table.error(m);
    }
    (acc, err)
}

pub fn poisson_residual(
    fam: &CharacterFamily,
    gauss: &GaussData,
    setup: &DualSetup,
    w: &WeightFunction,
    theta: &Theta,
    table: &DualTable,
    m_max: i64,
) -> Result<PoissonResidual> {
    check_poisson_inputs(setup, w, m_max)?;
    if m_max > table.m_max {
        return Err(Error::InvalidArgument("dual table shorter than M_max".into()));
    }
    let lhs = crate::sums::mixed_sum_direct(fam, gauss.character, setup.x, theta, w);
    let (rhs, quadrature_error) = dual_sum(fam, gauss, setup, table, m_max);
    Ok(PoissonResidual {
        character: gauss.character,
        m_max,
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
        quadrature_error,
    })
}

/// Residuals for several characters, building the f̂_∞ table once.
pub fn poisson_residuals(
    fam: &CharacterFamily,
    chars: &[Character],
    setup: &DualSetup,
    w: &WeightFunction,
    theta: &Theta,
    m_max: i64,
) -> Result<Vec<PoissonResidual>> {
    check_poisson_inputs(setup, w, m_max)?;
    let table = DualTable::new(setup, w, m_max)?;
    chars
        .par_iter()
        .map(|&chi| {
            let gauss = fam.gauss_sum(chi);
            poisson_residual(fam, &gauss, setup, w, theta, &table, m_max)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalTail {
    pub a: f64,
    pub range: i64,
    /// Σ_{m ≡ -k mod r, |m| ⩽ range} f̂_r(m/r) f̂_∞(m/r) for χ₀.
    pub value: Complex64,
    /// The same for any non-principal character.
    pub nonprincipal_value: Complex64,
    /// x^{1-A}/(r-1).
    pub envelope: f64,
    pub ratio: f64,
    /// The term of largest modulus and the ratio of the runner-up to it.
    pub dominant_m: i64,
    pub runner_up_ratio: f64,
}

/// The resonant class m ≡ -k mod r. There f̂_r(m/r) is (r-1)/r for χ₀
/// and 0 for every other character.
pub fn principal_tail(fam: &CharacterFamily, setup: &DualSetup, w: &WeightFunction, a: f64) -> Result<PrincipalTail> {
    if !(a > 1.0) {
        return Err(Error::InvalidArgument("A must exceed 1".into()));
    }
    let r = setup.r as i64;
    let range = 10 * r;
    let first = -range + (-setup.k + range).rem_euclid(r);
    let coeff = (r - 1) as f64 / r as f64;
    let other = fam.character(1.min(fam.size() as u64 - 1))?;
    let mut terms = Vec::new();
    let mut nonprincipal_value = Complex64::new(0.0, 0.0);
    let mut m = first;
    while m <= range {
        let (v, _) = f_infty_hat(setup, w, m)?;
        terms.push((m, v * coeff));
        nonprincipal_value += fam.dual_coefficient(other, m, setup.k) * v;
        m += r;
    }
    let value: Complex64 = terms.iter().map(|t| t.1).sum();
    let mut mags: Vec<(f64, i64)> = terms.iter().map(|(m, v)| (v.norm(), *m)).collect();
    mags.sort_by(|p, q| q.0.total_cmp(&p.0));
    let dominant_m = mags.first().map(|v| v.1).unwrap_or(-setup.k);
    let runner_up_ratio = match mags.as_slice() {
        [first, second, ..] if first.0 > 0.0 => second.0 / first.0,
        _ => 0.0,
    };
    let envelope = setup.x.powf(1.0 - a) / (r - 1) as f64;
    Ok(PrincipalTail {
        a,
        range,
        value,
        nonprincipal_value,
        envelope,
        ratio: value.norm() / envelope,
        dominant_m,
        runner_up_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeScan {
    pub a: f64,
    pub m_range: i64,
    /// sup over |m| ⩽ range of (|f̂_∞| - err)₊ / (x(1 + x max(|m|-1,0)/r)^{-A}).
    pub sup_ratio: f64,
    pub argmax: i64,
}

/// The decay envelope x(1 + x max(|m|-1, 0)/r)^{-A}.
pub fn fourier_envelope(setup: &DualSetup, m: i64, a: f64) -> f64 {
    let gap = (m.abs() - 1).max(0) as f64;
    setup.x * (1.0 + setup.x * gap / setup.r as f64).powf(-a)
}

/// Evaluate f̂_∞ once over |m| ⩽ range and scan the envelope for each A.
pub fn fourier_envelope_scan(setup: &DualSetup, w: &WeightFunction, a_values: &[f64], m_range: i64) -> Result<Vec<EnvelopeScan>> {
    let table = DualTable::new(setup, w, m_range)?;
    Ok(a_values
        .iter()
        .map(|&a| {
            let mut best = (0.0f64, 0i64);
            for m in table.ascending() {
                let certified = (table.get(m).norm() - table.error(m)).max(0.0);
                let ratio = certified / fourier_envelope(setup, m, a);
                if ratio > best.0 {
                    best = (ratio, m);
                }
            }
            EnvelopeScan { a, m_range, sup_ratio: best.0, argmax: best.1 }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicLevel {
    pub j: usize,
    pub t_j: f64,
    pub w_j: f64,
    pub size: usize,
    /// Exact 𝒩₄(I_j).
    pub n4: u64,
    pub n4_diagonal: u64,
    pub sup_f_infty: f64,
    /// |b_j(χ₀)|⁴/(r-1) + sup|f̂_∞|⁴ 𝒩₄(I_j)/r², an upper bound for 𝔼_χ|b_j|⁴.
    pub level_bound: f64,
    /// Measured 𝔼_χ |b_j|⁴.
    pub level_measured: f64,
    /// (x⁴/r²) 2^{3jδ}(T_j² + T_j⁴/r)/(1 + (T_j x/r)^{4A}𝟙_{j⩾1}).
    pub paper_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicAssembly {
    pub r: u64,
    pub x: f64,
    pub delta: f64,
    pub a: f64,
    pub curly_w: f64,
    pub levels: Vec<DyadicLevel>,
    /// 𝒲 Σ_j W_j^{-3} level_bound.
    pub holder_bound: f64,
    /// 𝔼_χ |Σ_{j⩽J} b_j|⁴.
    pub measured_truncated: f64,
    /// Characters where |Σ b_j|⁴ > 𝒲 Σ W_j^{-3}|b_j|⁴ (should be none).
    pub holder_violations: usize,
    /// (x^{1-A})⁴ + Σ_j paper_term.
    pub paper_total: f64,
    /// x²(1 + 2x/r)².
    pub envelope: f64,
    /// Σ_{j⩾0} 2^{-j(4A-3δ-2)} in closed form.
    pub geometric_tail: f64,
}

/// The level sums b_j(χ) = Σ_{m ∈ I_j} f̂_r(m/r) f̂_∞(m/r) for j ⩽ J.
fn level_sums(fam: &CharacterFamily, gauss: &GaussData, setup: &DualSetup, table: &DualTable, levels: &[Vec<i64>]) -> Vec<Complex64> {
    levels
        .iter()
        .map(|ms| {
            ms.iter()
                .map(|&m| fam.dual_coefficient_from_gauss(gauss, m, setup.k) * table.get(m))
                .sum()
        })
        .collect()
}

pub fn dyadic_m4_assembly(fam: &CharacterFamily, setup: &DualSetup, w: &WeightFunction, a: f64) -> Result<DyadicAssembly> {
    let delta = setup.delta;
    if 3.0 * delta + 4.0 >= 4.0 * a {
        return Err(Error::InvalidArgument(format!(
            "need 3δ+4 < 4A, got δ = {delta}, A = {a}"
        )));
    }
    let (r, x) = (setup.r as f64, setup.x);
    let j_max = setup.j_max;
    let levels: Vec<Vec<i64>> = (0..=j_max).map(|j| setup.level(j)).collect();
    let m_max = setup.t(j_max).floor() as i64;
    let table = DualTable::new(setup, w, m_max)?;
    let curly_w = setup.curly_w();

    let per_char: Vec<Vec<Complex64>> = fam
        .characters()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&chi| level_sums(fam, &fam.gauss_sum(chi), setup, &table, &levels))
        .collect();
    let count = per_char.len() as f64;

    let mut holder_violations = 0;
    let mut measured_truncated = 0.0;
    let mut level_measured = vec![0.0; levels.len()];
    for b in &per_char {
        let total: Complex64 = b.iter().sum();
        let lhs = total.norm_sqr().powi(2);
        let rhs: f64 = curly_w
            * b.iter()
                .enumerate()
                .map(|(j, v)| setup.w(j).powi(-3) * v.norm_sqr().powi(2))
                .sum::<f64>();
        if lhs > rhs * (1.0 + 1e-12) {
            holder_violations += 1;
        }
        measured_truncated += lhs / count;
        for (j, v) in b.iter().enumerate() {
            level_measured[j] += v.norm_sqr().powi(2) / count;
        }
    }

    let principal = &per_char[0];
    let mut out_levels = Vec::with_capacity(levels.len());
    let mut holder_bound = 0.0;
    let mut paper_total = x.powf(1.0 - a).powi(4);
    for (j, ms) in levels.iter().enumerate() {
        let n4 = n4_meet_in_middle(ms, setup.k, setup.r);
        let sup_f = ms.iter().map(|&m| table.get(m).norm() + table.error(m)).fold(0.0, f64::max);
        let level_bound = principal[j].norm_sqr().powi(2) / count + sup_f.powi(4) * n4 as f64 / (r * r);
        holder_bound += curly_w * setup.w(j).powi(-3) * level_bound;
        let t_j = setup.t(j);
        let damp = if j >= 1 { 1.0 + (t_j * x / r).powf(4.0 * a) } else { 1.0 };
        let paper_term = x.powi(4) / (r * r) * 2f64.powf(3.0 * j as f64 * delta) * (t_j * t_j + t_j.powi(4) / r) / damp;
        paper_total += paper_term;
        out_levels.push(DyadicLevel {
            j,
            t_j,
            w_j: setup.w(j),
            size: ms.len(),
            n4,
            n4_diagonal: n4_diagonal(ms, setup.k, setup.r),
            sup_f_infty: sup_f,
            level_bound,
            level_measured: level_measured[j],
            paper_term,
        });
    }
    let rate = 4.0 * a - 3.0 * delta - 2.0;
    Ok(DyadicAssembly {
        r: setup.r,
        x,
        delta,
        a,
        curly_w,
        levels: out_levels,
        holder_bound,
        measured_truncated,
        holder_violations,
        paper_total,
        envelope: x * x * (1.0 + 2.0 * x / r).powi(2),
        geometric_tail: 1.0 / (1.0 - 2f64.powf(-rate)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(r: u64, x: f64) -> DualSetup {
        DualSetup::new(r, x, &Theta::sqrt2_minus_1(), 0.1, 6).unwrap()
    }

    #[test]
    fn setup_fields() {
        let s = setup(101, 60.0);
        assert_eq!(s.k, 41);
        assert!(s.theta_prime >= 0.0 && s.theta_prime < 1.0 / 101.0);
        assert_eq!(s.t(3), 8.0 * (2.0 + 101.0 / 60.0));
        assert!((s.w(2) - 2f64.powf(-0.2)).abs() < 1e-15);
        // I_j are disjoint and cover [-T_J, T_J]
        let t_max = s.t(s.j_max).floor() as i64;
        let mut seen = vec![0u8; (2 * t_max + 1) as usize];
        for j in 0..=s.j_max {
            for m in s.level(j) {
                seen[(m + t_max) as usize] += 1;
                assert_eq!(s.level_of(m), Some(j));
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn f_infty_zero_mode() {
        let mut s = setup(101, 60.0);
        s.theta_prime = 0.0;
        let w = WeightFunction::bump();
        let (v, _) = f_infty_hat(&s, &w, 0).unwrap();
        assert!((v.re - 60.0 * w.l1_norm()).abs() < 1e-13);
        assert!(v.im.abs() < 1e-13);
    }

    #[test]
    fn direct_coefficients_give_same_dual_sum() {
        let s = setup(101, 60.0);
        let w = WeightFunction::bump();
        let fam = CharacterFamily::new(101).unwrap();
        let table = DualTable::new(&s, &w, 200).unwrap();
        for j in [0u64, 1, 50] {
            let chi = fam.character(j).unwrap();
            let gauss = fam.gauss_sum(chi);
            let (fast, _) = dual_sum(&fam, &gauss, &s, &table, 200);
            let slow: Complex64 = (-200..=200i64)
                .map(|m| fam.dual_coefficient(chi, m, s.k) * table.get(m))
                .sum();
            assert!((fast - slow).norm() < 1e-10);
        }
    }

    #[test]
    fn poisson_identity_mod_101() {
        let s = setup(101, 60.0);
        let w = WeightFunction::bump();
        let fam = CharacterFamily::new(101).unwrap();
        let chars: Vec<Character> = fam.characters().collect();
        let m_max = default_m_max(&s);
        let res = poisson_residuals(&fam, &chars, &s, &w, &Theta::sqrt2_minus_1(), m_max).unwrap();
        for r in &res {
            assert!(r.residual <= 1e-6 * 60f64.sqrt(), "{r:?}");
        }
    }

    #[test]
    fn residual_decays_with_truncation() {
        let s = setup(101, 60.0);
        let w = WeightFunction::bump();
        let fam = CharacterFamily::new(101).unwrap();
        let theta = Theta::sqrt2_minus_1();
        let base = s.base();
        let table = DualTable::new(&s, &w, (64.0 * base).ceil() as i64).unwrap();
        let gauss = fam.gauss_sum(fam.character(1).unwrap());
        let mut prev = f64::INFINITY;
        for mult in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
            let m = (mult * base).ceil() as i64;
            let r = poisson_residual(&fam, &gauss, &s, &w, &theta, &table, m).unwrap();
            assert!(r.residual <= prev + 1e-9, "mult {mult}: {} > {prev}", r.residual);
            prev = r.residual;
        }
    }

    #[test]
    fn poisson_rejects_bad_inputs() {
        let s = setup(101, 60.0);
        let fam = CharacterFamily::new(101).unwrap();
        let chars = vec![fam.character(1).unwrap()];
        let theta = Theta::sqrt2_minus_1();
        assert!(poisson_residuals(&fam, &chars, &s, &WeightFunction::flat(), &theta, 500).is_err());
        assert!(poisson_residuals(&fam, &chars, &s, &WeightFunction::bump(), &theta, 1).is_err());
    }

    #[test]
    fn principal_tail_example() {
        let s = setup(101, 60.0);
        let w = WeightFunction::bump();
        let fam = CharacterFamily::new(101).unwrap();
        let tail = principal_tail(&fam, &s, &w, 2.0).unwrap();
        assert!(tail.nonprincipal_value.norm() < 1e-15);
        assert!(tail.ratio.is_finite());
        assert_eq!(tail.dominant_m, -41);
        assert!(tail.runner_up_ratio < 1.0);
        assert!(principal_tail(&fam, &s, &w, 1.0).is_err());
    }

    #[test]
    fn envelope_scan_is_finite() {
        let s = setup(101, 60.0);
        let w = WeightFunction::bump();
        let scans = fourier_envelope_scan(&s, &w, &[0.0, 1.0, 3.0, 6.0], 2000).unwrap();
        for sc in &scans {
            assert!(sc.sup_ratio.is_finite());
        }
        // A = 0: |f̂_∞| ⩽ x ∫|w|
        assert!(scans[0].sup_ratio <= w.l1_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn dyadic_assembly_bounds_truncated_moment() {
        let s = setup(101, 60.0);
        let w = WeightFunction::bump();
        let fam = CharacterFamily::new(101).unwrap();
        let mut bad = s.clone();
        bad.delta = 2.0;
        assert!(dyadic_m4_assembly(&fam, &bad, &w, 1.0).is_err());

        let asm = dyadic_m4_assembly(&fam, &s, &w, 2.0).unwrap();
        assert_eq!(asm.holder_violations, 0);
        assert!(asm.holder_bound >= asm.measured_truncated);
        for lvl in &asm.levels {
            assert!(lvl.level_bound >= lvl.level_measured * (1.0 - 1e-12), "level {}", lvl.j);
            assert!(lvl.n4 >= lvl.n4_diagonal);
        }
        let rate = 4.0 * 2.0 - 0.3 - 2.0;
        let partial: f64 = (0..200).map(|j| 2f64.powf(-(j as f64) * rate)).sum();
        assert!((asm.geometric_tail - partial).abs() < 1e-14);

        let at_r = DualSetup::new(101, 101.0, &Theta::sqrt2_minus_1(), 0.1, 2).unwrap();
        let asm = dyadic_m4_assembly(&fam, &at_r, &w, 2.0).unwrap();
        assert!((asm.envelope - 9.0 * 101.0 * 101.0).abs() < 1e-9);
    }
}
