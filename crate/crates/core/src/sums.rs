//! Mixed character sums S(χ) = Σ_{n⩽x} χ(n) e(nθ) w(n/x), family-wide
//! evaluation, and moments over the family.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::characters::{e, Character, CharacterFamily};
use crate::diophantine::Theta;
use crate::weight::WeightFunction;

/// Σ_{1⩽n⩽x} χ(n) e(nθ) w(n/x), summed directly in increasing n.
pub fn mixed_sum_direct(
    fam: &CharacterFamily,
    chi: Character,
    x: f64,
    theta: &Theta,
    w: &WeightFunction,
) -> Complex64 {
    if !(x >= 1.0) {
        return Complex64::new(0.0, 0.0);
    }
    let n_max = x.floor() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=n_max {
        let c = fam.value(chi, n);
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        acc += c * e(theta.phase(n)) * w.eval(n as f64 / x);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumMethod {
    Direct,
    Dft,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySums {
    pub r: u64,
    pub x: f64,
    pub theta: String,
    pub weight: String,
    pub method: SumMethod,
    /// S(χ_j) for j = 0..r-2.
    pub values: Vec<Complex64>,
    /// Σ_t |A_t|², which equals the family mean of |S|² for every x.
    pub class_energy: f64,
}

/// A_t = Σ_{n⩽x, ind(n)=t} e(nθ) w(n/x) for t = 0..r-2.
pub fn index_class_sums(fam: &CharacterFamily, x: f64, theta: &Theta, w: &WeightFunction) -> Vec<Complex64> {
    let order = fam.size();
    let mut a = vec![Complex64::new(0.0, 0.0); order];
    if !(x >= 1.0) {
        return a;
    }
    let n_max = x.floor() as i64;
    for n in 1..=n_max {
        if let Some(t) = fam.modulus().ind(n) {
            a[t as usize] += e(theta.phase(n)) * w.eval(n as f64 / x);
        }
    }
    a
}

/// All r-1 sums at once: S(χ_j) = Σ_t A_t e(jt/(r-1)), one inverse DFT.
pub fn family_sums(fam: &CharacterFamily, x: f64, theta: &Theta, w: &WeightFunction) -> FamilySums {
    if x > fam.r() as f64 {
        log::warn!("x = {x} exceeds r = {}; sums wrap around the modulus", fam.r());
    }
    let a = index_class_sums(fam, x, theta, w);
    let class_energy = a.iter().map(|v| v.norm_sqr()).sum();
    let mut values = a;
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(values.len()).process(&mut values);
    FamilySums {
        r: fam.r(),
        x,
        theta: theta.label(),
        weight: w.to_string(),
        method: SumMethod::Dft,
        values,
        class_energy,
    }
}

/// The same vector by r-1 direct sums.
pub fn family_sums_direct(fam: &CharacterFamily, x: f64, theta: &Theta, w: &WeightFunction) -> FamilySums {
    let chars: Vec<Character> = fam.characters().collect();
    let values = chars
        .par_iter()
        .map(|&chi| mixed_sum_direct(fam, chi, x, theta, w))
        .collect();
    let class_energy = index_class_sums(fam, x, theta, w).iter().map(|v| v.norm_sqr()).sum();
    FamilySums {
        r: fam.r(),
        x,
        theta: theta.label(),
        weight: w.to_string(),
        method: SumMethod::Direct,
        values,
        class_energy,
    }
}

impl FamilySums {
    /// 𝔼_χ |S|^p over all r-1 characters, principal included.
    pub fn moment(&self, p: f64) -> f64 {
        if p == 0.0 {
            return 1.0;
        }
        let n = self.values.len() as f64;
        self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / n
    }

    fn even_moment(&self, half: i32) -> f64 {
        let n = self.values.len() as f64;
        self.values.iter().map(|v| v.norm_sqr().powi(half)).sum::<f64>() / n
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub r: u64,
    pub x: f64,
    pub theta: String,
    pub weight: String,
    pub first: f64,
    pub second: f64,
    pub fourth: f64,
    pub first_over_sqrt_x: f64,
    pub second_over_x: f64,
    pub fourth_over_x2: f64,
    /// 𝔼|S| / √𝔼|S|².
    pub first_over_rms: f64,
    /// Σ_{n⩽min(x,r-1)} w(n/x)².
    pub second_reference: f64,
    pub second_rel_error: f64,
    pub cauchy_schwarz: bool,
    pub holder: bool,
}

pub fn moments(fs: &FamilySums, w: &WeightFunction) -> MomentReport {
    let first = fs.moment(1.0);
    let second = fs.even_moment(1);
    let fourth = fs.even_moment(2);
    let n_max = fs.x.min((fs.r - 1) as f64).floor().max(0.0) as u64;
    let second_reference: f64 = (1..=n_max).map(|n| w.eval(n as f64 / fs.x).powi(2)).sum();
    let second_rel_error = if second_reference > 0.0 {
        (second - second_reference).abs() / second_reference
    } else {
        second.abs()
    };
    let slack = 1.0 + 1e-12;
    let x = fs.x.max(f64::MIN_POSITIVE);
    MomentReport {
        r: fs.r,
        x: fs.x,
        theta: fs.theta.clone(),
        weight: fs.weight.clone(),
        first,
        second,
        fourth,
        first_over_sqrt_x: first / x.sqrt(),
        second_over_x: second / x,
        fourth_over_x2: fourth / (x * x),
        first_over_rms: if second > 0.0 { first / second.sqrt() } else { 0.0 },
        second_reference,
        second_rel_error,
        cauchy_schwarz: first * first <= second * slack,
        holder: second <= first.powf(2.0 / 3.0) * fourth.powf(1.0 / 3.0) * slack,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricSum {
    pub direct: Complex64,
    /// e(α)(1 - e(yα))/(1 - e(α)); absent when ‖α‖ = 0.
    pub closed: Option<Complex64>,
    /// |sum| / min(y, 1/(2‖α‖)).
    pub bound_ratio: f64,
}

/// Σ_{1⩽n⩽y} e(nα) by direct summation and in closed form.
pub fn geometric_sum(y: u64, alpha: f64) -> GeometricSum {
    let frac = alpha - alpha.round();
    let direct: Complex64 = (1..=y).map(|n| e((n as f64 * frac).fract())).sum();
    finish_geometric(y, frac.abs(), direct, frac)
}

/// Σ_{1⩽n⩽y} e(nqθ), with each phase reduced in fixed point.
pub fn geometric_sum_theta(y: u64, q: i64, theta: &Theta) -> GeometricSum {
    let direct: Complex64 = (1..=y as i64).map(|n| e(theta.phase(n * q))).sum();
    let p = theta.phase(q);
    let frac = if p > 0.5 { p - 1.0 } else { p };
    finish_geometric(y, frac.abs(), direct, frac)
}

fn finish_geometric(y: u64, dist: f64, direct: Complex64, frac: f64) -> GeometricSum {
    if dist == 0.0 {
        return GeometricSum {
            direct: Complex64::new(y as f64, 0.0),
            closed: None,
            bound_ratio: if y == 0 { 0.0 } else { 1.0 },
        };
    }
    let ea = e(frac);
    let closed = ea * (1.0 - e((y as f64 * frac).fract())) / (1.0 - ea);
    let scale = (y as f64).min(0.5 / dist);
    GeometricSum {
        direct,
        closed: Some(closed),
        bound_ratio: if scale > 0.0 { direct.norm() / scale } else { 0.0 },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionProbe {
    pub r: u64,
    pub x: f64,
    pub count: usize,
    pub mean_abs: f64,
    pub mean_abs_sq: f64,
    pub mean_abs_4: f64,
    pub mean: Complex64,
    pub mean_sq: Complex64,
    /// Kolmogorov-Smirnov distance of |Z|² from the unit exponential law.
    pub ks_exponential: f64,
    /// Reference values for a standard complex Gaussian.
    pub gaussian_mean_abs: f64,
    pub gaussian_mean_abs_4: f64,
}

/// Statistics of Z = S/√(𝔼|S|²) over the family.
pub fn distribution_probe(fs: &FamilySums) -> DistributionProbe {
    let n = fs.values.len();
    let rms = fs.even_moment(1).sqrt();
    let z: Vec<Complex64> = if rms > 0.0 {
        fs.values.iter().map(|v| v / rms).collect()
    } else {
        fs.values.clone()
    };
    let nf = n as f64;
    let mean_abs = z.iter().map(|v| v.norm()).sum::<f64>() / nf;
    let mean_abs_sq = z.iter().map(|v| v.norm_sqr()).sum::<f64>() / nf;
    let mean_abs_4 = z.iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() / nf;
    let mean = z.iter().sum::<Complex64>() / nf;
    let mean_sq = z.iter().map(|v| v * v).sum::<Complex64>() / nf;
    let mut u: Vec<f64> = z.iter().map(|v| v.norm_sqr()).collect();
    u.sort_by(f64::total_cmp);
    let ks = u
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let cdf = 1.0 - (-v).exp();
            (((i + 1) as f64 / nf) - cdf).max(cdf - i as f64 / nf)
        })
        .fold(0.0, f64::max);
    DistributionProbe {
        r: fs.r,
        x: fs.x,
        count: n,
        mean_abs,
        mean_abs_sq,
        mean_abs_4,
        mean,
        mean_sq,
        ks_exponential: ks,
        gaussian_mean_abs: std::f64::consts::PI.sqrt() / 2.0,
        gaussian_mean_abs_4: 2.0,
    }
}
