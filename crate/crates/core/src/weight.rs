//! Weight functions supported on [0, 1] and their Fourier integrals.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::e;
use crate::error::{Error, Result};
use crate::quad::integrate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightKind {
    /// exp(-1/(t(1-t))) on (0, 1).
    Bump,
    /// 1 on (0, 1].
    Flat,
    /// Linear interpolation of samples at t = i/(n-1).
    Sampled { values: Vec<f64> },
}

const MAX_TABLE_LOG2: usize = 26;

#[derive(Clone)]
pub struct WeightFunction {
    kind: WeightKind,
    l1: f64,
    l2_sq: f64,
    sup: f64,
    tables: Arc<[OnceLock<Vec<f64>>; MAX_TABLE_LOG2 + 1]>,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("kind", &self.kind)
            .field("l2_sq", &self.l2_sq)
            .finish()
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::Bump => write!(f, "bump"),
            WeightKind::Flat => write!(f, "flat"),
            WeightKind::Sampled { values } => write!(f, "sampled[{}]", values.len()),
        }
    }
}

#[inline]
fn bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (t * (1.0 - t))).exp()
    }
}

impl WeightFunction {
    pub fn new(kind: WeightKind) -> Result<Self> {
        if let WeightKind::Sampled { values } = &kind {
            if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(
                    "sampled weight needs at least two finite samples".into(),
                ));
            }
        }
        let mut w = Self {
            kind,
            l1: 0.0,
            l2_sq: 0.0,
            sup: 0.0,
            tables: Arc::new(std::array::from_fn(|_| OnceLock::new())),
        };
        let (l1, l2_sq, sup) = match &w.kind {
            WeightKind::Flat => (1.0, 1.0, 1.0),
            WeightKind::Bump => {
                let l1 = integrate(bump, 0.0, 1.0, 0.0, 1e-14)?.value;
                let l2 = integrate(|t| bump(t).powi(2), 0.0, 1.0, 0.0, 1e-14)?.value;
                (l1, l2, (-4.0f64).exp())
            }
            WeightKind::Sampled { values } => {
                // piecewise linear: integrate each cell exactly
                let h = 1.0 / (values.len() - 1) as f64;
                let mut l1 = 0.0;
                let mut l2 = 0.0;
                for pair in values.windows(2) {
                    let (a, b) = (pair[0], pair[1]);
                    l1 += h * linear_abs_integral(a, b);
                    l2 += h * (a * a + a * b + b * b) / 3.0;
                }
                let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                (l1, l2, sup)
            }
        };
        if !(l2_sq > 0.0) {
            return Err(Error::InvalidArgument("weight has zero L2 norm".into()));
        }
        w.l1 = l1;
        w.l2_sq = l2_sq;
        w.sup = sup;
        Ok(w)
    }

    pub fn bump() -> Self {
        Self::new(WeightKind::Bump).expect("bump weight")
    }

    pub fn flat() -> Self {
        Self::new(WeightKind::Flat).expect("flat weight")
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bump" => Ok(Self::bump()),
            "flat" => Ok(Self::flat()),
            _ => Err(Error::InvalidArgument(format!("unknown weight {s:?} (expected bump or flat)"))),
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self.kind, WeightKind::Bump)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::Bump => bump(t),
            WeightKind::Flat => {
                if t > 0.0 && t <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            WeightKind::Sampled { values } => {
                if !(0.0..=1.0).contains(&t) {
                    return 0.0;
                }
                let n = values.len() - 1;
                let pos = t * n as f64;
                let i = (pos.floor() as usize).min(n - 1);
                let frac = pos - i as f64;
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
        }
    }

    /// ∫₀¹ w(t)² dt.
    pub fn l2_norm_sq(&self) -> f64 {
        self.l2_sq
    }

    /// ∫₀¹ |w(t)| dt.
    pub fn l1_norm(&self) -> f64 {
        self.l1
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    /// ∫₀¹ w(u) e(ωu) du with an error estimate.
    pub fn fourier(&self, omega: f64) -> Result<(Complex64, f64)> {
        match &self.kind {
            WeightKind::Flat => {
                if omega == 0.0 {
                    return Ok((Complex64::new(1.0, 0.0), 0.0));
                }
                let v = (e(omega) - 1.0) / Complex64::new(0.0, TAU * omega);
                Ok((v, 4.0 * f64::EPSILON * v.norm().max(f64::MIN_POSITIVE)))
            }
            WeightKind::Bump => Ok(self.bump_fourier_trapezoid(omega)),
            WeightKind::Sampled { .. } => self.fourier_adaptive(omega, 1e-13),
        }
    }

    /// The same integral by adaptive Gauss-Kronrod, one panel per period.
    pub fn fourier_adaptive(&self, omega: f64, abs_tol: f64) -> Result<(Complex64, f64)> {
        let panels = omega.abs().ceil().max(1.0) as usize;
        let h = 1.0 / panels as f64;
        let tol = (abs_tol / panels as f64).max(4.0 * f64::EPSILON * self.sup * h);
        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for p in 0..panels {
            let a = p as f64 * h;
            let b = if p + 1 == panels { 1.0 } else { a + h };
            let r = integrate(|u: f64| e(omega * u) * self.eval(u), a, b, tol, 0.0)?;
            value += r.value;
            err += r.error;
        }
        Ok((value, err))
    }

    fn bump_table(&self, log2: usize) -> &[f64] {
        self.tables[log2].get_or_init(|| {
            let n = 1usize << log2;
            (0..n).map(|i| bump(i as f64 / n as f64)).collect()
        })
    }

    /// The bump and all its derivatives vanish at 0 and 1, so the
    /// trapezoid rule converges faster than any power of the node count;
    /// the aliasing error is governed by the transform at N - |ω|.
    fn bump_fourier_trapezoid(&self, omega: f64) -> (Complex64, f64) {
        let need = 2.0 * omega.abs() + 1024.0;
        let log2 = (need.log2().ceil() as usize).clamp(10, MAX_TABLE_LOG2);
        let table = self.bump_table(log2);
        let fine = trapezoid_sum(table, omega, 1);
        let coarse = trapezoid_sum(table, omega, 2);
        let n = table.len() as f64;
        // coarse uses N/2 nodes; its error bounds the fine rule's
        let roundoff = 16.0 * f64::EPSILON * self.l1 * n.log2();
        (fine, (fine - coarse).norm().min(self.sup) + roundoff)
    }
}

fn trapezoid_sum(table: &[f64], omega: f64, stride: usize) -> Complex64 {
    let n = table.len();
    let step = stride as f64 / n as f64;
    let rot = e(omega * step);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut z = Complex64::new(1.0, 0.0);
    for (count, i) in (0..n).step_by(stride).enumerate() {
        if count % 64 == 0 {
            z = e(omega * (i as f64 / n as f64));
        }
        acc += z * table[i];
        z *= rot;
    }
    acc * step
}

fn linear_abs_integral(a: f64, b: f64) -> f64 {
    // ∫₀¹ |a + (b - a)s| ds
    if a * b >= 0.0 {
        0.5 * (a.abs() + b.abs())
    } else {
        0.5 * (a * a + b * b) / (a.abs() + b.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        let b = WeightFunction::bump();
        assert_eq!(b.eval(0.0), 0.0);
        assert_eq!(b.eval(1.0), 0.0);
        assert_eq!(b.eval(-0.3), 0.0);
        assert!((b.eval(0.5) - (-4.0f64).exp()).abs() < 1e-18);
        let f = WeightFunction::flat();
        assert_eq!(f.eval(0.75), 1.0);
        assert_eq!(f.eval(1.0), 1.0);
        assert_eq!(f.eval(0.0), 0.0);
    }

    #[test]
    fn norms() {
        let b = WeightFunction::bump();
        // reference values from an independent midpoint rule on 10^6 cells
        let n = 1_000_000;
        let (mut l1, mut l2) = (0.0, 0.0);
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            let v = bump(t);
            l1 += v;
            l2 += v * v;
        }
        l1 /= n as f64;
        l2 /= n as f64;
        assert!((b.l1_norm() - l1).abs() < 1e-12 * l1.max(1e-3));
        assert!((b.l2_norm_sq() - l2).abs() < 1e-12);
        assert!(b.l2_norm_sq() > 0.0);
        let s = WeightFunction::new(WeightKind::Sampled { values: vec![0.0, 1.0, 0.0] }).unwrap();
        assert!((s.l1_norm() - 0.5).abs() < 1e-15);
        assert!((s.l2_norm_sq() - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.eval(0.25) - 0.5).abs() < 1e-15);
        assert!(WeightFunction::new(WeightKind::Sampled { values: vec![0.0, 0.0] }).is_err());
    }

    #[test]
    fn trapezoid_matches_gauss_kronrod() {
        let b = WeightFunction::bump();
        for omega in [0.0, 0.5, -3.25, 17.0, 123.4, -987.6, 4000.1] {
            let (fast, err) = b.fourier(omega).unwrap();
            let (slow, serr) = b.fourier_adaptive(omega, 1e-14).unwrap();
            assert!((fast - slow).norm() < 1e-15 + serr, "omega = {omega}");
            assert!(err < 1e-14);
        }
        let (v0, _) = b.fourier(0.0).unwrap();
        assert!((v0.re - b.l1_norm()).abs() < 1e-15);
        // real weight: conjugation symmetry
        let (p, _) = b.fourier(12.5).unwrap();
        let (m, _) = b.fourier(-12.5).unwrap();
        assert!((p - m.conj()).norm() < 1e-16);
    }

    #[test]
    fn flat_fourier_closed_form() {
        let f = WeightFunction::flat();
        for omega in [0.3, -2.7, 10.0] {
            let (v, _) = f.fourier(omega).unwrap();
            let (q, err) = f.fourier_adaptive(omega, 1e-14).unwrap();
            assert!((v - q).norm() < 1e-13 + err);
        }
        let (v, _) = f.fourier(3.0).unwrap();
        assert!(v.norm() < 1e-15);
    }
}
