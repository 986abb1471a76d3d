//! The family of Dirichlet characters mod a prime r, Gauss sums and the
//! finite Fourier coefficients of χ(t)e(kt/r).

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::PrimeModulus;
use crate::error::{Error, Result};

/// `e(t/n)` for t = 0..n, each from a single sin/cos call.
pub fn roots_of_unity(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|t| {
            let (s, c) = (TAU * t as f64 / n as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

/// e(t) = exp(2πit).
#[inline]
pub fn e(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// All r - 1 characters mod r, labelled by j relative to the smallest
/// primitive root: χ_j(g) = e(j/(r-1)).
#[derive(Debug, Clone)]
pub struct CharacterFamily {
    modulus: Arc<PrimeModulus>,
    order_roots: Vec<Complex64>,
    additive_roots: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Character {
    pub r: u64,
    pub j: u64,
}

impl Character {
    pub fn is_principal(&self) -> bool {
        self.j == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussData {
    pub character: Character,
    pub tau: Complex64,
    /// τ(χ)/√r.
    pub normalized: Complex64,
}

impl CharacterFamily {
    pub fn new(r: u64) -> Result<Self> {
        Ok(Self::from_modulus(Arc::new(PrimeModulus::new(r)?)))
    }

    pub fn from_modulus(modulus: Arc<PrimeModulus>) -> Self {
        let r = modulus.r() as usize;
        Self {
            order_roots: roots_of_unity(r - 1),
            additive_roots: roots_of_unity(r),
            modulus,
        }
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.modulus
    }

    pub fn r(&self) -> u64 {
        self.modulus.r()
    }

    pub fn size(&self) -> usize {
        self.order_roots.len()
    }

    pub fn character(&self, j: u64) -> Result<Character> {
        if j >= self.r() - 1 {
            return Err(Error::InvalidArgument(format!(
                "character label {j} out of range for r = {}",
                self.r()
            )));
        }
        Ok(Character { r: self.r(), j })
    }

    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        (0..self.r() - 1).map(|j| Character { r: self.r(), j })
    }

    /// `e(t/(r-1))`.
    #[inline]
    pub fn order_root(&self, t: u64) -> Complex64 {
        self.order_roots[(t % self.order_roots.len() as u64) as usize]
    }

    /// `e(t/r)` for any integer t.
    #[inline]
    pub fn additive_root(&self, t: i64) -> Complex64 {
        self.additive_roots[t.rem_euclid(self.r() as i64) as usize]
    }

    #[inline]
    pub fn value(&self, chi: Character, n: i64) -> Complex64 {
        match self.modulus.ind(n) {
            None => Complex64::new(0.0, 0.0),
            Some(t) => self.order_root(chi.j * t as u64),
        }
    }

    /// τ(χ) = Σ_{t mod r} χ(t)e(t/r), by direct summation.
    pub fn gauss_sum(&self, chi: Character) -> GaussData {
        let r = self.r() as i64;
        let tau: Complex64 = (1..r).map(|t| self.value(chi, t) * self.additive_root(t)).sum();
        GaussData {
            character: chi,
            tau,
            normalized: tau / (r as f64).sqrt(),
        }
    }

    /// (1/r) Σ_{t mod r} χ(t) e((k+m)t/r), summed directly.
    pub fn dual_coefficient(&self, chi: Character, m: i64, k: i64) -> Complex64 {
        let r = self.r() as i64;
        let a = (k + m).rem_euclid(r);
        let s: Complex64 = (1..r)
            .map(|t| self.value(chi, t) * self.additive_root(a * t % r))
            .sum();
        s / r as f64
    }

    /// The same coefficient from the Gauss sum: χ̄(k+m)τ(χ)/r when r ∤ k+m,
    /// and 𝟙_{χ=χ₀}(r-1)/r otherwise.
    #[inline]
    pub fn dual_coefficient_from_gauss(&self, gauss: &GaussData, m: i64, k: i64) -> Complex64 {
        let r = self.r() as f64;
        let chi = gauss.character;
        match self.modulus.ind(k + m) {
            None if chi.is_principal() => Complex64::new((r - 1.0) / r, 0.0),
            None => Complex64::new(0.0, 0.0),
            Some(_) => self.value(chi, k + m).conj() * gauss.tau / r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn values_mod_5() {
        let fam = CharacterFamily::new(5).unwrap();
        assert_eq!(fam.modulus().generator(), 2);
        let quad = fam.character(2).unwrap();
        let vals: Vec<f64> = (1..5).map(|n| fam.value(quad, n).re).collect();
        let expect = [1.0, -1.0, -1.0, 1.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v - e).abs() < TOL);
        }
        assert!(vals.iter().sum::<f64>().abs() < TOL);
        assert_eq!(fam.value(quad, 10), Complex64::new(0.0, 0.0));
        for chi in fam.characters() {
            assert!((fam.value(chi, 1) - 1.0).norm() < TOL);
        }
        assert!(fam.character(4).is_err());
    }

    #[test]
    fn gauss_sum_examples() {
        let fam = CharacterFamily::new(5).unwrap();
        let g = fam.gauss_sum(fam.character(2).unwrap());
        assert!((g.tau - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
        let g0 = fam.gauss_sum(fam.character(0).unwrap());
        assert!((g0.tau + 1.0).norm() < 1e-12);

        let fam = CharacterFamily::new(7).unwrap();
        for chi in fam.characters().skip(1) {
            let g = fam.gauss_sum(chi);
            assert!((g.tau.norm() - 7f64.sqrt()).abs() < 1e-10);
            assert!((g.normalized.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn orthogonality_and_multiplicativity() {
        for r in crate::arith::primes_between(3, 101) {
            let fam = CharacterFamily::new(r).unwrap();
            let r = r as i64;
            let ord = (r - 1) as f64;
            for m in 1..r {
                for n in 1..r {
                    let s: Complex64 = fam
                        .characters()
                        .map(|chi| fam.value(chi, m) * fam.value(chi, n).conj())
                        .sum::<Complex64>()
                        / ord;
                    let expect = if m == n { 1.0 } else { 0.0 };
                    assert!((s - expect).norm() < 1e-10, "r={r} m={m} n={n}");
                    for chi in [fam.character(1).unwrap(), fam.character((r as u64 - 1) / 2).unwrap()] {
                        let lhs = fam.value(chi, m * n);
                        let rhs = fam.value(chi, m) * fam.value(chi, n);
                        assert!((lhs - rhs).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicativity_every_character_mod_101() {
        let fam = CharacterFamily::new(101).unwrap();
        for chi in fam.characters() {
            for m in 1..101 {
                for n in (1..101).step_by(7) {
                    let lhs = fam.value(chi, m * n);
                    let rhs = fam.value(chi, m) * fam.value(chi, n);
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dual_coefficients_mod_7() {
        let fam = CharacterFamily::new(7).unwrap();
        let k = 3;
        let r = 7f64;
        for chi in fam.characters() {
            let gauss = fam.gauss_sum(chi);
            let mut constant: Option<Complex64> = None;
            for m in -20..20i64 {
                let direct = fam.dual_coefficient(chi, m, k);
                let closed = fam.dual_coefficient_from_gauss(&gauss, m, k);
                assert!((direct - closed).norm() < 1e-12);
                let resonant = (k + m).rem_euclid(7) == 0;
                if chi.is_principal() {
                    let expect = if resonant { (r - 1.0) / r } else { -1.0 / r };
                    assert!((direct - expect).norm() < 1e-12);
                } else if resonant {
                    assert!(direct.norm() < 1e-12);
                } else {
                    assert!((direct.norm() - 1.0 / r.sqrt()).abs() < 1e-10);
                    // χ(k+m) f̂ is the same for every m
                    let c = direct * fam.value(chi, k + m);
                    match constant {
                        None => constant = Some(c),
                        Some(c0) => assert!((c - c0).norm() < 1e-10),
                    }
                }
            }
            if let Some(c) = constant {
                assert!((c - gauss.normalized / r.sqrt()).norm() < 1e-10);
            }
        }
    }
}
