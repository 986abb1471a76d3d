use anyhow::{bail, Context, Result};
use serde::Serialize;

use mixsum::arith::{is_prime, primes_between};
use mixsum::diophantine::Theta;
use mixsum::weight::WeightFunction;

pub fn theta(spec: &str, bits: u32) -> Result<Theta> {
    Theta::parse(spec, bits).with_context(|| format!("--theta: cannot use {spec:?}"))
}

pub fn weight(spec: &str) -> Result<WeightFunction> {
    WeightFunction::parse(spec).with_context(|| "--weight".to_string())
}

pub fn prime(field: &str, r: u64) -> Result<u64> {
    if r < 3 || !is_prime(r) {
        bail!("{field}: {r} is not an odd prime");
    }
    Ok(r)
}

/// `1009,10007` or `primes-up-to:N`.
pub fn r_grid(spec: &str) -> Result<Vec<u64>> {
    if let Some(n) = spec.strip_prefix("primes-up-to:") {
        let n: u64 = n.trim().parse().with_context(|| format!("--r-grid: bad bound in {spec:?}"))?;
        let ps = primes_between(3, n);
        if ps.is_empty() {
            bail!("--r-grid: no odd primes up to {n}");
        }
        return Ok(ps);
    }
    spec.split(',')
        .map(|s| {
            let r: u64 = s.trim().parse().with_context(|| format!("--r-grid: {s:?} is not an integer"))?;
            prime("--r-grid", r)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", content = "value", rename_all = "lowercase")]
pub enum XRule {
    Absolute(f64),
    /// x = r.
    R,
    /// x = ⌈c·r⌉.
    Frac(f64),
    /// x = ⌈r^p⌉.
    Pow(f64),
}

impl XRule {
    pub fn parse(spec: &str) -> Result<Self> {
        let num = |s: &str| -> Result<f64> {
            let v: f64 = s.trim().parse().with_context(|| format!("--x-rule: {spec:?}"))?;
            if !(v.is_finite() && v > 0.0) {
                bail!("--x-rule: {spec:?} must be positive");
            }
            Ok(v)
        };
        let rule = match spec.split_once(':') {
            None if spec.trim() == "r" => XRule::R,
            None => XRule::Absolute(num(spec)?),
            Some(("frac", v)) => XRule::Frac(num(v)?),
            Some(("pow", v)) => XRule::Pow(num(v)?),
            Some(_) => bail!("--x-rule: expected N, r, frac:c or pow:p, got {spec:?}"),
        };
        if let XRule::Absolute(x) = rule {
            if x < 1.0 {
                bail!("--x-rule: x = {x} is below 1");
            }
        }
        Ok(rule)
    }

    pub fn x(&self, r: u64) -> f64 {
        let rf = r as f64;
        match *self {
            XRule::Absolute(x) => x,
            XRule::R => rf,
            XRule::Frac(c) => (c * rf).ceil(),
            XRule::Pow(p) => rf.powf(p).ceil(),
        }
    }
}

/// The dyadic scheme needs 3δ + 4 < 4A.
pub fn dyadic_exponents(delta: f64, a: f64) -> Result<()> {
    if !(delta > 0.0) {
        bail!("--delta: must be positive, got {delta}");
    }
    if !(3.0 * delta + 4.0 < 4.0 * a) {
        bail!("--delta/--A: need 3δ+4 < 4A, got 3·{delta}+4 = {} >= 4·{a} = {}", 3.0 * delta + 4.0, 4.0 * a);
    }
    Ok(())
}

pub fn positive(field: &str, v: f64) -> Result<f64> {
    if !(v.is_finite() && v > 0.0) {
        bail!("{field}: must be positive, got {v}");
    }
    Ok(v)
}

pub fn u64_list(field: &str, spec: &str) -> Result<Vec<u64>> {
    spec.split(',')
        .map(|s| s.trim().parse::<u64>().with_context(|| format!("{field}: {s:?} is not a non-negative integer")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_rules() {
        assert_eq!(XRule::parse("r").unwrap().x(1009), 1009.0);
        assert_eq!(XRule::parse("60").unwrap().x(101), 60.0);
        assert_eq!(XRule::parse("frac:0.5").unwrap().x(1009), 505.0);
        assert_eq!(XRule::parse("pow:0.6").unwrap().x(1009), 64.0);
        assert!(XRule::parse("pow:-1").is_err());
        assert!(XRule::parse("half").is_err());
        assert!(XRule::parse("0.5").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(r_grid("1009, 10007").unwrap(), vec![1009, 10007]);
        assert_eq!(r_grid("primes-up-to:13").unwrap(), vec![3, 5, 7, 11, 13]);
        assert!(r_grid("1001").is_err());
        assert!(r_grid("2").is_err());
    }

    #[test]
    fn exponents() {
        assert!(dyadic_exponents(0.1, 2.0).is_ok());
        let msg = dyadic_exponents(2.0, 1.0).unwrap_err().to_string();
        assert!(msg.contains("3δ+4 < 4A"));
    }
}
