use anyhow::{bail, Result};
use serde_json::json;

use mixsum::arith::{gcd_u64, tau};
use mixsum::characters::{Character, CharacterFamily};
use mixsum::counting::{
    clean_counting_harness, count_n4, count_nsp, dyadic_tail, injection_check, interval, n4_diagonal, n_brute_all, n_fast,
    pigeonhole_brute, pigeonhole_count,
};
use mixsum::diophantine::{check_condition, continued_fraction, curly_l, reduce_mod_r, Verdict};
use mixsum::dual::{dyadic_m4_assembly, poisson_residuals, principal_tail, DualSetup};
use mixsum::shortsum::{case_decomposition, offdiag_sum};
use mixsum::sums::{distribution_probe, family_sums, moments as moment_report};
use mixsum::verify::{identity_suite, run as run_criterion, CRITERIA};

use crate::config::{self, XRule};
use crate::output::{row, Report};
use crate::{CountCommand, DiophArgs, DistArgs, MomentsArgs, PoissonArgs, ShortsumArgs, VerifyArgs};

pub fn moments(a: &MomentsArgs, bits: u32) -> Result<Report> {
    let theta = config::theta(&a.theta, bits)?;
    let w = config::weight(&a.weight)?;
    let rs = config::r_grid(&a.r_grid)?;
    let rule = XRule::parse(&a.x_rule)?;
    let mut rep = Report::default();
    let mut all = Vec::new();
    for r in rs {
        let fam = CharacterFamily::new(r)?;
        let x = rule.x(r);
        let m = moment_report(&family_sums(&fam, x, &theta, &w), &w);
        if x < r as f64 {
            rep.check(m.second_rel_error < 1e-10, || {
                format!("r={r} x={x}: second moment relative error {:.3e}", m.second_rel_error)
            });
        }
        rep.check(m.cauchy_schwarz, || format!("r={r} x={x}: Cauchy-Schwarz"));
        rep.check(m.holder, || format!("r={r} x={x}: Hölder"));
        rep.rows.push(row(json!({
            "r": r,
            "x": x,
            "theta": m.theta,
            "weight": m.weight,
            "first": m.first,
            "second": m.second,
            "fourth": m.fourth,
            "first_over_sqrt_x": m.first_over_sqrt_x,
            "second_over_x": m.second_over_x,
            "fourth_over_x2": m.fourth_over_x2,
            "first_over_rms": m.first_over_rms,
            "second_rel_error": m.second_rel_error,
        })));
        all.push(m);
    }
    rep.results = json!(all);
    Ok(rep)
}

pub fn poisson(a: &PoissonArgs, bits: u32) -> Result<Report> {
    config::dyadic_exponents(a.delta, a.a)?;
    let r = config::prime("--r", a.r)?;
    let x = config::positive("--x", a.x)?;
    if x < 1.0 {
        bail!("--x: must be at least 1");
    }
    let theta = config::theta(&a.theta, bits)?;
    let w = config::weight(&a.weight)?;
    if !w.is_smooth() {
        bail!("--weight: the Poisson identity needs the smooth bump weight");
    }
    if a.characters == 0 || a.characters > (r - 1) as usize {
        bail!("--characters: must lie in [1, {}]", r - 1);
    }
    let fam = CharacterFamily::new(r)?;
    let setup = DualSetup::new(r, x, &theta, a.delta, a.j_max)?;
    let m_max = a.m_max.unwrap_or_else(|| (100.0 * setup.base()).ceil() as i64);
    if (m_max as f64) < r as f64 / x {
        bail!("--m-max: {m_max} is below r/x = {:.3}", r as f64 / x);
    }
    let step = (r as usize - 1) / a.characters;
    let chars: Vec<Character> = (0..a.characters)
        .map(|i| fam.character((i * step) as u64))
        .collect::<std::result::Result<_, _>>()?;
    let res = poisson_residuals(&fam, &chars, &setup, &w, &theta, m_max)?;
    let mut rep = Report::default();
    let limit = 1e-6 * x.sqrt();
    for p in &res {
        rep.check(p.residual <= limit, || {
            format!("character j={}: residual {:.3e} > {limit:.3e}", p.character.j, p.residual)
        });
        rep.rows.push(row(json!({
            "r": r,
            "x": x,
            "j": p.character.j,
            "m_max": p.m_max,
            "lhs_re": p.lhs.re,
            "lhs_im": p.lhs.im,
            "rhs_re": p.rhs.re,
            "rhs_im": p.rhs.im,
            "residual": p.residual,
            "quadrature_error": p.quadrature_error,
        })));
    }
    let tail = principal_tail(&fam, &setup, &w, a.a)?;
    let assembly = dyadic_m4_assembly(&fam, &setup, &w, a.a)?;
    rep.check(assembly.holder_violations == 0, || {
        format!("{} characters violate the Hölder split", assembly.holder_violations)
    });
    rep.check(assembly.measured_truncated <= assembly.holder_bound * (1.0 + 1e-9), || {
        "truncated fourth moment exceeds the level bound".to_string()
    });
    rep.results = json!({"setup": setup, "residuals": res, "principal_tail": tail, "dyadic": assembly});
    Ok(rep)
}

pub fn count(c: &CountCommand, bits: u32) -> Result<Report> {
    let mut rep = Report::default();
    match c {
        CountCommand::N { q_max } => {
            if *q_max == 0 || *q_max > 2000 {
                bail!("--q-max: must lie in [1, 2000]");
            }
            for q in 1..=*q_max {
                let brute = n_brute_all(q);
                for d in 0..q {
                    let n = n_fast(d as i64, q);
                    let bound = tau(gcd_u64(d, q))? * q;
                    rep.check(n == brute[d as usize], || format!("N({d},{q}): fast {n} != brute {}", brute[d as usize]));
                    rep.check(n <= bound, || format!("N({d},{q}) = {n} exceeds τ(gcd)·q = {bound}"));
                    rep.rows.push(row(json!({"q": q, "d": d, "count": n, "bound": bound})));
                }
            }
            rep.results = json!(rep.rows);
        }
        CountCommand::Nsp { s, p, t, box_constant } => {
            config::positive("--box-constant", *box_constant)?;
            let r = count_nsp(*s, *p, *t, *box_constant)?;
            rep.rows.push(row(json!({"S": s, "P": p, "T": t, "count": r.count, "bound": r.bound, "ratio": r.ratio})));
            rep.results = json!(r);
        }
        CountCommand::N4 { theta, r, lo, hi } => {
            let r = config::prime("--r", *r)?;
            if lo > hi || hi - lo > 2000 {
                bail!("--lo/--hi: need lo <= hi and at most 2001 members");
            }
            let th = config::theta(theta, bits)?;
            let k = reduce_mod_r(&th, r)?.k as i64;
            let members = interval(*lo, *hi);
            let report = count_n4(&members, k, r)?;
            let diagonal = n4_diagonal(&members, k, r);
            rep.check(report.count >= diagonal, || format!("count {} below the diagonal {diagonal}", report.count));
            rep.rows.push(row(json!({"r": r, "k": k, "lo": lo, "hi": hi, "count": report.count, "diagonal": diagonal,
                "bound": report.bound, "ratio": report.ratio})));
            rep.results = json!(report);
        }
        CountCommand::Pigeonhole { theta, r, m, n, c } => {
            let r = config::prime("--r", *r)?;
            let th = config::theta(theta, bits)?;
            let k = reduce_mod_r(&th, r)?.k as i64;
            let p = pigeonhole_count(*n, *m, k, r, config::positive("--c", *c)?, Some(&th))?;
            if !p.in_regime {
                log::warn!("outside r > M >= N >= 1; the bound is not expected to hold");
            }
            if n.saturating_mul(*m) <= 50_000_000 {
                let brute = pigeonhole_brute(*n, *m, k, r);
                rep.check(brute == p.report.count, || format!("fast {} != brute {brute}", p.report.count));
            }
            if let (Some(w), true) = (&p.witness, p.in_regime) {
                rep.check(w.holds, || format!("witness q={} misses 3M/r", w.q));
            }
            rep.rows.push(row(json!({"r": r, "k": k, "M": m, "N": n, "count": p.report.count,
                "bound": p.report.bound, "ratio": p.report.ratio, "in_regime": p.in_regime})));
            rep.results = json!(p);
        }
        CountCommand::Clean { theta, r, t, box_constant } => {
            let r = config::prime("--r", *r)?;
            if *t == 0 || *t > 300 {
                bail!("--t: the exact path needs 1 <= T <= 300");
            }
            let th = config::theta(theta, bits)?;
            let k = reduce_mod_r(&th, r)?.k as i64;
            let c = clean_counting_harness(*t, r, k, config::positive("--box-constant", *box_constant)?)?;
            rep.rows.push(row(json!({"T": t, "r": r, "k": k, "count": c.report.count, "bound": c.report.bound,
                "ratio": c.report.ratio, "admissible_pairs": c.admissible_pairs})));
            rep.results = json!(c);
        }
        CountCommand::Injection { bound } => {
            if *bound < 0 || *bound > 20 {
                bail!("--bound: must lie in [0, 20]");
            }
            let i = injection_check(*bound);
            rep.check(i.surface_violations == 0, || format!("{} off the surface", i.surface_violations));
            rep.check(i.identity_violations == 0, || format!("{} identity violations", i.identity_violations));
            rep.check(i.collisions == 0, || format!("{} collisions", i.collisions));
            rep.rows.push(row(json!(i)));
            rep.results = json!(i);
        }
        CountCommand::Dyadic { s_min, s_max, terms } => {
            if s_min > s_max {
                bail!("--s-min: exceeds --s-max");
            }
            let mut all = Vec::new();
            for s in *s_min..=*s_max {
                let d = dyadic_tail(s, s.max(1) + terms)?;
                rep.check(d.ratio <= 4.0, || format!("D({s})/max(1,s) = {:.4}", d.ratio));
                rep.rows.push(row(json!({"s": s, "value": d.value, "uncertainty": d.uncertainty, "ratio": d.ratio})));
                all.push(d);
            }
            rep.results = json!(all);
        }
    }
    Ok(rep)
}

pub fn dioph(a: &DiophArgs, bits: u32) -> Result<Report> {
    let theta = config::theta(&a.theta, bits)?;
    config::positive("--constant", a.constant)?;
    let cf = continued_fraction(&theta, a.depth)?;
    let cond = check_condition(&theta, a.constant, a.q_max)?;
    let l = match a.x {
        Some(x) => {
            config::positive("--eps", a.eps)?;
            Some(curly_l(&theta, x, a.eps)?)
        }
        None => None,
    };
    let mut rep = Report::default();
    rep.check(cond.verdict != Verdict::Fail, || {
        format!("condition fails first at q = {:?}", cond.first_failure)
    });
    for (i, (q, (p, qq))) in cf.quotients.iter().zip(&cf.convergents).enumerate() {
        rep.rows.push(row(json!({"index": i, "quotient": q.to_string(), "p": p.to_string(), "q": qq.to_string()})));
    }
    rep.results = json!({"theta": theta.label(), "continued_fraction": cf, "condition": cond, "curly_l": l});
    Ok(rep)
}

pub fn shortsum(a: &ShortsumArgs, bits: u32) -> Result<Report> {
    let theta = config::theta(&a.theta, bits)?;
    let xs = config::u64_list("--x", &a.x)?;
    if let Some(&bad) = xs.iter().find(|&&x| !(2..=1_000_000).contains(&x)) {
        bail!("--x: {bad} outside [2, 10^6]");
    }
    let mut rep = Report::default();
    let mut all = Vec::new();
    for x in xs {
        if x >= 16 {
            let c = case_decomposition(x, &theta, a.eps)?;
            rep.check(c.relative_error <= 1e-9, || {
                format!("x={x}: S1 + S2 - S3 differs from the sum by {:.3e}", c.relative_error)
            });
            rep.rows.push(row(json!({"x": x, "theta": c.theta, "offdiag_re": c.offdiag.re, "offdiag_im": c.offdiag.im,
                "case1": c.s1(), "case2": c.s2(), "case3": c.s3(), "ratio_to_x2": c.ratio_to_x2})));
            all.push(json!(c));
        } else {
            let v = offdiag_sum(x, &theta);
            let ratio = v.norm() / (x as f64).powi(2);
            rep.rows.push(row(json!({"x": x, "theta": theta.label(), "offdiag_re": v.re, "offdiag_im": v.im,
                "case1": null, "case2": null, "case3": null, "ratio_to_x2": ratio})));
            all.push(json!({"x": x, "offdiag": v, "ratio_to_x2": ratio}));
        }
    }
    rep.results = json!(all);
    Ok(rep)
}

pub fn dist(a: &DistArgs, bits: u32) -> Result<Report> {
    let theta = config::theta(&a.theta, bits)?;
    let r = config::prime("--r", a.r)?;
    let x = XRule::parse(&a.x_rule)?.x(r);
    let w = config::weight(&a.weight)?;
    let fam = CharacterFamily::new(r)?;
    let probe = distribution_probe(&family_sums(&fam, x, &theta, &w));
    let mut rep = Report::default();
    rep.rows.push(row(json!({"r": r, "x": x, "mean_abs": probe.mean_abs, "gaussian_mean_abs": probe.gaussian_mean_abs,
        "mean_abs_4": probe.mean_abs_4, "gaussian_mean_abs_4": probe.gaussian_mean_abs_4,
        "mean_re": probe.mean.re, "mean_im": probe.mean.im, "mean_sq_re": probe.mean_sq.re, "mean_sq_im": probe.mean_sq.im,
        "ks_exponential": probe.ks_exponential})));
    rep.results = json!(probe);
    Ok(rep)
}

pub fn verify(a: &VerifyArgs, bits: u32) -> Result<Report> {
    let mut rep = Report::default();
    match (&a.theta, a.r, a.x) {
        (None, None, None) => {
            let ids: Vec<u8> = if a.criteria.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { a.criteria.clone() };
            if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|c| c.0 == **id)) {
                bail!("--criteria: no criterion {bad}");
            }
            let mut all = Vec::new();
            for id in ids {
                let o = run_criterion(id);
                log::info!("{}", o.line());
                rep.check(o.passed, || format!("criterion {id} ({}): {}", o.title, o.summary));
                rep.rows.push(row(json!({"id": o.id, "title": o.title, "passed": o.passed, "summary": o.summary})));
                // timings stay out of the report so reruns compare byte for byte
                all.push(json!({"id": o.id, "title": o.title, "passed": o.passed, "summary": o.summary,
                    "budget_seconds": o.budget_seconds, "details": o.details}));
            }
            rep.results = json!(all);
        }
        (theta, Some(r), Some(x)) => {
            if !a.criteria.is_empty() {
                bail!("--criteria: cannot be combined with --r/--x");
            }
            let theta = config::theta(theta.as_deref().unwrap_or("quad:-1,2,1"), bits)?;
            let r = config::prime("--r", r)?;
            let x = config::positive("--x", x)?;
            if x < 1.0 {
                bail!("--x: must be at least 1");
            }
            let w = config::weight(&a.weight)?;
            let s = identity_suite(&theta, r, x, &w)?;
            rep.check(s.passed, || {
                format!("identity suite: second moment {:.3e}, Parseval {:.3e}", s.second_rel_error, s.parseval_rel_error)
            });
            rep.rows.push(row(json!({"r": r, "x": x, "theta": s.theta, "second_rel_error": s.second_rel_error,
                "parseval_rel_error": s.parseval_rel_error, "poisson_max_residual": s.poisson_max_residual, "passed": s.passed})));
            rep.results = json!(s);
        }
        _ => bail!("--r/--x: give both (with optional --theta) or neither"),
    }
    Ok(rep)
}
