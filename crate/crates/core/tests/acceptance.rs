//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};

use perc::crossing::Event;
use perc::estimate::{self, threshold_window, Estimate, ThresholdOptions};
use perc::lattice::{Rect, Region};
use perc::oracle::{self, DEFAULT_CAP};
use perc::renorm::{self, IterationMap};
use perc::rsw;

const SEED: u64 = 20_240_601;

fn q(s: &str) -> BigRational {
    s.parse().unwrap()
}

fn rect(k: usize, l: usize) -> Rect {
    Rect::with_size(k, l).unwrap()
}

/// `a` lies strictly below `b` with disjoint 95% intervals.
fn below(a: &Estimate, b: &Estimate) -> bool {
    a.ci_hi < b.ci_lo
}

type Verdict = (bool, String);

fn c1() -> Verdict {
    let t = Instant::now();
    let a = oracle::verify_duality_exhaustive(&rect(2, 1), DEFAULT_CAP).unwrap();
    let b = oracle::verify_duality_exhaustive(&rect(3, 2), DEFAULT_CAP).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let ok = a.checked == 128 && b.checked == 131_072 && a.passed() && b.passed() && secs < 30.0;
    (
        ok,
        format!(
            "2x1: {} configs, {} violations, {} interface mismatches; 3x2: {} configs, {} violations, {} interface mismatches; {secs:.2}s",
            a.checked, a.violations, a.interface_mismatches, b.checked, b.violations, b.interface_mismatches
        ),
    )
}

fn c2() -> Verdict {
    let half = q("1/2");
    let mut ok = true;
    let mut detail = Vec::new();
    for (k, l) in [(2, 1), (3, 2)] {
        let r: Region = rect(k, l).into();
        let pr = oracle::exact_count(&r, &Event::H(rect(k, l)), DEFAULT_CAP).unwrap().probability(&half);
        ok &= pr == half;
        detail.push(format!("Pr(H {k}x{l}) = {pr}"));
    }
    let mut identities = 0;
    for k in 2..=3 {
        for l in 2..=3 {
            for p in ["1/4", "1/2", "3/4"] {
                let rep = oracle::verify_self_duality(k, l, &q(p), DEFAULT_CAP).unwrap();
                ok &= rep.holds && rep.polynomial_identity;
            }
            identities += 1;
        }
    }
    detail.push(format!("{identities} polynomial identities (k, l in 2..=3)"));
    (ok, detail.join("; "))
}

fn c3() -> Verdict {
    let pairs = oracle::harris_pairs();
    let mut ok = true;
    let mut checked = 0;
    let mut small = 0;
    for (region, a, b) in &pairs {
        if region.edge_count() <= 12 {
            small += 1;
        }
        for p in ["1/4", "1/2", "3/4"] {
            let rep = oracle::verify_harris(region, a, b, &q(p), DEFAULT_CAP).unwrap();
            ok &= rep.holds;
            checked += 1;
        }
    }
    let sq = rect(1, 1);
    let eq = oracle::verify_harris(&sq.into(), &Event::H(sq), &Event::V(sq), &q("1/2"), DEFAULT_CAP).unwrap();
    let equality = eq.lhs == q("9/16") && eq.rhs == q("9/16");
    ok &= small >= 5 && equality;
    (ok, format!("{checked} checks over {} pairs ({small} on <= 12 edges); unit square H,V: {} = {}", pairs.len(), eq.lhs, eq.rhs))
}

fn c4() -> Verdict {
    let mut ok = true;
    let mut n_exact = 0;
    for (m, n) in [(1, 1), (2, 1)] {
        for p in ["1/4", "1/2", "3/4"] {
            let rep = oracle::verify_lemma_x(m, n, &q(p), DEFAULT_CAP).unwrap();
            ok &= rep.holds;
            n_exact += 1;
        }
    }
    let mc = rsw::lemma_x_mc(8, 8, 0.5, 100_000, SEED).unwrap();
    ok &= mc.holds;
    (
        ok,
        format!(
            "{n_exact} exact checks; (8,8) MC: X = {:.4}, H V / 2 = {:.4}",
            mc.x.p_hat,
            mc.h.p_hat * mc.v.p_hat / 2.0
        ),
    )
}

fn c5() -> Verdict {
    let a = oracle::verify_leftmost_measurability(1, DEFAULT_CAP).unwrap();
    let b = oracle::verify_leftmost_measurability(2, DEFAULT_CAP).unwrap();
    (
        a.violations == 0 && b.violations == 0 && a.flips > 0 && b.flips > 0,
        format!("1x1: {} flips, {} violations; 2x2: {} flips, {} violations", a.flips, a.violations, b.flips, b.violations),
    )
}

fn c6() -> Verdict {
    let bounds = rsw::chain_bounds(1, 3).unwrap();
    let at = |m: usize| bounds.iter().find(|b| b.multiple == m).unwrap().bound();
    let exact = at(3) == 1.0 / 128.0 && at(5) == 2f64.powi(-19);
    let samples = 20_000;
    let a = rsw::check_chain(8, 0.5, samples, SEED).unwrap();
    let b = rsw::check_chain(16, 0.5, samples, SEED).unwrap();
    let diff = a.rows.iter().zip(&b.rows).map(|(x, y)| (x.estimate.p_hat - y.estimate.p_hat).abs()).fold(0.0, f64::max);
    let ok = exact && a.pass && b.pass && diff < 0.1;
    let fmt = |r: &rsw::RswReport| r.rows.iter().map(|row| format!("{:.3}", row.estimate.p_hat)).collect::<Vec<_>>().join("/");
    (ok, format!("bounds 1/128, 2^-19 exact: {exact}; n=8: {}; n=16: {}; max diff {diff:.3}", fmt(&a), fmt(&b)))
}

fn c7() -> Verdict {
    let quintic = renorm::fixed_point(IterationMap::Quintic, 1e-6).unwrap();
    let quartic = renorm::fixed_point(IterationMap::Quartic, 1e-6).unwrap();
    // Stated digits are truncated, not rounded: 0.9205... reads as 0.920.
    let digits = |x: f64| (x * 1000.0).floor() as u32;
    (digits(quintic) == 951 && digits(quartic) == 920, format!("quintic {quintic:.6}, quartic {quartic:.6}"))
}

fn c8() -> Verdict {
    let mut ok = true;
    let mut detail = Vec::new();
    for p0 in [0.99, 0.995, 0.999] {
        let closed = renorm::one_dep_series(p0).unwrap();
        let partial = renorm::one_dep_partial(p0, 400);
        let gap = (closed - partial).abs();
        ok &= gap < 1e-9;
        // The tail beyond 400 terms is about 5e-6 at 0.99, so the longer sum
        // is shown beside it.
        let long = (closed - renorm::one_dep_partial(p0, 2000)).abs();
        detail.push(format!("p0={p0}: |closed - partial_400| = {gap:.2e} (partial_2000: {long:.2e})"));
    }
    let diverges = [80.0 / 81.0, 0.98, 0.5].iter().all(|&p0| renorm::one_dep_series(p0).is_err());
    let t1 = renorm::series_threshold(1e-9).unwrap();
    let t2 = renorm::series_threshold(1e-9).unwrap();
    let reproducible = (t1 - t2).abs() < 1e-6 && (t1 - 0.998917).abs() < 1e-6;
    ok &= diverges && reproducible;
    detail.push(format!("divergence reported: {diverges}; threshold {t1:.7}"));
    (ok, detail.join("; "))
}

fn c9() -> Verdict {
    let a = rsw::covering_check(1);
    let b = rsw::covering_check(2);
    let mut family = rsw::covering_family(1);
    family.remove(9);
    let mutant = rsw::check_covering(1, &family);
    (
        a.passed() && b.passed() && mutant.uncovered.is_some(),
        format!("n=1: {} positions covered; n=2: {} positions covered; mutant witness {:?}", a.positions, b.positions, mutant.uncovered),
    )
}

fn c10() -> Verdict {
    let rep = rsw::sqrt_trick_check(1, 0.5, 100_000, SEED, 10_000).unwrap();
    (
        rep.holds && rep.audit_violations == 0,
        format!(
            "Pr(E^c) = {:.4} >= Pr(E1^c)^128 = {:.3e} (Pr(E1^c) = {:.4}); audit {} samples, {} violations",
            rep.none_crossed.p_hat, rep.bound, rep.first_not_crossed.p_hat, rep.audited, rep.audit_violations
        ),
    )
}

fn c11() -> Verdict {
    let audit = renorm::embedding_audit(5, 8, 8, 0.6, 1000, SEED).unwrap();
    let mut exact = true;
    for p in ["1/4", "1/2", "3/5", "3/4"] {
        let r = renorm::product_law_exact(&q(p)).unwrap();
        exact &= r.joint == r.product && !r.joint.is_zero() && r.joint != BigRational::one();
    }
    let a = perc::lattice::Edge::horizontal(0, 0);
    let b = perc::lattice::Edge::horizontal(2, 0);
    let corr = renorm::coarse_pair_correlation(5, a, b, 0.6, 10_000, SEED).unwrap();
    (
        audit.violations == 0 && audit.samples == 1000 && exact && corr.contains_zero,
        format!(
            "{} pairs audited, {} violations; exact product law: {exact}; correlation {:.4} in [{:.4}, {:.4}]",
            audit.pairs_checked, audit.violations, corr.correlation, corr.ci.0, corr.ci.1
        ),
    )
}

fn c12() -> Verdict {
    let t = Instant::now();
    let mut detail = Vec::new();
    let mut ok = true;

    let opts = ThresholdOptions { seed: SEED, ..ThresholdOptions::default() };
    let mut brackets = Vec::new();
    for n in [8, 16, 32] {
        let r: Region = rect(n, n).into();
        let w = threshold_window(&r, &Event::H(rect(n, n)), 0.25, &opts).unwrap();
        ok &= !w.lower.inconclusive && !w.upper.inconclusive;
        brackets.push(w.width_bracket);
    }
    ok &= brackets.windows(2).all(|w| w[1].1 < w[0].0);
    detail.push(format!(
        "window {}",
        brackets.iter().map(|b| format!("[{:.4}, {:.4}]", b.0, b.1)).collect::<Vec<_>>().join(" > ")
    ));

    let samples = 100_000;
    for (p, rising) in [(0.6, true), (0.4, false)] {
        let ests: Vec<Estimate> = [16, 32, 64]
            .iter()
            .map(|&n| estimate::mc_probability(&rect(n, n).into(), &Event::H(rect(n, n)), p, samples, SEED).unwrap())
            .collect();
        let trend = ests.windows(2).all(|w| if rising { below(&w[0], &w[1]) } else { below(&w[1], &w[0]) });
        ok &= trend;
        detail.push(format!("Pr_{p} {}", ests.iter().map(|e| format!("{:.5}", e.p_hat)).collect::<Vec<_>>().join("/")));
    }

    let theta: Vec<Estimate> = [8, 16, 32, 64]
        .iter()
        .map(|&l| estimate::origin_cluster(l, 0.5, samples, SEED).unwrap().boundary)
        .collect();
    ok &= theta.windows(2).all(|w| below(&w[1], &w[0]));
    detail.push(format!("theta {}", theta.iter().map(|e| format!("{:.4}", e.p_hat)).collect::<Vec<_>>().join("/")));
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    detail.push(format!("{secs:.0}s"));
    (ok, detail.join("; "))
}

fn c13() -> Verdict {
    let sq = rect(1, 1);
    let region: Region = sq.into();
    let exact = oracle::ratio_f64(&oracle::exact_count(&region, &Event::H(sq), DEFAULT_CAP).unwrap().probability(&q("1/2")));
    let covered = (0..200)
        .filter(|&k| estimate::mc_probability(&region, &Event::H(sq), 0.5, 1000, estimate::point_seed(SEED, k)).unwrap().contains(exact))
        .count();
    (covered >= 186, format!("{covered}/200 intervals cover {exact}"))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 13] = [
        ("exactly-one duality", c1),
        ("self-duality exact values", c2),
        ("Harris inequality", c3),
        ("X-event inequality", c4),
        ("left-most crossing measurability", c5),
        ("long-rectangle chain", c6),
        ("renormalization fixed points", c7),
        ("1-dependent series", c8),
        ("covering", c9),
        ("square-root trick", c10),
        ("coarse-graining", c11),
        ("threshold and theta trends", c12),
        ("estimator calibration", c13),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
