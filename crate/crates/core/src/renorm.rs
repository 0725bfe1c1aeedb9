//! Renormalization: recursion maps for crossing probabilities of doubling
//! rectangles, the 1-dependent series bound, and coarse-graining of a fine
//! configuration through the event G(R).

use std::collections::HashSet;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{check_probability, Configuration, EdgeStream};
use crate::crossing::{clusters, crossing, detect_g, rect_union_find, Event};
use crate::error::{Error, Result};
use crate::estimate::{Estimate, Z95};
use crate::lattice::{Edge, EdgeId, Orientation, Rect, Region, Vertex};
use crate::oracle::{joint_and_product, ProductReport};

/// Density above which a 1-dependent bond measure percolates, as cited
/// from the literature. Not derived here.
pub const P0_CITED: f64 = 0.8639;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IterationMap {
    /// `x -> 1 - (1 - x^5)^2`
    Quintic,
    /// `x -> 1 - (1 - x^4)^2`
    Quartic,
}

impl IterationMap {
    pub fn apply(self, x: f64) -> f64 {
        let y = match self {
            IterationMap::Quintic => x.powi(5),
            IterationMap::Quartic => x.powi(4),
        };
        1.0 - (1.0 - y) * (1.0 - y)
    }

    pub fn name(self) -> &'static str {
        match self {
            IterationMap::Quintic => "quintic",
            IterationMap::Quartic => "quartic",
        }
    }
}

impl std::str::FromStr for IterationMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quintic" => Ok(IterationMap::Quintic),
            "quartic" => Ok(IterationMap::Quartic),
            _ => Err(Error::InvalidArgument(format!("unknown map `{s}` (expected quintic or quartic)"))),
        }
    }
}

const SCAN_STEP: f64 = 1e-3;

/// Largest root of `f(x) = x` in `(0, 1)`: scan down from 1 for the first
/// sign change of `f(x) - x`, then bisect to `tolerance`.
pub fn fixed_point(map: IterationMap, tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
    }
    let g = |x: f64| map.apply(x) - x;
    let steps = (1.0 / SCAN_STEP).round() as usize;
    let mut prev = 1.0 - SCAN_STEP;
    for i in 2..steps {
        let x = 1.0 - i as f64 * SCAN_STEP;
        if g(x) == 0.0 {
            return Ok(x);
        }
        if g(x) < 0.0 && g(prev) > 0.0 {
            let (mut lo, mut hi) = (x, prev);
            while hi - lo > tolerance {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = x;
    }
    Err(Error::NoFixedPoint)
}

pub fn iterate(map: IterationMap, x0: f64, k: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(Error::InvalidArgument(format!("starting point {x0} outside [0, 1]")));
    }
    let mut out = Vec::with_capacity(k + 1);
    out.push(x0);
    for _ in 0..k {
        let x = map.apply(*out.last().unwrap());
        out.push(x);
    }
    Ok(out)
}

/// `1 - x_k <= 2^-k / 50` along a sequence, the decay promised by the
/// quintic map when `1 - x_0 <= 1/50`.
pub fn decay_bound_holds(seq: &[f64]) -> bool {
    seq.iter().enumerate().all(|(k, x)| 1.0 - x <= 0.5f64.powi(k as i32) / 50.0 + 1e-15)
}

/// Geometric ratio `3 (1 - p0)^(1/4)` of the circuit-counting series.
pub fn series_ratio(p0: f64) -> f64 {
    3.0 * (1.0 - p0).powf(0.25)
}

/// `sum_{l >= 4} l q^l` with `q = 3 (1 - p0)^(1/4)`, in closed form.
pub fn one_dep_series(p0: f64) -> Result<f64> {
    check_probability(p0)?;
    let q = series_ratio(p0);
    if p0 <= 80.0 / 81.0 || q >= 1.0 {
        return Err(Error::Divergent { p0, ratio: q });
    }
    Ok(q / ((1.0 - q) * (1.0 - q)) - q - 2.0 * q * q - 3.0 * q * q * q)
}

/// The same series summed term by term up to `l = terms`.
pub fn one_dep_partial(p0: f64, terms: usize) -> f64 {
    let q = series_ratio(p0);
    (4..=terms).map(|l| l as f64 * q.powi(l as i32)).sum()
}

/// The `p0` at which the series equals 1, by bisection on the closed form.
pub fn series_threshold(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
    }
    let (mut lo, mut hi) = (80.0 / 81.0, 1.0);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        match one_dep_series(mid) {
            Ok(v) if v <= 1.0 => hi = mid,
            _ => lo = mid,
        }
    }
    Ok(hi)
}

/// `i_n^(3/2) >= p0`.
pub fn crossing_suffices(i_n: f64, p0: f64) -> bool {
    i_n.powf(1.5) >= p0
}

/// Smallest `i_n` with `i_n^(3/2) >= p0`.
pub fn required_crossing(p0: f64) -> f64 {
    p0.powf(2.0 / 3.0)
}

/// Fine rectangle behind a coarse edge: `[2nx, 2nx + 3n] x [2ny, 2ny + n]`
/// for `(x, y)-(x + 1, y)`, and its transpose for vertical edges.
pub fn coarse_edge_rect(e: &Edge, n: usize) -> Rect {
    let (n, a) = (n as i64, e.anchor);
    let (x0, y0) = (2 * n * a.x, 2 * n * a.y);
    match e.orientation {
        Orientation::Horizontal => Rect::new(x0, y0, x0 + 3 * n, y0 + n),
        Orientation::Vertical => Rect::new(x0, y0, x0 + n, y0 + 3 * n),
    }
    .expect("n >= 1")
}

/// The `n` by `n` square of a coarse vertex.
pub fn anchor_square(v: Vertex, n: usize) -> Rect {
    let n = n as i64;
    Rect::new(2 * n * v.x, 2 * n * v.y, 2 * n * v.x + n, 2 * n * v.y + n).expect("n >= 1")
}

/// `[0, 2nW + n] x [0, 2nH + n]`.
pub fn fine_region(n: usize, w: usize, h: usize) -> Result<Rect> {
    Rect::with_size(2 * n * w + n, 2 * n * h + n)
}

#[derive(Debug, Clone)]
pub struct CoarseLattice {
    pub n: usize,
    pub w: usize,
    pub h: usize,
    pub config: Configuration,
    /// Fine rectangle of each coarse edge, by coarse edge id.
    pub fine: Vec<Rect>,
}

impl CoarseLattice {
    pub fn disjoint(&self, a: EdgeId, b: EdgeId) -> bool {
        self.fine[a.0].is_disjoint(&self.fine[b.0])
    }
}

/// Coarse edge open iff G holds on its fine rectangle.
pub fn coarse_grain(fine: &Configuration, n: usize, w: usize, h: usize) -> Result<CoarseLattice> {
    if n == 0 {
        return Err(Error::InvalidArgument("block size must be at least 1".into()));
    }
    let need = fine_region(n, w, h)?;
    let have = fine
        .region()
        .as_rect()
        .filter(|_| matches!(fine.region(), Region::Rect(_)))
        .ok_or_else(|| Error::InvalidRegion(format!("{} is not a rectangle", fine.region())))?;
    if have.intersect(&need) != Some(need) {
        return Err(Error::InvalidRegion(format!("{} does not contain the required fine region {need:?}", fine.region())));
    }
    let region = Region::coarse(w, h)?;
    let fine_rects: Vec<Rect> = region.edges().map(|e| coarse_edge_rect(&e, n)).collect();
    let states: Vec<bool> = region
        .edges()
        .zip(&fine_rects)
        .map(|(e, r)| detect_g(fine, r, e.orientation).expect("3:1 by construction"))
        .collect();
    let config = Configuration::from_states(region, &states)?;
    Ok(CoarseLattice { n, w, h, config, fine: fine_rects })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingReport {
    pub components: usize,
    pub pairs_checked: usize,
    pub violations: usize,
    pub first_violation: Option<(Vertex, Vertex)>,
}

/// Any two coarse vertices joined by a coarse open path must have their
/// anchor squares joined by a fine open path.
pub fn verify_embedding(fine: &Configuration, coarse: &CoarseLattice) -> EmbeddingReport {
    let bx = fine_region(coarse.n, coarse.w, coarse.h).expect("checked in coarse_grain");
    let shape = bx.shape();
    let mut uf = rect_union_find(fine, &bx);
    let mut roots = |v: Vertex| -> HashSet<usize> {
        anchor_square(v, coarse.n).vertices().map(|u| uf.find(shape.vertex_index(u).unwrap())).collect()
    };
    let mut report = EmbeddingReport { components: 0, pairs_checked: 0, violations: 0, first_violation: None };
    for comp in clusters(&coarse.config).sets() {
        if comp.len() < 2 {
            continue;
        }
        report.components += 1;
        let sets: Vec<HashSet<usize>> = comp.iter().map(|&v| roots(v)).collect();
        for i in 0..comp.len() {
            for j in i + 1..comp.len() {
                report.pairs_checked += 1;
                if sets[i].is_disjoint(&sets[j]) {
                    report.violations += 1;
                    report.first_violation.get_or_insert((comp[i], comp[j]));
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub n: usize,
    pub w: usize,
    pub h: usize,
    pub p: f64,
    pub samples: u64,
    pub seed: u64,
    pub pairs_checked: u64,
    pub violations: u64,
    /// Fraction of samples whose coarse lattice spans left to right.
    pub coarse_spanning: Estimate,
}

/// `verify_embedding` over sampled fine configurations.
pub fn embedding_audit(n: usize, w: usize, h: usize, p: f64, samples: u64, seed: u64) -> Result<AuditReport> {
    check_probability(p)?;
    let region: Region = fine_region(n, w, h)?.into();
    let coarse_rect = Rect::with_size(w, h)?;
    let (pairs, bad, span) = (0..samples)
        .into_par_iter()
        .map_init(
            || Configuration::closed(region.clone()),
            |c, i| {
                EdgeStream::new(seed, i).fill(c, p);
                let coarse = coarse_grain(c, n, w, h).unwrap();
                let rep = verify_embedding(c, &coarse);
                let span = crate::crossing::has_h_crossing(&coarse.config, &coarse_rect);
                (rep.pairs_checked as u64, rep.violations as u64, span as u64)
            },
        )
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    Ok(AuditReport {
        n,
        w,
        h,
        p,
        samples,
        seed,
        pairs_checked: pairs,
        violations: bad,
        coarse_spanning: Estimate::from_counts(span, samples, p, seed),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub samples: u64,
    pub first: f64,
    pub second: f64,
    pub both: f64,
    pub correlation: f64,
    /// 95% interval for the correlation (Fisher transform).
    pub ci: (f64, f64),
    pub contains_zero: bool,
}

/// Sample correlation of the states of two coarse edges.
pub fn coarse_pair_correlation(n: usize, a: Edge, b: Edge, p: f64, samples: u64, seed: u64) -> Result<CorrelationReport> {
    check_probability(p)?;
    if samples < 4 {
        return Err(Error::InvalidArgument("need at least 4 samples".into()));
    }
    let (ra, rb) = (coarse_edge_rect(&a, n), coarse_edge_rect(&b, n));
    let hull = ra.hull(&rb);
    let region: Region = hull.into();
    let (s1, s2, s12) = (0..samples)
        .into_par_iter()
        .map_init(
            || Configuration::closed(region.clone()),
            |c, i| {
                EdgeStream::new(seed, i).fill(c, p);
                let x = detect_g(c, &ra, a.orientation).unwrap();
                let y = detect_g(c, &rb, b.orientation).unwrap();
                (x as u64, y as u64, (x && y) as u64)
            },
        )
        .reduce(|| (0, 0, 0), |u, v| (u.0 + v.0, u.1 + v.1, u.2 + v.2));
    let nf = samples as f64;
    let (m1, m2, m12) = (s1 as f64 / nf, s2 as f64 / nf, s12 as f64 / nf);
    let var = (m1 * (1.0 - m1) * m2 * (1.0 - m2)).sqrt();
    let r = if var > 0.0 { (m12 - m1 * m2) / var } else { 0.0 };
    let z = r.clamp(-0.999_999, 0.999_999).atanh();
    let half = Z95 / (nf - 3.0).sqrt();
    let ci = ((z - half).tanh(), (z + half).tanh());
    Ok(CorrelationReport {
        samples,
        first: m1,
        second: m2,
        both: m12,
        correlation: r,
        ci,
        contains_zero: ci.0 <= 0.0 && 0.0 <= ci.1,
    })
}

/// Exact joint law of the two coarse edges `(0,0)-(1,0)` and
/// `(2,0)-(3,0)` with `n = 1`, whose fine rectangles are disjoint.
pub fn product_law_exact(p: &BigRational) -> Result<ProductReport> {
    let a = coarse_edge_rect(&Edge::horizontal(0, 0), 1);
    let b = coarse_edge_rect(&Edge::horizontal(2, 0), 1);
    let region: Region = a.hull(&b).into();
    joint_and_product(
        &region,
        &[Event::G(a, Orientation::Horizontal), Event::G(b, Orientation::Horizontal)],
        p,
        crate::oracle::DEFAULT_CAP,
    )
}

/// `R_k` at the origin: `2^k n` wide and `2^(k+1) n` tall for even `k`,
/// the transpose for odd `k`. Returns the rectangle and its long direction.
pub fn doubling_rect(n: usize, k: usize) -> Result<(Rect, Orientation)> {
    let short = (1usize << k) * n;
    if k % 2 == 0 {
        Ok((Rect::with_size(short, 2 * short)?, Orientation::Vertical))
    } else {
        Ok((Rect::with_size(2 * short, short)?, Orientation::Horizontal))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    pub n: usize,
    pub k_max: usize,
    pub p: f64,
    pub per_k: Vec<Estimate>,
    pub all_hold: Estimate,
    /// `1 - sum_k (1 - p_hat_k)`.
    pub union_bound: f64,
    pub union_consistent: bool,
    pub intersection_checks: u64,
    pub intersection_violations: u64,
}

/// Samples the hull of `R_0..R_K` once per trial and records which `R_k`
/// are crossed the long way; on every trial where `R_k` and `R_{k+1}` are
/// both crossed, their witnesses must share a vertex.
pub fn doubling_construction(n: usize, p: f64, k_max: usize, samples: u64, seed: u64) -> Result<DoublingReport> {
    check_probability(p)?;
    if n == 0 || samples == 0 || k_max > 20 {
        return Err(Error::InvalidArgument(format!("bad doubling parameters n={n}, K={k_max}, samples={samples}")));
    }
    let rects = (0..=k_max).map(|k| doubling_rect(n, k)).collect::<Result<Vec<_>>>()?;
    let hull = rects.iter().fold(rects[0].0, |h, (r, _)| h.hull(r));
    let region: Region = hull.into();
    let kk = rects.len();
    let zero = || (vec![0u64; kk], 0u64, 0u64, 0u64);
    let (hits, all, checks, bad) = (0..samples)
        .into_par_iter()
        .map_init(
            || Configuration::closed(region.clone()),
            |c, i| {
                EdgeStream::new(seed, i).fill(c, p);
                let w: Vec<_> = rects.iter().map(|(r, o)| crossing(c, r, *o)).collect();
                let hits: Vec<u64> = w.iter().map(|x| x.is_some() as u64).collect();
                let all = w.iter().all(Option::is_some) as u64;
                let (mut checks, mut bad) = (0, 0);
                for pair in w.windows(2) {
                    if let (Some(a), Some(b)) = (&pair[0], &pair[1]) {
                        checks += 1;
                        let va: HashSet<_> = a.vertices.iter().collect();
                        if !b.vertices.iter().any(|v| va.contains(v)) {
                            bad += 1;
                        }
                    }
                }
                (hits, all, checks, bad)
            },
        )
        .reduce(zero, |a, b| {
            (a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect(), a.1 + b.1, a.2 + b.2, a.3 + b.3)
        });
    let per_k: Vec<Estimate> = hits.iter().map(|&h| Estimate::from_counts(h, samples, p, seed)).collect();
    let all_hold = Estimate::from_counts(all, samples, p, seed);
    let union_bound = 1.0 - per_k.iter().map(|e| 1.0 - e.p_hat).sum::<f64>();
    let sd = (all_hold.std_err().powi(2) + per_k.iter().map(|e| e.std_err().powi(2)).sum::<f64>()).sqrt();
    let union_consistent = all_hold.p_hat >= union_bound - 3.0 * sd;
    Ok(DoublingReport {
        n,
        k_max,
        p,
        per_k,
        all_hold,
        union_bound,
        union_consistent,
        intersection_checks: checks,
        intersection_violations: bad,
    })
}
