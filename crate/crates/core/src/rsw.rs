//! Crossing inequalities at moderate scale: the long-rectangle chain, the
//! annulus product bound, torus events, the covering of the torus by 128
//! rectangles and the square-root trick.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{check_probability, Configuration, EdgeStream};
use crate::crossing::{detect_circuit, detect_x, has_h_crossing, has_v_crossing, x_event_geometry};
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::lattice::{Annulus, DualVertex, Orientation, Rect, Region, Torus, Vertex};

/// Provable lower bound `h_{L, 2n} >= 2^-exponent` for an `L` by `2n`
/// rectangle, `L = multiple * n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainBound {
    pub multiple: usize,
    pub length: usize,
    pub height: usize,
    pub exponent: u32,
    /// `false` when the bound is inherited from a longer chain length.
    pub derived: bool,
}

impl ChainBound {
    pub fn bound(&self) -> f64 {
        0.5f64.powi(self.exponent as i32)
    }
}

/// Chain lengths in units of `n` with their exponents: starting from the
/// square (`2n`, exponent 1), each step maps `(L, e)` to `(2L - n, 2e + 5)`.
fn chain(upto: usize) -> Vec<(usize, u32)> {
    let mut out = vec![(2, 1)];
    while out.last().unwrap().0 < upto {
        let (l, e) = *out.last().unwrap();
        out.push((2 * l - 1, 2 * e + 5));
    }
    out
}

/// Bounds for every length `jn`, `2 <= j <= 2 rho`. Lengths between chain
/// lengths take the bound of the next longer one, since a longer
/// rectangle is harder to cross.
pub fn chain_bounds(n: usize, rho: usize) -> Result<Vec<ChainBound>> {
    if n == 0 || rho < 2 {
        return Err(Error::InvalidArgument(format!("chain needs n >= 1 and integer rho > 1, got n={n}, rho={rho}")));
    }
    let steps = chain(2 * rho);
    Ok((2..=2 * rho)
        .map(|j| {
            let &(l, e) = steps.iter().find(|(l, _)| *l >= j).unwrap();
            ChainBound { multiple: j, length: j * n, height: 2 * n, exponent: e, derived: l == j }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRow {
    pub bound: ChainBound,
    pub estimate: Estimate,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RswReport {
    pub n: usize,
    pub p: f64,
    pub rows: Vec<ChainRow>,
    /// Smallest estimated crossing probability over the chain: an empirical
    /// stand-in for the size-independent constant.
    pub c2_proxy: f64,
    pub pass: bool,
}

/// Slack in standard errors for Monte Carlo verdicts.
pub const SIGMAS: f64 = 3.0;

fn h_estimate(r: &Rect, p: f64, samples: u64, seed: u64) -> Estimate {
    let region: Region = (*r).into();
    let hits = crate::estimate::count_where(
        0..samples,
        || Configuration::closed(region.clone()),
        |c, i| {
            EdgeStream::new(seed, i).fill(c, p);
            has_h_crossing(c, r)
        },
    );
    Estimate::from_counts(hits, samples, p, seed)
}

/// Estimates of `h_{L, 2n}` for `L` in `{2n, 3n, 5n, 6n}`, each compared
/// with its chain bound.
pub fn check_chain(n: usize, p: f64, samples: u64, seed: u64) -> Result<RswReport> {
    check_probability(p)?;
    let bounds = chain_bounds(n, 3)?;
    let mut rows = Vec::new();
    for b in bounds.into_iter().filter(|b| [2, 3, 5, 6].contains(&b.multiple)) {
        let r = Rect::with_size(b.length, b.height)?;
        let estimate = h_estimate(&r, p, samples, seed);
        let ok = estimate.p_hat + SIGMAS * estimate.std_err() >= b.bound();
        rows.push(ChainRow { bound: b, estimate, ok });
    }
    let c2_proxy = rows.iter().map(|r| r.estimate.p_hat).fold(1.0, f64::min);
    let pass = rows.iter().all(|r| r.ok);
    Ok(RswReport { n, p, rows, c2_proxy, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XReport {
    pub m: usize,
    pub n: usize,
    pub x: Estimate,
    pub h: Estimate,
    pub v: Estimate,
    pub holds: bool,
}

/// Paired estimates of `X(R)`, `H(R)` and `V(S)`; verdict
/// `X >= H V / 2` up to propagated slack.
pub fn lemma_x_mc(m: usize, n: usize, p: f64, samples: u64, seed: u64) -> Result<XReport> {
    check_probability(p)?;
    let g = x_event_geometry(m, n)?;
    let region: Region = g.r.into();
    let (x, h, v) = (0..samples)
        .into_par_iter()
        .map_init(
            || Configuration::closed(region.clone()),
            |c, i| {
                EdgeStream::new(seed, i).fill(c, p);
                let x = detect_x(c, &g.r, &g.s).unwrap();
                (x as u64, has_h_crossing(c, &g.r) as u64, has_v_crossing(c, &g.s) as u64)
            },
        )
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let x = Estimate::from_counts(x, samples, p, seed);
    let h = Estimate::from_counts(h, samples, p, seed);
    let v = Estimate::from_counts(v, samples, p, seed);
    let rhs = h.p_hat * v.p_hat / 2.0;
    let sd = (x.std_err().powi(2) + (v.p_hat * h.std_err() / 2.0).powi(2) + (h.p_hat * v.std_err() / 2.0).powi(2)).sqrt();
    let holds = x.p_hat - rhs >= -SIGMAS * sd;
    Ok(XReport { m, n, x, h, v, holds })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusReport {
    pub n: usize,
    pub p: f64,
    pub region: String,
    pub circuit: Estimate,
    /// Long-way crossing of the bottom band.
    pub band: Estimate,
    pub q4: f64,
    pub holds: bool,
}

/// Annulus of inner radius `n` and outer `3n` about the dual vertex
/// `(0, 0)`.
pub fn ratio_three_annulus(n: usize) -> Result<Annulus> {
    Annulus::new(DualVertex::new(0, 0), n, 3 * n)
}

/// `Pr(circuit) >= q^4`, `q` the probability that one band of the annulus
/// is crossed the long way.
pub fn annulus_product(n: usize, p: f64, samples: u64, seed: u64) -> Result<AnnulusReport> {
    check_probability(p)?;
    let a = ratio_three_annulus(n)?;
    let (band, _) = a.bands()?[0];
    let region: Region = a.into();
    let (c, b) = (0..samples)
        .into_par_iter()
        .map_init(
            || Configuration::closed(region.clone()),
            |cfg, i| {
                EdgeStream::new(seed, i).fill(cfg, p);
                (detect_circuit(cfg, &a) as u64, has_h_crossing(cfg, &band) as u64)
            },
        )
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    let circuit = Estimate::from_counts(c, samples, p, seed);
    let band = Estimate::from_counts(b, samples, p, seed);
    let q4 = band.p_hat.powi(4);
    let sd = (circuit.std_err().powi(2) + (4.0 * band.p_hat.powi(3) * band.std_err()).powi(2)).sqrt();
    let holds = circuit.p_hat - q4 >= -SIGMAS * sd;
    Ok(AnnulusReport { n, p, region: region.descriptor(), circuit, band, q4, holds })
}

/// Some `k` by `l` rectangle of the torus crossed horizontally, or some
/// `l` by `k` rectangle crossed vertically.
pub fn torus_any_crossing(c: &Configuration, t: &Torus, k: usize, l: usize) -> Result<bool> {
    t.rect(Vertex::new(0, 0), k, l)?;
    let n = t.n as i64;
    for y in 0..n {
        for x in 0..n {
            let a = Vertex::new(x, y);
            if has_h_crossing(c, &Rect::at(a, k, l)?) || has_v_crossing(c, &Rect::at(a, l, k)?) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusReport {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    /// Some translate crossed the long way.
    pub any: Estimate,
    /// The rectangle anchored at the origin crossed horizontally.
    pub fixed: Estimate,
    /// Samples with the fixed crossing but not the union (must be zero).
    pub paired_violations: u64,
}

pub fn torus_event(t: &Torus, k: usize, l: usize, p: f64, samples: u64, seed: u64) -> Result<TorusReport> {
    check_probability(p)?;
    let r0 = t.rect(Vertex::new(0, 0), k, l)?;
    let region: Region = (*t).into();
    let (any, fixed, bad) = (0..samples)
        .into_par_iter()
        .map_init(
            || Configuration::closed(region.clone()),
            |c, i| {
                EdgeStream::new(seed, i).fill(c, p);
                let f = has_h_crossing(c, &r0);
                let a = torus_any_crossing(c, t, k, l).unwrap();
                (a as u64, f as u64, (f && !a) as u64)
            },
        )
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
    Ok(TorusReport {
        n: t.n,
        k,
        l,
        any: Estimate::from_counts(any, samples, p, seed),
        fixed: Estimate::from_counts(fixed, samples, p, seed),
        paired_violations: bad,
    })
}

/// One rectangle of the covering family: `12n` by `4n` (horizontal) or
/// `4n` by `12n` (vertical), anchored at a multiple of `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoverRect {
    pub x: usize,
    pub y: usize,
    pub orientation: Orientation,
}

pub fn covering_family(n: usize) -> Vec<CoverRect> {
    let mut out = Vec::with_capacity(128);
    for orientation in [Orientation::Horizontal, Orientation::Vertical] {
        for j in 0..8 {
            for i in 0..8 {
                out.push(CoverRect { x: 2 * n * i, y: 2 * n * j, orientation });
            }
        }
    }
    out
}

impl CoverRect {
    pub fn rect(&self, n: usize) -> Rect {
        let (k, l) = match self.orientation {
            Orientation::Horizontal => (12 * n, 4 * n),
            Orientation::Vertical => (4 * n, 12 * n),
        };
        Rect::at(Vertex::new(self.x as i64, self.y as i64), k, l).unwrap()
    }

    /// Crossed the long way.
    pub fn crossed(&self, c: &Configuration, n: usize) -> bool {
        match self.orientation {
            Orientation::Horizontal => has_h_crossing(c, &self.rect(n)),
            Orientation::Vertical => has_v_crossing(c, &self.rect(n)),
        }
    }
}

/// Arc `[s, s + len2]` lies inside arc `[t, t + len]` on the cycle of
/// length `m`.
fn arc_inside(s: usize, len2: usize, t: usize, len: usize, m: usize) -> bool {
    (s + m - t % m) % m + len2 <= len
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringReport {
    pub n: usize,
    pub family_size: usize,
    pub positions: usize,
    /// An uncovered `14n` by `2n` position, if any.
    pub uncovered: Option<(usize, usize, Orientation)>,
}

impl CoveringReport {
    pub fn passed(&self) -> bool {
        self.uncovered.is_none()
    }
}

/// Every `14n` by `2n` rectangle of `T_{16n}`, in either orientation, must
/// contain a family member's full long side while its own short side fits
/// within that member's short side, so that a long-way crossing of it
/// crosses the member the long way.
pub fn check_covering(n: usize, family: &[CoverRect]) -> CoveringReport {
    let m = 16 * n;
    let mut positions = 0;
    for orientation in [Orientation::Horizontal, Orientation::Vertical] {
        for b in 0..m {
            for a in 0..m {
                positions += 1;
                let covered = family.iter().filter(|r| r.orientation == orientation).any(|r| match orientation {
                    Orientation::Horizontal => arc_inside(r.x, 12 * n, a, 14 * n, m) && arc_inside(b, 2 * n, r.y, 4 * n, m),
                    Orientation::Vertical => arc_inside(r.y, 12 * n, b, 14 * n, m) && arc_inside(a, 2 * n, r.x, 4 * n, m),
                });
                if !covered {
                    return CoveringReport { n, family_size: family.len(), positions, uncovered: Some((a, b, orientation)) };
                }
            }
        }
    }
    CoveringReport { n, family_size: family.len(), positions, uncovered: None }
}

pub fn covering_check(n: usize) -> CoveringReport {
    check_covering(n, &covering_family(n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SqrtReport {
    pub n: usize,
    pub p: f64,
    /// No family member crossed the long way.
    pub none_crossed: Estimate,
    /// The first family member not crossed.
    pub first_not_crossed: Estimate,
    /// `first_not_crossed^128`.
    pub bound: f64,
    pub holds: bool,
    /// Samples audited for "some `14n` by `2n` rectangle crossed implies
    /// some member crossed".
    pub audited: u64,
    pub audit_violations: u64,
}

/// `Pr(no member crossed) >= Pr(first member not crossed)^128` on
/// `T_{16n}`, plus an audit of the covering implication on the first
/// `audit` samples.
pub fn sqrt_trick_check(n: usize, p: f64, samples: u64, seed: u64, audit: u64) -> Result<SqrtReport> {
    check_probability(p)?;
    let t = Torus::new(16 * n)?;
    let family = covering_family(n);
    let region: Region = t.into();
    let (none, first_not, bad) = (0..samples)
        .into_par_iter()
        .map_init(
            || Configuration::closed(region.clone()),
            |c, i| {
                EdgeStream::new(seed, i).fill(c, p);
                let first = family[0].crossed(c, n);
                let any = first || family[1..].iter().any(|r| r.crossed(c, n));
                let bad = i < audit && !any && torus_any_crossing(c, &t, 14 * n, 2 * n).unwrap();
                (!any as u64, !first as u64, bad as u64)
            },
        )
        .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
    let none_crossed = Estimate::from_counts(none, samples, p, seed);
    let first_not_crossed = Estimate::from_counts(first_not, samples, p, seed);
    let x = first_not_crossed.p_hat;
    let bound = x.powi(128);
    let sd = (none_crossed.std_err().powi(2) + (128.0 * x.powi(127) * first_not_crossed.std_err()).powi(2)).sqrt();
    let holds = none_crossed.p_hat - bound >= -SIGMAS * sd;
    Ok(SqrtReport {
        n,
        p,
        none_crossed,
        first_not_crossed,
        bound,
        holds,
        audited: audit.min(samples),
        audit_violations: bad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::sample;

    #[test]
    fn chain_arithmetic() {
        let b = chain_bounds(4, 3).unwrap();
        let get = |j: usize| b.iter().find(|c| c.multiple == j).unwrap();
        assert_eq!(get(2).bound(), 0.5);
        assert_eq!(get(3).bound(), 1.0 / 128.0);
        assert_eq!(get(5).exponent, 19);
        assert!(get(5).derived && !get(4).derived);
        assert_eq!(get(4).exponent, 19);
        assert_eq!(get(6).exponent, 43);
        assert_eq!((get(6).length, get(6).height), (24, 8));
        let b7 = chain_bounds(1, 7).unwrap();
        assert_eq!(b7.last().unwrap().exponent, 91);
        assert!(chain_bounds(1, 1).is_err());
    }

    #[test]
    fn chain_at_one_is_certain() {
        let r = check_chain(2, 1.0, 20, 0).unwrap();
        assert!(r.pass);
        assert!(r.rows.iter().all(|row| row.estimate.p_hat == 1.0));
    }

    #[test]
    fn annulus_extremes() {
        let r = annulus_product(1, 1.0, 10, 0).unwrap();
        assert_eq!((r.circuit.p_hat, r.q4), (1.0, 1.0));
        let r = annulus_product(1, 0.0, 10, 0).unwrap();
        assert_eq!((r.circuit.p_hat, r.q4), (0.0, 0.0));
        assert!(r.holds);
    }

    #[test]
    fn covering_small() {
        assert!(covering_check(1).passed());
        assert_eq!(covering_check(1).positions, 16 * 16 * 2);
        let mut fam = covering_family(1);
        fam.remove(9);
        let rep = check_covering(1, &fam);
        assert!(!rep.passed());
        let (a, b, o) = rep.uncovered.unwrap();
        assert_eq!(o, Orientation::Horizontal);
        assert!(a % 2 == 1 && b % 2 == 1);
    }

    #[test]
    fn torus_detector_is_translation_invariant() {
        let t = Torus::new(8).unwrap();
        let region: Region = t.into();
        for seed in 0..20 {
            let c = sample(&region, 0.5, seed, 0);
            let base = torus_any_crossing(&c, &t, 6, 2).unwrap();
            for (dx, dy) in [(1, 0), (3, 5), (7, 7)] {
                let moved = c.map_edges(|e| e.translate(dx, dy));
                assert_eq!(torus_any_crossing(&moved, &t, 6, 2).unwrap(), base);
            }
        }
        assert!(torus_any_crossing(&Configuration::closed(region), &t, 7, 2).is_err());
    }

    #[test]
    fn torus_event_at_one() {
        let r = torus_event(&Torus::new(6).unwrap(), 4, 2, 1.0, 5, 0).unwrap();
        assert_eq!(r.any.p_hat, 1.0);
        assert_eq!(r.paired_violations, 0);
    }

    #[test]
    fn sqrt_extremes() {
        let r = sqrt_trick_check(1, 1.0, 5, 0, 5).unwrap();
        assert_eq!((r.none_crossed.p_hat, r.bound), (0.0, 0.0));
        let r = sqrt_trick_check(1, 0.0, 5, 0, 5).unwrap();
        assert_eq!((r.none_crossed.p_hat, r.bound), (1.0, 1.0));
        assert!(r.holds);
    }
}
