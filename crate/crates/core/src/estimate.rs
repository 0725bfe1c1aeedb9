//! Seeded Monte Carlo estimation.
//!
//! Sample `i` of a run with seed `s` is always drawn from stream `(s, i)`,
//! so success counts do not depend on how sample ranges are split among
//! workers.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{check_probability, sample_coupled, Configuration, EdgeStream, LazyStates};
use crate::crossing::Event;
use crate::error::{Error, Result};
use crate::lattice::{Edge, EdgeId, Rect, Region, Vertex};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

pub const CSV_HEADER: &str = "region,event,p,samples,successes,p_hat,ci_lo,ci_hi,seed";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub p: f64,
    pub samples: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

/// Wilson score interval.
pub fn wilson(successes: u64, samples: u64, z: f64) -> (f64, f64) {
    if samples == 0 {
        return (0.0, 1.0);
    }
    let n = samples as f64;
    let ph = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (ph + z2 / (2.0 * n)) / denom;
    let half = z * (ph * (1.0 - ph) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0).min(ph), (centre + half).min(1.0).max(ph))
}

impl Estimate {
    pub fn from_counts(successes: u64, samples: u64, p: f64, seed: u64) -> Self {
        let (ci_lo, ci_hi) = wilson(successes, samples, Z95);
        let p_hat = if samples == 0 { 0.0 } else { successes as f64 / samples as f64 };
        Estimate { p, samples, successes, p_hat, ci_lo, ci_hi, seed }
    }

    /// Binomial standard error of `p_hat`.
    pub fn std_err(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.samples.max(1) as f64).sqrt()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_lo <= x && x <= self.ci_hi
    }

    /// Confidence intervals are disjoint and this one lies above.
    pub fn above(&self, other: &Estimate) -> bool {
        self.ci_lo > other.ci_hi
    }

    pub fn csv_row(&self, region: &str, event: &str) -> String {
        format!(
            "{region},{event},{},{},{},{},{},{},{}",
            self.p, self.samples, self.successes, self.p_hat, self.ci_lo, self.ci_hi, self.seed
        )
    }

    pub fn to_json(&self, region: &str, event: &str) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("plain struct");
        v["region"] = json!(region);
        v["event"] = json!(event);
        v
    }
}

/// Number of indices in `range` for which `f` holds, evaluated in parallel.
pub fn count_where<S, I, F>(range: std::ops::Range<u64>, init: I, f: F) -> u64
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64) -> bool + Sync + Send,
{
    range.into_par_iter().map_init(init, |s, i| f(s, i) as u64).sum()
}

fn count_event(region: &Region, event: &Event, p: f64, seed: u64, range: std::ops::Range<u64>) -> u64 {
    count_where(
        range,
        || Configuration::closed(region.clone()),
        |c, i| {
            EdgeStream::new(seed, i).fill(c, p);
            event.holds(c)
        },
    )
}

pub fn mc_probability(region: &Region, event: &Event, p: f64, samples: u64, seed: u64) -> Result<Estimate> {
    check_probability(p)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    Ok(Estimate::from_counts(count_event(region, event, p, seed, 0..samples), samples, p, seed))
}

/// Seed used for grid point `k` of an uncoupled sweep.
pub fn point_seed(seed: u64, k: usize) -> u64 {
    let mut z = seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One estimate per grid point. Coupled sweeps threshold a single uniform
/// table per sample at every `p`; uncoupled sweeps use an independent seed
/// per point.
pub fn sweep(region: &Region, event: &Event, grid: &[f64], samples: u64, seed: u64, coupled: bool) -> Result<Vec<Estimate>> {
    for &p in grid {
        check_probability(p)?;
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("p grid must be sorted".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if !coupled {
        return grid
            .iter()
            .enumerate()
            .map(|(k, &p)| mc_probability(region, event, p, samples, point_seed(seed, k)))
            .collect();
    }
    let counts = (0..samples)
        .into_par_iter()
        .map_init(
            || Configuration::closed(region.clone()),
            |c, i| {
                let table = sample_coupled(region, seed, i);
                grid.iter()
                    .map(|&p| {
                        table.threshold_into(c, p);
                        event.holds(c) as u64
                    })
                    .collect::<Vec<u64>>()
            },
        )
        .reduce(|| vec![0; grid.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    Ok(grid.iter().zip(counts).map(|(&p, s)| Estimate::from_counts(s, samples, p, seed)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdOptions {
    /// Stop once the bisection bracket is this narrow.
    pub tolerance: f64,
    pub initial_samples: u64,
    pub max_samples_per_point: u64,
    /// Total region-samples allowed for one search.
    pub budget: u64,
    pub seed: u64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions {
            tolerance: 0.01,
            initial_samples: 1000,
            max_samples_per_point: 100_000,
            budget: 10_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub region: String,
    pub event: String,
    pub target: f64,
    pub p_star: f64,
    /// Largest probed `p` whose interval lies below the target and smallest
    /// whose interval lies above it.
    pub bracket: (f64, f64),
    pub points: Vec<Estimate>,
    pub samples_used: u64,
    pub inconclusive: bool,
}

/// Bisection for the `p` at which an increasing event has probability
/// `target`. All points share one seed, so the estimates are coupled. A
/// point whose interval straddles the target has its sample count doubled
/// until it separates or reaches the per-point cap; the point estimate then
/// decides the direction.
pub fn find_threshold(region: &Region, event: &Event, target: f64, opts: &ThresholdOptions) -> Result<ThresholdReport> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::InvalidArgument(format!("target level {target} outside [0, 1]")));
    }
    if opts.tolerance <= 0.0 || opts.initial_samples == 0 {
        return Err(Error::InvalidArgument("tolerance and initial samples must be positive".into()));
    }
    let mut report = ThresholdReport {
        region: region.descriptor(),
        event: event.name(),
        target,
        p_star: 0.0,
        bracket: (0.0, 1.0),
        points: Vec::new(),
        samples_used: 0,
        inconclusive: false,
    };
    if target <= 0.0 {
        report.bracket = (0.0, 0.0);
        return Ok(report);
    }
    if target >= 1.0 {
        report.p_star = 1.0;
        report.bracket = (1.0, 1.0);
        return Ok(report);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > opts.tolerance {
        let mid = 0.5 * (lo + hi);
        let mut n = opts.initial_samples.min(opts.max_samples_per_point);
        if report.samples_used + n > opts.budget {
            report.inconclusive = true;
            break;
        }
        let mut successes = count_event(region, event, mid, opts.seed, 0..n);
        report.samples_used += n;
        let mut est = Estimate::from_counts(successes, n, mid, opts.seed);
        while est.contains(target) && n < opts.max_samples_per_point {
            let next = (2 * n).min(opts.max_samples_per_point);
            if report.samples_used + (next - n) > opts.budget {
                report.inconclusive = true;
                break;
            }
            successes += count_event(region, event, mid, opts.seed, n..next);
            report.samples_used += next - n;
            n = next;
            est = Estimate::from_counts(successes, n, mid, opts.seed);
        }
        report.points.push(est);
        if est.p_hat >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if report.inconclusive {
            break;
        }
    }
    report.p_star = 0.5 * (lo + hi);
    let below = report.points.iter().filter(|e| e.ci_hi < target).map(|e| e.p).fold(0.0, f64::max);
    let above = report.points.iter().filter(|e| e.ci_lo > target).map(|e| e.p).fold(1.0, f64::min);
    report.bracket = (below, above);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowReport {
    pub eps: f64,
    pub lower: ThresholdReport,
    pub upper: ThresholdReport,
    /// `p(1 - eps) - p(eps)` from the bisection midpoints.
    pub width: f64,
    /// Range of widths compatible with both confidence brackets.
    pub width_bracket: (f64, f64),
}

/// Width of the window over which the event probability rises from `eps`
/// to `1 - eps`.
pub fn threshold_window(region: &Region, event: &Event, eps: f64, opts: &ThresholdOptions) -> Result<WindowReport> {
    if !(0.0 < eps && eps < 0.5) {
        return Err(Error::InvalidArgument(format!("window level {eps} outside (0, 1/2)")));
    }
    let lower = find_threshold(region, event, eps, opts)?;
    let upper = find_threshold(region, event, 1.0 - eps, opts)?;
    let width = upper.p_star - lower.p_star;
    let width_bracket = ((upper.bracket.0 - lower.bracket.1).max(0.0), upper.bracket.1 - lower.bracket.0);
    Ok(WindowReport { eps, lower, upper, width, width_bracket })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterStats {
    pub box_size: usize,
    pub p: f64,
    pub samples: u64,
    pub seed: u64,
    /// Fraction of samples in which the origin's cluster meets the boundary.
    pub boundary: Estimate,
    /// Mean size of the origin's cluster inside the box.
    pub mean_size: f64,
}

/// Explore the origin's open cluster in `[-L, L]^2` with free boundary,
/// drawing edge states only as they are reached.
pub fn origin_cluster(l: usize, p: f64, samples: u64, seed: u64) -> Result<ClusterStats> {
    check_probability(p)?;
    if l == 0 || samples == 0 {
        return Err(Error::InvalidArgument("box size and samples must be at least 1".into()));
    }
    let li = l as i64;
    let bx = Rect::new(-li, -li, li, li)?;
    let region: Region = bx.into();
    let side = 2 * l + 1;
    let (reached, total_size) = (0..samples)
        .into_par_iter()
        .map_init(
            || (vec![u64::MAX; side * side], VecDeque::new()),
            |(seen, queue), i| {
                let mut states = LazyStates::new(region.edge_count(), p, seed, i);
                let idx = |v: Vertex| ((v.y + li) as usize) * side + (v.x + li) as usize;
                let origin = Vertex::new(0, 0);
                seen[idx(origin)] = i;
                queue.clear();
                queue.push_back(origin);
                let (mut size, mut boundary) = (0u64, false);
                while let Some(v) = queue.pop_front() {
                    size += 1;
                    boundary |= v.x.abs() == li || v.y.abs() == li;
                    for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                        let u = Vertex::new(v.x + dx, v.y + dy);
                        if !bx.contains(u) || seen[idx(u)] == i {
                            continue;
                        }
                        let e = Edge::between(v, u).unwrap();
                        let id: EdgeId = region.edge_index(&e).unwrap();
                        if states.is_open(id) {
                            seen[idx(u)] = i;
                            queue.push_back(u);
                        }
                    }
                }
                (boundary as u64, size)
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(ClusterStats {
        box_size: l,
        p,
        samples,
        seed,
        boundary: Estimate::from_counts(reached, samples, p, seed),
        mean_size: total_size as f64 / samples as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(k: usize, l: usize) -> Rect {
        Rect::with_size(k, l).unwrap()
    }

    #[test]
    fn wilson_degenerate() {
        let (lo, hi) = wilson(10, 10, Z95);
        assert!(lo < 1.0 && hi == 1.0);
        let (lo, hi) = wilson(0, 10, Z95);
        assert!(lo == 0.0 && hi > 0.0);
        let e = Estimate::from_counts(50, 100, 0.5, 0);
        assert!(e.ci_lo < 0.5 && 0.5 < e.ci_hi);
    }

    #[test]
    fn always_true() {
        let r: Region = rect(3, 3).into();
        let e = mc_probability(&r, &Event::Always, 0.3, 200, 1).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert!(e.ci_lo > 0.95 && e.ci_hi == 1.0);
    }

    #[test]
    fn deterministic_across_pool_sizes() {
        let r = rect(6, 5);
        let ev = Event::H(r);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_probability(&r.into(), &ev, 0.5, 3000, 42).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn coupled_sweep_is_monotone_with_exact_extremes() {
        let r = rect(8, 8);
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let est = sweep(&r.into(), &Event::H(r), &grid, 500, 3, true).unwrap();
        assert_eq!(est[0].p_hat, 0.0);
        assert_eq!(est[10].p_hat, 1.0);
        assert!(est.windows(2).all(|w| w[0].successes <= w[1].successes));
        assert!(sweep(&r.into(), &Event::H(r), &[0.5, 0.2], 10, 3, true).is_err());
    }

    #[test]
    fn threshold_degenerate_targets() {
        let r: Region = rect(4, 3).into();
        let ev = Event::H(*r.as_rect().unwrap());
        let t = find_threshold(&r, &ev, 0.0, &ThresholdOptions::default()).unwrap();
        assert_eq!(t.p_star, 0.0);
        let t = find_threshold(&r, &ev, 1.0, &ThresholdOptions::default()).unwrap();
        assert_eq!(t.p_star, 1.0);
    }

    #[test]
    fn threshold_budget_flags_inconclusive() {
        let r = rect(4, 3);
        let opts = ThresholdOptions { budget: 5000, tolerance: 1e-4, ..Default::default() };
        let t = find_threshold(&r.into(), &Event::H(r), 0.5, &opts).unwrap();
        assert!(t.inconclusive);
        assert!(t.samples_used <= 5000);
    }

    #[test]
    fn origin_cluster_extremes() {
        let s = origin_cluster(5, 0.0, 50, 1).unwrap();
        assert_eq!((s.boundary.successes, s.mean_size), (0, 1.0));
        let s = origin_cluster(5, 1.0, 50, 1).unwrap();
        assert_eq!(s.boundary.successes, 50);
        assert_eq!(s.mean_size, 121.0);
    }
}
