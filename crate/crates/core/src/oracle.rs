//! Exact probabilities by exhaustive enumeration.
//!
//! Configurations are visited in counting order of the packed bit vector,
//! and every event is re-evaluated from scratch on each one. Counts are
//! kept as the coefficient vector `c_j` (number of configurations with `j`
//! open edges in the event), so `Pr_p = sum_j c_j p^j (1 - p)^(E - j)`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::config::Configuration;
use crate::crossing::{
    dual_v_crossing_of, edges_right_of, has_h_crossing, interface_decision, leftmost_v_crossing, x_event_geometry,
    Event,
};
use crate::error::{Error, Result};
use crate::lattice::{Edge, Orientation, Rect, Region};

pub const DEFAULT_CAP: usize = 22;

fn check_cap(region: &Region, cap: usize) -> Result<usize> {
    let e = region.edge_count();
    if e > cap || e > 40 {
        return Err(Error::CapExceeded { edges: e, cap: cap.min(40) });
    }
    Ok(e)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Event indicator over every configuration of a region.
#[derive(Debug, Clone)]
pub struct TruthTable {
    region: Region,
    event: String,
    bits: Vec<bool>,
}

pub fn truth_table(region: &Region, event: &Event, cap: usize) -> Result<TruthTable> {
    let e = check_cap(region, cap)?;
    let bits = (0..1u64 << e)
        .into_par_iter()
        .map_init(
            || Configuration::closed(region.clone()),
            |c, idx| {
                c.set_index(idx);
                event.holds(c)
            },
        )
        .collect();
    Ok(TruthTable { region: region.clone(), event: event.name(), bits })
}

impl TruthTable {
    pub fn edges(&self) -> usize {
        self.region.edge_count()
    }

    pub fn holds(&self, index: u64) -> bool {
        self.bits[index as usize]
    }

    pub fn and(&self, other: &TruthTable) -> TruthTable {
        assert_eq!(self.region, other.region);
        TruthTable {
            region: self.region.clone(),
            event: format!("{}&{}", self.event, other.event),
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a && *b).collect(),
        }
    }

    pub fn not(&self) -> TruthTable {
        TruthTable {
            region: self.region.clone(),
            event: format!("!{}", self.event),
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// First `(configuration, edge)` where opening the closed edge destroys
    /// the event.
    pub fn monotonicity_violation(&self) -> Option<(u64, usize)> {
        let e = self.edges();
        (0..self.bits.len() as u64).find_map(|idx| {
            if !self.bits[idx as usize] {
                return None;
            }
            (0..e).find(|&j| idx & (1 << j) == 0 && !self.bits[(idx | 1 << j) as usize]).map(|j| (idx, j))
        })
    }

    pub fn is_increasing(&self) -> bool {
        self.monotonicity_violation().is_none()
    }

    pub fn result(&self) -> ExactResult {
        let mut coefficients = vec![0u64; self.edges() + 1];
        for (idx, &b) in self.bits.iter().enumerate() {
            if b {
                coefficients[idx.count_ones() as usize] += 1;
            }
        }
        ExactResult { region: self.region.descriptor(), event: self.event.clone(), edges: self.edges(), coefficients }
    }
}

/// Exact law of an event: `c_j` for `j = 0..=E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub region: String,
    pub event: String,
    pub edges: usize,
    pub coefficients: Vec<u64>,
}

pub fn exact_count(region: &Region, event: &Event, cap: usize) -> Result<ExactResult> {
    Ok(truth_table(region, event, cap)?.result())
}

impl ExactResult {
    pub fn probability(&self, p: &BigRational) -> BigRational {
        let q = BigRational::one() - p;
        let e = self.edges;
        self.coefficients.iter().enumerate().fold(BigRational::zero(), |acc, (j, &c)| {
            acc + BigRational::from_integer(c.into()) * num_traits::pow(p.clone(), j) * num_traits::pow(q.clone(), e - j)
        })
    }

    /// Configurations in the event, i.e. `2^E Pr_{1/2}`.
    pub fn total(&self) -> u64 {
        self.coefficients.iter().sum()
    }

    /// The probability as a polynomial in `p`, lowest degree first.
    pub fn polynomial(&self) -> Vec<BigInt> {
        let e = self.edges;
        let mut out = vec![BigInt::zero(); e + 1];
        for (j, &c) in self.coefficients.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let m = e - j;
            for i in 0..=m {
                let term = BigInt::from(c) * binomial(BigInt::from(m), BigInt::from(i));
                if i % 2 == 0 {
                    out[j + i] += term;
                } else {
                    out[j + i] -= term;
                }
            }
        }
        out
    }

    pub fn to_json(&self, p: Option<&BigRational>) -> serde_json::Value {
        let mut v = json!({
            "region": self.region,
            "event": self.event,
            "E": self.edges,
            "coefficients": self.coefficients,
        });
        if let Some(p) = p {
            let value = self.probability(p);
            v["p"] = json!(p.to_string());
            v["value"] = json!(value.to_string());
            v["value_f64"] = json!(ratio_f64(&value));
        }
        v
    }
}

pub fn ratio_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// `sum_i a_i (1 - x)^i`, re-expanded in powers of `x`.
pub fn compose_one_minus(a: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len()];
    for (i, ai) in a.iter().enumerate() {
        for (k, slot) in out.iter_mut().enumerate().take(i + 1) {
            let t = ai * binomial(BigInt::from(i), BigInt::from(k));
            if k % 2 == 0 {
                *slot += t;
            } else {
                *slot -= t;
            }
        }
    }
    out
}

fn poly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect()
}

fn is_one(poly: &[BigInt]) -> bool {
    poly.iter().enumerate().all(|(i, c)| if i == 0 { c.is_one() } else { c.is_zero() })
}

#[derive(Debug, Clone)]
pub struct SelfDualityReport {
    pub k: usize,
    pub l: usize,
    pub p: BigRational,
    /// `Pr_p(H(R))`, `R` a `k` by `l - 1` rectangle.
    pub pr_h: BigRational,
    /// `Pr_{1-p}(V(R'))`, `R'` a `k - 1` by `l` rectangle.
    pub pr_v: BigRational,
    pub holds: bool,
    pub polynomial_identity: bool,
}

impl SelfDualityReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "check": "self_duality", "k": self.k, "l": self.l, "p": self.p.to_string(),
            "pr_h": self.pr_h.to_string(), "pr_v_complement": self.pr_v.to_string(),
            "holds": self.holds, "polynomial_identity": self.polynomial_identity,
        })
    }
}

/// `Pr_p(H(R)) + Pr_{1-p}(V(R')) = 1`, both at `p` and as polynomials.
pub fn verify_self_duality(k: usize, l: usize, p: &BigRational, cap: usize) -> Result<SelfDualityReport> {
    if k < 2 || l < 2 {
        return Err(Error::InvalidArgument(format!("self-duality needs k, l >= 2, got {k}, {l}")));
    }
    let r = Rect::with_size(k, l - 1)?;
    let r2 = Rect::with_size(k - 1, l)?;
    let h = exact_count(&r.into(), &Event::H(r), cap)?;
    let v = exact_count(&r2.into(), &Event::V(r2), cap)?;
    let pr_h = h.probability(p);
    let pr_v = v.probability(&(BigRational::one() - p));
    let holds = &pr_h + &pr_v == BigRational::one();
    let polynomial_identity = is_one(&poly_add(&h.polynomial(), &compose_one_minus(&v.polynomial())));
    Ok(SelfDualityReport { k, l, p: p.clone(), pr_h, pr_v, holds, polynomial_identity })
}

#[derive(Debug, Clone)]
pub struct HarrisReport {
    pub region: String,
    pub a: String,
    pub b: String,
    pub p: BigRational,
    pub pr_a: BigRational,
    pub pr_b: BigRational,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub holds: bool,
}

impl HarrisReport {
    pub fn equality(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "check": "harris", "region": self.region, "a": self.a, "b": self.b, "p": self.p.to_string(),
            "lhs": self.lhs.to_string(), "rhs": self.rhs.to_string(), "holds": self.holds,
        })
    }
}

/// `Pr(A and B) >= Pr(A) Pr(B)` for increasing `A`, `B`. Both events are
/// checked to be increasing by flipping every closed edge of every
/// configuration; a non-increasing input is refused.
pub fn verify_harris(region: &Region, a: &Event, b: &Event, p: &BigRational, cap: usize) -> Result<HarrisReport> {
    let ta = truth_table(region, a, cap)?;
    let tb = truth_table(region, b, cap)?;
    for (t, e) in [(&ta, a), (&tb, b)] {
        if let Some((idx, j)) = t.monotonicity_violation() {
            return Err(Error::NotIncreasing(format!("{} (configuration {idx:#x}, edge {j})", e.name())));
        }
    }
    let pr_a = ta.result().probability(p);
    let pr_b = tb.result().probability(p);
    let lhs = ta.and(&tb).result().probability(p);
    let rhs = &pr_a * &pr_b;
    let holds = lhs >= rhs;
    Ok(HarrisReport { region: region.descriptor(), a: a.name(), b: b.name(), p: p.clone(), pr_a, pr_b, lhs, rhs, holds })
}

#[derive(Debug, Clone)]
pub struct LemmaXReport {
    pub m: usize,
    pub n: usize,
    pub p: BigRational,
    pub pr_x: BigRational,
    pub pr_h: BigRational,
    pub pr_v: BigRational,
    pub holds: bool,
}

impl LemmaXReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "check": "x_inequality", "m": self.m, "n": self.n, "p": self.p.to_string(),
            "pr_x": self.pr_x.to_string(), "pr_h": self.pr_h.to_string(), "pr_v": self.pr_v.to_string(),
            "holds": self.holds,
        })
    }
}

/// `Pr(X(R)) >= Pr(H(R)) Pr(V(S)) / 2` on `R = [0, m] x [0, 2n]`.
pub fn verify_lemma_x(m: usize, n: usize, p: &BigRational, cap: usize) -> Result<LemmaXReport> {
    let g = x_event_geometry(m, n)?;
    let region: Region = g.r.into();
    let x = exact_count(&region, &Event::X { r: g.r, s: g.s }, cap)?.probability(p);
    let h = exact_count(&region, &Event::H(g.r), cap)?.probability(p);
    let v = exact_count(&region, &Event::V(g.s), cap)?.probability(p);
    let holds = x >= &h * &v / BigRational::from_integer(2.into());
    Ok(LemmaXReport { m, n, p: p.clone(), pr_x: x, pr_h: h, pr_v: v, holds })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityReport {
    pub region: String,
    pub checked: u64,
    /// Configurations where H(R) and the dual vertical crossing do not
    /// hold exactly once.
    pub violations: u64,
    /// Configurations where the interface walk disagrees with union-find
    /// or fails its own invariants.
    pub interface_mismatches: u64,
    pub first_failure: Option<String>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.interface_mismatches == 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "check": "duality", "region": self.region, "checked": self.checked,
            "violations": self.violations, "interface_mismatches": self.interface_mismatches,
            "first_failure": self.first_failure,
        })
    }
}

pub fn verify_duality_exhaustive(r: &Rect, cap: usize) -> Result<DualityReport> {
    let region: Region = (*r).into();
    let e = check_cap(&region, cap)?;
    let outcomes: Vec<(bool, bool)> = (0..1u64 << e)
        .into_par_iter()
        .map_init(
            || Configuration::closed(region.clone()),
            |c, idx| {
                c.set_index(idx);
                let h = has_h_crossing(c, r);
                let d = dual_v_crossing_of(c, r).is_some();
                let walk_ok = match interface_decision(c, r) {
                    Ok(res) => res.is_horizontal_primal() == h,
                    Err(_) => false,
                };
                (h == d, !walk_ok)
            },
        )
        .collect();
    let violations = outcomes.iter().filter(|o| o.0).count() as u64;
    let interface_mismatches = outcomes.iter().filter(|o| o.1).count() as u64;
    let first_failure = outcomes
        .iter()
        .position(|o| o.0 || o.1)
        .map(|i| Configuration::from_index(region.clone(), i as u64).to_string());
    Ok(DualityReport { region: region.descriptor(), checked: 1 << e, violations, interface_mismatches, first_failure })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeftmostReport {
    pub n: usize,
    pub configurations: u64,
    pub with_crossing: u64,
    pub flips: u64,
    pub violations: u64,
    pub first_failure: Option<String>,
}

impl LeftmostReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "check": "leftmost_measurability", "n": self.n, "configurations": self.configurations,
            "with_crossing": self.with_crossing, "flips": self.flips, "violations": self.violations,
            "first_failure": self.first_failure,
        })
    }
}

/// For every configuration of the `n` by `n` square with a vertical
/// crossing, flip each edge strictly right of the left-most crossing and
/// check that the left-most crossing does not move.
pub fn verify_leftmost_measurability(n: usize, cap: usize) -> Result<LeftmostReport> {
    let s = Rect::with_size(n, n)?;
    let region: Region = s.into();
    let e = check_cap(&region, cap)?;
    let per: Vec<(bool, u64, u64)> = (0..1u64 << e)
        .into_par_iter()
        .map_init(
            || Configuration::closed(region.clone()),
            |c, idx| {
                c.set_index(idx);
                let Ok(Some(lv)) = leftmost_v_crossing(c, &s) else {
                    return (false, 0, 0);
                };
                let right: Vec<Edge> = edges_right_of(&s, &lv);
                let mut bad = 0;
                for edge in &right {
                    let id = region.edge_index(edge).expect("edge of the square");
                    c.flip(id);
                    if leftmost_v_crossing(c, &s).ok().flatten().as_ref() != Some(&lv) {
                        bad += 1;
                    }
                    c.flip(id);
                }
                (true, right.len() as u64, bad)
            },
        )
        .collect();
    let first_failure =
        per.iter().position(|t| t.2 > 0).map(|i| Configuration::from_index(region.clone(), i as u64).to_string());
    Ok(LeftmostReport {
        n,
        configurations: 1 << e,
        with_crossing: per.iter().filter(|t| t.0).count() as u64,
        flips: per.iter().map(|t| t.1).sum(),
        violations: per.iter().map(|t| t.2).sum(),
        first_failure,
    })
}

#[derive(Debug, Clone)]
pub struct ProductReport {
    pub region: String,
    pub events: Vec<String>,
    pub p: BigRational,
    pub joint: BigRational,
    pub product: BigRational,
}

impl ProductReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "check": "product", "region": self.region, "events": self.events, "p": self.p.to_string(),
            "joint": self.joint.to_string(), "product": self.product.to_string(),
            "joint_ge_product": self.joint >= self.product, "equal": self.joint == self.product,
        })
    }
}

/// Exact `Pr(A_1 and ... and A_k)` next to `prod Pr(A_i)`.
pub fn joint_and_product(region: &Region, events: &[Event], p: &BigRational, cap: usize) -> Result<ProductReport> {
    let tables = events.iter().map(|e| truth_table(region, e, cap)).collect::<Result<Vec<_>>>()?;
    let product = tables.iter().fold(BigRational::one(), |acc, t| acc * t.result().probability(p));
    let joint = tables[1..].iter().fold(tables[0].clone(), |acc, t| acc.and(t)).result().probability(p);
    Ok(ProductReport {
        region: region.descriptor(),
        events: events.iter().map(Event::name).collect(),
        p: p.clone(),
        joint,
        product,
    })
}

/// Increasing crossing-event pairs on regions of at most 12 edges, used for
/// the exact correlation checks.
pub fn harris_pairs() -> Vec<(Region, Event, Event)> {
    let sq = Rect::with_size(1, 1).unwrap();
    let r21 = Rect::with_size(2, 1).unwrap();
    let r12 = Rect::with_size(1, 2).unwrap();
    let sq2 = Rect::with_size(2, 2).unwrap();
    let left = Rect::with_size(1, 1).unwrap();
    let x = x_event_geometry(2, 1).unwrap();
    vec![
        (sq.into(), Event::H(sq), Event::H(sq)),
        (sq.into(), Event::H(sq), Event::V(sq)),
        (r21.into(), Event::H(r21), Event::V(r21)),
        (r21.into(), Event::V(left), Event::H(r21)),
        (r12.into(), Event::H(r12), Event::V(Rect::with_size(1, 1).unwrap())),
        (sq2.into(), Event::H(sq2), Event::V(sq2)),
        (x.r.into(), Event::X { r: x.r, s: x.s }, Event::H(x.r)),
    ]
}

/// Exhaustive checks bundled for the command line. Instances above
/// `max_edges` are listed as skipped.
pub fn verify_suite(max_edges: usize) -> serde_json::Value {
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    let mut pass = true;
    let mut push = |name: String, r: Result<(serde_json::Value, bool)>| match r {
        Ok((v, ok)) => {
            pass &= ok;
            checks.push(v);
        }
        Err(Error::CapExceeded { edges, .. }) => skipped.push(json!({ "check": name, "edges": edges })),
        Err(e) => {
            pass = false;
            checks.push(json!({ "check": name, "error": e.to_string() }));
        }
    };
    let ps = [rat(1, 4), rat(1, 3), rat(1, 2), rat(3, 4)];

    for (k, l) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2)] {
        let r = Rect::with_size(k, l).unwrap();
        push(format!("duality {k}x{l}"), verify_duality_exhaustive(&r, max_edges).map(|d| (d.to_json(), d.passed())));
    }
    for (k, l) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        for p in &ps {
            push(
                format!("self_duality {k},{l}"),
                verify_self_duality(k, l, p, max_edges).map(|r| (r.to_json(), r.holds && r.polynomial_identity)),
            );
        }
    }
    for (region, a, b) in harris_pairs() {
        for p in &ps {
            push(format!("harris {}", a.name()), verify_harris(&region, &a, &b, p, max_edges).map(|r| (r.to_json(), r.holds)));
        }
    }
    let g = Rect::with_size(3, 1).unwrap();
    let (s1, s2) = crate::crossing::end_squares(&g, Orientation::Horizontal).unwrap();
    for p in &ps {
        let r = joint_and_product(&g.into(), &[Event::H(g), Event::V(s1), Event::V(s2)], p, max_edges);
        push("g_product".into(), r.map(|r| { let ok = r.joint >= r.product; (r.to_json(), ok) }));
    }
    for (m, n) in [(1, 1), (2, 1)] {
        for p in &ps {
            push(format!("x_inequality {m},{n}"), verify_lemma_x(m, n, p, max_edges).map(|r| (r.to_json(), r.holds)));
        }
    }
    for n in [1, 2] {
        push(
            format!("leftmost {n}"),
            verify_leftmost_measurability(n, max_edges).map(|r| {
                let ok = r.violations == 0;
                (r.to_json(), ok)
            }),
        );
    }
    json!({ "max_edges": max_edges, "pass": pass, "checks": checks, "skipped": skipped })
}

/// `true` iff every coefficient lies in `[0, C(E, j)]`.
pub fn coefficients_in_range(r: &ExactResult) -> bool {
    r.coefficients
        .iter()
        .enumerate()
        .all(|(j, &c)| BigInt::from(c) <= binomial(BigInt::from(r.edges), BigInt::from(j)) && !BigInt::from(c).is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq() -> Rect {
        Rect::with_size(1, 1).unwrap()
    }

    #[test]
    fn unit_square_h_is_top_or_bottom() {
        let r = exact_count(&sq().into(), &Event::H(sq()), DEFAULT_CAP).unwrap();
        // edges: bottom, top, left, right; H iff bit 0 or bit 1
        assert_eq!(r.coefficients, vec![0, 2, 5, 4, 1]);
        for (n, d) in [(1, 3), (1, 2), (2, 7)] {
            let p = rat(n, d);
            let q = BigRational::one() - &p;
            assert_eq!(r.probability(&p), BigRational::one() - &q * &q);
        }
        // 1 - (1-p)^2 = 2p - p^2
        let two = BigInt::from(2);
        assert_eq!(r.polynomial(), vec![BigInt::zero(), two, BigInt::from(-1), BigInt::zero(), BigInt::zero()]);
    }

    #[test]
    fn zero_probability_without_empty_member() {
        let r = exact_count(&sq().into(), &Event::H(sq()), DEFAULT_CAP).unwrap();
        assert!(r.probability(&BigRational::zero()).is_zero());
        assert!(r.probability(&BigRational::one()).is_one());
    }

    #[test]
    fn two_by_one_at_half() {
        let r = Rect::with_size(2, 1).unwrap();
        let h = exact_count(&r.into(), &Event::H(r), DEFAULT_CAP).unwrap();
        assert_eq!(h.probability(&rat(1, 2)), rat(1, 2));
        assert_eq!(h.total(), 64);
    }

    #[test]
    fn cap_is_enforced() {
        let r = Rect::with_size(4, 3).unwrap();
        assert_eq!(
            exact_count(&r.into(), &Event::H(r), DEFAULT_CAP).unwrap_err(),
            Error::CapExceeded { edges: 31, cap: 22 }
        );
    }

    #[test]
    fn complementary_coefficients_sum_to_binomials() {
        let r = Rect::with_size(2, 2).unwrap();
        let t = truth_table(&r.into(), &Event::H(r), DEFAULT_CAP).unwrap();
        let a = t.result();
        let b = t.not().result();
        for j in 0..=a.edges {
            let sum = BigInt::from(a.coefficients[j] + b.coefficients[j]);
            assert_eq!(sum, binomial(BigInt::from(a.edges), BigInt::from(j)));
        }
        assert!(coefficients_in_range(&a));
    }

    #[test]
    fn self_duality_small() {
        let r = verify_self_duality(2, 2, &rat(1, 3), DEFAULT_CAP).unwrap();
        assert!(r.holds && r.polynomial_identity);
        let r = verify_self_duality(2, 2, &rat(1, 2), DEFAULT_CAP).unwrap();
        assert_eq!(r.pr_h, rat(1, 2));
        let r = verify_self_duality(3, 2, &BigRational::zero(), DEFAULT_CAP).unwrap();
        assert!(r.pr_h.is_zero() && r.pr_v.is_one());
    }

    #[test]
    fn harris_examples() {
        let s: Region = sq().into();
        let same = verify_harris(&s, &Event::H(sq()), &Event::H(sq()), &rat(1, 2), DEFAULT_CAP).unwrap();
        assert_eq!((same.lhs.clone(), same.rhs.clone()), (rat(3, 4), rat(9, 16)));
        let hv = verify_harris(&s, &Event::H(sq()), &Event::V(sq()), &rat(1, 2), DEFAULT_CAP).unwrap();
        assert!(hv.equality());
        assert_eq!(hv.lhs, rat(9, 16));
        let not_h = Event::Not(Box::new(Event::H(sq())));
        assert!(matches!(verify_harris(&s, &Event::H(sq()), &not_h, &rat(1, 2), DEFAULT_CAP), Err(Error::NotIncreasing(_))));
    }

    #[test]
    fn compose_reverses_argument() {
        // 1 + x  ->  2 - x
        let a = vec![BigInt::one(), BigInt::one()];
        assert_eq!(compose_one_minus(&a), vec![BigInt::from(2), BigInt::from(-1)]);
    }

    #[test]
    fn duality_two_by_one() {
        let d = verify_duality_exhaustive(&Rect::with_size(2, 1).unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!((d.checked, d.violations, d.interface_mismatches), (128, 0, 0));
        let d = verify_duality_exhaustive(&sq(), DEFAULT_CAP).unwrap();
        assert!(d.passed());
    }

    #[test]
    fn lemma_x_at_one() {
        let r = verify_lemma_x(1, 1, &BigRational::one(), DEFAULT_CAP).unwrap();
        assert!(r.pr_x.is_one() && r.holds);
    }
}
