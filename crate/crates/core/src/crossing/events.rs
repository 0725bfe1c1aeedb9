//! Composite crossing events: X(R), G(R) and annulus circuits.

use std::collections::VecDeque;

use crate::config::Configuration;
use crate::crossing::{dual_v_crossing_of, has_h_crossing, has_v_crossing, rect_union_find};
use crate::error::{Error, Result};
use crate::lattice::{Annulus, Edge, Orientation, Rect, Region, Vertex};
use crate::unionfind::UnionFind;

/// An event evaluated on a configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Always,
    H(Rect),
    V(Rect),
    /// Vertical dual crossing of the horizontal dual of a primal rectangle.
    DualV(Rect),
    X { r: Rect, s: Rect },
    G(Rect, Orientation),
    Circuit(Annulus),
    And(Vec<Event>),
    Not(Box<Event>),
}

impl Event {
    pub fn holds(&self, c: &Configuration) -> bool {
        match self {
            Event::Always => true,
            Event::H(r) => has_h_crossing(c, r),
            Event::V(r) => has_v_crossing(c, r),
            Event::DualV(r) => dual_v_crossing_of(c, r).is_some(),
            Event::X { r, s } => detect_x(c, r, s).unwrap_or(false),
            Event::G(r, o) => detect_g(c, r, *o).unwrap_or(false),
            Event::Circuit(a) => detect_circuit(c, a),
            Event::And(es) => es.iter().all(|e| e.holds(c)),
            Event::Not(e) => !e.holds(c),
        }
    }

    pub fn and(self, other: Event) -> Event {
        Event::And(vec![self, other])
    }

    /// Short event name as used in reports and on the command line.
    pub fn name(&self) -> String {
        let rect = |r: &Rect| format!("{},{},{},{}", r.x0, r.y0, r.x1, r.y1);
        match self {
            Event::Always => "always".into(),
            Event::H(r) => format!("H[{}]", rect(r)),
            Event::V(r) => format!("V[{}]", rect(r)),
            Event::DualV(r) => format!("Vdual[{}]", rect(r)),
            Event::X { r, s } => format!("X[{};{}]", rect(r), rect(s)),
            Event::G(r, Orientation::Horizontal) => format!("Gh[{}]", rect(r)),
            Event::G(r, Orientation::Vertical) => format!("Gv[{}]", rect(r)),
            Event::Circuit(a) => format!("circuit[{},{},{},{}]", a.center.i, a.center.j, a.inner, a.outer),
            Event::And(es) => es.iter().map(Event::name).collect::<Vec<_>>().join("&"),
            Event::Not(e) => format!("!{}", e.name()),
        }
    }

    /// Event named `kind` on a whole region: `h`, `v`, `dualv`, `x`, `gh`,
    /// `gv` on rectangles, `circuit` on annuli, `always` anywhere.
    pub fn on_region(kind: &str, region: &Region) -> Result<Event> {
        let bad = || Error::InvalidArgument(format!("event `{kind}` is not defined on {region}"));
        if kind == "always" {
            return Ok(Event::Always);
        }
        if let Region::Annulus(layout) = region {
            return if kind == "circuit" { Ok(Event::Circuit(layout.annulus)) } else { Err(bad()) };
        }
        let r = *region.as_rect().filter(|_| matches!(region, Region::Rect(_))).ok_or_else(bad)?;
        match kind {
            "h" => Ok(Event::H(r)),
            "v" => Ok(Event::V(r)),
            "dualv" => Ok(Event::DualV(r)),
            "gh" => end_squares(&r, Orientation::Horizontal).map(|_| Event::G(r, Orientation::Horizontal)),
            "gv" => end_squares(&r, Orientation::Vertical).map(|_| Event::G(r, Orientation::Vertical)),
            "x" => {
                if r.height() % 2 != 0 || r.width() < r.height() / 2 {
                    return Err(bad());
                }
                let n = (r.height() / 2) as i64;
                Ok(Event::X { r, s: Rect::new(r.x0, r.y0, r.x0 + n, r.y0 + n)? })
            }
            _ => Err(bad()),
        }
    }
}

/// `R = [0, m] x [0, 2n]` and its lower-left square `S = [0, n] x [0, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XGeometry {
    pub r: Rect,
    pub s: Rect,
}

pub fn x_event_geometry(m: usize, n: usize) -> Result<XGeometry> {
    if n == 0 || m < n {
        return Err(Error::InvalidArgument(format!("X(R) needs m >= n >= 1, got m={m}, n={n}")));
    }
    Ok(XGeometry { r: Rect::with_size(m, 2 * n)?, s: Rect::with_size(n, n)? })
}

/// X(R): some open vertical crossing P1 of S is joined inside R by an open
/// path to the right side of R.
///
/// Evaluated on clusters: an open cluster of S containing a vertical
/// crossing, any vertex of which reaches `x = x1` inside R.
pub fn detect_x(config: &Configuration, r: &Rect, s: &Rect) -> Result<bool> {
    let n = s.width();
    if s.height() != n || s.x0 != r.x0 || s.y0 != r.y0 || r.height() != 2 * n || r.width() < n {
        return Err(Error::InvalidArgument(format!("S={s:?} is not the lower-left half-height square of R={r:?}")));
    }
    let ss = s.shape();
    let rs = r.shape();
    let mut in_s = rect_union_find(config, s);
    let mut in_r = rect_union_find(config, r);

    let mut touches_bottom = vec![false; ss.vertex_count()];
    let mut touches_top = vec![false; ss.vertex_count()];
    for x in s.x0..=s.x1 {
        let b = in_s.find(ss.vertex_index(Vertex::new(x, s.y0)).unwrap());
        touches_bottom[b] = true;
        let t = in_s.find(ss.vertex_index(Vertex::new(x, s.y1)).unwrap());
        touches_top[t] = true;
    }
    let mut touches_right = vec![false; rs.vertex_count()];
    for y in r.y0..=r.y1 {
        let root = in_r.find(rs.vertex_index(Vertex::new(r.x1, y)).unwrap());
        touches_right[root] = true;
    }
    for v in s.vertices() {
        let root = in_s.find(ss.vertex_index(v).unwrap());
        if touches_bottom[root] && touches_top[root] {
            let rr = in_r.find(rs.vertex_index(v).unwrap());
            if touches_right[rr] {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// The two end squares of a 3n by n (horizontal) or n by 3n (vertical)
/// rectangle: left/right or bottom/top.
pub fn end_squares(r: &Rect, orientation: Orientation) -> Result<(Rect, Rect)> {
    match orientation {
        Orientation::Horizontal if r.width() == 3 * r.height() => {
            let n = r.height() as i64;
            Ok((Rect::new(r.x0, r.y0, r.x0 + n, r.y1)?, Rect::new(r.x1 - n, r.y0, r.x1, r.y1)?))
        }
        Orientation::Vertical if r.height() == 3 * r.width() => {
            let n = r.width() as i64;
            Ok((Rect::new(r.x0, r.y0, r.x1, r.y0 + n)?, Rect::new(r.x0, r.y1 - n, r.x1, r.y1)?))
        }
        _ => Err(Error::InvalidArgument(format!("{r:?} does not have aspect 3:1 along {orientation:?}"))),
    }
}

/// G(R): R crossed the long way and both end squares crossed the short way.
pub fn detect_g(config: &Configuration, r: &Rect, orientation: Orientation) -> Result<bool> {
    let (a, b) = end_squares(r, orientation)?;
    Ok(match orientation {
        Orientation::Horizontal => {
            has_v_crossing(config, &a) && has_v_crossing(config, &b) && has_h_crossing(config, r)
        }
        Orientation::Vertical => {
            has_h_crossing(config, &a) && has_h_crossing(config, &b) && has_v_crossing(config, r)
        }
    })
}

fn open_in(config: &Configuration, annulus: &Annulus, e: &Edge) -> bool {
    let (a, b) = e.endpoints();
    annulus.contains(a) && annulus.contains(b) && config.edge_open(e)
}

/// Open circuit in the annulus surrounding its centre, decided by dual
/// blocking: no chain of faces leads from the centre face to the outside
/// without crossing an open annulus edge.
pub fn detect_circuit(config: &Configuration, annulus: &Annulus) -> bool {
    let b = annulus.bounding_rect();
    let (fx0, fy0) = (b.x0 - 1, b.y0 - 1);
    let fw = (b.x1 - fx0 + 1) as usize;
    let fh = (b.y1 - fy0 + 1) as usize;
    let outside = fw * fh;
    let face = |i: i64, j: i64| (j - fy0) as usize * fw + (i - fx0) as usize;
    let mut uf = UnionFind::new(outside + 1);
    for j in fy0..=b.y1 {
        for i in fx0..=b.x1 {
            if i == fx0 || i == b.x1 || j == fy0 || j == b.y1 {
                uf.union(face(i, j), outside);
            }
            if i < b.x1 && !open_in(config, annulus, &Edge::vertical(i + 1, j)) {
                uf.union(face(i, j), face(i + 1, j));
            }
            if j < b.y1 && !open_in(config, annulus, &Edge::horizontal(i, j + 1)) {
                uf.union(face(i, j), face(i, j + 1));
            }
        }
    }
    !uf.same(face(annulus.center.i, annulus.center.j), outside)
}

/// Independent circuit test: an open cycle with nonzero winding number
/// about the centre exists iff some open component assigns inconsistent
/// winding potentials, counting signed crossings of the ray `y = cy + 1/2`,
/// `x > cx + 1/2`.
pub fn circuit_by_winding(config: &Configuration, annulus: &Annulus) -> bool {
    let region: Region = (*annulus).into();
    let n = region.vertex_count();
    let (cx, cy) = (annulus.center.i, annulus.center.j);
    let weight = |from: Vertex, to: Vertex| -> i64 {
        if from.x == to.x && from.x > cx && from.y.min(to.y) == cy {
            to.y - from.y
        } else {
            0
        }
    };
    let mut potential: Vec<Option<i64>> = vec![None; n];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if potential[start].is_some() {
            continue;
        }
        potential[start] = Some(0);
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let v = region.vertex(i);
            let pv = potential[i].unwrap();
            let nbrs = [(1, 0), (-1, 0), (0, 1), (0, -1)].map(|(dx, dy)| Vertex::new(v.x + dx, v.y + dy));
            for u in nbrs {
                let e = Edge::between(v, u).unwrap();
                if !open_in(config, annulus, &e) {
                    continue;
                }
                let j = region.vertex_index(u).unwrap();
                let expect = pv + weight(v, u);
                match potential[j] {
                    None => {
                        potential[j] = Some(expect);
                        queue.push_back(j);
                    }
                    Some(p) if p != expect => return true,
                    Some(_) => {}
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::sample;
    use crate::lattice::DualVertex;

    #[test]
    fn x_all_open_and_explicit_witness() {
        let g = x_event_geometry(1, 1).unwrap();
        assert!(detect_x(&Configuration::open(g.r.into()), &g.r, &g.s).unwrap());
        let region: Region = g.r.into();
        let mut c = Configuration::closed(region.clone());
        c.set(region.edge_index(&Edge::vertical(0, 0)).unwrap(), true);
        c.set(region.edge_index(&Edge::horizontal(0, 0)).unwrap(), true);
        assert!(detect_x(&c, &g.r, &g.s).unwrap());
        c.set(region.edge_index(&Edge::vertical(0, 0)).unwrap(), false);
        assert!(!detect_x(&c, &g.r, &g.s).unwrap());
    }

    #[test]
    fn x_rejects_bad_geometry() {
        assert!(x_event_geometry(1, 2).is_err());
        let r = Rect::with_size(4, 4).unwrap();
        let s = Rect::new(1, 0, 3, 2).unwrap();
        assert!(detect_x(&Configuration::open(r.into()), &r, &s).is_err());
    }

    #[test]
    fn x_implies_v_of_s() {
        let g = x_event_geometry(5, 3).unwrap();
        for seed in 0..200 {
            let c = sample(&g.r.into(), 0.5, seed, 0);
            if detect_x(&c, &g.r, &g.s).unwrap() {
                assert!(has_v_crossing(&c, &g.s));
            }
        }
    }

    #[test]
    fn g_event() {
        let r = Rect::with_size(6, 2).unwrap();
        assert!(detect_g(&Configuration::open(r.into()), &r, Orientation::Horizontal).unwrap());
        assert!(detect_g(&Configuration::closed(r.into()), &r, Orientation::Horizontal).is_ok_and(|g| !g));
        assert!(detect_g(&Configuration::open(r.into()), &r, Orientation::Vertical).is_err());

        // bottom row open gives H(R) but the left square has no vertical crossing
        let region: Region = r.into();
        let mut c = Configuration::closed(region.clone());
        for x in 0..6 {
            c.set(region.edge_index(&Edge::horizontal(x, 0)).unwrap(), true);
        }
        for y in 0..2 {
            c.set(region.edge_index(&Edge::vertical(5, y)).unwrap(), true);
        }
        assert!(has_h_crossing(&c, &r));
        assert!(!detect_g(&c, &r, Orientation::Horizontal).unwrap());

        let rv = Rect::with_size(2, 6).unwrap();
        assert!(detect_g(&Configuration::open(rv.into()), &rv, Orientation::Vertical).unwrap());
    }

    #[test]
    fn circuit_extremes() {
        let a = Annulus::new(DualVertex::new(0, 0), 1, 3).unwrap();
        let region: Region = a.into();
        assert!(detect_circuit(&Configuration::open(region.clone()), &a));
        assert!(!detect_circuit(&Configuration::closed(region.clone()), &a));
        assert!(circuit_by_winding(&Configuration::open(region.clone()), &a));
        assert!(!circuit_by_winding(&Configuration::closed(region), &a));
    }

    #[test]
    fn band_crossings_force_a_circuit() {
        let a = Annulus::new(DualVertex::new(2, -1), 2, 6).unwrap();
        let region: Region = a.into();
        for seed in 0..300 {
            let c = sample(&region, 0.6, seed, 0);
            let all = a.bands().unwrap().iter().all(|(band, o)| match o {
                Orientation::Horizontal => has_h_crossing(&c, band),
                Orientation::Vertical => has_v_crossing(&c, band),
            });
            if all {
                assert!(detect_circuit(&c, &a));
            }
        }
    }

    #[test]
    fn thin_ring_needs_every_edge() {
        let a = Annulus::new(DualVertex::new(0, 0), 1, 2).unwrap();
        let region: Region = a.into();
        assert_eq!(region.edge_count(), 12);
        for idx in 0..(1u64 << 12) {
            let c = Configuration::from_index(region.clone(), idx);
            let expect = idx == (1 << 12) - 1;
            assert_eq!(detect_circuit(&c, &a), expect);
            assert_eq!(circuit_by_winding(&c, &a), expect);
        }
    }

    #[test]
    fn config_on_enclosing_rect_ignores_edges_outside_annulus() {
        let a = Annulus::new(DualVertex::new(0, 0), 1, 3).unwrap();
        let big = Rect::new(-4, -4, 5, 5).unwrap();
        for seed in 0..100 {
            let c = sample(&big.into(), 0.55, seed, 0);
            assert_eq!(detect_circuit(&c, &a), circuit_by_winding(&c, &a), "seed {seed}");
        }
    }
}
