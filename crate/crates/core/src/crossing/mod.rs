//! Crossing events, witnesses and cluster structure.
//!
//! Detectors only consult edges of the rectangle they are asked about, so a
//! configuration may live on any region containing it (including a torus,
//! where planar coordinates wrap).

mod events;
mod interface;

pub use events::{
    circuit_by_winding, detect_circuit, Event, detect_g, detect_x, end_squares, x_event_geometry, XGeometry,
};
pub use interface::{edges_right_of, interface_decision, leftmost_v_crossing, InterfaceResult, Side};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::lattice::{DualRect, Edge, GridShape, Orientation, Rect, Region, Vertex};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lattice {
    Primal,
    Dual,
}

/// An explicit open path certifying a crossing. For dual witnesses the
/// vertices hold dual indices `(i, j)`, i.e. the points `(i + 1/2, j + 1/2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathWitness {
    pub lattice: Lattice,
    pub vertices: Vec<Vertex>,
}

impl PathWitness {
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices.windows(2).filter_map(|w| Edge::between(w[0], w[1]))
    }

    /// `{"lattice": "primal", "vertices": [[x, y], ...]}`
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lattice": self.lattice,
            "vertices": self.vertices.iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
        })
    }

    /// Independent check of a witness: consecutive vertices adjacent, every
    /// step open, all vertices inside the box, endpoints on opposite sides.
    pub fn check(
        &self,
        open: impl Fn(&Edge) -> bool,
        bounds: (i64, i64, i64, i64),
        dir: Orientation,
    ) -> Result<(), String> {
        let (x0, y0, x1, y1) = bounds;
        let vs = &self.vertices;
        let (first, last) = match (vs.first(), vs.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => return Err("empty witness".into()),
        };
        for v in vs {
            if v.x < x0 || v.x > x1 || v.y < y0 || v.y > y1 {
                return Err(format!("vertex {v} outside box"));
            }
        }
        for w in vs.windows(2) {
            let e = Edge::between(w[0], w[1]).ok_or_else(|| format!("{} and {} not adjacent", w[0], w[1]))?;
            if !open(&e) {
                return Err(format!("edge {}-{} is not open", w[0], w[1]));
            }
        }
        let ok = match dir {
            Orientation::Horizontal => first.x == x0 && last.x == x1,
            Orientation::Vertical => first.y == y0 && last.y == y1,
        };
        if ok {
            Ok(())
        } else {
            Err(format!("endpoints {first} and {last} not on opposite sides"))
        }
    }

    /// Validate a primal witness against a configuration.
    pub fn validate(&self, config: &Configuration, r: &Rect, dir: Orientation) -> Result<(), String> {
        if self.lattice != Lattice::Primal {
            return Err("expected a primal witness".into());
        }
        self.check(|e| config.edge_open(e), (r.x0, r.y0, r.x1, r.y1), dir)
    }

    /// Validate a dual witness against the primal configuration it came
    /// from: a dual step is open iff the primal edge it crosses is closed.
    pub fn validate_dual(&self, config: &Configuration, d: &DualRect, dir: Orientation) -> Result<(), String> {
        if self.lattice != Lattice::Dual {
            return Err("expected a dual witness".into());
        }
        self.check(|e| !config.edge_open(&e.from_dual()), (d.i0, d.j0, d.i1, d.j1), dir)
    }
}

/// Breadth-first search for a crossing of a box; returns the vertex path.
pub(crate) fn find_crossing(shape: GridShape, open: impl Fn(&Edge) -> bool, dir: Orientation) -> Option<Vec<Vertex>> {
    let (w, h) = (shape.w, shape.h);
    let n = shape.vertex_count();
    let idx = |lx: usize, ly: usize| ly * (w + 1) + lx;
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let sources: Vec<usize> = match dir {
        Orientation::Horizontal => (0..=h).map(|ly| idx(0, ly)).collect(),
        Orientation::Vertical => (0..=w).map(|lx| idx(lx, 0)).collect(),
    };
    for s in sources {
        parent[s] = s;
        queue.push_back(s);
    }
    let at_target = |i: usize| match dir {
        Orientation::Horizontal => i % (w + 1) == w,
        Orientation::Vertical => i / (w + 1) == h,
    };
    let (ox, oy) = (shape.ox, shape.oy);
    while let Some(cur) = queue.pop_front() {
        if at_target(cur) {
            let mut path = vec![cur];
            let mut c = cur;
            while parent[c] != c {
                c = parent[c];
                path.push(c);
            }
            path.reverse();
            return Some(path.into_iter().map(|i| shape.vertex(i)).collect());
        }
        let (lx, ly) = (cur % (w + 1), cur / (w + 1));
        let (x, y) = (ox + lx as i64, oy + ly as i64);
        let mut visit = |nb: usize, e: Edge, queue: &mut VecDeque<usize>| {
            if parent[nb] == usize::MAX && open(&e) {
                parent[nb] = cur;
                queue.push_back(nb);
            }
        };
        if lx < w {
            visit(idx(lx + 1, ly), Edge::horizontal(x, y), &mut queue);
        }
        if lx > 0 {
            visit(idx(lx - 1, ly), Edge::horizontal(x - 1, y), &mut queue);
        }
        if ly < h {
            visit(idx(lx, ly + 1), Edge::vertical(x, y), &mut queue);
        }
        if ly > 0 {
            visit(idx(lx, ly - 1), Edge::vertical(x, y - 1), &mut queue);
        }
    }
    None
}

/// Open crossing of `r` in direction `dir`, using only edges of `r`.
pub fn crossing(config: &Configuration, r: &Rect, dir: Orientation) -> Option<PathWitness> {
    find_crossing(r.shape(), |e| config.edge_open(e), dir)
        .map(|vertices| PathWitness { lattice: Lattice::Primal, vertices })
}

pub fn h_crossing(config: &Configuration, r: &Rect) -> Option<PathWitness> {
    crossing(config, r, Orientation::Horizontal)
}

pub fn v_crossing(config: &Configuration, r: &Rect) -> Option<PathWitness> {
    crossing(config, r, Orientation::Vertical)
}

/// H(R): an open left-right path inside `r`.
pub fn has_h_crossing(config: &Configuration, r: &Rect) -> bool {
    h_crossing(config, r).is_some()
}

/// V(R): an open top-bottom path inside `r`.
pub fn has_v_crossing(config: &Configuration, r: &Rect) -> bool {
    v_crossing(config, r).is_some()
}

/// Crossing of a dual rectangle by edges open in a configuration that lives
/// on a dual region.
pub fn dual_crossing(config: &Configuration, d: &DualRect, dir: Orientation) -> Option<PathWitness> {
    find_crossing(d.shape(), |e| config.edge_open(e), dir).map(|vertices| PathWitness { lattice: Lattice::Dual, vertices })
}

/// V*(R^h) read directly from a primal configuration on `r`: a vertical
/// crossing of the horizontal dual by dual edges whose primal partners are
/// closed.
pub fn dual_v_crossing_of(config: &Configuration, r: &Rect) -> Option<PathWitness> {
    let d = crate::lattice::dual_rect(r).dual;
    find_crossing(d.shape(), |e| !config.edge_open(&e.from_dual()), Orientation::Vertical)
        .map(|vertices| PathWitness { lattice: Lattice::Dual, vertices })
}

/// Union-find over the vertices of `r` (local row-major indices) joined by
/// open edges of `r`.
pub(crate) fn rect_union_find(config: &Configuration, r: &Rect) -> UnionFind {
    let s = r.shape();
    let mut uf = UnionFind::new(s.vertex_count());
    for i in 0..s.edge_count() {
        let e = s.edge(i);
        if config.edge_open(&e) {
            let (a, b) = e.endpoints();
            uf.union(s.vertex_index(a).unwrap(), s.vertex_index(b).unwrap());
        }
    }
    uf
}

/// Partition of a region's vertices into open clusters.
#[derive(Debug, Clone)]
pub struct Clusters {
    region: Region,
    uf: UnionFind,
}

impl Clusters {
    pub fn same(&mut self, a: Vertex, b: Vertex) -> bool {
        match (self.region.vertex_index(a), self.region.vertex_index(b)) {
            (Some(i), Some(j)) => self.uf.same(i, j),
            _ => false,
        }
    }

    pub fn size_of(&mut self, v: Vertex) -> usize {
        self.region.vertex_index(v).map_or(0, |i| self.uf.set_size(i))
    }

    pub fn sets(&mut self) -> Vec<Vec<Vertex>> {
        let region = &self.region;
        self.uf.sets().into_iter().map(|s| s.into_iter().map(|i| region.vertex(i)).collect()).collect()
    }

    pub fn count(&mut self) -> usize {
        self.uf.sets().len()
    }
}

/// Open clusters of the whole region.
pub fn clusters(config: &Configuration) -> Clusters {
    let region = config.region().clone();
    let mut uf = UnionFind::new(region.vertex_count());
    for id in config.open_edges() {
        let (a, b) = region.edge(id).endpoints();
        if let (Some(i), Some(j)) = (region.vertex_index(a), region.vertex_index(b)) {
            uf.union(i, j);
        }
    }
    Clusters { region, uf }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{dualize, sample};
    use crate::lattice::{dual_rect, EdgeId};

    fn unit() -> (Rect, Region) {
        let r = Rect::with_size(1, 1).unwrap();
        (r, r.into())
    }

    #[test]
    fn clusters_extremes() {
        let r = Rect::with_size(3, 2).unwrap();
        let mut all = clusters(&Configuration::open(r.into()));
        assert_eq!(all.sets().len(), 1);
        assert_eq!(all.size_of(Vertex::new(0, 0)), 12);
        let mut none = clusters(&Configuration::closed(r.into()));
        assert_eq!(none.count(), 12);
    }

    #[test]
    fn clusters_single_bottom_edge() {
        let (r, region) = unit();
        let mut c = Configuration::closed(region.clone());
        c.set(region.edge_index(&Edge::horizontal(0, 0)).unwrap(), true);
        let mut cl = clusters(&c);
        assert_eq!(
            cl.sets(),
            vec![vec![Vertex::new(0, 0), Vertex::new(1, 0)], vec![Vertex::new(0, 1)], vec![Vertex::new(1, 1)]]
        );
        assert!(has_h_crossing(&c, &r));
        assert!(!has_v_crossing(&c, &r));
    }

    #[test]
    fn unit_square_crossings() {
        let (r, region) = unit();
        assert!(has_h_crossing(&Configuration::open(region.clone()), &r));
        assert!(!has_h_crossing(&Configuration::closed(region.clone()), &r));
        assert!(!has_v_crossing(&Configuration::closed(region.clone()), &r));

        let mut top = Configuration::closed(region.clone());
        top.set(region.edge_index(&Edge::horizontal(0, 1)).unwrap(), true);
        assert!(has_h_crossing(&top, &r));

        let mut left = Configuration::closed(region.clone());
        left.set(region.edge_index(&Edge::vertical(0, 0)).unwrap(), true);
        assert!(has_v_crossing(&left, &r));

        // H on the unit square holds iff the top or bottom edge is open
        let mut count = 0;
        for i in 0..16 {
            let c = Configuration::from_index(region.clone(), i);
            let expect = c.is_open(EdgeId(0)) || c.is_open(EdgeId(1));
            assert_eq!(has_h_crossing(&c, &r), expect);
            count += expect as usize;
        }
        assert_eq!(count, 12);
    }

    #[test]
    fn witnesses_validate() {
        let r = Rect::with_size(9, 7).unwrap();
        for seed in 0..50 {
            let c = sample(&r.into(), 0.55, seed, 0);
            if let Some(w) = h_crossing(&c, &r) {
                w.validate(&c, &r, Orientation::Horizontal).unwrap();
            }
            if let Some(w) = v_crossing(&c, &r) {
                w.validate(&c, &r, Orientation::Vertical).unwrap();
            }
            if let Some(w) = dual_v_crossing_of(&c, &r) {
                w.validate_dual(&c, &dual_rect(&r).dual, Orientation::Vertical).unwrap();
            }
        }
    }

    #[test]
    fn validator_rejects_bad_paths() {
        let (r, region) = unit();
        let c = Configuration::closed(region);
        let w = PathWitness { lattice: Lattice::Primal, vertices: vec![Vertex::new(0, 0), Vertex::new(1, 0)] };
        assert!(w.validate(&c, &r, Orientation::Horizontal).is_err());
        let open = Configuration::open(r.into());
        assert!(w.validate(&open, &r, Orientation::Horizontal).is_ok());
        assert!(w.validate(&open, &r, Orientation::Vertical).is_err());
        let jump = PathWitness { lattice: Lattice::Primal, vertices: vec![Vertex::new(0, 0), Vertex::new(1, 1)] };
        assert!(jump.validate(&open, &r, Orientation::Horizontal).is_err());
    }

    #[test]
    fn dual_crossing_on_dualized_config_matches_direct_reading() {
        let r = Rect::with_size(4, 3).unwrap();
        let d = dual_rect(&r).dual;
        for seed in 0..40 {
            let c = sample(&r.into(), 0.5, seed, 1);
            let dc = dualize(&c).unwrap();
            assert_eq!(
                dual_crossing(&dc, &d, Orientation::Vertical).is_some(),
                dual_v_crossing_of(&c, &r).is_some()
            );
        }
    }

    #[test]
    fn witness_json_shape() {
        let w = PathWitness { lattice: Lattice::Dual, vertices: vec![Vertex::new(0, -1), Vertex::new(0, 0)] };
        assert_eq!(w.to_json().to_string(), r#"{"lattice":"dual","vertices":[[0,-1],[0,0]]}"#);
    }
}
