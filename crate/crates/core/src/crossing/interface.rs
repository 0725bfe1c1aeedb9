//! Constructive decision between a horizontal primal crossing of a rectangle
//! and a vertical dual crossing of its horizontal dual, by walking the
//! interface between the two.
//!
//! Coordinates are scaled by 4: primal vertex `(x, y)` of `R = [x0, x1] x
//! [y0, y1]` sits at `(4(x - x0), 4(y - y0) + 2)`, dual vertex `(i, j)` at
//! `(4(i - x0) + 2, 4(j - y0) + 4)`. The middle graph lives on the odd
//! points `(2a + 1, 2b + 1)`, `0 <= a < 2k`, `0 <= b < 2l + 2`; each middle
//! point is the centre of a 2x2 cell with one primal corner, one dual corner
//! and two crossing points. A middle edge crosses half of exactly one primal
//! or dual edge and belongs to M when that edge is absent from both G (open
//! primal edges plus the two vertical sides) and G^h (open dual edges plus
//! the top and bottom dual rows). M is oriented with G on its right.

use std::collections::{HashMap, HashSet};

use crate::config::Configuration;
use crate::crossing::{Lattice, PathWitness};
use crate::error::{Error, Result};
use crate::lattice::{dual_rect, rotate_ccw_vertex, rotate_cw_vertex, DualRect, Edge, Orientation, Rect, Vertex};

/// Which of H(R) and V*(R^h) holds, with a validated witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Side {
    HorizontalPrimal(PathWitness),
    VerticalDual(PathWitness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterfaceResult {
    pub side: Side,
    /// The oriented walk from the top-left corner of the middle graph, in
    /// scaled coordinates.
    pub walk: Vec<(i64, i64)>,
}

impl InterfaceResult {
    pub fn is_horizontal_primal(&self) -> bool {
        matches!(self.side, Side::HorizontalPrimal(_))
    }

    pub fn witness(&self) -> &PathWitness {
        match &self.side {
            Side::HorizontalPrimal(w) | Side::VerticalDual(w) => w,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Primal,
    Dual,
    Crossing,
}

fn kind(p: (i64, i64)) -> Kind {
    match (p.0.rem_euclid(4), p.1.rem_euclid(4)) {
        (0, 2) => Kind::Primal,
        (2, 0) => Kind::Dual,
        _ => Kind::Crossing,
    }
}

struct Frame<'a> {
    config: &'a Configuration,
    r: Rect,
    d: DualRect,
}

impl Frame<'_> {
    fn primal_at(&self, p: (i64, i64)) -> Vertex {
        Vertex::new(self.r.x0 + p.0.div_euclid(4), self.r.y0 + (p.1 - 2).div_euclid(4))
    }

    fn dual_at(&self, p: (i64, i64)) -> Vertex {
        Vertex::new(self.r.x0 + (p.0 - 2).div_euclid(4), self.r.y0 - 1 + p.1.div_euclid(4))
    }

    fn in_g(&self, e: &Edge) -> bool {
        if !self.r.contains_edge(e) {
            return false;
        }
        let side = e.orientation == Orientation::Vertical && (e.anchor.x == self.r.x0 || e.anchor.x == self.r.x1);
        side || self.config.edge_open(e)
    }

    fn in_gh(&self, e: &Edge) -> bool {
        if self.d.shape().edge_index(e).is_none() {
            return false;
        }
        self.d.is_boundary_row_edge(e) || !self.config.edge_open(&e.from_dual())
    }

    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::InterfaceInvariant { reason: reason.into(), config: self.config.to_string() }
    }

    /// The corner of the cell centred on middle point `m` of the given kind.
    fn corner(&self, m: (i64, i64), want: Kind) -> (i64, i64) {
        [(-1, -1), (1, -1), (-1, 1), (1, 1)]
            .iter()
            .map(|(dx, dy)| (m.0 + dx, m.1 + dy))
            .find(|&p| kind(p) == want)
            .expect("every cell has one primal and one dual corner")
    }
}

/// Decide which of H(R) and V*(R^h) holds by walking the interface from the
/// top-left corner. The walk ends at the top-right corner exactly when H(R)
/// holds; the witness is read off the cells along the walk and validated
/// before it is returned.
pub fn interface_decision(config: &Configuration, r: &Rect) -> Result<InterfaceResult> {
    let frame = Frame { config, r: *r, d: dual_rect(r).dual };
    let (k, l) = (r.width(), r.height());
    let (mw, mh) = (2 * k, 2 * l + 2);
    let idx = |a: usize, b: usize| b * mw + a;
    let point = |i: usize| ((2 * (i % mw) + 1) as i64, (2 * (i / mw) + 1) as i64);

    let mut out = vec![usize::MAX; mw * mh];
    let mut indeg = vec![0u8; mw * mh];
    let mut add = |m1: usize, m2: usize| -> Result<()> {
        let (p1, p2) = (point(m1), point(m2));
        let mid = ((p1.0 + p2.0) / 2, (p1.1 + p2.1) / 2);
        // the crossed half-edge runs perpendicular to the middle edge
        let (s1, s2) = if p1.1 == p2.1 { ((mid.0, mid.1 - 1), (mid.0, mid.1 + 1)) } else { ((mid.0 - 1, mid.1), (mid.0 + 1, mid.1)) };
        let (v, c) = if kind(s1) == Kind::Crossing { (s2, s1) } else { (s1, s2) };
        let far = (v.0 + 2 * (c.0 - v.0), v.1 + 2 * (c.1 - v.1));
        let (present, g_point) = match kind(v) {
            Kind::Primal => {
                let e = Edge::between(frame.primal_at(v), frame.primal_at(far)).expect("unit primal edge");
                (frame.in_g(&e), v)
            }
            Kind::Dual => {
                let e = Edge::between(frame.dual_at(v), frame.dual_at(far)).expect("unit dual edge");
                (frame.in_gh(&e), c)
            }
            Kind::Crossing => return Err(frame.fail("middle edge crosses no lattice edge")),
        };
        if present {
            return Ok(());
        }
        let dir = (p2.0 - p1.0, p2.1 - p1.1);
        let right = (dir.1, -dir.0);
        let s = (g_point.0 - mid.0) * right.0 + (g_point.1 - mid.1) * right.1;
        let (from, to) = if s > 0 { (m1, m2) } else { (m2, m1) };
        if out[from] != usize::MAX || indeg[to] > 0 {
            return Err(frame.fail("middle graph vertex with degree above two"));
        }
        out[from] = to;
        indeg[to] += 1;
        Ok(())
    };
    for b in 0..mh {
        for a in 0..mw {
            if a + 1 < mw {
                add(idx(a, b), idx(a + 1, b))?;
            }
            if b + 1 < mh {
                add(idx(a, b), idx(a, b + 1))?;
            }
        }
    }

    let start = idx(0, mh - 1);
    let bottom_left = idx(0, 0);
    let top_right = idx(mw - 1, mh - 1);
    let bottom_right = idx(mw - 1, 0);
    for i in 0..mw * mh {
        let (din, dout) = (indeg[i] as usize, (out[i] != usize::MAX) as usize);
        let ok = if i == start || i == bottom_right {
            (din, dout) == (0, 1)
        } else if i == bottom_left || i == top_right {
            (din, dout) == (1, 0)
        } else {
            (din, dout) == (1, 1)
        };
        if !ok {
            return Err(frame.fail(format!("middle vertex {:?} has in/out degree {din}/{dout}", point(i))));
        }
    }

    let mut seen = vec![false; mw * mh];
    let mut walk = vec![start];
    seen[start] = true;
    let mut cur = start;
    while out[cur] != usize::MAX {
        cur = out[cur];
        if seen[cur] {
            return Err(frame.fail(format!("walk revisits {:?}", point(cur))));
        }
        seen[cur] = true;
        walk.push(cur);
    }
    let walk: Vec<(i64, i64)> = walk.into_iter().map(point).collect();

    let side = if cur == top_right {
        let corners: Vec<Vertex> = walk.iter().map(|&m| frame.primal_at(frame.corner(m, Kind::Primal))).collect();
        let last_left = corners.iter().rposition(|v| v.x == r.x0).ok_or_else(|| frame.fail("walk never touches left side"))?;
        let first_right = corners[last_left..]
            .iter()
            .position(|v| v.x == r.x1)
            .ok_or_else(|| frame.fail("walk never reaches right side"))?;
        let w = PathWitness {
            lattice: Lattice::Primal,
            vertices: loop_erase(&corners[last_left..=last_left + first_right]),
        };
        w.validate(config, r, Orientation::Horizontal).map_err(|e| frame.fail(format!("primal witness: {e}")))?;
        Side::HorizontalPrimal(w)
    } else if cur == bottom_left {
        let corners: Vec<Vertex> = walk.iter().map(|&m| frame.dual_at(frame.corner(m, Kind::Dual))).collect();
        let (top, bottom) = (frame.d.j1, frame.d.j0);
        let last_top = corners.iter().rposition(|v| v.y == top).ok_or_else(|| frame.fail("walk never touches top row"))?;
        let first_bottom = corners[last_top..]
            .iter()
            .position(|v| v.y == bottom)
            .ok_or_else(|| frame.fail("walk never reaches bottom row"))?;
        let mut vertices = loop_erase(&corners[last_top..=last_top + first_bottom]);
        vertices.reverse();
        let w = PathWitness { lattice: Lattice::Dual, vertices };
        w.validate_dual(config, &frame.d, Orientation::Vertical).map_err(|e| frame.fail(format!("dual witness: {e}")))?;
        Side::VerticalDual(w)
    } else {
        return Err(frame.fail(format!("walk ends at {:?}", point(cur))));
    };
    Ok(InterfaceResult { side, walk })
}

/// Chronological loop erasure; consecutive duplicates are dropped.
fn loop_erase(walk: &[Vertex]) -> Vec<Vertex> {
    let mut path: Vec<Vertex> = Vec::new();
    let mut pos: HashMap<Vertex, usize> = HashMap::new();
    for &v in walk {
        if let Some(&i) = pos.get(&v) {
            for u in path.drain(i + 1..) {
                pos.remove(&u);
            }
        } else {
            pos.insert(v, path.len());
            path.push(v);
        }
    }
    path
}

/// The left-most vertical open crossing LV(S): the primal crossing
/// extracted by the interface walk of S rotated a quarter turn clockwise,
/// so that the walk starts from the left side of S. `None` iff V(S) fails.
pub fn leftmost_v_crossing(config: &Configuration, s: &Rect) -> Result<Option<PathWitness>> {
    let rot = s.rotate_cw();
    let mut rotated = Configuration::closed(rot.into());
    for e in s.edges() {
        if config.edge_open(&e) {
            let (a, b) = e.endpoints();
            let re = Edge::between(rotate_cw_vertex(a), rotate_cw_vertex(b)).expect("rotation keeps adjacency");
            let id = rotated.region().edge_index(&re).expect("rotated edge inside rotated rect");
            rotated.set(id, true);
        }
    }
    Ok(match interface_decision(&rotated, &rot)?.side {
        Side::HorizontalPrimal(w) => Some(PathWitness {
            lattice: Lattice::Primal,
            vertices: w.vertices.into_iter().map(rotate_ccw_vertex).collect(),
        }),
        Side::VerticalDual(_) => None,
    })
}

/// Edges of `s` not on the vertical crossing `path` that lie on its right:
/// those reachable from the right-hand part of the boundary without
/// crossing `path`.
pub fn edges_right_of(s: &Rect, path: &PathWitness) -> Vec<Edge> {
    let on_path: HashSet<Edge> = path.edges().collect();
    let (bottom, top) = (path.vertices[0], *path.vertices.last().expect("non-empty path"));
    let (k, l) = (s.width() as i64, s.height() as i64);
    let face_idx = |x: i64, y: i64| ((y - s.y0) * k + (x - s.x0)) as usize;
    let mut right_face = vec![false; (k * l) as usize];
    let mut right_edges: HashSet<Edge> = HashSet::new();
    let mut stack = Vec::new();

    let mut seed = |e: Edge, face: (i64, i64), stack: &mut Vec<(i64, i64)>| {
        if !on_path.contains(&e) {
            right_edges.insert(e);
            stack.push(face);
        }
    };
    for x in bottom.x..s.x1 {
        seed(Edge::horizontal(x, s.y0), (x, s.y0), &mut stack);
    }
    for y in s.y0..s.y1 {
        seed(Edge::vertical(s.x1, y), (s.x1 - 1, y), &mut stack);
    }
    for x in top.x..s.x1 {
        seed(Edge::horizontal(x, s.y1), (x, s.y1 - 1), &mut stack);
    }
    while let Some((x, y)) = stack.pop() {
        let f = face_idx(x, y);
        if right_face[f] {
            continue;
        }
        right_face[f] = true;
        let sides = [
            (Edge::horizontal(x, y), (x, y - 1)),
            (Edge::horizontal(x, y + 1), (x, y + 1)),
            (Edge::vertical(x, y), (x - 1, y)),
            (Edge::vertical(x + 1, y), (x + 1, y)),
        ];
        for (e, (nx, ny)) in sides {
            if on_path.contains(&e) {
                continue;
            }
            right_edges.insert(e);
            if nx >= s.x0 && nx < s.x1 && ny >= s.y0 && ny < s.y1 && !right_face[face_idx(nx, ny)] {
                stack.push((nx, ny));
            }
        }
    }
    let mut v: Vec<Edge> = right_edges.into_iter().collect();
    v.sort();
    v
}
