//! Square-lattice geometry: rectangles, tori, square annuli, canonical edge
//! enumeration and the primal/dual edge correspondence.
//!
//! Every region enumerates its edges horizontal-first (row-major, i.e. by
//! `y` then `x`), then vertical (column-major, by `x` then `y`). The index of
//! an edge in that order is its [`EdgeId`].
//!
//! Dual vertices are stored as integer pairs `(i, j)` standing for the face
//! centre `(i + 1/2, j + 1/2)`; no fractional arithmetic is used anywhere.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub x: i64,
    pub y: i64,
}

impl Vertex {
    pub const fn new(x: i64, y: i64) -> Self {
        Vertex { x, y }
    }

    pub fn is_adjacent(self, other: Vertex) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// A vertex of the dual lattice, the point `(i + 1/2, j + 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualVertex {
    pub i: i64,
    pub j: i64,
}

impl DualVertex {
    pub const fn new(i: i64, j: i64) -> Self {
        DualVertex { i, j }
    }

    /// The same integer pair viewed as a plain lattice point.
    pub fn as_vertex(self) -> Vertex {
        Vertex::new(self.i, self.j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Index of an edge in its region's canonical enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

/// A unit edge, identified by orientation and its lower-left endpoint.
///
/// In dual regions the anchor holds dual-vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub orientation: Orientation,
    pub anchor: Vertex,
}

impl Edge {
    pub const fn horizontal(x: i64, y: i64) -> Self {
        Edge { orientation: Orientation::Horizontal, anchor: Vertex::new(x, y) }
    }

    pub const fn vertical(x: i64, y: i64) -> Self {
        Edge { orientation: Orientation::Vertical, anchor: Vertex::new(x, y) }
    }

    /// The edge joining two adjacent vertices.
    pub fn between(a: Vertex, b: Vertex) -> Option<Self> {
        if !a.is_adjacent(b) {
            return None;
        }
        let lo = a.min(b);
        Some(if a.y == b.y { Edge::horizontal(lo.x, lo.y) } else { Edge::vertical(lo.x, lo.y) })
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        let a = self.anchor;
        match self.orientation {
            Orientation::Horizontal => (a, Vertex::new(a.x + 1, a.y)),
            Orientation::Vertical => (a, Vertex::new(a.x, a.y + 1)),
        }
    }

    pub fn translate(self, dx: i64, dy: i64) -> Self {
        Edge { orientation: self.orientation, anchor: Vertex::new(self.anchor.x + dx, self.anchor.y + dy) }
    }

    /// The dual edge `e*` crossing this primal edge, in dual coordinates.
    pub fn to_dual(self) -> Edge {
        let a = self.anchor;
        match self.orientation {
            Orientation::Horizontal => Edge::vertical(a.x, a.y - 1),
            Orientation::Vertical => Edge::horizontal(a.x - 1, a.y),
        }
    }

    /// Inverse of [`Edge::to_dual`]: the primal edge crossed by this dual edge.
    pub fn from_dual(self) -> Edge {
        let a = self.anchor;
        match self.orientation {
            Orientation::Horizontal => Edge::vertical(a.x + 1, a.y),
            Orientation::Vertical => Edge::horizontal(a.x, a.y + 1),
        }
    }
}

/// Axis-aligned box of `(w + 1) x (h + 1)` lattice points with origin
/// `(ox, oy)`. Zero width or height is allowed; this is the shared
/// enumeration engine for primal and dual rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct GridShape {
    pub ox: i64,
    pub oy: i64,
    pub w: usize,
    pub h: usize,
}

impl GridShape {
    pub fn horizontal_count(&self) -> usize {
        self.w * (self.h + 1)
    }

    pub fn edge_count(&self) -> usize {
        self.horizontal_count() + (self.w + 1) * self.h
    }

    pub fn vertex_count(&self) -> usize {
        (self.w + 1) * (self.h + 1)
    }

    pub fn edge(&self, id: usize) -> Edge {
        let hc = self.horizontal_count();
        if id < hc {
            let (row, col) = (id / self.w, id % self.w);
            Edge::horizontal(self.ox + col as i64, self.oy + row as i64)
        } else {
            let k = id - hc;
            let (col, row) = (k / self.h, k % self.h);
            Edge::vertical(self.ox + col as i64, self.oy + row as i64)
        }
    }

    pub fn edge_index(&self, e: &Edge) -> Option<usize> {
        let lx = e.anchor.x - self.ox;
        let ly = e.anchor.y - self.oy;
        if lx < 0 || ly < 0 {
            return None;
        }
        let (lx, ly) = (lx as usize, ly as usize);
        match e.orientation {
            Orientation::Horizontal if lx < self.w && ly <= self.h => Some(ly * self.w + lx),
            Orientation::Vertical if lx <= self.w && ly < self.h => {
                Some(self.horizontal_count() + lx * self.h + ly)
            }
            _ => None,
        }
    }

    pub fn vertex_index(&self, v: Vertex) -> Option<usize> {
        let lx = v.x - self.ox;
        let ly = v.y - self.oy;
        if lx < 0 || ly < 0 || lx as usize > self.w || ly as usize > self.h {
            return None;
        }
        Some(ly as usize * (self.w + 1) + lx as usize)
    }

    pub fn vertex(&self, idx: usize) -> Vertex {
        Vertex::new(self.ox + (idx % (self.w + 1)) as i64, self.oy + (idx / (self.w + 1)) as i64)
    }
}

/// The rectangle `[x0, x1] x [y0, y1]` of Z^2, with all boundary and interior
/// vertices and edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Rect {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Result<Self> {
        if x0 >= x1 || y0 >= y1 {
            return Err(Error::InvalidRegion(format!("rect [{x0},{x1}]x[{y0},{y1}] is empty")));
        }
        Ok(Rect { x0, y0, x1, y1 })
    }

    /// A `k` by `l` rectangle with lower-left corner at the origin.
    pub fn with_size(k: usize, l: usize) -> Result<Self> {
        Rect::new(0, 0, k as i64, l as i64)
    }

    pub fn at(anchor: Vertex, k: usize, l: usize) -> Result<Self> {
        Rect::new(anchor.x, anchor.y, anchor.x + k as i64, anchor.y + l as i64)
    }

    pub fn width(&self) -> usize {
        (self.x1 - self.x0) as usize
    }

    pub fn height(&self) -> usize {
        (self.y1 - self.y0) as usize
    }

    pub(crate) fn shape(&self) -> GridShape {
        GridShape { ox: self.x0, oy: self.y0, w: self.width(), h: self.height() }
    }

    pub fn vertex_count(&self) -> usize {
        self.shape().vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.shape().edge_count()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (self.x0..=self.x1).contains(&v.x) && (self.y0..=self.y1).contains(&v.y)
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.shape().edge_index(e).is_some()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let s = self.shape();
        (0..s.edge_count()).map(move |i| s.edge(i))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        let s = self.shape();
        (0..s.vertex_count()).map(move |i| s.vertex(i))
    }

    pub fn translate(&self, dx: i64, dy: i64) -> Rect {
        Rect { x0: self.x0 + dx, y0: self.y0 + dy, x1: self.x1 + dx, y1: self.y1 + dy }
    }

    /// Rotation by 90 degrees clockwise, `(x, y) -> (y, -x)`.
    pub fn rotate_cw(&self) -> Rect {
        Rect { x0: self.y0, y0: -self.x1, x1: self.y1, y1: -self.x0 }
    }

    /// Intersection, if it is a non-degenerate rectangle.
    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        Rect::new(
            self.x0.max(other.x0),
            self.y0.max(other.y0),
            self.x1.min(other.x1),
            self.y1.min(other.y1),
        )
        .ok()
    }

    /// True when the two rectangles share no vertex (and hence no edge).
    pub fn is_disjoint(&self, other: &Rect) -> bool {
        self.x1 < other.x0 || other.x1 < self.x0 || self.y1 < other.y0 || other.y1 < self.y0
    }

    /// Smallest rectangle containing both.
    pub fn hull(&self, other: &Rect) -> Rect {
        Rect {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }
}

pub(crate) fn rotate_cw_vertex(v: Vertex) -> Vertex {
    Vertex::new(v.y, -v.x)
}

pub(crate) fn rotate_ccw_vertex(v: Vertex) -> Vertex {
    Vertex::new(-v.y, v.x)
}

/// A rectangle of the dual lattice: dual vertices `(i, j)` with
/// `i0 <= i <= i1`, `j0 <= j <= j1`. Width zero is allowed, which is what
/// the horizontal dual of a 1 by l rectangle looks like.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualRect {
    pub i0: i64,
    pub j0: i64,
    pub i1: i64,
    pub j1: i64,
}

impl DualRect {
    pub fn new(i0: i64, j0: i64, i1: i64, j1: i64) -> Result<Self> {
        if i0 > i1 || j0 > j1 {
            return Err(Error::InvalidRegion(format!("dual rect [{i0},{i1}]x[{j0},{j1}] is empty")));
        }
        Ok(DualRect { i0, j0, i1, j1 })
    }

    pub fn width(&self) -> usize {
        (self.i1 - self.i0) as usize
    }

    pub fn height(&self) -> usize {
        (self.j1 - self.j0) as usize
    }

    pub(crate) fn shape(&self) -> GridShape {
        GridShape { ox: self.i0, oy: self.j0, w: self.width(), h: self.height() }
    }

    pub fn edge_count(&self) -> usize {
        self.shape().edge_count()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let s = self.shape();
        (0..s.edge_count()).map(move |i| s.edge(i))
    }

    /// Dual edges of the top and bottom rows, which cross primal edges
    /// outside the primal rectangle this was derived from.
    pub fn is_boundary_row_edge(&self, e: &Edge) -> bool {
        e.orientation == Orientation::Horizontal && (e.anchor.y == self.j0 || e.anchor.y == self.j1)
    }

    /// Horizontal dual of this dual rectangle, which is a primal rectangle
    /// again; `None` when it would be degenerate.
    pub fn horizontal_dual(&self) -> Option<Rect> {
        Rect::new(self.i0 + 1, self.j0, self.i1, self.j1 + 1).ok()
    }
}

/// Horizontal dual of a primal rectangle together with its edge pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPairing {
    pub primal: Rect,
    pub dual: DualRect,
    /// `(primal edge, dual edge)` for every dual edge of the dual rectangle
    /// that crosses an edge of the primal rectangle.
    pub pairs: Vec<(Edge, Edge)>,
    /// Dual edges in the top and bottom rows with no partner in the primal.
    pub unpaired_dual: Vec<Edge>,
    /// Primal edges on the left and right sides with no partner in the dual.
    pub unpaired_primal: Vec<Edge>,
}

/// The horizontal dual `[x0 + 1/2, x1 - 1/2] x [y0 - 1/2, y1 + 1/2]` of `r`,
/// a `(k - 1)` by `(l + 1)` rectangle of the dual lattice.
pub fn dual_rect(r: &Rect) -> DualPairing {
    let dual = DualRect { i0: r.x0, j0: r.y0 - 1, i1: r.x1 - 1, j1: r.y1 };
    let mut pairs = Vec::new();
    let mut unpaired_dual = Vec::new();
    for d in dual.edges() {
        let p = d.from_dual();
        if r.contains_edge(&p) {
            pairs.push((p, d));
        } else {
            unpaired_dual.push(d);
        }
    }
    let unpaired_primal = r
        .edges()
        .filter(|e| e.orientation == Orientation::Vertical && (e.anchor.x == r.x0 || e.anchor.x == r.x1))
        .collect();
    DualPairing { primal: *r, dual, pairs, unpaired_dual, unpaired_primal }
}

/// The discrete torus `C_n x C_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Torus {
    pub n: usize,
}

impl Torus {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidRegion(format!("torus side {n} < 3")));
        }
        Ok(Torus { n })
    }

    pub fn vertex_count(&self) -> usize {
        self.n * self.n
    }

    pub fn edge_count(&self) -> usize {
        2 * self.n * self.n
    }

    pub fn wrap(&self, v: Vertex) -> Vertex {
        let n = self.n as i64;
        Vertex::new(v.x.rem_euclid(n), v.y.rem_euclid(n))
    }

    pub fn edge(&self, id: usize) -> Edge {
        let n = self.n;
        if id < n * n {
            Edge::horizontal((id % n) as i64, (id / n) as i64)
        } else {
            let k = id - n * n;
            Edge::vertical((k / n) as i64, (k % n) as i64)
        }
    }

    /// Index of a planar edge after reducing its anchor modulo `n`.
    pub fn edge_index(&self, e: &Edge) -> usize {
        let n = self.n;
        let a = self.wrap(e.anchor);
        let (x, y) = (a.x as usize, a.y as usize);
        match e.orientation {
            Orientation::Horizontal => y * n + x,
            Orientation::Vertical => n * n + x * n + y,
        }
    }

    /// The `k` by `l` rectangle anchored at `anchor`, in planar coordinates;
    /// edge lookups on a torus configuration wrap these modulo `n`.
    pub fn rect(&self, anchor: Vertex, k: usize, l: usize) -> Result<Rect> {
        if k == 0 || l == 0 || k + 2 > self.n || l + 2 > self.n {
            return Err(Error::TorusRectTooLarge { n: self.n, k, l });
        }
        Rect::at(self.wrap(anchor), k, l)
    }

    /// Torus edge ids of a planar rectangle placed in the torus.
    pub fn rect_edge_ids(&self, r: &Rect) -> Vec<EdgeId> {
        r.edges().map(|e| EdgeId(self.edge_index(&e))).collect()
    }
}

/// `torus_rect` as a free function for symmetry with the other constructors.
pub fn torus_rect(t: &Torus, anchor: Vertex, k: usize, l: usize) -> Result<Rect> {
    t.rect(anchor, k, l)
}

/// Square annulus around a dual vertex: the edges with both endpoints `v`
/// satisfying `inner <= |v - centre|_inf <= outer`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Annulus {
    pub center: DualVertex,
    pub inner: usize,
    pub outer: usize,
}

impl Annulus {
    pub fn new(center: DualVertex, inner: usize, outer: usize) -> Result<Self> {
        if inner == 0 || inner >= outer {
            return Err(Error::InvalidRegion(format!("annulus radii {inner}, {outer} need 0 < a < b")));
        }
        Ok(Annulus { center, inner, outer })
    }

    /// Twice the sup-norm distance from the centre; always odd.
    pub fn doubled_distance(&self, v: Vertex) -> i64 {
        let dx = 2 * (v.x - self.center.i) - 1;
        let dy = 2 * (v.y - self.center.j) - 1;
        dx.abs().max(dy.abs())
    }

    pub fn contains(&self, v: Vertex) -> bool {
        let d = self.doubled_distance(v);
        2 * self.inner as i64 <= d && d <= 2 * self.outer as i64
    }

    /// Vertex bounding box of the outer square.
    pub fn bounding_rect(&self) -> Rect {
        let b = self.outer as i64;
        let (cx, cy) = (self.center.i, self.center.j);
        Rect { x0: cx - b + 1, y0: cy - b + 1, x1: cx + b, y1: cy + b }
    }

    /// Vertex bounding box of the hole (excluded vertices).
    pub fn hole_rect(&self) -> Rect {
        let a = self.inner as i64;
        let (cx, cy) = (self.center.i, self.center.j);
        Rect { x0: cx - a + 1, y0: cy - a + 1, x1: cx + a, y1: cy + a }
    }

    /// The four bands (bottom, top, left, right) whose long-way crossings
    /// together force a circuit. Adjacent bands overlap in corner squares.
    /// Needs `outer >= inner + 2` so that the bands have positive thickness.
    pub fn bands(&self) -> Result<[(Rect, Orientation); 4]> {
        if self.outer < self.inner + 2 {
            return Err(Error::InvalidRegion(format!(
                "annulus {}..{} too thin for crossing bands",
                self.inner, self.outer
            )));
        }
        let outer = self.bounding_rect();
        let hole = self.hole_rect();
        Ok([
            (Rect::new(outer.x0, outer.y0, outer.x1, hole.y0 - 1)?, Orientation::Horizontal),
            (Rect::new(outer.x0, hole.y1 + 1, outer.x1, outer.y1)?, Orientation::Horizontal),
            (Rect::new(outer.x0, outer.y0, hole.x0 - 1, outer.y1)?, Orientation::Vertical),
            (Rect::new(hole.x1 + 1, outer.y0, outer.x1, outer.y1)?, Orientation::Vertical),
        ])
    }
}

/// Precomputed edge and vertex enumeration of an annulus.
#[derive(Debug)]
pub struct AnnulusLayout {
    pub annulus: Annulus,
    bbox: GridShape,
    edges: Vec<Edge>,
    edge_lookup: Vec<u32>,
    vertices: Vec<Vertex>,
    vertex_lookup: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl AnnulusLayout {
    fn new(annulus: Annulus) -> Self {
        let bbox = annulus.bounding_rect().shape();
        let mut edges = Vec::new();
        let mut edge_lookup = vec![ABSENT; bbox.edge_count()];
        for idx in 0..bbox.edge_count() {
            let e = bbox.edge(idx);
            let (a, b) = e.endpoints();
            if annulus.contains(a) && annulus.contains(b) {
                edge_lookup[idx] = edges.len() as u32;
                edges.push(e);
            }
        }
        let mut vertices = Vec::new();
        let mut vertex_lookup = vec![ABSENT; bbox.vertex_count()];
        for idx in 0..bbox.vertex_count() {
            let v = bbox.vertex(idx);
            if annulus.contains(v) {
                vertex_lookup[idx] = vertices.len() as u32;
                vertices.push(v);
            }
        }
        AnnulusLayout { annulus, bbox, edges, edge_lookup, vertices, vertex_lookup }
    }

    fn edge_index(&self, e: &Edge) -> Option<usize> {
        self.bbox.edge_index(e).map(|i| self.edge_lookup[i]).filter(|&i| i != ABSENT).map(|i| i as usize)
    }

    fn vertex_index(&self, v: Vertex) -> Option<usize> {
        self.bbox.vertex_index(v).map(|i| self.vertex_lookup[i]).filter(|&i| i != ABSENT).map(|i| i as usize)
    }
}

/// A finite region carrying a configuration.
#[derive(Debug, Clone)]
pub enum Region {
    Rect(Rect),
    Dual(DualRect),
    Torus(Torus),
    Annulus(Arc<AnnulusLayout>),
    /// A W by H coarse lattice, stored as the rectangle `[0, W] x [0, H]`.
    Coarse(Rect),
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Region::Rect(a), Region::Rect(b)) | (Region::Coarse(a), Region::Coarse(b)) => a == b,
            (Region::Dual(a), Region::Dual(b)) => a == b,
            (Region::Torus(a), Region::Torus(b)) => a == b,
            (Region::Annulus(a), Region::Annulus(b)) => a.annulus == b.annulus,
            _ => false,
        }
    }
}

impl Eq for Region {}

impl From<Rect> for Region {
    fn from(r: Rect) -> Self {
        Region::Rect(r)
    }
}

impl From<DualRect> for Region {
    fn from(r: DualRect) -> Self {
        Region::Dual(r)
    }
}

impl From<Torus> for Region {
    fn from(t: Torus) -> Self {
        Region::Torus(t)
    }
}

impl From<Annulus> for Region {
    fn from(a: Annulus) -> Self {
        Region::Annulus(Arc::new(AnnulusLayout::new(a)))
    }
}

impl Region {
    pub fn coarse(w: usize, h: usize) -> Result<Self> {
        Ok(Region::Coarse(Rect::with_size(w, h)?))
    }

    pub fn edge_count(&self) -> usize {
        match self {
            Region::Rect(r) | Region::Coarse(r) => r.edge_count(),
            Region::Dual(d) => d.edge_count(),
            Region::Torus(t) => t.edge_count(),
            Region::Annulus(a) => a.edges.len(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Region::Rect(r) | Region::Coarse(r) => r.vertex_count(),
            Region::Dual(d) => d.shape().vertex_count(),
            Region::Torus(t) => t.vertex_count(),
            Region::Annulus(a) => a.vertices.len(),
        }
    }

    /// Decode an edge id.
    pub fn edge(&self, id: EdgeId) -> Edge {
        match self {
            Region::Rect(r) | Region::Coarse(r) => r.shape().edge(id.0),
            Region::Dual(d) => d.shape().edge(id.0),
            Region::Torus(t) => t.edge(id.0),
            Region::Annulus(a) => a.edges[id.0],
        }
    }

    /// Encode an edge; `None` if it is not part of the region. On a torus,
    /// every planar edge is reduced modulo the side length.
    pub fn edge_index(&self, e: &Edge) -> Option<EdgeId> {
        match self {
            Region::Rect(r) | Region::Coarse(r) => r.shape().edge_index(e),
            Region::Dual(d) => d.shape().edge_index(e),
            Region::Torus(t) => Some(t.edge_index(e)),
            Region::Annulus(a) => a.edge_index(e),
        }
        .map(EdgeId)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.edge_count()).map(move |i| self.edge(EdgeId(i)))
    }

    pub fn vertex(&self, idx: usize) -> Vertex {
        match self {
            Region::Rect(r) | Region::Coarse(r) => r.shape().vertex(idx),
            Region::Dual(d) => d.shape().vertex(idx),
            Region::Torus(t) => Vertex::new((idx % t.n) as i64, (idx / t.n) as i64),
            Region::Annulus(a) => a.vertices[idx],
        }
    }

    pub fn vertex_index(&self, v: Vertex) -> Option<usize> {
        match self {
            Region::Rect(r) | Region::Coarse(r) => r.shape().vertex_index(v),
            Region::Dual(d) => d.shape().vertex_index(v),
            Region::Torus(t) => {
                let w = t.wrap(v);
                Some(w.y as usize * t.n + w.x as usize)
            }
            Region::Annulus(a) => a.vertex_index(v),
        }
    }

    pub fn as_rect(&self) -> Option<&Rect> {
        match self {
            Region::Rect(r) | Region::Coarse(r) => Some(r),
            _ => None,
        }
    }

    /// Canonical text form, e.g. `rect:0,0,2,1` or `torus:16`.
    pub fn descriptor(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Rect(r) => write!(f, "rect:{},{},{},{}", r.x0, r.y0, r.x1, r.y1),
            Region::Dual(d) => write!(f, "dual:{},{},{},{}", d.i0, d.j0, d.i1, d.j1),
            Region::Torus(t) => write!(f, "torus:{}", t.n),
            Region::Annulus(a) => {
                let a = a.annulus;
                write!(f, "annulus:{},{},{},{}", a.center.i, a.center.j, a.inner, a.outer)
            }
            Region::Coarse(r) => write!(f, "coarse:{},{}", r.x1, r.y1),
        }
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadDescriptor(s.to_string());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<i64> =
            rest.split(',').map(|t| t.trim().parse::<i64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        let unsigned = |v: i64| usize::try_from(v).map_err(|_| bad());
        match (kind, nums.as_slice()) {
            ("rect", &[x0, y0, x1, y1]) => Ok(Region::Rect(Rect::new(x0, y0, x1, y1)?)),
            ("dual", &[i0, j0, i1, j1]) => Ok(Region::Dual(DualRect::new(i0, j0, i1, j1)?)),
            ("torus", &[n]) => Ok(Region::Torus(Torus::new(unsigned(n)?)?)),
            ("annulus", &[cx, cy, a, b]) => {
                Ok(Annulus::new(DualVertex::new(cx, cy), unsigned(a)?, unsigned(b)?)?.into())
            }
            ("coarse", &[w, h]) => Region::coarse(unsigned(w)?, unsigned(h)?),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_counts_match_formula() {
        assert_eq!(Rect::with_size(1, 1).unwrap().edge_count(), 4);
        assert_eq!(Rect::with_size(2, 1).unwrap().edge_count(), 7);
        assert_eq!(Torus::new(4).unwrap().edge_count(), 32);
        for k in 1..6 {
            for l in 1..6 {
                let r = Rect::with_size(k, l).unwrap();
                assert_eq!(r.edge_count(), k * (l + 1) + (k + 1) * l);
                assert_eq!(r.vertex_count(), (k + 1) * (l + 1));
            }
        }
    }

    #[test]
    fn enumeration_order_is_horizontal_row_major_then_vertical_column_major() {
        let r = Rect::with_size(2, 1).unwrap();
        let edges: Vec<Edge> = r.edges().collect();
        assert_eq!(
            edges,
            vec![
                Edge::horizontal(0, 0),
                Edge::horizontal(1, 0),
                Edge::horizontal(0, 1),
                Edge::horizontal(1, 1),
                Edge::vertical(0, 0),
                Edge::vertical(1, 0),
                Edge::vertical(2, 0),
            ]
        );
    }

    #[test]
    fn round_trip_every_region_kind() {
        let regions: Vec<Region> = vec![
            Rect::new(-2, 3, 3, 5).unwrap().into(),
            DualRect::new(0, -1, 0, 2).unwrap().into(),
            Torus::new(5).unwrap().into(),
            Annulus::new(DualVertex::new(0, 0), 1, 3).unwrap().into(),
            Region::coarse(3, 2).unwrap(),
        ];
        for region in &regions {
            for i in 0..region.edge_count() {
                let e = region.edge(EdgeId(i));
                assert_eq!(region.edge_index(&e), Some(EdgeId(i)), "{region} edge {i}");
            }
            for i in 0..region.vertex_count() {
                assert_eq!(region.vertex_index(region.vertex(i)), Some(i));
            }
            let parsed: Region = region.descriptor().parse().unwrap();
            assert_eq!(&parsed, region);
        }
    }

    #[test]
    fn dual_is_an_involution() {
        for e in Rect::new(-3, -2, 3, 4).unwrap().edges() {
            assert_eq!(e.to_dual().from_dual(), e);
        }
    }

    #[test]
    fn dual_rect_of_two_by_one() {
        let p = dual_rect(&Rect::with_size(2, 1).unwrap());
        assert_eq!(p.dual, DualRect { i0: 0, j0: -1, i1: 1, j1: 1 });
        assert_eq!((p.dual.width(), p.dual.height()), (1, 2));
        // every primal edge except the 2 side edges has exactly one partner
        assert_eq!(p.pairs.len(), 7 - 2);
        assert_eq!(p.unpaired_primal.len(), 2);
        assert_eq!(p.unpaired_dual.len(), 2);
        assert_eq!(p.pairs.len() + p.unpaired_dual.len(), p.dual.edge_count());
    }

    #[test]
    fn dual_rect_degenerate_width() {
        let p = dual_rect(&Rect::with_size(1, 3).unwrap());
        assert_eq!(p.dual.width(), 0);
        assert_eq!(p.dual.height(), 4);
        assert_eq!(p.dual.edge_count(), 4);
        assert!(p.unpaired_dual.is_empty());
    }

    #[test]
    fn dual_of_n_plus_one_by_n_is_rotated_copy() {
        for n in 1..5 {
            let p = dual_rect(&Rect::with_size(n + 1, n).unwrap());
            assert_eq!((p.dual.width(), p.dual.height()), (n, n + 1));
        }
    }

    #[test]
    fn torus_rect_limits() {
        let t16 = Torus::new(16).unwrap();
        let r = t16.rect(Vertex::new(0, 0), 14, 2).unwrap();
        assert_eq!(r.edge_count(), 72);
        let ids = t16.rect_edge_ids(&r);
        let mut uniq = ids.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 72, "no wrap-around collisions");

        let wrapped = t16.rect(Vertex::new(15, 15), 2, 2).unwrap();
        let ids: Vec<_> = t16.rect_edge_ids(&wrapped);
        assert!(ids.contains(&EdgeId(t16.edge_index(&Edge::horizontal(0, 0)))));

        let t4 = Torus::new(4).unwrap();
        assert!(matches!(t4.rect(Vertex::new(0, 0), 3, 1), Err(Error::TorusRectTooLarge { .. })));
    }

    #[test]
    fn torus_rect_translation_covariance() {
        let t = Torus::new(7).unwrap();
        let a = t.rect(Vertex::new(1, 2), 3, 2).unwrap();
        let b = t.rect(Vertex::new(5, 6), 3, 2).unwrap();
        let ta: Vec<_> = a.edges().map(|e| t.edge_index(&e.translate(4, 4))).collect();
        let tb: Vec<_> = b.edges().map(|e| t.edge_index(&e)).collect();
        assert_eq!(ta, tb);
    }

    #[test]
    fn annulus_shape() {
        let a = Annulus::new(DualVertex::new(0, 0), 1, 3).unwrap();
        let region: Region = a.into();
        assert_eq!(region.vertex_count(), 36 - 4);
        assert_eq!(region.edge_count(), 60 - 12);
        let bands = a.bands().unwrap();
        assert_eq!((bands[0].0.width(), bands[0].0.height()), (5, 1));
        assert_eq!((bands[2].0.width(), bands[2].0.height()), (1, 5));
        for (band, _) in bands {
            for v in band.vertices() {
                assert!(a.contains(v));
            }
        }
        assert!(Annulus::new(DualVertex::new(0, 0), 2, 2).is_err());
    }

    #[test]
    fn descriptor_rejects_garbage() {
        for s in ["", "rect:1,2,3", "rect:0,0,0,1", "torus:2", "blob:1", "annulus:0,0,3,1"] {
            assert!(s.parse::<Region>().is_err(), "{s}");
        }
    }
}
