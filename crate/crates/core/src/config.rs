//! Edge-state configurations and reproducible sampling.
//!
//! A configuration packs one bit per edge (1 = open) into `u64` words,
//! edge `i` at bit `i % 64` of word `i / 64`. For regions with at most 64
//! edges, configuration number `c` in counting order is the one whose single
//! word equals `c`.
//!
//! Random states come from a counter-based generator: sample `k` under seed
//! `s` reads ChaCha8 stream `k` keyed by `s`, and edge `e` consumes the
//! `e`-th 64-bit output of that stream. Every edge state is therefore a pure
//! function of `(seed, sample_index, EdgeId)`, independent of evaluation order
//! and worker count.

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::lattice::{Edge, EdgeId, Region};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    region: Region,
    words: Vec<u64>,
    len: usize,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl Configuration {
    pub fn closed(region: Region) -> Self {
        let len = region.edge_count();
        Configuration { region, words: vec![0; word_count(len)], len }
    }

    pub fn open(region: Region) -> Self {
        let mut c = Configuration::closed(region);
        c.fill(true);
        c
    }

    /// Configuration number `index` in counting order (regions of at most 64
    /// edges).
    pub fn from_index(region: Region, index: u64) -> Self {
        let mut c = Configuration::closed(region);
        c.set_index(index);
        c
    }

    pub fn set_index(&mut self, index: u64) {
        debug_assert!(self.len <= 64);
        if let Some(w) = self.words.first_mut() {
            *w = if self.len == 64 { index } else { index & ((1u64 << self.len) - 1) };
        }
    }

    pub fn from_states(region: Region, states: &[bool]) -> Result<Self> {
        if states.len() != region.edge_count() {
            return Err(Error::BadConfiguration(format!(
                "{} states for {} edges of {region}",
                states.len(),
                region.edge_count()
            )));
        }
        let mut c = Configuration::closed(region);
        for (i, &s) in states.iter().enumerate() {
            c.set(EdgeId(i), s);
        }
        Ok(c)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn is_open(&self, id: EdgeId) -> bool {
        (self.words[id.0 >> 6] >> (id.0 & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, id: EdgeId, open: bool) {
        let bit = 1u64 << (id.0 & 63);
        if open {
            self.words[id.0 >> 6] |= bit;
        } else {
            self.words[id.0 >> 6] &= !bit;
        }
    }

    pub fn flip(&mut self, id: EdgeId) {
        self.words[id.0 >> 6] ^= 1u64 << (id.0 & 63);
    }

    pub fn fill(&mut self, open: bool) {
        let v = if open { u64::MAX } else { 0 };
        self.words.iter_mut().for_each(|w| *w = v);
        self.clear_padding();
    }

    fn clear_padding(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// State of a geometric edge; edges outside the region count as closed.
    #[inline]
    pub fn edge_open(&self, e: &Edge) -> bool {
        self.region.edge_index(e).is_some_and(|id| self.is_open(id))
    }

    pub fn open_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn open_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.len).map(EdgeId).filter(|&id| self.is_open(id))
    }

    /// Edgewise `self <= other` (same region).
    pub fn is_subset_of(&self, other: &Configuration) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Apply a relabelling of the region onto itself, e.g. a torus translation.
    pub fn map_edges(&self, f: impl Fn(Edge) -> Edge) -> Configuration {
        let mut out = Configuration::closed(self.region.clone());
        for id in self.open_edges() {
            let target = self.region.edge_index(&f(self.region.edge(id))).expect("edge map leaves region");
            out.set(target, true);
        }
        out
    }

    /// Hex digits of the packed bit vector read as one big-endian integer,
    /// so that counting order and lexicographic order agree.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let mut nib = 0u32;
                for b in 0..4 {
                    let i = d * 4 + b;
                    if i < self.len && self.is_open(EdgeId(i)) {
                        nib |= 1 << b;
                    }
                }
                char::from_digit(nib, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(region: Region, hex: &str) -> Result<Self> {
        let bad = || Error::BadConfiguration(hex.to_string());
        let mut c = Configuration::closed(region);
        for (d, ch) in hex.chars().rev().enumerate() {
            let nib = ch.to_digit(16).ok_or_else(bad)?;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let i = d * 4 + b;
                    if i >= c.len {
                        return Err(bad());
                    }
                    c.set(EdgeId(i), true);
                }
            }
        }
        Ok(c)
    }
}

impl fmt::Display for Configuration {
    /// `<region descriptor>/<hex>`, e.g. `rect:0,0,1,1/5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.region, self.to_hex())
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (desc, hex) = s.rsplit_once('/').ok_or_else(|| Error::BadConfiguration(s.to_string()))?;
        Configuration::from_hex(desc.parse()?, hex)
    }
}

/// Parameters of a batch of independent samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub p: f64,
    pub seed: u64,
    pub count: u64,
}

impl SampleSpec {
    pub fn new(p: f64, seed: u64, count: u64) -> Result<Self> {
        check_probability(p)?;
        if count == 0 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        Ok(SampleSpec { p, seed, count })
    }
}

pub fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::BadProbability(p.to_string()))
    }
}

/// Counter-based uniform stream for one `(seed, sample_index)` pair.
pub struct EdgeStream {
    rng: ChaCha8Rng,
}

// u64 outputs per ChaCha8Rng buffer refill (4 blocks of 16 u32 words).
const CHUNK: usize = 32;

#[inline]
fn to_unit(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl EdgeStream {
    pub fn new(seed: u64, sample_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sample_index);
        EdgeStream { rng }
    }

    /// Uniform in `[0, 1)` assigned to edge `e`.
    pub fn uniform_at(&mut self, e: usize) -> f64 {
        self.rng.set_word_pos(2 * e as u128);
        to_unit(self.rng.next_u64())
    }

    /// Uniforms of edges `0..n`, in order.
    pub fn uniforms(&mut self, n: usize) -> Vec<f64> {
        self.rng.set_word_pos(0);
        (0..n).map(|_| to_unit(self.rng.next_u64())).collect()
    }

    /// Fill `config` with states thresholded at `p`.
    pub fn fill(&mut self, config: &mut Configuration, p: f64) {
        self.rng.set_word_pos(0);
        let len = config.len;
        for (w, word) in config.words.iter_mut().enumerate() {
            let mut bits = 0u64;
            for b in 0..64.min(len - 64 * w) {
                if to_unit(self.rng.next_u64()) < p {
                    bits |= 1 << b;
                }
            }
            *word = bits;
        }
    }
}

/// Edge states drawn on demand, for explorations that only touch a small
/// part of a large region. Agrees with [`EdgeStream`] edge by edge.
pub struct LazyStates {
    stream: EdgeStream,
    p: f64,
    chunks: Vec<Option<Box<[u64; CHUNK]>>>,
}

impl LazyStates {
    pub fn new(edge_count: usize, p: f64, seed: u64, sample_index: u64) -> Self {
        LazyStates {
            stream: EdgeStream::new(seed, sample_index),
            p,
            chunks: vec![None; edge_count.div_ceil(CHUNK)],
        }
    }

    pub fn is_open(&mut self, id: EdgeId) -> bool {
        let (c, k) = (id.0 / CHUNK, id.0 % CHUNK);
        let chunk = self.chunks[c].get_or_insert_with(|| {
            let rng = &mut self.stream.rng;
            rng.set_word_pos((2 * CHUNK * c) as u128);
            let mut buf = Box::new([0u64; CHUNK]);
            buf.iter_mut().for_each(|w| *w = rng.next_u64());
            buf
        });
        to_unit(chunk[k]) < self.p
    }
}

/// `sample(region, p, seed, sample_index)`: each edge open independently
/// with probability `p`.
pub fn sample(region: &Region, p: f64, seed: u64, sample_index: u64) -> Configuration {
    let mut c = Configuration::closed(region.clone());
    EdgeStream::new(seed, sample_index).fill(&mut c, p);
    c
}

/// One uniform per edge; thresholding at `p` reproduces [`sample`], and the
/// configurations for `p <= q` are nested.
#[derive(Debug, Clone)]
pub struct ThresholdTable {
    region: Region,
    uniforms: Vec<f64>,
}

impl ThresholdTable {
    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn uniforms(&self) -> &[f64] {
        &self.uniforms
    }

    pub fn threshold(&self, p: f64) -> Configuration {
        let mut c = Configuration::closed(self.region.clone());
        self.threshold_into(&mut c, p);
        c
    }

    pub fn threshold_into(&self, c: &mut Configuration, p: f64) {
        for (i, &u) in self.uniforms.iter().enumerate() {
            c.set(EdgeId(i), u < p);
        }
    }
}

pub fn sample_coupled(region: &Region, seed: u64, sample_index: u64) -> ThresholdTable {
    let uniforms = EdgeStream::new(seed, sample_index).uniforms(region.edge_count());
    ThresholdTable { region: region.clone(), uniforms }
}

/// Swap primal and dual: the result lives on the horizontal dual region and
/// each edge there is open iff its partner is closed. Edges whose partner
/// lies outside the source region (the extra top and bottom rows) are open.
pub fn dualize(config: &Configuration) -> Result<Configuration> {
    let (target, to_partner): (Region, fn(Edge) -> Edge) = match config.region() {
        Region::Rect(r) => (crate::lattice::dual_rect(r).dual.into(), Edge::from_dual),
        Region::Dual(d) => {
            let r = d
                .horizontal_dual()
                .ok_or_else(|| Error::InvalidRegion(format!("{} has a degenerate dual", config.region())))?;
            (r.into(), Edge::to_dual)
        }
        other => return Err(Error::InvalidRegion(format!("cannot dualize {other}"))),
    };
    let mut out = Configuration::closed(target);
    for i in 0..out.len() {
        let e = out.region().edge(EdgeId(i));
        let open = match config.region().edge_index(&to_partner(e)) {
            Some(id) => !config.is_open(id),
            None => true,
        };
        out.set(EdgeId(i), open);
    }
    Ok(out)
}
