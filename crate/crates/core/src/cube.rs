//! The cube of resolutions and the Khovanov chain complex.
//!
//! Generators are enhanced states: a smoothing `ε` plus a label `1` or `X`
//! on every circle. Labels are stored as bitmasks over the circles of the
//! state (bit set means `X`). Within one `(i, q)` block generators are
//! ordered by state, then by label mask.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Rational64;

use crate::diagrams::{Crossing, PlanarDiagram, UnionFind};
use crate::error::{Error, Result};
use crate::exactla::SparseExactMatrix;

/// States are stored as bitmasks, so diagrams are capped at this many crossings.
pub const MAX_CROSSINGS: usize = 64;

/// A vertex of the cube `{0,1}^n`; bit `c` is the smoothing of crossing `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SmoothingState {
    mask: u64,
    len: usize,
}

impl SmoothingState {
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() > MAX_CROSSINGS {
            return Err(Error::InvalidParameters(format!("at most {MAX_CROSSINGS} crossings supported")));
        }
        let mut mask = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => mask |= 1 << i,
                _ => return Err(Error::InvalidParameters(format!("state entries must be 0 or 1, got {b}"))),
            }
        }
        Ok(Self { mask, len: bits.len() })
    }

    pub fn from_mask(mask: u64, len: usize) -> Self {
        debug_assert!(len == 64 || mask >> len == 0);
        Self { mask, len }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn weight(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn bit(&self, c: usize) -> u8 {
        ((self.mask >> c) & 1) as u8
    }
}

/// Circle decomposition of one smoothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedState {
    circle_of_edge: Vec<u16>,
    edge_circles: usize,
    free_loops: usize,
    /// circles containing `edges[0]` and `edges[2]` of each crossing
    touched: Vec<(u16, u16)>,
}

impl ResolvedState {
    pub fn circle_count(&self) -> usize {
        self.edge_circles + self.free_loops
    }

    pub fn circle_of_edge(&self, e: usize) -> usize {
        self.circle_of_edge[e] as usize
    }

    /// The one or two circles met by the smoothing arcs at crossing `c`.
    pub fn crossing_circles(&self, c: usize) -> (usize, usize) {
        let (a, b) = self.touched[c];
        (a as usize, b as usize)
    }

    /// Circle ids `edge_circles..` are the diagram's free loops.
    pub fn edge_circles(&self) -> usize {
        self.edge_circles
    }
}

pub fn resolve(d: &PlanarDiagram, state: &[u8]) -> Result<ResolvedState> {
    if state.len() != d.crossing_count() {
        return Err(Error::StateLength { got: state.len(), expected: d.crossing_count() });
    }
    Ok(resolve_mask(d, SmoothingState::from_bits(state)?.mask))
}

pub fn resolve_state(d: &PlanarDiagram, state: &SmoothingState) -> Result<ResolvedState> {
    if state.len != d.crossing_count() {
        return Err(Error::StateLength { got: state.len, expected: d.crossing_count() });
    }
    Ok(resolve_mask(d, state.mask))
}

fn resolve_mask(d: &PlanarDiagram, mask: u64) -> ResolvedState {
    let n_edges = d.edge_count();
    let mut uf = UnionFind::new(n_edges);
    for (c, x) in d.crossings().iter().enumerate() {
        for (p, q) in Crossing::smoothing_pairs(((mask >> c) & 1) as u8) {
            uf.union(x.edges[p], x.edges[q]);
        }
    }
    let mut id_of_root = vec![u16::MAX; n_edges];
    let mut circle_of_edge = vec![0u16; n_edges];
    let mut next = 0u16;
    for (e, slot) in circle_of_edge.iter_mut().enumerate() {
        let r = uf.find(e);
        if id_of_root[r] == u16::MAX {
            id_of_root[r] = next;
            next += 1;
        }
        *slot = id_of_root[r];
    }
    let touched = d.crossings().iter().map(|x| (circle_of_edge[x.edges[0]], circle_of_edge[x.edges[2]])).collect();
    ResolvedState { circle_of_edge, edge_circles: next as usize, free_loops: d.free_loops(), touched }
}

/// Shape of an elementary cube edge map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeMapKind {
    /// circles of the source state merged into one circle of the target
    Merge { sources: (usize, usize), target: usize },
    /// circle of the source state split into two circles of the target
    Split { source: usize, targets: (usize, usize) },
    /// the states are not joined by a single 0 -> 1 flip
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeMap {
    pub kind: EdgeMapKind,
    /// `(-1)^{number of 1s before the flipped position}`
    pub sign: i8,
    pub crossing: Option<usize>,
}

pub fn edge_map(d: &PlanarDiagram, from: &SmoothingState, to: &SmoothingState) -> Result<EdgeMap> {
    let n = d.crossing_count();
    for s in [from, to] {
        if s.len != n {
            return Err(Error::StateLength { got: s.len, expected: n });
        }
    }
    let diff = from.mask ^ to.mask;
    if diff.count_ones() != 1 || from.mask & diff != 0 {
        return Ok(EdgeMap { kind: EdgeMapKind::Zero, sign: 1, crossing: None });
    }
    let c = diff.trailing_zeros() as usize;
    let src = resolve_mask(d, from.mask);
    let dst = resolve_mask(d, to.mask);
    let x = &d.crossings()[c];
    let (a, b) = src.crossing_circles(c);
    let kind = if a != b {
        EdgeMapKind::Merge { sources: (a.min(b), a.max(b)), target: dst.circle_of_edge(x.edges[0]) }
    } else {
        EdgeMapKind::Split { source: a, targets: (dst.circle_of_edge(x.edges[0]), dst.circle_of_edge(x.edges[2])) }
    };
    Ok(EdgeMap { kind, sign: flip_sign(from.mask, c), crossing: Some(c) })
}

fn flip_sign(mask: u64, c: usize) -> i8 {
    if (mask & ((1u64 << c) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `i = i_un - n_-`, `j = q_un + n_+ - 2 n_-`.
pub fn normalize_indices(i_un: i64, q_un: i64, n_plus: i64, n_minus: i64) -> (i64, i64) {
    (i_un - n_minus, q_un + n_plus - 2 * n_minus)
}

/// Binomial coefficients up to 64 choose 64.
struct Binomials([[u64; 65]; 65]);

impl Binomials {
    const fn new() -> Self {
        let mut t = [[0u64; 65]; 65];
        let mut n = 0;
        while n <= 64 {
            t[n][0] = 1;
            let mut k = 1;
            while k <= n {
                t[n][k] = t[n - 1][k - 1].wrapping_add(if k < n { t[n - 1][k] } else { 0 });
                k += 1;
            }
            n += 1;
        }
        Self(t)
    }

    fn get(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.0[n][k]
        }
    }
}

static BINOM: Binomials = Binomials::new();

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    BINOM.get(n, k)
}

/// Position of `mask` among masks of the same popcount in increasing order.
fn colex_rank(mut mask: u64) -> u64 {
    let mut r = 0;
    let mut t = 1;
    while mask != 0 {
        let p = mask.trailing_zeros() as usize;
        r += BINOM.get(p, t);
        t += 1;
        mask &= mask - 1;
    }
    r
}

/// Masks of `n` bits with `k` ones, increasing.
pub(crate) fn masks_with_weight(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit: u128 = 1u128 << n;
    let mut cur: Option<u64> = if k > n {
        None
    } else if k == 0 {
        Some(0)
    } else {
        Some(((1u128 << k) - 1) as u64)
    };
    std::iter::from_fn(move || {
        let v = cur?;
        cur = if v == 0 {
            None
        } else {
            // Gosper's hack
            let c = v & v.wrapping_neg();
            let r = v as u128 + c as u128;
            let next = (((r as u64 ^ v) >> 2) / c) as u128 | r;
            (next < limit).then_some(next as u64)
        };
        Some(v)
    })
}

/// States of one homological degree with their resolutions.
#[derive(Clone, Debug)]
pub struct DegreeStates {
    states: Vec<u64>,
    resolved: Vec<ResolvedState>,
    index: HashMap<u64, u32>,
}

impl DegreeStates {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn resolved(&self) -> &[ResolvedState] {
        &self.resolved
    }
}

/// Generators of one `(i, q)` block: a per-state offset and label weight.
#[derive(Clone, Debug)]
pub struct BlockBasis {
    /// `(offset, number of X labels)` per state, `None` if the state has no
    /// generator in this block
    slots: Vec<Option<(usize, usize)>>,
    len: usize,
}

impl BlockBasis {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Position of a generator within the block.
    pub fn position(&self, state: usize, label: u64) -> Option<usize> {
        self.slots[state].map(|(off, _)| off + colex_rank(label) as usize)
    }
}

/// The Khovanov cochain complex on a window of homological degrees.
#[derive(Clone, Debug)]
pub struct ChainComplexSlice {
    diagram: PlanarDiagram,
    window: Option<(usize, usize)>,
    degrees: BTreeMap<usize, DegreeStates>,
}

/// Cheap upper estimate of work for a windowed complex: number of states and
/// `Σ 2^{k_ε}` once states are resolved.
pub fn state_count(n: usize, window: Option<(usize, usize)>) -> u128 {
    let (lo, hi) = materialized_range(n, window);
    (lo..=hi).map(|i| binomial(n, i) as u128).sum()
}

fn materialized_range(n: usize, window: Option<(usize, usize)>) -> (usize, usize) {
    match window {
        None => (0, n),
        Some((a, b)) => (a.saturating_sub(1), (b + 1).min(n)),
    }
}

pub fn build_complex(d: &PlanarDiagram, window: Option<(usize, usize)>) -> Result<ChainComplexSlice> {
    build_complex_with_budget(d, window, None)
}

/// As [`build_complex`], refusing when `Σ 2^{k_ε}` over the materialized
/// states exceeds `budget`.
pub fn build_complex_with_budget(
    d: &PlanarDiagram,
    window: Option<(usize, usize)>,
    budget: Option<u128>,
) -> Result<ChainComplexSlice> {
    let n = d.crossing_count();
    if n > MAX_CROSSINGS {
        return Err(Error::InvalidParameters(format!("{n} crossings exceeds the limit of {MAX_CROSSINGS}")));
    }
    if let Some((a, b)) = window {
        if a > b || b > n {
            return Err(Error::WindowOutOfRange { lo: a as i64, hi: b as i64, n });
        }
    }
    if let Some(budget) = budget {
        // every state carries at least two generators
        let floor = 2 * state_count(n, window);
        if floor > budget {
            return Err(Error::BudgetExceeded { estimate: floor, budget });
        }
    }
    let (lo, hi) = materialized_range(n, window);
    let degrees: BTreeMap<usize, DegreeStates> = (lo..=hi)
        .map(|i| {
            let states: Vec<u64> = masks_with_weight(n, i).collect();
            let resolved: Vec<ResolvedState> = states.iter().map(|&s| resolve_mask(d, s)).collect();
            let index = states.iter().enumerate().map(|(k, &s)| (s, k as u32)).collect();
            (i, DegreeStates { states, resolved, index })
        })
        .collect();
    let slice = ChainComplexSlice { diagram: d.clone(), window, degrees };
    if let Some(budget) = budget {
        let g = slice.generator_count();
        if g > budget {
            return Err(Error::BudgetExceeded { estimate: g, budget });
        }
    }
    Ok(slice)
}

/// Term of an elementary map applied to one label.
type Terms = Vec<(u64, i64)>;

impl ChainComplexSlice {
    pub fn diagram(&self) -> &PlanarDiagram {
        &self.diagram
    }

    pub fn window(&self) -> Option<(usize, usize)> {
        self.window
    }

    /// Degrees whose chain groups exist in this slice.
    pub fn materialized_degrees(&self) -> Vec<usize> {
        self.degrees.keys().copied().collect()
    }

    /// Degrees whose homology this slice determines.
    pub fn homology_degrees(&self) -> (usize, usize) {
        self.window.unwrap_or((0, self.diagram.crossing_count()))
    }

    pub fn degree(&self, i: usize) -> Option<&DegreeStates> {
        self.degrees.get(&i)
    }

    /// `Σ 2^{k_ε}` over materialized states.
    pub fn generator_count(&self) -> u128 {
        self.degrees.values().flat_map(|d| d.resolved.iter()).map(|r| 1u128 << r.circle_count()).sum()
    }

    /// Unnormalized quantum degrees present in degree `i`.
    pub fn q_values(&self, i: usize) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        if let Some(deg) = self.degrees.get(&i) {
            for r in &deg.resolved {
                let k = r.circle_count() as i64;
                for x in 0..=k {
                    out.insert(k - 2 * x + i as i64);
                }
            }
        }
        out
    }

    pub fn block(&self, i: usize, q: i64) -> Result<BlockBasis> {
        let deg = self.degrees.get(&i).ok_or_else(|| self.missing(i))?;
        let mut slots = Vec::with_capacity(deg.len());
        let mut len = 0;
        for r in &deg.resolved {
            let k = r.circle_count() as i64;
            let twice_x = k + i as i64 - q;
            if twice_x < 0 || twice_x % 2 != 0 || twice_x / 2 > k {
                slots.push(None);
                continue;
            }
            let x = (twice_x / 2) as usize;
            slots.push(Some((len, x)));
            len += binomial(k as usize, x) as usize;
        }
        Ok(BlockBasis { slots, len })
    }

    pub fn block_dim(&self, i: usize, q: i64) -> usize {
        self.block(i, q).map_or(0, |b| b.len())
    }

    fn missing(&self, i: usize) -> Error {
        let n = self.diagram.crossing_count();
        Error::WindowOutOfRange { lo: i as i64, hi: i as i64, n }
    }

    /// Khovanov differential `d^i` restricted to quantum degree `q`.
    pub fn differential(&self, i: usize, q: i64) -> Result<SparseExactMatrix> {
        self.assemble(i, &[q], false)
    }

    /// Lee differential from degree `i` on the direct sum of the listed
    /// quantum degrees (which should be closed under `q -> q + 4` within
    /// the range of interest; terms landing elsewhere are dropped).
    pub fn lee_differential(&self, i: usize, qs: &[i64]) -> Result<SparseExactMatrix> {
        self.assemble(i, qs, true)
    }

    /// Concatenated bases of the listed q-blocks in degree `i`; returns the
    /// blocks with their starting offsets.
    pub fn stacked_blocks(&self, i: usize, qs: &[i64]) -> Result<(Vec<(i64, usize, BlockBasis)>, usize)> {
        let mut total = 0;
        let mut out = Vec::with_capacity(qs.len());
        for &q in qs {
            let b = self.block(i, q)?;
            let len = b.len();
            out.push((q, total, b));
            total += len;
        }
        Ok((out, total))
    }

    fn assemble(&self, i: usize, qs: &[i64], lee: bool) -> Result<SparseExactMatrix> {
        let n = self.diagram.crossing_count();
        let (src_blocks, ncols) = self.stacked_blocks(i, qs)?;
        if i >= n {
            return Ok(SparseExactMatrix::zeros(0, ncols));
        }
        let src = &self.degrees[&i];
        let dst = self.degrees.get(&(i + 1)).ok_or_else(|| self.missing(i + 1))?;
        let (dst_blocks, nrows) = self.stacked_blocks(i + 1, qs)?;
        let dst_by_q: HashMap<i64, (usize, &BlockBasis)> = dst_blocks.iter().map(|(q, off, b)| (*q, (*off, b))).collect();
        let mut entries: Vec<(usize, usize, Rational64)> = Vec::new();
        for (s_idx, &s) in src.states.iter().enumerate() {
            let rs = &src.resolved[s_idx];
            let k = rs.circle_count();
            for c in (0..n).filter(|c| s >> c & 1 == 0) {
                let t = s | 1 << c;
                let t_idx = dst.index[&t] as usize;
                let rt = &dst.resolved[t_idx];
                let map = circle_map(rs, rt);
                let sign = i64::from(flip_sign(s, c));
                let x = &self.diagram.crossings()[c];
                let (a, b) = rs.crossing_circles(c);
                let split_targets = (rt.circle_of_edge(x.edges[0]), rt.circle_of_edge(x.edges[2]));
                for (_, col_off, basis) in &src_blocks {
                    let Some((off, xs)) = basis.slots[s_idx] else { continue };
                    for (li, label) in masks_with_weight(k, xs).enumerate() {
                        let col = col_off + off + li;
                        let terms = if a != b {
                            merge_terms(label, &map, a, b, lee)
                        } else {
                            split_terms(label, &map, a, split_targets, lee)
                        };
                        for (tl, coef) in terms {
                            let tq = q_of(rt.circle_count(), tl, i + 1);
                            let Some((row_off, tb)) = dst_by_q.get(&tq) else { continue };
                            let row = row_off + tb.position(t_idx, tl).expect("target state present in block");
                            entries.push((row, col, Rational64::from_integer(sign * coef)));
                        }
                    }
                }
            }
        }
        Ok(SparseExactMatrix::from_triplets(nrows, ncols, entries))
    }
}

fn q_of(k: usize, label: u64, i: usize) -> i64 {
    k as i64 - 2 * label.count_ones() as i64 + i as i64
}

/// Image in the target state of each source circle, via a representative
/// edge; free loops keep their relative order.
fn circle_map(src: &ResolvedState, dst: &ResolvedState) -> Vec<usize> {
    let mut map = vec![usize::MAX; src.circle_count()];
    for (e, &c) in src.circle_of_edge.iter().enumerate() {
        if map[c as usize] == usize::MAX {
            map[c as usize] = dst.circle_of_edge(e);
        }
    }
    for j in 0..src.free_loops {
        map[src.edge_circles + j] = dst.edge_circles + j;
    }
    map
}

fn carry(label: u64, map: &[usize], skip: &[usize]) -> u64 {
    let mut out = 0;
    let mut m = label;
    while m != 0 {
        let c = m.trailing_zeros() as usize;
        m &= m - 1;
        if !skip.contains(&c) {
            out |= 1 << map[c];
        }
    }
    out
}

fn merge_terms(label: u64, map: &[usize], a: usize, b: usize, lee: bool) -> Terms {
    let rest = carry(label, map, &[a, b]);
    let target = map[a];
    let (xa, xb) = (label >> a & 1, label >> b & 1);
    match (xa, xb) {
        (0, 0) => vec![(rest, 1)],
        (1, 1) if lee => vec![(rest, 1)],
        (1, 1) => Vec::new(),
        _ => vec![(rest | 1 << target, 1)],
    }
}

fn split_terms(label: u64, map: &[usize], a: usize, (t1, t2): (usize, usize), lee: bool) -> Terms {
    let rest = carry(label, map, &[a]);
    if label >> a & 1 == 0 {
        vec![(rest | 1 << t2, 1), (rest | 1 << t1, 1)]
    } else if lee {
        vec![(rest | 1 << t1 | 1 << t2, 1), (rest, 1)]
    } else {
        vec![(rest | 1 << t1 | 1 << t2, 1)]
    }
}
