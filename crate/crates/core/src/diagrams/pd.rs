use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serialized as `1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i64", try_from = "i64")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

impl From<Sign> for i64 {
    fn from(s: Sign) -> i64 {
        s.as_i64()
    }
}

impl TryFrom<i64> for Sign {
    type Error = String;

    fn try_from(v: i64) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Positive),
            -1 => Ok(Sign::Negative),
            _ => Err(format!("crossing sign must be 1 or -1, got {v}")),
        }
    }
}

/// One crossing of an oriented diagram.
///
/// `edges` lists the four incident edges counterclockwise, starting with the
/// incoming under-strand, so the under-strand runs `edges[0] -> edges[2]`. The
/// over-strand runs `edges[3] -> edges[1]` at a positive crossing and
/// `edges[1] -> edges[3]` at a negative one.
///
/// The 0-smoothing joins `(edges[0], edges[1])` and `(edges[2], edges[3])`; the
/// 1-smoothing joins `(edges[0], edges[3])` and `(edges[1], edges[2])`. At a
/// positive crossing the 0-smoothing is the oriented one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crossing {
    pub edges: [usize; 4],
    pub sign: Sign,
}

impl Crossing {
    pub fn new(edges: [usize; 4], sign: Sign) -> Self {
        Self { edges, sign }
    }

    /// Slot pairs joined by the given smoothing.
    pub fn smoothing_pairs(choice: u8) -> [(usize, usize); 2] {
        if choice == 0 {
            [(0, 1), (2, 3)]
        } else {
            [(0, 3), (1, 2)]
        }
    }

    fn slot_is_incoming(&self, pos: usize) -> bool {
        match (pos, self.sign) {
            (0, _) => true,
            (2, _) => false,
            (3, Sign::Positive) | (1, Sign::Negative) => true,
            _ => false,
        }
    }

    /// The same geometric crossing with over and under exchanged.
    pub fn mirrored(&self) -> Self {
        let [a, b, c, d] = self.edges;
        let edges = match self.sign {
            Sign::Positive => [d, a, b, c],
            Sign::Negative => [b, c, d, a],
        };
        Self { edges, sign: self.sign.flip() }
    }
}

/// A crossing whose orientation has not been fixed yet: slot 0 is an
/// under-strand slot and the edges run counterclockwise. The hints record a
/// preferred direction for the two strands and are only used to pick the
/// orientation of each component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RawCrossing {
    pub edges: [usize; 4],
    /// under-strand runs slot 0 -> slot 2
    pub under_forward: bool,
    /// over-strand runs slot 3 -> slot 1
    pub over_from_last: bool,
}

impl RawCrossing {
    fn hint_incoming(&self, pos: usize) -> bool {
        match pos {
            0 => self.under_forward,
            2 => !self.under_forward,
            3 => self.over_from_last,
            _ => !self.over_from_last,
        }
    }
}

impl From<&Crossing> for RawCrossing {
    fn from(c: &Crossing) -> Self {
        RawCrossing { edges: c.edges, under_forward: true, over_from_last: c.sign == Sign::Positive }
    }
}

/// Oriented link diagram in planar-diagram form.
///
/// Edges are numbered `0..edge_count()` without gaps; crossing-free
/// components are kept as a count of free loops. Component labels are
/// assigned in order of each component's smallest edge, free loops last.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlanarDiagram {
    crossings: Vec<Crossing>,
    free_loops: usize,
    edge_count: usize,
    edge_component: Vec<usize>,
    component_count: usize,
}

type Slot = (usize, usize);

impl PlanarDiagram {
    /// Validates an oriented crossing list. Edge labels may be arbitrary and
    /// are compacted preserving their relative order.
    pub fn new(crossings: Vec<Crossing>, free_loops: usize) -> Result<Self> {
        let crossings = compact_labels(crossings);
        let edge_count = edge_count_of(&crossings);
        let mut incoming = vec![0usize; edge_count];
        let mut outgoing = vec![0usize; edge_count];
        for x in &crossings {
            for pos in 0..4 {
                if x.slot_is_incoming(pos) {
                    incoming[x.edges[pos]] += 1;
                } else {
                    outgoing[x.edges[pos]] += 1;
                }
            }
        }
        for e in 0..edge_count {
            if incoming[e] + outgoing[e] != 2 {
                return Err(Error::InvalidDiagram(format!(
                    "edge {e} appears {} times; every edge must appear exactly twice",
                    incoming[e] + outgoing[e]
                )));
            }
            if incoming[e] != 1 {
                return Err(Error::InvalidDiagram(format!(
                    "edge {e} is not consistently oriented (it enters {} crossings)",
                    incoming[e]
                )));
            }
        }
        Ok(Self::assemble(crossings, free_loops, edge_count))
    }

    pub fn empty() -> Self {
        Self::assemble(Vec::new(), 0, 0)
    }

    /// The crossingless unknot.
    pub fn unknot() -> Self {
        Self::assemble(Vec::new(), 1, 0)
    }

    fn assemble(crossings: Vec<Crossing>, free_loops: usize, edge_count: usize) -> Self {
        let mut d = PlanarDiagram {
            crossings,
            free_loops,
            edge_count,
            edge_component: vec![usize::MAX; edge_count],
            component_count: 0,
        };
        let mut next = 0;
        for start in 0..edge_count {
            if d.edge_component[start] != usize::MAX {
                continue;
            }
            for e in d.strand_from(start) {
                d.edge_component[e] = next;
            }
            next += 1;
        }
        d.component_count = next + free_loops;
        d
    }

    /// Orients every component (following the hints where they are
    /// consistent) and rewrites each crossing in canonical oriented form.
    pub(crate) fn from_raw(raw: Vec<RawCrossing>, free_loops: usize) -> Result<Self> {
        let raw = compact_raw(raw);
        let edge_count = raw.iter().flat_map(|x| x.edges).max().map_or(0, |m| m + 1);
        let mut slots: Vec<Vec<Slot>> = vec![Vec::new(); edge_count];
        for (xi, x) in raw.iter().enumerate() {
            for pos in 0..4 {
                slots[x.edges[pos]].push((xi, pos));
            }
        }
        if let Some(e) = slots.iter().position(|s| s.len() != 2) {
            return Err(Error::InvalidDiagram(format!("edge {e} appears {} times", slots[e].len())));
        }
        // head[e] = slot where edge e ends
        let mut head: Vec<Option<Slot>> = vec![None; edge_count];
        for start in 0..edge_count {
            if head[start].is_some() {
                continue;
            }
            let (s0, s1) = (slots[start][0], slots[start][1]);
            let first_head = if raw[s0.0].hint_incoming(s0.1) { s0 } else { s1 };
            let mut e = start;
            let mut h = first_head;
            loop {
                head[e] = Some(h);
                let exit = (h.0, h.1 ^ 2);
                let next = raw[exit.0].edges[exit.1];
                if head[next].is_some() {
                    break;
                }
                let [t0, t1] = [slots[next][0], slots[next][1]];
                h = if t0 == exit { t1 } else { t0 };
                e = next;
            }
        }
        let crossings = raw
            .iter()
            .enumerate()
            .map(|(xi, x)| {
                let incoming = |pos: usize| head[x.edges[pos]] == Some((xi, pos));
                let mut edges = x.edges;
                if !incoming(0) {
                    edges.rotate_left(2);
                }
                let over_in_last = if incoming(0) { incoming(3) } else { incoming(1) };
                let sign = if over_in_last { Sign::Positive } else { Sign::Negative };
                Crossing { edges, sign }
            })
            .collect::<Vec<_>>();
        Self::new(crossings, free_loops)
    }

    /// Edges of the component through `start`, in orientation order.
    fn strand_from(&self, start: usize) -> Vec<usize> {
        let mut out = vec![start];
        let mut e = start;
        loop {
            let (xi, pos) = self.head_slot(e);
            let x = &self.crossings[xi];
            let next = x.edges[pos ^ 2];
            if next == start {
                return out;
            }
            out.push(next);
            e = next;
        }
    }

    fn head_slot(&self, e: usize) -> Slot {
        for (xi, x) in self.crossings.iter().enumerate() {
            for pos in 0..4 {
                if x.edges[pos] == e && x.slot_is_incoming(pos) {
                    return (xi, pos);
                }
            }
        }
        unreachable!("validated diagrams have a head slot for every edge")
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn edge_component(&self, e: usize) -> usize {
        self.edge_component[e]
    }

    pub fn positive_count(&self) -> usize {
        self.crossings.iter().filter(|x| x.sign == Sign::Positive).count()
    }

    pub fn negative_count(&self) -> usize {
        self.crossing_count() - self.positive_count()
    }

    pub fn writhe(&self) -> i64 {
        self.positive_count() as i64 - self.negative_count() as i64
    }

    pub fn is_knot(&self) -> bool {
        self.component_count == 1
    }

    /// Components of the under- and over-strand of crossing `c`.
    pub fn crossing_components(&self, c: usize) -> (usize, usize) {
        let x = &self.crossings[c];
        (self.edge_component[x.edges[0]], self.edge_component[x.edges[1]])
    }

    /// Replaces crossing `c` by its `choice`-smoothing. Surviving crossings
    /// keep their relative order; each component keeps its orientation
    /// where the smoothing allows and is otherwise reoriented from its first
    /// surviving edge.
    pub fn smooth(&self, c: usize, choice: u8) -> Result<Self> {
        if c >= self.crossings.len() {
            return Err(Error::InvalidCrossing { index: c, count: self.crossings.len() });
        }
        if choice > 1 {
            return Err(Error::InvalidParameters(format!("smoothing choice must be 0 or 1, got {choice}")));
        }
        let x = &self.crossings[c];
        let mut uf = UnionFind::new(self.edge_count);
        for (p, q) in Crossing::smoothing_pairs(choice) {
            uf.union(x.edges[p], x.edges[q]);
        }
        let mut raw = Vec::with_capacity(self.crossings.len() - 1);
        let mut touched = vec![false; self.edge_count];
        for (i, y) in self.crossings.iter().enumerate() {
            if i == c {
                continue;
            }
            let mut r = RawCrossing::from(y);
            for e in r.edges.iter_mut() {
                *e = uf.find(*e);
                touched[*e] = true;
            }
            raw.push(r);
        }
        let mut closed = 0;
        let mut roots: Vec<usize> = x.edges.iter().map(|&e| uf.find(e)).collect();
        roots.sort_unstable();
        roots.dedup();
        for r in roots {
            if !touched[r] {
                closed += 1;
            }
        }
        Self::from_raw(raw, self.free_loops + closed)
    }

    pub fn mirror(&self) -> Self {
        let crossings = self.crossings.iter().map(Crossing::mirrored).collect();
        Self::assemble(crossings, self.free_loops, self.edge_count)
    }

    /// Adds a crossingless circle to the diagram.
    pub fn disjoint_union_unknot(&self) -> Self {
        Self::assemble(self.crossings.clone(), self.free_loops + 1, self.edge_count)
    }

    /// Disjoint union with `other` (edges of `other` are shifted).
    pub fn disjoint_union(&self, other: &PlanarDiagram) -> Self {
        let shift = self.edge_count;
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().map(|x| Crossing {
            edges: x.edges.map(|e| e + shift),
            sign: x.sign,
        }));
        Self::assemble(crossings, self.free_loops + other.free_loops, self.edge_count + other.edge_count)
    }

    /// Same diagram with every component's orientation reversed.
    pub fn reversed(&self) -> Self {
        let crossings = self
            .crossings
            .iter()
            .map(|x| {
                let mut edges = x.edges;
                edges.rotate_left(2);
                Crossing { edges, sign: x.sign }
            })
            .collect();
        Self::assemble(crossings, self.free_loops, self.edge_count)
    }

    /// Edge labels renumbered by first appearance in crossing order. Two
    /// diagrams with equal canonical forms are identical up to edge naming.
    pub fn canonical(&self) -> Self {
        let mut map = vec![usize::MAX; self.edge_count];
        let mut next = 0;
        let crossings = self
            .crossings
            .iter()
            .map(|x| Crossing {
                edges: x.edges.map(|e| {
                    if map[e] == usize::MAX {
                        map[e] = next;
                        next += 1;
                    }
                    map[e]
                }),
                sign: x.sign,
            })
            .collect();
        Self::assemble(crossings, self.free_loops, self.edge_count)
    }

    /// Stable text key of the canonical form, suitable for hashing.
    pub fn canonical_key(&self) -> String {
        let c = self.canonical();
        let mut s = format!("loops={};", c.free_loops);
        for x in &c.crossings {
            let sign = if x.sign == Sign::Positive { '+' } else { '-' };
            s.push_str(&format!("{sign}{},{},{},{};", x.edges[0], x.edges[1], x.edges[2], x.edges[3]));
        }
        s
    }
}

fn edge_count_of(crossings: &[Crossing]) -> usize {
    crossings.iter().flat_map(|x| x.edges).max().map_or(0, |m| m + 1)
}

fn relabel_map(labels: impl Iterator<Item = usize>) -> BTreeMap<usize, usize> {
    let mut map: BTreeMap<usize, usize> = labels.map(|e| (e, 0)).collect();
    for (i, v) in map.values_mut().enumerate() {
        *v = i;
    }
    map
}

fn compact_labels(mut crossings: Vec<Crossing>) -> Vec<Crossing> {
    let map = relabel_map(crossings.iter().flat_map(|x| x.edges));
    for x in crossings.iter_mut() {
        x.edges = x.edges.map(|e| map[&e]);
    }
    crossings
}

fn compact_raw(mut raw: Vec<RawCrossing>) -> Vec<RawCrossing> {
    let map = relabel_map(raw.iter().flat_map(|x| x.edges));
    for x in raw.iter_mut() {
        x.edges = x.edges.map(|e| map[&e]);
    }
    raw
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
        true
    }
}
