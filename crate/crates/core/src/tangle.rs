//! Khovanov homology by adding one crossing at a time to a complex over
//! crossingless matchings. Closed circles are delooped and isomorphisms are
//! cancelled after every crossing, so the complex stays near the size of the
//! homology of the partial tangle instead of the whole cube.
//!
//! Morphisms between two matchings `a`, `b` on the same boundary points are
//! combinations of dot patterns on the circles of `a ∪ b`: each circle bounds
//! a disk, dotted or not. Surfaces are reduced to that form with the sphere,
//! dot and neck-cutting relations of the `x² = 0` theory.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cube::normalize_indices;
use crate::diagrams::{Crossing, PlanarDiagram, UnionFind};
use crate::exactla::{random_prime31, RankMode, RankOptions};
use crate::homology::BettiTable;
use crate::{Error, Result};

/// Coefficients of the morphisms.
pub trait Field {
    type E: Clone + PartialEq + std::fmt::Debug;
    fn int(&self, v: i64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
}

#[derive(Clone, Copy, Debug)]
pub struct ModP(pub u64);

impl Field for ModP {
    type E = u64;

    fn int(&self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.0
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }

    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }

    fn inv(&self, a: &u64) -> u64 {
        let (mut base, mut e, mut acc) = (*a, self.0 - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.0;
            }
            base = base * base % self.0;
            e >>= 1;
        }
        acc
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Rationals;

impl Field for Rationals {
    type E = BigRational;

    fn int(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn inv(&self, a: &BigRational) -> BigRational {
        BigRational::one() / a
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// Dot mask on circles (bit `c` set when circle `c` is dotted) and coefficient.
type Mor<E> = Vec<(u64, E)>;

/// Outgoing entries of each object in one homological degree.
type Entries<E> = Vec<HashMap<u32, Mor<E>>>;

fn mor_add<F: Field>(f: &F, m: &mut Mor<F::E>, mask: u64, c: &F::E) {
    if f.is_zero(c) {
        return;
    }
    match m.iter().position(|(k, _)| *k == mask) {
        Some(p) => {
            let v = f.add(&m[p].1, c);
            if f.is_zero(&v) {
                m.swap_remove(p);
            } else {
                m[p].1 = v;
            }
        }
        None => m.push((mask, c.clone())),
    }
}

/// Circle of every point in the union of two matchings; circles are numbered
/// by their smallest point.
fn circles(a: &[u8], b: &[u8]) -> (Vec<u8>, usize) {
    let mut id = vec![u8::MAX; a.len()];
    let mut count = 0;
    for s in 0..a.len() {
        if id[s] != u8::MAX {
            continue;
        }
        let mut p = s;
        loop {
            id[p] = count as u8;
            let q = a[p] as usize;
            id[q] = count as u8;
            p = b[q] as usize;
            if p == s {
                break;
            }
        }
        count += 1;
    }
    (id, count)
}

/// A surface assembled from disks, split into connected components.
struct Shape {
    comp: Vec<usize>,
    chi: Vec<i64>,
    /// boundary circles of each component
    bounds: Vec<Vec<usize>>,
}

impl Shape {
    /// `seams` glue two disks along an interval; `caps` attach a disk along a
    /// closed curve; `bounds[c]` is a disk touching boundary circle `c`.
    fn new(nodes: usize, seams: &[(usize, usize)], caps: &[(usize, usize)], bounds: &[usize]) -> Self {
        let mut uf = UnionFind::new(nodes);
        for &(a, b) in seams.iter().chain(caps) {
            uf.union(a, b);
        }
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut comp = vec![0; nodes];
        for (v, slot) in comp.iter_mut().enumerate() {
            let r = uf.find(v);
            let next = index.len();
            *slot = *index.entry(r).or_insert(next);
        }
        let mut chi = vec![0i64; index.len()];
        for &c in &comp {
            chi[c] += 1;
        }
        for &(a, _) in seams {
            chi[comp[a]] -= 1;
        }
        let mut b = vec![Vec::new(); index.len()];
        for (c, &v) in bounds.iter().enumerate() {
            b[comp[v]].push(c);
        }
        Self { comp, chi, bounds: b }
    }

    /// The surface with dots on the given disks, as dot patterns on the
    /// boundary circles with integer coefficients.
    fn eval(&self, dotted: impl Iterator<Item = usize>) -> Vec<(u64, i64)> {
        let mut dots = vec![0i64; self.chi.len()];
        for v in dotted {
            dots[self.comp[v]] += 1;
        }
        let mut terms = vec![(0u64, 1i64)];
        for (c, bounds) in self.bounds.iter().enumerate() {
            let b = bounds.len() as i64;
            let twice_g = 2 - b - self.chi[c];
            debug_assert!(twice_g >= 0 && twice_g % 2 == 0);
            let g = twice_g / 2;
            let weight = g + dots[c];
            if b == 0 {
                if weight != 1 {
                    return Vec::new();
                }
                let factor = 1 << g;
                terms.iter_mut().for_each(|t| t.1 *= factor);
                continue;
            }
            let all: u64 = bounds.iter().map(|&k| 1u64 << k).sum();
            match weight {
                0 => {
                    terms = terms
                        .iter()
                        .flat_map(|&(m, v)| bounds.iter().map(move |&k| (m | (all & !(1u64 << k)), v)))
                        .collect();
                }
                1 => {
                    let factor = 1 << g;
                    terms.iter_mut().for_each(|t| *t = (t.0 | all, t.1 * factor));
                }
                _ => return Vec::new(),
            }
        }
        terms
    }
}

/// `alpha ∘ beta` for `beta: z → y` and `alpha: y → w`.
fn compose<F: Field>(f: &F, mz: &[u8], my: &[u8], mw: &[u8], beta: &Mor<F::E>, alpha: &Mor<F::E>) -> Mor<F::E> {
    let (lower, nl) = circles(mz, my);
    let (upper, _) = circles(my, mw);
    let (outer, _) = circles(mz, mw);
    let seams: Vec<(usize, usize)> = (0..my.len())
        .filter(|&p| p < my[p] as usize)
        .map(|p| (lower[p] as usize, nl + upper[p] as usize))
        .collect();
    let mut bounds = vec![0; outer.iter().map(|&c| c as usize + 1).max().unwrap_or(0)];
    for p in 0..mz.len() {
        bounds[outer[p] as usize] = lower[p] as usize;
    }
    let nodes = nl + circles(my, mw).1;
    let shape = Shape::new(nodes, &seams, &[], &bounds);
    let mut out = Mor::new();
    for (mb, cb) in beta {
        for (ma, ca) in alpha {
            let dotted = bits(*mb).chain(bits(*ma).map(|k| nl + k));
            let c = f.mul(cb, ca);
            for (m, v) in shape.eval(dotted) {
                mor_add(f, &mut out, m, &f.mul(&c, &f.int(v)));
            }
        }
    }
    out
}

fn bits(m: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |k| m >> k & 1 == 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Obj {
    m: Vec<u8>,
    q: i32,
}

/// Complex over crossingless matchings of the boundary points `pts`
/// (edge labels of the diagram), indexed by unnormalized homological degree.
struct Complex<F: Field> {
    pts: Vec<usize>,
    objs: Vec<Vec<Option<Obj>>>,
    /// `out[i][x]`: entries from object `x` of degree `i` into degree `i + 1`
    out: Vec<Entries<F::E>>,
    /// `inc[i][y]`: objects of degree `i - 1` with an entry into `y`
    inc: Vec<Vec<HashSet<u32>>>,
}

/// Dot masks hold one bit per circle.
const MAX_BOUNDARY: usize = 128;

const SMOOTHINGS: [[usize; 4]; 2] = [[1, 0, 3, 2], [3, 2, 1, 0]];

/// An object of the old complex tensored with one smoothing of the crossing.
struct Expanded {
    base: u32,
    m: Vec<u8>,
    loops: Vec<usize>,
}

impl<F: Field> Complex<F> {
    fn empty() -> Self {
        Self {
            pts: Vec::new(),
            objs: vec![vec![Some(Obj { m: Vec::new(), q: 0 })]],
            out: vec![vec![HashMap::new()]],
            inc: vec![vec![HashSet::new()]],
        }
    }

    fn size(&self) -> usize {
        self.objs.iter().flatten().filter(|o| o.is_some()).count()
    }

    fn add_crossing(&self, f: &F, x: &Crossing) -> Self {
        let k = self.pts.len();
        let nn = k + 4;
        let mut glue = vec![usize::MAX; nn];
        for j in 0..4 {
            if glue[k + j] != usize::MAX {
                continue;
            }
            let e = x.edges[j];
            if let Some(p) = self.pts.iter().position(|&q| q == e) {
                glue[p] = k + j;
                glue[k + j] = p;
            } else if let Some(j2) = (j + 1..4).find(|&j2| x.edges[j2] == e) {
                glue[k + j] = k + j2;
                glue[k + j2] = k + j;
            }
        }
        let mut new_idx = vec![usize::MAX; nn];
        let mut old_of_new = Vec::new();
        let mut pts = Vec::new();
        for u in 0..nn {
            if glue[u] == usize::MAX {
                new_idx[u] = pts.len();
                old_of_new.push(u);
                pts.push(if u < k { self.pts[u] } else { x.edges[u - k] });
            }
        }
        let arc = |m: &[u8], b: usize, u: usize| if u < k { m[u] as usize } else { k + SMOOTHINGS[b][u - k] };
        let trace = |m: &[u8], b: usize| -> (Vec<u8>, Vec<usize>) {
            let mut seen = vec![false; nn];
            let mut nm = vec![0u8; pts.len()];
            for u in 0..nn {
                if glue[u] != usize::MAX || seen[u] {
                    continue;
                }
                seen[u] = true;
                let mut v = arc(m, b, u);
                seen[v] = true;
                while glue[v] != usize::MAX {
                    let w = glue[v];
                    seen[w] = true;
                    v = arc(m, b, w);
                    seen[v] = true;
                }
                nm[new_idx[u]] = new_idx[v] as u8;
                nm[new_idx[v]] = new_idx[u] as u8;
            }
            let mut loops = Vec::new();
            for s in 0..nn {
                if seen[s] {
                    continue;
                }
                loops.push(s);
                let mut p = s;
                loop {
                    seen[p] = true;
                    let q = arc(m, b, p);
                    seen[q] = true;
                    p = glue[q];
                    if p == s {
                        break;
                    }
                }
            }
            (nm, loops)
        };

        let degrees = self.objs.len() + 1;
        let mut objs: Vec<Vec<Option<Obj>>> = vec![Vec::new(); degrees];
        let mut exp: Vec<Vec<[Option<Expanded>; 2]>> = Vec::with_capacity(self.objs.len());
        for (i, level) in self.objs.iter().enumerate() {
            let mut row = Vec::with_capacity(level.len());
            for o in level {
                let Some(o) = o else {
                    row.push([None, None]);
                    continue;
                };
                let pair = [0, 1].map(|b| {
                    let (m, loops) = trace(&o.m, b);
                    let base = objs[i + b].len() as u32;
                    let l = loops.len() as i32;
                    for label in 0u32..1 << l {
                        let q = o.q + b as i32 + l - 2 * label.count_ones() as i32;
                        objs[i + b].push(Some(Obj { m: m.clone(), q }));
                    }
                    Some(Expanded { base, m, loops })
                });
                row.push(pair);
            }
            exp.push(row);
        }
        let mut out: Vec<Entries<F::E>> = objs.iter().map(|l| vec![HashMap::new(); l.len()]).collect();
        let mut inc: Vec<Vec<HashSet<u32>>> = objs.iter().map(|l| vec![HashSet::new(); l.len()]).collect();

        // one glued entry: `mor` on the tangle side, identity or saddle on the crossing
        let glued = |i: usize,
                         src: (&[u8], usize, &Expanded),
                         dst: (&[u8], usize, &Expanded),
                         mor: &Mor<F::E>,
                         sign: i64,
                         out: &mut [Entries<F::E>],
                         inc: &mut [Vec<HashSet<u32>>]| {
            let (pid, cp) = circles(src.0, dst.0);
            let sa: [u8; 4] = SMOOTHINGS[src.1].map(|v| v as u8);
            let sb: [u8; 4] = SMOOTHINGS[dst.1].map(|v| v as u8);
            let (cid, cc) = circles(&sa, &sb);
            let piece = |u: usize| if u < k { pid[u] as usize } else { cp + cid[u - k] as usize };
            let (l1, l2) = (src.2.loops.len(), dst.2.loops.len());
            let cap0 = cp + cc;
            let seams: Vec<(usize, usize)> =
                (0..nn).filter(|&u| glue[u] != usize::MAX && u < glue[u]).map(|u| (piece(u), piece(glue[u]))).collect();
            let caps: Vec<(usize, usize)> = src.2.loops.iter().chain(&dst.2.loops).enumerate().map(|(t, &s)| (cap0 + t, piece(s))).collect();
            let (outer, _) = circles(&src.2.m, &dst.2.m);
            let mut bounds = vec![0; outer.iter().map(|&c| c as usize + 1).max().unwrap_or(0)];
            for (p, &c) in outer.iter().enumerate() {
                bounds[c as usize] = piece(old_of_new[p]);
            }
            let shape = Shape::new(cap0 + l1 + l2, &seams, &caps, &bounds);
            let sign = f.int(sign);
            for (mask, c) in mor {
                let c = f.mul(c, &sign);
                for lin in 0u32..1 << l1 {
                    for lout in 0u32..1 << l2 {
                        let dotted = bits(*mask)
                            .chain((0..l1).filter(|t| lin >> t & 1 == 1).map(|t| cap0 + t))
                            .chain((0..l2).filter(|t| lout >> t & 1 == 0).map(|t| cap0 + l1 + t));
                        let terms = shape.eval(dotted);
                        if terms.is_empty() {
                            continue;
                        }
                        let (a, b) = (src.2.base + lin, dst.2.base + lout);
                        let entry = out[i][a as usize].entry(b).or_default();
                        for (m, v) in terms {
                            mor_add(f, entry, m, &f.mul(&c, &f.int(v)));
                        }
                        if entry.is_empty() {
                            out[i][a as usize].remove(&b);
                            inc[i + 1][b as usize].remove(&a);
                        } else {
                            inc[i + 1][b as usize].insert(a);
                        }
                    }
                }
            }
        };

        for (i, level) in self.objs.iter().enumerate() {
            for (xi, o) in level.iter().enumerate() {
                let Some(o) = o else { continue };
                let [Some(e0), Some(e1)] = &exp[i][xi] else { unreachable!() };
                for (&y, mor) in &self.out[i][xi] {
                    let oy = self.objs[i + 1][y as usize].as_ref().expect("entry into a live object");
                    let [Some(f0), Some(f1)] = &exp[i + 1][y as usize] else { unreachable!() };
                    glued(i, (&o.m, 0, e0), (&oy.m, 0, f0), mor, 1, &mut out, &mut inc);
                    glued(i + 1, (&o.m, 1, e1), (&oy.m, 1, f1), mor, 1, &mut out, &mut inc);
                }
                let sign = if i % 2 == 0 { 1 } else { -1 };
                let id: Mor<F::E> = vec![(0, f.int(1))];
                glued(i, (&o.m, 0, e0), (&o.m, 1, e1), &id, sign, &mut out, &mut inc);
            }
        }
        Self { pts, objs, out, inc }
    }

    /// Cancels every isomorphism entry (same matching, same shift).
    fn simplify(&mut self, f: &F) {
        loop {
            let mut any = false;
            for i in 0..self.objs.len().saturating_sub(1) {
                for x in 0..self.objs[i].len() {
                    let Some(ox) = &self.objs[i][x] else { continue };
                    let best = self.out[i][x]
                        .iter()
                        .filter(|(&y, _)| self.objs[i + 1][y as usize].as_ref() == Some(ox))
                        .min_by_key(|(&y, _)| (self.inc[i + 1][y as usize].len(), y))
                        .map(|(&y, m)| (y, m[0].1.clone()));
                    if let Some((y, lam)) = best {
                        self.cancel(f, i, x as u32, y, &lam);
                        any = true;
                    }
                }
            }
            if !any {
                break;
            }
        }
    }

    fn cancel(&mut self, f: &F, i: usize, x: u32, y: u32, lam: &F::E) {
        let scale = f.neg(&f.inv(lam));
        let my = self.objs[i + 1][y as usize].as_ref().unwrap().m.clone();
        let sources: Vec<u32> = self.inc[i + 1][y as usize].iter().copied().filter(|&z| z != x).collect();
        let targets: Vec<(u32, Mor<F::E>)> =
            self.out[i][x as usize].iter().filter(|(&w, _)| w != y).map(|(&w, m)| (w, m.clone())).collect();
        for z in sources {
            let beta = self.out[i][z as usize][&y].clone();
            let mz = self.objs[i][z as usize].as_ref().unwrap().m.clone();
            for (w, alpha) in &targets {
                let mw = &self.objs[i + 1][*w as usize].as_ref().unwrap().m;
                let delta = compose(f, &mz, &my, mw, &beta, alpha);
                let entry = self.out[i][z as usize].entry(*w).or_default();
                for (m, c) in &delta {
                    mor_add(f, entry, *m, &f.mul(c, &scale));
                }
                if entry.is_empty() {
                    self.out[i][z as usize].remove(w);
                    self.inc[i + 1][*w as usize].remove(&z);
                } else {
                    self.inc[i + 1][*w as usize].insert(z);
                }
            }
        }
        for u in std::mem::take(&mut self.inc[i][x as usize]) {
            self.out[i - 1][u as usize].remove(&x);
        }
        for w in std::mem::take(&mut self.out[i][x as usize]).into_keys() {
            self.inc[i + 1][w as usize].remove(&x);
        }
        for u in std::mem::take(&mut self.inc[i + 1][y as usize]) {
            self.out[i][u as usize].remove(&y);
        }
        if i + 2 < self.objs.len() {
            for w in std::mem::take(&mut self.out[i + 1][y as usize]).into_keys() {
                self.inc[i + 2][w as usize].remove(&y);
            }
        }
        self.objs[i][x as usize] = None;
        self.objs[i + 1][y as usize] = None;
    }
}

/// Order in which crossings join the tangle: each next crossing shares as
/// many edges as possible with the current boundary.
pub fn crossing_order(d: &PlanarDiagram) -> Vec<usize> {
    let xs = d.crossings();
    let mut used = vec![false; xs.len()];
    let mut boundary: HashSet<usize> = HashSet::new();
    let mut order = Vec::with_capacity(xs.len());
    for _ in 0..xs.len() {
        let (c, _) = (0..xs.len())
            .filter(|&c| !used[c])
            .map(|c| {
                let mut b = boundary.clone();
                for &e in &xs[c].edges {
                    if !b.remove(&e) {
                        b.insert(e);
                    }
                }
                let shared = xs[c].edges.iter().filter(|e| boundary.contains(e)).count();
                (c, (std::cmp::Reverse(shared), b.len(), c))
            })
            .min_by_key(|(_, key)| *key)
            .unwrap();
        used[c] = true;
        for &e in &xs[c].edges {
            if !boundary.remove(&e) {
                boundary.insert(e);
            }
        }
        order.push(c);
    }
    order
}

/// Unnormalized `(i, q)` dimensions of `H` over the field, before free loops.
fn local_counts<F: Field>(f: &F, d: &PlanarDiagram, order: &[usize], cap: Option<u128>) -> Result<BTreeMap<(i64, i64), usize>> {
    let mut cx: Complex<F> = Complex::empty();
    for &c in order {
        if cx.pts.len() + 4 > MAX_BOUNDARY {
            return Err(Error::InvalidParameters(format!("tangle boundary exceeds {MAX_BOUNDARY} points")));
        }
        cx = cx.add_crossing(f, &d.crossings()[c]);
        if let Some(cap) = cap {
            let size = cx.size() as u128;
            if size > cap {
                return Err(Error::BudgetExceeded { estimate: size, budget: cap });
            }
        }
        cx.simplify(f);
    }
    debug_assert!(cx.pts.is_empty());
    debug_assert!(cx.out.iter().flatten().all(|m| m.is_empty()));
    let mut counts = BTreeMap::new();
    for (i, level) in cx.objs.iter().enumerate() {
        for o in level.iter().flatten() {
            *counts.entry((i as i64, o.q as i64)).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// Full Khovanov homology computed tangle by tangle. `cap` bounds the number
/// of objects in any intermediate complex.
pub fn local_betti(d: &PlanarDiagram, normalized: bool, rank: &RankOptions, cap: Option<u128>) -> Result<BettiTable> {
    let order = crossing_order(d);
    let counts = match rank.mode {
        RankMode::Exact => local_counts(&Rationals, d, &order, cap)?,
        RankMode::Modular => {
            let mut rng = ChaCha8Rng::seed_from_u64(rank.seed);
            let p1 = random_prime31(&mut rng);
            let mut p2 = random_prime31(&mut rng);
            while p2 == p1 {
                p2 = random_prime31(&mut rng);
            }
            let a = local_counts(&ModP(p1), d, &order, cap)?;
            let b = local_counts(&ModP(p2), d, &order, cap)?;
            if a == b {
                a
            } else {
                local_counts(&Rationals, d, &order, cap)?
            }
        }
    };
    let mut counts = counts;
    for _ in 0..d.free_loops() {
        let mut next = BTreeMap::new();
        for (&(i, q), &v) in &counts {
            *next.entry((i, q + 1)).or_insert(0) += v;
            *next.entry((i, q - 1)).or_insert(0) += v;
        }
        counts = next;
    }
    let (np, nm) = (d.positive_count() as i64, d.negative_count() as i64);
    let mut t = BettiTable::new(normalized, None);
    for ((i, q), v) in counts {
        let (ii, jj) = if normalized { normalize_indices(i, q, np, nm) } else { (i, q) };
        t.add(ii, jj, v);
    }
    t.set_meta("crossings", d.crossing_count().into());
    t.set_meta("positive", np.into());
    t.set_meta("negative", nm.into());
    t.set_meta("components", d.component_count().into());
    Ok(t)
}
