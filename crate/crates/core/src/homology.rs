//! Bigraded Betti tables, Jones polynomials and thickness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::{build_complex_with_budget, normalize_indices, ChainComplexSlice, MAX_CROSSINGS};
use crate::diagrams::{LinkMetadata, PlanarDiagram};
use crate::error::{Error, Result};
use crate::exactla::{certified_rank_with, RankOptions};
use crate::tangle::local_betti;

/// `dim_Q` of each nonzero `(i, j)` slot, normalized (`KH`) or not (`H`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "TableJson", try_from = "TableJson")]
pub struct BettiTable {
    entries: BTreeMap<(i64, i64), usize>,
    normalized: bool,
    /// covered homological degrees in the table's own indexing
    window: Option<(i64, i64)>,
    meta: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    normalized: bool,
    window: Option<[i64; 2]>,
    entries: Vec<EntryJson>,
    #[serde(default)]
    meta: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    i: i64,
    j: i64,
    dim: usize,
}

impl From<BettiTable> for TableJson {
    fn from(t: BettiTable) -> Self {
        TableJson {
            normalized: t.normalized,
            window: t.window.map(|(a, b)| [a, b]),
            entries: t.entries.iter().map(|(&(i, j), &dim)| EntryJson { i, j, dim }).collect(),
            meta: t.meta,
        }
    }
}

impl TryFrom<TableJson> for BettiTable {
    type Error = String;

    fn try_from(t: TableJson) -> std::result::Result<Self, String> {
        let mut entries = BTreeMap::new();
        for e in t.entries {
            if e.dim == 0 {
                continue;
            }
            if entries.insert((e.i, e.j), e.dim).is_some() {
                return Err(format!("duplicate entry ({}, {})", e.i, e.j));
            }
        }
        Ok(BettiTable { entries, normalized: t.normalized, window: t.window.map(|[a, b]| (a, b)), meta: t.meta })
    }
}

impl BettiTable {
    pub fn new(normalized: bool, window: Option<(i64, i64)>) -> Self {
        Self { entries: BTreeMap::new(), normalized, window, meta: BTreeMap::new() }
    }

    pub fn from_entries(normalized: bool, entries: impl IntoIterator<Item = ((i64, i64), usize)>) -> Self {
        let mut t = Self::new(normalized, None);
        for (k, v) in entries {
            t.add(k.0, k.1, v);
        }
        t
    }

    pub fn add(&mut self, i: i64, j: i64, dim: usize) {
        if dim > 0 {
            *self.entries.entry((i, j)).or_default() += dim;
        }
    }

    pub fn get(&self, i: i64, j: i64) -> usize {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> &BTreeMap<(i64, i64), usize> {
        &self.entries
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn window(&self) -> Option<(i64, i64)> {
        self.window
    }

    pub fn is_complete(&self) -> bool {
        self.window.is_none()
    }

    pub fn covers(&self, i: i64) -> bool {
        self.window.is_none_or(|(a, b)| a <= i && i <= b)
    }

    pub fn meta(&self) -> &BTreeMap<String, serde_json::Value> {
        &self.meta
    }

    pub fn set_meta(&mut self, key: &str, value: serde_json::Value) {
        self.meta.insert(key.to_string(), value);
    }

    /// `Σ_j dim H^{i,j}`.
    pub fn dim(&self, i: i64) -> usize {
        self.entries.range((i, i64::MIN)..=(i, i64::MAX)).map(|(_, v)| v).sum()
    }

    /// Nonzero `j` in degree `i`, descending.
    pub fn support(&self, i: i64) -> Vec<i64> {
        self.entries.range((i, i64::MIN)..=(i, i64::MAX)).rev().map(|(k, _)| k.1).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.entries.keys().map(|k| k.0).max()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.entries.keys().map(|k| k.0).min()
    }

    /// `KH^{-i,-j}`: the table of the mirror image.
    pub fn mirrored(&self) -> Self {
        let mut t = self.clone();
        t.entries = self.entries.iter().map(|(&(i, j), &v)| ((-i, -j), v)).collect();
        t.window = self.window.map(|(a, b)| (-b, -a));
        t
    }

    /// Graded Euler characteristic `Σ (-1)^i q^j dim`.
    pub fn euler_characteristic(&self) -> LaurentPolynomial {
        let mut p = LaurentPolynomial::zero();
        for (&(i, j), &v) in &self.entries {
            let s = if i.rem_euclid(2) == 0 { 1 } else { -1 };
            p.add_term(j, Rational64::from_integer(s * v as i64));
        }
        p
    }

    /// Same entries, ignoring metadata.
    pub fn same_entries(&self, other: &BettiTable) -> bool {
        self.entries == other.entries && self.normalized == other.normalized && self.window == other.window
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.normalized { "KH" } else { "H" };
        match self.window {
            Some((a, b)) => writeln!(f, "{name}, degrees {a}..={b}")?,
            None => writeln!(f, "{name}")?,
        }
        if self.entries.is_empty() {
            return writeln!(f, "  (zero)");
        }
        let is: BTreeSet<i64> = self.entries.keys().map(|k| k.0).collect();
        let js: BTreeSet<i64> = self.entries.keys().map(|k| k.1).collect();
        write!(f, "{:>6}", "j\\i")?;
        for i in &is {
            write!(f, "{i:>5}")?;
        }
        writeln!(f)?;
        for j in js.iter().rev() {
            write!(f, "{j:>6}")?;
            for &i in &is {
                match self.get(i, *j) {
                    0 => write!(f, "{:>5}", ".")?,
                    v => write!(f, "{v:>5}")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// How `KH` tables are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// the (windowed) cube of resolutions
    #[default]
    Cube,
    /// crossing by crossing over tangles, always the full table
    Local,
    /// the cube when it fits the budget, otherwise the local engine
    Auto,
}

/// Options shared by the homology computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComputeOptions {
    pub rank: RankOptions,
    /// cap on `Σ 2^{k_ε}` over the materialized states; for the local engine,
    /// on the objects of any intermediate complex
    pub budget: Option<u128>,
    pub engine: Engine,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        Self { rank: RankOptions::default(), budget: None, engine: Engine::Cube }
    }
}

/// Normalized `KH`; `window` is in unnormalized homological degrees.
pub fn betti(d: &PlanarDiagram, window: Option<(usize, usize)>) -> Result<BettiTable> {
    betti_with(d, window, true, &ComputeOptions::default())
}

/// Unnormalized `H`; `window` is in unnormalized homological degrees.
pub fn betti_unnormalized(d: &PlanarDiagram, window: Option<(usize, usize)>) -> Result<BettiTable> {
    betti_with(d, window, false, &ComputeOptions::default())
}

pub fn betti_with(
    d: &PlanarDiagram,
    window: Option<(usize, usize)>,
    normalized: bool,
    opts: &ComputeOptions,
) -> Result<BettiTable> {
    let n = d.crossing_count();
    let cube_fits = n <= MAX_CROSSINGS || opts.engine == Engine::Cube;
    if opts.engine != Engine::Local && cube_fits {
        match build_complex_with_budget(d, window, opts.budget) {
            Ok(slice) => return slice_betti(&slice, normalized, &opts.rank),
            Err(Error::BudgetExceeded { .. }) if opts.engine == Engine::Auto => {}
            Err(e) => return Err(e),
        }
    }
    let full = local_betti(d, normalized, &opts.rank, opts.budget)?;
    let Some((a, b)) = window else { return Ok(full) };
    if a > b || b > n {
        return Err(Error::WindowOutOfRange { lo: a as i64, hi: b as i64, n });
    }
    let shift = if normalized { d.negative_count() as i64 } else { 0 };
    let (lo, hi) = (a as i64 - shift, b as i64 - shift);
    let mut t = BettiTable::new(normalized, Some((lo, hi)));
    for (&(i, j), &v) in full.entries() {
        if (lo..=hi).contains(&i) {
            t.add(i, j, v);
        }
    }
    for (k, v) in full.meta() {
        t.set_meta(k, v.clone());
    }
    Ok(t)
}

/// Betti numbers of every degree the slice determines.
pub fn slice_betti(slice: &ChainComplexSlice, normalized: bool, rank: &RankOptions) -> Result<BettiTable> {
    let d = slice.diagram();
    let n = d.crossing_count();
    let (a, b) = slice.homology_degrees();
    // ranks of d^i_q for every block bordering a degree in [a, b]
    let mut needed: BTreeSet<(usize, i64)> = BTreeSet::new();
    for i in a..=b {
        for q in slice.q_values(i) {
            if i < n {
                needed.insert((i, q));
            }
            if i > 0 {
                needed.insert((i - 1, q));
            }
        }
    }
    let needed: Vec<(usize, i64)> = needed.into_iter().collect();
    let ranks: Vec<usize> = needed
        .par_iter()
        .map(|&(i, q)| slice.differential(i, q).map(|m| certified_rank_with(&m, rank)))
        .collect::<Result<_>>()?;
    let ranks: BTreeMap<(usize, i64), usize> = needed.into_iter().zip(ranks).collect();
    let (np, nm) = (d.positive_count() as i64, d.negative_count() as i64);
    let window = slice.window().map(|(a, b)| {
        if normalized {
            (a as i64 - nm, b as i64 - nm)
        } else {
            (a as i64, b as i64)
        }
    });
    let mut t = BettiTable::new(normalized, window);
    for i in a..=b {
        for q in slice.q_values(i) {
            let dim = slice.block_dim(i, q);
            let out = ranks.get(&(i, q)).copied().unwrap_or(0);
            let inc = if i > 0 { ranks.get(&(i - 1, q)).copied().unwrap_or(0) } else { 0 };
            let h = dim - out - inc;
            let (ii, jj) = if normalized { normalize_indices(i as i64, q, np, nm) } else { (i as i64, q) };
            t.add(ii, jj, h);
        }
    }
    t.set_meta("crossings", n.into());
    t.set_meta("positive", np.into());
    t.set_meta("negative", nm.into());
    t.set_meta("components", d.component_count().into());
    Ok(t)
}

/// Laurent polynomial in one variable with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LaurentPolynomial {
    coeffs: BTreeMap<i64, Rational64>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, Rational64::one())
    }

    pub fn monomial(e: i64, c: Rational64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, Rational64::from_integer(c));
        }
        p
    }

    pub fn add_term(&mut self, e: i64, c: Rational64) {
        let v = *self.coeffs.entry(e).or_default() + c;
        if v.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, v);
        }
    }

    pub fn coeff(&self, e: i64) -> Rational64 {
        self.coeffs.get(&e).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> &BTreeMap<i64, Rational64> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (&a, &x) in &self.coeffs {
            for (&b, &y) in &other.coeffs {
                p.add_term(a + b, x * y);
            }
        }
        p
    }

    /// Exact quotient by `q + q^{-1}`, or `None` if it does not divide.
    pub fn div_q_plus_inverse(&self) -> Option<Self> {
        // p / (q + q^-1) = (q p) / (q^2 + 1)
        let mut rem: BTreeMap<i64, Rational64> = self.coeffs.iter().map(|(&e, &c)| (e + 1, c)).collect();
        let mut quot = Self::zero();
        while let Some((&top, &c)) = rem.iter().next_back() {
            let low = *rem.keys().next().expect("nonempty");
            if top - 2 < low {
                return None;
            }
            quot.add_term(top - 2, c);
            for (e, v) in [(top, c), (top - 2, c)] {
                let nv = rem.get(&e).copied().unwrap_or_default() - v;
                if nv.is_zero() {
                    rem.remove(&e);
                } else {
                    rem.insert(e, nv);
                }
            }
        }
        Some(quot)
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (k, (&e, &c)) in self.coeffs.iter().rev().enumerate() {
            let neg = c < Rational64::zero();
            let a = if neg { -c } else { c };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let unit = a.is_one();
            match e {
                0 => write!(f, "{a}")?,
                1 if unit => write!(f, "q")?,
                1 => write!(f, "{a}q")?,
                _ if unit => write!(f, "q^{e}")?,
                _ => write!(f, "{a}q^{e}")?,
            }
        }
        Ok(())
    }
}

/// Jones polynomial as `χ(KH) / (q + q^{-1})`.
pub fn jones(d: &PlanarDiagram) -> Result<LaurentPolynomial> {
    jones_from_table(&betti(d, None)?)
}

pub fn jones_from_table(t: &BettiTable) -> Result<LaurentPolynomial> {
    if !t.is_complete() {
        return Err(Error::WindowedTable);
    }
    t.euler_characteristic()
        .div_q_plus_inverse()
        .ok_or_else(|| Error::InvalidParameters("Euler characteristic not divisible by q + 1/q".into()))
}

/// Homological width and the dealternating lower bound `max(0, hw - 2)`.
pub fn thickness(t: &BettiTable) -> Result<(i64, i64)> {
    if !t.is_complete() {
        return Err(Error::WindowedTable);
    }
    let deltas: Vec<i64> = t.entries().keys().map(|&(i, j)| j - 2 * i).collect();
    let (Some(lo), Some(hi)) = (deltas.iter().min(), deltas.iter().max()) else {
        return Ok((0, 0));
    };
    let hw = (hi - lo) / 2 + 1;
    Ok((hw, (hw - 2).max(0)))
}

/// The two `j` with `KH^{0,j} = Q` for a positive diagram.
pub fn kh0_positive_prediction(meta: &LinkMetadata) -> Result<[i64; 2]> {
    if !meta.is_positive() {
        return Err(Error::NotPositive(meta.negative));
    }
    let mid = meta.crossings() as i64 - meta.seifert_circles as i64 + 1;
    Ok([mid + 1, mid - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{braid_closure, metadata, torus_link, BraidWord};

    fn closure(w: &str) -> PlanarDiagram {
        braid_closure(&w.parse::<BraidWord>().unwrap())
    }

    #[test]
    fn unknot_table() {
        let t = betti(&PlanarDiagram::unknot(), None).unwrap();
        assert_eq!(t, BettiTable::from_entries(true, [((0, 1), 1), ((0, -1), 1)]).with_meta_of(&t));
        assert_eq!(jones_from_table(&t).unwrap(), LaurentPolynomial::one());
        assert_eq!(thickness(&t).unwrap(), (2, 0));
    }

    impl BettiTable {
        fn with_meta_of(mut self, other: &BettiTable) -> Self {
            self.meta = other.meta.clone();
            self
        }
    }

    #[test]
    fn right_trefoil() {
        let t = betti(&closure("1 1 1"), None).unwrap();
        let expected = BettiTable::from_entries(true, [((0, 1), 1), ((0, 3), 1), ((2, 5), 1), ((3, 9), 1)]);
        assert!(t.same_entries(&expected), "{t}");
        // -q^-2... in q: q^2 + q^6 - q^8
        assert_eq!(jones_from_table(&t).unwrap(), LaurentPolynomial::from_terms([(2, 1), (6, 1), (8, -1)]));
    }

    #[test]
    fn t33_top_degree() {
        let t = betti(&torus_link(3, 3).unwrap(), None).unwrap();
        assert_eq!(t.max_degree(), Some(4));
        assert_eq!(t.dim(4), 6);
        for j in [13, 11, 9] {
            assert!(t.get(4, j) > 0);
        }
        assert!(thickness(&t).unwrap().0 >= 3);
    }

    #[test]
    fn windowed_matches_full() {
        let d = torus_link(3, 3).unwrap();
        let full = betti(&d, None).unwrap();
        let part = betti(&d, Some((3, 4))).unwrap();
        assert_eq!(part.window(), Some((3, 4)));
        for (&(i, j), &v) in part.entries() {
            assert_eq!(full.get(i, j), v);
        }
        assert_eq!(part.dim(4), full.dim(4));
        assert_eq!(part.dim(3), full.dim(3));
        assert!(jones_from_table(&part).is_err());
        assert!(thickness(&part).is_err());
    }

    #[test]
    fn figure_eight_is_thin() {
        let t = betti(&closure("1 -2 1 -2"), None).unwrap();
        assert_eq!(thickness(&t).unwrap(), (2, 0));
        assert!(t.same_entries(&t.mirrored()));
    }

    #[test]
    fn positive_prediction() {
        let m = metadata(&closure("1 1 1"));
        assert_eq!(kh0_positive_prediction(&m).unwrap(), [3, 1]);
        let m = metadata(&torus_link(3, 3).unwrap());
        assert_eq!(kh0_positive_prediction(&m).unwrap(), [5, 3]);
        let m = metadata(&PlanarDiagram::unknot());
        assert_eq!(kh0_positive_prediction(&m).unwrap(), [1, -1]);
        assert!(kh0_positive_prediction(&metadata(&closure("-1 -1 -1"))).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = betti(&closure("1 1 1"), Some((1, 2))).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.contains("\"window\":[1,2]"));
        let back: BettiTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn laurent_division() {
        let p = LaurentPolynomial::from_terms([(1, 1), (-1, 1)]);
        assert_eq!(p.div_q_plus_inverse().unwrap(), LaurentPolynomial::one());
        assert!(LaurentPolynomial::from_terms([(0, 1)]).div_q_plus_inverse().is_none());
        assert_eq!(LaurentPolynomial::from_terms([(2, 1), (0, -1)]).to_string(), "q^2 - 1");
    }
}

