//! Lee homology and the Rasmussen invariant.
//!
//! The deformed complex has the same generators as the Khovanov complex;
//! merge sends `X⊗X` to `1` and split sends `X` to `X⊗X + 1⊗1`. Its
//! differential raises `q_un` by 0 or 4, so it splits by `q_un mod 4`.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::{build_complex, build_complex_with_budget, resolve_state, ChainComplexSlice, SmoothingState};
use crate::diagrams::{LinkMetadata, PlanarDiagram, Sign};
use crate::error::{Error, Result};
use crate::exactla::{
    certified_rank_with, column_vector, in_image, kernel_basis, sparse, ExactSpan, ExactVector, SparseExactMatrix,
};
use crate::homology::{BettiTable, ComputeOptions};

/// Largest component count accepted by [`lee_dims_predicted`].
pub const MAX_PREDICTED_COMPONENTS: usize = 20;

fn residue_classes(slice: &ChainComplexSlice, degrees: impl Iterator<Item = usize>) -> Vec<Vec<i64>> {
    let mut all = BTreeSet::new();
    for i in degrees {
        all.extend(slice.q_values(i));
    }
    let mut classes = vec![Vec::new(); 4];
    for q in all {
        classes[q.rem_euclid(4) as usize].push(q);
    }
    classes.retain(|c| !c.is_empty());
    classes
}

/// `dim Lee^i` for every `i` with nonzero homology, `i` normalized as for `KH`.
pub fn lee_betti(d: &PlanarDiagram) -> Result<BTreeMap<i64, usize>> {
    lee_betti_with(d, &ComputeOptions::default())
}

pub fn lee_betti_with(d: &PlanarDiagram, opts: &ComputeOptions) -> Result<BTreeMap<i64, usize>> {
    let slice = build_complex_with_budget(d, None, opts.budget)?;
    let n = d.crossing_count();
    let classes = residue_classes(&slice, 0..=n);
    let jobs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..classes.len()).map(move |r| (i, r))).collect();
    let ranks: Vec<usize> = jobs
        .par_iter()
        .map(|&(i, r)| slice.lee_differential(i, &classes[r]).map(|m| certified_rank_with(&m, &opts.rank)))
        .collect::<Result<_>>()?;
    let rank: BTreeMap<(usize, usize), usize> = jobs.into_iter().zip(ranks).collect();
    let nm = d.negative_count() as i64;
    let mut out = BTreeMap::new();
    for i in 0..=n {
        let mut h = 0;
        for (r, qs) in classes.iter().enumerate() {
            let dim: usize = qs.iter().map(|&q| slice.block_dim(i, q)).sum();
            let outgoing = rank.get(&(i, r)).copied().unwrap_or(0);
            let incoming = if i > 0 { rank[&(i - 1, r)] } else { 0 };
            h += dim - outgoing - incoming;
        }
        if h > 0 {
            out.insert(i as i64 - nm, h);
        }
    }
    Ok(out)
}

/// `dim Lee^i = 2 #{E ⊂ {2..c} : Σ_{j∈E, k∉E} 2 lk(S_j, S_k) = i}`.
pub fn lee_dims_predicted(meta: &LinkMetadata) -> Result<BTreeMap<i64, usize>> {
    let c = meta.components;
    if c > MAX_PREDICTED_COMPONENTS {
        return Err(Error::TooManyComponents(c));
    }
    let mut out = BTreeMap::new();
    if c == 0 {
        return Ok(out);
    }
    // subsets of components 1..c (component 0 never in E)
    for e in 0u64..(1 << (c - 1)) {
        let in_e = |j: usize| j > 0 && e >> (j - 1) & 1 == 1;
        let mut i = 0;
        for j in (0..c).filter(|&j| in_e(j)) {
            for k in (0..c).filter(|&k| !in_e(k)) {
                i += 2 * meta.linking[j][k];
            }
        }
        *out.entry(i).or_insert(0) += 2;
    }
    Ok(out)
}

/// A canonical Lee cycle: the oriented resolution for one orientation of
/// the link, each circle labelled `a = 1 + X` or `b = 1 - X` so that circles
/// meeting at a crossing get different labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientationClass {
    /// `true` where the component is reversed relative to the diagram
    pub reversed: Vec<bool>,
    /// `true` where a circle of the oriented resolution is labelled `a`
    pub labels: Vec<bool>,
    pub state: SmoothingState,
    /// `(label mask, coefficient)`: the cycle expanded on generators of
    /// `state`, bit set meaning `X`
    pub cycle: Vec<(u64, i64)>,
}

impl OrientationClass {
    /// Homological degree `|ε|` of the cycle (unnormalized).
    pub fn degree(&self) -> usize {
        self.state.weight()
    }
}

/// Largest circle count for which cycles are expanded.
const MAX_CYCLE_CIRCLES: usize = 20;

/// Canonical Lee cycles: one per orientation with the first component kept,
/// times each proper two-colouring of the circles.
pub fn orientation_classes(d: &PlanarDiagram) -> Result<Vec<OrientationClass>> {
    let c = d.component_count();
    if c > MAX_PREDICTED_COMPONENTS {
        return Err(Error::TooManyComponents(c));
    }
    let n = d.crossing_count();
    let mut out = Vec::new();
    for flip in 0u64..(1u64 << c.saturating_sub(1)) {
        let reversed: Vec<bool> = (0..c).map(|k| k > 0 && flip >> (k - 1) & 1 == 1).collect();
        let mut mask = 0u64;
        for (i, x) in d.crossings().iter().enumerate() {
            let (u, o) = d.crossing_components(i);
            let sign = if reversed[u] != reversed[o] { x.sign.flip() } else { x.sign };
            if sign == Sign::Negative {
                mask |= 1 << i;
            }
        }
        let state = SmoothingState::from_mask(mask, n);
        let res = resolve_state(d, &state)?;
        let k = res.circle_count();
        if k > MAX_CYCLE_CIRCLES {
            return Err(Error::InvalidParameters(format!("{k} circles is too many to expand a Lee cycle")));
        }
        let mut adj = vec![Vec::new(); k];
        for i in 0..n {
            let (a, b) = res.crossing_circles(i);
            adj[a].push(b);
            adj[b].push(a);
        }
        // components of the circle graph; each gets a free colour choice
        let mut comp = vec![usize::MAX; k];
        let mut parity = vec![false; k];
        let mut roots = 0;
        for s in 0..k {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = roots;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = roots;
                        parity[w] = !parity[v];
                        stack.push(w);
                    }
                }
            }
            roots += 1;
        }
        for choice in 0u64..(1 << roots) {
            let labels: Vec<bool> = (0..k).map(|v| parity[v] ^ (choice >> comp[v] & 1 == 1)).collect();
            let cycle = (0u64..(1 << k))
                .map(|m| {
                    // b = 1 - X contributes -1 for each X it carries
                    let sign = (0..k).filter(|&v| !labels[v] && m >> v & 1 == 1).count();
                    (m, if sign % 2 == 0 { 1 } else { -1 })
                })
                .collect();
            out.push(OrientationClass { reversed: reversed.clone(), labels, state, cycle });
        }
    }
    Ok(out)
}

/// Result of the filtered Lee computation in homological degree 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SInvariant {
    pub s: i64,
    /// normalized filtration gradings of the chosen homology basis
    pub class_gradings: Vec<i64>,
    pub g_min: i64,
    pub g_max: i64,
}

pub fn s_invariant(d: &PlanarDiagram) -> Result<i64> {
    Ok(s_invariant_details(d)?.s)
}

/// Filtration gradings of `Lee^0` classes of a knot diagram.
///
/// For each `q mod 4` summand, cycles come from an exact kernel basis and
/// homology representatives are those independent of the boundaries. The
/// grading of a class is the largest level `j` with `z|_{q<j}` in the image
/// of the incoming differential restricted to rows `q < j`, found by binary
/// descent. `g_max` comes from the dimensions of the filtered pieces.
pub fn s_invariant_details(d: &PlanarDiagram) -> Result<SInvariant> {
    if !d.is_knot() {
        return Err(Error::NotAKnot(d.component_count()));
    }
    let n = d.crossing_count();
    let i = d.negative_count();
    let slice = build_complex(d, Some((i, i)))?;
    let lo = i.saturating_sub(1);
    let classes = residue_classes(&slice, lo..=(i + 1).min(n));
    let shift = d.positive_count() as i64 - 2 * d.negative_count() as i64;

    let mut gradings = Vec::new();
    // (level, dim F_level) per summand
    let mut filtered: Vec<Vec<(i64, usize)>> = Vec::new();
    for qs in &classes {
        let (blocks, dim) = slice.stacked_blocks(i, qs)?;
        if dim == 0 {
            continue;
        }
        let mut row_q = Vec::with_capacity(dim);
        for (q, _, b) in &blocks {
            row_q.extend(std::iter::repeat_n(*q, b.len()));
        }
        let outgoing = if i < n { slice.lee_differential(i, qs)? } else { SparseExactMatrix::zeros(0, dim) };
        let incoming = if i > 0 { slice.lee_differential(i - 1, qs)? } else { SparseExactMatrix::zeros(dim, 0) };
        let mut span = ExactSpan::new();
        for c in 0..incoming.cols() {
            span.insert(column_vector(&incoming, c));
        }
        let reps: Vec<ExactVector> = kernel_basis(&outgoing).into_iter().filter(|z| span.insert(sparse(z))).collect();
        if reps.is_empty() {
            continue;
        }
        let levels: Vec<i64> = blocks.iter().filter(|(_, _, b)| !b.is_empty()).map(|(q, _, _)| *q).collect();
        for z in &reps {
            gradings.push(class_grading(z, &incoming, &row_q, &levels)? + shift);
        }
        let h = reps.len();
        let dims = levels
            .iter()
            .map(|&j| {
                let below = |r: usize| row_q[r] < j;
                let b_cols: Vec<_> = (0..incoming.cols()).map(|c| restrict(column_vector(&incoming, c), &below)).collect();
                let mut bs = ExactSpan::new();
                for v in &b_cols {
                    bs.insert(v.clone());
                }
                let rb = bs.rank();
                for z in &reps {
                    bs.insert(restrict(sparse(z), &below));
                }
                (j + shift, h - (bs.rank() - rb))
            })
            .collect();
        filtered.push(dims);
    }
    let total: usize = filtered.iter().map(|f| f.first().map_or(0, |e| e.1)).sum();
    if total != 2 || gradings.len() != 2 {
        return Err(Error::InvalidParameters(format!("expected 2-dimensional Lee^0, found {total}")));
    }
    // dim F_j of the whole group at every level of any summand
    let all_levels: BTreeSet<i64> = filtered.iter().flatten().map(|e| e.0).collect();
    let dim_at = |j: i64| -> usize {
        filtered.iter().map(|f| f.iter().find(|e| e.0 >= j).map_or(0, |e| e.1)).sum()
    };
    let g_max = all_levels.iter().rev().copied().find(|&j| dim_at(j) >= 1).expect("nonzero homology");
    let g_min = *gradings.iter().min().expect("two classes");
    Ok(SInvariant { s: (g_max + g_min) / 2, class_gradings: gradings, g_min, g_max })
}

fn restrict(v: Vec<(u32, BigRational)>, keep: &impl Fn(usize) -> bool) -> Vec<(u32, BigRational)> {
    v.into_iter().filter(|e| keep(e.0 as usize)).collect()
}

/// Largest level `j` such that `z` is homologous to a chain supported in
/// `q >= j`; `levels` ascending.
fn class_grading(z: &[BigRational], incoming: &SparseExactMatrix, row_q: &[i64], levels: &[i64]) -> Result<i64> {
    let holds = |j: i64| -> Result<bool> {
        let below: Vec<usize> = (0..row_q.len()).filter(|&r| row_q[r] < j).collect();
        let v: Vec<BigRational> = below.iter().map(|&r| z[r].clone()).collect();
        let m = incoming.select_rows(|r| row_q[r] < j);
        in_image(&v, &m)
    };
    // holds(levels[0]) is trivially true; find the last level where it holds
    let (mut good, mut bad) = (0usize, levels.len());
    while bad - good > 1 {
        let mid = (good + bad) / 2;
        if holds(levels[mid])? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(levels[good])
}

/// `s` read off `KH^0` when it is two-dimensional with support `{a-1, a+1}`.
pub fn s_from_kh0(t: &BettiTable) -> Option<i64> {
    if !t.covers(0) || t.dim(0) != 2 {
        return None;
    }
    match t.support(0)[..] {
        [hi, lo] if hi - lo == 2 => Some(hi - 1),
        _ => None,
    }
}

/// `s(L(D, q))` for a companion diagram with `l_+`/`l_-` crossings, when the
/// twist parameter lies in the range where it is known; `None` otherwise.
pub fn double_s(l_plus: i64, l_minus: i64, q: i64) -> Option<i64> {
    let l = l_plus + l_minus;
    let (n, value) = if q >= 0 {
        if q % 2 == 0 {
            (q / 2, -2)
        } else {
            ((q - 1) / 2, 0)
        }
    } else if q % 2 == 0 {
        (-q / 2, 0)
    } else {
        ((1 - q) / 2, 2)
    };
    (n > l).then_some(value)
}
