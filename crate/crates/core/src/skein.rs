//! Exact-sequence checks for a crossing and closed-form vanishing bounds for
//! cable diagrams.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diagrams::PlanarDiagram;
use crate::error::{Error, Result};
use crate::homology::{betti_with, BettiTable, ComputeOptions};

/// Outcome of checking the skein exact sequence at one crossing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LesReport {
    pub crossing: usize,
    pub crossings: usize,
    /// `j` values examined
    pub q_checked: usize,
    pub failures: Vec<String>,
}

impl LesReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn les_check(d: &PlanarDiagram, c: usize) -> Result<LesReport> {
    les_check_with(d, c, &ComputeOptions::default())
}

/// Compares unnormalized tables of `D`, `D_0` and `D_1` along
/// `H^{i-1,j-1}(D_1) -> H^{i,j}(D) -> H^{i,j}(D_0) -> H^{i,j-1}(D_1)`:
/// the alternating sum over each `j` vanishes and each middle term is
/// bounded by its neighbours.
pub fn les_check_with(d: &PlanarDiagram, c: usize, opts: &ComputeOptions) -> Result<LesReport> {
    let d0 = d.smooth(c, 0)?;
    let d1 = d.smooth(c, 1)?;
    let (t, (t0, t1)) = rayon::join(
        || betti_with(d, None, false, opts),
        || rayon::join(|| betti_with(&d0, None, false, opts), || betti_with(&d1, None, false, opts)),
    );
    let (t, t0, t1) = (t?, t0?, t1?);
    Ok(compare(c, d.crossing_count(), &t, &t0, &t1))
}

fn compare(c: usize, n: usize, t: &BettiTable, t0: &BettiTable, t1: &BettiTable) -> LesReport {
    let mut js = BTreeSet::new();
    let mut is = BTreeSet::new();
    for &(i, j) in t.entries().keys().chain(t0.entries().keys()) {
        is.insert(i);
        js.insert(j);
    }
    for &(i, j) in t1.entries().keys() {
        is.insert(i + 1);
        js.insert(j + 1);
    }
    let mut failures = Vec::new();
    for &j in &js {
        let mut euler = 0i64;
        for &i in &is {
            let (h, h0, h1) = (t.get(i, j) as i64, t0.get(i, j) as i64, t1.get(i - 1, j - 1) as i64);
            let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
            euler += sign * (h - h0 - h1);
            if h > h0 + h1 {
                failures.push(format!("H^{{{i},{j}}}(D) = {h} exceeds {h0} + {h1}"));
            }
        }
        if euler != 0 {
            failures.push(format!("alternating sum at j = {j} is {euler}"));
        }
    }
    LesReport { crossing: c, crossings: n, q_checked: js.len(), failures }
}

/// Parity of the strand count `p` of a torus column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    /// `p = 2k`
    Even,
    /// `p = 2k + 1`
    Odd,
}

/// Unnormalized degree above which `H` of the `D^m` family of a cable of an
/// `l`-crossing companion vanishes.
pub fn cable_vanishing_bound(k: i64, n: i64, l: i64, parity: Parity) -> Result<i64> {
    if k < 1 || n < 0 || l < 0 {
        return Err(Error::InvalidParameters(format!("need k >= 1, n >= 0, l >= 0 (got k={k}, n={n}, l={l})")));
    }
    let (per_twist, per_crossing) = match parity {
        Parity::Even => (2 * k * k, (2 * k) * (2 * k)),
        Parity::Odd => (2 * k * (k + 1), (2 * k + 1) * (2 * k + 1)),
    };
    Ok(if n >= l { per_twist * (n - l + 1) + l * per_crossing } else { l * per_crossing })
}

/// Proven window `(lower, upper)` for the largest nonzero `KH` degree of the
/// `(2k+1, (2k+1)(n+f))` cable of a companion with writhe `f` and `l_+`
/// positive crossings. Requires `n >= l`.
pub fn cable_maxdeg_window(k: i64, n: i64, f: i64, l_plus: i64) -> Result<(i64, i64)> {
    let l_minus = l_plus - f;
    if k < 1 || l_plus < 0 || l_minus < 0 {
        return Err(Error::InvalidParameters(format!("need k >= 1 and 0 <= f <= l_+ (got k={k}, f={f}, l_+={l_plus})")));
    }
    let l = l_plus + l_minus;
    if n < l {
        return Err(Error::OutOfProvenRange(format!("n = {n} is below the crossing count l = {l}")));
    }
    let lower = 2 * k * (k + 1) * (n + f);
    Ok((lower, lower + l_plus))
}
