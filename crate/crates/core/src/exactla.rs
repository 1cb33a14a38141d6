//! Exact sparse linear algebra over the rationals.
//!
//! Ranks are certified by elimination modulo two random word-size primes,
//! falling back to fraction-free integer elimination when the two disagree.
//! Kernels and image membership are always computed exactly.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sparse matrix with exact rational entries, stored by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseExactMatrix {
    rows: usize,
    cols: usize,
    /// per column, sorted by row, no zeros
    columns: Vec<Vec<(u32, Rational64)>>,
}

impl SparseExactMatrix {
    /// Builds a matrix from coordinate triplets; duplicates are summed and
    /// zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, Rational64)>) -> Self {
        let mut columns: Vec<Vec<(u32, Rational64)>> = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r}, {c}) outside a {rows}x{cols} matrix");
            columns[c].push((r as u32, v));
        }
        for col in columns.iter_mut() {
            col.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(u32, Rational64)> = Vec::with_capacity(col.len());
            for (r, v) in col.drain(..) {
                match merged.last_mut() {
                    Some(last) if last.0 == r => last.1 += v,
                    _ => merged.push((r, v)),
                }
            }
            merged.retain(|e| !e.1.is_zero());
            *col = merged;
        }
        Self { rows, cols, columns }
    }

    pub fn from_integer_triplets(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        Self::from_triplets(rows, cols, entries.into_iter().map(|(r, c, v)| (r, c, Rational64::from_integer(v))))
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        Self::from_integer_triplets(
            nrows,
            ncols,
            rows.iter().enumerate().flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v))),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_integer_triplets(n, n, (0..n).map(|i| (i, i, 1)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, c: usize) -> &[(u32, Rational64)] {
        &self.columns[c]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational64 {
        self.columns[c]
            .binary_search_by_key(&(r as u32), |e| e.0)
            .map_or_else(|_| Rational64::zero(), |i| self.columns[c][i].1)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Rational64)> + '_ {
        self.columns.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r as usize, c, v)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    /// Submatrix on the rows where `keep` holds, rows renumbered in order.
    pub fn select_rows(&self, keep: impl Fn(usize) -> bool) -> Self {
        let mut map = vec![u32::MAX; self.rows];
        let mut n = 0;
        for (r, slot) in map.iter_mut().enumerate() {
            if keep(r) {
                *slot = n;
                n += 1;
            }
        }
        let columns = self
            .columns
            .iter()
            .map(|col| col.iter().filter(|e| map[e.0 as usize] != u32::MAX).map(|&(r, v)| (map[r as usize], v)).collect())
            .collect();
        Self { rows: n as usize, cols: self.cols, columns }
    }

    /// Submatrix on the listed columns, in the listed order.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        Self { rows: self.rows, cols: cols.len(), columns: cols.iter().map(|&c| self.columns[c].clone()).collect() }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &SparseExactMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: other.rows });
        }
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        Ok(Self { rows: self.rows, cols: self.cols + other.cols, columns })
    }

    /// Exact matrix-vector product.
    pub fn mul_vec(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        let mut out = vec![BigRational::zero(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            if v[c].is_zero() {
                continue;
            }
            for &(r, x) in col {
                out[r as usize] += big(x) * &v[c];
            }
        }
        Ok(out)
    }

    fn modular_columns(&self, p: u64) -> Option<Vec<Vec<(u32, u64)>>> {
        let mut out = Vec::with_capacity(self.cols);
        for col in &self.columns {
            let mut v = Vec::with_capacity(col.len());
            for &(r, x) in col {
                let num = x.numer().rem_euclid(p as i64) as u64;
                let den = x.denom().rem_euclid(p as i64) as u64;
                if den == 0 {
                    return None;
                }
                let val = num * pow_mod(den, p - 2, p) % p;
                if val != 0 {
                    v.push((r, val));
                }
            }
            out.push(v);
        }
        Some(out)
    }

    fn integer_columns(&self) -> Vec<Vec<(u32, BigInt)>> {
        self.columns
            .iter()
            .map(|col| {
                let l = col.iter().fold(1i64, |acc, (_, x)| lcm(acc, *x.denom()));
                col.iter().map(|&(r, x)| (r, BigInt::from(x.numer() * (l / x.denom())))).collect()
            })
            .collect()
    }
}

fn big(x: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

/// Rank strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RankMode {
    /// two random primes, exact fallback on disagreement
    #[default]
    Modular,
    /// always fraction-free exact elimination
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankOptions {
    pub mode: RankMode,
    pub seed: u64,
}

impl Default for RankOptions {
    fn default() -> Self {
        Self { mode: RankMode::Modular, seed: 0x6b68_6361_626c_65 }
    }
}

/// Outcome of a certified rank computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCertificate {
    pub rank: usize,
    /// the two primes and the ranks found modulo each; empty in exact mode
    pub modular: Vec<(u64, usize)>,
    pub exact_fallback: bool,
}

pub fn certified_rank(m: &SparseExactMatrix) -> usize {
    certify_rank(m, &RankOptions::default()).rank
}

pub fn certified_rank_with(m: &SparseExactMatrix, opts: &RankOptions) -> usize {
    certify_rank(m, opts).rank
}

pub fn certify_rank(m: &SparseExactMatrix, opts: &RankOptions) -> RankCertificate {
    if m.nnz() == 0 {
        return RankCertificate { rank: 0, modular: Vec::new(), exact_fallback: false };
    }
    if opts.mode == RankMode::Exact {
        return RankCertificate { rank: exact_rank(m), modular: Vec::new(), exact_fallback: false };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ matrix_fingerprint(m));
    let p1 = random_prime31(&mut rng);
    let mut p2 = random_prime31(&mut rng);
    while p2 == p1 {
        p2 = random_prime31(&mut rng);
    }
    let mut modular = Vec::with_capacity(2);
    for p in [p1, p2] {
        match m.modular_columns(p) {
            Some(cols) => modular.push((p, rank_mod_p(cols, m.rows, p))),
            None => return RankCertificate { rank: exact_rank(m), modular, exact_fallback: true },
        }
    }
    if modular[0].1 == modular[1].1 {
        RankCertificate { rank: modular[0].1, modular, exact_fallback: false }
    } else {
        RankCertificate { rank: exact_rank(m), modular, exact_fallback: true }
    }
}

fn matrix_fingerprint(m: &SparseExactMatrix) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut mix = |x: u64| {
        h ^= x;
        h = h.wrapping_mul(0x0100_0000_01b3);
    };
    mix(m.rows as u64);
    mix(m.cols as u64);
    mix(m.nnz() as u64);
    h
}

/// Uniform random prime in `[2^30, 2^31)`.
pub fn random_prime31<R: Rng>(rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if is_prime_u32(c) {
            return c;
        }
    }
}

/// Deterministic Miller-Rabin for 32-bit inputs (bases 2, 7, 61).
pub fn is_prime_u32(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 61] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 7, 61] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Removes rows and columns that carry a single nonzero entry, each such
/// removal contributing one to the rank. Returns the rank found and the
/// surviving rows (as sparse rows over column ids).
fn peel_singletons<E: Clone>(columns: Vec<Vec<(u32, E)>>, nrows: usize) -> (usize, Vec<Vec<(u32, E)>>) {
    let ncols = columns.len();
    let mut rows: Vec<Vec<(u32, E)>> = vec![Vec::new(); nrows];
    for (c, col) in columns.into_iter().enumerate() {
        for (r, v) in col {
            rows[r as usize].push((c as u32, v));
        }
    }
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for e in row {
            col_rows[e.0 as usize].push(r as u32);
        }
    }
    let mut row_alive = vec![true; nrows];
    let mut col_alive = vec![true; ncols];
    let mut row_cnt: Vec<usize> = rows.iter().map(Vec::len).collect();
    let mut col_cnt: Vec<usize> = col_rows.iter().map(Vec::len).collect();
    let mut queue: VecDeque<(bool, usize)> = VecDeque::new();
    for (c, &n) in col_cnt.iter().enumerate() {
        if n == 1 {
            queue.push_back((false, c));
        }
    }
    for (r, &n) in row_cnt.iter().enumerate() {
        if n == 1 {
            queue.push_back((true, r));
        }
    }
    let mut rank = 0;
    while let Some((is_row, i)) = queue.pop_front() {
        let (r, c) = if is_row {
            if !row_alive[i] || row_cnt[i] != 1 {
                continue;
            }
            let c = rows[i].iter().find(|e| col_alive[e.0 as usize]).expect("one live entry").0 as usize;
            (i, c)
        } else {
            if !col_alive[i] || col_cnt[i] != 1 {
                continue;
            }
            let r = col_rows[i].iter().find(|&&r| row_alive[r as usize]).copied().expect("one live entry") as usize;
            (r, i)
        };
        rank += 1;
        row_alive[r] = false;
        col_alive[c] = false;
        for e in &rows[r] {
            let cc = e.0 as usize;
            if col_alive[cc] {
                col_cnt[cc] -= 1;
                if col_cnt[cc] == 1 {
                    queue.push_back((false, cc));
                }
            }
        }
        for &rr in &col_rows[c] {
            let rr = rr as usize;
            if row_alive[rr] {
                row_cnt[rr] -= 1;
                if row_cnt[rr] == 1 {
                    queue.push_back((true, rr));
                }
            }
        }
    }
    let remaining = rows
        .into_iter()
        .enumerate()
        .filter(|(r, _)| row_alive[*r])
        .map(|(_, row)| row.into_iter().filter(|e| col_alive[e.0 as usize]).collect::<Vec<_>>())
        .filter(|row| !row.is_empty())
        .collect();
    (rank, remaining)
}

/// Static Markowitz ordering: columns with fewer entries become leading
/// columns first; returns `key[col]` and rows rewritten over keys, sorted.
fn order_columns<E>(rows: Vec<Vec<(u32, E)>>, ncols: usize) -> Vec<Vec<(u32, E)>> {
    let mut count = vec![0u32; ncols];
    for row in &rows {
        for e in row {
            count[e.0 as usize] += 1;
        }
    }
    let mut order: Vec<u32> = (0..ncols as u32).collect();
    order.sort_by_key(|&c| (count[c as usize], c));
    let mut key = vec![0u32; ncols];
    for (k, &c) in order.iter().enumerate() {
        key[c as usize] = k as u32;
    }
    let mut rows: Vec<Vec<(u32, E)>> = rows
        .into_iter()
        .map(|row| {
            let mut row: Vec<(u32, E)> = row.into_iter().map(|(c, v)| (key[c as usize], v)).collect();
            row.sort_unstable_by_key(|e| e.0);
            row
        })
        .collect();
    rows.sort_by_key(Vec::len);
    rows
}

fn rank_mod_p(columns: Vec<Vec<(u32, u64)>>, nrows: usize, p: u64) -> usize {
    let ncols = columns.len();
    let (peeled, rows) = peel_singletons(columns, nrows);
    peeled + markowitz_rank(rows, ncols, p)
}

/// Right-looking elimination choosing, at each step, the live column with
/// fewest entries and within it the shortest row.
fn markowitz_rank(mut rows: Vec<Vec<(u32, u64)>>, ncols: usize, p: u64) -> usize {
    for row in rows.iter_mut() {
        row.sort_unstable_by_key(|e| e.0);
    }
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    let mut count = vec![0usize; ncols];
    for (r, row) in rows.iter().enumerate() {
        for e in row {
            col_rows[e.0 as usize].push(r as u32);
            count[e.0 as usize] += 1;
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> =
        (0..ncols).filter(|&c| count[c] > 0).map(|c| Reverse((count[c], c as u32))).collect();
    let mut row_alive = vec![true; rows.len()];
    let mut seen = vec![u32::MAX; rows.len()];
    let mut rank = 0;
    while let Some(Reverse((n, c))) = heap.pop() {
        let cu = c as usize;
        if n != count[cu] || n == 0 {
            continue;
        }
        let mut live: Vec<u32> = Vec::with_capacity(n);
        for &r in &col_rows[cu] {
            let ru = r as usize;
            if row_alive[ru] && seen[ru] != c && rows[ru].binary_search_by_key(&c, |e| e.0).is_ok() {
                seen[ru] = c;
                live.push(r);
            }
        }
        col_rows[cu] = Vec::new();
        count[cu] = 0;
        let Some(&pr) = live.iter().min_by_key(|&&r| rows[r as usize].len()) else { continue };
        rank += 1;
        let piv = std::mem::take(&mut rows[pr as usize]);
        row_alive[pr as usize] = false;
        let pc = piv[piv.binary_search_by_key(&c, |e| e.0).expect("pivot entry")].1;
        let inv = pow_mod(pc, p - 2, p);
        for e in &piv {
            if e.0 != c {
                count[e.0 as usize] -= 1;
            }
        }
        for &r in &live {
            if r == pr {
                continue;
            }
            let old = std::mem::take(&mut rows[r as usize]);
            let rc = old[old.binary_search_by_key(&c, |e| e.0).expect("entry")].1;
            let a = (p - rc * inv % p) % p;
            let new = axpy_mod(&old, a, &piv, p);
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < new.len() {
                let (oc, nc) = (old.get(i).map(|e| e.0), new.get(j).map(|e| e.0));
                match (oc, nc) {
                    (Some(x), Some(y)) if x == y => {
                        i += 1;
                        j += 1;
                    }
                    (Some(x), y) if y.is_none_or(|y| x < y) => {
                        if x != c {
                            count[x as usize] -= 1;
                            heap.push(Reverse((count[x as usize], x)));
                        }
                        i += 1;
                    }
                    (_, Some(y)) => {
                        count[y as usize] += 1;
                        col_rows[y as usize].push(r);
                        heap.push(Reverse((count[y as usize], y)));
                        j += 1;
                    }
                    _ => unreachable!(),
                }
            }
            if new.is_empty() {
                row_alive[r as usize] = false;
            }
            rows[r as usize] = new;
        }
        for e in &piv {
            if e.0 != c {
                heap.push(Reverse((count[e.0 as usize], e.0)));
            }
        }
    }
    rank
}

/// `row + a * piv` modulo `p`, both sorted by key.
fn axpy_mod(row: &[(u32, u64)], a: u64, piv: &[(u32, u64)], p: u64) -> Vec<(u32, u64)> {
    let mut out = Vec::with_capacity(row.len() + piv.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < piv.len() {
        let take_row = j >= piv.len() || (i < row.len() && row[i].0 < piv[j].0);
        let take_piv = i >= row.len() || (j < piv.len() && piv[j].0 < row[i].0);
        if take_row {
            out.push(row[i]);
            i += 1;
        } else if take_piv {
            out.push((piv[j].0, a * piv[j].1 % p));
            j += 1;
        } else {
            let v = (row[i].1 + a * piv[j].1) % p;
            if v != 0 {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Rank over Q by fraction-free elimination on integer rows.
pub fn exact_rank(m: &SparseExactMatrix) -> usize {
    let (peeled, rows) = peel_singletons(m.integer_columns(), m.rows);
    let rows = order_columns(rows, m.cols);
    let mut ech = IntEchelon::default();
    peeled + rows.into_iter().filter(|row| ech.insert(row.clone())).count()
}

#[derive(Default)]
struct IntEchelon {
    pivots: HashMap<u32, Vec<(u32, BigInt)>>,
}

impl IntEchelon {
    fn insert(&mut self, mut row: Vec<(u32, BigInt)>) -> bool {
        loop {
            let Some((lead, coef)) = row.first().cloned() else { return false };
            match self.pivots.get(&lead) {
                Some(piv) => {
                    // piv_lead * row - coef * piv, no division
                    let pl = piv[0].1.clone();
                    row = combine_int(&row, &pl, piv, &(-coef));
                    primitive(&mut row);
                }
                None => {
                    primitive(&mut row);
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }
}

fn combine_int(a: &[(u32, BigInt)], ca: &BigInt, b: &[(u32, BigInt)], cb: &BigInt) -> Vec<(u32, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push((a[i].0, &a[i].1 * ca));
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, &b[j].1 * cb));
            j += 1;
        } else {
            let v = &a[i].1 * ca + &b[j].1 * cb;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn primitive(row: &mut [(u32, BigInt)]) {
    let mut g = BigInt::zero();
    for e in row.iter() {
        g = num_integer::Integer::gcd(&g, &e.1);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for e in row.iter_mut() {
            e.1 = &e.1 / &g;
        }
    }
}

/// Dense exact vector.
pub type ExactVector = Vec<BigRational>;

/// Reduced row echelon form over Q on rows keyed by column id.
#[derive(Default)]
struct RatEchelon {
    pivots: HashMap<u32, Vec<(u32, BigRational)>>,
}

impl RatEchelon {
    fn reduce(&self, mut row: Vec<(u32, BigRational)>) -> Vec<(u32, BigRational)> {
        // eliminate every entry sitting on a pivot column, scanning left to right
        let mut k = 0;
        while k < row.len() {
            let (col, coef) = (row[k].0, row[k].1.clone());
            if let Some(piv) = self.pivots.get(&col) {
                row = axpy_rat(&row, &(-coef), piv);
                k = row.partition_point(|e| e.0 < col);
            } else {
                k += 1;
            }
        }
        row
    }

    fn insert(&mut self, row: Vec<(u32, BigRational)>) -> bool {
        let mut row = self.reduce(row);
        let Some((lead, coef)) = row.first().cloned() else { return false };
        let inv = coef.recip();
        for e in row.iter_mut() {
            e.1 = &e.1 * &inv;
        }
        // keep the form reduced: clear the new pivot column from older rows
        for piv in self.pivots.values_mut() {
            if let Ok(i) = piv.binary_search_by_key(&lead, |e| e.0) {
                let c = -piv[i].1.clone();
                *piv = axpy_rat(piv, &c, &row);
            }
        }
        self.pivots.insert(lead, row);
        true
    }
}

fn axpy_rat(row: &[(u32, BigRational)], a: &BigRational, piv: &[(u32, BigRational)]) -> Vec<(u32, BigRational)> {
    let mut out = Vec::with_capacity(row.len() + piv.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < piv.len() {
        if j >= piv.len() || (i < row.len() && row[i].0 < piv[j].0) {
            out.push(row[i].clone());
            i += 1;
        } else if i >= row.len() || piv[j].0 < row[i].0 {
            out.push((piv[j].0, a * &piv[j].1));
            j += 1;
        } else {
            let v = &row[i].1 + a * &piv[j].1;
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn rational_rows(m: &SparseExactMatrix) -> Vec<Vec<(u32, BigRational)>> {
    let mut rows: Vec<Vec<(u32, BigRational)>> = vec![Vec::new(); m.rows];
    for (c, col) in m.columns.iter().enumerate() {
        for &(r, v) in col {
            rows[r as usize].push((c as u32, big(v)));
        }
    }
    rows
}

/// Exact basis of `{x : m x = 0}`, one vector per free column.
pub fn kernel_basis(m: &SparseExactMatrix) -> Vec<ExactVector> {
    let mut ech = RatEchelon::default();
    for row in rational_rows(m) {
        ech.insert(row);
    }
    let mut basis = Vec::with_capacity(m.cols - ech.pivots.len());
    let mut pivot_rows: Vec<(&u32, &Vec<(u32, BigRational)>)> = ech.pivots.iter().collect();
    pivot_rows.sort_by_key(|(lead, _)| **lead);
    for free in (0..m.cols as u32).filter(|c| !ech.pivots.contains_key(c)) {
        let mut v = vec![BigRational::zero(); m.cols];
        v[free as usize] = BigRational::one();
        for (lead, row) in &pivot_rows {
            if let Ok(i) = row.binary_search_by_key(&free, |e| e.0) {
                v[**lead as usize] = -row[i].1.clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// Whether `v` lies in the column span of `m`, decided exactly.
pub fn in_image(v: &[BigRational], m: &SparseExactMatrix) -> Result<bool> {
    if v.len() != m.rows {
        return Err(Error::DimensionMismatch { expected: m.rows, got: v.len() });
    }
    let target = sparse(v);
    if target.is_empty() {
        return Ok(true);
    }
    let mut ech = RatEchelon::default();
    for col in &m.columns {
        ech.insert(col.iter().map(|&(r, x)| (r, big(x))).collect());
    }
    Ok(ech.reduce(target).is_empty())
}

/// Exact rank of the span of the given vectors.
pub fn span_rank(vectors: &[ExactVector]) -> usize {
    let mut ech = RatEchelon::default();
    vectors.iter().filter(|v| ech.insert(sparse(v))).count()
}

/// Incrementally built exact span of sparse rational vectors.
#[derive(Default)]
pub struct ExactSpan {
    ech: RatEchelon,
}

impl ExactSpan {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `v`; returns whether it was independent of the span so far.
    pub fn insert(&mut self, v: Vec<(u32, BigRational)>) -> bool {
        self.ech.insert(v)
    }

    pub fn contains(&self, v: Vec<(u32, BigRational)>) -> bool {
        self.ech.reduce(v).is_empty()
    }

    pub fn rank(&self) -> usize {
        self.ech.pivots.len()
    }
}

/// Sparse form of a dense exact vector.
pub fn sparse(v: &[BigRational]) -> Vec<(u32, BigRational)> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i as u32, x.clone())).collect()
}

/// Column `c` of `m` as a sparse exact vector.
pub fn column_vector(m: &SparseExactMatrix, c: usize) -> Vec<(u32, BigRational)> {
    m.columns[c].iter().map(|&(r, x)| (r, big(x))).collect()
}
