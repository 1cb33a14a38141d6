//! Test-only oracles, independent of the library's cube and homology code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use khcable::diagrams::{braid_closure, cable_diagram, torus_link, whitehead_double, BraidWord, PlanarDiagram, Sign};
use khcable::exactla::SparseExactMatrix;
use num_rational::Rational64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Poly = BTreeMap<i64, i64>;

fn add(p: &mut Poly, e: i64, c: i64) {
    let v = p.entry(e).or_insert(0);
    *v += c;
    if *v == 0 {
        p.remove(&e);
    }
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            add(&mut out, ea + eb, ca * cb);
        }
    }
    out
}

/// Loops of a state by walking edge to edge. Slots (0,1),(2,3) are joined
/// when the bit is 0: with the under-strand running bottom to top and slots
/// counterclockwise, that opens the channel between the regions swept by
/// turning the over-strand counterclockwise, i.e. the A-smoothing.
fn loops(d: &PlanarDiagram, state: u64) -> usize {
    let e = d.edge_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); e];
    for (c, x) in d.crossings().iter().enumerate() {
        let pairs = if state >> c & 1 == 0 { [(0, 1), (2, 3)] } else { [(0, 3), (1, 2)] };
        for (a, b) in pairs {
            adj[x.edges[a]].push(x.edges[b]);
            adj[x.edges[b]].push(x.edges[a]);
        }
    }
    let mut seen = vec![false; e];
    let mut count = d.free_loops();
    for start in 0..e {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Kauffman bracket in `A`, normalized so the one-loop diagram has bracket 1.
pub fn kauffman_bracket(d: &PlanarDiagram) -> Poly {
    let n = d.crossing_count();
    assert!(n < 24, "oracle is a plain state sum");
    let mut tally: BTreeMap<(i64, usize), i64> = BTreeMap::new();
    for s in 0u64..1 << n {
        let b = s.count_ones() as i64;
        *tally.entry((n as i64 - 2 * b, loops(d, s))).or_insert(0) += 1;
    }
    let delta: Poly = [(2, -1), (-2, -1)].into_iter().collect();
    let mut out = Poly::new();
    for ((e, k), c) in tally {
        let mut term: Poly = [(e, c)].into_iter().collect();
        for _ in 1..k {
            term = mul(&term, &delta);
        }
        for (e, c) in term {
            add(&mut out, e, c);
        }
    }
    out
}

/// Unnormalized Jones polynomial `(q + 1/q) V` in Khovanov's variable
/// (`t^{1/2} = -q`, `A = t^{-1/4}`), which must equal the graded Euler
/// characteristic of `KH`.
pub fn jones_oracle(d: &PlanarDiagram) -> Poly {
    let w: i64 = d.crossings().iter().map(|x| if x.sign == Sign::Positive { 1 } else { -1 }).sum();
    let sign = if w % 2 == 0 { 1 } else { -1 };
    let v_in_a = mul(&kauffman_bracket(d), &[(-3 * w, sign)].into_iter().collect());
    // A^{2m} = (A^{-2})^{-m} = (-q)^{-m}
    let mut v = Poly::new();
    for (e, c) in v_in_a {
        assert!(e % 2 == 0, "odd power of A in the normalized bracket");
        let m = e / 2;
        add(&mut v, -m, if m % 2 == 0 { c } else { -c });
    }
    mul(&v, &[(1, 1), (-1, 1)].into_iter().collect())
}

pub fn closure(w: &str) -> PlanarDiagram {
    braid_closure(&w.parse::<BraidWord>().unwrap())
}

pub fn word(w: &str) -> BraidWord {
    let b: BraidWord = w.parse().unwrap();
    if b.is_empty() {
        BraidWord::trivial(1).unwrap()
    } else {
        b
    }
}

/// Named diagrams of at most 12 crossings.
pub fn named_corpus() -> Vec<(String, PlanarDiagram)> {
    let mut out: Vec<(String, PlanarDiagram)> = [
        ("unknot", ""),
        ("kink", "1"),
        ("negative kink", "-1"),
        ("Hopf", "1 1"),
        ("negative Hopf", "-1 -1"),
        ("trefoil", "1 1 1"),
        ("mirror trefoil", "-1 -1 -1"),
        ("figure-eight", "1 -2 1 -2"),
        ("T(2,4)", "1 1 1 1"),
        ("T(2,5)", "1 1 1 1 1"),
        ("5_2", "1 1 1 2 -1 2"),
        ("6_2", "1 1 1 -2 1 -2"),
        ("6_3", "1 1 -2 1 -2 -2"),
        ("Borromean", "1 -2 1 -2 1 -2"),
        ("T(2,7)", "1 1 1 1 1 1 1"),
        ("unknot 2-parallel", "1 -1"),
    ]
    .iter()
    .map(|(n, w)| (n.to_string(), closure(w)))
    .collect();
    for (p, q) in [(3, 3), (3, 4), (3, 5), (3, 6), (4, 4), (3, 2)] {
        out.push((format!("T({p},{q})"), torus_link(p, q).unwrap()));
    }
    out.push(("K(2,6) cable of kink".into(), cable_diagram(&word("1"), 2, 4).unwrap()));
    for q in -2..=3 {
        out.push((format!("L(unknot,{q})"), whitehead_double(&word(""), q).unwrap()));
    }
    out.push(("L(kink,2)".into(), whitehead_double(&word("1"), 2).unwrap()));
    out
}

/// `count` random braid closures with 6 to 10 crossings on 3 or 4 strands.
pub fn random_corpus(seed: u64, count: usize) -> Vec<(String, PlanarDiagram)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let strands = rng.gen_range(3..=4usize);
            let len = rng.gen_range(6..=10);
            let letters: Vec<i32> = (0..len)
                .map(|_| {
                    let g = rng.gen_range(1..strands as i32);
                    if rng.gen_bool(0.5) {
                        g
                    } else {
                        -g
                    }
                })
                .collect();
            let w = BraidWord::new(strands, letters).unwrap();
            (format!("random [{w}]"), braid_closure(&w))
        })
        .collect()
}

/// `b * a` over the rationals is zero.
pub fn composes_to_zero(a: &SparseExactMatrix, b: &SparseExactMatrix) -> bool {
    assert_eq!(a.rows(), b.cols());
    for c in 0..a.cols() {
        let mut acc: BTreeMap<u32, Rational64> = BTreeMap::new();
        for &(r, v) in a.column(c) {
            for &(rr, w) in b.column(r as usize) {
                *acc.entry(rr).or_insert_with(Rational64::zero) += v * w;
            }
        }
        if acc.values().any(|v| !v.is_zero()) {
            return false;
        }
    }
    true
}

pub fn poly_string(p: &Poly) -> String {
    p.iter().rev().map(|(e, c)| format!("{c:+}q^{e}")).collect::<Vec<_>>().join(" ")
}
