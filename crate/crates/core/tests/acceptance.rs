//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod support;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use khcable::cube::build_complex;
use khcable::diagrams::{cable_diagram, metadata, torus_link, whitehead_double, LinkMetadata, PlanarDiagram};
use khcable::exactla::{certify_rank, exact_rank, RankOptions};
use khcable::homology::{betti, betti_unnormalized, betti_with, ComputeOptions, Engine, kh0_positive_prediction, thickness, BettiTable};
use khcable::lee::{double_s, lee_betti, lee_dims_predicted, s_from_kh0, s_invariant, s_invariant_details};
use khcable::skein::{cable_maxdeg_window, cable_vanishing_bound, les_check, Parity};
use khcable::verify::{self, VerifyOptions, DEFAULT_BUDGET};
use khcable::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use support::*;

const SEED: u64 = 20_240_611;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    // cargo may pass a name filter; the suite always runs as a whole
    let list_only = args.iter().any(|a| a == "--list");
    let criteria: Vec<(&str, &str, fn())> = vec![
        ("1", "d∘d = 0 and Euler characteristic = Kauffman bracket oracle on the corpus", c01_foundation),
        ("2", "unknot table and mirror symmetry", c02_unknot_mirror),
        ("3", "T(3,3) and T(3,6) top degree, dimension and support", c03_odd_torus),
        ("4", "T(4,4) top degree graded dimensions", c04_even_torus),
        ("5", "H^4 of the closure of (σ1σ2)^2 vanishes", c05_lem1),
        ("6", "K(2,6) cable of the kink unknot", c06_cable),
        ("6s", "trefoil cable K(2,14), 20 crossings, top window", c06_large_cable),
        ("7", "Lee dimensions against the linking-number count", c07_lee),
        ("8", "skein exact sequence", c08_les),
        ("9", "Whitehead double L(unknot,2): KH^0 and s", c09_double),
        ("9s", "Whitehead doubles of the trefoil, 22 and 23 crossings", c09_large_double),
        ("10", "s-invariant of unknot and trefoils", c10_s),
        ("11", "thickness of T(3,3) and the figure-eight", c11_thickness),
        ("12", "windowed materialization and modular against exact ranks", c12_engineering),
        ("13", "closed-form predictors at 20 random tuples each", c13_predictors),
    ];
    if list_only {
        for (id, what, _) in &criteria {
            println!("criterion {id}: {what}: test");
        }
        return ExitCode::SUCCESS;
    }
    std::panic::set_hook(Box::new(|_| {}));
    let (mut passed, mut failed) = (0, 0);
    for (id, what, f) in criteria {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(()) => {
                println!("criterion {id:<3} PASS  {what} ({secs:.1} s)");
                passed += 1;
            }
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {id:<3} FAIL  {what} ({secs:.1} s): {msg}");
                failed += 1;
            }
        }
    }
    println!("acceptance: {passed} passed, {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn corpus() -> Vec<(String, PlanarDiagram)> {
    let mut c = named_corpus();
    c.extend(random_corpus(SEED, 50));
    c
}

fn table_poly(t: &BettiTable) -> Poly {
    let mut out = Poly::new();
    for (e, c) in t.euler_characteristic().terms() {
        assert!(c.is_integer());
        out.insert(*e, c.to_integer());
    }
    out
}

fn c01_foundation() {
    let hand: Poly = [(1, 1), (3, 1), (5, 1), (9, -1)].into_iter().collect();
    assert_eq!(jones_oracle(&closure("1 1 1")), hand, "oracle disagrees with the trefoil by hand");
    for (name, d) in corpus() {
        let slice = build_complex(&d, None).unwrap();
        for i in 0..d.crossing_count().saturating_sub(1) {
            for q in slice.q_values(i) {
                let a = slice.differential(i, q).unwrap();
                let b = slice.differential(i + 1, q).unwrap();
                assert!(composes_to_zero(&a, &b), "{name}: d∘d ≠ 0 at (i, q) = ({i}, {q})");
            }
        }
        let t = betti(&d, None).unwrap();
        let (chi, oracle) = (table_poly(&t), jones_oracle(&d));
        assert_eq!(chi, oracle, "{name}: χ = {} but oracle gives {}", poly_string(&chi), poly_string(&oracle));
    }
}

fn c02_unknot_mirror() {
    let t = betti(&PlanarDiagram::unknot(), None).unwrap();
    assert_eq!(t.entries().clone(), BTreeMap::from([((0, -1), 1), ((0, 1), 1)]));
    for w in ["1 1 1", "1 -2 1 -2"] {
        let d = closure(w);
        let a = betti(&d, None).unwrap();
        let b = betti(&d.mirror(), None).unwrap();
        for (&(i, j), &v) in a.entries() {
            assert_eq!(b.get(-i, -j), v, "[{w}] at ({i}, {j})");
        }
        assert_eq!(a.entries().len(), b.entries().len());
    }
}

fn top(d: &PlanarDiagram, from: usize) -> BettiTable {
    betti(d, Some((from, d.crossing_count()))).unwrap()
}

fn c03_odd_torus() {
    for (n, deg, js) in [(1i64, 4i64, [13, 11, 9]), (2, 8, [25, 23, 21])] {
        let d = torus_link(3, 3 * n).unwrap();
        let t = top(&d, deg as usize);
        assert_eq!(t.max_degree(), Some(deg), "T(3,{})", 3 * n);
        assert_eq!(t.dim(deg), 6);
        for j in js {
            assert!(t.get(deg, j) > 0, "KH^{{{deg},{j}}}(T(3,{})) = 0", 3 * n);
        }
        let params = BTreeMap::from([("k".to_string(), "1".to_string()), ("n".to_string(), n.to_string())]);
        assert!(verify::run("thm-newmainthm", &params, &VerifyOptions::default()).unwrap().passed());
    }
}

fn c04_even_torus() {
    let t = top(&torus_link(4, 4).unwrap(), 8);
    assert_eq!(t.max_degree(), Some(8));
    assert_eq!(t.dim(8), 6);
    assert_eq!((t.get(8, 24), t.get(8, 22), t.get(8, 20)), (2, 3, 1));
    assert!(verify::run("thm-stosic-even", &BTreeMap::new(), &VerifyOptions::default()).unwrap().passed());
}

fn c05_lem1() {
    let d = torus_link(3, 2).unwrap();
    let t = betti_unnormalized(&d, Some((4, 4))).unwrap();
    assert_eq!(t.dim(4), 0);
    assert!(t.covers(4));
}

fn c06_cable() {
    let d = cable_diagram(&word("1"), 2, 4).unwrap();
    assert_eq!(d.crossing_count(), 8);
    assert_eq!(d.component_count(), 2);
    let t = betti(&d, None).unwrap();
    assert_eq!(t.max_degree(), Some(6));
    assert_eq!(t.dim(6), 2);
    assert!(t.get(6, 18) > 0 && t.get(6, 16) > 0);
    assert!(verify::run("thm-newmainthm2", &BTreeMap::new(), &VerifyOptions::default()).unwrap().passed());
}

fn c06_large_cable() {
    let d = cable_diagram(&word("1 1 1"), 2, 8).unwrap();
    assert_eq!(d.crossing_count(), 20);
    // the cube window alone holds about 5.9e7 generators
    let opts = ComputeOptions { budget: Some(DEFAULT_BUDGET), ..ComputeOptions::default() };
    assert!(matches!(betti_with(&d, Some((14, 20)), true, &opts), Err(Error::BudgetExceeded { .. })));
    let opts = ComputeOptions { engine: Engine::Auto, ..opts };
    let t = betti_with(&d, Some((14, 20)), true, &opts).unwrap();
    assert_eq!(t.window(), Some((14, 20)));
    assert_eq!(t.max_degree(), Some(14));
    assert_eq!(t.dim(14), 2);
    assert_eq!((t.get(14, 42), t.get(14, 40)), (1, 1));
}

fn c07_lee() {
    let named = [
        ("T(2,2)", torus_link(2, 2).unwrap()),
        ("T(2,4)", torus_link(2, 4).unwrap()),
        ("T(3,3)", torus_link(3, 3).unwrap()),
        ("T(4,4)", torus_link(4, 4).unwrap()),
        ("K(2,6)", cable_diagram(&word("1"), 2, 4).unwrap()),
    ];
    for (name, d) in &named {
        assert_eq!(lee_betti(d).unwrap(), lee_dims_predicted(&metadata(d)).unwrap(), "{name}");
    }
    for (name, d) in corpus() {
        let lee = lee_betti(&d).unwrap();
        assert_eq!(lee.values().sum::<usize>(), 1 << d.component_count(), "{name}");
        let kh = betti(&d, None).unwrap();
        for (&i, &v) in &lee {
            assert!(v <= kh.dim(i), "{name}: Lee^{i} larger than KH^{i}");
        }
        if d.component_count() > 1 {
            assert_eq!(lee, lee_dims_predicted(&metadata(&d)).unwrap(), "{name}");
        }
    }
}

fn c08_les() {
    for d in [torus_link(2, 2).unwrap(), closure("1 1 1"), torus_link(3, 3).unwrap()] {
        for c in 0..d.crossing_count() {
            let r = les_check(&d, c).unwrap();
            assert!(r.passed(), "crossing {c}: {:?}", r.failures);
        }
    }
    let w = khcable::diagrams::torus_braid(3, 4).unwrap();
    let c = w.crossing_index(2, 1).unwrap();
    let r = les_check(&torus_link(3, 4).unwrap(), c).unwrap();
    assert!(r.passed(), "D(3,4) crossing (2,1): {:?}", r.failures);
}

fn c09_double() {
    let d = whitehead_double(&word(""), 2).unwrap();
    let nm = d.negative_count();
    let t = betti(&d, Some((nm, nm))).unwrap();
    assert_eq!(t.support(0), vec![-1, -3]);
    assert_eq!((t.get(0, -1), t.get(0, -3)), (1, 1));
    let s = s_invariant_details(&d).unwrap();
    assert_eq!(s.s, -2);
    assert_eq!(s_from_kh0(&t), Some(-2));
}

fn c09_large_double() {
    let params = BTreeMap::from([("braid".to_string(), "1 1 1".to_string()), ("n".to_string(), "4".to_string())]);
    let r = verify::run("prop-lem4", &params, &VerifyOptions::default()).unwrap();
    assert!(r.passed(), "{:?}", r.checks);
}

fn c10_s() {
    assert_eq!(s_invariant(&PlanarDiagram::unknot()).unwrap(), 0);
    let t = closure("1 1 1");
    let s = s_invariant(&t).unwrap();
    let m = metadata(&t);
    assert_eq!(s, 2);
    assert_eq!(m.crossings() as i64 + 1 - m.seifert_circles as i64, 2);
    assert_eq!(s_invariant(&t.mirror()).unwrap(), -2);
    assert_eq!(s_invariant(&closure("-1 -1 -1")).unwrap(), -2);
}

fn c11_thickness() {
    let (hw, bound) = thickness(&betti(&torus_link(3, 3).unwrap(), None).unwrap()).unwrap();
    assert!(hw >= 3, "hw(T(3,3)) = {hw}");
    assert_eq!(bound, hw - 2);
    let (hw, bound) = thickness(&betti(&closure("1 -2 1 -2"), None).unwrap()).unwrap();
    assert_eq!(hw, 2);
    assert_eq!(bound, 0);
}

fn c12_engineering() {
    let d = cable_diagram(&word("1 1 1"), 2, 8).unwrap();
    let n = d.crossing_count();
    let slice = build_complex(&d, Some((14, n))).unwrap();
    let degrees = slice.materialized_degrees();
    assert!(!degrees.is_empty());
    assert!(degrees.iter().all(|&i| (13..=n).contains(&i)), "materialized {degrees:?}");
    for i in 0..13 {
        assert!(slice.degree(i).is_none(), "degree {i} materialized");
    }
    let pool = corpus().into_iter().filter(|(_, d)| d.crossing_count() <= 10).collect::<Vec<_>>();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0;
    while checked < 100 {
        let (name, d) = &pool[rng.gen_range(0..pool.len())];
        if d.crossing_count() == 0 {
            continue;
        }
        let slice = build_complex(d, None).unwrap();
        let i = rng.gen_range(0..d.crossing_count());
        let qs: Vec<i64> = slice.q_values(i).into_iter().collect();
        let q = qs[rng.gen_range(0..qs.len())];
        let m = slice.differential(i, q).unwrap();
        if m.nnz() == 0 {
            continue;
        }
        let opts = RankOptions { seed: rng.gen(), ..RankOptions::default() };
        let cert = certify_rank(&m, &opts);
        assert_eq!(cert.rank, exact_rank(&m), "{name} block ({i}, {q})");
        assert!(cert.modular.iter().all(|&(_, r)| r == cert.rank) || cert.exact_fallback);
        checked += 1;
    }
}

fn torus_meta(p: usize, n: i64) -> LinkMetadata {
    let linking = (0..p).map(|a| (0..p).map(|b| if a == b { 0 } else { n }).collect()).collect();
    LinkMetadata {
        components: p,
        linking,
        writhe: (p * (p - 1)) as i64 * n,
        positive: p * (p - 1) * n as usize,
        negative: 0,
        seifert_circles: p,
    }
}

fn choose(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn c13_predictors() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 13);
    for _ in 0..20 {
        let (k, n, l) = (rng.gen_range(1..8i64), rng.gen_range(0..40i64), rng.gen_range(0..15i64));
        let even = if n >= l { 2 * k * k * (n - l + 1) + l * (2 * k) * (2 * k) } else { l * (2 * k) * (2 * k) };
        let odd = if n >= l {
            2 * k * (k + 1) * (n - l + 1) + l * (2 * k + 1) * (2 * k + 1)
        } else {
            l * (2 * k + 1) * (2 * k + 1)
        };
        assert_eq!(cable_vanishing_bound(k, n, l, Parity::Even).unwrap(), even);
        assert_eq!(cable_vanishing_bound(k, n, l, Parity::Odd).unwrap(), odd);
    }
    for _ in 0..20 {
        let (k, lp, lm) = (rng.gen_range(1..8i64), rng.gen_range(0..10i64), rng.gen_range(0..10i64));
        let n = rng.gen_range(0..40i64);
        let f = lp - lm;
        let got = cable_maxdeg_window(k, n, f, lp);
        if n >= lp + lm {
            let lo = 2 * k * (k + 1) * (n + f);
            assert_eq!(got.unwrap(), (lo, lo + lp));
        } else {
            assert!(matches!(got, Err(Error::OutOfProvenRange(_))));
        }
    }
    // T(p, pn): components pairwise linked n times; Lee dims 2 C(p-1, e) at
    // 2n e (p - e), and the top value C(2k+2, k+1) for p = 2k+1
    for _ in 0..20 {
        let (p, n) = (rng.gen_range(2..9usize), rng.gen_range(1..30i64));
        let got = lee_dims_predicted(&torus_meta(p, n)).unwrap();
        let mut want: BTreeMap<i64, usize> = BTreeMap::new();
        for e in 0..p as i64 {
            *want.entry(2 * n * e * (p as i64 - e)).or_insert(0) += 2 * choose(p as i64 - 1, e) as usize;
        }
        assert_eq!(got, want, "T({p},{p}n), n = {n}");
        if p % 2 == 1 {
            let k = (p as i64 - 1) / 2;
            let top = 2 * k * (k + 1) * n;
            assert_eq!(got[&top] as i64, choose(2 * k + 2, k + 1));
        } else if p == 2 {
            assert_eq!(got[&(2 * n)], 2);
        }
    }
    for _ in 0..20 {
        let (c, s0) = (rng.gen_range(1..60usize), rng.gen_range(1..20usize));
        let meta = LinkMetadata { components: 1, linking: vec![vec![0]], writhe: c as i64, positive: c, negative: 0, seifert_circles: s0 };
        let mid = c as i64 - s0 as i64 + 1;
        assert_eq!(kh0_positive_prediction(&meta).unwrap(), [mid + 1, mid - 1]);
    }
    for _ in 0..20 {
        let (lp, lm) = (rng.gen_range(0..10i64), rng.gen_range(0..10i64));
        let n = rng.gen_range(1..30i64);
        let want = |v: i64| if n > lp + lm { Some(v) } else { None };
        assert_eq!(double_s(lp, lm, 2 * n), want(-2));
        assert_eq!(double_s(lp, lm, 2 * n + 1), want(0));
        assert_eq!(double_s(lp, lm, -2 * n), want(0));
        assert_eq!(double_s(lp, lm, -2 * n + 1), want(2));
    }
}
