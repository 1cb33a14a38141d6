//! Registry of checkable claims: each id computes homology for a family of
//! diagrams and compares it against a closed-form prediction.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cube::{binomial, state_count};
use crate::diagrams::{braid_closure, cable_diagram, metadata, torus_link, whitehead_double, BraidWord, PlanarDiagram};
use crate::error::{Error, Result};
use crate::homology::{betti_with, kh0_positive_prediction, thickness, BettiTable, ComputeOptions, Engine};
use crate::lee::{double_s, lee_betti_with, lee_dims_predicted, s_from_kh0, s_invariant};
use crate::skein::les_check_with;

/// Default cap on `Σ 2^{k_ε}` over materialized states.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

pub struct TheoremInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub defaults: &'static [(&'static str, &'static str)],
    /// larger instance, only run on request
    pub slow: Option<&'static [(&'static str, &'static str)]>,
}

pub const REGISTRY: &[TheoremInfo] = &[
    TheoremInfo {
        id: "thm-newmainthm",
        summary: "top degree, its dimension and support for T(2k+1, (2k+1)n)",
        defaults: &[("k", "1"), ("n", "1")],
        slow: Some(&[("k", "1"), ("n", "2")]),
    },
    TheoremInfo {
        id: "thm-stosic-even",
        summary: "top degree and graded dimensions for T(2k, 2kn)",
        defaults: &[("k", "2"), ("n", "1")],
        slow: None,
    },
    TheoremInfo {
        id: "thm-newmainthm2",
        summary: "top degree, dimension and support for the (2k, 2k(n+f)) cable of a braid closure",
        defaults: &[("braid", "1"), ("k", "1"), ("n", "2")],
        slow: Some(&[("braid", "1 1 1"), ("k", "1"), ("n", "4")]),
    },
    TheoremInfo {
        id: "prop-newmainprop",
        summary: "window for the top degree of the (2k+1, (2k+1)(n+f)) cable",
        defaults: &[("braid", ""), ("k", "1"), ("n", "1")],
        slow: Some(&[("braid", "1"), ("k", "1"), ("n", "1")]),
    },
    TheoremInfo {
        id: "lemma-lem1",
        summary: "vanishing of H^{2k(k+1)n} of the closure of (σ1…σ2k)^{(2k+1)n-1}",
        defaults: &[("k", "1"), ("n", "1")],
        slow: None,
    },
    TheoremInfo {
        id: "prop-4.3",
        summary: "Lee homology dimensions against the linking-number subset count",
        defaults: &[("diagrams", "T2,2;T2,4;T3,3;T4,4;C1/2,4")],
        slow: None,
    },
    TheoremInfo {
        id: "prop-lem4",
        summary: "KH^0 of L(D, 2n) and KH^2 of L(D, 2n+1) for n > l",
        defaults: &[("braid", ""), ("n", "1")],
        slow: Some(&[("braid", "1 1 1"), ("n", "4")]),
    },
    TheoremInfo {
        id: "cor-thickness",
        summary: "thickness lower bounds for torus links and cables of positive knots",
        defaults: &[("k", "1"), ("n", "1"), ("braid", "1"), ("cable_n", "2")],
        slow: None,
    },
    TheoremInfo {
        id: "thm-khovanov2",
        summary: "KH^0 and low-q vanishing for positive diagrams",
        defaults: &[("diagrams", "B1 1 1;T3,3;T2,4;C1/2,4")],
        slow: None,
    },
    TheoremInfo {
        id: "cor-ras-double",
        summary: "s of twisted Whitehead doubles with many twists",
        defaults: &[("braid", ""), ("q", "2,3,-2,-1")],
        slow: None,
    },
    TheoremInfo {
        id: "les-random",
        summary: "skein exact sequence at random crossings of random braid closures",
        defaults: &[("count", "6"), ("min_len", "4"), ("max_len", "8"), ("strands", "3")],
        slow: None,
    },
];

pub fn theorem(id: &str) -> Result<&'static TheoremInfo> {
    REGISTRY.iter().find(|t| t.id == id).ok_or_else(|| Error::UnknownTheorem(id.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub compute: ComputeOptions,
    pub slow: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            compute: ComputeOptions { budget: Some(DEFAULT_BUDGET), engine: Engine::Auto, ..ComputeOptions::default() },
            slow: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub computed: Value,
    pub predicted: Value,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "status", content = "reason")]
pub enum Outcome {
    Pass,
    Fail,
    Refused(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub outcome: Outcome,
    pub wall_ms: u128,
}

impl PartialEq for Report {
    // wall time is not part of the outcome
    fn eq(&self, o: &Self) -> bool {
        self.id == o.id && self.params == o.params && self.seed == o.seed && self.checks == o.checks && self.outcome == o.outcome
    }
}

impl Report {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

/// Runs `id` with the registry defaults (or slow set) overridden by `params`.
pub fn run(id: &str, params: &BTreeMap<String, String>, opts: &VerifyOptions) -> Result<Report> {
    let info = theorem(id)?;
    let base = if opts.slow { info.slow.unwrap_or(info.defaults) } else { info.defaults };
    let mut merged: BTreeMap<String, String> = base.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    for (k, v) in params {
        merged.insert(k.clone(), v.clone());
    }
    let start = Instant::now();
    let mut cx = Ctx { p: &merged, opts: opts.compute, checks: Vec::new() };
    let result = match id {
        "thm-newmainthm" => cx.newmainthm(),
        "thm-stosic-even" => cx.stosic_even(),
        "thm-newmainthm2" => cx.newmainthm2(),
        "prop-newmainprop" => cx.newmainprop(),
        "lemma-lem1" => cx.lem1(),
        "prop-4.3" => cx.lee_prop(),
        "prop-lem4" => cx.lem4(),
        "cor-thickness" => cx.thickness(),
        "thm-khovanov2" => cx.khovanov2(),
        "cor-ras-double" => cx.ras_double(),
        "les-random" => cx.les_random(),
        _ => unreachable!("registry and dispatch agree"),
    };
    let checks = cx.checks;
    let outcome = match result {
        Ok(()) if checks.iter().all(|c| c.passed) => Outcome::Pass,
        Ok(()) => Outcome::Fail,
        Err(e @ Error::BudgetExceeded { .. }) => Outcome::Refused(e.to_string()),
        Err(e) => return Err(e),
    };
    Ok(Report {
        id: id.to_string(),
        params: merged,
        seed: opts.compute.rank.seed,
        checks,
        outcome,
        wall_ms: start.elapsed().as_millis(),
    })
}

struct Ctx<'a> {
    p: &'a BTreeMap<String, String>,
    opts: ComputeOptions,
    checks: Vec<Check>,
}

fn bad(msg: String) -> Error {
    Error::InvalidParameters(msg)
}

/// Diagram spec: `Tp,q` torus link, `Bword` braid closure, `Cword/p,q` cable
/// diagram of a one-strand-or-more braid.
fn parse_diagram(spec: &str) -> Result<(String, PlanarDiagram)> {
    let spec = spec.trim();
    let d = if let Some(rest) = spec.strip_prefix('T') {
        let (p, q) = rest.split_once(',').ok_or_else(|| bad(format!("torus spec `{spec}` needs p,q")))?;
        torus_link(parse_int(p)?, parse_int(q)?)?
    } else if let Some(rest) = spec.strip_prefix('B') {
        braid_closure(&rest.parse()?)
    } else if let Some(rest) = spec.strip_prefix('C') {
        let (w, pq) = rest.split_once('/').ok_or_else(|| bad(format!("cable spec `{spec}` needs word/p,q")))?;
        let (p, q) = pq.split_once(',').ok_or_else(|| bad(format!("cable spec `{spec}` needs p,q")))?;
        cable_diagram(&w.replace('_', " ").parse()?, parse_int(p)? as usize, parse_int(q)? as usize)?
    } else {
        return Err(bad(format!("unknown diagram spec `{spec}`")));
    };
    Ok((spec.to_string(), d))
}

fn parse_int(s: &str) -> Result<i64> {
    s.trim().parse().map_err(|_| bad(format!("`{s}` is not an integer")))
}

/// Knot braid, one strand if empty.
fn knot_braid(s: &str) -> Result<BraidWord> {
    let w: BraidWord = s.parse()?;
    if w.is_empty() {
        return BraidWord::trivial(1);
    }
    Ok(w)
}

impl Ctx<'_> {
    fn int(&self, key: &str) -> Result<i64> {
        let v = self.p.get(key).ok_or_else(|| bad(format!("missing parameter `{key}`")))?;
        parse_int(v)
    }

    fn positive(&self, key: &str) -> Result<i64> {
        let v = self.int(key)?;
        if v < 1 {
            return Err(bad(format!("`{key}` must be positive, got {v}")));
        }
        Ok(v)
    }

    fn string(&self, key: &str) -> Result<&str> {
        self.p.get(key).map(String::as_str).ok_or_else(|| bad(format!("missing parameter `{key}`")))
    }

    fn check(&mut self, name: impl Into<String>, computed: impl Serialize, predicted: impl Serialize, passed: bool) {
        self.checks.push(Check {
            name: name.into(),
            computed: serde_json::to_value(computed).expect("plain data"),
            predicted: serde_json::to_value(predicted).expect("plain data"),
            passed,
        });
    }

    fn eq_check<T: Serialize + PartialEq>(&mut self, name: impl Into<String>, computed: T, predicted: T) {
        let ok = computed == predicted;
        self.check(name, computed, predicted, ok);
    }

    fn feasible(&self, d: &PlanarDiagram, window: Option<(usize, usize)>) -> Result<()> {
        if self.opts.engine != Engine::Cube {
            return Ok(());
        }
        if let Some(budget) = self.opts.budget {
            let est = 2 * state_count(d.crossing_count(), window);
            if est > budget {
                return Err(Error::BudgetExceeded { estimate: est, budget });
            }
        }
        Ok(())
    }

    /// Normalized table from normalized degree `lo` to the top.
    fn top_table(&self, d: &PlanarDiagram, lo: i64) -> Result<BettiTable> {
        let n = d.crossing_count() as i64;
        let a = (lo + d.negative_count() as i64).clamp(0, n) as usize;
        self.feasible(d, Some((a, n as usize)))?;
        betti_with(d, Some((a, n as usize)), true, &self.opts)
    }

    fn full(&self, d: &PlanarDiagram, normalized: bool) -> Result<BettiTable> {
        self.feasible(d, None)?;
        betti_with(d, None, normalized, &self.opts)
    }

    fn newmainthm(&mut self) -> Result<()> {
        let (k, n) = (self.positive("k")?, self.positive("n")?);
        let d = torus_link(2 * k + 1, (2 * k + 1) * n)?;
        let top = 2 * k * (k + 1) * n;
        let t = self.top_table(&d, top)?;
        self.eq_check("max degree", t.max_degree(), Some(top));
        let dim = binomial(2 * k as usize + 2, k as usize + 1) as usize;
        self.eq_check(format!("dim KH^{top}"), t.dim(top), dim);
        for i in 0..=k + 1 {
            let j = 6 * k * (k + 1) * n + 1 - 2 * i;
            let h = t.get(top, j);
            self.check(format!("KH^{{{top},{j}}} nonzero"), h, "> 0", h > 0);
        }
        Ok(())
    }

    fn stosic_even(&mut self) -> Result<()> {
        let (k, n) = (self.positive("k")?, self.positive("n")?);
        let d = torus_link(2 * k, 2 * k * n)?;
        let top = 2 * k * k * n;
        let t = self.top_table(&d, top)?;
        self.eq_check("max degree", t.max_degree(), Some(top));
        let kk = k as usize;
        self.eq_check(format!("dim KH^{top}"), t.dim(top), binomial(2 * kk, kk) as usize);
        for i in 0..=k + 1 {
            let j = 6 * k * k * n - 2 * i;
            let predicted = if i <= k {
                let iu = i as usize;
                binomial(2 * kk, kk - iu) - if iu < kk { binomial(2 * kk, kk - iu - 1) } else { 0 }
            } else {
                0
            };
            self.eq_check(format!("dim KH^{{{top},{j}}}"), t.get(top, j), predicted as usize);
        }
        Ok(())
    }

    fn newmainthm2(&mut self) -> Result<()> {
        let w = knot_braid(self.string("braid")?)?;
        let (k, n) = (self.positive("k")?, self.int("n")?);
        let (l, f) = (w.len() as i64, w.writhe());
        if n < l {
            return Err(bad(format!("needs n >= l = {l}, got n = {n}")));
        }
        let d = cable_diagram(&w, 2 * k as usize, (2 * k * n) as usize)?;
        let top = 2 * k * k * (n + f);
        let t = self.top_table(&d, top)?;
        self.eq_check("max degree", t.max_degree(), Some(top));
        if n > l {
            let kk = k as usize;
            self.eq_check(format!("dim KH^{top}"), t.dim(top), binomial(2 * kk, kk) as usize);
            for i in 0..=k {
                let j = 6 * k * k * (n + f) - 2 * i;
                let h = t.get(top, j);
                self.check(format!("KH^{{{top},{j}}} nonzero"), h, "> 0", h > 0);
            }
        }
        Ok(())
    }

    fn newmainprop(&mut self) -> Result<()> {
        let w = knot_braid(self.string("braid")?)?;
        let (k, n) = (self.positive("k")?, self.int("n")?);
        let l_plus = w.positive_count() as i64;
        let (lo, hi) = crate::skein::cable_maxdeg_window(k, n, w.writhe(), l_plus)?;
        let d = cable_diagram(&w, 2 * k as usize + 1, ((2 * k + 1) * n) as usize)?;
        let t = self.top_table(&d, lo)?;
        let max = t.max_degree();
        self.check("max degree in window", max, [lo, hi], max.is_some_and(|m| lo <= m && m <= hi));
        Ok(())
    }

    fn lem1(&mut self) -> Result<()> {
        let (k, n) = (self.positive("k")?, self.positive("n")?);
        let d = torus_link(2 * k + 1, (2 * k + 1) * n - 1)?;
        let deg = (2 * k * (k + 1) * n) as usize;
        if deg > d.crossing_count() {
            self.eq_check(format!("dim H^{deg}"), 0usize, 0usize);
            return Ok(());
        }
        self.feasible(&d, Some((deg, deg)))?;
        let t = betti_with(&d, Some((deg, deg)), false, &self.opts)?;
        self.eq_check(format!("dim H^{deg}"), t.dim(deg as i64), 0);
        Ok(())
    }

    fn lee_prop(&mut self) -> Result<()> {
        let specs: Vec<String> = self.string("diagrams")?.split(';').map(str::to_string).collect();
        for spec in specs {
            let (name, d) = parse_diagram(&spec)?;
            self.feasible(&d, None)?;
            let computed = lee_betti_with(&d, &self.opts)?;
            let predicted = lee_dims_predicted(&metadata(&d))?;
            let total: usize = computed.values().sum();
            self.eq_check(format!("{name}: total dim"), total, 1usize << d.component_count());
            self.eq_check(format!("{name}: Lee dims"), computed, predicted);
        }
        Ok(())
    }

    fn lem4(&mut self) -> Result<()> {
        let w = knot_braid(self.string("braid")?)?;
        let n = self.positive("n")?;
        let l = w.len() as i64;
        if n <= l {
            return Err(bad(format!("needs n > l = {l}, got n = {n}")));
        }
        let even = whitehead_double(&w, 2 * n)?;
        let nm = even.negative_count();
        self.feasible(&even, Some((nm, nm)))?;
        let t = betti_with(&even, Some((nm, nm)), true, &self.opts)?;
        let support: Vec<i64> = t.support(0);
        self.eq_check("L(D,2n): KH^0 support", support, vec![-1, -3]);
        self.eq_check("L(D,2n): dim KH^0", t.dim(0), 2);
        let odd = whitehead_double(&w, 2 * n + 1)?;
        let deg = odd.negative_count() + 2;
        if deg <= odd.crossing_count() {
            self.feasible(&odd, Some((deg, deg)))?;
            let t = betti_with(&odd, Some((deg, deg)), true, &self.opts)?;
            self.eq_check("L(D,2n+1): dim KH^{2,5}", t.get(2, 5), 1);
            let stray: Vec<i64> = t.support(2).into_iter().filter(|&j| j != 5 && j != 3).collect();
            self.eq_check("L(D,2n+1): KH^2 outside j = 3, 5", stray, Vec::new());
        } else {
            self.check("L(D,2n+1): dim KH^{2,5}", 0, 1, false);
        }
        Ok(())
    }

    fn thickness(&mut self) -> Result<()> {
        let (k, n) = (self.positive("k")?, self.positive("n")?);
        let odd = torus_link(2 * k + 1, (2 * k + 1) * n)?;
        let (hw, bound) = thickness(&self.full(&odd, true)?)?;
        self.check("hw(T(2k+1,(2k+1)n))", hw, format!(">= {}", k * k * n + 2), hw >= k * k * n + 2);
        self.eq_check("dealternating bound", bound, (hw - 2).max(0));
        let even = torus_link(2 * k, 2 * k * n)?;
        let (hw, _) = thickness(&self.full(&even, true)?)?;
        let need = k * (k - 1) * n + 2;
        self.check("hw(T(2k,2kn))", hw, format!(">= {need}"), hw >= need);
        let w = knot_braid(self.string("braid")?)?;
        let m = self.positive("cable_n")?;
        let l = w.len() as i64;
        if w.negative_count() > 0 || m <= l {
            return Err(bad("the cable bound needs a positive braid and cable_n > l".into()));
        }
        let cable = cable_diagram(&w, 2 * k as usize, (2 * k * m) as usize)?;
        let (hw, _) = thickness(&self.full(&cable, true)?)?;
        let s = s_invariant(&braid_closure(&w))?;
        let need = k * (k - 1) * (m + l) + 2 + k * s;
        self.check("hw(K(2k,2k(n+l)))", hw, format!(">= {need}"), hw >= need);
        Ok(())
    }

    fn khovanov2(&mut self) -> Result<()> {
        let specs: Vec<String> = self.string("diagrams")?.split(';').map(str::to_string).collect();
        for spec in specs {
            let (name, d) = parse_diagram(&spec)?;
            let meta = metadata(&d);
            let predicted = kh0_positive_prediction(&meta)?;
            let t = self.full(&d, true)?;
            self.eq_check(format!("{name}: KH^0 support"), t.support(0), predicted.to_vec());
            self.eq_check(format!("{name}: dim KH^0"), t.dim(0), 2);
            let negative: usize = t.entries().iter().filter(|(k, _)| k.0 < 0).map(|(_, v)| v).sum();
            self.eq_check(format!("{name}: KH^{{<0}}"), negative, 0);
            let floor = meta.crossings() as i64 - meta.seifert_circles as i64;
            let low: usize = t.entries().iter().filter(|(k, _)| k.0 > 0 && k.1 < floor).map(|(_, v)| v).sum();
            self.eq_check(format!("{name}: KH^{{i>0, j<{floor}}}"), low, 0);
        }
        Ok(())
    }

    fn ras_double(&mut self) -> Result<()> {
        let w = knot_braid(self.string("braid")?)?;
        let qs: Vec<i64> = self.string("q")?.split(',').map(parse_int).collect::<Result<_>>()?;
        for q in qs {
            let predicted = double_s(w.positive_count() as i64, w.negative_count() as i64, q)
                .ok_or_else(|| Error::OutOfProvenRange(format!("q = {q} for l = {}", w.len())))?;
            let d = whitehead_double(&w, q)?;
            self.feasible(&d, None)?;
            let s = s_invariant(&d)?;
            self.eq_check(format!("s(L(D,{q}))"), s, predicted);
            let nm = d.negative_count();
            let t = betti_with(&d, Some((nm, nm)), true, &self.opts)?;
            if let Some(from_kh) = s_from_kh0(&t) {
                self.eq_check(format!("s(L(D,{q})) from KH^0"), from_kh, s);
            }
        }
        Ok(())
    }

    fn les_random(&mut self) -> Result<()> {
        let count = self.positive("count")?;
        let (lo, hi) = (self.positive("min_len")?, self.positive("max_len")?);
        let strands = self.positive("strands")?;
        if lo > hi || strands < 2 {
            return Err(bad("need min_len <= max_len and at least 2 strands".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.rank.seed);
        for _ in 0..count {
            let len = rng.gen_range(lo..=hi);
            let letters: Vec<i32> = (0..len)
                .map(|_| {
                    let g = rng.gen_range(1..strands) as i32;
                    if rng.gen_bool(0.5) {
                        g
                    } else {
                        -g
                    }
                })
                .collect();
            let w = BraidWord::new(strands as usize, letters)?;
            let d = braid_closure(&w);
            let c = rng.gen_range(0..d.crossing_count());
            self.feasible(&d, None)?;
            let r = les_check_with(&d, c, &self.opts)?;
            let passed = r.passed();
            self.check(format!("braid [{w}] crossing {c}"), json!(r.failures), json!([]), passed);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(id: &str) -> Report {
        run(id, &BTreeMap::new(), &VerifyOptions::default()).unwrap()
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(run("nope", &BTreeMap::new(), &VerifyOptions::default()), Err(Error::UnknownTheorem(_))));
    }

    #[test]
    fn small_defaults_pass() {
        for id in ["thm-newmainthm", "lemma-lem1", "prop-newmainprop", "cor-ras-double", "prop-lem4", "les-random"] {
            let r = quick(id);
            assert!(r.passed(), "{id}: {:#?}", r.checks);
        }
    }

    #[test]
    fn budget_refusal_is_reported() {
        let opts = VerifyOptions {
            compute: ComputeOptions { budget: Some(100), ..ComputeOptions::default() },
            slow: false,
        };
        let r = run("thm-newmainthm", &BTreeMap::new(), &opts).unwrap();
        assert!(matches!(r.outcome, Outcome::Refused(_)));
    }

    #[test]
    fn deterministic_reports() {
        let a = quick("les-random");
        let b = quick("les-random");
        assert_eq!(a, b);
    }

    #[test]
    fn diagram_specs() {
        assert_eq!(parse_diagram("T2,2").unwrap().1.crossing_count(), 2);
        assert_eq!(parse_diagram("B1 1 1").unwrap().1.crossing_count(), 3);
        assert_eq!(parse_diagram("C1/2,4").unwrap().1.crossing_count(), 8);
        assert!(parse_diagram("X").is_err());
    }
}
