mod support;

use khcable::diagrams::{cable_diagram, torus_link, whitehead_double};
use khcable::exactla::{RankMode, RankOptions};
use khcable::homology::{betti, betti_with, ComputeOptions, Engine};
use khcable::tangle::local_betti;

use support::*;

fn local() -> ComputeOptions {
    ComputeOptions { engine: Engine::Local, ..ComputeOptions::default() }
}

#[test]
fn local_matches_cube_on_corpus() {
    let mut corpus = named_corpus();
    corpus.extend(random_corpus(7, 40));
    for (name, d) in &corpus {
        let cube = betti(d, None).unwrap();
        assert_eq!(betti_with(d, None, true, &local()).unwrap(), cube, "{name}");
        let n = d.crossing_count();
        let w = Some((n / 2, n));
        assert_eq!(betti_with(d, w, true, &local()).unwrap(), betti(d, w).unwrap(), "{name} window");
    }
}

#[test]
fn local_euler_characteristic_is_jones() {
    let ds = [
        ("T(3,7)", torus_link(3, 7).unwrap()),
        ("T(4,5)", torus_link(4, 5).unwrap()),
        ("K(2,7) cable of the trefoil", cable_diagram(&word("1 1 1"), 2, 1).unwrap()),
        ("L(trefoil,3)", whitehead_double(&word("1 1 1"), 3).unwrap()),
    ];
    for (name, d) in &ds {
        let t = betti_with(d, None, true, &local()).unwrap();
        let chi: Poly = t.euler_characteristic().terms().iter().map(|(e, c)| (*e, c.to_integer())).collect();
        assert_eq!(chi, jones_oracle(d), "{name}");
    }
}

#[test]
fn exact_and_modular_coefficients_agree() {
    let d = torus_link(3, 5).unwrap();
    let exact = RankOptions { mode: RankMode::Exact, ..RankOptions::default() };
    assert_eq!(local_betti(&d, true, &exact, None).unwrap(), local_betti(&d, true, &RankOptions::default(), None).unwrap());
}

#[test]
fn auto_falls_back_past_the_budget() {
    let d = torus_link(3, 5).unwrap();
    let opts = ComputeOptions { budget: Some(1000), engine: Engine::Auto, ..ComputeOptions::default() };
    assert_eq!(betti_with(&d, None, true, &opts).unwrap(), betti(&d, None).unwrap());
    let cube = ComputeOptions { engine: Engine::Cube, ..opts };
    assert!(betti_with(&d, None, true, &cube).is_err());
}
