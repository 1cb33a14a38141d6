use std::collections::BTreeMap;

use khcable::verify::{run, VerifyOptions, REGISTRY};

#[test]
fn every_default_passes() {
    for t in REGISTRY {
        let r = run(t.id, &BTreeMap::new(), &VerifyOptions::default()).unwrap();
        eprintln!("{} {:?} {} ms", t.id, r.outcome, r.wall_ms);
        assert!(r.passed(), "{}: {:#?}", t.id, r.checks);
    }
}
