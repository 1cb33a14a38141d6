use super::braid::{parallel_cable, torus_braid, BraidWord};
use super::pd::{Crossing, PlanarDiagram, RawCrossing, Sign};
use crate::error::{Error, Result};

/// Crossings of a braid drawn top to bottom with every strand oriented
/// downwards, plus the edge labels at the top and bottom of each position.
struct BraidTangle {
    crossings: Vec<Crossing>,
    top: Vec<usize>,
    bottom: Vec<usize>,
    next_label: usize,
}

impl BraidTangle {
    fn new(b: &BraidWord) -> Self {
        let p = b.strands();
        let top: Vec<usize> = (0..p).collect();
        let mut cur = top.clone();
        let mut next = p;
        let mut crossings = Vec::with_capacity(b.len());
        for &w in b.letters() {
            let i = w.unsigned_abs() as usize - 1;
            let (el, er) = (cur[i], cur[i + 1]);
            let (fl, fr) = (next, next + 1);
            next += 2;
            // strand from the top-left exits bottom-right; the strand from the
            // top-right is on top exactly when the letter is positive
            let x = if w > 0 {
                Crossing::new([el, fl, fr, er], Sign::Positive)
            } else {
                Crossing::new([er, el, fl, fr], Sign::Negative)
            };
            crossings.push(x);
            cur[i] = fl;
            cur[i + 1] = fr;
        }
        Self { crossings, top, bottom: cur, next_label: next }
    }

    /// Glues bottom edge of each listed position to its top edge. Returns the
    /// number of positions that carry no crossing at all (free loops).
    fn close_positions(&mut self, positions: impl Iterator<Item = usize>) -> usize {
        let mut loops = 0;
        let mut rename = Vec::new();
        for x in positions {
            if self.bottom[x] == self.top[x] {
                loops += 1;
            } else {
                rename.push((self.bottom[x], self.top[x]));
            }
        }
        for c in self.crossings.iter_mut() {
            for e in c.edges.iter_mut() {
                if let Some(&(_, to)) = rename.iter().find(|(from, _)| from == e) {
                    *e = to;
                }
            }
        }
        loops
    }
}

/// Closure of a braid, all strands oriented downwards so that positive
/// letters give positive crossings. Crossing `k` is letter `k` of the word.
pub fn braid_closure(b: &BraidWord) -> PlanarDiagram {
    let mut t = BraidTangle::new(b);
    let loops = t.close_positions(0..b.strands());
    PlanarDiagram::new(t.crossings, loops).expect("braid closures are valid diagrams")
}

/// Closure of `(sigma_1 ... sigma_{p-1})^q`.
pub fn torus_link(p: i64, q: i64) -> Result<PlanarDiagram> {
    Ok(braid_closure(&torus_braid(p, q)?))
}

fn require_knot(k: &BraidWord) -> Result<()> {
    let c = k.closure_components();
    if c != 1 {
        return Err(Error::NotAKnot(c));
    }
    Ok(())
}

/// Braid of the cable diagram: `p`-parallel of `k`, followed by the torus
/// braid `(sigma_1 ... sigma_{p-1})^q` on the first `p` strands.
pub fn cable_braid(k: &BraidWord, p: usize, q: usize) -> Result<BraidWord> {
    require_knot(k)?;
    if p < 2 {
        return Err(Error::InvalidParameters(format!("cable needs p >= 2, got {p}")));
    }
    let parallel = parallel_cable(k, p)?;
    parallel.concat(&torus_braid(p as i64, q as i64)?)
}

/// Diagram of the `(p, q + p f)`-cable of the closure of `k`, where `f` is the
/// writhe of `k`: the blackboard `p`-parallel plus `q` extra torus crossings.
/// All components run parallel to the companion. Crossing count is
/// `p^2 l + (p - 1) q`.
pub fn cable_diagram(k: &BraidWord, p: usize, q: usize) -> Result<PlanarDiagram> {
    Ok(braid_closure(&cable_braid(k, p, q)?))
}

/// Index (in crossing order) of the torus-block crossing of generator `g`,
/// first occurrence, inside a cable diagram built by [`cable_diagram`].
pub fn cable_torus_crossing(k: &BraidWord, p: usize, q: usize, g: usize) -> Option<usize> {
    let offset = p * p * k.len();
    torus_braid(p as i64, q as i64).ok()?.crossing_index(g, 1).map(|i| offset + i)
}

/// The diagrams `D^t` and `E^t`, `t = 1..=m`, obtained by successively
/// smoothing the first crossings of generators `p-1, p-2, ...` of the torus
/// column: `D^t` is the 0-smoothing of `D^{t-1}`, `E^t` the 1-smoothing.
/// Entry `0` of the result is `(D^0, None)`.
pub fn column_smoothings(
    d: &PlanarDiagram,
    column: &[usize],
    m: usize,
) -> Result<Vec<(PlanarDiagram, Option<PlanarDiagram>)>> {
    if m > column.len() {
        return Err(Error::InvalidParameters(format!("only {} column crossings, asked for {m}", column.len())));
    }
    let mut out = vec![(d.clone(), None)];
    let mut removed: Vec<usize> = Vec::new();
    for &orig in column.iter().take(m) {
        let shift = removed.iter().filter(|&&r| r < orig).count();
        let idx = orig - shift;
        let prev = &out.last().expect("nonempty").0;
        let e = prev.smooth(idx, 1)?;
        let dn = prev.smooth(idx, 0)?;
        out.push((dn, Some(e)));
        removed.push(orig);
    }
    Ok(out)
}

/// `D^t_{p,q}` and `E^t_{p,q}` for `t = 0..=m` on the torus braid closure.
pub fn torus_column_smoothings(p: usize, q: usize, m: usize) -> Result<Vec<(PlanarDiagram, Option<PlanarDiagram>)>> {
    let word = torus_braid(p as i64, q as i64)?;
    let column: Vec<usize> = (1..p)
        .rev()
        .map(|g| {
            word.crossing_index(g, 1)
                .ok_or_else(|| Error::InvalidParameters(format!("T({p},{q}) has no crossing ({g},1)")))
        })
        .collect::<Result<_>>()?;
    column_smoothings(&braid_closure(&word), &column, m)
}

/// Twisted Whitehead double `L(D, q)` of the closure `D` of `k`.
///
/// For `q >= 0` the diagram is the 2-parallel of `D` (crossings `0..4l`), a
/// twist region of `q` crossings (the next `q`), and a two-crossing clasp
/// (the last two). For `q < 0` it is the mirror image of the double of the
/// mirrored word with parameter `1 - q`.
pub fn whitehead_double(k: &BraidWord, q: i64) -> Result<PlanarDiagram> {
    if q < 0 {
        return Ok(whitehead_double(&k.mirror(), 1 - q)?.mirror());
    }
    let body = cable_braid(k, 2, q as usize)?;
    let mut t = BraidTangle::new(&body);
    let loops = t.close_positions(2..body.strands());
    debug_assert_eq!(loops, 0);
    let (t1, t2, b1, b2) = (t.top[0], t.top[1], t.bottom[0], t.bottom[1]);
    let (um, cm) = (t.next_label, t.next_label + 1);
    let mut raw: Vec<RawCrossing> = t.crossings.iter().map(RawCrossing::from).collect();
    // The cap leaving the bottom of positions 1 and 2 is pulled up the left
    // side as a finger; the cup joining the tops of positions 1 and 2 hooks
    // through that finger, passing under it first. The opposite hook gives
    // the mirrored clasp, with positive instead of negative clasp crossings
    // when q = 0.
    let (first, second) = ([t1, um, cm, b1], [um, t2, b2, cm]);
    for edges in [first, second] {
        raw.push(RawCrossing { edges, under_forward: true, over_from_last: true });
    }
    PlanarDiagram::from_raw(raw, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_braid_is_unknot() {
        let d = braid_closure(&BraidWord::trivial(1).unwrap());
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.component_count(), 1);
        let d3 = braid_closure(&BraidWord::trivial(3).unwrap());
        assert_eq!(d3.component_count(), 3);
    }

    #[test]
    fn torus_three_three_counts() {
        let d = torus_link(3, 3).unwrap();
        assert_eq!(d.crossing_count(), 6);
        assert_eq!(d.component_count(), 3);
        assert_eq!(d.negative_count(), 0);
    }

    #[test]
    fn partial_free_loop_in_closure() {
        let w = BraidWord::new(3, vec![1]).unwrap();
        let d = braid_closure(&w);
        assert_eq!(d.free_loops(), 1);
        assert_eq!(d.component_count(), 2);
    }

    #[test]
    fn negative_letters_negative_crossings() {
        let d = braid_closure(&BraidWord::new(3, vec![1, -2, 1, -2]).unwrap());
        assert_eq!(d.positive_count(), 2);
        assert_eq!(d.negative_count(), 2);
        assert!(d.is_knot());
    }

    #[test]
    fn cable_crossing_count_formula() {
        for (word, p, q) in [("1", 2, 4), ("1 1 1", 2, 8), ("", 3, 3), ("1 -2 1 -2", 2, 1), ("1", 3, 2)] {
            let k: BraidWord = word.parse().unwrap();
            let d = cable_diagram(&k, p, q).unwrap();
            assert_eq!(d.crossing_count(), p * p * k.len() + (p - 1) * q, "{word} {p} {q}");
            assert_eq!(d.component_count(), gcd(p, q));
        }
    }

    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn cable_of_trivial_braid_is_torus_diagram() {
        let k = BraidWord::trivial(1).unwrap();
        let d = cable_diagram(&k, 2, 2).unwrap();
        assert_eq!(d, torus_link(2, 2).unwrap());
    }

    #[test]
    fn cable_rejects_links() {
        let k: BraidWord = "1 1".parse().unwrap();
        assert_eq!(cable_diagram(&k, 2, 2), Err(Error::NotAKnot(2)));
        let u = BraidWord::trivial(1).unwrap();
        assert!(cable_diagram(&u, 1, 2).is_err());
    }

    #[test]
    fn double_shape() {
        let k: BraidWord = "1 1 1".parse().unwrap();
        for q in 0..4 {
            let d = whitehead_double(&k, q).unwrap();
            assert_eq!(d.crossing_count(), 4 * 3 + q as usize + 2);
            assert!(d.is_knot());
        }
        let u = BraidWord::trivial(1).unwrap();
        let d = whitehead_double(&u, 0).unwrap();
        assert_eq!(d.crossing_count(), 2);
        assert!(d.is_knot());
    }

    #[test]
    fn negative_twist_rule() {
        let k: BraidWord = "1 1 1".parse().unwrap();
        let d = whitehead_double(&k, -2).unwrap();
        let expected = whitehead_double(&k.mirror(), 3).unwrap().mirror();
        assert_eq!(d, expected);
    }

    #[test]
    fn column_recipe_reaches_shorter_torus_braid() {
        let steps = torus_column_smoothings(3, 4, 2).unwrap();
        assert_eq!(steps.len(), 3);
        let d2 = &steps[2].0;
        assert_eq!(d2.crossing_count(), 6);
        assert_eq!(d2.canonical(), torus_link(3, 3).unwrap().canonical());
        assert_eq!(steps[1].1.as_ref().unwrap().crossing_count(), 7);
    }
}
