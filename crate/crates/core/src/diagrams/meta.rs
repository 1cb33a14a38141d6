use serde::{Deserialize, Serialize};

use super::pd::{PlanarDiagram, Sign};

/// Orientation-dependent counts of a diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkMetadata {
    pub components: usize,
    /// symmetric, zero diagonal
    pub linking: Vec<Vec<i64>>,
    pub writhe: i64,
    pub positive: usize,
    pub negative: usize,
    pub seifert_circles: usize,
}

impl LinkMetadata {
    pub fn crossings(&self) -> usize {
        self.positive + self.negative
    }

    pub fn is_positive(&self) -> bool {
        self.negative == 0
    }
}

pub fn metadata(d: &PlanarDiagram) -> LinkMetadata {
    let c = d.component_count();
    let mut twice = vec![vec![0i64; c]; c];
    for (i, x) in d.crossings().iter().enumerate() {
        let (a, b) = d.crossing_components(i);
        if a != b {
            twice[a][b] += x.sign.as_i64();
            twice[b][a] += x.sign.as_i64();
        }
    }
    let linking = twice.into_iter().map(|row| row.into_iter().map(|v| v / 2).collect()).collect();
    LinkMetadata {
        components: c,
        linking,
        writhe: d.writhe(),
        positive: d.positive_count(),
        negative: d.negative_count(),
        seifert_circles: seifert_circles(d),
    }
}

/// Circles of the oriented smoothing: positive crossings 0-smoothed,
/// negative crossings 1-smoothed.
pub fn seifert_circles(d: &PlanarDiagram) -> usize {
    let state: Vec<u8> = d.crossings().iter().map(|x| u8::from(x.sign == Sign::Negative)).collect();
    crate::cube::resolve(d, &state).expect("state length matches").circle_count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{braid_closure, torus_link, BraidWord};

    #[test]
    fn hopf_linking() {
        let m = metadata(&torus_link(2, 2).unwrap());
        assert_eq!(m.components, 2);
        assert_eq!(m.linking[0][1], 1);
        assert_eq!(m.writhe, 2);
    }

    #[test]
    fn torus_pairwise_linking() {
        let m = metadata(&torus_link(3, 3).unwrap());
        for a in 0..3 {
            assert_eq!(m.linking[a][a], 0);
            for b in 0..3 {
                if a != b {
                    assert_eq!(m.linking[a][b], 1);
                }
            }
        }
        let m5 = metadata(&torus_link(5, 5).unwrap());
        assert_eq!(m5.components, 5);
        assert!(m5.linking.iter().enumerate().all(|(a, row)| row.iter().enumerate().all(|(b, &v)| v == i64::from(a != b))));
    }

    #[test]
    fn trefoil_seifert() {
        let m = metadata(&braid_closure(&"1 1 1".parse::<BraidWord>().unwrap()));
        assert_eq!(m.seifert_circles, 2);
        assert_eq!(m.positive, 3);
        assert_eq!(m.negative, 0);
        assert_eq!(m.components, 1);
    }
}
