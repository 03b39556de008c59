use super::Graph;
use crate::{Error, Result};

/// Largest instance `maxcut_exact` will enumerate by default.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 28;

/// An optimal cut: its size and one assignment reaching it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxCut {
    pub value: usize,
    pub assignment: Vec<bool>,
}

/// Number of edges whose endpoints sit on different sides.
pub fn cut_value(g: &Graph, assignment: &[bool]) -> Result<usize> {
    if assignment.len() != g.n() {
        return Err(Error::Parameter(format!(
            "assignment has length {}, graph has {} vertices",
            assignment.len(),
            g.n()
        )));
    }
    Ok(g.edges()
        .iter()
        .filter(|&&(a, b)| assignment[a] != assignment[b])
        .count())
}

/// Same as [`cut_value`] with the assignment packed as bits (vertex `i` is
/// bit `i`). Bits at positions `>= n` are ignored.
pub fn cut_value_bits(g: &Graph, bits: u64) -> usize {
    g.edges()
        .iter()
        .filter(|&&(a, b)| ((bits >> a) ^ (bits >> b)) & 1 == 1)
        .count()
}

/// Exact MaxCut with the default enumeration limit.
pub fn maxcut_exact(g: &Graph) -> Result<MaxCut> {
    maxcut_exact_limited(g, DEFAULT_ENUMERATION_LIMIT)
}

/// Exact MaxCut by Gray-code enumeration of the `2^(n-1)` bipartitions with
/// vertex 0 pinned to side 0. Each step flips one vertex and updates the cut
/// incrementally from neighbourhood bitmasks.
pub fn maxcut_exact_limited(g: &Graph, limit: usize) -> Result<MaxCut> {
    let n = g.n();
    if n > limit.min(63) {
        return Err(Error::Capability(format!(
            "exact MaxCut enumeration is limited to n <= {}, got n = {n}; \
             use the scaling estimate for larger sizes",
            limit.min(63)
        )));
    }
    let adj = g.adjacency_masks();
    // side: bit v set iff vertex v is on side 1
    let mut side = 0u64;
    let mut cut = 0i64;
    let mut best = 0i64;
    let mut best_side = 0u64;
    let steps = 1u64 << (n - 1);
    for k in 1..steps {
        let v = k.trailing_zeros() as usize + 1;
        let mask = adj[v];
        let on_one = (mask & side).count_ones() as i64;
        let deg = mask.count_ones() as i64;
        let (same, other) = if side >> v & 1 == 1 {
            (on_one, deg - on_one)
        } else {
            (deg - on_one, on_one)
        };
        cut += same - other;
        side ^= 1 << v;
        if cut > best {
            best = cut;
            best_side = side;
        }
    }
    Ok(MaxCut {
        value: best as usize,
        assignment: (0..n).map(|v| best_side >> v & 1 == 1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_erdos_renyi, Graph};
    use proptest::prelude::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn naive(g: &Graph) -> usize {
        (0u64..1 << g.n())
            .map(|x| {
                let a: Vec<bool> = (0..g.n()).map(|v| x >> v & 1 == 1).collect();
                cut_value(g, &a).unwrap()
            })
            .max()
            .unwrap()
    }

    #[test]
    fn small_cut_values() {
        let k2 = Graph::complete(2);
        assert_eq!(cut_value(&k2, &bits("01")).unwrap(), 1);
        let k3 = Graph::complete(3);
        assert_eq!(cut_value(&k3, &bits("010")).unwrap(), 2);
        let k4 = Graph::complete(4);
        assert_eq!(cut_value(&k4, &bits("0011")).unwrap(), 4);
        assert!(matches!(
            cut_value(&k4, &bits("001")),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn known_optima() {
        assert_eq!(maxcut_exact(&Graph::complete(4)).unwrap().value, 4);
        assert_eq!(maxcut_exact(&Graph::complete(3)).unwrap().value, 2);
        assert_eq!(maxcut_exact(&Graph::complete(1)).unwrap().value, 0);
        assert_eq!(maxcut_exact(&Graph::complete(2)).unwrap().value, 1);
        // even cycle and complete bipartite graph are cut entirely
        let c8 = Graph::new(8, (0..8).map(|i| (i, (i + 1) % 8))).unwrap();
        assert_eq!(maxcut_exact(&c8).unwrap().value, 8);
        let k34 = Graph::new(7, (0..3).flat_map(|i| (3..7).map(move |j| (i, j)))).unwrap();
        assert_eq!(maxcut_exact(&k34).unwrap().value, 12);
    }

    #[test]
    fn over_limit_is_capability_error() {
        let g = generate_erdos_renyi(12, 0.5, 1).unwrap();
        assert!(matches!(
            maxcut_exact_limited(&g, 10),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn agrees_with_naive_enumeration_on_all_small_sizes() {
        for n in 1..=6 {
            for seed in 0..40 {
                let g = generate_erdos_renyi(n, 0.5, seed).unwrap();
                assert_eq!(maxcut_exact(&g).unwrap().value, naive(&g));
            }
        }
    }

    proptest! {
        #[test]
        fn complement_symmetry(seed in 0u64..1000, x in any::<u64>()) {
            let g = generate_erdos_renyi(10, 0.5, seed).unwrap();
            let a: Vec<bool> = (0..10).map(|v| x >> v & 1 == 1).collect();
            let c: Vec<bool> = a.iter().map(|b| !b).collect();
            prop_assert_eq!(cut_value(&g, &a).unwrap(), cut_value(&g, &c).unwrap());
            prop_assert_eq!(cut_value_bits(&g, x), cut_value(&g, &a).unwrap());
        }

        #[test]
        fn optimum_dominates_every_assignment(seed in 0u64..1000, x in any::<u64>()) {
            let g = generate_erdos_renyi(9, 0.5, seed).unwrap();
            let best = maxcut_exact(&g).unwrap();
            prop_assert_eq!(cut_value(&g, &best.assignment).unwrap(), best.value);
            let a: Vec<bool> = (0..9).map(|v| x >> v & 1 == 1).collect();
            prop_assert!(cut_value(&g, &a).unwrap() <= best.value);
        }
    }
}
