//! Exhaustive maximization over all set partitions, for small test graphs.

use super::{GraphRef, Partition};
use crate::error::{Error, Result};

/// Largest node count accepted; Bell(12) = 4 213 597 partitions.
pub const BRUTE_FORCE_MAX_NODES: usize = 12;

/// Globally optimal partition, found by enumerating restricted growth strings.
/// The first optimum in enumeration order wins.
pub fn brute_force_max<'a>(graph: impl Into<GraphRef<'a>>) -> Result<Partition> {
    let graph = graph.into();
    let n = graph.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::TooLarge {
            nodes: n,
            limit: BRUTE_FORCE_MAX_NODES,
        });
    }
    if n == 0 {
        return Err(Error::Empty("graph has no nodes"));
    }

    let mut rgs = vec![0u32; n];
    // prefix maxima: max_before[i] = max(rgs[..i])
    let mut max_before = vec![0u32; n];
    let mut best = (graph.modularity(&rgs)?, rgs.clone());
    // next restricted growth string: bump the rightmost incrementable slot
    while let Some(i) = (1..n).rev().find(|&i| rgs[i] <= max_before[i]) {
        rgs[i] += 1;
        for j in i + 1..n {
            rgs[j] = 0;
            max_before[j] = max_before[j - 1].max(rgs[j - 1]);
        }
        let q = graph.modularity(&rgs)?;
        if q > best.0 {
            best = (q, rgs.clone());
        }
    }
    Ok(Partition::new(best.1, graph.node_labels(), best.0, graph.kind(), 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;

    #[test]
    fn enumerates_bell_many() {
        // Bell numbers 1, 2, 5, 15, 52
        for (n, bell) in [(1usize, 1usize), (2, 2), (3, 5), (4, 15), (5, 52)] {
            let mut count = 0;
            let mut rgs = vec![0u32; n];
            let mut max_before = vec![0u32; n];
            loop {
                count += 1;
                let Some(i) = (1..n).rev().find(|&i| rgs[i] <= max_before[i]) else {
                    break;
                };
                rgs[i] += 1;
                for j in i + 1..n {
                    rgs[j] = 0;
                    max_before[j] = max_before[j - 1].max(rgs[j - 1]);
                }
            }
            assert_eq!(count, bell, "n = {n}");
        }
    }

    #[test]
    fn single_edge_optimum_is_one_cluster() {
        let g = WeightedGraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let p = brute_force_max(&g).unwrap();
        assert_eq!(p.assignment, vec![0, 0]);
        assert!(p.score.abs() < 1e-12);
    }

    #[test]
    fn two_triangles_optimum() {
        let g = WeightedGraph::from_edges(
            6,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
            ],
        )
        .unwrap();
        let p = brute_force_max(&g).unwrap();
        assert!((p.score - 0.5).abs() < 1e-12);
    }

    #[test]
    fn refuses_large_or_edgeless() {
        let g = WeightedGraph::from_edges(13, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(brute_force_max(&g), Err(Error::TooLarge { .. })));
        let g = WeightedGraph::from_edges(1, &[]).unwrap();
        assert!(matches!(brute_force_max(&g), Err(Error::UndefinedModularity)));
    }
}
