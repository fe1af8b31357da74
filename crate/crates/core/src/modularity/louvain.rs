//! Seeded multi-level greedy optimizer (local moving + aggregation).
//!
//! Both objectives run on the same [`LevelGraph`]: every (super)node carries
//! a pair of masses and a self weight, so the null model stays exact at
//! every aggregation level. For Newman modularity the first mass is the node
//! strength; for Barber modularity the masses are the document-side and
//! concept-side degree sums `(K, D)`, one of them zero for original nodes.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{GraphRef, Partition};
use crate::error::{Error, Result};

/// Gains at or below this (in modularity units) count as zero.
const GAIN_EPS: f64 = 1e-12;
/// Score margin a later seed must beat to replace the incumbent.
const SCORE_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Objective {
    /// `m` = total edge weight.
    Newman { m: f64 },
    /// `m` = edge count.
    Barber { m: f64 },
}

#[derive(Clone, Debug)]
pub(crate) struct LevelGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    /// Newman: ordered-pair weight inside the supernode. Barber: edge count inside.
    self_weight: Vec<f64>,
    mass: Vec<[f64; 2]>,
    objective: Objective,
}

impl LevelGraph {
    pub(crate) fn from_graph(graph: GraphRef<'_>) -> Self {
        match graph {
            GraphRef::Weighted(g) => {
                let n = g.n_nodes();
                let mass = (0..n).map(|i| [g.strength(i), 0.0]).collect();
                LevelGraph {
                    offsets: g.offsets.clone(),
                    targets: g.targets.clone(),
                    weights: g.weights.clone(),
                    self_weight: vec![0.0; n],
                    mass,
                    objective: Objective::Newman { m: g.total_weight },
                }
            }
            GraphRef::Bipartite(g) => {
                let n_docs = g.n_docs();
                let n = g.n_nodes();
                let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n];
                for &(d, c) in &g.edges {
                    rows[d as usize].push(n_docs as u32 + c);
                    rows[n_docs + c as usize].push(d);
                }
                let mut offsets = Vec::with_capacity(n + 1);
                offsets.push(0);
                let mut targets = Vec::with_capacity(2 * g.m());
                for mut row in rows {
                    row.sort_unstable();
                    targets.extend(row);
                    offsets.push(targets.len());
                }
                let mass = g
                    .doc_degree
                    .iter()
                    .map(|&k| [k as f64, 0.0])
                    .chain(g.concept_degree.iter().map(|&d| [0.0, d as f64]))
                    .collect();
                LevelGraph {
                    weights: vec![1.0; targets.len()],
                    offsets,
                    targets,
                    self_weight: vec![0.0; n],
                    mass,
                    objective: Objective::Barber { m: g.m() as f64 },
                }
            }
        }
    }

    fn n(&self) -> usize {
        self.self_weight.len()
    }

    fn m(&self) -> f64 {
        match self.objective {
            Objective::Newman { m } | Objective::Barber { m } => m,
        }
    }

    /// Change in modularity from inserting node `i` (currently alone) into a
    /// community with mass totals `tot` and connecting weight `w_ic`.
    #[inline]
    fn gain(&self, i: usize, w_ic: f64, tot: [f64; 2]) -> f64 {
        let mi = self.mass[i];
        match self.objective {
            Objective::Newman { m } => (w_ic - mi[0] * tot[0] / (2.0 * m)) / m,
            Objective::Barber { m } => (w_ic - (mi[0] * tot[1] + mi[1] * tot[0]) / m) / m,
        }
    }

    /// Inner adjacency sum contributes fully to Newman's ordered-pair
    /// self weight, half to Barber's edge count.
    fn inner_factor(&self) -> f64 {
        match self.objective {
            Objective::Newman { .. } => 1.0,
            Objective::Barber { .. } => 0.5,
        }
    }

    /// Modularity of a dense assignment on this level.
    #[cfg(test)]
    pub(crate) fn modularity(&self, assignment: &[u32]) -> f64 {
        let k = assignment.iter().max().map_or(0, |&c| c as usize + 1);
        let mut inner = vec![0.0; k];
        let mut selfw = vec![0.0; k];
        let mut tot = vec![[0.0; 2]; k];
        for i in 0..self.n() {
            let c = assignment[i] as usize;
            selfw[c] += self.self_weight[i];
            tot[c][0] += self.mass[i][0];
            tot[c][1] += self.mass[i][1];
            for e in self.offsets[i]..self.offsets[i + 1] {
                if assignment[self.targets[e] as usize] as usize == c {
                    inner[c] += self.weights[e];
                }
            }
        }
        let f = self.inner_factor();
        (0..k)
            .map(|c| {
                let internal = selfw[c] + f * inner[c];
                match self.objective {
                    Objective::Newman { m } => internal / (2.0 * m) - (tot[c][0] / (2.0 * m)).powi(2),
                    Objective::Barber { m } => (internal - tot[c][0] * tot[c][1] / m) / m,
                }
            })
            .sum()
    }

    /// Greedy single-node moves until a full sweep changes nothing.
    /// Returns whether any node moved.
    fn local_moving(&self, community: &mut [u32], rng: &mut ChaCha8Rng) -> bool {
        let n = self.n();
        let mut tot: Vec<[f64; 2]> = vec![[0.0; 2]; n];
        for (&c, mass) in community.iter().zip(&self.mass) {
            tot[c as usize][0] += mass[0];
            tot[c as usize][1] += mass[1];
        }
        let mut size = vec![0u32; n];
        for &c in community.iter() {
            size[c as usize] += 1;
        }
        let mut order: Vec<usize> = (0..n).collect();
        let mut link = vec![0.0f64; n];
        let mut seen = vec![false; n];
        let mut candidates: Vec<u32> = Vec::new();
        let mut any_move = false;

        loop {
            order.shuffle(rng);
            let mut moved = false;
            for &i in &order {
                let (start, end) = (self.offsets[i], self.offsets[i + 1]);
                if start == end {
                    continue;
                }
                let own = community[i];
                for e in start..end {
                    let c = community[self.targets[e] as usize];
                    if !seen[c as usize] {
                        seen[c as usize] = true;
                        candidates.push(c);
                    }
                    link[c as usize] += self.weights[e];
                }

                let mi = self.mass[i];
                let t = &mut tot[own as usize];
                t[0] -= mi[0];
                t[1] -= mi[1];
                let own_gain = self.gain(i, link[own as usize], tot[own as usize]);

                candidates.sort_unstable();
                let mut gains: Vec<(u32, f64)> = candidates
                    .iter()
                    .filter(|&&c| c != own)
                    .map(|&c| (c, self.gain(i, link[c as usize], tot[c as usize])))
                    .collect();
                if own_gain < -GAIN_EPS && size[own as usize] > 1 {
                    // leaving for an empty community gains exactly 0
                    if let Some(empty) = size.iter().position(|&s| s == 0) {
                        let at = gains.partition_point(|&(c, _)| (c as usize) < empty);
                        gains.insert(at, (empty as u32, 0.0));
                    }
                }
                let best = gains.iter().map(|&(_, g)| g).fold(f64::NEG_INFINITY, f64::max);
                let mut target = own;
                if best - own_gain > GAIN_EPS {
                    // smallest cluster id among the (near-)maximal gains
                    if let Some(&(c, g)) = gains.iter().find(|&&(_, g)| g >= best - GAIN_EPS) {
                        if g - own_gain > GAIN_EPS {
                            target = c;
                        }
                    }
                }

                let t = &mut tot[target as usize];
                t[0] += mi[0];
                t[1] += mi[1];
                if target != own {
                    size[own as usize] -= 1;
                    size[target as usize] += 1;
                    community[i] = target;
                    moved = true;
                }
                for c in candidates.drain(..) {
                    link[c as usize] = 0.0;
                    seen[c as usize] = false;
                }
            }
            if !moved {
                break;
            }
            any_move = true;
        }
        any_move
    }

    /// Collapses each community of a dense assignment into one supernode.
    pub(crate) fn aggregate(&self, assignment: &[u32], k: usize) -> LevelGraph {
        let mut self_weight = vec![0.0; k];
        let mut inner = vec![0.0; k];
        let mut mass = vec![[0.0; 2]; k];
        let mut links: Vec<(u32, u32, f64)> = Vec::new();
        for i in 0..self.n() {
            let ci = assignment[i];
            self_weight[ci as usize] += self.self_weight[i];
            mass[ci as usize][0] += self.mass[i][0];
            mass[ci as usize][1] += self.mass[i][1];
            for e in self.offsets[i]..self.offsets[i + 1] {
                let cj = assignment[self.targets[e] as usize];
                if ci == cj {
                    inner[ci as usize] += self.weights[e];
                } else {
                    links.push((ci, cj, self.weights[e]));
                }
            }
        }
        let f = self.inner_factor();
        for c in 0..k {
            self_weight[c] += f * inner[c];
        }
        // stable sort keeps the accumulation order deterministic
        links.sort_by_key(|&(a, b, _)| (a, b));
        let mut offsets = vec![0usize; k + 1];
        let mut targets = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        let mut row = 0usize;
        for (a, b, w) in links {
            while row < a as usize {
                row += 1;
                offsets[row] = targets.len();
            }
            if targets.len() > offsets[row] && *targets.last().unwrap() == b {
                *weights.last_mut().unwrap() += w;
            } else {
                targets.push(b);
                weights.push(w);
            }
        }
        while row < k {
            row += 1;
            offsets[row] = targets.len();
        }
        LevelGraph {
            offsets,
            targets,
            weights,
            self_weight,
            mass,
            objective: self.objective,
        }
    }
}

/// Relabels in place by first occurrence; returns the cluster count.
fn renumber(community: &mut [u32]) -> usize {
    let size = community.iter().max().map_or(0, |&c| c as usize + 1);
    let mut map = vec![u32::MAX; size];
    let mut next = 0u32;
    for c in community.iter_mut() {
        let slot = &mut map[*c as usize];
        if *slot == u32::MAX {
            *slot = next;
            next += 1;
        }
        *c = *slot;
    }
    next as usize
}

/// One optimizer run. Deterministic in `(graph, seed)`.
///
/// Node visit order is reshuffled every sweep from a ChaCha stream seeded by
/// `seed`. After the levels converge, a final pass of single-node moves on
/// the original graph runs (and re-enters the levels if it changed
/// anything), so the result is a local maximum under single-node moves.
/// Nodes without edges never move and end as singletons. For a graph without
/// edges the reported score is 0.
pub fn louvain<'a>(graph: impl Into<GraphRef<'a>>, seed: u64) -> Partition {
    let graph = graph.into();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = LevelGraph::from_graph(graph);
    let n = base.n();
    let mut membership: Vec<u32> = (0..n as u32).collect();

    if base.m() > 0.0 {
        loop {
            let k = renumber(&mut membership);
            let mut level = if k == n {
                base.clone()
            } else {
                base.aggregate(&membership, k)
            };
            loop {
                let mut community: Vec<u32> = (0..level.n() as u32).collect();
                if !level.local_moving(&mut community, &mut rng) {
                    break;
                }
                let k = renumber(&mut community);
                for c in membership.iter_mut() {
                    *c = community[*c as usize];
                }
                if k == level.n() {
                    break;
                }
                level = level.aggregate(&community, k);
            }
            // aggregation can leave single original nodes misplaced
            if !base.local_moving(&mut membership, &mut rng) {
                break;
            }
        }
    }

    let score = graph.modularity(&membership).unwrap_or(0.0);
    Partition::new(membership, graph.node_labels(), score, graph.kind(), seed)
}

/// Best of `n_runs` seeded runs (seeds `base_seed..base_seed + n_runs`).
///
/// Runs execute on the rayon pool; the reduction picks the highest score and
/// breaks ties toward the smallest seed, so the result does not depend on
/// scheduling.
pub fn best_of_runs<'a>(graph: impl Into<GraphRef<'a>>, n_runs: usize, base_seed: u64) -> Result<Partition> {
    if n_runs == 0 {
        return Err(Error::InvalidParameter("n_runs must be at least 1".into()));
    }
    let graph = graph.into();
    let runs: Vec<Partition> = (0..n_runs as u64)
        .into_par_iter()
        .map(|r| louvain(graph, base_seed.wrapping_add(r)))
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, next| {
            if next.score > best.score + SCORE_EPS {
                next
            } else {
                best
            }
        })
        .expect("n_runs >= 1");
    log::debug!(
        "best of {n_runs} {} runs: seed {} Q = {}",
        graph.kind(),
        best.seed,
        best.score
    );
    Ok(best)
}
