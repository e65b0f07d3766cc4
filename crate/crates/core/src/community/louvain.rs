use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CommunityError, EngagementGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityPartition {
    /// Account name to community id; ids are contiguous from 0, numbered in
    /// order of first appearance over the sorted accounts.
    pub assignment: BTreeMap<String, usize>,
    pub modularity: f64,
    /// Member count per community id.
    pub community_sizes: Vec<usize>,
}

impl CommunityPartition {
    pub fn community_count(&self) -> usize {
        self.community_sizes.len()
    }

    /// Members of each community, in id order.
    pub fn members(&self) -> Vec<Vec<&str>> {
        let mut out = vec![Vec::new(); self.community_sizes.len()];
        for (account, &c) in &self.assignment {
            out[c].push(account.as_str());
        }
        out
    }
}

/// Weighted undirected graph in the form the local-move loop wants.
#[derive(Debug, Clone)]
struct WorkGraph {
    /// Neighbors (excluding self) with summed weights, sorted by index.
    adj: Vec<Vec<(usize, f64)>>,
    /// Weight of internal edges collapsed onto each node.
    self_loop: Vec<f64>,
}

impl WorkGraph {
    fn degree(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_loop[i]
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn aggregate(&self, comm: &[usize], count: usize) -> WorkGraph {
        let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
        let mut self_loop = vec![0.0; count];
        for i in 0..self.len() {
            self_loop[comm[i]] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                if comm[i] == comm[j] {
                    // each internal edge is visited from both ends
                    if i < j {
                        self_loop[comm[i]] += w;
                    }
                } else {
                    *links[comm[i]].entry(comm[j]).or_insert(0.0) += w;
                }
            }
        }
        WorkGraph { adj: links.into_iter().map(|m| m.into_iter().collect()).collect(), self_loop }
    }
}

fn work_graph(graph: &EngagementGraph) -> WorkGraph {
    let n = graph.accounts.len();
    let mut links: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for e in &graph.edges {
        *links[e.a].entry(e.b).or_insert(0.0) += e.weight as f64;
        *links[e.b].entry(e.a).or_insert(0.0) += e.weight as f64;
    }
    WorkGraph {
        adj: links.into_iter().map(|m| m.into_iter().collect()).collect(),
        self_loop: vec![0.0; n],
    }
}

const MIN_GAIN: f64 = 1e-12;

/// Repeated local moves in index order, starting from `start`, until no node
/// changes community. Returns the assignment renumbered by first appearance,
/// and whether anything moved.
fn local_moves(g: &WorkGraph, start: Vec<usize>) -> (Vec<usize>, usize, bool) {
    let n = g.len();
    let degree: Vec<f64> = (0..n).map(|i| g.degree(i)).collect();
    let two_m: f64 = degree.iter().sum();
    let mut comm = start;
    let mut total = vec![0.0; n];
    let mut size = vec![0usize; n];
    for i in 0..n {
        total[comm[i]] += degree[i];
        size[comm[i]] += 1;
    }
    let mut any_move = false;

    loop {
        let mut moved = false;
        for i in 0..n {
            let current = comm[i];
            let mut to_comm: BTreeMap<usize, f64> = BTreeMap::new();
            for &(j, w) in &g.adj[i] {
                *to_comm.entry(comm[j]).or_insert(0.0) += w;
            }
            total[current] -= degree[i];
            size[current] -= 1;
            let gain = |c: usize, w: f64| w - total[c] * degree[i] / two_m;

            let mut best = current;
            let mut best_gain = gain(current, to_comm.get(&current).copied().unwrap_or(0.0));
            for (&c, &w) in &to_comm {
                let g_c = gain(c, w);
                if g_c > best_gain + MIN_GAIN {
                    best = c;
                    best_gain = g_c;
                }
            }
            // alone, the node gains exactly zero
            if best_gain < -MIN_GAIN && size[current] > 0 {
                if let Some(empty) = (0..n).find(|&c| size[c] == 0) {
                    best = empty;
                }
            }
            total[best] += degree[i];
            size[best] += 1;
            if best != current {
                comm[i] = best;
                moved = true;
                any_move = true;
            }
        }
        if !moved {
            break;
        }
    }

    let (renumbered, count) = renumber(&comm);
    (renumbered, count, any_move)
}

/// Graphs above this size skip fine-tuning, which is quadratic in the node count.
const FINE_TUNE_MAX_NODES: usize = 2000;

/// One Kernighan-Lin style sweep: every node moves exactly once, always
/// taking the best available move (possibly to a new community) even when
/// it lowers modularity, and the best partition seen along the way is kept.
/// Returns it and whether it beats `start`.
fn fine_tune(g: &WorkGraph, start: &[usize]) -> (Vec<usize>, bool) {
    let n = g.len();
    let degree: Vec<f64> = (0..n).map(|i| g.degree(i)).collect();
    let two_m: f64 = degree.iter().sum();
    let mut comm = start.to_vec();
    let mut total = vec![0.0; n];
    let mut size = vec![0usize; n];
    for i in 0..n {
        total[comm[i]] += degree[i];
        size[comm[i]] += 1;
    }
    let mut locked = vec![false; n];
    let mut best = comm.clone();
    let (mut running, mut best_gain) = (0.0, 0.0);

    for _ in 0..n {
        // (gain, node, target); first found wins ties
        let mut pick: Option<(f64, usize, usize)> = None;
        for i in (0..n).filter(|&i| !locked[i]) {
            let own = comm[i];
            let mut to_comm: BTreeMap<usize, f64> = BTreeMap::new();
            for &(j, w) in &g.adj[i] {
                *to_comm.entry(comm[j]).or_insert(0.0) += w;
            }
            let rest = total[own] - degree[i];
            let stay = to_comm.get(&own).copied().unwrap_or(0.0) - rest * degree[i] / two_m;
            let mut options: Vec<(usize, f64)> =
                to_comm.iter().filter(|&(&c, _)| c != own).map(|(&c, &w)| (c, w - total[c] * degree[i] / two_m)).collect();
            if size[own] > 1 {
                if let Some(empty) = (0..n).find(|&c| size[c] == 0) {
                    options.push((empty, 0.0));
                }
            }
            for (c, value) in options {
                let gain = value - stay;
                if pick.is_none_or(|(g, _, _)| gain > g + MIN_GAIN) {
                    pick = Some((gain, i, c));
                }
            }
        }
        let Some((gain, i, c)) = pick else { break };
        let own = comm[i];
        total[own] -= degree[i];
        size[own] -= 1;
        total[c] += degree[i];
        size[c] += 1;
        comm[i] = c;
        locked[i] = true;
        running += gain;
        if running > best_gain + MIN_GAIN {
            best_gain = running;
            best.clone_from(&comm);
        }
    }
    (best, best_gain > 0.0)
}

fn renumber(comm: &[usize]) -> (Vec<usize>, usize) {
    let mut map = BTreeMap::new();
    let mut out = Vec::with_capacity(comm.len());
    for &c in comm {
        let next = map.len();
        out.push(*map.entry(c).or_insert(next));
    }
    (out, map.len())
}

/// Greedy modularity maximization: local moves plus aggregation, repeated
/// until a level makes no move, then node-level refinement of that partition
/// (plain local moves, then a fine-tuning sweep on graphs of at most
/// [`FINE_TUNE_MAX_NODES`] accounts). The two alternate until refinement
/// finds nothing. Deterministic for a given graph.
pub fn detect_communities(graph: &EngagementGraph) -> Result<CommunityPartition, CommunityError> {
    if graph.is_empty() {
        return Err(CommunityError::EmptyGraph);
    }
    let base = work_graph(graph);
    let n = graph.accounts.len();
    let mut membership: Vec<usize> = (0..n).collect();
    loop {
        let (start, count) = renumber(&membership);
        let mut level = base.aggregate(&start, count);
        membership = start;
        loop {
            let (comm, count, moved) = local_moves(&level, (0..level.len()).collect());
            if !moved {
                break;
            }
            for m in &mut membership {
                *m = comm[*m];
            }
            level = level.aggregate(&comm, count);
        }
        let (refined, _, moved) = local_moves(&base, membership.clone());
        if moved {
            membership = refined;
            continue;
        }
        if n > FINE_TUNE_MAX_NODES {
            break;
        }
        let (tuned, improved) = fine_tune(&base, &membership);
        if !improved {
            break;
        }
        membership = tuned;
    }

    let (membership, count) = renumber(&membership);
    let mut community_sizes = vec![0; count];
    for &c in &membership {
        community_sizes[c] += 1;
    }
    let assignment = graph.accounts.iter().cloned().zip(membership.iter().copied()).collect();
    Ok(CommunityPartition {
        assignment,
        modularity: modularity(graph, &membership),
        community_sizes,
    })
}

/// Weighted modularity, resolution 1, of `membership` (indexed like `graph.accounts`).
pub fn modularity(graph: &EngagementGraph, membership: &[usize]) -> f64 {
    let m = graph.total_weight() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let count = membership.iter().copied().max().map_or(0, |c| c + 1);
    let mut internal = vec![0.0; count];
    let mut total = vec![0.0; count];
    for e in &graph.edges {
        let w = e.weight as f64;
        total[membership[e.a]] += w;
        total[membership[e.b]] += w;
        if membership[e.a] == membership[e.b] {
            internal[membership[e.a]] += w;
        }
    }
    internal.iter().zip(&total).map(|(l, d)| l / m - (d / (2.0 * m)).powi(2)).sum()
}
