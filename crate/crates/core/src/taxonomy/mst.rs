use super::{DistanceMatrix, Tree, TreeEdge};

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already in the same set.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Kruskal over all pairs. Equal weights are ordered by the (smaller label,
/// larger label) pair so the tree is unique for any input.
pub fn minimum_spanning_tree(d: &DistanceMatrix) -> Tree {
    let n = d.n();
    let labels = &d.labels;
    let mut candidates = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = if labels[i] <= labels[j] { (i, j) } else { (j, i) };
            candidates.push(TreeEdge { a, b, weight: d.get(i, j) });
        }
    }
    candidates.sort_by(|x, y| {
        x.weight
            .total_cmp(&y.weight)
            .then_with(|| labels[x.a].cmp(&labels[y.a]))
            .then_with(|| labels[x.b].cmp(&labels[y.b]))
    });

    let mut uf = UnionFind::new(n);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for e in candidates {
        if edges.len() + 1 == n {
            break;
        }
        if uf.union(e.a, e.b) {
            edges.push(e);
        }
    }
    Tree { labels: labels.clone(), edges }
}

/// Orders tree edges the way Kruskal emits them; handy for comparing trees.
#[cfg(test)]
pub(crate) fn edge_key(labels: &[String], e: &TreeEdge) -> (String, String) {
    let (a, b) = (&labels[e.a], &labels[e.b]);
    if a > b { (b.clone(), a.clone()) } else { (a.clone(), b.clone()) }
}
