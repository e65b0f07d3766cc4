use super::{DistanceMatrix, LabelledMatrix, Tree};

/// Largest edge weight on the unique tree path between each pair of nodes.
pub fn subdominant_ultrametric(tree: &Tree) -> DistanceMatrix {
    let n = tree.labels.len();
    let adj = tree.adjacency();
    let mut values = vec![0.0; n * n];
    let mut stack = Vec::new();
    for source in 0..n {
        let row = &mut values[source * n..(source + 1) * n];
        let mut seen = vec![false; n];
        seen[source] = true;
        stack.push((source, 0.0f64));
        while let Some((node, max_so_far)) = stack.pop() {
            row[node] = max_so_far;
            for &(next, w) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    stack.push((next, max_so_far.max(w)));
                }
            }
        }
    }
    DistanceMatrix(LabelledMatrix::from_fn(tree.labels.clone(), |i, j| values[i * n + j]))
}
