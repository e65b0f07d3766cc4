use std::fmt::Write;

use super::{fmt_num, EmitError};
use crate::taxonomy::Tree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFormat {
    Newick,
    Dot,
}

pub fn emit_tree(tree: &Tree, format: TreeFormat) -> Result<Vec<u8>, EmitError> {
    if tree.labels.is_empty() {
        return Err(EmitError::Empty("tree"));
    }
    tree.validate().map_err(|e| EmitError::InvalidTree(e.to_string()))?;
    let text = match format {
        TreeFormat::Newick => newick(tree),
        TreeFormat::Dot => dot(tree),
    };
    Ok(text.into_bytes())
}

/// Rooted at the midpoint of the longest edge (ties: smallest label pair), so
/// each side of that edge hangs off the root with half its weight.
fn newick(tree: &Tree) -> String {
    if tree.edges.is_empty() {
        return format!("{};\n", newick_label(&tree.labels[0]));
    }
    let adj = tree.adjacency();
    let key = |a: usize, b: usize| {
        let (x, y) = (&tree.labels[a], &tree.labels[b]);
        if x <= y { (x, y) } else { (y, x) }
    };
    let longest = tree
        .edges
        .iter()
        .max_by(|e, f| e.weight.total_cmp(&f.weight).then_with(|| key(f.a, f.b).cmp(&key(e.a, e.b))))
        .expect("non-empty");
    let (u, v) = if tree.labels[longest.a] <= tree.labels[longest.b] {
        (longest.a, longest.b)
    } else {
        (longest.b, longest.a)
    };
    let half = fmt_num(longest.weight / 2.0);
    let mut out = String::from("(");
    subtree(tree, &adj, u, v, &mut out);
    let _ = write!(out, ":{half},");
    subtree(tree, &adj, v, u, &mut out);
    let _ = writeln!(out, ":{half});");
    out
}

fn subtree(tree: &Tree, adj: &[Vec<(usize, f64)>], node: usize, from: usize, out: &mut String) {
    // iterative so deep path-shaped trees cannot overflow the stack
    enum Step {
        Enter(usize, usize, Option<f64>, bool),
        Close(usize, Option<f64>),
    }
    let mut stack = vec![Step::Enter(node, from, None, true)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Enter(n, parent, len, first) => {
                if !first {
                    out.push(',');
                }
                let children: Vec<(usize, f64)> = adj[n].iter().copied().filter(|&(c, _)| c != parent).collect();
                if children.is_empty() {
                    out.push_str(&newick_label(&tree.labels[n]));
                    if let Some(w) = len {
                        let _ = write!(out, ":{}", fmt_num(w));
                    }
                } else {
                    out.push('(');
                    stack.push(Step::Close(n, len));
                    for (i, &(c, w)) in children.iter().enumerate().rev() {
                        stack.push(Step::Enter(c, n, Some(w), i == 0));
                    }
                }
            }
            Step::Close(n, len) => {
                out.push(')');
                out.push_str(&newick_label(&tree.labels[n]));
                if let Some(w) = len {
                    let _ = write!(out, ":{}", fmt_num(w));
                }
            }
        }
    }
}

fn newick_label(s: &str) -> String {
    let plain = !s.is_empty() && !s.chars().any(|c| "()[]',;:".contains(c) || c.is_whitespace());
    if plain { s.to_string() } else { format!("'{}'", s.replace('\'', "''")) }
}

pub(crate) fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn dot(tree: &Tree) -> String {
    let mut out = String::from("graph tree {\n");
    for l in &tree.labels {
        let _ = writeln!(out, "  {};", dot_id(l));
    }
    for e in &tree.edges {
        let w = fmt_num(e.weight);
        let _ = writeln!(
            out,
            "  {} -- {} [weight={w}, label=\"{w}\"];",
            dot_id(&tree.labels[e.a]),
            dot_id(&tree.labels[e.b])
        );
    }
    out.push_str("}\n");
    out
}
