use std::f64::consts::PI;
use std::fmt::Write;

use super::{EmitError, RegionSet};
use crate::geometry::{BBox, Point};
use crate::sentiment::SignedGraph;
use crate::taxonomy::Tree;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;
const FILLS: [&str; 8] = ["#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5"];

pub const POSITIVE_STROKE: &str = "#1f4eb4";
pub const NEGATIVE_STROKE: &str = "#d62728";
pub const NEUTRAL_STROKE: &str = "#000000";

/// Anything that renders to a standalone SVG document.
pub trait SvgDrawable {
    /// Writes the document body (everything inside `<svg>`) and returns its size.
    fn draw(&self, out: &mut String) -> Result<(f64, f64), EmitError>;
}

pub fn emit_svg(item: &(impl SvgDrawable + ?Sized)) -> Result<Vec<u8>, EmitError> {
    let mut body = String::new();
    let (w, h) = item.draw(&mut body)?;
    let mut doc = String::new();
    doc.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        doc,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    doc.push_str(&body);
    doc.push_str("</svg>\n");
    Ok(doc.into_bytes())
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

impl SvgDrawable for RegionSet {
    fn draw(&self, out: &mut String) -> Result<(f64, f64), EmitError> {
        if self.is_empty() {
            return Err(EmitError::Empty("region set"));
        }
        let b: BBox = self.bbox();
        let scale = (CANVAS - 2.0 * MARGIN) / b.width().max(b.height());
        let (w, h) = (b.width() * scale + 2.0 * MARGIN, b.height() * scale + 2.0 * MARGIN);
        // map y grows up, SVG y grows down
        let px = |p: Point| (MARGIN + (p.x - b.xmin) * scale, MARGIN + (b.ymax - p.y) * scale);
        for (i, r) in self.regions().iter().enumerate() {
            let mut d = String::new();
            for ring in r.rings() {
                for (k, p) in ring[..ring.len() - 1].iter().enumerate() {
                    let (x, y) = px(*p);
                    let _ = write!(d, "{}{},{} ", if k == 0 { "M" } else { "L" }, num(x), num(y));
                }
                d.push_str("Z ");
            }
            let _ = writeln!(
                out,
                "<path id=\"{}\" d=\"{}\" fill=\"{}\" fill-rule=\"evenodd\" stroke=\"#333333\" stroke-width=\"0.5\"/>",
                escape(&r.id),
                d.trim_end(),
                FILLS[i % FILLS.len()]
            );
        }
        Ok((num(w).parse().unwrap_or(w), num(h).parse().unwrap_or(h)))
    }
}

impl SvgDrawable for Tree {
    /// Phylogram: root at the first node, x = path length from the root,
    /// leaves stacked in depth-first order.
    fn draw(&self, out: &mut String) -> Result<(f64, f64), EmitError> {
        if self.labels.is_empty() {
            return Err(EmitError::Empty("tree"));
        }
        self.validate().map_err(|e| EmitError::InvalidTree(e.to_string()))?;
        let n = self.labels.len();
        let adj = self.adjacency();
        let mut depth = vec![0.0; n];
        let mut row = vec![0.0; n];
        let mut parent = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![0];
        let mut seen = vec![false; n];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            order.push(u);
            for &(v, w) in adj[u].iter().rev() {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    depth[v] = depth[u] + w;
                    stack.push(v);
                }
            }
        }
        let mut next_leaf = 0.0;
        for &u in &order {
            if u != 0 && adj[u].len() == 1 || n == 1 {
                row[u] = next_leaf;
                next_leaf += 1.0;
            }
        }
        for &u in order.iter().rev() {
            let children: Vec<usize> = adj[u].iter().map(|&(v, _)| v).filter(|&v| parent[v] == u).collect();
            if !children.is_empty() {
                row[u] = children.iter().map(|&c| row[c]).sum::<f64>() / children.len() as f64;
            }
        }

        let max_depth = depth.iter().copied().fold(0.0, f64::max);
        let xscale = if max_depth > 0.0 { (CANVAS - 2.0 * MARGIN - 120.0) / max_depth } else { 0.0 };
        let gap = 24.0;
        let (w, h) = (CANVAS, 2.0 * MARGIN + gap * (next_leaf - 1.0).max(0.0));
        let pos = |u: usize| (MARGIN + depth[u] * xscale, MARGIN + row[u] * gap);
        for (u, &up) in parent.iter().enumerate() {
            if up == usize::MAX {
                continue;
            }
            let (x0, y0) = pos(up);
            let (x1, y1) = pos(u);
            let _ = writeln!(
                out,
                "<path d=\"M{},{} V{} H{}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>",
                num(x0),
                num(y0),
                num(y1),
                num(x1)
            );
        }
        for u in 0..n {
            let (x, y) = pos(u);
            let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#333333\"/>", num(x), num(y));
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
                num(x + 5.0),
                num(y + 4.0),
                escape(&self.labels[u])
            );
        }
        Ok((w, h))
    }
}

impl SvgDrawable for SignedGraph {
    /// Actors evenly spaced on a circle; edge color is the sign and width the
    /// magnitude of the weight.
    fn draw(&self, out: &mut String) -> Result<(f64, f64), EmitError> {
        if self.actors.is_empty() {
            return Err(EmitError::Empty("signed graph"));
        }
        let n = self.actors.len();
        let c = CANVAS / 2.0;
        let radius = c - MARGIN - 60.0;
        let pos = |i: usize| {
            let a = 2.0 * PI * i as f64 / n as f64 - PI / 2.0;
            (c + radius * a.cos(), c + radius * a.sin())
        };
        for e in &self.edges {
            let stroke = match e.sign {
                1 => POSITIVE_STROKE,
                -1 => NEGATIVE_STROKE,
                _ => NEUTRAL_STROKE,
            };
            let (x0, y0) = pos(e.a);
            let (x1, y1) = pos(e.b);
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"{}\"/>",
                num(x0),
                num(y0),
                num(x1),
                num(y1),
                num(0.5 + 2.5 * e.weight.abs())
            );
        }
        for (i, actor) in self.actors.iter().enumerate() {
            let (x, y) = pos(i);
            let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"6\" fill=\"#555555\"/>", num(x), num(y));
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
                num(x),
                num(y - 10.0),
                escape(actor)
            );
        }
        Ok((CANVAS, CANVAS))
    }
}
