//! Planar polygon helpers shared by the parsers, the rasterizer and the emitters.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// Axis-aligned bounding box, `min` inclusive and `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl BBox {
    pub fn empty() -> Self {
        BBox {
            xmin: f64::INFINITY,
            ymin: f64::INFINITY,
            xmax: f64::NEG_INFINITY,
            ymax: f64::NEG_INFINITY,
        }
    }

    pub fn include(&mut self, p: Point) {
        self.xmin = self.xmin.min(p.x);
        self.ymin = self.ymin.min(p.y);
        self.xmax = self.xmax.max(p.x);
        self.ymax = self.ymax.max(p.y);
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0) || !self.area().is_finite()
    }
}

/// Shoelace area of a closed ring (last vertex equal to the first).
/// Positive for counterclockwise rings.
pub fn signed_area(ring: &[Point]) -> f64 {
    ring.windows(2)
        .map(|w| w[0].x * w[1].y - w[1].x * w[0].y)
        .sum::<f64>()
        * 0.5
}

pub fn is_closed(ring: &[Point]) -> bool {
    ring.len() >= 4 && ring.first() == ring.last()
}

/// Inserts evenly spaced vertices so no segment is longer than `max_len`.
pub fn densify(ring: &[Point], max_len: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(ring.len());
    for w in ring.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
        let pieces = (len / max_len).ceil().max(1.0) as usize;
        for s in 0..pieces {
            let f = s as f64 / pieces as f64;
            out.push(Point::new(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)));
        }
    }
    if let Some(&last) = ring.last() {
        out.push(last);
    }
    out
}

/// Crossings of a ring's edges with the horizontal line `y`, half-open in y so a
/// vertex on the line is counted once. Shared edges between adjacent polygons
/// therefore assign each boundary sample to exactly one side.
pub fn scanline_crossings(ring: &[Point], y: f64, out: &mut Vec<f64>) {
    for w in ring.windows(2) {
        // endpoints ordered so a shared edge yields the same crossing from both sides
        let (a, b) = if w[0].y <= w[1].y { (w[0], w[1]) } else { (w[1], w[0]) };
        if (a.y > y) != (b.y > y) {
            out.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
    }
}

/// Even-odd point-in-polygon over any number of rings.
pub fn contains_point<'a>(rings: impl IntoIterator<Item = &'a [Point]>, p: Point) -> bool {
    let mut xs = Vec::new();
    for ring in rings {
        scanline_crossings(ring, p.y, &mut xs);
    }
    xs.iter().filter(|&&x| x > p.x).count() % 2 == 1
}

/// Signed area of the quadrilateral a-b-c-d taken in order.
pub fn quad_area(a: Point, b: Point, c: Point, d: Point) -> f64 {
    0.5 * ((c.x - a.x) * (d.y - b.y) - (d.x - b.x) * (c.y - a.y))
}
