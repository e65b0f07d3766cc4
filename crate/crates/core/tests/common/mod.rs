//! Fixtures and independent reference computations shared by the integration
//! tests. Nothing here calls into the library's numerical code.

#![allow(dead_code)]

use std::collections::BTreeMap;

use datacrunch::io::{EngagementEvent, EngagementEventSet, EngagementKind, RegionSet};

pub fn square(id: &str, x0: f64, y0: f64, side: f64, statistic: f64) -> String {
    let (x1, y1) = (x0 + side, y0 + side);
    format!(
        r#"{{"type":"Feature","properties":{{"id":"{id}","statistic":{statistic}}},"geometry":{{"type":"Polygon","coordinates":[[[{x0},{y0}],[{x1},{y0}],[{x1},{y1}],[{x0},{y1}],[{x0},{y0}]]]}}}}"#
    )
}

pub fn collection(features: &[String]) -> String {
    format!(r#"{{"type":"FeatureCollection","features":[{}]}}"#, features.join(","))
}

/// Two adjacent unit squares side by side.
pub fn two_squares(a: f64, b: f64) -> String {
    collection(&[square("a", 0.0, 0.0, 1.0, a), square("b", 1.0, 0.0, 1.0, b)])
}

/// A 2 x 2 block of unit squares with unequal statistics.
pub fn four_squares(stats: [f64; 4]) -> String {
    collection(&[
        square("sw", 0.0, 0.0, 1.0, stats[0]),
        square("se", 1.0, 0.0, 1.0, stats[1]),
        square("nw", 0.0, 1.0, 1.0, stats[2]),
        square("ne", 1.0, 1.0, 1.0, stats[3]),
    ])
}

/// An L-shaped region wrapped around a square, plus a detached island.
pub fn mixed_shapes() -> String {
    let l = r#"{"type":"Feature","properties":{"id":"ell","statistic":2},"geometry":{"type":"Polygon","coordinates":[[[0,0],[2,0],[2,1],[1,1],[1,2],[0,2],[0,0]]]}}"#;
    collection(&[l.to_string(), square("box", 1.0, 1.0, 1.0, 3.0), square("isle", 2.5, 0.25, 0.5, 1.0)])
}

pub fn regions(geojson: &str) -> RegionSet {
    datacrunch::io::parse_regions(geojson.as_bytes()).expect("fixture parses")
}

/// Shoelace area of every region, from the raw rings.
pub fn areas(set: &RegionSet) -> BTreeMap<String, f64> {
    set.regions()
        .iter()
        .map(|r| {
            let a: f64 = r
                .rings()
                .map(|ring| {
                    ring.windows(2).map(|w| w[0].x * w[1].y - w[1].x * w[0].y).sum::<f64>() / 2.0
                })
                .sum();
            (r.id.clone(), a)
        })
        .collect()
}

/// Reference 1-D diffusion cartogram of a two-level density on [0, 1]: the
/// left `split` fraction holds density `left`, the rest `right`. Backward
/// Euler finite differences on `n` cells with reflecting ends; the interface
/// tracer moves by RK4 through linearly interpolated face velocities, at most
/// a quarter cell per step. Returns the interface's final position.
pub fn reference_interface_1d(n: usize, split: f64, left: f64, right: f64, floor: f64) -> f64 {
    let h = 1.0 / n as f64;
    let mean = split * left + (1.0 - split) * right;
    let mut rho: Vec<f64> =
        (0..n).map(|i| if (i as f64 + 0.5) * h < split { left / mean } else { right / mean }).collect();

    let faces = |rho: &[f64]| -> Vec<f64> {
        let mut v = vec![0.0; n + 1];
        for i in 1..n {
            let grad = (rho[i] - rho[i - 1]) / h;
            let avg = (0.5 * (rho[i] + rho[i - 1])).max(floor);
            v[i] = -grad / avg;
        }
        v
    };
    let at = |v: &[f64], x: f64| -> f64 {
        let f = (x / h).clamp(0.0, n as f64);
        let i = (f.floor() as usize).min(n - 1);
        let t = f - i as f64;
        v[i] * (1.0 - t) + v[i + 1] * t
    };

    let mut x = split;
    let mut dt = 0.25 * h * h;
    loop {
        let v0 = faces(&rho);
        let speed = v0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if speed > 0.0 {
            dt = dt.min(0.25 * h / speed);
        }
        let mid = implicit_heat_step(&rho, 0.5 * dt, h);
        let next = implicit_heat_step(&mid, 0.5 * dt, h);
        let (vm, v1) = (faces(&mid), faces(&next));
        let k1 = at(&v0, x);
        let k2 = at(&vm, x + 0.5 * dt * k1);
        let k3 = at(&vm, x + 0.5 * dt * k2);
        let k4 = at(&v1, x + dt * k3);
        x = (x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).clamp(0.0, 1.0);
        rho = next;
        let residual = rho.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
        if residual < 1e-6 {
            return x;
        }
        dt *= 1.1;
    }
}

/// Solves `(I - dt * Laplacian) out = rho` with zero-flux ends (Thomas algorithm).
fn implicit_heat_step(rho: &[f64], dt: f64, h: f64) -> Vec<f64> {
    let n = rho.len();
    let r = dt / (h * h);
    let diag = |i: usize| if i == 0 || i == n - 1 { 1.0 + r } else { 1.0 + 2.0 * r };
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = -r / diag(0);
    d[0] = rho[0] / diag(0);
    for i in 1..n {
        let m = diag(i) + r * c[i - 1];
        c[i] = -r / m;
        d[i] = (rho[i] + r * d[i - 1]) / m;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}

/// Interface position implied by mass conservation alone: the point where the
/// final uniform density has accumulated the left part's mass.
pub fn mass_share(split: f64, left: f64, right: f64) -> f64 {
    split * left / (split * left + (1.0 - split) * right)
}

/// Every labelled tree on `n` nodes, decoded from Pruefer sequences.
pub fn all_spanning_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![vec![]];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut seq = Vec::with_capacity(len);
        let mut c = code;
        for _ in 0..len {
            seq.push(c % n);
            c /= n;
        }
        let mut degree = vec![1; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &s in &seq {
            let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
            edges.push((leaf, s));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
        edges.push((rest[0], rest[1]));
        out.push(edges);
    }
    out
}

/// Modularity from the dense adjacency matrix: `1/2m * sum_ij (A_ij - k_i k_j / 2m) [c_i = c_j]`.
pub fn dense_modularity(n: usize, edges: &[(usize, usize, f64)], membership: &[usize]) -> f64 {
    Dense::new(n, edges).modularity(membership)
}

struct Dense {
    a: Vec<Vec<f64>>,
    k: Vec<f64>,
    two_m: f64,
}

impl Dense {
    fn new(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut a = vec![vec![0.0; n]; n];
        for &(i, j, w) in edges {
            a[i][j] += w;
            a[j][i] += w;
        }
        let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
        let two_m = k.iter().sum();
        Dense { a, k, two_m }
    }

    fn modularity(&self, membership: &[usize]) -> f64 {
        if self.two_m == 0.0 {
            return 0.0;
        }
        let n = self.k.len();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if membership[i] == membership[j] {
                    q += self.a[i][j] - self.k[i] * self.k[j] / self.two_m;
                }
            }
        }
        q / self.two_m
    }
}

/// Best modularity over every set partition of `n` nodes (restricted growth strings).
pub fn exhaustive_modularity(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let dense = Dense::new(n, edges);
    let mut best = f64::NEG_INFINITY;
    let mut rgs = vec![0usize; n];
    let mut max_prefix = vec![0usize; n];
    loop {
        best = best.max(dense.modularity(&rgs));
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return best;
            }
            let limit = max_prefix[i - 1] + 1;
            if rgs[i] < limit {
                rgs[i] += 1;
                break;
            }
            rgs[i] = 0;
            i -= 1;
        }
        for j in i..n {
            if j > i {
                rgs[j] = 0;
            }
            max_prefix[j] = if j == 0 { rgs[0] } else { max_prefix[j - 1].max(rgs[j]) };
        }
    }
}

pub fn event(source: &str, target: &str, topic: &str, polarity: i8, timestamp: i64) -> EngagementEvent {
    EngagementEvent {
        source: source.to_string(),
        target: target.to_string(),
        kind: EngagementKind::Reply,
        topics: vec![topic.to_string()],
        polarity,
        timestamp,
    }
}

/// Events forming the given weighted edges on one topic, all positive.
pub fn events_from_edges(names: &[String], edges: &[(usize, usize, f64)], topic: &str) -> EngagementEventSet {
    let mut out = Vec::new();
    let mut ts = 0;
    for &(i, j, w) in edges {
        for _ in 0..w as usize {
            ts += 1;
            out.push(event(&names[i], &names[j], topic, 1, ts));
        }
    }
    EngagementEventSet::new(out).expect("valid events")
}

/// `clusters` positive triangles on `topic`, with account names prefixed by `tag`.
pub fn triangle_clusters(tag: &str, topic: &str, clusters: usize, ts: &mut i64) -> Vec<EngagementEvent> {
    let mut out = Vec::new();
    for c in 0..clusters {
        let names: Vec<String> = (0..3).map(|i| format!("{tag}{c}_{i}")).collect();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            *ts += 1;
            out.push(event(&names[i], &names[j], topic, 1, *ts));
        }
    }
    out
}

/// Planted dominant figure: three positive conversation clusters for `jokowi`,
/// one each for the rivals, plus negative chatter that the positive filter
/// must ignore.
pub fn planted_figure_events() -> EngagementEventSet {
    let mut ts = 0;
    let mut events = triangle_clusters("j", "jokowi", 3, &mut ts);
    events.extend(triangle_clusters("p", "prabowo", 1, &mut ts));
    events.extend(triangle_clusters("h", "hatta", 1, &mut ts));
    for k in 0..4 {
        ts += 1;
        events.push(event(&format!("x{k}"), &format!("y{k}"), "prabowo", -1, ts));
    }
    EngagementEventSet::new(events).expect("valid events")
}

/// Sentiment records for two poles of two actors each.
pub fn two_pole_records() -> String {
    let mut s = String::new();
    let stances = [
        ("ani", [1.0, -1.0, 0.5]),
        ("budi", [0.8, -0.6, 1.0]),
        ("citra", [-1.0, 1.0, -0.4]),
        ("dodi", [-0.7, 0.9, -1.0]),
    ];
    for (actor, row) in stances {
        for (topic, p) in ["fuel", "subsidy", "infrastructure"].iter().zip(row) {
            s.push_str(&format!("{{\"actor\":\"{actor}\",\"topic\":\"{topic}\",\"polarity\":{p}}}\n"));
        }
    }
    s
}

/// Engagement events as JSON lines, in the format the record parser reads.
pub fn events_jsonl(events: &EngagementEventSet) -> String {
    events
        .events()
        .iter()
        .map(|e| serde_json::to_string(e).expect("event serializes") + "\n")
        .collect()
}

/// Every file in `dir` by name, with the run report's timestamp removed.
pub fn read_outputs(dir: &std::path::Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).expect("output directory") {
        let path = entry.expect("dir entry").path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let mut bytes = std::fs::read(&path).expect("output file");
        if name == "run_report.json" {
            let mut v: serde_json::Value = serde_json::from_slice(&bytes).expect("report parses");
            v.as_object_mut().unwrap().remove("generated_at");
            bytes = serde_json::to_vec(&v).unwrap();
        }
        out.insert(name, bytes);
    }
    out
}

/// A small table of strictly positive prices: two co-moving pairs and a loner.
pub fn price_table() -> String {
    let mut s = String::from("alpha,beta,gamma,delta,omega\n");
    let (mut a, mut c, mut e) = (100.0f64, 50.0f64, 20.0f64);
    for t in 0..40 {
        let x = ((t * 7919) % 13) as f64 / 13.0 - 0.5;
        let y = ((t * 104729) % 11) as f64 / 11.0 - 0.5;
        let z = ((t * 1299709) % 17) as f64 / 17.0 - 0.5;
        a *= 1.0 + 0.02 * x;
        c *= 1.0 + 0.02 * y;
        e *= 1.0 + 0.02 * z;
        let wobble = 1.0 + 0.001 * (((t * 31) % 5) as f64 - 2.0);
        s.push_str(&format!("{a},{},{c},{},{e}\n", a * 1.5 * wobble, c * 0.7 / wobble));
    }
    s
}
