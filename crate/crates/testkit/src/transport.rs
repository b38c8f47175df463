//! Exact optimal-transport cost on the line, solved as a min-cost flow.
//!
//! Supports are integer positions and masses are integer counts, so the
//! whole computation stays in integer arithmetic and the result is exact.

/// One side of a transport instance: `(position, mass)` pairs.
pub type Histogram = Vec<(i64, u64)>;

#[derive(Clone, Copy)]
struct Edge {
    to: usize,
    cap: i64,
    cost: i64,
    flow: i64,
}

/// Minimal successive-shortest-paths min-cost-flow solver.
struct Mcmf {
    graph: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl Mcmf {
    fn new(nodes: usize) -> Self {
        Mcmf {
            graph: vec![Vec::new(); nodes],
            edges: Vec::new(),
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i64) {
        self.graph[from].push(self.edges.len());
        self.edges.push(Edge { to, cap, cost, flow: 0 });
        self.graph[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: 0, cost: -cost, flow: 0 });
    }

    /// Sends `target` units from `s` to `t`, returning total cost.
    /// Panics if the requested flow is infeasible (never happens for a
    /// balanced transport instance).
    fn run(&mut self, s: usize, t: usize, target: i64) -> i128 {
        let n = self.graph.len();
        let mut remaining = target;
        let mut total: i128 = 0;
        while remaining > 0 {
            // Bellman-Ford: costs can be negative on residual arcs.
            let mut dist = vec![i64::MAX; n];
            let mut prev_edge = vec![usize::MAX; n];
            dist[s] = 0;
            for _ in 0..n {
                let mut changed = false;
                for u in 0..n {
                    if dist[u] == i64::MAX {
                        continue;
                    }
                    for &ei in &self.graph[u] {
                        let e = self.edges[ei];
                        if e.cap - e.flow > 0 && dist[u] + e.cost < dist[e.to] {
                            dist[e.to] = dist[u] + e.cost;
                            prev_edge[e.to] = ei;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            assert!(dist[t] != i64::MAX, "transport instance is infeasible");
            // Bottleneck along the shortest path.
            let mut push = remaining;
            let mut v = t;
            while v != s {
                let e = self.edges[prev_edge[v]];
                push = push.min(e.cap - e.flow);
                v = self.edges[prev_edge[v] ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let ei = prev_edge[v];
                self.edges[ei].flow += push;
                self.edges[ei ^ 1].flow -= push;
                v = self.edges[ei ^ 1].to;
            }
            total += push as i128 * dist[t] as i128;
            remaining -= push;
        }
        total
    }
}

/// Exact earth mover's distance between two histograms with equal total
/// mass, using |a - b| ground cost. Returns cost per unit of mass.
pub fn emd(a: &Histogram, b: &Histogram) -> f64 {
    let mass_a: u64 = a.iter().map(|&(_, m)| m).sum();
    let mass_b: u64 = b.iter().map(|&(_, m)| m).sum();
    assert_eq!(mass_a, mass_b, "histograms must carry equal mass");
    assert!(mass_a > 0, "histograms must be non-empty");

    let n = a.len() + b.len() + 2;
    let (s, t) = (n - 2, n - 1);
    let mut net = Mcmf::new(n);
    for (i, &(_, m)) in a.iter().enumerate() {
        net.add_edge(s, i, m as i64, 0);
    }
    for (j, &(_, m)) in b.iter().enumerate() {
        net.add_edge(a.len() + j, t, m as i64, 0);
    }
    for (i, &(pa, _)) in a.iter().enumerate() {
        for (j, &(pb, _)) in b.iter().enumerate() {
            net.add_edge(i, a.len() + j, i64::MAX / 4, (pa - pb).abs());
        }
    }
    let cost = net.run(s, t, mass_a as i64);
    cost as f64 / mass_a as f64
}
