//! Simple connected graphs and their geodesic metric.
//!
//! [`Graph::distance_bfs`] is the reference metric for every graph. For
//! wheels there is also the closed form [`wheel_distance`], which the tests
//! compare against BFS on every vertex pair.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::ptrans::Ambient;

/// Reduces any integer to its representative in `{1, ..., n}` modulo `n`.
pub fn rim_mod(n: usize, x: i64) -> usize {
    let n = n as i64;
    ((x - 1).rem_euclid(n) + 1) as usize
}

/// Finite simple connected undirected graph on the vertices `lo..lo+count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    name: String,
    lo: usize,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting loops, repeated edges and
    /// disconnected inputs.
    pub fn new(name: impl Into<String>, lo: usize, count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidGraph("a graph needs at least one vertex".into()));
        }
        let mut adj = vec![Vec::new(); count];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at {u}")));
            }
            for w in [u, v] {
                if w < lo || w >= lo + count {
                    return Err(Error::InvalidVertex(w));
                }
            }
            if adj[u - lo].contains(&v) {
                return Err(Error::InvalidGraph(format!("repeated edge {{{u}, {v}}}")));
            }
            adj[u - lo].push(v);
            adj[v - lo].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Graph {
            name: name.into(),
            lo,
            adj,
        };
        if g.bfs(lo).iter().any(|d| d.is_none()) {
            return Err(Error::InvalidGraph(format!("{} is not connected", g.name)));
        }
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        self.lo..self.lo + self.adj.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices().contains(&v)
    }

    /// The vertex set as an ambient for partial injections.
    pub fn ambient(&self) -> Result<Ambient> {
        Ambient::new(self.lo, self.lo + self.adj.len() - 1)
    }

    pub fn neighbors(&self, v: usize) -> Result<&[usize]> {
        if !self.contains(v) {
            return Err(Error::InvalidVertex(v));
        }
        Ok(&self.adj[v - self.lo])
    }

    fn bfs(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adj.len()];
        dist[src - self.lo] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u - self.lo].unwrap();
            for &w in &self.adj[u - self.lo] {
                if dist[w - self.lo].is_none() {
                    dist[w - self.lo] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Length of a shortest path between `u` and `v`.
    pub fn distance_bfs(&self, u: usize, v: usize) -> Result<usize> {
        for w in [u, v] {
            if !self.contains(w) {
                return Err(Error::InvalidVertex(w));
            }
        }
        Ok(self.bfs(u)[v - self.lo].expect("graph is connected"))
    }

    /// All-pairs distances, one BFS per vertex.
    pub fn distances(&self) -> DistanceMatrix {
        let count = self.adj.len();
        let mut d = Vec::with_capacity(count * count);
        for u in self.vertices() {
            d.extend(self.bfs(u).into_iter().map(|x| x.expect("graph is connected") as u8));
        }
        DistanceMatrix { lo: self.lo, count, d }
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Precomputed geodesic distances of a graph.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    lo: usize,
    count: usize,
    d: Vec<u8>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> usize {
        self.d[(u - self.lo) * self.count + (v - self.lo)] as usize
    }
}

/// `W_n`: hub `0` joined to every vertex of the rim cycle `1 - 2 - ... - n - 1`.
pub fn wheel(n: usize) -> Result<Graph> {
    if n < 4 {
        return Err(Error::TooSmall { family: "wheel", min: 4, n });
    }
    let mut edges: Vec<_> = (1..=n).map(|i| (0, i)).collect();
    edges.extend((1..=n).map(|i| (i, rim_mod(n, i as i64 + 1))));
    Graph::new(format!("W_{n}"), 0, n + 1, &edges)
}

/// `C_n` on `{1..n}`.
pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::TooSmall { family: "cycle", min: 3, n });
    }
    let edges: Vec<_> = (1..=n).map(|i| (i, rim_mod(n, i as i64 + 1))).collect();
    Graph::new(format!("C_{n}"), 1, n, &edges)
}

/// `P_n` on `{1..n}`.
pub fn path(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::TooSmall { family: "path", min: 1, n });
    }
    let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
    Graph::new(format!("P_{n}"), 1, n, &edges)
}

/// `S_n` on `{0..n-1}` with centre `0`.
pub fn star(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::TooSmall { family: "star", min: 1, n });
    }
    let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
    Graph::new(format!("S_{n}"), 0, n, &edges)
}

/// `K_n` on `{1..n}`.
pub fn complete(n: usize) -> Result<Graph> {
    if n < 1 {
        return Err(Error::TooSmall { family: "complete", min: 1, n });
    }
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            edges.push((i, j));
        }
    }
    Graph::new(format!("K_{n}"), 1, n, &edges)
}

/// Named graph families accepted on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFamily {
    Wheel,
    Cycle,
    Path,
    Star,
    Complete,
}

impl GraphFamily {
    pub fn build(self, n: usize) -> Result<Graph> {
        match self {
            GraphFamily::Wheel => wheel(n),
            GraphFamily::Cycle => cycle(n),
            GraphFamily::Path => path(n),
            GraphFamily::Star => star(n),
            GraphFamily::Complete => complete(n),
        }
    }
}

impl std::str::FromStr for GraphFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "wheel" => GraphFamily::Wheel,
            "cycle" => GraphFamily::Cycle,
            "path" => GraphFamily::Path,
            "star" => GraphFamily::Star,
            "complete" => GraphFamily::Complete,
            other => return Err(Error::Usage(format!("unknown graph family {other:?}"))),
        })
    }
}

/// Distance in `W_n` from the closed form:
/// hub to rim is 1, rim neighbours (including `1` and `n`) are at 1,
/// every other pair of distinct rim vertices is at 2.
pub fn wheel_distance(n: usize, u: usize, v: usize) -> Result<usize> {
    if n < 4 {
        return Err(Error::TooSmall { family: "wheel", min: 4, n });
    }
    for w in [u, v] {
        if w > n {
            return Err(Error::InvalidVertex(w));
        }
    }
    let (i, j) = (u.min(v), u.max(v));
    Ok(if i == j {
        0
    } else if i == 0 || j == i + 1 || (i == 1 && j == n) {
        1
    } else {
        2
    })
}
