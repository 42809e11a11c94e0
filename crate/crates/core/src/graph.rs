//! Pattern graphs: construction, parsing, girth, automorphisms and copy
//! enumeration inside complete graphs.

use std::collections::VecDeque;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{cap_exceeded, Error, Result};

/// Default vertex cap for exhaustive automorphism search.
pub const DEFAULT_AUTOMORPHISM_CAP: usize = 10;

/// A simple undirected graph on `0..n_vertices`.
///
/// Edges keep their input order; each pair is stored as `(min, max)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<Option<usize>>>,
}

/// Images of the pattern vertices, one per pattern vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexMap {
    pub image: Vec<usize>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adjacency = vec![vec![None; n_vertices]; n_vertices];
        let mut stored = Vec::new();
        for (u, v) in edges {
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {n_vertices} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            if adjacency[u][v].is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            adjacency[u][v] = Some(stored.len());
            adjacency[v][u] = Some(stored.len());
            stored.push((u.min(v), u.max(v)));
        }
        Ok(Graph {
            n_vertices,
            edges: stored,
            adjacency,
        })
    }

    /// Cycle on `s` vertices.
    pub fn cycle(s: usize) -> Result<Self> {
        if s < 3 {
            return Err(Error::InvalidGraph(format!("C{s}: a cycle needs at least 3 vertices")));
        }
        Graph::new(s, (0..s).map(|i| (i, (i + 1) % s)))
    }

    pub fn complete(s: usize) -> Self {
        let edges = (0..s).flat_map(|v| (0..v).map(move |u| (u, v)));
        Graph::new(s, edges).expect("complete graph is simple")
    }

    /// Path with `s` edges (and `s + 1` vertices).
    pub fn path(s: usize) -> Self {
        Graph::new(s + 1, (0..s).map(|i| (i, i + 1))).expect("path is simple")
    }

    /// Adds a new vertex joined to `anchor`.
    pub fn with_pendant(&self, anchor: usize) -> Result<Self> {
        let n = self.n_vertices + 1;
        let edges = self.edges.iter().copied().chain(std::iter::once((anchor, n - 1)));
        Graph::new(n, edges)
    }

    /// Parses `C<s>`, `K<s>` or `P<s>`.
    pub fn named(name: &str) -> Option<Result<Self>> {
        let name = name.trim();
        let mut chars = name.chars();
        let kind = chars.next()?;
        let s: usize = chars.as_str().parse().ok()?;
        match kind {
            'C' => Some(Graph::cycle(s)),
            'K' => Some(Ok(Graph::complete(s))),
            'P' => Some(Ok(Graph::path(s))),
            _ => None,
        }
    }

    /// Parses the text format: `n m` then `m` lines `u v`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace().map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("graph: expected a non-negative integer, got {t:?}")))
        });
        let mut next = |what: &str| {
            tokens
                .next()
                .unwrap_or_else(|| Err(Error::Parse(format!("graph: missing {what}"))))
        };
        let n = next("vertex count")?;
        let m = next("edge count")?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            edges.push((next("edge endpoint")?, next("edge endpoint")?));
        }
        if tokens.next().is_some() {
            return Err(Error::Parse("graph: trailing tokens after edge list".into()));
        }
        Graph::new(n, edges)
    }

    /// Resolves a built-in name or reads a graph file.
    pub fn load(source: &str) -> Result<Self> {
        if let Some(g) = Graph::named(source) {
            return g;
        }
        let text = std::fs::read_to_string(Path::new(source))
            .map_err(|e| Error::Io(format!("{source}: {e}")))?;
        Graph::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n_vertices, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency.get(u)?.get(v).copied().flatten()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v]
            .iter()
            .enumerate()
            .filter_map(|(w, e)| e.map(|_| w))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    pub fn is_acyclic(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n_vertices).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph(v={}, e={}, [", self.n_vertices, self.edges.len())?;
        for (i, (u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        write!(f, "])")
    }
}

/// Length of a shortest cycle, `None` for forests.
pub fn girth(g: &Graph) -> Option<usize> {
    let n = g.n_vertices();
    let mut best: Option<usize> = None;
    for root in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    let len = dist[u] + dist[w] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// All automorphisms as vertex permutations (`perm[v]` is the image of `v`).
pub fn automorphisms(g: &Graph, cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = g.n_vertices();
    if n > cap {
        return Err(cap_exceeded("automorphism search vertices", n, cap));
    }
    let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        g: &Graph,
        degrees: &[usize],
        v: usize,
        perm: &mut [usize],
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = perm.len();
        if v == n {
            out.push(perm.to_vec());
            return;
        }
        for target in 0..n {
            if used[target] || degrees[target] != degrees[v] {
                continue;
            }
            // adjacency to already placed vertices must be preserved
            let consistent = (0..v).all(|u| g.has_edge(u, v) == g.has_edge(perm[u], target));
            if !consistent {
                continue;
            }
            perm[v] = target;
            used[target] = true;
            extend(g, degrees, v + 1, perm, used, out);
            used[target] = false;
        }
        perm[v] = usize::MAX;
    }

    extend(g, &degrees, 0, &mut perm, &mut used, &mut out);
    Ok(out)
}

pub fn automorphism_count(g: &Graph, cap: usize) -> Result<u64> {
    Ok(automorphisms(g, cap)?.len() as u64)
}

/// Deterministic enumeration of the copies of a pattern inside `K_n`.
///
/// A copy is reported through the lexicographically smallest injective
/// vertex map in its orbit under `Aut(pattern)`, so every copy appears once
/// and the order is fixed.
#[derive(Clone, Debug)]
pub struct CopyEnumerator {
    pattern: Graph,
    n: usize,
    // non-identity automorphisms
    symmetries: Vec<Vec<usize>>,
    aut_count: u64,
}

impl CopyEnumerator {
    pub fn new(pattern: &Graph, n: usize, automorphism_cap: usize) -> Result<Self> {
        if pattern.n_vertices() > n {
            return Err(Error::Precondition(format!(
                "pattern has {} vertices, host K_{n} is too small",
                pattern.n_vertices()
            )));
        }
        let auts = automorphisms(pattern, automorphism_cap)?;
        let aut_count = auts.len() as u64;
        let identity: Vec<usize> = (0..pattern.n_vertices()).collect();
        let symmetries = auts.into_iter().filter(|p| *p != identity).collect();
        Ok(CopyEnumerator {
            pattern: pattern.clone(),
            n,
            symmetries,
            aut_count,
        })
    }

    pub fn pattern(&self) -> &Graph {
        &self.pattern
    }

    pub fn host_size(&self) -> usize {
        self.n
    }

    pub fn automorphism_count(&self) -> u64 {
        self.aut_count
    }

    fn is_canonical(&self, image: &[usize]) -> bool {
        self.symmetries.iter().all(|sigma| {
            for (v, &x) in image.iter().enumerate() {
                let y = image[sigma[v]];
                if y != x {
                    return y > x;
                }
            }
            true
        })
    }

    /// Calls `f` on every copy whose first pattern vertex maps to `first`.
    pub fn for_each_in_partition(&self, first: usize, mut f: impl FnMut(&[usize])) {
        let k = self.pattern.n_vertices();
        if k == 0 {
            if first == 0 {
                f(&[]);
            }
            return;
        }
        let mut image = vec![0usize; k];
        let mut used = vec![false; self.n];
        image[0] = first;
        if !self.prefix_can_be_canonical(&image, 0) {
            return;
        }
        used[first] = true;
        self.extend(1, &mut image, &mut used, &mut f);
    }

    fn extend(&self, depth: usize, image: &mut [usize], used: &mut [bool], f: &mut impl FnMut(&[usize])) {
        if depth == image.len() {
            if self.is_canonical(image) {
                f(image);
            }
            return;
        }
        for x in 0..self.n {
            if used[x] {
                continue;
            }
            image[depth] = x;
            if !self.prefix_can_be_canonical(image, depth) {
                continue;
            }
            used[x] = true;
            self.extend(depth + 1, image, used, f);
            used[x] = false;
        }
    }

    /// False when some symmetry already yields a smaller image using only
    /// positions `0..=depth`.
    fn prefix_can_be_canonical(&self, image: &[usize], depth: usize) -> bool {
        self.symmetries.iter().all(|sigma| {
            for j in 0..=depth {
                let a = sigma[j];
                if a > depth {
                    return true;
                }
                match image[a].cmp(&image[j]) {
                    std::cmp::Ordering::Less => return false,
                    std::cmp::Ordering::Greater => return true,
                    std::cmp::Ordering::Equal => {}
                }
            }
            true
        })
    }

    pub fn for_each(&self, mut f: impl FnMut(&[usize])) {
        let parts = if self.pattern.n_vertices() == 0 { 1 } else { self.n };
        for first in 0..parts {
            self.for_each_in_partition(first, &mut f);
        }
    }

    /// Parallel map-reduce over the copies, split by the first vertex image.
    pub fn par_fold<A, F, R>(&self, init: A, fold: F, reduce: R) -> A
    where
        A: Clone + Send + Sync,
        F: Fn(&mut A, &[usize]) + Sync,
        R: Fn(A, A) -> A + Sync + Send,
    {
        let parts = if self.pattern.n_vertices() == 0 { 1 } else { self.n };
        (0..parts)
            .into_par_iter()
            .map(|first| {
                let mut acc = init.clone();
                self.for_each_in_partition(first, |img| fold(&mut acc, img));
                acc
            })
            .reduce(|| init.clone(), &reduce)
    }

    pub fn copies(&self) -> Vec<VertexMap> {
        let mut out = Vec::new();
        self.for_each(|img| out.push(VertexMap { image: img.to_vec() }));
        out
    }
}

/// Convenience wrapper collecting all copies of `h` in `K_n`.
pub fn enumerate_copies(h: &Graph, n: usize) -> Result<Vec<VertexMap>> {
    Ok(CopyEnumerator::new(h, n, DEFAULT_AUTOMORPHISM_CAP)?.copies())
}

/// Every subgraph of `h` isomorphic to the `s`-cycle, as sorted edge indices.
pub fn cycle_subgraphs(h: &Graph, s: usize) -> Vec<Vec<usize>> {
    if s < 3 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(s);
    let mut on_path = vec![false; h.n_vertices()];

    fn walk(
        h: &Graph,
        s: usize,
        start: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let last = *path.last().expect("path starts non-empty");
        if path.len() == s {
            // each cycle is seen in both orientations; keep one
            if h.has_edge(last, start) && path[1] < last {
                let mut edges: Vec<usize> = path
                    .windows(2)
                    .map(|w| h.edge_index(w[0], w[1]).expect("path edge"))
                    .chain(std::iter::once(h.edge_index(last, start).expect("closing edge")))
                    .collect();
                edges.sort_unstable();
                out.push(edges);
            }
            return;
        }
        let next: Vec<usize> = h.neighbors(last).filter(|&w| w > start && !on_path[w]).collect();
        for w in next {
            path.push(w);
            on_path[w] = true;
            walk(h, s, start, path, on_path, out);
            on_path[w] = false;
            path.pop();
        }
    }

    for start in 0..h.n_vertices() {
        path.clear();
        path.push(start);
        on_path[start] = true;
        walk(h, s, start, &mut path, &mut on_path, &mut out);
        on_path[start] = false;
    }
    out.sort();
    out
}

/// True iff every vertex touched by the edge subset has even degree in it.
pub fn is_even_graph(h: &Graph, edge_subset: &[usize]) -> bool {
    let mut parity = vec![false; h.n_vertices()];
    for &e in edge_subset {
        let (u, v) = h.edges()[e];
        parity[u] = !parity[u];
        parity[v] = !parity[v];
    }
    parity.iter().all(|odd| !odd)
}
