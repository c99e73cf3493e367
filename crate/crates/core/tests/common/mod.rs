//! Reference implementations used to cross-check the library. They share
//! no code with it beyond the graph container.
#![allow(dead_code)]

pub mod checks;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use thickness_core::decomposition::Decomposition;
use thickness_core::graph::{edge, Edge, Graph, VertexId};
use thickness_core::planarity::is_planar;

/// Adjacency bitmasks of a graph on at most 16 vertices.
#[derive(Clone, Debug)]
pub struct Small {
    pub n: usize,
    pub adj: Vec<u16>,
}

impl Small {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![0u16; n];
        for &(u, v) in edges {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Small { n, adj }
    }

    pub fn from_graph(g: &Graph) -> (Self, Vec<VertexId>) {
        let labels: Vec<VertexId> = g.vertices().iter().cloned().collect();
        let index: BTreeMap<&VertexId, usize> =
            labels.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let edges: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = e.endpoints();
                (index[a], index[b])
            })
            .collect();
        (Small::from_edges(labels.len(), &edges), labels)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.adj[u] >> v & 1 == 1 {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

fn connected(adj: &[u16], set: u16) -> bool {
    if set == 0 {
        return false;
    }
    let mut seen = set & set.wrapping_neg();
    loop {
        let mut grow = seen;
        for (v, nbrs) in adj.iter().enumerate() {
            if seen >> v & 1 == 1 {
                grow |= nbrs & set;
            }
        }
        if grow == seen {
            return seen == set;
        }
        seen = grow;
    }
}

fn touches(adj: &[u16], a: u16, b: u16) -> bool {
    adj.iter()
        .enumerate()
        .any(|(v, nbrs)| a >> v & 1 == 1 && nbrs & b != 0)
}

fn combinations(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, n, &mut Vec::new(), &mut out);
    out
}

/// True if the quotient by `blocks` (some of which may be disconnected
/// and are then only usable as deleted) has K5 or K3,3 as a subgraph.
fn quotient_has_kuratowski(adj: &[u16], blocks: &[u16]) -> bool {
    let usable: Vec<u16> = blocks
        .iter()
        .copied()
        .filter(|&b| connected(adj, b))
        .collect();
    let k = usable.len();
    let mut meet = vec![vec![false; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let t = touches(adj, usable[i], usable[j]);
            meet[i][j] = t;
            meet[j][i] = t;
        }
    }
    for c in combinations(5.min(k), k) {
        if c.len() == 5 && c.iter().all(|&i| c.iter().all(|&j| i == j || meet[i][j])) {
            return true;
        }
    }
    for c in combinations(6.min(k), k) {
        if c.len() < 6 {
            break;
        }
        // sides containing c[0]
        for side in combinations(2, 5) {
            let left = [c[0], c[side[0] + 1], c[side[1] + 1]];
            let right: Vec<usize> = c.iter().copied().filter(|x| !left.contains(x)).collect();
            if left.iter().all(|&i| right.iter().all(|&j| meet[i][j])) {
                return true;
            }
        }
    }
    false
}

/// Planarity by Wagner's theorem: search every set partition of the vertex
/// set for a K5 or K3,3 minor. Exponential; meant for at most ~9 vertices.
pub fn planar_by_minors(g: &Small) -> bool {
    let n = g.n;
    let m = g.edges().len();
    if n <= 4 {
        return true;
    }
    if m < 9 {
        return true;
    }
    // restricted growth strings
    let mut rgs = vec![0usize; n];
    loop {
        let blocks_count = rgs.iter().max().unwrap() + 1;
        if blocks_count >= 5 {
            let mut blocks = vec![0u16; blocks_count];
            for (v, &b) in rgs.iter().enumerate() {
                blocks[b] |= 1 << v;
            }
            if quotient_has_kuratowski(&g.adj, &blocks) {
                return false;
            }
        }
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return true;
            }
            let max_prefix = *rgs[..i].iter().max().unwrap();
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for r in rgs.iter_mut().skip(i + 1) {
                    *r = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Least k such that some assignment of edges to k pages has every page
/// planar, by plain enumeration of all assignments.
pub fn naive_thickness(g: &Small) -> usize {
    let edges = g.edges();
    for k in 1.. {
        if naive_partition(g.n, &edges, k, |_| true).is_some() {
            return k;
        }
    }
    unreachable!()
}

/// First assignment (page per edge) with every page planar and `accept`
/// holding, trying all k^E assignments in counting order.
pub fn naive_partition(
    n: usize,
    edges: &[(usize, usize)],
    k: usize,
    accept: impl Fn(&[usize]) -> bool,
) -> Option<Vec<usize>> {
    let e = edges.len();
    if e == 0 {
        return Some(Vec::new());
    }
    let total = (k as u64).pow(e as u32);
    let mut assign = vec![0usize; e];
    for code in 0..total {
        let mut c = code;
        for slot in assign.iter_mut() {
            *slot = (c % k as u64) as usize;
            c /= k as u64;
        }
        if !accept(&assign) {
            continue;
        }
        let ok = (0..k).all(|p| {
            let page: Vec<(usize, usize)> = edges
                .iter()
                .zip(&assign)
                .filter(|(_, &a)| a == p)
                .map(|(e, _)| *e)
                .collect();
            planar_by_minors(&Small::from_edges(n, &page))
        });
        if ok {
            return Some(assign);
        }
    }
    None
}

pub fn small_label(i: usize) -> VertexId {
    VertexId::plain(format!("g{i}"))
}

pub fn small_to_graph(g: &Small) -> Graph {
    Graph::new(
        (0..g.n).map(small_label),
        g.edges()
            .into_iter()
            .map(|(u, v)| edge(small_label(u), small_label(v))),
    )
    .unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism class of graphs on `n` vertices,
/// using the smallest edge mask over all relabellings as canonical form.
pub fn nonisomorphic_graphs(n: usize) -> Vec<Small> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let index: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let canon = perms
            .iter()
            .map(|p| {
                let mut m = 0u32;
                for (i, &(u, v)) in pairs.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        let (a, b) = (p[u].min(p[v]), p[u].max(p[v]));
                        m |= 1 << index[&(a, b)];
                    }
                }
                m
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| canon >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            out.push(Small::from_edges(n, &edges));
        }
    }
    out
}

pub fn random_small(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Small {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Small::from_edges(n, &edges)
}

/// First-fit decomposition over a shuffled edge order. Only an input
/// generator, so it uses the library planarity test for speed.
pub fn random_decomposition(g: &Graph, rng: &mut ChaCha8Rng) -> Decomposition {
    let mut order: Vec<Edge> = g.edges().iter().cloned().collect();
    order.shuffle(rng);
    let mut pages: Vec<BTreeSet<Edge>> = Vec::new();
    for e in order {
        let slot = pages.iter().position(|p| {
            let mut trial = p.clone();
            trial.insert(e.clone());
            is_planar(&g.spanning_subgraph(trial).unwrap()).planar
        });
        match slot {
            Some(i) => {
                pages[i].insert(e);
            }
            None => pages.push(BTreeSet::from([e])),
        }
    }
    Decomposition::new(g.clone(), pages)
}

/// ⌈x⌉ for a non-negative rational.
pub fn ceil_ratio(x: num_rational::Ratio<u64>) -> u64 {
    x.ceil().to_integer()
}
