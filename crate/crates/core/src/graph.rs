//! Immutable simple graphs with structured vertex labels, plus the graph
//! operations the constructions are built from: cartesian product, edge
//! subdivision, vertex merging, vertex-amalgamation and deletion.
//!
//! Every operation takes its inputs by reference and returns a new graph.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid size {0}: must be at least 1")]
    InvalidSize(usize),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("self-loop at {0}")]
    Loop(VertexId),
    #[error("edge {0} is not in the graph")]
    MissingEdge(Edge),
    #[error("vertex {0} is not in the graph")]
    MissingVertex(VertexId),
    #[error("label {0} is already used")]
    LabelCollision(VertexId),
    #[error("cannot merge adjacent vertices {0} and {1}")]
    AdjacentMerge(VertexId, VertexId),
    #[error("cannot merge an empty vertex group")]
    EmptyGroup,
    #[error("graphs share vertex {0} besides the amalgamation vertex")]
    Overlap(VertexId),
    #[error("isomorphism check supports at most {max} vertices, got {got}")]
    TooLarge { max: usize, got: usize },
    #[error("invalid vertex label {0:?}")]
    BadLabel(String),
}

/// A vertex label.
///
/// `Layer` and `Hub` are produced by the product and chain constructors;
/// everything else is `Plain`. The text form is `v:<layer>:<slot>`,
/// `w:<position>` or the plain name itself.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VertexId {
    Layer { layer: u32, slot: u32 },
    Hub { position: u32 },
    Plain(String),
}

impl VertexId {
    pub fn layer(layer: u32, slot: u32) -> Self {
        VertexId::Layer { layer, slot }
    }

    pub fn hub(position: u32) -> Self {
        VertexId::Hub { position }
    }

    pub fn plain(name: impl Into<String>) -> Self {
        VertexId::Plain(name.into())
    }

    pub fn is_hub(&self) -> bool {
        matches!(self, VertexId::Hub { .. })
    }

    fn rank(&self) -> u8 {
        match self {
            VertexId::Layer { .. } => 0,
            VertexId::Hub { .. } => 1,
            VertexId::Plain(_) => 2,
        }
    }
}

/// Plain names compare in natural order, so `x2 < x10`.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut ai, mut bi) = (a.as_bytes(), b.as_bytes());
    loop {
        match (ai.first(), bi.first()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let da = ai.iter().take_while(|c| c.is_ascii_digit()).count();
                let db = bi.iter().take_while(|c| c.is_ascii_digit()).count();
                let na = trim_zeros(&ai[..da]);
                let nb = trim_zeros(&bi[..db]);
                let ord = na.len().cmp(&nb.len()).then_with(|| na.cmp(nb));
                if ord != Ordering::Equal {
                    return ord;
                }
                ai = &ai[da..];
                bi = &bi[db..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(y);
                }
                ai = &ai[1..];
                bi = &bi[1..];
            }
        }
    }
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let start = digits.iter().take_while(|&&c| c == b'0').count();
    &digits[start..]
}

impl Ord for VertexId {
    fn cmp(&self, other: &Self) -> Ordering {
        use VertexId::*;
        match (self, other) {
            (
                Layer {
                    layer: l1,
                    slot: s1,
                },
                Layer {
                    layer: l2,
                    slot: s2,
                },
            ) => l1.cmp(l2).then(s1.cmp(s2)),
            (Hub { position: p1 }, Hub { position: p2 }) => p1.cmp(p2),
            (Plain(a), Plain(b)) => natural_cmp(a, b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for VertexId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexId::Layer { layer, slot } => write!(f, "v:{layer}:{slot}"),
            VertexId::Hub { position } => write!(f, "w:{position}"),
            VertexId::Plain(name) => f.write_str(name),
        }
    }
}

/// True if `name` can be stored as a plain label and read back unchanged.
pub fn is_plain_token(name: &str) -> bool {
    !name.is_empty() && !name.contains(':') && !name.chars().any(char::is_whitespace)
}

impl FromStr for VertexId {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::BadLabel(s.to_string());
        let index = |t: &str| -> Result<u32, GraphError> {
            match t.parse::<u32>() {
                Ok(i) if i >= 1 && !t.starts_with('0') => Ok(i),
                _ => Err(bad()),
            }
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["v", layer, slot] => Ok(VertexId::layer(index(layer)?, index(slot)?)),
            ["w", position] => Ok(VertexId::hub(index(position)?)),
            [name] if is_plain_token(name) => Ok(VertexId::plain(*name)),
            _ => Err(bad()),
        }
    }
}

/// An unordered pair of distinct vertices, stored with the smaller endpoint first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    a: VertexId,
    b: VertexId,
}

impl Edge {
    pub fn new(x: VertexId, y: VertexId) -> Result<Self, GraphError> {
        match x.cmp(&y) {
            Ordering::Less => Ok(Edge { a: x, b: y }),
            Ordering::Greater => Ok(Edge { a: y, b: x }),
            Ordering::Equal => Err(GraphError::Loop(x)),
        }
    }

    pub fn endpoints(&self) -> (&VertexId, &VertexId) {
        (&self.a, &self.b)
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        &self.a == v || &self.b == v
    }

    /// The endpoint opposite `v`, if `v` is an endpoint.
    pub fn other(&self, v: &VertexId) -> Option<&VertexId> {
        if &self.a == v {
            Some(&self.b)
        } else if &self.b == v {
            Some(&self.a)
        } else {
            None
        }
    }

    /// Applies `f` to both endpoints.
    pub fn map(&self, mut f: impl FnMut(&VertexId) -> VertexId) -> Result<Edge, GraphError> {
        Edge::new(f(&self.a), f(&self.b))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

/// Shorthand for building an edge from two labels known to differ.
///
/// # Panics
/// If `x == y`.
pub fn edge(x: VertexId, y: VertexId) -> Edge {
    Edge::new(x, y).expect("edge endpoints must differ")
}

/// A finite simple undirected graph. Equality is label-sensitive.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeSet<Edge>,
}

impl Graph {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        for e in &edges {
            for v in [&e.a, &e.b] {
                if !vertices.contains(v) {
                    return Err(GraphError::MissingVertex(v.clone()));
                }
            }
        }
        Ok(Graph { vertices, edges })
    }

    /// Graph whose vertex set is exactly the endpoints of `edges`.
    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Self {
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        let vertices = edges
            .iter()
            .flat_map(|e| [e.a.clone(), e.b.clone()])
            .collect();
        Graph { vertices, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn has_edge(&self, x: &VertexId, y: &VertexId) -> bool {
        Edge::new(x.clone(), y.clone()).is_ok_and(|e| self.edges.contains(&e))
    }

    pub fn neighbors(&self, v: &VertexId) -> BTreeSet<VertexId> {
        self.edges
            .iter()
            .filter_map(|e| e.other(v).cloned())
            .collect()
    }

    pub fn degree(&self, v: &VertexId) -> usize {
        self.edges.iter().filter(|e| e.contains(v)).count()
    }

    pub fn adjacency(&self) -> BTreeMap<VertexId, BTreeSet<VertexId>> {
        let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = self
            .vertices
            .iter()
            .map(|v| (v.clone(), BTreeSet::new()))
            .collect();
        for e in &self.edges {
            adj.get_mut(&e.a).unwrap().insert(e.b.clone());
            adj.get_mut(&e.b).unwrap().insert(e.a.clone());
        }
        adj
    }

    /// Spanning subgraph on the same vertex set with the given edges.
    pub fn spanning_subgraph(
        &self,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Graph, GraphError> {
        Graph::new(self.vertices.iter().cloned(), edges)
    }

    /// Subgraph induced by `keep`.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Graph {
        let vertices = self.vertices.intersection(keep).cloned().collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| keep.contains(&e.a) && keep.contains(&e.b))
            .cloned()
            .collect();
        Graph { vertices, edges }
    }

    /// Renames vertices through `map`; unmapped vertices keep their label.
    pub fn relabel(&self, map: &BTreeMap<VertexId, VertexId>) -> Result<Graph, GraphError> {
        let rename = |v: &VertexId| map.get(v).cloned().unwrap_or_else(|| v.clone());
        let mut vertices = BTreeSet::new();
        for v in &self.vertices {
            let r = rename(v);
            if !vertices.insert(r.clone()) {
                return Err(GraphError::LabelCollision(r));
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| e.map(rename))
            .collect::<Result<_, _>>()?;
        Ok(Graph { vertices, edges })
    }

    pub fn with_vertex(&self, v: VertexId) -> Graph {
        let mut g = self.clone();
        g.vertices.insert(v);
        g
    }

    /// Number of connected components (isolated vertices count).
    pub fn component_count(&self) -> usize {
        let dense = self.to_dense();
        let mut parent: Vec<usize> = (0..dense.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut components = dense.n;
        for &(u, v) in &dense.edges {
            let (ru, rv) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
            if ru != rv {
                parent[ru] = rv;
                components -= 1;
            }
        }
        components
    }

    /// Dense 0-based view in sorted label order.
    pub fn to_dense(&self) -> DenseGraph {
        let labels: Vec<VertexId> = self.vertices.iter().cloned().collect();
        let index: BTreeMap<&VertexId, u32> = labels
            .iter()
            .enumerate()
            .map(|(i, v)| (v, i as u32))
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| (index[&e.a], index[&e.b]))
            .collect();
        DenseGraph {
            n: labels.len(),
            edges,
            labels,
        }
    }
}

/// Integer-indexed copy of a [`Graph`] for the hot loops.
#[derive(Clone, Debug)]
pub struct DenseGraph {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
    pub labels: Vec<VertexId>,
}

impl DenseGraph {
    pub fn index_of(&self, v: &VertexId) -> Option<u32> {
        self.labels.binary_search(v).ok().map(|i| i as u32)
    }

    pub fn edge_label(&self, (u, v): (u32, u32)) -> Edge {
        edge(
            self.labels[u as usize].clone(),
            self.labels[v as usize].clone(),
        )
    }
}

/// Plain label used for the i-th vertex of [`complete_graph`].
pub fn complete_label(i: usize) -> VertexId {
    VertexId::plain(format!("x{i}"))
}

/// K_n on vertices `x1..xn`.
pub fn complete_graph(n: usize) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidSize(n));
    }
    let vertices: Vec<VertexId> = (1..=n).map(complete_label).collect();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push(edge(vertices[i].clone(), vertices[j].clone()));
        }
    }
    Graph::new(vertices, edges)
}

/// K_n minus the edge `x_{n-1} x_n`.
pub fn complete_graph_minus_edge(n: usize) -> Result<Graph, GraphError> {
    let g = complete_graph(n)?;
    if n < 2 {
        return Err(GraphError::InvalidSize(n));
    }
    delete_edge(&g, &edge(complete_label(n - 1), complete_label(n)))
}

/// P_m on vertices `p1..pm`, edges in label order.
pub fn path_graph(m: usize) -> Result<Graph, GraphError> {
    if m == 0 {
        return Err(GraphError::InvalidSize(m));
    }
    let vertices: Vec<VertexId> = (1..=m).map(|i| VertexId::plain(format!("p{i}"))).collect();
    let edges = vertices
        .windows(2)
        .map(|w| edge(w[0].clone(), w[1].clone()))
        .collect::<Vec<_>>();
    Graph::new(vertices, edges)
}

/// Vertices of `h` in path order if `h` is a path, starting at the smaller end.
fn path_order(h: &Graph) -> Option<Vec<VertexId>> {
    let n = h.vertex_count();
    if n == 0 || h.edge_count() != n - 1 {
        return None;
    }
    let adj = h.adjacency();
    if adj.values().any(|nb| nb.len() > 2) {
        return None;
    }
    let start = if n == 1 {
        adj.keys().next()?.clone()
    } else {
        adj.iter().find(|(_, nb)| nb.len() == 1)?.0.clone()
    };
    let mut order = vec![start.clone()];
    let mut prev: Option<VertexId> = None;
    let mut cur = start;
    while order.len() < n {
        let next = adj[&cur]
            .iter()
            .find(|x| Some(*x) != prev.as_ref())?
            .clone();
        prev = Some(cur);
        cur = next;
        order.push(cur.clone());
    }
    Some(order)
}

fn token(v: &VertexId) -> String {
    v.to_string().replace(':', "-")
}

/// Cartesian product g □ h.
///
/// When `h` is a path the result is labelled `Layer { layer, slot }` with
/// `layer` the position along the path and `slot` the 1-based index of the
/// `g` vertex in sorted order. Otherwise labels are `(a,b)` plain names.
pub fn cartesian_product(g: &Graph, h: &Graph) -> Result<Graph, GraphError> {
    if g.vertex_count() == 0 || h.vertex_count() == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let g_order: Vec<&VertexId> = g.vertices().iter().collect();
    let h_order: Vec<VertexId> =
        path_order(h).unwrap_or_else(|| h.vertices().iter().cloned().collect());
    let is_path = path_order(h).is_some();
    let label = |gi: usize, hi: usize| -> VertexId {
        if is_path {
            VertexId::layer(hi as u32 + 1, gi as u32 + 1)
        } else {
            VertexId::plain(format!("({},{})", token(g_order[gi]), token(&h_order[hi])))
        }
    };
    let g_pos: BTreeMap<&VertexId, usize> =
        g_order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let h_pos: BTreeMap<&VertexId, usize> =
        h_order.iter().enumerate().map(|(i, v)| (v, i)).collect();

    let mut vertices = Vec::with_capacity(g_order.len() * h_order.len());
    for hi in 0..h_order.len() {
        for gi in 0..g_order.len() {
            vertices.push(label(gi, hi));
        }
    }
    let mut edges = Vec::new();
    for hi in 0..h_order.len() {
        for e in g.edges() {
            edges.push(edge(label(g_pos[&e.a], hi), label(g_pos[&e.b], hi)));
        }
    }
    for gi in 0..g_order.len() {
        for e in h.edges() {
            edges.push(edge(label(gi, h_pos[&e.a]), label(gi, h_pos[&e.b])));
        }
    }
    Graph::new(vertices, edges)
}

/// K_n □ P_m with `Layer` labels.
pub fn complete_path_product(n: usize, m: usize) -> Result<Graph, GraphError> {
    cartesian_product(&complete_graph(n)?, &path_graph(m)?)
}

/// Replaces `e` by a path of length two through the new vertex `label`.
pub fn subdivide_edge(g: &Graph, e: &Edge, label: VertexId) -> Result<Graph, GraphError> {
    if !g.contains_edge(e) {
        return Err(GraphError::MissingEdge(e.clone()));
    }
    if g.contains_vertex(&label) {
        return Err(GraphError::LabelCollision(label));
    }
    let mut out = g.clone();
    out.edges.remove(e);
    out.edges.insert(edge(e.a.clone(), label.clone()));
    out.edges.insert(edge(e.b.clone(), label.clone()));
    out.vertices.insert(label);
    Ok(out)
}

/// Identifies all vertices of `group` into `label`. Group members must be
/// pairwise nonadjacent; parallel edges created by the merge collapse.
pub fn merge_vertices(
    g: &Graph,
    group: &BTreeSet<VertexId>,
    label: VertexId,
) -> Result<Graph, GraphError> {
    if group.is_empty() {
        return Err(GraphError::EmptyGroup);
    }
    if let Some(v) = group.iter().find(|v| !g.contains_vertex(v)) {
        return Err(GraphError::MissingVertex(v.clone()));
    }
    if g.contains_vertex(&label) && !group.contains(&label) {
        return Err(GraphError::LabelCollision(label));
    }
    if let Some(e) = g
        .edges()
        .iter()
        .find(|e| group.contains(&e.a) && group.contains(&e.b))
    {
        return Err(GraphError::AdjacentMerge(e.a.clone(), e.b.clone()));
    }
    let rename = |v: &VertexId| {
        if group.contains(v) {
            label.clone()
        } else {
            v.clone()
        }
    };
    let vertices: BTreeSet<VertexId> = g.vertices().iter().map(rename).collect();
    let edges = g
        .edges()
        .iter()
        .map(|e| e.map(rename))
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(Graph { vertices, edges })
}

/// g1 ∨ g2 with `v1` and `v2` identified as `label`; all other vertices
/// must be distinct.
pub fn vertex_amalgamation(
    g1: &Graph,
    v1: &VertexId,
    g2: &Graph,
    v2: &VertexId,
    label: VertexId,
) -> Result<Graph, GraphError> {
    for (g, v) in [(g1, v1), (g2, v2)] {
        if !g.contains_vertex(v) {
            return Err(GraphError::MissingVertex(v.clone()));
        }
    }
    let h1 = g1.relabel(&BTreeMap::from([(v1.clone(), label.clone())]))?;
    let h2 = g2.relabel(&BTreeMap::from([(v2.clone(), label.clone())]))?;
    if let Some(v) = h1
        .vertices
        .intersection(&h2.vertices)
        .find(|v| **v != label)
    {
        return Err(GraphError::Overlap(v.clone()));
    }
    let mut out = h1;
    out.vertices.extend(h2.vertices);
    out.edges.extend(h2.edges);
    Ok(out)
}

pub fn delete_edge(g: &Graph, e: &Edge) -> Result<Graph, GraphError> {
    if !g.contains_edge(e) {
        return Err(GraphError::MissingEdge(e.clone()));
    }
    let mut out = g.clone();
    out.edges.remove(e);
    Ok(out)
}

pub fn delete_vertex(g: &Graph, v: &VertexId) -> Result<Graph, GraphError> {
    if !g.contains_vertex(v) {
        return Err(GraphError::MissingVertex(v.clone()));
    }
    let mut out = g.clone();
    out.vertices.remove(v);
    out.edges.retain(|e| !e.contains(v));
    Ok(out)
}

/// Largest graph accepted by [`is_isomorphic`].
pub const ISOMORPHISM_LIMIT: usize = 12;

/// Brute-force isomorphism test with degree pruning, for test assertions on
/// small graphs.
pub fn is_isomorphic(g: &Graph, h: &Graph) -> Result<bool, GraphError> {
    for x in [g, h] {
        if x.vertex_count() > ISOMORPHISM_LIMIT {
            return Err(GraphError::TooLarge {
                max: ISOMORPHISM_LIMIT,
                got: x.vertex_count(),
            });
        }
    }
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() {
        return Ok(false);
    }
    let (dg, dh) = (g.to_dense(), h.to_dense());
    let n = dg.n;
    let bits = |d: &DenseGraph| {
        let mut adj = vec![0u16; n];
        for &(u, v) in &d.edges {
            adj[u as usize] |= 1 << v;
            adj[v as usize] |= 1 << u;
        }
        adj
    };
    let (ag, ah) = (bits(&dg), bits(&dh));
    let mut sg: Vec<u32> = ag.iter().map(|a| a.count_ones()).collect();
    let mut sh: Vec<u32> = ah.iter().map(|a| a.count_ones()).collect();
    let (deg_g, deg_h) = (sg.clone(), sh.clone());
    sg.sort_unstable();
    sh.sort_unstable();
    if sg != sh {
        return Ok(false);
    }

    fn extend(
        i: usize,
        map: &mut Vec<usize>,
        used: &mut u16,
        ag: &[u16],
        ah: &[u16],
        deg_g: &[u32],
        deg_h: &[u32],
    ) -> bool {
        if i == ag.len() {
            return true;
        }
        for j in 0..ah.len() {
            if *used & (1 << j) != 0 || deg_g[i] != deg_h[j] {
                continue;
            }
            let consistent = (0..i).all(|k| {
                let in_g = ag[i] & (1 << k) != 0;
                let in_h = ah[j] & (1 << map[k]) != 0;
                in_g == in_h
            });
            if !consistent {
                continue;
            }
            map.push(j);
            *used |= 1 << j;
            if extend(i + 1, map, used, ag, ah, deg_g, deg_h) {
                return true;
            }
            map.pop();
            *used &= !(1 << j);
        }
        false
    }
    Ok(extend(0, &mut Vec::new(), &mut 0, &ag, &ah, &deg_g, &deg_h))
}
