//! Planarity testing.
//!
//! The decision procedure is the left-right criterion: a DFS orientation,
//! lowpoint computation and a conflict-pair stack. When asked, the same run
//! produces a rotation system, and non-planar inputs get a Kuratowski
//! subdivision extracted by greedy edge deletion.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::graph::{DenseGraph, Edge, Graph, GraphError, VertexId};

/// Maximum number of edges of a simple planar graph on `nv` vertices.
pub fn euler_edge_cap(nv: usize) -> Result<usize, GraphError> {
    match nv {
        0 => Err(GraphError::InvalidSize(0)),
        1 => Ok(0),
        2 => Ok(1),
        _ => Ok(3 * nv - 6),
    }
}

/// True only when `g` has too many edges to be planar.
pub fn fast_reject(g: &Graph) -> bool {
    let nv = g.vertex_count();
    nv >= 3 && g.edge_count() > 3 * nv - 6
}

/// Clockwise neighbour order around every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    pub rotations: BTreeMap<VertexId, Vec<VertexId>>,
}

impl RotationSystem {
    /// Face boundaries traced from the rotation system, as lists of darts.
    pub fn faces(&self) -> Vec<Vec<(VertexId, VertexId)>> {
        // position of w in the rotation at v
        let mut pos: HashMap<(&VertexId, &VertexId), usize> = HashMap::new();
        for (v, rot) in &self.rotations {
            for (i, w) in rot.iter().enumerate() {
                pos.insert((v, w), i);
            }
        }
        let mut seen: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        let mut faces = Vec::new();
        for (v, rot) in &self.rotations {
            for w in rot {
                if seen.contains(&(v.clone(), w.clone())) {
                    continue;
                }
                let mut face = Vec::new();
                let (mut a, mut b) = (v, w);
                while seen.insert((a.clone(), b.clone())) {
                    face.push((a.clone(), b.clone()));
                    // next dart leaves b just after the reverse dart in cw order
                    let rb = &self.rotations[b];
                    let i = pos[&(b, a)];
                    let c = &rb[(i + 1) % rb.len()];
                    a = b;
                    b = c;
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Checks that the rotation system covers exactly the edges of `g` and
    /// that every connected component satisfies V - E + F = 2.
    pub fn is_plane_embedding_of(&self, g: &Graph) -> bool {
        let keys: BTreeSet<&VertexId> = self.rotations.keys().collect();
        if keys != g.vertices().iter().collect() {
            return false;
        }
        let adj = g.adjacency();
        for (v, rot) in &self.rotations {
            let set: BTreeSet<&VertexId> = rot.iter().collect();
            if set.len() != rot.len() || set != adj[v].iter().collect() {
                return false;
            }
        }
        let faces = self.faces();
        let components = g.component_count() as i64;
        let isolated = adj.values().filter(|nb| nb.is_empty()).count() as i64;
        // Isolated vertices contribute no traced face but one component each.
        let v = g.vertex_count() as i64;
        let e = g.edge_count() as i64;
        let f = faces.len() as i64;
        // Summing V - E + F = 2 over components that carry edges, where the
        // shared outer face is counted once per component.
        let edge_components = components - isolated;
        (v - isolated) - e + f == 2 * edge_components
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KuratowskiKind {
    K5,
    K33,
}

/// Edges of a subdivision of K5 or K3,3 contained in the tested graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KuratowskiWitness {
    pub kind: KuratowskiKind,
    pub edges: BTreeSet<Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarityVerdict {
    pub planar: bool,
    pub embedding: Option<RotationSystem>,
    pub kuratowski: Option<KuratowskiWitness>,
}

/// Planarity decision with witnesses.
pub fn is_planar(g: &Graph) -> PlanarityVerdict {
    planarity(g, true)
}

/// Planarity decision; witnesses only when `witness` is set.
pub fn planarity(g: &Graph, witness: bool) -> PlanarityVerdict {
    let dense = g.to_dense();
    let mut lr = LrPlanarity::default();
    if !witness {
        let planar = lr.test(dense.n, &dense.edges);
        return PlanarityVerdict {
            planar,
            embedding: None,
            kuratowski: None,
        };
    }
    match lr.embed(dense.n, &dense.edges) {
        Some(rot) => PlanarityVerdict {
            planar: true,
            embedding: Some(RotationSystem {
                rotations: rot
                    .into_iter()
                    .enumerate()
                    .map(|(v, nb)| {
                        (
                            dense.labels[v].clone(),
                            nb.into_iter()
                                .map(|w| dense.labels[w as usize].clone())
                                .collect(),
                        )
                    })
                    .collect(),
            }),
            kuratowski: None,
        },
        None => PlanarityVerdict {
            planar: false,
            embedding: None,
            kuratowski: Some(kuratowski_subgraph(&dense, &mut lr)),
        },
    }
}

/// Shrinks a non-planar edge set to an edge-minimal non-planar subgraph,
/// which is a subdivision of K5 or K3,3.
fn kuratowski_subgraph(dense: &DenseGraph, lr: &mut LrPlanarity) -> KuratowskiWitness {
    let mut kept: Vec<(u32, u32)> = dense.edges.clone();
    let mut i = 0;
    while i < kept.len() {
        let e = kept.remove(i);
        if lr.test(dense.n, &kept) {
            kept.insert(i, e);
            i += 1;
        }
    }
    let edges: BTreeSet<Edge> = kept.iter().map(|&e| dense.edge_label(e)).collect();
    let kind = classify_subdivision(&edges).expect("edge-minimal non-planar graph");
    KuratowskiWitness { kind, edges }
}

/// Returns the Kuratowski graph `edges` is a subdivision of, if any.
pub fn classify_subdivision(edges: &BTreeSet<Edge>) -> Option<KuratowskiKind> {
    let g = Graph::from_edges(edges.iter().cloned());
    let adj = g.adjacency();
    let branch: Vec<&VertexId> = adj
        .iter()
        .filter(|(_, nb)| nb.len() != 2)
        .map(|(v, _)| v)
        .collect();
    let degree = |v: &VertexId| adj[v].len();
    let kind = match branch.len() {
        5 if branch.iter().all(|v| degree(v) == 4) => KuratowskiKind::K5,
        6 if branch.iter().all(|v| degree(v) == 3) => KuratowskiKind::K33,
        _ => return None,
    };
    // Follow each branch vertex's threads of degree-2 vertices.
    let branch_set: BTreeSet<&VertexId> = branch.iter().copied().collect();
    let mut links: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for &b in &branch {
        for start in &adj[b] {
            let (mut prev, mut cur) = (b, start);
            let mut guard = 0;
            while !branch_set.contains(cur) {
                let next = adj[cur].iter().find(|x| *x != prev)?;
                prev = cur;
                cur = next;
                guard += 1;
                if guard > edges.len() {
                    return None;
                }
            }
            if cur == b {
                return None;
            }
            let pair = if b < cur {
                (b.clone(), cur.clone())
            } else {
                (cur.clone(), b.clone())
            };
            links.insert(pair);
        }
    }
    // every vertex must lie on some thread; no stray cycles
    if g.component_count() != 1 {
        return None;
    }
    match kind {
        KuratowskiKind::K5 if links.len() == 10 => Some(kind),
        KuratowskiKind::K33 if links.len() == 9 => {
            // the link graph must be bipartite 3+3
            let mut side: BTreeMap<&VertexId, bool> = BTreeMap::new();
            side.insert(branch[0], false);
            let mut changed = true;
            while changed {
                changed = false;
                for (a, b) in &links {
                    match (side.get(a).copied(), side.get(b).copied()) {
                        (Some(x), None) => {
                            side.insert(b, !x);
                            changed = true;
                        }
                        (None, Some(y)) => {
                            side.insert(a, !y);
                            changed = true;
                        }
                        (Some(x), Some(y)) if x == y => return None,
                        _ => {}
                    }
                }
            }
            let left = side.values().filter(|s| **s).count();
            (side.len() == 6 && left == 3).then_some(kind)
        }
        _ => None,
    }
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default)]
struct Interval {
    low: Option<u32>,
    high: Option<u32>,
}

impl Interval {
    fn single(e: u32) -> Self {
        Interval {
            low: Some(e),
            high: Some(e),
        }
    }

    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Debug)]
struct ConflictPair {
    id: u32,
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

/// Reusable left-right planarity tester. Buffers survive between calls so
/// repeated tests on small graphs do not allocate.
#[derive(Debug, Default)]
pub struct LrPlanarity {
    // per vertex
    adj: Vec<Vec<(u32, u32)>>,
    height: Vec<u32>,
    parent_edge: Vec<u32>,
    ordered_out: Vec<Vec<u32>>,
    roots: Vec<u32>,
    left_ref: Vec<u32>,
    right_ref: Vec<u32>,
    // per edge, indexed by input position; oriented src -> dst
    src: Vec<u32>,
    dst: Vec<u32>,
    oriented: Vec<bool>,
    lowpt: Vec<u32>,
    lowpt2: Vec<u32>,
    nesting: Vec<i64>,
    refs: Vec<u32>,
    side: Vec<i8>,
    stack_bottom: Vec<u32>,
    lowpt_edge: Vec<u32>,
    stack: Vec<ConflictPair>,
    next_pair: u32,
}

impl LrPlanarity {
    /// Planarity of the graph on vertices `0..n` with the given edges.
    /// Edges must be simple (no loops or duplicates).
    pub fn test(&mut self, n: usize, edges: &[(u32, u32)]) -> bool {
        if n > 2 && edges.len() > 3 * n - 6 {
            return false;
        }
        self.reset(n, edges);
        self.orient_all();
        self.sort_out_edges();
        let roots = std::mem::take(&mut self.roots);
        let ok = roots.iter().all(|&r| self.dfs_testing(r));
        self.roots = roots;
        ok
    }

    /// Clockwise rotation system if planar.
    pub fn embed(&mut self, n: usize, edges: &[(u32, u32)]) -> Option<Vec<Vec<u32>>> {
        if !self.test(n, edges) {
            return None;
        }
        for e in 0..edges.len() as u32 {
            let s = i64::from(self.sign(e));
            self.nesting[e as usize] *= s;
        }
        self.sort_out_edges();
        let mut emb = Embedding::new(n);
        for v in 0..n {
            let mut prev = None;
            for &e in &self.ordered_out[v] {
                let w = self.dst[e as usize];
                emb.add_cw(v as u32, w, prev);
                prev = Some(w);
            }
        }
        let roots = std::mem::take(&mut self.roots);
        for &r in &roots {
            self.dfs_embedding(r, &mut emb);
        }
        self.roots = roots;
        Some(emb.rotations())
    }

    fn reset(&mut self, n: usize, edges: &[(u32, u32)]) {
        let m = edges.len();
        self.adj.resize_with(n, Vec::new);
        self.ordered_out.resize_with(n, Vec::new);
        for v in 0..n {
            self.adj[v].clear();
            self.ordered_out[v].clear();
        }
        for (i, &(u, v)) in edges.iter().enumerate() {
            self.adj[u as usize].push((v, i as u32));
            self.adj[v as usize].push((u, i as u32));
        }
        for buf in [
            &mut self.height,
            &mut self.parent_edge,
            &mut self.left_ref,
            &mut self.right_ref,
        ] {
            buf.clear();
            buf.resize(n, NONE);
        }
        for buf in [
            &mut self.src,
            &mut self.dst,
            &mut self.lowpt,
            &mut self.lowpt2,
            &mut self.refs,
            &mut self.stack_bottom,
            &mut self.lowpt_edge,
        ] {
            buf.clear();
            buf.resize(m, NONE);
        }
        self.oriented.clear();
        self.oriented.resize(m, false);
        self.nesting.clear();
        self.nesting.resize(m, 0);
        self.side.clear();
        self.side.resize(m, 1);
        self.roots.clear();
        self.stack.clear();
        self.next_pair = 0;
    }

    fn orient_all(&mut self) {
        for v in 0..self.height.len() as u32 {
            if self.height[v as usize] == NONE {
                self.height[v as usize] = 0;
                self.roots.push(v);
                self.dfs_orientation(v);
            }
        }
    }

    fn dfs_orientation(&mut self, v: u32) {
        let vi = v as usize;
        let e = self.parent_edge[vi];
        for k in 0..self.adj[vi].len() {
            let (w, ei) = self.adj[vi][k];
            let eu = ei as usize;
            if self.oriented[eu] {
                continue;
            }
            self.oriented[eu] = true;
            self.src[eu] = v;
            self.dst[eu] = w;
            self.ordered_out[vi].push(ei);
            self.lowpt[eu] = self.height[vi];
            self.lowpt2[eu] = self.height[vi];
            if self.height[w as usize] == NONE {
                self.parent_edge[w as usize] = ei;
                self.height[w as usize] = self.height[vi] + 1;
                self.dfs_orientation(w);
            } else {
                self.lowpt[eu] = self.height[w as usize];
            }
            self.nesting[eu] = 2 * i64::from(self.lowpt[eu]);
            if self.lowpt2[eu] < self.height[vi] {
                self.nesting[eu] += 1;
            }
            if e != NONE {
                let pe = e as usize;
                if self.lowpt[eu] < self.lowpt[pe] {
                    self.lowpt2[pe] = self.lowpt[pe].min(self.lowpt2[eu]);
                    self.lowpt[pe] = self.lowpt[eu];
                } else if self.lowpt[eu] > self.lowpt[pe] {
                    self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt[eu]);
                } else {
                    self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt2[eu]);
                }
            }
        }
    }

    fn sort_out_edges(&mut self) {
        let nesting = &self.nesting;
        for out in &mut self.ordered_out {
            out.sort_by_key(|&e| nesting[e as usize]);
        }
    }

    fn top_id(&self) -> u32 {
        self.stack.last().map_or(NONE, |p| p.id)
    }

    fn push_pair(&mut self, left: Interval, right: Interval) {
        let id = self.next_pair;
        self.next_pair += 1;
        self.stack.push(ConflictPair { id, left, right });
    }

    fn conflicting(&self, i: &Interval, b: u32) -> bool {
        match i.high {
            Some(h) => self.lowpt[h as usize] > self.lowpt[b as usize],
            None => false,
        }
    }

    fn lowest(&self, p: &ConflictPair) -> u32 {
        let lp = |i: &Interval| i.low.map_or(u32::MAX, |l| self.lowpt[l as usize]);
        lp(&p.left).min(lp(&p.right))
    }

    fn dfs_testing(&mut self, v: u32) -> bool {
        let vi = v as usize;
        let e = self.parent_edge[vi];
        for k in 0..self.ordered_out[vi].len() {
            let ei = self.ordered_out[vi][k];
            let eu = ei as usize;
            let w = self.dst[eu];
            self.stack_bottom[eu] = self.top_id();
            if self.parent_edge[w as usize] == ei {
                if !self.dfs_testing(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[eu] = ei;
                self.push_pair(Interval::default(), Interval::single(ei));
            }
            if self.lowpt[eu] < self.height[vi] {
                if k == 0 {
                    self.lowpt_edge[e as usize] = self.lowpt_edge[eu];
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if e != NONE {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: u32, e: u32) -> bool {
        let mut p = ConflictPair {
            id: 0,
            left: Interval::default(),
            right: Interval::default(),
        };
        // merge return edges of ei into p.right
        loop {
            let Some(mut q) = self.stack.pop() else {
                return false;
            };
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let qlow = q.right.low.expect("non-empty interval");
            if self.lowpt[qlow as usize] > self.lowpt[e as usize] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.refs[p.right.low.unwrap() as usize] = q.right.high.unwrap_or(NONE);
                }
                p.right.low = q.right.low;
            } else {
                self.refs[qlow as usize] = self.lowpt_edge[e as usize];
            }
            if self.top_id() == self.stack_bottom[ei as usize] {
                break;
            }
        }
        // merge conflicting return edges of earlier siblings into p.left
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(l) = p.right.low {
                self.refs[l as usize] = q.right.high.unwrap_or(NONE);
            }
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else if let Some(l) = p.left.low {
                self.refs[l as usize] = q.left.high.unwrap_or(NONE);
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.push_pair(p.left, p.right);
        }
        true
    }

    fn remove_back_edges(&mut self, e: u32) {
        let u = self.src[e as usize];
        let hu = self.height[u as usize];
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != hu {
                break;
            }
            let p = self.stack.pop().unwrap();
            if let Some(l) = p.left.low {
                self.side[l as usize] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if self.dst[h as usize] != u {
                    break;
                }
                p.left.high = opt(self.refs[h as usize]);
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low {
                    self.refs[l as usize] = p.right.low.unwrap_or(NONE);
                    self.side[l as usize] = -1;
                    p.left.low = None;
                }
            }
            while let Some(h) = p.right.high {
                if self.dst[h as usize] != u {
                    break;
                }
                p.right.high = opt(self.refs[h as usize]);
            }
            if p.right.high.is_none() {
                if let Some(l) = p.right.low {
                    self.refs[l as usize] = p.left.low.unwrap_or(NONE);
                    self.side[l as usize] = -1;
                    p.right.low = None;
                }
            }
            self.stack.push(p);
        }
        if self.lowpt[e as usize] < hu {
            if let Some(top) = self.stack.last() {
                let (hl, hr) = (top.left.high, top.right.high);
                let pick = match (hl, hr) {
                    (Some(l), Some(r)) if self.lowpt[l as usize] > self.lowpt[r as usize] => {
                        Some(l)
                    }
                    (Some(l), None) => Some(l),
                    _ => hr,
                };
                self.refs[e as usize] = pick.unwrap_or(NONE);
            }
        }
    }

    fn sign(&mut self, e: u32) -> i8 {
        let mut chain = vec![e];
        let mut cur = e;
        while self.refs[cur as usize] != NONE {
            cur = self.refs[cur as usize];
            chain.push(cur);
        }
        for w in chain.windows(2).rev() {
            let (a, b) = (w[0] as usize, w[1] as usize);
            self.side[a] *= self.side[b];
            self.refs[a] = NONE;
        }
        self.side[e as usize]
    }

    fn dfs_embedding(&mut self, v: u32, emb: &mut Embedding) {
        let vi = v as usize;
        for k in 0..self.ordered_out[vi].len() {
            let ei = self.ordered_out[vi][k];
            let w = self.dst[ei as usize];
            if self.parent_edge[w as usize] == ei {
                emb.add_first(w, v);
                self.left_ref[vi] = w;
                self.right_ref[vi] = w;
                self.dfs_embedding(w, emb);
            } else if self.side[ei as usize] == 1 {
                emb.add_cw(w, v, Some(self.right_ref[w as usize]));
            } else {
                emb.add_ccw(w, v, Some(self.left_ref[w as usize]));
                self.left_ref[w as usize] = v;
            }
        }
    }
}

fn opt(x: u32) -> Option<u32> {
    (x != NONE).then_some(x)
}

/// Cyclic neighbour lists with a distinguished first neighbour.
struct Embedding {
    cw: HashMap<(u32, u32), u32>,
    ccw: HashMap<(u32, u32), u32>,
    first: Vec<u32>,
}

impl Embedding {
    fn new(n: usize) -> Self {
        Embedding {
            cw: HashMap::new(),
            ccw: HashMap::new(),
            first: vec![NONE; n],
        }
    }

    fn add_cw(&mut self, v: u32, w: u32, reference: Option<u32>) {
        match reference {
            None => {
                self.cw.insert((v, w), w);
                self.ccw.insert((v, w), w);
                self.first[v as usize] = w;
            }
            Some(r) => {
                let after = self.cw[&(v, r)];
                self.cw.insert((v, r), w);
                self.cw.insert((v, w), after);
                self.ccw.insert((v, after), w);
                self.ccw.insert((v, w), r);
            }
        }
    }

    fn add_ccw(&mut self, v: u32, w: u32, reference: Option<u32>) {
        match reference {
            None => self.add_cw(v, w, None),
            Some(r) => {
                let before = self.ccw[&(v, r)];
                self.add_cw(v, w, Some(before));
                if self.first[v as usize] == r {
                    self.first[v as usize] = w;
                }
            }
        }
    }

    fn add_first(&mut self, v: u32, w: u32) {
        let r = opt(self.first[v as usize]);
        self.add_ccw(v, w, r);
    }

    fn rotations(&self) -> Vec<Vec<u32>> {
        self.first
            .iter()
            .enumerate()
            .map(|(v, &f)| {
                let mut out = Vec::new();
                if f == NONE {
                    return out;
                }
                let mut cur = f;
                loop {
                    out.push(cur);
                    cur = self.cw[&(v as u32, cur)];
                    if cur == f {
                        break;
                    }
                }
                out
            })
            .collect()
    }
}
