//! Decomposition-lifting constructions.
//!
//! K_n □ P_m is turned into the chain graph G̃ by subdividing every path
//! edge and merging the subdivision vertices between layers j and j+1 into
//! a hub `w:j`. G̃ is a vertex-amalgamation of blocks: K_{n+1} at both ends
//! and K_{n+2} - e in the middle, the missing edge joining the two hubs of
//! the block. Planar decompositions of the blocks combine page by page into
//! one of G̃, and if every hub sees the two edges of each slot on the same
//! page, contracting the hub pairs back into path edges gives a planar
//! decomposition of K_n □ P_m with the same page count.
//!
//! Base decompositions map their non-hub vertices to slots 1..n in sorted
//! label order.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::decomposition::{Decomposition, DecompositionError, VerificationReport};
use crate::graph::{
    complete_path_product, edge, merge_vertices, subdivide_edge, vertex_amalgamation, Edge, Graph,
    GraphError, VertexId,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("base decomposition is not valid: {0}")]
    InvalidBase(String),
    #[error("hub {0} is not a vertex of the base host")]
    MissingHub(VertexId),
    #[error("base host is not {expected}")]
    WrongBaseHost { expected: String },
    #[error("hub {hub} slot {slot}: hub edges lie on pages {left:?} and {right:?}")]
    Pairing {
        hub: VertexId,
        slot: u32,
        left: Option<usize>,
        right: Option<usize>,
    },
    #[error("hub {hub} has neighbour {neighbor} without a partner on the other layer")]
    UnpairedNeighbor { hub: VertexId, neighbor: VertexId },
    #[error("no consistent page alignment across hub {hub}")]
    Unalignable { hub: VertexId },
    #[error("chain with m = {m} needs a middle base")]
    MissingMiddleBase { m: usize },
    #[error("host is not K_n x P_m: {0}")]
    NotProductHost(String),
    #[error("constructed decomposition failed verification: {0}")]
    InvalidOutput(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
}

type Result<T> = std::result::Result<T, ConstructionError>;

fn summarize(report: &VerificationReport) -> String {
    let planar = report.per_page_planar.iter().filter(|v| v.planar).count();
    format!(
        "partition_ok={} coverage_ok={} planar_pages={}/{} pairing_ok={:?}",
        report.partition_ok,
        report.coverage_ok,
        planar,
        report.per_page_planar.len(),
        report.pairing_ok
    )
}

fn checked_output(d: Decomposition) -> Result<Decomposition> {
    let report = d.verify();
    if report.is_valid() {
        Ok(d)
    } else {
        Err(ConstructionError::InvalidOutput(summarize(&report)))
    }
}

fn require_valid(d: &Decomposition) -> Result<()> {
    let report = d.verify();
    if report.is_valid() {
        Ok(())
    } else {
        Err(ConstructionError::InvalidBase(summarize(&report)))
    }
}

fn is_complete(g: &Graph) -> bool {
    let n = g.vertex_count();
    g.edge_count() == n * n.saturating_sub(1) / 2
}

/// A decomposition of K_{n+1} with a designated hub vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndBase {
    pub decomposition: Decomposition,
    pub hub: VertexId,
}

impl EndBase {
    pub fn new(decomposition: Decomposition, hub: VertexId) -> Result<Self> {
        let host = decomposition.host();
        if !host.contains_vertex(&hub) {
            return Err(ConstructionError::MissingHub(hub));
        }
        if !is_complete(host) {
            return Err(ConstructionError::WrongBaseHost {
                expected: format!("K_{}", host.vertex_count()),
            });
        }
        require_valid(&decomposition)?;
        Ok(EndBase { decomposition, hub })
    }

    /// Number of slots n (the host is K_{n+1}).
    pub fn n(&self) -> usize {
        self.decomposition.host().vertex_count() - 1
    }

    fn slots(&self) -> Vec<VertexId> {
        slot_vertices(self.decomposition.host(), &[&self.hub])
    }
}

/// A decomposition of K_{n+2} - ab with designated hubs a and b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MidBase {
    pub decomposition: Decomposition,
    pub a: VertexId,
    pub b: VertexId,
}

impl MidBase {
    pub fn new(decomposition: Decomposition, a: VertexId, b: VertexId) -> Result<Self> {
        let host = decomposition.host();
        for h in [&a, &b] {
            if !host.contains_vertex(h) {
                return Err(ConstructionError::MissingHub(h.clone()));
            }
        }
        let nv = host.vertex_count();
        let expected = || ConstructionError::WrongBaseHost {
            expected: format!("K_{nv} minus the hub-hub edge"),
        };
        if a == b || host.has_edge(&a, &b) || host.edge_count() + 1 != nv * (nv - 1) / 2 {
            return Err(expected());
        }
        require_valid(&decomposition)?;
        Ok(MidBase {
            decomposition,
            a,
            b,
        })
    }

    pub fn n(&self) -> usize {
        self.decomposition.host().vertex_count() - 2
    }

    /// Same decomposition with the roles of the hubs exchanged.
    pub fn reflected(&self) -> MidBase {
        MidBase {
            decomposition: self.decomposition.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// True if x-a and x-b share a page for every slot vertex x.
    pub fn is_hub_symmetric(&self) -> bool {
        let d = &self.decomposition;
        self.slots().into_iter().all(|x| {
            d.page_of(&edge(x.clone(), self.a.clone())) == d.page_of(&edge(x, self.b.clone()))
        })
    }

    /// End bases cut from this block: deleting b leaves K_{n+1} with hub a,
    /// deleting a leaves K_{n+1} with hub b.
    pub fn end_bases(&self) -> Result<(EndBase, EndBase)> {
        let host = self.decomposition.host();
        let without = |v: &VertexId| -> BTreeSet<VertexId> {
            host.vertices()
                .iter()
                .filter(|x| *x != v)
                .cloned()
                .collect()
        };
        let first = EndBase::new(
            self.decomposition.restrict(&without(&self.b))?,
            self.a.clone(),
        )?;
        let last = EndBase::new(
            self.decomposition.restrict(&without(&self.a))?,
            self.b.clone(),
        )?;
        Ok((first, last))
    }

    fn slots(&self) -> Vec<VertexId> {
        slot_vertices(self.decomposition.host(), &[&self.a, &self.b])
    }
}

fn slot_vertices(host: &Graph, hubs: &[&VertexId]) -> Vec<VertexId> {
    host.vertices()
        .iter()
        .filter(|v| !hubs.contains(v))
        .cloned()
        .collect()
}

/// Parameters and base decompositions for the m-block chain.
#[derive(Clone, Debug)]
pub struct ChainSpec {
    pub n: usize,
    pub m: usize,
    pub end_base: EndBase,
    /// Base for the last block; the first end base is reused when absent.
    pub last_base: Option<EndBase>,
    /// Required when m ≥ 3.
    pub mid_base: Option<MidBase>,
}

impl ChainSpec {
    pub fn validate(&self) -> Result<()> {
        let wrong = |what: &str| ConstructionError::WrongBaseHost {
            expected: what.to_string(),
        };
        if self.m == 0 || self.n == 0 {
            return Err(ConstructionError::NotProductHost(format!(
                "n = {}, m = {}",
                self.n, self.m
            )));
        }
        for base in std::iter::once(&self.end_base).chain(&self.last_base) {
            if base.n() != self.n {
                return Err(wrong(&format!("K_{} for the end blocks", self.n + 1)));
            }
        }
        match &self.mid_base {
            Some(mid) if mid.n() != self.n => Err(wrong(&format!(
                "K_{} - e for the middle blocks",
                self.n + 2
            ))),
            None if self.m >= 3 => Err(ConstructionError::MissingMiddleBase { m: self.m }),
            _ => Ok(()),
        }
    }
}

/// Lays each page of `d` next to a mirror copy of itself, glued at `hub`:
/// a decomposition of K_{n+1} ∨ K_{n+1} with the same page count. The
/// first copy is labelled on layer 1, the mirror on layer 2, slot by slot,
/// and the hub becomes `w:1`.
pub fn double_decomposition(d: &Decomposition, hub: &VertexId) -> Result<Decomposition> {
    let base = EndBase::new(d.clone(), hub.clone())?;
    let left = end_block(&base, 1, 1)?;
    let right = end_block(&base, 2, 1)?;
    let w = VertexId::hub(1);
    let host = vertex_amalgamation(left.host(), &w, right.host(), &w, w.clone())?;
    let pages = (0..d.page_count())
        .map(|i| -> Result<BTreeSet<Edge>> {
            let gl = left.page_graph(i);
            let gr = right.page_graph(i);
            let page = vertex_amalgamation(&gl, &w, &gr, &w, w.clone())?;
            Ok(page.edges().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    checked_output(Decomposition::new(host, pages))
}

/// Replaces each pair of hub edges (layer j, q)-w:j and (layer j+1, q)-w:j
/// by the path edge between the two layer vertices, on the page the pair
/// shares, and deletes the hub.
pub fn contract_hub(d: &Decomposition, hub: &VertexId) -> Result<Decomposition> {
    let host = d.host();
    if !host.contains_vertex(hub) || !hub.is_hub() {
        return Err(ConstructionError::MissingHub(hub.clone()));
    }
    let pairs = d.hub_pairs(hub);
    let paired: BTreeSet<&Edge> = pairs.iter().flat_map(|(_, l, r)| [l, r]).collect();
    if let Some(nb) = host
        .neighbors(hub)
        .into_iter()
        .find(|nb| !paired.contains(&edge(nb.clone(), hub.clone())))
    {
        return Err(ConstructionError::UnpairedNeighbor {
            hub: hub.clone(),
            neighbor: nb,
        });
    }
    let map = d.page_map();
    let mut pages: Vec<BTreeSet<Edge>> = d.pages().to_vec();
    let mut rungs = Vec::new();
    for (slot, l, r) in &pairs {
        let (pl, pr) = (map.get(l).copied(), map.get(r).copied());
        let page = match (pl, pr) {
            (Some(x), Some(y)) if x == y => x,
            _ => {
                return Err(ConstructionError::Pairing {
                    hub: hub.clone(),
                    slot: *slot,
                    left: pl,
                    right: pr,
                })
            }
        };
        let rung = edge(l.other(hub).unwrap().clone(), r.other(hub).unwrap().clone());
        pages[page].remove(l);
        pages[page].remove(r);
        pages[page].insert(rung.clone());
        rungs.push(rung);
    }
    let without_hub = crate::graph::delete_vertex(host, hub)?;
    let host = Graph::new(
        without_hub.vertices().iter().cloned(),
        without_hub.edges().iter().cloned().chain(rungs),
    )?;
    checked_output(Decomposition::new(host, pages))
}

/// Hub contraction for the two-layer case; the result must be a
/// decomposition of K_n □ P_2.
pub fn contract_hub_p2(d: &Decomposition, hub: &VertexId) -> Result<Decomposition> {
    let out = contract_hub(d, hub)?;
    let n = out.host().vertex_count() / 2;
    if n == 0 || *out.host() != complete_path_product(n, 2)? {
        return Err(ConstructionError::NotProductHost(format!(
            "expected K_{n} x P_2 after contracting {hub}"
        )));
    }
    Ok(out)
}

/// Page-wise union of two decompositions glued at `v1` ~ `v2`. The glued
/// vertex keeps the label `v1`. The shorter decomposition is padded with
/// empty pages, so the result has max(k1, k2) pages.
pub fn amalgamate_decompositions(
    d1: &Decomposition,
    v1: &VertexId,
    d2: &Decomposition,
    v2: &VertexId,
) -> Result<Decomposition> {
    require_valid(d1)?;
    require_valid(d2)?;
    let k = d1.page_count().max(d2.page_count());
    let (d1, d2) = (d1.padded(k), d2.padded(k));
    let host = vertex_amalgamation(d1.host(), v1, d2.host(), v2, v1.clone())?;
    let pages = (0..k)
        .map(|i| -> Result<BTreeSet<Edge>> {
            let g = vertex_amalgamation(&d1.page_graph(i), v1, &d2.page_graph(i), v2, v1.clone())?;
            Ok(g.edges().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    checked_output(Decomposition::new(host, pages))
}

/// G̃ for K_n □ P_m: every path edge subdivided, the subdivision vertices
/// between layers j and j+1 merged into `w:j`.
pub fn build_chain_graph(n: usize, m: usize) -> Result<Graph> {
    let product = complete_path_product(n, m)?;
    subdivide_and_merge(&product, n, m)
}

fn subdivision_label(j: u32, q: u32) -> VertexId {
    VertexId::plain(format!("s{j}_{q}"))
}

fn subdivide_and_merge(product: &Graph, n: usize, m: usize) -> Result<Graph> {
    let mut g = product.clone();
    for j in 1..m as u32 {
        for q in 1..=n as u32 {
            let path_edge = edge(VertexId::layer(j, q), VertexId::layer(j + 1, q));
            g = subdivide_edge(&g, &path_edge, subdivision_label(j, q))?;
        }
        let group = (1..=n as u32).map(|q| subdivision_label(j, q)).collect();
        g = merge_vertices(&g, &group, VertexId::hub(j))?;
    }
    Ok(g)
}

/// Infers (n, m) from a `Layer`-labelled host.
fn layer_shape(host: &Graph) -> Option<(usize, usize)> {
    let mut n = 0;
    let mut m = 0;
    for v in host.vertices() {
        if let VertexId::Layer { layer, slot } = v {
            m = m.max(*layer as usize);
            n = n.max(*slot as usize);
        }
    }
    (n > 0 && m > 0).then_some((n, m))
}

/// Inverse of [`contract_chain`]: splits every path edge of a K_n □ P_m
/// decomposition through its hub, keeping each half on the edge's page.
pub fn lift_to_chain(d: &Decomposition) -> Result<Decomposition> {
    let (n, m) = layer_shape(d.host())
        .ok_or_else(|| ConstructionError::NotProductHost("no layer vertices".into()))?;
    if *d.host() != complete_path_product(n, m)? {
        return Err(ConstructionError::NotProductHost(format!(
            "host differs from K_{n} x P_{m}"
        )));
    }
    let host = subdivide_and_merge(d.host(), n, m)?;
    let split = |e: &Edge| -> Vec<Edge> {
        let (a, b) = e.endpoints();
        match (a, b) {
            (
                VertexId::Layer {
                    layer: l1,
                    slot: s1,
                },
                VertexId::Layer {
                    layer: l2,
                    slot: s2,
                },
            ) if s1 == s2 && l2 == &(l1 + 1) => {
                let w = VertexId::hub(*l1);
                vec![edge(a.clone(), w.clone()), edge(b.clone(), w)]
            }
            _ => vec![e.clone()],
        }
    };
    let pages = d
        .pages()
        .iter()
        .map(|p| p.iter().flat_map(split).collect())
        .collect();
    checked_output(Decomposition::new(host, pages))
}

fn end_block(base: &EndBase, layer: u32, hub: u32) -> Result<Decomposition> {
    let mut map = BTreeMap::from([(base.hub.clone(), VertexId::hub(hub))]);
    for (q, x) in base.slots().into_iter().enumerate() {
        map.insert(x, VertexId::layer(layer, q as u32 + 1));
    }
    Ok(base.decomposition.relabel(&map)?)
}

fn mid_block(base: &MidBase, layer: u32) -> Result<Decomposition> {
    let mut map = BTreeMap::from([
        (base.a.clone(), VertexId::hub(layer - 1)),
        (base.b.clone(), VertexId::hub(layer)),
    ]);
    for (q, x) in base.slots().into_iter().enumerate() {
        map.insert(x, VertexId::layer(layer, q as u32 + 1));
    }
    Ok(base.decomposition.relabel(&map)?)
}

/// How one block of the chain was realised.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockChoice {
    /// Index into the candidate list of the block: for end blocks 0 is the
    /// preferred end base, for middle blocks 0 is the middle base as given
    /// and 1 its reflection.
    pub candidate: usize,
    /// Page `i` of the block goes to page `permutation[i]` of the chain.
    pub permutation: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ChainDecomposition {
    pub decomposition: Decomposition,
    pub blocks: Vec<BlockChoice>,
}

impl ChainDecomposition {
    /// True if every block uses its first candidate with identity pages.
    pub fn is_identity_aligned(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.candidate == 0 && b.permutation.iter().enumerate().all(|(i, &p)| i == p))
    }
}

/// Candidate relabelled block decompositions for block `j` (1-based).
fn block_candidates(spec: &ChainSpec, j: usize) -> Result<Vec<Decomposition>> {
    let m = spec.m;
    let j32 = j as u32;
    if j == 1 {
        let mut out = vec![end_block(&spec.end_base, 1, 1)?];
        if let Some(last) = &spec.last_base {
            out.push(end_block(last, 1, 1)?);
        }
        Ok(out)
    } else if j == m {
        let mut out = Vec::new();
        if let Some(last) = &spec.last_base {
            out.push(end_block(last, j32, j32 - 1)?);
        }
        out.push(end_block(&spec.end_base, j32, j32 - 1)?);
        Ok(out)
    } else {
        let mid = spec
            .mid_base
            .as_ref()
            .ok_or(ConstructionError::MissingMiddleBase { m })?;
        Ok(vec![
            mid_block(mid, j32)?,
            mid_block(&mid.reflected(), j32)?,
        ])
    }
}

/// Page of each slot's hub edge at `hub`, indexed by slot.
fn hub_pages(d: &Decomposition, hub: &VertexId, n: usize) -> Vec<Option<usize>> {
    let map = d.page_map();
    let mut pages = vec![None; n + 1];
    for nb in d.host().neighbors(hub) {
        if let VertexId::Layer { slot, .. } = nb {
            pages[slot as usize] = map.get(&edge(nb.clone(), hub.clone())).copied();
        }
    }
    pages
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for i in 0..k {
            if !prefix.contains(&i) {
                prefix.push(i);
                go(prefix, k, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(k), k, &mut out);
    out
}

/// Decomposition of G̃ assembled block by block.
///
/// Each block picks one of its candidate bases and a page permutation so
/// that at every hub the two edges of each slot land on the same chain
/// page. The identity choice is tried first, so a hub-symmetric middle
/// base reused in every middle block needs no search. Otherwise middle
/// blocks may be reflected and pages permuted; a middle base alternating
/// with its reflection always lines up, given end bases cut from it.
pub fn chain_decomposition(spec: &ChainSpec) -> Result<ChainDecomposition> {
    spec.validate()?;
    let (n, m) = (spec.n, spec.m);
    if m == 1 {
        let base = &spec.end_base;
        let keep = slot_vertices(base.decomposition.host(), &[&base.hub])
            .into_iter()
            .collect();
        let d = EndBase {
            decomposition: base.decomposition.restrict(&keep)?,
            hub: base.hub.clone(),
        };
        let mut map = BTreeMap::new();
        for (q, x) in d.decomposition.host().vertices().iter().enumerate() {
            map.insert(x.clone(), VertexId::layer(1, q as u32 + 1));
        }
        let decomposition = checked_output(d.decomposition.relabel(&map)?)?;
        let k = decomposition.page_count();
        return Ok(ChainDecomposition {
            decomposition,
            blocks: vec![BlockChoice {
                candidate: 0,
                permutation: (0..k).collect(),
            }],
        });
    }

    let candidates: Vec<Vec<Decomposition>> = (1..=m)
        .map(|j| block_candidates(spec, j))
        .collect::<Result<_>>()?;
    let k = candidates
        .iter()
        .flatten()
        .map(Decomposition::page_count)
        .max()
        .unwrap_or(1);
    let candidates: Vec<Vec<Decomposition>> = candidates
        .into_iter()
        .map(|cs| cs.into_iter().map(|d| d.padded(k)).collect())
        .collect();
    // hub pages on the left (index 0) and right (index 1) of every candidate
    let sides: Vec<Vec<[Vec<Option<usize>>; 2]>> = candidates
        .iter()
        .enumerate()
        .map(|(idx, cs)| {
            let j = idx as u32 + 1;
            cs.iter()
                .map(|d| {
                    let left = if j > 1 {
                        hub_pages(d, &VertexId::hub(j - 1), n)
                    } else {
                        Vec::new()
                    };
                    let right = if (j as usize) < m {
                        hub_pages(d, &VertexId::hub(j), n)
                    } else {
                        Vec::new()
                    };
                    [left, right]
                })
                .collect()
        })
        .collect();
    let perms = permutations(k);

    let mut choices: Vec<(usize, usize)> = Vec::with_capacity(m);
    let mut deepest = 0;
    let mut steps = 0u64;
    fn aligned(
        right: &[Option<usize>],
        pr: &[usize],
        left: &[Option<usize>],
        pl: &[usize],
    ) -> bool {
        right.iter().zip(left).all(|(r, l)| match (r, l) {
            (Some(r), Some(l)) => pr[*r] == pl[*l],
            (None, None) => true,
            _ => false,
        })
    }
    #[allow(clippy::too_many_arguments)]
    fn extend(
        block: usize,
        m: usize,
        sides: &[Vec<[Vec<Option<usize>>; 2]>],
        perms: &[Vec<usize>],
        choices: &mut Vec<(usize, usize)>,
        deepest: &mut usize,
        steps: &mut u64,
    ) -> bool {
        if block == m {
            return true;
        }
        *deepest = (*deepest).max(block);
        *steps += 1;
        if *steps > 1_000_000 {
            return false;
        }
        // the first block fixes the page naming
        let perm_range = if block == 0 { 0..1 } else { 0..perms.len() };
        for c in 0..sides[block].len() {
            for p in perm_range.clone() {
                if block > 0 {
                    let (pc, pp) = choices[block - 1];
                    if !aligned(
                        &sides[block - 1][pc][1],
                        &perms[pp],
                        &sides[block][c][0],
                        &perms[p],
                    ) {
                        continue;
                    }
                }
                choices.push((c, p));
                if extend(block + 1, m, sides, perms, choices, deepest, steps) {
                    return true;
                }
                choices.pop();
            }
        }
        false
    }
    if !extend(0, m, &sides, &perms, &mut choices, &mut deepest, &mut steps) {
        return Err(ConstructionError::Unalignable {
            hub: VertexId::hub(deepest.max(1) as u32),
        });
    }

    let mut blocks = Vec::with_capacity(m);
    let mut acc: Option<Decomposition> = None;
    for (idx, &(c, p)) in choices.iter().enumerate() {
        let block = candidates[idx][c].permute_pages(&perms[p])?;
        acc = Some(match acc {
            None => block,
            Some(prev) => {
                let w = VertexId::hub(idx as u32);
                amalgamate_decompositions(&prev, &w, &block, &w)?
            }
        });
        blocks.push(BlockChoice {
            candidate: c,
            permutation: perms[p].clone(),
        });
    }
    let decomposition = checked_output(acc.expect("m >= 2 blocks"))?;
    if *decomposition.host() != build_chain_graph(n, m)? {
        return Err(ConstructionError::InvalidOutput(
            "assembled host differs from the chain graph".into(),
        ));
    }
    Ok(ChainDecomposition {
        decomposition,
        blocks,
    })
}

/// Contracts every hub of a G̃ decomposition: a decomposition of
/// K_n □ P_m with the same page count.
pub fn contract_chain(d: &Decomposition) -> Result<Decomposition> {
    let hubs: Vec<VertexId> = d
        .host()
        .vertices()
        .iter()
        .filter(|v| v.is_hub())
        .cloned()
        .collect();
    // report the first pairing violation before rewriting anything
    if let Some(v) = d.pairing_violations().into_iter().next() {
        return Err(ConstructionError::Pairing {
            hub: v.hub,
            slot: v.slot,
            left: v.pages.0,
            right: v.pages.1,
        });
    }
    let mut out = d.clone();
    for hub in &hubs {
        out = contract_hub(&out, hub)?;
    }
    let (n, m) = layer_shape(out.host())
        .ok_or_else(|| ConstructionError::NotProductHost("no layer vertices".into()))?;
    if *out.host() != complete_path_product(n, m)? {
        return Err(ConstructionError::NotProductHost(format!(
            "contracted host differs from K_{n} x P_{m}"
        )));
    }
    Ok(out)
}
