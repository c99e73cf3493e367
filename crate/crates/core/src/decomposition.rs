//! Planar decompositions: a host graph plus an ordered list of pages, each
//! page an edge set of a spanning subgraph.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError, VertexId};
use crate::planarity::{planarity, PlanarityVerdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("cannot restrict to an empty vertex set")]
    EmptySubset,
    #[error("vertex {0} is not in the host graph")]
    UnknownVertex(VertexId),
    #[error("{0:?} is not a permutation of the page indices")]
    BadPermutation(Vec<usize>),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    host: Graph,
    pages: Vec<BTreeSet<Edge>>,
}

/// The two hub edges of one slot are on different pages (or one is missing).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingViolation {
    pub hub: VertexId,
    pub slot: u32,
    pub pages: (Option<usize>, Option<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    /// No edge appears on two pages.
    pub partition_ok: bool,
    /// The pages together hold exactly the host's edges.
    pub coverage_ok: bool,
    pub per_page_planar: Vec<PlanarityVerdict>,
    /// `None` when the host has no hub with edges on both sides.
    pub pairing_ok: Option<bool>,
    pub duplicated: Vec<(Edge, Vec<usize>)>,
    pub missing: Vec<Edge>,
    pub foreign: Vec<(usize, Edge)>,
    pub pairing_violations: Vec<PairingViolation>,
}

impl VerificationReport {
    pub fn all_pages_planar(&self) -> bool {
        self.per_page_planar.iter().all(|v| v.planar)
    }

    pub fn is_valid(&self) -> bool {
        self.partition_ok
            && self.coverage_ok
            && self.all_pages_planar()
            && self.pairing_ok != Some(false)
    }
}

impl Decomposition {
    /// Pages are taken as given; call [`Decomposition::verify`] to check them.
    /// An empty page list becomes a single empty page.
    pub fn new(host: Graph, mut pages: Vec<BTreeSet<Edge>>) -> Self {
        if pages.is_empty() {
            pages.push(BTreeSet::new());
        }
        Decomposition { host, pages }
    }

    pub fn single_page(host: Graph) -> Self {
        let page = host.edges().clone();
        Decomposition::new(host, vec![page])
    }

    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn pages(&self) -> &[BTreeSet<Edge>] {
        &self.pages
    }

    pub fn page_count(&self) -> usize {
        self.pages.len()
    }

    /// Page holding `e`, or the first one if (invalidly) there are several.
    pub fn page_of(&self, e: &Edge) -> Option<usize> {
        self.pages.iter().position(|p| p.contains(e))
    }

    /// Map from every paged edge to its page.
    pub fn page_map(&self) -> BTreeMap<&Edge, usize> {
        let mut map = BTreeMap::new();
        for (i, page) in self.pages.iter().enumerate() {
            for e in page {
                map.entry(e).or_insert(i);
            }
        }
        map
    }

    /// Page `i` as a spanning subgraph of the host. Edges with endpoints
    /// outside the host bring those endpoints along.
    pub fn page_graph(&self, i: usize) -> Graph {
        let mut vertices = self.host.vertices().clone();
        for e in &self.pages[i] {
            let (a, b) = e.endpoints();
            vertices.insert(a.clone());
            vertices.insert(b.clone());
        }
        Graph::new(vertices, self.pages[i].iter().cloned()).expect("endpoints were added")
    }

    pub fn verify(&self) -> VerificationReport {
        let mut seen: BTreeMap<&Edge, Vec<usize>> = BTreeMap::new();
        let mut foreign = Vec::new();
        for (i, page) in self.pages.iter().enumerate() {
            for e in page {
                seen.entry(e).or_default().push(i);
                if !self.host.contains_edge(e) {
                    foreign.push((i, e.clone()));
                }
            }
        }
        let duplicated: Vec<(Edge, Vec<usize>)> = seen
            .iter()
            .filter(|(_, pages)| pages.len() > 1)
            .map(|(e, pages)| ((*e).clone(), pages.clone()))
            .collect();
        let missing: Vec<Edge> = self
            .host
            .edges()
            .iter()
            .filter(|e| !seen.contains_key(e))
            .cloned()
            .collect();
        let per_page_planar = (0..self.pages.len())
            .into_par_iter()
            .map(|i| planarity(&self.page_graph(i), true))
            .collect();
        let pairing_violations = self.pairing_violations();
        let pairing_ok = self
            .has_hub_pairs()
            .then_some(pairing_violations.is_empty());
        VerificationReport {
            partition_ok: duplicated.is_empty(),
            coverage_ok: missing.is_empty() && foreign.is_empty(),
            per_page_planar,
            pairing_ok,
            duplicated,
            missing,
            foreign,
            pairing_violations,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.verify().is_valid()
    }

    /// (slot, left edge, right edge) for every slot of `hub` that has a
    /// neighbour on both adjacent layers.
    pub(crate) fn hub_pairs(&self, hub: &VertexId) -> Vec<(u32, Edge, Edge)> {
        let VertexId::Hub { position: j } = *hub else {
            return Vec::new();
        };
        let mut left: BTreeMap<u32, VertexId> = BTreeMap::new();
        let mut right: BTreeMap<u32, VertexId> = BTreeMap::new();
        for v in self.host.neighbors(hub) {
            if let VertexId::Layer { layer, slot } = v {
                if layer == j {
                    left.insert(slot, v);
                } else if layer == j + 1 {
                    right.insert(slot, v);
                }
            }
        }
        left.into_iter()
            .filter_map(|(q, l)| {
                let r = right.get(&q)?;
                Some((
                    q,
                    Edge::new(l, hub.clone()).ok()?,
                    Edge::new(r.clone(), hub.clone()).ok()?,
                ))
            })
            .collect()
    }

    fn hubs(&self) -> impl Iterator<Item = &VertexId> {
        self.host.vertices().iter().filter(|v| v.is_hub())
    }

    fn has_hub_pairs(&self) -> bool {
        self.hubs().any(|h| !self.hub_pairs(h).is_empty())
    }

    pub fn pairing_violations(&self) -> Vec<PairingViolation> {
        let map = self.page_map();
        let mut out = Vec::new();
        for hub in self.hubs() {
            for (slot, l, r) in self.hub_pairs(hub) {
                let pages = (map.get(&l).copied(), map.get(&r).copied());
                if pages.0.is_none() || pages.0 != pages.1 {
                    out.push(PairingViolation {
                        hub: hub.clone(),
                        slot,
                        pages,
                    });
                }
            }
        }
        out
    }

    /// Keeps the vertices in `keep` and the page edges among them. Page
    /// order is preserved.
    pub fn restrict(&self, keep: &BTreeSet<VertexId>) -> Result<Decomposition, DecompositionError> {
        if keep.is_empty() {
            return Err(DecompositionError::EmptySubset);
        }
        if let Some(v) = keep.iter().find(|v| !self.host.contains_vertex(v)) {
            return Err(DecompositionError::UnknownVertex(v.clone()));
        }
        let host = self.host.induced(keep);
        let pages = self
            .pages
            .iter()
            .map(|p| {
                p.iter()
                    .filter(|e| {
                        let (a, b) = e.endpoints();
                        keep.contains(a) && keep.contains(b)
                    })
                    .cloned()
                    .collect()
            })
            .collect();
        Ok(Decomposition::new(host, pages))
    }

    /// Renames vertices in the host and on every page.
    pub fn relabel(
        &self,
        map: &BTreeMap<VertexId, VertexId>,
    ) -> Result<Decomposition, DecompositionError> {
        let host = self.host.relabel(map)?;
        let rename = |v: &VertexId| map.get(v).cloned().unwrap_or_else(|| v.clone());
        let pages = self
            .pages
            .iter()
            .map(|p| p.iter().map(|e| e.map(rename)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        Ok(Decomposition::new(host, pages))
    }

    /// New decomposition whose page `perm[i]` is this decomposition's page `i`.
    pub fn permute_pages(&self, perm: &[usize]) -> Result<Decomposition, DecompositionError> {
        let k = self.pages.len();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..k).collect::<Vec<_>>() {
            return Err(DecompositionError::BadPermutation(perm.to_vec()));
        }
        let mut pages = vec![BTreeSet::new(); k];
        for (i, page) in self.pages.iter().enumerate() {
            pages[perm[i]] = page.clone();
        }
        Ok(Decomposition::new(self.host.clone(), pages))
    }

    /// Appends empty pages up to `k` pages.
    pub fn padded(&self, k: usize) -> Decomposition {
        let mut pages = self.pages.clone();
        while pages.len() < k {
            pages.push(BTreeSet::new());
        }
        Decomposition::new(self.host.clone(), pages)
    }
}
