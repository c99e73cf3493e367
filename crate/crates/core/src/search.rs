//! Exhaustive search for planar decompositions of small graphs.
//!
//! Edges are assigned to pages one at a time in a fixed order. A branch is
//! cut as soon as a page stops being planar, a page exceeds the Euler edge
//! cap, or the remaining capacity of all pages cannot hold the remaining
//! edges. Page indices are introduced in order, so page permutations are
//! never explored twice. Every reported decomposition is re-verified with
//! [`Decomposition::verify`] before it is returned.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::bounds::{euler_lower_bound, Provenance, ThicknessBound};
use crate::decomposition::Decomposition;
use crate::graph::{DenseGraph, Edge, Graph, VertexId};
use crate::planarity::{euler_edge_cap, LrPlanarity};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
    pub max_duration: Option<Duration>,
    /// Sequential search with a fixed branch order. Parallel search may
    /// return a different certificate on each run.
    pub deterministic_order: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: None,
            max_duration: None,
            deterministic_order: true,
        }
    }
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn seconds(s: f64) -> Self {
        SearchBudget {
            max_duration: Some(Duration::from_secs_f64(s)),
            ..Self::default()
        }
    }

    pub fn nodes(n: u64) -> Self {
        SearchBudget {
            max_nodes: Some(n),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum SearchConstraint {
    #[default]
    None,
    /// For every vertex x adjacent to both hubs, x-a and x-b share a page.
    HubSymmetric { a: VertexId, b: VertexId },
    /// `edge` must lie on page `page` (0-based).
    PinnedPage { edge: Edge, page: usize },
}

impl SearchConstraint {
    /// Independent check of a finished decomposition.
    pub fn is_satisfied_by(&self, d: &Decomposition) -> bool {
        match self {
            SearchConstraint::None => true,
            SearchConstraint::HubSymmetric { a, b } => {
                let host = d.host();
                host.vertices().iter().all(|x| {
                    if !(host.has_edge(x, a) && host.has_edge(x, b)) {
                        return true;
                    }
                    let ea = Edge::new(x.clone(), a.clone()).unwrap();
                    let eb = Edge::new(x.clone(), b.clone()).unwrap();
                    d.page_of(&ea) == d.page_of(&eb)
                })
            }
            SearchConstraint::PinnedPage { edge, page } => d.page_of(edge) == Some(*page),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Decomposition),
    /// The complete search space was explored; no decomposition exists.
    Exhausted,
    /// The budget ran out first.
    Inconclusive,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&Decomposition> {
        match self {
            SearchOutcome::Found(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub outcome: SearchOutcome,
    pub nodes: u64,
    pub elapsed: Duration,
}

/// Search knobs that do not change the answer.
#[derive(Clone, Debug, Default)]
pub struct SearchTuning {
    /// Test planarity after every `j` assignments. `None` picks 1 for
    /// graphs with at most 25 edges and 3 above.
    pub planarity_interval: Option<usize>,
}

/// Looks for a `k`-page planar decomposition of `g` satisfying `constraint`.
pub fn find_decomposition(
    g: &Graph,
    k: usize,
    constraint: &SearchConstraint,
    budget: &SearchBudget,
) -> SearchReport {
    find_decomposition_with(g, k, constraint, budget, &SearchTuning::default())
}

pub fn find_decomposition_with(
    g: &Graph,
    k: usize,
    constraint: &SearchConstraint,
    budget: &SearchBudget,
    tuning: &SearchTuning,
) -> SearchReport {
    let start = Instant::now();
    let limits = Limits::new(budget, start);
    let (outcome, nodes) = run(g, k, constraint, budget, tuning, &limits);
    if let SearchOutcome::Found(d) = &outcome {
        assert!(
            d.is_valid() && constraint.is_satisfied_by(d) && d.page_count() == k,
            "search produced an invalid certificate"
        );
    }
    SearchReport {
        outcome,
        nodes,
        elapsed: start.elapsed(),
    }
}

/// Result of [`exact_thickness`]: the settled value or an interval, with
/// the best decomposition found.
#[derive(Clone, Debug)]
pub struct ThicknessSearch {
    pub bound: ThicknessBound,
    pub certificate: Decomposition,
    pub nodes: u64,
}

/// Thickness by search: starts at the Euler lower bound and increases `k`
/// until a decomposition is found. A greedy decomposition provides the
/// initial upper bound, so a certificate always exists.
pub fn exact_thickness(g: &Graph, budget: &SearchBudget) -> ThicknessSearch {
    let start = Instant::now();
    let mut lo = euler_lower_bound(g);
    let mut certificate = greedy_decomposition(g);
    let mut hi = certificate.page_count().max(lo);
    let mut nodes = 0;
    let limits = Limits::new(budget, start);
    let tuning = SearchTuning::default();
    let greedy_pages = hi;
    for k in lo..greedy_pages {
        let (outcome, used) = run(g, k, &SearchConstraint::None, budget, &tuning, &limits);
        nodes += used;
        match outcome {
            SearchOutcome::Found(d) => {
                assert!(d.is_valid(), "search produced an invalid certificate");
                hi = k;
                certificate = d;
                break;
            }
            SearchOutcome::Exhausted => lo = k + 1,
            SearchOutcome::Inconclusive => break,
        }
    }
    if certificate.page_count() < hi {
        certificate = certificate.padded(hi);
    }
    ThicknessSearch {
        bound: ThicknessBound {
            lo,
            hi,
            provenance: Provenance::SearchCertificate,
        },
        certificate,
        nodes,
    }
}

/// First-fit decomposition in edge order. Always valid, rarely optimal.
pub fn greedy_decomposition(g: &Graph) -> Decomposition {
    let dense = g.to_dense();
    let mut lr = LrPlanarity::default();
    let mut pages: Vec<Vec<(u32, u32)>> = Vec::new();
    for &e in &dense.edges {
        let mut placed = false;
        for page in pages.iter_mut() {
            page.push(e);
            if lr.test(dense.n, page) {
                placed = true;
                break;
            }
            page.pop();
        }
        if !placed {
            pages.push(vec![e]);
        }
    }
    to_decomposition(g, &dense, &pages)
}

fn to_decomposition(g: &Graph, dense: &DenseGraph, pages: &[Vec<(u32, u32)>]) -> Decomposition {
    let pages = pages
        .iter()
        .map(|p| {
            p.iter()
                .map(|&e| dense.edge_label(e))
                .collect::<BTreeSet<_>>()
        })
        .collect();
    Decomposition::new(g.clone(), pages)
}

struct Limits {
    max_nodes: Option<u64>,
    deadline: Option<Instant>,
    nodes: AtomicU64,
    stop: AtomicBool,
}

impl Limits {
    fn new(budget: &SearchBudget, start: Instant) -> Self {
        Limits {
            max_nodes: budget.max_nodes,
            deadline: budget.max_duration.map(|d| start + d),
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
        }
    }

    /// Adds `n` nodes; false once the budget is spent.
    fn charge(&self, n: u64) -> bool {
        let total = self.nodes.fetch_add(n, Ordering::Relaxed) + n;
        let over = self.max_nodes.is_some_and(|m| total > m)
            || self.deadline.is_some_and(|d| Instant::now() >= d);
        !over
    }
}

/// One unit of assignment: a single edge, or the two hub edges of a slot
/// under the hub-symmetric constraint.
#[derive(Clone, Debug)]
struct Group {
    edges: Vec<(u32, u32)>,
    pinned: Option<usize>,
}

struct Problem {
    n: usize,
    k: usize,
    cap: usize,
    groups: Vec<Group>,
    /// Edges still unassigned after group `i` is placed.
    remaining_after: Vec<usize>,
    interval: usize,
    break_symmetry: bool,
}

enum Step {
    Found(Vec<Vec<(u32, u32)>>),
    Exhausted,
    Aborted,
}

fn run(
    g: &Graph,
    k: usize,
    constraint: &SearchConstraint,
    budget: &SearchBudget,
    tuning: &SearchTuning,
    limits: &Limits,
) -> (SearchOutcome, u64) {
    let before = limits.nodes.load(Ordering::Relaxed);
    let dense = g.to_dense();
    let Some(problem) = Problem::build(&dense, k, constraint, tuning) else {
        return (SearchOutcome::Exhausted, 0);
    };
    let step = if budget.deterministic_order {
        let mut state = State::new(&problem);
        let step = state.dfs(&problem, 0, limits);
        state.flush(limits);
        step
    } else {
        parallel_search(&problem, limits)
    };
    let used = limits.nodes.load(Ordering::Relaxed) - before;
    let outcome = match step {
        Step::Found(pages) => SearchOutcome::Found(to_decomposition(g, &dense, &pages)),
        Step::Exhausted => SearchOutcome::Exhausted,
        Step::Aborted => SearchOutcome::Inconclusive,
    };
    (outcome, used)
}

/// Vertex order for edge ordering: repeatedly take the vertex with the most
/// neighbours among those already taken, ties by degree then index, so
/// dense subgraphs close early and planarity failures surface near the root.
fn vertex_order(dense: &DenseGraph) -> Vec<u32> {
    let n = dense.n;
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &dense.edges {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    let mut taken = vec![false; n];
    let mut back = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&v| !taken[v])
            .max_by_key(|&v| (back[v], adj[v].len(), std::cmp::Reverse(v)))
            .unwrap();
        taken[next] = true;
        order.push(next as u32);
        for &w in &adj[next] {
            back[w as usize] += 1;
        }
    }
    order
}

impl Problem {
    /// `None` when the constraint cannot be met at all.
    fn build(
        dense: &DenseGraph,
        k: usize,
        constraint: &SearchConstraint,
        tuning: &SearchTuning,
    ) -> Option<Problem> {
        if k == 0 {
            return None;
        }
        let order = vertex_order(dense);
        let mut rank = vec![0usize; dense.n];
        for (i, &v) in order.iter().enumerate() {
            rank[v as usize] = i;
        }
        let key = |&(u, v): &(u32, u32)| {
            let (a, b) = (rank[u as usize], rank[v as usize]);
            (a.max(b), a.min(b))
        };

        let mut grouped = vec![false; dense.edges.len()];
        let mut groups: Vec<Group> = Vec::new();
        let index_of = |e: (u32, u32)| dense.edges.iter().position(|&f| f == e || f == (e.1, e.0));
        match constraint {
            SearchConstraint::None => {}
            SearchConstraint::HubSymmetric { a, b } => {
                if let (Some(a), Some(b)) = (dense.index_of(a), dense.index_of(b)) {
                    for x in 0..dense.n as u32 {
                        if let (Some(i), Some(j)) = (index_of((x, a)), index_of((x, b))) {
                            grouped[i] = true;
                            grouped[j] = true;
                            groups.push(Group {
                                edges: vec![dense.edges[i], dense.edges[j]],
                                pinned: None,
                            });
                        }
                    }
                }
            }
            SearchConstraint::PinnedPage { edge, page } => {
                if *page >= k {
                    return None;
                }
                let (a, b) = edge.endpoints();
                let i = index_of((dense.index_of(a)?, dense.index_of(b)?))?;
                grouped[i] = true;
                groups.push(Group {
                    edges: vec![dense.edges[i]],
                    pinned: Some(*page),
                });
            }
        }
        for (i, &e) in dense.edges.iter().enumerate() {
            if !grouped[i] {
                groups.push(Group {
                    edges: vec![e],
                    pinned: None,
                });
            }
        }
        // pinned groups first, then by when their last endpoint appears
        groups.sort_by_key(|grp| {
            let last = grp.edges.iter().map(key).max().unwrap();
            (grp.pinned.is_none(), last)
        });
        let total: usize = groups.iter().map(|g| g.edges.len()).sum();
        let mut remaining_after = Vec::with_capacity(groups.len());
        let mut left = total;
        for grp in &groups {
            left -= grp.edges.len();
            remaining_after.push(left);
        }
        let interval = tuning
            .planarity_interval
            .unwrap_or(if total <= 25 { 1 } else { 3 })
            .max(1);
        Some(Problem {
            n: dense.n,
            k,
            cap: euler_edge_cap(dense.n.max(1)).unwrap(),
            groups,
            remaining_after,
            interval,
            break_symmetry: !matches!(constraint, SearchConstraint::PinnedPage { .. }),
        })
    }
}

struct State {
    pages: Vec<Vec<(u32, u32)>>,
    dirty: Vec<bool>,
    used: usize,
    lr: LrPlanarity,
    local_nodes: u64,
}

const CHARGE_EVERY: u64 = 256;

impl State {
    fn new(problem: &Problem) -> Self {
        State {
            pages: vec![Vec::new(); problem.k],
            dirty: vec![false; problem.k],
            used: 0,
            lr: LrPlanarity::default(),
            local_nodes: 0,
        }
    }

    fn free_capacity(&self, cap: usize) -> usize {
        self.pages.iter().map(|p| cap.saturating_sub(p.len())).sum()
    }

    /// Pages `group` may go to at this point.
    fn candidates(&self, problem: &Problem, group: &Group) -> std::ops::Range<usize> {
        if let Some(p) = group.pinned {
            return p..p + 1;
        }
        let top = if problem.break_symmetry {
            (self.used + 1).min(problem.k)
        } else {
            problem.k
        };
        0..top
    }

    fn place(&mut self, group: &Group, page: usize) -> (bool, usize) {
        self.pages[page].extend_from_slice(&group.edges);
        let was_dirty = self.dirty[page];
        self.dirty[page] = true;
        let prev_used = self.used;
        self.used = self.used.max(page + 1);
        (was_dirty, prev_used)
    }

    fn unplace(&mut self, group: &Group, page: usize, was_dirty: bool, prev_used: usize) {
        let len = self.pages[page].len() - group.edges.len();
        self.pages[page].truncate(len);
        self.dirty[page] = was_dirty;
        self.used = prev_used;
    }

    /// Tests every dirty page; clean pages are known planar.
    fn dirty_pages_planar(&mut self, n: usize) -> bool {
        for p in 0..self.pages.len() {
            if self.dirty[p] {
                if !self.lr.test(n, &self.pages[p]) {
                    return false;
                }
                self.dirty[p] = false;
            }
        }
        true
    }

    fn dfs(&mut self, problem: &Problem, depth: usize, limits: &Limits) -> Step {
        if limits.stop.load(Ordering::Relaxed) {
            return Step::Aborted;
        }
        self.local_nodes += 1;
        if self.local_nodes >= CHARGE_EVERY {
            let ok = limits.charge(self.local_nodes);
            self.local_nodes = 0;
            if !ok {
                limits.stop.store(true, Ordering::Relaxed);
                return Step::Aborted;
            }
        }
        if depth == problem.groups.len() {
            let dirty = self.dirty.clone();
            if self.dirty_pages_planar(problem.n) {
                return Step::Found(self.pages.clone());
            }
            self.dirty = dirty;
            return Step::Exhausted;
        }
        let group = &problem.groups[depth];
        let remaining = problem.remaining_after[depth];
        let check = (depth + 1).is_multiple_of(problem.interval);
        let mut aborted = false;
        for page in self.candidates(problem, group) {
            if self.pages[page].len() + group.edges.len() > problem.cap {
                continue;
            }
            let (was_dirty, prev_used) = self.place(group, page);
            let fits = self.free_capacity(problem.cap) >= remaining;
            let dirty_before = self.dirty.clone();
            let ok = fits && (!check || self.dirty_pages_planar(problem.n));
            if ok {
                match self.dfs(problem, depth + 1, limits) {
                    Step::Found(p) => return Step::Found(p),
                    Step::Aborted => aborted = true,
                    Step::Exhausted => {}
                }
            }
            self.dirty = dirty_before;
            self.unplace(group, page, was_dirty, prev_used);
            if aborted {
                break;
            }
        }
        if aborted {
            Step::Aborted
        } else {
            Step::Exhausted
        }
    }

    fn flush(&mut self, limits: &Limits) {
        limits.charge(self.local_nodes);
        self.local_nodes = 0;
    }
}

/// Splits the tree at a shallow depth and explores the subtrees on the
/// rayon pool. Prefixes are generated with the same pruning rules as the
/// sequential search.
fn parallel_search(problem: &Problem, limits: &Limits) -> Step {
    let target = rayon::current_num_threads() * 8;
    let mut prefixes: Vec<Vec<usize>> = vec![Vec::new()];
    let mut depth = 0;
    while depth < problem.groups.len().min(24) && prefixes.len() < target {
        let mut next = Vec::new();
        for prefix in &prefixes {
            let mut state = State::new(problem);
            if !state.replay(problem, prefix) {
                continue;
            }
            let group = &problem.groups[depth];
            for page in state.candidates(problem, group) {
                let mut p = prefix.clone();
                p.push(page);
                next.push(p);
            }
        }
        prefixes = next;
        depth += 1;
    }
    let results: Vec<Step> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut state = State::new(problem);
            if !state.replay(problem, prefix) {
                return Step::Exhausted;
            }
            let step = state.dfs(problem, prefix.len(), limits);
            state.flush(limits);
            if matches!(step, Step::Found(_)) {
                limits.stop.store(true, Ordering::Relaxed);
            }
            step
        })
        .collect();
    let mut aborted = false;
    for step in results {
        match step {
            Step::Found(p) => return Step::Found(p),
            Step::Aborted => aborted = true,
            Step::Exhausted => {}
        }
    }
    if aborted {
        Step::Aborted
    } else {
        Step::Exhausted
    }
}

impl State {
    /// Applies `prefix` (one page per group) with full pruning; false if
    /// the prefix is already dead.
    fn replay(&mut self, problem: &Problem, prefix: &[usize]) -> bool {
        for (depth, &page) in prefix.iter().enumerate() {
            let group = &problem.groups[depth];
            if self.pages[page].len() + group.edges.len() > problem.cap {
                return false;
            }
            self.place(group, page);
            if self.free_capacity(problem.cap) < problem.remaining_after[depth] {
                return false;
            }
            if !self.dirty_pages_planar(problem.n) {
                return false;
            }
        }
        true
    }
}
