//! End-to-end constructions of K_n □ P_m decompositions from searched or
//! supplied base decompositions.

use std::fmt;

use thiserror::Error;

use crate::bounds::{euler_lower_bound, thickness_kn, BoundsError};
use crate::constructions::{
    chain_decomposition, contract_chain, contract_hub_p2, double_decomposition, ChainSpec,
    ConstructionError, EndBase, MidBase,
};
use crate::decomposition::Decomposition;
use crate::graph::{complete_graph, complete_graph_minus_edge, complete_label, Graph, GraphError};
use crate::search::{find_decomposition, SearchBudget, SearchConstraint, SearchOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("no {k}-page decomposition of {graph} exists")]
    Exhausted { graph: String, k: usize },
    #[error("search for a {k}-page decomposition of {graph} ran out of budget")]
    Inconclusive { graph: String, k: usize },
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

type Result<T> = std::result::Result<T, PipelineError>;

/// How the middle blocks of a chain were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MiddlePath {
    /// No middle blocks (m ≤ 2).
    NotNeeded,
    /// A hub-symmetric base, reused unchanged in every middle block.
    HubSymmetric,
    /// A base without hub symmetry, aligned by reflecting blocks and
    /// permuting pages.
    Aligned,
}

impl fmt::Display for MiddlePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MiddlePath::NotNeeded => "not_needed",
            MiddlePath::HubSymmetric => "hub_symmetric",
            MiddlePath::Aligned => "aligned",
        })
    }
}

/// Result of a pipeline run.
#[derive(Clone, Debug)]
pub struct ProductConstruction {
    pub n: usize,
    pub m: usize,
    /// Decomposition of the hub graph; `None` for m = 1.
    pub chain: Option<Decomposition>,
    /// Verified decomposition of K_n □ P_m.
    pub product: Decomposition,
    pub middle: MiddlePath,
}

fn search(
    g: &Graph,
    name: String,
    k: usize,
    c: &SearchConstraint,
    budget: &SearchBudget,
) -> Result<Decomposition> {
    match find_decomposition(g, k, c, budget).outcome {
        SearchOutcome::Found(d) => Ok(d),
        SearchOutcome::Exhausted => Err(PipelineError::Exhausted { graph: name, k }),
        SearchOutcome::Inconclusive => Err(PipelineError::Inconclusive { graph: name, k }),
    }
}

/// θ(K_{n+1})-page decomposition of K_{n+1} on x1..x{n+1}, hub x{n+1}.
pub fn search_end_base(n: usize, budget: &SearchBudget) -> Result<EndBase> {
    let g = complete_graph(n + 1)?;
    let k = thickness_kn(n + 1)?;
    let d = search(
        &g,
        format!("K_{}", n + 1),
        k,
        &SearchConstraint::None,
        budget,
    )?;
    Ok(EndBase::new(d, complete_label(n + 1))?)
}

/// A middle base and how it was found.
#[derive(Clone, Debug)]
pub struct MidBaseSearch {
    pub base: MidBase,
    pub path: MiddlePath,
    /// Page counts at which the hub-symmetric search failed, with the reason.
    pub symmetric_failures: Vec<PipelineError>,
}

/// Decomposition of K_{n+2} - e with hubs x{n+1}, x{n+2}, using as few
/// pages as the search can certify.
///
/// For each page count from the edge bound upward a hub-symmetric base is
/// tried first, then an unconstrained one. The budget applies to each
/// search call separately.
pub fn search_mid_base(n: usize, budget: &SearchBudget) -> Result<MidBaseSearch> {
    let g = complete_graph_minus_edge(n + 2)?;
    let (a, b) = (complete_label(n + 1), complete_label(n + 2));
    let name = format!("K_{} - e", n + 2);
    let symmetric = SearchConstraint::HubSymmetric {
        a: a.clone(),
        b: b.clone(),
    };
    let hi = thickness_kn(n + 2)?;
    let mut symmetric_failures = Vec::new();
    let mut last_err = None;
    for k in euler_lower_bound(&g)..=hi {
        match search(&g, format!("{name} (hub-symmetric)"), k, &symmetric, budget) {
            Ok(d) => {
                return Ok(MidBaseSearch {
                    base: MidBase::new(d, a, b)?,
                    path: MiddlePath::HubSymmetric,
                    symmetric_failures,
                })
            }
            Err(e) => symmetric_failures.push(e),
        }
        match search(&g, name.clone(), k, &SearchConstraint::None, budget) {
            Ok(d) => {
                let base = MidBase::new(d, a, b)?;
                let path = if base.is_hub_symmetric() {
                    MiddlePath::HubSymmetric
                } else {
                    MiddlePath::Aligned
                };
                return Ok(MidBaseSearch {
                    base,
                    path,
                    symmetric_failures,
                });
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("page range is never empty"))
}

/// Two layers: double the end base at its hub, then contract the hub.
pub fn construct_two_layer(end: &EndBase) -> Result<ProductConstruction> {
    let doubled = double_decomposition(&end.decomposition, &end.hub)?;
    let product = contract_hub_p2(&doubled, &crate::graph::VertexId::hub(1))?;
    Ok(ProductConstruction {
        n: end.n(),
        m: 2,
        chain: Some(doubled),
        product,
        middle: MiddlePath::NotNeeded,
    })
}

/// m ≥ 3: both end blocks are cut from the middle base, so the chain always
/// aligns. A hub-symmetric base needs no reflections or page permutations.
pub fn construct_multi_layer(mid: &MidBase, m: usize) -> Result<ProductConstruction> {
    let (first, last) = mid.end_bases()?;
    let spec = ChainSpec {
        n: mid.n(),
        m,
        end_base: first,
        last_base: Some(last),
        mid_base: Some(mid.clone()),
    };
    let chain = chain_decomposition(&spec)?;
    let middle = if mid.is_hub_symmetric() {
        MiddlePath::HubSymmetric
    } else {
        MiddlePath::Aligned
    };
    let product = contract_chain(&chain.decomposition)?;
    Ok(ProductConstruction {
        n: spec.n,
        m,
        chain: Some(chain.decomposition),
        product,
        middle,
    })
}

/// Decomposition of K_n □ P_m built from searched bases.
pub fn construct_product(n: usize, m: usize, budget: &SearchBudget) -> Result<ProductConstruction> {
    if n == 0 || m == 0 {
        return Err(BoundsError::OutOfRange {
            name: if n == 0 { "n" } else { "m" },
            value: 0,
            min: 1,
        }
        .into());
    }
    match m {
        1 => {
            let end = search_end_base(n, budget)?;
            let spec = ChainSpec {
                n,
                m: 1,
                end_base: end,
                last_base: None,
                mid_base: None,
            };
            let product = chain_decomposition(&spec)?.decomposition;
            Ok(ProductConstruction {
                n,
                m,
                chain: None,
                product,
                middle: MiddlePath::NotNeeded,
            })
        }
        2 => construct_two_layer(&search_end_base(n, budget)?),
        _ => {
            let found = search_mid_base(n, budget)?;
            construct_multi_layer(&found.base, m)
        }
    }
}
