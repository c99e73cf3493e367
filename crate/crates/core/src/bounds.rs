//! Closed-form thickness values and bounds for K_n, K_n □ P_2 and K_n □ P_m.
//!
//! All arithmetic is exact integer arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("{name} = {value} is out of range (must be at least {min})")]
    OutOfRange {
        name: &'static str,
        value: usize,
        min: usize,
    },
    #[error("thickness interval [{lo}, {hi}] is malformed")]
    BadInterval { lo: usize, hi: usize },
}

fn at_least(name: &'static str, value: usize, min: usize) -> Result<(), BoundsError> {
    if value < min {
        Err(BoundsError::OutOfRange { name, value, min })
    } else {
        Ok(())
    }
}

/// Where a thickness value or interval comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// ⌈|E| / (3|V| - 6)⌉ on an explicit graph.
    EulerLower,
    /// The closed-form case split of the edge-count bound for K_n □ P_m.
    ProductLower,
    /// ⌊(n+7)/6⌋ with the K_9, K_10 exceptions.
    CompleteGraphFormula,
    /// ⌊(n+8)/6⌋ for K_n □ P_2 with its exceptions.
    TwoLayerFormula,
    /// ⌊(n+9)/6⌋ for K_n □ P_m, m ≥ 3, with its exceptions.
    MultiLayerFormula,
    /// Upper bound from a containment or an explicit construction.
    ConstructionUpper,
    /// Settled or bracketed by the exhaustive search oracle.
    SearchCertificate,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::EulerLower => "euler_lower",
            Provenance::ProductLower => "product_lower",
            Provenance::CompleteGraphFormula => "complete_graph_formula",
            Provenance::TwoLayerFormula => "two_layer_formula",
            Provenance::MultiLayerFormula => "multi_layer_formula",
            Provenance::ConstructionUpper => "construction_upper",
            Provenance::SearchCertificate => "search_certificate",
        };
        f.write_str(s)
    }
}

/// A thickness value (`lo == hi`) or an interval known to contain it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThicknessBound {
    pub lo: usize,
    pub hi: usize,
    pub provenance: Provenance,
}

impl ThicknessBound {
    pub fn exact(value: usize, provenance: Provenance) -> Self {
        ThicknessBound {
            lo: value,
            hi: value,
            provenance,
        }
    }

    pub fn interval(lo: usize, hi: usize, provenance: Provenance) -> Result<Self, BoundsError> {
        if lo == 0 || lo > hi {
            return Err(BoundsError::BadInterval { lo, hi });
        }
        Ok(ThicknessBound { lo, hi, provenance })
    }

    pub fn is_settled(&self) -> bool {
        self.lo == self.hi
    }

    pub fn value(&self) -> Option<usize> {
        self.is_settled().then_some(self.lo)
    }

    pub fn contains(&self, t: usize) -> bool {
        self.lo <= t && t <= self.hi
    }
}

impl fmt::Display for ThicknessBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_settled() {
            write!(f, "exact {} ({})", self.lo, self.provenance)
        } else {
            write!(f, "open [{}, {}] ({})", self.lo, self.hi, self.provenance)
        }
    }
}

/// ⌈|E| / (3|V| - 6)⌉ for graphs with at least 3 vertices, and 1 otherwise.
pub fn euler_lower_bound(g: &Graph) -> usize {
    let (nv, ne) = (g.vertex_count(), g.edge_count());
    if nv < 3 {
        return 1;
    }
    ne.div_ceil(3 * nv - 6).max(1)
}

/// Edge-count lower bound for K_n □ P_m in closed form: p + 1 when
/// n ≡ 0..4 (mod 6) and p + 2 when n ≡ 5 (mod 6), where p = ⌊n/6⌋.
pub fn product_lower_bound(n: usize, m: usize) -> Result<usize, BoundsError> {
    at_least("n", n, 2)?;
    at_least("m", m, 2)?;
    let p = n / 6;
    Ok(if n % 6 == 5 { p + 2 } else { p + 1 })
}

/// Same bound computed from the vertex and edge counts of K_n □ P_m.
pub fn product_lower_bound_from_counts(n: usize, m: usize) -> Result<usize, BoundsError> {
    at_least("n", n, 2)?;
    at_least("m", m, 2)?;
    let v = m * n;
    let e = m * n * (n - 1) / 2 + n * (m - 1);
    Ok(e.div_ceil(3 * v - 6))
}

/// θ(K_n) = ⌊(n+7)/6⌋, except θ(K_9) = θ(K_10) = 3.
pub fn thickness_kn(n: usize) -> Result<usize, BoundsError> {
    at_least("n", n, 1)?;
    Ok(match n {
        9 | 10 => 3,
        _ => (n + 7) / 6,
    })
}

/// θ(K_n □ P_2). Exact except when n ≡ 4 (mod 6), where only an interval
/// of width one is known.
pub fn thickness_kn_p2(n: usize) -> Result<ThicknessBound, BoundsError> {
    at_least("n", n, 2)?;
    let formula = (n + 8) / 6;
    let prov = Provenance::TwoLayerFormula;
    Ok(match n {
        8 | 9 => ThicknessBound::exact(3, prov),
        _ if n % 6 == 4 => {
            let lo = (formula - 1).max(product_lower_bound(n, 2)?);
            ThicknessBound::interval(lo, formula, prov)?
        }
        _ => ThicknessBound::exact(formula, prov),
    })
}

/// θ(K_n □ P_m) for m ≥ 3. Exact except for n ≡ 3, 4 (mod 6) and n = 8.
pub fn thickness_kn_pm(n: usize, m: usize) -> Result<ThicknessBound, BoundsError> {
    at_least("n", n, 2)?;
    at_least("m", m, 3)?;
    let formula = (n + 9) / 6;
    let prov = Provenance::MultiLayerFormula;
    Ok(match n {
        7 => ThicknessBound::exact(2, prov),
        8 => ThicknessBound::interval(2, 3, prov)?,
        _ if n % 6 == 3 || n % 6 == 4 => {
            let lo = (formula - 1).max(product_lower_bound(n, m)?);
            ThicknessBound::interval(lo, formula, prov)?
        }
        _ => ThicknessBound::exact(formula, prov),
    })
}

/// Upper bound from K_n □ P_2 ⊂ K_{n+1} ∨ K_{n+1} and, for m ≥ 3, from the
/// chain of K_{n+2} - e blocks: θ(K_{n+1}) or θ(K_{n+2}).
pub fn upper_bound_via_containment(n: usize, m: usize) -> Result<usize, BoundsError> {
    at_least("n", n, 2)?;
    at_least("m", m, 2)?;
    if m == 2 {
        thickness_kn(n + 1)
    } else {
        thickness_kn(n + 2)
    }
}

/// Dispatches on m: θ(K_n) for m = 1, then the two-layer and multi-layer
/// results. n = 1 gives a path, which is planar.
pub fn thickness_product(n: usize, m: usize) -> Result<ThicknessBound, BoundsError> {
    at_least("n", n, 1)?;
    at_least("m", m, 1)?;
    if n == 1 {
        return Ok(ThicknessBound::exact(1, Provenance::CompleteGraphFormula));
    }
    match m {
        1 => Ok(ThicknessBound::exact(
            thickness_kn(n)?,
            Provenance::CompleteGraphFormula,
        )),
        2 => thickness_kn_p2(n),
        _ => thickness_kn_pm(n, m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, complete_path_product, edge, VertexId};

    #[test]
    fn euler_lower_bound_examples() {
        assert_eq!(euler_lower_bound(&complete_graph(9).unwrap()), 2);
        assert_eq!(euler_lower_bound(&complete_path_product(5, 2).unwrap()), 2);
        let c4 = Graph::from_edges((0..4).map(|i| {
            edge(
                VertexId::plain(format!("c{i}")),
                VertexId::plain(format!("c{}", (i + 1) % 4)),
            )
        }));
        assert_eq!(euler_lower_bound(&c4), 1);
        assert_eq!(euler_lower_bound(&complete_graph(2).unwrap()), 1);
        assert_eq!(euler_lower_bound(&Graph::default()), 1);
    }

    #[test]
    fn product_lower_bound_examples() {
        assert_eq!(product_lower_bound(7, 2), Ok(2));
        assert_eq!(product_lower_bound(11, 3), Ok(3));
        assert_eq!(product_lower_bound(2, 2), Ok(1));
        assert!(product_lower_bound(1, 2).is_err());
        assert!(product_lower_bound(2, 1).is_err());
    }

    #[test]
    fn complete_graph_thickness() {
        assert_eq!(thickness_kn(6), Ok(2));
        assert_eq!(thickness_kn(9), Ok(3));
        assert_eq!(thickness_kn(10), Ok(3));
        assert_eq!(thickness_kn(4), Ok(1));
        assert_eq!(thickness_kn(11), Ok(3));
        assert_eq!(thickness_kn(1), Ok(1));
        assert!(thickness_kn(0).is_err());
    }

    #[test]
    fn two_layer_values() {
        let b = thickness_kn_p2(5).unwrap();
        assert_eq!(b.value(), Some(2));
        assert_eq!(thickness_kn_p2(8).unwrap().value(), Some(3));
        assert_eq!(thickness_kn_p2(9).unwrap().value(), Some(3));
        let open = thickness_kn_p2(10).unwrap();
        assert_eq!((open.lo, open.hi), (2, 3));
        let open = thickness_kn_p2(4).unwrap();
        assert_eq!((open.lo, open.hi), (1, 2));
        assert!(thickness_kn_p2(1).is_err());
    }

    #[test]
    fn multi_layer_values() {
        assert_eq!(thickness_kn_pm(7, 3).unwrap().value(), Some(2));
        assert_eq!(thickness_kn_pm(12, 4).unwrap().value(), Some(3));
        let b = thickness_kn_pm(8, 3).unwrap();
        assert_eq!((b.lo, b.hi), (2, 3));
        let b = thickness_kn_pm(9, 5).unwrap();
        assert_eq!((b.lo, b.hi), (2, 3));
        assert!(thickness_kn_pm(5, 2).is_err());
    }

    #[test]
    fn containment_upper_bounds() {
        assert_eq!(upper_bound_via_containment(5, 2), Ok(2));
        assert_eq!(upper_bound_via_containment(7, 3), Ok(3));
        assert_eq!(upper_bound_via_containment(2, 2), Ok(1));
    }

    #[test]
    fn dispatcher() {
        assert_eq!(thickness_product(9, 1).unwrap().value(), Some(3));
        assert_eq!(thickness_product(1, 7).unwrap().value(), Some(1));
        assert_eq!(thickness_product(9, 2).unwrap().value(), Some(3));
        assert_eq!(thickness_product(7, 5).unwrap().value(), Some(2));
        assert!(thickness_product(0, 2).is_err());
    }

    #[test]
    fn interval_rejects_bad_bounds() {
        assert!(ThicknessBound::interval(0, 1, Provenance::EulerLower).is_err());
        assert!(ThicknessBound::interval(3, 2, Provenance::EulerLower).is_err());
        assert_eq!(
            ThicknessBound::exact(2, Provenance::TwoLayerFormula).to_string(),
            "exact 2 (two_layer_formula)"
        );
    }
}
