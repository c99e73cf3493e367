//! Randomized property checks shared by the property tests and the
//! acceptance run. Each returns a short summary or the first failure.

use std::collections::BTreeMap;

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thickness_core::constructions::{
    amalgamate_decompositions, contract_hub_p2, double_decomposition, MidBase,
};
use thickness_core::decomposition::Decomposition;
use thickness_core::document::DecompositionDocument;
use thickness_core::graph::{
    complete_graph, complete_graph_minus_edge, complete_label, complete_path_product, Graph,
    VertexId,
};
use thickness_core::pipeline::construct_multi_layer;
use thickness_core::search::{exact_thickness, SearchBudget};

use super::{random_decomposition, random_small, small_to_graph};

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Serialize, parse and serialize again; both texts and both documents
/// must agree.
pub fn round_trip(d: &Decomposition, tag: &str) -> Result<(), String> {
    let doc = DecompositionDocument::from_decomposition(d)
        .with_metadata("generator", serde_json::json!(tag))
        .with_metadata("x_extra", serde_json::json!({"kept": [tag, 1]}));
    let text = doc.to_json_string();
    let back = DecompositionDocument::parse(&text).map_err(|e| format!("{tag}: {e}"))?;
    ensure(back == doc, || format!("{tag}: parsed document differs"))?;
    ensure(back.to_json_string() == text, || {
        format!("{tag}: text differs")
    })?;
    ensure(back.decomposition().as_ref() == Some(d), || {
        format!("{tag}: pages differ")
    })
}

/// Pairs on page `p` at every hub of `d`.
fn pairs_per_page(d: &Decomposition) -> Vec<usize> {
    let mut counts = vec![0; d.page_count()];
    let map = d.page_map();
    for hub in d.host().vertices().iter().filter(|v| v.is_hub()) {
        for nb in d.host().neighbors(hub) {
            if let (VertexId::Layer { layer, .. }, VertexId::Hub { position }) = (&nb, hub) {
                if layer == position {
                    let e = thickness_core::graph::edge(nb.clone(), hub.clone());
                    counts[map[&e]] += 1;
                }
            }
        }
    }
    counts
}

fn two_layer_case(rng: &mut ChaCha8Rng, docs: &mut usize) -> Result<(), String> {
    let n = rng.gen_range(1..=8);
    let base = random_decomposition(&complete_graph(n + 1).unwrap(), rng);
    let hub = complete_label(rng.gen_range(1..=n + 1));
    let k = base.page_count();
    let tag = format!("double K_{} at {hub}", n + 1);
    let doubled = double_decomposition(&base, &hub).map_err(|e| format!("{tag}: {e}"))?;
    ensure(doubled.page_count() == k, || {
        format!("{tag}: page count changed")
    })?;
    ensure(doubled.host().edge_count() == 2 * choose2(n + 1), || {
        format!("{tag}: edge count")
    })?;
    for i in 0..k {
        ensure(
            doubled.pages()[i].len() == 2 * base.pages()[i].len(),
            || format!("{tag}: page {i} size"),
        )?;
    }
    let pairs = pairs_per_page(&doubled);
    let product =
        contract_hub_p2(&doubled, &VertexId::hub(1)).map_err(|e| format!("{tag}: {e}"))?;
    ensure(product.page_count() == k, || {
        format!("{tag}: contraction changed page count")
    })?;
    ensure(
        *product.host() == complete_path_product(n, 2).unwrap(),
        || format!("{tag}: host"),
    )?;
    for (i, &paired) in pairs.iter().enumerate() {
        ensure(
            product.pages()[i].len() == doubled.pages()[i].len() - paired,
            || format!("{tag}: page {i} accounting after contraction"),
        )?;
    }
    ensure(product.is_valid(), || format!("{tag}: invalid result"))?;
    for d in [&base, &doubled, &product] {
        round_trip(d, &tag)?;
        *docs += 1;
    }
    Ok(())
}

fn chain_case(rng: &mut ChaCha8Rng, docs: &mut usize) -> Result<(), String> {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(3..=5);
    let host = complete_graph_minus_edge(n + 2).unwrap();
    let base = random_decomposition(&host, rng);
    let k = base.page_count();
    let tag = format!("chain n={n} m={m}");
    let mid = MidBase::new(base, complete_label(n + 1), complete_label(n + 2))
        .map_err(|e| format!("{tag}: {e}"))?;
    let built = construct_multi_layer(&mid, m).map_err(|e| format!("{tag}: {e}"))?;
    let chain = built.chain.expect("chains are kept");
    ensure(chain.page_count() == k, || {
        format!("{tag}: chain page count")
    })?;
    let expected = 2 * choose2(n + 1) + (m - 2) * (choose2(n + 2) - 1);
    ensure(chain.host().edge_count() == expected, || {
        format!("{tag}: chain edge count")
    })?;
    let pairs = pairs_per_page(&chain);
    let product = &built.product;
    ensure(product.page_count() == k, || {
        format!("{tag}: product page count")
    })?;
    ensure(
        *product.host() == complete_path_product(n, m).unwrap(),
        || format!("{tag}: host"),
    )?;
    for (i, &paired) in pairs.iter().enumerate() {
        ensure(
            product.pages()[i].len() == chain.pages()[i].len() - paired,
            || format!("{tag}: page {i} accounting"),
        )?;
    }
    ensure(product.is_valid(), || format!("{tag}: invalid result"))?;
    for d in [&mid.decomposition, &chain, product] {
        round_trip(d, &tag)?;
        *docs += 1;
    }
    Ok(())
}

fn prefixed(g: &Graph, prefix: &str) -> Graph {
    let map: BTreeMap<VertexId, VertexId> = g
        .vertices()
        .iter()
        .map(|v| (v.clone(), VertexId::plain(format!("{prefix}{v}"))))
        .collect();
    g.relabel(&map).unwrap()
}

fn random_graph(
    rng: &mut ChaCha8Rng,
    sizes: std::ops::RangeInclusive<usize>,
    density: std::ops::Range<f64>,
) -> Graph {
    let n = rng.gen_range(sizes);
    let p = rng.gen_range(density);
    small_to_graph(&random_small(rng, n, p))
}

fn amalgamation_case(rng: &mut ChaCha8Rng, docs: &mut usize) -> Result<(), String> {
    let g1 = random_graph(rng, 3..=9, 0.3..0.95);
    let g2 = prefixed(&random_graph(rng, 3..=9, 0.3..0.95), "r");
    let d1 = random_decomposition(&g1, rng);
    let d2 = random_decomposition(&g2, rng);
    let v1 = g1.vertices().iter().choose(rng).unwrap().clone();
    let v2 = g2.vertices().iter().choose(rng).unwrap().clone();
    let tag = format!("amalgamation at {v1}~{v2}");
    let d = amalgamate_decompositions(&d1, &v1, &d2, &v2).map_err(|e| format!("{tag}: {e}"))?;
    let k = d1.page_count().max(d2.page_count());
    ensure(d.page_count() == k, || {
        format!("{tag}: page count is not the max")
    })?;
    ensure(
        d.host().edge_count() == g1.edge_count() + g2.edge_count(),
        || format!("{tag}: edge count"),
    )?;
    ensure(
        d.host().vertex_count() == g1.vertex_count() + g2.vertex_count() - 1,
        || format!("{tag}: vertex count"),
    )?;
    ensure(d.is_valid(), || format!("{tag}: invalid result"))?;
    round_trip(&d, &tag)?;
    *docs += 1;
    Ok(())
}

/// Page-count preservation and edge accounting on `count` random inputs,
/// with a document round trip on every input and output.
pub fn construction_invariants(seed: u64, count: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = 0;
    for i in 0..count {
        match i % 3 {
            0 => two_layer_case(&mut rng, &mut docs)?,
            1 => chain_case(&mut rng, &mut docs)?,
            _ => amalgamation_case(&mut rng, &mut docs)?,
        }
    }
    Ok(format!(
        "{count} constructions, {docs} documents round-tripped"
    ))
}

/// The thickness of a one-vertex amalgamation is the larger of the two
/// thicknesses, and the page-wise union of two optimal decompositions
/// attains it.
pub fn max_page_property(seed: u64, count: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = SearchBudget::default();
    let mut nonplanar = 0;
    for _ in 0..count {
        let g1 = random_graph(&mut rng, 4..=7, 0.4..1.0);
        let g2 = prefixed(&random_graph(&mut rng, 4..=7, 0.4..1.0), "r");
        let v1 = g1.vertices().iter().choose(&mut rng).unwrap().clone();
        let v2 = g2.vertices().iter().choose(&mut rng).unwrap().clone();
        let t1 = exact_thickness(&g1, &budget);
        let t2 = exact_thickness(&g2, &budget);
        let joined = thickness_core::graph::vertex_amalgamation(&g1, &v1, &g2, &v2, v1.clone())
            .map_err(|e| e.to_string())?;
        let t = exact_thickness(&joined, &budget);
        let expected = t1.bound.lo.max(t2.bound.lo);
        ensure(t.bound.lo == expected, || {
            format!(
                "amalgamation has thickness {}, expected {expected}",
                t.bound.lo
            )
        })?;
        let d = amalgamate_decompositions(&t1.certificate, &v1, &t2.certificate, &v2)
            .map_err(|e| e.to_string())?;
        ensure(d.page_count() == expected && d.is_valid(), || {
            "union of certificates is not an optimal decomposition".to_string()
        })?;
        if expected > 1 {
            nonplanar += 1;
        }
    }
    Ok(format!(
        "{count} pairs ({nonplanar} with thickness 2 or more)"
    ))
}
