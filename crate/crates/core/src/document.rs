//! On-disk format for graphs and decompositions, plus DOT export.
//!
//! A document is JSON with sorted keys and one edge per line. Labels are the
//! text form of [`VertexId`]. Edge endpoints and edge lists are sorted
//! lexicographically by label text, so equal documents are equal bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::decomposition::Decomposition;
use crate::graph::{Edge, Graph, GraphError, VertexId};

pub const FORMAT_VERSION: &str = "thickness-lab/1";

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {0:?} (expected {FORMAT_VERSION:?})")]
    UnsupportedVersion(String),
    #[error("page {page} lists edge {edge} more than once")]
    RepeatedEdge { page: usize, edge: Edge },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A host graph, optionally with pages, and free-form metadata.
///
/// A document with no pages describes a bare graph. Pages are kept as
/// written: they are not required to be a valid decomposition, so that
/// broken certificates can be loaded and diagnosed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DecompositionDocument {
    pub host: Graph,
    pub pages: Vec<BTreeSet<Edge>>,
    pub metadata: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHost {
    vertices: Vec<String>,
    edges: Vec<[String; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    format_version: String,
    host: RawHost,
    #[serde(default)]
    pages: Vec<Vec<[String; 2]>>,
    #[serde(default)]
    metadata: BTreeMap<String, Value>,
}

fn parse_edge([x, y]: &[String; 2]) -> Result<Edge, GraphError> {
    Edge::new(x.parse()?, y.parse()?)
}

fn label_pair(e: &Edge) -> [String; 2] {
    let (a, b) = e.endpoints();
    let (a, b) = (a.to_string(), b.to_string());
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

fn sorted_pairs<'a>(edges: impl IntoIterator<Item = &'a Edge>) -> Vec<[String; 2]> {
    let mut out: Vec<[String; 2]> = edges.into_iter().map(label_pair).collect();
    out.sort();
    out
}

fn quoted(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn write_pairs(out: &mut String, pairs: &[[String; 2]], indent: &str) {
    if pairs.is_empty() {
        out.push_str("[]");
        return;
    }
    out.push_str("[\n");
    for (i, [a, b]) in pairs.iter().enumerate() {
        let sep = if i + 1 < pairs.len() { "," } else { "" };
        let _ = writeln!(out, "{indent}  [{}, {}]{sep}", quoted(a), quoted(b));
    }
    out.push_str(indent);
    out.push(']');
}

impl DecompositionDocument {
    pub fn from_graph(host: Graph) -> Self {
        DecompositionDocument {
            host,
            ..Default::default()
        }
    }

    pub fn from_decomposition(d: &Decomposition) -> Self {
        DecompositionDocument {
            host: d.host().clone(),
            pages: d.pages().to_vec(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: Value) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }

    pub fn has_pages(&self) -> bool {
        !self.pages.is_empty()
    }

    /// The pages as a decomposition of the host, if there are any.
    pub fn decomposition(&self) -> Option<Decomposition> {
        self.has_pages()
            .then(|| Decomposition::new(self.host.clone(), self.pages.clone()))
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let raw: RawDocument = serde_json::from_str(text)?;
        if raw.format_version != FORMAT_VERSION {
            return Err(DocumentError::UnsupportedVersion(raw.format_version));
        }
        let vertices = raw
            .host
            .vertices
            .iter()
            .map(|s| s.parse::<VertexId>())
            .collect::<Result<Vec<_>, _>>()?;
        let edges = raw
            .host
            .edges
            .iter()
            .map(parse_edge)
            .collect::<Result<Vec<_>, _>>()?;
        let host = Graph::new(vertices, edges)?;
        let mut pages = Vec::with_capacity(raw.pages.len());
        for (i, raw_page) in raw.pages.iter().enumerate() {
            let mut page = BTreeSet::new();
            for pair in raw_page {
                let e = parse_edge(pair)?;
                if !page.insert(e.clone()) {
                    return Err(DocumentError::RepeatedEdge { page: i, edge: e });
                }
            }
            pages.push(page);
        }
        Ok(DecompositionDocument {
            host,
            pages,
            metadata: raw.metadata,
        })
    }

    /// Serialized text; ends with a newline.
    pub fn to_json_string(&self) -> String {
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"format_version\": {},", quoted(FORMAT_VERSION));
        out.push_str("  \"host\": {\n    \"edges\": ");
        write_pairs(&mut out, &sorted_pairs(self.host.edges()), "    ");
        out.push_str(",\n    \"vertices\": ");
        let mut vertices: Vec<String> =
            self.host.vertices().iter().map(|v| v.to_string()).collect();
        vertices.sort();
        if vertices.is_empty() {
            out.push_str("[]");
        } else {
            out.push_str("[\n");
            for (i, v) in vertices.iter().enumerate() {
                let sep = if i + 1 < vertices.len() { "," } else { "" };
                let _ = writeln!(out, "      {}{sep}", quoted(v));
            }
            out.push_str("    ]");
        }
        out.push_str("\n  },\n  \"metadata\": ");
        let metadata = serde_json::to_string_pretty(&self.metadata).expect("json values serialize");
        out.push_str(&metadata.replace('\n', "\n  "));
        out.push_str(",\n  \"pages\": ");
        if self.pages.is_empty() {
            out.push_str("[]");
        } else {
            out.push_str("[\n");
            for (i, page) in self.pages.iter().enumerate() {
                out.push_str("    ");
                write_pairs(&mut out, &sorted_pairs(page), "    ");
                out.push_str(if i + 1 < self.pages.len() {
                    ",\n"
                } else {
                    "\n"
                });
            }
            out.push_str("  ]");
        }
        out.push_str("\n}\n");
        out
    }

    /// DOT text. Each page becomes a cluster holding its own copy of every
    /// host vertex; without pages the host is written as a plain graph.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph thickness {\n");
        let id = |s: &str| quoted(s);
        let mut vertices: Vec<String> =
            self.host.vertices().iter().map(|v| v.to_string()).collect();
        vertices.sort();
        if self.pages.is_empty() {
            for v in &vertices {
                let _ = writeln!(out, "  {};", id(v));
            }
            for [a, b] in sorted_pairs(self.host.edges()) {
                let _ = writeln!(out, "  {} -- {};", id(&a), id(&b));
            }
        } else {
            for (p, page) in self.pages.iter().enumerate() {
                let _ = writeln!(out, "  subgraph cluster_page_{p} {{");
                let _ = writeln!(out, "    label={};", id(&format!("page {p}")));
                for v in &vertices {
                    let _ = writeln!(out, "    {} [label={}];", id(&format!("p{p}/{v}")), id(v));
                }
                for [a, b] in sorted_pairs(page) {
                    let _ = writeln!(
                        out,
                        "    {} -- {};",
                        id(&format!("p{p}/{a}")),
                        id(&format!("p{p}/{b}"))
                    );
                }
                out.push_str("  }\n");
            }
        }
        out.push_str("}\n");
        out
    }
}
