pub mod bounds;
pub mod constructions;
pub mod decomposition;
pub mod document;
pub mod graph;
pub mod pipeline;
pub mod planarity;
pub mod search;
