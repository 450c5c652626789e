//! DOT and JSON renderings of a relation's Hasse diagram.
//!
//! Both formats list types in canonical order and number them from 0 in
//! that order, so output is byte-stable for a given relation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::program::{ClassTable, ParseError};
use crate::relation::{RelationError, SubtypingRelation};
use crate::types::GroundType;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Dot,
    Json,
}

/// A rendered relation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExportDocument {
    pub format: Format,
    pub payload: String,
}

impl ExportDocument {
    pub fn render(relation: &SubtypingRelation, format: Format) -> Self {
        let payload = match format {
            Format::Dot => to_dot(relation),
            Format::Json => to_json(relation),
        };
        ExportDocument { format, payload }
    }
}

fn quote(label: &str) -> String {
    let mut s = String::with_capacity(label.len() + 2);
    s.push('"');
    for c in label.chars() {
        if c == '"' || c == '\\' {
            s.push('\\');
        }
        s.push(c);
    }
    s.push('"');
    s
}

/// Graphviz rendering, edges drawn from subtype to supertype.
///
/// Types of equal rank share a layer; `Null` is pinned to the bottom layer
/// and `Object` to the top one.
pub fn to_dot(relation: &SubtypingRelation) -> String {
    let mut out = String::new();
    out.push_str("digraph subtyping {\n");
    out.push_str("  rankdir=BT;\n");
    out.push_str("  node [shape=box, fontname=\"monospace\"];\n");

    let mut layers: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let (mut bottom, mut top) = (None, None);
    for (i, t) in relation.carrier().iter().enumerate() {
        match t {
            GroundType::Null => bottom = Some(i),
            GroundType::Object => top = Some(i),
            _ => layers.entry(t.rank().0).or_default().push(i),
        }
    }
    let node = |i: usize| {
        format!(
            "t{i} [label={}];",
            quote(&relation.carrier()[i].to_string())
        )
    };
    if let Some(i) = bottom {
        let _ = writeln!(out, "  {{ rank=min; {} }}", node(i));
    }
    for (rank, ids) in &layers {
        let _ = write!(out, "  subgraph rank{rank} {{ rank=same;");
        for &i in ids {
            let _ = write!(out, " {}", node(i));
        }
        out.push_str(" }\n");
    }
    if let Some(i) = top {
        let _ = writeln!(out, "  {{ rank=max; {} }}", node(i));
    }
    for &(i, j) in relation.hasse_indices() {
        let _ = writeln!(out, "  t{i} -> t{j};");
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct TypeEntry {
    pub id: usize,
    pub name: String,
    pub rank: u32,
}

/// The JSON document: types in canonical order with dense ids, and Hasse
/// edges as `[sub, super]` id pairs in lexicographic order.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct RelationDocument {
    pub iteration: u32,
    pub types: Vec<TypeEntry>,
    pub hasse_edges: Vec<[usize; 2]>,
}

impl RelationDocument {
    pub fn from_relation(relation: &SubtypingRelation) -> Self {
        RelationDocument {
            iteration: relation.iteration(),
            types: relation
                .carrier()
                .iter()
                .enumerate()
                .map(|(id, t)| TypeEntry {
                    id,
                    name: t.to_string(),
                    rank: t.rank().0,
                })
                .collect(),
            hasse_edges: relation
                .hasse_indices()
                .iter()
                .map(|&(i, j)| [i, j])
                .collect(),
        }
    }
}

pub fn to_json(relation: &SubtypingRelation) -> String {
    let doc = RelationDocument::from_relation(relation);
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("type `{name}`: {source}")]
    Type { name: String, source: ParseError },
    #[error("edge references unknown id {0}")]
    UnknownId(usize),
    #[error(transparent)]
    Relation(#[from] RelationError),
}

/// Rebuilds a relation from [`to_json`] output, resolving names over `table`.
pub fn from_json(text: &str, table: &ClassTable) -> Result<SubtypingRelation, ImportError> {
    let doc: RelationDocument = serde_json::from_str(text)?;
    let mut by_id = BTreeMap::new();
    for entry in &doc.types {
        let t = table
            .parse_type(&entry.name)
            .map_err(|source| ImportError::Type {
                name: entry.name.clone(),
                source,
            })?;
        by_id.insert(entry.id, t);
    }
    let lookup = |id: usize| by_id.get(&id).cloned().ok_or(ImportError::UnknownId(id));
    let edges = doc
        .hasse_edges
        .iter()
        .map(|&[a, b]| Ok((lookup(a)?, lookup(b)?)))
        .collect::<Result<Vec<_>, ImportError>>()?;
    Ok(SubtypingRelation::from_edges(
        by_id.into_values(),
        edges,
        doc.iteration,
    )?)
}
