//! JSON graph documents:
//! `{"class": str, "fields": [str], "methods": [{"name": str, "uses": [str], "calls": [str]}]}`.
//!
//! Members are numbered methods first, in list order, then fields.

use classplit_core::{ClassGraph, ClassGraphBuilder, MemberKind};
use serde::{Deserialize, Serialize};

use super::IngestError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub class: String,
    pub fields: Vec<String>,
    pub methods: Vec<MethodDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodDocument {
    pub name: String,
    #[serde(default)]
    pub uses: Vec<String>,
    #[serde(default)]
    pub calls: Vec<String>,
}

impl GraphDocument {
    pub fn into_graph(self) -> Result<ClassGraph, IngestError> {
        let mut b = ClassGraphBuilder::new(self.class);
        for m in &self.methods {
            b.add_member(m.name.clone(), MemberKind::Method);
        }
        for f in self.fields {
            b.add_member(f, MemberKind::Field);
        }
        for m in self.methods {
            for f in m.uses {
                b.add_use(m.name.clone(), f);
            }
            for c in m.calls {
                b.add_call(m.name.clone(), c);
            }
        }
        Ok(b.build()?)
    }

    pub fn from_graph(graph: &ClassGraph) -> Self {
        let names = |ids: &std::collections::BTreeSet<classplit_core::MemberId>| {
            ids.iter().map(|&i| graph.name(i).to_string()).collect()
        };
        GraphDocument {
            class: graph.class_name().to_string(),
            fields: graph.fields().map(|f| graph.name(f).to_string()).collect(),
            methods: graph
                .methods()
                .map(|m| MethodDocument {
                    name: graph.name(m).to_string(),
                    uses: names(graph.field_refs(m)),
                    calls: names(graph.calls(m)),
                })
                .collect(),
        }
    }
}

pub fn parse_graph_json(text: &str) -> Result<ClassGraph, IngestError> {
    let doc: GraphDocument =
        serde_json::from_str(text).map_err(|e| IngestError::MalformedDocument(e.to_string()))?;
    if !classplit_core::model::is_identifier(&doc.class) {
        return Err(IngestError::MalformedDocument(format!(
            "invalid class name `{}`",
            doc.class
        )));
    }
    doc.into_graph()
}

pub fn write_graph_json(graph: &ClassGraph) -> String {
    let mut s = serde_json::to_string_pretty(&GraphDocument::from_graph(graph))
        .expect("graph documents always serialize");
    s.push('\n');
    s
}
