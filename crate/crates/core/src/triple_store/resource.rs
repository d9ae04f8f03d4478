use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::vocab;

/// A vertex or edge-label atom of the network.
///
/// Literals compare by their exact `(lexical, datatype)` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Resource {
    Iri(String),
    Literal { lexical: String, datatype: String },
    Blank(String),
}

impl Resource {
    /// Panics on an empty IRI; use [`Resource::try_iri`] for untrusted input.
    pub fn iri(value: impl Into<String>) -> Self {
        let value = value.into();
        assert!(!value.is_empty(), "IRI must be non-empty");
        Resource::Iri(value)
    }

    pub fn try_iri(value: impl Into<String>) -> Option<Self> {
        let value = value.into();
        (!value.is_empty()).then_some(Resource::Iri(value))
    }

    pub fn literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Resource::Literal {
            lexical: lexical.into(),
            datatype: datatype.into(),
        }
    }

    pub fn string_literal(lexical: impl Into<String>) -> Self {
        Self::literal(lexical, vocab::XSD_STRING)
    }

    pub fn blank(id: impl Into<String>) -> Self {
        Resource::Blank(id.into())
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Resource::Iri(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Resource::Iri(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Resource::Literal { .. })
    }

    /// The part after the last `#` or `/` of an IRI, or the blank-node id.
    pub fn local_name(&self) -> &str {
        match self {
            Resource::Iri(v) => v.rsplit(['#', '/']).next().unwrap_or(v),
            Resource::Blank(id) => id,
            Resource::Literal { lexical, .. } => lexical,
        }
    }

    /// N-Triples form using full IRIs.
    pub fn to_ntriples(&self) -> String {
        match self {
            Resource::Iri(v) => format!("<{v}>"),
            Resource::Blank(id) => format!("_:{id}"),
            Resource::Literal { lexical, datatype } => {
                format!("\"{}\"^^<{}>", escape_literal(lexical), datatype)
            }
        }
    }

    /// Shortest readable form: a prefixed name when a prefix matches.
    pub fn compact(&self, prefixes: &PrefixMap) -> String {
        match self {
            Resource::Iri(v) => prefixes.compact(v).unwrap_or_else(|| format!("<{v}>")),
            Resource::Literal { lexical, datatype } if datatype == vocab::XSD_STRING => {
                format!("\"{}\"", escape_literal(lexical))
            }
            Resource::Literal { lexical, datatype } => {
                let dt = prefixes
                    .compact(datatype)
                    .unwrap_or_else(|| format!("<{datatype}>"));
                format!("\"{}\"^^{}", escape_literal(lexical), dt)
            }
            Resource::Blank(id) => format!("_:{id}"),
        }
    }
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ntriples())
    }
}

pub(crate) fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// Prefix name to namespace IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    map: BTreeMap<String, String>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// The rdf, rdfs, xsd, rwr and rwrx prefixes.
    pub fn with_defaults() -> Self {
        let mut map = Self::new();
        for (p, ns) in vocab::default_prefixes() {
            map.insert(p, ns);
        }
        map
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.map.insert(prefix.into(), namespace.into());
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.map.get(prefix).map(String::as_str)
    }

    pub fn expand(&self, prefix: &str, local: &str) -> Option<String> {
        self.get(prefix).map(|ns| format!("{ns}{local}"))
    }

    /// Longest-namespace match wins.
    pub fn compact(&self, iri: &str) -> Option<String> {
        self.map
            .iter()
            .filter(|(_, ns)| !ns.is_empty() && iri.starts_with(ns.as_str()))
            .max_by_key(|(_, ns)| ns.len())
            .and_then(|(p, ns)| {
                let local = &iri[ns.len()..];
                local
                    .chars()
                    .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-'))
                    .then(|| format!("{p}:{local}"))
            })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(p, ns)| (p.as_str(), ns.as_str()))
    }

    pub fn extend(&mut self, other: &PrefixMap) {
        for (p, ns) in other.iter() {
            self.map.entry(p.to_string()).or_insert_with(|| ns.to_string());
        }
    }
}
