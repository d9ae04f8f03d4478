//! The RDF encoding of grammars.
//!
//! A context is a subject typed `rwr:Context`, `rwr:EntryContext` or
//! `rwr:ExitContext` with one `rwr:forResource`. Its rules hang off an
//! `rdf:Seq` reached by `rwr:hasRules`, ordered by `rdf:_n`; its attributes
//! off a bag reached by `rwr:hasAttributes` (members via `rdf:_n`, `rdf:li`
//! or `rwr:hasAttribute`). Rules and attributes with a step carry
//! `rwr:step`. A `rwr:Traverse` rule lists `rwr:hasEdge` nodes typed
//! `rwr:OutEdge` (with `rwr:hasObject`) or `rwr:InEdge` (with `rwr:hasSubject`),
//! both with `rwr:hasPredicate`. Context ids are the local names of the
//! context nodes.

use std::collections::BTreeMap;

use super::{Attribute, ContextId, ContextKind, EdgeDirection, EdgeSpec, Grammar, GrammarContext, GrammarError, Rule};
use crate::triple_store::{Graph, GraphBuilder, Resource, TriplePattern};
use crate::vocab::{self, rwr};

pub fn load_grammar_from_triples(graph: &Graph) -> Result<Grammar, GrammarError> {
    let reader = Reader { graph };
    let mut nodes: BTreeMap<Resource, ContextKind> = BTreeMap::new();
    for (class, kind) in [
        ("Context", ContextKind::Intermediate),
        ("EntryContext", ContextKind::Entry),
        ("ExitContext", ContextKind::Exit),
    ] {
        for node in reader.instances(&rwr(class)) {
            let slot = nodes.entry(node.clone()).or_insert(kind);
            if *slot == ContextKind::Intermediate {
                *slot = kind;
            } else if kind != ContextKind::Intermediate && *slot != kind {
                return Err(malformed(&node, "typed both entry and exit context"));
            }
        }
    }
    let ids: BTreeMap<Resource, ContextId> = nodes
        .keys()
        .map(|n| (n.clone(), ContextId::new(n.local_name())))
        .collect();
    let mut contexts = Vec::with_capacity(nodes.len());
    for (node, kind) in &nodes {
        contexts.push(reader.context(node, *kind, &ids)?);
    }
    Grammar::new(contexts)
}

fn malformed(node: &Resource, message: impl Into<String>) -> GrammarError {
    GrammarError::Malformed {
        node: node.to_string(),
        message: message.into(),
    }
}

struct Reader<'g> {
    graph: &'g Graph,
}

impl Reader<'_> {
    fn objects(&self, s: &Resource, p: &str) -> Vec<Resource> {
        self.graph
            .matching(&TriplePattern::new(Some(s.clone()), Some(Resource::iri(p)), None))
            .into_iter()
            .map(|t| t.object)
            .collect()
    }

    fn instances(&self, class: &str) -> Vec<Resource> {
        self.graph
            .matching(&TriplePattern::new(
                None,
                Some(Resource::iri(vocab::RDF_TYPE)),
                Some(Resource::iri(class)),
            ))
            .into_iter()
            .map(|t| t.subject)
            .collect()
    }

    fn is_a(&self, node: &Resource, class: &str) -> bool {
        self.objects(node, vocab::RDF_TYPE)
            .iter()
            .any(|t| t.as_iri() == Some(class))
    }

    fn one(&self, node: &Resource, p: &str) -> Result<Option<Resource>, GrammarError> {
        let mut values = self.objects(node, p);
        match values.len() {
            0 => Ok(None),
            1 => Ok(values.pop()),
            _ => Err(malformed(node, format!("more than one <{p}>"))),
        }
    }

    fn step(&self, node: &Resource) -> Result<u32, GrammarError> {
        match self.one(node, &rwr("step"))? {
            Some(Resource::Literal { lexical, .. }) => lexical
                .trim()
                .parse()
                .map_err(|_| malformed(node, format!("step '{lexical}' is not a natural number"))),
            Some(_) => Err(malformed(node, "step must be a literal")),
            None => Err(malformed(node, "missing rwr:step")),
        }
    }

    /// Members of an `rdf:Seq`/`rdf:Bag`, ordered by `rdf:_n` index, then the
    /// unordered `rdf:li` and `rwr:hasAttribute` members.
    fn members(&self, container: &Resource) -> Vec<Resource> {
        let mut indexed: Vec<(usize, Resource)> = Vec::new();
        let mut rest = Vec::new();
        for t in self
            .graph
            .matching(&TriplePattern::new(Some(container.clone()), None, None))
        {
            let Some(p) = t.predicate.as_iri() else { continue };
            if let Some(n) = vocab::member_index(p) {
                indexed.push((n, t.object));
            } else if p == vocab::RDF_LI || p == rwr("hasAttribute") {
                rest.push(t.object);
            }
        }
        indexed.sort();
        indexed.into_iter().map(|(_, r)| r).chain(rest).collect()
    }

    fn context(
        &self,
        node: &Resource,
        kind: ContextKind,
        ids: &BTreeMap<Resource, ContextId>,
    ) -> Result<GrammarContext, GrammarError> {
        let id = ids[node].clone();
        let for_resource = self
            .one(node, &rwr("forResource"))?
            .ok_or_else(|| GrammarError::MissingForResource {
                context: id.to_string(),
            })?;
        let mut ctx = GrammarContext::new(id, kind, for_resource);
        for seq in self.objects(node, &rwr("hasRules")) {
            for rule in self.members(&seq) {
                ctx.rules.push(self.rule(&rule, ids)?);
            }
        }
        for bag in self.objects(node, &rwr("hasAttributes")) {
            for attr in self.members(&bag) {
                ctx.attributes.insert(self.attribute(&attr)?);
            }
        }
        Ok(ctx)
    }

    fn rule(&self, node: &Resource, ids: &BTreeMap<Resource, ContextId>) -> Result<Rule, GrammarError> {
        if self.is_a(node, &rwr("PathCount")) {
            return Ok(Rule::PathCount { step: self.step(node)? });
        }
        if !self.is_a(node, &rwr("Traverse")) {
            return Err(malformed(node, "rule is neither rwr:PathCount nor rwr:Traverse"));
        }
        let mut edges = Vec::new();
        for edge in self.objects(node, &rwr("hasEdge")) {
            let (direction, far) = if self.is_a(&edge, &rwr("OutEdge")) {
                (EdgeDirection::Out, "hasObject")
            } else if self.is_a(&edge, &rwr("InEdge")) {
                (EdgeDirection::In, "hasSubject")
            } else {
                return Err(malformed(&edge, "edge is neither rwr:OutEdge nor rwr:InEdge"));
            };
            let predicate = self
                .one(&edge, &rwr("hasPredicate"))?
                .ok_or_else(|| malformed(&edge, "missing rwr:hasPredicate"))?;
            let target = self
                .one(&edge, &rwr(far))?
                .ok_or_else(|| malformed(&edge, format!("missing rwr:{far}")))?;
            let far_context = ids
                .get(&target)
                .cloned()
                .ok_or_else(|| malformed(&edge, format!("edge target {target} is not a context")))?;
            edges.push(EdgeSpec {
                direction,
                predicate,
                far_context,
            });
        }
        Ok(Rule::traverse(edges))
    }

    fn attribute(&self, node: &Resource) -> Result<Attribute, GrammarError> {
        if self.is_a(node, &rwr("NotEver")) {
            Ok(Attribute::NotEver)
        } else if self.is_a(node, &rwr("Is")) {
            Ok(Attribute::Is { step: self.step(node)? })
        } else if self.is_a(node, &rwr("Not")) {
            Ok(Attribute::Not { step: self.step(node)? })
        } else {
            Err(malformed(node, "attribute is not rwr:NotEver, rwr:Is or rwr:Not"))
        }
    }
}

/// Encodes `grammar` as triples, minting nodes under `base` (which should
/// end in `#` or `/` so that context ids survive as local names).
pub fn grammar_to_triples(grammar: &Grammar, base: &str) -> Graph {
    let mut b = GraphBuilder::new();
    let iri = |local: String| Resource::iri(format!("{base}{local}"));
    let mut add = |s: &Resource, p: &str, o: Resource| {
        b.add(s.clone(), Resource::iri(p), o)
            .expect("encoded grammar triples are well formed");
    };
    let step = |n: u32| Resource::literal(n.to_string(), vocab::XSD_INTEGER);
    for ctx in grammar.contexts() {
        let node = iri(ctx.id.to_string());
        let class = match ctx.kind {
            ContextKind::Entry => "EntryContext",
            ContextKind::Intermediate => "Context",
            ContextKind::Exit => "ExitContext",
        };
        add(&node, vocab::RDF_TYPE, Resource::iri(rwr(class)));
        add(&node, &rwr("forResource"), ctx.for_resource.clone());
        let rules = iri(format!("{}_rules", ctx.id));
        add(&node, &rwr("hasRules"), rules.clone());
        add(&rules, vocab::RDF_TYPE, Resource::iri(vocab::RDF_SEQ));
        for (k, rule) in ctx.rules.iter().enumerate() {
            let r = iri(format!("{}_rule{}", ctx.id, k + 1));
            add(&rules, &vocab::rdf_member(k + 1), r.clone());
            match rule {
                Rule::PathCount { step: s } => {
                    add(&r, vocab::RDF_TYPE, Resource::iri(rwr("PathCount")));
                    add(&r, &rwr("step"), step(*s));
                }
                Rule::Traverse { edges } => {
                    add(&r, vocab::RDF_TYPE, Resource::iri(rwr("Traverse")));
                    for (e, edge) in edges.iter().enumerate() {
                        let en = iri(format!("{}_rule{}_edge{}", ctx.id, k + 1, e + 1));
                        add(&r, &rwr("hasEdge"), en.clone());
                        let (class, far) = match edge.direction {
                            EdgeDirection::Out => ("OutEdge", "hasObject"),
                            EdgeDirection::In => ("InEdge", "hasSubject"),
                        };
                        add(&en, vocab::RDF_TYPE, Resource::iri(rwr(class)));
                        add(&en, &rwr("hasPredicate"), edge.predicate.clone());
                        add(&en, &rwr(far), iri(edge.far_context.to_string()));
                    }
                }
            }
        }
        if !ctx.attributes.is_empty() {
            let bag = iri(format!("{}_attributes", ctx.id));
            add(&node, &rwr("hasAttributes"), bag.clone());
            add(&bag, vocab::RDF_TYPE, Resource::iri(vocab::RDF_BAG));
            for (k, attr) in ctx.attributes.iter().enumerate() {
                let a = iri(format!("{}_attr{}", ctx.id, k + 1));
                add(&bag, &vocab::rdf_member(k + 1), a.clone());
                match attr {
                    Attribute::NotEver => add(&a, vocab::RDF_TYPE, Resource::iri(rwr("NotEver"))),
                    Attribute::Is { step: s } => {
                        add(&a, vocab::RDF_TYPE, Resource::iri(rwr("Is")));
                        add(&a, &rwr("step"), step(*s));
                    }
                    Attribute::Not { step: s } => {
                        add(&a, vocab::RDF_TYPE, Resource::iri(rwr("Not")));
                        add(&a, &rwr("step"), step(*s));
                    }
                }
            }
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::parse_grammar_dsl;
    use crate::triple_store::load_ntriples;

    const G1: &str = include_str!("../../fixtures/G1.pg");
    const G1_TRIPLES: &str = include_str!("../../fixtures/G1.nt");

    #[test]
    fn hand_encoded_g1_matches_dsl() {
        let from_triples = load_grammar_from_triples(&load_ntriples(G1_TRIPLES).unwrap()).unwrap();
        assert_eq!(from_triples, parse_grammar_dsl(G1).unwrap());
    }

    #[test]
    fn encode_then_load_is_identity() {
        let g = parse_grammar_dsl(G1).unwrap();
        let graph = grammar_to_triples(&g, "http://example.org/grammar#");
        assert_eq!(load_grammar_from_triples(&graph).unwrap(), g);
    }

    fn without(text: &str, needle: &str) -> String {
        text.lines()
            .filter(|l| !l.contains(needle))
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn endpoint_count_errors() {
        let no_entry = without(G1_TRIPLES, "rwr:EntryContext");
        let err = load_grammar_from_triples(&load_ntriples(&no_entry).unwrap()).unwrap_err();
        assert_eq!(err, GrammarError::EntryCount(0));

        let two_exits = format!("{G1_TRIPLES}\ng1:Human_3 rdf:type rwr:ExitContext .\n");
        let err = load_grammar_from_triples(&load_ntriples(&two_exits).unwrap()).unwrap_err();
        assert_eq!(err, GrammarError::ExitCount(2));
    }

    #[test]
    fn missing_for_resource() {
        let text = without(G1_TRIPLES, "g1:Researcher_2 rwr:forResource");
        let err = load_grammar_from_triples(&load_ntriples(&text).unwrap()).unwrap_err();
        assert_eq!(
            err,
            GrammarError::MissingForResource {
                context: "Researcher_2".into()
            }
        );
    }

    #[test]
    fn dangling_edge_target() {
        let text = G1_TRIPLES.replace("rwr:hasSubject g1:Human_3", "rwr:hasSubject g1:Nowhere");
        let err = load_grammar_from_triples(&load_ntriples(&text).unwrap()).unwrap_err();
        assert!(matches!(err, GrammarError::Malformed { .. }), "{err:?}");
    }
}
