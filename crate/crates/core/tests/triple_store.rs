use std::collections::{BTreeMap, BTreeSet};

use geograms_core::triple_store::{load_ntriples, Graph, Resource, Subsumption, Triple, TriplePattern};
use geograms_core::vocab;
use proptest::prelude::*;

fn r(k: u8) -> Resource {
    Resource::iri(format!("http://example.org/t#r{k}"))
}

fn sub_property() -> Resource {
    Resource::iri(vocab::RDFS_SUBPROPERTY_OF)
}

fn triple_strategy() -> impl Strategy<Value = Triple> {
    (0..6u8, 0..4u8, 0..6u8, 0..10u8).prop_map(|(s, p, o, kind)| {
        if kind == 0 {
            // Subproperty links among the predicates.
            Triple::new(r(10 + p), sub_property(), r(10 + o % 4))
        } else {
            Triple::new(r(s), r(10 + p), r(o))
        }
    })
}

fn pattern_strategy() -> impl Strategy<Value = TriplePattern> {
    let slot = |lo: u8, hi: u8| prop::option::of((lo..hi).prop_map(r));
    (slot(0, 6), slot(10, 14), slot(0, 6)).prop_map(|(s, p, o)| TriplePattern::new(s, p, o))
}

fn scan(triples: &BTreeSet<Triple>, p: &TriplePattern) -> BTreeSet<Triple> {
    triples
        .iter()
        .filter(|t| {
            p.subject.as_ref().is_none_or(|s| *s == t.subject)
                && p.predicate.as_ref().is_none_or(|x| *x == t.predicate)
                && p.object.as_ref().is_none_or(|o| *o == t.object)
        })
        .cloned()
        .collect()
}

/// Reachability over direct subproperty links, by depth-first search.
fn reaches(triples: &BTreeSet<Triple>, a: &Resource, b: &Resource) -> bool {
    let mut up: BTreeMap<&Resource, Vec<&Resource>> = BTreeMap::new();
    for t in triples.iter().filter(|t| t.predicate == sub_property()) {
        up.entry(&t.subject).or_default().push(&t.object);
    }
    let mut seen = BTreeSet::new();
    let mut stack = vec![a];
    while let Some(x) = stack.pop() {
        if x == b {
            return true;
        }
        if seen.insert(x) {
            stack.extend(up.get(x).into_iter().flatten());
        }
    }
    false
}

proptest! {
    #[test]
    fn index_agrees_with_scan(triples in prop::collection::btree_set(triple_strategy(), 0..40), p in pattern_strategy()) {
        let graph = Graph::from_triples(triples.clone()).unwrap();
        prop_assert_eq!(graph.matching(&p), scan(&triples, &p));
        let bound = TriplePattern::new(Some(r(0)), Some(r(10)), Some(r(1)));
        prop_assert!(graph.matching(&bound).len() <= 1);
    }

    #[test]
    fn subproperty_closure_is_reachability(triples in prop::collection::btree_set(triple_strategy(), 0..40)) {
        let graph = Graph::from_triples(triples.clone()).unwrap();
        let single = graph.clone().with_subsumption(Subsumption::SingleHop);
        for a in 10..14 {
            for b in 10..14 {
                let (a, b) = (r(a), r(b));
                prop_assert_eq!(graph.is_subproperty_or_equal(&a, &b), reaches(&triples, &a, &b));
                let direct = a == b || triples.contains(&Triple::new(a.clone(), sub_property(), b.clone()));
                prop_assert_eq!(single.is_subproperty_or_equal(&a, &b), direct);
            }
        }
    }

    #[test]
    fn ntriples_round_trip(triples in prop::collection::btree_set(triple_strategy(), 0..40)) {
        let graph = Graph::from_triples(triples.clone()).unwrap();
        let back = load_ntriples(&graph.to_ntriples()).unwrap();
        prop_assert_eq!(back.triple_set(), triples);
    }
}
