#![allow(dead_code)]

pub mod oracle;

use geograms_core::grammar::{parse_grammar_dsl, Grammar};
use geograms_core::triple_store::{load_ntriples, Graph, Resource};

pub const F_NT: &str = include_str!("../../fixtures/F.nt");
pub const G1_PG: &str = include_str!("../../fixtures/G1.pg");
pub const G2_PG: &str = include_str!("../../fixtures/G2.pg");
pub const G1_NT: &str = include_str!("../../fixtures/G1.nt");

pub fn lanl(local: &str) -> Resource {
    Resource::iri(format!("http://www.lanl.gov#{local}"))
}

pub fn f_graph() -> Graph {
    load_ntriples(F_NT).unwrap()
}

pub fn g1() -> Grammar {
    parse_grammar_dsl(G1_PG).unwrap()
}

pub fn g2() -> Grammar {
    parse_grammar_dsl(G2_PG).unwrap()
}
