//! Fixed namespaces and IRIs used by the store, the grammar ontology and the
//! path encoding.

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
/// Grammar and walker ontology.
pub const RWR: &str = "http://purl.org/rwr/ontology#";
/// Default namespace for minted walker, path and segment nodes.
pub const RWRX: &str = "http://purl.org/rwr/result#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_SEQ: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Seq";
pub const RDF_BAG: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Bag";
pub const RDF_LI: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#li";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_SUBPROPERTY_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
pub const RDFS_RESOURCE: &str = "http://www.w3.org/2000/01/rdf-schema#Resource";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";

/// `rdf:_n` container membership property.
pub fn rdf_member(n: usize) -> String {
    format!("{RDF}_{n}")
}

/// Inverse of [`rdf_member`]: the numeric suffix of an `rdf:_n` IRI.
pub fn member_index(iri: &str) -> Option<usize> {
    let digits = iri.strip_prefix(RDF)?.strip_prefix('_')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    match digits.parse::<usize>() {
        Ok(n) if n >= 1 => Some(n),
        _ => None,
    }
}

pub fn rwr(local: &str) -> String {
    format!("{RWR}{local}")
}

/// Prefixes every parser knows without an explicit declaration.
pub fn default_prefixes() -> [(&'static str, &'static str); 5] {
    [
        ("rdf", RDF),
        ("rdfs", RDFS),
        ("xsd", XSD),
        ("rwr", RWR),
        ("rwrx", RWRX),
    ]
}
