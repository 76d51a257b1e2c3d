#pragma once

#include "ede/rdf/graph.hpp"

#include <string>
#include <vector>

namespace ede::pipeline {

struct LinkSpec {
    std::string label_predicate = "http://www.w3.org/2000/01/rdf-schema#label";
    std::string link_predicate = "http://www.w3.org/2002/07/owl#sameAs";
};

/// A local node whose label matched more than one reference node.
struct AmbiguousLabel {
    rdf::Term node;
    std::string label;
    std::size_t matches;
};

struct LinkResult {
    rdf::Graph graph;
    std::vector<rdf::Triple> links;
    std::vector<AmbiguousLabel> ambiguous;
};

/// Adds (n, link, m) for every local node n and reference node m carrying a
/// label with the same lexical form (case-sensitive). A node is never linked
/// to itself. Original triples are kept unchanged.
LinkResult link_entities(const rdf::Graph& graph, const rdf::Graph& reference, const LinkSpec& spec = {});

}  // namespace ede::pipeline
